//! JSON conversions for the domain types.
//!
//! All rationals travel as JSON integers when the denominator is 1 and the
//! numerator fits a 64-bit integer, and as "p/q" strings otherwise; floats
//! are rejected in both directions.  Parameter points use the keys
//! "a", "A", "b", "B"; matrices use {"m", "n", "entries"} with row-major
//! entry rows (a bare array of rows is also accepted on input).  Builders
//! here are plain functions over `serde_json::Value`, so every schema is
//! spelled out explicitly in one place.

use std::collections::BTreeSet;
use std::fmt;

use num::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::arrangement::{FaceLabel, RegionLabel};
use crate::cells::{Cell, Decision, LocateReport, SubdivisionReport};
use crate::counts::CountReport;
use crate::diagram::{Diagram, RectRelation, RelKind};
use crate::morphism::{FiberDescription, ParamPoint};
use crate::ratcore::{format_rat, parse_rat, Rat, RatMatrix};

/// Error converting a JSON value into a domain type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonError(pub String);

impl fmt::Display for JsonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed JSON payload: {}", self.0)
    }
}

impl std::error::Error for JsonError {}

fn err<T>(msg: impl Into<String>) -> Result<T, JsonError> {
    Err(JsonError(msg.into()))
}

pub fn rat_to_json(r: &Rat) -> Value {
    use num::One;
    if r.denom().is_one() {
        if let Some(i) = r.numer().to_i64() {
            return json!(i);
        }
    }
    json!(format_rat(r))
}

pub fn rat_from_json(v: &Value) -> Result<Rat, JsonError> {
    match v {
        Value::Number(num) => match num.as_i64() {
            Some(i) => Ok(crate::ratcore::rat(i)),
            None => err(format!("number {num} is not an exact integer; floats are rejected")),
        },
        Value::String(s) => parse_rat(s).map_err(|e| JsonError(e.to_string())),
        other => err(format!("expected integer or \"p/q\" string, got {other}")),
    }
}

pub fn rats_to_json(rs: &[Rat]) -> Value {
    Value::Array(rs.iter().map(rat_to_json).collect())
}

pub fn rats_from_json(v: &Value) -> Result<Vec<Rat>, JsonError> {
    let Value::Array(items) = v else {
        return err(format!("expected an array of rationals, got {v}"));
    };
    items.iter().map(rat_from_json).collect()
}

pub fn param_to_json(p: &ParamPoint) -> Value {
    json!({
        "a": rats_to_json(&p.a),
        "A": rats_to_json(&p.big_a),
        "b": rats_to_json(&p.b),
        "B": rats_to_json(&p.big_b),
    })
}

pub fn param_from_json(v: &Value) -> Result<ParamPoint, JsonError> {
    let Value::Object(map) = v else {
        return err(format!("expected an object with keys a, A, b, B, got {v}"));
    };
    let field = |key: &str| -> Result<Vec<Rat>, JsonError> {
        match map.get(key) {
            Some(val) => rats_from_json(val),
            None => err(format!("missing key {key:?}")),
        }
    };
    let (a, big_a, b, big_b) = (field("a")?, field("A")?, field("b")?, field("B")?);
    ParamPoint::new(a, big_a, b, big_b).map_err(|e| JsonError(e.to_string()))
}

pub fn matrix_to_json(g: &RatMatrix) -> Value {
    let entries: Vec<Value> = (0..g.rows())
        .map(|r| Value::Array((0..g.cols()).map(|c| rat_to_json(g.get(r, c))).collect()))
        .collect();
    json!({ "m": g.rows(), "n": g.cols(), "entries": entries })
}

pub fn matrix_from_json(v: &Value) -> Result<RatMatrix, JsonError> {
    let entries = match v {
        Value::Array(_) => v,
        Value::Object(map) => {
            let entries = map
                .get("entries")
                .ok_or_else(|| JsonError("missing key \"entries\"".into()))?;
            if let (Some(m), Some(n), Value::Array(rows)) =
                (map.get("m"), map.get("n"), entries)
            {
                let (m, n) = (dim_from_json(m)?, dim_from_json(n)?);
                if rows.len() != m {
                    return err(format!("\"m\" is {m} but entries has {} rows", rows.len()));
                }
                if let Some(Value::Array(first)) = rows.first() {
                    if first.len() != n {
                        return err(format!(
                            "\"n\" is {n} but the first row has {} entries",
                            first.len()
                        ));
                    }
                }
            }
            entries
        }
        other => return err(format!("expected a matrix object or row array, got {other}")),
    };
    let Value::Array(rows) = entries else {
        return err(format!("\"entries\" must be an array of rows, got {entries}"));
    };
    if rows.is_empty() {
        return err("matrix must have at least one row");
    }
    let parsed: Vec<Vec<Rat>> = rows
        .iter()
        .map(rats_from_json)
        .collect::<Result<_, _>>()?;
    let width = parsed[0].len();
    if width == 0 {
        return err("matrix rows must be non-empty");
    }
    if parsed.iter().any(|row| row.len() != width) {
        return err("matrix rows have unequal lengths");
    }
    Ok(RatMatrix::from_rows(parsed))
}

fn dim_from_json(v: &Value) -> Result<usize, JsonError> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| JsonError(format!("expected a dimension count, got {v}")))
}

pub fn region_to_json(r: &RegionLabel) -> Value {
    json!(r.to_string())
}

pub fn region_from_json(v: &Value) -> Result<RegionLabel, JsonError> {
    let Value::String(s) = v else {
        return err(format!("expected a region label string, got {v}"));
    };
    RegionLabel::parse(s).map_err(|e| JsonError(e.to_string()))
}

pub fn face_to_json(f: &FaceLabel) -> Value {
    json!({
        "label": f.to_string(),
        "dimension": f.dimension(),
        "isRegion": f.is_region(),
    })
}

pub fn relation_to_json(rel: &RectRelation) -> Value {
    json!({
        "i1": rel.i1,
        "i2": rel.i2,
        "j1": rel.j1,
        "j2": rel.j2,
        "kind": match rel.kind { RelKind::Eq => "eq", RelKind::Gt => "gt" },
        "display": rel.to_string(),
    })
}

pub fn relations_to_json(rels: &BTreeSet<RectRelation>) -> Value {
    Value::Array(rels.iter().map(relation_to_json).collect())
}

pub fn diagram_to_json(d: &Diagram) -> Value {
    let black: Vec<Value> = (0..d.m())
        .map(|r| Value::Array((0..d.n()).map(|c| json!(d.is_black(r, c))).collect()))
        .collect();
    json!({
        "m": d.m(),
        "n": d.n(),
        "rowOrder": d.row_order(),
        "colOrder": d.col_order(),
        "black": black,
        "path": d.path_string(),
    })
}

pub fn cell_to_json(c: &Cell) -> Value {
    json!({
        "key": c.key().to_string(),
        "sizeClass": c.size_class.to_string(),
        "relations": relations_to_json(&c.relations),
        "representatives": Value::Array(
            c.representatives.iter().map(region_to_json).collect()
        ),
    })
}

pub fn locate_to_json(r: &LocateReport) -> Value {
    json!({
        "m": r.m,
        "n": r.n,
        "interiorOf": match &r.interior_of {
            Some(cell) => cell_to_json(cell),
            None => Value::Null,
        },
        "closedContainers": Value::Array(
            r.closed_containers.iter().map(cell_to_json).collect()
        ),
    })
}

pub fn decision_to_json(d: &Decision) -> Value {
    match d {
        Decision::Yes { witness_region, preimage } => json!({
            "decision": "yes",
            "witnessRegion": witness_region.to_string(),
            "certificate": param_to_json(preimage),
        }),
        Decision::No => json!({ "decision": "no" }),
    }
}

pub fn fiber_to_json(f: &FiberDescription) -> Value {
    let named_rats = |pairs: &[(String, Rat)]| -> Value {
        Value::Array(
            pairs
                .iter()
                .map(|(name, value)| json!({ "name": name, "value": rat_to_json(value) }))
                .collect(),
        )
    };
    let regions: Vec<Value> = f
        .regions
        .iter()
        .map(|q| {
            json!({
                "label": q.label.to_string(),
                "sizeClass": q.size_class.to_string(),
                "nwBlack": q.nw_black,
                "seBlack": q.se_black,
                "free": Value::Array(
                    q.free
                        .iter()
                        .map(|fp| {
                            json!({
                                "name": fp.name(),
                                "family": fp.family.to_string(),
                                "index": fp.index,
                                "lowerBound": rat_to_json(&fp.lower_bound),
                            })
                        })
                        .collect(),
                ),
                "witness": param_to_json(&q.witness),
            })
        })
        .collect();
    json!({
        "m": f.m,
        "n": f.n,
        "degenerate": f.degenerate,
        "smallRegion": f.small_region.to_string(),
        "gauge": named_rats(&f.gauge),
        "apex": named_rats(&f.apex),
        "regions": regions,
        "freeDof": Value::Array(
            f.free_dof
                .iter()
                .map(|s| json!({ "plus": s.plus.to_string(), "minus": s.minus.to_string() }))
                .collect(),
        ),
    })
}

pub fn subdivision_to_json(r: &SubdivisionReport) -> Value {
    json!({
        "m": r.m,
        "n": r.n,
        "samples": r.samples,
        "seed": r.seed,
        "smallCells": r.small_cells,
        "largeCells": r.large_cells,
        "passed": r.passed(),
        "checks": Value::Array(
            r.checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "passed": c.passed,
                        "detail": c.detail,
                        "witness": match &c.witness {
                            Some(w) => json!(w),
                            None => Value::Null,
                        },
                    })
                })
                .collect(),
        ),
    })
}

pub fn count_report_to_json(r: &CountReport) -> Value {
    let tallies = |ts: &[crate::counts::Tally]| -> Value {
        Value::Array(
            ts.iter()
                .map(|t| json!({ "source": t.source.as_str(), "value": t.value }))
                .collect(),
        )
    };
    let faces: Vec<Value> = r
        .faces
        .iter()
        .map(|e| json!({ "k": e.k, "m": e.m, "n": e.n, "tallies": tallies(&e.tallies) }))
        .collect();
    let regions: Vec<Value> = r
        .regions
        .iter()
        .map(|e| json!({ "m": e.m, "n": e.n, "tallies": tallies(&e.tallies) }))
        .collect();
    let cells = |entries: &[crate::counts::CellEntry]| -> Value {
        Value::Array(
            entries
                .iter()
                .map(|e| {
                    let mut obj = Map::new();
                    obj.insert("m".into(), json!(e.m));
                    obj.insert("n".into(), json!(e.n));
                    obj.insert("tallies".into(), tallies(&e.tallies));
                    if let Some(note) = &e.note {
                        obj.insert("note".into(), json!(note));
                    }
                    Value::Object(obj)
                })
                .collect(),
        )
    };
    json!({
        "mMax": r.m_max,
        "nMax": r.n_max,
        "faces": faces,
        "regions": regions,
        "smallCells": cells(&r.small_cells),
        "largeCells": cells(&r.large_cells),
        "discrepancies": Value::Array(
            r.discrepancies
                .iter()
                .map(|d| {
                    json!({
                        "quantity": d.quantity,
                        "k": match d.k { Some(k) => json!(k), None => Value::Null },
                        "m": d.m,
                        "n": d.n,
                        "detail": d.detail,
                    })
                })
                .collect(),
        ),
        "clean": r.is_clean(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::{rat, ratio};

    #[test]
    fn rationals_round_trip_as_ints_or_strings() {
        assert_eq!(rat_to_json(&rat(5)), json!(5));
        assert_eq!(rat_to_json(&ratio(-7, 2)), json!("-7/2"));
        assert_eq!(rat_from_json(&json!(5)).unwrap(), rat(5));
        assert_eq!(rat_from_json(&json!("-7/2")).unwrap(), ratio(-7, 2));
        assert_eq!(rat_from_json(&json!("3")).unwrap(), rat(3));
        assert!(rat_from_json(&json!(1.5)).is_err());
        assert!(rat_from_json(&json!("1.5")).is_err());
    }

    #[test]
    fn params_round_trip_with_capital_keys() {
        let p = ParamPoint::new(
            vec![rat(0), ratio(1, 2)],
            vec![rat(3), rat(-1)],
            vec![rat(2)],
            vec![rat(0)],
        )
        .unwrap();
        let v = param_to_json(&p);
        assert_eq!(v["A"], json!([3, -1]));
        assert_eq!(v["a"], json!([0, "1/2"]));
        assert_eq!(param_from_json(&v).unwrap(), p);
        assert!(param_from_json(&json!({ "a": [0], "b": [0] })).is_err());
    }

    #[test]
    fn matrices_round_trip_and_accept_bare_rows() {
        let g = RatMatrix::from_i64(&[&[0, 2], &[1, 0]]);
        let v = matrix_to_json(&g);
        assert_eq!(v, json!({ "m": 2, "n": 2, "entries": [[0, 2], [1, 0]] }));
        assert_eq!(matrix_from_json(&v).unwrap(), g);
        assert_eq!(matrix_from_json(&json!([[0, 2], [1, 0]])).unwrap(), g);
        assert!(matrix_from_json(&json!({ "m": 3, "n": 2, "entries": [[0, 2]] })).is_err());
        assert!(matrix_from_json(&json!([[0, 2], [1]])).is_err());
    }

    #[test]
    fn relations_serialize_with_canonical_display() {
        let rel = RectRelation::gt(1, 2, 2, 1);
        let v = relation_to_json(&rel);
        assert_eq!(v["kind"], json!("gt"));
        assert_eq!(v["display"], json!("Delta(1,2;2,1) > 0"));
    }

    #[test]
    fn decisions_embed_certificates_that_evaluate_back() {
        use crate::cells::barvinok2_decide;
        use crate::morphism::eval_g;
        let zeros = RatMatrix::from_i64(&[&[0, 0], &[0, 0]]);
        let d = barvinok2_decide(&zeros, None).unwrap();
        let v = decision_to_json(&d);
        assert_eq!(v["decision"], json!("yes"));
        let cert = param_from_json(&v["certificate"]).unwrap();
        assert_eq!(eval_g(&cert), zeros);
    }
}
