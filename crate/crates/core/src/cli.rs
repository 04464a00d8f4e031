//! Command line interface for the tropbip binary.
//!
//! Subcommands mirror the library: evaluation (`eval`), arrangement
//! location (`region-of`, `face-of`), region inspection (`diagram`,
//! `relations`, `dim`, `class`), cell workflows (`locate`, `decide`,
//! `preimage`, `fiber`), bulk output (`enumerate`, `count`), and the
//! verification suites (`verify`).  Output is plain text by default and
//! structured JSON with `--format json`; identical argv and seed produce
//! byte-identical output.  Exit codes: 0 success or a Yes decision, 1 a
//! No or failed verification, 2 usage or structural errors, 3 enumeration
//! budget exceeded.
//!
//! Matrix and parameter payloads are file paths or inline JSON, with
//! rationals as integers or "p/q" strings (never floats); the schemas are
//! those of the json module.  The TROPBIP_BUDGET environment variable
//! caps enumeration when `--budget` is absent.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arrangement::{
    enumerate_faces, enumerate_regions, face_of_point, region_of_point, RegionLabel, XYPoint,
};
use crate::cells::{
    barvinok2_decide, count_cells, effective_budget, locate_cells, verify_subdivision, CellComplex,
    CellsError, Decision,
};
use crate::counts::{crosscheck, face_egf, large_egf, region_egf, small_formula, CountsError};
use crate::diagram::{
    cell_size_class, diagram_of, image_dimension, relations_v1, relations_v2, RectRelation,
    SizeClass,
};
use crate::json as js;
use crate::morphism::{
    eval_g, generic_fiber, linearization_rank, preimage_in_closure, FiberDescription,
    MorphismError, ParamPoint,
};
use crate::ratcore::{format_rat, parse_rat, Rat, RatMatrix};

#[derive(Parser)]
#[command(
    name = "tropbip",
    version,
    about = "Exact tools for matrices that are entrywise minima of two rank-one matrices"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for internal parallelism (output is identical
    /// regardless).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for all sampling; identical seeds reproduce runs exactly.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on enumerated region labels (default 10000000, or the
    /// TROPBIP_BUDGET environment variable).
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the morphism at a parameter point.
    Eval {
        /// Parameter point: a path to a JSON file or inline JSON with keys
        /// a, A, b, B.
        #[arg(long)]
        input: String,
    },
    /// The region label of a point off the hyperplanes x_i = y_j.
    RegionOf {
        /// Comma-separated rational x coordinates, e.g. "0,1/2,-3".
        #[arg(long)]
        x: String,
        /// Comma-separated rational y coordinates.
        #[arg(long)]
        y: String,
    },
    /// The face label of any point, hyperplane points included.
    FaceOf {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// The black/white diagram of a region.
    Diagram {
        /// Region label, e.g. "1 2' 2 1'".
        #[arg(long)]
        label: String,
    },
    /// The rectangle relations satisfied by a region's image.
    Relations {
        #[arg(long)]
        label: String,
        /// Which derivation: positional patterns (1), per-box sub-grid
        /// classification (2), or both with an agreement check.
        #[arg(long, value_enum, default_value_t = RelVersion::Both)]
        version: RelVersion,
    },
    /// Dimension of a region's image.
    Dim {
        #[arg(long)]
        label: String,
    },
    /// Size class of a region's image cell.
    Class {
        #[arg(long)]
        label: String,
    },
    /// Cells whose closure (and whose interior, if any) contain a matrix.
    Locate {
        /// Matrix: a path to a JSON file or inline JSON ({"m","n","entries"}
        /// or a bare row array).
        #[arg(long)]
        matrix: String,
    },
    /// Decide whether a matrix is an entrywise minimum of two rank-one
    /// matrices; exits 0 on Yes and 1 on No.
    Decide {
        #[arg(long)]
        matrix: String,
        /// Print only the preimage certificate, consumable by `eval --input`.
        #[arg(long)]
        certificate: bool,
    },
    /// An exact preimage of a matrix in the closure of a region's image.
    Preimage {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        label: String,
    },
    /// The four-quadrant fiber over a generic matrix.
    Fiber {
        #[arg(long)]
        matrix: String,
        /// Gauge pins "Ai=V,bj=V" for the two pinned coordinates, e.g.
        /// "A2=3,b2=0"; both default to 0.
        #[arg(long)]
        pin: Option<String>,
    },
    /// List regions, faces, or maximal cells of one shape.
    Enumerate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        what: EnumWhat,
        /// Emit one label per line as items are produced.
        #[arg(long)]
        stream: bool,
    },
    /// Count regions, faces, or cells by enumeration, series, or formula.
    Count {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        what: CountWhat,
        #[arg(long, value_enum)]
        method: Method,
    },
    /// Run a verification suite; exits 0 only if every check passes.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Sample count for the randomized checks.
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RelVersion {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnumWhat {
    Regions,
    Faces,
    SmallCells,
    LargeCells,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountWhat {
    Regions,
    Faces,
    Small,
    Large,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Brute,
    Egf,
    Formula,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Relations,
    Dims,
    Subdivisions,
    Counts,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn negative(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

impl From<CellsError> for Failure {
    fn from(e: CellsError) -> Failure {
        match e {
            CellsError::BudgetExceeded { .. } => Failure { code: 3, message: e.to_string() },
            other => usage(other.to_string()),
        }
    }
}

impl From<CountsError> for Failure {
    fn from(e: CountsError) -> Failure {
        match e {
            CountsError::BudgetExceeded { .. } => Failure { code: 3, message: e.to_string() },
            other => usage(other.to_string()),
        }
    }
}

impl From<MorphismError> for Failure {
    fn from(e: MorphismError) -> Failure {
        match e {
            MorphismError::NotGeneric => negative(e.to_string()),
            other => usage(other.to_string()),
        }
    }
}

impl From<js::JsonError> for Failure {
    fn from(e: js::JsonError) -> Failure {
        usage(e.to_string())
    }
}

/// Parses argv (without the program name), runs the subcommand, and
/// returns the process exit code.
pub fn run<W: Write, E: Write>(args: &[String], out: &mut W, err: &mut E) -> i32 {
    let argv = std::iter::once("tropbip".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{e}");
            return 2;
        }
    };
    if let Some(jobs) = cli.jobs {
        // A global pool may already exist (e.g. repeated in-process runs);
        // the fallback is the default pool, which changes nothing observable.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch<W: Write>(cli: &Cli, out: &mut W) -> Result<i32, Failure> {
    match &cli.command {
        Command::Eval { input } => cmd_eval(cli, input, out),
        Command::RegionOf { x, y } => cmd_region_of(cli, x, y, out),
        Command::FaceOf { x, y } => cmd_face_of(cli, x, y, out),
        Command::Diagram { label } => cmd_diagram(cli, label, out),
        Command::Relations { label, version } => cmd_relations(cli, label, *version, out),
        Command::Dim { label } => cmd_dim(cli, label, out),
        Command::Class { label } => cmd_class(cli, label, out),
        Command::Locate { matrix } => cmd_locate(cli, matrix, out),
        Command::Decide { matrix, certificate } => cmd_decide(cli, matrix, *certificate, out),
        Command::Preimage { matrix, label } => cmd_preimage(cli, matrix, label, out),
        Command::Fiber { matrix, pin } => cmd_fiber(cli, matrix, pin.as_deref(), out),
        Command::Enumerate { m, n, what, stream } => {
            cmd_enumerate(cli, *m, *n, *what, *stream, out)
        }
        Command::Count { m, n, what, method } => cmd_count(cli, *m, *n, *what, *method, out),
        Command::Verify { suite, samples } => cmd_verify(cli, *suite, *samples, out),
    }
}

// ---- payload and argument parsing ----

fn load_json(payload: &str) -> Result<Value, Failure> {
    if std::path::Path::new(payload).exists() {
        let text = std::fs::read_to_string(payload)
            .map_err(|e| usage(format!("cannot read {payload}: {e}")))?;
        return serde_json::from_str(&text)
            .map_err(|e| usage(format!("{payload} is not valid JSON: {e}")));
    }
    serde_json::from_str(payload).map_err(|e| {
        usage(format!(
            "{payload:?} is neither an existing file nor valid inline JSON ({e})"
        ))
    })
}

fn load_matrix(payload: &str) -> Result<RatMatrix, Failure> {
    Ok(js::matrix_from_json(&load_json(payload)?)?)
}

fn load_param(payload: &str) -> Result<ParamPoint, Failure> {
    Ok(js::param_from_json(&load_json(payload)?)?)
}

fn parse_label(text: &str) -> Result<RegionLabel, Failure> {
    RegionLabel::parse(text).map_err(|e| usage(e.to_string()))
}

fn parse_rat_list(text: &str, axis: &str) -> Result<Vec<Rat>, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.iter().all(|p| p.trim().is_empty()) {
        return Err(usage(format!("--{axis} needs at least one coordinate")));
    }
    parts
        .iter()
        .map(|p| parse_rat(p).map_err(|e| usage(format!("--{axis}: {e}"))))
        .collect()
}

fn require_shape(m: usize, n: usize) -> Result<(), Failure> {
    if m == 0 || n == 0 {
        return Err(usage("m and n must be at least 1"));
    }
    Ok(())
}

// ---- output helpers ----

fn emit_json<W: Write>(out: &mut W, v: &Value) -> i32 {
    let text = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    let _ = writeln!(out, "{text}");
    0
}

fn matrix_text(g: &RatMatrix) -> String {
    let mut s = String::new();
    for r in 0..g.rows() {
        let row: Vec<String> = (0..g.cols()).map(|c| format_rat(g.get(r, c))).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

fn param_text(p: &ParamPoint) -> String {
    let line = |vals: &[Rat]| -> String {
        vals.iter().map(format_rat).collect::<Vec<_>>().join(" ")
    };
    format!(
        "a: {}\nA: {}\nb: {}\nB: {}\n",
        line(&p.a),
        line(&p.big_a),
        line(&p.b),
        line(&p.big_b)
    )
}

// ---- subcommands ----

fn cmd_eval<W: Write>(cli: &Cli, input: &str, out: &mut W) -> Result<i32, Failure> {
    let p = load_param(input)?;
    let g = eval_g(&p);
    match cli.format {
        Format::Json => Ok(emit_json(out, &js::matrix_to_json(&g))),
        Format::Text => {
            let _ = write!(out, "{}", matrix_text(&g));
            Ok(0)
        }
    }
}

fn cmd_region_of<W: Write>(cli: &Cli, x: &str, y: &str, out: &mut W) -> Result<i32, Failure> {
    let p = XYPoint { x: parse_rat_list(x, "x")?, y: parse_rat_list(y, "y")? };
    let label = region_of_point(&p).map_err(|e| {
        usage(format!(
            "point lies on the hyperplane x_{} = y_{}; no region contains it (face-of locates it)",
            e.i, e.j
        ))
    })?;
    match cli.format {
        Format::Json => Ok(emit_json(out, &json!({ "label": label.to_string() }))),
        Format::Text => {
            let _ = writeln!(out, "{label}");
            Ok(0)
        }
    }
}

fn cmd_face_of<W: Write>(cli: &Cli, x: &str, y: &str, out: &mut W) -> Result<i32, Failure> {
    let p = XYPoint { x: parse_rat_list(x, "x")?, y: parse_rat_list(y, "y")? };
    let face = face_of_point(&p);
    match cli.format {
        Format::Json => Ok(emit_json(out, &js::face_to_json(&face))),
        Format::Text => {
            let _ = writeln!(out, "{face}");
            Ok(0)
        }
    }
}

fn cmd_diagram<W: Write>(cli: &Cli, label: &str, out: &mut W) -> Result<i32, Failure> {
    let r = parse_label(label)?;
    let d = diagram_of(&r);
    match cli.format {
        Format::Json => {
            let mut v = js::diagram_to_json(&d);
            v["label"] = json!(r.to_string());
            Ok(emit_json(out, &v))
        }
        Format::Text => {
            let _ = write!(out, "{}", d.render_text());
            Ok(0)
        }
    }
}

fn cmd_relations<W: Write>(
    cli: &Cli,
    label: &str,
    version: RelVersion,
    out: &mut W,
) -> Result<i32, Failure> {
    let r = parse_label(label)?;
    let one = || relations_v1(&r);
    let two = || relations_v2(&diagram_of(&r));
    let list_text = |rels: &BTreeSet<RectRelation>| -> String {
        if rels.is_empty() {
            "(none)\n".into()
        } else {
            rels.iter().map(|rel| format!("{rel}\n")).collect()
        }
    };
    match (version, cli.format) {
        (RelVersion::One, Format::Text) => {
            let _ = write!(out, "{}", list_text(&one()));
            Ok(0)
        }
        (RelVersion::Two, Format::Text) => {
            let _ = write!(out, "{}", list_text(&two()));
            Ok(0)
        }
        (RelVersion::Both, Format::Text) => {
            let (v1, v2) = (one(), two());
            let _ = write!(out, "version 1:\n{}", list_text(&v1));
            let _ = write!(out, "version 2:\n{}", list_text(&v2));
            let _ = writeln!(out, "agree: {}", v1 == v2);
            Ok(0)
        }
        (RelVersion::One, Format::Json) => Ok(emit_json(
            out,
            &json!({ "label": r.to_string(), "version": "1", "relations": js::relations_to_json(&one()) }),
        )),
        (RelVersion::Two, Format::Json) => Ok(emit_json(
            out,
            &json!({ "label": r.to_string(), "version": "2", "relations": js::relations_to_json(&two()) }),
        )),
        (RelVersion::Both, Format::Json) => {
            let (v1, v2) = (one(), two());
            let agree = v1 == v2;
            Ok(emit_json(
                out,
                &json!({
                    "label": r.to_string(),
                    "version1": js::relations_to_json(&v1),
                    "version2": js::relations_to_json(&v2),
                    "agree": agree,
                }),
            ))
        }
    }
}

fn cmd_dim<W: Write>(cli: &Cli, label: &str, out: &mut W) -> Result<i32, Failure> {
    let r = parse_label(label)?;
    let dim = image_dimension(&r);
    match cli.format {
        Format::Json => Ok(emit_json(
            out,
            &json!({ "label": r.to_string(), "dimension": dim }),
        )),
        Format::Text => {
            let _ = writeln!(out, "{dim}");
            Ok(0)
        }
    }
}

fn cmd_class<W: Write>(cli: &Cli, label: &str, out: &mut W) -> Result<i32, Failure> {
    let r = parse_label(label)?;
    let class = cell_size_class(&r);
    match cli.format {
        Format::Json => Ok(emit_json(
            out,
            &json!({ "label": r.to_string(), "sizeClass": class.to_string() }),
        )),
        Format::Text => {
            let _ = writeln!(out, "{class}");
            Ok(0)
        }
    }
}

fn cmd_locate<W: Write>(cli: &Cli, matrix: &str, out: &mut W) -> Result<i32, Failure> {
    let g = load_matrix(matrix)?;
    let report = locate_cells(&g, cli.budget)?;
    match cli.format {
        Format::Json => Ok(emit_json(out, &js::locate_to_json(&report))),
        Format::Text => {
            match &report.interior_of {
                Some(cell) => {
                    let _ = writeln!(out, "interior of: {} ({})", cell.key(), cell.size_class);
                }
                None => {
                    let _ = writeln!(out, "interior of: none");
                }
            }
            let _ = writeln!(out, "closed containers ({}):", report.closed_containers.len());
            for cell in &report.closed_containers {
                let _ = writeln!(out, "  {} ({})", cell.key(), cell.size_class);
            }
            Ok(0)
        }
    }
}

fn cmd_decide<W: Write>(
    cli: &Cli,
    matrix: &str,
    certificate: bool,
    out: &mut W,
) -> Result<i32, Failure> {
    let g = load_matrix(matrix)?;
    let decision = barvinok2_decide(&g, cli.budget)?;
    match &decision {
        Decision::Yes { witness_region, preimage } => {
            match (cli.format, certificate) {
                (Format::Json, true) => {
                    emit_json(out, &js::param_to_json(preimage));
                }
                (Format::Json, false) => {
                    emit_json(out, &js::decision_to_json(&decision));
                }
                (Format::Text, with_cert) => {
                    let _ = writeln!(out, "Yes");
                    let _ = writeln!(out, "witness: {witness_region}");
                    if with_cert {
                        let _ = write!(out, "{}", param_text(preimage));
                    }
                }
            }
            Ok(0)
        }
        Decision::No => {
            match cli.format {
                Format::Json => {
                    emit_json(out, &js::decision_to_json(&decision));
                }
                Format::Text => {
                    let _ = writeln!(out, "No");
                }
            }
            Ok(1)
        }
    }
}

fn cmd_preimage<W: Write>(
    cli: &Cli,
    matrix: &str,
    label: &str,
    out: &mut W,
) -> Result<i32, Failure> {
    let g = load_matrix(matrix)?;
    let r = parse_label(label)?;
    if g.rows() != r.m() || g.cols() != r.n() {
        return Err(usage(format!(
            "matrix is {}x{} but the region label is for {}x{}",
            g.rows(),
            g.cols(),
            r.m(),
            r.n()
        )));
    }
    let p = preimage_in_closure(&g, &r).map_err(|e| match e {
        MorphismError::NotInOpenImage => usage(format!(
            "matrix is not in the closed image of region {r}"
        )),
        other => Failure::from(other),
    })?;
    match cli.format {
        Format::Json => Ok(emit_json(out, &js::param_to_json(&p))),
        Format::Text => {
            let _ = write!(out, "{}", param_text(&p));
            Ok(0)
        }
    }
}

fn parse_pins(text: &str) -> Result<((usize, Rat), (usize, Rat)), Failure> {
    let mut pin_a: Option<(usize, Rat)> = None;
    let mut pin_b: Option<(usize, Rat)> = None;
    for part in text.split(',') {
        let part = part.trim();
        let Some((name, value)) = part.split_once('=') else {
            return Err(usage(format!("pin {part:?} is not of the form Ai=V or bj=V")));
        };
        let name = name.trim();
        let value = parse_rat(value).map_err(|e| usage(format!("pin {part:?}: {e}")))?;
        let (family, index_text) = name.split_at(1);
        let index: usize = index_text
            .parse()
            .map_err(|_| usage(format!("pin {part:?} has no coordinate index")))?;
        let slot = match family {
            "A" => &mut pin_a,
            "b" => &mut pin_b,
            other => {
                return Err(usage(format!(
                    "pin family {other:?} is not pinnable; only A and b coordinates are"
                )))
            }
        };
        if slot.replace((index, value)).is_some() {
            return Err(usage(format!("pin family {family:?} given twice")));
        }
    }
    match (pin_a, pin_b) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(usage("--pin needs exactly one A coordinate and one b coordinate")),
    }
}

fn check_pinned_names(
    fiber: &FiberDescription,
    requested: &[String],
) -> Result<(), Failure> {
    let actual: BTreeSet<&str> = fiber.gauge.iter().map(|(name, _)| name.as_str()).collect();
    let wanted: BTreeSet<&str> = requested.iter().map(|s| s.as_str()).collect();
    if actual != wanted {
        let names: Vec<&str> = actual.into_iter().collect();
        return Err(usage(format!(
            "this matrix pins the coordinates {}; got {}",
            names.join(" and "),
            requested.join(" and ")
        )));
    }
    Ok(())
}

fn cmd_fiber<W: Write>(
    cli: &Cli,
    matrix: &str,
    pin: Option<&str>,
    out: &mut W,
) -> Result<i32, Failure> {
    let g = load_matrix(matrix)?;
    let (pins, requested) = match pin {
        None => (None, None),
        Some(text) => {
            let ((ai, av), (bj, bv)) = parse_pins(text)?;
            (
                Some((av, bv)),
                Some(vec![format!("A_{ai}"), format!("b_{bj}")]),
            )
        }
    };
    let fiber = generic_fiber(&g, pins)?;
    if let Some(requested) = requested {
        check_pinned_names(&fiber, &requested)?;
    }
    match cli.format {
        Format::Json => Ok(emit_json(out, &js::fiber_to_json(&fiber))),
        Format::Text => {
            let _ = writeln!(out, "small region: {}", fiber.small_region);
            let _ = writeln!(out, "degenerate: {}", fiber.degenerate);
            let named = |pairs: &[(String, Rat)]| -> String {
                pairs
                    .iter()
                    .map(|(name, v)| format!("{name} = {}", format_rat(v)))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let _ = writeln!(out, "gauge: {}", named(&fiber.gauge));
            let _ = writeln!(out, "apex: {}", named(&fiber.apex));
            for (k, q) in fiber.regions.iter().enumerate() {
                let corner = |black: bool| if black { "black" } else { "white" };
                let _ = writeln!(
                    out,
                    "quadrant {}: {} ({}), nw {}, se {}, free {} > {} and {} > {}",
                    k + 1,
                    q.label,
                    q.size_class,
                    corner(q.nw_black),
                    corner(q.se_black),
                    q.free[0].name(),
                    format_rat(&q.free[0].lower_bound),
                    q.free[1].name(),
                    format_rat(&q.free[1].lower_bound),
                );
            }
            let _ = writeln!(
                out,
                "free dof: {}",
                fiber
                    .free_dof
                    .iter()
                    .map(|s| format!("({} up, {} down)", s.plus, s.minus))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            Ok(0)
        }
    }
}

fn cmd_enumerate<W: Write>(
    cli: &Cli,
    m: usize,
    n: usize,
    what: EnumWhat,
    stream: bool,
    out: &mut W,
) -> Result<i32, Failure> {
    require_shape(m, n)?;
    let budget = effective_budget(cli.budget);
    let over_budget = || Failure {
        code: 3,
        message: format!("enumeration exceeded the budget of {budget} labels"),
    };
    match what {
        EnumWhat::Regions => {
            let mut seen = 0u64;
            let mut labels = Vec::new();
            for r in enumerate_regions(m, n) {
                seen += 1;
                if seen > budget {
                    return Err(over_budget());
                }
                if stream || cli.format == Format::Text {
                    let _ = writeln!(out, "{r}");
                } else {
                    labels.push(json!(r.to_string()));
                }
            }
            if !stream && cli.format == Format::Json {
                return Ok(emit_json(out, &Value::Array(labels)));
            }
            Ok(0)
        }
        EnumWhat::Faces => {
            let mut seen = 0u64;
            let mut faces = Vec::new();
            for f in enumerate_faces(m, n) {
                seen += 1;
                if seen > budget {
                    return Err(over_budget());
                }
                if stream || cli.format == Format::Text {
                    let _ = writeln!(out, "{f}");
                } else {
                    faces.push(js::face_to_json(&f));
                }
            }
            if !stream && cli.format == Format::Json {
                return Ok(emit_json(out, &Value::Array(faces)));
            }
            Ok(0)
        }
        EnumWhat::SmallCells | EnumWhat::LargeCells => {
            let class = if what == EnumWhat::SmallCells {
                SizeClass::Small
            } else {
                SizeClass::Large
            };
            let complex = CellComplex::build(m, n, cli.budget)?;
            if !stream && cli.format == Format::Json {
                let cells: Vec<Value> =
                    complex.cells_of_class(class).map(js::cell_to_json).collect();
                return Ok(emit_json(out, &Value::Array(cells)));
            }
            for cell in complex.cells_of_class(class) {
                let _ = writeln!(out, "{}", cell.key());
            }
            Ok(0)
        }
    }
}

fn cmd_count<W: Write>(
    cli: &Cli,
    m: usize,
    n: usize,
    what: CountWhat,
    method: Method,
    out: &mut W,
) -> Result<i32, Failure> {
    let budget = effective_budget(cli.budget);
    let over_budget = || Failure {
        code: 3,
        message: format!("enumeration exceeded the budget of {budget} labels"),
    };
    let mut extras: Vec<(&str, Value)> = Vec::new();
    let value: Rat = match (what, method) {
        (CountWhat::Regions, Method::Brute) => {
            require_shape(m, n)?;
            let mut seen = 0u64;
            for _ in enumerate_regions(m, n) {
                seen += 1;
                if seen > budget {
                    return Err(over_budget());
                }
            }
            crate::ratcore::rat(seen as i64)
        }
        (CountWhat::Regions, Method::Egf) => region_egf(m, n).coeff(0, m, n).clone(),
        (CountWhat::Faces, Method::Brute) => {
            require_shape(m, n)?;
            let mut seen = 0u64;
            for _ in enumerate_faces(m, n) {
                seen += 1;
                if seen > budget {
                    return Err(over_budget());
                }
            }
            crate::ratcore::rat(seen as i64)
        }
        (CountWhat::Faces, Method::Egf) => face_egf(m + n, m, n).sum_over_t(m, n),
        (CountWhat::Small, Method::Formula) => crate::ratcore::rat(small_formula(m, n) as i64),
        (CountWhat::Small, Method::Brute) => {
            require_shape(m, n)?;
            let counts = count_cells(m, n, SizeClass::Small, cli.budget)?;
            crate::ratcore::rat(counts.distinct_images as i64)
        }
        (CountWhat::Large, Method::Egf) => large_egf(m, n).coeff(0, m, n).clone(),
        (CountWhat::Large, Method::Brute) => {
            require_shape(m, n)?;
            let counts = count_cells(m, n, SizeClass::Large, cli.budget)?;
            extras.push(("distinctImages", json!(counts.distinct_images)));
            crate::ratcore::rat(counts.positive_regions as i64)
        }
        (CountWhat::Regions, Method::Formula) | (CountWhat::Faces, Method::Formula) => {
            return Err(usage("regions and faces have no closed formula; use egf or brute"))
        }
        (CountWhat::Small, Method::Egf) => {
            return Err(usage("small cells are counted by formula, not a series"))
        }
        (CountWhat::Large, Method::Formula) => {
            return Err(usage("large cells are counted by egf, not a closed formula"))
        }
    };
    match cli.format {
        Format::Json => {
            let what_name = match what {
                CountWhat::Regions => "regions",
                CountWhat::Faces => "faces",
                CountWhat::Small => "small",
                CountWhat::Large => "large",
            };
            let method_name = match method {
                Method::Brute => "brute",
                Method::Egf => "egf",
                Method::Formula => "formula",
            };
            let mut v = json!({
                "m": m,
                "n": n,
                "what": what_name,
                "method": method_name,
                "value": js::rat_to_json(&value),
            });
            for (key, extra) in extras {
                v[key] = extra;
            }
            Ok(emit_json(out, &v))
        }
        Format::Text => {
            let _ = writeln!(out, "{}", format_rat(&value));
            Ok(0)
        }
    }
}

struct SuiteCheck {
    name: String,
    passed: bool,
    detail: String,
    witness: Option<String>,
}

fn emit_suite<W: Write>(
    cli: &Cli,
    suite_name: &str,
    checks: &[SuiteCheck],
    extra_json: Option<(&str, Value)>,
    out: &mut W,
) -> i32 {
    let passed = checks.iter().all(|c| c.passed);
    match cli.format {
        Format::Json => {
            let check_values: Vec<Value> = checks
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
                .collect();
            let mut v = json!({
                "suite": suite_name,
                "passed": passed,
                "checks": check_values,
            });
            if let Some((key, extra)) = extra_json {
                v[key] = extra;
            }
            emit_json(out, &v);
        }
        Format::Text => {
            for c in checks {
                let status = if c.passed { "pass" } else { "FAIL" };
                let _ = write!(out, "{status} {}: {}", c.name, c.detail);
                if let Some(w) = &c.witness {
                    let _ = write!(out, " [{w}]");
                }
                let _ = writeln!(out);
            }
            let verdict = if passed { "passed" } else { "FAILED" };
            let _ = writeln!(out, "suite {suite_name}: {verdict}");
        }
    }
    if passed {
        0
    } else {
        1
    }
}

fn cmd_verify<W: Write>(
    cli: &Cli,
    suite: Suite,
    samples: usize,
    out: &mut W,
) -> Result<i32, Failure> {
    match suite {
        Suite::Relations => {
            let mut checks = Vec::new();
            for m in 1..=3 {
                for n in 1..=3 {
                    let mut regions = 0u64;
                    let mut witness = None;
                    for r in enumerate_regions(m, n) {
                        regions += 1;
                        if relations_v1(&r) != relations_v2(&diagram_of(&r)) {
                            witness = Some(format!("versions disagree at {r}"));
                            break;
                        }
                    }
                    checks.push(SuiteCheck {
                        name: format!("relations-{m}x{n}"),
                        passed: witness.is_none(),
                        detail: format!("{regions} regions compared"),
                        witness,
                    });
                }
            }
            Ok(emit_suite(cli, "relations", &checks, None, out))
        }
        Suite::Dims => {
            let mut checks = Vec::new();
            for m in 1..=3 {
                for n in 1..=3 {
                    let mut regions = 0u64;
                    let mut witness = None;
                    for r in enumerate_regions(m, n) {
                        regions += 1;
                        let (dim, rank) = (image_dimension(&r), linearization_rank(&r));
                        if dim != rank {
                            witness =
                                Some(format!("{r}: dimension {dim} but linear rank {rank}"));
                            break;
                        }
                    }
                    checks.push(SuiteCheck {
                        name: format!("dims-{m}x{n}"),
                        passed: witness.is_none(),
                        detail: format!("{regions} regions compared"),
                        witness,
                    });
                }
            }
            Ok(emit_suite(cli, "dims", &checks, None, out))
        }
        Suite::Subdivisions => {
            let mut checks = Vec::new();
            let mut reports = Vec::new();
            for (m, n) in [(2, 2), (2, 3), (3, 3)] {
                let report = verify_subdivision(m, n, samples, cli.seed, cli.budget)?;
                for c in &report.checks {
                    checks.push(SuiteCheck {
                        name: format!("{}-{m}x{n}", c.name),
                        passed: c.passed,
                        detail: c.detail.clone(),
                        witness: c.witness.clone(),
                    });
                }
                reports.push(js::subdivision_to_json(&report));
            }
            Ok(emit_suite(
                cli,
                "subdivisions",
                &checks,
                Some(("reports", Value::Array(reports))),
                out,
            ))
        }
        Suite::Counts => {
            let report = crosscheck(3, 3, cli.budget)?;
            if cli.format == Format::Text {
                let _ = write!(out, "{}", report.render_text());
            }
            let checks = vec![SuiteCheck {
                name: "counts-crosscheck".into(),
                passed: report.is_clean(),
                detail: format!(
                    "{} region, {} face, {} small and {} large comparisons",
                    report.regions.len(),
                    report.faces.len(),
                    report.small_cells.len(),
                    report.large_cells.len()
                ),
                witness: report
                    .discrepancies
                    .first()
                    .map(|d| format!("{} at m={} n={}: {}", d.quantity, d.m, d.n, d.detail)),
            }];
            Ok(emit_suite(
                cli,
                "counts",
                &checks,
                Some(("report", js::count_report_to_json(&report))),
                out,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(&args, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).expect("stdout is UTF-8"),
            String::from_utf8(err).expect("stderr is UTF-8"),
        )
    }

    #[test]
    fn eval_prints_the_anchor_matrix() {
        let (code, out, _) = run_cli(&[
            "eval",
            "--input",
            r#"{"a":[0,1],"A":[3,0],"b":[2,0],"B":[0,2]}"#,
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "2 0\n0 1\n");
    }

    #[test]
    fn eval_json_round_trips_through_the_matrix_schema() {
        let (code, out, _) = run_cli(&[
            "--format",
            "json",
            "eval",
            "--input",
            r#"{"a":[0,1],"A":[3,0],"b":[2,0],"B":[0,2]}"#,
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["entries"], json!([[2, 0], [0, 1]]));
    }

    #[test]
    fn region_of_locates_points_and_rejects_hyperplane_points() {
        let (code, out, _) = run_cli(&["region-of", "--x", "0,2", "--y", "1,3"]);
        assert_eq!(code, 0);
        assert_eq!(out, "1 1' 2 2'\n");

        let (code, _, err) = run_cli(&["region-of", "--x", "1", "--y", "1"]);
        assert_eq!(code, 2);
        assert!(err.contains("x_1 = y_1"));
    }

    #[test]
    fn face_of_reports_mixed_blocks() {
        let (code, out, _) = run_cli(&["face-of", "--x", "1", "--y", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "[1 1']\n");
    }

    #[test]
    fn decide_yes_exits_zero_and_no_exits_one() {
        let (code, out, _) = run_cli(&["decide", "--matrix", "[[0,0],[0,0]]"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("Yes\n"));
        assert!(out.contains("witness: 1 2 1' 2'"));

        let (code, out, _) =
            run_cli(&["decide", "--matrix", "[[0,1,1],[1,0,1],[1,1,0]]"]);
        assert_eq!(code, 1);
        assert_eq!(out, "No\n");
    }

    #[test]
    fn decide_certificate_feeds_back_through_eval() {
        let (code, cert, _) = run_cli(&[
            "--format",
            "json",
            "decide",
            "--certificate",
            "--matrix",
            "[[3,1],[0,2]]",
        ]);
        assert_eq!(code, 0);
        let (code, out, _) = run_cli(&["--format", "json", "eval", "--input", cert.trim()]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["entries"], json!([[3, 1], [0, 2]]));
    }

    #[test]
    fn count_regions_brute_matches_the_spec_example() {
        let (code, out, _) = run_cli(&[
            "count", "--m", "2", "--n", "2", "--what", "regions", "--method", "brute",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "14\n");

        let (code, out, _) = run_cli(&[
            "count", "--m", "2", "--n", "2", "--what", "regions", "--method", "egf",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "14\n");

        let (code, _, err) = run_cli(&[
            "count", "--m", "2", "--n", "2", "--what", "regions", "--method", "formula",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("no closed formula"));
    }

    #[test]
    fn enumerate_streams_labels_deterministically() {
        let (code, out, _) = run_cli(&[
            "enumerate", "--m", "1", "--n", "2", "--what", "regions", "--stream",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 4);
        let again = run_cli(&[
            "enumerate", "--m", "1", "--n", "2", "--what", "regions", "--stream",
        ]);
        assert_eq!(again.1, out);
    }

    #[test]
    fn enumerate_large_cells_lists_canonical_keys() {
        let (code, out, _) = run_cli(&[
            "enumerate", "--m", "2", "--n", "2", "--what", "large-cells",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "1 1' 2' 2\n");
    }

    #[test]
    fn locate_reports_interior_and_containers() {
        let (code, out, _) = run_cli(&["locate", "--matrix", "[[0,2],[1,0]]"]);
        assert_eq!(code, 0);
        assert!(out.contains("interior of: 1 2' 2 1' (small)"));

        let (code, out, _) = run_cli(&["locate", "--matrix", "[[0,0],[0,0]]"]);
        assert_eq!(code, 0);
        assert!(out.contains("interior of: none"));
        assert!(out.contains("closed containers (3):"));
    }

    #[test]
    fn relations_both_agree() {
        let (code, out, _) = run_cli(&["relations", "--label", "1 2' 2 1'"]);
        assert_eq!(code, 0);
        assert!(out.contains("agree: true"));
        assert!(out.contains("Delta(1,2;2,1) > 0"));
    }

    #[test]
    fn dim_and_class_answer_planely() {
        let (code, out, _) = run_cli(&["dim", "--label", "1 1' 2' 2"]);
        assert_eq!(code, 0);
        assert_eq!(out, "4\n");
        let (code, out, _) = run_cli(&["class", "--label", "1 1' 2' 2"]);
        assert_eq!(code, 0);
        assert_eq!(out, "large\n");
    }

    #[test]
    fn preimage_succeeds_inside_the_closure_only() {
        let (code, out, _) =
            run_cli(&["preimage", "--matrix", "[[0,0],[0,0]]", "--label", "1 2 1' 2'"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("a: "));

        let (code, _, err) =
            run_cli(&["preimage", "--matrix", "[[0,2],[1,0]]", "--label", "1 1' 2 2'"]);
        assert_eq!(code, 2);
        assert!(err.contains("not in the closed image"));
    }

    #[test]
    fn fiber_text_reports_the_degenerate_anchor() {
        let (code, out, _) = run_cli(&["fiber", "--matrix", "[[3,1],[0,2]]"]);
        assert_eq!(code, 0);
        assert!(out.contains("degenerate: true"));
        assert!(out.contains("quadrant 4"));

        let (code, _, err) = run_cli(&["fiber", "--matrix", "[[0,0],[0,0]]"]);
        assert_eq!(code, 1);
        assert!(err.contains("not interior"));
    }

    #[test]
    fn fiber_rejects_pins_for_the_wrong_coordinates() {
        let (code, _, err) = run_cli(&[
            "fiber", "--matrix", "[[3,1],[0,2]]", "--pin", "A1=0,b1=0",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("pins the coordinates"));
    }

    #[test]
    fn verify_relations_and_dims_pass() {
        let (code, out, _) = run_cli(&["verify", "--suite", "relations"]);
        assert_eq!(code, 0);
        assert!(out.contains("suite relations: passed"));

        let (code, out, _) = run_cli(&["verify", "--suite", "dims"]);
        assert_eq!(code, 0);
        assert!(out.contains("suite dims: passed"));
    }

    #[test]
    fn budget_exceeded_exits_three() {
        let (code, _, err) = run_cli(&[
            "--budget", "3", "enumerate", "--m", "2", "--n", "2", "--what", "regions",
        ]);
        assert_eq!(code, 3);
        assert!(err.contains("budget"));
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, _, _) = run_cli(&["decide"]);
        assert_eq!(code, 2);
        let (code, _, err) = run_cli(&["decide", "--matrix", "nonsense"]);
        assert_eq!(code, 2);
        assert!(err.contains("neither an existing file nor valid inline JSON"));
        let (code, _, _) = run_cli(&["no-such-command"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_cli(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("tropbip"));
    }
}
