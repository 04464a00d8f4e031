use super::rat::Rat;
use num::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// How a row's left-hand side compares to its right-hand side.
///
/// Strict inequalities are first-class: the solver decides feasibility of
/// mixed strict/weak systems exactly, with no epsilon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Relation {
    /// coeffs . x == rhs
    Eq,
    /// coeffs . x >= rhs
    Ge,
    /// coeffs . x > rhs
    Gt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Row {
    coeffs: Vec<Rat>,
    rel: Relation,
    rhs: Rat,
}

/// A finite system of exact linear relations over `vars` variables.
#[derive(Debug, Clone)]
pub struct LinSystem {
    vars: usize,
    rows: Vec<Row>,
}

/// Outcome of an exact feasibility check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    /// The system has a solution; the witness satisfies every equality
    /// exactly, every strict inequality strictly, and every weak inequality
    /// weakly.
    Feasible(Vec<Rat>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinSysError {
    /// A row's coefficient vector does not match the declared variable count.
    DimensionMismatch { expected: usize, got: usize },
    /// Elimination produced more rows than the internal safety budget.
    Blowup(usize),
}

impl fmt::Display for LinSysError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinSysError::DimensionMismatch { expected, got } => {
                write!(f, "coefficient vector has {got} entries, system has {expected} variables")
            }
            LinSysError::Blowup(n) => {
                write!(f, "elimination exceeded the internal row budget ({n} rows)")
            }
        }
    }
}

impl std::error::Error for LinSysError {}

const ROW_BUDGET: usize = 1_000_000;

impl LinSystem {
    pub fn new(vars: usize) -> Self {
        LinSystem { vars, rows: Vec::new() }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Adds `coeffs . x rel rhs`.
    pub fn push(&mut self, coeffs: Vec<Rat>, rel: Relation, rhs: Rat) -> Result<(), LinSysError> {
        if coeffs.len() != self.vars {
            return Err(LinSysError::DimensionMismatch { expected: self.vars, got: coeffs.len() });
        }
        self.rows.push(Row { coeffs, rel, rhs });
        Ok(())
    }

    pub fn push_eq(&mut self, coeffs: Vec<Rat>, rhs: Rat) -> Result<(), LinSysError> {
        self.push(coeffs, Relation::Eq, rhs)
    }

    pub fn push_ge(&mut self, coeffs: Vec<Rat>, rhs: Rat) -> Result<(), LinSysError> {
        self.push(coeffs, Relation::Ge, rhs)
    }

    pub fn push_gt(&mut self, coeffs: Vec<Rat>, rhs: Rat) -> Result<(), LinSysError> {
        self.push(coeffs, Relation::Gt, rhs)
    }

    /// Appends every row of `other`; variable counts must match.
    pub fn extend_from(&mut self, other: &LinSystem) -> Result<(), LinSysError> {
        if other.vars != self.vars {
            return Err(LinSysError::DimensionMismatch { expected: self.vars, got: other.vars });
        }
        self.rows.extend(other.rows.iter().cloned());
        Ok(())
    }

    fn check(&self, witness: &[Rat]) -> bool {
        self.rows.iter().all(|row| {
            let lhs: Rat = row
                .coeffs
                .iter()
                .zip(witness)
                .map(|(c, v)| c * v)
                .sum();
            match row.rel {
                Relation::Eq => lhs == row.rhs,
                Relation::Ge => lhs >= row.rhs,
                Relation::Gt => lhs > row.rhs,
            }
        })
    }
}

/// Decides feasibility of `sys` by Gaussian substitution of the equalities
/// followed by Fourier-Motzkin elimination of the inequalities, tracking
/// strictness through every combination step.  On the feasible side a
/// witness is reconstructed by back-substitution and validated against the
/// original system before being returned.
pub fn lp_feasible(sys: &LinSystem) -> Result<Feasibility, LinSysError> {
    let vars = sys.vars;

    // Phase 1: eliminate equalities by substitution.  `subs` records, in
    // order, (pivot var, coefficient of pivot, residual coeffs, rhs) with
    // the meaning  coef * x_p = rhs - residual . x.
    let mut eqs: Vec<Row> = Vec::new();
    let mut ineqs: Vec<Row> = Vec::new();
    for row in &sys.rows {
        match row.rel {
            Relation::Eq => eqs.push(row.clone()),
            _ => ineqs.push(row.clone()),
        }
    }

    let mut subs: Vec<(usize, Rat, Vec<Rat>, Rat)> = Vec::new();
    while let Some(pos) = eqs.iter().position(|r| r.coeffs.iter().any(|c| !c.is_zero())) {
        let row = eqs.swap_remove(pos);
        let pivot = row.coeffs.iter().position(|c| !c.is_zero()).expect("nonzero row");
        let coef = row.coeffs[pivot].clone();
        let mut residual = row.coeffs.clone();
        residual[pivot] = Rat::zero();
        // Substitute x_pivot = (rhs - residual . x) / coef everywhere.
        for other in eqs.iter_mut().chain(ineqs.iter_mut()) {
            let c = other.coeffs[pivot].clone();
            if c.is_zero() {
                continue;
            }
            let factor = &c / &coef;
            for (k, r) in other.coeffs.iter_mut().enumerate() {
                if k == pivot {
                    *r = Rat::zero();
                } else {
                    *r = &*r - &factor * &residual[k];
                }
            }
            other.rhs = &other.rhs - &factor * &row.rhs;
        }
        subs.push((pivot, coef, residual, row.rhs));
    }
    // Degenerate equalities left over must be 0 == rhs.
    for row in &eqs {
        if !row.rhs.is_zero() {
            return Ok(Feasibility::Infeasible);
        }
    }

    // Phase 2: Fourier-Motzkin on the inequalities.  Each layer stores the
    // system as it was just before its variable got eliminated.
    let mut layers: Vec<(usize, Vec<Row>)> = Vec::new();
    let mut current = normalize_rows(ineqs);
    loop {
        match scan_ground_rows(&current) {
            GroundScan::Infeasible => return Ok(Feasibility::Infeasible),
            GroundScan::Ok => {}
        }
        // Pick the remaining variable minimizing the product of bound counts.
        let mut best: Option<(usize, usize)> = None;
        for v in 0..vars {
            let lowers = current.iter().filter(|r| r.coeffs[v].is_positive()).count();
            let uppers = current.iter().filter(|r| r.coeffs[v].is_negative()).count();
            if lowers + uppers == 0 {
                continue;
            }
            let cost = lowers * uppers;
            if best.map_or(true, |(_, c)| cost < c) {
                best = Some((v, cost));
            }
        }
        let Some((v, _)) = best else { break };

        let mut lowers = Vec::new();
        let mut uppers = Vec::new();
        let mut next = Vec::new();
        for row in &current {
            let c = &row.coeffs[v];
            if c.is_positive() {
                lowers.push(row.clone());
            } else if c.is_negative() {
                uppers.push(row.clone());
            } else {
                next.push(row.clone());
            }
        }
        for lo in &lowers {
            for up in &uppers {
                next.push(combine(lo, up, v));
                if next.len() > ROW_BUDGET {
                    return Err(LinSysError::Blowup(next.len()));
                }
            }
        }
        layers.push((v, current));
        current = normalize_rows(next);
    }

    // Feasible: reconstruct a witness.  Variables never bounded default to 0.
    let mut witness = vec![Rat::zero(); vars];
    for (v, rows) in layers.iter().rev() {
        witness[*v] = pick_value(*v, rows, &witness);
    }
    for (pivot, coef, residual, rhs) in subs.iter().rev() {
        let dot: Rat = residual.iter().zip(&witness).map(|(c, x)| c * x).sum();
        witness[*pivot] = (rhs - dot) / coef;
    }
    assert!(sys.check(&witness), "witness reconstruction failed; elimination is unsound");
    Ok(Feasibility::Feasible(witness))
}

enum GroundScan {
    Ok,
    Infeasible,
}

/// Checks rows whose coefficients are all zero and reports contradiction.
fn scan_ground_rows(rows: &[Row]) -> GroundScan {
    for row in rows {
        if row.coeffs.iter().all(|c| c.is_zero()) {
            let ok = match row.rel {
                Relation::Gt => row.rhs.is_negative(),
                Relation::Ge => !row.rhs.is_positive(),
                Relation::Eq => unreachable!("equalities eliminated in phase 1"),
            };
            if !ok {
                return GroundScan::Infeasible;
            }
        }
    }
    GroundScan::Ok
}

/// Combines a lower-bound row (positive coefficient on `v`) with an
/// upper-bound row (negative coefficient), eliminating `v`.  The result is
/// strict when either input is strict.
fn combine(lo: &Row, up: &Row, v: usize) -> Row {
    let gl = lo.coeffs[v].clone(); // > 0
    let gu = up.coeffs[v].clone(); // < 0
    let n = lo.coeffs.len();
    let mut coeffs = Vec::with_capacity(n);
    for k in 0..n {
        if k == v {
            coeffs.push(Rat::zero());
        } else {
            coeffs.push(&gl * &up.coeffs[k] - &gu * &lo.coeffs[k]);
        }
    }
    let rhs = &gl * &up.rhs - &gu * &lo.rhs;
    let rel = if lo.rel == Relation::Gt || up.rel == Relation::Gt {
        Relation::Gt
    } else {
        Relation::Ge
    };
    Row { coeffs, rel, rhs }
}

/// Scales each row to a primitive integer form, drops satisfied ground rows,
/// and keeps only the strongest row for each left-hand side.
fn normalize_rows(rows: Vec<Row>) -> Vec<Row> {
    let mut strongest: BTreeMap<Vec<String>, Row> = BTreeMap::new();
    let mut order: Vec<Vec<String>> = Vec::new();
    for mut row in rows {
        // Satisfied ground rows carry no information; contradictory ones are
        // kept for scan_ground_rows to find.
        if row.coeffs.iter().all(|c| c.is_zero()) {
            let satisfied = match row.rel {
                Relation::Gt => row.rhs.is_negative(),
                Relation::Ge => !row.rhs.is_positive(),
                Relation::Eq => unreachable!(),
            };
            if satisfied {
                continue;
            }
        }
        scale_primitive(&mut row);
        let key: Vec<String> = row.coeffs.iter().map(|c| c.to_string()).collect();
        match strongest.get_mut(&key) {
            None => {
                order.push(key.clone());
                strongest.insert(key, row);
            }
            Some(existing) => {
                let stronger = match row.rhs.cmp(&existing.rhs) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Equal => {
                        row.rel == Relation::Gt && existing.rel == Relation::Ge
                    }
                    std::cmp::Ordering::Less => false,
                };
                if stronger {
                    *existing = row;
                }
            }
        }
    }
    order.into_iter().map(|k| strongest.remove(&k).expect("keyed")).collect()
}

/// Divides a row through by the gcd of its numerators over the lcm of its
/// denominators, so syntactically proportional rows become identical.
fn scale_primitive(row: &mut Row) {
    use num::Integer;
    let mut lcm = num::BigInt::from(1);
    for c in row.coeffs.iter().chain(std::iter::once(&row.rhs)) {
        lcm = lcm.lcm(c.denom());
    }
    let mut gcd = num::BigInt::zero();
    for c in row.coeffs.iter().chain(std::iter::once(&row.rhs)) {
        let scaled = c * Rat::from_integer(lcm.clone());
        debug_assert!(num::One::is_one(scaled.denom()));
        gcd = gcd.gcd(scaled.numer());
    }
    if gcd.is_zero() {
        return;
    }
    let factor = Rat::new(lcm, gcd);
    for c in row.coeffs.iter_mut() {
        *c = &*c * &factor;
    }
    row.rhs = &row.rhs * &factor;
}

/// Chooses a value for `v` inside the interval carved out by `rows`, with
/// all other variables already fixed by `witness`.
fn pick_value(v: usize, rows: &[Row], witness: &[Rat]) -> Rat {
    let mut lower: Option<(Rat, bool)> = None; // (bound, strict)
    let mut upper: Option<(Rat, bool)> = None;
    for row in rows {
        let c = &row.coeffs[v];
        if c.is_zero() {
            continue;
        }
        let mut rest = Rat::zero();
        for (k, coef) in row.coeffs.iter().enumerate() {
            if k != v && !coef.is_zero() {
                rest += coef * &witness[k];
            }
        }
        let bound = (&row.rhs - &rest) / c;
        let strict = row.rel == Relation::Gt;
        if c.is_positive() {
            let better = lower.as_ref().map_or(true, |(b, s)| {
                bound > *b || (bound == *b && strict && !s)
            });
            if better {
                lower = Some((bound, strict));
            }
        } else {
            let better = upper.as_ref().map_or(true, |(b, s)| {
                bound < *b || (bound == *b && strict && !s)
            });
            if better {
                upper = Some((bound, strict));
            }
        }
    }
    match (lower, upper) {
        (None, None) => Rat::zero(),
        (Some((l, strict)), None) => {
            if strict {
                l + Rat::from_integer(1.into())
            } else {
                l
            }
        }
        (None, Some((u, strict))) => {
            if strict {
                u - Rat::from_integer(1.into())
            } else {
                u
            }
        }
        (Some((l, ls)), Some((u, us))) => {
            if l == u {
                assert!(!ls && !us, "empty interval survived elimination");
                l
            } else {
                assert!(l < u, "inverted interval survived elimination");
                (l + u) / Rat::from_integer(2.into())
            }
        }
    }
}

/// Rank of a family of rational linear forms (rows of coefficients), by
/// exact Gaussian elimination.
pub fn affine_rank(forms: &[Vec<Rat>]) -> usize {
    if forms.is_empty() {
        return 0;
    }
    let cols = forms[0].len();
    debug_assert!(forms.iter().all(|f| f.len() == cols), "ragged forms");
    let mut mat: Vec<Vec<Rat>> = forms.to_vec();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..mat.len()).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(rank, pivot);
        let lead = mat[rank][col].clone();
        for r in 0..mat.len() {
            if r != rank && !mat[r][col].is_zero() {
                let factor = &mat[r][col] / &lead;
                for k in col..cols {
                    mat[r][k] = &mat[r][k] - &factor * &mat[rank][k];
                }
            }
        }
        rank += 1;
        if rank == mat.len() {
            break;
        }
    }
    rank
}
