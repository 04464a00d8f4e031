//! The three closed-form counting series and their cross-checks.
//!
//! Everything the arrangement and cells modules enumerate is also counted
//! by a generating function: faces by dimension through a reciprocal
//! series in t, x, y; regions through its t = 1 specialization; large
//! cells through a small rational expression; small cells through a
//! product formula.  This module evaluates those expressions exactly
//! (truncated, all-rational) and `crosscheck` compares them against the
//! enumerative ground truth, recording every disagreement instead of
//! asserting.

use std::fmt::Write as _;

use num::ToPrimitive;

use crate::arrangement::{enumerate_faces, enumerate_regions};
use crate::cells::{count_cells, effective_budget, CellsError};
use crate::diagram::SizeClass;
use crate::ratcore::{format_rat, rat, Egf3, Rat, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountsError {
    BudgetExceeded { budget: u64 },
    Internal(String),
}

impl std::fmt::Display for CountsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CountsError::BudgetExceeded { budget } => {
                write!(f, "enumeration exceeded the budget of {budget} labels")
            }
            CountsError::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl std::error::Error for CountsError {}

impl From<SeriesError> for CountsError {
    fn from(e: SeriesError) -> CountsError {
        CountsError::Internal(e.to_string())
    }
}

impl From<CellsError> for CountsError {
    fn from(e: CellsError) -> CountsError {
        match e {
            CellsError::BudgetExceeded { budget } => CountsError::BudgetExceeded { budget },
            other => CountsError::Internal(other.to_string()),
        }
    }
}

/// Count of faces of each dimension, as the reciprocal series
///
///   1 / (e^{-tx} + e^{-ty} - t(e^x - 1)(e^y - 1) - 1).
///
/// The stored coefficient at (k, m, n) is the number of k-dimensional
/// faces of the arrangement for the (m, n) grid.
pub fn face_egf(k_max: usize, m_max: usize, n_max: usize) -> Egf3 {
    let orders = (k_max, m_max, n_max);
    let one = Egf3::one(orders.0, orders.1, orders.2);
    let etx = Egf3::exp_monomial(rat(-1), 1, 1, 0, orders.0, orders.1, orders.2);
    let ety = Egf3::exp_monomial(rat(-1), 1, 0, 1, orders.0, orders.1, orders.2);
    let t = Egf3::monomial(rat(1), 1, 0, 0, orders.0, orders.1, orders.2);
    let ex = Egf3::exp_monomial(rat(1), 0, 1, 0, orders.0, orders.1, orders.2);
    let ey = Egf3::exp_monomial(rat(1), 0, 0, 1, orders.0, orders.1, orders.2);
    let cross = t
        .mul(&ex.sub(&one).expect("matching orders"))
        .expect("matching orders")
        .mul(&ey.sub(&one).expect("matching orders"))
        .expect("matching orders");
    let denom = etx
        .add(&ety)
        .expect("matching orders")
        .sub(&cross)
        .expect("matching orders")
        .sub(&one)
        .expect("matching orders");
    denom.reciprocal().expect("constant term is 1")
}

/// Count of regions, as the t-free series
///
///   e^{x+y} / (e^x + e^y - e^{x+y}).
///
/// The stored coefficient at (0, m, n) is r_{m,n}; boundary values
/// r_{m,0} = r_{0,n} = 1 fall out of the series itself.
pub fn region_egf(m_max: usize, n_max: usize) -> Egf3 {
    let ex = Egf3::exp_monomial(rat(1), 0, 1, 0, 0, m_max, n_max);
    let ey = Egf3::exp_monomial(rat(1), 0, 0, 1, 0, m_max, n_max);
    let exy = ex.mul(&ey).expect("matching orders");
    let denom = ex
        .add(&ey)
        .expect("matching orders")
        .sub(&exy)
        .expect("matching orders");
    exy.mul(&denom.reciprocal().expect("constant term is 1"))
        .expect("matching orders")
}

/// Count of large regions with 1 before 1', as the t-free expression
///
///   (xX + yY)/2 + (2XY + X^2(e^x - 1) + Y^2(e^y - 1))
///                  / (2(e^x + e^y - e^{x+y}))
///
/// with X = x(e^y - y - 1) and Y = y(e^x - x - 1).
pub fn large_egf(m_max: usize, n_max: usize) -> Egf3 {
    let mul = |a: &Egf3, b: &Egf3| a.mul(b).expect("matching orders");
    let add = |a: &Egf3, b: &Egf3| a.add(b).expect("matching orders");
    let sub = |a: &Egf3, b: &Egf3| a.sub(b).expect("matching orders");

    let one = Egf3::one(0, m_max, n_max);
    let x = Egf3::monomial(rat(1), 0, 1, 0, 0, m_max, n_max);
    let y = Egf3::monomial(rat(1), 0, 0, 1, 0, m_max, n_max);
    let ex = Egf3::exp_monomial(rat(1), 0, 1, 0, 0, m_max, n_max);
    let ey = Egf3::exp_monomial(rat(1), 0, 0, 1, 0, m_max, n_max);
    let big_x = mul(&x, &sub(&sub(&ey, &y), &one));
    let big_y = mul(&y, &sub(&sub(&ex, &x), &one));

    let first = add(&mul(&x, &big_x), &mul(&y, &big_y)).scale(&crate::ratcore::ratio(1, 2));
    let numer = add(
        &add(
            &mul(&big_x, &big_y).scale(&rat(2)),
            &mul(&mul(&big_x, &big_x), &sub(&ex, &one)),
        ),
        &mul(&mul(&big_y, &big_y), &sub(&ey, &one)),
    );
    let denom = sub(&add(&ex, &ey), &mul(&ex, &ey)).scale(&rat(2));
    add(
        &first,
        &mul(&numer, &denom.reciprocal().expect("constant term is 2")),
    )
}

fn binom2(k: usize) -> u64 {
    (k as u64) * (k as u64).saturating_sub(1) / 2
}

fn count_u64(value: &Rat) -> Option<u64> {
    use num::One;
    if !value.denom().is_one() {
        return None;
    }
    value.numer().to_u64()
}

/// Number of small cells: 2 C(m,2) C(n,2) r_{m-2,n-2}, and 0 whenever
/// m < 2 or n < 2.  The region count at the boundary shapes, r with a
/// zero index, equals 1 straight from the series.
pub fn small_formula(m: usize, n: usize) -> u64 {
    if m < 2 || n < 2 {
        return 0;
    }
    let r = region_egf(m - 2, n - 2);
    let tail = count_u64(r.coeff(0, m - 2, n - 2)).expect("region counts are natural numbers");
    2 * binom2(m) * binom2(n) * tail
}

/// Where a reported value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Egf,
    Bruteforce,
    Formula,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Egf => "egf",
            Source::Bruteforce => "bruteforce",
            Source::Formula => "formula",
        }
    }
}

/// One reported value and the method that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    pub source: Source,
    pub value: u64,
}

/// Face counts at one (k, m, n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceEntry {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub tallies: Vec<Tally>,
}

/// Region counts at one (m, n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionEntry {
    pub m: usize,
    pub n: usize,
    pub tallies: Vec<Tally>,
}

/// Cell counts at one (m, n); `note` carries informational context that is
/// deliberately not compared, such as the distinct-image count next to the
/// positive-region count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellEntry {
    pub m: usize,
    pub n: usize,
    pub tallies: Vec<Tally>,
    pub note: Option<String>,
}

/// A disagreement between two sources for the same quantity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub quantity: String,
    pub k: Option<usize>,
    pub m: usize,
    pub n: usize,
    pub detail: String,
}

/// Every comparison the crosscheck ran, every value with its source, and
/// every disagreement found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub m_max: usize,
    pub n_max: usize,
    pub faces: Vec<FaceEntry>,
    pub regions: Vec<RegionEntry>,
    pub small_cells: Vec<CellEntry>,
    pub large_cells: Vec<CellEntry>,
    pub discrepancies: Vec<Discrepancy>,
}

impl CountReport {
    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty()
    }

    /// Aligned plain-text rendering for terminal use.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "counts crosscheck up to m = {}, n = {}", self.m_max, self.n_max);
        let _ = writeln!(out, "\nregions (egf vs enumeration)");
        let _ = writeln!(out, "{:>4} {:>4} {:>12} {:>12}", "m", "n", "egf", "bruteforce");
        for e in &self.regions {
            let _ = writeln!(
                out,
                "{:>4} {:>4} {:>12} {:>12}",
                e.m,
                e.n,
                tally_str(&e.tallies, Source::Egf),
                tally_str(&e.tallies, Source::Bruteforce)
            );
        }
        let _ = writeln!(out, "\nfaces by dimension (egf vs enumeration)");
        let _ = writeln!(out, "{:>4} {:>4} {:>4} {:>12} {:>12}", "k", "m", "n", "egf", "bruteforce");
        for e in &self.faces {
            let _ = writeln!(
                out,
                "{:>4} {:>4} {:>4} {:>12} {:>12}",
                e.k,
                e.m,
                e.n,
                tally_str(&e.tallies, Source::Egf),
                tally_str(&e.tallies, Source::Bruteforce)
            );
        }
        let _ = writeln!(out, "\nsmall cells (formula vs distinct images)");
        let _ = writeln!(out, "{:>4} {:>4} {:>12} {:>12}", "m", "n", "formula", "bruteforce");
        for e in &self.small_cells {
            let _ = writeln!(
                out,
                "{:>4} {:>4} {:>12} {:>12}",
                e.m,
                e.n,
                tally_str(&e.tallies, Source::Formula),
                tally_str(&e.tallies, Source::Bruteforce)
            );
        }
        let _ = writeln!(out, "\nlarge cells (egf vs positive regions)");
        let _ = writeln!(out, "{:>4} {:>4} {:>12} {:>12}  note", "m", "n", "egf", "bruteforce");
        for e in &self.large_cells {
            let _ = writeln!(
                out,
                "{:>4} {:>4} {:>12} {:>12}  {}",
                e.m,
                e.n,
                tally_str(&e.tallies, Source::Egf),
                tally_str(&e.tallies, Source::Bruteforce),
                e.note.as_deref().unwrap_or("")
            );
        }
        if self.discrepancies.is_empty() {
            let _ = writeln!(out, "\ndiscrepancies: none");
        } else {
            let _ = writeln!(out, "\ndiscrepancies:");
            for d in &self.discrepancies {
                let place = match d.k {
                    Some(k) => format!("k={} m={} n={}", k, d.m, d.n),
                    None => format!("m={} n={}", d.m, d.n),
                };
                let _ = writeln!(out, "  {} at {}: {}", d.quantity, place, d.detail);
            }
        }
        out
    }
}

fn tally_str(tallies: &[Tally], source: Source) -> String {
    tallies
        .iter()
        .find(|t| t.source == source)
        .map(|t| t.value.to_string())
        .unwrap_or_else(|| "-".into())
}

/// Compares the three series and the product formula against direct
/// enumeration over the rectangle m <= m_max, n <= n_max, with cost
/// guards matching the ranges the counts are claimed on: faces up to
/// m + n <= 6, regions up to m * n <= 16, cells up to min(m, n) >= 2 and
/// m * n <= 9.  Every value is recorded with its source; disagreements
/// land in the discrepancy list rather than aborting the run.
pub fn crosscheck(
    m_max: usize,
    n_max: usize,
    budget: Option<u64>,
) -> Result<CountReport, CountsError> {
    let budget = effective_budget(budget);
    let mut report = CountReport {
        m_max,
        n_max,
        faces: Vec::new(),
        regions: Vec::new(),
        small_cells: Vec::new(),
        large_cells: Vec::new(),
        discrepancies: Vec::new(),
    };

    let regions = region_egf(m_max, n_max);
    let faces = face_egf(m_max + n_max, m_max, n_max);
    let larges = large_egf(m_max, n_max);

    for m in 1..=m_max {
        for n in 1..=n_max {
            if m * n <= 16 {
                let brute = counted_enumeration(
                    enumerate_regions(m, n).map(|_| ()),
                    budget,
                )?;
                let egf = egf_tally(&regions, 0, m, n, "regions", None, &mut report.discrepancies);
                if egf != Some(brute) {
                    report.discrepancies.push(Discrepancy {
                        quantity: "regions".into(),
                        k: None,
                        m,
                        n,
                        detail: format!(
                            "egf {} vs enumeration {brute}",
                            format_rat(regions.coeff(0, m, n))
                        ),
                    });
                }
                report.regions.push(RegionEntry {
                    m,
                    n,
                    tallies: vec![
                        Tally { source: Source::Egf, value: egf.unwrap_or(0) },
                        Tally { source: Source::Bruteforce, value: brute },
                    ],
                });
            }

            if m + n <= 6 {
                let mut by_dim = vec![0u64; m + n + 1];
                let mut seen = 0u64;
                for face in enumerate_faces(m, n) {
                    by_dim[face.dimension()] += 1;
                    seen += 1;
                    if seen > budget {
                        return Err(CountsError::BudgetExceeded { budget });
                    }
                }
                for (k, &brute) in by_dim.iter().enumerate() {
                    let egf =
                        egf_tally(&faces, k, m, n, "faces", Some(k), &mut report.discrepancies);
                    if egf.unwrap_or(0) == 0 && brute == 0 {
                        continue;
                    }
                    if egf != Some(brute) {
                        report.discrepancies.push(Discrepancy {
                            quantity: "faces".into(),
                            k: Some(k),
                            m,
                            n,
                            detail: format!(
                                "egf {} vs enumeration {brute}",
                                format_rat(faces.coeff(k, m, n))
                            ),
                        });
                    }
                    report.faces.push(FaceEntry {
                        k,
                        m,
                        n,
                        tallies: vec![
                            Tally { source: Source::Egf, value: egf.unwrap_or(0) },
                            Tally { source: Source::Bruteforce, value: brute },
                        ],
                    });
                }
            }

            if m >= 2 && n >= 2 && m * n <= 9 {
                let small = count_cells(m, n, SizeClass::Small, Some(budget))?;
                let formula = small_formula(m, n);
                if formula != small.distinct_images {
                    report.discrepancies.push(Discrepancy {
                        quantity: "smallCells".into(),
                        k: None,
                        m,
                        n,
                        detail: format!(
                            "formula {formula} vs distinct images {}",
                            small.distinct_images
                        ),
                    });
                }
                report.small_cells.push(CellEntry {
                    m,
                    n,
                    tallies: vec![
                        Tally { source: Source::Formula, value: formula },
                        Tally { source: Source::Bruteforce, value: small.distinct_images },
                    ],
                    note: None,
                });

                let large = count_cells(m, n, SizeClass::Large, Some(budget))?;
                let egf = egf_tally(&larges, 0, m, n, "largeCells", None, &mut report.discrepancies);
                if egf != Some(large.positive_regions) {
                    report.discrepancies.push(Discrepancy {
                        quantity: "largeCells".into(),
                        k: None,
                        m,
                        n,
                        detail: format!(
                            "egf {} vs positive regions {}",
                            format_rat(larges.coeff(0, m, n)),
                            large.positive_regions
                        ),
                    });
                }
                report.large_cells.push(CellEntry {
                    m,
                    n,
                    tallies: vec![
                        Tally { source: Source::Egf, value: egf.unwrap_or(0) },
                        Tally { source: Source::Bruteforce, value: large.positive_regions },
                    ],
                    note: Some(format!(
                        "distinct large images: {} (counted, not compared)",
                        large.distinct_images
                    )),
                });
            }
        }
    }

    Ok(report)
}

fn counted_enumeration(
    iter: impl Iterator<Item = ()>,
    budget: u64,
) -> Result<u64, CountsError> {
    let mut seen = 0u64;
    for () in iter {
        seen += 1;
        if seen > budget {
            return Err(CountsError::BudgetExceeded { budget });
        }
    }
    Ok(seen)
}

fn egf_tally(
    series: &Egf3,
    k: usize,
    m: usize,
    n: usize,
    quantity: &str,
    k_report: Option<usize>,
    discrepancies: &mut Vec<Discrepancy>,
) -> Option<u64> {
    let value = series.coeff(k, m, n);
    let as_count = count_u64(value);
    if as_count.is_none() {
        discrepancies.push(Discrepancy {
            quantity: quantity.into(),
            k: k_report,
            m,
            n,
            detail: format!("egf coefficient {} is not a natural number", format_rat(value)),
        });
    }
    as_count
}
