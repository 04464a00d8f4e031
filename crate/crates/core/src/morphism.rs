//! The tropical morphism itself: evaluation, explicit preimages inside a
//! region, gauge freedom, and the fiber over a generic image point.
//!
//! A parameter point is the tuple (a, A, b, B) with a, A of length m and
//! b, B of length n; the morphism sends it to the m x n matrix
//! g_ij = min(a_i + b_j, A_i + B_j).  Adding a constant to every a_i while
//! subtracting it from every b_j leaves g unchanged, and likewise for
//! (A, B): two global degrees of freedom that gauge_normalize pins down.
//!
//! Given a matrix inside the open image of a region, a preimage is built
//! from the region's diagram: the black border entries (bottom row and
//! leftmost column of the black staircase) determine A and B, the white
//! border entries (top row and rightmost column) determine a and b, and
//! parameters touching no entry of their color are pushed to a validated
//! large value so they never win a minimum they should lose.

use crate::arrangement::{region_of_point, RegionLabel, XYPoint};
use crate::diagram::{cell_size_class, diagram_of, relations_v2, Diagram, SizeClass};
use crate::ratcore::{rat, Rat, RatMatrix};
use num::Signed;
use std::fmt;

/// A point of the morphism's domain.  `big_a` and `big_b` are the
/// capital-letter vectors A and B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamPoint {
    pub a: Vec<Rat>,
    pub big_a: Vec<Rat>,
    pub b: Vec<Rat>,
    pub big_b: Vec<Rat>,
}

impl ParamPoint {
    pub fn new(
        a: Vec<Rat>,
        big_a: Vec<Rat>,
        b: Vec<Rat>,
        big_b: Vec<Rat>,
    ) -> Result<ParamPoint, MorphismError> {
        if a.len() != big_a.len() || b.len() != big_b.len() || a.is_empty() || b.is_empty() {
            return Err(MorphismError::ShapeMismatch(format!(
                "need |a| = |A| >= 1 and |b| = |B| >= 1, got {}, {}, {}, {}",
                a.len(),
                big_a.len(),
                b.len(),
                big_b.len()
            )));
        }
        Ok(ParamPoint { a, big_a, b, big_b })
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// The induced arrangement point x_i = a_i - A_i, y_j = B_j - b_j.
    pub fn xy(&self) -> XYPoint {
        XYPoint {
            x: self.a.iter().zip(&self.big_a).map(|(a, ba)| a - ba).collect(),
            y: self.big_b.iter().zip(&self.b).map(|(bb, b)| bb - b).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismError {
    ShapeMismatch(String),
    /// The matrix violates a relation of the region's open image.
    NotInOpenImage,
    /// The matrix is not interior to any small cell.
    NotGeneric,
    /// An internal consistency check failed; indicates a bug, never bad input.
    InvariantViolation(String),
}

impl fmt::Display for MorphismError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismError::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            MorphismError::NotInOpenImage => {
                write!(f, "matrix is not in the open image of the region")
            }
            MorphismError::NotGeneric => {
                write!(f, "matrix is not interior to a unique small cell")
            }
            MorphismError::InvariantViolation(msg) => write!(f, "invariant violation: {msg}"),
        }
    }
}

impl std::error::Error for MorphismError {}

/// Evaluates g_ij = min(a_i + b_j, A_i + B_j).
pub fn eval_g(p: &ParamPoint) -> RatMatrix {
    let mut g = RatMatrix::zero(p.m(), p.n());
    for i in 0..p.m() {
        for j in 0..p.n() {
            let lower = &p.a[i] + &p.b[j];
            let upper = &p.big_a[i] + &p.big_b[j];
            g.set(i, j, lower.min(upper));
        }
    }
    g
}

/// The rectangle combination g_{i1 j1} + g_{i2 j2} - g_{i1 j2} - g_{i2 j1},
/// 1-based indices.
pub fn delta(g: &RatMatrix, i1: usize, i2: usize, j1: usize, j2: usize) -> Rat {
    assert!(i1 != i2 && j1 != j2, "delta needs two distinct rows and columns");
    assert!(
        (1..=g.rows()).contains(&i1)
            && (1..=g.rows()).contains(&i2)
            && (1..=g.cols()).contains(&j1)
            && (1..=g.cols()).contains(&j2),
        "delta indices out of range"
    );
    g.get(i1 - 1, j1 - 1).clone() + g.get(i2 - 1, j2 - 1)
        - g.get(i1 - 1, j2 - 1)
        - g.get(i2 - 1, j1 - 1)
}

/// True when the matrix satisfies every image relation of the region,
/// strictly (open) or weakly (closed).
pub fn satisfies_region_relations(g: &RatMatrix, r: &RegionLabel, closed: bool) -> bool {
    relations_v2(&diagram_of(r)).iter().all(|rel| rel.holds(g, closed))
}

/// Rank of the morphism restricted to one region, where each entry is the
/// plain sum a_i + b_j (white) or A_i + B_j (black): the rank of the m*n
/// coefficient rows over the 2(m + n) parameters, i.e. the dimension of
/// the region's image.
pub fn linearization_rank(r: &RegionLabel) -> usize {
    use crate::arrangement::Letter;
    let (m, n) = (r.m(), r.n());
    let vars = 2 * (m + n);
    let mut rows = Vec::with_capacity(m * n);
    for i in 1..=m {
        for j in 1..=n {
            let mut row = vec![rat(0); vars];
            if r.precedes(Letter::pos(i), Letter::neg(j)) {
                row[i - 1] = rat(1); // a_i
                row[2 * m + j - 1] = rat(1); // b_j
            } else {
                row[m + i - 1] = rat(1); // A_i
                row[2 * m + n + j - 1] = rat(1); // B_j
            }
            rows.push(row);
        }
    }
    crate::ratcore::affine_rank(&rows)
}

/// Constructs an exact preimage of `g` lying strictly inside region `r`.
pub fn preimage_in_region(g: &RatMatrix, r: &RegionLabel) -> Result<ParamPoint, MorphismError> {
    build_preimage(g, r, false)
}

/// Constructs an exact preimage of `g` for `g` in the *closure* of the
/// region's image; the result evaluates back to `g` exactly but may sit on
/// region boundaries.
pub fn preimage_in_closure(g: &RatMatrix, r: &RegionLabel) -> Result<ParamPoint, MorphismError> {
    build_preimage(g, r, true)
}

fn build_preimage(g: &RatMatrix, r: &RegionLabel, closed: bool) -> Result<ParamPoint, MorphismError> {
    let (m, n) = (r.m(), r.n());
    if g.rows() != m || g.cols() != n {
        return Err(MorphismError::ShapeMismatch(format!(
            "matrix is {}x{}, region is {m}x{n}",
            g.rows(),
            g.cols()
        )));
    }
    if !satisfies_region_relations(g, r, closed) {
        return Err(MorphismError::NotInOpenImage);
    }
    let d = diagram_of(r);
    let gd = |dr: usize, dc: usize| g.get(d.row_letter(dr) - 1, d.col_letter(dc) - 1);

    let mut a: Vec<Option<Rat>> = vec![None; m];
    let mut big_a: Vec<Option<Rat>> = vec![None; m];
    let mut b: Vec<Option<Rat>> = vec![None; n];
    let mut big_b: Vec<Option<Rat>> = vec![None; n];

    // Black border: pin A on the bottom diagram row, read B off the bottom
    // row's black prefix, then A for every row whose first entry is black.
    let bottom = m - 1;
    if d.black_prefix(bottom) > 0 {
        big_a[d.row_letter(bottom) - 1] = Some(rat(0));
        for dc in 0..d.black_prefix(bottom) {
            big_b[d.col_letter(dc) - 1] = Some(gd(bottom, dc).clone());
        }
        let b0 = big_b[d.col_letter(0) - 1].clone().unwrap();
        for dr in 0..m {
            if d.is_black(dr, 0) {
                big_a[d.row_letter(dr) - 1] = Some(gd(dr, 0) - &b0);
            }
        }
    }

    // White border: pin b on the rightmost diagram column, read a for the
    // top row, then b across the top row's white suffix and a for every
    // row whose last entry is white.
    if d.black_prefix(0) < n {
        b[d.col_letter(n - 1) - 1] = Some(rat(0));
        let a0 = gd(0, n - 1).clone();
        a[d.row_letter(0) - 1] = Some(a0.clone());
        for dc in d.black_prefix(0)..n {
            b[d.col_letter(dc) - 1] = Some(gd(0, dc) - &a0);
        }
        for dr in 0..m {
            if !d.is_black(dr, n - 1) {
                a[d.row_letter(dr) - 1] = Some(gd(dr, n - 1).clone());
            }
        }
    }

    // Unset parameters belong to all-black rows/columns (their a, b) or
    // all-white ones (their A, B); any value beyond the scale of the data
    // works, and the choice is validated below.
    let mut magnitude = rat(0);
    for i in 0..m {
        for j in 0..n {
            magnitude = magnitude.max(g.get(i, j).abs());
        }
    }
    for v in a.iter().chain(&big_a).chain(&b).chain(&big_b).flatten() {
        magnitude = magnitude.max(v.abs());
    }
    let mut large = rat(1) + rat(2) * &magnitude;

    for attempt in 0..2 {
        let fill = |slots: &[Option<Rat>]| -> Vec<Rat> {
            slots.iter().map(|s| s.clone().unwrap_or_else(|| large.clone())).collect()
        };
        let p = ParamPoint {
            a: fill(&a),
            big_a: fill(&big_a),
            b: fill(&b),
            big_b: fill(&big_b),
        };
        if preimage_is_valid(&p, g, &d, closed) {
            return Ok(p);
        }
        if attempt == 0 {
            large = &large * rat(2);
        }
    }
    Err(MorphismError::InvariantViolation(
        "preimage construction failed validation after enlarging the free parameters".into(),
    ))
}

/// Entrywise check that a candidate preimage reproduces `g` with the
/// diagram's colors: black entries attain the minimum on the A + B side,
/// white on the a + b side, strictly unless `closed`.
fn preimage_is_valid(p: &ParamPoint, g: &RatMatrix, d: &Diagram, closed: bool) -> bool {
    for dr in 0..d.m() {
        for dc in 0..d.n() {
            let (i, j) = (d.row_letter(dr) - 1, d.col_letter(dc) - 1);
            let target = g.get(i, j);
            let lower = &p.a[i] + &p.b[j];
            let upper = &p.big_a[i] + &p.big_b[j];
            let (winner, loser) = if d.is_black(dr, dc) { (upper, lower) } else { (lower, upper) };
            if winner != *target {
                return false;
            }
            if loser < winner || (!closed && loser == winner) {
                return false;
            }
        }
    }
    true
}

/// Shifts the gauge so that A_i = va and b_j = vb (1-based coordinates);
/// eval_g is unchanged.
pub fn gauge_normalize_at(p: &ParamPoint, i: usize, j: usize, va: &Rat, vb: &Rat) -> ParamPoint {
    assert!((1..=p.m()).contains(&i) && (1..=p.n()).contains(&j));
    let shift_ab = &p.b[j - 1] - vb;
    let shift_cap = &p.big_a[i - 1] - va;
    ParamPoint {
        a: p.a.iter().map(|v| v + &shift_ab).collect(),
        b: p.b.iter().map(|v| v - &shift_ab).collect(),
        big_a: p.big_a.iter().map(|v| v - &shift_cap).collect(),
        big_b: p.big_b.iter().map(|v| v + &shift_cap).collect(),
    }
}

/// Pins the last coordinates (A_m, b_n) to the requested values.
pub fn gauge_normalize(p: &ParamPoint, big_a_last: &Rat, b_last: &Rat) -> ParamPoint {
    gauge_normalize_at(p, p.m(), p.n(), big_a_last, b_last)
}

/// One free parameter of a fiber quadrant: the coordinate can take any
/// value strictly above `lower_bound` (family is one of 'a', 'A', 'b',
/// 'B'; index is 1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeParam {
    pub family: char,
    pub index: usize,
    pub lower_bound: Rat,
}

impl FreeParam {
    pub fn name(&self) -> String {
        format!("{}_{}", self.family, self.index)
    }
}

/// One of the four quadrants of a generic fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberRegion {
    pub label: RegionLabel,
    pub size_class: SizeClass,
    pub nw_black: bool,
    pub se_black: bool,
    /// The two free parameters (northwest corner's, southeast corner's).
    pub free: [FreeParam; 2],
    /// A concrete gauge-normalized preimage inside this region; its free
    /// coordinates sit at a validated large value above their bounds.
    pub witness: ParamPoint,
}

/// A residual degree of freedom: add t to every `plus`-family coordinate
/// and subtract it from every `minus`-family coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaugeShift {
    pub plus: char,
    pub minus: char,
}

/// Full description of the fiber over a matrix interior to a unique small
/// cell: in the pinned gauge it is four two-dimensional open quadrants
/// with a common apex, plus the two global shifts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberDescription {
    pub m: usize,
    pub n: usize,
    /// True for shapes below the fully generic regime (m < 3 or n < 3).
    pub degenerate: bool,
    /// Lex-least small region whose open image contains the matrix.
    pub small_region: RegionLabel,
    /// The two pinned coordinates, e.g. [("A_2", 0), ("b_2", 0)].
    pub gauge: [(String, Rat); 2],
    /// The four determined corner coordinates at the quadrants' common
    /// limit point, in the order a_last, b_first, B_last, A_first
    /// (indices in original coordinates, transported from the diagram).
    pub apex: [(String, Rat); 4],
    pub regions: Vec<FiberRegion>,
    pub free_dof: [GaugeShift; 2],
}

/// Computes the fiber of a generic matrix.  `pins` are the values for the
/// gauge coordinates (A at the last diagram row's letter, b at the last
/// diagram column's letter); both default to 0.
pub fn generic_fiber(
    g: &RatMatrix,
    pins: Option<(Rat, Rat)>,
) -> Result<FiberDescription, MorphismError> {
    let (m, n) = (g.rows(), g.cols());
    if m < 2 || n < 2 {
        return Err(MorphismError::ShapeMismatch(
            "fibers are described for shapes with m >= 2 and n >= 2".into(),
        ));
    }
    // Regions whose open image contains g, restricted to small ones.  The
    // small-cell interiors partition the generic locus, so hits here all
    // describe one and the same cell; emptiness means g is non-generic.
    let hits: Vec<RegionLabel> = crate::arrangement::enumerate_regions(m, n)
        .filter(|r| cell_size_class(r) == SizeClass::Small)
        .filter(|r| satisfies_region_relations(g, r, false))
        .collect();
    let Some(r0) = hits.first() else {
        return Err(MorphismError::NotGeneric);
    };
    let base_relations = relations_v2(&diagram_of(r0));
    for other in &hits[1..] {
        if relations_v2(&diagram_of(other)) != base_relations {
            return Err(MorphismError::InvariantViolation(format!(
                "small regions {r0} and {other} both contain the matrix strictly \
                 but describe different polyhedra"
            )));
        }
    }

    let d0 = diagram_of(r0);
    let (row_first, row_last) = (d0.row_letter(0), d0.row_letter(m - 1));
    let (col_first, col_last) = (d0.col_letter(0), d0.col_letter(n - 1));
    let (pin_a, pin_b) = pins.unwrap_or((rat(0), rat(0)));

    // Corner formulas, transported to original indices via the diagram:
    // a_1 and B_1 are shared by all four quadrants, the other four values
    // form the apex.
    let g_at = |i: usize, j: usize| g.get(i - 1, j - 1);
    let a_first = g_at(row_first, col_last) - &pin_b;
    let big_b_first = g_at(row_last, col_first) - &pin_a;
    let apex_a_last = g_at(row_last, col_last) - &pin_b;
    let apex_b_first = g_at(row_first, col_first) - &a_first;
    let apex_big_b_last = g_at(row_last, col_last) - &pin_a;
    let apex_big_a_first = g_at(row_first, col_first) - &big_b_first;

    let swap = |r: &RegionLabel, front: bool, back: bool| -> RegionLabel {
        let mut letters = r.letters().to_vec();
        let len = letters.len();
        if front {
            letters.swap(0, 1);
        }
        if back {
            letters.swap(len - 2, len - 1);
        }
        RegionLabel::new(m, n, letters).expect("corner swaps permute a valid label")
    };
    let mut family = vec![
        swap(r0, false, false),
        swap(r0, true, false),
        swap(r0, false, true),
        swap(r0, true, true),
    ];
    family.sort();
    family.dedup();
    if family.len() != 4 {
        return Err(MorphismError::InvariantViolation(
            "corner swaps did not produce four distinct regions".into(),
        ));
    }

    // Color of entry (i, j) in original coordinates; the four labels can
    // present rows and columns in different appearance orders, so diagrams
    // are compared entry by entry rather than grid by grid.
    let black_at = |r: &RegionLabel, i: usize, j: usize| {
        r.precedes(crate::arrangement::Letter::neg(j), crate::arrangement::Letter::pos(i))
    };
    let mut regions = Vec::with_capacity(4);
    let mut seen_corners = Vec::new();
    for label in family {
        for i in 1..=m {
            for j in 1..=n {
                let corner = (i == row_first && j == col_first)
                    || (i == row_last && j == col_last);
                if !corner && black_at(&label, i, j) != black_at(r0, i, j) {
                    return Err(MorphismError::InvariantViolation(format!(
                        "diagram of {label} differs from the small diagram away from the corners"
                    )));
                }
            }
        }
        let nw_black = black_at(&label, row_first, col_first);
        let se_black = black_at(&label, row_last, col_last);
        seen_corners.push((nw_black, se_black));
        let witness = preimage_in_region(g, &label)?;
        let witness = gauge_normalize_at(&witness, row_last, col_last, &pin_a, &pin_b);
        let nw_free = if nw_black {
            FreeParam { family: 'b', index: col_first, lower_bound: apex_b_first.clone() }
        } else {
            FreeParam { family: 'A', index: row_first, lower_bound: apex_big_a_first.clone() }
        };
        let se_free = if se_black {
            FreeParam { family: 'a', index: row_last, lower_bound: apex_a_last.clone() }
        } else {
            FreeParam { family: 'B', index: col_last, lower_bound: apex_big_b_last.clone() }
        };
        regions.push(FiberRegion {
            size_class: cell_size_class(&label),
            label,
            nw_black,
            se_black,
            free: [nw_free, se_free],
            witness,
        });
    }
    seen_corners.sort();
    if seen_corners != [(false, false), (false, true), (true, false), (true, true)] {
        return Err(MorphismError::InvariantViolation(
            "the four regions do not realize the four corner colorings".into(),
        ));
    }

    // Every non-free coordinate must agree across the four witnesses; the
    // determined corner coordinates must equal the apex values.
    let free_in = |reg: &FiberRegion, family: char, index: usize| {
        reg.free.iter().any(|f| f.family == family && f.index == index)
    };
    let coord = |p: &ParamPoint, family: char, index: usize| -> Rat {
        match family {
            'a' => p.a[index - 1].clone(),
            'A' => p.big_a[index - 1].clone(),
            'b' => p.b[index - 1].clone(),
            'B' => p.big_b[index - 1].clone(),
            _ => unreachable!(),
        }
    };
    let apex = [
        (format!("a_{row_last}"), apex_a_last),
        (format!("b_{col_first}"), apex_b_first),
        (format!("B_{col_last}"), apex_big_b_last),
        (format!("A_{row_first}"), apex_big_a_first),
    ];
    let apex_coords = [
        ('a', row_last, &apex[0].1),
        ('b', col_first, &apex[1].1),
        ('B', col_last, &apex[2].1),
        ('A', row_first, &apex[3].1),
    ];
    for reg in &regions {
        for (family, index, value) in &apex_coords {
            if !free_in(reg, *family, *index) && coord(&reg.witness, *family, *index) != **value {
                return Err(MorphismError::InvariantViolation(format!(
                    "determined corner {family}_{index} of {} disagrees with the apex",
                    reg.label
                )));
            }
        }
        for (fam, len) in [('a', m), ('A', m), ('b', n), ('B', n)] {
            for index in 1..=len {
                let is_corner = apex_coords.iter().any(|(f, i, _)| *f == fam && *i == index);
                if is_corner || free_in(reg, fam, index) {
                    continue;
                }
                if coord(&reg.witness, fam, index) != coord(&regions[0].witness, fam, index) {
                    return Err(MorphismError::InvariantViolation(format!(
                        "shared coordinate {fam}_{index} differs between quadrants"
                    )));
                }
            }
        }
    }

    Ok(FiberDescription {
        m,
        n,
        degenerate: m < 3 || n < 3,
        small_region: r0.clone(),
        gauge: [
            (format!("A_{row_last}"), pin_a),
            (format!("b_{col_last}"), pin_b),
        ],
        apex,
        regions,
        free_dof: [
            GaugeShift { plus: 'a', minus: 'b' },
            GaugeShift { plus: 'A', minus: 'B' },
        ],
    })
}

/// Verifies that a parameter point evaluates to `g` and lies strictly
/// inside the named region; used by round-trip checks.
pub fn round_trips(p: &ParamPoint, g: &RatMatrix, r: &RegionLabel) -> bool {
    eval_g(p) == *g && region_of_point(&p.xy()).as_ref() == Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::ratio;

    fn label(s: &str) -> RegionLabel {
        RegionLabel::parse(s).unwrap()
    }

    fn pp(a: &[i64], big_a: &[i64], b: &[i64], big_b: &[i64]) -> ParamPoint {
        ParamPoint::new(
            a.iter().map(|&v| rat(v)).collect(),
            big_a.iter().map(|&v| rat(v)).collect(),
            b.iter().map(|&v| rat(v)).collect(),
            big_b.iter().map(|&v| rat(v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let zero = pp(&[0, 0], &[0, 0], &[0, 0, 0], &[0, 0, 0]);
        assert_eq!(eval_g(&zero), RatMatrix::zero(2, 3));
        let p = pp(&[0, 1], &[2, 0], &[0, 3], &[1, 0]);
        assert_eq!(eval_g(&p), RatMatrix::from_i64(&[&[0, 2], &[1, 0]]));
        let p = pp(&[1, 3], &[3, 0], &[3, 0], &[0, 2]);
        assert_eq!(eval_g(&p), RatMatrix::from_i64(&[&[3, 1], &[0, 2]]));
    }

    #[test]
    fn delta_examples() {
        let g = RatMatrix::from_i64(&[&[0, 2], &[1, 0]]);
        assert_eq!(delta(&g, 1, 2, 1, 2), rat(-3));
        assert_eq!(delta(&g, 2, 1, 1, 2), rat(3));
        // Additively rank-1 matrices kill every delta.
        let mut r1 = RatMatrix::zero(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                r1.set(i, j, rat(10 * (i as i64 + 1) + (j as i64 + 2)));
            }
        }
        for (i1, i2) in [(1, 2), (1, 3), (2, 3)] {
            for (j1, j2) in [(1, 2), (1, 3), (2, 3)] {
                assert_eq!(delta(&r1, i1, i2, j1, j2), rat(0));
            }
        }
    }

    #[test]
    fn preimage_with_two_free_parameters() {
        let g = RatMatrix::from_i64(&[&[0, 2], &[1, 0]]);
        let r = label("1 2' 2 1'");
        let p = preimage_in_region(&g, &r).unwrap();
        assert!(round_trips(&p, &g, &r));
        assert_eq!(p.a, vec![rat(0), rat(1)]);
        assert_eq!(p.b, vec![rat(0), rat(2)]);
        assert_eq!(p.big_a[1], rat(0));
        assert_eq!(p.big_b[1], rat(0));
        // The untouched parameters share the validated large value.
        assert_eq!(p.big_a[0], p.big_b[0]);
        assert!(p.big_a[0] > rat(2));
    }

    #[test]
    fn preimage_with_full_borders() {
        let g = RatMatrix::from_i64(&[&[3, 1], &[0, 2]]);
        let r = label("1' 1 2' 2");
        let p = preimage_in_region(&g, &r).unwrap();
        assert!(round_trips(&p, &g, &r));
        assert_eq!(p.a[0], rat(1));
        assert_eq!(p.big_a, vec![rat(3), rat(0)]);
        assert_eq!(p.b[1], rat(0));
        assert_eq!(p.big_b, vec![rat(0), rat(2)]);
        // a_2 and b_1 are free; both sit at the same validated value.
        assert_eq!(p.a[1], p.b[0]);
    }

    #[test]
    fn preimage_of_the_all_white_region() {
        let g = RatMatrix::zero(2, 2);
        let r = label("1 2 1' 2'");
        let p = preimage_in_region(&g, &r).unwrap();
        assert!(round_trips(&p, &g, &r));
        assert_eq!(p.a, vec![rat(0), rat(0)]);
        assert_eq!(p.b, vec![rat(0), rat(0)]);
        assert!(p.big_a.iter().all(|v| *v > rat(0)));
        assert!(p.big_b.iter().all(|v| *v > rat(0)));
    }

    #[test]
    fn preimage_rejects_wrong_region() {
        let g = RatMatrix::from_i64(&[&[0, 2], &[1, 0]]);
        assert_eq!(
            preimage_in_region(&g, &label("1 1' 2 2'")).unwrap_err(),
            MorphismError::NotInOpenImage
        );
        // The same region's closure also misses it (delta is strictly negative).
        assert_eq!(
            preimage_in_closure(&g, &label("1 1' 2 2'")).unwrap_err(),
            MorphismError::NotInOpenImage
        );
    }

    #[test]
    fn linearization_rank_equals_image_dimension() {
        use crate::diagram::image_dimension;
        for (m, n) in [(1, 1), (2, 2), (2, 3), (3, 3)] {
            for r in crate::arrangement::enumerate_regions(m, n) {
                assert_eq!(
                    linearization_rank(&r),
                    image_dimension(&r),
                    "rank mismatch at {r}"
                );
            }
        }
    }

    #[test]
    fn preimage_in_closure_handles_boundary_points() {
        let g = RatMatrix::zero(2, 2);
        let r = label("1 1' 2 2'");
        assert_eq!(preimage_in_region(&g, &r).unwrap_err(), MorphismError::NotInOpenImage);
        let p = preimage_in_closure(&g, &r).unwrap();
        assert_eq!(eval_g(&p), g);
    }

    #[test]
    fn preimage_survives_large_constant_matrices() {
        // Every entry equal and large: the free parameters must clear the
        // data's magnitude, not its spread.
        let mut g = RatMatrix::zero(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                g.set(i, j, rat(1000));
            }
        }
        let r = label("1 2 1' 2'");
        let p = preimage_in_region(&g, &r).unwrap();
        assert!(round_trips(&p, &g, &r));
    }

    #[test]
    fn preimage_handles_rational_entries() {
        let mut g = RatMatrix::zero(2, 2);
        g.set(0, 0, ratio(7, 2));
        g.set(0, 1, rat(1));
        g.set(1, 0, ratio(-1, 3));
        g.set(1, 1, rat(2));
        // Delta = 7/2 + 2 - 1 + 1/3 > 0, so the staircase region fits.
        let r = label("1 1' 2 2'");
        let p = preimage_in_region(&g, &r).unwrap();
        assert!(round_trips(&p, &g, &r));
    }

    #[test]
    fn gauge_normalization_examples() {
        let p = pp(&[1, 3], &[3, 0], &[3, 0], &[0, 2]);
        let q = gauge_normalize(&p, &rat(0), &rat(0));
        assert_eq!(q, p); // already pinned
        let q = gauge_normalize(&p, &rat(5), &rat(0));
        assert_eq!(q.big_a, vec![rat(8), rat(5)]);
        assert_eq!(q.big_b, vec![rat(-5), rat(-3)]);
        assert_eq!(eval_g(&q), eval_g(&p));
        let q = gauge_normalize(&p, &ratio(1, 2), &ratio(-3, 4));
        assert_eq!(q.big_a[1], ratio(1, 2));
        assert_eq!(q.b[1], ratio(-3, 4));
        assert_eq!(eval_g(&q), eval_g(&p));
    }

    #[test]
    fn fiber_of_the_staircase_anchor() {
        let g = RatMatrix::from_i64(&[&[3, 1], &[0, 2]]);
        let f = generic_fiber(&g, None).unwrap();
        assert!(f.degenerate);
        assert_eq!(f.small_region, label("1 1' 2 2'"));
        let labels: Vec<String> = f.regions.iter().map(|r| r.label.to_string()).collect();
        assert_eq!(labels, vec!["1 1' 2 2'", "1 1' 2' 2", "1' 1 2 2'", "1' 1 2' 2"]);
        assert_eq!(
            f.apex,
            [
                ("a_2".to_string(), rat(2)),
                ("b_1".to_string(), rat(2)),
                ("B_2".to_string(), rat(2)),
                ("A_1".to_string(), rat(3)),
            ]
        );
        // The both-corners-black quadrant frees a_2 > 2 and b_1 > 2.
        let bb = f.regions.iter().find(|r| r.nw_black && r.se_black).unwrap();
        assert_eq!(bb.label, label("1' 1 2' 2"));
        let mut free: Vec<(String, Rat)> =
            bb.free.iter().map(|p| (p.name(), p.lower_bound.clone())).collect();
        free.sort();
        assert_eq!(free, vec![("a_2".into(), rat(2)), ("b_1".into(), rat(2))]);
    }

    #[test]
    fn fiber_of_the_antidiagonal_anchor() {
        let g = RatMatrix::from_i64(&[&[0, 2], &[1, 0]]);
        let f = generic_fiber(&g, None).unwrap();
        assert_eq!(f.small_region, label("1 2' 2 1'"));
        let labels: Vec<String> = f.regions.iter().map(|r| r.label.to_string()).collect();
        assert_eq!(labels, vec!["1 1' 2' 2", "1 2' 2 1'", "2' 1 1' 2", "2' 1 2 1'"]);
        // Gauge pins transported through the diagram's column order: the
        // last diagram column is original column 1.
        assert_eq!(f.gauge[0].0, "A_2");
        assert_eq!(f.gauge[1].0, "b_1");
    }

    #[test]
    fn fiber_quadrant_sampling_reproduces_the_matrix() {
        let g = RatMatrix::from_i64(&[&[3, 1], &[0, 2]]);
        let f = generic_fiber(&g, None).unwrap();
        for reg in &f.regions {
            for k in 1..=5 {
                let mut p = reg.witness.clone();
                for fp in &reg.free {
                    let value = &fp.lower_bound + ratio(k, 3);
                    match fp.family {
                        'a' => p.a[fp.index - 1] = value,
                        'A' => p.big_a[fp.index - 1] = value,
                        'b' => p.b[fp.index - 1] = value,
                        'B' => p.big_b[fp.index - 1] = value,
                        _ => unreachable!(),
                    }
                }
                assert_eq!(eval_g(&p), g, "quadrant sample in {}", reg.label);
                assert_eq!(
                    region_of_point(&p.xy()).as_ref(),
                    Ok(&reg.label),
                    "sample strictly inside {}",
                    reg.label
                );
            }
        }
    }

    #[test]
    fn fiber_rejects_degenerate_matrices() {
        assert_eq!(
            generic_fiber(&RatMatrix::zero(2, 2), None).unwrap_err(),
            MorphismError::NotGeneric
        );
    }

    #[test]
    fn fiber_respects_requested_pins() {
        let g = RatMatrix::from_i64(&[&[3, 1], &[0, 2]]);
        let f = generic_fiber(&g, Some((rat(1), rat(-1)))).unwrap();
        assert_eq!(f.gauge[0], ("A_2".to_string(), rat(1)));
        assert_eq!(f.gauge[1], ("b_2".to_string(), rat(-1)));
        for reg in &f.regions {
            assert_eq!(reg.witness.big_a[1], rat(1));
            assert_eq!(reg.witness.b[1], rat(-1));
            assert_eq!(eval_g(&reg.witness), g);
        }
        // Apex shifts with the pins: a_2 = g_22 - b_2 = 3, A_1 = g_11 - B_1
        // with B_1 = g_21 - A_2 = -1, so A_1 = 4.
        assert_eq!(f.apex[0], ("a_2".to_string(), rat(3)));
        assert_eq!(f.apex[3], ("A_1".to_string(), rat(4)));
    }
}
