//! Cells of the image: the closures of region images and how they fit
//! together.
//!
//! Two regions can map onto the same polyhedron, so a cell is an
//! equivalence class of region labels under exact polyhedron equality of
//! their closed relation systems, decided by mutual implication with
//! `lp_feasible`.  On top of that identity this module provides point
//! location, the parent/child structure between large and small cells,
//! reconstruction of a large region from its span equalities, the
//! Barvinok-rank-2 membership decision, and an exact verifier for the two
//! subdivision statements (large cells subdivide the image; small cells
//! refine them).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arrangement::{enumerate_regions, Orientation, RegionLabel};
use crate::diagram::{
    cell_size_class, diagram_of, image_dimension, relations_v2, span_equalities, RectRelation,
    RelKind, SizeClass,
};
use crate::morphism::{eval_g, preimage_in_closure, ParamPoint};
use crate::ratcore::{
    lp_feasible, rat, ratio, Feasibility, LinSysError, LinSystem, Rat, RatMatrix,
};

/// A candidate element of the image, i.e. an m x n rational matrix.
pub type MatrixPoint = RatMatrix;

/// Open membership tests the region's strict system; closed membership
/// weakens every strict inequality to >=.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Open,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellsError {
    ShapeMismatch(String),
    NotLarge(String),
    NotMaximalRegion(String),
    NoRegionFound,
    BudgetExceeded { budget: u64 },
    Lp(String),
    Internal(String),
}

impl fmt::Display for CellsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellsError::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            CellsError::NotLarge(label) => write!(f, "region {label} is not large"),
            CellsError::NotMaximalRegion(label) => {
                write!(f, "region {label} is not maximum-dimensional")
            }
            CellsError::NoRegionFound => write!(f, "no large region realizes the given span"),
            CellsError::BudgetExceeded { budget } => {
                write!(f, "region enumeration exceeded the budget of {budget} labels")
            }
            CellsError::Lp(msg) => write!(f, "linear programming failed: {msg}"),
            CellsError::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl std::error::Error for CellsError {}

impl From<LinSysError> for CellsError {
    fn from(e: LinSysError) -> CellsError {
        CellsError::Lp(e.to_string())
    }
}

/// Default cap on how many region labels an operation may enumerate.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Resolves the enumeration budget: an explicit argument wins, then the
/// TROPBIP_BUDGET environment variable, then the default.
pub fn effective_budget(explicit: Option<u64>) -> u64 {
    if let Some(b) = explicit {
        return b;
    }
    std::env::var("TROPBIP_BUDGET")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

fn collect_regions(m: usize, n: usize, budget: u64) -> Result<Vec<RegionLabel>, CellsError> {
    let mut out = Vec::new();
    for label in enumerate_regions(m, n) {
        out.push(label);
        if out.len() as u64 > budget {
            return Err(CellsError::BudgetExceeded { budget });
        }
    }
    Ok(out)
}

/// Whether a matrix satisfies a region's relation system.
pub fn member(g: &MatrixPoint, r: &RegionLabel, mode: Mode) -> Result<bool, CellsError> {
    if g.rows() != r.m() || g.cols() != r.n() {
        return Err(CellsError::ShapeMismatch(format!(
            "matrix is {}x{}, region label is for {}x{}",
            g.rows(),
            g.cols(),
            r.m(),
            r.n()
        )));
    }
    let rels = relations_v2(&diagram_of(r));
    Ok(rels.iter().all(|rel| rel.holds(g, mode == Mode::Closed)))
}

/// All rectangle values Delta_{i1 i2 j1 j2}(g) with i1 < i2, j1 < j2,
/// computed once.  Other index orientations are sign flips.
pub struct DeltaTable {
    m: usize,
    n: usize,
    vals: Vec<Rat>,
}

fn pair_index(a: usize, b: usize, size: usize) -> usize {
    debug_assert!(1 <= a && a < b && b <= size);
    (a - 1) * size - (a - 1) * a / 2 + (b - a - 1)
}

fn pair_count(size: usize) -> usize {
    size * size.saturating_sub(1) / 2
}

impl DeltaTable {
    pub fn new(g: &RatMatrix) -> DeltaTable {
        let (m, n) = (g.rows(), g.cols());
        let mut vals = Vec::with_capacity(pair_count(m) * pair_count(n));
        for i1 in 1..=m {
            for i2 in i1 + 1..=m {
                for j1 in 1..=n {
                    for j2 in j1 + 1..=n {
                        let v = g.get(i1 - 1, j1 - 1).clone() + g.get(i2 - 1, j2 - 1)
                            - g.get(i1 - 1, j2 - 1)
                            - g.get(i2 - 1, j1 - 1);
                        vals.push(v);
                    }
                }
            }
        }
        DeltaTable { m, n, vals }
    }

    /// Delta for any index orientation (1-based, i1 != i2, j1 != j2).
    pub fn delta(&self, i1: usize, i2: usize, j1: usize, j2: usize) -> Rat {
        let (mut a, mut b, mut c, mut d) = (i1, i2, j1, j2);
        let mut flip = false;
        if a > b {
            std::mem::swap(&mut a, &mut b);
            flip = !flip;
        }
        if c > d {
            std::mem::swap(&mut c, &mut d);
            flip = !flip;
        }
        let v = &self.vals[pair_index(a, b, self.m) * pair_count(self.n) + pair_index(c, d, self.n)];
        if flip {
            -v.clone()
        } else {
            v.clone()
        }
    }

    /// Relation check against the memoized values.
    pub fn holds(&self, rel: &RectRelation, mode: Mode) -> bool {
        let v = self.delta(rel.i1, rel.i2, rel.j1, rel.j2);
        match rel.kind {
            RelKind::Eq => v == rat(0),
            RelKind::Gt if mode == Mode::Closed => v >= rat(0),
            RelKind::Gt => v > rat(0),
        }
    }

    /// How many equality relations of the set the matrix violates.
    pub fn eq_violations(&self, rels: &BTreeSet<RectRelation>) -> usize {
        rels.iter()
            .filter(|rel| rel.kind == RelKind::Eq && self.delta(rel.i1, rel.i2, rel.j1, rel.j2) != rat(0))
            .count()
    }
}

fn system_from(
    rels: &BTreeSet<RectRelation>,
    m: usize,
    n: usize,
    mode: Mode,
) -> Result<LinSystem, CellsError> {
    let mut sys = LinSystem::new(m * n);
    for rel in rels {
        let coeffs = rel.coeffs(m, n);
        match rel.kind {
            RelKind::Eq => sys.push_eq(coeffs, rat(0))?,
            RelKind::Gt if mode == Mode::Closed => sys.push_ge(coeffs, rat(0))?,
            RelKind::Gt => sys.push_gt(coeffs, rat(0))?,
        }
    }
    Ok(sys)
}

fn is_feasible(sys: &LinSystem) -> Result<bool, CellsError> {
    Ok(matches!(lp_feasible(sys)?, Feasibility::Feasible(_)))
}

fn negated_coeffs(coeffs: &[Rat]) -> Vec<Rat> {
    coeffs.iter().map(|c| -c.clone()).collect()
}

/// Does the closed system of `a` imply every relation of the closed system
/// of `b`?  Each target relation is refuted separately: the implication
/// holds exactly when closed(a) plus the relation's negation is infeasible.
fn closed_implies(
    a: &BTreeSet<RectRelation>,
    b: &BTreeSet<RectRelation>,
    m: usize,
    n: usize,
) -> Result<bool, CellsError> {
    let base = system_from(a, m, n, Mode::Closed)?;
    for rel in b {
        if a.contains(rel) {
            continue;
        }
        let coeffs = rel.coeffs(m, n);
        match rel.kind {
            RelKind::Gt => {
                let mut sys = LinSystem::new(m * n);
                sys.extend_from(&base)?;
                sys.push_gt(negated_coeffs(&coeffs), rat(0))?;
                if is_feasible(&sys)? {
                    return Ok(false);
                }
            }
            RelKind::Eq => {
                for side in [coeffs.clone(), negated_coeffs(&coeffs)] {
                    let mut sys = LinSystem::new(m * n);
                    sys.extend_from(&base)?;
                    sys.push_gt(side, rat(0))?;
                    if is_feasible(&sys)? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

fn polyhedra_equal(
    a: &BTreeSet<RectRelation>,
    b: &BTreeSet<RectRelation>,
    m: usize,
    n: usize,
) -> Result<bool, CellsError> {
    Ok(closed_implies(a, b, m, n)? && closed_implies(b, a, m, n)?)
}

/// Reduced row echelon form of the equality coefficient vectors: a
/// canonical key for the linear span of a relation set.
fn span_key(rels: &BTreeSet<RectRelation>, m: usize, n: usize) -> Vec<Vec<Rat>> {
    let mut mat: Vec<Vec<Rat>> = rels
        .iter()
        .filter(|r| r.kind == RelKind::Eq)
        .map(|r| r.coeffs(m, n))
        .collect();
    let cols = m * n;
    let mut row = 0;
    for col in 0..cols {
        let Some(pivot) = (row..mat.len()).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, pivot);
        let lead = mat[row][col].clone();
        for k in col..cols {
            mat[row][k] = &mat[row][k] / &lead;
        }
        for r in 0..mat.len() {
            if r != row && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for k in col..cols {
                    mat[r][k] = &mat[r][k] - &factor * &mat[row][k];
                }
            }
        }
        row += 1;
        if row == mat.len() {
            break;
        }
    }
    mat.truncate(row);
    mat
}

/// One cell: the common image closure of every region label listed in
/// `representatives` (sorted; the first is the canonical key).  The
/// relation set and size class are those of the canonical representative;
/// an empty relation set means the cell is the full ambient space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    m: usize,
    n: usize,
    pub relations: BTreeSet<RectRelation>,
    pub representatives: Vec<RegionLabel>,
    pub size_class: SizeClass,
}

impl Cell {
    fn from_group(m: usize, n: usize, mut labels: Vec<RegionLabel>) -> Cell {
        labels.sort();
        let key = labels[0].clone();
        Cell {
            m,
            n,
            relations: relations_v2(&diagram_of(&key)),
            representatives: labels,
            size_class: cell_size_class(&key),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The lexicographically least representative.
    pub fn key(&self) -> &RegionLabel {
        &self.representatives[0]
    }

    pub fn contains(&self, g: &MatrixPoint, mode: Mode) -> bool {
        debug_assert!(g.rows() == self.m && g.cols() == self.n);
        self.relations.iter().all(|rel| rel.holds(g, mode == Mode::Closed))
    }
}

/// Every cell of a fixed shape: all region labels grouped by polyhedron
/// equality of their closed relation systems.
#[derive(Debug, Clone)]
pub struct CellComplex {
    pub m: usize,
    pub n: usize,
    pub cells: Vec<Cell>,
}

impl CellComplex {
    pub fn build(m: usize, n: usize, budget: Option<u64>) -> Result<CellComplex, CellsError> {
        let labels = collect_regions(m, n, effective_budget(budget))?;
        let cells = group_by_polyhedron(m, n, labels)?;
        Ok(CellComplex { m, n, cells })
    }

    /// The cell whose representatives include the given label.
    pub fn cell_of(&self, r: &RegionLabel) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.representatives.binary_search(r).is_ok())
    }

    pub fn maximal_cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.size_class != SizeClass::NotMaximal)
    }

    pub fn cells_of_class(&self, class: SizeClass) -> impl Iterator<Item = &Cell> + '_ {
        self.cells.iter().filter(move |c| c.size_class == class)
    }
}

/// Groups labels into cells.  Labels with syntactically equal relation
/// sets trivially share a polyhedron; the remaining identifications are
/// found by exact mutual implication, attempted only inside classes with
/// equal image dimension and equal equality span (a sound prefilter, since
/// equal polyhedra share their affine hull).
fn group_by_polyhedron(
    m: usize,
    n: usize,
    labels: Vec<RegionLabel>,
) -> Result<Vec<Cell>, CellsError> {
    let mut buckets: BTreeMap<BTreeSet<RectRelation>, Vec<RegionLabel>> = BTreeMap::new();
    for label in labels {
        let rels = relations_v2(&diagram_of(&label));
        buckets.entry(rels).or_default().push(label);
    }
    let buckets: Vec<(BTreeSet<RectRelation>, Vec<RegionLabel>)> = buckets.into_iter().collect();

    let mut classes: BTreeMap<(usize, Vec<Vec<Rat>>), Vec<usize>> = BTreeMap::new();
    for (idx, (rels, labels)) in buckets.iter().enumerate() {
        let dim = image_dimension(&labels[0]);
        classes.entry((dim, span_key(rels, m, n))).or_default().push(idx);
    }

    let class_list: Vec<Vec<usize>> = classes.into_values().collect();
    let grouped: Vec<Vec<Vec<usize>>> = class_list
        .into_par_iter()
        .map(|indices| -> Result<Vec<Vec<usize>>, CellsError> {
            let mut groups: Vec<Vec<usize>> = Vec::new();
            for idx in indices {
                let mut joined = false;
                for group in groups.iter_mut() {
                    let rep = group[0];
                    if polyhedra_equal(&buckets[idx].0, &buckets[rep].0, m, n)? {
                        group.push(idx);
                        joined = true;
                        break;
                    }
                }
                if !joined {
                    groups.push(vec![idx]);
                }
            }
            Ok(groups)
        })
        .collect::<Result<Vec<_>, CellsError>>()?;

    let mut cells: Vec<Cell> = Vec::new();
    for groups in grouped {
        for group in groups {
            let mut labels = Vec::new();
            for idx in group {
                labels.extend(buckets[idx].1.iter().cloned());
            }
            cells.push(Cell::from_group(m, n, labels));
        }
    }
    cells.sort_by(|a, b| a.key().cmp(b.key()));
    Ok(cells)
}

/// Which cells a matrix belongs to.
#[derive(Debug, Clone)]
pub struct LocateReport {
    pub m: usize,
    pub n: usize,
    /// The unique small cell whose open system the matrix satisfies, if any.
    pub interior_of: Option<Cell>,
    /// Every maximum-dimensional cell whose closed system contains the
    /// matrix, sorted by canonical representative.
    pub closed_containers: Vec<Cell>,
}

pub fn locate_cells(g: &MatrixPoint, budget: Option<u64>) -> Result<LocateReport, CellsError> {
    let (m, n) = (g.rows(), g.cols());
    let complex = CellComplex::build(m, n, budget)?;
    let mut interior: Vec<Cell> = Vec::new();
    let mut containers: Vec<Cell> = Vec::new();
    for cell in complex.maximal_cells() {
        if cell.contains(g, Mode::Closed) {
            containers.push(cell.clone());
        }
        if cell.size_class == SizeClass::Small && cell.contains(g, Mode::Open) {
            interior.push(cell.clone());
        }
    }
    if interior.len() > 1 {
        return Err(CellsError::Internal(format!(
            "matrix lies in the open systems of {} small cells; small interiors must be disjoint",
            interior.len()
        )));
    }
    Ok(LocateReport {
        m,
        n,
        interior_of: interior.into_iter().next(),
        closed_containers: containers,
    })
}

/// The cell containing a region: every label of the same shape whose image
/// polyhedron equals this one's, canonically keyed.
pub fn canonical_cell(r: &RegionLabel, budget: Option<u64>) -> Result<Cell, CellsError> {
    let complex = CellComplex::build(r.m(), r.n(), budget)?;
    complex
        .cell_of(r)
        .cloned()
        .ok_or_else(|| CellsError::Internal(format!("region {r} missing from its own complex")))
}

/// Climbs from a small or medium region to the large region whose cell
/// contains it: while the second block is a singleton the first two letters
/// swap, and mirrored at the end.  Returns the large label plus a flag that
/// is true when the input was already large (identity with a warning).
pub fn large_parent(r: &RegionLabel) -> Result<(RegionLabel, bool), CellsError> {
    match cell_size_class(r) {
        SizeClass::NotMaximal => return Err(CellsError::NotMaximalRegion(r.to_string())),
        SizeClass::Large => return Ok((r.clone(), true)),
        SizeClass::Small | SizeClass::Medium => {}
    }
    if r.m() < 2 || r.n() < 2 {
        return Err(CellsError::ShapeMismatch(format!(
            "no large regions exist at shape {}x{}",
            r.m(),
            r.n()
        )));
    }
    let mut current = r.clone();
    loop {
        match cell_size_class(&current) {
            SizeClass::Large => break,
            SizeClass::NotMaximal => {
                return Err(CellsError::Internal(format!(
                    "adjustment left the maximal stratum at {current}"
                )))
            }
            _ => {}
        }
        let stats = current.block_stats();
        let k = stats.blocks.len();
        let mut letters = current.letters().to_vec();
        if stats.blocks[1].1 == 1 {
            letters.swap(0, 1);
        } else if stats.blocks[k - 2].1 == 1 {
            let last = letters.len() - 1;
            letters.swap(last - 1, last);
        } else {
            return Err(CellsError::Internal(format!(
                "non-large region {current} with no singleton to adjust"
            )));
        }
        current = RegionLabel::new(current.m(), current.n(), letters)
            .map_err(|e| CellsError::Internal(e.to_string()))?;
    }
    let child_rels = relations_v2(&diagram_of(r));
    let parent_rels = relations_v2(&diagram_of(&current));
    if !closed_implies(&child_rels, &parent_rels, r.m(), r.n())? {
        return Err(CellsError::Internal(format!(
            "climb from {r} reached {current}, but the closure containment fails"
        )));
    }
    Ok((current, false))
}

/// The small regions subdividing a large cell: one child per way of moving
/// a letter of the second block to the front and a letter of the
/// second-to-last block to the end.  When the two blocks are the same
/// middle block, the front move alone already isolates a singleton on each
/// side, so the children number s(s-1) instead of s*t.
pub fn small_children(r: &RegionLabel) -> Result<Vec<RegionLabel>, CellsError> {
    if cell_size_class(r) != SizeClass::Large {
        return Err(CellsError::NotLarge(r.to_string()));
    }
    let (m, n) = (r.m(), r.n());
    let letters = r.letters().to_vec();
    let runs = r.runs();
    let second_len = runs[1].indices.len();
    let rebuild = |v: Vec<crate::arrangement::Letter>| {
        RegionLabel::new(m, n, v).map_err(|e| CellsError::Internal(e.to_string()))
    };

    let mut children: Vec<RegionLabel> = Vec::new();
    for offset in 0..second_len {
        // Front construction: the chosen letter of the second block moves
        // to the very front.
        let chosen = 1 + offset;
        let mut front = Vec::with_capacity(letters.len());
        front.push(letters[chosen]);
        for (pos, &l) in letters.iter().enumerate() {
            if pos != chosen {
                front.push(l);
            }
        }
        let cand = rebuild(front)?;
        if cell_size_class(&cand) == SizeClass::Small {
            children.push(cand);
            continue;
        }
        // Mirrored back construction on what is now the second-to-last
        // block of the candidate.
        let cletters = cand.letters().to_vec();
        let cruns = cand.runs();
        let ck = cruns.len();
        let back_len = cruns[ck - 2].indices.len();
        let back_start = cletters.len() - cruns[ck - 1].indices.len() - back_len;
        for boff in 0..back_len {
            let pos = back_start + boff;
            let mut word = Vec::with_capacity(cletters.len());
            for (p, &l) in cletters.iter().enumerate() {
                if p != pos {
                    word.push(l);
                }
            }
            word.push(cletters[pos]);
            let child = rebuild(word)?;
            if cell_size_class(&child) != SizeClass::Small {
                return Err(CellsError::Internal(format!(
                    "child {child} of {r} is not small"
                )));
            }
            children.push(child);
        }
    }
    children.sort();
    children.dedup();
    Ok(children)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(size: usize) -> UnionFind {
        UnionFind { parent: (0..size).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Rebuilds the large region(s) whose cell has exactly the given span
/// equalities, following the reconstruction in the subdivision proof:
/// entries of the grid are grouped by the equalities, a pivot entry seen
/// with every other entry of its group fixes the outer blocks, and the
/// mixed middle segment is read off pair by pair.  Both a label and its
/// negation describe the same cell, so the result lists both.  An empty
/// span is matched by scanning, since every shape with no black-and-white
/// 2x2 pattern (for instance any 2-row shape) realizes it.
pub fn recover_region_from_span(
    eqs: &BTreeSet<RectRelation>,
    m: usize,
    n: usize,
    budget: Option<u64>,
) -> Result<Vec<RegionLabel>, CellsError> {
    for rel in eqs {
        if rel.kind != RelKind::Eq {
            return Err(CellsError::ShapeMismatch(format!(
                "span sets contain only equalities, got {rel}"
            )));
        }
        if rel.i1.min(rel.j1).min(rel.i2).min(rel.j2) == 0
            || rel.i1.max(rel.i2) > m
            || rel.j1.max(rel.j2) > n
        {
            return Err(CellsError::ShapeMismatch(format!(
                "relation {rel} does not fit a {m}x{n} grid"
            )));
        }
    }
    let verify = |cand: &RegionLabel| -> bool {
        cell_size_class(cand) == SizeClass::Large
            && span_equalities(&diagram_of(cand)) == *eqs
    };

    if eqs.is_empty() {
        let mut found: Vec<RegionLabel> = Vec::new();
        for label in collect_regions(m, n, effective_budget(budget))? {
            if verify(&label) {
                found.push(label);
            }
        }
        if found.is_empty() {
            return Err(CellsError::NoRegionFound);
        }
        found.sort();
        return Ok(found);
    }

    // Group the grid entries by the transitive closure of "appears in a
    // common equality".
    let entry_id = |i: usize, j: usize| (i - 1) * n + (j - 1);
    let mut uf = UnionFind::new(m * n);
    let mut entry_eqs: BTreeMap<usize, Vec<[usize; 4]>> = BTreeMap::new();
    for rel in eqs {
        let quad = [
            entry_id(rel.i1, rel.j1),
            entry_id(rel.i1, rel.j2),
            entry_id(rel.i2, rel.j1),
            entry_id(rel.i2, rel.j2),
        ];
        for &e in &quad {
            uf.union(quad[0], e);
            entry_eqs.entry(e).or_default().push(quad);
        }
    }
    let mut classes: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 1..=m {
        for j in 1..=n {
            let root = uf.find(entry_id(i, j));
            classes.entry(root).or_default().push((i, j));
        }
    }

    let mut found: BTreeSet<RegionLabel> = BTreeSet::new();
    for class in classes.values().filter(|c| c.len() > 1) {
        for &(a, c) in class {
            // Pivot test: (a, c) shares some equality with every other
            // entry of its class.
            let quads = entry_eqs.get(&entry_id(a, c)).cloned().unwrap_or_default();
            let covers = class.iter().all(|&(i, j)| {
                (i, j) == (a, c) || quads.iter().any(|q| q.contains(&entry_id(i, j)))
            });
            if !covers {
                continue;
            }
            // Letters adjacent to the pivot through a direct equality form
            // the mixed middle segment; the rest sit at the two ends.
            let has_eq = |i: usize, j: usize| {
                i != a && j != c && eqs.contains(&RectRelation::eq(a, i, c, j))
            };
            let sigma_pos: BTreeSet<usize> =
                (1..=m).filter(|&i| (1..=n).any(|j| has_eq(i, j))).collect();
            let sigma_neg: BTreeSet<usize> =
                (1..=n).filter(|&j| (1..=m).any(|i| has_eq(i, j))).collect();
            let front_pos: Vec<usize> =
                (1..=m).filter(|&i| i != a && !sigma_pos.contains(&i)).collect();
            let back_neg: Vec<usize> =
                (1..=n).filter(|&j| j != c && !sigma_neg.contains(&j)).collect();
            if front_pos.is_empty() || back_neg.is_empty() {
                continue;
            }
            // Build the comparison pattern: edges[(i-1)*n + j-1] true means
            // the positive letter i comes before the negative letter j.
            let mut edges = vec![false; m * n];
            for i in 1..=m {
                for j in 1..=n {
                    let before = if i == a {
                        back_neg.len() == 1 && j == back_neg[0]
                    } else if front_pos.contains(&i) {
                        front_pos.len() == 1 || j != c
                    } else if j == c {
                        false
                    } else if back_neg.contains(&j) {
                        true
                    } else {
                        !eqs.contains(&RectRelation::eq(a, i, c, j))
                    };
                    edges[(i - 1) * n + (j - 1)] = before;
                }
            }
            let Ok(cand) = Orientation::new(m, n, edges).region() else {
                continue;
            };
            if verify(&cand) {
                let neg = cand.negate();
                if verify(&neg) {
                    found.insert(neg);
                }
                found.insert(cand);
            }
        }
    }
    if found.is_empty() {
        return Err(CellsError::NoRegionFound);
    }
    Ok(found.into_iter().collect())
}

/// Outcome of the Barvinok-rank-2 membership decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Yes {
        witness_region: RegionLabel,
        preimage: ParamPoint,
    },
    No,
}

/// Decides whether a matrix is the image of some parameter point, by
/// scanning regions: a Yes needs a region whose closed relation system
/// contains the matrix and whose constructive preimage reproduces it
/// exactly.  Regions violating fewer equalities are tried first (with more
/// equalities breaking ties) so generic image points accept quickly; a No
/// is only reported after every region has been tried.
pub fn barvinok2_decide(g: &MatrixPoint, budget: Option<u64>) -> Result<Decision, CellsError> {
    let (m, n) = (g.rows(), g.cols());
    if m == 0 || n == 0 {
        return Err(CellsError::ShapeMismatch("matrix must be nonempty".into()));
    }
    let labels = collect_regions(m, n, effective_budget(budget))?;
    let table = DeltaTable::new(g);
    let mut keyed: Vec<(usize, std::cmp::Reverse<usize>, RegionLabel, BTreeSet<RectRelation>)> =
        labels
            .into_iter()
            .map(|label| {
                let rels = relations_v2(&diagram_of(&label));
                let eq_count = rels.iter().filter(|r| r.kind == RelKind::Eq).count();
                (table.eq_violations(&rels), std::cmp::Reverse(eq_count), label, rels)
            })
            .collect();
    keyed.sort_by(|x, y| (x.0, x.1, &x.2).cmp(&(y.0, y.1, &y.2)));
    for (_, _, label, rels) in keyed {
        if !rels.iter().all(|rel| table.holds(rel, Mode::Closed)) {
            continue;
        }
        if let Ok(p) = preimage_in_closure(g, &label) {
            if eval_g(&p) == *g {
                return Ok(Decision::Yes { witness_region: label, preimage: p });
            }
        }
    }
    Ok(Decision::No)
}

/// One verification step of the subdivision report.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<String>,
}

/// Exact verification of the subdivision statements at one shape.
#[derive(Debug, Clone)]
pub struct SubdivisionReport {
    pub m: usize,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub small_cells: usize,
    pub large_cells: usize,
    pub checks: Vec<CheckOutcome>,
}

impl SubdivisionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn sample_param(rng: &mut ChaCha8Rng, m: usize, n: usize) -> ParamPoint {
    let mut vecs: Vec<Vec<Rat>> = Vec::new();
    for len in [m, m, n, n] {
        vecs.push(
            (0..len)
                .map(|_| ratio(rng.gen_range(-30..=30), rng.gen_range(1..=4)))
                .collect(),
        );
    }
    let b2 = vecs.pop().unwrap();
    let b1 = vecs.pop().unwrap();
    let a2 = vecs.pop().unwrap();
    let a1 = vecs.pop().unwrap();
    ParamPoint::new(a1, a2, b1, b2).expect("sampled shapes are valid")
}

/// Runs the five exact checks behind the subdivision theorem at shape
/// (m, n): span distinctness of large cells, pairwise interior
/// disjointness within the small and within the large cells, sampled
/// coverage of image points by both families, refinement of large cells by
/// small ones, and the face-to-face property on sampled pairs.
pub fn verify_subdivision(
    m: usize,
    n: usize,
    samples: usize,
    seed: u64,
    budget: Option<u64>,
) -> Result<SubdivisionReport, CellsError> {
    let complex = CellComplex::build(m, n, budget)?;
    let smalls: Vec<&Cell> = complex.cells_of_class(SizeClass::Small).collect();
    let larges: Vec<&Cell> = complex.cells_of_class(SizeClass::Large).collect();
    let mut checks: Vec<CheckOutcome> = Vec::new();

    // (a) distinct spans for distinct large cells.
    {
        let mut seen: BTreeMap<Vec<Vec<Rat>>, &Cell> = BTreeMap::new();
        let mut witness = None;
        for cell in &larges {
            let key = span_key(&cell.relations, m, n);
            if let Some(other) = seen.get(&key) {
                witness = Some(format!("cells {} and {} share a span", other.key(), cell.key()));
                break;
            }
            seen.insert(key, cell);
        }
        checks.push(CheckOutcome {
            name: "span-distinctness".into(),
            passed: witness.is_none(),
            detail: format!("{} large cells compared", larges.len()),
            witness,
        });
    }

    // (b) pairwise interior disjointness inside each family.
    for (name, family) in [("small", &smalls), ("large", &larges)] {
        let pairs: Vec<(usize, usize)> = (0..family.len())
            .flat_map(|i| (i + 1..family.len()).map(move |j| (i, j)))
            .collect();
        let hits: Vec<Option<String>> = pairs
            .par_iter()
            .map(|&(i, j)| -> Result<Option<String>, CellsError> {
                let mut sys = system_from(&family[i].relations, m, n, Mode::Open)?;
                let other = system_from(&family[j].relations, m, n, Mode::Open)?;
                sys.extend_from(&other)?;
                if is_feasible(&sys)? {
                    Ok(Some(format!(
                        "open systems of {} and {} meet",
                        family[i].key(),
                        family[j].key()
                    )))
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>, CellsError>>()?;
        let witness = hits.into_iter().flatten().next();
        checks.push(CheckOutcome {
            name: format!("interior-disjointness-{name}"),
            passed: witness.is_none(),
            detail: format!("{} pairs tested", pairs.len()),
            witness,
        });
    }

    // (c) sampled image points covered by both families' closures.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    {
        let mut witness = None;
        for _ in 0..samples {
            let p = sample_param(&mut rng, m, n);
            let g = eval_g(&p);
            let in_small = smalls.iter().any(|c| c.contains(&g, Mode::Closed));
            let in_large = larges.iter().any(|c| c.contains(&g, Mode::Closed));
            if !in_small || !in_large {
                witness = Some(format!("image point {:?} escapes a family", g));
                break;
            }
        }
        checks.push(CheckOutcome {
            name: "coverage".into(),
            passed: witness.is_none(),
            detail: format!("{samples} sampled image points"),
            witness,
        });
    }

    // (d) every small cell's closed system implies some large cell's.
    {
        let results: Vec<Option<String>> = smalls
            .par_iter()
            .map(|small| -> Result<Option<String>, CellsError> {
                for large in &larges {
                    if closed_implies(&small.relations, &large.relations, m, n)? {
                        return Ok(None);
                    }
                }
                Ok(Some(format!("small cell {} lies in no large cell", small.key())))
            })
            .collect::<Result<Vec<_>, CellsError>>()?;
        let witness = results.into_iter().flatten().next();
        checks.push(CheckOutcome {
            name: "refinement".into(),
            passed: witness.is_none(),
            detail: format!("{} small cells placed", smalls.len()),
            witness,
        });
    }

    // (e) face-to-face on sampled pairs inside each family.
    {
        let mut tested = 0usize;
        let mut witness = None;
        for family in [&smalls, &larges] {
            let mut pairs: Vec<(usize, usize)> = (0..family.len())
                .flat_map(|i| (i + 1..family.len()).map(move |j| (i, j)))
                .collect();
            const PAIR_CAP: usize = 60;
            if pairs.len() > PAIR_CAP {
                pairs = pairs.choose_multiple(&mut rng, PAIR_CAP).cloned().collect();
                pairs.sort();
            }
            for (i, j) in pairs {
                tested += 1;
                if let Some(w) = face_to_face(family[i], family[j], m, n)? {
                    witness = Some(w);
                    break;
                }
            }
            if witness.is_some() {
                break;
            }
        }
        checks.push(CheckOutcome {
            name: "face-to-face".into(),
            passed: witness.is_none(),
            detail: format!("{tested} cell pairs intersected"),
            witness,
        });
    }

    Ok(SubdivisionReport {
        m,
        n,
        samples,
        seed,
        small_cells: smalls.len(),
        large_cells: larges.len(),
        checks,
    })
}

/// Checks that two closed cells meet in a common face: the affine hull of
/// their intersection (joint equalities plus the weak inequalities forced
/// to equality) must cut each cell exactly in the intersection.
fn face_to_face(a: &Cell, b: &Cell, m: usize, n: usize) -> Result<Option<String>, CellsError> {
    let mut joint = system_from(&a.relations, m, n, Mode::Closed)?;
    let other = system_from(&b.relations, m, n, Mode::Closed)?;
    joint.extend_from(&other)?;
    if !is_feasible(&joint)? {
        return Ok(None);
    }
    // Implicit equalities of the joint system.
    let mut hull_eqs: Vec<Vec<Rat>> = Vec::new();
    let all_rels: BTreeSet<&RectRelation> = a.relations.iter().chain(b.relations.iter()).collect();
    for rel in &all_rels {
        if rel.kind != RelKind::Gt {
            continue;
        }
        let coeffs = rel.coeffs(m, n);
        let mut strict = LinSystem::new(m * n);
        strict.extend_from(&joint)?;
        strict.push_gt(coeffs.clone(), rat(0))?;
        if !is_feasible(&strict)? {
            hull_eqs.push(coeffs);
        }
    }
    // Each cell, restricted to the hull, must satisfy the other cell's
    // closed system.
    for (this, that) in [(a, b), (b, a)] {
        let mut base = system_from(&this.relations, m, n, Mode::Closed)?;
        for eq in &hull_eqs {
            base.push_eq(eq.clone(), rat(0))?;
        }
        for rel in &that.relations {
            let coeffs = rel.coeffs(m, n);
            let refuted = match rel.kind {
                RelKind::Gt => {
                    let mut sys = LinSystem::new(m * n);
                    sys.extend_from(&base)?;
                    sys.push_gt(negated_coeffs(&coeffs), rat(0))?;
                    !is_feasible(&sys)?
                }
                RelKind::Eq => {
                    let mut ok = true;
                    for side in [coeffs.clone(), negated_coeffs(&coeffs)] {
                        let mut sys = LinSystem::new(m * n);
                        sys.extend_from(&base)?;
                        sys.push_gt(side, rat(0))?;
                        if is_feasible(&sys)? {
                            ok = false;
                            break;
                        }
                    }
                    ok
                }
            };
            if !refuted {
                return Ok(Some(format!(
                    "cells {} and {} do not meet face-to-face (relation {rel})",
                    a.key(),
                    b.key()
                )));
            }
        }
    }
    Ok(None)
}

/// Cell and region tallies for one size class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellCounts {
    /// Number of distinct cells whose canonical representative has the
    /// requested class.
    pub distinct_images: u64,
    /// Number of regions of that class whose label has 1 before 1'.
    pub positive_regions: u64,
}

pub fn count_cells(
    m: usize,
    n: usize,
    which: SizeClass,
    budget: Option<u64>,
) -> Result<CellCounts, CellsError> {
    if which == SizeClass::NotMaximal {
        return Err(CellsError::ShapeMismatch(
            "count_cells tallies small, medium, or large cells".into(),
        ));
    }
    let complex = CellComplex::build(m, n, budget)?;
    let distinct_images = complex.cells_of_class(which).count() as u64;
    let positive_regions = complex
        .cells
        .iter()
        .flat_map(|c| c.representatives.iter())
        .filter(|r| cell_size_class(r) == which && r.is_positive())
        .count() as u64;
    Ok(CellCounts { distinct_images, positive_regions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::Letter;

    fn label(text: &str) -> RegionLabel {
        RegionLabel::parse(text).expect("valid label")
    }

    fn mat(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_i64(rows)
    }

    #[test]
    fn member_examples() {
        let g = mat(&[&[0, 2], &[1, 0]]);
        assert_eq!(member(&g, &label("2' 1 1' 2"), Mode::Open).unwrap(), true);
        assert_eq!(member(&g, &label("1 1' 2 2'"), Mode::Open).unwrap(), false);
        let zeros = mat(&[&[0, 0], &[0, 0]]);
        assert_eq!(member(&zeros, &label("1 2 1' 2'"), Mode::Closed).unwrap(), true);
        assert!(member(&zeros, &label("1 1' 2 2' 3'"), Mode::Open).is_err());
    }

    #[test]
    fn delta_table_agrees_with_direct_evaluation() {
        let g = mat(&[&[3, 1, 4], &[1, 5, 9], &[2, 6, 5]]);
        let table = DeltaTable::new(&g);
        for i1 in 1..=3 {
            for i2 in 1..=3 {
                for j1 in 1..=3 {
                    for j2 in 1..=3 {
                        if i1 == i2 || j1 == j2 {
                            continue;
                        }
                        let direct = g.get(i1 - 1, j1 - 1).clone() + g.get(i2 - 1, j2 - 1)
                            - g.get(i1 - 1, j2 - 1)
                            - g.get(i2 - 1, j1 - 1);
                        assert_eq!(table.delta(i1, i2, j1, j2), direct);
                    }
                }
            }
        }
    }

    #[test]
    fn complex_at_2_2_has_four_cells() {
        let complex = CellComplex::build(2, 2, None).unwrap();
        assert_eq!(complex.cells.len(), 4);
        let by_class = |class: SizeClass| complex.cells_of_class(class).count();
        assert_eq!(by_class(SizeClass::Small), 2);
        assert_eq!(by_class(SizeClass::Large), 1);
        assert_eq!(by_class(SizeClass::Medium), 0);
        assert_eq!(by_class(SizeClass::NotMaximal), 1);
        let large = complex.cells_of_class(SizeClass::Large).next().unwrap();
        assert!(large.relations.is_empty(), "the large cell is the whole space");
        assert_eq!(large.representatives.len(), 4);
        let flat = complex.cells_of_class(SizeClass::NotMaximal).next().unwrap();
        assert_eq!(
            flat.representatives,
            vec![label("1 2 1' 2'"), label("1' 2' 1 2")]
        );
    }

    #[test]
    fn locate_at_the_anchor_matrices() {
        let report = locate_cells(&mat(&[&[0, 2], &[1, 0]]), None).unwrap();
        let small = report.interior_of.expect("interior of a small cell");
        assert_eq!(small.key(), &label("1 2' 2 1'"));
        assert_eq!(
            small.relations.iter().collect::<Vec<_>>(),
            vec![&RectRelation::gt(1, 2, 2, 1)]
        );

        let report = locate_cells(&mat(&[&[0, 0], &[0, 0]]), None).unwrap();
        assert!(report.interior_of.is_none());
        let keys: Vec<String> =
            report.closed_containers.iter().map(|c| c.key().to_string()).collect();
        assert_eq!(keys, vec!["1 1' 2 2'", "1 1' 2' 2", "1 2' 2 1'"]);

        let report = locate_cells(&mat(&[&[3, 1], &[0, 2]]), None).unwrap();
        assert_eq!(report.interior_of.unwrap().key(), &label("1 1' 2 2'"));
    }

    #[test]
    fn canonical_cell_spec_examples() {
        let base = canonical_cell(&label("1 1' 2 2'"), None).unwrap();
        let negated = canonical_cell(&label("2' 2 1' 1"), None).unwrap();
        let sibling = canonical_cell(&label("2 2' 1 1'"), None).unwrap();
        let opposite = canonical_cell(&label("1 2' 2 1'"), None).unwrap();
        assert_eq!(base, negated);
        assert_eq!(base, sibling);
        assert_ne!(base.key(), opposite.key());
        assert_eq!(base.key(), &label("1 1' 2 2'"));
        assert_eq!(base.representatives.len(), 4);

        let flat = canonical_cell(&label("1 2 1' 2'"), None).unwrap();
        assert_eq!(flat.size_class, SizeClass::NotMaximal);
        assert_eq!(flat.representatives, vec![label("1 2 1' 2'"), label("1' 2' 1 2")]);
    }

    #[test]
    fn large_parent_spec_examples() {
        let (parent, warned) = large_parent(&label("1' 1 2' 2")).unwrap();
        assert_eq!(parent, label("1 1' 2' 2"));
        assert!(!warned);

        let (parent, warned) = large_parent(&label("1 1' 2' 2 3'")).unwrap();
        assert_eq!(parent, label("1 1' 2' 3' 2"));
        assert!(!warned);

        let (parent, warned) = large_parent(&label("1 1' 2' 2")).unwrap();
        assert_eq!(parent, label("1 1' 2' 2"));
        assert!(warned);

        assert!(matches!(
            large_parent(&label("1 2 1' 2'")),
            Err(CellsError::NotMaximalRegion(_))
        ));
    }

    #[test]
    fn small_children_spec_examples() {
        let children = small_children(&label("1 1' 2' 2")).unwrap();
        assert_eq!(children, vec![label("1' 1 2' 2"), label("2' 1 1' 2")]);

        // Second block of size 2, second-to-last of size 3: 6 children.
        let parent = label("1 1' 2' 2 3 4 3'");
        assert_eq!(cell_size_class(&parent), SizeClass::Large);
        let children = small_children(&parent).unwrap();
        assert_eq!(children.len(), 6);
        let parent_rels = relations_v2(&diagram_of(&parent));
        for child in &children {
            assert_eq!(cell_size_class(child), SizeClass::Small);
            let child_rels = relations_v2(&diagram_of(child));
            assert!(closed_implies(&child_rels, &parent_rels, 4, 3).unwrap());
        }

        assert!(matches!(
            small_children(&label("1 1' 2 2'")),
            Err(CellsError::NotLarge(_))
        ));
    }

    #[test]
    fn children_interiors_are_disjoint_and_cover_the_parent() {
        let parent = label("1 1' 2' 2");
        let children = small_children(&parent).unwrap();
        let systems: Vec<BTreeSet<RectRelation>> = children
            .iter()
            .map(|c| relations_v2(&diagram_of(c)))
            .collect();
        for i in 0..systems.len() {
            for j in i + 1..systems.len() {
                let mut sys = system_from(&systems[i], 2, 2, Mode::Open).unwrap();
                let other = system_from(&systems[j], 2, 2, Mode::Open).unwrap();
                sys.extend_from(&other).unwrap();
                assert!(!is_feasible(&sys).unwrap());
            }
        }
        let parent_rels = relations_v2(&diagram_of(&parent));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut covered = 0;
        for _ in 0..200 {
            let p = sample_param(&mut rng, 2, 2);
            let g = eval_g(&p);
            if !parent_rels.iter().all(|rel| rel.holds(&g, true)) {
                continue;
            }
            covered += 1;
            assert!(
                systems.iter().any(|s| s.iter().all(|rel| rel.holds(&g, true))),
                "point of the parent closure escapes every child"
            );
        }
        assert!(covered > 20, "sampling missed the parent cell");
    }

    #[test]
    fn recover_round_trips_every_large_region_of_3_3() {
        let mut larges = 0;
        for l in enumerate_regions(3, 3) {
            if cell_size_class(&l) != SizeClass::Large {
                continue;
            }
            larges += 1;
            let eqs = span_equalities(&diagram_of(&l));
            let recovered = recover_region_from_span(&eqs, 3, 3, None).unwrap();
            assert!(
                recovered.contains(&l) || recovered.contains(&l.negate()),
                "span of {l} recovered {recovered:?}"
            );
            for cand in &recovered {
                assert_eq!(span_equalities(&diagram_of(cand)), eqs);
            }
        }
        assert_eq!(larges, 18);
    }

    #[test]
    fn recover_handles_the_empty_span_and_rejects_garbage() {
        let family = recover_region_from_span(&BTreeSet::new(), 2, 2, None).unwrap();
        assert_eq!(
            family,
            vec![
                label("1 1' 2' 2"),
                label("1' 1 2 2'"),
                label("2 1' 2' 1"),
                label("2' 1 2 1'"),
            ]
        );

        let mut bogus = BTreeSet::new();
        bogus.insert(RectRelation::eq(1, 2, 1, 2));
        assert_eq!(
            recover_region_from_span(&bogus, 2, 2, None),
            Err(CellsError::NoRegionFound)
        );
    }

    #[test]
    fn decide_accepts_image_points_and_rejects_the_cocircuit() {
        let zeros = mat(&[&[0, 0], &[0, 0]]);
        match barvinok2_decide(&zeros, None).unwrap() {
            Decision::Yes { witness_region, preimage } => {
                assert_eq!(witness_region, label("1 2 1' 2'"));
                assert_eq!(eval_g(&preimage), zeros);
            }
            Decision::No => panic!("the zero matrix is an image point"),
        }

        let p = ParamPoint::new(
            vec![rat(1), rat(3), rat(0)],
            vec![rat(3), rat(0), rat(2)],
            vec![rat(3), rat(0), rat(1)],
            vec![rat(0), rat(2), rat(5)],
        )
        .unwrap();
        let g = eval_g(&p);
        match barvinok2_decide(&g, None).unwrap() {
            Decision::Yes { preimage, .. } => assert_eq!(eval_g(&preimage), g),
            Decision::No => panic!("an evaluated point must be accepted"),
        }

        let cocircuit = mat(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
        assert_eq!(barvinok2_decide(&cocircuit, None).unwrap(), Decision::No);
    }

    #[test]
    fn verify_subdivision_at_2_2_and_2_3() {
        let report = verify_subdivision(2, 2, 100, 11, None).unwrap();
        assert_eq!(report.small_cells, 2);
        assert_eq!(report.large_cells, 1);
        assert!(report.passed(), "{:?}", report.checks);

        let report = verify_subdivision(2, 3, 60, 12, None).unwrap();
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn count_cells_spec_examples() {
        let small = count_cells(2, 2, SizeClass::Small, None).unwrap();
        assert_eq!(small.distinct_images, 2);
        assert_eq!(small.positive_regions, 4);

        let large = count_cells(2, 2, SizeClass::Large, None).unwrap();
        assert_eq!(large.distinct_images, 1);
        assert_eq!(large.positive_regions, 2);

        let degenerate = count_cells(1, 2, SizeClass::Small, None).unwrap();
        assert_eq!(degenerate.distinct_images, 0);
    }

    #[test]
    fn budget_is_enforced() {
        match CellComplex::build(2, 2, Some(5)) {
            Err(CellsError::BudgetExceeded { budget: 5 }) => {}
            other => panic!("expected a budget error, got {:?}", other.map(|c| c.cells.len())),
        }
    }

    #[test]
    fn canonical_cell_is_negation_invariant_up_to_3_3() {
        for (m, n) in [(2, 2), (2, 3), (3, 3)] {
            let complex = CellComplex::build(m, n, None).unwrap();
            for l in enumerate_regions(m, n) {
                if cell_size_class(&l) == SizeClass::NotMaximal {
                    continue;
                }
                let a = complex.cell_of(&l).unwrap();
                let b = complex.cell_of(&l.negate()).unwrap();
                assert_eq!(a.key(), b.key(), "negation moved {l} across cells");
            }
        }
    }

    #[test]
    fn pair_index_is_a_bijection() {
        let mut seen = BTreeSet::new();
        for a in 1..=4 {
            for b in a + 1..=4 {
                assert!(seen.insert(pair_index(a, b, 4)));
            }
        }
        assert_eq!(seen.len(), pair_count(4));
        assert_eq!(*seen.iter().max().unwrap(), pair_count(4) - 1);
        let _ = Letter::pos(1);
    }
}
