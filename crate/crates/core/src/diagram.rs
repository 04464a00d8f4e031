//! Black/white diagrams of regions and the rectangle relations cutting out
//! the image of a region under the morphism.
//!
//! Permuting the rows of the matrix g into the order the positive letters
//! appear in a region label, and the columns into the order the negative
//! letters appear, paints each entry black (the min is attained by
//! A_i + B_j, i.e. the column letter precedes the row letter) or white
//! (attained by a_i + b_j).  Black entries form a staircase anchored at
//! the southwest corner, separated from the white ones by a monotone
//! lattice path that walks the label: one south step per positive letter,
//! one east step per negative letter.
//!
//! The image of a region is cut out by *rectangle relations*
//! Delta_{i1 i2 j1 j2}(g) = g_{i1 j1} + g_{i2 j2} - g_{i1 j2} - g_{i2 j1}
//! compared against 0, produced here in two equivalent forms: from the
//! interleaving patterns of the label (version 1) and from the box
//! classification of the diagram (version 2).

use crate::arrangement::{RegionLabel, Sign};
use crate::ratcore::{rat, Rat, RatMatrix};
use std::collections::BTreeSet;
use std::fmt;

/// One step of the separating lattice path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    South,
    East,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramError(pub String);

impl fmt::Display for DiagramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rectangle: {}", self.0)
    }
}

impl std::error::Error for DiagramError {}

/// The colored, permuted grid of a region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    /// Positive letters in order of first appearance in the label.
    row_order: Vec<usize>,
    /// Negative letters in order of first appearance.
    col_order: Vec<usize>,
    /// Row-major colors over (diagram row, diagram col); true = black.
    black: Vec<bool>,
    path: Vec<Step>,
}

impl Diagram {
    pub fn m(&self) -> usize {
        self.row_order.len()
    }

    pub fn n(&self) -> usize {
        self.col_order.len()
    }

    pub fn row_order(&self) -> &[usize] {
        &self.row_order
    }

    pub fn col_order(&self) -> &[usize] {
        &self.col_order
    }

    pub fn path(&self) -> &[Step] {
        &self.path
    }

    pub fn path_string(&self) -> String {
        self.path
            .iter()
            .map(|s| match s {
                Step::South => 'S',
                Step::East => 'E',
            })
            .collect()
    }

    /// Color at 0-based diagram coordinates; true = black.
    pub fn is_black(&self, row: usize, col: usize) -> bool {
        self.black[row * self.n() + col]
    }

    /// Original matrix row index at a 0-based diagram row.
    pub fn row_letter(&self, row: usize) -> usize {
        self.row_order[row]
    }

    /// Original matrix column index at a 0-based diagram column.
    pub fn col_letter(&self, col: usize) -> usize {
        self.col_order[col]
    }

    /// Diagram position of an original row index.
    pub fn row_position(&self, letter: usize) -> Option<usize> {
        self.row_order.iter().position(|&l| l == letter)
    }

    /// Diagram position of an original column index.
    pub fn col_position(&self, letter: usize) -> Option<usize> {
        self.col_order.iter().position(|&l| l == letter)
    }

    /// Number of black entries at the start of a diagram row.  Rows of a
    /// region diagram are a black prefix followed by a white suffix, and
    /// the prefix lengths never decrease going down.
    pub fn black_prefix(&self, row: usize) -> usize {
        (0..self.n()).take_while(|&c| self.is_black(row, c)).count()
    }

    /// Builds a rectangle from original indices, checking diagram order.
    pub fn rect(
        &self,
        row_a: usize,
        row_b: usize,
        col_a: usize,
        col_b: usize,
    ) -> Result<Rect, DiagramError> {
        let ra = self
            .row_position(row_a)
            .ok_or_else(|| DiagramError(format!("row {row_a} not in diagram")))?;
        let rb = self
            .row_position(row_b)
            .ok_or_else(|| DiagramError(format!("row {row_b} not in diagram")))?;
        let ca = self
            .col_position(col_a)
            .ok_or_else(|| DiagramError(format!("column {col_a} not in diagram")))?;
        let cb = self
            .col_position(col_b)
            .ok_or_else(|| DiagramError(format!("column {col_b} not in diagram")))?;
        if ra >= rb {
            return Err(DiagramError(format!(
                "row {row_a} does not precede row {row_b} in diagram order"
            )));
        }
        if ca >= cb {
            return Err(DiagramError(format!(
                "column {col_a} does not precede column {col_b} in diagram order"
            )));
        }
        Ok(Rect { row_a, row_b, col_a, col_b })
    }

    /// Classifies the full sub-grid spanned by a rectangle, including all
    /// intermediate rows and columns.
    pub fn classify(&self, rect: &Rect) -> RectClass {
        let r1 = self.row_position(rect.row_a).expect("rect rows belong to diagram");
        let r2 = self.row_position(rect.row_b).expect("rect rows belong to diagram");
        let c1 = self.col_position(rect.col_a).expect("rect cols belong to diagram");
        let c2 = self.col_position(rect.col_b).expect("rect cols belong to diagram");
        self.classify_span(r1, r2, c1, c2)
    }

    /// Classification over 0-based diagram coordinate ranges.
    fn classify_span(&self, r1: usize, r2: usize, c1: usize, c2: usize) -> RectClass {
        let first = self.is_black(r1, c1);
        if (r1..=r2).all(|r| (c1..=c2).all(|c| self.is_black(r, c) == first)) {
            return RectClass::Monochromatic;
        }
        // One vertical cut: all rows show the same pattern and that
        // pattern switches color exactly once.
        let vertical = (r1 + 1..=r2)
            .all(|r| (c1..=c2).all(|c| self.is_black(r, c) == self.is_black(r1, c)))
            && color_changes((c1..=c2).map(|c| self.is_black(r1, c))) == 1;
        if vertical {
            return RectClass::Sliced;
        }
        let horizontal = (c1 + 1..=c2)
            .all(|c| (r1..=r2).all(|r| self.is_black(r, c) == self.is_black(r, c1)))
            && color_changes((r1..=r2).map(|r| self.is_black(r, c1))) == 1;
        if horizontal {
            return RectClass::Sliced;
        }
        RectClass::Jagged
    }

    /// Text rendering: column headers, a B/W grid with row headers, and
    /// the separating path.
    pub fn render_text(&self) -> String {
        let row_headers: Vec<String> = self.row_order.iter().map(|l| l.to_string()).collect();
        let col_headers: Vec<String> = self.col_order.iter().map(|l| format!("{l}'")).collect();
        let rw = row_headers.iter().map(|h| h.len()).max().unwrap_or(1);
        let cw = col_headers.iter().map(|h| h.len()).max().unwrap_or(1);
        let mut out = String::new();
        out.push_str(&" ".repeat(rw));
        for h in &col_headers {
            out.push(' ');
            out.push_str(&format!("{h:>cw$}"));
        }
        out.push('\n');
        for (r, h) in row_headers.iter().enumerate() {
            out.push_str(&format!("{h:>rw$}"));
            for c in 0..self.n() {
                let ch = if self.is_black(r, c) { 'B' } else { 'W' };
                out.push(' ');
                out.push_str(&format!("{ch:>cw$}"));
            }
            out.push('\n');
        }
        out.push_str("path: ");
        out.push_str(&self.path_string());
        out.push('\n');
        out
    }
}

fn color_changes<I: Iterator<Item = bool>>(mut colors: I) -> usize {
    let Some(mut prev) = colors.next() else { return 0 };
    let mut changes = 0;
    for c in colors {
        if c != prev {
            changes += 1;
            prev = c;
        }
    }
    changes
}

/// Builds the diagram of a region.
pub fn diagram_of(r: &RegionLabel) -> Diagram {
    let mut row_order = Vec::with_capacity(r.m());
    let mut col_order = Vec::with_capacity(r.n());
    let mut path = Vec::with_capacity(r.m() + r.n());
    for l in r.letters() {
        match l.sign {
            Sign::Pos => {
                row_order.push(l.index);
                path.push(Step::South);
            }
            Sign::Neg => {
                col_order.push(l.index);
                path.push(Step::East);
            }
        }
    }
    let mut black = vec![false; r.m() * r.n()];
    for (dr, &i) in row_order.iter().enumerate() {
        for (dc, &j) in col_order.iter().enumerate() {
            black[dr * r.n() + dc] = r.precedes(
                crate::arrangement::Letter::neg(j),
                crate::arrangement::Letter::pos(i),
            );
        }
    }
    Diagram { row_order, col_order, black, path }
}

/// Two rows and two columns of a diagram, named by original indices;
/// `row_a` precedes `row_b` in diagram order, and likewise the columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub row_a: usize,
    pub row_b: usize,
    pub col_a: usize,
    pub col_b: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RectClass {
    Monochromatic,
    Sliced,
    Jagged,
}

/// Free-function form of `Diagram::classify`.
pub fn classify_rect(d: &Diagram, rect: &Rect) -> RectClass {
    d.classify(rect)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelKind {
    Eq,
    Gt,
}

/// A rectangle relation Delta_{i1 i2 j1 j2}(g) = 0 or > 0, in original
/// matrix indices.
///
/// Delta is unchanged by swapping both index pairs at once, so relations
/// are stored in a canonical spelling: i1 < i2 always (double-swapping if
/// needed), and for equalities (where single swaps only negate a zero)
/// j1 < j2 as well.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RectRelation {
    pub i1: usize,
    pub i2: usize,
    pub j1: usize,
    pub j2: usize,
    pub kind: RelKind,
}

impl RectRelation {
    pub fn eq(i1: usize, i2: usize, j1: usize, j2: usize) -> RectRelation {
        assert!(i1 != i2 && j1 != j2 && i1 > 0 && j1 > 0 && i2 > 0 && j2 > 0);
        RectRelation {
            i1: i1.min(i2),
            i2: i1.max(i2),
            j1: j1.min(j2),
            j2: j1.max(j2),
            kind: RelKind::Eq,
        }
    }

    pub fn gt(i1: usize, i2: usize, j1: usize, j2: usize) -> RectRelation {
        assert!(i1 != i2 && j1 != j2 && i1 > 0 && j1 > 0 && i2 > 0 && j2 > 0);
        if i1 < i2 {
            RectRelation { i1, i2, j1, j2, kind: RelKind::Gt }
        } else {
            RectRelation { i1: i2, i2: i1, j1: j2, j2: j1, kind: RelKind::Gt }
        }
    }

    /// Delta value on a concrete matrix (indices 1-based).
    pub fn eval(&self, g: &RatMatrix) -> Rat {
        g.get(self.i1 - 1, self.j1 - 1).clone() + g.get(self.i2 - 1, self.j2 - 1)
            - g.get(self.i1 - 1, self.j2 - 1)
            - g.get(self.i2 - 1, self.j1 - 1)
    }

    /// Whether a matrix satisfies the relation; closed mode weakens > to >=.
    pub fn holds(&self, g: &RatMatrix, closed: bool) -> bool {
        let v = self.eval(g);
        match self.kind {
            RelKind::Eq => v == rat(0),
            RelKind::Gt if closed => v >= rat(0),
            RelKind::Gt => v > rat(0),
        }
    }

    /// The relation's linear form as coefficients over the m*n matrix
    /// entries, row-major: +1 at (i1,j1), (i2,j2) and -1 at (i1,j2),
    /// (i2,j1).
    pub fn coeffs(&self, m: usize, n: usize) -> Vec<Rat> {
        assert!(self.i1 <= m && self.i2 <= m && self.j1 <= n && self.j2 <= n);
        let mut v = vec![rat(0); m * n];
        v[(self.i1 - 1) * n + (self.j1 - 1)] = rat(1);
        v[(self.i2 - 1) * n + (self.j2 - 1)] = rat(1);
        v[(self.i1 - 1) * n + (self.j2 - 1)] = rat(-1);
        v[(self.i2 - 1) * n + (self.j1 - 1)] = rat(-1);
        v
    }
}

impl fmt::Display for RectRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            RelKind::Eq => "= 0",
            RelKind::Gt => "> 0",
        };
        write!(f, "Delta({},{};{},{}) {}", self.i1, self.i2, self.j1, self.j2, op)
    }
}

/// Image relations of a region, read from the interleaving patterns of its
/// label: for a pair of positive letters (i1 earlier, i2 later) and a pair
/// of negative letters (j1 earlier, j2 later),
///
/// * both positives before both negatives, or after: Delta = 0;
/// * i1 j1 i2 j2 or j1 i1 j2 i2: Delta > 0;
/// * i1 j1 j2 i2 with a positive letter strictly between j1 and j2, or
///   j1 i1 i2 j2 with a negative letter strictly between i1 and i2:
///   Delta > 0;
///
/// and nothing otherwise.
pub fn relations_v1(r: &RegionLabel) -> BTreeSet<RectRelation> {
    use crate::arrangement::Letter;
    let mut out = BTreeSet::new();
    for p1 in 1..=r.m() {
        for p2 in p1 + 1..=r.m() {
            let (pa, pb) = (r.position(Letter::pos(p1)), r.position(Letter::pos(p2)));
            // i1 = earlier positive in the label.
            let (i1, i2, pi1, pi2) = if pa < pb { (p1, p2, pa, pb) } else { (p2, p1, pb, pa) };
            for q1 in 1..=r.n() {
                for q2 in q1 + 1..=r.n() {
                    let (qa, qb) =
                        (r.position(Letter::neg(q1)), r.position(Letter::neg(q2)));
                    let (j1, j2, pj1, pj2) =
                        if qa < qb { (q1, q2, qa, qb) } else { (q2, q1, qb, qa) };
                    let rel = if pi2 < pj1 || pj2 < pi1 {
                        // All positives on one side of all negatives.
                        Some(RectRelation::eq(i1, i2, j1, j2))
                    } else if pi1 < pj1 && pj1 < pi2 && pi2 < pj2 {
                        Some(RectRelation::gt(i1, i2, j1, j2))
                    } else if pj1 < pi1 && pi1 < pj2 && pj2 < pi2 {
                        Some(RectRelation::gt(i1, i2, j1, j2))
                    } else if pi1 < pj1 && pj2 < pi2 {
                        // i1 j1 j2 i2: needs a positive strictly between j1, j2.
                        let found = r.letters()[pj1 + 1..pj2]
                            .iter()
                            .any(|l| l.sign == Sign::Pos);
                        found.then(|| RectRelation::gt(i1, i2, j1, j2))
                    } else if pj1 < pi1 && pi2 < pj2 {
                        // j1 i1 i2 j2: needs a negative strictly between i1, i2.
                        let found = r.letters()[pi1 + 1..pi2]
                            .iter()
                            .any(|l| l.sign == Sign::Neg);
                        found.then(|| RectRelation::gt(i1, i2, j1, j2))
                    } else {
                        unreachable!("the six patterns cover all interleavings")
                    };
                    if let Some(rel) = rel {
                        out.insert(rel);
                    }
                }
            }
        }
    }
    out
}

/// Image relations of a region, read from its diagram: for every choice of
/// two diagram rows and two diagram columns, the spanned box (all
/// intermediate entries included) contributes Delta = 0 if monochromatic,
/// Delta > 0 if jagged, and nothing if sliced.
pub fn relations_v2(d: &Diagram) -> BTreeSet<RectRelation> {
    let mut out = BTreeSet::new();
    for r1 in 0..d.m() {
        for r2 in r1 + 1..d.m() {
            for c1 in 0..d.n() {
                for c2 in c1 + 1..d.n() {
                    let (i1, i2) = (d.row_letter(r1), d.row_letter(r2));
                    let (j1, j2) = (d.col_letter(c1), d.col_letter(c2));
                    match d.classify_span(r1, r2, c1, c2) {
                        RectClass::Monochromatic => {
                            out.insert(RectRelation::eq(i1, i2, j1, j2));
                        }
                        RectClass::Jagged => {
                            out.insert(RectRelation::gt(i1, i2, j1, j2));
                        }
                        RectClass::Sliced => {}
                    }
                }
            }
        }
    }
    out
}

/// Equalities spanning the affine hull of the image: one per quadruple
/// whose four *corner* entries share a color (intermediate entries play no
/// role here, unlike the box classification).
pub fn span_equalities(d: &Diagram) -> BTreeSet<RectRelation> {
    let mut out = BTreeSet::new();
    for r1 in 0..d.m() {
        for r2 in r1 + 1..d.m() {
            for c1 in 0..d.n() {
                for c2 in c1 + 1..d.n() {
                    let corners = [
                        d.is_black(r1, c1),
                        d.is_black(r1, c2),
                        d.is_black(r2, c1),
                        d.is_black(r2, c2),
                    ];
                    if corners.iter().all(|&b| b == corners[0]) {
                        out.insert(RectRelation::eq(
                            d.row_letter(r1),
                            d.row_letter(r2),
                            d.col_letter(c1),
                            d.col_letter(c2),
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Dimension of the image of a region: 2m + 2n - 2 - first - last, except
/// for the two regions whose label is a single positive block followed by
/// a single negative block or vice versa, whose image has dimension
/// m + n - 1.
pub fn image_dimension(r: &RegionLabel) -> usize {
    let (m, n) = (r.m(), r.n());
    if m == 0 || n == 0 {
        return 0;
    }
    let stats = r.block_stats();
    if stats.blocks == [(Sign::Pos, m), (Sign::Neg, n)]
        || stats.blocks == [(Sign::Neg, n), (Sign::Pos, m)]
    {
        return m + n - 1;
    }
    2 * m + 2 * n - 2 - stats.first - stats.last
}

/// Size class of the cell that the closure of a region's image forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SizeClass {
    NotMaximal,
    Small,
    Medium,
    Large,
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SizeClass::NotMaximal => "notMaximal",
            SizeClass::Small => "small",
            SizeClass::Medium => "medium",
            SizeClass::Large => "large",
        };
        write!(f, "{s}")
    }
}

/// Classifies a region by its block profile: images of maximal dimension
/// need singleton first and last blocks; among those, the second and
/// second-to-last blocks (possibly one and the same) decide small (both
/// singletons), large (both bigger), or medium (one of each).
pub fn cell_size_class(r: &RegionLabel) -> SizeClass {
    let stats = r.block_stats();
    if stats.first != 1 || stats.last != 1 {
        return SizeClass::NotMaximal;
    }
    let k = stats.blocks.len();
    if k < 2 {
        return SizeClass::Small;
    }
    let second = stats.blocks[1].1;
    let second_last = stats.blocks[k - 2].1;
    match (second == 1, second_last == 1) {
        (true, true) => SizeClass::Small,
        (false, false) => SizeClass::Large,
        _ => SizeClass::Medium,
    }
}
