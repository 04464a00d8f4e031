//! The arrangement of hyperplanes x_i = y_j in R^m x R^n.
//!
//! A point off every hyperplane induces a total order on the coordinates
//! x_1..x_m, y_1..y_n, recorded as a *region label*: a word in the letters
//! `1..m` (positive, for the x side) and `1'..n'` (negative, for the y
//! side).  Coordinates of the same sign are never separated by a
//! hyperplane, so their relative order is not meaningful; labels are kept
//! canonical by sorting every maximal same-sign run ascending.  Faces of
//! the arrangement carry *face labels*: ordered partitions of the letters
//! into blocks, where a block mixing both signs records equalities
//! x_i = y_j.
//!
//! Regions are in bijection with acyclic orientations of the complete
//! bipartite graph K_{m,n}: orient u_i -> v_j exactly when x_i < y_j.

use crate::ratcore::Rat;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Which side of the arrangement a letter lives on: positive letters are
/// the x coordinates, negative letters (written with a prime) the y side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// One letter of a label; `index` is 1-based.  Letters order by index with
/// the positive letter first at equal index, so `1 < 1' < 2 < 2' < ...`;
/// this is the order used for lexicographic comparisons of labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub index: usize,
    pub sign: Sign,
}

impl Letter {
    pub fn pos(index: usize) -> Letter {
        Letter { index, sign: Sign::Pos }
    }

    pub fn neg(index: usize) -> Letter {
        Letter { index, sign: Sign::Neg }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Pos => write!(f, "{}", self.index),
            Sign::Neg => write!(f, "{}'", self.index),
        }
    }
}

/// Error for malformed label text or an invalid letter multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelError(pub String);

impl fmt::Display for LabelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid label: {}", self.0)
    }
}

impl std::error::Error for LabelError {}

/// A region of the arrangement, as a canonical word over the letters.
///
/// Invariants: every positive letter 1..m and negative letter 1'..n'
/// occurs exactly once, and within every maximal same-sign run the indices
/// ascend.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionLabel {
    m: usize,
    n: usize,
    letters: Vec<Letter>,
}

/// A maximal same-sign run of a region label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub sign: Sign,
    pub indices: Vec<usize>,
}

/// Summary of a region label's block structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStats {
    /// Size of the first run.
    pub first: usize,
    /// Size of the last run.
    pub last: usize,
    /// Sign and size of every run, in order.
    pub blocks: Vec<(Sign, usize)>,
}

impl RegionLabel {
    /// Builds a label from a letter sequence, sorting each same-sign run
    /// ascending and validating that the letters are exactly 1..m and
    /// 1'..n', each once.
    pub fn new(m: usize, n: usize, letters: Vec<Letter>) -> Result<RegionLabel, LabelError> {
        let letters = normalize_runs(letters);
        validate_letters(m, n, &letters)?;
        Ok(RegionLabel { m, n, letters })
    }

    /// Parses a space-separated word such as `"2' 4' 3 1' 1 2 3' 5'"`,
    /// inferring m and n from the letters present.
    pub fn parse(text: &str) -> Result<RegionLabel, LabelError> {
        let letters = parse_letters(text)?;
        if letters.is_empty() {
            return Err(LabelError("empty label".into()));
        }
        let m = letters.iter().filter(|l| l.sign == Sign::Pos).count();
        let n = letters.len() - m;
        RegionLabel::new(m, n, letters)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Sequence position of a letter; panics if absent.
    pub fn position(&self, letter: Letter) -> usize {
        self.letters
            .iter()
            .position(|&l| l == letter)
            .expect("letter not in label")
    }

    /// True when `a` appears strictly before `b`.
    pub fn precedes(&self, a: Letter, b: Letter) -> bool {
        self.position(a) < self.position(b)
    }

    /// Maximal same-sign runs, in order.
    pub fn runs(&self) -> Vec<Run> {
        let mut out: Vec<Run> = Vec::new();
        for &l in &self.letters {
            match out.last_mut() {
                Some(run) if run.sign == l.sign => run.indices.push(l.index),
                _ => out.push(Run { sign: l.sign, indices: vec![l.index] }),
            }
        }
        out
    }

    /// Sizes of the first and last runs plus the full run profile.
    pub fn block_stats(&self) -> BlockStats {
        let runs = self.runs();
        BlockStats {
            first: runs.first().map_or(0, |r| r.indices.len()),
            last: runs.last().map_or(0, |r| r.indices.len()),
            blocks: runs.iter().map(|r| (r.sign, r.indices.len())).collect(),
        }
    }

    /// The region reached by negating every coordinate: the letter word
    /// reversed, then renormalized.
    pub fn negate(&self) -> RegionLabel {
        let mut letters = self.letters.clone();
        letters.reverse();
        RegionLabel {
            m: self.m,
            n: self.n,
            letters: normalize_runs(letters),
        }
    }

    /// True when letter `1` appears before letter `1'`.  Labels with m = 0
    /// or n = 0 count as positive.
    pub fn is_positive(&self) -> bool {
        if self.m == 0 || self.n == 0 {
            return true;
        }
        self.precedes(Letter::pos(1), Letter::neg(1))
    }

    /// The acyclic orientation of K_{m,n} associated to this region:
    /// u_i -> v_j exactly when `i` precedes `j'`.
    pub fn orientation(&self) -> Orientation {
        let mut positions_pos = vec![0usize; self.m];
        let mut positions_neg = vec![0usize; self.n];
        for (p, l) in self.letters.iter().enumerate() {
            match l.sign {
                Sign::Pos => positions_pos[l.index - 1] = p,
                Sign::Neg => positions_neg[l.index - 1] = p,
            }
        }
        let mut edges = vec![false; self.m * self.n];
        for i in 0..self.m {
            for j in 0..self.n {
                edges[i * self.n + j] = positions_pos[i] < positions_neg[j];
            }
        }
        Orientation { m: self.m, n: self.n, edges }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

fn normalize_runs(mut letters: Vec<Letter>) -> Vec<Letter> {
    let len = letters.len();
    let mut start = 0;
    while start < len {
        let sign = letters[start].sign;
        let mut end = start + 1;
        while end < len && letters[end].sign == sign {
            end += 1;
        }
        letters[start..end].sort_by_key(|l| l.index);
        start = end;
    }
    letters
}

fn validate_letters(m: usize, n: usize, letters: &[Letter]) -> Result<(), LabelError> {
    if letters.len() != m + n {
        return Err(LabelError(format!(
            "expected {} letters for shape ({m}, {n}), found {}",
            m + n,
            letters.len()
        )));
    }
    let mut seen_pos = vec![false; m];
    let mut seen_neg = vec![false; n];
    for l in letters {
        let seen = match l.sign {
            Sign::Pos => &mut seen_pos,
            Sign::Neg => &mut seen_neg,
        };
        if l.index == 0 || l.index > seen.len() {
            return Err(LabelError(format!("letter {l} out of range for shape ({m}, {n})")));
        }
        if seen[l.index - 1] {
            return Err(LabelError(format!("letter {l} repeated")));
        }
        seen[l.index - 1] = true;
    }
    Ok(())
}

fn parse_letters(text: &str) -> Result<Vec<Letter>, LabelError> {
    let mut letters = Vec::new();
    for token in text.split_whitespace() {
        letters.push(parse_letter(token)?);
    }
    Ok(letters)
}

fn parse_letter(token: &str) -> Result<Letter, LabelError> {
    let (digits, sign) = match token.strip_suffix('\'') {
        Some(head) => (head, Sign::Neg),
        None => (token, Sign::Pos),
    };
    let index: usize = digits
        .parse()
        .map_err(|_| LabelError(format!("malformed letter {token:?}")))?;
    if index == 0 {
        return Err(LabelError("letter indices are 1-based".into()));
    }
    Ok(Letter { index, sign })
}

/// A face of the arrangement: an ordered partition of the letters.  Blocks
/// containing both signs record equalities x_i = y_j; two consecutive
/// blocks are never unmixed of the same sign (they would merge).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceLabel {
    m: usize,
    n: usize,
    blocks: Vec<FaceBlock>,
}

/// One block of a face label; index lists are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceBlock {
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
}

impl FaceBlock {
    pub fn is_mixed(&self) -> bool {
        !self.pos.is_empty() && !self.neg.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    fn sign(&self) -> Option<Sign> {
        match (self.pos.is_empty(), self.neg.is_empty()) {
            (false, true) => Some(Sign::Pos),
            (true, false) => Some(Sign::Neg),
            _ => None,
        }
    }
}

impl FaceLabel {
    pub fn new(m: usize, n: usize, mut blocks: Vec<FaceBlock>) -> Result<FaceLabel, LabelError> {
        for b in &mut blocks {
            b.pos.sort_unstable();
            b.neg.sort_unstable();
            if b.is_empty() {
                return Err(LabelError("empty face block".into()));
            }
        }
        let letters: Vec<Letter> = blocks
            .iter()
            .flat_map(|b| {
                b.pos
                    .iter()
                    .map(|&i| Letter::pos(i))
                    .chain(b.neg.iter().map(|&j| Letter::neg(j)))
            })
            .collect();
        validate_letters(m, n, &letters)?;
        for pair in blocks.windows(2) {
            if let (Some(a), Some(b)) = (pair[0].sign(), pair[1].sign()) {
                if a == b {
                    return Err(LabelError(
                        "consecutive unmixed blocks of the same sign must merge".into(),
                    ));
                }
            }
        }
        Ok(FaceLabel { m, n, blocks })
    }

    /// Parses concatenated bracketed blocks such as
    /// `"[1 3] [2' 5' 7'] [5] [2 3' 6'] [1'] [6] [4 7 4'] [8']"`.
    pub fn parse(text: &str) -> Result<FaceLabel, LabelError> {
        let mut blocks = Vec::new();
        let mut rest = text.trim();
        if rest.is_empty() {
            return Err(LabelError("empty face label".into()));
        }
        while !rest.is_empty() {
            let Some(stripped) = rest.strip_prefix('[') else {
                return Err(LabelError(format!("expected '[' at {rest:?}")));
            };
            let Some(close) = stripped.find(']') else {
                return Err(LabelError("unbalanced '['".into()));
            };
            let inner = &stripped[..close];
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for l in parse_letters(inner)? {
                match l.sign {
                    Sign::Pos => pos.push(l.index),
                    Sign::Neg => neg.push(l.index),
                }
            }
            blocks.push(FaceBlock { pos, neg });
            rest = stripped[close + 1..].trim_start();
        }
        let m = blocks.iter().map(|b| b.pos.len()).sum();
        let n = blocks.iter().map(|b| b.neg.len()).sum();
        FaceLabel::new(m, n, blocks)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[FaceBlock] {
        &self.blocks
    }

    /// Dimension of the face: each unmixed block contributes its size and
    /// each mixed block contributes 1 (its letters share one value).
    pub fn dimension(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| if b.is_mixed() { 1 } else { b.len() })
            .sum()
    }

    /// True when no block is mixed, i.e. the face is a full region.
    pub fn is_region(&self) -> bool {
        self.blocks.iter().all(|b| !b.is_mixed())
    }
}

impl fmt::Display for FaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "[")?;
            let mut first = true;
            for &i in &b.pos {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", Letter::pos(i))?;
                first = false;
            }
            for &j in &b.neg {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", Letter::neg(j))?;
                first = false;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// An orientation of the complete bipartite graph K_{m,n}; entry (i, j) is
/// true when the edge points u_i -> v_j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    m: usize,
    n: usize,
    edges: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotAcyclic;

impl fmt::Display for NotAcyclic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "orientation contains a directed cycle")
    }
}

impl std::error::Error for NotAcyclic {}

impl Orientation {
    pub fn new(m: usize, n: usize, edges: Vec<bool>) -> Orientation {
        assert_eq!(edges.len(), m * n);
        Orientation { m, n, edges }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True when the edge between u_i and v_j points u -> v (1-based).
    pub fn toward_neg(&self, i: usize, j: usize) -> bool {
        self.edges[(i - 1) * self.n + (j - 1)]
    }

    /// Reconstructs the region whose comparison pattern equals this
    /// orientation, or reports a directed cycle.
    ///
    /// Letters are placed left to right: a positive letter is placeable
    /// when every negative letter preceding it (an in-neighbor) is already
    /// placed, and dually.  The greedy placement succeeds exactly on
    /// acyclic orientations; the result is verified by round-trip before
    /// being returned.
    pub fn region(&self) -> Result<RegionLabel, NotAcyclic> {
        let (m, n) = (self.m, self.n);
        let mut neg_before = vec![0usize; m]; // per positive letter
        let mut pos_before = vec![0usize; n]; // per negative letter
        for i in 0..m {
            for j in 0..n {
                if self.edges[i * n + j] {
                    pos_before[j] += 1;
                } else {
                    neg_before[i] += 1;
                }
            }
        }
        let mut letters = Vec::with_capacity(m + n);
        let mut placed_pos = 0usize;
        let mut placed_neg = 0usize;
        let mut done_pos = vec![false; m];
        let mut done_neg = vec![false; n];
        while letters.len() < m + n {
            let mut progressed = false;
            for i in 0..m {
                if !done_pos[i] && neg_before[i] == placed_neg {
                    done_pos[i] = true;
                    letters.push(Letter::pos(i + 1));
                    progressed = true;
                }
            }
            if progressed {
                placed_pos = done_pos.iter().filter(|&&d| d).count();
                continue;
            }
            for j in 0..n {
                if !done_neg[j] && pos_before[j] == placed_pos {
                    done_neg[j] = true;
                    letters.push(Letter::neg(j + 1));
                    progressed = true;
                }
            }
            if !progressed {
                return Err(NotAcyclic);
            }
            placed_neg = done_neg.iter().filter(|&&d| d).count();
        }
        let label = RegionLabel::new(m, n, letters).map_err(|_| NotAcyclic)?;
        if label.orientation() == *self {
            Ok(label)
        } else {
            Err(NotAcyclic)
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.region().is_ok()
    }
}

/// Counts acyclic orientations of K_{m,n} by scanning all 2^(m n) edge
/// direction patterns.  Only sensible for m * n <= ~20.
pub fn count_acyclic_orientations_brute(m: usize, n: usize) -> u64 {
    assert!(m * n <= 24, "brute-force orientation scan is limited to m*n <= 24");
    let total: u64 = 1 << (m * n);
    let mut count = 0;
    for mask in 0..total {
        let edges: Vec<bool> = (0..m * n).map(|b| mask >> b & 1 == 1).collect();
        if Orientation::new(m, n, edges).is_acyclic() {
            count += 1;
        }
    }
    count
}

/// An exact rational point of R^m x R^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XYPoint {
    pub x: Vec<Rat>,
    pub y: Vec<Rat>,
}

/// Point location failure: the point lies on the hyperplane x_i = y_j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnHyperplane {
    pub i: usize,
    pub j: usize,
}

impl fmt::Display for OnHyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "point lies on the hyperplane x_{} = y_{}; it has no region (use face location)",
            self.i, self.j
        )
    }
}

impl std::error::Error for OnHyperplane {}

/// Locates the open region containing a point with all x_i distinct from
/// all y_j; the first coincidence in row-major (i, j) order is reported.
pub fn region_of_point(p: &XYPoint) -> Result<RegionLabel, OnHyperplane> {
    for (i, xv) in p.x.iter().enumerate() {
        for (j, yv) in p.y.iter().enumerate() {
            if xv == yv {
                return Err(OnHyperplane { i: i + 1, j: j + 1 });
            }
        }
    }
    let mut keyed: Vec<(Rat, Letter)> = Vec::with_capacity(p.x.len() + p.y.len());
    for (i, v) in p.x.iter().enumerate() {
        keyed.push((v.clone(), Letter::pos(i + 1)));
    }
    for (j, v) in p.y.iter().enumerate() {
        keyed.push((v.clone(), Letter::neg(j + 1)));
    }
    keyed.sort_by(|a, b| match a.0.cmp(&b.0) {
        Ordering::Equal => a.1.cmp(&b.1),
        ord => ord,
    });
    let letters = keyed.into_iter().map(|(_, l)| l).collect();
    let label = RegionLabel::new(p.x.len(), p.y.len(), letters)
        .expect("sorted coordinates form a valid label");
    Ok(label)
}

/// Locates the face containing an arbitrary point: coordinates are grouped
/// by exact value, a group with both signs becomes a mixed block, and
/// adjacent single-sign groups of the same sign merge.
pub fn face_of_point(p: &XYPoint) -> FaceLabel {
    let mut groups: BTreeMap<Rat, FaceBlock> = BTreeMap::new();
    for (i, v) in p.x.iter().enumerate() {
        groups.entry(v.clone()).or_insert_with(|| FaceBlock { pos: vec![], neg: vec![] }).pos.push(i + 1);
    }
    for (j, v) in p.y.iter().enumerate() {
        groups.entry(v.clone()).or_insert_with(|| FaceBlock { pos: vec![], neg: vec![] }).neg.push(j + 1);
    }
    let mut blocks: Vec<FaceBlock> = Vec::new();
    for (_, g) in groups {
        match (blocks.last_mut(), g.sign()) {
            (Some(last), Some(sign)) if last.sign() == Some(sign) => match sign {
                Sign::Pos => last.pos.extend(g.pos),
                Sign::Neg => last.neg.extend(g.neg),
            },
            _ => blocks.push(g),
        }
    }
    FaceLabel::new(p.x.len(), p.y.len(), blocks).expect("grouped coordinates form a valid face")
}

/// Streams every region label of the (m, n) arrangement in lexicographic
/// order of the letter word (letter order `1 < 1' < 2 < 2' < ...`).
pub fn enumerate_regions(m: usize, n: usize) -> RegionIter {
    let mut alphabet = Vec::with_capacity(m + n);
    for idx in 1..=m.max(n) {
        if idx <= m {
            alphabet.push(Letter::pos(idx));
        }
        if idx <= n {
            alphabet.push(Letter::neg(idx));
        }
    }
    RegionIter {
        m,
        n,
        alphabet,
        path: Vec::new(),
        used: Vec::new(),
        cursor: vec![0],
        unused_pos: m,
        unused_neg: n,
        done: false,
    }
}

/// Depth-first enumeration of canonical letter words.
pub struct RegionIter {
    m: usize,
    n: usize,
    alphabet: Vec<Letter>,
    path: Vec<Letter>,
    used: Vec<bool>,
    /// cursor[d] = next alphabet position to try at depth d.
    cursor: Vec<usize>,
    unused_pos: usize,
    unused_neg: usize,
    done: bool,
}

impl RegionIter {
    fn admissible(&self, candidate: Letter) -> bool {
        if let Some(prev) = self.path.last() {
            if prev.sign == candidate.sign && candidate.index <= prev.index {
                return false;
            }
        }
        // Skipped same-sign letters need a later opposite-sign letter to
        // open a new run; without one the prefix is a dead end.
        let opposite = match candidate.sign {
            Sign::Pos => self.unused_neg,
            Sign::Neg => self.unused_pos,
        };
        if opposite > 0 {
            return true;
        }
        self.alphabet.iter().enumerate().all(|(k, l)| {
            self.used[k] || l.sign != candidate.sign || l.index >= candidate.index
        })
    }

    fn release(&mut self, letter: Letter) {
        let k = self.alphabet.iter().position(|&l| l == letter).unwrap();
        self.used[k] = false;
        match letter.sign {
            Sign::Pos => self.unused_pos += 1,
            Sign::Neg => self.unused_neg += 1,
        }
    }
}

impl Iterator for RegionIter {
    type Item = RegionLabel;

    fn next(&mut self) -> Option<RegionLabel> {
        if self.done {
            return None;
        }
        if self.used.is_empty() {
            self.used = vec![false; self.alphabet.len()];
            if self.alphabet.is_empty() {
                // The empty arrangement has exactly one (empty) region.
                self.done = true;
                return Some(RegionLabel { m: self.m, n: self.n, letters: vec![] });
            }
        }
        loop {
            let depth = self.path.len();
            let at = self.cursor[depth];
            let mut advanced = false;
            for k in at..self.alphabet.len() {
                if self.used[k] || !self.admissible(self.alphabet[k]) {
                    continue;
                }
                self.cursor[depth] = k + 1;
                self.used[k] = true;
                match self.alphabet[k].sign {
                    Sign::Pos => self.unused_pos -= 1,
                    Sign::Neg => self.unused_neg -= 1,
                }
                self.path.push(self.alphabet[k]);
                self.cursor.push(0);
                advanced = true;
                break;
            }
            if !advanced {
                // Exhausted this depth: backtrack.
                self.cursor.pop();
                match self.path.pop() {
                    None => {
                        self.done = true;
                        return None;
                    }
                    Some(letter) => {
                        self.release(letter);
                        continue;
                    }
                }
            }
            if self.path.len() == self.alphabet.len() {
                let label = RegionLabel {
                    m: self.m,
                    n: self.n,
                    letters: self.path.clone(),
                };
                // Emit, then backtrack one step so iteration continues.
                self.cursor.pop();
                let letter = self.path.pop().unwrap();
                self.release(letter);
                return Some(label);
            }
        }
    }
}

/// Streams every face label of the (m, n) arrangement exactly once, in a
/// deterministic order (blocks chosen by ascending letter bitmask).
/// Requires m, n <= 16.
pub fn enumerate_faces(m: usize, n: usize) -> FaceIter {
    assert!(m <= 16 && n <= 16, "face enumeration is limited to m, n <= 16");
    FaceIter {
        m,
        n,
        stack: vec![FaceFrame {
            rem_pos: mask_full(m),
            rem_neg: mask_full(n),
            prev_sign: None,
            sub_pos: 0,
            sub_neg: 0,
            exhausted: false,
        }],
        blocks: Vec::new(),
    }
}

fn mask_full(k: usize) -> u32 {
    if k == 0 {
        0
    } else {
        (1u32 << k) - 1
    }
}

fn mask_to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

struct FaceFrame {
    rem_pos: u32,
    rem_neg: u32,
    prev_sign: Option<Sign>,
    /// Current candidate submasks; iterated by incrementing sub_neg within
    /// sub_pos, each running over submasks of the remaining letters.
    sub_pos: u32,
    sub_neg: u32,
    exhausted: bool,
}

impl FaceFrame {
    /// Advances (sub_pos, sub_neg) to the next candidate pair in the
    /// deterministic submask order; returns false when exhausted.
    fn advance(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        loop {
            // Next sub_neg submask of rem_neg, in increasing-value order.
            self.sub_neg = ((self.sub_neg | !self.rem_neg).wrapping_add(1)) & self.rem_neg;
            if self.sub_neg == 0 {
                // Wrapped: step sub_pos.
                self.sub_pos = ((self.sub_pos | !self.rem_pos).wrapping_add(1)) & self.rem_pos;
                if self.sub_pos == 0 {
                    self.exhausted = true;
                    return false;
                }
            }
            if self.sub_pos == 0 && self.sub_neg == 0 {
                continue;
            }
            let sign = match (self.sub_pos != 0, self.sub_neg != 0) {
                (true, false) => Some(Sign::Pos),
                (false, true) => Some(Sign::Neg),
                _ => None,
            };
            if let (Some(prev), Some(cur)) = (self.prev_sign, sign) {
                if prev == cur {
                    continue;
                }
            }
            return true;
        }
    }
}

pub struct FaceIter {
    m: usize,
    n: usize,
    stack: Vec<FaceFrame>,
    blocks: Vec<FaceBlock>,
}

impl Iterator for FaceIter {
    type Item = FaceLabel;

    fn next(&mut self) -> Option<FaceLabel> {
        loop {
            let top = self.stack.last_mut()?;
            if top.rem_pos == 0 && top.rem_neg == 0 {
                let label = FaceLabel::new(self.m, self.n, self.blocks.clone())
                    .expect("enumeration only builds valid faces");
                self.stack.pop();
                self.blocks.pop();
                return Some(label);
            }
            if top.advance() {
                let sp = top.sub_pos;
                let sn = top.sub_neg;
                let rem_pos = top.rem_pos & !sp;
                let rem_neg = top.rem_neg & !sn;
                let block = FaceBlock {
                    pos: mask_to_indices(sp),
                    neg: mask_to_indices(sn),
                };
                let prev_sign = block.sign();
                self.blocks.push(block);
                self.stack.push(FaceFrame {
                    rem_pos,
                    rem_neg,
                    prev_sign,
                    sub_pos: 0,
                    sub_neg: 0,
                    exhausted: false,
                });
            } else {
                self.stack.pop();
                self.blocks.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::{rat, ratio};

    fn label(s: &str) -> RegionLabel {
        RegionLabel::parse(s).unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        let l = label("2' 4' 3 1' 1 2 3' 5'");
        assert_eq!(l.m(), 3);
        assert_eq!(l.n(), 5);
        assert_eq!(l.to_string(), "2' 4' 3 1' 1 2 3' 5'");
    }

    #[test]
    fn parse_normalizes_runs() {
        assert_eq!(label("2 1 1'").to_string(), "1 2 1'");
        assert_eq!(label("1' 3 1 2 2'").to_string(), "1' 1 2 3 2'");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(RegionLabel::parse("").is_err());
        assert!(RegionLabel::parse("1 1").is_err());
        assert!(RegionLabel::parse("1 3'").is_err()); // 3' out of range for n = 1
        assert!(RegionLabel::parse("0 1'").is_err());
        assert!(RegionLabel::parse("1 x'").is_err());
    }

    #[test]
    fn point_location_in_a_3_by_5_arrangement() {
        let p = XYPoint {
            x: vec![rat(4), ratio(9, 2), rat(2)],
            y: vec![rat(3), ratio(1, 2), rat(5), rat(1), rat(6)],
        };
        assert_eq!(region_of_point(&p).unwrap().to_string(), "2' 4' 3 1' 1 2 3' 5'");
    }

    #[test]
    fn point_location_smallest_cases() {
        let p = XYPoint { x: vec![rat(0)], y: vec![rat(1)] };
        assert_eq!(region_of_point(&p).unwrap().to_string(), "1 1'");
        let p = XYPoint { x: vec![rat(1)], y: vec![rat(0)] };
        assert_eq!(region_of_point(&p).unwrap().to_string(), "1' 1");
        let p = XYPoint { x: vec![rat(1)], y: vec![rat(1)] };
        assert_eq!(region_of_point(&p).unwrap_err(), OnHyperplane { i: 1, j: 1 });
    }

    #[test]
    fn face_location_merges_hyperplane_ties() {
        let p = XYPoint { x: vec![rat(1)], y: vec![rat(1)] };
        assert_eq!(face_of_point(&p).to_string(), "[1 1']");
        let p = XYPoint {
            x: vec![rat(1), rat(2)],
            y: vec![rat(1), rat(7)],
        };
        assert_eq!(face_of_point(&p).to_string(), "[1 1'] [2] [2']");
        // Same-sign values split by nothing collapse into one block.
        let p = XYPoint {
            x: vec![rat(1), rat(2)],
            y: vec![rat(7), rat(9)],
        };
        assert_eq!(face_of_point(&p).to_string(), "[1 2] [1' 2']");
    }

    #[test]
    fn face_dimension_of_published_example() {
        let f = FaceLabel::parse("[1 3] [2' 5' 7'] [5] [2 3' 6'] [1'] [6] [4 7 4'] [8']").unwrap();
        assert_eq!(f.m(), 7);
        assert_eq!(f.n(), 8);
        assert_eq!(f.dimension(), 11);
    }

    #[test]
    fn face_dimension_extremes() {
        // A region: all blocks unmixed, dimension m + n.
        let f = FaceLabel::parse("[1] [1'] [2] [2']").unwrap();
        assert_eq!(f.dimension(), 4);
        assert!(f.is_region());
        // Everything equal: one mixed block, dimension 1.
        let f = FaceLabel::parse("[1 2 1' 2']").unwrap();
        assert_eq!(f.dimension(), 1);
    }

    #[test]
    fn face_label_rejects_adjacent_same_sign_blocks() {
        assert!(FaceLabel::parse("[1] [2] [1']").is_err());
        assert!(FaceLabel::parse("[1 2] [1']").is_ok());
    }

    #[test]
    fn enumerate_regions_smallest_arrangements() {
        let r11: Vec<String> = enumerate_regions(1, 1).map(|l| l.to_string()).collect();
        assert_eq!(r11, vec!["1 1'", "1' 1"]);
        let r12: Vec<String> = enumerate_regions(1, 2).map(|l| l.to_string()).collect();
        assert_eq!(r12, vec!["1 1' 2'", "1' 1 2'", "1' 2' 1", "2' 1 1'"]);
        assert_eq!(enumerate_regions(2, 2).count(), 14);
        assert_eq!(enumerate_regions(0, 0).count(), 1);
        assert_eq!(enumerate_regions(2, 0).count(), 1);
    }

    #[test]
    fn enumeration_is_lexicographic_and_duplicate_free() {
        let all: Vec<RegionLabel> = enumerate_regions(2, 2).collect();
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(all, sorted);
    }

    #[test]
    fn enumerate_faces_small_counts() {
        // (1, 1): faces are "1 1'", "1' 1", and the diagonal, i.e. 3.
        assert_eq!(enumerate_faces(1, 1).count(), 3);
        // (1, 0) has the single face [1].
        let f10: Vec<String> = enumerate_faces(1, 0).map(|f| f.to_string()).collect();
        assert_eq!(f10, vec!["[1]"]);
        // Face counts refine region counts: top-dimensional faces are regions.
        let regions = enumerate_faces(2, 2).filter(|f| f.dimension() == 4).count();
        assert_eq!(regions, 14);
    }

    #[test]
    fn faces_are_unique() {
        let all: Vec<FaceLabel> = enumerate_faces(2, 2).collect();
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(all.len(), dedup.len());
    }

    #[test]
    fn negation_reverses_and_renormalizes() {
        assert_eq!(label("1 1' 2 2'").negate().to_string(), "2' 2 1' 1");
        assert_eq!(label("1 2 1' 2'").negate().to_string(), "1' 2' 1 2");
    }

    #[test]
    fn negation_is_an_involution() {
        for l in enumerate_regions(2, 3) {
            assert_eq!(l.negate().negate(), l);
        }
    }

    #[test]
    fn orientation_bijection_round_trips() {
        for l in enumerate_regions(2, 2).chain(enumerate_regions(3, 2)) {
            let o = l.orientation();
            assert_eq!(o.region().unwrap(), l);
        }
    }

    #[test]
    fn orientation_cycle_detected() {
        // u1 -> v1 -> u2 -> v2 -> u1.
        let o = Orientation::new(2, 2, vec![true, false, false, true]);
        assert_eq!(o.region(), Err(NotAcyclic));
    }

    #[test]
    fn acyclic_orientation_counts_match_region_counts() {
        for (m, n) in [(1, 1), (1, 3), (2, 2), (2, 3)] {
            let brute = count_acyclic_orientations_brute(m, n);
            let enumerated = enumerate_regions(m, n).count() as u64;
            assert_eq!(brute, enumerated, "shape ({m}, {n})");
        }
    }

    #[test]
    fn block_stats_of_examples() {
        let s = label("1 1' 2' 2").block_stats();
        assert_eq!(s.first, 1);
        assert_eq!(s.last, 1);
        assert_eq!(s.blocks, vec![(Sign::Pos, 1), (Sign::Neg, 2), (Sign::Pos, 1)]);
        let s = label("2' 4' 3 1' 1 2 3' 5'").block_stats();
        assert_eq!(s.first, 2);
        assert_eq!(s.last, 2);
        assert_eq!(
            s.blocks,
            vec![
                (Sign::Neg, 2),
                (Sign::Pos, 1),
                (Sign::Neg, 1),
                (Sign::Pos, 2),
                (Sign::Neg, 2)
            ]
        );
    }

    #[test]
    fn region_perturbation_keeps_its_label() {
        // Nudging every coordinate by distinct tiny amounts that do not
        // cross any hyperplane keeps the region label fixed.
        let p = XYPoint {
            x: vec![rat(4), ratio(9, 2), rat(2)],
            y: vec![rat(3), ratio(1, 2), rat(5), rat(1), rat(6)],
        };
        let base = region_of_point(&p).unwrap();
        let eps = ratio(1, 1000);
        let q = XYPoint {
            x: p.x.iter().map(|v| v + &eps).collect(),
            y: p.y.clone(),
        };
        assert_eq!(region_of_point(&q).unwrap(), base);
    }

    #[test]
    fn positivity_of_labels() {
        assert!(label("1 1' 2 2'").is_positive());
        assert!(!label("1' 1 2 2'").is_positive());
        assert!(label("2' 1 1' 2").is_positive());
    }
}
