use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt;

/// Exact rational number.  Always stored in lowest terms with a positive
/// denominator; `BigRational` maintains that invariant on construction.
pub type Rat = BigRational;

/// The rational `i/1`.
pub fn rat(i: i64) -> Rat {
    Rat::from_integer(BigInt::from(i))
}

/// The rational `p/q`.  Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Error parsing a rational from text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRatError(pub String);

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed rational {:?}: expected INT or INT/INT", self.0)
    }
}

impl std::error::Error for ParseRatError {}

/// Parses `"p"` or `"p/q"` with optional sign.  Floats are rejected.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let t = s.trim();
    let bad = || ParseRatError(s.to_string());
    if let Some((num, den)) = t.split_once('/') {
        let p: BigInt = num.trim().parse().map_err(|_| bad())?;
        let q: BigInt = den.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Ok(Rat::new(p, q))
    } else {
        let p: BigInt = t.parse().map_err(|_| bad())?;
        Ok(Rat::from_integer(p))
    }
}

/// Formats as `"p"` when the denominator is 1, else `"p/q"`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Dense matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    /// Zero matrix of the given shape.  Both dimensions must be positive.
    pub fn zero(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    /// Builds from a row-major vector of length `rows * cols`.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty());
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        RatMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Convenience constructor from machine integers, for tests.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    /// Largest absolute value among the entries.
    pub fn max_abs(&self) -> Rat {
        self.data
            .iter()
            .map(|v| v.abs())
            .max()
            .expect("matrix is nonempty")
    }

    /// Difference between the largest and smallest entry.
    pub fn spread(&self) -> Rat {
        let max = self.data.iter().max().expect("nonempty");
        let min = self.data.iter().min().expect("nonempty");
        max - min
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rat("7").unwrap(), rat(7));
        assert_eq!(parse_rat("-3").unwrap(), rat(-3));
        assert_eq!(parse_rat("9/2").unwrap(), ratio(9, 2));
        assert_eq!(parse_rat(" -6/4 ").unwrap(), ratio(-3, 2));
        assert!(parse_rat("1.5").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("").is_err());
    }

    #[test]
    fn formats_in_lowest_terms() {
        assert_eq!(format_rat(&ratio(6, 4)), "3/2");
        assert_eq!(format_rat(&ratio(-6, 3)), "-2");
        assert_eq!(format_rat(&Rat::zero()), "0");
    }

    #[test]
    fn matrix_accessors() {
        let m = RatMatrix::from_i64(&[&[3, 1], &[0, 2]]);
        assert_eq!(m.rows(), 2);
        assert_eq!(m.cols(), 2);
        assert_eq!(*m.get(0, 1), rat(1));
        assert_eq!(m.max_abs(), rat(3));
        assert_eq!(m.spread(), rat(3));
    }
}
