use super::rat::Rat;
use num::bigint::BigInt;
use num::{One, Zero};
use std::fmt;

/// Truncated series in three variables: `t` counted ordinarily, `x` and `y`
/// exponentially.  The stored coefficient at `(k, m, n)` is the integer-like
/// count `c_{k,m,n}` in
///
///   F(t, x, y) = sum c_{k,m,n} t^k x^m y^n / (m! n!),
///
/// so combinatorial counts are read off directly and factorials only ever
/// appear inside the arithmetic, never in the stored values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Egf3 {
    kmax: usize,
    mmax: usize,
    nmax: usize,
    coef: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesError {
    /// Reciprocal of a series whose constant term is zero.
    ZeroConstantTerm,
    /// Two operands with different truncation orders.
    OrderMismatch,
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::ZeroConstantTerm => write!(f, "series has zero constant term"),
            SeriesError::OrderMismatch => write!(f, "series truncation orders differ"),
        }
    }
}

impl std::error::Error for SeriesError {}

fn factorials(upto: usize) -> Vec<BigInt> {
    let mut f = Vec::with_capacity(upto + 1);
    f.push(BigInt::one());
    for i in 1..=upto {
        let next = &f[i - 1] * BigInt::from(i);
        f.push(next);
    }
    f
}

/// Pascal triangle of binomial coefficients up to row `upto`.
fn binomials(upto: usize) -> Vec<Vec<Rat>> {
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(upto + 1);
    for m in 0..=upto {
        let mut row = vec![Rat::one(); m + 1];
        for k in 1..m {
            row[k] = &rows[m - 1][k - 1] + &rows[m - 1][k];
        }
        rows.push(row);
    }
    rows
}

impl Egf3 {
    pub fn zero(kmax: usize, mmax: usize, nmax: usize) -> Self {
        Egf3 {
            kmax,
            mmax,
            nmax,
            coef: vec![Rat::zero(); (kmax + 1) * (mmax + 1) * (nmax + 1)],
        }
    }

    pub fn constant(c: Rat, kmax: usize, mmax: usize, nmax: usize) -> Self {
        let mut s = Self::zero(kmax, mmax, nmax);
        s.coef[0] = c;
        s
    }

    pub fn one(kmax: usize, mmax: usize, nmax: usize) -> Self {
        Self::constant(Rat::one(), kmax, mmax, nmax)
    }

    /// The monomial `c t^k x^m y^n` (stored coefficient `c * m! * n!`).
    pub fn monomial(c: Rat, k: usize, m: usize, n: usize, kmax: usize, mmax: usize, nmax: usize) -> Self {
        let mut s = Self::zero(kmax, mmax, nmax);
        if k <= kmax && m <= mmax && n <= nmax {
            let fact = factorials(m.max(n));
            let scale = Rat::from_integer(&fact[m] * &fact[n]);
            let idx = s.index(k, m, n);
            s.coef[idx] = c * scale;
        }
        s
    }

    /// `exp(c t^dk x^dm y^dn)`, truncated.  The exponent must not be the
    /// empty monomial.
    pub fn exp_monomial(c: Rat, dk: usize, dm: usize, dn: usize, kmax: usize, mmax: usize, nmax: usize) -> Self {
        assert!(dk + dm + dn > 0, "exp of a constant monomial");
        let mut s = Self::zero(kmax, mmax, nmax);
        let fact = factorials(mmax.max(nmax).max(kmax));
        let mut p = 0usize;
        let mut cpow = Rat::one();
        loop {
            let (k, m, n) = (p * dk, p * dm, p * dn);
            if k > kmax || m > mmax || n > nmax {
                break;
            }
            // term: c^p / p! * t^k x^m y^n  =>  stored c^p m! n! / p!
            let idx = s.index(k, m, n);
            s.coef[idx] = &cpow * Rat::new(&fact[m] * &fact[n], fact[p].clone());
            p += 1;
            cpow = &cpow * &c;
        }
        s
    }

    pub fn orders(&self) -> (usize, usize, usize) {
        (self.kmax, self.mmax, self.nmax)
    }

    fn index(&self, k: usize, m: usize, n: usize) -> usize {
        debug_assert!(k <= self.kmax && m <= self.mmax && n <= self.nmax);
        (k * (self.mmax + 1) + m) * (self.nmax + 1) + n
    }

    /// Stored count at `(k, m, n)`.
    pub fn coeff(&self, k: usize, m: usize, n: usize) -> &Rat {
        &self.coef[self.index(k, m, n)]
    }

    /// Sum of the counts over all powers of `t` at fixed `(m, n)`; this is
    /// evaluation at `t = 1`, exact because the series is a polynomial in
    /// `t` after truncation.
    pub fn sum_over_t(&self, m: usize, n: usize) -> Rat {
        (0..=self.kmax).map(|k| self.coeff(k, m, n).clone()).sum()
    }

    pub fn add(&self, other: &Egf3) -> Result<Egf3, SeriesError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Egf3) -> Result<Egf3, SeriesError> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Egf3, f: impl Fn(&Rat, &Rat) -> Rat) -> Result<Egf3, SeriesError> {
        if self.orders() != other.orders() {
            return Err(SeriesError::OrderMismatch);
        }
        let coef = self.coef.iter().zip(&other.coef).map(|(a, b)| f(a, b)).collect();
        Ok(Egf3 { coef, ..*self })
    }

    pub fn scale(&self, c: &Rat) -> Egf3 {
        Egf3 {
            coef: self.coef.iter().map(|a| a * c).collect(),
            ..*self
        }
    }

    /// Product with binomial convolution in `x` and `y` (both exponential)
    /// and ordinary convolution in `t`.
    pub fn mul(&self, other: &Egf3) -> Result<Egf3, SeriesError> {
        if self.orders() != other.orders() {
            return Err(SeriesError::OrderMismatch);
        }
        let binom = binomials(self.mmax.max(self.nmax));
        let mut out = Egf3::zero(self.kmax, self.mmax, self.nmax);
        for k in 0..=self.kmax {
            for m in 0..=self.mmax {
                for n in 0..=self.nmax {
                    let mut acc = Rat::zero();
                    for k1 in 0..=k {
                        for m1 in 0..=m {
                            for n1 in 0..=n {
                                let a = self.coeff(k1, m1, n1);
                                if a.is_zero() {
                                    continue;
                                }
                                let b = other.coeff(k - k1, m - m1, n - n1);
                                if b.is_zero() {
                                    continue;
                                }
                                acc += a * b * &binom[m][m1] * &binom[n][n1];
                            }
                        }
                    }
                    let idx = out.index(k, m, n);
                    out.coef[idx] = acc;
                }
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse by the graded recurrence; the constant term
    /// must be nonzero.
    pub fn reciprocal(&self) -> Result<Egf3, SeriesError> {
        let c0 = self.coeff(0, 0, 0);
        if c0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let inv0 = Rat::one() / c0;
        let binom = binomials(self.mmax.max(self.nmax));
        let mut out = Egf3::zero(self.kmax, self.mmax, self.nmax);
        out.coef[0] = inv0.clone();
        // Graded order: the recurrence at (k, m, n) only consults strictly
        // smaller indices of `out`, all already filled.
        for k in 0..=self.kmax {
            for m in 0..=self.mmax {
                for n in 0..=self.nmax {
                    if k == 0 && m == 0 && n == 0 {
                        continue;
                    }
                    let mut acc = Rat::zero();
                    for k1 in 0..=k {
                        for m1 in 0..=m {
                            for n1 in 0..=n {
                                if k1 == 0 && m1 == 0 && n1 == 0 {
                                    continue;
                                }
                                let a = self.coeff(k1, m1, n1);
                                if a.is_zero() {
                                    continue;
                                }
                                let b = out.coeff(k - k1, m - m1, n - n1);
                                if b.is_zero() {
                                    continue;
                                }
                                acc += a * b * &binom[m][m1] * &binom[n][n1];
                            }
                        }
                    }
                    let idx = out.index(k, m, n);
                    out.coef[idx] = -&inv0 * acc;
                }
            }
        }
        Ok(out)
    }
}
