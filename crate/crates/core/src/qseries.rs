//! Truncated q-expansions with exact rational coefficients, the generators
//! `Theta`, `F2`, `E_k`, and the derivative `D = q d/dq`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{Modulus, Rational};

/// `sum_{n < N} c_n q^n + O(q^N)`; `N` is the precision and is always at
/// least 1.
///
/// `==` compares precision as well as coefficients. Use
/// [`QSeries::agrees_with`] to compare two series on their common range.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    coeffs: Vec<Rational>,
}

impl QSeries {
    /// Panics if `coeffs` is empty; a series always knows at least `c_0`.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a q-series needs precision >= 1");
        QSeries { coeffs }
    }

    pub fn from_integers<I: IntoIterator<Item = i64>>(coeffs: I) -> Self {
        Self::new(coeffs.into_iter().map(|c| Rational::from_integer(c.into())).collect())
    }

    pub fn zero(precision: usize) -> Self {
        Self::new(vec![Rational::zero(); precision])
    }

    pub fn one(precision: usize) -> Self {
        let mut s = Self::zero(precision);
        s.coeffs[0] = Rational::one();
        s
    }

    /// `q^n` to the given precision (zero if `n >= precision`).
    pub fn monomial(n: usize, precision: usize) -> Self {
        let mut s = Self::zero(precision);
        if n < precision {
            s.coeffs[n] = Rational::one();
        }
        s
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&Rational> {
        self.coeffs.get(n)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, precision: usize) -> Self {
        assert!(precision >= 1);
        Self::new(self.coeffs.iter().take(precision).cloned().collect())
    }

    /// Equality of coefficients up to the smaller of the two precisions.
    pub fn agrees_with(&self, other: &QSeries) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a == b)
    }

    /// Index of the first coefficient where the two series differ within
    /// their common precision.
    pub fn first_disagreement(&self, other: &QSeries) -> Option<usize> {
        self.coeffs.iter().zip(&other.coeffs).position(|(a, b)| a != b)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        QSeries::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        QSeries::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, r: &Rational) -> QSeries {
        QSeries::new(self.coeffs.iter().map(|a| a * r).collect())
    }

    /// Cauchy product truncated to the smaller precision.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let n = self.precision().min(other.precision());
        let mut out = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        QSeries::new(out)
    }

    pub fn pow(&self, e: u32) -> QSeries {
        let mut acc = QSeries::one(self.precision());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `D = q d/dq`: multiplies `c_n` by `n`.
    pub fn d(&self) -> QSeries {
        QSeries::new(
            self.coeffs.iter().enumerate().map(|(n, c)| c * Rational::from_integer(BigInt::from(n))).collect(),
        )
    }

    /// Coefficient-wise image in `Z/p^m Z`.
    pub fn reduce_mod(&self, modulus: &Modulus) -> Result<Vec<u64>> {
        self.coeffs.iter().map(|c| modulus.reduce(c)).collect()
    }
}

impl fmt::Display for QSeries {
    /// Renders the known terms, e.g. `1 + 2q + 2q^4`, without the `O(q^N)`
    /// tail.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let abs = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = n == 0 || !abs.is_one();
            let coeff = if abs.is_integer() { abs.to_string() } else { format!("({abs})") };
            match (n, show_coeff) {
                (0, _) => write!(f, "{coeff}")?,
                (1, true) => write!(f, "{coeff}q")?,
                (1, false) => write!(f, "q")?,
                (_, true) => write!(f, "{coeff}q^{n}")?,
                (_, false) => write!(f, "q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Bernoulli number `B_n` (with `B_1 = -1/2`) from
/// `sum_{j=0}^{n} C(n+1, j) B_j = 0`.
pub fn bernoulli(n: usize) -> Rational {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::one());
    for m in 1..=n {
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += Rational::from_integer(binomial(BigInt::from(m + 1), BigInt::from(j))) * bj;
        }
        b.push(-acc / Rational::from_integer(BigInt::from(m + 1)));
    }
    b.pop().expect("at least B_0")
}

/// `sigma_j(n) = sum_{d | n} d^j`.
pub fn sigma(j: u32, n: u64) -> BigInt {
    assert!(n >= 1, "sigma is defined for n >= 1");
    let mut acc = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(j);
            let e = n / d;
            if e != d {
                acc += BigInt::from(e).pow(j);
            }
        }
        d += 1;
    }
    acc
}

/// `Theta = sum_{n in Z} q^(n^2)`.
pub fn theta_series(precision: usize) -> QSeries {
    let mut s = QSeries::zero(precision);
    s.coeffs[0] = Rational::one();
    let two = Rational::from_integer(2.into());
    let mut n = 1usize;
    while n * n < precision {
        s.coeffs[n * n] = two.clone();
        n += 1;
    }
    s
}

/// `F2 = sum_{n odd} sigma_1(n) q^n`.
pub fn f2_series(precision: usize) -> QSeries {
    let mut s = QSeries::zero(precision);
    for n in (1..precision).step_by(2) {
        s.coeffs[n] = Rational::from_integer(sigma(1, n as u64));
    }
    s
}

/// Normalised Eisenstein series `E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n`
/// for even `k >= 2`.
pub fn eisenstein_series(k: u32, precision: usize) -> Result<QSeries> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidArgument(format!("Eisenstein weight must be even and >= 2, got {k}")));
    }
    let factor = -Rational::from_integer(BigInt::from(2 * k)) / bernoulli(k as usize);
    let mut s = QSeries::one(precision);
    for n in 1..precision {
        s.coeffs[n] = &factor * Rational::from_integer(sigma(k - 1, n as u64));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use proptest::prelude::*;

    /// Akiyama-Tanigawa; shares nothing with the recurrence above. Produces
    /// `B_1 = +1/2`, irrelevant for the even indices checked.
    fn bernoulli_akiyama_tanigawa(n: usize) -> Rational {
        let mut a: Vec<Rational> = (0..=n).map(|m| rat(1, m as i64 + 1)).collect();
        for m in 0..=n {
            a[m] = rat(1, m as i64 + 1);
            for j in (1..=m).rev() {
                a[j - 1] = int(j as i64) * (&a[j - 1] - &a[j]);
            }
        }
        a[0].clone()
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(3), int(0));
        let oracle = bernoulli_akiyama_tanigawa(12);
        assert_eq!(oracle, rat(-691, 2730));
        assert_eq!(bernoulli(12), oracle);
        for k in (2..=30).step_by(2) {
            assert_eq!(bernoulli(k), bernoulli_akiyama_tanigawa(k), "B_{k}");
        }
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(1, 9), 13.into());
        assert_eq!(sigma(3, 2), 9.into());
        assert_eq!(sigma(1, 1), 1.into());
        assert_eq!(sigma(0, 36), 9.into());
    }

    #[test]
    fn generators() {
        assert_eq!(theta_series(10), QSeries::from_integers([1, 2, 0, 0, 2, 0, 0, 0, 0, 2]));
        assert_eq!(theta_series(1), QSeries::from_integers([1]));
        assert_eq!(theta_series(17).coeff(16), Some(&int(2)));
        let f2 = f2_series(10);
        assert_eq!(f2, QSeries::from_integers([0, 1, 0, 4, 0, 6, 0, 8, 0, 13]));
        assert_eq!(f2.coeff(2), Some(&int(0)));
        assert_eq!(f2.coeff(7), Some(&int(8)));
    }

    #[test]
    fn eisenstein_values() {
        assert_eq!(eisenstein_series(2, 4).unwrap(), QSeries::from_integers([1, -24, -72, -96]));
        assert_eq!(eisenstein_series(4, 3).unwrap(), QSeries::from_integers([1, 240, 2160]));
        assert_eq!(eisenstein_series(6, 3).unwrap(), QSeries::from_integers([1, -504, -16632]));
        for k in [2, 4, 6] {
            assert!(eisenstein_series(k, 60).unwrap().is_integral());
        }
        assert!(eisenstein_series(3, 5).is_err());
        assert!(eisenstein_series(0, 5).is_err());
    }

    #[test]
    fn derivative() {
        assert_eq!(theta_series(10).d(), QSeries::from_integers([0, 2, 0, 0, 8, 0, 0, 0, 0, 18]));
        assert!(QSeries::one(8).d().is_zero());
        assert_eq!(QSeries::monomial(1, 5).d(), QSeries::monomial(1, 5));
    }

    #[test]
    fn theta_squared_counts_two_squares() {
        let n = 30;
        let mut r2 = vec![0i64; n];
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                let s = (a * a + b * b) as usize;
                if s < n {
                    r2[s] += 1;
                }
            }
        }
        let sq = theta_series(n).mul(&theta_series(n));
        assert_eq!(sq, QSeries::from_integers(r2.clone()));
        assert_eq!(sq.truncate(5), QSeries::from_integers([1, 4, 4, 0, 4]));
    }

    #[test]
    fn products_with_units() {
        let f = f2_series(12);
        assert_eq!(f.mul(&QSeries::one(12)), f);
        assert!(f.mul(&QSeries::zero(12)).is_zero());
        let short = theta_series(4);
        assert_eq!(f.mul(&short).precision(), 4);
    }

    #[test]
    fn overlap_comparison_is_not_equality() {
        let a = theta_series(10);
        let b = theta_series(20);
        assert_ne!(a, b);
        assert!(a.agrees_with(&b));
        assert_eq!(a.first_disagreement(&f2_series(10)), Some(0));
    }

    #[test]
    fn display() {
        assert_eq!(theta_series(10).to_string(), "1 + 2q + 2q^4 + 2q^9");
        assert_eq!(f2_series(4).to_string(), "q + 4q^3");
        assert_eq!(eisenstein_series(2, 3).unwrap().to_string(), "1 - 24q - 72q^2");
        assert_eq!(QSeries::new(vec![rat(-1, 2), int(0), int(-1)]).to_string(), "-(1/2) - q^2");
        assert_eq!(QSeries::zero(3).to_string(), "0");
    }

    fn series(n: usize) -> impl Strategy<Value = QSeries> {
        proptest::collection::vec((-20i64..20, 1i64..5), n).prop_map(|v| {
            QSeries::new(v.into_iter().map(|(a, b)| rat(a, b)).collect())
        })
    }

    proptest! {
        #[test]
        fn leibniz(f in series(25), g in series(25)) {
            let lhs = f.mul(&g).d();
            let rhs = f.d().mul(&g).add(&f.mul(&g.d()));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
