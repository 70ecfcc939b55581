//! Exact number types: rationals, residues modulo `p^m`, the number ring
//! `Q[t]/(t^8 - 2)` with `t = 2^(1/8)`, and p-adic orders on both.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Deterministic trial-division primality test; only small primes are ever
/// used as moduli here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Checks the standing hypothesis on primes used by the congruence
/// machinery.
pub fn require_prime_at_least_5(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::UnsupportedPrime { p, reason: "not a prime" });
    }
    if p < 5 {
        return Err(Error::UnsupportedPrime { p, reason: "primes 2 and 3 are outside the supported range p >= 5" });
    }
    Ok(())
}

/// p-adic order of an element, `+inf` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PadicOrder {
    Finite(i64),
    Infinite,
}

impl PadicOrder {
    pub fn is_at_least(self, m: i64) -> bool {
        match self {
            PadicOrder::Infinite => true,
            PadicOrder::Finite(v) => v >= m,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            PadicOrder::Finite(v) => Some(v),
            PadicOrder::Infinite => None,
        }
    }
}

impl PartialOrd for PadicOrder {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PadicOrder {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (PadicOrder::Infinite, PadicOrder::Infinite) => Equal,
            (PadicOrder::Infinite, _) => Greater,
            (_, PadicOrder::Infinite) => Less,
            (PadicOrder::Finite(a), PadicOrder::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for PadicOrder {
    type Output = PadicOrder;
    fn add(self, rhs: PadicOrder) -> PadicOrder {
        match (self, rhs) {
            (PadicOrder::Finite(a), PadicOrder::Finite(b)) => PadicOrder::Finite(a + b),
            _ => PadicOrder::Infinite,
        }
    }
}

impl fmt::Display for PadicOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicOrder::Finite(v) => write!(f, "{v}"),
            PadicOrder::Infinite => write!(f, "+inf"),
        }
    }
}

/// Number of times `p` divides a nonzero integer.
pub fn ord_p_int(n: &BigInt, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut count = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return count;
        }
        n = q;
        count += 1;
    }
}

pub fn ord_p_rational(r: &Rational, p: u64) -> PadicOrder {
    if r.is_zero() {
        return PadicOrder::Infinite;
    }
    PadicOrder::Finite(ord_p_int(r.numer(), p) as i64 - ord_p_int(r.denom(), p) as i64)
}

/// True when the rational's denominator is of the form `2^a 3^b`.
pub fn is_6_integral(r: &Rational) -> bool {
    let mut d = r.denom().clone();
    for q in [2u32, 3] {
        let q = BigInt::from(q);
        while d.is_multiple_of(&q) {
            d /= &q;
        }
    }
    d.is_one()
}

/// The ring `Z/p^m Z` with `p^m < 2^64`. Residues are plain `u64` in
/// `[0, p^m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    p: u64,
    m: u32,
    value: u64,
}

impl Modulus {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::UnsupportedPrime { p, reason: "not a prime" });
        }
        if m == 0 {
            return Err(Error::InvalidArgument("exponent m must be positive".into()));
        }
        let value = p.checked_pow(m).ok_or(Error::ModulusTooLarge { p, m })?;
        Ok(Modulus { p, m, value })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.value as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + self.value as u128 - b as u128) % self.value as u128) as u64
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.value as u128) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.value - a
        }
    }

    /// Inverse of a unit; `None` when `p | a`.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a % self.p == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.value as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Some(s0.rem_euclid(self.value as i128) as u64)
    }

    pub fn reduce_int(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.value)).to_u64().expect("residue fits in u64")
    }

    /// Image of a p-integral rational under `Z_(p) -> Z/p^m Z`.
    pub fn reduce(&self, r: &Rational) -> Result<u64> {
        let den = self.reduce_int(r.denom());
        let inv = self.inv(den).ok_or_else(|| Error::DenominatorNotPUnit { value: r.to_string(), p: self.p })?;
        Ok(self.mul(self.reduce_int(r.numer()), inv))
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.m)
    }
}

pub fn reduce_rational_mod(r: &Rational, p: u64, m: u32) -> Result<u64> {
    Modulus::new(p, m)?.reduce(r)
}

/// An element `x_0 + x_1 t + ... + x_7 t^7` of `Q[t]/(t^8 - 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraicNumber {
    coords: [Rational; 8],
}

impl AlgebraicNumber {
    pub fn zero() -> Self {
        AlgebraicNumber { coords: std::array::from_fn(|_| Rational::zero()) }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut a = Self::zero();
        a.coords[0] = r;
        a
    }

    pub fn from_coords(coords: [Rational; 8]) -> Self {
        AlgebraicNumber { coords }
    }

    /// `c * t^e` reduced with `t^8 = 2`.
    pub fn monomial(c: Rational, e: usize) -> Self {
        let mut a = Self::zero();
        let scale = BigInt::one() << (e / 8);
        a.coords[e % 8] = c * Rational::from_integer(scale);
        a
    }

    /// The generator `t = 2^(1/8)`.
    pub fn t() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn coords(&self) -> &[Rational; 8] {
        &self.coords
    }

    pub fn coord(&self, j: usize) -> &Rational {
        &self.coords[j]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Indices `j` with a nonzero coefficient on `t^j`.
    pub fn support(&self) -> Vec<usize> {
        (0..8).filter(|&j| !self.coords[j].is_zero()).collect()
    }

    pub fn scale(&self, r: &Rational) -> Self {
        AlgebraicNumber { coords: std::array::from_fn(|j| &self.coords[j] * r) }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Rational value when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Some(&self.coords[0])
        } else {
            None
        }
    }

    /// p-adic order, taken as the minimum over the `t`-basis coordinates.
    ///
    /// For odd `p` the polynomial `t^8 - 2` is separable mod `p`, so `p` is
    /// unramified and this minimum equals the minimum of the normalised
    /// `ord_P` over all primes `P | p`.
    pub fn ord_p(&self, p: u64) -> Result<PadicOrder> {
        if p == 2 {
            return Err(Error::UnsupportedPrime { p, reason: "2 is ramified in Q(2^(1/8))" });
        }
        if !is_prime(p) {
            return Err(Error::UnsupportedPrime { p, reason: "not a prime" });
        }
        Ok(self.coords.iter().map(|x| ord_p_rational(x, p)).min().expect("eight coordinates"))
    }
}

pub fn ord_p_alg(a: &AlgebraicNumber, p: u64) -> Result<PadicOrder> {
    a.ord_p(p)
}

impl<'a> Add<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber { coords: std::array::from_fn(|j| &self.coords[j] + &rhs.coords[j]) }
    }
}

impl<'a> Sub<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber { coords: std::array::from_fn(|j| &self.coords[j] - &rhs.coords[j]) }
    }
}

impl<'a> Mul<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        let two = Rational::from_integer(BigInt::from(2));
        let mut out = AlgebraicNumber::zero();
        for i in 0..8 {
            if self.coords[i].is_zero() {
                continue;
            }
            for j in 0..8 {
                if rhs.coords[j].is_zero() {
                    continue;
                }
                let prod = &self.coords[i] * &rhs.coords[j];
                if i + j < 8 {
                    out.coords[i + j] += prod;
                } else {
                    out.coords[i + j - 8] += prod * &two;
                }
            }
        }
        out
    }
}

impl Add for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, rhs: AlgebraicNumber) -> AlgebraicNumber {
        &self + &rhs
    }
}

impl Sub for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, rhs: AlgebraicNumber) -> AlgebraicNumber {
        &self - &rhs
    }
}

impl Mul for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, rhs: AlgebraicNumber) -> AlgebraicNumber {
        &self * &rhs
    }
}

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber { coords: self.coords.map(|x| -x) }
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, abs) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{abs}")?,
                _ if abs.is_one() => {}
                _ => write!(f, "{abs}*")?,
            }
            match j {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(e: usize) -> AlgebraicNumber {
        AlgebraicNumber::monomial(Rational::one(), e)
    }

    #[test]
    fn t_relations() {
        assert_eq!(&t(4) * &t(4), AlgebraicNumber::from_rational(int(2)));
        assert_eq!(&t(7) * &t(3), AlgebraicNumber::monomial(int(2), 2));
        let one = AlgebraicNumber::one();
        let lhs = &(&one + &t(1)) * &(&one - &t(1));
        assert_eq!(lhs, &one - &t(2));
        assert_eq!(t(1).pow(8), AlgebraicNumber::from_rational(int(2)));
    }

    #[test]
    fn ord_p_examples() {
        let a = AlgebraicNumber::from_rational(int(50));
        assert_eq!(a.ord_p(5).unwrap(), PadicOrder::Finite(2));
        let b = &AlgebraicNumber::from_rational(int(49)) + &AlgebraicNumber::monomial(int(7), 1);
        assert_eq!(b.ord_p(7).unwrap(), PadicOrder::Finite(1));
        assert_eq!(AlgebraicNumber::zero().ord_p(11).unwrap(), PadicOrder::Infinite);
        assert!(matches!(a.ord_p(2), Err(Error::UnsupportedPrime { p: 2, .. })));
        assert_eq!(AlgebraicNumber::from_rational(rat(7, 25)).ord_p(5).unwrap(), PadicOrder::Finite(-2));
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_rational_mod(&rat(1, 6), 5, 2).unwrap(), 21);
        assert_eq!(reduce_rational_mod(&int(10), 5, 1).unwrap(), 0);
        assert!(matches!(reduce_rational_mod(&rat(1, 5), 5, 2), Err(Error::DenominatorNotPUnit { p: 5, .. })));
        assert_eq!(reduce_rational_mod(&rat(-1, 24), 5, 1).unwrap(), 1);
    }

    #[test]
    fn modulus_rejects_bad_input() {
        assert!(Modulus::new(6, 1).is_err());
        assert!(Modulus::new(5, 0).is_err());
        assert!(matches!(Modulus::new(7, 40), Err(Error::ModulusTooLarge { .. })));
        let m = Modulus::new(7, 3).unwrap();
        for a in 1..343u64 {
            if a % 7 != 0 {
                assert_eq!(m.mul(a, m.inv(a).unwrap()), 1);
            } else {
                assert!(m.inv(a).is_none());
            }
        }
    }

    #[test]
    fn display() {
        let a = &AlgebraicNumber::from_rational(rat(-1, 2)) + &AlgebraicNumber::monomial(int(3), 5);
        assert_eq!(a.to_string(), "-1/2 + 3*t^5");
        assert_eq!(AlgebraicNumber::zero().to_string(), "0");
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..12).prop_map(|(n, d)| rat(n, d))
    }

    fn alg() -> impl Strategy<Value = AlgebraicNumber> {
        proptest::array::uniform8(small_rational()).prop_map(AlgebraicNumber::from_coords)
    }

    fn p_unit_rational() -> impl Strategy<Value = Rational> {
        (-10_000i64..10_000, prop::sample::select(vec![1i64, 2, 3, 4, 6, 8, 9, 12, 24, 7, 49]))
            .prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn ring_axioms(a in alg(), b in alg(), c in alg()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn ord_p_ultrametric(a in alg(), b in alg(), p in prop::sample::select(vec![5u64, 7, 11])) {
            let lhs = (&a + &b).ord_p(p).unwrap();
            prop_assert!(lhs >= a.ord_p(p).unwrap().min(b.ord_p(p).unwrap()));
        }

        #[test]
        fn ord_p_multiplicative_on_single_power(a in alg(), c in small_rational(), e in 0usize..8,
                                                p in prop::sample::select(vec![5u64, 7])) {
            let b = AlgebraicNumber::monomial(c, e);
            prop_assert_eq!((&a * &b).ord_p(p).unwrap(), a.ord_p(p).unwrap() + b.ord_p(p).unwrap());
        }

        #[test]
        fn reduction_is_a_ring_map(a in p_unit_rational(), b in p_unit_rational(),
                                   (p, m) in prop::sample::select(vec![(5u64, 1u32), (5, 3), (11, 2)])) {
            let md = Modulus::new(p, m).unwrap();
            let (ra, rb) = (md.reduce(&a).unwrap(), md.reduce(&b).unwrap());
            prop_assert_eq!(md.reduce(&(&a + &b)).unwrap(), md.add(ra, rb));
            prop_assert_eq!(md.reduce(&(&a * &b)).unwrap(), md.mul(ra, rb));
        }
    }
}
