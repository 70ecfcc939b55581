//! Polynomial models of quasimodular forms.
//!
//! A quasimodular form on `Gamma_1(4)` is an isobaric polynomial in
//! `Theta`, `F2`, `E2` (weights 1/2, 2, 2); [`IsobaricPoly`] stores that
//! polynomial in the variables `X`, `Y`, `Z`. Forms on the full modular
//! group are polynomials in `E4`, `E6`, `E2` and are stored as
//! [`Gamma1Poly`] with weights 4, 6, 2.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{ord_p_rational, require_prime_at_least_5, PadicOrder, Rational};
use crate::linalg::{solve_columns, Solution};
use crate::qseries::{eisenstein_series, f2_series, theta_series, QSeries};

/// Extra q-coefficients beyond the dimension that a decomposition must
/// reproduce exactly.
pub const DECOMPOSITION_GUARD: usize = 5;

/// A weight in `(1/2) Z`, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(i64);

impl Weight {
    pub const ZERO: Weight = Weight(0);

    pub const fn from_halves(halves: i64) -> Self {
        Weight(halves)
    }

    pub const fn int(k: i64) -> Self {
        Weight(2 * k)
    }

    pub const fn halves(self) -> i64 {
        self.0
    }

    pub fn is_integral(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn as_rational(self) -> Rational {
        Rational::new(BigInt::from(self.0), BigInt::from(2))
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0 + rhs.0)
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, rhs: Weight) -> Weight {
        Weight(self.0 - rhs.0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    /// Accepts `4`, `9/2`, or `4.5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not a half-integer weight: {s:?}"));
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "2" => Ok(Weight(num)),
                "1" => Ok(Weight(2 * num)),
                _ => Err(bad()),
            }
        } else if let Some((whole, frac)) = s.split_once('.') {
            let neg = whole.starts_with('-');
            let whole: i64 = whole.parse().map_err(|_| bad())?;
            let half = match frac.trim_end_matches('0') {
                "" => 0,
                "5" => 1,
                _ => return Err(bad()),
            };
            Ok(Weight(2 * whole + if neg { -half } else { half }))
        } else {
            Ok(Weight(2 * s.parse::<i64>().map_err(|_| bad())?))
        }
    }
}

/// Exponent triple `X^x Y^y Z^z`. Ordered by `x` first, so the last key in
/// a map is a term of maximal `X`-degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { x: 0, y: 0, z: 0 };

    pub const fn new(x: u32, y: u32, z: u32) -> Self {
        Monomial { x, y, z }
    }

    fn mul(self, o: Monomial) -> Monomial {
        Monomial::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

/// Assignment of weights to the three variables.
pub trait Grading: Copy + Clone + fmt::Debug + Default + PartialEq + Eq + Hash + Send + Sync + 'static {
    /// Twice the weights of `X`, `Y`, `Z`.
    const HALVES: [i64; 3];

    fn weight_of(m: Monomial) -> Weight {
        let [wx, wy, wz] = Self::HALVES;
        Weight(wx * m.x as i64 + wy * m.y as i64 + wz * m.z as i64)
    }

    /// q-expansions of the three generators.
    fn generators(precision: usize) -> [QSeries; 3];
}

/// `X, Y, Z = Theta, F2, E2` with weights 1/2, 2, 2.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Gamma14;

/// `X, Y, Z = E4, E6, E2` with weights 4, 6, 2.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Gamma1;

impl Grading for Gamma14 {
    const HALVES: [i64; 3] = [1, 4, 4];

    fn generators(precision: usize) -> [QSeries; 3] {
        [
            theta_series(precision),
            f2_series(precision),
            eisenstein_series(2, precision).expect("weight 2 is valid"),
        ]
    }
}

impl Grading for Gamma1 {
    const HALVES: [i64; 3] = [8, 12, 4];

    fn generators(precision: usize) -> [QSeries; 3] {
        [4, 6, 2].map(|k| eisenstein_series(k, precision).expect("valid weight"))
    }
}

/// Weighted-homogeneous polynomial with rational coefficients. Zero
/// coefficients are never stored; every stored monomial has exactly the
/// declared weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedPoly<G: Grading> {
    weight: Weight,
    terms: BTreeMap<Monomial, Rational>,
    _grading: PhantomData<G>,
}

pub type IsobaricPoly = WeightedPoly<Gamma14>;
pub type Gamma1Poly = WeightedPoly<Gamma1>;

impl<G: Grading> WeightedPoly<G> {
    pub fn zero(weight: Weight) -> Self {
        WeightedPoly { weight, terms: BTreeMap::new(), _grading: PhantomData }
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::ONE)
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = Self::zero(G::weight_of(m));
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn x() -> Self {
        Self::term(Rational::one(), Monomial::new(1, 0, 0))
    }

    pub fn y() -> Self {
        Self::term(Rational::one(), Monomial::new(0, 1, 0))
    }

    pub fn z() -> Self {
        Self::term(Rational::one(), Monomial::new(0, 0, 1))
    }

    /// Builds a polynomial of the given weight, summing repeated monomials
    /// and rejecting any monomial of another weight.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(weight: Weight, terms: I) -> Result<Self> {
        let mut p = Self::zero(weight);
        for (m, c) in terms {
            let w = G::weight_of(m);
            if w != weight {
                return Err(Error::WeightMismatch { left: weight, right: w });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Convenience constructor from `(coefficient, x, y, z)` tuples with
    /// integer coefficients.
    pub fn from_int_terms(weight: Weight, terms: &[(i64, u32, u32, u32)]) -> Result<Self> {
        Self::from_terms(
            weight,
            terms.iter().map(|&(c, x, y, z)| (Monomial::new(x, y, z), Rational::from_integer(c.into()))),
        )
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        debug_assert_eq!(G::weight_of(m), self.weight, "non-isobaric term {m:?}");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest power of `X` occurring, `None` for the zero polynomial.
    pub fn x_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.x).max()
    }

    pub fn has_z(&self) -> bool {
        self.terms.keys().any(|m| m.z > 0)
    }

    /// Drops every term containing `Z`; for the `Gamma_1(4)` model this is
    /// the modular part `g_0 = G(g; Theta, F2, 0)`.
    pub fn modular_part(&self) -> Self {
        WeightedPoly {
            weight: self.weight,
            terms: self.terms.iter().filter(|(m, _)| m.z == 0).map(|(m, c)| (*m, c.clone())).collect(),
            _grading: PhantomData,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.weight != other.weight {
            return Err(Error::WeightMismatch { left: self.weight, right: other.weight });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(self.weight);
        }
        WeightedPoly {
            weight: self.weight,
            terms: self.terms.iter().map(|(m, c)| (*m, c * r)).collect(),
            _grading: PhantomData,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
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

    /// Minimum p-adic order over the coefficients (`+inf` for zero).
    pub fn min_coeff_ord_p(&self, p: u64) -> PadicOrder {
        self.terms.values().map(|c| ord_p_rational(c, p)).min().unwrap_or(PadicOrder::Infinite)
    }

    /// q-expansion obtained by substituting the generator series.
    pub fn eval_to_qseries(&self, precision: usize) -> QSeries {
        let gens = G::generators(precision);
        let mut powers: [Vec<QSeries>; 3] = Default::default();
        for (v, pw) in powers.iter_mut().enumerate() {
            let max = self
                .terms
                .keys()
                .map(|m| [m.x, m.y, m.z][v])
                .max()
                .unwrap_or(0);
            pw.push(QSeries::one(precision));
            for e in 1..=max as usize {
                let next = pw[e - 1].mul(&gens[v]);
                pw.push(next);
            }
        }
        let mut acc = vec![Rational::zero(); precision];
        for (m, c) in &self.terms {
            let s = powers[0][m.x as usize].mul(&powers[1][m.y as usize]).mul(&powers[2][m.z as usize]);
            for (a, b) in acc.iter_mut().zip(s.coeffs()) {
                if !b.is_zero() {
                    *a += c * b;
                }
            }
        }
        QSeries::new(acc)
    }

    /// Substitutes polynomials of another grading for `X`, `Y`, `Z`.
    pub fn substitute<H: Grading>(&self, images: &[WeightedPoly<H>; 3]) -> WeightedPoly<H> {
        for (v, img) in images.iter().enumerate() {
            assert_eq!(img.weight.halves(), G::HALVES[v], "substitution must preserve weights");
        }
        let mut powers: [Vec<WeightedPoly<H>>; 3] = Default::default();
        for (v, pw) in powers.iter_mut().enumerate() {
            let max = self.terms.keys().map(|m| [m.x, m.y, m.z][v]).max().unwrap_or(0);
            pw.push(WeightedPoly::one());
            for e in 1..=max as usize {
                let next = &pw[e - 1] * &images[v];
                pw.push(next);
            }
        }
        let mut out = WeightedPoly::<H>::zero(self.weight);
        for (m, c) in &self.terms {
            let prod = &(&powers[0][m.x as usize] * &powers[1][m.y as usize]) * &powers[2][m.z as usize];
            for (pm, pc) in prod.terms {
                out.add_term(pm, pc * c);
            }
        }
        out
    }
}

impl<'a, G: Grading> Add<&'a WeightedPoly<G>> for &'a WeightedPoly<G> {
    type Output = WeightedPoly<G>;

    /// Panics on a weight mismatch; use [`WeightedPoly::try_add`] to get an
    /// error instead.
    fn add(self, rhs: &WeightedPoly<G>) -> WeightedPoly<G> {
        self.try_add(rhs).expect("sum of isobaric polynomials of different weights")
    }
}

impl<'a, G: Grading> Sub<&'a WeightedPoly<G>> for &'a WeightedPoly<G> {
    type Output = WeightedPoly<G>;
    fn sub(self, rhs: &WeightedPoly<G>) -> WeightedPoly<G> {
        self.try_sub(rhs).expect("difference of isobaric polynomials of different weights")
    }
}

impl<'a, G: Grading> Mul<&'a WeightedPoly<G>> for &'a WeightedPoly<G> {
    type Output = WeightedPoly<G>;
    fn mul(self, rhs: &WeightedPoly<G>) -> WeightedPoly<G> {
        let mut out = WeightedPoly::zero(self.weight + rhs.weight);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(*mb), ca * cb);
            }
        }
        out
    }
}

impl<G: Grading> Neg for &WeightedPoly<G> {
    type Output = WeightedPoly<G>;
    fn neg(self) -> WeightedPoly<G> {
        WeightedPoly {
            weight: self.weight,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
            _grading: PhantomData,
        }
    }
}

impl<G: Grading> fmt::Display for WeightedPoly<G> {
    /// Highest `X`-degree first, e.g. `X^8 + 224*X^4*Y + 256*Y^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let abs = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            if !abs.is_one() || *m == Monomial::ONE {
                factors.push(if abs.is_integer() { abs.to_string() } else { format!("({abs})") });
            }
            for (name, e) in [("X", m.x), ("Y", m.y), ("Z", m.z)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl IsobaricPoly {
    /// `D = q d/dq` on the polynomial model, via Leibniz and
    ///
    /// ```text
    /// D X = (X Z - X^5 + 80 X Y) / 24
    /// D Y = (Y Z + 5 X^4 Y - 16 Y^2) / 6
    /// D Z = (Z^2 - X^8 - 224 X^4 Y - 256 Y^2) / 12
    /// ```
    pub fn d(&self) -> IsobaricPoly {
        // Everything is accumulated over the common denominator 24.
        let mut out = IsobaricPoly::zero(self.weight + Weight::int(2));
        for (m, c) in &self.terms {
            let (a, b, cz) = (m.x as i64, m.y as i64, m.z as i64);
            let mut push = |mm: Monomial, k: i64| {
                if k != 0 {
                    out.add_term(mm, c * Rational::from_integer(k.into()));
                }
            };
            push(Monomial::new(m.x, m.y, m.z + 1), a + 4 * b + 2 * cz);
            push(Monomial::new(m.x + 4, m.y, m.z), -a + 20 * b);
            push(Monomial::new(m.x, m.y + 1, m.z), 80 * a - 64 * b);
            if m.z > 0 {
                push(Monomial::new(m.x + 8, m.y, m.z - 1), -2 * cz);
                push(Monomial::new(m.x + 4, m.y + 1, m.z - 1), -448 * cz);
                push(Monomial::new(m.x, m.y + 2, m.z - 1), -512 * cz);
            }
        }
        out.scale(&Rational::new(1.into(), 24.into()))
    }

    /// `D^n` by iteration.
    pub fn d_n(&self, n: usize) -> IsobaricPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.d();
        }
        p
    }
}

pub fn d_poly(p: &IsobaricPoly) -> IsobaricPoly {
    p.d()
}

pub fn modular_part(p: &IsobaricPoly) -> IsobaricPoly {
    p.modular_part()
}

pub fn eval_to_qseries(p: &IsobaricPoly, precision: usize) -> QSeries {
    p.eval_to_qseries(precision)
}

/// `E4 = X^8 + 224 X^4 Y + 256 Y^2`.
pub fn e4_model() -> IsobaricPoly {
    IsobaricPoly::from_int_terms(Weight::int(4), &[(1, 8, 0, 0), (224, 4, 1, 0), (256, 0, 2, 0)])
        .expect("isobaric")
}

/// `E6 = X^12 - 528 X^8 Y - 8448 X^4 Y^2 + 4096 Y^3`.
pub fn e6_model() -> IsobaricPoly {
    IsobaricPoly::from_int_terms(
        Weight::int(6),
        &[(1, 12, 0, 0), (-528, 8, 1, 0), (-8448, 4, 2, 0), (4096, 0, 3, 0)],
    )
    .expect("isobaric")
}

/// Number of monomials `X^a Y^b` of the given weight in the `Gamma_1(4)`
/// model.
pub fn gamma14_dimension(k: Weight) -> usize {
    if k.halves() < 0 {
        0
    } else {
        (k.halves() / 4) as usize + 1
    }
}

/// Writes a weight-`k` form on `Gamma_1(4)` as `sum c_{a,b} Theta^a F2^b`.
///
/// `Theta^a F2^b` starts with `q^b`, so the coefficients come out of a
/// unit-triangular system; the remaining coefficients of `f` serve as a
/// residual check.
pub fn decompose_gamma14(f: &QSeries, k: Weight) -> Result<IsobaricPoly> {
    let dim = gamma14_dimension(k);
    let needed = dim + DECOMPOSITION_GUARD;
    let n = f.precision();
    if n < needed {
        return Err(Error::InsufficientPrecision { needed, got: n });
    }
    if dim == 0 {
        return match f.coeffs().iter().position(|c| !c.is_zero()) {
            None => Ok(IsobaricPoly::zero(k)),
            Some(index) => Err(Error::NotInSpan { weight: k, index }),
        };
    }
    let h = k.halves();
    let theta = theta_series(n);
    let f2 = f2_series(n);
    let theta4 = theta.pow(4);
    // basis[b] = Theta^(2k - 4b) F2^b, built from b = dim - 1 downwards.
    let b_max = dim - 1;
    let mut basis = vec![QSeries::zero(n); dim];
    let mut theta_part = theta.pow((h - 4 * b_max as i64) as u32);
    let mut f2_powers = vec![QSeries::one(n)];
    for b in 1..dim {
        let next = f2_powers[b - 1].mul(&f2);
        f2_powers.push(next);
    }
    for b in (0..dim).rev() {
        basis[b] = theta_part.mul(&f2_powers[b]);
        if b > 0 {
            theta_part = theta_part.mul(&theta4);
        }
    }

    let mut residual = f.clone();
    let mut poly = IsobaricPoly::zero(k);
    for (b, basis_b) in basis.iter().enumerate() {
        let c = residual.coeffs()[b].clone();
        if c.is_zero() {
            continue;
        }
        residual = residual.sub(&basis_b.scale(&c));
        let a = (h - 4 * b as i64) as u32;
        poly.add_term(Monomial::new(a, b as u32, 0), c);
    }
    match residual.coeffs().iter().position(|c| !c.is_zero()) {
        None => Ok(poly),
        Some(index) => Err(Error::NotInSpan { weight: k, index }),
    }
}

/// Pairs `(a, b)` with `4a + 6b = k`.
fn gamma1_exponents(k: Weight) -> Vec<(u32, u32)> {
    let h = k.halves();
    if h < 0 || h % 4 != 0 {
        return Vec::new();
    }
    let k = h / 2;
    (0..=k / 6).filter(|b| (k - 6 * b) % 4 == 0).map(|b| (((k - 6 * b) / 4) as u32, b as u32)).collect()
}

/// Writes a weight-`k` form on the full modular group as
/// `sum c_{a,b} E4^a E6^b`, residual-checked on every known coefficient.
pub fn decompose_gamma1(f: &QSeries, k: Weight) -> Result<Gamma1Poly> {
    let exps = gamma1_exponents(k);
    let dim = exps.len();
    let needed = dim + DECOMPOSITION_GUARD;
    let n = f.precision();
    if n < needed {
        return Err(Error::InsufficientPrecision { needed, got: n });
    }
    let e4 = eisenstein_series(4, n)?;
    let e6 = eisenstein_series(6, n)?;
    let columns: Vec<Vec<Rational>> =
        exps.iter().map(|&(a, b)| e4.pow(a).mul(&e6.pow(b)).coeffs().to_vec()).collect();
    match solve_columns(&columns, f.coeffs()) {
        Solution::Unique(x) => Gamma1Poly::from_terms(
            k,
            exps.iter().zip(x).map(|(&(a, b), c)| (Monomial::new(a, b, 0), c)),
        ),
        Solution::Inconsistent { row } => Err(Error::NotInSpan { weight: k, index: row }),
        Solution::Underdetermined => Err(Error::InsufficientPrecision { needed: needed + 1, got: n }),
    }
}

/// `G(f; X, Y) -> G(f; E4-model, E6-model)`, carrying a `Gamma(1)`
/// polynomial over to the `Gamma_1(4)` model. `Z` is sent to `Z`.
pub fn gamma1_to_gamma14(g: &Gamma1Poly) -> IsobaricPoly {
    g.substitute(&[e4_model(), e6_model(), IsobaricPoly::z()])
}

fn hasse_precision(p: u64) -> usize {
    gamma14_dimension(Weight::int(p as i64 - 1)) + DECOMPOSITION_GUARD + 5
}

/// `A_p = G(E_{p-1}; X, Y)` in the `E4, E6` model.
pub fn gamma1_a_p(p: u64) -> Result<Gamma1Poly> {
    require_prime_at_least_5(p)?;
    let k = Weight::int(p as i64 - 1);
    let n = hasse_precision(p);
    decompose_gamma1(&eisenstein_series((p - 1) as u32, n)?, k)
}

/// `calA_p = G(E_{p-1}; X, Y)` in the `Theta, F2` model, by direct
/// decomposition of the q-expansion. Monic in `X` of degree `2(p - 1)`.
pub fn cal_a_p(p: u64) -> Result<IsobaricPoly> {
    require_prime_at_least_5(p)?;
    let k = Weight::int(p as i64 - 1);
    let n = hasse_precision(p);
    decompose_gamma14(&eisenstein_series((p - 1) as u32, n)?, k)
}

/// `calA_p` obtained through the `Gamma(1)` model instead.
pub fn cal_a_p_via_gamma1(p: u64) -> Result<IsobaricPoly> {
    Ok(gamma1_to_gamma14(&gamma1_a_p(p)?))
}
