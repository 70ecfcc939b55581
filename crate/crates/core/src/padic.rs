//! Reduction of isobaric polynomials mod `p^m`, division by polynomials
//! monic in `X`, the mod `p^m` filtration, and the quasi-valuation
//! `nu_p(G) = sup { n : G in <calA_p^p, p>^n }`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactnum::{require_prime_at_least_5, Modulus, Rational};
use crate::qmring::{cal_a_p, decompose_gamma14, IsobaricPoly, Monomial, Weight};
use crate::qseries::QSeries;

pub const DEFAULT_NU_CAP: u32 = 16;

/// Isobaric polynomial with coefficients in `Z/p^m Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModPoly {
    modulus: Modulus,
    weight: Weight,
    terms: BTreeMap<Monomial, u64>,
}

impl ModPoly {
    pub fn zero(modulus: Modulus, weight: Weight) -> Self {
        ModPoly { modulus, weight, terms: BTreeMap::new() }
    }

    pub fn reduce(p: &IsobaricPoly, modulus: Modulus) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (m, c) in p.terms() {
            let r = modulus.reduce(c)?;
            if r != 0 {
                terms.insert(*m, r);
            }
        }
        Ok(ModPoly { modulus, weight: p.weight(), terms })
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
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

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &u64)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> u64 {
        self.terms.get(&m).copied().unwrap_or(0)
    }

    pub fn x_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.x).max()
    }

    fn add_term(&mut self, m: Monomial, c: u64) {
        let md = self.modulus;
        let entry = self.terms.entry(m).or_insert(0);
        *entry = md.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn mul(&self, other: &ModPoly) -> Result<ModPoly> {
        self.check_modulus(other)?;
        let md = self.modulus;
        let mut out = ModPoly::zero(md, self.weight + other.weight);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(Monomial::new(ma.x + mb.x, ma.y + mb.y, ma.z + mb.z), md.mul(*ca, *cb));
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ModPoly) -> Result<ModPoly> {
        self.check_modulus(other)?;
        if self.weight != other.weight && !other.is_zero() && !self.is_zero() {
            return Err(Error::WeightMismatch { left: self.weight, right: other.weight });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, self.modulus.neg(*c));
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> ModPoly {
        let mut acc = ModPoly::zero(self.modulus, Weight::ZERO);
        acc.terms.insert(Monomial::ONE, 1 % self.modulus.value());
        for _ in 0..e {
            acc = acc.mul(self).expect("same modulus");
        }
        acc
    }

    /// Integer lift with coefficients chosen by `lift`.
    pub fn lift(&self, lift: LiftConvention) -> IsobaricPoly {
        let q = self.modulus.value() as i128;
        let terms = self.terms.iter().map(|(m, &c)| {
            let c = c as i128;
            let v = match lift {
                LiftConvention::Least => c,
                LiftConvention::Symmetric => {
                    if 2 * c > q {
                        c - q
                    } else {
                        c
                    }
                }
                LiftConvention::Shifted(s) => c + s as i128 * q,
            };
            (*m, Rational::from_integer(BigInt::from(v)))
        });
        IsobaricPoly::from_terms(self.weight, terms).expect("isobaric by construction")
    }

    fn check_modulus(&self, other: &ModPoly) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch { left: self.modulus.value(), right: other.modulus.value() });
        }
        Ok(())
    }
}

impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            if *c != 1 || *m == Monomial::ONE {
                factors.push(c.to_string());
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
        write!(f, " (mod {})", self.modulus.value())
    }
}

pub fn reduce_poly_mod(p: &IsobaricPoly, prime: u64, m: u32) -> Result<ModPoly> {
    ModPoly::reduce(p, Modulus::new(prime, m)?)
}

/// How residues are lifted back to integers in the membership recursion.
/// Any choice gives the same verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LiftConvention {
    /// `[0, p^m)`
    #[default]
    Least,
    /// `(-p^m/2, p^m/2]`
    Symmetric,
    /// least residue plus `s * p^m`
    Shifted(i64),
}

/// Long division in `X` over `(Z/p^m)[Y, Z]`: returns `(quotient,
/// remainder)` with `P = Q * quotient + remainder` and
/// `deg_X(remainder) < deg_X(Q)`.
///
/// `Q` must have a single term of top `X`-degree, a pure power of `X` with
/// unit coefficient.
pub fn divide_monic_x(p: &ModPoly, q: &ModPoly) -> Result<(ModPoly, ModPoly)> {
    p.check_modulus(q)?;
    let md = p.modulus;
    let d = q.x_degree().ok_or(Error::NotMonicInX)?;
    let mut top = q.terms.iter().filter(|(m, _)| m.x == d);
    let (lead_m, lead_c) = top.next().ok_or(Error::NotMonicInX)?;
    if top.next().is_some() || lead_m.y != 0 || lead_m.z != 0 {
        return Err(Error::NotMonicInX);
    }
    let lead_inv = md.inv(*lead_c).ok_or(Error::NotMonicInX)?;

    let mut rem = p.clone();
    let mut quot = ModPoly::zero(md, p.weight - q.weight);
    while let Some((&m, &c)) = rem.terms.iter().next_back() {
        if m.x < d {
            break;
        }
        let qc = md.mul(c, lead_inv);
        let qm = Monomial::new(m.x - d, m.y, m.z);
        quot.add_term(qm, qc);
        for (tm, tc) in &q.terms {
            rem.add_term(Monomial::new(qm.x + tm.x, qm.y + tm.y, qm.z + tm.z), md.neg(md.mul(qc, *tc)));
        }
        debug_assert!(!rem.terms.contains_key(&m));
    }
    Ok((quot, rem))
}

/// Result of the filtration computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    /// `None` stands for `-inf`, the filtration of the zero form.
    pub weight: Option<Weight>,
    /// Number of successful divisions by `calA_p^(p^(m-1))`.
    pub drops: u32,
    /// `G(f) / calA_p^(drops p^(m-1))` mod `p^m`, a polynomial of the final
    /// weight.
    pub quotient: ModPoly,
}

impl Filtration {
    /// Integer lift of the quotient; its q-expansion is congruent to `f`
    /// mod `p^m`.
    pub fn witness(&self) -> IsobaricPoly {
        self.quotient.lift(LiftConvention::Least)
    }
}

/// Upper bound for the mod `p^m` filtration of a weight-`k` form given by
/// its q-expansion: repeatedly divides `G(f)` by `calA_p^(p^(m-1))` mod
/// `p^m` and lowers the weight by `(p - 1) p^(m-1)` per success.
pub fn filtration_bound(f: &QSeries, k: Weight, p: u64, m: u32) -> Result<Filtration> {
    filtration_bound_poly(&decompose_gamma14(f, k)?, p, m)
}

pub fn filtration_bound_poly(g: &IsobaricPoly, p: u64, m: u32) -> Result<Filtration> {
    require_prime_at_least_5(p)?;
    let modulus = Modulus::new(p, m)?;
    if g.has_z() {
        return Err(Error::InvalidArgument("filtrations are defined for modular forms (no E2 terms)".into()));
    }
    let mut current = ModPoly::reduce(g, modulus)?;
    if current.is_zero() {
        return Ok(Filtration { weight: None, drops: 0, quotient: current });
    }
    let divisor = ModPoly::reduce(&cal_a_p(p)?, modulus)?.pow(modulus.value() as u32 / p as u32);
    let mut drops = 0;
    loop {
        let (quot, rem) = divide_monic_x(&current, &divisor)?;
        if !rem.is_zero() {
            break;
        }
        current = quot;
        drops += 1;
    }
    Ok(Filtration { weight: Some(current.weight), drops, quotient: current })
}

/// `nu_p` value: a finite number, a lower bound when the search hit its cap,
/// or `+inf` for the zero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NuValue {
    Finite(u32),
    AtLeast(u32),
    Infinite,
}

impl NuValue {
    pub fn is_at_least(self, n: u32) -> bool {
        match self {
            NuValue::Finite(v) | NuValue::AtLeast(v) => v >= n,
            NuValue::Infinite => true,
        }
    }

    /// The certified lower bound, `None` meaning `+inf`.
    pub fn lower_bound(self) -> Option<u32> {
        match self {
            NuValue::Finite(v) | NuValue::AtLeast(v) => Some(v),
            NuValue::Infinite => None,
        }
    }
}

impl fmt::Display for NuValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NuValue::Finite(v) => write!(f, "{v}"),
            NuValue::AtLeast(v) => write!(f, ">={v}"),
            NuValue::Infinite => write!(f, "+inf"),
        }
    }
}

/// Membership tests for the powers of `I = <calA_p^p, p>` in
/// `Z_(p)[X, Y, Z]`.
///
/// Uses `I^n = calA_p^(pn) R + p I^(n-1)`: `G` lies in `I^n` iff
/// `calA_p^(pn)` divides `G` mod `p` and `(G - calA_p^(pn) H) / p` lies in
/// `I^(n-1)` for a lift `H` of the quotient. Two lifts differ by `p S`,
/// which moves the recursed polynomial by `calA_p^(pn) S`, an element of
/// `I^(n-1)`; the verdict does not depend on the lift.
#[derive(Debug)]
pub struct QuasiValuation {
    p: u64,
    modulus: Modulus,
    cal_a: IsobaricPoly,
    lift: LiftConvention,
    /// `powers[n] = (calA_p^(pn), its reduction mod p)`
    powers: Mutex<Vec<Arc<(IsobaricPoly, ModPoly)>>>,
}

impl QuasiValuation {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_lift(p, LiftConvention::Least)
    }

    pub fn with_lift(p: u64, lift: LiftConvention) -> Result<Self> {
        require_prime_at_least_5(p)?;
        let modulus = Modulus::new(p, 1)?;
        let cal_a = cal_a_p(p)?;
        Ok(QuasiValuation { p, modulus, cal_a, lift, powers: Mutex::new(Vec::new()) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn cal_a(&self) -> &IsobaricPoly {
        &self.cal_a
    }

    fn power(&self, n: usize) -> Arc<(IsobaricPoly, ModPoly)> {
        let mut cache = self.powers.lock().expect("cache lock");
        if cache.is_empty() {
            let one = IsobaricPoly::one();
            let one_bar = ModPoly::reduce(&one, self.modulus).expect("1 is p-integral");
            cache.push(Arc::new((one, one_bar)));
        }
        while cache.len() <= n {
            let step = self.cal_a.pow(self.p as u32);
            let next = &cache.last().expect("nonempty").0 * &step;
            let next_bar = ModPoly::reduce(&next, self.modulus).expect("calA_p is p-integral");
            cache.push(Arc::new((next, next_bar)));
        }
        cache[n].clone()
    }

    /// Decides `g in <calA_p^p, p>^n`.
    pub fn contains(&self, g: &IsobaricPoly, n: u32) -> Result<bool> {
        let mut g = g.clone();
        let p_inv = Rational::new(1.into(), BigInt::from(self.p));
        for level in (1..=n as usize).rev() {
            if g.is_zero() {
                return Ok(true);
            }
            let g_bar = ModPoly::reduce(&g, self.modulus)?;
            let h = if g_bar.is_zero() {
                None
            } else {
                let pw = self.power(level);
                let (quot, rem) = divide_monic_x(&g_bar, &pw.1)?;
                if !rem.is_zero() {
                    return Ok(false);
                }
                Some((quot.lift(self.lift), pw))
            };
            if let Some((h, pw)) = h {
                g = &g - &(&pw.0 * &h);
            }
            debug_assert!(g.terms().all(|(_, c)| self.modulus.reduce(c).map(|r| r == 0).unwrap_or(false)));
            g = g.scale(&p_inv);
        }
        Ok(true)
    }

    /// `nu_p(g)`, searching `n = 1, ..., cap`.
    pub fn nu(&self, g: &IsobaricPoly, cap: u32) -> Result<NuValue> {
        if g.is_zero() {
            return Ok(NuValue::Infinite);
        }
        // Validate p-integrality even when the answer is 0.
        ModPoly::reduce(g, self.modulus)?;
        for n in 1..=cap {
            if !self.contains(g, n)? {
                return Ok(NuValue::Finite(n - 1));
            }
        }
        Ok(NuValue::AtLeast(cap))
    }
}

pub fn ideal_membership(g: &IsobaricPoly, n: u32, p: u64) -> Result<bool> {
    QuasiValuation::new(p)?.contains(g, n)
}

pub fn nu_p(g: &IsobaricPoly, p: u64, cap: u32) -> Result<NuValue> {
    QuasiValuation::new(p)?.nu(g, cap)
}

/// True when every coefficient of `g` has p-adic order at least `e`.
pub fn coefficients_divisible(g: &IsobaricPoly, p: u64, e: i64) -> bool {
    g.min_coeff_ord_p(p).is_at_least(e)
}
