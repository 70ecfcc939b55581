//! Taylor coefficients at the CM point `tau0 = i/2`.
//!
//! The Shimura-Maass derivative satisfies `d^n f = G(D^n f; Theta, F2, E2*)`,
//! so `c_n(f) = d^n f(tau0) / Omega^(2n + k)` is obtained by substituting the
//! normalised values
//!
//! ```text
//! Theta(tau0) / Omega^(1/2) = 2^(5/8)        = t^5
//! F2(tau0)    / Omega^2     = 2^(-5/2)       = t^4 / 8
//! E2*(tau0)   / Omega^2     = -3 * 2^(3/2)   = -6 t^4
//! ```
//!
//! into the polynomial model of `D^n f`, with `t = 2^(1/8)`. Romik's
//! `d(n)` is `c_{2n}(Theta) / t^5`.

use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{int, is_6_integral, rat, require_prime_at_least_5, AlgebraicNumber, PadicOrder, Rational};
use crate::qmring::{cal_a_p, e4_model, IsobaricPoly, Weight};

/// `[x v y] = x (x-1) ... (y+1)`, with `[y v y] = 1`.
pub fn bracket(x: &Rational, y: &Rational) -> Result<Rational> {
    let diff = x - y;
    if !diff.is_integer() || diff < Rational::zero() {
        return Err(Error::InvalidBracket { x: x.to_string(), y: y.to_string() });
    }
    let mut acc = Rational::one();
    let mut cur = x.clone();
    while &cur > y {
        acc *= &cur;
        cur -= Rational::one();
    }
    Ok(acc)
}

/// The modular forms `f_0 = f, f_1, f_2, ...` with
/// `f_{n+1} = D f_n - (k + 2n)/12 E2 f_n - n(n + k - 1)/144 E4 f_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZagierSequence {
    pub k: Weight,
    pub forms: Vec<IsobaricPoly>,
}

fn require_modular(f: &IsobaricPoly, k: Weight) -> Result<()> {
    if f.weight() != k {
        return Err(Error::WeightMismatch { left: f.weight(), right: k });
    }
    if f.has_z() {
        return Err(Error::InvalidArgument("expected a modular form (no E2 terms)".into()));
    }
    Ok(())
}

pub fn zagier_f_sequence(f: &IsobaricPoly, k: Weight, n_max: usize) -> Result<ZagierSequence> {
    require_modular(f, k)?;
    let kr = k.as_rational();
    let e4 = e4_model();
    let z = IsobaricPoly::z();
    let mut forms = vec![f.clone()];
    for n in 0..n_max {
        let nr = int(n as i64);
        let fn_ = &forms[n];
        let mut next = &fn_.d() - &(&z * fn_).scale(&((&kr + int(2) * &nr) / int(12)));
        if n > 0 {
            let c = &nr * (&nr + &kr - int(1)) / int(144);
            next = &next - &(&e4 * &forms[n - 1]).scale(&c);
        }
        if next.has_z() {
            return Err(Error::NonModularResidue { index: n + 1 });
        }
        forms.push(next);
    }
    Ok(ZagierSequence { k, forms })
}

/// `D^n f = sum_i C(n, i) [n+k-1 v n+k-1-i] f_{n-i} (E2/12)^i`.
pub fn dn_via_zagier(f: &IsobaricPoly, k: Weight, n: usize) -> Result<IsobaricPoly> {
    let seq = zagier_f_sequence(f, k, n)?;
    let top = int(n as i64) + k.as_rational() - int(1);
    let z12 = IsobaricPoly::z().scale(&rat(1, 12));
    let mut z_pow = IsobaricPoly::one();
    let mut acc = IsobaricPoly::zero(k + Weight::int(2 * n as i64));
    for i in 0..=n {
        let coeff = Rational::from_integer(binomial(BigInt::from(n), BigInt::from(i)))
            * bracket(&top, &(&top - int(i as i64)))?;
        acc = &acc + &(&seq.forms[n - i] * &z_pow).scale(&coeff);
        z_pow = &z_pow * &z12;
    }
    Ok(acc)
}

/// Substitutes the normalised CM values at `i/2` into `P(X, Y, Z)`.
pub fn cm_eval(p: &IsobaricPoly) -> AlgebraicNumber {
    let mut out = AlgebraicNumber::zero();
    for (m, c) in p.terms() {
        // X^a Y^b Z^c -> t^(5a + 4b + 4c) (-6)^c / 8^b
        let e = 5 * m.x as usize + 4 * (m.y + m.z) as usize;
        let scale = Rational::new(BigInt::from(-6).pow(m.z), BigInt::from(8).pow(m.y));
        out = &out + &AlgebraicNumber::monomial(c * scale, e);
    }
    out
}

/// The only `t`-power a weight-`w` polynomial can evaluate to: each
/// monomial satisfies `a = 2w - 4(b + c)`, so its exponent
/// `5a + 4(b + c) = 10w - 16(b + c)` is `10w` mod 8.
pub fn cm_support_index(w: Weight) -> usize {
    (5 * w.halves()).rem_euclid(8) as usize
}

/// `cm_eval` plus the structural checks that every value of a `D^n f`
/// must pass: support on the single `t`-power fixed by the weight, and
/// integrality away from 2 and 3.
pub fn checked_cm_value(p: &IsobaricPoly) -> Result<AlgebraicNumber> {
    let v = cm_eval(p);
    let expected = cm_support_index(p.weight());
    let support = v.support();
    if support.iter().any(|&j| j != expected) {
        return Err(Error::UnexpectedSupport { expected, found: support });
    }
    if !is_6_integral(v.coord(expected)) {
        return Err(Error::NormalizationViolated(v.to_string()));
    }
    Ok(v)
}

/// `f, D f, D^2 f, ...` computed by iterating the derivative on the
/// polynomial model.
#[derive(Debug, Clone)]
pub struct DerivativeLadder {
    k: Weight,
    forms: Vec<IsobaricPoly>,
}

impl DerivativeLadder {
    pub fn new(f: &IsobaricPoly, k: Weight) -> Result<Self> {
        require_modular(f, k)?;
        Ok(DerivativeLadder { k, forms: vec![f.clone()] })
    }

    pub fn build(f: &IsobaricPoly, k: Weight, n_max: usize) -> Result<Self> {
        let mut ladder = Self::new(f, k)?;
        ladder.extend_to(n_max);
        Ok(ladder)
    }

    pub fn k(&self) -> Weight {
        self.k
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn extend_to(&mut self, n_max: usize) {
        while self.forms.len() <= n_max {
            let next = self.forms.last().expect("ladder starts with f").d();
            self.forms.push(next);
        }
    }

    /// `D^n f`; panics if the ladder has not been built that far.
    pub fn get(&self, n: usize) -> &IsobaricPoly {
        &self.forms[n]
    }

    /// `c_n(f)`, the normalised value of `d^n f` at `i/2`.
    pub fn c_n(&self, n: usize) -> Result<AlgebraicNumber> {
        checked_cm_value(self.get(n))
    }
}

pub fn c_n(f: &IsobaricPoly, k: Weight, n: usize) -> Result<AlgebraicNumber> {
    DerivativeLadder::build(f, k, n)?.c_n(n)
}

fn romik_from_c(c: &AlgebraicNumber) -> Result<BigInt> {
    // 1 / t^5 = t^3 / 2
    let d = c * &AlgebraicNumber::monomial(rat(1, 2), 3);
    let r = d.as_rational().ok_or_else(|| Error::UnexpectedSupport { expected: 5, found: c.support() })?;
    if !r.is_integer() {
        return Err(Error::NonIntegerResult(r.to_string()));
    }
    Ok(r.to_integer())
}

/// Romik's `d(n) = c_{2n}(Theta) / 2^(5/8)`.
pub fn romik_d(n: usize) -> Result<BigInt> {
    Ok(romik_sequence(n)?.pop().expect("n + 1 values"))
}

/// `d(0), ..., d(n_max)` from a single derivative ladder.
pub fn romik_sequence(n_max: usize) -> Result<Vec<BigInt>> {
    let ladder = DerivativeLadder::build(&IsobaricPoly::x(), Weight::from_halves(1), 2 * n_max)?;
    romik_from_ladder(&ladder, 0..=n_max)
}

/// `d(n)` for `n` in `range`, reading `D^(2n) Theta` from a prebuilt ladder
/// of `Theta`.
pub fn romik_from_ladder(ladder: &DerivativeLadder, range: RangeInclusive<usize>) -> Result<Vec<BigInt>> {
    assert_eq!(ladder.get(0), &IsobaricPoly::x(), "ladder must start at Theta");
    range
        .map(|n| {
            let c = ladder.c_n(2 * n)?;
            if !c.is_zero() && c.support() != [5] {
                return Err(Error::UnexpectedSupport { expected: 5, found: c.support() });
            }
            romik_from_c(&c)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CongruenceTarget {
    /// Romik's `d(n)`.
    RomikD,
    /// `c_n` of the named form.
    CmCoefficient(String),
}

impl fmt::Display for CongruenceTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CongruenceTarget::RomikD => write!(f, "d(n)"),
            CongruenceTarget::CmCoefficient(name) => write!(f, "c_n({name})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceEntry {
    pub n: usize,
    pub ord: PadicOrder,
    /// `ord >= m`
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceReport {
    pub p: u64,
    pub m: u32,
    pub target: CongruenceTarget,
    /// Index from which a proven result predicts `ord >= m`; `None` when no
    /// result applies to this `p`.
    pub bound: Option<usize>,
    /// Sorted by `n`.
    pub entries: Vec<CongruenceEntry>,
    /// The target values themselves, aligned with `entries`.
    pub values: Vec<AlgebraicNumber>,
}

impl CongruenceReport {
    /// Entries at or past the bound that fail `ord >= m`. Always empty when
    /// there is no bound.
    pub fn violations(&self) -> Vec<&CongruenceEntry> {
        match self.bound {
            None => Vec::new(),
            Some(b) => self.entries.iter().filter(|e| e.n >= b && !e.satisfied).collect(),
        }
    }

    pub fn holds(&self) -> bool {
        self.violations().is_empty()
    }
}

/// First `n` from which `d(n) = 0 mod p^m` is known for `p = 3 mod 4`:
/// `ceil((m-1) p^2 / 2)` for `m >= 2`, and `(p^2 + 1) / 2` for `m = 1`.
pub fn romik_bound(p: u64, m: u32) -> Option<usize> {
    if p % 4 != 3 || p < 5 || m == 0 {
        return None;
    }
    let p2 = (p * p) as usize;
    Some(if m == 1 { (p2 + 1) / 2 } else { ((m as usize - 1) * p2).div_ceil(2) })
}

fn entries_for(values: &[AlgebraicNumber], ns: &[usize], p: u64, m: u32) -> Result<Vec<CongruenceEntry>> {
    ns.iter()
        .zip(values)
        .map(|(&n, v)| {
            let ord = v.ord_p(p)?;
            if !ord.is_at_least(0) {
                return Err(Error::NormalizationViolated(v.to_string()));
            }
            Ok(CongruenceEntry { n, ord, satisfied: ord.is_at_least(m as i64) })
        })
        .collect()
}

/// `ord_p(d(n))` for `n` in `range`, against the known bound when `p = 3
/// mod 4`. For other primes the report is exploratory.
pub fn congruence_scan(p: u64, m: u32, range: RangeInclusive<usize>) -> Result<CongruenceReport> {
    let ladder = DerivativeLadder::build(&IsobaricPoly::x(), Weight::from_halves(1), 2 * *range.end())?;
    congruence_scan_with(&ladder, p, m, range)
}

/// [`congruence_scan`] reusing a ladder of `Theta` that reaches
/// `D^(2 * range.end())`.
pub fn congruence_scan_with(
    ladder: &DerivativeLadder,
    p: u64,
    m: u32,
    range: RangeInclusive<usize>,
) -> Result<CongruenceReport> {
    require_prime_at_least_5(p)?;
    let ns: Vec<usize> = range.clone().collect();
    let values = romik_from_ladder(ladder, range)?
        .into_iter()
        .map(|d| AlgebraicNumber::from_rational(Rational::from_integer(d)))
        .collect::<Vec<_>>();
    let entries = entries_for(&values, &ns, p, m)?;
    Ok(CongruenceReport { p, m, target: CongruenceTarget::RomikD, bound: romik_bound(p, m), entries, values })
}

/// `ord_p(c_n(f))` for `n` in `range` against `n >= (m-1) p^2`, the bound
/// for weight-`k` forms and primes inert or ramified in `Q(i)`.
pub fn cm_congruence_scan(
    f: &IsobaricPoly,
    k: Weight,
    name: &str,
    p: u64,
    m: u32,
    range: RangeInclusive<usize>,
) -> Result<CongruenceReport> {
    require_prime_at_least_5(p)?;
    let ladder = DerivativeLadder::build(f, k, *range.end())?;
    let ns: Vec<usize> = range.collect();
    let values = ns.iter().map(|&n| ladder.c_n(n)).collect::<Result<Vec<_>>>()?;
    let entries = entries_for(&values, &ns, p, m)?;
    let bound = (p % 4 == 3 && m >= 2).then(|| (m as usize - 1) * (p * p) as usize);
    Ok(CongruenceReport { p, m, target: CongruenceTarget::CmCoefficient(name.to_string()), bound, entries, values })
}

/// `ord_p(c_n(E_{p-1})) >= 1` for `n` in `range`; needs `p = 3 mod 4` so
/// that `p` is inert in `Q(i)`.
pub fn verify_eisenstein_cm_congruence(p: u64, range: RangeInclusive<usize>) -> Result<CongruenceReport> {
    require_prime_at_least_5(p)?;
    if p % 4 != 3 {
        return Err(Error::UnsupportedPrime { p, reason: "p must be 3 mod 4 (inert in Q(i))" });
    }
    let mut report = cm_congruence_scan(&cal_a_p(p)?, Weight::int(p as i64 - 1), &format!("E_{}", p - 1), p, 1, range)?;
    report.bound = Some(0);
    Ok(report)
}
