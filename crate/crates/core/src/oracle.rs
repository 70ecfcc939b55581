//! High-precision numerical cross-checks at `tau0 = i/2`.
//!
//! Nothing here touches the polynomial model. Theta constants and
//! Eisenstein series are summed directly in fixed-point arithmetic, and
//! Romik's `d(n)` is read off the Taylor expansion
//!
//! ```text
//! (1 - w)^(-1/2) theta3(i (1 + w) / (1 - w))
//!     = theta3(i) * sum_n d(n) / (2n)! * (C w)^(2n),   C = Gamma(1/4)^4 / (8 pi^2 sqrt 2)
//! ```
//!
//! by trapezoidal sums on the circle `|w| = r`. Each coefficient is computed
//! from `M` and `2M` samples and the disagreement is reported as the error.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Extra bits carried beyond the requested number of decimal digits.
pub const GUARD_BITS: u32 = 64;

pub const DEFAULT_RADIUS: f64 = 0.5;

/// Bits needed for `digits` decimal digits plus [`GUARD_BITS`].
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
}

/// A fixed-point real `mant * 2^(-bits)`.
///
/// Binary operations require both operands to carry the same `bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    bits: u32,
}

impl BigFloat {
    pub fn zero(bits: u32) -> Self {
        BigFloat { mant: BigInt::zero(), bits }
    }

    pub fn from_int(n: impl Into<BigInt>, bits: u32) -> Self {
        BigFloat { mant: n.into() << bits, bits }
    }

    pub fn from_ratio(num: impl Into<BigInt>, den: impl Into<BigInt>, bits: u32) -> Self {
        BigFloat { mant: (num.into() << bits) / den.into(), bits }
    }

    /// Exact for finite `x` whose binary expansion stops within 60 places.
    pub fn from_f64(x: f64, bits: u32) -> Self {
        let scaled = BigInt::from(
            (x * 2f64.powi(60)).to_i128().expect("finite f64 of moderate size"),
        );
        let mant = if bits >= 60 { scaled << (bits - 60) } else { scaled >> (60 - bits) };
        BigFloat { mant, bits }
    }

    /// `10^(-e)`.
    pub fn pow10_neg(e: u32, bits: u32) -> Self {
        Self::from_ratio(1, BigInt::from(10u32).pow(e), bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        BigFloat { mant: self.mant.abs(), bits: self.bits }
    }

    pub fn to_f64(&self) -> f64 {
        let excess = self.mant.bits().saturating_sub(60);
        let m = (&self.mant >> excess).to_f64().unwrap_or(f64::NAN);
        m * 2f64.powi(excess as i32 - self.bits as i32)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        BigFloat { mant: &self.mant * k, bits: self.bits }
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        BigFloat { mant: &self.mant / k, bits: self.bits }
    }

    /// Multiplies by `2^e`.
    pub fn shift(&self, e: i64) -> Self {
        let mant = if e >= 0 { &self.mant << e as u64 } else { &self.mant >> (-e) as u64 };
        BigFloat { mant, bits: self.bits }
    }

    pub fn div(&self, other: &Self) -> Self {
        assert_eq!(self.bits, other.bits, "precision mismatch");
        assert!(!other.is_zero(), "division by zero");
        BigFloat { mant: (&self.mant << self.bits) / &other.mant, bits: self.bits }
    }

    pub fn recip(&self) -> Self {
        BigFloat::from_int(1, self.bits).div(self)
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "square root of a negative number");
        BigFloat { mant: (&self.mant << self.bits).sqrt(), bits: self.bits }
    }

    pub fn powu(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = BigFloat::from_int(1, self.bits);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Rounded to `frac` digits after the decimal point.
    pub fn to_decimal(&self, frac: usize) -> String {
        let scale = BigInt::from(10u32).pow(frac as u32);
        let half = BigInt::one() << self.bits >> 1u32;
        let r: BigInt = (self.mant.abs() * scale + half) >> self.bits;
        let digits = r.to_string();
        let digits = if digits.len() <= frac { format!("{}{}", "0".repeat(frac + 1 - digits.len()), digits) } else { digits };
        let (int_part, frac_part) = digits.split_at(digits.len() - frac);
        let sign = if self.is_negative() && !r.is_zero() { "-" } else { "" };
        if frac == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(f.precision().unwrap_or(30)))
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.bits == other.bits).then(|| self.mant.cmp(&other.mant))
    }
}

impl Add for &BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: &BigFloat) -> BigFloat {
        assert_eq!(self.bits, rhs.bits, "precision mismatch");
        BigFloat { mant: &self.mant + &rhs.mant, bits: self.bits }
    }
}

impl Sub for &BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: &BigFloat) -> BigFloat {
        assert_eq!(self.bits, rhs.bits, "precision mismatch");
        BigFloat { mant: &self.mant - &rhs.mant, bits: self.bits }
    }
}

impl Mul for &BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: &BigFloat) -> BigFloat {
        assert_eq!(self.bits, rhs.bits, "precision mismatch");
        BigFloat { mant: (&self.mant * &rhs.mant) >> self.bits, bits: self.bits }
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat { mant: -&self.mant, bits: self.bits }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Complex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        assert_eq!(re.bits, im.bits, "precision mismatch");
        Complex { re, im }
    }

    pub fn from_real(re: BigFloat) -> Self {
        let bits = re.bits;
        Complex { re, im: BigFloat::zero(bits) }
    }

    pub fn bits(&self) -> u32 {
        self.re.bits
    }

    pub fn conj(&self) -> Self {
        Complex { re: self.re.clone(), im: -&self.im }
    }

    pub fn scale(&self, k: &BigFloat) -> Self {
        Complex { re: &self.re * k, im: &self.im * k }
    }

    pub fn norm_sqr(&self) -> BigFloat {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> BigFloat {
        self.norm_sqr().sqrt()
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Complex { re: self.re.div(&n), im: (-&self.im).div(&n) }
    }

    /// Principal branch, argument in `(-pi/2, pi/2]`.
    pub fn sqrt(&self) -> Self {
        let bits = self.bits();
        let r = self.abs();
        if !self.re.is_negative() {
            let s = (&r + &self.re).shift(-1).sqrt();
            if s.is_zero() {
                return Complex::from_real(BigFloat::zero(bits));
            }
            let im = self.im.div(&s).shift(-1);
            Complex { re: s, im }
        } else {
            let t = (&r - &self.re).shift(-1).sqrt();
            let re = self.im.abs().div(&t).shift(-1);
            let im = if self.im.is_negative() { -&t } else { t };
            Complex { re, im }
        }
    }

    /// Taylor series after halving the argument until it is below `2^-8`,
    /// then squaring back.
    pub fn exp(&self) -> Self {
        let bits = self.bits();
        let mag = self.re.to_f64().abs().max(self.im.to_f64().abs());
        let k = if mag > 0.0 { (mag.log2().ceil() as i64 + 8).max(0) } else { 0 };
        let w = Complex { re: self.re.shift(-k), im: self.im.shift(-k) };

        let mut sum = Complex::from_real(BigFloat::from_int(1, bits));
        let mut term = sum.clone();
        let mut i = 1u32;
        loop {
            term = (&term * &w).div_int(&BigInt::from(i));
            if term.re.mant.bits() <= 1 && term.im.mant.bits() <= 1 {
                break;
            }
            sum = &sum + &term;
            i += 1;
        }
        for _ in 0..k {
            sum = &sum * &sum;
        }
        sum
    }

    fn div_int(&self, k: &BigInt) -> Self {
        Complex { re: self.re.div_int(k), im: self.im.div_int(k) }
    }
}

impl Add for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        Complex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        Complex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        Complex {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

/// `pi` from Machin's formula.
pub fn pi(bits: u32) -> BigFloat {
    let work = bits + 16;
    let p = &arctan_recip(5, work).mul_int(&BigInt::from(16)) - &arctan_recip(239, work).mul_int(&BigInt::from(4));
    BigFloat { mant: p.mant >> 16u32, bits }
}

fn arctan_recip(x: u32, bits: u32) -> BigFloat {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = (BigInt::one() << bits) / &x;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    BigFloat { mant: sum, bits }
}

/// Arithmetic-geometric mean of two positive reals.
pub fn agm(a: &BigFloat, b: &BigFloat) -> BigFloat {
    let (mut a, mut b) = (a.clone(), b.clone());
    for _ in 0..256 {
        if (&a - &b).mant.abs() <= BigInt::from(2) {
            break;
        }
        let next_a = (&a + &b).shift(-1);
        b = (&a * &b).sqrt();
        a = next_a;
    }
    a
}

/// Precomputed constants at a fixed precision.
struct Constants {
    bits: u32,
    pi: BigFloat,
    agm: BigFloat,
}

impl Constants {
    fn new(bits: u32) -> Self {
        let sqrt2 = BigFloat::from_int(2, bits).sqrt();
        Constants { bits, pi: pi(bits), agm: agm(&BigFloat::from_int(1, bits), &sqrt2) }
    }

    fn one(&self) -> BigFloat {
        BigFloat::from_int(1, self.bits)
    }

    /// `Gamma(1/4) = sqrt((2 pi)^(3/2) / AGM(1, sqrt 2))`.
    fn gamma_quarter(&self) -> BigFloat {
        let two_pi = self.pi.shift(1);
        (&two_pi * &two_pi.sqrt()).div(&self.agm).sqrt()
    }

    /// `a = Gamma(1/4) / (sqrt 2 pi^(3/4)) = 2^(1/4) / sqrt(AGM(1, sqrt 2))`.
    fn a(&self) -> BigFloat {
        let pi34 = self.pi.sqrt().sqrt().powu(3);
        self.gamma_quarter().div(&(&BigFloat::from_int(2, self.bits).sqrt() * &pi34))
    }

    fn romik_c(&self) -> BigFloat {
        let g4 = self.gamma_quarter().powu(4);
        let den = &(&self.pi * &self.pi).mul_int(&BigInt::from(8)) * &BigFloat::from_int(2, self.bits).sqrt();
        g4.div(&den)
    }
}

pub fn gamma_quarter(digits: u32) -> BigFloat {
    Constants::new(bits_for_digits(digits)).gamma_quarter()
}

/// The constant `a = theta3(i)`, via `Gamma(1/4)`; the AGM iteration stops
/// once consecutive means agree to the last bit, so the error is a few ulps
/// of the working precision.
pub fn numeric_constant_a(digits: u32) -> Result<BigFloat> {
    if digits < 20 {
        return Err(Error::InvalidArgument(format!("at least 20 digits required, got {digits}")));
    }
    Ok(Constants::new(bits_for_digits(digits)).a())
}

/// `x^(m^2)` for `m = 0..=m_max`.
fn square_powers(x: &BigFloat, m_max: usize) -> Vec<BigFloat> {
    let one = BigFloat::from_int(1, x.bits);
    let x2 = x * x;
    let mut out = vec![one];
    let mut step = x.clone();
    for m in 0..m_max {
        let next = &out[m] * &step;
        out.push(next);
        step = &step * &x2;
    }
    out
}

/// Smallest `m` with `exp(-rate * m^2) < 2^-bits`.
fn square_cutoff(rate: f64, bits: u32) -> usize {
    ((bits as f64 + 8.0) * std::f64::consts::LN_2 / rate).sqrt().ceil() as usize + 1
}

/// `theta3(z) = sum_n exp(pi i n^2 z)` for `Im z > 0`.
pub fn theta3(z: &Complex) -> Complex {
    theta3_with_pi(z, &pi(z.bits()))
}

fn theta3_with_pi(z: &Complex, pi: &BigFloat) -> Complex {
    let bits = z.bits();
    let iz = Complex { re: -&(pi * &z.im), im: pi * &z.re };
    let q = iz.exp();
    let y = z.im.to_f64();
    assert!(y > 0.0, "theta3 needs Im z > 0");
    let n_max = square_cutoff(std::f64::consts::PI * y, bits);

    let q2 = &q * &q;
    let mut qn2 = q.clone();
    let mut step = &q * &q2;
    let mut tail = q.clone();
    for _ in 1..n_max {
        qn2 = &qn2 * &step;
        step = &step * &q2;
        tail = &tail + &qn2;
    }
    let two = BigInt::from(2);
    Complex {
        re: &BigFloat::from_int(1, bits) + &tail.re.mul_int(&two),
        im: tail.im.mul_int(&two),
    }
}

/// A numerically computed quantity together with its closed form.
#[derive(Clone, Debug)]
pub struct ConstantCheck {
    pub name: &'static str,
    pub computed: BigFloat,
    pub expected: BigFloat,
}

impl ConstantCheck {
    pub fn difference(&self) -> BigFloat {
        (&self.computed - &self.expected).abs()
    }

    /// `|computed - expected| <= 10^(-e)`.
    pub fn within(&self, e: u32) -> bool {
        self.difference() <= BigFloat::pow10_neg(e, self.computed.bits)
    }
}

/// `theta2, theta3, theta4` at `i/2` and `theta3(i)` against their closed
/// forms in `a`.
pub fn theta_constant_checks(digits: u32) -> Result<Vec<ConstantCheck>> {
    let a = numeric_constant_a(digits)?;
    let bits = a.bits;
    let c = Constants::new(bits);
    let two = BigFloat::from_int(2, bits);
    let sqrt2 = two.sqrt();
    let root4_2 = sqrt2.sqrt();
    let one = c.one();

    // b = exp(-pi/8); theta_j(i/2) are sums of b^(m^2).
    let b = Complex::from_real(-&c.pi.shift(-3)).exp().re;
    let m_max = square_cutoff(std::f64::consts::PI / 8.0, bits);
    let pw = square_powers(&b, m_max);
    let mut t2 = BigFloat::zero(bits);
    let mut t3 = one.clone();
    let mut t4 = one.clone();
    for (m, v) in pw.iter().enumerate().skip(1) {
        if m % 2 == 1 {
            t2 = &t2 + &v.shift(1);
        } else {
            t3 = &t3 + &v.shift(1);
            t4 = if (m / 2) % 2 == 1 { &t4 - &v.shift(1) } else { &t4 + &v.shift(1) };
        }
    }

    let x = Complex::from_real(-&c.pi).exp().re;
    let theta3_i = square_powers(&x, square_cutoff(std::f64::consts::PI, bits))
        .iter()
        .skip(1)
        .fold(one.clone(), |acc, v| &acc + &v.shift(1));

    let two_3_8 = two.powu(3).sqrt().sqrt().sqrt();
    Ok(vec![
        ConstantCheck { name: "theta2(i/2)", computed: t2, expected: &two_3_8 * &a },
        ConstantCheck {
            name: "theta3(i/2)",
            computed: t3,
            expected: &(&sqrt2 + &one).sqrt().div(&root4_2) * &a,
        },
        ConstantCheck {
            name: "theta4(i/2)",
            computed: t4,
            expected: &(&sqrt2 - &one).sqrt().div(&root4_2) * &a,
        },
        ConstantCheck { name: "theta3(i)", computed: theta3_i, expected: a },
    ])
}

/// `E4 / a^8`, `E6 / a^12`, `F2 / a^4` and `E2* / a^4` at `i/2`, with
/// `q = e^-pi` and `E2* = E2 - 6/pi`.
pub fn eisenstein_checks(digits: u32) -> Result<Vec<ConstantCheck>> {
    let a = numeric_constant_a(digits)?;
    let bits = a.bits;
    let c = Constants::new(bits);
    let one = c.one();
    let q = Complex::from_real(-&c.pi).exp().re;
    let n_max = ((bits as f64 + 60.0) * std::f64::consts::LN_2 / std::f64::consts::PI).ceil() as u64 + 4;

    let mut s1 = BigFloat::zero(bits);
    let mut s3 = BigFloat::zero(bits);
    let mut s5 = BigFloat::zero(bits);
    let mut f2 = BigFloat::zero(bits);
    let mut qn = one.clone();
    for n in 1..=n_max {
        qn = &qn * &q;
        let lambert = qn.div(&(&one - &qn));
        let nb = BigInt::from(n);
        s1 = &s1 + &lambert.mul_int(&nb);
        let n3 = &nb * &nb * &nb;
        s3 = &s3 + &lambert.mul_int(&n3);
        s5 = &s5 + &lambert.mul_int(&(&n3 * &nb * &nb));
        if n % 2 == 1 {
            f2 = &f2 + &qn.div(&(&one - &(&qn * &qn))).mul_int(&nb);
        }
    }
    let e4 = &one + &s3.mul_int(&BigInt::from(240));
    let e6 = &one - &s5.mul_int(&BigInt::from(504));
    let e2 = &one - &s1.mul_int(&BigInt::from(24));
    let e2_star = &e2 - &BigFloat::from_int(6, bits).div(&c.pi);

    let a4 = a.powu(4);
    let a8 = &a4 * &a4;
    Ok(vec![
        ConstantCheck { name: "E4(i/2)/a^8", computed: e4.div(&a8), expected: BigFloat::from_ratio(33, 4, bits) },
        ConstantCheck {
            name: "E6(i/2)/a^12",
            computed: e6.div(&(&a8 * &a4)),
            expected: BigFloat::from_ratio(-189, 8, bits),
        },
        ConstantCheck { name: "F2(i/2)/a^4", computed: f2.div(&a4), expected: BigFloat::from_ratio(1, 32, bits) },
        ConstantCheck { name: "E2*(i/2)/a^4", computed: e2_star.div(&a4), expected: BigFloat::from_ratio(-3, 2, bits) },
    ])
}

/// A value with an error estimate.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub value: BigFloat,
    pub error: BigFloat,
    /// Sample count of the finer of the two contour sums.
    pub samples: usize,
}

impl Estimate {
    /// `|value - x| <= 10^(-e)`.
    pub fn matches_integer(&self, x: &BigInt, e: u32) -> bool {
        let bits = self.value.bits;
        (&self.value - &BigFloat::from_int(x.clone(), bits)).abs() <= BigFloat::pow10_neg(e, bits)
    }
}

/// Values of `g(w) = (1-w)^(-1/2) theta3(i(1+w)/(1-w))` at the `N`-th roots
/// of unity scaled by `r`.
pub struct ContourSamples {
    radius: BigFloat,
    roots: Vec<Complex>,
    values: Vec<Complex>,
}

impl ContourSamples {
    pub fn new(bits: u32, radius: f64, samples: usize) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::InvalidArgument(format!("contour radius must lie in (0, 1), got {radius}")));
        }
        if samples == 0 {
            return Err(Error::InvalidArgument("at least one contour sample required".into()));
        }
        let r = BigFloat::from_f64(radius, bits);
        let pi = pi(bits);
        let two_pi = pi.shift(1);
        let one = Complex::from_real(BigFloat::from_int(1, bits));
        let i_unit = Complex::new(BigFloat::zero(bits), BigFloat::from_int(1, bits));

        let eval = |k: usize| -> (Complex, Complex) {
            let angle = two_pi.mul_int(&BigInt::from(k)).div_int(&BigInt::from(samples));
            let root = Complex::new(BigFloat::zero(bits), angle).exp();
            let w = root.scale(&r);
            let one_minus = &one - &w;
            let z = &(&i_unit * &(&one + &w)) * &one_minus.recip();
            let value = &one_minus.sqrt().recip() * &theta3_with_pi(&z, &pi);
            (root, value)
        };

        let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(samples);
        let chunk = samples.div_ceil(threads);
        let parts: Vec<Vec<(Complex, Complex)>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let eval = &eval;
                    s.spawn(move || (t * chunk..((t + 1) * chunk).min(samples)).map(eval).collect::<Vec<_>>())
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("sample thread panicked")).collect()
        });
        let (roots, values) = parts.into_iter().flatten().unzip();
        Ok(ContourSamples { radius: r, roots, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Trapezoidal estimate of the `w^j` coefficient using every
    /// `stride`-th sample.
    pub fn coefficient(&self, j: usize, stride: usize) -> Complex {
        let n = self.values.len();
        assert!(stride > 0 && n % stride == 0, "stride must divide the sample count");
        let bits = self.radius.bits;
        let mut acc = Complex::from_real(BigFloat::zero(bits));
        for k in (0..n).step_by(stride) {
            let root = self.roots[(j * k) % n].conj();
            acc = &acc + &(&self.values[k] * &root);
        }
        let m = BigInt::from(n / stride);
        let rj = self.radius.powu(j as u32);
        Complex { re: acc.re.div_int(&m).div(&rj), im: acc.im.div_int(&m).div(&rj) }
    }
}

/// Coarse sample count for coefficients up to `w^j_max`; the aliasing term
/// `r^M` then sits below the working precision.
pub fn default_samples(bits: u32, radius: f64, j_max: usize) -> usize {
    let per_bit = -radius.log2();
    (bits as f64 / per_bit).ceil() as usize + 2 * j_max + 16
}

fn validate(digits: u32, radius: f64) -> Result<()> {
    if digits < 20 {
        return Err(Error::InvalidArgument(format!("at least 20 digits required, got {digits}")));
    }
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidArgument(format!("contour radius must lie in (0, 1), got {radius}")));
    }
    Ok(())
}

/// Estimates of `d(n)` for `n = 0..=n_max` from one shared set of samples.
///
/// The reported error is the coarse/fine disagreement plus the imaginary
/// residue plus one rounding unit scaled into `d(n)` units. Fails with
/// [`Error::PrecisionExhausted`] once the error exceeds `10^(-digits/2)`.
pub fn numeric_d_range(n_max: usize, digits: u32, radius: f64) -> Result<Vec<Estimate>> {
    validate(digits, radius)?;
    let bits = bits_for_digits(digits);
    let coarse = default_samples(bits, radius, 2 * n_max);
    let samples = ContourSamples::new(bits, radius, 2 * coarse)?;
    let c = Constants::new(bits);
    let a = c.a();
    let romik_c = c.romik_c();
    let tolerance = BigFloat::pow10_neg(digits / 2, bits);

    let mut factorial = BigInt::one();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            factorial *= BigInt::from(2 * n - 1) * BigInt::from(2 * n);
        }
        let to_d = BigFloat::from_int(factorial.clone(), bits).div(&(&a * &romik_c.powu(2 * n as u32)));
        let fine = samples.coefficient(2 * n, 1);
        let rough = samples.coefficient(2 * n, 2);
        let value = &fine.re * &to_d;
        let spread = (&(&fine.re - &rough.re) * &to_d).abs();
        let residue = (&fine.im * &to_d).abs();
        let rounding = to_d.div(&samples.radius.powu(2 * n as u32)).shift(-i64::from(bits - GUARD_BITS)).abs();
        let error = &(&spread + &residue) + &rounding;
        if error > tolerance {
            return Err(Error::PrecisionExhausted { estimate: error.to_string(), tolerance: tolerance.to_string() });
        }
        out.push(Estimate { value, error, samples: samples.len() });
    }
    Ok(out)
}

pub fn numeric_d(n: usize, digits: u32, radius: f64) -> Result<Estimate> {
    Ok(numeric_d_range(n, digits, radius)?.pop().expect("n + 1 estimates"))
}

/// Coefficients of `w^(2k+1)` for `k = 0..=k_max`, which vanish because
/// all odd Shimura-Maass derivatives of `theta3` vanish at `i`.
pub fn odd_coefficients(k_max: usize, digits: u32, radius: f64) -> Result<Vec<Estimate>> {
    validate(digits, radius)?;
    let bits = bits_for_digits(digits);
    let coarse = default_samples(bits, radius, 2 * k_max + 1);
    let samples = ContourSamples::new(bits, radius, 2 * coarse)?;
    Ok((0..=k_max)
        .map(|k| {
            let fine = samples.coefficient(2 * k + 1, 1);
            let rough = samples.coefficient(2 * k + 1, 2);
            let error = &(&fine.re - &rough.re).abs() + &fine.im.abs();
            Estimate { value: fine.re, error, samples: samples.len() }
        })
        .collect())
}
