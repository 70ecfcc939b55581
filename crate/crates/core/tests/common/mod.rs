#![allow(dead_code)]

use num_bigint::BigInt;
use qmf_core::exactnum::Rational;
use qmf_core::{IsobaricPoly, Monomial, Weight};

/// All monomials `X^a Y^b Z^c` of weight `halves / 2`, optionally without `Z`.
pub fn monomials(halves: i64, with_z: bool) -> Vec<Monomial> {
    let mut out = Vec::new();
    let max_yz = halves / 4;
    for b in 0..=max_yz {
        for c in 0..=(max_yz - b) {
            if c > 0 && !with_z {
                continue;
            }
            let a = halves - 4 * (b + c);
            out.push(Monomial::new(a as u32, b as u32, c as u32));
        }
    }
    out
}

/// The polynomial `sum coeffs[i] * monos[i]`; extra coefficients are ignored.
pub fn poly(halves: i64, monos: &[Monomial], coeffs: &[i64]) -> IsobaricPoly {
    let terms = monos
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| **c != 0)
        .map(|(m, c)| (*m, Rational::from_integer(BigInt::from(*c))));
    IsobaricPoly::from_terms(Weight::from_halves(halves), terms).expect("isobaric")
}

/// Up to `max_terms` random monomials of weight `halves / 2` with nonzero
/// coefficients in `[-9, 9]`.
pub fn random_sparse<R: rand::Rng>(rng: &mut R, halves: i64, with_z: bool, max_terms: usize) -> IsobaricPoly {
    let monos = monomials(halves, with_z);
    let count = rng.gen_range(1..=max_terms);
    let mut coeffs = vec![0i64; monos.len()];
    for _ in 0..count {
        let i = rng.gen_range(0..monos.len());
        let mut c = rng.gen_range(-9i64..=8);
        if c >= 0 {
            c += 1;
        }
        coeffs[i] = c;
    }
    poly(halves, &monos, &coeffs)
}

/// `p^e calA^(p j) h` with `h` sparse random of weight `h_halves / 2`.
pub fn ideal_element<R: rand::Rng>(
    rng: &mut R,
    cal_a: &IsobaricPoly,
    p: u64,
    e: u32,
    j: u32,
    h_halves: i64,
    with_z: bool,
) -> IsobaricPoly {
    let h = random_sparse(rng, h_halves, with_z, 4);
    (&cal_a.pow(p as u32 * j) * &h).scale(&Rational::from_integer(BigInt::from(p).pow(e)))
}
