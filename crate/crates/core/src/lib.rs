//! Exact computations with quasimodular forms on `Gamma_1(4)`.
//!
//! The ring of quasimodular forms is modelled as isobaric polynomials in
//! `X, Y, Z = Theta, F2, E2` ([`qmring`]). On top of that model the crate
//! provides reduction mod `p^m`, the filtration criterion and the
//! quasi-valuation `nu_p` ([`padic`]), exact evaluation of Shimura-Maass
//! derivatives at the CM point `i/2` together with Romik's sequence `d(n)`
//! ([`cmtaylor`]), and an independent high-precision numerical check
//! ([`oracle`]).

pub mod cmtaylor;
pub mod error;
pub mod exactnum;
mod linalg;
pub mod oracle;
pub mod padic;
pub mod qmring;
pub mod qseries;

pub use error::{Error, Result};
pub use exactnum::{AlgebraicNumber, Modulus, PadicOrder, Rational};
pub use qmring::{Gamma1Poly, IsobaricPoly, Monomial, Weight};
pub use qseries::QSeries;
