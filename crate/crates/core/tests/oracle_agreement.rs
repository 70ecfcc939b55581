use qmf_core::cmtaylor::romik_sequence;
use qmf_core::oracle::{eisenstein_checks, numeric_constant_a, numeric_d, numeric_d_range, theta_constant_checks, DEFAULT_RADIUS};

#[test]
fn contour_values_match_exact_sequence() {
    let exact = romik_sequence(5).unwrap();
    let numeric = numeric_d_range(5, 90, DEFAULT_RADIUS).unwrap();
    for (n, (e, d)) in numeric.iter().zip(&exact).enumerate() {
        assert!(e.matches_integer(d, 20), "n = {n}: {} vs {d}", e.value);
        assert!(e.error.to_f64() < 1e-30);
    }
}

#[test]
fn other_radius_agrees() {
    let e = numeric_d(3, 60, 0.3).unwrap();
    assert!(e.matches_integer(&51.into(), 20), "{}", e.value);
}

#[test]
fn closed_forms_at_i_over_2() {
    for c in theta_constant_checks(60).unwrap().into_iter().chain(eisenstein_checks(60).unwrap()) {
        assert!(c.within(50), "{}: {} vs {}", c.name, c.computed, c.expected);
    }
}

#[test]
fn a_to_thirty_digits() {
    let a = numeric_constant_a(30).unwrap();
    assert_eq!(a.to_decimal(25), "1.0864348112133080145753161");
}
