//! End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero
//! exit status if any criterion fails.

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmf_core::cmtaylor::{congruence_scan_with, dn_via_zagier, romik_from_ladder, verify_eisenstein_cm_congruence, DerivativeLadder};
use qmf_core::exactnum::Modulus;
use qmf_core::oracle::{numeric_d_range, theta_constant_checks, DEFAULT_RADIUS};
use qmf_core::padic::{coefficients_divisible, filtration_bound, NuValue, QuasiValuation};
use qmf_core::qmring::{cal_a_p, cal_a_p_via_gamma1, e4_model, e6_model, eval_to_qseries};
use qmf_core::qseries::{eisenstein_series, theta_series};
use qmf_core::{IsobaricPoly, Weight};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: qmf_core::Error) -> String {
    e.to_string()
}

/// `D^n Theta` for `n <= 80`, shared by the criteria that need it.
fn theta_ladder() -> &'static DerivativeLadder {
    static LADDER: OnceLock<DerivativeLadder> = OnceLock::new();
    LADDER.get_or_init(|| DerivativeLadder::build(&IsobaricPoly::x(), Weight::from_halves(1), 80).expect("Theta ladder"))
}

fn nu(p: u64) -> QuasiValuation {
    QuasiValuation::new(p).expect("supported prime")
}

fn generator_identities() -> Outcome {
    let e4 = eval_to_qseries(&e4_model(), 60) == eisenstein_series(4, 60).map_err(err)?;
    let e6 = eval_to_qseries(&e6_model(), 60) == eisenstein_series(6, 60).map_err(err)?;
    ensure(e4 && e6, || format!("E4 {e4}, E6 {e6}"))?;
    Ok("E4, E6 to q^59".into())
}

fn structure_equations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut polys = vec![IsobaricPoly::x(), IsobaricPoly::y(), IsobaricPoly::z()];
    for _ in 0..50 {
        let halves = rng.gen_range(1..=16);
        polys.push(common::random_sparse(&mut rng, halves, true, 6));
    }
    for p in &polys {
        ensure(eval_to_qseries(&p.d(), 40) == eval_to_qseries(p, 40).d(), || format!("mismatch for {p}"))?;
    }
    Ok(format!("{} polynomials at precision 40", polys.len()))
}

fn cal_a_dual_path() -> Outcome {
    for p in [5, 7, 11, 13] {
        let a = cal_a_p(p).map_err(err)?;
        ensure(a == cal_a_p_via_gamma1(p).map_err(err)?, || format!("paths differ at p = {p}"))?;
    }
    Ok("p = 5, 7, 11, 13".into())
}

fn zagier_formula() -> Outcome {
    let cases = [
        (IsobaricPoly::x(), Weight::from_halves(1)),
        (IsobaricPoly::y(), Weight::int(2)),
        (IsobaricPoly::x().pow(4), Weight::int(2)),
    ];
    for (f, k) in &cases {
        let ladder = DerivativeLadder::build(f, *k, 15).map_err(err)?;
        for n in 0..=15 {
            ensure(&dn_via_zagier(f, *k, n).map_err(err)? == ladder.get(n), || format!("f = {f}, n = {n}"))?;
        }
    }
    Ok("X, Y, X^4 up to n = 15".into())
}

fn non_modular_divisibility() -> Outcome {
    let ladder = theta_ladder();
    for (p, n, e) in [(5u64, 5usize, 1i64), (5, 25, 2), (7, 7, 1), (7, 49, 2)] {
        let g = ladder.get(n);
        let quasi_part = g - &g.modular_part();
        ensure(coefficients_divisible(&quasi_part, p, e), || format!("p = {p}, D^{n} Theta"))?;
    }
    Ok("D^5, D^25 (p = 5); D^7, D^49 (p = 7)".into())
}

fn check_nu(v: &QuasiValuation, g: &IsobaricPoly, m: u32, what: &str) -> Result<(), String> {
    ensure(v.contains(g, m).map_err(err)?, || {
        let actual = v.nu(g, m).map(|x| x.to_string()).unwrap_or_else(|e| e.to_string());
        format!("nu_{}({what}) = {actual} < {m}", v.p())
    })
}

fn nu_of_high_derivatives() -> Outcome {
    let v5 = nu(5);
    check_nu(&v5, theta_ladder().get(25), 2, "D^25 Theta")?;
    let f2 = DerivativeLadder::build(&IsobaricPoly::y(), Weight::int(2), 25).map_err(err)?;
    check_nu(&v5, f2.get(25), 2, "D^25 F2")?;
    Ok("nu_5(D^25 Theta) >= 2, nu_5(D^25 F2) >= 2".into())
}

fn nu_of_eisenstein_derivatives() -> Outcome {
    let (v5, v7) = (nu(5), nu(7));
    check_nu(&v5, &e4_model().d_n(2), 1, "D^2 E4")?;
    check_nu(&v7, &e6_model().d_n(2), 1, "D^2 E6")?;
    let e4_5 = DerivativeLadder::build(&e4_model().pow(5), Weight::int(20), 25).map_err(err)?;
    check_nu(&v5, e4_5.get(25), 3, "D^25 E4^5")?;
    Ok("D^2 E4 (p = 5), D^2 E6 (p = 7), D^25 E4^5 >= 3".into())
}

fn nu_growth() -> Outcome {
    let v5 = nu(5);
    let f = &e4_model().pow(5) * &IsobaricPoly::x();
    check_nu(&v5, &f, 1, "E4^5 Theta")?;
    let ladder = DerivativeLadder::build(&f, Weight::from_halves(41), 25).map_err(err)?;
    check_nu(&v5, ladder.get(25), 2, "D^25 (E4^5 Theta)")?;
    check_nu(&v5, theta_ladder().get(50), 3, "D^50 Theta")?;
    Ok("nu_5(D^25 E4^5 Theta) >= 2, nu_5(D^50 Theta) >= 3".into())
}

fn filtrations() -> Outcome {
    let prec = 40;
    let theta = theta_series(prec);
    let e4 = eisenstein_series(4, prec).map_err(err)?;

    let f = theta.mul(&e4);
    let filt = filtration_bound(&f, Weight::from_halves(9), 5, 1).map_err(err)?;
    ensure(filt.weight == Some(Weight::from_halves(1)), || format!("w(Theta E4) = {:?}", filt.weight))?;
    let md = Modulus::new(5, 1).map_err(err)?;
    let h = filt.witness().eval_to_qseries(prec);
    let a_pow = cal_a_p(5).map_err(err)?.pow(filt.drops).eval_to_qseries(prec);
    ensure(
        h.mul(&a_pow).reduce_mod(&md).map_err(err)? == f.reduce_mod(&md).map_err(err)?,
        || "witness not congruent mod 5".into(),
    )?;
    let h_alone = h.reduce_mod(&md).map_err(err)? == f.reduce_mod(&md).map_err(err)?;
    ensure(h_alone, || "lower-weight witness not congruent to Theta E4 mod 5".into())?;

    let filt = filtration_bound(&theta, Weight::from_halves(1), 5, 1).map_err(err)?;
    ensure(filt.weight == Some(Weight::from_halves(1)) && filt.drops == 0, || format!("w(Theta) = {:?}", filt.weight))?;

    let filt = filtration_bound(&e4, Weight::int(4), 5, 2).map_err(err)?;
    ensure(filt.weight == Some(Weight::int(4)), || format!("w_25(E4) = {:?}", filt.weight))?;
    Ok("w_5(Theta E4) = 1/2 with witness, w_5(Theta) = 1/2, w_25(E4) = 4".into())
}

fn romik_integrality() -> Outcome {
    let ladder = theta_ladder();
    let d = romik_from_ladder(ladder, 0..=40).map_err(err)?;
    for n in (1..=21).step_by(2) {
        let c = ladder.c_n(n).map_err(err)?;
        ensure(c.is_zero(), || format!("c_{n}(Theta) = {c}"))?;
    }
    Ok(format!("d(0..=40) integral, d(40) has {} digits; odd c_n vanish", d[40].to_string().len()))
}

fn romik_congruences() -> Outcome {
    let ladder = theta_ladder();
    let m2 = congruence_scan_with(ladder, 7, 2, 25..=35).map_err(err)?;
    ensure(m2.bound == Some(25), || format!("bound {:?}", m2.bound))?;
    ensure(m2.holds(), || format!("ord_7 < 2 at n = {:?}", m2.violations().iter().map(|e| e.n).collect::<Vec<_>>()))?;
    let m1 = congruence_scan_with(ladder, 7, 1, 25..=35).map_err(err)?;
    ensure(m1.bound == Some(25), || format!("bound {:?}", m1.bound))?;
    ensure(m1.holds(), || format!("ord_7 < 1 at n = {:?}", m1.violations().iter().map(|e| e.n).collect::<Vec<_>>()))?;
    Ok("ord_7 d(n) >= 2 and >= 1 for 25 <= n <= 35".into())
}

fn eisenstein_cm_congruence() -> Outcome {
    let mut failures = Vec::new();
    for (p, n_max) in [(7u64, 12usize), (11, 4)] {
        let r = verify_eisenstein_cm_congruence(p, 0..=n_max).map_err(err)?;
        for e in r.violations() {
            failures.push(format!("ord_{p} c_{}(E_{}) = {} ({})", e.n, p - 1, e.ord, r.values[e.n]));
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok("ord_7 c_n(E6) >= 1 (n <= 12), ord_11 c_n(E10) >= 1 (n <= 4)".into())
}

fn oracle_agreement() -> Outcome {
    let digits = 100;
    let exact = romik_from_ladder(theta_ladder(), 0..=8).map_err(err)?;
    let numeric = numeric_d_range(8, digits, DEFAULT_RADIUS).map_err(err)?;
    for (n, (e, d)) in numeric.iter().zip(&exact).enumerate() {
        ensure(e.matches_integer(d, 20), || format!("d({n}): numeric {} vs exact {d}", e.value))?;
    }
    for c in theta_constant_checks(digits).map_err(err)? {
        ensure(c.within(20), || format!("{} off by {:e}", c.name, c.difference().to_f64()))?;
    }
    Ok(format!("d(0..=8) and theta2/3/4(i/2) at {digits} digits"))
}

fn quasi_valuation_suite() -> Outcome {
    const CAP: u32 = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a1);
    let vals = [nu(5), nu(7)];
    let at_least = |v: NuValue, b: Option<u32>| match b {
        None => v == NuValue::Infinite,
        Some(b) => v.is_at_least(b.min(CAP)),
    };
    for case in 0..200 {
        let v = &vals[case % 2];
        let p = v.p();
        let a = v.cal_a();
        let step = 2 * (p as i64 - 1) * p as i64;
        let (e1, j1) = (rng.gen_range(0..=2), rng.gen_range(0..=1));
        let h_halves = rng.gen_range(0..=8);
        let x = common::ideal_element(&mut rng, a, p, e1, j1, h_halves, true);
        let j2 = rng.gen_range(0..=j1);
        let e2 = rng.gen_range(0..=2);
        let y = common::ideal_element(&mut rng, a, p, e2, j2, h_halves + step * (j1 - j2) as i64, true);

        let vx = v.nu(&x, CAP).map_err(err)?;
        let vy = v.nu(&y, CAP).map_err(err)?;
        let (bx, by) = (vx.lower_bound(), vy.lower_bound());
        let prod = bx.zip(by).map(|(a, b)| a + b);
        let min = match (bx, by) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let fail = |what: &str| format!("case {case} (p = {p}): {what}");
        ensure(at_least(v.nu(&(&x * &y), CAP).map_err(err)?, prod), || fail("nu(xy)"))?;
        let s = &x + &y;
        ensure(s.is_zero() || at_least(v.nu(&s, CAP).map_err(err)?, min.or(Some(CAP))), || fail("nu(x + y)"))?;
        let dx = x.d();
        ensure(dx.is_zero() || at_least(v.nu(&dx, CAP).map_err(err)?, bx), || fail("nu(Dx)"))?;
        let x0 = x.modular_part();
        ensure(x0.is_zero() || at_least(v.nu(&x0, CAP).map_err(err)?, bx), || fail("nu(x_0)"))?;
    }
    Ok("200 cases, p = 5, 7".into())
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let s = Duration::from_secs;
    let criteria = [
        Criterion { name: "generator identities", limit: s(1), run: generator_identities },
        Criterion { name: "structure equations", limit: s(5), run: structure_equations },
        Criterion { name: "calA_p dual path", limit: s(5), run: cal_a_dual_path },
        Criterion { name: "Zagier formula", limit: s(30), run: zagier_formula },
        Criterion { name: "non-modular part divisibility", limit: s(120), run: non_modular_divisibility },
        Criterion { name: "nu_5 of D^25 Theta and D^25 F2", limit: s(120), run: nu_of_high_derivatives },
        Criterion { name: "nu of D^2 E_(p-1) and D^25 E4^5", limit: s(300), run: nu_of_eisenstein_derivatives },
        Criterion { name: "nu_5 of D^25 (E4^5 Theta) and D^50 Theta", limit: s(600), run: nu_growth },
        Criterion { name: "filtrations", limit: s(60), run: filtrations },
        Criterion { name: "Romik integrality and odd vanishing", limit: s(600), run: romik_integrality },
        Criterion { name: "d(n) mod 7^2 and mod 7", limit: s(1800), run: romik_congruences },
        Criterion { name: "c_n(E_(p-1)) mod p", limit: s(300), run: eisenstein_cm_congruence },
        Criterion { name: "numerical oracle agreement", limit: s(120), run: oracle_agreement },
        Criterion { name: "quasi-valuation properties", limit: s(300), run: quasi_valuation_suite },
    ];

    let results: Vec<(Outcome, Duration)> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|c| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let out = (c.run)();
                    (out, start.elapsed())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| (Err("panicked".into()), Duration::ZERO)))
            .collect()
    });

    let mut failed = 0;
    for (i, (c, (out, elapsed))) in criteria.iter().zip(results).enumerate() {
        let out = out.and_then(|msg| {
            if elapsed <= c.limit {
                Ok(msg)
            } else {
                Err(format!("took {elapsed:.1?}, limit {:?}", c.limit))
            }
        });
        match out {
            Ok(msg) => println!("PASS {:>2} {} [{elapsed:.2?}]: {msg}", i + 1, c.name),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {} [{elapsed:.2?}]: {msg}", i + 1, c.name);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
