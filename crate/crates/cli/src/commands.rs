use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use qmf_core::cmtaylor::{
    checked_cm_value, cm_congruence_scan, congruence_scan, romik_sequence, verify_eisenstein_cm_congruence,
    CongruenceReport,
};
use qmf_core::oracle::{eisenstein_checks, numeric_d_range, theta_constant_checks};
use qmf_core::padic::{filtration_bound, QuasiValuation, DEFAULT_NU_CAP};
use qmf_core::qmring::{decompose_gamma14, gamma14_dimension, DECOMPOSITION_GUARD};
use qmf_core::{IsobaricPoly, Weight};

use crate::form::Form;

/// Digits after the decimal point when printing oracle values.
const ORACLE_PRINT_DIGITS: usize = 30;
/// Agreement required between the oracle and the exact values, `10^-20`.
const ORACLE_TOLERANCE: u32 = 20;

pub enum CliError {
    Usage(String),
    Core(qmf_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_internal() => 3,
            CliError::Core(qmf_core::Error::PrecisionExhausted { .. }) => 1,
            CliError::Core(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            1 => "precision",
            3 => "internal",
            _ => "input",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => f.write_str(s),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<qmf_core::Error> for CliError {
    fn from(e: qmf_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub struct Report {
    pub inputs: Map<String, Value>,
    pub results: Vec<Value>,
    /// `Some(false)` turns into exit status 1.
    pub verified: Option<bool>,
    pub plain: Vec<String>,
}

pub type Outcome = Result<Report, CliError>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Claim {
    /// ord_p d(n) >= m from the known bound (p = 3 mod 4).
    #[value(alias = "thm1.5")]
    Romik,
    /// ord_p d(n) >= 1 for n >= (p^2 + 1) / 2.
    #[value(alias = "scherer")]
    RomikModP,
    /// ord_p c_n(f) >= m for n >= (m - 1) p^2; needs --form.
    #[value(alias = "thm1.4")]
    Cm,
    /// ord_p c_n(E_{p-1}) >= 1 for every n.
    #[value(alias = "lemma5.3")]
    EisensteinCm,
}

fn inputs(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn parse_form(text: &str, k: Option<&str>) -> Result<(Form, Weight), CliError> {
    let form = Form::parse(text)?;
    let w = form.weight();
    if let Some(k) = k {
        let expected = Weight::from_str(k)?;
        if expected != w {
            return Err(CliError::Usage(format!("{form} has weight {w}, not {expected}")));
        }
    }
    Ok((form, w))
}

fn require_modular(form: &Form) -> Result<(), CliError> {
    if form.is_modular() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{form} is quasimodular; this command needs a modular form")))
    }
}

/// `a..b` or `a..=b` (both inclusive), or a single `n`.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, CliError> {
    let bad = || CliError::Usage(format!("invalid range {s:?}; expected a..b"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo.trim(), hi.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let lo: usize = lo.parse().map_err(|_| bad())?;
    let hi: usize = hi.parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn poly_json(p: &IsobaricPoly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(m, c)| json!({ "x": m.x, "y": m.y, "z": m.z, "coeff": c.to_string() }))
        .collect();
    json!({ "weight": p.weight().to_string(), "polynomial": p.to_string(), "terms": terms })
}

pub fn expand(text: &str, prec: usize) -> Outcome {
    if prec == 0 {
        return Err(CliError::Usage("--prec must be positive".into()));
    }
    let form = Form::parse(text)?;
    let s = form.series(prec)?;
    let coeffs: Vec<Value> = s.coeffs().iter().map(|c| json!(c.to_string())).collect();
    Ok(Report {
        inputs: inputs(&[("form", json!(form.to_string())), ("prec", json!(prec))]),
        results: vec![json!({ "weight": form.weight().to_string(), "series": s.to_string(), "coefficients": coeffs })],
        verified: None,
        plain: vec![s.to_string()],
    })
}

pub fn decompose(text: &str, k: Option<&str>, prec: Option<usize>) -> Outcome {
    let (form, w) = parse_form(text, k)?;
    let prec = prec.unwrap_or(gamma14_dimension(w) + DECOMPOSITION_GUARD);
    let g = decompose_gamma14(&form.series(prec)?, w)?;
    Ok(Report {
        inputs: inputs(&[("form", json!(form.to_string())), ("k", json!(w.to_string())), ("prec", json!(prec))]),
        results: vec![poly_json(&g)],
        verified: None,
        plain: vec![g.to_string()],
    })
}

pub fn deriv(text: &str, k: Option<&str>, n: usize) -> Outcome {
    let (form, w) = parse_form(text, k)?;
    let g = form.poly()?.d_n(n);
    let mut result = poly_json(&g);
    let mut plain = vec![format!("D^{n} {form} = {g}")];
    if form.is_modular() {
        let c = checked_cm_value(&g)?;
        result["cm_value"] = json!(c.to_string());
        plain.push(format!("c_{n} = {c}"));
    }
    Ok(Report {
        inputs: inputs(&[("form", json!(form.to_string())), ("k", json!(w.to_string())), ("n", json!(n))]),
        results: vec![result],
        verified: None,
        plain,
    })
}

fn nu_cap(cap: Option<u32>) -> Result<u32, CliError> {
    if let Some(c) = cap {
        return Ok(c);
    }
    match std::env::var("QMF_NU_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("QMF_NU_CAP={v:?} is not a number"))),
        Err(_) => Ok(DEFAULT_NU_CAP),
    }
}

pub fn nu(text: &str, k: Option<&str>, n: usize, p: u64, cap: Option<u32>) -> Outcome {
    let (form, w) = parse_form(text, k)?;
    let cap = nu_cap(cap)?;
    let g = form.poly()?.d_n(n);
    let v = QuasiValuation::new(p)?.nu(&g, cap)?;
    let lower = v.lower_bound().map_or(json!(null), |b| json!(b));
    Ok(Report {
        inputs: inputs(&[
            ("form", json!(form.to_string())),
            ("k", json!(w.to_string())),
            ("n", json!(n)),
            ("p", json!(p)),
            ("cap", json!(cap)),
        ]),
        results: vec![json!({ "nu": v.to_string(), "lower_bound": lower })],
        verified: None,
        plain: vec![format!("nu_{p}(D^{n} {form}) = {v}")],
    })
}

pub fn filtration(text: &str, k: Option<&str>, p: u64, m: u32, prec: Option<usize>) -> Outcome {
    let (form, w) = parse_form(text, k)?;
    require_modular(&form)?;
    let prec = prec.unwrap_or(gamma14_dimension(w) + DECOMPOSITION_GUARD);
    let f = filtration_bound(&form.series(prec)?, w, p, m)?;
    let weight = f.weight.map_or("-inf".to_string(), |w| w.to_string());
    let witness = f.witness();
    Ok(Report {
        inputs: inputs(&[
            ("form", json!(form.to_string())),
            ("k", json!(w.to_string())),
            ("p", json!(p)),
            ("m", json!(m)),
            ("prec", json!(prec)),
        ]),
        results: vec![json!({ "filtration": weight, "drops": f.drops, "witness": witness.to_string() })],
        verified: None,
        plain: vec![format!("w_{{{p}^{m}}}({form}) <= {weight} ({} drops)", f.drops)],
    })
}

pub fn romik(range: &str) -> Outcome {
    let r = parse_range(range)?;
    let d = romik_sequence(*r.end())?;
    let mut results = Vec::new();
    let mut plain = Vec::new();
    for n in r.clone() {
        results.push(json!({ "n": n, "d": d[n].to_string() }));
        plain.push(format!("d({n}) = {}", d[n]));
    }
    Ok(Report {
        inputs: inputs(&[("range", json!(format!("{}..{}", r.start(), r.end())))]),
        results,
        verified: None,
        plain,
    })
}

fn report_entries(r: &CongruenceReport) -> (Vec<Value>, Vec<String>) {
    let mut results = Vec::new();
    let mut plain = Vec::new();
    let bound = r.bound;
    for (e, v) in r.entries.iter().zip(&r.values) {
        let in_scope = bound.is_some_and(|b| e.n >= b);
        results.push(json!({
            "n": e.n,
            "value": v.to_string(),
            "ord": e.ord.to_string(),
            "satisfied": e.satisfied,
            "in_scope": in_scope,
        }));
        let mark = match (in_scope, e.satisfied) {
            (false, _) => "-",
            (true, true) => "ok",
            (true, false) => "FAIL",
        };
        plain.push(format!("n = {:>3}  ord_{} = {:>4}  {mark}", e.n, r.p, e.ord.to_string()));
    }
    (results, plain)
}

pub fn verify(claim: Claim, p: u64, m: u32, range: &str, form: Option<&str>) -> Outcome {
    let r = parse_range(range)?;
    let report = match claim {
        Claim::Romik => {
            if qmf_core::cmtaylor::romik_bound(p, m).is_none() {
                return Err(CliError::Usage(format!("no known bound for p = {p}, m = {m}; need p = 3 mod 4 and m >= 1")));
            }
            congruence_scan(p, m, r.clone())?
        }
        Claim::RomikModP => {
            if m != 1 {
                return Err(CliError::Usage("romik-mod-p is the m = 1 congruence".into()));
            }
            if qmf_core::cmtaylor::romik_bound(p, 1).is_none() {
                return Err(CliError::Usage(format!("no known bound for p = {p}; need p = 3 mod 4")));
            }
            congruence_scan(p, 1, r.clone())?
        }
        Claim::Cm => {
            let text = form.ok_or_else(|| CliError::Usage("the cm claim needs --form".into()))?;
            let (f, w) = parse_form(text, None)?;
            require_modular(&f)?;
            cm_congruence_scan(&f.poly()?, w, &f.to_string(), p, m, r.clone())?
        }
        Claim::EisensteinCm => {
            if m != 1 {
                return Err(CliError::Usage("eisenstein-cm is a mod p statement".into()));
            }
            verify_eisenstein_cm_congruence(p, r.clone())?
        }
    };
    let holds = report.holds();
    let (results, mut plain) = report_entries(&report);
    let bound = report.bound.map_or(json!(null), |b| json!(b));
    plain.insert(
        0,
        format!(
            "{} mod {}^{}, bound n >= {}: {}",
            report.target,
            p,
            m,
            report.bound.map_or("none".to_string(), |b| b.to_string()),
            if holds { "holds" } else { "FAILS" }
        ),
    );
    let mut inp = inputs(&[
        ("claim", json!(claim.to_possible_value().expect("no skipped variants").get_name())),
        ("p", json!(p)),
        ("m", json!(m)),
        ("range", json!(format!("{}..{}", r.start(), r.end()))),
        ("bound", bound),
    ]);
    if let Some(f) = form {
        inp.insert("form".into(), json!(f));
    }
    Ok(Report { inputs: inp, results, verified: Some(holds), plain })
}

pub fn oracle_check(n_max: usize, digits: u32, radius: f64) -> Outcome {
    let exact = romik_sequence(n_max)?;
    let numeric = numeric_d_range(n_max, digits, radius)?;
    let mut results = Vec::new();
    let mut plain = Vec::new();
    let mut all = true;
    for (n, (e, d)) in numeric.iter().zip(&exact).enumerate() {
        let ok = e.matches_integer(d, ORACLE_TOLERANCE);
        all &= ok;
        results.push(json!({
            "check": format!("d({n})"),
            "exact": d.to_string(),
            "numeric": e.value.to_decimal(ORACLE_PRINT_DIGITS),
            "error_bound": format!("{:.3e}", e.error.to_f64()),
            "agrees": ok,
        }));
        plain.push(format!("d({n}) = {d}  numeric {}  {}", e.value.to_decimal(ORACLE_PRINT_DIGITS), if ok { "ok" } else { "FAIL" }));
    }
    for c in theta_constant_checks(digits)?.into_iter().chain(eisenstein_checks(digits)?) {
        let ok = c.within(ORACLE_TOLERANCE);
        all &= ok;
        results.push(json!({
            "check": c.name,
            "numeric": c.computed.to_decimal(ORACLE_PRINT_DIGITS),
            "closed_form": c.expected.to_decimal(ORACLE_PRINT_DIGITS),
            "difference": format!("{:.3e}", c.difference().to_f64()),
            "agrees": ok,
        }));
        plain.push(format!("{} = {}  {}", c.name, c.computed.to_decimal(ORACLE_PRINT_DIGITS), if ok { "ok" } else { "FAIL" }));
    }
    Ok(Report {
        inputs: inputs(&[
            ("n_max", json!(n_max)),
            ("digits", json!(digits)),
            ("radius", json!(radius.to_string())),
            ("tolerance", json!(format!("1e-{ORACLE_TOLERANCE}"))),
        ]),
        results,
        verified: Some(all),
        plain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("25..30").ok(), Some(25..=30));
        assert_eq!(parse_range("0..=3").ok(), Some(0..=3));
        assert_eq!(parse_range("7").ok(), Some(7..=7));
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("a..b").is_err());
    }
}
