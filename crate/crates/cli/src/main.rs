mod commands;
mod form;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use commands::{Outcome, Report};

#[derive(Parser, Debug)]
#[command(name = "qmf", version, about = "Quasimodular forms on Gamma_1(4): expansions, derivatives, p-adic filtrations and CM Taylor coefficients")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,

    /// Report `runtime_ms` as 0 so that repeated runs give identical output.
    #[arg(long, global = true)]
    no_timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Plain,
}

/// A form given either positionally or with `--form`.
#[derive(Args, Debug)]
pub struct FormArg {
    /// Form expression, e.g. `theta`, `f2`, `eisenstein:4`, `theta^3*f2`.
    #[arg(value_name = "FORM", required_unless_present = "form")]
    positional: Option<String>,

    #[arg(long = "form", value_name = "FORM", conflicts_with = "positional")]
    form: Option<String>,
}

impl FormArg {
    pub fn text(&self) -> &str {
        self.form.as_deref().or(self.positional.as_deref()).expect("clap enforces one of the two")
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// q-expansion of a form.
    Expand {
        #[command(flatten)]
        form: FormArg,
        /// Number of coefficients.
        #[arg(long, default_value_t = 10)]
        prec: usize,
    },
    /// Polynomial in Theta, F2 from the q-expansion.
    Decompose {
        #[command(flatten)]
        form: FormArg,
        /// Expected weight, checked against the expression.
        #[arg(long)]
        k: Option<String>,
        /// q-precision; defaults to the dimension plus guard terms.
        #[arg(long)]
        prec: Option<usize>,
    },
    /// Polynomial model of D^n f and, for modular f, its CM value c_n(f).
    Deriv {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        n: usize,
    },
    /// Quasi-valuation nu_p of D^n f.
    Nu {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        k: Option<String>,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long)]
        p: u64,
        /// Search cap; defaults to QMF_NU_CAP or 16.
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Upper bound for the mod p^m filtration.
    Filtration {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        prec: Option<usize>,
    },
    /// Romik's sequence d(n) over an inclusive range `a..b`.
    Romik {
        #[arg(value_name = "RANGE")]
        range: String,
    },
    /// Check a congruence over a range of n.
    Verify {
        #[arg(value_enum)]
        claim: commands::Claim,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, value_name = "RANGE")]
        range: String,
        /// Form for the `cm` claim.
        #[arg(long)]
        form: Option<String>,
    },
    /// Compare the exact engine with the numerical contour integration.
    OracleCheck {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 100)]
        digits: u32,
        #[arg(long, default_value_t = qmf_core::oracle::DEFAULT_RADIUS)]
        radius: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Expand { .. } => "expand",
            Command::Decompose { .. } => "decompose",
            Command::Deriv { .. } => "deriv",
            Command::Nu { .. } => "nu",
            Command::Filtration { .. } => "filtration",
            Command::Romik { .. } => "romik",
            Command::Verify { .. } => "verify",
            Command::OracleCheck { .. } => "oracle-check",
        }
    }

    fn run(&self) -> Outcome {
        match self {
            Command::Expand { form, prec } => commands::expand(form.text(), *prec),
            Command::Decompose { form, k, prec } => commands::decompose(form.text(), k.as_deref(), *prec),
            Command::Deriv { form, k, n } => commands::deriv(form.text(), k.as_deref(), *n),
            Command::Nu { form, k, n, p, cap } => commands::nu(form.text(), k.as_deref(), *n, *p, *cap),
            Command::Filtration { form, k, p, m, prec } => commands::filtration(form.text(), k.as_deref(), *p, *m, *prec),
            Command::Romik { range } => commands::romik(range),
            Command::Verify { claim, p, m, range, form } => commands::verify(*claim, *p, *m, range, form.as_deref()),
            Command::OracleCheck { n_max, digits, radius } => commands::oracle_check(*n_max, *digits, *radius),
        }
    }
}

fn render(format: Format, command: &str, body: Map<String, Value>, plain: &[String]) -> String {
    match format {
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("command".into(), json!(command));
            obj.extend(body);
            obj.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable")
        }
        Format::Plain => plain.join("\n"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = cli.command.run();
    let runtime_ms = if cli.no_timing { 0 } else { start.elapsed().as_millis() as u64 };
    let name = cli.command.name();

    let (mut body, plain, code) = match outcome {
        Ok(Report { inputs, results, verified, plain }) => {
            let mut body = Map::new();
            body.insert("inputs".into(), Value::Object(inputs));
            body.insert("results".into(), Value::Array(results));
            if let Some(v) = verified {
                body.insert("verified".into(), json!(v));
            }
            let code = if verified == Some(false) { 1 } else { 0 };
            (body, plain, code)
        }
        Err(e) => {
            let code = e.exit_code();
            let mut body = Map::new();
            body.insert("error".into(), json!({ "kind": e.kind(), "message": e.to_string() }));
            let plain = vec![format!("error: {e}")];
            (body, plain, code)
        }
    };
    body.insert("runtime_ms".into(), json!(runtime_ms));

    let text = render(cli.format, name, body, &plain);
    if code == 0 || code == 1 {
        println!("{text}");
    } else {
        if cli.format == Format::Json {
            println!("{text}");
        }
        eprintln!("{}", plain.join("\n"));
    }
    ExitCode::from(code)
}
