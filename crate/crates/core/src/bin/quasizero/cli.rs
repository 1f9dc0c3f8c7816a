use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use quasizero::criterion::{growth_profile_with, Classification};
use quasizero::factorizer::{factor, FactorOutcome};
use quasizero::logderiv::{logderiv_coeffs_symbolic, DirichletCoefficients, HalfPlane};
use quasizero::quasimeasure::{fourier_measure, poisson_check, TestFunction};
use quasizero::{expand_sine_product, find_zeros, zero_strip_estimate, AtomicMeasure, Error, ExpPolynomial, Rect, SineProduct};

use crate::config::RunConfig;
use crate::report::{float, render};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_PARSE: i32 = 4;
pub const EXIT_CONFIG: i32 = 5;
pub const EXIT_STAGE: i32 = 6;

#[derive(Parser, Debug)]
#[command(name = "quasizero", version, about = "Zeros, Fourier measures and sine-product factorization of exponential polynomials")]
pub struct Cli {
    /// JSON run configuration; missing fields take built-in defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Polynomial or sine-product JSON file
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Rectangle x0,x1,y0,y1 for the zeros command
    #[arg(long, global = true, allow_hyphen_values = true)]
    rect: Option<String>,
    /// Overrides every coefficient truncation
    #[arg(long, global = true)]
    gamma_max: Option<f64>,
    /// CSV destination for the plot-ready table
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker thread cap
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the effective configuration and exit
    #[arg(long)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Zeros inside a rectangle (CSV x,y,multiplicity)
    Zeros,
    /// Dirichlet coefficients of p'/p in both half-planes
    Logderiv,
    /// Atomic Fourier transform of the zero measure
    Fourier,
    /// Growth profile of the cumulative coefficient mass
    Criterion,
    /// Translated Poisson identity over the configured battery
    Poisson,
    /// Full pipeline: decide whether the input is a sine product
    Factor,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

fn stage(e: Error) -> Failure {
    Failure::new(EXIT_STAGE, e.to_string())
}

/// Output of one command: the JSON report, an optional CSV table and the exit code.
pub struct Outcome {
    pub report: Value,
    pub csv: Option<String>,
    pub code: i32,
}

pub fn run(cli: Cli) -> Result<i32, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| Failure::new(EXIT_CONFIG, e))?,
        None => RunConfig::default(),
    };
    if let Some(g) = cli.gamma_max {
        cfg.truncation.gamma_max = g;
        cfg.poisson.gamma_max = g;
    }
    if let Some(out) = &cli.out {
        cfg.output.csv = Some(out.display().to_string());
    }
    cfg.validate().map_err(|e| Failure::new(EXIT_CONFIG, e))?;
    if cli.print_config {
        print!("{}", render(&serde_json::to_value(&cfg).expect("config serializes")));
        return Ok(EXIT_OK);
    }
    let Some(command) = cli.command else {
        return Err(Failure::new(EXIT_CONFIG, "no command given (try --help)"));
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::new(EXIT_CONFIG, "--threads must be at least 1"));
        }
        // only fails when a pool already exists, in which case it is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let rect = cli.rect.as_deref().map(parse_rect).transpose()?;
    let input = cli.input.as_deref().ok_or_else(|| Failure::new(EXIT_CONFIG, "--input is required"))?;
    let p = read_input(input)?;

    let outcome = execute(command, &p, &cfg, rect)?;
    if let (Some(path), Some(csv)) = (&cfg.output.csv, &outcome.csv) {
        std::fs::write(path, csv).map_err(|e| Failure::new(EXIT_CONFIG, format!("{path}: {e}")))?;
    }
    print!("{}", render(&outcome.report));
    Ok(outcome.code)
}

fn execute(command: Command, p: &ExpPolynomial, cfg: &RunConfig, rect: Option<Rect>) -> Result<Outcome, Failure> {
    match command {
        Command::Zeros => cmd_zeros(p, cfg, rect),
        Command::Logderiv => cmd_logderiv(p, cfg),
        Command::Fourier => cmd_fourier(p, cfg),
        Command::Criterion => cmd_criterion(p, cfg),
        Command::Poisson => cmd_poisson(p, cfg),
        Command::Factor => cmd_factor(p, cfg),
    }
}

pub fn parse_rect(s: &str) -> Result<Rect, Failure> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::new(EXIT_CONFIG, format!("--rect {s}: {e}")))?;
    let [x0, x1, y0, y1] = parts[..] else {
        return Err(Failure::new(EXIT_CONFIG, format!("--rect needs x0,x1,y0,y1, got {s}")));
    };
    Rect::new(x0, x1, y0, y1).map_err(|e| Failure::new(EXIT_CONFIG, e.to_string()))
}

/// Reads either `{"terms": [...]}` or a sine-product `{"C": ..., "a": ..., "factors": [...]}`.
pub fn read_input(path: &Path) -> Result<ExpPolynomial, Failure> {
    let parse = |msg: String| Failure::new(EXIT_PARSE, format!("{}: {msg}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| parse(e.to_string()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| parse(e.to_string()))?;
    if v.get("terms").is_some() {
        serde_json::from_value::<ExpPolynomial>(v).map_err(|e| parse(e.to_string()))
    } else if v.get("C").is_some() {
        let s = serde_json::from_value::<SineProduct>(v).map_err(|e| parse(e.to_string()))?;
        expand_sine_product(&s).map_err(|e| parse(e.to_string()))
    } else {
        Err(parse("expected a polynomial (\"terms\") or a sine product (\"C\", \"a\", \"factors\")".into()))
    }
}

/// Zeros over `[x0, x1]` times the estimated strip; empty for zero-free inputs.
fn strip_zeros(p: &ExpPolynomial, x0: f64, x1: f64, tol: f64) -> Result<(AtomicMeasure, Option<Rect>), Failure> {
    let strip = match zero_strip_estimate(p) {
        Ok(s) => s,
        Err(Error::ZeroFree) => return Ok((AtomicMeasure::default(), None)),
        Err(e) => return Err(stage(e)),
    };
    let rect = Rect::new(x0, x1, strip.alpha - strip.eta, strip.beta + strip.eta).map_err(stage)?;
    let rep = find_zeros(p, &rect, tol).map_err(stage)?;
    Ok((rep.measure.restrict_real_window(x0, x1), Some(rep.rect)))
}

fn rect_json(r: &Rect) -> Value {
    json!([r.x_min, r.x_max, r.y_min, r.y_max])
}

fn cmd_zeros(p: &ExpPolynomial, cfg: &RunConfig, rect: Option<Rect>) -> Result<Outcome, Failure> {
    let rect = match rect {
        Some(r) => r,
        None => {
            let [x0, x1] = cfg.truncation.window;
            let strip = zero_strip_estimate(p).map_err(stage)?;
            Rect::new(x0, x1, strip.alpha - strip.eta, strip.beta + strip.eta).map_err(stage)?
        }
    };
    let rep = find_zeros(p, &rect, cfg.tolerances.quadrature).map_err(stage)?;
    let mut csv = Vec::new();
    rep.measure.write_csv(&mut csv).expect("writing to memory");
    let zeros: Vec<Value> = rep
        .measure
        .atoms()
        .iter()
        .map(|a| json!({"x": a.location.re, "y": a.location.im, "multiplicity": a.mass.re.round() as i64}))
        .collect();
    let report = json!({
        "rect": rect_json(&rect),
        "effective_rect": rect_json(&rep.rect),
        "count": rep.count,
        "atoms": rep.measure.len(),
        "max_residual": rep.max_residual,
        "coarse_count": rep.coarse_count,
        "zeros": zeros,
    });
    Ok(Outcome { report, csv: Some(String::from_utf8(csv).expect("ascii csv")), code: EXIT_OK })
}

fn coefficients(p: &ExpPolynomial, gamma_max: f64) -> Result<(DirichletCoefficients, DirichletCoefficients), Failure> {
    let u = logderiv_coeffs_symbolic(p, HalfPlane::Upper, gamma_max).map_err(stage)?;
    let l = logderiv_coeffs_symbolic(p, HalfPlane::Lower, gamma_max).map_err(stage)?;
    Ok((u, l))
}

fn cmd_logderiv(p: &ExpPolynomial, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (u, l) = coefficients(p, cfg.truncation.gamma_max)?;
    let mut csv = String::from("halfplane,gamma,h_re,h_im\n");
    for (name, d) in [("upper", &u), ("lower", &l)] {
        for c in &d.coeffs {
            writeln!(csv, "{name},{},{},{}", float(c.gamma), float(c.h.re), float(c.h.im)).unwrap();
        }
    }
    let report = json!({
        "upper": serde_json::to_value(&u).expect("coefficients serialize"),
        "lower": serde_json::to_value(&l).expect("coefficients serialize"),
    });
    Ok(Outcome { report, csv: Some(csv), code: EXIT_OK })
}

fn cmd_fourier(p: &ExpPolynomial, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (u, l) = coefficients(p, cfg.truncation.gamma_max)?;
    let mu_hat = fourier_measure(&u, &l).map_err(stage)?;
    let mut csv = String::from("gamma,mass_re,mass_im\n");
    let mut atoms = Vec::with_capacity(mu_hat.len());
    for a in mu_hat.atoms() {
        writeln!(csv, "{},{},{}", float(a.location.re), float(a.mass.re), float(a.mass.im)).unwrap();
        atoms.push(json!({"gamma": a.location.re, "mass": [a.mass.re, a.mass.im]}));
    }
    let report = json!({"gamma_max": cfg.truncation.gamma_max, "atoms": atoms});
    Ok(Outcome { report, csv: Some(csv), code: EXIT_OK })
}

fn cmd_criterion(p: &ExpPolynomial, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (u, l) = coefficients(p, cfg.truncation.gamma_max)?;
    let rep = growth_profile_with(&u, &l, &cfg.radii(), &cfg.thresholds).map_err(stage)?;
    let mut csv = String::from("r,R\n");
    for (r, v) in rep.radii.iter().zip(&rep.values) {
        writeln!(csv, "{},{}", float(*r), float(*v)).unwrap();
    }
    let code = match rep.classification {
        Classification::Linear { .. } => EXIT_OK,
        Classification::Superlinear => EXIT_NEGATIVE,
        Classification::Inconclusive => EXIT_INCONCLUSIVE,
    };
    let report = serde_json::to_value(&rep).expect("growth report serializes");
    Ok(Outcome { report, csv: Some(csv), code })
}

fn cmd_poisson(p: &ExpPolynomial, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let pc = &cfg.poisson;
    let mut csv = String::from("kind,parameter,t0,t,lhs_re,lhs_im,rhs_re,rhs_im,residual\n");
    if pc.battery.is_empty() || pc.shifts.is_empty() {
        return Ok(Outcome { report: json!({"checks": []}), csv: Some(csv), code: EXIT_OK });
    }
    let (mu, rect) = strip_zeros(p, -pc.window, pc.window, cfg.tolerances.quadrature)?;
    let (u, l) = coefficients(p, pc.gamma_max)?;
    let mu_hat = fourier_measure(&u, &l).map_err(stage)?;
    let mut checks = Vec::new();
    for tf in &pc.battery {
        let (kind, param, t0) = match *tf {
            TestFunction::Gaussian { s, t0 } => ("gaussian", s, t0),
            TestFunction::Bump { radius, t0 } => ("bump", radius, t0),
        };
        for &t in &pc.shifts {
            let rep = poisson_check(&mu, &mu_hat, tf, t).map_err(stage)?;
            writeln!(
                csv,
                "{kind},{},{},{},{},{},{},{},{}",
                float(param),
                float(t0),
                float(t),
                float(rep.lhs.re),
                float(rep.lhs.im),
                float(rep.rhs.re),
                float(rep.rhs.im),
                float(rep.residual)
            )
            .unwrap();
            checks.push(json!({
                "test_function": serde_json::to_value(tf).expect("test function serializes"),
                "t": t,
                "lhs": [rep.lhs.re, rep.lhs.im],
                "rhs": [rep.rhs.re, rep.rhs.im],
                "residual": rep.residual,
                "lhs_tail": rep.lhs_tail,
                "rhs_tail": rep.rhs_tail,
            }));
        }
    }
    let report = json!({
        "zero_rect": rect.as_ref().map(rect_json),
        "zero_atoms": mu.len(),
        "fourier_atoms": mu_hat.len(),
        "checks": checks,
    });
    Ok(Outcome { report, csv: Some(csv), code: EXIT_OK })
}

fn cmd_factor(p: &ExpPolynomial, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let outcome = factor(p, &cfg.factor_config()).map_err(stage)?;
    let mut csv = String::from("alpha,beta,mult\n");
    let code = match &outcome {
        FactorOutcome::SineProduct(r) => {
            for f in &r.product.factors {
                writeln!(csv, "{},{},{}", float(f.alpha), float(f.beta), f.mult).unwrap();
            }
            EXIT_OK
        }
        FactorOutcome::NotSineProduct { .. } => EXIT_NEGATIVE,
        FactorOutcome::Inconclusive { .. } => EXIT_INCONCLUSIVE,
    };
    Ok(Outcome { report: outcome.to_json(), csv: Some(csv), code })
}
