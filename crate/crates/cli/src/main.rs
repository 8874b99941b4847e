mod args;
mod inputs;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use chainlet::forms::exact_dictionary;
use chainlet::harness::{self, ExperimentReport};
use chainlet::norms::{flat_upper, natural_lower, natural_upper, Decomposition};
use chainlet::{ChainletError, ChainletSeq, PolyChain};
use clap::Parser;
use rayon::prelude::*;
use serde::Serialize;

use args::{Cli, Command, Domain, NormKind, Output, Theorem};
use inputs::{load_chain, load_form, ChainSource};

pub const JOBS_ENV: &str = "CHAINLET_JOBS";

/// A failed run: the exit code, a message for stderr and whatever partial
/// output was produced.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
    partial: Option<(String, Output)>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into(), partial: None }
    }
}

impl From<ChainletError> for Failure {
    fn from(e: ChainletError) -> Failure {
        Failure { code: exit_code(&e), message: e.to_string(), partial: None }
    }
}

fn exit_code(e: &ChainletError) -> u8 {
    match e {
        ChainletError::NonConvergence { .. }
        | ChainletError::CertificateMismatch { .. }
        | ChainletError::InconsistentDerivative { .. }
        | ChainletError::DecreasingNorms => 3,
        _ => 2,
    }
}

fn configure_jobs(flag: Option<u32>) -> Result<(), Failure> {
    let jobs = match flag {
        Some(j) => Some(j as usize),
        None => match std::env::var(JOBS_ENV) {
            Ok(v) => Some(v.trim().parse::<usize>().ok().filter(|&j| j > 0).ok_or_else(|| {
                Failure::input(format!("{JOBS_ENV} must be a positive integer, got `{v}`"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(j) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::input(format!("cannot start {j} workers: {e}")))?;
    }
    Ok(())
}

fn emit(text: &str, out: &Output) -> Result<(), Failure> {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::input(format!("cannot write to stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn wants_csv(out: &Output) -> bool {
    out.out.as_deref().and_then(Path::extension).is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn render(report: &ExperimentReport, out: &Output) -> String {
    if wants_csv(out) {
        report.to_csv()
    } else {
        report.to_json()
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("outputs serialize")
}

fn verify_level(theorem: Theorem, seq: &ChainletSeq, form: &chainlet::FormField, tol: f64) -> chainlet::Result<ExperimentReport> {
    match theorem {
        Theorem::Stokes => harness::verify_stokes_seq(seq, form, tol),
        Theorem::Star => harness::verify_star(seq, form, tol),
        Theorem::Gauss => harness::verify_gauss(seq, form, tol),
        Theorem::Green => harness::verify_green(seq, form, tol),
        Theorem::Laplace => harness::verify_laplace(seq, form, tol),
        Theorem::Distribution => harness::verify_distribution(seq, form, tol),
    }
}

fn verify(theorem: Theorem, source: &ChainSource, form_arg: &str, levels: u32, tol: f64, out: Output) -> Result<bool, Failure> {
    let t0 = Instant::now();
    let probe = source.at(1)?;
    let form = load_form(form_arg, probe.ambient())?;
    let ls: Vec<i32> = (1..=levels as i32).collect();
    let runs: Vec<(i32, chainlet::Result<ExperimentReport>)> = ls
        .par_iter()
        .map(|&l| {
            let run = source
                .at(l as u32)
                .and_then(|p| ChainletSeq::from_levels(0, [(l, p)]))
                .and_then(|seq| verify_level(theorem, &seq, &form, tol));
            (l, run)
        })
        .collect();

    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let mut name = format!("{theorem:?}").to_lowercase();
    let mut tolerance = if theorem == Theorem::Stokes { 2.0 * tol } else { tol };
    let mut failure: Option<ChainletError> = None;
    for (l, run) in runs {
        match run {
            Ok(rep) => {
                if notes.is_empty() {
                    notes = rep.notes.clone();
                    name = rep.name.clone();
                }
                tolerance = rep.tolerance;
                rows.extend(rep.rows);
            }
            Err(e) => {
                if exit_code(&e) == 2 {
                    return Err(e.into());
                }
                notes.push(format!("level {l} failed: {e}"));
                failure.get_or_insert(e);
            }
        }
    }
    let mut report = ExperimentReport::new(name, rows, tolerance, t0);
    report.notes = notes;
    if theorem == Theorem::Laplace && !report.errors_nonincreasing() {
        report.notes.push("errors do not decrease monotonically".into());
    }
    if let Some(e) = failure {
        report.pass = false;
        return Err(Failure { code: 3, message: e.to_string(), partial: Some((render(&report, &out), out)) });
    }
    let last = report.last().map_or(f64::NAN, |r| r.abs_err);
    eprintln!(
        "{}: {} (final error {last:.3e}, tolerance {:.3e})",
        report.name,
        if report.pass { "pass" } else { "FAIL" },
        report.tolerance
    );
    emit(&render(&report, &out), &out)?;
    Ok(report.pass)
}

#[derive(Serialize)]
struct NaturalOut {
    r: usize,
    lower: f64,
    upper: f64,
    witness: String,
    certificate: Decomposition,
}

#[derive(Serialize)]
struct FlatOut {
    mass: f64,
    flat_upper: f64,
}

/// Radius of a centred box containing the chain, for the exact-norm dictionary.
fn radius(p: &PolyChain) -> f64 {
    let supp = p.support();
    let Some((lo, hi)) = supp.bounding_box() else { return 1.0 };
    lo.iter().chain(hi).fold(1.0f64, |m, x| m.max(x.abs()))
}

fn norm(kind: NormKind, p: &PolyChain, r: usize, hint: Option<&Path>, hint_b: Option<&Path>, out: Output) -> Result<bool, Failure> {
    match kind {
        NormKind::Natural => {
            let hint = hint.map(inputs::load_decomposition).transpose()?;
            let up = natural_upper(p, r, hint.as_ref())?;
            let dict = exact_dictionary(p.ambient(), p.grade(), radius(p))?;
            let (lower, witness) = natural_lower(p, r, &dict)?;
            let pass = lower <= up.value;
            eprintln!("natural norm r = {r}: {lower:.6e} <= |P| <= {:.6e}", up.value);
            emit(&json(&NaturalOut { r, lower, upper: up.value, witness, certificate: up.certificate }), &out)?;
            Ok(pass)
        }
        NormKind::Flat => {
            let c = match hint {
                Some(h) => Some(load_chain(&h.to_string_lossy())?.at(0)?),
                None => None,
            };
            let b = match hint_b {
                Some(h) => Some(load_chain(&h.to_string_lossy())?.at(0)?),
                None => c.as_ref().map(|_| PolyChain::zero(p.ambient(), p.grade())).transpose()?,
            };
            let value = flat_upper(p, b.as_ref().zip(c.as_ref()))?;
            eprintln!("flat norm <= {value:.6e}");
            emit(&json(&FlatOut { mass: p.mass(), flat_upper: value }), &out)?;
            Ok(true)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn generate(
    domain: Domain,
    level: u32,
    side: f64,
    (a, b, terms): (f64, f64, u32),
    minus_level: Option<u32>,
    (n, k): (usize, usize),
    region_out: Option<&Path>,
    out: Output,
) -> Result<bool, Failure> {
    let chain = match domain {
        Domain::Koch => {
            let koch = harness::gen_koch::<f64>(level, side)?;
            if let Some(path) = region_out {
                fs::write(path, koch.region.to_json()).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
            }
            koch.polygon
        }
        Domain::Weierstrass => {
            let w = harness::gen_weierstrass_subgraph::<f64>(a, b, terms, level)?;
            eprintln!("shift {:.6}", w.shift);
            w.chain
        }
        Domain::Qcube => inputs::qcube_chain(n, k, level, minus_level)?,
        Domain::Disk => harness::gen_disk::<f64>(level)?,
    };
    eprintln!("{} cells, mass {:.12}", chain.len(), chain.mass());
    emit(&chain.to_json(), &out)?;
    Ok(true)
}

#[derive(Serialize)]
struct IntegralOut {
    form: String,
    value: f64,
}

fn run(cli: Cli) -> Result<bool, Failure> {
    configure_jobs(cli.jobs)?;
    match cli.command {
        Command::Verify { theorem, input, form, levels, tol, output } => {
            let source = load_chain(&input.chain)?;
            verify(theorem, &source, &form, levels, tol.unwrap_or(theorem.default_tol()), output)
        }
        Command::Norm { kind, input, r, hint, hint_b, output } => {
            let p = load_chain(&input.chain)?.at(0)?;
            norm(kind, &p, r, hint.as_deref(), hint_b.as_deref(), output)
        }
        Command::Generate { domain, level, side, a, b, terms, minus_level, n, k, region_out, output } => {
            generate(domain, level, side, (a, b, terms), minus_level, (n, k), region_out.as_deref(), output)
        }
        Command::Integrate { input, form, tol, output } => {
            let p = load_chain(&input.chain)?.at(0)?;
            let w = load_form(&form, p.ambient())?;
            let value = w.integrate_chain(&p, tol)?;
            emit(&json(&IntegralOut { form: w.name().to_string(), value }), &output)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            if let Some((text, out)) = f.partial {
                let _ = emit(&text, &out);
            }
            ExitCode::from(f.code)
        }
    }
}
