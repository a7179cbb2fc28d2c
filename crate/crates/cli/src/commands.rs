//! Subcommand bodies. Human-readable output goes to `out`; CSV goes to the
//! writer the caller picks.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use snwit_core::qstate::{self, BipartiteState};
use snwit_core::specbounds::{self, NonnegativeMatrix};
use snwit_core::witness::{self, CHAIN_SLACK};
use snwit_core::{build_witness, evaluate_witness, osc, CoefficientOptions, WitnessCoefficients, WitnessMethod};

use crate::io::fmt_sig10;
use crate::CliError;

/// Seed for the one numeric entry of the table, so reruns are byte-identical.
pub const TABLE1_SEED: u64 = 1;

/// A witness value must be below −this to count as a detection.
pub const VERDICT_TOL: f64 = 1e-9;

fn io_err(source: std::io::Error) -> CliError {
    CliError::Io { path: "<output>".into(), source }
}

pub fn cmd_osc<W: Write, C: Write>(state: &BipartiteState, out: &mut W, csv_out: Option<C>) -> Result<(), CliError> {
    let mu = osc(state);
    writeln!(out, "operator Schmidt coefficients ({} x {})", state.dim_a(), state.dim_b()).map_err(io_err)?;
    for i in 1..=mu.len() {
        let flag = if mu.is_numerically_zero(i) { "  (numerically zero)" } else { "" };
        writeln!(out, "mu_{i:<3} {}{flag}", fmt_sig10(mu.mu(i))).map_err(io_err)?;
    }
    writeln!(out, "purity  {}", fmt_sig10(qstate::purity(state))).map_err(io_err)?;
    if let Some(c) = csv_out {
        let mut w = csv::Writer::from_writer(c);
        w.write_record(["index", "mu"])?;
        for i in 1..=mu.len() {
            w.write_record([i.to_string(), fmt_sig10(mu.mu(i))])?;
        }
        w.flush().map_err(io_err)?;
    }
    Ok(())
}

pub const COEFFS_HEADER: [&str; 9] =
    ["k", "target_sn", "lambda_exact", "lambda_numeric", "theta", "zeta", "eta", "P", "purity"];

fn opt_field(v: Option<f64>) -> String {
    v.map(fmt_sig10).unwrap_or_default()
}

pub fn cmd_coeffs<W: Write, C: Write>(
    state: &BipartiteState,
    k: usize,
    opts: &CoefficientOptions,
    seed: u64,
    out: &mut W,
    csv_out: Option<C>,
) -> Result<WitnessCoefficients, CliError> {
    if k < 2 {
        return Err(CliError::Usage(format!("--k must be at least 2, got {k}")));
    }
    let mu = osc(state);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = witness::coefficients_from_spectrum(&mu, k, opts, &mut rng)?;
    c.check_chain(CHAIN_SLACK)?;

    writeln!(out, "coefficients for Schmidt number {} (k = {k})", c.target_sn).map_err(io_err)?;
    match c.lambda {
        Some(l) => writeln!(out, "lambda          {}  (exact, arrangement matrices)", fmt_sig10(l)),
        None => writeln!(out, "lambda          -  (no exact method for k >= 5)"),
    }
    .map_err(io_err)?;
    if let Some(l) = c.lambda_numeric {
        writeln!(out, "lambda_numeric  {}  (numeric maximisation, {} restarts)", fmt_sig10(l), opts.restarts)
            .map_err(io_err)?;
    }
    for (name, v) in [("theta", c.theta), ("zeta", c.zeta), ("eta", c.eta), ("P", c.big_p)] {
        writeln!(out, "{name:<15} {}", fmt_sig10(v)).map_err(io_err)?;
    }
    let perron = witness::canonical_perron_root(&mu, k)?;
    writeln!(out, "perron_root     {}  (canonical matrix, diagnostic)", fmt_sig10(perron)).map_err(io_err)?;

    if let Some(csv_out) = csv_out {
        let mut w = csv::Writer::from_writer(csv_out);
        w.write_record(COEFFS_HEADER)?;
        w.write_record([
            k.to_string(),
            c.target_sn.to_string(),
            opt_field(c.lambda),
            opt_field(c.lambda_numeric),
            fmt_sig10(c.theta),
            fmt_sig10(c.zeta),
            fmt_sig10(c.eta),
            fmt_sig10(c.big_p),
            fmt_sig10(qstate::purity(state)),
        ])?;
        w.flush().map_err(io_err)?;
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub state: String,
    pub k: usize,
    pub lambda: f64,
    pub lambda_numeric: bool,
    pub theta: f64,
    pub zeta: f64,
    pub eta: f64,
    pub big_p: f64,
}

/// Rows for rho_family(2..=5), each at k equal to its local dimension.
pub fn table1(restarts: usize) -> Result<Vec<Table1Row>, CliError> {
    let mut rows = Vec::with_capacity(4);
    for k in 2..=5 {
        let mu = osc(&qstate::rho_family(k)?);
        let mut rng = ChaCha8Rng::seed_from_u64(TABLE1_SEED);
        let opts = CoefficientOptions { with_numeric: false, restarts };
        let c = witness::coefficients_from_spectrum(&mu, k, &opts, &mut rng)?;
        c.check_chain(CHAIN_SLACK)?;
        let (lambda, lambda_numeric) = match (c.lambda, c.lambda_numeric) {
            (Some(l), _) => (l, false),
            (None, Some(l)) => (l, true),
            (None, None) => unreachable!("k >= 5 always carries a numeric value"),
        };
        rows.push(Table1Row {
            state: format!("rho_{k}"),
            k,
            lambda,
            lambda_numeric,
            theta: c.theta,
            zeta: c.zeta,
            eta: c.eta,
            big_p: c.big_p,
        });
    }
    Ok(rows)
}

pub fn write_table1<W: Write>(rows: &[Table1Row], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["state", "lambda", "lambda_method", "theta", "zeta", "eta", "P"])?;
    for r in rows {
        w.write_record([
            r.state.clone(),
            fmt_sig10(r.lambda),
            if r.lambda_numeric { "numeric" } else { "exact" }.to_string(),
            fmt_sig10(r.theta),
            fmt_sig10(r.zeta),
            fmt_sig10(r.eta),
            fmt_sig10(r.big_p),
        ])?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

pub fn cmd_bounds<W: Write>(m: &NonnegativeMatrix, out: &mut W) -> Result<(), CliError> {
    let radius = specbounds::spectral_radius(m);
    writeln!(out, "spectral_radius {}", fmt_sig10(radius)).map_err(io_err)?;
    for pair in specbounds::all_bounds(m) {
        writeln!(out, "{:<10} lower {:<18} upper {}", pair.method.name(), fmt_sig10(pair.lower), fmt_sig10(pair.upper))
            .map_err(io_err)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub value: f64,
    pub coefficient: f64,
    pub target_sn: usize,
    pub certified: bool,
}

pub fn cmd_witness<W: Write>(
    target: &BipartiteState,
    test: &BipartiteState,
    k: usize,
    method: WitnessMethod,
    out: &mut W,
) -> Result<Verdict, CliError> {
    if (target.dim_a(), target.dim_b()) != (test.dim_a(), test.dim_b()) {
        return Err(CliError::Usage(format!(
            "target is {}x{} but test state is {}x{}",
            target.dim_a(),
            target.dim_b(),
            test.dim_a(),
            test.dim_b()
        )));
    }
    let w = build_witness(target, k, method)?;
    let value = evaluate_witness(&w, test)?;
    let certified = value < -VERDICT_TOL;
    writeln!(out, "coefficient {}  ({method})", fmt_sig10(w.coefficient)).map_err(io_err)?;
    writeln!(out, "value       {}", fmt_sig10(value)).map_err(io_err)?;
    if certified {
        writeln!(out, "verdict     SN >= {} certified", w.target_sn)
    } else {
        writeln!(out, "verdict     not certified")
    }
    .map_err(io_err)?;
    Ok(Verdict { value, coefficient: w.coefficient, target_sn: w.target_sn, certified })
}
