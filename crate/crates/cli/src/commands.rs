//! The four experiments exposed by the binary.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use ecsim_core::css::{fq_closed, fq_dft, FockImage};
use ecsim_core::entanglement::{entropy_sweep, generate_ecs};
use ecsim_core::fock::{self, total_number_distribution, FockMat, FockVec, KerrParams};
use ecsim_core::teleport::{run_trials, TeleportConfig, RNG_NAME};
use ecsim_core::{SweepTable, Value};

use crate::config::{BackendsCheckArgs, Command, EntropySweepArgs, RunConfig, TeleportArgs};
use crate::error::{CliError, Result};
use crate::parse::{parse_complex_list, parse_f64_grid, parse_usize_grid};

/// Largest tolerated disagreement between closed-form and DFT coefficients.
pub const COEFF_TOL: f64 = 1e-12;
/// Input intensity limit for the number-basis oracle.
pub const MAX_ORACLE_INTENSITY: f64 = 10.0 + 1e-9;

/// A result table and the tolerance checks it failed, if any.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub table: SweepTable,
    pub failures: Vec<String>,
}

impl CommandOutput {
    fn ok(table: SweepTable) -> Self {
        Self {
            table,
            failures: Vec::new(),
        }
    }
}

/// Runs the selected subcommand; metadata is attached by the writer.
pub fn run(config: &RunConfig) -> Result<CommandOutput> {
    let cli = &config.cli;
    let mut out = match &cli.command {
        Command::Coefficients(a) => cmd_coefficients(a.m_max)?,
        Command::EntropySweep(a) => cmd_entropy_sweep(a)?,
        Command::BackendsCheck(a) => cmd_backends_check(a)?,
        Command::Teleport(a) => {
            let mut o = cmd_teleport(a, cli.seed)?;
            o.table.metadata.push(("rng".into(), RNG_NAME.into()));
            o
        }
    };
    out.table.metadata.extend(config.echo());
    Ok(out)
}

pub fn cmd_coefficients(m_max: usize) -> Result<CommandOutput> {
    if m_max < 2 {
        return Err(CliError::Usage(format!(
            "m-max must be at least 2, got {m_max}"
        )));
    }
    let mut table = SweepTable::new(["M", "q", "re_f", "im_f", "abs_f", "closed_minus_dft"]);
    let mut worst = 0.0f64;
    for m in 2..=m_max {
        let closed = fq_closed(m)?;
        let dft = fq_dft(m)?;
        for (q, (c, d)) in closed.f.iter().zip(&dft.f).enumerate() {
            let diff = (c - d).norm();
            worst = worst.max(diff);
            table.push_row(vec![
                Value::from(m),
                Value::from(q),
                Value::Float(c.re),
                Value::Float(c.im),
                Value::Float(c.norm()),
                Value::Float(diff),
            ]);
        }
    }
    let mut out = CommandOutput::ok(table);
    if worst >= COEFF_TOL {
        out.failures
            .push(format!("closed form differs from DFT by {worst:e}"));
    }
    Ok(out)
}

pub fn cmd_entropy_sweep(args: &EntropySweepArgs) -> Result<CommandOutput> {
    let alpha_sq = parse_f64_grid(&args.alpha_sq)?;
    if alpha_sq.iter().any(|&a| a < 0.0) {
        return Err(CliError::Usage(
            "alpha-sq values must be non-negative".into(),
        ));
    }
    let orders = parse_usize_grid(&args.orders)?;
    if orders.iter().any(|&m| m < 2) {
        return Err(CliError::Usage("orders must be at least 2".into()));
    }
    Ok(CommandOutput::ok(entropy_sweep(&alpha_sq, &orders)?))
}

/// One `(beta, M)` comparison of the two pipelines.
#[derive(Debug, Clone, PartialEq)]
pub struct BackendComparison {
    pub beta: C64,
    pub order: usize,
    pub cutoff: usize,
    pub fidelity: f64,
    /// L-infinity change of the total photon-number distribution, number basis.
    pub fock_distribution_diff: f64,
    /// Same, for the coherent-branch output.
    pub css_distribution_diff: f64,
    pub leakage: f64,
}

pub fn compare_backends(beta: C64, order: usize) -> Result<BackendComparison> {
    let cutoff = fock::default_cutoff(beta.norm_sqr());
    let input = fock::coherent_fock(beta, cutoff);
    let before =
        total_number_distribution(&FockMat::product(&input.value, &FockVec::vacuum(cutoff)));
    let reference = fock::evolve_and_split(beta, KerrParams::revival(order), cutoff);
    let css = generate_ecs(order, beta)?.to_fock(&[cutoff, cutoff])?;
    let FockImage::Pair(css_mat) = css.value else {
        unreachable!("two-mode state")
    };
    let linf = |m: &FockMat| {
        total_number_distribution(m)
            .iter()
            .zip(&before)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    Ok(BackendComparison {
        beta,
        order,
        cutoff,
        fidelity: reference.value.fidelity(&css_mat),
        fock_distribution_diff: linf(&reference.value),
        css_distribution_diff: linf(&css_mat),
        leakage: input.leakage.max(css.leakage),
    })
}

pub fn cmd_backends_check(args: &BackendsCheckArgs) -> Result<CommandOutput> {
    let betas = parse_complex_list(&args.beta)?;
    if let Some(b) = betas.iter().find(|b| b.norm_sqr() > MAX_ORACLE_INTENSITY) {
        return Err(CliError::Usage(format!(
            "|beta|^2 = {} exceeds 10",
            b.norm_sqr()
        )));
    }
    let orders = parse_usize_grid(&args.orders)?;
    if orders.iter().any(|&m| m < 2) {
        return Err(CliError::Usage("orders must be at least 2".into()));
    }
    let grid: Vec<(C64, usize)> = betas
        .iter()
        .flat_map(|&b| orders.iter().map(move |&m| (b, m)))
        .collect();
    let results = grid
        .par_iter()
        .map(|&(b, m)| compare_backends(b, m))
        .collect::<Result<Vec<_>>>()?;

    let mut table = SweepTable::new([
        "beta_re",
        "beta_im",
        "M",
        "cutoff",
        "fidelity",
        "infidelity",
        "fock_distribution_linf",
        "css_distribution_linf",
        "leakage",
        "pass",
    ]);
    let mut failures = Vec::new();
    for r in results {
        let pass = r.fidelity >= args.min_fidelity
            && r.fock_distribution_diff <= args.max_distribution_diff
            && r.css_distribution_diff <= args.max_distribution_diff
            && r.leakage <= fock::DEFAULT_LEAKAGE_TOL;
        if !pass {
            failures.push(format!(
                "beta={} M={}: fidelity {} distribution diff {:e}/{:e} leakage {:e}",
                r.beta,
                r.order,
                r.fidelity,
                r.fock_distribution_diff,
                r.css_distribution_diff,
                r.leakage
            ));
        }
        table.push_row(vec![
            Value::Float(r.beta.re),
            Value::Float(r.beta.im),
            Value::from(r.order),
            Value::from(r.cutoff),
            Value::Float(r.fidelity),
            Value::Float(1.0 - r.fidelity),
            Value::Float(r.fock_distribution_diff),
            Value::Float(r.css_distribution_diff),
            Value::Float(r.leakage),
            Value::from(if pass { "true" } else { "false" }),
        ]);
    }
    Ok(CommandOutput { table, failures })
}

/// Input weights for order `m` from a preset name or an explicit list.
pub fn input_weights(preset: &str, m: usize) -> Result<Vec<C64>> {
    let zero = C64::new(0.0, 0.0);
    match preset.trim() {
        "uniform" => Ok(vec![C64::new(1.0 / (m as f64).sqrt(), 0.0); m]),
        "qubit" => {
            let mut q = vec![zero; m];
            q[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            q[1] = C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
            Ok(q)
        }
        s if s.starts_with("basis:") => {
            let k: usize = s[6..]
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad basis index in `{s}`")))?;
            if k >= m {
                return Err(CliError::Usage(format!(
                    "basis index {k} out of range for M={m}"
                )));
            }
            let mut q = vec![zero; m];
            q[k] = C64::new(1.0, 0.0);
            Ok(q)
        }
        s => {
            let q = parse_complex_list(s)?;
            if q.len() != m {
                return Err(CliError::Usage(format!(
                    "{} weights given for M={m}",
                    q.len()
                )));
            }
            Ok(q)
        }
    }
}

pub fn cmd_teleport(args: &TeleportArgs, seed: u64) -> Result<CommandOutput> {
    let orders = parse_usize_grid(&args.orders)?;
    if let Some(m) = orders.iter().find(|&&m| m < 2 || m % 2 != 0) {
        return Err(CliError::Usage(format!(
            "teleportation needs an even order M >= 2, got {m}"
        )));
    }
    let alphas = parse_complex_list(&args.alpha)?;
    let mut table = SweepTable::new([
        "M",
        "alpha_re",
        "alpha_im",
        "q",
        "trials",
        "exact_success",
        "exact_success_h_only",
        "exact_all_empty",
        "mc_success",
        "mc_success_stderr",
        "successes",
        "g_successes",
        "h_successes",
        "mean_fidelity_ideal",
        "fidelity_ideal_stderr",
        "mean_fidelity_residual",
        "fidelity_residual_stderr",
    ]);
    for &m in &orders {
        for &alpha in &alphas {
            let cfg = TeleportConfig {
                order: m,
                alpha,
                q: input_weights(&args.q, m)?,
                seed,
                trials: args.trials,
                n_cap: args.n_cap,
                h_only: args.h_only,
            };
            let stats = run_trials(&cfg)?;
            let exact = stats.exact.as_ref();
            table.push_row(vec![
                Value::from(m),
                Value::Float(alpha.re),
                Value::Float(alpha.im),
                Value::from(args.q.as_str()),
                Value::from(stats.trials),
                Value::from(exact.map(|e| e.success)),
                Value::from(exact.map(|e| e.success_h_only)),
                Value::from(exact.map(|e| e.all_empty)),
                Value::Float(stats.success_probability),
                Value::Float(stats.success_stderr),
                Value::from(stats.successes),
                Value::from(stats.g_successes),
                Value::from(stats.h_successes),
                Value::from(stats.mean_fidelity_ideal),
                Value::from(stats.fidelity_ideal_stderr),
                Value::from(stats.mean_fidelity_residual),
                Value::from(stats.fidelity_residual_stderr),
            ]);
        }
    }
    Ok(CommandOutput::ok(table))
}
