use hardy_core::circle::{AnalyticBoundaryFunction, BoundaryFunction, Polynomial};
use hardy_core::corpus::{hp_corpus, schur_corpus, trivial_schur_corpus, wiener_corpus};
use hardy_core::interp::{strip_bounds_report, InterpMode, DEFAULT_T_GRID};
use hardy_core::marcinkiewicz::{
    default_lambda_grid, dyadic_grid, k_report, lemma12_report, lorentz_comparison, quarter_octave_grid,
    theorem11_sweep,
};
use hardy_core::report::Check;
use hardy_core::wiener::{
    basic_estimates_report, decomposition_report, doob_check, embed, exit_statistics, family_report,
    harmonic_completion, isometry_check, relative_l2, sample_paths, stochastic_hilbert_mc, stopping_decompose,
    truncation_family, MartingaleMatrix, PhaseModeInputs, SimConfig, DEFAULT_BUCKET_ROWS,
};
use hardy_core::{AnalyticFunction64, HardyError, PathEnsemble64};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Family};
use crate::output::Table;

pub const DEFAULT_GRID: usize = 4096;
/// Relative `L²` tolerance of the `oracle` command.
pub const ORACLE_TOL: f64 = 0.1;
/// Slack on the Schur-defect ratio.
pub const LEMMA12_SLACK: f64 = 1e-6;

#[derive(Debug)]
pub enum CommandError {
    Config(String),
    Core(HardyError),
}

impl From<HardyError> for CommandError {
    fn from(e: HardyError) -> Self {
        CommandError::Core(e)
    }
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CommandError::Config(s) => write!(f, "invalid config: {s}"),
            CommandError::Core(e) => write!(f, "{e}"),
        }
    }
}

pub struct Outcome {
    pub json: Value,
    pub table: Table,
    pub summary: Vec<String>,
    pub pass: bool,
}

type Res = Result<Outcome, CommandError>;

/// Effective settings after applying command-line overrides.
pub struct Context {
    pub config: ExperimentConfig,
    pub seed: Option<u64>,
}

impl Context {
    fn grid(&self) -> usize {
        self.config.grid_size.unwrap_or(DEFAULT_GRID)
    }

    fn sim(&self) -> Result<SimConfig, CommandError> {
        let mut sim = match (&self.config.sim, self.seed) {
            (Some(s), _) => s.clone(),
            (None, Some(seed)) => SimConfig::new(10_000, 1e-3, seed),
            (None, None) => return Err(CommandError::Config("a seed is required (config `sim.seed` or --seed)".into())),
        };
        if let Some(seed) = self.seed {
            sim.seed = seed;
        }
        sim.validate().map_err(|e| CommandError::Config(e.to_string()))?;
        Ok(sim)
    }

    fn listed(&self) -> Vec<(String, Polynomial<f64>)> {
        self.config.functions.iter().map(|f| (f.name.clone(), Polynomial::new(f.coefficients()))).collect()
    }

    fn polynomials_or(&self, default: Vec<(String, Polynomial<f64>)>) -> Vec<(String, Polynomial<f64>)> {
        if self.config.functions.is_empty() {
            default
        } else {
            self.listed()
        }
    }
}

fn on_grid(p: &Polynomial<f64>, n: usize) -> Result<AnalyticFunction64, HardyError> {
    AnalyticBoundaryFunction::from_fn(n, |t| p.eval(t))
}

fn one_plus_t() -> Vec<(String, Polynomial<f64>)> {
    vec![("one_plus_t".into(), Polynomial::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]))]
}

fn wiener_default() -> Vec<(String, Polynomial<f64>)> {
    wiener_corpus().into_iter().map(|(n, f)| (n.to_string(), f)).collect()
}

fn check_rows(table: &mut Table, function: &str, checks: &[Check]) {
    for c in checks {
        table.push(vec![
            function.into(),
            c.name.clone().into(),
            c.lhs.into(),
            c.rhs.into(),
            c.stderr.into(),
            c.pass.into(),
        ]);
    }
}

const CHECK_COLUMNS: [&str; 6] = ["function", "check", "lhs", "rhs", "stderr", "pass"];

pub fn decompose(ctx: &Context) -> Res {
    let n = ctx.grid();
    let ps = ctx.config.p.clone().unwrap_or_else(|| vec![2.0]);
    let lambdas = ctx.config.lambdas.clone().unwrap_or_else(|| quarter_octave_grid(-3, 4));
    let mut table = Table::new(&["function", "p", "lambda", "scale", "f0_l1", "bound", "ratio", "pass"]);
    let mut sweeps = Vec::new();
    let mut summary = Vec::new();
    let mut pass = true;
    for &p in &ps {
        let functions: Vec<(String, AnalyticFunction64)> = match ctx.config.corpus.as_ref().map(|c| c.family) {
            Some(Family::Hp) => hp_corpus(p, n)?,
            Some(Family::Listed) | None => ctx
                .polynomials_or(one_plus_t())
                .iter()
                .map(|(name, f)| Ok((name.clone(), on_grid(f, n)?)))
                .collect::<Result<_, HardyError>>()?,
            Some(other) => return Err(CommandError::Config(format!("corpus family {other:?} does not apply to decompose"))),
        };
        for (name, f) in functions {
            let s = theorem11_sweep(&f, p, &lambdas)?;
            for r in &s.points {
                table.push(vec![
                    name.clone().into(),
                    p.into(),
                    r.lambda.into(),
                    r.scale.into(),
                    r.f0_l1.into(),
                    r.bound.into(),
                    r.ratio.into(),
                    r.pass.into(),
                ]);
            }
            summary.push(format!(
                "{name} p={p}: max ratio {:.4}, tail slope {} (bound {:.2}) {}",
                s.points.iter().map(|r| r.ratio).fold(0.0, f64::max),
                s.tail_slope.map_or("n/a".to_string(), |x| format!("{x:.3}")),
                s.slope_bound,
                if s.pass { "ok" } else { "FAIL" }
            ));
            pass &= s.pass;
            sweeps.push(json!({"function": name, "sweep": s}));
        }
    }
    Ok(Outcome { json: json!({"command": "decompose", "grid_size": n, "sweeps": sweeps, "pass": pass}), table, summary, pass })
}

pub fn lemma12(ctx: &Context) -> Res {
    let n = ctx.grid();
    let qs = ctx.config.q.clone().unwrap_or_else(|| vec![1.25, 1.5, 2.0, 3.0]);
    let corpus = ctx.config.corpus.clone();
    let functions: Vec<(String, AnalyticFunction64)> = match corpus.as_ref().map(|c| c.family) {
        None | Some(Family::Trivial) => trivial_schur_corpus(n)?.into_iter().map(|(k, s)| (k.to_string(), s)).collect(),
        Some(Family::Schur) => {
            let spec = corpus.as_ref().expect("corpus present");
            let seed = ctx
                .seed
                .or(spec.seed)
                .ok_or_else(|| CommandError::Config("the schur corpus needs a seed (corpus.seed or --seed)".into()))?;
            schur_corpus(spec.count.unwrap_or(1000), n, seed)?
                .into_iter()
                .map(|s| (format!("{:?}_{}", s.kind, s.index).to_lowercase(), s.s))
                .collect()
        }
        Some(Family::Listed) => ctx
            .listed()
            .iter()
            .map(|(name, f)| Ok((name.clone(), on_grid(f, n)?)))
            .collect::<Result<_, HardyError>>()?,
        Some(Family::Hp) => return Err(CommandError::Config("corpus family hp does not apply to lemma12".into())),
    };
    let mut table = Table::new(&["function", "q", "lhs", "rhs", "ratio", "s0", "vacuous", "pass"]);
    let mut reports = Vec::new();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for (name, s) in &functions {
        for &q in &qs {
            let r = lemma12_report(s, q)?;
            let ok = r.holds(LEMMA12_SLACK);
            failures += !ok as usize;
            worst = worst.max(r.ratio);
            table.push(vec![
                name.clone().into(),
                q.into(),
                r.lhs.into(),
                r.rhs.into(),
                r.ratio.into(),
                r.s0.into(),
                r.vacuous.into(),
                ok.into(),
            ]);
            reports.push(json!({"function": name, "report": r, "pass": ok}));
        }
    }
    let pass = failures == 0;
    let summary = vec![format!(
        "{} functions x {} exponents: max ratio {worst:.6}, failures {failures}",
        functions.len(),
        qs.len()
    )];
    Ok(Outcome { json: json!({"command": "lemma12", "grid_size": n, "reports": reports, "pass": pass}), table, summary, pass })
}

pub fn kfunc(ctx: &Context) -> Res {
    let n = ctx.grid();
    let ts = ctx.config.t.clone().unwrap_or_else(|| dyadic_grid(-10, 10));
    let lambdas = ctx.config.lambdas.clone().unwrap_or_else(default_lambda_grid);
    let thetas = ctx.config.theta.clone().unwrap_or_default();
    let qs = ctx.config.q.clone().unwrap_or_else(|| vec![2.0]);
    let mut table = Table::new(&["function", "t", "k_upper", "k_lower", "lambda_star"]);
    let mut out = Vec::new();
    let mut summary = Vec::new();
    let mut pass = true;
    for (name, f) in ctx.polynomials_or(one_plus_t()) {
        let g = on_grid(&f, n)?;
        let r = k_report(&g, &ts, &lambdas)?;
        for i in 0..r.t.len() {
            table.push(vec![
                name.clone().into(),
                r.t[i].into(),
                r.k_upper[i].into(),
                r.k_lower_l[i].into(),
                r.lambda_star[i].into(),
            ]);
        }
        let ok = r.sandwich_holds();
        pass &= ok;
        let mut comparisons = Vec::new();
        for &theta in &thetas {
            for &q in &qs {
                comparisons.push(lorentz_comparison(&g, theta, q)?);
            }
        }
        summary.push(format!("{name}: {} t values, sandwich {}", r.t.len(), if ok { "ok" } else { "FAIL" }));
        out.push(json!({"function": name, "k": r, "lorentz": comparisons, "sandwich": ok}));
    }
    Ok(Outcome { json: json!({"command": "kfunc", "grid_size": n, "functions": out, "pass": pass}), table, summary, pass })
}

fn ensemble(sim: &SimConfig) -> Result<PathEnsemble64, CommandError> {
    Ok(sample_paths::<f64>(sim)?)
}

pub fn simulate(ctx: &Context) -> Res {
    let sim = ctx.sim()?;
    let ens = ensemble(&sim)?;
    let stats = exit_statistics(&ens);
    let mut table = Table::new(&CHECK_COLUMNS);
    let budget = sim.dt.sqrt();
    let ens_checks = vec![
        Check::with_budget("mean_exit_time", stats.mean_exit_time.mean, 0.5, stats.mean_exit_time.stderr, budget),
        Check::exact("ks_p_value_above_0.01", 0.01, stats.ks_p_value, 0.0, 0.0),
    ];
    check_rows(&mut table, "ensemble", &ens_checks);
    let mut pass = ens_checks.iter().all(|c| c.pass);
    let mut summary = vec![format!(
        "P = {}, dt = {}: mean exit time {:.5} +- {:.5}, KS p {:.3}",
        sim.paths, sim.dt, stats.mean_exit_time.mean, stats.mean_exit_time.stderr, stats.ks_p_value
    )];
    let mut functions = Vec::new();
    for (name, f) in ctx.polynomials_or(wiener_default()) {
        let m = embed(&f, &ens);
        let dec = stopping_decompose(&m, sim.m)?;
        let drep = decomposition_report(&dec);
        let fam = truncation_family(&m, &dec, sim.offset, None)?;
        let frep = family_report(&fam);
        let basic = basic_estimates_report(&dec, &fam);
        let doob = doob_check(&m);
        let mut checks = vec![doob.clone()];
        checks.extend(drep.checks.iter().cloned());
        checks.extend(frep.checks.iter().cloned());
        checks.extend(basic.checks.iter().cloned());
        check_rows(&mut table, &name, &checks);
        let ok = checks.iter().all(|c| c.pass);
        pass &= ok;
        summary.push(format!(
            "{name}: {} levels, eta_jump {:.3e}, Doob ratio {:.4}, {} checks {}",
            dec.level_count(),
            dec.eta_jump,
            doob.lhs,
            checks.len(),
            if ok { "ok" } else { "FAIL" }
        ));
        functions.push(json!({
            "function": name,
            "decomposition": drep,
            "family": frep,
            "basic_estimates": basic,
            "doob": doob,
            "pass": ok,
        }));
    }
    let json = json!({
        "command": "simulate",
        "sim": {"paths": sim.paths, "dt": sim.dt, "t_max": sim.t_max, "seed": sim.seed, "M": sim.m, "offset": sim.offset},
        "exit": {"mean": stats.mean_exit_time.mean, "stderr": stats.mean_exit_time.stderr, "ks_statistic": stats.ks_statistic, "ks_p_value": stats.ks_p_value, "unexited": stats.unexited},
        "ensemble_checks": ens_checks,
        "functions": functions,
        "pass": pass,
    });
    Ok(Outcome { json, table, summary, pass })
}

pub fn interpolate(ctx: &Context) -> Res {
    let sim = ctx.sim()?;
    let mode = ctx.config.mode.unwrap_or(InterpMode::Bound);
    let ts = ctx.config.t.clone().unwrap_or_else(|| DEFAULT_T_GRID.to_vec());
    let ens = ensemble(&sim)?;
    let mut table = Table::new(&CHECK_COLUMNS);
    let mut certs = Vec::new();
    let mut summary = Vec::new();
    let mut pass = true;
    for (name, f) in ctx.polynomials_or(wiener_default()) {
        let m = embed(&f, &ens);
        let dec = stopping_decompose(&m, sim.m)?;
        let inputs = (mode == InterpMode::Phase).then_some(PhaseModeInputs {
            ens: &ens,
            degree: sim.regression_degree,
            bucket_rows: DEFAULT_BUCKET_ROWS,
        });
        let fam = truncation_family(&m, &dec, sim.offset, inputs)?;
        let cert = strip_bounds_report(&m, &dec, &fam, mode, sim.seed, &ts)?;
        for e in &cert.estimates {
            table.push(vec![
                name.clone().into(),
                e.line.clone().into(),
                e.lhs.into(),
                e.rhs.into(),
                e.stderr.into(),
                e.pass.into(),
            ]);
        }
        pass &= cert.pass();
        summary.push(format!(
            "{name}: C_h1 {:.4} (normalized {:.4}), C_hinf {:.4}, {}",
            cert.c_h1,
            cert.c_h1_normalized,
            cert.c_hinf,
            if cert.pass() { "ok" } else { "FAIL" }
        ));
        certs.push(json!({"function": name, "certificate": cert}));
    }
    Ok(Outcome { json: json!({"command": "interpolate", "certificates": certs, "pass": pass}), table, summary, pass })
}

pub fn oracle(ctx: &Context) -> Res {
    let sim = ctx.sim()?;
    let n = ctx.grid().min(1024);
    let default = vec![(
        "cos_plus_half_sin2".to_string(),
        Polynomial::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, -0.5)]),
    )];
    let ens = ensemble(&sim)?;
    let mut table = Table::new(&CHECK_COLUMNS);
    let mut out = Vec::new();
    let mut summary = Vec::new();
    let mut pass = true;
    for (name, f) in ctx.polynomials_or(default) {
        let u = BoundaryFunction::<f64>::from_fn(n, |t| Complex64::new(f.eval(t).re, 0.0))?;
        let h = harmonic_completion(&u)?;
        let h0 = h.eval(Complex64::new(0.0, 0.0)).im;
        let r = MartingaleMatrix::from_fn(&ens, |_, _, z| Complex64::new(h.eval(z).re, 0.0));
        let closed = MartingaleMatrix::from_fn(&ens, |_, _, z| Complex64::new(h.eval(z).im - h0, 0.0));
        let mc = stochastic_hilbert_mc(&r, &ens, sim.regression_degree, DEFAULT_BUCKET_ROWS)?;
        let rel = relative_l2(&mc.values.terminals(), &closed.terminals());
        let centered = {
            let mean = (0..r.n_paths()).map(|p| r.terminal(p).re).sum::<f64>() / r.n_paths() as f64;
            r.map(|z| Complex64::new(z.re - mean, 0.0))
        };
        let checks = vec![
            Check::exact("relative_l2", rel, ORACLE_TOL, 0.0, 0.0),
            isometry_check(&centered, &closed),
        ];
        check_rows(&mut table, &name, &checks);
        let ok = checks.iter().all(|c| c.pass);
        pass &= ok;
        summary.push(format!("{name}: relative L2 {rel:.4}, max imag {:.2e}, {}", mc.max_imag, if ok { "ok" } else { "FAIL" }));
        out.push(json!({"function": name, "relative_l2": rel, "max_imag": mc.max_imag, "checks": checks, "pass": ok}));
    }
    let json = json!({
        "command": "oracle",
        "sim": {"paths": sim.paths, "dt": sim.dt, "seed": sim.seed, "degree": sim.regression_degree},
        "functions": out,
        "pass": pass,
    });
    Ok(Outcome { json, table, summary, pass })
}
