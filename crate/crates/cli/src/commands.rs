use num_complex::Complex64;
use serde::Serialize;

use scalevar_core::funcspace::{estimate_holder, weierstrass};
use scalevar_core::lagdsl::{parse, Bindings, Expr, Params, Var};
use scalevar_core::scaleops::{default_epsilons, quantum_derivative, scale_derivative_path, DEFAULT_TOLERANCE};
use scalevar_core::varcalc::{
    dubois_reymond_residual, euler_lagrange_residual, functional_integrand, invariance_derivative,
    invariance_integrand, noether_constant, DEFAULT_S_STEP,
};
use scalevar_core::{
    CVector, LagrangianSpec, Path, ResidualReport, ScaleParams, SchrodingerProblem, SymmetrySpec, TimeGrid,
};

use crate::config::{self, Command, Components, ExperimentConfig};
use crate::error::{CliError, Context};
use crate::output::{complex, write_outputs, Csv};

/// Runs the configured experiment and writes its outputs.
pub fn run(cfg: ExperimentConfig) -> Result<(), CliError> {
    let g = cfg.grid;
    let grid = TimeGrid::new(g.a, g.b, g.n, g.pad).map_err(|e| CliError::field("grid", e))?;
    let scale = || -> Result<ScaleParams, CliError> {
        let s = cfg.scale.ok_or_else(|| CliError::field("scale", "missing field `scale`"))?;
        ScaleParams::new(s.epsilon, s.mu).map_err(|e| CliError::field("scale.epsilon", e))
    };
    let problem = cfg.problem.clone();
    let out = cfg.output.as_str();
    match cfg.command {
        Command::Deriv => deriv(config::from_value(problem, "problem")?, grid, scale()?, out),
        Command::Functional => functional(config::from_value(problem, "problem")?, grid, scale()?, out),
        Command::CheckEl | Command::CheckDbr => {
            residual(cfg.command, config::from_value(problem, "problem")?, grid, scale()?, out)
        }
        Command::Invariance => invariance(config::from_value(problem, "problem")?, grid, scale()?, out),
        Command::Noether => noether(config::from_value(problem, "problem")?, grid, scale()?, out),
        Command::Schrodinger => schrodinger(config::from_value(problem, "problem")?, grid, scale()?, out),
        Command::Holder => holder(config::from_value(problem, "problem")?, grid, out),
    }
}

fn parse_field(field: &str, text: &str, dim: usize, params: &Params) -> Result<Expr, CliError> {
    parse(text, dim, params.keys()).map_err(|e| CliError::field(field, e))
}

/// Parses per-component path expressions in `t`.
fn path_exprs(field: &str, comps: &Components, params: &Params) -> Result<Vec<Expr>, CliError> {
    comps
        .list()
        .into_iter()
        .enumerate()
        .map(|(k, text)| {
            let name = match comps {
                Components::One(_) => field.to_string(),
                Components::Many(_) => format!("{field}[{k}]"),
            };
            let e = parse_field(&name, text, 0, params)?;
            e.require_vars(|v| v == Var::T, "a path").map_err(|err| CliError::field(name, err))?;
            Ok(e)
        })
        .collect()
}

fn eval_path(exprs: &[Expr], params: &Params, t: f64) -> Result<CVector, scalevar_core::ExprError> {
    let b = Bindings::new(t, &[], &[], params);
    exprs.iter().map(|e| e.eval(&b)).collect()
}

/// Samples path expressions on every node of `grid`.
fn sampled_path(exprs: &[Expr], params: &Params, grid: &TimeGrid) -> Result<Path, CliError> {
    let rows = grid
        .nodes()
        .map(|t| eval_path(exprs, params, t).map_err(scalevar_core::Error::from).context("evaluating path"))
        .collect::<Result<Vec<_>, _>>()?;
    Path::sampled(*grid, "path", rows).context("sampling path")
}

/// Path evaluated anywhere; evaluation failures surface as non-finite
/// values.
fn analytic_path(exprs: Vec<Expr>, params: Params) -> Path {
    let dim = exprs.len();
    Path::analytic(dim, "path", move |t| {
        eval_path(&exprs, &params, t).unwrap_or_else(|_| vec![Complex64::new(f64::NAN, 0.0); dim])
    })
}

fn max_norm(rows: &[CVector]) -> f64 {
    rows.iter().map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).fold(0.0, f64::max)
}

#[derive(Serialize)]
struct Extrapolated {
    t: f64,
    limit: Vec<[f64; 2]>,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    convergence_rate: Option<f64>,
}

#[derive(Serialize)]
struct DerivSummary {
    command: &'static str,
    nodes: usize,
    max_abs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    extrapolation: Option<Vec<Extrapolated>>,
}

fn deriv(pb: config::DerivProblem, grid: TimeGrid, sp: ScaleParams, out: &str) -> Result<(), CliError> {
    let params = config::params(&pb.params);
    let exprs = path_exprs("problem.path", &pb.path, &params)?;
    let sampled = sampled_path(&exprs, &params, &grid)?;
    let boxed = scale_derivative_path(&sampled, sp, &grid).context("scale derivative")?;
    let rows = boxed.rows().expect("sampled");
    let mut csv = Csv::components(exprs.len());
    for (k, row) in rows.iter().enumerate() {
        csv.row(grid.node(grid.pad_steps() + k), row);
    }
    let extrapolation = match &pb.extrapolate_at {
        None => None,
        Some(times) => {
            let analytic = analytic_path(exprs.clone(), params.clone());
            let epsilons = pb.epsilons.clone().unwrap_or_else(default_epsilons);
            let tol = pb.tolerance.unwrap_or(DEFAULT_TOLERANCE);
            let mut items = Vec::new();
            for &t in times {
                let r = quantum_derivative(&analytic, sp.mu(), &epsilons, tol, t).context("extrapolation")?;
                items.push(Extrapolated {
                    t,
                    limit: r.limit_estimate.iter().map(|z| complex(*z)).collect(),
                    converged: r.converged,
                    convergence_rate: r.convergence_rate,
                });
            }
            Some(items)
        }
    };
    let summary = DerivSummary { command: "deriv", nodes: rows.len(), max_abs: max_norm(&rows), extrapolation };
    write_outputs(out, csv, &summary)?;
    Ok(())
}

fn lagrangian(text: &str, dim: usize, params: Params) -> Result<LagrangianSpec, CliError> {
    let l = parse_field("problem.lagrangian", text, dim, &params)?;
    LagrangianSpec::new(l, dim, params).map_err(|e| CliError::field("problem.lagrangian", e))
}

#[derive(Serialize)]
struct FunctionalSummary {
    command: &'static str,
    value: [f64; 2],
}

fn functional(pb: config::LagrangianProblem, grid: TimeGrid, sp: ScaleParams, out: &str) -> Result<(), CliError> {
    let params = config::params(&pb.params);
    let exprs = path_exprs("problem.path", &pb.path, &params)?;
    let lg = lagrangian(&pb.lagrangian, exprs.len(), params.clone())?;
    let p = sampled_path(&exprs, &params, &grid)?;
    let (times, values) = functional_integrand(&lg, &p, sp).context("functional")?;
    let value = scalevar_core::quadrature::trapezoid(&values, grid.step());
    let mut csv = Csv::components(1);
    for (t, v) in times.iter().zip(&values) {
        csv.row(*t, &[*v]);
    }
    write_outputs(out, csv, &FunctionalSummary { command: "functional", value: complex(value) })?;
    Ok(())
}

#[derive(Serialize)]
struct ResidualSummary {
    command: &'static str,
    nodes: usize,
    max_abs: f64,
    l2: f64,
}

fn residual_csv(r: &ResidualReport, dim: usize) -> Csv {
    let mut csv = Csv::components(dim);
    for (t, row) in r.node_times.iter().zip(&r.residuals) {
        csv.row(*t, row);
    }
    csv
}

fn residual(
    cmd: Command,
    pb: config::LagrangianProblem,
    grid: TimeGrid,
    sp: ScaleParams,
    out: &str,
) -> Result<(), CliError> {
    let params = config::params(&pb.params);
    let exprs = path_exprs("problem.path", &pb.path, &params)?;
    let lg = lagrangian(&pb.lagrangian, exprs.len(), params.clone())?;
    let p = sampled_path(&exprs, &params, &grid)?;
    let (r, dim) = match cmd {
        Command::CheckEl => (euler_lagrange_residual(&lg, &p, sp).context("Euler-Lagrange residual")?, lg.dim()),
        _ => (dubois_reymond_residual(&lg, &p, sp).context("DuBois-Reymond residual")?, 1),
    };
    let summary = ResidualSummary { command: cmd.name(), nodes: r.residuals.len(), max_abs: r.max_abs, l2: r.l2 };
    write_outputs(out, residual_csv(&r, dim), &summary)?;
    Ok(())
}

fn symmetry(pb: &config::SymmetryProblem, dim: usize, params: &Params) -> Result<SymmetrySpec, CliError> {
    let tau = parse_field("problem.tau", &pb.tau, dim, params)?;
    let xi_text = pb.xi.list();
    if xi_text.len() != dim {
        return Err(CliError::field("problem.xi", format!("expected {dim} components, got {}", xi_text.len())));
    }
    let xi = xi_text
        .iter()
        .enumerate()
        .map(|(k, x)| parse_field(&format!("problem.xi[{k}]"), x, dim, params))
        .collect::<Result<Vec<_>, _>>()?;
    SymmetrySpec::new(tau, xi, pb.s_step.unwrap_or(DEFAULT_S_STEP)).map_err(|e| CliError::field("problem", e))
}

#[derive(Serialize)]
struct InvarianceSummary {
    command: &'static str,
    derivative: [f64; 2],
    integrand_integral: [f64; 2],
    difference: f64,
}

fn invariance(pb: config::SymmetryProblem, grid: TimeGrid, sp: ScaleParams, out: &str) -> Result<(), CliError> {
    let params = config::params(&pb.params);
    let exprs = path_exprs("problem.path", &pb.path, &params)?;
    let lg = lagrangian(&pb.lagrangian, exprs.len(), params.clone())?;
    let sym = symmetry(&pb, exprs.len(), &params)?;
    let p = sampled_path(&exprs, &params, &grid)?;
    let derivative = invariance_derivative(&lg, &p, &sym, sp).context("invariance derivative")?;
    let (times, values) = invariance_integrand(&lg, &p, &sym, sp).context("invariance integrand")?;
    let integral = scalevar_core::quadrature::trapezoid(&values, grid.step());
    let mut csv = Csv::components(1);
    for (t, v) in times.iter().zip(&values) {
        csv.row(*t, &[*v]);
    }
    let summary = InvarianceSummary {
        command: "invariance",
        derivative: complex(derivative),
        integrand_integral: complex(integral),
        difference: (derivative - integral).norm(),
    };
    write_outputs(out, csv, &summary)?;
    Ok(())
}

#[derive(Serialize)]
struct NoetherSummary {
    command: &'static str,
    nodes: usize,
    mean: [f64; 2],
    drift: f64,
}

fn noether(pb: config::SymmetryProblem, grid: TimeGrid, sp: ScaleParams, out: &str) -> Result<(), CliError> {
    let params = config::params(&pb.params);
    let exprs = path_exprs("problem.path", &pb.path, &params)?;
    let lg = lagrangian(&pb.lagrangian, exprs.len(), params.clone())?;
    let sym = symmetry(&pb, exprs.len(), &params)?;
    let p = sampled_path(&exprs, &params, &grid)?;
    let r = noether_constant(&lg, &p, &sym, sp).context("Noether constant")?;
    let mut csv = Csv::new(&["t", "c_re", "c_im"]);
    for (t, c) in r.node_times.iter().zip(&r.constant_samples) {
        csv.row(*t, &[*c]);
    }
    let summary =
        NoetherSummary { command: "noether", nodes: r.constant_samples.len(), mean: complex(r.mean), drift: r.drift };
    write_outputs(out, csv, &summary)?;
    Ok(())
}

#[derive(Serialize)]
struct SchrodingerSummary {
    command: &'static str,
    gamma: f64,
    residual_max_abs: f64,
    residual_l2: f64,
    mean_thm: [f64; 2],
    drift_thm: f64,
    mean_paper: [f64; 2],
    drift_paper: f64,
    /// The two energy forms differ by `2U`; true when that shows up.
    energy_forms_differ: bool,
}

fn schrodinger(pb: config::SchrodingerConfig, grid: TimeGrid, sp: ScaleParams, out: &str) -> Result<(), CliError> {
    let params = config::params(&pb.params);
    let dim = pb.q0.len();
    if dim == 0 {
        return Err(CliError::field("problem.q0", "need at least one component"));
    }
    let psi = parse_field("problem.psi", &pb.psi, dim, &params)?;
    let potential = parse_field("problem.potential", &pb.potential, dim, &params)?;
    let prob = SchrodingerProblem::new(psi, potential, dim, pb.hbar, pb.m, params)
        .map_err(|e| CliError::field("problem", e))?;
    let q0: CVector = pb.q0.iter().map(|&z| z.into()).collect();
    let traj = prob.integrate_trajectory(&q0, &grid).context("integrating trajectory")?;
    let energy = prob.energy_constant(&traj, sp).context("energy constant")?;

    let probe_times = pb
        .probe_times
        .clone()
        .unwrap_or_else(|| (0..=10).map(|k| grid.node(grid.pad_steps() + k * grid.steps() / 10)).collect());
    let probe_points: Vec<CVector> = match &pb.probe_points {
        Some(points) => points.iter().map(|p| p.iter().map(|&z| z.into()).collect()).collect(),
        None => probe_times
            .iter()
            .map(|&t| traj.path.eval(t).context("probe times must be grid nodes"))
            .collect::<Result<_, _>>()?,
    };
    let residual = prob.schrodinger_residual(&probe_times, &probe_points).context("Schrodinger residual")?;

    let mut cols = vec!["t".to_string()];
    for k in 1..=dim {
        cols.push(format!("re_{k}"));
        cols.push(format!("im_{k}"));
    }
    cols.extend(["c_thm_re", "c_thm_im", "c_paper_re", "c_paper_im"].map(String::from));
    let mut csv = Csv::new(&cols);
    for (i, k) in grid.core().enumerate() {
        let mut row = traj.path.at_node(k).expect("in range");
        row.push(energy.theorem.constant_samples[i]);
        row.push(energy.printed.constant_samples[i]);
        csv.row(grid.node(k), &row);
    }
    let (thm, pap) = (&energy.theorem, &energy.printed);
    let tol = 1e-6;
    let differ = (thm.mean - pap.mean).norm() > tol * thm.mean.norm().max(1.0) || (thm.drift - pap.drift).abs() > tol;
    let summary = SchrodingerSummary {
        command: "schrodinger",
        gamma: prob.gamma(),
        residual_max_abs: residual.max_abs,
        residual_l2: residual.l2,
        mean_thm: complex(thm.mean),
        drift_thm: thm.drift,
        mean_paper: complex(pap.mean),
        drift_paper: pap.drift,
        energy_forms_differ: differ,
    };
    write_outputs(out, csv, &summary)?;
    Ok(())
}

#[derive(Serialize)]
struct HolderSummary {
    command: &'static str,
    alpha: f64,
    fit_residual: f64,
    delta_min: f64,
    delta_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    theoretical_alpha: Option<f64>,
}

fn holder(pb: config::HolderProblem, grid: TimeGrid, out: &str) -> Result<(), CliError> {
    let params = config::params(&pb.params);
    let path = match (&pb.path, &pb.weierstrass) {
        (Some(text), None) => {
            let exprs = path_exprs("problem.path", &Components::One(text.clone()), &params)?;
            analytic_path(exprs, params)
        }
        (None, Some(w)) => weierstrass(w.a, w.b, w.tol).map_err(|e| CliError::field("problem.weierstrass", e))?,
        _ => return Err(CliError::field("problem", "give exactly one of `path` or `weierstrass`")),
    };
    let path = path.with_domain(grid.a(), grid.b()).context("path domain")?;
    let span = grid.b() - grid.a();
    let deltas =
        pb.deltas.clone().unwrap_or_else(|| (0..9).map(|k| span * 1e-2 * 10f64.powf(-0.25 * k as f64)).collect());
    let est = estimate_holder(&path, &deltas, pb.samples).map_err(|e| match e.is_numerical() {
        true => CliError::Core { context: "Holder estimate".into(), source: e },
        false => CliError::field("problem", e),
    })?;
    let mut csv = Csv::new(&["delta", "oscillation"]);
    for (d, m) in &est.oscillations {
        csv.real_row(&[*d, *m]);
    }
    let summary = HolderSummary {
        command: "holder",
        alpha: est.alpha,
        fit_residual: est.fit_residual,
        delta_min: est.delta_range.0,
        delta_max: est.delta_range.1,
        theoretical_alpha: path.holder_exponent(),
    };
    write_outputs(out, csv, &summary)?;
    Ok(())
}
