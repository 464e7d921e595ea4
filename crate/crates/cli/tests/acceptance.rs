//! Acceptance suite. Prints one PASS/FAIL line per criterion with the
//! measured figures and exits non-zero if any criterion fails.

use std::path::{Path as FsPath, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scalevar_core::funcspace::{weierstrass, Sign};
use scalevar_core::lagdsl::{parse, Bindings, Params, Var};
use scalevar_core::scaleops::{
    barrow_defect, composite_scale_derivative, default_epsilons, delta, leibniz_cross_term, leibniz_defect,
    quantum_derivative, scale_derivative, ScalarField, DEFAULT_TOLERANCE,
};
use scalevar_core::schrodinger::{energy_coefficient, planck_energy_coefficient};
use scalevar_core::varcalc::{
    dubois_reymond_residual, euler_lagrange_residual, invariance_derivative, invariance_integrand_integral,
    noether_constant, DEFAULT_S_STEP,
};
use scalevar_core::{LagrangianSpec, Mu, Path, ScaleParams, SchrodingerProblem, SymmetrySpec, TimeGrid};

type Outcome = Result<String, String>;
type PathFn = fn(f64) -> f64;
type Criterion = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn sp(epsilon: f64, mu: Mu) -> ScaleParams {
    ScaleParams::new(epsilon, mu).unwrap()
}

fn sampled(f: fn(f64) -> f64, a: f64, b: f64, n: usize, pad: f64) -> Path {
    Path::real("p", f).sample(&TimeGrid::new(a, b, n, pad).unwrap()).unwrap()
}

fn lag(text: &str) -> LagrangianSpec {
    LagrangianSpec::parse(text, 1, Params::new()).unwrap()
}

fn sym(tau: &str, xi: &str) -> SymmetrySpec {
    SymmetrySpec::parse(tau, &[xi], 1, &Params::new(), DEFAULT_S_STEP).unwrap()
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Distance in units of `ulp(scale)`.
fn ulps(a: Complex64, b: Complex64, scale: f64) -> f64 {
    (a - b).norm() / (f64::EPSILON * scale.max(f64::MIN_POSITIVE))
}

fn operator_algebra() -> Outcome {
    const CASES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst: f64 = 0.0;
    for case in 0..CASES {
        let n = 64;
        let pad_steps = 8;
        let grid = TimeGrid::with_pad_steps(0.0, 1.0, n, pad_steps).unwrap();
        let mut random_path = || {
            let rows: Vec<_> = (0..grid.len())
                .map(|_| vec![Complex64::new(rng.gen_range(-1e3..1e3), rng.gen_range(-1e3..1e3))])
                .collect();
            (Path::sampled(grid, "x", rows.clone()).unwrap(), rows)
        };
        let (p, rows_p) = random_path();
        let (q, rows_q) = random_path();
        let m = rng.gen_range(1..=pad_steps);
        let eps = m as f64 * grid.step();
        let t = grid.node(rng.gen_range(m..grid.len() - m));
        let fwd = delta(&p, eps, Sign::Plus, t).unwrap()[0];
        let bwd = delta(&p, eps, Sign::Minus, t).unwrap()[0];
        let scale = fwd.norm().max(bwd.norm());
        let d = |path: &Path, mu| scale_derivative(path, sp(eps, mu), t).unwrap()[0];
        let mut errs = vec![
            ulps(d(&p, Mu::MinusI), fwd, scale),
            ulps(d(&p, Mu::I), bwd, scale),
            ulps(d(&p, Mu::Zero), (fwd + bwd) * 0.5, scale),
        ];
        let (alpha, beta) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let combo_rows = rows_p.iter().zip(&rows_q).map(|(x, y)| vec![x[0] * alpha + y[0] * beta]).collect();
        let combo = Path::sampled(grid, "combo", combo_rows).unwrap();
        let re = Path::sampled(grid, "re", rows_p.iter().map(|x| vec![c(x[0].re)]).collect()).unwrap();
        let im = Path::sampled(grid, "im", rows_p.iter().map(|x| vec![c(x[0].im)]).collect()).unwrap();
        let max_p = rows_p.iter().chain(&rows_q).map(|r| r[0].norm()).fold(0.0, f64::max);
        let mu = Mu::ALL[case % 5];
        let lin_scale = (alpha.abs() + beta.abs()) * max_p / eps;
        errs.push(ulps(d(&combo, mu), d(&p, mu) * alpha + d(&q, mu) * beta, lin_scale));
        errs.push(ulps(d(&p, mu), d(&re, mu) + Complex64::i() * d(&im, mu), max_p / eps));
        let e = errs.into_iter().fold(0.0, f64::max);
        worst = worst.max(e);
        ensure(e <= 4.0, || format!("case {case}: {e:.2} ulps"))?;
    }
    Ok(format!("{CASES} cases, worst {worst:.2} ulps (limit 4)"))
}

fn classical_limit() -> Outcome {
    let eps = default_epsilons();
    let mut worst = [0.0f64; 3];
    let cases: [(PathFn, f64, f64); 3] =
        [(f64::sin, 0.5f64.cos(), 1e-4), (|t| t * t, 1.0, 1e-8), (|t| t.powi(3), 0.75, 1e-8)];
    for (i, (f, exact, tol)) in cases.into_iter().enumerate() {
        for mu in Mu::ALL {
            let r =
                quantum_derivative(&Path::real("f", f), mu, &eps, DEFAULT_TOLERANCE, 0.5).map_err(|e| e.to_string())?;
            let err = (r.limit_estimate[0] - c(exact)).norm();
            worst[i] = worst[i].max(err);
            ensure(err < tol, || format!("case {i}, mu {mu}: error {err:e} > {tol:e}"))?;
        }
    }
    Ok(format!("errors over all mu: sin {:.1e}, t^2 {:.1e}, t^3 {:.1e}", worst[0], worst[1], worst[2]))
}

fn leibniz_rule() -> Outcome {
    let epsilons: Vec<f64> = (0..9).map(|k| 1e-2 * 10f64.powf(-0.25 * k as f64)).collect();
    let times: Vec<f64> = (0..1000).map(|k| 0.1 + 0.8 * k as f64 / 999.0).collect();
    let mut report = Vec::new();
    for (alpha, beta) in [(0.63, 0.63), (0.8, 0.5)] {
        let w = |h: f64| weierstrass(3f64.powf(-h), 3.0, 1e-12).unwrap();
        let (f, g) = (w(alpha), w(beta));
        let (fa, ga) = (f.holder_exponent().unwrap(), g.holder_exponent().unwrap());
        let mut defects = Vec::new();
        for &e in &epsilons {
            let mut worst = 0.0f64;
            for &t in &times {
                let d = leibniz_defect(&f, &g, sp(e, Mu::Zero), t).map_err(|e| e.to_string())?;
                worst = worst.max(d.norm());
            }
            defects.push(worst);
        }
        let slope = log_slope(&epsilons, &defects);
        let target = fa + ga - 1.0;
        ensure((slope - target).abs() < 0.2, || format!("({alpha}, {beta}): slope {slope:.3}, target {target:.3}"))?;
        for mu in [Mu::Zero, Mu::I, Mu::MinusI] {
            for &t in &times[..50] {
                let s = sp(1e-3, mu);
                let d = leibniz_defect(&f, &g, s, t).unwrap();
                let x = leibniz_cross_term(&f, &g, s, t).unwrap();
                ensure((d - x).norm() < 1e-10, || format!("cross term mismatch at t = {t}: {d} vs {x}"))?;
            }
        }
        report.push(format!("({alpha}, {beta}): slope {slope:.3} vs {target:.3}"));
    }
    Ok(report.join("; "))
}

fn barrow_rule() -> Outcome {
    let mut out = Vec::new();
    for (name, f) in [("t^2", (|t| t * t) as PathFn), ("sin t", f64::sin)] {
        let p = sampled(f, 0.0, 1.0, 1000, 1e-3);
        let d = barrow_defect(&p, sp(1e-3, Mu::Zero), p.grid().unwrap()).map_err(|e| e.to_string())?[0].norm();
        ensure(d < 1e-3, || format!("{name}: defect {d:e}"))?;
        out.push(format!("{name} {d:.1e}"));
    }
    Ok(format!("defects {} (limit 1e-3)", out.join(", ")))
}

fn composite_rule() -> Outcome {
    let field = ScalarField::new(parse("q1^2", 1, Vec::<String>::new()).unwrap(), 1, Params::new()).unwrap();
    let direct = |p: &Path, s: ScaleParams, t: f64| -> Complex64 {
        let sq = {
            let p = p.clone();
            Path::analytic(1, "sq", move |t| vec![p.eval(t).unwrap()[0].powi(2)])
        };
        scale_derivative(&sq, s, t).unwrap()[0]
    };
    let smooth: [fn(f64) -> f64; 3] = [f64::sin, |t| t.powi(3) + t, f64::exp];
    let mut worst_smooth = 0.0f64;
    for f in smooth {
        let p = Path::real("p", f);
        for mu in Mu::ALL {
            for t in [0.2, 0.5, 0.9] {
                let s = sp(1e-3, mu);
                let a = composite_scale_derivative(&field, &p, s, t).unwrap();
                let b = direct(&p, s, t);
                worst_smooth = worst_smooth.max((a - b).norm());
            }
        }
    }
    ensure(worst_smooth < 1e-10, || format!("smooth paths: {worst_smooth:e}"))?;
    let mut worst_rough = 0.0f64;
    for a in [0.5, 0.7] {
        let w = weierstrass(a, 3.0, 1e-12).unwrap();
        for t in [0.15, 0.4, 0.65, 0.85] {
            let s = sp(1e-3, Mu::Zero);
            let x = composite_scale_derivative(&field, &w, s, t).unwrap();
            let y = direct(&w, s, t);
            worst_rough = worst_rough.max((x - y).norm() / y.norm().max(f64::MIN_POSITIVE));
        }
    }
    ensure(worst_rough < 0.05, || format!("Weierstrass paths: relative {worst_rough:e}"))?;
    Ok(format!("smooth {worst_smooth:.1e} (limit 1e-10), Weierstrass relative {worst_rough:.1e} (limit 5%)"))
}

fn euler_lagrange_dubois_reymond() -> Outcome {
    let osc = lag("0.5*v1^2 - 0.5*q1^2");
    let p = sampled(f64::cos, 0.0, 1.0, 2000, 2e-3);
    let s = sp(1e-3, Mu::Zero);
    let el = euler_lagrange_residual(&osc, &p, s).map_err(|e| e.to_string())?.max_abs;
    let dbr = dubois_reymond_residual(&osc, &p, s).map_err(|e| e.to_string())?.max_abs;
    ensure(el < 1e-3 && dbr < 1e-3, || format!("oscillator residuals {el:e}, {dbr:e}"))?;
    let sq = sampled(|t| t * t, 0.0, 1.0, 2000, 2e-3);
    let r = euler_lagrange_residual(&lag("0.5*v1^2"), &sq, s).map_err(|e| e.to_string())?;
    let off = r.residuals.iter().map(|v| (v[0].norm() - 2.0).abs()).fold(0.0, f64::max);
    ensure(off < 1e-3, || format!("non-extremal residual deviates from 2 by {off:e}"))?;
    Ok(format!("oscillator EL {el:.1e}, DBR {dbr:.1e}; |EL(t^2)| - 2 within {off:.1e}"))
}

fn integrand_consistency() -> Outcome {
    let corpus: [(&str, &str, &str, PathFn); 10] = [
        ("0.5*v1^2", "1", "0", |t| t),
        ("0.5*v1^2", "0", "1", f64::sin),
        ("0.5*v1^2 - 0.5*q1^2", "1", "0", f64::cos),
        ("0.5*v1^2 - 0.5*q1^2", "0", "1", f64::cos),
        ("q1*v1", "0", "1", |t| t),
        ("t*v1^2 + q1", "t", "q1", |t| t * t),
        ("exp(-t)*v1^2", "1 + 0.1*q1", "0.2", f64::sin),
        ("q1*v1 + sin(q1)", "0.5", "t*q1", |t| t * t + 0.3),
        ("0.5*v1^2 + 0.3*v1", "1", "1", |t| 0.5 * t),
        ("v1^2*q1^2", "q1", "t", |t| 1.0 + t),
    ];
    let mut worst = 0.0f64;
    for (l, tau, xi, f) in corpus {
        let p = sampled(f, 0.0, 1.0, 1000, 1e-3);
        let (lg, s) = (lag(l), sym(tau, xi));
        let d = invariance_derivative(&lg, &p, &s, sp(1e-3, Mu::Zero)).map_err(|e| e.to_string())?;
        let i = invariance_integrand_integral(&lg, &p, &s, sp(1e-3, Mu::Zero)).map_err(|e| e.to_string())?;
        worst = worst.max((d - i).norm());
        ensure((d - i).norm() < 1e-6, || format!("{l} ({tau}, {xi}): {d} vs {i}"))?;
    }
    Ok(format!("10 cases, worst difference {worst:.1e} (limit 1e-6)"))
}

fn noether_theorem() -> Outcome {
    let free = sampled(|t| t, 0.0, 1.0, 1000, 1e-3);
    let s = sp(1e-3, Mu::Zero);
    let energy = noether_constant(&lag("0.5*v1^2"), &free, &sym("1", "0"), s).map_err(|e| e.to_string())?;
    ensure(energy.drift < 1e-12 && (energy.mean - c(-0.5)).norm() < 1e-12, || {
        format!("free energy: drift {:e}, mean {}", energy.drift, energy.mean)
    })?;
    let momentum = noether_constant(&lag("0.5*v1^2"), &free, &sym("0", "1"), s).map_err(|e| e.to_string())?;
    ensure(momentum.drift < 1e-12 && (momentum.mean - c(1.0)).norm() < 1e-12, || {
        format!("free momentum: drift {:e}, mean {}", momentum.drift, momentum.mean)
    })?;
    let osc = sampled(f64::cos, 0.0, 1.0, 1000, 1e-3);
    let e = noether_constant(&lag("0.5*v1^2 - 0.5*q1^2"), &osc, &sym("1", "0"), s).map_err(|e| e.to_string())?;
    ensure(e.drift < 1e-3, || format!("oscillator drift {:e}", e.drift))?;
    Ok(format!(
        "free energy drift {:.1e} mean {:.3}; momentum drift {:.1e} mean {:.3}; oscillator drift {:.1e}",
        energy.drift, energy.mean.re, momentum.drift, momentum.mean.re, e.drift
    ))
}

fn schrodinger_application() -> Outcome {
    let params = Params::new();
    let plane = SchrodingerProblem::parse("exp(i*(2*q1 - 2*t))", "0", 1, 1.0, 1.0, params.clone()).unwrap();
    let gauss = SchrodingerProblem::parse("exp(-q1^2/2)*exp(-i*t/2)", "0.5*q1^2", 1, 1.0, 1.0, params).unwrap();
    let ts: Vec<f64> = (0..=20).map(|k| k as f64 * 0.05).collect();
    let qs: Vec<Vec<Complex64>> = (-20..=20).map(|k| vec![Complex64::new(0.1 * k as f64, 0.03 * k as f64)]).collect();
    let mut out = Vec::new();
    let grid = TimeGrid::new(0.0, 1.0, 1000, 1e-3).unwrap();
    let s = sp(1e-3, Mu::Zero);
    for (name, prob, q0, expected) in [("plane wave", &plane, 0.0, -2.0), ("ground state", &gauss, 1.0, 0.0)] {
        let r = prob.schrodinger_residual(&ts, &qs).map_err(|e| e.to_string())?.max_abs;
        ensure(r < 1e-12, || format!("{name}: residual {r:e}"))?;
        let traj = prob.integrate_trajectory(&[c(q0)], &grid).map_err(|e| e.to_string())?;
        let e = prob.energy_constant(&traj, s).map_err(|e| e.to_string())?;
        let th = &e.theorem;
        ensure(th.drift < 1e-4 && (th.mean - c(expected)).norm() < 1e-4, || {
            format!("{name}: theorem energy mean {} drift {:e}", th.mean, th.drift)
        })?;
        out.push(format!("{name} residual {r:.1e}, energy {:.4} drift {:.1e}", th.mean.re, th.drift));
    }
    let mut worst = 0.0f64;
    for (hbar, m) in [(1.0, 1.0), (1.054_571_817e-34, 9.109_383_701_5e-31), (0.25, 3.0)] {
        let a = energy_coefficient(hbar, m);
        let b = planck_energy_coefficient(2.0 * std::f64::consts::PI * hbar, m);
        let u = (a - b).abs() / (f64::EPSILON * a);
        worst = worst.max(u);
        ensure(u <= 1.0, || format!("coefficients differ by {u} ulps"))?;
    }
    out.push(format!("coefficient identity within {worst:.0} ulp"));
    Ok(out.join("; "))
}

const DSL_CORPUS: [&str; 20] = [
    "0.5*v1^2 - 0.5*q1^2",
    "0.5*m*v1^2 - k*q1^4",
    "t*v1^2 + q1",
    "exp(-t)*v1^2",
    "q1*v1 + sin(q1)",
    "v1^2*q1^2 - cos(t*q1)",
    "sqrt(1 + v1^2)",
    "ln(2 + q1^2)*v1",
    "(q1 + v1)/(1 + t^2)",
    "-q1^3 + 2*q1*v1 - v1^2/3",
    "exp(i*q1)*v1",
    "sin(q1)*cos(v1) + t",
    "(1 + 2*i)*q1^2 - i*v1",
    "q1^0.5*v1 + 4",
    "v1^2/(2 + sin(q1))",
    "exp(q1 - t)*(v1 - 1)^2",
    "cos(q1)^2 + sin(q1)^2*v1",
    "k*(q1 - t)^2 + m*v1",
    "ln(q1)*sqrt(v1)",
    "-(v1 - q1)^3/6",
];

fn dsl_gradient_check() -> Outcome {
    let mut params = Params::new();
    params.insert("m".into(), c(2.0));
    params.insert("k".into(), Complex64::new(0.5, 0.1));
    let point = [0.3, 0.8, 1.3];
    let h = 1e-5;
    let mut worst = 0.0f64;
    for text in DSL_CORPUS {
        let e = parse(text, 1, params.keys()).map_err(|err| format!("{text}: {err}"))?;
        let again = parse(&e.to_string(), 1, params.keys()).map_err(|err| format!("{text} reprint: {err}"))?;
        ensure(again == e, || format!("{text}: printed as `{e}` which reparses differently"))?;
        let eval = |x: [f64; 3]| {
            let (q, v) = ([c(x[1])], [c(x[2])]);
            e.eval(&Bindings::new(x[0], &q, &v, &params)).unwrap()
        };
        for (i, var) in [Var::T, Var::Q(0), Var::V(0)].into_iter().enumerate() {
            let d = e.diff(var).map_err(|err| format!("{text}: {err}"))?;
            let (q, v) = ([c(point[1])], [c(point[2])]);
            let symbolic = d.eval(&Bindings::new(point[0], &q, &v, &params)).unwrap();
            let (mut hi, mut lo) = (point, point);
            hi[i] += h;
            lo[i] -= h;
            let numeric = (eval(hi) - eval(lo)) / (2.0 * h);
            let rel = (symbolic - numeric).norm() / symbolic.norm().max(1.0);
            worst = worst.max(rel);
            ensure(rel < 1e-6, || format!("d/d{var} {text}: {symbolic} vs {numeric}"))?;
        }
    }
    Ok(format!("20 expressions round-trip; worst relative gradient error {worst:.1e} (limit 1e-6)"))
}

fn example_configs() -> Vec<PathBuf> {
    let dir = FsPath::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_scalevar");
    let runs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    let configs = example_configs();
    for dir in &runs {
        for cfg in &configs {
            let out = Command::new(bin).current_dir(dir.path()).arg("run").arg(cfg).output().unwrap();
            ensure(out.status.success(), || format!("{cfg:?}: {}", String::from_utf8_lossy(&out.stderr)))?;
        }
    }
    let mut files = 0;
    for entry in std::fs::read_dir(runs[0].path().join("out")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|x| x == "csv") {
            let other = runs[1].path().join("out").join(path.file_name().unwrap());
            ensure(std::fs::read(&path).unwrap() == std::fs::read(&other).unwrap(), || format!("{path:?} differs"))?;
            files += 1;
        }
    }
    ensure(files == configs.len(), || format!("expected {} CSV files, found {files}", configs.len()))?;
    let bad = runs[0].path().join("bad.json");
    let text = std::fs::read_to_string(&configs[0]).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["scale"]["mu"] = "2".into();
    std::fs::write(&bad, value.to_string()).unwrap();
    let out = Command::new(bin).current_dir(runs[0].path()).arg("run").arg(&bad).output().unwrap();
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    ensure(out.status.code() == Some(2) && err.contains("scale.mu"), || {
        format!("schema violation gave {:?}: {err}", out.status.code())
    })?;
    Ok(format!("{files} example CSVs byte-identical across runs; mu = \"2\" exits 2 naming scale.mu"))
}

fn main() {
    let criteria: [(&str, Criterion, u64); 11] = [
        ("operator algebra exactness", operator_algebra, 1),
        ("classical limit", classical_limit, 1),
        ("quantum Leibniz rule", leibniz_rule, 10),
        ("Barrow rule", barrow_rule, 1),
        ("composite derivative", composite_rule, 5),
        ("Euler-Lagrange and DuBois-Reymond", euler_lagrange_dubois_reymond, 2),
        ("invariance integrand consistency", integrand_consistency, 5),
        ("Noether constants", noether_theorem, 2),
        ("Schrodinger application", schrodinger_application, 5),
        ("DSL gradient check", dsl_gradient_check, 1),
        // No runtime is pinned for the CLI runs; the budget only guards hangs.
        ("CLI determinism", cli_determinism, 60),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let limit = Duration::from_secs(budget);
        let outcome = match outcome {
            Ok(_) if elapsed > limit => {
                Err(format!("took {:.2} s, budget {} s", elapsed.as_secs_f64(), limit.as_secs()))
            }
            other => other,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name}: {detail} ({:.2} s)", i + 1, elapsed.as_secs_f64());
    }
    println!("{} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
