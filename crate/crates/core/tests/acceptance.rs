//! Acceptance suite. Prints one `PASS` / `FAIL` line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Criterion 2 (full budget, hours of CPU) only runs with
//! `ACCEPTANCE_FULL=1`. Passing criterion numbers as arguments restricts the
//! run, e.g. `cargo test --test acceptance -- 3 4`.

mod oracles;

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use surrogate_core::bench::{g_function, make_sobol_dataset, reference_u, sobol_sequence, SobolSpec};
use surrogate_core::io::{render_model, save_reports, ModelFile, Provenance};
use surrogate_core::kpca::{fit_kpca, project, KernelParams};
use surrogate_core::pipeline::{predict, sweep_dimensions, Phase, PipelineConfig};
use surrogate_core::pso::{benchmarks, pso_minimize, Bounds, PsoConfig};
use surrogate_core::solvers::{lasso_lambda_max, solve_lasso, SolverConfig};
use surrogate_core::{relative_error, rng, SplitDataset};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn sobol_config(dims: Vec<usize>, n_features: usize, seed: u64) -> PipelineConfig {
    let mut cfg = PipelineConfig {
        dims,
        n_features,
        order: 2,
        seed,
        ..Default::default()
    };
    cfg.pso.n_particles = 10;
    cfg.pso.n_iterations = 30;
    cfg
}

struct SobolRun {
    test_error: f64,
    k: usize,
    elapsed: Duration,
}

fn sobol_run(data: &SplitDataset, cfg: &PipelineConfig) -> SobolRun {
    let start = Instant::now();
    let (model, _) = sweep_dimensions(&data.train, &data.validation, cfg).expect("sweep");
    let pred = predict(&model, data.test.points()).expect("predict");
    let test_error = relative_error(data.test.responses(), &pred).expect("error").error;
    SobolRun {
        test_error,
        k: model.k_star,
        elapsed: start.elapsed(),
    }
}

fn criterion_1() -> Outcome {
    let data = make_sobol_dataset(&SobolSpec::reference()).unwrap();
    let mut good = 0;
    let mut slowest = Duration::ZERO;
    let mut details = Vec::new();
    for seed in 0..5 {
        let run = sobol_run(&data, &sobol_config(vec![4, 6, 8, 10], 2000, seed));
        if run.test_error <= 0.05 {
            good += 1;
        }
        slowest = slowest.max(run.elapsed);
        details.push(format!("seed {seed}: eps={:.4} k={} {}", run.test_error, run.k, secs(run.elapsed)));
    }
    let pass = good >= 4 && slowest <= Duration::from_secs(30 * 60);
    outcome(pass, format!("{good}/5 seeds with test eps <= 0.05, slowest run {} ({})", secs(slowest), details.join("; ")))
}

fn criterion_2() -> Outcome {
    let data = make_sobol_dataset(&SobolSpec::reference()).unwrap();
    let mut good = 0;
    let mut slowest = Duration::ZERO;
    let mut details = Vec::new();
    for seed in 0..5 {
        let run = sobol_run(&data, &sobol_config(vec![2, 4, 6, 8, 10, 12, 14], 10_000, seed));
        if run.test_error <= 0.02 && [6, 8, 10].contains(&run.k) {
            good += 1;
        }
        slowest = slowest.max(run.elapsed);
        details.push(format!("seed {seed}: eps={:.4} k={} {}", run.test_error, run.k, secs(run.elapsed)));
    }
    let pass = good >= 3 && slowest <= Duration::from_secs(6 * 3600);
    outcome(pass, format!("{good}/5 seeds with eps <= 0.02 and k in {{6,8,10}} ({})", details.join("; ")))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut unconverged = 0;
    for seed in 0..50u64 {
        let mut g = rng::seeded(1000 + seed);
        let rows: Vec<Vec<f64>> = (0..20).map(|_| (0..50).map(|_| StandardNormal.sample(&mut g)).collect()).collect();
        let y: Vec<f64> = (0..20).map(|_| StandardNormal.sample(&mut g)).collect();
        let a = DMatrix::from_fn(20, 50, |i, j| rows[i][j]);
        let yv = DVector::from_vec(y.clone());
        let lmax = lasso_lambda_max(&a, &yv, false);
        for ratio in [0.01, 0.1, 1.0] {
            let lambda = ratio * lmax;
            let cfg = SolverConfig {
                lambda,
                tol: 1e-10,
                max_iter: 100_000,
                standardize: true,
                fit_intercept: false,
            };
            let fit = solve_lasso(&a, &yv, &cfg).unwrap();
            let prod = oracles::lasso_objective(&rows, &y, fit.coefficients.as_slice(), lambda);
            let oracle = oracles::lasso_proximal_oracle(&rows, &y, lambda, 1e-12);
            if !oracle.converged || !fit.converged {
                unconverged += 1;
            }
            worst = worst.max((prod - oracle.objective).abs());
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-6 && elapsed < Duration::from_secs(5) && unconverged == 0;
    outcome(pass, format!("150 fits, max |objective gap| = {worst:.2e}, {unconverged} unconverged, {}", secs(elapsed)))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for fixture in 0..20u64 {
        let mut g = rng::seeded(2000 + fixture);
        let n = g.random_range(5..=50);
        let d = g.random_range(1..=6);
        let k = g.random_range(1..=n.min(5));
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| g.random::<f64>()).collect()).collect();
        let queries: Vec<Vec<f64>> = (0..10).map(|_| (0..d).map(|_| g.random::<f64>()).collect()).collect();
        let theta: Vec<f64> = (0..d).map(|_| g.random_range(0.3..2.0)).collect();
        let model = fit_kpca(&pts, &KernelParams::new(theta.clone()).unwrap(), k).unwrap();
        let mut all = pts.clone();
        all.extend(queries.iter().cloned());
        let ours = project(&model, &all).unwrap();
        let oracle = oracles::dense_kpca_oracle(&pts, &theta, model.k(), &all);
        for axis in 0..model.k() {
            let dot: f64 = ours.iter().zip(&oracle.projections).map(|(a, b)| a[axis] * b[axis]).sum();
            let sign = if dot < 0.0 { -1.0 } else { 1.0 };
            for (a, b) in ours.iter().zip(&oracle.projections) {
                worst = worst.max((a[axis] - sign * b[axis]).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-8 && elapsed < Duration::from_secs(5);
    outcome(pass, format!("20 fixtures, max per-axis deviation {worst:.2e}, {}", secs(elapsed)))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut sphere_ok = 0;
    let mut ackley_ok = 0;
    for seed in 0..10 {
        let cfg = PsoConfig {
            n_particles: 20,
            n_iterations: 100,
            bounds: Bounds::Uniform { low: -5.0, high: 5.0 },
            seed,
            ..Default::default()
        };
        if pso_minimize(benchmarks::sphere, 5, &cfg).unwrap().best_loss < 1e-2 {
            sphere_ok += 1;
        }
        let cfg = PsoConfig {
            n_particles: 30,
            n_iterations: 200,
            bounds: Bounds::Uniform { low: -5.0, high: 5.0 },
            seed,
            ..Default::default()
        };
        if pso_minimize(benchmarks::ackley, 2, &cfg).unwrap().best_loss < 0.1 {
            ackley_ok += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = sphere_ok >= 9 && ackley_ok >= 9 && elapsed < Duration::from_secs(30);
    outcome(pass, format!("sphere {sphere_ok}/10, ackley {ackley_ok}/10, {}", secs(elapsed)))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let u = reference_u(20).unwrap();
    let n = 100_000;
    let values: Vec<f64> = sobol_sequence(20, n, 1)
        .unwrap()
        .iter()
        .map(|x| g_function(x, &u).unwrap())
        .collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    let mean_ok = (mean - 1.0).abs() <= 3.0 * se;

    let mut g = rng::seeded(6);
    let mut asymmetric = 0;
    for _ in 0..1000 {
        let x: Vec<f64> = (0..20).map(|_| g.random::<f64>()).collect();
        let i = g.random_range(0..20);
        let mut mirrored = x.clone();
        mirrored[i] = 1.0 - x[i];
        let all: Vec<f64> = x.iter().map(|v| 1.0 - v).collect();
        let base = g_function(&x, &u).unwrap();
        if g_function(&mirrored, &u).unwrap() != base || g_function(&all, &u).unwrap() != base {
            asymmetric += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = mean_ok && asymmetric == 0 && elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "mean {mean:.6} (|mean - 1| = {:.2e}, 3 SE = {:.2e}), {asymmetric}/1000 asymmetric, {}",
            (mean - 1.0).abs(),
            3.0 * se,
            secs(elapsed)
        ),
    )
}

fn criterion_7() -> Outcome {
    let y = [1.0, 2.0, 4.0, 7.0];
    let mean = y.iter().sum::<f64>() / 4.0;
    let same = relative_error(&y, &y).unwrap().error;
    let baseline = relative_error(&y, &[mean; 4]).unwrap().error;
    // residuals (1, -1, 0, 0) against total sum of squares 4
    let hand = relative_error(&[0.0, 2.0, 0.0, 2.0], &[1.0, 1.0, 0.0, 2.0]).unwrap().error;
    let pass = same == 0.0 && baseline == 1.0 && hand == 0.5;
    outcome(pass, format!("eps(y,y)={same}, eps(y,mean)={baseline}, hand case={hand}"))
}

fn small_sobol() -> SplitDataset {
    make_sobol_dataset(&SobolSpec {
        dim: 8,
        u: reference_u(8).unwrap(),
        n_train: 120,
        n_val: 80,
        n_test: 50,
        skip: 1,
    })
    .unwrap()
}

fn small_config() -> PipelineConfig {
    let mut cfg = PipelineConfig {
        dims: vec![2, 4],
        n_features: 300,
        seed: 21,
        ..Default::default()
    };
    cfg.pso.n_particles = 6;
    cfg.pso.n_iterations = 8;
    cfg
}

fn full_run(data: &SplitDataset, cfg: &PipelineConfig, dir: &std::path::Path) -> (String, String) {
    let (model, reports) = sweep_dimensions(&data.train, &data.validation, cfg).unwrap();
    let file = ModelFile {
        model,
        provenance: Provenance {
            config_hash: format!("{cfg:?}").len().to_string(),
            seed: cfg.seed,
            timestamp: None,
        },
    };
    let report_path = dir.join("reports.toml");
    save_reports(&reports, file.model.k_star, &report_path).unwrap();
    let model_text: String = render_model(&file)
        .lines()
        .filter(|l| !l.starts_with("timestamp "))
        .map(|l| format!("{l}\n"))
        .collect();
    (model_text, std::fs::read_to_string(report_path).unwrap())
}

fn criterion_8() -> Outcome {
    let data = small_sobol();
    let cfg = small_config();
    let dir = tempfile::tempdir().unwrap();
    let a = full_run(&data, &cfg, dir.path());
    let b = full_run(&data, &cfg, dir.path());
    let pass = a == b;
    outcome(pass, format!("model {} bytes, reports {} bytes, identical: {pass}", a.0.len(), a.1.len()))
}

fn criterion_9() -> Outcome {
    let data = small_sobol();
    let mut cfg = small_config();
    // a contracting swarm so that the displacement test fires mid-run
    cfg.pso.inertia = 0.5;
    cfg.pso.xi1 = 1.0;
    cfg.pso.xi2 = 1.0;
    cfg.pso.n_iterations = 15;
    cfg.eta = Some(0.5);
    let (_, reports) = sweep_dimensions(&data.train, &data.validation, &cfg).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for r in &reports {
        let flips = r.phases.windows(2).filter(|w| w[0] != w[1]).count();
        let back = r.phases.windows(2).any(|w| w[0] == Phase::Lasso && w[1] == Phase::Ridge);
        let consistent = match r.switch_iteration {
            Some(s) => r.phases[..=s].iter().all(|p| *p == Phase::Ridge) && r.phases[s + 1..].iter().all(|p| *p == Phase::Lasso),
            None => r.phases.iter().all(|p| *p == Phase::Ridge),
        };
        ok &= flips <= 1 && !back && consistent && r.final_phase == Phase::Lasso && r.failure.is_none();
        notes.push(format!("k={} switch={:?} flips={flips} final={}", r.k, r.switch_iteration, r.final_phase.name()));
    }
    outcome(ok, notes.join("; "))
}

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let full = std::env::var("ACCEPTANCE_FULL").is_ok_and(|v| v == "1");
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "sobol desk-scale run", criterion_1),
        (2, "sobol full budget", criterion_2),
        (3, "lasso vs proximal-gradient oracle", criterion_3),
        (4, "kpca vs dense jacobi oracle", criterion_4),
        (5, "pso benchmarks", criterion_5),
        (6, "g-function statistics", criterion_6),
        (7, "metric identities", criterion_7),
        (8, "determinism", criterion_8),
        (9, "phase switch", criterion_9),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        if id == 2 && !full {
            println!("criterion {id} ({name}): SKIP, set ACCEPTANCE_FULL=1 to run");
            continue;
        }
        let res = run();
        if !res.pass {
            failed += 1;
        }
        println!("criterion {id} ({name}): {} | {}", if res.pass { "PASS" } else { "FAIL" }, res.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
