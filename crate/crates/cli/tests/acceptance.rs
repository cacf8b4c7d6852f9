//! One check per acceptance criterion; prints a PASS/FAIL line for each and
//! exits non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tvgain::commands;
use tvgain::config::{EstimatorKind, ExperimentConfig};
use tvgain::input::InputSpec;
use tvgain::sim;
use tvgain_core::estimator::{compute_psi, step, theorem_bounds, EstimatorState, StepOptions};
use tvgain_core::excitation::{detect, fe_trajectory_bound, update_omega, DetectOptions, ExcitationMode, OmegaState};
use tvgain_core::gain::{
    kappa_interval, lambda_gamma_limit, scalar_bounds, update_gamma, update_gamma_scalar, Certification, GainParams,
    Hyperparameters,
};
use tvgain_core::linalg::{kailath_inverse, sym_eigen, Matrix, SymMatrix};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn load(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&config_path(name)).expect("example config")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_stream(rng: &mut ChaCha8Rng, dim: usize, len: usize) -> Vec<Vec<f64>> {
    (0..len)
        .map(|_| {
            let scale = 10f64.powf(rng.gen_range(-2.0..3.0));
            (0..dim).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
        })
        .collect()
}

/// Random symmetric matrix with the given spectrum and a random eigenbasis.
fn random_rotation(rng: &mut ChaCha8Rng, d: &[f64]) -> Result<SymMatrix, String> {
    let n = d.len();
    let raw: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut sym = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            sym[i * n + j] = raw[i * n + j] + raw[j * n + i];
        }
    }
    let q = sym_eigen(&SymMatrix::new(n, sym).map_err(err)?).map_err(err)?.basis;
    let m = q.mul(SymMatrix::diagonal(d).as_matrix()).map_err(err)?.mul(&q.transpose()).map_err(err)?;
    SymMatrix::from_matrix(m).map_err(err)
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dims = [2, 3, 5];
    let lambdas = [0.1, 0.5, 0.9];
    let mut worst_low = f64::INFINITY;
    let mut worst_high = f64::NEG_INFINITY;
    for s in 0..20 {
        let n = dims[s % 3];
        let lambda = lambdas[(s / 3) % 3];
        let d0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let mut state = OmegaState::new(random_rotation(&mut rng, &d0)?, lambda).map_err(err)?;
        for phi in random_stream(&mut rng, n, 10_000) {
            state = update_omega(&state, &phi).map_err(err)?;
            let (lo, hi) = state.omega().eigen_range().map_err(err)?;
            worst_low = worst_low.min(lo);
            worst_high = worst_high.max(hi - 1.0 / lambda);
            ensure(lo >= -1e-9 && hi <= 1.0 / lambda + 1e-9, || {
                format!("stream {s}: spectrum [{lo}, {hi}] at lambda {lambda}")
            })?;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 5.0, || format!("runtime {secs:.2}s"))?;
    Ok(format!("20 streams x 1e4 steps, min eig {worst_low:.3e}, max eig - 1/lambda {worst_high:.3e}, {secs:.2}s"))
}

fn criterion_2() -> Outcome {
    let mut checked = 0usize;
    let mut margin = f64::INFINITY;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let mut cfg = load("compare_arx.json");
        cfg.trajectory = serde_json::from_str(r#"{"kind":"constant","theta":[0.5,1.0]}"#).map_err(err)?;
        cfg.horizon = 2000;
        cfg.seed = seed;
        cfg.input = InputSpec::MultiSine {
            amplitudes: vec![1.0, rng.gen_range(0.5..1.5)],
            frequencies: vec![rng.gen_range(0.3..1.0), rng.gen_range(1.5..2.8)],
            phases: vec![rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.0..std::f64::consts::TAU)],
            offset: 0.0,
        };
        let phis = sim::simulate_plant(&cfg).map_err(err)?.phis();
        for lambda in [0.2, 0.5, 0.8] {
            let r = detect(&phis, lambda, &DetectOptions::default()).map_err(err)?;
            ensure(r.mode == ExcitationMode::Persistent, || format!("seed {seed}: not certified PE"))?;
            let bound = (1.0 - lambda).powi(r.window as i32 - 1) * r.alpha_normalized;
            let mut state = OmegaState::new(SymMatrix::zeros(2), lambda).map_err(err)?;
            for (i, phi) in phis.iter().enumerate() {
                state = update_omega(&state, phi).map_err(err)?;
                let k = i + 1;
                if k >= r.k1 + r.window {
                    let lo = state.omega().eigen_range().map_err(err)?.0;
                    margin = margin.min(lo - bound);
                    checked += 1;
                    ensure(lo >= bound - 1e-9, || format!("seed {seed}, lambda {lambda}, k {k}: {lo} < {bound}"))?;
                }
            }
        }
    }
    Ok(format!("10 seeds x 3 rates, {checked} steps checked, min margin {margin:.3e}"))
}

fn criterion_3() -> Outcome {
    let mut checked = 0usize;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
        let phis: Vec<Vec<f64>> = (0..80)
            .map(|k| {
                if (10..=30).contains(&k) {
                    vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]
                } else {
                    vec![0.0, 0.0]
                }
            })
            .collect();
        let lambda = 0.3;
        let r = detect(&phis, lambda, &DetectOptions::default()).map_err(err)?;
        ensure(r.mode == ExcitationMode::Finite, || format!("seed {seed}: mode {:?}", r.mode))?;
        ensure(r.k1 >= 10 && r.k2 <= 30, || format!("seed {seed}: interval [{}, {}]", r.k1, r.k2))?;
        let k3 = r.k3.ok_or("missing k3")?;
        let mut state = OmegaState::new(SymMatrix::zeros(2), lambda).map_err(err)?;
        for (i, phi) in phis.iter().enumerate() {
            state = update_omega(&state, phi).map_err(err)?;
            let k = i + 1;
            if k > r.k2 && k <= k3 {
                let lo = state.omega().eigen_range().map_err(err)?.0;
                let bound = fe_trajectory_bound(r.alpha_normalized, lambda, r.k1, k);
                checked += 1;
                ensure(lo >= bound - 1e-9, || format!("seed {seed}, k {k}: {lo} < {bound}"))?;
            }
        }
        let proof_bound = fe_trajectory_bound(r.alpha_normalized, lambda, r.k1, k3);
        ensure(r.omega_lower <= proof_bound, || format!("seed {seed}: Omega_FE {} > {proof_bound}", r.omega_lower))?;
    }
    Ok(format!("10 confined streams, {checked} steps checked on [k2+1, k3]"))
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut tuples = 0;
    while tuples < 100 {
        let gmax: f64 = rng.gen_range(0.1..10.0);
        let wmin: f64 = rng.gen_range(0.01..2.0);
        let ratio: f64 = rng.gen_range(1.0..4.0);
        let wmax = wmin * ratio;
        let limit = if ratio > 1.0 { (1.0 / (ratio - 1.0)).min(1.0) } else { 1.0 };
        let lg = rng.gen_range(0.01..0.99) * limit;
        let kmin = 1.0 / (gmax * wmin);
        let kmax = (1.0 + lg) / (lg * wmax * gmax);
        let kappa = kmin + rng.gen_range(0.0..0.999) * (kmax - kmin);
        let b = scalar_bounds(gmax, lg, wmin, wmax, Some(kappa)).map_err(err)?;
        let period = rng.gen_range(1..7);
        let mut g = gmax;
        for k in 0..100_000 {
            let w = if (k / period) % 2 == 0 { wmax } else { wmin };
            g = update_gamma_scalar(g, w, lg, kappa).map_err(err)?;
            ensure(g >= b.gamma_min * (1.0 - 1e-12) && g <= gmax * (1.0 + 1e-12), || {
                format!("tuple {tuples}, step {k}: gamma {g} outside [{}, {gmax}]", b.gamma_min)
            })?;
        }
        tuples += 1;
    }
    let (kappa, omega) = (2.5, 0.8);
    let fixed = 1.0 / (kappa * omega);
    let next = update_gamma_scalar(fixed, omega, 0.3, kappa).map_err(err)?;
    ensure((next - fixed).abs() <= 1e-12, || format!("fixed point moved by {}", next - fixed))?;
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("runtime {secs:.2}s"))?;
    Ok(format!("100 tuples x 1e5 bang-bang steps, fixed point stationary, {secs:.2}s"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut runs = 0;
    for n in [2usize, 4] {
        for _ in 0..3 {
            let lo = rng.gen_range(0.05..1.0);
            let hi = lo * rng.gen_range(1.5..6.0);
            let safety = rng.gen_range(0.2..0.8);
            let lg = safety * lambda_gamma_limit(lo, hi, Certification::GainBounds);
            let (kmin, kmax) = kappa_interval(0.5, lg, 1.0, lo, hi, Certification::GainBounds);
            let params = GainParams { lambda_omega: 0.5, lambda_gamma: lg, kappa: kmin + safety * (kmax - kmin) };
            let hp = Hyperparameters::from_bounds(params, 1.0, ExcitationMode::Persistent, lo, hi).map_err(err)?;
            ensure(hp.feasibility(Certification::GainBounds).feasible, || "selected point infeasible".into())?;
            let mut g = SymMatrix::identity(n);
            for k in 0..10_000 {
                let d: Vec<f64> = (0..n)
                    .map(|_| match rng.gen_range(0..3) {
                        0 => lo,
                        1 => hi,
                        _ => rng.gen_range(lo..hi),
                    })
                    .collect();
                let omega = random_rotation(&mut rng, &d)?;
                g = update_gamma(&g, &omega, hp.lambda_gamma, hp.kappa).map_err(err)?;
                let (a, b) = g.eigen_range().map_err(err)?;
                ensure(a >= hp.gamma_lower - 1e-9 && b <= hp.gamma_max + 1e-9, || {
                    format!("N {n}, step {k}: spectrum [{a}, {b}] outside [{}, {}]", hp.gamma_lower, hp.gamma_max)
                })?;
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} runs (N = 2, 4) x 1e4 non-commuting steps inside [Gamma_lower, Gamma_max]"))
}

fn criterion_6() -> Outcome {
    let mut steps = 0usize;
    let mut kailath_steps = 0usize;
    let mut worst_decomp = 0.0f64;
    let mut worst_kailath = 0.0f64;
    for name in ["sinusoid_pe.json", "compare_arx.json", "noisy_arx.json", "static_pe.json"] {
        let mut cfg = load(name);
        cfg.horizon = cfg.horizon.min(3000);
        let run = sim::simulate_plant(&cfg).map_err(err)?;
        let tuned = sim::tune(&run.phis(), &cfg.tuning, &cfg.hyperparameters).map_err(err)?;
        let mut state = EstimatorState::initial(run.trajectory.dim(), &tuned.hp).map_err(err)?;
        for sample in &run.samples {
            state = step(&state, sample, &tuned.hp, &StepOptions::default()).map_err(err)?.state;
            let g_norm = state.gamma.frobenius_norm();
            let residual =
                state.gamma.sub(&state.gamma_bar).map_err(err)?.sub(&state.upsilon).map_err(err)?.frobenius_norm();
            worst_decomp = worst_decomp.max(residual / (1.0 + g_norm));
            ensure(residual <= 1e-10 * (1.0 + g_norm), || {
                format!("{name}, k {}: decomposition residual {residual:e}", state.k)
            })?;
            steps += 1;
            if state.upsilon.eigen_range().map_err(err)?.0 >= 0.0 {
                let psi = compute_psi(&state.gamma_bar, &state.upsilon).map_err(err)?;
                let inv = state.gamma.inverse("gamma").map_err(err)?;
                let other = state.gamma_bar.inverse("gamma_bar").map_err(err)?.sub(&psi).map_err(err)?;
                let rel = inv.sub(&other).map_err(err)?.frobenius_norm() / inv.frobenius_norm();
                worst_kailath = worst_kailath.max(rel);
                ensure(rel <= 1e-9, || format!("{name}, k {}: inverse identity error {rel:e}", state.k))?;
                kailath_steps += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_standalone = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..6);
        let m = rng.gen_range(1..4);
        let raw = Matrix::from_vec(n, n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).map_err(err)?;
        let a = SymMatrix::from_matrix(raw.mul(&raw.transpose()).map_err(err)?)
            .map_err(err)?
            .add(&SymMatrix::scaled_identity(n, 0.5))
            .map_err(err)?;
        let b = Matrix::from_vec(n, m, (0..n * m).map(|_| rng.gen_range(-1.0..1.0)).collect()).map_err(err)?;
        let c = b.transpose();
        let direct = SymMatrix::from_matrix(a.as_matrix().add(&b.mul(&c).map_err(err)?).map_err(err)?)
            .map_err(err)?
            .inverse("direct")
            .map_err(err)?;
        let k = kailath_inverse(&a, &b, &c).map_err(err)?;
        let rel = k.sub(direct.as_matrix()).map_err(err)?.frobenius_norm() / direct.frobenius_norm();
        worst_standalone = worst_standalone.max(rel);
        ensure(rel <= 1e-9, || format!("standalone instance: relative error {rel:e}"))?;
    }
    Ok(format!(
        "{steps} steps: decomposition {worst_decomp:.1e}, inverse identity {worst_kailath:.1e} on {kailath_steps} steps with Upsilon >= 0; 1000 standalone instances {worst_standalone:.1e}"
    ))
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    for name in ["static_pe.json", "worked_fixture.json"] {
        let cfg = load(name);
        let out = commands::simulate(&cfg, None).map_err(err)?;
        let report = &out.report;
        let bounds = report.theorem_bounds.ok_or_else(|| format!("{name}: not certified"))?;
        ensure(bounds.delta_star == 0.0 && bounds.v_bound == 0.0, || {
            format!("{name}: delta_star {}", bounds.delta_star)
        })?;
        let decay = report.decay.as_ref().ok_or("missing decay report")?;
        ensure(decay.violations.is_empty(), || format!("{name}: {} contraction violations", decay.violations.len()))?;
        ensure(decay.envelope_violations.is_empty(), || {
            format!("{name}: envelope violated at {:?}", decay.envelope_violations)
        })?;
        // envelope re-checked here, independent of the decay report
        let k2 = report.certified_window.ok_or("no window")?.start;
        let v = &out.proposed.v;
        for k in k2..v.len() {
            let env = (1.0 - bounds.mu2).powi((k - k2) as i32) * v[k2];
            ensure(v[k] <= env + 1e-12 * (1.0 + v[k2]), || format!("{name}, k {k}: V {} above envelope {env}", v[k]))?;
        }
        let final_err = report.final_theta_err_norm;
        ensure(final_err <= 1e-6, || format!("{name}: final error {final_err:e}"))?;
        if name == "worked_fixture.json" {
            ensure((bounds.mu1 - 14.0 / 2025.0).abs() < 1e-15, || format!("mu1 = {}", bounds.mu1))?;
        }
        notes.push(format!("{name}: mu1 {:.7}, final error {final_err:.1e}", bounds.mu1));
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("runtime {secs:.2}s"))?;
    Ok(format!("{}, {secs:.2}s", notes.join("; ")))
}

fn criterion_8() -> Outcome {
    let cfg = load("sinusoid_pe.json");
    let out = commands::simulate(&cfg, None).map_err(err)?;
    let bounds = out.report.theorem_bounds.ok_or("not certified")?;
    ensure(bounds.delta_star > 0.0, || "trajectory is static".into())?;
    let window = out.report.certified_window.ok_or("no window")?;
    let v = &out.proposed.v;
    ensure(v[window.start] > 10.0 * bounds.v_bound, || "run starts inside the compact set".into())?;
    let rate = 1.0 - bounds.mu2;
    let mut checked = 0;
    let mut entered = None;
    let mut tail_sup = 0.0f64;
    for k in (window.start + 1)..v.len() {
        if v[k - 1] > bounds.v_bound {
            checked += 1;
            ensure(v[k] <= rate * v[k - 1] + 1e-12 * (1.0 + v[k - 1]), || {
                format!("k {k}: {} > {rate} x {}", v[k], v[k - 1])
            })?;
        }
        if entered.is_none() && v[k] <= bounds.v_bound {
            entered = Some(k);
        }
        if entered.is_some() {
            tail_sup = tail_sup.max(v[k]);
        }
    }
    let entered = entered.ok_or("never entered the compact set")?;
    let allowance = bounds.v_bound / rate;
    ensure(tail_sup <= allowance, || format!("tail sup {tail_sup} > {allowance}"))?;
    let decay = out.report.decay.as_ref().ok_or("missing decay report")?;
    ensure(decay.ok, || "decay report disagrees".into())?;
    Ok(format!(
        "{checked} steps outside D contract, entered at k = {entered}, tail sup {tail_sup:.4} <= {allowance:.4} (V_PE {:.4})",
        bounds.v_bound
    ))
}

fn criterion_9() -> Outcome {
    let cfg = load("finite_excitation.json");
    let out = commands::simulate(&cfg, None).map_err(err)?;
    let report = &out.report;
    ensure(report.excitation.mode == ExcitationMode::Finite, || format!("mode {:?}", report.excitation.mode))?;
    let window = report.certified_window.ok_or("no window")?;
    let end = window.end.ok_or("FE window must be bounded")?;
    let decay = report.decay.as_ref().ok_or("missing decay report")?;
    ensure(decay.violations.is_empty(), || format!("{} violations", decay.violations.len()))?;
    ensure(decay.ok, || "decay report failed".into())?;
    ensure(decay.window_end == Some(end), || "decay window not bounded by k3".into())?;
    for row in out.rows() {
        ensure(row.certified == (row.k >= window.start && row.k <= end), || {
            format!("k {}: certified flag {}", row.k, row.certified)
        })?;
    }
    let after = out.rows().iter().filter(|r| r.k > end).count();
    ensure(decay.steps_uncertified >= after, || "post-k3 steps counted as certified".into())?;
    let gamma = report.gamma_bounds.as_ref().ok_or("missing gain check")?;
    ensure(gamma.ok, || "gain bounds violated in window".into())?;
    Ok(format!(
        "window [{}, {end}], {} step(s) checked, {} uncertified, clamp used on {} step(s)",
        window.start, decay.steps_checked, decay.steps_uncertified, report.clamp_steps
    ))
}

fn criterion_10() -> Outcome {
    let hp = Hyperparameters::from_bounds(
        GainParams { lambda_omega: 0.75, lambda_gamma: 0.4, kappa: 2.0 },
        1.0,
        ExcitationMode::Persistent,
        0.5,
        4.0 / 3.0,
    )
    .map_err(err)?;
    let mut worst = 0.0f64;
    for &(delta, theta_max) in &[(1e-3, 1.0), (0.01, 5.0), (0.2, 100.0), (1.7e-2, 0.3)] {
        let a = theorem_bounds(&hp, delta, theta_max, 0.5).map_err(err)?;
        let b = theorem_bounds(&hp, 2.0 * delta, theta_max, 0.5).map_err(err)?;
        ensure(a.c1 == b.c1 && a.c2 == b.c2 && a.mu1 == b.mu1 && a.mu2 == b.mu2, || "constants moved".into())?;
        let r1 = (b.v_bound - 4.0 * a.v_bound).abs() / b.v_bound;
        let r2 = (b.v_bound_alt - 2.0 * a.v_bound_alt).abs() / b.v_bound_alt;
        worst = worst.max(r1).max(r2);
        ensure(r1 <= 1e-12 && r2 <= 1e-12, || format!("delta {delta}: errors {r1:e}, {r2:e}"))?;
    }
    Ok(format!("quadratic-root form x4 and 2*delta*theta_max form x2, worst relative error {worst:.1e}"))
}

fn criterion_11() -> Outcome {
    let mut notes = Vec::new();
    for name in ["compare_scalar.json", "compare_arx.json"] {
        let cfg = load(name);
        let run = sim::simulate_plant(&cfg).map_err(err)?;
        let tuned = sim::tune(&run.phis(), &cfg.tuning, &cfg.hyperparameters).map_err(err)?;
        let proposed =
            sim::run_metrics(EstimatorKind::Proposed, &run, Some(&tuned), &cfg.tuning, &cfg.baselines).map_err(err)?;
        let rls = sim::run_metrics(EstimatorKind::BaselineRls, &run, None, &cfg.tuning, &cfg.baselines).map_err(err)?;
        ensure(proposed.tail_error < rls.tail_error, || {
            format!("{name}: proposed tail {} >= rls tail {}", proposed.tail_error, rls.tail_error)
        })?;
        let window = tuned.window.ok_or("no certified window")?;
        let out = sim::run_proposed(&run, &tuned.hp, None, tuned.window, &cfg.tuning).map_err(err)?;
        let floor = out.gamma_spectra[window.start..].iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        ensure(floor >= tuned.hp.gamma_lower - 1e-9, || {
            format!("{name}: gain min {floor} < {}", tuned.hp.gamma_lower)
        })?;
        ensure(rls.gain_min_final < 0.1 * rls.gain_min_initial, || {
            format!("{name}: rls gain {} vs initial {}", rls.gain_min_final, rls.gain_min_initial)
        })?;
        notes.push(format!(
            "{name}: tail {:.3e} vs rls {:.3e}, gain floor {:.3} >= {:.3}, rls gain {:.1e} -> {:.1e}",
            proposed.tail_error, rls.tail_error, floor, tuned.hp.gamma_lower, rls.gain_min_initial, rls.gain_min_final
        ));
    }
    Ok(notes.join("; "))
}

fn criterion_12() -> Outcome {
    let a = tempfile::tempdir().map_err(err)?;
    let b = tempfile::tempdir().map_err(err)?;
    let cfg = load("noisy_arx.json");
    commands::simulate(&cfg, Some(a.path())).map_err(err)?;
    commands::simulate(&cfg, Some(b.path())).map_err(err)?;
    let ta = std::fs::read(a.path().join("trace.csv")).map_err(err)?;
    let tb = std::fs::read(b.path().join("trace.csv")).map_err(err)?;
    ensure(ta == tb, || "traces differ".into())?;
    Ok(format!("{} bytes identical across two runs", ta.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 12] = [
        ("information matrix bounds", criterion_1),
        ("persistent excitation lower bound", criterion_2),
        ("finite excitation lower bound", criterion_3),
        ("scalar gain confinement", criterion_4),
        ("matrix gain confinement", criterion_5),
        ("decomposition and inverse identity", criterion_6),
        ("decay with static parameters", criterion_7),
        ("decay with drifting parameters", criterion_8),
        ("decay over a finite excitation window", criterion_9),
        ("compact-set scaling", criterion_10),
        ("tracking against least squares", criterion_11),
        ("determinism", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
