//! Acceptance gate: seven end-to-end criteria with pinned tolerances.
//!
//! All criteria run sequentially in a single test so the timed ones are not
//! polluted by concurrent work; one PASS/FAIL line is printed per criterion
//! (visible with `cargo test --test acceptance -- --nocapture`, or on
//! failure).

use std::f64::consts::PI;
use std::time::Instant;

use hetcov::analytic;
use hetcov::mc;
use hetcov::params::{db_to_linear, NetworkParams, TierParams};
use hetcov::specfun::{self, QuadratureSpec};
use hetcov::sweep::{self, Scheme, SearchConfig};

/// 46/20 dBm, lambda1 = 1 per km^2, alpha = 4, L0 = -34 dB, noise -104 dBm.
fn base_params(femto_to_macro_ratio: f64, inner_radius_m: f64) -> NetworkParams {
    NetworkParams::new(
        TierParams {
            tx_power_dbm: 46.0,
            density_per_m2: 1e-6,
        },
        TierParams {
            tx_power_dbm: 20.0,
            density_per_m2: femto_to_macro_ratio / 1e6,
        },
        4.0,
        -34.0,
        -104.0,
        inner_radius_m,
    )
    .unwrap()
}

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate { failures: Vec::new() }
    }

    fn report(&mut self, id: u32, name: &str, errors: Vec<String>) {
        if errors.is_empty() {
            println!("criterion {id} ({name}): PASS");
        } else {
            println!("criterion {id} ({name}): FAIL");
            for e in &errors {
                println!("    {e}");
            }
            self.failures
                .push(format!("criterion {id} ({name}): {}", errors.join("; ")));
        }
    }
}

fn check(errors: &mut Vec<String>, ok: bool, message: String) {
    if !ok {
        errors.push(message);
    }
}

fn check_close(errors: &mut Vec<String>, label: &str, got: f64, want: f64, tol: f64) {
    check(
        errors,
        (got - want).abs() <= tol,
        format!("{label}: got {got:.4}, want {want} +- {tol}"),
    );
}

// Criterion 1: reference coverage values at D = 500 m, density ratio 10,
// T = 0 dB, for the three deployment schemes.
fn criterion_1() -> Vec<String> {
    let mut errors = Vec::new();
    let start = Instant::now();
    let spec = QuadratureSpec::default();
    let p = base_params(10.0, 500.0);

    let oriented = analytic::coverage_overall(1.0, &p.derive(), &spec).unwrap();
    let uniform =
        analytic::coverage_uniform(1.0, &Scheme::Uniform.apply(&p).derive(), &spec).unwrap();
    let single =
        analytic::coverage_uniform(1.0, &Scheme::SingleTier.apply(&p).derive(), &spec).unwrap();

    check_close(&mut errors, "coverage_oriented(D=500)", oriented, 0.56, 0.02);
    check_close(&mut errors, "uniform", uniform, 0.53, 0.02);
    check_close(&mut errors, "single_tier", single, 0.50, 0.02);

    let elapsed = start.elapsed().as_secs_f64();
    check(
        &mut errors,
        elapsed < 5.0,
        format!("runtime {elapsed:.2} s exceeds 5 s"),
    );
    errors
}

// Criterion 2: at density ratio 40 and T = 0 dB the best inner radius on a
// 40-point grid reaches 0.61 coverage versus 0.55 uniform.
fn criterion_2() -> Vec<String> {
    let mut errors = Vec::new();
    let start = Instant::now();
    let spec = QuadratureSpec::default();
    let p = base_params(40.0, 0.0);

    let grid: Vec<f64> = (1..=40).map(|i| i as f64 * 25.0).collect();
    let mut best = f64::NEG_INFINITY;
    for &d_m in &grid {
        let v = analytic::coverage_overall(1.0, &p.with_inner_radius(d_m).derive(), &spec)
            .unwrap();
        best = best.max(v);
    }
    let uniform = analytic::coverage_uniform(1.0, &p.derive(), &spec).unwrap();

    check_close(&mut errors, "max_D coverage_oriented", best, 0.61, 0.02);
    check_close(&mut errors, "uniform", uniform, 0.55, 0.02);

    let elapsed = start.elapsed().as_secs_f64();
    check(
        &mut errors,
        elapsed < 30.0,
        format!("runtime {elapsed:.2} s exceeds 30 s"),
    );
    errors
}

// Criterion 3: rho(x, 4) against its arctan closed form, and the
// interference-limited closed form 1/(1 + rho(T, alpha)).
fn criterion_3() -> Vec<String> {
    let mut errors = Vec::new();
    let spec = QuadratureSpec::default();

    for i in 0..=60 {
        let x = 10f64.powf(-6.0 + 12.0 * i as f64 / 60.0);
        let got = specfun::rho(x, 4.0).unwrap();
        let want = specfun::rho_alpha4_closed(x);
        check(
            &mut errors,
            (got - want).abs() <= 1e-10 * (1.0 + want.abs()),
            format!("rho({x:.3e}, 4) = {got:.15e}, closed form {want:.15e}"),
        );
    }

    // Noise at -1000 dBm is 1e-103 W: zero against any received power here.
    for alpha in [3.0, 4.0, 5.0] {
        let mut p = base_params(10.0, 0.0);
        p.alpha = alpha;
        p.noise_dbm = -1000.0;
        let d = p.derive();
        for t_db in [-5.0, 0.0, 5.0, 10.0] {
            let t_lin = db_to_linear(t_db);
            let got = analytic::coverage_uniform(t_lin, &d, &spec).unwrap();
            let want = 1.0 / (1.0 + specfun::rho(t_lin, alpha).unwrap());
            check(
                &mut errors,
                (got - want).abs() <= 1e-6,
                format!("sigma2=0, alpha={alpha}, T={t_db} dB: got {got:.8}, want {want:.8}"),
            );
        }
    }
    errors
}

// Criterion 4: analytic versus Monte Carlo at D = 400 m, ratio 10, n = 1e4,
// single worker.
fn criterion_4() -> Vec<String> {
    let mut errors = Vec::new();
    let spec = QuadratureSpec::default();
    let p = base_params(10.0, 400.0);
    let d = p.derive();
    let thresholds = [-5.0, 0.0, 5.0, 10.0];

    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let estimates = pool
        .install(|| mc::estimate_coverage(&p, &thresholds, 10_000, 42))
        .unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    check(
        &mut errors,
        elapsed < 60.0,
        format!("single-worker runtime {elapsed:.2} s exceeds 60 s"),
    );

    for est in &estimates {
        let t_lin = db_to_linear(est.threshold_db);
        let cases = [
            (
                "overall",
                analytic::coverage_overall(t_lin, &d, &spec).unwrap(),
                est.overall,
                0.015,
            ),
            (
                "outer",
                analytic::coverage_outer(t_lin, &d, &spec).unwrap(),
                est.outer.expect("outer stratum populated"),
                0.015,
            ),
            (
                "inner",
                analytic::coverage_inner(t_lin, &d, &spec).unwrap(),
                est.inner.expect("inner stratum populated"),
                0.03,
            ),
        ];
        for (region, analytic_val, mc_est, floor) in cases {
            let tol = (3.0 * mc_est.std_err).max(floor);
            check(
                &mut errors,
                (analytic_val - mc_est.value).abs() <= tol,
                format!(
                    "T={} dB {region}: analytic {analytic_val:.4} vs MC {:.4} (SE {:.4}), tol {tol:.4}",
                    est.threshold_db, mc_est.value, mc_est.std_err
                ),
            );
        }
    }
    errors
}

/// Integrates `pdf` over `[lo, hi]` with a tight tolerance.
fn pdf_mass(pdf: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let spec = QuadratureSpec {
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        max_subdivisions: 4000,
    };
    specfun::integrate(pdf, lo, hi, &spec).unwrap()
}

// Criterion 5: degeneracies, pdf normalizations, breakpoint continuity.
fn criterion_5() -> Vec<String> {
    let mut errors = Vec::new();
    let spec = QuadratureSpec::default();

    // D = 0 collapses overall coverage to the uniform formula.
    let d0 = base_params(10.0, 0.0).derive();
    for t_db in [-5.0, 0.0, 10.0] {
        let t_lin = db_to_linear(t_db);
        let a = analytic::coverage_overall(t_lin, &d0, &spec).unwrap();
        let b = analytic::coverage_uniform(t_lin, &d0, &spec).unwrap();
        check(
            &mut errors,
            (a - b).abs() <= 1e-8,
            format!("D=0 overall vs uniform at {t_db} dB: {a:.12} vs {b:.12}"),
        );
    }

    // lambda2 = 0 makes all three schemes identical.
    let p = base_params(0.0, 400.0);
    for t_db in [-5.0, 0.0, 10.0] {
        let t_lin = db_to_linear(t_db);
        let vals: Vec<f64> = [Scheme::SingleTier, Scheme::Uniform, Scheme::CoverageOriented]
            .iter()
            .map(|s| {
                analytic::coverage_overall(t_lin, &s.apply(&p).derive(), &spec).unwrap()
            })
            .collect();
        for v in &vals[1..] {
            check(
                &mut errors,
                (v - vals[0]).abs() <= 1e-8,
                format!("lambda2=0 schemes differ at {t_db} dB: {vals:?}"),
            );
        }
    }

    // pdf normalizations. Bounds are picked so the untruncated tail mass is
    // below 1e-10 on each side, read off the closed-form CDFs.
    let d = base_params(10.0, 400.0).derive();
    let e = 2.0 / d.alpha;
    let half_alpha = d.alpha / 2.0;
    let c1 = PI * d.lambda1 * d.inner_radius_m.powi(2);
    let a1 = d.lambda1 * d.p1.powf(e);
    let a2 = d.lambda2 * d.p2.powf(e);
    let bp = d.breakpoint_t;

    // uniform: CDF(t) = exp(-pi*xi*t^-e)
    let lo = (PI * d.xi / 26.0).powf(half_alpha);
    let hi = (PI * d.xi / 1e-10).powf(half_alpha);
    let mass = pdf_mass(|t| analytic::pdf_q_uniform(t, &d), lo, hi);
    check(
        &mut errors,
        (mass - 1.0).abs() <= 1e-8,
        format!("pdf_q_uniform mass {mass:.12}"),
    );

    // outer: split at the breakpoint so the kernel change never straddles a
    // quadrature panel.
    let lo = (PI * d.xi / (c1 + 25.0)).powf(half_alpha);
    let hi = (PI * a2 / 1e-10).powf(half_alpha);
    let mass = pdf_mass(|t| analytic::pdf_q_outer(t, &d), lo, bp)
        + pdf_mass(|t| analytic::pdf_q_outer(t, &d), bp, hi);
    check(
        &mut errors,
        (mass - 1.0).abs() <= 1e-8,
        format!("pdf_q_outer mass {mass:.12}"),
    );

    // inner: supported on (breakpoint, inf)
    let hi = (PI * a1 / (1e-10 * (1.0 - (-c1).exp()))).powf(half_alpha);
    let mass = pdf_mass(|t| analytic::pdf_q_inner(t, &d), bp, hi);
    check(
        &mut errors,
        (mass - 1.0).abs() <= 1e-8,
        format!("pdf_q_inner mass {mass:.12}"),
    );

    // Breakpoint continuity, all through the identity
    // p1^(2/alpha) * (p1/D^alpha)^(-2/alpha) = D^2.
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());

    let left = (-PI * d.xi * bp.powf(-e) + c1).exp();
    let right = (-PI * a2 * bp.powf(-e)).exp();
    check(
        &mut errors,
        rel(left, right) <= 1e-12,
        format!("cdf_q_outer breakpoint: {left:.15e} vs {right:.15e}"),
    );
    check(
        &mut errors,
        rel(analytic::cdf_q_outer(bp, &d), left) <= 1e-12,
        "cdf_q_outer does not match its own branch at the breakpoint".into(),
    );

    let inner_limit = ((-PI * a1 * bp.powf(-e)).exp() - (-c1).exp()) / (1.0 - (-c1).exp());
    check(
        &mut errors,
        inner_limit.abs() <= 1e-12,
        format!("cdf_q_inner right limit at breakpoint: {inner_limit:.3e}"),
    );
    check(
        &mut errors,
        analytic::cdf_q_inner(bp, &d) == 0.0,
        "cdf_q_inner(breakpoint) != 0".into(),
    );

    for t_db in [-5.0, 0.0, 10.0] {
        let t_lin = db_to_linear(t_db);
        let rho_t = specfun::rho(t_lin, d.alpha).unwrap();
        let left = analytic::laplace_outer(t_lin, bp, &d).unwrap();
        let dd = d.inner_radius_m;
        let rho_macro = specfun::rho(d.p1 * t_lin / (dd.powf(d.alpha) * bp), d.alpha).unwrap();
        let right = (-PI * d.lambda1 * dd * dd * rho_macro).exp()
            * (-PI * a2 * rho_t * bp.powf(-e)).exp();
        check(
            &mut errors,
            rel(left, right) <= 1e-12,
            format!("laplace_outer breakpoint at {t_db} dB: {left:.15e} vs {right:.15e}"),
        );
    }
    errors
}

// Criterion 6: the optimal inner radius shrinks as the threshold grows, and
// shrinks when the femto density grows.
fn criterion_6() -> Vec<String> {
    let mut errors = Vec::new();
    let p10 = base_params(10.0, 0.0);
    let cfg10 = SearchConfig::for_params(&p10);

    let mut prev: Option<(f64, f64)> = None;
    let mut d_star_at_zero = f64::NAN;
    for t_db in [-5.0, 0.0, 5.0, 10.0] {
        let opt = sweep::optimal_d(&p10, t_db, &cfg10).unwrap();
        if t_db == 0.0 {
            d_star_at_zero = opt.d_star_m;
        }
        if let Some((prev_t, prev_d)) = prev {
            check(
                &mut errors,
                opt.d_star_m < prev_d,
                format!(
                    "d_star not decreasing: {prev_d:.1} m at {prev_t} dB vs {:.1} m at {t_db} dB",
                    opt.d_star_m
                ),
            );
        }
        prev = Some((t_db, opt.d_star_m));
    }

    let p40 = base_params(40.0, 0.0);
    let opt40 = sweep::optimal_d(&p40, 0.0, &SearchConfig::for_params(&p40)).unwrap();
    check(
        &mut errors,
        opt40.d_star_m < d_star_at_zero,
        format!(
            "d_star(ratio 40) = {:.1} m not below d_star(ratio 10) = {d_star_at_zero:.1} m",
            opt40.d_star_m
        ),
    );
    errors
}

// Criterion 7: Monte Carlo statistical suite.
fn criterion_7() -> Vec<String> {
    let mut errors = Vec::new();
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);

    // PPP count mean over 1e4 draws, expectation lambda*pi*R^2 = 100.
    let lambda = 1e-6;
    let radius = 10.0 / (PI * lambda).sqrt();
    let expected = lambda * PI * radius * radius;
    let n_draws = 10_000;
    let mut total = 0usize;
    let mut nearest = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let pat = mc::sample_ppp(lambda, radius, &mut rng);
        total += pat.points.len();
        if let Some(d2) = pat.nearest_dist2() {
            nearest.push(d2.sqrt());
        }
    }
    let mean = total as f64 / n_draws as f64;
    // Poisson count: SE of the mean is sqrt(mu/n).
    let se = (expected / n_draws as f64).sqrt();
    check(
        &mut errors,
        (mean - expected).abs() <= 3.0 * se,
        format!("PPP mean count {mean:.3} vs {expected:.3} (3 SE = {:.3})", 3.0 * se),
    );

    // Kolmogorov-Smirnov on nearest distances vs 1 - exp(-lambda*pi*d^2),
    // 1% significance. Empty patterns (probability e^-100) would just be
    // skipped.
    nearest.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = nearest.len() as f64;
    let mut ks = 0.0f64;
    for (i, r) in nearest.iter().enumerate() {
        let f = 1.0 - (-lambda * PI * r * r).exp();
        ks = ks.max(((i + 1) as f64 / n - f).abs());
        ks = ks.max((f - i as f64 / n).abs());
    }
    let critical = 1.628 / n.sqrt();
    check(
        &mut errors,
        ks <= critical,
        format!("nearest-distance KS statistic {ks:.5} exceeds 1% critical {critical:.5}"),
    );

    // Inactive-femto fraction against 1 - exp(-pi*lambda1*D^2).
    let p = base_params(10.0, 400.0);
    let want = p.derive().inner_region_prob();
    let window = mc::default_window_radius_m(&p);
    let mut fractions = Vec::new();
    for _ in 0..200 {
        let real = mc::realize(&p, window, &mut rng);
        let total = real.femto_active.len();
        if total == 0 {
            continue;
        }
        let inactive = real.femto_active.iter().filter(|a| !**a).count();
        fractions.push(inactive as f64 / total as f64);
    }
    let m = fractions.len() as f64;
    let mean = fractions.iter().sum::<f64>() / m;
    let var = fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let se = (var / m).sqrt();
    check(
        &mut errors,
        (mean - want).abs() <= 3.0 * se,
        format!("inactive fraction {mean:.4} vs {want:.4} (3 SE = {:.4})", 3.0 * se),
    );

    // Determinism across worker counts: identical sample streams bit for bit.
    let draw_with = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc::draw_samples(&p, 2000, 42, window))
            .unwrap()
    };
    let one = draw_with(1);
    let eight = draw_with(8);
    check(
        &mut errors,
        one == eight,
        "samples differ between 1-thread and 8-thread pools".into(),
    );
    errors
}

#[test]
fn acceptance_criteria() {
    let mut gate = Gate::new();
    gate.report(1, "reference coverage at D = 500 m", criterion_1());
    gate.report(2, "optimal-radius gain at density ratio 40", criterion_2());
    gate.report(3, "closed-form oracles", criterion_3());
    gate.report(4, "analytic vs Monte Carlo", criterion_4());
    gate.report(5, "degeneracy and continuity suite", criterion_5());
    gate.report(6, "optimal radius trends", criterion_6());
    gate.report(7, "Monte Carlo statistics", criterion_7());
    assert!(
        gate.failures.is_empty(),
        "acceptance failures:\n{}",
        gate.failures.join("\n")
    );
}
