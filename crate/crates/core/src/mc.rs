//! Monte Carlo ground truth: PPP network realizations, the distance-based
//! femtocell activation rule, typical-user association and SINR sampling,
//! and stratified coverage estimation with standard errors.
//!
//! Per-realization random streams are derived from `(base_seed,
//! realization_index)` via ChaCha stream selection, so estimates are a
//! deterministic function of the inputs regardless of worker count.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::RegionLabel;
use crate::params::{DerivedParams, NetworkParams};

#[derive(Debug, Error)]
pub enum McError {
    #[error("invalid Monte Carlo configuration: {0}")]
    Invalid(String),
    #[error(
        "{events} of {n} realizations had no candidate base station even after resampling; \
         densities are too low for a meaningful estimate"
    )]
    TooManyDegenerate { events: usize, n: usize },
}

/// Realized base-station locations of one tier inside a circular window
/// centered at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    pub points: Vec<[f64; 2]>,
    pub window_radius_m: f64,
}

impl PointPattern {
    /// Squared distance from the origin to the nearest point, if any.
    pub fn nearest_dist2(&self) -> Option<f64> {
        self.points
            .iter()
            .map(|p| p[0] * p[0] + p[1] * p[1])
            .min_by(|a, b| a.partial_cmp(b).unwrap())
    }
}

/// One realized two-tier network with the femto activation mask and the
/// typical user's region label.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    /// Macro tier, sampled on the enlarged window `R + D` so every femto
    /// inside `R` sees all macros that could deactivate it.
    pub macro_pattern: PointPattern,
    pub femto_pattern: PointPattern,
    /// `femto_active[j]` is true iff femto `j` has no macro within `D`.
    pub femto_active: Vec<bool>,
    pub origin_region: RegionLabel,
}

/// SINR at the typical user for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSample {
    pub sinr_linear: f64,
    pub region: RegionLabel,
    /// 1 = macro, 2 = femto.
    pub serving_tier: u8,
}

/// A coverage frequency with its binomial standard error and the stratum
/// counts it was pooled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub n_samples: usize,
    pub n_inner: usize,
    pub n_outer: usize,
}

/// Per-threshold estimates: pooled plus region-conditional (absent when a
/// stratum received no samples).
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageEstimate {
    pub threshold_db: f64,
    pub overall: McEstimate,
    pub inner: Option<McEstimate>,
    pub outer: Option<McEstimate>,
}

/// Default circular window radius, `10 / sqrt(pi * lambda1)`. Nearest-BS
/// distances beyond this have probability `exp(-100)` and the truncated
/// far-field interference is negligible against thermal noise.
pub fn default_window_radius_m(p: &NetworkParams) -> f64 {
    10.0 / (std::f64::consts::PI * p.macro_tier.density_per_m2).sqrt()
}

/// Draws a homogeneous PPP of the given density on a disc of the given
/// radius centered at the origin.
pub fn sample_ppp<R: Rng>(density_per_m2: f64, window_radius_m: f64, rng: &mut R) -> PointPattern {
    let mean = density_per_m2 * std::f64::consts::PI * window_radius_m * window_radius_m;
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("positive mean").sample(rng) as usize
    } else {
        0
    };
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let r = window_radius_m * rng.gen::<f64>().sqrt();
        let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
        points.push([r * theta.cos(), r * theta.sin()]);
    }
    PointPattern {
        points,
        window_radius_m,
    }
}

/// Samples both tiers, applies the activation rule, and classifies the
/// origin. The macro window is enlarged by `D` so every femto within the
/// femto window gets a correct activation decision.
pub fn realize<R: Rng>(
    p: &NetworkParams,
    window_radius_m: f64,
    rng: &mut R,
) -> NetworkRealization {
    let d = p.inner_radius_m;
    let macro_pattern = sample_ppp(p.macro_tier.density_per_m2, window_radius_m + d, rng);
    let femto_pattern = sample_ppp(p.femto_tier.density_per_m2, window_radius_m, rng);

    let d2 = d * d;
    let has_macro_within = |x: f64, y: f64| {
        macro_pattern.points.iter().any(|m| {
            let dx = m[0] - x;
            let dy = m[1] - y;
            dx * dx + dy * dy < d2
        })
    };

    let femto_active: Vec<bool> = if d == 0.0 {
        vec![true; femto_pattern.points.len()]
    } else {
        femto_pattern
            .points
            .iter()
            .map(|f| !has_macro_within(f[0], f[1]))
            .collect()
    };

    let origin_region = if d > 0.0 && has_macro_within(0.0, 0.0) {
        RegionLabel::Inner
    } else {
        RegionLabel::Outer
    };

    NetworkRealization {
        macro_pattern,
        femto_pattern,
        femto_active,
        origin_region,
    }
}

/// Associates the typical user with the strongest long-term received power
/// (no fading in association), draws i.i.d. unit-mean exponential fading for
/// the serving and every interfering BS, and returns the SINR sample.
///
/// Returns `None` when the realization has no candidate BS at all; callers
/// resample with the next sub-stream.
pub fn sinr_at_origin<R: Rng>(
    real: &NetworkRealization,
    d: &DerivedParams,
    rng: &mut R,
) -> Option<SinrSample> {
    let half_alpha = d.alpha / 2.0;
    let rx = |power: f64, pt: &[f64; 2]| {
        let dist2 = pt[0] * pt[0] + pt[1] * pt[1];
        power * dist2.powf(-half_alpha)
    };

    // Argmax of P_i * dist^-alpha; iterating macros first with a strict
    // comparison breaks exact ties toward tier 1.
    let mut server: Option<(u8, usize, f64)> = None;
    for (i, pt) in real.macro_pattern.points.iter().enumerate() {
        let v = rx(d.p1, pt);
        if server.map_or(true, |(_, _, best)| v > best) {
            server = Some((1, i, v));
        }
    }
    for (i, pt) in real.femto_pattern.points.iter().enumerate() {
        if !real.femto_active[i] {
            continue;
        }
        let v = rx(d.p2, pt);
        if server.map_or(true, |(_, _, best)| v > best) {
            server = Some((2, i, v));
        }
    }
    let (serving_tier, serving_idx, serving_rx) = server?;

    let mut signal = 0.0;
    let mut interference = 0.0;
    for (i, pt) in real.macro_pattern.points.iter().enumerate() {
        let h: f64 = Exp1.sample(rng);
        let power = rx(d.p1, pt) * h;
        if serving_tier == 1 && i == serving_idx {
            signal = power;
        } else {
            interference += power;
        }
    }
    for (i, pt) in real.femto_pattern.points.iter().enumerate() {
        if !real.femto_active[i] {
            continue;
        }
        let h: f64 = Exp1.sample(rng);
        let power = rx(d.p2, pt) * h;
        if serving_tier == 2 && i == serving_idx {
            signal = power;
        } else {
            interference += power;
        }
    }
    let _ = serving_rx;

    Some(SinrSample {
        sinr_linear: signal / (interference + d.noise_watts),
        region: real.origin_region,
        serving_tier,
    })
}

fn realization_rng(base_seed: u64, index: usize, attempt: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    // One stream per (realization, resample attempt).
    rng.set_stream(((index as u64) << 8) | attempt as u64);
    rng
}

const MAX_RESAMPLE_ATTEMPTS: u32 = 255;

/// Draws one SINR sample per realization, in parallel, with per-index
/// streams. Degenerate (candidate-free) realizations are resampled on the
/// next sub-stream; more than 0.1% of them aborts the run.
pub fn draw_samples(
    p: &NetworkParams,
    n_realizations: usize,
    base_seed: u64,
    window_radius_m: f64,
) -> Result<Vec<SinrSample>, McError> {
    let min_radius = 5.0 / (std::f64::consts::PI * p.macro_tier.density_per_m2).sqrt();
    if window_radius_m < min_radius {
        return Err(McError::Invalid(format!(
            "window radius {window_radius_m} m is below the minimum {min_radius:.0} m \
             needed to hold enough macro cells"
        )));
    }
    let derived = p.derive();
    let degenerate = AtomicUsize::new(0);
    let samples: Result<Vec<SinrSample>, McError> = (0..n_realizations)
        .into_par_iter()
        .map(|i| {
            for attempt in 0..=MAX_RESAMPLE_ATTEMPTS {
                let mut rng = realization_rng(base_seed, i, attempt);
                let real = realize(p, window_radius_m, &mut rng);
                match sinr_at_origin(&real, &derived, &mut rng) {
                    Some(s) => return Ok(s),
                    None => {
                        degenerate.fetch_add(1, Ordering::Relaxed);
                    }
                }
            }
            Err(McError::TooManyDegenerate {
                events: degenerate.load(Ordering::Relaxed),
                n: n_realizations,
            })
        })
        .collect();
    let samples = samples?;
    let events = degenerate.load(Ordering::Relaxed);
    if events * 1000 > n_realizations {
        return Err(McError::TooManyDegenerate {
            events,
            n: n_realizations,
        });
    }
    Ok(samples)
}

fn stratum_estimate(hits: usize, n: usize, n_inner: usize, n_outer: usize) -> McEstimate {
    let v = hits as f64 / n as f64;
    McEstimate {
        value: v,
        std_err: (v * (1.0 - v) / n as f64).sqrt(),
        n_samples: n,
        n_inner,
        n_outer,
    }
}

/// Reduces drawn samples to per-threshold pooled and region-conditional
/// coverage frequencies.
pub fn estimates_from_samples(samples: &[SinrSample], thresholds_db: &[f64]) -> Vec<CoverageEstimate> {
    let n = samples.len();
    let n_inner = samples
        .iter()
        .filter(|s| s.region == RegionLabel::Inner)
        .count();
    let n_outer = n - n_inner;
    thresholds_db
        .iter()
        .map(|&t_db| {
            let t_lin = crate::params::db_to_linear(t_db);
            let mut hits_inner = 0;
            let mut hits_outer = 0;
            for s in samples {
                if s.sinr_linear > t_lin {
                    match s.region {
                        RegionLabel::Inner => hits_inner += 1,
                        RegionLabel::Outer => hits_outer += 1,
                    }
                }
            }
            CoverageEstimate {
                threshold_db: t_db,
                overall: stratum_estimate(hits_inner + hits_outer, n, n_inner, n_outer),
                inner: (n_inner > 0).then(|| stratum_estimate(hits_inner, n_inner, n_inner, 0)),
                outer: (n_outer > 0).then(|| stratum_estimate(hits_outer, n_outer, 0, n_outer)),
            }
        })
        .collect()
}

/// End-to-end coverage estimation with the default window.
pub fn estimate_coverage(
    p: &NetworkParams,
    thresholds_db: &[f64],
    n_realizations: usize,
    base_seed: u64,
) -> Result<Vec<CoverageEstimate>, McError> {
    estimate_coverage_with_window(
        p,
        thresholds_db,
        n_realizations,
        base_seed,
        default_window_radius_m(p),
    )
}

pub fn estimate_coverage_with_window(
    p: &NetworkParams,
    thresholds_db: &[f64],
    n_realizations: usize,
    base_seed: u64,
    window_radius_m: f64,
) -> Result<Vec<CoverageEstimate>, McError> {
    if n_realizations < 100 {
        return Err(McError::Invalid(format!(
            "need at least 100 realizations, got {n_realizations}"
        )));
    }
    if thresholds_db.is_empty() {
        return Err(McError::Invalid("threshold grid is empty".into()));
    }
    let samples = draw_samples(p, n_realizations, base_seed, window_radius_m)?;
    Ok(estimates_from_samples(&samples, thresholds_db))
}

/// One realization for region-map dumps, drawn from the same stream scheme
/// as `estimate_coverage` realization 0.
pub fn realization_for_map(p: &NetworkParams, base_seed: u64) -> NetworkRealization {
    let mut rng = realization_rng(base_seed, 0, 0);
    realize(p, default_window_radius_m(p), &mut rng)
}
