//! Experiment drivers: threshold sweeps, inner-radius sweeps, optimal-radius
//! search and scheme comparison tables.

use thiserror::Error;

use crate::analytic::{self, CoveragePoint, Method, Region};
use crate::mc;
use crate::params::{db_to_linear, NetworkParams};
use crate::specfun::{QuadError, QuadratureSpec};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    MonteCarlo(#[from] mc::McError),
}

/// Deployment schemes being compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Macro tier only.
    SingleTier,
    /// Both tiers, every femto active (D = 0).
    Uniform,
    /// Both tiers with the distance-based activation rule at the
    /// configured D.
    CoverageOriented,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::SingleTier => "single_tier",
            Scheme::Uniform => "uniform",
            Scheme::CoverageOriented => "coverage_oriented",
        }
    }

    /// Network parameters realizing this scheme from a base parameter set.
    pub fn apply(&self, p: &NetworkParams) -> NetworkParams {
        match self {
            Scheme::SingleTier => p.single_tier(),
            Scheme::Uniform => p.with_inner_radius(0.0),
            Scheme::CoverageOriented => *p,
        }
    }
}

pub const ALL_SCHEMES: [Scheme; 3] = [Scheme::SingleTier, Scheme::Uniform, Scheme::CoverageOriented];

/// Monte Carlo attachment for sweeps.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub n_realizations: usize,
    pub base_seed: u64,
}

/// A named curve over the sweep axis.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<CoveragePoint>,
}

/// A sampled sweep: one shared axis, several named series of equal length.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis_name: &'static str,
    pub axis_values: Vec<f64>,
    pub series: Vec<Series>,
}

/// Golden-section refinement settings for [`optimal_d`].
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub d_lo_m: f64,
    pub d_hi_m: f64,
    /// Coarse log-spaced bracketing grid size.
    pub coarse_points: usize,
    /// Final bracket width in meters.
    pub final_width_m: f64,
}

impl SearchConfig {
    pub fn for_params(p: &NetworkParams) -> Self {
        Self {
            d_lo_m: 10.0,
            d_hi_m: p.max_inner_radius_m(),
            coarse_points: 32,
            final_width_m: 1.0,
        }
    }
}

/// Result of the inner-radius maximization at one threshold.
#[derive(Debug, Clone)]
pub struct OptimalD {
    pub threshold_db: f64,
    pub d_star_m: f64,
    pub coverage_at_star: f64,
    /// True when the maximum sits on the search boundary.
    pub boundary: bool,
    /// Every (D, coverage) evaluation made during the search.
    pub search_trace: Vec<(f64, f64)>,
}

fn validate_grid(grid: &[f64], name: &str, strictly_increasing: bool) -> Result<(), SweepError> {
    if grid.is_empty() {
        return Err(SweepError::Invalid(format!("{name} grid is empty")));
    }
    if strictly_increasing {
        for w in grid.windows(2) {
            if w[1] <= w[0] {
                return Err(SweepError::Invalid(format!(
                    "{name} grid must be strictly increasing"
                )));
            }
        }
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(SweepError::Invalid(format!("{name} grid has nonfinite values")));
    }
    Ok(())
}

fn analytic_point(t_db: f64, value: f64, region: Region) -> CoveragePoint {
    CoveragePoint {
        threshold_db: t_db,
        value,
        region,
        method: Method::Analytic,
        std_err: 0.0,
    }
}

fn mc_point(t_db: f64, est: &mc::McEstimate, region: Region) -> CoveragePoint {
    CoveragePoint {
        threshold_db: t_db,
        value: est.value,
        region,
        method: Method::MonteCarlo,
        std_err: est.std_err,
    }
}

/// Coverage versus SINR threshold for the requested schemes. The
/// coverage-oriented scheme also gets region-conditional series; optional
/// Monte Carlo series carry standard errors.
pub fn sweep_threshold(
    p: &NetworkParams,
    t_grid_db: &[f64],
    schemes: &[Scheme],
    mc_cfg: Option<&McConfig>,
) -> Result<SweepResult, SweepError> {
    validate_grid(t_grid_db, "threshold", true)?;
    if schemes.is_empty() {
        return Err(SweepError::Invalid("no schemes requested".into()));
    }
    let spec = QuadratureSpec::default();
    let mut series = Vec::new();

    for scheme in schemes {
        let sp = scheme.apply(p);
        let d = sp.derive();
        let with_regions = *scheme == Scheme::CoverageOriented && sp.inner_radius_m > 0.0;

        let mut overall = Vec::with_capacity(t_grid_db.len());
        let mut inner = Vec::new();
        let mut outer = Vec::new();
        for &t_db in t_grid_db {
            let t_lin = db_to_linear(t_db);
            overall.push(analytic_point(
                t_db,
                analytic::coverage_overall(t_lin, &d, &spec)?,
                Region::Overall,
            ));
            if with_regions {
                inner.push(analytic_point(
                    t_db,
                    analytic::coverage_inner(t_lin, &d, &spec)?,
                    Region::Inner,
                ));
                outer.push(analytic_point(
                    t_db,
                    analytic::coverage_outer(t_lin, &d, &spec)?,
                    Region::Outer,
                ));
            }
        }
        series.push(Series {
            name: format!("analytic_{}", scheme.as_str()),
            points: overall,
        });
        if with_regions {
            series.push(Series {
                name: format!("analytic_{}_inner", scheme.as_str()),
                points: inner,
            });
            series.push(Series {
                name: format!("analytic_{}_outer", scheme.as_str()),
                points: outer,
            });
        }

        if let Some(cfg) = mc_cfg {
            let ests = mc::estimate_coverage(&sp, t_grid_db, cfg.n_realizations, cfg.base_seed)?;
            series.push(Series {
                name: format!("mc_{}", scheme.as_str()),
                points: ests
                    .iter()
                    .map(|e| mc_point(e.threshold_db, &e.overall, Region::Overall))
                    .collect(),
            });
            if with_regions {
                for (region, pick) in [
                    (Region::Inner, "inner"),
                    (Region::Outer, "outer"),
                ] {
                    let points: Vec<CoveragePoint> = ests
                        .iter()
                        .filter_map(|e| {
                            let est = match region {
                                Region::Inner => e.inner.as_ref(),
                                _ => e.outer.as_ref(),
                            }?;
                            Some(mc_point(e.threshold_db, est, region))
                        })
                        .collect();
                    if points.len() == t_grid_db.len() {
                        series.push(Series {
                            name: format!("mc_{}_{}", scheme.as_str(), pick),
                            points,
                        });
                    }
                }
            }
        }
    }

    Ok(SweepResult {
        axis_name: "threshold_db",
        axis_values: t_grid_db.to_vec(),
        series,
    })
}

/// Coverage versus inner-region radius at a fixed threshold, with flat
/// uniform and single-tier reference series.
pub fn sweep_d(
    p: &NetworkParams,
    d_grid_m: &[f64],
    t_db: f64,
    mc_cfg: Option<&McConfig>,
) -> Result<SweepResult, SweepError> {
    validate_grid(d_grid_m, "radius", false)?;
    if d_grid_m.iter().any(|&d| d < 0.0) {
        return Err(SweepError::Invalid("radius grid must be nonnegative".into()));
    }
    let spec = QuadratureSpec::default();
    let t_lin = db_to_linear(t_db);

    let uniform_val = analytic::coverage_uniform(t_lin, &Scheme::Uniform.apply(p).derive(), &spec)?;
    let single_val =
        analytic::coverage_uniform(t_lin, &Scheme::SingleTier.apply(p).derive(), &spec)?;

    let mut oriented = Vec::with_capacity(d_grid_m.len());
    let mut mc_points = Vec::new();
    for &d_m in d_grid_m {
        let sp = p.with_inner_radius(d_m);
        sp.validate()
            .map_err(|e| SweepError::Invalid(e.to_string()))?;
        let derived = sp.derive();
        oriented.push(analytic_point(
            t_db,
            analytic::coverage_overall(t_lin, &derived, &spec)?,
            Region::Overall,
        ));
        if let Some(cfg) = mc_cfg {
            let est = mc::estimate_coverage(&sp, &[t_db], cfg.n_realizations, cfg.base_seed)?;
            mc_points.push(mc_point(t_db, &est[0].overall, Region::Overall));
        }
    }

    let flat = |value: f64| -> Vec<CoveragePoint> {
        d_grid_m
            .iter()
            .map(|_| analytic_point(t_db, value, Region::Overall))
            .collect()
    };

    let mut series = vec![
        Series {
            name: "analytic_coverage_oriented".into(),
            points: oriented,
        },
        Series {
            name: "analytic_uniform".into(),
            points: flat(uniform_val),
        },
        Series {
            name: "analytic_single_tier".into(),
            points: flat(single_val),
        },
    ];
    if mc_cfg.is_some() {
        series.push(Series {
            name: "mc_coverage_oriented".into(),
            points: mc_points,
        });
    }

    Ok(SweepResult {
        axis_name: "inner_radius_m",
        axis_values: d_grid_m.to_vec(),
        series,
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Finds the inner radius maximizing the analytic overall coverage at one
/// threshold: coarse log-spaced bracketing, then golden-section refinement
/// inside the bracketing cell. The trace argmax is a safety net since the
/// objective is not proven unimodal.
pub fn optimal_d(
    p: &NetworkParams,
    t_db: f64,
    cfg: &SearchConfig,
) -> Result<OptimalD, SweepError> {
    if !(cfg.d_lo_m > 0.0 && cfg.d_lo_m < cfg.d_hi_m) {
        return Err(SweepError::Invalid(format!(
            "need 0 < d_lo < d_hi, got [{}, {}]",
            cfg.d_lo_m, cfg.d_hi_m
        )));
    }
    if cfg.d_hi_m > p.max_inner_radius_m() * (1.0 + 1e-12) {
        return Err(SweepError::Invalid(format!(
            "d_hi {} m exceeds the admissible maximum {:.1} m",
            cfg.d_hi_m,
            p.max_inner_radius_m()
        )));
    }
    if cfg.coarse_points < 3 {
        return Err(SweepError::Invalid("need at least 3 coarse points".into()));
    }

    let spec = QuadratureSpec::default();
    let t_lin = db_to_linear(t_db);
    let mut trace: Vec<(f64, f64)> = Vec::new();
    let mut eval = |d_m: f64| -> Result<f64, SweepError> {
        let v = analytic::coverage_overall(t_lin, &p.with_inner_radius(d_m).derive(), &spec)?;
        trace.push((d_m, v));
        Ok(v)
    };

    // Coarse log-spaced scan.
    let n = cfg.coarse_points;
    let log_lo = cfg.d_lo_m.ln();
    let log_hi = cfg.d_hi_m.ln();
    let grid: Vec<f64> = (0..n)
        .map(|i| (log_lo + (log_hi - log_lo) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let mut best_idx = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &d_m) in grid.iter().enumerate() {
        let v = eval(d_m)?;
        if v > best_val {
            best_val = v;
            best_idx = i;
        }
    }
    let boundary = best_idx == 0 || best_idx == n - 1;

    // Golden-section refinement inside the bracketing neighbors.
    let mut a = grid[best_idx.saturating_sub(1)];
    let mut b = grid[(best_idx + 1).min(n - 1)];
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > cfg.final_width_m {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        }
    }

    // The reported optimum is the best point ever evaluated.
    let (d_star_m, coverage_at_star) = trace
        .iter()
        .copied()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("trace nonempty");

    Ok(OptimalD {
        threshold_db: t_db,
        d_star_m,
        coverage_at_star,
        boundary,
        search_trace: trace,
    })
}

/// One scheme row of the comparison table.
#[derive(Debug, Clone, Copy)]
pub struct SchemeComparison {
    pub scheme: Scheme,
    pub analytic: f64,
    pub mc_value: f64,
    pub mc_std_err: f64,
}

/// Analytic and Monte Carlo coverage for all three schemes at one threshold.
/// The coverage-oriented scheme uses the inner radius carried by `p`.
pub fn compare_schemes(
    p: &NetworkParams,
    t_db: f64,
    mc_cfg: &McConfig,
) -> Result<Vec<SchemeComparison>, SweepError> {
    let spec = QuadratureSpec::default();
    let t_lin = db_to_linear(t_db);
    ALL_SCHEMES
        .iter()
        .map(|scheme| {
            let sp = scheme.apply(p);
            let analytic = analytic::coverage_overall(t_lin, &sp.derive(), &spec)?;
            let est = mc::estimate_coverage(&sp, &[t_db], mc_cfg.n_realizations, mc_cfg.base_seed)?;
            Ok(SchemeComparison {
                scheme: *scheme,
                analytic,
                mc_value: est[0].overall.value,
                mc_std_err: est[0].overall.std_err,
            })
        })
        .collect()
}
