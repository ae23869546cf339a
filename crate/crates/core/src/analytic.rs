//! Numerical evaluation of the max-received-power distributions, interference
//! Laplace factors, and coverage probabilities for uniform and
//! distance-activated femtocell deployments.
//!
//! Every semi-infinite coverage integral is evaluated after the substitution
//! `s = t^(-2/alpha)`, which removes the `t -> 0` singularity and turns the
//! dominant factor into a plain exponential `exp(-k*s)`. A further rescaling
//! `y = k*s` puts the kernel at unit decay rate, and piecewise kernels are
//! split at the image of the breakpoint `s* = D^2 / p1^(2/alpha)` so no panel
//! straddles it.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::params::{DerivedParams, NetworkParams};
use crate::specfun::{self, QuadError, QuadratureSpec};

/// Which side of the inner-region boundary a location falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    Inner,
    Outer,
}

/// Region a coverage value is conditioned on (or none).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Inner,
    Outer,
    Overall,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Inner => "inner",
            Region::Outer => "outer",
            Region::Overall => "overall",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    MonteCarlo,
}

/// One sampled point of a coverage curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveragePoint {
    pub threshold_db: f64,
    pub value: f64,
    pub region: Region,
    pub method: Method,
    /// Standard error; 0 for analytic values.
    pub std_err: f64,
}

/// CDF of the maximum long-term received power `q` under uniform deployment:
/// `exp(-pi * xi * t^(-2/alpha))`.
pub fn cdf_q_uniform(t: f64, d: &DerivedParams) -> f64 {
    (-PI * d.xi * t.powf(-2.0 / d.alpha)).exp()
}

/// Density of `q` under uniform deployment.
pub fn pdf_q_uniform(t: f64, d: &DerivedParams) -> f64 {
    let e = 2.0 / d.alpha;
    (2.0 * PI * d.xi / d.alpha) * t.powf(-e - 1.0) * (-PI * d.xi * t.powf(-e)).exp()
}

/// CDF of `q` conditioned on the typical user being in the outer region.
///
/// Above the breakpoint `p1/D^alpha` only the femto tier can supply the
/// maximum; below it the two-tier CDF is renormalized by the probability
/// `exp(-pi*lambda1*D^2)` of the conditioning event.
pub fn cdf_q_outer(t: f64, d: &DerivedParams) -> f64 {
    let e = 2.0 / d.alpha;
    if t > d.breakpoint_t {
        (-PI * d.lambda2 * d.p2.powf(e) * t.powf(-e)).exp()
    } else {
        let c1 = PI * d.lambda1 * d.inner_radius_m.powi(2);
        (-PI * d.xi * t.powf(-e) + c1).exp()
    }
}

/// Density of `q` conditioned on the outer region.
pub fn pdf_q_outer(t: f64, d: &DerivedParams) -> f64 {
    let e = 2.0 / d.alpha;
    if t > d.breakpoint_t {
        let a2 = d.lambda2 * d.p2.powf(e);
        (2.0 * PI / d.alpha) * a2 * t.powf(-e - 1.0) * (-PI * a2 * t.powf(-e)).exp()
    } else {
        let c1 = PI * d.lambda1 * d.inner_radius_m.powi(2);
        (2.0 * PI / d.alpha) * d.xi * t.powf(-e - 1.0) * (-PI * d.xi * t.powf(-e) + c1).exp()
    }
}

/// CDF of `q` conditioned on the inner region, where the user is assumed to
/// be macro-served; zero below the breakpoint.
pub fn cdf_q_inner(t: f64, d: &DerivedParams) -> f64 {
    if t <= d.breakpoint_t {
        return 0.0;
    }
    let e = 2.0 / d.alpha;
    let c1 = PI * d.lambda1 * d.inner_radius_m.powi(2);
    let num = (-PI * d.lambda1 * d.p1.powf(e) * t.powf(-e)).exp() - (-c1).exp();
    num / (1.0 - (-c1).exp())
}

/// Density of `q` conditioned on the inner region.
pub fn pdf_q_inner(t: f64, d: &DerivedParams) -> f64 {
    if t <= d.breakpoint_t {
        return 0.0;
    }
    let e = 2.0 / d.alpha;
    let c1 = PI * d.lambda1 * d.inner_radius_m.powi(2);
    let a1 = d.lambda1 * d.p1.powf(e);
    (2.0 * PI / d.alpha) * a1 * t.powf(-e - 1.0) * (-PI * a1 * t.powf(-e)).exp()
        / (1.0 - (-c1).exp())
}

/// Interference Laplace factor for an outer-region user at received-power
/// level `t` and linear threshold `t_lin`.
pub fn laplace_outer(t_lin: f64, t: f64, d: &DerivedParams) -> Result<f64, QuadError> {
    let e = 2.0 / d.alpha;
    let rho_t = specfun::rho(t_lin, d.alpha)?;
    if t <= d.breakpoint_t {
        Ok((-PI * d.xi * rho_t * t.powf(-e)).exp())
    } else {
        let dd = d.inner_radius_m;
        let rho_macro = specfun::rho(d.p1 * t_lin / (dd.powf(d.alpha) * t), d.alpha)?;
        Ok((-PI * d.lambda1 * dd * dd * rho_macro).exp()
            * (-PI * d.lambda2 * d.p2.powf(e) * rho_t * t.powf(-e)).exp())
    }
}

/// Interference Laplace factor for an inner-region user: macro interference
/// from the whole plane, femto interference only from outside `B(o, D)`.
pub fn laplace_inner(t_lin: f64, t: f64, d: &DerivedParams) -> Result<f64, QuadError> {
    let e = 2.0 / d.alpha;
    let rho_t = specfun::rho(t_lin, d.alpha)?;
    let dd = d.inner_radius_m;
    let femto = if d.lambda2 > 0.0 && dd > 0.0 {
        let rho_femto = specfun::rho(d.p2 * t_lin / (dd.powf(d.alpha) * t), d.alpha)?;
        (-PI * d.lambda2 * dd * dd * rho_femto).exp()
    } else if d.lambda2 > 0.0 {
        (-PI * d.lambda2 * d.p2.powf(e) * rho_t * t.powf(-e)).exp()
    } else {
        1.0
    };
    Ok((-PI * d.lambda1 * d.p1.powf(e) * rho_t * t.powf(-e)).exp() * femto)
}

/// Integrates `g(y)*exp(-y)` over `[lo, hi]` where `hi` may be infinite,
/// propagating any error raised by `g` through the quadrature callback.
fn integrate_exp_kernel<G: Fn(f64) -> Result<f64, QuadError>>(
    g: G,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    let failure: RefCell<Option<QuadError>> = RefCell::new(None);
    let result = specfun::integrate(
        |y: f64| match g(y) {
            Ok(v) => v * (-y).exp(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        spec,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    result
}

/// Coverage probability under uniform deployment (all femtos active).
///
/// In the rescaled variable `y = pi*xi*(1+rho)*s` the integral becomes
/// `1/(1+rho) * int_0^inf exp(-T*sigma^2*(y/k)^(alpha/2)) e^-y dy`.
pub fn coverage_uniform(
    t_lin: f64,
    d: &DerivedParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    check_threshold(t_lin)?;
    let rho_t = specfun::rho(t_lin, d.alpha)?;
    let k = PI * d.xi * (1.0 + rho_t);
    let noise = t_lin * d.noise_watts;
    let half_alpha = d.alpha / 2.0;
    let integral = integrate_exp_kernel(
        |y| Ok((-noise * (y / k).powf(half_alpha)).exp()),
        0.0,
        f64::INFINITY,
        spec,
    )?;
    Ok(integral / (1.0 + rho_t))
}

/// Coverage probability conditioned on the outer region.
pub fn coverage_outer(
    t_lin: f64,
    d: &DerivedParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    check_threshold(t_lin)?;
    let dd = d.inner_radius_m;
    if dd == 0.0 {
        // No inner region: the conditioning event has probability 1.
        return coverage_uniform(t_lin, d, spec);
    }
    let e = 2.0 / d.alpha;
    let half_alpha = d.alpha / 2.0;
    let rho_t = specfun::rho(t_lin, d.alpha)?;
    let noise = t_lin * d.noise_watts;
    let c1 = PI * d.lambda1 * dd * dd;
    let s_break = dd * dd / d.p1.powf(e);

    // Piece 1: t <= p1/D^alpha, two-tier kernel renormalized by exp(-c1).
    // Shifted to z = y - k1*s_break so the exp(c1) normalization combines
    // with the kernel tail instead of amplifying quadrature error.
    let k1 = PI * d.xi * (1.0 + rho_t);
    let shift = k1 * s_break;
    let piece1 = (PI * d.xi / k1)
        * (c1 - shift).exp()
        * integrate_exp_kernel(
            |z| Ok((-noise * ((z + shift) / k1).powf(half_alpha)).exp()),
            0.0,
            f64::INFINITY,
            spec,
        )?;

    // Piece 2: t > p1/D^alpha, femto-only kernel with the truncated-macro
    // Laplace factor.
    let a2 = d.lambda2 * d.p2.powf(e);
    let piece2 = if a2 > 0.0 {
        let k2 = PI * a2 * (1.0 + rho_t);
        let d_alpha = dd.powf(d.alpha);
        (PI * a2 / k2)
            * integrate_exp_kernel(
                |y| {
                    let s = y / k2;
                    let rho_macro =
                        specfun::rho(d.p1 * t_lin * s.powf(half_alpha) / d_alpha, d.alpha)?;
                    Ok((-noise * s.powf(half_alpha) - c1 * rho_macro).exp())
                },
                0.0,
                k2 * s_break,
                spec,
            )?
    } else {
        0.0
    };

    Ok(piece1 + piece2)
}

/// Coverage probability conditioned on the inner region, where the user is
/// assumed macro-served.
pub fn coverage_inner(
    t_lin: f64,
    d: &DerivedParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    check_threshold(t_lin)?;
    let dd = d.inner_radius_m;
    if dd == 0.0 {
        return Err(QuadError::Domain(
            "inner-region coverage undefined for D = 0".into(),
        ));
    }
    let e = 2.0 / d.alpha;
    let half_alpha = d.alpha / 2.0;
    let rho_t = specfun::rho(t_lin, d.alpha)?;
    let noise = t_lin * d.noise_watts;
    let c1 = PI * d.lambda1 * dd * dd;
    let a1 = d.lambda1 * d.p1.powf(e);
    let k = PI * a1 * (1.0 + rho_t);
    let d_alpha = dd.powf(d.alpha);
    // Upper limit: y = k * s_break = pi*lambda1*D^2 * (1 + rho).
    let upper = c1 * (1.0 + rho_t);
    let integral = integrate_exp_kernel(
        |y| {
            let s = y / k;
            let femto = if d.lambda2 > 0.0 {
                let rho_femto =
                    specfun::rho(d.p2 * t_lin * s.powf(half_alpha) / d_alpha, d.alpha)?;
                (-PI * d.lambda2 * dd * dd * rho_femto).exp()
            } else {
                1.0
            };
            Ok((-noise * s.powf(half_alpha)).exp() * femto)
        },
        0.0,
        upper,
        spec,
    )?;
    Ok((PI * a1 / k) * integral / (1.0 - (-c1).exp()))
}

/// Overall coverage: mixture of inner and outer conditional coverage with
/// the region-occupancy weights.
pub fn coverage_overall(
    t_lin: f64,
    d: &DerivedParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    if d.inner_radius_m == 0.0 {
        return coverage_uniform(t_lin, d, spec);
    }
    let w = d.inner_region_prob();
    let inner = coverage_inner(t_lin, d, spec)?;
    let outer = coverage_outer(t_lin, d, spec)?;
    Ok(w * inner + (1.0 - w) * outer)
}

fn check_threshold(t_lin: f64) -> Result<(), QuadError> {
    if !(t_lin > 0.0) || !t_lin.is_finite() {
        return Err(QuadError::Domain(format!(
            "linear SINR threshold must be positive and finite, got {t_lin}"
        )));
    }
    Ok(())
}

/// Convenience wrapper: coverage of the given scheme at a dB threshold.
pub fn coverage_overall_db(
    t_db: f64,
    p: &NetworkParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    coverage_overall(crate::params::db_to_linear(t_db), &p.derive(), spec)
}
