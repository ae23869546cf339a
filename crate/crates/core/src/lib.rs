//! Downlink coverage probability for a two-tier (macro + femto) cellular
//! network in which femtocells within distance `D` of any macrocell site are
//! switched off.
//!
//! Two independent evaluation routes are provided:
//! * [`analytic`] — numerical evaluation of the stochastic-geometry coverage
//!   integrals (adaptive quadrature over the max-received-power distribution),
//! * [`mc`] — a Monte Carlo point-process simulator with reproducible
//!   per-realization random streams.
//!
//! [`sweep`] drives threshold sweeps, inner-radius sweeps, optimal-radius
//! search, and scheme comparison tables on top of both routes.

pub mod analytic;
pub mod cli;
pub mod mc;
pub mod params;
pub mod specfun;
pub mod sweep;
