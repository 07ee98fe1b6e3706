//! Analytic predictions: the roots of the forward and reverse active-half-edge
//! profiles, the resulting influenced and pioneer fractions, and the extinction
//! probabilities of the two-stage branching approximation.

use crate::degree::{DegreeError, JointDegreeDistribution};

/// Default bracket width for the root solvers.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Margins `E[D_t D] - E[D_t + D]` below this are refused as near-critical.
pub const NEAR_CRITICAL_REFUSAL: f64 = 1e-9;

const BRACKET_LO: f64 = 1e-12;
const BRACKET_HI: f64 = 1.0 - 1e-12;
const MAX_BISECTIONS: usize = 200;
const MAX_FIXED_POINT_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TheoryError {
    #[error(transparent)]
    Degree(#[from] DegreeError),
    #[error("distribution is not supercritical (margin {margin:e}{})", if *near_critical { ", near-critical" } else { "" })]
    NotSupercritical { margin: f64, near_critical: bool },
    #[error("no sign change of the profile on [1e-12, 1 - 1e-12]")]
    NoSignChange,
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("fixed-point iteration did not converge after {0} steps")]
    NoConvergence(usize),
}

/// Everything the theory predicts for a supercritical distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TheoryPrediction {
    /// Root in (0, 1) of the forward active profile.
    #[cfg_attr(feature = "serde", serde(rename = "xi"))]
    pub forward_root: f64,
    /// Root in (0, 1) of the reverse active profile.
    #[cfg_attr(feature = "serde", serde(rename = "xi_bar"))]
    pub reverse_root: f64,
    /// `-ln(forward_root)`: the time at which the forward exploration of the big component ends.
    #[cfg_attr(feature = "serde", serde(rename = "tau"))]
    pub forward_horizon: f64,
    /// `-ln(reverse_root)`.
    #[cfg_attr(feature = "serde", serde(rename = "tau_bar"))]
    pub reverse_horizon: f64,
    /// `1 - g(xi, xi)`: relative size of the big influenced component.
    pub influenced_fraction: f64,
    /// `1 - E[xi_bar^{D_t}]`: relative size of the set of good pioneers.
    pub pioneer_fraction: f64,
    /// Extinction probability of a branching process started below the root.
    #[cfg_attr(feature = "serde", serde(rename = "p_ext_tilde"))]
    pub subtree_extinction: f64,
    /// Extinction probability of the branching process started at the root.
    #[cfg_attr(feature = "serde", serde(rename = "p_ext"))]
    pub extinction: f64,
}

fn check_tol(tol: f64) -> Result<(), TheoryError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(TheoryError::InvalidTolerance(tol))
    }
}

fn require_supercritical(dist: &JointDegreeDistribution) -> Result<(), TheoryError> {
    let verdict = dist.criticality()?;
    let margin = dist.criticality_margin();
    if !verdict.is_supercritical() || margin < NEAR_CRITICAL_REFUSAL {
        return Err(TheoryError::NotSupercritical { margin, near_critical: margin.abs() < NEAR_CRITICAL_REFUSAL });
    }
    Ok(())
}

/// Bisection for a profile that is negative below its root and positive above.
fn bisect(f: impl Fn(f64) -> f64, tol: f64) -> Result<f64, TheoryError> {
    let mut lo = BRACKET_LO;
    if f(lo) >= 0.0 {
        return Err(TheoryError::NoSignChange);
    }
    // Near 1 the profile is a difference of O(1) terms; back off until the sign is resolved.
    let mut hi = BRACKET_HI;
    let mut gap = 1e-12;
    while f(hi) <= 0.0 {
        gap *= 10.0;
        if gap > 0.5 {
            return Err(TheoryError::NoSignChange);
        }
        hi = 1.0 - gap;
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Unique root in (0, 1) of `lambda x^2 - lambda_r x - E[D_t x^D]`.
pub fn solve_xi(dist: &JointDegreeDistribution, tol: f64) -> Result<f64, TheoryError> {
    check_tol(tol)?;
    require_supercritical(dist)?;
    bisect(|x| dist.forward_active_unchecked(x), tol)
}

/// Unique root in (0, 1) of the reverse active profile.
pub fn solve_xi_bar(dist: &JointDegreeDistribution, tol: f64) -> Result<f64, TheoryError> {
    check_tol(tol)?;
    require_supercritical(dist)?;
    bisect(|x| dist.reverse_active_unchecked(x), tol)
}

/// Solves both roots and assembles the full prediction.
pub fn predict(dist: &JointDegreeDistribution, tol: f64) -> Result<TheoryPrediction, TheoryError> {
    let xi = solve_xi(dist, tol)?;
    let xi_bar = solve_xi_bar(dist, tol)?;
    let (subtree_extinction, extinction) = branching_extinction(dist, tol)?;
    Ok(TheoryPrediction {
        forward_root: xi,
        reverse_root: xi_bar,
        forward_horizon: -libm::log(xi),
        reverse_horizon: -libm::log(xi_bar),
        influenced_fraction: 1.0 - dist.joint_pgf_unchecked(xi, xi),
        pioneer_fraction: 1.0 - dist.transmitter_pgf_unchecked(xi_bar),
        subtree_extinction,
        extinction,
    })
}

/// Extinction probabilities `(below-root, root)` of the branching approximation.
///
/// Non-root offspring counts follow the transmitter marginal of the size-biased
/// law; the smallest fixed point of its pgf is found by monotone iteration from
/// zero, stopped when successive iterates differ by less than `tol`. The root
/// value is `E[p^{D_t}]` at that fixed point. Subcritical and critical offspring
/// laws return `(1, 1)` directly.
pub fn branching_extinction(dist: &JointDegreeDistribution, tol: f64) -> Result<(f64, f64), TheoryError> {
    check_tol(tol)?;
    let offspring = dist.size_biased()?.transmitter_marginal();
    let mean: f64 = offspring.iter().enumerate().map(|(w, p)| w as f64 * p).sum();
    let deterministic_one = offspring.get(1).is_some_and(|&p| (p - 1.0).abs() <= 1e-12);
    if !deterministic_one && mean <= 1.0 + 1e-12 {
        return Ok((1.0, 1.0));
    }
    let pgf = |x: f64| -> f64 {
        // Horner from the top degree.
        offspring.iter().rev().fold(0.0, |acc, &p| acc * x + p)
    };
    let mut x = 0.0;
    let mut converged = false;
    for _ in 0..MAX_FIXED_POINT_ITERATIONS {
        let next = pgf(x);
        let step = (next - x).abs();
        x = next;
        if step < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(TheoryError::NoConvergence(MAX_FIXED_POINT_ITERATIONS));
    }
    Ok((x, dist.transmitter_pgf_unchecked(x)))
}
