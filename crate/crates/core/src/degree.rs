//! Limiting joint law of (receiver degree, transmitter degree) and the
//! generating functions evaluated on it.
//!
//! All sums run over a finite support in order of increasing total degree.
//! Infinite families enter through truncation with an explicit budget on the
//! discarded mass.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// Mass above the truncation cutoff that a family constructor may discard.
pub const MAX_DISCARDED_MASS: f64 = 1e-9;

/// Absolute tolerance on the total probability of a table.
pub const TABLE_SUM_TOLERANCE: f64 = 1e-6;

/// Band around the critical point inside which a distribution is flagged as near-critical.
pub const NEAR_CRITICAL_BAND: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DegreeError {
    #[error("argument {0} lies outside [0, 1]")]
    OutOfDomain(f64),
    #[error("probability {prob} at cell ({receivers}, {transmitters}) is negative or not finite")]
    InvalidProbability { receivers: u32, transmitters: u32, prob: f64 },
    #[error("cell ({receivers}, {transmitters}) appears more than once")]
    DuplicateCell { receivers: u32, transmitters: u32 },
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("distribution has no positive mass")]
    Empty,
    #[error("mean total degree is zero")]
    ZeroMeanDegree,
    #[error("P(D = 1) = 0: a vertex of total degree one must have positive probability")]
    NoDegreeOneMass,
    #[error("invalid family parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("truncation discards mass {discarded:e}, above the budget {budget:e}")]
    TruncationTooCoarse { discarded: f64, budget: f64 },
}

/// One support point `p_{k,l}` with `k` receivers and `l` transmitters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DegreeCell {
    pub receivers: u32,
    pub transmitters: u32,
    pub prob: f64,
}

impl DegreeCell {
    #[inline]
    pub fn total(&self) -> u32 {
        self.receivers + self.transmitters
    }
}

/// Moments of the joint law.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentSummary {
    /// Mean receiver degree.
    pub lambda_r: f64,
    /// Mean transmitter degree.
    pub lambda_t: f64,
    /// Mean total degree, `lambda_r + lambda_t`.
    pub lambda: f64,
    /// `E[D_t * D]`.
    pub e_dt_d: f64,
    /// `E[D^2]`.
    pub e_d2: f64,
    /// `P(D = 1)`.
    pub p_d1: f64,
}

/// Outcome of the supercriticality test `E[D_t D] > E[D_t + D]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Criticality {
    Supercritical,
    /// `near_critical` is set when the two sides differ by at most [`NEAR_CRITICAL_BAND`].
    SubOrCritical { near_critical: bool },
}

impl Criticality {
    pub fn is_supercritical(self) -> bool {
        matches!(self, Criticality::Supercritical)
    }
}

/// Finite-support joint pmf of (receiver degree, transmitter degree).
///
/// Cells are kept sorted by total degree, then by receiver degree; zero-mass
/// cells are dropped.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointDegreeDistribution {
    cells: Vec<DegreeCell>,
    support_bound: u32,
}

fn check_unit(x: f64) -> Result<(), DegreeError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(DegreeError::OutOfDomain(x))
    }
}

#[inline]
fn pow(x: f64, k: u32) -> f64 {
    libm::pow(x, f64::from(k))
}

fn poisson_pmf(mean: f64, k: u32) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let kf = f64::from(k);
    libm::exp(-mean + kf * libm::log(mean) - libm::lgamma(kf + 1.0))
}

impl JointDegreeDistribution {
    /// Builds a distribution from `(receivers, transmitters, probability)` rows.
    ///
    /// Rows must be non-negative, distinct, and sum to one within
    /// [`TABLE_SUM_TOLERANCE`]; the result is renormalized exactly.
    pub fn from_table<I>(rows: I) -> Result<Self, DegreeError>
    where
        I: IntoIterator<Item = (u32, u32, f64)>,
    {
        let mut map = BTreeMap::new();
        for (k, l, p) in rows {
            if !p.is_finite() || p < 0.0 {
                return Err(DegreeError::InvalidProbability { receivers: k, transmitters: l, prob: p });
            }
            if map.insert((k, l), p).is_some() {
                return Err(DegreeError::DuplicateCell { receivers: k, transmitters: l });
            }
        }
        let total: f64 = map.values().sum();
        if total <= 0.0 {
            return Err(DegreeError::Empty);
        }
        if (total - 1.0).abs() > TABLE_SUM_TOLERANCE {
            return Err(DegreeError::NotNormalized(total));
        }
        let dist = Self::from_weights(map)?;
        if dist.moments().lambda <= 0.0 {
            return Err(DegreeError::ZeroMeanDegree);
        }
        Ok(dist)
    }

    /// Normalizes positive weights without the positive-mean requirement.
    fn from_weights(map: BTreeMap<(u32, u32), f64>) -> Result<Self, DegreeError> {
        let total: f64 = map.values().sum();
        if total <= 0.0 {
            return Err(DegreeError::Empty);
        }
        let mut cells: Vec<DegreeCell> = map
            .into_iter()
            .filter(|&(_, p)| p > 0.0)
            .map(|((k, l), p)| DegreeCell { receivers: k, transmitters: l, prob: p / total })
            .collect();
        cells.sort_by_key(|c| (c.total(), c.receivers));
        let support_bound = cells.iter().map(DegreeCell::total).max().unwrap_or(0);
        Ok(Self { cells, support_bound })
    }

    /// Independent Poisson(`mu (1 - q)`) receiver and Poisson(`mu q`) transmitter
    /// degrees, truncated to `k + l <= cutoff` and renormalized.
    ///
    /// Equivalently: a Poisson(`mu`) total degree whose half-edges are each a
    /// transmitter with probability `q`.
    pub fn thinned_poisson(mu: f64, q: f64, cutoff: u32) -> Result<Self, DegreeError> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(DegreeError::InvalidParameter("mu must be finite and positive"));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(DegreeError::InvalidParameter("q must lie in [0, 1]"));
        }
        let kept: f64 = (0..=cutoff).map(|d| poisson_pmf(mu, d)).sum();
        let discarded = (1.0 - kept).max(0.0);
        if discarded > MAX_DISCARDED_MASS {
            return Err(DegreeError::TruncationTooCoarse { discarded, budget: MAX_DISCARDED_MASS });
        }
        let (mean_r, mean_t) = (mu * (1.0 - q), mu * q);
        let mut map = BTreeMap::new();
        for k in 0..=cutoff {
            let pk = poisson_pmf(mean_r, k);
            for l in 0..=(cutoff - k) {
                let p = pk * poisson_pmf(mean_t, l);
                if p > 0.0 {
                    map.insert((k, l), p);
                }
            }
        }
        Self::from_weights(map)
    }

    pub fn cells(&self) -> &[DegreeCell] {
        &self.cells
    }

    /// Largest `k + l` with positive mass.
    pub fn support_bound(&self) -> u32 {
        self.support_bound
    }

    /// `p_{k,l}`, zero off the support.
    pub fn prob(&self, receivers: u32, transmitters: u32) -> f64 {
        self.cells
            .iter()
            .find(|c| c.receivers == receivers && c.transmitters == transmitters)
            .map_or(0.0, |c| c.prob)
    }

    pub fn moments(&self) -> MomentSummary {
        let mut m = MomentSummary { lambda_r: 0.0, lambda_t: 0.0, lambda: 0.0, e_dt_d: 0.0, e_d2: 0.0, p_d1: 0.0 };
        for c in &self.cells {
            let (k, l, d) = (f64::from(c.receivers), f64::from(c.transmitters), f64::from(c.total()));
            m.lambda_r += k * c.prob;
            m.lambda_t += l * c.prob;
            m.e_dt_d += l * d * c.prob;
            m.e_d2 += d * d * c.prob;
            if c.total() == 1 {
                m.p_d1 += c.prob;
            }
        }
        m.lambda = m.lambda_r + m.lambda_t;
        m
    }

    /// Whether `P(D = 1) > 0`, which the analytic predictions require.
    pub fn has_degree_one_mass(&self) -> bool {
        self.moments().p_d1 > 0.0
    }

    /// Joint pgf `g(x, y) = E[x^{D_r} y^{D_t}]`.
    pub fn joint_pgf(&self, x: f64, y: f64) -> Result<f64, DegreeError> {
        check_unit(x)?;
        check_unit(y)?;
        Ok(self.joint_pgf_unchecked(x, y))
    }

    pub(crate) fn joint_pgf_unchecked(&self, x: f64, y: f64) -> f64 {
        self.cells.iter().map(|c| c.prob * pow(x, c.receivers) * pow(y, c.transmitters)).sum()
    }

    /// `h(x) = E[D_t x^D]`: the limit of the scaled count of sleeping transmitter
    /// half-edges in the forward exploration, at `x = e^{-t}`.
    pub fn forward_sleeping_profile(&self, x: f64) -> Result<f64, DegreeError> {
        check_unit(x)?;
        Ok(self.forward_sleeping_unchecked(x))
    }

    pub(crate) fn forward_sleeping_unchecked(&self, x: f64) -> f64 {
        self.cells.iter().map(|c| f64::from(c.transmitters) * c.prob * pow(x, c.total())).sum()
    }

    /// `H(x) = lambda x^2 - lambda_r x - h(x)`: the limit of the scaled count of
    /// active transmitter half-edges in the forward exploration.
    pub fn forward_active_profile(&self, x: f64) -> Result<f64, DegreeError> {
        check_unit(x)?;
        Ok(self.forward_active_unchecked(x))
    }

    pub(crate) fn forward_active_unchecked(&self, x: f64) -> f64 {
        let m = self.moments();
        m.lambda * x * x - m.lambda_r * x - self.forward_sleeping_unchecked(x)
    }

    /// `E[x^{D_t}]`, the transmitter-marginal pgf.
    pub fn transmitter_pgf(&self, x: f64) -> Result<f64, DegreeError> {
        check_unit(x)?;
        Ok(self.transmitter_pgf_unchecked(x))
    }

    pub(crate) fn transmitter_pgf_unchecked(&self, x: f64) -> f64 {
        self.cells.iter().map(|c| c.prob * pow(x, c.transmitters)).sum()
    }

    /// `E[D_t x^{D_t}] + x E[D_r x^{D_t}]`: the limit of the scaled count of
    /// half-edges owned by sleeping vertices in the reverse exploration.
    pub fn reverse_sleeping_profile(&self, x: f64) -> Result<f64, DegreeError> {
        check_unit(x)?;
        Ok(self.reverse_sleeping_unchecked(x))
    }

    pub(crate) fn reverse_sleeping_unchecked(&self, x: f64) -> f64 {
        let mut by_transmitters = 0.0;
        let mut by_receivers = 0.0;
        for c in &self.cells {
            let xl = pow(x, c.transmitters);
            by_transmitters += f64::from(c.transmitters) * c.prob * xl;
            by_receivers += f64::from(c.receivers) * c.prob * xl;
        }
        by_transmitters + x * by_receivers
    }

    /// `lambda x^2` minus [`Self::reverse_sleeping_profile`]: the limit of the
    /// scaled count of active half-edges in the reverse exploration.
    pub fn reverse_active_profile(&self, x: f64) -> Result<f64, DegreeError> {
        check_unit(x)?;
        Ok(self.reverse_active_unchecked(x))
    }

    pub(crate) fn reverse_active_unchecked(&self, x: f64) -> f64 {
        self.moments().lambda * x * x - self.reverse_sleeping_unchecked(x)
    }

    /// Degree law of a vertex reached along a uniformly chosen half-edge, with
    /// that half-edge removed: `((v+1) p_{v+1,w} + (w+1) p_{v,w+1}) / lambda`.
    ///
    /// The result may have zero mean (e.g. when all mass sits on degree one).
    pub fn size_biased(&self) -> Result<Self, DegreeError> {
        let lambda = self.moments().lambda;
        if lambda <= 0.0 {
            return Err(DegreeError::ZeroMeanDegree);
        }
        let mut map: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for c in &self.cells {
            if c.receivers > 0 {
                *map.entry((c.receivers - 1, c.transmitters)).or_default() += f64::from(c.receivers) * c.prob / lambda;
            }
            if c.transmitters > 0 {
                *map.entry((c.receivers, c.transmitters - 1)).or_default() += f64::from(c.transmitters) * c.prob / lambda;
            }
        }
        Self::from_weights(map)
    }

    /// Marginal pmf of the transmitter degree, indexed by degree.
    pub fn transmitter_marginal(&self) -> Vec<f64> {
        let top = self.cells.iter().map(|c| c.transmitters).max().unwrap_or(0) as usize;
        let mut out = alloc::vec![0.0; top + 1];
        for c in &self.cells {
            out[c.transmitters as usize] += c.prob;
        }
        out
    }

    /// `E[D_t D] - E[D_t + D]`; positive exactly in the supercritical regime.
    pub fn criticality_margin(&self) -> f64 {
        let m = self.moments();
        m.e_dt_d - (m.lambda_t + m.lambda)
    }

    /// Strict supercriticality test. Fails when `P(D = 1) = 0`.
    pub fn criticality(&self) -> Result<Criticality, DegreeError> {
        if !self.has_degree_one_mass() {
            return Err(DegreeError::NoDegreeOneMass);
        }
        let margin = self.criticality_margin();
        Ok(if margin > NEAR_CRITICAL_BAND {
            Criticality::Supercritical
        } else {
            Criticality::SubOrCritical { near_critical: margin.abs() <= NEAR_CRITICAL_BAND }
        })
    }

    /// The `count` most probable cells, ties broken by cell order.
    pub fn top_cells(&self, count: usize) -> Vec<(u32, u32)> {
        let mut idx: Vec<usize> = (0..self.cells.len()).collect();
        idx.sort_by(|&a, &b| self.cells[b].prob.total_cmp(&self.cells[a].prob).then(a.cmp(&b)));
        idx.into_iter().take(count).map(|i| (self.cells[i].receivers, self.cells[i].transmitters)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_half() -> JointDegreeDistribution {
        JointDegreeDistribution::from_table([(1, 0, 0.5), (0, 1, 0.5)]).unwrap()
    }

    #[test]
    fn moments_of_degree_one_law() {
        let m = half_half().moments();
        assert_eq!((m.lambda_r, m.lambda_t, m.lambda, m.e_dt_d, m.p_d1), (0.5, 0.5, 1.0, 0.5, 1.0));
    }

    #[test]
    fn moments_of_deterministic_transmitter_pair() {
        let d = JointDegreeDistribution::from_table([(0, 2, 1.0)]).unwrap();
        let m = d.moments();
        assert_eq!((m.lambda_r, m.lambda_t, m.lambda, m.e_dt_d), (0.0, 2.0, 2.0, 4.0));
        assert!(!d.has_degree_one_mass());
        assert_eq!(d.criticality(), Err(DegreeError::NoDegreeOneMass));
    }

    #[test]
    fn evaluations_reject_arguments_outside_unit_interval() {
        let d = half_half();
        assert_eq!(d.joint_pgf(1.5, 0.5), Err(DegreeError::OutOfDomain(1.5)));
        assert!(d.forward_active_profile(-0.1).is_err());
        assert!(d.reverse_active_profile(f64::NAN).is_err());
        assert!(d.transmitter_pgf(2.0).is_err());
    }

    #[test]
    fn hand_evaluated_values() {
        let d = half_half();
        assert_eq!(d.joint_pgf(0.5, 0.5).unwrap(), 0.5);
        assert_eq!(d.forward_sleeping_profile(1.0).unwrap(), 0.5);
        assert_eq!(d.forward_sleeping_profile(0.0).unwrap(), 0.0);
        assert_eq!(d.forward_active_profile(0.5).unwrap(), -0.25);
    }

    #[test]
    fn reverse_profile_vanishes_for_pure_transmitter_pairs() {
        let d = JointDegreeDistribution::from_table([(0, 2, 1.0)]).unwrap();
        for x in [0.0, 0.3, 0.7, 1.0] {
            assert_eq!(d.reverse_sleeping_profile(x).unwrap(), 2.0 * x * x);
            assert_eq!(d.reverse_active_profile(x).unwrap(), 0.0);
        }
    }

    #[test]
    fn size_biasing_small_tables() {
        let sb = half_half().size_biased().unwrap();
        assert_eq!(sb.cells(), &[DegreeCell { receivers: 0, transmitters: 0, prob: 1.0 }]);
        let sb = JointDegreeDistribution::from_table([(0, 2, 1.0)]).unwrap().size_biased().unwrap();
        assert_eq!(sb.cells(), &[DegreeCell { receivers: 0, transmitters: 1, prob: 1.0 }]);
    }

    #[test]
    fn table_validation() {
        assert!(matches!(
            JointDegreeDistribution::from_table([(1, 0, -0.1), (0, 1, 1.1)]),
            Err(DegreeError::InvalidProbability { .. })
        ));
        assert!(matches!(
            JointDegreeDistribution::from_table([(1, 0, 0.5), (1, 0, 0.5)]),
            Err(DegreeError::DuplicateCell { .. })
        ));
        assert!(matches!(JointDegreeDistribution::from_table([(1, 0, 0.5)]), Err(DegreeError::NotNormalized(_))));
        assert_eq!(JointDegreeDistribution::from_table([(0, 0, 1.0)]), Err(DegreeError::ZeroMeanDegree));
        assert_eq!(JointDegreeDistribution::from_table(core::iter::empty()), Err(DegreeError::Empty));
        let d = JointDegreeDistribution::from_table([(1, 0, 1.0)]).unwrap();
        assert_eq!(d.moments().lambda, 1.0);
        assert_eq!(d.support_bound(), 1);
    }

    #[test]
    fn coarse_truncation_is_rejected() {
        match JointDegreeDistribution::thinned_poisson(4.0, 0.5, 3) {
            Err(DegreeError::TruncationTooCoarse { discarded, .. }) => {
                // P(Poisson(4) > 3), summed directly.
                assert!((discarded - 0.566_529_879_633_291_2).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(JointDegreeDistribution::thinned_poisson(0.0, 0.5, 30).is_err());
        assert!(JointDegreeDistribution::thinned_poisson(4.0, 1.5, 30).is_err());
    }

    #[test]
    fn criticality_of_degree_one_law() {
        assert_eq!(half_half().criticality(), Ok(Criticality::SubOrCritical { near_critical: false }));
    }

    #[test]
    fn near_critical_flag() {
        // p_{1,0} = a, p_{0,3} = 1 - a: E[D_t D] = 9(1-a), E[D_t + D] = 6(1-a) + a,
        // so the margin is 3 - 4a and vanishes at a = 3/4.
        let d = JointDegreeDistribution::from_table([(1, 0, 0.75), (0, 3, 0.25)]).unwrap();
        assert!(d.criticality_margin().abs() < 1e-15);
        assert_eq!(d.criticality(), Ok(Criticality::SubOrCritical { near_critical: true }));
    }

    #[test]
    fn top_cells_orders_by_mass() {
        let d = JointDegreeDistribution::from_table([(1, 0, 0.2), (0, 1, 0.5), (1, 1, 0.3)]).unwrap();
        assert_eq!(d.top_cells(2), alloc::vec![(0, 1), (1, 1)]);
    }
}
