//! Ground truth for small instances: every perfect matching enumerated, plus a
//! direct simulation of the two-stage branching process.

use alloc::vec;
use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::degree::{DegreeError, JointDegreeDistribution};
use crate::graph::{DegreeSequence, HalfEdgeKind};
use crate::rng::{stream, stream_rng};

/// Largest `2m` accepted by [`enumerate`]; 15!! = 2 027 025 matchings.
pub const MAX_ENUMERATED_HALF_EDGES: usize = 16;
/// Vertices are tracked in a 64-bit mask.
pub const MAX_ENUMERATED_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("{0} half-edges is too many to enumerate (limit {MAX_ENUMERATED_HALF_EDGES})")]
    TooLarge(usize),
    #[error("{0} vertices is too many to enumerate (limit {MAX_ENUMERATED_VERTICES})")]
    TooManyVertices(usize),
    #[error("at least one replicate is required")]
    NoReplicates,
    #[error(transparent)]
    Degree(#[from] DegreeError),
}

/// Calls `f` with the partner array of every perfect matching of `half_edges`
/// points, pairing the smallest unmatched point with each candidate in turn.
pub fn for_each_matching(half_edges: usize, mut f: impl FnMut(&[u32])) {
    const FREE: u32 = u32::MAX;
    fn go(partner: &mut [u32], f: &mut impl FnMut(&[u32])) {
        let Some(first) = partner.iter().position(|&p| p == FREE) else {
            f(partner);
            return;
        };
        for other in first + 1..partner.len() {
            if partner[other] == FREE {
                partner[first] = other as u32;
                partner[other] = first as u32;
                go(partner, f);
                partner[other] = FREE;
            }
        }
        partner[first] = FREE;
    }
    if half_edges % 2 == 1 {
        return;
    }
    let mut partner = vec![FREE; half_edges];
    go(&mut partner, &mut f);
}

/// `(2m - 1)!!`.
pub fn matching_count(half_edges: usize) -> u64 {
    (1..half_edges as u64).step_by(2).product()
}

/// Exact reachability statistics over all perfect matchings, each with weight one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSummary {
    pub n: usize,
    pub matchings: u64,
    /// `[x * n + y]`: matchings in which `y ∈ C(x)`, from forward searches.
    pub forward_counts: Vec<u64>,
    /// `[y * n + x]`: matchings in which `x ∈ C̄(y)`, from backward searches.
    pub backward_counts: Vec<u64>,
}

impl ExactSummary {
    /// `P(y ∈ C(x))`.
    pub fn reach_probability(&self, x: usize, y: usize) -> f64 {
        self.forward_counts[x * self.n + y] as f64 / self.matchings as f64
    }

    /// `P(x ∈ C̄(y))`.
    pub fn source_probability(&self, y: usize, x: usize) -> f64 {
        self.backward_counts[y * self.n + x] as f64 / self.matchings as f64
    }

    /// `E|C(x)|`.
    pub fn expected_forward_size(&self, x: usize) -> f64 {
        self.forward_counts[x * self.n..(x + 1) * self.n].iter().sum::<u64>() as f64 / self.matchings as f64
    }

    /// `E|C̄(y)|`.
    pub fn expected_backward_size(&self, y: usize) -> f64 {
        self.backward_counts[y * self.n..(y + 1) * self.n].iter().sum::<u64>() as f64 / self.matchings as f64
    }

    /// Whether forward and backward counts agree for every pair.
    pub fn duality_holds(&self) -> bool {
        (0..self.n).all(|x| (0..self.n).all(|y| self.forward_counts[x * self.n + y] == self.backward_counts[y * self.n + x]))
    }
}

fn closure(adj: &[u64], start: usize) -> u64 {
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[v] & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen
}

/// Enumerates every perfect matching of `seq` and accumulates `P(y ∈ C(x))` and
/// `P(x ∈ C̄(y))` independently.
pub fn enumerate(seq: &DegreeSequence) -> Result<ExactSummary, OracleError> {
    let total = seq.half_edge_count();
    if total > MAX_ENUMERATED_HALF_EDGES {
        return Err(OracleError::TooLarge(total));
    }
    let n = seq.vertex_count();
    if n > MAX_ENUMERATED_VERTICES {
        return Err(OracleError::TooManyVertices(n));
    }
    let half_edges = seq.half_edges();
    let mut forward_counts = vec![0u64; n * n];
    let mut backward_counts = vec![0u64; n * n];
    let mut matchings = 0u64;
    let mut out_adj = vec![0u64; n];
    let mut in_adj = vec![0u64; n];
    for_each_matching(total, |partner| {
        matchings += 1;
        out_adj.fill(0);
        in_adj.fill(0);
        for (h, e) in half_edges.iter().enumerate() {
            if e.kind == HalfEdgeKind::Transmitter {
                let to = half_edges[partner[h] as usize].owner as usize;
                out_adj[e.owner as usize] |= 1 << to;
                in_adj[to] |= 1 << e.owner;
            }
        }
        for v in 0..n {
            for (adj, counts) in [(&out_adj, &mut forward_counts), (&in_adj, &mut backward_counts)] {
                let mut set = closure(adj, v);
                while set != 0 {
                    let w = set.trailing_zeros() as usize;
                    set &= set - 1;
                    counts[v * n + w] += 1;
                }
            }
        }
    });
    Ok(ExactSummary { n, matchings, forward_counts, backward_counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GwOptions {
    pub max_generations: usize,
    pub reps: usize,
    /// A generation this large counts as survival; extinction from here is negligible
    /// whenever the process is supercritical.
    pub population_cap: u64,
}

impl Default for GwOptions {
    fn default() -> Self {
        Self { max_generations: 50, reps: 100_000, population_cap: 1000 }
    }
}

/// Fraction of simulated trees alive after `max_generations`. The root has
/// `D_t` children under `dist`; every later vertex has `D_t` children under the
/// size-biased law.
pub fn gw_survival(dist: &JointDegreeDistribution, options: GwOptions, seed: u64) -> Result<f64, OracleError> {
    if options.reps == 0 {
        return Err(OracleError::NoReplicates);
    }
    let sampler = |marginal: Vec<f64>| WeightedIndex::new(marginal).expect("marginal of a valid pmf has mass");
    let root = sampler(dist.transmitter_marginal());
    let later = sampler(dist.size_biased()?.transmitter_marginal());
    let mut rng = stream_rng(seed, stream::GALTON_WATSON);
    let mut alive = 0usize;
    for _ in 0..options.reps {
        let mut population = root.sample(&mut rng) as u64;
        for _ in 1..options.max_generations {
            if population == 0 || population >= options.population_cap {
                break;
            }
            population = (0..population).map(|_| later.sample(&mut rng) as u64).sum();
        }
        if population > 0 {
            alive += 1;
        }
    }
    Ok(alive as f64 / options.reps as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(d: &[(u32, u32)]) -> DegreeSequence {
        DegreeSequence::from_pairs(d.to_vec()).unwrap()
    }

    #[test]
    fn matching_counts_are_double_factorials() {
        for (k, expected) in [(0usize, 1u64), (2, 1), (4, 3), (6, 15), (8, 105), (10, 945)] {
            let mut c = 0;
            for_each_matching(k, |_| c += 1);
            assert_eq!(c, expected);
            assert_eq!(matching_count(k), expected);
        }
    }

    #[test]
    fn single_arc() {
        let s = enumerate(&seq(&[(0, 1), (1, 0)])).unwrap();
        assert_eq!(s.matchings, 1);
        assert_eq!(s.reach_probability(0, 1), 1.0);
        assert_eq!(s.reach_probability(1, 0), 0.0);
    }

    #[test]
    fn mutual_influence() {
        let s = enumerate(&seq(&[(0, 1), (0, 1)])).unwrap();
        assert_eq!(s.expected_forward_size(0), 2.0);
        assert!(s.duality_holds());
    }

    #[test]
    fn star_with_two_leaves() {
        let s = enumerate(&seq(&[(0, 2), (1, 0), (1, 0)])).unwrap();
        assert_eq!(s.matchings, 3);
        assert!((s.expected_forward_size(0) - 7.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.reach_probability(0, 0), 1.0);
    }

    #[test]
    fn size_limits() {
        let big: Vec<(u32, u32)> = vec![(1, 1); 9];
        assert_eq!(enumerate(&seq(&big)), Err(OracleError::TooLarge(18)));
        let many: Vec<(u32, u32)> = vec![(0, 0); 65];
        assert_eq!(enumerate(&seq(&many)), Err(OracleError::TooManyVertices(65)));
    }

    #[test]
    fn no_transmitters_never_survive() {
        let d = JointDegreeDistribution::from_table([(1, 0, 1.0)]).unwrap();
        assert_eq!(gw_survival(&d, GwOptions { reps: 1000, ..Default::default() }, 1), Ok(0.0));
        assert_eq!(gw_survival(&d, GwOptions { reps: 0, ..Default::default() }, 1), Err(OracleError::NoReplicates));
    }
}
