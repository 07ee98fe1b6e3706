//! Degree sequences, the uniform half-edge matching, and the influence digraph.
//!
//! Half-edges of vertex `i` occupy a contiguous index range: its receivers
//! first, then its transmitters.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::degree::JointDegreeDistribution;
use crate::digraph::Digraph;
use crate::rng::{stream, stream_rng};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("a degree sequence needs at least one vertex")]
    NoVertices,
    #[error("total degree {0} is odd")]
    OddTotal(u64),
    #[error("too many half-edges for 32-bit indices")]
    TooLarge,
    #[error("matching is not a fixed-point-free involution at half-edge {0}")]
    InvalidMatching(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum HalfEdgeKind {
    Receiver,
    Transmitter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfEdge {
    pub owner: u32,
    pub kind: HalfEdgeKind,
}

/// Per-vertex `(receiver, transmitter)` degrees with an even total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<(u32, u32)>,
    offsets: Vec<u32>,
    parity_vertex: Option<u32>,
}

impl DegreeSequence {
    fn build(degrees: Vec<(u32, u32)>, parity_vertex: Option<u32>) -> Result<Self, GraphError> {
        if degrees.is_empty() {
            return Err(GraphError::NoVertices);
        }
        if degrees.len() > u32::MAX as usize {
            return Err(GraphError::TooLarge);
        }
        let mut offsets = Vec::with_capacity(degrees.len() + 1);
        let mut total: u64 = 0;
        offsets.push(0);
        for &(r, t) in &degrees {
            total += u64::from(r) + u64::from(t);
            if total >= u64::from(u32::MAX) {
                return Err(GraphError::TooLarge);
            }
            offsets.push(total as u32);
        }
        if total % 2 == 1 {
            return Err(GraphError::OddTotal(total));
        }
        Ok(Self { degrees, offsets, parity_vertex })
    }

    /// Takes an explicit sequence; the total degree must be even.
    pub fn from_pairs(degrees: Vec<(u32, u32)>) -> Result<Self, GraphError> {
        Self::build(degrees, None)
    }

    /// Draws `n` i.i.d. degree pairs from `dist`. If the total is odd, one extra
    /// receiver half-edge goes to a uniformly chosen vertex.
    pub fn sample(dist: &JointDegreeDistribution, n: usize, seed: u64) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut rng = stream_rng(seed, stream::DEGREES);
        let cells = dist.cells();
        let picker = WeightedIndex::new(cells.iter().map(|c| c.prob)).expect("validated pmf has positive mass");
        let mut degrees: Vec<(u32, u32)> = (0..n)
            .map(|_| {
                let c = &cells[picker.sample(&mut rng)];
                (c.receivers, c.transmitters)
            })
            .collect();
        let total: u64 = degrees.iter().map(|&(r, t)| u64::from(r) + u64::from(t)).sum();
        let mut parity_vertex = None;
        if total % 2 == 1 {
            let v = rng.random_range(0..n);
            degrees[v].0 += 1;
            parity_vertex = Some(v as u32);
        }
        Self::build(degrees, parity_vertex)
    }

    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[(u32, u32)] {
        &self.degrees
    }

    /// Vertex that received the parity half-edge, if any.
    pub fn parity_vertex(&self) -> Option<u32> {
        self.parity_vertex
    }

    /// `2m`.
    pub fn half_edge_count(&self) -> usize {
        *self.offsets.last().unwrap() as usize
    }

    /// `m`.
    pub fn edge_count(&self) -> usize {
        self.half_edge_count() / 2
    }

    pub fn transmitter_count(&self) -> usize {
        self.degrees.iter().map(|&(_, t)| t as usize).sum()
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().map(|&(r, t)| r + t).max().unwrap_or(0)
    }

    /// Half-edge index range of vertex `v`.
    pub fn half_edge_range(&self, v: u32) -> core::ops::Range<u32> {
        self.offsets[v as usize]..self.offsets[v as usize + 1]
    }

    /// Number of vertices per `(receiver, transmitter)` degree pair.
    pub fn empirical_counts(&self) -> BTreeMap<(u32, u32), usize> {
        let mut counts = BTreeMap::new();
        for &d in &self.degrees {
            *counts.entry(d).or_insert(0) += 1;
        }
        counts
    }

    pub fn half_edges(&self) -> Vec<HalfEdge> {
        let mut out = Vec::with_capacity(self.half_edge_count());
        for (v, &(r, t)) in self.degrees.iter().enumerate() {
            let owner = v as u32;
            out.extend((0..r).map(|_| HalfEdge { owner, kind: HalfEdgeKind::Receiver }));
            out.extend((0..t).map(|_| HalfEdge { owner, kind: HalfEdgeKind::Transmitter }));
        }
        out
    }
}

/// Matched half-edges of a configuration-model multigraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnhancedMultigraph {
    vertex_count: usize,
    half_edges: Vec<HalfEdge>,
    partner: Vec<u32>,
}

/// Simple-graph defects of a realized multigraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultigraphStats {
    pub self_loops: usize,
    /// Edges in excess of one between each unordered pair of distinct vertices.
    pub multi_edges: usize,
    pub d_max: u32,
}

impl EnhancedMultigraph {
    /// Uniform perfect matching: shuffle the half-edges, pair consecutive entries.
    pub fn uniform_matching(seq: &DegreeSequence, seed: u64) -> Self {
        let mut rng = stream_rng(seed, stream::MATCHING);
        let count = seq.half_edge_count();
        let mut order: Vec<u32> = (0..count as u32).collect();
        order.shuffle(&mut rng);
        let mut partner = vec![0u32; count];
        for pair in order.chunks_exact(2) {
            partner[pair[0] as usize] = pair[1];
            partner[pair[1] as usize] = pair[0];
        }
        Self { vertex_count: seq.vertex_count(), half_edges: seq.half_edges(), partner }
    }

    /// Uses `partner` as the matching after checking that it is a
    /// fixed-point-free involution.
    pub fn from_partner(seq: &DegreeSequence, partner: Vec<u32>) -> Result<Self, GraphError> {
        if partner.len() != seq.half_edge_count() {
            return Err(GraphError::InvalidMatching(partner.len().min(seq.half_edge_count())));
        }
        for (h, &p) in partner.iter().enumerate() {
            if p as usize >= partner.len() || p as usize == h || partner[p as usize] as usize != h {
                return Err(GraphError::InvalidMatching(h));
            }
        }
        Ok(Self { vertex_count: seq.vertex_count(), half_edges: seq.half_edges(), partner })
    }

    /// Builds the matching from a list of disjoint half-edge pairs covering everything.
    pub fn from_pairs(seq: &DegreeSequence, pairs: &[(u32, u32)]) -> Result<Self, GraphError> {
        let count = seq.half_edge_count();
        let mut partner = vec![u32::MAX; count];
        for &(a, b) in pairs {
            for (x, y) in [(a, b), (b, a)] {
                let slot = partner.get_mut(x as usize).ok_or(GraphError::InvalidMatching(x as usize))?;
                if *slot != u32::MAX {
                    return Err(GraphError::InvalidMatching(x as usize));
                }
                *slot = y;
            }
        }
        Self::from_partner(seq, partner)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    pub fn partner(&self) -> &[u32] {
        &self.partner
    }

    /// One arc owner(h) -> owner(partner(h)) per transmitter half-edge `h`.
    pub fn influence_arcs(&self) -> Vec<(u32, u32)> {
        self.half_edges
            .iter()
            .zip(&self.partner)
            .filter(|(h, _)| h.kind == HalfEdgeKind::Transmitter)
            .map(|(h, &p)| (h.owner, self.half_edges[p as usize].owner))
            .collect()
    }

    pub fn influence_digraph(&self) -> Digraph {
        Digraph::from_arcs(self.vertex_count, &self.influence_arcs())
    }

    /// Each edge once as `(u, v, u_transmits, v_transmits)`.
    pub fn edge_list(&self) -> impl Iterator<Item = (u32, u32, bool, bool)> + '_ {
        self.partner.iter().enumerate().filter(|&(h, &p)| (h as u32) < p).map(move |(h, &p)| {
            let (a, b) = (self.half_edges[h], self.half_edges[p as usize]);
            (a.owner, b.owner, a.kind == HalfEdgeKind::Transmitter, b.kind == HalfEdgeKind::Transmitter)
        })
    }

    pub fn stats(&self) -> MultigraphStats {
        let mut self_loops = 0;
        let mut pairs = Vec::new();
        let mut degree = vec![0u32; self.vertex_count];
        for (u, v, _, _) in self.edge_list() {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
            if u == v {
                self_loops += 1;
            } else {
                pairs.push((u.min(v), u.max(v)));
            }
        }
        pairs.sort_unstable();
        let multi_edges = pairs.windows(2).filter(|w| w[0] == w[1]).count();
        MultigraphStats { self_loops, multi_edges, d_max: degree.into_iter().max().unwrap_or(0) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_law_gives_exact_sequence() {
        let d = JointDegreeDistribution::from_table([(1, 0, 1.0)]).unwrap();
        let s = DegreeSequence::sample(&d, 4, 9).unwrap();
        assert_eq!(s.degrees(), &[(1, 0); 4]);
        assert_eq!(s.half_edge_count(), 4);
        assert_eq!(s.parity_vertex(), None);
    }

    #[test]
    fn parity_fix_adds_one_receiver() {
        let d = JointDegreeDistribution::from_table([(1, 0, 1.0)]).unwrap();
        let s = DegreeSequence::sample(&d, 3, 9).unwrap();
        assert_eq!(s.half_edge_count(), 4);
        let v = s.parity_vertex().unwrap() as usize;
        assert_eq!(s.degrees()[v], (2, 0));
        assert_eq!(s.transmitter_count(), 0);
    }

    #[test]
    fn explicit_sequences_are_validated() {
        assert_eq!(DegreeSequence::from_pairs(vec![]), Err(GraphError::NoVertices));
        assert_eq!(DegreeSequence::from_pairs(vec![(1, 0)]), Err(GraphError::OddTotal(1)));
        let s = DegreeSequence::from_pairs(vec![(0, 2), (3, 1)]).unwrap();
        assert_eq!(s.half_edge_range(1), 2..6);
        assert_eq!(s.max_degree(), 4);
        let kinds: Vec<_> = s.half_edges().iter().map(|h| h.kind).collect();
        use HalfEdgeKind::*;
        assert_eq!(kinds, vec![Transmitter, Transmitter, Receiver, Receiver, Receiver, Transmitter]);
    }

    #[test]
    fn single_matching_of_two_half_edges() {
        let s = DegreeSequence::from_pairs(vec![(0, 1), (1, 0)]).unwrap();
        let g = EnhancedMultigraph::uniform_matching(&s, 3);
        assert_eq!(g.partner(), &[1, 0]);
        assert_eq!(g.influence_arcs(), vec![(0, 1)]);
        assert_eq!(g.stats(), MultigraphStats { self_loops: 0, multi_edges: 0, d_max: 1 });
    }

    #[test]
    fn self_loop_of_two_transmitters() {
        let s = DegreeSequence::from_pairs(vec![(0, 2)]).unwrap();
        let g = EnhancedMultigraph::uniform_matching(&s, 3);
        assert_eq!(g.influence_arcs(), vec![(0, 0), (0, 0)]);
        assert_eq!(g.stats().self_loops, 1);
    }

    #[test]
    fn arc_rules_per_edge_kind() {
        // tr, tt, rr edges.
        let s = DegreeSequence::from_pairs(vec![(0, 1), (1, 0), (0, 1), (0, 1), (1, 0), (1, 0)]).unwrap();
        let g = EnhancedMultigraph::from_pairs(&s, &[(0, 1), (2, 3), (4, 5)]).unwrap();
        assert_eq!(g.influence_arcs(), vec![(0, 1), (2, 3), (3, 2)]);
    }

    #[test]
    fn matching_validation() {
        let s = DegreeSequence::from_pairs(vec![(0, 2), (2, 0)]).unwrap();
        assert!(EnhancedMultigraph::from_partner(&s, vec![1, 0, 3, 2]).is_ok());
        assert_eq!(EnhancedMultigraph::from_partner(&s, vec![0, 1, 3, 2]), Err(GraphError::InvalidMatching(0)));
        assert_eq!(EnhancedMultigraph::from_partner(&s, vec![1, 2, 3, 0]), Err(GraphError::InvalidMatching(0)));
        assert!(EnhancedMultigraph::from_pairs(&s, &[(0, 1), (1, 2)]).is_err());
        assert!(EnhancedMultigraph::from_pairs(&s, &[(0, 1)]).is_err());
    }

    #[test]
    fn multi_edges_counted_once_per_extra_edge() {
        let s = DegreeSequence::from_pairs(vec![(0, 3), (3, 0)]).unwrap();
        let g = EnhancedMultigraph::from_pairs(&s, &[(0, 3), (1, 4), (2, 5)]).unwrap();
        assert_eq!(g.stats(), MultigraphStats { self_loops: 0, multi_edges: 2, d_max: 3 });
    }
}
