//! Compressed adjacency for the influence digraph, in both directions.

use alloc::vec;
use alloc::vec::Vec;

/// Directed multigraph on vertices `0..n` with out- and in-adjacency in CSR form.
///
/// Parallel arcs and self-loops are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out_offsets: Vec<u32>,
    out_targets: Vec<u32>,
    in_offsets: Vec<u32>,
    in_sources: Vec<u32>,
}

fn csr(n: usize, arcs: &[(u32, u32)], key: impl Fn(&(u32, u32)) -> (u32, u32)) -> (Vec<u32>, Vec<u32>) {
    let mut offsets = vec![0u32; n + 1];
    for arc in arcs {
        offsets[key(arc).0 as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut targets = vec![0u32; arcs.len()];
    for arc in arcs {
        let (from, to) = key(arc);
        let slot = &mut cursor[from as usize];
        targets[*slot as usize] = to;
        *slot += 1;
    }
    (offsets, targets)
}

impl Digraph {
    /// Builds the digraph from `(tail, head)` pairs. Panics if an endpoint is `>= n`.
    pub fn from_arcs(n: usize, arcs: &[(u32, u32)]) -> Self {
        assert!(
            arcs.iter().all(|&(u, v)| (u as usize) < n && (v as usize) < n),
            "arc endpoint out of range"
        );
        let (out_offsets, out_targets) = csr(n, arcs, |&(u, v)| (u, v));
        let (in_offsets, in_sources) = csr(n, arcs, |&(u, v)| (v, u));
        Self { n, out_offsets, out_targets, in_offsets, in_sources }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn successors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.out_targets[self.out_offsets[v] as usize..self.out_offsets[v + 1] as usize]
    }

    pub fn predecessors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.in_sources[self.in_offsets[v] as usize..self.in_offsets[v + 1] as usize]
    }

    pub fn out_degree(&self, v: u32) -> usize {
        self.successors(v).len()
    }

    /// Neighbours along `forward` arcs, or against them.
    #[inline]
    pub(crate) fn neighbours(&self, v: u32, forward: bool) -> &[u32] {
        if forward {
            self.successors(v)
        } else {
            self.predecessors(v)
        }
    }

    /// All arcs as `(tail, head)`, grouped by tail.
    pub fn arcs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n as u32).flat_map(move |u| self.successors(u).iter().map(move |&v| (u, v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_both_ways() {
        let g = Digraph::from_arcs(3, &[(0, 1), (1, 2), (0, 1), (2, 2)]);
        assert_eq!(g.successors(0), &[1, 1]);
        assert_eq!(g.predecessors(1), &[0, 0]);
        assert_eq!(g.predecessors(2), &[1, 2]);
        assert_eq!(g.arc_count(), 4);
        assert_eq!(g.arcs().collect::<Vec<_>>(), vec![(0, 1), (0, 1), (1, 2), (2, 2)]);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn rejects_bad_endpoint() {
        Digraph::from_arcs(2, &[(0, 2)]);
    }
}
