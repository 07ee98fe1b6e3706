//! Forward influenced sets, backward source sets, the bow-tie around the largest
//! strongly connected component, and the small/large classification of sources.
//!
//! Conventions: a vertex always belongs to its own forward and backward set. The
//! big influenced component `C*` is the core together with everything it reaches
//! (OUT); the big source component `C̄*` is the core together with everything that
//! reaches it (IN).

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::digraph::Digraph;
use crate::rng::{stream, stream_rng};

/// Reusable depth-first search state with epoch-stamped marks.
#[derive(Debug)]
pub(crate) struct Reach<'g> {
    graph: &'g Digraph,
    mark: Vec<u32>,
    epoch: u32,
    stack: Vec<u32>,
    visited: Vec<u32>,
}

impl<'g> Reach<'g> {
    pub(crate) fn new(graph: &'g Digraph) -> Self {
        Self { graph, mark: vec![0; graph.vertex_count()], epoch: 0, stack: Vec::new(), visited: Vec::new() }
    }

    fn next_epoch(&mut self) {
        if self.epoch == u32::MAX {
            self.mark.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.visited.clear();
        self.stack.clear();
    }

    /// Visits vertices reachable from `source` (along or against arcs), never
    /// entering vertices for which `blocked` holds (the source itself is always
    /// visited). Stops once `cap` vertices have been visited. Returns the number
    /// of visited vertices.
    pub(crate) fn run(&mut self, source: u32, forward: bool, cap: usize, blocked: impl Fn(u32) -> bool) -> usize {
        self.next_epoch();
        let epoch = self.epoch;
        self.mark[source as usize] = epoch;
        self.visited.push(source);
        self.stack.push(source);
        while let Some(v) = self.stack.pop() {
            if self.visited.len() >= cap {
                break;
            }
            for &w in self.graph.neighbours(v, forward) {
                if self.mark[w as usize] != epoch && !blocked(w) {
                    self.mark[w as usize] = epoch;
                    self.visited.push(w);
                    if self.visited.len() >= cap {
                        break;
                    }
                    self.stack.push(w);
                }
            }
        }
        self.visited.len().min(cap)
    }

    pub(crate) fn full(&mut self, source: u32, forward: bool) -> usize {
        self.run(source, forward, usize::MAX, |_| false)
    }

    pub(crate) fn visited(&self) -> &[u32] {
        &self.visited
    }

    pub(crate) fn contains(&self, v: u32) -> bool {
        self.mark[v as usize] == self.epoch
    }
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

/// Every vertex `x` can influence, including `x`, in increasing order.
pub fn forward_set(graph: &Digraph, x: u32) -> Vec<u32> {
    let mut reach = Reach::new(graph);
    reach.full(x, true);
    sorted(reach.visited().to_vec())
}

/// Every vertex that can influence `y`, including `y`, in increasing order.
pub fn backward_set(graph: &Digraph, y: u32) -> Vec<u32> {
    let mut reach = Reach::new(graph);
    reach.full(y, false);
    sorted(reach.visited().to_vec())
}

/// Position of a vertex relative to the largest strongly connected component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Core,
    /// Reaches the core.
    In,
    /// Reached from the core.
    Out,
    Other,
}

/// Bow-tie decomposition around the largest strongly connected component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BowTie {
    pub core: Vec<u32>,
    pub in_set: Vec<u32>,
    pub out_set: Vec<u32>,
    region: Vec<Region>,
}

impl BowTie {
    pub fn region(&self, v: u32) -> Region {
        self.region[v as usize]
    }

    /// Member of `C*` (core or OUT).
    pub fn in_big_influenced(&self, v: u32) -> bool {
        matches!(self.region[v as usize], Region::Core | Region::Out)
    }

    /// Member of `C̄*` (core or IN).
    pub fn in_big_source(&self, v: u32) -> bool {
        matches!(self.region[v as usize], Region::Core | Region::In)
    }

    pub fn big_influenced_size(&self) -> usize {
        self.core.len() + self.out_set.len()
    }

    pub fn big_source_size(&self) -> usize {
        self.core.len() + self.in_set.len()
    }
}

/// Component id of every vertex (iterative Tarjan). Ids are assigned in
/// completion order.
pub fn strongly_connected_components(graph: &Digraph) -> (usize, Vec<u32>) {
    const UNSEEN: u32 = u32::MAX;
    let n = graph.vertex_count();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut comp = vec![UNSEEN; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut calls: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut count = 0usize;

    for root in 0..n as u32 {
        if index[root as usize] != UNSEEN {
            continue;
        }
        calls.push((root, 0));
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
            let succ = graph.successors(v);
            if *pos < succ.len() {
                let w = succ[*pos];
                *pos += 1;
                if index[w as usize] == UNSEEN {
                    index[w as usize] = next_index;
                    low[w as usize] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    calls.push((w, 0));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    comp[w as usize] = count as u32;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    (count, comp)
}

type Membership = fn(&BowTie, u32) -> bool;

/// Core = largest strongly connected component (ties go to the component with
/// the smallest vertex id); IN and OUT exclude the core.
pub fn bow_tie(graph: &Digraph) -> BowTie {
    let n = graph.vertex_count();
    let (count, comp) = strongly_connected_components(graph);
    let mut size = vec![0usize; count];
    let mut smallest = vec![u32::MAX; count];
    for (v, &c) in comp.iter().enumerate() {
        let c = c as usize;
        size[c] += 1;
        smallest[c] = smallest[c].min(v as u32);
    }
    let best = (0..count).max_by(|&a, &b| size[a].cmp(&size[b]).then(smallest[b].cmp(&smallest[a])));
    let mut region = vec![Region::Other; n];
    let Some(best) = best else {
        return BowTie { core: Vec::new(), in_set: Vec::new(), out_set: Vec::new(), region };
    };
    let core: Vec<u32> = (0..n as u32).filter(|&v| comp[v as usize] as usize == best).collect();
    for &v in &core {
        region[v as usize] = Region::Core;
    }
    let mut frontier: Vec<u32>;
    for (forward, mark) in [(true, Region::Out), (false, Region::In)] {
        frontier = core.clone();
        while let Some(v) = frontier.pop() {
            for &w in graph.neighbours(v, forward) {
                if region[w as usize] == Region::Other {
                    region[w as usize] = mark;
                    frontier.push(w);
                }
            }
        }
    }
    let pick = |r: Region| (0..n as u32).filter(|&v| region[v as usize] == r).collect::<Vec<_>>();
    BowTie { in_set: pick(Region::In), out_set: pick(Region::Out), core, region }
}

/// Structural small/large classification with sampled exact verification.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComponentReport {
    pub n: usize,
    pub epsilon: f64,
    pub core_size: usize,
    pub in_size: usize,
    pub out_size: usize,
    /// `|core ∪ OUT|`.
    pub c_star_size: usize,
    /// `|core ∪ IN|`.
    pub c_bar_star_size: usize,
    /// Whether `|C*| >= epsilon n`.
    pub has_big_component: bool,
    /// Whether `|C̄*| >= epsilon n`.
    pub has_big_source_component: bool,
    pub count_small: usize,
    pub count_large: usize,
    pub unclassified: usize,
    pub count_small_bar: usize,
    pub count_large_bar: usize,
    pub unclassified_bar: usize,
    pub sample_size: usize,
    /// Sampled sources whose exact forward set contradicts their class.
    pub sample_violations: usize,
    /// Sampled targets whose exact backward set contradicts their class.
    pub sample_violations_bar: usize,
    /// Largest `|C(x)| / n` among the sampled sources.
    pub max_sampled_forward_fraction: f64,
    /// Largest `|C̄(y)| / n` among the sampled targets.
    pub max_sampled_backward_fraction: f64,
}

/// Smallest vertex count `k` with `k / n >= epsilon`.
fn size_threshold(n: usize, epsilon: f64) -> usize {
    let t = libm::ceil(epsilon * n as f64);
    if t <= 0.0 {
        0
    } else {
        t as usize
    }
}

/// Classifies every vertex as a small source (`|C(x)| < epsilon n`) or a large
/// one (`|C(x) △ C*| < epsilon n`) using the bow-tie: large sources are taken to
/// be exactly core ∪ IN. Then `sample_size` uniformly drawn vertices have their
/// forward set computed exactly and checked against their class; the same is
/// done for backward sets with the roles of IN and OUT swapped.
pub fn classify(graph: &Digraph, epsilon: f64, sample_size: usize, seed: u64) -> ComponentReport {
    let bt = bow_tie(graph);
    classify_with(graph, &bt, epsilon, sample_size, seed)
}

pub fn classify_with(graph: &Digraph, bt: &BowTie, epsilon: f64, sample_size: usize, seed: u64) -> ComponentReport {
    let n = graph.vertex_count();
    let threshold = size_threshold(n, epsilon);
    let c_star_size = bt.big_influenced_size();
    let c_bar_star_size = bt.big_source_size();
    let has_big_component = c_star_size >= threshold;
    let has_big_source_component = c_bar_star_size >= threshold;
    let count_large = if has_big_component { c_bar_star_size } else { 0 };
    let count_large_bar = if has_big_source_component { c_star_size } else { 0 };

    let mut rng = stream_rng(seed, stream::CLASSIFY);
    let mut reach = Reach::new(graph);
    let mut verify = |forward: bool| -> (usize, f64) {
        let (is_large_class, in_big, big_size, has_big): (Membership, Membership, usize, bool) =
            if forward {
                (BowTie::in_big_source, BowTie::in_big_influenced, c_star_size, has_big_component)
            } else {
                (BowTie::in_big_influenced, BowTie::in_big_source, c_bar_star_size, has_big_source_component)
            };
        let mut violations = 0;
        let mut max_size = 0;
        for _ in 0..sample_size {
            let x = rng.random_range(0..n as u32);
            let size = reach.full(x, forward);
            max_size = max_size.max(size);
            let ok = if has_big && is_large_class(bt, x) {
                let inter = reach.visited().iter().filter(|&&v| in_big(bt, v)).count();
                size + big_size - 2 * inter < threshold
            } else {
                size < threshold
            };
            if !ok {
                violations += 1;
            }
        }
        (violations, max_size as f64 / n as f64)
    };
    let (sample_violations, max_sampled_forward_fraction) = verify(true);
    let (sample_violations_bar, max_sampled_backward_fraction) = verify(false);

    ComponentReport {
        n,
        epsilon,
        core_size: bt.core.len(),
        in_size: bt.in_set.len(),
        out_size: bt.out_set.len(),
        c_star_size,
        c_bar_star_size,
        has_big_component,
        has_big_source_component,
        count_small: n - count_large,
        count_large,
        unclassified: 0,
        count_small_bar: n - count_large_bar,
        count_large_bar,
        unclassified_bar: 0,
        sample_size,
        sample_violations,
        sample_violations_bar,
        max_sampled_forward_fraction,
        max_sampled_backward_fraction,
    }
}

/// Exact membership in the small and large classes for every vertex, computed
/// with searches capped at `ceil(epsilon n)` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactClasses {
    pub small: Vec<bool>,
    pub large: Vec<bool>,
}

impl ExactClasses {
    pub fn small_count(&self) -> usize {
        self.small.iter().filter(|&&b| b).count()
    }

    pub fn large_count(&self) -> usize {
        self.large.iter().filter(|&&b| b).count()
    }
}

/// `forward = true` classifies sources by `|C(x)|` and `|C(x) △ C*|`;
/// `forward = false` classifies targets by `|C̄(y)|` and `|C̄(y) △ C̄*|`.
///
/// A vertex that reaches the core (along the chosen direction) sees all of the
/// big set, so only its private part outside the big set needs counting. Any
/// other vertex misses the whole core.
pub fn exact_classes(graph: &Digraph, bt: &BowTie, epsilon: f64, forward: bool) -> ExactClasses {
    let n = graph.vertex_count();
    let threshold = size_threshold(n, epsilon);
    let (in_big, reaches_core): (Membership, Membership) = if forward {
        (BowTie::in_big_influenced, BowTie::in_big_source)
    } else {
        (BowTie::in_big_source, BowTie::in_big_influenced)
    };
    let big_size = if forward { bt.big_influenced_size() } else { bt.big_source_size() };
    let mut small = vec![false; n];
    let mut large = vec![false; n];
    let mut reach = Reach::new(graph);
    for x in 0..n as u32 {
        let i = x as usize;
        if reaches_core(bt, x) {
            // C(x) contains the big set, so |C(x)| >= big_size.
            small[i] = big_size < threshold;
            let private = if bt.region(x) == Region::Core {
                0
            } else {
                reach.run(x, forward, threshold.max(1), |w| in_big(bt, w))
            };
            large[i] = private < threshold;
            if small[i] {
                // Only possible when the big set itself is below the threshold.
                small[i] = reach.full(x, forward) < threshold;
            }
        } else {
            let size = reach.run(x, forward, threshold.max(1), |_| false);
            let complete = size < threshold.max(1);
            small[i] = size < threshold;
            if complete || bt.core.len() < threshold {
                let size = if complete { size } else { reach.full(x, forward) };
                let inter = reach.visited().iter().filter(|&&v| in_big(bt, v)).count();
                large[i] = size + big_size - 2 * inter < threshold;
            }
        }
    }
    ExactClasses { small, large }
}

/// Left-hand sides of the duality bounds.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DualityReport {
    pub epsilon: f64,
    /// False when either big component is missing; the statistics are then zero.
    pub has_big_components: bool,
    /// `n⁻¹|C̄ᴸ(ε)| · | n⁻¹|C̄*| − n⁻¹|Cᴸ(ε)| |`.
    pub theorem5_lhs: f64,
    /// `n⁻¹|Cᴸ(ε) △ C̄*|`.
    pub corollary6_lhs: f64,
    /// Exact class counts behind the statistics.
    pub exact_count_small: usize,
    pub exact_count_large: usize,
    pub exact_count_small_bar: usize,
    pub exact_count_large_bar: usize,
}

/// Computes the duality statistics from exact large-source and large-target sets.
pub fn duality_stats(graph: &Digraph, epsilon: f64, report: &ComponentReport) -> DualityReport {
    let bt = bow_tie(graph);
    duality_stats_with(graph, &bt, epsilon, report)
}

pub fn duality_stats_with(graph: &Digraph, bt: &BowTie, epsilon: f64, report: &ComponentReport) -> DualityReport {
    let n = graph.vertex_count();
    let mut out = DualityReport {
        epsilon,
        has_big_components: false,
        theorem5_lhs: 0.0,
        corollary6_lhs: 0.0,
        exact_count_small: 0,
        exact_count_large: 0,
        exact_count_small_bar: 0,
        exact_count_large_bar: 0,
    };
    if !(report.has_big_component && report.has_big_source_component) {
        return out;
    }
    let fwd = exact_classes(graph, bt, epsilon, true);
    let bwd = exact_classes(graph, bt, epsilon, false);
    let nf = n as f64;
    let large = fwd.large_count() as f64 / nf;
    let large_bar = bwd.large_count() as f64 / nf;
    let sym_diff = (0..n as u32).filter(|&v| fwd.large[v as usize] != bt.in_big_source(v)).count();
    out.has_big_components = true;
    out.theorem5_lhs = large_bar * (bt.big_source_size() as f64 / nf - large).abs();
    out.corollary6_lhs = sym_diff as f64 / nf;
    out.exact_count_small = fwd.small_count();
    out.exact_count_large = fwd.large_count();
    out.exact_count_small_bar = bwd.small_count();
    out.exact_count_large_bar = bwd.large_count();
    out
}

/// Samples `pairs` vertex pairs and counts those where `y ∈ C(x)` and
/// `x ∈ C̄(y)` disagree, using one forward and one backward search per pair.
pub fn tautology_check(graph: &Digraph, pairs: usize, seed: u64) -> usize {
    let n = graph.vertex_count() as u32;
    let mut rng = stream_rng(seed, stream::TAUTOLOGY);
    let mut fwd = Reach::new(graph);
    let mut bwd = Reach::new(graph);
    (0..pairs)
        .filter(|_| {
            let x = rng.random_range(0..n);
            let y = rng.random_range(0..n);
            fwd.full(x, true);
            bwd.full(y, false);
            fwd.contains(y) != bwd.contains(x)
        })
        .count()
}

/// The same check over all `n²` ordered pairs.
pub fn tautology_check_all(graph: &Digraph) -> usize {
    let n = graph.vertex_count();
    let words = n.div_ceil(64);
    let mut rows = vec![0u64; n * words];
    let mut reach = Reach::new(graph);
    for x in 0..n {
        reach.full(x as u32, true);
        for &y in reach.visited() {
            rows[x * words + y as usize / 64] |= 1 << (y % 64);
        }
    }
    let mut violations = 0;
    for y in 0..n {
        reach.full(y as u32, false);
        for x in 0..n {
            let forward = rows[x * words + y / 64] >> (y % 64) & 1 == 1;
            if forward != reach.contains(x as u32) {
                violations += 1;
            }
        }
    }
    violations
}

/// `|C(x) △ C(x')| / n` for `pairs` pairs drawn uniformly from core ∪ IN.
pub fn sample_large_pair_divergence(graph: &Digraph, bt: &BowTie, pairs: usize, seed: u64) -> Vec<f64> {
    let members: Vec<u32> = bt.core.iter().chain(&bt.in_set).copied().collect();
    if members.is_empty() {
        return Vec::new();
    }
    let n = graph.vertex_count() as f64;
    let mut rng = stream_rng(seed, stream::PAIRS);
    let mut a = Reach::new(graph);
    let mut b = Reach::new(graph);
    (0..pairs)
        .map(|_| {
            let x = members[rng.random_range(0..members.len())];
            let y = members[rng.random_range(0..members.len())];
            let sa = a.full(x, true);
            let sb = b.full(y, true);
            let inter = b.visited().iter().filter(|&&v| a.contains(v)).count();
            (sa + sb - 2 * inter) as f64 / n
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // A=0, B=1, C=2.
    fn chain() -> Digraph {
        Digraph::from_arcs(3, &[(0, 1), (1, 2)])
    }

    #[test]
    fn chain_sets() {
        let g = chain();
        assert_eq!(forward_set(&g, 0), vec![0, 1, 2]);
        assert_eq!(backward_set(&g, 2), vec![0, 1, 2]);
        assert_eq!(forward_set(&g, 2), vec![2]);
        assert_eq!(backward_set(&g, 0), vec![0]);
    }

    #[test]
    fn isolated_and_antiparallel() {
        let g = Digraph::from_arcs(2, &[]);
        assert_eq!(forward_set(&g, 0), vec![0]);
        assert_eq!(backward_set(&g, 0), vec![0]);
        let g = Digraph::from_arcs(2, &[(0, 1), (1, 0)]);
        assert_eq!(forward_set(&g, 0), vec![0, 1]);
        assert_eq!(forward_set(&g, 1), vec![0, 1]);
        assert_eq!(backward_set(&g, 0), vec![0, 1]);
        assert_eq!(backward_set(&g, 1), vec![0, 1]);
    }

    #[test]
    fn bow_tie_tie_break_and_shapes() {
        let bt = bow_tie(&chain());
        assert_eq!((bt.core.clone(), bt.in_set.clone(), bt.out_set.clone()), (vec![0], vec![], vec![1, 2]));
        let bt = bow_tie(&Digraph::from_arcs(3, &[(0, 1), (1, 0), (1, 2)]));
        assert_eq!((bt.core.clone(), bt.in_set.clone(), bt.out_set.clone()), (vec![0, 1], vec![], vec![2]));
        let bt = bow_tie(&Digraph::from_arcs(4, &[]));
        assert_eq!((bt.core.clone(), bt.in_set.clone(), bt.out_set.clone()), (vec![0], vec![], vec![]));
        assert_eq!(bt.region(3), Region::Other);
    }

    #[test]
    fn bow_tie_with_in_and_tendrils() {
        // 0 -> {1,2 cycle} -> 3, plus 4 -> 0 and 5 isolated.
        let g = Digraph::from_arcs(6, &[(0, 1), (1, 2), (2, 1), (2, 3), (4, 0)]);
        let bt = bow_tie(&g);
        assert_eq!(bt.core, vec![1, 2]);
        assert_eq!(bt.in_set, vec![0, 4]);
        assert_eq!(bt.out_set, vec![3]);
        assert_eq!(bt.region(5), Region::Other);
    }

    #[test]
    fn chain_classification() {
        // n = 3, epsilon = 0.5: threshold 2. C* = {0,1,2}; only A reaches the core.
        let g = chain();
        let r = classify(&g, 0.5, 50, 1);
        assert!(r.has_big_component);
        assert_eq!((r.c_star_size, r.count_large, r.count_small), (3, 1, 2));
        // B: |C(B) △ C*| = 1 < 1.5 so B is large by definition, but also
        // |C(B)| = 2 >= 1.5, so the structural class "small" is contradicted when sampled.
        let exact = exact_classes(&g, &bow_tie(&g), 0.5, true);
        assert_eq!(exact.large, vec![true, true, false]);
        assert_eq!(exact.small, vec![false, false, true]);
        assert!(r.sample_violations > 0);
    }

    #[test]
    fn exact_classes_agree_with_brute_force() {
        let g = Digraph::from_arcs(
            9,
            &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (5, 0), (6, 5), (7, 4), (4, 8), (1, 1)],
        );
        let bt = bow_tie(&g);
        for &eps in &[0.1, 0.25, 0.4, 0.6, 0.9] {
            for forward in [true, false] {
                let exact = exact_classes(&g, &bt, eps, forward);
                let big: Vec<u32> = (0..9).filter(|&v| if forward { bt.in_big_influenced(v) } else { bt.in_big_source(v) }).collect();
                for x in 0..9u32 {
                    let set = if forward { forward_set(&g, x) } else { backward_set(&g, x) };
                    let inter = set.iter().filter(|v| big.contains(v)).count();
                    let sym = set.len() + big.len() - 2 * inter;
                    assert_eq!(exact.small[x as usize], (set.len() as f64) / 9.0 < eps, "small x={x} eps={eps}");
                    assert_eq!(exact.large[x as usize], (sym as f64) / 9.0 < eps, "large x={x} eps={eps}");
                }
            }
        }
    }

    #[test]
    fn identical_big_sets_give_zero_corollary_statistic() {
        // A directed cycle plus a pendant reached from it: core ∪ IN = core.
        let g = Digraph::from_arcs(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]);
        let r = classify(&g, 0.3, 20, 5);
        let d = duality_stats(&g, 0.3, &r);
        assert!(d.has_big_components);
        assert_eq!(d.corollary6_lhs, 0.0);
    }

    #[test]
    fn no_big_component_gives_flagged_zeros() {
        let g = Digraph::from_arcs(100, &[(0, 1)]);
        let r = classify(&g, 0.05, 30, 2);
        assert!(!r.has_big_component);
        assert_eq!((r.count_large, r.count_small, r.sample_violations), (0, 100, 0));
        let d = duality_stats(&g, 0.05, &r);
        assert!(!d.has_big_components);
        assert_eq!((d.theorem5_lhs, d.corollary6_lhs), (0.0, 0.0));
    }

    #[test]
    fn tautology_on_chain() {
        assert_eq!(tautology_check_all(&chain()), 0);
        assert_eq!(tautology_check(&chain(), 100, 3), 0);
    }

    #[test]
    fn scc_count_on_cycle_and_chain() {
        let (count, comp) = strongly_connected_components(&Digraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]));
        assert_eq!(count, 1);
        assert!(comp.iter().all(|&c| c == 0));
        assert_eq!(strongly_connected_components(&chain()).0, 3);
    }
}
