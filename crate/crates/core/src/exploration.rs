//! Continuous-time exploration of the matching.
//!
//! Half-edges are matched on the fly: an active half-edge is killed and paired
//! with the next half-edge to die spontaneously. Lifetimes are not pre-assigned;
//! by memorylessness the next death comes after an `Exp(L)` wait, where `L` is
//! the number of living half-edges, and the victim is uniform among them.
//!
//! The forward process activates transmitter half-edges of awake vertices and
//! wakes the owner of every half-edge that dies. The reverse process activates
//! every half-edge of awake vertices and wakes an owner only when one of its
//! transmitter half-edges dies.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::degree::JointDegreeDistribution;
use crate::graph::{DegreeSequence, EnhancedMultigraph, GraphError, HalfEdgeKind};
use crate::rng::{stream, stream_rng};
use crate::theory::TheoryPrediction;

/// Default number of watched degree cells.
pub const DEFAULT_WATCH: usize = 10;
/// Every event is stored up to this many vertices; larger runs are strided.
pub const FULL_RECORDING_LIMIT: usize = 1_000_000;
/// Distance below the horizon where windowed deviations stop.
pub const WINDOW_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Direction {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExplorationError {
    #[error("expected a {expected:?} trace, got {found:?}")]
    WrongDirection { expected: Direction, found: Direction },
    #[error("trace has no events")]
    EmptyTrace,
    #[error("no vertex was woken by the fallback rule before half the horizon")]
    NoWindow,
    #[error("horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("some half-edges were left unpaired")]
    Unpaired,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExplorationOptions {
    /// Cells `(receivers, transmitters)` whose sleeping-vertex count is tracked.
    /// `None` picks the most frequent cells of the sequence.
    pub watch: Option<Vec<(u32, u32)>>,
    /// Track every cell present in the sequence.
    pub watch_all: bool,
    /// Keep one event in `stride`; `None` chooses from `n`.
    pub stride: Option<usize>,
    /// Reverse only: receiver deaths are not paired and do not wake anyone.
    /// Experimental; the result is not a perfect matching.
    pub literal_reverse: bool,
}

/// State right after a pairing and the wake it causes.
///
/// `sleeping` counts living transmitter half-edges of sleeping vertices in the
/// forward direction, and all living half-edges of sleeping vertices in reverse.
/// `active` counts active transmitter half-edges forward, active half-edges in reverse.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Event {
    pub t: f64,
    pub living: u32,
    pub receivers: u32,
    pub sleeping: u32,
    pub active: u32,
    pub sleeping_vertices: u32,
}

/// A vertex woken because nothing was active.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Restart {
    pub t: f64,
    pub vertex: u32,
    /// Vertices already awake at that moment.
    pub woken_before: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationTrace {
    pub direction: Direction,
    pub n: usize,
    pub half_edge_count: usize,
    pub max_degree: u32,
    /// First entry is the initial state at `t = 0`.
    pub events: Vec<Event>,
    pub stride: usize,
    pub restarts: Vec<Restart>,
    pub watch: Vec<(u32, u32)>,
    /// `watch_series[i][j]`: sleeping vertices of cell `watch[i]` at `events[j]`.
    pub watch_series: Vec<Vec<u32>>,
    /// `(killed, died)` half-edge pairs in order of occurrence.
    pub pairs: Vec<(u32, u32)>,
    /// Pairs formed uniformly after the process stopped with receivers left over.
    pub posthoc_pairs: usize,
    /// Half-edges that died without a partner (only with `literal_reverse`).
    pub unpaired: Vec<u32>,
    /// No transmitter half-edge at all: the forward process only wakes vertices.
    pub degenerate: bool,
    pub end_time: f64,
}

impl ExplorationTrace {
    pub fn pairing_events(&self) -> usize {
        self.pairs.len() - self.posthoc_pairs
    }

    /// Perfect matching formed by the exploration.
    pub fn induced_multigraph(&self, seq: &DegreeSequence) -> Result<EnhancedMultigraph, ExplorationError> {
        if !self.unpaired.is_empty() {
            return Err(ExplorationError::Unpaired);
        }
        Ok(EnhancedMultigraph::from_pairs(seq, &self.pairs)?)
    }
}

/// Set with O(1) insert, remove and uniform sampling.
#[derive(Debug)]
struct Pool {
    items: Vec<u32>,
    pos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl Pool {
    fn new(universe: usize) -> Self {
        Self { items: Vec::new(), pos: vec![ABSENT; universe] }
    }

    fn full(universe: usize) -> Self {
        Self { items: (0..universe as u32).collect(), pos: (0..universe as u32).collect() }
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn contains(&self, x: u32) -> bool {
        self.pos[x as usize] != ABSENT
    }

    fn insert(&mut self, x: u32) {
        debug_assert!(!self.contains(x));
        self.pos[x as usize] = self.items.len() as u32;
        self.items.push(x);
    }

    fn remove(&mut self, x: u32) -> bool {
        let p = self.pos[x as usize];
        if p == ABSENT {
            return false;
        }
        let last = self.items.pop().expect("non-empty");
        if last != x {
            self.items[p as usize] = last;
            self.pos[last as usize] = p;
        }
        self.pos[x as usize] = ABSENT;
        true
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u32 {
        self.items[rng.random_range(0..self.items.len())]
    }
}

struct Explorer<'s> {
    direction: Direction,
    seq: &'s DegreeSequence,
    kinds: Vec<HalfEdgeKind>,
    owners: Vec<u32>,
    living: Pool,
    active: Pool,
    sleeping_vertices: Pool,
    receivers: u32,
    sleeping_weight: u32,
    watch: Vec<(u32, u32)>,
    watch_index: Vec<u32>,
    watch_counts: Vec<u32>,
    rng: ChaCha8Rng,
    t: f64,
}

impl<'s> Explorer<'s> {
    fn new(direction: Direction, seq: &'s DegreeSequence, watch: Vec<(u32, u32)>, seed: u64) -> Self {
        let n = seq.vertex_count();
        let half_edges = seq.half_edges();
        let kinds: Vec<HalfEdgeKind> = half_edges.iter().map(|h| h.kind).collect();
        let owners = half_edges.iter().map(|h| h.owner).collect();
        let receivers = kinds.iter().filter(|&&k| k == HalfEdgeKind::Receiver).count() as u32;
        let sleeping_weight = match direction {
            Direction::Forward => seq.transmitter_count() as u32,
            Direction::Reverse => kinds.len() as u32,
        };
        let mut watch_counts = vec![0u32; watch.len()];
        let watch_index: Vec<u32> = seq
            .degrees()
            .iter()
            .map(|d| match watch.iter().position(|w| w == d) {
                Some(i) => {
                    watch_counts[i] += 1;
                    i as u32
                }
                None => ABSENT,
            })
            .collect();
        let rng = stream_rng(
            seed,
            match direction {
                Direction::Forward => stream::EXPLORE_FORWARD,
                Direction::Reverse => stream::EXPLORE_REVERSE,
            },
        );
        Self {
            direction,
            seq,
            living: Pool::full(kinds.len()),
            active: Pool::new(kinds.len()),
            sleeping_vertices: Pool::full(n),
            kinds,
            owners,
            receivers,
            sleeping_weight,
            watch,
            watch_index,
            watch_counts,
            rng,
            t: 0.0,
        }
    }

    fn counts_as_sleeping(&self, h: u32) -> bool {
        self.direction == Direction::Reverse || self.kinds[h as usize] == HalfEdgeKind::Transmitter
    }

    fn is_activatable(&self, h: u32) -> bool {
        self.counts_as_sleeping(h)
    }

    fn wake(&mut self, v: u32) {
        if !self.sleeping_vertices.remove(v) {
            return;
        }
        let w = self.watch_index[v as usize];
        if w != ABSENT {
            self.watch_counts[w as usize] -= 1;
        }
        for h in self.seq.half_edge_range(v) {
            if self.living.contains(h) && self.is_activatable(h) {
                self.sleeping_weight -= 1;
                self.active.insert(h);
            }
        }
    }

    fn die(&mut self, h: u32) {
        self.living.remove(h);
        if self.kinds[h as usize] == HalfEdgeKind::Receiver {
            self.receivers -= 1;
        }
        if !self.active.remove(h) && self.sleeping_vertices.contains(self.owners[h as usize]) && self.counts_as_sleeping(h) {
            self.sleeping_weight -= 1;
        }
    }

    fn snapshot(&self) -> Event {
        Event {
            t: self.t,
            living: self.living.len() as u32,
            receivers: self.receivers,
            sleeping: self.sleeping_weight,
            active: self.active.len() as u32,
            sleeping_vertices: self.sleeping_vertices.len() as u32,
        }
    }

    fn advance_clock(&mut self) {
        let wait: f64 = Exp1.sample(&mut self.rng);
        self.t += wait / self.living.len() as f64;
    }
}

struct Recorder {
    stride: usize,
    counter: usize,
    events: Vec<Event>,
    watch_series: Vec<Vec<u32>>,
    pending: Option<(Event, Vec<u32>)>,
}

impl Recorder {
    fn new(stride: usize, watched: usize) -> Self {
        Self { stride, counter: 0, events: Vec::new(), watch_series: vec![Vec::new(); watched], pending: None }
    }

    fn push(&mut self, ex: &Explorer<'_>) {
        let event = ex.snapshot();
        if self.counter.is_multiple_of(self.stride) {
            self.events.push(event);
            for (series, &c) in self.watch_series.iter_mut().zip(&ex.watch_counts) {
                series.push(c);
            }
            self.pending = None;
        } else {
            self.pending = Some((event, ex.watch_counts.clone()));
        }
        self.counter += 1;
    }

    fn finish(mut self) -> (Vec<Event>, Vec<Vec<u32>>) {
        if let Some((event, counts)) = self.pending.take() {
            self.events.push(event);
            for (series, c) in self.watch_series.iter_mut().zip(counts) {
                series.push(c);
            }
        }
        (self.events, self.watch_series)
    }
}

fn choose_watch(seq: &DegreeSequence, options: &ExplorationOptions) -> Vec<(u32, u32)> {
    let counts = seq.empirical_counts();
    if options.watch_all {
        return counts.keys().copied().collect();
    }
    if let Some(w) = &options.watch {
        return w.clone();
    }
    let mut cells: Vec<((u32, u32), usize)> = counts.into_iter().collect();
    cells.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    cells.into_iter().take(DEFAULT_WATCH).map(|(c, _)| c).collect()
}

fn default_stride(n: usize) -> usize {
    if n <= FULL_RECORDING_LIMIT {
        1
    } else {
        n.div_ceil(FULL_RECORDING_LIMIT)
    }
}

fn explore(direction: Direction, seq: &DegreeSequence, seed: u64, options: &ExplorationOptions) -> ExplorationTrace {
    let watch = choose_watch(seq, options);
    let stride = options.stride.unwrap_or_else(|| default_stride(seq.vertex_count())).max(1);
    let literal = direction == Direction::Reverse && options.literal_reverse;
    let mut ex = Explorer::new(direction, seq, watch, seed);
    let mut rec = Recorder::new(stride, ex.watch.len());
    let mut restarts = Vec::new();
    let mut pairs = Vec::with_capacity(seq.edge_count());
    let mut unpaired = Vec::new();
    rec.push(&ex);

    loop {
        while ex.active.len() == 0 && ex.sleeping_vertices.len() > 0 {
            let v = ex.sleeping_vertices.sample(&mut ex.rng);
            let woken_before = (seq.vertex_count() - ex.sleeping_vertices.len()) as u32;
            restarts.push(Restart { t: ex.t, vertex: v, woken_before });
            ex.wake(v);
        }
        if ex.active.len() == 0 {
            break;
        }
        let killed = ex.active.sample(&mut ex.rng);
        ex.die(killed);
        if ex.living.len() == 0 {
            // Only reachable with the literal reverse rule.
            unpaired.push(killed);
            rec.push(&ex);
            break;
        }
        let partner = loop {
            ex.advance_clock();
            let h = ex.living.sample(&mut ex.rng);
            ex.die(h);
            if literal && ex.kinds[h as usize] == HalfEdgeKind::Receiver {
                unpaired.push(h);
                if ex.living.len() == 0 {
                    break None;
                }
                continue;
            }
            break Some(h);
        };
        match partner {
            Some(h) => {
                pairs.push((killed, h));
                let owner = ex.owners[h as usize];
                if direction == Direction::Forward || ex.kinds[h as usize] == HalfEdgeKind::Transmitter {
                    ex.wake(owner);
                }
            }
            None => unpaired.push(killed),
        }
        rec.push(&ex);
    }

    let end_time = ex.t;
    let pairing_events = pairs.len();
    // Leftover half-edges (active receivers, or everything when nothing transmits).
    let mut rest = ex.living.items.clone();
    rest.sort_unstable();
    rest.shuffle(&mut ex.rng);
    for chunk in rest.chunks_exact(2) {
        pairs.push((chunk[0], chunk[1]));
    }
    let (events, watch_series) = rec.finish();
    ExplorationTrace {
        direction,
        n: seq.vertex_count(),
        half_edge_count: seq.half_edge_count(),
        max_degree: seq.max_degree(),
        events,
        stride,
        restarts,
        watch: ex.watch,
        watch_series,
        posthoc_pairs: pairs.len() - pairing_events,
        pairs,
        unpaired,
        degenerate: seq.transmitter_count() == 0,
        end_time,
    }
}

/// Forward exploration: a transmitter half-edge of an awake vertex is killed and
/// paired with the next half-edge to die, whose owner wakes up.
pub fn run_forward(seq: &DegreeSequence, seed: u64, options: &ExplorationOptions) -> ExplorationTrace {
    explore(Direction::Forward, seq, seed, options)
}

/// Reverse exploration: any half-edge of an awake vertex may be killed; its
/// partner's owner wakes only when the partner is a transmitter.
pub fn run_reverse(seq: &DegreeSequence, seed: u64, options: &ExplorationOptions) -> ExplorationTrace {
    explore(Direction::Reverse, seq, seed, options)
}

/// A quantity tracked along a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Observable {
    Living,
    Receivers,
    Sleeping,
    Active,
    Watched(u32, u32),
}

impl Observable {
    /// Whether the deviation only counts on `[0, horizon - 0.1]`.
    pub fn windowed(self) -> bool {
        !matches!(self, Observable::Living | Observable::Receivers)
    }

    pub fn label(self, direction: Direction) -> alloc::string::String {
        use alloc::format;
        use alloc::string::ToString;
        match (self, direction) {
            (Observable::Living, _) => "L".to_string(),
            (Observable::Receivers, _) => "R".to_string(),
            (Observable::Sleeping, Direction::Forward) => "S_T".to_string(),
            (Observable::Sleeping, Direction::Reverse) => "S_bar".to_string(),
            (Observable::Active, Direction::Forward) => "A_T".to_string(),
            (Observable::Active, Direction::Reverse) => "A_bar".to_string(),
            (Observable::Watched(k, l), Direction::Forward) => format!("V_{k}_{l}"),
            (Observable::Watched(k, l), Direction::Reverse) => format!("V_bar_{k}_{l}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObservableDeviation {
    pub observable: Observable,
    /// Sup over all recorded events of `|X(t)/n - f(t)|`.
    pub sup: f64,
    /// The same restricted to `t <= window_end`.
    pub window: f64,
}

impl ObservableDeviation {
    /// The figure an acceptance check should compare.
    pub fn checked(&self) -> f64 {
        if self.observable.windowed() {
            self.window
        } else {
            self.sup
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FluidDeviation {
    pub direction: Direction,
    pub window_end: f64,
    pub entries: Vec<ObservableDeviation>,
}

impl FluidDeviation {
    pub fn get(&self, observable: Observable) -> Option<&ObservableDeviation> {
        self.entries.iter().find(|e| e.observable == observable)
    }

    /// Largest checked deviation.
    pub fn worst(&self) -> f64 {
        self.entries.iter().map(ObservableDeviation::checked).fold(0.0, f64::max)
    }
}

/// Deviations from the fluid limits, windowed at the horizon of `prediction`
/// minus 0.1.
pub fn fluid_deviation(
    trace: &ExplorationTrace,
    dist: &JointDegreeDistribution,
    prediction: &TheoryPrediction,
) -> Result<FluidDeviation, ExplorationError> {
    let horizon = match trace.direction {
        Direction::Forward => prediction.forward_horizon,
        Direction::Reverse => prediction.reverse_horizon,
    };
    fluid_deviation_until(trace, dist, horizon - WINDOW_MARGIN)
}

/// As [`fluid_deviation`] with an explicit window end.
pub fn fluid_deviation_until(
    trace: &ExplorationTrace,
    dist: &JointDegreeDistribution,
    window_end: f64,
) -> Result<FluidDeviation, ExplorationError> {
    if trace.events.is_empty() || trace.n == 0 {
        return Err(ExplorationError::EmptyTrace);
    }
    let m = dist.moments();
    let n = trace.n as f64;
    let dir = trace.direction;
    let sleeping_profile = sleeping_coefficients(dist, dir);
    let mut observables = vec![Observable::Living];
    if dir == Direction::Forward {
        observables.push(Observable::Receivers);
    }
    observables.push(Observable::Sleeping);
    observables.push(Observable::Active);
    observables.extend(trace.watch.iter().map(|&(k, l)| Observable::Watched(k, l)));

    let entries = observables
        .into_iter()
        .enumerate()
        .map(|(i, observable)| {
            let mut sup: f64 = 0.0;
            let mut window: f64 = 0.0;
            let watch_slot = i.checked_sub(observables_before_watch(dir));
            for (j, e) in trace.events.iter().enumerate() {
                let x = libm::exp(-e.t);
                let (value, fluid) = match observable {
                    Observable::Living => (e.living, m.lambda * x * x),
                    Observable::Receivers => (e.receivers, m.lambda_r * x),
                    Observable::Sleeping => (e.sleeping, horner(&sleeping_profile, x)),
                    Observable::Active => {
                        let receivers = if dir == Direction::Forward { m.lambda_r * x } else { 0.0 };
                        (e.active, m.lambda * x * x - receivers - horner(&sleeping_profile, x))
                    }
                    Observable::Watched(k, l) => {
                        let rate = match dir {
                            Direction::Forward => k + l,
                            Direction::Reverse => l,
                        };
                        let series = &trace.watch_series[watch_slot.expect("watched entries follow the rest")];
                        (series[j], dist.prob(k, l) * libm::pow(x, f64::from(rate)))
                    }
                };
                let dev = (f64::from(value) / n - fluid).abs();
                sup = sup.max(dev);
                if e.t <= window_end {
                    window = window.max(dev);
                }
            }
            ObservableDeviation { observable, sup, window }
        })
        .collect();
    Ok(FluidDeviation { direction: dir, window_end, entries })
}

/// Coefficients of the sleeping profile as a polynomial in `x = e^{-t}`.
fn sleeping_coefficients(dist: &JointDegreeDistribution, dir: Direction) -> Vec<f64> {
    let mut c = vec![0.0; dist.support_bound() as usize + 2];
    for cell in dist.cells() {
        let (k, l) = (cell.receivers as usize, cell.transmitters as usize);
        match dir {
            Direction::Forward => c[k + l] += l as f64 * cell.prob,
            Direction::Reverse => {
                c[l] += l as f64 * cell.prob;
                c[l + 1] += k as f64 * cell.prob;
            }
        }
    }
    c
}

fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn observables_before_watch(dir: Direction) -> usize {
    match dir {
        Direction::Forward => 4,
        Direction::Reverse => 3,
    }
}

/// The stretch of the forward exploration that uncovers the big component.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BigWindow {
    /// Last fallback wake before half the horizon.
    pub t1: f64,
    /// First fallback wake after `t1`, or the end of the exploration.
    pub t2: f64,
    pub t2_is_end: bool,
    /// Vertices woken from the wake at `t1` (included) up to the wake at `t2` (excluded).
    pub c_double_prime_size: usize,
}

pub fn big_window(trace: &ExplorationTrace, prediction: &TheoryPrediction) -> Result<BigWindow, ExplorationError> {
    big_window_at(trace, prediction.forward_horizon)
}

/// As [`big_window`] with an explicit horizon.
pub fn big_window_at(trace: &ExplorationTrace, horizon: f64) -> Result<BigWindow, ExplorationError> {
    if trace.direction != Direction::Forward {
        return Err(ExplorationError::WrongDirection { expected: Direction::Forward, found: trace.direction });
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(ExplorationError::InvalidHorizon(horizon));
    }
    let i = trace.restarts.iter().rposition(|r| r.t < horizon / 2.0).ok_or(ExplorationError::NoWindow)?;
    let start = trace.restarts[i];
    let (t2, t2_is_end, woken_at_t2) = match trace.restarts.get(i + 1) {
        Some(next) => (next.t, false, next.woken_before as usize),
        None => (trace.end_time, true, trace.n),
    };
    Ok(BigWindow { t1: start.t, t2, t2_is_end, c_double_prime_size: woken_at_t2 - start.woken_before as usize })
}
