//! Exact event-driven solution of `ẋ_i = −w_i·sign(x_i − x_{i+1})`.
//!
//! Between events every agent moves along a straight line whose slope
//! magnitude is a gain. An event is a contact between an agent and its
//! leader; at a contact the follower either joins the leader's trajectory
//! for good (its gain is at least the leader's current speed) or bounces
//! off with its own gain in the leader's direction of travel. Contacts
//! that happen at the same instant are resolved as one batch, tail-most
//! follower last, so that a follower always sees its leader's post-event
//! motion.
//!
//! Candidate contacts live in a binary heap keyed by absolute time. A
//! pair's entry is only replaced when one of its two lines changes, stale
//! entries are dropped by version stamp when popped.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::agents::{sign, spread_of, ConsensusInstance};
use crate::error::{usage, Error, Result};

/// Relative tolerance under which two slopes count as equal at a contact.
pub const SLOPE_TIE_REL: f64 = 1e-12;

/// Absolute floor of the simultaneity window for batched events.
pub const SIMULTANEITY_ABS: f64 = 1e-12;

/// Relative (to the current time) part of the simultaneity window.
pub const SIMULTANEITY_REL: f64 = 1e-9;

/// Divergence is declared once the spread exceeds this multiple of the initial spread.
pub const DIVERGENCE_SPREAD_FACTOR: f64 = 2.0;

/// Hard ceiling on event batches for a single run.
pub const MAX_BATCHES: usize = 1_000_000;

/// One straight-line piece of an agent's trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// Agents sharing this trajectory, ordered from tail to head.
    pub members: Vec<usize>,
    pub anchor_time: f64,
    pub anchor_value: f64,
    pub slope: f64,
    /// Agent whose gain sets `|slope|`.
    pub slope_source: usize,
}

impl Segment {
    pub fn new(member: usize, anchor_time: f64, anchor_value: f64, slope: f64) -> Self {
        Self {
            members: vec![member],
            anchor_time,
            anchor_value,
            slope,
            slope_source: member,
        }
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.anchor_value + self.slope * (t - self.anchor_time)
    }

    fn reanchored(&self, t: f64, value: f64) -> Segment {
        Segment {
            anchor_time: t,
            anchor_value: value,
            ..self.clone()
        }
    }
}

/// Earliest `t > after` at which the two lines meet, with the common value.
///
/// Parallel lines never meet, lines that touch exactly at `after` and then
/// separate do not count.
pub fn intersection_time(a: &Segment, b: &Segment, after: f64) -> Option<(f64, f64)> {
    let rel = a.slope - b.slope;
    if rel == 0.0 {
        return None;
    }
    let va = a.value_at(after);
    let vb = b.value_at(after);
    let tau = (vb - va) / rel;
    if tau > 0.0 && tau.is_finite() {
        Some((after + tau, va + a.slope * tau))
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Merge,
    SignReversal,
    FinalConsensus,
}

/// Contact between a follower and its leader.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub time: f64,
    pub value: f64,
    pub follower: usize,
    pub leader: usize,
    pub kind: EventKind,
}

fn gains_tie(gain: f64, speed: f64) -> bool {
    (gain - speed).abs() <= SLOPE_TIE_REL * gain.abs().max(speed.abs())
}

/// Outcome of a follower meeting its leader at `event_time`.
///
/// The leader segment must already carry its post-event slope. The follower
/// joins the leader when its gain is at least the leader's speed (ties merge),
/// otherwise it keeps its own gain and moves in the leader's direction, which
/// reverses its slope.
pub fn apply_event_rule(
    follower: &Segment,
    follower_gain: f64,
    leader: &Segment,
    event_time: f64,
    follower_index: usize,
    leader_index: usize,
) -> Result<(Segment, EventRecord)> {
    let xf = follower.value_at(event_time);
    let xl = leader.value_at(event_time);
    let scale = 1.0 + xf.abs().max(xl.abs());
    if !((xf - xl).abs() <= 1e-9 * scale) {
        return Err(Error::Internal(format!(
            "agents {follower_index} and {leader_index} do not meet at t = {event_time} ({xf} vs {xl})"
        )));
    }
    let leader_speed = leader.slope.abs();
    let merges = follower_gain > 0.0
        && (follower_gain >= leader_speed || gains_tie(follower_gain, leader_speed));
    let (segment, kind) = if merges {
        let mut members = follower.members.clone();
        members.extend(
            leader
                .members
                .iter()
                .filter(|m| !follower.members.contains(m)),
        );
        (
            Segment {
                members,
                anchor_time: event_time,
                anchor_value: xl,
                slope: leader.slope,
                slope_source: leader.slope_source,
            },
            EventKind::Merge,
        )
    } else {
        (
            Segment::new(
                follower_index,
                event_time,
                xl,
                follower_gain * sign(leader.slope),
            ),
            EventKind::SignReversal,
        )
    };
    Ok((
        segment,
        EventRecord {
            time: event_time,
            value: xl,
            follower: follower_index,
            leader: leader_index,
            kind,
        },
    ))
}

/// State of every agent at one event instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub time: f64,
    pub states: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusOutcome {
    pub t_f: f64,
    pub x_f: f64,
    pub events: Vec<EventRecord>,
    /// Number of event batches processed.
    pub iterations: usize,
    /// Batches containing at least one merge or the final contact.
    pub merge_iterations: usize,
    /// `V(0) / (sum of two smallest gains)`, present when every gain is positive.
    pub upper_bound_t_c: Option<f64>,
    /// Agent states at `t = 0` and after every batch; linear in between.
    pub knots: Vec<Knot>,
}

impl ConsensusOutcome {
    /// Agent states at time `t`, constant after `t_f`.
    pub fn state_at(&self, t: f64) -> Vec<f64> {
        let idx = self.knots.partition_point(|k| k.time <= t);
        if idx == 0 {
            return self.knots[0].states.clone();
        }
        if idx == self.knots.len() {
            return self.knots[idx - 1].states.clone();
        }
        let (a, b) = (&self.knots[idx - 1], &self.knots[idx]);
        let frac = if b.time > a.time {
            (t - a.time) / (b.time - a.time)
        } else {
            1.0
        };
        a.states
            .iter()
            .zip(&b.states)
            .map(|(x0, x1)| x0 + (x1 - x0) * frac)
            .collect()
    }

    pub fn sign_reversals(&self) -> usize {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::SignReversal)
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceReason {
    /// The spread grew past the divergence factor times its initial value.
    SpreadGrowth,
    /// Too many batches without the spread improving.
    NoProgress,
    /// No pair is approaching its leader, so no further contact can occur.
    NoFurtherContact,
}

/// Evidence that a run will not reach consensus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub reason: DivergenceReason,
    pub time: f64,
    pub initial_spread: f64,
    pub final_spread: f64,
    /// Rate of change of the spread after the last processed batch.
    pub spread_rate: f64,
    pub iterations: usize,
    pub events: Vec<EventRecord>,
}

/// `spread(0)` over the sum of the two smallest gains.
pub fn consensus_time_upper_bound(instance: &ConsensusInstance) -> Result<f64> {
    if !instance.all_gains_positive() {
        return Err(usage(
            "consensus-time bound requires every gain to be positive",
        ));
    }
    let mut gains = instance.gains().to_vec();
    gains.sort_by(f64::total_cmp);
    Ok(spread_of(instance.states0()) / (gains[0] + gains[1]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Link {
    Stuck,
    /// Follower and leader apart, with the sign of `σ`.
    Apart(f64),
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    time: f64,
    pair: usize,
    version: u64,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.pair.cmp(&self.pair))
    }
}

struct Engine<'a> {
    gains: &'a [f64],
    n: usize,
    t: f64,
    segs: Vec<Segment>,
    links: Vec<Link>,
    versions: Vec<u64>,
    queue: BinaryHeap<Candidate>,
    events: Vec<EventRecord>,
}

impl<'a> Engine<'a> {
    fn leader(&self, i: usize) -> usize {
        (i + 1) % self.n
    }

    fn follower(&self, i: usize) -> usize {
        (i + self.n - 1) % self.n
    }

    fn values(&self) -> Vec<f64> {
        self.segs.iter().map(|s| s.value_at(self.t)).collect()
    }

    /// Re-resolve every pair flagged in `touching`, heads first.
    ///
    /// `values` holds the agent states at `self.t`; touching chains are
    /// snapped onto their head's value. Returns the agents whose line changed.
    fn resolve(
        &mut self,
        values: &mut [f64],
        touching: &[bool],
        batch: &[bool],
        record: bool,
    ) -> Result<Vec<bool>> {
        let n = self.n;
        let t = self.t;
        let mut changed = vec![false; n];
        for h in 0..n {
            if touching[h] {
                continue;
            }
            let slope = match self.links[h] {
                Link::Apart(side) => -self.gains[h] * side,
                Link::Stuck => unreachable!("non-touching pair marked stuck"),
            };
            let head = Segment::new(h, t, values[h], slope);
            if head.slope != self.segs[h].slope {
                changed[h] = true;
            }
            self.segs[h] = head;
            let mut i = self.follower(h);
            while touching[i] {
                let l = self.leader(i);
                values[i] = values[l];
                let before = self.segs[i].reanchored(t, values[i]);
                let (seg, ev) = apply_event_rule(&before, self.gains[i], &self.segs[l], t, i, l)?;
                let was_stuck = self.links[i] == Link::Stuck;
                self.links[i] = match ev.kind {
                    EventKind::Merge => Link::Stuck,
                    _ => Link::Apart(-sign(self.segs[l].slope)),
                };
                if seg.slope != self.segs[i].slope || !was_stuck {
                    changed[i] = true;
                }
                if record && (batch[i] || (was_stuck && ev.kind != EventKind::Merge)) {
                    self.events.push(ev);
                }
                self.segs[i] = seg;
                i = self.follower(i);
            }
        }
        self.assign_clusters();
        Ok(changed)
    }

    fn assign_clusters(&mut self) {
        let n = self.n;
        for h in 0..n {
            if self.links[h] == Link::Stuck {
                continue;
            }
            let mut members = vec![h];
            let mut i = self.follower(h);
            while self.links[i] == Link::Stuck && i != h {
                members.push(i);
                i = self.follower(i);
            }
            members.reverse();
            let source = self.segs[h].slope_source;
            for &m in &members {
                self.segs[m].members = members.clone();
                self.segs[m].slope_source = source;
            }
        }
    }

    fn schedule(&mut self, pair: usize) {
        self.versions[pair] += 1;
        let Link::Apart(side) = self.links[pair] else {
            return;
        };
        let l = self.leader(pair);
        let rel = self.segs[pair].slope - self.segs[l].slope;
        if side * rel >= 0.0 {
            return;
        }
        let gap = side * (self.segs[pair].value_at(self.t) - self.segs[l].value_at(self.t));
        let time = self.t + gap.max(0.0) / rel.abs();
        if time.is_finite() {
            self.queue.push(Candidate {
                time,
                pair,
                version: self.versions[pair],
            });
        }
    }

    fn reschedule_changed(&mut self, changed: &[bool]) {
        let n = self.n;
        let mut dirty = vec![false; n];
        for a in (0..n).filter(|&a| changed[a]) {
            dirty[a] = true;
            dirty[self.follower(a)] = true;
        }
        for p in (0..n).filter(|&p| dirty[p]) {
            self.schedule(p);
        }
    }

    fn pop_valid(&mut self) -> Option<Candidate> {
        while let Some(c) = self.queue.pop() {
            if c.version == self.versions[c.pair] {
                return Some(c);
            }
        }
        None
    }

    fn peek_valid(&mut self) -> Option<Candidate> {
        while let Some(&c) = self.queue.peek() {
            if c.version == self.versions[c.pair] {
                return Some(c);
            }
            self.queue.pop();
        }
        None
    }

    fn spread_rate(&self) -> f64 {
        let values = self.values();
        let dt = 1.0;
        let later: Vec<f64> = self.segs.iter().map(|s| s.value_at(self.t + dt)).collect();
        (spread_of(&later) - spread_of(&values)) / dt
    }
}

/// Simulate the sign dynamics exactly until consensus or a divergence verdict.
///
/// Returns [`Error::Diverged`] when consensus cannot be reached, which with a
/// single negative gain happens iff that gain is at most `−min` of the others.
pub fn run_consensus(instance: &ConsensusInstance) -> Result<ConsensusOutcome> {
    let n = instance.n();
    let gains = instance.gains();
    let non_positive = gains.iter().filter(|&&w| w <= 0.0).count();
    if non_positive > 1 {
        return Err(Error::NotSupported(format!(
            "{non_positive} non-positive gains; at most one is handled"
        )));
    }
    let upper_bound_t_c = consensus_time_upper_bound(instance).ok();
    let states0 = instance.states0();
    let spread0 = spread_of(states0);

    if spread0 == 0.0 {
        return Ok(ConsensusOutcome {
            t_f: 0.0,
            x_f: states0[0],
            events: Vec::new(),
            iterations: 0,
            merge_iterations: 0,
            upper_bound_t_c,
            knots: vec![Knot {
                time: 0.0,
                states: states0.to_vec(),
            }],
        });
    }

    let mut eng = Engine {
        gains,
        n,
        t: 0.0,
        segs: (0..n)
            .map(|i| Segment::new(i, 0.0, states0[i], 0.0))
            .collect(),
        links: (0..n)
            .map(|i| Link::Apart(sign(states0[i] - states0[(i + 1) % n])))
            .collect(),
        versions: vec![0; n],
        queue: BinaryHeap::new(),
        events: Vec::new(),
    };

    // Pairs that start in contact are resolved like a contact at t = 0.
    let touching0: Vec<bool> = (0..n).map(|i| states0[i] == states0[(i + 1) % n]).collect();
    let mut values = states0.to_vec();
    eng.resolve(&mut values, &touching0, &vec![false; n], false)?;
    for p in 0..n {
        eng.schedule(p);
    }

    let mut knots = vec![Knot {
        time: 0.0,
        states: values,
    }];
    let mut iterations = 0usize;
    let mut merge_iterations = 0usize;
    let mut best_spread = spread0;
    let mut last_improvement = 0usize;
    let no_progress_limit = 10 * n * n;

    let diverged = |eng: &Engine, reason, spread, iterations| {
        Error::Diverged(Box::new(Divergence {
            reason,
            time: eng.t,
            initial_spread: spread0,
            final_spread: spread,
            spread_rate: eng.spread_rate(),
            iterations,
            events: eng.events.clone(),
        }))
    };

    loop {
        let Some(first) = eng.pop_valid() else {
            let spread = spread_of(&eng.values());
            return Err(diverged(
                &eng,
                DivergenceReason::NoFurtherContact,
                spread,
                iterations,
            ));
        };
        let t_event = first.time;
        let window = SIMULTANEITY_ABS.max(SIMULTANEITY_REL * t_event.abs());
        let mut batch = vec![false; n];
        batch[first.pair] = true;
        while let Some(c) = eng.peek_valid() {
            if c.time - t_event > window {
                break;
            }
            eng.queue.pop();
            batch[c.pair] = true;
        }

        eng.t = t_event;
        iterations += 1;
        let mut values = eng.values();
        let touching: Vec<bool> = (0..n)
            .map(|i| batch[i] || eng.links[i] == Link::Stuck)
            .collect();

        if touching.iter().all(|&b| b) {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let x_f = 0.5 * (lo + hi);
            for p in (0..n).filter(|&p| batch[p]) {
                eng.events.push(EventRecord {
                    time: t_event,
                    value: x_f,
                    follower: p,
                    leader: eng.leader(p),
                    kind: EventKind::FinalConsensus,
                });
            }
            merge_iterations += 1;
            knots.push(Knot {
                time: t_event,
                states: vec![x_f; n],
            });
            return Ok(ConsensusOutcome {
                t_f: t_event,
                x_f,
                events: eng.events,
                iterations,
                merge_iterations,
                upper_bound_t_c,
                knots,
            });
        }

        let before = eng.events.len();
        let changed = eng.resolve(&mut values, &touching, &batch, true)?;
        if eng.events[before..]
            .iter()
            .any(|e| e.kind == EventKind::Merge)
        {
            merge_iterations += 1;
        }
        eng.reschedule_changed(&changed);

        let spread = spread_of(&values);
        knots.push(Knot {
            time: t_event,
            states: values,
        });
        if spread > DIVERGENCE_SPREAD_FACTOR * spread0 {
            return Err(diverged(
                &eng,
                DivergenceReason::SpreadGrowth,
                spread,
                iterations,
            ));
        }
        if spread < best_spread {
            best_spread = spread;
            last_improvement = iterations;
        } else if iterations - last_improvement > no_progress_limit || iterations >= MAX_BATCHES {
            return Err(diverged(
                &eng,
                DivergenceReason::NoProgress,
                spread,
                iterations,
            ));
        }
    }
}
