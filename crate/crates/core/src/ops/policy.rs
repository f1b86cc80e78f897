use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::vector::Vector;

pub type ChoiceFn = dyn Fn(usize, &[(usize, Vector)]) -> usize + Send + Sync;

/// How an iteration picks one value out of a multi-valued evaluation.
///
/// Every policy is a deterministic function of its configuration and the
/// history of evaluations it has seen, so replays are exact.
#[derive(Clone, Default)]
pub enum SelectionPolicy {
    /// Smallest active piece index.
    #[default]
    LowestIndex,
    /// Uniform choice from a ChaCha stream. The stream only advances when
    /// there is more than one candidate.
    SeededRandom { seed: u64 },
    /// Cycles through candidates: the k-th multi-valued step takes entry
    /// `k mod len`.
    RoundRobin,
    /// `f(step, entries)` returns a position in `entries`; out-of-range
    /// answers are reduced modulo the number of entries.
    Callback(Arc<ChoiceFn>),
}

impl SelectionPolicy {
    pub fn callback(f: impl Fn(usize, &[(usize, Vector)]) -> usize + Send + Sync + 'static) -> Self {
        SelectionPolicy::Callback(Arc::new(f))
    }

    pub fn start(&self) -> PolicyState {
        let rng = match self {
            SelectionPolicy::SeededRandom { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
            _ => None,
        };
        PolicyState {
            policy: self.clone(),
            rng,
            ties_seen: 0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SelectionPolicy::LowestIndex => "lowest-index",
            SelectionPolicy::SeededRandom { .. } => "seeded-random",
            SelectionPolicy::RoundRobin => "round-robin",
            SelectionPolicy::Callback(_) => "user-callback",
        }
    }
}

impl fmt::Debug for SelectionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionPolicy::SeededRandom { seed } => write!(f, "SeededRandom {{ seed: {seed} }}"),
            other => f.write_str(other.name()),
        }
    }
}

/// Running state of a [`SelectionPolicy`] within one iteration.
#[derive(Clone)]
pub struct PolicyState {
    policy: SelectionPolicy,
    rng: Option<ChaCha8Rng>,
    ties_seen: usize,
}

impl PolicyState {
    /// Picks a position in `entries` (which must be nonempty and sorted by
    /// piece index).
    pub fn choose(&mut self, step: usize, entries: &[(usize, Vector)]) -> usize {
        assert!(!entries.is_empty(), "cannot choose from an empty evaluation");
        if entries.len() == 1 {
            return 0;
        }
        let k = self.ties_seen;
        self.ties_seen += 1;
        match &self.policy {
            SelectionPolicy::LowestIndex => 0,
            SelectionPolicy::SeededRandom { .. } => {
                let rng = self.rng.as_mut().expect("seeded policy has a stream");
                rng.random_range(0..entries.len())
            }
            SelectionPolicy::RoundRobin => k % entries.len(),
            SelectionPolicy::Callback(f) => f(step, entries) % entries.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    fn two() -> Vec<(usize, Vector)> {
        vec![(0, vector![0]), (1, vector![2])]
    }

    #[test]
    fn lowest_index_and_round_robin() {
        let mut s = SelectionPolicy::LowestIndex.start();
        assert_eq!(s.choose(0, &two()), 0);
        let mut rr = SelectionPolicy::RoundRobin.start();
        let picks: Vec<_> = (0..4).map(|n| rr.choose(n, &two())).collect();
        assert_eq!(picks, vec![0, 1, 0, 1]);
    }

    #[test]
    fn seeded_random_replays() {
        let run = |seed| {
            let mut s = SelectionPolicy::SeededRandom { seed }.start();
            (0..64).map(|n| s.choose(n, &two())).collect::<Vec<_>>()
        };
        assert_eq!(run(7), run(7));
        assert!(run(7).contains(&1));
    }

    #[test]
    fn singletons_do_not_advance_state() {
        let mut a = SelectionPolicy::SeededRandom { seed: 3 }.start();
        let mut b = SelectionPolicy::SeededRandom { seed: 3 }.start();
        a.choose(0, &[(0, vector![1])]);
        assert_eq!(a.choose(1, &two()), b.choose(1, &two()));
    }

    #[test]
    fn callback_is_reduced() {
        let mut s = SelectionPolicy::callback(|_, _| 5).start();
        assert_eq!(s.choose(0, &two()), 1);
    }
}
