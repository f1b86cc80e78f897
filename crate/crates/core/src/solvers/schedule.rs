use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default `eps` in the finite-horizon surrogate of
/// `liminf lambda_n (bound - lambda_n) > 0`.
pub const DEFAULT_SCHEDULE_EPS: f64 = 1e-3;

type LambdaFn = dyn Fn(usize) -> f64 + Send + Sync;

/// Relaxation parameters `lambda_n` with a declared range `(lo, hi]`.
#[derive(Clone)]
pub struct Schedule {
    lambda_at: Arc<LambdaFn>,
    lo: f64,
    hi: f64,
    description: String,
    eps: f64,
    burn_in: usize,
}

impl Schedule {
    pub fn constant(lambda: f64) -> Self {
        Schedule {
            lambda_at: Arc::new(move |_| lambda),
            lo: 0.0,
            hi: lambda,
            description: format!("constant {lambda}"),
            eps: DEFAULT_SCHEDULE_EPS,
            burn_in: 0,
        }
    }

    /// `lambda_at(n)` must lie in `(lo, hi]` for every step.
    pub fn custom(
        lo: f64,
        hi: f64,
        description: impl Into<String>,
        lambda_at: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
            return Err(Error::param("schedule", format!("bad declared range ({lo}, {hi}]")));
        }
        Ok(Schedule {
            lambda_at: Arc::new(lambda_at),
            lo,
            hi,
            description: description.into(),
            eps: DEFAULT_SCHEDULE_EPS,
            burn_in: 0,
        })
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    /// Steps before `burn_in` are exempt from the `eps` condition.
    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn lambda_at(&self, n: usize) -> f64 {
        (self.lambda_at)(n)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Checks every step of the horizon. `bound(n)` is the largest
    /// admissible relaxation at step `n` (`1/alpha` of the map used there).
    pub fn validate(&self, horizon: usize, bound: impl Fn(usize) -> f64) -> Result<()> {
        for n in 0..horizon {
            let l = self.lambda_at(n);
            let b = bound(n);
            if !(l.is_finite() && l > self.lo && l <= self.hi) {
                return Err(Error::param(
                    "schedule",
                    format!("lambda_{n} = {l} outside declared range ({}, {}]", self.lo, self.hi),
                ));
            }
            if l > b * (1.0 + 1e-15) {
                return Err(Error::param(
                    "schedule",
                    format!("lambda_{n} = {l} exceeds the admissible bound {b}"),
                ));
            }
            if n >= self.burn_in && l * (b - l) < self.eps {
                return Err(Error::param(
                    "schedule",
                    format!(
                        "lambda_{n} = {l} violates lambda*({b} - lambda) >= {} (too close to 0 or {b})",
                        self.eps
                    ),
                ));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Schedule")
            .field("description", &self.description)
            .field("range", &(self.lo, self.hi))
            .field("eps", &self.eps)
            .finish()
    }
}

type ControlFn = dyn Fn(usize, &[usize]) -> usize + Send + Sync;

#[derive(Clone)]
enum ControlKind {
    Cyclic,
    SeededRandom { seed: u64 },
    User(Arc<ControlFn>),
}

/// Index sequence `(i_n)` choosing which map acts at step `n`.
#[derive(Clone)]
pub struct ControlSequence {
    kind: ControlKind,
    num_maps: usize,
    window: usize,
}

impl ControlSequence {
    /// `i_n = n mod m`.
    pub fn cyclic(num_maps: usize) -> Result<Self> {
        check_count(num_maps)?;
        Ok(ControlSequence {
            kind: ControlKind::Cyclic,
            num_maps,
            window: num_maps,
        })
    }

    /// Consecutive independent random permutations of `0..m`, so every index
    /// appears in every window of `2m - 1` steps.
    pub fn seeded_random(num_maps: usize, seed: u64) -> Result<Self> {
        check_count(num_maps)?;
        Ok(ControlSequence {
            kind: ControlKind::SeededRandom { seed },
            num_maps,
            window: 2 * num_maps - 1,
        })
    }

    /// `next(n, history)` picks `i_n` from the indices chosen so far.
    /// Admissibility is verified over the run horizon with the given window.
    pub fn user(
        num_maps: usize,
        window: usize,
        next: impl Fn(usize, &[usize]) -> usize + Send + Sync + 'static,
    ) -> Result<Self> {
        check_count(num_maps)?;
        if window < num_maps {
            return Err(Error::param("window", format!("window {window} < number of maps {num_maps}")));
        }
        Ok(ControlSequence {
            kind: ControlKind::User(Arc::new(next)),
            num_maps,
            window,
        })
    }

    pub fn num_maps(&self) -> usize {
        self.num_maps
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ControlKind::Cyclic => "cyclic",
            ControlKind::SeededRandom { .. } => "seeded-random-admissible",
            ControlKind::User(_) => "user",
        }
    }

    /// The first `horizon` indices.
    pub fn generate(&self, horizon: usize) -> Result<Vec<usize>> {
        let m = self.num_maps;
        let seq = match &self.kind {
            ControlKind::Cyclic => (0..horizon).map(|n| n % m).collect(),
            ControlKind::SeededRandom { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut out = Vec::with_capacity(horizon + m);
                let mut block: Vec<usize> = (0..m).collect();
                while out.len() < horizon {
                    block.shuffle(&mut rng);
                    out.extend_from_slice(&block);
                }
                out.truncate(horizon);
                out
            }
            ControlKind::User(f) => {
                let mut out = Vec::with_capacity(horizon);
                for n in 0..horizon {
                    let i = f(n, &out);
                    if i >= m {
                        return Err(Error::param("control", format!("index {i} at step {n} out of range")));
                    }
                    out.push(i);
                }
                out
            }
        };
        check_admissible(&seq, m, self.window)?;
        Ok(seq)
    }
}

impl fmt::Debug for ControlSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlSequence")
            .field("kind", &self.kind_name())
            .field("num_maps", &self.num_maps)
            .field("window", &self.window)
            .finish()
    }
}

fn check_count(num_maps: usize) -> Result<()> {
    if num_maps == 0 {
        Err(Error::Empty("control over zero maps"))
    } else {
        Ok(())
    }
}

/// Every index `0..m` occurs in every full window of `window` consecutive steps.
pub fn check_admissible(seq: &[usize], m: usize, window: usize) -> Result<()> {
    if seq.len() < window {
        return Ok(());
    }
    let mut counts = vec![0usize; m];
    for &i in &seq[..window] {
        counts[i] += 1;
    }
    for start in 0..=seq.len() - window {
        if start > 0 {
            counts[seq[start - 1]] -= 1;
            counts[seq[start + window - 1]] += 1;
        }
        if let Some(missing) = counts.iter().position(|&c| c == 0) {
            return Err(Error::param(
                "control",
                format!("index {missing} missing from window starting at step {start} (length {window})"),
            ));
        }
    }
    Ok(())
}
