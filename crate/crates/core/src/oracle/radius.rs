use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::UnionMap;
use crate::vector::Vector;

/// Radii probed per direction before bisection.
const LADDER: usize = 64;
const BISECTIONS: usize = 40;

/// Sampled estimate of the radius of attraction around `xstar`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub radius: f64,
    pub delta_max: f64,
    pub directions: usize,
    pub center_active: Vec<usize>,
    /// A point at which the selector left `center_active`, with its selector.
    pub counterexample: Option<(Vector, Vec<usize>)>,
    /// Always `"sampled"`: the true radius may be smaller.
    pub kind: String,
}

/// Estimates `sup { d : phi(x) is a subset of phi(xstar) on B(xstar, d) }`
/// up to `delta_max`.
///
/// Each of `samples` seeded unit directions is scanned on a ladder of radii
/// and the first failure is refined by bisection; the estimate is the
/// smallest accepted radius over all directions. Direction sets for larger
/// `samples` extend those for smaller ones (same seed), so the estimate
/// never increases with more samples.
pub fn estimate_radius(t: &UnionMap, xstar: &Vector, delta_max: f64, samples: usize, seed: u64) -> Result<RadiusEstimate> {
    xstar.check_dim(t.dim())?;
    if !(delta_max.is_finite() && delta_max > 0.0) {
        return Err(Error::param("delta_max", "must be positive and finite"));
    }
    let center_active = t.selector(xstar)?;
    let inside = |x: &Vector| -> Result<(bool, Vec<usize>)> {
        let s = t.selector(x)?;
        Ok((s.iter().all(|i| center_active.contains(i)), s))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = delta_max;
    let mut counterexample = None;
    for _ in 0..samples {
        let u = unit_direction(&mut rng, t.dim());
        let at = |r: f64| xstar.axpy(r, &u);
        let mut ok_r = 0.0;
        let mut bad = None;
        for j in 1..=LADDER {
            let r = delta_max * j as f64 / LADDER as f64;
            let (ok, sel) = inside(&at(r))?;
            if !ok {
                bad = Some((r, sel));
                break;
            }
            ok_r = r;
        }
        let Some((mut bad_r, mut bad_sel)) = bad else {
            continue;
        };
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (ok_r + bad_r);
            let (ok, sel) = inside(&at(mid))?;
            if ok {
                ok_r = mid;
            } else {
                bad_r = mid;
                bad_sel = sel;
            }
        }
        if ok_r < best {
            best = ok_r;
            counterexample = Some((at(bad_r), bad_sel));
        }
    }
    Ok(RadiusEstimate {
        radius: best,
        delta_max,
        directions: samples,
        center_active,
        counterexample,
        kind: "sampled".into(),
    })
}

fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-12 {
            return Vector::new(v.into_iter().map(|a| a / n).collect()).expect("finite");
        }
    }
}
