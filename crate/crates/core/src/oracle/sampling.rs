use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::vector::Vector;

/// `count` points drawn uniformly from the open ball `B(center, radius)`,
/// reproducible from `seed`.
pub fn sample_in_ball(center: &Vector, radius: f64, count: usize, seed: u64) -> Result<Vec<Vector>> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::param("radius", "must be finite and nonnegative"));
    }
    if center.dim() == 0 {
        return Err(Error::Empty("zero-dimensional center"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| sample_ball(&mut rng, center, radius)).collect())
}

pub(crate) fn sample_ball(rng: &mut ChaCha8Rng, center: &Vector, radius: f64) -> Vector {
    let n = center.dim();
    loop {
        let dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
        return Vector::from_finite(
            center
                .iter()
                .zip(&dir)
                .map(|(c, d)| c + r * d / norm)
                .collect(),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    #[test]
    fn samples_stay_in_the_ball_and_replay() {
        let c = vector![1, -1, 0.5];
        let a = sample_in_ball(&c, 0.3, 500, 5).unwrap();
        assert!(a.iter().all(|p| p.dist(&c) < 0.3));
        assert_eq!(a, sample_in_ball(&c, 0.3, 500, 5).unwrap());
        assert_ne!(a, sample_in_ball(&c, 0.3, 500, 6).unwrap());
    }
}
