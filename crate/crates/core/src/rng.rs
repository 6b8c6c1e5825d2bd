//! Deterministic sampling helpers on top of a seeded ChaCha stream.
//!
//! Everything here consumes a fixed number of `u64` draws per call so that a
//! given seed reproduces bit-identical simulations across runs and platforms.

use rand_core::RngCore;

/// Uniform in [0, 1) with 53 bits of resolution.
pub(crate) fn uniform01<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index in [0, n).
pub(crate) fn index_below<R: RngCore>(rng: &mut R, n: usize) -> usize {
    ((rng.next_u64() as u128 * n as u128) >> 64) as usize
}

/// Standard normal pair via Box-Muller.
pub(crate) fn normal_pair<R: RngCore>(rng: &mut R) -> (f64, f64) {
    let u1 = 1.0 - uniform01(rng); // (0, 1], keeps ln finite
    let u2 = uniform01(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Single standard normal draw (consumes one Box-Muller pair).
#[cfg(test)]
pub(crate) fn normal<R: RngCore>(rng: &mut R) -> f64 {
    normal_pair(rng).0
}

/// Exponential with the given mean.
pub(crate) fn exponential<R: RngCore>(rng: &mut R, mean: f64) -> f64 {
    -mean * (1.0 - uniform01(rng)).ln()
}

/// Poisson draw by Knuth's product method; fine for the small means used
/// in channel synthesis.
pub(crate) fn poisson<R: RngCore>(rng: &mut R, lambda: f64) -> u64 {
    let limit = (-lambda).exp();
    let mut k = 0u64;
    let mut p = 1.0;
    loop {
        p *= uniform01(rng);
        if p <= limit {
            return k;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::SeedableRng;

    #[test]
    fn uniform_stays_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let u = uniform01(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn poisson_mean_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 50_000;
        let total: u64 = (0..n).map(|_| poisson(&mut rng, 5.9)).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 5.9).abs() < 0.05, "mean = {mean}");
    }

    #[test]
    fn normal_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 50_000;
        let draws: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.02, "mean = {mean}");
        assert!((var - 1.0).abs() < 0.03, "var = {var}");
    }

    #[test]
    fn exponential_mean_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 50_000;
        let total: f64 = (0..n).map(|_| exponential(&mut rng, 20.0)).sum();
        assert!((total / n as f64 - 20.0).abs() < 0.5);
    }

    #[test]
    fn index_below_covers_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            seen[index_below(&mut rng, 7)] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            assert_eq!(uniform01(&mut a).to_bits(), uniform01(&mut b).to_bits());
        }
    }
}
