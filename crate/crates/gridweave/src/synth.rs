//! Gaussian-mixture sample sets for benchmarks and demos.

use gridweave_core::{SampleRecord, SampleSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

/// Plastic constant; its powers give the R2 low-discrepancy sequence.
const PLASTIC: f64 = 1.324_717_957_244_746;

/// Cluster means: the R2 sequence from a seeded offset, squeezed into
/// `[0.1, 0.9]^2`.
pub fn cluster_means(clusters: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let alpha = [1.0 / PLASTIC, 1.0 / (PLASTIC * PLASTIC)];
    let unit = Uniform::new(0.0, 1.0).expect("valid range");
    let offset = [unit.sample(rng), unit.sample(rng)];
    (1..=clusters)
        .map(|i| {
            let t = |a: usize| (offset[a] + i as f64 * alpha[a]).fract();
            [0.1 + 0.8 * t(0), 0.1 + 0.8 * t(1)]
        })
        .collect()
}

/// `n` samples split round-robin over `clusters` isotropic Gaussians with
/// standard deviation `spread`. Sample `i` is `s{i}` in cluster
/// `c{i % clusters}`.
///
/// # Panics
/// If `clusters == 0`, `n < clusters` or `spread` is negative or not finite.
pub fn gen_synthetic(clusters: usize, n: usize, spread: f64, seed: u64) -> SampleSet {
    assert!(clusters >= 1 && n >= clusters, "need 1 <= clusters <= n");
    let noise = Normal::new(0.0, spread).expect("spread must be finite and non-negative");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means = cluster_means(clusters, &mut rng);
    let records = (0..n)
        .map(|i| {
            let k = i % clusters;
            SampleRecord {
                id: format!("s{i}"),
                x: means[k][0] + noise.sample(&mut rng),
                y: means[k][1] + noise.sample(&mut rng),
                cluster: format!("c{k}"),
                meta: Default::default(),
            }
        })
        .collect();
    SampleSet::new(records, None).expect("generated records are valid")
}
