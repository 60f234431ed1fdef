//! Linearly separable angle clusters for smoke tests and demos.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::training::Example;

/// `n_samples` examples with labels cycling through `0..n_classes`.
///
/// Every feature of class `c` is drawn uniformly from a band of width
/// `π / (4 n_classes)` centred at `(c + ½) π / (2 n_classes)`, so the bands
/// are disjoint and stay inside `[0, π/2)`.
pub fn angle_clusters(
    n_samples: usize,
    n_features: usize,
    n_classes: usize,
    seed: u64,
) -> Vec<Example> {
    assert!(n_classes > 0, "need at least one class");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = PI / (2.0 * n_classes as f64);
    (0..n_samples)
        .map(|i| {
            let label = i % n_classes;
            let centre = (label as f64 + 0.5) * band;
            let features = (0..n_features)
                .map(|_| centre + rng.gen_range(-0.25..0.25) * band)
                .collect();
            Example { features, label }
        })
        .collect()
}
