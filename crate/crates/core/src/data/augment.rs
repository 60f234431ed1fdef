use std::collections::BTreeMap;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DataError, Sample, SampleData, Transform};

/// Brings every class to `target` samples.
///
/// Short classes are topped up with flipped or rotated copies of randomly
/// chosen originals. A class above the target is an error unless
/// `allow_subsample`, in which case a seeded subset is kept. Output is
/// grouped by label; originals keep their relative order and precede the
/// generated copies.
pub fn augment(
    samples: Vec<Sample>,
    target: usize,
    seed: u64,
    allow_subsample: bool,
) -> Result<Vec<Sample>, DataError> {
    let mut by_class: BTreeMap<usize, Vec<Sample>> = BTreeMap::new();
    for s in samples {
        by_class.entry(s.label).or_default().push(s);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(target * by_class.len());
    for (class, mut members) in by_class {
        let count = members.len();
        if count > target {
            if !allow_subsample {
                return Err(DataError::TargetBelowCount {
                    class,
                    count,
                    target,
                });
            }
            let mut keep = sample_indices(&mut rng, count, target).into_vec();
            keep.sort_unstable();
            members = keep.into_iter().map(|i| members[i].clone()).collect();
        }
        let mut extra = Vec::with_capacity(target - members.len());
        for _ in members.len()..target {
            let src = &members[rng.gen_range(0..members.len())];
            let t = Transform::ALL[rng.gen_range(0..Transform::ALL.len())];
            let img = match &src.data {
                SampleData::Image(img) => img.transform(t),
                SampleData::Features(_) => {
                    return Err(DataError::AugmentFeatures(src.source.clone()))
                }
            };
            extra.push(Sample {
                data: SampleData::Image(img),
                label: class,
                source: format!("{}#{}", src.source, t.name()),
                split: None,
            });
        }
        out.extend(members);
        out.extend(extra);
    }
    Ok(out)
}
