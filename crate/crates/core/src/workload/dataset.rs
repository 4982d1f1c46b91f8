use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Labelled feature matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub features: Vec<f64>,
    pub labels: Vec<usize>,
    pub dim: usize,
    pub classes: usize,
}

impl SyntheticDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    /// Copies the given rows into a new dataset.
    pub fn subset(&self, indices: &[usize]) -> SyntheticDataset {
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        SyntheticDataset {
            features,
            labels,
            dim: self.dim,
            classes: self.classes,
        }
    }

    /// Splits off the trailing `fraction` of rows as a held-out set.
    pub fn split_holdout(&self, fraction: f64) -> Result<(SyntheticDataset, SyntheticDataset)> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::config(
                "workload.holdout_fraction",
                "must lie strictly between 0 and 1",
            ));
        }
        let held = ((self.len() as f64) * fraction).round() as usize;
        if held == 0 || held >= self.len() {
            return Err(Error::config(
                "workload.holdout_fraction",
                format!("leaves an empty split of {} samples", self.len()),
            ));
        }
        let cut = self.len() - held;
        let train: Vec<usize> = (0..cut).collect();
        let test: Vec<usize> = (cut..self.len()).collect();
        Ok((self.subset(&train), self.subset(&test)))
    }
}

/// Gaussian class clusters: class means are drawn from a standard normal and
/// samples scatter around their mean with standard deviation `spread`.
/// Labels are balanced to within one sample and appear in shuffled order.
pub fn generate_dataset<R: Rng + ?Sized>(
    n: usize,
    dim: usize,
    classes: usize,
    spread: f64,
    rng: &mut R,
) -> Result<SyntheticDataset> {
    if classes < 2 {
        return Err(Error::config("workload.classes", "must be at least 2"));
    }
    if n < classes {
        return Err(Error::config(
            "workload.samples",
            format!("must be at least the class count {classes}"),
        ));
    }
    if dim == 0 {
        return Err(Error::config("workload.features", "must be at least 1"));
    }
    if !(spread.is_finite() && spread >= 0.0) {
        return Err(Error::config("workload.cluster_spread", "must be finite and >= 0"));
    }

    let means: Vec<f64> = (0..classes * dim).map(|_| rng.sample(StandardNormal)).collect();
    let mut labels: Vec<usize> = (0..n).map(|i| i % classes).collect();
    labels.shuffle(rng);

    let mut features = Vec::with_capacity(n * dim);
    for &y in &labels {
        for j in 0..dim {
            let noise: f64 = rng.sample(StandardNormal);
            features.push(means[y * dim + j] + spread * noise);
        }
    }
    Ok(SyntheticDataset {
        features,
        labels,
        dim,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn one_sample_per_class() {
        let ds = generate_dataset(10, 3, 10, 1.0, &mut rng(0)).unwrap();
        let mut labels = ds.labels.clone();
        labels.sort_unstable();
        assert_eq!(labels, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn classes_are_balanced() {
        let ds = generate_dataset(1003, 4, 7, 1.0, &mut rng(1)).unwrap();
        let mut counts = [0usize; 7];
        for &y in &ds.labels {
            counts[y] += 1;
        }
        let expected = 1003.0 / 7.0;
        assert!(counts.iter().all(|&c| (c as f64 - expected).abs() <= 1.0));
    }

    #[test]
    fn deterministic_under_seed() {
        let a = generate_dataset(50, 4, 5, 1.0, &mut rng(9)).unwrap();
        let b = generate_dataset(50, 4, 5, 1.0, &mut rng(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn centroid_rule_separates_well_spread_clusters() {
        // Nearest class centroid, fitted on the first 70 rows and scored on the rest.
        let ds = generate_dataset(100, 8, 2, 0.3, &mut rng(5)).unwrap();
        let (train, test) = ds.split_holdout(0.3).unwrap();
        let mut centroids = vec![vec![0.0; 8]; 2];
        let mut counts = [0usize; 2];
        for i in 0..train.len() {
            let y = train.labels[i];
            counts[y] += 1;
            for (c, x) in centroids[y].iter_mut().zip(train.row(i)) {
                *c += x;
            }
        }
        for (c, n) in centroids.iter_mut().zip(counts) {
            c.iter_mut().for_each(|v| *v /= n as f64);
        }
        let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
        let correct = (0..test.len())
            .filter(|&i| {
                let pred = if dist(test.row(i), &centroids[0]) <= dist(test.row(i), &centroids[1]) { 0 } else { 1 };
                pred == test.labels[i]
            })
            .count();
        assert!(correct as f64 / test.len() as f64 >= 0.95);
    }

    #[test]
    fn invalid_dimensions_are_rejected() {
        assert!(generate_dataset(5, 3, 10, 1.0, &mut rng(0)).is_err());
        assert!(generate_dataset(50, 0, 10, 1.0, &mut rng(0)).is_err());
        assert!(generate_dataset(50, 3, 1, 1.0, &mut rng(0)).is_err());
    }
}
