use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::dataset::DataMatrix;
use crate::error::{Error, Result};
use crate::labeling::ClusterLabeling;
use crate::rng::stream;

const OUTER_RADIUS: f64 = 1.0;
const INNER_RADIUS: f64 = 0.4;
const CIRCLE_NOISE_SCALE: f64 = 0.1;

/// Minimum center separation, in units of the largest blob standard deviation
/// times `sqrt(max(1, dims / 3))`.
pub const BLOB_SEPARATION_FACTOR: f64 = 10.0;

/// Two concentric rings of `n / 2` points each, radii 1.0 and 0.4, with
/// Gaussian radial noise of standard deviation `0.1 * noise`.
/// Label 0 is the outer ring.
pub fn generate_circles(n: usize, noise: f64, seed: u64) -> Result<(DataMatrix, ClusterLabeling)> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::Domain(format!("circles need an even, positive n, got {n}")));
    }
    if noise < 0.0 {
        return Err(Error::Domain(format!("noise must be nonnegative, got {noise}")));
    }
    let mut rng = stream(seed, &[0xC1C1E5]);
    let half = n / 2;
    let mut values = DMatrix::zeros(n, 2);
    let mut raw = vec![0usize; n];
    for idx in 0..n {
        let ring = usize::from(idx >= half);
        let k = idx - ring * half;
        let radius = if ring == 0 { OUTER_RADIUS } else { INNER_RADIUS };
        let angle = 2.0 * std::f64::consts::PI * k as f64 / half as f64;
        let eps: f64 = rng.sample(StandardNormal);
        let r = radius + CIRCLE_NOISE_SCALE * noise * eps;
        values[(idx, 0)] = r * angle.cos();
        values[(idx, 1)] = r * angle.sin();
        raw[idx] = ring;
    }
    let mut data = DataMatrix::from_values(values);
    data.col_ids = vec!["x".into(), "y".into()];
    Ok((data, ClusterLabeling::from_raw(&raw)))
}

/// Isotropic Gaussian blobs, one per entry of `sigmas`. Sizes differ by at
/// most one; the first `n % k` blobs get the extra points.
///
/// Centers lie on a sphere and are redrawn until every pair is at least
/// `BLOB_SEPARATION_FACTOR * max(sigma) * sqrt(max(1, dims / 3))` apart, so
/// the gap keeps pace with the growth of within-blob distances in high
/// dimension.
pub fn generate_blobs(
    n: usize,
    dims: usize,
    sigmas: &[f64],
    seed: u64,
) -> Result<(DataMatrix, ClusterLabeling)> {
    let k = sigmas.len();
    if k == 0 || n < k {
        return Err(Error::Domain(format!(
            "need at least one point per blob: n = {n}, blobs = {k}"
        )));
    }
    if dims < 2 {
        return Err(Error::Domain(format!("blobs need dims >= 2, got {dims}")));
    }
    if sigmas.iter().any(|&s| !(s >= 0.0)) {
        return Err(Error::Domain("sigmas must be nonnegative".into()));
    }
    let max_sigma = sigmas.iter().copied().fold(0.0, f64::max);
    let separation = BLOB_SEPARATION_FACTOR * max_sigma * (dims as f64 / 3.0).max(1.0).sqrt();
    // On a sphere of radius R, antipodal-ish placement gives separations
    // close to R * sqrt(2); R = separation makes rejection rare.
    let radius = separation.max(f64::MIN_POSITIVE);

    let mut rng = stream(seed, &[0xB10B5]);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut attempts = 0usize;
    while centers.len() < k {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::Domain("could not place separated blob centers".into()));
        }
        let mut v: Vec<f64> = (0..dims).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x *= radius / norm);
        let far_enough = centers.iter().all(|c| {
            c.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() >= separation
        });
        if far_enough {
            centers.push(v);
        }
    }

    let mut values = DMatrix::zeros(n, dims);
    let mut raw = Vec::with_capacity(n);
    for (b, (center, &sigma)) in centers.iter().zip(sigmas).enumerate() {
        let noise = Normal::new(0.0, sigma).map_err(|e| Error::Domain(e.to_string()))?;
        let size = n / k + usize::from(b < n % k);
        for _ in 0..size {
            let row = raw.len();
            for (c, &mu) in center.iter().enumerate() {
                values[(row, c)] = mu + noise.sample(&mut rng);
            }
            raw.push(b);
        }
    }
    Ok((DataMatrix::from_values(values), ClusterLabeling::from_raw(&raw)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_circles_sit_on_two_radii() {
        let (data, labels) = generate_circles(40, 0.0, 3).unwrap();
        for i in 0..40 {
            let r = (data.values[(i, 0)].powi(2) + data.values[(i, 1)].powi(2)).sqrt();
            let expected = if labels.label(i) == 0 { 1.0 } else { 0.4 };
            assert!((r - expected).abs() < 1e-12);
        }
        assert_eq!(labels.sizes(), vec![20, 20]);
    }

    #[test]
    fn odd_circle_count_rejected() {
        assert!(generate_circles(5, 0.5, 0).is_err());
    }

    #[test]
    fn blob_sizes_and_separation() {
        let (data, labels) = generate_blobs(500, 3, &[0.25, 0.5, 1.0], 7).unwrap();
        assert_eq!(labels.sizes(), vec![167, 167, 166]);
        assert_eq!(data.values.shape(), (500, 3));
        assert!(generate_blobs(2, 3, &[0.25, 0.5, 1.0], 7).is_err());
    }

    #[test]
    fn zero_sigma_collapses_blobs() {
        let (data, _) = generate_blobs(6, 4, &[0.0, 0.0], 1).unwrap();
        for j in 0..4 {
            assert_eq!(data.values[(0, j)], data.values[(2, j)]);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let a = generate_blobs(30, 5, &[1.0, 2.0, 3.0], 11).unwrap();
        let b = generate_blobs(30, 5, &[1.0, 2.0, 3.0], 11).unwrap();
        assert_eq!(a, b);
    }
}
