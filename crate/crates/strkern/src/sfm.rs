//! Random Fourier features for the Laplacian kernel
//! `exp(-||x-y||_1 / beta)`.
//!
//! The projection directions are Cauchy(0, 1/beta) samples. The
//! space-efficient map (`sfm_project`) never stores them: direction
//! component (i, j) is recomputed on demand from two seed words per input
//! coordinate, so the whole projector state is `2d` u64 words no matter
//! how large the output dimension D gets. The baseline (`fm_project`)
//! stores the full (D/2) x d matrix and is the memory-hungry reference
//! implementation with fully independent rows.

use crate::features::CharacteristicVector;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

/// Smallest uniform value fed into the inverse CDF; tan() at exactly 0 or
/// 1 would return +-infinity and poison every downstream sum.
const U_CLAMP: f64 = 1.0 / 4294967296.0; // 2^-32

const UMAX32: f64 = 4294967295.0; // 2^32 - 1

/// Selects the projector backend in corpus-level APIs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMode {
    Sfm,
    Fm,
}

// ============================================================================
// Hash-derived projector (constant memory in D)
// ============================================================================

/// The entire stored state of the space-efficient map: two u64 words per
/// input coordinate plus the bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct HashSeeds {
    array1: Vec<u64>,
    array2: Vec<u64>,
    beta: f64,
}

impl HashSeeds {
    /// Draw both arrays uniformly from the full 64-bit range.
    pub fn generate(d: usize, beta: f64, seed: u64) -> Result<Self> {
        check_beta(beta)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let array1 = (0..d).map(|_| rng.random::<u64>()).collect();
        let array2 = (0..d).map(|_| rng.random::<u64>()).collect();
        Ok(Self {
            array1,
            array2,
            beta,
        })
    }

    pub fn from_parts(array1: Vec<u64>, array2: Vec<u64>, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        if array1.len() != array2.len() {
            return Err(Error::DimensionMismatch {
                expected: array1.len(),
                got: array2.len(),
            });
        }
        Ok(Self {
            array1,
            array2,
            beta,
        })
    }

    pub fn d(&self) -> usize {
        self.array1.len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn arrays(&self) -> (&[u64], &[u64]) {
        (&self.array1, &self.array2)
    }

    /// Bytes held by the two seed arrays: exactly 16d, independent of D.
    pub fn storage_bytes(&self) -> usize {
        16 * self.d()
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::BadBandwidth(beta));
    }
    Ok(())
}

fn check_dims(v: &CharacteristicVector, d: usize) -> Result<()> {
    if v.dim() > d as u64 {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: v.dim() as usize,
        });
    }
    Ok(())
}

fn check_d_out(d_out: usize) -> Result<()> {
    if d_out < 2 || d_out % 2 != 0 {
        return Err(Error::BadFeatureDim(d_out));
    }
    Ok(())
}

/// Uniform hash value for feature pair `i` and coordinate `j` (1-based).
///
/// `array1[j] + array2[j]*i` in wrapping 64-bit arithmetic; the top 32
/// bits divided by 2^32-1 give a value in [0,1]. For fixed j, values at
/// distinct i are pairwise independent over the seed draw.
pub fn func_f(i: u64, j: usize, seeds: &HashSeeds) -> Result<f64> {
    if j < 1 || j > seeds.d() {
        return Err(Error::IndexOutOfRange {
            index: j as u64,
            dim: seeds.d() as u64,
        });
    }
    Ok(f_at(i, j - 1, seeds))
}

#[inline]
fn f_at(i: u64, j0: usize, seeds: &HashSeeds) -> f64 {
    let f = seeds.array1[j0].wrapping_add(seeds.array2[j0].wrapping_mul(i));
    (f >> 32) as f64 / UMAX32
}

/// Cauchy(0, 1/beta) sample for feature pair `i` and coordinate `j`
/// (1-based): the inverse CDF applied to [`func_f`].
pub fn func_h(i: u64, j: usize, seeds: &HashSeeds) -> Result<f64> {
    Ok(cauchy_from_uniform(func_f(i, j, seeds)?, seeds.beta))
}

#[inline]
fn cauchy_from_uniform(u: f64, beta: f64) -> f64 {
    let u = u.clamp(U_CLAMP, 1.0 - U_CLAMP);
    (PI * (u - 0.5)).tan() / beta
}

// ============================================================================
// Dense baseline projector (memory proportional to d*D)
// ============================================================================

/// Explicit (D/2) x d matrix of independent Cauchy(0, 1/beta) samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseProjection {
    rows: Vec<f64>, // row-major, one row per feature pair
    d: usize,
    d_out: usize,
    beta: f64,
}

/// Sample the full matrix; memory is 8*d*D/2 bytes.
pub fn sample_dense_projection(d: usize, d_out: usize, beta: f64, seed: u64) -> Result<DenseProjection> {
    check_beta(beta)?;
    check_d_out(d_out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..d * (d_out / 2))
        .map(|_| cauchy_from_uniform(rng.random::<f64>(), beta))
        .collect();
    Ok(DenseProjection {
        rows,
        d,
        d_out,
        beta,
    })
}

impl DenseProjection {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn row(&self, m: usize) -> &[f64] {
        &self.rows[m * self.d..(m + 1) * self.d]
    }

    /// Bytes held by the stored matrix: 8 * d * D/2.
    pub fn storage_bytes(&self) -> usize {
        self.rows.len() * std::mem::size_of::<f64>()
    }
}

// ============================================================================
// Projections
// ============================================================================

/// Dense unit-norm feature vector `z(x)`; even length D, entries bounded
/// by sqrt(2/D) in absolute value.
#[derive(Debug, Clone, PartialEq)]
pub struct RffVector {
    values: Vec<f64>,
}

impl RffVector {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Inner product; panics on dimension mismatch.
    pub fn dot(&self, other: &RffVector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "RFF dimensions differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        check_d_out(values.len())?;
        Ok(Self { values })
    }
}

/// Pack per-pair phase sums into interleaved (sin, cos) coordinates.
///
/// The phase is reduced mod 2*pi before sin/cos so that huge counts do not
/// lose the low-order digits that carry all the signal.
fn pack<F: FnMut(u64) -> f64>(d_out: usize, mut phase: F) -> RffVector {
    let half = d_out / 2;
    let scale = (2.0 / d_out as f64).sqrt();
    let mut values = Vec::with_capacity(d_out);
    for i in 1..=half as u64 {
        let s = phase(i).rem_euclid(TAU);
        values.push(scale * s.sin());
        values.push(scale * s.cos());
    }
    RffVector { values }
}

/// Project one characteristic vector with the hash-derived directions.
///
/// Runs over the nonzeros only: time O(nnz * D), memory O(1) beyond the
/// output.
pub fn sfm_project(v: &CharacteristicVector, d_out: usize, seeds: &HashSeeds) -> Result<RffVector> {
    check_d_out(d_out)?;
    check_dims(v, seeds.d())?;
    let entries = v.entries();
    let beta = seeds.beta;
    Ok(pack(d_out, |i| {
        entries
            .iter()
            .map(|&(j, val)| val * cauchy_from_uniform(f_at(i, j as usize, seeds), beta))
            .sum()
    }))
}

/// Project one characteristic vector with the stored dense matrix.
/// Identical contract to [`sfm_project`]; only the direction source
/// differs.
pub fn fm_project(v: &CharacteristicVector, proj: &DenseProjection) -> Result<RffVector> {
    check_dims(v, proj.d)?;
    let entries = v.entries();
    Ok(pack(proj.d_out, |i| {
        let row = proj.row((i - 1) as usize);
        entries.iter().map(|&(j, val)| val * row[j as usize]).sum()
    }))
}

/// Project a corpus with the hash-derived directions.
pub fn project_corpus(
    vectors: &[CharacteristicVector],
    d_out: usize,
    seeds: &HashSeeds,
) -> Result<Vec<RffVector>> {
    crate::par::map_slice(vectors, |v| sfm_project(v, d_out, seeds))
        .into_iter()
        .collect()
}

/// Sequential variant of [`project_corpus`] with identical output.
pub fn project_corpus_seq(
    vectors: &[CharacteristicVector],
    d_out: usize,
    seeds: &HashSeeds,
) -> Result<Vec<RffVector>> {
    vectors.iter().map(|v| sfm_project(v, d_out, seeds)).collect()
}

/// Project a corpus with the dense baseline.
pub fn project_corpus_fm(
    vectors: &[CharacteristicVector],
    proj: &DenseProjection,
) -> Result<Vec<RffVector>> {
    crate::par::map_slice(vectors, |v| fm_project(v, proj))
        .into_iter()
        .collect()
}

/// Sequential variant of [`project_corpus_fm`] with identical output.
pub fn project_corpus_fm_seq(
    vectors: &[CharacteristicVector],
    proj: &DenseProjection,
) -> Result<Vec<RffVector>> {
    vectors.iter().map(|v| fm_project(v, proj)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeds_with(a1: u64, a2: u64, beta: f64) -> HashSeeds {
        HashSeeds::from_parts(vec![a1], vec![a2], beta).unwrap()
    }

    #[test]
    fn func_f_zero_seeds() {
        let s = seeds_with(0, 0, 1.0);
        assert_eq!(func_f(1, 1, &s).unwrap(), 0.0);
        assert_eq!(func_f(999, 1, &s).unwrap(), 0.0);
    }

    #[test]
    fn func_f_wrapping_midpoint() {
        // 0 + 2^62 * 6 wraps to 2^63; top 32 bits are 2^31
        let s = seeds_with(0, 1u64 << 62, 1.0);
        let u = func_f(6, 1, &s).unwrap();
        assert!((u - 0.5).abs() < 1e-9, "{u}");
    }

    #[test]
    fn func_f_is_deterministic_and_checks_range() {
        let s = HashSeeds::generate(4, 1.0, 7).unwrap();
        assert_eq!(func_f(3, 2, &s).unwrap(), func_f(3, 2, &s).unwrap());
        assert!(matches!(
            func_f(1, 0, &s),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            func_f(1, 5, &s),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn inverse_cdf_reference_points() {
        assert_eq!(cauchy_from_uniform(0.5, 1.0), 0.0);
        assert!((cauchy_from_uniform(0.75, 1.0) - 1.0).abs() < 1e-12);
        // tan(0.4*pi)/2
        assert!((cauchy_from_uniform(0.9, 2.0) - 1.5388417685876266).abs() < 1e-9);
        // clamping keeps the tails finite
        assert!(cauchy_from_uniform(0.0, 1.0).is_finite());
        assert!(cauchy_from_uniform(1.0, 1.0).is_finite());
        assert!(cauchy_from_uniform(0.0, 1.0) < -1e8);
        assert!(cauchy_from_uniform(1.0, 1.0) > 1e8);
    }

    #[test]
    fn func_h_applies_inverse_cdf_to_func_f() {
        // u = 0.75 up to grid rounding: top bits 3*2^30 over 2^32-1
        let s = seeds_with(3 << 62, 0, 1.0);
        let h = func_h(1, 1, &s).unwrap();
        assert!((h - 1.0).abs() < 1e-6, "{h}");
        // beta rescales
        let s2 = seeds_with(3 << 62, 0, 2.0);
        assert!((func_h(1, 1, &s2).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn empty_vector_projects_to_alternating_pattern() {
        let v = CharacteristicVector::from_sorted(vec![], 1).unwrap();
        let s = HashSeeds::generate(1, 1.0, 3).unwrap();
        let z = sfm_project(&v, 8, &s).unwrap();
        let c = (2.0f64 / 8.0).sqrt();
        for pair in z.values().chunks(2) {
            assert_eq!(pair[0], 0.0);
            assert_eq!(pair[1], c);
        }
        assert!((z.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_coordinate_projection_matches_hand_formula() {
        let s = HashSeeds::generate(1, 1.0, 11).unwrap();
        let v = CharacteristicVector::from_sorted(vec![(0, 2.0)], 1).unwrap();
        let z = sfm_project(&v, 4, &s).unwrap();
        let scale = (2.0f64 / 4.0).sqrt();
        for i in 1..=2u64 {
            let phase = (2.0 * func_h(i, 1, &s).unwrap()).rem_euclid(TAU);
            assert_eq!(z.values()[(2 * i - 2) as usize], scale * phase.sin());
            assert_eq!(z.values()[(2 * i - 1) as usize], scale * phase.cos());
        }
    }

    #[test]
    fn self_kernel_is_one() {
        let s = HashSeeds::generate(6, 2.5, 99).unwrap();
        let v =
            CharacteristicVector::from_sorted(vec![(0, 3.0), (2, 1.0), (5, 7.0)], 6).unwrap();
        for d_out in [2, 64, 130] {
            let z = sfm_project(&v, d_out, &s).unwrap();
            assert!((z.dot(&z) - 1.0).abs() < 1e-9);
            assert!((z.norm() - 1.0).abs() < 1e-9);
            let bound = (2.0 / d_out as f64).sqrt() + 1e-12;
            assert!(z.values().iter().all(|x| x.abs() <= bound));
        }
    }

    #[test]
    fn rejects_odd_or_tiny_output_dimension() {
        let s = HashSeeds::generate(2, 1.0, 1).unwrap();
        let v = CharacteristicVector::from_sorted(vec![(0, 1.0)], 1).unwrap();
        assert!(matches!(
            sfm_project(&v, 7, &s),
            Err(Error::BadFeatureDim(7))
        ));
        assert!(matches!(
            sfm_project(&v, 0, &s),
            Err(Error::BadFeatureDim(0))
        ));
    }

    #[test]
    fn rejects_vector_wider_than_seeds() {
        let s = HashSeeds::generate(2, 1.0, 1).unwrap();
        let v = CharacteristicVector::from_sorted(vec![(2, 1.0)], 3).unwrap();
        assert!(matches!(
            sfm_project(&v, 4, &s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_bad_bandwidth() {
        assert!(matches!(
            HashSeeds::generate(2, 0.0, 1),
            Err(Error::BadBandwidth(_))
        ));
        assert!(matches!(
            HashSeeds::generate(2, -1.0, 1),
            Err(Error::BadBandwidth(_))
        ));
        assert!(matches!(
            sample_dense_projection(2, 4, f64::NAN, 1),
            Err(Error::BadBandwidth(_))
        ));
    }

    #[test]
    fn fm_matches_sfm_contract_on_self_kernel() {
        let proj = sample_dense_projection(5, 16, 1.0, 4).unwrap();
        let v =
            CharacteristicVector::from_sorted(vec![(1, 2.0), (4, 1.0)], 5).unwrap();
        let z = fm_project(&v, &proj).unwrap();
        assert!((z.dot(&z) - 1.0).abs() < 1e-9);
        assert_eq!(z.dim(), 16);
    }

    #[test]
    fn dense_sampling_is_reproducible_and_beta_scales() {
        let a = sample_dense_projection(3, 8, 1.0, 21).unwrap();
        let b = sample_dense_projection(3, 8, 1.0, 21).unwrap();
        assert_eq!(a, b);
        let wide = sample_dense_projection(3, 8, 1e12, 21).unwrap();
        assert!(wide.rows.iter().all(|x| x.abs() < 1e-2));
    }

    #[test]
    fn storage_ratio_is_a_quarter_of_d_out() {
        let d = 37;
        let d_out = 64;
        let seeds = HashSeeds::generate(d, 1.0, 1).unwrap();
        let dense = sample_dense_projection(d, d_out, 1.0, 1).unwrap();
        assert_eq!(seeds.storage_bytes(), 16 * d);
        assert_eq!(dense.storage_bytes() / seeds.storage_bytes(), d_out / 4);
    }

    #[test]
    fn corpus_projection_matches_sequential() {
        let seeds = HashSeeds::generate(6, 1.0, 13).unwrap();
        let vs: Vec<_> = (0..5)
            .map(|k| {
                CharacteristicVector::from_sorted(vec![(k as u64, 1.0 + k as f64)], 6).unwrap()
            })
            .collect();
        assert_eq!(
            project_corpus(&vs, 8, &seeds).unwrap(),
            project_corpus_seq(&vs, 8, &seeds).unwrap()
        );
        let dense = sample_dense_projection(6, 8, 1.0, 14).unwrap();
        assert_eq!(
            project_corpus_fm(&vs, &dense).unwrap(),
            project_corpus_fm_seq(&vs, &dense).unwrap()
        );
    }
}
