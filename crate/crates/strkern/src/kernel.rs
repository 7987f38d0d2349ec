//! Exact kernels, distances, the brute-force move-distance oracle, and the
//! approximation-error metrics.

use crate::features::CharacteristicVector;
use crate::seed;
use crate::sfm::{self, HashSeeds, RffVector};
use crate::{Error, Result};
use std::collections::{HashMap, VecDeque};

/// Sum of |a_f - b_f| over the union of supports, by a merge walk over the
/// two sorted entry lists.
pub fn l1_distance(a: &CharacteristicVector, b: &CharacteristicVector) -> f64 {
    let (ea, eb) = (a.entries(), b.entries());
    let mut ia = 0;
    let mut ib = 0;
    let mut sum = 0.0;
    while ia < ea.len() && ib < eb.len() {
        let (ja, va) = ea[ia];
        let (jb, vb) = eb[ib];
        if ja == jb {
            sum += (va - vb).abs();
            ia += 1;
            ib += 1;
        } else if ja < jb {
            sum += va;
            ia += 1;
        } else {
            sum += vb;
            ib += 1;
        }
    }
    sum += ea[ia..].iter().map(|&(_, v)| v).sum::<f64>();
    sum += eb[ib..].iter().map(|&(_, v)| v).sum::<f64>();
    sum
}

/// `exp(-l1_distance(a, b) / beta)`.
pub fn laplacian_kernel(a: &CharacteristicVector, b: &CharacteristicVector, beta: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::BadBandwidth(beta));
    }
    Ok((-l1_distance(a, b) / beta).exp())
}

// ============================================================================
// Gram matrices
// ============================================================================

/// How a Gram matrix was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramSource {
    Exact,
    Sfm,
    Fm,
}

impl GramSource {
    pub fn as_str(self) -> &'static str {
        match self {
            GramSource::Exact => "exact",
            GramSource::Sfm => "sfm",
            GramSource::Fm => "fm",
        }
    }
}

/// Symmetric N x N kernel matrix with its bandwidth and provenance tag.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    beta: f64,
    source: GramSource,
    data: Vec<f64>, // row-major, n*n
}

impl GramMatrix {
    pub fn from_data(n: usize, beta: f64, source: GramSource, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self {
            n,
            beta,
            source,
            data,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn source(&self) -> GramSource {
        self.source
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n)
    }
}

/// Exact Laplacian Gram matrix. Rows are computed independently, so the
/// parallel and sequential paths agree bit-for-bit.
pub fn exact_gram(vectors: &[CharacteristicVector], beta: f64) -> Result<GramMatrix> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::BadBandwidth(beta));
    }
    let n = vectors.len();
    let rows = crate::par::map_indices(n, |i| {
        (0..n)
            .map(|j| (-l1_distance(&vectors[i], &vectors[j]) / beta).exp())
            .collect::<Vec<f64>>()
    });
    GramMatrix::from_data(n, beta, GramSource::Exact, rows.concat())
}

/// Sequential variant of [`exact_gram`] with identical output.
pub fn exact_gram_seq(vectors: &[CharacteristicVector], beta: f64) -> Result<GramMatrix> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::BadBandwidth(beta));
    }
    let n = vectors.len();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            data.push((-l1_distance(&vectors[i], &vectors[j]) / beta).exp());
        }
    }
    GramMatrix::from_data(n, beta, GramSource::Exact, data)
}

/// Gram matrix of inner products between feature vectors.
pub fn rff_gram(zs: &[RffVector], beta: f64, source: GramSource) -> Result<GramMatrix> {
    let n = zs.len();
    let rows = crate::par::map_indices(n, |i| {
        (0..n).map(|j| zs[i].dot(&zs[j])).collect::<Vec<f64>>()
    });
    GramMatrix::from_data(n, beta, source, rows.concat())
}

// ============================================================================
// Approximation-error metrics
// ============================================================================

/// Mean absolute deviation between the exact kernel and the feature-space
/// inner product over all unordered pairs, diagonal included:
/// sum_{i<=j} |k(i,j) - z_i'z_j| / (N(N+1)/2).
pub fn average_error(exact: &GramMatrix, features: &[RffVector]) -> Result<f64> {
    let n = exact.n();
    if features.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: features.len(),
        });
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let sums = crate::par::map_indices(n, |i| {
        (i..n)
            .map(|j| (exact.get(i, j) - features[i].dot(&features[j])).abs())
            .sum::<f64>()
    });
    let pairs = (n * (n + 1) / 2) as f64;
    Ok(sums.iter().sum::<f64>() / pairs)
}

/// Mean and population standard deviation.
pub fn error_stats(values: &[f64]) -> (f64, f64) {
    assert!(!values.is_empty(), "no values");
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// One line of a concentration experiment: how often the approximation
/// missed the exact kernel by more than epsilon, against the distribution-
/// free tail bound 2/(eps^2 D).
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationRow {
    pub d_out: usize,
    pub epsilon: f64,
    pub tail: f64,
    pub bound: f64,
}

/// Empirical tail probabilities of |k(x,y) - z(x)'z(y)| over independent
/// redraws of the hash seeds.
///
/// Each trial derives its own seed, so the result is independent of thread
/// count and the exceedance counts are exact integers.
pub fn concentration_report(
    x: &CharacteristicVector,
    y: &CharacteristicVector,
    beta: f64,
    d_list: &[usize],
    eps_list: &[f64],
    trials: usize,
    master_seed: u64,
) -> Result<Vec<ConcentrationRow>> {
    if trials < 1_000 {
        return Err(Error::InvalidArgument(format!(
            "need at least 1000 trials for a meaningful tail estimate, got {trials}"
        )));
    }
    let k = laplacian_kernel(x, y, beta)?;
    let d = x.dim().max(y.dim()) as usize;
    let mut rows = Vec::with_capacity(d_list.len() * eps_list.len());
    for &d_out in d_list {
        let errs = crate::par::map_indices(trials, |t| -> Result<f64> {
            let s = seed::derive_indexed(master_seed, "concentration-trial", t as u64);
            let seeds = HashSeeds::generate(d, beta, s)?;
            let zx = sfm::sfm_project(x, d_out, &seeds)?;
            let zy = sfm::sfm_project(y, d_out, &seeds)?;
            Ok((k - zx.dot(&zy)).abs())
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
        for &epsilon in eps_list {
            let exceed = errs.iter().filter(|&&e| e > epsilon).count();
            rows.push(ConcentrationRow {
                d_out,
                epsilon,
                tail: exceed as f64 / trials as f64,
                bound: 2.0 / (epsilon * epsilon * d_out as f64),
            });
        }
    }
    Ok(rows)
}

// ============================================================================
// Brute-force move-distance oracle
// ============================================================================

/// Exact edit distance with substring moves, by breadth-first search over
/// the space of strings of length <= max_len+1.
///
/// One operation is a single-character insertion, deletion, or
/// replacement, or the relocation of any contiguous substring to another
/// position (counted once regardless of length). The search space is
/// exponential, so the inputs are deliberately fenced: lengths <= max_len
/// (itself capped at 8) and at most 3 distinct characters.
///
/// `alphabet: None` restricts the search to characters occurring in the
/// inputs; a character neither string contains can never shorten an
/// optimal sequence. Passing `Some` widens the space for stress checks.
pub fn edm_exact(
    s1: &[u8],
    s2: &[u8],
    alphabet: Option<&[u8]>,
    max_len: usize,
    max_depth: usize,
) -> Result<u64> {
    if max_len > 8 {
        return Err(Error::OracleBounds(format!(
            "max_len {max_len} exceeds the oracle fence of 8"
        )));
    }
    if s1.len() > max_len || s2.len() > max_len {
        return Err(Error::OracleBounds(format!(
            "input lengths {} and {} exceed max_len {max_len}",
            s1.len(),
            s2.len()
        )));
    }
    let mut sigma: Vec<u8> = match alphabet {
        Some(a) => a.to_vec(),
        None => s1.iter().chain(s2.iter()).copied().collect(),
    };
    sigma.sort_unstable();
    sigma.dedup();
    if sigma.len() > 3 {
        return Err(Error::OracleBounds(format!(
            "alphabet size {} exceeds the oracle fence of 3",
            sigma.len()
        )));
    }
    for &c in s1.iter().chain(s2.iter()) {
        if !sigma.contains(&c) {
            return Err(Error::InvalidArgument(format!(
                "alphabet does not cover input byte {c:#04x}"
            )));
        }
    }
    if s1 == s2 {
        return Ok(0);
    }

    let cap = max_len + 1;
    let mut dist: HashMap<Vec<u8>, u64> = HashMap::new();
    let mut queue: VecDeque<Vec<u8>> = VecDeque::new();
    dist.insert(s1.to_vec(), 0);
    queue.push_back(s1.to_vec());
    while let Some(s) = queue.pop_front() {
        let depth = dist[&s];
        if depth as usize >= max_depth {
            break;
        }
        for next in neighbors(&s, &sigma, cap) {
            if next == s2 {
                return Ok(depth + 1);
            }
            if !dist.contains_key(&next) {
                dist.insert(next.clone(), depth + 1);
                queue.push_back(next);
            }
        }
    }
    Err(Error::DepthExhausted(max_depth))
}

/// All strings one operation away, length-capped.
fn neighbors(s: &[u8], sigma: &[u8], cap: usize) -> Vec<Vec<u8>> {
    let n = s.len();
    let mut out = Vec::new();
    // insertions
    if n + 1 <= cap {
        for pos in 0..=n {
            for &c in sigma {
                let mut t = Vec::with_capacity(n + 1);
                t.extend_from_slice(&s[..pos]);
                t.push(c);
                t.extend_from_slice(&s[pos..]);
                out.push(t);
            }
        }
    }
    // deletions
    for pos in 0..n {
        let mut t = s.to_vec();
        t.remove(pos);
        out.push(t);
    }
    // replacements
    for pos in 0..n {
        for &c in sigma {
            if c != s[pos] {
                let mut t = s.to_vec();
                t[pos] = c;
                out.push(t);
            }
        }
    }
    // substring moves: lift s[i..j], reinsert at position k of the rest
    for i in 0..n {
        for j in i + 1..=n {
            let sub = &s[i..j];
            let mut rest = Vec::with_capacity(n - (j - i));
            rest.extend_from_slice(&s[..i]);
            rest.extend_from_slice(&s[j..]);
            for k in 0..=rest.len() {
                let mut t = Vec::with_capacity(n);
                t.extend_from_slice(&rest[..k]);
                t.extend_from_slice(sub);
                t.extend_from_slice(&rest[k..]);
                if t != s {
                    out.push(t);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::esp::{build_esp_tree, characteristic_vector, LabelDictionary};

    fn cv(entries: Vec<(u64, f64)>, dim: u64) -> CharacteristicVector {
        CharacteristicVector::from_sorted(entries, dim).unwrap()
    }

    #[test]
    fn l1_of_identical_vectors_is_zero() {
        let a = cv(vec![(0, 2.0), (3, 1.0)], 4);
        assert_eq!(l1_distance(&a, &a), 0.0);
    }

    #[test]
    fn l1_disjoint_support() {
        let a = cv(vec![(1, 1.0), (2, 1.0)], 4);
        let b = cv(vec![(2, 1.0), (3, 1.0)], 4);
        assert_eq!(l1_distance(&a, &b), 2.0);
        assert_eq!(l1_distance(&b, &a), 2.0);
    }

    #[test]
    fn l1_between_parse_tree_vectors() {
        let mut dict = LabelDictionary::new(b"AB".to_vec());
        let va = characteristic_vector(&build_esp_tree(b"AB", &mut dict).unwrap(), &dict);
        let vb = characteristic_vector(&build_esp_tree(b"ABAB", &mut dict).unwrap(), &dict);
        let (va, vb) = (
            cv(va.entries().to_vec(), dict.len() as u64),
            cv(vb.entries().to_vec(), dict.len() as u64),
        );
        assert_eq!(l1_distance(&va, &vb), 4.0);
    }

    #[test]
    fn laplacian_reference_values() {
        let a = cv(vec![(0, 1.0)], 2);
        let b = cv(vec![(1, 1.0)], 2);
        assert_eq!(laplacian_kernel(&a, &a, 5.0).unwrap(), 1.0);
        // l1 = 2 here, so beta = 2 gives e^-1
        assert!((laplacian_kernel(&a, &b, 2.0).unwrap() - 0.367879).abs() < 1e-6);
        // l1 = 4 with beta = 2 gives e^-2
        let c = cv(vec![(0, 3.0), (1, 2.0)], 2);
        assert_eq!(l1_distance(&a, &c), 4.0);
        assert!((laplacian_kernel(&a, &c, 2.0).unwrap() - 0.135335).abs() < 1e-6);
    }

    #[test]
    fn laplacian_rejects_nonpositive_bandwidth() {
        let a = cv(vec![(0, 1.0)], 1);
        assert!(matches!(
            laplacian_kernel(&a, &a, 0.0),
            Err(Error::BadBandwidth(_))
        ));
        assert!(matches!(
            laplacian_kernel(&a, &a, -3.0),
            Err(Error::BadBandwidth(_))
        ));
    }

    #[test]
    fn laplacian_decreases_with_distance() {
        let base = cv(vec![(0, 1.0)], 3);
        let near = cv(vec![(0, 2.0)], 3);
        let far = cv(vec![(0, 4.0)], 3);
        let k0 = laplacian_kernel(&base, &base, 1.5).unwrap();
        let k1 = laplacian_kernel(&base, &near, 1.5).unwrap();
        let k2 = laplacian_kernel(&base, &far, 1.5).unwrap();
        assert!(k0 > k1 && k1 > k2);
    }

    // ------------------------------------------------------------------
    // oracle
    // ------------------------------------------------------------------

    #[test]
    fn oracle_identity_and_single_ops() {
        assert_eq!(edm_exact(b"x", b"x", None, 6, 16).unwrap(), 0);
        assert_eq!(edm_exact(b"A", b"", None, 6, 16).unwrap(), 1);
        assert_eq!(edm_exact(b"", b"A", None, 6, 16).unwrap(), 1);
        assert_eq!(edm_exact(b"A", b"B", None, 6, 16).unwrap(), 1);
    }

    #[test]
    fn oracle_counts_a_substring_move_as_one() {
        assert_eq!(edm_exact(b"AAB", b"BAA", None, 6, 16).unwrap(), 1);
        assert_eq!(edm_exact(b"ABAB", b"BABA", None, 6, 16).unwrap(), 1);
        assert_eq!(edm_exact(b"ABC", b"CAB", None, 6, 16).unwrap(), 1);
    }

    #[test]
    fn oracle_known_distances() {
        assert_eq!(edm_exact(b"AB", b"", None, 6, 16).unwrap(), 2);
        assert_eq!(edm_exact(b"AAAA", b"BBBB", None, 6, 16).unwrap(), 4);
        assert_eq!(edm_exact(b"AB", b"BA", None, 6, 16).unwrap(), 1);
    }

    #[test]
    fn oracle_is_symmetric_on_samples() {
        let samples: [&[u8]; 4] = [b"", b"A", b"ABB", b"BABA"];
        for a in samples {
            for b in samples {
                assert_eq!(
                    edm_exact(a, b, None, 6, 16).unwrap(),
                    edm_exact(b, a, None, 6, 16).unwrap()
                );
            }
        }
    }

    #[test]
    fn oracle_refuses_out_of_bounds_work() {
        assert!(matches!(
            edm_exact(b"AAAAAAA", b"A", None, 6, 16),
            Err(Error::OracleBounds(_))
        ));
        assert!(matches!(
            edm_exact(b"A", b"A", None, 9, 16),
            Err(Error::OracleBounds(_))
        ));
        assert!(matches!(
            edm_exact(b"ABCD", b"A", None, 6, 16),
            Err(Error::OracleBounds(_))
        ));
        assert!(matches!(
            edm_exact(b"AB", b"BA", Some(b"B"), 6, 16),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            edm_exact(b"AB", b"BA", None, 6, 0),
            Err(Error::DepthExhausted(0))
        ));
    }

    // ------------------------------------------------------------------
    // gram and error metrics
    // ------------------------------------------------------------------

    fn small_corpus() -> Vec<CharacteristicVector> {
        vec![
            cv(vec![(0, 1.0)], 3),
            cv(vec![(0, 1.0), (1, 2.0)], 3),
            cv(vec![(2, 5.0)], 3),
        ]
    }

    #[test]
    fn exact_gram_is_symmetric_with_unit_diagonal() {
        let g = exact_gram(&small_corpus(), 2.0).unwrap();
        assert_eq!(g.n(), 3);
        for i in 0..3 {
            assert_eq!(g.get(i, i), 1.0);
            for j in 0..3 {
                assert_eq!(g.get(i, j), g.get(j, i));
                assert!(g.get(i, j) > 0.0 && g.get(i, j) <= 1.0);
            }
        }
    }

    #[test]
    fn parallel_and_sequential_gram_agree_exactly() {
        let vs = small_corpus();
        assert_eq!(exact_gram(&vs, 1.5).unwrap(), exact_gram_seq(&vs, 1.5).unwrap());
    }

    #[test]
    fn average_error_vanishes_for_identical_strings() {
        let vs = vec![cv(vec![(0, 2.0)], 1); 4];
        let g = exact_gram(&vs, 1.0).unwrap();
        let seeds = HashSeeds::generate(1, 1.0, 5).unwrap();
        let zs = sfm::project_corpus(&vs, 16, &seeds).unwrap();
        assert!(average_error(&g, &zs).unwrap() < 1e-12);
    }

    #[test]
    fn average_error_checks_sizes() {
        let vs = small_corpus();
        let g = exact_gram(&vs, 1.0).unwrap();
        let seeds = HashSeeds::generate(3, 1.0, 5).unwrap();
        let zs = sfm::project_corpus(&vs[..2], 8, &seeds).unwrap();
        assert!(matches!(
            average_error(&g, &zs),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn error_stats_frozen_example() {
        let (mean, std) = error_stats(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(mean, 2.5);
        assert!((std - 1.25f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rff_gram_matches_pairwise_dots() {
        let vs = small_corpus();
        let seeds = HashSeeds::generate(3, 1.0, 9).unwrap();
        let zs = sfm::project_corpus(&vs, 8, &seeds).unwrap();
        let g = rff_gram(&zs, 1.0, GramSource::Sfm).unwrap();
        assert_eq!(g.source(), GramSource::Sfm);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g.get(i, j), zs[i].dot(&zs[j]));
            }
        }
    }

    #[test]
    fn concentration_respects_vacuous_bounds_and_determinism() {
        let x = cv(vec![(0, 1.0)], 2);
        let y = cv(vec![(1, 1.0)], 2);
        let rows =
            concentration_report(&x, &y, 1.0, &[2], &[0.2], 1_000, 42).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].bound >= 1.0);
        assert!(rows[0].tail <= rows[0].bound);
        let again =
            concentration_report(&x, &y, 1.0, &[2], &[0.2], 1_000, 42).unwrap();
        assert_eq!(rows, again);
    }

    #[test]
    fn concentration_requires_enough_trials() {
        let x = cv(vec![(0, 1.0)], 1);
        assert!(matches!(
            concentration_report(&x, &x, 1.0, &[2], &[0.1], 10, 1),
            Err(Error::InvalidArgument(_))
        ));
    }
}
