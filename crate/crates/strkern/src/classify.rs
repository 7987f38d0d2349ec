//! Linear classification and ranking quality on top of the dense feature
//! vectors: an L2-regularized hinge-loss model fit by seeded stochastic
//! subgradient descent, rank-based AUC, and a small cross-validation
//! driver over the (bandwidth, regularization) grid.

use crate::features::CharacteristicVector;
use crate::seed;
use crate::sfm::{self, ProjectionMode, RffVector};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Bandwidth grid used when the caller does not supply one.
pub const DEFAULT_BETA_GRID: [f64; 5] = [1.0, 10.0, 100.0, 1000.0, 10000.0];

/// Regularization grid used when the caller does not supply one.
pub const DEFAULT_C_GRID: [f64; 6] = [0.001, 0.01, 0.1, 1.0, 10.0, 100.0];

/// Hyperparameters recorded at training time.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainMeta {
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
}

/// Affine decision function `w . z + bias`. Labels are 0/1; label 1 is
/// the positive (decision > 0) side.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    weights: Vec<f64>,
    bias: f64,
    meta: Option<TrainMeta>,
    objectives: Vec<f64>,
}

impl LinearModel {
    /// Rebuild a model from persisted parts; training metadata is gone.
    pub fn from_parts(weights: Vec<f64>, bias: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "model coefficients must be finite".into(),
            ));
        }
        Ok(Self {
            weights,
            bias,
            meta: None,
            objectives: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn meta(&self) -> Option<&TrainMeta> {
        self.meta.as_ref()
    }

    /// Regularized objective after each training epoch.
    pub fn objectives(&self) -> &[f64] {
        &self.objectives
    }

    pub fn decision(&self, z: &[f64]) -> f64 {
        assert_eq!(z.len(), self.dim(), "feature dimension mismatch");
        self.weights.iter().zip(z).map(|(w, x)| w * x).sum::<f64>() + self.bias
    }
}

fn check_labels(labels: &[u8]) -> Result<()> {
    if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
        return Err(Error::InvalidArgument(format!(
            "labels must be 0 or 1, got {bad}"
        )));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Fit by stochastic subgradient descent on the hinge loss with L2
/// penalty lambda = 1/(C*N) and step size 1/(lambda*t).
///
/// The bias rides along as one extra regularized coordinate with constant
/// input 1, so a single shrink-then-correct update covers both. Sample
/// order is reshuffled every epoch from the seed, making the fit a pure
/// function of (data order, seed).
pub fn train_linear<F: AsRef<[f64]>>(
    features: &[F],
    labels: &[u8],
    c: f64,
    epochs: usize,
    train_seed: u64,
) -> Result<LinearModel> {
    let n = features.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    check_labels(labels)?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "regularization C must be positive and finite, got {c}"
        )));
    }
    if epochs == 0 {
        return Err(Error::InvalidArgument("epochs must be at least 1".into()));
    }
    let d = features[0].as_ref().len();
    for f in features {
        if f.as_ref().len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: f.as_ref().len(),
            });
        }
    }

    let lambda = 1.0 / (c * n as f64);
    let mut w = vec![0.0f64; d + 1]; // last slot is the bias coordinate
    let mut order: Vec<usize> = (0..n).collect();
    let mut objectives = Vec::with_capacity(epochs);
    let mut t = 0u64;
    for epoch in 0..epochs {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed::derive_indexed(train_seed, "epoch", epoch as u64));
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let x = features[i].as_ref();
            let y = if labels[i] == 1 { 1.0 } else { -1.0 };
            let margin = y * (dot(&w[..d], x) + w[d]);
            // shrink step: w *= 1 - eta*lambda = 1 - 1/t
            let shrink = 1.0 - 1.0 / t as f64;
            for wj in w.iter_mut() {
                *wj *= shrink;
            }
            if margin < 1.0 {
                let eta = 1.0 / (lambda * t as f64);
                for (wj, xj) in w[..d].iter_mut().zip(x) {
                    *wj += eta * y * xj;
                }
                w[d] += eta * y;
            }
        }
        objectives.push(objective(&w, features, labels, lambda));
    }

    let bias = w[d];
    w.truncate(d);
    Ok(LinearModel {
        weights: w,
        bias,
        meta: Some(TrainMeta {
            c,
            epochs,
            seed: train_seed,
        }),
        objectives,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn objective<F: AsRef<[f64]>>(w: &[f64], features: &[F], labels: &[u8], lambda: f64) -> f64 {
    let d = w.len() - 1;
    let reg = 0.5 * lambda * dot(w, w);
    let hinge: f64 = features
        .iter()
        .zip(labels)
        .map(|(f, &l)| {
            let y = if l == 1 { 1.0 } else { -1.0 };
            (1.0 - y * (dot(&w[..d], f.as_ref()) + w[d])).max(0.0)
        })
        .sum();
    reg + hinge / features.len() as f64
}

/// Fraction of samples whose decision sign matches the label.
pub fn accuracy(model: &LinearModel, features: &[impl AsRef<[f64]>], labels: &[u8]) -> f64 {
    let hits = features
        .iter()
        .zip(labels)
        .filter(|(f, &l)| (model.decision(f.as_ref()) > 0.0) == (l == 1))
        .count();
    hits as f64 / features.len() as f64
}

// ============================================================================
// Ranking quality
// ============================================================================

/// Area under the ROC curve via the rank-sum statistic; tied scores count
/// half. 1.0 means every positive outscores every negative.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: scores.len(),
            got: labels.len(),
        });
    }
    check_labels(labels)?;
    let n = scores.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("NaN score"));

    // average ranks across tie groups, 1-based
    let mut ranks = vec![0.0f64; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && scores[idx[end]] == scores[idx[start]] {
            end += 1;
        }
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }

    let n_pos = labels.iter().filter(|&&l| l == 1).count() as f64;
    let n_neg = n as f64 - n_pos;
    let rank_sum: f64 = ranks
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 1)
        .map(|(r, _)| r)
        .sum();
    Ok((rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg))
}

// ============================================================================
// Cross-validation
// ============================================================================

/// Stratified fold assignment: each class is shuffled from the seed and
/// dealt round-robin, so every fold sees both classes.
pub fn stratified_folds(labels: &[u8], folds: usize, fold_seed: u64) -> Result<Vec<usize>> {
    check_labels(labels)?;
    if folds < 2 || folds > labels.len() {
        return Err(Error::DegenerateFolds);
    }
    let mut assignment = vec![0usize; labels.len()];
    for class in [0u8, 1u8] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < folds {
            return Err(Error::DegenerateFolds);
        }
        let label = if class == 1 { "folds-pos" } else { "folds-neg" };
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(fold_seed, label));
        members.shuffle(&mut rng);
        for (pos, &i) in members.iter().enumerate() {
            assignment[i] = pos % folds;
        }
    }
    Ok(assignment)
}

/// One grid cell of a cross-validation run.
#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub beta: f64,
    pub c: f64,
    pub fold_aucs: Vec<f64>,
    pub mean_auc: f64,
}

/// Full grid results plus the index of the winning cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub outcomes: Vec<CvOutcome>,
    pub best_index: usize,
    pub folds: usize,
    pub d_out: usize,
}

impl CvReport {
    pub fn best(&self) -> &CvOutcome {
        &self.outcomes[self.best_index]
    }
}

/// Grid search over (beta, C) with k-fold cross-validation.
///
/// Each bandwidth gets its own projection of the corpus (the projector
/// directions depend on beta); each (cell, fold) trains from its own
/// derived seed, so results do not depend on thread count. Ties on mean
/// AUC resolve to the earliest grid cell.
#[allow(clippy::too_many_arguments)]
pub fn cross_validate(
    vectors: &[CharacteristicVector],
    labels: &[u8],
    d_out: usize,
    mode: ProjectionMode,
    folds: usize,
    betas: &[f64],
    cs: &[f64],
    epochs: usize,
    master_seed: u64,
) -> Result<CvReport> {
    if vectors.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: vectors.len(),
            got: labels.len(),
        });
    }
    if betas.is_empty() || cs.is_empty() {
        return Err(Error::InvalidArgument("empty hyperparameter grid".into()));
    }
    let assignment = stratified_folds(labels, folds, seed::derive(master_seed, "cv-folds"))?;
    let d = vectors.iter().map(|v| v.dim()).max().unwrap_or(0) as usize;

    let mut outcomes = Vec::with_capacity(betas.len() * cs.len());
    for (bi, &beta) in betas.iter().enumerate() {
        let proj_seed = seed::derive(master_seed, "cv-project");
        let zs: Vec<RffVector> = match mode {
            ProjectionMode::Sfm => {
                let seeds = sfm::HashSeeds::generate(d, beta, proj_seed)?;
                sfm::project_corpus(vectors, d_out, &seeds)?
            }
            ProjectionMode::Fm => {
                let proj = sfm::sample_dense_projection(d, d_out, beta, proj_seed)?;
                sfm::project_corpus_fm(vectors, &proj)?
            }
        };
        for (ci, &c) in cs.iter().enumerate() {
            let cell = bi * cs.len() + ci;
            let fold_aucs = crate::par::map_indices(folds, |fold| -> Result<f64> {
                let mut train_x: Vec<&[f64]> = Vec::new();
                let mut train_y: Vec<u8> = Vec::new();
                let mut test_x: Vec<&[f64]> = Vec::new();
                let mut test_y: Vec<u8> = Vec::new();
                for i in 0..zs.len() {
                    if assignment[i] == fold {
                        test_x.push(zs[i].values());
                        test_y.push(labels[i]);
                    } else {
                        train_x.push(zs[i].values());
                        train_y.push(labels[i]);
                    }
                }
                let t_seed = seed::derive_indexed(
                    master_seed,
                    "cv-train",
                    (cell * folds + fold) as u64,
                );
                let model = train_linear(&train_x, &train_y, c, epochs, t_seed)?;
                let scores: Vec<f64> =
                    test_x.iter().map(|z| model.decision(z)).collect();
                auc(&scores, &test_y)
            })
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
            let mean_auc = fold_aucs.iter().sum::<f64>() / folds as f64;
            outcomes.push(CvOutcome {
                beta,
                c,
                fold_aucs,
                mean_auc,
            });
        }
    }
    let best_index = outcomes
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            a.mean_auc
                .partial_cmp(&b.mean_auc)
                .unwrap()
                .then(ib.cmp(ia)) // earliest cell wins ties
        })
        .map(|(i, _)| i)
        .unwrap();
    Ok(CvReport {
        outcomes,
        best_index,
        folds,
        d_out,
    })
}
