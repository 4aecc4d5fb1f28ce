//! Ranking objective shared by the local ranker and the discriminative LM.
//!
//! Each training example is a candidate set with a nonempty good subset;
//! the model maximizes the log-probability that a softmax over candidate
//! scores lands in the good subset, minus an L2 penalty. Training is batch
//! gradient ascent with Armijo backtracking, which keeps the objective
//! nondecreasing and, with a fixed example order, bit-reproducible.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MaxentError {
    #[error("example {index} needs more than one candidate and a nonempty good subset")]
    InvalidExample { index: usize },
    #[error("every example's good subset equals its candidate set; the objective is constant")]
    DegenerateExamples,
    #[error("no training examples")]
    NoExamples,
}

/// Sparse feature counts keyed by structured feature names. Zero counts are
/// never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureVector {
    counts: BTreeMap<String, u32>,
}

impl FeatureVector {
    pub fn new() -> Self {
        FeatureVector::default()
    }

    pub fn add(&mut self, name: String) {
        self.add_n(name, 1);
    }

    pub fn add_n(&mut self, name: String, n: u32) {
        if n > 0 {
            *self.counts.entry(name).or_insert(0) += n;
        }
    }

    pub fn get(&self, name: &str) -> u32 {
        self.counts.get(name).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }

    pub fn dot(&self, weights: &HashMap<String, f64>) -> f64 {
        self.counts
            .iter()
            .map(|(k, &v)| weights.get(k).copied().unwrap_or(0.0) * v as f64)
            .sum()
    }
}

impl FromIterator<String> for FeatureVector {
    fn from_iter<T: IntoIterator<Item = String>>(iter: T) -> Self {
        let mut fv = FeatureVector::new();
        for name in iter {
            fv.add(name);
        }
        fv
    }
}

/// One ranking example: feature vectors per candidate plus the good mask.
#[derive(Debug, Clone)]
pub struct TrainExample {
    pub candidates: Vec<FeatureVector>,
    pub good: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct MaxentConfig {
    pub l2: f64,
    pub max_iter: usize,
    /// Convergence threshold on the gradient max-norm.
    pub grad_tol: f64,
    /// Features pinned to a constant and excluded from the gradient.
    pub frozen: Vec<(String, f64)>,
    /// Free features starting from a nonzero value.
    pub initial: Vec<(String, f64)>,
    /// Free features exempt from the L2 penalty (bias terms).
    pub unregularized: Vec<String>,
}

impl Default for MaxentConfig {
    fn default() -> Self {
        MaxentConfig {
            l2: 1e-3,
            max_iter: 200,
            grad_tol: 1e-5,
            frozen: Vec::new(),
            initial: Vec::new(),
            unregularized: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub weights: HashMap<String, f64>,
    pub iterations: usize,
    pub final_objective: f64,
}

/// Candidate features resolved against a fixed feature index.
struct IndexedExample {
    candidates: Vec<Vec<(usize, f64)>>,
    good: Vec<bool>,
}

/// A training problem with features interned into dense indices (sorted by
/// name, so index assignment is deterministic).
pub struct IndexedProblem {
    pub feature_names: Vec<String>,
    examples: Vec<IndexedExample>,
}

impl IndexedProblem {
    pub fn from_examples(examples: &[TrainExample]) -> Result<IndexedProblem, MaxentError> {
        if examples.is_empty() {
            return Err(MaxentError::NoExamples);
        }
        for (index, ex) in examples.iter().enumerate() {
            let goods = ex.good.iter().filter(|&&g| g).count();
            if ex.candidates.len() < 2 || goods == 0 || ex.good.len() != ex.candidates.len() {
                return Err(MaxentError::InvalidExample { index });
            }
        }
        if examples
            .iter()
            .all(|ex| ex.good.iter().all(|&g| g))
        {
            return Err(MaxentError::DegenerateExamples);
        }

        let mut names: Vec<&str> = examples
            .iter()
            .flat_map(|ex| ex.candidates.iter())
            .flat_map(|fv| fv.names())
            .collect();
        names.sort_unstable();
        names.dedup();
        let feature_names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let index: HashMap<&str, usize> =
            names.iter().enumerate().map(|(i, &n)| (n, i)).collect();

        let indexed = examples
            .iter()
            .map(|ex| IndexedExample {
                candidates: ex
                    .candidates
                    .iter()
                    .map(|fv| fv.iter().map(|(n, c)| (index[n], c as f64)).collect())
                    .collect(),
                good: ex.good.clone(),
            })
            .collect();
        Ok(IndexedProblem { feature_names, examples: indexed })
    }

    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn num_examples(&self) -> usize {
        self.examples.len()
    }

    /// Data log-likelihood (no regularizer): sum over examples of
    /// log(sum_G exp s - normalizer). Always <= 0.
    pub fn log_likelihood(&self, w: &[f64]) -> f64 {
        let mut total = 0.0;
        for ex in &self.examples {
            let scores: Vec<f64> = ex.candidates.iter().map(|c| dot(c, w)).collect();
            let all = log_sum_exp(scores.iter().copied());
            let good = log_sum_exp(
                scores
                    .iter()
                    .zip(&ex.good)
                    .filter(|(_, &g)| g)
                    .map(|(&s, _)| s),
            );
            total += good - all;
        }
        total
    }

    /// Gradient of the data log-likelihood.
    pub fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let mut grad = vec![0.0; w.len()];
        for ex in &self.examples {
            let scores: Vec<f64> = ex.candidates.iter().map(|c| dot(c, w)).collect();
            let all = log_sum_exp(scores.iter().copied());
            let good = log_sum_exp(
                scores
                    .iter()
                    .zip(&ex.good)
                    .filter(|(_, &g)| g)
                    .map(|(&s, _)| s),
            );
            for (j, cand) in ex.candidates.iter().enumerate() {
                let p_all = (scores[j] - all).exp();
                let p_good = if ex.good[j] { (scores[j] - good).exp() } else { 0.0 };
                let coeff = p_good - p_all;
                if coeff != 0.0 {
                    for &(f, c) in cand {
                        grad[f] += coeff * c;
                    }
                }
            }
        }
        grad
    }
}

fn dot(cand: &[(usize, f64)], w: &[f64]) -> f64 {
    cand.iter().map(|&(f, c)| w[f] * c).sum()
}

fn log_sum_exp(scores: impl Iterator<Item = f64>) -> f64 {
    let scores: Vec<f64> = scores.collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + scores.iter().map(|&s| (s - max).exp()).sum::<f64>().ln()
}

/// Train by maximizing `log_likelihood - l2 * ||w_regularized||^2`.
pub fn train_maxent(
    examples: &[TrainExample],
    config: &MaxentConfig,
) -> Result<TrainedModel, MaxentError> {
    let problem = IndexedProblem::from_examples(examples)?;
    let nf = problem.num_features();

    let mut frozen = vec![false; nf];
    let mut regularized = vec![true; nf];
    let mut w = vec![0.0; nf];
    let lookup: HashMap<&str, usize> = problem
        .feature_names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    for (name, value) in &config.frozen {
        if let Some(&i) = lookup.get(name.as_str()) {
            frozen[i] = true;
            regularized[i] = false;
            w[i] = *value;
        }
    }
    for (name, value) in &config.initial {
        if let Some(&i) = lookup.get(name.as_str()) {
            if !frozen[i] {
                w[i] = *value;
            }
        }
    }
    for name in &config.unregularized {
        if let Some(&i) = lookup.get(name.as_str()) {
            regularized[i] = false;
        }
    }

    let objective = |w: &[f64]| {
        let penalty: f64 = w
            .iter()
            .zip(&regularized)
            .filter(|(_, &r)| r)
            .map(|(&x, _)| x * x)
            .sum();
        problem.log_likelihood(w) - config.l2 * penalty
    };

    let mut obj = objective(&w);
    let mut step = 1.0f64;
    let mut iterations = 0;
    for _ in 0..config.max_iter {
        let mut grad = problem.gradient(&w);
        for i in 0..nf {
            if frozen[i] {
                grad[i] = 0.0;
            } else if regularized[i] {
                grad[i] -= 2.0 * config.l2 * w[i];
            }
        }
        let gnorm = grad.iter().fold(0.0f64, |m, &g| m.max(g.abs()));
        if gnorm < config.grad_tol {
            break;
        }
        let gsq: f64 = grad.iter().map(|&g| g * g).sum();

        // Armijo backtracking, warm-started from the last accepted step.
        let mut eta = (step * 2.0).clamp(1e-12, 1e6);
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> =
                w.iter().zip(&grad).map(|(&x, &g)| x + eta * g).collect();
            let trial_obj = objective(&trial);
            if trial_obj >= obj + 1e-4 * eta * gsq {
                w = trial;
                obj = trial_obj;
                step = eta;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
    }

    let weights: HashMap<String, f64> = problem
        .feature_names
        .iter()
        .cloned()
        .zip(w.iter().copied())
        .filter(|(_, v)| *v != 0.0)
        .collect();
    Ok(TrainedModel { weights, iterations, final_objective: obj })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(names: &[&str]) -> FeatureVector {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn separable_example() -> TrainExample {
        TrainExample {
            candidates: vec![fv(&["shared", "good_only"]), fv(&["shared"])],
            good: vec![true, false],
        }
    }

    #[test]
    fn separable_feature_gets_positive_weight() {
        let model = train_maxent(
            &[separable_example()],
            &MaxentConfig { l2: 0.0, max_iter: 500, ..Default::default() },
        )
        .unwrap();
        assert!(model.weights["good_only"] > 1.0);
        // Fully separable: objective approaches zero from below.
        assert!(model.final_objective < 0.0);
        assert!(model.final_objective > -1e-3);
    }

    #[test]
    fn objective_at_zero_is_log_good_fraction() {
        let examples = vec![
            TrainExample {
                candidates: vec![fv(&["a"]), fv(&["b"]), fv(&["c"])],
                good: vec![true, false, false],
            },
            TrainExample {
                candidates: vec![fv(&["a"]), fv(&["d"])],
                good: vec![true, true, ],
            },
            TrainExample {
                candidates: vec![fv(&["a"]), fv(&["b"]), fv(&["c"]), fv(&["d"])],
                good: vec![true, true, false, false],
            },
        ];
        let problem = IndexedProblem::from_examples(&examples).unwrap();
        let w = vec![0.0; problem.num_features()];
        let want = (1f64 / 3.0).ln() + (2f64 / 2.0).ln() + (2f64 / 4.0).ln();
        assert!((problem.log_likelihood(&w) - want).abs() < 1e-12);
    }

    #[test]
    fn strong_l2_shrinks_weights() {
        let weak = train_maxent(
            &[separable_example()],
            &MaxentConfig { l2: 1e-6, max_iter: 300, ..Default::default() },
        )
        .unwrap();
        let strong = train_maxent(
            &[separable_example()],
            &MaxentConfig { l2: 1e6, max_iter: 300, ..Default::default() },
        )
        .unwrap();
        let norm = |m: &TrainedModel| {
            m.weights.values().map(|v| v * v).sum::<f64>().sqrt()
        };
        assert!(norm(&weak) > 1.0);
        assert!(norm(&strong) < 1e-3);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pool = ["f0", "f1", "f2", "f3", "f4", "f5"];
        for _ in 0..20 {
            let mut examples = Vec::new();
            for _ in 0..3 {
                let ncand = rng.random_range(2..5);
                let mut cands = Vec::new();
                for _ in 0..ncand {
                    let mut v = FeatureVector::new();
                    for f in pool {
                        if rng.random_bool(0.5) {
                            v.add_n(f.to_string(), rng.random_range(1..3));
                        }
                    }
                    cands.push(v);
                }
                let good_idx = rng.random_range(0..ncand);
                let good: Vec<bool> = (0..ncand).map(|i| i == good_idx).collect();
                examples.push(TrainExample { candidates: cands, good });
            }
            let problem = match IndexedProblem::from_examples(&examples) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let w: Vec<f64> =
                (0..problem.num_features()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let grad = problem.gradient(&w);
            for i in 0..w.len() {
                let h = 1e-5;
                let mut wp = w.clone();
                wp[i] += h;
                let mut wm = w.clone();
                wm[i] -= h;
                let fd = (problem.log_likelihood(&wp) - problem.log_likelihood(&wm)) / (2.0 * h);
                let denom = grad[i].abs().max(fd.abs()).max(1e-8);
                assert!(
                    (grad[i] - fd).abs() / denom < 1e-4,
                    "feature {i}: analytic {} vs fd {fd}",
                    grad[i]
                );
            }
        }
    }

    #[test]
    fn objective_nondecreasing_over_training() {
        // Re-train with increasing iteration budgets; the final objective
        // must be monotone in the budget since every accepted step improves.
        let examples = vec![
            TrainExample {
                candidates: vec![fv(&["x", "y"]), fv(&["x"]), fv(&["z"])],
                good: vec![false, true, false],
            },
            TrainExample {
                candidates: vec![fv(&["y"]), fv(&["z", "x"])],
                good: vec![true, false],
            },
        ];
        let mut prev = f64::NEG_INFINITY;
        for iters in [1, 2, 5, 10, 50] {
            let m = train_maxent(
                &examples,
                &MaxentConfig { l2: 1e-3, max_iter: iters, ..Default::default() },
            )
            .unwrap();
            assert!(m.final_objective >= prev - 1e-12);
            prev = m.final_objective;
        }
    }

    #[test]
    fn all_degenerate_examples_rejected() {
        let ex = TrainExample { candidates: vec![fv(&["a"]), fv(&["b"])], good: vec![true, true] };
        assert!(matches!(
            train_maxent(&[ex], &MaxentConfig::default()),
            Err(MaxentError::DegenerateExamples)
        ));
    }

    #[test]
    fn single_candidate_example_rejected() {
        let ex = TrainExample { candidates: vec![fv(&["a"])], good: vec![true] };
        assert!(matches!(
            train_maxent(&[ex], &MaxentConfig::default()),
            Err(MaxentError::InvalidExample { index: 0 })
        ));
    }

    #[test]
    fn frozen_feature_keeps_its_value() {
        let ex = TrainExample {
            candidates: vec![fv(&["bias", "g"]), fv(&["h"])],
            good: vec![true, false],
        };
        let model = train_maxent(
            &[ex],
            &MaxentConfig {
                frozen: vec![("bias".to_string(), -10.0)],
                max_iter: 100,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(model.weights["bias"], -10.0);
    }
}
