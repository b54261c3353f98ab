//! Stratified repeated cross-validation, classification metrics, feature
//! ablation, and paired significance testing.
//!
//! Per evaluation fold, the vocabulary and the regularization parameter are
//! derived from the training portion only. Folds run in parallel with
//! per-fold derived seeds, so reports are bit-identical for a given
//! (dataset order, seed) regardless of thread scheduling.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureGroup};
use crate::learner::{train, tune_c, Dataset, LabeledInstance};
use crate::seeding::derive_seed;

/// Instance-to-fold assignment for every repeat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub repeats: usize,
    pub seed: u64,
    assignment: Vec<Vec<usize>>,
}

impl FoldPlan {
    pub fn fold_of(&self, repeat: usize, instance: usize) -> usize {
        self.assignment[repeat][instance]
    }

    pub fn assignment(&self, repeat: usize) -> &[usize] {
        &self.assignment[repeat]
    }
}

/// Deals instances to folds: within each class, a seeded shuffle followed
/// by a round-robin deal, so per-class fold counts differ by at most one.
/// Classes with fewer than `k` instances simply appear in fewer folds.
pub fn stratified_folds(
    labels: &[String],
    k: usize,
    repeats: usize,
    seed: u64,
) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::FoldCountTooSmall(k));
    }
    if k > labels.len() {
        return Err(Error::FoldCountTooLarge {
            k,
            n: labels.len(),
        });
    }
    if repeats == 0 {
        return Err(Error::InvalidInput("repeats must be at least 1".into()));
    }
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (idx, label) in labels.iter().enumerate() {
        by_class.entry(label.as_str()).or_default().push(idx);
    }
    let mut assignment = Vec::with_capacity(repeats);
    for repeat in 0..repeats {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, repeat as u64));
        let mut folds = vec![0usize; labels.len()];
        for indices in by_class.values() {
            let mut shuffled = indices.clone();
            shuffled.shuffle(&mut rng);
            for (position, &instance) in shuffled.iter().enumerate() {
                folds[instance] = position % k;
            }
        }
        assignment.push(folds);
    }
    Ok(FoldPlan {
        k,
        repeats,
        seed,
        assignment,
    })
}

/// Accuracy of always predicting the most frequent label.
pub fn majority_baseline<S: AsRef<str>>(labels: &[S]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::InvalidInput("no labels".into()));
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for label in labels {
        *counts.entry(label.as_ref()).or_insert(0) += 1;
    }
    let max = counts.values().copied().max().expect("non-empty");
    Ok(max as f64 / labels.len() as f64)
}

/// Gold-by-predicted count table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    /// counts[gold][predicted]
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    fn zeros(labels: Vec<String>) -> Self {
        let n = labels.len();
        ConfusionMatrix {
            labels,
            counts: vec![vec![0; n]; n],
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn diagonal(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("gold\\predicted");
        for label in &self.labels {
            out.push('\t');
            out.push_str(label);
        }
        out.push('\n');
        for (label, row) in self.labels.iter().zip(&self.counts) {
            out.push_str(label);
            for cell in row {
                out.push('\t');
                out.push_str(&cell.to_string());
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MicroMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class precision, recall, and F1; zero denominators yield zero.
pub fn per_class_metrics(confusion: &ConfusionMatrix) -> BTreeMap<String, ClassMetrics> {
    let n = confusion.labels.len();
    let mut metrics = BTreeMap::new();
    for i in 0..n {
        let tp = confusion.counts[i][i];
        let row: u64 = confusion.counts[i].iter().sum();
        let col: u64 = (0..n).map(|j| confusion.counts[j][i]).sum();
        let precision = ratio(tp, col);
        let recall = ratio(tp, row);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        metrics.insert(
            confusion.labels[i].clone(),
            ClassMetrics {
                precision,
                recall,
                f1,
                support: row,
            },
        );
    }
    metrics
}

/// Micro-averaged metrics pooled over all decisions.
pub fn micro_metrics(confusion: &ConfusionMatrix) -> MicroMetrics {
    let n = confusion.labels.len();
    let tp: u64 = confusion.diagonal();
    let tp_fp: u64 = (0..n)
        .map(|i| (0..n).map(|j| confusion.counts[j][i]).sum::<u64>())
        .sum();
    let tp_fn: u64 = (0..n)
        .map(|i| confusion.counts[i].iter().sum::<u64>())
        .sum();
    let precision = ratio(tp, tp_fp);
    let recall = ratio(tp, tp_fn);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    MicroMetrics {
        precision,
        recall,
        f1,
    }
}

/// Cross-validation settings.
#[derive(Clone, Debug, PartialEq)]
pub struct CvParams {
    pub k: usize,
    pub repeats: usize,
    pub seed: u64,
    pub c_grid: Vec<f64>,
}

impl Default for CvParams {
    fn default() -> Self {
        CvParams {
            k: 10,
            repeats: 10,
            seed: 7,
            c_grid: vec![0.01, 0.1, 1.0, 10.0, 100.0],
        }
    }
}

/// Aggregated evaluation results.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub config: String,
    pub k: usize,
    pub repeats: usize,
    pub seed: u64,
    /// One accuracy per non-empty test fold, repeat-major order.
    pub fold_accuracies: Vec<f64>,
    /// C chosen on each fold's training portion.
    pub chosen_c: Vec<f64>,
    /// Mean over fold accuracies.
    pub mean_accuracy: f64,
    /// Accuracy pooled over every test decision.
    pub pooled_accuracy: f64,
    pub micro: MicroMetrics,
    pub per_class: BTreeMap<String, ClassMetrics>,
    pub confusion: ConfusionMatrix,
}

impl EvalReport {
    /// Per-class table in the given label order (defaults to confusion
    /// order), with a trailing micro-average row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("category\tinstances\tP\tR\tF1\n");
        for label in &self.confusion.labels {
            let m = &self.per_class[label];
            out.push_str(&format!(
                "{label}\t{}\t{:.2}\t{:.2}\t{:.2}\n",
                m.support,
                m.precision * 100.0,
                m.recall * 100.0,
                m.f1 * 100.0
            ));
        }
        out.push_str(&format!(
            "micro-ave\t{}\t{:.2}\t{:.2}\t{:.2}\n",
            self.confusion.total(),
            self.micro.precision * 100.0,
            self.micro.recall * 100.0,
            self.micro.f1 * 100.0
        ));
        out
    }
}

struct FoldOutcome {
    accuracy: Option<f64>,
    chosen_c: Option<f64>,
    pairs: Vec<(usize, usize)>,
}

/// Runs k-fold stratified cross-validation, `repeats` times. Within each
/// fold, C is tuned on the training portion, the vocabulary is built from
/// training instances only, and the held-out fold is scored.
pub fn cross_validate(
    instances: &[LabeledInstance],
    config: &FeatureConfig,
    params: &CvParams,
) -> Result<EvalReport> {
    if config.is_empty() {
        return Err(Error::EmptyFeatureConfig);
    }
    let filtered: Vec<LabeledInstance> = instances
        .iter()
        .map(|inst| LabeledInstance {
            tweet_id: inst.tweet_id.clone(),
            features: inst.features.restrict(config),
            label: inst.label.clone(),
        })
        .collect();
    let labels: Vec<String> = filtered.iter().map(|i| i.label.clone()).collect();
    let label_set: Vec<String> = labels
        .iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .cloned()
        .collect();
    let plan = stratified_folds(&labels, params.k, params.repeats, params.seed)?;

    let jobs: Vec<(usize, usize)> = (0..params.repeats)
        .flat_map(|r| (0..params.k).map(move |f| (r, f)))
        .collect();
    let outcomes: Result<Vec<FoldOutcome>> = jobs
        .par_iter()
        .map(|&(repeat, fold)| {
            let train_refs: Vec<&LabeledInstance> = filtered
                .iter()
                .enumerate()
                .filter(|(i, _)| plan.fold_of(repeat, *i) != fold)
                .map(|(_, inst)| inst)
                .collect();
            let test_refs: Vec<&LabeledInstance> = filtered
                .iter()
                .enumerate()
                .filter(|(i, _)| plan.fold_of(repeat, *i) == fold)
                .map(|(_, inst)| inst)
                .collect();
            if test_refs.is_empty() {
                return Ok(FoldOutcome {
                    accuracy: None,
                    chosen_c: None,
                    pairs: Vec::new(),
                });
            }
            let stream = (repeat * params.k + fold) as u64;
            let fold_seed = derive_seed(params.seed, 0xF01D ^ stream);
            let c = tune_c(&train_refs, &params.c_grid, derive_seed(fold_seed, 1))?;
            let dataset = Dataset::build(train_refs.iter().copied(), Some(&label_set))?;
            let model = train(&dataset, c, derive_seed(fold_seed, 2))?;
            let index: BTreeMap<&str, usize> = label_set
                .iter()
                .enumerate()
                .map(|(i, l)| (l.as_str(), i))
                .collect();
            let mut pairs = Vec::with_capacity(test_refs.len());
            let mut correct = 0usize;
            for inst in &test_refs {
                let predicted = model.predict(&inst.features);
                if predicted == inst.label {
                    correct += 1;
                }
                pairs.push((index[inst.label.as_str()], index[predicted]));
            }
            Ok(FoldOutcome {
                accuracy: Some(correct as f64 / test_refs.len() as f64),
                chosen_c: Some(c),
                pairs,
            })
        })
        .collect();
    let outcomes = outcomes?;

    let mut confusion = ConfusionMatrix::zeros(label_set);
    let mut fold_accuracies = Vec::new();
    let mut chosen_c = Vec::new();
    for outcome in outcomes {
        if let Some(acc) = outcome.accuracy {
            fold_accuracies.push(acc);
        }
        if let Some(c) = outcome.chosen_c {
            chosen_c.push(c);
        }
        for (gold, predicted) in outcome.pairs {
            confusion.counts[gold][predicted] += 1;
        }
    }
    if fold_accuracies.is_empty() {
        return Err(Error::InvalidInput("every test fold was empty".into()));
    }
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64;
    let pooled_accuracy = ratio(confusion.diagonal(), confusion.total());
    let micro = micro_metrics(&confusion);
    let per_class = per_class_metrics(&confusion);
    Ok(EvalReport {
        config: config.describe(),
        k: params.k,
        repeats: params.repeats,
        seed: params.seed,
        fold_accuracies,
        chosen_c,
        mean_accuracy,
        pooled_accuracy,
        micro,
        per_class,
        confusion,
    })
}

/// Paired t-test result. `t` is absent when every paired difference is
/// identical (zero variance), in which case `p` is 1 by convention.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TTest {
    pub t: Option<f64>,
    pub df: usize,
    pub p: f64,
}

/// Two-tailed paired Student t-test over equal-length score lists.
pub fn paired_t_test(scores_a: &[f64], scores_b: &[f64]) -> Result<TTest> {
    if scores_a.len() != scores_b.len() {
        return Err(Error::ScoreLengthMismatch(scores_a.len(), scores_b.len()));
    }
    let n = scores_a.len();
    if n < 2 {
        return Err(Error::TooFewScores(n));
    }
    let diffs: Vec<f64> = scores_a
        .iter()
        .zip(scores_b)
        .map(|(a, b)| a - b)
        .collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let ss: f64 = diffs.iter().map(|d| (d - mean).powi(2)).sum();
    let df = n - 1;
    if ss == 0.0 {
        return Ok(TTest {
            t: None,
            df,
            p: 1.0,
        });
    }
    let sd = (ss / df as f64).sqrt();
    let t = mean / (sd / (n as f64).sqrt());
    Ok(TTest {
        t: Some(t),
        df,
        p: student_t_two_tailed_p(t, df as f64),
    })
}

// Lanczos approximation (g = 7, 9 coefficients).
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, c) in COEFFS.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

// Continued fraction for the incomplete beta function (modified Lentz).
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const FPMIN: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b), accurate to well below
/// 1e-8 over the t-test domain.
fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * betacf(a, b, x) / a
    } else {
        1.0 - front * betacf(b, a, 1.0 - x) / b
    }
}

/// Two-tailed p-value of Student's t with `df` degrees of freedom, via the
/// incomplete beta continued fraction: p = I_{df/(df+t²)}(df/2, 1/2).
pub fn student_t_two_tailed_p(t: f64, df: f64) -> f64 {
    reg_inc_beta(df / 2.0, 0.5, df / (df + t * t))
}

/// One ablation branch: the same cross-validation with one group removed,
/// paired against the reference run.
#[derive(Clone, Debug, Serialize)]
pub struct AblationEntry {
    pub removed: FeatureGroup,
    pub report: EvalReport,
    pub t: Option<f64>,
    pub p: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AblationReport {
    pub reference: EvalReport,
    pub entries: Vec<AblationEntry>,
}

impl AblationReport {
    /// Table with one row per experiment: mean accuracy, t, p.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("experiment\tmean_accuracy\tt\tp\n");
        out.push_str(&format!(
            "all features\t{:.2}\t\t\n",
            self.reference.mean_accuracy * 100.0
        ));
        for entry in &self.entries {
            let t = entry
                .t
                .map(|t| format!("{t:.4}"))
                .unwrap_or_else(|| "undefined".to_string());
            out.push_str(&format!(
                "all - {}\t{:.2}\t{}\t{:.6}\n",
                entry.removed,
                entry.report.mean_accuracy * 100.0,
                t,
                entry.p
            ));
        }
        out
    }
}

/// Re-runs cross-validation once per removed group on the identical fold
/// plan (same seed, same instance order) and pairs each run against the
/// all-features reference with a t-test.
pub fn ablate(
    instances: &[LabeledInstance],
    base_config: &FeatureConfig,
    groups: &[FeatureGroup],
    params: &CvParams,
) -> Result<AblationReport> {
    for group in groups {
        if !base_config.is_enabled(*group) {
            return Err(Error::InvalidInput(format!(
                "cannot ablate disabled group {group}"
            )));
        }
    }
    let reference = cross_validate(instances, base_config, params)?;
    let entries: Result<Vec<AblationEntry>> = groups
        .iter()
        .map(|&group| {
            let config = base_config.without(group);
            let report = cross_validate(instances, &config, params)?;
            let test = paired_t_test(&reference.fold_accuracies, &report.fold_accuracies)?;
            Ok(AblationEntry {
                removed: group,
                report,
                t: test.t,
                p: test.p,
            })
        })
        .collect();
    Ok(AblationReport {
        reference,
        entries: entries?,
    })
}
