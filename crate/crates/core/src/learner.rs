//! Multiclass linear max-margin classification over sparse vectors.
//!
//! Training decomposes one-vs-rest and solves each binary problem in the
//! dual with coordinate descent over L2-regularized L1 hinge loss, the bias
//! handled as an augmented always-one feature. The optimizer stops when the
//! largest projected gradient in an epoch falls below `eps` (default 0.01)
//! or after `max_epochs` epochs (default 1000); instance order is shuffled
//! each epoch by a seeded generator, so training is deterministic given
//! (dataset order, seed, C).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::seeding::derive_seed;

/// One classification instance.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledInstance {
    pub tweet_id: String,
    pub features: FeatureVector,
    pub label: String,
}

impl LabeledInstance {
    pub fn new(
        tweet_id: impl Into<String>,
        features: FeatureVector,
        label: impl Into<String>,
    ) -> Self {
        LabeledInstance {
            tweet_id: tweet_id.into(),
            features,
            label: label.into(),
        }
    }
}

/// Indexed training data: sparse rows over a dense vocabulary.
#[derive(Clone, Debug)]
pub struct Dataset {
    ids: Vec<String>,
    rows: Vec<Vec<(u32, f64)>>,
    labels: Vec<usize>,
    label_set: Vec<String>,
    vocabulary: Vec<String>,
}

impl Dataset {
    /// Indexes instances over the vocabulary of their own feature names
    /// (sorted). `label_order` fixes the label set and its tie-break order;
    /// by default labels sort lexicographically.
    pub fn build<'a, I>(instances: I, label_order: Option<&[String]>) -> Result<Dataset>
    where
        I: IntoIterator<Item = &'a LabeledInstance>,
    {
        let instances: Vec<&LabeledInstance> = instances.into_iter().collect();
        let mut names: BTreeSet<&str> = BTreeSet::new();
        for instance in &instances {
            for (name, value) in instance.features.iter() {
                if !value.is_finite() {
                    return Err(Error::NonFiniteFeature {
                        tweet_id: instance.tweet_id.clone(),
                        feature: name.to_string(),
                    });
                }
                names.insert(name);
            }
        }
        let vocabulary: Vec<String> = names.into_iter().map(String::from).collect();
        let index: HashMap<&str, u32> = vocabulary
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i as u32))
            .collect();

        let label_set: Vec<String> = match label_order {
            Some(order) => order.to_vec(),
            None => {
                let distinct: BTreeSet<&str> =
                    instances.iter().map(|i| i.label.as_str()).collect();
                distinct.into_iter().map(String::from).collect()
            }
        };
        let label_index: HashMap<&str, usize> = label_set
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();

        let mut ids = Vec::with_capacity(instances.len());
        let mut rows = Vec::with_capacity(instances.len());
        let mut labels = Vec::with_capacity(instances.len());
        for instance in &instances {
            let label = *label_index.get(instance.label.as_str()).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "label {:?} of instance {} not in label set",
                    instance.label, instance.tweet_id
                ))
            })?;
            let row: Vec<(u32, f64)> = instance
                .features
                .iter()
                .map(|(name, value)| (index[name], value))
                .collect();
            ids.push(instance.tweet_id.clone());
            rows.push(row);
            labels.push(label);
        }
        Ok(Dataset {
            ids,
            rows,
            labels,
            label_set,
            vocabulary,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn label_set(&self) -> &[String] {
        &self.label_set
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    fn distinct_label_count(&self) -> usize {
        self.labels.iter().collect::<BTreeSet<_>>().len()
    }
}

/// Optimizer settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainOptions {
    /// Stop when the largest projected gradient over an epoch is below this.
    pub eps: f64,
    /// Epoch budget if the tolerance is never reached.
    pub max_epochs: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            eps: 0.01,
            max_epochs: 1000,
        }
    }
}

/// Per-class weight vectors and biases over a shared vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    label_set: Vec<String>,
    vocabulary: Vec<String>,
    vocab_index: HashMap<String, u32>,
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
    c: f64,
    seed: u64,
    meta: String,
}

impl LinearModel {
    pub fn label_set(&self) -> &[String] {
        &self.label_set
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn meta(&self) -> &str {
        &self.meta
    }

    pub fn set_meta(&mut self, meta: impl Into<String>) {
        self.meta = meta.into();
    }

    pub fn class_weights(&self, label: &str) -> Option<&[f64]> {
        let idx = self.label_set.iter().position(|l| l == label)?;
        Some(&self.weights[idx])
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    /// Per-class decision value `w·x + b`; feature names outside the
    /// vocabulary are ignored.
    pub fn decision_values(&self, vector: &FeatureVector) -> BTreeMap<String, f64> {
        self.raw_decisions(vector)
            .into_iter()
            .enumerate()
            .map(|(i, v)| (self.label_set[i].clone(), v))
            .collect()
    }

    fn raw_decisions(&self, vector: &FeatureVector) -> Vec<f64> {
        let mut values = self.biases.clone();
        for (name, value) in vector.iter() {
            if let Some(&j) = self.vocab_index.get(name) {
                for (class, weights) in self.weights.iter().enumerate() {
                    values[class] += weights[j as usize] * value;
                }
            }
        }
        values
    }

    /// Argmax class; ties break toward the earlier label in the label set.
    pub fn predict(&self, vector: &FeatureVector) -> &str {
        let values = self.raw_decisions(vector);
        let mut best = 0;
        for (i, v) in values.iter().enumerate().skip(1) {
            if *v > values[best] {
                best = i;
            }
        }
        &self.label_set[best]
    }
}

/// Solves one binary subproblem by dual coordinate descent.
fn solve_binary(
    rows: &[Vec<(u32, f64)>],
    targets: &[f64],
    q_diag: &[f64],
    dim: usize,
    c: f64,
    seed: u64,
    options: &TrainOptions,
) -> (Vec<f64>, f64) {
    let n = rows.len();
    let mut alpha = vec![0.0f64; n];
    let mut w = vec![0.0f64; dim];
    let mut b = 0.0f64;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..options.max_epochs {
        order.shuffle(&mut rng);
        let mut max_pg = 0.0f64;
        for &i in &order {
            let yi = targets[i];
            let mut dot = b;
            for &(j, v) in &rows[i] {
                dot += w[j as usize] * v;
            }
            let g = yi * dot - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= c {
                g.max(0.0)
            } else {
                g
            };
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / q_diag[i]).clamp(0.0, c);
                let step = (alpha[i] - old) * yi;
                if step != 0.0 {
                    for &(j, v) in &rows[i] {
                        w[j as usize] += step * v;
                    }
                    b += step;
                }
            }
            if pg.abs() > max_pg {
                max_pg = pg.abs();
            }
        }
        if max_pg < options.eps {
            break;
        }
    }
    (w, b)
}

/// Trains a one-vs-rest linear model. Binary subproblems run in parallel
/// with per-class derived seeds, so the result does not depend on thread
/// scheduling.
pub fn train_with_options(
    dataset: &Dataset,
    c: f64,
    seed: u64,
    options: &TrainOptions,
) -> Result<LinearModel> {
    if !(c > 0.0) {
        return Err(Error::InvalidInput(format!("C must be positive, got {c}")));
    }
    let distinct = dataset.distinct_label_count();
    if distinct < 2 {
        return Err(Error::SingleLabel(distinct));
    }
    let dim = dataset.vocabulary.len();
    let q_diag: Vec<f64> = dataset
        .rows
        .iter()
        .map(|row| 1.0 + row.iter().map(|(_, v)| v * v).sum::<f64>())
        .collect();

    let solved: Vec<(Vec<f64>, f64)> = (0..dataset.label_set.len())
        .into_par_iter()
        .map(|class| {
            let targets: Vec<f64> = dataset
                .labels
                .iter()
                .map(|&l| if l == class { 1.0 } else { -1.0 })
                .collect();
            solve_binary(
                &dataset.rows,
                &targets,
                &q_diag,
                dim,
                c,
                derive_seed(seed, class as u64),
                options,
            )
        })
        .collect();

    let (weights, biases): (Vec<Vec<f64>>, Vec<f64>) = solved.into_iter().unzip();
    let vocab_index = dataset
        .vocabulary
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i as u32))
        .collect();
    Ok(LinearModel {
        label_set: dataset.label_set.clone(),
        vocabulary: dataset.vocabulary.clone(),
        vocab_index,
        weights,
        biases,
        c,
        seed,
        meta: String::new(),
    })
}

pub fn train(dataset: &Dataset, c: f64, seed: u64) -> Result<LinearModel> {
    train_with_options(dataset, c, seed, &TrainOptions::default())
}

fn accuracy_on<'a, I>(model: &LinearModel, instances: I) -> f64
where
    I: IntoIterator<Item = &'a LabeledInstance>,
{
    let mut correct = 0usize;
    let mut total = 0usize;
    for instance in instances {
        total += 1;
        if model.predict(&instance.features) == instance.label {
            correct += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}

/// Picks C from a grid by stratified 5-fold cross-validation on the given
/// training portion; ties go to the smallest C. A single-value grid is
/// returned as-is.
pub fn tune_c(train_part: &[&LabeledInstance], grid: &[f64], seed: u64) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty C grid".into()));
    }
    let mut grid: Vec<f64> = grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite C values"));
    grid.dedup();
    if grid.len() == 1 {
        return Ok(grid[0]);
    }
    let labels: Vec<String> = train_part.iter().map(|i| i.label.clone()).collect();
    let k = 5.min(train_part.len());
    if k < 2 {
        return Ok(grid[0]);
    }
    let plan = crate::evalharness::stratified_folds(&labels, k, 1, derive_seed(seed, 0x1A11))?;

    let mut best_c = grid[0];
    let mut best_score = f64::NEG_INFINITY;
    for &c in &grid {
        let mut scores = Vec::new();
        for fold in 0..k {
            let train_fold: Vec<&LabeledInstance> = train_part
                .iter()
                .enumerate()
                .filter(|(i, _)| plan.fold_of(0, *i) != fold)
                .map(|(_, inst)| *inst)
                .collect();
            let test_fold: Vec<&LabeledInstance> = train_part
                .iter()
                .enumerate()
                .filter(|(i, _)| plan.fold_of(0, *i) == fold)
                .map(|(_, inst)| *inst)
                .collect();
            if test_fold.is_empty() {
                continue;
            }
            let distinct: BTreeSet<&str> =
                train_fold.iter().map(|i| i.label.as_str()).collect();
            if distinct.len() < 2 {
                continue;
            }
            let dataset = Dataset::build(train_fold.iter().copied(), None)?;
            let model = train(&dataset, c, derive_seed(seed, 0xC0 + fold as u64))?;
            scores.push(accuracy_on(&model, test_fold.iter().copied()));
        }
        let score = if scores.is_empty() {
            f64::NEG_INFINITY
        } else {
            scores.iter().sum::<f64>() / scores.len() as f64
        };
        if score > best_score {
            best_score = score;
            best_c = c;
        }
    }
    Ok(best_c)
}

const MODEL_MAGIC: &[u8; 8] = b"LINSVM01";

fn write_u32<W: Write>(out: &mut W, v: u32) -> std::io::Result<()> {
    out.write_all(&v.to_le_bytes())
}

fn write_u64<W: Write>(out: &mut W, v: u64) -> std::io::Result<()> {
    out.write_all(&v.to_le_bytes())
}

fn write_f64<W: Write>(out: &mut W, v: f64) -> std::io::Result<()> {
    out.write_all(&v.to_le_bytes())
}

fn write_str<W: Write>(out: &mut W, s: &str) -> std::io::Result<()> {
    write_u32(out, s.len() as u32)?;
    out.write_all(s.as_bytes())
}

fn read_exact<R: Read, const N: usize>(input: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    input
        .read_exact(&mut buf)
        .map_err(|_| Error::ModelFormat("unexpected end of file".into()))?;
    Ok(buf)
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(read_exact::<R, 4>(input)?))
}

fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_exact::<R, 8>(input)?))
}

fn read_f64<R: Read>(input: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_exact::<R, 8>(input)?))
}

fn read_str<R: Read>(input: &mut R) -> Result<String> {
    let len = read_u32(input)? as usize;
    if len > 1 << 24 {
        return Err(Error::ModelFormat(format!("string length {len} too large")));
    }
    let mut buf = vec![0u8; len];
    input
        .read_exact(&mut buf)
        .map_err(|_| Error::ModelFormat("unexpected end of file".into()))?;
    String::from_utf8(buf).map_err(|_| Error::ModelFormat("invalid utf-8".into()))
}

/// Serializes a model. Layout (all little-endian):
/// magic `LINSVM01`; u32 label count L; u32 vocabulary size V; u64 seed;
/// f64 C; L length-prefixed labels; V length-prefixed names; L biases
/// (f64); L×V weights (f64, class-major); length-prefixed meta string.
pub fn save_model<W: Write>(model: &LinearModel, mut out: W) -> Result<()> {
    let io_err = |e| Error::io("<writer>", e);
    out.write_all(MODEL_MAGIC).map_err(io_err)?;
    write_u32(&mut out, model.label_set.len() as u32).map_err(io_err)?;
    write_u32(&mut out, model.vocabulary.len() as u32).map_err(io_err)?;
    write_u64(&mut out, model.seed).map_err(io_err)?;
    write_f64(&mut out, model.c).map_err(io_err)?;
    for label in &model.label_set {
        write_str(&mut out, label).map_err(io_err)?;
    }
    for name in &model.vocabulary {
        write_str(&mut out, name).map_err(io_err)?;
    }
    for bias in &model.biases {
        write_f64(&mut out, *bias).map_err(io_err)?;
    }
    for class in &model.weights {
        for w in class {
            write_f64(&mut out, *w).map_err(io_err)?;
        }
    }
    write_str(&mut out, &model.meta).map_err(io_err)?;
    Ok(())
}

pub fn save_model_to_path(model: &LinearModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    save_model(model, BufWriter::new(file))
}

/// Deserializes a model, rejecting unknown versions, truncation, and
/// trailing bytes.
pub fn load_model<R: Read>(mut input: R) -> Result<LinearModel> {
    let magic = read_exact::<R, 8>(&mut input)?;
    if &magic != MODEL_MAGIC {
        return Err(Error::ModelFormat(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&magic),
            String::from_utf8_lossy(MODEL_MAGIC)
        )));
    }
    let n_labels = read_u32(&mut input)? as usize;
    let n_features = read_u32(&mut input)? as usize;
    let seed = read_u64(&mut input)?;
    let c = read_f64(&mut input)?;
    if n_labels == 0 {
        return Err(Error::ModelFormat("model has no labels".into()));
    }
    let mut label_set = Vec::with_capacity(n_labels);
    for _ in 0..n_labels {
        label_set.push(read_str(&mut input)?);
    }
    let mut vocabulary = Vec::with_capacity(n_features);
    for _ in 0..n_features {
        vocabulary.push(read_str(&mut input)?);
    }
    let mut biases = Vec::with_capacity(n_labels);
    for _ in 0..n_labels {
        biases.push(read_f64(&mut input)?);
    }
    let mut weights = Vec::with_capacity(n_labels);
    for _ in 0..n_labels {
        let mut class = Vec::with_capacity(n_features);
        for _ in 0..n_features {
            class.push(read_f64(&mut input)?);
        }
        weights.push(class);
    }
    let meta = read_str(&mut input)?;
    let mut rest = [0u8; 1];
    match input.read(&mut rest) {
        Ok(0) => {}
        Ok(_) => return Err(Error::ModelFormat("trailing data after model".into())),
        Err(e) => return Err(Error::ModelFormat(format!("read error: {e}"))),
    }
    let vocab_index = vocabulary
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i as u32))
        .collect();
    Ok(LinearModel {
        label_set,
        vocabulary,
        vocab_index,
        weights,
        biases,
        c,
        seed,
        meta,
    })
}

pub fn load_model_from_path(path: impl AsRef<Path>) -> Result<LinearModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_model(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(pairs: &[(&str, f64)]) -> FeatureVector {
        let mut v = FeatureVector::new();
        for (name, value) in pairs {
            v.set(*name, *value);
        }
        v
    }

    fn separable_instances(n_per_class: usize) -> Vec<LabeledInstance> {
        // two clusters along dedicated coordinates
        (0..n_per_class * 2)
            .map(|i| {
                let class = i % 2;
                let jitter = (i / 2) as f64 * 0.01;
                let features = if class == 0 {
                    vector(&[("x", 1.0 + jitter), ("y", 0.1)])
                } else {
                    vector(&[("x", -1.0 - jitter), ("y", -0.1)])
                };
                LabeledInstance::new(
                    format!("i{i}"),
                    features,
                    if class == 0 { "pos" } else { "neg" },
                )
            })
            .collect()
    }

    #[test]
    fn separable_data_fits_exactly() {
        let instances = separable_instances(20);
        let dataset = Dataset::build(&instances, None).unwrap();
        let model = train(&dataset, 1.0, 7).unwrap();
        assert_eq!(accuracy_on(&model, &instances), 1.0);
    }

    #[test]
    fn one_hot_classes_get_their_own_top_weight() {
        let mut instances = Vec::new();
        for class in 0..3 {
            for i in 0..10 {
                instances.push(LabeledInstance::new(
                    format!("c{class}i{i}"),
                    vector(&[(&format!("f{class}"), 1.0)]),
                    format!("class{class}"),
                ));
            }
        }
        let dataset = Dataset::build(&instances, None).unwrap();
        let model = train(&dataset, 1.0, 7).unwrap();
        for class in 0..3 {
            let weights = model.class_weights(&format!("class{class}")).unwrap();
            let own = dataset
                .vocabulary()
                .iter()
                .position(|n| n == &format!("f{class}"))
                .unwrap();
            let best = weights
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            assert_eq!(best, own, "class{class} top weight");
        }
    }

    #[test]
    fn single_label_errors() {
        let instances = vec![
            LabeledInstance::new("a", vector(&[("x", 1.0)]), "same"),
            LabeledInstance::new("b", vector(&[("x", -1.0)]), "same"),
        ];
        let dataset = Dataset::build(&instances, None).unwrap();
        assert!(matches!(train(&dataset, 1.0, 7), Err(Error::SingleLabel(1))));
    }

    #[test]
    fn non_finite_features_are_named() {
        let instances = vec![
            LabeledInstance::new("good", vector(&[("x", 1.0)]), "a"),
            LabeledInstance::new("broken", vector(&[("x", f64::NAN)]), "b"),
        ];
        match Dataset::build(&instances, None) {
            Err(Error::NonFiniteFeature { tweet_id, feature }) => {
                assert_eq!(tweet_id, "broken");
                assert_eq!(feature, "x");
            }
            other => panic!("expected non-finite error, got {other:?}"),
        }
    }

    #[test]
    fn decision_values_match_hand_dot_products() {
        let instances = separable_instances(10);
        let dataset = Dataset::build(&instances, None).unwrap();
        let model = train(&dataset, 1.0, 7).unwrap();
        let probe = vector(&[("x", 0.5), ("y", -2.0), ("unknown", 9.0)]);
        let values = model.decision_values(&probe);
        for label in model.label_set() {
            let weights = model.class_weights(label).unwrap();
            let xi = model.vocabulary().iter().position(|n| n == "x").unwrap();
            let yi = model.vocabulary().iter().position(|n| n == "y").unwrap();
            let class = model.label_set().iter().position(|l| l == label).unwrap();
            let expected = weights[xi] * 0.5 + weights[yi] * -2.0 + model.biases[class];
            assert!((values[label] - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_vector_prediction_is_bias_argmax_with_tie_to_first() {
        let model = LinearModel {
            label_set: vec!["alpha".into(), "beta".into(), "gamma".into()],
            vocabulary: vec!["x".into()],
            vocab_index: HashMap::from([("x".to_string(), 0u32)]),
            weights: vec![vec![1.0], vec![2.0], vec![3.0]],
            biases: vec![0.5, 0.5, 0.1],
            c: 1.0,
            seed: 0,
            meta: String::new(),
        };
        let empty = FeatureVector::new();
        assert_eq!(model.predict(&empty), "alpha", "tie breaks to first label");
        let values = model.decision_values(&empty);
        assert_eq!(values["alpha"], 0.5);
        assert_eq!(values["gamma"], 0.1);
    }

    #[test]
    fn one_hot_training_example_wins_its_class() {
        let mut instances = Vec::new();
        for class in 0..3 {
            for i in 0..5 {
                instances.push(LabeledInstance::new(
                    format!("c{class}i{i}"),
                    vector(&[(&format!("f{class}"), 1.0)]),
                    format!("class{class}"),
                ));
            }
        }
        let dataset = Dataset::build(&instances, None).unwrap();
        let model = train(&dataset, 1.0, 7).unwrap();
        for class in 0..3 {
            let probe = vector(&[(&format!("f{class}"), 1.0)]);
            assert_eq!(model.predict(&probe), format!("class{class}"));
        }
    }

    #[test]
    fn decision_values_are_linear() {
        let instances = separable_instances(10);
        let dataset = Dataset::build(&instances, None).unwrap();
        let model = train(&dataset, 1.0, 7).unwrap();
        let v1 = vector(&[("x", 1.0), ("y", 2.0)]);
        let v2 = vector(&[("x", -0.5), ("y", 0.25)]);
        let (a, b) = (2.0, -3.0);
        let mut combo = FeatureVector::new();
        combo.set("x", a * 1.0 + b * -0.5);
        combo.set("y", a * 2.0 + b * 0.25);
        let d1 = model.decision_values(&v1);
        let d2 = model.decision_values(&v2);
        let dc = model.decision_values(&combo);
        for label in model.label_set() {
            let class = model.label_set().iter().position(|l| l == label).unwrap();
            let bias = model.biases[class];
            let expected = a * d1[label] + b * d2[label] - (a + b - 1.0) * bias;
            assert!(
                (dc[label] - expected).abs() < 1e-9,
                "{label}: {} vs {expected}",
                dc[label]
            );
        }
    }

    #[test]
    fn training_is_deterministic() {
        let instances = separable_instances(25);
        let dataset = Dataset::build(&instances, None).unwrap();
        let a = train(&dataset, 10.0, 99).unwrap();
        let b = train(&dataset, 10.0, 99).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.biases, b.biases);
        let c = train(&dataset, 10.0, 100).unwrap();
        // a different seed may converge elsewhere but must predict the same
        // separable training set
        assert_eq!(accuracy_on(&c, &instances), 1.0);
    }

    #[test]
    fn feature_insertion_order_does_not_change_predictions() {
        let instances = separable_instances(10);
        let dataset = Dataset::build(&instances, None).unwrap();
        let model = train(&dataset, 1.0, 7).unwrap();
        let forward = vector(&[("x", 0.7), ("y", -0.3)]);
        let backward = vector(&[("y", -0.3), ("x", 0.7)]);
        assert_eq!(model.predict(&forward), model.predict(&backward));
    }

    #[test]
    fn rescaled_features_keep_separable_predictions() {
        let instances = separable_instances(20);
        let dataset = Dataset::build(&instances, None).unwrap();
        let model = train(&dataset, 1.0, 7).unwrap();
        for scale in [0.5, 2.0, 8.0] {
            let scaled: Vec<LabeledInstance> = instances
                .iter()
                .map(|inst| {
                    let mut v = FeatureVector::new();
                    for (name, value) in inst.features.iter() {
                        v.set(name, value * scale);
                    }
                    LabeledInstance::new(inst.tweet_id.clone(), v, inst.label.clone())
                })
                .collect();
            let scaled_ds = Dataset::build(&scaled, None).unwrap();
            let scaled_model = train(&scaled_ds, 1.0 / (scale * scale), 7).unwrap();
            for (orig, inst) in instances.iter().zip(&scaled) {
                assert_eq!(
                    model.predict(&orig.features),
                    scaled_model.predict(&inst.features)
                );
            }
        }
    }

    #[test]
    fn tune_c_single_value_grid() {
        let instances = separable_instances(10);
        let refs: Vec<&LabeledInstance> = instances.iter().collect();
        assert_eq!(tune_c(&refs, &[0.3], 7).unwrap(), 0.3);
    }

    #[test]
    fn tune_c_ties_pick_smallest() {
        // fully separable: every C scores 1.0
        let instances = separable_instances(20);
        let refs: Vec<&LabeledInstance> = instances.iter().collect();
        let c = tune_c(&refs, &[10.0, 0.01, 1.0], 7).unwrap();
        assert_eq!(c, 0.01);
    }

    #[test]
    fn tune_c_matches_exhaustive_grid_oracle() {
        use rand::Rng;
        // noisy labels: large C overfits, small C stays on the majority
        // signal; verify tune_c agrees with re-running its own protocol
        let mut rng = ChaCha8Rng::seed_from_u64(555);
        let mut instances = Vec::new();
        for i in 0..60 {
            let class = i % 2;
            let (cx, _cy) = if class == 0 { (1.0, 1.0) } else { (-1.0, -1.0) };
            let noise_flip = rng.gen_bool(0.15);
            let label = if noise_flip { 1 - class } else { class };
            instances.push(LabeledInstance::new(
                format!("i{i}"),
                vector(&[
                    ("x", cx + rng.gen_range(-0.4..0.4)),
                    (&format!("id{i}"), 1.0), // memorization feature
                ]),
                format!("c{label}"),
            ));
        }
        let refs: Vec<&LabeledInstance> = instances.iter().collect();
        let grid = [0.01, 0.1, 1.0, 10.0, 100.0];
        let picked = tune_c(&refs, &grid, 42).unwrap();

        // exhaustive oracle over the same folds
        let labels: Vec<String> = refs.iter().map(|i| i.label.clone()).collect();
        let plan =
            crate::evalharness::stratified_folds(&labels, 5, 1, derive_seed(42, 0x1A11)).unwrap();
        let mut best = (f64::NEG_INFINITY, f64::INFINITY);
        for &c in &grid {
            let mut scores = Vec::new();
            for fold in 0..5 {
                let train_fold: Vec<&LabeledInstance> = refs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| plan.fold_of(0, *i) != fold)
                    .map(|(_, inst)| *inst)
                    .collect();
                let test_fold: Vec<&LabeledInstance> = refs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| plan.fold_of(0, *i) == fold)
                    .map(|(_, inst)| *inst)
                    .collect();
                let ds = Dataset::build(train_fold, None).unwrap();
                let model = train(&ds, c, derive_seed(42, 0xC0 + fold as u64)).unwrap();
                scores.push(accuracy_on(&model, test_fold));
            }
            let mean = scores.iter().sum::<f64>() / scores.len() as f64;
            if mean > best.0 {
                best = (mean, c);
            }
        }
        assert_eq!(picked, best.1, "tune_c disagrees with exhaustive oracle");
    }

    #[test]
    fn model_roundtrip_preserves_predictions() {
        let instances = separable_instances(20);
        let dataset = Dataset::build(&instances, None).unwrap();
        let mut model = train(&dataset, 2.0, 123).unwrap();
        model.set_meta("test model");
        let mut buf = Vec::new();
        save_model(&model, &mut buf).unwrap();
        let loaded = load_model(buf.as_slice()).unwrap();
        assert_eq!(loaded.label_set(), model.label_set());
        assert_eq!(loaded.c(), 2.0);
        assert_eq!(loaded.seed(), 123);
        assert_eq!(loaded.meta(), "test model");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        use rand::Rng;
        for i in 0..100 {
            let probe = vector(&[
                ("x", rng.gen_range(-3.0..3.0)),
                ("y", rng.gen_range(-3.0..3.0)),
                (&format!("junk{i}"), 1.0),
            ]);
            assert_eq!(model.predict(&probe), loaded.predict(&probe));
            let a = model.decision_values(&probe);
            let b = loaded.decision_values(&probe);
            for label in model.label_set() {
                assert!((a[label] - b[label]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn truncated_model_file_errors() {
        let instances = separable_instances(5);
        let dataset = Dataset::build(&instances, None).unwrap();
        let model = train(&dataset, 1.0, 7).unwrap();
        let mut buf = Vec::new();
        save_model(&model, &mut buf).unwrap();
        for cut in [4usize, 9, buf.len() / 2, buf.len() - 1] {
            assert!(
                matches!(load_model(&buf[..cut]), Err(Error::ModelFormat(_))),
                "cut at {cut} should fail"
            );
        }
        // trailing garbage also fails
        let mut extended = buf.clone();
        extended.push(0);
        assert!(matches!(load_model(extended.as_slice()), Err(Error::ModelFormat(_))));
        // wrong magic
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(load_model(bad.as_slice()), Err(Error::ModelFormat(_))));
    }
}
