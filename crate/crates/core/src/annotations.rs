//! Crowd annotation aggregation and agreement analytics.
//!
//! Judgments arrive as one record per (tweet, annotator) pair, each holding
//! a purpose response (eleven options, foldable to three coarse classes) and
//! a relevance response. This module filters unreliable annotators, derives
//! strong-majority gold labels, and computes the agreement statistics and
//! confusion tables used to characterize the annotation task.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The eleven purpose responses, in questionnaire display order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PurposeLabel {
    Agree,
    Praise,
    Support,
    Hypocrisy,
    Mistake,
    Disagree,
    Ridicule,
    Criticize,
    Vent,
    Information,
    NoneOfAbove,
}

pub const PURPOSE_LABELS: [PurposeLabel; 11] = [
    PurposeLabel::Agree,
    PurposeLabel::Praise,
    PurposeLabel::Support,
    PurposeLabel::Hypocrisy,
    PurposeLabel::Mistake,
    PurposeLabel::Disagree,
    PurposeLabel::Ridicule,
    PurposeLabel::Criticize,
    PurposeLabel::Vent,
    PurposeLabel::Information,
    PurposeLabel::NoneOfAbove,
];

impl PurposeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PurposeLabel::Agree => "agree",
            PurposeLabel::Praise => "praise",
            PurposeLabel::Support => "support",
            PurposeLabel::Hypocrisy => "hypocrisy",
            PurposeLabel::Mistake => "mistake",
            PurposeLabel::Disagree => "disagree",
            PurposeLabel::Ridicule => "ridicule",
            PurposeLabel::Criticize => "criticize",
            PurposeLabel::Vent => "vent",
            PurposeLabel::Information => "information",
            PurposeLabel::NoneOfAbove => "none_of_above",
        }
    }

    pub fn parse(name: &str) -> Result<PurposeLabel> {
        PURPOSE_LABELS
            .iter()
            .copied()
            .find(|l| l.as_str() == name)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    pub fn coarse(self) -> CoarseLabel {
        match self {
            PurposeLabel::Agree | PurposeLabel::Praise | PurposeLabel::Support => {
                CoarseLabel::Favour
            }
            PurposeLabel::Hypocrisy
            | PurposeLabel::Mistake
            | PurposeLabel::Disagree
            | PurposeLabel::Ridicule
            | PurposeLabel::Criticize
            | PurposeLabel::Vent => CoarseLabel::Oppose,
            PurposeLabel::Information | PurposeLabel::NoneOfAbove => CoarseLabel::Other,
        }
    }
}

impl fmt::Display for PurposeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The three coarse purpose classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoarseLabel {
    Favour,
    Oppose,
    Other,
}

pub const COARSE_LABELS: [CoarseLabel; 3] =
    [CoarseLabel::Favour, CoarseLabel::Oppose, CoarseLabel::Other];

impl CoarseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CoarseLabel::Favour => "favour",
            CoarseLabel::Oppose => "oppose",
            CoarseLabel::Other => "other",
        }
    }

    pub fn parse(name: &str) -> Result<CoarseLabel> {
        COARSE_LABELS
            .iter()
            .copied()
            .find(|l| l.as_str() == name)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }
}

impl fmt::Display for CoarseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Relevance responses for the second question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelevanceLabel {
    Political,
    NotPolitical,
}

pub const RELEVANCE_LABELS: [RelevanceLabel; 2] =
    [RelevanceLabel::Political, RelevanceLabel::NotPolitical];

impl RelevanceLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RelevanceLabel::Political => "political",
            RelevanceLabel::NotPolitical => "not_political",
        }
    }

    pub fn parse(name: &str) -> Result<RelevanceLabel> {
        RELEVANCE_LABELS
            .iter()
            .copied()
            .find(|l| l.as_str() == name)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Question {
    Q1,
    Q2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Granularity {
    Fine,
    Coarse,
}

/// How the per-tweet majority is constructed for confusion tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MajorityRule {
    /// Unique most-frequent label; ties yield no majority.
    Plurality,
    /// Label chosen more often than all others combined.
    StrongMajority,
}

/// One annotator's response to one tweet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub tweet_id: String,
    pub annotator_id: String,
    pub q1: PurposeLabel,
    pub q2: RelevanceLabel,
}

/// All judgments for one tweet.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnotationSet {
    pub tweet_id: String,
    pub records: Vec<AnnotationRecord>,
}

impl AnnotationSet {
    pub fn new(tweet_id: impl Into<String>, records: Vec<AnnotationRecord>) -> Result<Self> {
        let tweet_id = tweet_id.into();
        if records.is_empty() {
            return Err(Error::InvalidInput(format!(
                "annotation set {tweet_id} has no records"
            )));
        }
        let mut annotators = BTreeSet::new();
        for record in &records {
            if record.tweet_id != tweet_id {
                return Err(Error::InvalidInput(format!(
                    "record for tweet {} in set {tweet_id}",
                    record.tweet_id
                )));
            }
            if !annotators.insert(record.annotator_id.clone()) {
                return Err(Error::InvalidInput(format!(
                    "annotator {} appears twice on tweet {tweet_id}",
                    record.annotator_id
                )));
            }
        }
        Ok(AnnotationSet { tweet_id, records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Groups loose records into per-tweet sets, sorted by tweet id.
pub fn group_into_sets(records: Vec<AnnotationRecord>) -> Result<Vec<AnnotationSet>> {
    let mut by_tweet: BTreeMap<String, Vec<AnnotationRecord>> = BTreeMap::new();
    for record in records {
        by_tweet
            .entry(record.tweet_id.clone())
            .or_default()
            .push(record);
    }
    by_tweet
        .into_iter()
        .map(|(tweet_id, records)| AnnotationSet::new(tweet_id, records))
        .collect()
}

/// The label a record contributes under a question/granularity view.
fn record_key(record: &AnnotationRecord, question: Question, granularity: Granularity) -> &'static str {
    match question {
        Question::Q1 => match granularity {
            Granularity::Fine => record.q1.as_str(),
            Granularity::Coarse => record.q1.coarse().as_str(),
        },
        Question::Q2 => record.q2.as_str(),
    }
}

/// Display order of the label inventory for a question/granularity view.
pub fn label_order(question: Question, granularity: Granularity) -> Vec<&'static str> {
    match question {
        Question::Q1 => match granularity {
            Granularity::Fine => PURPOSE_LABELS.iter().map(|l| l.as_str()).collect(),
            Granularity::Coarse => COARSE_LABELS.iter().map(|l| l.as_str()).collect(),
        },
        Question::Q2 => RELEVANCE_LABELS.iter().map(|l| l.as_str()).collect(),
    }
}

fn label_counts(
    set: &AnnotationSet,
    question: Question,
    granularity: Granularity,
) -> BTreeMap<&'static str, usize> {
    let mut counts = BTreeMap::new();
    for record in &set.records {
        *counts.entry(record_key(record, question, granularity)).or_insert(0) += 1;
    }
    counts
}

/// Unique most-frequent label of a set, if any.
fn plurality_label(
    set: &AnnotationSet,
    question: Question,
    granularity: Granularity,
) -> Option<&'static str> {
    let counts = label_counts(set, question, granularity);
    let max = *counts.values().max()?;
    let mut best = counts.iter().filter(|(_, c)| **c == max);
    let label = best.next()?.0;
    if best.next().is_some() {
        None
    } else {
        Some(label)
    }
}

/// A gold label under one of the three label inventories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoldValue {
    Fine(PurposeLabel),
    Coarse(CoarseLabel),
    Relevance(RelevanceLabel),
}

impl GoldValue {
    pub fn as_str(&self) -> &'static str {
        match self {
            GoldValue::Fine(l) => l.as_str(),
            GoldValue::Coarse(l) => l.as_str(),
            GoldValue::Relevance(l) => l.as_str(),
        }
    }
}

/// A strong-majority label for one tweet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldLabel {
    pub tweet_id: String,
    pub label: GoldValue,
    pub support_count: usize,
    pub total_count: usize,
}

/// The label chosen more often than all other labels combined, if any.
pub fn strong_majority_label(
    set: &AnnotationSet,
    question: Question,
    granularity: Granularity,
) -> Option<GoldLabel> {
    let counts = label_counts(set, question, granularity);
    let total = set.records.len();
    let (&label, &support) = counts.iter().max_by_key(|(_, c)| **c)?;
    if support <= total - support {
        return None;
    }
    let value = match question {
        Question::Q1 => match granularity {
            Granularity::Fine => GoldValue::Fine(PurposeLabel::parse(label).expect("known label")),
            Granularity::Coarse => {
                GoldValue::Coarse(CoarseLabel::parse(label).expect("known label"))
            }
        },
        Question::Q2 => GoldValue::Relevance(RelevanceLabel::parse(label).expect("known label")),
    };
    Some(GoldLabel {
        tweet_id: set.tweet_id.clone(),
        label: value,
        support_count: support,
        total_count: total,
    })
}

/// Strong-majority gold labels over all sets with at least
/// `min_annotations` records.
pub fn gold_labels(
    sets: &[AnnotationSet],
    question: Question,
    granularity: Granularity,
    min_annotations: usize,
) -> Vec<GoldLabel> {
    sets.iter()
        .filter(|s| s.len() >= min_annotations)
        .filter_map(|s| strong_majority_label(s, question, granularity))
        .collect()
}

/// Per-annotator probability of matching the per-tweet plurality label.
///
/// Only sets with at least two records enter the computation; a tweet with
/// a tied plurality counts against every annotator who judged it.
/// Annotators with no countable assignments are absent from the map.
pub fn annotator_majority_agreement(
    sets: &[AnnotationSet],
    question: Question,
) -> BTreeMap<String, f64> {
    let mut assignments: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for set in sets {
        if set.len() < 2 {
            continue;
        }
        let majority = plurality_label(set, question, Granularity::Fine);
        for record in &set.records {
            let entry = assignments.entry(record.annotator_id.clone()).or_insert((0, 0));
            entry.1 += 1;
            if majority == Some(record_key(record, question, Granularity::Fine)) {
                entry.0 += 1;
            }
        }
    }
    assignments
        .into_iter()
        .map(|(id, (matches, total))| (id, matches as f64 / total as f64))
        .collect()
}

/// Drops annotators whose agreement probability lies more than two
/// population standard deviations below the mean, removing their records
/// and any sets left empty. Applied once, not iterated.
pub fn filter_poor_annotators(
    sets: Vec<AnnotationSet>,
) -> Result<(Vec<AnnotationSet>, Vec<String>)> {
    let agreement = annotator_majority_agreement(&sets, Question::Q1);
    if agreement.len() < 2 {
        return Err(Error::TooFewAnnotators(agreement.len()));
    }
    let n = agreement.len() as f64;
    let mean = agreement.values().sum::<f64>() / n;
    let variance = agreement.values().map(|p| (p - mean).powi(2)).sum::<f64>() / n;
    let threshold = mean - 2.0 * variance.sqrt();
    let dropped: Vec<String> = agreement
        .iter()
        .filter(|(_, p)| **p < threshold)
        .map(|(id, _)| id.clone())
        .collect();
    let dropped_set: BTreeSet<&str> = dropped.iter().map(String::as_str).collect();
    let kept = sets
        .into_iter()
        .filter_map(|set| {
            let records: Vec<AnnotationRecord> = set
                .records
                .into_iter()
                .filter(|r| !dropped_set.contains(r.annotator_id.as_str()))
                .collect();
            if records.is_empty() {
                None
            } else {
                Some(AnnotationSet {
                    tweet_id: set.tweet_id,
                    records,
                })
            }
        })
        .collect();
    Ok((kept, dropped))
}

/// Row of the annotations-per-tweet histogram.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HistogramRow {
    pub tweets: usize,
    pub annotations: usize,
}

/// Histogram of annotation counts: size → (tweets with that many
/// annotations, total annotations they carry).
pub fn annotation_count_histogram(sets: &[AnnotationSet]) -> BTreeMap<usize, HistogramRow> {
    let mut histogram: BTreeMap<usize, HistogramRow> = BTreeMap::new();
    for set in sets {
        let row = histogram.entry(set.len()).or_default();
        row.tweets += 1;
        row.annotations += set.len();
    }
    histogram
}

/// Majority class size distribution over sets with exactly three records:
/// size ∈ {1, 2, 3} → percentage of such sets.
pub fn majority_class_size_histogram(
    sets: &[AnnotationSet],
    question: Question,
    granularity: Granularity,
) -> Result<BTreeMap<usize, f64>> {
    let mut counts = BTreeMap::from([(1usize, 0usize), (2, 0), (3, 0)]);
    let mut total = 0usize;
    for set in sets.iter().filter(|s| s.len() == 3) {
        let mcs = label_counts(set, question, granularity)
            .values()
            .copied()
            .max()
            .expect("non-empty set");
        *counts.get_mut(&mcs).expect("mcs in 1..=3") += 1;
        total += 1;
    }
    if total == 0 {
        return Err(Error::InvalidInput(
            "no sets with exactly three annotations".into(),
        ));
    }
    Ok(counts
        .into_iter()
        .map(|(size, count)| (size, count as f64 / total as f64 * 100.0))
        .collect())
}

/// Mean percentage of agreeing unordered annotator pairs per tweet.
///
/// Sets with fewer than two records have no pairs and are skipped.
pub fn inter_annotator_agreement(
    sets: &[AnnotationSet],
    question: Question,
    granularity: Granularity,
) -> Result<f64> {
    let mut sum = 0.0;
    let mut tweets = 0usize;
    for set in sets.iter().filter(|s| s.len() >= 2) {
        let keys: Vec<&str> = set
            .records
            .iter()
            .map(|r| record_key(r, question, granularity))
            .collect();
        let n = keys.len();
        let mut agree = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                if keys[i] == keys[j] {
                    agree += 1;
                }
            }
        }
        let pairs = n * (n - 1) / 2;
        sum += agree as f64 / pairs as f64;
        tweets += 1;
    }
    if tweets == 0 {
        return Err(Error::InvalidInput(
            "no sets with at least two annotations".into(),
        ));
    }
    Ok(sum / tweets as f64 * 100.0)
}

/// Unweighted mean, over annotators, of the probability of picking the
/// per-tweet majority label.
pub fn average_probability_majority(sets: &[AnnotationSet], question: Question) -> Result<f64> {
    let agreement = annotator_majority_agreement(sets, question);
    if agreement.is_empty() {
        return Err(Error::InvalidInput("no countable assignments".into()));
    }
    Ok(agreement.values().sum::<f64>() / agreement.len() as f64)
}

/// Square label-by-label count table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabelConfusion {
    pub labels: Vec<&'static str>,
    /// counts[x][y]: records labeled y on tweets whose majority label is x.
    pub counts: Vec<Vec<u64>>,
}

impl LabelConfusion {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("majority\\assigned");
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

/// Cross-tabulates individual assignments against per-tweet majority
/// labels. Sets without a majority under `rule` contribute nothing.
pub fn confusion_matrix(
    sets: &[AnnotationSet],
    question: Question,
    granularity: Granularity,
    rule: MajorityRule,
) -> LabelConfusion {
    let labels = label_order(question, granularity);
    let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let mut counts = vec![vec![0u64; labels.len()]; labels.len()];
    for set in sets {
        let majority = match rule {
            MajorityRule::Plurality => plurality_label(set, question, granularity),
            MajorityRule::StrongMajority => {
                strong_majority_label(set, question, granularity).map(|g| g.label.as_str())
            }
        };
        let Some(majority) = majority else { continue };
        let x = index[majority];
        for record in &set.records {
            let y = index[record_key(record, question, granularity)];
            counts[x][y] += 1;
        }
    }
    LabelConfusion { labels, counts }
}

/// Percentage of gold labels per category, over the full label inventory of
/// the golds' granularity, in display order.
pub fn category_distribution(golds: &[GoldLabel]) -> Result<Vec<(&'static str, f64)>> {
    if golds.is_empty() {
        return Err(Error::InvalidInput("no gold labels".into()));
    }
    let order: Vec<&'static str> = match golds[0].label {
        GoldValue::Fine(_) => PURPOSE_LABELS.iter().map(|l| l.as_str()).collect(),
        GoldValue::Coarse(_) => COARSE_LABELS.iter().map(|l| l.as_str()).collect(),
        GoldValue::Relevance(_) => RELEVANCE_LABELS.iter().map(|l| l.as_str()).collect(),
    };
    let mut counts: BTreeMap<&str, usize> = order.iter().map(|l| (*l, 0)).collect();
    for gold in golds {
        let key = gold.label.as_str();
        match counts.get_mut(key) {
            Some(c) => *c += 1,
            None => {
                return Err(Error::InvalidInput(format!(
                    "gold label {key:?} does not match the granularity of the first gold"
                )))
            }
        }
    }
    let total = golds.len() as f64;
    Ok(order
        .into_iter()
        .map(|label| (label, counts[label] as f64 / total * 100.0))
        .collect())
}

/// Purpose-by-emotion row-percentage table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Crosstab {
    pub emotions: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl Crosstab {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("purpose");
        for emotion in &self.emotions {
            out.push('\t');
            out.push_str(emotion);
        }
        out.push('\n');
        for (label, cells) in &self.rows {
            out.push_str(label);
            for cell in cells {
                out.push('\t');
                out.push_str(&format!("{cell:.2}"));
            }
            out.push('\n');
        }
        out
    }
}

fn purpose_row_rank(label: &str) -> (usize, String) {
    if let Ok(l) = PurposeLabel::parse(label) {
        return (
            PURPOSE_LABELS.iter().position(|p| *p == l).expect("known"),
            String::new(),
        );
    }
    if let Ok(l) = CoarseLabel::parse(label) {
        return (
            COARSE_LABELS.iter().position(|c| *c == l).expect("known"),
            String::new(),
        );
    }
    (usize::MAX, label.to_string())
}

/// Row percentages of emotion gold labels within each purpose gold label,
/// over tweets present in both maps.
pub fn purpose_emotion_crosstab(
    purpose_golds: &BTreeMap<String, String>,
    emotion_golds: &BTreeMap<String, String>,
) -> Result<Crosstab> {
    let mut cells: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut emotions: BTreeSet<String> = BTreeSet::new();
    let mut matched = 0usize;
    for (tweet_id, purpose) in purpose_golds {
        let Some(emotion) = emotion_golds.get(tweet_id) else {
            continue;
        };
        matched += 1;
        emotions.insert(emotion.clone());
        *cells
            .entry(purpose.clone())
            .or_default()
            .entry(emotion.clone())
            .or_insert(0) += 1;
    }
    if matched == 0 {
        return Err(Error::EmptyIntersection);
    }
    let emotions: Vec<String> = emotions.into_iter().collect();
    let mut labels: Vec<String> = cells.keys().cloned().collect();
    labels.sort_by_key(|l| purpose_row_rank(l));
    let rows = labels
        .into_iter()
        .map(|label| {
            let row = &cells[&label];
            let total: usize = row.values().sum();
            let percentages = emotions
                .iter()
                .map(|e| row.get(e).copied().unwrap_or(0) as f64 / total as f64 * 100.0)
                .collect();
            (label, percentages)
        })
        .collect();
    Ok(Crosstab { emotions, rows })
}

/// Reads annotation records from a TSV with header
/// `tweet_id<TAB>annotator_id<TAB>q1<TAB>q2`.
pub fn load_annotations(path: impl AsRef<Path>) -> Result<Vec<AnnotationRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();
    match lines.next() {
        Some((_, Ok(header))) if header.trim_end() == "tweet_id\tannotator_id\tq1\tq2" => {}
        Some((_, Ok(header))) => {
            return Err(Error::parse(
                path,
                1,
                format!("unexpected header {header:?}"),
            ))
        }
        Some((_, Err(e))) => return Err(Error::io(path, e)),
        None => return Err(Error::parse(path, 1, "empty annotation file")),
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("expected 4 fields, got {}", fields.len()),
            ));
        }
        let q1 = PurposeLabel::parse(fields[2].trim())
            .map_err(|e| Error::parse(path, idx + 1, e.to_string()))?;
        let q2 = RelevanceLabel::parse(fields[3].trim())
            .map_err(|e| Error::parse(path, idx + 1, e.to_string()))?;
        records.push(AnnotationRecord {
            tweet_id: fields[0].trim().to_string(),
            annotator_id: fields[1].trim().to_string(),
            q1,
            q2,
        });
    }
    Ok(records)
}

/// Writes gold labels as `tweet_id<TAB>label<TAB>support<TAB>total`.
pub fn save_gold_labels<W: Write>(mut out: W, golds: &[GoldLabel]) -> Result<()> {
    let io_err = |e| Error::io("<writer>", e);
    writeln!(out, "tweet_id\tlabel\tsupport\ttotal").map_err(io_err)?;
    for gold in golds {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            gold.tweet_id,
            gold.label.as_str(),
            gold.support_count,
            gold.total_count
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// Reads `tweet_id → label` pairs from a TSV. Accepts the gold file format
/// (extra columns ignored) and bare two-column files; a leading
/// `tweet_id...` header row is skipped.
pub fn load_label_map(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        if idx == 0 && line.starts_with("tweet_id\t") {
            continue;
        }
        let mut fields = line.split('\t');
        let (id, label) = match (fields.next(), fields.next()) {
            (Some(id), Some(label)) => (id.trim(), label.trim()),
            _ => {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    "expected tweet_id<TAB>label",
                ))
            }
        };
        if map.insert(id.to_string(), label.to_string()).is_some() {
            return Err(Error::parse(path, idx + 1, format!("duplicate tweet id {id:?}")));
        }
    }
    Ok(map)
}
