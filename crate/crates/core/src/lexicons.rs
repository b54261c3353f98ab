//! Word-emotion association resources.
//!
//! Two lexicons feed feature extraction: a manually built association
//! lexicon over eight basic emotions plus two polarities, and a hashtag
//! emotion lexicon induced from a hashtag-labeled corpus by keeping
//! positive-PMI (word, emotion) pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::corpus::Tweet;
use crate::error::{Error, Result};
use crate::textproc::{TokenKind, Tokenizer};

/// Labels the association lexicon may carry per word.
pub const EMOTION_LEXICON_LABELS: [&str; 10] = [
    "anger",
    "anticipation",
    "disgust",
    "fear",
    "joy",
    "sadness",
    "surprise",
    "trust",
    "positive",
    "negative",
];

fn canonical_label(name: &str) -> Option<&'static str> {
    EMOTION_LEXICON_LABELS.iter().find(|l| **l == name).copied()
}

/// Word → associated emotion/polarity labels.
#[derive(Clone, Debug, Default)]
pub struct EmotionLexicon {
    entries: BTreeMap<String, BTreeSet<&'static str>>,
}

impl EmotionLexicon {
    /// Reads `word<TAB>label<TAB>{0,1}` triples; only flag-1 rows create
    /// associations. A word may carry at most one of positive/negative.
    pub fn from_path(path: impl AsRef<Path>) -> Result<EmotionLexicon> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut entries: BTreeMap<String, BTreeSet<&'static str>> = BTreeMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (word, label, flag) = match (fields.next(), fields.next(), fields.next()) {
                (Some(w), Some(l), Some(f)) if fields.next().is_none() => (w, l, f),
                _ => {
                    return Err(Error::parse(
                        path,
                        idx + 1,
                        "expected word<TAB>label<TAB>flag",
                    ))
                }
            };
            let label = canonical_label(label.trim())
                .ok_or_else(|| Error::UnknownLabel(label.trim().to_string()))?;
            let flag = flag.trim();
            match flag {
                "0" => continue,
                "1" => {}
                other => {
                    return Err(Error::parse(
                        path,
                        idx + 1,
                        format!("association flag must be 0 or 1, got {other:?}"),
                    ))
                }
            }
            let labels = entries.entry(word.trim().to_lowercase()).or_default();
            let polarity_conflict = (label == "positive" && labels.contains("negative"))
                || (label == "negative" && labels.contains("positive"));
            if polarity_conflict {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("word {word:?} would carry both polarities"),
                ));
            }
            labels.insert(label);
        }
        Ok(EmotionLexicon { entries })
    }

    pub fn from_entries<I, S>(entries: I) -> Result<EmotionLexicon>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut map: BTreeMap<String, BTreeSet<&'static str>> = BTreeMap::new();
        for (word, label) in entries {
            let label = canonical_label(label.as_ref())
                .ok_or_else(|| Error::UnknownLabel(label.as_ref().to_string()))?;
            map.entry(word.as_ref().to_lowercase()).or_default().insert(label);
        }
        Ok(EmotionLexicon { entries: map })
    }

    pub fn labels(&self, word: &str) -> Option<&BTreeSet<&'static str>> {
        self.entries.get(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Tweet-level presence counts behind PMI.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CooccurrenceCounts {
    pub n_tweets: u64,
    pub word_count: BTreeMap<String, u64>,
    pub emotion_count: BTreeMap<String, u64>,
    pub joint: BTreeMap<(String, String), u64>,
}

/// Thresholds below which unsmoothed PMI is considered noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PmiParams {
    pub min_joint: u64,
    pub min_word: u64,
}

impl Default for PmiParams {
    fn default() -> Self {
        PmiParams {
            min_joint: 2,
            min_word: 5,
        }
    }
}

/// Lookup-side word tokens of a tweet: word and hashtag surfaces,
/// lowercased, hashtag marks stripped. Emotion-hashtag tokens themselves do
/// not count as words.
fn word_side_tokens(
    tweet: &Tweet,
    tokenizer: &Tokenizer,
    emotion_hashtags: &BTreeSet<String>,
) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut words = BTreeSet::new();
    let mut emotions = BTreeSet::new();
    for token in tokenizer.tokenize(&tweet.text) {
        match token.kind {
            TokenKind::Word => {
                words.insert(token.surface.to_lowercase());
            }
            TokenKind::Hashtag => {
                let stripped = token.surface[1..].to_lowercase();
                if stripped.is_empty() {
                    continue;
                }
                if emotion_hashtags.contains(&stripped) {
                    emotions.insert(stripped);
                } else {
                    words.insert(stripped);
                }
            }
            _ => {}
        }
    }
    (words, emotions)
}

/// Counts tweet-level presence of words, emotion hashtags, and their
/// co-occurrence. A tweet tagged with k emotion hashtags contributes to all
/// k emotion counts.
pub fn count_cooccurrence(
    corpus: &[Tweet],
    emotion_hashtags: &BTreeSet<String>,
    tokenizer: &Tokenizer,
) -> CooccurrenceCounts {
    let mut counts = CooccurrenceCounts::default();
    for tweet in corpus {
        counts.n_tweets += 1;
        let (words, emotions) = word_side_tokens(tweet, tokenizer, emotion_hashtags);
        for word in &words {
            *counts.word_count.entry(word.clone()).or_insert(0) += 1;
        }
        for emotion in &emotions {
            *counts.emotion_count.entry(emotion.clone()).or_insert(0) += 1;
        }
        for word in &words {
            for emotion in &emotions {
                *counts
                    .joint
                    .entry((word.clone(), emotion.clone()))
                    .or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Base-2 pointwise mutual information of a (word, emotion) pair, or `None`
/// when the pair falls under the counting thresholds. No smoothing.
pub fn pmi(
    counts: &CooccurrenceCounts,
    word: &str,
    emotion: &str,
    params: &PmiParams,
) -> Option<f64> {
    let joint = *counts
        .joint
        .get(&(word.to_string(), emotion.to_string()))
        .unwrap_or(&0);
    let word_count = *counts.word_count.get(word).unwrap_or(&0);
    let emotion_count = *counts.emotion_count.get(emotion).unwrap_or(&0);
    if joint < params.min_joint || word_count < params.min_word {
        return None;
    }
    if word_count == 0 || emotion_count == 0 || counts.n_tweets == 0 {
        return None;
    }
    let numerator = (joint as u128 * counts.n_tweets as u128) as f64;
    let denominator = (word_count as u128 * emotion_count as u128) as f64;
    Some((numerator / denominator).log2())
}

/// (word, emotion) → positive PMI weight table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HashtagEmotionLexicon {
    emotions: Vec<String>,
    weights: BTreeMap<(String, String), f64>,
}

impl HashtagEmotionLexicon {
    pub fn emotions(&self) -> &[String] {
        &self.emotions
    }

    pub fn weight(&self, word: &str, emotion: &str) -> Option<f64> {
        self.weights
            .get(&(word.to_string(), emotion.to_string()))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), &f64)> {
        self.weights.iter()
    }

    /// Summed PMI weights of the given lookup tokens per emotion; absent
    /// pairs contribute nothing and only nonzero sums are emitted. Token
    /// occurrences each count: repeating a token doubles its contribution.
    pub fn feature_values<S: AsRef<str>>(&self, tokens: &[S]) -> BTreeMap<String, f64> {
        let mut values: BTreeMap<String, f64> = BTreeMap::new();
        for token in tokens {
            let token = token.as_ref();
            for emotion in &self.emotions {
                if let Some(w) = self.weight(token, emotion) {
                    *values.entry(emotion.clone()).or_insert(0.0) += w;
                }
            }
        }
        values.retain(|_, v| *v != 0.0);
        values
    }

    /// Writes the lexicon as a TSV with an emotion header line. Weights are
    /// printed with nine decimals so a round trip stays within 1e-9.
    pub fn save<W: Write>(&self, mut out: W) -> Result<()> {
        let io_err = |e| Error::io("<writer>", e);
        write!(out, "#emotions:").map_err(io_err)?;
        for emotion in &self.emotions {
            write!(out, "\t{emotion}").map_err(io_err)?;
        }
        writeln!(out).map_err(io_err)?;
        for ((word, emotion), weight) in &self.weights {
            writeln!(out, "{word}\t{emotion}\t{weight:.9}").map_err(io_err)?;
        }
        Ok(())
    }

    pub fn save_to_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.save(&mut buf)?;
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<HashtagEmotionLexicon> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = BufReader::new(file).lines().enumerate();
        let header = match lines.next() {
            Some((_, line)) => line.map_err(|e| Error::io(path, e))?,
            None => return Err(Error::parse(path, 1, "missing #emotions: header")),
        };
        let mut fields = header.split('\t');
        if fields.next() != Some("#emotions:") {
            return Err(Error::parse(path, 1, "first line must start with #emotions:"));
        }
        let emotions: Vec<String> = fields.map(String::from).collect();
        let known: BTreeSet<&str> = emotions.iter().map(String::as_str).collect();
        if known.len() != emotions.len() {
            return Err(Error::parse(path, 1, "duplicate emotion names in header"));
        }
        let mut weights = BTreeMap::new();
        for (idx, line) in lines {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (word, emotion, weight) = match (fields.next(), fields.next(), fields.next()) {
                (Some(w), Some(e), Some(v)) => (w, e, v),
                _ => {
                    return Err(Error::parse(
                        path,
                        idx + 1,
                        "expected word<TAB>emotion<TAB>weight",
                    ))
                }
            };
            if !known.contains(emotion) {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("emotion {emotion:?} not in header"),
                ));
            }
            let weight: f64 = weight.trim().parse().map_err(|_| {
                Error::parse(path, idx + 1, format!("bad weight {weight:?}"))
            })?;
            if !(weight > 0.0) {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("weights must be positive, got {weight}"),
                ));
            }
            weights.insert((word.to_string(), emotion.to_string()), weight);
        }
        Ok(HashtagEmotionLexicon { emotions, weights })
    }
}

/// Reads the emotion hashtag inventory: one lowercase hashtag word per
/// line, without `#`.
pub fn load_emotion_hashtags(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push(trimmed.to_lowercase());
    }
    Ok(out)
}

/// Induces the hashtag emotion lexicon: counts tweet-level co-occurrence of
/// words and emotion hashtags, scores pairs with base-2 PMI, and keeps only
/// strictly positive weights.
pub fn build_hashtag_lexicon(
    corpus: &[Tweet],
    emotion_hashtags: &[String],
    tokenizer: &Tokenizer,
    params: &PmiParams,
) -> Result<HashtagEmotionLexicon> {
    let mut seen = BTreeSet::new();
    let mut emotions = Vec::new();
    for tag in emotion_hashtags {
        let tag = tag.to_lowercase();
        if !seen.insert(tag.clone()) {
            return Err(Error::InvalidInput(format!(
                "duplicate emotion hashtag {tag:?}"
            )));
        }
        emotions.push(tag);
    }
    let counts = count_cooccurrence(corpus, &seen, tokenizer);
    let mut weights = BTreeMap::new();
    for (word, emotion) in counts.joint.keys() {
        if let Some(score) = pmi(&counts, word, emotion, params) {
            if score > 0.0 {
                weights.insert((word.clone(), emotion.clone()), score);
            }
        }
    }
    Ok(HashtagEmotionLexicon { emotions, weights })
}
