//! Sparse feature extraction.
//!
//! Every tweet becomes a map from namespaced feature names to real values.
//! Name prefixes encode the feature group so that ablation can remove one
//! group without touching any other:
//!
//! - `W1:`..`W4:` word n-grams, `WS3:`/`WS4:` skipped n-grams, `C3:`..`C5:`
//!   character n-grams (group `ngrams`)
//! - `POS:` tag counts (group `pos`)
//! - `CL:` word cluster presence (group `clusters`)
//! - `EMO:` association lexicon counters (group `emolex`)
//! - `PUNC:` punctuation runs (group `punctuation`)
//! - `HPMI:` hashtag lexicon sums (group `hashtag_pmi`)
//! - `META:allcaps`, `META:negated_contexts`, `META:emoticon_pos`/`_neg`,
//!   `META:hashtags`, `META:elongated` (their own one-feature groups)

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Tweet;
use crate::error::{Error, Result};
use crate::lexicons::{EmotionLexicon, HashtagEmotionLexicon};
use crate::textproc::{
    attach_pos, is_allcaps, is_elongated, ClusterMap, EmoticonPolarity, Token, TokenKind,
    Tokenizer,
};

/// Sparse feature name → value map. Zero values are never stored.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector {
    values: BTreeMap<String, f64>,
}

impl FeatureVector {
    pub fn new() -> Self {
        FeatureVector::default()
    }

    /// Sets a feature value; zero removes the entry.
    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        let name = name.into();
        if value == 0.0 {
            self.values.remove(&name);
        } else {
            self.values.insert(name, value);
        }
    }

    pub fn add(&mut self, name: impl Into<String>, delta: f64) {
        let name = name.into();
        let v = self.values.entry(name.clone()).or_insert(0.0);
        *v += delta;
        if *v == 0.0 {
            self.values.remove(&name);
        }
    }

    pub fn get(&self, name: &str) -> f64 {
        self.values.get(name).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn merge(&mut self, other: FeatureVector) {
        for (name, value) in other.values {
            self.values.insert(name, value);
        }
    }

    /// Keeps only features whose group is enabled.
    pub fn restrict(&self, config: &FeatureConfig) -> FeatureVector {
        FeatureVector {
            values: self
                .values
                .iter()
                .filter(|(name, _)| group_of(name).map_or(false, |g| config.is_enabled(g)))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    /// Canonical field encoding: `name:value` pairs sorted by name.
    pub fn to_tsv_fields(&self) -> String {
        let mut out = String::new();
        for (name, value) in &self.values {
            if !out.is_empty() {
                out.push('\t');
            }
            out.push_str(name);
            out.push(':');
            out.push_str(&value.to_string());
        }
        out
    }

    pub fn from_tsv_fields(fields: &str) -> Result<FeatureVector> {
        let mut vector = FeatureVector::new();
        if fields.is_empty() {
            return Ok(vector);
        }
        for field in fields.split('\t') {
            let (name, value) = field.rsplit_once(':').ok_or_else(|| {
                Error::InvalidInput(format!("feature field {field:?} has no value"))
            })?;
            let value: f64 = value.parse().map_err(|_| {
                Error::InvalidInput(format!("bad feature value in {field:?}"))
            })?;
            vector.set(name, value);
        }
        Ok(vector)
    }
}

/// The ten ablatable feature groups plus the hashtag lexicon group.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    Ngrams,
    Pos,
    Clusters,
    Allcaps,
    Emolex,
    Negation,
    Punctuation,
    Emoticons,
    Hashtags,
    Elongated,
    HashtagPmi,
}

pub const ALL_GROUPS: [FeatureGroup; 11] = [
    FeatureGroup::Ngrams,
    FeatureGroup::Pos,
    FeatureGroup::Clusters,
    FeatureGroup::Allcaps,
    FeatureGroup::Emolex,
    FeatureGroup::Negation,
    FeatureGroup::Punctuation,
    FeatureGroup::Emoticons,
    FeatureGroup::Hashtags,
    FeatureGroup::Elongated,
    FeatureGroup::HashtagPmi,
];

impl FeatureGroup {
    pub fn name(self) -> &'static str {
        match self {
            FeatureGroup::Ngrams => "ngrams",
            FeatureGroup::Pos => "pos",
            FeatureGroup::Clusters => "clusters",
            FeatureGroup::Allcaps => "allcaps",
            FeatureGroup::Emolex => "emolex",
            FeatureGroup::Negation => "negation",
            FeatureGroup::Punctuation => "punctuation",
            FeatureGroup::Emoticons => "emoticons",
            FeatureGroup::Hashtags => "hashtags",
            FeatureGroup::Elongated => "elongated",
            FeatureGroup::HashtagPmi => "hashtag_pmi",
        }
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<FeatureGroup> {
        ALL_GROUPS
            .iter()
            .copied()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::UnknownFeatureGroup(s.to_string()))
    }
}

/// Group owning a feature name, derived from its namespace prefix.
pub fn group_of(name: &str) -> Option<FeatureGroup> {
    for prefix in ["W1:", "W2:", "W3:", "W4:", "WS3:", "WS4:", "C3:", "C4:", "C5:"] {
        if name.starts_with(prefix) {
            return Some(FeatureGroup::Ngrams);
        }
    }
    if name.starts_with("POS:") {
        return Some(FeatureGroup::Pos);
    }
    if name.starts_with("CL:") {
        return Some(FeatureGroup::Clusters);
    }
    if name.starts_with("EMO:") {
        return Some(FeatureGroup::Emolex);
    }
    if name.starts_with("PUNC:") {
        return Some(FeatureGroup::Punctuation);
    }
    if name.starts_with("HPMI:") {
        return Some(FeatureGroup::HashtagPmi);
    }
    match name {
        "META:allcaps" => Some(FeatureGroup::Allcaps),
        "META:negated_contexts" => Some(FeatureGroup::Negation),
        "META:emoticon_pos" | "META:emoticon_neg" => Some(FeatureGroup::Emoticons),
        "META:hashtags" => Some(FeatureGroup::Hashtags),
        "META:elongated" => Some(FeatureGroup::Elongated),
        _ => None,
    }
}

/// Set of enabled feature groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    enabled: Vec<FeatureGroup>,
}

impl FeatureConfig {
    pub fn all() -> Self {
        FeatureConfig {
            enabled: ALL_GROUPS.to_vec(),
        }
    }

    pub fn only<I: IntoIterator<Item = FeatureGroup>>(groups: I) -> Self {
        let mut enabled: Vec<FeatureGroup> = groups.into_iter().collect();
        enabled.sort();
        enabled.dedup();
        FeatureConfig { enabled }
    }

    pub fn without(&self, group: FeatureGroup) -> Self {
        FeatureConfig {
            enabled: self.enabled.iter().copied().filter(|g| *g != group).collect(),
        }
    }

    pub fn is_enabled(&self, group: FeatureGroup) -> bool {
        self.enabled.contains(&group)
    }

    pub fn is_empty(&self) -> bool {
        self.enabled.is_empty()
    }

    pub fn groups(&self) -> &[FeatureGroup] {
        &self.enabled
    }

    /// Parses a comma-separated group list; `all` enables everything.
    pub fn parse_list(list: &str) -> Result<Self> {
        if list.trim() == "all" {
            return Ok(Self::all());
        }
        let groups: Result<Vec<FeatureGroup>> = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(FeatureGroup::from_str)
            .collect();
        Ok(Self::only(groups?))
    }

    pub fn describe(&self) -> String {
        self.enabled
            .iter()
            .map(|g| g.name())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Loaded resources shared by extraction over a corpus.
#[derive(Debug, Default)]
pub struct Resources {
    pub tokenizer: Tokenizer,
    pub emotion_lexicon: Option<EmotionLexicon>,
    pub clusters: Option<ClusterMap>,
    pub hashtag_lexicon: Option<HashtagEmotionLexicon>,
    /// Tagger output keyed by tweet id, for corpora without inline tags.
    pub pos_tags: BTreeMap<String, Vec<String>>,
}

fn ngram_surface(token: &Token) -> Option<String> {
    match token.kind {
        TokenKind::Word | TokenKind::Hashtag | TokenKind::Mention | TokenKind::Emoticon => {
            let mut s = token.surface.to_lowercase();
            if token.negated {
                s.push_str("_NEG");
            }
            Some(s)
        }
        _ => None,
    }
}

/// Word, skipped, and character n-gram presence features.
pub fn ngram_features(tokens: &[Token]) -> FeatureVector {
    let mut vector = FeatureVector::new();
    let words: Vec<String> = tokens.iter().filter_map(ngram_surface).collect();
    for n in 1..=4usize {
        if words.len() < n {
            break;
        }
        for window in words.windows(n) {
            vector.set(format!("W{n}:{}", window.join(" ")), 1.0);
            if n >= 3 {
                // one interior token replaced by *
                for skip in 1..n - 1 {
                    let mut parts: Vec<&str> =
                        window.iter().map(String::as_str).collect();
                    parts[skip] = "*";
                    vector.set(format!("WS{n}:{}", parts.join(" ")), 1.0);
                }
            }
        }
    }
    // character n-grams stay inside token surfaces; punctuation surfaces
    // participate, negation marks do not
    for token in tokens {
        let eligible = matches!(
            token.kind,
            TokenKind::Word
                | TokenKind::Hashtag
                | TokenKind::Mention
                | TokenKind::Emoticon
                | TokenKind::Punctuation
        );
        if !eligible {
            continue;
        }
        let chars: Vec<char> = token.surface.to_lowercase().chars().collect();
        for n in 3..=5usize {
            if chars.len() < n {
                break;
            }
            for window in chars.windows(n) {
                let gram: String = window.iter().collect();
                vector.set(format!("C{n}:{gram}"), 1.0);
            }
        }
    }
    vector
}

fn emolex_lookup_key(token: &Token) -> Option<String> {
    match token.kind {
        TokenKind::Word => Some(token.surface.to_lowercase()),
        TokenKind::Hashtag => Some(token.surface[1..].to_lowercase()),
        _ => None,
    }
}

/// Association lexicon counters: per emotion, plus per POS tag, all-caps,
/// and hashtag sub-counters. Tokens in a negated context feed `_NEG`
/// counters instead.
pub fn emotion_lexicon_features(tokens: &[Token], lexicon: &EmotionLexicon) -> FeatureVector {
    let mut vector = FeatureVector::new();
    for token in tokens {
        let Some(key) = emolex_lookup_key(token) else {
            continue;
        };
        let Some(labels) = lexicon.labels(&key) else {
            continue;
        };
        let suffix = if token.negated { "_NEG" } else { "" };
        for label in labels {
            vector.add(format!("EMO:{label}{suffix}"), 1.0);
            if let Some(tag) = &token.pos {
                vector.add(format!("EMO:pos:{tag}:{label}{suffix}"), 1.0);
            }
            if is_allcaps(&token.surface) {
                vector.add(format!("EMO:allcaps:{label}{suffix}"), 1.0);
            }
            if token.kind == TokenKind::Hashtag {
                vector.add(format!("EMO:hashtag:{label}{suffix}"), 1.0);
            }
        }
    }
    vector
}

fn punctuation_run_features(tokens: &[Token], vector: &mut FeatureVector) {
    let mut idx = 0;
    let is_run_token = |t: &Token| {
        t.kind == TokenKind::Punctuation && t.surface.chars().all(|c| c == '!' || c == '?')
    };
    while idx < tokens.len() {
        if !is_run_token(&tokens[idx]) {
            idx += 1;
            continue;
        }
        // extend over tokens that touch in the source text
        let mut end = idx + 1;
        let mut has_bang = tokens[idx].surface.contains('!');
        let mut has_question = tokens[idx].surface.contains('?');
        while end < tokens.len()
            && is_run_token(&tokens[end])
            && tokens[end - 1].end() == tokens[end].start
        {
            has_bang |= tokens[end].surface.contains('!');
            has_question |= tokens[end].surface.contains('?');
            end += 1;
        }
        let name = match (has_bang, has_question) {
            (true, true) => "PUNC:mixed_run",
            (true, false) => "PUNC:bang_run",
            (false, true) => "PUNC:question_run",
            (false, false) => unreachable!("run token has ! or ?"),
        };
        vector.add(name, 1.0);
        idx = end;
    }
}

fn negated_context_count(tokens: &[Token]) -> usize {
    let mut contexts = 0;
    let mut in_run = false;
    for token in tokens {
        if token.negated {
            if !in_run {
                contexts += 1;
                in_run = true;
            }
        } else {
            in_run = false;
        }
    }
    contexts
}

/// Surface statistics: all-caps, punctuation runs, hashtag and elongation
/// counts, negated contexts, emoticon presence, POS tag counts, and word
/// cluster presence.
pub fn surface_features(
    tokens: &[Token],
    tokenizer: &Tokenizer,
    clusters: Option<&ClusterMap>,
) -> FeatureVector {
    let mut vector = FeatureVector::new();
    let mut allcaps = 0usize;
    let mut hashtags = 0usize;
    let mut elongated = 0usize;
    for token in tokens {
        match token.kind {
            TokenKind::Word => {
                if is_allcaps(&token.surface) {
                    allcaps += 1;
                }
                if is_elongated(&token.surface) {
                    elongated += 1;
                }
            }
            TokenKind::Hashtag => hashtags += 1,
            TokenKind::Emoticon => match tokenizer.emoticon_polarity(&token.surface) {
                Some(EmoticonPolarity::Positive) => vector.set("META:emoticon_pos", 1.0),
                Some(EmoticonPolarity::Negative) => vector.set("META:emoticon_neg", 1.0),
                None => {}
            },
            _ => {}
        }
        if let Some(tag) = &token.pos {
            vector.add(format!("POS:{tag}"), 1.0);
        }
        if let Some(clusters) = clusters {
            if matches!(
                token.kind,
                TokenKind::Word | TokenKind::Hashtag | TokenKind::Mention | TokenKind::Emoticon
            ) {
                if let Some(cluster) = clusters.get(&token.surface) {
                    vector.set(format!("CL:{cluster}"), 1.0);
                }
            }
        }
    }
    vector.set("META:allcaps", allcaps as f64);
    vector.set("META:hashtags", hashtags as f64);
    vector.set("META:elongated", elongated as f64);
    vector.set("META:negated_contexts", negated_context_count(tokens) as f64);
    punctuation_run_features(tokens, &mut vector);
    vector
}

/// Hashtag lexicon sums over token occurrences.
pub fn hashtag_pmi_features(
    tokens: &[Token],
    lexicon: &HashtagEmotionLexicon,
) -> FeatureVector {
    let keys: Vec<String> = tokens.iter().filter_map(emolex_lookup_key).collect();
    let mut vector = FeatureVector::new();
    for (emotion, value) in lexicon.feature_values(&keys) {
        vector.set(format!("HPMI:{emotion}"), value);
    }
    vector
}

/// Runs the tokenizer, attaches POS tags when available, marks negation,
/// and unions the enabled feature groups.
pub fn extract(tweet: &Tweet, resources: &Resources, config: &FeatureConfig) -> Result<FeatureVector> {
    if config.is_empty() {
        return Err(Error::EmptyFeatureConfig);
    }
    let mut tokens = resources.tokenizer.tokenize(&tweet.text);
    if let Some(pairs) = &tweet.pos_tags {
        let tags: Vec<String> = pairs.iter().map(|(_, tag)| tag.clone()).collect();
        attach_pos(&mut tokens, &tags, &tweet.id)?;
    } else if let Some(tags) = resources.pos_tags.get(&tweet.id) {
        attach_pos(&mut tokens, tags, &tweet.id)?;
    }
    let tokens = resources.tokenizer.mark_negation(tokens);

    let mut vector = FeatureVector::new();
    if config.is_enabled(FeatureGroup::Ngrams) {
        vector.merge(ngram_features(&tokens));
    }
    if config.is_enabled(FeatureGroup::Emolex) {
        if let Some(lexicon) = &resources.emotion_lexicon {
            vector.merge(emotion_lexicon_features(&tokens, lexicon));
        }
    }
    if config.is_enabled(FeatureGroup::HashtagPmi) {
        if let Some(lexicon) = &resources.hashtag_lexicon {
            vector.merge(hashtag_pmi_features(&tokens, lexicon));
        }
    }
    let surface = surface_features(
        &tokens,
        &resources.tokenizer,
        resources.clusters.as_ref().filter(|_| config.is_enabled(FeatureGroup::Clusters)),
    );
    let surface_groups = [
        FeatureGroup::Pos,
        FeatureGroup::Clusters,
        FeatureGroup::Allcaps,
        FeatureGroup::Negation,
        FeatureGroup::Punctuation,
        FeatureGroup::Emoticons,
        FeatureGroup::Hashtags,
        FeatureGroup::Elongated,
    ];
    for (name, value) in surface.iter() {
        let group = group_of(name).expect("surface features are namespaced");
        if surface_groups.contains(&group) && config.is_enabled(group) {
            vector.set(name, value);
        }
    }
    Ok(vector)
}

/// Corpus-level extraction counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExtractStats {
    pub tweets: usize,
    pub missing_pos: usize,
}

/// Extracts every tweet in parallel. Per-tweet vectors are independent of
/// corpus order.
pub fn extract_corpus(
    tweets: &[Tweet],
    resources: &Resources,
    config: &FeatureConfig,
) -> Result<(Vec<(String, FeatureVector)>, ExtractStats)> {
    let vectors: Result<Vec<(String, FeatureVector)>> = tweets
        .par_iter()
        .map(|tweet| extract(tweet, resources, config).map(|v| (tweet.id.clone(), v)))
        .collect();
    let vectors = vectors?;
    let missing_pos = tweets
        .iter()
        .filter(|t| t.pos_tags.is_none() && !resources.pos_tags.contains_key(&t.id))
        .count();
    Ok((
        vectors,
        ExtractStats {
            tweets: tweets.len(),
            missing_pos,
        },
    ))
}

/// Writes vectors in canonical TSV form: tweet id, then sorted name:value
/// pairs.
pub fn save_vectors<W: Write>(mut out: W, vectors: &[(String, FeatureVector)]) -> Result<()> {
    for (tweet_id, vector) in vectors {
        let fields = vector.to_tsv_fields();
        if fields.is_empty() {
            writeln!(out, "{tweet_id}").map_err(|e| Error::io("<writer>", e))?;
        } else {
            writeln!(out, "{tweet_id}\t{fields}").map_err(|e| Error::io("<writer>", e))?;
        }
    }
    Ok(())
}

pub fn load_vectors(path: impl AsRef<Path>) -> Result<Vec<(String, FeatureVector)>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut vectors = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let (tweet_id, fields) = match line.split_once('\t') {
            Some((id, fields)) => (id, fields),
            None => (line.as_str(), ""),
        };
        let vector = FeatureVector::from_tsv_fields(fields)
            .map_err(|e| Error::parse(path, idx + 1, e.to_string()))?;
        vectors.push((tweet_id.to_string(), vector));
    }
    Ok(vectors)
}
