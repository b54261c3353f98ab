//! Loading, filtering, and normalizing raw tweet collections.
//!
//! A corpus arrives as JSON lines (one tweet object per line). Filtering
//! drops retweets and tweets that do not look like English, and rewrites
//! URLs and user mentions to fixed placeholders so that downstream feature
//! extraction never sees tweet-specific handles or link targets.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Language metadata value accepted as English by the corpus filter.
pub const DEFAULT_ENGLISH_CODE: &str = "en";

/// Minimum number of wordlist hits a tweet needs to survive the filter.
pub const MIN_ENGLISH_WORDS: usize = 2;

/// One message with its metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub text: String,
    #[serde(rename = "lang", default, skip_serializing_if = "Option::is_none")]
    pub lang_code: Option<String>,
    /// Token-aligned tags from an external tagger, when available.
    #[serde(rename = "pos", default, skip_serializing_if = "Option::is_none")]
    pub pos_tags: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_query: Option<String>,
}

impl Tweet {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Tweet {
            id: id.into(),
            text: text.into(),
            lang_code: None,
            pos_tags: None,
            source_query: None,
        }
    }

    pub fn with_lang(mut self, lang: impl Into<String>) -> Self {
        self.lang_code = Some(lang.into());
        self
    }
}

/// Per-field tally of what the corpus filter did.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusFilterReport {
    pub total_in: usize,
    pub dropped_retweet: usize,
    pub dropped_language: usize,
    pub dropped_english_wordcount: usize,
    pub kept: usize,
}

impl CorpusFilterReport {
    /// Field-wise sum, for merging per-partition reports.
    pub fn merge(&self, other: &CorpusFilterReport) -> CorpusFilterReport {
        CorpusFilterReport {
            total_in: self.total_in + other.total_in,
            dropped_retweet: self.dropped_retweet + other.dropped_retweet,
            dropped_language: self.dropped_language + other.dropped_language,
            dropped_english_wordcount: self.dropped_english_wordcount
                + other.dropped_english_wordcount,
            kept: self.kept + other.kept,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.total_in
            == self.kept + self.dropped_retweet + self.dropped_language + self.dropped_english_wordcount
    }
}

/// Plain-text inventory of valid lowercase words.
#[derive(Clone, Debug, Default)]
pub struct Wordlist {
    words: HashSet<String>,
}

impl Wordlist {
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Wordlist {
            words: words
                .into_iter()
                .map(|w| w.as_ref().to_lowercase())
                .collect(),
        }
    }

    /// Reads one word per line; blank lines and `#` comment lines are skipped.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Wordlist> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut words = HashSet::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            words.insert(trimmed.to_lowercase());
        }
        Ok(Wordlist { words })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn url_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)(?:https?://|www\.)\S+").expect("valid url pattern"))
}

fn mention_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"@\w+").expect("valid mention pattern"))
}

/// True iff any whitespace-delimited token equals exactly `RT`, `rt`, or `Rt`.
pub fn is_retweet(tweet: &Tweet) -> bool {
    tweet
        .text
        .split_whitespace()
        .any(|tok| tok == "RT" || tok == "rt" || tok == "Rt")
}

/// Rewrites every URL to `http://someurl` and every user mention to
/// `@someuser`, leaving all other characters untouched.
pub fn normalize(text: &str) -> String {
    let text = url_pattern().replace_all(text, "http://someurl");
    mention_pattern().replace_all(&text, "@someuser").into_owned()
}

fn language_ok(tweet: &Tweet, english_code: &str) -> bool {
    // Tweets without a language tag are not dropped by this check; the
    // metadata tag is unreliable and the wordcount check still applies.
    match &tweet.lang_code {
        Some(code) => code.eq_ignore_ascii_case(english_code),
        None => true,
    }
}

/// Number of token positions that are wordlist members after stripping
/// leading `#`/`@` marks and trailing punctuation. Repeated positions each
/// count.
fn english_word_positions(text: &str, wordlist: &Wordlist) -> usize {
    text.split_whitespace()
        .filter(|tok| {
            let stripped = tok
                .trim_start_matches(['#', '@'])
                .trim_end_matches(|c: char| !c.is_alphanumeric());
            !stripped.is_empty() && wordlist.contains(&stripped.to_lowercase())
        })
        .count()
}

/// True iff the language tag (when present) is English and at least two
/// token positions are wordlist members.
pub fn passes_english_filter(tweet: &Tweet, wordlist: &Wordlist, english_code: &str) -> bool {
    language_ok(tweet, english_code)
        && english_word_positions(&tweet.text, wordlist) >= MIN_ENGLISH_WORDS
}

/// Applies the retweet, language, and wordcount filters in that order and
/// normalizes the text of every kept tweet.
///
/// Errors on a duplicate tweet id. The wordcount check runs on normalized
/// text so that filtering an already-filtered corpus drops nothing.
pub fn filter_corpus(
    tweets: &[Tweet],
    wordlist: &Wordlist,
    english_code: &str,
) -> Result<(Vec<Tweet>, CorpusFilterReport)> {
    let mut seen = HashSet::new();
    let mut report = CorpusFilterReport {
        total_in: tweets.len(),
        ..CorpusFilterReport::default()
    };
    let mut kept = Vec::new();

    for tweet in tweets {
        if tweet.id.is_empty() {
            return Err(Error::InvalidInput("tweet with empty id".into()));
        }
        if !seen.insert(tweet.id.clone()) {
            return Err(Error::DuplicateTweetId(tweet.id.clone()));
        }
        if is_retweet(tweet) {
            report.dropped_retweet += 1;
            continue;
        }
        if !language_ok(tweet, english_code) {
            report.dropped_language += 1;
            continue;
        }
        let normalized = normalize(&tweet.text);
        if english_word_positions(&normalized, wordlist) < MIN_ENGLISH_WORDS {
            report.dropped_english_wordcount += 1;
            continue;
        }
        let mut out = tweet.clone();
        out.text = normalized;
        kept.push(out);
        report.kept += 1;
    }

    debug_assert!(report.is_consistent());
    Ok((kept, report))
}

/// Reads a JSON-lines corpus, enforcing unique non-empty ids.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Tweet>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut tweets = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let tweet: Tweet = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, idx + 1, e.to_string()))?;
        if tweet.id.is_empty() {
            return Err(Error::parse(path, idx + 1, "empty tweet id"));
        }
        if !seen.insert(tweet.id.clone()) {
            return Err(Error::DuplicateTweetId(tweet.id.clone()));
        }
        tweets.push(tweet);
    }
    Ok(tweets)
}

/// Writes a corpus as JSON lines.
pub fn save_corpus<W: Write>(mut out: W, tweets: &[Tweet]) -> Result<()> {
    for tweet in tweets {
        let line = serde_json::to_string(tweet)
            .map_err(|e| Error::InvalidInput(format!("serializing tweet {}: {e}", tweet.id)))?;
        writeln!(out, "{line}").map_err(|e| Error::io("<writer>", e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tw(id: &str, text: &str) -> Tweet {
        Tweet::new(id, text)
    }

    #[test]
    fn retweet_token_match() {
        assert!(is_retweet(&tw("1", "RT @bob: vote now")));
        assert!(is_retweet(&tw("2", "great point rt")));
        assert!(is_retweet(&tw("3", "Rt this please")));
        assert!(!is_retweet(&tw("4", "Obama speaks tonight")));
    }

    #[test]
    fn retweet_requires_token_boundary() {
        // substring "RT" inside a word must not match
        assert!(!is_retweet(&tw("1", "START of the debate")));
        assert!(!is_retweet(&tw("2", "he was cuRT about it")));
        // brute-force token scan oracle over a mixed fixture
        let fixture = [
            ("RT hello", true),
            ("hello RT", true),
            ("hello rt world", true),
            ("START here", false),
            ("smart rT move", false),
            ("depart now", false),
        ];
        for (text, expect) in fixture {
            let oracle = text.split(' ').any(|t| ["RT", "rt", "Rt"].contains(&t));
            assert_eq!(oracle, expect, "oracle disagrees for {text:?}");
            assert_eq!(is_retweet(&tw("x", text)), expect, "{text:?}");
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize("see http://bit.ly/x2 now"),
            "see http://someurl now"
        );
        assert_eq!(normalize("@mitt is wrong"), "@someuser is wrong");
        assert_eq!(normalize("no links here"), "no links here");
        assert_eq!(normalize("go to www.example.com/x today"), "go to http://someurl today");
        assert_eq!(
            normalize("https://a.co/x and @a_b2 and http://c.d"),
            "http://someurl and @someuser and http://someurl"
        );
    }

    #[test]
    fn normalize_is_idempotent() {
        for text in [
            "see http://bit.ly/x2 now",
            "@mitt is wrong",
            "plain",
            "wwww.x www.y.z @@a",
            "a@b.com mail",
        ] {
            let once = normalize(text);
            assert_eq!(normalize(&once), once, "not idempotent on {text:?}");
        }
    }

    #[test]
    fn english_filter_examples() {
        let wl = Wordlist::from_words(["vote", "now"]);
        assert!(passes_english_filter(
            &tw("1", "vote now #gop"),
            &wl,
            DEFAULT_ENGLISH_CODE
        ));
        assert!(!passes_english_filter(
            &tw("2", "xyzzy qwerty"),
            &wl,
            DEFAULT_ENGLISH_CODE
        ));
        // repeated token positions each count
        let wl_single = Wordlist::from_words(["vote"]);
        assert!(passes_english_filter(
            &tw("3", "vote vote vote"),
            &wl_single,
            DEFAULT_ENGLISH_CODE
        ));
    }

    #[test]
    fn english_filter_language_tag() {
        let wl = Wordlist::from_words(["vote", "now"]);
        let mut t = tw("1", "vote now");
        t.lang_code = Some("es".into());
        assert!(!passes_english_filter(&t, &wl, DEFAULT_ENGLISH_CODE));
        t.lang_code = Some("en".into());
        assert!(passes_english_filter(&t, &wl, DEFAULT_ENGLISH_CODE));
        // missing tag is not a language rejection
        t.lang_code = None;
        assert!(passes_english_filter(&t, &wl, DEFAULT_ENGLISH_CODE));
    }

    #[test]
    fn english_filter_strips_marks_and_punctuation() {
        let wl = Wordlist::from_words(["gop", "vote"]);
        assert!(passes_english_filter(
            &tw("1", "#gop vote!"),
            &wl,
            DEFAULT_ENGLISH_CODE
        ));
        let wl2 = Wordlist::from_words(["mitt", "wrong"]);
        assert!(passes_english_filter(
            &tw("2", "@mitt wrong..."),
            &wl2,
            DEFAULT_ENGLISH_CODE
        ));
    }

    #[test]
    fn filter_corpus_composition() {
        let wl = Wordlist::from_words(["vote", "now", "tonight"]);
        let mut foreign = tw("c", "vote now");
        foreign.lang_code = Some("fr".into());
        let tweets = vec![tw("a", "RT vote now"), tw("b", "vote now tonight"), foreign];
        let (kept, report) = filter_corpus(&tweets, &wl, DEFAULT_ENGLISH_CODE).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].id, "b");
        assert_eq!(
            report,
            CorpusFilterReport {
                total_in: 3,
                dropped_retweet: 1,
                dropped_language: 1,
                dropped_english_wordcount: 0,
                kept: 1,
            }
        );
    }

    #[test]
    fn filter_corpus_empty() {
        let wl = Wordlist::from_words(["vote"]);
        let (kept, report) = filter_corpus(&[], &wl, DEFAULT_ENGLISH_CODE).unwrap();
        assert!(kept.is_empty());
        assert_eq!(report, CorpusFilterReport::default());
    }

    #[test]
    fn filter_corpus_duplicate_id() {
        let wl = Wordlist::from_words(["vote", "now"]);
        let tweets = vec![tw("a", "vote now"), tw("a", "vote now again")];
        match filter_corpus(&tweets, &wl, DEFAULT_ENGLISH_CODE) {
            Err(Error::DuplicateTweetId(id)) => assert_eq!(id, "a"),
            other => panic!("expected duplicate id error, got {other:?}"),
        }
    }

    #[test]
    fn filter_corpus_matches_per_tweet_oracle() {
        let wl = Wordlist::from_words(["vote", "now", "win", "debate", "watch"]);
        let mut tweets = vec![
            tw("01", "RT vote now"),
            tw("02", "vote now"),
            tw("03", "win the debate"),
            tw("04", "xyzzy plugh"),
            tw("05", "watch @mitt now"),
            tw("06", "rt rt rt"),
            tw("07", "vote http://bit.ly/x now"),
            tw("08", "single"),
            tw("09", "WIN now!!"),
            tw("10", "debate debate"),
        ];
        tweets[3].lang_code = Some("en".into());
        tweets[9].lang_code = Some("de".into());

        let (kept, report) = filter_corpus(&tweets, &wl, DEFAULT_ENGLISH_CODE).unwrap();

        // brute-force per-tweet predicate evaluation
        let mut oracle_kept = 0;
        let mut oracle_rt = 0;
        let mut oracle_lang = 0;
        let mut oracle_words = 0;
        for t in &tweets {
            if is_retweet(t) {
                oracle_rt += 1;
            } else if !t
                .lang_code
                .as_deref()
                .map_or(true, |c| c.eq_ignore_ascii_case("en"))
            {
                oracle_lang += 1;
            } else if english_word_positions(&normalize(&t.text), &wl) < 2 {
                oracle_words += 1;
            } else {
                oracle_kept += 1;
            }
        }
        assert_eq!(report.kept, oracle_kept);
        assert_eq!(report.dropped_retweet, oracle_rt);
        assert_eq!(report.dropped_language, oracle_lang);
        assert_eq!(report.dropped_english_wordcount, oracle_words);
        assert_eq!(kept.len(), oracle_kept);
        assert!(report.is_consistent());
    }

    #[test]
    fn filter_corpus_is_idempotent() {
        let wl = Wordlist::from_words(["vote", "now", "win"]);
        let tweets = vec![
            tw("a", "vote now http://x.co/y"),
            tw("b", "win now @someone"),
            tw("c", "RT vote now"),
        ];
        let (kept, _) = filter_corpus(&tweets, &wl, DEFAULT_ENGLISH_CODE).unwrap();
        let (again, report) = filter_corpus(&kept, &wl, DEFAULT_ENGLISH_CODE).unwrap();
        assert_eq!(kept, again);
        assert_eq!(report.kept, kept.len());
        assert_eq!(report.total_in, kept.len());
    }

    #[test]
    fn corpus_jsonl_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let mut t = tw("a1", "vote now");
        t.lang_code = Some("en".into());
        t.pos_tags = Some(vec![("vote".into(), "V".into()), ("now".into(), "R".into())]);
        let tweets = vec![t, tw("a2", "plain text")];
        let mut buf = Vec::new();
        save_corpus(&mut buf, &tweets).unwrap();
        std::fs::write(&path, &buf).unwrap();
        let loaded = load_corpus(&path).unwrap();
        assert_eq!(loaded, tweets);
    }

    #[test]
    fn load_corpus_rejects_duplicates_and_bad_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(&path, "{\"id\":\"a\",\"text\":\"x\"}\nnot json\n").unwrap();
        match load_corpus(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        std::fs::write(
            &path,
            "{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n",
        )
        .unwrap();
        assert!(matches!(
            load_corpus(&path),
            Err(Error::DuplicateTweetId(_))
        ));
    }
}
