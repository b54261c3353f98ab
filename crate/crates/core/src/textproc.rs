//! Tweet tokenization, negation scopes, and external linguistic resources.
//!
//! The tokenizer keeps URLs, mentions, hashtags, and emoticons whole,
//! groups runs of identical sentence punctuation into single tokens, and
//! splits everything else off words. POS tags are consumed from external
//! tagger output, never produced here.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use regex::Regex;

use crate::error::{Error, Result};

const BUNDLED_NEGATION_WORDS: &str = include_str!("../resources/negation_words.txt");
const BUNDLED_EMOTICONS: &str = include_str!("../resources/emoticons.tsv");

/// Punctuation that closes a negated context.
pub const CLAUSE_PUNCTUATION: [char; 6] = [',', '.', ':', ';', '!', '?'];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Hashtag,
    Mention,
    Url,
    Emoticon,
    Punctuation,
    Number,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmoticonPolarity {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
    pub negated: bool,
    pub pos: Option<String>,
    /// Byte offset of the surface in the tokenized text. Punctuation run
    /// features need to know whether neighboring tokens touched.
    pub start: usize,
}

impl Token {
    fn new(surface: &str, kind: TokenKind, start: usize) -> Self {
        Token {
            surface: surface.to_string(),
            kind,
            negated: false,
            pos: None,
            start,
        }
    }

    pub fn end(&self) -> usize {
        self.start + self.surface.len()
    }
}

/// Compiled emoticon recognizer with per-polarity patterns.
#[derive(Clone, Debug)]
pub struct EmoticonPattern {
    positive: Regex,
    negative: Regex,
}

impl EmoticonPattern {
    fn compile(positive: &str, negative: &str) -> Result<Self> {
        let anchor = |p: &str| -> Result<Regex> {
            Regex::new(&format!(r"\A(?:{p})"))
                .map_err(|e| Error::InvalidInput(format!("bad emoticon pattern {p:?}: {e}")))
        };
        Ok(EmoticonPattern {
            positive: anchor(positive)?,
            negative: anchor(negative)?,
        })
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_EMOTICONS, "<bundled emoticons>")
            .expect("bundled emoticon pattern is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut positive = None;
        let mut negative = None;
        for (idx, line) in text.lines().enumerate() {
            let trimmed = line.trim_end();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (name, pattern) = trimmed.split_once('\t').ok_or_else(|| {
                Error::parse(origin, idx + 1, "expected <polarity>\\t<regex>")
            })?;
            match name {
                "positive" => positive = Some(pattern.to_string()),
                "negative" => negative = Some(pattern.to_string()),
                other => {
                    return Err(Error::parse(
                        origin,
                        idx + 1,
                        format!("unknown polarity {other:?}"),
                    ))
                }
            }
        }
        let positive =
            positive.ok_or_else(|| Error::InvalidInput(format!("{origin}: no positive pattern")))?;
        let negative =
            negative.ok_or_else(|| Error::InvalidInput(format!("{origin}: no negative pattern")))?;
        Self::compile(&positive, &negative)
    }

    /// Longest match at the start of `rest`, with its polarity.
    fn match_at(&self, rest: &str) -> Option<(usize, EmoticonPolarity)> {
        let pos = self.positive.find(rest).map(|m| m.end());
        let neg = self.negative.find(rest).map(|m| m.end());
        match (pos, neg) {
            (Some(p), Some(n)) if n > p => Some((n, EmoticonPolarity::Negative)),
            (Some(p), _) => Some((p, EmoticonPolarity::Positive)),
            (None, Some(n)) => Some((n, EmoticonPolarity::Negative)),
            (None, None) => None,
        }
    }

    pub fn polarity(&self, surface: &str) -> Option<EmoticonPolarity> {
        self.match_at(surface)
            .filter(|(len, _)| *len == surface.len())
            .map(|(_, p)| p)
    }
}

/// Word list that opens negated contexts.
#[derive(Clone, Debug)]
pub struct NegationList {
    words: HashSet<String>,
}

impl NegationList {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_NEGATION_WORDS)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        NegationList { words }
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

/// Tokenizer configured with negation and emoticon resources.
#[derive(Clone, Debug)]
pub struct Tokenizer {
    negation: NegationList,
    emoticons: EmoticonPattern,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer {
            negation: NegationList::bundled(),
            emoticons: EmoticonPattern::bundled(),
        }
    }
}

fn is_sentence_punct(c: char) -> bool {
    CLAUSE_PUNCTUATION.contains(&c)
}

fn word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

impl Tokenizer {
    pub fn new(negation: NegationList, emoticons: EmoticonPattern) -> Self {
        Tokenizer { negation, emoticons }
    }

    pub fn with_negation_list(mut self, negation: NegationList) -> Self {
        self.negation = negation;
        self
    }

    pub fn with_emoticon_pattern(mut self, emoticons: EmoticonPattern) -> Self {
        self.emoticons = emoticons;
        self
    }

    pub fn emoticon_polarity(&self, surface: &str) -> Option<EmoticonPolarity> {
        self.emoticons.polarity(surface)
    }

    pub fn is_negation_word(&self, surface: &str) -> bool {
        self.negation.contains(&surface.to_lowercase().replace('\u{2019}', "'"))
    }

    /// Splits text into tokens. Emoticons are recognized before any
    /// punctuation splitting; URLs, mentions, and hashtags stay whole; runs
    /// of one repeated sentence punctuation mark form a single token.
    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        let mut tokens = Vec::new();
        let mut pos = 0;
        while pos < text.len() {
            let rest = &text[pos..];
            let c = rest.chars().next().expect("position on char boundary");
            if c.is_whitespace() {
                pos += c.len_utf8();
                continue;
            }

            if let Some(len) = match_url(rest) {
                tokens.push(Token::new(&rest[..len], TokenKind::Url, pos));
                pos += len;
                continue;
            }
            if let Some((len, _)) = self.emoticons.match_at(rest) {
                tokens.push(Token::new(&rest[..len], TokenKind::Emoticon, pos));
                pos += len;
                continue;
            }
            if c == '#' || c == '@' {
                let rest_after = &rest[1..];
                let len: usize = rest_after
                    .chars()
                    .take_while(|&ch| word_char(ch))
                    .map(char::len_utf8)
                    .sum();
                if len > 0 {
                    let kind = if c == '#' {
                        TokenKind::Hashtag
                    } else {
                        TokenKind::Mention
                    };
                    tokens.push(Token::new(&rest[..1 + len], kind, pos));
                    pos += 1 + len;
                    continue;
                }
            }
            if c.is_ascii_digit() {
                let len = match_number(rest);
                tokens.push(Token::new(&rest[..len], TokenKind::Number, pos));
                pos += len;
                continue;
            }
            if word_char(c) {
                let len = match_word(rest);
                tokens.push(Token::new(&rest[..len], TokenKind::Word, pos));
                pos += len;
                continue;
            }
            if is_sentence_punct(c) {
                let len: usize = rest
                    .chars()
                    .take_while(|&ch| ch == c)
                    .map(char::len_utf8)
                    .sum();
                tokens.push(Token::new(&rest[..len], TokenKind::Punctuation, pos));
                pos += len;
                continue;
            }
            let len = c.len_utf8();
            tokens.push(Token::new(&rest[..len], TokenKind::Punctuation, pos));
            pos += len;
        }
        tokens
    }

    /// Marks every word and hashtag token strictly after a negation word and
    /// before the next clause punctuation token (or end of tweet) as negated.
    /// The negation word itself is never marked; further negation words
    /// re-open the scope.
    pub fn mark_negation(&self, mut tokens: Vec<Token>) -> Vec<Token> {
        let mut in_scope = false;
        for token in &mut tokens {
            if token.kind == TokenKind::Punctuation
                && token.surface.chars().next().map_or(false, is_sentence_punct)
            {
                in_scope = false;
                continue;
            }
            if token.kind == TokenKind::Word && self.is_negation_word(&token.surface) {
                in_scope = true;
                continue;
            }
            if in_scope && matches!(token.kind, TokenKind::Word | TokenKind::Hashtag) {
                token.negated = true;
            }
        }
        tokens
    }
}

fn match_url(rest: &str) -> Option<usize> {
    let lower_starts = |prefix: &str| {
        rest.len() >= prefix.len() && rest[..prefix.len()].eq_ignore_ascii_case(prefix)
    };
    let prefix_len = if lower_starts("http://") {
        7
    } else if lower_starts("https://") {
        8
    } else if lower_starts("www.") {
        4
    } else {
        return None;
    };
    let raw: usize = rest
        .chars()
        .take_while(|c| !c.is_whitespace())
        .map(char::len_utf8)
        .sum();
    // Trailing sentence punctuation and closers belong to the tweet, not
    // the address.
    let trimmed = rest[..raw]
        .trim_end_matches(|c: char| is_sentence_punct(c) || matches!(c, ')' | ']' | '"' | '\''));
    if trimmed.len() > prefix_len {
        Some(trimmed.len())
    } else {
        None
    }
}

fn match_number(rest: &str) -> usize {
    let bytes = rest.as_bytes();
    let mut len = 0;
    while len < bytes.len() && bytes[len].is_ascii_digit() {
        len += 1;
    }
    // decimal groups: keep "3.14" whole but leave a bare trailing dot alone
    while len + 1 < bytes.len() && bytes[len] == b'.' && bytes[len + 1].is_ascii_digit() {
        len += 1;
        while len < bytes.len() && bytes[len].is_ascii_digit() {
            len += 1;
        }
    }
    len
}

fn match_word(rest: &str) -> usize {
    let mut len = 0;
    let mut chars = rest.char_indices().peekable();
    while let Some((idx, c)) = chars.next() {
        if word_char(c) {
            len = idx + c.len_utf8();
            continue;
        }
        // apostrophes and hyphens stay inside words: don't, well-known
        if (c == '\'' || c == '\u{2019}' || c == '-')
            && len > 0
            && chars.peek().map_or(false, |&(_, n)| word_char(n))
        {
            len = idx + c.len_utf8();
            continue;
        }
        break;
    }
    len
}

/// True iff some character occurs three or more times consecutively.
pub fn is_elongated(word: &str) -> bool {
    let mut run = 0;
    let mut last = None;
    for c in word.chars() {
        if Some(c) == last {
            run += 1;
            if run >= 3 {
                return true;
            }
        } else {
            last = Some(c);
            run = 1;
        }
    }
    false
}

/// True iff the token has at least two characters, at least one letter, and
/// every letter is uppercase. Single characters are excluded so that "I"
/// and "A" never count.
pub fn is_allcaps(word: &str) -> bool {
    word.chars().count() >= 2
        && word.chars().any(char::is_alphabetic)
        && word.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase)
}

/// Case-insensitive word-to-cluster lookup table.
#[derive(Clone, Debug, Default)]
pub struct ClusterMap {
    entries: HashMap<String, (String, u64)>,
}

/// Largest cluster inventory the map accepts.
pub const MAX_CLUSTERS: usize = 1000;

impl ClusterMap {
    /// Reads rows of `cluster_path<TAB>word<TAB>count`. A duplicate word
    /// keeps its highest-count row.
    pub fn from_path(path: impl AsRef<Path>) -> Result<ClusterMap> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut entries: HashMap<String, (String, u64)> = HashMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (cluster, word, count) = match (fields.next(), fields.next(), fields.next()) {
                (Some(c), Some(w), Some(n)) => (c, w, n),
                _ => {
                    return Err(Error::parse(
                        path,
                        idx + 1,
                        "expected cluster<TAB>word<TAB>count",
                    ))
                }
            };
            let count: u64 = count.trim().parse().map_err(|_| {
                Error::parse(path, idx + 1, format!("bad count {count:?}"))
            })?;
            let key = word.to_lowercase();
            match entries.get(&key) {
                Some((_, existing)) if *existing >= count => {}
                _ => {
                    entries.insert(key, (cluster.to_string(), count));
                }
            }
        }
        let map = ClusterMap { entries };
        let inventory = map.cluster_count();
        if inventory > MAX_CLUSTERS {
            return Err(Error::InvalidInput(format!(
                "cluster file {} has {inventory} clusters (limit {MAX_CLUSTERS})",
                path.display()
            )));
        }
        Ok(map)
    }

    pub fn get(&self, word: &str) -> Option<&str> {
        self.entries
            .get(&word.to_lowercase())
            .map(|(cluster, _)| cluster.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn cluster_count(&self) -> usize {
        self.entries
            .values()
            .map(|(c, _)| c.as_str())
            .collect::<HashSet<_>>()
            .len()
    }
}

/// Reads `tweet_id<TAB>space-joined tags` rows from an external tagger run.
pub fn load_pos_file(path: impl AsRef<Path>) -> Result<BTreeMap<String, Vec<String>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let (id, tags) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, idx + 1, "expected tweet_id<TAB>tags"))?;
        let tags: Vec<String> = tags.split_whitespace().map(String::from).collect();
        if map.insert(id.to_string(), tags).is_some() {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("duplicate tweet id {id:?}"),
            ));
        }
    }
    Ok(map)
}

/// Attaches tagger output to a token sequence, 1:1.
pub fn attach_pos(tokens: &mut [Token], tags: &[String], tweet_id: &str) -> Result<()> {
    if tokens.len() != tags.len() {
        return Err(Error::PosAlignment {
            tweet_id: tweet_id.to_string(),
            tags: tags.len(),
            tokens: tokens.len(),
        });
    }
    for (token, tag) in tokens.iter_mut().zip(tags) {
        token.pos = Some(tag.clone());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    fn kinds(tokens: &[Token]) -> Vec<TokenKind> {
        tokens.iter().map(|t| t.kind).collect()
    }

    #[test]
    fn tokenize_golden_example() {
        let tok = Tokenizer::default();
        let tokens = tok.tokenize("I don't agree!!! :)");
        assert_eq!(surfaces(&tokens), vec!["I", "don't", "agree", "!!!", ":)"]);
        assert_eq!(
            kinds(&tokens),
            vec![
                TokenKind::Word,
                TokenKind::Word,
                TokenKind::Word,
                TokenKind::Punctuation,
                TokenKind::Emoticon
            ]
        );
    }

    #[test]
    fn tokenize_empty() {
        assert!(Tokenizer::default().tokenize("").is_empty());
        assert!(Tokenizer::default().tokenize("   \t ").is_empty());
    }

    #[test]
    fn tokenize_kind_classification() {
        let tok = Tokenizer::default();
        let tokens = tok.tokenize("#gop @someuser http://someurl");
        assert_eq!(
            kinds(&tokens),
            vec![TokenKind::Hashtag, TokenKind::Mention, TokenKind::Url]
        );
        let tokens = tok.tokenize("win 2012 now");
        assert_eq!(
            kinds(&tokens),
            vec![TokenKind::Word, TokenKind::Number, TokenKind::Word]
        );
    }

    #[test]
    fn tokenize_punctuation_runs() {
        let tok = Tokenizer::default();
        // identical marks group; mixed marks split
        assert_eq!(surfaces(&tok.tokenize("what?!")), vec!["what", "?", "!"]);
        assert_eq!(surfaces(&tok.tokenize("wow!!!")), vec!["wow", "!!!"]);
        assert_eq!(surfaces(&tok.tokenize("so...")), vec!["so", "..."]);
        assert_eq!(surfaces(&tok.tokenize("a,b")), vec!["a", ",", "b"]);
    }

    #[test]
    fn tokenize_emoticons_before_punctuation() {
        let tok = Tokenizer::default();
        let tokens = tok.tokenize("fine :-( really ;)");
        assert_eq!(surfaces(&tokens), vec!["fine", ":-(", "really", ";)"]);
        assert_eq!(tokens[1].kind, TokenKind::Emoticon);
        assert_eq!(tokens[3].kind, TokenKind::Emoticon);
        assert_eq!(
            tok.emoticon_polarity(":-("),
            Some(EmoticonPolarity::Negative)
        );
        assert_eq!(tok.emoticon_polarity(";)"), Some(EmoticonPolarity::Positive));
        assert_eq!(tok.emoticon_polarity("word"), None);
    }

    #[test]
    fn tokenize_is_stable_under_rejoin() {
        let tok = Tokenizer::default();
        for text in [
            "I don't agree!!! :)",
            "#gop @someuser http://someurl",
            "WOW!!! ?! soooo good...",
            "3.14 isn't 3 , right?",
            "well-known plan (really) \"quote\"",
        ] {
            let first = tok.tokenize(text);
            let rejoined = first
                .iter()
                .map(|t| t.surface.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            let second = tok.tokenize(&rejoined);
            assert_eq!(surfaces(&first), surfaces(&second), "text {text:?}");
            assert_eq!(kinds(&first), kinds(&second), "text {text:?}");
        }
    }

    #[test]
    fn url_keeps_address_drops_trailing_punctuation() {
        let tok = Tokenizer::default();
        let tokens = tok.tokenize("see http://x.co/y, now");
        assert_eq!(surfaces(&tokens), vec!["see", "http://x.co/y", ",", "now"]);
        assert_eq!(tokens[1].kind, TokenKind::Url);
    }

    #[test]
    fn negation_example_scope() {
        let tok = Tokenizer::default();
        let tokens = tok.mark_negation(tok.tokenize("not perfect ."));
        assert!(!tokens[0].negated);
        assert!(tokens[1].negated, "perfect should be negated");
        assert!(!tokens[2].negated);
    }

    #[test]
    fn negation_scope_opening_at_end_marks_nothing() {
        let tok = Tokenizer::default();
        let tokens = tok.mark_negation(tok.tokenize("perfect , not"));
        assert!(tokens.iter().all(|t| !t.negated));
    }

    #[test]
    fn negation_scope_closed_by_clause_punctuation() {
        let tok = Tokenizer::default();
        let tokens = tok.mark_negation(tok.tokenize("shouldn't win ; will lose"));
        let by_surface: BTreeMap<&str, bool> = tokens
            .iter()
            .map(|t| (t.surface.as_str(), t.negated))
            .collect();
        assert_eq!(by_surface["win"], true);
        assert_eq!(by_surface["will"], false);
        assert_eq!(by_surface["lose"], false);
    }

    #[test]
    fn negation_marks_hashtags_not_mentions() {
        let tok = Tokenizer::default();
        let tokens = tok.mark_negation(tok.tokenize("never @user #fair2012 ok"));
        assert_eq!(tokens[1].negated, false, "mention stays unmarked");
        assert_eq!(tokens[2].negated, true, "hashtag is word-like");
        assert_eq!(tokens[3].negated, true);
    }

    #[test]
    fn negation_preserves_count_order_surfaces() {
        let tok = Tokenizer::default();
        let before = tok.tokenize("no way , fine !!! :) never mind");
        let after = tok.mark_negation(before.clone());
        assert_eq!(before.len(), after.len());
        for (b, a) in before.iter().zip(&after) {
            assert_eq!(b.surface, a.surface);
            assert_eq!(b.kind, a.kind);
        }
    }

    #[test]
    fn elongated_examples() {
        assert!(is_elongated("soooo"));
        assert!(!is_elongated("soo"), "exactly 2 repeats is not elongated");
        assert!(is_elongated("yesss"));
        assert!(!is_elongated(""));
        assert!(!is_elongated("banana"));
    }

    #[test]
    fn allcaps_examples() {
        assert!(is_allcaps("GOP"));
        assert!(!is_allcaps("A"), "single characters excluded");
        assert!(!is_allcaps("Gop"));
        assert!(is_allcaps("U.S"));
        assert!(!is_allcaps("!!"), "needs at least one letter");
        // golden list check
        for (word, expect) in [
            ("WOW", true),
            ("McCAIN", false),
            ("OK", true),
            ("I", false),
            ("4YEARS", true),
            ("off", false),
        ] {
            assert_eq!(is_allcaps(word), expect, "{word:?}");
        }
    }

    #[test]
    fn cluster_map_loads_and_deduplicates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clusters.tsv");
        std::fs::write(&path, "0101\tobama\t9\n0110\tromney\t7\n").unwrap();
        let map = ClusterMap::from_path(&path).unwrap();
        assert_eq!(map.len(), 2);
        assert_eq!(map.get("Obama"), Some("0101"));
        assert_eq!(map.get("missing"), None);

        // duplicate word keeps the higher-count row
        std::fs::write(&path, "000\tvote\t3\n111\tvote\t9\n").unwrap();
        let map = ClusterMap::from_path(&path).unwrap();
        assert_eq!(map.get("vote"), Some("111"));

        std::fs::write(&path, "").unwrap();
        assert!(ClusterMap::from_path(&path).unwrap().is_empty());
    }

    #[test]
    fn cluster_map_rejects_malformed_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clusters.tsv");
        std::fs::write(&path, "0101\tobama\t9\nbadrow\n").unwrap();
        match ClusterMap::from_path(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        std::fs::write(&path, "0101\tobama\tnine\n").unwrap();
        assert!(matches!(
            ClusterMap::from_path(&path),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn pos_file_roundtrip_and_alignment() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pos.tsv");
        std::fs::write(&path, "t1\tV R\nt2\tN\n").unwrap();
        let map = load_pos_file(&path).unwrap();
        assert_eq!(map["t1"], vec!["V", "R"]);

        let tok = Tokenizer::default();
        let mut tokens = tok.tokenize("vote now");
        attach_pos(&mut tokens, &map["t1"], "t1").unwrap();
        assert_eq!(tokens[0].pos.as_deref(), Some("V"));

        let mut tokens = tok.tokenize("vote now");
        match attach_pos(&mut tokens, &map["t2"], "t2") {
            Err(Error::PosAlignment { tweet_id, tags, tokens }) => {
                assert_eq!(tweet_id, "t2");
                assert_eq!((tags, tokens), (1, 2));
            }
            other => panic!("expected alignment error, got {other:?}"),
        }
    }
}
