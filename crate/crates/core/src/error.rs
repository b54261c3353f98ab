use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate tweet id: {0}")]
    DuplicateTweetId(String),

    #[error("unknown label name: {0}")]
    UnknownLabel(String),

    #[error("annotator statistics require at least 2 annotators, got {0}")]
    TooFewAnnotators(usize),

    #[error("no tweet ids shared between the two gold label sets")]
    EmptyIntersection,

    #[error("feature configuration enables no groups")]
    EmptyFeatureConfig,

    #[error("unknown feature group: {0}")]
    UnknownFeatureGroup(String),

    #[error("training requires at least 2 distinct labels, got {0}")]
    SingleLabel(usize),

    #[error("non-finite feature value in instance {tweet_id} (feature {feature})")]
    NonFiniteFeature { tweet_id: String, feature: String },

    #[error("fold count {k} exceeds instance count {n}")]
    FoldCountTooLarge { k: usize, n: usize },

    #[error("fold count must be at least 2, got {0}")]
    FoldCountTooSmall(usize),

    #[error("score lists have different lengths: {0} vs {1}")]
    ScoreLengthMismatch(usize, usize),

    #[error("paired t-test needs at least 2 score pairs, got {0}")]
    TooFewScores(usize),

    #[error("tweet {tweet_id}: POS tag count {tags} does not match token count {tokens}")]
    PosAlignment {
        tweet_id: String,
        tags: usize,
        tokens: usize,
    },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
