use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by any stage of the pipeline.
///
/// Variants carry human-readable context (row/column names, offending values)
/// rather than structured payloads; callers that need to react
/// programmatically match on the variant only.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv load: {0}")]
    Load(String),

    #[error("schema: {0}")]
    Schema(String),

    #[error("table: {0}")]
    Table(String),

    #[error("split: {0}")]
    Split(String),

    #[error("encode: {0}")]
    Encode(String),

    #[error("impute: {0}")]
    Impute(String),

    #[error("smote: {0}")]
    Smote(String),

    #[error("train: {0}")]
    Train(String),

    #[error("shap: {0}")]
    Shap(String),

    #[error("metrics: {0}")]
    Metrics(String),

    #[error("search: {0}")]
    Search(String),

    #[error("selection: {0}")]
    Selection(String),

    #[error("synth: {0}")]
    Synth(String),

    #[error("config: {0}")]
    Config(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("report: {0}")]
    Report(String),

    /// Wraps an error with the experiment stage it surfaced in, so CLI
    /// diagnostics can say which step of the protocol failed.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Tag an error with the pipeline stage it belongs to.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

/// Extension for tagging results with a stage name.
pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.in_stage(stage))
    }
}
