use std::path::PathBuf;

use crate::ids::{ActorId, GeneratorId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid token {token:?}: {reason}")]
    InvalidToken { token: String, reason: &'static str },

    #[error("weight {weight} for ({actor}, {generator}) is outside (0, 1]")]
    WeightOutOfRange {
        actor: ActorId,
        generator: GeneratorId,
        weight: f64,
    },

    #[error("unknown actor id: {0}")]
    UnknownActor(ActorId),

    #[error("empty generator set")]
    EmptyGeneratorSet,

    #[error("empty knowledge base for actor {0}")]
    EmptyKnowledgeBase(ActorId),

    #[error("generator {generator} held by {actor} is not in the universe")]
    GeneratorNotInUniverse {
        actor: ActorId,
        generator: GeneratorId,
    },

    #[error("oracle limit exceeded: {actors} actors (limit {limit})")]
    OracleLimitExceeded { actors: usize, limit: usize },

    #[error("matrix does not match knowledge base")]
    MatrixMismatch,

    #[error("unknown vertex: {0}")]
    UnknownVertex(ActorId),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown seed actor: {0}")]
    UnknownSeed(ActorId),

    #[error("empty seed set")]
    EmptySeeds,

    #[error("empty infected set")]
    EmptyInfected,

    #[error("invalid spread config: {0}")]
    InvalidConfig(String),

    #[error("{}: line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{}: zero-weight rows are not allowed (lines {})", path.display(), join_lines(lines))]
    ZeroWeightRows { path: PathBuf, lines: Vec<u64> },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

fn join_lines(lines: &[u64]) -> String {
    lines
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}
