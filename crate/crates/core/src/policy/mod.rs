//! The shared conjecturer/prover model, its prompt formats, and statement embeddings.

mod embed;
mod external;
mod model;
mod prompt;
pub mod tokens;

pub use embed::{cost, embed, embed_text, token_slot, Embedding, EMBEDDING_DIM};
pub use external::{external_generate, TransportError};
pub use model::{
    EncodedPrompt, PolicyModel, SampleParams, SnapshotError, DEFAULT_MAX_TOKENS, DEFAULT_ORDER, DEFAULT_SMOOTHING,
    DEFAULT_TEMPERATURE,
};
pub use prompt::{PromptRecord, Role, WeightedExample};
pub use tokens::{detokenize, tokenize};
