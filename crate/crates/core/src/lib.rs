//! Committee-based line OCR toolkit.
//!
//! The pipeline trains a committee of small framewise line recognizers via
//! cross-fold training, combines their outputs with majority or confidence
//! voting over aligned alternatives, warm-starts folds from existing models
//! by resizing their output layer to the new character set, and selects
//! additional training lines by maximal committee disagreement.
//!
//! Everything is seeded: the same corpus, plan, and training seeds reproduce
//! the same models, outputs, and reports bit for bit.

pub mod activelearn;
pub mod align;
pub mod corpus;
pub mod error;
pub mod experiment;
pub mod folds;
pub mod pretrain;
pub mod recognizer;
pub mod report;
pub mod seed;
pub mod textmetrics;
pub mod vote;

pub use error::{Error, Result};
pub use recognizer::{Codec, ExtendedLloc, RecognizerModel, TrainConfig};
