//! The trainable reference line recognizer.
//!
//! A framewise linear-softmax classifier over fixed-width glyph cells: every
//! cell of a line image is one frame, and every frame is classified
//! independently against the model's codec. The engine is deliberately small
//! so that committee training stays desk-scale and exactly reproducible; it
//! sits behind plain functions over [`RecognizerModel`] so a sequence model
//! could replace it without touching the fold, vote, or selection machinery.

mod codec;
mod infer;
mod lloc;
pub mod math;
mod model;
mod model_io;
mod train;

pub use codec::Codec;
pub use infer::recognize;
pub use lloc::{read_lloc, read_lloc_set, write_lloc, write_lloc_set, ExtendedLloc};
pub use model::{ModelMeta, RecognizerModel, SCRATCH_PARENT};
pub use model_io::{load_model, save_model};
pub use train::{default_iterations, train, CheckpointLog, TrainConfig, TrainInit};
