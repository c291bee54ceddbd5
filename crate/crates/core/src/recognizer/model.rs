//! The recognizer model: codec, output-layer weights, and provenance.

use rand::Rng;

use crate::error::{Error, Result};
use crate::pretrain::SurgeryReport;
use crate::seed;

use super::codec::Codec;

/// Parent id of models trained without a starting model.
pub const SCRATCH_PARENT: &str = "scratch";

/// Provenance carried by every model and persisted in its file.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMeta {
    pub model_id: String,
    /// Id of the model training started from, or [`SCRATCH_PARENT`].
    pub parent: String,
    pub iterations: u64,
    pub seed: u64,
    /// Codec surgery applied before training, if any.
    pub surgery: Option<SurgeryReport>,
}

/// A framewise linear-softmax line recognizer.
///
/// `weights` holds one row per codec character (row `i` belongs to codec
/// index `i` at all times; codec surgery preserves this), each of length
/// `cell_width * cell_height`. Weights are f32 so the 9-significant-digit
/// text serialization round-trips bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RecognizerModel {
    pub codec: Codec,
    pub cell_width: usize,
    pub cell_height: usize,
    pub weights: Vec<Vec<f32>>,
    pub bias: Vec<f32>,
    pub meta: ModelMeta,
}

impl RecognizerModel {
    pub fn frame_size(&self) -> usize {
        self.cell_width * self.cell_height
    }

    /// Fresh model with all rows drawn uniformly from [-0.1, 0.1].
    pub fn random(
        codec: Codec,
        cell_width: usize,
        cell_height: usize,
        seed_value: u64,
        model_id: &str,
    ) -> Self {
        let mut rng = seed::rng(seed_value);
        let frame = cell_width * cell_height;
        let mut weights = Vec::with_capacity(codec.len());
        let mut bias = Vec::with_capacity(codec.len());
        for _ in 0..codec.len() {
            let (row, b) = random_row(frame, &mut rng);
            weights.push(row);
            bias.push(b);
        }
        RecognizerModel {
            codec,
            cell_width,
            cell_height,
            weights,
            bias,
            meta: ModelMeta {
                model_id: model_id.to_string(),
                parent: SCRATCH_PARENT.to_string(),
                iterations: 0,
                seed: seed_value,
                surgery: None,
            },
        }
    }

    /// Structural invariants checked on save and load.
    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != self.codec.len() || self.bias.len() != self.codec.len() {
            return Err(Error::invalid(format!(
                "model {}: {} weight rows / {} bias entries for codec of {}",
                self.meta.model_id,
                self.weights.len(),
                self.bias.len(),
                self.codec.len()
            )));
        }
        let frame = self.frame_size();
        for (i, row) in self.weights.iter().enumerate() {
            if row.len() != frame {
                return Err(Error::invalid(format!(
                    "model {}: row {i} has {} entries, expected {frame}",
                    self.meta.model_id,
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) || !self.bias[i].is_finite() {
                return Err(Error::invalid(format!(
                    "model {}: non-finite entry in row {i}",
                    self.meta.model_id
                )));
            }
        }
        Ok(())
    }
}

/// One freshly initialized output row (weights and bias entry).
pub(crate) fn random_row(frame_size: usize, rng: &mut impl Rng) -> (Vec<f32>, f32) {
    let row = (0..frame_size)
        .map(|_| rng.random_range(-0.1f32..=0.1))
        .collect();
    (row, rng.random_range(-0.1f32..=0.1))
}
