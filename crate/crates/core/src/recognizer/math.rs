//! Softmax-layer math. Forward passes accumulate in f64 regardless of the
//! stored weight precision; the f64 entry points below are also what the
//! gradient-check suite drives with finite differences.

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Logits of one frame against f32 weight rows: `W x + b`.
pub fn logits_f32(weights: &[Vec<f32>], bias: &[f32], frame: &[f64]) -> Vec<f64> {
    weights
        .iter()
        .zip(bias)
        .map(|(row, &b)| {
            let mut z = b as f64;
            for (&w, &x) in row.iter().zip(frame) {
                z += w as f64 * x;
            }
            z
        })
        .collect()
}

fn logits_f64(weights: &[Vec<f64>], bias: &[f64], frame: &[f64]) -> Vec<f64> {
    weights
        .iter()
        .zip(bias)
        .map(|(row, &b)| {
            let mut z = b;
            for (&w, &x) in row.iter().zip(frame) {
                z += w * x;
            }
            z
        })
        .collect()
}

/// Cross-entropy loss of one labeled frame.
pub fn frame_loss(weights: &[Vec<f64>], bias: &[f64], frame: &[f64], label: usize) -> f64 {
    let probs = softmax(&logits_f64(weights, bias, frame));
    -probs[label].max(f64::MIN_POSITIVE).ln()
}

/// Analytic gradient of [`frame_loss`] with respect to weights and bias:
/// row k gets `(p_k - [k == label]) * x`, bias k gets `(p_k - [k == label])`.
pub fn frame_gradient(
    weights: &[Vec<f64>],
    bias: &[f64],
    frame: &[f64],
    label: usize,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let probs = softmax(&logits_f64(weights, bias, frame));
    let grad_b: Vec<f64> = probs
        .iter()
        .enumerate()
        .map(|(k, &p)| p - f64::from(u8::from(k == label)))
        .collect();
    let grad_w = grad_b
        .iter()
        .map(|&g| frame.iter().map(|&x| g * x).collect())
        .collect();
    (grad_w, grad_b)
}

/// One online SGD step on f32 rows; the update applies the same analytic
/// gradient as [`frame_gradient`], computed in f64 and cast back per entry.
pub fn sgd_step(
    weights: &mut [Vec<f32>],
    bias: &mut [f32],
    frame: &[f64],
    label: usize,
    learning_rate: f64,
) {
    let probs = softmax(&logits_f32(weights, bias, frame));
    for (k, &p) in probs.iter().enumerate() {
        let g = p - f64::from(u8::from(k == label));
        let row = &mut weights[k];
        for (w, &x) in row.iter_mut().zip(frame) {
            *w = (*w as f64 - learning_rate * g * x) as f32;
        }
        bias[k] = (bias[k] as f64 - learning_rate * g) as f32;
    }
}
