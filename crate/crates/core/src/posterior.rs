//! Desk-scale reference classifiers, their diagonal-Hessian Gaussian
//! posteriors, and the loss matrices sampled from them.

use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{row_slice, LossKind, LossMatrix};

/// Standard deviation of the seeded parameter initialization.
pub const INIT_STD: f64 = 0.1;
/// Sampling never uses a standard deviation below this.
pub const MIN_STD: f64 = 1e-300;

/// Labeled inputs; labels are class indices `0..n_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Array2<f64>,
    labels: Vec<usize>,
    n_classes: usize,
}

impl Dataset {
    pub fn new(inputs: Array2<f64>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if inputs.nrows() == 0 || inputs.ncols() == 0 {
            return Err(Error::EmptyInput("dataset"));
        }
        if labels.len() != inputs.nrows() {
            return Err(Error::Dimension { expected: inputs.nrows(), found: labels.len() });
        }
        if n_classes < 2 {
            return Err(Error::Config(format!("need at least 2 classes, got {n_classes}")));
        }
        if let Some((n, y)) = labels.iter().enumerate().find(|(_, &y)| y >= n_classes) {
            return Err(Error::Config(format!("label {y} of datum {n} exceeds {} classes", n_classes)));
        }
        if let Some(((n, f), v)) = inputs.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Config(format!("input {n}, feature {f} is {v}")));
        }
        Ok(Self { inputs: inputs.as_standard_layout().into_owned(), labels, n_classes })
    }

    /// Two isotropic unit-variance Gaussian blobs in `d` dimensions whose means
    /// sit at `-separation/2` and `+separation/2` along the first axis. With a
    /// margin, points closer than it to the plane `x_0 = 0` (or on the wrong
    /// side) are redrawn, which makes the classes linearly separable.
    pub fn blobs(n: usize, d: usize, separation: f64, margin: Option<f64>, seed: u64) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::EmptyInput("blobs"));
        }
        if let Some(m) = margin {
            if !(m >= 0.0 && m < separation / 2.0 + 3.0) {
                return Err(Error::Config(format!("margin {m} is not attainable")));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::with_capacity(n * d);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let label = usize::from(rng.random::<bool>());
            let sign = if label == 1 { 1.0 } else { -1.0 };
            let first = loop {
                let z: f64 = rng.sample(StandardNormal);
                let x = sign * separation / 2.0 + z;
                match margin {
                    Some(m) if sign * x < m => continue,
                    _ => break x,
                }
            };
            values.push(first);
            for _ in 1..d {
                values.push(rng.sample(StandardNormal));
            }
            labels.push(label);
        }
        let inputs = Array2::from_shape_vec((n, d), values).expect("n * d values");
        Self::new(inputs, labels, 2)
    }

    /// Reads rows of features with the label in the last column. Labels are
    /// `-1/+1` or `0..C-1`.
    pub fn from_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
        let mut values = Vec::new();
        let mut raw_labels = Vec::new();
        let mut width = None;
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            let offset = record.position().map_or(0, |p| p.byte());
            let fields = record
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| Error::Format { offset, message: format!("line {}: {e}", line + 1) })
                })
                .collect::<Result<Vec<f64>>>()?;
            if fields.len() < 2 {
                return Err(Error::Format { offset, message: format!("line {}: need features and a label", line + 1) });
            }
            let d = fields.len() - 1;
            if *width.get_or_insert(d) != d {
                return Err(Error::Format { offset, message: format!("line {}: expected {} features", line + 1, d) });
            }
            let label = fields[d];
            if label.fract() != 0.0 {
                return Err(Error::Format { offset, message: format!("line {}: label {label} is not an integer", line + 1) });
            }
            values.extend_from_slice(&fields[..d]);
            raw_labels.push(label as i64);
        }
        let d = width.ok_or(Error::EmptyInput("dataset"))?;
        let signed = raw_labels.contains(&-1);
        let labels = raw_labels
            .iter()
            .map(|&y| match (signed, y) {
                (true, -1) => Ok(0),
                (true, 1) => Ok(1),
                (false, y) if y >= 0 => Ok(y as usize),
                _ => Err(Error::Config(format!("unsupported label {y}"))),
            })
            .collect::<Result<Vec<usize>>>()?;
        let n_classes = labels.iter().copied().max().unwrap_or(0).max(1) + 1;
        let inputs = Array2::from_shape_vec((raw_labels.len(), d), values).expect("rectangular rows");
        Self::new(inputs, labels, n_classes)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    /// Writes features and label per row; binary labels are written as `-1/+1`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        for (n, &y) in self.labels.iter().enumerate() {
            let mut record: Vec<String> = self.input(n).iter().map(|v| v.to_string()).collect();
            let label = if self.n_classes == 2 { if y == 1 { 1 } else { -1 } } else { y as i64 };
            record.push(label.to_string());
            writer.write_record(&record)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.inputs.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn inputs(&self) -> &Array2<f64> {
        &self.inputs
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn input(&self, n: usize) -> &[f64] {
        row_slice(self.inputs.row(n))
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&index) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::Index { index, len: self.len() });
        }
        let inputs = self.inputs.select(ndarray::Axis(0), indices);
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Self::new(inputs, labels, self.n_classes)
    }

    /// The first `size` points, so checkpoints of increasing size are nested.
    pub fn checkpoint(&self, size: usize) -> Result<Self> {
        if size == 0 || size > self.len() {
            return Err(Error::Config(format!("checkpoint {size} outside 1..={}", self.len())));
        }
        self.subset(&(0..size).collect::<Vec<_>>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Architecture {
    Logistic,
    /// One tanh hidden layer.
    Mlp { hidden: usize },
}

impl Architecture {
    /// One logit for two classes, one per class otherwise.
    pub fn n_outputs(n_classes: usize) -> usize {
        if n_classes <= 2 {
            1
        } else {
            n_classes
        }
    }

    pub fn n_params(self, n_inputs: usize, n_classes: usize) -> usize {
        let o = Self::n_outputs(n_classes);
        match self {
            Self::Logistic => o * n_inputs + o,
            Self::Mlp { hidden } => hidden * n_inputs + hidden + o * hidden + o,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub epochs: usize,
    pub learning_rate: f64,
    pub n_train: usize,
    pub final_loss: f64,
}

/// Trained parameters `theta†` with enough shape information to evaluate them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceModel {
    pub architecture: Architecture,
    pub n_inputs: usize,
    pub n_classes: usize,
    pub theta: Vec<f64>,
    pub seed: u64,
    pub training_meta: TrainingMeta,
}

impl ReferenceModel {
    pub fn n_params(&self) -> usize {
        self.theta.len()
    }

    pub fn net(&self) -> Net {
        Net { architecture: self.architecture, n_inputs: self.n_inputs, n_classes: self.n_classes }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        self.net().predict(&self.theta, x)
    }

    /// Fraction of misclassified points.
    pub fn error_rate(&self, data: &Dataset) -> f64 {
        let net = self.net();
        let wrong = (0..data.len()).filter(|&n| net.predict(&self.theta, data.input(n)) != data.labels()[n]).count();
        wrong as f64 / data.len() as f64
    }

    pub fn mean_loss(&self, data: &Dataset) -> f64 {
        self.net().mean_loss(&self.theta, data)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let model: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let expected = model.architecture.n_params(model.n_inputs, model.n_classes);
        if model.theta.len() != expected {
            return Err(Error::Dimension { expected, found: model.theta.len() });
        }
        if let Some(coordinate) = model.theta.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical { coordinate });
        }
        Ok(model)
    }
}

/// Shape of a network; parameters are passed separately so perturbed copies
/// can be evaluated without cloning the model.
#[derive(Debug, Clone, Copy)]
pub struct Net {
    pub architecture: Architecture,
    pub n_inputs: usize,
    pub n_classes: usize,
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Net {
    fn n_outputs(&self) -> usize {
        Architecture::n_outputs(self.n_classes)
    }

    /// Logits, plus the hidden activations for the MLP.
    fn forward(&self, theta: &[f64], x: &[f64], logits: &mut Vec<f64>, hidden: &mut Vec<f64>) {
        let d = self.n_inputs;
        let o = self.n_outputs();
        logits.clear();
        hidden.clear();
        match self.architecture {
            Architecture::Logistic => {
                for k in 0..o {
                    let w = &theta[k * d..(k + 1) * d];
                    logits.push(w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + theta[o * d + k]);
                }
            }
            Architecture::Mlp { hidden: h } => {
                for j in 0..h {
                    let w = &theta[j * d..(j + 1) * d];
                    hidden.push((w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + theta[h * d + j]).tanh());
                }
                let base = h * d + h;
                for k in 0..o {
                    let w = &theta[base + k * h..base + (k + 1) * h];
                    logits.push(w.iter().zip(hidden.iter()).map(|(a, b)| a * b).sum::<f64>() + theta[base + o * h + k]);
                }
            }
        }
    }

    pub fn predict(&self, theta: &[f64], x: &[f64]) -> usize {
        let (mut logits, mut hidden) = (Vec::new(), Vec::new());
        self.forward(theta, x, &mut logits, &mut hidden);
        if logits.len() == 1 {
            usize::from(logits[0] > 0.0)
        } else {
            let mut best = 0;
            for k in 1..logits.len() {
                if logits[k] > logits[best] {
                    best = k;
                }
            }
            best
        }
    }

    /// Cross-entropy of one datum; writes `dloss/dlogit` into `dlogits`.
    fn logit_loss(logits: &[f64], y: usize, dlogits: &mut Vec<f64>) -> f64 {
        dlogits.clear();
        if logits.len() == 1 {
            let s = if y == 1 { 1.0 } else { -1.0 };
            dlogits.push(-s * sigmoid(-s * logits[0]));
            softplus(-s * logits[0])
        } else {
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let total: f64 = logits.iter().map(|z| (z - max).exp()).sum();
            for (k, z) in logits.iter().enumerate() {
                let p = (z - max).exp() / total;
                dlogits.push(p - if k == y { 1.0 } else { 0.0 });
            }
            max + total.ln() - logits[y]
        }
    }

    pub fn loss(&self, theta: &[f64], x: &[f64], y: usize) -> f64 {
        let (mut logits, mut hidden, mut dl) = (Vec::new(), Vec::new(), Vec::new());
        self.forward(theta, x, &mut logits, &mut hidden);
        Self::logit_loss(&logits, y, &mut dl)
    }

    pub fn mean_loss(&self, theta: &[f64], data: &Dataset) -> f64 {
        let total: f64 = (0..data.len()).map(|n| self.loss(theta, data.input(n), data.labels()[n])).sum();
        total / data.len() as f64
    }

    /// Mean cross-entropy and its gradient over the dataset.
    pub fn loss_and_gradient(&self, theta: &[f64], data: &Dataset) -> (f64, Vec<f64>) {
        let d = self.n_inputs;
        let o = self.n_outputs();
        let mut grad = vec![0.0; theta.len()];
        let (mut logits, mut hidden, mut dl) = (Vec::new(), Vec::new(), Vec::new());
        let mut dhidden = Vec::new();
        let mut total = 0.0;
        for n in 0..data.len() {
            let x = data.input(n);
            self.forward(theta, x, &mut logits, &mut hidden);
            total += Self::logit_loss(&logits, data.labels()[n], &mut dl);
            match self.architecture {
                Architecture::Logistic => {
                    for (k, &g) in dl.iter().enumerate() {
                        for (gw, xi) in grad[k * d..(k + 1) * d].iter_mut().zip(x) {
                            *gw += g * xi;
                        }
                        grad[o * d + k] += g;
                    }
                }
                Architecture::Mlp { hidden: h } => {
                    let base = h * d + h;
                    dhidden.clear();
                    dhidden.resize(h, 0.0);
                    for (k, &g) in dl.iter().enumerate() {
                        for j in 0..h {
                            grad[base + k * h + j] += g * hidden[j];
                            dhidden[j] += g * theta[base + k * h + j];
                        }
                        grad[base + o * h + k] += g;
                    }
                    for j in 0..h {
                        let pre = dhidden[j] * (1.0 - hidden[j] * hidden[j]);
                        for (gw, xi) in grad[j * d..(j + 1) * d].iter_mut().zip(x) {
                            *gw += pre * xi;
                        }
                        grad[h * d + j] += pre;
                    }
                }
            }
        }
        let scale = 1.0 / data.len() as f64;
        grad.iter_mut().for_each(|g| *g *= scale);
        (total * scale, grad)
    }
}

/// Full-batch gradient descent on mean cross-entropy from a seeded Gaussian
/// initialization.
pub fn train_reference(
    data: &Dataset,
    architecture: Architecture,
    epochs: usize,
    learning_rate: f64,
    seed: u64,
) -> Result<ReferenceModel> {
    if let Architecture::Mlp { hidden: 0 } = architecture {
        return Err(Error::Config("hidden width must be positive".into()));
    }
    if !(learning_rate > 0.0 && learning_rate.is_finite()) {
        return Err(Error::Config(format!("learning rate must be positive, got {learning_rate}")));
    }
    let net = Net { architecture, n_inputs: data.n_features(), n_classes: data.n_classes() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta: Vec<f64> = (0..architecture.n_params(data.n_features(), data.n_classes()))
        .map(|_| INIT_STD * rng.sample::<f64, _>(StandardNormal))
        .collect();
    for epoch in 0..epochs {
        let (loss, grad) = net.loss_and_gradient(&theta, data);
        if !loss.is_finite() {
            return Err(Error::Divergence { epoch, loss });
        }
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= learning_rate * g;
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Divergence { epoch, loss });
        }
    }
    let final_loss = net.mean_loss(&theta, data);
    if !final_loss.is_finite() {
        return Err(Error::Divergence { epoch: epochs, loss: final_loss });
    }
    Ok(ReferenceModel {
        architecture,
        n_inputs: data.n_features(),
        n_classes: data.n_classes(),
        theta,
        seed,
        training_meta: TrainingMeta { epochs, learning_rate, n_train: data.len(), final_loss },
    })
}

/// Diagonal of the Hessian of mean cross-entropy at `theta†`, by central
/// differences of the analytic gradient with step `1e-3 (1 + |theta_j|)`.
pub fn diagonal_hessian(model: &ReferenceModel, data: &Dataset) -> Result<Vec<f64>> {
    if data.n_features() != model.n_inputs {
        return Err(Error::Dimension { expected: model.n_inputs, found: data.n_features() });
    }
    let net = model.net();
    (0..model.n_params())
        .into_par_iter()
        .map(|j| {
            let h = 1e-3 * (1.0 + model.theta[j].abs());
            let mut theta = model.theta.clone();
            theta[j] = model.theta[j] + h;
            let plus = net.loss_and_gradient(&theta, data).1[j];
            theta[j] = model.theta[j] - h;
            let minus = net.loss_and_gradient(&theta, data).1[j];
            let value = (plus - minus) / (2.0 * h);
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::Numerical { coordinate: j })
            }
        })
        .collect()
}

/// Factorized Gaussian posterior `N(theta†, diag(std^2))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSpec {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub prior_std: f64,
}

impl PosteriorSpec {
    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// `std_j^{-2} = max(H_jj, prior_std^{-2})`; nonpositive curvature falls back to the prior.
pub fn build_posterior(theta: &[f64], hessian_diag: &[f64], prior_std: f64) -> Result<PosteriorSpec> {
    if !(prior_std > 0.0 && prior_std.is_finite()) {
        return Err(Error::Config(format!("prior_std must be positive, got {prior_std}")));
    }
    if theta.len() != hessian_diag.len() {
        return Err(Error::Dimension { expected: theta.len(), found: hessian_diag.len() });
    }
    let negative = hessian_diag.iter().filter(|&&h| h < 0.0).count();
    if negative > 0 {
        log::info!("{negative} negative Hessian diagonal entries use the prior scale");
    }
    let std = hessian_diag.iter().map(|&h| if h > 0.0 { prior_std.min(1.0 / h.sqrt()) } else { prior_std }).collect();
    Ok(PosteriorSpec { mean: theta.to_vec(), std, prior_std })
}

/// Draws `J` parameter vectors from one seeded stream, then evaluates every
/// datum under every draw. Row `n`, column `j` holds `l_n(theta_j)`.
pub fn sample_losses(
    model: &ReferenceModel,
    posterior: &PosteriorSpec,
    data: &Dataset,
    n_samples: usize,
    seed: u64,
    kind: LossKind,
) -> Result<LossMatrix> {
    if n_samples == 0 {
        return Err(Error::Config("at least one posterior sample is required".into()));
    }
    if posterior.mean.len() != model.n_params() || posterior.std.len() != model.n_params() {
        return Err(Error::Dimension { expected: model.n_params(), found: posterior.mean.len() });
    }
    if data.n_features() != model.n_inputs {
        return Err(Error::Dimension { expected: model.n_inputs, found: data.n_features() });
    }
    if kind == LossKind::Custom {
        return Err(Error::Config("sampled losses are zero-one or cross-entropy".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Vec<f64>> = (0..n_samples)
        .map(|_| {
            posterior
                .mean
                .iter()
                .zip(&posterior.std)
                .map(|(m, s)| m + s.max(MIN_STD) * rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    let net = model.net();
    let columns: Vec<Vec<f64>> = draws
        .par_iter()
        .map(|theta| {
            (0..data.len())
                .map(|n| {
                    let (x, y) = (data.input(n), data.labels()[n]);
                    match kind {
                        LossKind::ZeroOne => f64::from(u8::from(net.predict(theta, x) != y)),
                        _ => net.loss(theta, x, y),
                    }
                })
                .collect()
        })
        .collect();
    let mut values = Array2::zeros((data.len(), n_samples));
    for (j, col) in columns.iter().enumerate() {
        for (n, &v) in col.iter().enumerate() {
            values[[n, j]] = v;
        }
    }
    LossMatrix::new(values, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn tiny() -> Dataset {
        let inputs = array![[1.0, 0.5], [-0.3, 2.0], [0.7, -1.2], [-1.5, -0.4]];
        Dataset::new(inputs, vec![1, 0, 1, 0], 2).unwrap()
    }

    #[test]
    fn separable_blobs_train_to_zero_error() {
        let data = Dataset::blobs(200, 2, 4.0, Some(0.5), 7).unwrap();
        let model = train_reference(&data, Architecture::Logistic, 200, 0.5, 1).unwrap();
        assert_eq!(model.error_rate(&data), 0.0);
    }

    #[test]
    fn zero_epochs_keep_initialization() {
        let data = tiny();
        let a = train_reference(&data, Architecture::Mlp { hidden: 3 }, 0, 0.1, 5).unwrap();
        let b = train_reference(&data, Architecture::Mlp { hidden: 3 }, 0, 0.1, 5).unwrap();
        assert_eq!(a.theta, b.theta);
        assert_eq!(a.theta.len(), 3 * 2 + 3 + 3 + 1);
        let c = train_reference(&data, Architecture::Mlp { hidden: 3 }, 1, 0.1, 5).unwrap();
        assert_ne!(a.theta, c.theta);
    }

    #[test]
    fn single_class_loss_vanishes() {
        let inputs = array![[1.0], [2.0], [-1.0]];
        let data = Dataset::new(inputs, vec![1, 1, 1], 2).unwrap();
        let model = train_reference(&data, Architecture::Logistic, 2000, 1.0, 0).unwrap();
        assert!(model.training_meta.final_loss < 0.01);
        assert_eq!(model.error_rate(&data), 0.0);
    }

    #[test]
    fn huge_learning_rate_diverges() {
        let inputs = array![[1e300], [-1e300]];
        let data = Dataset::new(inputs, vec![0, 1], 2).unwrap();
        let err = train_reference(&data, Architecture::Logistic, 10, 1e300, 0).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }), "{err:?}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let data = Dataset::blobs(30, 3, 1.0, None, 2).unwrap();
        let multi = Dataset::new(data.inputs().clone(), (0..30).map(|n| n % 3).collect(), 3).unwrap();
        for (d, arch) in [
            (&data, Architecture::Logistic),
            (&data, Architecture::Mlp { hidden: 4 }),
            (&multi, Architecture::Logistic),
            (&multi, Architecture::Mlp { hidden: 4 }),
        ] {
            let model = train_reference(d, arch, 3, 0.1, 9).unwrap();
            let net = model.net();
            let (_, grad) = net.loss_and_gradient(&model.theta, d);
            for j in 0..model.n_params() {
                let mut t = model.theta.clone();
                t[j] += 1e-6;
                let up = net.mean_loss(&t, d);
                t[j] -= 2e-6;
                let down = net.mean_loss(&t, d);
                let fd = (up - down) / 2e-6;
                assert!((fd - grad[j]).abs() < 1e-6, "{arch:?} coordinate {j}: {fd} vs {}", grad[j]);
            }
        }
    }

    #[test]
    fn zero_inputs_have_zero_weight_curvature() {
        let inputs = Array2::zeros((5, 3));
        let data = Dataset::new(inputs, vec![0, 1, 1, 0, 1], 2).unwrap();
        let model = train_reference(&data, Architecture::Logistic, 10, 0.1, 0).unwrap();
        let h = diagonal_hessian(&model, &data).unwrap();
        assert!(h[..3].iter().all(|v| v.abs() < 1e-12));
        assert!(h[3] > 0.0);
    }

    #[test]
    fn duplicated_data_keeps_hessian() {
        let data = Dataset::blobs(20, 2, 2.0, None, 3).unwrap();
        let model = train_reference(&data, Architecture::Logistic, 20, 0.3, 0).unwrap();
        let doubled = data.subset(&(0..40).map(|i| i % 20).collect::<Vec<_>>()).unwrap();
        let a = diagonal_hessian(&model, &data).unwrap();
        let b = diagonal_hessian(&model, &doubled).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn posterior_scale_rules() {
        let p = build_posterior(&[0.0; 4], &[0.0, 1e8, 4e8, -3.0], 1e-4).unwrap();
        assert_eq!(p.std, vec![1e-4, 1e-4, 0.5e-4, 1e-4]);
        assert!(build_posterior(&[0.0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn point_mass_posterior_repeats_deterministic_losses() {
        let data = Dataset::blobs(40, 2, 1.0, None, 4).unwrap();
        let model = train_reference(&data, Architecture::Logistic, 50, 0.5, 0).unwrap();
        let post = PosteriorSpec { mean: model.theta.clone(), std: vec![0.0; model.n_params()], prior_std: 1e-4 };
        let losses = sample_losses(&model, &post, &data, 5, 1, LossKind::ZeroOne).unwrap();
        for n in 0..data.len() {
            let expected = f64::from(u8::from(model.predict(data.input(n)) != data.labels()[n]));
            assert!(losses.row(n).iter().all(|&v| v == expected));
        }
    }

    #[test]
    fn single_draw_matches_direct_evaluation() {
        let data = tiny();
        let model = train_reference(&data, Architecture::Logistic, 5, 0.5, 0).unwrap();
        let post = PosteriorSpec { mean: model.theta.clone(), std: vec![0.3; model.n_params()], prior_std: 0.3 };
        let losses = sample_losses(&model, &post, &data, 1, 11, LossKind::CrossEntropy).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let theta: Vec<f64> =
            model.theta.iter().map(|m| m + 0.3 * rng.sample::<f64, _>(StandardNormal)).collect();
        for n in 0..data.len() {
            let direct = model.net().loss(&theta, data.input(n), data.labels()[n]);
            assert_eq!(losses.row(n)[0], direct);
        }
    }

    #[test]
    fn csv_labels() {
        let data = Dataset::from_csv("0.5,1,-1\n2,3,1\n".as_bytes()).unwrap();
        assert_eq!(data.labels(), &[0, 1]);
        assert_eq!(data.n_classes(), 2);
        let mut out = Vec::new();
        data.write_csv(&mut out).unwrap();
        assert_eq!(Dataset::from_csv(&out[..]).unwrap(), data);
        let multi = Dataset::from_csv("1,0\n2,2\n3,1\n".as_bytes()).unwrap();
        assert_eq!(multi.n_classes(), 3);
        assert!(Dataset::from_csv("1,0.5\n".as_bytes()).is_err());
        assert!(Dataset::from_csv("1,2,0\n1,0\n".as_bytes()).is_err());
    }

    #[test]
    fn checkpoints_are_nested() {
        let data = Dataset::blobs(10, 2, 1.0, None, 0).unwrap();
        let small = data.checkpoint(3).unwrap();
        let large = data.checkpoint(6).unwrap();
        assert_eq!(small.labels(), &large.labels()[..3]);
        assert!(data.checkpoint(0).is_err());
        assert!(data.checkpoint(11).is_err());
    }
}
