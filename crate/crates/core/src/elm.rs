//! Random hidden layer plus batch and recursive least-squares output training.
//!
//! The hidden layer is drawn once from a seeded stream and never trained.
//! Output weights `beta` come either from a single regularized normal-equations
//! solve ([`batch_train`]) or from an initial block followed by block RLS
//! updates ([`OnlineModel::sequential_update`]). Both routes minimise the same
//! objective, so for equal ridge they agree up to rounding.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Condition number above which the regularized normal equations are refused.
pub const MAX_CONDITION: f64 = 1e12;

pub const DEFAULT_RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Sigmoid,
    Tanh,
    Hardlimit,
    Sine,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Tanh => z.tanh(),
            Activation::Hardlimit => {
                if z >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sine => z.sin(),
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            Activation::Sigmoid => 0,
            Activation::Tanh => 1,
            Activation::Hardlimit => 2,
            Activation::Sine => 3,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => Activation::Sigmoid,
            1 => Activation::Tanh,
            2 => Activation::Hardlimit,
            3 => Activation::Sine,
            _ => return None,
        })
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
            Activation::Hardlimit => "hardlimit",
            Activation::Sine => "sine",
        })
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sigmoid" | "sig" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            "hardlimit" | "hardlim" => Ok(Activation::Hardlimit),
            "sine" | "sin" => Ok(Activation::Sine),
            other => Err(Error::config(format!("unknown activation '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub n_hidden: usize,
    pub activation: Activation,
    pub input_dim: usize,
    pub output_dim: usize,
    pub ridge: f64,
    pub seed: u64,
}

impl NetworkConfig {
    pub fn new(n_hidden: usize, input_dim: usize, output_dim: usize) -> Self {
        Self {
            n_hidden,
            activation: Activation::default(),
            input_dim,
            output_dim,
            ridge: DEFAULT_RIDGE,
            seed: 0,
        }
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    pub fn with_ridge(mut self, ridge: f64) -> Self {
        self.ridge = ridge;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_hidden == 0 {
            return Err(Error::config("hidden neuron count must be at least 1"));
        }
        if self.input_dim == 0 {
            return Err(Error::config("input dimension must be at least 1"));
        }
        if self.output_dim < 2 {
            return Err(Error::config(format!(
                "output dimension must be at least 2, got {}",
                self.output_dim
            )));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::config(format!(
                "ridge must be a finite nonnegative number, got {}",
                self.ridge
            )));
        }
        Ok(())
    }
}

/// Fixed random projection `g(W x + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenLayer {
    config: NetworkConfig,
    /// `n_hidden x input_dim`, one row per neuron.
    weights: DMatrix<f64>,
    biases: DVector<f64>,
}

impl HiddenLayer {
    /// Draws weights then biases, row by row, uniformly from `[-1, 1]`.
    pub fn new(config: NetworkConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut weights = DMatrix::zeros(config.n_hidden, config.input_dim);
        for i in 0..config.n_hidden {
            for j in 0..config.input_dim {
                weights[(i, j)] = rng.random_range(-1.0..=1.0);
            }
        }
        let biases = DVector::from_fn(config.n_hidden, |_, _| rng.random_range(-1.0..=1.0));
        Ok(Self {
            config,
            weights,
            biases,
        })
    }

    /// Builds a layer from explicit parameters (used by persistence and tests).
    pub fn from_parts(
        config: NetworkConfig,
        weights: DMatrix<f64>,
        biases: DVector<f64>,
    ) -> Result<Self> {
        config.validate()?;
        if weights.shape() != (config.n_hidden, config.input_dim) {
            return Err(Error::shape(format!(
                "weights are {:?}, expected ({}, {})",
                weights.shape(),
                config.n_hidden,
                config.input_dim
            )));
        }
        if biases.len() != config.n_hidden {
            return Err(Error::shape(format!(
                "{} biases for {} hidden neurons",
                biases.len(),
                config.n_hidden
            )));
        }
        Ok(Self {
            config,
            weights,
            biases,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn biases(&self) -> &DVector<f64> {
        &self.biases
    }

    /// Hidden output matrix `H`, `N x n_hidden`, with `H[i][j] = g(w_j . x_i + b_j)`.
    pub fn hidden_output(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.ncols() != self.config.input_dim {
            return Err(Error::shape(format!(
                "input has {} columns, layer expects {}",
                x.ncols(),
                self.config.input_dim
            )));
        }
        let mut h = x * self.weights.transpose();
        let g = self.config.activation;
        for (j, mut col) in h.column_iter_mut().enumerate() {
            let b = self.biases[j];
            col.apply(|v| *v = g.apply(*v + b));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("hidden output is not finite".into()));
        }
        Ok(h)
    }
}

pub fn init_layer(config: NetworkConfig) -> Result<HiddenLayer> {
    HiddenLayer::new(config)
}

/// `(H^T H + ridge I)^-1`, refusing ill-conditioned systems.
pub fn regularized_inverse(h: &DMatrix<f64>, ridge: f64) -> Result<DMatrix<f64>> {
    let k = h.ncols();
    let mut gram = h.transpose() * h;
    for i in 0..k {
        gram[(i, i)] += ridge;
    }
    let condition = condition_estimate(&gram);
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::Singular { condition });
    }
    let chol = gram.cholesky().ok_or(Error::Singular { condition })?;
    let mut inv = chol.inverse();
    symmetrize(&mut inv);
    Ok(inv)
}

/// Ratio of extreme eigenvalues of a symmetric matrix; infinite when not positive definite.
fn condition_estimate(sym: &DMatrix<f64>) -> f64 {
    let eig = sym.clone().symmetric_eigenvalues();
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 || !min.is_finite() || !max.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Ridge-regularized least squares `beta = (H^T H + ridge I)^-1 H^T Y`.
pub fn batch_train(h: &DMatrix<f64>, y: &DMatrix<f64>, ridge: f64) -> Result<DMatrix<f64>> {
    check_rows(h, y)?;
    let m = regularized_inverse(h, ridge)?;
    Ok(&m * (h.transpose() * y))
}

fn check_rows(h: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<()> {
    if h.nrows() == 0 {
        return Err(Error::shape("no rows to train on"));
    }
    if h.nrows() != y.nrows() {
        return Err(Error::shape(format!(
            "{} hidden rows but {} target rows",
            h.nrows(),
            y.nrows()
        )));
    }
    Ok(())
}

/// Output weights plus the RLS state matrix `M`, tied to the layer they were trained under.
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineModel {
    layer: HiddenLayer,
    beta: DMatrix<f64>,
    m: DMatrix<f64>,
    samples_seen: u64,
}

impl OnlineModel {
    /// A model that has seen no data; prediction and updates fail until it is trained.
    pub fn untrained(layer: HiddenLayer) -> Self {
        let k = layer.config.n_hidden;
        let l = layer.config.output_dim;
        Self {
            layer,
            beta: DMatrix::zeros(k, l),
            m: DMatrix::zeros(k, k),
            samples_seen: 0,
        }
    }

    /// Initial block: `M0 = (H0^T H0 + ridge I)^-1`, `beta0 = M0 H0^T Y0`.
    pub fn init_block(layer: HiddenLayer, x0: &DMatrix<f64>, y0: &DMatrix<f64>) -> Result<Self> {
        let h0 = layer.hidden_output(x0)?;
        Self::init_from_hidden(layer, &h0, y0)
    }

    /// As [`OnlineModel::init_block`], with the hidden output already computed.
    pub fn init_from_hidden(
        layer: HiddenLayer,
        h0: &DMatrix<f64>,
        y0: &DMatrix<f64>,
    ) -> Result<Self> {
        check_rows(h0, y0)?;
        if h0.ncols() != layer.config.n_hidden || y0.ncols() != layer.config.output_dim {
            return Err(Error::shape(format!(
                "initial block is {}x{} hidden / {}x{} targets for a {}-neuron, {}-label network",
                h0.nrows(),
                h0.ncols(),
                y0.nrows(),
                y0.ncols(),
                layer.config.n_hidden,
                layer.config.output_dim
            )));
        }
        let m = regularized_inverse(h0, layer.config.ridge)?;
        let beta = &m * (h0.transpose() * y0);
        Ok(Self {
            layer,
            beta,
            m,
            samples_seen: h0.nrows() as u64,
        })
    }

    /// Rebuilds a trained model from stored parts.
    pub fn from_parts(
        layer: HiddenLayer,
        beta: DMatrix<f64>,
        m: DMatrix<f64>,
        samples_seen: u64,
    ) -> Result<Self> {
        let k = layer.config.n_hidden;
        let l = layer.config.output_dim;
        if beta.shape() != (k, l) || m.shape() != (k, k) {
            return Err(Error::shape(format!(
                "beta {:?} / M {:?} do not match {k} neurons and {l} labels",
                beta.shape(),
                m.shape()
            )));
        }
        Ok(Self {
            layer,
            beta,
            m,
            samples_seen,
        })
    }

    /// Block RLS step for a chunk of `c` rows.
    ///
    /// `M' = M - M H^T (I_c + H M H^T)^-1 H M` and
    /// `beta' = beta + M' H^T (Y - H beta)`; with `c = 1` this is the rank-one update.
    pub fn sequential_update(&mut self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<()> {
        let h = self.layer.hidden_output(x)?;
        self.update_from_hidden(&h, y)
    }

    pub fn update_from_hidden(&mut self, h: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<()> {
        self.ensure_trained()?;
        check_rows(h, y)?;
        if h.ncols() != self.layer.config.n_hidden {
            return Err(Error::shape(format!(
                "chunk hidden output has {} columns, expected {}",
                h.ncols(),
                self.layer.config.n_hidden
            )));
        }
        if y.ncols() != self.layer.config.output_dim {
            return Err(Error::shape(format!(
                "chunk targets have {} columns, expected {}",
                y.ncols(),
                self.layer.config.output_dim
            )));
        }

        let p = &self.m * h.transpose();
        let mut s = h * &p;
        for i in 0..s.nrows() {
            s[(i, i)] += 1.0;
        }
        symmetrize(&mut s);
        let gain_t = match s.clone().cholesky() {
            Some(chol) => chol.solve(&p.transpose()),
            None => s.lu().solve(&p.transpose()).ok_or_else(|| {
                Error::Numerical("innovation matrix of the chunk is singular".into())
            })?,
        };
        self.m -= &p * gain_t;
        symmetrize(&mut self.m);

        let residual = y - h * &self.beta;
        self.beta += &self.m * (h.transpose() * residual);
        if self.beta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("output weights diverged".into()));
        }
        self.samples_seen += h.nrows() as u64;
        Ok(())
    }

    /// Raw network outputs `Y = H beta`, `N x L`.
    pub fn predict_raw(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.ensure_trained()?;
        let h = self.layer.hidden_output(x)?;
        Ok(h * &self.beta)
    }

    fn ensure_trained(&self) -> Result<()> {
        if self.samples_seen == 0 {
            return Err(Error::State("model has not been trained".into()));
        }
        Ok(())
    }

    pub fn layer(&self) -> &HiddenLayer {
        &self.layer
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.layer.config
    }

    pub fn beta(&self) -> &DMatrix<f64> {
        &self.beta
    }

    pub fn state_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn samples_seen(&self) -> u64 {
        self.samples_seen
    }

    pub fn is_trained(&self) -> bool {
        self.samples_seen > 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_layer(activation: Activation, n: usize, k: usize) -> HiddenLayer {
        let cfg = NetworkConfig::new(k, n, 2).with_activation(activation);
        HiddenLayer::from_parts(cfg, DMatrix::zeros(k, n), DVector::zeros(k)).unwrap()
    }

    /// One neuron whose output is always 1 (hardlimit at zero).
    fn unit_layer(ridge: f64) -> HiddenLayer {
        let cfg = NetworkConfig::new(1, 1, 2)
            .with_activation(Activation::Hardlimit)
            .with_ridge(ridge);
        HiddenLayer::from_parts(cfg, DMatrix::zeros(1, 1), DVector::zeros(1)).unwrap()
    }

    #[test]
    fn layer_is_deterministic_in_seed() {
        let cfg = NetworkConfig::new(20, 4, 3).with_seed(42);
        let a = init_layer(cfg).unwrap();
        let b = init_layer(cfg).unwrap();
        assert_eq!(a, b);
        let c = init_layer(cfg.with_seed(43)).unwrap();
        assert_ne!(a.weights(), c.weights());
    }

    #[test]
    fn tiny_layer_in_range() {
        for seed in 0..50 {
            let l = init_layer(NetworkConfig::new(1, 1, 2).with_seed(seed)).unwrap();
            assert!((-1.0..=1.0).contains(&l.weights()[(0, 0)]));
            assert!((-1.0..=1.0).contains(&l.biases()[0]));
        }
    }

    #[test]
    fn weight_mean_near_zero() {
        let l = init_layer(NetworkConfig::new(100, 8, 2).with_seed(7)).unwrap();
        let mean = l.weights().mean();
        // 800 draws, sd of mean ~ 0.02
        assert!(mean.abs() < 0.1, "mean {mean}");
    }

    #[test]
    fn config_validation() {
        assert!(NetworkConfig::new(0, 1, 2).validate().is_err());
        assert!(NetworkConfig::new(1, 0, 2).validate().is_err());
        assert!(NetworkConfig::new(1, 1, 1).validate().is_err());
        assert!(NetworkConfig::new(1, 1, 2)
            .with_ridge(-1.0)
            .validate()
            .is_err());
        assert!(NetworkConfig::new(1, 1, 2)
            .with_ridge(f64::NAN)
            .validate()
            .is_err());
    }

    #[test]
    fn zero_weights_give_activation_at_zero() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, -2.0, 0.5, 4.0, -7.0, 3.0]);
        let h = zero_layer(Activation::Sigmoid, 2, 5)
            .hidden_output(&x)
            .unwrap();
        assert!(h.iter().all(|&v| v == 0.5));
        let h = zero_layer(Activation::Tanh, 2, 5)
            .hidden_output(&x)
            .unwrap();
        assert!(h.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hidden_output_scalar_arithmetic() {
        let cfg = NetworkConfig::new(1, 2, 2);
        let layer = HiddenLayer::from_parts(
            cfg,
            DMatrix::from_row_slice(1, 2, &[0.5, -0.25]),
            DVector::from_element(1, 0.1),
        )
        .unwrap();
        let h = layer
            .hidden_output(&DMatrix::from_row_slice(1, 2, &[1.0, 2.0]))
            .unwrap();
        // 0.5*1 - 0.25*2 + 0.1 = 0.1
        let expected = 1.0 / (1.0 + (-0.1f64).exp());
        assert!((h[(0, 0)] - expected).abs() < 1e-15);
    }

    #[test]
    fn hidden_output_shape_error() {
        let layer = zero_layer(Activation::Sigmoid, 3, 2);
        let x = DMatrix::zeros(4, 2);
        assert!(matches!(layer.hidden_output(&x), Err(Error::Shape(_))));
    }

    #[test]
    fn batch_identity_design() {
        let h = DMatrix::<f64>::identity(4, 4);
        let y = DMatrix::from_row_slice(4, 2, &[1.0, -1.0, 2.0, 3.0, -4.0, 0.5, 0.0, 7.0]);
        let beta = batch_train(&h, &y, 0.0).unwrap();
        assert!((beta - &y).abs().max() < 1e-14);
    }

    #[test]
    fn batch_scaled_identity() {
        let h = DMatrix::<f64>::identity(3, 3) * 2.0;
        let y = DMatrix::<f64>::identity(3, 3);
        let beta = batch_train(&h, &y, 0.0).unwrap();
        assert!((beta - DMatrix::<f64>::identity(3, 3) * 0.5).abs().max() < 1e-15);
    }

    #[test]
    fn batch_row_mismatch() {
        let h = DMatrix::<f64>::identity(3, 3);
        let y = DMatrix::<f64>::zeros(2, 2);
        assert!(matches!(batch_train(&h, &y, 0.0), Err(Error::Shape(_))));
    }

    #[test]
    fn scalar_initial_block_and_update() {
        let h0 = DMatrix::from_element(2, 1, 1.0);
        let y0 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 3.0, 0.0]);
        let mut model = OnlineModel::init_from_hidden(unit_layer(0.0), &h0, &y0).unwrap();
        assert!((model.state_matrix()[(0, 0)] - 0.5).abs() < 1e-12);
        assert!((model.beta()[(0, 0)] - 2.0).abs() < 1e-12);
        assert_eq!(model.samples_seen(), 2);

        let h1 = DMatrix::from_element(1, 1, 1.0);
        let y1 = DMatrix::from_row_slice(1, 2, &[5.0, 0.0]);
        model.update_from_hidden(&h1, &y1).unwrap();
        assert!((model.state_matrix()[(0, 0)] - 1.0 / 3.0).abs() < 1e-12);
        assert!((model.beta()[(0, 0)] - 3.0).abs() < 1e-12);
        assert_eq!(model.samples_seen(), 3);

        let raw = model
            .predict_raw(&DMatrix::from_element(1, 1, 9.0))
            .unwrap();
        assert!((raw[(0, 0)] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_block_is_singular() {
        let layer = init_layer(NetworkConfig::new(10, 3, 2).with_ridge(0.0).with_seed(1)).unwrap();
        let x = DMatrix::from_fn(4, 3, |i, j| (i * 3 + j) as f64 * 0.1);
        let y = DMatrix::from_element(4, 2, 1.0);
        assert!(matches!(
            OnlineModel::init_block(layer, &x, &y),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn untrained_model_refuses_work() {
        let layer = zero_layer(Activation::Sigmoid, 2, 3);
        let mut model = OnlineModel::untrained(layer);
        let x = DMatrix::zeros(1, 2);
        assert!(matches!(model.predict_raw(&x), Err(Error::State(_))));
        assert!(matches!(
            model.sequential_update(&x, &DMatrix::zeros(1, 2)),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn zero_beta_predicts_zero() {
        let layer = init_layer(NetworkConfig::new(5, 2, 3).with_seed(3)).unwrap();
        let model =
            OnlineModel::from_parts(layer, DMatrix::zeros(5, 3), DMatrix::identity(5, 5), 1)
                .unwrap();
        let raw = model
            .predict_raw(&DMatrix::from_element(4, 2, 0.3))
            .unwrap();
        assert!(raw.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn chunk_shape_errors() {
        let layer = init_layer(NetworkConfig::new(4, 2, 2).with_seed(5)).unwrap();
        let x0 = DMatrix::from_fn(10, 2, |i, j| ((i + 2 * j) as f64).sin());
        let y0 = DMatrix::from_fn(10, 2, |i, j| if (i + j) % 2 == 0 { 1.0 } else { -1.0 });
        let mut model = OnlineModel::init_block(layer, &x0, &y0).unwrap();
        assert!(matches!(
            model.sequential_update(&DMatrix::zeros(1, 3), &DMatrix::zeros(1, 2)),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            model.sequential_update(&DMatrix::zeros(1, 2), &DMatrix::zeros(1, 3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn activation_parse_and_values() {
        assert_eq!("TANH".parse::<Activation>().unwrap(), Activation::Tanh);
        assert!("relu".parse::<Activation>().is_err());
        assert_eq!(Activation::Hardlimit.apply(-1e-9), 0.0);
        assert_eq!(Activation::Hardlimit.apply(0.0), 1.0);
        assert_eq!(Activation::Sine.apply(0.0), 0.0);
        for a in [
            Activation::Sigmoid,
            Activation::Tanh,
            Activation::Hardlimit,
            Activation::Sine,
        ] {
            assert_eq!(Activation::from_code(a.code()), Some(a));
        }
    }
}
