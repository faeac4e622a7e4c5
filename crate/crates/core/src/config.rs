//! Training configuration and its flat `key = value` file format.

use crate::letor::NormalizeMode;
use crate::metrics::RewardSpec;
use crate::{Error, Result};

/// Everything the trainer needs besides the data. Defaults follow the web
/// search protocol: three 92-unit highway layers, ε = 0.1, M' = 40, B = 30,
/// γ = 0.5, Adam(7e-5, betas (0, 0.999)), weight decay 1e-6, dropout 0.4.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Per-step probability of sampling uniformly from the remaining docs.
    pub epsilon: f64,
    /// Sample length cap M'; each action ranks `min(n_docs, m_prime)` docs.
    pub m_prime: usize,
    /// Number of actions sampled per query step (B).
    pub b_samples: usize,
    /// Weight of the policy-gradient loss in the hybrid objective.
    pub gamma: f64,
    pub reward: RewardSpec,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub weight_decay: f64,
    pub dropout: f64,
    pub epochs: usize,
    /// Stop after this many epochs without a validation MAP improvement.
    pub patience: usize,
    pub seed: u64,
    /// Hidden width of the affinity network.
    pub hidden_dim: usize,
    /// Number of highway layers.
    pub n_highway: usize,
    /// Feature normalization applied by the CLI before training/eval.
    pub normalize: NormalizeMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            m_prime: 40,
            b_samples: 30,
            gamma: 0.5,
            reward: RewardSpec::ApNdcg10Mean,
            lr: 7e-5,
            beta1: 0.0,
            beta2: 0.999,
            weight_decay: 1e-6,
            dropout: 0.4,
            epochs: 30,
            patience: 30,
            seed: 42,
            hidden_dim: 92,
            n_highway: 3,
            normalize: NormalizeMode::None,
        }
    }
}

impl TrainConfig {
    /// Parses a flat `key = value` file. Blank lines and lines starting
    /// with `#` are ignored; unknown keys are errors. Keys not present
    /// keep their defaults.
    pub fn from_key_value_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", idx + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| Error::Config(format!("line {}: bad {what} `{value}`", idx + 1));
            match key {
                "epsilon" => cfg.epsilon = value.parse().map_err(|_| bad("epsilon"))?,
                "m_prime" => cfg.m_prime = value.parse().map_err(|_| bad("m_prime"))?,
                "b_samples" => cfg.b_samples = value.parse().map_err(|_| bad("b_samples"))?,
                "gamma" => cfg.gamma = value.parse().map_err(|_| bad("gamma"))?,
                "reward" => cfg.reward = value.parse()?,
                "lr" => cfg.lr = value.parse().map_err(|_| bad("lr"))?,
                "beta1" => cfg.beta1 = value.parse().map_err(|_| bad("beta1"))?,
                "beta2" => cfg.beta2 = value.parse().map_err(|_| bad("beta2"))?,
                "weight_decay" => cfg.weight_decay = value.parse().map_err(|_| bad("weight_decay"))?,
                "dropout" => cfg.dropout = value.parse().map_err(|_| bad("dropout"))?,
                "epochs" => cfg.epochs = value.parse().map_err(|_| bad("epochs"))?,
                "patience" => cfg.patience = value.parse().map_err(|_| bad("patience"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "hidden_dim" => cfg.hidden_dim = value.parse().map_err(|_| bad("hidden_dim"))?,
                "n_highway" => cfg.n_highway = value.parse().map_err(|_| bad("n_highway"))?,
                "normalize" => cfg.normalize = value.parse()?,
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(msg.to_string()))
            }
        };
        check(
            (0.0..=1.0).contains(&self.epsilon),
            "epsilon must be in [0, 1]",
        )?;
        check(self.m_prime >= 1, "m_prime must be at least 1")?;
        check(self.b_samples >= 1, "b_samples must be at least 1")?;
        check((0.0..=1.0).contains(&self.gamma), "gamma must be in [0, 1]")?;
        check(self.lr > 0.0, "lr must be positive")?;
        check(
            (0.0..1.0).contains(&self.dropout),
            "dropout must be in [0, 1)",
        )?;
        check(self.epochs >= 1, "epochs must be at least 1")?;
        check(self.hidden_dim >= 1, "hidden_dim must be at least 1")?;
        Ok(())
    }
}
