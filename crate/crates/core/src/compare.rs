//! Reward-function comparison harness: trains one pure policy-gradient
//! model (γ = 1) per reward spec from identical seeds and records test-set
//! MAP and nDCG@10 after every epoch, including epoch 0 (the shared
//! initialization, before any update).

use crate::config::TrainConfig;
use crate::eval::evaluate;
use crate::letor::Dataset;
use crate::metrics::RewardSpec;
use crate::trainer::train_with_epoch_hook;
use crate::{Error, Result};

/// Returns CSV with columns `reward,epoch,test_map,test_ndcg10`.
pub fn run_reward_comparison(
    train_ds: &Dataset,
    val_ds: &Dataset,
    test_ds: &Dataset,
    base_cfg: &TrainConfig,
    specs: &[RewardSpec],
) -> Result<String> {
    if specs.is_empty() {
        return Err(Error::Config("no reward specs to compare".into()));
    }

    let mut csv = String::from("reward,epoch,test_map,test_ndcg10\n");
    for &spec in specs {
        let cfg = TrainConfig {
            reward: spec,
            gamma: 1.0,
            ..base_cfg.clone()
        };
        let mut rows: Vec<(usize, f64, f64)> = Vec::new();
        let mut hook_error: Option<Error> = None;
        train_with_epoch_hook(train_ds, val_ds, &cfg, |epoch, params| {
            if hook_error.is_some() {
                return;
            }
            match evaluate(params, test_ds) {
                Ok(report) => rows.push((epoch, report.mean.ap, report.mean.ndcg_at_10)),
                Err(e) => hook_error = Some(e),
            }
        })?;
        if let Some(e) = hook_error {
            return Err(e);
        }
        for (epoch, map, ndcg10) in rows {
            csv.push_str(&format!("{spec},{epoch},{map},{ndcg10}\n"));
        }
    }
    Ok(csv)
}
