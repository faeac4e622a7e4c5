//! Per-query REINFORCE with a self-critical baseline, the supervised BCE
//! loss, their hybrid combination, and the epoch loop.
//!
//! One gradient update per query: the context's documents are scored with a
//! single train-mode forward pass (one dropout mask, shared by everything in
//! the step), the greedy ranking of those affinities truncated to M gives
//! the baseline reward, and B sampled actions give the surrogate loss
//!
//! ```text
//! L_rl = -(1/B) * sum_i log p(a_i) * (R_i - r_base)
//! ```
//!
//! whose exact gradient is chained through [`backward`]. The advantage is a
//! constant in the differentiation (score-function estimator). The hybrid
//! objective is `gamma * L_rl + (1 - gamma) * L_sl` with BCE as `L_sl`;
//! `gamma = 1` skips BCE entirely and `gamma = 0` skips sampling entirely.
//!
//! All randomness derives from `cfg.seed` through fixed ChaCha streams:
//! stream 0 initializes parameters, stream 1 shuffles query order per
//! epoch, stream 2 drives per-query dropout masks and action sampling.
//! Runs with the same config are bitwise identical.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bandit::{action_log_prob, greedy_ranking, sample_action};
use crate::config::TrainConfig;
use crate::letor::{Dataset, QueryContext};
use crate::metrics::{average_precision, ndcg_at_k, reciprocal_rank, reward, Ranking};
use crate::policy::{
    adam_step, backward, forward, init_params, AdamState, Mode, NetConfig, PolicyParams,
};
use crate::{Error, Result};

/// Loss breakdown for one query step.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryLossReport {
    pub rl_loss: f64,
    pub sl_loss: f64,
    /// Always `gamma * rl_loss + (1 - gamma) * sl_loss`.
    pub hybrid_loss: f64,
    /// Reward of the greedy ranking truncated to M.
    pub baseline_reward: f64,
    pub mean_sampled_reward: f64,
}

/// One epoch of the training history.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_rl_loss: f64,
    pub train_sl_loss: f64,
    pub val_map: f64,
    pub val_mrr: f64,
    pub val_ndcg10: f64,
}

/// Renders history as CSV with a fixed column order.
pub fn history_to_csv(history: &[EpochRecord]) -> String {
    let mut out = String::from("epoch,train_rl_loss,train_sl_loss,val_map,val_mrr,val_ndcg10\n");
    for r in history {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.epoch, r.train_rl_loss, r.train_sl_loss, r.val_map, r.val_mrr, r.val_ndcg10
        ));
    }
    out
}

fn feature_rows(ctx: &QueryContext) -> Vec<&[f64]> {
    ctx.documents.iter().map(|d| d.features.as_slice()).collect()
}

fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct RlParts {
    /// d L_rl / d affinity.
    upstream: Vec<f64>,
    rl_loss: f64,
    baseline_reward: f64,
    mean_sampled_reward: f64,
}

/// Baseline, samples and the affinity-level gradient of the surrogate loss.
fn rl_parts(
    aff: &[f64],
    ctx: &QueryContext,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<RlParts> {
    let rels = ctx.relevances();
    let total_relevant = ctx.total_relevant();
    let n = ctx.n_docs();
    let m = n.min(cfg.m_prime);

    let greedy = greedy_ranking(aff).truncated(m);
    let baseline_reward = reward(cfg.reward, &greedy, &rels, total_relevant)?;

    let b = cfg.b_samples as f64;
    let mut upstream = vec![0.0; n];
    let mut rl_loss = 0.0;
    let mut reward_sum = 0.0;
    for _ in 0..cfg.b_samples {
        let action = sample_action(aff, cfg.m_prime, cfg.epsilon, rng);
        let ranking = Ranking::new(action.indices.clone(), n)?;
        let r_i = reward(cfg.reward, &ranking, &rels, total_relevant)?;
        let (log_prob, dlogp) = action_log_prob(aff, &action.indices, cfg.epsilon)?;
        let advantage = r_i - baseline_reward;
        rl_loss -= log_prob * advantage;
        reward_sum += r_i;
        for (u, g) in upstream.iter_mut().zip(dlogp) {
            *u -= advantage * g;
        }
    }
    rl_loss /= b;
    for u in &mut upstream {
        *u /= b;
    }

    Ok(RlParts {
        upstream,
        rl_loss,
        baseline_reward,
        mean_sampled_reward: reward_sum / b,
    })
}

/// Policy-gradient loss and its exact parameter gradient for one query.
/// Draws the dropout mask seed and the B actions from `rng`.
pub fn rl_grad_for_query(
    params: &PolicyParams,
    ctx: &QueryContext,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(PolicyParams, QueryLossReport)> {
    let mask_seed: u64 = rng.random();
    let mode = Mode::Train {
        dropout: cfg.dropout,
        mask_seed,
    };
    let rows = feature_rows(ctx);
    let aff = forward(params, &rows, mode)?;
    let parts = rl_parts(&aff, ctx, cfg, rng)?;
    let grad = backward(params, &rows, mode, &parts.upstream)?;
    Ok((
        grad,
        QueryLossReport {
            rl_loss: parts.rl_loss,
            sl_loss: 0.0,
            hybrid_loss: parts.rl_loss,
            baseline_reward: parts.baseline_reward,
            mean_sampled_reward: parts.mean_sampled_reward,
        },
    ))
}

/// Mean binary cross-entropy over documents (`y = rel > 0`), with its
/// gradient with respect to the affinities. Affinities are clamped to
/// `[1e-6, 1 - 1e-6]`; the gradient is exact on the clamped expression.
pub fn bce_loss_grad(aff: &[f64], rels: &[u32]) -> (f64, Vec<f64>) {
    const LO: f64 = 1e-6;
    const HI: f64 = 1.0 - 1e-6;
    let n = aff.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; aff.len()];
    for (i, (&a, &rel)) in aff.iter().zip(rels).enumerate() {
        let y = if rel > 0 { 1.0 } else { 0.0 };
        let c = a.clamp(LO, HI);
        loss -= (y * c.ln() + (1.0 - y) * (1.0 - c).ln()) / n;
        // clamp has zero derivative outside (LO, HI)
        if a > LO && a < HI {
            grad[i] = (c - y) / (c * (1.0 - c) * n);
        }
    }
    (loss, grad)
}

/// Hybrid gradient `gamma * dL_rl + (1 - gamma) * dL_sl` for one query,
/// computed in a single backward pass over the shared dropout mask.
pub fn hybrid_grad_for_query(
    params: &PolicyParams,
    ctx: &QueryContext,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(PolicyParams, QueryLossReport)> {
    let mask_seed: u64 = rng.random();
    let mode = Mode::Train {
        dropout: cfg.dropout,
        mask_seed,
    };
    let rows = feature_rows(ctx);
    let aff = forward(params, &rows, mode)?;

    let mut upstream = vec![0.0; aff.len()];
    let mut report = QueryLossReport {
        rl_loss: 0.0,
        sl_loss: 0.0,
        hybrid_loss: 0.0,
        baseline_reward: 0.0,
        mean_sampled_reward: 0.0,
    };

    if cfg.gamma > 0.0 {
        let parts = rl_parts(&aff, ctx, cfg, rng)?;
        for (u, g) in upstream.iter_mut().zip(&parts.upstream) {
            *u += cfg.gamma * g;
        }
        report.rl_loss = parts.rl_loss;
        report.baseline_reward = parts.baseline_reward;
        report.mean_sampled_reward = parts.mean_sampled_reward;
    }
    if cfg.gamma < 1.0 {
        let (sl_loss, dl) = bce_loss_grad(&aff, &ctx.relevances());
        for (u, g) in upstream.iter_mut().zip(&dl) {
            *u += (1.0 - cfg.gamma) * g;
        }
        report.sl_loss = sl_loss;
    }
    report.hybrid_loss = cfg.gamma * report.rl_loss + (1.0 - cfg.gamma) * report.sl_loss;

    let grad = backward(params, &rows, mode, &upstream)?;
    Ok((grad, report))
}

/// One hybrid gradient step followed by one Adam update.
pub fn hybrid_step(
    params: &mut PolicyParams,
    adam: &mut AdamState,
    ctx: &QueryContext,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<QueryLossReport> {
    let (grad, report) = hybrid_grad_for_query(params, ctx, cfg, rng)?;
    adam_step(adam, params, &grad);
    Ok(report)
}

/// Greedy eval-mode MAP, MRR and nDCG@10 means over a dataset.
fn validation_metrics(params: &PolicyParams, ds: &Dataset) -> Result<(f64, f64, f64)> {
    if ds.n_queries() == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut map = 0.0;
    let mut mrr = 0.0;
    let mut ndcg10 = 0.0;
    for ctx in ds.contexts() {
        let rows = feature_rows(ctx);
        let aff = forward(params, &rows, Mode::Eval)?;
        let ranking = greedy_ranking(&aff);
        let rels = ctx.relevances();
        map += average_precision(&ranking, &rels, ctx.total_relevant())?;
        mrr += reciprocal_rank(&ranking, &rels);
        ndcg10 += ndcg_at_k(&ranking, &rels, 10);
    }
    let n = ds.n_queries() as f64;
    Ok((map / n, mrr / n, ndcg10 / n))
}

/// Trains for up to `cfg.epochs` epochs, one [`hybrid_step`] per query in a
/// seeded shuffled order, keeping the parameters with the best validation
/// MAP. Stops early after `cfg.patience` epochs without improvement.
pub fn train(
    train_ds: &Dataset,
    val_ds: &Dataset,
    cfg: &TrainConfig,
) -> Result<(PolicyParams, Vec<EpochRecord>)> {
    train_with_epoch_hook(train_ds, val_ds, cfg, |_, _| {})
}

/// [`train`] with a per-epoch observer: the hook is called with epoch 0 and
/// the freshly initialized parameters before any update, then with each
/// epoch number and the parameters after that epoch.
pub fn train_with_epoch_hook(
    train_ds: &Dataset,
    val_ds: &Dataset,
    cfg: &TrainConfig,
    mut hook: impl FnMut(usize, &PolicyParams),
) -> Result<(PolicyParams, Vec<EpochRecord>)> {
    if train_ds.n_queries() == 0 {
        return Err(Error::EmptyDataset);
    }
    cfg.validate()?;

    let net_cfg = NetConfig {
        input_dim: train_ds.feature_dim(),
        hidden_dim: cfg.hidden_dim,
        n_highway: cfg.n_highway,
        dropout: cfg.dropout,
        init_seed: cfg.seed,
    };
    let mut params = init_params(&net_cfg);
    let mut adam = AdamState::new(
        params.n_params(),
        cfg.lr,
        cfg.beta1,
        cfg.beta2,
        cfg.weight_decay,
    );
    let mut shuffle_rng = rng_stream(cfg.seed, 1);
    let mut step_rng = rng_stream(cfg.seed, 2);

    hook(0, &params);

    let mut best_params = params.clone();
    let mut best_map = f64::NEG_INFINITY;
    let mut epochs_without_improvement = 0usize;
    let mut history = Vec::new();

    for epoch in 1..=cfg.epochs {
        let mut order: Vec<usize> = (0..train_ds.n_queries()).collect();
        use rand::seq::SliceRandom;
        order.shuffle(&mut shuffle_rng);

        let mut rl_sum = 0.0;
        let mut sl_sum = 0.0;
        for &qi in &order {
            let report = hybrid_step(
                &mut params,
                &mut adam,
                &train_ds.contexts()[qi],
                cfg,
                &mut step_rng,
            )?;
            rl_sum += report.rl_loss;
            sl_sum += report.sl_loss;
        }

        let (val_map, val_mrr, val_ndcg10) = validation_metrics(&params, val_ds)?;
        let n = train_ds.n_queries() as f64;
        history.push(EpochRecord {
            epoch,
            train_rl_loss: rl_sum / n,
            train_sl_loss: sl_sum / n,
            val_map,
            val_mrr,
            val_ndcg10,
        });
        hook(epoch, &params);

        if val_map > best_map {
            best_map = val_map;
            best_params = params.clone();
            epochs_without_improvement = 0;
        } else {
            epochs_without_improvement += 1;
            if epochs_without_improvement > cfg.patience {
                break;
            }
        }
    }

    Ok((best_params, history))
}
