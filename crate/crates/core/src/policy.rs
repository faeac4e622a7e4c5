//! The deterministic affinity network: an input projection with ReLU,
//! a stack of highway layers, and a sigmoid output unit, applied
//! independently to every document of a context.
//!
//! Gradients are exact reverse-mode derivatives of
//! `sum_i upstream[i] * affinity[i]`, computed by [`backward`] against the
//! same dropout masks as the paired [`forward`] call (masks are drawn from
//! an explicit seed, so a forward/backward pair is reproducible). Everything
//! is plain `f64`: the training sets are small and correctness is the point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Per-document scores in (0, 1) emitted by the network.
pub type Affinities = Vec<f64>;

/// Architecture and initialization settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub n_highway: usize,
    /// Dropout probability in `[0, 1)` applied after the projection and
    /// after every highway layer (train mode only).
    pub dropout: f64,
    pub init_seed: u64,
}

/// A dense layer; weights are row-major `out_dim x in_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Linear {
    fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Self {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            bias: vec![0.0; out_dim],
        }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let rows = self.weights.chunks_exact(self.in_dim);
        for ((row, b), out_v) in rows.zip(&self.bias).zip(out.iter_mut()) {
            *out_v = b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
    }

    /// Accumulates `W^T dz` into `out`.
    fn apply_transposed_add(&self, dz: &[f64], out: &mut [f64]) {
        for (row, &d) in self.weights.chunks_exact(self.in_dim).zip(dz) {
            for (w, acc) in row.iter().zip(out.iter_mut()) {
                *acc += w * d;
            }
        }
    }

    /// Accumulates the outer product `dz x^T` into the weight gradient and
    /// `dz` into the bias gradient.
    fn accumulate_grad(&mut self, dz: &[f64], x: &[f64]) {
        let rows = self.weights.chunks_exact_mut(self.in_dim);
        for ((row, b), &d) in rows.zip(self.bias.iter_mut()).zip(dz) {
            for (g, v) in row.iter_mut().zip(x) {
                *g += d * v;
            }
            *b += d;
        }
    }
}

/// One highway layer: `y = t .* g + (1 - t) .* x` with a sigmoid gate `t`
/// and a ReLU transform `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighwayLayer {
    pub transform: Linear,
    pub gate: Linear,
}

/// All learnable parameters of the affinity network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub projection: Linear,
    pub highway: Vec<HighwayLayer>,
    pub output: Linear,
}

impl PolicyParams {
    /// Zero-valued parameters with the shape prescribed by `cfg`.
    pub fn zeros(cfg: &NetConfig) -> Self {
        Self {
            projection: Linear::zeros(cfg.input_dim, cfg.hidden_dim),
            highway: (0..cfg.n_highway)
                .map(|_| HighwayLayer {
                    transform: Linear::zeros(cfg.hidden_dim, cfg.hidden_dim),
                    gate: Linear::zeros(cfg.hidden_dim, cfg.hidden_dim),
                })
                .collect(),
            output: Linear::zeros(cfg.hidden_dim, 1),
        }
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        for v in z.flat_slices_mut() {
            v.fill(0.0);
        }
        z
    }

    pub fn input_dim(&self) -> usize {
        self.projection.in_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.projection.out_dim
    }

    pub fn n_highway(&self) -> usize {
        self.highway.len()
    }

    pub fn n_params(&self) -> usize {
        self.flat_slices().iter().map(|s| s.len()).sum()
    }

    fn flat_slices(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = vec![&self.projection.weights, &self.projection.bias];
        for layer in &self.highway {
            out.push(&layer.transform.weights);
            out.push(&layer.transform.bias);
            out.push(&layer.gate.weights);
            out.push(&layer.gate.bias);
        }
        out.push(&self.output.weights);
        out.push(&self.output.bias);
        out
    }

    fn flat_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> =
            vec![&mut self.projection.weights, &mut self.projection.bias];
        for layer in &mut self.highway {
            out.push(&mut layer.transform.weights);
            out.push(&mut layer.transform.bias);
            out.push(&mut layer.gate.weights);
            out.push(&mut layer.gate.bias);
        }
        out.push(&mut self.output.weights);
        out.push(&mut self.output.bias);
        out
    }

    /// All parameters in a fixed order (projection, highway layers in
    /// order with transform before gate, output; weights before bias).
    pub fn flatten(&self) -> Vec<f64> {
        self.flat_slices().into_iter().flatten().copied().collect()
    }

    /// Inverse of [`flatten`](Self::flatten); `flat` must have `n_params()`
    /// entries.
    pub fn assign_from_flat(&mut self, flat: &[f64]) {
        let mut offset = 0;
        for slice in self.flat_slices_mut() {
            slice.copy_from_slice(&flat[offset..offset + slice.len()]);
            offset += slice.len();
        }
        assert_eq!(offset, flat.len(), "flat parameter length mismatch");
    }

    /// `self += c * other`, shapes must match.
    pub fn scaled_add(&mut self, other: &Self, c: f64) {
        let mut mine = self.flat_slices_mut();
        let theirs = other.flat_slices();
        for (a, b) in mine.iter_mut().zip(theirs) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += c * y;
            }
        }
    }
}

/// Forward-pass mode. Train mode draws dropout masks from `mask_seed`;
/// eval mode is deterministic with no dropout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Eval,
    Train { dropout: f64, mask_seed: u64 },
}

/// Glorot-uniform weights (`±sqrt(6 / (fan_in + fan_out))`), zero biases
/// except highway gate biases at -1 (biased toward carrying the input
/// through). Deterministic given `cfg.init_seed`.
pub fn init_params(cfg: &NetConfig) -> PolicyParams {
    assert!(cfg.hidden_dim > 0 && cfg.input_dim > 0);
    assert!((0.0..1.0).contains(&cfg.dropout));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.init_seed);
    let mut params = PolicyParams::zeros(cfg);

    let fill = |lin: &mut Linear, rng: &mut ChaCha8Rng| {
        let bound = (6.0 / (lin.in_dim + lin.out_dim) as f64).sqrt();
        for w in &mut lin.weights {
            *w = (2.0 * rng.random::<f64>() - 1.0) * bound;
        }
    };

    fill(&mut params.projection, &mut rng);
    for layer in &mut params.highway {
        fill(&mut layer.transform, &mut rng);
        fill(&mut layer.gate, &mut rng);
        layer.gate.bias.fill(-1.0);
    }
    fill(&mut params.output, &mut rng);
    params
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Intermediate activations of one forward pass, in the exact form the
/// reverse pass consumes.
struct DocCache {
    /// Post-dropout activations: `acts[0]` after the projection,
    /// `acts[l + 1]` after highway layer `l`.
    acts: Vec<Vec<f64>>,
    /// Sigmoid gate values per highway layer.
    gates: Vec<Vec<f64>>,
    /// ReLU transform values per highway layer (pre-dropout).
    trans: Vec<Vec<f64>>,
    /// Inverted-dropout multipliers (0 or 1/(1-p)) per dropout site.
    masks: Vec<Vec<f64>>,
    affinity: f64,
}

fn forward_doc(params: &PolicyParams, x: &[f64], masks: Vec<Vec<f64>>) -> DocCache {
    let h = params.hidden_dim();
    let n_layers = params.highway.len();

    let mut acts = Vec::with_capacity(n_layers + 1);
    let mut gates = Vec::with_capacity(n_layers);
    let mut trans = Vec::with_capacity(n_layers);

    let mut buf = vec![0.0; h];
    params.projection.apply(x, &mut buf);
    let a0: Vec<f64> = buf
        .iter()
        .zip(&masks[0])
        .map(|(&z, &m)| z.max(0.0) * m)
        .collect();
    acts.push(a0);

    for (l, layer) in params.highway.iter().enumerate() {
        let u = acts[l].clone();
        let mut zt = vec![0.0; h];
        layer.transform.apply(&u, &mut zt);
        let g: Vec<f64> = zt.iter().map(|&z| z.max(0.0)).collect();
        let mut zg = vec![0.0; h];
        layer.gate.apply(&u, &mut zg);
        let t: Vec<f64> = zg.iter().map(|&z| sigmoid(z)).collect();
        let y: Vec<f64> = (0..h)
            .map(|i| (t[i] * g[i] + (1.0 - t[i]) * u[i]) * masks[l + 1][i])
            .collect();
        gates.push(t);
        trans.push(g);
        acts.push(y);
    }

    let mut out = [0.0];
    params.output.apply(acts.last().unwrap(), &mut out);
    DocCache {
        acts,
        gates,
        trans,
        masks,
        affinity: sigmoid(out[0]),
    }
}

fn draw_masks(params: &PolicyParams, n_docs: usize, mode: Mode) -> Vec<Vec<Vec<f64>>> {
    let h = params.hidden_dim();
    let sites = params.highway.len() + 1;
    match mode {
        Mode::Eval => vec![vec![vec![1.0; h]; sites]; n_docs],
        Mode::Train { dropout, mask_seed } => {
            assert!((0.0..1.0).contains(&dropout), "dropout must be in [0, 1)");
            if dropout == 0.0 {
                return vec![vec![vec![1.0; h]; sites]; n_docs];
            }
            let keep = 1.0 - dropout;
            let scale = 1.0 / keep;
            let mut rng = ChaCha8Rng::seed_from_u64(mask_seed);
            (0..n_docs)
                .map(|_| {
                    (0..sites)
                        .map(|_| {
                            (0..h)
                                .map(|_| {
                                    if rng.random::<f64>() < keep {
                                        scale
                                    } else {
                                        0.0
                                    }
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        }
    }
}

fn check_features(params: &PolicyParams, features: &[&[f64]]) -> Result<()> {
    let d = params.input_dim();
    for (i, row) in features.iter().enumerate() {
        if row.len() != d {
            return Err(Error::Shape(format!(
                "document {i} has {} features, the network expects {d}",
                row.len()
            )));
        }
    }
    Ok(())
}

/// Affinity of every document; strictly inside (0, 1) for finite params.
pub fn forward(params: &PolicyParams, features: &[&[f64]], mode: Mode) -> Result<Affinities> {
    check_features(params, features)?;
    let mut masks = draw_masks(params, features.len(), mode);
    Ok(features
        .iter()
        .zip(masks.drain(..))
        .map(|(x, m)| forward_doc(params, x, m).affinity)
        .collect())
}

/// Exact gradient of `sum_i upstream[i] * affinity[i]` with respect to
/// every parameter. `mode` (and its mask seed) must match the paired
/// [`forward`] call.
pub fn backward(
    params: &PolicyParams,
    features: &[&[f64]],
    mode: Mode,
    upstream: &[f64],
) -> Result<PolicyParams> {
    check_features(params, features)?;
    if upstream.len() != features.len() {
        return Err(Error::Shape(format!(
            "upstream has {} entries for {} documents",
            upstream.len(),
            features.len()
        )));
    }

    let h = params.hidden_dim();
    let n_layers = params.highway.len();
    let mut grad = params.zeros_like();
    let mut masks = draw_masks(params, features.len(), mode);

    for ((x, &up), doc_masks) in features.iter().zip(upstream).zip(masks.drain(..)) {
        let cache = forward_doc(params, x, doc_masks);
        let a = cache.affinity;
        let dz_out = up * a * (1.0 - a);

        grad.output
            .accumulate_grad(&[dz_out], cache.acts.last().unwrap());
        let mut du = vec![0.0; h];
        params.output.apply_transposed_add(&[dz_out], &mut du);

        for l in (0..n_layers).rev() {
            let u = &cache.acts[l];
            let t = &cache.gates[l];
            let g = &cache.trans[l];
            let mask = &cache.masks[l + 1];

            let mut dzt = vec![0.0; h];
            let mut dzg = vec![0.0; h];
            let mut du_next = vec![0.0; h];
            for i in 0..h {
                let dy = du[i] * mask[i];
                let dg = dy * t[i];
                dzt[i] = if g[i] > 0.0 { dg } else { 0.0 };
                dzg[i] = dy * (g[i] - u[i]) * t[i] * (1.0 - t[i]);
                du_next[i] = dy * (1.0 - t[i]);
            }
            grad.highway[l].transform.accumulate_grad(&dzt, u);
            grad.highway[l].gate.accumulate_grad(&dzg, u);
            params.highway[l]
                .transform
                .apply_transposed_add(&dzt, &mut du_next);
            params.highway[l]
                .gate
                .apply_transposed_add(&dzg, &mut du_next);
            du = du_next;
        }

        // Through the post-projection dropout and the projection ReLU.
        // Where the mask is zero the upstream is zero as well, so testing
        // the post-dropout activation for positivity is equivalent to
        // testing the pre-dropout ReLU output.
        let mut dz_proj = vec![0.0; h];
        for i in 0..h {
            let dh = du[i] * cache.masks[0][i];
            dz_proj[i] = if cache.acts[0][i] > 0.0 { dh } else { 0.0 };
        }
        grad.projection.accumulate_grad(&dz_proj, x);
    }
    Ok(grad)
}

/// Adam optimizer state: first/second moment per parameter plus a step
/// counter. Weight decay is the classic additive L2 term folded into the
/// gradient before the moment updates.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl AdamState {
    pub fn new(n_params: usize, lr: f64, beta1: f64, beta2: f64, weight_decay: f64) -> Self {
        Self {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            step: 0,
            lr,
            beta1,
            beta2,
            eps: 1e-8,
            weight_decay,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// One Adam update with bias correction, in place.
pub fn adam_step(state: &mut AdamState, params: &mut PolicyParams, grad: &PolicyParams) {
    let mut flat = params.flatten();
    let gflat = grad.flatten();
    assert_eq!(flat.len(), state.m.len(), "optimizer/parameter shape mismatch");
    assert_eq!(flat.len(), gflat.len(), "gradient/parameter shape mismatch");

    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - state.beta1.powi(t);
    let bc2 = 1.0 - state.beta2.powi(t);

    for i in 0..flat.len() {
        let g = gflat[i] + state.weight_decay * flat[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        flat[i] -= state.lr * m_hat / (v_hat.sqrt() + state.eps);
    }
    params.assign_from_flat(&flat);
}
