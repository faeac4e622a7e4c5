//! The stochastic head over document affinities: ε-mixture sampling without
//! replacement, exact action log-probabilities with analytic gradients, and
//! the greedy test-time ranking.
//!
//! At step `i` (1-based) with `r = n - i + 1` documents remaining, document
//! `k` is drawn with probability
//!
//! ```text
//! eps / r  +  (1 - eps) * a~[k] / sum of a~ over remaining docs
//! ```
//!
//! where `a~ = affinity + 1e-8`. The small floor keeps the distribution
//! well-defined when the remaining affinity mass vanishes; its bias is
//! negligible at affinity scale (0, 1). The ε term mixes in uniform
//! exploration during training only; [`greedy_ranking`] never explores.

use rand::Rng;

use crate::metrics::Ranking;
use crate::{Error, Result};

/// Additive floor applied to affinities inside the sampling distribution.
pub const AFFINITY_FLOOR: f64 = 1e-8;

/// An ordered subset of document indices with its sampling log-probability.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledAction {
    pub indices: Vec<usize>,
    pub log_prob: f64,
}

fn floored(aff: &[f64]) -> Vec<f64> {
    aff.iter().map(|a| a + AFFINITY_FLOOR).collect()
}

/// Remaining-mass sum in ascending index order. Both the sampler and
/// [`action_log_prob`] use this, so their log-probabilities agree bitwise.
fn remaining_mass(atilde: &[f64], remaining: &[usize]) -> f64 {
    remaining.iter().map(|&k| atilde[k]).sum()
}

fn step_probability(atilde: &[f64], k: usize, r: usize, z: f64, epsilon: f64) -> f64 {
    // grouping the division first keeps the one-remaining-document step
    // probability exactly 1
    epsilon / r as f64 + (1.0 - epsilon) * (atilde[k] / z)
}

/// Draws `min(n, m_prime)` documents sequentially without replacement.
pub fn sample_action<R: Rng + ?Sized>(
    aff: &[f64],
    m_prime: usize,
    epsilon: f64,
    rng: &mut R,
) -> SampledAction {
    let n = aff.len();
    assert!(n >= 1, "need at least one document");
    assert!(m_prime >= 1, "m_prime must be at least 1");
    assert!((0.0..=1.0).contains(&epsilon), "epsilon must be in [0, 1]");

    let m = n.min(m_prime);
    let atilde = floored(aff);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut indices = Vec::with_capacity(m);
    let mut log_prob = 0.0;

    for _ in 0..m {
        let r = remaining.len();
        let z = remaining_mass(&atilde, &remaining);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = r - 1;
        let mut pick_p = step_probability(&atilde, remaining[r - 1], r, z, epsilon);
        for (j, &k) in remaining.iter().enumerate() {
            let p = step_probability(&atilde, k, r, z, epsilon);
            acc += p;
            if u < acc {
                pick = j;
                pick_p = p;
                break;
            }
        }
        log_prob += pick_p.ln();
        indices.push(remaining.remove(pick));
    }

    SampledAction { indices, log_prob }
}

/// Log-probability of producing `indices`, plus its exact partial
/// derivatives with respect to every affinity (through both the selected
/// document's mass and the remaining-mass denominators).
pub fn action_log_prob(aff: &[f64], indices: &[usize], epsilon: f64) -> Result<(f64, Vec<f64>)> {
    let n = aff.len();
    assert!((0.0..=1.0).contains(&epsilon), "epsilon must be in [0, 1]");
    let mut used = vec![false; n];
    for &k in indices {
        if k >= n {
            return Err(Error::InvalidRanking(format!(
                "index {k} out of range for {n} documents"
            )));
        }
        if used[k] {
            return Err(Error::InvalidRanking(format!("duplicate index {k}")));
        }
        used[k] = true;
    }

    let atilde = floored(aff);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut log_prob = 0.0;
    let mut grad = vec![0.0; n];

    for &k in indices {
        let r = remaining.len();
        let z = remaining_mass(&atilde, &remaining);
        let p = step_probability(&atilde, k, r, z, epsilon);
        log_prob += p.ln();

        // d log p / d aff[k]   += (1-eps) / (p z)
        // d log p / d aff[j]   -= (1-eps) a~[k] / (p z^2)   for every j still remaining
        let coeff = (1.0 - epsilon) / (p * z);
        grad[k] += coeff;
        let den = coeff * atilde[k] / z;
        for &j in &remaining {
            grad[j] -= den;
        }

        let pos = remaining.iter().position(|&j| j == k).unwrap();
        remaining.remove(pos);
    }

    Ok((log_prob, grad))
}

/// Full-length ranking by descending affinity, ties broken by ascending
/// original index. Used at test time and for the self-critical baseline.
pub fn greedy_ranking(aff: &[f64]) -> Ranking {
    let mut order: Vec<usize> = (0..aff.len()).collect();
    order.sort_by(|&a, &b| aff[b].total_cmp(&aff[a]).then(a.cmp(&b)));
    Ranking::from_trusted(order)
}

/// Every ordered `m`-subset with its exact probability under the sampling
/// rule. Errors when there would be more than 10^6 actions. Test oracle for
/// the sampler and the gradient estimator.
pub fn enumerate_action_probs(
    aff: &[f64],
    m: usize,
    epsilon: f64,
) -> Result<Vec<(Vec<usize>, f64)>> {
    let n = aff.len();
    assert!(n >= 1 && m >= 1 && m <= n);
    assert!((0.0..=1.0).contains(&epsilon));

    let mut count = 1.0f64;
    for i in 0..m {
        count *= (n - i) as f64;
    }
    if count > 1e6 {
        return Err(Error::CombinatorialBound(count));
    }

    let atilde = floored(aff);
    let mut out = Vec::with_capacity(count as usize);
    let mut prefix = Vec::with_capacity(m);
    let mut used = vec![false; n];

    fn recurse(
        atilde: &[f64],
        epsilon: f64,
        m: usize,
        prefix: &mut Vec<usize>,
        used: &mut Vec<bool>,
        prob: f64,
        out: &mut Vec<(Vec<usize>, f64)>,
    ) {
        if prefix.len() == m {
            out.push((prefix.clone(), prob));
            return;
        }
        let n = atilde.len();
        let r = n - prefix.len();
        let z: f64 = (0..n).filter(|&j| !used[j]).map(|j| atilde[j]).sum();
        for k in 0..n {
            if used[k] {
                continue;
            }
            let p = step_probability(atilde, k, r, z, epsilon);
            used[k] = true;
            prefix.push(k);
            recurse(atilde, epsilon, m, prefix, used, prob * p, out);
            prefix.pop();
            used[k] = false;
        }
    }

    recurse(&atilde, epsilon, m, &mut prefix, &mut used, 1.0, &mut out);
    Ok(out)
}
