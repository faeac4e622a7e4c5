//! Ranking evaluation measures and the reward functions built from them.
//!
//! All positions are 1-based in the formulas. Graded relevance is binarized
//! as `rel > 0` for P@k, AP and RR; DCG uses the `(2^rel - 1) / log2(i + 1)`
//! gain/discount convention. A [`Ranking`] may be a prefix of the candidate
//! list; AP and nDCG normalizers always come from the full candidate set so
//! prefix rewards stay on the same scale as full-ranking rewards.

use crate::{Error, Result};

/// An ordered list of distinct document indices into a query context.
/// May be shorter than the candidate list (a prefix action).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    order: Vec<usize>,
}

impl Ranking {
    /// Validates that indices are distinct and within `[0, n_docs)`.
    pub fn new(order: Vec<usize>, n_docs: usize) -> Result<Self> {
        let mut seen = vec![false; n_docs];
        for &i in &order {
            if i >= n_docs {
                return Err(Error::InvalidRanking(format!(
                    "index {i} out of range for {n_docs} documents"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidRanking(format!("duplicate index {i}")));
            }
            seen[i] = true;
        }
        Ok(Self { order })
    }

    pub(crate) fn from_trusted(order: Vec<usize>) -> Self {
        Self { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The first `m` positions (or the whole ranking when shorter).
    pub fn truncated(&self, m: usize) -> Ranking {
        Ranking {
            order: self.order[..self.order.len().min(m)].to_vec(),
        }
    }
}

/// Full-length ranking by descending relevance, ties broken by ascending
/// original index.
pub fn ideal_ranking(rels: &[u32]) -> Ranking {
    let mut order: Vec<usize> = (0..rels.len()).collect();
    order.sort_by(|&a, &b| rels[b].cmp(&rels[a]).then(a.cmp(&b)));
    Ranking::from_trusted(order)
}

/// Fraction of the first `k` positions holding a relevant document.
/// The denominator is `k` even when the ranking is shorter.
pub fn precision_at_k(r: &Ranking, rels: &[u32], k: usize) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    let hits = r
        .order
        .iter()
        .take(k)
        .filter(|&&i| rels[i] > 0)
        .count();
    hits as f64 / k as f64
}

/// Average precision with an explicit relevant-document count.
///
/// `total_relevant` must be the count over the full candidate set, which
/// keeps prefix rewards comparable with full-ranking rewards.
pub fn average_precision(r: &Ranking, rels: &[u32], total_relevant: usize) -> Result<f64> {
    if total_relevant == 0 {
        return Err(Error::NoRelevantDocuments);
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (pos, &i) in r.order.iter().enumerate() {
        if rels[i] > 0 {
            hits += 1;
            sum += hits as f64 / (pos + 1) as f64;
        }
    }
    Ok(sum / total_relevant as f64)
}

/// Reciprocal of the 1-based rank of the first relevant document; 0 when
/// the ranking contains none.
pub fn reciprocal_rank(r: &Ranking, rels: &[u32]) -> f64 {
    for (pos, &i) in r.order.iter().enumerate() {
        if rels[i] > 0 {
            return 1.0 / (pos + 1) as f64;
        }
    }
    0.0
}

/// Discounted cumulative gain over the first `k` positions.
pub fn dcg_at_k(r: &Ranking, rels: &[u32], k: usize) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    r.order
        .iter()
        .take(k)
        .enumerate()
        .map(|(pos, &i)| (2f64.powi(rels[i] as i32) - 1.0) / ((pos + 2) as f64).log2())
        .sum()
}

/// DCG normalized by the full candidate set's ideal DCG at `k`; 0 when the
/// ideal DCG is 0 (no relevant documents at all).
pub fn ndcg_at_k(r: &Ranking, rels: &[u32], k: usize) -> f64 {
    let ideal = dcg_at_k(&ideal_ranking(rels), rels, k);
    if ideal == 0.0 {
        0.0
    } else {
        dcg_at_k(r, rels, k) / ideal
    }
}

/// Reward functions over a ranked action and the context's grades.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardSpec {
    /// Average precision.
    Ap,
    /// nDCG@10.
    Ndcg10,
    /// DCG@5 (unnormalized).
    Dcg5,
    /// (AP + RR) / 2.
    ApRrMean,
    /// (AP + nDCG@10) / 2.
    ApNdcg10Mean,
    /// Mean of AP, P@3, P@5, nDCG@3 and nDCG@5.
    Combo5,
}

impl RewardSpec {
    /// All six variants, in the order used by the reward comparison harness.
    pub const ALL: [RewardSpec; 6] = [
        RewardSpec::Ap,
        RewardSpec::Ndcg10,
        RewardSpec::Dcg5,
        RewardSpec::ApNdcg10Mean,
        RewardSpec::ApRrMean,
        RewardSpec::Combo5,
    ];
}

impl std::str::FromStr for RewardSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AP" => Ok(Self::Ap),
            "NDCG10" => Ok(Self::Ndcg10),
            "DCG5" => Ok(Self::Dcg5),
            "AP_RR_MEAN" => Ok(Self::ApRrMean),
            "AP_NDCG10_MEAN" => Ok(Self::ApNdcg10Mean),
            "COMBO5" => Ok(Self::Combo5),
            other => Err(Error::Config(format!("unknown reward `{other}`"))),
        }
    }
}

impl std::fmt::Display for RewardSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Ap => "AP",
            Self::Ndcg10 => "NDCG10",
            Self::Dcg5 => "DCG5",
            Self::ApRrMean => "AP_RR_MEAN",
            Self::ApNdcg10Mean => "AP_NDCG10_MEAN",
            Self::Combo5 => "COMBO5",
        };
        f.write_str(s)
    }
}

/// Evaluates the chosen reward for a ranked action.
pub fn reward(spec: RewardSpec, r: &Ranking, rels: &[u32], total_relevant: usize) -> Result<f64> {
    let ap = || average_precision(r, rels, total_relevant);
    Ok(match spec {
        RewardSpec::Ap => ap()?,
        RewardSpec::Ndcg10 => ndcg_at_k(r, rels, 10),
        RewardSpec::Dcg5 => dcg_at_k(r, rels, 5),
        RewardSpec::ApRrMean => (ap()? + reciprocal_rank(r, rels)) / 2.0,
        RewardSpec::ApNdcg10Mean => (ap()? + ndcg_at_k(r, rels, 10)) / 2.0,
        RewardSpec::Combo5 => {
            (ap()?
                + precision_at_k(r, rels, 3)
                + precision_at_k(r, rels, 5)
                + ndcg_at_k(r, rels, 3)
                + ndcg_at_k(r, rels, 5))
                / 5.0
        }
    })
}
