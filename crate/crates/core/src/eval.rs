//! Batch evaluation of a trained model: per-query metric tables, aggregate
//! means, and the report CSV format consumed by the significance command.

use crate::bandit::greedy_ranking;
use crate::letor::Dataset;
use crate::metrics::{
    average_precision, ndcg_at_k, precision_at_k, reciprocal_rank,
};
use crate::policy::{forward, Mode, PolicyParams};
use crate::{Error, Result};

/// The measures reported per query and in aggregate.
pub const METRIC_NAMES: [&str; 8] = [
    "p@1", "p@3", "p@10", "ndcg@1", "ndcg@3", "ndcg@10", "ap", "rr",
];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricSet {
    pub p_at_1: f64,
    pub p_at_3: f64,
    pub p_at_10: f64,
    pub ndcg_at_1: f64,
    pub ndcg_at_3: f64,
    pub ndcg_at_10: f64,
    pub ap: f64,
    pub rr: f64,
}

impl MetricSet {
    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "p@1" => self.p_at_1,
            "p@3" => self.p_at_3,
            "p@10" => self.p_at_10,
            "ndcg@1" => self.ndcg_at_1,
            "ndcg@3" => self.ndcg_at_3,
            "ndcg@10" => self.ndcg_at_10,
            "ap" => self.ap,
            "rr" => self.rr,
            _ => return None,
        })
    }

    fn values(&self) -> [f64; 8] {
        [
            self.p_at_1,
            self.p_at_3,
            self.p_at_10,
            self.ndcg_at_1,
            self.ndcg_at_3,
            self.ndcg_at_10,
            self.ap,
            self.rr,
        ]
    }

    fn from_values(v: [f64; 8]) -> Self {
        Self {
            p_at_1: v[0],
            p_at_3: v[1],
            p_at_10: v[2],
            ndcg_at_1: v[3],
            ndcg_at_3: v[4],
            ndcg_at_10: v[5],
            ap: v[6],
            rr: v[7],
        }
    }
}

/// Per-query metrics plus their arithmetic means.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_query: Vec<(String, MetricSet)>,
    pub mean: MetricSet,
}

/// Aggregate means summed in sorted query-id order, so datasets that differ
/// only by query permutation produce bitwise-identical aggregates.
fn aggregate(per_query: &[(String, MetricSet)]) -> MetricSet {
    let mut order: Vec<usize> = (0..per_query.len()).collect();
    order.sort_by(|&a, &b| per_query[a].0.cmp(&per_query[b].0));
    let mut sums = [0.0; 8];
    for &i in &order {
        for (s, v) in sums.iter_mut().zip(per_query[i].1.values()) {
            *s += v;
        }
    }
    let n = per_query.len() as f64;
    MetricSet::from_values(sums.map(|s| s / n))
}

/// Greedy eval-mode ranking of every query, full candidate list, with
/// P@{1,3,10}, nDCG@{1,3,10}, AP and RR per query. Queries must all have at
/// least one relevant document (filter upstream).
pub fn evaluate(params: &PolicyParams, ds: &Dataset) -> Result<EvalReport> {
    if ds.n_queries() == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut per_query = Vec::with_capacity(ds.n_queries());
    for ctx in ds.contexts() {
        let rows: Vec<&[f64]> = ctx.documents.iter().map(|d| d.features.as_slice()).collect();
        let aff = forward(params, &rows, Mode::Eval)?;
        let ranking = greedy_ranking(&aff);
        let rels = ctx.relevances();
        let m = MetricSet {
            p_at_1: precision_at_k(&ranking, &rels, 1),
            p_at_3: precision_at_k(&ranking, &rels, 3),
            p_at_10: precision_at_k(&ranking, &rels, 10),
            ndcg_at_1: ndcg_at_k(&ranking, &rels, 1),
            ndcg_at_3: ndcg_at_k(&ranking, &rels, 3),
            ndcg_at_10: ndcg_at_k(&ranking, &rels, 10),
            ap: average_precision(&ranking, &rels, ctx.total_relevant())?,
            rr: reciprocal_rank(&ranking, &rels),
        };
        per_query.push((ctx.query_id.clone(), m));
    }
    let mean = aggregate(&per_query);
    Ok(EvalReport { per_query, mean })
}

/// Report as CSV: one row per query plus a final MEAN row.
pub fn report_to_csv(report: &EvalReport) -> String {
    let mut out = String::from("query_id,p@1,p@3,p@10,ndcg@1,ndcg@3,ndcg@10,ap,rr\n");
    let row = |id: &str, m: &MetricSet| {
        let v = m.values();
        format!(
            "{id},{},{},{},{},{},{},{},{}\n",
            v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]
        )
    };
    for (id, m) in &report.per_query {
        out.push_str(&row(id, m));
    }
    out.push_str(&row("MEAN", &report.mean));
    out
}

/// Parses a report CSV back into per-query rows (the MEAN row is skipped).
pub fn parse_report_csv(text: &str) -> Result<Vec<(String, MetricSet)>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty report".into() })?;
    if header != "query_id,p@1,p@3,p@10,ndcg@1,ndcg@3,ndcg@10,ap,rr" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected report header `{header}`"),
        });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected 9 fields, found {}", fields.len()),
            });
        }
        if fields[0] == "MEAN" {
            continue;
        }
        let mut values = [0.0; 8];
        for (v, f) in values.iter_mut().zip(&fields[1..]) {
            *v = f.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("bad number `{f}`"),
            })?;
        }
        rows.push((fields[0].to_string(), MetricSet::from_values(values)));
    }
    Ok(rows)
}

/// Joins two report tables on query id (in the first table's order) and
/// extracts one metric column from each.
pub fn paired_metric_vectors(
    a: &[(String, MetricSet)],
    b: &[(String, MetricSet)],
    metric: &str,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let lookup: std::collections::HashMap<&str, &MetricSet> =
        b.iter().map(|(id, m)| (id.as_str(), m)).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (id, m) in a {
        if let Some(other) = lookup.get(id.as_str()) {
            let x = m
                .get(metric)
                .ok_or_else(|| Error::Config(format!("unknown metric `{metric}`")))?;
            let y = other.get(metric).unwrap();
            xs.push(x);
            ys.push(y);
        }
    }
    if xs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok((xs, ys))
}
