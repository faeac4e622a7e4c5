//! LETOR-format ranking datasets grouped by query.
//!
//! One text line per query-document pair:
//!
//! ```text
//! <rel> qid:<id> <fid>:<val> <fid>:<val> ... [#<comment>]
//! ```
//!
//! Feature ids are 1-based and must be strictly increasing within a line.
//! Ids that are absent from a line default to 0.0; every vector is padded to
//! the dataset-wide dimension (the largest feature id observed anywhere).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// One judged query-document pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    /// Taken from the line's `#` comment; empty when the line had none.
    pub doc_id: String,
    /// Graded relevance, e.g. {0,1,2} for MQ2007.
    pub relevance: u32,
    pub features: Vec<f64>,
}

impl Document {
    /// Binary relevance: any grade above zero counts as relevant.
    pub fn is_relevant(&self) -> bool {
        self.relevance > 0
    }
}

/// A query together with all of its candidate documents, in load order.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryContext {
    pub query_id: String,
    pub documents: Vec<Document>,
}

impl QueryContext {
    pub fn n_docs(&self) -> usize {
        self.documents.len()
    }

    /// Relevance grades in document order.
    pub fn relevances(&self) -> Vec<u32> {
        self.documents.iter().map(|d| d.relevance).collect()
    }

    /// Number of documents with relevance > 0.
    pub fn total_relevant(&self) -> usize {
        self.documents.iter().filter(|d| d.is_relevant()).count()
    }
}

/// A list of query contexts sharing one feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    contexts: Vec<QueryContext>,
    feature_dim: usize,
}

impl Dataset {
    /// Builds a dataset, checking that query ids are unique, every context
    /// holds at least one document, and all feature vectors agree on the
    /// dimension.
    pub fn from_contexts(contexts: Vec<QueryContext>, feature_dim: usize) -> Result<Self> {
        let mut seen = HashMap::new();
        for ctx in &contexts {
            if seen.insert(ctx.query_id.clone(), ()).is_some() {
                return Err(Error::DuplicateQueryId(ctx.query_id.clone()));
            }
            if ctx.documents.is_empty() {
                return Err(Error::EmptyDataset);
            }
            for doc in &ctx.documents {
                if doc.features.len() != feature_dim {
                    return Err(Error::DimensionMismatch {
                        query_id: ctx.query_id.clone(),
                        expected: feature_dim,
                        found: doc.features.len(),
                    });
                }
            }
        }
        Ok(Self {
            contexts,
            feature_dim,
        })
    }

    pub fn contexts(&self) -> &[QueryContext] {
        &self.contexts
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn n_queries(&self) -> usize {
        self.contexts.len()
    }

    pub fn n_documents(&self) -> usize {
        self.contexts.iter().map(QueryContext::n_docs).sum()
    }

    /// Serializes the whole dataset back to LETOR text (dense features,
    /// six decimal places).
    pub fn to_letor_string(&self) -> String {
        let mut out = String::new();
        for ctx in &self.contexts {
            for doc in &ctx.documents {
                out.push_str(&serialize_letor_line(
                    doc.relevance,
                    &ctx.query_id,
                    &doc.features,
                    &doc.doc_id,
                ));
                out.push('\n');
            }
        }
        out
    }

    pub fn write_letor(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = File::create(path)?;
        f.write_all(self.to_letor_string().as_bytes())?;
        Ok(())
    }
}

/// Fields of one parsed LETOR line.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedLine {
    pub relevance: u32,
    pub query_id: String,
    /// Dense vector up to the largest feature id on the line.
    pub features: Vec<f64>,
    /// Text after `#`, trimmed; empty when absent.
    pub comment: String,
}

/// Parses one LETOR line. `line_number` is used only for error reporting.
pub fn parse_letor_line(line: &str, line_number: usize) -> Result<ParsedLine> {
    let err = |msg: String| Error::Parse {
        line: line_number,
        msg,
    };

    let (body, comment) = match line.find('#') {
        Some(pos) => (&line[..pos], line[pos + 1..].trim().to_string()),
        None => (line, String::new()),
    };

    let mut tokens = body.split_whitespace();
    let rel_tok = tokens.next().ok_or_else(|| err("empty line".into()))?;
    let relevance: u32 = rel_tok
        .parse()
        .map_err(|_| err(format!("bad relevance grade `{rel_tok}`")))?;

    let qid_tok = tokens.next().ok_or_else(|| err("missing qid field".into()))?;
    let query_id = qid_tok
        .strip_prefix("qid:")
        .ok_or_else(|| err(format!("expected `qid:<id>`, found `{qid_tok}`")))?
        .to_string();
    if query_id.is_empty() {
        return Err(err("empty query id".into()));
    }

    let mut pairs = Vec::new();
    let mut prev_fid = 0usize;
    for tok in tokens {
        let (fid_s, val_s) = tok
            .split_once(':')
            .ok_or_else(|| err(format!("expected `<fid>:<val>`, found `{tok}`")))?;
        let fid: usize = fid_s
            .parse()
            .map_err(|_| err(format!("bad feature id `{fid_s}`")))?;
        if fid == 0 {
            return Err(err("feature ids are 1-based".into()));
        }
        if fid == prev_fid {
            return Err(err(format!("duplicate feature id {fid}")));
        }
        if fid < prev_fid {
            return Err(err(format!(
                "feature ids not increasing ({fid} after {prev_fid})"
            )));
        }
        let val: f64 = val_s
            .parse()
            .map_err(|_| err(format!("bad feature value `{val_s}`")))?;
        if !val.is_finite() {
            return Err(err(format!("non-finite feature value `{val_s}`")));
        }
        pairs.push((fid, val));
        prev_fid = fid;
    }

    let mut features = vec![0.0; prev_fid];
    for (fid, val) in pairs {
        features[fid - 1] = val;
    }

    Ok(ParsedLine {
        relevance,
        query_id,
        features,
        comment,
    })
}

/// Formats one LETOR line with dense features at six decimal places.
/// The comment is emitted only when nonempty.
pub fn serialize_letor_line(
    relevance: u32,
    query_id: &str,
    features: &[f64],
    comment: &str,
) -> String {
    let mut line = format!("{relevance} qid:{query_id}");
    for (i, v) in features.iter().enumerate() {
        write!(line, " {}:{:.6}", i + 1, v).unwrap();
    }
    if !comment.is_empty() {
        write!(line, " #{comment}").unwrap();
    }
    line
}

/// Loads a LETOR file, grouping lines by query id.
///
/// Groups preserve first-appearance order of query ids and load order of
/// documents within a query (interleaved query ids are merged). The feature
/// dimension is the largest feature id observed; shorter vectors are padded
/// with zeros.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let file = File::open(path)?;
    read_letor(BufReader::new(file))
}

/// Same as [`load_dataset`] but from any buffered reader.
pub fn read_letor(reader: impl BufRead) -> Result<Dataset> {
    let mut contexts: Vec<QueryContext> = Vec::new();
    let mut slot_by_qid: HashMap<String, usize> = HashMap::new();
    let mut feature_dim = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let parsed = parse_letor_line(trimmed, idx + 1)?;
        feature_dim = feature_dim.max(parsed.features.len());
        let doc = Document {
            doc_id: parsed.comment,
            relevance: parsed.relevance,
            features: parsed.features,
        };
        match slot_by_qid.get(&parsed.query_id) {
            Some(&slot) => contexts[slot].documents.push(doc),
            None => {
                slot_by_qid.insert(parsed.query_id.clone(), contexts.len());
                contexts.push(QueryContext {
                    query_id: parsed.query_id,
                    documents: vec![doc],
                });
            }
        }
    }

    if contexts.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for ctx in &mut contexts {
        for doc in &mut ctx.documents {
            doc.features.resize(feature_dim, 0.0);
        }
    }
    Dataset::from_contexts(contexts, feature_dim)
}

/// Retains exactly the queries that have at least one relevant document.
/// Idempotent; may return an empty dataset.
pub fn filter_no_relevant(ds: &Dataset) -> Dataset {
    let contexts = ds
        .contexts
        .iter()
        .filter(|c| c.total_relevant() > 0)
        .cloned()
        .collect();
    Dataset {
        contexts,
        feature_dim: ds.feature_dim,
    }
}

/// Splits by query into train/val/test. Train and val sizes are rounded
/// down; the remainder goes to test. Deterministic given the seed.
pub fn split_dataset(
    ds: &Dataset,
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<(Dataset, Dataset, Dataset)> {
    let (f0, f1, f2) = fractions;
    if f0 < 0.0 || f1 < 0.0 || f2 < 0.0 || (f0 + f1 + f2 - 1.0).abs() > 1e-9 {
        return Err(Error::BadFractions);
    }
    let n = ds.contexts.len();
    if n < 3 {
        return Err(Error::TooFewQueries {
            found: n,
            needed: 3,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    // Guard against 1455 * 0.6 = 872.999... style float error.
    let n_train = ((n as f64) * f0 + 1e-9).floor() as usize;
    let n_val = ((n as f64) * f1 + 1e-9).floor() as usize;

    let take = |idxs: &[usize]| Dataset {
        contexts: idxs.iter().map(|&i| ds.contexts[i].clone()).collect(),
        feature_dim: ds.feature_dim,
    };
    Ok((
        take(&order[..n_train]),
        take(&order[n_train..n_train + n_val]),
        take(&order[n_train + n_val..]),
    ))
}

/// Feature normalization modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizeMode {
    None,
    /// Min-max per feature dimension within each query; constant
    /// dimensions map to 0.
    QueryMinMax,
}

impl std::str::FromStr for NormalizeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "query_minmax" => Ok(Self::QueryMinMax),
            other => Err(Error::Config(format!("unknown normalize mode `{other}`"))),
        }
    }
}

/// Applies the chosen normalization, returning a new dataset.
pub fn normalize_features(ds: &Dataset, mode: NormalizeMode) -> Dataset {
    match mode {
        NormalizeMode::None => ds.clone(),
        NormalizeMode::QueryMinMax => {
            let contexts = ds
                .contexts
                .iter()
                .map(|ctx| {
                    let mut ctx = ctx.clone();
                    for j in 0..ds.feature_dim {
                        let mut lo = f64::INFINITY;
                        let mut hi = f64::NEG_INFINITY;
                        for doc in &ctx.documents {
                            lo = lo.min(doc.features[j]);
                            hi = hi.max(doc.features[j]);
                        }
                        let range = hi - lo;
                        for doc in &mut ctx.documents {
                            doc.features[j] = if range > 0.0 {
                                (doc.features[j] - lo) / range
                            } else {
                                0.0
                            };
                        }
                    }
                    ctx
                })
                .collect();
            Dataset {
                contexts,
                feature_dim: ds.feature_dim,
            }
        }
    }
}
