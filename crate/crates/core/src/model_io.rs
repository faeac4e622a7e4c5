//! Model persistence: a single self-describing JSON document holding the
//! network config and flat parameter arrays (row-major). Floats are written
//! in serde_json's shortest round-trip decimal form, so
//! `load_model(save_model(p))` reproduces every parameter bitwise.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::policy::{NetConfig, PolicyParams};
use crate::{Error, Result};

/// Format tag expected in every model file.
pub const MODEL_VERSION: &str = "banditrank-model-v1";

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    version: String,
    config: NetConfig,
    params: PolicyParams,
}

/// Writes the model (config + parameters) as JSON.
pub fn save_model(params: &PolicyParams, cfg: &NetConfig, path: impl AsRef<Path>) -> Result<()> {
    let file = ModelFile {
        version: MODEL_VERSION.to_string(),
        config: cfg.clone(),
        params: params.clone(),
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &file)
        .map_err(|e| Error::Model(format!("write failed: {e}")))?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Reads a model back, checking version and shape consistency.
pub fn load_model(path: impl AsRef<Path>) -> Result<(PolicyParams, NetConfig)> {
    let mut text = String::new();
    BufReader::new(File::open(path)?).read_to_string(&mut text)?;
    let file: ModelFile =
        serde_json::from_str(&text).map_err(|e| Error::Model(format!("malformed: {e}")))?;
    if file.version != MODEL_VERSION {
        return Err(Error::Model(format!(
            "version `{}` not supported (expected `{MODEL_VERSION}`)",
            file.version
        )));
    }
    let expected = PolicyParams::zeros(&file.config);
    if file.params.n_params() != expected.n_params()
        || file.params.input_dim() != file.config.input_dim
        || file.params.hidden_dim() != file.config.hidden_dim
        || file.params.n_highway() != file.config.n_highway
    {
        return Err(Error::Model(
            "parameter shapes do not match the stored config".to_string(),
        ));
    }
    Ok((file.params, file.config))
}
