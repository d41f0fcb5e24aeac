//! Versioned artifact files.
//!
//! The weight file is the one artifact generation and detection jobs
//! exchange: model shape, training recipe, encoder parameters, a
//! projection summary, and every parameter tensor, guarded by a content
//! checksum. The projection assignment itself is not stored; it is
//! regenerated from its seed on load and verified against the stored
//! checksum. Tensors live in a sorted map and serialization is
//! deterministic, so save, load, save again is byte-identical.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mapping::{MappingModel, ModelConfig, TrainConfig};
use crate::signal::ProjectionMap;
use crate::textcodec::EncoderConfig;

pub const WEIGHTS_FORMAT_VERSION: u32 = 1;

/// Everything needed to rebuild a [`ProjectionMap`] plus the checksum
/// the rebuild must reproduce.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ProjectionSummary {
    pub seed: u64,
    pub signal_dim: usize,
    pub vocab_size: usize,
    pub checksum: u64,
}

/// On-disk form of a trained watermarker.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WeightsFile {
    pub format_version: u32,
    pub model_config: ModelConfig,
    pub train_config: TrainConfig,
    pub encoder_config: EncoderConfig,
    pub projection: ProjectionSummary,
    pub tensors: BTreeMap<String, Vec<f64>>,
    /// Content checksum over tensor names and value bit patterns.
    pub checksum: u64,
}

fn fnv1a64(bytes: &[u8], mut state: u64) -> u64 {
    for &b in bytes {
        state ^= b as u64;
        state = state.wrapping_mul(0x0000_0100_0000_01b3);
    }
    state
}

fn tensors_checksum(tensors: &BTreeMap<String, Vec<f64>>) -> u64 {
    let mut state = 0xcbf2_9ce4_8422_2325u64;
    for (name, values) in tensors {
        state = fnv1a64(name.as_bytes(), state);
        state = fnv1a64(&[0], state);
        for v in values {
            state = fnv1a64(&v.to_bits().to_le_bytes(), state);
        }
    }
    state
}

impl WeightsFile {
    pub fn from_parts(
        model: &MappingModel,
        train: &TrainConfig,
        encoder: &EncoderConfig,
        projection: &ProjectionMap,
    ) -> Self {
        let tensors: BTreeMap<String, Vec<f64>> = model
            .params
            .tensors()
            .into_iter()
            .map(|(name, values)| (name, values.to_vec()))
            .collect();
        let checksum = tensors_checksum(&tensors);
        WeightsFile {
            format_version: WEIGHTS_FORMAT_VERSION,
            model_config: model.cfg.clone(),
            train_config: train.clone(),
            encoder_config: encoder.clone(),
            projection: ProjectionSummary {
                seed: projection.seed,
                signal_dim: projection.signal_dim,
                vocab_size: projection.vocab_size(),
                checksum: projection.checksum(),
            },
            tensors,
            checksum,
        }
    }

    /// Recomputes the content checksum from the current tensors. Only
    /// needed after editing tensors in place (tests do this to build
    /// structurally broken but checksum-consistent files).
    pub fn recompute_checksum(&mut self) {
        self.checksum = tensors_checksum(&self.tensors);
    }

    /// Validates and reassembles the runtime pieces. `origin` labels the
    /// file in diagnostics.
    pub fn into_parts(
        self,
        origin: &str,
    ) -> Result<(MappingModel, TrainConfig, EncoderConfig, ProjectionMap)> {
        if self.format_version != WEIGHTS_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                got: self.format_version,
                supported: WEIGHTS_FORMAT_VERSION,
            });
        }
        let computed = tensors_checksum(&self.tensors);
        if computed != self.checksum {
            return Err(Error::ChecksumMismatch {
                context: "weight tensors",
                stored: format!("{:016x}", self.checksum),
                computed: format!("{computed:016x}"),
            });
        }
        self.model_config.validate()?;
        self.train_config.validate()?;
        self.encoder_config.validate()?;
        if self.projection.signal_dim != self.model_config.signal_dim {
            return Err(Error::DimMismatch {
                context: "projection vs mapping model signal dim",
                expected: self.model_config.signal_dim,
                got: self.projection.signal_dim,
            });
        }
        let mut model = MappingModel::init(&self.model_config)?;
        let mut consumed = 0usize;
        for (name, slot) in model.params.tensors_mut() {
            let stored = self.tensors.get(&name).ok_or_else(|| {
                Error::malformed(origin, format!("missing tensor {name:?}"))
            })?;
            if stored.len() != slot.len() {
                return Err(Error::malformed(
                    origin,
                    format!(
                        "tensor {name:?} has length {}, expected {}",
                        stored.len(),
                        slot.len()
                    ),
                ));
            }
            slot.copy_from_slice(stored);
            consumed += 1;
        }
        if consumed != self.tensors.len() {
            let known: Vec<String> = model.params.tensors().into_iter().map(|(n, _)| n).collect();
            let extra = self
                .tensors
                .keys()
                .find(|name| !known.contains(name))
                .cloned()
                .unwrap_or_default();
            return Err(Error::malformed(
                origin,
                format!("unexpected tensor {extra:?}"),
            ));
        }
        let projection = ProjectionMap::build(
            self.projection.vocab_size,
            self.projection.signal_dim,
            self.projection.seed,
        )?;
        if projection.checksum() != self.projection.checksum {
            return Err(Error::ChecksumMismatch {
                context: "projection assignment",
                stored: format!("{:016x}", self.projection.checksum),
                computed: format!("{:016x}", projection.checksum()),
            });
        }
        Ok((model, self.train_config, self.encoder_config, projection))
    }
}

pub fn save_weights(
    path: &Path,
    model: &MappingModel,
    train: &TrainConfig,
    encoder: &EncoderConfig,
    projection: &ProjectionMap,
) -> Result<()> {
    save_json(path, &WeightsFile::from_parts(model, train, encoder, projection))
}

pub fn load_weights(
    path: &Path,
) -> Result<(MappingModel, TrainConfig, EncoderConfig, ProjectionMap)> {
    let file: WeightsFile = load_json(path)?;
    file.into_parts(&path.display().to_string())
}

/// Writes pretty-printed JSON with a trailing newline. The rendering is
/// deterministic for a given value, which protocol-determinism tests
/// rely on.
pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::malformed(path.display().to_string(), e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Reads JSON; a missing file reports as a missing artifact rather than
/// a bare io error so the CLI can exit with the dedicated code.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingArtifact(path.display().to_string())
        } else {
            Error::io(path.display().to_string(), e)
        }
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Error::malformed(path.display().to_string(), e.to_string()))
}
