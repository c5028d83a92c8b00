//! Bundle persistence: `opening.weights` / `middlegame.weights` /
//! `endgame.weights` plus a `bundle.json` metadata record. Single-model
//! baselines use `model.weights` + `model.json`. Weight files are a
//! versioned binary container with a SHA-256 checksum over the parameter
//! block, so round-trips are bit-exact.

use super::{Handcrafted, Network};
use crate::encoder::INPUT_DIM;
use crate::phase::GamePhase;
use sha2::{Digest, Sha256};
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"PXW1";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic in weight file")]
    BadMagic,
    #[error("unsupported weight format version {0}")]
    VersionMismatch(u32),
    #[error("checksum failure in weight file")]
    ChecksumFailure,
    #[error("bundle is missing the {} expert file", .0.name())]
    MissingExpert(GamePhase),
    #[error("missing model file {0}")]
    MissingModel(String),
    #[error("bad metadata: {0}")]
    BadMetadata(String),
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BundleMetadata {
    pub training_method: String,
    pub provenance: String,
}

impl BundleMetadata {
    pub fn new(method: &str, provenance: &str) -> BundleMetadata {
        BundleMetadata {
            training_method: method.to_string(),
            provenance: provenance.to_string(),
        }
    }
}

/// Three phase experts sharing one input/output contract.
#[derive(Debug, Clone)]
pub struct ExpertBundle {
    pub experts: [super::Evaluator; 3],
    pub metadata: BundleMetadata,
}

impl ExpertBundle {
    pub fn new(
        opening: super::Evaluator,
        middlegame: super::Evaluator,
        endgame: super::Evaluator,
        metadata: BundleMetadata,
    ) -> ExpertBundle {
        ExpertBundle {
            experts: [opening, middlegame, endgame],
            metadata,
        }
    }

    /// All three experts are the same model: the classical-MCTS reduction.
    pub fn uniform(model: super::Evaluator, metadata: BundleMetadata) -> ExpertBundle {
        ExpertBundle {
            experts: [model.clone(), model.clone(), model],
            metadata,
        }
    }

    pub fn expert(&self, phase: GamePhase) -> &super::Evaluator {
        &self.experts[phase.index()]
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct ExpertEntry {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    handcrafted: Option<Handcrafted>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct BundleFile {
    format_version: u32,
    metadata: BundleMetadata,
    experts: std::collections::BTreeMap<String, ExpertEntry>,
}

pub fn save_network(net: &Network<f32>, path: &Path) -> Result<(), BundleError> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(MAGIC)?;
    file.write_all(&FORMAT_VERSION.to_le_bytes())?;
    file.write_all(&(net.input_dim as u32).to_le_bytes())?;
    file.write_all(&(net.hidden as u32).to_le_bytes())?;
    file.write_all(&(net.params.len() as u64).to_le_bytes())?;
    let mut bytes = Vec::with_capacity(net.params.len() * 4);
    for &w in &net.params {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    let digest = Sha256::digest(&bytes);
    file.write_all(&bytes)?;
    file.write_all(&digest)?;
    Ok(())
}

pub fn load_network(path: &Path) -> Result<Network<f32>, BundleError> {
    let mut file = std::fs::File::open(path)?;
    let mut magic = [0u8; 4];
    file.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(BundleError::BadMagic);
    }
    let mut u32buf = [0u8; 4];
    file.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != FORMAT_VERSION {
        return Err(BundleError::VersionMismatch(version));
    }
    file.read_exact(&mut u32buf)?;
    let input_dim = u32::from_le_bytes(u32buf) as usize;
    file.read_exact(&mut u32buf)?;
    let hidden = u32::from_le_bytes(u32buf) as usize;
    let mut u64buf = [0u8; 8];
    file.read_exact(&mut u64buf)?;
    let count = u64::from_le_bytes(u64buf) as usize;
    if input_dim != INPUT_DIM || count != super::param_count(input_dim, hidden) {
        return Err(BundleError::BadMetadata(format!(
            "architecture mismatch: input {input_dim}, hidden {hidden}, params {count}"
        )));
    }
    let mut bytes = vec![0u8; count * 4];
    file.read_exact(&mut bytes)?;
    let mut digest = [0u8; 32];
    file.read_exact(&mut digest)?;
    if Sha256::digest(&bytes).as_slice() != digest {
        return Err(BundleError::ChecksumFailure);
    }
    let params = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Ok(Network {
        input_dim,
        hidden,
        params,
    })
}

fn entry_of(e: &super::Evaluator, file: Option<String>) -> ExpertEntry {
    match e {
        super::Evaluator::Handcrafted(h) => ExpertEntry {
            kind: "handcrafted".to_string(),
            file: None,
            handcrafted: Some(*h),
        },
        super::Evaluator::Network(_) => ExpertEntry {
            kind: "network".to_string(),
            file,
            handcrafted: None,
        },
    }
}

fn load_entry(dir: &Path, entry: &ExpertEntry, phase: GamePhase) -> Result<super::Evaluator, BundleError> {
    match entry.kind.as_str() {
        "handcrafted" => Ok(super::Evaluator::Handcrafted(entry.handcrafted.ok_or_else(
            || BundleError::BadMetadata("handcrafted entry without parameters".into()),
        )?)),
        "network" => {
            let file = entry
                .file
                .as_ref()
                .ok_or_else(|| BundleError::BadMetadata("network entry without file".into()))?;
            let path = dir.join(file);
            if !path.exists() {
                return Err(BundleError::MissingExpert(phase));
            }
            Ok(super::Evaluator::Network(load_network(&path)?))
        }
        other => Err(BundleError::BadMetadata(format!("unknown expert kind '{other}'"))),
    }
}

pub fn save_bundle(bundle: &ExpertBundle, dir: &Path) -> Result<(), BundleError> {
    std::fs::create_dir_all(dir)?;
    let mut experts = std::collections::BTreeMap::new();
    for phase in GamePhase::ALL {
        let evaluator = bundle.expert(phase);
        let file_name = format!("{}.weights", phase.name());
        if let super::Evaluator::Network(net) = evaluator {
            save_network(net, &dir.join(&file_name))?;
        }
        experts.insert(phase.name().to_string(), entry_of(evaluator, Some(file_name)));
    }
    let record = BundleFile {
        format_version: FORMAT_VERSION,
        metadata: bundle.metadata.clone(),
        experts,
    };
    std::fs::write(dir.join("bundle.json"), serde_json::to_string_pretty(&record).unwrap())?;
    Ok(())
}

pub fn load_bundle(dir: &Path) -> Result<ExpertBundle, BundleError> {
    let text = std::fs::read_to_string(dir.join("bundle.json"))?;
    let record: BundleFile =
        serde_json::from_str(&text).map_err(|e| BundleError::BadMetadata(e.to_string()))?;
    if record.format_version != FORMAT_VERSION {
        return Err(BundleError::VersionMismatch(record.format_version));
    }
    let mut experts: Vec<super::Evaluator> = Vec::with_capacity(3);
    for phase in GamePhase::ALL {
        let entry = record
            .experts
            .get(phase.name())
            .ok_or(BundleError::MissingExpert(phase))?;
        experts.push(load_entry(dir, entry, phase)?);
    }
    Ok(ExpertBundle {
        experts: experts.try_into().map_err(|_| BundleError::BadMetadata("expert count".into()))?,
        metadata: record.metadata,
    })
}

/// Saves a single-model baseline as `model.weights` + `model.json`.
pub fn save_model(model: &super::Evaluator, dir: &Path) -> Result<(), BundleError> {
    std::fs::create_dir_all(dir)?;
    if let super::Evaluator::Network(net) = model {
        save_network(net, &dir.join("model.weights"))?;
    }
    let entry = entry_of(model, Some("model.weights".to_string()));
    std::fs::write(dir.join("model.json"), serde_json::to_string_pretty(&entry).unwrap())?;
    Ok(())
}

pub fn load_model(dir: &Path) -> Result<super::Evaluator, BundleError> {
    let json = dir.join("model.json");
    if json.exists() {
        let entry: ExpertEntry = serde_json::from_str(&std::fs::read_to_string(json)?)
            .map_err(|e| BundleError::BadMetadata(e.to_string()))?;
        return load_entry(dir, &entry, GamePhase::Opening).map_err(|e| match e {
            BundleError::MissingExpert(_) => {
                BundleError::MissingModel("model.weights".to_string())
            }
            other => other,
        });
    }
    let weights = dir.join("model.weights");
    if weights.exists() {
        return Ok(super::Evaluator::Network(load_network(&weights)?));
    }
    Err(BundleError::MissingModel(dir.display().to_string()))
}

/// Model-directory convention from the engine options: a directory with a
/// `bundle.json` engages the mixture search, one with `model.weights` the
/// single-model search.
pub enum LoadedModel {
    Bundle(ExpertBundle),
    Single(super::Evaluator),
}

pub fn load_model_dir(dir: &Path) -> Result<LoadedModel, BundleError> {
    if dir.join("bundle.json").exists() {
        Ok(LoadedModel::Bundle(load_bundle(dir)?))
    } else {
        Ok(LoadedModel::Single(load_model(dir)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experts::Evaluator;

    fn random_bundle() -> ExpertBundle {
        ExpertBundle::new(
            Evaluator::Network(Network::seeded(16, 1)),
            Evaluator::Network(Network::seeded(16, 2)),
            Evaluator::Handcrafted(Handcrafted::strong()),
            BundleMetadata::new("separated", "unit-test"),
        )
    }

    #[test]
    fn bundle_round_trip_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let bundle = random_bundle();
        save_bundle(&bundle, dir.path()).unwrap();
        let loaded = load_bundle(dir.path()).unwrap();
        assert_eq!(loaded.metadata, bundle.metadata);
        for phase in GamePhase::ALL {
            assert!(loaded.expert(phase).same_as(bundle.expert(phase)));
        }
    }

    #[test]
    fn corrupted_file_fails_checksum() {
        let dir = tempfile::tempdir().unwrap();
        save_bundle(&random_bundle(), dir.path()).unwrap();
        let path = dir.path().join("opening.weights");
        let mut bytes = std::fs::read(&path).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0xff;
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(
            load_bundle(dir.path()),
            Err(BundleError::ChecksumFailure)
        ));
    }

    #[test]
    fn missing_expert_file_names_phase() {
        let dir = tempfile::tempdir().unwrap();
        let bundle = ExpertBundle::uniform(
            Evaluator::Network(Network::seeded(16, 3)),
            BundleMetadata::new("regular", "unit-test"),
        );
        save_bundle(&bundle, dir.path()).unwrap();
        std::fs::remove_file(dir.path().join("endgame.weights")).unwrap();
        assert!(matches!(
            load_bundle(dir.path()),
            Err(BundleError::MissingExpert(GamePhase::Endgame))
        ));
    }

    #[test]
    fn version_mismatch_detected() {
        let dir = tempfile::tempdir().unwrap();
        let net: Network<f32> = Network::seeded(8, 4);
        let path = dir.path().join("m.weights");
        save_network(&net, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4] = 9; // bump version field
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(
            load_network(&path),
            Err(BundleError::VersionMismatch(9))
        ));
    }

    #[test]
    fn model_dir_dispatch() {
        let dir = tempfile::tempdir().unwrap();
        save_model(
            &Evaluator::Network(Network::seeded(8, 5)),
            dir.path(),
        )
        .unwrap();
        assert!(matches!(
            load_model_dir(dir.path()).unwrap(),
            LoadedModel::Single(_)
        ));
        let bdir = tempfile::tempdir().unwrap();
        save_bundle(&random_bundle(), bdir.path()).unwrap();
        assert!(matches!(
            load_model_dir(bdir.path()).unwrap(),
            LoadedModel::Bundle(_)
        ));
    }
}
