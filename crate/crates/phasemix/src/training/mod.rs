//! Dataset building, the expert-training regimes, and a toy self-play
//! loop. Training owns a mutable copy of the network exclusively; the
//! resulting bundle is immutable once handed to search.

mod data;
mod optim;
mod selfplay;
mod trainer;

pub use data::{
    build_datasets, build_datasets_from_games, load_datasets, save_datasets, DataError,
    DatasetManifest, PhaseDatasets, SplitDatasets, SplitSpec, TrainingSample,
};
pub use optim::{Nag, OneCycle};
pub use selfplay::{selfplay_rl, SelfplayConfig, SelfplayMode, SelfplayReport};
pub use trainer::{
    assign_weights, param_hash, train, weight_pair, weighted_loss, Checkpoint, LogEvent, TrainMethod,
    TrainError, TrainRunConfig, Trainer, TrainingLog,
};
