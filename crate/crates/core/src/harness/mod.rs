//! Dataset ingestion, persistence, configuration files and the experiment
//! runners.

mod config;
mod data;
mod experiments;
mod persist;
mod stats;

pub use config::{parse_config, read_config};
pub use data::{gen_two_gaussians, load_csv, read_csv, save_csv, write_csv};
pub use experiments::{
    experiment_compressive, experiment_modelselect, experiment_tradeoff, experiment_twogauss,
    tradeoff_cosines, CompressiveParams, ModelSelectParams, TradeoffParams, TwoGaussParams,
};
pub use persist::{
    load_model, load_report_rows, model_from_json, model_to_json, save_model, save_report,
    ExperimentReport, MODEL_FORMAT_VERSION,
};
pub use stats::{ranks, spearman};
