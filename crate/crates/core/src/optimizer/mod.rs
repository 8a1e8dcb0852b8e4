//! Training: the bound-minimizing classifier, exact and surrogate ERM on
//! projected data, and an L_q-regularised logistic regression baseline.

mod cg;
mod cv;
mod erm;
mod logistic;
mod model;
mod objective;
mod trainer;

pub use cg::{minimize_projected, CgOptions, CgOutcome};
pub use cv::{select_k, stratified_folds, KSelection, DEFAULT_K_GRID};
pub use erm::{best_threshold, train_erm_lowdim, ErmMode, EXACT_MAX_K, EXACT_MAX_N};
pub use logistic::{train_lq_logistic, LqConfig};
pub use model::{LinearModel, ModelMeta};
pub use objective::{gradients, objective, objective_and_gradients, Evaluation, COSINE_GUARD};
pub use trainer::{
    refine_bound_minimizer, train_bound_minimizer, train_bound_minimizer_traced, RunSummary,
    TrainConfig, TrainOutcome,
};
