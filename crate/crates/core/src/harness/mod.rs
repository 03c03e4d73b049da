//! Sampling harness: scenario generators, train/test sampling, Monte Carlo
//! validation of the tail and PAC bounds, and report writers.

pub mod concentration;
pub mod config;
pub mod generators;
pub mod learning;
pub mod pac;
pub mod report;
pub mod transform;

pub use concentration::{validate_concentration, ConcentrationConfig, ConcentrationTable};
pub use generators::{gen_random, gen_rare_chain, gen_rare_clique, gen_smokers, smokers_example, Scenario};
pub use learning::{lemma3_sample_x, lemma3_sample_y, sample_learning_instance, LearningInstance};
pub use pac::{
    run_expected_error_protocol, run_pac_experiment, select_best_theory, ExpectedErrorReport, MaskKind, PacConfig,
    PacRun, PacSummary, TrialRecord,
};
pub use transform::eliminate_constants;
pub use config::ExperimentConfig;
pub use report::{summary_json, trials_csv, write_reports, SCHEMA_VERSION};
