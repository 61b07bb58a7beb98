//! Frequency K_i graphs for the symmetric traveling salesman problem.
//!
//! For an i-vertex subset, each of the C(i,2) vertex pairs has one optimal
//! Hamiltonian path with those endpoints. Counting how many of these paths use
//! each edge gives the subset's frequency graph. Averaged over many subsets,
//! the counts separate edges of the optimal tour from ordinary edges.

pub mod analytics;
pub mod classify;
pub mod error;
pub mod freq_graph;
pub mod instance;
pub mod oracle;
pub mod sampling;
pub mod subset_dp;
pub mod tsplib;

pub use error::{Error, Result};
pub use freq_graph::{freq_from_paths, freq_k4_closed, frequency_graph, FrequencyGraph, SupportGraph};
pub use instance::{gen_random, perturb, Instance, WeightModel};
pub use sampling::{all_edge_stats, sample_edge_stats, EdgeStats};
pub use subset_dp::{all_op_paths, ohc, op_path, OptimalPath, SubsetDp, SubsetSelection};
pub use tsplib::{parse_tour, parse_tsplib, Tour};
pub use analytics::{bounds, decrement_law, pd_model, solve_id, sparsify_threshold, AnalyticParams, IdVariant};
pub use classify::{
    classify_by_decrement, classify_by_threshold, evaluate_against_tour, recover_ohc, DecrementConfig, EdgeTrajectory,
    RecoverConfig, SparsifiedGraph, ThresholdRule, Verdict,
};
