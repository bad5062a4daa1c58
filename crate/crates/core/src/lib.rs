//! Binary tree inequalities for the epigraph of summed start-up costs in
//! unit commitment, with brute-force oracles and a desk-scale LP harness.

pub mod bti;
pub mod cost_model;
pub mod error;
pub mod lpformat;
pub mod lpsolve;
pub mod oracle;
pub mod ranktree;
pub mod schedule;
pub mod ucmodel;

pub use bti::{
    coefficients, envelope, envelope_certified, separate, separate_counted, separate_with, subtree_offline_lengths, BtiCut,
    Envelope, Separation, SubtreeOfflineLengths, Threshold, ViolatedCut,
};
pub use cost_model::{discrete_cost, DiscreteCosts, ExpStartupCost, StartupCostModel, TabulatedConcaveCost, TimeGrid};
pub use error::{Error, Result};
pub use ranktree::{catalan, enumerate_trees, find_cartesian_tree, RankTree, SubtreeSizes, TreeViolation};
pub use schedule::{dcu_sum, dcu_t, delta_sum, offline_after, offline_before, FracPoint, Schedule};
pub use lpformat::{parse_lp, to_lp_string, write_lp};
pub use lpsolve::{
    cutting_plane_solve, integrality_gap, mip_objective, relaxation_bound, solve_lp, solve_mip, ColumnSpec,
    CuttingPlaneOptions, CuttingPlaneResult, GapReport, LinearProgram, RowSense, SolveResult, Status,
};
pub use ucmodel::{build, build_skeleton, random_instance, Formulation, ModelHandle, UcInstance, Unit};
