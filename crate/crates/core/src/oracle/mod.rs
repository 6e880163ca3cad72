//! Reference planners used to check the constrained planner.

mod brute;
mod compare;
mod exhaustive;

pub use brute::{
    brute_force_plan, brute_force_plan_capped, BlockList, BruteForceRun, FailedConstraint, IterationEntry,
    IterationLog, RepairAction, DEFAULT_ITERATION_CAP,
};
pub use compare::{compare_runs, summarize, Comparison, PlannerMetrics, THREADS_ENV};
pub use exhaustive::{exhaustive_optimum, DEFAULT_MAX_TURNS, MAX_SIDE};
