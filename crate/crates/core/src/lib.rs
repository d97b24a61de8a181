//! Pulling-block puzzle toolkit: exact rules for the optional/forced,
//! bounded-strength, walls, and gravity variants; exhaustive solvers;
//! an abstract gadget framework with behavioral equivalence checking;
//! nondeterministic constraint logic; and compilers that turn constraint
//! graphs and gadget networks into puzzle boards.

pub mod board;
pub mod gadgets;
pub mod lts;
pub mod ncl;
pub mod reductions;
pub mod rng;
pub mod solver;

pub use board::{Board, BoardError, Cell, Configuration, Direction, Move, Strength, VariantRules};
pub use lts::{check_bisimulation, Lts};
pub use solver::{
    enumerate_reachable, extract_boundary_lts, solve_reachability, SolveResult, Verdict,
    DEFAULT_BUDGET,
};
