//! Multilinear minimax relaxations of n-player normal-form games.
//!
//! A finite game in normal form is stored as a payoff tensor `A_0 = (a(i, I))`:
//! one dense real array per player `i`, indexed by pure strategy profiles `I`.
//! The library computes the minimax value
//!
//! ```text
//! min over x in S_n  of  max over p in the product of simplices  of  A_0[x, p]
//! ```
//!
//! where `x` weights the players and `A_0[x, p] = sum_i x_i * A_i[p]`, by
//! solving a primal/dual pair of linear programs with a built-in dense
//! two-phase simplex solver. The dual vertex `q*` yields a product-form
//! profile `p*` (its per-player marginals) that serves as a cheap,
//! polynomial-time approximation to a Nash equilibrium, together with
//! certified upper bounds on convex combinations of equilibrium payoffs.
//!
//! Modules, bottom up:
//!
//! - [`tensor`]: payoff tensor storage, profile indexing, the `.mmg` file
//!   format, seeded random games.
//! - [`multilinear`]: mixed strategies and evaluation of the forms `A_i[p]`,
//!   `A_i[p|x^i]`, `A_0[x, p]`, plus best responses.
//! - [`lp`]: LP construction for the primal/dual pair and the simplex solver.
//! - [`minimax`]: the end-to-end pipeline: solve, derive `p*`, verify saddle
//!   inequalities, quality and bound reports.
//! - [`nashmap`]: the gain-normalization self-map of the strategy space whose
//!   fixed points are exactly the Nash equilibria, as an observable iteration.
//! - [`scaling`]: per-player diagonal scaling `A_0(d)` and the projective
//!   reweighting iteration `d -> d'`.
//! - [`oracle`]: brute-force ground truth for small games: pure equilibria,
//!   closed-form 2x2 mixed equilibria, support enumeration, grid minimax.
//! - [`report`]: machine-readable report and trace serialization.
//! - [`cli`]: the `mulmin` command-line front end.
//!
//! Indexing convention: the Rust API is 0-based everywhere (players, actions,
//! profiles); every user-visible text surface (`.mmg` files, CLI output,
//! reports, traces) is 1-based.

pub mod cli;
pub mod lp;
pub mod minimax;
pub mod multilinear;
pub mod nashmap;
pub mod oracle;
pub mod report;
pub mod scaling;
pub mod tensor;

mod book;

pub use minimax::{solve_minimax, MinimaxSolution};
pub use multilinear::{MixedProfile, MixedStrategy, SelectorWeights};
pub use tensor::{GameShape, PayoffTensor, PureProfile};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A player, action, or profile index was out of range.
    #[error("index out of range: {0}")]
    OutOfRange(String),
    /// Malformed game file.
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    /// The LP solver terminated without an optimal solution.
    #[error("solver failure: {0}")]
    SolverFailure(String),
    /// An enumeration exceeded its stated budget.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
