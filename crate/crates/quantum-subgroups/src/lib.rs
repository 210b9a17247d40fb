//! Classification engine for conformal extensions ("quantum subgroups", i.e.
//! connected étale algebra objects) of the modular fusion categories C(g,k)
//! built from integrable level-k modules of affine Lie algebras.
//!
//! The pipeline runs in five stages:
//!
//! 1. **Thresholds** — per-level arithmetic bounds (`classify::l_max`,
//!    `classify::kappa_max`) cut the infinitely many levels down to a finite list.
//! 2. **Candidate windows** — weights with integral conformal weight and totally
//!    positive quantum dimension (`galois::candidate_set`) are searched in a
//!    bounded corner of the weight lattice (`weights::enumerate_h_window`);
//!    levels whose window is empty (or pure simple-current) are eliminated.
//! 3. **Inequality elimination** — nonnegativity of Σ_λ Z_λ S_{λ,μ} over probe
//!    weights μ bounds the coefficients of any étale object; most levels die
//!    here with a replayable certificate (`classify::eliminate_level`).
//! 4. **Branching reconstruction** — for surviving objects, the restriction
//!    multiplicities to a level-1 target category are solved as a bounded
//!    integer program (`branching::solve_branching`).
//! 5. **Verification** — the intertwining identities BS = S^e B, BT = T^e B and
//!    the modular-invariant conditions are checked numerically/exactly
//!    (`branching::verify_branching`, `branching::check_modular_invariant`).
//!
//! Exact rational arithmetic (via `num_rational`) is used for everything that
//! feeds a strict comparison (conformal weights, quadratic-form inequalities,
//! Galois parities); floating point with documented guard bands is used only
//! for S-matrix entries, where the classification logic is insulated against
//! round-off by design.

#![forbid(unsafe_code)]

pub mod branching;
pub mod cache;
pub mod catalog;
pub mod classify;
pub mod cli;
pub mod galois;
pub mod liealg;
pub mod modular;
pub mod weights;

pub use liealg::{build_algebra, AlgebraData, Series};
pub use weights::{LevelContext, Weight};

/// Common error type for the whole engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid rank {rank} for series {series}")]
    InvalidRank { series: String, rank: usize },
    #[error("cannot parse algebra spec {0:?}")]
    BadAlgebraSpec(String),
    #[error("cannot parse weight {0:?}")]
    BadWeight(String),
    #[error("weight {0:?} is not at level {1}")]
    WeightNotAtLevel(String, i64),
    #[error("simple-current data for (E_8, level 2) is exceptional and not supported")]
    E8LevelTwo,
    #[error("ell = {0} is not coprime to the Galois modulus {1}")]
    EllNotCoprime(i64, i64),
    #[error("enumeration of {count} weights exceeds budget {budget}; supply a streaming consumer")]
    EnumerationTooLarge { count: u128, budget: u128 },
    #[error("Weyl group too large ({order} elements) for a direct character sum")]
    WeylGroupTooLarge { order: u128 },
    #[error("level-1 modular data unsupported for this series/rank")]
    UnsupportedLevel1,
    #[error("alcove folding did not terminate within the step cap")]
    FoldingDiverged,
    #[error("Verlinde sum {value} at distance {dist} from the nearest nonnegative integer")]
    NonIntegralFusion { value: f64, dist: f64 },
    #[error("probe weight {0:?} is not in the centralizer of the chosen simple-current group")]
    ProbeNotInCentralizer(String),
    #[error("branching solve found no solution (wrong algebra object or bound too small)")]
    NoBranchingSolution,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Msg(String),
}

pub type Result<T> = std::result::Result<T, Error>;
