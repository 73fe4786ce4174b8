//! Core model library: parametric population traits, individual offense
//! utilities, the social-welfare function in three evaluation tiers, the
//! reduced `(v, p)` optimizer, a Monte-Carlo population simulator, and the
//! survey estimation suite that produces the distribution parameters the
//! optimizer consumes.
//!
//! The crate is `no_std` (with `alloc`) so the numerical kernel can be
//! embedded anywhere; all IO, file formats, and the CLI live in the
//! companion crate.

#![cfg_attr(not(test), no_std)]
// validation deliberately writes `!(x > 0.0)` so NaN fails closed
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod behavior;
pub mod dist;
pub mod estimate;
pub mod fmath;
pub mod golden;
pub mod optimizer;
pub mod quad;
pub mod sim;
pub mod special;
pub mod welfare;

pub use behavior::{Agent, CrimeParams, PartitionLabel, PenalStrategy, StrategyTargets};
pub use dist::{DiscountDist, GammaDist, PopulationModel, WealthDist};
pub use optimizer::{OptimizeOutcome, ReducedSolution, SolutionBranch};
pub use sim::{GammaMode, SimConfig, SimReport};
pub use welfare::{CostParams, Tier, WelfareBreakdown};
