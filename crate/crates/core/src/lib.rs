//! Finite-domain reasoning for distributed autoepistemic logic (dAEL).
//!
//! Theories are parsed, grounded over their finite domain, and evaluated with the
//! knowledge revision operator and its approximator.

pub mod ael;
pub mod access;
pub mod aft;
pub mod error;
pub mod fast;
pub mod ground;
pub mod limits;
pub mod oracle;
pub mod query;
pub mod random;
pub mod syntax;
pub mod truth;
pub mod worlds;

pub use aft::{Engine, Semantics};
pub use error::{Error, Result};
pub use ground::{ground_theory, Ground, GroundTheory};
pub use limits::Limits;
pub use syntax::{parse_formula, parse_theory, DistributedTheory, Formula};
pub use truth::{Bounds, Tv};
pub use worlds::{BeliefPair, Dpws, Frame, WorldSet};
