//! Exact-arithmetic substrate: arbitrary-precision rationals, rational
//! matrices with exact rank, linear relation systems with native strict
//! inequalities, and truncated trivariate exponential generating functions.
//!
//! Everything downstream of this module is exact; there is no floating
//! point and no epsilon anywhere in the crate.

mod linsys;
mod rat;
mod series;

pub use linsys::{affine_rank, lp_feasible, Feasibility, LinSysError, LinSystem, Relation};
pub use rat::{format_rat, parse_rat, rat, ratio, ParseRatError, Rat, RatMatrix};
pub use series::{Egf3, SeriesError};
