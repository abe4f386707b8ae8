//! Numerical tools for `−Δ_p u = λ f(u)` on balls when `f` oscillates with
//! zeros accumulating at `0` or `∞`.
//!
//! Shooting produces radial solutions and bifurcation diagrams. The
//! threshold module turns primitive estimates into existence and
//! nonexistence bounds on `λ`. The variational module minimizes truncated
//! energies on radial grids.

// `!(x > 0.0)` style guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod ext;
pub mod nonlinearity;
pub mod ode;
pub mod primitive;
pub mod quadrature;
pub mod roots;
pub mod shoot;
pub mod thresholds;
pub mod variational;

pub use nonlinearity::{Direction, Nonlinearity, NonlinearityError, ZeroSequence};
pub use primitive::{LimitClass, LimitEstimate, PrimitiveCalculus, PrimitiveError};
