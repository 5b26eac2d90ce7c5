//! Exact asymptotics of the BCOV invariant for one-parameter degenerations
//! of Calabi–Yau manifolds, with the monodromy and Hodge-theoretic tools the
//! formulas consume.

pub mod bcov;
pub mod error;
pub mod exactalg;
pub mod hodgemetrics;
pub mod lmhs;
pub mod monodromy;
pub mod periods;
pub mod strata;

pub use error::{Error, Result};
