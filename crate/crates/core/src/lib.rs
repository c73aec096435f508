//! Generalized Galois numbers: exact q-combinatorics, certified evaluation of
//! the theta series and Euler products that govern their growth, and the
//! resulting asymptotics.

pub mod asymptotics;
pub mod ball;
pub mod cli;
pub mod decimal;
pub mod error;
pub mod forms;
pub mod poly;
pub mod prime;
pub mod qcomb;
pub mod special;
pub mod table1;
pub mod zeta;

pub use ball::{BigReal, Dyadic};
pub use error::{Error, Result};
pub use forms::QuadraticFormFj;
pub use poly::QPoly;
pub use prime::QValue;
pub use special::Precision;
