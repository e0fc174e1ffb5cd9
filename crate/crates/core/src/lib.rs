//! Goodness-of-fit testing for multivariate normality based on the empirical
//! moment generating function, for i.i.d. data and for the innovations of
//! CCC-GARCH models.

pub mod alternatives;
pub mod error;
pub mod garch;
pub mod io;
pub mod linalg;
pub mod null_sim;
pub mod optim;
pub mod power;
pub mod quadrature;
pub mod reference;
pub mod rng;
pub mod statistic;

pub use error::{Error, Result};
