pub mod chebyshev;
pub mod cli;
pub mod discretize;
pub mod eigensolver;
pub mod error;
pub mod fcm;
mod linalg;
pub mod mapping;
pub mod nls;
pub mod output;
pub mod potentials;
pub mod spectrum;
