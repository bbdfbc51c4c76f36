pub mod cli;
pub mod config;
pub mod error;
pub mod fem1d;
pub mod linalg;
pub mod operators;
pub mod output;
pub mod quadrature;
pub mod rothe;
pub mod stepper;
pub mod study;
pub mod timegrid;
