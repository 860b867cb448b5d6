use thiserror::Error;

use crate::fem::FemSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument {x} outside the supported range of {function}")]
    Range { function: &'static str, x: f64 },

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("point ({x}, {y}) lies outside the domain (distance {distance})")]
    OutsideDomain { x: f64, y: f64, distance: f64 },

    #[error("anisotropic isoperimetric inequality violated: radicand {radicand}")]
    IsoperimetricViolation { radicand: f64 },

    #[error("no root of the {equation} secular equation below k = {k_max}")]
    NoRoot { equation: &'static str, k_max: f64 },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("descent did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        last: Box<FemSolution>,
    },

    #[error("linear solver failure: {0}")]
    Solver(String),
}
