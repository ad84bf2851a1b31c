use thiserror::Error;

use crate::geometry::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid domain: {}", join(.0))]
    InvalidDomain(Vec<Violation>),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("no annulus clears the boundary of {0}")]
    NoClearance(String),
    #[error("point {0} is a delta-flux center")]
    SingularPoint(num_complex::Complex64),
    #[error("sphere fluxes do not sum to zero (residual {0:e})")]
    SphereFluxMismatch(f64),
    #[error("the zero-mode count is 0, no basis to build")]
    EmptyBasis,
    #[error("grid too coarse: residual {coarse:e} at step h vs {fine:e} at h/2")]
    GridTooCoarse { coarse: f64, fine: f64 },
    #[error("stereographic projection is undefined at the north pole")]
    NorthPole,
    #[error("Möbius pole: cz + d = 0")]
    PolePoint,
    #[error("domain error: {0}")]
    Domain(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
