use std::path::PathBuf;

use thiserror::Error;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Validation,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value: {0}")]
    Validation(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("rank-deficient regression: {0}")]
    RankDeficient(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("patch has {found} vertices, at least {required} are required")]
    InsufficientPatch { found: usize, required: usize },

    #[error("degenerate sphere fit: {0}")]
    DegenerateFit(String),

    #[error("mesh is not watertight: {} boundary edge(s), first {:?}", boundary_edges.len(), boundary_edges.first())]
    Topology { boundary_edges: Vec<(usize, usize)> },

    #[error("Newton iteration failed to converge (last converged W0 = {last_good_w0})")]
    NonConvergence { last_good_w0: f64 },

    #[error("simulation unstable at face {face}: {reason}")]
    SimulationInstability { face: usize, reason: String },

    #[error("non-finite value in simulation state at t = {time}")]
    NotFinite { time: f64 },

    #[error("quasi-static relaxation did not settle within {steps} steps (kinetic energy {kinetic_energy:.3e} J)")]
    RelaxationTimeout { steps: usize, kinetic_energy: f64 },

    #[error("no vertices in contact with the ground plane")]
    EmptyContact,

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::NonConvergence { .. }
            | Error::SimulationInstability { .. }
            | Error::NotFinite { .. }
            | Error::RelaxationTimeout { .. }
            | Error::DegenerateFit(_)
            | Error::RankDeficient(_) => ErrorKind::Numerical,
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Validation(msg()))
    }
}
