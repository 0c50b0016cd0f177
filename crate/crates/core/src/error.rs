use thiserror::Error;

use crate::optimizer::Solution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("latitude {0} out of [-90, 90]")]
    Latitude(f64),
    #[error("longitude {0} out of (-180, 180]")]
    Longitude(f64),
    #[error("altitude {0} must be a finite non-negative number of meters")]
    Altitude(f64),
    #[error("orbit altitude {0} m must exceed 160 km")]
    OrbitAltitude(f64),
    #[error("orbit shell needs at least one plane and one slot")]
    EmptyShell,
    #[error("plane index {plane} out of range (shell has {planes} planes)")]
    PlaneIndex { plane: usize, planes: usize },
    #[error("slot index {slot} out of range (plane has {slots} slots)")]
    SlotIndex { slot: usize, slots: usize },
    #[error("flight speed {0} must be positive")]
    Speed(f64),
    #[error("flight origin and destination coincide")]
    DegenerateRoute,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid quantity `{value}` for {key}: {reason}")]
    Quantity {
        key: String,
        value: String,
        reason: String,
    },
    #[error("validation error: {0}")]
    Invalid(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("link {0} has zero or negative capacity")]
    ZeroCapacity(String),
    #[error("commodity {commodity} references node {node} absent from the snapshot")]
    MissingSource { commodity: String, node: String },
}

#[derive(Debug, Error, Clone)]
pub enum SolveError {
    #[error("no assignment satisfies all constraints")]
    Infeasible,
    #[error("search budget exhausted (gap {gap:.3e} s)")]
    BudgetExceeded {
        incumbent: Option<Box<Solution>>,
        /// incumbent objective minus the best proven lower bound; infinite
        /// without an incumbent
        gap: f64,
    },
    #[error("enumeration bound exceeded ({combinations} combinations)")]
    TooLarge { combinations: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}
