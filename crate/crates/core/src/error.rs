use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid barrier system: {0}")]
    InvalidSystem(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The synthesized packet lost norm, either because the k grid is too
    /// coarse or because the packet left the spatial window.
    #[error("packet norm drifted by {drift:.3e} at t = {t}; refine the k grid or widen the window")]
    UnderResolved { t: f64, drift: f64 },
}
