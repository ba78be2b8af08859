use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate field: {0}")]
    DegenerateField(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("unknown profile `{0}`")]
    UnknownProfile(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("time {t} outside the domain of validity of field `{field}`")]
    TimeOutOfDomain { field: String, t: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("gauge function ill-defined: curl residual {residual:e} exceeds {tolerance:e}")]
    GaugeIllDefined { residual: f64, tolerance: f64 },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("i/o error on `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

/// Returns the vector unchanged when all components are finite.
pub(crate) fn finite_vec(v: crate::Vec3, what: &str) -> Result<crate::Vec3> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

pub(crate) fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}
