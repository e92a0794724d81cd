use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid bond: site {0} cannot couple to itself")]
    InvalidBond(usize),

    #[error("site {site} out of range for a {n_sites}-site system")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("{n_sites} sites exceeds the dense realization cap of {cap}")]
    ResourceCap { n_sites: usize, cap: usize },

    #[error("{0}")]
    Validation(String),

    #[error("ground state has degeneracy {degeneracy} where a unique state is required ({context})")]
    DegenerateGround {
        degeneracy: usize,
        context: &'static str,
    },

    #[error("step halving changed the result by {delta:.3e} (tolerance {tolerance:.1e})")]
    Accuracy { delta: f64, tolerance: f64 },

    #[error("singular tangent in the {flux} loop flux")]
    SingularTangent { flux: &'static str },

    #[error("{0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
