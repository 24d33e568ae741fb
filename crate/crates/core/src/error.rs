use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("operation `{operation}` is not supported for the {model} model")]
    UnsupportedModel {
        operation: &'static str,
        model: &'static str,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("T = {t} is a caustic time (N = {maslov_n})")]
    CausticTime { t: f64, maslov_n: u32 },
    #[error("T = {t} is not a caustic time")]
    NotACaustic { t: f64 },
    #[error("fresnel factor of a zero eigenvalue")]
    ZeroEigenvalue,
    #[error("shooting did not converge: {0}")]
    NoConvergence(String),
    #[error("endpoint T = {t} is conjugate to the start (multiplicity {multiplicity})")]
    EndpointConjugate { t: f64, multiplicity: usize },
    #[error("z is within {distance:e} of a branch cut of the generating function")]
    NearBranchCut { distance: f64 },
    #[error("wavefunction carries mass {edge_mass:e} at the domain edges")]
    DomainTooSmall { edge_mass: f64 },
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
