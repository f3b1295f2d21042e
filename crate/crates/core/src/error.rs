use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar argument left its admissible interval.
    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("unknown representation `{0}` (only `chiral` is supported)")]
    UnknownRepresentation(String),

    /// The generator is not one of the regular involution, idempotent or
    /// tri-idempotent classes, so no closed form applies.
    #[error("generator is {0:?}; closed-form exponential needs a regular class")]
    NotClosedForm(crate::algebra::NumberOperatorKind),

    #[error("mode index {index} out of range 1..={modes}")]
    ModeIndex { index: usize, modes: usize },

    #[error("pair modes must differ (got {0} twice)")]
    SamePair(usize),

    #[error("qubit count {0} outside supported range 1..=12")]
    QubitCount(usize),

    #[error("gate couples sectors of different fermion parity (max odd entry {0:.3e})")]
    OddGate(f64),

    /// `site` is `None` for a spatially uniform gap.
    #[error("gap overflow {}: |delta| tau = {value} > 1", site.map_or("in uniform gap".to_string(), |s| format!("at site {s}")))]
    GapOverflow { site: Option<usize>, value: f64 },

    #[error("gap is zero, phase of the pairing operator is undefined")]
    ZeroGap,

    #[error("eigen-decomposition failed: {0}")]
    Eigen(String),

    #[error("{0}")]
    Invalid(String),
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}
