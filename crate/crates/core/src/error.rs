use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("wavelength {wavelength_um} µm outside the Sellmeier window [{min_um}, {max_um}] µm")]
    WavelengthOutOfRange {
        wavelength_um: f64,
        min_um: f64,
        max_um: f64,
    },

    #[error("Sellmeier set gives n² = {n_squared} at {wavelength_um} µm (index must exceed 1)")]
    NonPhysicalIndex { wavelength_um: f64, n_squared: f64 },

    #[error("no type-II phase matching for a {pump_um} µm pump between 0.1° and 89.9°")]
    NoPhaseMatching { pump_um: f64 },

    #[error("degenerate source: τ_o = τ_e = {tau_ps} ps, the HOM formulas divide by τ_e − τ_o")]
    DegenerateSource { tau_ps: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Λ matrix is numerically singular (condition number {condition:.3e})")]
    SingularLambda { condition: f64 },

    #[error("no symmetric magnification: |D| = {d} does not exceed |T_e − T_o| = {delay_gap}")]
    NoSymmetricMagnification { d: f64, delay_gap: f64 },

    #[error(
        "under-resolved quadrature on the {axis} axis: aliasing estimate {estimate:.3e} exceeds {limit:.1e} (N = {n})"
    )]
    UnderResolved {
        axis: &'static str,
        n: usize,
        estimate: f64,
        limit: f64,
    },

    #[error("quadrature result has imaginary residual {imag:.3e} against real part {real:.3e}")]
    ImaginaryResidual { real: f64, imag: f64 },

    #[error("empty {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
