//! Pulsed type-II SPDC biphoton model: pump, phase matching, JSA and the
//! Gaussian-model marginals.

use std::f64::consts::{LN_2, PI, SQRT_2};
use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::dispersion::{angular_frequency, CrystalSpec, Polarization};
use crate::error::{invalid, Error, Result};
use crate::grid::Axis;

/// Width of the Gaussian that replaces sinc(x).
pub const SIGMA_S: f64 = 1.61;

/// Speed of light in nm/ps.
const C_NM_PER_PS: f64 = 299_792.458;

/// FWHM / σ for a Gaussian intensity profile.
pub fn fwhm_per_sigma() -> f64 {
    2.0 * (2.0 * LN_2).sqrt()
}

/// sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpWidth {
    /// Intensity FWHM duration, ps.
    Duration(f64),
    /// Intensity FWHM bandwidth, nm.
    Bandwidth(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    pub wavelength_nm: f64,
    pub width: PumpWidth,
    /// Reference time t₀, ps.
    pub t0: f64,
    /// Amplitude scale E₀, arbitrary units.
    pub amplitude: f64,
}

impl PumpSpec {
    pub fn new(wavelength_nm: f64, width: PumpWidth, t0: f64, amplitude: f64) -> Result<Self> {
        if !(wavelength_nm > 0.0 && wavelength_nm.is_finite()) {
            return Err(invalid("wavelength_nm", format!("{wavelength_nm} must be positive")));
        }
        let w = match width {
            PumpWidth::Duration(w) | PumpWidth::Bandwidth(w) => w,
        };
        if !(w > 0.0 && w.is_finite()) {
            return Err(invalid("pump width", format!("{w} must be positive")));
        }
        if !t0.is_finite() || !amplitude.is_finite() {
            return Err(invalid("pump", "t0 and amplitude must be finite"));
        }
        Ok(Self {
            wavelength_nm,
            width,
            t0,
            amplitude,
        })
    }

    pub fn from_bandwidth(wavelength_nm: f64, bandwidth_nm: f64) -> Result<Self> {
        Self::new(wavelength_nm, PumpWidth::Bandwidth(bandwidth_nm), 0.0, 1.0)
    }

    pub fn from_duration(wavelength_nm: f64, duration_ps: f64) -> Result<Self> {
        Self::new(wavelength_nm, PumpWidth::Duration(duration_ps), 0.0, 1.0)
    }

    pub fn wavelength_um(&self) -> f64 {
        self.wavelength_nm * 1e-3
    }

    /// Pump carrier, rad/ps.
    pub fn carrier(&self) -> f64 {
        angular_frequency(self.wavelength_um())
    }

    /// Ω_p = 1/(2σ_t), rad/ps.
    pub fn omega_p(&self) -> f64 {
        match self.width {
            PumpWidth::Duration(tau) => 1.0 / (2.0 * self.sigma_t_from(tau)),
            PumpWidth::Bandwidth(dl) => {
                let l = self.wavelength_nm;
                2.0 * PI * C_NM_PER_PS * dl / (l * l) / fwhm_per_sigma()
            }
        }
    }

    fn sigma_t_from(&self, tau: f64) -> f64 {
        tau / fwhm_per_sigma()
    }

    /// Temporal intensity standard deviation σ_t, ps.
    pub fn sigma_t(&self) -> f64 {
        1.0 / (2.0 * self.omega_p())
    }

    /// Intensity FWHM duration τ_p, ps.
    pub fn duration_fwhm(&self) -> f64 {
        self.sigma_t() * fwhm_per_sigma()
    }

    /// Intensity FWHM bandwidth, nm.
    pub fn bandwidth_fwhm_nm(&self) -> f64 {
        let l = self.wavelength_nm;
        self.omega_p() * fwhm_per_sigma() * l * l / (2.0 * PI * C_NM_PER_PS)
    }

    /// α(Ω) = E₀(√π/Ω_p) exp(−Ω²/4Ω_p² + iΩt₀).
    pub fn spectrum(&self, omega: f64) -> Complex64 {
        let op = self.omega_p();
        let mag = self.amplitude * PI.sqrt() / op * (-omega * omega / (4.0 * op * op)).exp();
        Complex64::from_polar(mag, omega * self.t0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Photon {
    Ordinary,
    Extraordinary,
}

impl Photon {
    pub fn label(self) -> &'static str {
        match self {
            Photon::Ordinary => "o",
            Photon::Extraordinary => "e",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMatching {
    ExactSinc,
    Gaussian,
}

impl PhaseMatching {
    pub fn label(self) -> &'static str {
        match self {
            PhaseMatching::ExactSinc => "exact",
            PhaseMatching::Gaussian => "gaussian",
        }
    }
}

/// Parameters of the Gaussian biphoton model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    /// rad/ps
    pub omega_p: f64,
    /// Relative group delays, ps.
    pub tau_o: f64,
    pub tau_e: f64,
    pub sigma_s: f64,
    /// Coupling scale ξ = κLE₀.
    pub xi: f64,
    /// Subharmonic carrier ω₀, rad/ps.
    pub carrier: f64,
    /// Pump reference time, ps.
    pub t0: f64,
    /// Group delays k′_o L and k′_e L, ps.
    pub delay_o: f64,
    pub delay_e: f64,
}

impl SourceModel {
    /// Model with zero carrier, reference time and group-delay bookkeeping.
    pub fn new(omega_p: f64, tau_o: f64, tau_e: f64) -> Result<Self> {
        let m = Self {
            omega_p,
            tau_o,
            tau_e,
            sigma_s: SIGMA_S,
            xi: 1.0,
            carrier: 0.0,
            t0: 0.0,
            delay_o: 0.0,
            delay_e: 0.0,
        };
        m.validate()?;
        Ok(m)
    }

    /// Build from a cut crystal and pump. `coupling` is κL; ξ = κL·E₀.
    pub fn from_crystal(crystal: &CrystalSpec, pump: &PumpSpec, coupling: f64) -> Result<Self> {
        let wp = pump.carrier();
        let w0 = 0.5 * wp;
        let p = crystal.group_quantities(wp, Polarization::Pump)?;
        let o = crystal.group_quantities(w0, Polarization::Ordinary)?;
        let e = crystal.group_quantities(w0, Polarization::Extraordinary)?;
        let l = crystal.length_mm;
        let m = Self {
            omega_p: pump.omega_p(),
            tau_o: 0.5 * (p.k1 - o.k1) * l,
            tau_e: 0.5 * (p.k1 - e.k1) * l,
            sigma_s: SIGMA_S,
            xi: coupling * pump.amplitude,
            carrier: w0,
            t0: pump.t0,
            delay_o: o.k1 * l,
            delay_e: e.k1 * l,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    pub fn with_t0(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_p > 0.0 && self.omega_p.is_finite()) {
            return Err(invalid("omega_p", format!("{} must be positive", self.omega_p)));
        }
        if !(self.sigma_s > 0.0) {
            return Err(invalid("sigma_s", format!("{} must be positive", self.sigma_s)));
        }
        if !(self.tau_o.is_finite() && self.tau_e.is_finite() && self.xi.is_finite()) {
            return Err(invalid("source", "delays and coupling must be finite"));
        }
        let scale = self.tau_o.abs().max(self.tau_e.abs());
        if (self.tau_e - self.tau_o).abs() <= 1e-12 * scale.max(1e-300) || scale == 0.0 {
            return Err(Error::DegenerateSource { tau_ps: self.tau_o });
        }
        Ok(())
    }

    fn tau(&self, photon: Photon) -> f64 {
        match photon {
            Photon::Ordinary => self.tau_o,
            Photon::Extraordinary => self.tau_e,
        }
    }

    fn delay_gap(&self) -> f64 {
        (self.tau_e - self.tau_o).abs()
    }

    /// Exact phase-matching function e^{ix} sinc(x), x = τ_oΩ + τ_eΩ′.
    pub fn phase_matching(&self, omega: f64, omega_prime: f64) -> Complex64 {
        let x = self.tau_o * omega + self.tau_e * omega_prime;
        Complex64::from_polar(1.0, x) * sinc(x)
    }

    /// Gaussian replacement exp(−x²/2σ_s² + ix).
    pub fn phase_matching_gaussian(&self, omega: f64, omega_prime: f64) -> Complex64 {
        let x = self.tau_o * omega + self.tau_e * omega_prime;
        Complex64::from_polar((-x * x / (2.0 * self.sigma_s * self.sigma_s)).exp(), x)
    }

    /// JSA with its linear phases removed; real and, for the exact sinc,
    /// signed.
    pub fn jsa_envelope(&self, mode: PhaseMatching, omega: f64, omega_prime: f64) -> f64 {
        let s = omega + omega_prime;
        let x = self.tau_o * omega + self.tau_e * omega_prime;
        let pump = self.xi * PI.sqrt() / self.omega_p
            * (-s * s / (4.0 * self.omega_p * self.omega_p)).exp();
        let pm = match mode {
            PhaseMatching::ExactSinc => sinc(x),
            PhaseMatching::Gaussian => (-x * x / (2.0 * self.sigma_s * self.sigma_s)).exp(),
        };
        pump * pm
    }

    /// J(Ω,Ω′) = ξ(√π/Ω_p) e^{−(Ω+Ω′)²/4Ω_p² + i(Ω+Ω′)t₀} Φ(Ω,Ω′).
    pub fn jsa(&self, mode: PhaseMatching, omega: f64, omega_prime: f64) -> Complex64 {
        let phase = (omega + omega_prime) * self.t0 + self.tau_o * omega + self.tau_e * omega_prime;
        Complex64::from_polar(1.0, phase) * self.jsa_envelope(mode, omega, omega_prime)
    }

    /// Spectral standard deviations (σ_o, σ_e) of the marginal spectra.
    pub fn spectral_sigmas(&self) -> (f64, f64) {
        let gap = SQRT_2 * self.delay_gap();
        let s2 = self.sigma_s * self.sigma_s;
        let op2 = self.omega_p * self.omega_p;
        (
            (s2 + 2.0 * self.tau_e * self.tau_e * op2).sqrt() / gap,
            (s2 + 2.0 * self.tau_o * self.tau_o * op2).sqrt() / gap,
        )
    }

    pub fn spectral_sigma(&self, photon: Photon) -> f64 {
        let (o, e) = self.spectral_sigmas();
        match photon {
            Photon::Ordinary => o,
            Photon::Extraordinary => e,
        }
    }

    /// Temporal standard deviations (Δt_o, Δt_e) of the intensities.
    pub fn temporal_sigmas(&self) -> (f64, f64) {
        let s2 = self.sigma_s * self.sigma_s;
        let op2 = self.omega_p * self.omega_p;
        let denom = 2.0 * self.sigma_s * self.omega_p;
        (
            (s2 + 2.0 * self.tau_o * self.tau_o * op2).sqrt() / denom,
            (s2 + 2.0 * self.tau_e * self.tau_e * op2).sqrt() / denom,
        )
    }

    pub fn temporal_sigma(&self, photon: Photon) -> f64 {
        let (o, e) = self.temporal_sigmas();
        match photon {
            Photon::Ordinary => o,
            Photon::Extraordinary => e,
        }
    }

    /// CW-limit spectral width σ_s/(√2|τ_e − τ_o|).
    pub fn sigma_cw(&self) -> f64 {
        self.sigma_s / (SQRT_2 * self.delay_gap())
    }

    /// Pair probability per pump pulse, √2π²ξ²σ_s/(Ω_p|τ_e − τ_o|).
    pub fn biphoton_probability(&self) -> f64 {
        SQRT_2 * PI * PI * self.xi * self.xi * self.sigma_s / (self.omega_p * self.delay_gap())
    }

    /// Ratio Δt_e/Δt_o; the optimal imaging magnification up to sign.
    pub fn width_ratio(&self) -> f64 {
        let (o, e) = self.temporal_sigmas();
        e / o
    }

    /// Marginal spectrum S_µ(Ω) = √(2π) P_b/σ_µ e^{−Ω²/2σ_µ²}.
    pub fn spectrum(&self, photon: Photon, omega: f64) -> f64 {
        let s = self.spectral_sigma(photon);
        (2.0 * PI).sqrt() * self.biphoton_probability() / s * (-omega * omega / (2.0 * s * s)).exp()
    }

    /// Time at which I_µ peaks: t₀ + τ_µ + k′_µL.
    pub fn intensity_peak_time(&self, photon: Photon) -> f64 {
        let delay = match photon {
            Photon::Ordinary => self.delay_o,
            Photon::Extraordinary => self.delay_e,
        };
        self.t0 + self.tau(photon) + delay
    }

    /// Photon flux I_µ(t), a Gaussian of width Δt_µ carrying P_b.
    pub fn intensity(&self, photon: Photon, t: f64) -> f64 {
        let dt = self.temporal_sigma(photon);
        let u = t - self.intensity_peak_time(photon);
        self.biphoton_probability() / ((2.0 * PI).sqrt() * dt) * (-u * u / (2.0 * dt * dt)).exp()
    }

    /// Default grid half-width: 6·max(σ_o, σ_e).
    pub fn default_half_width(&self) -> f64 {
        let (o, e) = self.spectral_sigmas();
        6.0 * o.max(e)
    }
}

/// Grid request for [`JsaGrid::compute`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points: usize,
    /// Half-width in units of max(σ_o, σ_e).
    pub half_width_sigmas: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 257,
            half_width_sigmas: 6.0,
        }
    }
}

impl GridSpec {
    pub fn axis(&self, model: &SourceModel) -> Result<Axis> {
        let (o, e) = model.spectral_sigmas();
        Axis::symmetric(self.half_width_sigmas * o.max(e), self.points)
    }
}

/// Sampled complex JSA, row-major with Ω along rows and Ω′ along columns.
#[derive(Debug, Clone, PartialEq)]
pub struct JsaGrid {
    pub omega: Axis,
    pub omega_prime: Axis,
    pub values: Vec<Complex64>,
    pub mode: PhaseMatching,
    /// Set when an axis covers less than ±5σ of its marginal.
    pub warning: Option<String>,
}

impl JsaGrid {
    pub fn compute(model: &SourceModel, mode: PhaseMatching, spec: GridSpec) -> Result<Self> {
        let axis = spec.axis(model)?;
        Self::on_axes(model, mode, axis, axis)
    }

    pub fn on_axes(model: &SourceModel, mode: PhaseMatching, omega: Axis, omega_prime: Axis) -> Result<Self> {
        let values = fill_rows(omega, omega_prime, |w, wp| model.jsa(mode, w, wp));
        let (so, se) = model.spectral_sigmas();
        let mut short = Vec::new();
        for (axis, sigma, name) in [(omega, so, "Ω"), (omega_prime, se, "Ω′")] {
            let reach = (-axis.start).min(axis.end()) / sigma;
            if reach < 5.0 {
                short.push(format!("{name} axis reaches only {reach:.2}σ"));
            }
        }
        Ok(Self {
            omega,
            omega_prime,
            values,
            mode,
            warning: (!short.is_empty()).then(|| short.join("; ")),
        })
    }

    /// Wrap precomputed samples.
    pub fn from_values(omega: Axis, omega_prime: Axis, values: Vec<Complex64>, mode: PhaseMatching) -> Result<Self> {
        if values.len() != omega.len * omega_prime.len {
            return Err(invalid(
                "values",
                format!("{} samples for a {}×{} grid", values.len(), omega.len, omega_prime.len),
            ));
        }
        Ok(Self {
            omega,
            omega_prime,
            values,
            mode,
            warning: None,
        })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.omega_prime.len + j]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let n = self.omega_prime.len;
        &self.values[i * n..(i + 1) * n]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Long-form CSV: omega,omega_prime,re,im.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "omega,omega_prime,re,im")?;
        for i in 0..self.omega.len {
            let x = self.omega.at(i);
            for (j, v) in self.row(i).iter().enumerate() {
                writeln!(w, "{},{},{},{}", x, self.omega_prime.at(j), v.re, v.im)?;
            }
        }
        Ok(())
    }

    /// Plain-text |J| matrix normalized to a maximum of 1; rows follow Ω.
    pub fn write_matrix<W: Write>(&self, mut w: W) -> io::Result<()> {
        let max = self.max_abs();
        let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
        for i in 0..self.omega.len {
            let line: Vec<String> = self
                .row(i)
                .iter()
                .map(|v| format!("{:.6e}", v.norm() * scale))
                .collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn fill_rows<F>(rows: Axis, cols: Axis, f: F) -> Vec<Complex64>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    let row = |i: usize| -> Vec<Complex64> {
        let x = rows.at(i);
        (0..cols.len).map(|j| f(x, cols.at(j))).collect()
    };
    #[cfg(feature = "parallel")]
    let chunks: Vec<Vec<Complex64>> = {
        use rayon::prelude::*;
        (0..rows.len).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let chunks: Vec<Vec<Complex64>> = (0..rows.len).map(row).collect();
    chunks.concat()
}

impl fmt::Display for SourceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (so, se) = self.spectral_sigmas();
        let (to, te) = self.temporal_sigmas();
        writeln!(f, "Omega_p   {:>10.6} rad/ps", self.omega_p)?;
        writeln!(f, "tau_o     {:>10.6} ps", self.tau_o)?;
        writeln!(f, "tau_e     {:>10.6} ps", self.tau_e)?;
        writeln!(f, "sigma_o   {:>10.6} rad/ps", so)?;
        writeln!(f, "sigma_e   {:>10.6} rad/ps", se)?;
        writeln!(f, "dt_o      {:>10.6} ps", to)?;
        writeln!(f, "dt_e      {:>10.6} ps", te)?;
        writeln!(f, "sigma_cw  {:>10.6} rad/ps", self.sigma_cw())?;
        write!(f, "P_b       {:>10.6} xi^2", self.biphoton_probability() / (self.xi * self.xi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{SellmeierSet, UniaxialMaterial};
    use approx::assert_relative_eq;

    fn bbo() -> SourceModel {
        let pump = PumpSpec::from_bandwidth(405.0, 0.2).unwrap();
        let crystal = CrystalSpec::phase_matched(UniaxialMaterial::bbo(), 20.0, pump.wavelength_um()).unwrap();
        SourceModel::from_crystal(&crystal, &pump, 1.0).unwrap()
    }

    #[test]
    fn pump_bandwidth_and_duration() {
        let p = PumpSpec::from_bandwidth(405.0, 0.2).unwrap();
        assert_relative_eq!(p.omega_p(), 0.975355, max_relative = 1e-6);
        assert_relative_eq!(p.duration_fwhm(), 1.20716, max_relative = 1e-5);
        let q = PumpSpec::from_duration(405.0, p.duration_fwhm()).unwrap();
        assert_relative_eq!(q.omega_p(), p.omega_p(), max_relative = 1e-14);
        assert_relative_eq!(q.bandwidth_fwhm_nm(), 0.2, max_relative = 1e-12);
        assert!(PumpSpec::from_duration(405.0, 0.0).is_err());
    }

    #[test]
    fn pump_spectrum_shape() {
        let p = PumpSpec::from_bandwidth(405.0, 0.2).unwrap();
        let a0 = p.spectrum(0.0);
        assert_eq!(a0.im, 0.0);
        assert_relative_eq!(a0.re, PI.sqrt() / p.omega_p(), max_relative = 1e-15);
        let ratio = p.spectrum(2.0 * p.omega_p()).norm() / a0.norm();
        assert_relative_eq!(ratio, (-1f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn bbo_widths() {
        let m = bbo();
        let (so, se) = m.spectral_sigmas();
        let (to, te) = m.temporal_sigmas();
        assert_relative_eq!(so, 1.482224, max_relative = 1e-5);
        assert_relative_eq!(se, 0.704747, max_relative = 1e-5);
        assert_relative_eq!(to, 0.611334, max_relative = 1e-5);
        assert_relative_eq!(te, 1.285758, max_relative = 1e-5);
        assert_relative_eq!(m.sigma_cw(), 0.590965, max_relative = 1e-5);
        assert_relative_eq!(m.width_ratio(), 2.103201, max_relative = 1e-5);
        assert_relative_eq!(so / se * to / te, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn cw_limit_and_scalings() {
        let m = SourceModel::new(1e-9, 0.76, 2.68).unwrap();
        let (so, se) = m.spectral_sigmas();
        assert_relative_eq!(so, m.sigma_cw(), max_relative = 1e-12);
        assert_relative_eq!(se, m.sigma_cw(), max_relative = 1e-12);
        let a = SourceModel::new(1.0, 0.5, 1.5).unwrap();
        let b = SourceModel::new(1.0, 0.5, 2.5).unwrap();
        assert_relative_eq!(b.sigma_cw(), 0.5 * a.sigma_cw(), max_relative = 1e-15);
        let c = SourceModel::new(2.0, 0.5, 1.5).unwrap();
        assert_relative_eq!(c.biphoton_probability(), 0.5 * a.biphoton_probability(), max_relative = 1e-15);
        assert_eq!(a.with_xi(0.0).biphoton_probability(), 0.0);
        let n = SourceModel::new(1.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(n.temporal_sigmas().0, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn degenerate_source_rejected() {
        assert!(matches!(
            SourceModel::new(1.0, 0.7, 0.7),
            Err(Error::DegenerateSource { .. })
        ));
        let flat = UniaxialMaterial {
            name: "flat".into(),
            ordinary: SellmeierSet::constant_index(1.6),
            extraordinary: SellmeierSet::constant_index(1.6),
        };
        let crystal = CrystalSpec::new(flat, 10.0, 30.0).unwrap();
        let pump = PumpSpec::from_bandwidth(405.0, 0.2).unwrap();
        assert!(matches!(
            SourceModel::from_crystal(&crystal, &pump, 1.0),
            Err(Error::DegenerateSource { .. })
        ));
    }

    #[test]
    fn phase_matching_values() {
        let m = bbo();
        assert_eq!(m.phase_matching(0.0, 0.0), Complex64::new(1.0, 0.0));
        assert_eq!(m.phase_matching_gaussian(0.0, 0.0), Complex64::new(1.0, 0.0));
        assert!(m.phase_matching(PI / m.tau_o, 0.0).norm() < 1e-15);
        assert_relative_eq!(sinc(PI), 0.0, epsilon = 1e-16);
        let a = m.phase_matching(0.3, -1.1).norm();
        let b = m.phase_matching(-0.3, 1.1).norm();
        assert_relative_eq!(a, b, max_relative = 1e-15);
    }

    #[test]
    fn gaussian_matches_sinc_amplitude_half_width() {
        // sinc(x) = 1/2 at x = 1.895494; the Gaussian hits 1/2 at σ_s√(2 ln 2).
        let mut lo = 1.0;
        let mut hi = 2.5;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if sinc(mid) > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_relative_eq!(lo, SIGMA_S * (2.0 * LN_2).sqrt(), max_relative = 1e-3);
    }

    #[test]
    fn jsa_grid_shape() {
        let m = bbo();
        let g = JsaGrid::compute(&m, PhaseMatching::Gaussian, GridSpec::default()).unwrap();
        assert!(g.warning.is_none());
        let c = g.omega.len / 2;
        assert_eq!(g.omega.at(c), 0.0);
        assert_relative_eq!(g.get(c, c).norm(), g.max_abs(), max_relative = 1e-15);
        // Anti-diagonal elongation: along Ω = −Ω′ the pump envelope is flat.
        let k = c + 20;
        let l = c - 20;
        assert!(g.get(k, l).norm() > g.get(k, k).norm());
        let zero = JsaGrid::compute(&m.with_xi(0.0), PhaseMatching::ExactSinc, GridSpec::default()).unwrap();
        assert!(zero.values.iter().all(|v| v.norm() == 0.0));
        let narrow = GridSpec {
            points: 33,
            half_width_sigmas: 3.0,
        };
        assert!(JsaGrid::compute(&m, PhaseMatching::Gaussian, narrow).unwrap().warning.is_some());
    }

    #[test]
    fn t0_shift_is_a_linear_phase() {
        let m = bbo();
        let s = m.with_t0(0.8);
        for &(w, wp) in &[(0.3, -0.2), (1.2, 0.4), (-0.7, -0.9)] {
            let a = m.jsa(PhaseMatching::ExactSinc, w, wp);
            let b = s.jsa(PhaseMatching::ExactSinc, w, wp);
            assert_relative_eq!(a.norm(), b.norm(), max_relative = 1e-14);
            let expect = a * Complex64::from_polar(1.0, 0.8 * (w + wp));
            assert_relative_eq!((b - expect).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn spectra_and_intensities() {
        let m = bbo().with_t0(0.25);
        let (so, se) = m.spectral_sigmas();
        assert_relative_eq!(
            m.spectrum(Photon::Ordinary, 0.0) * so,
            m.spectrum(Photon::Extraordinary, 0.0) * se,
            max_relative = 1e-14
        );
        let tp = m.intensity_peak_time(Photon::Ordinary);
        assert_relative_eq!(tp, 0.25 + m.tau_o + m.delay_o, max_relative = 1e-15);
        assert!(m.intensity(Photon::Ordinary, tp) > m.intensity(Photon::Ordinary, tp + 1e-3));
        assert!(m.intensity(Photon::Ordinary, tp) > m.intensity(Photon::Ordinary, tp - 1e-3));
    }

    #[test]
    fn csv_and_matrix_export() {
        let m = SourceModel::new(1.0, 0.5, 1.5).unwrap();
        let spec = GridSpec {
            points: 5,
            half_width_sigmas: 6.0,
        };
        let g = JsaGrid::compute(&m, PhaseMatching::Gaussian, spec).unwrap();
        let mut csv = Vec::new();
        g.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 26);
        assert!(text.starts_with("omega,omega_prime,re,im\n"));
        let mut mat = Vec::new();
        g.write_matrix(&mut mat).unwrap();
        let text = String::from_utf8(mat).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().nth(2).unwrap().contains("1.000000e0"));
    }
}
