//! Single time lens: imaging condition, realizations, aperture bounds and
//! the post-lens biphoton.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::dispersion::{ChirpedPulse, FraunhoferCheck};
use crate::error::{invalid, Error, Result};
use crate::grid::Axis;
use crate::hom::DimensionlessParams;
use crate::source::{fill_rows, JsaGrid, PhaseMatching, Photon, SourceModel};

/// Default factor standing in for "much greater than".
pub const DEFAULT_SAFETY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Realization {
    /// Quadratic phase with a given focal GDD and unlimited aperture.
    Ideal { focal_gdd: f64 },
    /// Electro-optic phase modulator: peak phase θ_max (rad), drive f_RF (GHz).
    Eopm { theta_max: f64, f_rf_ghz: f64 },
    /// Electro-optic modulator specified by its usable window T_A (ps).
    EopmWindow { theta_max: f64, aperture_ps: f64 },
    /// Four-wave mixing with a chirped pump of duration τ₀ (ps) and GDD D_p (ps²).
    Fwm { tau0: f64, pump_gdd: f64 },
}

impl Realization {
    pub fn label(&self) -> &'static str {
        match self {
            Realization::Ideal { .. } => "ideal",
            Realization::Eopm { .. } | Realization::EopmWindow { .. } => "eopm",
            Realization::Fwm { .. } => "fwm",
        }
    }

    /// (focal GDD, temporal aperture); the aperture is infinite for an
    /// ideal lens.
    pub fn focal_gdd_and_aperture(&self) -> Result<(f64, f64)> {
        match *self {
            Realization::Ideal { focal_gdd } => {
                if !(focal_gdd != 0.0 && focal_gdd.is_finite()) {
                    return Err(invalid("focal_gdd", format!("{focal_gdd} must be finite and nonzero")));
                }
                Ok((focal_gdd, f64::INFINITY))
            }
            Realization::Eopm { theta_max, f_rf_ghz } => {
                if !(f_rf_ghz > 0.0 && f_rf_ghz.is_finite()) {
                    return Err(invalid("f_rf_ghz", format!("{f_rf_ghz} must be positive")));
                }
                // GHz → ps⁻¹
                let aperture = 1.0 / (2.0 * PI * f_rf_ghz * 1e-3);
                Realization::EopmWindow {
                    theta_max,
                    aperture_ps: aperture,
                }
                .focal_gdd_and_aperture()
            }
            Realization::EopmWindow { theta_max, aperture_ps } => {
                if !(theta_max > 0.0 && theta_max.is_finite()) {
                    return Err(invalid("theta_max", format!("{theta_max} rad must be positive")));
                }
                if !(aperture_ps > 0.0 && aperture_ps.is_finite()) {
                    return Err(invalid("aperture_ps", format!("{aperture_ps} must be positive")));
                }
                Ok((aperture_ps * aperture_ps / theta_max, aperture_ps))
            }
            Realization::Fwm { tau0, pump_gdd } => {
                if !(tau0 > 0.0 && tau0.is_finite()) {
                    return Err(invalid("tau0", format!("{tau0} ps must be positive")));
                }
                if !(pump_gdd != 0.0 && pump_gdd.is_finite()) {
                    return Err(invalid("pump_gdd", format!("{pump_gdd} must be finite and nonzero")));
                }
                Ok((-0.5 * pump_gdd, 4.0 * LN_2 * pump_gdd.abs() / tau0))
            }
        }
    }
}

/// Lens with consistent imaging GDDs: 1/D_in + 1/D_out = 1/D_f,
/// M = −D_out/D_in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeLensSpec {
    pub realization: Realization,
    pub focal_gdd: f64,
    pub magnification: f64,
    pub input_gdd: f64,
    pub output_gdd: f64,
    /// Temporal aperture T_A, ps (∞ for an ideal lens).
    pub aperture: f64,
    /// Synchronization offset δt, ps.
    pub delta_t: f64,
    /// Output linear-phase delay τ₂ and constant phase φ′.
    pub tau2: f64,
    pub phi: f64,
    /// Delay of the magnified image, ps.
    pub output_delay: f64,
}

impl TimeLensSpec {
    pub fn from_realization(realization: Realization, magnification: f64, delta_t: f64) -> Result<Self> {
        if !(magnification != 0.0 && magnification.is_finite()) {
            return Err(invalid("magnification", format!("{magnification} must be finite and nonzero")));
        }
        if !delta_t.is_finite() {
            return Err(invalid("delta_t", "must be finite"));
        }
        let (d_f, aperture) = realization.focal_gdd_and_aperture()?;
        let input_gdd = d_f * (magnification - 1.0) / magnification;
        Ok(Self {
            realization,
            focal_gdd: d_f,
            magnification,
            input_gdd,
            output_gdd: d_f * (1.0 - magnification),
            aperture,
            delta_t,
            tau2: 0.0,
            phi: 0.0,
            output_delay: 0.0,
        })
    }

    pub fn ideal(focal_gdd: f64, magnification: f64) -> Result<Self> {
        Self::from_realization(Realization::Ideal { focal_gdd }, magnification, 0.0)
    }

    /// M = 1 puts both imaging GDDs at zero; only meaningful as the
    /// lensless limit.
    pub fn is_unit_magnification(&self) -> bool {
        self.magnification == 1.0
    }

    /// Largest violation of the imaging relations, relative to |D_f|.
    pub fn consistency_residual(&self) -> f64 {
        let d_f = self.focal_gdd;
        let mag = (self.output_gdd + self.magnification * self.input_gdd).abs() / d_f.abs();
        if self.is_unit_magnification() {
            return mag.max((self.input_gdd.abs() + self.output_gdd.abs()) / d_f.abs());
        }
        let lens = (d_f / self.input_gdd + d_f / self.output_gdd - 1.0).abs();
        mag.max(lens)
    }

    pub fn params(&self, model: &SourceModel) -> Result<DimensionlessParams> {
        DimensionlessParams::new(model, self.focal_gdd, self.magnification)
    }
}

/// Aperture and dispersion-limit feasibility of a lens for a given σ_o.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureReport {
    pub realization: &'static str,
    pub aperture: f64,
    pub focal_gdd: f64,
    pub magnification: f64,
    pub sigma_o: f64,
    /// σ_o⁴ must exceed this by the safety factor, rad⁴/ps⁴.
    pub lower_sigma4: f64,
    /// σ_o must stay below this, rad/ps.
    pub upper_sigma: f64,
    /// T_A⁴ / [(4 ln 2)² D_f²(M−1)²/M²].
    pub compatibility: f64,
    pub safety: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub compatible: bool,
}

impl ApertureReport {
    pub fn passed(&self) -> bool {
        self.lower_ok && self.upper_ok && self.compatible
    }

    pub const CSV_HEADER: &'static str = "realization,aperture_ps,focal_gdd_ps2,magnification,sigma_o,lower_sigma4,upper_sigma,compatibility,safety,lower_ok,upper_ok,compatible";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.realization,
            self.aperture,
            self.focal_gdd,
            self.magnification,
            self.sigma_o,
            self.lower_sigma4,
            self.upper_sigma,
            self.compatibility,
            self.safety,
            self.lower_ok,
            self.upper_ok,
            self.compatible
        )
    }

    pub fn write_csv<W: Write>(reports: &[Self], mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in reports {
            writeln!(w, "{}", r.csv_row())?;
        }
        Ok(())
    }
}

impl fmt::Display for ApertureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flag = |ok: bool| if ok { "ok" } else { "FAIL" };
        writeln!(f, "{:<28}{:>14}", "realization", self.realization)?;
        writeln!(f, "{:<28}{:>14.6} ps", "aperture T_A", self.aperture)?;
        writeln!(f, "{:<28}{:>14.6} ps^2", "focal GDD D_f", self.focal_gdd)?;
        writeln!(f, "{:<28}{:>14.6}", "magnification M", self.magnification)?;
        writeln!(f, "{:<28}{:>14.6} rad/ps", "sigma_o", self.sigma_o)?;
        writeln!(
            f,
            "{:<28}{:>14.6e} rad^4/ps^4  sigma_o^4 = {:.4e}  {}",
            "lower bound on sigma_o^4",
            self.lower_sigma4,
            self.sigma_o.powi(4),
            flag(self.lower_ok)
        )?;
        writeln!(
            f,
            "{:<28}{:>14.6} rad/ps  {}",
            "upper bound on sigma_o",
            self.upper_sigma,
            flag(self.upper_ok)
        )?;
        write!(
            f,
            "{:<28}{:>14.6e}  {}  (safety {})",
            "bound compatibility",
            self.compatibility,
            flag(self.compatible),
            self.safety
        )
    }
}

/// Field-of-view bounds M²/[4D_f²(M−1)²] ≪ σ_o⁴ < T_A⁴M⁴/[D_f⁴(M−1)⁴(8 ln 2)²].
pub fn check_aperture(lens: &TimeLensSpec, sigma_o: f64, safety: f64) -> Result<ApertureReport> {
    if !(sigma_o > 0.0 && sigma_o.is_finite()) {
        return Err(invalid("sigma_o", format!("{sigma_o} must be positive")));
    }
    if !(safety >= 1.0) {
        return Err(invalid("safety", format!("{safety} must be at least 1")));
    }
    let m = lens.magnification;
    let d_f = lens.focal_gdd.abs();
    let ratio = (m / (m - 1.0)).abs();
    let t_a = lens.aperture;
    let lower = ratio * ratio / (4.0 * d_f * d_f);
    let upper = t_a * ratio / (d_f * (8.0 * LN_2).sqrt());
    let compat = t_a.powi(4) * ratio * ratio / ((4.0 * LN_2).powi(2) * d_f * d_f);
    Ok(ApertureReport {
        realization: lens.realization.label(),
        aperture: t_a,
        focal_gdd: lens.focal_gdd,
        magnification: m,
        sigma_o,
        lower_sigma4: lower,
        upper_sigma: upper,
        compatibility: compat,
        safety,
        lower_ok: sigma_o.powi(4) >= safety * lower,
        upper_ok: sigma_o < upper,
        compatible: compat >= safety,
    })
}

/// Dispersion-limit check of the input GDD on a transform-limited photon
/// of spectral width σ_o.
pub fn input_fraunhofer(lens: &TimeLensSpec, sigma_o: f64, safety: f64) -> Result<FraunhoferCheck> {
    let pulse = ChirpedPulse::transform_limited(0.5 / sigma_o)?;
    Ok(pulse.fraunhofer(lens.input_gdd, safety))
}

/// Ordinary-photon intensity after the lens: (1/|M|) I_o(t_peak + (t − t_img)/M),
/// with the image centred at t_img = M·t_peak + output delay.
pub fn post_lens_intensity(model: &SourceModel, lens: &TimeLensSpec, t: f64) -> f64 {
    let m = lens.magnification;
    let peak = model.intensity_peak_time(Photon::Ordinary);
    let center = post_lens_peak_time(model, lens);
    model.intensity(Photon::Ordinary, peak + (t - center) / m) / m.abs()
}

pub fn post_lens_peak_time(model: &SourceModel, lens: &TimeLensSpec) -> f64 {
    lens.magnification * model.intensity_peak_time(Photon::Ordinary) + lens.output_delay
}

/// Post-lens JSA coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostLensForm {
    pub b11: f64,
    pub b12: f64,
    pub b22: f64,
    /// Σ², ps⁻².
    pub sigma2: f64,
    pub j0: Complex64,
    params: DimensionlessParams,
    tau2: f64,
}

impl PostLensForm {
    pub fn new(model: &SourceModel, lens: &TimeLensSpec) -> Result<Self> {
        let p = lens.params(model)?;
        let (t_o, t_e, d, m) = (p.t_o, p.t_e, p.d, p.m);
        let a = 1.0 + t_o * t_o;
        let j0 = (Complex64::new(0.0, 2.0 * PI * p.d_f) / Complex64::new(a, d / m)).sqrt()
            * Complex64::from_polar(model.xi, lens.phi);
        Ok(Self {
            b11: d * d * a,
            b12: d * d * (1.0 + t_o * t_e) / m,
            b22: d * d * (1.0 + t_e * t_e) / (m * m) + (t_e - t_o).powi(2) * a,
            sigma2: p.omega_p * p.omega_p * (a * a + d * d / (m * m)),
            j0,
            params: p,
            tau2: lens.tau2,
        })
    }

    pub fn jsa(&self, omega: f64, omega_prime: f64) -> Complex64 {
        let p = &self.params;
        let q = self.b11 * omega * omega + 2.0 * self.b12 * omega * omega_prime + self.b22 * omega_prime * omega_prime;
        let lin = p.m * (1.0 + p.t_o * p.t_o) * omega + (1.0 + p.t_o * p.t_e) * omega_prime;
        let psi = self.tau2 * (omega + omega_prime) - p.d * lin * lin / (4.0 * p.m * self.sigma2);
        self.j0 * Complex64::from_polar((-q / (4.0 * self.sigma2)).exp(), psi)
    }

    /// Standard deviation of the ordinary marginal of |J_out|².
    pub fn marginal_sigma_o(&self) -> f64 {
        (self.sigma2 * self.b22 / (self.b11 * self.b22 - self.b12 * self.b12)).sqrt()
    }
}

/// Closed-form post-lens JSA of the Gaussian model, on the given axes.
pub fn post_lens_jsa(model: &SourceModel, lens: &TimeLensSpec, omega: Axis, omega_prime: Axis) -> Result<JsaGrid> {
    let form = PostLensForm::new(model, lens)?;
    let values = fill_rows(omega, omega_prime, |w, wp| form.jsa(w, wp));
    JsaGrid::from_values(omega, omega_prime, values, PhaseMatching::Gaussian)
}

/// Ordinary spectral width after the lens, σ_o²/M² + Ω_p²(1+T_o²)/D².
pub fn post_lens_sigma_o(model: &SourceModel, lens: &TimeLensSpec) -> Result<f64> {
    let p = lens.params(model)?;
    let (so, _) = model.spectral_sigmas();
    let m = p.m;
    Ok((so * so / (m * m) + p.omega_p * p.omega_p * (1.0 + p.t_o * p.t_o) / (p.d * p.d)).sqrt())
}

/// Magnification giving equal post-lens spectral widths, M_opt/√(1−(T_e−T_o)²/D²).
pub fn symmetric_magnification(p: &DimensionlessParams) -> Result<f64> {
    let gap = p.delay_gap().abs();
    if p.d.abs() <= gap {
        return Err(Error::NoSymmetricMagnification { d: p.d, delay_gap: gap });
    }
    Ok(p.optimal_magnification() / (1.0 - gap * gap / (p.d * p.d)).sqrt())
}

/// Transfer function of the ordinary arm,
/// √(2πiD_f) e^{−iMD_f(Ω − Ω̄/M)²/2 + iΩτ₂ + iΩ̄τ₁ + iφ′}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferFunction {
    pub focal_gdd: f64,
    pub magnification: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub phi: f64,
}

impl TransferFunction {
    /// τ₁ is fixed by synchronizing the lens with the source:
    /// τ₁ = −(τ_o + t₀ + δt).
    pub fn new(model: &SourceModel, lens: &TimeLensSpec) -> Self {
        Self {
            focal_gdd: lens.focal_gdd,
            magnification: lens.magnification,
            tau1: -(model.tau_o + model.t0 + lens.delta_t),
            tau2: lens.tau2,
            phi: lens.phi,
        }
    }

    pub fn prefactor(&self) -> Complex64 {
        Complex64::new(0.0, 2.0 * PI * self.focal_gdd).sqrt()
    }

    pub fn eval(&self, omega: f64, omega_bar: f64) -> Complex64 {
        let m = self.magnification;
        let u = omega - omega_bar / m;
        let phase = -0.5 * m * self.focal_gdd * u * u + omega * self.tau2 + omega_bar * self.tau1 + self.phi;
        self.prefactor() * Complex64::from_polar(1.0, phase)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bbo() -> SourceModel {
        SourceModel::new(0.9753551838208224, 0.7583616401518611, 2.684772404393243).unwrap()
    }

    #[test]
    fn eopm_and_fwm_parameters() {
        let e = TimeLensSpec::from_realization(
            Realization::Eopm {
                theta_max: 25.0,
                f_rf_ghz: 40.0,
            },
            -2.1,
            0.0,
        )
        .unwrap();
        assert_relative_eq!(e.aperture, 3.978874, max_relative = 1e-6);
        assert_relative_eq!(e.focal_gdd, 0.633257, max_relative = 1e-5);
        let f = TimeLensSpec::from_realization(
            Realization::Fwm {
                tau0: 0.1,
                pump_gdd: -44.0,
            },
            -2.1,
            0.0,
        )
        .unwrap();
        assert_eq!(f.focal_gdd, 22.0);
        assert_relative_eq!(f.aperture, 4.0 * LN_2 * 440.0, max_relative = 1e-15);
        assert!(TimeLensSpec::from_realization(Realization::Ideal { focal_gdd: 1.0 }, 0.0, 0.0).is_err());
        assert!(TimeLensSpec::from_realization(
            Realization::Eopm {
                theta_max: 0.0,
                f_rf_ghz: 40.0
            },
            2.0,
            0.0
        )
        .is_err());
    }

    #[test]
    fn imaging_relations_hold() {
        for m in [-4.0, -2.1, -0.3, 0.5, 1.0, 2.0, 7.0] {
            let l = TimeLensSpec::ideal(3.7, m).unwrap();
            assert!(l.consistency_residual() < 1e-12, "M={m}");
        }
        let unit = TimeLensSpec::ideal(3.7, 1.0).unwrap();
        assert!(unit.is_unit_magnification());
        assert_eq!(unit.input_gdd, 0.0);
    }

    #[test]
    fn aperture_bounds() {
        let window = TimeLensSpec::from_realization(
            Realization::EopmWindow {
                theta_max: 25.0,
                aperture_ps: 4.0,
            },
            -2.1,
            0.0,
        )
        .unwrap();
        let r = check_aperture(&window, 1.482224, DEFAULT_SAFETY).unwrap();
        assert_relative_eq!(r.focal_gdd, 0.64, max_relative = 1e-15);
        assert_relative_eq!(r.lower_sigma4, 0.28, max_relative = 0.01);
        assert_relative_eq!(r.upper_sigma, 1.8, max_relative = 0.01);
        assert!(r.passed());
        let fwm = TimeLensSpec::from_realization(
            Realization::Fwm {
                tau0: 0.1,
                pump_gdd: -44.0,
            },
            -2.1,
            0.0,
        )
        .unwrap();
        let r = check_aperture(&fwm, 1.482224, DEFAULT_SAFETY).unwrap();
        assert_relative_eq!(r.lower_sigma4, 2.37e-4, max_relative = 0.01);
        assert_relative_eq!(r.upper_sigma, 16.0, max_relative = 0.01);
        let ideal = TimeLensSpec::ideal(10.0, -2.1).unwrap();
        let r = check_aperture(&ideal, 1.48, DEFAULT_SAFETY).unwrap();
        assert!(r.upper_ok && r.upper_sigma.is_infinite());
        let text = r.to_string();
        assert!(text.contains("upper bound"));
        let mut csv = Vec::new();
        ApertureReport::write_csv(&[r], &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 2);
    }

    #[test]
    fn intensity_is_stretched() {
        let model = bbo();
        let lens = TimeLensSpec::ideal(5.0, -2.1).unwrap();
        let axis = Axis::symmetric(20.0, 8001).unwrap();
        let vals: Vec<f64> = axis.points().iter().map(|&t| post_lens_intensity(&model, &lens, t)).collect();
        let (mean, std) = crate::grid::moments(&axis, &vals);
        assert_relative_eq!(axis.integrate(&vals), model.biphoton_probability(), max_relative = 1e-9);
        assert_relative_eq!(std, 2.1 * model.temporal_sigmas().0, max_relative = 1e-9);
        assert_relative_eq!(mean, post_lens_peak_time(&model, &lens), epsilon = 1e-9);
    }

    #[test]
    fn post_lens_width() {
        let model = bbo();
        let p = DimensionlessParams::with_d(&model, 10.0, 1.0).unwrap();
        let m = -p.optimal_magnification();
        let lens = TimeLensSpec::ideal(p.d_f, m).unwrap();
        let s = post_lens_sigma_o(&model, &lens).unwrap();
        let se = model.spectral_sigmas().1;
        assert!((s - se).abs() / se < 0.02);
        let fixed = TimeLensSpec::ideal(p.d_f, -2.1).unwrap();
        assert_relative_eq!(post_lens_sigma_o(&model, &fixed).unwrap(), 0.7153407, max_relative = 1e-6);
        let form = PostLensForm::new(&model, &lens).unwrap();
        assert_relative_eq!(form.marginal_sigma_o(), s, max_relative = 1e-12);
        let far = TimeLensSpec::ideal(1e9, m).unwrap();
        assert_relative_eq!(post_lens_sigma_o(&model, &far).unwrap(), se, max_relative = 1e-9);
    }

    #[test]
    fn far_field_jsa_is_rescaled_input() {
        let model = bbo();
        let m = 2.1;
        let lens = TimeLensSpec::ideal(1e8, m).unwrap();
        let form = PostLensForm::new(&model, &lens).unwrap();
        for &(w, wp) in &[(0.1, 0.2), (-0.4, 0.3), (0.25, -0.6)] {
            let a = form.jsa(w, wp).norm();
            let b = m.sqrt() * model.jsa(PhaseMatching::Gaussian, m * w, wp).norm();
            assert_relative_eq!(a, b, max_relative = 1e-6);
        }
    }

    #[test]
    fn symmetric_magnification_values() {
        let model = bbo();
        let p = DimensionlessParams::with_d(&model, 10.0, 1.0).unwrap();
        let ms = symmetric_magnification(&p).unwrap();
        let gap = p.delay_gap();
        assert_relative_eq!(ms, p.optimal_magnification() / (1.0 - gap * gap / 100.0).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(ms, 2.1325, max_relative = 1e-3);
        let far = DimensionlessParams::with_d(&model, 1e9, 1.0).unwrap();
        assert_relative_eq!(symmetric_magnification(&far).unwrap(), p.optimal_magnification(), max_relative = 1e-12);
        let edge = DimensionlessParams::from_parts(p.t_o, p.t_e, gap, 1.0, p.omega_p).unwrap();
        assert!(matches!(symmetric_magnification(&edge), Err(Error::NoSymmetricMagnification { .. })));
        // Equal post-lens widths at M_sym.
        let lens = TimeLensSpec::ideal(p.d_f, ms).unwrap();
        assert_relative_eq!(
            post_lens_sigma_o(&model, &lens).unwrap(),
            model.spectral_sigmas().1,
            max_relative = 1e-12
        );
    }

    #[test]
    fn fraunhofer_on_input_gdd() {
        let lens = TimeLensSpec::ideal(22.0, -2.1).unwrap();
        assert!(input_fraunhofer(&lens, 1.48, DEFAULT_SAFETY).unwrap().satisfied);
        let unit = TimeLensSpec::ideal(22.0, 1.0).unwrap();
        assert!(!input_fraunhofer(&unit, 1.48, DEFAULT_SAFETY).unwrap().satisfied);
    }
}
