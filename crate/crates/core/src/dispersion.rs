//! Refractive indices, wave vectors and group delays of a uniaxial crystal,
//! plus Gaussian-pulse propagation through quadratic-dispersion media.
//!
//! Units throughout: wavelength in µm, length in mm, time in ps, angular
//! frequency in rad/ps, GDD in ps².

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Speed of light in mm/ps.
pub const SPEED_OF_LIGHT_MM_PER_PS: f64 = 0.299_792_458;

const SPEED_OF_LIGHT_UM_PER_PS: f64 = SPEED_OF_LIGHT_MM_PER_PS * 1.0e3;

/// Wavelength (µm) of light with angular frequency `omega` (rad/ps).
pub fn wavelength_um(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT_UM_PER_PS / omega
}

/// Angular frequency (rad/ps) of light with wavelength `lambda_um`.
pub fn angular_frequency(lambda_um: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT_UM_PER_PS / lambda_um
}

/// One resonance term `strength / (λ² − resonance)` of a Sellmeier set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SellmeierPole {
    pub strength: f64,
    /// Resonance position in µm².
    pub resonance_um2: f64,
}

/// Principal refractive index as a rational function of wavelength:
///
/// n²(λ) = constant + Σ strength / (λ² − resonance) − infrared · λ²
#[derive(Debug, Clone, PartialEq)]
pub struct SellmeierSet {
    pub constant: f64,
    pub poles: Vec<SellmeierPole>,
    pub infrared: f64,
    /// Validity window (µm).
    pub window_um: (f64, f64),
}

/// Index and its first two wavelength derivatives (µm⁻¹, µm⁻²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexDerivatives {
    pub n: f64,
    pub dn: f64,
    pub d2n: f64,
}

pub const DEFAULT_WINDOW_UM: (f64, f64) = (0.2, 3.0);

impl SellmeierSet {
    pub fn new(constant: f64, poles: Vec<SellmeierPole>, infrared: f64) -> Self {
        Self {
            constant,
            poles,
            infrared,
            window_um: DEFAULT_WINDOW_UM,
        }
    }

    /// Wavelength-independent index; useful as a dispersionless reference.
    pub fn constant_index(n: f64) -> Self {
        Self::new(n * n, Vec::new(), 0.0)
    }

    /// β-BaB₂O₄ ordinary index (Eimerl et al., 1987).
    pub fn bbo_ordinary() -> Self {
        Self::new(
            2.7405,
            vec![SellmeierPole {
                strength: 0.0184,
                resonance_um2: 0.0179,
            }],
            0.0155,
        )
    }

    /// β-BaB₂O₄ principal extraordinary index (Eimerl et al., 1987).
    pub fn bbo_extraordinary() -> Self {
        Self::new(
            2.3730,
            vec![SellmeierPole {
                strength: 0.0128,
                resonance_um2: 0.0156,
            }],
            0.0044,
        )
    }

    pub fn with_window(mut self, min_um: f64, max_um: f64) -> Self {
        self.window_um = (min_um, max_um);
        self
    }

    fn check_window(&self, lambda_um: f64) -> Result<()> {
        let (min_um, max_um) = self.window_um;
        if !(lambda_um >= min_um && lambda_um <= max_um) {
            return Err(Error::WavelengthOutOfRange {
                wavelength_um: lambda_um,
                min_um,
                max_um,
            });
        }
        Ok(())
    }

    /// n²(λ) with its first two derivatives.
    fn n_squared(&self, lambda_um: f64) -> (f64, f64, f64) {
        let l2 = lambda_um * lambda_um;
        let mut f = self.constant - self.infrared * l2;
        let mut df = -2.0 * self.infrared * lambda_um;
        let mut d2f = -2.0 * self.infrared;
        for pole in &self.poles {
            let q = l2 - pole.resonance_um2;
            f += pole.strength / q;
            df -= 2.0 * lambda_um * pole.strength / (q * q);
            d2f += -2.0 * pole.strength / (q * q) + 8.0 * l2 * pole.strength / (q * q * q);
        }
        (f, df, d2f)
    }

    pub fn index(&self, lambda_um: f64) -> Result<f64> {
        Ok(self.derivatives(lambda_um)?.n)
    }

    /// Index with analytic first and second derivatives in λ.
    pub fn derivatives(&self, lambda_um: f64) -> Result<IndexDerivatives> {
        self.check_window(lambda_um)?;
        let (f, df, d2f) = self.n_squared(lambda_um);
        if !(f > 1.0) {
            return Err(Error::NonPhysicalIndex {
                wavelength_um: lambda_um,
                n_squared: f,
            });
        }
        let n = f.sqrt();
        let dn = df / (2.0 * n);
        let d2n = (0.5 * d2f - dn * dn) / n;
        Ok(IndexDerivatives { n, dn, d2n })
    }
}

/// Polarization of one of the three interacting waves. In type-II
/// phase matching the pump and the `e` subharmonic are extraordinary waves
/// at the cut angle; the `o` subharmonic is ordinary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    Pump,
    Ordinary,
    Extraordinary,
}

impl Polarization {
    pub fn label(self) -> &'static str {
        match self {
            Polarization::Pump => "p",
            Polarization::Ordinary => "o",
            Polarization::Extraordinary => "e",
        }
    }
}

/// A negative or positive uniaxial material described by its two principal
/// Sellmeier sets.
#[derive(Debug, Clone, PartialEq)]
pub struct UniaxialMaterial {
    pub name: String,
    pub ordinary: SellmeierSet,
    pub extraordinary: SellmeierSet,
}

impl UniaxialMaterial {
    pub fn bbo() -> Self {
        Self {
            name: "BBO".to_owned(),
            ordinary: SellmeierSet::bbo_ordinary(),
            extraordinary: SellmeierSet::bbo_extraordinary(),
        }
    }

    /// Looks up a built-in material by (case-insensitive) name.
    pub fn named(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "bbo" | "beta-bbo" | "β-bbo" => Some(Self::bbo()),
            _ => None,
        }
    }

    /// Extraordinary index at angle `theta_deg` to the optic axis, from the
    /// index ellipse 1/n² = cos²θ/n_o² + sin²θ/n_E².
    pub fn extraordinary_index(&self, lambda_um: f64, theta_deg: f64) -> Result<f64> {
        Ok(self.extraordinary_derivatives(lambda_um, theta_deg)?.n)
    }

    fn extraordinary_derivatives(&self, lambda_um: f64, theta_deg: f64) -> Result<IndexDerivatives> {
        if !(0.0..=90.0).contains(&theta_deg) {
            return Err(invalid("theta_deg", format!("{theta_deg} is outside [0°, 90°]")));
        }
        let o = self.ordinary.derivatives(lambda_um)?;
        let e = self.extraordinary.derivatives(lambda_um)?;
        let theta = theta_deg.to_radians();
        let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));

        // g = 1/n² and its λ-derivatives
        let term = |d: &IndexDerivatives| {
            let n2 = d.n * d.n;
            let g = 1.0 / n2;
            let dg = -2.0 * d.dn / (n2 * d.n);
            let d2g = 6.0 * d.dn * d.dn / (n2 * n2) - 2.0 * d.d2n / (n2 * d.n);
            (g, dg, d2g)
        };
        let (go, dgo, d2go) = term(&o);
        let (ge, dge, d2ge) = term(&e);
        let g = c2 * go + s2 * ge;
        let dg = c2 * dgo + s2 * dge;
        let d2g = c2 * d2go + s2 * d2ge;

        let n = g.powf(-0.5);
        let dn = -0.5 * g.powf(-1.5) * dg;
        let d2n = 0.75 * g.powf(-2.5) * dg * dg - 0.5 * g.powf(-1.5) * d2g;
        Ok(IndexDerivatives { n, dn, d2n })
    }

    pub fn index_derivatives(
        &self,
        lambda_um: f64,
        theta_deg: f64,
        polarization: Polarization,
    ) -> Result<IndexDerivatives> {
        match polarization {
            Polarization::Ordinary => self.ordinary.derivatives(lambda_um),
            Polarization::Pump | Polarization::Extraordinary => {
                self.extraordinary_derivatives(lambda_um, theta_deg)
            }
        }
    }

    /// Wave number k = 2πn/λ in rad/mm.
    pub fn wave_number(&self, lambda_um: f64, theta_deg: f64, polarization: Polarization) -> Result<f64> {
        let n = self.index_derivatives(lambda_um, theta_deg, polarization)?.n;
        Ok(2.0e3 * PI * n / lambda_um)
    }

    /// Phase mismatch k_p − k_o − k_e (rad/mm) for frequency-degenerate
    /// collinear type-II down-conversion of a `pump_um` pump.
    pub fn degenerate_mismatch(&self, pump_um: f64, theta_deg: f64) -> Result<f64> {
        let sub_um = 2.0 * pump_um;
        let kp = self.wave_number(pump_um, theta_deg, Polarization::Pump)?;
        let ko = self.wave_number(sub_um, theta_deg, Polarization::Ordinary)?;
        let ke = self.wave_number(sub_um, theta_deg, Polarization::Extraordinary)?;
        Ok(kp - ko - ke)
    }

    /// Cut angle (degrees) for frequency-degenerate collinear type-II phase
    /// matching, found by bisection on [0.1°, 89.9°].
    pub fn solve_degenerate_angle(&self, pump_um: f64) -> Result<f64> {
        let (mut lo, mut hi) = (0.1, 89.9);
        let mut f_lo = self.degenerate_mismatch(pump_um, lo)?;
        let f_hi = self.degenerate_mismatch(pump_um, hi)?;
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if f_lo.signum() == f_hi.signum() {
            return Err(Error::NoPhaseMatching { pump_um });
        }
        // bisect down to machine precision; the 1e-10 relative bracket is
        // reached after ~40 steps but the root residual keeps improving
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = self.degenerate_mismatch(pump_um, mid)?;
            if f_mid == 0.0 {
                return Ok(mid);
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// A crystal slab cut for type-II phase matching.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalSpec {
    pub material: UniaxialMaterial,
    pub length_mm: f64,
    /// Angle between the pump propagation direction and the optic axis.
    pub cut_angle_deg: f64,
}

/// Taylor coefficients of k(Ω) around a carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveDispersion {
    /// rad/ps
    pub carrier: f64,
    pub polarization: Polarization,
    /// rad/mm
    pub k0: f64,
    /// Inverse group velocity, ps/mm.
    pub k1: f64,
    /// Group-velocity dispersion, ps²/mm.
    pub k2: f64,
}

impl CrystalSpec {
    pub fn new(material: UniaxialMaterial, length_mm: f64, cut_angle_deg: f64) -> Result<Self> {
        if !(length_mm > 0.0 && length_mm.is_finite()) {
            return Err(invalid("length_mm", format!("{length_mm} must be positive")));
        }
        if !(cut_angle_deg > 0.0 && cut_angle_deg < 90.0) {
            return Err(invalid(
                "cut_angle_deg",
                format!("{cut_angle_deg} must lie strictly between 0° and 90°"),
            ));
        }
        Ok(Self {
            material,
            length_mm,
            cut_angle_deg,
        })
    }

    /// Crystal cut at the degenerate type-II angle for the given pump.
    pub fn phase_matched(material: UniaxialMaterial, length_mm: f64, pump_um: f64) -> Result<Self> {
        let angle = material.solve_degenerate_angle(pump_um)?;
        Self::new(material, length_mm, angle)
    }

    /// k, k′ and k″ of one wave at `carrier` (rad/ps), using analytic
    /// Sellmeier derivatives: k′ = (n − λ n_λ)/c, k″ = λ³ n_λλ / (2π c²).
    pub fn group_quantities(&self, carrier: f64, polarization: Polarization) -> Result<WaveDispersion> {
        if !(carrier > 0.0 && carrier.is_finite()) {
            return Err(invalid("carrier", format!("{carrier} rad/ps must be positive")));
        }
        let lambda_um = wavelength_um(carrier);
        let d = self
            .material
            .index_derivatives(lambda_um, self.cut_angle_deg, polarization)?;
        let c = SPEED_OF_LIGHT_UM_PER_PS;
        let k0 = 2.0 * PI * d.n / lambda_um;
        let k1 = (d.n - lambda_um * d.dn) / c;
        let k2 = lambda_um.powi(3) * d.d2n / (2.0 * PI * c * c);
        // per µm → per mm
        Ok(WaveDispersion {
            carrier,
            polarization,
            k0: k0 * 1.0e3,
            k1: k1 * 1.0e3,
            k2: k2 * 1.0e3,
        })
    }

    /// Wave number (rad/mm) at an arbitrary angular frequency; the
    /// finite-difference reference for [`Self::group_quantities`].
    pub fn wave_number_at(&self, omega: f64, polarization: Polarization) -> Result<f64> {
        self.material
            .wave_number(wavelength_um(omega), self.cut_angle_deg, polarization)
    }
}

/// A Gaussian pulse characterised by its intensity standard deviations in
/// time and frequency and its chirp coefficient C (ps²). A transform-limited
/// pulse has `chirp = ∞` and σ·Δt = 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpedPulse {
    pub duration: f64,
    pub chirp: f64,
    pub bandwidth: f64,
}

/// Outcome of the Fraunhofer-limit test for a dispersive element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FraunhoferCheck {
    pub satisfied: bool,
    /// (D₁+D₂)² · 4σ₁⁴, to be compared against the safety factor.
    pub ratio: f64,
    /// 1/4σ₁⁴ in ps⁴.
    pub threshold: f64,
}

impl ChirpedPulse {
    pub fn transform_limited(duration: f64) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(invalid("duration", format!("{duration} ps must be positive")));
        }
        Ok(Self {
            duration,
            chirp: f64::INFINITY,
            bandwidth: 0.5 / duration,
        })
    }

    /// Pulse of given duration and chirp; the bandwidth follows from
    /// Δt₀ = Δt₁(1 + 4Δt₁⁴/C₁²)^{-1/2}.
    pub fn new(duration: f64, chirp: f64) -> Result<Self> {
        let tl = Self::transform_limited(duration)?;
        if chirp.is_infinite() {
            return Ok(tl);
        }
        if chirp == 0.0 || chirp.is_nan() {
            return Err(invalid("chirp", "must be nonzero (use ∞ for no chirp)"));
        }
        let r = 4.0 * duration.powi(4) / (chirp * chirp);
        let duration_tl = duration / (1.0 + r).sqrt();
        Ok(Self {
            duration,
            chirp,
            bandwidth: 0.5 / duration_tl,
        })
    }

    /// Duration of the transform-limited pulse with the same spectrum.
    pub fn transform_limited_duration(&self) -> f64 {
        0.5 / self.bandwidth
    }

    /// GDD already accumulated relative to the transform-limited pulse,
    /// D = C(1 + C²/4Δt⁴)^{-1}.
    pub fn accumulated_gdd(&self) -> f64 {
        if self.chirp.is_infinite() {
            return 0.0;
        }
        self.chirp / (1.0 + self.chirp * self.chirp / (4.0 * self.duration.powi(4)))
    }

    /// Propagates through a medium of group-delay dispersion `gdd` (ps²).
    /// The spectrum is unchanged.
    pub fn propagate(&self, gdd: f64) -> Self {
        let total = self.accumulated_gdd() + gdd;
        let t0 = self.transform_limited_duration();
        if total == 0.0 {
            return Self {
                duration: t0,
                chirp: f64::INFINITY,
                bandwidth: self.bandwidth,
            };
        }
        Self {
            duration: (t0 * t0 + total * total / (4.0 * t0 * t0)).sqrt(),
            chirp: total + 4.0 * t0.powi(4) / total,
            bandwidth: self.bandwidth,
        }
    }

    /// Fraunhofer-limit condition (D₁+D₂)² ≫ 1/4σ₁⁴, evaluated from the
    /// pulse's duration and chirp and with "≫" meaning "exceeds `safety`×".
    pub fn fraunhofer(&self, total_gdd: f64, safety: f64) -> FraunhoferCheck {
        let dt4 = self.duration.powi(4);
        let threshold = if self.chirp.is_infinite() {
            4.0 * dt4
        } else {
            4.0 * dt4 / (1.0 + 4.0 * dt4 / (self.chirp * self.chirp)).powi(2)
        };
        let ratio = total_gdd * total_gdd / threshold;
        FraunhoferCheck {
            satisfied: ratio > safety,
            ratio,
            threshold,
        }
    }
}
