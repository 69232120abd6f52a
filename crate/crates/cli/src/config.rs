//! TOML run configuration and its resolution into library objects.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use timelens_core::dispersion::{CrystalSpec, SellmeierPole, SellmeierSet, UniaxialMaterial};
use timelens_core::hom::DimensionlessParams;
use timelens_core::lens::{Realization, TimeLensSpec};
use timelens_core::oracle::Tolerances;
use timelens_core::source::{PhaseMatching, PumpSpec, SourceModel};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub crystal: CrystalSection,
    pub pump: PumpSection,
    #[serde(default)]
    pub lens: LensSection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub material: Option<String>,
    pub sellmeier: Option<SellmeierSection>,
    pub length_mm: f64,
    /// Omitted: solve for degenerate type-II phase matching.
    pub cut_angle_deg: Option<f64>,
    #[serde(default = "one")]
    pub coupling: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierSection {
    #[serde(default = "custom_name")]
    pub name: String,
    pub ordinary: SellmeierTerms,
    pub extraordinary: SellmeierTerms,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierTerms {
    pub constant: f64,
    /// [strength, resonance µm²] pairs.
    #[serde(default)]
    pub poles: Vec<[f64; 2]>,
    #[serde(default)]
    pub infrared: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub wavelength_nm: f64,
    pub bandwidth_nm: Option<f64>,
    pub duration_ps: Option<f64>,
    #[serde(default)]
    pub t0: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MagnificationSetting {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LensSection {
    #[serde(default = "ideal")]
    pub realization: String,
    #[serde(default = "optimal")]
    pub magnification: MagnificationSetting,
    /// Dimensionless D = 2Ω_p²D_f (ideal lens only).
    pub d: Option<f64>,
    /// Focal GDD in ps² (ideal lens only).
    pub focal_gdd: Option<f64>,
    #[serde(default)]
    pub delta_t: f64,
    pub theta_max: Option<f64>,
    pub f_rf_ghz: Option<f64>,
    pub aperture_ps: Option<f64>,
    pub tau0: Option<f64>,
    pub pump_gdd: Option<f64>,
    #[serde(default)]
    pub output_delay: f64,
    /// Factor standing in for "much greater than" in the aperture bounds.
    pub safety_factor: Option<f64>,
}

impl Default for LensSection {
    fn default() -> Self {
        Self {
            realization: ideal(),
            magnification: optimal(),
            d: Some(10.0),
            focal_gdd: None,
            delta_t: 0.0,
            theta_max: None,
            f_rf_ghz: None,
            aperture_ps: None,
            tau0: None,
            pump_gdd: None,
            output_delay: 0.0,
            safety_factor: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Range {
    pub const fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.points == 0 {
            bail!("{name}: points must be at least 1");
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            bail!("{name}: min and max must be finite");
        }
        if self.points > 1 && !(self.max > self.min) {
            bail!("{name}: range [{}, {}] is empty", self.min, self.max);
        }
        Ok(())
    }

    /// Evenly spaced samples; a single point sits at `min`.
    pub fn samples(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.min + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// δτ axis of the HOM curves, in units of 1/σ_cw.
    #[serde(default = "default_delta_tau")]
    pub delta_tau: Range,
    /// Extra lens D values drawn alongside the configured lens.
    #[serde(default)]
    pub hom_d: Vec<f64>,
    #[serde(default = "default_magnification")]
    pub magnification: Range,
    #[serde(default = "default_scan_d")]
    pub d_values: Vec<f64>,
    #[serde(default)]
    pub surface: SurfaceSection,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            delta_tau: default_delta_tau(),
            hom_d: Vec::new(),
            magnification: default_magnification(),
            d_values: default_scan_d(),
            surface: SurfaceSection::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSection {
    #[serde(default = "ten")]
    pub d: f64,
    #[serde(default = "surface_m")]
    pub magnification: f64,
    /// ps
    #[serde(default = "default_surface_dt")]
    pub delta_t: Range,
    /// ps
    #[serde(default = "default_surface_dtau")]
    pub delta_tau: Range,
}

impl Default for SurfaceSection {
    fn default() -> Self {
        Self {
            d: ten(),
            magnification: surface_m(),
            delta_t: default_surface_dt(),
            delta_tau: default_surface_dtau(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_grid_points")]
    pub points: usize,
    #[serde(default = "six")]
    pub half_width_sigmas: f64,
    #[serde(default = "gaussian")]
    pub phase_matching: String,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            points: default_grid_points(),
            half_width_sigmas: six(),
            phase_matching: gaussian(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Per-quantity tolerances; may only be tighter than the defaults.
    #[serde(default)]
    pub tolerances: std::collections::BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: default_out() }
    }
}

fn one() -> f64 {
    1.0
}
fn six() -> f64 {
    6.0
}
fn ten() -> f64 {
    10.0
}
fn surface_m() -> f64 {
    -2.1
}
fn ideal() -> String {
    "ideal".into()
}
fn gaussian() -> String {
    "gaussian".into()
}
fn custom_name() -> String {
    "custom".into()
}
fn optimal() -> MagnificationSetting {
    MagnificationSetting::Keyword("optimal".into())
}
fn default_delta_tau() -> Range {
    Range::new(-3.0, 3.0, 241)
}
fn default_magnification() -> Range {
    Range::new(1.0, 4.0, 61)
}
fn default_scan_d() -> Vec<f64> {
    vec![0.5, 1.23, 10.0]
}
fn default_surface_dt() -> Range {
    Range::new(-1.0, 1.0, 81)
}
fn default_surface_dtau() -> Range {
    Range::new(-4.0, 4.0, 81)
}
fn default_grid_points() -> usize {
    257
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Everything a command needs, built and validated once.
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: RunConfig,
    pub crystal: CrystalSpec,
    pub pump: PumpSpec,
    pub model: SourceModel,
    pub lens: TimeLensSpec,
    pub mode: PhaseMatching,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| anyhow::anyhow!("{e}"))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn material(&self) -> Result<UniaxialMaterial> {
        let c = &self.crystal;
        match (&c.material, &c.sellmeier) {
            (Some(name), None) => UniaxialMaterial::named(name)
                .with_context(|| format!("crystal.material: unknown material `{name}` (built in: bbo)")),
            (None, Some(s)) => {
                let set = |t: &SellmeierTerms| {
                    let poles = t
                        .poles
                        .iter()
                        .map(|&[strength, resonance_um2]| SellmeierPole {
                            strength,
                            resonance_um2,
                        })
                        .collect();
                    SellmeierSet::new(t.constant, poles, t.infrared)
                };
                Ok(UniaxialMaterial {
                    name: s.name.clone(),
                    ordinary: set(&s.ordinary),
                    extraordinary: set(&s.extraordinary),
                })
            }
            _ => bail!("crystal: give exactly one of `material` or `sellmeier`"),
        }
    }

    pub fn pump_spec(&self) -> Result<PumpSpec> {
        let p = &self.pump;
        let spec = match (p.bandwidth_nm, p.duration_ps) {
            (Some(bw), None) => PumpSpec::from_bandwidth(p.wavelength_nm, bw),
            (None, Some(tau)) => PumpSpec::from_duration(p.wavelength_nm, tau),
            _ => bail!("pump: give exactly one of `bandwidth_nm` or `duration_ps`"),
        }
        .context("pump")?;
        Ok(PumpSpec {
            t0: p.t0,
            amplitude: p.amplitude,
            ..spec
        })
    }

    pub fn phase_matching(&self) -> Result<PhaseMatching> {
        match self.grid.phase_matching.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(PhaseMatching::Gaussian),
            "sinc" | "exact" | "exact-sinc" => Ok(PhaseMatching::ExactSinc),
            other => bail!("grid.phase_matching: `{other}` is not one of gaussian, sinc"),
        }
    }

    /// Resolve the lens section against a source model.
    pub fn lens_spec(&self, model: &SourceModel) -> Result<TimeLensSpec> {
        let l = &self.lens;
        let magnification = match &l.magnification {
            MagnificationSetting::Value(m) => *m,
            MagnificationSetting::Keyword(k) => {
                let m_opt = DimensionlessParams::with_d(model, 1.0, 1.0)?
                .optimal_magnification();
                match k.as_str() {
                    "optimal" | "+optimal" => m_opt,
                    "-optimal" => -m_opt,
                    other => bail!("lens.magnification: expected a number, \"optimal\" or \"-optimal\", got `{other}`"),
                }
            }
        };
        let need = |v: Option<f64>, key: &str| v.with_context(|| format!("lens.{key} is required for `{}`", l.realization));
        let realization = match l.realization.to_ascii_lowercase().as_str() {
            "ideal" => {
                let focal_gdd = match (l.d, l.focal_gdd) {
                    (Some(d), None) => d / (2.0 * model.omega_p * model.omega_p),
                    (None, Some(f)) => f,
                    _ => bail!("lens: give exactly one of `d` or `focal_gdd` for an ideal lens"),
                };
                Realization::Ideal { focal_gdd }
            }
            "eopm" => match (l.f_rf_ghz, l.aperture_ps) {
                (Some(f), None) => Realization::Eopm {
                    theta_max: need(l.theta_max, "theta_max")?,
                    f_rf_ghz: f,
                },
                (None, Some(t)) => Realization::EopmWindow {
                    theta_max: need(l.theta_max, "theta_max")?,
                    aperture_ps: t,
                },
                _ => bail!("lens: give exactly one of `f_rf_ghz` or `aperture_ps` for an eopm lens"),
            },
            "fwm" => Realization::Fwm {
                tau0: need(l.tau0, "tau0")?,
                pump_gdd: need(l.pump_gdd, "pump_gdd")?,
            },
            other => bail!("lens.realization: `{other}` is not one of ideal, eopm, fwm"),
        };
        if l.realization != "ideal" && (l.d.is_some() || l.focal_gdd.is_some()) {
            bail!("lens: `d`/`focal_gdd` only apply to an ideal lens; the {} lens derives D_f", l.realization);
        }
        let mut spec = TimeLensSpec::from_realization(realization, magnification, l.delta_t).context("lens")?;
        spec.output_delay = l.output_delay;
        Ok(spec)
    }

    pub fn tolerances(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        for (name, value) in &self.verify.tolerances {
            t.tighten(name, *value).context("verify.tolerances")?;
        }
        Ok(t)
    }

    fn validate_scans(&self) -> Result<()> {
        let s = &self.scan;
        s.delta_tau.validate("scan.delta_tau")?;
        s.magnification.validate("scan.magnification")?;
        s.surface.delta_t.validate("scan.surface.delta_t")?;
        s.surface.delta_tau.validate("scan.surface.delta_tau")?;
        if s.magnification.min <= 0.0 {
            bail!("scan.magnification: |M| values must be positive");
        }
        if s.d_values.is_empty() {
            bail!("scan.d_values: list is empty");
        }
        for &d in s.d_values.iter().chain(&s.hom_d).chain(std::iter::once(&s.surface.d)) {
            if !(d > 0.0 && d.is_finite()) {
                bail!("scan: D = {d} must be positive and finite");
            }
        }
        if !(s.surface.magnification != 0.0 && s.surface.magnification.is_finite()) {
            bail!("scan.surface.magnification must be finite and nonzero");
        }
        Ok(())
    }

    /// Build every library object, reporting the first problem found.
    pub fn resolve(self) -> Result<Setup> {
        self.validate_scans()?;
        let material = self.material()?;
        let pump = self.pump_spec()?;
        let c = &self.crystal;
        let crystal = match c.cut_angle_deg {
            Some(theta) => CrystalSpec::new(material, c.length_mm, theta),
            None => CrystalSpec::phase_matched(material, c.length_mm, pump.wavelength_um()),
        }
        .context("crystal")?;
        let model = SourceModel::from_crystal(&crystal, &pump, c.coupling)?;
        let lens = self.lens_spec(&model)?;
        let mode = self.phase_matching()?;
        let tolerances = self.tolerances()?;
        if self.grid.points < 33 || self.grid.points % 2 == 0 {
            bail!("grid.points: {} must be odd and at least 33", self.grid.points);
        }
        if !(self.grid.half_width_sigmas >= 4.0) {
            bail!("grid.half_width_sigmas: {} must be at least 4", self.grid.half_width_sigmas);
        }
        Ok(Setup {
            config: self,
            crystal,
            pump,
            model,
            lens,
            mode,
            tolerances,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BBO: &str = r#"
[crystal]
material = "bbo"
length_mm = 20.0

[pump]
wavelength_nm = 405.0
bandwidth_nm = 0.2
"#;

    #[test]
    fn defaults_resolve() {
        let s = RunConfig::from_toml(BBO).unwrap().resolve().unwrap();
        assert!((s.lens.magnification - 2.1032).abs() < 1e-3);
        assert!((s.crystal.cut_angle_deg - 41.42).abs() < 0.15);
    }

    #[test]
    fn pump_width_must_be_unique() {
        let text = BBO.replace("bandwidth_nm = 0.2", "bandwidth_nm = 0.2\nduration_ps = 1.2");
        let err = RunConfig::from_toml(&text).unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("exactly one"), "{err}");
    }

    #[test]
    fn unknown_keys_report_position() {
        let text = BBO.replace("length_mm", "lenght_mm");
        let err = RunConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn single_point_range() {
        assert_eq!(Range::new(2.0, 2.0, 1).samples(), vec![2.0]);
        assert!(Range::new(2.0, 1.0, 5).validate("x").is_err());
    }
}
