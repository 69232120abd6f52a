//! Hong-Ou-Mandel interference behind a single time lens.

use std::f64::consts::SQRT_2;
use std::io::{self, Write};

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::source::SourceModel;

/// Condition number above which Λ counts as singular.
pub const LAMBDA_CONDITION_LIMIT: f64 = 1e13;

/// Dimensionless parameters: T_µ = √2Ω_pτ_µ/σ_s, D = 2Ω_p²D_f.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    pub t_o: f64,
    pub t_e: f64,
    pub d: f64,
    pub m: f64,
    pub omega_p: f64,
    pub sigma_cw: f64,
    /// Focal GDD, ps².
    pub d_f: f64,
}

impl DimensionlessParams {
    pub fn new(model: &SourceModel, focal_gdd: f64, magnification: f64) -> Result<Self> {
        model.validate()?;
        let scale = SQRT_2 * model.omega_p / model.sigma_s;
        Self::from_parts(
            scale * model.tau_o,
            scale * model.tau_e,
            2.0 * model.omega_p * model.omega_p * focal_gdd,
            magnification,
            model.omega_p,
        )
    }

    /// Same, with the focal GDD given in the dimensionless form D.
    pub fn with_d(model: &SourceModel, d: f64, magnification: f64) -> Result<Self> {
        Self::new(model, d / (2.0 * model.omega_p * model.omega_p), magnification)
    }

    /// From dimensionless delays directly; σ_cw = Ω_p/|T_e − T_o|.
    pub fn from_parts(t_o: f64, t_e: f64, d: f64, m: f64, omega_p: f64) -> Result<Self> {
        if !(omega_p > 0.0 && omega_p.is_finite()) {
            return Err(invalid("omega_p", format!("{omega_p} must be positive")));
        }
        if !(t_o.is_finite() && t_e.is_finite()) {
            return Err(invalid("T", "dimensionless delays must be finite"));
        }
        if (t_e - t_o).abs() <= 1e-12 * t_o.abs().max(t_e.abs()) || t_o == t_e {
            return Err(Error::DegenerateSource {
                tau_ps: t_o / (SQRT_2 * omega_p),
            });
        }
        if !(m != 0.0 && m.is_finite()) {
            return Err(invalid("magnification", format!("{m} must be finite and nonzero")));
        }
        if !(d != 0.0 && d.is_finite()) {
            return Err(invalid("focal GDD", format!("D = {d} must be finite and nonzero")));
        }
        Ok(Self {
            t_o,
            t_e,
            d,
            m,
            omega_p,
            sigma_cw: omega_p / (t_e - t_o).abs(),
            d_f: d / (2.0 * omega_p * omega_p),
        })
    }

    pub fn with_magnification(mut self, m: f64) -> Result<Self> {
        Self::from_parts(self.t_o, self.t_e, self.d, m, self.omega_p).map(|p| {
            self = p;
            self
        })
    }

    pub fn delay_gap(&self) -> f64 {
        self.t_e - self.t_o
    }

    /// F₊ and F₋.
    pub fn f_pm(&self) -> (f64, f64) {
        let (m, d) = (self.m, self.d);
        let g2 = self.delay_gap().powi(2);
        let f = |s: f64| d * d * ((1.0 + s * m).powi(2) + (self.t_e + s * m * self.t_o).powi(2)) / (m * m * g2);
        (f(1.0), f(-1.0))
    }

    /// Positive optimal magnification √((1+T_e²)/(1+T_o²)); its negative
    /// is equally optimal.
    pub fn optimal_magnification(&self) -> f64 {
        ((1.0 + self.t_e * self.t_e) / (1.0 + self.t_o * self.t_o)).sqrt()
    }
}

/// The complex symmetric 4×4 matrix Λ of the quadruple Gaussian integral.
pub fn lambda_matrix(p: &DimensionlessParams) -> Matrix4<Complex64> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let a = 1.0 + p.t_o * p.t_o;
    let b = 1.0 + p.t_o * p.t_e;
    let e = 1.0 + p.t_e * p.t_e;
    let (d, m) = (p.d, p.m);
    let z = c(0.0, 0.0);
    let lam = Matrix4::new(
        c(a, -d / m), c(b, 0.0), z, c(0.0, d),
        c(b, 0.0), c(e, d * m), c(0.0, -d), z,
        z, c(0.0, -d), c(a, d / m), c(b, 0.0),
        c(0.0, d), z, c(b, 0.0), c(e, -d * m),
    );
    lam.unscale(2.0 * p.omega_p * p.omega_p)
}

/// Shift vector v = (δt, δt − δτ, −δt, δτ − δt).
pub fn shift_vector(delta_t: f64, delta_tau: f64) -> Vector4<f64> {
    Vector4::new(delta_t, delta_t - delta_tau, -delta_t, delta_tau - delta_t)
}

/// Reduced quadratic form Γ (ps⁻²) with its scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaForm {
    pub nu: f64,
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub det_lambda: f64,
    pub f_plus: f64,
    pub f_minus: f64,
    /// Largest |Im| of the numeric Γ and det Λ relative to their real
    /// parts; zero for the closed form.
    pub imag_residual: f64,
}

impl GammaForm {
    /// Explicit formulas.
    pub fn closed(p: &DimensionlessParams) -> Self {
        let (fp, fm) = p.f_pm();
        let (m, d) = (p.m, p.d);
        let gap = p.delay_gap();
        let op2 = p.omega_p * p.omega_p;
        let det = gap.powi(4) / (16.0 * op2.powi(4)) * (1.0 + m * m * fp * fm / (d * d));
        let nu = gap * gap / (4.0 * op2.powi(3) * det);
        Self {
            nu,
            g11: nu * (1.0 + p.t_e * p.t_e + m * m * fp),
            g12: -nu * (1.0 + p.t_e * p.t_o + m * fp),
            g22: nu * (1.0 + p.t_o * p.t_o + fp),
            det_lambda: det,
            f_plus: fp,
            f_minus: fm,
            imag_residual: 0.0,
        }
    }

    /// Γ = Π₁₁ − Π₁₂ − Π₂₁ + Π₂₂ from the numeric inverse Π = Λ⁻¹.
    pub fn numeric(p: &DimensionlessParams) -> Result<Self> {
        let lam = lambda_matrix(p);
        let sv = lam.singular_values();
        let cond = sv.max() / sv.min();
        if !(cond.is_finite() && cond < LAMBDA_CONDITION_LIMIT) {
            return Err(Error::SingularLambda { condition: cond });
        }
        let lu = lam.lu();
        let det = lu.determinant();
        let pi = lu.try_inverse().ok_or(Error::SingularLambda { condition: cond })?;
        let blk = |i: usize, j: usize| pi[(i, j)] - pi[(i, j + 2)] - pi[(i + 2, j)] + pi[(i + 2, j + 2)];
        let (g11, g12, g21, g22) = (blk(0, 0), blk(0, 1), blk(1, 0), blk(1, 1));
        let scale = g11.re.abs().max(g22.re.abs());
        let residual = [g11.im, g12.im, g21.im, g22.im]
            .iter()
            .map(|v| v.abs() / scale)
            .fold(det.im.abs() / det.re.abs(), f64::max);
        let (fp, fm) = p.f_pm();
        let gap = p.delay_gap();
        let op2 = p.omega_p * p.omega_p;
        let g = Self {
            nu: gap * gap / (4.0 * op2.powi(3) * det.re),
            g11: g11.re,
            g12: 0.5 * (g12.re + g21.re),
            g22: g22.re,
            det_lambda: det.re,
            f_plus: fp,
            f_minus: fm,
            imag_residual: residual,
        };
        debug_assert!(
            g.agrees_with(&Self::closed(p), 1e-6),
            "numeric Γ {g:?} disagrees with closed form {:?}",
            Self::closed(p)
        );
        Ok(g)
    }

    /// Largest relative difference of Γ entries and det Λ.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let scale = self.g11.abs().max(self.g22.abs());
        let dg = [
            (self.g11 - other.g11).abs(),
            (self.g12 - other.g12).abs(),
            (self.g22 - other.g22).abs(),
        ]
        .iter()
        .fold(0.0f64, |a, &b| a.max(b))
            / scale;
        dg.max((self.det_lambda - other.det_lambda).abs() / self.det_lambda.abs())
    }

    pub fn agrees_with(&self, other: &Self, tol: f64) -> bool {
        self.rel_diff(other) <= tol
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        let tr = self.g11 + self.g22;
        let det = self.g11 * self.g22 - self.g12 * self.g12;
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        let hi = 0.5 * tr + disc;
        (det / hi, hi)
    }

    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }
}

/// Γ by the runtime default path.
pub fn gamma(p: &DimensionlessParams) -> Result<GammaForm> {
    GammaForm::numeric(p)
}

/// Peak value |T_e − T_o||D_f|/(Ω_p²√det Λ).
pub fn prefactor(p: &DimensionlessParams, g: &GammaForm) -> f64 {
    p.delay_gap().abs() * p.d_f.abs() / (p.omega_p * p.omega_p * g.det_lambda.sqrt())
}

/// Interference probability for a precomputed Γ.
pub fn p_int_with(p: &DimensionlessParams, g: &GammaForm, delta_t: f64, delta_tau: f64) -> f64 {
    let w1 = delta_t;
    let w2 = delta_t - delta_tau;
    let q = g.g11 * w1 * w1 + 2.0 * g.g12 * w1 * w2 + g.g22 * w2 * w2;
    prefactor(p, g) * (-0.5 * q).exp()
}

/// Conditional probability of destructive interference p_int(δt, δτ).
pub fn p_int(p: &DimensionlessParams, delta_t: f64, delta_tau: f64) -> Result<f64> {
    Ok(p_int_with(p, &gamma(p)?, delta_t, delta_tau))
}

/// Delay of the coincidence minimum, (1 + Γ₁₂/Γ₂₂)δt.
pub fn dip_location_with(g: &GammaForm, delta_t: f64) -> f64 {
    (1.0 + g.g12 / g.g22) * delta_t
}

pub fn dip_location(p: &DimensionlessParams, delta_t: f64) -> Result<f64> {
    Ok(dip_location_with(&gamma(p)?, delta_t))
}

/// Decay rate γ of the visibility in δt²: V = V(0)·e^{−γδt²}.
pub fn sync_decay(p: &DimensionlessParams) -> f64 {
    let (fp, _) = p.f_pm();
    2.0 * p.omega_p * p.omega_p / (1.0 + p.t_o * p.t_o + fp)
}

pub fn visibility_with(p: &DimensionlessParams, g: &GammaForm, delta_t: f64) -> f64 {
    prefactor(p, g) * (-sync_decay(p) * delta_t * delta_t).exp()
}

/// HOM visibility, the dip depth at δτ_min.
pub fn visibility(p: &DimensionlessParams, delta_t: f64) -> Result<f64> {
    Ok(visibility_with(p, &gamma(p)?, delta_t))
}

/// Best perfect-synchronization visibility 2D/√((T_e−T_o)² + 4D²).
pub fn optimal_visibility(p: &DimensionlessParams) -> f64 {
    2.0 * p.d.abs() / (p.delay_gap().powi(2) + 4.0 * p.d * p.d).sqrt()
}

/// Lensless probability 2/√(4+(T_e+T_o)²)·e^{−2σ_cw²δτ²}.
pub fn lensless_p_int(p: &DimensionlessParams, delta_tau: f64) -> f64 {
    let s = p.t_e + p.t_o;
    2.0 / (4.0 + s * s).sqrt() * (-2.0 * p.sigma_cw * p.sigma_cw * delta_tau * delta_tau).exp()
}

/// CW-limit probability e^{−2σ_cw²δτ²}.
pub fn cw_p_int(sigma_cw: f64, delta_tau: f64) -> f64 {
    (-2.0 * sigma_cw * sigma_cw * delta_tau * delta_tau).exp()
}

/// (τ_cw, τ_pulsed) = (0.5/σ_cw, Γ₂₂^{−1/2}).
pub fn correlation_times(p: &DimensionlessParams) -> Result<(f64, f64)> {
    let g = gamma(p)?;
    Ok((0.5 / p.sigma_cw, g.g22.powf(-0.5)))
}

/// Sampled coincidence curve at fixed δt.
#[derive(Debug, Clone, PartialEq)]
pub struct HomCurve {
    pub delta_t: f64,
    pub delta_tau: Vec<f64>,
    pub p_int: Vec<f64>,
    pub normalized_rate: Vec<f64>,
    pub delta_tau_min: f64,
    pub visibility: f64,
}

impl HomCurve {
    /// Curve from any p_int(δτ) with given dip metadata.
    pub fn from_fn(
        delta_t: f64,
        delta_tau: &[f64],
        delta_tau_min: f64,
        visibility: f64,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if delta_tau.is_empty() {
            return Err(Error::Empty("delay grid"));
        }
        let p: Vec<f64> = delta_tau.iter().map(|&x| f(x)).collect();
        Ok(Self {
            delta_t,
            delta_tau: delta_tau.to_vec(),
            normalized_rate: p.iter().map(|v| 1.0 - v).collect(),
            p_int: p,
            delta_tau_min,
            visibility,
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "delta_tau_ps,p_int,normalized_rate")?;
        for i in 0..self.delta_tau.len() {
            writeln!(w, "{},{},{}", self.delta_tau[i], self.p_int[i], self.normalized_rate[i])?;
        }
        Ok(())
    }
}

/// Coincidence curve over a δτ grid at fixed δt.
pub fn hom_scan(p: &DimensionlessParams, delta_t: f64, delta_tau: &[f64]) -> Result<HomCurve> {
    let g = gamma(p)?;
    HomCurve::from_fn(
        delta_t,
        delta_tau,
        dip_location_with(&g, delta_t),
        visibility_with(p, &g, delta_t),
        |x| p_int_with(p, &g, delta_t, x),
    )
}

/// Coincidence surface over (δt, δτ).
#[derive(Debug, Clone, PartialEq)]
pub struct HomSurface {
    pub delta_t: Vec<f64>,
    pub delta_tau: Vec<f64>,
    /// Row-major, δt along rows.
    pub p_int: Vec<f64>,
}

impl HomSurface {
    pub fn argmin(&self) -> (f64, f64) {
        let (k, _) = self
            .p_int
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("surface is nonempty");
        let n = self.delta_tau.len();
        (self.delta_t[k / n], self.delta_tau[k % n])
    }

    /// Long form: delta_t_ps,delta_tau_ps,p_int,normalized_rate.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "delta_t_ps,delta_tau_ps,p_int,normalized_rate")?;
        let n = self.delta_tau.len();
        for (k, v) in self.p_int.iter().enumerate() {
            writeln!(w, "{},{},{},{}", self.delta_t[k / n], self.delta_tau[k % n], v, 1.0 - v)?;
        }
        Ok(())
    }
}

pub fn hom_surface(p: &DimensionlessParams, delta_t: &[f64], delta_tau: &[f64]) -> Result<HomSurface> {
    if delta_t.is_empty() || delta_tau.is_empty() {
        return Err(Error::Empty("delay grid"));
    }
    let g = gamma(p)?;
    let mut out = Vec::with_capacity(delta_t.len() * delta_tau.len());
    for &dt in delta_t {
        out.extend(delta_tau.iter().map(|&x| p_int_with(p, &g, dt, x)));
    }
    Ok(HomSurface {
        delta_t: delta_t.to_vec(),
        delta_tau: delta_tau.to_vec(),
        p_int: out,
    })
}

/// Perfect-synchronization visibility at each magnification.
pub fn visibility_vs_magnification(p: &DimensionlessParams, magnifications: &[f64]) -> Result<Vec<f64>> {
    if magnifications.is_empty() {
        return Err(Error::Empty("magnification grid"));
    }
    magnifications
        .iter()
        .map(|&m| visibility(&p.with_magnification(m)?, 0.0))
        .collect()
}
