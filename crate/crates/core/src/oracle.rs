//! Brute-force quadrature of the model integrals, used to check every
//! closed form.
//!
//! All sums run over uniform tensor grids in a fixed order, so results are
//! bitwise reproducible with or without the `parallel` feature.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::io::{self, Write};

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::{moments, Axis};
use crate::hom::{self, lambda_matrix, shift_vector, DimensionlessParams, GammaForm};
use crate::lens::{post_lens_sigma_o, PostLensForm, TimeLensSpec, TransferFunction};
use crate::source::{GridSpec, JsaGrid, PhaseMatching, Photon, SourceModel};

/// Aliasing copies are only compared against values above this fraction
/// of the integrand's peak.
const ALIAS_FLOOR: f64 = 1e-6;

/// Uniform tensor-grid quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Points per axis; odd so that zero is a node.
    pub points: usize,
    /// Half-width per axis in units of that axis' amplitude width √2σ_µ.
    pub half_width: f64,
    /// Largest accepted Poisson-summation aliasing estimate.
    pub alias_limit: f64,
    /// Raise `points` until the aliasing estimate passes.
    pub auto_refine: bool,
    pub max_points: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            points: 257,
            half_width: 6.0,
            alias_limit: 1e-10,
            auto_refine: true,
            max_points: 4097,
        }
    }
}

impl QuadratureSpec {
    pub fn with_points(points: usize) -> Self {
        Self {
            points,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 33 || self.points % 2 == 0 {
            return Err(invalid("points", format!("{} must be odd and at least 33", self.points)));
        }
        if !(self.half_width >= 4.0 && self.half_width.is_finite()) {
            return Err(invalid("half_width", format!("{} must be at least 4", self.half_width)));
        }
        if !(self.alias_limit > 0.0) {
            return Err(invalid("alias_limit", format!("{} must be positive", self.alias_limit)));
        }
        Ok(())
    }

    fn next_points(n: usize) -> usize {
        let m = n + n / 4;
        m + 1 - m % 2
    }

    /// Ordinary and extraordinary axes for a model.
    pub fn axes(&self, model: &SourceModel, points: usize) -> Result<(Axis, Axis)> {
        let (so, se) = model.spectral_sigmas();
        Ok((
            Axis::symmetric(self.half_width * SQRT_2 * so, points)?,
            Axis::symmetric(self.half_width * SQRT_2 * se, points)?,
        ))
    }
}

/// Summation strategy for the quadruple sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summation {
    /// O(N³) via G = Fᵀ·A.
    Factorized,
    /// Direct O(N⁴) reference.
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PintNumeric {
    pub value: f64,
    pub imag: f64,
    pub points: usize,
    pub alias_estimate: f64,
}

/// Poisson-summation aliasing estimate for the Gaussian-model quadruple
/// integrand: the largest shifted copy e^{−(v+k)ᵀΠ(v+k)/2} relative to the
/// true value, over dual-lattice shifts k ≠ 0 with |k_i| ≤ 3.
pub fn alias_estimate_4d(pi: &Matrix4<Complex64>, v: &Vector4<f64>, h_o: f64, h_e: f64) -> f64 {
    let re_q = |x: &Vector4<f64>| -> f64 {
        let xc = x.map(|t| Complex64::new(t, 0.0));
        (xc.transpose() * pi * xc)[(0, 0)].re
    };
    let base = (-0.5 * re_q(v)).exp().max(ALIAS_FLOOR);
    let step = [2.0 * PI / h_o, 2.0 * PI / h_e, 2.0 * PI / h_o, 2.0 * PI / h_e];
    let mut worst = 0.0f64;
    for k0 in -3i32..=3 {
        for k1 in -3i32..=3 {
            for k2 in -3i32..=3 {
                for k3 in -3i32..=3 {
                    if k0 == 0 && k1 == 0 && k2 == 0 && k3 == 0 {
                        continue;
                    }
                    let k = Vector4::new(
                        v[0] + k0 as f64 * step[0],
                        v[1] + k1 as f64 * step[1],
                        v[2] + k2 as f64 * step[2],
                        v[3] + k3 as f64 * step[3],
                    );
                    worst = worst.max((-0.5 * re_q(&k)).exp());
                }
            }
        }
    }
    worst / base
}

/// Raw quadruple sum on fixed axes, without any resolution guard. Returns
/// the complex p_int estimate.
#[allow(clippy::too_many_arguments)]
pub fn pint_on_grid(
    model: &SourceModel,
    focal_gdd: f64,
    magnification: f64,
    delta_t: f64,
    delta_tau: f64,
    mode: PhaseMatching,
    ordinary: Axis,
    extraordinary: Axis,
    summation: Summation,
) -> Complex64 {
    let unit = model.with_xi(1.0);
    let (na, nb) = (ordinary.len, extraordinary.len);
    let (wa, wb) = (ordinary.weights(), extraordinary.weights());
    let mut f = vec![Complex64::new(0.0, 0.0); na * nb];
    let mut norm = 0.0;
    for i in 0..na {
        let x = ordinary.at(i);
        for j in 0..nb {
            let y = extraordinary.at(j);
            let env = unit.jsa_envelope(mode, x, y);
            norm += wa[i] * wb[j] * env * env;
            let phase = x * delta_t - y * (delta_tau - delta_t);
            f[i * nb + j] = Complex64::from_polar(env * wa[i] * wb[j], phase);
        }
    }
    let m = magnification;
    let mut a_re = vec![0.0; na * nb];
    let mut a_im = vec![0.0; na * nb];
    for i in 0..na {
        let x = ordinary.at(i) / m;
        for j in 0..nb {
            let u = x - extraordinary.at(j);
            let (s, c) = (0.5 * m * focal_gdd * u * u).sin_cos();
            a_re[i * nb + j] = c;
            a_im[i * nb + j] = s;
        }
    }
    let sum = match summation {
        Summation::Factorized => factorized_sum(&f, &a_re, &a_im, na, nb),
        Summation::Naive => naive_sum(&f, &a_re, &a_im, na, nb),
    };
    sum * (focal_gdd / (2.0 * PI * norm))
}

fn factorized_sum(f: &[Complex64], a_re: &[f64], a_im: &[f64], na: usize, nb: usize) -> Complex64 {
    let row = |b: usize| -> (Vec<f64>, Vec<f64>) {
        let mut gr = vec![0.0; nb];
        let mut gi = vec![0.0; nb];
        for a in 0..na {
            let fv = f[a * nb + b];
            let ar = &a_re[a * nb..(a + 1) * nb];
            let ai = &a_im[a * nb..(a + 1) * nb];
            for d in 0..nb {
                gr[d] += fv.re * ar[d] - fv.im * ai[d];
                gi[d] += fv.re * ai[d] + fv.im * ar[d];
            }
        }
        (gr, gi)
    };
    #[cfg(feature = "parallel")]
    let g: Vec<(Vec<f64>, Vec<f64>)> = {
        use rayon::prelude::*;
        (0..nb).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let g: Vec<(Vec<f64>, Vec<f64>)> = (0..nb).map(row).collect();
    let mut s = Complex64::new(0.0, 0.0);
    for b in 0..nb {
        for d in 0..nb {
            let x = Complex64::new(g[b].0[d], g[b].1[d]);
            let y = Complex64::new(g[d].0[b], -g[d].1[b]);
            s += x * y;
        }
    }
    s
}

fn naive_sum(f: &[Complex64], a_re: &[f64], a_im: &[f64], na: usize, nb: usize) -> Complex64 {
    let a = |i: usize, j: usize| Complex64::new(a_re[i * nb + j], a_im[i * nb + j]);
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..na {
        for b in 0..nb {
            let fab = f[i * nb + b];
            for c in 0..na {
                let acb = a(c, b);
                for d in 0..nb {
                    s += fab * a(i, d) * (f[c * nb + d] * acb).conj();
                }
            }
        }
    }
    s
}

/// p_int by quadruple quadrature, with a Poisson aliasing guard and an
/// imaginary-residual check.
pub fn pint_numeric(
    model: &SourceModel,
    lens: &TimeLensSpec,
    delta_t: f64,
    delta_tau: f64,
    mode: PhaseMatching,
    spec: &QuadratureSpec,
) -> Result<PintNumeric> {
    spec.validate()?;
    let p = lens.params(model)?;
    let pi = lambda_matrix(&p)
        .try_inverse()
        .ok_or(Error::SingularLambda { condition: f64::INFINITY })?;
    let v = shift_vector(delta_t, delta_tau);
    let mut n = spec.points;
    let (a, b, estimate) = loop {
        let (a, b) = spec.axes(model, n)?;
        let est = alias_estimate_4d(&pi, &v, a.step, b.step);
        if est <= spec.alias_limit {
            break (a, b, est);
        }
        let next = QuadratureSpec::next_points(n);
        if !spec.auto_refine || next > spec.max_points {
            return Err(Error::UnderResolved {
                axis: "frequency",
                n,
                estimate: est,
                limit: spec.alias_limit,
            });
        }
        n = next;
    };
    let z = pint_on_grid(
        model,
        lens.focal_gdd,
        lens.magnification,
        delta_t,
        delta_tau,
        mode,
        a,
        b,
        Summation::Factorized,
    );
    if z.im.abs() > 1e-6 * z.re.abs().max(1e-12) {
        return Err(Error::ImaginaryResidual { real: z.re, imag: z.im });
    }
    Ok(PintNumeric {
        value: z.re,
        imag: z.im,
        points: n,
        alias_estimate: estimate,
    })
}

/// Marginal spectrum S_µ = 2π∫|J|² over the other frequency, on the
/// grid's own axis.
pub fn marginal_numeric(grid: &JsaGrid, photon: Photon) -> (Axis, Vec<f64>) {
    let (ni, nj) = (grid.omega.len, grid.omega_prime.len);
    match photon {
        Photon::Ordinary => {
            let w = grid.omega_prime.weights();
            let s = (0..ni)
                .map(|i| 2.0 * PI * grid.row(i).iter().zip(&w).map(|(v, w)| w * v.norm_sqr()).sum::<f64>())
                .collect();
            (grid.omega, s)
        }
        Photon::Extraordinary => {
            let w = grid.omega.weights();
            let mut s = vec![0.0; nj];
            for i in 0..ni {
                for (j, v) in grid.row(i).iter().enumerate() {
                    s[j] += w[i] * v.norm_sqr();
                }
            }
            s.iter_mut().for_each(|x| *x *= 2.0 * PI);
            (grid.omega_prime, s)
        }
    }
}

/// ∬|J|² dΩ dΩ′.
pub fn biphoton_numeric(grid: &JsaGrid) -> f64 {
    let wi = grid.omega.weights();
    let wj = grid.omega_prime.weights();
    (0..grid.omega.len)
        .map(|i| wi[i] * grid.row(i).iter().zip(&wj).map(|(v, w)| w * v.norm_sqr()).sum::<f64>())
        .sum()
}

/// Photon flux I_µ(t) = (1/2π)∫|∫J e^{−iΩ(t − k′L)}dΩ|² dΩ_other.
pub fn intensity_numeric(grid: &JsaGrid, model: &SourceModel, photon: Photon, times: &[f64]) -> Vec<f64> {
    let (own, other, delay) = match photon {
        Photon::Ordinary => (grid.omega, grid.omega_prime, model.delay_o),
        Photon::Extraordinary => (grid.omega_prime, grid.omega, model.delay_e),
    };
    let w_own = own.weights();
    let w_other = other.weights();
    let value = |k: usize, l: usize| match photon {
        Photon::Ordinary => grid.get(k, l),
        Photon::Extraordinary => grid.get(l, k),
    };
    let at = |t: f64| -> f64 {
        let s = t - delay;
        let kernel: Vec<Complex64> = (0..own.len)
            .map(|k| Complex64::from_polar(w_own[k], -own.at(k) * s))
            .collect();
        let mut total = 0.0;
        for l in 0..other.len {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, kv) in kernel.iter().enumerate() {
                acc += kv * value(k, l);
            }
            total += w_other[l] * acc.norm_sqr();
        }
        total / (2.0 * PI)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        times.par_iter().map(|&t| at(t)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        times.iter().map(|&t| at(t)).collect()
    }
}

/// Log-magnitude of the Ω̄ integrand's Fourier transform at κ, for the
/// Gaussian model: exp(−aΩ′² + (r + i(c − κ))²/(4(α − iβ))).
fn transfer_log_ft(model: &SourceModel, tf: &TransferFunction, delta_t: f64, omega: f64, omega_prime: f64, kappa: f64) -> f64 {
    let s2 = model.sigma_s * model.sigma_s;
    let op2 = model.omega_p * model.omega_p;
    let alpha = 1.0 / (4.0 * op2) + model.tau_o * model.tau_o / (2.0 * s2);
    let a_prime = 1.0 / (4.0 * op2) + model.tau_e * model.tau_e / (2.0 * s2);
    let beta = -tf.focal_gdd / (2.0 * tf.magnification);
    let r = -omega_prime / (2.0 * op2) - model.tau_o * model.tau_e * omega_prime / s2;
    let c = tf.focal_gdd * omega - delta_t;
    let num = Complex64::new(r, c - kappa).powi(2);
    -a_prime * omega_prime * omega_prime + (num / (4.0 * Complex64::new(alpha, -beta))).re
}

/// Aliasing estimate of a 1D Ω̄ quadrature with step h at one output point,
/// relative to max(true value, floor·peak).
fn transfer_alias(model: &SourceModel, tf: &TransferFunction, delta_t: f64, omega: f64, omega_prime: f64, h: f64) -> f64 {
    let peak = transfer_log_ft(model, tf, delta_t, 0.0, 0.0, 0.0);
    let base = transfer_log_ft(model, tf, delta_t, omega, omega_prime, 0.0).max(peak + ALIAS_FLOOR.ln());
    (1..=3)
        .flat_map(|k| [k as f64, -(k as f64)])
        .map(|k| (transfer_log_ft(model, tf, delta_t, omega, omega_prime, 2.0 * PI * k / h) - base).exp())
        .fold(0.0, f64::max)
}

/// Apply the ordinary-arm transfer function to a sampled JSA:
/// J_out(Ω,Ω′) = e^{−i(τ_e+t₀)Ω′}∫G_o(Ω,Ω̄)J(Ω̄,Ω′)dΩ̄/2π, with Ω̄ on the
/// input grid's Ω axis.
pub fn transfer_apply_numeric(
    grid: &JsaGrid,
    model: &SourceModel,
    lens: &TimeLensSpec,
    omega_out: Axis,
    alias_limit: f64,
) -> Result<JsaGrid> {
    let tf = TransferFunction::new(model, lens);
    let h = grid.omega.step;
    let mut worst = 0.0f64;
    for &w in &[omega_out.start, 0.0, omega_out.end()] {
        for &wp in &[grid.omega_prime.start, 0.0, grid.omega_prime.end()] {
            worst = worst.max(transfer_alias(model, &tf, lens.delta_t, w, wp, h));
        }
    }
    if worst > alias_limit {
        return Err(Error::UnderResolved {
            axis: "input Ω",
            n: grid.omega.len,
            estimate: worst,
            limit: alias_limit,
        });
    }
    let wbar = grid.omega.weights();
    let nj = grid.omega_prime.len;
    let row = |i: usize| -> Vec<Complex64> {
        let w = omega_out.at(i);
        let kernel: Vec<Complex64> = (0..grid.omega.len)
            .map(|k| tf.eval(w, grid.omega.at(k)) * (wbar[k] / (2.0 * PI)))
            .collect();
        (0..nj)
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, kv) in kernel.iter().enumerate() {
                    acc += kv * grid.get(k, j);
                }
                let wp = grid.omega_prime.at(j);
                acc * Complex64::from_polar(1.0, -(model.tau_e + model.t0) * wp)
            })
            .collect()
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<Complex64>> = {
        use rayon::prelude::*;
        (0..omega_out.len).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<Complex64>> = (0..omega_out.len).map(row).collect();
    JsaGrid::from_values(omega_out, grid.omega_prime, rows.concat(), grid.mode)
}

/// Transfer-function integral at isolated output points, integrating the
/// analytic input JSA on a grid fine enough for the lens chirp.
pub fn transfer_apply_points(
    model: &SourceModel,
    lens: &TimeLensSpec,
    mode: PhaseMatching,
    points: &[(f64, f64)],
    half_width: f64,
    alias_limit: f64,
) -> Result<Vec<Complex64>> {
    let tf = TransferFunction::new(model, lens);
    let (so, _) = model.spectral_sigmas();
    let span = half_width * SQRT_2 * so;
    points
        .iter()
        .map(|&(w, wp)| {
            let mut n = 257usize;
            let axis = loop {
                let axis = Axis::symmetric(span, n)?;
                if transfer_alias(model, &tf, lens.delta_t, w, wp, axis.step) <= alias_limit {
                    break axis;
                }
                n = 2 * n - 1;
                if n > 1 << 27 {
                    return Err(Error::UnderResolved {
                        axis: "Ω̄",
                        n,
                        estimate: transfer_alias(model, &tf, lens.delta_t, w, wp, axis.step),
                        limit: alias_limit,
                    });
                }
            };
            let wts = axis.weights();
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, wt) in wts.iter().enumerate() {
                let x = axis.at(k);
                acc += tf.eval(w, x) * model.jsa(mode, x, wp) * *wt;
            }
            Ok(acc / (2.0 * PI) * Complex64::from_polar(1.0, -(model.tau_e + model.t0) * wp))
        })
        .collect()
}

/// Off-diagonal mass of the discretized ∫G_o*(Ω,Ω₁)G_o(Ω,Ω₂)dΩ/2π under a
/// Gaussian output window of width `window`, as the largest row ratio
/// Σ_{j≠i}|U_ij| / |U_ii|.
pub fn unitarity_residual(tf: &TransferFunction, inputs: Axis, output: Axis, window: f64) -> f64 {
    let n = inputs.len;
    let w: Vec<f64> = output
        .points()
        .iter()
        .zip(output.weights())
        .map(|(x, wt)| wt * (-x * x / (2.0 * window * window)).exp())
        .collect();
    let cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| output.points().iter().map(|&x| tf.eval(x, inputs.at(j))).collect())
        .collect();
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut diag = 0.0;
        let mut off = 0.0;
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..output.len {
                acc += cols[i][k].conj() * cols[j][k] * w[k];
            }
            let u = acc.norm() / (2.0 * PI);
            if i == j {
                diag = u;
            } else {
                off += u;
            }
        }
        worst = worst.max(off / diag);
    }
    worst
}

/// One closed-form versus numeric comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub quantity: String,
    pub closed_form: f64,
    pub numeric: f64,
    pub rel_err: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(quantity: impl Into<String>, closed_form: f64, numeric: f64, tolerance: f64) -> Self {
        let scale = closed_form.abs();
        let rel_err = if scale > 0.0 {
            (numeric - closed_form).abs() / scale
        } else {
            (numeric - closed_form).abs()
        };
        Self {
            quantity: quantity.into(),
            closed_form,
            numeric,
            rel_err,
            tolerance,
        }
    }

    pub fn pass(&self) -> bool {
        self.rel_err <= self.tolerance
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass())
    }

    pub const CSV_HEADER: &'static str = "quantity,closed_form,numeric,rel_err,tolerance,pass";

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for c in &self.checks {
            writeln!(
                w,
                "{},{:.12e},{:.12e},{:.3e},{:.1e},{}",
                c.quantity,
                c.closed_form,
                c.numeric,
                c.rel_err,
                c.tolerance,
                c.pass()
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.quantity.chars().count()).max().unwrap_or(8).max(8);
        writeln!(
            f,
            "{:<width$}  {:>20}  {:>20}  {:>10}  {:>8}  result",
            "quantity", "closed form", "numeric", "rel err", "tol"
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<width$}  {:>20.12e}  {:>20.12e}  {:>10.3e}  {:>8.1e}  {}",
                c.quantity,
                c.closed_form,
                c.numeric,
                c.rel_err,
                c.tolerance,
                if c.pass() { "pass" } else { "FAIL" }
            )?;
        }
        write!(
            f,
            "{} of {} checks passed",
            self.checks.iter().filter(|c| c.pass()).count(),
            self.checks.len()
        )
    }
}

/// Tolerances of the verification suite. Overrides may only tighten them.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub moments: f64,
    pub normalization: f64,
    pub intensity: f64,
    pub pint: f64,
    pub gamma: f64,
    pub post_lens: f64,
    pub unitarity: f64,
    pub lensless: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            moments: 1e-6,
            normalization: 1e-6,
            intensity: 1e-4,
            pint: 1e-3,
            gamma: 1e-10,
            post_lens: 1e-4,
            unitarity: 1e-3,
            lensless: 1e-3,
        }
    }
}

impl Tolerances {
    /// Set one tolerance by name; loosening is refused.
    pub fn tighten(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "moments" => &mut self.moments,
            "normalization" => &mut self.normalization,
            "intensity" => &mut self.intensity,
            "pint" => &mut self.pint,
            "gamma" => &mut self.gamma,
            "post_lens" => &mut self.post_lens,
            "unitarity" => &mut self.unitarity,
            "lensless" => &mut self.lensless,
            _ => return Err(invalid("tolerance", format!("unknown tolerance `{name}`"))),
        };
        if !(value >= 0.0 && value <= *slot) {
            return Err(invalid(
                "tolerance",
                format!("`{name}` = {value} would loosen the default {}", *slot),
            ));
        }
        *slot = value;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteOptions {
    pub grid: GridSpec,
    pub quadrature: QuadratureSpec,
    pub tolerances: Tolerances,
}


/// Run every closed-form versus quadrature comparison for one source and
/// lens.
pub fn verify_suite(model: &SourceModel, lens: &TimeLensSpec, opts: &SuiteOptions) -> Result<Report> {
    let tol = &opts.tolerances;
    let mut r = Report::default();
    let model = model.with_xi(1.0);
    let pb = model.biphoton_probability();
    let (so, se) = model.spectral_sigmas();
    let (to, te) = model.temporal_sigmas();

    let grid = JsaGrid::compute(&model, PhaseMatching::Gaussian, opts.grid)?;
    for (photon, sigma) in [(Photon::Ordinary, so), (Photon::Extraordinary, se)] {
        let (axis, s) = marginal_numeric(&grid, photon);
        let (_, std) = moments(&axis, &s);
        r.push(Check::new(format!("sigma_{}", photon.label()), sigma, std, tol.moments));
        r.push(Check::new(
            format!("int_S_{}/2pi", photon.label()),
            pb,
            axis.integrate(&s) / (2.0 * PI),
            tol.normalization,
        ));
    }
    r.push(Check::new("P_b", pb, biphoton_numeric(&grid), tol.normalization));

    for (photon, dt) in [(Photon::Ordinary, to), (Photon::Extraordinary, te)] {
        let peak = model.intensity_peak_time(photon);
        let times = Axis::symmetric(8.0 * dt, 161)?;
        let ts: Vec<f64> = times.points().iter().map(|x| x + peak).collect();
        let vals = intensity_numeric(&grid, &model, photon, &ts);
        let (_, std) = moments(&times, &vals);
        let label = photon.label();
        r.push(Check::new(format!("dt_{label}"), dt, std, tol.intensity));
        r.push(Check::new(
            format!("I_{label}(peak)"),
            model.intensity(photon, peak),
            vals[80],
            tol.intensity,
        ));
        r.push(Check::new(format!("int_I_{label}"), pb, times.integrate(&vals), tol.intensity));
    }

    let p = lens.params(&model)?;
    let closed = GammaForm::closed(&p);
    let numeric = GammaForm::numeric(&p)?;
    r.push(Check::new("Gamma_22 (matrix path)", closed.g22, numeric.g22, tol.gamma));
    r.push(Check::new("det_Lambda (matrix path)", closed.det_lambda, numeric.det_lambda, tol.gamma));

    let sc = p.sigma_cw;
    let probes = [(0.0, 0.0), (0.0, 0.5 / sc), (lens.delta_t, 2.0 / sc), (0.3, -0.5 / sc)];
    for (dt, dtau) in probes {
        let c = hom::p_int_with(&p, &closed, dt, dtau);
        let n = pint_numeric(&model, lens, dt, dtau, PhaseMatching::Gaussian, &opts.quadrature)?;
        r.push(Check::new(format!("p_int(dt={dt:.3},dtau={dtau:.3})"), c, n.value, tol.pint));
    }

    let form = PostLensForm::new(&model, lens)?;
    let half = 6.0 * form.marginal_sigma_o();
    let out = Axis::symmetric(half, 129)?;
    let input = JsaGrid::on_axes(
        &model,
        PhaseMatching::Gaussian,
        Axis::symmetric(6.0 * SQRT_2 * so, 513)?,
        Axis::symmetric(6.0 * SQRT_2 * se, 129)?,
    )?;
    let jout = transfer_apply_numeric(&input, &model, lens, out, 1e-10)?;
    let (axis, s) = marginal_numeric(&jout, Photon::Ordinary);
    let (_, std) = moments(&axis, &s);
    r.push(Check::new("sigma_o_out", post_lens_sigma_o(&model, lens)?, std, tol.post_lens));
    let c = jout.get(64, jout.omega_prime.len / 2);
    let expect = form.jsa(0.0, 0.0);
    r.push(Check::new("|J_out(0,0)|", expect.norm(), c.norm(), tol.post_lens));

    let tf = TransferFunction::new(&model, lens);
    let inputs = Axis::symmetric(4.0, 33)?;
    let window = 8.0 / (lens.focal_gdd.abs() * inputs.step);
    let span = 6.0 * window;
    let needed = 2.0 * PI / (lens.focal_gdd.abs() * 2.0 * inputs.end() + 10.0 / window);
    let n = ((2.0 * span / needed).ceil() as usize) | 1;
    let res = unitarity_residual(&tf, inputs, Axis::symmetric(span, n.max(33))?, window);
    r.push(Check::new("G_o unitarity off-diagonal", 0.0, res, tol.unitarity));

    let far = DimensionlessParams::from_parts(p.t_o, p.t_e, 1e6, 1.0, p.omega_p)?;
    let g = hom::gamma(&far)?;
    let mut worst = 0.0f64;
    for k in [0.0, 0.5, 1.0, 2.0] {
        let x = k / sc;
        worst = worst.max((hom::p_int_with(&far, &g, 0.0, x) - hom::lensless_p_int(&far, x)).abs());
    }
    r.push(Check::new("lensless limit |dp|", 0.0, worst, tol.lensless));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bbo() -> SourceModel {
        SourceModel::new(0.9753551838208224, 0.7583616401518611, 2.684772404393243).unwrap()
    }

    fn lens(model: &SourceModel, d: f64, m: f64) -> TimeLensSpec {
        TimeLensSpec::ideal(d / (2.0 * model.omega_p * model.omega_p), m).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::with_points(31).validate().is_err());
        assert!(QuadratureSpec::with_points(64).validate().is_err());
        let mut s = QuadratureSpec::default();
        s.half_width = 3.5;
        assert!(s.validate().is_err());
        assert_eq!(QuadratureSpec::next_points(257), 321);
    }

    #[test]
    fn naive_and_factorized_agree() {
        let m = bbo();
        let spec = QuadratureSpec::with_points(65);
        let (a, b) = spec.axes(&m, 65).unwrap();
        for mode in [PhaseMatching::Gaussian, PhaseMatching::ExactSinc] {
            let f = pint_on_grid(&m, 1.3, -2.1, 0.2, 0.4, mode, a, b, Summation::Factorized);
            let n = pint_on_grid(&m, 1.3, -2.1, 0.2, 0.4, mode, a, b, Summation::Naive);
            assert!((f - n).norm() <= 1e-12 * f.norm(), "{f} vs {n}");
        }
    }

    #[test]
    fn pint_matches_closed_form() {
        let m = bbo();
        let l = lens(&m, 10.0, -2.1);
        let p = l.params(&m).unwrap();
        let closed = hom::p_int(&p, 0.0, 0.0).unwrap();
        let n = pint_numeric(&m, &l, 0.0, 0.0, PhaseMatching::Gaussian, &QuadratureSpec::default()).unwrap();
        assert!((n.value - closed).abs() / closed < 1e-6, "{} vs {closed}", n.value);
        assert!(n.alias_estimate <= 1e-10);
        let far = pint_numeric(&m, &l, 0.0, 12.0, PhaseMatching::Gaussian, &QuadratureSpec::default()).unwrap();
        let fc = hom::p_int(&p, 0.0, 12.0).unwrap();
        assert!((far.value - fc).abs() < 1e-6 * fc, "{far:?} closed {fc}");
    }

    #[test]
    fn under_resolved_is_reported() {
        let m = bbo();
        let l = lens(&m, 100.0, 4.0);
        let mut spec = QuadratureSpec::with_points(33);
        spec.auto_refine = false;
        assert!(matches!(
            pint_numeric(&m, &l, 0.0, 0.0, PhaseMatching::Gaussian, &spec),
            Err(Error::UnderResolved { .. })
        ));
    }

    #[test]
    fn exact_sinc_differs_slightly() {
        let m = bbo();
        let l = lens(&m, 10.0, -2.1);
        let spec = QuadratureSpec::default();
        let g = pint_numeric(&m, &l, 0.0, 0.0, PhaseMatching::Gaussian, &spec).unwrap();
        let e = pint_numeric(&m, &l, 0.0, 0.0, PhaseMatching::ExactSinc, &spec).unwrap();
        let d = (g.value - e.value).abs() / g.value;
        assert!(d > 1e-6 && d < 0.1, "difference {d}");
    }

    #[test]
    fn identity_lens_returns_input() {
        let m = bbo();
        let l = TimeLensSpec::ideal(1e6, 1.0).unwrap();
        let pts = [(0.0, 0.0), (0.4, -0.3), (-0.8, 0.5)];
        let out = transfer_apply_points(&m, &l, PhaseMatching::Gaussian, &pts, 6.0, 1e-10).unwrap();
        for ((w, wp), v) in pts.iter().zip(&out) {
            let j = m.jsa(PhaseMatching::Gaussian, *w, *wp);
            assert!((v.norm() - j.norm()).abs() < 1e-3 * m.jsa(PhaseMatching::Gaussian, 0.0, 0.0).norm());
        }
    }

    #[test]
    fn transfer_points_match_closed_form() {
        let m = bbo();
        let l = lens(&m, 10.0, -2.1);
        let form = PostLensForm::new(&m, &l).unwrap();
        let pts = [(0.0, 0.0), (0.3, 0.2), (-0.5, 0.4), (0.1, -0.6)];
        let out = transfer_apply_points(&m, &l, PhaseMatching::Gaussian, &pts, 7.0, 1e-12).unwrap();
        for ((w, wp), v) in pts.iter().zip(&out) {
            let c = form.jsa(*w, *wp);
            assert!((v - c).norm() < 1e-9 * c.norm(), "{v} vs {c}");
        }
    }

    #[test]
    fn unitarity_improves_with_resolution() {
        let m = bbo();
        let l = lens(&m, 10.0, -2.1);
        let tf = TransferFunction::new(&m, &l);
        let inputs = Axis::symmetric(4.0, 33).unwrap();
        let window = 8.0 / (l.focal_gdd * inputs.step);
        let coarse = unitarity_residual(&tf, inputs, Axis::symmetric(6.0 * window, 201).unwrap(), window);
        let fine = unitarity_residual(&tf, inputs, Axis::symmetric(6.0 * window, 801).unwrap(), window);
        assert!(fine < coarse, "{fine} !< {coarse}");
        assert!(fine < 1e-3, "{fine}");
    }

    #[test]
    fn tolerances_only_tighten() {
        let mut t = Tolerances::default();
        assert!(t.tighten("pint", 1e-4).is_ok());
        assert!(t.tighten("pint", 1e-2).is_err());
        assert!(t.tighten("nonsense", 1e-2).is_err());
    }

    #[test]
    fn marginals_match_closed_forms() {
        let m = bbo();
        let g = JsaGrid::compute(&m, PhaseMatching::Gaussian, GridSpec::default()).unwrap();
        let (axis, s) = marginal_numeric(&g, Photon::Ordinary);
        let (_, std) = moments(&axis, &s);
        assert_relative_eq!(std, m.spectral_sigmas().0, max_relative = 1e-6);
        assert_relative_eq!(s[128], m.spectrum(Photon::Ordinary, 0.0), max_relative = 1e-6);
    }
}
