//! Browser bindings: JSA map, HOM curve and visibility against |M| for a
//! BBO source whose length and pump bandwidth are set from the page.

use timelens_core::dispersion::{CrystalSpec, UniaxialMaterial};
use timelens_core::hom::{self, DimensionlessParams};
use timelens_core::source::{GridSpec, JsaGrid, PhaseMatching, PumpSpec, SourceModel};
use wasm_bindgen::prelude::*;

fn source(length_mm: f64, bandwidth_nm: f64) -> Result<SourceModel, String> {
    let pump = PumpSpec::from_bandwidth(405.0, bandwidth_nm).map_err(|e| e.to_string())?;
    let crystal = CrystalSpec::phase_matched(UniaxialMaterial::bbo(), length_mm, pump.wavelength_um())
        .map_err(|e| e.to_string())?;
    SourceModel::from_crystal(&crystal, &pump, 1.0).map_err(|e| e.to_string())
}

fn params(length_mm: f64, bandwidth_nm: f64, d: f64, m: f64) -> Result<DimensionlessParams, String> {
    let model = source(length_mm, bandwidth_nm)?;
    DimensionlessParams::with_d(&model, d, m).map_err(|e| e.to_string())
}

/// |J| on an n×n grid, normalized to 1, row-major with Ω along rows.
#[wasm_bindgen]
pub struct JsaImage {
    size: usize,
    half_width: f64,
    values: Vec<f32>,
}

#[wasm_bindgen]
impl JsaImage {
    pub fn size(&self) -> usize {
        self.size
    }

    /// Half-width of both frequency axes, rad/ps.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn values(&self) -> Vec<f32> {
        self.values.clone()
    }
}

pub fn jsa_image_native(length_mm: f64, bandwidth_nm: f64, size: usize) -> Result<JsaImage, String> {
    let model = source(length_mm, bandwidth_nm)?;
    let spec = GridSpec {
        points: size.max(3),
        half_width_sigmas: 4.0,
    };
    let grid = JsaGrid::compute(&model, PhaseMatching::ExactSinc, spec).map_err(|e| e.to_string())?;
    let max = grid.max_abs();
    Ok(JsaImage {
        size: grid.omega.len,
        half_width: grid.omega.end(),
        values: grid.values.iter().map(|v| (v.norm() / max) as f32).collect(),
    })
}

#[wasm_bindgen]
pub fn jsa_image(length_mm: f64, bandwidth_nm: f64, size: usize) -> Result<JsaImage, JsError> {
    jsa_image_native(length_mm, bandwidth_nm, size).map_err(|e| JsError::new(&e))
}

/// Normalized coincidence rate 1 − p_int over δτ ∈ [−span, span] ps, with
/// the lensless and CW references.
#[wasm_bindgen]
pub struct HomData {
    delays: Vec<f64>,
    lens: Vec<f64>,
    lensless: Vec<f64>,
    cw: Vec<f64>,
    visibility: f64,
}

#[wasm_bindgen]
impl HomData {
    pub fn delays(&self) -> Vec<f64> {
        self.delays.clone()
    }
    pub fn lens(&self) -> Vec<f64> {
        self.lens.clone()
    }
    pub fn lensless(&self) -> Vec<f64> {
        self.lensless.clone()
    }
    pub fn cw(&self) -> Vec<f64> {
        self.cw.clone()
    }
    pub fn visibility(&self) -> f64 {
        self.visibility
    }
}

#[allow(clippy::too_many_arguments)]
pub fn hom_curve_native(
    length_mm: f64,
    bandwidth_nm: f64,
    d: f64,
    m: f64,
    delta_t: f64,
    span: f64,
    points: usize,
) -> Result<HomData, String> {
    let p = params(length_mm, bandwidth_nm, d, m)?;
    let n = points.max(2);
    let delays: Vec<f64> = (0..n).map(|k| -span + 2.0 * span * k as f64 / (n - 1) as f64).collect();
    let curve = hom::hom_scan(&p, delta_t, &delays).map_err(|e| e.to_string())?;
    Ok(HomData {
        lensless: delays.iter().map(|&x| 1.0 - hom::lensless_p_int(&p, x)).collect(),
        cw: delays.iter().map(|&x| 1.0 - hom::cw_p_int(p.sigma_cw, x)).collect(),
        lens: curve.normalized_rate,
        visibility: curve.visibility,
        delays,
    })
}

#[wasm_bindgen]
pub fn hom_curve(
    length_mm: f64,
    bandwidth_nm: f64,
    d: f64,
    m: f64,
    delta_t: f64,
    span: f64,
    points: usize,
) -> Result<HomData, JsError> {
    hom_curve_native(length_mm, bandwidth_nm, d, m, delta_t, span, points).map_err(|e| JsError::new(&e))
}

/// Perfect-synchronization visibility at |M| = m_min..m_max.
pub fn visibility_scan_native(
    length_mm: f64,
    bandwidth_nm: f64,
    d: f64,
    m_min: f64,
    m_max: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let p = params(length_mm, bandwidth_nm, d, 1.0)?;
    let n = points.max(2);
    let ms: Vec<f64> = (0..n).map(|k| m_min + (m_max - m_min) * k as f64 / (n - 1) as f64).collect();
    hom::visibility_vs_magnification(&p, &ms).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn visibility_scan(
    length_mm: f64,
    bandwidth_nm: f64,
    d: f64,
    m_min: f64,
    m_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    visibility_scan_native(length_mm, bandwidth_nm, d, m_min, m_max, points).map_err(|e| JsError::new(&e))
}

/// |M_opt| for the given source.
#[wasm_bindgen]
pub fn optimal_magnification(length_mm: f64, bandwidth_nm: f64) -> Result<f64, JsError> {
    params(length_mm, bandwidth_nm, 1.0, 1.0)
        .map(|p| p.optimal_magnification())
        .map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsa_image_is_normalized() {
        let img = jsa_image_native(20.0, 0.2, 65).unwrap();
        assert_eq!(img.values.len(), 65 * 65);
        let max = img.values.iter().cloned().fold(0.0f32, f32::max);
        assert!((max - 1.0).abs() < 1e-6);
    }

    #[test]
    fn hom_curve_dips_at_zero() {
        let h = hom_curve_native(20.0, 0.2, 10.0, -2.1, 0.0, 3.0, 61).unwrap();
        assert!(h.lens[30] < 0.01 && h.lensless[30] > 0.4);
        assert!((h.visibility - 0.9966).abs() < 1e-3);
    }

    #[test]
    fn visibility_scan_peaks_near_optimum() {
        let v = visibility_scan_native(20.0, 0.2, 10.0, 1.0, 4.0, 61).unwrap();
        let k = v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!((1.0 + 0.05 * k as f64 - 2.1).abs() < 0.051);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(hom_curve_native(20.0, -1.0, 10.0, 2.1, 0.0, 3.0, 10).is_err());
    }
}
