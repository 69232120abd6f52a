//! Acceptance criteria 1–10. Each criterion prints one PASS/FAIL line; the
//! test fails if any criterion fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use timelens_core::dispersion::{ChirpedPulse, CrystalSpec, UniaxialMaterial};
use timelens_core::grid::{moments, Axis};
use timelens_core::hom::{self, DimensionlessParams, GammaForm};
use timelens_core::lens::{
    check_aperture, post_lens_intensity, post_lens_peak_time, post_lens_sigma_o, Realization, TimeLensSpec,
    TransferFunction, DEFAULT_SAFETY,
};
use timelens_core::oracle::{pint_numeric, unitarity_residual, QuadratureSpec};
use timelens_core::source::{PhaseMatching, Photon, PumpSpec, SourceModel};

type Outcome = Result<String, String>;

fn close(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{name} = {got:.6} outside {want} ± {tol}"))
    }
}

fn rel(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    close(name, got, want, tol * want.abs())
}

fn bbo_parts() -> (CrystalSpec, PumpSpec, SourceModel) {
    let crystal = CrystalSpec::phase_matched(UniaxialMaterial::bbo(), 20.0, 0.405).unwrap();
    let pump = PumpSpec::from_bandwidth(405.0, 0.2).unwrap();
    let model = SourceModel::from_crystal(&crystal, &pump, 1.0).unwrap();
    (crystal, pump, model)
}

fn bbo() -> SourceModel {
    bbo_parts().2
}

fn lens_at(model: &SourceModel, d: f64, m: f64) -> TimeLensSpec {
    TimeLensSpec::ideal(d / (2.0 * model.omega_p * model.omega_p), m).unwrap()
}

fn c1_bbo_pipeline() -> Outcome {
    let (crystal, pump, m) = bbo_parts();
    close("theta_p", crystal.cut_angle_deg, 41.42, 0.15)?;
    close("tau_o", m.tau_o, 0.76, 0.02)?;
    close("tau_e", m.tau_e, 2.68, 0.05)?;
    close("Omega_p", m.omega_p, 0.98, 0.01)?;
    close("tau_p", pump.duration_fwhm(), 1.21, 0.01)?;
    Ok(format!(
        "theta_p={:.3} deg, tau_o={:.4}, tau_e={:.4}, Omega_p={:.4}, tau_p={:.4}",
        crystal.cut_angle_deg,
        m.tau_o,
        m.tau_e,
        m.omega_p,
        pump.duration_fwhm()
    ))
}

fn c2_derived_shapes() -> Outcome {
    let m = bbo();
    let (so, se) = m.spectral_sigmas();
    let (to, te) = m.temporal_sigmas();
    let p = DimensionlessParams::with_d(&m, 10.0, 1.0).unwrap();
    let m_opt = p.optimal_magnification().abs();
    rel("sigma_o", so, 1.48, 0.01)?;
    rel("sigma_e", se, 0.71, 0.01)?;
    close("sigma_o/sigma_e", so / se, 2.1, 0.05)?;
    rel("dt_o", to, 0.61, 0.01)?;
    rel("dt_e", te, 1.28, 0.01)?;
    close("sigma_cw", m.sigma_cw(), 0.59, 0.01)?;
    close("|M_opt|", m_opt, 2.1, 0.05)?;
    Ok(format!(
        "sigma_o={so:.4}, sigma_e={se:.4}, dt_o={to:.4}, dt_e={te:.4}, sigma_cw={:.4}, |M_opt|={m_opt:.4}",
        m.sigma_cw()
    ))
}

fn c3_oracle_lattice() -> Outcome {
    let m = bbo();
    let sc = m.sigma_cw();
    let taus = [0.0, 0.5, -0.5, 2.0, -2.0];
    // The aliasing estimate tracks the actual error closely; 1e-6 leaves
    // three decades of margin under the 1e-3 criterion.
    let spec = QuadratureSpec {
        alias_limit: 1e-6,
        ..QuadratureSpec::default()
    };
    let mut count = 0;
    let mut worst = 0.0f64;
    let mut max_n = 0;
    for (i, &mag) in [1.2, -1.2, 2.1, -2.1, 4.0, -4.0].iter().enumerate() {
        for (j, &d) in [0.5, 1.23, 10.0, 100.0].iter().enumerate() {
            for (s, &dt) in [0.0, 0.3].iter().enumerate() {
                let dtau = taus[((i * 4 + j) * 2 + s) % 5] / sc;
                let lens = lens_at(&m, d, mag);
                let p = lens.params(&m).unwrap();
                let closed = hom::p_int(&p, dt, dtau).map_err(|e| e.to_string())?;
                let n = pint_numeric(&m, &lens, dt, dtau, PhaseMatching::Gaussian, &spec)
                    .map_err(|e| format!("M={mag} D={d}: {e}"))?;
                let err = (n.value - closed).abs() / closed.abs();
                if !(err < 1e-3) {
                    return Err(format!("M={mag} D={d} dt={dt} dtau={dtau:.3}: rel err {err:.2e}"));
                }
                worst = worst.max(err);
                max_n = max_n.max(n.points);
                count += 1;
            }
        }
    }
    if count < 48 {
        return Err(format!("only {count} combinations"));
    }
    Ok(format!("{count} combinations, worst rel err {worst:.2e}, largest N {max_n}"))
}

fn c4_matrix_path() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let omega_p = rng.gen_range(0.3..3.0);
        let tau_o = rng.gen_range(0.1..2.0);
        let tau_e = tau_o + rng.gen_range(0.3..3.0);
        let model = SourceModel::new(omega_p, tau_o, tau_e).unwrap();
        let d = 10f64.powf(rng.gen_range(-1.0..3.0));
        let mag = rng.gen_range(0.3..5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let p = DimensionlessParams::with_d(&model, d, mag).unwrap();
        let closed = GammaForm::closed(&p);
        let numeric = GammaForm::numeric(&p).map_err(|e| format!("draw {k}: {e}"))?;
        let diff = closed.rel_diff(&numeric);
        if !(diff < 1e-10) {
            return Err(format!("draw {k} (D={d:.3}, M={mag:.3}): rel diff {diff:.2e}"));
        }
        let (l1, l2) = closed.eigenvalues();
        if !(l1 > 0.0 && l2 > 0.0) {
            return Err(format!("draw {k}: eigenvalues {l1}, {l2}"));
        }
        worst = worst.max(diff);
    }
    Ok(format!("1000 draws, worst rel diff {worst:.2e}, all eigenvalues positive"))
}

fn c5_limits() -> Outcome {
    let m = bbo();
    let sc = m.sigma_cw();
    let far = DimensionlessParams::with_d(&m, 1e6, 1.0).unwrap();
    let g = hom::gamma(&far).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for k in -40..=40 {
        let x = k as f64 * 0.1 / sc;
        worst = worst.max((hom::p_int_with(&far, &g, 0.0, x) - hom::lensless_p_int(&far, x)).abs());
    }
    if !(worst < 1e-3) {
        return Err(format!("lensless limit deviates by {worst:.2e}"));
    }
    for mag in [-2.1, 3.0] {
        let p = DimensionlessParams::with_d(&m, 1e4, mag).unwrap();
        let ratio = hom::dip_location(&p, 0.3).map_err(|e| e.to_string())? / 0.3;
        close(&format!("dip slope at M={mag}"), ratio, 1.0 - mag, 1e-3)?;
    }
    let m_opt = DimensionlessParams::with_d(&m, 1.0, 1.0).unwrap().optimal_magnification();
    let mut last = 0.0;
    for d in [0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 1e3, 1e4] {
        let p = DimensionlessParams::with_d(&m, d, m_opt).unwrap();
        let v = hom::visibility(&p, 0.0).map_err(|e| e.to_string())?;
        if !(v > last) {
            return Err(format!("V not increasing at D={d}: {v} <= {last}"));
        }
        last = v;
    }
    let v10 = hom::visibility(&DimensionlessParams::with_d(&m, 10.0, m_opt).unwrap(), 0.0).unwrap();
    if !(v10 > 0.99) {
        return Err(format!("V(D=10) = {v10}"));
    }
    Ok(format!("lensless max |dp| {worst:.1e}; V(M_opt, D=10) = {v10:.5}"))
}

fn c6_visibility_scan() -> Outcome {
    let m = bbo();
    let step = 0.05;
    let ms: Vec<f64> = (0..=60).map(|k| 1.0 + step * k as f64).collect();
    let mut peaks = Vec::new();
    for d in [0.5, 1.23, 10.0] {
        let p = DimensionlessParams::with_d(&m, d, 1.0).unwrap();
        let v = hom::visibility_vs_magnification(&p, &ms).map_err(|e| e.to_string())?;
        let (k, _) = v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        close(&format!("argmax |M| at D={d}"), ms[k], 2.1, step + 1e-9)?;
        peaks.push(format!("D={d}: {:.2}", ms[k]));
    }
    let eopm = TimeLensSpec::from_realization(
        Realization::EopmWindow {
            theta_max: 25.0,
            aperture_ps: 4.0,
        },
        -2.1,
        0.0,
    )
    .unwrap();
    let p = eopm.params(&m).unwrap();
    let v = hom::optimal_visibility(&p);
    let v_pm = hom::visibility(&p.with_magnification(p.optimal_magnification()).unwrap(), 0.0).unwrap();
    rel("EOPM closed-form visibility", v, v_pm, 1e-9)?;
    println!(
        "    note: EOPM lens (D = {:.4}) closed-form visibility {v:.3}; paper reports 0.6 (and 0.55); closed form asserted, paper value recorded only",
        p.d
    );
    Ok(format!("argmax {}", peaks.join(", ")))
}

fn c7_normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let omega_p = rng.gen_range(0.3..3.0);
        let tau_o = rng.gen_range(0.1..2.0);
        let tau_e = tau_o + rng.gen_range(0.3..3.0);
        let model = SourceModel::new(omega_p, tau_o, tau_e)
            .unwrap()
            .with_xi(rng.gen_range(0.1..3.0))
            .with_t0(rng.gen_range(-2.0..2.0));
        let pb = model.biphoton_probability();
        for photon in [Photon::Ordinary, Photon::Extraordinary] {
            let s = model.spectral_sigma(photon);
            let w = Axis::symmetric(12.0 * s, 2001).unwrap();
            let spec: Vec<f64> = w.points().iter().map(|&x| model.spectrum(photon, x)).collect();
            let a = w.integrate(&spec) / (2.0 * std::f64::consts::PI);
            let dt = model.temporal_sigma(photon);
            let peak = model.intensity_peak_time(photon);
            let t = Axis::symmetric(12.0 * dt, 2001).unwrap();
            let i: Vec<f64> = t.points().iter().map(|&x| model.intensity(photon, peak + x)).collect();
            let b = t.integrate(&i);
            for v in [a, b] {
                let e = (v - pb).abs() / pb;
                if !(e < 1e-6) {
                    return Err(format!("{} normalization off by {e:.2e}", photon.label()));
                }
                worst = worst.max(e);
            }
        }
    }
    Ok(format!("20 parameter sets, worst rel err {worst:.2e}"))
}

fn c8_post_lens() -> Outcome {
    let m = bbo();
    let (_, se) = m.spectral_sigmas();
    let m_opt = DimensionlessParams::with_d(&m, 10.0, 1.0).unwrap().optimal_magnification();
    let lens = lens_at(&m, 10.0, m_opt);
    let s_out = post_lens_sigma_o(&m, &lens).map_err(|e| e.to_string())?;
    rel("sigma_o_out vs sigma_e", s_out, se, 0.02)?;

    let lens = lens_at(&m, 10.0, -2.1);
    let to = m.temporal_sigma(Photon::Ordinary);
    let center = post_lens_peak_time(&m, &lens);
    let t = Axis::symmetric(12.0 * 2.1 * to, 4001).unwrap();
    let vals: Vec<f64> = t.points().iter().map(|&x| post_lens_intensity(&m, &lens, center + x)).collect();
    let (_, width) = moments(&t, &vals);
    rel("post-lens width", width, 2.1 * to, 1e-6)?;

    let tf = TransferFunction::new(&m, &lens);
    let inputs = Axis::symmetric(4.0, 33).unwrap();
    let window = 8.0 / (lens.focal_gdd * inputs.step);
    let coarse = unitarity_residual(&tf, inputs, Axis::symmetric(6.0 * window, 201).unwrap(), window);
    let fine = unitarity_residual(&tf, inputs, Axis::symmetric(6.0 * window, 801).unwrap(), window);
    if !(fine < coarse && fine < 1e-3) {
        return Err(format!("unitarity residual {coarse:.2e} -> {fine:.2e}"));
    }
    Ok(format!(
        "sigma_o_out={s_out:.4} (sigma_e={se:.4}), width/|M|dt_o-1={:.1e}, unitarity {coarse:.1e} -> {fine:.1e}",
        width / (2.1 * to) - 1.0
    ))
}

fn c9_chirped_pulse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let p = ChirpedPulse::new(rng.gen_range(0.2..3.0), rng.gen_range(-20.0..20.0)).unwrap();
        let (a, b) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let two = p.propagate(a).propagate(b);
        let one = p.propagate(a + b);
        worst = worst.max((two.duration - one.duration).abs() / one.duration);
        if one.chirp.is_finite() {
            worst = worst.max((two.chirp - one.chirp).abs() / one.chirp.abs());
        }
    }
    if !(worst <= 1e-12) {
        return Err(format!("composition mismatch {worst:.2e}"));
    }
    for (t0, d) in [(0.5, 1.0), (1.2, -3.0), (0.1, 0.02)] {
        let got = ChirpedPulse::transform_limited(t0).unwrap().propagate(d).duration;
        let want = (t0 * t0 + d * d / (4.0 * t0 * t0)).sqrt();
        if got != want {
            return Err(format!("transform-limited broadening {got} != {want}"));
        }
    }
    Ok(format!("composition worst {worst:.1e}; broadening exact"))
}

fn quoted(name: &str, got: f64, quoted: f64, last_digit: f64) -> Result<(), String> {
    close(name, got, quoted, (0.01 * quoted).max(0.5 * last_digit))
}

fn c10_aperture() -> Outcome {
    let m = bbo();
    let sigma_o = m.spectral_sigma(Photon::Ordinary);
    let (_, ta) = Realization::Eopm {
        theta_max: 25.0,
        f_rf_ghz: 40.0,
    }
    .focal_gdd_and_aperture()
    .map_err(|e| e.to_string())?;
    rel("EOPM T_A from 40 GHz", ta, 4.0, 0.01)?;

    let eopm = TimeLensSpec::from_realization(
        Realization::EopmWindow {
            theta_max: 25.0,
            aperture_ps: 4.0,
        },
        -2.1,
        0.0,
    )
    .unwrap();
    let r = check_aperture(&eopm, sigma_o, DEFAULT_SAFETY).map_err(|e| e.to_string())?;
    rel("EOPM T_A", r.aperture, 4.0, 0.01)?;
    rel("EOPM D_f", r.focal_gdd, 0.64, 0.01)?;
    rel("EOPM lower", r.lower_sigma4, 0.28, 0.01)?;
    rel("EOPM upper", r.upper_sigma, 1.8, 0.01)?;

    let fwm = TimeLensSpec::from_realization(
        Realization::Fwm {
            tau0: 0.1,
            pump_gdd: -44.0,
        },
        -2.1,
        0.0,
    )
    .unwrap();
    let f = check_aperture(&fwm, sigma_o, DEFAULT_SAFETY).map_err(|e| e.to_string())?;
    rel("FWM D_f", f.focal_gdd, 22.0, 0.01)?;
    quoted("FWM lower", f.lower_sigma4, 0.0002, 0.0001)?;
    rel("FWM upper", f.upper_sigma, 16.0, 0.01)?;
    Ok(format!(
        "EOPM T_A={:.3} D_f={:.3} bounds ({:.3}, {:.3}); FWM D_f={:.1} bounds ({:.2e}, {:.2})",
        r.aperture, r.focal_gdd, r.lower_sigma4, r.upper_sigma, f.focal_gdd, f.lower_sigma4, f.upper_sigma
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("BBO pipeline", c1_bbo_pipeline),
        ("derived shapes", c2_derived_shapes),
        ("oracle equivalence", c3_oracle_lattice),
        ("matrix-path equivalence", c4_matrix_path),
        ("limits", c5_limits),
        ("visibility-vs-M scan", c6_visibility_scan),
        ("source normalization", c7_normalization),
        ("post-lens", c8_post_lens),
        ("chirped pulse composition", c9_chirped_pulse),
        ("aperture feasibility", c10_aperture),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!(
                "criterion {:>2} {name}: PASS ({detail}) [{:.1}s]",
                k + 1,
                start.elapsed().as_secs_f64()
            ),
            Err(why) => {
                println!("criterion {:>2} {name}: FAIL ({why})", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
