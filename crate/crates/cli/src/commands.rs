use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use timelens_core::grid::Axis;
use timelens_core::hom::{self, DimensionlessParams, HomCurve};
use timelens_core::lens::{check_aperture, input_fraunhofer, ApertureReport, DEFAULT_SAFETY};
use timelens_core::oracle::{verify_suite, QuadratureSpec, Report, SuiteOptions};
use timelens_core::source::{GridSpec, JsaGrid, Photon};

use crate::config::Setup;
use crate::plots;

/// Runtime overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub grid_n: Option<usize>,
    pub safety_factor: Option<f64>,
}

/// Files written plus text for stdout.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub text: String,
}

struct Output {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Output {
    fn new(setup: &Setup, o: &Overrides) -> Result<Self> {
        let dir = o.out.clone().unwrap_or_else(|| setup.config.output.dir.clone());
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir, files: Vec::new() })
    }

    fn write(&mut self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        f(&mut w).and_then(|_| w.flush()).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(path);
        Ok(())
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        self.write(name, |w| w.write_all(body.as_bytes()))
    }

    fn finish(self, text: String) -> Outcome {
        Outcome { files: self.files, text }
    }
}

fn grid_points(setup: &Setup, o: &Overrides) -> usize {
    o.grid_n.unwrap_or(setup.config.grid.points)
}

/// Summary rows (name, value, unit) of the source.
pub fn source_summary(setup: &Setup) -> Result<Vec<(&'static str, f64, &'static str)>> {
    let m = &setup.model;
    let (so, se) = m.spectral_sigmas();
    let (to, te) = m.temporal_sigmas();
    let m_opt = DimensionlessParams::with_d(m, 1.0, 1.0)?.optimal_magnification();
    Ok(vec![
        ("theta_p", setup.crystal.cut_angle_deg, "deg"),
        ("Omega_p", m.omega_p, "rad/ps"),
        ("tau_p", setup.pump.duration_fwhm(), "ps"),
        ("tau_o", m.tau_o, "ps"),
        ("tau_e", m.tau_e, "ps"),
        ("sigma_o", so, "rad/ps"),
        ("sigma_e", se, "rad/ps"),
        ("sigma_o/sigma_e", m.width_ratio(), ""),
        ("dt_o", to, "ps"),
        ("dt_e", te, "ps"),
        ("sigma_cw", m.sigma_cw(), "rad/ps"),
        ("M_opt", m_opt, ""),
        ("P_b", m.biphoton_probability(), ""),
    ])
}

pub fn cmd_source(setup: &Setup, o: &Overrides) -> Result<Outcome> {
    let mut out = Output::new(setup, o)?;
    let m = &setup.model;
    let spec = GridSpec {
        points: grid_points(setup, o),
        half_width_sigmas: setup.config.grid.half_width_sigmas,
    };
    let grid = JsaGrid::compute(m, setup.mode, spec)?;
    out.write("jsa.csv", |w| grid.write_csv(w))?;
    out.write("jsa_abs.txt", |w| grid.write_matrix(w))?;
    out.write("spectra.csv", |w| {
        writeln!(w, "omega_rad_ps,S_o,S_e")?;
        for x in grid.omega.points() {
            writeln!(w, "{},{},{}", x, m.spectrum(Photon::Ordinary, x), m.spectrum(Photon::Extraordinary, x))?;
        }
        Ok(())
    })?;
    let (to, te) = m.temporal_sigmas();
    let times = Axis::symmetric(6.0 * to.max(te), 241)?;
    let (po, pe) = (m.intensity_peak_time(Photon::Ordinary), m.intensity_peak_time(Photon::Extraordinary));
    out.write("intensity.csv", |w| {
        writeln!(w, "t_from_peak_ps,I_o,I_e")?;
        for t in times.points() {
            writeln!(
                w,
                "{},{},{}",
                t,
                m.intensity(Photon::Ordinary, po + t),
                m.intensity(Photon::Extraordinary, pe + t)
            )?;
        }
        Ok(())
    })?;
    let rows = source_summary(setup)?;
    out.write("summary.csv", |w| {
        writeln!(w, "quantity,value,unit")?;
        for (k, v, u) in &rows {
            writeln!(w, "{k},{v},{u}")?;
        }
        Ok(())
    })?;
    let mut text = String::new();
    for (k, v, u) in &rows {
        writeln!(text, "{k:<16}{v:>14.6} {u}").unwrap();
    }
    writeln!(text, "peak times      {po:.4} ps (o), {pe:.4} ps (e)").unwrap();
    if let Some(w) = &grid.warning {
        writeln!(text, "warning: {w}").unwrap();
    }
    out.text("summary.txt", &text)?;
    out.text("plot_jsa.py", plots::JSA)?;
    Ok(out.finish(text))
}

pub fn cmd_hom(setup: &Setup, o: &Overrides) -> Result<Outcome> {
    let mut out = Output::new(setup, o)?;
    let m = &setup.model;
    let sc = m.sigma_cw();
    let scan = &setup.config.scan;
    let taus: Vec<f64> = scan.delta_tau.samples().iter().map(|x| x / sc).collect();
    let lens = &setup.lens;
    let p = lens.params(m)?;

    let mut curves: Vec<(String, HomCurve)> = Vec::new();
    curves.push((format!("lens D={} M={}", fmt_g(p.d), fmt_g(p.m)), hom::hom_scan(&p, lens.delta_t, &taus)?));
    for &d in &scan.hom_d {
        let q = DimensionlessParams::with_d(m, d, lens.magnification)?;
        curves.push((format!("lens D={} M={}", fmt_g(d), fmt_g(q.m)), hom::hom_scan(&q, lens.delta_t, &taus)?));
    }
    let lensless_v = hom::lensless_p_int(&p, 0.0);
    curves.push((
        "lensless".into(),
        HomCurve::from_fn(0.0, &taus, 0.0, lensless_v, |x| hom::lensless_p_int(&p, x))?,
    ));
    curves.push(("cw".into(), HomCurve::from_fn(0.0, &taus, 0.0, 1.0, |x| hom::cw_p_int(sc, x))?));

    out.write("hom_curves.csv", |w| {
        writeln!(w, "curve,delta_tau_ps,p_int,normalized_rate")?;
        for (name, c) in &curves {
            for i in 0..c.delta_tau.len() {
                writeln!(w, "{name},{},{},{}", c.delta_tau[i], c.p_int[i], c.normalized_rate[i])?;
            }
        }
        Ok(())
    })?;

    let s = &scan.surface;
    let q = DimensionlessParams::with_d(m, s.d, s.magnification)?;
    let surface = hom::hom_surface(&q, &s.delta_t.samples(), &s.delta_tau.samples())?;
    out.write("hom_surface.csv", |w| surface.write_csv(w))?;
    out.text("plot_hom.py", plots::HOM)?;
    out.text("plot_surface.py", plots::SURFACE)?;

    let mut text = String::new();
    writeln!(text, "{:<28}{:>12}{:>14}", "curve", "visibility", "dip at (ps)").unwrap();
    for (name, c) in &curves {
        writeln!(text, "{name:<28}{:>12.6}{:>14.6}", c.visibility, c.delta_tau_min + 0.0).unwrap();
    }
    let (dt, dtau) = surface.argmin();
    write!(
        text,
        "surface D={} M={}: coincidence minimum at dt={dt:.4} ps, dtau={dtau:.4} ps",
        fmt_g(s.d),
        fmt_g(s.magnification)
    )
    .unwrap();
    Ok(out.finish(text))
}

pub fn cmd_scan(setup: &Setup, o: &Overrides) -> Result<Outcome> {
    let mut out = Output::new(setup, o)?;
    let m = &setup.model;
    let scan = &setup.config.scan;
    let ms = scan.magnification.samples();
    let mut rows = Vec::new();
    let mut text = String::new();
    writeln!(text, "{:<10}{:>10}{:>14}", "D", "best |M|", "visibility").unwrap();
    for &d in &scan.d_values {
        let p = DimensionlessParams::with_d(m, d, 1.0)?;
        let v = hom::visibility_vs_magnification(&p, &ms)?;
        let (k, best) = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, v)| (k, *v))
            .unwrap_or((0, f64::NAN));
        writeln!(text, "{:<10}{:>10.4}{:>14.6}", fmt_g(d), ms[k], best).unwrap();
        rows.push((d, v));
    }
    out.write("visibility_scan.csv", |w| {
        writeln!(w, "d,abs_magnification,visibility")?;
        for (d, v) in &rows {
            for (mag, vis) in ms.iter().zip(v) {
                writeln!(w, "{d},{mag},{vis}")?;
            }
        }
        Ok(())
    })?;
    out.text("plot_visibility.py", plots::VISIBILITY)?;
    let m_opt = DimensionlessParams::with_d(m, 1.0, 1.0)?.optimal_magnification();
    write!(text, "optimal |M| = {m_opt:.4}").unwrap();
    Ok(out.finish(text))
}

pub fn safety(setup: &Setup, o: &Overrides) -> f64 {
    o.safety_factor
        .or(setup.config.lens.safety_factor)
        .unwrap_or(DEFAULT_SAFETY)
}

pub fn feasibility_report(setup: &Setup, o: &Overrides) -> Result<ApertureReport> {
    let sigma_o = setup.model.spectral_sigma(Photon::Ordinary);
    Ok(check_aperture(&setup.lens, sigma_o, safety(setup, o))?)
}

pub fn cmd_feasibility(setup: &Setup, o: &Overrides) -> Result<Outcome> {
    let mut out = Output::new(setup, o)?;
    let report = feasibility_report(setup, o)?;
    let sigma_o = setup.model.spectral_sigma(Photon::Ordinary);
    let fr = input_fraunhofer(&setup.lens, sigma_o, safety(setup, o))?;
    out.write("feasibility.csv", |w| ApertureReport::write_csv(std::slice::from_ref(&report), w))?;
    let mut text = format!("{report}\n");
    write!(
        text,
        "{:<28}{:>14.6e}  {}",
        "input far-field ratio",
        fr.ratio,
        if fr.satisfied { "ok" } else { "FAIL" }
    )
    .unwrap();
    out.text("feasibility.txt", &text)?;
    Ok(out.finish(text))
}

/// Oracle suite; the report is returned alongside the outcome so the caller
/// can pick the exit status.
pub fn cmd_verify(setup: &Setup, o: &Overrides) -> Result<(Outcome, Report)> {
    let mut out = Output::new(setup, o)?;
    let points = grid_points(setup, o);
    let opts = SuiteOptions {
        grid: GridSpec {
            points,
            half_width_sigmas: setup.config.grid.half_width_sigmas,
        },
        quadrature: QuadratureSpec {
            points,
            half_width: setup.config.grid.half_width_sigmas,
            ..QuadratureSpec::default()
        },
        tolerances: setup.tolerances.clone(),
    };
    opts.quadrature.validate()?;
    let report = verify_suite(&setup.model, &setup.lens, &opts)?;
    out.write("verify.csv", |w| report.write_csv(w))?;
    let text = report.to_string();
    out.text("verify.txt", &format!("{text}\n"))?;
    Ok((out.finish(text), report))
}

/// Shortest decimal form, for labels.
fn fmt_g(x: f64) -> String {
    let s = format!("{x:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

pub fn describe(files: &[PathBuf], base: &Path) -> String {
    files
        .iter()
        .map(|f| f.strip_prefix(base).unwrap_or(f).display().to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
