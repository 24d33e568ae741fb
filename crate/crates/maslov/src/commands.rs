use std::f64::consts::PI;
use std::io::Write;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use maslov_core::ComplexAmplitude as Complex64;
use maslov_core::classical::{action_closed, reference_path, solve_boundary, ClassicalSolution, Path};
use maslov_core::hermite_oracle::Oscillator;
use maslov_core::interference::{interfere, InterferenceConfig, InterferenceReport};
use maslov_core::kernels::{kernel, van_vleck_kernel, HessianSource};
use maslov_core::modeproduct::{reduced_propagator, reduced_propagator_planar};
use maslov_core::models::caustic_index;
use maslov_core::morse::morse_index_along;
use maslov_core::secondvar::spectrum_along;
use maslov_core::{Error, KernelValue, ModelKind, NumericConfig, Point, SystemModel};

use crate::args::{usage, Format, Method};
use crate::output::{fmt, nums, write_csv, write_json, Num};

const SCAN_HEADER: [&str; 10] = [
    "t",
    "method",
    "re",
    "im",
    "modulus",
    "phase_unwrapped",
    "maslov_N",
    "n_negative",
    "morse_index",
    "caustic",
];

/// One kernel evaluation: a value, or the delta that replaces it at a caustic.
#[derive(Clone, Copy, Debug)]
enum Eval {
    Value { amplitude: Complex64, maslov_n: u32 },
    Caustic { maslov_n: u32, parity: i8, weight: Complex64 },
}

impl Eval {
    fn from_kernel(k: KernelValue) -> Self {
        match k {
            KernelValue::Regular { amplitude, maslov_n } => Eval::Value { amplitude, maslov_n },
            KernelValue::CausticDelta { maslov_n, parity, .. } => Eval::Caustic {
                maslov_n,
                parity,
                weight: k.delta_weight().unwrap_or_default(),
            },
        }
    }

    fn phase(&self) -> f64 {
        match self {
            Eval::Value { amplitude, .. } => amplitude.arg(),
            Eval::Caustic { weight, .. } => weight.arg(),
        }
    }
}

pub struct Problem {
    pub model: SystemModel,
    pub x1: Point,
    pub x2: Point,
    pub cfg: NumericConfig,
}

fn evaluate(p: &Problem, method: Method, t: f64) -> Result<Eval> {
    let (model, cfg) = (&p.model, &p.cfg);
    let closed = Eval::from_kernel(kernel(model, p.x1, p.x2, t, cfg)?);
    if method == Method::Closed || (method != Method::Oracle && matches!(closed, Eval::Caustic { .. })) {
        return Ok(closed);
    }
    let hbar = model.hbar;
    let real_time_n = match closed {
        Eval::Value { maslov_n, .. } | Eval::Caustic { maslov_n, .. } => maslov_n,
    };
    match method {
        Method::Closed => unreachable!(),
        Method::Modes => {
            let (m, omega) = (model.mass(), model.frequency().unwrap_or(0.0));
            let r = match model.kind {
                ModelKind::Free { .. } | ModelKind::Oscillator { .. } | ModelKind::ForcedOscillator { .. } => {
                    reduced_propagator(m, omega, hbar, t, cfg.mode_count, cfg.caustic_tol)?
                }
                ModelKind::MagneticPlane { .. } => {
                    reduced_propagator_planar(m, omega, hbar, t, cfg.mode_count, cfg.caustic_tol)?
                }
                ModelKind::Potential1D { .. } => return Err(unsupported(method, model)),
            };
            let s = action_closed(model, p.x1, p.x2, t, cfg)?;
            let dim = model.dimension() as u32;
            Ok(Eval::Value {
                amplitude: r.reduced_propagator * Complex64::cis(s / hbar),
                maslov_n: r.negative_count / dim,
            })
        }
        Method::Vanvleck => {
            if !model.is_quadratic() {
                // The closed route for this model already is the Van Vleck formula.
                return Ok(closed);
            }
            let path = extremal(p, t)?;
            let mu = morse_index_along(model, &path, cfg)?.morse_index as u32;
            let n = mu / model.dimension() as u32;
            let amplitude = van_vleck_kernel(model, p.x1, p.x2, t, n, HessianSource::Analytic, cfg)?;
            Ok(Eval::Value { amplitude, maslov_n: n })
        }
        Method::Oracle => {
            let osc = Oscillator::from_model(model).map_err(|_| unsupported(method, model))?;
            let (centre, phase) = match model.kind {
                ModelKind::Oscillator { .. } => (0.0, 0.0),
                ModelKind::ForcedOscillator { mass, omega, force } => {
                    let w2 = mass * omega * omega;
                    (force / w2, force * force * t / (2.0 * w2 * hbar))
                }
                _ => return Err(unsupported(method, model)),
            };
            let k = osc.spectral_kernel(p.x1.x - centre, p.x2.x - centre, t, cfg.hermite_terms, cfg.damping_eta);
            Ok(Eval::Value {
                amplitude: k * Complex64::cis(phase),
                maslov_n: real_time_n,
            })
        }
    }
}

fn unsupported(method: Method, model: &SystemModel) -> anyhow::Error {
    anyhow!("method `{}` is not available for the {} model", method.name(), model.name())
}

/// The extremal the second variation is taken about.
fn extremal(p: &Problem, t: f64) -> Result<Path> {
    if p.model.is_quadratic() {
        return Ok(reference_path(&p.model, t, p.cfg.grid_points)?);
    }
    match solve_boundary(&p.model, p.x1, p.x2, t, &p.cfg)? {
        ClassicalSolution::Unique { path, .. } => Ok(path),
        _ => bail!("no unique classical path from {} to {} in T = {t}", p.x1.x, p.x2.x),
    }
}

/// Inertia count and Morse index at T; `None` where the endpoint is conjugate.
fn indices(p: &Problem, t: f64) -> Result<(Option<usize>, Option<usize>)> {
    let path = extremal(p, t)?;
    let morse = match morse_index_along(&p.model, &path, &p.cfg) {
        Ok(r) => Some(r.morse_index),
        Err(Error::EndpointConjugate { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let negative = match morse {
        Some(_) => Some(spectrum_along(&p.model, &path, &p.cfg)?.n_negative),
        None => None,
    };
    Ok((negative, morse))
}

fn units(model: &SystemModel) -> String {
    let time = match model.frequency().filter(|&w| w > 0.0) {
        Some(w) => format!("t: time, 1/omega = {}", fmt(1.0 / w)),
        None => "t: time".to_string(),
    };
    format!(
        "{time}; re, im, modulus: kernel in length^-{} for m = {}, hbar = {}; phase_unwrapped: rad",
        model.dimension(),
        fmt(model.mass()),
        fmt(model.hbar)
    )
}

/// Adds multiples of 2π so consecutive phases differ by at most π.
struct Unwrap(Option<f64>);

impl Unwrap {
    fn next(&mut self, phase: f64) -> f64 {
        let out = match self.0 {
            None => phase,
            Some(prev) => prev + (phase - prev + PI).rem_euclid(2.0 * PI) - PI,
        };
        self.0 = Some(out);
        out
    }
}

fn csv_row(t: f64, method: Method, e: &Eval, phase: f64, idx: (Option<usize>, Option<usize>)) -> Vec<String> {
    let opt = |v: Option<usize>| v.map_or(String::new(), |v| v.to_string());
    let (re, im, modulus, n, caustic) = match *e {
        Eval::Value { amplitude, maslov_n } => (
            fmt(amplitude.re),
            fmt(amplitude.im),
            fmt(amplitude.norm()),
            maslov_n,
            false,
        ),
        Eval::Caustic { maslov_n, .. } => (String::new(), String::new(), String::new(), maslov_n, true),
    };
    vec![
        fmt(t),
        method.name().into(),
        re,
        im,
        modulus,
        fmt(phase),
        n.to_string(),
        opt(idx.0),
        opt(idx.1),
        caustic.to_string(),
    ]
}

fn table(p: &Problem, methods: &[Method], times: &[f64]) -> Result<Vec<Vec<String>>> {
    let mut unwrap: Vec<Unwrap> = methods.iter().map(|_| Unwrap(None)).collect();
    let mut rows = Vec::with_capacity(times.len() * methods.len());
    for &t in times {
        let idx = indices(p, t)?;
        for (m, u) in methods.iter().zip(&mut unwrap) {
            let e = evaluate(p, *m, t).with_context(|| format!("method {} at T = {t}", m.name()))?;
            rows.push(csv_row(t, *m, &e, u.next(e.phase()), idx));
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
#[serde(untagged)]
enum KernelRecord {
    Value {
        model: &'static str,
        method: &'static str,
        t: Num,
        re: Num,
        im: Num,
        modulus: Num,
        phase: Num,
        #[serde(rename = "maslov_N")]
        maslov_n: u32,
        caustic: bool,
    },
    Caustic {
        model: &'static str,
        method: &'static str,
        t: Num,
        caustic: bool,
        #[serde(rename = "N")]
        n: u32,
        parity: i8,
        phase: Num,
    },
}

pub fn cmd_kernel(p: &Problem, t: f64, methods: &[Method], format: Format, w: &mut dyn Write) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(usage(format!("--t must be > 0, got {t}")).into());
    }
    if format == Format::Csv {
        return write_csv(w, &units(&p.model), &SCAN_HEADER, &table(p, methods, &[t])?);
    }
    let name = p.model.name();
    let mut records = Vec::new();
    for &m in methods {
        let e = evaluate(p, m, t).with_context(|| format!("method {}", m.name()))?;
        records.push(match e {
            Eval::Value { amplitude, maslov_n } => KernelRecord::Value {
                model: name,
                method: m.name(),
                t: Num(t),
                re: Num(amplitude.re),
                im: Num(amplitude.im),
                modulus: Num(amplitude.norm()),
                phase: Num(amplitude.arg()),
                maslov_n,
                caustic: false,
            },
            Eval::Caustic { maslov_n, parity, weight } => KernelRecord::Caustic {
                model: name,
                method: m.name(),
                t: Num(t),
                caustic: true,
                n: maslov_n,
                parity,
                phase: Num(weight.arg()),
            },
        });
    }
    if records.len() == 1 {
        write_json(w, &records[0])
    } else {
        write_json(w, &records)
    }
}

pub fn scan_times(t_min: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, clap::Error> {
    if !(t_min > 0.0 && t_min.is_finite()) {
        return Err(usage(format!("--t-min must be > 0, got {t_min}")));
    }
    if !(t_max > t_min && t_max.is_finite()) {
        return Err(usage(format!("--t-max must exceed --t-min, got {t_max}")));
    }
    if steps < 2 {
        return Err(usage(format!("--steps must be >= 2, got {steps}")));
    }
    let h = (t_max - t_min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i + 1 == steps { t_max } else { t_min + i as f64 * h })
        .collect())
}

pub fn cmd_scan(p: &Problem, times: &[f64], methods: &[Method], format: Format, w: &mut dyn Write) -> Result<()> {
    let rows = table(p, methods, times)?;
    match format {
        Format::Csv => write_csv(w, &units(&p.model), &SCAN_HEADER, &rows),
        Format::Json => {
            let records: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|row| {
                    SCAN_HEADER
                        .iter()
                        .zip(row)
                        .map(|(k, v)| ((*k).to_string(), json_cell(v)))
                        .collect()
                })
                .collect();
            write_json(w, &records)
        }
    }
}

fn json_cell(v: &str) -> serde_json::Value {
    if v.is_empty() {
        return serde_json::Value::Null;
    }
    match v {
        "true" => return true.into(),
        "false" => return false.into(),
        _ => {}
    }
    if let Ok(i) = v.parse::<i64>() {
        return i.into();
    }
    match v.parse::<f64>() {
        Ok(x) => serde_json::to_value(Num(x)).unwrap_or_default(),
        Err(_) => v.into(),
    }
}

#[derive(Serialize)]
struct MorseRecord {
    model: &'static str,
    t: Num,
    conjugate_times: Vec<Num>,
    multiplicities: Vec<usize>,
    morse_index: usize,
    inertia_negative: usize,
    inertia_zero: usize,
    agreement: bool,
}

pub fn cmd_morse(p: &Problem, t: f64, format: Format, w: &mut dyn Write) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(usage(format!("--t must be > 0, got {t}")).into());
    }
    let path = extremal(p, t)?;
    let report = morse_index_along(&p.model, &path, &p.cfg)?;
    let spectrum = spectrum_along(&p.model, &path, &p.cfg)?;
    let mut agreement = report.morse_index == spectrum.n_negative;
    if let Ok(c) = caustic_index(&p.model, t, p.cfg.caustic_tol) {
        agreement &= report.morse_index == (c.count() as usize) * p.model.dimension();
    }
    let (times, mult): (Vec<f64>, Vec<usize>) = report.conjugate_times.iter().copied().unzip();
    let record = MorseRecord {
        model: p.model.name(),
        t: Num(t),
        conjugate_times: nums(&times),
        multiplicities: mult,
        morse_index: report.morse_index,
        inertia_negative: spectrum.n_negative,
        inertia_zero: spectrum.n_zero,
        agreement,
    };
    match format {
        Format::Json => write_json(w, &record),
        Format::Csv => {
            let join = |v: Vec<String>| v.join(";");
            let row = vec![
                fmt(t),
                join(times.iter().map(|&x| fmt(x)).collect()),
                join(record.multiplicities.iter().map(ToString::to_string).collect()),
                record.morse_index.to_string(),
                record.inertia_negative.to_string(),
                record.inertia_zero.to_string(),
                agreement.to_string(),
            ];
            let header = [
                "t",
                "conjugate_times",
                "multiplicities",
                "morse_index",
                "inertia_negative",
                "inertia_zero",
                "agreement",
            ];
            write_csv(w, &units(&p.model), &header, &[row])
        }
    }
}

#[derive(Serialize)]
struct ArmRecord {
    model: String,
    duration: Num,
    #[serde(rename = "maslov_N")]
    maslov_n: u32,
    actual: [Num; 2],
    reference: [Num; 2],
    extracted_phase: Num,
}

#[derive(Serialize)]
struct InterferenceRecord {
    arms: Vec<ArmRecord>,
    relative_phase: Num,
    expected_relative_phase: Num,
    intensity: Num,
    intensity_without_maslov: Num,
    agreement: bool,
}

/// Allowed gap between extracted and predicted relative phase.
pub const PHASE_TOL: f64 = 1e-3;

pub fn cmd_interfere(config: &InterferenceConfig, cfg: &NumericConfig, format: Format, w: &mut dyn Write) -> Result<()> {
    let r: InterferenceReport = interfere(config, cfg)?;
    let agreement = (r.relative_phase - r.expected_relative_phase).abs() <= PHASE_TOL;
    let c = |z: Complex64| [Num(z.re), Num(z.im)];
    match format {
        Format::Json => {
            let record = InterferenceRecord {
                arms: r
                    .arms
                    .iter()
                    .map(|a| ArmRecord {
                        model: a.model.clone(),
                        duration: Num(a.duration),
                        maslov_n: a.maslov_n,
                        actual: c(a.actual),
                        reference: c(a.reference),
                        extracted_phase: Num(a.extracted_phase),
                    })
                    .collect(),
                relative_phase: Num(r.relative_phase),
                expected_relative_phase: Num(r.expected_relative_phase),
                intensity: Num(r.intensity),
                intensity_without_maslov: Num(r.intensity_without_maslov),
                agreement,
            };
            write_json(w, &record)?;
        }
        Format::Csv => {
            let header = [
                "arm",
                "model",
                "duration",
                "maslov_N",
                "re",
                "im",
                "reference_re",
                "reference_im",
                "extracted_phase",
            ];
            let mut rows: Vec<Vec<String>> = r
                .arms
                .iter()
                .zip(["a", "b"])
                .map(|(a, label)| {
                    vec![
                        label.into(),
                        a.model.clone(),
                        fmt(a.duration),
                        a.maslov_n.to_string(),
                        fmt(a.actual.re),
                        fmt(a.actual.im),
                        fmt(a.reference.re),
                        fmt(a.reference.im),
                        fmt(a.extracted_phase),
                    ]
                })
                .collect();
            let sum = r.arms[0].actual + r.arms[1].actual;
            let sum_ref = r.arms[0].reference + r.arms[1].reference;
            rows.push(vec![
                "a+b".into(),
                String::new(),
                String::new(),
                String::new(),
                fmt(sum.re),
                fmt(sum.im),
                fmt(sum_ref.re),
                fmt(sum_ref.im),
                fmt(r.relative_phase),
            ]);
            let units = format!(
                "duration: time, 1/omega = {}; amplitudes in length^-1/2; phases in rad",
                fmt(1.0 / config.omega)
            );
            write_csv(w, &units, &header, &rows)?;
        }
    }
    if !agreement {
        bail!(
            "extracted relative phase {} differs from {} by more than {PHASE_TOL}",
            r.relative_phase,
            r.expected_relative_phase
        );
    }
    Ok(())
}
