//! Two-arm interference: one packet amplitude reaches the detector along a
//! reference arm, another through the oscillator focus. Comparing each arm
//! with its Maslov-free semiclassical prediction isolates the phase jump.

use alloc::format;
use alloc::string::String;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermite_oracle::{evolve, evolve_spectral, Gaussian, WaveFunction};
use crate::kernels::quadratic_kernel;
use crate::models::{caustic_index_for, CausticIndex, NumericConfig, SystemModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArmKind {
    Free,
    Oscillator,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arm {
    pub kind: ArmKind,
    pub duration: f64,
    pub source: f64,
    pub detector: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterferenceConfig {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
    /// Width σ of the source packet.
    pub width: f64,
    pub arms: [Arm; 2],
}

impl InterferenceConfig {
    /// Free reference arm for a quarter period against an oscillator arm
    /// that passes the first focus, both from 0 to a detector at 0.5.
    pub fn standard(mass: f64, omega: f64, hbar: f64) -> Self {
        let tau = 2.0 * PI / omega;
        Self::with_durations(mass, omega, hbar, 0.25 * tau, 0.5 * tau + 0.25 / omega)
    }

    pub fn with_durations(mass: f64, omega: f64, hbar: f64, t_a: f64, t_b: f64) -> Self {
        let arm = |kind, duration| Arm {
            kind,
            duration,
            source: 0.0,
            detector: 0.5,
        };
        Self {
            mass,
            omega,
            hbar,
            width: 0.3,
            arms: [arm(ArmKind::Free, t_a), arm(ArmKind::Oscillator, t_b)],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArmReport {
    pub model: String,
    pub duration: f64,
    pub maslov_n: u32,
    /// Exact amplitude of the evolved packet at the detector.
    pub actual: Complex64,
    /// Same packet under the kernel with the Maslov factor removed.
    pub reference: Complex64,
    /// arg(actual/reference) in (−7π/4, π/4].
    pub extracted_phase: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceReport {
    pub arms: [ArmReport; 2],
    /// Extracted phase of arm b minus that of arm a, in (−7π/4, π/4].
    pub relative_phase: f64,
    /// −π/2 per caustic crossed by b and not by a.
    pub expected_relative_phase: f64,
    pub intensity: f64,
    pub intensity_without_maslov: f64,
}

/// Reduce to (−7π/4, π/4]: Maslov phases are non-positive quarter turns.
fn wrap(phase: f64) -> f64 {
    let mut p = phase % (2.0 * PI);
    while p > 0.25 * PI {
        p -= 2.0 * PI;
    }
    while p <= -1.75 * PI {
        p += 2.0 * PI;
    }
    p
}

fn run_arm(cfg_in: &InterferenceConfig, arm: &Arm, cfg: &NumericConfig) -> Result<ArmReport> {
    let model = match arm.kind {
        ArmKind::Free => SystemModel::free(cfg_in.mass),
        ArmKind::Oscillator => SystemModel::oscillator(cfg_in.mass, cfg_in.omega),
    }
    .with_hbar(cfg_in.hbar);
    model.validate()?;
    let maslov_n = match (arm.kind, caustic_index_for(cfg_in.omega, arm.duration, cfg.caustic_tol)) {
        (ArmKind::Free, _) => 0,
        (ArmKind::Oscillator, CausticIndex::Regular(n)) => n,
        (ArmKind::Oscillator, CausticIndex::Caustic(n)) => {
            return Err(Error::CausticTime {
                t: arm.duration,
                maslov_n: n,
            })
        }
    };
    let packet = Gaussian::new(arm.source, cfg_in.width, 0.0);
    let osc_model = SystemModel::oscillator(cfg_in.mass, cfg_in.omega).with_hbar(cfg_in.hbar);
    let psi = WaveFunction::on_grid(&osc_model, cfg, |x| packet.value(x));
    let evolved = match arm.kind {
        ArmKind::Free => evolve(&model, &psi, arm.duration, cfg)?,
        ArmKind::Oscillator => evolve_spectral(&model, &psi, arm.duration, cfg)?,
    };
    let actual = evolved.value_at(arm.detector);
    let mut q = quadratic_kernel(&model, arm.duration, cfg)?;
    q.prefactor = Complex64::from_polar(q.prefactor.norm(), -0.25 * PI);
    let reference = packet.propagate(&q, arm.detector);
    Ok(ArmReport {
        model: String::from(model.name()),
        duration: arm.duration,
        maslov_n,
        actual,
        reference,
        extracted_phase: wrap((actual / reference).arg()),
    })
}

/// Propagate the source packet along both arms and compare with the
/// Maslov-free prediction.
pub fn interfere(config: &InterferenceConfig, cfg: &NumericConfig) -> Result<InterferenceReport> {
    let [a, b] = &config.arms;
    if (a.source - b.source).abs() > 1e-12 || (a.detector - b.detector).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "arms must share endpoints: ({}, {}) vs ({}, {})",
            a.source, a.detector, b.source, b.detector
        )));
    }
    if !(config.width > 0.0) {
        return Err(Error::invalid("packet width must be > 0"));
    }
    let ra = run_arm(config, a, cfg)?;
    let rb = run_arm(config, b, cfg)?;
    let relative_phase = wrap(rb.extracted_phase - ra.extracted_phase);
    let expected = -0.5 * PI * (f64::from(rb.maslov_n) - f64::from(ra.maslov_n));
    Ok(InterferenceReport {
        relative_phase,
        expected_relative_phase: expected,
        intensity: (ra.actual + rb.actual).norm_sqr(),
        intensity_without_maslov: (ra.reference + rb.reference).norm_sqr(),
        arms: [ra, rb],
    })
}
