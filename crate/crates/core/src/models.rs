//! System catalogue, physical parameters and shared numeric settings.
//!
//! Units are natural (m = ħ = 1) unless a model overrides them; every formula
//! in the crate keeps ħ explicit.

use alloc::format;
use alloc::sync::Arc;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// A propagator amplitude or phase factor.
pub type ComplexAmplitude = Complex64;

/// Default cutoff on |sin ωT| below which T is treated as a caustic.
pub const DEFAULT_CAUSTIC_TOL: f64 = 1e-9;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A one-dimensional potential V(x), sampled on `domain` when a range of
/// values is needed. Derivatives fall back to centered differences with step
/// 1e-5 · max(1, |x|) when no analytic form is attached.
#[derive(Clone)]
pub struct Potential {
    value: RealFn,
    first: Option<RealFn>,
    second: Option<RealFn>,
    domain: (f64, f64),
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("domain", &self.domain)
            .field("analytic_first", &self.first.is_some())
            .field("analytic_second", &self.second.is_some())
            .finish()
    }
}

impl Potential {
    pub fn new(value: impl Fn(f64) -> f64 + Send + Sync + 'static, domain: (f64, f64)) -> Self {
        Self {
            value: Arc::new(value),
            first: None,
            second: None,
            domain,
        }
    }

    pub fn with_derivatives(
        mut self,
        first: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.first = Some(Arc::new(first));
        self.second = Some(Arc::new(second));
        self
    }

    /// V = ½ m ω² x² with analytic derivatives.
    pub fn harmonic(mass: f64, omega: f64) -> Self {
        let k = mass * omega * omega;
        Self::new(move |x| 0.5 * k * x * x, (-10.0, 10.0))
            .with_derivatives(move |x| k * x, move |_| k)
    }

    /// V = ½ m ω² x² + g x⁴ / 4.
    pub fn quartic(mass: f64, omega: f64, g: f64) -> Self {
        let k = mass * omega * omega;
        Self::new(move |x| 0.5 * k * x * x + 0.25 * g * x.powi(4), (-10.0, 10.0))
            .with_derivatives(move |x| k * x + g * x.powi(3), move |x| k + 3.0 * g * x * x)
    }

    /// V = m ω² (1 − cos x); small oscillations have frequency ω.
    pub fn pendulum(mass: f64, omega: f64) -> Self {
        let k = mass * omega * omega;
        Self::new(move |x| k * (1.0 - x.cos()), (-PI, PI))
            .with_derivatives(move |x| k * x.sin(), move |x| k * x.cos())
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn first_derivative(&self, x: f64) -> f64 {
        match &self.first {
            Some(d) => d(x),
            None => {
                let h = fd_step(x);
                (self.value(x + h) - self.value(x - h)) / (2.0 * h)
            }
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match &self.second {
            Some(d) => d(x),
            None => {
                let h = fd_step(x);
                (self.value(x + h) - 2.0 * self.value(x) + self.value(x - h)) / (h * h)
            }
        }
    }

    /// max V − min V over the domain, sampled on 257 points plus `extra`.
    pub(crate) fn value_range(&self, extra: &[f64]) -> f64 {
        let (a, b) = self.domain;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let samples = (0..=256)
            .map(|i| a + (b - a) * i as f64 / 256.0)
            .chain(extra.iter().copied());
        for x in samples {
            let v = self.value(x);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi - lo
    }
}

fn fd_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

#[derive(Clone, Debug)]
pub enum ModelKind {
    Free { mass: f64 },
    Oscillator { mass: f64, omega: f64 },
    ForcedOscillator { mass: f64, omega: f64, force: f64 },
    /// Charge in a uniform perpendicular field; `omega` is eB/2m, half the
    /// Larmor frequency.
    MagneticPlane { mass: f64, omega: f64 },
    Potential1D { mass: f64, potential: Potential },
}

#[derive(Clone, Debug)]
pub struct SystemModel {
    pub kind: ModelKind,
    pub hbar: f64,
}

impl SystemModel {
    pub fn new(kind: ModelKind) -> Self {
        Self { kind, hbar: 1.0 }
    }

    pub fn free(mass: f64) -> Self {
        Self::new(ModelKind::Free { mass })
    }

    pub fn oscillator(mass: f64, omega: f64) -> Self {
        Self::new(ModelKind::Oscillator { mass, omega })
    }

    pub fn forced(mass: f64, omega: f64, force: f64) -> Self {
        Self::new(ModelKind::ForcedOscillator { mass, omega, force })
    }

    pub fn magnetic(mass: f64, omega: f64) -> Self {
        Self::new(ModelKind::MagneticPlane { mass, omega })
    }

    pub fn potential(mass: f64, potential: Potential) -> Self {
        Self::new(ModelKind::Potential1D { mass, potential })
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn mass(&self) -> f64 {
        match self.kind {
            ModelKind::Free { mass }
            | ModelKind::Oscillator { mass, .. }
            | ModelKind::ForcedOscillator { mass, .. }
            | ModelKind::MagneticPlane { mass, .. }
            | ModelKind::Potential1D { mass, .. } => mass,
        }
    }

    /// The oscillator frequency ω, if the model has one.
    pub fn frequency(&self) -> Option<f64> {
        match self.kind {
            ModelKind::Oscillator { omega, .. }
            | ModelKind::ForcedOscillator { omega, .. }
            | ModelKind::MagneticPlane { omega, .. } => Some(omega),
            ModelKind::Free { .. } | ModelKind::Potential1D { .. } => None,
        }
    }

    /// Number of configuration-space dimensions.
    pub fn dimension(&self) -> usize {
        match self.kind {
            ModelKind::MagneticPlane { .. } => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::Free { .. } => "free",
            ModelKind::Oscillator { .. } => "oscillator",
            ModelKind::ForcedOscillator { .. } => "forced oscillator",
            ModelKind::MagneticPlane { .. } => "magnetic plane",
            ModelKind::Potential1D { .. } => "potential",
        }
    }

    /// True for models whose action is quadratic in the path.
    pub fn is_quadratic(&self) -> bool {
        !matches!(self.kind, ModelKind::Potential1D { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !finite_pos(self.hbar) {
            return Err(Error::invalid(format!("hbar must be > 0, got {}", self.hbar)));
        }
        if !finite_pos(self.mass()) {
            return Err(Error::invalid(format!("mass must be > 0, got {}", self.mass())));
        }
        if let Some(omega) = self.frequency() {
            if !(omega.is_finite() && omega >= 0.0) {
                return Err(Error::invalid(format!("omega must be >= 0, got {omega}")));
            }
        }
        if let ModelKind::ForcedOscillator { force, .. } = self.kind {
            if !force.is_finite() {
                return Err(Error::invalid("force must be finite"));
            }
        }
        Ok(())
    }

    pub(crate) fn unsupported(&self, operation: &'static str) -> Error {
        Error::UnsupportedModel {
            operation,
            model: self.name(),
        }
    }
}

/// Settings shared by the numeric routes.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericConfig {
    /// Cutoff on |sin ωT| for caustic classification.
    pub caustic_tol: f64,
    /// Time-grid intervals for paths, second-variation matrices and Jacobi fields.
    pub grid_points: usize,
    /// Number of Fourier modes in the eigenvalue product.
    pub mode_count: usize,
    /// Oscillator eigenstates kept in spectral sums.
    pub hermite_terms: usize,
    /// Half-width of the position grid for wave functions.
    pub quad_domain_halfwidth: f64,
    /// Points on the position grid.
    pub quad_points: usize,
    /// Damping η of the spectral sum (z = e^{−iωT−η}).
    pub damping_eta: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            caustic_tol: DEFAULT_CAUSTIC_TOL,
            grid_points: 2048,
            mode_count: 10_000,
            hermite_terms: 400,
            quad_domain_halfwidth: 12.0,
            quad_points: 4096,
            damping_eta: 0.1,
        }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.caustic_tol > 0.0 && self.caustic_tol <= 1e-3) {
            return Err(Error::invalid(format!(
                "caustic_tol must lie in (0, 1e-3], got {}",
                self.caustic_tol
            )));
        }
        if self.grid_points < 64 {
            return Err(Error::invalid(format!(
                "grid_points must be >= 64, got {}",
                self.grid_points
            )));
        }
        if self.mode_count == 0 || self.hermite_terms == 0 || self.quad_points < 2 {
            return Err(Error::invalid("mode_count, hermite_terms and quad_points must be positive"));
        }
        if !(self.quad_domain_halfwidth > 0.0) {
            return Err(Error::invalid("quad_domain_halfwidth must be > 0"));
        }
        if !(self.damping_eta >= 0.0) {
            return Err(Error::invalid("damping_eta must be >= 0"));
        }
        Ok(())
    }
}

/// Position of T relative to the caustic times Nπ/ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CausticIndex {
    /// Nπ < ωT < (N+1)π.
    Regular(u32),
    /// ωT = Nπ within the caustic tolerance.
    Caustic(u32),
}

impl CausticIndex {
    pub fn count(self) -> u32 {
        match self {
            CausticIndex::Regular(n) | CausticIndex::Caustic(n) => n,
        }
    }

    pub fn is_caustic(self) -> bool {
        matches!(self, CausticIndex::Caustic(_))
    }
}

/// Oscillation period τ = 2π/ω.
pub fn period(model: &SystemModel) -> Result<f64> {
    match model.frequency() {
        Some(omega) if omega > 0.0 => Ok(2.0 * PI / omega),
        Some(_) => Err(Error::invalid("period of a zero frequency")),
        None => Err(model.unsupported("period")),
    }
}

/// Classify T for frequency `omega`. A zero frequency never has caustics.
pub fn caustic_index_for(omega: f64, t: f64, tol: f64) -> CausticIndex {
    if omega == 0.0 {
        return CausticIndex::Regular(0);
    }
    let phase = omega * t;
    // Near T = 0 a small |sin ωT| is the short-time limit, not a focus.
    if phase.sin().abs() <= tol && phase > 0.5 * PI {
        CausticIndex::Caustic((phase / PI).round().max(0.0) as u32)
    } else {
        CausticIndex::Regular((phase / PI).floor().max(0.0) as u32)
    }
}

/// Maslov counting for `model` at time `t`. For the magnetic plane N counts
/// full Larmor periods, which is again floor(ωT/π) with ω = eB/2m.
pub fn caustic_index(model: &SystemModel, t: f64, tol: f64) -> Result<CausticIndex> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("T must be > 0, got {t}")));
    }
    match model.kind {
        ModelKind::Free { .. } => Ok(CausticIndex::Regular(0)),
        ModelKind::Potential1D { .. } => Err(model.unsupported("caustic_index")),
        _ => Ok(caustic_index_for(model.frequency().unwrap_or(0.0), t, tol)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn periods() {
        assert!((period(&SystemModel::oscillator(1.0, 1.0)).unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!((period(&SystemModel::oscillator(1.0, 2.0)).unwrap() - PI).abs() < 1e-15);
        assert!((period(&SystemModel::magnetic(1.0, 0.5)).unwrap() - 4.0 * PI).abs() < 1e-15);
        assert!(matches!(
            period(&SystemModel::free(1.0)),
            Err(Error::UnsupportedModel { .. })
        ));
    }

    #[test]
    fn caustic_classification() {
        let osc = SystemModel::oscillator(1.0, 1.0);
        assert_eq!(caustic_index(&osc, 2.5 * PI, 1e-9).unwrap(), CausticIndex::Regular(2));
        assert_eq!(caustic_index(&osc, PI, 1e-9).unwrap(), CausticIndex::Caustic(1));
        assert_eq!(
            caustic_index(&SystemModel::free(1.0), 7.0, 1e-9).unwrap(),
            CausticIndex::Regular(0)
        );
        assert!(caustic_index(&osc, 0.0, 1e-9).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(NumericConfig::default().validate().is_ok());
        let bad = NumericConfig {
            grid_points: 10,
            ..NumericConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = NumericConfig {
            caustic_tol: 1e-2,
            ..NumericConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn model_validation() {
        assert!(SystemModel::oscillator(1.0, 1.0).validate().is_ok());
        assert!(SystemModel::oscillator(-1.0, 1.0).validate().is_err());
        assert!(SystemModel::oscillator(1.0, -1.0).validate().is_err());
        assert!(SystemModel::free(1.0).with_hbar(0.0).validate().is_err());
    }

    #[test]
    fn finite_difference_derivatives() {
        let v = Potential::new(|x| x.powi(3), (-2.0, 2.0));
        assert!((v.first_derivative(1.5) - 6.75).abs() < 1e-8);
        assert!((v.second_derivative(1.5) - 9.0).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn caustic_index_monotone(omega in 0.1f64..3.0, t in 0.01f64..40.0, dt in 0.0f64..5.0) {
            let a = caustic_index_for(omega, t, 1e-9).count();
            let b = caustic_index_for(omega, t + dt, 1e-9).count();
            prop_assert!(a <= b);
        }

        #[test]
        fn regular_count_is_floor(omega in 0.1f64..3.0, t in 0.01f64..40.0) {
            if (omega * t).sin().abs() > 1e-9 {
                prop_assert_eq!(
                    caustic_index_for(omega, t, 1e-9),
                    CausticIndex::Regular((omega * t / PI).floor() as u32)
                );
            }
        }
    }
}
