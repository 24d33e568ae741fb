//! Propagators K(x2, T | x1, 0) with the Maslov phase made explicit.
//!
//! All square roots of i follow e^{−iπ/4}; the Maslov integer is always
//! counted, never read off a branch cut.

use alloc::format;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::classical::{
    action_closed, analytic_endpoint_hessian, forced_action, magnetic_action, oscillator_action,
    principal_function_hessian, solve_boundary, ClassicalSolution, EndpointHessian, Point,
};
use crate::error::{Error, Result};
use crate::modeproduct::maslov_phase;
use crate::models::{caustic_index_for, CausticIndex, ModelKind, NumericConfig, SystemModel};
use crate::morse::morse_index_along;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelValue {
    Regular {
        amplitude: Complex64,
        maslov_n: u32,
    },
    /// phase·e^{i·extra_phase}·δ(x2 − c − parity·(x1 − c)), c = `centre`
    /// (the force centre; 0 otherwise). For the plane the delta is 2D.
    CausticDelta {
        maslov_n: u32,
        parity: i8,
        phase: Complex64,
        dimension: usize,
        centre: f64,
        extra_phase: f64,
    },
}

impl KernelValue {
    pub fn maslov_n(&self) -> u32 {
        match *self {
            KernelValue::Regular { maslov_n, .. } | KernelValue::CausticDelta { maslov_n, .. } => maslov_n,
        }
    }

    pub fn amplitude(&self) -> Option<Complex64> {
        match *self {
            KernelValue::Regular { amplitude, .. } => Some(amplitude),
            KernelValue::CausticDelta { .. } => None,
        }
    }

    pub fn is_caustic(&self) -> bool {
        matches!(self, KernelValue::CausticDelta { .. })
    }

    /// Complete constant multiplying the delta, phase·e^{i·extra_phase}.
    pub fn delta_weight(&self) -> Option<Complex64> {
        match *self {
            KernelValue::CausticDelta {
                phase, extra_phase, ..
            } => Some(phase * Complex64::cis(extra_phase)),
            KernelValue::Regular { .. } => None,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("T must be > 0, got {t}")))
    }
}

/// (m/2πiħT)^½ e^{imΔx²/2ħT}.
pub fn free_kernel(mass: f64, hbar: f64, x1: f64, x2: f64, t: f64) -> Complex64 {
    let d = x2 - x1;
    Complex64::from_polar((mass / (2.0 * PI * hbar * t)).sqrt(), -PI / 4.0)
        * Complex64::cis(mass * d * d / (2.0 * hbar * t))
}

/// The oscillator kernel: (mω/2πħ|sin ωT|)^½ e^{−iπ/4} e^{−iπN/2} e^{iS/ħ}
/// for regular T, e^{−iπN/2} δ(x2 − (−1)ᴺx1) at T = Nπ/ω.
pub fn oscillator_kernel(mass: f64, omega: f64, hbar: f64, x1: f64, x2: f64, t: f64, caustic_tol: f64) -> Result<KernelValue> {
    check_time(t)?;
    if omega == 0.0 {
        return Ok(KernelValue::Regular {
            amplitude: free_kernel(mass, hbar, x1, x2, t),
            maslov_n: 0,
        });
    }
    Ok(match caustic_index_for(omega, t, caustic_tol) {
        CausticIndex::Caustic(n) => KernelValue::CausticDelta {
            maslov_n: n,
            parity: if n % 2 == 0 { 1 } else { -1 },
            phase: maslov_phase(n),
            dimension: 1,
            centre: 0.0,
            extra_phase: 0.0,
        },
        CausticIndex::Regular(n) => {
            let s = (omega * t).sin().abs();
            let modulus = (mass * omega / (2.0 * PI * hbar * s)).sqrt();
            let action = oscillator_action(mass, omega, x1, x2, t);
            KernelValue::Regular {
                amplitude: Complex64::from_polar(modulus, -PI / 4.0)
                    * maslov_phase(n)
                    * Complex64::cis(action / hbar),
                maslov_n: n,
            }
        }
    })
}

/// The uncorrected formula (mω/2πiħ sin ωT)^½ e^{iS/ħ} with the principal
/// square root. It agrees with [`oscillator_kernel`] only before the first
/// caustic.
pub fn naive_kernel(mass: f64, omega: f64, hbar: f64, x1: f64, x2: f64, t: f64, caustic_tol: f64) -> Result<Complex64> {
    check_time(t)?;
    if omega == 0.0 {
        return Ok(free_kernel(mass, hbar, x1, x2, t));
    }
    if let CausticIndex::Caustic(n) = caustic_index_for(omega, t, caustic_tol) {
        return Err(Error::CausticTime { t, maslov_n: n });
    }
    let arg = Complex64::new(mass * omega, 0.0) / (Complex64::new(0.0, 2.0 * PI * hbar) * (omega * t).sin());
    Ok(arg.sqrt() * Complex64::cis(oscillator_action(mass, omega, x1, x2, t) / hbar))
}

/// K_f(x2|x1) = e^{if²T/2mω²ħ} K_osc(x2 − x*, x1 − x*), x* = f/mω².
#[allow(clippy::too_many_arguments)]
pub fn forced_kernel(mass: f64, omega: f64, force: f64, hbar: f64, x1: f64, x2: f64, t: f64, caustic_tol: f64) -> Result<KernelValue> {
    check_time(t)?;
    if omega == 0.0 {
        let prefactor = free_kernel(mass, hbar, 0.0, 0.0, t);
        return Ok(KernelValue::Regular {
            amplitude: prefactor * Complex64::cis(forced_action(mass, 0.0, force, x1, x2, t) / hbar),
            maslov_n: 0,
        });
    }
    let centre = force / (mass * omega * omega);
    let extra = force * force * t / (2.0 * mass * omega * omega * hbar);
    Ok(match oscillator_kernel(mass, omega, hbar, x1 - centre, x2 - centre, t, caustic_tol)? {
        KernelValue::Regular { amplitude, maslov_n } => KernelValue::Regular {
            amplitude: amplitude * Complex64::cis(extra),
            maslov_n,
        },
        KernelValue::CausticDelta {
            maslov_n,
            parity,
            phase,
            dimension,
            ..
        } => KernelValue::CausticDelta {
            maslov_n,
            parity,
            phase,
            dimension,
            centre,
            extra_phase: extra,
        },
    })
}

/// The magnetic-plane kernel, ω = eB/2m:
/// (mω/2πiħ|sin ωT|) e^{iS_B/ħ} (−1)ᴺ, and (−1)ᴺ δ² after N full Larmor periods.
pub fn magnetic_kernel(mass: f64, omega: f64, hbar: f64, p1: Point, p2: Point, t: f64, caustic_tol: f64) -> Result<KernelValue> {
    check_time(t)?;
    let d = p2 - p1;
    if omega == 0.0 {
        return Ok(KernelValue::Regular {
            amplitude: Complex64::from_polar(mass / (2.0 * PI * hbar * t), -PI / 2.0)
                * Complex64::cis(mass * (d.x * d.x + d.y * d.y) / (2.0 * hbar * t)),
            maslov_n: 0,
        });
    }
    Ok(match caustic_index_for(omega, t, caustic_tol) {
        CausticIndex::Caustic(n) => KernelValue::CausticDelta {
            maslov_n: n,
            parity: 1,
            phase: maslov_phase(2 * n),
            dimension: 2,
            centre: 0.0,
            extra_phase: 0.0,
        },
        CausticIndex::Regular(n) => {
            let modulus = mass * omega / (2.0 * PI * hbar * (omega * t).sin().abs());
            let action = magnetic_action(mass, omega, p1, p2, t);
            KernelValue::Regular {
                amplitude: Complex64::from_polar(modulus, -PI / 2.0)
                    * maslov_phase(2 * n)
                    * Complex64::cis(action / hbar),
                maslov_n: n,
            }
        }
    })
}

/// Where the Van Vleck determinant comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HessianSource {
    Analytic,
    /// Nested central differences of the action with this step.
    FiniteDifference(f64),
}

/// (1/2πiħ)^{D/2} |det ∂²S/∂x1∂x2|^½ e^{−iDNπ/2} e^{iS/ħ}.
pub fn van_vleck_kernel(
    model: &SystemModel,
    x1: Point,
    x2: Point,
    t: f64,
    maslov_n: u32,
    hessian: HessianSource,
    cfg: &NumericConfig,
) -> Result<Complex64> {
    let action = action_closed(model, x1, x2, t, cfg)?;
    let h: EndpointHessian = match hessian {
        HessianSource::Analytic => analytic_endpoint_hessian(model, t, cfg)?,
        HessianSource::FiniteDifference(step) => principal_function_hessian(model, x1, x2, t, step, cfg)?,
    };
    Ok(van_vleck_assemble(model, &h, action, maslov_n))
}

fn van_vleck_assemble(model: &SystemModel, h: &EndpointHessian, action: f64, maslov_n: u32) -> Complex64 {
    let dim = h.dim as f64;
    let prefactor = Complex64::from_polar((2.0 * PI * model.hbar).powf(-0.5 * dim), -PI / 4.0 * dim);
    let n_total = maslov_n * h.dim as u32;
    prefactor * h.det().abs().sqrt() * maslov_phase(n_total) * Complex64::cis(action / model.hbar)
}

/// Closed-form kernel for any model. The potential model goes through the
/// semiclassical formula on the shooting extremal, with N its Morse index.
pub fn kernel(model: &SystemModel, x1: Point, x2: Point, t: f64, cfg: &NumericConfig) -> Result<KernelValue> {
    model.validate()?;
    let (hbar, tol) = (model.hbar, cfg.caustic_tol);
    match model.kind {
        ModelKind::Free { mass } => {
            check_time(t)?;
            Ok(KernelValue::Regular {
                amplitude: free_kernel(mass, hbar, x1.x, x2.x, t),
                maslov_n: 0,
            })
        }
        ModelKind::Oscillator { mass, omega } => oscillator_kernel(mass, omega, hbar, x1.x, x2.x, t, tol),
        ModelKind::ForcedOscillator { mass, omega, force } => {
            forced_kernel(mass, omega, force, hbar, x1.x, x2.x, t, tol)
        }
        ModelKind::MagneticPlane { mass, omega } => magnetic_kernel(mass, omega, hbar, x1, x2, t, tol),
        ModelKind::Potential1D { .. } => {
            let ClassicalSolution::Unique { path, action } = solve_boundary(model, x1, x2, t, cfg)? else {
                return Err(Error::NoConvergence(format!(
                    "no classical path from {} to {} in T = {t}",
                    x1.x, x2.x
                )));
            };
            let mu = morse_index_along(model, &path, cfg)?.morse_index as u32;
            let h = principal_function_hessian(model, x1, x2, t, 1e-4, cfg)?;
            Ok(KernelValue::Regular {
                amplitude: van_vleck_assemble(model, &h, action, mu),
                maslov_n: mu,
            })
        }
    }
}

/// K(x2|x1) = prefactor · exp(i[a(x1² + x2²) − b·x1x2 + c(x1 + x2) + d]), the
/// form every regular line kernel takes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticKernel {
    pub prefactor: Complex64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl QuadraticKernel {
    pub fn eval(&self, x1: f64, x2: f64) -> Complex64 {
        self.prefactor * Complex64::cis(self.a * (x1 * x1 + x2 * x2) - self.b * x1 * x2 + self.c * (x1 + x2) + self.d)
    }
}

/// Coefficients of the regular kernel of a line model at time `t`.
pub fn quadratic_kernel(model: &SystemModel, t: f64, cfg: &NumericConfig) -> Result<QuadraticKernel> {
    model.validate()?;
    check_time(t)?;
    let hbar = model.hbar;
    let free = |mass: f64, force: f64| QuadraticKernel {
        prefactor: free_kernel(mass, hbar, 0.0, 0.0, t),
        a: mass / (2.0 * hbar * t),
        b: mass / (hbar * t),
        c: force * t / (2.0 * hbar),
        d: -force * force * t.powi(3) / (24.0 * mass * hbar),
    };
    let (mass, omega, force) = match model.kind {
        ModelKind::Free { mass } => return Ok(free(mass, 0.0)),
        ModelKind::Oscillator { mass, omega } => (mass, omega, 0.0),
        ModelKind::ForcedOscillator { mass, omega, force } => (mass, omega, force),
        _ => return Err(model.unsupported("quadratic_kernel")),
    };
    if omega == 0.0 {
        return Ok(free(mass, force));
    }
    let n = match caustic_index_for(omega, t, cfg.caustic_tol) {
        CausticIndex::Caustic(n) => return Err(Error::CausticTime { t, maslov_n: n }),
        CausticIndex::Regular(n) => n,
    };
    let (s, co) = (omega * t).sin_cos();
    let a = mass * omega * co / (2.0 * hbar * s);
    let b = mass * omega / (hbar * s);
    let centre = force / (mass * omega * omega);
    Ok(QuadraticKernel {
        prefactor: Complex64::from_polar((mass * omega / (2.0 * PI * hbar * s.abs())).sqrt(), -PI / 4.0)
            * maslov_phase(n),
        a,
        b,
        c: centre * (b - 2.0 * a),
        d: centre * centre * (2.0 * a - b) + force * force * t / (2.0 * mass * omega * omega * hbar),
    })
}
