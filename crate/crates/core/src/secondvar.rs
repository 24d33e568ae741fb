//! The second variation Λ on Dirichlet variations: discretization, spectrum
//! and inertia.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::classical::{reference_path, Path, Point};
use crate::error::{Error, Result};
use crate::linalg::{EigenCount, Inertia, SymBanded, SymTridiagonal};
use crate::models::{caustic_index_for, ModelKind, NumericConfig, SystemModel};

/// Analytic eigenvalues λ_k = m((kπ/T)² − ω²), k = 1..=k_max, paired with
/// their degeneracy (2 for the magnetic plane, where a co-rotating frame
/// splits Λ into two copies of the oscillator problem).
pub fn eigenvalues_analytic(model: &SystemModel, t: f64, k_max: usize) -> Result<Vec<(f64, usize)>> {
    let (mass, omega, degeneracy) = match model.kind {
        ModelKind::Oscillator { mass, omega } | ModelKind::ForcedOscillator { mass, omega, .. } => {
            (mass, omega, 1)
        }
        ModelKind::MagneticPlane { mass, omega } => (mass, omega, 2),
        _ => return Err(model.unsupported("eigenvalues_analytic")),
    };
    if !(t > 0.0) || k_max == 0 {
        return Err(Error::invalid(format!("need T > 0 and k_max ≥ 1, got T = {t}, k_max = {k_max}")));
    }
    Ok((1..=k_max)
        .map(|k| {
            let q = k as f64 * PI / t;
            (mass * (q * q - omega * omega), degeneracy)
        })
        .collect())
}

/// Discretized Λ. The 2D operator interleaves (η_x, η_y) per time node.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Tridiagonal(SymTridiagonal),
    Banded(SymBanded),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondVariation {
    pub operator: Operator,
    pub dt: f64,
    pub dim: usize,
}

impl SecondVariation {
    pub fn order(&self) -> usize {
        self.counter().order()
    }

    fn counter(&self) -> &dyn EigenCount {
        match &self.operator {
            Operator::Tridiagonal(t) => t,
            Operator::Banded(b) => b,
        }
    }

    pub fn count_below(&self, shift: f64) -> usize {
        self.counter().count_below(shift)
    }

    pub fn smallest_eigenvalues(&self, count: usize) -> Vec<f64> {
        self.counter().smallest(count)
    }

    /// dt·ηᵀΛη over interior nodes: the discrete δ²S(η, η).
    pub fn quadratic_form(&self, eta: &[f64]) -> f64 {
        let q = match &self.operator {
            Operator::Tridiagonal(t) => t.quadratic_form(eta),
            Operator::Banded(b) => b.quadratic_form(eta),
        };
        self.dt * q
    }
}

/// Eigenvalue counts of the discretized Λ around `shift`.
pub fn inertia(op: &SecondVariation, shift: f64, zero_tol: f64) -> Inertia {
    op.counter().inertia(shift, zero_tol)
}

/// Null-mode tolerance 10⁻⁶·m(π/T)²: a millionth of the lowest free eigenvalue.
pub fn default_zero_tol(model: &SystemModel, t: f64) -> f64 {
    1e-6 * model.mass() * (PI / t).powi(2)
}

/// Centered second differences of Λ on `n_grid` intervals of [0, T] with
/// Dirichlet ends. The potential model samples V''(x̄(t)) from `path`.
pub fn assemble_operator(model: &SystemModel, path: &Path, n_grid: usize) -> Result<SecondVariation> {
    if n_grid < 64 {
        return Err(Error::invalid(format!("grid must have ≥ 64 intervals, got {n_grid}")));
    }
    let t = path.duration();
    if !(t > 0.0) {
        return Err(Error::invalid("path has zero duration"));
    }
    let dt = t / n_grid as f64;
    let interior = n_grid - 1;
    let mass = model.mass();
    let kinetic = mass / (dt * dt);
    let curvature = |i: usize| -> f64 {
        match &model.kind {
            ModelKind::Free { .. } | ModelKind::MagneticPlane { .. } => 0.0,
            ModelKind::Oscillator { mass, omega } | ModelKind::ForcedOscillator { mass, omega, .. } => {
                mass * omega * omega
            }
            ModelKind::Potential1D { potential, .. } => {
                let t_i = (i + 1) as f64 * dt;
                potential.second_derivative(path.position_at(t_i).x)
            }
        }
    };
    let operator = match model.kind {
        ModelKind::MagneticPlane { mass, omega } => {
            let mut b = SymBanded::zeros(2 * interior, 3);
            let coupling = mass * omega / dt;
            for i in 0..interior {
                let (x, y) = (2 * i, 2 * i + 1);
                b.add(x, x, 2.0 * kinetic);
                b.add(y, y, 2.0 * kinetic);
                if i + 1 < interior {
                    let (xn, yn) = (2 * i + 2, 2 * i + 3);
                    b.add(xn, x, -kinetic);
                    b.add(yn, y, -kinetic);
                    // 2mω d/dt coupling x_i ↔ y_{i+1}, and its transpose.
                    b.add(yn, x, coupling);
                    b.add(xn, y, -coupling);
                }
            }
            Operator::Banded(b)
        }
        _ => {
            let diag = (0..interior).map(|i| 2.0 * kinetic - curvature(i)).collect();
            let off = alloc::vec![-kinetic; interior.saturating_sub(1)];
            Operator::Tridiagonal(SymTridiagonal::new(diag, off))
        }
    };
    Ok(SecondVariation {
        operator,
        dt,
        dim: model.dimension(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    pub n_negative: usize,
    pub n_zero: usize,
    pub n_positive_checked: usize,
    pub leading_eigenvalues: Vec<f64>,
    pub zero_tol: f64,
}

const LEADING: usize = 6;

/// Inertia and leading eigenvalues of Λ along `path`.
pub fn spectrum_along(model: &SystemModel, path: &Path, cfg: &NumericConfig) -> Result<SpectrumReport> {
    let op = assemble_operator(model, path, cfg.grid_points)?;
    let zero_tol = default_zero_tol(model, path.duration());
    let Inertia { below, at, above } = inertia(&op, 0.0, zero_tol);
    Ok(SpectrumReport {
        n_negative: below,
        n_zero: at,
        n_positive_checked: above,
        leading_eigenvalues: op.smallest_eigenvalues(LEADING),
        zero_tol,
    })
}

/// Spectrum report for a quadratic model, whose Λ does not depend on the path.
pub fn spectrum(model: &SystemModel, t: f64, cfg: &NumericConfig) -> Result<SpectrumReport> {
    let path = reference_path(model, t, cfg.grid_points)?;
    spectrum_along(model, &path, cfg)
}

/// Null modes of Λ at a caustic, sampled like a path, each with ∫|η|²dt = T/2.
#[derive(Clone, Debug, PartialEq)]
pub struct NullModes {
    pub dt: f64,
    pub modes: Vec<Vec<Point>>,
}

/// η(t) = sin ωt for the line models; for the magnetic plane the two
/// rotated copies R(−ωt)(sin ωt, 0) and R(−ωt)(0, sin ωt).
pub fn null_mode(model: &SystemModel, t: f64, cfg: &NumericConfig) -> Result<NullModes> {
    let omega = match model.kind {
        ModelKind::Free { .. } => return Err(Error::NotACaustic { t }),
        ModelKind::Potential1D { .. } => return Err(model.unsupported("null_mode")),
        _ => model.frequency().unwrap_or(0.0),
    };
    if omega == 0.0 || !caustic_index_for(omega, t, cfg.caustic_tol).is_caustic() {
        return Err(Error::NotACaustic { t });
    }
    let n = cfg.grid_points;
    let dt = t / n as f64;
    let sample = |f: &dyn Fn(f64) -> Point| (0..=n).map(|i| f(i as f64 * dt)).collect::<Vec<_>>();
    let modes = if model.dimension() == 2 {
        alloc::vec![
            sample(&|s| {
                let (sn, cs) = (omega * s).sin_cos();
                Point::new(cs * sn, -sn * sn)
            }),
            sample(&|s| {
                let (sn, cs) = (omega * s).sin_cos();
                Point::new(sn * sn, cs * sn)
            }),
        ]
    } else {
        alloc::vec![sample(&|s| Point::line((omega * s).sin()))]
    };
    Ok(NullModes { dt, modes })
}
