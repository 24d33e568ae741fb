//! Jacobi fields, conjugate points and the Morse index.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::classical::{reference_path, Path, Point};
use crate::error::{Error, Result};
use crate::linalg::singular_values_2x2;
use crate::models::{ModelKind, NumericConfig, SystemModel};
use crate::numeric::{bisect, golden_min, rk4_step};

/// Interior conjugate points are accepted as double roots when the local
/// minimum of |det M| falls below this fraction of its scale.
const DOUBLE_ROOT_TOL: f64 = 1e-10;
const ROOT_TOL: f64 = 1e-10;
const RANK_TOL: f64 = 1e-8;

/// 2D solutions of the Jacobi equation sampled on the path grid. Fields
/// 0..D start from ξ(0) = eᵢ, ξ̇(0) = 0; fields D..2D from ξ(0) = 0, ξ̇(0) = eᵢ.
#[derive(Clone, Debug)]
pub struct JacobiBasis {
    pub dt: f64,
    pub dim: usize,
    /// fields[j][i] = (ξ, ξ̇) of solution j at t_i.
    pub fields: Vec<Vec<(Point, Point)>>,
    model: SystemModel,
    path: Path,
}

fn jacobi_rhs(model: &SystemModel, path: &Path, t: f64, s: &[f64; 4]) -> [f64; 4] {
    let (xi, v) = (Point::new(s[0], s[1]), Point::new(s[2], s[3]));
    let a = match &model.kind {
        ModelKind::Free { .. } => Point::default(),
        ModelKind::Oscillator { omega, .. } | ModelKind::ForcedOscillator { omega, .. } => {
            xi * (-omega * omega)
        }
        ModelKind::MagneticPlane { omega, .. } => Point::new(2.0 * omega * v.y, -2.0 * omega * v.x),
        ModelKind::Potential1D { mass, potential } => {
            Point::line(-potential.second_derivative(path.position_at(t).x) / mass * xi.x)
        }
    };
    [v.x, v.y, a.x, a.y]
}

/// Integrate Λξ = 0 along `path` with RK4 on its own time grid.
pub fn jacobi_basis(model: &SystemModel, path: &Path) -> JacobiBasis {
    let dim = model.dimension();
    let unit = |i: usize| if i == 0 { Point::line(1.0) } else { Point::new(0.0, 1.0) };
    let starts: Vec<(Point, Point)> = (0..dim)
        .map(|i| (unit(i), Point::default()))
        .chain((0..dim).map(|i| (Point::default(), unit(i))))
        .collect();
    let rhs = |t: f64, s: &[f64; 4]| jacobi_rhs(model, path, t, s);
    let fields = starts
        .into_iter()
        .map(|(x0, v0)| {
            let mut s = [x0.x, x0.y, v0.x, v0.y];
            let mut out = Vec::with_capacity(path.len());
            out.push((x0, v0));
            for i in 0..path.steps() {
                s = rk4_step(&rhs, path.time(i), &s, path.dt);
                out.push((Point::new(s[0], s[1]), Point::new(s[2], s[3])));
            }
            out
        })
        .collect();
    JacobiBasis {
        dt: path.dt,
        dim,
        fields,
        model: model.clone(),
        path: path.clone(),
    }
}

impl JacobiBasis {
    pub fn len(&self) -> usize {
        self.fields[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields[0].is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.dt * (self.len() - 1) as f64
    }

    /// Columns ξ̇(0) = eᵢ of the basis at node `i`, as the D×D matrix M(t_i).
    pub fn m_at_node(&self, i: usize) -> [[f64; 2]; 2] {
        self.matrix(|j| self.fields[self.dim + j][i].0)
    }

    fn matrix(&self, col: impl Fn(usize) -> Point) -> [[f64; 2]; 2] {
        if self.dim == 1 {
            [[col(0).x, 0.0], [0.0, 0.0]]
        } else {
            let (a, b) = (col(0), col(1));
            [[a.x, b.x], [a.y, b.y]]
        }
    }

    /// M(t) at any t, continuing from the nearest node below with one RK4 step.
    pub fn m_at(&self, t: f64) -> [[f64; 2]; 2] {
        let n = self.len() - 1;
        let i = ((t / self.dt).floor().max(0.0) as usize).min(n);
        let h = t - i as f64 * self.dt;
        if h == 0.0 {
            return self.m_at_node(i);
        }
        let rhs = |s: f64, y: &[f64; 4]| jacobi_rhs(&self.model, &self.path, s, y);
        self.matrix(|j| {
            let (x, v) = self.fields[self.dim + j][i];
            let s = rk4_step(&rhs, i as f64 * self.dt, &[x.x, x.y, v.x, v.y], h);
            Point::new(s[0], s[1])
        })
    }

    fn det(&self, m: [[f64; 2]; 2]) -> f64 {
        if self.dim == 1 {
            m[0][0]
        } else {
            m[0][0] * m[1][1] - m[0][1] * m[1][0]
        }
    }

    pub fn det_at(&self, t: f64) -> f64 {
        self.det(self.m_at(t))
    }

    fn singular_values(&self, m: [[f64; 2]; 2]) -> Vec<f64> {
        if self.dim == 1 {
            alloc::vec![m[0][0].abs()]
        } else {
            singular_values_2x2(m).to_vec()
        }
    }

    /// Largest spectral norm of M over the grid, the scale for rank decisions.
    fn norm_scale(&self) -> f64 {
        (0..self.len())
            .map(|i| self.singular_values(self.m_at_node(i))[0])
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE)
    }

    fn multiplicity(&self, t: f64, tol: f64) -> usize {
        self.singular_values(self.m_at(t))
            .iter()
            .filter(|&&s| s <= tol)
            .count()
    }
}

/// Zeros of det M(t) strictly inside (0, T), with multiplicities.
fn interior_conjugate_points(basis: &JacobiBasis) -> Vec<(f64, usize)> {
    let n = basis.len() - 1;
    let scale = basis.norm_scale();
    let det_scale = scale.powi(basis.dim as i32);
    let dets: Vec<f64> = (0..=n).map(|i| basis.det(basis.m_at_node(i))).collect();
    let t_end = basis.duration();
    let mut roots: Vec<f64> = Vec::new();
    for i in 1..n {
        let (a, b) = (dets[i], dets[i + 1]);
        if a == 0.0 {
            roots.push(i as f64 * basis.dt);
        } else if a * b < 0.0 {
            let lo = i as f64 * basis.dt;
            roots.push(bisect(|t| basis.det_at(t), lo, lo + basis.dt, ROOT_TOL));
        }
    }
    // Even-order zeros (the magnetic det M ∝ sin²ωt) have no sign change.
    for i in 1..n {
        let (l, c, r) = (dets[i - 1].abs(), dets[i].abs(), dets[i + 1].abs());
        if c <= l && c <= r {
            let (lo, hi) = ((i - 1) as f64 * basis.dt, (i + 1) as f64 * basis.dt);
            let t = golden_min(|t| basis.det_at(t).abs(), lo, hi, 1e-13 * t_end.max(1.0));
            if basis.det_at(t).abs() <= DOUBLE_ROOT_TOL * det_scale {
                roots.push(t);
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::new();
    for t in roots {
        match merged.last() {
            Some(&last) if t - last <= 2.0 * basis.dt => {}
            _ => merged.push(t),
        }
    }
    let endpoint_gap = 2.0 * basis.dt;
    merged
        .into_iter()
        .filter(|&t| t > 0.0 && t < t_end - endpoint_gap.min(1e-9 * t_end.max(1.0)))
        .map(|t| (t, basis.multiplicity(t, RANK_TOL * scale).max(1)))
        .collect()
}

/// Multiplicity with which T itself is conjugate to 0, judged by the
/// singular values of M(T) against `caustic_tol`·max‖M‖.
fn endpoint_multiplicity(basis: &JacobiBasis, caustic_tol: f64) -> usize {
    basis.multiplicity(basis.duration(), caustic_tol * basis.norm_scale())
}

/// Conjugate points in (0, T] along `path`.
pub fn conjugate_points_along(model: &SystemModel, path: &Path, cfg: &NumericConfig) -> Vec<(f64, usize)> {
    let basis = jacobi_basis(model, path);
    let mut points = interior_conjugate_points(&basis);
    let end = endpoint_multiplicity(&basis, cfg.caustic_tol);
    if end > 0 {
        points.push((basis.duration(), end));
    }
    points
}

/// Conjugate points in (0, T] for a quadratic model, where the Jacobi
/// equation does not depend on the extremal.
pub fn conjugate_points(model: &SystemModel, t: f64, cfg: &NumericConfig) -> Result<Vec<(f64, usize)>> {
    let path = reference_path(model, t, cfg.grid_points)?;
    Ok(conjugate_points_along(model, &path, cfg))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorseReport {
    pub conjugate_times: Vec<(f64, usize)>,
    pub morse_index: usize,
    /// μ(t) as steps (t, μ just after t), starting with (0, 0).
    pub profile: Vec<(f64, usize)>,
}

impl MorseReport {
    /// Left-continuous μ(t): conjugate points strictly before t.
    pub fn index_at(&self, t: f64) -> usize {
        self.conjugate_times
            .iter()
            .filter(|(c, _)| *c < t)
            .map(|(_, m)| m)
            .sum()
    }
}

/// Morse index along `path`: conjugate points strictly inside (0, T) counted
/// with multiplicity. A conjugate endpoint is an error.
pub fn morse_index_along(model: &SystemModel, path: &Path, cfg: &NumericConfig) -> Result<MorseReport> {
    let basis = jacobi_basis(model, path);
    let end = endpoint_multiplicity(&basis, cfg.caustic_tol);
    if end > 0 {
        return Err(Error::EndpointConjugate {
            t: basis.duration(),
            multiplicity: end,
        });
    }
    let conjugate_times = interior_conjugate_points(&basis);
    let mut profile = alloc::vec![(0.0, 0)];
    let mut mu = 0;
    for &(t, m) in &conjugate_times {
        mu += m;
        profile.push((t, mu));
    }
    Ok(MorseReport {
        conjugate_times,
        morse_index: mu,
        profile,
    })
}

pub fn morse_index(model: &SystemModel, t: f64, cfg: &NumericConfig) -> Result<MorseReport> {
    let path = reference_path(model, t, cfg.grid_points)?;
    morse_index_along(model, &path, cfg)
}
