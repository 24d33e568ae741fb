//! Two-point boundary-value problem and Hamilton's principal function.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::models::{caustic_index_for, CausticIndex, ModelKind, NumericConfig, Potential, SystemModel};
use crate::numeric::{rk4_step, simpson};

/// RK4 steps used by the shooting solver.
pub const SHOOTING_STEPS: usize = 4096;

/// A configuration-space point. Line models only use `x`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub const fn line(x: f64) -> Self {
        Self { x, y: 0.0 }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    fn from_complex(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::line(x)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// A trajectory sampled on the uniform grid t_i = i·dt, i = 0..len.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub dt: f64,
    pub positions: Vec<Point>,
    pub velocities: Vec<Point>,
}

impl Path {
    /// Sample `f(t) = (position, velocity)` on `steps` intervals of [0, duration].
    pub fn from_fn(duration: f64, steps: usize, f: impl Fn(f64) -> (Point, Point)) -> Self {
        let dt = duration / steps as f64;
        let (positions, velocities) = (0..=steps).map(|i| f(i as f64 * dt)).unzip();
        Self {
            dt,
            positions,
            velocities,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.len().saturating_sub(1)
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.steps() as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        self.dt * i as f64
    }

    pub fn start(&self) -> Point {
        self.positions[0]
    }

    pub fn end(&self) -> Point {
        self.positions[self.len() - 1]
    }

    /// Cubic Hermite interpolation of the position at time `t`.
    pub fn position_at(&self, t: f64) -> Point {
        let n = self.steps();
        if n == 0 {
            return self.positions[0];
        }
        let s = (t / self.dt).clamp(0.0, n as f64);
        let i = (s.floor() as usize).min(n - 1);
        let u = s - i as f64;
        let (p0, p1) = (self.positions[i], self.positions[i + 1]);
        let (v0, v1) = (self.velocities[i] * self.dt, self.velocities[i + 1] * self.dt);
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        p0 * h00 + v0 * h10 + p1 * h01 + v1 * h11
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClassicalSolution {
    /// The unique classical path and its action.
    Unique { path: Path, action: f64 },
    /// Caustic time with endpoints that no classical motion connects.
    NoSolution,
    /// Caustic time where every motion from x1 arrives at x2; `parity` is the
    /// sign relating x2 to x1 (relative to the force centre for forced motion).
    Degenerate { parity: i8 },
}

impl ClassicalSolution {
    pub fn action(&self) -> Option<f64> {
        match self {
            ClassicalSolution::Unique { action, .. } => Some(*action),
            _ => None,
        }
    }

    pub fn path(&self) -> Option<&Path> {
        match self {
            ClassicalSolution::Unique { path, .. } => Some(path),
            _ => None,
        }
    }
}

/// Acceleration from the Euler-Lagrange equations.
pub(crate) fn acceleration(model: &SystemModel, p: Point, v: Point) -> Point {
    match &model.kind {
        ModelKind::Free { .. } => Point::default(),
        ModelKind::Oscillator { omega, .. } => p * (-omega * omega),
        ModelKind::ForcedOscillator { mass, omega, force } => {
            Point::line(-omega * omega * p.x + force / mass)
        }
        ModelKind::MagneticPlane { omega, .. } => Point::new(2.0 * omega * v.y, -2.0 * omega * v.x),
        ModelKind::Potential1D { mass, potential } => {
            Point::line(-potential.first_derivative(p.x) / mass)
        }
    }
}

/// Integrate the equations of motion from (x1, v1) over [0, t] with RK4.
pub fn integrate_motion(model: &SystemModel, x1: Point, v1: Point, t: f64, steps: usize) -> Path {
    let rhs = |_t: f64, s: &[f64; 4]| {
        let a = acceleration(model, Point::new(s[0], s[1]), Point::new(s[2], s[3]));
        [s[2], s[3], a.x, a.y]
    };
    let dt = t / steps as f64;
    let mut state = [x1.x, x1.y, v1.x, v1.y];
    let mut positions = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    positions.push(x1);
    velocities.push(v1);
    for i in 0..steps {
        state = rk4_step(&rhs, i as f64 * dt, &state, dt);
        positions.push(Point::new(state[0], state[1]));
        velocities.push(Point::new(state[2], state[3]));
    }
    Path {
        dt,
        positions,
        velocities,
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("T must be > 0, got {t}")))
    }
}

fn degenerate_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + b.abs())
}

/// Solve x(0) = x1, x(T) = x2 for `model`.
pub fn solve_boundary(
    model: &SystemModel,
    x1: Point,
    x2: Point,
    t: f64,
    cfg: &NumericConfig,
) -> Result<ClassicalSolution> {
    model.validate()?;
    check_time(t)?;
    let steps = cfg.grid_points;
    let line = |f: &dyn Fn(f64) -> (f64, f64)| {
        Path::from_fn(t, steps, |s| {
            let (p, v) = f(s);
            (Point::line(p), Point::line(v))
        })
    };
    let solution = match model.kind {
        ModelKind::Free { .. } => {
            let v = (x2 - x1) * (1.0 / t);
            Path::from_fn(t, steps, |s| (x1 + v * s, v))
        }
        ModelKind::Oscillator { omega, .. } | ModelKind::ForcedOscillator { omega, .. }
            if omega == 0.0 =>
        {
            let accel = acceleration(model, Point::default(), Point::default()).x;
            let v = (x2.x - x1.x - 0.5 * accel * t * t) / t;
            line(&|s| (x1.x + v * s + 0.5 * accel * s * s, v + accel * s))
        }
        ModelKind::Oscillator { omega, .. } | ModelKind::ForcedOscillator { omega, .. } => {
            let centre = force_centre(model);
            let (u1, u2) = (x1.x - centre, x2.x - centre);
            match caustic_index_for(omega, t, cfg.caustic_tol) {
                CausticIndex::Caustic(n) => {
                    let parity = if n % 2 == 0 { 1 } else { -1 };
                    return Ok(if degenerate_match(u2, f64::from(parity) * u1) {
                        ClassicalSolution::Degenerate { parity }
                    } else {
                        ClassicalSolution::NoSolution
                    });
                }
                CausticIndex::Regular(_) => {
                    let (s, c) = (omega * t).sin_cos();
                    let b = u1;
                    let a = (u2 - u1 * c) / s;
                    line(&|tau| {
                        let (sw, cw) = (omega * tau).sin_cos();
                        (centre + a * sw + b * cw, omega * (a * cw - b * sw))
                    })
                }
            }
        }
        ModelKind::MagneticPlane { omega, .. } => {
            if omega == 0.0 {
                let v = (x2 - x1) * (1.0 / t);
                Path::from_fn(t, steps, |s| (x1 + v * s, v))
            } else {
                match caustic_index_for(omega, t, cfg.caustic_tol) {
                    CausticIndex::Caustic(_) => {
                        return Ok(
                            if degenerate_match(x2.x, x1.x) && degenerate_match(x2.y, x1.y) {
                                ClassicalSolution::Degenerate { parity: 1 }
                            } else {
                                ClassicalSolution::NoSolution
                            },
                        );
                    }
                    CausticIndex::Regular(_) => {
                        let (z1, z2) = (x1.to_complex(), x2.to_complex());
                        let v0 = (z2 - z1) * Complex64::cis(omega * t) * (omega / (omega * t).sin());
                        Path::from_fn(t, steps, |s| {
                            let z = z1 + v0 * Complex64::cis(-omega * s) * ((omega * s).sin() / omega);
                            let v = v0 * Complex64::cis(-2.0 * omega * s);
                            (Point::from_complex(z), Point::from_complex(v))
                        })
                    }
                }
            }
        }
        ModelKind::Potential1D { mass, ref potential } => {
            match shoot(potential, mass, x1.x, x2.x, t)? {
                Some(v) => integrate_motion(model, x1, Point::line(v), t, SHOOTING_STEPS),
                None => return Ok(ClassicalSolution::NoSolution),
            }
        }
    };
    let action = action_numeric(model, &solution);
    Ok(ClassicalSolution::Unique {
        path: solution,
        action,
    })
}

/// Equilibrium x* = f/mω² of the forced oscillator, 0 for other models.
pub(crate) fn force_centre(model: &SystemModel) -> f64 {
    match model.kind {
        ModelKind::ForcedOscillator { mass, omega, force } if omega > 0.0 => {
            force / (mass * omega * omega)
        }
        _ => 0.0,
    }
}

/// Final position and ∂x(T)/∂v for initial data (x1, v).
fn shoot_endpoint(potential: &Potential, mass: f64, x1: f64, v: f64, t: f64) -> (f64, f64) {
    let rhs = |_t: f64, s: &[f64; 4]| {
        [
            s[1],
            -potential.first_derivative(s[0]) / mass,
            s[3],
            -potential.second_derivative(s[0]) / mass * s[2],
        ]
    };
    let dt = t / SHOOTING_STEPS as f64;
    let mut s = [x1, v, 0.0, 1.0];
    for i in 0..SHOOTING_STEPS {
        s = rk4_step(&rhs, i as f64 * dt, &s, dt);
    }
    (s[0], s[2])
}

/// Initial velocity reaching x2 at time t, bracketed in [−v_max, v_max] with
/// v_max = 4·max(|Δx|/T, √(2ΔV/m)). Among several bracketed roots the one
/// closest to the straight-line velocity Δx/T is polished. `None` when no
/// sign change is found.
fn shoot(potential: &Potential, mass: f64, x1: f64, x2: f64, t: f64) -> Result<Option<f64>> {
    let dv = potential.value_range(&[x1, x2]);
    let mut v_max = 4.0 * ((x2 - x1).abs() / t).max((2.0 * dv / mass).sqrt());
    if v_max == 0.0 || !v_max.is_finite() {
        v_max = 1.0 / t;
    }
    let residual = |v: f64| shoot_endpoint(potential, mass, x1, v, t).0 - x2;
    const CELLS: usize = 64;
    let nodes: Vec<f64> = (0..=CELLS)
        .map(|i| -v_max + 2.0 * v_max * i as f64 / CELLS as f64)
        .collect();
    let values: Vec<f64> = nodes.iter().map(|&v| residual(v)).collect();
    let guess = (x2 - x1) / t;
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..CELLS {
        let (ra, rb) = (values[i], values[i + 1]);
        if !(ra.is_finite() && rb.is_finite()) || ra * rb > 0.0 {
            continue;
        }
        let mid = 0.5 * (nodes[i] + nodes[i + 1]);
        if best.map_or(true, |(_, _, m)| (mid - guess).abs() < (m - guess).abs()) {
            best = Some((nodes[i], nodes[i + 1], mid));
        }
    }
    let Some((mut a, mut b, _)) = best else {
        return Ok(None);
    };
    let mut ra = residual(a);
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        let rm = residual(mid);
        if rm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if (ra < 0.0) == (rm < 0.0) {
            a = mid;
            ra = rm;
        } else {
            b = mid;
        }
        if (b - a) <= 1e-12 * v_max {
            break;
        }
    }
    let mut v = 0.5 * (a + b);
    let tol = 1e-10 * (1.0 + x2.abs());
    let mut last = f64::INFINITY;
    for _ in 0..8 {
        let (xt, dxdv) = shoot_endpoint(potential, mass, x1, v, t);
        let r = xt - x2;
        last = r.abs();
        if last <= 1e-14 * (1.0 + x2.abs()) || dxdv == 0.0 {
            break;
        }
        v -= r / dxdv;
    }
    last = last.min(residual(v).abs());
    if last > tol {
        return Err(Error::NoConvergence(format!(
            "x1 = {x1}, x2 = {x2}, T = {t}: residual {last:e} after polishing v = {v}"
        )));
    }
    Ok(Some(v))
}

/// Hamilton's principal function S(x1, x2; T).
///
/// Closed forms for the quadratic models; the forced oscillator uses
/// S_osc(x1 − x*, x2 − x*) + f²T/(2mω²), which is the action of the
/// shifted oscillator. The potential model integrates L along the shooting
/// solution.
pub fn action_closed(
    model: &SystemModel,
    x1: Point,
    x2: Point,
    t: f64,
    cfg: &NumericConfig,
) -> Result<f64> {
    model.validate()?;
    check_time(t)?;
    let caustic = |omega: f64| match caustic_index_for(omega, t, cfg.caustic_tol) {
        CausticIndex::Caustic(n) => Err(Error::CausticTime { t, maslov_n: n }),
        CausticIndex::Regular(_) => Ok(()),
    };
    match model.kind {
        ModelKind::Free { mass } => {
            let d = x2 - x1;
            Ok(0.5 * mass * (d.x * d.x + d.y * d.y) / t)
        }
        ModelKind::Oscillator { mass, omega } => {
            caustic(omega)?;
            Ok(oscillator_action(mass, omega, x1.x, x2.x, t))
        }
        ModelKind::ForcedOscillator { mass, omega, force } => {
            caustic(omega)?;
            Ok(forced_action(mass, omega, force, x1.x, x2.x, t))
        }
        ModelKind::MagneticPlane { mass, omega } => {
            caustic(omega)?;
            Ok(magnetic_action(mass, omega, x1, x2, t))
        }
        ModelKind::Potential1D { .. } => match solve_boundary(model, x1, x2, t, cfg)? {
            ClassicalSolution::Unique { action, .. } => Ok(action),
            _ => Err(Error::NoConvergence(format!(
                "no classical path from {} to {} in T = {t}",
                x1.x, x2.x
            ))),
        },
    }
}

/// mω/(2 sin ωT)·[(x1² + x2²) cos ωT − 2 x1 x2], rearranged so the ω → 0
/// limit does not cancel: mω(x2−x1)²/(2 sin ωT) − mω(x1²+x2²) tan(ωT/2)/2.
pub(crate) fn oscillator_action(mass: f64, omega: f64, x1: f64, x2: f64, t: f64) -> f64 {
    if omega == 0.0 {
        return 0.5 * mass * (x2 - x1).powi(2) / t;
    }
    let wt = omega * t;
    let d = x2 - x1;
    0.5 * mass * omega * (d * d / wt.sin() - (x1 * x1 + x2 * x2) * (0.5 * wt).tan())
}

pub(crate) fn forced_action(mass: f64, omega: f64, force: f64, x1: f64, x2: f64, t: f64) -> f64 {
    if omega == 0.0 {
        // Uniform force: mΔx²/2T + fT(x1 + x2)/2 − f²T³/24m.
        let d = x2 - x1;
        return 0.5 * mass * d * d / t + 0.5 * force * t * (x1 + x2)
            - force * force * t.powi(3) / (24.0 * mass);
    }
    let centre = force / (mass * omega * omega);
    oscillator_action(mass, omega, x1 - centre, x2 - centre, t)
        + force * force * t / (2.0 * mass * omega * omega)
}

pub(crate) fn magnetic_action(mass: f64, omega: f64, x1: Point, x2: Point, t: f64) -> f64 {
    let d = x2 - x1;
    let cross = x1.x * x2.y - x2.x * x1.y;
    if omega == 0.0 {
        return 0.5 * mass * (d.x * d.x + d.y * d.y) / t;
    }
    let wt = omega * t;
    0.5 * mass * omega * ((d.x * d.x + d.y * d.y) * wt.cos() / wt.sin() + 2.0 * cross)
}

/// Lagrangian at a sample.
pub(crate) fn lagrangian(model: &SystemModel, p: Point, v: Point) -> f64 {
    match &model.kind {
        ModelKind::Free { mass } => 0.5 * mass * (v.x * v.x + v.y * v.y),
        ModelKind::Oscillator { mass, omega } => 0.5 * mass * (v.x * v.x - omega * omega * p.x * p.x),
        ModelKind::ForcedOscillator { mass, omega, force } => {
            0.5 * mass * (v.x * v.x - omega * omega * p.x * p.x) + force * p.x
        }
        ModelKind::MagneticPlane { mass, omega } => {
            0.5 * mass * (v.x * v.x + v.y * v.y + 2.0 * omega * (p.x * v.y - p.y * v.x))
        }
        ModelKind::Potential1D { mass, potential } => 0.5 * mass * v.x * v.x - potential.value(p.x),
    }
}

/// Simpson quadrature of L along a sampled path.
pub fn action_numeric(model: &SystemModel, path: &Path) -> f64 {
    let values: Vec<f64> = path
        .positions
        .iter()
        .zip(&path.velocities)
        .map(|(&p, &v)| lagrangian(model, p, v))
        .collect();
    simpson(&values, path.dt)
}

/// The D×D mixed endpoint Hessian ∂²S/∂x1ⁱ∂x2ʲ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointHessian {
    pub dim: usize,
    pub entries: [[f64; 2]; 2],
}

impl EndpointHessian {
    pub fn det(&self) -> f64 {
        let e = &self.entries;
        if self.dim == 1 {
            e[0][0]
        } else {
            e[0][0] * e[1][1] - e[0][1] * e[1][0]
        }
    }
}

/// Nested central differences of [`action_closed`] with step `h`.
pub fn principal_function_hessian(
    model: &SystemModel,
    x1: Point,
    x2: Point,
    t: f64,
    h: f64,
    cfg: &NumericConfig,
) -> Result<EndpointHessian> {
    if !(h > 0.0) {
        return Err(Error::invalid("finite-difference step must be > 0"));
    }
    let dim = model.dimension();
    let unit = |i: usize| if i == 0 { Point::line(h) } else { Point::new(0.0, h) };
    let mut entries = [[0.0; 2]; 2];
    for (i, row) in entries.iter_mut().enumerate().take(dim) {
        for (j, e) in row.iter_mut().enumerate().take(dim) {
            let (ei, ej) = (unit(i), unit(j));
            let s = |a: Point, b: Point| action_closed(model, x1 + a, x2 + b, t, cfg);
            *e = (s(ei, ej)? - s(ei, -ej)? - s(-ei, ej)? + s(-ei, -ej)?) / (4.0 * h * h);
        }
    }
    Ok(EndpointHessian { dim, entries })
}

/// Closed-form endpoint Hessian for the quadratic models.
pub fn analytic_endpoint_hessian(model: &SystemModel, t: f64, cfg: &NumericConfig) -> Result<EndpointHessian> {
    check_time(t)?;
    let regular = |omega: f64| match caustic_index_for(omega, t, cfg.caustic_tol) {
        CausticIndex::Caustic(n) => Err(Error::CausticTime { t, maslov_n: n }),
        CausticIndex::Regular(_) => Ok(()),
    };
    let one = |v: f64| EndpointHessian {
        dim: 1,
        entries: [[v, 0.0], [0.0, 0.0]],
    };
    match model.kind {
        ModelKind::Free { mass } => Ok(one(-mass / t)),
        ModelKind::Oscillator { mass, omega } | ModelKind::ForcedOscillator { mass, omega, .. } => {
            if omega == 0.0 {
                return Ok(one(-mass / t));
            }
            regular(omega)?;
            Ok(one(-mass * omega / (omega * t).sin()))
        }
        ModelKind::MagneticPlane { mass, omega } => {
            if omega == 0.0 {
                let v = -mass / t;
                return Ok(EndpointHessian {
                    dim: 2,
                    entries: [[v, 0.0], [0.0, v]],
                });
            }
            regular(omega)?;
            let k = mass * omega;
            let cot = (omega * t).cos() / (omega * t).sin();
            Ok(EndpointHessian {
                dim: 2,
                entries: [[-k * cot, k], [-k, -k * cot]],
            })
        }
        ModelKind::Potential1D { .. } => Err(model.unsupported("analytic_endpoint_hessian")),
    }
}

/// A classical path of duration `t` suited to the path-independent Jacobi
/// and second-variation problems of the quadratic models: the equilibrium.
pub fn reference_path(model: &SystemModel, t: f64, steps: usize) -> Result<Path> {
    check_time(t)?;
    if !model.is_quadratic() {
        return Err(model.unsupported("reference_path"));
    }
    let rest = Point::line(force_centre(model));
    let accel = acceleration(model, rest, Point::default());
    Ok(Path::from_fn(t, steps, |s| {
        (rest + accel * (0.5 * s * s), accel * s)
    }))
}

/// Half-period helper used in tests and scans: Nπ/ω.
pub fn caustic_time(omega: f64, n: u32) -> f64 {
    f64::from(n) * PI / omega
}
