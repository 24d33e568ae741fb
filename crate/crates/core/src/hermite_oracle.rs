//! Exact spectral machinery for the oscillator: eigenfunctions, the damped
//! spectral kernel and its closed forms, and wave-packet evolution. This is
//! the reference the other kernel routes are checked against.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::classical::Point;
use crate::error::{Error, Result};
use crate::kernels::{kernel, quadratic_kernel, KernelValue, QuadraticKernel};
use crate::modeproduct::maslov_phase;
use crate::models::{caustic_index_for, CausticIndex, ModelKind, NumericConfig, SystemModel};

/// Largest admissible mass in the outer edge strips of an input state.
pub const EDGE_MASS_LIMIT: f64 = 1e-8;
const BRANCH_CUT_LIMIT: f64 = 1e-12;

/// Mass, frequency and ħ of an oscillator; fixes ζ = √(mω/ħ)·x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Oscillator {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl Oscillator {
    pub fn new(mass: f64, omega: f64, hbar: f64) -> Self {
        Self { mass, omega, hbar }
    }

    pub fn unit() -> Self {
        Self::new(1.0, 1.0, 1.0)
    }

    pub fn from_model(model: &SystemModel) -> Result<Self> {
        match model.kind {
            ModelKind::Oscillator { mass, omega } | ModelKind::ForcedOscillator { mass, omega, .. }
                if omega > 0.0 =>
            {
                Ok(Self::new(mass, omega, model.hbar))
            }
            _ => Err(model.unsupported("oscillator spectrum")),
        }
    }

    pub fn zeta(&self, x: f64) -> f64 {
        (self.mass * self.omega / self.hbar).sqrt() * x
    }

    /// Oscillator length √(ħ/mω).
    pub fn length(&self) -> f64 {
        (self.hbar / (self.mass * self.omega)).sqrt()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// ψ_0..=ψ_{n_max} at x.
    pub fn psi(&self, x: f64, n_max: usize) -> Vec<f64> {
        hermite_psi(x, n_max, self.mass, self.omega, self.hbar)
    }

    /// Σ_{n ≤ n_max} e^{−(iωT + η)(n+½)} ψ_n(x1)ψ_n(x2).
    pub fn spectral_kernel(&self, x1: f64, x2: f64, t: f64, n_max: usize, eta: f64) -> Complex64 {
        let a = self.psi(x1, n_max);
        let b = self.psi(x2, n_max);
        let step = Complex64::new(-eta, -self.omega * t).exp();
        let mut zn = Complex64::new(-0.5 * eta, -0.5 * self.omega * t).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for (pa, pb) in a.iter().zip(&b) {
            acc += zn * (pa * pb);
            zn *= step;
        }
        acc
    }

    /// Closed form of the damped spectral sum,
    /// √(mω/πħ) z^½ e^{−(ζ1²+ζ2²)/2} G(ζ1, ζ2; z) with z = e^{−iωT−η}.
    pub fn continued_kernel(&self, x1: f64, x2: f64, t: f64, eta: f64) -> Result<Complex64> {
        let (z1, z2) = (self.zeta(x1), self.zeta(x2));
        let z = Complex64::new(-eta, -self.omega * t).exp();
        let half = Complex64::new(-0.5 * eta, -0.5 * self.omega * t).exp();
        let g = generating_function(z1, z2, z)?;
        let norm = (self.mass * self.omega / (PI * self.hbar)).sqrt();
        Ok(half * g * norm * (-0.5 * (z1 * z1 + z2 * z2)).exp())
    }

    /// The regular kernel with ωT → θ = ωT − iη:
    /// (mω/2πħ)^½ e^{−iπ/4} e^{−iπN/2} [(−1)ᴺ sin θ]^{−½} e^{iS(θ)/ħ},
    /// N = floor(ωT/π), principal square root.
    pub fn mehler_continued(&self, x1: f64, x2: f64, t: f64, eta: f64) -> Complex64 {
        let theta = Complex64::new(self.omega * t, -eta);
        let n = (self.omega * t / PI).floor().max(0.0) as u32;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let s = theta.sin();
        let k = self.mass * self.omega / (2.0 * self.hbar);
        let exponent = Complex64::i() * k * ((x1 * x1 + x2 * x2) * theta.cos() - 2.0 * x1 * x2) / s;
        Complex64::from_polar((self.mass * self.omega / (2.0 * PI * self.hbar)).sqrt(), -PI / 4.0)
            * maslov_phase(n)
            / (s * sign).sqrt()
            * exponent.exp()
    }
}

/// ψ_0..=ψ_{n_max}(x) by the normalised three-term recurrence
/// ψ_{n+1} = ζ√(2/(n+1)) ψ_n − √(n/(n+1)) ψ_{n−1}.
pub fn hermite_psi(x: f64, n_max: usize, mass: f64, omega: f64, hbar: f64) -> Vec<f64> {
    let zeta = (mass * omega / hbar).sqrt() * x;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push((mass * omega / (PI * hbar)).powf(0.25) * (-0.5 * zeta * zeta).exp());
    if n_max >= 1 {
        out.push(2f64.sqrt() * zeta * out[0]);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let next = zeta * (2.0 / (nf + 1.0)).sqrt() * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// G(ζ1, ζ2; z) = (1 − z²)^{−½} exp[(2ζ1ζ2z − (ζ1² + ζ2²)z²)/(1 − z²)],
/// continued off the cuts with the principal square root.
pub fn generating_function(z1: f64, z2: f64, z: Complex64) -> Result<Complex64> {
    let one_minus = Complex64::new(1.0, 0.0) - z * z;
    if one_minus.norm() < BRANCH_CUT_LIMIT {
        return Err(Error::NearBranchCut {
            distance: one_minus.norm(),
        });
    }
    let exponent = (z * (2.0 * z1 * z2) - z * z * (z1 * z1 + z2 * z2)) / one_minus;
    Ok(exponent.exp() / one_minus.sqrt())
}

/// Partial sum Σ_{n<terms} h_n(ζ1)h_n(ζ2)zⁿ with h_n = H_n/√(2ⁿn!).
pub fn generating_series(z1: f64, z2: f64, z: Complex64, terms: usize) -> Complex64 {
    let h = |x: f64| {
        let mut v = vec![1.0, 2f64.sqrt() * x];
        for n in 1..terms.max(2) {
            let nf = n as f64;
            v.push(x * (2.0 / (nf + 1.0)).sqrt() * v[n] - (nf / (nf + 1.0)).sqrt() * v[n - 1]);
        }
        v
    };
    let (a, b) = (h(z1), h(z2));
    let mut zn = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..terms {
        acc += zn * (a[n] * b[n]);
        zn *= z;
    }
    acc
}

/// A state sampled on the uniform grid x_i = x_min + i·dx.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    pub samples: Vec<Complex64>,
    pub x_min: f64,
    pub dx: f64,
}

impl WaveFunction {
    pub fn sample(x_min: f64, dx: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            samples: (0..n).map(|i| f(x_min + i as f64 * dx)).collect(),
            x_min,
            dx,
        }
    }

    /// The default grid of `cfg` around 0, scaled by the oscillator length
    /// when the model has one.
    pub fn on_grid(model: &SystemModel, cfg: &NumericConfig, f: impl Fn(f64) -> Complex64) -> Self {
        let scale = Oscillator::from_model(model).map_or(1.0, |o| o.length());
        let half = cfg.quad_domain_halfwidth * scale;
        let n = cfg.quad_points;
        Self::sample(-half, 2.0 * half / (n - 1) as f64, n, f)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.len() - 1)
    }

    fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.len() {
            0.5 * self.dx
        } else {
            self.dx
        }
    }

    /// ⟨self, other⟩ = ∫ conj(self)·other by the trapezoid rule.
    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .enumerate()
            .map(|(i, (a, b))| a.conj() * b * self.weight(i))
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self).re
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// ‖self − other‖ on the shared grid.
    pub fn distance(&self, other: &WaveFunction) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .enumerate()
            .map(|(i, (a, b))| (a - b).norm_sqr() * self.weight(i))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    /// Mass in the outer 5% of the domain (2.5% per side).
    pub fn edge_mass(&self) -> f64 {
        let strip = (self.len() / 40).max(1);
        let n = self.len();
        (0..strip)
            .chain(n - strip..n)
            .map(|i| self.samples[i].norm_sqr() * self.weight(i))
            .sum()
    }

    /// Four-point Lagrange interpolation; zero outside the grid.
    pub fn value_at(&self, x: f64) -> Complex64 {
        let s = (x - self.x_min) / self.dx;
        let n = self.len();
        if !(s >= 0.0 && s <= (n - 1) as f64) {
            return Complex64::new(0.0, 0.0);
        }
        let nearest = s.round();
        if (s - nearest).abs() < 1e-9 {
            return self.samples[nearest as usize];
        }
        let i = (s.floor() as usize).clamp(1, n.saturating_sub(3));
        let u = s - i as f64;
        let p = [i - 1, i, i + 1, i + 2].map(|k| self.samples[k]);
        let w = [
            -u * (u - 1.0) * (u - 2.0) / 6.0,
            (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
            -(u + 1.0) * u * (u - 2.0) / 2.0,
            (u + 1.0) * u * (u - 1.0) / 6.0,
        ];
        p.iter().zip(w).map(|(v, wk)| v * wk).sum()
    }

    /// ψ(c + parity·(x − c)) on the same grid.
    pub fn reflect(&self, centre: f64, parity: i8) -> Self {
        if parity == 1 {
            return self.clone();
        }
        let symmetric = ((self.x_min + self.x_max()) * 0.5 - centre).abs() <= 1e-12 * self.dx.max(1.0);
        let samples = if symmetric {
            self.samples.iter().rev().copied().collect()
        } else {
            (0..self.len()).map(|i| self.value_at(2.0 * centre - self.x(i))).collect()
        };
        Self {
            samples,
            ..self.clone()
        }
    }
}

/// Normalised Gaussian packet (πσ²)^{−¼} exp(−(x − x0)²/2σ² + i k0 x).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaussian {
    pub centre: f64,
    pub width: f64,
    pub wavenumber: f64,
}

impl Gaussian {
    pub fn new(centre: f64, width: f64, wavenumber: f64) -> Self {
        Self {
            centre,
            width,
            wavenumber,
        }
    }

    fn norm(&self) -> f64 {
        (PI * self.width * self.width).powf(-0.25)
    }

    pub fn value(&self, x: f64) -> Complex64 {
        let d = x - self.centre;
        Complex64::new(-d * d / (2.0 * self.width * self.width), self.wavenumber * x).exp() * self.norm()
    }

    /// ∫ K(x2|x1) g(x1) dx1 in closed form for a regular quadratic kernel.
    pub fn propagate(&self, q: &QuadraticKernel, x2: f64) -> Complex64 {
        let s2 = self.width * self.width;
        let alpha = Complex64::new(0.5 / s2, -q.a);
        let beta = Complex64::new(self.centre / s2, -q.b * x2 + q.c + self.wavenumber);
        let constant = Complex64::new(-self.centre * self.centre / (2.0 * s2), q.a * x2 * x2 + q.c * x2 + q.d);
        q.prefactor * self.norm() * (Complex64::new(PI, 0.0) / alpha).sqrt() * (constant + beta * beta / (alpha * 4.0)).exp()
    }
}

/// Isotropic normalised 2D Gaussian (πσ²)^{−½} exp(−|r − r0|²/2σ² + i k·r).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaussian2 {
    pub centre: Point,
    pub width: f64,
    pub wavevector: Point,
}

impl Gaussian2 {
    fn norm(&self) -> f64 {
        (PI * self.width * self.width).powf(-0.5)
    }

    pub fn value(&self, r: Point) -> Complex64 {
        let d = r - self.centre;
        let s2 = self.width * self.width;
        Complex64::new(
            -(d.x * d.x + d.y * d.y) / (2.0 * s2),
            self.wavevector.x * r.x + self.wavevector.y * r.y,
        )
        .exp()
            * self.norm()
    }

    /// (U_T g)(r2) under the magnetic-plane kernel, with the r1 integral done
    /// in closed form: ∫ exp(−α|r|² + β·r) d²r = (π/α) exp(β·β/4α).
    pub fn propagate_magnetic(&self, mass: f64, omega: f64, hbar: f64, t: f64, r2: Point, caustic_tol: f64) -> Result<Complex64> {
        let k = match caustic_index_for(omega, t, caustic_tol) {
            CausticIndex::Regular(n) => n,
            CausticIndex::Caustic(n) => return Err(Error::CausticTime { t, maslov_n: n }),
        };
        let kappa = mass * omega / (2.0 * hbar);
        let (sn, cs) = (omega * t).sin_cos();
        let cot = cs / sn;
        let s2 = self.width * self.width;
        let prefactor = Complex64::new(0.0, -mass * omega / (2.0 * PI * hbar * sn.abs())) * maslov_phase(2 * k);
        let alpha = Complex64::new(0.5 / s2, -kappa * cot);
        let i = Complex64::i();
        let bx = i * (-2.0 * kappa * cot * r2.x + 2.0 * kappa * r2.y + self.wavevector.x) + self.centre.x / s2;
        let by = i * (-2.0 * kappa * cot * r2.y - 2.0 * kappa * r2.x + self.wavevector.y) + self.centre.y / s2;
        let c0 = self.centre;
        let constant = Complex64::new(-(c0.x * c0.x + c0.y * c0.y) / (2.0 * s2), kappa * cot * (r2.x * r2.x + r2.y * r2.y));
        Ok(prefactor * self.norm() * PI / alpha * (constant + (bx * bx + by * by) / (alpha * 4.0)).exp())
    }
}

/// Split length for regular evolution: every sub-step stays below 3/8 of a
/// period, so it is Maslov-free and the kernel is well resolved.
fn substeps(model: &SystemModel, t: f64) -> usize {
    match model.frequency() {
        Some(omega) if omega > 0.0 => (t / (0.375 * 2.0 * PI / omega)).ceil().max(1.0) as usize,
        _ => 1,
    }
}

/// One trapezoid pass of a regular quadratic kernel. The factor
/// e^{−ib·x2·x1} is advanced geometrically along x1 and resynchronised.
fn apply_quadratic(q: &QuadraticKernel, psi: &WaveFunction) -> WaveFunction {
    let n = psi.len();
    let g: Vec<Complex64> = (0..n)
        .map(|i| {
            let x = psi.x(i);
            psi.samples[i] * psi.weight(i) * Complex64::cis(q.a * x * x + q.c * x)
        })
        .collect();
    const RESYNC: usize = 64;
    let samples = (0..n)
        .map(|j| {
            let x2 = psi.x(j);
            let step = Complex64::cis(-q.b * x2 * psi.dx);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut phase = Complex64::new(1.0, 0.0);
            for (i, gi) in g.iter().enumerate() {
                if i % RESYNC == 0 {
                    phase = Complex64::cis(-q.b * x2 * psi.x(i));
                }
                acc += gi * phase;
                phase *= step;
            }
            acc * q.prefactor * Complex64::cis(q.a * x2 * x2 + q.c * x2 + q.d)
        })
        .collect();
    WaveFunction {
        samples,
        x_min: psi.x_min,
        dx: psi.dx,
    }
}

fn check_edges(psi: &WaveFunction) -> Result<()> {
    let edge_mass = psi.edge_mass();
    if edge_mass > EDGE_MASS_LIMIT {
        return Err(Error::DomainTooSmall { edge_mass });
    }
    Ok(())
}

/// ψ_T(x2) = ∫ K(x2, T | x1, 0) ψ(x1) dx1 for the line models. Caustic
/// times apply parity and phase directly; other times are split into equal
/// sub-steps shorter than 3/8 of a period and integrated by the trapezoid rule.
pub fn evolve(model: &SystemModel, psi: &WaveFunction, t: f64, cfg: &NumericConfig) -> Result<WaveFunction> {
    if model.dimension() != 1 || !model.is_quadratic() {
        return Err(model.unsupported("evolve"));
    }
    if t == 0.0 {
        return Ok(psi.clone());
    }
    if !(t > 0.0) {
        return Err(Error::invalid(format!("T must be ≥ 0, got {t}")));
    }
    check_edges(psi)?;
    if let Some(omega) = model.frequency().filter(|&w| w > 0.0) {
        if caustic_index_for(omega, t, cfg.caustic_tol).is_caustic() {
            let k = kernel(model, Point::default(), Point::default(), t, cfg)?;
            if let KernelValue::CausticDelta {
                parity, centre, ..
            } = k
            {
                return Ok(psi.reflect(centre, parity).scale(k.delta_weight().unwrap_or_default()));
            }
        }
    }
    let n = substeps(model, t);
    let q = quadratic_kernel(model, t / n as f64, cfg)?;
    let mut out = apply_quadratic(&q, psi);
    for _ in 1..n {
        check_edges(&out)?;
        out = apply_quadratic(&q, &out);
    }
    Ok(out)
}

/// Evolution through the eigenbasis: project on hermite_terms eigenstates
/// (shifted to the force centre for the forced oscillator), advance each by
/// e^{−iE_nT/ħ} and resum.
pub fn evolve_spectral(model: &SystemModel, psi: &WaveFunction, t: f64, cfg: &NumericConfig) -> Result<WaveFunction> {
    let osc = Oscillator::from_model(model)?;
    let (centre, offset) = match model.kind {
        ModelKind::ForcedOscillator { mass, omega, force } => {
            (force / (mass * omega * omega), -force * force / (2.0 * mass * omega * omega))
        }
        _ => (0.0, 0.0),
    };
    let terms = cfg.hermite_terms;
    let basis: Vec<Vec<f64>> = (0..psi.len()).map(|i| osc.psi(psi.x(i) - centre, terms - 1)).collect();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); terms];
    for (i, row) in basis.iter().enumerate() {
        let w = psi.samples[i] * psi.weight(i);
        for (c, b) in coeffs.iter_mut().zip(row) {
            *c += w * b;
        }
    }
    for (n, c) in coeffs.iter_mut().enumerate() {
        let energy = (n as f64 + 0.5) * osc.hbar * osc.omega + offset;
        *c *= Complex64::cis(-energy * t / osc.hbar);
    }
    let samples = basis
        .iter()
        .map(|row| row.iter().zip(&coeffs).map(|(b, c)| c * b).sum())
        .collect();
    Ok(WaveFunction {
        samples,
        x_min: psi.x_min,
        dx: psi.dx,
    })
}

/// ‖U(t + t')ψ − U(t)U(t')ψ‖.
pub fn semigroup_check(model: &SystemModel, psi: &WaveFunction, t: f64, t_prime: f64, cfg: &NumericConfig) -> Result<f64> {
    let direct = evolve(model, psi, t + t_prime, cfg)?;
    let composed = evolve(model, &evolve(model, psi, t_prime, cfg)?, t, cfg)?;
    Ok(direct.distance(&composed))
}

/// Compare U(τ/4)ψ with the Fourier-type integral
/// (mω/2πħ)^½ e^{−iπ/4} ∫ e^{−imωx1x2/ħ} ψ(x1) dx1 evaluated term by term.
pub fn quarter_period_fourier_check(osc: &Oscillator, psi: &WaveFunction, cfg: &NumericConfig) -> Result<f64> {
    let model = SystemModel::oscillator(osc.mass, osc.omega).with_hbar(osc.hbar);
    let evolved = evolve(&model, psi, 0.25 * osc.period(), cfg)?;
    let prefactor = Complex64::from_polar((osc.mass * osc.omega / (2.0 * PI * osc.hbar)).sqrt(), -PI / 4.0);
    let k = osc.mass * osc.omega / osc.hbar;
    let direct = WaveFunction {
        samples: (0..psi.len())
            .map(|j| {
                let x2 = psi.x(j);
                let sum: Complex64 = (0..psi.len())
                    .map(|i| psi.samples[i] * psi.weight(i) * Complex64::cis(-k * x2 * psi.x(i)))
                    .sum();
                prefactor * sum
            })
            .collect(),
        x_min: psi.x_min,
        dx: psi.dx,
    };
    Ok(evolved.distance(&direct))
}

/// |⟨g1, U(T)g2⟩ − e^{−iπN/2}⟨g1, Pᴺg2⟩| at T = Nτ/2 + offset, P the
/// reflection about the force centre.
pub fn caustic_limit_defect(
    model: &SystemModel,
    g1: &WaveFunction,
    g2: &WaveFunction,
    n: u32,
    offset: f64,
    cfg: &NumericConfig,
) -> Result<f64> {
    let omega = model.frequency().filter(|&w| w > 0.0).ok_or_else(|| model.unsupported("caustic limit"))?;
    let tc = f64::from(n) * PI / omega;
    let evolved = evolve(model, g2, tc + offset, cfg)?;
    let k = kernel(model, Point::default(), Point::default(), tc, cfg)?;
    let KernelValue::CausticDelta { parity, centre, .. } = k else {
        return Err(Error::NotACaustic { t: tc });
    };
    let weight = k.delta_weight().unwrap_or_default();
    let limit = g1.inner(&g2.reflect(centre, parity)) * weight;
    Ok((g1.inner(&evolved) - limit).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::oscillator_kernel;
    use crate::models::DEFAULT_CAUSTIC_TOL as TOL;

    fn cfg() -> NumericConfig {
        NumericConfig::default()
    }

    fn gaussian(model: &SystemModel, g: Gaussian) -> WaveFunction {
        WaveFunction::on_grid(model, &cfg(), |x| g.value(x))
    }

    #[test]
    fn psi_examples() {
        let p = hermite_psi(0.0, 3, 1.0, 1.0, 1.0);
        assert!((p[0] - PI.powf(-0.25)).abs() < 1e-15);
        assert!((p[0] - 0.75113).abs() < 1e-5);
        assert_eq!(p[1], 0.0);
        for x in [0.3, 1.7, 4.2] {
            let a = hermite_psi(x, 60, 1.0, 1.0, 1.0);
            let b = hermite_psi(-x, 60, 1.0, 1.0, 1.0);
            for n in 0..=60 {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!((a[n] - sign * b[n]).abs() <= 1e-14 * a[n].abs().max(1e-3));
            }
        }
    }

    #[test]
    fn psi_orthonormal() {
        let osc = Oscillator::new(1.3, 0.7, 1.0);
        let n = 4001;
        let l = 14.0 * osc.length();
        let dx = 2.0 * l / (n - 1) as f64;
        let rows: Vec<Vec<f64>> = (0..n).map(|i| osc.psi(-l + i as f64 * dx, 30)).collect();
        for a in [0, 7, 30] {
            for b in [0, 7, 29, 30] {
                let s: f64 = rows.iter().map(|r| r[a] * r[b]).sum::<f64>() * dx;
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-10, "{a} {b} {s}");
            }
        }
    }

    #[test]
    fn spectral_examples() {
        let osc = Oscillator::unit();
        let s = osc.spectral_kernel(0.0, 0.0, PI / 2.0, 200, 0.1);
        let c = osc.continued_kernel(0.0, 0.0, PI / 2.0, 0.1).unwrap();
        assert!((s - c).norm() < 1e-8 * c.norm());
        let h = osc.spectral_kernel(0.0, 0.0, 0.0, 200, 0.5);
        assert!(h.re > 0.0 && h.im == 0.0);
        let a = osc.spectral_kernel(0.4, 1.1, 2.0, 100, 0.1);
        let b = osc.spectral_kernel(0.4, 1.1, 2.0, 200, 0.1);
        // First omitted term is bounded by e^{−100.5η}·max|ψ_n|² ≤ e^{−10}.
        assert!((a - b).norm() < (-10.0f64).exp());
    }

    #[test]
    fn continued_forms_agree() {
        let osc = Oscillator::new(1.2, 0.9, 1.0);
        for t in [0.3, 1.0, 2.5, 4.0, 9.0] {
            for (x1, x2) in [(0.0, 0.0), (-1.5, 0.7), (2.0, 2.0)] {
                let a = osc.continued_kernel(x1, x2, t, 0.05).unwrap();
                let b = osc.mehler_continued(x1, x2, t, 0.05);
                assert!((a - b).norm() < 1e-10 * a.norm(), "T = {t}: {a} {b}");
            }
        }
    }

    #[test]
    fn continued_tends_to_kernel() {
        let osc = Oscillator::unit();
        for t in [0.8, 2.0, 4.0, 5.5] {
            let k = oscillator_kernel(1.0, 1.0, 1.0, 0.3, -0.6, t, TOL).unwrap().amplitude().unwrap();
            let m = osc.mehler_continued(0.3, -0.6, t, 1e-9);
            assert!((k - m).norm() < 1e-7 * k.norm());
        }
    }

    #[test]
    fn generating_examples() {
        assert_eq!(generating_function(0.3, -1.2, Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
        let z = Complex64::new(0.3, 0.0);
        let closed = generating_function(0.5, 0.5, z).unwrap();
        assert!((generating_series(0.5, 0.5, z, 40) - closed).norm() < 1e-12);
        let z = Complex64::new(-0.2, -0.4).exp();
        let v = generating_function(0.5, -0.8, z).unwrap();
        assert!(v.re.is_finite() && v.im.is_finite());
        assert!((Complex64::new(1.0, 0.0) - z * z).norm() > 0.0);
        assert!(matches!(
            generating_function(0.1, 0.2, Complex64::new(1.0, 0.0)),
            Err(Error::NearBranchCut { .. })
        ));
    }

    #[test]
    fn ground_state_phase() {
        let model = SystemModel::oscillator(1.0, 1.0);
        let psi0 = gaussian(&model, Gaussian::new(0.0, 1.0, 0.0));
        for t in [0.4, 2.0, 5.0, 9.7] {
            let out = evolve(&model, &psi0, t, &cfg()).unwrap();
            assert!(out.distance(&psi0.scale(Complex64::cis(-0.5 * t))) < 1e-6, "T = {t}");
        }
    }

    #[test]
    fn caustic_evolution_examples() {
        let model = SystemModel::oscillator(1.0, 1.0);
        let psi = gaussian(&model, Gaussian::new(0.8, 0.7, 1.3));
        let half = evolve(&model, &psi, PI, &cfg()).unwrap();
        assert!(half.distance(&psi.reflect(0.0, -1).scale(Complex64::new(0.0, -1.0))) < 1e-14);
        let full = evolve(&model, &psi, 2.0 * PI, &cfg()).unwrap();
        assert!(full.distance(&psi.scale(Complex64::new(-1.0, 0.0))) < 1e-14);
        // Quadrature through two near-period steps agrees with the delta.
        let near = evolve(&model, &psi, 2.0 * PI * (1.0 + 1e-7), &cfg()).unwrap();
        assert!(near.distance(&full) < 1e-5);
    }

    #[test]
    fn quadrature_matches_spectral_and_analytic() {
        let c = cfg();
        for model in [SystemModel::oscillator(1.0, 1.0), SystemModel::forced(1.0, 1.3, 0.7)] {
            let g = Gaussian::new(-0.5, 0.6, 0.8);
            let psi = gaussian(&model, g);
            for t in [0.9, 3.0, 7.3] {
                let a = evolve(&model, &psi, t, &c).unwrap();
                let b = evolve_spectral(&model, &psi, t, &c).unwrap();
                assert!(a.distance(&b) < 1e-7, "{} T = {t}: {}", model.name(), a.distance(&b));
                assert!((a.norm() - 1.0).abs() < 1e-6);
                let q = quadratic_kernel(&model, t, &c).unwrap();
                for i in (0..psi.len()).step_by(301) {
                    let x = psi.x(i);
                    let exact = g.propagate(&q, x);
                    assert!((b.samples[i] - exact).norm() < 1e-7, "x = {x}");
                }
            }
        }
    }

    #[test]
    fn semigroup_identity_and_parity() {
        let c = cfg();
        let model = SystemModel::oscillator(1.0, 1.0);
        let psi = gaussian(&model, Gaussian::new(1.0, 0.8, -0.4));
        assert_eq!(semigroup_check(&model, &psi, PI / 4.0, 0.0, &c).unwrap(), 0.0);
        assert!(semigroup_check(&model, &psi, PI / 4.0, PI / 4.0, &c).unwrap() < 1e-6);
        let q = evolve(&model, &psi, PI / 2.0, &c).unwrap();
        let twice = evolve(&model, &q, PI / 2.0, &c).unwrap();
        let parity = psi.reflect(0.0, -1).scale(Complex64::new(0.0, -1.0));
        assert!(twice.distance(&parity) < 1e-6);
    }

    #[test]
    fn fourier_examples() {
        let c = cfg();
        let osc = Oscillator::unit();
        let model = SystemModel::oscillator(1.0, 1.0);
        let g0 = gaussian(&model, Gaussian::new(0.0, 1.0, 0.0));
        assert!(quarter_period_fourier_check(&osc, &g0, &c).unwrap() < 1e-6);
        let u = evolve(&model, &g0, PI / 2.0, &c).unwrap();
        assert!(u.distance(&g0.scale(Complex64::cis(-PI / 4.0))) < 1e-6);
        let psi1 = WaveFunction::on_grid(&model, &c, |x| Complex64::new(osc.psi(x, 1)[1], 0.0));
        let u = evolve(&model, &psi1, PI / 2.0, &c).unwrap();
        assert!(u.distance(&psi1.scale(Complex64::cis(-0.75 * PI))) < 1e-6);
        let off = gaussian(&model, Gaussian::new(1.5, 0.5, 0.0));
        assert!(quarter_period_fourier_check(&osc, &off, &c).unwrap() < 1e-6);
    }

    #[test]
    fn edge_mass_rejected() {
        let model = SystemModel::oscillator(1.0, 1.0);
        let psi = gaussian(&model, Gaussian::new(11.5, 1.0, 0.0));
        assert!(matches!(evolve(&model, &psi, 1.0, &cfg()), Err(Error::DomainTooSmall { .. })));
    }

    #[test]
    fn magnetic_packet_matches_brute_force() {
        let g = Gaussian2 {
            centre: Point::new(0.3, -0.2),
            width: 0.7,
            wavevector: Point::new(0.5, 0.1),
        };
        let t = 1.1;
        let r2 = Point::new(0.4, 0.25);
        let exact = g.propagate_magnetic(1.0, 1.0, 1.0, t, r2, TOL).unwrap();
        let n = 801;
        let l = 7.0;
        let h = 2.0 * l / (n - 1) as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let r1 = Point::new(-l + i as f64 * h, -l + j as f64 * h);
                let k = crate::kernels::magnetic_kernel(1.0, 1.0, 1.0, r1, r2, t, TOL).unwrap();
                acc += k.amplitude().unwrap() * g.value(r1);
            }
        }
        acc *= h * h;
        assert!((acc - exact).norm() < 1e-8 * exact.norm(), "{acc} {exact}");
    }
}
