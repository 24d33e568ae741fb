//! The Fourier-mode route: each Dirichlet sine mode contributes a Fresnel
//! integral, and the fluctuation factor is the ratio of the eigenvalue
//! products against the free particle.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::models::{caustic_index_for, CausticIndex};

/// ∫ e^{iλx²/2} dx = (2π/|λ|)^½ e^{iπ/4·sign λ}.
pub fn fresnel_factor(lambda: f64) -> Result<Complex64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::ZeroEigenvalue);
    }
    let phase = if lambda > 0.0 { PI / 4.0 } else { -PI / 4.0 };
    Ok(Complex64::from_polar((2.0 * PI / lambda.abs()).sqrt(), phase))
}

/// Σ_{k>n} 1/k² to O(n⁻⁴).
fn inverse_square_tail(n: usize) -> f64 {
    let n = n as f64;
    1.0 / n - 0.5 / (n * n) + 1.0 / (6.0 * n * n * n)
}

/// Π_{k=1}^{n} |1 − x²/k²π²| with the first-order log tail for k > n;
/// tends to |sin x|/x.
pub fn euler_product(x: f64, n: usize) -> f64 {
    let n = n.max(1);
    let q = x * x / (PI * PI);
    let log: f64 = (1..=n)
        .map(|k| (1.0 - q / (k * k) as f64).abs().ln())
        .sum();
    (log - q * inverse_square_tail(n)).exp()
}

/// m(kπ/T)², k = 1..=n.
pub fn free_eigenvalues(mass: f64, t: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| {
            let q = k as f64 * PI / t;
            mass * q * q
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeProductResult {
    /// Π λ_free/|λ_k| including the tail.
    pub ratio: f64,
    pub negative_count: u32,
    /// Product over modes of the Fresnel phases relative to the free ones.
    pub mode_phase: Complex64,
    pub reduced_propagator: Complex64,
    pub truncation: usize,
}

/// Ratio, negative-mode count and phase from the oscillator spectrum
/// λ_k = m((kπ/T)² − ω²), normalised by the free spectrum.
fn mode_ratio(omega: f64, t: f64, n: usize) -> Result<(f64, u32, Complex64)> {
    let n = n.max(1);
    let mut log_ratio = 0.0;
    let mut negatives = 0;
    let mut phase = Complex64::new(1.0, 0.0);
    let free = free_eigenvalues(1.0, t, n);
    for lf in free {
        let lambda = lf - omega * omega;
        let f = fresnel_factor(lambda)?;
        // fresnel(λ)/fresnel(λ_free) = (λ_free/|λ|)^½ · e^{iπ/4(sign λ − 1)}.
        let rel = f / fresnel_factor(lf)?;
        phase *= rel / rel.norm();
        if lambda < 0.0 {
            negatives += 1;
        }
        log_ratio += (lf / lambda.abs()).ln();
    }
    let q = omega * omega * t * t / (PI * PI);
    log_ratio += q * inverse_square_tail(n);
    Ok((log_ratio.exp(), negatives, phase))
}

fn regular(omega: f64, t: f64, tol: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("T must be > 0, got {t}")));
    }
    match caustic_index_for(omega, t, tol) {
        CausticIndex::Caustic(n) => Err(Error::CausticTime { t, maslov_n: n }),
        CausticIndex::Regular(_) => Ok(()),
    }
}

/// (m/2πiħT)^½ · ratio^½ · e^{−iπN/2}, N the number of negative modes.
pub fn reduced_propagator(mass: f64, omega: f64, hbar: f64, t: f64, n: usize, caustic_tol: f64) -> Result<ModeProductResult> {
    regular(omega, t, caustic_tol)?;
    let (ratio, negatives, phase) = mode_ratio(omega, t, n)?;
    let free = Complex64::from_polar((mass / (2.0 * PI * hbar * t)).sqrt(), -PI / 4.0);
    Ok(ModeProductResult {
        ratio,
        negative_count: negatives,
        mode_phase: phase,
        reduced_propagator: free * ratio.sqrt() * maslov_phase(negatives),
        truncation: n,
    })
}

/// The planar version: two identical decoupled mode families, so the ratio
/// is squared and N counted twice.
pub fn reduced_propagator_planar(mass: f64, omega: f64, hbar: f64, t: f64, n: usize, caustic_tol: f64) -> Result<ModeProductResult> {
    regular(omega, t, caustic_tol)?;
    let (ratio, negatives, phase) = mode_ratio(omega, t, n)?;
    let free = Complex64::from_polar(mass / (2.0 * PI * hbar * t), -PI / 2.0);
    Ok(ModeProductResult {
        ratio: ratio * ratio,
        negative_count: 2 * negatives,
        mode_phase: phase * phase,
        reduced_propagator: free * ratio * maslov_phase(2 * negatives),
        truncation: n,
    })
}

/// e^{−iπN/2}, exact for integer N.
pub fn maslov_phase(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::DEFAULT_CAUSTIC_TOL;
    use proptest::prelude::*;

    #[test]
    fn fresnel_examples() {
        let f = fresnel_factor(2.0 * PI).unwrap();
        assert!((f - Complex64::from_polar(1.0, PI / 4.0)).norm() < 1e-15);
        let g = fresnel_factor(-2.0 * PI).unwrap();
        assert!((g - Complex64::from_polar(1.0, -PI / 4.0)).norm() < 1e-15);
        assert!((f * g).arg().abs() < 1e-15);
        assert_eq!(fresnel_factor(0.0), Err(Error::ZeroEigenvalue));
    }

    #[test]
    fn euler_examples() {
        assert!((euler_product(PI / 2.0, 10_000) - 2.0 / PI).abs() < 1e-6 * 2.0 / PI);
        let e = 4f64.sin().abs() / 4.0;
        assert!((euler_product(4.0, 10_000) - e).abs() < 1e-6 * e);
        assert!((euler_product(1e-8, 10) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tail_improves_convergence() {
        let x = 2.0;
        let exact = x.sin() / x;
        let bare = |n: usize| (1..=n).map(|k| 1.0 - x * x / (PI * PI * (k * k) as f64)).product::<f64>();
        for n in [100, 1000] {
            assert!((euler_product(x, n) - exact).abs() < 1e-3 * (bare(n) - exact).abs());
        }
    }

    #[test]
    fn free_spectrum() {
        let ev = free_eigenvalues(1.0, PI, 3);
        assert_eq!(ev.len(), 3);
        for (k, v) in ev.iter().enumerate() {
            assert!((v - ((k + 1) * (k + 1)) as f64).abs() < 1e-12);
        }
        let half = free_eigenvalues(1.0, 2.0 * PI, 3);
        assert!(half.iter().zip(&ev).all(|(a, b)| (a * 4.0 - b).abs() < 1e-12 && *a > 0.0));
    }

    #[test]
    fn reduced_examples() {
        let tol = DEFAULT_CAUSTIC_TOL;
        let r = reduced_propagator(1.0, 1.0, 1.0, PI / 2.0, 10_000, tol).unwrap();
        assert!((r.reduced_propagator.norm() - (2.0 * PI).sqrt().recip()).abs() < 1e-7);
        assert_eq!(r.negative_count, 0);
        let s = reduced_propagator(1.0, 1.0, 1.0, 1.5 * PI, 10_000, tol).unwrap();
        assert_eq!(s.negative_count, 1);
        assert!((s.reduced_propagator.norm() - r.reduced_propagator.norm()).abs() < 1e-7);
        let rel = s.reduced_propagator / r.reduced_propagator;
        assert!((rel / rel.norm() - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        let z = reduced_propagator(1.0, 0.0, 1.0, 1.0, 100, tol).unwrap();
        assert_eq!(z.ratio, 1.0);
        assert!(matches!(
            reduced_propagator(1.0, 1.0, 1.0, PI, 100, tol),
            Err(Error::CausticTime { maslov_n: 1, .. })
        ));
    }

    proptest! {
        #[test]
        fn per_mode_phases_count_negatives(t in 0.05f64..30.0) {
            prop_assume!(t.sin().abs() > 1e-3);
            let r = reduced_propagator(1.0, 1.0, 1.0, t, 200, DEFAULT_CAUSTIC_TOL).unwrap();
            prop_assert_eq!(r.negative_count, (t / PI).floor() as u32);
            prop_assert!((r.mode_phase - maslov_phase(r.negative_count)).norm() < 1e-9);
        }

        #[test]
        fn ratio_converges(t in prop::sample::select(alloc::vec![0.5, 2.0, 4.0, 8.0])) {
            let exact = t / t.sin().abs();
            let r = reduced_propagator(1.0, 1.0, 1.0, t, 10_000, DEFAULT_CAUSTIC_TOL).unwrap();
            prop_assert!((r.ratio - exact).abs() <= 1e-8 * exact);
        }
    }
}
