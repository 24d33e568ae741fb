//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;

use maslov_core::classical::{action_closed, analytic_endpoint_hessian, principal_function_hessian, reference_path};
use maslov_core::hermite_oracle::{
    caustic_limit_defect, evolve, evolve_spectral, quarter_period_fourier_check, semigroup_check, Gaussian,
    Gaussian2, Oscillator, WaveFunction,
};
use maslov_core::interference::{interfere, InterferenceConfig};
use maslov_core::kernels::{forced_kernel, free_kernel, oscillator_kernel, quadratic_kernel, van_vleck_kernel, HessianSource};
use maslov_core::modeproduct::{euler_product, reduced_propagator};
use maslov_core::morse::morse_index;
use maslov_core::secondvar::{assemble_operator, default_zero_tol, inertia, spectrum};
use maslov_core::{KernelValue, NumericConfig, Point, Result, SystemModel};

const TOL: f64 = 1e-9;

type Check = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn amp(k: Result<KernelValue>) -> Result<Complex64> {
    let k = k?;
    Ok(k.amplitude().expect("regular time"))
}

const TIMES: [f64; 5] = [0.3, 1.0, 2.5, 4.0, 7.0];
const POINTS: [f64; 4] = [-1.5, 0.0, 0.7, 2.0];

fn maslov_three_way() -> Result<Outcome> {
    let cfg = NumericConfig::default();
    let osc = SystemModel::oscillator(1.0, 1.0);
    let (lo, hi) = (0.05, 10.0 * PI);
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for i in 0..200 {
        let t = lo + (hi - lo) * (i as f64 + 0.5) / 200.0;
        if t.sin().abs() < 1e-3 {
            continue;
        }
        checked += 1;
        let expected = (t / PI).floor() as usize;
        let modes = reduced_propagator(1.0, 1.0, 1.0, t, 10_000, TOL)?.negative_count as usize;
        let path = reference_path(&osc, t, cfg.grid_points)?;
        let op = assemble_operator(&osc, &path, cfg.grid_points)?;
        let negative = inertia(&op, 0.0, default_zero_tol(&osc, t)).below;
        let mu = morse_index(&osc, t, &cfg)?.morse_index;
        if [modes, negative, mu] != [expected; 3] {
            mismatches.push(format!("T={t:.4}: modes {modes}, inertia {negative}, morse {mu}, floor {expected}"));
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{checked} times, {} mismatches {:?}", mismatches.len(), mismatches.first()),
    )
}

fn kernel_agreement() -> Result<Outcome> {
    let cfg = NumericConfig::default();
    let osc = SystemModel::oscillator(1.0, 1.0);
    let (mut worst_vv, mut worst_modes) = (0.0f64, 0.0f64);
    for t in TIMES {
        let modes = reduced_propagator(1.0, 1.0, 1.0, t, 10_000, TOL)?;
        let n = modes.negative_count;
        for x1 in POINTS {
            for x2 in POINTS {
                let closed = amp(oscillator_kernel(1.0, 1.0, 1.0, x1, x2, t, TOL))?;
                let vv = van_vleck_kernel(&osc, x1.into(), x2.into(), t, n, HessianSource::Analytic, &cfg)?;
                let s = action_closed(&osc, x1.into(), x2.into(), t, &cfg)?;
                let mp = modes.reduced_propagator * Complex64::cis(s);
                worst_vv = worst_vv.max(rel(vv, closed));
                worst_modes = worst_modes.max(rel(mp, closed));
            }
        }
    }
    outcome(
        worst_vv <= 1e-8 && worst_modes <= 1e-6,
        format!("max rel err: Van Vleck {worst_vv:.2e} (≤1e-8), mode product {worst_modes:.2e} (≤1e-6)"),
    )
}

fn spectral_oracle() -> Result<Outcome> {
    let osc = Oscillator::unit();
    let mut worst = 0.0f64;
    for t in TIMES {
        for x1 in POINTS {
            for x2 in POINTS {
                let s = osc.spectral_kernel(x1, x2, t, 400, 0.1);
                let c = osc.mehler_continued(x1, x2, t, 0.1);
                worst = worst.max(rel(s, c));
            }
        }
    }
    outcome(worst <= 1e-8, format!("max rel err {worst:.2e} (≤1e-8), η = 0.1, n_max = 400"))
}

fn euler() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for x in [0.5, PI / 2.0, 2.0, 4.0, 8.0] {
        let exact = x.sin().abs() / x;
        worst = worst.max((euler_product(x, 10_000) - exact).abs() / exact);
    }
    let half = euler_product(PI / 2.0, 10_000);
    outcome(
        worst <= 1e-6 && (half - 2.0 / PI).abs() <= 1e-6,
        format!("max rel err {worst:.2e} (≤1e-6); x = π/2 → {half:.6}"),
    )
}

fn caustic_limit() -> Result<Outcome> {
    let cfg = NumericConfig::default();
    let osc = SystemModel::oscillator(1.0, 1.0);
    let g1 = WaveFunction::on_grid(&osc, &cfg, |x| Gaussian::new(-0.6, 0.8, 0.5).value(x));
    let g2 = WaveFunction::on_grid(&osc, &cfg, |x| Gaussian::new(0.9, 0.6, -0.3).value(x));
    let mut worst = 0.0f64;
    for n in [1, 2] {
        for offset in [-1e-4, 1e-4] {
            worst = worst.max(caustic_limit_defect(&osc, &g1, &g2, n, offset, &cfg)?);
        }
    }
    outcome(worst <= 1e-3, format!("max defect {worst:.2e} (≤1e-3) at |T − Nτ/2| = 1e-4, N = 1, 2"))
}

fn semigroup() -> Result<Outcome> {
    let cfg = NumericConfig::default();
    let osc = SystemModel::oscillator(1.0, 1.0);
    let tau = 2.0 * PI;
    let psi = WaveFunction::on_grid(&osc, &cfg, |x| Gaussian::new(0.7, 0.5, 1.1).value(x));
    let s1 = semigroup_check(&osc, &psi, tau / 8.0, tau / 8.0, &cfg)?;
    let s2 = semigroup_check(&osc, &psi, tau / 6.0, tau / 3.0, &cfg)?;
    let fourier = quarter_period_fourier_check(&Oscillator::unit(), &psi, &cfg)?;
    let quarter = evolve(&osc, &psi, tau / 4.0, &cfg)?;
    let twice = evolve(&osc, &quarter, tau / 4.0, &cfg)?;
    let parity = psi.reflect(0.0, -1).scale(Complex64::new(0.0, -1.0));
    let p = twice.distance(&parity);
    let worst = s1.max(s2).max(fourier).max(p);
    outcome(
        worst <= 1e-6,
        format!("semigroup {s1:.1e}, {s2:.1e}; quarter-period Fourier {fourier:.1e}; (U_τ/4)² vs −i·P {p:.1e} (≤1e-6)"),
    )
}

fn forced() -> Result<Outcome> {
    let cfg = NumericConfig::default();
    let model = SystemModel::forced(1.0, 1.0, 0.8);
    let packet = Gaussian::new(0.4, 0.55, 0.0);
    let psi = WaveFunction::on_grid(&model, &cfg, |x| packet.value(x));
    let mut quad = 0.0f64;
    for t in [0.6, 2.0, 4.4] {
        let a = evolve(&model, &psi, t, &cfg)?;
        let b = evolve_spectral(&model, &psi, t, &cfg)?;
        quad = quad.max(a.distance(&b));
        let q = quadratic_kernel(&model, t, &cfg)?;
        for i in (0..psi.len()).step_by(97) {
            quad = quad.max((a.samples[i] - packet.propagate(&q, psi.x(i))).norm());
        }
    }
    let mut reduces = true;
    for t in TIMES {
        for x1 in POINTS {
            for x2 in POINTS {
                reduces &= forced_kernel(1.0, 1.0, 0.0, 1.0, x1, x2, t, TOL)? == oscillator_kernel(1.0, 1.0, 1.0, x1, x2, t, TOL)?;
            }
        }
    }
    let g1 = WaveFunction::on_grid(&model, &cfg, |x| Gaussian::new(0.2, 0.7, 0.0).value(x));
    let mut caustic = 0.0f64;
    for offset in [-1e-4, 1e-4] {
        caustic = caustic.max(caustic_limit_defect(&model, &g1, &psi, 1, offset, &cfg)?);
    }
    outcome(
        quad <= 1e-5 && reduces && caustic <= 1e-3,
        format!("quadrature vs spectral/analytic {quad:.1e} (≤1e-5); f = 0 exact: {reduces}; shifted parity at caustic {caustic:.1e} (≤1e-3)"),
    )
}

fn magnetic() -> Result<Outcome> {
    let cfg = NumericConfig::default();
    let (osc, mag) = (SystemModel::oscillator(1.0, 1.0), SystemModel::magnetic(1.0, 1.0));
    let mut doubling = true;
    for t in [0.5, 2.0, 4.0, 5.0, 7.5, 11.0, 14.0] {
        doubling &= spectrum(&mag, t, &cfg)?.n_negative == 2 * spectrum(&osc, t, &cfg)?.n_negative;
    }
    let mut det_err = 0.0f64;
    for t in [0.4f64, 1.3, 2.5, 4.0, 5.9] {
        let exact = 1.0 / t.sin().powi(2);
        let fd = principal_function_hessian(&mag, Point::new(0.3, -0.1), Point::new(-0.7, 0.5), t, 1e-3, &cfg)?;
        let analytic = analytic_endpoint_hessian(&mag, t, &cfg)?;
        det_err = det_err.max((fd.det() - exact).abs() / exact).max((analytic.det() - exact).abs() / exact);
    }
    let g = Gaussian2 {
        centre: Point::new(0.5, -0.3),
        width: 0.6,
        wavevector: Point::new(0.4, 0.2),
    };
    let (n_grid, half) = (161, 4.0);
    let h = 2.0 * half / (n_grid - 1) as f64;
    let mut packet_err = 0.0f64;
    for n in [1u32, 2] {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for offset in [-1e-4, 1e-4] {
            let t = f64::from(n) * PI + offset;
            let mut err = 0.0;
            for i in 0..n_grid {
                for j in 0..n_grid {
                    let r = Point::new(-half + i as f64 * h, -half + j as f64 * h);
                    let u = g.propagate_magnetic(1.0, 1.0, 1.0, t, r, TOL)?;
                    err += (u - g.value(r) * sign).norm_sqr() * h * h;
                }
            }
            packet_err = packet_err.max(err.sqrt());
        }
    }
    outcome(
        doubling && det_err <= 1e-6 && packet_err <= 1e-3,
        format!("inertia doubling: {doubling}; det rel err {det_err:.1e} (≤1e-6); full-period (−1)ᴺ action {packet_err:.1e} (≤1e-3)"),
    )
}

fn morse_jumps() -> Result<Outcome> {
    let cfg = NumericConfig::default();
    let mut seen = Vec::new();
    let mut ok = true;
    for (model, nu) in [
        (SystemModel::oscillator(1.0, 1.0), 1),
        (SystemModel::forced(1.0, 1.4, 0.3), 1),
        (SystemModel::magnetic(1.0, 1.0), 2),
    ] {
        let r = morse_index(&model, 14.0, &cfg)?;
        ok &= !r.conjugate_times.is_empty();
        for &(t, m) in &r.conjugate_times {
            let jump = r.index_at(t + 1e-4) - r.index_at(t - 1e-4);
            ok &= jump == nu && m == nu;
        }
        seen.push(format!("{}: {} jumps of {nu}", model.name(), r.conjugate_times.len()));
    }
    outcome(ok, seen.join("; "))
}

fn free_limits() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for t in [0.5f64, 1.0, 3.0] {
        for x1 in POINTS {
            for x2 in POINTS {
                let k = amp(oscillator_kernel(1.0, 1e-6, 1.0, x1, x2, t, TOL))?;
                worst = worst.max(rel(k, free_kernel(1.0, 1.0, x1, x2, t)));
            }
        }
    }
    let ratio = reduced_propagator(1.0, 1e-6, 1.0, 1.0, 10_000, TOL)?.ratio;
    outcome(
        worst <= 1e-4 && (ratio - 1.0).abs() <= 1e-6,
        format!("kernel rel err {worst:.1e} (≤1e-4); mode ratio − 1 = {:.1e} (≤1e-6)", ratio - 1.0),
    )
}

fn interference() -> Result<Outcome> {
    let cfg = NumericConfig::default();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    let cases = [
        InterferenceConfig::standard(1.0, 1.0, 1.0),
        InterferenceConfig::with_durations(1.0, 1.0, 1.0, PI / 2.0, 2.0),
        InterferenceConfig::with_durations(1.0, 1.0, 1.0, PI / 2.0, 2.0 * PI + 0.25),
    ];
    for c in &cases {
        let r = interfere(c, &cfg)?;
        let crossed = r.arms[1].maslov_n - r.arms[0].maslov_n;
        let err = (r.relative_phase + 0.5 * PI * f64::from(crossed)).abs();
        worst = worst.max(err);
        parts.push(format!("{crossed} caustic(s) → {:.6}", r.relative_phase));
    }
    outcome(worst <= 1e-3, format!("{}; max err {worst:.1e} (≤1e-3)", parts.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 11] = [
        ("Maslov three-way consistency", maslov_three_way),
        ("oscillator kernel agreement", kernel_agreement),
        ("spectral oracle at complex time", spectral_oracle),
        ("Euler product", euler),
        ("caustic delta limit", caustic_limit),
        ("semigroup and quarter period", semigroup),
        ("forced oscillator", forced),
        ("magnetic field", magnetic),
        ("Morse index jumps", morse_jumps),
        ("free limits", free_limits),
        ("interference phase", interference),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.2}s]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
