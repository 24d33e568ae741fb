//! Symmetric eigenvalue counting: Sturm sequences for tridiagonal matrices,
//! banded LDLᵀ inertia, and a dense Householder fallback.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

/// Counts of eigenvalues below, inside and above a window around a shift.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Inertia {
    pub below: usize,
    pub at: usize,
    pub above: usize,
}

/// Anything that can count its eigenvalues strictly below a shift.
pub trait EigenCount {
    fn order(&self) -> usize;

    fn count_below(&self, shift: f64) -> usize;

    /// Gershgorin interval containing the spectrum.
    fn spectral_bounds(&self) -> (f64, f64);

    /// Eigenvalue counts in (−∞, s − tol], (s − tol, s + tol), [s + tol, ∞).
    fn inertia(&self, shift: f64, zero_tol: f64) -> Inertia {
        let below = self.count_below(shift - zero_tol);
        let upto = self.count_below(shift + zero_tol);
        Inertia {
            below,
            at: upto - below,
            above: self.order() - upto,
        }
    }

    /// The k-th smallest eigenvalue (0-based) by bisection on the count.
    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.spectral_bounds();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * scale {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `count` smallest eigenvalues in ascending order.
    fn smallest(&self, count: usize) -> Vec<f64> {
        (0..count.min(self.order())).map(|k| self.eigenvalue(k)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// off[i] couples rows i and i + 1.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal length");
        Self { diag, off }
    }

    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, (&d, &x)) in self.diag.iter().zip(v).enumerate() {
            acc += d * x * x;
            if i + 1 < v.len() {
                acc += 2.0 * self.off[i] * x * v[i + 1];
            }
        }
        acc
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.diag.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i + 1 < n {
                a[i][i + 1] = self.off[i];
                a[i + 1][i] = self.off[i];
            }
        }
        a
    }
}

impl EigenCount for SymTridiagonal {
    fn order(&self) -> usize {
        self.diag.len()
    }

    /// Sturm sequence: number of negative pivots of T − shift·I.
    fn count_below(&self, shift: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = d - shift - e2 / q;
            if q.abs() < tiny {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn spectral_bounds(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }
}

/// Symmetric banded matrix in lower-band storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SymBanded {
    n: usize,
    bandwidth: usize,
    /// band[i·(p+1) + (i − j)] = A[i][j] for 0 ≤ i − j ≤ p.
    band: Vec<f64>,
}

impl SymBanded {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self {
            n,
            bandwidth,
            band: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bandwidth, "entry ({i}, {j}) outside band");
        i * (self.bandwidth + 1) + (i - j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i.abs_diff(j) > self.bandwidth {
            0.0
        } else {
            self.band[self.idx(i, j)]
        }
    }

    /// Add `v` to A[i][j] (and A[j][i]).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.band[k] += v;
    }

    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            acc += self.get(i, i) * v[i] * v[i];
            for j in i.saturating_sub(self.bandwidth)..i {
                acc += 2.0 * self.get(i, j) * v[i] * v[j];
            }
        }
        acc
    }


    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Negative pivot count of LDLᵀ of A − shift·I without pivoting, or
    /// `None` when a pivot is too small relative to the matrix scale.
    pub fn ldl_negative_count(&self, shift: f64) -> Option<usize> {
        let (n, p) = (self.n, self.bandwidth);
        let scale = self
            .band
            .iter()
            .fold(shift.abs(), |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let w = p + 1;
        // l[i·w + (i − j)] = L[i][j]; d[j] the pivots.
        let mut l = vec![0.0; n * w];
        let mut d = vec![0.0; n];
        let mut negatives = 0;
        for j in 0..n {
            let lo = j.saturating_sub(p);
            let mut dj = self.get(j, j) - shift;
            for k in lo..j {
                let ljk = l[j * w + (j - k)];
                dj -= ljk * ljk * d[k];
            }
            if dj.abs() <= 1e-13 * scale {
                return None;
            }
            d[j] = dj;
            if dj < 0.0 {
                negatives += 1;
            }
            for i in j + 1..(j + p + 1).min(n) {
                let mut v = self.get(i, j);
                for k in i.saturating_sub(p).max(lo)..j {
                    v -= l[i * w + (i - k)] * l[j * w + (j - k)] * d[k];
                }
                l[i * w + (i - j)] = v / dj;
            }
        }
        Some(negatives)
    }
}

impl EigenCount for SymBanded {
    fn order(&self) -> usize {
        self.n
    }

    /// Sylvester inertia from LDLᵀ. A near-zero pivot means an eigenvalue
    /// within rounding of `shift` or an unlucky unpivoted breakdown; nearby
    /// shifts are tried first, then the dense tridiagonal reduction.
    fn count_below(&self, shift: f64) -> usize {
        let (lo, hi) = self.spectral_bounds();
        let nudge = 1e-11 * lo.abs().max(hi.abs());
        for k in [0.0, -1.0, -2.0, -4.0] {
            if let Some(c) = self.ldl_negative_count(shift + k * nudge) {
                return c;
            }
        }
        householder_tridiagonal(self.to_dense()).count_below(shift)
    }

    fn spectral_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let lo_j = i.saturating_sub(self.bandwidth);
            let hi_j = (i + self.bandwidth + 1).min(self.n);
            let r: f64 = (lo_j..hi_j)
                .filter(|&j| j != i)
                .map(|j| self.get(i, j).abs())
                .sum();
            lo = lo.min(self.get(i, i) - r);
            hi = hi.max(self.get(i, i) + r);
        }
        (lo, hi)
    }
}

/// Reduce a dense symmetric matrix to tridiagonal form by Householder
/// reflections; the result has the same spectrum.
pub fn householder_tridiagonal(mut a: Vec<Vec<f64>>) -> SymTridiagonal {
    let n = a.len();
    if n == 0 {
        return SymTridiagonal::new(Vec::new(), Vec::new());
    }
    for k in 0..n.saturating_sub(2) {
        let alpha_sq: f64 = (k + 1..n).map(|i| a[i][k] * a[i][k]).sum();
        if alpha_sq == 0.0 {
            continue;
        }
        let alpha = if a[k + 1][k] > 0.0 { -alpha_sq.sqrt() } else { alpha_sq.sqrt() };
        let mut v = vec![0.0; n];
        v[k + 1] = a[k + 1][k] - alpha;
        for i in k + 2..n {
            v[i] = a[i][k];
        }
        let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        // A ← H A H with H = I − 2vvᵀ/vᵀv.
        let p: Vec<f64> = (0..n)
            .map(|i| 2.0 * (k + 1..n).map(|j| a[i][j] * v[j]).sum::<f64>() / vnorm_sq)
            .collect();
        let kappa = (k + 1..n).map(|i| v[i] * p[i]).sum::<f64>() / vnorm_sq;
        let q: Vec<f64> = (0..n).map(|i| p[i] - kappa * v[i]).collect();
        for i in 0..n {
            for j in 0..n {
                a[i][j] -= v[i] * q[j] + q[i] * v[j];
            }
        }
    }
    let diag = (0..n).map(|i| a[i][i]).collect();
    let off = (0..n - 1).map(|i| a[i + 1][i]).collect();
    SymTridiagonal::new(diag, off)
}

/// Singular values of a 2×2 matrix, descending.
pub fn singular_values_2x2(m: [[f64; 2]; 2]) -> [f64; 2] {
    let [[a, b], [c, d]] = m;
    // σ₁,₂ = (√((a+d)² + (c−b)²) ± √((a−d)² + (b+c)²)) / 2.
    let s = (a + d).hypot(c - b);
    let t = (a - d).hypot(b + c);
    [0.5 * (s + t), 0.5 * (s - t).abs()]
}
