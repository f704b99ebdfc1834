//! Test-bed metrics and directions built from band-limited Fourier data.
//!
//! Every generator keeps its trigonometric degree at or below `N / 4` so that
//! products formed by the functionals alias only weakly on the grid.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FormField, MetricField, TorusGeometry};
use crate::exterior::PointForm;
use crate::linalg::SmallMat;
use crate::{Error, Result, C64, MAX_N};
#[allow(unused_imports)]
use num_traits::Float;

/// Number of random wavevectors drawn by the random generators.
pub const RANDOM_TERMS: usize = 3;

/// One Fourier mode `a cos(k·x) + b sin(k·x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrigTerm {
    /// Integer wavevector over the real axes `x_1..x_n, y_1..y_n`.
    pub k: [i32; 2 * MAX_N],
    /// Cosine amplitude.
    pub a: f64,
    /// Sine amplitude.
    pub b: f64,
}

/// Real trigonometric polynomial on the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    axes: usize,
    constant: f64,
    terms: Vec<TrigTerm>,
}

impl TrigPoly {
    /// Constant polynomial over `2n` real axes.
    pub fn constant(n: usize, c: f64) -> Self {
        TrigPoly { axes: 2 * n, constant: c, terms: Vec::new() }
    }

    /// Add `a cos(k·x) + b sin(k·x)`.
    pub fn with_term(mut self, k: &[i32], a: f64, b: f64) -> Self {
        let mut kk = [0; 2 * MAX_N];
        kk[..k.len()].copy_from_slice(k);
        self.terms.push(TrigTerm { k: kk, a, b });
        self
    }

    /// `amp · sin(x_1)`-type single mode along one real axis.
    pub fn sine(n: usize, axis: usize, freq: i32, amp: f64) -> Self {
        let mut k = [0; 2 * MAX_N];
        k[axis] = freq;
        TrigPoly::constant(n, 0.0).with_term(&k[..2 * n], 0.0, amp)
    }

    /// Random polynomial with `RANDOM_TERMS` modes of degree `≤ bw` whose
    /// amplitudes sum to `amp` (so `sup |f| ≤ amp`).
    pub fn random(n: usize, seed: u64, amp: f64, bw: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::new();
        let mut total = 0.0;
        for _ in 0..RANDOM_TERMS {
            let k = random_wavevector(&mut rng, n, bw);
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            total += (a * a + b * b).sqrt();
            terms.push(TrigTerm { k, a, b });
        }
        let s = if total > 0.0 { amp / total } else { 0.0 };
        for t in terms.iter_mut() {
            t.a *= s;
            t.b *= s;
        }
        TrigPoly { axes: 2 * n, constant: 0.0, terms }
    }

    /// Largest `|k_a|` over all modes.
    pub fn degree(&self) -> usize {
        self.terms.iter().flat_map(|t| t.k.iter()).map(|k| k.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Upper bound `|c| + Σ sqrt(a² + b²)` for `sup |f|`.
    pub fn sup_bound(&self) -> f64 {
        self.constant.abs() + self.terms.iter().map(|t| (t.a * t.a + t.b * t.b).sqrt()).sum::<f64>()
    }

    /// Lower bound `c - Σ sqrt(a² + b²)` for `inf f`.
    pub fn inf_bound(&self) -> f64 {
        self.constant - self.terms.iter().map(|t| (t.a * t.a + t.b * t.b).sqrt()).sum::<f64>()
    }

    fn phase(&self, t: &TrigTerm, x: &[f64]) -> f64 {
        (0..self.axes).map(|i| t.k[i] as f64 * x[i]).sum()
    }

    /// Value at a point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().fold(self.constant, |s, t| {
            let (sn, cs) = self.phase(t, x).sin_cos();
            s + t.a * cs + t.b * sn
        })
    }

    /// Real gradient `∂f/∂x_a` in axis order.
    pub fn gradient(&self, x: &[f64]) -> [f64; 2 * MAX_N] {
        let mut g = [0.0; 2 * MAX_N];
        for t in &self.terms {
            let (sn, cs) = self.phase(t, x).sin_cos();
            let w = -t.a * sn + t.b * cs;
            for (i, gi) in g.iter_mut().enumerate().take(self.axes) {
                *gi += w * t.k[i] as f64;
            }
        }
        g
    }

    /// Node-wise samples.
    pub fn sample(&self, geom: TorusGeometry) -> Vec<f64> {
        (0..geom.nodes()).map(|k| self.eval(&geom.coords(k)[..geom.axes()])).collect()
    }

    /// Analytic `∂f` and `∂̄f` as `(1, 0)`- and `(0, 1)`-fields.
    pub fn differential(&self, geom: TorusGeometry) -> (FormField, FormField) {
        let n = geom.n();
        let grad: Vec<[f64; 2 * MAX_N]> = (0..geom.nodes()).map(|k| self.gradient(&geom.coords(k))).collect();
        let d10 = FormField::from_fn(geom, 1, 0, |k, _| {
            let mut f = PointForm::zero(n, 1, 0);
            for j in 0..n {
                f.coeffs_mut()[j] = C64::new(grad[k][j], -grad[k][n + j]) * 0.5;
            }
            f
        });
        let d01 = FormField::from_fn(geom, 0, 1, |k, _| {
            let mut f = PointForm::zero(n, 0, 1);
            for j in 0..n {
                f.coeffs_mut()[j] = C64::new(grad[k][j], grad[k][n + j]) * 0.5;
            }
            f
        });
        (d10, d01)
    }
}

fn random_wavevector(rng: &mut ChaCha8Rng, n: usize, bw: usize) -> [i32; 2 * MAX_N] {
    let b = bw as i32;
    loop {
        let mut k = [0; 2 * MAX_N];
        for ki in k.iter_mut().take(2 * n) {
            *ki = rng.gen_range(-b..=b);
        }
        if k.iter().any(|&x| x != 0) || bw == 0 {
            return k;
        }
    }
}

fn check_band(geom: TorusGeometry, bw: usize) -> Result<()> {
    if bw > geom.band_limit() {
        return Err(Error::Bandwidth { bandwidth: bw, limit: geom.band_limit() });
    }
    Ok(())
}

fn check_amp(amp: f64) -> Result<()> {
    if !(amp >= 0.0) || !amp.is_finite() {
        return Err(Error::Parameter("amplitude must be finite and non-negative"));
    }
    Ok(())
}

/// Sum of Hermitian modes `M e^{ik·x} + M^† e^{-ik·x}` with `Σ 2‖M‖_F = amp`.
struct HermitianModes {
    n: usize,
    modes: Vec<([i32; 2 * MAX_N], SmallMat)>,
}

impl HermitianModes {
    fn random(n: usize, seed: u64, amp: f64, bw: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        let mut total = 0.0;
        for _ in 0..RANDOM_TERMS {
            let k = random_wavevector(&mut rng, n, bw);
            let mut m = SmallMat::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                }
            }
            total += 2.0 * m.frobenius();
            modes.push((k, m));
        }
        let s = if total > 0.0 { amp / total } else { 0.0 };
        for (_, m) in modes.iter_mut() {
            *m = m.scale(C64::new(s, 0.0));
        }
        HermitianModes { n, modes }
    }

    fn wavevectors(n: usize, seed: u64, bw: usize) -> Vec<[i32; 2 * MAX_N]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ks = Vec::new();
        for _ in 0..RANDOM_TERMS {
            ks.push(random_wavevector(&mut rng, n, bw));
            for _ in 0..2 * n * n {
                rng.gen_range(-1.0..1.0);
            }
        }
        ks
    }

    fn with_wavevectors(n: usize, ks: Vec<[i32; 2 * MAX_N]>, seed: u64, amp: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        let mut total = 0.0;
        for k in ks {
            let mut m = SmallMat::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                }
            }
            total += 2.0 * m.frobenius();
            modes.push((k, m));
        }
        let s = if total > 0.0 { amp / total } else { 0.0 };
        for (_, m) in modes.iter_mut() {
            *m = m.scale(C64::new(s, 0.0));
        }
        HermitianModes { n, modes }
    }

    fn eval(&self, x: &[f64]) -> SmallMat {
        let n = self.n;
        let mut r = SmallMat::zeros(n);
        for (k, m) in &self.modes {
            let ph: f64 = (0..2 * n).map(|i| k[i] as f64 * x[i]).sum();
            let e = C64::new(ph.cos(), ph.sin());
            for i in 0..n {
                for j in 0..n {
                    let v = r.get(i, j) + m.get(i, j) * e + m.get(j, i).conj() * e.conj();
                    r.set(i, j, v);
                }
            }
        }
        r
    }
}

/// `h ≡ I`.
pub fn flat(geom: TorusGeometry) -> MetricField {
    MetricField::from_fn(geom, |_| SmallMat::identity(geom.n())).expect("identity is positive")
}

/// `e^f · I`.
pub fn conformal_flat(geom: TorusGeometry, f: &TrigPoly) -> Result<MetricField> {
    check_band(geom, f.degree())?;
    MetricField::from_fn(geom, |x| SmallMat::identity(geom.n()).scale(C64::new(f.eval(x).exp(), 0.0)))
}

/// `e^f ω` for an existing metric.
pub fn conformal(m: &MetricField, f: &TrigPoly) -> Result<MetricField> {
    check_band(m.geometry(), f.degree())?;
    let s: Vec<f64> = f.sample(m.geometry()).iter().map(|v| v.exp()).collect();
    m.scale_by(&s)
}

/// `λ ω` for a positive trigonometric polynomial `λ` (stays band-limited).
pub fn conformal_polynomial(m: &MetricField, lambda: &TrigPoly) -> Result<MetricField> {
    check_band(m.geometry(), lambda.degree())?;
    if !(lambda.inf_bound() > 0.0) {
        return Err(Error::NotPositive { margin: lambda.inf_bound() });
    }
    m.scale_by(&lambda.sample(m.geometry()))
}

/// `h = I + P(x)` with `P` a sum of `RANDOM_TERMS` random Hermitian Fourier
/// modes of degree `≤ bw`, scaled so that `‖P(x)‖ ≤ amp` everywhere (hence
/// the positivity margin is at least `1 - amp`).
pub fn random_fourier(geom: TorusGeometry, seed: u64, amp: f64, bw: usize) -> Result<MetricField> {
    check_band(geom, bw)?;
    check_amp(amp)?;
    let modes = HermitianModes::random(geom.n(), seed, amp, bw);
    MetricField::from_fn(geom, |x| SmallMat::identity(geom.n()).add_scaled(1.0, &modes.eval(x)))
}

fn modes_form(geom: TorusGeometry, modes: &HermitianModes) -> FormField {
    let n = geom.n();
    FormField::from_fn(geom, 1, 1, |_, x| {
        let g = modes.eval(x);
        let mut f = PointForm::zero(n, 1, 1);
        for (z, gz) in f.coeffs_mut().iter_mut().zip(g.as_slice()) {
            *z = gz * C64::new(0.0, 1.0);
        }
        f
    })
}

/// Random real `(1, 1)`-field `i Σ g_{jk̄} dz_j ∧ dz̄_k` with `g` built like the
/// perturbation of [`random_fourier`] (pointwise `‖g‖ ≤ amp`).
pub fn random_real_11(geom: TorusGeometry, seed: u64, amp: f64, bw: usize) -> Result<FormField> {
    check_band(geom, bw)?;
    check_amp(amp)?;
    let n = geom.n();
    let modes = HermitianModes::random(n, seed, amp, bw);
    Ok(modes_form(geom, &modes))
}

/// Random real `(1, 1)`-field on the Fourier support of
/// `random_fourier(geom, metric_seed, _, bw)` plus a constant mode, with
/// coefficients drawn from `seed` (pointwise `‖g‖ ≤ amp`).
pub fn random_direction(geom: TorusGeometry, metric_seed: u64, seed: u64, amp: f64, bw: usize) -> Result<FormField> {
    check_band(geom, bw)?;
    check_amp(amp)?;
    let n = geom.n();
    let mut ks = HermitianModes::wavevectors(n, metric_seed, bw);
    ks.push([0; 2 * MAX_N]);
    let modes = HermitianModes::with_wavevectors(n, ks, seed, amp);
    Ok(modes_form(geom, &modes))
}

/// `h = I + eps (e^{i y_n} E_{12} + e^{-i y_n} E_{21})`: a non-Kähler twist with
/// margin `1 - eps`.
pub fn product_twist(geom: TorusGeometry, eps: f64) -> Result<MetricField> {
    let n = geom.n();
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    if !(eps.abs() < 1.0) {
        return Err(Error::NotPositive { margin: 1.0 - eps.abs() });
    }
    MetricField::from_fn(geom, |x| {
        let mut h = SmallMat::identity(n);
        let e = C64::new(x[2 * n - 1].cos(), x[2 * n - 1].sin()) * eps;
        h.set(0, 1, e);
        h.set(1, 0, e.conj());
        h
    })
}

/// Kähler metric `h_{jk̄} = δ_{jk} + ∂_j ∂̄_k φ` for a random real potential `φ`
/// of degree `≤ bw`, scaled so that `‖∂∂̄φ‖ ≤ amp` pointwise.
pub fn kahler_potential(geom: TorusGeometry, seed: u64, amp: f64, bw: usize) -> Result<MetricField> {
    check_band(geom, bw)?;
    check_amp(amp)?;
    let n = geom.n();
    let phi = TrigPoly::random(n, seed, 1.0, bw);
    // a cos θ + b sin θ = Re(c e^{iθ}) with c = a - i b; ∂_j ∂̄_k e^{iθ} = κ_j κ̄'_k e^{iθ}
    // where κ_j = (i kx_j + ky_j) / 2 and κ'_k = (i kx_k - ky_k) / 2.
    let hess = |t: &TrigTerm| -> SmallMat {
        let mut m = SmallMat::zeros(n);
        for j in 0..n {
            let kj = C64::new(t.k[n + j] as f64, t.k[j] as f64) * 0.5;
            for k in 0..n {
                let kk = C64::new(-(t.k[n + k] as f64), t.k[k] as f64) * 0.5;
                m.set(j, k, kj * kk);
            }
        }
        m
    };
    let mut bound = 0.0;
    for t in &phi.terms {
        bound += (t.a * t.a + t.b * t.b).sqrt() * hess(t).frobenius();
    }
    let s = if bound > 0.0 { amp / bound } else { 0.0 };
    MetricField::from_fn(geom, |x| {
        let mut h = SmallMat::identity(n);
        for t in &phi.terms {
            let th: f64 = (0..2 * n).map(|i| t.k[i] as f64 * x[i]).sum();
            // Re(c e^{iθ}) differentiated termwise: (c e^{iθ} + c̄ e^{-iθ}) / 2
            let c = C64::new(t.a, -t.b) * C64::new(th.cos(), th.sin()) * 0.5;
            let m = hess(t);
            for j in 0..n {
                for k in 0..n {
                    // ∂_j ∂̄_k e^{-iθ} = conj(∂_k ∂̄_j e^{iθ})
                    let v = h.get(j, k) + (m.get(j, k) * c + m.get(k, j).conj() * c.conj()) * s;
                    h.set(j, k, v);
                }
            }
        }
        h
    })
}
