#![allow(dead_code)]

use lck_core::exterior::{binom, subset, HermitianMatrix, PointForm};
use lck_core::linalg::SmallMat;
use lck_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_c(r: &mut ChaCha8Rng) -> C64 {
    c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

pub fn random_metric(r: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let mut b = SmallMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            b.set(i, j, random_c(r));
        }
    }
    let h = b.mul(&b.adjoint()).add_scaled(0.5, &SmallMat::identity(n));
    HermitianMatrix::new(h).unwrap()
}

pub fn random_form(r: &mut ChaCha8Rng, n: usize, p: usize, q: usize) -> PointForm {
    let mut f = PointForm::zero(n, p, q);
    for z in f.coeffs_mut() {
        *z = random_c(r);
    }
    f
}

/// Real (1,1)-form i Σ g_{jk} dz_j ∧ dz̄_k with g Hermitian.
pub fn random_real_11(r: &mut ChaCha8Rng, n: usize) -> PointForm {
    let mut f = PointForm::zero(n, 1, 1);
    for j in 0..n {
        for k in j..n {
            let g = if j == k { c(r.gen_range(-1.0..1.0), 0.0) } else { random_c(r) };
            f.coeffs_mut()[j * n + k] = g * c(0.0, 1.0);
            f.coeffs_mut()[k * n + j] = g.conj() * c(0.0, 1.0);
        }
    }
    f
}

pub fn close(a: C64, b: C64, scale: f64, tol: f64) -> bool {
    (a - b).norm() <= tol * scale.max(1.0)
}

pub fn form_diff(a: &PointForm, b: &PointForm) -> f64 {
    assert_eq!(a.bidegree(), b.bidegree());
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

// ---- permutation-expansion oracle for the wedge product ----
//
// Letters 0..n are dz_1..dz_n, letters n..2n are dz̄_1..dz̄_n; the monomial
// dz_I ∧ dz̄_J is the increasing letter word.

fn letters(n: usize, holo: u8, anti: u8) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).filter(|j| holo & (1 << j) != 0).collect();
    v.extend((0..n).filter(|j| anti & (1 << j) != 0).map(|j| j + n));
    v
}

fn sort_sign(mut w: Vec<usize>) -> (Vec<usize>, f64) {
    let mut s = 1.0;
    for i in 0..w.len() {
        for j in 0..w.len() - 1 - i {
            if w[j] > w[j + 1] {
                w.swap(j, j + 1);
                s = -s;
            }
        }
    }
    (w, s)
}

pub fn wedge_oracle(a: &PointForm, b: &PointForm) -> PointForm {
    let n = a.n();
    let (p, q) = (a.p() + b.p(), a.q() + b.q());
    let mut r = PointForm::zero(n, p, q);
    for (ia, ja, x) in a.terms() {
        for (ib, jb, y) in b.terms() {
            let mut w = letters(n, ia, ja);
            w.extend(letters(n, ib, jb));
            let (sorted, s) = sort_sign(w);
            if sorted.windows(2).any(|p| p[0] == p[1]) {
                continue;
            }
            let holo = sorted.iter().filter(|&&l| l < n).fold(0u8, |m, &l| m | (1 << l));
            let anti = sorted.iter().filter(|&&l| l >= n).fold(0u8, |m, &l| m | (1 << (l - n)));
            let k = r
                .terms()
                .position(|(i, j, _)| i == holo && j == anti)
                .expect("monomial present");
            r.coeffs_mut()[k] += x * y * s;
        }
    }
    r
}

// ---- Gram-matrix oracle for the pointwise inner product ----
//
// ⟨dz_j, dz_k⟩ = (h^{-1})_{kj} and ⟨dz̄_j, dz̄_k⟩ = (h^{-1})_{jk}; monomials pair
// through determinants of these blocks.

fn perm_det(m: &[Vec<C64>]) -> C64 {
    let k = m.len();
    if k == 0 {
        return c(1.0, 0.0);
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut total = c(0.0, 0.0);
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, at: usize, m: &[Vec<C64>], total: &mut C64) {
    let k = perm.len();
    if at == k {
        let (_, s) = sort_sign(perm.clone());
        let mut prod = c(s, 0.0);
        for (i, &j) in perm.iter().enumerate() {
            prod *= m[i][j];
        }
        *total += prod;
        return;
    }
    for i in at..k {
        perm.swap(at, i);
        permute(perm, at + 1, m, total);
        perm.swap(at, i);
    }
}

pub fn gram(h: &HermitianMatrix, p: usize, q: usize) -> Vec<Vec<C64>> {
    let n = h.n();
    let hi = lck_core::linalg::inverse(h.matrix()).unwrap();
    let (dp, dq) = (binom(n, p), binom(n, q));
    let idx = |mask: u8| -> Vec<usize> { (0..n).filter(|j| mask & (1 << j) != 0).collect() };
    let mut g = vec![vec![c(0.0, 0.0); dp * dq]; dp * dq];
    for u in 0..dp * dq {
        let (i1, j1) = (idx(subset(n, p, u / dq)), idx(subset(n, q, u % dq)));
        for v in 0..dp * dq {
            let (i2, j2) = (idx(subset(n, p, v / dq)), idx(subset(n, q, v % dq)));
            let mz: Vec<Vec<C64>> =
                i1.iter().map(|&a| i2.iter().map(|&b| hi.get(b, a)).collect()).collect();
            let mzb: Vec<Vec<C64>> =
                j1.iter().map(|&a| j2.iter().map(|&b| hi.get(a, b)).collect()).collect();
            g[u][v] = perm_det(&mz) * perm_det(&mzb);
        }
    }
    g
}

pub fn gram_inner(g: &[Vec<C64>], a: &PointForm, b: &PointForm) -> C64 {
    let mut s = c(0.0, 0.0);
    for (u, x) in a.coeffs().iter().enumerate() {
        for (v, y) in b.coeffs().iter().enumerate() {
            s += x * y.conj() * g[u][v];
        }
    }
    s
}
