use alloc::vec;
use alloc::vec::Vec;

use super::{FormField, MixedField};
use crate::exterior::{binom, rank, subset};
use crate::{Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Holo,
    Anti,
}

struct Scatter {
    src: usize,
    j: usize,
    dst: usize,
    sign: f64,
}

fn scatter_table(n: usize, p: usize, q: usize, kind: Kind) -> Vec<Scatter> {
    let (dq, dq_out) = match kind {
        Kind::Holo => (binom(n, q), binom(n, q)),
        Kind::Anti => (binom(n, q), binom(n, q + 1)),
    };
    let mut t = Vec::new();
    for a in 0..binom(n, p) {
        let i = subset(n, p, a);
        for b in 0..dq {
            let jm = subset(n, q, b);
            for j in 0..n {
                let bit = 1u8 << j;
                match kind {
                    Kind::Holo if i & bit == 0 => {
                        // dz_j ∧ dz_I ∧ dz̄_J
                        let e = crate::exterior::merge_sign(bit, i);
                        t.push(Scatter { src: a * dq + b, j, dst: rank(n, i | bit) * dq_out + b, sign: e });
                    }
                    Kind::Anti if jm & bit == 0 => {
                        // dz̄_j ∧ dz_I ∧ dz̄_J = (-1)^p dz_I ∧ dz̄_j ∧ dz̄_J
                        let e = crate::exterior::merge_sign(bit, jm) * if p % 2 == 0 { 1.0 } else { -1.0 };
                        t.push(Scatter { src: a * dq + b, j, dst: a * dq_out + rank(n, jm | bit), sign: e });
                    }
                    _ => {}
                }
            }
        }
    }
    t
}

fn derivative(f: &FormField, kind: Kind) -> FormField {
    let geom = f.geometry();
    let (n, nn) = (geom.n(), geom.grid());
    let (p, q) = f.bidegree();
    let (po, qo) = match kind {
        Kind::Holo => (p + 1, q),
        Kind::Anti => (p, q + 1),
    };
    let mut out = FormField::zeros(geom, po, qo);
    if out.dim() == 0 || f.dim() == 0 {
        return out;
    }
    let table = scatter_table(n, p, q, kind);
    let kernel = geom.derivative_kernel();
    let dim = f.dim();
    let dim_out = out.dim();
    let data = f.data();
    let strides: Vec<usize> = (0..geom.axes()).map(|a| geom.stride(a)).collect();
    let mut dx = vec![C64::new(0.0, 0.0); dim];
    let mut dy = vec![C64::new(0.0, 0.0); dim];
    let mut dz = vec![vec![C64::new(0.0, 0.0); dim]; n];
    let half_i = match kind {
        Kind::Holo => C64::new(0.0, -0.5),
        Kind::Anti => C64::new(0.0, 0.5),
    };
    for node in 0..geom.nodes() {
        for j in 0..n {
            for (buf, axis) in [(&mut dx, j), (&mut dy, n + j)] {
                buf.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                let s = strides[axis];
                let i = (node / s) % nn;
                let base = node - i * s;
                for (d, &w) in kernel.iter().enumerate().skip(1) {
                    let m = (i + nn - d) % nn;
                    let src = &data[(base + m * s) * dim..(base + m * s + 1) * dim];
                    for (b, z) in buf.iter_mut().zip(src) {
                        *b += z * w;
                    }
                }
            }
            for c in 0..dim {
                dz[j][c] = dx[c] * 0.5 + dy[c] * half_i;
            }
        }
        let o = out.data_mut();
        let row = &mut o[node * dim_out..(node + 1) * dim_out];
        for e in &table {
            row[e.dst] += dz[e.j][e.src] * e.sign;
        }
    }
    out
}

/// `∂f`, using `∂/∂z_j = (∂/∂x_j - i ∂/∂y_j) / 2` on spectrally differentiated
/// coefficients.
pub fn partial(f: &FormField) -> FormField {
    derivative(f, Kind::Holo)
}

/// `∂̄f`, using `∂/∂z̄_j = (∂/∂x_j + i ∂/∂y_j) / 2`.
pub fn dbar(f: &FormField) -> FormField {
    derivative(f, Kind::Anti)
}

/// `df = ∂f + ∂̄f`.
pub fn d(f: &FormField) -> MixedField {
    MixedField::new(vec![partial(f), dbar(f)]).expect("parts share a grid")
}

/// `d` of a mixed-bidegree form.
pub fn d_mixed(f: &MixedField) -> Result<MixedField> {
    let mut parts = Vec::new();
    for g in f.parts() {
        parts.push(partial(g));
        parts.push(dbar(g));
    }
    MixedField::new(parts)
}

/// L² projection onto trigonometric polynomials with `|k_a| ≤ band` on every
/// axis (separable Dirichlet-kernel convolution).
pub fn low_pass(f: &FormField, band: usize) -> FormField {
    let geom = f.geometry();
    let nn = geom.grid();
    if 2 * band + 1 >= nn {
        return f.clone();
    }
    let h = 2.0 * core::f64::consts::PI / nn as f64;
    let kernel: Vec<f64> = (0..nn)
        .map(|d| {
            let mut s = 1.0;
            for k in 1..=band {
                s += 2.0 * (k as f64 * h * d as f64).cos();
            }
            s / nn as f64
        })
        .collect();
    let dim = f.dim();
    let mut cur = f.data().to_vec();
    let mut next = vec![C64::new(0.0, 0.0); cur.len()];
    for axis in 0..geom.axes() {
        let s = geom.stride(axis);
        for node in 0..geom.nodes() {
            let i = (node / s) % nn;
            let base = node - i * s;
            let row = &mut next[node * dim..(node + 1) * dim];
            row.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            for (d, &w) in kernel.iter().enumerate() {
                let m = (i + nn - d) % nn;
                let src = &cur[(base + m * s) * dim..(base + m * s + 1) * dim];
                for (b, z) in row.iter_mut().zip(src) {
                    *b += z * w;
                }
            }
        }
        core::mem::swap(&mut cur, &mut next);
    }
    let (p, q) = f.bidegree();
    FormField::from_data(geom, p, q, cur).expect("shape")
}
