use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result, MAX_N};
#[allow(unused_imports)]
use num_traits::Float;

/// Largest supported node count `N^{2n}`.
pub const MAX_NODES: usize = 1 << 24;

/// Uniform periodic grid on `C^n / (2πZ)^{2n}`.
///
/// Real axes are ordered `x_1, …, x_n, y_1, …, y_n` with `z_j = x_j + i y_j`;
/// node indices are row-major (axis 0 slowest) and node `(i_0, …)` sits at
/// coordinates `2π i_a / N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusGeometry {
    n: usize,
    grid: usize,
}

impl TorusGeometry {
    /// Grid with `grid` points per real axis.
    pub fn new(n: usize, grid: usize) -> Result<Self> {
        if !(1..=MAX_N).contains(&n) {
            return Err(Error::Dimension(n));
        }
        if grid < 4 || grid % 2 != 0 {
            return Err(Error::Grid(grid));
        }
        match grid.checked_pow(2 * n as u32) {
            Some(t) if t <= MAX_NODES => {}
            _ => return Err(Error::Grid(grid)),
        }
        Ok(TorusGeometry { n, grid })
    }

    /// Complex dimension.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Points per real axis.
    #[inline]
    pub fn grid(&self) -> usize {
        self.grid
    }

    /// Number of real axes, `2n`.
    #[inline]
    pub fn axes(&self) -> usize {
        2 * self.n
    }

    /// Total node count `N^{2n}`.
    #[inline]
    pub fn nodes(&self) -> usize {
        self.grid.pow(2 * self.n as u32)
    }

    /// Node-index stride of real axis `a`.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.grid.pow((2 * self.n - 1 - axis) as u32)
    }

    /// Grid digit of `node` along `axis`.
    #[inline]
    pub fn digit(&self, node: usize, axis: usize) -> usize {
        (node / self.stride(axis)) % self.grid
    }

    /// Real coordinates of a node, in axis order (first `2n` entries used).
    pub fn coords(&self, node: usize) -> [f64; 2 * MAX_N] {
        let mut x = [0.0; 2 * MAX_N];
        let h = 2.0 * PI / self.grid as f64;
        for (a, xa) in x.iter_mut().enumerate().take(self.axes()) {
            *xa = h * self.digit(node, a) as f64;
        }
        x
    }

    /// Quadrature weight of one node: `(2π / N)^{2n}`, so that the flat volume
    /// form `ω_0^n / n!` integrates to `(2π)^{2n}`.
    pub fn cell_weight(&self) -> f64 {
        (2.0 * PI / self.grid as f64).powi(2 * self.n as i32)
    }

    /// Total flat volume `(2π)^{2n}`.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(2 * self.n as i32)
    }

    /// Largest trigonometric degree admitted by the dealiasing rule, `N / 4`.
    pub fn band_limit(&self) -> usize {
        self.grid / 4
    }

    /// First-derivative Fourier multiplier as a circulant kernel: the
    /// derivative at digit `i` is `Σ_δ kernel[δ] · f(i - δ)`. The Nyquist mode
    /// is dropped, which keeps the matrix antisymmetric.
    pub fn derivative_kernel(&self) -> Vec<f64> {
        let n = self.grid;
        let h = 2.0 * PI / n as f64;
        (0..n)
            .map(|d| {
                let mut s = 0.0;
                for k in 1..n / 2 {
                    s += k as f64 * (k as f64 * h * d as f64).sin();
                }
                -2.0 * s / n as f64
            })
            .collect()
    }
}
