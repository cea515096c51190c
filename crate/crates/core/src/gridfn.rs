//! Periodic grid realization of functions on the two-dimensional phase
//! space, with an FFT-based Moyal product (twisted convolution in momentum
//! space) and quadrature helpers.
//!
//! The lattice has N points per axis on [−L, L), spacing h = 2L/N; all
//! integrals are Riemann sums, which are spectrally accurate for the
//! Schwartz-class (Gaussian) data this crate feeds them.

use crate::error::{Error, Result};
use crate::scalar::C64;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Square lattice descriptor: N points per axis on [−L, L).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub n_pts: usize,
    pub half_extent: f64,
}

impl Grid {
    pub fn new(n_pts: usize, half_extent: f64) -> Result<Self> {
        if n_pts == 0 || !n_pts.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size {n_pts} must be a power of two"
            )));
        }
        if half_extent <= 0.0 {
            return Err(Error::InvalidParameter("half extent must be positive".into()));
        }
        Ok(Grid { n_pts, half_extent })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.n_pts as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        -self.half_extent + i as f64 * self.spacing()
    }

    /// Signed momentum index: s for s < N/2, s−N otherwise.
    fn signed(&self, s: usize) -> i64 {
        if s < self.n_pts / 2 {
            s as i64
        } else {
            s as i64 - self.n_pts as i64
        }
    }

    /// Momentum node k_s = (π/L)·signed(s) of the dual lattice.
    pub fn momentum(&self, s: usize) -> f64 {
        std::f64::consts::PI / self.half_extent * self.signed(s) as f64
    }
}

/// Complex samples on the 2-dimensional lattice, row-major in (i₀, i₁).
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn2 {
    pub grid: Grid,
    pub data: Vec<C64>,
}

impl GridFn2 {
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> C64) -> Self {
        let n = grid.n_pts;
        let data = (0..n * n)
            .map(|idx| f(grid.node(idx / n), grid.node(idx % n)))
            .collect();
        GridFn2 { grid, data }
    }

    pub fn zero(grid: Grid) -> Self {
        GridFn2 {
            grid,
            data: vec![C64::new(0.0, 0.0); grid.n_pts * grid.n_pts],
        }
    }

    pub fn value(&self, i0: usize, i1: usize) -> C64 {
        self.data[i0 * self.grid.n_pts + i1]
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid);
        GridFn2 {
            grid: self.grid,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        GridFn2 {
            grid: self.grid,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul_pointwise(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid);
        GridFn2 {
            grid: self.grid,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        GridFn2 {
            grid: self.grid,
            data: self.data.iter().map(|a| a.conj()).collect(),
        }
    }

    /// Riemann-sum integral h²Σ f.
    pub fn integrate(&self) -> C64 {
        let h = self.grid.spacing();
        self.data.iter().sum::<C64>() * (h * h)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest |f| on the boundary ring relative to the global maximum;
    /// the decay guard for the periodic FFT product.
    pub fn boundary_tail(&self) -> f64 {
        let n = self.grid.n_pts;
        let mut tail: f64 = 0.0;
        for i in 0..n {
            for &j in &[0usize, n - 1] {
                tail = tail.max(self.value(i, j).norm()).max(self.value(j, i).norm());
            }
        }
        let peak = self.max_abs();
        if peak == 0.0 {
            0.0
        } else {
            tail / peak
        }
    }
}

fn fft2(data: &mut [C64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for row in data.chunks_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    // Transpose, transform rows again, transpose back.
    for i in 0..n {
        for j in 0..i {
            data.swap(i * n + j, j * n + i);
        }
    }
    for row in data.chunks_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    for i in 0..n {
        for j in 0..i {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Continuum-normalized Fourier transform on the lattice:
/// f̂(k_s) = h² Σ_x f(x) e^{−ik_s·x}, indexed by the (wrapped) dual lattice.
pub fn ft2_forward(f: &GridFn2) -> GridFn2 {
    let n = f.grid.n_pts;
    let h = f.grid.spacing();
    let mut data = f.data.clone();
    fft2(&mut data, n, false);
    let out = (0..n * n)
        .map(|idx| {
            let (s0, s1) = (idx / n, idx % n);
            let sign = if (s0 + s1) % 2 == 0 { 1.0 } else { -1.0 };
            data[idx] * (sign * h * h)
        })
        .collect();
    GridFn2 { grid: f.grid, data: out }
}

/// Inverse of [`ft2_forward`].
pub fn ft2_inverse(fhat: &GridFn2) -> GridFn2 {
    let n = fhat.grid.n_pts;
    let h = fhat.grid.spacing();
    let mut data: Vec<C64> = (0..n * n)
        .map(|idx| {
            let (s0, s1) = (idx / n, idx % n);
            let sign = if (s0 + s1) % 2 == 0 { 1.0 } else { -1.0 };
            fhat.data[idx] * (sign / (h * h * (n * n) as f64))
        })
        .collect();
    fft2(&mut data, n, true);
    GridFn2 { grid: fhat.grid, data }
}

/// Moyal product on the lattice: twisted convolution of the two spectra,
/// (f⋆g)^(q) = (Δk)²/(2π)² Σ_k f̂(k) ĝ(q−k) e^{−(iθ/2)ω(k,q)} with
/// ω(k,q) = k₀q₁ − k₁q₀ and periodic wrap of q−k.
pub fn moyal_grid(f: &GridFn2, g: &GridFn2, theta: f64) -> Result<GridFn2> {
    if f.grid != g.grid {
        return Err(Error::BackendMismatch("grids differ".into()));
    }
    let tail = f.boundary_tail().max(g.boundary_tail());
    if tail > 1e-8 {
        eprintln!("moyal_grid: boundary decay violated, tail mass {tail:.3e}");
    }
    let n = f.grid.n_pts;
    let fhat = ft2_forward(f);
    let ghat = ft2_forward(g);
    let dk = std::f64::consts::PI / f.grid.half_extent;
    let measure = dk * dk / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
    let grid = f.grid;

    let momenta: Vec<f64> = (0..n).map(|s| grid.momentum(s)).collect();
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    out.par_chunks_mut(n)
        .enumerate()
        .for_each(|(q0, row)| {
            let kq0 = momenta[q0];
            for (q1, slot) in row.iter_mut().enumerate() {
                let kq1 = momenta[q1];
                let mut acc = C64::new(0.0, 0.0);
                for s0 in 0..n {
                    let k0 = momenta[s0];
                    let d0 = (q0 + n - s0) % n;
                    let base = -(theta / 2.0) * k0 * kq1;
                    for s1 in 0..n {
                        let k1 = momenta[s1];
                        let d1 = (q1 + n - s1) % n;
                        let phase = base + (theta / 2.0) * k1 * kq0;
                        let tw = C64::new(0.0, phase).exp();
                        acc += fhat.data[s0 * n + s1] * ghat.data[d0 * n + d1] * tw;
                    }
                }
                *slot = acc * measure;
            }
        });
    Ok(ft2_inverse(&GridFn2 { grid, data: out }))
}

/// Unit-height centered Gaussian e^{−|x|²/(2s²)} as a grid function.
pub fn gaussian(grid: Grid, s: f64) -> GridFn2 {
    GridFn2::from_fn(grid, |x, y| C64::new((-(x * x + y * y) / (2.0 * s * s)).exp(), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn fourier_round_trip() {
        let grid = Grid::new(32, 6.0).unwrap();
        let f = gaussian(grid, 1.3);
        let back = ft2_inverse(&ft2_forward(&f));
        for (a, b) in f.data.iter().zip(&back.data) {
            assert!(close(*a, *b, 1e-12));
        }
    }

    #[test]
    fn fourier_matches_continuum_gaussian() {
        // FT of e^{−|x|²/2} is 2π·e^{−|k|²/2} with this normalization.
        let grid = Grid::new(64, 10.0).unwrap();
        let f = gaussian(grid, 1.0);
        let fhat = ft2_forward(&f);
        for &(s0, s1) in &[(0usize, 0usize), (1, 2), (3, 1)] {
            let (k0, k1) = (grid.momentum(s0), grid.momentum(s1));
            let expect = 2.0 * std::f64::consts::PI * (-(k0 * k0 + k1 * k1) / 2.0).exp();
            assert!(
                close(fhat.value(s0, s1), C64::new(expect, 0.0), 1e-10),
                "mismatch at ({s0},{s1})"
            );
        }
    }

    #[test]
    fn moyal_grid_matches_quadrature_oracle() {
        // e^{−a|y|²} ⋆ e^{−b|z|²}: the z-integral of the integral formula is
        // Gaussian-exact, leaving a 2-dim quadrature oracle.
        let theta = 0.7f64;
        let (a, b) = (0.9f64, 1.4f64);
        let grid = Grid::new(64, 8.0).unwrap();
        let f = GridFn2::from_fn(grid, |x, y| C64::new((-a * (x * x + y * y)).exp(), 0.0));
        let g = GridFn2::from_fn(grid, |x, y| C64::new((-b * (x * x + y * y)).exp(), 0.0));
        let prod = moyal_grid(&f, &g, theta).unwrap();

        let oracle = |x0: f64, x1: f64| -> C64 {
            let pi = std::f64::consts::PI;
            let norm = 1.0 / (pi * theta).powi(2) * pi / b;
            let m = 400usize;
            let (lo, hi) = (-8.0f64, 8.0f64);
            let hq = (hi - lo) / m as f64;
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..m {
                let y0 = lo + (i as f64 + 0.5) * hq;
                for j in 0..m {
                    let y1 = lo + (j as f64 + 0.5) * hq;
                    let d0 = y0 - x0;
                    let d1 = y1 - x1;
                    let amp = (-a * (y0 * y0 + y1 * y1) - (d0 * d0 + d1 * d1) / (b * theta * theta)).exp();
                    let phase = 2.0 / theta * (x0 * y1 - x1 * y0);
                    acc += C64::new(0.0, phase).exp() * amp;
                }
            }
            acc * (norm * hq * hq)
        };

        let n = grid.n_pts;
        for &(i0, i1) in &[(n / 2, n / 2), (n / 2 + 2, n / 2 - 3)] {
            let x = (grid.node(i0), grid.node(i1));
            let want = oracle(x.0, x.1);
            let got = prod.value(i0, i1);
            assert!(
                (got - want).norm() <= 1e-6 * want.norm().max(1e-3),
                "at {x:?}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn tracial_identity_on_grid() {
        let theta = 1.0;
        let grid = Grid::new(64, 8.0).unwrap();
        let f = GridFn2::from_fn(grid, |x, y| C64::new((-0.5 * (x * x + y * y)).exp() * (1.0 + x), 0.0));
        let g = GridFn2::from_fn(grid, |x, y| C64::new((-0.6 * (x * x + y * y)).exp() * (y - 0.3), 0.0));
        let lhs = moyal_grid(&f, &g, theta).unwrap().integrate();
        let rhs = f.mul_pointwise(&g).integrate();
        assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm());
    }
}
