//! Uniform centered sampling lattices, sampled complex fields, and quadrature.
//!
//! A grid covers `[-R, R)` per axis with `N` (even) points and spacing
//! `h = 2R/N`, so the origin is always a sample point (index `N/2`). Fields
//! store their samples row-major (axis 0 slowest) and carry the rectangle-rule
//! quadrature weight `h^n`.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

/// Uniform grid specification on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Ambient dimension `n`.
    pub dim: usize,
    /// Points per axis `N` (even).
    pub points: usize,
    /// Half-width `R`: the grid covers `[-R, R)` per axis.
    pub half_width: f64,
}

impl GridSpec {
    /// Plain constructor with validity checks.
    pub fn new(dim: usize, points: usize, half_width: f64) -> Result<Self> {
        if dim == 0 || dim > 4 {
            return Err(Error::Dimension(format!(
                "ambient dimension must be in 1..=4, got {dim}"
            )));
        }
        if points < 4 || points % 2 != 0 {
            return Err(Error::Grid(format!(
                "points per axis must be even and >= 4, got {points}"
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Parameter(format!(
                "half-width must be positive and finite, got {half_width}"
            )));
        }
        Ok(GridSpec {
            dim,
            points,
            half_width,
        })
    }

    /// Grid whose FFT frequency lattice coincides with the position lattice
    /// axis by axis (`pi/R = h`, i.e. `R = sqrt(pi N / 2)`). Full and partial
    /// Fourier transforms are endomorphisms of such grids; this is the natural
    /// habitat of the ambiguity transform and the metaplectic intertwiner.
    pub fn self_dual_axes(dim: usize, points: usize) -> Result<Self> {
        let r = (std::f64::consts::PI * points as f64 / 2.0).sqrt();
        Self::new(dim, points, r)
    }

    /// Grid on `R^{2d}` for which `zeta -> 2 J zeta` is an exact lattice map
    /// into the FFT dual lattice with full range (`4R^2 = pi N`, i.e.
    /// `R = sqrt(pi N)/2`). The symplectic Fourier transform is an
    /// endomorphism of such grids.
    pub fn symplectic_self_dual(dim: usize, points: usize) -> Result<Self> {
        if dim % 2 != 0 {
            return Err(Error::Dimension(format!(
                "symplectic grid needs even ambient dimension, got {dim}"
            )));
        }
        let r = (std::f64::consts::PI * points as f64).sqrt() / 2.0;
        Self::new(dim, points, r)
    }

    /// Grid on `R^{2d}` for which half-position shifts `u/2` land exactly on
    /// the FFT dual lattice (`R^2 = pi N`, i.e. `R = sqrt(pi N)`). The fast
    /// (shear) factorization of the twisted convolution is exact on such
    /// grids.
    pub fn landau(dim: usize, points: usize) -> Result<Self> {
        if dim % 2 != 0 {
            return Err(Error::Dimension(format!(
                "Landau grid needs even ambient dimension, got {dim}"
            )));
        }
        let r = (std::f64::consts::PI * points as f64).sqrt();
        Self::new(dim, points, r)
    }

    /// Lattice spacing `h = 2R/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Quadrature weight per sample, `h^n`.
    pub fn weight(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Coordinate of sample `i` along one axis: `x_i = (i - N/2) h`.
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - self.points as f64 / 2.0) * self.spacing()
    }

    /// FFT dual grid: same `N`, half-width `pi/h` (frequency spacing `pi/R`).
    pub fn dual(&self) -> GridSpec {
        GridSpec {
            dim: self.dim,
            points: self.points,
            half_width: std::f64::consts::PI / self.spacing(),
        }
    }

    /// Total number of samples `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    /// True when the grid has no samples (never, for valid grids).
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether the frequency lattice coincides with the position lattice
    /// per axis (up to floating-point roundoff).
    pub fn is_self_dual_axes(&self) -> bool {
        let dual = self.dual().half_width;
        (dual - self.half_width).abs() <= 1e-9 * self.half_width
    }

    /// Row-major strides (axis 0 slowest).
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1usize; self.dim];
        for ax in (0..self.dim.saturating_sub(1)).rev() {
            s[ax] = s[ax + 1] * self.points;
        }
        s
    }

    /// Flatten a multi-index.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dim);
        let mut f = 0usize;
        for &i in idx {
            f = f * self.points + i;
        }
        f
    }

    /// Unflatten to a multi-index.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dim];
        for ax in (0..self.dim).rev() {
            idx[ax] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    /// Checks that a caller-supplied band limit is below the Nyquist
    /// frequency `pi/h` of this grid.
    pub fn check_band_limit(&self, band_limit: f64) -> Result<()> {
        let nyquist = std::f64::consts::PI / self.spacing();
        if band_limit > nyquist {
            return Err(Error::BandLimit(format!(
                "band limit {band_limit:.3} exceeds grid Nyquist frequency {nyquist:.3}"
            )));
        }
        Ok(())
    }
}

/// Sampled complex field on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    /// The sampling lattice.
    pub grid: GridSpec,
    /// `N^n` samples, row-major (axis 0 slowest).
    pub values: Vec<C64>,
    /// Free-text label (carried through I/O).
    pub label: String,
}

impl Field {
    /// Zero field.
    pub fn zeros(grid: GridSpec) -> Field {
        Field {
            grid,
            values: vec![C64::new(0.0, 0.0); grid.len()],
            label: String::new(),
        }
    }

    /// Field from an explicit sample vector.
    pub fn from_values(grid: GridSpec, values: Vec<C64>, label: &str) -> Result<Field> {
        if values.len() != grid.len() {
            return Err(Error::Data(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Field {
            grid,
            values,
            label: label.to_string(),
        })
    }

    /// Field sampled from a pointwise function of the coordinates.
    pub fn from_fn(grid: GridSpec, label: &str, f: impl Fn(&[f64]) -> C64) -> Field {
        let n = grid.points;
        let mut values = Vec::with_capacity(grid.len());
        let mut idx = vec![0usize; grid.dim];
        let mut x = vec![0f64; grid.dim];
        for flat in 0..grid.len() {
            let mut rem = flat;
            for ax in (0..grid.dim).rev() {
                idx[ax] = rem % n;
                rem /= n;
            }
            for ax in 0..grid.dim {
                x[ax] = grid.coord(idx[ax]);
            }
            values.push(f(&x));
        }
        Field {
            grid,
            values,
            label: label.to_string(),
        }
    }

    /// Sample at a multi-index.
    pub fn at(&self, idx: &[usize]) -> C64 {
        self.values[self.grid.flat_index(idx)]
    }

    /// In-place scale.
    pub fn scale(&mut self, c: C64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    /// Returns `self * c` as a new field.
    pub fn scaled(&self, c: C64) -> Field {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// In-place `self += c * other`.
    pub fn axpy(&mut self, c: C64, other: &Field) {
        debug_assert_eq!(self.grid, other.grid);
        for (v, w) in self.values.iter_mut().zip(&other.values) {
            *v += c * w;
        }
    }

    /// Returns `self - other`.
    pub fn sub(&self, other: &Field) -> Field {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), other);
        out
    }

    /// Pointwise product `self * other`.
    pub fn pointwise_mul(&self, other: &Field) -> Field {
        debug_assert_eq!(self.grid, other.grid);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Field {
            grid: self.grid,
            values,
            label: String::new(),
        }
    }

    /// Quadrature inner product `<f,g> = sum f conj(g) h^n`.
    pub fn inner(&self, other: &Field) -> C64 {
        debug_assert_eq!(self.grid, other.grid);
        let mut acc = C64::new(0.0, 0.0);
        for (a, b) in self.values.iter().zip(&other.values) {
            acc += a * b.conj();
        }
        acc * self.grid.weight()
    }

    /// Quadrature `L^2` norm.
    pub fn l2_norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// Largest sample magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Rectangle-rule `L^p` norm (`p = inf` gives the max).
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        quadrature_lp_norm(self, p)
    }

    /// Relative `L^2` distance to another field.
    pub fn rel_l2_distance(&self, other: &Field) -> f64 {
        let denom = other.l2_norm();
        if denom == 0.0 {
            self.l2_norm()
        } else {
            self.sub(other).l2_norm() / denom
        }
    }

    /// Decay sanity check: every sample on the outermost grid shell must be
    /// below `tol * max|f|`. Used to tag fields as "schwartz-class".
    pub fn is_schwartz_class(&self, tol: f64) -> bool {
        let m = self.max_abs();
        if m == 0.0 {
            return true;
        }
        let n = self.grid.points;
        let mut idx = vec![0usize; self.grid.dim];
        for flat in 0..self.grid.len() {
            let mut rem = flat;
            let mut on_shell = false;
            for ax in (0..self.grid.dim).rev() {
                idx[ax] = rem % n;
                rem /= n;
                if idx[ax] == 0 || idx[ax] == n - 1 {
                    on_shell = true;
                }
            }
            if on_shell && self.values[flat].norm() >= tol * m {
                return false;
            }
        }
        true
    }

    /// Rejects non-finite samples.
    pub fn check_finite(&self) -> Result<()> {
        if self
            .values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::Data("field contains non-finite samples".into()));
        }
        Ok(())
    }
}

/// Rectangle-rule `L^p` norm of a field: `(sum |f|^p h^n)^{1/p}`, or
/// `max |f|` for `p = inf` (pass `f64::INFINITY`).
pub fn quadrature_lp_norm(f: &Field, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(f.max_abs());
    }
    if !(p >= 1.0) {
        return Err(Error::Parameter(format!("Lp exponent must be >= 1, got {p}")));
    }
    let w = f.grid.weight();
    let sum: f64 = f.values.iter().map(|v| v.norm().powf(p)).sum();
    Ok((sum * w).powf(1.0 / p))
}

/// The standard symplectic form on `R^{2d}`: `sigma(z,w) = Jz . w` with
/// `J = [[0, I], [-I, 0]]` in `d x d` blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    /// Half-dimension `d` (the form lives on `R^{2d}`).
    pub d: usize,
}

impl SymplecticForm {
    /// Form on `R^{2d}`.
    pub fn new(d: usize) -> SymplecticForm {
        SymplecticForm { d }
    }

    /// `J z` for `z = (x, y)`: returns `(y, -x)`.
    pub fn apply_j(&self, z: &[f64]) -> Vec<f64> {
        debug_assert_eq!(z.len(), 2 * self.d);
        let mut out = vec![0.0; 2 * self.d];
        for j in 0..self.d {
            out[j] = z[self.d + j];
            out[self.d + j] = -z[j];
        }
        out
    }

    /// `sigma(z, w) = Jz . w`.
    pub fn sigma(&self, z: &[f64], w: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), 2 * self.d);
        debug_assert_eq!(w.len(), 2 * self.d);
        let mut s = 0.0;
        for j in 0..self.d {
            s += z[self.d + j] * w[j] - z[j] * w[self.d + j];
        }
        s
    }

    /// Dense matrix of `J` (row-major `2d x 2d`), mostly for tests.
    pub fn j_matrix(&self) -> Vec<f64> {
        let n = 2 * self.d;
        let mut m = vec![0.0; n * n];
        for j in 0..self.d {
            m[j * n + self.d + j] = 1.0;
            m[(self.d + j) * n + j] = -1.0;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_basics() {
        let g = GridSpec::new(1, 8, 4.0).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.coord(4), 0.0);
        assert_eq!(g.coord(0), -4.0);
        assert_eq!(g.dual().half_width, std::f64::consts::PI);
        assert_eq!(g.len(), 8);
    }

    #[test]
    fn grid_rejects_odd_n() {
        assert!(GridSpec::new(1, 7, 4.0).is_err());
        assert!(GridSpec::new(0, 8, 4.0).is_err());
        assert!(GridSpec::new(1, 8, -1.0).is_err());
    }

    #[test]
    fn self_dual_grids() {
        let g = GridSpec::self_dual_axes(1, 64).unwrap();
        assert!(g.is_self_dual_axes());
        // symplectic grid: dual of the symplectic-Fourier output returns R.
        let s = GridSpec::symplectic_self_dual(2, 64).unwrap();
        let pi = std::f64::consts::PI;
        assert!((4.0 * s.half_width * s.half_width - pi * 64.0).abs() < 1e-9);
        assert!(GridSpec::symplectic_self_dual(1, 64).is_err());
    }

    #[test]
    fn row_major_indexing() {
        let g = GridSpec::new(2, 4, 2.0).unwrap();
        assert_eq!(g.flat_index(&[1, 2]), 6);
        assert_eq!(g.multi_index(6), vec![1, 2]);
        assert_eq!(g.strides(), vec![4, 1]);
    }

    #[test]
    fn quadrature_gaussian_l1() {
        // int e^{-x^2/2} dx = sqrt(2 pi)
        let g = GridSpec::new(1, 256, 12.0).unwrap();
        let f = Field::from_fn(g, "gauss", |x| C64::new((-x[0] * x[0] / 2.0).exp(), 0.0));
        let n1 = quadrature_lp_norm(&f, 1.0).unwrap();
        assert!((n1 - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
        assert!(quadrature_lp_norm(&f, 0.5).is_err());
        let ninf = quadrature_lp_norm(&f, f64::INFINITY).unwrap();
        assert!((ninf - 1.0).abs() < 1e-14);
    }

    #[test]
    fn symplectic_form_identities() {
        let s = SymplecticForm::new(2);
        let z = [1.0, 2.0, 3.0, 4.0];
        let w = [-1.0, 0.5, 2.0, -3.0];
        assert!((s.sigma(&z, &w) + s.sigma(&w, &z)).abs() < 1e-15);
        // J^2 = -I
        let jz = s.apply_j(&z);
        let jjz = s.apply_j(&jz);
        for k in 0..4 {
            assert!((jjz[k] + z[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn schwartz_shell_check() {
        let g = GridSpec::new(1, 64, 10.0).unwrap();
        let gauss = Field::from_fn(g, "g", |x| C64::new((-x[0] * x[0]).exp(), 0.0));
        assert!(gauss.is_schwartz_class(1e-10));
        let flat = Field::from_fn(g, "1", |_| C64::new(1.0, 0.0));
        assert!(!flat.is_schwartz_class(1e-10));
    }
}
