//! The twisted convolution algebra, the Weyl product, and Weyl quantization.
//!
//! Two normalizations of the twisted convolution coexist in the literature
//! and both are needed here, so the flavor is explicit:
//!
//! * [`TwistFlavor::Spectral`]:
//!   `a x b(z) = 4^d (2pi)^{-d/2} int e^{(i/2) sigma(z,w)} a(z-w) b(w) dw`.
//!   This is the convention under which the L^2-normalized special Hermite
//!   functions satisfy `Phi_{a,b} x Phi_{m,n} = 4^d delta_{b,m} Phi_{a,n}`
//!   and the twisted Laplacian heat semigroup reads
//!   `e^{-tL} f = (2pi)^{d/2} (f x p_t)`.
//! * [`TwistFlavor::Weyl`]:
//!   `a x b(z) = pi^{-d} int e^{2 i sigma(z,w)} a(z-w) b(w) dw`,
//!   the convention intertwined with the Weyl product by the symplectic
//!   Fourier transform: `a # b = F_sigma(a) x b` and
//!   `F_sigma(a # b) = a x b^v`.
//!
//! Either flavor is evaluated in `O(N^{3d})` by passing to the partial
//! Fourier transform in the second block of axes, where the symplectic phase
//! becomes an exact lattice shift: with `c` the phase constant and hats
//! denoting that partial transform,
//!
//! ```text
//! F_2(a x b)(x, eta) = (2pi)^{d/2} int du  a^(x-u, eta - c u) b^(u, eta + c x - c u).
//! ```
//!
//! The shift `c u` is an integer number of dual-lattice steps whenever
//! `c * h / dxi` is an integer, which holds for the spectral flavor on
//! Landau grids (`R = sqrt(pi N)`) and for the Weyl flavor on Landau,
//! axis-self-dual and symplectic-self-dual grids. The `O(N^{4d})`
//! quadrature of the defining integral is retained as a small-grid oracle
//! ([`twisted_convolution_reference`]).
//!
//! Weyl quantization of sampled symbols goes through the integral kernel
//! `K_a(x,y) = (2pi)^{-d/2} (F_2^{-1} a)((x+y)/2, x-y)`, materialized by
//! exact index arithmetic on symplectic-self-dual grids (where the midpoint
//! and difference lattices are reachable by band-limited zero-padding).
//! Unbounded symbols cannot be represented as decaying samples, so the
//! identity, the harmonic-oscillator symbol, the twisted-Laplacian symbol
//! and the heat-flow Weyl symbol are registered closed forms dispatched to
//! analytic routes instead ([`WeylSymbol`]).

use crate::error::{Error, Result};
use crate::fourier::{symplectic_fourier, transform_axis_dims};
use crate::grid::{Field, GridSpec};
use crate::C64;
use rayon::prelude::*;

const SQRT_2PI: f64 = 2.5066282746310002;

/// Normalization of the twisted convolution; see the module docs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwistFlavor {
    /// `4^d (2pi)^{-d/2}`, phase `e^{(i/2) sigma}`.
    Spectral,
    /// `pi^{-d}`, phase `e^{2 i sigma}`.
    Weyl,
}

impl TwistFlavor {
    /// The constant `c` in the phase `e^{i c sigma(z,w)}`.
    pub fn phase_constant(self) -> f64 {
        match self {
            TwistFlavor::Spectral => 0.5,
            TwistFlavor::Weyl => 2.0,
        }
    }

    /// The constant multiplying the defining integral.
    pub fn prefactor(self, d: usize) -> f64 {
        match self {
            TwistFlavor::Spectral => 4f64.powi(d as i32) * (2.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0),
            TwistFlavor::Weyl => std::f64::consts::PI.powi(-(d as i32)),
        }
    }
}

fn check_pair(a: &Field, b: &Field) -> Result<usize> {
    a.check_finite()?;
    b.check_finite()?;
    if a.grid.dim != b.grid.dim
        || a.grid.points != b.grid.points
        || (a.grid.half_width - b.grid.half_width).abs() > 1e-9 * a.grid.half_width
    {
        return Err(Error::Grid(format!(
            "twisted convolution needs both factors on one grid; got \
             (dim {}, N {}, R {:.6}) vs (dim {}, N {}, R {:.6})",
            a.grid.dim, a.grid.points, a.grid.half_width, b.grid.dim, b.grid.points, b.grid.half_width
        )));
    }
    if a.grid.dim % 2 != 0 {
        return Err(Error::Dimension(
            "twisted convolution lives on phase space R^{2d}; dimension must be even".into(),
        ));
    }
    Ok(a.grid.dim / 2)
}

/// Integer number of dual-lattice steps corresponding to one position step
/// scaled by the phase constant `c`, or a grid error when that ratio is not
/// an integer (the symplectic phase then leaves the lattice).
fn shift_steps(grid: &GridSpec, c: f64) -> Result<i64> {
    let dxi = std::f64::consts::PI / grid.half_width;
    let ratio = c * grid.spacing() / dxi;
    let s = ratio.round();
    if (ratio - s).abs() > 1e-9 {
        return Err(Error::Grid(format!(
            "phase constant {c} maps position steps to {ratio:.6} dual steps on this grid; \
             an integer is required (use a Landau grid for the spectral flavor, or a \
             symplectic-self-dual grid for the Weyl flavor)"
        )));
    }
    Ok(s as i64)
}

fn block_digits(block: usize, d: usize, strides: &[usize]) -> Vec<i64> {
    let mut digits = vec![0i64; block * d];
    for flat in 0..block {
        let mut rem = flat;
        for ax in 0..d {
            digits[flat * d + ax] = (rem / strides[ax]) as i64;
            rem %= strides[ax];
        }
    }
    digits
}

/// Twisted convolution in the spectral-flavor normalization (the one under
/// which the special Hermite algebra and the heat semigroup hold); requires
/// a Landau grid.
pub fn twisted_convolution(a: &Field, b: &Field) -> Result<Field> {
    twisted_convolution_with(a, b, TwistFlavor::Spectral)
}

/// Twisted convolution in the Weyl-flavor normalization
/// `pi^{-d} int e^{2 i sigma(z,w)} a(z-w) b(w) dw`.
pub fn weyl_twisted_convolution(a: &Field, b: &Field) -> Result<Field> {
    twisted_convolution_with(a, b, TwistFlavor::Weyl)
}

/// Twisted convolution with an explicit flavor, via the shear factorization
/// in the partial Fourier domain (see the module docs).
pub fn twisted_convolution_with(a: &Field, b: &Field, flavor: TwistFlavor) -> Result<Field> {
    let d = check_pair(a, b)?;
    let grid = a.grid;
    let n = grid.points;
    let h = grid.spacing();
    let s = shift_steps(&grid, flavor.phase_constant())?;
    let dims = vec![n; grid.dim];
    let block: usize = n.pow(d as u32);
    let half = (n / 2) as i64;
    let n_i = n as i64;

    // Partial forward transform in the second block of axes.
    let scale_f = h / SQRT_2PI;
    let mut ah = a.values.clone();
    let mut bh = b.values.clone();
    for ax in d..grid.dim {
        transform_axis_dims(&mut ah, &dims, ax, scale_f);
        transform_axis_dims(&mut bh, &dims, ax, scale_f);
    }

    let strides: Vec<usize> = (0..d).map(|ax| n.pow((d - 1 - ax) as u32)).collect();
    let digits = block_digits(block, d, &strides);

    let mut out = vec![C64::new(0.0, 0.0); block * block];
    out.par_chunks_mut(block).enumerate().for_each(|(x_flat, row)| {
        let xd = &digits[x_flat * d..x_flat * d + d];
        let mut sa = vec![0i64; d];
        let mut sb = vec![0i64; d];
        for u_flat in 0..block {
            let ud = &digits[u_flat * d..u_flat * d + d];
            // First-block index of a^ at the coordinate x - u (zero outside).
            let mut a_first = 0usize;
            let mut in_range = true;
            for ax in 0..d {
                let fd = xd[ax] - ud[ax] + half;
                if fd < 0 || fd >= n_i {
                    in_range = false;
                    break;
                }
                a_first += fd as usize * strides[ax];
            }
            if !in_range {
                continue;
            }
            for ax in 0..d {
                sa[ax] = s * (ud[ax] - half);
                sb[ax] = s * (xd[ax] - half) - sa[ax];
            }
            let a_base = a_first * block;
            let b_base = u_flat * block;
            for h_flat in 0..block {
                let hd = &digits[h_flat * d..h_flat * d + d];
                let mut ia = 0usize;
                let mut ib = 0usize;
                for ax in 0..d {
                    ia += (hd[ax] - sa[ax]).rem_euclid(n_i) as usize * strides[ax];
                    ib += (hd[ax] + sb[ax]).rem_euclid(n_i) as usize * strides[ax];
                }
                row[h_flat] += ah[a_base + ia] * bh[b_base + ib];
            }
        }
    });

    // Inverse partial transform in the second block, via conj . F . conj.
    let dxi = std::f64::consts::PI / grid.half_width;
    for v in &mut out {
        *v = v.conj();
    }
    for ax in d..grid.dim {
        transform_axis_dims(&mut out, &dims, ax, dxi / SQRT_2PI);
    }
    let amp = flavor.prefactor(d)
        * (2.0 * std::f64::consts::PI).powf(d as f64 / 2.0)
        * h.powi(d as i32);
    for v in &mut out {
        *v = v.conj() * amp;
    }
    Field::from_values(grid, out, &format!("({})x({})", a.label, b.label))
}

/// Direct quadrature of the defining twisted-convolution integral, cyclic
/// in the second block of `a`'s shifted argument so that it matches the
/// partial-Fourier fast path to rounding. `O(N^{4d})`; small grids only.
pub fn twisted_convolution_reference(a: &Field, b: &Field, flavor: TwistFlavor) -> Result<Field> {
    let d = check_pair(a, b)?;
    let grid = a.grid;
    let n = grid.points;
    let n_i = n as i64;
    let half = (n / 2) as i64;
    let c = flavor.phase_constant();
    let block: usize = n.pow(d as u32);
    let strides: Vec<usize> = (0..d).map(|ax| n.pow((d - 1 - ax) as u32)).collect();
    let digits = block_digits(block, d, &strides);
    let weight = flavor.prefactor(d) * grid.weight();

    let mut out = vec![C64::new(0.0, 0.0); block * block];
    out.par_chunks_mut(block).enumerate().for_each(|(x_flat, row)| {
        let xd = &digits[x_flat * d..x_flat * d + d];
        for (y_flat, slot) in row.iter_mut().enumerate() {
            let yd = &digits[y_flat * d..y_flat * d + d];
            let mut acc = C64::new(0.0, 0.0);
            for u_flat in 0..block {
                let ud = &digits[u_flat * d..u_flat * d + d];
                // First block of a at coordinate x - u; zero outside the box.
                let mut a_first = 0usize;
                let mut in_range = true;
                let mut phase_u = 0.0;
                for ax in 0..d {
                    let fd = xd[ax] - ud[ax] + half;
                    if fd < 0 || fd >= n_i {
                        in_range = false;
                        break;
                    }
                    a_first += fd as usize * strides[ax];
                    // sigma(z, w) = y . u - x . v ; accumulate the y . u part.
                    phase_u += grid.coord(yd[ax] as usize) * grid.coord(ud[ax] as usize);
                }
                if !in_range {
                    continue;
                }
                for v_flat in 0..block {
                    let vd = &digits[v_flat * d..v_flat * d + d];
                    let mut a_second = 0usize;
                    let mut phase = phase_u;
                    for ax in 0..d {
                        a_second +=
                            (yd[ax] - vd[ax] + half).rem_euclid(n_i) as usize * strides[ax];
                        phase -= grid.coord(xd[ax] as usize) * grid.coord(vd[ax] as usize);
                    }
                    acc += C64::from_polar(1.0, c * phase)
                        * a.values[a_first * block + a_second]
                        * b.values[u_flat * block + v_flat];
                }
            }
            *slot = acc * weight;
        }
    });
    Field::from_values(grid, out, &format!("ref ({})x({})", a.label, b.label))
}

fn require_symplectic_self_dual(grid: &GridSpec, what: &str) -> Result<()> {
    let want = (std::f64::consts::PI * grid.points as f64).sqrt() / 2.0;
    if (grid.half_width - want).abs() > 1e-9 * want {
        return Err(Error::Grid(format!(
            "{what} needs a symplectic-self-dual grid (R = sqrt(pi N)/2 = {want:.6}); \
             got R = {:.6}",
            grid.half_width
        )));
    }
    Ok(())
}

/// Centered zero-extension of one axis from `dims[axis]` to `new_n` points
/// (same spacing, wider box). Updates `dims` in place.
fn zero_pad_axis(values: &[C64], dims: &mut [usize], axis: usize, new_n: usize) -> Vec<C64> {
    let old_n = dims[axis];
    let offset = (new_n - old_n) / 2;
    let inner: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let mut out = vec![C64::new(0.0, 0.0); outer * new_n * inner];
    for o in 0..outer {
        for j in 0..old_n {
            let src = (o * old_n + j) * inner;
            let dst = (o * new_n + j + offset) * inner;
            out[dst..dst + inner].copy_from_slice(&values[src..src + inner]);
        }
    }
    dims[axis] = new_n;
    out
}

/// Integral kernel of the Weyl operator of a sampled symbol, as a dense
/// `N^d x N^d` matrix over the position lattice (row = output point).
/// Requires a symplectic-self-dual symbol grid.
fn kernel_from_symbol(a: &Field) -> Result<Vec<C64>> {
    a.check_finite()?;
    if a.grid.dim % 2 != 0 {
        return Err(Error::Dimension("a Weyl symbol lives on R^{2d}".into()));
    }
    require_symplectic_self_dual(&a.grid, "Weyl quantization of a sampled symbol")?;
    let d = a.grid.dim / 2;
    let n = a.grid.points;
    let h = a.grid.spacing();
    let mut dims = vec![n; a.grid.dim];
    let mut buf = a.values.clone();

    // Forward transform of the position block, then centered zero-padding of
    // every axis: the position block in its dual domain (band-limited
    // refinement of the midpoint lattice to spacing h/2), the frequency
    // block in its own domain (so the difference lattice comes out at
    // spacing h over [-2R, 2R)).
    for ax in 0..d {
        transform_axis_dims(&mut buf, &dims, ax, h / SQRT_2PI);
    }
    for ax in 0..2 * d {
        buf = zero_pad_axis(&buf, &mut dims, ax, 2 * n);
    }
    // Inverse transforms: position block back from its (padded) dual at
    // spacing 2h, frequency block to the difference variable.
    for v in &mut buf {
        *v = v.conj();
    }
    for ax in 0..d {
        transform_axis_dims(&mut buf, &dims, ax, 2.0 * h / SQRT_2PI);
    }
    for ax in d..2 * d {
        transform_axis_dims(&mut buf, &dims, ax, h / SQRT_2PI);
    }
    for v in &mut buf {
        *v = v.conj();
    }

    // K(x, y) = (2pi)^{-d/2} A((x+y)/2, x-y): midpoint index ix+iy on the
    // 2N-point h/2 lattice, difference index ix-iy+N on the 2N-point h
    // lattice; both always in range.
    let block: usize = n.pow(d as u32);
    let strides: Vec<usize> = (0..d).map(|ax| n.pow((d - 1 - ax) as u32)).collect();
    let big_strides: Vec<usize> = (0..2 * d).map(|ax| (2 * n).pow((2 * d - 1 - ax) as u32)).collect();
    let digits = block_digits(block, d, &strides);
    let amp = (2.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0);

    let mut kernel = vec![C64::new(0.0, 0.0); block * block];
    kernel.par_chunks_mut(block).enumerate().for_each(|(x_flat, row)| {
        let xd = &digits[x_flat * d..x_flat * d + d];
        for (y_flat, slot) in row.iter_mut().enumerate() {
            let yd = &digits[y_flat * d..y_flat * d + d];
            let mut idx = 0usize;
            for ax in 0..d {
                idx += (xd[ax] + yd[ax]) as usize * big_strides[ax];
                idx += (xd[ax] - yd[ax] + n as i64) as usize * big_strides[d + ax];
            }
            *slot = buf[idx] * amp;
        }
    });
    Ok(kernel)
}

/// Recovers a symbol on the original grid from a kernel matrix over the
/// position lattice: `a(q, xi) = F_tau[(2pi)^{d/2} K(q + tau/2, q - tau/2)]`
/// with the difference variable on the dual of the frequency lattice.
fn symbol_from_kernel(kernel: &[C64], grid: GridSpec, label: &str) -> Result<Field> {
    let d = grid.dim / 2;
    let n = grid.points;
    let n_i = n as i64;
    let half = (n / 2) as i64;
    let h = grid.spacing();
    let block: usize = n.pow(d as u32);
    let strides: Vec<usize> = (0..d).map(|ax| n.pow((d - 1 - ax) as u32)).collect();
    let digits = block_digits(block, d, &strides);
    let amp = (2.0 * std::f64::consts::PI).powf(d as f64 / 2.0);

    let mut out = vec![C64::new(0.0, 0.0); block * block];
    out.par_chunks_mut(block).enumerate().for_each(|(q_flat, row)| {
        let qd = &digits[q_flat * d..q_flat * d + d];
        for (t_flat, slot) in row.iter_mut().enumerate() {
            let td = &digits[t_flat * d..t_flat * d + d];
            // tau lives on an n-point lattice of spacing 2h, so tau/2 moves
            // whole position steps: x = q + tau/2, y = q - tau/2.
            let mut ix = 0usize;
            let mut iy = 0usize;
            let mut in_range = true;
            for ax in 0..d {
                let jx = qd[ax] + td[ax] - half;
                let jy = qd[ax] - td[ax] + half;
                if jx < 0 || jx >= n_i || jy < 0 || jy >= n_i {
                    in_range = false;
                    break;
                }
                ix += jx as usize * strides[ax];
                iy += jy as usize * strides[ax];
            }
            if in_range {
                *slot = kernel[ix * block + iy] * amp;
            }
        }
    });

    // Forward transform tau -> xi; the tau spacing 2h makes the xi lattice
    // coincide with the original frequency block.
    let dims = vec![n; grid.dim];
    for ax in d..grid.dim {
        transform_axis_dims(&mut out, &dims, ax, 2.0 * h / SQRT_2PI);
    }
    Field::from_values(grid, out, label)
}

/// Weyl product `a # b = F_sigma(a) x b` (symplectic Fourier transform of
/// the first factor, then Weyl-flavor twisted convolution). Requires a
/// symplectic-self-dual grid, where `F_sigma` maps the grid to itself.
pub fn weyl_product(a: &Field, b: &Field) -> Result<Field> {
    check_pair(a, b)?;
    require_symplectic_self_dual(&a.grid, "the Weyl product")?;
    let mut fsa = symplectic_fourier(a)?;
    // F_sigma reproduces a symplectic-self-dual grid up to rounding.
    fsa.grid = a.grid;
    let mut out = twisted_convolution_with(&fsa, b, TwistFlavor::Weyl)?;
    out.label = format!("({})#({})", a.label, b.label);
    Ok(out)
}

/// Weyl product through operator-kernel composition,
/// `K_{a#b}(x,y) = int K_a(x,s) K_b(s,y) ds`, used as an independent route
/// against [`weyl_product`].
pub fn weyl_product_kernel(a: &Field, b: &Field) -> Result<Field> {
    check_pair(a, b)?;
    let ka = kernel_from_symbol(a)?;
    let kb = kernel_from_symbol(b)?;
    let d = a.grid.dim / 2;
    let block: usize = a.grid.points.pow(d as u32);
    let w = a.grid.spacing().powi(d as i32);
    let mut kc = vec![C64::new(0.0, 0.0); block * block];
    kc.par_chunks_mut(block).enumerate().for_each(|(x, row)| {
        for s in 0..block {
            let left = ka[x * block + s] * w;
            if left.norm_sqr() == 0.0 {
                continue;
            }
            let brow = &kb[s * block..(s + 1) * block];
            for (slot, bval) in row.iter_mut().zip(brow) {
                *slot += left * bval;
            }
        }
    });
    symbol_from_kernel(&kc, a.grid, &format!("({})#({}) [kernel]", a.label, b.label))
}

/// A Weyl symbol: either decaying samples on `R^{2d}` or one of the
/// registered closed forms, which are dispatched to analytic routes because
/// they cannot be represented as decaying sample arrays.
pub enum WeylSymbol<'a> {
    /// Schwartz-class samples on a symplectic-self-dual grid.
    Sampled(&'a Field),
    /// `a == 1`; the identity operator.
    Identity,
    /// `a(x, xi) = |x|^2 + |xi|^2`; the harmonic oscillator `-Delta + |x|^2`.
    HarmonicOscillator,
    /// The twisted-Laplacian symbol; `a^w Phi_{alpha,beta} = (d + 2|beta|) Phi_{alpha,beta}`.
    TwistedLaplacian,
    /// The Weyl symbol of the twisted heat propagator `e^{-tL}` at the given time.
    HeatFlow(f64),
}

/// Applies the Weyl operator of `symbol` to `f`.
///
/// For sampled symbols this materializes the integral kernel
/// (`kernel_from_symbol`) and applies it by quadrature; `f` must live on the
/// position block of the symbol grid.
pub fn weyl_apply(symbol: &WeylSymbol, f: &Field) -> Result<Field> {
    match symbol {
        WeylSymbol::Identity => Ok(f.clone()),
        WeylSymbol::HarmonicOscillator => crate::spectral::apply_hermite_operator(f),
        WeylSymbol::TwistedLaplacian => crate::spectral::apply_twisted_laplacian(f),
        WeylSymbol::HeatFlow(t) => crate::spectral::heat_kernel_apply(f, *t),
        WeylSymbol::Sampled(a) => {
            f.check_finite()?;
            if a.grid.dim != 2 * f.grid.dim
                || a.grid.points != f.grid.points
                || (a.grid.half_width - f.grid.half_width).abs() > 1e-9 * a.grid.half_width
            {
                return Err(Error::Grid(format!(
                    "symbol grid (dim {}, N {}, R {:.6}) is not the doubled version of the \
                     field grid (dim {}, N {}, R {:.6})",
                    a.grid.dim, a.grid.points, a.grid.half_width,
                    f.grid.dim, f.grid.points, f.grid.half_width
                )));
            }
            if !a.is_schwartz_class(1e-6) {
                return Err(Error::Data(
                    "sampled Weyl symbol does not decay at the grid boundary; quantization \
                     would be inaccurate — use a registered closed-form symbol instead"
                        .into(),
                ));
            }
            let kernel = kernel_from_symbol(a)?;
            let block = f.grid.len();
            let w = f.grid.weight();
            let mut values = vec![C64::new(0.0, 0.0); block];
            values.par_iter_mut().enumerate().for_each(|(x, slot)| {
                let row = &kernel[x * block..(x + 1) * block];
                let mut acc = C64::new(0.0, 0.0);
                for (k, fv) in row.iter().zip(&f.values) {
                    acc += k * fv;
                }
                *slot = acc * w;
            });
            Field::from_values(f.grid, values, &format!("({})^w ({})", a.label, f.label))
        }
    }
}
