//! Hermite functions, Laguerre polynomials, special Hermite functions, and
//! the Laguerre kernels of the Landau-level projections.
//!
//! All Hermite evaluation goes through the normalized three-term recurrence
//! `h_{n+1}(y) = y sqrt(2/(n+1)) h_n(y) - sqrt(n/(n+1)) h_{n-1}(y)` seeded by
//! `h_0 = pi^{-1/4} e^{-y^2/2}`; Rodrigues/factorial formulas overflow and
//! cancel catastrophically beyond n ~ 20.
//!
//! The special Hermite functions are produced by numerically evaluating the
//! ambiguity integral of a Hermite pair on a refined lattice (the transform
//! has to be sampled at `Jz` for `z` on the target lattice, which is not in
//! general a sublattice of the FFT dual grid, so a direct quadrature beats
//! the FFT route here). They are normalized to an orthonormal family: with
//! the ambiguity transform `A(f,g)(x,xi) = (2 pi)^{-d} int e^{-i xi y}
//! f(y + x/2) conj(g(y - x/2)) dy` we set
//! `Phi_{alpha,beta}(z) = (2 pi)^{d/2} A(Phi_alpha, Phi_beta)(Jz)`,
//! which has unit L^2 norm. The diagonal closed form is then
//! `Phi_{beta,beta}(z) = (2 pi)^{-d/2} prod_j L^0_{beta_j}((x_j^2+xi_j^2)/2)
//! e^{-(x_j^2+xi_j^2)/4}` and the Landau kernels satisfy
//! `(2 pi)^{d/2} sum_{|beta|=k} Phi_{beta,beta} = phi_k`.

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::C64;
use std::collections::HashMap;

/// Multi-index `alpha` in `N^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    /// Total order `|alpha|`.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    /// Dimension `d`.
    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// All multi-indices in `N^d` with `|alpha| <= k_max`, in graded
/// lexicographic order.
pub fn multi_indices(d: usize, k_max: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; d];
    for k in 0..=k_max {
        fill(&mut out, &mut cur, 0, k);
    }
    return out;

    fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<usize>, pos: usize, rem: usize) {
        if pos + 1 == cur.len() {
            cur[pos] = rem;
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for v in 0..=rem {
            cur[pos] = v;
            fill(out, cur, pos + 1, rem - v);
        }
    }
}

/// Values `h_0(y), ..., h_{n_max}(y)` at a single point by the normalized
/// recurrence.
pub fn hermite_all(n_max: usize, y: f64) -> Vec<f64> {
    let mut vals = Vec::with_capacity(n_max + 1);
    let h0 = std::f64::consts::PI.powf(-0.25) * (-y * y / 2.0).exp();
    vals.push(h0);
    if n_max == 0 {
        return vals;
    }
    vals.push(y * std::f64::consts::SQRT_2 * h0);
    for n in 1..n_max {
        let next = y * (2.0 / (n as f64 + 1.0)).sqrt() * vals[n]
            - (n as f64 / (n as f64 + 1.0)).sqrt() * vals[n - 1];
        vals.push(next);
    }
    vals
}

fn check_turning_point(n: usize, grid: &GridSpec) -> Result<()> {
    let turning = (2.0 * n as f64 + 1.0).sqrt();
    if turning > grid.half_width {
        return Err(Error::BandLimit(format!(
            "Hermite order {n} has turning point {turning:.2} beyond the grid \
             half-width {:.2}; enlarge the grid",
            grid.half_width
        )));
    }
    Ok(())
}

/// Normalized Hermite function `h_n` sampled on a 1-d grid.
pub fn hermite_function(n: usize, grid: GridSpec) -> Result<Field> {
    if grid.dim != 1 {
        return Err(Error::Dimension(format!(
            "hermite_function needs a 1-d grid, got dimension {}",
            grid.dim
        )));
    }
    check_turning_point(n, &grid)?;
    let values = (0..grid.points)
        .map(|i| C64::new(hermite_all(n, grid.coord(i))[n], 0.0))
        .collect();
    Field::from_values(grid, values, &format!("h{n}"))
}

/// Tensor Hermite function `Phi_alpha = h_{alpha_1} x ... x h_{alpha_d}` on a
/// d-dimensional grid.
pub fn hermite_nd(alpha: &MultiIndex, grid: GridSpec) -> Result<Field> {
    let d = grid.dim;
    if alpha.dim() != d {
        return Err(Error::Dimension(format!(
            "multi-index has {} components but the grid has dimension {d}",
            alpha.dim()
        )));
    }
    let n_max = *alpha.0.iter().max().unwrap_or(&0);
    check_turning_point(n_max, &grid)?;
    // One shared table: h_n(coord(i)) for all n <= n_max, i < N.
    let table: Vec<Vec<f64>> = (0..grid.points)
        .map(|i| hermite_all(n_max, grid.coord(i)))
        .collect();
    let n = grid.points;
    let mut values = Vec::with_capacity(grid.len());
    for flat in 0..grid.len() {
        let mut rem = flat;
        let mut prod = 1.0;
        for ax in (0..d).rev() {
            prod *= table[rem % n][alpha.0[ax]];
            rem /= n;
        }
        values.push(C64::new(prod, 0.0));
    }
    Field::from_values(grid, values, &format!("Phi{:?}", alpha.0))
}

/// Laguerre polynomial `L_n^delta(y)` by the three-term recurrence
/// `(n+1) L_{n+1} = (2n + 1 + delta - y) L_n - (n + delta) L_{n-1}`.
pub fn laguerre_polynomial(n: usize, delta: f64, y: f64) -> Result<f64> {
    if delta <= -1.0 {
        return Err(Error::Parameter(format!(
            "Laguerre type must exceed -1, got {delta}"
        )));
    }
    let mut prev = 1.0f64;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + delta - y;
    for m in 1..n {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + delta - y) * cur - (mf + delta) * prev) / (mf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Landau-level kernel `phi_k(z) = L_k^{d-1}(|z|^2 / 2) e^{-|z|^2 / 4}` on a
/// 2d-dimensional grid.
pub fn laguerre_kernel(k: usize, grid: GridSpec) -> Result<Field> {
    if grid.dim % 2 != 0 {
        return Err(Error::Dimension(
            "Laguerre kernel lives on phase space; grid dimension must be even".into(),
        ));
    }
    let d = grid.dim / 2;
    let delta = d as f64 - 1.0;
    let f = Field::from_fn(grid, &format!("phi{k}"), |z| {
        let r2: f64 = z.iter().map(|c| c * c).sum();
        let l = laguerre_polynomial(k, delta, r2 / 2.0).expect("delta = d-1 > -1");
        C64::new(l * (-r2 / 4.0).exp(), 0.0)
    });
    Ok(f)
}

/// Dilated Gaussian `g_lambda(z) = e^{-lambda |z|^2}`.
pub fn gaussian_dilated(lambda: f64, grid: GridSpec) -> Result<Field> {
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!(
            "Gaussian dilation parameter must be positive, got {lambda}"
        )));
    }
    Ok(Field::from_fn(grid, &format!("g{lambda}"), |z| {
        let r2: f64 = z.iter().map(|c| c * c).sum();
        C64::new((-lambda * r2).exp(), 0.0)
    }))
}

/// Special Hermite function `Phi_{alpha,beta}` on a 2d-dimensional grid,
/// normalized to unit `L^2` norm (see the module docs).
///
/// The ambiguity integral tensorizes over axis pairs, so the field is built
/// from `d` tables of 1-d ambiguity values computed by refined-lattice
/// quadrature (spacing `h/4`), with the Hermite factors evaluated by
/// recurrence at the shifted quadrature nodes.
pub fn special_hermite(alpha: &MultiIndex, beta: &MultiIndex, grid: GridSpec) -> Result<Field> {
    if grid.dim % 2 != 0 {
        return Err(Error::Dimension(
            "special Hermite functions live on phase space; grid dimension must be even".into(),
        ));
    }
    let d = grid.dim / 2;
    if alpha.dim() != d || beta.dim() != d {
        return Err(Error::Grid(format!(
            "index dimensions ({}, {}) do not match the grid half-dimension {d}",
            alpha.dim(),
            beta.dim()
        )));
    }
    let n_max = alpha
        .0
        .iter()
        .chain(&beta.0)
        .copied()
        .max()
        .unwrap_or(0);
    check_turning_point(n_max, &grid)?;

    let n = grid.points;
    let tables: Vec<Vec<C64>> = (0..d)
        .map(|j| ambiguity_pair_table(alpha.0[j], beta.0[j], &grid))
        .collect();

    let amp = (2.0 * std::f64::consts::PI).powf(d as f64 / 2.0);
    let mut values = Vec::with_capacity(grid.len());
    for flat in 0..grid.len() {
        let idx = grid.multi_index(flat);
        let mut prod = C64::new(amp, 0.0);
        // A(Phi_alpha, Phi_beta) is evaluated at Jz = (xi, -x): the position
        // argument of pair j is z_{d+j}, the frequency argument is -z_j.
        for j in 0..d {
            prod *= tables[j][idx[d + j] * n + idx[j]];
        }
        values.push(prod);
    }
    Field::from_values(
        grid,
        values,
        &format!("Phi{:?}{:?}", alpha.0, beta.0),
    )
}

/// 1-d ambiguity table `T[a * N + b] = A(h_p, h_q)(coord(a), -coord(b))`
/// by refined-lattice quadrature.
fn ambiguity_pair_table(p: usize, q: usize, grid: &GridSpec) -> Vec<C64> {
    let n = grid.points;
    let r = grid.half_width;
    let step = grid.spacing() / 4.0;
    let m = (2.0 * r / step).round() as usize + 1;
    let nodes: Vec<f64> = (0..m).map(|i| -r + i as f64 * step).collect();
    let inv_2pi = step / (2.0 * std::f64::consts::PI);
    let n_max = p.max(q);
    let mut table = vec![C64::new(0.0, 0.0); n * n];
    let mut u = vec![0.0f64; m];
    for a in 0..n {
        let x_half = grid.coord(a) / 2.0;
        for (i, &y) in nodes.iter().enumerate() {
            let hp = hermite_all(n_max, y + x_half)[p];
            let hq = hermite_all(n_max, y - x_half)[q];
            u[i] = hp * hq;
        }
        for b in 0..n {
            // frequency argument -coord(b): phase e^{+ i coord(b) y}
            let nu = grid.coord(b);
            let mut acc = C64::new(0.0, 0.0);
            for (i, &y) in nodes.iter().enumerate() {
                acc += C64::new(0.0, nu * y).exp() * u[i];
            }
            table[a * n + b] = acc * inv_2pi;
        }
    }
    table
}

/// Closed-form diagonal special Hermite function, used as an independent
/// cross-check of the quadrature route.
pub fn special_hermite_diagonal_closed_form(beta: &MultiIndex, grid: GridSpec) -> Result<Field> {
    if grid.dim % 2 != 0 || beta.dim() != grid.dim / 2 {
        return Err(Error::Dimension(
            "diagonal closed form needs a 2d grid and a d-component index".into(),
        ));
    }
    let d = grid.dim / 2;
    let amp = (2.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0);
    let orders = beta.0.clone();
    Ok(Field::from_fn(grid, "Phi_diag", move |z| {
        let mut prod = amp;
        for j in 0..d {
            let r2 = z[j] * z[j] + z[d + j] * z[d + j];
            prod *= laguerre_polynomial(orders[j], 0.0, r2 / 2.0).unwrap()
                * (-r2 / 4.0).exp();
        }
        C64::new(prod, 0.0)
    }))
}

/// `M^1`-norm of the 1-d Hermite function `h_k`, computed exactly through its
/// self-ambiguity: `||A(h_k, h_k)||_{L^1(R^2)} = int_0^inf |L_k(u)| e^{-u/2} du`
/// (radial reduction of the diagonal closed form).
pub fn hermite_m1_norm(k: usize) -> f64 {
    // |L_k| e^{-u/2} is piecewise smooth and supported (numerically) in
    // u <= 4k + 40; composite midpoint at fine spacing is plenty.
    let u_max = 4.0 * k as f64 + 40.0;
    let steps = 200_000usize;
    let du = u_max / steps as f64;
    let mut acc = 0.0;
    for i in 0..steps {
        let u = (i as f64 + 0.5) * du;
        let l = laguerre_polynomial(k, 0.0, u).unwrap();
        acc += l.abs() * (-u / 2.0).exp();
    }
    acc * du
}

/// One row of the `M^1` growth table.
#[derive(Debug, Clone, Copy)]
pub struct M1GrowthRow {
    /// Total order.
    pub k: usize,
    /// `||phi_k||_{M^1}` (Gabor route, window `phi_0`).
    pub phi_m1: f64,
    /// `||Phi_beta||_{M^1}` for `beta = (k, 0, ..., 0)`, evaluated exactly
    /// through the self-ambiguity `||A(Phi_beta, Phi_beta)||_{L^1}`.
    pub hermite_m1: f64,
}

/// Growth table of `M^1` norms against the total order, for fitting the
/// growth exponent of `||Phi_beta||_{M^1}` (expected `k^{d^2 - d/2}`).
///
/// The Laguerre-kernel column is computed by the streaming Gabor norm on a
/// per-order grid sized to the classical turning radius `sqrt(8k)`; the
/// Hermite column reduces to the 1-d Laguerre integrals of
/// [`hermite_m1_norm`] because the self-ambiguity tensorizes.
pub fn m1_norm_growth_table(k_max: usize, d: usize) -> Result<Vec<M1GrowthRow>> {
    use crate::phasespace::{gabor_mixed_norm, MixedNormSpec, NormFlavor};
    if d == 0 {
        return Err(Error::Dimension("dimension must be positive".into()));
    }
    let spec = MixedNormSpec::new(1.0, 1.0, 0.0, NormFlavor::Modulation, false)?;
    let mut rows = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let r = (8.0 * k as f64).sqrt() + 6.0;
        let h_target = std::f64::consts::PI / ((8.0 * k as f64 + 4.0).sqrt() + 3.0);
        let n = (((2.0 * r / h_target).ceil() as usize + 1) / 2 * 2).max(32);
        let grid = GridSpec::new(2 * d, n, r)?;
        let phi = laguerre_kernel(k, grid)?;
        let window = laguerre_kernel(0, grid)?;
        let phi_m1 = gabor_mixed_norm(&phi, &window, &spec)?;
        // beta = (k, 0, ..., 0): the d - 1 trivial factors contribute
        // ||A(h_0, h_0)||_{L^1(R^2)} = 2 each.
        let hermite_m1 = hermite_m1_norm(k) * 2.0f64.powi(d as i32 - 1);
        rows.push(M1GrowthRow {
            k,
            phi_m1,
            hermite_m1,
        });
    }
    Ok(rows)
}

/// Least-squares slope of `log(values)` against `log(ks)`.
pub fn log_log_slope(ks: &[f64], values: &[f64]) -> f64 {
    let n = ks.len() as f64;
    let xs: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Cached orthonormal bases on a fixed phase-space grid: tensor Hermite
/// functions on the d-dimensional factor grid, special Hermite functions, and
/// Landau kernels on the 2d-dimensional grid.
///
/// Construction is the only mutating phase; afterwards the catalog is
/// read-only and freely shareable.
pub struct BasisCatalog {
    /// Half-dimension `d`.
    pub d: usize,
    /// Maximal total order cached.
    pub k_max: usize,
    /// Phase-space grid (dimension `2d`).
    pub grid: GridSpec,
    /// Factor grid (dimension `d`, same points and half-width).
    pub factor_grid: GridSpec,
    hermite: HashMap<MultiIndex, Field>,
    special: HashMap<(MultiIndex, MultiIndex), Field>,
    laguerre: Vec<Field>,
}

impl BasisCatalog {
    /// Default maximal order: 32 for d = 1, 8 otherwise (memory and
    /// turning-point constraints).
    pub fn default_k_max(d: usize) -> usize {
        if d == 1 {
            32
        } else {
            8
        }
    }

    /// Builds the catalog. For `d = 1` every pair `Phi_{alpha,beta}` with
    /// orders up to `k_max` is cached; for `d >= 2` only the diagonal pairs
    /// are (off-diagonal fields are computed on demand), since the full pair
    /// set grows quadratically in the index count.
    pub fn build(d: usize, k_max: usize, grid: GridSpec) -> Result<BasisCatalog> {
        if grid.dim != 2 * d {
            return Err(Error::Grid(format!(
                "catalog for d = {d} needs a {}-dimensional grid, got {}",
                2 * d,
                grid.dim
            )));
        }
        let factor_grid = GridSpec::new(d, grid.points, grid.half_width)?;
        let indices = multi_indices(d, k_max);
        let mut hermite = HashMap::new();
        for a in &indices {
            hermite.insert(a.clone(), hermite_nd(a, factor_grid)?);
        }
        let mut special = HashMap::new();
        if d == 1 {
            for a in &indices {
                for b in &indices {
                    special.insert(
                        (a.clone(), b.clone()),
                        special_hermite(a, b, grid)?,
                    );
                }
            }
        } else {
            for b in &indices {
                special.insert((b.clone(), b.clone()), special_hermite(b, b, grid)?);
            }
        }
        let laguerre = (0..=k_max)
            .map(|k| laguerre_kernel(k, grid))
            .collect::<Result<Vec<_>>>()?;
        Ok(BasisCatalog {
            d,
            k_max,
            grid,
            factor_grid,
            hermite,
            special,
            laguerre,
        })
    }

    /// Cached tensor Hermite function.
    pub fn hermite(&self, alpha: &MultiIndex) -> Result<&Field> {
        self.hermite.get(alpha).ok_or_else(|| {
            Error::Catalog(format!("Phi_{:?} not cached (k_max = {})", alpha.0, self.k_max))
        })
    }

    /// Special Hermite function, from cache when available.
    pub fn special(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Result<Field> {
        if let Some(f) = self.special.get(&(alpha.clone(), beta.clone())) {
            return Ok(f.clone());
        }
        if alpha.order() > self.k_max || beta.order() > self.k_max {
            return Err(Error::Catalog(format!(
                "orders ({}, {}) exceed catalog bound {}",
                alpha.order(),
                beta.order(),
                self.k_max
            )));
        }
        special_hermite(alpha, beta, self.grid)
    }

    /// Cached Landau kernel `phi_k`.
    pub fn laguerre(&self, k: usize) -> Result<&Field> {
        self.laguerre.get(k).ok_or_else(|| {
            Error::Catalog(format!("phi_{k} not cached (k_max = {})", self.k_max))
        })
    }

    /// All cached multi-indices, graded order.
    pub fn indices(&self) -> Vec<MultiIndex> {
        multi_indices(self.d, self.k_max)
    }

    /// All cached special-Hermite pairs (for export).
    pub fn special_pairs(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &Field)> {
        self.special.iter()
    }
}
