//! Phase-space transforms (Gabor, symplectic Gabor, ambiguity, Wigner),
//! weighted mixed-norm evaluation, and the rational index-condition logic for
//! Weyl-product and heat-flow boundedness.
//!
//! Conventions (consistent with the unitary Fourier transform of
//! [`crate::fourier`]):
//!
//! * `V_g f(x, xi) = (2 pi)^{-n/2} int e^{-i xi y} f(y) conj(g(y - x)) dy`
//! * `SV_g f(z, zeta) = 2^d V_g f(z, 2 J zeta)` (symplectic Gabor, on `R^{2d}`)
//! * `A(f, g)(x, xi) = (2 pi)^{-n} int e^{-i xi y} f(y + x/2) conj(g(y - x/2)) dy
//!    = (2 pi)^{-n/2} e^{i x xi / 2} V_g f(x, xi)`
//! * `W(f, g)(x, xi) = (2 pi)^{-n} int e^{-i xi y} f(x + y/2) conj(g(x - y/2)) dy`
//!
//! The half-sample shifts in the ambiguity transform are handled exactly by
//! the phase factor `e^{i x xi / 2}` (a Fourier-domain phase ramp); the
//! Wigner midpoints are realized by exact index arithmetic on a band-limited
//! 2x refinement of the inputs.

use crate::error::{Error, Result};
use crate::fourier::{fourier, resample_double};
use crate::grid::{Field, GridSpec};
use crate::C64;
use num_rational::Ratio;
use rayon::prelude::*;

/// Hard cap on materialized phase-space arrays (samples); larger requests
/// must go through the streaming mixed-norm path.
pub const MAX_PHASE_SAMPLES: usize = 1 << 26;

/// Sampled phase-space transform: `values[a * M + m]` is the value at
/// position multi-index `a` (on `pos_grid`) and frequency multi-index `m`
/// (on `freq_grid`), with `M = freq_grid.len()`.
#[derive(Debug, Clone)]
pub struct PhaseSpaceField {
    /// Lattice of the position block.
    pub pos_grid: GridSpec,
    /// Lattice of the frequency block.
    pub freq_grid: GridSpec,
    /// Row-major samples, position block slowest.
    pub values: Vec<C64>,
}

impl PhaseSpaceField {
    /// Sample at a (position, frequency) multi-index pair.
    pub fn at(&self, pos: &[usize], freq: &[usize]) -> C64 {
        self.values[self.pos_grid.flat_index(pos) * self.freq_grid.len()
            + self.freq_grid.flat_index(freq)]
    }
}

fn check_window(f: &Field, g: &Field) -> Result<()> {
    if f.grid != g.grid {
        return Err(Error::Grid(
            "transform input and window live on different grids".into(),
        ));
    }
    if g.max_abs() == 0.0 {
        return Err(Error::Parameter("window is identically zero".into()));
    }
    let len = f.grid.len();
    if len.checked_mul(len).map_or(true, |t| t > MAX_PHASE_SAMPLES) {
        return Err(Error::Grid(format!(
            "phase-space array of {len}^2 samples exceeds the memory budget; \
             use the streaming norm evaluation"
        )));
    }
    Ok(())
}

/// One Gabor row: `F(f conj(T_x g))` for the lattice translate `x` with flat
/// index `a_flat` (translation by index shift, zero fill outside the grid).
fn gabor_row(f: &Field, g: &Field, a_flat: usize) -> Vec<C64> {
    let grid = f.grid;
    let n = grid.points;
    let dim = grid.dim;
    let a = grid.multi_index(a_flat);
    let shift: Vec<i64> = a.iter().map(|&ai| ai as i64 - (n / 2) as i64).collect();
    let mut w = Field::zeros(grid);
    let mut src = vec![0usize; dim];
    'outer: for (j_flat, slot) in w.values.iter_mut().enumerate() {
        let mut rem = j_flat;
        for ax in (0..dim).rev() {
            let j = (rem % n) as i64;
            rem /= n;
            let s = j - shift[ax];
            if s < 0 || s >= n as i64 {
                continue 'outer;
            }
            src[ax] = s as usize;
        }
        *slot = f.values[j_flat] * g.at(&src).conj();
    }
    fourier(&w).expect("windowed product is finite").values
}

/// Gabor (short-time Fourier) transform of `f` with window `g`; the frequency
/// block lives on the FFT dual lattice.
pub fn gabor_transform(f: &Field, g: &Field) -> Result<PhaseSpaceField> {
    check_window(f, g)?;
    f.check_finite()?;
    let len = f.grid.len();
    let mut values = vec![C64::new(0.0, 0.0); len * len];
    values
        .par_chunks_mut(len)
        .enumerate()
        .for_each(|(a_flat, row)| {
            row.copy_from_slice(&gabor_row(f, g, a_flat));
        });
    Ok(PhaseSpaceField {
        pos_grid: f.grid,
        freq_grid: f.grid.dual(),
        values,
    })
}

/// Frequency-lattice index of `2 J zeta` for the zeta multi-index `m`: the
/// first block of the source index is the output's second block and the
/// second block is the mod-N wrapped negation of the output's first block.
fn two_j_perm(m: &[usize], d: usize, n: usize, out: &mut [usize]) {
    for j in 0..d {
        out[j] = m[d + j];
        out[d + j] = (n - m[j]) % n;
    }
}

/// Symplectic Gabor transform `SV_g f(z, zeta) = 2^d V_g f(z, 2 J zeta)` on
/// `R^{2d}`; realized by [`gabor_transform`] followed by the exact lattice
/// automorphism `2J` on the frequency block (whose lattice is the half-scaled
/// dual lattice).
pub fn symplectic_gabor(f: &Field, g: &Field) -> Result<PhaseSpaceField> {
    if f.grid.dim % 2 != 0 {
        return Err(Error::Dimension(
            "symplectic Gabor transform needs even ambient dimension".into(),
        ));
    }
    let d = f.grid.dim / 2;
    let v = gabor_transform(f, g)?;
    let n = f.grid.points;
    let len = f.grid.len();
    let freq_grid = GridSpec::new(f.grid.dim, n, v.freq_grid.half_width / 2.0)?;
    let amp = 2.0f64.powi(d as i32);
    let mut values = vec![C64::new(0.0, 0.0); len * len];
    let mut src = vec![0usize; f.grid.dim];
    for a_flat in 0..len {
        for m_flat in 0..len {
            let m = freq_grid.multi_index(m_flat);
            two_j_perm(&m, d, n, &mut src);
            values[a_flat * len + m_flat] =
                v.values[a_flat * len + v.freq_grid.flat_index(&src)] * amp;
        }
    }
    Ok(PhaseSpaceField {
        pos_grid: f.grid,
        freq_grid,
        values,
    })
}

/// Ambiguity transform `A(f, g)`; equal to
/// `(2 pi)^{-n/2} e^{i x xi / 2} V_g f(x, xi)` (the phase factor implements
/// the half-sample shifts exactly).
pub fn ambiguity(f: &Field, g: &Field) -> Result<PhaseSpaceField> {
    let mut v = gabor_transform(f, g)?;
    let len = f.grid.len();
    let dim = f.grid.dim;
    let amp = (2.0 * std::f64::consts::PI).powf(-(dim as f64) / 2.0);
    for a_flat in 0..len {
        let a = v.pos_grid.multi_index(a_flat);
        for m_flat in 0..len {
            let m = v.freq_grid.multi_index(m_flat);
            let mut dot = 0.0;
            for ax in 0..dim {
                dot += v.pos_grid.coord(a[ax]) * v.freq_grid.coord(m[ax]);
            }
            v.values[a_flat * len + m_flat] *= C64::new(0.0, dot / 2.0).exp() * amp;
        }
    }
    Ok(v)
}

/// Wigner transform `W(f, g)`; its midpoint samples `f(x + y/2)` are taken
/// by exact index arithmetic on the 2x band-limited refinement of `f` and
/// `g`, so no interpolation error enters.
pub fn wigner(f: &Field, g: &Field) -> Result<PhaseSpaceField> {
    check_window(f, g)?;
    let grid = f.grid;
    let n = grid.points;
    let dim = grid.dim;
    let fine_f = resample_double(f)?;
    let fine_g = resample_double(g)?;
    let amp = (2.0 * std::f64::consts::PI).powf(-(dim as f64) / 2.0);
    let len = grid.len();
    let mut values = vec![C64::new(0.0, 0.0); len * len];
    values
        .par_chunks_mut(len)
        .enumerate()
        .for_each(|(a_flat, row)| {
            let a = grid.multi_index(a_flat);
            let mut w = Field::zeros(grid);
            let mut fi = vec![0usize; dim];
            let mut gi = vec![0usize; dim];
            'outer: for (j_flat, slot) in w.values.iter_mut().enumerate() {
                let mut rem = j_flat;
                for ax in (0..dim).rev() {
                    let j = (rem % n) as i64;
                    rem /= n;
                    // fine-lattice indices of x + y/2 and x - y/2
                    let p = 2 * a[ax] as i64 + j - (n / 2) as i64;
                    let q = 2 * a[ax] as i64 - j + (n / 2) as i64;
                    if p < 0 || p >= 2 * n as i64 || q < 0 || q >= 2 * n as i64 {
                        continue 'outer;
                    }
                    fi[ax] = p as usize;
                    gi[ax] = q as usize;
                }
                *slot = fine_f.at(&fi) * fine_g.at(&gi).conj();
            }
            let transformed = fourier(&w).expect("finite");
            for (dst, v) in row.iter_mut().zip(&transformed.values) {
                *dst = v * amp;
            }
        });
    Ok(PhaseSpaceField {
        pos_grid: grid,
        freq_grid: grid.dual(),
        values,
    })
}

/// Which block carries the inner exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormFlavor {
    /// Inner `L^p` over the position block, outer `L^q` over frequency.
    Modulation,
    /// Inner `L^p` over the frequency block, outer `L^q` over position.
    Amalgam,
}

/// Weighted mixed-norm specification for phase-space samples.
#[derive(Debug, Clone, Copy)]
pub struct MixedNormSpec {
    /// Inner exponent (`f64::INFINITY` for the sup).
    pub p: f64,
    /// Outer exponent.
    pub q: f64,
    /// Weight exponent: the samples are multiplied by `(1 + |x|^2 + |xi|^2)^{s/2}`.
    pub s: f64,
    /// Integration order.
    pub flavor: NormFlavor,
    /// Use the symplectic Gabor transform when building the samples from a
    /// field (ignored when the caller supplies a ready [`PhaseSpaceField`]).
    pub symplectic: bool,
}

impl MixedNormSpec {
    /// Validated constructor.
    pub fn new(p: f64, q: f64, s: f64, flavor: NormFlavor, symplectic: bool) -> Result<Self> {
        if !(p >= 1.0) || !(q >= 1.0) {
            return Err(Error::Parameter(format!(
                "mixed-norm exponents must be >= 1, got ({p}, {q})"
            )));
        }
        Ok(MixedNormSpec {
            p,
            q,
            s,
            flavor,
            symplectic,
        })
    }
}

/// Accumulator for one `L^p` quadrature (handles `p = inf` as a max).
struct LpAcc {
    p: f64,
    sum: f64,
    max: f64,
}

impl LpAcc {
    fn new(p: f64) -> Self {
        LpAcc {
            p,
            sum: 0.0,
            max: 0.0,
        }
    }
    fn add(&mut self, v: f64, weight: f64) {
        if self.p.is_finite() {
            self.sum += v.powf(self.p) * weight;
        } else {
            self.max = self.max.max(v);
        }
    }
    fn finish(&self) -> f64 {
        if self.p.is_finite() {
            self.sum.powf(1.0 / self.p)
        } else {
            self.max
        }
    }
}

fn bracket_weight(s: f64, x2: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        (1.0 + x2).powf(s / 2.0)
    }
}

/// Iterated weighted quadrature norm of a phase-space array.
pub fn mixed_norm(field: &PhaseSpaceField, spec: &MixedNormSpec) -> Result<f64> {
    if field.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Data("phase-space samples are not finite".into()));
    }
    let pg = &field.pos_grid;
    let fg = &field.freq_grid;
    let plen = pg.len();
    let flen = fg.len();
    let pw = pg.weight();
    let fw = fg.weight();
    // squared norms of the lattice coordinates, precomputed per block
    let pos_sq: Vec<f64> = (0..plen)
        .map(|a| {
            pg.multi_index(a)
                .iter()
                .map(|&i| pg.coord(i) * pg.coord(i))
                .sum()
        })
        .collect();
    let freq_sq: Vec<f64> = (0..flen)
        .map(|m| {
            fg.multi_index(m)
                .iter()
                .map(|&i| fg.coord(i) * fg.coord(i))
                .sum()
        })
        .collect();
    let value = match spec.flavor {
        NormFlavor::Modulation => {
            let mut outer = LpAcc::new(spec.q);
            for m in 0..flen {
                let mut inner = LpAcc::new(spec.p);
                for a in 0..plen {
                    let w = bracket_weight(spec.s, pos_sq[a] + freq_sq[m]);
                    inner.add(field.values[a * flen + m].norm() * w, pw);
                }
                outer.add(inner.finish(), fw);
            }
            outer.finish()
        }
        NormFlavor::Amalgam => {
            let mut outer = LpAcc::new(spec.q);
            for a in 0..plen {
                let mut inner = LpAcc::new(spec.p);
                for m in 0..flen {
                    let w = bracket_weight(spec.s, pos_sq[a] + freq_sq[m]);
                    inner.add(field.values[a * flen + m].norm() * w, fw);
                }
                outer.add(inner.finish(), pw);
            }
            outer.finish()
        }
    };
    Ok(value)
}

/// Streaming Gabor mixed norm: computes
/// `mixed_norm(gabor_transform(f, g), spec)` (or the symplectic variant when
/// `spec.symplectic` is set) one position slice at a time, so the full
/// phase-space array is never materialized. The amalgam flavor reduces each
/// slice to a scalar; the modulation flavor keeps one accumulator per
/// frequency point.
pub fn gabor_mixed_norm(f: &Field, g: &Field, spec: &MixedNormSpec) -> Result<f64> {
    if f.grid != g.grid {
        return Err(Error::Grid(
            "transform input and window live on different grids".into(),
        ));
    }
    if g.max_abs() == 0.0 {
        return Err(Error::Parameter("window is identically zero".into()));
    }
    if spec.symplectic && f.grid.dim % 2 != 0 {
        return Err(Error::Dimension(
            "symplectic norms need even ambient dimension".into(),
        ));
    }
    let grid = f.grid;
    let n = grid.points;
    let len = grid.len();
    let d = grid.dim / 2;
    let dual = grid.dual();
    let (freq_grid, amp) = if spec.symplectic {
        (
            GridSpec::new(grid.dim, n, dual.half_width / 2.0)?,
            2.0f64.powi(d as i32),
        )
    } else {
        (dual, 1.0)
    };
    let fw = freq_grid.weight();
    let pw = grid.weight();
    let freq_sq: Vec<f64> = (0..len)
        .map(|m| {
            freq_grid
                .multi_index(m)
                .iter()
                .map(|&i| freq_grid.coord(i) * freq_grid.coord(i))
                .sum()
        })
        .collect();
    // |row| in frequency order of `freq_grid` (with the 2J permutation for
    // the symplectic flavor), weight applied.
    let slice_mags = |a_flat: usize| -> Vec<f64> {
        let row = gabor_row(f, g, a_flat);
        let pos_sq: f64 = grid
            .multi_index(a_flat)
            .iter()
            .map(|&i| grid.coord(i) * grid.coord(i))
            .sum();
        let mut out = vec![0.0f64; len];
        let mut src = vec![0usize; grid.dim];
        for (m_flat, slot) in out.iter_mut().enumerate() {
            let mag = if spec.symplectic {
                let m = freq_grid.multi_index(m_flat);
                two_j_perm(&m, d, n, &mut src);
                row[dual.flat_index(&src)].norm() * amp
            } else {
                row[m_flat].norm()
            };
            *slot = mag * bracket_weight(spec.s, pos_sq + freq_sq[m_flat]);
        }
        out
    };
    match spec.flavor {
        NormFlavor::Amalgam => {
            // slice -> inner norm over frequency -> scalar; parallel over slices
            let inners: Vec<f64> = (0..len)
                .into_par_iter()
                .map(|a_flat| {
                    let mags = slice_mags(a_flat);
                    let mut inner = LpAcc::new(spec.p);
                    for v in mags {
                        inner.add(v, fw);
                    }
                    inner.finish()
                })
                .collect();
            let mut outer = LpAcc::new(spec.q);
            for v in inners {
                outer.add(v, pw);
            }
            Ok(outer.finish())
        }
        NormFlavor::Modulation => {
            // accumulate per-frequency inner sums across slices (fixed order)
            let partials: Vec<Vec<f64>> = (0..len)
                .into_par_iter()
                .map(|a_flat| {
                    let mags = slice_mags(a_flat);
                    if spec.p.is_finite() {
                        mags.iter().map(|v| v.powf(spec.p) * pw).collect()
                    } else {
                        mags
                    }
                })
                .collect();
            let mut inner = vec![0.0f64; len];
            for part in &partials {
                if spec.p.is_finite() {
                    for (acc, v) in inner.iter_mut().zip(part) {
                        *acc += v;
                    }
                } else {
                    for (acc, v) in inner.iter_mut().zip(part) {
                        *acc = acc.max(*v);
                    }
                }
            }
            let mut outer = LpAcc::new(spec.q);
            for v in inner {
                let val = if spec.p.is_finite() {
                    v.powf(1.0 / spec.p)
                } else {
                    v
                };
                outer.add(val, fw);
            }
            Ok(outer.finish())
        }
    }
}

/// Exact rational in the index logic.
pub type Rat = Ratio<i64>;

/// Six Lebesgue exponents `(p0, q0, p1, q1, p2, q2)` stored as exact
/// reciprocals (`1/inf = 0`), so boundary cases never depend on rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexTuple {
    /// Reciprocals `[1/p0, 1/q0, 1/p1, 1/q1, 1/p2, 1/q2]`.
    pub inv: [Rat; 6],
}

impl IndexTuple {
    /// From reciprocals; each must lie in `[0, 1]`.
    pub fn from_reciprocals(inv: [Rat; 6]) -> Result<Self> {
        for r in &inv {
            if *r < Rat::new(0, 1) || *r > Rat::new(1, 1) {
                return Err(Error::Parameter(format!(
                    "exponent reciprocal {r} outside [0, 1]"
                )));
            }
        }
        Ok(IndexTuple { inv })
    }
}

fn rat_conj(r: Rat) -> Rat {
    Rat::new(1, 1) - r
}

/// Sharp admissibility condition for the continuity of the Weyl product
/// `M^{p0,q0} x M^{p1,q1} -> M^{p2,q2}`:
/// `max{1 + 1/q2 - 1/q0 - 1/q1, 0} <= min{1/p0, 1/p1, 1/p2', 1/q0', 1/q1',
/// 1/q2, 1/p0 + 1/p1 - 1/p2}`, evaluated exactly in rational arithmetic.
pub fn weyl_product_admissible(t: &IndexTuple) -> bool {
    let [ip0, iq0, ip1, iq1, ip2, iq2] = t.inv;
    let one = Rat::new(1, 1);
    let zero = Rat::new(0, 1);
    let lhs = (one + iq2 - iq0 - iq1).max(zero);
    let rhs = [
        ip0,
        ip1,
        rat_conj(ip2),
        rat_conj(iq0),
        rat_conj(iq1),
        iq2,
        ip0 + ip1 - ip2,
    ]
    .into_iter()
    .min()
    .unwrap();
    lhs <= rhs
}

/// Equivalent restatement of [`weyl_product_admissible`] as an explicit
/// condition system, used to cross-check the rational evaluation:
/// `1/p2 <= 1/p0 + 1/p1`, `q2 >= q0`, `q2 >= q1`, `1 <= 1/q0 + 1/q1`, and
/// `max{1 - 1/p1 + 1/q2, 1 - 1/p0 + 1/q2, 1/p2 + 1/q2,
///      1 + 1/q2 + 1/p2 - 1/p0 - 1/p1} <= 1/q0 + 1/q1`.
/// (The last element of the max carries the `1/p2 - 1/p0 - 1/p1` correction;
/// without it the system is strictly stronger, e.g. at
/// `(p0..q2) = (1, 4/3, 1, 4/3, 2, 4/3)`.)
pub fn weyl_product_admissible_restated(t: &IndexTuple) -> bool {
    let [ip0, iq0, ip1, iq1, ip2, iq2] = t.inv;
    let one = Rat::new(1, 1);
    let sum_q = iq0 + iq1;
    if ip2 > ip0 + ip1 {
        return false;
    }
    // q2 >= q0, q1 in reciprocal form
    if iq2 > iq0 || iq2 > iq1 {
        return false;
    }
    if one > sum_q {
        return false;
    }
    let m = [
        one - ip1 + iq2,
        one - ip0 + iq2,
        ip2 + iq2,
        one + iq2 + ip2 - ip0 - ip1,
    ]
    .into_iter()
    .max()
    .unwrap();
    m <= sum_q
}

/// Admissibility and small-time decay exponent for the fractional heat flow
/// `M^{p1,q1} -> M^{p2,q2}` in dimension parameter `d`:
/// bounded if and only if `q2 >= q1`, with operator-norm growth
/// `t^{-(d/nu) max{1/p2 - 1/p1, 0}}` as `t -> 0+`.
pub fn heat_index_constants(
    d: usize,
    p1: f64,
    q1: f64,
    p2: f64,
    q2: f64,
    nu: f64,
) -> Result<(bool, f64)> {
    for e in [p1, q1, p2, q2] {
        if !(e >= 1.0) {
            return Err(Error::Parameter(format!("exponent {e} must be >= 1")));
        }
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::Parameter(format!(
            "fractional order must lie in (0, 1], got {nu}"
        )));
    }
    let recip = |e: f64| if e.is_finite() { 1.0 / e } else { 0.0 };
    let admissible = q2 >= q1;
    let exponent = (d as f64 / nu) * (recip(p2) - recip(p1)).max(0.0);
    Ok((admissible, exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hermite_function;
    use proptest::prelude::*;

    fn h0_pair(n: usize, r: f64) -> (Field, Field, GridSpec) {
        let g = GridSpec::new(1, n, r).unwrap();
        let h = hermite_function(0, g).unwrap();
        (h.clone(), h, g)
    }

    #[test]
    fn gabor_moyal_and_spot_value() {
        let (f, g, grid) = h0_pair(96, 9.0);
        let v = gabor_transform(&f, &g).unwrap();
        // Moyal: double quadrature of |V|^2 = ||f||^2 ||g||^2
        let spec = MixedNormSpec::new(2.0, 2.0, 0.0, NormFlavor::Modulation, false).unwrap();
        let m = mixed_norm(&v, &spec).unwrap();
        let expect = f.l2_norm() * g.l2_norm();
        assert!((m - expect).abs() / expect < 1e-8, "moyal: {m} vs {expect}");
        // V_{h0} h0 (0,0) = (2 pi)^{-1/2} ||h0||^2, against direct quadrature
        let center = v.at(&[48], &[48]);
        let direct: C64 = f
            .values
            .iter()
            .zip(&g.values)
            .map(|(a, b)| a * b.conj())
            .sum::<C64>()
            * grid.weight()
            * (2.0 * std::f64::consts::PI).powf(-0.5);
        assert!((center - direct).norm() / direct.norm() < 1e-8);
    }

    #[test]
    fn gabor_fourier_exchange() {
        // |V_{g^}f^(xi, -x)| = |V_g f(x, xi)| on an axis-self-dual lattice
        let grid = GridSpec::self_dual_axes(1, 64).unwrap();
        let f = Field::from_fn(grid, "f", |x| {
            C64::new((-x[0] * x[0] / 2.0).exp() * (1.0 + x[0]), 0.0)
        });
        let g = hermite_function(0, grid).unwrap();
        let v = gabor_transform(&f, &g).unwrap();
        let fhat = crate::fourier::fourier(&f).unwrap();
        let ghat = crate::fourier::fourier(&g).unwrap();
        let fhat = Field::from_values(grid, fhat.values, "fh").unwrap();
        let ghat = Field::from_values(grid, ghat.values, "gh").unwrap();
        let vhat = gabor_transform(&fhat, &ghat).unwrap();
        let n = 64usize;
        for a in (8..n - 8).step_by(7) {
            for b in (8..n - 8).step_by(7) {
                let lhs = vhat.at(&[b], &[n - a]).norm();
                let rhs = v.at(&[a], &[b]).norm();
                assert!(
                    (lhs - rhs).abs() <= 1e-8 * (1.0 + rhs),
                    "exchange at ({a},{b}): {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn gabor_covariance() {
        // |V_g(pi(u,v) f)(x, xi)| = |V_g f(x - u, xi - v)| on lattice points
        let grid = GridSpec::new(1, 64, 8.0).unwrap();
        let f = hermite_function(1, grid).unwrap();
        let g = hermite_function(0, grid).unwrap();
        let (du, dv) = (5i64, 7i64); // lattice shifts
        let h = grid.spacing();
        let dxi = grid.dual().spacing();
        let shifted = Field::from_fn(grid, "sf", |x| {
            let y = x[0] - du as f64 * h;
            let phase = C64::new(0.0, dv as f64 * dxi * x[0]).exp();
            // h_1(y) = sqrt(2) y h_0(y)
            let h0 = std::f64::consts::PI.powf(-0.25) * (-y * y / 2.0).exp();
            phase * (std::f64::consts::SQRT_2 * y * h0)
        });
        let v = gabor_transform(&f, &g).unwrap();
        let vs = gabor_transform(&shifted, &g).unwrap();
        for a in (16..48usize).step_by(5) {
            for b in (16..48usize).step_by(5) {
                let lhs = vs.at(&[a], &[b]).norm();
                let rhs = v
                    .at(
                        &[(a as i64 - du) as usize],
                        &[(b as i64 - dv) as usize],
                    )
                    .norm();
                assert!((lhs - rhs).abs() < 1e-9 + 1e-8 * rhs);
            }
        }
    }

    #[test]
    fn symplectic_gabor_values() {
        // g(z) = e^{-|z|^2}: SV_g g(0,0) = 2^{-d}
        let grid = GridSpec::new(2, 64, 7.0).unwrap();
        let g = Field::from_fn(grid, "g", |z| {
            let r2: f64 = z.iter().map(|c| c * c).sum();
            C64::new((-r2).exp(), 0.0)
        });
        let sv = symplectic_gabor(&g, &g).unwrap();
        let c = sv.at(&[32, 32], &[32, 32]);
        assert!((c - C64::new(0.5, 0.0)).norm() < 1e-8, "center {c}");
        // Moyal for the symplectic transform
        let spec = MixedNormSpec::new(2.0, 2.0, 0.0, NormFlavor::Modulation, true).unwrap();
        let m = mixed_norm(&sv, &spec).unwrap();
        let expect = g.l2_norm() * g.l2_norm();
        assert!((m - expect).abs() / expect < 1e-8);
    }

    #[test]
    fn ambiguity_values() {
        let grid = GridSpec::new(1, 96, 9.0).unwrap();
        let f = hermite_function(2, grid).unwrap();
        let g = hermite_function(0, grid).unwrap();
        let a = ambiguity(&f, &g).unwrap();
        // A(f,g)(0,0) = (2 pi)^{-d} <f, g>
        let expect = f.inner(&g) * (2.0 * std::f64::consts::PI).powi(-1);
        assert!((a.at(&[48], &[48]) - expect).norm() < 1e-10);
        // |A| = (2 pi)^{-d/2} |V|
        let v = gabor_transform(&f, &g).unwrap();
        let c = (2.0 * std::f64::consts::PI).powf(-0.5);
        for k in [100usize, 2000, 5000] {
            assert!((a.values[k].norm() - c * v.values[k].norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn wigner_gaussian_and_reality() {
        let grid = GridSpec::new(1, 96, 9.0).unwrap();
        let h0 = hermite_function(0, grid).unwrap();
        let w = wigner(&h0, &h0).unwrap();
        // W(h0)(x, xi) = pi^{-1} e^{-(x^2 + xi^2)}
        for (a, b) in [(48usize, 48usize), (50, 48), (48, 52), (44, 46), (55, 41)] {
            let x = w.pos_grid.coord(a);
            let xi = w.freq_grid.coord(b);
            let expect = (-(x * x + xi * xi)).exp() / std::f64::consts::PI;
            let got = w.at(&[a], &[b]);
            assert!(
                (got.re - expect).abs() < 1e-8 * (1.0 + expect) && got.im.abs() < 1e-10,
                "W(h0) at ({a},{b}): {got} vs {expect}"
            );
        }
        // reality for a generic f
        let f = Field::from_fn(grid, "f", |x| {
            C64::new((-x[0] * x[0] / 2.0).exp(), 0.4 * x[0] * (-x[0] * x[0]).exp())
        });
        let wf = wigner(&f, &f).unwrap();
        assert!(wf.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max) < 1e-10);
    }

    #[test]
    fn wigner_fourier_is_ambiguity() {
        // F W(f,g)(Jz) = A(f,g)(z) on an axis-self-dual lattice
        let grid = GridSpec::self_dual_axes(1, 64).unwrap();
        let f = hermite_function(1, grid).unwrap();
        let g = hermite_function(0, grid).unwrap();
        let w = wigner(&f, &g).unwrap();
        let a = ambiguity(&f, &g).unwrap();
        // W as a single field on the self-dual product lattice
        let prod = GridSpec::new(2, 64, grid.half_width).unwrap();
        let wfield = Field::from_values(prod, w.values.clone(), "W").unwrap();
        let what = crate::fourier::fourier(&wfield).unwrap();
        let n = 64usize;
        let mut worst = 0.0f64;
        for i in (6..n - 6).step_by(5) {
            for j in (6..n - 6).step_by(5) {
                // Jz = (xi, -x) for z = (x, xi): index (j, n - i)
                let lhs = what.at(&[j, n - i]);
                let rhs = a.at(&[i], &[j]);
                worst = worst.max((lhs - rhs).norm());
            }
        }
        assert!(worst < 1e-8, "max deviation {worst}");
    }

    #[test]
    fn mixed_norm_flavors_and_weights() {
        let grid = GridSpec::new(1, 64, 8.0).unwrap();
        let f = hermite_function(0, grid).unwrap();
        let v = gabor_transform(&f, &f).unwrap();
        // p = q makes the two flavors coincide
        let m = mixed_norm(
            &v,
            &MixedNormSpec::new(3.0, 3.0, 0.0, NormFlavor::Modulation, false).unwrap(),
        )
        .unwrap();
        let w = mixed_norm(
            &v,
            &MixedNormSpec::new(3.0, 3.0, 0.0, NormFlavor::Amalgam, false).unwrap(),
        )
        .unwrap();
        assert!((m - w).abs() < 1e-12 * m);
        // weights increase norms
        let mw = mixed_norm(
            &v,
            &MixedNormSpec::new(3.0, 3.0, 2.0, NormFlavor::Modulation, false).unwrap(),
        )
        .unwrap();
        assert!(mw > m);
        // inf exponents are finite for Schwartz inputs
        let mi = mixed_norm(
            &v,
            &MixedNormSpec::new(1.0, f64::INFINITY, 0.0, NormFlavor::Amalgam, false).unwrap(),
        )
        .unwrap();
        assert!(mi.is_finite() && mi > 0.0);
        assert!(MixedNormSpec::new(0.5, 1.0, 0.0, NormFlavor::Modulation, false).is_err());
    }

    #[test]
    fn streaming_norm_matches_materialized() {
        let grid = GridSpec::new(2, 24, 6.0).unwrap();
        let f = Field::from_fn(grid, "f", |z| {
            let r2: f64 = z.iter().map(|c| c * c).sum();
            C64::new((-r2 / 2.0).exp() * (1.0 + z[0]), 0.2 * (-r2).exp())
        });
        let g = Field::from_fn(grid, "g", |z| {
            let r2: f64 = z.iter().map(|c| c * c).sum();
            C64::new((-r2 / 4.0).exp(), 0.0)
        });
        for flavor in [NormFlavor::Modulation, NormFlavor::Amalgam] {
            for symp in [false, true] {
                for (p, q) in [(1.0, 1.0), (2.0, 1.0), (1.0, f64::INFINITY)] {
                    let spec = MixedNormSpec::new(p, q, 1.0, flavor, symp).unwrap();
                    let direct = if symp {
                        mixed_norm(&symplectic_gabor(&f, &g).unwrap(), &spec).unwrap()
                    } else {
                        mixed_norm(&gabor_transform(&f, &g).unwrap(), &spec).unwrap()
                    };
                    let streamed = gabor_mixed_norm(&f, &g, &spec).unwrap();
                    assert!(
                        (direct - streamed).abs() < 1e-10 * (1.0 + direct),
                        "({p},{q},{flavor:?},symp={symp}): {direct} vs {streamed}"
                    );
                }
            }
        }
    }

    #[test]
    fn gaussian_amalgam_scaling_exponents() {
        // ||g_lambda||_{W^{p,q}} ~ lambda^{-d/q} (1+lambda)^{d(1/q + 1/p - 1)}
        let grid = GridSpec::new(2, 64, 7.0).unwrap();
        let window = Field::from_fn(grid, "g", |z| {
            let r2: f64 = z.iter().map(|c| c * c).sum();
            C64::new((-r2).exp(), 0.0)
        });
        let d = 1.0f64;
        for (p, q) in [(1.0f64, 1.0f64), (2.0, 1.0), (1.0, 2.0)] {
            let spec = MixedNormSpec::new(p, q, 0.0, NormFlavor::Amalgam, true).unwrap();
            let norm_at = |lam: f64| {
                let g = crate::specfun::gaussian_dilated(lam, grid).unwrap();
                gabor_mixed_norm(&g, &window, &spec).unwrap()
            };
            let predict = |lam: f64| {
                lam.powf(-d / q) * (1.0 + lam).powf(d * (1.0 / q + 1.0 / p - 1.0))
            };
            let (n1, n2, n4) = (norm_at(1.0), norm_at(2.0), norm_at(4.0));
            for (na, nb, la, lb) in [(n1, n2, 1.0, 2.0), (n2, n4, 2.0, 4.0)] {
                let got = na / nb;
                let expect = predict(la) / predict(lb);
                assert!(
                    (got / expect - 1.0).abs() < 0.02,
                    "(p,q)=({p},{q}) ratio {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn modulation_inclusion_monotonicity() {
        let grid = GridSpec::new(1, 96, 9.0).unwrap();
        let f = hermite_function(3, grid).unwrap();
        let g = hermite_function(0, grid).unwrap();
        let v = gabor_transform(&f, &g).unwrap();
        // larger exponents, smaller norms (up to the lattice constant):
        // M^{1,1} -> M^{2,2} -> M^{inf,inf}
        let n11 = mixed_norm(
            &v,
            &MixedNormSpec::new(1.0, 1.0, 0.0, NormFlavor::Modulation, false).unwrap(),
        )
        .unwrap();
        let n22 = mixed_norm(
            &v,
            &MixedNormSpec::new(2.0, 2.0, 0.0, NormFlavor::Modulation, false).unwrap(),
        )
        .unwrap();
        let ninf = mixed_norm(
            &v,
            &MixedNormSpec::new(f64::INFINITY, f64::INFINITY, 0.0, NormFlavor::Modulation, false)
                .unwrap(),
        )
        .unwrap();
        assert!(n11 > n22 && n22 > ninf);
    }

    fn tuple(v: [(i64, i64); 6]) -> IndexTuple {
        IndexTuple::from_reciprocals(v.map(|(n, d)| Rat::new(n, d))).unwrap()
    }

    #[test]
    fn weyl_admissible_examples() {
        // all-ones tuple: 0 <= 0
        assert!(weyl_product_admissible(&tuple([
            (1, 1),
            (1, 1),
            (1, 1),
            (1, 1),
            (1, 1),
            (1, 1)
        ])));
        // q2 < q1 always fails: (2,1,2,4,2,2) has q2 = 2 < q1 = 4? no — pick
        // explicit reciprocals: q1 = 1 (iq1 = 1), q2 = 2 (iq2 = 1/2) is fine;
        // q2 = 2 < q1 = 4 means iq2 = 1/2 > iq1 = 1/4.
        assert!(!weyl_product_admissible(&tuple([
            (1, 2),
            (1, 1),
            (1, 2),
            (1, 4),
            (1, 2),
            (1, 2)
        ])));
        // (2,1,2,1,2,2)
        let t = tuple([(1, 2), (1, 1), (1, 2), (1, 1), (1, 2), (1, 2)]);
        assert_eq!(
            weyl_product_admissible(&t),
            weyl_product_admissible_restated(&t)
        );
    }

    #[test]
    fn weyl_admissible_full_lattice_equivalence() {
        // reciprocals of {1, 4/3, 2, 4, inf}
        let recips = [
            Rat::new(1, 1),
            Rat::new(3, 4),
            Rat::new(1, 2),
            Rat::new(1, 4),
            Rat::new(0, 1),
        ];
        let mut admissible_count = 0usize;
        let mut total = 0usize;
        for a in recips {
            for b in recips {
                for c in recips {
                    for e in recips {
                        for f in recips {
                            for g in recips {
                                let t = IndexTuple { inv: [a, b, c, e, f, g] };
                                let lhs = weyl_product_admissible(&t);
                                let rhs = weyl_product_admissible_restated(&t);
                                assert_eq!(lhs, rhs, "mismatch at {t:?}");
                                if lhs {
                                    admissible_count += 1;
                                    // q2 >= max(q0, q1) in reciprocal form
                                    assert!(g <= b && g <= e);
                                }
                                total += 1;
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(total, 15625);
        assert!(admissible_count > 0);
    }

    #[test]
    fn heat_index_examples() {
        // smoothing from M^{inf,inf} into M^{1,1} costs t^{-d}
        let (ok, e) = heat_index_constants(1, f64::INFINITY, f64::INFINITY, 1.0, f64::INFINITY, 1.0)
            .unwrap();
        assert!(ok && (e - 1.0).abs() < 1e-15);
        // equal indices: no blow-up
        let (ok, e) = heat_index_constants(3, 2.0, 4.0, 2.0, 4.0, 0.5).unwrap();
        assert!(ok && e == 0.0);
        // q2 < q1 inadmissible
        let (ok, _) = heat_index_constants(1, 2.0, 4.0, 2.0, 2.0, 1.0).unwrap();
        assert!(!ok);
        assert!(heat_index_constants(1, 0.5, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(heat_index_constants(1, 1.0, 1.0, 1.0, 1.0, 1.5).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]
        #[test]
        fn weyl_admissibility_monotone(
            idx in proptest::array::uniform6(0usize..5),
            bump in 0usize..3,
        ) {
            // enlarging q2 (shrinking 1/q2) or shrinking q0, q1 (growing
            // 1/q0, 1/q1) never flips admissible -> inadmissible
            let recips = [
                Rat::new(1, 1),
                Rat::new(3, 4),
                Rat::new(1, 2),
                Rat::new(1, 4),
                Rat::new(0, 1),
            ];
            let inv = idx.map(|i| recips[i]);
            let t = IndexTuple { inv };
            if weyl_product_admissible(&t) {
                let mut inv2 = inv;
                match bump {
                    0 => inv2[5] = Rat::new(0, 1),      // q2 -> inf
                    1 => inv2[1] = Rat::new(1, 1),      // q0 -> 1
                    _ => inv2[3] = Rat::new(1, 1),      // q1 -> 1
                }
                let relaxed = IndexTuple { inv: inv2 };
                prop_assert!(weyl_product_admissible(&relaxed));
            }
        }
    }
}
