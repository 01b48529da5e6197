//! The two counterexample families: a radial power-law profile cut to a
//! narrow cone, and an anisotropic wave packet; plus the sphere-cap Fourier
//! transform and the exponent feasibility solver behind the first.

use num_complex::Complex;
use rayon::prelude::*;

use crate::analysis::{fit_loglog, log_space, RegionScalar, SlopeFit};
use crate::bessel::ComplexOrder;
use crate::error::{invalid, Error, Result};
use crate::fields::{Grid, SampledField, Side};
use crate::multiplier::{choose_m, main_symbols, smooth_step, CutoffFamily, MainSymbols};
use crate::operators::{ScriptAFamily, ScriptPart, Spectral, TimeGrid};
use crate::quadrature::gauss_legendre;
use crate::scalar::{cis, lit, Real};

/// Angular cutoff around `axis`: 1 within chord distance `aperture/2`,
/// 0 beyond `aperture`, smooth in between.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeCutoff<T> {
    axis: Vec<T>,
    aperture: T,
}

pub const DEFAULT_APERTURE: f64 = 0.1;

impl<T: Real> ConeCutoff<T> {
    pub fn new(axis: Vec<T>, aperture: T) -> Result<Self> {
        if axis.len() < 2 {
            return Err(invalid("axis", "need at least two components"));
        }
        let norm = axis.iter().map(|a| *a * *a).sum::<T>().sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(invalid("axis", "must be a nonzero finite vector"));
        }
        if !(aperture > T::zero() && aperture <= lit(0.25)) {
            return Err(invalid("aperture", format!("must lie in (0, 1/4], got {aperture}")));
        }
        Ok(ConeCutoff {
            axis: axis.into_iter().map(|a| a / norm).collect(),
            aperture,
        })
    }

    /// Cone about `v_1 = (1, 0, …, 0)`.
    pub fn along_first_axis(n: usize, aperture: T) -> Result<Self> {
        let mut axis = vec![T::zero(); n];
        axis[0] = T::one();
        Self::new(axis, aperture)
    }

    pub fn axis(&self) -> &[T] {
        &self.axis
    }
    pub fn aperture(&self) -> T {
        self.aperture
    }
    pub fn dim(&self) -> usize {
        self.axis.len()
    }

    /// Profile as a function of chord distance to the axis.
    pub fn profile(&self, chord: T) -> T {
        let a = self.aperture;
        smooth_step((a - chord) / (a * lit(0.5)))
    }

    /// `χ(ξ)`; zero at the origin.
    pub fn eval(&self, xi: &[T]) -> T {
        let r = xi.iter().map(|v| *v * *v).sum::<T>().sqrt();
        if r == T::zero() {
            return T::zero();
        }
        let chord2 = xi
            .iter()
            .zip(&self.axis)
            .map(|(v, a)| {
                let d = *v / r - *a;
                d * d
            })
            .sum::<T>();
        self.profile(chord2.sqrt())
    }
}

/// Parameters of the radial counterexample `f̂_β = w(|ξ|) χ(ξ) (1+|ξ|²)^{-β/2}`.
#[derive(Debug, Clone)]
pub struct RadialExtremal<T> {
    pub beta: T,
    pub cone: ConeCutoff<T>,
    syms: MainSymbols<T>,
    /// `w` near the origin.
    w0: Complex<T>,
}

/// Inner blend cutoff for `w`: the switch to `1/Σ d_j (2πr)^{-j}` happens on
/// `[M/2, M]`, inside the region where `1 - φ` vanishes.
fn inner_cut<T: Real>(m: T) -> CutoffFamily<T> {
    CutoffFamily::new(m * lit(0.5)).expect("positive M")
}

/// Lower bound enforced on `|w|` over the sampled radii.
const W_FLOOR: f64 = 1e-3;

impl<T: Real> RadialExtremal<T> {
    /// `α`, `N` fix the symbols `a_1, a_2` (and hence `w`); `M` comes from
    /// the certificate.
    pub fn new(beta: T, cone: ConeCutoff<T>, alpha: ComplexOrder<T>, n_terms: usize) -> Result<Self> {
        if !(beta > T::zero()) {
            return Err(invalid("beta", format!("must be positive, got {beta}")));
        }
        let n = cone.dim();
        let cert = choose_m(alpha, n, n_terms)?;
        let syms = main_symbols(alpha, n, n_terms, cert.m)?;
        let half = cert.m * lit(0.5);
        let d_half = syms.coeffs.partial_sums(T::PI() * lit(2.0) * half).1;
        if d_half.norm() == T::zero() {
            return Err(Error::Numeric {
                what: "radial_extremal",
                reason: "d-partial sum vanishes at M/2".into(),
            });
        }
        let me = RadialExtremal {
            beta,
            cone,
            syms,
            w0: d_half.inv(),
        };
        // w must stay away from zero: the d-sum on supp(1-φ) and the blend
        let mm = cert.m;
        for k in 0..=4096 {
            let r = mm * lit(0.25) * lit::<T>(2.0).powf(T::from_usize_lossy(k) / lit(128.0));
            let w = me.w(r)?;
            if !(w.norm() >= lit(W_FLOOR)) {
                return Err(Error::Numeric {
                    what: "radial_extremal",
                    reason: format!("|w| = {} at r = {r}; the certificate for M = {mm} does not cover it", w.norm()),
                });
            }
        }
        Ok(me)
    }

    /// `α = 0`, one term: `w ≡ 1/d_0` and `a_2 w = c (1 - φ)`.
    pub fn simple(beta: T, cone: ConeCutoff<T>) -> Result<Self> {
        Self::new(beta, cone, ComplexOrder::real(T::zero())?, 1)
    }

    pub fn symbols(&self) -> &MainSymbols<T> {
        &self.syms
    }

    pub fn m(&self) -> T {
        self.syms.cutoffs.m()
    }

    pub fn w(&self, r: T) -> Result<Complex<T>> {
        let blend = inner_cut(self.m()).phi_at(r);
        if blend == T::one() {
            return Ok(self.w0);
        }
        let d = self.syms.coeffs.partial_sums(T::PI() * lit(2.0) * r).1;
        if d.norm() == T::zero() {
            return Err(Error::Numeric {
                what: "radial_extremal",
                reason: format!("d-partial sum has a zero at r = {r}"),
            });
        }
        Ok(self.w0 * blend + d.inv() * (T::one() - blend))
    }

    /// `f̂_β(ξ)`.
    pub fn fhat(&self, xi: &[T]) -> Result<Complex<T>> {
        let chi = self.cone.eval(xi);
        if chi == T::zero() {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        let r2 = xi.iter().map(|v| *v * *v).sum::<T>();
        let gamma = (T::one() + r2).powf(-self.beta * lit(0.5));
        Ok(self.w(r2.sqrt())? * (chi * gamma))
    }
}

/// Radial taper that keeps band-limited constructions clear of the Nyquist
/// corner: `φ` at scale `TAPER_FRACTION · m/(2L)`, so zero beyond twice that.
pub const TAPER_FRACTION: f64 = 0.45;

/// Samples `f̂_β`, tapered by `φ(|ξ|; 0.45 R_Nyq)`, and returns the space field.
pub fn radial_extremal<T: Real>(ext: &RadialExtremal<T>, grid: &Grid<T>) -> Result<SampledField<T>> {
    if grid.dim() != ext.cone.dim() {
        return Err(Error::GridMismatch("cone and grid dimensions differ".into()));
    }
    if grid.has_carrier() {
        return Err(invalid("grid", "radial extremal lives on a carrier-free grid"));
    }
    // the w blend on [M/2, M] must be resolved by the lattice
    if T::one() / grid.length() > ext.m() * lit(0.125) {
        return Err(Error::Resolution(format!(
            "frequency spacing 1/L = {} does not resolve the w transition of width {}",
            T::one() / grid.length(),
            ext.m() * lit(0.5)
        )));
    }
    let taper = CutoffFamily::new(grid.nyquist() * lit(TAPER_FRACTION))?;
    let err = std::sync::Mutex::new(None);
    let pk = SampledField::from_frequency_fn(grid, |xi| {
        let r = xi.iter().map(|v| *v * *v).sum::<T>().sqrt();
        match ext.fhat(xi) {
            Ok(v) => v * taper.phi_at(r),
            Err(e) => {
                *err.lock().unwrap() = Some(e);
                Complex::new(T::zero(), T::zero())
            }
        }
    })?;
    if let Some(e) = err.into_inner().unwrap() {
        return Err(e);
    }
    pk.to_space()
}

/// Which side of the unit sphere the probe walks on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    /// `x_1 = 1 + ε`.
    Outside,
    /// `x_1 = 1 - ε`.
    Inside,
}

#[derive(Debug, Clone)]
pub struct ProbeConfig<T> {
    pub length: T,
    pub m: usize,
    pub approach: Approach,
    pub part: ScriptPart,
    /// Number of log-spaced `ε` samples between `8h` and `eps_max`.
    pub samples: usize,
    pub eps_max: T,
    /// Stability demanded of the fitted slope when the collar is halved.
    pub stability: T,
}

impl<T: Real> ProbeConfig<T> {
    pub fn new(length: T, m: usize) -> Self {
        ProbeConfig {
            length,
            m,
            approach: Approach::Outside,
            part: ScriptPart::A2,
            samples: 25,
            eps_max: lit(0.2),
            stability: lit(0.05),
        }
    }
}

/// Smallest collar distance in grid cells.
pub const COLLAR_MIN_CELLS: f64 = 8.0;

#[derive(Debug, Clone)]
pub struct ProbeReport<T> {
    pub eps: Vec<T>,
    pub values: Vec<T>,
    /// Fit over the selected collar `[8h, eps_hi]`.
    pub fit: SlopeFit<T>,
    pub collar: (T, T),
    /// Slope on the halved collar.
    pub halved_slope: T,
    /// Whether the selected collar met the stability requirement.
    pub stable: bool,
    pub spacing: T,
}

/// `|𝒜_1 f_β|` along the first axis near `|x| = 1`, with the log–log slope
/// against `||x| - 1|`.
///
/// Only the row `x' = 0` is needed, so the transverse frequency sum is done
/// first (a projection-slice), then the row is evaluated directly at the
/// requested `x_1`. This reaches lattice sizes a full field cannot.
pub fn blowup_probe<T: Real>(ext: &RadialExtremal<T>, cfg: &ProbeConfig<T>) -> Result<ProbeReport<T>> {
    let grid = Grid::new(ext.cone.dim(), cfg.length, cfg.m)?;
    let h = grid.spacing();
    let eps_lo = h * lit(COLLAR_MIN_CELLS);
    if !(cfg.eps_max > eps_lo * lit(4.0)) {
        return Err(Error::Resolution(format!(
            "collar up to {} spans fewer than {} cells of size {h}",
            cfg.eps_max,
            4.0 * COLLAR_MIN_CELLS
        )));
    }
    let row = axis_row_spectrum(ext, &grid, cfg.part)?;
    let eps = log_space(eps_lo, cfg.eps_max, cfg.samples.max(6));
    let sign = match cfg.approach {
        Approach::Outside => T::one(),
        Approach::Inside => -T::one(),
    };
    let values: Vec<T> = eps
        .par_iter()
        .map(|&e| eval_row(&row, grid.length(), T::one() + sign * e).norm())
        .collect();
    select_collar(eps, values, cfg.stability, h)
}

/// Widest collar `[8h, ε_k]` whose slope moves by at most `stability` when
/// the collar is halved.
fn select_collar<T: Real>(eps: Vec<T>, values: Vec<T>, stability: T, h: T) -> Result<ProbeReport<T>> {
    let fit_upto = |hi: T| -> Option<SlopeFit<T>> {
        let (xs, ys): (Vec<T>, Vec<T>) = eps.iter().zip(&values).filter(|(e, _)| **e <= hi * lit(1.000001)).map(|(e, v)| (*e, *v)).unzip();
        if xs.len() < 3 {
            return None;
        }
        fit_loglog(&xs, &ys).ok()
    };
    let mut best: Option<(T, SlopeFit<T>, T)> = None;
    let mut fallback: Option<(T, SlopeFit<T>, T)> = None;
    for &hi in eps.iter().rev() {
        let (Some(full), Some(half)) = (fit_upto(hi), fit_upto(hi * lit(0.5))) else {
            continue;
        };
        if (full.slope - half.slope).abs() <= stability {
            best = Some((hi, full, half.slope));
            break;
        }
        if fallback.is_none() {
            fallback = Some((hi, full, half.slope));
        }
    }
    let stable = best.is_some();
    let (hi, fit, halved) = best.or(fallback).ok_or_else(|| Error::Resolution("too few collar samples to fit".into()))?;
    Ok(ProbeReport {
        collar: (eps[0], hi),
        eps,
        values,
        fit,
        halved_slope: halved,
        stable,
        spacing: h,
    })
}

/// `G(k_1) = L^{-(n-1)} Σ_{k'} σ(ξ) f̂(ξ) τ(|ξ|)` for `k_1 ≥ 0`, where `σ` is the
/// requested part of the `t = 1` symbol and `τ` the Nyquist taper.
fn axis_row_spectrum<T: Real>(ext: &RadialExtremal<T>, grid: &Grid<T>, part: ScriptPart) -> Result<Vec<(T, Complex<T>)>> {
    let n = grid.dim();
    let l = grid.length();
    let half_m = grid.m() as i64 / 2;
    let taper = CutoffFamily::new(grid.nyquist() * lit(TAPER_FRACTION))?;
    let fam = ScriptAFamily {
        syms: ext.syms.clone(),
        part,
    };
    // the cone about v_1 confines |ξ'| ≤ aperture·|ξ| (chord ≥ sine of the angle)
    let reach = |k1: i64| -> i64 { ((T::from_i64(k1).unwrap() * ext.cone.aperture() * lit(1.01)).ceil()).to_i64().unwrap() + 1 };
    if ext.cone.axis()[0] != T::one() {
        return Err(invalid("cone", "the axis probe needs the cone about v_1"));
    }
    use crate::operators::Family;
    let rows: Vec<Result<(T, Complex<T>)>> = (1..half_m)
        .into_par_iter()
        .map(|k1| {
            let xi1 = T::from_i64(k1).unwrap() / l;
            let kmax = reach(k1).min(half_m - 1);
            let mut acc = Complex::new(T::zero(), T::zero());
            let mut idx = vec![-kmax; n - 1];
            let mut xi = vec![T::zero(); n];
            xi[0] = xi1;
            loop {
                // transverse symmetry: only the first transverse index ≥ 0, doubled when > 0
                if idx[0] >= 0 {
                    for (a, &k) in idx.iter().enumerate() {
                        xi[a + 1] = T::from_i64(k).unwrap() / l;
                    }
                    let f = ext.fhat(&xi)?;
                    if f != Complex::new(T::zero(), T::zero()) {
                        let r = xi.iter().map(|v| *v * *v).sum::<T>().sqrt();
                        let tap = taper.phi_at(r);
                        if tap != T::zero() {
                            let weight = if idx[0] > 0 { lit(2.0) } else { T::one() };
                            acc += fam.symbol(T::one(), r)? * f * (tap * weight);
                        }
                    }
                }
                let mut a = n - 1;
                loop {
                    if a == 0 {
                        return Ok((xi1, acc * l.powi(-(n as i32 - 1))));
                    }
                    a -= 1;
                    idx[a] += 1;
                    if idx[a] <= kmax {
                        break;
                    }
                    idx[a] = -kmax;
                }
            }
        })
        .collect();
    rows.into_iter().collect()
}

/// `u(x_1, 0) = L^{-1} Σ_{k_1} G(k_1) e^{2πi x_1 ξ_1}`.
fn eval_row<T: Real>(row: &[(T, Complex<T>)], l: T, x1: T) -> Complex<T> {
    let two_pi = T::PI() * lit(2.0);
    let mut acc = Complex::new(T::zero(), T::zero());
    for (xi1, g) in row {
        let p = x1 * *xi1;
        let frac = p - p.round();
        acc += *g * cis(two_pi * frac);
    }
    acc / l
}

/// The slab of frequencies a packet occupies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Packet<T> {
    pub j: u32,
    pub delta: T,
    pub n: usize,
}

pub const DEFAULT_DELTA: f64 = 0.1;

impl<T: Real> Packet<T> {
    pub fn new(j: u32, delta: T, n: usize) -> Result<Self> {
        if j < 1 || j > 24 {
            return Err(invalid("j", format!("scale index must lie in [1, 24], got {j}")));
        }
        if !(delta > T::zero() && delta <= T::one()) {
            return Err(invalid("delta", format!("must lie in (0, 1], got {delta}")));
        }
        if !(2..=4).contains(&n) {
            return Err(invalid("n", format!("dimension must be 2, 3 or 4, got {n}")));
        }
        Ok(Packet { j, delta, n })
    }

    pub fn centre(&self) -> T {
        lit::<T>(2.0).powi(self.j as i32)
    }
    /// Half-width in `ξ_1` of the set the cutoff equals 1 on.
    pub fn long_half_width(&self) -> T {
        self.delta * lit::<T>(2.0).powi(self.j as i32 - 1)
    }
    /// Radius in `ξ'` of the set the cutoff equals 1 on.
    pub fn cross_radius(&self) -> T {
        self.delta * lit::<T>(2.0).powf(T::from_u32(self.j).unwrap() * lit(0.5))
    }

    /// The cutoff: 1 on the slab, 0 outside its double.
    pub fn fhat(&self, xi: &[T]) -> T {
        let u = (xi[0] - self.centre()) / self.long_half_width();
        let cross = xi[1..].iter().map(|v| *v * *v).sum::<T>().sqrt() / self.cross_radius();
        smooth_step(lit::<T>(2.0) - u.abs()) * smooth_step(lit::<T>(2.0) - cross)
    }

    /// Heterodyned grid of side `length` that holds the support with margin,
    /// with at least 8 samples across the lower-bound slab `|x'| ≤ 2^{-j/2}`
    /// and at least `min_m` per axis.
    pub fn grid(&self, length: T, min_m: usize) -> Result<Grid<T>> {
        let band = self.long_half_width() * lit(2.0);
        let cross = self.cross_radius() * lit(2.0);
        let need = (band.max(cross) * length * lit(2.0) * lit(1.05)).ceil().to_usize().unwrap_or(usize::MAX);
        let slab_cells = (length * lit(4.0) / lit::<T>(2.0).powf(-T::from_u32(self.j).unwrap() * lit(0.5)))
            .ceil()
            .to_usize()
            .unwrap_or(usize::MAX);
        let m = need.max(slab_cells).max(min_m).next_power_of_two();
        let carrier_f = self.centre() * length;
        if carrier_f.fract() != T::zero() {
            return Err(invalid("length", "2^j·L must be an integer so the carrier sits on the lattice"));
        }
        let mut carrier = vec![0i64; self.n];
        carrier[0] = carrier_f.to_i64().unwrap();
        Grid::new(self.n, length, m)?.with_carrier(carrier)
    }
}

/// Samples the packet's cutoff on `grid` and returns the space field.
pub fn wave_packet<T: Real>(pk: &Packet<T>, grid: &Grid<T>) -> Result<SampledField<T>> {
    packet_spectrum(pk, grid)?.to_space()
}

/// The packet in frequency form, exactly zero off its support.
pub fn packet_spectrum<T: Real>(pk: &Packet<T>, grid: &Grid<T>) -> Result<SampledField<T>> {
    if grid.dim() != pk.n {
        return Err(Error::GridMismatch("packet and grid dimensions differ".into()));
    }
    // support relative to the stored band centre must clear Nyquist
    let c1 = T::from_i64(grid.carrier()[0]).unwrap() / grid.length();
    let reach1 = (pk.centre() - c1).abs() + pk.long_half_width() * lit(2.0);
    let reach_cross = pk.cross_radius() * lit(2.0);
    let others_zero = grid.carrier()[1..].iter().all(|&c| c == 0);
    if !(reach1 < grid.nyquist() && reach_cross < grid.nyquist() && others_zero) {
        return Err(invalid(
            "grid",
            format!(
                "packet support reaches {} from the band centre, Nyquist is {}",
                reach1.max(reach_cross),
                grid.nyquist()
            ),
        ));
    }
    SampledField::from_frequency_fn(grid, |xi| Complex::new(pk.fhat(xi), T::zero()))
}

/// `max (|ξ| - ξ_1)` over the packet's support, for comparison with `δ²`.
pub fn packet_phase_defect<T: Real>(pk: &Packet<T>, grid: &Grid<T>) -> Result<T> {
    let f = SampledField::from_frequency_fn(grid, |xi| {
        if pk.fhat(xi) > T::zero() {
            let r = xi.iter().map(|v| *v * *v).sum::<T>().sqrt();
            Complex::new(r - xi[0], T::zero())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    })?;
    Ok(f.values().iter().map(|z| z.re).fold(T::zero(), T::max))
}

/// t-grid for a packet: spacing at most `1/(4δ2^j)`, never fewer than 64.
pub fn packet_time_grid<T: Real>(pk: &Packet<T>) -> Result<TimeGrid<T>> {
    let k = (pk.delta * pk.centre() * lit(4.0)).ceil().to_usize().unwrap() + 1;
    TimeGrid::new(T::one(), lit(2.0), k.max(64))
}

#[derive(Debug, Clone)]
pub struct PacketReport<T> {
    pub j: u32,
    /// `min` over the slab `1 ≤ x_1 ≤ 2, |x'| ≤ 2^{-j/2}` of `sup_t |𝒜_t f|`.
    pub on_slab_min: T,
    /// `max` over the same slab of `sup_t` of the `a_1` term alone.
    pub a1_on_slab_max: T,
    /// `max` over the slab of `sup_t` of the `a_2` term alone.
    pub a2_on_slab_max: T,
    /// `‖sup_t |𝒜_t f|‖_{L^p}` over the whole box.
    pub sup_norm: T,
    pub p: T,
    pub slab_points: usize,
    pub t_samples: usize,
    /// Set when the t-grid is coarser than `1/(4δ2^j)`.
    pub under_resolved: bool,
}

impl<T: Real> PacketReport<T> {
    pub fn a1_ratio(&self) -> T {
        self.a1_on_slab_max / self.a2_on_slab_max
    }
}

/// Evaluates `sup_t |𝒜_t f|` for the packet and splits it on the slab.
/// Pass `f` in frequency form (see [`packet_spectrum`]): a round trip through
/// space fills the lattice with round-off and every frame turns dense.
pub fn packet_lower_bound<T: Real>(
    pk: &Packet<T>,
    f: &SampledField<T>,
    syms: &MainSymbols<T>,
    tg: &TimeGrid<T>,
    p: T,
) -> Result<PacketReport<T>> {
    let grid = f.grid().clone();
    let resolution = T::one() / (pk.delta * pk.centre() * lit(4.0));
    let under_resolved = tg.spacing() > resolution * lit(1.000001);
    let sp = Spectral::new(f)?;
    let a1 = ScriptAFamily { syms: syms.clone(), part: ScriptPart::A1 };
    let a2 = ScriptAFamily { syms: syms.clone(), part: ScriptPart::A2 };
    // one inverse transform per part and time; the full operator is their sum
    let len = grid.len();
    let (mut sup_both, mut sup_a1, mut sup_a2) = (vec![T::zero(); len], vec![T::zero(); len], vec![T::zero(); len]);
    for &t in tg.samples() {
        let u1 = sp.frame(&a1, t)?;
        let u2 = sp.frame(&a2, t)?;
        // squared moduli until the end
        for (i, (z1, z2)) in u1.values().iter().zip(u2.values()).enumerate() {
            sup_a1[i] = sup_a1[i].max(z1.norm_sqr());
            sup_a2[i] = sup_a2[i].max(z2.norm_sqr());
            sup_both[i] = sup_both[i].max((*z1 + *z2).norm_sqr());
        }
    }
    for v in sup_a1.iter_mut().chain(sup_a2.iter_mut()).chain(sup_both.iter_mut()) {
        *v = v.sqrt();
    }
    let sup_field = SampledField::from_values(
        &grid,
        sup_both.iter().map(|v| Complex::new(*v, T::zero())).collect(),
        Side::Space,
    )?;
    let n = grid.dim();
    let cross = lit::<T>(2.0).powf(-T::from_u32(pk.j).unwrap() * lit(0.5));
    let mut ind = [0usize; 4];
    let mut on_min = T::infinity();
    let (mut a1_max, mut a2_max) = (T::zero(), T::zero());
    let mut count = 0;
    for idx in 0..grid.len() {
        grid.unravel(idx, &mut ind[..n]);
        let x1 = grid.coord(ind[0]);
        if x1 < T::one() || x1 > lit(2.0) {
            continue;
        }
        let r2 = (1..n).map(|a| grid.coord(ind[a]).powi(2)).sum::<T>();
        if r2 > cross * cross {
            continue;
        }
        count += 1;
        on_min = on_min.min(sup_both[idx]);
        a1_max = a1_max.max(sup_a1[idx]);
        a2_max = a2_max.max(sup_a2[idx]);
    }
    if count == 0 {
        return Err(Error::Resolution("no grid point falls in the lower-bound slab".into()));
    }
    Ok(PacketReport {
        j: pk.j,
        on_slab_min: on_min,
        a1_on_slab_max: a1_max,
        a2_on_slab_max: a2_max,
        sup_norm: sup_field.lp_norm(p)?,
        p,
        slab_points: count,
        t_samples: tg.len(),
        under_resolved,
    })
}

/// Oscillation budget of [`sphere_cap_ft`] in units of `|x|`.
pub const CAP_MAX_RADIUS: f64 = 1e5;

/// `∫_{S^{n-1}} e^{-2πi x·θ} χ(θ) dσ(θ)` for `n ∈ {2, 3}`.
///
/// n = 2: trapezoid rule in the angle (the integrand is smooth and
/// compactly supported in the cap). n = 3: composite Gauss–Legendre in the
/// polar angle about the axis times the trapezoid rule in azimuth.
pub fn sphere_cap_ft<T: Real>(cone: &ConeCutoff<T>, x: &[T]) -> Result<Complex<T>> {
    let n = cone.dim();
    if x.len() != n {
        return Err(invalid("x", "dimension differs from the cone"));
    }
    let r = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
    if !(r >= T::one()) {
        return Err(invalid("x", format!("need |x| >= 1, got {r}")));
    }
    if r > lit(CAP_MAX_RADIUS) {
        return Err(Error::Numeric {
            what: "sphere_cap_ft",
            reason: format!("|x| = {r} exceeds the oscillation budget {CAP_MAX_RADIUS}"),
        });
    }
    // cap half-angle: chord `aperture` ↔ angle 2 asin(aperture/2)
    let gmax = (cone.aperture() * lit(0.5)).asin() * lit(2.0);
    let two_pi = T::PI() * lit(2.0);
    // frame: e1 = axis, e2.. completing an orthonormal basis
    let basis = orthonormal_frame(cone.axis());
    let comps: Vec<T> = basis.iter().map(|b| b.iter().zip(x).map(|(u, v)| *u * *v).sum()).collect();
    let chord = |g: T| (g * lit(0.5)).sin() * lit(2.0);
    match n {
        2 => {
            let k = (r * gmax * lit(8.0)).ceil().to_usize().unwrap().max(256);
            let h = gmax * lit(2.0) / T::from_usize_lossy(k);
            let mut acc = Complex::new(T::zero(), T::zero());
            for i in 0..k {
                let g = -gmax + h * T::from_usize_lossy(i);
                let w = cone.profile(chord(g.abs()));
                if w == T::zero() {
                    continue;
                }
                let dot = comps[0] * g.cos() + comps[1] * g.sin();
                acc += cis(-two_pi * dot) * (w * h);
            }
            Ok(acc)
        }
        3 => {
            let osc = (r * gmax).ceil().to_usize().unwrap();
            let panels = (2 * osc).max(8);
            let (gx, gw) = gauss_legendre::<T>(16);
            let naz = (r * gmax * lit(8.0)).ceil().to_usize().unwrap().max(64);
            let dphi = two_pi / T::from_usize_lossy(naz);
            let width = gmax / T::from_usize_lossy(panels);
            let mut acc = Complex::new(T::zero(), T::zero());
            for q in 0..panels {
                let c = width * (T::from_usize_lossy(q) + lit(0.5));
                for (u, wq) in gx.iter().zip(&gw) {
                    let g = c + width * lit(0.5) * *u;
                    let w = cone.profile(chord(g));
                    if w == T::zero() {
                        continue;
                    }
                    let (sg, cg) = g.sin_cos();
                    let mut ring = Complex::new(T::zero(), T::zero());
                    for k in 0..naz {
                        let ph = dphi * T::from_usize_lossy(k);
                        let dot = comps[0] * cg + sg * (comps[1] * ph.cos() + comps[2] * ph.sin());
                        ring += cis(-two_pi * dot);
                    }
                    acc += ring * (dphi * w * sg * *wq * width * lit(0.5));
                }
            }
            Ok(acc)
        }
        _ => Err(invalid("n", "sphere-cap quadrature covers n = 2 and n = 3")),
    }
}

fn orthonormal_frame<T: Real>(axis: &[T]) -> Vec<Vec<T>> {
    let n = axis.len();
    let mut basis = vec![axis.to_vec()];
    for e in 0..n {
        let mut v = vec![T::zero(); n];
        v[e] = T::one();
        for b in &basis {
            let d: T = b.iter().zip(&v).map(|(p, q)| *p * *q).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= d * *bi;
            }
        }
        let norm = v.iter().map(|a| *a * *a).sum::<T>().sqrt();
        if norm > lit(1e-6) {
            basis.push(v.into_iter().map(|a| a / norm).collect());
        }
        if basis.len() == n {
            break;
        }
    }
    basis
}

/// Feasible `β` interval for the four exponent constraints, as
/// `(lower, upper, upper_inclusive)`, or `None`.
pub fn feasible_interval<S: RegionScalar>(p: S, n: i64, s: S) -> Option<(S, S, bool)> {
    let one = S::int(1);
    let nn = S::int(n);
    let half_np1 = S::ratio(n + 1, 2);
    // strict lower bounds: β > s, β > s + n - n/p
    let lo1 = s.clone();
    let lo2 = s.clone() + nn.clone() - nn.clone() / p.clone();
    let lower = if lo1 >= lo2 { lo1 } else { lo2 };
    // upper bounds: β < s + n, β < (n+1)/2 (strict), β ≤ (n+1)/2 - 1/p
    let caps = [
        (s + nn, false),
        (half_np1.clone(), false),
        (half_np1 - one / p, true),
    ];
    let mut upper = caps[0].clone();
    for c in caps.iter().skip(1) {
        if c.0 < upper.0 || (c.0 == upper.0 && !c.1) {
            upper = c.clone();
        }
    }
    let ok = if upper.1 { lower < upper.0 } else { lower < upper.0 };
    ok.then_some((lower, upper.0, upper.1))
}

/// The centre of the feasible `β` interval (maximal distance to the nearest
/// bound), or `None` when the system has no solution.
pub fn feasible_beta<S: RegionScalar>(p: S, n: i64, s: S) -> Option<S> {
    if n < 2 || p <= S::int(1) {
        return None;
    }
    feasible_interval(p, n, s).map(|(lo, hi, _)| (lo + hi) / S::int(2))
}

/// Re-checks the four constraints at `β`.
pub fn admits_blowup<S: RegionScalar>(beta: &S, p: &S, n: i64, s: &S) -> bool {
    let nn = S::int(n);
    let d = beta.clone() - s.clone();
    let c1 = d > S::int(0) && d < nn;
    let c2 = (d.clone() - nn.clone()) * p.clone() > S::int(0) - nn.clone();
    let c3 = S::ratio(n - 1, 2) - beta.clone() > S::int(-1);
    let c4 = (beta.clone() - S::ratio(n + 1, 2)) * p.clone() <= S::int(-1);
    c1 && c2 && c3 && c4
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn cone_is_homogeneous_and_supported() {
        let c = ConeCutoff::along_first_axis(2, 0.1).unwrap();
        assert_eq!(c.eval(&[3.0, 0.0]), 1.0);
        assert_eq!(c.eval(&[3.0, 0.01]), c.eval(&[300.0, 1.0]));
        assert_eq!(c.eval(&[1.0, 0.2]), 0.0);
        assert_eq!(c.eval(&[-1.0, 0.0]), 0.0);
        assert!(ConeCutoff::along_first_axis(2, 0.3).is_err());
    }

    #[test]
    fn simple_extremal_w_is_constant() {
        let cone = ConeCutoff::along_first_axis(2, 0.1).unwrap();
        let ext = RadialExtremal::simple(1.2, cone).unwrap();
        let w0 = ext.w(0.0).unwrap();
        for &r in &[0.1, 0.7, 1.5, 10.0, 1e4] {
            assert!((ext.w(r).unwrap() - w0).norm() < 1e-14);
        }
        // a_2 w = c (1 - φ)
        let syms = ext.symbols();
        for &r in &[1.2, 3.0, 50.0] {
            let v = syms.a2_at(r) * ext.w(r).unwrap();
            let expect = syms.c * (1.0 - syms.cutoffs.phi_at(r));
            assert!((v - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn feasibility_examples() {
        let r = |a, b| Rational64::new(a, b);
        let beta = feasible_beta(r(4, 3), 2, r(0, 1)).unwrap();
        assert!(admits_blowup(&beta, &r(4, 3), 2, &r(0, 1)));
        assert!(feasible_beta(r(4, 1), 2, r(0, 1)).is_none());
        let beta = feasible_beta(r(2, 1), 2, r(-1, 10)).unwrap();
        assert!(admits_blowup(&beta, &r(2, 1), 2, &r(-1, 10)));
        // at the threshold exactly the system is empty
        assert!(feasible_beta(r(2, 1), 2, r(0, 1)).is_none());
    }

    #[test]
    fn packet_grid_and_nyquist() {
        let pk = Packet::new(6, 0.1f64, 2).unwrap();
        let g = pk.grid(8.0, 64).unwrap();
        assert_eq!(g.carrier(), &[512, 0]);
        assert!(wave_packet(&pk, &g).is_ok());
        let plain = Grid::new(2, 8.0, 256).unwrap();
        assert!(wave_packet(&pk, &plain).is_err());
    }

    #[test]
    fn packet_is_nonnegative_and_flat() {
        let pk = Packet::new(5, 0.1f64, 2).unwrap();
        let g = pk.grid(8.0, 64).unwrap();
        let f = wave_packet(&pk, &g).unwrap().to_frequency().unwrap();
        assert!(f.values().iter().all(|z| z.re > -1e-12 && z.im.abs() < 1e-12));
        assert_eq!(pk.fhat(&[32.0, 0.0]), 1.0);
        assert_eq!(pk.fhat(&[32.0 + 3.3, 0.0]), 0.0);
    }
}
