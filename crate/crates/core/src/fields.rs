//! Sampled fields on periodic n-dimensional grids and their transforms.
//!
//! Space samples sit at `x_i = ι(i)·h` with the signed index
//! `ι(i) = i` for `i < m/2` and `i - m` otherwise, so the origin is index 0.
//! Frequency samples hold continuous-transform values
//! `f̂(ξ) ≈ ∫ f(x) e^{-2πi x·ξ} dx` at `ξ = (c + ι(k))/L`, where `c` is an
//! optional integer carrier that shifts the stored band (heterodyning).

use std::io::{Read, Write};
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::bessel::ComplexOrder;
use crate::error::{invalid, Error, Result};
use crate::multiplier::RadialSymbol;
use crate::quadrature::gauss_legendre;
use crate::scalar::{lit, Real};
use crate::special::recip_gamma;

static BUDGET: AtomicU64 = AtomicU64::new(1 << 25);

/// Largest number of samples a single field may hold.
pub fn memory_budget() -> u64 {
    BUDGET.load(Ordering::Relaxed)
}

pub fn set_memory_budget(points: u64) {
    BUDGET.store(points, Ordering::Relaxed);
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    n: usize,
    length: T,
    m: usize,
    carrier: Vec<i64>,
}

impl<T: Real> Grid<T> {
    pub fn new(n: usize, length: T, m: usize) -> Result<Self> {
        if !(2..=4).contains(&n) {
            return Err(invalid("n", format!("dimension must be 2, 3 or 4, got {n}")));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(invalid("L", format!("box side must be positive, got {length}")));
        }
        if m < 2 || !m.is_power_of_two() {
            return Err(invalid("m", format!("samples per side must be a power of two >= 2, got {m}")));
        }
        Ok(Grid {
            n,
            length,
            m,
            carrier: vec![0; n],
        })
    }

    /// Heterodyne carrier in lattice units: stored index `k` represents the
    /// frequency `(carrier + k)/L`.
    pub fn with_carrier(mut self, carrier: Vec<i64>) -> Result<Self> {
        if carrier.len() != self.n {
            return Err(invalid("carrier", "length must equal the dimension"));
        }
        self.carrier = carrier;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn length(&self) -> T {
        self.length
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn carrier(&self) -> &[i64] {
        &self.carrier
    }
    pub fn has_carrier(&self) -> bool {
        self.carrier.iter().any(|&c| c != 0)
    }
    pub fn spacing(&self) -> T {
        self.length / T::from_usize_lossy(self.m)
    }
    /// Nyquist radial frequency `m/(2L)` of the stored band.
    pub fn nyquist(&self) -> T {
        T::from_usize_lossy(self.m) / (self.length * lit(2.0))
    }
    pub fn len(&self) -> usize {
        self.m.pow(self.n as u32)
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Volume of one space cell, `h^n`.
    pub fn cell_volume(&self) -> T {
        self.spacing().powi(self.n as i32)
    }
    /// Volume of one frequency cell, `L^{-n}`.
    pub fn frequency_cell_volume(&self) -> T {
        self.length.powi(-(self.n as i32))
    }

    pub fn signed(&self, i: usize) -> i64 {
        if i < self.m / 2 {
            i as i64
        } else {
            i as i64 - self.m as i64
        }
    }

    pub fn coord(&self, i: usize) -> T {
        T::from_i64(self.signed(i)).unwrap() * self.spacing()
    }

    pub fn freq(&self, axis: usize, k: usize) -> T {
        T::from_i64(self.carrier[axis] + self.signed(k)).unwrap() / self.length
    }

    /// Flat index → per-axis indices (row-major, last axis fastest).
    pub fn unravel(&self, mut idx: usize, out: &mut [usize]) {
        for a in (0..self.n).rev() {
            out[a] = idx % self.m;
            idx /= self.m;
        }
    }

    pub fn ravel(&self, ind: &[usize]) -> usize {
        ind.iter().fold(0, |acc, &i| acc * self.m + i)
    }

    /// Same geometry, no carrier: used to compare fields across grids.
    pub fn compatible(&self, other: &Grid<T>) -> bool {
        self == other
    }

    fn check_budget(&self) -> Result<()> {
        let points = (self.m as u128).pow(self.n as u32);
        let budget = memory_budget() as u128;
        if points > budget {
            return Err(Error::Budget { points, budget });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Space,
    Frequency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledField<T> {
    grid: Grid<T>,
    values: Vec<Complex<T>>,
    side: Side,
}

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> SampledField<T> {
    pub fn zeros(grid: &Grid<T>, side: Side) -> Result<Self> {
        grid.check_budget()?;
        Ok(SampledField {
            grid: grid.clone(),
            values: vec![czero(); grid.len()],
            side,
        })
    }

    pub fn from_values(grid: &Grid<T>, values: Vec<Complex<T>>, side: Side) -> Result<Self> {
        grid.check_budget()?;
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} samples",
                values.len(),
                grid.len()
            )));
        }
        Ok(SampledField {
            grid: grid.clone(),
            values,
            side,
        })
    }

    /// Samples `f(x)` at the space grid points.
    pub fn from_space_fn<F>(grid: &Grid<T>, f: F) -> Result<Self>
    where
        F: Fn(&[T]) -> Complex<T> + Sync,
    {
        Self::tabulate(grid, Side::Space, |g, ind, x| {
            for (a, &i) in ind.iter().enumerate() {
                x[a] = g.coord(i);
            }
        }, f)
    }

    /// Samples `f̂(ξ)` at the frequency lattice (carrier included).
    pub fn from_frequency_fn<F>(grid: &Grid<T>, f: F) -> Result<Self>
    where
        F: Fn(&[T]) -> Complex<T> + Sync,
    {
        Self::tabulate(grid, Side::Frequency, |g, ind, x| {
            for (a, &i) in ind.iter().enumerate() {
                x[a] = g.freq(a, i);
            }
        }, f)
    }

    fn tabulate<P, F>(grid: &Grid<T>, side: Side, place: P, f: F) -> Result<Self>
    where
        P: Fn(&Grid<T>, &[usize], &mut [T]) + Sync,
        F: Fn(&[T]) -> Complex<T> + Sync,
    {
        grid.check_budget()?;
        let n = grid.dim();
        let mut values = vec![czero(); grid.len()];
        values.par_chunks_mut(grid.m()).enumerate().for_each(|(row, chunk)| {
            let mut ind = [0usize; 4];
            let mut x = [T::zero(); 4];
            grid.unravel(row * grid.m(), &mut ind[..n]);
            for (i, v) in chunk.iter_mut().enumerate() {
                ind[n - 1] = i;
                place(grid, &ind[..n], &mut x[..n]);
                *v = f(&x[..n]);
            }
        });
        Ok(SampledField {
            grid: grid.clone(),
            values,
            side,
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }
    pub fn side(&self) -> Side {
        self.side
    }
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    fn expect_side(&self, side: Side, what: &'static str) -> Result<()> {
        if self.side != side {
            return Err(invalid("field", format!("{what} needs a {side:?}-side field, got {:?}", self.side)));
        }
        Ok(())
    }

    pub fn to_frequency(&self) -> Result<Self> {
        match self.side {
            Side::Frequency => Ok(self.clone()),
            Side::Space => {
                let mut v = self.values.clone();
                fft_nd(&mut v, self.grid.dim(), self.grid.m(), false);
                let s = self.grid.cell_volume();
                v.par_iter_mut().for_each(|z| *z = *z * s);
                Ok(SampledField {
                    grid: self.grid.clone(),
                    values: v,
                    side: Side::Frequency,
                })
            }
        }
    }

    pub fn to_space(&self) -> Result<Self> {
        self.clone().into_space()
    }

    /// [`to_space`](Self::to_space) without the copy.
    pub fn into_space(self) -> Result<Self> {
        match self.side {
            Side::Space => Ok(self),
            Side::Frequency => {
                let mut v = self.values;
                fft_nd(&mut v, self.grid.dim(), self.grid.m(), true);
                let s = self.grid.frequency_cell_volume();
                v.par_iter_mut().for_each(|z| *z = *z * s);
                Ok(SampledField {
                    grid: self.grid.clone(),
                    values: v,
                    side: Side::Space,
                })
            }
        }
    }

    /// Riemann-sum `L^p` norm; `p = ∞` gives the maximum modulus.
    pub fn lp_norm(&self, p: T) -> Result<T> {
        if !(p >= T::one()) {
            return Err(invalid("p", format!("must be in [1, inf], got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.values.iter().map(|z| z.norm()).fold(T::zero(), T::max));
        }
        let vol = match self.side {
            Side::Space => self.grid.cell_volume(),
            Side::Frequency => self.grid.frequency_cell_volume(),
        };
        let two = lit::<T>(2.0);
        let sum: T = if p == two {
            self.values.iter().map(|z| z.norm_sqr()).sum()
        } else if p == lit(4.0) {
            self.values.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum()
        } else {
            self.values.iter().map(|z| z.norm().powf(p)).sum()
        };
        Ok((sum * vol).powf(p.recip()))
    }

    /// `‖(1+|ξ|²)^{s/2} f̂‖` transformed back and measured in `L^p`.
    pub fn sobolev_norm(&self, s: T, p: T) -> Result<T> {
        if !(p >= T::one()) {
            return Err(invalid("p", format!("must be in [1, inf], got {p}")));
        }
        if s == T::zero() {
            return self.to_space()?.lp_norm(p);
        }
        let sym = RadialSymbol::bessel_potential(s);
        let freq = self.to_frequency()?;
        freq.multiply_radial(&sym)?.to_space()?.lp_norm(p)
    }

    /// Frequency-side multiplication by `σ(|ξ|)`.
    pub fn multiply_radial(&self, sym: &RadialSymbol<T>) -> Result<Self> {
        self.expect_side(Side::Frequency, "multiply_radial")?;
        let index = RadialIndex::new(self)?;
        index.apply(self, |rho| sym.evaluate(rho))
    }

    /// Space in, space out: `∫ e^{2πi x·ξ} σ(|ξ|) f̂(ξ) dξ`.
    pub fn apply_radial_multiplier(&self, sym: &RadialSymbol<T>) -> Result<Self> {
        self.expect_side(Side::Space, "apply_radial_multiplier")?;
        self.to_frequency()?.multiply_radial(sym)?.to_space()
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T> + Sync) -> Self {
        SampledField {
            grid: self.grid.clone(),
            values: self.values.par_iter().map(|z| f(*z)).collect(),
            side: self.side,
        }
    }

    pub fn abs(&self) -> Self {
        self.map(|z| Complex::new(z.norm(), T::zero()))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.side != other.side {
            return Err(Error::GridMismatch("fields live on different grids or sides".into()));
        }
        Ok(())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T> + Sync) -> Result<Self> {
        self.check_same(other)?;
        Ok(SampledField {
            grid: self.grid.clone(),
            values: self.values.par_iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
            side: self.side,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map(|z| z * c)
    }

    /// Periodic translation by whole cells: `out(x) = f(x - offset·h)`.
    pub fn shift(&self, offset: &[i64]) -> Result<Self> {
        let n = self.grid.dim();
        if offset.len() != n {
            return Err(invalid("offset", "length must equal the dimension"));
        }
        let m = self.grid.m() as i64;
        let mut out = vec![czero(); self.values.len()];
        let mut ind = [0usize; 4];
        let mut src = [0usize; 4];
        for (idx, o) in out.iter_mut().enumerate() {
            self.grid.unravel(idx, &mut ind[..n]);
            for a in 0..n {
                src[a] = (ind[a] as i64 - offset[a]).rem_euclid(m) as usize;
            }
            *o = self.values[self.grid.ravel(&src[..n])];
        }
        Ok(SampledField {
            grid: self.grid.clone(),
            values: out,
            side: self.side,
        })
    }

    /// Index of the sample with largest modulus (first on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        let mut bv = T::neg_infinity();
        for (i, z) in self.values.iter().enumerate() {
            let v = z.norm();
            if v > bv {
                bv = v;
                best = i;
            }
        }
        best
    }

    /// Discrete centred maximal function over cubes of radius
    /// `0, 1, 2, 4, …` cells, up to a quarter of the box.
    pub fn hl_maximal(&self) -> Result<Self> {
        self.expect_side(Side::Space, "hl_maximal")?;
        let n = self.grid.dim();
        let m = self.grid.m();
        let abs: Vec<T> = self.values.iter().map(|z| z.norm()).collect();
        let mut best = abs.clone();
        let mut r = 1usize;
        while r <= m / 4 {
            let mut cur = abs.clone();
            for axis in 0..n {
                box_sum_axis(&mut cur, n, m, axis, r);
            }
            let vol = T::from_usize_lossy(2 * r + 1).powi(n as i32);
            for (b, c) in best.iter_mut().zip(&cur) {
                *b = b.max(*c / vol);
            }
            r *= 2;
        }
        Ok(SampledField {
            grid: self.grid.clone(),
            values: best.into_iter().map(|v| Complex::new(v, T::zero())).collect(),
            side: Side::Space,
        })
    }

    /// Direct quadrature of `Γ(α)^{-1} ∫_{|y|≤1} (1-|y|²)^{α-1} f(x-ty) dy`.
    ///
    /// The kernel is integrated exactly over every grid cell (tensor
    /// Gauss–Legendre, with boundary cells subdivided), then applied as a
    /// discrete periodic convolution.
    pub fn ball_average_direct(&self, alpha: ComplexOrder<T>, t: T) -> Result<Self> {
        self.expect_side(Side::Space, "ball_average_direct")?;
        if !(alpha.re > T::zero()) {
            return Err(invalid("alpha", "direct quadrature needs re alpha > 0; use the multiplier path"));
        }
        if !(t > T::zero()) || t > self.grid.length() * lit(0.25) {
            return Err(invalid("t", format!("radius must lie in (0, L/4], got {t}")));
        }
        if self.grid.has_carrier() {
            return Err(invalid("field", "direct quadrature needs a carrier-free grid"));
        }
        let kernel = ball_kernel(&self.grid, alpha, t)?;
        let fk = kernel.to_frequency()?;
        self.to_frequency()?.zip_with(&fk, |a, b| a * b)?.to_space()
    }

    /// Values along axis `axis` through the origin.
    pub fn axis_slice(&self, axis: usize) -> Result<Vec<(T, Complex<T>)>> {
        let n = self.grid.dim();
        if axis >= n {
            return Err(invalid("axis", format!("must be < {n}")));
        }
        let mut ind = [0usize; 4];
        let mut out = Vec::with_capacity(self.grid.m());
        let m = self.grid.m();
        for s in 0..m {
            // ascending coordinate order
            let i = (s + m / 2) % m;
            ind[..n].fill(0);
            ind[axis] = i;
            let pos = match self.side {
                Side::Space => self.grid.coord(i),
                Side::Frequency => self.grid.freq(axis, i),
            };
            out.push((pos, self.values[self.grid.ravel(&ind[..n])]));
        }
        Ok(out)
    }

    /// Writes an axis slice as `x,re,im,abs` CSV.
    pub fn write_slice_csv<W: Write>(&self, axis: usize, mut w: W) -> Result<()> {
        writeln!(w, "x,re,im,abs")?;
        for (x, z) in self.axis_slice(axis)? {
            writeln!(w, "{},{},{},{}", x, z.re, z.im, z.norm())?;
        }
        Ok(())
    }

    /// Flat little-endian layout: `n, L, m, side` then interleaved re/im.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        if self.grid.has_carrier() {
            return Err(invalid("field", "heterodyned fields have no snapshot layout"));
        }
        w.write_all(&(self.grid.dim() as u64).to_le_bytes())?;
        w.write_all(&self.grid.length().to_f64_lossy().to_le_bytes())?;
        w.write_all(&(self.grid.m() as u64).to_le_bytes())?;
        let side: u64 = match self.side {
            Side::Space => 0,
            Side::Frequency => 1,
        };
        w.write_all(&side.to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.values.len());
        for z in &self.values {
            buf.extend_from_slice(&z.re.to_f64_lossy().to_le_bytes());
            buf.extend_from_slice(&z.im.to_f64_lossy().to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> Result<[u8; 8]> {
            r.read_exact(&mut word).map_err(|e| Error::Format(e.to_string()))?;
            Ok(word)
        };
        let n = u64::from_le_bytes(next(&mut r)?) as usize;
        let length = f64::from_le_bytes(next(&mut r)?);
        let m = u64::from_le_bytes(next(&mut r)?) as usize;
        let side = match u64::from_le_bytes(next(&mut r)?) {
            0 => Side::Space,
            1 => Side::Frequency,
            s => return Err(Error::Format(format!("unknown side tag {s}"))),
        };
        let grid = Grid::new(n, T::lit(length), m).map_err(|e| Error::Format(e.to_string()))?;
        grid.check_budget()?;
        let mut bytes = vec![0u8; 16 * grid.len()];
        r.read_exact(&mut bytes).map_err(|e| Error::Format(format!("truncated payload: {e}")))?;
        let values = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex::new(T::lit(re), T::lit(im))
            })
            .collect();
        Ok(SampledField { grid, values, side })
    }
}

/// Precomputed `|ξ|` classes of a frequency field's occupied samples.
///
/// Symbols are evaluated once per distinct integer `|c + k|²`, which is what
/// makes quadrature-backed symbols affordable on large grids.
#[derive(Debug, Clone)]
pub struct RadialIndex<T> {
    grid: Grid<T>,
    keys: Vec<u64>,
    /// `(flat index, position in keys)` for every occupied sample.
    slots: Vec<(usize, usize)>,
}

impl<T: Real> RadialIndex<T> {
    pub fn new(freq: &SampledField<T>) -> Result<Self> {
        Self::for_support(freq.grid(), |i| freq.values()[i] != czero())
    }

    /// Index over the samples selected by `occupied`.
    pub fn for_support(grid: &Grid<T>, occupied: impl Fn(usize) -> bool) -> Result<Self> {
        let n = grid.dim();
        let m = grid.m();
        let sq: Vec<Vec<u64>> = (0..n)
            .map(|a| {
                (0..m)
                    .map(|i| {
                        let k = grid.carrier()[a] + grid.signed(i);
                        (k * k) as u64
                    })
                    .collect()
            })
            .collect();
        let mut ind = [0usize; 4];
        let mut raw: Vec<(usize, u64)> = Vec::new();
        for idx in 0..grid.len() {
            if !occupied(idx) {
                continue;
            }
            grid.unravel(idx, &mut ind[..n]);
            let key = (0..n).map(|a| sq[a][ind[a]]).sum();
            raw.push((idx, key));
        }
        let mut keys: Vec<u64> = raw.iter().map(|p| p.1).collect();
        keys.sort_unstable();
        keys.dedup();
        let slots = raw
            .into_iter()
            .map(|(idx, key)| (idx, keys.binary_search(&key).expect("key present")))
            .collect();
        Ok(RadialIndex {
            grid: grid.clone(),
            keys,
            slots,
        })
    }

    pub fn distinct_radii(&self) -> usize {
        self.keys.len()
    }

    pub fn radii(&self) -> Vec<T> {
        let l = self.grid.length();
        self.keys.iter().map(|&k| T::from_u64(k).unwrap().sqrt() / l).collect()
    }

    /// Evaluates `sym` once per distinct radius.
    pub fn tabulate(&self, sym: impl Fn(T) -> Result<Complex<T>> + Sync) -> Result<Vec<Complex<T>>> {
        let radii = self.radii();
        let vals: Vec<Complex<T>> = radii.par_iter().map(|&r| sym(r)).collect::<Result<_>>()?;
        for (v, r) in vals.iter().zip(&radii) {
            if v.re.is_nan() || v.im.is_nan() {
                return Err(Error::Numeric {
                    what: "apply_radial_multiplier",
                    reason: format!("symbol is NaN at occupied radius {r}"),
                });
            }
        }
        Ok(vals)
    }

    /// Multiplies `freq` by tabulated symbol values; unoccupied samples stay 0.
    pub fn apply_table(&self, freq: &SampledField<T>, table: &[Complex<T>]) -> Result<SampledField<T>> {
        if freq.grid() != &self.grid || freq.side() != Side::Frequency {
            return Err(Error::GridMismatch("radial index built for another grid".into()));
        }
        let mut out = vec![czero(); freq.values().len()];
        for &(idx, slot) in &self.slots {
            out[idx] = freq.values()[idx] * table[slot];
        }
        Ok(SampledField {
            grid: self.grid.clone(),
            values: out,
            side: Side::Frequency,
        })
    }

    pub fn apply(&self, freq: &SampledField<T>, sym: impl Fn(T) -> Result<Complex<T>> + Sync) -> Result<SampledField<T>> {
        let table = self.tabulate(sym)?;
        self.apply_table(freq, &table)
    }
}

/// In-place n-d DFT (unnormalized). `inverse` selects `e^{+2πi…}`.
/// Lines that are identically zero are skipped, and the axis with the
/// fewest nonzero lines goes first.
pub fn fft_nd<T: Real>(data: &mut [Complex<T>], n: usize, m: usize, inverse: bool) {
    let mut planner = FftPlanner::<T>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(m)
    } else {
        planner.plan_fft_forward(m)
    };
    let zero = czero::<T>();
    for axis in sparse_axis_order(data, n, m) {
        let stride = m.pow((n - 1 - axis) as u32);
        if stride == 1 {
            data.par_chunks_mut(m).for_each_init(
                || vec![zero; fft.get_inplace_scratch_len()],
                |scratch, line| {
                    if line.iter().any(|z| *z != zero) {
                        fft.process_with_scratch(line, scratch);
                    }
                },
            );
            continue;
        }
        const TILE: usize = 8;
        let block = m * stride;
        data.par_chunks_mut(block).for_each_init(
            || (vec![zero; TILE * m], vec![zero; fft.get_inplace_scratch_len()]),
            |(buf, scratch), blk| {
                let mut s0 = 0;
                while s0 < stride {
                    let w = TILE.min(stride - s0);
                    for i in 0..m {
                        let row = &blk[i * stride + s0..i * stride + s0 + w];
                        for (c, v) in row.iter().enumerate() {
                            buf[c * m + i] = *v;
                        }
                    }
                    let mut touched = false;
                    for c in 0..w {
                        let line = &mut buf[c * m..(c + 1) * m];
                        if line.iter().any(|z| *z != zero) {
                            fft.process_with_scratch(line, scratch);
                            touched = true;
                        }
                    }
                    if !touched {
                        s0 += w;
                        continue;
                    }
                    for i in 0..m {
                        let row = &mut blk[i * stride + s0..i * stride + s0 + w];
                        for (c, v) in row.iter_mut().enumerate() {
                            *v = buf[c * m + i];
                        }
                    }
                    s0 += w;
                }
            },
        );
    }
}

/// Axes sorted by their count of nonzero lines, ties last-axis first.
fn sparse_axis_order<T: Real>(data: &[Complex<T>], n: usize, m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).rev().collect();
    if n == 1 {
        return order;
    }
    let zero = czero::<T>();
    let lines = m.pow(n as u32 - 1);
    let mut masks = vec![vec![false; lines]; n];
    for (idx, z) in data.iter().enumerate() {
        if *z == zero {
            continue;
        }
        for (a, mask) in masks.iter_mut().enumerate() {
            let stride = m.pow((n - 1 - a) as u32);
            mask[(idx / (stride * m)) * stride + idx % stride] = true;
        }
    }
    let counts: Vec<usize> = masks.iter().map(|mk| mk.iter().filter(|b| **b).count()).collect();
    order.sort_by_key(|&a| counts[a]);
    order
}

/// Periodic moving sum of half-width `r` along one axis.
fn box_sum_axis<T: Real>(data: &mut [T], n: usize, m: usize, axis: usize, r: usize) {
    let stride = m.pow((n - 1 - axis) as u32);
    let block = m * stride;
    let mut line = vec![T::zero(); m];
    let mut prefix = vec![T::zero(); 3 * m + 1];
    for blk in data.chunks_mut(block) {
        for s in 0..stride {
            for i in 0..m {
                line[i] = blk[i * stride + s];
            }
            // prefix over three periods so every window is a single difference
            for k in 0..3 * m {
                prefix[k + 1] = prefix[k] + line[k % m];
            }
            for i in 0..m {
                let c = i + m;
                blk[i * stride + s] = prefix[c + r + 1] - prefix[c - r];
            }
        }
    }
}

const CELL_ORDER: usize = 6;
const CELL_DEPTH: u32 = 7;

/// Density field `K(y) = w_c / h^n` of the ball-average kernel on the grid.
fn ball_kernel<T: Real>(grid: &Grid<T>, alpha: ComplexOrder<T>, t: T) -> Result<SampledField<T>> {
    let n = grid.dim();
    let h = grid.spacing();
    let (gx, gw) = gauss_legendre::<T>(CELL_ORDER);
    let a1 = alpha.value() - T::one();
    let norm = recip_gamma(alpha.value()) * t.powi(-(n as i32));
    let reach = ((t / h).ceil().to_i64().unwrap()) + 1;
    let mut kernel = SampledField::zeros(grid, Side::Space)?;
    let m = grid.m() as i64;
    let mut ind = vec![-reach; n];
    let density = |z2: T| -> Complex<T> {
        let s = T::one() - z2 / (t * t);
        if s <= T::zero() {
            czero()
        } else {
            (a1 * s.ln()).exp()
        }
    };
    loop {
        let center: Vec<T> = ind.iter().map(|&i| T::from_i64(i).unwrap() * h).collect();
        let w = cell_integral(&center, h, t, &gx, &gw, &density, CELL_DEPTH);
        if w != czero() {
            let flat: Vec<usize> = ind.iter().map(|&i| i.rem_euclid(m) as usize).collect();
            let idx = grid.ravel(&flat);
            kernel.values_mut()[idx] = w * norm / grid.cell_volume();
        }
        // odometer over the cube [-reach, reach]^n
        let mut a = n;
        loop {
            if a == 0 {
                return Ok(kernel);
            }
            a -= 1;
            ind[a] += 1;
            if ind[a] <= reach {
                break;
            }
            ind[a] = -reach;
        }
    }
}

fn cell_integral<T: Real>(
    center: &[T],
    width: T,
    t: T,
    gx: &[T],
    gw: &[T],
    density: &impl Fn(T) -> Complex<T>,
    depth: u32,
) -> Complex<T> {
    let half = width * lit(0.5);
    // nearest and farthest squared distances from the origin
    let (mut near, mut far) = (T::zero(), T::zero());
    for &c in center {
        let lo = (c.abs() - half).max(T::zero());
        let hi = c.abs() + half;
        near += lo * lo;
        far += hi * hi;
    }
    let t2 = t * t;
    if near >= t2 {
        return czero();
    }
    if far > t2 && depth > 0 {
        let n = center.len();
        let q = width * lit(0.25);
        let mut acc = czero();
        let mut sub = vec![T::zero(); n];
        for corner in 0..(1usize << n) {
            for a in 0..n {
                let sgn = if corner >> a & 1 == 1 { T::one() } else { -T::one() };
                sub[a] = center[a] + sgn * q;
            }
            acc += cell_integral(&sub, half, t, gx, gw, density, depth - 1);
        }
        return acc;
    }
    // tensor Gauss–Legendre on the cell
    let n = center.len();
    let q = gx.len();
    let mut acc = czero();
    let total = q.pow(n as u32);
    for flat in 0..total {
        let mut rem = flat;
        let mut z2 = T::zero();
        let mut w = T::one();
        for &c in center.iter().take(n) {
            let k = rem % q;
            rem /= q;
            let z = c + half * gx[k];
            z2 += z * z;
            w *= gw[k] * half;
        }
        acc += density(z2) * w;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::<f64>::new(1, 1.0, 8).is_err());
        assert!(Grid::<f64>::new(5, 1.0, 8).is_err());
        assert!(Grid::<f64>::new(2, 1.0, 12).is_err());
        assert!(Grid::<f64>::new(2, -1.0, 8).is_err());
        let g = Grid::<f64>::new(2, 4.0, 16).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.nyquist(), 2.0);
        assert_eq!(g.coord(15), -0.25);
        assert_eq!(g.freq(0, 8), -2.0);
    }

    #[test]
    fn budget_is_enforced() {
        let g = Grid::<f64>::new(4, 1.0, 128).unwrap();
        assert!(matches!(SampledField::zeros(&g, Side::Space), Err(Error::Budget { .. })));
    }

    #[test]
    fn gaussian_l2_norm_and_transform() {
        let g = Grid::new(2, 8.0, 128).unwrap();
        let f = SampledField::from_space_fn(&g, |x| c((-PI * (x[0] * x[0] + x[1] * x[1])).exp())).unwrap();
        let l2 = f.lp_norm(2.0).unwrap();
        assert!((l2 - 2f64.powf(-0.5)).abs() < 1e-6 * l2);
        let freq = f.to_frequency().unwrap();
        // the Gaussian is its own transform
        let exact = SampledField::from_frequency_fn(&g, |k| c((-PI * (k[0] * k[0] + k[1] * k[1])).exp())).unwrap();
        let err = freq.sub(&exact).unwrap().lp_norm(f64::INFINITY).unwrap();
        assert!(err < 1e-12);
        let back = freq.to_space().unwrap();
        assert!(back.sub(&f).unwrap().lp_norm(f64::INFINITY).unwrap() < 1e-13);
    }

    #[test]
    fn point_mass_norm() {
        let g = Grid::new(3, 2.0, 8).unwrap();
        let mut f = SampledField::zeros(&g, Side::Space).unwrap();
        f.values_mut()[5] = c(1.0);
        let h: f64 = 0.25;
        assert!((f.lp_norm(2.0).unwrap() - h.powf(1.5)).abs() < 1e-15);
        assert_eq!(f.sobolev_norm(0.0, 2.0).unwrap(), f.lp_norm(2.0).unwrap());
        assert!(f.lp_norm(0.5).is_err());
    }

    #[test]
    fn radial_multiplier_on_pure_mode() {
        let g = Grid::new(2, 2.0, 16).unwrap();
        let k = [3.0, -2.0];
        let f = SampledField::from_space_fn(&g, |x| {
            let ph = 2.0 * PI * (k[0] * x[0] + k[1] * x[1]) / 2.0;
            Complex::new(ph.cos(), ph.sin())
        })
        .unwrap();
        let sym = RadialSymbol::closed("rho^2", 0.0, f64::INFINITY, 2.0, |r: f64| c(r * r));
        let out = f.apply_radial_multiplier(&sym).unwrap();
        let expect = f.scale(c((9.0 + 4.0) / 4.0));
        assert!(out.sub(&expect).unwrap().lp_norm(f64::INFINITY).unwrap() < 1e-12);
        let same = f.apply_radial_multiplier(&RadialSymbol::one()).unwrap();
        assert!(same.sub(&f).unwrap().lp_norm(f64::INFINITY).unwrap() < 1e-12);
    }

    #[test]
    fn nan_symbol_is_rejected() {
        let g = Grid::new(2, 1.0, 8).unwrap();
        let f = SampledField::from_space_fn(&g, |x: &[f64]| c(x[0].cos())).unwrap();
        let bad = RadialSymbol::closed("nan", 0.0, f64::INFINITY, 0.0, |_| c(f64::NAN));
        assert!(f.apply_radial_multiplier(&bad).is_err());
    }

    #[test]
    fn maximal_function_basics() {
        let g = Grid::new(2, 1.0, 32).unwrap();
        let f = SampledField::from_space_fn(&g, |_| c(2.5)).unwrap();
        let m = f.hl_maximal().unwrap();
        assert!(m.values().iter().all(|z| (z.re - 2.5).abs() < 1e-12));
        let g2 = SampledField::from_space_fn(&g, |x| c((7.0 * x[0]).sin() * x[1])).unwrap();
        let m2 = g2.hl_maximal().unwrap();
        for (a, b) in m2.values().iter().zip(g2.values()) {
            assert!(a.re >= b.norm() - 1e-15);
        }
    }

    #[test]
    fn spike_maximal_decay() {
        let g = Grid::new(2, 1.0, 256).unwrap();
        let mut f = SampledField::zeros(&g, Side::Space).unwrap();
        f.values_mut()[0] = c(1.0);
        let m = f.hl_maximal().unwrap();
        let xs: Vec<f64> = (2..7).map(|k| 2f64.powi(k)).collect();
        let ys: Vec<f64> = (2..7).map(|k| m.values()[g.ravel(&[1 << k, 0])].re).collect();
        let fit = crate::analysis::fit_loglog(&xs, &ys).unwrap();
        assert!((fit.slope + 2.0).abs() < 0.15, "{}", fit.slope);
    }

    #[test]
    fn ball_average_of_constant() {
        let g = Grid::new(2, 4.0, 64).unwrap();
        let f = SampledField::from_space_fn(&g, |_| c(1.0)).unwrap();
        for &(a, t) in &[(1.0, 0.5), (2.0, 0.3), (0.7, 0.9)] {
            let out = f.ball_average_direct(ComplexOrder::real(a).unwrap(), t).unwrap();
            let expect = PI / crate::special::gamma(c(1.0 + a)).re;
            for z in out.values() {
                assert!((z.re - expect).abs() < 2e-3 * expect, "alpha={a}: {} vs {expect}", z.re);
            }
        }
        assert!(f.ball_average_direct(ComplexOrder::real(0.0).unwrap(), 0.5).is_err());
        assert!(f.ball_average_direct(ComplexOrder::real(1.0).unwrap(), 1.5).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let g = Grid::new(2, 3.0, 8).unwrap();
        let f = SampledField::from_space_fn(&g, |x| Complex::new(x[0], x[1] * 2.0)).unwrap();
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 16 * 64);
        let back = SampledField::<f64>::read_binary(&buf[..]).unwrap();
        assert_eq!(back, f);
        assert!(SampledField::<f64>::read_binary(&buf[..40]).is_err());
        let h = Grid::new(2, 3.0, 8).unwrap().with_carrier(vec![1, 0]).unwrap();
        let fh = SampledField::zeros(&h, Side::Space).unwrap();
        assert!(fh.write_binary(Vec::new()).is_err());
    }

    #[test]
    fn f32_round_trip() {
        let g = Grid::<f32>::new(2, 4.0, 32).unwrap();
        let f = SampledField::from_space_fn(&g, |x| Complex::new((-(x[0] * x[0] + x[1] * x[1])).exp(), 0.0)).unwrap();
        let back = f.to_frequency().unwrap().to_space().unwrap();
        assert!(back.sub(&f).unwrap().lp_norm(f32::INFINITY).unwrap() < 1e-5);
    }
}
