//! Spherical means, half-wave propagators, their Littlewood–Paley pieces and
//! time-suprema, all realized as radial multipliers on sampled fields.

use num_complex::Complex;

use crate::bessel::ComplexOrder;
use crate::error::{invalid, Error, Result};
use crate::fields::{RadialIndex, SampledField, Side};
use crate::multiplier::{BesselPolicy, CutoffFamily, MHat, MainSymbols};
use crate::scalar::{cis, lit, Real};

/// Sorted sample times covering `[t_lo, t_hi]`, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    t_lo: T,
    t_hi: T,
    samples: Vec<T>,
}

impl<T: Real> TimeGrid<T> {
    /// `k` equispaced samples.
    pub fn new(t_lo: T, t_hi: T, k: usize) -> Result<Self> {
        if !(t_lo > T::zero()) || !(t_hi > t_lo) || !t_hi.is_finite() {
            return Err(invalid("TimeGrid", format!("need 0 < t_lo < t_hi, got [{t_lo}, {t_hi}]")));
        }
        if k < 2 {
            return Err(invalid("K", format!("need at least 2 samples, got {k}")));
        }
        let step = (t_hi - t_lo) / T::from_usize_lossy(k - 1);
        let mut samples: Vec<T> = (0..k).map(|i| t_lo + step * T::from_usize_lossy(i)).collect();
        samples[k - 1] = t_hi;
        Ok(TimeGrid { t_lo, t_hi, samples })
    }

    /// A degenerate grid holding one time.
    pub fn single(t: T) -> Result<Self> {
        if !(t > T::zero()) {
            return Err(invalid("t", format!("must be positive, got {t}")));
        }
        Ok(TimeGrid {
            t_lo: t,
            t_hi: t,
            samples: vec![t],
        })
    }

    /// Midpoint insertion: the old samples are a subset of the new ones.
    pub fn refined(&self) -> Self {
        let mut samples = Vec::with_capacity(2 * self.samples.len());
        for w in self.samples.windows(2) {
            samples.push(w[0]);
            samples.push((w[0] + w[1]) * lit(0.5));
        }
        samples.push(*self.samples.last().unwrap());
        TimeGrid {
            t_lo: self.t_lo,
            t_hi: self.t_hi,
            samples,
        }
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }
    pub fn len(&self) -> usize {
        self.samples.len()
    }
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
    pub fn bounds(&self) -> (T, T) {
        (self.t_lo, self.t_hi)
    }
    /// Largest gap between consecutive samples.
    pub fn spacing(&self) -> T {
        self.samples.windows(2).map(|w| w[1] - w[0]).fold(T::zero(), T::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

/// A one-parameter multiplier family `σ(t, ρ)` with its exact `∂_t σ`.
pub trait Family<T: Real>: Sync {
    fn symbol(&self, t: T, rho: T) -> Result<Complex<T>>;
    fn dt_symbol(&self, t: T, rho: T) -> Result<Complex<T>>;
}

/// `m̂_α(tρ)`; the derivative uses `m̂_α'(r) = -2π² r m̂_{α+1}(r)`.
#[derive(Debug, Clone)]
pub struct MeanFamily<T> {
    mhat: MHat<T>,
    next: MHat<T>,
}

impl<T: Real> MeanFamily<T> {
    pub fn new(alpha: ComplexOrder<T>, n: usize) -> Result<Self> {
        let up = ComplexOrder::new(alpha.re + T::one(), alpha.im)?;
        Ok(MeanFamily {
            mhat: MHat::new(alpha, n, BesselPolicy::Hybrid)?,
            next: MHat::new(up, n, BesselPolicy::Hybrid)?,
        })
    }

    pub fn mhat(&self) -> &MHat<T> {
        &self.mhat
    }
}

impl<T: Real> Family<T> for MeanFamily<T> {
    fn symbol(&self, t: T, rho: T) -> Result<Complex<T>> {
        self.mhat.eval(t * rho)
    }
    fn dt_symbol(&self, t: T, rho: T) -> Result<Complex<T>> {
        let r = t * rho;
        let k = -T::PI() * T::PI() * lit(2.0) * r * rho;
        Ok(self.next.eval(r)? * k)
    }
}

/// `e^{±2πitρ}`.
#[derive(Debug, Clone, Copy)]
pub struct HalfWaveFamily {
    pub sign: Sign,
}

impl<T: Real> Family<T> for HalfWaveFamily {
    fn symbol(&self, t: T, rho: T) -> Result<Complex<T>> {
        Ok(cis(self.sign.value::<T>() * T::PI() * lit(2.0) * t * rho))
    }
    fn dt_symbol(&self, t: T, rho: T) -> Result<Complex<T>> {
        let w = self.sign.value::<T>() * T::PI() * lit(2.0) * rho;
        Ok(cis(w * t) * Complex::new(T::zero(), w))
    }
}

/// `e^{2πitρ} a_1(tρ) + e^{-2πitρ} a_2(tρ)`, optionally one side only.
#[derive(Debug, Clone)]
pub struct ScriptAFamily<T> {
    pub syms: MainSymbols<T>,
    pub part: ScriptPart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptPart {
    Both,
    /// The `e^{+2πitρ} a_1` term alone.
    A1,
    /// The `e^{-2πitρ} a_2` term alone.
    A2,
}

impl<T: Real> Family<T> for ScriptAFamily<T> {
    fn symbol(&self, t: T, rho: T) -> Result<Complex<T>> {
        let r = t * rho;
        let (a1, a2) = self.syms.at(r);
        let e = cis(T::PI() * lit(2.0) * r);
        Ok(match self.part {
            ScriptPart::Both => e * a1 + e.conj() * a2,
            ScriptPart::A1 => e * a1,
            ScriptPart::A2 => e.conj() * a2,
        })
    }
    fn dt_symbol(&self, t: T, rho: T) -> Result<Complex<T>> {
        let r = t * rho;
        let (a1, a2) = self.syms.at(r);
        let (d1, d2) = self.syms.derivative_at(r);
        let w = T::PI() * lit(2.0);
        let e = cis(w * r);
        let i = Complex::new(T::zero(), w);
        let plus = e * (i * a1 + d1) * rho;
        let minus = e.conj() * (-i * a2 + d2) * rho;
        Ok(match self.part {
            ScriptPart::Both => plus + minus,
            ScriptPart::A1 => plus,
            ScriptPart::A2 => minus,
        })
    }
}

/// Which Littlewood–Paley piece [`lp_piece`] extracts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece<T> {
    /// `ψ_j(tρ) m̂_α(tρ)`.
    Mean(ComplexOrder<T>),
    /// `φ(tρ) m̂_α(tρ)`; `j` is ignored.
    Low(ComplexOrder<T>),
    /// `e^{±2πitρ} (tρ)^{-ℓ} ψ_j(tρ)`.
    Phase { sign: Sign, ell: i32 },
}

/// `σ(t, ρ) ψ_j(tρ)` style localisation of a family.
#[derive(Debug, Clone)]
pub struct PieceFamily<T> {
    piece: Piece<T>,
    j: i32,
    cutoffs: CutoffFamily<T>,
    mean: Option<MeanFamily<T>>,
}

impl<T: Real> PieceFamily<T> {
    pub fn new(piece: Piece<T>, n: usize, j: i32, cutoffs: CutoffFamily<T>) -> Result<Self> {
        let mean = match piece {
            Piece::Mean(a) | Piece::Low(a) => Some(MeanFamily::new(a, n)?),
            Piece::Phase { .. } => None,
        };
        if !matches!(piece, Piece::Low(_)) && j < 1 {
            return Err(invalid("j", format!("piece index must be >= 1, got {j}")));
        }
        Ok(PieceFamily { piece, j, cutoffs, mean })
    }

    fn cut(&self, r: T) -> (T, T) {
        match self.piece {
            Piece::Low(_) => (self.cutoffs.phi_at(r), self.cutoffs.phi_derivative_at(r)),
            _ => (self.cutoffs.psi_at(self.j, r), self.cutoffs.psi_derivative_at(self.j, r)),
        }
    }
}

impl<T: Real> Family<T> for PieceFamily<T> {
    fn symbol(&self, t: T, rho: T) -> Result<Complex<T>> {
        let r = t * rho;
        let (c, _) = self.cut(r);
        if c == T::zero() {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        match (self.piece, &self.mean) {
            (Piece::Phase { sign, ell }, _) => {
                let w = sign.value::<T>() * T::PI() * lit(2.0);
                Ok(cis(w * r) * (r.powi(-ell) * c))
            }
            (_, Some(mean)) => Ok(mean.symbol(t, rho)? * c),
            _ => unreachable!(),
        }
    }

    fn dt_symbol(&self, t: T, rho: T) -> Result<Complex<T>> {
        let r = t * rho;
        let (c, dc) = self.cut(r);
        let zero = Complex::new(T::zero(), T::zero());
        if c == T::zero() && dc == T::zero() {
            return Ok(zero);
        }
        match (self.piece, &self.mean) {
            (Piece::Phase { sign, ell }, _) => {
                let w = sign.value::<T>() * T::PI() * lit(2.0);
                let l = T::from_i32(ell).unwrap();
                let amp = r.powi(-ell) * c;
                let damp = (r.powi(-ell) * dc - l * r.powi(-ell - 1) * c) * rho;
                Ok(cis(w * r) * (Complex::new(damp, w * rho * amp)))
            }
            (_, Some(mean)) => {
                let v = if c == T::zero() { zero } else { mean.symbol(t, rho)? };
                let dv = if c == T::zero() { zero } else { mean.dt_symbol(t, rho)? };
                Ok(dv * c + v * (dc * rho))
            }
            _ => unreachable!(),
        }
    }
}

/// A field held in frequency form with its radial classes, ready to be hit
/// by many multipliers.
#[derive(Debug, Clone)]
pub struct Spectral<T> {
    freq: SampledField<T>,
    index: RadialIndex<T>,
}

impl<T: Real> Spectral<T> {
    pub fn new(f: &SampledField<T>) -> Result<Self> {
        let freq = f.to_frequency()?;
        let index = RadialIndex::new(&freq)?;
        Ok(Spectral { freq, index })
    }

    pub fn spectrum(&self) -> &SampledField<T> {
        &self.freq
    }

    pub fn index(&self) -> &RadialIndex<T> {
        &self.index
    }

    /// Space-side result of multiplying by `σ(ρ)`.
    pub fn apply(&self, sym: impl Fn(T) -> Result<Complex<T>> + Sync) -> Result<SampledField<T>> {
        self.index.apply(&self.freq, sym)?.into_space()
    }

    pub fn frame<F: Family<T>>(&self, fam: &F, t: T) -> Result<SampledField<T>> {
        self.apply(|rho| fam.symbol(t, rho))
    }

    pub fn frame_dt<F: Family<T>>(&self, fam: &F, t: T) -> Result<SampledField<T>> {
        self.apply(|rho| fam.dt_symbol(t, rho))
    }

    pub fn sup<F: Family<T>>(&self, fam: &F, tg: &TimeGrid<T>) -> Result<SampledField<T>> {
        sup_over_t(|t| self.frame(fam, t), tg)
    }
}

fn grid_dim<T: Real>(f: &SampledField<T>) -> usize {
    f.grid().dim()
}

/// `𝔐^α_t f` through the multiplier `m̂_α(t|ξ|)`; valid for every complex α
/// the Bessel order admits.
pub fn spherical_mean<T: Real>(f: &SampledField<T>, alpha: ComplexOrder<T>, t: T) -> Result<SampledField<T>> {
    if !(t > T::zero()) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    let fam = MeanFamily::new(alpha, grid_dim(f))?;
    Spectral::new(f)?.frame(&fam, t)
}

/// `e^{±2πit|D|} f`.
pub fn half_wave<T: Real>(f: &SampledField<T>, sign: Sign, t: T) -> Result<SampledField<T>> {
    if !(t >= T::zero()) {
        return Err(invalid("t", format!("must be nonnegative, got {t}")));
    }
    Spectral::new(f)?.frame(&HalfWaveFamily { sign }, t)
}

/// The order-zero wave operator built from the main symbols.
pub fn script_a<T: Real>(f: &SampledField<T>, syms: &MainSymbols<T>, t: T) -> Result<SampledField<T>> {
    script_a_part(f, syms, t, ScriptPart::Both)
}

pub fn script_a_part<T: Real>(f: &SampledField<T>, syms: &MainSymbols<T>, t: T, part: ScriptPart) -> Result<SampledField<T>> {
    if syms.n != grid_dim(f) {
        return Err(Error::GridMismatch(format!("symbols built for n={}, field has n={}", syms.n, grid_dim(f))));
    }
    let fam = ScriptAFamily { syms: syms.clone(), part };
    Spectral::new(f)?.frame(&fam, t)
}

pub fn lp_piece<T: Real>(f: &SampledField<T>, piece: Piece<T>, j: i32, t: T, cutoffs: &CutoffFamily<T>) -> Result<SampledField<T>> {
    let fam = PieceFamily::new(piece, grid_dim(f), j, *cutoffs)?;
    Spectral::new(f)?.frame(&fam, t)
}

/// Pointwise `max_t |F_t|` over the grid's samples.
pub fn sup_over_t<T: Real>(
    mut family: impl FnMut(T) -> Result<SampledField<T>>,
    tg: &TimeGrid<T>,
) -> Result<SampledField<T>> {
    let mut acc: Option<SampledField<T>> = None;
    for &t in tg.samples() {
        let frame = family(t)?;
        acc = Some(match acc {
            None => frame.abs(),
            Some(a) => a.zip_with(&frame, |m, z| Complex::new(m.re.max(z.norm()), T::zero()))?,
        });
    }
    acc.ok_or_else(|| invalid("TimeGrid", "no samples"))
}

/// Default dyadic blocks `[2^k, 2^{k+1}]`, `k_lo ≤ k ≤ k_hi`, standing in
/// for `t > 0` on band-limited data.
pub const DYADIC_BLOCKS: (i32, i32) = (-3, 3);

/// `sup_t |𝔐^α_t f|` over the union of the dyadic blocks, `per_block`
/// samples in each.
pub fn dyadic_maximal<T: Real>(
    f: &SampledField<T>,
    alpha: ComplexOrder<T>,
    blocks: (i32, i32),
    per_block: usize,
) -> Result<SampledField<T>> {
    if blocks.1 < blocks.0 {
        return Err(invalid("blocks", format!("empty range {blocks:?}")));
    }
    let fam = MeanFamily::new(alpha, grid_dim(f))?;
    let sp = Spectral::new(f)?;
    let two = lit::<T>(2.0);
    let mut acc: Option<SampledField<T>> = None;
    for k in blocks.0..=blocks.1 {
        let tg = TimeGrid::new(two.powi(k), two.powi(k + 1), per_block)?;
        let s = sp.sup(&fam, &tg)?;
        acc = Some(match acc {
            None => s,
            Some(a) => a.zip_with(&s, |x, y| Complex::new(x.re.max(y.re), T::zero()))?,
        });
    }
    Ok(acc.expect("nonempty block range"))
}

/// Outcome of checking `sup_t|F|^p ≤ |F(t_lo)|^p + p∫|F|^{p-1}|∂_t F|`.
#[derive(Debug, Clone, PartialEq)]
pub struct FtcReport<T> {
    /// Largest pointwise `LHS / RHS`.
    pub worst_ratio: T,
    /// Points where `LHS > slack·RHS`.
    pub failures: usize,
    pub points: usize,
    /// `‖sup_t|F|‖_p^p`.
    pub holder_lhs: T,
    /// `‖F(t_lo)‖_p^p + p ‖F‖^{p-1}_{L^p(dx dt)} ‖∂_t F‖_{L^p(dx dt)}`.
    pub holder_rhs: T,
}

impl<T: Real> FtcReport<T> {
    pub fn holder_ratio(&self) -> T {
        self.holder_lhs / self.holder_rhs
    }
}

/// Default slack on the discretized inequality.
pub const FTC_SLACK: f64 = 1.05;

/// Streams `(F(t), ∂_t F(t))` over `tg` and checks the
/// fundamental-theorem bound pointwise and in integrated Hölder form.
/// Time integrals use the trapezoid rule on `tg`.
pub fn ftc_maximal_check<T: Real>(
    mut frame: impl FnMut(T) -> Result<(SampledField<T>, SampledField<T>)>,
    tg: &TimeGrid<T>,
    p: T,
    slack: T,
) -> Result<FtcReport<T>> {
    if !(p > T::one()) {
        return Err(invalid("p", format!("must exceed 1, got {p}")));
    }
    if tg.len() < 2 {
        return Err(invalid("TimeGrid", "needs at least two samples"));
    }
    let ts = tg.samples();
    let mut sup: Vec<T> = Vec::new();
    let mut first: Vec<T> = Vec::new();
    let mut integral: Vec<T> = Vec::new();
    let (mut f_norm, mut df_norm) = (T::zero(), T::zero());
    let mut cell = T::zero();
    for (k, &t) in ts.iter().enumerate() {
        let (f, df) = frame(t)?;
        if f.side() != Side::Space || df.grid() != f.grid() {
            return Err(Error::GridMismatch("frames must be space fields on one grid".into()));
        }
        let w = match k {
            0 => (ts[1] - ts[0]) * lit(0.5),
            _ if k + 1 == ts.len() => (ts[k] - ts[k - 1]) * lit(0.5),
            _ => (ts[k + 1] - ts[k - 1]) * lit(0.5),
        };
        if k == 0 {
            let len = f.values().len();
            sup = vec![T::zero(); len];
            first = f.values().iter().map(|z| z.norm().powf(p)).collect();
            integral = vec![T::zero(); len];
            cell = f.grid().cell_volume();
        }
        for (i, (z, dz)) in f.values().iter().zip(df.values()).enumerate() {
            let a = z.norm();
            let da = dz.norm();
            sup[i] = sup[i].max(a);
            integral[i] += w * p * a.powf(p - T::one()) * da;
            f_norm += w * a.powf(p);
            df_norm += w * da.powf(p);
        }
    }
    let mut worst = T::zero();
    let mut failures = 0;
    let mut holder_lhs = T::zero();
    for i in 0..sup.len() {
        let lhs = sup[i].powf(p);
        let rhs = first[i] + integral[i];
        holder_lhs += lhs;
        if lhs > T::zero() {
            let ratio = if rhs > T::zero() { lhs / rhs } else { T::infinity() };
            worst = worst.max(ratio);
            if ratio > slack {
                failures += 1;
            }
        }
    }
    let first_norm: T = first.iter().copied().sum::<T>() * cell;
    let holder_rhs = first_norm
        + p * (f_norm * cell).powf((p - T::one()) / p) * (df_norm * cell).powf(p.recip());
    Ok(FtcReport {
        worst_ratio: worst,
        failures,
        points: sup.len(),
        holder_lhs: holder_lhs * cell,
        holder_rhs,
    })
}

/// `(Σ_k |P_k f|²)^{1/2}` with `P_0 = φ(|D|)` and `P_k = ψ_k(|D|)` for
/// `1 ≤ k ≤ k_max`.
pub fn square_function<T: Real>(f: &SampledField<T>, cutoffs: &CutoffFamily<T>, k_max: i32) -> Result<SampledField<T>> {
    let sp = Spectral::new(f)?;
    let mut acc = sp.apply(|r| Ok(Complex::new(cutoffs.phi_at(r), T::zero())))?.map(|z| Complex::new(z.norm_sqr(), T::zero()));
    for k in 1..=k_max {
        let piece = sp.apply(|r| Ok(Complex::new(cutoffs.psi_at(k, r), T::zero())))?;
        acc = acc.zip_with(&piece, |a, z| a + z.norm_sqr())?;
    }
    Ok(acc.map(|z| Complex::new(z.re.sqrt(), T::zero())))
}

/// `sup_{t ∈ tg} |𝔐^α_t f|` for the low-frequency part `φ(t|ξ|) m̂_α(t|ξ|)`.
pub fn low_part_sup<T: Real>(
    f: &SampledField<T>,
    alpha: ComplexOrder<T>,
    cutoffs: &CutoffFamily<T>,
    tg: &TimeGrid<T>,
) -> Result<SampledField<T>> {
    let fam = PieceFamily::new(Piece::Low(alpha), grid_dim(f), 0, *cutoffs)?;
    Spectral::new(f)?.sup(&fam, tg)
}
