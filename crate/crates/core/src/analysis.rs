//! Slope fitting, the dyadic oscillatory tail integral and exponent regions.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use num_rational::Rational64;

use crate::error::{invalid, Error, Result};
use crate::multiplier::CutoffFamily;
use crate::quadrature::gauss_legendre;
use crate::scalar::{lit, Real};

// ---------------------------------------------------------------- slopes

/// Least-squares line through `(log2 x, log2 y)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit<T> {
    pub points: Vec<(T, T)>,
    pub slope: T,
    pub intercept: T,
    pub stderr: T,
}

impl<T: Real> SlopeFit<T> {
    /// Abscissa range in the original (non-log) units.
    pub fn range(&self) -> (T, T) {
        let lo = self.points.iter().map(|p| p.0).fold(T::infinity(), T::min);
        let hi = self.points.iter().map(|p| p.0).fold(T::neg_infinity(), T::max);
        (lit::<T>(2.0).powf(lo), lit::<T>(2.0).powf(hi))
    }
}

/// Fits points already in log2–log2 coordinates.
pub fn fit_slope<T: Real>(points: &[(T, T)]) -> Result<SlopeFit<T>> {
    if points.len() < 3 {
        return Err(invalid("points", format!("need at least 3, got {}", points.len())));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(invalid("points", "non-finite coordinate"));
    }
    let n = T::from_usize_lossy(points.len());
    let mx = points.iter().map(|p| p.0).sum::<T>() / n;
    let my = points.iter().map(|p| p.1).sum::<T>() / n;
    let sxx = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    if !(sxx > T::zero()) {
        return Err(invalid("points", "abscissae are degenerate"));
    }
    let sxy = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr = points
        .iter()
        .map(|p| {
            let e = p.1 - (intercept + slope * p.0);
            e * e
        })
        .sum::<T>();
    let dof = n - lit(2.0);
    let stderr = (ssr / dof / sxx).sqrt();
    Ok(SlopeFit {
        points: points.to_vec(),
        slope,
        intercept,
        stderr,
    })
}

/// Fits `log2 y` against `log2 x` for raw positive data.
pub fn fit_loglog<T: Real>(xs: &[T], ys: &[T]) -> Result<SlopeFit<T>> {
    if xs.len() != ys.len() {
        return Err(invalid("ys", "length differs from xs"));
    }
    let pts: Vec<(T, T)> = xs.iter().zip(ys).map(|(x, y)| (x.log2(), y.log2())).collect();
    fit_slope(&pts)
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_space<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(n - 1)).exp())
        .collect()
}

/// Result of fitting a decaying, oscillating error against its abscissa.
#[derive(Debug, Clone, PartialEq)]
pub enum DecayFit<T> {
    Fitted(SlopeFit<T>),
    /// Fewer than three windows rose above the round-off floor.
    ExactToRoundoff { max_error: T },
}

impl<T: Real> DecayFit<T> {
    pub fn slope(&self) -> Option<T> {
        match self {
            DecayFit::Fitted(f) => Some(f.slope),
            DecayFit::ExactToRoundoff { .. } => None,
        }
    }

    /// `true` when the fitted slope is at most `bound`, or the quantity is exact.
    pub fn slope_at_most(&self, bound: T) -> bool {
        self.slope().map_or(true, |s| s <= bound)
    }
}

/// Envelope fit of a two-phase oscillation `P(x) e^{iωx} + Q(x) e^{-iωx}`
/// with slowly varying `P, Q`.
///
/// Around every abscissa `x` the amplitudes are projected out over one full
/// period (`per_window` equispaced samples centred on `x`) and the envelope is
/// `|P| + |Q|`. `err` returns the complex error and the magnitude of the
/// reference value; envelopes below `floor_factor · ε · reference` are
/// dropped as round-off.
pub fn envelope_decay<T: Real, F>(
    xs: &[T],
    omega: T,
    per_window: usize,
    floor_factor: T,
    mut err: F,
) -> Result<DecayFit<T>>
where
    F: FnMut(T) -> Result<(Complex<T>, T)>,
{
    if per_window < 3 {
        return Err(invalid("per_window", "need at least 3 samples per period"));
    }
    let period = T::PI() * lit(2.0) / omega;
    let k = T::from_usize_lossy(per_window);
    let mut pts = Vec::new();
    let mut max_error = T::zero();
    for &x in xs {
        let mut p = Complex::new(T::zero(), T::zero());
        let mut q = p;
        let mut scale = T::zero();
        for i in 0..per_window {
            let xi = x + period * ((T::from_usize_lossy(i) + lit(0.5)) / k - lit(0.5));
            let (e, s) = err(xi)?;
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::Numeric {
                    what: "envelope_decay",
                    reason: format!("non-finite error at {xi}"),
                });
            }
            let ph = crate::scalar::cis(omega * xi);
            p += e * ph.conj();
            q += e * ph;
            scale = scale.max(s);
        }
        let env = (p.norm() + q.norm()) / k;
        max_error = max_error.max(env);
        if env > floor_factor * T::epsilon() * scale {
            pts.push((x.log2(), env.log2()));
        }
    }
    if pts.len() < 3 {
        return Ok(DecayFit::ExactToRoundoff { max_error });
    }
    Ok(DecayFit::Fitted(fit_slope(&pts)?))
}

// ---------------------------------------------------------------- oscillatory tail

/// Highest `log2(2^j |τ|)` summed before the tail is declared converged.
const TAIL_MAX_OCTAVES: i32 = 18;
const TAIL_ORDER: usize = 16;

fn check_tail_exponent<T: Real>(m: T) -> Result<()> {
    if !(m > lit(-2.0) && m < T::zero()) {
        return Err(invalid("m", format!("tested range is (-2, 0), got {m}")));
    }
    Ok(())
}

/// Panel count `3·2^k`, at least three per oscillation, so that panel
/// centres and half-widths are dyadic multiples of `M`.
fn block_panels<T: Real>(omega: T, cut: &CutoffFamily<T>) -> usize {
    let width = cut.m() * lit(1.5);
    let oscillations = (omega.abs() * width).ceil().to_usize().unwrap_or(0);
    let need = 16usize.max(3 * oscillations);
    let mut panels = 3;
    while panels < need {
        panels *= 2;
    }
    panels
}

/// `∫ s^m (φ(s) - φ(2s)) e^{2πiωs} ds` over the support `[M/2, 2M]`.
///
/// The phase is split as `ω c + ω h x` (panel centre plus node offset) and
/// reduced mod 1 before scaling by 2π; rounding `c + h x` first would cost
/// `2πω ε` of phase per node.
fn unit_block<T: Real>(m: T, omega: T, cut: &CutoffFamily<T>) -> Complex<T> {
    let panels = block_panels(omega, cut);
    let (xs, ws) = gauss_legendre::<T>(TAIL_ORDER);
    let lo = cut.m() * lit(0.5);
    let width = cut.m() * lit(1.5) / T::from_usize_lossy(panels);
    let half = width * lit(0.5);
    let two_pi = T::PI() * lit(2.0);
    let mut acc = Complex::new(T::zero(), T::zero());
    for q in 0..panels {
        let c = lo + (T::from_usize_lossy(q) + lit(0.5)) * width;
        let pc = omega * c;
        let frac = (pc - pc.round()) + omega.mul_add(c, -pc);
        for (x, w) in xs.iter().zip(&ws) {
            let s = c + half * *x;
            let g = s.powf(m) * (cut.phi_at(s) - cut.phi_at(s * lit(2.0))) * *w * half;
            let (sn, cs) = (two_pi * (frac + omega * half * *x)).sin_cos();
            acc += Complex::new(cs * g, sn * g);
        }
    }
    acc
}

/// `∫_0^∞ e^{2πirτ} r^m (1 - φ(r)) dr` summed over dyadic blocks `ψ_j`.
///
/// Block `j` equals `2^{j(m+1)}` times the unit block at frequency `2^j τ`.
/// Blocks with `2^j ≤ 1/|τ|` carry no oscillation and are summed plainly;
/// beyond that each block is an oscillatory integral of a compactly supported
/// smooth profile, resolved at three panels per period, and the blocks decay
/// faster than any power of `2^j |τ|`.
pub fn oscillatory_tail<T: Real>(m: T, tau: T, cutoffs: &CutoffFamily<T>) -> Result<Complex<T>> {
    check_tail_exponent(m)?;
    if tau == T::zero() || !tau.is_finite() {
        return Err(invalid("tau", format!("must be finite and nonzero, got {tau}")));
    }
    // round-off floor of a unit block: ε times the integral of |integrand|
    let unit_abs = unit_block(m, T::zero(), cutoffs).re;
    let mut sum = Complex::new(T::zero(), T::zero());
    let mut quiet = 0;
    let mut j = 1i32;
    loop {
        let scale = lit::<T>(2.0).powi(j);
        let omega = scale * tau;
        let block = unit_block(m, omega, cutoffs) * scale.powf(m + T::one());
        sum += block;
        let oscillating = scale * tau.abs() > T::one();
        if oscillating {
            // panel sums accumulate round-off like a random walk
            let walk = (T::from_usize_lossy(block_panels(omega, cutoffs)) / lit(16.0)).sqrt();
            let floor = lit::<T>(64.0) * T::epsilon() * unit_abs * walk * scale.powf(m + T::one());
            if block.norm() <= floor.max(T::epsilon() * sum.norm()) {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(sum);
                }
            } else {
                quiet = 0;
            }
            if omega.abs() > lit::<T>(2.0).powi(TAIL_MAX_OCTAVES) {
                return Err(Error::Numeric {
                    what: "oscillatory_tail",
                    reason: format!("dyadic blocks did not decay by 2^j|tau| = 2^{TAIL_MAX_OCTAVES}"),
                });
            }
        }
        j += 1;
    }
}

/// `∫_0^∞ r^m (1 - φ(r)) dr` for `m < -1` (the `τ → 0` limit).
pub fn tail_at_zero<T: Real>(m: T, cutoffs: &CutoffFamily<T>) -> Result<T> {
    check_tail_exponent(m)?;
    if !(m < -T::one()) {
        return Err(invalid("m", "the tail mass is finite only for m < -1"));
    }
    let k = unit_block(m, T::zero(), cutoffs).re;
    let q = lit::<T>(2.0).powf(m + T::one());
    Ok(k * q / (T::one() - q))
}

/// `|τ|` window for the tail's decay slope. The bound is about `τ → 0`; at
/// larger `|τ|` the bounded `φ`-part still biases the fit.
pub const TAIL_TAU_RANGE: (f64, f64) = (2.384185791015625e-7, 2.44140625e-4);

/// Log–log slope of `|I(τ)|` (or `|I(τ) - I(0)|` for `m < -1`) against `τ`
/// over `range`; the expected value is `-(m+1)`.
pub fn tail_decay_slope<T: Real>(m: T, cutoffs: &CutoffFamily<T>, range: (f64, f64), points: usize) -> Result<SlopeFit<T>> {
    let taus = log_space(T::lit(range.0), T::lit(range.1), points);
    let i0 = if m < -T::one() { tail_at_zero(m, cutoffs)? } else { T::zero() };
    let ys = taus
        .iter()
        .map(|&t| Ok((oscillatory_tail(m, t, cutoffs)? - i0).norm()))
        .collect::<Result<Vec<T>>>()?;
    fit_loglog(&taus, &ys)
}

// ---------------------------------------------------------------- exponent regions

/// Scalar for region arithmetic: exact rationals or floats.
pub trait RegionScalar:
    Clone
    + PartialOrd
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn ratio(num: i64, den: i64) -> Self;
    fn as_f64(&self) -> f64;

    fn int(k: i64) -> Self {
        Self::ratio(k, 1)
    }
}

impl RegionScalar for f64 {
    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl RegionScalar for f32 {
    fn ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn as_f64(&self) -> f64 {
        *self as f64
    }
}

impl RegionScalar for Rational64 {
    fn ratio(num: i64, den: i64) -> Self {
        Rational64::new(num, den)
    }
    fn as_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

fn max2<S: RegionScalar>(a: S, b: S) -> S {
    if a >= b {
        a
    } else {
        b
    }
}

fn max_of<S: RegionScalar>(v: Vec<S>) -> S {
    v.into_iter().reduce(max2).expect("nonempty")
}

/// Named threshold curves `p ↦ α*(p)`; the bound holds for `Re α > α*(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Curve {
    /// `1 - n + n/p` on `1 < p ≤ 2`.
    ClassicalLow,
    /// `(2 - n)/p` on `p ≥ 2`.
    ClassicalHigh,
    /// `max{(1-n)/4 + (3-n)/(2p), (1-n)/p}` on `p ≥ 2`.
    Combined,
    /// `max{1/p - (n-1)/2, -(n-1)/p}` on `p ≥ 2`.
    Necessary,
    /// Planar sufficient curve `max{1/p - 1/2, -1/p}`, `n = 2` only.
    SufficientPlanar,
    /// Local-smoothing bound, odd/even branches, evaluated on `p > 2`.
    LocalSmoothing,
}

impl Curve {
    pub const ALL: [Curve; 6] = [
        Curve::ClassicalLow,
        Curve::ClassicalHigh,
        Curve::Combined,
        Curve::Necessary,
        Curve::SufficientPlanar,
        Curve::LocalSmoothing,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Curve::ClassicalLow => "classical-low",
            Curve::ClassicalHigh => "classical-high",
            Curve::Combined => "combined",
            Curve::Necessary => "necessary",
            Curve::SufficientPlanar => "sufficient-planar",
            Curve::LocalSmoothing => "local-smoothing",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentRegion<S> {
    pub n: i64,
    pub curves: Vec<Curve>,
    _scalar: std::marker::PhantomData<S>,
}

pub fn threshold_regions<S: RegionScalar>(n: usize) -> Result<ExponentRegion<S>> {
    if n < 2 {
        return Err(invalid("n", format!("dimension must be at least 2, got {n}")));
    }
    let curves = Curve::ALL
        .into_iter()
        .filter(|c| *c != Curve::SufficientPlanar || n == 2)
        .collect();
    Ok(ExponentRegion {
        n: n as i64,
        curves,
        _scalar: std::marker::PhantomData,
    })
}

impl<S: RegionScalar> ExponentRegion<S> {
    fn s(k: i64) -> S {
        S::int(k)
    }

    /// `(lo, hi, lo_inclusive)`; `hi = None` means `+∞`.
    pub fn domain(&self, c: Curve) -> (S, Option<S>, bool) {
        match c {
            Curve::ClassicalLow => (Self::s(1), Some(Self::s(2)), false),
            Curve::LocalSmoothing => (Self::s(2), None, false),
            _ => (Self::s(2), None, true),
        }
    }

    pub fn in_domain(&self, c: Curve, p: &S) -> bool {
        let (lo, hi, incl) = self.domain(c);
        let above = if incl { *p >= lo } else { *p > lo };
        above && hi.map_or(true, |h| *p <= h)
    }

    /// Threshold value of curve `c` at `p`, or `None` off its domain.
    pub fn value(&self, c: Curve, p: &S) -> Option<S> {
        if !self.curves.contains(&c) || !self.in_domain(c, p) {
            return None;
        }
        let n = self.n;
        let q = S::int(1) / p.clone();
        let s = Self::s;
        let r = S::ratio;
        Some(match c {
            Curve::ClassicalLow => s(1 - n) + s(n) * q,
            Curve::ClassicalHigh => s(2 - n) * q,
            Curve::Combined => max2(r(1 - n, 4) + r(3 - n, 2) * q.clone(), s(1 - n) * q),
            Curve::Necessary => max2(q.clone() - r(n - 1, 2), -(s(n - 1) * q)),
            Curve::SufficientPlanar => max2(q.clone() - r(1, 2), -q),
            Curve::LocalSmoothing => {
                if n % 2 == 1 {
                    max_of(vec![
                        -(s(n - 1) * q.clone()),
                        r(-3 * (n - 1), 8) + r(5 - n, 4) * q.clone(),
                        r(4 * (n - 1), (3 * n + 5) * (n + 3)) - r(n * n - 5, n + 3) * q,
                    ])
                } else {
                    max_of(vec![
                        -(s(n - 1) * q.clone()),
                        r(-(3 * n - 2), 8) - r(n - 6, 4) * q.clone(),
                        r(-(n - 1), n + 4) - r(n * n + n - 6, n + 4) * q,
                    ])
                }
            }
        })
    }

    /// Whether `(p, Re α)` lies strictly inside the region of curve `c`.
    pub fn contains(&self, c: Curve, p: &S, re_alpha: &S) -> Option<bool> {
        self.value(c, p).map(|v| *re_alpha > v)
    }

    /// The two branches of the necessary curve meet at `p = 2n/(n-1)`.
    pub fn crossover(&self) -> S {
        S::ratio(2 * self.n, self.n - 1)
    }

    /// For the wave equation (`α = (3-n)/2`) the estimate fails beyond this
    /// exponent; defined for `n ≥ 4`.
    pub fn wave_failure_threshold(&self) -> Option<S> {
        (self.n >= 4).then(|| S::ratio(2 * (self.n - 1), self.n - 3))
    }

    /// Smallest Sobolev exponent `(n-1)|1/2 - 1/p|` compatible with the
    /// radial counterexample.
    pub fn necessary_s(&self, p: &S) -> S {
        let d = S::ratio(1, 2) - S::int(1) / p.clone();
        let a = if d < S::int(0) { -d } else { d };
        S::int(self.n - 1) * a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionRow<S> {
    pub p: S,
    pub values: Vec<(Curve, Option<S>)>,
    /// combined < classical-high (the combined range is strictly wider).
    pub combined_wider: bool,
    /// local-smoothing ≤ combined.
    pub local_smoothing_within: bool,
    /// local-smoothing value exceeds the trivial bound 1.
    pub exceeds_trivial: bool,
    /// `n = 2`: sufficient-planar equals necessary.
    pub planar_sharp: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionTable<S> {
    pub n: i64,
    pub rows: Vec<RegionRow<S>>,
}

impl<S: RegionScalar> RegionTable<S> {
    pub fn combined_wider_everywhere(&self) -> bool {
        self.rows.iter().all(|r| r.combined_wider)
    }
    pub fn local_smoothing_within_everywhere(&self) -> bool {
        self.rows.iter().all(|r| r.local_smoothing_within)
    }
    pub fn planar_sharp_everywhere(&self) -> bool {
        self.rows.iter().all(|r| r.planar_sharp.unwrap_or(true))
    }
    pub fn trivial_bound_flags(&self) -> Vec<S> {
        self.rows.iter().filter(|r| r.exceeds_trivial).map(|r| r.p.clone()).collect()
    }
}

/// Tabulates every curve on `p_grid ⊂ (2, ∞)` and checks the inclusion claims
/// row by row.
pub fn region_compare<S: RegionScalar>(n: usize, p_grid: &[S]) -> Result<RegionTable<S>> {
    let reg = threshold_regions::<S>(n)?;
    let two = S::int(2);
    let mut rows = Vec::with_capacity(p_grid.len());
    for p in p_grid {
        if !(*p > two) {
            return Err(invalid("p_grid", format!("{p:?} is not in (2, inf)")));
        }
        let values: Vec<(Curve, Option<S>)> = reg.curves.iter().map(|&c| (c, reg.value(c, p))).collect();
        let get = |c: Curve| reg.value(c, p).expect("curve defined on (2, inf)");
        let comb = get(Curve::Combined);
        let ls = get(Curve::LocalSmoothing);
        let planar_sharp = (n == 2).then(|| get(Curve::SufficientPlanar) == get(Curve::Necessary));
        rows.push(RegionRow {
            p: p.clone(),
            combined_wider: comb < get(Curve::ClassicalHigh),
            local_smoothing_within: ls <= comb,
            exceeds_trivial: ls > S::int(1),
            planar_sharp,
            values,
        });
    }
    Ok(RegionTable { n: n as i64, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    #[test]
    fn exact_line() {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        let f = fit_slope(&pts).unwrap();
        assert_eq!(f.slope, -2.0);
        assert_eq!(f.stderr, 0.0);
        assert!(fit_slope(&pts[..2]).is_err());
        assert!(fit_slope(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
    }

    #[test]
    fn synthetic_power_law() {
        let xs: Vec<f64> = (3..12).map(|k| 2f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.powf(-1.5) * (1.0 + 0.01 * x.sin())).collect();
        let f = fit_loglog(&xs, &ys).unwrap();
        assert!((f.slope + 1.5).abs() < 0.02);
        let (lo, hi) = f.range();
        assert!((lo - 8.0).abs() < 1e-12 && (hi - 2048.0).abs() < 1e-9);
    }

    #[test]
    fn worked_region_values() {
        let r2 = threshold_regions::<Rational64>(2).unwrap();
        assert_eq!(r2.value(Curve::Necessary, &q(2, 1)), Some(q(0, 1)));
        assert_eq!(r2.crossover(), q(4, 1));
        let r4 = threshold_regions::<Rational64>(4).unwrap();
        assert_eq!(r4.wave_failure_threshold(), Some(q(6, 1)));
        assert_eq!(r2.wave_failure_threshold(), None);
        let r3 = threshold_regions::<Rational64>(3).unwrap();
        assert_eq!(r3.value(Curve::LocalSmoothing, &q(4, 1)), Some(q(-1, 14)));
        assert!(threshold_regions::<f64>(1).is_err());
        assert_eq!(r3.value(Curve::SufficientPlanar, &q(3, 1)), None);
        assert_eq!(r3.value(Curve::ClassicalLow, &q(3, 1)), None);
        assert_eq!(r3.value(Curve::ClassicalLow, &q(3, 2)), Some(q(-2 + 2, 1)));
    }

    #[test]
    fn branches_meet_at_crossover() {
        for n in 2..8 {
            let r = threshold_regions::<Rational64>(n).unwrap();
            let pc = r.crossover();
            let inv = Rational64::from_integer(1) / pc;
            let nn = n as i64;
            assert_eq!(inv - q(nn - 1, 2), -(Rational64::from_integer(nn - 1) * inv));
            let rf = threshold_regions::<f64>(n).unwrap();
            let pcf = rf.crossover();
            let a = 1.0 / pcf - (n as f64 - 1.0) / 2.0;
            let b = -(n as f64 - 1.0) / pcf;
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn planar_grid_claims_hold() {
        let grid: Vec<Rational64> = (1..=100).map(|k| q(20 + k, 10)).collect();
        let t = region_compare(2, &grid).unwrap();
        assert!(t.planar_sharp_everywhere());
        assert!(t.combined_wider_everywhere());
        assert!(t.local_smoothing_within_everywhere());
        assert!(t.trivial_bound_flags().is_empty());
        assert!(region_compare(2, &[q(2, 1)]).is_err());
    }

    #[test]
    fn three_dimensional_local_smoothing_comparison_at_ten() {
        // The displayed odd branch is larger than the combined curve at p = 10.
        let r = threshold_regions::<Rational64>(3).unwrap();
        let ls = r.value(Curve::LocalSmoothing, &q(10, 1)).unwrap();
        let comb = r.value(Curve::Combined, &q(10, 1)).unwrap();
        assert_eq!(ls, q(2, 70));
        assert_eq!(comb, q(-1, 5));
        let t = region_compare(3, &[q(10, 1)]).unwrap();
        assert!(!t.rows[0].local_smoothing_within);
    }

    #[test]
    fn necessary_s_is_duality_symmetric() {
        for n in 2..6 {
            let r = threshold_regions::<Rational64>(n).unwrap();
            for k in 11..60 {
                let p = q(k, 10);
                let pp = p / (p - Rational64::from_integer(1));
                assert_eq!(r.necessary_s(&p), r.necessary_s(&pp));
            }
        }
    }

    #[test]
    fn tail_rejects_bad_input() {
        let c = CutoffFamily::new(1.0).unwrap();
        assert!(oscillatory_tail(-0.5, 0.0, &c).is_err());
        assert!(oscillatory_tail(0.5, 1.0, &c).is_err());
        assert!(tail_at_zero(-0.5, &c).is_err());
    }

    #[test]
    fn tail_conjugate_symmetry() {
        let c = CutoffFamily::new(1.0).unwrap();
        let a = oscillatory_tail(-0.5, 0.3, &c).unwrap();
        let b = oscillatory_tail(-0.5, -0.3, &c).unwrap();
        assert!((a - b.conj()).norm() < 1e-13 * a.norm());
    }
}
