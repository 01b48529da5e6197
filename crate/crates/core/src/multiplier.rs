//! Radial multiplier of the spherical means and its Bessel-asymptotic split.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::bessel::{asymptotic_coefficients, BesselJ, ComplexOrder, ExpansionCoefficients};
use crate::error::{invalid, Error, Result};
use crate::scalar::{cis, lit, Real};
use crate::special::gamma;

/// Below this radial frequency `m_hat` uses its Taylor limit.
pub const SMALL_RHO: f64 = 1e-4;

/// `C^∞` step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, built from `e^{-1/x}`.
pub fn smooth_step<T: Real>(x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x >= T::one() {
        return T::one();
    }
    let g = |y: T| (-y.recip()).exp();
    let a = g(x);
    let b = g(T::one() - x);
    a / (a + b)
}

/// Derivative of [`smooth_step`].
pub fn smooth_step_derivative<T: Real>(x: T) -> T {
    if x <= T::zero() || x >= T::one() {
        return T::zero();
    }
    let y = T::one() - x;
    let a = (-x.recip()).exp();
    let b = (-y.recip()).exp();
    let s = a + b;
    (a / (x * x) * b + a * b / (y * y)) / (s * s)
}

type SymbolFn<T> = dyn Fn(T) -> Result<Complex<T>> + Send + Sync;

/// A radial frequency-side multiplier `ρ ↦ σ(ρ)`.
#[derive(Clone)]
pub struct RadialSymbol<T> {
    label: String,
    support_lo: T,
    support_hi: T,
    decay_order: T,
    eval: Arc<SymbolFn<T>>,
}

impl<T: Real> fmt::Debug for RadialSymbol<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialSymbol")
            .field("label", &self.label)
            .field("support", &(self.support_lo, self.support_hi))
            .field("decay_order", &self.decay_order)
            .finish()
    }
}

impl<T: Real> RadialSymbol<T> {
    pub fn new<F>(label: impl Into<String>, support_lo: T, support_hi: T, decay_order: T, f: F) -> Self
    where
        F: Fn(T) -> Result<Complex<T>> + Send + Sync + 'static,
    {
        RadialSymbol {
            label: label.into(),
            support_lo,
            support_hi,
            decay_order,
            eval: Arc::new(f),
        }
    }

    /// Infallible closed-form symbol.
    pub fn closed<F>(label: impl Into<String>, support_lo: T, support_hi: T, decay_order: T, f: F) -> Self
    where
        F: Fn(T) -> Complex<T> + Send + Sync + 'static,
    {
        Self::new(label, support_lo, support_hi, decay_order, move |r| Ok(f(r)))
    }

    pub fn one() -> Self {
        Self::closed("one", T::zero(), T::infinity(), T::zero(), |_| {
            Complex::new(T::one(), T::zero())
        })
    }

    /// Bessel potential `(1 + ρ²)^{s/2}`.
    pub fn bessel_potential(s: T) -> Self {
        Self::closed(format!("(1+rho^2)^({s}/2)"), T::zero(), T::infinity(), s, move |r| {
            Complex::new((T::one() + r * r).powf(s * lit(0.5)), T::zero())
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support(&self) -> (T, T) {
        (self.support_lo, self.support_hi)
    }

    pub fn decay_order(&self) -> T {
        self.decay_order
    }

    pub fn evaluate(&self, rho: T) -> Result<Complex<T>> {
        if rho < self.support_lo || rho > self.support_hi {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        (self.eval)(rho)
    }

    /// `ρ ↦ σ(tρ)`.
    pub fn dilate(&self, t: T) -> Self {
        let inner = self.clone();
        RadialSymbol {
            label: format!("{}(t={t})", self.label),
            support_lo: self.support_lo / t,
            support_hi: self.support_hi / t,
            decay_order: self.decay_order,
            eval: Arc::new(move |r| inner.evaluate(t * r)),
        }
    }

    pub fn times(&self, other: &RadialSymbol<T>) -> Self {
        let (a, b) = (self.clone(), other.clone());
        RadialSymbol {
            label: format!("{}*{}", self.label, other.label),
            support_lo: self.support_lo.max(other.support_lo),
            support_hi: self.support_hi.min(other.support_hi),
            decay_order: self.decay_order + other.decay_order,
            eval: Arc::new(move |r| Ok(a.evaluate(r)? * b.evaluate(r)?)),
        }
    }

    /// Smallest `C` with `|σ(ρ)| ≤ C (1+ρ)^{decay_order}` over the samples.
    pub fn decay_constant(&self, samples: &[T]) -> Result<T> {
        let mut c = T::zero();
        for &r in samples {
            let v = self.evaluate(r)?.norm() / (T::one() + r).powf(self.decay_order);
            c = c.max(v);
        }
        Ok(c)
    }
}

/// `φ` and its dyadic differences `ψ_j(r) = φ(2^{-j} r) - φ(2^{1-j} r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffFamily<T> {
    m: T,
}

impl<T: Real> CutoffFamily<T> {
    pub fn new(m: T) -> Result<Self> {
        if !(m > T::zero()) || !m.is_finite() {
            return Err(invalid("M", format!("must be positive and finite, got {m}")));
        }
        Ok(CutoffFamily { m })
    }

    pub fn m(&self) -> T {
        self.m
    }

    /// 1 on `[0, M]`, 0 on `[2M, ∞)`.
    pub fn phi_at(&self, r: T) -> T {
        smooth_step((self.m * lit(2.0) - r.abs()) / self.m)
    }

    pub fn psi_at(&self, j: i32, r: T) -> T {
        let s = lit::<T>(2.0).powi(-j);
        self.phi_at(s * r) - self.phi_at(s * lit(2.0) * r)
    }

    /// `φ'(r)` for `r ≥ 0`.
    pub fn phi_derivative_at(&self, r: T) -> T {
        -smooth_step_derivative((self.m * lit(2.0) - r.abs()) / self.m) / self.m
    }

    pub fn psi_derivative_at(&self, j: i32, r: T) -> T {
        let s = lit::<T>(2.0).powi(-j);
        let s2 = s * lit(2.0);
        s * self.phi_derivative_at(s * r) - s2 * self.phi_derivative_at(s2 * r)
    }

    pub fn phi(&self) -> RadialSymbol<T> {
        let c = *self;
        RadialSymbol::closed(format!("phi(M={})", self.m), T::zero(), self.m * lit(2.0), T::zero(), move |r| {
            Complex::new(c.phi_at(r), T::zero())
        })
    }

    pub fn psi(&self, j: i32) -> RadialSymbol<T> {
        let c = *self;
        let s = lit::<T>(2.0).powi(j);
        RadialSymbol::closed(
            format!("psi_{j}(M={})", self.m),
            s * self.m * lit(0.5),
            s * self.m * lit(2.0),
            T::zero(),
            move |r| Complex::new(c.psi_at(j, r), T::zero()),
        )
    }
}

/// How `m_hat` evaluates the Bessel factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselPolicy {
    /// Quadrature at every argument.
    Quadrature,
    /// Quadrature below `r = 32`, six-term expansion above.
    Hybrid,
}

/// `m̂_α(ρ) = π^{1-α} ρ^{-ν} J_ν(2πρ)`, `ν = n/2 + α - 1`.
#[derive(Debug, Clone)]
pub struct MHat<T> {
    alpha: ComplexOrder<T>,
    n: usize,
    nu: Complex<T>,
    bessel: BesselJ<T>,
    pi_pow: Complex<T>,
    at_zero: Complex<T>,
    policy: BesselPolicy,
}

pub fn bessel_order_for<T: Real>(alpha: ComplexOrder<T>, n: usize) -> Result<ComplexOrder<T>> {
    if n < 2 {
        return Err(invalid("n", format!("dimension must be at least 2, got {n}")));
    }
    let nu = ComplexOrder::new(T::from_usize_lossy(n) * lit(0.5) + alpha.re - T::one(), alpha.im)?;
    nu.as_bessel_order().map_err(|_| {
        Error::InvalidOrder(format!(
            "alpha = {alpha} in dimension {n} gives Bessel order {nu} with re <= -1/2"
        ))
    })
}

impl<T: Real> MHat<T> {
    pub fn new(alpha: ComplexOrder<T>, n: usize, policy: BesselPolicy) -> Result<Self> {
        let nu_order = bessel_order_for(alpha, n)?;
        let nu = nu_order.value();
        let a = alpha.value();
        let pi = Complex::new(T::PI(), T::zero());
        let pi_pow = pi.powc(Complex::new(T::one(), T::zero()) - a);
        let half_n = T::from_usize_lossy(n) * lit(0.5);
        let at_zero = Complex::new(T::PI().powf(half_n), T::zero()) / gamma(a + half_n);
        Ok(MHat {
            alpha,
            n,
            nu,
            bessel: BesselJ::new(nu_order)?,
            pi_pow,
            at_zero,
            policy,
        })
    }

    pub fn alpha(&self) -> ComplexOrder<T> {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn value_at_zero(&self) -> Complex<T> {
        self.at_zero
    }

    pub fn eval(&self, rho: T) -> Result<Complex<T>> {
        if !(rho >= T::zero()) {
            return Err(invalid("rho", format!("must be nonnegative, got {rho}")));
        }
        if rho < lit(SMALL_RHO) {
            let x = T::PI() * rho;
            return Ok(self.at_zero * (Complex::new(T::one(), T::zero()) - (self.nu + T::one()).inv() * (x * x)));
        }
        let r = T::PI() * lit(2.0) * rho;
        let j = match self.policy {
            BesselPolicy::Quadrature => self.bessel.quadrature(r)?,
            BesselPolicy::Hybrid => self.bessel.eval(r)?,
        };
        Ok(self.pi_pow * (-self.nu * rho.ln()).exp() * j)
    }

    pub fn symbol(&self) -> RadialSymbol<T> {
        let me = self.clone();
        let decay = -(T::from_usize_lossy(self.n) - T::one()) * lit(0.5) - self.alpha.re;
        RadialSymbol::new(
            format!("m_hat(alpha={}, n={})", self.alpha, self.n),
            T::zero(),
            T::infinity(),
            decay,
            move |r| me.eval(r),
        )
    }
}

pub fn m_hat<T: Real>(alpha: ComplexOrder<T>, n: usize, rho: T) -> Result<Complex<T>> {
    MHat::new(alpha, n, BesselPolicy::Quadrature)?.eval(rho)
}

/// `c(π, α) = 2^{-1/2} π^{1/2 - α}`.
pub fn c_pi_alpha<T: Real>(alpha: ComplexOrder<T>) -> Complex<T> {
    let pi = Complex::new(T::PI(), T::zero());
    pi.powc(Complex::new(lit(0.5), T::zero()) - alpha.value()) * lit::<T>(0.5).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCertificate<T> {
    pub m: T,
    /// Minimum of `|Σ_{j<N} d_j (2πr)^{-j}|` over the sampled `r ≥ M`.
    pub c_low: T,
}

/// Samples per octave and octave span of the certificate grid.
const CERT_PER_OCTAVE: usize = 32;
const CERT_OCTAVES: usize = 44;
const M_MAX_LOG2: usize = 20;

/// Smallest `M ∈ {1, 2, 4, …, 2^20}` with `|Σ_{j<N} d_j (2πr)^{-j}| ≥ |d_0|/2`
/// on the sampled `r ≥ M`.
pub fn choose_m<T: Real>(alpha: ComplexOrder<T>, n: usize, n_terms: usize) -> Result<MCertificate<T>> {
    let nu = bessel_order_for(alpha, n)?;
    let coeffs = asymptotic_coefficients(nu, n_terms)?;
    let two_pi = T::PI() * lit(2.0);
    let total = CERT_PER_OCTAVE * CERT_OCTAVES;
    let values: Vec<T> = (0..=total)
        .map(|i| {
            let r = lit::<T>(2.0).powf(T::from_usize_lossy(i) / T::from_usize_lossy(CERT_PER_OCTAVE));
            coeffs.partial_sums(two_pi * r).1.norm()
        })
        .collect();
    // suffix minima: smallest value on [r_i, r_max]
    let mut suffix = values.clone();
    for i in (0..total).rev() {
        suffix[i] = suffix[i].min(suffix[i + 1]);
    }
    let bound = coeffs.d[0].norm() * lit(0.5);
    for k in 0..=M_MAX_LOG2 {
        let i = k * CERT_PER_OCTAVE;
        if suffix[i] >= bound {
            return Ok(MCertificate {
                m: lit::<T>(2.0).powi(k as i32),
                c_low: suffix[i],
            });
        }
    }
    Err(Error::Numeric {
        what: "choose_M",
        reason: format!("no M <= 2^{M_MAX_LOG2} certifies the d-partial sum for alpha={alpha}, n={n}, N={n_terms}"),
    })
}

/// The main-part symbols `a_1, a_2` with their ingredients.
#[derive(Debug, Clone)]
pub struct MainSymbols<T> {
    pub alpha: ComplexOrder<T>,
    pub n: usize,
    pub coeffs: ExpansionCoefficients<T>,
    pub cutoffs: CutoffFamily<T>,
    pub c: Complex<T>,
}

pub fn main_symbols<T: Real>(alpha: ComplexOrder<T>, n: usize, n_terms: usize, m: T) -> Result<MainSymbols<T>> {
    let nu = bessel_order_for(alpha, n)?;
    Ok(MainSymbols {
        alpha,
        n,
        coeffs: asymptotic_coefficients(nu, n_terms)?,
        cutoffs: CutoffFamily::new(m)?,
        c: c_pi_alpha(alpha),
    })
}

impl<T: Real> MainSymbols<T> {
    /// `(a_1(r), a_2(r))`.
    pub fn at(&self, r: T) -> (Complex<T>, Complex<T>) {
        let cut = T::one() - self.cutoffs.phi_at(r);
        if cut == T::zero() {
            let z = Complex::new(T::zero(), T::zero());
            return (z, z);
        }
        let (sb, sd) = self.coeffs.partial_sums(T::PI() * lit(2.0) * r);
        (self.c * sb * cut, self.c * sd * cut)
    }

    /// `(a_1'(r), a_2'(r))`.
    pub fn derivative_at(&self, r: T) -> (Complex<T>, Complex<T>) {
        let z = Complex::new(T::zero(), T::zero());
        let phi = self.cutoffs.phi_at(r);
        if phi == T::one() {
            return (z, z);
        }
        let two_pi = T::PI() * lit(2.0);
        let x = two_pi * r;
        let (sb, sd) = self.coeffs.partial_sums(x);
        // d/dr Σ c_j (2πr)^{-j} = -2π Σ j c_j (2πr)^{-j-1}
        let (mut db, mut dd) = (z, z);
        let mut pow = x.recip();
        for (j, (b, d)) in self.coeffs.b.iter().zip(&self.coeffs.d).enumerate() {
            let w = T::from_usize_lossy(j) * two_pi * pow;
            db -= *b * w;
            dd -= *d * w;
            pow = pow / x;
        }
        let dphi = self.cutoffs.phi_derivative_at(r);
        let cut = T::one() - phi;
        (self.c * (db * cut - sb * dphi), self.c * (dd * cut - sd * dphi))
    }

    pub fn a1_at(&self, r: T) -> Complex<T> {
        self.at(r).0
    }

    pub fn a2_at(&self, r: T) -> Complex<T> {
        self.at(r).1
    }

    /// `(n-1)/2 + α`, the homogeneity of the main part.
    pub fn homogeneity(&self) -> Complex<T> {
        Complex::new((T::from_usize_lossy(self.n) - T::one()) * lit(0.5), T::zero()) + self.alpha.value()
    }

    pub fn a1(&self) -> RadialSymbol<T> {
        let me = self.clone();
        RadialSymbol::closed("a1", self.cutoffs.m(), T::infinity(), T::zero(), move |r| me.a1_at(r))
    }

    pub fn a2(&self) -> RadialSymbol<T> {
        let me = self.clone();
        RadialSymbol::closed("a2", self.cutoffs.m(), T::infinity(), T::zero(), move |r| me.a2_at(r))
    }
}

/// `m̂_α(ρ) - ρ^{-(n-1)/2-α}[e^{2πiρ} a_1(ρ) + e^{-2πiρ} a_2(ρ)]` for `ρ ≥ 2M`.
pub fn decomposition_residual<T: Real>(
    alpha: ComplexOrder<T>,
    n: usize,
    n_terms: usize,
    m: T,
    rho: T,
) -> Result<Complex<T>> {
    let syms = main_symbols(alpha, n, n_terms, m)?;
    let mh = MHat::new(alpha, n, BesselPolicy::Quadrature)?;
    residual_with(&mh, &syms, rho)
}

/// [`decomposition_residual`] with prebuilt ingredients.
pub fn residual_with<T: Real>(mh: &MHat<T>, syms: &MainSymbols<T>, rho: T) -> Result<Complex<T>> {
    if !(rho >= syms.cutoffs.m() * lit(2.0)) {
        return Err(Error::OutOfDomain {
            what: "decomposition_residual",
            reason: format!("needs rho >= 2M = {}, got {rho}", syms.cutoffs.m() * lit(2.0)),
        });
    }
    let full = mh.eval(rho)?;
    let r = T::PI() * lit(2.0) * rho;
    let (a1, a2) = syms.at(rho);
    let e = cis(r);
    let scale = (-syms.homogeneity() * rho.ln()).exp();
    Ok(full - scale * (e * a1 + e.conj() * a2))
}

#[cfg(test)]
mod derivative_tests {
    use super::*;

    fn central<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
        let h = 1e-5;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn cutoff_derivatives_match_differences() {
        let c = CutoffFamily::new(3.0).unwrap();
        for &r in &[3.2, 4.0, 4.5, 5.9, 7.0, 12.0] {
            let fd = central(|x| c.phi_at(x), r);
            assert!((c.phi_derivative_at(r) - fd).abs() < 1e-7, "r={r}");
            let fd = central(|x| c.psi_at(2, x), r);
            assert!((c.psi_derivative_at(2, r) - fd).abs() < 1e-7, "r={r}");
        }
    }

    #[test]
    fn main_symbol_derivative_matches_differences() {
        let alpha = ComplexOrder::new(0.3, 0.2).unwrap();
        let ms = main_symbols(alpha, 2, 4, 2.0).unwrap();
        for &r in &[2.5, 3.3, 4.5, 9.0] {
            let (d1, d2) = ms.derivative_at(r);
            let h = 1e-5;
            let f1 = (ms.a1_at(r + h) - ms.a1_at(r - h)) / (2.0 * h);
            let f2 = (ms.a2_at(r + h) - ms.a2_at(r - h)) / (2.0 * h);
            assert!((d1 - f1).norm() < 1e-7 && (d2 - f2).norm() < 1e-7, "r={r}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn order(re: f64, im: f64) -> ComplexOrder<f64> {
        ComplexOrder::new(re, im).unwrap()
    }

    #[test]
    fn smooth_step_shape() {
        assert_eq!(smooth_step(0.0f64), 0.0);
        assert_eq!(smooth_step(1.0f64), 1.0);
        assert!((smooth_step(0.5f64) - 0.5).abs() < 1e-15);
        for k in 1..100 {
            let x = k as f64 / 100.0;
            assert!((smooth_step(x) + smooth_step(1.0 - x) - 1.0).abs() < 1e-15);
            assert!(smooth_step(x) >= smooth_step(x - 0.01));
        }
    }

    #[test]
    fn m_hat_at_zero_is_beta_integral() {
        let v = m_hat(order(1.0, 0.0), 2, 0.0).unwrap();
        assert!((v.re - PI).abs() < 1e-13 && v.im.abs() < 1e-15);
        for &(a, b, n) in &[(0.0, 0.0, 2), (0.3, 0.2, 3), (1.5, -1.0, 4), (-0.2, 0.0, 3)] {
            let mh = MHat::new(order(a, b), n, BesselPolicy::Quadrature).unwrap();
            let expected = Complex::new(PI.powf(n as f64 / 2.0), 0.0) / gamma(Complex::new(n as f64 / 2.0 + a, b));
            assert!((mh.value_at_zero() - expected).norm() <= 1e-10 * expected.norm());
            // continuity across the small-rho switch
            let below = mh.eval(0.99e-4).unwrap();
            let above = mh.eval(1.01e-4).unwrap();
            assert!((below - above).norm() < 1e-8 * expected.norm());
        }
    }

    #[test]
    fn m_hat_three_dimensional_is_real() {
        let rho = 0.73;
        let v = m_hat(order(1.0, 0.0), 3, rho).unwrap();
        let r: f64 = 2.0 * PI * rho;
        let j32 = (2.0 / (PI * r)).sqrt() * (r.sin() / r - r.cos());
        assert!((v.re - rho.powf(-1.5) * j32).abs() < 1e-13);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn rejects_invalid_orders() {
        assert!(m_hat(order(-0.6, 0.0), 2, 1.0).is_err());
        assert!(m_hat(order(0.0, 0.0), 1, 1.0).is_err());
        assert!(m_hat(order(0.0, 0.0), 2, -1.0).is_err());
    }

    #[test]
    fn cutoff_partition_and_supports() {
        let c = CutoffFamily::new(1.5).unwrap();
        for k in 0..2000 {
            let r = k as f64 * 0.173;
            let mut s = c.phi_at(r);
            for j in 1..=12 {
                s += c.psi_at(j, r);
            }
            assert!((s - 1.0).abs() < 1e-12);
            for j in 1..=12 {
                let (lo, hi) = c.psi(j).support();
                if r < lo || r > hi {
                    assert_eq!(c.psi_at(j, r), 0.0);
                }
            }
        }
        assert_eq!(c.phi_at(1.5), 1.0);
        assert_eq!(c.phi_at(3.0), 0.0);
        assert!(CutoffFamily::new(0.0).is_err());
    }

    #[test]
    fn choose_m_worked_examples() {
        let a0 = order(0.0, 0.0);
        let one = choose_m(a0, 2, 1).unwrap();
        assert_eq!(one.m, 1.0);
        let d0 = (2.0 * PI).sqrt().recip();
        assert!((one.c_low - d0).abs() < 1e-14);
        let four = choose_m(a0, 2, 4).unwrap();
        assert!(four.m <= 16.0 && four.c_low >= d0 / 2.0);
        // a_1(ν) = -24.9i here, so 1 + d_1/(d_0 x) vanishes near 2πr = 24.9
        let big = order(5.0, -(24.75f64).sqrt());
        let m1 = choose_m(big, 2, 1).unwrap().m;
        let m2 = choose_m(big, 2, 2).unwrap().m;
        assert_eq!(m1, 1.0);
        assert!(m2 >= 8.0 && m2 >= m1);
    }

    #[test]
    fn main_symbols_worked_examples() {
        let a = order(0.0, 0.0);
        let cert = choose_m(a, 2, 3).unwrap();
        let s = main_symbols(a, 2, 3, cert.m).unwrap();
        for k in 0..=10 {
            let r = cert.m * k as f64 / 10.0;
            assert_eq!(s.a1_at(r).norm(), 0.0);
        }
        for k in 0..200 {
            let r = 2.0 * cert.m + k as f64 * 0.37;
            assert!(s.a2_at(r).norm() >= cert.c_low * s.c.norm() * (1.0 - 1e-12));
        }
        let far = s.a1_at(1e9);
        assert!((far - s.c * s.coeffs.b[0]).norm() < 1e-9);
        assert!(decomposition_residual(a, 2, 3, cert.m, 2.0 * cert.m).unwrap().norm().is_finite());
        assert!(decomposition_residual(a, 2, 3, cert.m, 1.9 * cert.m).is_err());
    }

    #[test]
    fn symbol_algebra() {
        let phi = CutoffFamily::new(1.0).unwrap().phi();
        let d = phi.dilate(2.0);
        assert_eq!(d.evaluate(0.5).unwrap().re, 1.0);
        assert_eq!(d.evaluate(1.01).unwrap().re, 0.0);
        let one = RadialSymbol::<f64>::one();
        assert_eq!(one.times(&phi).evaluate(0.3).unwrap().re, 1.0);
        let p = RadialSymbol::<f64>::bessel_potential(2.0);
        assert!((p.evaluate(3.0).unwrap().re - 10.0).abs() < 1e-14);
        assert!((p.decay_constant(&[0.0, 1.0, 5.0]).unwrap() - 1.0).abs() < 1e-15);
    }
}
