//! Bessel functions of the first kind for complex order `Re β > -1/2`.
//!
//! Two independent routes: the Poisson integral (quadrature oracle) and the
//! classical large-argument expansion. For `r` beyond [`DIRECT_MAX`] the
//! Poisson integral is evaluated after deforming the path onto the two
//! steepest-descent rays from `t = ±1`, which is exact and keeps the
//! integrand free of oscillation.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quadrature::{exp_sinh, tanh_sinh, DeOptions};
use crate::scalar::{cis, lit, Real};
use crate::special::gamma;

/// Largest argument evaluated by the straight-path integral.
pub const DIRECT_MAX: f64 = 10.0;
/// Hybrid evaluation switches from quadrature to the expansion here.
pub const SWITCH_R: f64 = 32.0;
/// Number of expansion terms used beyond [`SWITCH_R`].
pub const SWITCH_TERMS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexOrder<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> ComplexOrder<T> {
    pub fn new(re: T, im: T) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::InvalidOrder(format!("non-finite order {re}{im:+}i")));
        }
        Ok(ComplexOrder { re, im })
    }

    pub fn real(re: T) -> Result<Self> {
        Self::new(re, T::zero())
    }

    pub fn value(&self) -> Complex<T> {
        Complex::new(self.re, self.im)
    }

    pub fn is_real(&self) -> bool {
        self.im == T::zero()
    }

    /// Checks the Bessel-order constraint `re > -1/2`.
    pub fn as_bessel_order(self) -> Result<Self> {
        if self.re > lit(-0.5) {
            Ok(self)
        } else {
            Err(Error::InvalidOrder(format!(
                "Bessel order needs re > -1/2, got {}{:+}i",
                self.re, self.im
            )))
        }
    }
}

impl<T: Real> std::fmt::Display for ComplexOrder<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im == T::zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}{:+}i", self.re, self.im)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoefficients<T> {
    pub order: ComplexOrder<T>,
    pub b: Vec<Complex<T>>,
    pub d: Vec<Complex<T>>,
}

impl<T: Real> ExpansionCoefficients<T> {
    pub fn n_terms(&self) -> usize {
        self.b.len()
    }

    /// `Σ_{j<N} b_j x^{-j}` and the same for `d`.
    pub fn partial_sums(&self, x: T) -> (Complex<T>, Complex<T>) {
        let inv = x.recip();
        let mut pw = T::one();
        let mut sb = Complex::new(T::zero(), T::zero());
        let mut sd = sb;
        for (b, d) in self.b.iter().zip(&self.d) {
            sb += *b * pw;
            sd += *d * pw;
            pw *= inv;
        }
        (sb, sd)
    }
}

/// `a_j(β) = Π_{k=1}^{j} (4β² - (2k-1)²) / (8k)`.
pub fn hankel_a<T: Real>(beta: Complex<T>, j: usize) -> Complex<T> {
    let four_b2 = beta * beta * lit::<T>(4.0);
    let mut a = Complex::new(T::one(), T::zero());
    for k in 1..=j {
        let kf = T::from_usize_lossy(k);
        let odd = lit::<T>(2.0) * kf - T::one();
        a = a * (four_b2 - odd * odd) / (lit::<T>(8.0) * kf);
    }
    a
}

pub fn asymptotic_coefficients<T: Real>(
    beta: ComplexOrder<T>,
    n_terms: usize,
) -> Result<ExpansionCoefficients<T>> {
    let beta = beta.as_bessel_order()?;
    if n_terms == 0 {
        return Err(crate::error::invalid("N", "need at least one term"));
    }
    let b0 = beta.value();
    let norm = (T::PI() * lit(2.0)).sqrt().recip();
    let i = Complex::new(T::zero(), T::one());
    // e^{∓i(βπ/2 + π/4)}
    let theta = b0 * T::FRAC_PI_2() + T::FRAC_PI_4();
    let phase_b = (-i * theta).exp() * norm;
    let phase_d = (i * theta).exp() * norm;
    let mut b = Vec::with_capacity(n_terms);
    let mut d = Vec::with_capacity(n_terms);
    let mut ip = Complex::new(T::one(), T::zero());
    let mut a = Complex::new(T::one(), T::zero());
    let four_b2 = b0 * b0 * lit::<T>(4.0);
    for j in 0..n_terms {
        if j > 0 {
            let kf = T::from_usize_lossy(j);
            let odd = lit::<T>(2.0) * kf - T::one();
            a = a * (four_b2 - odd * odd) / (lit::<T>(8.0) * kf);
            ip = ip * i;
        }
        b.push(phase_b * ip * a);
        d.push(phase_d * ip.conj() * a);
    }
    Ok(ExpansionCoefficients { order: beta, b, d })
}

/// Truncated two-phase expansion; valid for `r ≥ 1`.
pub fn bessel_asymptotic<T: Real>(coeffs: &ExpansionCoefficients<T>, r: T) -> Result<Complex<T>> {
    if !(r >= T::one()) {
        return Err(Error::OutOfDomain {
            what: "bessel_asymptotic",
            reason: format!("needs r >= 1, got {r}"),
        });
    }
    let (sb, sd) = coeffs.partial_sums(r);
    let e = cis(r);
    Ok((e * sb + e.conj() * sd) / r.sqrt())
}

/// Quadrature evaluation of `J_β(r)`.
pub fn bessel_quadrature<T: Real>(beta: ComplexOrder<T>, r: T) -> Result<Complex<T>> {
    BesselJ::new(beta)?.quadrature(r)
}

/// `J_β` for one fixed order, caching the order-dependent constants.
#[derive(Debug, Clone)]
pub struct BesselJ<T> {
    order: ComplexOrder<T>,
    beta: Complex<T>,
    /// `1 / (Γ(β+1/2) √π)`
    norm: Complex<T>,
    /// `e^{-i(βπ/2 + π/4)}`
    phase: Complex<T>,
    coeffs: ExpansionCoefficients<T>,
}

impl<T: Real> BesselJ<T> {
    pub fn new(order: ComplexOrder<T>) -> Result<Self> {
        let order = order.as_bessel_order()?;
        let beta = order.value();
        let g = gamma(beta + lit::<T>(0.5));
        let norm = Complex::new(T::one(), T::zero()) / (g * T::PI().sqrt());
        let i = Complex::new(T::zero(), T::one());
        let phase = (-i * (beta * T::FRAC_PI_2() + T::FRAC_PI_4())).exp();
        let coeffs = asymptotic_coefficients(order, SWITCH_TERMS)?;
        Ok(BesselJ {
            order,
            beta,
            norm,
            phase,
            coeffs,
        })
    }

    pub fn order(&self) -> ComplexOrder<T> {
        self.order
    }

    /// Quadrature oracle (straight path for small `r`, steepest descent beyond).
    pub fn quadrature(&self, r: T) -> Result<Complex<T>> {
        if !(r >= T::zero()) || !r.is_finite() {
            return Err(Error::OutOfDomain {
                what: "bessel_quadrature",
                reason: format!("needs finite r >= 0, got {r}"),
            });
        }
        if r == T::zero() {
            return self.at_zero();
        }
        if r <= lit(DIRECT_MAX) {
            self.direct(r)
        } else {
            self.contour(r)
        }
    }

    /// Quadrature below [`SWITCH_R`], six-term expansion above.
    pub fn eval(&self, r: T) -> Result<Complex<T>> {
        if r < lit(SWITCH_R) {
            self.quadrature(r)
        } else {
            bessel_asymptotic(&self.coeffs, r)
        }
    }

    fn at_zero(&self) -> Result<Complex<T>> {
        if self.beta.re == T::zero() && self.beta.im == T::zero() {
            Ok(Complex::new(T::one(), T::zero()))
        } else if self.beta.re > T::zero() {
            Ok(Complex::new(T::zero(), T::zero()))
        } else {
            Err(Error::OutOfDomain {
                what: "bessel_quadrature",
                reason: format!("J_{} is singular at r = 0", self.order),
            })
        }
    }

    /// Straight-path Poisson integral over `[-1, 1]`.
    pub fn direct(&self, r: T) -> Result<Complex<T>> {
        let gam = self.beta - lit::<T>(0.5);
        let opts = DeOptions::default();
        let q = tanh_sinh(
            |t: T, omt: T, opt: T| {
                let w = (gam * (omt.ln() + opt.ln())).exp();
                cis(r * t) * w
            },
            &opts,
        );
        if !q.converged && q.error > lit::<T>(1e-9) * q.scale {
            return Err(Error::Numeric {
                what: "bessel_quadrature",
                reason: format!("tanh-sinh did not converge at r = {r}"),
            });
        }
        let pref = (self.beta * (r * lit(0.5)).ln()).exp();
        Ok(pref * self.norm * q.value)
    }

    /// Steepest-descent form of the Poisson integral.
    pub fn contour(&self, r: T) -> Result<Complex<T>> {
        let gam = self.beta - lit::<T>(0.5);
        let two = lit::<T>(2.0);
        let opts = DeOptions::default();
        let side = |sign: T| {
            exp_sinh(
                |u: T, ln_u: T| {
                    let z = Complex::new(two, sign * u / r);
                    (gam * (z.ln() + ln_u) - u).exp()
                },
                lit(1000.0),
                &opts,
            )
        };
        let plus = side(T::one());
        let minus = if self.order.is_real() {
            let mut m = plus;
            m.value = m.value.conj();
            m
        } else {
            side(-T::one())
        };
        for q in [&plus, &minus] {
            if !q.converged && q.error > lit::<T>(1e-9) * q.scale {
                return Err(Error::Numeric {
                    what: "bessel_quadrature",
                    reason: format!("exp-sinh did not converge at r = {r}"),
                });
            }
        }
        let e = cis(r);
        // e^{iθ} with θ = r - βπ/2 - π/4
        let ep = e * self.phase;
        let em = e.conj() / self.phase;
        let pref = (-self.beta * two.ln()).exp() * self.norm / r.sqrt();
        Ok(pref * (ep * plus.value + em * minus.value))
    }
}
