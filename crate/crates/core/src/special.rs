//! Complex Gamma function (Lanczos, g = 7, nine terms).

use num_complex::Complex;

use crate::scalar::{lit, Real};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Γ(z)` for complex `z` away from the poles.
pub fn gamma<T: Real>(z: Complex<T>) -> Complex<T> {
    let half = lit::<T>(0.5);
    if z.re < half {
        // reflection: Γ(z)Γ(1-z) = π / sin(πz)
        let pi = T::PI();
        let s = (z * pi).sin();
        let one = Complex::new(T::one(), T::zero());
        return Complex::new(pi, T::zero()) / (s * gamma(one - z));
    }
    let z = z - T::one();
    let mut x = Complex::new(lit::<T>(LANCZOS[0]), T::zero());
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += Complex::new(lit::<T>(c), T::zero()) / (z + T::from_usize_lossy(i));
    }
    let t = z + lit::<T>(LANCZOS_G) + half;
    let sqrt_2pi = (T::PI() * lit(2.0)).sqrt();
    // t^{z+1/2} e^{-t} evaluated through logs to stay finite for large |z|
    let log = (z + half) * t.ln() - t;
    log.exp() * x * sqrt_2pi
}

/// `1/Γ(z)`, zero at the poles.
pub fn recip_gamma<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round() {
        return Complex::new(T::zero(), T::zero());
    }
    Complex::new(T::one(), T::zero()) / gamma(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: Complex<f64>, b: Complex<f64>) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn known_values() {
        let c = |x: f64, y: f64| Complex::new(x, y);
        assert!(rel(gamma(c(0.5, 0.0)), c(PI.sqrt(), 0.0)) < 1e-13);
        assert!(rel(gamma(c(5.0, 0.0)), c(24.0, 0.0)) < 1e-13);
        assert!(rel(gamma(c(1.0, 1.0)), c(0.498_015_668_118_356_04, -0.154_949_828_301_810_69)) < 1e-13);
        // Γ(-1/2) = -2√π via reflection
        assert!(rel(gamma(c(-0.5, 0.0)), c(-2.0 * PI.sqrt(), 0.0)) < 1e-13);
    }

    #[test]
    fn recurrence_and_reflection_on_strip() {
        for &(x, y) in &[(0.3, 2.0), (1.7, -0.4), (3.2, 5.0), (-0.3, 0.8), (0.05, 0.0)] {
            let z = Complex::new(x, y);
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!(rel(lhs, rhs) < 1e-12, "recurrence at {z}");
            let refl = gamma(z) * gamma(Complex::new(1.0, 0.0) - z) * (z * PI).sin();
            assert!(rel(refl, Complex::new(PI, 0.0)) < 1e-12, "reflection at {z}");
        }
    }

    #[test]
    fn recip_gamma_vanishes_at_poles() {
        assert_eq!(recip_gamma(Complex::new(-2.0f64, 0.0)).norm(), 0.0);
        assert_eq!(recip_gamma(Complex::new(0.0f64, 0.0)).norm(), 0.0);
    }
}
