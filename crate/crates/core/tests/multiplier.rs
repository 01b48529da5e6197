use num_complex::Complex;
use proptest::prelude::*;
use sphermax::analysis::{envelope_decay, log_space, DecayFit};
use sphermax::bessel::ComplexOrder;
use sphermax::multiplier::{choose_m, m_hat, main_symbols, residual_with, BesselPolicy, CutoffFamily, MHat};
use sphermax::special::gamma;

const SLOPE_SLACK: f64 = 0.15;

fn residual_decay(n: usize, alpha: f64, n_terms: usize) -> (f64, DecayFit<f64>) {
    let a = ComplexOrder::real(alpha).unwrap();
    let m = choose_m(a, n, n_terms).unwrap().m;
    let syms = main_symbols(a, n, n_terms, m).unwrap();
    let mh = MHat::new(a, n, BesselPolicy::Quadrature).unwrap();
    let lo = 2.0 * m + 0.5;
    let xs = log_space(lo.max(8.0), 4096.0, 20);
    let fit = envelope_decay(&xs, 2.0 * std::f64::consts::PI, 16, 64.0, |rho| {
        let r = residual_with(&mh, &syms, rho)?;
        Ok((r, mh.eval(rho)?.norm().max(rho.powf(-((n as f64 - 1.0) / 2.0 + alpha)))))
    })
    .unwrap();
    (m, fit)
}

#[test]
fn residual_decays_at_truncation_order() {
    for &(n, alpha) in &[(2usize, 0.0), (2, 0.3), (3, 0.0)] {
        for &nt in &[1usize, 3] {
            let (m, fit) = residual_decay(n, alpha, nt);
            let bound = -((n as f64 - 1.0) / 2.0 + alpha + nt as f64) + SLOPE_SLACK;
            match &fit {
                DecayFit::Fitted(f) => println!(
                    "n={n} alpha={alpha} N={nt} M={m}: slope {:.3} (bound {bound:.2}) over [{:.1}, {:.1}]",
                    f.slope,
                    f.range().0,
                    f.range().1
                ),
                DecayFit::ExactToRoundoff { max_error } => {
                    println!("n={n} alpha={alpha} N={nt} M={m}: exact to round-off ({max_error:.1e})")
                }
            }
            assert!(fit.slope_at_most(bound), "n={n} alpha={alpha} N={nt}: {fit:?}");
        }
    }
}

#[test]
fn residual_is_finite_at_the_boundary() {
    for &(n, alpha) in &[(2usize, 0.0), (2, 0.3), (3, 0.0), (2, -0.2)] {
        let a = ComplexOrder::real(alpha).unwrap();
        let syms = main_symbols(a, n, 3, 4.0f64).unwrap();
        let mh = MHat::new(a, n, BesselPolicy::Quadrature).unwrap();
        let r = residual_with(&mh, &syms, 8.0).unwrap();
        assert!(r.re.is_finite() && r.im.is_finite());
        assert!(residual_with(&mh, &syms, 7.99).is_err());
    }
}

#[test]
fn value_at_origin() {
    for n in 2..=4usize {
        for &(re, im) in &[(0.0, 0.0), (0.3, 0.0), (1.0, 0.0), (2.0, 0.0), (-0.2, 0.4), (0.5, -1.0)] {
            let a = ComplexOrder::new(re, im).unwrap();
            let v = m_hat(a, n, 0.0).unwrap();
            let exact = Complex::new(std::f64::consts::PI.powf(n as f64 / 2.0), 0.0) / gamma(a.value() + n as f64 / 2.0);
            assert!((v - exact).norm() <= 1e-10 * exact.norm(), "n={n} alpha={a}");
        }
    }
}

#[test]
fn certificate_lower_bound_holds_on_samples() {
    let a = ComplexOrder::new(0.25, 0.0).unwrap();
    let cert = choose_m(a, 2, 3).unwrap();
    let syms = main_symbols(a, 2, 3, cert.m).unwrap();
    for k in 0..400 {
        let r = 2.0 * cert.m * 1.01f64.powi(k);
        assert!(syms.a2_at(r).norm() >= cert.c_low * syms.c.norm() * (1.0 - 1e-12));
    }
    // a_1 vanishes below M and approaches c·b_0 far out
    assert_eq!(syms.a1_at(cert.m * 0.99), Complex::new(0.0, 0.0));
    let far = syms.a1_at(1e7);
    assert!((far - syms.c * syms.coeffs.b[0]).norm() < 1e-6);
}

proptest! {
    #[test]
    fn partition_of_unity(m in 0.5f64..50.0, r in 0.0f64..1e5) {
        let c = CutoffFamily::new(m).unwrap();
        let mut s = c.phi_at(r);
        for j in 1..=40 {
            s += c.psi_at(j, r);
        }
        prop_assert!((s - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn hybrid_agrees_with_quadrature(re in -0.4f64..3.0, im in -1.0f64..1.0, rho in 0.0f64..60.0) {
        let a = ComplexOrder::new(re, im).unwrap();
        let q = MHat::new(a, 2, BesselPolicy::Quadrature).unwrap().eval(rho).unwrap();
        let h = MHat::new(a, 2, BesselPolicy::Hybrid).unwrap().eval(rho).unwrap();
        let scale = (1.0 + rho).powf(-(0.5 + re));
        prop_assert!((q - h).norm() <= 1e-8 * scale);
    }
}
