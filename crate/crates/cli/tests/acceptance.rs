//! Acceptance run. Each test prints one `criterion N: PASS|FAIL` line and
//! asserts it. Criteria are serialized so the runtime budgets measure one
//! run at a time.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sphermax::analysis::{oscillatory_tail, region_compare, threshold_regions, Curve};
use sphermax::bessel::ComplexOrder;
use sphermax::fields::{Grid, SampledField, Side};
use sphermax::multiplier::CutoffFamily;
use sphermax::operators::{ftc_maximal_check, half_wave, square_function, MeanFamily, Sign, Spectral, TimeGrid, FTC_SLACK};
use sphermax_cli::config::{Config, Experiment};
use sphermax_cli::experiments::{annulus_field, test_field};
use sphermax_cli::manifest::ExperimentRun;

static SERIAL: Mutex<()> = Mutex::new(());

const PLANCHEREL_TOL: f64 = 1e-10;
const UNITARITY_TOL: f64 = 1e-10;
const PARTITION_TOL: f64 = 1e-12;
const TAIL_AGREEMENT_TOL: f64 = 1e-6;
const FTC_MOVIES: usize = 100;
const FTC_FRAMES: usize = 64;
const SQUARE_BAND: f64 = 2.0;

fn lock() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(n: u32, pass: bool, line: &str) {
    // Straight to the handle so the line shows without --nocapture.
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n}: {verdict} {line}");
}

fn run(cfg: &Config, dir: &Path) -> (ExperimentRun, Duration) {
    let t0 = Instant::now();
    let run = sphermax_cli::run(cfg, dir).expect("run directory I/O");
    (run, t0.elapsed())
}

/// Runs `cfg`, judges the named verdicts and the runtime budget.
fn judge(n: u32, cfg: Config, criteria: &[&str], budget: Duration) {
    let _g = lock();
    let dir = tempfile::tempdir().unwrap();
    let (res, took) = run(&cfg, dir.path());
    let mut pass = took <= budget;
    let mut parts = vec![format!("{:.1}s of {:.0}s", took.as_secs_f64(), budget.as_secs_f64())];
    for c in criteria {
        match res.verdict(c) {
            Some(v) => {
                pass &= v.pass;
                parts.push(format!(
                    "{c}={} (measured {:.4}, target {:.4} ± {:.3}; {})",
                    if v.pass { "ok" } else { "no" },
                    v.measured,
                    v.target,
                    v.tolerance,
                    v.detail
                ));
            }
            None => {
                pass = false;
                parts.push(format!("{c} missing"));
            }
        }
    }
    report(n, pass, &parts.join("; "));
    assert!(pass, "criterion {n}");
}

fn config(e: Experiment, criteria: &[&str]) -> Config {
    let mut c = Config::new(e);
    c.criteria = criteria.iter().map(|s| s.to_string()).collect();
    c
}

#[test]
fn criterion_01_bessel_expansion_order() {
    judge(1, config(Experiment::BesselCheck, &[]), &["bessel-order"], Duration::from_secs(60));
}

#[test]
fn criterion_02_multiplier_decomposition() {
    judge(2, config(Experiment::MultiplierResidual, &[]), &["residual-decay"], Duration::from_secs(120));
}

#[test]
fn criterion_03_oracle_equivalence() {
    judge(3, config(Experiment::OracleCrosscheck, &[]), &["oracle-l2"], Duration::from_secs(120));
}

#[test]
fn criterion_04_radial_blowup() {
    let c = ["blowup-slope", "blowup-doubling"];
    judge(4, config(Experiment::RadialBlowup, &c), &c, Duration::from_secs(600));
}

#[test]
fn criterion_05_wave_packet_scaling() {
    let c = ["packet-lhs-slope", "packet-sobolev-slope", "packet-gap"];
    judge(5, config(Experiment::PacketSweep, &c), &c, Duration::from_secs(900));
}

// Kronrod 15 / Gauss 7 on [-1, 1].
const XK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn adaptive_gk(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64, depth: u32) -> Complex64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = f(c) * WK[7];
    let mut g = f(c) * WG[3];
    for i in 0..7 {
        let v = f(c - h * XK[i]) + f(c + h * XK[i]);
        k += v * WK[i];
        if i % 2 == 1 {
            g += v * WG[i / 2];
        }
    }
    if ((k - g) * h).norm() <= tol || depth == 0 {
        return k * h;
    }
    adaptive_gk(f, a, c, tol / 2.0, depth - 1) + adaptive_gk(f, c, b, tol / 2.0, depth - 1)
}

/// `∫ r^m (1 - φ(r)) e^{2πirτ} dr`: the transition band directly, then the
/// pure power along the vertical ray from `2M`, where it decays exponentially.
fn tail_oracle(m: f64, tau: f64, cut: &CutoffFamily<f64>) -> Complex64 {
    let mm = cut.m();
    let near = |r: f64| Complex64::from_polar(r.powf(m) * (1.0 - cut.phi_at(r)), 2.0 * PI * r * tau);
    let body = adaptive_gk(&near, mm, 2.0 * mm, 1e-14, 30);
    let s = tau.signum();
    let ray = |u: f64| {
        if u >= 1.0 {
            return Complex64::new(0.0, 0.0);
        }
        let y = u / (1.0 - u);
        let z = Complex64::new(2.0 * mm, s * y);
        z.powf(m) * (-2.0 * PI * tau.abs() * y).exp() / ((1.0 - u) * (1.0 - u))
    };
    body + adaptive_gk(&ray, 0.0, 1.0, 1e-14, 40) * Complex64::from_polar(1.0, 2.0 * PI * 2.0 * mm * tau) * Complex64::new(0.0, s)
}

#[test]
fn criterion_06_oscillatory_tail() {
    let _g = lock();
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(Experiment::TailDecay, &[]);
    let (res, _) = run(&cfg, dir.path());
    let v = res.verdict("tail-slope").unwrap();
    let cut = CutoffFamily::new(cfg.tail.cutoff_m).unwrap();
    let mut worst: f64 = 0.0;
    for &m in &cfg.tail.exponents {
        for &tau in &[0.25, 3.0, 16.0, -5.0] {
            let b = oscillatory_tail(m, tau, &cut).unwrap();
            let o = tail_oracle(m, tau, &cut);
            worst = worst.max((b - o).norm() / o.norm());
        }
    }
    let took = t0.elapsed();
    let pass = v.pass && worst <= TAIL_AGREEMENT_TOL && took <= Duration::from_secs(60);
    report(
        6,
        pass,
        &format!(
            "{:.1}s; slope deviation {:.4} ≤ {}; block-sum vs adaptive {:.1e} ≤ {:.0e}",
            took.as_secs_f64(),
            v.measured,
            v.tolerance,
            worst,
            TAIL_AGREEMENT_TOL
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_fixed_time_fio() {
    judge(7, config(Experiment::FioSlope, &[]), &["fio-slope"], Duration::from_secs(600));
}

#[test]
fn criterion_08_region_calculators() {
    let _g = lock();
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let (res, _) = run(&config(Experiment::Regions, &[]), dir.path());
    let q = Rational64::new;
    let r2 = threshold_regions::<Rational64>(2).unwrap();
    let r3 = threshold_regions::<Rational64>(3).unwrap();
    let r4 = threshold_regions::<Rational64>(4).unwrap();
    let mut worked = vec![
        ("n=2 p=2 necessary", r2.value(Curve::Necessary, &q(2, 1)) == Some(q(0, 1))),
        ("n=4 wave threshold", r4.wave_failure_threshold() == Some(q(6, 1))),
        ("n=3 p=4 local smoothing", r3.value(Curve::LocalSmoothing, &q(4, 1)) == Some(q(-1, 14))),
    ];
    for (n, r) in [(2i64, &r2), (3, &r3), (4, &r4)] {
        let p = q(2 * n, n - 1);
        // both branches of the necessary curve agree at the crossover
        let a = q(1, 1) / p - q(n - 1, 2);
        let b = -(Rational64::from_integer(n - 1) / p);
        worked.push(("crossover", r.crossover() == p && a == b && r.value(Curve::Necessary, &p) == Some(a)));
    }
    let grid: Vec<Rational64> = (1..=100).map(|k| q(2, 1) + q(k, 10)).collect();
    let planar = region_compare(2, &grid).unwrap();
    let took = t0.elapsed();
    let bad: Vec<&str> = worked.iter().filter(|w| !w.1).map(|w| w.0).collect();
    let pass = bad.is_empty()
        && planar.planar_sharp_everywhere()
        && planar.local_smoothing_within_everywhere()
        && ["regions-worked-points", "regions-sharp-n2", "regions-inclusion"].iter().all(|c| res.verdict(c).map_or(false, |v| v.pass))
        && took <= Duration::from_secs(1);
    report(
        8,
        pass,
        &format!(
            "{:.3}s of 1s; worked-point mismatches {:?}; sufficient = necessary on n=2 grid: {}; local smoothing within combined: {}",
            took.as_secs_f64(),
            bad,
            planar.planar_sharp_everywhere(),
            planar.local_smoothing_within_everywhere()
        ),
    );
    assert!(pass);
}

fn random_field(g: &Grid<f64>, rng: &mut ChaCha20Rng) -> SampledField<f64> {
    let band = g.nyquist() / 3.0;
    let mut f = SampledField::zeros(g, Side::Frequency).unwrap();
    let mut idx = vec![0usize; g.dim()];
    for (k, z) in f.values_mut().iter_mut().enumerate() {
        g.unravel(k, &mut idx);
        let r = idx.iter().enumerate().map(|(a, &i)| g.freq(a, i).powi(2)).sum::<f64>().sqrt();
        if r <= band {
            *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    f.into_space().unwrap()
}

fn l2_space(f: &SampledField<f64>) -> f64 {
    (f.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * f.grid().cell_volume()).sqrt()
}

#[test]
fn criterion_09_structural_invariants() {
    let _g = lock();
    let t0 = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let g = Grid::new(2, 4.0, 64).unwrap();

    // Plancherel: Σ|f|² h^n = L^{-n} Σ|f̂|²
    let mut planch: f64 = 0.0;
    let mut unit: f64 = 0.0;
    for _ in 0..10 {
        let f = random_field(&g, &mut rng);
        let fh = f.to_frequency().unwrap();
        let lhs = l2_space(&f);
        let rhs = (fh.values().iter().map(|z| z.norm_sqr()).sum::<f64>() / g.length().powi(2)).sqrt();
        planch = planch.max((lhs - rhs).abs() / lhs);
        for &(s, t) in &[(Sign::Plus, 0.37), (Sign::Minus, 1.9), (Sign::Plus, 12.25)] {
            let w = half_wave(&f, s, t).unwrap();
            unit = unit.max((l2_space(&w) - lhs).abs() / lhs);
        }
    }

    let mut partition: f64 = 0.0;
    for &mm in &[0.5, 1.0, 3.7] {
        let c = CutoffFamily::new(mm).unwrap();
        for k in 0..2000 {
            let r = 1e-3 * 1.01f64.powi(k);
            let s = c.phi_at(r) + (1..=60).map(|j| c.psi_at(j, r)).sum::<f64>();
            partition = partition.max((s - 1.0).abs());
        }
    }

    let alpha = ComplexOrder::real(0.5).unwrap();
    let fam = MeanFamily::new(alpha, 2).unwrap();
    let tg = TimeGrid::new(1.0, 2.0, FTC_FRAMES).unwrap();
    let small = Grid::new(2, 4.0, 32).unwrap();
    let mut failures = 0;
    for _ in 0..FTC_MOVIES {
        let sp = Spectral::new(&random_field(&small, &mut rng)).unwrap();
        let p = rng.gen_range(1.5..6.0);
        let rep = ftc_maximal_check(|t| Ok((sp.frame(&fam, t)?, sp.frame_dt(&fam, t)?)), &tg, p, FTC_SLACK).unwrap();
        failures += rep.failures;
    }

    // ‖Sf‖_p / ‖f‖_p over the test fields and random annulus fields
    let lg = Grid::new(2, 8.0, 256).unwrap();
    let cut = CutoffFamily::new(1.0).unwrap();
    let mut corpus: Vec<SampledField<f64>> = ["gaussian", "two-bumps", "modulated"].iter().map(|n| test_field(n, &lg).unwrap()).collect();
    for j in 1..=3 {
        corpus.push(annulus_field(&lg, &cut, j, 9, j as u64).unwrap());
    }
    let mut bands = Vec::new();
    for &p in &[2.0, 4.0] {
        let ratios: Vec<f64> = corpus
            .iter()
            .map(|f| square_function(f, &cut, 6).unwrap().lp_norm(p).unwrap() / f.lp_norm(p).unwrap())
            .collect();
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        bands.push((p, lo, hi));
    }
    let band_ok = bands.iter().all(|&(_, lo, hi)| hi / lo <= SQUARE_BAND);

    let took = t0.elapsed();
    let pass = planch <= PLANCHEREL_TOL
        && unit <= UNITARITY_TOL
        && partition <= PARTITION_TOL
        && failures == 0
        && band_ok
        && took <= Duration::from_secs(300);
    report(
        9,
        pass,
        &format!(
            "{:.1}s of 300s; Plancherel {planch:.1e}; half-wave {unit:.1e}; partition {partition:.1e}; ftc failures {failures}/{FTC_MOVIES} movies; square-function bands {}",
            took.as_secs_f64(),
            bands.iter().map(|(p, lo, hi)| format!("p={p}: [{lo:.3}, {hi:.3}]")).collect::<Vec<_>>().join(" ")
        ),
    );
    assert!(pass);
}

fn without_clock(mut r: ExperimentRun) -> ExperimentRun {
    r.started.clear();
    r.finished.clear();
    r
}

#[test]
fn criterion_10_determinism() {
    let _g = lock();
    let mut fio = config(Experiment::FioSlope, &[]);
    fio.fio.j_max = fio.fio.j_min + 2;
    fio.fio.draws = 3;
    fio.fio.m = 512;
    let mut oracle = config(Experiment::OracleCrosscheck, &[]);
    oracle.oracle.m = 256;
    let cfgs = [config(Experiment::Regions, &[]), config(Experiment::TailDecay, &[]), config(Experiment::MultiplierResidual, &[]), oracle, fio];
    let mut mismatches = Vec::new();
    let mut files = 0;
    for cfg in &cfgs {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let (ra, _) = run(cfg, a.path());
        let (rb, _) = run(cfg, b.path());
        for (name, file) in &ra.outputs {
            if !file.ends_with(".csv") {
                continue;
            }
            files += 1;
            let x = std::fs::read(a.path().join(file)).unwrap();
            let y = std::fs::read(b.path().join(file));
            if y.ok().as_deref() != Some(&x[..]) {
                mismatches.push(format!("{}:{name}", cfg.experiment.name()));
            }
        }
        if without_clock(ra) != without_clock(rb) {
            mismatches.push(format!("{}:manifest", cfg.experiment.name()));
        }
    }
    let pass = mismatches.is_empty() && files > 0;
    report(10, pass, &format!("{files} CSV files over {} configs; mismatches {mismatches:?}", cfgs.len()));
    assert!(pass);
}
