//! The experiment bodies. Each returns verdicts for every criterion it can
//! judge; the caller keeps the active ones.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;
use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use sphermax::analysis::{envelope_decay, fit_loglog, log_space, region_compare, tail_decay_slope, threshold_regions, Curve, DecayFit, SlopeFit};
use sphermax::bessel::{asymptotic_coefficients, bessel_asymptotic, BesselJ, ComplexOrder};
use sphermax::extremals::{
    blowup_probe, packet_lower_bound, packet_spectrum, packet_time_grid, wave_packet, Approach, ConeCutoff, Packet, ProbeConfig, ProbeReport, RadialExtremal,
};
use sphermax::fields::{Grid, SampledField};
use sphermax::multiplier::{choose_m, main_symbols, residual_with, BesselPolicy, CutoffFamily, MHat};
use sphermax::operators::{lp_piece, spherical_mean, Piece, ScriptPart, Sign};

use crate::config::{BlowupParams, Config};
use crate::manifest::Verdict;
use crate::plot::{line_plot, Series};

/// Collects the files a run writes.
pub struct Artifacts<'a> {
    dir: &'a Path,
    pub outputs: BTreeMap<String, String>,
}

impl<'a> Artifacts<'a> {
    pub fn new(dir: &'a Path) -> Self {
        Artifacts { dir, outputs: BTreeMap::new() }
    }

    pub fn csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<()> {
        let file = format!("{name}.csv");
        let mut w = csv::Writer::from_path(self.dir.join(&file)).with_context(|| format!("creating {file}"))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        self.outputs.insert(name.to_string(), file);
        Ok(())
    }

    pub fn svg(&mut self, name: &str, body: String) -> Result<()> {
        let file = format!("{name}.svg");
        std::fs::write(self.dir.join(&file), body).with_context(|| format!("writing {file}"))?;
        self.outputs.insert(format!("{name}-plot"), file);
        Ok(())
    }

    pub fn raw(&mut self, name: &str, file: &str, bytes: &[u8]) -> Result<()> {
        std::fs::write(self.dir.join(file), bytes).with_context(|| format!("writing {file}"))?;
        self.outputs.insert(name.to_string(), file.to_string());
        Ok(())
    }
}

fn fit_line(fit: &SlopeFit<f64>) -> Vec<(f64, f64)> {
    let (a, b) = (fit.points.first().unwrap().0, fit.points.last().unwrap().0);
    vec![(a, fit.intercept + fit.slope * a), (b, fit.intercept + fit.slope * b)]
}

pub fn run_experiment(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Verdict>> {
    use crate::config::Experiment::*;
    match cfg.experiment {
        BesselCheck => bessel_check(cfg, art),
        MultiplierResidual => multiplier_residual(cfg, art),
        OracleCrosscheck => oracle_crosscheck(cfg, art),
        PacketSweep => packet_sweep(cfg, art),
        RadialBlowup => radial_blowup(cfg, art),
        TailDecay => tail_decay(cfg, art),
        FioSlope => fio_slope(cfg, art),
        Regions => regions(cfg, art),
    }
}

#[derive(Serialize)]
struct DecayRow {
    label: String,
    terms: usize,
    slope: Option<f64>,
    bound: f64,
    range_lo: Option<f64>,
    range_hi: Option<f64>,
    roundoff_max: Option<f64>,
}

fn decay_row(label: String, terms: usize, bound: f64, fit: &DecayFit<f64>) -> DecayRow {
    match fit {
        DecayFit::Fitted(f) => DecayRow {
            label,
            terms,
            slope: Some(f.slope),
            bound,
            range_lo: Some(f.range().0),
            range_hi: Some(f.range().1),
            roundoff_max: None,
        },
        DecayFit::ExactToRoundoff { max_error } => DecayRow {
            label,
            terms,
            slope: None,
            bound,
            range_lo: None,
            range_hi: None,
            roundoff_max: Some(*max_error),
        },
    }
}

/// Worst `slope - bound` over the rows; rows exact to round-off count as met.
fn worst_excess(rows: &[DecayRow]) -> f64 {
    rows.iter().filter_map(|r| r.slope.map(|s| s - r.bound)).fold(f64::NEG_INFINITY, f64::max)
}

fn slope_plot(title: &str, rows: &[DecayRow], art: &mut Artifacts, name: &str) -> Result<()> {
    let mut labels: Vec<&str> = rows.iter().map(|r| r.label.as_str()).collect();
    labels.dedup();
    let mut series = Vec::new();
    for l in &labels {
        let pts = rows.iter().filter(|r| r.label == *l).map(|r| (r.terms as f64, r.slope.unwrap_or(f64::NAN))).collect();
        series.push(Series::new(l.to_string(), pts));
    }
    let bound = rows.iter().filter(|r| r.label == labels[0]).map(|r| (r.terms as f64, r.bound)).collect();
    series.push(Series::new("bound", bound).dashed());
    art.svg(name, line_plot(title, "terms N", "fitted slope", &series))
}

fn bessel_check(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Verdict>> {
    let b = &cfg.bessel;
    let xs = log_space(b.r_min, b.r_max, b.points);
    let mut rows = Vec::new();
    for &[re, im] in &b.orders {
        let beta = ComplexOrder::new(re, im)?;
        let j = BesselJ::new(beta)?;
        for &n in &b.terms {
            let c = asymptotic_coefficients(beta, n)?;
            let fit = envelope_decay(&xs, 1.0, 16, 64.0, |r| Ok((j.quadrature(r)? - bessel_asymptotic(&c, r)?, r.powf(-0.5))))?;
            rows.push(decay_row(format!("{beta}"), n, -(n as f64 + 0.5), &fit));
        }
    }
    art.csv("bessel_slopes", &rows)?;
    slope_plot("Asymptotic expansion error slope", &rows, art, "bessel_slopes")?;
    let worst = worst_excess(&rows);
    Ok(vec![Verdict::at_most(
        "bessel-order",
        worst,
        0.0,
        b.slack,
        format!("largest slope + N + 1/2 over r in [{}, {}]", b.r_min, b.r_max),
    )])
}

fn multiplier_residual(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Verdict>> {
    let p = &cfg.multiplier;
    let mut rows = Vec::new();
    for case in &p.cases {
        let a = ComplexOrder::real(case.alpha)?;
        let mh = MHat::new(a, case.n, BesselPolicy::Quadrature)?;
        for &nt in &p.terms {
            let m = choose_m(a, case.n, nt)?.m;
            let syms = main_symbols(a, case.n, nt, m)?;
            let xs = log_space((2.0 * m + 0.5).max(8.0), p.rho_max, p.points);
            let lead = (case.n as f64 - 1.0) / 2.0 + case.alpha;
            let fit = envelope_decay(&xs, 2.0 * PI, 16, 64.0, |rho| {
                Ok((residual_with(&mh, &syms, rho)?, mh.eval(rho)?.norm().max(rho.powf(-lead))))
            })?;
            rows.push(decay_row(format!("n={} alpha={}", case.n, case.alpha), nt, -(lead + nt as f64), &fit));
        }
    }
    art.csv("residual_slopes", &rows)?;
    slope_plot("Decomposition residual slope", &rows, art, "residual_slopes")?;
    Ok(vec![Verdict::at_most(
        "residual-decay",
        worst_excess(&rows),
        0.0,
        p.slack,
        "largest slope - bound; rows exact to round-off count as met",
    )])
}

/// The Schwartz test fields of the crosscheck.
pub fn test_field(name: &str, g: &Grid<f64>) -> Result<SampledField<f64>> {
    let gauss = |x: &[f64], c: [f64; 2], s: f64| (-PI * ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)) / (s * s)).exp();
    let f = match name {
        "gaussian" => SampledField::from_space_fn(g, |x| Complex64::new(gauss(x, [0.0, 0.0], 0.6), 0.0))?,
        "two-bumps" => SampledField::from_space_fn(g, |x| {
            Complex64::new(gauss(x, [0.4, -0.3], 0.5) - 0.7 * gauss(x, [-0.5, 0.6], 0.4), 0.3 * gauss(x, [0.1, 0.1], 0.7))
        })?,
        "modulated" => SampledField::from_space_fn(g, |x| {
            let ph = 2.0 * PI * (2.0 * x[0] - 1.5 * x[1]);
            Complex64::new(ph.cos(), ph.sin()) * gauss(x, [0.0, 0.0], 0.8)
        })?,
        other => anyhow::bail!("unknown test field `{other}`"),
    };
    Ok(f)
}

#[derive(Serialize)]
struct OracleRow {
    field: String,
    alpha: f64,
    t: f64,
    rel_l2: f64,
}

fn oracle_crosscheck(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Verdict>> {
    let o = &cfg.oracle;
    let g = Grid::new(2, o.length, o.m)?;
    let mut rows = Vec::new();
    for name in &o.fields {
        let f = test_field(name, &g)?;
        for &a in &o.alphas {
            let alpha = ComplexOrder::real(a)?;
            for &t in &o.times {
                let spectral = spherical_mean(&f, alpha, t)?;
                let direct = f.ball_average_direct(alpha, t)?;
                let rel = spectral.sub(&direct)?.lp_norm(2.0)? / direct.lp_norm(2.0)?;
                rows.push(OracleRow { field: name.clone(), alpha: a, t, rel_l2: rel });
            }
        }
    }
    art.csv("oracle", &rows)?;
    let worst = rows.iter().map(|r| r.rel_l2).fold(0.0, f64::max);
    Ok(vec![Verdict::at_most(
        "oracle-l2",
        worst,
        o.tolerance,
        0.0,
        format!("largest relative L2 gap, m = {}", o.m),
    )])
}

#[derive(Serialize)]
struct PacketRow {
    j: u32,
    m: usize,
    t_samples: usize,
    on_slab_min: f64,
    sup_norm: f64,
    sobolev_norm: f64,
    sobolev_m: usize,
    a1_ratio: f64,
    slab_points: usize,
    under_resolved: bool,
}

fn packet_sweep(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Verdict>> {
    let pp = &cfg.packet;
    let alpha = ComplexOrder::real(pp.alpha)?;
    let cert = choose_m(alpha, pp.n, pp.terms)?;
    let syms = main_symbols(alpha, pp.n, pp.terms, cert.m)?;
    let mut rows = Vec::new();
    for j in pp.j_min..=pp.j_max {
        let pk = Packet::new(j, pp.delta, pp.n)?;
        if pk.centre() * (1.0 - pp.delta) < 2.0 * cert.m {
            anyhow::bail!("j = {j}: packet overlaps the low-frequency cutoff (M = {})", cert.m);
        }
        let g = pk.grid(pp.length, 256)?;
        let f = packet_spectrum(&pk, &g)?;
        let tg = packet_time_grid(&pk)?;
        let rep = packet_lower_bound(&pk, &f, &syms, &tg, pp.p)?;
        drop(f);
        // |f|^p carries p times the packet bandwidth; a doubled lattice keeps
        // the Riemann sum clear of aliasing
        let gs = pk.grid(pp.length, 2 * g.m())?;
        let sob = wave_packet(&pk, &gs)?.sobolev_norm(pp.s, pp.p)?;
        rows.push(PacketRow {
            j,
            m: g.m(),
            t_samples: rep.t_samples,
            on_slab_min: rep.on_slab_min,
            sup_norm: rep.sup_norm,
            sobolev_norm: sob,
            sobolev_m: gs.m(),
            a1_ratio: rep.a1_ratio(),
            slab_points: rep.slab_points,
            under_resolved: rep.under_resolved,
        });
    }
    art.csv("packet", &rows)?;
    let scale: Vec<f64> = rows.iter().map(|r| 2f64.powi(r.j as i32)).collect();
    let fit = |v: Vec<f64>| fit_loglog(&scale, &v);
    let on = fit(rows.iter().map(|r| r.on_slab_min).collect())?;
    let lhs = fit(rows.iter().map(|r| r.sup_norm).collect())?;
    let sob = fit(rows.iter().map(|r| r.sobolev_norm).collect())?;
    let n = pp.n as f64;
    let t_on = (n + 1.0) / 2.0;
    let t_lhs = (n + 1.0) / 2.0 - (n - 1.0) / (2.0 * pp.p);
    let t_sob = pp.s + (n + 1.0) / 2.0 - (n + 1.0) / (2.0 * pp.p);
    art.svg(
        "packet",
        line_plot(
            "Wave-packet norms against scale",
            "j",
            "log2 value",
            &[
                Series::new("on-slab min of sup_t", on.points.clone()),
                Series::new("L^p norm of sup_t", lhs.points.clone()),
                Series::new("Sobolev norm of f", sob.points.clone()),
                Series::new("fits", fit_line(&lhs)).dashed(),
            ],
        ),
    )?;
    let flag = if rows.iter().any(|r| r.under_resolved) { "; t-grid under-resolved" } else { "" };
    let range = format!("j in [{}, {}]{flag}", pp.j_min, pp.j_max);
    Ok(vec![
        Verdict::within("packet-onslab-slope", on.slope, t_on, pp.slope_tolerance, range.clone()),
        Verdict::within("packet-lhs-slope", lhs.slope, t_lhs, pp.slope_tolerance, range.clone()),
        Verdict::within("packet-sobolev-slope", sob.slope, t_sob, pp.slope_tolerance, range.clone()),
        Verdict::within("packet-gap", lhs.slope - sob.slope, t_lhs - t_sob, pp.gap_tolerance, range),
    ])
}

#[derive(Serialize)]
struct ProbeRow {
    beta: f64,
    m: usize,
    aperture: f64,
    approach: &'static str,
    part: &'static str,
    slope: f64,
    halved_slope: f64,
    collar_lo: f64,
    collar_hi: f64,
    stable: bool,
}

#[derive(Serialize)]
struct ProbeSample {
    beta: f64,
    eps: f64,
    value: f64,
}

fn probe(b: &BlowupParams, beta: f64, m: usize, aperture: f64, approach: Approach, part: ScriptPart) -> Result<(ProbeRow, ProbeReport<f64>)> {
    let cone = ConeCutoff::along_first_axis(b.n, aperture)?;
    let ext = RadialExtremal::simple(beta, cone)?;
    let mut pc = ProbeConfig::new(b.length, m);
    pc.approach = approach;
    pc.part = part;
    pc.samples = b.samples;
    pc.eps_max = b.eps_max;
    let rep = blowup_probe(&ext, &pc)?;
    let row = ProbeRow {
        beta,
        m,
        aperture,
        approach: match approach {
            Approach::Outside => "outside",
            Approach::Inside => "inside",
        },
        part: match part {
            ScriptPart::A1 => "a1",
            ScriptPart::A2 => "a2",
            ScriptPart::Both => "both",
        },
        slope: rep.fit.slope,
        halved_slope: rep.halved_slope,
        collar_lo: rep.collar.0,
        collar_hi: rep.collar.1,
        stable: rep.stable,
    };
    Ok((row, rep))
}

fn radial_blowup(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Verdict>> {
    let b = &cfg.blowup;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    let mut series = Vec::new();
    let (mut dev, mut dbl, mut ap, mut unstable) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for &beta in &b.betas {
        let target = beta - (b.n as f64 + 1.0) / 2.0;
        let (base, rep) = probe(b, beta, b.m, b.aperture, Approach::Outside, ScriptPart::A2)?;
        let (fine, _) = probe(b, beta, 2 * b.m, b.aperture, Approach::Outside, ScriptPart::A2)?;
        let (narrow, _) = probe(b, beta, b.m, b.aperture_halved, Approach::Outside, ScriptPart::A2)?;
        let (inside, _) = probe(b, beta, b.m, b.aperture, Approach::Inside, ScriptPart::A2)?;
        let (a1, _) = probe(b, beta, b.m, b.aperture, Approach::Outside, ScriptPart::A1)?;
        dev = dev.max((base.slope - target).abs());
        dbl = dbl.max((fine.slope - base.slope).abs());
        ap = ap.max((narrow.slope - base.slope).abs());
        unstable += [&base, &fine].iter().filter(|r| !r.stable).count();
        samples.extend(rep.eps.iter().zip(&rep.values).map(|(&eps, &value)| ProbeSample { beta, eps, value }));
        series.push(Series::new(format!("beta = {beta}"), rep.fit.points.clone()));
        series.push(Series::new(format!("fit, slope {:.3}", rep.fit.slope), fit_line(&rep.fit)).dashed());
        rows.extend([base, fine, narrow, inside, a1]);
    }
    art.csv("blowup", &rows)?;
    art.csv("blowup_samples", &samples)?;
    art.svg("blowup", line_plot("Blow-up near the unit sphere", "log2 eps", "log2 |A f|", &series))?;
    let mut slope = Verdict::at_most(
        "blowup-slope",
        dev,
        0.0,
        b.slope_tolerance,
        format!("largest |slope - (beta - (n+1)/2)| at m = {}, outside", b.m),
    );
    if unstable > 0 {
        slope.pass = false;
        slope.detail += &format!("; {unstable} probe(s) found no stable collar");
    }
    Ok(vec![
        slope,
        Verdict::at_most("blowup-doubling", dbl, 0.0, b.doubling_tolerance, format!("m = {} against {}", b.m, 2 * b.m)),
        Verdict::at_most(
            "blowup-aperture",
            ap,
            0.0,
            b.aperture_tolerance,
            format!("aperture {} against {}", b.aperture, b.aperture_halved),
        ),
    ])
}

#[derive(Serialize)]
struct TailRow {
    exponent: f64,
    slope: f64,
    target: f64,
    stderr: f64,
    tau_lo: f64,
    tau_hi: f64,
}

fn tail_decay(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Verdict>> {
    let t = &cfg.tail;
    let cut = CutoffFamily::new(t.cutoff_m)?;
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for &m in &t.exponents {
        let fit = tail_decay_slope(m, &cut, (t.tau_min, t.tau_max), t.points)?;
        series.push(Series::new(format!("m = {m}"), fit.points.clone()));
        let (lo, hi) = fit.range();
        rows.push(TailRow { exponent: m, slope: fit.slope, target: -(m + 1.0), stderr: fit.stderr, tau_lo: lo, tau_hi: hi });
    }
    art.csv("tail", &rows)?;
    art.svg("tail", line_plot("Oscillatory tail as tau -> 0", "log2 tau", "log2 |I(tau) - I_0|", &series))?;
    let dev = rows.iter().map(|r| (r.slope - r.target).abs()).fold(0.0, f64::max);
    Ok(vec![Verdict::at_most(
        "tail-slope",
        dev,
        0.0,
        t.tolerance,
        format!("largest |slope + m + 1| over tau in [{:e}, {:e}]", t.tau_min, t.tau_max),
    )])
}

/// Gaussian coefficients on the support of `ψ_j`, one ChaCha stream per draw.
pub fn annulus_field(g: &Grid<f64>, cut: &CutoffFamily<f64>, j: i32, seed: u64, stream: u64) -> Result<SampledField<f64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut coeffs = SampledField::zeros(g, sphermax::fields::Side::Frequency)?;
    let mut idx = vec![0usize; g.dim()];
    let mut xi = vec![0.0; g.dim()];
    for (k, z) in coeffs.values_mut().iter_mut().enumerate() {
        g.unravel(k, &mut idx);
        for (a, &i) in idx.iter().enumerate() {
            xi[a] = g.freq(a, i);
        }
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        // draw for every lattice point so the stream position never depends on the cutoff
        let (re, im): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
        let w = cut.psi_at(j, r);
        if w != 0.0 {
            *z = Complex64::new(re, im) * w;
        }
    }
    Ok(coeffs.into_space()?)
}

#[derive(Serialize)]
struct FioRow {
    j: i32,
    draws: usize,
    max_ratio: f64,
    mean_ratio: f64,
}

fn fio_slope(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Verdict>> {
    let p = &cfg.fio;
    let g = Grid::new(p.n, p.length, p.m)?;
    let cut = CutoffFamily::new(p.cutoff_m)?;
    if 2f64.powi(p.j_max + 1) * p.cutoff_m > g.nyquist() {
        anyhow::bail!("psi_{} reaches past Nyquist {}", p.j_max, g.nyquist());
    }
    let mut rows = Vec::new();
    for j in p.j_min..=p.j_max {
        let mut ratios = Vec::with_capacity(p.draws);
        for d in 0..p.draws {
            let f = annulus_field(&g, &cut, j, cfg.seed, ((j as u64) << 32) | d as u64)?;
            let tf = lp_piece(&f, Piece::Phase { sign: Sign::Plus, ell: 0 }, j, 1.0, &cut)?;
            ratios.push(tf.lp_norm(p.p)? / f.lp_norm(p.p)?);
        }
        rows.push(FioRow {
            j,
            draws: p.draws,
            max_ratio: ratios.iter().copied().fold(0.0, f64::max),
            mean_ratio: ratios.iter().sum::<f64>() / p.draws as f64,
        });
    }
    art.csv("fio", &rows)?;
    let scale: Vec<f64> = rows.iter().map(|r| 2f64.powi(r.j)).collect();
    let fit = fit_loglog(&scale, &rows.iter().map(|r| r.max_ratio).collect::<Vec<_>>())?;
    art.svg(
        "fio",
        line_plot(
            "Fixed-time operator on random annuli",
            "j",
            "log2 max ratio",
            &[Series::new("max over draws", fit.points.clone()), Series::new("fit", fit_line(&fit)).dashed()],
        ),
    )?;
    let bound = (p.n as f64 - 1.0) * (0.5 - 1.0 / p.p);
    Ok(vec![Verdict::at_most(
        "fio-slope",
        fit.slope,
        bound,
        p.slack,
        format!("slope of the max ratio over {} draws, j in [{}, {}]", p.draws, p.j_min, p.j_max),
    )])
}

#[derive(Serialize)]
struct RegionCsvRow {
    p: f64,
    classical_low: Option<f64>,
    classical_high: Option<f64>,
    combined: Option<f64>,
    necessary: Option<f64>,
    sufficient_planar: Option<f64>,
    local_smoothing: Option<f64>,
    combined_wider: bool,
    local_smoothing_within: bool,
    exceeds_trivial: bool,
    planar_sharp: Option<bool>,
}

fn rat(v: f64) -> Result<Rational64> {
    Rational64::approximate_float(v).ok_or_else(|| anyhow::anyhow!("{v} has no rational approximation"))
}

fn regions(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Verdict>> {
    let rp = &cfg.regions;
    let q = Rational64::new;
    let two = q(2, 1);
    let step = (rat(rp.p_max)? - two) / Rational64::from_integer(rp.p_points as i64);
    let grid: Vec<Rational64> = (1..=rp.p_points as i64).map(|k| two + step * Rational64::from_integer(k)).collect();
    let f = |v: Option<Rational64>| v.map(|r| *r.numer() as f64 / *r.denom() as f64);

    let mut planar_ok = true;
    let mut inclusion_ok = true;
    let mut violations = Vec::new();
    for &n in &rp.dims {
        let table = region_compare::<Rational64>(n, &grid)?;
        let get = |row: &sphermax::analysis::RegionRow<Rational64>, c: Curve| f(row.values.iter().find(|(k, _)| *k == c).and_then(|(_, v)| *v));
        let rows: Vec<RegionCsvRow> = table
            .rows
            .iter()
            .map(|r| RegionCsvRow {
                p: f(Some(r.p)).unwrap(),
                classical_low: get(r, Curve::ClassicalLow),
                classical_high: get(r, Curve::ClassicalHigh),
                combined: get(r, Curve::Combined),
                necessary: get(r, Curve::Necessary),
                sufficient_planar: get(r, Curve::SufficientPlanar),
                local_smoothing: get(r, Curve::LocalSmoothing),
                combined_wider: r.combined_wider,
                local_smoothing_within: r.local_smoothing_within,
                exceeds_trivial: r.exceeds_trivial,
                planar_sharp: r.planar_sharp,
            })
            .collect();
        let series: Vec<Series> = Curve::ALL
            .iter()
            .map(|&c| Series::new(c.label(), table.rows.iter().filter_map(|r| get(r, c).map(|v| (f(Some(r.p)).unwrap(), v))).collect()))
            .filter(|s| !s.points.is_empty())
            .collect();
        art.csv(&format!("regions_n{n}"), &rows)?;
        art.svg(&format!("regions_n{n}"), line_plot(&format!("Exponent thresholds, n = {n}"), "p", "Re alpha", &series))?;
        if n == 2 {
            planar_ok = table.planar_sharp_everywhere();
            inclusion_ok = table.local_smoothing_within_everywhere();
        } else {
            let bad: Vec<String> = table.rows.iter().filter(|r| !r.local_smoothing_within).map(|r| format!("{}", r.p)).collect();
            if !bad.is_empty() {
                violations.push(format!("n={n}: {} grid points, first p = {}", bad.len(), bad[0]));
            }
        }
    }

    // worked points
    let mut misses = 0;
    let r2 = threshold_regions::<Rational64>(2)?;
    misses += (r2.value(Curve::Necessary, &two) != Some(q(0, 1))) as usize;
    for n in 2..=6i64 {
        misses += (threshold_regions::<Rational64>(n as usize)?.crossover() != q(2 * n, n - 1)) as usize;
    }
    misses += (threshold_regions::<Rational64>(4)?.wave_failure_threshold() != Some(q(6, 1))) as usize;
    misses += (threshold_regions::<Rational64>(3)?.value(Curve::LocalSmoothing, &q(4, 1)) != Some(q(-1, 14))) as usize;

    let detail = if violations.is_empty() { "n = 2 grid".to_string() } else { format!("n = 2 grid; outside it {}", violations.join("; ")) };
    Ok(vec![
        Verdict::at_most("regions-worked-points", misses as f64, 0.0, 0.0, "mismatches among the exact worked values"),
        Verdict::at_most("regions-sharp-n2", (!planar_ok) as u8 as f64, 0.0, 0.0, "grid points where the planar curves differ"),
        Verdict::at_most("regions-inclusion", (!inclusion_ok) as u8 as f64, 0.0, 0.0, detail),
    ])
}
