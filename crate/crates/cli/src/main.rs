use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use sphermax::bessel::ComplexOrder;
use sphermax::extremals::{wave_packet, ConeCutoff, Packet, RadialExtremal, radial_extremal};
use sphermax::fields::{Grid, SampledField};
use sphermax::multiplier::{choose_m, main_symbols, residual_with, BesselPolicy, MHat};
use sphermax::operators::{half_wave, spherical_mean, Sign};
use sphermax_cli::{Config, Experiment, ExperimentRun};

#[derive(Parser)]
#[command(name = "sphermax", version, about = "Spherical means of complex order: experiments and field tools")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Run directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a configured experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Error of the N-term Bessel expansion against quadrature.
    BesselCheck {
        #[arg(long, default_value_t = 0.0)]
        re: f64,
        #[arg(long, default_value_t = 0.0)]
        im: f64,
        #[arg(long, default_value_t = 3)]
        terms: usize,
        #[arg(long, default_value_t = 8.0)]
        r_min: f64,
        #[arg(long, default_value_t = 256.0)]
        r_max: f64,
    },
    /// Tabulate the multiplier, its main symbols and the residual.
    MultiplierDump {
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha_im: f64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        terms: usize,
        #[arg(long, default_value_t = 64.0)]
        rho_max: f64,
        #[arg(long, default_value_t = 512)]
        points: usize,
    },
    /// Apply an operator to a stored field, or to a Gaussian if none is given.
    OperatorApply {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Op::Mean)]
        op: Op,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Build an extremal field and store it.
    ExtremalBuild {
        #[arg(long, value_enum, default_value_t = Kind::Radial)]
        kind: Kind,
        #[arg(long, default_value_t = 1.2)]
        beta: f64,
        #[arg(long, default_value_t = 0.1)]
        aperture: f64,
        #[arg(long, default_value_t = 5)]
        j: u32,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Blow-up probe of the radial extremal near the unit sphere.
    Probe {
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.1, 1.2])]
        beta: Vec<f64>,
        #[arg(long, default_value_t = 32768)]
        m: usize,
        #[arg(long, default_value_t = 2.5)]
        length: f64,
        #[arg(long, default_value_t = 0.25)]
        aperture: f64,
    },
    /// Exponent-region tables and plots.
    Regions {
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4])]
        n: Vec<usize>,
    },
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 8.0)]
    length: f64,
    #[arg(long, default_value_t = 256)]
    m: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Mean,
    HalfWavePlus,
    HalfWaveMinus,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Radial,
    Packet,
}

fn finish(run: ExperimentRun, out: &std::path::Path) -> Result<()> {
    for v in &run.verdicts {
        println!(
            "{:24} {}  measured {:.6}  target {:.6}  tol {:.3}  ({})",
            v.criterion,
            if v.pass { "PASS" } else { "FAIL" },
            v.measured,
            v.target,
            v.tolerance,
            v.detail
        );
    }
    println!("run {} -> {}", &run.id[..12], out.display());
    if !run.passed() {
        std::process::exit(2);
    }
    Ok(())
}

fn run_config(mut cfg: Config, g: &Global) -> Result<()> {
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(t) = g.threads {
        cfg.threads = t;
    }
    sphermax_cli::init_threads(cfg.threads);
    let run = sphermax_cli::run(&cfg, &g.out)?;
    finish(run, &g.out)
}

fn write_field(f: &SampledField<f64>, g: &Global, stem: &str) -> Result<()> {
    std::fs::create_dir_all(&g.out)?;
    let bin = g.out.join(format!("{stem}.bin"));
    f.write_binary(BufWriter::new(File::create(&bin)?))?;
    f.write_slice_csv(0, BufWriter::new(File::create(g.out.join(format!("{stem}_slice.csv")))?))?;
    println!("wrote {} and its axis slice", bin.display());
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let g = &cli.global;
    match cli.cmd {
        Cmd::Run { config } => run_config(Config::load(&config).with_context(|| format!("loading {}", config.display()))?, g),
        Cmd::BesselCheck { re, im, terms, r_min, r_max } => {
            let mut cfg = Config::new(Experiment::BesselCheck);
            cfg.bessel.orders = vec![[re, im]];
            cfg.bessel.terms = vec![terms];
            cfg.bessel.r_min = r_min;
            cfg.bessel.r_max = r_max;
            run_config(cfg, g)
        }
        Cmd::Probe { beta, m, length, aperture } => {
            let mut cfg = Config::new(Experiment::RadialBlowup);
            cfg.blowup.betas = beta;
            cfg.blowup.m = m;
            cfg.blowup.length = length;
            cfg.blowup.aperture = aperture;
            cfg.blowup.aperture_halved = aperture / 2.0;
            run_config(cfg, g)
        }
        Cmd::Regions { n } => {
            let mut cfg = Config::new(Experiment::Regions);
            cfg.regions.dims = n;
            run_config(cfg, g)
        }
        Cmd::MultiplierDump { alpha, alpha_im, n, terms, rho_max, points } => {
            sphermax_cli::init_threads(g.threads.unwrap_or(0));
            let a = ComplexOrder::new(alpha, alpha_im)?;
            let mh = MHat::new(a, n, BesselPolicy::Hybrid)?;
            let cert = choose_m(a, n, terms)?;
            let syms = main_symbols(a, n, terms, cert.m)?;
            std::fs::create_dir_all(&g.out)?;
            let path = g.out.join("multiplier.csv");
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["rho", "m_re", "m_im", "a1_re", "a1_im", "a2_re", "a2_im", "residual_abs"])?;
            for k in 0..points {
                let rho = rho_max * k as f64 / (points - 1).max(1) as f64;
                let v = mh.eval(rho)?;
                let (a1, a2) = syms.at(rho);
                let res = if rho >= 2.0 * cert.m { residual_with(&mh, &syms, rho)?.norm() } else { f64::NAN };
                w.write_record([rho, v.re, v.im, a1.re, a1.im, a2.re, a2.im, res].map(|x| x.to_string()))?;
            }
            w.flush()?;
            println!("M = {} (certified |a_2| >= {:.3e}); wrote {}", cert.m, cert.c_low, path.display());
            Ok(())
        }
        Cmd::OperatorApply { input, op, alpha, t, grid } => {
            sphermax_cli::init_threads(g.threads.unwrap_or(0));
            let f = match input {
                Some(p) => SampledField::read_binary(BufReader::new(File::open(&p).with_context(|| format!("opening {}", p.display()))?))?,
                None => {
                    let gr = Grid::new(grid.n, grid.length, grid.m)?;
                    SampledField::from_space_fn(&gr, |x| {
                        Complex64::new((-std::f64::consts::PI * x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
                    })?
                }
            };
            let out = match op {
                Op::Mean => spherical_mean(&f, ComplexOrder::real(alpha)?, t)?,
                Op::HalfWavePlus => half_wave(&f, Sign::Plus, t)?,
                Op::HalfWaveMinus => half_wave(&f, Sign::Minus, t)?,
            };
            write_field(&out, g, "applied")
        }
        Cmd::ExtremalBuild { kind, beta, aperture, j, delta, grid } => {
            sphermax_cli::init_threads(g.threads.unwrap_or(0));
            match kind {
                Kind::Radial => {
                    let cone = ConeCutoff::along_first_axis(grid.n, aperture)?;
                    let ext = RadialExtremal::simple(beta, cone)?;
                    let f = radial_extremal(&ext, &Grid::new(grid.n, grid.length, grid.m)?)?;
                    write_field(&f, g, "radial_extremal")
                }
                Kind::Packet => {
                    let pk = Packet::new(j, delta, grid.n)?;
                    let gr = Grid::new(grid.n, grid.length, grid.m)?;
                    if !gr.nyquist().gt(&(pk.centre() * (1.0 + delta))) {
                        bail!("packet at j = {j} needs m/(2L) > {}; stored snapshots cannot carry a heterodyne shift", pk.centre() * (1.0 + delta));
                    }
                    write_field(&wave_packet(&pk, &gr)?, g, "packet")
                }
            }
        }
    }
}

