use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mct_core::channels::ChannelKind;
use mct_core::codes::{self, ParityCheckMatrix, RegularEnsemble, TannerGraph};
use mct_core::decoders::{bit_flip_decode, bp_decode_with, BpConfig};
use mct_core::density_evolution::{bp_threshold, run_de, DeConfig};
use mct_core::harness::{self, ExperimentConfig};
use mct_core::markov_channels::{self as gec, JointDecodeOptions, MarkovChannelSpec};
use mct_core::rng::{derived, seeded};
use mct_core::rs_free_energy::{conditional_entropy_rs, map_threshold, rs_config};
use mct_core::satisfiability::{self as sat, CnfFormula, ProbeMethod};
use mct_core::weight_enumerator as we;
use mct_core::{Error, Result};

#[derive(Parser)]
#[command(name = "mct", version, about = "Sparse-graph coding workbench")]
struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Directory for output files.
    #[arg(long, global = true, env = "MCT_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample or inspect LDPC codes.
    #[command(subcommand)]
    Codes(CodesCmd),
    /// Transmit a codeword and decode it.
    Decode(DecodeArgs),
    /// Density evolution.
    #[command(subcommand)]
    De(DeCmd),
    /// Weight-enumerator growth rates.
    #[command(subcommand)]
    We(WeCmd),
    /// Replica-symmetric entropy and MAP thresholds.
    #[command(subcommand)]
    Rs(RsCmd),
    /// Finite-state Markov channels.
    #[command(subcommand)]
    Gec(GecCmd),
    /// Satisfiability marginals and correlation-decay probes.
    #[command(subcommand)]
    Sat(SatCmd),
    /// Run a Monte Carlo experiment from a TOML config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Output file stem.
        #[arg(long, default_value = "experiment")]
        name: String,
    },
    /// Fit the scaling law to experiment records (JSON).
    Scaling {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        eps_d: f64,
    },
}

#[derive(Args, Clone)]
struct EnsembleArgs {
    #[arg(long)]
    l: usize,
    #[arg(long)]
    k: usize,
}

#[derive(Args, Clone)]
struct CodeSource {
    /// Read the code from an alist file.
    #[arg(long, conflicts_with_all = ["l", "k", "n"])]
    alist: Option<PathBuf>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
}

impl CodeSource {
    fn load(&self, seed: u64) -> Result<TannerGraph> {
        if let Some(p) = &self.alist {
            return codes::read_alist(p);
        }
        match (self.l, self.k, self.n) {
            (Some(l), Some(k), Some(n)) => codes::sample_regular(&RegularEnsemble::new(l, k, n)?, &mut derived(seed, &[0])),
            _ => Err(Error::Config("give --alist or all of --l --k --n".into())),
        }
    }
}

#[derive(Subcommand)]
enum CodesCmd {
    /// Draw a code from the regular ensemble and write it as alist.
    Sample {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "code.alist")]
        out: String,
    },
    /// Rank, rate and girth of a code.
    Info {
        #[command(flatten)]
        src: CodeSource,
    },
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    src: CodeSource,
    #[arg(long, default_value = "bsc")]
    channel: ChannelKind,
    #[arg(long)]
    param: f64,
    #[arg(long, default_value = "bp")]
    decoder: String,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Send a uniform random codeword instead of all-zero.
    #[arg(long)]
    random_codeword: bool,
}

#[derive(Subcommand)]
enum DeCmd {
    /// Trajectory of P_b and entropy, written as CSV.
    Run {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value = "bsc")]
        channel: ChannelKind,
        #[arg(long)]
        param: f64,
        #[arg(long, default_value_t = 100)]
        iterations: usize,
        #[arg(long, default_value_t = 100_000)]
        population: usize,
    },
    /// BP threshold by bisection.
    Threshold {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value = "bsc")]
        channel: ChannelKind,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        population: usize,
    },
}

#[derive(Subcommand)]
enum WeCmd {
    /// φ(ω) on a grid.
    Curve {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value_t = 500)]
        grid: usize,
    },
    /// First positive zero of φ.
    OmegaStar {
        #[command(flatten)]
        ens: EnsembleArgs,
    },
    /// Exact expected weight enumerator at blocklength N.
    Exact {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum RsCmd {
    /// Conditional entropy per bit at one channel parameter.
    Entropy {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value = "bsc")]
        channel: ChannelKind,
        #[arg(long)]
        param: f64,
        #[arg(long, default_value_t = 100_000)]
        population: usize,
        #[arg(long, default_value_t = 2_000_000)]
        samples: usize,
    },
    /// MAP threshold by bisection on the sign of φ.
    Threshold {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value = "bsc")]
        channel: ChannelKind,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        population: usize,
        #[arg(long, default_value_t = 2_000_000)]
        samples: usize,
    },
}

#[derive(Args, Clone)]
struct SpecArg {
    /// JSON channel spec; the three-state example when absent.
    #[arg(long)]
    spec: Option<PathBuf>,
}

impl SpecArg {
    fn load(&self) -> Result<MarkovChannelSpec> {
        match &self.spec {
            Some(p) => MarkovChannelSpec::from_json_file(p),
            None => Ok(MarkovChannelSpec::three_state_example()),
        }
    }
}

#[derive(Subcommand)]
enum GecCmd {
    /// Steady state and average crossover.
    Steady {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// Entropy rates and information rate on one sample path.
    Rate {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
    },
    /// Joint state estimation and decoding on a sampled code.
    Decode {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        rounds: usize,
        #[arg(long)]
        window: Option<usize>,
        /// Histogram bins written alongside the result.
        #[arg(long, default_value_t = 200)]
        bins: usize,
    },
}

#[derive(Args, Clone)]
struct FormulaSource {
    #[arg(long, conflicts_with = "random")]
    cnf: Option<PathBuf>,
    /// N α k
    #[arg(long, num_args = 3, value_names = ["N", "ALPHA", "K"])]
    random: Option<Vec<f64>>,
    /// Redraw repeated clauses.
    #[arg(long)]
    distinct: bool,
}

impl FormulaSource {
    fn load(&self, seed: u64) -> Result<CnfFormula> {
        if let Some(p) = &self.cnf {
            return CnfFormula::read_dimacs(p);
        }
        match self.random.as_deref() {
            Some([n, a, k]) => sat::random_ksat(*n as usize, *a, *k as usize, self.distinct, &mut seeded(seed)),
            _ => Err(Error::Config("give --cnf or --random N ALPHA K".into())),
        }
    }
}

#[derive(Subcommand)]
enum SatCmd {
    /// BP marginals, plus exact ones when N ≤ 24.
    Marginals {
        #[command(flatten)]
        src: FormulaSource,
        #[arg(long, default_value_t = 100)]
        iterations: usize,
        #[arg(long, default_value_t = 0.0)]
        damping: f64,
    },
    /// Spread of the root field over boundary conditions on random tree formulas.
    Probe {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 3)]
        t: usize,
        #[arg(long, default_value_t = 1000)]
        trees: usize,
        /// Exhaustive below this boundary size, sampled above.
        #[arg(long, default_value_t = 16)]
        limit: usize,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
    },
}

fn print_json<T: Serialize + ?Sized>(v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Error::Config(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn out_path(dir: &Path, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir.join(name))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    let dir = cli.out_dir.as_path();
    match cli.cmd {
        Command::Codes(CodesCmd::Sample { ens, n, out }) => {
            let g = codes::sample_regular(&RegularEnsemble::new(ens.l, ens.k, n)?, &mut derived(seed, &[0]))?;
            let path = out_path(dir, &out)?;
            codes::write_alist(&g, &path)?;
            eprintln!("wrote {}", path.display());
        }
        Command::Codes(CodesCmd::Info { src }) => {
            let g = src.load(seed)?;
            let h = ParityCheckMatrix::from_graph(&g);
            #[derive(Serialize)]
            struct Info {
                n: usize,
                m: usize,
                edges: usize,
                rank: usize,
                rate: f64,
                girth: Option<usize>,
            }
            print_json(&Info {
                n: g.n(),
                m: g.m(),
                edges: g.num_edges(),
                rank: h.rank(),
                rate: h.actual_rate(),
                girth: codes::girth(&g),
            })?;
        }
        Command::Decode(a) => {
            let g = a.src.load(seed)?;
            let channel = a.channel.with_param(a.param);
            channel.validate()?;
            if !channel.is_symmetric() && !a.random_codeword {
                return Err(Error::Config("asymmetric channels need --random-codeword".into()));
            }
            let mut rng = derived(seed, &[1]);
            let x = if a.random_codeword {
                ParityCheckMatrix::from_graph(&g).sample_codeword(&mut rng)
            } else {
                vec![0; g.n()]
            };
            let y = channel.transmit(&x, &mut rng);
            let res = match a.decoder.as_str() {
                "bp" => {
                    let llrs: Vec<f64> = channel.llrs(&y)?.into_iter().map(|l| l.0).collect();
                    let cfg = BpConfig {
                        max_iter: a.max_iter,
                        ..BpConfig::default()
                    };
                    bp_decode_with(&g, &llrs, &cfg, Some(&x), &mut rng)?
                }
                "flip" => {
                    let bits: Vec<u8> = y
                        .iter()
                        .map(|o| match o {
                            mct_core::channels::Output::Bit(b) => Ok(*b),
                            _ => Err(Error::Config("flip decoding needs a binary-output channel".into())),
                        })
                        .collect::<Result<_>>()?;
                    bit_flip_decode(&g, &bits, a.max_iter, Some(&x), &mut rng)?
                }
                other => return Err(Error::Config(format!("unknown decoder '{other}'"))),
            };
            eprintln!("bit errors: {}", res.bit_errors(&x));
            print_json(&res)?;
        }
        Command::De(DeCmd::Run {
            ens,
            channel,
            param,
            iterations,
            population,
        }) => {
            let cfg = DeConfig {
                population,
                seed,
                ..DeConfig::default()
            };
            let traj = run_de(ens.l, ens.k, channel.with_param(param), iterations, cfg)?;
            let path = out_path(dir, "de_trajectory.csv")?;
            write_text(&path, &traj.to_csv())?;
            eprintln!("wrote {}", path.display());
            println!("final pb = {}", traj.pb.last().copied().unwrap_or(f64::NAN));
        }
        Command::De(DeCmd::Threshold {
            ens,
            channel,
            tol,
            population,
        }) => {
            let cfg = DeConfig {
                population,
                seed,
                ..DeConfig::default()
            };
            let t = bp_threshold(ens.l, ens.k, channel, tol, cfg)?;
            eprintln!("threshold ≈ {:.5} ± {:.5}", t.estimate(), t.resolution());
            print_json(&t)?;
        }
        Command::We(WeCmd::Curve { ens, grid }) => {
            let curve = we::growth_curve(ens.l, ens.k, grid)?;
            let mut s = String::from("omega,phi\n");
            for p in &curve {
                s.push_str(&format!("{},{}\n", p.omega, p.phi));
            }
            let path = out_path(dir, "growth_curve.csv")?;
            write_text(&path, &s)?;
            eprintln!("wrote {}", path.display());
        }
        Command::We(WeCmd::OmegaStar { ens }) => {
            println!("{}", we::omega_star(ens.l, ens.k, 1e-9)?);
        }
        Command::We(WeCmd::Exact { ens, n }) => {
            let all = we::expected_weight_enumerator_all(ens.l, ens.k, n)?;
            println!("w,expected");
            for (w, v) in all.iter().enumerate() {
                println!("{w},{v}");
            }
        }
        Command::Rs(RsCmd::Entropy {
            ens,
            channel,
            param,
            population,
            samples,
        }) => {
            let e = conditional_entropy_rs(ens.l, ens.k, channel.with_param(param), &rs_config(population, samples, seed))?;
            println!("{} ± {}", e.value.value, e.value.std_error);
        }
        Command::Rs(RsCmd::Threshold {
            ens,
            channel,
            tol,
            population,
            samples,
        }) => {
            let t = map_threshold(ens.l, ens.k, channel, tol, &rs_config(population, samples, seed))?;
            eprintln!("MAP threshold ≈ {:.5} ± {:.5}", t.estimate(), t.resolution());
            print_json(&t)?;
        }
        Command::Gec(GecCmd::Steady { spec }) => {
            let s = spec.load()?;
            #[derive(Serialize)]
            struct Steady {
                steady_state: Vec<f64>,
                average_crossover: f64,
                ergodic: bool,
            }
            print_json(&Steady {
                steady_state: s.steady_state()?,
                average_crossover: s.average_crossover()?,
                ergodic: s.is_ergodic(),
            })?;
        }
        Command::Gec(GecCmd::Rate { spec, n }) => {
            print_json(&gec::entropy_rates(&spec.load()?, n, seed)?)?;
        }
        Command::Gec(GecCmd::Decode {
            spec,
            ens,
            n,
            rounds,
            window,
            bins,
        }) => {
            let s = spec.load()?;
            let g = codes::sample_regular(&RegularEnsemble::new(ens.l, ens.k, n)?, &mut derived(seed, &[0]))?;
            let mut rng = derived(seed, &[1]);
            let x = ParityCheckMatrix::from_graph(&g).sample_codeword(&mut rng);
            let init = s.initial_distribution()?;
            let sample = gec::transmit(&s, &x, &init, &mut rng)?;
            let opts = JointDecodeOptions {
                rounds,
                window,
                ..JointDecodeOptions::default()
            };
            let res = gec::joint_decode_gec(&g, &s, &sample.outputs, &opts, Some(&x), &mut rng)?;
            let genie = bp_decode_with(
                &g,
                &gec::genie_llrs(&s, &sample),
                &BpConfig {
                    max_iter: rounds,
                    ..BpConfig::default()
                },
                None,
                &mut rng,
            )?;
            eprintln!("joint bit errors: {}, genie bit errors: {}", res.decode.bit_errors(&x), genie.bit_errors(&x));
            let mut csv = String::from("center_half,count_half,center_ln,count_ln\n");
            let half = res.llr_histogram(false, bins, 5.0);
            let full = res.llr_histogram(true, bins, 10.0);
            for i in 0..bins {
                csv.push_str(&format!("{},{},{},{}\n", half.center(i), half.counts[i], full.center(i), full.counts[i]));
            }
            let path = out_path(dir, "gec_llr_histogram.csv")?;
            write_text(&path, &csv)?;
            eprintln!("wrote {}", path.display());
            print_json(&res.decode)?;
        }
        Command::Sat(SatCmd::Marginals { src, iterations, damping }) => {
            let f = src.load(seed)?;
            let g = f.to_factor_graph()?;
            let bp = sat::generic_bp(&g, iterations, sat::BpInit::Uniform, damping)?;
            let exact = (f.n <= sat::BRUTE_FORCE_LIMIT).then(|| sat::brute_force_marginals(&f));
            println!("var,bp_true,exact_true");
            let exact_vals = match exact {
                Some(Ok(m)) => {
                    eprintln!("solutions: {}", m.solutions);
                    Some(m.p_true)
                }
                Some(Err(e)) => {
                    eprintln!("exact marginals unavailable: {e}");
                    None
                }
                None => None,
            };
            for (i, m) in bp.iter().enumerate() {
                let ex = exact_vals.as_ref().map_or(String::new(), |v| v[i].to_string());
                println!("{},{},{}", i + 1, m[1], ex);
            }
        }
        Command::Sat(SatCmd::Probe {
            k,
            alpha,
            t,
            trees,
            limit,
            samples,
        }) => {
            let mut rng = seeded(seed);
            let mut spread = 0.0;
            let mut used = 0usize;
            for i in 0..trees {
                let tree = sat::sample_tree_formula(k, alpha, t, &mut rng)?;
                let method = if tree.boundary().len() <= limit {
                    ProbeMethod::Exhaustive { limit }
                } else {
                    ProbeMethod::Sampled {
                        samples,
                        seed: mct_core::rng::derive_seed(seed, &[i as u64]),
                    }
                };
                match sat::decay_probe(&tree, &method) {
                    Ok(p) => {
                        spread += p.mu_spread;
                        used += 1;
                    }
                    Err(Error::Degenerate(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            println!("mean spread = {} over {used} trees", spread / used.max(1) as f64);
        }
        Command::Experiment { config, name } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if cfg.seed == 0 {
                cfg.seed = seed;
            }
            let recs = harness::run_experiment(&cfg)?;
            let csv = out_path(dir, &format!("{name}.csv"))?;
            let json = out_path(dir, &format!("{name}.json"))?;
            harness::write_records_csv(&csv, &recs)?;
            harness::write_json(&json, &recs)?;
            eprintln!("wrote {} and {}", csv.display(), json.display());
        }
        Command::Scaling { records, eps_d } => {
            let recs: Vec<harness::ErrorRateRecord> = harness::read_json(&records)?;
            print_json(&harness::scaling_compare(&recs, eps_d)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
