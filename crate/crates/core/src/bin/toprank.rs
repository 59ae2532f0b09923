use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use toprank::harness::adversary::default_probs;
use toprank::harness::stream::{read_stream, write_stream};
use toprank::harness::svg::{line_chart, log_thin, ChartOptions, Series};
use toprank::harness::{
    best_in_hindsight, fit_slope, run_experiment, AdversaryConfig, AdversaryKind, ExperimentConfig,
    LearnerKind,
};
use toprank::observability::{
    check_all_local, check_global, check_local, neighbor_pairs, neighborhood_set, pareto_witness,
    ObservabilityReport, Thresholds,
};
use toprank::{build_game, Game, Measure, RankError, Result};

/// Neighborhood samples per pair for the local analysis.
const NEIGHBORHOOD_SAMPLES: usize = 64;

#[derive(Parser)]
#[command(
    name = "toprank",
    version,
    about = "Online ranking with top-1 feedback"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdversaryArg {
    NoisyFixed,
    Iid,
    Replay,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    Global,
    Local,
    Neighbors,
    Pareto,
}

#[derive(Subcommand)]
enum Command {
    /// Run a learner against a generated or replayed relevance stream.
    Simulate {
        #[arg(long)]
        measure: Measure,
        #[arg(long, default_value = "rtop1f")]
        learner: LearnerKind,
        #[arg(long)]
        m: usize,
        #[arg(long = "T")]
        horizon: usize,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "noisy-fixed")]
        adversary: AdversaryArg,
        #[arg(long, default_value_t = 0.2)]
        noise_sd: f64,
        /// Maximum relevance level; above 1 switches noisy-fixed to its graded form.
        #[arg(long, default_value_t = 1)]
        levels: u32,
        /// Comma-separated per-object probabilities for `--adversary iid`.
        #[arg(long, value_delimiter = ',')]
        probs: Option<Vec<f64>>,
        /// Stream file to replay (`--adversary replay`).
        #[arg(long)]
        replay: Option<PathBuf>,
        /// Averaged regret trace (CSV).
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Also write the generated stream.
        #[arg(long)]
        stream: Option<PathBuf>,
        /// Start of the slope-fit window.
        #[arg(long, default_value_t = 1000)]
        burn_in: u64,
    },
    /// Observability analysis of the explicit game matrices.
    Analyze {
        #[arg(long)]
        measure: Measure,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum)]
        check: CheckArg,
        /// Action pair, 1-based.
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        pair: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report path; `.csv` gives the residual table, anything else text.
        #[arg(long)]
        out: PathBuf,
    },
    /// Best fixed ranking for a stream file.
    Besthindsight {
        #[arg(long)]
        measure: Measure,
        #[arg(long)]
        stream: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            measure,
            learner,
            m,
            horizon,
            runs,
            seed,
            adversary,
            noise_sd,
            levels,
            probs,
            replay,
            out,
            svg,
            stream,
            burn_in,
        } => {
            let kind = match adversary {
                AdversaryArg::NoisyFixed if levels > 1 => {
                    AdversaryKind::GradedNoisyFixed { levels, noise_sd }
                }
                AdversaryArg::NoisyFixed => AdversaryKind::NoisyFixed { noise_sd },
                AdversaryArg::Iid => AdversaryKind::IidBernoulli {
                    probs: probs.unwrap_or_else(|| default_probs(m)),
                },
                AdversaryArg::Replay => AdversaryKind::Replay {
                    path: replay.ok_or_else(|| {
                        RankError::InvalidConfig("--adversary replay needs --replay PATH".into())
                    })?,
                },
            };
            let config = ExperimentConfig {
                measure,
                learner,
                adversary: AdversaryConfig::new(kind, m, horizon, seed),
                runs,
                seed,
            };
            let output = run_experiment(&config)?;
            output
                .averaged
                .write_csv(BufWriter::new(File::create(&out)?))?;
            if let Some(path) = stream {
                let n = config.adversary.max_level();
                write_stream(BufWriter::new(File::create(path)?), n, &output.stream)?;
            }
            if let Some(path) = svg {
                let points: Vec<(f64, f64)> = output
                    .averaged
                    .rows()
                    .iter()
                    .map(|r| (r.t as f64, r.norm_regret))
                    .collect();
                let series = Series {
                    label: learner.to_string(),
                    points: log_thin(&points, 400),
                };
                let opts = ChartOptions {
                    title: format!("{measure}, m={m}, {runs} runs"),
                    ..ChartOptions::default()
                };
                fs::write(path, line_chart(&[series], &opts))?;
            }
            let last = output.averaged.rows().last();
            println!(
                "{measure} {learner} m={m} T={horizon} runs={runs}: final regret {:.4}, regret/T {:.6}",
                last.map_or(0.0, |r| r.regret),
                last.map_or(0.0, |r| r.norm_regret)
            );
            match fit_slope(&output.averaged, burn_in, horizon as u64) {
                Ok(fit) => println!(
                    "log-log slope on [{}, {}]: {:.4}",
                    fit.t_start, fit.t_end, fit.slope
                ),
                Err(e) => println!("log-log slope unavailable: {e}"),
            }
            Ok(())
        }
        Command::Analyze {
            measure,
            m,
            check,
            pair,
            seed,
            out,
        } => {
            let game: Game = build_game(measure, m)?;
            let pair = pair.map(|p| to_action_pair(&game, &p)).transpose()?;
            let text = analyze(&game, check, pair, seed, &out)?;
            print!("{text}");
            Ok(())
        }
        Command::Besthindsight { measure, stream } => {
            let (_, rounds) = read_stream(BufReader::new(File::open(stream)?))?;
            let (sigma, value) = best_in_hindsight(measure, &rounds)?;
            println!("{sigma} {value}");
            Ok(())
        }
    }
}

fn to_action_pair(game: &Game, p: &[usize]) -> Result<(usize, usize)> {
    let n = game.n_actions();
    let idx = |a: usize| {
        if a == 0 || a > n {
            Err(RankError::OutOfRange {
                what: "action",
                value: a,
                min: 1,
                max: n,
            })
        } else {
            Ok(a - 1)
        }
    };
    Ok((idx(p[0])?, idx(p[1])?))
}

fn analyze(
    game: &Game,
    check: CheckArg,
    pair: Option<(usize, usize)>,
    seed: u64,
    out: &Path,
) -> Result<String> {
    let thresholds = Thresholds::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ObservabilityReport::new(game.measure(), game.m(), thresholds);
    let as_csv = out
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    match check {
        CheckArg::Global => report.global = Some(check_global(game, &thresholds)?),
        CheckArg::Local => {
            report.randomized = true;
            report.local = match pair {
                Some((i, j)) => {
                    let hood = neighborhood_set(game, i, j, NEIGHBORHOOD_SAMPLES, &mut rng)?;
                    vec![check_local(game, i, j, &hood, &thresholds)?]
                }
                None => check_all_local(game, NEIGHBORHOOD_SAMPLES, &thresholds, &mut rng)?,
            };
        }
        CheckArg::Neighbors => {
            let pairs = match pair {
                Some(p) => vec![p],
                None => neighbor_pairs(game),
            };
            let mut text = String::new();
            for (i, j) in pairs {
                let hood = neighborhood_set(game, i, j, NEIGHBORHOOD_SAMPLES, &mut rng)?;
                let names: Vec<String> = hood.iter().map(|k| format!("σ_{}", k + 1)).collect();
                text.push_str(&format!(
                    "σ_{} ({}) vs σ_{} ({}): N+ = {{{}}}\n",
                    i + 1,
                    game.actions()[i],
                    j + 1,
                    game.actions()[j],
                    names.join(", ")
                ));
            }
            fs::write(out, &text)?;
            return Ok(text);
        }
        CheckArg::Pareto => {
            let actions: Vec<usize> = match pair {
                Some((i, j)) => vec![i, j],
                None => (0..game.n_actions()).collect(),
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["action".to_string(), "ranking".to_string()];
            header.extend(game.outcomes().iter().map(|r| r.to_string()));
            w.write_record(&header)?;
            for a in actions {
                let p = pareto_witness(game, a)?;
                let mut row = vec![(a + 1).to_string(), game.actions()[a].to_string()];
                row.extend(p.iter().map(|x| format!("{x:.6}")));
                w.write_record(&row)?;
            }
            let bytes = w.into_inner().map_err(|e| RankError::Io(e.into_error()))?;
            let text = String::from_utf8_lossy(&bytes).into_owned();
            fs::write(out, &text)?;
            return Ok(text);
        }
    }
    let text = report.to_text();
    if as_csv {
        let mut f = BufWriter::new(File::create(out)?);
        report.write_csv(&mut f)?;
        f.flush()?;
    } else {
        fs::write(out, &text)?;
    }
    Ok(text)
}
