use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use igoqnn::harness::{self, ConfigMap, ExperimentConfig, GeneratorRule, GeneratorSpec};
use igoqnn::{Error, NetworkShape, Result, IGOQNN};

#[derive(Parser)]
#[command(name = "igoqnn", version, about = "Grover-oracle quantum neural network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare simulated and analytic Grover success probabilities.
    GroverDemo {
        /// Index register width.
        #[arg(long)]
        n: usize,
        /// Comma-separated marked indices.
        #[arg(long)]
        marked: String,
        /// Grover rounds; defaults to the optimum.
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Generate a dataset file.
    GenData {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        /// mask_and, fixed_map or random_rule.
        #[arg(long)]
        rule: String,
        /// Mask for mask_and, most significant channel first.
        #[arg(long)]
        mask: Option<String>,
        /// Rows `db:hits,...` for fixed_map.
        #[arg(long)]
        table: Option<String>,
        /// Number of examples; defaults to 2^n (table length for fixed_map).
        #[arg(long)]
        count: Option<usize>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a network and write its artifacts.
    Train(TrainArgs),
    /// Score a finished run on its dataset or another one.
    Eval {
        /// Output directory of a previous `train`.
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
    },
    /// Write the bound OpenQASM circuit of a run or of a constant-parameter network.
    ExportQasm {
        #[arg(long, conflicts_with_all = ["n", "hidden"])]
        run: Option<PathBuf>,
        #[arg(long, requires = "hidden")]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        hidden: Option<Vec<usize>>,
        /// Value bound to every parameter of a fresh network.
        #[arg(long, default_value_t = 0.0)]
        value: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Each flag overrides the matching key of `--config`.
#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    seed: u64,
    /// Flat `section.key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` assignments, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Hidden widths, comma-separated.
    #[arg(long)]
    hidden: Option<String>,
    #[arg(long)]
    synapse_mode: Option<String>,
    #[arg(long)]
    flag_mode: Option<String>,
    #[arg(long)]
    loss: Option<String>,
    #[arg(long)]
    l1: Option<f64>,
    #[arg(long)]
    optimizer: Option<String>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    gradient: Option<String>,
    #[arg(long)]
    fd_step: Option<f64>,
    /// Switch to shot mode with this many shots.
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    mask: Option<String>,
    #[arg(long)]
    table: Option<String>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl TrainArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut map = match &self.config {
            Some(path) => ConfigMap::parse(
                &std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
            )?,
            None => ConfigMap::default(),
        };
        let flags: [(&str, Option<String>); 17] = [
            ("seed", Some(self.seed.to_string())),
            ("network.n", self.n.map(|v| v.to_string())),
            ("network.hidden", self.hidden.clone()),
            ("network.synapse_mode", self.synapse_mode.clone()),
            ("network.flag_mode", self.flag_mode.clone()),
            ("loss.kind", self.loss.clone()),
            ("loss.l1_strength", self.l1.map(|v| v.to_string())),
            ("optimizer.kind", self.optimizer.clone()),
            ("optimizer.learning_rate", self.learning_rate.map(|v| v.to_string())),
            ("optimizer.max_epochs", self.epochs.map(|v| v.to_string())),
            ("optimizer.gradient", self.gradient.clone()),
            ("optimizer.fd_step", self.fd_step.map(|v| v.to_string())),
            ("dataset.path", self.dataset.as_ref().map(|p| p.display().to_string())),
            ("dataset.rule", self.rule.clone()),
            ("dataset.mask", self.mask.clone()),
            ("dataset.table", self.table.clone()),
            ("output.dir", self.out.as_ref().map(|p| p.display().to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                map.set(key, v)?;
            }
        }
        if let Some(count) = self.count {
            map.set("dataset.count", count.to_string())?;
        }
        if let Some(shots) = self.shots {
            map.set("execution.mode", "shots")?;
            map.set("execution.shots", shots.to_string())?;
        }
        for item in &self.overrides {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set `{item}` is not KEY=VALUE")))?;
            map.set(k.trim(), v.trim())?;
        }
        ExperimentConfig::from_map(&map)
    }
}

fn bits_arg(flag: &str, text: &str) -> Result<Vec<bool>> {
    harness::parse_bits(text).ok_or_else(|| Error::Argument(format!("--{flag} `{text}` is not a bit string")))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GroverDemo { n, marked, iterations } => {
            let marked = marked
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|_| Error::Argument(format!("--marked `{s}` is not an index"))))
                .collect::<Result<Vec<usize>>>()?;
            print!("{}", harness::grover_demo(n, &marked, iterations)?);
        }
        Command::GenData {
            seed,
            n,
            rule,
            mask,
            table,
            count,
            out,
        } => {
            let rule = match rule.as_str() {
                "mask_and" => GeneratorRule::MaskAnd {
                    mask: bits_arg("mask", mask.as_deref().ok_or_else(|| Error::Argument("mask_and needs --mask".into()))?)?,
                },
                "fixed_map" => {
                    let text = table.ok_or_else(|| Error::Argument("fixed_map needs --table".into()))?;
                    let rows = text
                        .split(',')
                        .map(|row| {
                            let (d, h) = row
                                .split_once(':')
                                .ok_or_else(|| Error::Argument(format!("--table row `{row}` is not db:hits")))?;
                            Ok((bits_arg("table", d.trim())?, bits_arg("table", h.trim())?))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    GeneratorRule::FixedMap { table: rows }
                }
                "random_rule" => GeneratorRule::RandomRule,
                other => {
                    return Err(Error::Argument(format!(
                        "--rule `{other}` is not one of mask_and, fixed_map, random_rule"
                    )))
                }
            };
            let default_count = match &rule {
                GeneratorRule::FixedMap { table } => table.len(),
                _ => 1usize << n.min(20),
            };
            let spec = GeneratorSpec {
                rule,
                count: count.unwrap_or(default_count),
                n,
            };
            emit(out.as_ref(), &harness::format_dataset(&harness::gen_dataset(&spec, seed)?))?;
        }
        Command::Train(args) => {
            let config = args.config()?;
            let outcome = harness::run_experiment(&config)?;
            let r = &outcome.report;
            println!(
                "epochs {} (early stop: {}), loss {:.6} -> {:.6}, accuracy {:.3} -> {:.3}",
                r.epochs.len(),
                r.stopped_early,
                r.initial_loss,
                r.final_loss(),
                r.initial_accuracy,
                r.final_accuracy()
            );
            println!("artifacts in {}", config.output_dir.display());
        }
        Command::Eval {
            run,
            dataset,
            threshold,
        } => {
            let stored = harness::load_run(&run)?;
            let data = match dataset {
                Some(path) => harness::read_dataset(&path)?,
                None => stored.dataset.clone(),
            };
            let eval = harness::evaluate(&stored.network, &stored.bindings, &data, &stored.config.loss, threshold)?;
            println!("database hits predicted marginals");
            for p in &eval.predictions {
                let marginals: Vec<String> = p.marginals.iter().rev().map(|m| format!("{m:.4}")).collect();
                println!(
                    "{} {} {} {}",
                    harness::format_bits(&p.example.database),
                    harness::format_bits(&p.example.hits),
                    harness::format_bits(&p.hits),
                    marginals.join(",")
                );
            }
            println!(
                "loss {:.6} accuracy {:.4} bit_accuracy {:.4}",
                eval.loss, eval.accuracy, eval.bit_accuracy
            );
        }
        Command::ExportQasm {
            run,
            n,
            hidden,
            value,
            out,
        } => {
            let text = match (run, n, hidden) {
                (Some(dir), _, _) => {
                    let stored = harness::load_run(&dir)?;
                    stored.network.export_qasm(&stored.bindings)?
                }
                (None, Some(n), Some(hidden)) => {
                    let net = IGOQNN::build(&NetworkShape::new(n, hidden)?, Default::default(), Default::default())?;
                    net.export_qasm(&net.constant_bindings(value))?
                }
                _ => return Err(Error::Argument("give --run or both --n and --hidden".into())),
            };
            emit(out.as_ref(), &text)?;
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
