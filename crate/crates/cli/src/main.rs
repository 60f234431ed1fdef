use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dqcnn_cli::commands::{self, EvalTarget};
use dqcnn_cli::{CliResult, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "dqcnn",
    version,
    about = "Distributed hybrid QCNN experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Run the quantum layer as two cut fragments.
    #[arg(long, overrides_with = "no_cut")]
    cut: bool,
    #[arg(long, overrides_with = "cut")]
    no_cut: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn cut_flag(&self) -> Option<bool> {
        match (self.cut, self.no_cut) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        }
    }

    fn load(&self) -> CliResult<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        cfg.apply(&Overrides {
            seed: self.seed,
            epochs: self.epochs,
            cut: self.cut_flag(),
            output_dir: self.out.clone(),
        });
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check cut reconstruction against direct simulation.
    VerifyCut(Common),
    /// Train a model and write a checkpoint and log.
    Train(Common),
    /// Evaluate a checkpoint and write metric reports.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Defaults to checkpoint.json in the output directory.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// train, validation, test or all.
        #[arg(long, default_value = "test")]
        split: EvalTarget,
    },
    /// Train with and without cutting and compare.
    Ablate(Common),
    /// Reduce an image dataset to a feature CSV.
    Encode(Common),
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::VerifyCut(c) => {
            let report = commands::cmd_verify_cut(&c.load()?)?;
            println!("{}", report.summary());
            if !report.pass {
                return Err(dqcnn_cli::error::invalid(
                    "cut reconstruction exceeded tolerance",
                ));
            }
        }
        Command::Train(c) => {
            let s = commands::cmd_train(&c.load()?)?;
            for l in &s.log {
                println!(
                    "epoch {:>3} {:<10} loss {:.6} accuracy {:.4}",
                    l.epoch, l.split, l.loss, l.accuracy
                );
            }
            println!(
                "wrote {}",
                display(&s.output_dir.join(commands::CHECKPOINT_FILE))
            );
        }
        Command::Eval {
            common,
            checkpoint,
            split,
        } => {
            let cfg = common.load()?;
            let ck = checkpoint.unwrap_or_else(|| cfg.output_dir.join(commands::CHECKPOINT_FILE));
            let out = commands::cmd_eval(&cfg, &ck, split, common.cut_flag())?;
            println!("{} / {} (loss {:.6})", out.dataset, out.split, out.loss);
            print!("{}", out.report.to_text(Some(&out.class_names)));
        }
        Command::Ablate(c) => {
            let report = commands::cmd_ablate(&c.load()?)?;
            print!("{}", report.to_text());
        }
        Command::Encode(c) => {
            let s = commands::cmd_encode(&c.load()?)?;
            println!(
                "wrote {} ({} samples per class: {:?})",
                display(&s.features_csv),
                s.counts.iter().sum::<usize>(),
                s.counts
            );
            println!("wrote {}", display(&s.manifest));
        }
    }
    Ok(())
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
