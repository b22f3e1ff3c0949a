use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stancerec::Variant;
use stancerec_cli::{
    cmd_evaluate, cmd_pipeline, cmd_recommend, cmd_synth, format_recommendations, with_threads, CmdResult, Failure,
    Overrides, RunConfig,
};

#[derive(Parser)]
#[command(name = "stancerec", version, about = "Two-stance tweet recommendation pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus with ground truth.
    Synth {
        #[command(flatten)]
        common: Common,
        /// Spec file: a [synth] table or bare spec fields.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Filter, featurize and profile a corpus.
    Pipeline {
        #[command(flatten)]
        common: Common,
    },
    /// Print recommendations for one account.
    Recommend {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        account: String,
        #[arg(long, default_value = "standard")]
        variant: Variant,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Evaluate all variants for both stances.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(long)]
        n_users: Option<usize>,
    },
}

#[derive(Args, Clone, Default)]
struct Tuning {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    query_trigrams: Option<usize>,
}

fn config(common: &Common, tuning: &Tuning, n_users: Option<usize>) -> CmdResult<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    Overrides {
        seed: common.seed,
        out: common.out.clone(),
        k: tuning.k,
        ratio: tuning.ratio,
        query_trigrams: tuning.query_trigrams,
        n_users,
    }
    .apply(&mut cfg);
    Ok(cfg)
}

fn run(cli: Cli) -> CmdResult<()> {
    let threads = match &cli.command {
        Command::Synth { common, .. }
        | Command::Pipeline { common }
        | Command::Recommend { common, .. }
        | Command::Evaluate { common, .. } => common.threads,
    };
    with_threads(threads, move || match cli.command {
        Command::Synth { common, spec } => {
            let cfg = config(&common, &Tuning::default(), None)?;
            cmd_synth(&cfg, spec.as_deref(), common.seed).map(|_| ())
        }
        Command::Pipeline { common } => cmd_pipeline(&config(&common, &Tuning::default(), None)?).map(|_| ()),
        Command::Recommend {
            common,
            account,
            variant,
            tuning,
        } => {
            let items = cmd_recommend(&config(&common, &tuning, None)?, &account, variant)?;
            print!("{}", format_recommendations(&items));
            Ok(())
        }
        Command::Evaluate {
            common,
            tuning,
            n_users,
        } => cmd_evaluate(&config(&common, &tuning, n_users)?).map(|_| ()),
    })
    .map_err(Failure::Usage)?
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
