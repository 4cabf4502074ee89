// Copyright 2026 The chrs-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::process::ExitCode;

use chrs_cli::{run_experiment, CliError, Config, Experiment, ExperimentReport, EXIT_CONFIG};
use chrs_core::Mode;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chrs", version, about = "Desk-scale checks for common-Haar-state pseudorandomness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Haar moment against the normalized symmetric projector.
    Moments(Flags),
    /// Moment gap of U (x) I applied to a maximally entangled state.
    Harrow(Flags),
    /// Pseudorandom ensemble against the Haar ensemble.
    PrsGap(Flags),
    /// Stretching inequality for the default pad family.
    Stretch(Flags),
    /// Half-split moment and split deviation.
    Split(Flags),
    /// Block-norm implication on random Hermitian operators.
    Blocknorm(Flags),
    /// Hiding distance of the swap-test commitment.
    CommitHiding(Flags),
    /// Sum-binding probabilities for a committer strategy.
    CommitBinding(Flags),
    /// Real/Ideal distance under the support extractor.
    CommitExtractor(Flags),
    /// Multi-copy OR-test distinguisher.
    Attack(Flags),
    /// Overlap tail and concentration probe.
    Concentration(Flags),
    /// Runs an experiment described by a configuration file.
    Run {
        config: String,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        csv: Option<String>,
    },
}

#[derive(Args, Default)]
struct Flags {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    lambda: Option<usize>,
    #[arg(long)]
    bit: Option<u8>,
    /// honest-flip, honest-one, superposition or custom
    #[arg(long)]
    strategy: Option<String>,
    /// Density-matrix dump for the custom strategy.
    #[arg(long)]
    state: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    /// exact or mc
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    order_seed: Option<u64>,
    /// Write the report JSON here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    csv: Option<String>,
    /// Write the experiment's main operator in the binary dump format.
    #[arg(long)]
    dump: Option<String>,
}

impl Flags {
    fn into_config(self, experiment: Experiment) -> Result<(Config, Option<String>), CliError> {
        let mut cfg = Config::new(experiment);
        cfg.m = self.m;
        cfg.n = self.n;
        cfg.s = self.s;
        cfg.r = self.r;
        cfg.d = self.d;
        cfg.c = self.c;
        cfg.ell = self.ell;
        cfg.t = self.t;
        cfg.lambda = self.lambda;
        cfg.bit = self.bit;
        cfg.strategy = self.strategy.map(|s| s.parse()).transpose()?;
        cfg.state = self.state;
        cfg.eps = self.eps;
        cfg.mode = self
            .mode
            .map(|m| m.parse::<Mode>().map_err(|_| CliError::Config(format!("invalid mode `{m}`"))))
            .transpose()?;
        cfg.samples = self.samples;
        cfg.trials = self.trials;
        cfg.seed = self.seed;
        cfg.order_seed = self.order_seed;
        cfg.dump = self.dump;
        cfg.out = self.out;
        Ok((cfg, self.csv))
    }
}

fn emit(rep: &ExperimentReport, out: Option<&str>, csv: Option<&str>) -> Result<(), CliError> {
    match out {
        Some(path) => rep.write_json(path)?,
        None => println!("{}", rep.to_json()),
    }
    if let Some(path) = csv {
        rep.write_csv_file(path)?;
    }
    Ok(())
}

fn execute(cmd: Command) -> Result<i32, CliError> {
    let (cfg, csv) = match cmd {
        Command::Run { config, out, csv } => {
            let mut cfg = Config::parse_file(&config)?;
            if out.is_some() {
                cfg.out = out;
            }
            (cfg, csv)
        }
        Command::Moments(f) => f.into_config(Experiment::Moments)?,
        Command::Harrow(f) => f.into_config(Experiment::Harrow)?,
        Command::PrsGap(f) => f.into_config(Experiment::PrsGap)?,
        Command::Stretch(f) => f.into_config(Experiment::Stretch)?,
        Command::Split(f) => f.into_config(Experiment::Split)?,
        Command::Blocknorm(f) => f.into_config(Experiment::Blocknorm)?,
        Command::CommitHiding(f) => f.into_config(Experiment::CommitHiding)?,
        Command::CommitBinding(f) => f.into_config(Experiment::CommitBinding)?,
        Command::CommitExtractor(f) => f.into_config(Experiment::CommitExtractor)?,
        Command::Attack(f) => f.into_config(Experiment::Attack)?,
        Command::Concentration(f) => f.into_config(Experiment::Concentration)?,
    };
    let rep = run_experiment(&cfg)?;
    emit(&rep, cfg.out.as_deref(), csv.as_deref())?;
    Ok(rep.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("chrs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
