//! Declarative campaign files: a task list executed with the same runners
//! as the individual subcommands, optionally in parallel.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::Args;
use serde::Deserialize;

use crate::commands::{
    cmd_certify, cmd_make_trellis, cmd_plan, cmd_rotation_search, cmd_simulate, cmd_sum_alphabet,
    CertifyArgs, MakeTrellisArgs, PlanArgs, RotationSearchArgs, SimulateArgs, SumAlphabetArgs,
};
use crate::error::CliError;

/// Run a campaign file (a JSON task list).
#[derive(Args, Clone, Debug)]
pub struct CampaignArgs {
    /// Campaign JSON file.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CampaignFile {
    schema_version: u32,
    /// Default seed for randomized tasks that do not set their own.
    #[serde(default)]
    seed: Option<u64>,
    tasks: Vec<Task>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Task {
    #[serde(default)]
    name: Option<String>,
    #[serde(flatten)]
    action: Action,
}

#[derive(Deserialize)]
#[serde(tag = "command", content = "args", rename_all = "kebab-case", deny_unknown_fields)]
enum Action {
    SumAlphabet(SumAlphabetArgs),
    RotationSearch(RotationSearchArgs),
    Certify(CertifyArgs),
    Plan(PlanArgs),
    MakeTrellis(MakeTrellisArgs),
    Simulate(SimulateArgs),
}

impl Action {
    fn kind(&self) -> &'static str {
        match self {
            Action::SumAlphabet(_) => "sum-alphabet",
            Action::RotationSearch(_) => "rotation-search",
            Action::Certify(_) => "certify",
            Action::Plan(_) => "plan",
            Action::MakeTrellis(_) => "make-trellis",
            Action::Simulate(_) => "simulate",
        }
    }

    fn run(&self) -> Result<(), CliError> {
        match self {
            Action::SumAlphabet(a) => cmd_sum_alphabet(a),
            Action::RotationSearch(a) => cmd_rotation_search(a),
            Action::Certify(a) => cmd_certify(a),
            Action::Plan(a) => cmd_plan(a),
            Action::MakeTrellis(a) => cmd_make_trellis(a),
            Action::Simulate(a) => cmd_simulate(a),
        }
    }
}

fn worker_count(tasks: usize) -> usize {
    let cap = std::env::var("MACMOD_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1);
    cap.min(tasks.max(1))
}

pub fn cmd_campaign(args: &CampaignArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", args.config.display())))?;
    let file: CampaignFile = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("campaign config: {e}")))?;
    if file.schema_version != crate::output::SCHEMA_VERSION {
        return Err(CliError::usage(format!(
            "unsupported campaign schema_version {}",
            file.schema_version
        )));
    }

    // Resolve per-task seeds from the campaign seed and validate up front.
    let mut actions = Vec::with_capacity(file.tasks.len());
    for (i, task) in file.tasks.into_iter().enumerate() {
        let name = task.name.unwrap_or_else(|| format!("task-{i}"));
        let mut action = task.action;
        match &mut action {
            Action::Plan(a) => {
                if a.seed.is_none() {
                    a.seed = file.seed;
                }
                if a.seed.is_none() {
                    return Err(CliError::usage(format!(
                        "{name}: plan needs a seed (task or campaign level)"
                    )));
                }
                if a.out.is_none() {
                    return Err(CliError::usage(format!(
                        "{name}: plan tasks must write to a file"
                    )));
                }
            }
            Action::Simulate(a) => {
                if a.seed.is_none() {
                    a.seed = file.seed;
                }
                if a.seed.is_none() {
                    return Err(CliError::usage(format!(
                        "{name}: simulate needs a seed (task or campaign level)"
                    )));
                }
            }
            _ => {}
        }
        actions.push((name, action));
    }

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<(), CliError>>>> =
        Mutex::new((0..actions.len()).map(|_| None).collect());
    let workers = worker_count(actions.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= actions.len() {
                    break;
                }
                let outcome = actions[i].1.run();
                results.lock().expect("poisoned results")[i] = Some(outcome);
            });
        }
    });

    let results = results.into_inner().expect("poisoned results");
    let mut first_failure: Option<CliError> = None;
    for ((name, action), outcome) in actions.iter().zip(results) {
        match outcome.expect("every task ran") {
            Ok(()) => println!("{name} ({}): ok", action.kind()),
            Err(e) => {
                println!("{name} ({}): failed: {e}", action.kind());
                if first_failure.is_none() {
                    first_failure = Some(e);
                }
            }
        }
    }
    match first_failure {
        None => Ok(()),
        Some(e) => Err(CliError {
            message: "campaign had failing tasks".into(),
            exit_code: e.exit_code,
        }),
    }
}
