//! Command-line surface for the banditrank toolkit.
//!
//! Exit codes: 0 success, 1 usage error (bad arguments or config), 2 data
//! error (unreadable or malformed inputs), 3 numeric failure (degenerate
//! statistics, undefined measures).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use banditrank::compare::run_reward_comparison;
use banditrank::config::TrainConfig;
use banditrank::eval::{evaluate, paired_metric_vectors, parse_report_csv, report_to_csv};
use banditrank::letor::{
    filter_no_relevant, load_dataset, normalize_features, split_dataset, Dataset, NormalizeMode,
};
use banditrank::metrics::RewardSpec;
use banditrank::model_io::{load_model, save_model};
use banditrank::policy::NetConfig;
use banditrank::stats::{paired_t_test, wilcoxon_signed_rank};
use banditrank::synth::generate_synthetic;
use banditrank::trainer::{history_to_csv, train};
use banditrank::Error;

#[derive(Parser)]
#[command(name = "banditrank", version, about = "Learning to rank with a policy-gradient contextual bandit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a LETOR file 60-20-20 by query into train/val/test files.
    /// Queries without a relevant document are removed first.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train a model and write it plus a per-epoch history CSV.
    Train {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        val: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_model: PathBuf,
        #[arg(long)]
        history: PathBuf,
    },
    /// Evaluate a model on a dataset and write a per-query report CSV.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Paired t-test and Wilcoxon signed-rank test between two report CSVs.
    Significance {
        #[arg(long)]
        run_a: PathBuf,
        #[arg(long)]
        run_b: PathBuf,
        /// One of: p@1 p@3 p@10 ndcg@1 ndcg@3 ndcg@10 ap rr
        #[arg(long)]
        metric: String,
    },
    /// Train one pure policy-gradient model per reward function and record
    /// per-epoch test MAP and nDCG@10 curves.
    CompareRewards {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        val: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic LETOR dataset with a known linear oracle.
    Synth {
        #[arg(long)]
        queries: usize,
        #[arg(long)]
        docs: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        grades: u32,
        #[arg(long)]
        noise: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) => 1,
        Error::NoRelevantDocuments
        | Error::DegenerateDifferences
        | Error::TooFewPairs { .. }
        | Error::CombinatorialBound(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's default exit code is 2; usage errors are 1 here, while
            // --help/--version remain success
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load_filtered(path: &PathBuf, normalize: NormalizeMode) -> Result<Dataset, Error> {
    let ds = filter_no_relevant(&load_dataset(path)?);
    if ds.n_queries() == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(normalize_features(&ds, normalize))
}

fn read_config(path: &PathBuf) -> Result<TrainConfig, Error> {
    TrainConfig::from_key_value_str(&fs::read_to_string(path)?)
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Split { input, seed, out_dir } => {
            let ds = load_dataset(&input)?;
            let kept = filter_no_relevant(&ds);
            let (train, val, test) = split_dataset(&kept, (0.6, 0.2, 0.2), seed)?;
            fs::create_dir_all(&out_dir)?;
            train.write_letor(out_dir.join("train.txt"))?;
            val.write_letor(out_dir.join("val.txt"))?;
            test.write_letor(out_dir.join("test.txt"))?;
            println!(
                "loaded {} queries ({} documents), kept {} with relevant documents",
                ds.n_queries(),
                ds.n_documents(),
                kept.n_queries()
            );
            println!(
                "split: train {} / val {} / test {} queries",
                train.n_queries(),
                val.n_queries(),
                test.n_queries()
            );
        }

        Command::Train { train: train_path, val, config, out_model, history } => {
            let cfg = read_config(&config)?;
            let train_ds = load_filtered(&train_path, cfg.normalize)?;
            let val_ds = load_filtered(&val, cfg.normalize)?;
            let (params, records) = train(&train_ds, &val_ds, &cfg)?;
            fs::write(&history, history_to_csv(&records))?;
            let net_cfg = NetConfig {
                input_dim: train_ds.feature_dim(),
                hidden_dim: cfg.hidden_dim,
                n_highway: cfg.n_highway,
                dropout: cfg.dropout,
                init_seed: cfg.seed,
            };
            save_model(&params, &net_cfg, &out_model)?;
            let best = records
                .iter()
                .map(|r| r.val_map)
                .fold(f64::NEG_INFINITY, f64::max);
            println!(
                "trained {} epochs, best validation MAP {best:.4}",
                records.len()
            );
        }

        Command::Eval { model, data, report } => {
            let (params, _) = load_model(&model)?;
            let ds = load_filtered(&data, NormalizeMode::None)?;
            let rep = evaluate(&params, &ds)?;
            fs::write(&report, report_to_csv(&rep))?;
            let m = &rep.mean;
            println!(
                "queries {}  MAP {:.4}  MRR {:.4}  P@1 {:.4}  P@3 {:.4}  P@10 {:.4}  nDCG@1 {:.4}  nDCG@3 {:.4}  nDCG@10 {:.4}",
                rep.per_query.len(), m.ap, m.rr, m.p_at_1, m.p_at_3, m.p_at_10,
                m.ndcg_at_1, m.ndcg_at_3, m.ndcg_at_10
            );
        }

        Command::Significance { run_a, run_b, metric } => {
            let a = parse_report_csv(&fs::read_to_string(&run_a)?)?;
            let b = parse_report_csv(&fs::read_to_string(&run_b)?)?;
            let (xs, ys) = paired_metric_vectors(&a, &b, &metric)?;
            let t = paired_t_test(&xs, &ys)?;
            let w = wilcoxon_signed_rank(&xs, &ys)?;
            println!("metric={metric} pairs={}", t.n_pairs);
            println!("paired_t statistic={} p_value={}", t.statistic, t.p_value);
            println!(
                "wilcoxon_signed_rank statistic={} p_value={} nonzero_pairs={}",
                w.statistic, w.p_value, w.n_pairs
            );
        }

        Command::CompareRewards { train, val, test, config, out } => {
            let cfg = read_config(&config)?;
            let train_ds = load_filtered(&train, cfg.normalize)?;
            let val_ds = load_filtered(&val, cfg.normalize)?;
            let test_ds = load_filtered(&test, cfg.normalize)?;
            let csv =
                run_reward_comparison(&train_ds, &val_ds, &test_ds, &cfg, &RewardSpec::ALL)?;
            fs::write(&out, csv)?;
            println!(
                "compared {} reward functions over {} epochs",
                RewardSpec::ALL.len(),
                cfg.epochs
            );
        }

        Command::Synth { queries, docs, dim, grades, noise, seed, out } => {
            let (ds, oracle) = generate_synthetic(queries, docs, dim, grades, noise, seed);
            ds.write_letor(&out)?;
            println!(
                "{}",
                serde_json::json!({ "oracle_weights": oracle, "queries": queries, "docs_per_query": docs })
            );
        }
    }
    Ok(())
}
