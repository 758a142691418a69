//! `bicrec`: one-shot access to the recommender and its datasets.
//!
//! Exit status is 0 on success, 1 for domain errors (unknown ids, a user
//! without visits, inconsistent data) and 2 for usage or parse errors.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bicrec::api::RecommendationBody;
use bicrec::engine::{load_state, save_state, validate_dataset};
use bicrec::eval::{generate_synthetic, leave_one_out, EvalAlgorithm, EvalOptions, EvalReport, SyntheticSpec};
use bicrec::{EngineConfig, EngineState, Error, Mode, Recommendation};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bicrec", version, about = "Biclustering recommender for faculty selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service over a data directory.
    Serve {
        #[arg(long, env = "BICREC_DATA_DIR")]
        data_dir: PathBuf,
        /// Defaults to `listen_address` from config.json.
        #[arg(long)]
        listen: Option<SocketAddr>,
    },
    /// Print a recommendation list. Never modifies the data.
    Recommend {
        #[arg(long, env = "BICREC_DATA_DIR")]
        data_dir: PathBuf,
        #[arg(long)]
        user: String,
        #[arg(long)]
        seed: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        l_min: Option<u64>,
        /// recbi1, recbi2_cold or recbi2_feedback; chosen from the user's history if absent.
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        json: bool,
    },
    /// Write a synthetic dataset with planted clusters.
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        faculties: usize,
        #[arg(long)]
        attributes: usize,
        #[arg(long)]
        users: usize,
        #[arg(long)]
        clusters: usize,
        #[arg(long)]
        seed: u64,
        /// Defaults to min(4, attributes).
        #[arg(long)]
        attrs_per_faculty: Option<usize>,
        #[arg(long, default_value_t = 5)]
        visits_per_user: usize,
    },
    /// Leave-one-out evaluation over the recorded visit log.
    Eval {
        #[arg(long, env = "BICREC_DATA_DIR")]
        data_dir: PathBuf,
        /// recbi1, recbi2_cold, recbi2_feedback, random or popularity.
        #[arg(long)]
        algorithm: EvalAlgorithm,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        l_min: u64,
        /// Seed for the random baseline.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Check a data directory for parse errors and cross-file inconsistencies.
    Validate {
        #[arg(long, env = "BICREC_DATA_DIR")]
        data_dir: PathBuf,
    },
}

enum Failure {
    Domain(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        match err {
            Error::Parse { .. } => Failure::Usage(err.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Serve { data_dir, listen } => serve(&data_dir, listen),
        Command::Recommend { data_dir, user, seed, n, l_min, mode, json } => {
            let state = load_state(&data_dir)?;
            let rec = state.dispatch_recommend(&user, &seed, mode, n, l_min)?;
            if json {
                println!("{}", rec.to_json());
            } else {
                print!("{}", recommendation_table(&rec));
            }
            Ok(())
        }
        Command::Gen { out, faculties, attributes, users, clusters, seed, attrs_per_faculty, visits_per_user } => {
            let spec = SyntheticSpec {
                n_faculties: faculties,
                n_attributes: attributes,
                n_users: users,
                attrs_per_faculty: attrs_per_faculty.unwrap_or(attributes.min(4)),
                n_clusters: clusters,
                visits_per_user,
                rng_seed: seed,
            };
            let data = generate_synthetic(&spec)?;
            std::fs::create_dir_all(&out).map_err(|e| Failure::Domain(format!("cannot create {}: {e}", out.display())))?;
            let state = EngineState { data, config: EngineConfig { data_dir: out.clone(), ..EngineConfig::default() } };
            save_state(&state, &out)?;
            eprintln!("wrote {} faculties, {} users to {}", faculties, state.user_count(), out.display());
            Ok(())
        }
        Command::Eval { data_dir, algorithm, n, l_min, seed, json } => {
            let state = load_state(&data_dir)?;
            let opts = EvalOptions { rng_seed: seed, ..EvalOptions::new(algorithm, n, l_min) };
            let report = leave_one_out(&state.data, &opts)?;
            if json {
                println!("{}", serde_json::to_string(&report).expect("report serializes"));
            } else {
                print!("{}", report_table(&report));
            }
            Ok(())
        }
        Command::Validate { data_dir } => {
            let state = load_state(&data_dir)?;
            let problems = validate_dataset(&state.data);
            if !problems.is_empty() {
                for p in &problems {
                    eprintln!("{}: {p}", data_dir.display());
                }
                return Err(Failure::Domain(format!("{} problem(s) found", problems.len())));
            }
            println!(
                "ok: {} faculties, {} attributes, {} users",
                state.catalog().faculties().len(),
                state.catalog().attributes().len(),
                state.user_count()
            );
            Ok(())
        }
    }
}

fn serve(data_dir: &Path, listen: Option<SocketAddr>) -> Result<(), Failure> {
    let state = load_state(data_dir)?;
    let addr = match listen {
        Some(addr) => addr,
        None => state
            .config
            .listen_address
            .parse()
            .map_err(|e| Failure::Usage(format!("config.json: bad listen_address: {e}")))?,
    };
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::Domain(e.to_string()))?;
    rt.block_on(bicrec_service::serve(addr, state))
        .map_err(|e| Failure::Domain(format!("server on {addr}: {e}")))
}

fn recommendation_table(rec: &Recommendation) -> String {
    let body = RecommendationBody::from(rec);
    let mut out = format!("mode: {}  seed: {}\n", body.mode, body.seed_faculty);
    let rows: Vec<(String, String, String)> = body
        .items
        .iter()
        .enumerate()
        .map(|(i, it)| ((i + 1).to_string(), it.faculty_id.clone(), format!("{}/{}", it.score_num, it.score_den)))
        .collect();
    let w_rank = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(4);
    let w_fac = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max(7);
    out += &format!("{:>w_rank$}  {:<w_fac$}  score\n", "rank", "faculty");
    for (rank, fac, score) in rows {
        out += &format!("{rank:>w_rank$}  {fac:<w_fac$}  {score}\n");
    }
    out
}

fn report_table(r: &EvalReport) -> String {
    let frac = |s: &bicrec::Score| format!("{}/{} ({:.4})", s.numer(), s.denom(), *s.numer() as f64 / *s.denom() as f64);
    let rows = [
        ("algorithm", r.algorithm.clone()),
        ("n", r.n.to_string()),
        ("l_min", r.l_min.to_string()),
        ("users_evaluated", r.users_evaluated.to_string()),
        ("users_skipped", r.users_skipped.to_string()),
        ("trials", r.trials.to_string()),
        ("hits", r.hits.to_string()),
        ("precision@n", frac(&r.precision_at_n)),
        ("recall@n", frac(&r.recall_at_n)),
        ("hit_rate", frac(&r.hit_rate)),
    ];
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}
