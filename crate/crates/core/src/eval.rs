//! Synthetic data with planted structure, and offline leave-one-out scoring.
//!
//! Each trial hides one faculty a user visited: its visits are subtracted from
//! the user's weights and visit total, the query is seeded with the user's
//! most-visited remaining faculty (ties by id), and the trial is a hit if the
//! hidden faculty comes back in the top N. With one hidden item per query,
//! recall@N and hit rate coincide; precision@N divides hits by `N` per trial.
//!
//! Trials are independent and run through [`Execution`]; the report only
//! holds integer counts and ratios of them, so the result does not depend on
//! scheduling.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::{FormalContext, MultiValuedContext, VisitLog, VisitsVector};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::recbi::{
    recbi1, recbi2_cold_with, recbi2_feedback_with, top_n, Mode, Score, ScoredItem,
};
use crate::store::Dataset;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_faculties: usize,
    pub n_attributes: usize,
    pub n_users: usize,
    pub attrs_per_faculty: usize,
    /// Planted co-visitation groups.
    pub n_clusters: usize,
    pub visits_per_user: usize,
    pub rng_seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_faculties", self.n_faculties),
            ("n_attributes", self.n_attributes),
            ("n_users", self.n_users),
            ("attrs_per_faculty", self.attrs_per_faculty),
            ("n_clusters", self.n_clusters),
            ("visits_per_user", self.visits_per_user),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidSpec(format!("{name} must be positive")));
        }
        if self.attrs_per_faculty > self.n_attributes {
            return Err(Error::InvalidSpec(format!(
                "attrs_per_faculty ({}) exceeds n_attributes ({})",
                self.attrs_per_faculty, self.n_attributes
            )));
        }
        if self.n_clusters > self.n_faculties {
            return Err(Error::InvalidSpec(format!(
                "n_clusters ({}) exceeds n_faculties ({})",
                self.n_clusters, self.n_faculties
            )));
        }
        Ok(())
    }
}

fn ids(prefix: char, n: usize) -> Vec<String> {
    let width = (n.max(2) - 1).to_string().len();
    (0..n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

/// Faculty `i` belongs to cluster `i % n_clusters` and draws its attributes
/// from that cluster's block (`attribute j` is in block `j % n_clusters`),
/// topping up from the rest of the pool when the block is too small. Every
/// user picks a home cluster and spreads all visits over its faculties.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let faculties = ids('f', spec.n_faculties);
    let attributes = ids('a', spec.n_attributes);
    let k = spec.n_clusters;

    let mut pairs = Vec::new();
    for (si, s) in faculties.iter().enumerate() {
        let cluster = si % k;
        let (block, rest): (Vec<usize>, Vec<usize>) =
            (0..spec.n_attributes).partition(|ai| ai % k == cluster);
        let mut chosen: Vec<usize> = block
            .choose_multiple(&mut rng, spec.attrs_per_faculty.min(block.len()))
            .copied()
            .collect();
        let missing = spec.attrs_per_faculty - chosen.len();
        chosen.extend(rest.choose_multiple(&mut rng, missing).copied());
        pairs.extend(chosen.into_iter().map(|ai| (s.clone(), attributes[ai].clone())));
    }
    let catalog = FormalContext::new(faculties.clone(), attributes, pairs)?;

    let mut data = Dataset::fresh(catalog);
    for u in ids('u', spec.n_users) {
        let home = rng.gen_range(0..k);
        let members: Vec<&String> = faculties.iter().skip(home).step_by(k).collect();
        for _ in 0..spec.visits_per_user {
            let s = members.choose(&mut rng).expect("cluster is non-empty");
            data.record(&u, s)?;
        }
    }
    Ok(data)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvalAlgorithm {
    Recbi(Mode),
    /// `N` faculties drawn uniformly from everything but the seed.
    Random,
    /// Faculties ranked by total visits across all users.
    Popularity,
}

impl fmt::Display for EvalAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalAlgorithm::Recbi(m) => m.fmt(f),
            EvalAlgorithm::Random => f.write_str("random"),
            EvalAlgorithm::Popularity => f.write_str("popularity"),
        }
    }
}

impl FromStr for EvalAlgorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(EvalAlgorithm::Random),
            "popularity" => Ok(EvalAlgorithm::Popularity),
            other => other.parse().map(EvalAlgorithm::Recbi).map_err(|_| {
                format!("unknown algorithm `{other}` (expected recbi1, recbi2_cold, recbi2_feedback, random or popularity)")
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub algorithm: EvalAlgorithm,
    pub n: usize,
    pub l_min: u64,
    /// Only the random baseline draws from it.
    pub rng_seed: u64,
    pub exec: Execution,
}

impl EvalOptions {
    pub fn new(algorithm: EvalAlgorithm, n: usize, l_min: u64) -> EvalOptions {
        EvalOptions {
            algorithm,
            n,
            l_min,
            rng_seed: 0,
            exec: Execution::default(),
        }
    }
}

mod ratio_json {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::recbi::Score;

    #[derive(Serialize, Deserialize)]
    struct Fraction {
        num: u64,
        den: u64,
    }

    pub fn serialize<S: Serializer>(r: &Score, s: S) -> Result<S::Ok, S::Error> {
        Fraction { num: *r.numer(), den: *r.denom() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Score, D::Error> {
        let f = Fraction::deserialize(d)?;
        if f.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Score::new(f.num, f.den))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalReport {
    pub algorithm: String,
    pub n: usize,
    pub l_min: u64,
    pub users_evaluated: usize,
    /// Users with fewer than two distinct visited faculties.
    pub users_skipped: usize,
    pub trials: u64,
    pub hits: u64,
    #[serde(with = "ratio_json")]
    pub precision_at_n: Score,
    #[serde(with = "ratio_json")]
    pub recall_at_n: Score,
    #[serde(with = "ratio_json")]
    pub hit_rate: Score,
}

impl EvalReport {
    fn from_counts(opts: &EvalOptions, users_evaluated: usize, users_skipped: usize, trials: u64, hits: u64) -> EvalReport {
        let ratio = |num: u64, den: u64| if den == 0 { Score::zero() } else { Score::new(num, den) };
        EvalReport {
            algorithm: opts.algorithm.to_string(),
            n: opts.n,
            l_min: opts.l_min,
            users_evaluated,
            users_skipped,
            trials,
            hits,
            precision_at_n: ratio(hits, trials * opts.n as u64),
            recall_at_n: ratio(hits, trials),
            hit_rate: ratio(hits, trials),
        }
    }

    /// Pools two runs of the same configuration (e.g. different random
    /// seeds) as if they were one longer run.
    pub fn merge(&self, other: &EvalReport) -> EvalReport {
        let opts = EvalOptions {
            algorithm: self.algorithm.parse().unwrap_or(EvalAlgorithm::Random),
            n: self.n,
            l_min: self.l_min,
            rng_seed: 0,
            exec: Execution::Sequential,
        };
        let mut merged = EvalReport::from_counts(
            &opts,
            self.users_evaluated + other.users_evaluated,
            self.users_skipped + other.users_skipped,
            self.trials + other.trials,
            self.hits + other.hits,
        );
        merged.algorithm = self.algorithm.clone();
        merged
    }
}

struct Trial<'a> {
    index: u64,
    user: &'a str,
    held_out: &'a str,
    seed: &'a str,
}

/// Enumerates `(user, held-out faculty)` pairs; returns the trials together
/// with the evaluated and skipped user counts.
fn trials(log: &VisitLog) -> (Vec<Trial<'_>>, usize, usize) {
    let mut out = Vec::new();
    let (mut evaluated, mut skipped) = (0, 0);
    for u in log.users() {
        let visited: Vec<(&str, u64)> = log.user(u).collect();
        if visited.len() < 2 {
            skipped += 1;
            continue;
        }
        evaluated += 1;
        for &(held_out, _) in &visited {
            // most visited remaining faculty; `visited` is id-ascending, so
            // the first maximum wins ties
            let seed = visited
                .iter()
                .filter(|(s, _)| *s != held_out)
                .fold(None::<(&str, u64)>, |best, &(s, c)| match best {
                    Some((_, bc)) if bc >= c => best,
                    _ => Some((s, c)),
                })
                .expect("at least two faculties")
                .0;
            out.push(Trial {
                index: out.len() as u64,
                user: u,
                held_out,
                seed,
            });
        }
    }
    (out, evaluated, skipped)
}

fn without_faculty(data: &Dataset, log: &VisitLog, u: &str, s: &str) -> Result<(MultiValuedContext, VisitsVector)> {
    let count = log.count(u, s);
    let si = data.catalog.faculty_index(s).ok_or_else(|| Error::UnknownFaculty(s.to_string()))?;
    let mut usage = data.usage.clone();
    let mut visits = data.visits.clone();
    if let Some(row) = usage.row_mut(u) {
        for &ai in data.catalog.intent_of(si) {
            row[ai] = row[ai].saturating_sub(count);
        }
    }
    visits.set(u, visits.get(u).saturating_sub(count))?;
    Ok((usage, visits))
}

fn random_pick(catalog: &FormalContext, seed: &str, n: usize, rng_seed: u64, trial: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(trial);
    let pool: Vec<&String> = catalog.faculties().iter().filter(|s| *s != seed).collect();
    pool.choose_multiple(&mut rng, n.min(pool.len())).map(|s| (*s).clone()).collect()
}

fn popular(catalog: &FormalContext, log: &VisitLog, trial: &Trial<'_>, n: usize) -> Vec<String> {
    let mut totals = vec![0u64; catalog.faculties().len()];
    for (u, s, c) in log.entries() {
        if u == trial.user && s == trial.held_out {
            continue;
        }
        if let Some(si) = catalog.faculty_index(s) {
            totals[si] += c;
        }
    }
    let items = catalog
        .faculties()
        .iter()
        .zip(totals)
        .filter(|(s, _)| *s != trial.seed)
        .map(|(s, c)| ScoredItem::new(s.clone(), Score::from_integer(c)))
        .collect();
    top_n(items, n).into_iter().map(|it| it.faculty).collect()
}

fn run_trial(data: &Dataset, log: &VisitLog, opts: &EvalOptions, trial: &Trial<'_>) -> Result<bool> {
    let catalog = &data.catalog;
    // the inner kernels stay sequential: trials are already spread out
    let inner = Execution::Sequential;
    let recommended: Vec<String> = match opts.algorithm {
        EvalAlgorithm::Random => random_pick(catalog, trial.seed, opts.n, opts.rng_seed, trial.index),
        EvalAlgorithm::Popularity => popular(catalog, log, trial, opts.n),
        EvalAlgorithm::Recbi(mode) => {
            let (usage, visits) = without_faculty(data, log, trial.user, trial.held_out)?;
            let rec = match mode {
                Mode::Recbi1 => recbi1(catalog, &usage, &visits, trial.user, trial.seed, opts.n)?,
                Mode::Recbi2Cold => {
                    recbi2_cold_with(catalog, &usage, trial.user, trial.seed, opts.n, opts.l_min, inner)?
                }
                Mode::Recbi2Feedback => recbi2_feedback_with(
                    catalog, &usage, &visits, trial.user, trial.seed, opts.n, opts.l_min, inner,
                )?,
            };
            rec.items.into_iter().map(|it| it.faculty).collect()
        }
    };
    Ok(recommended.iter().any(|s| s == trial.held_out))
}

pub fn leave_one_out(data: &Dataset, opts: &EvalOptions) -> Result<EvalReport> {
    if opts.n == 0 {
        return Err(Error::ZeroLength);
    }
    let log = data.log.as_ref().ok_or(Error::MissingVisitLog)?;
    let (trials, evaluated, skipped) = trials(log);
    if evaluated == 0 {
        return Err(Error::NothingToEvaluate);
    }
    let outcomes = opts.exec.map_slice(&trials, |t| run_trial(data, log, opts, t));
    let mut hits = 0;
    for outcome in outcomes {
        hits += outcome? as u64;
    }
    Ok(EvalReport::from_counts(opts, evaluated, skipped, trials.len() as u64, hits))
}
