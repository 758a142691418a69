//! The three recommendation modes and the ranking they share.
//!
//! * [`recbi1`]: seed-based, for users with history. Every faculty that shares
//!   attributes with the seed forms a bicluster `(faculty, shared attributes)`,
//!   scored by the user's mean visit-normalized weight over the shared set.
//! * [`recbi2_cold`]: cold start. Users whose interest in the seed reaches
//!   `l_min` vote for every other faculty they also reach `l_min` on; the score
//!   is the number of such co-visitors.
//! * [`recbi2_feedback`]: the cold-start co-visitation count scaled by
//!   `1 + personal affinity`, where the affinity is the target user's mean
//!   visit-normalized weight over the candidate's attributes. This blend is an
//!   interpretation of the feedback variant; with an all-zero weight row it
//!   ranks exactly like [`recbi2_cold`].
//!
//! Scores are exact rationals. Rankings are by score descending, then faculty
//! id ascending, and the seed is never recommended.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::context::{
    intersect_sorted, multiply_with, threshold, Bicluster, FormalContext, MultiValuedContext,
    VisitsVector,
};
use crate::error::{Error, Result};
use crate::exec::Execution;

pub type Score = Ratio<u64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Recbi1,
    Recbi2Cold,
    Recbi2Feedback,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Recbi1, Mode::Recbi2Cold, Mode::Recbi2Feedback];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Recbi1 => "recbi1",
            Mode::Recbi2Cold => "recbi2_cold",
            Mode::Recbi2Feedback => "recbi2_feedback",
        }
    }

    /// Whether the mode reads the target user's own history.
    pub fn needs_history(self) -> bool {
        !matches!(self, Mode::Recbi2Cold)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown mode `{s}` (expected recbi1, recbi2_cold or recbi2_feedback)"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoredItem {
    pub faculty: String,
    pub score: Score,
}

impl ScoredItem {
    pub fn new(faculty: impl Into<String>, score: Score) -> ScoredItem {
        ScoredItem {
            faculty: faculty.into(),
            score,
        }
    }
}

/// Total order used for every ranking: higher score first, then faculty id.
pub fn rank_order(a: &ScoredItem, b: &ScoredItem) -> Ordering {
    b.score.cmp(&a.score).then_with(|| a.faculty.cmp(&b.faculty))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recommendation {
    pub items: Vec<ScoredItem>,
    pub mode: Mode,
    pub n_requested: usize,
    pub seed_faculty: String,
    pub target_user: String,
}

/// Sorts by [`rank_order`] and keeps the first `n`.
pub fn top_n(mut items: Vec<ScoredItem>, n: usize) -> Vec<ScoredItem> {
    if n < items.len() {
        items.select_nth_unstable_by(n, rank_order);
        items.truncate(n);
    }
    items.sort_by(rank_order);
    items
}

fn seed_index(catalog: &FormalContext, seed: &str, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::ZeroLength);
    }
    catalog.require_faculty(seed)
}

/// Every other faculty sharing at least one attribute with `seed`, paired
/// with the shared attributes. Faculty order.
pub fn candidate_biclusters(catalog: &FormalContext, seed: &str) -> Result<Vec<Bicluster>> {
    let si = catalog.require_faculty(seed)?;
    Ok(candidates(catalog, si)
        .into_iter()
        .map(|(sj, shared)| Bicluster {
            faculty: catalog.faculties()[sj].clone(),
            shared_attrs: shared
                .into_iter()
                .map(|ai| catalog.attributes()[ai].clone())
                .collect(),
        })
        .collect())
}

fn candidates(catalog: &FormalContext, seed: usize) -> Vec<(usize, Vec<usize>)> {
    let seed_intent = catalog.intent_of(seed);
    (0..catalog.faculties().len())
        .filter(|&sj| sj != seed)
        .filter_map(|sj| {
            let shared = intersect_sorted(catalog.intent_of(sj), seed_intent);
            (!shared.is_empty()).then_some((sj, shared))
        })
        .collect()
}

/// `(Σ weight(a) / visits) / |attrs|`, reduced.
fn mean_normalized(weight_sum: u64, visits: u64, attrs: usize) -> Score {
    if attrs == 0 {
        return Score::zero();
    }
    Score::new(weight_sum, visits * attrs as u64)
}

fn history<'a>(
    usage: &'a MultiValuedContext,
    visits: &VisitsVector,
    u0: &str,
) -> Result<(Option<&'a [u64]>, u64)> {
    let row = usage.row(u0);
    let v = visits.get(u0);
    if row.is_none() && v == 0 {
        return Err(Error::UnknownUser(u0.to_string()));
    }
    if v == 0 {
        return Err(Error::ZeroVisits(u0.to_string()));
    }
    Ok((row, v))
}

/// Mean visit-normalized weight of `u0` over the bicluster's shared
/// attributes. An empty shared set scores zero.
pub fn score_recbi1(
    bicluster: &Bicluster,
    usage: &MultiValuedContext,
    visits: &VisitsVector,
    u0: &str,
) -> Result<Score> {
    let v = visits.get(u0);
    if v == 0 {
        return Err(Error::ZeroVisits(u0.to_string()));
    }
    let sum = bicluster
        .shared_attrs
        .iter()
        .map(|a| usage.weight(u0, a))
        .sum();
    Ok(mean_normalized(sum, v, bicluster.shared_attrs.len()))
}

pub fn recbi1(
    catalog: &FormalContext,
    usage: &MultiValuedContext,
    visits: &VisitsVector,
    u0: &str,
    seed: &str,
    n: usize,
) -> Result<Recommendation> {
    let si = seed_index(catalog, seed, n)?;
    usage.check_attributes(catalog)?;
    let (row, v) = history(usage, visits, u0)?;
    let weight = |ai: usize| row.map_or(0, |r| r[ai]);
    let scored = candidates(catalog, si)
        .into_iter()
        .map(|(sj, shared)| {
            let sum = shared.iter().map(|&ai| weight(ai)).sum();
            ScoredItem::new(
                catalog.faculties()[sj].clone(),
                mean_normalized(sum, v, shared.len()),
            )
        })
        .collect();
    Ok(Recommendation {
        items: top_n(scored, n),
        mode: Mode::Recbi1,
        n_requested: n,
        seed_faculty: seed.to_string(),
        target_user: u0.to_string(),
    })
}

/// Co-visitation counts `|visitors(s) ∩ visitors(seed)|` for every faculty
/// other than the seed that at least one of the seed's visitors prefers.
fn covisitation(
    catalog: &FormalContext,
    usage: &MultiValuedContext,
    seed: usize,
    l_min: u64,
    exec: Execution,
) -> Result<Vec<(usize, u64)>> {
    let prefs = threshold(&multiply_with(usage, catalog, exec)?, l_min);
    let mut counts = vec![0u64; catalog.faculties().len()];
    for &ui in prefs.visitors_of(seed) {
        for &sc in prefs.preferences_of(ui) {
            counts[sc] += 1;
        }
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .filter(|&(sc, c)| sc != seed && c > 0)
        .collect())
}

pub fn recbi2_cold(
    catalog: &FormalContext,
    usage: &MultiValuedContext,
    u0: &str,
    seed: &str,
    n: usize,
    l_min: u64,
) -> Result<Recommendation> {
    recbi2_cold_with(catalog, usage, u0, seed, n, l_min, Execution::default())
}

pub fn recbi2_cold_with(
    catalog: &FormalContext,
    usage: &MultiValuedContext,
    u0: &str,
    seed: &str,
    n: usize,
    l_min: u64,
    exec: Execution,
) -> Result<Recommendation> {
    let si = seed_index(catalog, seed, n)?;
    let scored = covisitation(catalog, usage, si, l_min, exec)?
        .into_iter()
        .map(|(sc, c)| ScoredItem::new(catalog.faculties()[sc].clone(), Score::from_integer(c)))
        .collect();
    Ok(Recommendation {
        items: top_n(scored, n),
        mode: Mode::Recbi2Cold,
        n_requested: n,
        seed_faculty: seed.to_string(),
        target_user: u0.to_string(),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn recbi2_feedback(
    catalog: &FormalContext,
    usage: &MultiValuedContext,
    visits: &VisitsVector,
    u0: &str,
    seed: &str,
    n: usize,
    l_min: u64,
) -> Result<Recommendation> {
    recbi2_feedback_with(catalog, usage, visits, u0, seed, n, l_min, Execution::default())
}

#[allow(clippy::too_many_arguments)]
pub fn recbi2_feedback_with(
    catalog: &FormalContext,
    usage: &MultiValuedContext,
    visits: &VisitsVector,
    u0: &str,
    seed: &str,
    n: usize,
    l_min: u64,
    exec: Execution,
) -> Result<Recommendation> {
    let si = seed_index(catalog, seed, n)?;
    usage.check_attributes(catalog)?;
    let (row, v) = history(usage, visits, u0)?;
    let scored = covisitation(catalog, usage, si, l_min, exec)?
        .into_iter()
        .map(|(sc, c)| {
            let intent = catalog.intent_of(sc);
            let sum = row.map_or(0, |r| intent.iter().map(|&ai| r[ai]).sum());
            let personal = mean_normalized(sum, v, intent.len());
            ScoredItem::new(
                catalog.faculties()[sc].clone(),
                Score::from_integer(c) * (Score::from_integer(1) + personal),
            )
        })
        .collect();
    Ok(Recommendation {
        items: top_n(scored, n),
        mode: Mode::Recbi2Feedback,
        n_requested: n,
        seed_faculty: seed.to_string(),
        target_user: u0.to_string(),
    })
}
