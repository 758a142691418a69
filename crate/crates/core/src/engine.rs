//! Stateful engine behind the HTTP service: the dataset, its defaults, and
//! the rules for choosing a recommendation mode.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::context::FormalContext;
use crate::error::{check_id, Error, Result};
use crate::recbi::{recbi1, recbi2_cold, recbi2_feedback, Mode, Recommendation};
use crate::store::{load_dataset, save_dataset, write_atomically, Dataset};

pub const CONFIG_FILE: &str = "config.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub default_n: usize,
    pub default_l_min: u64,
    pub listen_address: String,
    /// Where the engine lives; never written into `config.json` itself.
    #[serde(skip)]
    pub data_dir: PathBuf,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            default_n: 5,
            default_l_min: 1,
            listen_address: "127.0.0.1:8080".to_string(),
            data_dir: PathBuf::from("."),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineState {
    pub data: Dataset,
    pub config: EngineConfig,
}

/// Mode actually run for a request: an explicit mode always wins; otherwise
/// users without visits get the cold-start variant and everyone else the
/// feedback variant.
pub fn resolve_mode(visits: u64, explicit: Option<Mode>) -> Mode {
    match explicit {
        Some(mode) => mode,
        None if visits == 0 => Mode::Recbi2Cold,
        None => Mode::Recbi2Feedback,
    }
}

impl EngineState {
    pub fn new(catalog: FormalContext, config: EngineConfig) -> EngineState {
        EngineState {
            data: Dataset::fresh(catalog),
            config,
        }
    }

    pub fn catalog(&self) -> &FormalContext {
        &self.data.catalog
    }

    /// Users with any trace in the state: a weight row or a visit count.
    pub fn user_count(&self) -> usize {
        let mut n = self.data.usage.users().len();
        n += self
            .data
            .visits
            .iter()
            .filter(|(u, _)| !self.data.usage.contains_user(u))
            .count();
        n
    }

    pub fn knows_user(&self, u: &str) -> bool {
        self.data.usage.contains_user(u) || self.data.visits.get(u) > 0
    }

    pub fn dispatch_recommend(
        &self,
        u0: &str,
        seed: &str,
        mode: Option<Mode>,
        n: Option<usize>,
        l_min: Option<u64>,
    ) -> Result<Recommendation> {
        check_id("user", u0)?;
        let n = n.unwrap_or(self.config.default_n);
        let l_min = l_min.unwrap_or(self.config.default_l_min);
        let d = &self.data;
        match resolve_mode(d.visits.get(u0), mode) {
            Mode::Recbi1 => recbi1(&d.catalog, &d.usage, &d.visits, u0, seed, n),
            Mode::Recbi2Cold => recbi2_cold(&d.catalog, &d.usage, u0, seed, n, l_min),
            Mode::Recbi2Feedback => recbi2_feedback(&d.catalog, &d.usage, &d.visits, u0, seed, n, l_min),
        }
    }

    /// Adds a zero-history user; `false` if the id was already known.
    pub fn register_user(&mut self, u: &str) -> Result<bool> {
        self.data.usage.register_user(u)
    }

    /// The state after `u` visits `s`. `self` is left untouched, so a failed
    /// visit or a failed save leaves nothing half-applied.
    pub fn with_visit(&self, u: &str, s: &str) -> Result<EngineState> {
        let mut next = self.clone();
        next.data.record(u, s)?;
        Ok(next)
    }

    /// Records the visit and persists the result before returning it.
    pub fn apply_visit(&self, u: &str, s: &str) -> Result<EngineState> {
        let next = self.with_visit(u, s)?;
        next.save()?;
        Ok(next)
    }

    pub fn load(data_dir: &Path) -> Result<EngineState> {
        load_state(data_dir)
    }

    pub fn save(&self) -> Result<()> {
        save_state(self, &self.config.data_dir)
    }
}

pub fn load_state(data_dir: &Path) -> Result<EngineState> {
    let data = load_dataset(data_dir)?;
    let path = data_dir.join(CONFIG_FILE);
    let mut config: EngineConfig = match fs::read_to_string(&path) {
        Ok(text) => serde_json::from_str(&text).map_err(|e| Error::Parse {
            file: path.clone(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => EngineConfig::default(),
        Err(e) => return Err(Error::storage(&path, e)),
    };
    if config.default_n == 0 {
        return Err(Error::Invalid {
            file: path,
            line: 1,
            source: Box::new(Error::ZeroLength),
        });
    }
    config.data_dir = data_dir.to_path_buf();
    Ok(EngineState { data, config })
}

pub fn save_state(state: &EngineState, data_dir: &Path) -> Result<()> {
    save_dataset(&state.data, data_dir)?;
    let mut json = serde_json::to_string_pretty(&state.config).expect("plain data serializes");
    json.push('\n');
    write_atomically(&[(data_dir.join(CONFIG_FILE), json)])
}

/// Cross-file consistency problems that parsing alone cannot see.
pub fn validate_dataset(data: &Dataset) -> Vec<String> {
    let mut problems = Vec::new();
    for (u, a, w) in data.usage.nonzero() {
        if data.visits.get(u) == 0 {
            problems.push(format!("user `{u}` has weight {w} on `{a}` but no recorded visits"));
            break;
        }
    }
    let Some(log) = &data.log else {
        return problems;
    };
    let (usage, visits) = match log.replay(&data.catalog) {
        Ok(replayed) => replayed,
        Err(e) => {
            problems.push(format!("visit log cannot be replayed: {e}"));
            return problems;
        }
    };
    let mut users: Vec<&str> = data.visits.iter().map(|(u, _)| u).chain(visits.iter().map(|(u, _)| u)).collect();
    users.sort_unstable();
    users.dedup();
    for u in users {
        let (logged, stored) = (visits.get(u), data.visits.get(u));
        if logged != stored {
            problems.push(format!("user `{u}` has {stored} visits but the log records {logged}"));
        }
    }
    let replayed: Vec<_> = usage.nonzero().collect();
    let stored: Vec<_> = data.usage.nonzero().collect();
    if replayed != stored {
        let first = stored
            .iter()
            .zip(&replayed)
            .find(|(a, b)| a != b)
            .map(|(a, _)| format!(" (first difference at user `{}`, attribute `{}`)", a.0, a.1))
            .unwrap_or_default();
        problems.push(format!("usage weights do not match the visit log{first}"));
    }
    problems
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::k3;

    fn state() -> EngineState {
        EngineState::new(k3(), EngineConfig::default())
    }

    #[test]
    fn dispatch_rules() {
        assert_eq!(resolve_mode(0, None), Mode::Recbi2Cold);
        assert_eq!(resolve_mode(3, None), Mode::Recbi2Feedback);
        assert_eq!(resolve_mode(0, Some(Mode::Recbi1)), Mode::Recbi1);
        assert_eq!(resolve_mode(3, Some(Mode::Recbi2Cold)), Mode::Recbi2Cold);
    }

    #[test]
    fn fresh_user_goes_cold() {
        let mut st = state();
        st.register_user("s1").unwrap();
        let rec = st.dispatch_recommend("s1", "f1", None, None, None).unwrap();
        assert_eq!(rec.mode, Mode::Recbi2Cold);
    }

    #[test]
    fn returning_user_gets_feedback() {
        let mut st = state();
        for _ in 0..3 {
            st = st.with_visit("s1", "f2").unwrap();
        }
        let rec = st.dispatch_recommend("s1", "f1", None, None, None).unwrap();
        assert_eq!(rec.mode, Mode::Recbi2Feedback);
    }

    #[test]
    fn forced_history_mode_on_fresh_user() {
        let mut st = state();
        st.register_user("s1").unwrap();
        let err = st.dispatch_recommend("s1", "f1", Some(Mode::Recbi1), None, None).unwrap_err();
        assert!(matches!(err, Error::ZeroVisits(_)));
    }

    #[test]
    fn visits_accumulate_and_failures_are_atomic() {
        let st = state();
        let st = st.with_visit("s1", "f1").unwrap().with_visit("s1", "f1").unwrap();
        assert_eq!(st.data.visits.get("s1"), 2);
        assert_eq!(st.data.usage.weight("s1", "a1"), 2);
        assert_eq!(st.data.usage.weight("s1", "a2"), 2);
        let err = st.with_visit("s1", "nope").unwrap_err();
        assert!(matches!(err, Error::UnknownFaculty(_)));
        assert_eq!(st.data.visits.get("s1"), 2);
    }

    #[test]
    fn read_your_writes() {
        let st = state().with_visit("s1", "f1").unwrap();
        let before = st.dispatch_recommend("s1", "f2", Some(Mode::Recbi1), None, None).unwrap();
        let st = st.with_visit("s1", "f3").unwrap();
        let after = st.dispatch_recommend("s1", "f2", Some(Mode::Recbi1), None, None).unwrap();
        assert_ne!(before, after);
    }

    #[test]
    fn persisted_state_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let mut st = state();
        st.config.data_dir = dir.path().to_path_buf();
        st.config.default_n = 7;
        let st = st.apply_visit("s1", "f2").unwrap();
        let back = load_state(dir.path()).unwrap();
        assert_eq!(back, st);
    }

    #[test]
    fn bad_config() {
        let dir = tempfile::tempdir().unwrap();
        let mut st = state();
        st.config.data_dir = dir.path().to_path_buf();
        st.save().unwrap();
        fs::write(dir.path().join(CONFIG_FILE), "{\"default_n\": 0}").unwrap();
        assert!(load_state(dir.path()).is_err());
        fs::write(dir.path().join(CONFIG_FILE), "{\"bogus\": 1}").unwrap();
        assert!(matches!(load_state(dir.path()), Err(Error::Parse { .. })));
    }

    #[test]
    fn validation_catches_drift() {
        let mut st = state();
        st = st.with_visit("s1", "f1").unwrap();
        assert!(validate_dataset(&st.data).is_empty());
        st.data.visits.set("s1", 5).unwrap();
        let problems = validate_dataset(&st.data);
        assert_eq!(problems.len(), 1);
        assert!(problems[0].contains("s1"));
        st.data.visits.set("s1", 1).unwrap();
        st.data.usage.set_weight("s1", "a4", 1).unwrap();
        assert_eq!(validate_dataset(&st.data).len(), 1);
    }

    #[test]
    fn weights_without_visits_flagged() {
        let mut data = Dataset::fresh(k3());
        data.log = None;
        data.usage.set_weight("x", "a1", 1).unwrap();
        assert_eq!(validate_dataset(&data).len(), 1);
    }
}
