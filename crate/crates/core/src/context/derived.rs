use std::collections::BTreeSet;

use crate::context::{FormalContext, MultiValuedContext};
use crate::error::{check_id, Error, Result};
use crate::exec::Execution;

/// Integer user × faculty interest scores, `Kw · Kᵀ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterestMatrix {
    users: Vec<String>,
    faculties: Vec<String>,
    scores: Vec<u64>,
}

impl InterestMatrix {
    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn faculties(&self) -> &[String] {
        &self.faculties
    }

    pub fn row(&self, ui: usize) -> &[u64] {
        let w = self.faculties.len();
        &self.scores[ui * w..(ui + 1) * w]
    }

    pub fn score(&self, u: &str, s: &str) -> Result<u64> {
        let ui = self
            .users
            .binary_search_by(|x| x.as_str().cmp(u))
            .map_err(|_| Error::UnknownUser(u.to_string()))?;
        let si = self
            .faculties
            .binary_search_by(|x| x.as_str().cmp(s))
            .map_err(|_| Error::UnknownFaculty(s.to_string()))?;
        Ok(self.row(ui)[si])
    }

    pub fn max_score(&self) -> u64 {
        self.scores.iter().copied().max().unwrap_or(0)
    }
}

/// Multiplies the usage history by the transposed catalog.
pub fn multiply(usage: &MultiValuedContext, catalog: &FormalContext) -> Result<InterestMatrix> {
    multiply_with(usage, catalog, Execution::default())
}

/// [`multiply`] with an explicit execution strategy; rows are independent.
pub fn multiply_with(
    usage: &MultiValuedContext,
    catalog: &FormalContext,
    exec: Execution,
) -> Result<InterestMatrix> {
    usage.check_attributes(catalog)?;
    let users: Vec<String> = usage.users().map(str::to_string).collect();
    let faculties = catalog.faculties().to_vec();
    let rows = exec.map_slice(&users, |u| {
        let weights = usage.row(u).expect("listed user");
        (0..faculties.len())
            .map(|si| catalog.intent_of(si).iter().map(|&ai| weights[ai]).sum::<u64>())
            .collect::<Vec<u64>>()
    });
    Ok(InterestMatrix {
        users,
        faculties,
        scores: rows.concat(),
    })
}

/// Binary user × faculty preference relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceContext {
    users: Vec<String>,
    faculties: Vec<String>,
    by_user: Vec<Vec<usize>>,
    by_faculty: Vec<Vec<usize>>,
}

impl PreferenceContext {
    /// Direct construction from declared ids and `(user, faculty)` pairs.
    pub fn new<U, F, P, S, T>(users: U, faculties: F, prefers: P) -> Result<PreferenceContext>
    where
        U: IntoIterator,
        U::Item: Into<String>,
        F: IntoIterator,
        F::Item: Into<String>,
        P: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let users = declared("user", users)?;
        let faculties = declared("faculty", faculties)?;
        let mut by_user = vec![BTreeSet::new(); users.len()];
        for (u, s) in prefers {
            let (u, s) = (u.as_ref(), s.as_ref());
            let ui = users
                .binary_search_by(|x| x.as_str().cmp(u))
                .map_err(|_| Error::UnknownUser(u.to_string()))?;
            let si = faculties
                .binary_search_by(|x| x.as_str().cmp(s))
                .map_err(|_| Error::UnknownFaculty(s.to_string()))?;
            by_user[ui].insert(si);
        }
        Ok(PreferenceContext::from_rows(
            users,
            faculties,
            by_user.into_iter().map(|r| r.into_iter().collect()).collect(),
        ))
    }

    fn from_rows(users: Vec<String>, faculties: Vec<String>, by_user: Vec<Vec<usize>>) -> PreferenceContext {
        let mut by_faculty = vec![Vec::new(); faculties.len()];
        for (ui, row) in by_user.iter().enumerate() {
            for &si in row {
                by_faculty[si].push(ui);
            }
        }
        PreferenceContext {
            users,
            faculties,
            by_user,
            by_faculty,
        }
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn faculties(&self) -> &[String] {
        &self.faculties
    }

    pub fn faculty_index(&self, s: &str) -> Option<usize> {
        self.faculties.binary_search_by(|x| x.as_str().cmp(s)).ok()
    }

    pub fn user_index(&self, u: &str) -> Option<usize> {
        self.users.binary_search_by(|x| x.as_str().cmp(u)).ok()
    }

    /// Sorted user indices preferring the faculty at `si`.
    pub fn visitors_of(&self, si: usize) -> &[usize] {
        &self.by_faculty[si]
    }

    /// Sorted faculty indices preferred by the user at `ui`.
    pub fn preferences_of(&self, ui: usize) -> &[usize] {
        &self.by_user[ui]
    }

    /// `s'` in the preference context: every user who prefers `s`.
    pub fn visitors(&self, s: &str) -> Result<Vec<&str>> {
        let si = self
            .faculty_index(s)
            .ok_or_else(|| Error::UnknownFaculty(s.to_string()))?;
        Ok(self.by_faculty[si].iter().map(|&ui| self.users[ui].as_str()).collect())
    }

    /// `u'`: every faculty `u` prefers.
    pub fn preferences(&self, u: &str) -> Result<Vec<&str>> {
        let ui = self
            .user_index(u)
            .ok_or_else(|| Error::UnknownUser(u.to_string()))?;
        Ok(self.by_user[ui].iter().map(|&si| self.faculties[si].as_str()).collect())
    }

    pub fn contains(&self, u: &str, s: &str) -> bool {
        match (self.user_index(u), self.faculty_index(s)) {
            (Some(ui), Some(si)) => self.by_user[ui].binary_search(&si).is_ok(),
            _ => false,
        }
    }

    pub fn len(&self) -> usize {
        self.by_user.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All pairs, user-major, in canonical order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.by_user.iter().enumerate().flat_map(move |(ui, row)| {
            row.iter()
                .map(move |&si| (self.users[ui].as_str(), self.faculties[si].as_str()))
        })
    }
}

fn declared<I>(kind: &'static str, ids: I) -> Result<Vec<String>>
where
    I: IntoIterator,
    I::Item: Into<String>,
{
    let mut out: Vec<String> = ids.into_iter().map(Into::into).collect();
    for id in &out {
        check_id(kind, id)?;
    }
    out.sort();
    if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateId { kind, id: w[0].clone() });
    }
    Ok(out)
}

/// Keeps every `(u, s)` whose interest reaches `l_min` (inclusive).
pub fn threshold(interest: &InterestMatrix, l_min: u64) -> PreferenceContext {
    let by_user = (0..interest.users.len())
        .map(|ui| {
            interest
                .row(ui)
                .iter()
                .enumerate()
                .filter(|(_, score)| **score >= l_min)
                .map(|(si, _)| si)
                .collect()
        })
        .collect();
    PreferenceContext::from_rows(interest.users.clone(), interest.faculties.clone(), by_user)
}
