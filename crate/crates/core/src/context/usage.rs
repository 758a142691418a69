use std::collections::BTreeMap;

use crate::context::FormalContext;
use crate::error::{check_id, Error, Result};

/// User × attribute weight table. Each row is dense and aligned with
/// `attributes`; users without a row (and cells never touched) weigh zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiValuedContext {
    attributes: Vec<String>,
    rows: BTreeMap<String, Vec<u64>>,
}

impl MultiValuedContext {
    pub fn new<A>(attributes: A) -> Result<MultiValuedContext>
    where
        A: IntoIterator,
        A::Item: Into<String>,
    {
        let mut attributes: Vec<String> = attributes.into_iter().map(Into::into).collect();
        for a in &attributes {
            check_id("attribute", a)?;
        }
        attributes.sort();
        if let Some(w) = attributes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateId {
                kind: "attribute",
                id: w[0].clone(),
            });
        }
        Ok(MultiValuedContext {
            attributes,
            rows: BTreeMap::new(),
        })
    }

    /// Empty history over the catalog's attribute set.
    pub fn for_catalog(catalog: &FormalContext) -> MultiValuedContext {
        MultiValuedContext {
            attributes: catalog.attributes().to_vec(),
            rows: BTreeMap::new(),
        }
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn attribute_index(&self, a: &str) -> Option<usize> {
        self.attributes.binary_search_by(|x| x.as_str().cmp(a)).ok()
    }

    pub fn users(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.rows.keys().map(String::as_str)
    }

    pub fn contains_user(&self, u: &str) -> bool {
        self.rows.contains_key(u)
    }

    /// Adds a zero-history row for `u`. Returns `false` if it already existed.
    pub fn register_user(&mut self, u: &str) -> Result<bool> {
        check_id("user", u)?;
        if self.rows.contains_key(u) {
            return Ok(false);
        }
        self.rows.insert(u.to_string(), vec![0; self.attributes.len()]);
        Ok(true)
    }

    pub fn row(&self, u: &str) -> Option<&[u64]> {
        self.rows.get(u).map(Vec::as_slice)
    }

    pub(crate) fn row_mut(&mut self, u: &str) -> Option<&mut Vec<u64>> {
        self.rows.get_mut(u)
    }

    /// Weight of `(u, a)`; zero for unknown users and undeclared attributes.
    pub fn weight(&self, u: &str, a: &str) -> u64 {
        match (self.rows.get(u), self.attribute_index(a)) {
            (Some(row), Some(ai)) => row[ai],
            _ => 0,
        }
    }

    /// Overwrites a single cell, registering `u` if needed.
    pub fn set_weight(&mut self, u: &str, a: &str, w: u64) -> Result<()> {
        let ai = self
            .attribute_index(a)
            .ok_or_else(|| Error::UnknownAttribute(a.to_string()))?;
        self.register_user(u)?;
        self.rows.get_mut(u).expect("registered")[ai] = w;
        Ok(())
    }

    /// Nonzero cells as `(user, attribute, weight)` in canonical order.
    pub fn nonzero(&self) -> impl Iterator<Item = (&str, &str, u64)> + '_ {
        self.rows.iter().flat_map(move |(u, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, w)| **w > 0)
                .map(move |(ai, w)| (u.as_str(), self.attributes[ai].as_str(), *w))
        })
    }

    /// Fails with `AttributeMismatch` unless both sides declare the same
    /// attribute identifiers.
    pub fn check_attributes(&self, catalog: &FormalContext) -> Result<()> {
        if self.attributes.as_slice() == catalog.attributes() {
            return Ok(());
        }
        let only_usage = self
            .attributes
            .iter()
            .filter(|a| catalog.attribute_index(a).is_none())
            .cloned()
            .collect();
        let only_catalog = catalog
            .attributes()
            .iter()
            .filter(|a| self.attribute_index(a).is_none())
            .cloned()
            .collect();
        Err(Error::AttributeMismatch {
            only_usage,
            only_catalog,
        })
    }
}

/// Per-user total visit counts. Absent users have zero visits.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VisitsVector {
    visits: BTreeMap<String, u64>,
}

impl VisitsVector {
    pub fn new() -> VisitsVector {
        VisitsVector::default()
    }

    pub fn get(&self, u: &str) -> u64 {
        self.visits.get(u).copied().unwrap_or(0)
    }

    pub fn set(&mut self, u: &str, v: u64) -> Result<()> {
        check_id("user", u)?;
        if v == 0 {
            self.visits.remove(u);
        } else {
            self.visits.insert(u.to_string(), v);
        }
        Ok(())
    }

    /// Users with a positive count, in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.visits.iter().map(|(u, v)| (u.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }
}

/// Raw visit events: how often each user opened each faculty.
///
/// The weight table and visit vector are projections of this log; it is what
/// leave-one-out evaluation needs to subtract a single faculty's contribution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VisitLog {
    counts: BTreeMap<String, BTreeMap<String, u64>>,
}

impl VisitLog {
    pub fn new() -> VisitLog {
        VisitLog::default()
    }

    pub fn add(&mut self, u: &str, s: &str, count: u64) -> Result<()> {
        check_id("user", u)?;
        check_id("faculty", s)?;
        if count > 0 {
            *self
                .counts
                .entry(u.to_string())
                .or_default()
                .entry(s.to_string())
                .or_default() += count;
        }
        Ok(())
    }

    pub fn count(&self, u: &str, s: &str) -> u64 {
        self.counts
            .get(u)
            .and_then(|row| row.get(s))
            .copied()
            .unwrap_or(0)
    }

    /// `(faculty, count)` pairs for one user, faculty ascending.
    pub fn user(&self, u: &str) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.counts
            .get(u)
            .into_iter()
            .flat_map(|row| row.iter().map(|(s, c)| (s.as_str(), *c)))
    }

    pub fn users(&self) -> impl Iterator<Item = &str> + '_ {
        self.counts.keys().map(String::as_str)
    }

    /// `(user, faculty, count)` triples in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, u64)> + '_ {
        self.counts.iter().flat_map(|(u, row)| {
            row.iter().map(move |(s, c)| (u.as_str(), s.as_str(), *c))
        })
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Rebuilds usage history and visit totals by replaying every event
    /// through [`record_visit`].
    pub fn replay(&self, catalog: &FormalContext) -> Result<(MultiValuedContext, VisitsVector)> {
        let mut usage = MultiValuedContext::for_catalog(catalog);
        let mut visits = VisitsVector::new();
        for (u, s, c) in self.entries() {
            for _ in 0..c {
                record_visit(&mut usage, &mut visits, u, s, catalog)?;
            }
        }
        Ok((usage, visits))
    }
}

/// One visit of `u` to faculty `s`: every attribute of `s` gains one unit of
/// weight for `u`, and `u`'s visit counter goes up by one. Unknown users are
/// registered with an empty history first. Nothing changes on error.
pub fn record_visit(
    usage: &mut MultiValuedContext,
    visits: &mut VisitsVector,
    u: &str,
    s: &str,
    catalog: &FormalContext,
) -> Result<()> {
    let si = catalog.require_faculty(s)?;
    check_id("user", u)?;
    usage.check_attributes(catalog)?;
    usage.register_user(u)?;
    let row = usage.row_mut(u).expect("registered");
    // attribute lists are identical, so catalog indices address the row
    for &ai in catalog.intent_of(si) {
        row[ai] += 1;
    }
    *visits.visits.entry(u.to_string()).or_default() += 1;
    Ok(())
}
