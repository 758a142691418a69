use std::collections::BTreeSet;

use crate::error::{check_id, Error, Result};

/// Binary faculty × attribute relation: the catalog of recommendable items.
///
/// Faculties and attributes are kept in lexicographic order, which is also the
/// canonical on-disk order. Intents and extents are stored side by side so
/// both derivation operators are a slice lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalContext {
    faculties: Vec<String>,
    attributes: Vec<String>,
    intents: Vec<Vec<usize>>,
    extents: Vec<Vec<usize>>,
}

fn sorted_unique<I, S>(kind: &'static str, ids: I) -> Result<Vec<String>>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut out: Vec<String> = ids.into_iter().map(Into::into).collect();
    for id in &out {
        check_id(kind, id)?;
    }
    out.sort();
    if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateId {
            kind,
            id: w[0].clone(),
        });
    }
    Ok(out)
}

impl FormalContext {
    /// Builds a context from declared faculties, declared attributes and the
    /// incidence pairs. Repeated pairs collapse; pairs naming undeclared ids
    /// are rejected.
    pub fn new<F, A, P, S, T>(faculties: F, attributes: A, incidence: P) -> Result<FormalContext>
    where
        F: IntoIterator,
        F::Item: Into<String>,
        A: IntoIterator,
        A::Item: Into<String>,
        P: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let faculties = sorted_unique("faculty", faculties)?;
        let attributes = sorted_unique("attribute", attributes)?;
        let mut intents = vec![BTreeSet::new(); faculties.len()];
        for (s, a) in incidence {
            let (s, a) = (s.as_ref(), a.as_ref());
            let si = faculties
                .binary_search_by(|x| x.as_str().cmp(s))
                .map_err(|_| Error::UnknownFaculty(s.to_string()))?;
            let ai = attributes
                .binary_search_by(|x| x.as_str().cmp(a))
                .map_err(|_| Error::UnknownAttribute(a.to_string()))?;
            intents[si].insert(ai);
        }
        let intents: Vec<Vec<usize>> = intents.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut extents = vec![Vec::new(); attributes.len()];
        for (si, intent) in intents.iter().enumerate() {
            for &ai in intent {
                extents[ai].push(si);
            }
        }
        Ok(FormalContext {
            faculties,
            attributes,
            intents,
            extents,
        })
    }

    /// Convenience constructor from `faculty -> attributes` rows.
    pub fn from_rows<A, R, S, T>(attributes: A, rows: R) -> Result<FormalContext>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        R: IntoIterator<Item = (S, Vec<T>)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut faculties = Vec::new();
        let mut pairs = Vec::new();
        for (s, attrs) in rows {
            let s: String = s.into();
            for a in attrs {
                pairs.push((s.clone(), a.into()));
            }
            faculties.push(s);
        }
        FormalContext::new(faculties, attributes, pairs)
    }

    pub fn faculties(&self) -> &[String] {
        &self.faculties
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn faculty_index(&self, s: &str) -> Option<usize> {
        self.faculties.binary_search_by(|x| x.as_str().cmp(s)).ok()
    }

    pub fn attribute_index(&self, a: &str) -> Option<usize> {
        self.attributes.binary_search_by(|x| x.as_str().cmp(a)).ok()
    }

    pub(crate) fn require_faculty(&self, s: &str) -> Result<usize> {
        self.faculty_index(s)
            .ok_or_else(|| Error::UnknownFaculty(s.to_string()))
    }

    /// Sorted attribute indices of the faculty at `si`.
    pub fn intent_of(&self, si: usize) -> &[usize] {
        &self.intents[si]
    }

    /// Sorted faculty indices carrying the attribute at `ai`.
    pub fn extent_of(&self, ai: usize) -> &[usize] {
        &self.extents[ai]
    }

    /// `s'`: the attributes of faculty `s`.
    pub fn faculty_intent(&self, s: &str) -> Result<Vec<&str>> {
        let si = self.require_faculty(s)?;
        Ok(self.intents[si]
            .iter()
            .map(|&ai| self.attributes[ai].as_str())
            .collect())
    }

    /// `a'`: the faculties that have attribute `a`.
    pub fn attribute_extent(&self, a: &str) -> Result<Vec<&str>> {
        let ai = self
            .attribute_index(a)
            .ok_or_else(|| Error::UnknownAttribute(a.to_string()))?;
        Ok(self.extents[ai]
            .iter()
            .map(|&si| self.faculties[si].as_str())
            .collect())
    }

    pub fn has(&self, si: usize, ai: usize) -> bool {
        self.intents[si].binary_search(&ai).is_ok()
    }

    /// All incidence pairs, faculty-major, in canonical order.
    pub fn incidence(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.intents.iter().enumerate().flat_map(move |(si, intent)| {
            intent
                .iter()
                .map(move |&ai| (self.faculties[si].as_str(), self.attributes[ai].as_str()))
        })
    }
}

/// Sorted-merge intersection of two ascending index lists.
pub(crate) fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::fixtures::k3;

    #[test]
    fn intents_of_k3() {
        let k = k3();
        assert_eq!(k.faculty_intent("f1").unwrap(), ["a1", "a2"]);
        assert_eq!(k.faculty_intent("f3").unwrap(), ["a3", "a4"]);
    }

    #[test]
    fn empty_row() {
        let k = FormalContext::from_rows(["a1"], [("f0", Vec::<&str>::new()), ("f1", vec!["a1"])]).unwrap();
        assert!(k.faculty_intent("f0").unwrap().is_empty());
    }

    #[test]
    fn extents_of_k3() {
        let k = k3();
        assert_eq!(k.attribute_extent("a2").unwrap(), ["f1", "f2"]);
        assert_eq!(k.attribute_extent("a1").unwrap(), ["f1"]);
        assert!(matches!(k.attribute_extent("a5"), Err(Error::UnknownAttribute(a)) if a == "a5"));
    }

    #[test]
    fn unknown_faculty() {
        assert!(matches!(k3().faculty_intent("fx"), Err(Error::UnknownFaculty(_))));
    }

    #[test]
    fn rejects_bad_declarations() {
        assert!(matches!(
            FormalContext::new(["f1", "f1"], ["a1"], Vec::<(&str, &str)>::new()),
            Err(Error::DuplicateId { kind: "faculty", .. })
        ));
        assert!(matches!(
            FormalContext::new(["f1"], [""], Vec::<(&str, &str)>::new()),
            Err(Error::InvalidId { .. })
        ));
        assert!(matches!(
            FormalContext::new(["f1"], ["a1"], [("f1", "a9")]),
            Err(Error::UnknownAttribute(_))
        ));
        assert!(matches!(
            FormalContext::new(["f1"], ["a1"], [("f9", "a1")]),
            Err(Error::UnknownFaculty(_))
        ));
    }

    #[test]
    fn declaration_order_is_irrelevant() {
        let a = FormalContext::new(["f2", "f1"], ["b", "a"], [("f1", "a"), ("f2", "b")]).unwrap();
        let b = FormalContext::new(["f1", "f2"], ["a", "b"], [("f2", "b"), ("f1", "a"), ("f1", "a")]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.incidence().collect::<Vec<_>>(), [("f1", "a"), ("f2", "b")]);
    }

    #[test]
    fn merge_intersection() {
        assert_eq!(intersect_sorted(&[1, 3, 5, 7], &[2, 3, 7, 9]), [3, 7]);
        assert!(intersect_sorted(&[], &[1]).is_empty());
    }
}
