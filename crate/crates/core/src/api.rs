//! JSON bodies exchanged over HTTP and printed by `--json`.

use serde::{Deserialize, Serialize};

use crate::context::FormalContext;
use crate::error::Error;
use crate::recbi::{Mode, Recommendation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendationBody {
    pub mode: Mode,
    pub seed_faculty: String,
    pub items: Vec<ItemBody>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemBody {
    pub faculty_id: String,
    pub score_num: u64,
    pub score_den: u64,
}

impl From<&Recommendation> for RecommendationBody {
    fn from(rec: &Recommendation) -> Self {
        RecommendationBody {
            mode: rec.mode,
            seed_faculty: rec.seed_faculty.clone(),
            items: rec
                .items
                .iter()
                .map(|it| ItemBody {
                    faculty_id: it.faculty.clone(),
                    score_num: *it.score.numer(),
                    score_den: *it.score.denom(),
                })
                .collect(),
        }
    }
}

impl Recommendation {
    /// Compact JSON in the API shape; byte-stable for equal values.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&RecommendationBody::from(self)).expect("plain data serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacultyBody {
    pub id: String,
    pub attributes: Vec<String>,
}

pub fn catalog_body(catalog: &FormalContext) -> Vec<FacultyBody> {
    catalog
        .faculties()
        .iter()
        .enumerate()
        .map(|(si, id)| FacultyBody {
            id: id.clone(),
            attributes: catalog
                .intent_of(si)
                .iter()
                .map(|&ai| catalog.attributes()[ai].clone())
                .collect(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionBody {
    pub user_id: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitBody {
    pub faculty_id: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthBody {
    pub status: String,
    pub faculties: usize,
    pub users: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub detail: String,
}

impl From<&Error> for ErrorBody {
    fn from(err: &Error) -> Self {
        ErrorBody {
            error: err.root().kind().to_string(),
            detail: err.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{k3, u0_usage, u0_visits};
    use crate::recbi::recbi1;

    #[test]
    fn recommendation_shape() {
        let k = k3();
        let rec = recbi1(&k, &u0_usage(&k), &u0_visits(), "u0", "f1", 5).unwrap();
        assert_eq!(
            rec.to_json(),
            r#"{"mode":"recbi1","seed_faculty":"f1","items":[{"faculty_id":"f2","score_num":1,"score_den":3}]}"#
        );
    }

    #[test]
    fn catalog_shape() {
        let body = catalog_body(&k3());
        assert_eq!(body.len(), 3);
        assert_eq!(
            serde_json::to_string(&body[0]).unwrap(),
            r#"{"id":"f1","attributes":["a1","a2"]}"#
        );
    }

    #[test]
    fn error_shape() {
        let body = ErrorBody::from(&Error::ZeroVisits("u".into()));
        assert_eq!(body.error, "ZeroVisits");
    }
}
