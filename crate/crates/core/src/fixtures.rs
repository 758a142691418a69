//! Small hand-checkable contexts, shared by tests, examples and docs.

use crate::context::{FormalContext, MultiValuedContext, PreferenceContext, VisitsVector};

/// Three faculties over four attributes, each overlapping its neighbour:
/// `f1 ↦ {a1,a2}`, `f2 ↦ {a2,a3}`, `f3 ↦ {a3,a4}`.
pub fn k3() -> FormalContext {
    FormalContext::from_rows(
        ["a1", "a2", "a3", "a4"],
        [
            ("f1", vec!["a1", "a2"]),
            ("f2", vec!["a2", "a3"]),
            ("f3", vec!["a3", "a4"]),
        ],
    )
    .expect("valid fixture")
}

/// Single user `u0` with weights `a1 = 2`, `a2 = 1`.
pub fn u0_usage(catalog: &FormalContext) -> MultiValuedContext {
    let mut kw = MultiValuedContext::for_catalog(catalog);
    kw.set_weight("u0", "a1", 2).expect("fixture");
    kw.set_weight("u0", "a2", 1).expect("fixture");
    kw
}

/// `u0` has three visits.
pub fn u0_visits() -> VisitsVector {
    let mut v = VisitsVector::new();
    v.set("u0", 3).expect("fixture");
    v
}

/// Preference context `u1 ↦ {f1,f2}`, `u2 ↦ {f1,f3}`, `u3 ↦ {f2}`.
pub fn p3() -> PreferenceContext {
    PreferenceContext::new(
        ["u1", "u2", "u3"],
        ["f1", "f2", "f3"],
        [("u1", "f1"), ("u1", "f2"), ("u2", "f1"), ("u2", "f3"), ("u3", "f2")],
    )
    .expect("valid fixture")
}

/// Interest level at which [`p3_usage`] thresholds to exactly [`p3`].
pub const P3_L_MIN: u64 = 2;

/// Usage history over [`k3`] whose interest matrix, cut at [`P3_L_MIN`],
/// is [`p3`]:
///
/// | user | weights          | f1 | f2 | f3 |
/// |------|------------------|----|----|----|
/// | u1   | a2=2             | 2  | 2  | 0  |
/// | u2   | a1=2, a4=2       | 2  | 0  | 2  |
/// | u3   | a2=1, a3=1       | 1  | 2  | 1  |
pub fn p3_usage(catalog: &FormalContext) -> MultiValuedContext {
    let mut kw = MultiValuedContext::for_catalog(catalog);
    for (u, a, w) in [
        ("u1", "a2", 2),
        ("u2", "a1", 2),
        ("u2", "a4", 2),
        ("u3", "a2", 1),
        ("u3", "a3", 1),
    ] {
        kw.set_weight(u, a, w).expect("fixture");
    }
    kw
}
