//! Naive reference implementations of the recommender pipeline.
//!
//! Everything here is written for obviousness, not speed: plain ordered maps,
//! explicit triple loops and a hand-rolled fraction type. Nothing is shared
//! with the `bicrec` crate so the two can be compared as independent routes.

#![allow(clippy::should_implement_trait)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

/// Non-negative fraction kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frac {
    pub num: u128,
    pub den: u128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Frac {
    pub fn new(num: u128, den: u128) -> Frac {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den);
        if g == 0 {
            return Frac { num: 0, den: 1 };
        }
        Frac { num: num / g, den: den / g }
    }

    pub fn int(v: u128) -> Frac {
        Frac { num: v, den: 1 }
    }

    pub fn add(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    pub fn mul(self, o: Frac) -> Frac {
        Frac::new(self.num * o.num, self.den * o.den)
    }

    pub fn div(self, o: Frac) -> Frac {
        assert!(o.num != 0, "division by zero");
        Frac::new(self.num * o.den, self.den * o.num)
    }
}

impl Ord for Frac {
    fn cmp(&self, o: &Frac) -> Ordering {
        (self.num * o.den).cmp(&(o.num * self.den))
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, o: &Frac) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// A whole problem instance in plain collections.
#[derive(Clone, Debug, Default)]
pub struct Instance {
    /// faculty -> attributes
    pub intents: BTreeMap<String, BTreeSet<String>>,
    /// every declared attribute
    pub attributes: BTreeSet<String>,
    /// user -> attribute -> weight; missing cells are zero
    pub weights: BTreeMap<String, BTreeMap<String, u64>>,
    /// user -> visit count; missing users are zero
    pub visits: BTreeMap<String, u64>,
}

impl Instance {
    fn weight(&self, u: &str, a: &str) -> u64 {
        self.weights.get(u).and_then(|row| row.get(a)).copied().unwrap_or(0)
    }

    fn has(&self, s: &str, a: &str) -> bool {
        self.intents.get(s).is_some_and(|i| i.contains(a))
    }

    pub fn users(&self) -> BTreeSet<String> {
        self.weights.keys().chain(self.visits.keys()).cloned().collect()
    }
}

pub type Ranked = Vec<(String, Frac)>;

/// Score descending, then faculty id ascending, then the first `n`.
pub fn top(mut items: Ranked, n: usize) -> Ranked {
    items.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
    items.truncate(n);
    items
}

/// K1 = Kw · K^T by the literal triple loop over (u, a, s).
pub fn multiply(inst: &Instance) -> BTreeMap<(String, String), u64> {
    let mut out = BTreeMap::new();
    for u in inst.users() {
        for s in inst.intents.keys() {
            let mut acc = 0u64;
            for a in &inst.attributes {
                let indicator = if inst.has(s, a) { 1 } else { 0 };
                acc += inst.weight(&u, a) * indicator;
            }
            out.insert((u.clone(), s.clone()), acc);
        }
    }
    out
}

/// RecBi1: pair the seed with every other faculty through the shared
/// attribute set, score each pair by the mean normalized weight, rank.
pub fn recbi1(inst: &Instance, u0: &str, seed: &str, n: usize) -> Ranked {
    let v = inst.visits.get(u0).copied().unwrap_or(0);
    assert!(v > 0, "recbi1 needs history");
    let seed_intent = &inst.intents[seed];
    let mut kc = Vec::new();
    for (sj, intent) in &inst.intents {
        if sj == seed {
            continue;
        }
        let shared: Vec<&String> = intent.intersection(seed_intent).collect();
        if shared.is_empty() {
            continue;
        }
        let mut sum = Frac::int(0);
        for attr in &shared {
            sum = sum.add(Frac::new(inst.weight(u0, attr) as u128, v as u128));
        }
        kc.push((sj.clone(), sum.div(Frac::int(shared.len() as u128))));
    }
    top(kc, n)
}

/// Thresholded preference relation: (user, faculty) pairs scoring >= l_min.
pub fn preferences(inst: &Instance, l_min: u64) -> BTreeSet<(String, String)> {
    multiply(inst)
        .into_iter()
        .filter(|(_, score)| *score >= l_min)
        .map(|(pair, _)| pair)
        .collect()
}

fn covisitation(inst: &Instance, seed: &str, l_min: u64) -> Vec<(String, u128)> {
    let z = preferences(inst, l_min);
    let seed_visitors: BTreeSet<&String> =
        z.iter().filter(|(_, s)| s == seed).map(|(u, _)| u).collect();
    let mut candidates = BTreeSet::new();
    for (u, s) in &z {
        if seed_visitors.contains(u) && s != seed {
            candidates.insert(s.clone());
        }
    }
    candidates
        .into_iter()
        .map(|sc| {
            let count = z
                .iter()
                .filter(|(u, s)| *s == sc && seed_visitors.contains(u))
                .count();
            (sc, count as u128)
        })
        .collect()
}

/// RecBi2.1: co-visitation counts over the seed's visitors.
pub fn recbi2_cold(inst: &Instance, seed: &str, n: usize, l_min: u64) -> Ranked {
    let v = covisitation(inst, seed, l_min)
        .into_iter()
        .map(|(s, c)| (s, Frac::int(c)))
        .collect();
    top(v, n)
}

/// Co-visitation scaled by (1 + mean normalized weight of u0 over the
/// candidate's full intent).
pub fn recbi2_feedback(inst: &Instance, u0: &str, seed: &str, n: usize, l_min: u64) -> Ranked {
    let v = inst.visits.get(u0).copied().unwrap_or(0);
    assert!(v > 0, "feedback needs history");
    let scored = covisitation(inst, seed, l_min)
        .into_iter()
        .map(|(s, c)| {
            let intent = &inst.intents[&s];
            let personal = if intent.is_empty() {
                Frac::int(0)
            } else {
                let mut sum = Frac::int(0);
                for a in intent {
                    sum = sum.add(Frac::new(inst.weight(u0, a) as u128, v as u128));
                }
                sum.div(Frac::int(intent.len() as u128))
            };
            (s, Frac::int(c).mul(Frac::int(1).add(personal)))
        })
        .collect();
    top(scored, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Instance {
        let mut inst = Instance::default();
        for (f, attrs) in [("f1", ["a1", "a2"]), ("f2", ["a2", "a3"]), ("f3", ["a3", "a4"])] {
            inst.intents.insert(f.into(), attrs.iter().map(|a| a.to_string()).collect());
        }
        inst.attributes = ["a1", "a2", "a3", "a4"].iter().map(|a| a.to_string()).collect();
        inst
    }

    #[test]
    fn hand_run() {
        let mut inst = k3();
        inst.weights.insert("u0".into(), [("a1".into(), 2), ("a2".into(), 1)].into());
        inst.visits.insert("u0".into(), 3);
        assert_eq!(recbi1(&inst, "u0", "f1", 5), vec![("f2".to_string(), Frac::new(1, 3))]);
        let m = multiply(&inst);
        assert_eq!(m[&("u0".into(), "f1".into())], 3);
        assert_eq!(m[&("u0".into(), "f2".into())], 1);
        assert_eq!(m[&("u0".into(), "f3".into())], 0);
    }

    #[test]
    fn frac_order() {
        assert!(Frac::new(1, 3) < Frac::new(1, 2));
        assert_eq!(Frac::new(2, 4), Frac::new(1, 2));
        assert_eq!(Frac::new(0, 7), Frac::int(0));
    }
}
