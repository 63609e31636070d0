//! Seeded random search over a [`Family`].

use groupcut::{extremality_test, minimality_test, Status};
use rayon::prelude::*;
use serde::Serialize;

use crate::family::Family;
use crate::rng::Lcg64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Invalid,
    NotMinimal,
    MinimalNotExtreme,
    Extreme,
    Inconclusive,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchSummary {
    pub count: u64,
    pub seed: u64,
    pub invalid: u64,
    pub not_minimal: u64,
    pub minimal_not_extreme: u64,
    pub extreme: u64,
    pub inconclusive: u64,
}

impl SearchSummary {
    fn add(&mut self, o: Outcome) {
        match o {
            Outcome::Invalid => self.invalid += 1,
            Outcome::NotMinimal => self.not_minimal += 1,
            Outcome::MinimalNotExtreme => self.minimal_not_extreme += 1,
            Outcome::Extreme => self.extreme += 1,
            Outcome::Inconclusive => self.inconclusive += 1,
        }
    }
}

/// Classifies sample `index` of a run with `seed`.
pub fn classify(family: &Family, seed: u64, index: u64) -> Outcome {
    let mut rng = Lcg64::for_sample(seed, index);
    let Ok(params) = family.sample_parameters(&mut rng) else {
        return Outcome::Invalid;
    };
    let Ok(pi) = family.instantiate(&params) else {
        return Outcome::Invalid;
    };
    if !minimality_test(&pi, None).is_minimal {
        return Outcome::NotMinimal;
    }
    match extremality_test(&pi).map(|v| v.status) {
        Ok(Status::Extreme) => Outcome::Extreme,
        Ok(Status::NotExtreme) => Outcome::MinimalNotExtreme,
        Ok(Status::Inconclusive) | Err(_) => Outcome::Inconclusive,
    }
}

pub fn search_random(family: &Family, count: u64, seed: u64) -> SearchSummary {
    let outcomes: Vec<Outcome> = (0..count).into_par_iter().map(|i| classify(family, seed, i)).collect();
    let mut summary = SearchSummary {
        count,
        seed,
        ..Default::default()
    };
    for o in outcomes {
        summary.add(o);
    }
    summary
}
