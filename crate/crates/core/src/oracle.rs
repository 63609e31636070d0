//! Extremality oracle via restriction to the cyclic group `(1/N)ℤ/ℤ`.
//!
//! Works only for continuous functions with rational breakpoints. The
//! restriction to a sufficiently fine grid is extreme for the finite group
//! problem exactly when the original function is extreme; the check runs at
//! `N = 4q` and again at `N = 8q` as a guard.

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::linalg::{full_rank_mod_p, normalize, sparse_row, Echelon};
use crate::minimality::detect_f;
use crate::pwl::PwlPeriodic;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteGroupFunction {
    #[serde(rename = "N")]
    pub n: u64,
    pub values: Vec<Rational>,
    pub f_index: u64,
}

impl FiniteGroupFunction {
    pub fn new(values: Vec<Rational>, f_index: u64) -> Self {
        FiniteGroupFunction {
            n: values.len() as u64,
            values,
            f_index,
        }
    }
}

/// `values[i] = π(i/N)`.
pub fn restrict(pi: &PwlPeriodic, n: u64) -> Result<FiniteGroupFunction, Error> {
    if let Some(x) = pi.discontinuities().into_iter().next() {
        return Err(Error::NotContinuous(x));
    }
    let f = detect_f(pi)?;
    let nn = Rational::from_integer(n as i64);
    let on_grid = |x: &Rational| (x * &nn).is_integer();
    if !pi.points().all(on_grid) || !on_grid(&f) {
        return Err(Error::GridTooCoarse { n });
    }
    let values = (0..n).map(|i| pi.value(&Rational::new(i as i64, n as i64))).collect();
    let f_index = (&f * &nn).numer().to_u64().expect("grid index");
    Ok(FiniteGroupFunction { n, values, f_index })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteVerdict {
    #[serde(rename = "N")]
    pub n: u64,
    pub extreme: bool,
    pub kernel_dimension: usize,
    /// A normalized kernel vector indexed by grid point, when not extreme.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Vec<Rational>>,
}

/// Values scaled by their common denominator, when that fits in `i128`.
fn scaled_values(g: &FiniteGroupFunction) -> Option<(Vec<i128>, i128)> {
    let denom = Rational::common_denominator(&g.values).to_i128()?;
    let d = Rational::from_bigints(denom.into(), 1.into()).ok()?;
    let values = g.values.iter().map(|v| (v * &d).numer().to_i128()).collect::<Option<Vec<_>>>()?;
    values.iter().all(|v| v.checked_mul(4).is_some()).then_some((values, denom))
}

fn check_minimal(g: &FiniteGroupFunction, v: &[i128], one: i128) -> Result<(), Error> {
    let n = v.len();
    let fail = |msg: String| Err(Error::NotMinimalFinite(msg));
    if n == 0 || g.f_index as usize >= n {
        return fail("empty grid or f out of range".into());
    }
    if v[0] != 0 {
        return fail(format!("value at 0 is {}", g.values[0]));
    }
    if let Some(i) = v.iter().position(|x| *x < 0) {
        return fail(format!("negative value at {i}/{n}"));
    }
    let fi = g.f_index as usize;
    if let Some(i) = (0..n).find(|&i| v[i] + v[(n + fi - i) % n] != one) {
        return fail(format!("symmetry fails at {i}/{n}"));
    }
    let bad = (0..n)
        .into_par_iter()
        .find_map_first(|i| (i..n).find(|&j| v[i] + v[j] < v[(i + j) % n]).map(|j| (i, j)));
    if let Some((i, j)) = bad {
        return fail(format!("subadditivity fails at ({i}/{n}, {j}/{n})"));
    }
    Ok(())
}

/// Additive pairs `i ≤ j`, as index triples `(i, j, i + j mod N)`.
fn additive_pairs(v: &[i128]) -> Vec<(usize, usize, usize)> {
    let n = v.len();
    (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i..n)
                .filter(move |&j| v[i] + v[j] == v[(i + j) % n])
                .map(move |j| (i, j, (i + j) % n))
        })
        .collect()
}

/// Extremality of a finite group function.
pub fn finite_extremality(g: &FiniteGroupFunction) -> Result<FiniteVerdict, Error> {
    let (v, one) = scaled_values(g)
        .ok_or_else(|| Error::InternalInconsistency("grid values too large for the integer scan".into()))?;
    check_minimal(g, &v, one)?;
    let n = g.values.len();
    let mut rows: Vec<Vec<(usize, i64)>> = vec![vec![(0, 1)], vec![(g.f_index as usize, 1)]];
    let mut equations: Vec<Vec<(usize, i64)>> = additive_pairs(&v)
        .into_iter()
        .map(|(i, j, k)| vec![(i, 1), (j, 1), (k, -1)])
        .collect();
    equations.shuffle(&mut ChaCha8Rng::seed_from_u64(n as u64));
    rows.extend(equations);

    if full_rank_mod_p(n, &rows) {
        return Ok(FiniteVerdict {
            n: n as u64,
            extreme: true,
            kernel_dimension: 0,
            perturbation: None,
        });
    }
    let mut e = Echelon::new(n);
    for row in &rows {
        e.add(sparse_row(row.iter().map(|&(c, v)| (c, Rational::from_integer(v)))), Rational::zero());
        if e.rank() == n {
            break;
        }
    }
    let mut kernel = e.kernel_basis();
    let perturbation = kernel.first_mut().map(|v| {
        normalize(v);
        v.clone()
    });
    Ok(FiniteVerdict {
        n: n as u64,
        extreme: kernel.is_empty(),
        kernel_dimension: kernel.len(),
        perturbation,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleVerdict {
    Extreme,
    NotExtreme,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub verdict: OracleVerdict,
    pub kernel_dimension: usize,
    /// The finer grid size the verdict was confirmed at.
    pub confirmed_at: u64,
}

/// Least common denominator of the breakpoints and `f`.
pub fn grid_denominator(pi: &PwlPeriodic) -> Result<u64, Error> {
    let f = detect_f(pi)?;
    Rational::common_denominator(pi.points().chain(std::iter::once(&f)))
        .to_u64()
        .ok_or_else(|| Error::InternalInconsistency("denominator too large".into()))
}

/// Finite-group verdict at `N = 4q`, confirmed at `N = 8q`.
pub fn oracle_check(pi: &PwlPeriodic) -> Result<OracleReport, Error> {
    if let Some(x) = pi.discontinuities().into_iter().next() {
        return Err(Error::NotContinuous(x));
    }
    let q = grid_denominator(pi)?;
    let coarse = finite_extremality(&restrict(pi, 4 * q)?)?;
    let fine = finite_extremality(&restrict(pi, 8 * q)?)?;
    if coarse.extreme != fine.extreme {
        return Err(Error::InternalInconsistency(format!(
            "finite verdicts differ at N = {} and N = {}",
            4 * q,
            8 * q
        )));
    }
    Ok(OracleReport {
        n: 4 * q,
        verdict: if coarse.extreme { OracleVerdict::Extreme } else { OracleVerdict::NotExtreme },
        kernel_dimension: coarse.kernel_dimension,
        confirmed_at: 8 * q,
    })
}
