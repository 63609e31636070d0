//! Named constructors for the extreme functions whose definitions are known
//! here, plus a catalog of the wider compendium.
//!
//! Parameter validation enforces each family's extremality conditions exactly,
//! including the boundary cases of every inequality.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Error;
use crate::pwl::{BreakpointDatum, PwlPeriodic};
use crate::rational::Rational;

/// Largest supported depth for the `psi_n` approximants (they have `2^n`
/// positive-slope intervals).
pub const MAX_DEPTH: usize = 12;

fn out_of_range(function: &str, constraint: &str) -> Error {
    Error::ParamOutOfRange {
        function: function.to_string(),
        constraint: constraint.to_string(),
    }
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// The Gomory mixed-integer cut function: `x/f` on `[0, f]` and
/// `(1 - x)/(1 - f)` on `[f, 1]`.
///
/// ```
/// use groupcut::{compendium::gmic, rational::q};
/// let g = gmic(&q(1, 2)).unwrap();
/// assert_eq!(g.value(&q(1, 4)), q(1, 2));
/// assert_eq!(gmic(&q(1, 5)).unwrap().value(&q(1, 5)), q(1, 1));
/// assert!(gmic(&q(1, 1)).is_err());
/// ```
pub fn gmic(f: &Rational) -> Result<PwlPeriodic, Error> {
    if !(f.is_positive() && *f < Rational::one()) {
        return Err(out_of_range("gmic", GMIC_F));
    }
    PwlPeriodic::from_breakpoints(
        &[Rational::zero(), f.clone(), Rational::one()],
        &[Rational::zero(), Rational::one(), Rational::zero()],
    )
}

/// The two-sided discontinuous DPL1-extreme function for `0 < f < 1/3`.
///
/// It is `x/f` on `[0, f]`, `2x/(1+2f)` on `(f, b)`, `1/2` at
/// `b = (1+f)/2`, `(2x - 1)/(1+2f)` on `(b, 1)` and `0` at `1`; it jumps
/// at `f` (from the right), at `b` and at `1`.
///
/// ```
/// use groupcut::{compendium::rlm_dpl1_extreme_3a, pwl::Side, rational::q};
/// let p = rlm_dpl1_extreme_3a(&q(1, 5)).unwrap();
/// assert_eq!(p.eval(&q(3, 5), Side::At), q(1, 2));
/// assert_eq!(p.eval(&q(3, 5), Side::Left), q(6, 7));
/// assert_eq!(p.eval(&q(3, 5), Side::Right), q(1, 7));
/// assert_eq!(p.eval(&q(1, 1), Side::Left), q(5, 7));
/// assert!(rlm_dpl1_extreme_3a(&q(1, 3)).is_err());
/// ```
pub fn rlm_dpl1_extreme_3a(f: &Rational) -> Result<PwlPeriodic, Error> {
    if !(f.is_positive() && *f < Rational::new(1, 3)) {
        return Err(out_of_range("rlm_dpl1_extreme_3a", RLM_F));
    }
    let one = Rational::one();
    let d = &one + int(2) * f; // 1 + 2f
    let s = int(2) / &d;
    let b = (&one + f) / int(2);
    let t = &s * f; // right limit at f
    let at_one_left = &one / &d;
    let data = vec![
        BreakpointDatum {
            point: Rational::zero(),
            value: Rational::zero(),
            left_limit: at_one_left.clone(),
            right_limit: Rational::zero(),
        },
        BreakpointDatum {
            point: f.clone(),
            value: one.clone(),
            left_limit: one.clone(),
            right_limit: t,
        },
        BreakpointDatum {
            point: b.clone(),
            value: Rational::new(1, 2),
            left_limit: &s * &b,
            right_limit: &s * &b - &one / &d,
        },
        BreakpointDatum {
            point: one.clone(),
            value: Rational::zero(),
            left_limit: at_one_left,
            right_limit: Rational::zero(),
        },
    ];
    let slopes = vec![one / f, s.clone(), s];
    PwlPeriodic::from_pieces(data, slopes)
}

/// The continuous backward 3-slope function for `0 < f < b <= (1+f)/4`.
///
/// Breakpoints are `0, f, b, 1+f-b, 1`; slopes on the four pieces follow the
/// pattern `s1, s2, s3, s2`.
///
/// ```
/// use groupcut::{compendium::drlm_backward_3_slope, rational::q};
/// let p = drlm_backward_3_slope(&q(1, 12), &q(1, 6)).unwrap();
/// assert_eq!(p.value(&q(1, 6)), q(2, 13));
/// assert_eq!(p.value(&q(1, 12)), q(1, 1));
/// assert_eq!(p.value(&q(11, 12)), q(11, 13));
/// assert!(drlm_backward_3_slope(&q(1, 12), &q(1, 2)).is_err());
/// ```
pub fn drlm_backward_3_slope(f: &Rational, b: &Rational) -> Result<PwlPeriodic, Error> {
    let one = Rational::one();
    let upper = (&one + f) / int(4);
    if !(f.is_positive() && f < b && *b <= upper) {
        return Err(out_of_range("drlm_backward_3_slope", DRLM_FB));
    }
    let opf = &one + f;
    let c = &opf - b; // 1 + f - b
    PwlPeriodic::from_breakpoints(
        &[Rational::zero(), f.clone(), b.clone(), c.clone(), one.clone()],
        &[Rational::zero(), one, b / &opf, &c / &opf, Rational::zero()],
    )
}

/// Geometric epsilon sequence `eps_i = ((q-2)/q) f (1/q)^(i-1)` used for the
/// `psi_n` approximants in the limiting case where the total measure of the
/// negative-slope set equals 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeometricEpsParams {
    pub f: Rational,
    pub q: Rational,
    pub n: usize,
}

impl GeometricEpsParams {
    pub fn new(f: Rational, q: Rational, n: usize) -> Result<Self, Error> {
        let one = Rational::one();
        let two = int(2);
        if !(f.is_positive() && f < one) {
            return Err(out_of_range("kf_n_step_mir", PSI_F));
        }
        if q <= two {
            return Err(out_of_range("kf_n_step_mir", PSI_Q));
        }
        if f > Rational::new(1, 2) {
            let bound = (&two * &f) / (&two * &f - &one);
            if q > bound {
                return Err(out_of_range("kf_n_step_mir", PSI_Q));
            }
        }
        if n > MAX_DEPTH {
            return Err(Error::DepthTooLarge(n));
        }
        Ok(GeometricEpsParams { f, q, n })
    }

    /// `eps_i` for `i >= 1`.
    pub fn eps(&self, i: usize) -> Rational {
        assert!(i >= 1);
        let two = int(2);
        (&self.q - &two) / &self.q * &self.f * self.q.recip().unwrap().pow(i as i32 - 1)
    }

    pub fn eps_list(&self) -> Vec<Rational> {
        (1..=self.n).map(|i| self.eps(i)).collect()
    }

    /// `gamma_i = (2/q)^i f`.
    pub fn gamma(&self, i: usize) -> Rational {
        (int(2) / &self.q).pow(i as i32) * &self.f
    }

    /// Uniform-convergence constant `C = q / (2 (1 - f))`.
    pub fn convergence_constant(&self) -> Rational {
        &self.q / (int(2) * (Rational::one() - &self.f))
    }
}

/// Positive slope `s_i = (1 - gamma_i) / ((1 - f) gamma_i)`.
pub fn positive_slope(f: &Rational, gamma: &Rational) -> Rational {
    let one = Rational::one();
    (&one - gamma) / ((&one - f) * gamma)
}

/// `gamma_i = f - sum_{k <= i} 2^(k-1) eps_k` for `i = 0..=n`.
pub fn gammas(f: &Rational, eps: &[Rational]) -> Vec<Rational> {
    let mut out = vec![f.clone()];
    let mut g = f.clone();
    let mut pow = Rational::one();
    for e in eps {
        g = g - &pow * e;
        pow = pow * int(2);
        out.push(g.clone());
    }
    out
}

/// Partial negative-slope measure `(1 - f) + sum_{i <= n} 2^(i-1) eps_i`.
pub fn partial_measure(f: &Rational, eps: &[Rational]) -> Rational {
    let mut total = Rational::one() - f;
    let mut pow = Rational::one();
    for e in eps {
        total += &(&pow * e);
        pow = pow * int(2);
    }
    total
}

fn validate_eps(f: &Rational, eps: &[Rational]) -> Result<(), Error> {
    let one = Rational::one();
    if !(f.is_positive() && *f < one) {
        return Err(out_of_range("bccz_counterexample", PSI_F));
    }
    if eps.len() > MAX_DEPTH {
        return Err(Error::DepthTooLarge(eps.len()));
    }
    if eps.iter().any(|e| !e.is_positive()) || eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(out_of_range("bccz_counterexample", EPS_DECREASING));
    }
    if let Some(e1) = eps.first() {
        if *e1 > &one - f {
            return Err(out_of_range("bccz_counterexample", EPS_FIRST));
        }
    }
    let measure = partial_measure(f, eps);
    if measure > one {
        return Err(Error::SeriesDiverges { measure });
    }
    if measure == one {
        return Err(out_of_range("bccz_counterexample", EPS_MEASURE));
    }
    Ok(())
}

/// The approximant `psi_n` for the geometric epsilon sequence of `params`.
///
/// ```
/// use groupcut::{compendium::{psi_n, gmic, GeometricEpsParams}, rational::q};
/// let p0 = psi_n(&GeometricEpsParams::new(q(2, 5), q(3, 1), 0).unwrap()).unwrap();
/// assert_eq!(p0, gmic(&q(2, 5)).unwrap());
/// let p1 = psi_n(&GeometricEpsParams::new(q(2, 5), q(3, 1), 1).unwrap()).unwrap();
/// let slopes: Vec<_> = p1.slopes().cloned().collect();
/// assert_eq!(slopes, vec![q(55, 12), q(-5, 3), q(55, 12), q(-5, 3)]);
/// ```
pub fn psi_n(params: &GeometricEpsParams) -> Result<PwlPeriodic, Error> {
    build_psi(&params.f, &params.eps_list())
}

/// The approximant `psi_n` for an explicit decreasing epsilon list with
/// `(1 - f) + sum 2^(i-1) eps_i < 1`; `n` is the length of the list.
///
/// ```
/// use groupcut::{compendium::psi_n_from_eps, rational::q};
/// let p = psi_n_from_eps(&q(1, 2), &[q(1, 8), q(1, 32)]).unwrap();
/// assert_eq!(p.value(&q(1, 2)), q(1, 1));
/// assert!(psi_n_from_eps(&q(1, 2), &[q(1, 2)]).is_err());
/// ```
pub fn psi_n_from_eps(f: &Rational, eps: &[Rational]) -> Result<PwlPeriodic, Error> {
    validate_eps(f, eps)?;
    build_psi(f, eps)
}

fn build_psi(f: &Rational, eps: &[Rational]) -> Result<PwlPeriodic, Error> {
    let one = Rational::one();
    let neg_slope = -(&one / (&one - f));
    let gamma = gammas(f, eps);
    let mut points = vec![Rational::zero(), f.clone(), one.clone()];
    let mut values = vec![Rational::zero(), one.clone(), Rational::zero()];
    // indices (into points) of the left ends of the positive-slope intervals
    let mut positive: Vec<usize> = vec![0];
    let mut pow = Rational::one();
    for (i, e) in eps.iter().enumerate() {
        pow = pow * int(2); // 2^(i+1)
        let g_next = &gamma[i + 1];
        let s_next = positive_slope(f, g_next);
        let width = g_next / &pow;
        let mut new_points = Vec::with_capacity(points.len() + 2 * positive.len());
        let mut new_values = Vec::with_capacity(points.len() + 2 * positive.len());
        let mut new_positive = Vec::with_capacity(2 * positive.len());
        let mut next_pos = positive.iter().peekable();
        for k in 0..points.len() {
            new_points.push(points[k].clone());
            new_values.push(values[k].clone());
            if next_pos.peek() == Some(&&k) {
                next_pos.next();
                let (l, r) = (&points[k], &points[k + 1]);
                let (vl, vr) = (&values[k], &values[k + 1]);
                new_positive.push(new_points.len() - 1);
                new_points.push(l + &width);
                new_values.push(vl + &s_next * &width);
                new_positive.push(new_points.len());
                new_points.push(r - &width);
                new_values.push(vr - &s_next * &width);
                debug_assert_eq!(
                    &new_values[new_values.len() - 2] + &neg_slope * e,
                    new_values[new_values.len() - 1]
                );
            }
        }
        points = new_points;
        values = new_values;
        positive = new_positive;
    }
    PwlPeriodic::from_breakpoints(&points, &values)
}

/// Parameters `(f, a_0, ..., a_n)` of the n-step MIR function that
/// coincides with `psi_n`: `a_0 = 1`, `a_1 = (f + eps_1)/2`,
/// `a_i = (a_{i-1} - eps_{i-1} + eps_i)/2`.
pub fn kf_params_of_psi(params: &GeometricEpsParams) -> Vec<Rational> {
    kf_params_from_eps(&params.f, &params.eps_list())
}

pub fn kf_params_from_eps(f: &Rational, eps: &[Rational]) -> Vec<Rational> {
    let two = int(2);
    let mut out = vec![f.clone(), Rational::one()];
    for i in 0..eps.len() {
        let a = if i == 0 {
            (f + &eps[0]) / &two
        } else {
            (&out[i + 1] - &eps[i - 1] + &eps[i]) / &two
        };
        out.push(a);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    Constructible,
    KnownAbsentStub,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub parameters: Vec<(&'static str, &'static str)>,
    pub status: EntryStatus,
    pub citation: &'static str,
}

const GMIC_F: &str = "0 < f < 1";
const RLM_F: &str = "0 < f < 1/3";
const DRLM_FB: &str = "0 < f < b <= (1+f)/4";
const PSI_F: &str = "0 < f < 1";
const PSI_Q: &str = "q > 2, and q <= 2f/(2f-1) when f > 1/2";
const PSI_N: &str = "0 <= n <= 12";
const EPS_DECREASING: &str = "eps_1 > eps_2 > ... > eps_n > 0";
const EPS_FIRST: &str = "eps_1 <= 1-f";
const EPS_MEASURE: &str = "(1-f) + sum_i 2^(i-1) eps_i < 1";

const STUBS: &[(&str, &str)] = &[
    ("gj_2_slope", "Gomory and Johnson, two-slope functions"),
    ("gj_2_slope_repeat", "Gomory and Johnson, repeated two-slope functions"),
    ("dg_2_step_mir", "Dash and Gunluk, two-step MIR functions"),
    ("gj_forward_3_slope", "Gomory and Johnson, forward three-slope functions"),
    (
        "dr_projected_sequential_merge_3_slope",
        "Dey and Richard, projected sequential merge",
    ),
    ("bhk_irrational", "Basu, Hildebrand and Koeppe, irrational-breakpoint extreme functions"),
    ("chen_4_slope", "Chen, four-slope functions"),
    ("hildebrand_5_slope_22_1", "Hildebrand, five-slope function found by computer search"),
    ("ll_strong_fractional", "Letchford and Lodi, strong fractional cuts"),
    ("dg_2_step_mir_limit", "Dash and Gunluk, limits of two-step MIR functions"),
    ("drlm_2_slope_limit", "Dey, Richard, Li and Miller, two-slope limit functions"),
    ("drlm_3_slope_limit", "Dey, Richard, Li and Miller, three-slope limit functions"),
    (
        "hildebrand_2_sided_discont_1_slope_1",
        "Hildebrand, two-sided discontinuous one-slope function",
    ),
    (
        "hildebrand_2_sided_discont_2_slope_1",
        "Hildebrand, two-sided discontinuous two-slope function",
    ),
    ("hildebrand_discont_3_slope_1", "Hildebrand, discontinuous three-slope function"),
];

/// Compendium names in table order.
pub const TABLE_ORDER: [&str; 20] = [
    "gmic",
    "gj_2_slope",
    "gj_2_slope_repeat",
    "dg_2_step_mir",
    "kf_n_step_mir",
    "bccz_counterexample",
    "gj_forward_3_slope",
    "drlm_backward_3_slope",
    "dr_projected_sequential_merge_3_slope",
    "bhk_irrational",
    "chen_4_slope",
    "hildebrand_5_slope_22_1",
    "ll_strong_fractional",
    "dg_2_step_mir_limit",
    "drlm_2_slope_limit",
    "drlm_3_slope_limit",
    "rlm_dpl1_extreme_3a",
    "hildebrand_2_sided_discont_1_slope_1",
    "hildebrand_2_sided_discont_2_slope_1",
    "hildebrand_discont_3_slope_1",
];

fn constructible_entry(name: &str) -> Option<CatalogEntry> {
    let (name, parameters, citation): (&'static str, Vec<(&'static str, &'static str)>, &'static str) = match name {
        "gmic" => ("gmic", vec![("f", GMIC_F)], "Gomory, mixed-integer cuts"),
        "kf_n_step_mir" => (
            "kf_n_step_mir",
            vec![("f", PSI_F), ("q", PSI_Q), ("n", PSI_N)],
            "Kianfar and Fathi, n-step MIR functions (geometric psi_n special cases)",
        ),
        "bccz_counterexample" => (
            "bccz_counterexample",
            vec![
                ("f", PSI_F),
                ("eps", "eps_1 > eps_2 > ... > eps_n > 0, eps_1 <= 1-f, (1-f) + sum_i 2^(i-1) eps_i < 1"),
                ("q, n", "alternatively the geometric sequence: q > 2 (q <= 2f/(2f-1) when f > 1/2), 0 <= n <= 12"),
            ],
            "Basu, Conforti, Cornuejols and Zambelli, approximants psi_n of the non-piecewise-linear extreme function",
        ),
        "drlm_backward_3_slope" => (
            "drlm_backward_3_slope",
            vec![("f, b", DRLM_FB)],
            "Dey, Richard, Li and Miller, backward three-slope functions",
        ),
        "rlm_dpl1_extreme_3a" => (
            "rlm_dpl1_extreme_3a",
            vec![("f", RLM_F)],
            "Richard, Li and Miller, DPL1-extreme functions from approximate lifting",
        ),
        _ => return None,
    };
    Some(CatalogEntry {
        name,
        parameters,
        status: EntryStatus::Constructible,
        citation,
    })
}

/// All twenty compendium entries, in table order.
pub fn catalog() -> Vec<CatalogEntry> {
    TABLE_ORDER
        .iter()
        .map(|name| {
            constructible_entry(name).unwrap_or_else(|| {
                let (name, citation) = STUBS.iter().find(|(n, _)| n == name).copied().unwrap();
                CatalogEntry {
                    name,
                    parameters: Vec::new(),
                    status: EntryStatus::KnownAbsentStub,
                    citation,
                }
            })
        })
        .collect()
}

/// Look up a catalog entry by name.
pub fn entry(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}

/// Construct a compendium function from string parameters, as given on the
/// command line (`f=1/5`, `eps=2/15,2/45`, ...).
pub fn construct(name: &str, params: &BTreeMap<String, String>) -> Result<PwlPeriodic, Error> {
    let entry = entry(name).ok_or_else(|| Error::UnknownFunction(name.to_string()))?;
    if entry.status == EntryStatus::KnownAbsentStub {
        return Err(Error::NotImplemented {
            name: name.to_string(),
            citation: entry.citation.to_string(),
        });
    }
    let get = |key: &str| -> Result<Rational, Error> {
        let raw = params.get(key).ok_or_else(|| Error::MissingParameter {
            function: name.to_string(),
            name: key.to_string(),
        })?;
        raw.parse().map_err(|_| Error::BadParameter {
            function: name.to_string(),
            name: key.to_string(),
            value: raw.clone(),
        })
    };
    let get_depth = || -> Result<usize, Error> {
        let raw = params.get("n").ok_or_else(|| Error::MissingParameter {
            function: name.to_string(),
            name: "n".to_string(),
        })?;
        raw.trim().parse().map_err(|_| Error::BadParameter {
            function: name.to_string(),
            name: "n".to_string(),
            value: raw.clone(),
        })
    };
    match name {
        "gmic" => gmic(&get("f")?),
        "rlm_dpl1_extreme_3a" => rlm_dpl1_extreme_3a(&get("f")?),
        "drlm_backward_3_slope" => drlm_backward_3_slope(&get("f")?, &get("b")?),
        "kf_n_step_mir" => psi_n(&GeometricEpsParams::new(get("f")?, get("q")?, get_depth()?)?),
        "bccz_counterexample" => match params.get("eps") {
            Some(raw) => {
                let eps = raw
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.parse())
                    .collect::<Result<Vec<Rational>, _>>()
                    .map_err(|_| Error::BadParameter {
                        function: name.to_string(),
                        name: "eps".to_string(),
                        value: raw.clone(),
                    })?;
                psi_n_from_eps(&get("f")?, &eps)
            }
            None => psi_n(&GeometricEpsParams::new(get("f")?, get("q")?, get_depth()?)?),
        },
        _ => unreachable!("constructible entries are matched above"),
    }
}
