//! Minimality test: `π(0) = 0`, nonnegativity, subadditivity and the
//! symmetry condition `π(x) + π(f − x) = 1`, all including one-sided limits.
//!
//! Subadditivity is decided exactly by checking the limit of `Δπ` at every
//! vertex of every face of `ΔP`; since `Δπ` is affine on each relatively open
//! face, these finitely many values bound it from below everywhere.

use std::cmp::Ordering;

use serde::Serialize;

use crate::complex::{Face, Vertex};
use crate::error::Error;
use crate::pwl::{PwlPeriodic, Side};
use crate::rational::Rational;
use crate::scan::{with_scan, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Origin,
    Nonnegativity,
    Subadditivity,
    Symmetry,
    PiOfF,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Point { x: Rational, side: Side },
    FaceVertex { face: Face, vertex: [Rational; 2] },
}

impl Witness {
    fn sort_key(&self) -> (u8, Vec<&Rational>) {
        match self {
            Witness::Point { x, side } => (*side as u8, vec![x]),
            Witness::FaceVertex { face, vertex } => (
                3,
                vec![face.i.lo(), face.i.hi(), face.j.lo(), face.j.hi(), face.k.lo(), face.k.hi(), &vertex[0], &vertex[1]],
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: Check,
    pub witness: Option<Witness>,
    /// The offending quantity: the value for origin, nonnegativity and
    /// `pi(f)` checks, the negative slack for subadditivity, and
    /// `π(x) + π(f − x) − 1` for symmetry.
    pub value: Rational,
}

impl Violation {
    fn face_vertex(check: Check, face: &Face, v: &Vertex, value: Rational) -> Self {
        Violation {
            check,
            witness: Some(Witness::FaceVertex {
                face: face.clone(),
                vertex: [v.0.clone(), v.1.clone()],
            }),
            value,
        }
    }

    fn point(check: Check, x: &Rational, side: Side, value: Rational) -> Self {
        Violation {
            check,
            witness: Some(Witness::Point { x: x.clone(), side }),
            value,
        }
    }
}

impl Ord for Violation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.check
            .cmp(&other.check)
            .then_with(|| {
                let a = self.witness.as_ref().map(Witness::sort_key);
                let b = other.witness.as_ref().map(Witness::sort_key);
                a.cmp(&b)
            })
            .then_with(|| self.value.cmp(&other.value))
    }
}

impl PartialOrd for Violation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalityReport {
    pub is_minimal: bool,
    pub f: Option<Rational>,
    /// Set when `f` was detected and several candidates disagree on symmetry.
    pub f_ambiguous: bool,
    pub violations: Vec<Violation>,
}

impl MinimalityReport {
    pub fn has(&self, check: Check) -> bool {
        self.violations.iter().any(|v| v.check == check)
    }
}

/// Interior breakpoints where the value is 1, in increasing order.
pub fn f_candidates(pi: &PwlPeriodic) -> Vec<Rational> {
    let n = pi.breakpoints().len();
    pi.breakpoints()[1..n - 1]
        .iter()
        .filter(|b| b.value == Rational::one())
        .map(|b| b.point.clone())
        .collect()
}

/// The smallest breakpoint in `(0, 1)` with `π = 1`.
pub fn detect_f(pi: &PwlPeriodic) -> Result<Rational, Error> {
    f_candidates(pi).into_iter().next().ok_or(Error::NoCandidateF)
}

/// Subadditivity over all vertex limits of `ΔP`.
pub fn is_subadditive(pi: &PwlPeriodic) -> (bool, Vec<Violation>) {
    let mut violations = subadditivity_violations(pi);
    violations.sort();
    (violations.is_empty(), violations)
}

fn subadditivity_violations(pi: &PwlPeriodic) -> Vec<Violation> {
    let points: Vec<Rational> = pi.points().cloned().collect();
    with_scan!(&points, [pi], |grid, fs| {
        let s = &fs[0];
        grid.collect(|face, out| {
            for v in &face.vertices {
                let slack = s.delta(face, v);
                if slack < Scalar::zero() {
                    let face = grid.face(face);
                    out.push(Violation::face_vertex(Check::Subadditivity, &face, &grid.vertex(v), s.unscale(&slack)));
                }
            }
        })
    })
}

/// Symmetry `π(x) + π(f − x) = 1` including all one-sided limits, and
/// `π(f) = 1`.
pub fn is_symmetric(pi: &PwlPeriodic, f: &Rational) -> (bool, Vec<Violation>) {
    let one = Rational::one();
    let mut violations = Vec::new();
    let at_f = pi.value(f);
    if at_f != one || !f.is_positive() || *f >= one {
        violations.push(Violation::point(Check::PiOfF, f, Side::At, at_f));
    }
    if f.is_positive() && *f < one {
        let mut points: Vec<Rational> = pi.points().cloned().chain(std::iter::once(f.clone())).collect();
        points.sort();
        points.dedup();
        let mut found: Vec<Violation> = with_scan!(&points, [pi], |grid, fs| {
            let s = &fs[0];
            let lines = [grid.coordinate(f), grid.coordinate(&(f + &one))];
            grid.collect(|face, out| {
                if !grid.diag_point(face.kk).is_some_and(|d| lines.contains(d)) {
                    return;
                }
                for v in &face.vertices {
                    let defect = s.symmetry_defect(face, v);
                    if defect != Scalar::zero() {
                        let face = grid.face(face);
                        out.push(Violation::face_vertex(Check::Symmetry, &face, &grid.vertex(v), s.unscale(&defect)));
                    }
                }
            })
        });
        violations.append(&mut found);
    }
    violations.sort();
    (violations.is_empty(), violations)
}

/// Full minimality test. When `f` is `None` it is detected with
/// [`detect_f`]; failure to find one is reported as a `pi_of_f` violation.
pub fn minimality_test(pi: &PwlPeriodic, f: Option<&Rational>) -> MinimalityReport {
    let mut violations = Vec::new();
    let zero = Rational::zero();

    let origin = pi.value(&zero);
    if !origin.is_zero() {
        violations.push(Violation::point(Check::Origin, &zero, Side::At, origin));
    }
    let n = pi.breakpoints().len();
    for b in &pi.breakpoints()[..n - 1] {
        for side in Side::ALL {
            let v = b.get(side);
            if v.is_negative() {
                violations.push(Violation::point(Check::Nonnegativity, &b.point, side, v.clone()));
            }
        }
    }

    violations.extend(subadditivity_violations(pi));

    let mut f_ambiguous = false;
    let f = match f {
        Some(f) => Some(f.clone()),
        None => {
            let candidates = f_candidates(pi);
            if candidates.len() > 1 {
                let verdicts: Vec<bool> = candidates.iter().map(|c| is_symmetric(pi, c).0).collect();
                f_ambiguous = verdicts.iter().any(|&v| v != verdicts[0]);
            }
            candidates.into_iter().next()
        }
    };
    match &f {
        Some(f) => violations.extend(is_symmetric(pi, f).1),
        None => violations.push(Violation {
            check: Check::PiOfF,
            witness: None,
            value: pi.max_abs(),
        }),
    }

    violations.sort();
    MinimalityReport {
        is_minimal: violations.is_empty(),
        f,
        f_ambiguous,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compendium::{drlm_backward_3_slope, gmic, rlm_dpl1_extreme_3a};
    use crate::complex::delta_pi;
    use crate::pwl::BreakpointDatum;
    use crate::rational::q;

    #[test]
    fn detect_f_examples() {
        assert_eq!(detect_f(&gmic(&q(1, 5)).unwrap()).unwrap(), q(1, 5));
        assert_eq!(
            detect_f(&drlm_backward_3_slope(&q(1, 12), &q(1, 6)).unwrap()).unwrap(),
            q(1, 12)
        );
        assert_eq!(detect_f(&PwlPeriodic::zero()), Err(Error::NoCandidateF));
    }

    #[test]
    fn rlm_is_subadditive_and_symmetric() {
        let p = rlm_dpl1_extreme_3a(&q(1, 5)).unwrap();
        assert!(is_subadditive(&p).0);
        let (ok, v) = is_symmetric(&p, &q(1, 5));
        assert!(ok, "{v:?}");
        // the limit pair f+ and 1-
        assert_eq!(p.eval(&q(1, 5), Side::Right) + p.eval(&q(1, 1), Side::Left), q(1, 1));
    }

    #[test]
    fn gmic_tight_point() {
        let g = gmic(&q(1, 2)).unwrap();
        assert!(is_subadditive(&g).0);
        assert_eq!(delta_pi(&g, &q(1, 4), &q(1, 4)), q(0, 1));
        assert!(is_symmetric(&g, &q(1, 2)).0);
    }

    #[test]
    fn lowered_value_at_f() {
        // gmic(1/2) with the value at 1/2 lowered to 3/4: symmetry fails
        // (pi(f) != 1) and the jump also breaks subadditivity along x = 1/2
        let (mut data, slopes) = gmic(&q(1, 2)).unwrap().decompose();
        data[1].value = q(3, 4);
        let p = PwlPeriodic::from_pieces(data, slopes).unwrap();
        let (sym, v) = is_symmetric(&p, &q(1, 2));
        assert!(!sym);
        assert!(v.iter().any(|v| v.check == Check::PiOfF && v.value == q(3, 4)));
        let (sub, v) = is_subadditive(&p);
        assert!(!sub);
        assert!(v.iter().any(|v| matches!(
            &v.witness,
            Some(Witness::FaceVertex { vertex, .. }) if vertex == &[q(1, 2), q(0, 1)]
        ) && v.value == q(-1, 4)));
    }

    #[test]
    fn convex_dip_reported_at_vertex() {
        let p = PwlPeriodic::from_breakpoints(
            &[q(0, 1), q(1, 4), q(1, 2), q(1, 1)],
            &[q(0, 1), q(1, 4), q(1, 1), q(0, 1)],
        )
        .unwrap();
        let (ok, v) = is_subadditive(&p);
        assert!(!ok);
        let at = v
            .iter()
            .find(|v| v.witness.as_ref().is_some_and(|w| matches!(w, Witness::FaceVertex { face, vertex } if face.dimension == 0 && vertex == &[q(1, 4), q(1, 4)])))
            .unwrap();
        assert_eq!(at.value, q(-1, 2));
    }

    #[test]
    fn scaled_gmic_fails_normalization() {
        let g = gmic(&q(1, 2)).unwrap().scale(&q(1, 2));
        let (ok, v) = is_symmetric(&g, &q(1, 2));
        assert!(!ok);
        let at_f = v.iter().find(|v| v.check == Check::PiOfF).unwrap();
        assert_eq!(at_f.value, q(1, 2));
        let report = minimality_test(&g, None);
        assert!(!report.is_minimal);
        assert!(report.has(Check::PiOfF));
        assert_eq!(report.f, None);
    }

    #[test]
    fn shifted_gmic_fails_origin() {
        let g = gmic(&q(1, 2)).unwrap().add_constant(&q(1, 10));
        let report = minimality_test(&g, Some(&q(1, 2)));
        assert!(!report.is_minimal);
        assert!(report.has(Check::Origin));
        assert_eq!(report.violations[0].value, q(1, 10));
    }

    #[test]
    fn negative_values_reported() {
        let p = gmic(&q(1, 2)).unwrap().add_constant(&q(-1, 10));
        let report = minimality_test(&p, Some(&q(1, 2)));
        assert!(report.has(Check::Nonnegativity));
    }

    #[test]
    fn ambiguous_f_flagged() {
        // value 1 at both 1/8 and 1/2; only f = 1/2 is a symmetric choice
        let p = PwlPeriodic::from_breakpoints(
            &[q(0, 1), q(1, 8), q(1, 4), q(3, 8), q(1, 2), q(3, 4), q(1, 1)],
            &[q(0, 1), q(1, 1), q(1, 2), q(0, 1), q(1, 1), q(1, 2), q(0, 1)],
        )
        .unwrap();
        assert!(is_symmetric(&p, &q(1, 2)).0);
        assert!(!is_symmetric(&p, &q(1, 8)).0);
        let report = minimality_test(&p, None);
        assert_eq!(report.f, Some(q(1, 8)));
        assert!(report.f_ambiguous);
    }

    #[test]
    fn combination_is_minimal() {
        let p = PwlPeriodic::combine(
            &gmic(&q(1, 5)).unwrap(),
            &rlm_dpl1_extreme_3a(&q(1, 5)).unwrap(),
            &q(1, 2),
        );
        let report = minimality_test(&p, None);
        assert!(report.is_minimal, "{:?}", report.violations);
        assert_eq!(report.f, Some(q(1, 5)));
    }

    #[test]
    fn violations_are_sorted() {
        let data = vec![
            BreakpointDatum::continuous(q(0, 1), q(1, 3)),
            BreakpointDatum::continuous(q(1, 3), q(-1, 3)),
            BreakpointDatum::continuous(q(1, 1), q(1, 3)),
        ];
        let p = PwlPeriodic::from_pieces(data, vec![q(-2, 1), q(1, 1)]).unwrap();
        let r = minimality_test(&p, Some(&q(1, 2)));
        let mut sorted = r.violations.clone();
        sorted.sort();
        assert_eq!(sorted, r.violations);
    }
}
