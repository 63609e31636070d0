//! Automated extremality test for minimal piecewise-linear functions.
//!
//! The pattern: find the additivity domain `E(π)` on `ΔP`, deduce the
//! intervals on which every perturbation must be affine (covered intervals),
//! then solve the finite linear system that any perturbation piecewise
//! linear on the resulting refinement must satisfy. A nontrivial solution is
//! an explicit perturbation; a trivial one together with full coverage proves
//! extremality.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{projections, vertex_limit, Cell1D, DeltaComplex, Face};
use crate::error::Error;
use crate::linalg::{sparse_row, Echelon, SparseRow};
use crate::minimality::{minimality_test, MinimalityReport};
use crate::pwl::{merged_points, BreakpointDatum, PwlPeriodic, Side};
use crate::rational::Rational;

const MAX_ROUNDS: usize = 8;
const MAX_POINTS: usize = 2048;
const MAX_HALVINGS: usize = 20;

/// Faces of `ΔP` (over the breakpoints and `f`) on which `Δπ` vanishes.
#[derive(Clone, Debug, Serialize)]
pub struct AdditivityDomain {
    pub faces: Vec<Face>,
    /// Smallest positive vertex limit of `Δπ` over all faces.
    pub min_positive_slack: Option<Rational>,
}

impl AdditivityDomain {
    pub fn of_dimension(&self, dimension: u8) -> impl Iterator<Item = &Face> + '_ {
        self.faces.iter().filter(move |f| f.dimension == dimension)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub intervals: Vec<(Rational, Rational)>,
    pub slope_variable: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoveredComponents {
    /// Breakpoints of the refinement the intervals live on.
    pub refinement: Vec<Rational>,
    pub components: Vec<Component>,
    pub uncovered: Vec<(Rational, Rational)>,
}

impl CoveredComponents {
    /// Name of the slope variable of the component containing `x`, if `x`
    /// lies in a covered interval.
    pub fn slope_variable_at(&self, x: &Rational) -> Option<&str> {
        self.components
            .iter()
            .find(|c| c.intervals.iter().any(|(lo, hi)| lo < x && x < hi))
            .map(|c| c.slope_variable.as_str())
    }
}

/// A nonzero function with `π̄(0) = π̄(f) = 0` satisfying every additivity
/// relation of `π`, scaled to sup norm 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Perturbation {
    pub function: PwlPeriodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Extreme,
    NotExtreme,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Extreme => 0,
            Status::NotExtreme => 1,
            Status::Inconclusive => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalityWitness {
    pub perturbation: Perturbation,
    pub epsilon: Rational,
    pub pi1: PwlPeriodic,
    pub pi2: PwlPeriodic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalityVerdict {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ExtremalityWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncovered: Option<Vec<(Rational, Rational)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solved_parameters: Option<BTreeMap<String, Rational>>,
}

fn require_minimal(pi: &PwlPeriodic) -> Result<Rational, Error> {
    let report = minimality_test(pi, None);
    match (&report.f, report.is_minimal) {
        (Some(f), true) => Ok(f.clone()),
        _ => Err(Error::NotMinimal(summarize(&report))),
    }
}

fn summarize(report: &MinimalityReport) -> String {
    match report.violations.first() {
        Some(v) => format!("{} violation(s), first: {:?} with value {}", report.violations.len(), v.check, v.value),
        None => "no f".to_string(),
    }
}

fn with_point(pi: &PwlPeriodic, extra: &Rational) -> Vec<Rational> {
    let mut points: Vec<Rational> = pi.points().cloned().collect();
    points.push(extra.clone());
    points.sort();
    points.dedup();
    points
}

fn is_additive(pi: &PwlPeriodic, face: &Face) -> bool {
    face.vertices.iter().all(|v| vertex_limit(pi, face, v).is_zero())
}

fn sort_faces(faces: &mut [Face]) {
    faces.sort_by(|a, b| a.key().cmp(&b.key()));
}

/// Classifies every face of `ΔP` over the breakpoints of `π` and `f`.
pub fn additivity_domain(pi: &PwlPeriodic) -> Result<AdditivityDomain, Error> {
    let f = require_minimal(pi)?;
    let complex = DeltaComplex::new(&with_point(pi, &f));
    let classified: Vec<(Option<Face>, Option<Rational>)> = complex
        .par_faces()
        .map(|face| {
            let limits: Vec<Rational> = face.vertices.iter().map(|v| vertex_limit(pi, &face, v)).collect();
            let slack = limits.iter().filter(|l| l.is_positive()).min().cloned();
            if limits.iter().all(Rational::is_zero) {
                (Some(face), None)
            } else {
                (None, slack)
            }
        })
        .collect();
    let mut faces = Vec::new();
    let mut min_positive_slack: Option<Rational> = None;
    for (face, slack) in classified {
        faces.extend(face);
        if let Some(s) = slack {
            if min_positive_slack.as_ref().is_none_or(|m| s < *m) {
                min_positive_slack = Some(s);
            }
        }
    }
    sort_faces(&mut faces);
    Ok(AdditivityDomain {
        faces,
        min_positive_slack,
    })
}

struct UnionFind {
    parent: Vec<usize>,
    covered: Vec<bool>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            covered: vec![false; n],
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn is_covered(&mut self, a: usize) -> bool {
        let r = self.find(a);
        self.covered[r]
    }

    fn cover(&mut self, a: usize) -> bool {
        let r = self.find(a);
        !std::mem::replace(&mut self.covered[r], true)
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        self.covered[lo] |= self.covered[hi];
        true
    }
}

/// Interval `(lo, hi)` of `[0, 1]` relative to the refinement: the index of
/// the refinement interval containing it and whether it is that interval.
fn locate(points: &[Rational], lo: &Rational, hi: &Rational) -> (usize, bool) {
    let k = points.partition_point(|p| p <= lo) - 1;
    debug_assert!(*hi <= points[k + 1]);
    (k, points[k] == *lo && points[k + 1] == *hi)
}

fn reduce_mod1(cell: Cell1D) -> (Rational, Rational) {
    let one = Rational::one();
    let (lo, hi) = (cell.lo().clone(), cell.hi().clone());
    if lo >= one {
        (lo - &one, hi - &one)
    } else {
        (lo, hi)
    }
}

struct Member {
    iv: (Rational, Rational),
    k: usize,
    aligned: bool,
}

/// Internal form of the covering: refinement points and, per refinement
/// interval, the index of its component (components ordered by first
/// interval) or `None` when uncovered.
struct Cover {
    points: Vec<Rational>,
    component: Vec<Option<usize>>,
    ncomponents: usize,
}

fn cover(pi: &PwlPeriodic, f: &Rational) -> Cover {
    let mut points = with_point(pi, f);
    let mut round = 0;
    loop {
        round += 1;
        let complex = DeltaComplex::new(&points);
        let m = points.len() - 1;
        let mut additive: Vec<Face> = complex
            .par_faces()
            .filter(|face| face.dimension > 0 && is_additive(pi, face))
            .collect();
        sort_faces(&mut additive);

        // Each relation lists intervals on which a perturbation has a common
        // slope: always for the projections of an additive 2-face, and for the
        // two sides of an additive edge once either side is affine.
        let relations: Vec<(bool, Vec<Member>)> = additive
            .iter()
            .map(|face| {
                let (p1, p2, p3) = projections(face);
                let (forced, ivs) = if face.dimension == 2 {
                    (true, vec![p1, p2, p3])
                } else if face.i.is_point() {
                    (false, vec![p2, p3])
                } else if face.j.is_point() {
                    (false, vec![p1, p3])
                } else {
                    (false, vec![p1, p2])
                };
                let members = ivs
                    .into_iter()
                    .map(|cell| {
                        let iv = reduce_mod1(cell);
                        let (k, aligned) = locate(&points, &iv.0, &iv.1);
                        Member { iv, k, aligned }
                    })
                    .collect();
                (forced, members)
            })
            .collect();

        let mut uf = UnionFind::new(m);
        let mut changed = true;
        while changed {
            changed = false;
            for (forced, members) in &relations {
                if !*forced && !members.iter().any(|mb| uf.is_covered(mb.k)) {
                    continue;
                }
                let mut anchor = None;
                for mb in members {
                    if mb.aligned || uf.is_covered(mb.k) {
                        changed |= uf.cover(mb.k);
                        match anchor {
                            None => anchor = Some(mb.k),
                            Some(a) => changed |= uf.union(a, mb.k),
                        }
                    }
                }
            }
        }

        let mut extra: BTreeSet<Rational> = BTreeSet::new();
        for (forced, members) in &relations {
            if !*forced && !members.iter().any(|mb| uf.is_covered(mb.k)) {
                continue;
            }
            for mb in members {
                if !uf.is_covered(mb.k) {
                    extra.insert(mb.iv.0.clone());
                    extra.insert(mb.iv.1.clone());
                }
            }
        }

        let fresh: Vec<Rational> = extra.into_iter().filter(|p| points.binary_search(p).is_err()).collect();
        if fresh.is_empty() || round >= MAX_ROUNDS || points.len() + fresh.len() > MAX_POINTS {
            let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
            let component = (0..m)
                .map(|k| {
                    if uf.is_covered(k) {
                        let root = uf.find(k);
                        let next = ids.len();
                        Some(*ids.entry(root).or_insert(next))
                    } else {
                        None
                    }
                })
                .collect();
            return Cover {
                points,
                component,
                ncomponents: ids.len(),
            };
        }
        points.extend(fresh);
        points.sort();
    }
}

impl Cover {
    fn to_components(&self) -> CoveredComponents {
        let mut components: Vec<Component> = (0..self.ncomponents)
            .map(|c| Component {
                intervals: Vec::new(),
                slope_variable: format!("s{}", c + 1),
            })
            .collect();
        let mut uncovered = Vec::new();
        for (k, comp) in self.component.iter().enumerate() {
            let iv = (self.points[k].clone(), self.points[k + 1].clone());
            match comp {
                Some(c) => components[*c].intervals.push(iv),
                None => uncovered.push(iv),
            }
        }
        CoveredComponents {
            refinement: self.points.clone(),
            components,
            uncovered,
        }
    }
}

/// Covered intervals grouped into components sharing a slope.
pub fn covered_components(pi: &PwlPeriodic) -> Result<CoveredComponents, Error> {
    let f = require_minimal(pi)?;
    Ok(cover(pi, &f).to_components())
}

/// The linear system for perturbations that are piecewise linear on the
/// refinement.
struct System {
    points: Vec<Rational>,
    value: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
    slope: Vec<usize>,
    nvars: usize,
    f_index: usize,
    rows: BTreeSet<Vec<(usize, Rational)>>,
}

impl System {
    fn build(pi: &PwlPeriodic, f: &Rational, cover: &Cover) -> Self {
        let points = cover.points.clone();
        let m = points.len() - 1;
        let mut nvars = 0;
        let mut fresh = || {
            nvars += 1;
            nvars - 1
        };
        let (mut value, mut left, mut right) = (Vec::new(), Vec::new(), Vec::new());
        for p in &points[..m] {
            let v = fresh();
            let at = pi.eval(p, Side::At);
            value.push(v);
            left.push(if pi.eval(p, Side::Left) == at { v } else { fresh() });
            right.push(if pi.eval(p, Side::Right) == at { v } else { fresh() });
        }
        let component_vars: Vec<usize> = (0..cover.ncomponents).map(|_| fresh()).collect();
        let slope: Vec<usize> = cover
            .component
            .iter()
            .map(|c| match c {
                Some(c) => component_vars[*c],
                None => fresh(),
            })
            .collect();
        let f_index = points.binary_search(f).expect("f is a refinement point");

        let mut sys = System {
            points,
            value,
            left,
            right,
            slope,
            nvars,
            f_index,
            rows: BTreeSet::new(),
        };
        for k in 0..m {
            let len = &sys.points[k + 1] - &sys.points[k];
            let row = sparse_row([
                (sys.left[(k + 1) % m], Rational::one()),
                (sys.right[k], -Rational::one()),
                (sys.slope[k], -len),
            ]);
            sys.insert(row);
        }
        let complex = DeltaComplex::new(&sys.points);
        let additivity: BTreeSet<Vec<(usize, Rational)>> = complex
            .par_faces()
            .flat_map_iter(|face| {
                face.vertices
                    .iter()
                    .filter(|v| vertex_limit(pi, &face, v).is_zero())
                    .map(|v| sys.delta_row(&face, v))
                    .filter_map(normalized)
                    .collect::<Vec<_>>()
            })
            .collect();
        sys.rows.extend(additivity);
        sys
    }

    fn insert(&mut self, row: SparseRow) {
        if let Some(r) = normalized(row) {
            self.rows.insert(r);
        }
    }

    /// Linear form for the limit of the unknown function at `x` from within
    /// `cell`, which may be a cell of `[0, 2]`.
    fn cell_form(&self, cell: &Cell1D, x: &Rational, sign: &Rational, out: &mut Vec<(usize, Rational)>) {
        let shift = cell.lo().floor();
        let lo = cell.lo() - &shift;
        let m = self.points.len() - 1;
        let k = self.points.binary_search(&lo).expect("cell endpoint in refinement") % m;
        match cell {
            Cell1D::Point(_) => out.push((self.value[k], sign.clone())),
            Cell1D::Open(clo, _) => {
                out.push((self.right[k], sign.clone()));
                out.push((self.slope[k], sign * &(x - clo)));
            }
        }
    }

    fn delta_row(&self, face: &Face, v: &(Rational, Rational)) -> SparseRow {
        let (one, minus) = (Rational::one(), -Rational::one());
        let mut entries = Vec::with_capacity(6);
        self.cell_form(&face.i, &v.0, &one, &mut entries);
        self.cell_form(&face.j, &v.1, &one, &mut entries);
        self.cell_form(&face.k, &(&v.0 + &v.1), &minus, &mut entries);
        sparse_row(entries)
    }

    fn echelon(&self, value_at_f: Rational) -> Echelon {
        let mut e = Echelon::new(self.nvars);
        for row in &self.rows {
            e.add(row.iter().cloned().collect(), Rational::zero());
        }
        e.add(sparse_row([(self.value[0], Rational::one())]), Rational::zero());
        e.add(sparse_row([(self.value[self.f_index], Rational::one())]), value_at_f);
        e
    }

    fn function(&self, x: &[Rational]) -> Result<PwlPeriodic, Error> {
        let m = self.points.len() - 1;
        let mut data: Vec<BreakpointDatum> = (0..m)
            .map(|i| BreakpointDatum {
                point: self.points[i].clone(),
                value: x[self.value[i]].clone(),
                left_limit: x[self.left[i]].clone(),
                right_limit: x[self.right[i]].clone(),
            })
            .collect();
        let mut last = data[0].clone();
        last.point = Rational::one();
        data.push(last);
        let slopes = self.slope.iter().map(|&s| x[s].clone()).collect();
        Ok(PwlPeriodic::from_pieces(data, slopes)?.pruned())
    }
}

/// Row scaled so its first coefficient is 1; `None` for the zero row.
fn normalized(row: SparseRow) -> Option<Vec<(usize, Rational)>> {
    let lead = row.values().next()?.recip().expect("nonzero");
    Some(row.into_iter().map(|(c, v)| (c, v * &lead)).collect())
}

fn normalize_function(phi: PwlPeriodic) -> PwlPeriodic {
    let first = phi
        .breakpoints()
        .iter()
        .flat_map(|b| [&b.left_limit, &b.value, &b.right_limit])
        .find(|v| !v.is_zero())
        .cloned()
        .expect("nonzero perturbation");
    let mut scale = phi.max_abs().recip().expect("nonzero");
    if first.is_negative() {
        scale = -scale;
    }
    phi.scale(&scale)
}

/// A basis of the perturbations that are piecewise linear on the refinement
/// of the covering step.
pub fn perturbation_space(pi: &PwlPeriodic) -> Result<Vec<Perturbation>, Error> {
    let f = require_minimal(pi)?;
    let cover = cover(pi, &f);
    let sys = System::build(pi, &f, &cover);
    basis(&sys, &sys.echelon(Rational::zero()))
}

fn basis(sys: &System, e: &Echelon) -> Result<Vec<Perturbation>, Error> {
    e.kernel_basis()
        .into_iter()
        .map(|v| {
            Ok(Perturbation {
                function: normalize_function(sys.function(&v)?),
            })
        })
        .collect()
}

/// Step size `ε` such that `π ± επ̄` are both minimal.
pub fn epsilon_for_perturbation(pi: &PwlPeriodic, perturbation: &Perturbation) -> Result<Rational, Error> {
    let f = require_minimal(pi)?;
    epsilon_with_f(pi, &perturbation.function, &f)
}

fn epsilon_with_f(pi: &PwlPeriodic, pbar: &PwlPeriodic, f: &Rational) -> Result<Rational, Error> {
    let mut points = merged_points([pi, pbar]);
    points.push(f.clone());
    let complex = DeltaComplex::new(&points);
    let bounds: Vec<(Rational, Rational)> = complex
        .par_faces()
        .flat_map_iter(|face| {
            face.vertices
                .iter()
                .filter_map(|v| {
                    let slack = vertex_limit(pi, &face, v);
                    slack.is_positive().then(|| (slack, vertex_limit(pbar, &face, v).abs()))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let delta = bounds.iter().map(|(s, _)| s).min();
    let big_m = bounds.iter().map(|(_, d)| d).max();
    let mut eps = match (delta, big_m) {
        (Some(d), Some(m)) if m.is_positive() => d / &(m * Rational::from_integer(2)),
        _ => Rational::one(),
    };
    let half = Rational::new(1, 2);
    for _ in 0..=MAX_HALVINGS {
        let plus = pi.add_scaled(&eps, pbar);
        let minus = pi.add_scaled(&-eps.clone(), pbar);
        if minimality_test(&plus, Some(f)).is_minimal && minimality_test(&minus, Some(f)).is_minimal {
            return Ok(eps);
        }
        eps *= &half;
    }
    Err(Error::NoValidEpsilon(MAX_HALVINGS))
}

fn solved_parameters(pi: &PwlPeriodic, sys: &System, cover: &Cover, x: &[Rational]) -> BTreeMap<String, Rational> {
    let mut out = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for (k, c) in cover.component.iter().enumerate() {
        if let Some(c) = c {
            if seen.insert(*c) {
                out.insert(format!("s{}", c + 1), x[sys.slope[k]].clone());
            }
        }
    }
    for (i, p) in sys.points[..sys.points.len() - 1].iter().enumerate() {
        if sys.right[i] != sys.value[i] {
            out.insert(format!("phi({p}+)"), x[sys.right[i]].clone());
        }
        if sys.left[i] != sys.value[i] {
            let name = if p.is_zero() { "phi(1-)".to_string() } else { format!("phi({p}-)") };
            out.insert(name, x[sys.left[i]].clone());
        }
    }
    let _ = pi;
    out
}

/// Decides extremality of a minimal function.
pub fn extremality_test(pi: &PwlPeriodic) -> Result<ExtremalityVerdict, Error> {
    let f = require_minimal(pi)?;
    let cover = cover(pi, &f);
    let sys = System::build(pi, &f, &cover);
    let e = sys.echelon(Rational::one());
    let uncovered = cover.to_components().uncovered;
    let uncovered = (!uncovered.is_empty()).then_some(uncovered);

    let basis = basis(&sys, &e)?;
    if let Some(perturbation) = basis.into_iter().next() {
        let epsilon = epsilon_with_f(pi, &perturbation.function, &f)?;
        let pi1 = pi.add_scaled(&epsilon, &perturbation.function);
        let pi2 = pi.add_scaled(&-epsilon.clone(), &perturbation.function);
        let sound = !pi1.equal(&pi2)
            && minimality_test(&pi1, Some(&f)).is_minimal
            && minimality_test(&pi2, Some(&f)).is_minimal
            && PwlPeriodic::combine(&pi1, &pi2, &Rational::new(1, 2)).equal(pi);
        if !sound {
            return Err(Error::InternalInconsistency("perturbation witness failed re-verification".into()));
        }
        return Ok(ExtremalityVerdict {
            status: Status::NotExtreme,
            witness: Some(ExtremalityWitness {
                perturbation,
                epsilon,
                pi1,
                pi2,
            }),
            uncovered,
            solved_parameters: None,
        });
    }

    let x = e
        .particular_solution()
        .ok_or_else(|| Error::InternalInconsistency("additivity system has no solution".into()))?;
    if !sys.function(&x)?.equal(pi) {
        return Err(Error::InternalInconsistency("unique solution differs from the input".into()));
    }
    Ok(ExtremalityVerdict {
        status: if uncovered.is_none() { Status::Extreme } else { Status::Inconclusive },
        witness: None,
        uncovered,
        solved_parameters: Some(solved_parameters(pi, &sys, &cover, &x)),
    })
}
