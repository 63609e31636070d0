//! Periodic, possibly discontinuous piecewise-linear functions.
//!
//! A [`PwlPeriodic`] is stored on `[0, 1]` by its breakpoints `0 = x_0 < ... <
//! x_n = 1`. Each breakpoint carries its value and both one-sided limits; each
//! open interval `(x_i, x_{i+1})` carries an affine piece. The function is
//! extended to all of the reals by periodicity modulo 1, so the left limit at
//! 0 is the left limit at 1 and the right limit at 1 is the right limit at 0.

use std::cmp::Ordering;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::rational::Rational;

/// Which value to read at a point: the left limit, the value, or the right limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    At,
    Right,
}

impl Side {
    pub const ALL: [Side; 3] = [Side::Left, Side::At, Side::Right];
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BreakpointDatum {
    pub point: Rational,
    pub value: Rational,
    pub left_limit: Rational,
    pub right_limit: Rational,
}

impl BreakpointDatum {
    pub fn continuous(point: Rational, value: Rational) -> Self {
        BreakpointDatum {
            left_limit: value.clone(),
            right_limit: value.clone(),
            point,
            value,
        }
    }

    pub fn get(&self, side: Side) -> &Rational {
        match side {
            Side::Left => &self.left_limit,
            Side::At => &self.value,
            Side::Right => &self.right_limit,
        }
    }

    pub fn is_continuous(&self) -> bool {
        self.left_limit == self.value && self.value == self.right_limit
    }
}

/// `x -> slope * x + intercept`, valid on one open interval between breakpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Affine {
    pub slope: Rational,
    pub intercept: Rational,
}

impl Affine {
    pub fn eval(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PwlPeriodic {
    breakpoints: Vec<BreakpointDatum>,
    pieces: Vec<Affine>,
}

impl PwlPeriodic {
    /// Continuous interpolation through `(points[i], values[i])`.
    pub fn from_breakpoints(points: &[Rational], values: &[Rational]) -> Result<Self, Error> {
        if points.len() != values.len() {
            return Err(Error::LengthMismatch {
                points: points.len(),
                values: values.len(),
            });
        }
        check_points(points.iter())?;
        let first = &values[0];
        let last = &values[values.len() - 1];
        if first != last {
            return Err(Error::PeriodicityViolated {
                at_zero: first.clone(),
                at_one: last.clone(),
            });
        }
        let data: Vec<BreakpointDatum> = points
            .iter()
            .zip(values)
            .map(|(p, v)| BreakpointDatum::continuous(p.clone(), v.clone()))
            .collect();
        let slopes: Vec<Rational> = points
            .windows(2)
            .zip(values.windows(2))
            .map(|(p, v)| (&v[1] - &v[0]) / (&p[1] - &p[0]))
            .collect();
        Self::from_pieces(data, slopes)
    }

    /// General constructor from breakpoint data and one slope per interval.
    pub fn from_pieces(breakpoints: Vec<BreakpointDatum>, slopes: Vec<Rational>) -> Result<Self, Error> {
        if breakpoints.len() < 2 || slopes.len() + 1 != breakpoints.len() {
            return Err(Error::LengthMismatch {
                points: breakpoints.len(),
                values: slopes.len() + 1,
            });
        }
        check_points(breakpoints.iter().map(|b| &b.point))?;
        let first = &breakpoints[0];
        let last = &breakpoints[breakpoints.len() - 1];
        if first.value != last.value {
            return Err(Error::PeriodicityViolated {
                at_zero: first.value.clone(),
                at_one: last.value.clone(),
            });
        }
        if first.left_limit != last.left_limit {
            return Err(Error::InconsistentLimits {
                point: first.point.clone(),
            });
        }
        if first.right_limit != last.right_limit {
            return Err(Error::InconsistentLimits {
                point: last.point.clone(),
            });
        }
        let mut pieces = Vec::with_capacity(slopes.len());
        for (i, slope) in slopes.into_iter().enumerate() {
            let lo = &breakpoints[i];
            let hi = &breakpoints[i + 1];
            let intercept = &lo.right_limit - &slope * &lo.point;
            let piece = Affine { slope, intercept };
            if piece.eval(&hi.point) != hi.left_limit {
                return Err(Error::InconsistentLimits {
                    point: hi.point.clone(),
                });
            }
            pieces.push(piece);
        }
        Ok(PwlPeriodic { breakpoints, pieces })
    }

    /// The constant function `c`.
    pub fn constant(c: Rational) -> Self {
        Self::from_breakpoints(&[Rational::zero(), Rational::one()], &[c.clone(), c])
            .expect("constant function is valid")
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn breakpoints(&self) -> &[BreakpointDatum] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    pub fn points(&self) -> impl Iterator<Item = &Rational> + '_ {
        self.breakpoints.iter().map(|b| &b.point)
    }

    pub fn slopes(&self) -> impl Iterator<Item = &Rational> + '_ {
        self.pieces.iter().map(|p| &p.slope)
    }

    /// Inverse of [`PwlPeriodic::from_pieces`].
    pub fn decompose(&self) -> (Vec<BreakpointDatum>, Vec<Rational>) {
        (
            self.breakpoints.clone(),
            self.pieces.iter().map(|p| p.slope.clone()).collect(),
        )
    }

    pub fn is_continuous(&self) -> bool {
        self.breakpoints.iter().all(BreakpointDatum::is_continuous)
    }

    /// Breakpoints in `[0, 1)` where the function is not continuous.
    pub fn discontinuities(&self) -> Vec<Rational> {
        self.breakpoints[..self.breakpoints.len() - 1]
            .iter()
            .filter(|b| !b.is_continuous())
            .map(|b| b.point.clone())
            .collect()
    }

    /// Index of the breakpoint at `x` (with `x` in `[0, 1]`), or `Err(k)` if
    /// `x` lies in the open interval `(x_{k}, x_{k+1})`.
    pub fn locate(&self, x: &Rational) -> Result<usize, usize> {
        self.breakpoints
            .binary_search_by(|b| b.point.cmp(x))
            .map_err(|k| k - 1)
    }

    /// Value or one-sided limit of the periodic extension at `x`.
    pub fn eval(&self, x: &Rational, side: Side) -> Rational {
        let r = x.fract_mod1();
        match self.locate(&r) {
            Ok(i) => self.breakpoints[i].get(side).clone(),
            Err(k) => self.pieces[k].eval(&r),
        }
    }

    pub fn value(&self, x: &Rational) -> Rational {
        self.eval(x, Side::At)
    }

    /// Affine extension of the piece covering the open interval `(lo, hi)`,
    /// evaluated at `x`; `(lo, hi)` may lie in any period as long as it does
    /// not contain a breakpoint of the periodic extension.
    pub fn eval_piece_extension(&self, lo: &Rational, hi: &Rational, x: &Rational) -> Rational {
        let mid = lo.midpoint(hi);
        let shift = mid.floor();
        let r = &mid - &shift;
        let k = match self.locate(&r) {
            Ok(i) => panic!("interval ({lo}, {hi}) straddles breakpoint {}", self.breakpoints[i].point),
            Err(k) => k,
        };
        self.pieces[k].eval(&(x - &shift))
    }

    /// Slope of the piece containing `x`, which must not be a breakpoint.
    pub fn slope_at(&self, x: &Rational) -> Option<&Rational> {
        match self.locate(&x.fract_mod1()) {
            Ok(_) => None,
            Err(k) => Some(&self.pieces[k].slope),
        }
    }

    /// Largest absolute value over all breakpoint values and limits. For a
    /// piecewise-linear function this is the sup norm.
    pub fn max_abs(&self) -> Rational {
        self.breakpoints
            .iter()
            .flat_map(|b| [&b.left_limit, &b.value, &b.right_limit])
            .map(Rational::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Same function, represented with `extra` points inserted as (possibly
    /// redundant) breakpoints. Points are reduced modulo 1.
    pub fn refine<'a>(&self, extra: impl IntoIterator<Item = &'a Rational>) -> Self {
        let mut points: Vec<Rational> = self.points().cloned().collect();
        for p in extra {
            let r = p.fract_mod1();
            points.push(r);
        }
        points.sort();
        points.dedup();
        self.resample(&points)
    }

    fn resample(&self, points: &[Rational]) -> Self {
        let last = points.len() - 1;
        let data: Vec<BreakpointDatum> = points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if i == last {
                    self.breakpoints[self.breakpoints.len() - 1].clone()
                } else {
                    BreakpointDatum {
                        point: p.clone(),
                        value: self.eval(p, Side::At),
                        left_limit: self.eval(p, Side::Left),
                        right_limit: self.eval(p, Side::Right),
                    }
                }
            })
            .collect();
        let slopes = points
            .windows(2)
            .map(|w| self.slope_at(&w[0].midpoint(&w[1])).unwrap().clone())
            .collect();
        Self::from_pieces(data, slopes).expect("resampling preserves consistency")
    }

    /// Drop interior breakpoints where the function is continuous and the
    /// slope does not change.
    pub fn pruned(&self) -> Self {
        let n = self.breakpoints.len();
        let mut data = vec![self.breakpoints[0].clone()];
        let mut slopes: Vec<Rational> = vec![self.pieces[0].slope.clone()];
        for i in 1..n - 1 {
            let b = &self.breakpoints[i];
            let next_slope = &self.pieces[i].slope;
            if b.is_continuous() && slopes.last() == Some(next_slope) {
                continue;
            }
            data.push(b.clone());
            slopes.push(next_slope.clone());
        }
        data.push(self.breakpoints[n - 1].clone());
        Self::from_pieces(data, slopes).expect("pruning preserves consistency")
    }

    /// `sum_k coeff_k * f_k`, computed exactly on the merged breakpoints and
    /// pruned of redundant breakpoints.
    pub fn linear_combination(terms: &[(Rational, &PwlPeriodic)]) -> Self {
        assert!(!terms.is_empty(), "empty linear combination");
        let points = merged_points(terms.iter().map(|(_, f)| *f));
        let combine_at = |p: &Rational, side: Side| -> Rational {
            terms.iter().map(|(c, f)| c * f.eval(p, side)).sum()
        };
        let data: Vec<BreakpointDatum> = points
            .iter()
            .map(|p| BreakpointDatum {
                point: p.clone(),
                value: combine_at(p, Side::At),
                left_limit: combine_at(p, Side::Left),
                right_limit: combine_at(p, Side::Right),
            })
            .collect();
        let slopes = points
            .windows(2)
            .map(|w| {
                let mid = w[0].midpoint(&w[1]);
                terms
                    .iter()
                    .map(|(c, f)| c * f.slope_at(&mid).unwrap())
                    .sum()
            })
            .collect();
        Self::from_pieces(data, slopes)
            .expect("linear combination preserves consistency")
            .pruned()
    }

    /// `lambda * f1 + (1 - lambda) * f2`.
    pub fn combine(f1: &PwlPeriodic, f2: &PwlPeriodic, lambda: &Rational) -> Self {
        let mu = Rational::one() - lambda;
        Self::linear_combination(&[(lambda.clone(), f1), (mu, f2)])
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::linear_combination(&[(c.clone(), self)])
    }

    pub fn add_constant(&self, c: &Rational) -> Self {
        let k = Self::constant(c.clone());
        Self::linear_combination(&[(Rational::one(), self), (Rational::one(), &k)])
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Rational, other: &PwlPeriodic) -> Self {
        Self::linear_combination(&[(Rational::one(), self), (c.clone(), other)])
    }

    /// Exact equality of the two periodic functions, including all one-sided
    /// limits, regardless of how their breakpoints are represented.
    pub fn equal(&self, other: &PwlPeriodic) -> bool {
        let points = merged_points([self, other]);
        let same_at = |x: &Rational| Side::ALL.iter().all(|&s| self.eval(x, s) == other.eval(x, s));
        points.iter().all(same_at) && points.windows(2).all(|w| same_at(&w[0].midpoint(&w[1])))
    }
}

/// Sorted union of the breakpoints of all `fs`.
pub fn merged_points<'a>(fs: impl IntoIterator<Item = &'a PwlPeriodic>) -> Vec<Rational> {
    let mut points: Vec<Rational> = fs.into_iter().flat_map(|f| f.points().cloned()).collect();
    points.sort();
    points.dedup();
    points
}

fn check_points<'a>(mut points: impl Iterator<Item = &'a Rational>) -> Result<(), Error> {
    let first = points.next().ok_or(Error::NotSorted)?;
    if !first.is_zero() {
        return Err(Error::NotSorted);
    }
    let mut prev = first;
    let mut count = 1;
    for p in points {
        if p.cmp(prev) != Ordering::Greater {
            return Err(Error::NotSorted);
        }
        prev = p;
        count += 1;
    }
    if count < 2 || *prev != Rational::one() {
        return Err(Error::NotSorted);
    }
    Ok(())
}

/// One serialized breakpoint record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PwlRecord {
    pub point: Rational,
    pub value: Rational,
    pub left_limit: Rational,
    pub right_limit: Rational,
    pub slope_to_next: Option<Rational>,
}

impl PwlPeriodic {
    pub fn to_records(&self) -> Vec<PwlRecord> {
        self.breakpoints
            .iter()
            .enumerate()
            .map(|(i, b)| PwlRecord {
                point: b.point.clone(),
                value: b.value.clone(),
                left_limit: b.left_limit.clone(),
                right_limit: b.right_limit.clone(),
                slope_to_next: self.pieces.get(i).map(|p| p.slope.clone()),
            })
            .collect()
    }

    pub fn from_records(records: Vec<PwlRecord>) -> Result<Self, Error> {
        let n = records.len();
        let mut slopes = Vec::with_capacity(n.saturating_sub(1));
        let mut data = Vec::with_capacity(n);
        for (i, r) in records.into_iter().enumerate() {
            if i + 1 < n {
                let s = r.slope_to_next.ok_or(Error::LengthMismatch {
                    points: n,
                    values: i + 1,
                })?;
                slopes.push(s);
            }
            data.push(BreakpointDatum {
                point: r.point,
                value: r.value,
                left_limit: r.left_limit,
                right_limit: r.right_limit,
            });
        }
        Self::from_pieces(data, slopes)
    }
}

impl Serialize for PwlPeriodic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_records().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PwlPeriodic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let records = Vec::<PwlRecord>::deserialize(deserializer)?;
        Self::from_records(records).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn gmic_half() -> PwlPeriodic {
        PwlPeriodic::from_breakpoints(&[q(0, 1), q(1, 2), q(1, 1)], &[q(0, 1), q(1, 1), q(0, 1)]).unwrap()
    }

    #[test]
    fn interpolation_slopes() {
        let g = gmic_half();
        let slopes: Vec<_> = g.slopes().cloned().collect();
        assert_eq!(slopes, vec![q(2, 1), q(-2, 1)]);

        let g5 = PwlPeriodic::from_breakpoints(&[q(0, 1), q(1, 5), q(1, 1)], &[q(0, 1), q(1, 1), q(0, 1)]).unwrap();
        let slopes: Vec<_> = g5.slopes().cloned().collect();
        assert_eq!(slopes, vec![q(5, 1), q(-5, 4)]);
    }

    #[test]
    fn zero_function() {
        let z = PwlPeriodic::from_breakpoints(&[q(0, 1), q(1, 1)], &[q(0, 1), q(0, 1)]).unwrap();
        assert!(z.equal(&PwlPeriodic::zero()));
        assert_eq!(z.eval(&q(3, 7), Side::Left), q(0, 1));
    }

    #[test]
    fn constructor_errors() {
        let e = PwlPeriodic::from_breakpoints(&[q(0, 1), q(1, 1)], &[q(0, 1)]);
        assert!(matches!(e, Err(Error::LengthMismatch { .. })));
        let e = PwlPeriodic::from_breakpoints(&[q(0, 1), q(2, 3), q(1, 3), q(1, 1)], &vec![q(0, 1); 4]);
        assert_eq!(e, Err(Error::NotSorted));
        let e = PwlPeriodic::from_breakpoints(&[q(1, 9), q(1, 1)], &vec![q(0, 1); 2]);
        assert_eq!(e, Err(Error::NotSorted));
        let e = PwlPeriodic::from_breakpoints(&[q(0, 1), q(1, 1)], &[q(0, 1), q(1, 2)]);
        assert!(matches!(e, Err(Error::PeriodicityViolated { .. })));
    }

    #[test]
    fn inconsistent_piece_is_rejected() {
        let (mut data, slopes) = gmic_half().decompose();
        data[1].left_limit = q(3, 4);
        assert_eq!(
            PwlPeriodic::from_pieces(data, slopes),
            Err(Error::InconsistentLimits { point: q(1, 2) })
        );
    }

    #[test]
    fn from_pieces_matches_from_breakpoints() {
        let data = vec![
            BreakpointDatum::continuous(q(0, 1), q(0, 1)),
            BreakpointDatum::continuous(q(1, 2), q(1, 1)),
            BreakpointDatum::continuous(q(1, 1), q(0, 1)),
        ];
        let g = PwlPeriodic::from_pieces(data, vec![q(2, 1), q(-2, 1)]).unwrap();
        assert_eq!(g, gmic_half());
        assert!(g.equal(&gmic_half()));
    }

    #[test]
    fn eval_periodic_and_sides() {
        let g = gmic_half();
        assert_eq!(g.eval(&q(1, 4), Side::At), q(1, 2));
        assert_eq!(g.eval(&q(5, 4), Side::At), q(1, 2));
        assert_eq!(g.eval(&q(-3, 4), Side::At), q(1, 2));
        assert_eq!(g.eval(&q(1, 1), Side::At), q(0, 1));
        assert_eq!(g.eval(&q(7, 13), Side::At), g.eval(&q(20, 13), Side::At));
    }

    #[test]
    fn combine_identities() {
        let g = gmic_half();
        assert!(PwlPeriodic::combine(&g, &g, &q(1, 2)).equal(&g));
        assert!(PwlPeriodic::combine(&g, &PwlPeriodic::zero(), &q(1, 1)).equal(&g));
        let h = PwlPeriodic::combine(&g, &PwlPeriodic::zero(), &q(1, 2));
        assert_eq!(h.value(&q(1, 2)), q(1, 2));
    }

    #[test]
    fn refine_then_prune() {
        let g = gmic_half();
        let r = g.refine(&[q(1, 4), q(3, 4), q(5, 4)]);
        assert_eq!(r.breakpoints().len(), 5);
        assert!(r.equal(&g));
        assert_eq!(r.pruned(), g);
    }

    #[test]
    fn inequality_detected_inside_interval() {
        let a = gmic_half();
        let b = PwlPeriodic::from_breakpoints(
            &[q(0, 1), q(1, 4), q(1, 2), q(1, 1)],
            &[q(0, 1), q(1, 4), q(1, 1), q(0, 1)],
        )
        .unwrap();
        assert!(!a.equal(&b));
    }

    #[test]
    fn json_records() {
        let g = gmic_half();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(
            s,
            r#"[{"point":"0","value":"0","left_limit":"0","right_limit":"0","slope_to_next":"2"},{"point":"1/2","value":"1","left_limit":"1","right_limit":"1","slope_to_next":"-2"},{"point":"1","value":"0","left_limit":"0","right_limit":"0","slope_to_next":null}]"#
        );
        let back: PwlPeriodic = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
