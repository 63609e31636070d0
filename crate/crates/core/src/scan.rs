//! Fast enumeration of `ΔP` faces and vertex limits.
//!
//! All vertices of `ΔP` lie on the grid `(1/Q)ℤ²` where `Q` is the common
//! denominator of the breakpoints, and the limits of a piecewise-linear
//! function at grid points share a common denominator. When both scales fit,
//! the scan runs in `i128`; otherwise it falls back to exact rationals with
//! the same code.

use std::fmt::Debug;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::complex::{Cell1D, Face, Vertex};
use crate::pwl::{PwlPeriodic, Side};
use crate::rational::Rational;

const BOUND: i128 = 1 << 60;

pub(crate) trait Scalar: Clone + Ord + Send + Sync + Debug {
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn abs(&self) -> Self;
    /// Exact conversion of an already scaled value.
    fn convert(x: &Rational) -> Option<Self>;
    fn to_rational(&self) -> Rational;
    /// Scale that makes all of `xs` representable.
    fn scale<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Rational;
}

impl Scalar for i128 {
    fn zero() -> Self {
        0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn abs(&self) -> Self {
        i128::abs(*self)
    }
    fn convert(x: &Rational) -> Option<Self> {
        if !x.is_integer() {
            return None;
        }
        x.numer().to_i128().filter(|v| v.abs() <= BOUND)
    }
    fn to_rational(&self) -> Rational {
        Rational::from_bigints((*self).into(), 1.into()).expect("nonzero denominator")
    }
    fn scale<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Rational {
        Rational::from_bigints(Rational::common_denominator(xs), 1.into()).expect("nonzero denominator")
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn abs(&self) -> Self {
        Rational::abs(self)
    }
    fn convert(x: &Rational) -> Option<Self> {
        Some(x.clone())
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn scale<'a>(_: impl IntoIterator<Item = &'a Rational>) -> Rational {
        Rational::one()
    }
}

/// A face by cell indices: axis cell `2k` is the point `B[k]`, axis cell
/// `2k + 1` the open interval `(B[k], B[k+1])`, and likewise for the diagonal
/// subdivision `B ∪ (B + 1)`.
#[derive(Clone, Debug)]
pub(crate) struct FaceIdx<T> {
    pub ii: usize,
    pub jj: usize,
    pub kk: usize,
    pub vertices: Vec<(T, T)>,
}

/// Breakpoints scaled to `T`.
pub(crate) struct Grid<T> {
    /// Coordinates are `x · scale`.
    scale: Rational,
    points: Vec<Rational>,
    diag_points: Vec<Rational>,
    axis: Vec<T>,
    diag: Vec<T>,
}

fn cell_bounds<T>(pts: &[T], c: usize) -> (&T, &T) {
    if c % 2 == 0 {
        (&pts[c / 2], &pts[c / 2])
    } else {
        (&pts[c / 2], &pts[c / 2 + 1])
    }
}

fn rational_cell(pts: &[Rational], c: usize) -> Cell1D {
    if c % 2 == 0 {
        Cell1D::Point(pts[c / 2].clone())
    } else {
        Cell1D::Open(pts[c / 2].clone(), pts[c / 2 + 1].clone())
    }
}

impl<T: Scalar> Grid<T> {
    /// `points` must be sorted, start at 0 and end at 1.
    pub fn new(points: &[Rational]) -> Option<Self> {
        let scale = T::scale(points);
        let one = Rational::one();
        let mut diag_points = points.to_vec();
        diag_points.extend(points.iter().skip(1).map(|p| p + &one));
        let axis = points.iter().map(|p| T::convert(&(p * &scale))).collect::<Option<Vec<_>>>()?;
        let diag = diag_points.iter().map(|p| T::convert(&(p * &scale))).collect::<Option<Vec<_>>>()?;
        Some(Grid {
            scale,
            points: points.to_vec(),
            diag_points,
            axis,
            diag,
        })
    }

    pub fn ncells(&self) -> usize {
        2 * self.axis.len() - 1
    }

    pub fn faces_for(&self, ii: usize, jj: usize, out: &mut Vec<FaceIdx<T>>) {
        let (ilo, ihi) = cell_bounds(&self.axis, ii);
        let (jlo, jhi) = cell_bounds(&self.axis, jj);
        let d = &self.diag;
        let dim_ij = (ii % 2 + jj % 2) as u8;
        let mut push = |kk: usize| {
            let (klo, khi) = cell_bounds(d, kk);
            let vertices = closure_vertices((ilo, ihi), (jlo, jhi), (klo, khi));
            out.push(FaceIdx {
                ii,
                jj,
                kk,
                vertices,
            });
        };
        let lo = ilo.add(jlo);
        if dim_ij == 0 {
            match d.binary_search(&lo) {
                Ok(k) => push(2 * k),
                Err(k) => push(2 * k - 1),
            }
            return;
        }
        let hi = ihi.add(jhi);
        let mut k = d.partition_point(|x| *x <= lo);
        push(2 * k - 1);
        while k < d.len() && d[k] < hi {
            push(2 * k);
            push(2 * k + 1);
            k += 1;
        }
    }

    /// Runs `visit` on every face, in parallel, and concatenates the results.
    pub fn collect<R: Send>(&self, visit: impl Fn(&FaceIdx<T>, &mut Vec<R>) + Sync) -> Vec<R> {
        let n = self.ncells();
        (0..n)
            .into_par_iter()
            .flat_map_iter(|ii| {
                let mut faces = Vec::new();
                let mut out = Vec::new();
                for jj in 0..n {
                    faces.clear();
                    self.faces_for(ii, jj, &mut faces);
                    for face in &faces {
                        visit(face, &mut out);
                    }
                }
                out
            })
            .collect()
    }

    pub fn face(&self, idx: &FaceIdx<T>) -> Face {
        Face::from_cells(
            rational_cell(&self.points, idx.ii),
            rational_cell(&self.points, idx.jj),
            rational_cell(&self.diag_points, idx.kk),
        )
    }

    pub fn vertex(&self, v: &(T, T)) -> Vertex {
        (v.0.to_rational() / &self.scale, v.1.to_rational() / &self.scale)
    }

    /// The diagonal point of cell `kk`, if it is a point cell.
    pub fn diag_point(&self, kk: usize) -> Option<&T> {
        (kk % 2 == 0).then(|| &self.diag[kk / 2])
    }

    /// `x` in grid coordinates; `x` must be representable.
    pub fn coordinate(&self, x: &Rational) -> T {
        T::convert(&(x * &self.scale)).expect("point on the grid")
    }
}

fn closure_vertices<T: Scalar>(i: (&T, &T), j: (&T, &T), k: (&T, &T)) -> Vec<(T, T)> {
    let inside = |lo: &T, hi: &T, x: &T| lo <= x && x <= hi;
    let mut out: Vec<(T, T)> = Vec::with_capacity(6);
    let mut consider = |x: T, y: T| {
        if inside(i.0, i.1, &x) && inside(j.0, j.1, &y) && inside(k.0, k.1, &x.add(&y)) && !out.contains(&(x.clone(), y.clone())) {
            out.push((x, y));
        }
    };
    for x in [i.0, i.1] {
        for y in [j.0, j.1] {
            consider(x.clone(), y.clone());
        }
        for s in [k.0, k.1] {
            consider(x.clone(), s.sub(x));
        }
    }
    for y in [j.0, j.1] {
        for s in [k.0, k.1] {
            consider(s.sub(y), y.clone());
        }
    }
    out
}

#[derive(Clone, Debug)]
struct Form<T> {
    base: T,
    slope: T,
    x0: T,
}

impl<T: Scalar> Form<T> {
    fn eval(&self, x: &T) -> T {
        self.base.add(&self.slope.mul(&x.sub(&self.x0)))
    }
}

/// A function scaled to `T` on the cells of a grid: its limit from within
/// a cell is `Form::eval`, and true values are `T / scale`.
pub(crate) struct Scaled<T> {
    scale: Rational,
    one: T,
    axis: Vec<Form<T>>,
    diag: Vec<Form<T>>,
}

impl<T: Scalar> Scaled<T> {
    /// The breakpoints of `g` must be among the grid points.
    pub fn new(g: &PwlPeriodic, grid: &Grid<T>) -> Option<Self> {
        let mut raw: Vec<Rational> = g
            .breakpoints()
            .iter()
            .flat_map(|b| [b.value.clone(), b.left_limit.clone(), b.right_limit.clone()])
            .collect();
        raw.extend(g.slopes().map(|s| s / &grid.scale));
        let scale = T::scale(&raw);
        let conv = |x: &Rational| T::convert(&(x * &scale));
        let slope_of = |lo: &Rational, hi: &Rational| -> Option<T> {
            let s = g.slope_at(&lo.midpoint(hi)).expect("open cell inside a piece");
            conv(&(s / &grid.scale))
        };
        let one = Rational::one();
        let form = |pts: &[Rational], c: usize| -> Option<Form<T>> {
            if c % 2 == 0 {
                Some(Form {
                    base: conv(&g.value(&pts[c / 2]))?,
                    slope: T::zero(),
                    x0: T::zero(),
                })
            } else {
                let (lo, hi) = (&pts[c / 2], &pts[c / 2 + 1]);
                let shift = if *lo >= one { one.clone() } else { Rational::zero() };
                let (rlo, rhi) = (lo - &shift, hi - &shift);
                Some(Form {
                    base: conv(&g.eval(&rlo, Side::Right))?,
                    slope: slope_of(&rlo, &rhi)?,
                    x0: T::convert(&(lo * &grid.scale))?,
                })
            }
        };
        let axis = (0..grid.ncells()).map(|c| form(&grid.points, c)).collect::<Option<Vec<_>>>()?;
        let diag = (0..2 * grid.diag.len() - 1)
            .map(|c| form(&grid.diag_points, c))
            .collect::<Option<Vec<_>>>()?;
        Some(Scaled {
            one: conv(&one)?,
            scale,
            axis,
            diag,
        })
    }

    /// Scaled limit of `Δg` at `v` from within the face.
    pub fn delta(&self, face: &FaceIdx<T>, v: &(T, T)) -> T {
        self.axis[face.ii]
            .eval(&v.0)
            .add(&self.axis[face.jj].eval(&v.1))
            .sub(&self.diag[face.kk].eval(&v.0.add(&v.1)))
    }

    /// Scaled `g_I(x) + g_J(y) − 1` at `v` from within the face.
    pub fn symmetry_defect(&self, face: &FaceIdx<T>, v: &(T, T)) -> T {
        self.axis[face.ii].eval(&v.0).add(&self.axis[face.jj].eval(&v.1)).sub(&self.one)
    }

    pub fn unscale(&self, x: &T) -> Rational {
        x.to_rational() / &self.scale
    }
}

/// Runs `body` with an `i128` grid when every function fits, else with a
/// rational one.
macro_rules! with_scan {
    ($points:expr, [$($g:expr),+], |$grid:ident, $fs:ident| $body:expr) => {{
        fn prepare<T: $crate::scan::Scalar>(
            points: &[$crate::rational::Rational],
            fs: &[&$crate::pwl::PwlPeriodic],
        ) -> Option<($crate::scan::Grid<T>, Vec<$crate::scan::Scaled<T>>)> {
            let grid = $crate::scan::Grid::<T>::new(points)?;
            let scaled = fs.iter().map(|g| $crate::scan::Scaled::new(g, &grid)).collect::<Option<Vec<_>>>()?;
            Some((grid, scaled))
        }
        let fs = [$($g),+];
        match prepare::<i128>($points, &fs) {
            Some(($grid, $fs)) => $body,
            None => {
                let ($grid, $fs) = prepare::<$crate::rational::Rational>($points, &fs).expect("rationals always fit");
                $body
            }
        }
    }};
}

pub(crate) use with_scan;
