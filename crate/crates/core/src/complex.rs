//! The two-dimensional polyhedral complex `ΔP` of a piecewise-linear function.
//!
//! Given breakpoints `B` on `[0, 1]`, the x and y axes are subdivided into the
//! points of `B` and the open intervals between consecutive points; the
//! diagonal axis `x + y` is subdivided the same way using `B ∪ (B + 1)` on
//! `[0, 2]`. A face is a nonempty set `F(I, J, K) = {(x, y) ∈ I × J : x + y ∈ K}`
//! over cells `I`, `J`, `K` of these subdivisions. The faces are relatively
//! open, pairwise disjoint and cover `[0, 1]²`, and the slack
//! `Δπ(x, y) = π(x) + π(y) − π(x + y)` is affine on each of them.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::pwl::{PwlPeriodic, Side};
use crate::rational::Rational;

/// A cell of a one-dimensional subdivision: a single point or an open interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cell1D {
    Point(Rational),
    Open(Rational, Rational),
}

impl Cell1D {
    pub fn lo(&self) -> &Rational {
        match self {
            Cell1D::Point(p) => p,
            Cell1D::Open(lo, _) => lo,
        }
    }

    pub fn hi(&self) -> &Rational {
        match self {
            Cell1D::Point(p) => p,
            Cell1D::Open(_, hi) => hi,
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, Cell1D::Point(_))
    }

    pub fn dimension(&self) -> u8 {
        match self {
            Cell1D::Point(_) => 0,
            Cell1D::Open(..) => 1,
        }
    }

    /// Whether `x` lies in the closure of the cell.
    pub fn closure_contains(&self, x: &Rational) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    fn from_extent(lo: Rational, hi: Rational) -> Self {
        if lo == hi {
            Cell1D::Point(lo)
        } else {
            Cell1D::Open(lo, hi)
        }
    }
}

impl Ord for Cell1D {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lo().cmp(other.lo()).then_with(|| self.hi().cmp(other.hi()))
    }
}

impl PartialOrd for Cell1D {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cell1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell1D::Point(p) => write!(f, "{{{p}}}"),
            Cell1D::Open(lo, hi) => write!(f, "({lo}, {hi})"),
        }
    }
}

impl Serialize for Cell1D {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.lo(), self.hi()].serialize(serializer)
    }
}

pub type Vertex = (Rational, Rational);

/// A relatively open face `F(I, J, K)` of `ΔP` together with the vertices of
/// its closure (counterclockwise for 2-faces).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Face {
    pub i: Cell1D,
    pub j: Cell1D,
    pub k: Cell1D,
    pub dimension: u8,
    pub vertices: Vec<Vertex>,
}

impl Face {
    fn new(i: Cell1D, j: Cell1D, k: Cell1D) -> Self {
        let dimension = if k.is_point() {
            (i.dimension() + j.dimension()).saturating_sub(1)
        } else {
            i.dimension() + j.dimension()
        };
        let vertices = closure_vertices(&i, &j, &k, dimension);
        Face {
            i,
            j,
            k,
            dimension,
            vertices,
        }
    }

    pub(crate) fn from_cells(i: Cell1D, j: Cell1D, k: Cell1D) -> Self {
        Face::new(i, j, k)
    }

    pub fn has_vertex(&self, v: &Vertex) -> bool {
        self.vertices.iter().any(|w| w == v)
    }

    /// Canonical sort key: lexicographic in the endpoints of `I`, `J`, `K`.
    pub fn key(&self) -> (&Cell1D, &Cell1D, &Cell1D) {
        (&self.i, &self.j, &self.k)
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({}, {}, {})", self.i, self.j, self.k)
    }
}

impl Serialize for Face {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Face", 5)?;
        s.serialize_field("I", &self.i)?;
        s.serialize_field("J", &self.j)?;
        s.serialize_field("K", &self.k)?;
        s.serialize_field("dimension", &self.dimension)?;
        let vertices: Vec<[&Rational; 2]> = self.vertices.iter().map(|(x, y)| [x, y]).collect();
        s.serialize_field("vertices", &vertices)?;
        s.end()
    }
}

fn closure_vertices(i: &Cell1D, j: &Cell1D, k: &Cell1D, dimension: u8) -> Vec<Vertex> {
    let xs = [i.lo(), i.hi()];
    let ys = [j.lo(), j.hi()];
    let ss = [k.lo(), k.hi()];
    let mut candidates: Vec<Vertex> = Vec::with_capacity(12);
    for x in xs {
        for y in ys {
            candidates.push((x.clone(), y.clone()));
        }
        for s in ss {
            candidates.push((x.clone(), s - x));
        }
    }
    for y in ys {
        for s in ss {
            candidates.push((s - y, y.clone()));
        }
    }
    let mut out: Vec<Vertex> = candidates
        .into_iter()
        .filter(|(x, y)| i.closure_contains(x) && j.closure_contains(y) && k.closure_contains(&(x + y)))
        .collect();
    out.sort();
    out.dedup();
    if dimension == 2 {
        sort_counterclockwise(&mut out);
    }
    out
}

fn sort_counterclockwise(vertices: &mut [Vertex]) {
    let n = Rational::from_integer(vertices.len() as i64);
    let cx = vertices.iter().map(|v| &v.0).sum::<Rational>() / &n;
    let cy = vertices.iter().map(|v| &v.1).sum::<Rational>() / &n;
    let upper = |dx: &Rational, dy: &Rational| dy.is_positive() || (dy.is_zero() && dx.is_positive());
    vertices.sort_by(|a, b| {
        let (ax, ay) = (&a.0 - &cx, &a.1 - &cy);
        let (bx, by) = (&b.0 - &cx, &b.1 - &cy);
        let (ha, hb) = (upper(&ax, &ay), upper(&bx, &by));
        if ha != hb {
            return if ha { Ordering::Less } else { Ordering::Greater };
        }
        let cross = &ax * &by - &ay * &bx;
        Rational::zero().cmp(&cross)
    });
    let start = (0..vertices.len()).min_by(|&a, &b| vertices[a].cmp(&vertices[b])).unwrap();
    vertices.rotate_left(start);
}

/// Cells, faces and vertices of `ΔP` for a breakpoint set.
#[derive(Clone, Debug)]
pub struct DeltaComplex {
    breakpoints: Vec<Rational>,
    diagonal: Vec<Rational>,
    axis_cells: Vec<Cell1D>,
}

impl DeltaComplex {
    /// Complex over the sorted breakpoint set `points`, which must start at 0
    /// and end at 1.
    pub fn new(points: &[Rational]) -> Self {
        let mut breakpoints = points.to_vec();
        breakpoints.sort();
        breakpoints.dedup();
        assert!(breakpoints.first().is_some_and(Rational::is_zero));
        assert!(breakpoints.last() == Some(&Rational::one()));
        let one = Rational::one();
        let mut diagonal = breakpoints.clone();
        diagonal.extend(breakpoints.iter().skip(1).map(|b| b + &one));
        DeltaComplex {
            axis_cells: subdivide(&breakpoints),
            breakpoints,
            diagonal,
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    /// `B ∪ (B + 1)`.
    pub fn diagonal_breakpoints(&self) -> &[Rational] {
        &self.diagonal
    }

    pub fn axis_cells(&self) -> &[Cell1D] {
        &self.axis_cells
    }

    /// Faces `F(I, J, ·)` for the axis cells with indices `ii` and `jj`, in
    /// increasing order of `K`.
    pub fn faces_for(&self, ii: usize, jj: usize) -> Vec<Face> {
        let i = &self.axis_cells[ii];
        let j = &self.axis_cells[jj];
        let d = &self.diagonal;
        let mut out = Vec::new();
        if i.is_point() && j.is_point() {
            let s = i.lo() + j.lo();
            let k = match d.binary_search(&s) {
                Ok(k) => Cell1D::Point(d[k].clone()),
                Err(k) => Cell1D::Open(d[k - 1].clone(), d[k].clone()),
            };
            out.push(Face::new(i.clone(), j.clone(), k));
            return out;
        }
        let lo = i.lo() + j.lo();
        let hi = i.hi() + j.hi();
        let mut k = d.partition_point(|x| *x <= lo);
        out.push(Face::new(i.clone(), j.clone(), Cell1D::Open(d[k - 1].clone(), d[k].clone())));
        while k < d.len() && d[k] < hi {
            out.push(Face::new(i.clone(), j.clone(), Cell1D::Point(d[k].clone())));
            out.push(Face::new(i.clone(), j.clone(), Cell1D::Open(d[k].clone(), d[k + 1].clone())));
            k += 1;
        }
        out
    }

    /// All faces in canonical order.
    pub fn faces(&self) -> impl Iterator<Item = Face> + '_ {
        let n = self.axis_cells.len();
        (0..n).flat_map(move |ii| (0..n).flat_map(move |jj| self.faces_for(ii, jj)))
    }

    /// All faces, generated in parallel; the order is unspecified.
    pub fn par_faces(&self) -> impl ParallelIterator<Item = Face> + '_ {
        let n = self.axis_cells.len();
        (0..n * n)
            .into_par_iter()
            .flat_map_iter(move |idx| self.faces_for(idx / n, idx % n))
    }

    pub fn face_list(&self) -> Vec<Face> {
        self.faces().collect()
    }

    /// Vertices of the complex (its 0-dimensional faces), sorted.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self
            .faces()
            .filter(|f| f.dimension == 0)
            .map(|f| f.vertices[0].clone())
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

fn subdivide(points: &[Rational]) -> Vec<Cell1D> {
    let mut cells = Vec::with_capacity(2 * points.len());
    for (idx, p) in points.iter().enumerate() {
        cells.push(Cell1D::Point(p.clone()));
        if let Some(next) = points.get(idx + 1) {
            cells.push(Cell1D::Open(p.clone(), next.clone()));
        }
    }
    cells
}

/// `ΔP` for the breakpoints of `pi`.
pub fn build_complex(pi: &PwlPeriodic) -> DeltaComplex {
    let points: Vec<Rational> = pi.points().cloned().collect();
    DeltaComplex::new(&points)
}

/// `π(x) + π(y) − π(x + y)` with periodic evaluation.
pub fn delta_pi(pi: &PwlPeriodic, x: &Rational, y: &Rational) -> Rational {
    pi.value(x) + pi.value(y) - pi.value(&(x + y))
}

/// Limit of `π` at `x` from within the cell: the value for a point cell,
/// the affine extension of the covering piece for an open cell.
pub fn cell_limit(pi: &PwlPeriodic, cell: &Cell1D, x: &Rational) -> Rational {
    match cell {
        Cell1D::Point(p) => pi.eval(p, Side::At),
        Cell1D::Open(lo, hi) => pi.eval_piece_extension(lo, hi, x),
    }
}

/// Limit of `Δπ` at vertex `v` approached from the relative interior of
/// `face`. The breakpoints of `pi` must be among those of the complex.
pub fn delta_pi_limit(pi: &PwlPeriodic, face: &Face, v: &Vertex) -> Result<Rational, Error> {
    if !face.has_vertex(v) {
        return Err(Error::VertexNotInFace {
            x: v.0.clone(),
            y: v.1.clone(),
        });
    }
    Ok(vertex_limit(pi, face, v))
}

pub(crate) fn vertex_limit(pi: &PwlPeriodic, face: &Face, v: &Vertex) -> Rational {
    let (x, y) = v;
    cell_limit(pi, &face.i, x) + cell_limit(pi, &face.j, y) - cell_limit(pi, &face.k, &(x + y))
}

/// The exact images `p1(F)`, `p2(F)`, `p3(F)` of the face under
/// `(x, y) -> x`, `y`, `x + y`: a point or the open interval spanned by the
/// relative interior.
pub fn projections(face: &Face) -> (Cell1D, Cell1D, Cell1D) {
    let extent = |vals: Vec<Rational>| {
        let lo = vals.iter().min().unwrap().clone();
        let hi = vals.iter().max().unwrap().clone();
        Cell1D::from_extent(lo, hi)
    };
    let xs = face.vertices.iter().map(|v| v.0.clone()).collect();
    let ys = face.vertices.iter().map(|v| v.1.clone()).collect();
    let ss = face.vertices.iter().map(|v| &v.0 + &v.1).collect();
    (extent(xs), extent(ys), extent(ss))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compendium::{gmic, rlm_dpl1_extreme_3a};
    use crate::rational::q;

    fn r(n: i64, d: i64) -> Rational {
        q(n, d)
    }

    #[test]
    fn gmic_half_face_counts() {
        let c = build_complex(&gmic(&r(1, 2)).unwrap());
        let faces = c.face_list();
        let count = |d| faces.iter().filter(|f| f.dimension == d).count();
        assert_eq!(count(2), 8);
        // Euler characteristic of the closed square
        assert_eq!(count(0) as i64 - count(1) as i64 + count(2) as i64, 1);
    }

    #[test]
    fn face_order_is_canonical() {
        let c = build_complex(&rlm_dpl1_extreme_3a(&r(1, 5)).unwrap());
        let faces = c.face_list();
        assert!(faces.windows(2).all(|w| w[0].key() < w[1].key()));
    }

    #[test]
    fn triangle_vertices_counterclockwise() {
        let c = build_complex(&gmic(&r(1, 2)).unwrap());
        let f = c
            .faces()
            .find(|f| f.dimension == 2 && f.i == Cell1D::Open(r(0, 1), r(1, 2)) && f.k == Cell1D::Open(r(0, 1), r(1, 2)))
            .unwrap();
        assert_eq!(f.vertices, vec![(r(0, 1), r(0, 1)), (r(1, 2), r(0, 1)), (r(0, 1), r(1, 2))]);
    }

    #[test]
    fn delta_pi_values() {
        let p = rlm_dpl1_extreme_3a(&r(1, 5)).unwrap();
        assert_eq!(delta_pi(&p, &r(1, 10), &r(1, 10)), r(0, 1));
        let g = gmic(&r(1, 2)).unwrap();
        assert_eq!(delta_pi(&g, &r(1, 2), &r(1, 2)), r(2, 1));
        assert_eq!(delta_pi(&g, &r(1, 7), &r(2, 7)), delta_pi(&g, &r(2, 7), &r(1, 7)));
    }

    #[test]
    fn limit_uses_left_limit_below_jump() {
        let p = rlm_dpl1_extreme_3a(&r(1, 5)).unwrap();
        let c = build_complex(&p);
        // 1-face on x = 0 with y in (1/5, 3/5), K = (1/5, 3/5); at y -> 3/5
        // the K-limit must be the left limit 6/7, not the value 1/2
        let face = c
            .faces()
            .find(|f| {
                f.i == Cell1D::Point(r(0, 1)) && f.j == Cell1D::Open(r(1, 5), r(3, 5)) && f.k == Cell1D::Open(r(1, 5), r(3, 5))
            })
            .unwrap();
        let v = (r(0, 1), r(3, 5));
        assert_eq!(cell_limit(&p, &face.k, &r(3, 5)), r(6, 7));
        assert_eq!(delta_pi_limit(&p, &face, &v).unwrap(), r(0, 1));
        assert!(delta_pi_limit(&p, &face, &(r(1, 2), r(1, 2))).is_err());
    }

    #[test]
    fn limit_on_upper_triangle_vanishes() {
        let p = rlm_dpl1_extreme_3a(&r(1, 5)).unwrap();
        let c = build_complex(&p);
        let face = c
            .faces()
            .find(|f| {
                f.i == Cell1D::Open(r(3, 5), r(1, 1))
                    && f.j == Cell1D::Open(r(3, 5), r(1, 1))
                    && f.k == Cell1D::Open(r(6, 5), r(8, 5))
            })
            .unwrap();
        assert_eq!(face.dimension, 2);
        for v in &face.vertices {
            assert_eq!(delta_pi_limit(&p, &face, v).unwrap(), r(0, 1));
        }
    }

    #[test]
    fn projection_examples() {
        let p = rlm_dpl1_extreme_3a(&r(1, 5)).unwrap();
        let c = build_complex(&p);
        let f1 = c
            .faces()
            .find(|f| f.dimension == 2 && f.k == Cell1D::Open(r(0, 1), r(1, 5)))
            .unwrap();
        let open = Cell1D::Open(r(0, 1), r(1, 5));
        assert_eq!(projections(&f1), (open.clone(), open.clone(), open));

        let upper = c
            .faces()
            .find(|f| f.dimension == 2 && f.i == Cell1D::Open(r(3, 5), r(1, 1)) && f.k == Cell1D::Open(r(8, 5), r(2, 1)))
            .unwrap();
        let (_, _, p3) = projections(&upper);
        assert_eq!(p3, Cell1D::Open(r(8, 5), r(2, 1)));

        let vertex = c.faces().find(|f| f.dimension == 0 && f.vertices[0] == (r(1, 5), r(3, 5))).unwrap();
        assert_eq!(
            projections(&vertex),
            (Cell1D::Point(r(1, 5)), Cell1D::Point(r(3, 5)), Cell1D::Point(r(4, 5)))
        );
    }
}
