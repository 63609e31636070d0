//! Exact sparse linear algebra over the rationals, plus a rank check modulo a
//! prime for fast full-rank certificates.

use std::collections::BTreeMap;

use crate::rational::Rational;

/// A sparse row: column index to nonzero coefficient.
pub type SparseRow = BTreeMap<usize, Rational>;

/// Builds a sparse row, summing duplicate columns and dropping zeros.
pub fn sparse_row(entries: impl IntoIterator<Item = (usize, Rational)>) -> SparseRow {
    let mut row = SparseRow::new();
    for (c, v) in entries {
        let e = row.entry(c).or_insert_with(Rational::zero);
        *e += &v;
        if e.is_zero() {
            row.remove(&c);
        }
    }
    row
}

#[derive(Clone, Debug)]
struct EchelonRow {
    coeffs: SparseRow,
    rhs: Rational,
}

/// Incremental row echelon form. Each stored row is keyed by its lowest
/// column and normalized so that column has coefficient 1.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: BTreeMap<usize, EchelonRow>,
    inconsistent: bool,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: BTreeMap::new(),
            inconsistent: false,
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Whether some added equation reduced to `0 = c` with `c ≠ 0`.
    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    /// Adds the equation `row · x = rhs`. Returns whether the rank grew.
    pub fn add(&mut self, row: SparseRow, rhs: Rational) -> bool {
        let mut coeffs = row;
        let mut rhs = rhs;
        loop {
            let Some((&pivot, lead)) = coeffs.iter().next() else {
                if !rhs.is_zero() {
                    self.inconsistent = true;
                }
                return false;
            };
            match self.rows.get(&pivot) {
                Some(existing) => {
                    let factor = lead.clone();
                    for (c, v) in &existing.coeffs {
                        let e = coeffs.entry(*c).or_insert_with(Rational::zero);
                        *e -= &(&factor * v);
                        if e.is_zero() {
                            coeffs.remove(c);
                        }
                    }
                    rhs -= &(&factor * &existing.rhs);
                }
                None => {
                    let inv = lead.recip().expect("nonzero pivot");
                    for v in coeffs.values_mut() {
                        *v *= &inv;
                    }
                    rhs *= &inv;
                    self.rows.insert(pivot, EchelonRow { coeffs, rhs });
                    return true;
                }
            }
        }
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.rows.contains_key(c)).collect()
    }

    /// Solves for the pivot variables given values of the free ones and
    /// whether the right-hand sides are included.
    fn back_substitute(&self, x: &mut [Rational], with_rhs: bool) {
        for (&p, row) in self.rows.iter().rev() {
            let mut v = if with_rhs { row.rhs.clone() } else { Rational::zero() };
            for (c, a) in row.coeffs.range(p + 1..) {
                v -= &(a * &x[*c]);
            }
            x[p] = v;
        }
    }

    /// A basis of the null space of the coefficient matrix, one vector per
    /// free column in increasing order.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        self.free_columns()
            .into_iter()
            .map(|free| {
                let mut x = vec![Rational::zero(); self.ncols];
                x[free] = Rational::one();
                self.back_substitute(&mut x, false);
                x
            })
            .collect()
    }

    /// A particular solution with all free variables zero, or `None` if the
    /// system is inconsistent.
    pub fn particular_solution(&self) -> Option<Vec<Rational>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![Rational::zero(); self.ncols];
        self.back_substitute(&mut x, true);
        Some(x)
    }
}

/// Scales `v` so that its largest absolute entry is 1 and its first nonzero
/// entry is positive.
pub fn normalize(v: &mut [Rational]) {
    let Some(first) = v.iter().find(|x| !x.is_zero()).cloned() else {
        return;
    };
    let m = v.iter().map(Rational::abs).max().expect("nonempty");
    let scale = if first.is_negative() { -(m.recip().expect("nonzero")) } else { m.recip().expect("nonzero") };
    for x in v.iter_mut() {
        *x *= &scale;
    }
}

/// The modulus used by [`full_rank_mod_p`].
pub const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, PRIME - 2)
}

/// Whether the integer matrix given by sparse `rows` has full column rank
/// `n`, decided modulo [`PRIME`]. Reduction modulo a prime can only lower
/// rank, so `true` certifies full rank over the rationals; `false` is
/// inconclusive.
pub fn full_rank_mod_p(n: usize, rows: &[Vec<(usize, i64)>]) -> bool {
    let mut pivots: Vec<Option<Vec<u64>>> = vec![None; n];
    let mut rank = 0;
    for row in rows {
        let mut dense = vec![0u64; n];
        for &(c, v) in row {
            dense[c] = (dense[c] + v.rem_euclid(PRIME as i64) as u64) % PRIME;
        }
        for c in 0..n {
            if dense[c] == 0 {
                continue;
            }
            match &pivots[c] {
                Some(p) => {
                    let factor = dense[c];
                    for (d, pv) in dense[c..].iter_mut().zip(&p[c..]) {
                        *d = (*d + PRIME - mul_mod(factor, *pv)) % PRIME;
                    }
                }
                None => {
                    let inv = inv_mod(dense[c]);
                    for d in dense[c..].iter_mut() {
                        *d = mul_mod(*d, inv);
                    }
                    pivots[c] = Some(dense);
                    rank += 1;
                    break;
                }
            }
        }
        if rank == n {
            return true;
        }
    }
    false
}
