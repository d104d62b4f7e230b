//! Exact sparse/dense linear algebra over a [`Field`].
//!
//! Everything here is deterministic: pivots are chosen as the first nonzero
//! entry by fixed column order, so kernel bases are reproducible across runs
//! and thread counts.

use crate::scalar::{Field, Scalar};

/// Sparse vector: strictly increasing indices, nonzero entries.
pub type SparseVec = Vec<(usize, Scalar)>;

pub fn sv_from_dense(field: &Field, v: &[Scalar]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, s)| !field.is_zero(s))
        .map(|(i, s)| (i, s.clone()))
        .collect()
}

pub fn sv_to_dense(field: &Field, v: &SparseVec, n: usize) -> Vec<Scalar> {
    let mut out = vec![field.zero(); n];
    for (i, s) in v {
        out[*i] = s.clone();
    }
    out
}

/// result += c * v
pub fn sv_axpy(field: &Field, result: &mut SparseVec, c: &Scalar, v: &[(usize, Scalar)]) {
    if field.is_zero(c) {
        return;
    }
    let mut out = Vec::with_capacity(result.len() + v.len());
    let mut i = 0;
    let mut j = 0;
    while i < result.len() || j < v.len() {
        if j >= v.len() || (i < result.len() && result[i].0 < v[j].0) {
            out.push(result[i].clone());
            i += 1;
        } else if i >= result.len() || v[j].0 < result[i].0 {
            let val = field.mul(c, &v[j].1);
            if !field.is_zero(&val) {
                out.push((v[j].0, val));
            }
            j += 1;
        } else {
            let val = field.add(&result[i].1, &field.mul(c, &v[j].1));
            if !field.is_zero(&val) {
                out.push((result[i].0, val));
            }
            i += 1;
            j += 1;
        }
    }
    *result = out;
}

pub fn sv_scale(field: &Field, v: &mut SparseVec, c: &Scalar) {
    if field.is_zero(c) {
        v.clear();
        return;
    }
    for (_, s) in v.iter_mut() {
        *s = field.mul(s, c);
    }
}

pub fn sv_neg(field: &Field, v: &SparseVec) -> SparseVec {
    v.iter().map(|(i, s)| (*i, field.neg(s))).collect()
}

pub fn sv_add(field: &Field, a: &SparseVec, b: &SparseVec) -> SparseVec {
    let mut out = a.clone();
    sv_axpy(field, &mut out, &field.one(), b);
    out
}

pub fn sv_get<'a>(v: &'a SparseVec, idx: usize) -> Option<&'a Scalar> {
    v.binary_search_by_key(&idx, |(i, _)| *i)
        .ok()
        .map(|pos| &v[pos].1)
}

/// Incremental row-echelon store with pivot normalization.
///
/// Rows are reduced against existing pivots and, when nonzero, inserted with
/// their leading entry scaled to 1. Deterministic by construction.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    /// (pivot column, row) sorted by pivot column.
    rows: Vec<(usize, SparseVec)>,
}

impl Echelon {
    pub fn new(field: &Field) -> Self {
        Echelon {
            field: field.clone(),
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    pub fn rows(&self) -> &[(usize, SparseVec)] {
        &self.rows
    }

    /// Fully reduces `row` against the echelon: afterwards the row has no
    /// entry in any pivot column. Stored rows are kept in reduced form, so
    /// this terminates after one sweep per pivot entry.
    pub fn reduce(&self, mut row: SparseVec) -> SparseVec {
        loop {
            let mut hit = None;
            for (col, _) in &row {
                if let Ok(pos) = self.rows.binary_search_by_key(col, |(p, _)| *p) {
                    hit = Some(pos);
                    break;
                }
            }
            match hit {
                Some(pos) => {
                    let col = self.rows[pos].0;
                    let c = sv_get(&row, col).unwrap().clone();
                    let coef = self.field.neg(&c);
                    let pivot_row = self.rows[pos].1.clone();
                    sv_axpy(&self.field, &mut row, &coef, &pivot_row);
                }
                None => return row,
            }
        }
    }

    /// Reduces and inserts; returns the pivot column if the row was new.
    pub fn insert(&mut self, row: SparseVec) -> Option<usize> {
        let mut row = self.reduce(row);
        if row.is_empty() {
            return None;
        }
        let lead = row[0].0;
        let inv = self
            .field
            .inv(&row[0].1)
            .expect("nonzero leading coefficient");
        sv_scale(&self.field, &mut row, &inv);
        // back-substitute into existing rows to keep reduced form
        let pos = self
            .rows
            .binary_search_by_key(&lead, |(p, _)| *p)
            .unwrap_err();
        for (_, existing) in self.rows.iter_mut() {
            if let Some(c) = sv_get(existing, lead).cloned() {
                let coef = self.field.neg(&c);
                sv_axpy(&self.field, existing, &coef, &row);
            }
        }
        self.rows.insert(pos, (lead, row));
        Some(lead)
    }

    /// True when the vector lies in the row span.
    pub fn contains(&self, row: &SparseVec) -> bool {
        self.reduce(row.clone()).is_empty()
    }

    /// Expresses `row` as a combination of the stored rows; None if outside
    /// the span. Returns (pivot column -> coefficient) pairs.
    pub fn coordinates(&self, row: &SparseVec) -> Option<Vec<(usize, Scalar)>> {
        let mut row = row.clone();
        let mut coords = Vec::new();
        loop {
            if row.is_empty() {
                coords.sort_by_key(|(p, _)| *p);
                return Some(coords);
            }
            let mut hit = None;
            for (col, _) in &row {
                if let Ok(pos) = self.rows.binary_search_by_key(col, |(p, _)| *p) {
                    hit = Some(pos);
                    break;
                }
            }
            match hit {
                Some(pos) => {
                    let col = self.rows[pos].0;
                    let c = sv_get(&row, col).unwrap().clone();
                    let pivot_row = self.rows[pos].1.clone();
                    let negc = self.field.neg(&c);
                    sv_axpy(&self.field, &mut row, &negc, &pivot_row);
                    coords.push((col, c));
                }
                None => return None,
            }
        }
    }
}

/// Result of solving A x = b.
#[derive(Clone, Debug)]
pub struct SolveResult {
    /// A particular solution with free variables set to zero, if consistent.
    pub particular: Option<Vec<Scalar>>,
    /// Kernel basis in canonical echelon order (one vector per free column,
    /// free columns in increasing order, free coordinate normalized to 1).
    pub kernel: Vec<Vec<Scalar>>,
    pub rank: usize,
}

/// Exact Gaussian elimination on sparse rows. `rows` are the rows of A,
/// `ncols` the number of unknowns, `rhs` optional right-hand side (one entry
/// per row). An inconsistent system reports `particular: None`.
pub fn solve_sparse(
    field: &Field,
    rows: &[SparseVec],
    ncols: usize,
    rhs: Option<&[Scalar]>,
) -> SolveResult {
    // Augment: column ncols holds the rhs.
    let mut ech = Echelon::new(field);
    for (ri, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        if let Some(b) = rhs {
            if !field.is_zero(&b[ri]) {
                r.push((ncols, b[ri].clone()));
            }
        }
        ech.insert(r);
    }
    extract_solution(field, &ech, ncols)
}

fn extract_solution(field: &Field, ech: &Echelon, ncols: usize) -> SolveResult {
    let mut pivot_cols = Vec::new();
    let mut inconsistent = false;
    for (p, _) in ech.rows() {
        if *p == ncols {
            inconsistent = true;
        } else {
            pivot_cols.push(*p);
        }
    }
    let rank = pivot_cols.len();
    let is_pivot = {
        let mut v = vec![false; ncols + 1];
        for p in &pivot_cols {
            v[*p] = true;
        }
        v
    };

    // particular: free vars zero, pivot var = rhs entry of its (reduced) row
    let particular = if inconsistent {
        None
    } else {
        let mut x = vec![field.zero(); ncols];
        for (p, row) in ech.rows() {
            if *p == ncols {
                continue;
            }
            if let Some(v) = sv_get(row, ncols) {
                x[*p] = v.clone();
            }
        }
        Some(x)
    };

    // kernel basis: for each free column f, set x_f = 1, pivots adjust
    let mut kernel = Vec::new();
    for f in 0..ncols {
        if is_pivot[f] {
            continue;
        }
        let mut v = vec![field.zero(); ncols];
        v[f] = field.one();
        for (p, row) in ech.rows() {
            if *p == ncols {
                continue;
            }
            if let Some(c) = sv_get(row, f) {
                v[*p] = field.neg(c);
            }
        }
        kernel.push(v);
    }
    SolveResult {
        particular,
        kernel,
        rank,
    }
}

/// Kernel of the linear map given by sparse rows (b = 0 case).
pub fn kernel_sparse(field: &Field, rows: &[SparseVec], ncols: usize) -> Vec<Vec<Scalar>> {
    solve_sparse(field, rows, ncols, None).kernel
}

/// Dense matrix with row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<Scalar>,
}

impl Mat {
    pub fn zero(field: &Field, nrows: usize, ncols: usize) -> Mat {
        Mat {
            nrows,
            ncols,
            data: vec![field.zero(); nrows * ncols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Mat {
        let mut m = Mat::zero(field, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = field.one();
        }
        m
    }

    pub fn from_rows(field: &Field, rows: &[Vec<i64>]) -> Mat {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Mat::zero(field, nrows, ncols);
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                *m.at_mut(i, j) = field.from_int(*v);
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.ncols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Scalar {
        &mut self.data[i * self.ncols + j]
    }

    pub fn row_sparse(&self, field: &Field, i: usize) -> SparseVec {
        (0..self.ncols)
            .filter(|j| !field.is_zero(self.at(i, *j)))
            .map(|j| (j, self.at(i, j).clone()))
            .collect()
    }

    pub fn mul(&self, field: &Field, other: &Mat) -> Mat {
        assert_eq!(self.ncols, other.nrows);
        let mut out = Mat::zero(field, self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.at(i, k);
                if field.is_zero(a) {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = other.at(k, j);
                    if field.is_zero(b) {
                        continue;
                    }
                    let cur = out.at(i, j).clone();
                    *out.at_mut(i, j) = field.add(&cur, &field.mul(a, b));
                }
            }
        }
        out
    }

    pub fn add(&self, field: &Field, other: &Mat) -> Mat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a = field.add(a, b);
        }
        out
    }

    pub fn scale(&self, field: &Field, c: &Scalar) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = field.mul(a, c);
        }
        out
    }

    pub fn neg(&self, field: &Field) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = field.neg(a);
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = self.clone();
        out.nrows = self.ncols;
        out.ncols = self.nrows;
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.data[j * self.nrows + i] = self.at(i, j).clone();
            }
        }
        out
    }

    pub fn is_zero(&self, field: &Field) -> bool {
        self.data.iter().all(|s| field.is_zero(s))
    }

    /// Rank by elimination (copy, deterministic pivoting).
    pub fn rank(&self, field: &Field) -> usize {
        let mut ech = Echelon::new(field);
        for i in 0..self.nrows {
            ech.insert(self.row_sparse(field, i));
        }
        ech.rank()
    }

    /// Determinant for square matrices.
    pub fn det(&self, field: &Field) -> Scalar {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut a = self.clone();
        let mut det = field.one();
        for col in 0..n {
            // find pivot
            let mut pivot = None;
            for r in col..n {
                if !field.is_zero(a.at(r, col)) {
                    pivot = Some(r);
                    break;
                }
            }
            let Some(p) = pivot else {
                return field.zero();
            };
            if p != col {
                for j in 0..n {
                    a.data.swap(p * n + j, col * n + j);
                }
                det = field.neg(&det);
            }
            let pv = a.at(col, col).clone();
            det = field.mul(&det, &pv);
            let pinv = field.inv(&pv).unwrap();
            for r in col + 1..n {
                let factor = field.mul(a.at(r, col), &pinv);
                if field.is_zero(&factor) {
                    continue;
                }
                for j in col..n {
                    let sub = field.mul(&factor, a.at(col, j));
                    let cur = a.at(r, j).clone();
                    *a.at_mut(r, j) = field.sub(&cur, &sub);
                }
            }
        }
        det
    }

    /// Inverse for square invertible matrices (None if singular).
    pub fn inverse(&self, field: &Field) -> Option<Mat> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut a = self.clone();
        let mut inv = Mat::identity(field, n);
        for col in 0..n {
            let mut pivot = None;
            for r in col..n {
                if !field.is_zero(a.at(r, col)) {
                    pivot = Some(r);
                    break;
                }
            }
            let p = pivot?;
            if p != col {
                for j in 0..n {
                    a.data.swap(p * n + j, col * n + j);
                    inv.data.swap(p * n + j, col * n + j);
                }
            }
            let pinv = field.inv(a.at(col, col)).unwrap();
            for j in 0..n {
                *a.at_mut(col, j) = field.mul(a.at(col, j), &pinv);
                *inv.at_mut(col, j) = field.mul(inv.at(col, j), &pinv);
            }
            for r in 0..n {
                if r == col || field.is_zero(a.at(r, col)) {
                    continue;
                }
                let factor = a.at(r, col).clone();
                for j in 0..n {
                    let sub = field.mul(&factor, a.at(col, j));
                    let cur = a.at(r, j).clone();
                    *a.at_mut(r, j) = field.sub(&cur, &sub);
                    let subi = field.mul(&factor, inv.at(col, j));
                    let curi = inv.at(r, j).clone();
                    *inv.at_mut(r, j) = field.sub(&curi, &subi);
                }
            }
        }
        Some(inv)
    }

    /// Kernel basis (canonical echelon order) of the matrix as a map.
    pub fn kernel(&self, field: &Field) -> Vec<Vec<Scalar>> {
        let rows: Vec<SparseVec> = (0..self.nrows)
            .map(|i| self.row_sparse(field, i))
            .collect();
        kernel_sparse(field, &rows, self.ncols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let f = Field::Q;
        let rows = vec![vec![(0, f.one())], vec![(1, f.one())]];
        let rhs = vec![f.one(), f.zero()];
        let sol = solve_sparse(&f, &rows, 2, Some(&rhs));
        assert_eq!(sol.particular, Some(vec![f.one(), f.zero()]));
        assert!(sol.kernel.is_empty());
        assert_eq!(sol.rank, 2);
    }

    #[test]
    fn zero_matrix_kernel() {
        let f = Field::Q;
        let rows: Vec<SparseVec> = vec![vec![], vec![]];
        let sol = solve_sparse(&f, &rows, 2, Some(&[f.zero(), f.zero()]));
        assert_eq!(sol.kernel.len(), 2);
        assert_eq!(sol.rank, 0);
    }

    #[test]
    fn dependent_rows_particular_and_kernel() {
        // [[1,1],[2,2]] x = (1,2): particular (1,0), kernel dim 1
        let f = Field::Q;
        let rows = vec![
            vec![(0, f.one()), (1, f.one())],
            vec![(0, f.from_int(2)), (1, f.from_int(2))],
        ];
        let rhs = vec![f.one(), f.from_int(2)];
        let sol = solve_sparse(&f, &rows, 2, Some(&rhs));
        assert_eq!(sol.particular, Some(vec![f.one(), f.zero()]));
        assert_eq!(sol.kernel.len(), 1);
        assert_eq!(sol.kernel[0], vec![f.from_int(-1), f.one()]);
    }

    #[test]
    fn inconsistent_reported_not_fault() {
        let f = Field::Q;
        let rows = vec![vec![(0, f.one())], vec![(0, f.one())]];
        let rhs = vec![f.one(), f.from_int(2)];
        let sol = solve_sparse(&f, &rows, 1, Some(&rhs));
        assert!(sol.particular.is_none());
    }

    #[test]
    fn solution_verifies() {
        // random-ish system over GF(7): check A x = b and A v = 0
        let f = Field::gf(7, 1);
        let mut rng = crate::util::SplitMix64::new(42);
        for _ in 0..20 {
            let n = 5;
            let m = 4;
            let rows: Vec<SparseVec> = (0..m)
                .map(|_| {
                    (0..n)
                        .filter_map(|j| {
                            let v = f.sample(&mut rng, 7);
                            if f.is_zero(&v) {
                                None
                            } else {
                                Some((j, v))
                            }
                        })
                        .collect()
                })
                .collect();
            let x0: Vec<Scalar> = (0..n).map(|_| f.sample(&mut rng, 7)).collect();
            let rhs: Vec<Scalar> = rows
                .iter()
                .map(|r| {
                    let mut acc = f.zero();
                    for (j, c) in r {
                        acc = f.add(&acc, &f.mul(c, &x0[*j]));
                    }
                    acc
                })
                .collect();
            let sol = solve_sparse(&f, &rows, n, Some(&rhs));
            let x = sol.particular.expect("consistent by construction");
            for (ri, r) in rows.iter().enumerate() {
                let mut acc = f.zero();
                for (j, c) in r {
                    acc = f.add(&acc, &f.mul(c, &x[*j]));
                }
                assert_eq!(acc, rhs[ri]);
                for v in &sol.kernel {
                    let mut acc = f.zero();
                    for (j, c) in r {
                        acc = f.add(&acc, &f.mul(c, &v[*j]));
                    }
                    assert!(f.is_zero(&acc));
                }
            }
            assert_eq!(sol.rank + sol.kernel.len(), n);
        }
    }

    #[test]
    fn det_and_inverse() {
        let f = Field::Q;
        let m = Mat::from_rows(&f, &[vec![2, 1], vec![1, 1]]);
        assert_eq!(m.det(&f), f.one());
        let inv = m.inverse(&f).unwrap();
        let prod = m.mul(&f, &inv);
        assert_eq!(prod, Mat::identity(&f, 2));
        let sing = Mat::from_rows(&f, &[vec![1, 2], vec![2, 4]]);
        assert!(f.is_zero(&sing.det(&f)));
        assert!(sing.inverse(&f).is_none());
    }
}
