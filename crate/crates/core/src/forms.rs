//! Invariant (super)symmetric bilinear forms: solving for the full space of
//! invariant forms of a given parity, nondegeneracy search with honest
//! certificates, radicals, and the graded pairing constraints.
//!
//! Conventions, fixed once: invariance means B([x,y],z) = B(x,[y,z]);
//! supersymmetry means B(x,y) = (-1)^{p(x)p(y)} B(y,x); the Gram matrix
//! stores plain values gram[i][j] = B(e_i, e_j).

use crate::algebra::{Subspace, SuperAlgebra};
use crate::linalg::{kernel_sparse, Echelon, Mat, SparseVec};
use crate::scalar::{Field, Scalar};
use crate::util::{map_indexed, SplitMix64};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug)]
pub struct BilinearForm {
    pub parity: u8,
    pub gram: Mat,
}

impl BilinearForm {
    pub fn zero(field: &Field, dim: usize, parity: u8) -> Self {
        BilinearForm {
            parity,
            gram: Mat::zero(field, dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows
    }

    pub fn value(&self, field: &Field, x: &[(usize, Scalar)], y: &[(usize, Scalar)]) -> Scalar {
        let mut acc = field.zero();
        for (i, ci) in x {
            for (j, cj) in y {
                let g = self.gram.at(*i, *j);
                if field.is_zero(g) {
                    continue;
                }
                acc = field.add(&acc, &field.mul(&field.mul(ci, cj), g));
            }
        }
        acc
    }

    pub fn is_nondegenerate(&self, field: &Field) -> bool {
        self.gram.rank(field) == self.gram.nrows
    }

    /// Checks gram[i][j] = (-1)^{p_i p_j} gram[j][i] against the algebra's
    /// parities, and parity homogeneity of the entries.
    pub fn check_shape(&self, alg: &SuperAlgebra) -> Result<(), String> {
        let f = &alg.field;
        let n = alg.dim();
        for i in 0..n {
            for j in 0..n {
                let a = self.gram.at(i, j);
                if (alg.parity(i) + alg.parity(j)) % 2 != self.parity && !f.is_zero(a) {
                    return Err(format!("entry ({i},{j}) breaks parity homogeneity"));
                }
                let sign_flip = alg.parity(i) == 1 && alg.parity(j) == 1;
                let b = self.gram.at(j, i);
                let expect = if sign_flip { f.neg(b) } else { b.clone() };
                if *a != expect {
                    return Err(format!("entry ({i},{j}) breaks supersymmetry"));
                }
            }
        }
        Ok(())
    }

    /// First invariance violation B([x,y],z) != B(x,[y,z]) over basis
    /// triples, or None if invariant. Parallel over the first index.
    pub fn invariance_violation(&self, alg: &SuperAlgebra) -> Option<(usize, usize, usize)> {
        let n = alg.dim();
        let f = &alg.field;
        let per_i = map_indexed(n, |i| {
            let xi = vec![(i, f.one())];
            for j in 0..n {
                let bij = alg.bracket_basis(i, j);
                for k in 0..n {
                    let lhs = self.value(f, &bij, &[(k, f.one())]);
                    let rhs = self.value(f, &xi, &alg.bracket_basis(j, k));
                    if lhs != rhs {
                        return Some((i, j, k));
                    }
                }
            }
            None
        });
        per_i.into_iter().flatten().next()
    }

    /// Sampled invariance check for large algebras.
    pub fn invariance_violation_sampled(
        &self,
        alg: &SuperAlgebra,
        samples: usize,
        seed: u64,
    ) -> Option<(usize, usize, usize)> {
        let n = alg.dim();
        let f = &alg.field;
        let mut rng = SplitMix64::new(seed);
        let triples: Vec<(usize, usize, usize)> = (0..samples)
            .map(|_| (rng.usize_below(n), rng.usize_below(n), rng.usize_below(n)))
            .collect();
        let flags = map_indexed(triples.len(), |t| {
            let (i, j, k) = triples[t];
            let lhs = self.value(f, &alg.bracket_basis(i, j), &[(k, f.one())]);
            let rhs = self.value(f, &[(i, f.one())], &alg.bracket_basis(j, k));
            if lhs != rhs {
                Some((i, j, k))
            } else {
                None
            }
        });
        flags.into_iter().flatten().next()
    }
}

#[derive(Clone, Debug)]
pub struct FormSpace {
    pub parity: u8,
    pub basis: Vec<BilinearForm>,
}

impl FormSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Linear combination of the basis forms.
    pub fn combine(&self, field: &Field, coeffs: &[Scalar]) -> BilinearForm {
        assert_eq!(coeffs.len(), self.basis.len());
        let n = self.basis.first().map_or(0, |b| b.dim());
        let mut gram = Mat::zero(field, n, n);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if field.is_zero(c) {
                continue;
            }
            for idx in 0..gram.data.len() {
                let add = field.mul(c, &b.gram.data[idx]);
                gram.data[idx] = field.add(&gram.data[idx], &add);
            }
        }
        BilinearForm {
            parity: self.parity,
            gram,
        }
    }

    /// Coordinates of a form in this space, if it lies in the span.
    pub fn coordinates_of(&self, field: &Field, form: &BilinearForm) -> Option<Vec<Scalar>> {
        if form.parity != self.parity {
            return None;
        }
        let mut ech = Echelon::new(field);
        let mut inserted = Vec::new();
        for (bi, b) in self.basis.iter().enumerate() {
            let row: SparseVec = b
                .gram
                .data
                .iter()
                .enumerate()
                .filter(|(_, s)| !field.is_zero(s))
                .map(|(i, s)| (i, s.clone()))
                .collect();
            // augment with an indicator column to track coordinates
            let mut aug = row;
            aug.push((b.gram.data.len() + bi, field.one()));
            ech.insert(aug);
            inserted.push(bi);
        }
        let target: SparseVec = form
            .gram
            .data
            .iter()
            .enumerate()
            .filter(|(_, s)| !field.is_zero(s))
            .map(|(i, s)| (i, s.clone()))
            .collect();
        let reduced = ech.reduce(target);
        // residual must live purely in indicator columns
        let ncells = form.gram.data.len();
        if reduced.iter().any(|(i, _)| *i < ncells) {
            return None;
        }
        let mut coords = vec![field.zero(); self.basis.len()];
        for (i, c) in reduced {
            coords[i - ncells] = field.neg(&c);
        }
        Some(coords)
    }
}

/// Unknown index bookkeeping for the invariance solve: pairs (i,j), i <= j,
/// of the requested parity; odd diagonal pairs are forced to zero by
/// supersymmetry unless the characteristic is 2.
struct PairVars {
    index: BTreeMap<(u32, u32), usize>,
    pairs: Vec<(u32, u32)>,
}

impl PairVars {
    fn build(alg: &SuperAlgebra, parity: u8) -> Self {
        let n = alg.dim();
        let char2 = alg.field.characteristic() == 2;
        let mut index = BTreeMap::new();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i..n {
                if (alg.parity(i) + alg.parity(j)) % 2 != parity {
                    continue;
                }
                if i == j && alg.parity(i) == 1 && !char2 {
                    continue;
                }
                index.insert((i as u32, j as u32), pairs.len());
                pairs.push((i as u32, j as u32));
            }
        }
        PairVars { index, pairs }
    }

    /// Variable id and sign for the (possibly flipped) entry B(a, b).
    fn var_of(&self, alg: &SuperAlgebra, a: usize, b: usize) -> Option<(usize, bool)> {
        let (lo, hi, flipped) = if a <= b { (a, b, false) } else { (b, a, true) };
        let id = self.index.get(&(lo as u32, hi as u32))?;
        // B(a,b) = (-1)^{p_a p_b} B(b,a)
        let sign_neg = flipped
            && alg.parity(a) == 1
            && alg.parity(b) == 1
            && alg.field.characteristic() != 2;
        Some((*id, sign_neg))
    }
}

/// Exact solution space of {supersymmetric, parity-homogeneous, invariant}
/// bilinear forms of the requested parity.
pub fn invariant_forms(alg: &SuperAlgebra, parity: u8) -> FormSpace {
    let n = alg.dim();
    let f = &alg.field;
    let vars = PairVars::build(alg, parity);
    let nvars = vars.pairs.len();

    // precompute bracket table
    let table: Vec<Vec<SparseVec>> = (0..n)
        .map(|i| (0..n).map(|j| alg.bracket_basis(i, j)).collect())
        .collect();

    // rows per leading index i, generated in parallel, inserted in order
    let rows_by_i: Vec<Vec<SparseVec>> = map_indexed(n, |i| {
        let mut rows = Vec::new();
        for j in 0..n {
            let bij = &table[i][j];
            for k in 0..n {
                let bjk = &table[j][k];
                if bij.is_empty() && bjk.is_empty() {
                    continue;
                }
                let mut row: BTreeMap<usize, Scalar> = BTreeMap::new();
                let mut add = |var: usize, coef: Scalar| {
                    let entry = row.entry(var).or_insert_with(|| f.zero());
                    *entry = f.add(entry, &coef);
                };
                for (l, c) in bij {
                    if let Some((var, neg)) = vars.var_of(alg, *l, k) {
                        add(var, if neg { f.neg(c) } else { c.clone() });
                    }
                }
                for (l, c) in bjk {
                    if let Some((var, neg)) = vars.var_of(alg, i, *l) {
                        let c = f.neg(c);
                        add(var, if neg { f.neg(&c) } else { c });
                    }
                }
                let row: SparseVec = row
                    .into_iter()
                    .filter(|(_, c)| !f.is_zero(c))
                    .collect();
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
        rows
    });

    let mut ech = Echelon::new(f);
    for rows in rows_by_i {
        for r in rows {
            ech.insert(r);
        }
    }
    // kernel of the echelonized system
    let pivot_set: std::collections::BTreeSet<usize> = ech.pivots().into_iter().collect();
    let mut basis = Vec::new();
    for free in 0..nvars {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut coeffs = vec![f.zero(); nvars];
        coeffs[free] = f.one();
        for (p, row) in ech.rows() {
            if let Some(c) = crate::linalg::sv_get(row, free) {
                coeffs[*p] = f.neg(c);
            }
        }
        // materialize the Gram matrix
        let mut gram = Mat::zero(f, n, n);
        for (var, c) in coeffs.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            let (i, j) = vars.pairs[var];
            let (i, j) = (i as usize, j as usize);
            *gram.at_mut(i, j) = c.clone();
            if i != j {
                let flip = alg.parity(i) == 1 && alg.parity(j) == 1;
                *gram.at_mut(j, i) = if flip && f.characteristic() != 2 {
                    f.neg(c)
                } else {
                    c.clone()
                };
            }
        }
        basis.push(BilinearForm { parity, gram });
    }
    FormSpace { parity, basis }
}

/// How a nondegeneracy verdict was reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NisCertificate {
    /// The form space is zero.
    EmptySpace,
    /// A vector killed by every form in the space (degenerate everywhere).
    CommonRadical(Vec<Scalar>),
    /// Every combination over a finite field was enumerated.
    Exhaustive,
    /// Full grid evaluation over the rationals; grid size exceeds the
    /// determinant degree bound, so vanishing everywhere means identically
    /// degenerate.
    SymbolicGrid,
    /// Sampling only; a "none" verdict with this certificate is not proof.
    Probabilistic { trials: usize },
    /// A nondegenerate member was exhibited directly.
    Direct,
}

#[derive(Clone, Debug)]
pub struct NisResult {
    pub form: Option<BilinearForm>,
    pub certificate: NisCertificate,
}

impl fmt::Display for NisCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NisCertificate::EmptySpace => write!(f, "empty form space"),
            NisCertificate::CommonRadical(_) => write!(f, "common radical vector"),
            NisCertificate::Exhaustive => write!(f, "exhaustive enumeration"),
            NisCertificate::SymbolicGrid => write!(f, "full determinant grid"),
            NisCertificate::Probabilistic { trials } => {
                write!(f, "probabilistic ({trials} trials)")
            }
            NisCertificate::Direct => write!(f, "direct witness"),
        }
    }
}

/// Searches a form space for a nondegenerate member.
///
/// Over a finite field with |F|^dim(space) <= 2^24 the search is exhaustive
/// (projective enumeration), so a "none" answer is a certificate. Over the
/// rationals a full evaluation grid larger than the determinant degree gives
/// the same guarantee for spaces of dimension <= 3; otherwise the verdict
/// falls back to seeded sampling and is flagged probabilistic.
pub fn find_nis(field: &Field, space: &FormSpace) -> NisResult {
    let s = space.dim();
    if s == 0 {
        return NisResult {
            form: None,
            certificate: NisCertificate::EmptySpace,
        };
    }
    let n = space.basis[0].dim();

    // common radical: kernel shared by all Gram matrices
    let mut stacked: Vec<SparseVec> = Vec::new();
    for b in &space.basis {
        let gt = b.gram.transpose();
        for i in 0..n {
            let row = gt.row_sparse(field, i);
            if !row.is_empty() {
                stacked.push(row);
            }
        }
    }
    let common = kernel_sparse(field, &stacked, n);
    if let Some(v) = common.first() {
        return NisResult {
            form: None,
            certificate: NisCertificate::CommonRadical(v.clone()),
        };
    }

    if let Some(q) = field.order() {
        let total = (q as f64).powi(s as i32);
        if total <= (1u64 << 24) as f64 {
            let elems = field.elements();
            // projective enumeration: leading coefficient 1
            for lead in 0..s {
                let tail = s - lead - 1;
                let count = (q as u128).pow(tail as u32);
                for idx in 0..count {
                    let mut coeffs = vec![field.zero(); s];
                    coeffs[lead] = field.one();
                    let mut v = idx;
                    for t in 0..tail {
                        coeffs[lead + 1 + t] = elems[(v % q as u128) as usize].clone();
                        v /= q as u128;
                    }
                    let form = space.combine(field, &coeffs);
                    if !field.is_zero(&form.gram.det(field)) {
                        return NisResult {
                            form: Some(form),
                            certificate: NisCertificate::Exhaustive,
                        };
                    }
                }
            }
            return NisResult {
                form: None,
                certificate: NisCertificate::Exhaustive,
            };
        }
    } else {
        // rationals: full grid {0..n}^s minus 0 certifies when s small
        let grid = (n as u128 + 1).pow(s.min(4) as u32);
        if s <= 3 && grid <= 200_000 {
            let mut coeffs = vec![field.zero(); s];
            let mut idx = 0u128;
            let total = (n as u128 + 1).pow(s as u32);
            while idx < total {
                let mut v = idx;
                for c in coeffs.iter_mut() {
                    *c = field.from_int((v % (n as u128 + 1)) as i64);
                    v /= n as u128 + 1;
                }
                idx += 1;
                if coeffs.iter().all(|c| field.is_zero(c)) {
                    continue;
                }
                let form = space.combine(field, &coeffs);
                if !field.is_zero(&form.gram.det(field)) {
                    return NisResult {
                        form: Some(form),
                        certificate: NisCertificate::SymbolicGrid,
                    };
                }
            }
            return NisResult {
                form: None,
                certificate: NisCertificate::SymbolicGrid,
            };
        }
    }

    // probabilistic fallback
    let trials = 64;
    let mut rng = SplitMix64::new(0x415E);
    for _ in 0..trials {
        let coeffs: Vec<Scalar> = (0..s).map(|_| field.sample(&mut rng, 16)).collect();
        if coeffs.iter().all(|c| field.is_zero(c)) {
            continue;
        }
        let form = space.combine(field, &coeffs);
        if !field.is_zero(&form.gram.det(field)) {
            return NisResult {
                form: Some(form),
                certificate: NisCertificate::Direct,
            };
        }
    }
    NisResult {
        form: None,
        certificate: NisCertificate::Probabilistic { trials },
    }
}

/// Radical of an invariant form; must come out an ideal, anything else
/// signals a broken form and is reported as an error.
pub fn form_radical(alg: &SuperAlgebra, form: &BilinearForm) -> Result<Subspace, String> {
    let f = &alg.field;
    let left_kernel = form.gram.transpose().kernel(f);
    let vecs: Vec<SparseVec> = left_kernel
        .iter()
        .map(|v| crate::linalg::sv_from_dense(f, v))
        .collect();
    let sub = alg.homogeneous_subspace(&vecs);
    alg.is_ideal(&sub)
        .map_err(|e| format!("form radical is not an ideal: {e}"))?;
    Ok(sub)
}

#[derive(Clone, Debug)]
pub struct GradedPairingReport {
    pub top: i64,
    pub depth: i64,
    /// Pairs of degrees (i, j) with i + j != top - depth but B(g_i, g_j) != 0.
    pub pairing_violations: Vec<(i64, i64)>,
    /// Degrees i with dim g_i != dim g_{top-depth-i}.
    pub dim_violations: Vec<i64>,
}

impl GradedPairingReport {
    pub fn pass(&self) -> bool {
        self.pairing_violations.is_empty() && self.dim_violations.is_empty()
    }
}

/// Checks the graded-pairing constraints for a graded algebra with a form:
/// components pair only across i + j = top - depth, and dim g_i must equal
/// dim g_{top-depth-i}.
pub fn graded_pairing_check(alg: &SuperAlgebra, form: &BilinearForm) -> GradedPairingReport {
    let comps = alg.graded_components();
    let f = &alg.field;
    let top = *comps.keys().max().unwrap_or(&0);
    let depth = -*comps.keys().min().unwrap_or(&0);
    let target = top - depth;
    let mut pairing_violations = Vec::new();
    for (di, idxs_i) in &comps {
        for (dj, idxs_j) in &comps {
            if di + dj == target {
                continue;
            }
            let mut nonzero = false;
            'outer: for &i in idxs_i {
                for &j in idxs_j {
                    if !f.is_zero(form.gram.at(i, j)) {
                        nonzero = true;
                        break 'outer;
                    }
                }
            }
            if nonzero {
                pairing_violations.push((*di, *dj));
            }
        }
    }
    let mut dim_violations = Vec::new();
    for (di, idxs_i) in &comps {
        let mirror = target - di;
        let dim_mirror = comps.get(&mirror).map_or(0, |v| v.len());
        if idxs_i.len() != dim_mirror {
            dim_violations.push(*di);
        }
    }
    GradedPairingReport {
        top,
        depth,
        pairing_violations,
        dim_violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::test_algebras::{heisenberg, sl2};
    use crate::algebra::{BasisElem, SuperAlgebra};

    fn abelian(field: &Field, n: usize) -> SuperAlgebra {
        SuperAlgebra::new(
            field.clone(),
            (0..n).map(|i| BasisElem::even(format!("e{i}"))).collect(),
            vec![],
            None,
        )
        .unwrap()
    }

    #[test]
    fn abelian_forms_count() {
        let f = Field::Q;
        for n in 1..5 {
            let alg = abelian(&f, n);
            let space = invariant_forms(&alg, 0);
            assert_eq!(space.dim(), n * (n + 1) / 2);
        }
    }

    /// Independent oracle for the Heisenberg case: brute-force the 6-variable
    /// symmetric system B([x,y],z) = B(x,[y,z]) by hand-expanded equations.
    /// With [x,y] = z the constraints are B(z,x) = B(z,y) = B(z,z) = 0,
    /// leaving the 3 variables B(x,x), B(x,y), B(y,y): dimension 3, and z
    /// lies in the radical of every member.
    #[test]
    fn heisenberg_form_space() {
        let f = Field::Q;
        let alg = heisenberg(&f);
        let space = invariant_forms(&alg, 0);
        assert_eq!(space.dim(), 3);
        for b in &space.basis {
            // z = e2 is in the kernel of every member
            for j in 0..3 {
                assert!(f.is_zero(b.gram.at(2, j)));
                assert!(f.is_zero(b.gram.at(j, 2)));
            }
            assert!(b.invariance_violation(&alg).is_none());
        }
    }

    #[test]
    fn sl2_unique_form_is_trace_form() {
        let f = Field::Q;
        let alg = sl2(&f);
        let space = invariant_forms(&alg, 0);
        assert_eq!(space.dim(), 1);
        let b = &space.basis[0];
        // proportional to the trace form: on (e,h,f) basis the trace form
        // of the defining rep is B(e,f)=1, B(h,h)=2, rest of pairings 0
        let c = b.gram.at(0, 2).clone(); // B(e,f)
        assert!(!f.is_zero(&c));
        let ratio = f.div(b.gram.at(1, 1), &c).unwrap();
        assert_eq!(ratio, f.from_int(2));
        assert!(f.is_zero(b.gram.at(0, 1)));
        assert!(f.is_zero(b.gram.at(0, 0)));
    }

    #[test]
    fn find_nis_sl2_and_heisenberg() {
        let f = Field::Q;
        let space = invariant_forms(&sl2(&f), 0);
        let res = find_nis(&f, &space);
        assert!(res.form.is_some());

        let f3 = Field::gf(3, 1);
        let h3 = heisenberg(&f3);
        let space = invariant_forms(&h3, 0);
        let res = find_nis(&f3, &space);
        assert!(res.form.is_none());
        // z in the common radical gives a certificate
        assert!(matches!(res.certificate, NisCertificate::CommonRadical(_)));
    }

    #[test]
    fn radical_of_sl2_form_is_zero() {
        let f = Field::Q;
        let alg = sl2(&f);
        let space = invariant_forms(&alg, 0);
        let rad = form_radical(&alg, &space.basis[0]).unwrap();
        assert_eq!(rad.dim(), 0);
    }

    #[test]
    fn graded_pairing_sl2() {
        let f = Field::Q;
        let alg = sl2(&f);
        let space = invariant_forms(&alg, 0);
        let report = graded_pairing_check(&alg, &space.basis[0]);
        assert!(report.pass());
        assert_eq!(report.top - report.depth, 0);
    }

    #[test]
    fn graded_pairing_negative_control() {
        let f = Field::Q;
        let alg = sl2(&f);
        let mut form = invariant_forms(&alg, 0).basis[0].clone();
        // corrupt: pair degree 1 with degree 1
        *form.gram.at_mut(0, 0) = f.one();
        let report = graded_pairing_check(&alg, &form);
        assert!(!report.pass());
        assert!(report.pairing_violations.contains(&(1, 1)));
    }

    #[test]
    fn form_space_dim_invariant_under_permutation() {
        // rebuild sl2 with basis order (h, f, e)
        let f = Field::Q;
        let alg = SuperAlgebra::new(
            f.clone(),
            vec![
                BasisElem::even("h"),
                BasisElem::even("f"),
                BasisElem::even("e"),
            ],
            vec![
                (0, 2, vec![(2, f.from_int(2))]),
                (0, 1, vec![(1, f.from_int(-2))]),
                (2, 1, vec![(0, f.one())]),
            ],
            None,
        )
        .unwrap();
        assert!(alg.check_jacobi(crate::algebra::JacobiMode::All).is_empty());
        assert_eq!(invariant_forms(&alg, 0).dim(), 1);
    }
}
