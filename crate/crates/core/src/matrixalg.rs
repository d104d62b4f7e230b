//! Matrix Lie superalgebras in the standard format, their supertrace and
//! queertrace forms, and the 4|4-dimensional representation family of the
//! central extension of spe(4).

use crate::algebra::{AlgebraError, BasisElem, Subspace, SuperAlgebra};
use crate::forms::BilinearForm;
use crate::linalg::{Echelon, Mat, SparseVec};
use crate::scalar::{Field, Scalar};


/// A matrix realization: the abstract algebra plus its basis matrices in
/// gl(Par) and, for the aut-families, the preserved form matrix.
#[derive(Clone, Debug)]
pub struct MatrixAlgebra {
    pub alg: SuperAlgebra,
    pub mats: Vec<Mat>,
    pub par: Vec<u8>,
    /// (matrix of the preserved bilinear form, its parity), for osp/pe/spe.
    pub preserved: Option<(Mat, u8)>,
}

/// Parity of the (i,j) matrix position in format `par`.
fn pos_parity(par: &[u8], i: usize, j: usize) -> u8 {
    (par[i] + par[j]) % 2
}

/// Supertranspose: (X^st)_{ij} = (-1)^{(p_i + p_j) p_j} X_{ji}.
pub fn supertranspose(field: &Field, par: &[u8], x: &Mat) -> Mat {
    let n = par.len();
    let mut out = Mat::zero(field, n, n);
    for i in 0..n {
        for j in 0..n {
            let v = x.at(j, i).clone();
            let sign = ((par[i] + par[j]) * par[j]) % 2 == 1;
            *out.at_mut(i, j) = if sign { field.neg(&v) } else { v };
        }
    }
    out
}

/// Supertrace sum (-1)^{p_i} X_ii.
pub fn supertrace(field: &Field, par: &[u8], x: &Mat) -> Scalar {
    let mut acc = field.zero();
    for i in 0..par.len() {
        let d = x.at(i, i);
        acc = if par[i] == 1 {
            field.sub(&acc, d)
        } else {
            field.add(&acc, d)
        };
    }
    acc
}

/// Queertrace on the (A,B) block form: trace of the upper-right block.
pub fn queertrace(field: &Field, n: usize, x: &Mat) -> Scalar {
    let mut acc = field.zero();
    for i in 0..n {
        acc = field.add(&acc, x.at(i, n + i));
    }
    acc
}

/// Super commutator [x, y] = xy - (-1)^{p(x)p(y)} yx of homogeneous matrices.
pub fn super_commutator(field: &Field, x: &Mat, px: u8, y: &Mat, py: u8) -> Mat {
    let xy = x.mul(field, y);
    let yx = y.mul(field, x);
    if px == 1 && py == 1 {
        xy.add(field, &yx)
    } else {
        xy.add(field, &yx.neg(field))
    }
}

/// Membership in aut(B): X^st B + (-1)^{p(X)p(B)} B X = 0.
pub fn aut_b_violation(
    field: &Field,
    par: &[u8],
    b: &Mat,
    pb: u8,
    x: &Mat,
    px: u8,
) -> bool {
    let lhs = supertranspose(field, par, x).mul(field, b);
    let bx = b.mul(field, x);
    let total = if (px * pb) % 2 == 1 {
        lhs.add(field, &bx.neg(field))
    } else {
        lhs.add(field, &bx)
    };
    !total.is_zero(field)
}

fn vectorize(field: &Field, m: &Mat) -> SparseVec {
    m.data
        .iter()
        .enumerate()
        .filter(|(_, s)| !field.is_zero(s))
        .map(|(i, s)| (i, s.clone()))
        .collect()
}

/// Builds the abstract algebra from homogeneous basis matrices by expressing
/// each super commutator back in the basis.
fn algebra_from_matrices(
    field: &Field,
    par: &[u8],
    named: &[(String, Mat, u8)],
) -> Result<SuperAlgebra, AlgebraError> {
    let ncells = par.len() * par.len();
    let mut ech = Echelon::new(field);
    for (idx, (_, m, _)) in named.iter().enumerate() {
        let mut row = vectorize(field, m);
        row.push((ncells + idx, field.one()));
        ech.insert(row);
    }
    let express = |m: &Mat| -> Option<SparseVec> {
        let reduced = ech.reduce(vectorize(field, m));
        if reduced.iter().any(|(i, _)| *i < ncells) {
            return None;
        }
        let mut out: SparseVec = reduced
            .into_iter()
            .map(|(i, c)| (i - ncells, field.neg(&c)))
            .collect();
        out.sort_by_key(|(i, _)| *i);
        Some(out)
    };
    let n = named.len();
    let mut raw = Vec::new();
    for i in 0..n {
        for j in i..n {
            let (ref _ni, ref mi, pi) = named[i];
            let (ref _nj, ref mj, pj) = named[j];
            if i == j && !(pi == 1 && field.characteristic() != 2) {
                continue;
            }
            let br = super_commutator(field, mi, pi, mj, pj);
            if br.is_zero(field) {
                continue;
            }
            let vec = express(&br).ok_or(AlgebraError::NotClosed { i, j })?;
            raw.push((i, j, vec));
        }
    }
    let basis = named
        .iter()
        .map(|(name, _, p)| BasisElem {
            name: name.clone(),
            parity: *p,
            degree: None,
        })
        .collect();
    SuperAlgebra::new(field.clone(), basis, raw, None)
}

fn unit_matrix(field: &Field, n: usize, i: usize, j: usize) -> Mat {
    let mut m = Mat::zero(field, n, n);
    *m.at_mut(i, j) = field.one();
    m
}

/// Standard format parities: m zeros then n ones.
pub fn standard_format(m: usize, n: usize) -> Vec<u8> {
    let mut par = vec![0u8; m];
    par.extend(vec![1u8; n]);
    par
}

pub fn gl(field: &Field, m: usize, n: usize) -> MatrixAlgebra {
    let par = standard_format(m, n);
    let d = m + n;
    let mut named = Vec::new();
    for i in 0..d {
        for j in 0..d {
            named.push((
                format!("E{}{}", i + 1, j + 1),
                unit_matrix(field, d, i, j),
                pos_parity(&par, i, j),
            ));
        }
    }
    let alg = algebra_from_matrices(field, &par, &named)
        .expect("gl closes")
        .with_meta("gl", &[("m", m.to_string()), ("n", n.to_string())]);
    MatrixAlgebra {
        alg,
        mats: named.into_iter().map(|(_, m, _)| m).collect(),
        par,
        preserved: None,
    }
}

pub fn sl(field: &Field, m: usize, n: usize) -> MatrixAlgebra {
    let par = standard_format(m, n);
    let d = m + n;
    let mut named = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                named.push((
                    format!("E{}{}", i + 1, j + 1),
                    unit_matrix(field, d, i, j),
                    pos_parity(&par, i, j),
                ));
            }
        }
    }
    // supertraceless diagonal: E_ii - (-1)^{p_i+p_{i+1}} E_{i+1,i+1}
    for i in 0..d - 1 {
        let mut mat = unit_matrix(field, d, i, i);
        let sign = if (par[i] + par[i + 1]) % 2 == 1 {
            field.one()
        } else {
            field.from_int(-1)
        };
        *mat.at_mut(i + 1, i + 1) = sign;
        named.push((format!("H{}", i + 1), mat, 0));
    }
    let alg = algebra_from_matrices(field, &par, &named)
        .expect("sl closes")
        .with_meta("sl", &[("m", m.to_string()), ("n", n.to_string())]);
    MatrixAlgebra {
        alg,
        mats: named.into_iter().map(|(_, m, _)| m).collect(),
        par,
        preserved: None,
    }
}

/// psl(n|n): sl(n|n) modulo scalars. Matrices kept are representatives.
pub fn psl(field: &Field, n: usize) -> MatrixAlgebra {
    let slnn = sl(field, n, n);
    quotient_by_identity(field, slnn, "psl")
}

fn quotient_by_identity(field: &Field, parent: MatrixAlgebra, series: &str) -> MatrixAlgebra {
    let d = parent.par.len();
    let ident = Mat::identity(field, d);
    // express identity in the parent basis
    let mut ech = Echelon::new(field);
    let ncells = d * d;
    for (idx, m) in parent.mats.iter().enumerate() {
        let mut row = vectorize(field, m);
        row.push((ncells + idx, field.one()));
        ech.insert(row);
    }
    let reduced = ech.reduce(vectorize(field, &ident));
    assert!(
        reduced.iter().all(|(i, _)| *i >= ncells),
        "identity must lie in the parent algebra"
    );
    let ident_coords: SparseVec = {
        let mut v: SparseVec = reduced
            .into_iter()
            .map(|(i, c)| (i - ncells, field.neg(&c)))
            .collect();
        v.sort_by_key(|(i, _)| *i);
        v
    };
    let ideal = Subspace::from_vectors(field, parent.alg.dim(), &[ident_coords]);
    let quotient = parent
        .alg
        .quotient(&ideal)
        .expect("scalars are central")
        .with_meta(series, &[]);
    // representative matrices: the non-pivot coordinates of the parent
    let pivot: std::collections::BTreeSet<usize> =
        ideal.echelon(field).pivots().into_iter().collect();
    let mats: Vec<Mat> = (0..parent.alg.dim())
        .filter(|i| !pivot.contains(i))
        .map(|i| parent.mats[i].clone())
        .collect();
    MatrixAlgebra {
        alg: quotient,
        mats,
        par: parent.par,
        preserved: parent.preserved,
    }
}

/// Queer superalgebra q(n) in the block form (A,B) -> [[A,B],[B,A]].
pub fn q(field: &Field, n: usize) -> MatrixAlgebra {
    let par = standard_format(n, n);
    let d = 2 * n;
    let mut named = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut even = unit_matrix(field, d, i, j);
            *even.at_mut(n + i, n + j) = field.one();
            named.push((format!("A{}{}", i + 1, j + 1), even, 0));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut odd = unit_matrix(field, d, i, n + j);
            *odd.at_mut(n + i, j) = field.one();
            named.push((format!("B{}{}", i + 1, j + 1), odd, 1));
        }
    }
    let alg = algebra_from_matrices(field, &par, &named)
        .expect("q closes")
        .with_meta("q", &[("n", n.to_string())]);
    MatrixAlgebra {
        alg,
        mats: named.into_iter().map(|(_, m, _)| m).collect(),
        par,
        preserved: None,
    }
}

/// sq(n): queertraceless subalgebra of q(n).
pub fn sq(field: &Field, n: usize) -> MatrixAlgebra {
    let par = standard_format(n, n);
    let d = 2 * n;
    let mut named = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut even = unit_matrix(field, d, i, j);
            *even.at_mut(n + i, n + j) = field.one();
            named.push((format!("A{}{}", i + 1, j + 1), even, 0));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j && i == n - 1 {
                continue;
            }
            let mut odd = unit_matrix(field, d, i, n + j);
            *odd.at_mut(n + i, j) = field.one();
            if i == j {
                // B_ii - B_nn to make tr B = 0
                *odd.at_mut(n - 1, d - 1) = field.from_int(-1);
                *odd.at_mut(d - 1, n - 1) = field.from_int(-1);
            }
            named.push((format!("B{}{}", i + 1, j + 1), odd, 1));
        }
    }
    let alg = algebra_from_matrices(field, &par, &named)
        .expect("sq closes")
        .with_meta("sq", &[("n", n.to_string())]);
    MatrixAlgebra {
        alg,
        mats: named.into_iter().map(|(_, m, _)| m).collect(),
        par,
        preserved: None,
    }
}

/// psq(n) = sq(n) / scalars. When the characteristic divides n the quotient
/// is still taken; simplicity just fails there.
pub fn psq(field: &Field, n: usize) -> MatrixAlgebra {
    quotient_by_identity(field, sq(field, n), "psq")
}

/// J_{2n} = antidiag(1_n, -1_n).
pub fn j_matrix(field: &Field, n: usize) -> Mat {
    let mut m = Mat::zero(field, 2 * n, 2 * n);
    for i in 0..n {
        *m.at_mut(i, n + i) = field.one();
        *m.at_mut(n + i, i) = field.from_int(-1);
    }
    m
}

/// Pi_{2n} = antidiag(1_n, 1_n).
pub fn pi_matrix(field: &Field, n: usize) -> Mat {
    let mut m = Mat::zero(field, 2 * n, 2 * n);
    for i in 0..n {
        *m.at_mut(i, n + i) = field.one();
        *m.at_mut(n + i, i) = field.one();
    }
    m
}

/// Generic aut(B) algebra: all homogeneous solutions of
/// X^st B + (-1)^{p(X)p(B)} B X = 0.
fn aut_b(
    field: &Field,
    par: &[u8],
    b: &Mat,
    pb: u8,
    series: &str,
    extra_traceless: bool,
) -> MatrixAlgebra {
    let d = par.len();
    let mut named = Vec::new();
    for sigma in [0u8, 1u8] {
        // unknown positions of parity sigma
        let positions: Vec<(usize, usize)> = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter(|(i, j)| pos_parity(par, *i, *j) == sigma)
            .collect();
        let mut rows: Vec<SparseVec> = vec![Vec::new(); d * d];
        for (u, (i, j)) in positions.iter().enumerate() {
            let x = unit_matrix(field, d, *i, *j);
            let lhs = supertranspose(field, par, &x).mul(field, b);
            let bx = b.mul(field, &x);
            let total = if (sigma * pb) % 2 == 1 {
                lhs.add(field, &bx.neg(field))
            } else {
                lhs.add(field, &bx)
            };
            for (cell, v) in total.data.iter().enumerate() {
                if !field.is_zero(v) {
                    rows[cell].push((u, v.clone()));
                }
            }
        }
        // supertrace row when requested (even block only)
        if extra_traceless && sigma == 0 {
            let mut row = SparseVec::new();
            for (u, (i, j)) in positions.iter().enumerate() {
                if i == j {
                    let s = if par[*i] == 1 {
                        field.from_int(-1)
                    } else {
                        field.one()
                    };
                    row.push((u, s));
                }
            }
            rows.push(row);
        }
        let kernel = crate::linalg::kernel_sparse(field, &rows, positions.len());
        for (knum, kv) in kernel.iter().enumerate() {
            let mut m = Mat::zero(field, d, d);
            for (u, c) in kv.iter().enumerate() {
                if !field.is_zero(c) {
                    let (i, j) = positions[u];
                    *m.at_mut(i, j) = c.clone();
                }
            }
            named.push((
                format!("{}{}_{}", if sigma == 0 { "x" } else { "y" }, sigma, knum),
                m,
                sigma,
            ));
        }
    }
    let alg = algebra_from_matrices(field, par, &named)
        .unwrap_or_else(|e| panic!("{series} closes under bracket: {e}"))
        .with_meta(series, &[]);
    MatrixAlgebra {
        alg,
        mats: named.into_iter().map(|(_, m, _)| m).collect(),
        par: par.to_vec(),
        preserved: Some((b.clone(), pb)),
    }
}

/// osp(m|2n): aut of the even form diag(1_m, J_{2n}).
pub fn osp(field: &Field, m: usize, n: usize) -> MatrixAlgebra {
    let par = standard_format(m, 2 * n);
    let d = m + 2 * n;
    let mut b = Mat::zero(field, d, d);
    for i in 0..m {
        *b.at_mut(i, i) = field.one();
    }
    for i in 0..n {
        *b.at_mut(m + i, m + n + i) = field.one();
        *b.at_mut(m + n + i, m + i) = field.from_int(-1);
    }
    let mut out = aut_b(field, &par, &b, 0, "osp", false);
    out.alg.meta.params.insert("m".into(), m.to_string());
    out.alg.meta.params.insert("n".into(), n.to_string());
    out
}

/// pe(n): aut of the odd symmetric form J_{2n}.
pub fn pe(field: &Field, n: usize) -> MatrixAlgebra {
    let par = standard_format(n, n);
    let b = j_matrix(field, n);
    let mut out = aut_b(field, &par, &b, 1, "pe", false);
    out.alg.meta.params.insert("n".into(), n.to_string());
    out
}

/// spe(n): supertraceless part of pe(n).
pub fn spe(field: &Field, n: usize) -> MatrixAlgebra {
    let par = standard_format(n, n);
    let b = j_matrix(field, n);
    let mut out = aut_b(field, &par, &b, 1, "spe", true);
    out.alg.meta.params.insert("n".into(), n.to_string());
    out
}

/// spe(n) extended by a z + b d with z = 1_{2n}, d = diag(1_n, -1_n).
/// Characteristic must differ from 2.
pub fn spe_ab(field: &Field, n: usize, a: &Scalar, bcoef: &Scalar) -> MatrixAlgebra {
    assert!(field.characteristic() != 2, "spe_ab needs p != 2");
    let base = spe(field, n);
    let d = 2 * n;
    let mut ext = Mat::zero(field, d, d);
    for i in 0..n {
        *ext.at_mut(i, i) = field.add(a, bcoef);
        *ext.at_mut(n + i, n + i) = field.sub(a, bcoef);
    }
    let par = base.par.clone();
    let mut named: Vec<(String, Mat, u8)> = base
        .alg
        .basis
        .iter()
        .zip(&base.mats)
        .map(|(b, m)| (b.name.clone(), m.clone(), b.parity))
        .collect();
    named.push(("azbd".to_string(), ext, 0));
    let alg = algebra_from_matrices(field, &par, &named)
        .expect("spe_ab closes")
        .with_meta(
            "spe_ab",
            &[
                ("n", n.to_string()),
                ("a", field.format(a)),
                ("b", field.format(bcoef)),
            ],
        );
    MatrixAlgebra {
        alg,
        mats: named.into_iter().map(|(_, m, _)| m).collect(),
        par,
        preserved: base.preserved,
    }
}

/// The antisymmetric-realization spe(4) used by the central extension: block
/// elements [[a, b],[c, -a^t]] with b symmetric, c antisymmetric, tr a = 0.
fn spe4_anti_basis(field: &Field) -> Vec<(String, Mat, u8)> {
    let d = 8;
    let mut named = Vec::new();
    // a-part: traceless gl(4)
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            let mut m = Mat::zero(field, d, d);
            *m.at_mut(i, j) = field.one();
            *m.at_mut(4 + j, 4 + i) = field.from_int(-1);
            named.push((format!("a{}{}", i + 1, j + 1), m, 0));
        }
    }
    for i in 0..3 {
        let mut m = Mat::zero(field, d, d);
        *m.at_mut(i, i) = field.one();
        *m.at_mut(i + 1, i + 1) = field.from_int(-1);
        *m.at_mut(4 + i, 4 + i) = field.from_int(-1);
        *m.at_mut(4 + i + 1, 4 + i + 1) = field.one();
        named.push((format!("h{}", i + 1), m, 0));
    }
    // b-part: symmetric, upper-right block
    for i in 0..4 {
        for j in i..4 {
            let mut m = Mat::zero(field, d, d);
            *m.at_mut(i, 4 + j) = field.one();
            if i != j {
                *m.at_mut(j, 4 + i) = field.one();
            }
            named.push((format!("b{}{}", i + 1, j + 1), m, 1));
        }
    }
    // c-part: antisymmetric, lower-left block
    for i in 0..4 {
        for j in i + 1..4 {
            let mut m = Mat::zero(field, d, d);
            *m.at_mut(4 + i, j) = field.one();
            *m.at_mut(4 + j, i) = field.from_int(-1);
            named.push((format!("c{}{}", i + 1, j + 1), m, 1));
        }
    }
    named
}

/// The tilde involution on antisymmetric 4x4 matrices: on c_{ij} = E_ij-E_ji
/// it swaps complementary index pairs with the sign of the even permutation.
fn c_tilde(field: &Field, c: &Mat) -> Mat {
    // pairs (i,j) -> (k,l), 0-indexed, from even permutations of (1,2,3,4)
    const TABLE: [((usize, usize), (usize, usize), i64); 3] = [
        ((0, 1), (2, 3), 1),
        ((0, 2), (1, 3), -1),
        ((0, 3), (1, 2), 1),
    ];
    let mut out = Mat::zero(field, 4, 4);
    let mut put = |i: usize, j: usize, v: Scalar| {
        let cur = out.at(i, j).clone();
        *out.at_mut(i, j) = field.add(&cur, &v);
        let curj = out.at(j, i).clone();
        *out.at_mut(j, i) = field.sub(&curj, &v);
    };
    for ((i, j), (k, l), sign) in TABLE {
        let gamma_ij = c.at(i, j).clone();
        let gamma_kl = c.at(k, l).clone();
        let s = field.from_int(sign);
        put(k, l, field.mul(&gamma_ij, &s));
        put(i, j, field.mul(&gamma_kl, &s));
    }
    out
}

/// Sergeev-type central extension of spe(4): basis of the antisymmetric
/// realization plus a central z, with the odd-odd bracket acquiring
/// tr(c c~') z.
pub struct AsAlgebra {
    pub alg: SuperAlgebra,
    /// matrices of the non-central basis elements
    pub mats: Vec<Mat>,
    pub z_index: usize,
    pub par: Vec<u8>,
}

pub fn as4(field: &Field) -> AsAlgebra {
    let named = spe4_anti_basis(field);
    let par = standard_format(4, 4);
    let nb = named.len();
    let ncells = 64;
    let mut ech = Echelon::new(field);
    for (idx, (_, m, _)) in named.iter().enumerate() {
        let mut row = vectorize(field, m);
        row.push((ncells + idx, field.one()));
        ech.insert(row);
    }
    let express = |m: &Mat| -> SparseVec {
        let reduced = ech.reduce(vectorize(field, m));
        assert!(reduced.iter().all(|(i, _)| *i >= ncells), "not in spe(4)");
        let mut out: SparseVec = reduced
            .into_iter()
            .map(|(i, c)| (i - ncells, field.neg(&c)))
            .collect();
        out.sort_by_key(|(i, _)| *i);
        out
    };
    let lower_left = |m: &Mat| -> Mat {
        let mut c = Mat::zero(field, 4, 4);
        for i in 0..4 {
            for j in 0..4 {
                *c.at_mut(i, j) = m.at(4 + i, j).clone();
            }
        }
        c
    };
    let mut raw = Vec::new();
    for i in 0..nb {
        for j in i..nb {
            let (_, ref mi, pi) = named[i];
            let (_, ref mj, pj) = named[j];
            if i == j && pi == 0 {
                continue;
            }
            let br = super_commutator(field, mi, pi, mj, pj);
            let mut vec = if br.is_zero(field) {
                SparseVec::new()
            } else {
                express(&br)
            };
            if pi == 1 && pj == 1 {
                // cocycle proportional to tr(c_i c~_j); the -1/2 scaling of
                // z makes the lambda-family of 4|4 representations send z to
                // lambda times the identity exactly
                let ci = lower_left(mi);
                let cj_t = c_tilde(field, &lower_left(mj));
                let prod = ci.mul(field, &cj_t);
                let mut tr = field.zero();
                for t in 0..4 {
                    tr = field.add(&tr, prod.at(t, t));
                }
                let half = field
                    .inv(&field.from_int(-2))
                    .expect("characteristic is not 2 here");
                let tr = field.mul(&tr, &half);
                if !field.is_zero(&tr) {
                    vec.push((nb, tr)); // z component
                    vec.sort_by_key(|(k, _)| *k);
                }
            }
            if !vec.is_empty() {
                raw.push((i, j, vec));
            }
        }
    }
    let mut basis: Vec<BasisElem> = named
        .iter()
        .map(|(name, _, p)| BasisElem {
            name: name.clone(),
            parity: *p,
            degree: None,
        })
        .collect();
    basis.push(BasisElem::even("z"));
    let alg = SuperAlgebra::new(field.clone(), basis, raw, None)
        .expect("as(4) is a central extension")
        .with_meta("as", &[]);
    AsAlgebra {
        alg,
        mats: named.into_iter().map(|(_, m, _)| m).collect(),
        z_index: nb,
        par,
    }
}

/// The lambda-family of 4|4 representations of as(4):
/// [[a,b],[c,-a^t]] + d z -> [[a, b - lambda c~],[c, -a^t]] + lambda d 1.
pub fn t_lambda(field: &Field, asalg: &AsAlgebra, lambda: &Scalar) -> Vec<Mat> {
    let mut out = Vec::new();
    for m in &asalg.mats {
        let mut t = m.clone();
        let mut c = Mat::zero(field, 4, 4);
        for i in 0..4 {
            for j in 0..4 {
                *c.at_mut(i, j) = m.at(4 + i, j).clone();
            }
        }
        let ct = c_tilde(field, &c);
        for i in 0..4 {
            for j in 0..4 {
                let cur = t.at(i, 4 + j).clone();
                let sub = field.mul(lambda, ct.at(i, j));
                *t.at_mut(i, 4 + j) = field.sub(&cur, &sub);
            }
        }
        out.push(t);
    }
    // z maps to lambda * identity
    out.push(Mat::identity(field, 8).scale(field, lambda));
    out
}

/// Supertrace form B(x,y) = str(xy) on a matrix realization.
pub fn str_form(field: &Field, malg: &MatrixAlgebra) -> BilinearForm {
    let n = malg.mats.len();
    let mut gram = Mat::zero(field, n, n);
    for i in 0..n {
        for j in 0..n {
            let prod = malg.mats[i].mul(field, &malg.mats[j]);
            *gram.at_mut(i, j) = supertrace(field, &malg.par, &prod);
        }
    }
    BilinearForm { parity: 0, gram }
}

/// Queertrace form B(x,y) = qtr(xy) on a q-family realization; this form is
/// odd.
pub fn qtr_form(field: &Field, malg: &MatrixAlgebra) -> BilinearForm {
    let n2 = malg.par.len() / 2;
    let n = malg.mats.len();
    let mut gram = Mat::zero(field, n, n);
    for i in 0..n {
        for j in 0..n {
            let prod = malg.mats[i].mul(field, &malg.mats[j]);
            *gram.at_mut(i, j) = queertrace(field, n2, &prod);
        }
    }
    BilinearForm { parity: 1, gram }
}

/// Trace form B(x,y) = tr(xy) of a plain matrix algebra (gl(n) over GF(p)
/// etc., with all parities even).
pub fn tr_form(field: &Field, malg: &MatrixAlgebra) -> BilinearForm {
    let n = malg.mats.len();
    let mut gram = Mat::zero(field, n, n);
    for i in 0..n {
        for j in 0..n {
            let prod = malg.mats[i].mul(field, &malg.mats[j]);
            let mut tr = field.zero();
            for t in 0..prod.nrows {
                tr = field.add(&tr, prod.at(t, t));
            }
            *gram.at_mut(i, j) = tr;
        }
    }
    BilinearForm { parity: 0, gram }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::JacobiMode;
    use crate::forms::{form_radical, invariant_forms};

    #[test]
    fn gl11_structure() {
        let f = Field::Q;
        let g = gl(&f, 1, 1);
        assert_eq!(g.alg.sdim(), (2, 2));
        // [E12, E21] = E11 + E22 (anticommutator of odd elements)
        let i12 = g.alg.index_of("E12").unwrap();
        let i21 = g.alg.index_of("E21").unwrap();
        let i11 = g.alg.index_of("E11").unwrap();
        let i22 = g.alg.index_of("E22").unwrap();
        let br = g.alg.bracket_basis(i12, i21);
        assert_eq!(br, vec![(i11, f.one()), (i22, f.one())]);
        assert!(g.alg.check_jacobi(JacobiMode::All).is_empty());
    }

    #[test]
    fn q2_dimensions() {
        let f = Field::Q;
        let g = q(&f, 2);
        assert_eq!(g.alg.sdim(), (4, 4));
        assert!(g.alg.check_jacobi(JacobiMode::All).is_empty());
    }

    #[test]
    fn sq2_quotient_is_psq2() {
        let f = Field::Q;
        let g = psq(&f, 2);
        assert_eq!(g.alg.sdim(), (3, 3));
        assert!(g.alg.check_jacobi(JacobiMode::All).is_empty());
    }

    #[test]
    fn as4_dimension_and_cocycle() {
        let f = Field::Q;
        let a = as4(&f);
        // dim spe(4) + 1 = 32
        assert_eq!(a.alg.dim(), 32);
        assert_eq!(a.alg.sdim(), (16, 16));
        assert!(a.alg.check_jacobi(JacobiMode::All).is_empty());
        // two c-type elements must produce a z component
        let i = a.alg.index_of("c12").unwrap();
        let j = a.alg.index_of("c34").unwrap();
        let br = a.alg.bracket_basis(i, j);
        assert!(
            br.iter().any(|(k, _)| *k == a.z_index),
            "c12,c34 bracket should hit z"
        );
    }

    #[test]
    fn t_lambda_is_homomorphism() {
        let f = Field::Q;
        let a = as4(&f);
        let par = standard_format(4, 4);
        for lam in [f.zero(), f.one(), f.from_int(2)] {
            let reps = t_lambda(&f, &a, &lam);
            // check T[x,y] = [Tx,Ty] over all basis pairs
            for i in 0..a.alg.dim() {
                for j in 0..a.alg.dim() {
                    let br = a.alg.bracket_basis(i, j);
                    let mut expected = Mat::zero(&f, 8, 8);
                    for (k, c) in &br {
                        expected = expected.add(&f, &reps[*k].scale(&f, c));
                    }
                    let got = super_commutator(
                        &f,
                        &reps[i],
                        a.alg.parity(i),
                        &reps[j],
                        a.alg.parity(j),
                    );
                    assert_eq!(got, expected, "pair ({i},{j}), lambda={:?}", lam);
                }
            }
            // z maps to lambda * identity
            let z = &reps[a.z_index];
            assert_eq!(*z, Mat::identity(&f, 8).scale(&f, &lam));
        }
    }

    #[test]
    fn str_vanishes_on_derived() {
        let f = Field::Q;
        let g = gl(&f, 2, 1);
        let (_, rows) = g.alg.derived_algebra();
        for row in rows {
            let mut m = Mat::zero(&f, 3, 3);
            for (i, c) in &row {
                m = m.add(&f, &g.mats[*i].scale(&f, c));
            }
            assert!(f.is_zero(&supertrace(&f, &g.par, &m)));
        }
    }

    #[test]
    fn qtr_vanishes_on_derived() {
        let f = Field::Q;
        let g = q(&f, 2);
        let (_, rows) = g.alg.derived_algebra();
        for row in rows {
            let mut m = Mat::zero(&f, 4, 4);
            for (i, c) in &row {
                m = m.add(&f, &g.mats[*i].scale(&f, c));
            }
            assert!(f.is_zero(&queertrace(&f, 2, &m)));
        }
    }

    #[test]
    fn osp_and_pe_satisfy_aut_equation() {
        let f = Field::Q;
        for malg in [osp(&f, 1, 1), osp(&f, 2, 1), pe(&f, 2), spe(&f, 3)] {
            let (b, pb) = malg.preserved.clone().unwrap();
            for (m, be) in malg.mats.iter().zip(&malg.alg.basis) {
                assert!(!aut_b_violation(&f, &malg.par, &b, pb, m, be.parity));
            }
            assert!(malg.alg.check_jacobi(JacobiMode::All).is_empty());
        }
    }

    #[test]
    fn classical_dimensions() {
        let f = Field::Q;
        assert_eq!(osp(&f, 1, 1).alg.sdim(), (3, 2));
        assert_eq!(osp(&f, 2, 1).alg.sdim(), (4, 4));
        assert_eq!(pe(&f, 2).alg.sdim(), (4, 4));
        assert_eq!(spe(&f, 4).alg.sdim(), (15, 16));
        assert_eq!(sl(&f, 2, 2).alg.sdim(), (7, 8));
        assert_eq!(psl(&f, 2).alg.sdim(), (6, 8));
    }

    #[test]
    fn gl_nn_trace_form_nondegenerate_sl_nn_radical_scalars() {
        // str(xy) pairs E_ij with E_ji perfectly on gl(n|n); the radical
        // becomes the scalars only after restricting to sl(n|n).
        let f = Field::Q;
        let g = gl(&f, 2, 2);
        let b = str_form(&f, &g);
        assert!(b.is_nondegenerate(&f));
        let s = sl(&f, 2, 2);
        let bs = str_form(&f, &s);
        let rad = form_radical(&s.alg, &bs).unwrap();
        assert_eq!(rad.dim(), 1);
        // the radical vector is a multiple of the identity matrix
        let v = &rad.rows[0];
        let mut m = Mat::zero(&f, 4, 4);
        for (i, c) in v {
            m = m.add(&f, &s.mats[*i].scale(&f, c));
        }
        let scaled = Mat::identity(&f, 4).scale(&f, m.at(0, 0));
        assert_eq!(m, scaled);
    }

    #[test]
    fn sl_mn_trace_form_nondegenerate() {
        let f = Field::Q;
        let g = sl(&f, 2, 1);
        let b = str_form(&f, &g);
        assert!(b.is_nondegenerate(&f));
        assert!(b.invariance_violation(&g.alg).is_none());
    }

    #[test]
    fn q2_queertrace_form_is_odd_nis() {
        let f = Field::Q;
        let g = q(&f, 2);
        let b = qtr_form(&f, &g);
        assert!(b.check_shape(&g.alg).is_ok());
        assert!(b.invariance_violation(&g.alg).is_none());
        assert!(b.is_nondegenerate(&f));
        // spot value: B((A,0),(0,B')) = tr(A B')
        let a11 = g.alg.index_of("A11").unwrap();
        let b11 = g.alg.index_of("B11").unwrap();
        assert_eq!(*b.gram.at(a11, b11), f.one());
    }

    #[test]
    fn spe_ab_closes() {
        let f = Field::Q;
        let g = spe_ab(&f, 3, &f.one(), &f.from_int(2));
        assert!(g.alg.check_jacobi(JacobiMode::All).is_empty());
        assert_eq!(g.alg.dim(), spe(&f, 3).alg.dim() + 1);
    }

    #[test]
    fn sl22_str_radical_is_identity_span() {
        let f = Field::Q;
        let g = sl(&f, 2, 2);
        let b = str_form(&f, &g);
        let rad = form_radical(&g.alg, &b).unwrap();
        assert_eq!(rad.dim(), 1);
    }

    #[test]
    fn psq3_odd_form_descends_nondegenerate() {
        let f = Field::Q;
        let g = psq(&f, 3);
        let b = qtr_form(&f, &g);
        assert!(b.invariance_violation(&g.alg).is_none());
        assert!(b.is_nondegenerate(&f));
        // and it lies in the solved invariant form space
        let space = invariant_forms(&g.alg, 1);
        assert!(space.coordinates_of(&f, &b).is_some());
    }
}
