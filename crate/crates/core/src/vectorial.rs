//! Vector-field (super)algebras over divided powers: the general series, the
//! divergence-free families with deformed volume densities, Hamiltonian
//! algebras for the inequivalent symplectic forms, and the odd-NIS exception
//! in four even and four odd indeterminates.

use crate::algebra::{AlgebraError, BasisElem, SuperAlgebra};
use crate::divided::{volume_density, DpAlgebra, DpPoly, Mono, VolumeDensity};
use crate::forms::BilinearForm;
use crate::linalg::{Echelon, Mat, SparseVec};
use crate::scalar::{Field, Scalar};
use std::collections::BTreeMap;

/// A vector field sum_v f_v d_v over a divided-power algebra; index v runs
/// over even variables first, then odd ones.
#[derive(Clone, Debug, PartialEq)]
pub struct VField {
    pub coeffs: Vec<DpPoly>,
}

impl VField {
    pub fn zero(dp: &DpAlgebra) -> VField {
        VField {
            coeffs: vec![DpPoly::zero(); dp.m() + dp.n_odd()],
        }
    }

    pub fn single(dp: &DpAlgebra, var: usize, f: DpPoly) -> VField {
        let mut out = VField::zero(dp);
        out.coeffs[var] = f;
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, dp: &DpAlgebra, other: &VField) -> VField {
        VField {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(dp, b))
                .collect(),
        }
    }

    pub fn scale(&self, dp: &DpAlgebra, c: &Scalar) -> VField {
        VField {
            coeffs: self.coeffs.iter().map(|f| f.scale(dp, c)).collect(),
        }
    }

    /// Parity of a term f d_v is p(f) + p(v); None when inhomogeneous.
    pub fn parity(&self, dp: &DpAlgebra) -> Option<u8> {
        let mut parity = None;
        for (v, f) in self.coeffs.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let pv = if v < dp.m() { 0 } else { 1 };
            let pf = f.parity()?;
            let total = (pf + pv) % 2;
            match parity {
                None => parity = Some(total),
                Some(q) if q != total => return None,
                _ => {}
            }
        }
        Some(parity.unwrap_or(0))
    }

    /// Standard degree deg(f) - 1 when homogeneous.
    pub fn degree(&self) -> Option<i64> {
        let mut deg = None;
        for f in &self.coeffs {
            for m in f.terms.keys() {
                let d = m.degree() - 1;
                match deg {
                    None => deg = Some(d),
                    Some(e) if e != d => return None,
                    _ => {}
                }
            }
        }
        deg
    }

    /// D(f) = sum_v f_v d_v(f).
    pub fn apply(&self, dp: &DpAlgebra, f: &DpPoly) -> DpPoly {
        let mut out = DpPoly::zero();
        for (v, g) in self.coeffs.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            out.add_assign(dp, &g.mul(dp, &f.derive(dp, v)));
        }
        out
    }

    /// Super commutator of homogeneous fields.
    pub fn commutator(&self, dp: &DpAlgebra, other: &VField) -> VField {
        let pa = self.parity(dp).expect("homogeneous field");
        let pb = other.parity(dp).expect("homogeneous field");
        let sign = if pa == 1 && pb == 1 {
            dp.field.one()
        } else {
            dp.field.from_int(-1)
        };
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for w in 0..self.coeffs.len() {
            let mut c = self.apply(dp, &other.coeffs[w]);
            c.add_assign(dp, &other.apply(dp, &self.coeffs[w]).scale(dp, &sign));
            coeffs.push(c);
        }
        VField { coeffs }
    }

    /// Divergence: sum_i d_i f_i + sum_j (-1)^{p(g_j)} d_j g_j, the odd sign
    /// applied per homogeneous component of the coefficient.
    pub fn divergence(&self, dp: &DpAlgebra) -> DpPoly {
        let f = &dp.field;
        let mut out = DpPoly::zero();
        for (v, g) in self.coeffs.iter().enumerate() {
            if v < dp.m() {
                out.add_assign(dp, &g.derive(dp, v));
            } else {
                for (m, c) in &g.terms {
                    let sign = if m.parity() == 1 {
                        f.from_int(-1)
                    } else {
                        f.one()
                    };
                    let single = DpPoly::monomial(dp, m.clone(), f.mul(c, &sign));
                    out.add_assign(dp, &single.derive(dp, v));
                }
            }
        }
        out
    }
}

/// Coordinatization of fields for linear algebra: flat index over
/// (variable, monomial).
pub struct FieldCoords {
    pub dp: DpAlgebra,
    pub monos: Vec<Mono>,
    index: BTreeMap<Mono, usize>,
}

impl FieldCoords {
    pub fn new(dp: &DpAlgebra) -> FieldCoords {
        let monos = dp.monomials();
        let index = monos
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        FieldCoords {
            dp: dp.clone(),
            monos,
            index,
        }
    }

    pub fn ncoords(&self) -> usize {
        self.monos.len() * (self.dp.m() + self.dp.n_odd())
    }

    pub fn vectorize(&self, field: &Field, v: &VField) -> SparseVec {
        let mut out = SparseVec::new();
        for (var, f) in v.coeffs.iter().enumerate() {
            for (m, c) in &f.terms {
                let idx = var * self.monos.len() + self.index[m];
                if !field.is_zero(c) {
                    out.push((idx, c.clone()));
                }
            }
        }
        out.sort_by_key(|(i, _)| *i);
        out
    }

    pub fn devectorize(&self, v: &SparseVec) -> VField {
        let mut out = VField::zero(&self.dp);
        for (idx, c) in v {
            let var = idx / self.monos.len();
            let m = &self.monos[idx % self.monos.len()];
            out.coeffs[var].add_assign(
                &self.dp,
                &DpPoly::monomial(&self.dp, m.clone(), c.clone()),
            );
        }
        out
    }
}

/// Builds the abstract algebra of a list of homogeneous fields, expressing
/// brackets through the span. Returns the algebra, the fields in basis
/// order, and the coordinate context.
pub fn algebra_from_fields(
    dp: &DpAlgebra,
    named: Vec<(String, VField)>,
    series: &str,
) -> Result<(SuperAlgebra, Vec<VField>, FieldCoords), AlgebraError> {
    let f = dp.field.clone();
    let coords = FieldCoords::new(dp);
    let ncells = coords.ncoords();
    let mut ech = Echelon::new(&f);
    for (idx, (_, v)) in named.iter().enumerate() {
        let mut row = coords.vectorize(&f, v);
        row.push((ncells + idx, f.one()));
        ech.insert(row);
    }
    let express = |v: &VField| -> Option<SparseVec> {
        let reduced = ech.reduce(coords.vectorize(&f, v));
        if reduced.iter().any(|(i, _)| *i < ncells) {
            return None;
        }
        let mut out: SparseVec = reduced
            .into_iter()
            .map(|(i, c)| (i - ncells, f.neg(&c)))
            .collect();
        out.sort_by_key(|(i, _)| *i);
        Some(out)
    };
    let n = named.len();
    let mut raw = Vec::new();
    for i in 0..n {
        for j in i..n {
            let pi = named[i].1.parity(dp).expect("homogeneous");
            if i == j && !(pi == 1 && f.characteristic() != 2) {
                continue;
            }
            let br = named[i].1.commutator(dp, &named[j].1);
            if br.is_zero() {
                continue;
            }
            let vec = express(&br).ok_or(AlgebraError::NotClosed { i, j })?;
            raw.push((i, j, vec));
        }
    }
    let basis: Vec<BasisElem> = named
        .iter()
        .map(|(name, v)| BasisElem {
            name: name.clone(),
            parity: v.parity(dp).expect("homogeneous"),
            degree: v.degree(),
        })
        .collect();
    let alg = SuperAlgebra::new(f, basis, raw, None)?.with_meta(series, &[]);
    let fields = named.into_iter().map(|(_, v)| v).collect();
    Ok((alg, fields, coords))
}

/// The general vectorial algebra vect(m;N|n): all monomial fields.
pub fn vect(dp: &DpAlgebra) -> (SuperAlgebra, Vec<VField>, FieldCoords) {
    let mut named = Vec::new();
    let monos = dp.monomials();
    let nvars = dp.m() + dp.n_odd();
    for var in 0..nvars {
        let dname = if var < dp.m() {
            format!("d{}", dp.even_names[var])
        } else {
            format!("d{}", dp.odd_names[var - dp.m()])
        };
        for m in &monos {
            let poly = DpPoly::monomial(dp, m.clone(), dp.field.one());
            let name = if m.degree() == 0 {
                dname.clone()
            } else {
                format!("{} {}", poly.render(dp), dname)
            };
            named.push((name, VField::single(dp, var, poly)));
        }
    }
    let mut out = algebra_from_fields(dp, named, "vect").expect("vect closes");
    out.0.meta.params.insert("m".into(), dp.m().to_string());
    out.0.meta.params.insert("n".into(), dp.n_odd().to_string());
    out
}

/// Divergence-free family: fields with L_D(h vvol) = 0 for a chosen volume
/// density h, i.e. D(h) + h Div(D) = 0 computed in the density's algebra.
pub fn svect_h(
    dp: &DpAlgebra,
    kind: &VolumeDensity,
) -> Result<(SuperAlgebra, Vec<VField>, FieldCoords), String> {
    let f = dp.field.clone();
    let (big, h) = volume_density(dp, kind)?;
    let coords = FieldCoords::new(dp);
    let big_monos = FieldCoords::new(&big);
    // unknowns: monomial fields of vect(m;N|n); rows indexed by target
    // monomials of the enlarged algebra.
    //
    // For the exponential density the series satisfies d(h) = h d(s) with
    // s the phantom top power, so the membership condition divides by the
    // unit h and becomes the exact finite constraint
    // f_t u_t^(q-1) + Div D = 0.
    let exp_data: Option<(usize, DpPoly)> = match kind {
        VolumeDensity::Exp { var } => {
            let q = dp.bounds[*var].unwrap();
            Some((*var, DpPoly::even_power(&big, *var, (q - 1) as u32)))
        }
        _ => None,
    };
    let nvars = dp.m() + dp.n_odd();
    let nunknowns = coords.monos.len() * nvars;
    let mut rows_by_target: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for var in 0..nvars {
        let dh = h.derive(&big, var);
        for (mi, m) in coords.monos.iter().enumerate() {
            let u = var * coords.monos.len() + mi;
            let g = DpPoly::monomial(&big, m.clone(), f.one());
            let mut contrib;
            match &exp_data {
                Some((tvar, ds)) => {
                    // g delta_{var,t} u_t^(q-1) + Div(g d_var)
                    contrib = if var == *tvar {
                        g.mul(&big, ds)
                    } else {
                        DpPoly::zero()
                    };
                    let dv = VField::single(&big, var, g).divergence(&big);
                    contrib.add_assign(&big, &dv);
                }
                None => {
                    // D(h) + h Div(D) termwise
                    contrib = g.mul(&big, &dh);
                    let dv = VField::single(&big, var, g).divergence(&big);
                    contrib.add_assign(&big, &h.mul(&big, &dv));
                }
            }
            for (mono, c) in &contrib.terms {
                let target = big_monos.index[mono];
                rows_by_target.entry(target).or_default().push((u, c.clone()));
            }
        }
    }
    let mut rows: Vec<SparseVec> = rows_by_target
        .into_values()
        .map(|mut r| {
            r.sort_by_key(|(i, _)| *i);
            r
        })
        .collect();
    rows.retain(|r| !r.is_empty());
    let kernel = crate::linalg::kernel_sparse(&f, &rows, nunknowns);
    let mut named = Vec::new();
    for (knum, kv) in kernel.iter().enumerate() {
        let sv = crate::linalg::sv_from_dense(&f, kv);
        let field = coords.devectorize(&sv);
        named.push((format!("v{knum}"), field));
    }
    let series = match kind {
        VolumeDensity::One => "svect",
        VolumeDensity::OnePlusUbar => "svect_1+ubar",
        VolumeDensity::Exp { .. } => "svect_exp",
    };
    algebra_from_fields(dp, named, series).map_err(|e| e.to_string())
}

/// NIS on vect(1;N) in characteristic 3: (u^(a) d, u^(b) d) is the top
/// coefficient of u^(a) u^(b).
pub fn nis_vect1(
    dp: &DpAlgebra,
    alg: &SuperAlgebra,
    fields: &[VField],
) -> Result<BilinearForm, String> {
    if dp.field.characteristic() != 3 || dp.m() != 1 || dp.n_odd() != 0 {
        return Err(format!(
            "applicability: needs one even variable and characteristic 3, got m={} n={} p={}",
            dp.m(),
            dp.n_odd(),
            dp.field.characteristic()
        ));
    }
    pair_by_coefficient_product(dp, alg, fields, None)
}

/// NIS on vect(2;N) in characteristic 2: (u^(a) d_i, u^(b) d_j) = (i + j)
/// times the top coefficient of u^(a) u^(b), indices counted from 1.
pub fn nis_vect2(
    dp: &DpAlgebra,
    alg: &SuperAlgebra,
    fields: &[VField],
) -> Result<BilinearForm, String> {
    if dp.field.characteristic() != 2 || dp.m() != 2 || dp.n_odd() != 0 {
        return Err(format!(
            "applicability: needs two even variables and characteristic 2, got m={} n={} p={}",
            dp.m(),
            dp.n_odd(),
            dp.field.characteristic()
        ));
    }
    pair_by_coefficient_product(dp, alg, fields, Some(&|i: usize, j: usize| ((i + 1 + j + 1) % 2) as i64))
}

fn pair_by_coefficient_product(
    dp: &DpAlgebra,
    alg: &SuperAlgebra,
    fields: &[VField],
    weight: Option<&dyn Fn(usize, usize) -> i64>,
) -> Result<BilinearForm, String> {
    let f = &dp.field;
    let n = alg.dim();
    let mut gram = Mat::zero(f, n, n);
    for a in 0..n {
        for b in 0..n {
            let mut acc = f.zero();
            for (i, fa) in fields[a].coeffs.iter().enumerate() {
                for (j, fb) in fields[b].coeffs.iter().enumerate() {
                    let w = match weight {
                        None => {
                            if i == j {
                                f.one()
                            } else {
                                f.zero()
                            }
                        }
                        Some(wfn) => f.from_int(wfn(i, j)),
                    };
                    if f.is_zero(&w) {
                        continue;
                    }
                    let prod = fa.mul(dp, fb).integral(dp);
                    acc = f.add(&acc, &f.mul(&w, &prod));
                }
            }
            *gram.at_mut(a, b) = acc;
        }
    }
    Ok(BilinearForm { parity: 0, gram })
}

/// Seed values of the divergence-free NIS in three variables:
/// (d_i, D_jk(u^top)) = sign(i,j,k) with D_jk(f) = d_k(f) d_j - d_j(f) d_k.
/// Returns the seed pairs as (field, field, value) for cross-checking a
/// solved form.
pub fn nis_svect3_seed(dp: &DpAlgebra) -> Vec<(VField, VField, i64)> {
    assert_eq!(dp.m(), 3);
    let f = &dp.field;
    let top = DpPoly::monomial(dp, dp.top_mono(), f.one());
    let sign = |i: usize, j: usize, k: usize| -> i64 {
        let perm = [i, j, k];
        if i == j || j == k || i == k {
            return 0;
        }
        // parity of the permutation (i,j,k) of (0,1,2)
        let mut inv = 0;
        for a in 0..3 {
            for b in a + 1..3 {
                if perm[a] > perm[b] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    };
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            for k in (j + 1)..3 {
                let s = sign(i, j, k);
                let di = VField::single(dp, i, DpPoly::one(dp));
                // D_jk(top) = d_k(top) d_j - d_j(top) d_k
                let mut djk = VField::single(dp, j, top.derive(dp, k));
                djk = djk.add(
                    dp,
                    &VField::single(dp, k, top.derive(dp, j).scale(dp, &f.from_int(-1))),
                );
                out.push((di, djk, s));
            }
        }
    }
    out
}

/// Skryabin first-type block shapes for the deformed symplectic form.
#[derive(Clone, Debug)]
pub enum SkryabinA {
    /// antidiag(J_k(0), -J_k(0)^T)
    Jk0,
    /// antidiag(J_{k,r}(lambda), -J_{k,r}(lambda)^T), lambda nonzero
    Jkr { lambda: Scalar, r: usize },
    /// antidiag(C_k, -C_k^T)
    Ck,
}

#[derive(Clone, Debug)]
pub enum SymplecticKind {
    Omega0,
    Omega1 { a: SkryabinA, eps: Scalar },
    Omega2 { var: usize, eps: Scalar },
}

/// A Hamiltonian algebra: fields preserving the chosen symplectic form,
/// with enough data to evaluate the generating-function pairing.
pub struct HamiltonianAlgebra {
    pub alg: SuperAlgebra,
    pub dp: DpAlgebra,
    pub fields: Vec<VField>,
    pub coords: FieldCoords,
    /// Antisymmetric coefficient matrix of omega.
    pub omega: Vec<Vec<DpPoly>>,
    /// Coefficient of omega^k on du_1 ^ ... ^ du_2k.
    pub omega_top: DpPoly,
    /// Generating functions of the basis fields (constant-free; may use the
    /// phantom top Hamiltonians, whose products integrate to zero).
    gen_fns: Vec<DpPoly>,
}

fn jordan_block(field: &Field, k: usize, lambda: &Scalar) -> Mat {
    let mut m = Mat::zero(field, k, k);
    for i in 0..k {
        *m.at_mut(i, i) = lambda.clone();
        if i + 1 < k {
            *m.at_mut(i, i + 1) = field.one();
        }
    }
    m
}

fn jkr_block(field: &Field, k: usize, r: usize, lambda: &Scalar) -> Mat {
    // k = r * s block matrix: superdiagonal identity blocks, J_r(lambda) in
    // the lower-left corner
    assert!(k % r == 0 && k >= r);
    let s = k / r;
    let mut m = Mat::zero(field, k, k);
    for blk in 0..s - 1 {
        for t in 0..r {
            *m.at_mut(blk * r + t, (blk + 1) * r + t) = field.one();
        }
    }
    let j = jordan_block(field, r, lambda);
    for a in 0..r {
        for b in 0..r {
            *m.at_mut((s - 1) * r + a, b) = j.at(a, b).clone();
        }
    }
    m
}

fn ck_block(field: &Field, k: usize) -> Mat {
    let mut m = Mat::zero(field, k, k);
    for i in 0..k - 1 {
        *m.at_mut(i, i + 1) = field.one();
    }
    *m.at_mut(k - 1, 0) = field.one();
    m
}

/// Validates the Skryabin admissibility conditions on the shearing heights
/// for the first-type forms.
fn validate_omega1(dp: &DpAlgebra, a: &SkryabinA) -> Result<(), String> {
    let k = dp.m() / 2;
    let heights: Vec<u32> = dp
        .bounds
        .iter()
        .map(|b| {
            let b = b.expect("finite");
            let p = dp.field.characteristic();
            let mut n = 0;
            let mut v = 1;
            while v < b {
                v *= p;
                n += 1;
            }
            n
        })
        .collect();
    match a {
        SkryabinA::Jkr { r, .. } => {
            let r = *r;
            if k % r != 0 {
                return Err(format!("block size {r} must divide {k}"));
            }
            let s1: u32 = heights[..k].iter().sum();
            let s2: u32 = heights[k..].iter().sum();
            if s1 != s2 {
                return Err("heights must balance between the two groups".into());
            }
            for i in 0..2 * k / r {
                for j in 1..r {
                    if heights[i * r + j] != heights[i * r] {
                        return Err("heights must be constant within each block".into());
                    }
                }
            }
            Ok(())
        }
        SkryabinA::Ck => {
            let s1: u32 = heights[..k].iter().sum();
            let s2: u32 = heights[k..].iter().sum();
            if s1 == s2 {
                return Err("corner type requires unbalanced heights".into());
            }
            Ok(())
        }
        SkryabinA::Jk0 => Ok(()),
    }
}

/// Builds h_omega(2k;N) as the stabilizer of omega, via the kernel of
/// D -> L_D omega.
pub fn build_h_omega(dp: &DpAlgebra, kind: &SymplecticKind) -> Result<HamiltonianAlgebra, String> {
    let f = dp.field.clone();
    assert_eq!(dp.n_odd(), 0, "even symplectic case only");
    let two_k = dp.m();
    assert!(two_k % 2 == 0);
    let k = two_k / 2;

    // assemble the coefficient matrix of omega
    let mut w = vec![vec![DpPoly::zero(); two_k]; two_k];
    let mut add_w = |w: &mut Vec<Vec<DpPoly>>, i: usize, j: usize, v: DpPoly| {
        w[i][j] = w[i][j].add(dp, &v);
        w[j][i] = w[j][i].sub(dp, &v);
    };
    match kind {
        SymplecticKind::Omega0 => {
            for i in 0..k {
                add_w(&mut w, i, k + i, DpPoly::one(dp));
            }
        }
        SymplecticKind::Omega1 { a, eps } => {
            validate_omega1(dp, a)?;
            for i in 0..k {
                add_w(&mut w, i, k + i, DpPoly::one(dp));
            }
            let amat = match a {
                SkryabinA::Jk0 => jordan_block(&f, k, &f.zero()),
                SkryabinA::Jkr { lambda, r } => {
                    if f.is_zero(lambda) {
                        return Err("lambda must be nonzero for the block type".into());
                    }
                    jkr_block(&f, k, *r, lambda)
                }
                SkryabinA::Ck => ck_block(&f, k),
            };
            if f.is_zero(eps) {
                return Err("eps must be nonzero".into());
            }
            // full 2k x 2k antisymmetric shape antidiag(A, -A^T)
            let mut big = Mat::zero(&f, two_k, two_k);
            for i in 0..k {
                for j in 0..k {
                    *big.at_mut(i, k + j) = amat.at(i, j).clone();
                    *big.at_mut(k + i, j) = f.neg(amat.at(j, i));
                }
            }
            // d(ubar_i) = u_i^(p^{N_i}-1) du_i with ubar the phantom top
            let tops: Vec<DpPoly> = (0..two_k)
                .map(|i| {
                    let b = dp.bounds[i].unwrap();
                    DpPoly::even_power(dp, i, (b - 1) as u32)
                })
                .collect();
            for i in 0..two_k {
                for j in 0..two_k {
                    let a_ij = big.at(i, j);
                    if f.is_zero(a_ij) {
                        continue;
                    }
                    let coef = tops[i].mul(dp, &tops[j]).scale(dp, &f.mul(eps, a_ij));
                    // contributes A_ij v_i v_j du_i ^ du_j
                    if i < j {
                        add_w(&mut w, i, j, coef);
                    } else {
                        add_w(&mut w, j, i, coef.scale(dp, &f.from_int(-1)));
                    }
                }
            }
        }
        SymplecticKind::Omega2 { var, eps } => {
            if k < 2 {
                return Err("second-type forms need at least four variables".into());
            }
            if f.is_zero(eps) {
                return Err("eps must be nonzero".into());
            }
            // alpha = exp(eps u_var) sum_i u_i du_{k+i}; omega = d alpha
            let mut exp = DpPoly::zero();
            let bound = dp.bounds[*var].unwrap();
            let mut epow = f.one();
            for e in 0..bound as u32 {
                exp.add_assign(
                    dp,
                    &DpPoly::even_power(dp, *var, e).scale(dp, &epow),
                );
                epow = f.mul(&epow, eps);
            }
            let mut a_form = vec![DpPoly::zero(); two_k];
            for i in 0..k {
                a_form[k + i] = exp.mul(dp, &DpPoly::even_var(dp, i));
            }
            for l in 0..two_k {
                if a_form[l].is_zero() {
                    continue;
                }
                for i in 0..l {
                    let v = a_form[l].derive(dp, i);
                    if !v.is_zero() {
                        add_w(&mut w, i, l, v);
                    }
                }
                for i in l + 1..two_k {
                    let v = a_form[l].derive(dp, i).scale(dp, &f.from_int(-1));
                    if !v.is_zero() {
                        add_w(&mut w, l, i, v);
                    }
                }
            }
        }
    }

    // kernel of L_D omega
    let coords = FieldCoords::new(dp);
    let nmono = coords.monos.len();
    let nunknowns = nmono * two_k;
    let mut rows_map: BTreeMap<(usize, usize, Mono), SparseVec> = BTreeMap::new();
    for var in 0..two_k {
        for (mi, m) in coords.monos.iter().enumerate() {
            let u = var * nmono + mi;
            let g = DpPoly::monomial(dp, m.clone(), f.one());
            let gfield = VField::single(dp, var, g.clone());
            for a in 0..two_k {
                for b in a + 1..two_k {
                    // (L_D w)_{ab} = D(w_ab) + d_a(g) w_{var,b} + w_{a,var} d_b(g)
                    let mut contrib = gfield.apply(dp, &w[a][b]);
                    contrib.add_assign(dp, &g.derive(dp, a).mul(dp, &w[var][b]));
                    contrib.add_assign(dp, &w[a][var].mul(dp, &g.derive(dp, b)));
                    for (mono, c) in &contrib.terms {
                        rows_map
                            .entry((a, b, mono.clone()))
                            .or_default()
                            .push((u, c.clone()));
                    }
                }
            }
        }
    }
    let rows: Vec<SparseVec> = rows_map
        .into_values()
        .map(|mut r| {
            r.sort_by_key(|(i, _)| *i);
            r
        })
        .collect();
    let kernel = crate::linalg::kernel_sparse(&f, &rows, nunknowns);
    let mut named = Vec::new();
    for (knum, kv) in kernel.iter().enumerate() {
        let sv = crate::linalg::sv_from_dense(&f, kv);
        named.push((format!("X{knum}"), coords.devectorize(&sv)));
    }
    let (alg, fields, coords) =
        algebra_from_fields(dp, named, "h_omega").map_err(|e| e.to_string())?;

    // omega^k top coefficient via wedge powers over subsets
    let omega_top = wedge_power_top(dp, &w, k);

    let mut ham = HamiltonianAlgebra {
        alg,
        dp: dp.clone(),
        fields,
        coords,
        omega: w,
        omega_top,
        gen_fns: Vec::new(),
    };
    ham.recover_generating_functions()?;
    Ok(ham)
}

/// Coefficient of omega^{wedge k} on du_1 ^ ... ^ du_{2k}.
fn wedge_power_top(dp: &DpAlgebra, w: &[Vec<DpPoly>], k: usize) -> DpPoly {
    let two_k = dp.m();
    // forms as maps from sorted variable masks to coefficients
    let mut acc: BTreeMap<u64, DpPoly> = BTreeMap::new();
    acc.insert(0, DpPoly::one(dp));
    for _ in 0..k {
        let mut next: BTreeMap<u64, DpPoly> = BTreeMap::new();
        for (mask, coef) in &acc {
            for a in 0..two_k {
                for b in a + 1..two_k {
                    let bit = (1u64 << a) | (1u64 << b);
                    if mask & bit != 0 {
                        continue;
                    }
                    if w[a][b].is_zero() {
                        continue;
                    }
                    // all even 2-forms commute; sign from interleaving du_a du_b
                    // past the existing mask
                    let before_a = (mask & ((1u64 << a) - 1)).count_ones();
                    let before_b = (mask & ((1u64 << b) - 1)).count_ones();
                    let sign = if (before_a + before_b) % 2 == 0 {
                        dp.field.one()
                    } else {
                        dp.field.from_int(-1)
                    };
                    let term = coef.mul(dp, &w[a][b]).scale(dp, &sign);
                    let entry = next.entry(mask | bit).or_insert_with(DpPoly::zero);
                    *entry = entry.add(dp, &term);
                }
            }
        }
        acc = next;
    }
    let full = (1u64 << two_k) - 1;
    acc.remove(&full).unwrap_or_else(DpPoly::zero)
}

impl HamiltonianAlgebra {
    /// Expresses every basis field as X_H for a generating function H drawn
    /// from the maximal ideal plus the phantom top Hamiltonians. Phantom
    /// contributions never reach the integration top, so they are kept only
    /// implicitly: this stores the polynomial part of H.
    fn recover_generating_functions(&mut self) -> Result<(), String> {
        let f = self.dp.field.clone();
        let two_k = self.dp.m();
        let winv = self.omega_inverse()?;
        // basis of Hamiltonians: non-constant monomials, then phantoms
        let mut hams: Vec<(Option<Mono>, usize)> = Vec::new(); // (mono, phantom var)
        for m in &self.coords.monos {
            if m.degree() != 0 {
                hams.push((Some(m.clone()), usize::MAX));
            }
        }
        for var in 0..two_k {
            hams.push((None, var));
        }
        let ncells = self.coords.ncoords();
        let mut ech = Echelon::new(&f);
        for (hi, (mono, pvar)) in hams.iter().enumerate() {
            let xh = self.hamiltonian_field(&winv, mono.as_ref(), *pvar);
            let mut row = self.coords.vectorize(&f, &xh);
            row.push((ncells + hi, f.one()));
            ech.insert(row);
        }
        let mut gen_fns = Vec::new();
        for fld in &self.fields {
            let reduced = ech.reduce(self.coords.vectorize(&f, fld));
            if reduced.iter().any(|(i, _)| *i < ncells) {
                return Err("field is not Hamiltonian for omega".into());
            }
            let mut h = DpPoly::zero();
            for (i, c) in reduced {
                let (mono, _pvar) = &hams[i - ncells];
                if let Some(m) = mono {
                    h.add_assign(
                        &self.dp,
                        &DpPoly::monomial(&self.dp, m.clone(), f.neg(&c)),
                    );
                }
                // phantom parts contribute nothing to integrals
            }
            gen_fns.push(h);
        }
        self.gen_fns = gen_fns;
        Ok(())
    }

    /// X_H = sum (d_i H) (w^{-1})^{ij} d_j, with the phantom derivative
    /// d_l(u_var^(bound)) = delta_{l,var} u_var^(bound - 1).
    fn hamiltonian_field(
        &self,
        winv: &[Vec<DpPoly>],
        mono: Option<&Mono>,
        phantom_var: usize,
    ) -> VField {
        let f = &self.dp.field;
        let two_k = self.dp.m();
        let mut out = VField::zero(&self.dp);
        for i in 0..two_k {
            let dih = match mono {
                Some(m) => DpPoly::monomial(&self.dp, m.clone(), f.one()).derive(&self.dp, i),
                None => {
                    if i == phantom_var {
                        let b = self.dp.bounds[i].unwrap();
                        DpPoly::even_power(&self.dp, i, (b - 1) as u32)
                    } else {
                        DpPoly::zero()
                    }
                }
            };
            if dih.is_zero() {
                continue;
            }
            for j in 0..two_k {
                if winv[i][j].is_zero() {
                    continue;
                }
                let term = dih.mul(&self.dp, &winv[i][j]);
                out.coeffs[j].add_assign(&self.dp, &term);
            }
        }
        out
    }

    fn omega_inverse(&self) -> Result<Vec<Vec<DpPoly>>, String> {
        dp_mat_inverse(&self.dp, &self.omega)
    }

    /// The generating-function pairing (X_F, X_G) = top coefficient of
    /// F G omega^k.
    pub fn nis(&self) -> BilinearForm {
        let f = &self.dp.field;
        let n = self.alg.dim();
        let mut gram = Mat::zero(f, n, n);
        for a in 0..n {
            for b in 0..n {
                let prod = self.gen_fns[a]
                    .mul(&self.dp, &self.gen_fns[b])
                    .mul(&self.dp, &self.omega_top);
                *gram.at_mut(a, b) = prod.integral(&self.dp);
            }
        }
        BilinearForm { parity: 0, gram }
    }

    /// Integral of the bracket's generating function against omega^k;
    /// vanishes identically, which is the invariance mechanism.
    pub fn bracket_integral(&self, a: usize, b: usize) -> Result<Scalar, String> {
        let f = self.dp.field.clone();
        let br = self.fields[a].commutator(&self.dp, &self.fields[b]);
        // recover the generating function of the bracket
        let winv = self.omega_inverse()?;
        let two_k = self.dp.m();
        let mut hams: Vec<(Option<Mono>, usize)> = Vec::new();
        for m in &self.coords.monos {
            if m.degree() != 0 {
                hams.push((Some(m.clone()), usize::MAX));
            }
        }
        for var in 0..two_k {
            hams.push((None, var));
        }
        let ncells = self.coords.ncoords();
        let mut ech = Echelon::new(&f);
        for (hi, (mono, pvar)) in hams.iter().enumerate() {
            let xh = self.hamiltonian_field(&winv, mono.as_ref(), *pvar);
            let mut row = self.coords.vectorize(&f, &xh);
            row.push((ncells + hi, f.one()));
            ech.insert(row);
        }
        let reduced = ech.reduce(self.coords.vectorize(&f, &br));
        if reduced.iter().any(|(i, _)| *i < ncells) {
            return Err("bracket escaped the Hamiltonian span".into());
        }
        let mut h = DpPoly::zero();
        for (i, c) in reduced {
            if let Some(m) = &hams[i - ncells].0 {
                h.add_assign(&self.dp, &DpPoly::monomial(&self.dp, m.clone(), f.neg(&c)));
            }
        }
        Ok(h.mul(&self.dp, &self.omega_top).integral(&self.dp))
    }

    /// Derived-series member with its induced pairing: i applications.
    pub fn derived_with_nis(&self, i: usize) -> (SuperAlgebra, BilinearForm, Vec<SparseVec>) {
        let f = &self.dp.field;
        let mut alg = self.alg.clone();
        // embedding rows of the current member inside the original algebra
        let mut rows: Vec<SparseVec> = (0..alg.dim()).map(|t| vec![(t, f.one())]).collect();
        for _ in 0..i {
            let (next, emb) = alg.derived_algebra();
            let new_rows: Vec<SparseVec> = emb
                .iter()
                .map(|row| {
                    let mut out = SparseVec::new();
                    for (t, c) in row {
                        crate::linalg::sv_axpy(f, &mut out, c, &rows[*t]);
                    }
                    out
                })
                .collect();
            alg = next;
            rows = new_rows;
        }
        let base = self.nis();
        let n = alg.dim();
        let mut gram = Mat::zero(f, n, n);
        for a in 0..n {
            for b in 0..n {
                *gram.at_mut(a, b) = base.value(f, &rows[a], &rows[b]);
            }
        }
        (
            alg,
            BilinearForm { parity: 0, gram },
            rows,
        )
    }
}

/// Inverse of a matrix over the divided-power algebra; requires unit
/// diagonal structure after elimination (entries with invertible constant
/// term), which holds for all the symplectic matrices here.
pub fn dp_mat_inverse(dp: &DpAlgebra, w: &[Vec<DpPoly>]) -> Result<Vec<Vec<DpPoly>>, String> {
    let n = w.len();
    let f = &dp.field;
    let mut a: Vec<Vec<DpPoly>> = w.to_vec();
    let mut inv: Vec<Vec<DpPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        DpPoly::one(dp)
                    } else {
                        DpPoly::zero()
                    }
                })
                .collect()
        })
        .collect();
    let unit_const = |p: &DpPoly| -> Option<Scalar> {
        let c = p.coefficient(&Mono {
            ev: vec![0; dp.m()],
            od: 0,
        })?;
        if f.is_zero(c) {
            None
        } else {
            Some(c.clone())
        }
    };
    for col in 0..n {
        // pick a pivot row with a unit entry
        let mut pivot = None;
        for r in col..n {
            if unit_const(&a[r][col]).is_some() {
                pivot = Some(r);
                break;
            }
        }
        let p = pivot.ok_or("no unit pivot; matrix not invertible over the local ring")?;
        a.swap(col, p);
        inv.swap(col, p);
        let pinv = dp_inv(dp, &a[col][col]).ok_or("pivot not invertible")?;
        for j in 0..n {
            a[col][j] = a[col][j].mul(dp, &pinv);
            inv[col][j] = inv[col][j].mul(dp, &pinv);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                let s = factor.mul(dp, &a[col][j]);
                a[r][j] = a[r][j].sub(dp, &s);
                let si = factor.mul(dp, &inv[col][j]);
                inv[r][j] = inv[r][j].sub(dp, &si);
            }
        }
    }
    Ok(inv)
}

/// Inverse of a unit in the divided-power algebra (nonzero constant term;
/// the rest is nilpotent).
pub fn dp_inv(dp: &DpAlgebra, u: &DpPoly) -> Option<DpPoly> {
    let f = &dp.field;
    let c = u.coefficient(&Mono {
        ev: vec![0; dp.m()],
        od: 0,
    })?;
    if f.is_zero(c) {
        return None;
    }
    let cinv = f.inv(c)?;
    // u = c (1 - m) with m nilpotent; inverse = c^{-1} sum m^j
    let mut m = DpPoly::one(dp).sub(dp, &u.scale(dp, &cinv));
    let mut acc = DpPoly::one(dp);
    let mut power = m.clone();
    while !power.is_zero() {
        acc.add_assign(dp, &power);
        power = power.mul(dp, &m);
    }
    m = acc.scale(dp, &cinv);
    Some(m)
}

/// The exceptional algebra in 4 even and 4 odd generators at p = 3: even
/// part all vector fields in the even variables, odd part the 1-forms over
/// inverse half-densities, with the 3-form/volume identification for the
/// odd bracket.
pub struct VasAlgebra {
    pub alg: SuperAlgebra,
    pub dp: DpAlgebra,
    /// even basis: (var, mono); odd basis: (du index, mono)
    pub even_basis: Vec<(usize, Mono)>,
    pub odd_basis: Vec<(usize, Mono)>,
}

pub fn build_vas(field: &Field) -> Result<VasAlgebra, String> {
    if field.characteristic() != 3 {
        return Err("this construction is specific to characteristic 3".into());
    }
    let dp = DpAlgebra::new(
        field,
        &["x1", "x2", "x3", "x4"],
        &[Some(1), Some(1), Some(1), Some(1)],
        &[],
    );
    let monos = dp.monomials();
    let f = field;
    let even_basis: Vec<(usize, Mono)> = (0..4)
        .flat_map(|v| monos.iter().map(move |m| (v, m.clone())))
        .collect();
    let odd_basis = even_basis.clone();
    let ne = even_basis.len();
    let dim = 2 * ne;
    let idx_mono: BTreeMap<Mono, usize> = monos
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    let even_index = |v: usize, m: &Mono| v * monos.len() + idx_mono[m];
    let odd_index = |v: usize, m: &Mono| ne + v * monos.len() + idx_mono[m];

    let poly_to_even = |v: usize, p: &DpPoly| -> SparseVec {
        let mut out: SparseVec = p
            .terms
            .iter()
            .map(|(m, c)| (even_index(v, m), c.clone()))
            .collect();
        out.sort_by_key(|(i, _)| *i);
        out
    };
    let poly_to_odd = |v: usize, p: &DpPoly| -> SparseVec {
        let mut out: SparseVec = p
            .terms
            .iter()
            .map(|(m, c)| (odd_index(v, m), c.clone()))
            .collect();
        out.sort_by_key(|(i, _)| *i);
        out
    };

    let sign4 = |perm: [usize; 4]| -> i64 {
        let mut inv = 0;
        for a in 0..4 {
            for b in a + 1..4 {
                if perm[a] > perm[b] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    };

    let mut raw: Vec<(usize, usize, SparseVec)> = Vec::new();
    // even-even: field commutators
    for (a, (va, ma)) in even_basis.iter().enumerate() {
        let fa = VField::single(&dp, *va, DpPoly::monomial(&dp, ma.clone(), f.one()));
        for (b, (vb, mb)) in even_basis.iter().enumerate().skip(a + 1) {
            let fb = VField::single(&dp, *vb, DpPoly::monomial(&dp, mb.clone(), f.one()));
            let br = fa.commutator(&dp, &fb);
            let mut vec = SparseVec::new();
            for (v, p) in br.coeffs.iter().enumerate() {
                for (i, c) in poly_to_even(v, p) {
                    vec.push((i, c));
                }
            }
            vec.sort_by_key(|(i, _)| *i);
            if !vec.is_empty() {
                raw.push((a, b, vec));
            }
        }
    }
    // even-odd: [D, g du_j / sqrt(vvol)] = (D(g) du_j + g d(f_j)
    //            - (1/2) Div(D) g du_j) / sqrt(vvol); at p = 3, -1/2 = 1.
    for (a, (va, ma)) in even_basis.iter().enumerate() {
        let fa_poly = DpPoly::monomial(&dp, ma.clone(), f.one());
        let fa = VField::single(&dp, *va, fa_poly.clone());
        let divd = fa.divergence(&dp);
        for (b, (j, mb)) in odd_basis.iter().enumerate() {
            let g = DpPoly::monomial(&dp, mb.clone(), f.one());
            // L_D(g du_j) = D(g) du_j + g * d_j(f_a-coeff) du_l summed:
            // only coefficient f at position va: d(f) = sum d_l(f) du_l
            let mut coeffs_out: Vec<DpPoly> = vec![DpPoly::zero(); 4];
            coeffs_out[*j] = fa.apply(&dp, &g);
            if *j < 4 {
                // g * d_{j'}(f_va) du_{j'} where the 1-form is g du_j and
                // L_D du_j = d(D u_j) = d(f_j): nonzero only if j == va
                if *j == *va {
                    for jp in 0..4 {
                        let d = fa_poly.derive(&dp, jp);
                        if !d.is_zero() {
                            coeffs_out[jp] = coeffs_out[jp].add(&dp, &g.mul(&dp, &d));
                        }
                    }
                }
            }
            // -(1/2) Div(D) g = +Div(D) g at p = 3
            if !divd.is_zero() {
                coeffs_out[*j] = coeffs_out[*j].add(&dp, &divd.mul(&dp, &g));
            }
            let mut vec = SparseVec::new();
            for (jp, p) in coeffs_out.iter().enumerate() {
                for (i, c) in poly_to_odd(jp, p) {
                    vec.push((i, c));
                }
            }
            vec.sort_by_key(|(i, _)| *i);
            if !vec.is_empty() {
                raw.push((a, ne + b, vec));
            }
        }
    }
    // odd-odd: [g1 du_j, g2 du_l] = (d(g1 du_j) ^ (g2 du_l) + (g1 du_j) ^
    // d(g2 du_l)) / vvol, with du_a du_b du_c / vvol = sign(abcl) d_l.
    for (a, (j1, m1)) in odd_basis.iter().enumerate() {
        let g1 = DpPoly::monomial(&dp, m1.clone(), f.one());
        for (b, (j2, m2)) in odd_basis.iter().enumerate().skip(a) {
            let g2 = DpPoly::monomial(&dp, m2.clone(), f.one());
            // three-form coefficients indexed by sorted triple (r<s<t)
            let mut three: BTreeMap<(usize, usize, usize), DpPoly> = BTreeMap::new();
            let mut add3 = |key_vars: [usize; 3], v: DpPoly, three: &mut BTreeMap<(usize, usize, usize), DpPoly>| {
                // sort with sign
                let mut vars = key_vars;
                let mut sign = 1i64;
                for x in 0..3 {
                    for y in 0..2 - x {
                        if vars[y] > vars[y + 1] {
                            vars.swap(y, y + 1);
                            sign = -sign;
                        }
                    }
                }
                if vars[0] == vars[1] || vars[1] == vars[2] {
                    return;
                }
                let entry = three
                    .entry((vars[0], vars[1], vars[2]))
                    .or_insert_with(DpPoly::zero);
                let signed = if sign < 0 {
                    v.scale(&dp, &f.from_int(-1))
                } else {
                    v
                };
                *entry = entry.add(&dp, &signed);
            };
            // d(g1 du_j1) ^ g2 du_j2 = sum_r d_r(g1) g2 du_r du_j1 du_j2
            for r in 0..4 {
                let c = g1.derive(&dp, r).mul(&dp, &g2);
                if !c.is_zero() {
                    add3([r, *j1, *j2], c, &mut three);
                }
            }
            // g1 du_j1 ^ d(g2 du_j2) = sum_r g1 d_r(g2) du_j1 du_r du_j2
            for r in 0..4 {
                let c = g1.mul(&dp, &g2.derive(&dp, r));
                if !c.is_zero() {
                    add3([*j1, r, *j2], c, &mut three);
                }
            }
            let mut vec = SparseVec::new();
            for ((r, s, t), coef) in three {
                if coef.is_zero() {
                    continue;
                }
                let l = 6 - r - s - t; // the missing index
                let sgn = sign4([r, s, t, l]);
                let signed = if sgn < 0 {
                    coef.scale(&dp, &f.from_int(-1))
                } else {
                    coef
                };
                for (i, c) in poly_to_even(l, &signed) {
                    vec.push((i, c));
                }
            }
            vec.sort_by_key(|(i, _)| *i);
            // accumulate duplicates
            let mut merged = SparseVec::new();
            for (i, c) in vec {
                crate::linalg::sv_axpy(f, &mut merged, &f.one(), &[(i, c)]);
            }
            if !merged.is_empty() {
                raw.push((ne + a, ne + b, merged));
            }
        }
    }

    let mut basis = Vec::with_capacity(dim);
    for (v, m) in &even_basis {
        let p = DpPoly::monomial(&dp, m.clone(), f.one());
        basis.push(BasisElem {
            name: format!("{} d{}", p.render(&dp), dp.even_names[*v]),
            parity: 0,
            degree: Some(m.degree() - 1),
        });
    }
    for (v, m) in &odd_basis {
        let p = DpPoly::monomial(&dp, m.clone(), f.one());
        basis.push(BasisElem {
            name: format!("{} w{}", p.render(&dp), dp.even_names[*v]),
            parity: 1,
            degree: Some(m.degree() - 1),
        });
    }
    let alg = SuperAlgebra::new(f.clone(), basis, raw, None)
        .map_err(|e| e.to_string())?
        .with_meta("vas", &[]);
    Ok(VasAlgebra {
        alg,
        dp,
        even_basis,
        odd_basis,
    })
}

impl VasAlgebra {
    /// Odd pairing (f dx_i, g du_j sqrt-volume) = delta_ij * top(fg).
    pub fn nis(&self) -> BilinearForm {
        let f = &self.dp.field;
        let ne = self.even_basis.len();
        let n = self.alg.dim();
        let mut gram = Mat::zero(f, n, n);
        for (a, (va, ma)) in self.even_basis.iter().enumerate() {
            for (b, (vb, mb)) in self.odd_basis.iter().enumerate() {
                if va != vb {
                    continue;
                }
                let prod = DpPoly::monomial(&self.dp, ma.clone(), f.one()).mul(
                    &self.dp,
                    &DpPoly::monomial(&self.dp, mb.clone(), f.one()),
                );
                let v = prod.integral(&self.dp);
                *gram.at_mut(a, ne + b) = v.clone();
                // supersymmetric odd form: B(odd, even) = B(even, odd)
                *gram.at_mut(ne + b, a) = v;
            }
        }
        BilinearForm { parity: 1, gram }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::JacobiMode;
    use crate::forms::{find_nis, form_radical, graded_pairing_check, invariant_forms};

    #[test]
    fn vect_1_1_dimension() {
        let f = Field::gf(3, 1);
        let dp = DpAlgebra::new(&f, &["u"], &[Some(1)], &[]);
        let (alg, _, _) = vect(&dp);
        assert_eq!(alg.dim(), 3);
        assert!(alg.check_jacobi(JacobiMode::All).is_empty());
    }

    #[test]
    fn divergence_example() {
        let f = Field::gf(3, 1);
        let dp = DpAlgebra::new(&f, &["u"], &[Some(1)], &[]);
        let d = VField::single(&dp, 0, DpPoly::even_power(&dp, 0, 2));
        assert_eq!(d.divergence(&dp), DpPoly::even_var(&dp, 0));
    }

    #[test]
    fn svect1_3_dimension_52() {
        let f = Field::gf(3, 1);
        let dp = DpAlgebra::new(&f, &["u1", "u2", "u3"], &[Some(1); 3], &[]);
        let (svect, _, _) = svect_h(&dp, &VolumeDensity::One).unwrap();
        let (derived, _) = svect.derived_algebra();
        assert_eq!(derived.dim(), 52);
        assert!(derived
            .check_jacobi(JacobiMode::Random {
                samples: 500,
                seed: 17
            })
            .is_empty());
    }

    #[test]
    fn svect_exp_dimension_54() {
        let f = Field::gf(3, 1);
        let dp = DpAlgebra::new(&f, &["u1", "u2", "u3"], &[Some(1); 3], &[]);
        let (alg, _, _) = svect_h(&dp, &VolumeDensity::Exp { var: 0 }).unwrap();
        assert_eq!(alg.dim(), 54);
    }

    #[test]
    fn svect_1ubar_derived_dimension_52() {
        let f = Field::gf(3, 1);
        let dp = DpAlgebra::new(&f, &["u1", "u2", "u3"], &[Some(1); 3], &[]);
        let (alg, _, _) = svect_h(&dp, &VolumeDensity::OnePlusUbar).unwrap();
        let (derived, _) = alg.derived_algebra();
        assert_eq!(derived.dim(), 52);
    }

    #[test]
    fn nis_vect1_gram() {
        let f = Field::gf(3, 1);
        let dp = DpAlgebra::new(&f, &["u"], &[Some(1)], &[]);
        let (alg, fields, _) = vect(&dp);
        let nis = nis_vect1(&dp, &alg, &fields).unwrap();
        // basis order: d, u d, u^(2) d
        let expect = Mat::from_rows(&f, &[vec![0, 0, 1], vec![0, 2, 0], vec![1, 0, 0]]);
        assert_eq!(nis.gram, expect);
        assert!(nis.invariance_violation(&alg).is_none());
        assert!(nis.is_nondegenerate(&f));
        assert!(graded_pairing_check(&alg, &nis).pass());
    }

    #[test]
    fn nis_vect1_rejects_p5() {
        let f = Field::gf(5, 1);
        let dp = DpAlgebra::new(&f, &["u"], &[Some(1)], &[]);
        let (alg, fields, _) = vect(&dp);
        assert!(nis_vect1(&dp, &alg, &fields).is_err());
        // and indeed no NIS exists there
        let space = invariant_forms(&alg, 0);
        let res = find_nis(&f, &space);
        assert!(res.form.is_none());
    }

    #[test]
    fn nis_vect2_p2() {
        let f = Field::gf(2, 1);
        let dp = DpAlgebra::new(&f, &["u1", "u2"], &[Some(1), Some(1)], &[]);
        let (alg, fields, _) = vect(&dp);
        let nis = nis_vect2(&dp, &alg, &fields).unwrap();
        assert!(nis.invariance_violation(&alg).is_none());
        assert!(nis.is_nondegenerate(&f));
    }

    #[test]
    fn h_omega0_dimension_23() {
        let f = Field::gf(5, 1);
        let dp = DpAlgebra::new(&f, &["u1", "u2"], &[Some(1), Some(1)], &[]);
        let ham = build_h_omega(&dp, &SymplecticKind::Omega0).unwrap();
        let (h2, nis2, _) = ham.derived_with_nis(2);
        assert_eq!(h2.dim(), 23);
        assert!(nis2.is_nondegenerate(&f));
        assert!(nis2.invariance_violation(&h2).is_none());
    }

    #[test]
    fn vas_dimension_and_jacobi() {
        let f = Field::gf(3, 1);
        let vas = build_vas(&f).unwrap();
        assert_eq!(vas.alg.dim(), 648);
        assert_eq!(vas.alg.sdim(), (324, 324));
        assert!(vas
            .alg
            .check_jacobi(JacobiMode::Random {
                samples: 2000,
                seed: 23
            })
            .is_empty());
    }

    #[test]
    fn svect3_seed_form_solved() {
        // the divergence-free NIS in three variables: solve the invariant
        // form space and match the seed values
        let f = Field::gf(3, 1);
        let dp = DpAlgebra::new(&f, &["u1", "u2", "u3"], &[Some(1); 3], &[]);
        let (svect, fields, coords) = svect_h(&dp, &VolumeDensity::One).unwrap();
        let (derived, emb) = svect.derived_algebra();
        assert_eq!(derived.dim(), 52);
        let space = invariant_forms(&derived, 0);
        assert!(space.dim() >= 1);
        // coordinates of the seed vectors inside the derived algebra
        let ncells = coords.ncoords();
        let mut ech = Echelon::new(&f);
        for (idx, row) in emb.iter().enumerate() {
            // embedding rows are in svect coordinates; convert to field coords
            let mut fielded = SparseVec::new();
            for (svect_idx, c) in row {
                let v = coords.vectorize(&f, &fields[*svect_idx]);
                crate::linalg::sv_axpy(&f, &mut fielded, c, &v);
            }
            let mut aug = fielded;
            aug.push((ncells + idx, f.one()));
            ech.insert(aug);
        }
        let coords_of = |v: &VField| -> Option<SparseVec> {
            let reduced = ech.reduce(coords.vectorize(&f, v));
            if reduced.iter().any(|(i, _)| *i < ncells) {
                return None;
            }
            let mut out: SparseVec = reduced
                .into_iter()
                .map(|(i, c)| (i - ncells, f.neg(&c)))
                .collect();
            out.sort_by_key(|(i, _)| *i);
            Some(out)
        };
        let seeds = nis_svect3_seed(&dp);
        // find the member of the space matching the first nonzero seed
        let mut matched = None;
        'outer: for cand_idx in 0..space.dim() {
            let cand = &space.basis[cand_idx];
            for (x, y, s) in &seeds {
                if *s == 0 {
                    continue;
                }
                let (cx, cy) = (coords_of(x).unwrap(), coords_of(y).unwrap());
                let v = cand.value(&f, &cx, &cy);
                if !f.is_zero(&v) {
                    let scale = f.div(&f.from_int(*s), &v).unwrap();
                    let mut gram = cand.gram.clone();
                    gram = gram.scale(&f, &scale);
                    matched = Some(BilinearForm { parity: 0, gram });
                    break 'outer;
                }
            }
        }
        let form = matched.expect("seed must pair nontrivially");
        for (x, y, s) in &seeds {
            let (cx, cy) = (coords_of(x).unwrap(), coords_of(y).unwrap());
            assert_eq!(form.value(&f, &cx, &cy), f.from_int(*s));
        }
        assert!(form.is_nondegenerate(&f));
        assert!(form.invariance_violation(&derived).is_none());
        assert!(graded_pairing_check(&derived, &form).pass());
        let rad = form_radical(&derived, &form).unwrap();
        assert_eq!(rad.dim(), 0);
    }
}
