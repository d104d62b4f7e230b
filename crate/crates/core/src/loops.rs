//! Truncated loop (super)algebras with residue pairings and central
//! cocycles, the stringy divergence-type family in one even and two odd
//! Laurent indeterminates with its central extension, and the
//! grading-compatible nondegeneracy search used for the no-NIS certificate.

use crate::algebra::{BasisElem, SuperAlgebra};
use crate::forms::{BilinearForm, FormSpace, NisCertificate, NisResult};
use crate::linalg::{kernel_sparse, sv_axpy, sv_from_dense, Echelon, Mat, SparseVec};
use crate::scalar::{Field, Scalar};
use std::collections::BTreeMap;

/// A truncated loop algebra: target basis vectors spread over Laurent
/// degrees in a symmetric window; brackets beyond the window are dropped
/// and the algebra is flagged truncated by construction.
pub struct LoopAlgebra {
    pub alg: SuperAlgebra,
    /// (target eigenbasis row, Laurent degree) per basis element
    pub layout: Vec<(SparseVec, i64)>,
    pub window: i64,
    pub truncated: bool,
}

/// Builds the loop of `target` over degrees -window..=window. With a twist,
/// the automorphism matrix `psi` must satisfy psi[x,y] = [psi x, psi y];
/// degree k then carries the eigenspace of zeta^k where `zeta` has order
/// `order` in the field.
pub fn loop_build(
    target: &SuperAlgebra,
    twist: Option<(&Mat, &Scalar, u64)>,
    window: i64,
) -> Result<LoopAlgebra, String> {
    let f = target.field.clone();
    let n = target.dim();
    // eigen decomposition per residue class
    let classes: Vec<Vec<SparseVec>> = match twist {
        None => vec![(0..n).map(|i| vec![(i, f.one())]).collect()],
        Some((psi, zeta, order)) => {
            // verify automorphism
            for i in 0..n {
                for j in 0..n {
                    let br = target.bracket_basis(i, j);
                    let mut lhs = SparseVec::new();
                    for (k, c) in &br {
                        let col: SparseVec = (0..n)
                            .filter_map(|r| {
                                let v = psi.at(r, *k);
                                if f.is_zero(v) {
                                    None
                                } else {
                                    Some((r, v.clone()))
                                }
                            })
                            .collect();
                        sv_axpy(&f, &mut lhs, c, &col);
                    }
                    let pi: SparseVec = (0..n)
                        .filter_map(|r| {
                            let v = psi.at(r, i);
                            if f.is_zero(v) {
                                None
                            } else {
                                Some((r, v.clone()))
                            }
                        })
                        .collect();
                    let pj: SparseVec = (0..n)
                        .filter_map(|r| {
                            let v = psi.at(r, j);
                            if f.is_zero(v) {
                                None
                            } else {
                                Some((r, v.clone()))
                            }
                        })
                        .collect();
                    let rhs = target.bracket(&pi, &pj);
                    let mut diff = lhs;
                    sv_axpy(&f, &mut diff, &f.from_int(-1), &rhs);
                    if !diff.is_empty() {
                        return Err(format!("twist is not an automorphism at pair ({i},{j})"));
                    }
                }
            }
            let mut classes = Vec::new();
            let mut total = 0;
            for k in 0..order {
                let ev = f.pow(zeta, k as i64);
                // kernel of psi - ev
                let mut m = psi.clone();
                for d in 0..n {
                    let cur = m.at(d, d).clone();
                    *m.at_mut(d, d) = f.sub(&cur, &ev);
                }
                let kernel = m.kernel(&f);
                let rows: Vec<SparseVec> =
                    kernel.iter().map(|v| sv_from_dense(&f, v)).collect();
                total += rows.len();
                classes.push(rows);
            }
            if total != n {
                return Err("twist is not diagonalizable over this field".into());
            }
            classes
        }
    };
    let order = classes.len() as i64;
    // global basis: degrees ascending, eigen rows within
    let mut layout: Vec<(SparseVec, i64)> = Vec::new();
    let mut basis = Vec::new();
    for k in -window..=window {
        let class = (k.rem_euclid(order)) as usize;
        for (ri, row) in classes[class].iter().enumerate() {
            let parity = row
                .first()
                .map(|(i, _)| target.parity(*i))
                .unwrap_or(0);
            basis.push(BasisElem {
                name: format!("t^{k}.{ri}"),
                parity,
                degree: Some(k),
            });
            layout.push((row.clone(), k));
        }
    }
    // echelon per class for expressing brackets
    let mut class_ech: Vec<Echelon> = Vec::new();
    for class in &classes {
        let mut ech = Echelon::new(&f);
        for (ri, row) in class.iter().enumerate() {
            let mut aug = row.clone();
            aug.push((n + ri, f.one()));
            ech.insert(aug);
        }
        class_ech.push(ech);
    }
    let index_of = |k: i64, ri: usize| -> usize {
        let mut idx = 0;
        for kk in -window..k {
            idx += classes[(kk.rem_euclid(order)) as usize].len();
        }
        idx + ri
    };
    let mut raw = Vec::new();
    for (a, (ra, ka)) in layout.iter().enumerate() {
        for (b, (rb, kb)) in layout.iter().enumerate().skip(a) {
            if a == b && !(basis[a].parity == 1 && f.characteristic() != 2) {
                continue;
            }
            let ksum = ka + kb;
            if ksum.abs() > window {
                continue; // truncated
            }
            let br = target.bracket(ra, rb);
            if br.is_empty() {
                continue;
            }
            let class = (ksum.rem_euclid(order)) as usize;
            let reduced = class_ech[class].reduce(br);
            if reduced.iter().any(|(i, _)| *i < n) {
                return Err("bracket leaves its eigenclass".into());
            }
            let mut vec: SparseVec = reduced
                .into_iter()
                .map(|(i, c)| (index_of(ksum, i - n), f.neg(&c)))
                .collect();
            vec.sort_by_key(|(i, _)| *i);
            if !vec.is_empty() {
                raw.push((a, b, vec));
            }
        }
    }
    let alg = SuperAlgebra::new(f, basis, raw, None)
        .map_err(|e| e.to_string())?
        .with_meta("loop", &[]);
    Ok(LoopAlgebra {
        alg,
        layout,
        window,
        truncated: true,
    })
}

impl LoopAlgebra {
    /// Interior triple: every partial bracket stays inside the window.
    pub fn interior(&self, i: usize, j: usize, k: usize) -> bool {
        let di = self.layout[i].1;
        let dj = self.layout[j].1;
        let dk = self.layout[k].1;
        (di + dj).abs() <= self.window
            && (dj + dk).abs() <= self.window
            && (di + dj + dk).abs() <= self.window
    }

    /// Residue pairing against a target pairing: degree k pairs with -k-shift.
    /// The shift defaults to 0; when the populated degree pattern makes that
    /// pairing empty (the queer twisted case), the honest residue shift -1
    /// is used instead.
    pub fn residue_nis(&self, target_pair: &BilinearForm) -> BilinearForm {
        let f = self.field();
        for shift in [0i64, -1] {
            let gram = self.residue_gram(target_pair, shift);
            if !gram.is_zero(&f) {
                return BilinearForm {
                    parity: target_pair.parity,
                    gram,
                };
            }
        }
        BilinearForm {
            parity: target_pair.parity,
            gram: Mat::zero(&f, self.alg.dim(), self.alg.dim()),
        }
    }

    fn field(&self) -> Field {
        self.alg.field.clone()
    }

    fn residue_gram(&self, target_pair: &BilinearForm, shift: i64) -> Mat {
        let f = self.field();
        let nb = self.alg.dim();
        let mut gram = Mat::zero(&f, nb, nb);
        for a in 0..nb {
            for b in 0..nb {
                let (ra, ka) = &self.layout[a];
                let (rb, kb) = &self.layout[b];
                if ka + kb != shift {
                    continue;
                }
                *gram.at_mut(a, b) = target_pair.value(&f, ra, rb);
            }
        }
        gram
    }

    /// Central extension values c(x t^a, y t^b) = b delta_{a+b,0} pair(x,y).
    pub fn central_cocycle(&self, target_pair: &BilinearForm, a: usize, b: usize) -> Scalar {
        let f = self.field();
        let (ra, ka) = &self.layout[a];
        let (rb, kb) = &self.layout[b];
        if ka + kb != 0 {
            return f.zero();
        }
        let v = target_pair.value(&f, ra, rb);
        f.mul(&f.from_int(*kb), &v)
    }

    /// Verifies the cocycle identity on interior triples by building the
    /// one-dimensional central extension and running the Jacobi check there.
    pub fn cocycle_violations(&self, target_pair: &BilinearForm) -> Vec<(usize, usize, usize)> {
        let f = self.field();
        let nb = self.alg.dim();
        let mut raw: Vec<(usize, usize, SparseVec)> = Vec::new();
        for ((i, j), v) in self.alg.stored_brackets() {
            raw.push((*i as usize, *j as usize, v.clone()));
        }
        for i in 0..nb {
            for j in i..nb {
                if i == j && self.alg.parity(i) == 0 {
                    continue;
                }
                let c = self.central_cocycle(target_pair, i, j);
                if !f.is_zero(&c) {
                    raw.push((i, j, vec![(nb, c)]));
                }
            }
        }
        let mut basis = self.alg.basis.clone();
        for b in basis.iter_mut() {
            b.degree = None;
        }
        basis.push(BasisElem {
            name: "center".into(),
            parity: target_pair.parity,
            degree: None,
        });
        let Ok(ext) = SuperAlgebra::new(f, basis, raw, None) else {
            return vec![(usize::MAX, usize::MAX, usize::MAX)];
        };
        let mut out = Vec::new();
        for i in 0..nb {
            for j in 0..nb {
                for k in 0..nb {
                    if !self.interior(i, j, k) {
                        continue;
                    }
                    if !jacobi_triple_ok(&ext, i, j, k) {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }

    /// Invariance of a form on interior triples only.
    pub fn interior_invariance_violation(
        &self,
        form: &BilinearForm,
    ) -> Option<(usize, usize, usize)> {
        let f = self.field();
        let nb = self.alg.dim();
        for i in 0..nb {
            for j in 0..nb {
                let bij = self.alg.bracket_basis(i, j);
                for k in 0..nb {
                    if !self.interior(i, j, k) {
                        continue;
                    }
                    let lhs = form.value(&f, &bij, &[(k, f.one())]);
                    let rhs = form.value(&f, &[(i, f.one())], &self.alg.bracket_basis(j, k));
                    if lhs != rhs {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}

pub fn jacobi_triple_ok(alg: &SuperAlgebra, i: usize, j: usize, k: usize) -> bool {
    let f = &alg.field;
    let a = alg.bracket(&alg.bracket_basis(i, j), &[(k, f.one())]);
    let b = alg.bracket(&[(i, f.one())], &alg.bracket_basis(j, k));
    let c = alg.bracket(&[(j, f.one())], &alg.bracket_basis(i, k));
    let mut acc = b;
    sv_axpy(f, &mut acc, &f.from_int(-1), &a);
    let sign = if alg.parity(i) == 1 && alg.parity(j) == 1 && f.characteristic() != 2 {
        f.one()
    } else {
        f.from_int(-1)
    };
    sv_axpy(f, &mut acc, &sign, &c);
    acc.is_empty()
}

/// Grading-compatible nondegeneracy search: solves for supersymmetric forms
/// that pair only degrees summing to zero and are invariant on the given
/// triples, then looks for a nondegenerate member.
pub fn graded_nis_search(
    alg: &SuperAlgebra,
    parity: u8,
    interior: &dyn Fn(usize, usize, usize) -> bool,
) -> (FormSpace, NisResult) {
    let f = &alg.field;
    let n = alg.dim();
    let deg = |i: usize| alg.basis[i].degree.unwrap_or(0);
    // unknowns: pairs i <= j with deg sum 0 and matching parity
    let char2 = f.characteristic() == 2;
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i..n {
            if deg(i) + deg(j) != 0 {
                continue;
            }
            if (alg.parity(i) + alg.parity(j)) % 2 != parity {
                continue;
            }
            if i == j && alg.parity(i) == 1 && !char2 {
                continue;
            }
            index.insert((i, j), pairs.len());
            pairs.push((i, j));
        }
    }
    let var_of = |a: usize, b: usize| -> Option<(usize, bool)> {
        let (lo, hi, flipped) = if a <= b { (a, b, false) } else { (b, a, true) };
        let id = index.get(&(lo, hi))?;
        let neg = flipped && alg.parity(a) == 1 && alg.parity(b) == 1 && !char2;
        Some((*id, neg))
    };
    let mut ech = Echelon::new(f);
    for i in 0..n {
        for j in 0..n {
            let bij = alg.bracket_basis(i, j);
            for k in 0..n {
                if !interior(i, j, k) {
                    continue;
                }
                let bjk = alg.bracket_basis(j, k);
                if bij.is_empty() && bjk.is_empty() {
                    continue;
                }
                let mut row: BTreeMap<usize, Scalar> = BTreeMap::new();
                for (l, c) in &bij {
                    if let Some((var, neg)) = var_of(*l, k) {
                        let entry = row.entry(var).or_insert_with(|| f.zero());
                        let v = if neg { f.neg(c) } else { c.clone() };
                        *entry = f.add(entry, &v);
                    }
                }
                for (l, c) in &bjk {
                    if let Some((var, neg)) = var_of(i, *l) {
                        let entry = row.entry(var).or_insert_with(|| f.zero());
                        let v = if neg { c.clone() } else { f.neg(c) };
                        *entry = f.add(entry, &v);
                    }
                }
                let row: SparseVec = row.into_iter().filter(|(_, c)| !f.is_zero(c)).collect();
                if !row.is_empty() {
                    ech.insert(row);
                }
            }
        }
    }
    let pivot_set: std::collections::BTreeSet<usize> = ech.pivots().into_iter().collect();
    let mut basis_forms = Vec::new();
    for free in 0..pairs.len() {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut coeffs = vec![f.zero(); pairs.len()];
        coeffs[free] = f.one();
        for (p, row) in ech.rows() {
            if let Some(c) = crate::linalg::sv_get(row, free) {
                coeffs[*p] = f.neg(c);
            }
        }
        let mut gram = Mat::zero(f, n, n);
        for (var, c) in coeffs.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            let (i, j) = pairs[var];
            *gram.at_mut(i, j) = c.clone();
            if i != j {
                let flip = alg.parity(i) == 1 && alg.parity(j) == 1 && !char2;
                *gram.at_mut(j, i) = if flip { f.neg(c) } else { c.clone() };
            }
        }
        basis_forms.push(BilinearForm { parity, gram });
    }
    let space = FormSpace {
        parity,
        basis: basis_forms,
    };
    let result = nis_search_with_radical(f, &space);
    (space, result)
}

fn nis_search_with_radical(f: &Field, space: &FormSpace) -> NisResult {
    if space.dim() == 0 {
        return NisResult {
            form: None,
            certificate: NisCertificate::EmptySpace,
        };
    }
    let n = space.basis[0].dim();
    let mut stacked: Vec<SparseVec> = Vec::new();
    for b in &space.basis {
        let gt = b.gram.transpose();
        for i in 0..n {
            let row = gt.row_sparse(f, i);
            if !row.is_empty() {
                stacked.push(row);
            }
        }
    }
    let common = kernel_sparse(f, &stacked, n);
    if let Some(v) = common.first() {
        return NisResult {
            form: None,
            certificate: NisCertificate::CommonRadical(v.clone()),
        };
    }
    crate::forms::find_nis(f, space)
}

// ---------------------------------------------------------------------------
// Stringy family in one even Laurent and two odd indeterminates.

/// Laurent superpolynomial over the rationals: t^k theta-mask terms.
#[derive(Clone, Debug, PartialEq)]
pub struct LPoly {
    pub terms: BTreeMap<(i64, u8), Scalar>,
}

impl LPoly {
    pub fn zero() -> LPoly {
        LPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn term(f: &Field, k: i64, mask: u8, c: Scalar) -> LPoly {
        let mut terms = BTreeMap::new();
        if !f.is_zero(&c) {
            terms.insert((k, mask), c);
        }
        LPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_assign(&mut self, f: &Field, other: &LPoly) {
        for (key, c) in &other.terms {
            let entry = self.terms.entry(*key).or_insert_with(|| f.zero());
            *entry = f.add(entry, c);
            if f.is_zero(entry) {
                self.terms.remove(key);
            }
        }
    }

    pub fn scale(&self, f: &Field, c: &Scalar) -> LPoly {
        if f.is_zero(c) {
            return LPoly::zero();
        }
        LPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, f.mul(v, c)))
                .collect(),
        }
    }

    pub fn mul(&self, f: &Field, other: &LPoly) -> LPoly {
        let mut out = LPoly::zero();
        for ((ka, ma), ca) in &self.terms {
            for ((kb, mb), cb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                // Koszul: one inversion when theta2 passes theta1
                let mut c = f.mul(ca, cb);
                if ma & 0b10 != 0 && mb & 0b01 != 0 {
                    c = f.neg(&c);
                }
                let key = (ka + kb, ma | mb);
                let entry = out.terms.entry(key).or_insert_with(|| f.zero());
                *entry = f.add(entry, &c);
                if f.is_zero(entry) {
                    out.terms.remove(&key);
                }
            }
        }
        out
    }

    /// d/dt with ordinary powers.
    pub fn dt(&self, f: &Field) -> LPoly {
        let mut out = LPoly::zero();
        for ((k, m), c) in &self.terms {
            if *k == 0 {
                continue;
            }
            let v = f.mul(c, &f.from_int(*k));
            if !f.is_zero(&v) {
                out.terms.insert((k - 1, *m), v);
            }
        }
        out
    }

    /// Left derivative with respect to theta_j (j = 0 or 1).
    pub fn dtheta(&self, f: &Field, j: usize) -> LPoly {
        let bit = 1u8 << j;
        let mut out = LPoly::zero();
        for ((k, m), c) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let below = (m & (bit - 1)).count_ones();
            let v = if below % 2 == 1 { f.neg(c) } else { c.clone() };
            let entry = out.terms.entry((*k, m & !bit)).or_insert_with(|| f.zero());
            *entry = f.add(entry, &v);
        }
        out
    }

    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys();
        let first = (it.next()?.1.count_ones() % 2) as u8;
        for (_, m) in it {
            if (m.count_ones() % 2) as u8 != first {
                return None;
            }
        }
        Some(first)
    }
}

/// Vector field f dt + f1 dtheta1 + f2 dtheta2 with Laurent coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LField {
    pub coeffs: [LPoly; 3],
}

impl LField {
    pub fn zero() -> LField {
        LField {
            coeffs: [LPoly::zero(), LPoly::zero(), LPoly::zero()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, f: &Field, other: &LField) -> LField {
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_assign(f, b);
        }
        out
    }

    pub fn scale(&self, f: &Field, c: &Scalar) -> LField {
        LField {
            coeffs: [
                self.coeffs[0].scale(f, c),
                self.coeffs[1].scale(f, c),
                self.coeffs[2].scale(f, c),
            ],
        }
    }

    pub fn apply(&self, f: &Field, g: &LPoly) -> LPoly {
        let mut out = self.coeffs[0].mul(f, &g.dt(f));
        out.add_assign(f, &self.coeffs[1].mul(f, &g.dtheta(f, 0)));
        out.add_assign(f, &self.coeffs[2].mul(f, &g.dtheta(f, 1)));
        out
    }

    pub fn parity(&self) -> Option<u8> {
        let mut parity = None;
        for (v, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let pv = if v == 0 { 0u8 } else { 1 };
            let pc = c.parity()?;
            let total = (pc + pv) % 2;
            match parity {
                None => parity = Some(total),
                Some(q) if q != total => return None,
                _ => {}
            }
        }
        Some(parity.unwrap_or(0))
    }

    pub fn commutator(&self, f: &Field, other: &LField) -> LField {
        let pa = self.parity().expect("homogeneous");
        let pb = other.parity().expect("homogeneous");
        let sign = if pa == 1 && pb == 1 {
            f.one()
        } else {
            f.from_int(-1)
        };
        let mut out = LField::zero();
        for w in 0..3 {
            let mut c = self.apply(f, &other.coeffs[w]);
            c.add_assign(f, &other.apply(f, &self.coeffs[w]).scale(f, &sign));
            out.coeffs[w] = c;
        }
        out
    }

    /// Divergence dt(f) + (-1)^{p} per-component odd derivatives.
    pub fn divergence(&self, f: &Field) -> LPoly {
        let mut out = self.coeffs[0].dt(f);
        for j in 0..2 {
            for ((k, m), c) in &self.coeffs[j + 1].terms {
                let sign = if m.count_ones() % 2 == 1 {
                    f.from_int(-1)
                } else {
                    f.one()
                };
                let single = LPoly::term(f, *k, *m, f.mul(c, &sign));
                out.add_assign(f, &single.dtheta(f, j));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StringyFamily {
    L,
    E,
    F,
    G,
    Lam,
    Eps,
    Phi,
    Gam,
}

pub const STRINGY_FAMILIES: [StringyFamily; 8] = [
    StringyFamily::L,
    StringyFamily::E,
    StringyFamily::F,
    StringyFamily::G,
    StringyFamily::Lam,
    StringyFamily::Eps,
    StringyFamily::Phi,
    StringyFamily::Gam,
];

pub struct StringyAlgebra {
    pub alg: SuperAlgebra,
    pub fields: Vec<LField>,
    /// (family, loop index n) per basis element
    pub kinds: Vec<(StringyFamily, i64)>,
    pub alpha: Scalar,
    pub window: i64,
}

fn half(f: &Field, v: &Scalar) -> Scalar {
    f.div(v, &f.from_int(2)).expect("characteristic != 2")
}

pub fn stringy_field(f: &Field, alpha: &Scalar, fam: StringyFamily, n: i64) -> LField {
    let mut out = LField::zero();
    let one = f.one();
    match fam {
        StringyFamily::L => {
            // t^n (t dt + (n+1+alpha)/2 (th1 d1 + th2 d2))
            out.coeffs[0] = LPoly::term(f, n + 1, 0, one.clone());
            let coef = half(f, &f.add(&f.from_int(n + 1), alpha));
            out.coeffs[1] = LPoly::term(f, n, 0b01, coef.clone());
            out.coeffs[2] = LPoly::term(f, n, 0b10, coef);
        }
        StringyFamily::E => {
            out.coeffs[1] = LPoly::term(f, n, 0b10, one);
        }
        StringyFamily::F => {
            out.coeffs[2] = LPoly::term(f, n, 0b01, one);
        }
        StringyFamily::G => {
            out.coeffs[2] = LPoly::term(f, n, 0b10, one.clone());
            out.coeffs[1] = LPoly::term(f, n, 0b01, f.neg(&one));
        }
        StringyFamily::Lam => {
            // t^{n-1} th2 (t dt + (n+alpha) th1 d1)
            out.coeffs[0] = LPoly::term(f, n, 0b10, one);
            let coef = f.add(&f.from_int(n), alpha);
            // th2 th1 = -th1 th2
            out.coeffs[1] = LPoly::term(f, n - 1, 0b11, f.neg(&coef));
        }
        StringyFamily::Eps => {
            out.coeffs[0] = LPoly::term(f, n, 0b01, one);
            let coef = f.add(&f.from_int(n), alpha);
            out.coeffs[2] = LPoly::term(f, n - 1, 0b11, coef);
        }
        StringyFamily::Phi => {
            out.coeffs[1] = LPoly::term(f, n + 1, 0, one);
        }
        StringyFamily::Gam => {
            out.coeffs[2] = LPoly::term(f, n + 1, 0, one);
        }
    }
    out
}

/// Principal degree of a family member under the grading with the three
/// distinguished generators in degrees +-1.
pub fn principal_degree(fam: StringyFamily, n: i64) -> i64 {
    match fam {
        StringyFamily::L | StringyFamily::G => 3 * n,
        StringyFamily::E => 3 * n - 1,
        StringyFamily::F => 3 * n + 1,
        StringyFamily::Lam => 3 * n - 2,
        StringyFamily::Eps => 3 * n - 1,
        StringyFamily::Phi => 3 * n + 1,
        StringyFamily::Gam => 3 * n + 2,
    }
}

fn family_parity(fam: StringyFamily) -> u8 {
    match fam {
        StringyFamily::L | StringyFamily::E | StringyFamily::F | StringyFamily::G => 0,
        _ => 1,
    }
}

/// Builds the truncated stringy algebra with loop indices |n| <= window.
pub fn build_stringy(field: &Field, alpha: &Scalar, window: i64) -> Result<StringyAlgebra, String> {
    if field.characteristic() != 0 {
        return Err("the stringy family is built over characteristic 0".into());
    }
    // alpha must avoid integers for simplicity; sample values like 1/2 do
    if alpha.as_rat().map(|r| r.denom() == &num_bigint::BigInt::from(1)) == Some(true) {
        return Err("alpha must not be an integer".into());
    }
    if window < 3 {
        return Err("window must be at least 3".into());
    }
    let f = field;
    let mut kinds = Vec::new();
    let mut fields = Vec::new();
    let mut basis = Vec::new();
    for n in -window..=window {
        for fam in STRINGY_FAMILIES {
            kinds.push((fam, n));
            fields.push(stringy_field(f, alpha, fam, n));
            basis.push(BasisElem {
                name: format!("{fam:?}{n}"),
                parity: family_parity(fam),
                degree: Some(principal_degree(fam, n)),
            });
        }
    }
    // membership: alpha f = -t Div D for every basis field
    for (i, d) in fields.iter().enumerate() {
        let mut lhs = d.coeffs[0].scale(f, alpha);
        let mut tdiv = LPoly::zero();
        for ((k, m), c) in d.divergence(f).terms.iter() {
            tdiv.terms.insert((k + 1, *m), c.clone());
        }
        lhs.add_assign(f, &tdiv);
        if !lhs.is_zero() {
            return Err(format!("field {i} fails the divergence membership"));
        }
    }
    // brackets, expressed slot by slot through the weight structure
    let index_of = |fam: StringyFamily, n: i64| -> Option<usize> {
        if n.abs() > window {
            return None;
        }
        let fam_pos = STRINGY_FAMILIES.iter().position(|x| *x == fam).unwrap();
        Some(((n + window) as usize) * 8 + fam_pos)
    };
    // weight of a field: (t-shift a, theta1-shift b, theta2-shift c)
    let weight = |fam: StringyFamily, n: i64| -> (i64, i64, i64) {
        match fam {
            StringyFamily::L | StringyFamily::G => (n, 0, 0),
            StringyFamily::E => (n, -1, 1),
            StringyFamily::F => (n, 1, -1),
            StringyFamily::Lam => (n - 1, 0, 1),
            StringyFamily::Eps => (n - 1, 1, 0),
            StringyFamily::Phi => (n + 1, -1, 0),
            StringyFamily::Gam => (n + 1, 0, -1),
        }
    };
    let families_of_weight = |w: (i64, i64, i64)| -> Vec<(StringyFamily, i64)> {
        let mut out = Vec::new();
        for fam in STRINGY_FAMILIES {
            let n = match fam {
                StringyFamily::L | StringyFamily::G => w.0,
                StringyFamily::E | StringyFamily::F => w.0,
                StringyFamily::Lam | StringyFamily::Eps => w.0 + 1,
                StringyFamily::Phi | StringyFamily::Gam => w.0 - 1,
            };
            if weight(fam, n) == w {
                out.push((fam, n));
            }
        }
        out
    };
    let nb = fields.len();
    let mut raw = Vec::new();
    for a in 0..nb {
        for b in a..nb {
            let pa = family_parity(kinds[a].0);
            if a == b && pa == 0 {
                continue;
            }
            let br = fields[a].commutator(f, &fields[b]);
            if br.is_zero() {
                continue;
            }
            let wa = weight(kinds[a].0, kinds[a].1);
            let wb = weight(kinds[b].0, kinds[b].1);
            let w = (wa.0 + wb.0, wa.1 + wb.1, wa.2 + wb.2);
            let slots = families_of_weight(w);
            // if every slot is out of window, truncate
            let present: Vec<(StringyFamily, i64, usize)> = slots
                .iter()
                .filter_map(|(fam, n)| index_of(*fam, *n).map(|i| (*fam, *n, i)))
                .collect();
            if present.is_empty() {
                continue;
            }
            // solve a tiny system: br = sum coeff_s field(slot_s)
            let mut residual = br.clone();
            let mut vec = SparseVec::new();
            // L and G share a slot; treat by matching distinct coefficients
            for (fam, n, idx) in &present {
                let cand = stringy_field(f, alpha, *fam, *n);
                // pick a monomial unique to this candidate within the slot
                let probe = match fam {
                    StringyFamily::L => (0usize, (n + 1, 0u8)),
                    StringyFamily::G => (2usize, (*n, 0b10)),
                    StringyFamily::E => (1, (*n, 0b10)),
                    StringyFamily::F => (2, (*n, 0b01)),
                    StringyFamily::Lam => (0, (*n, 0b10)),
                    StringyFamily::Eps => (0, (*n, 0b01)),
                    StringyFamily::Phi => (1, (n + 1, 0)),
                    StringyFamily::Gam => (2, (n + 1, 0)),
                };
                let denom = cand.coeffs[probe.0]
                    .terms
                    .get(&probe.1)
                    .cloned()
                    .unwrap_or_else(|| f.zero());
                let num = residual.coeffs[probe.0]
                    .terms
                    .get(&probe.1)
                    .cloned()
                    .unwrap_or_else(|| f.zero());
                if f.is_zero(&num) {
                    continue;
                }
                // the G component of an L-slot shares the theta monomials;
                // resolve L first via its unique dt component
                let coef = f.div(&num, &denom).ok_or("degenerate slot probe")?;
                residual = residual.add(f, &cand.scale(f, &f.neg(&coef)));
                vec.push((*idx, coef));
            }
            if !residual.is_zero() {
                return Err(format!(
                    "bracket of {:?} and {:?} escaped the family span",
                    kinds[a], kinds[b]
                ));
            }
            vec.sort_by_key(|(i, _)| *i);
            if !vec.is_empty() {
                raw.push((a, b, vec));
            }
        }
    }
    let alg = SuperAlgebra::new(f.clone(), basis, raw, None)
        .map_err(|e| e.to_string())?
        .with_meta("svect_stringy", &[("alpha", f.format(alpha))]);
    Ok(StringyAlgebra {
        alg,
        fields,
        kinds,
        alpha: alpha.clone(),
        window,
    })
}

impl StringyAlgebra {
    pub fn index_of(&self, fam: StringyFamily, n: i64) -> Option<usize> {
        if n.abs() > self.window {
            return None;
        }
        let fam_pos = STRINGY_FAMILIES.iter().position(|x| *x == fam).unwrap();
        Some(((n + self.window) as usize) * 8 + fam_pos)
    }

    /// Loop-style interior predicate on the t-weight.
    pub fn interior(&self, i: usize, j: usize, k: usize) -> bool {
        let tdeg = |x: usize| -> i64 {
            let (fam, n) = self.kinds[x];
            match fam {
                StringyFamily::Lam | StringyFamily::Eps => n - 1,
                StringyFamily::Phi | StringyFamily::Gam => n + 1,
                _ => n,
            }
        };
        let (a, b, c) = (tdeg(i), tdeg(j), tdeg(k));
        let m = self.window - 1;
        (a + b).abs() <= m && (b + c).abs() <= m && (a + b + c).abs() <= m
    }

    /// The outer grading operator action as a derivation matrix.
    pub fn outer_derivation(&self) -> Result<Vec<SparseVec>, String> {
        let f = &self.alg.field;
        let e_alpha = {
            let mut d = LField::zero();
            d.coeffs[0] = LPoly::term(f, 1, 0, f.one());
            d.coeffs[1] = LPoly::term(f, 0, 0b01, self.alpha.clone());
            d.coeffs[2] = LPoly::term(f, 0, 0b10, f.one());
            d
        };
        let mut out = Vec::new();
        for (i, x) in self.fields.iter().enumerate() {
            let br = e_alpha.commutator(f, x);
            // [E_alpha, X] is proportional to X for homogeneous X
            if br.is_zero() {
                out.push(SparseVec::new());
                continue;
            }
            // find the scalar
            let (fam, n) = self.kinds[i];
            let cand = stringy_field(f, &self.alpha, fam, n);
            let mut ratio = None;
            'outer: for (w, comp) in cand.coeffs.iter().enumerate() {
                for (key, c) in &comp.terms {
                    if let Some(v) = br.coeffs[w].terms.get(key) {
                        ratio = Some(f.div(v, c).unwrap());
                        break 'outer;
                    }
                }
            }
            let Some(r) = ratio else {
                return Err("outer action not diagonal".into());
            };
            let check = cand.scale(f, &r);
            let mut diff = br.clone();
            for w in 0..3 {
                diff.coeffs[w].add_assign(f, &check.coeffs[w].scale(f, &f.from_int(-1)));
            }
            if !diff.is_zero() {
                // the L/G slot mixes; express via both candidates
                let gidx = self.index_of(StringyFamily::G, n);
                let lidx = self.index_of(StringyFamily::L, n);
                let (Some(_), Some(_)) = (gidx, lidx) else {
                    return Err("outer action escaped the span".into());
                };
                // generic solve over the two candidates
                let lcand = stringy_field(f, &self.alpha, StringyFamily::L, n);
                let gcand = stringy_field(f, &self.alpha, StringyFamily::G, n);
                let lden = lcand.coeffs[0]
                    .terms
                    .get(&(n + 1, 0))
                    .cloned()
                    .unwrap_or_else(|| f.zero());
                let lnum = br.coeffs[0]
                    .terms
                    .get(&(n + 1, 0))
                    .cloned()
                    .unwrap_or_else(|| f.zero());
                let lcoef = f.div(&lnum, &lden).unwrap();
                let mut rem = br.clone();
                let sc = lcand.scale(f, &f.neg(&lcoef));
                for w in 0..3 {
                    rem.coeffs[w].add_assign(f, &sc.coeffs[w]);
                }
                let gden = gcand.coeffs[2]
                    .terms
                    .get(&(n, 0b10))
                    .cloned()
                    .unwrap_or_else(|| f.zero());
                let gnum = rem.coeffs[2]
                    .terms
                    .get(&(n, 0b10))
                    .cloned()
                    .unwrap_or_else(|| f.zero());
                let gcoef = f.div(&gnum, &gden).unwrap();
                let mut vec = SparseVec::new();
                if !f.is_zero(&lcoef) {
                    vec.push((lidx.unwrap(), lcoef));
                }
                if !f.is_zero(&gcoef) {
                    vec.push((gidx.unwrap(), gcoef));
                }
                vec.sort_by_key(|(t, _)| *t);
                out.push(vec);
                continue;
            }
            out.push(vec![(i, r)]);
        }
        Ok(out)
    }

    /// Solves the central-extension cocycle on weight-zero pairs from the
    /// cocycle identity on interior triples, gauge-fixed by the three
    /// normalizations, and returns the values c(L_m, L_-m), c(G_m, G_-m),
    /// c(F_m, E_-m) for 1 <= m <= max_m.
    pub fn solved_cocycle_values(
        &self,
        max_m: i64,
    ) -> Result<(Vec<Scalar>, Vec<Scalar>, Vec<Scalar>), String> {
        use StringyFamily::*;
        let f = &self.alg.field;
        let d = self.window;
        // unknowns: canonical ordered weight-zero pairs
        let mut pair_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut pair_list: Vec<(usize, usize)> = Vec::new();
        let mut add_pair = |a: usize, b: usize,
                            pair_index: &mut BTreeMap<(usize, usize), usize>,
                            pair_list: &mut Vec<(usize, usize)>| {
            let key = if a <= b { (a, b) } else { (b, a) };
            if !pair_index.contains_key(&key) {
                pair_index.insert(key, pair_list.len());
                pair_list.push(key);
            }
        };
        for m in -d..=d {
            if let (Some(a), Some(b)) = (self.index_of(L, m), self.index_of(L, -m)) {
                add_pair(a, b, &mut pair_index, &mut pair_list);
            }
            if let (Some(a), Some(b)) = (self.index_of(L, m), self.index_of(G, -m)) {
                add_pair(a, b, &mut pair_index, &mut pair_list);
            }
            if let (Some(a), Some(b)) = (self.index_of(G, m), self.index_of(G, -m)) {
                add_pair(a, b, &mut pair_index, &mut pair_list);
            }
            if let (Some(a), Some(b)) = (self.index_of(E, m), self.index_of(F, -m)) {
                add_pair(a, b, &mut pair_index, &mut pair_list);
            }
            if let (Some(a), Some(b)) = (self.index_of(Phi, m), self.index_of(Eps, -m)) {
                add_pair(a, b, &mut pair_index, &mut pair_list);
            }
            if let (Some(a), Some(b)) = (self.index_of(Gam, m), self.index_of(Lam, -m)) {
                add_pair(a, b, &mut pair_index, &mut pair_list);
            }
        }
        let nvars = pair_list.len();
        // c(a, b) as a sparse row over unknowns, with the antisymmetry sign
        let c_of = |a: usize, b: usize| -> Option<(usize, bool)> {
            let (lo, hi, flipped) = if a <= b { (a, b, false) } else { (b, a, true) };
            let id = pair_index.get(&(lo, hi))?;
            // even cocycle: c(x,y) = -(-1)^{p(x)p(y)} c(y,x)
            let both_odd = self.alg.parity(a) == 1 && self.alg.parity(b) == 1;
            let neg = flipped && !both_odd;
            Some((*id, neg))
        };
        // cocycle identity rows on interior triples:
        // c([x,y],z) - c(x,[y,z]) + (-1)^{p(x)p(y)} c(y,[x,z]) = 0
        let nb = self.alg.dim();
        let mut ech = Echelon::new(f);
        for i in 0..nb {
            for j in 0..nb {
                let bij = self.alg.bracket_basis(i, j);
                for k in 0..nb {
                    if !self.interior(i, j, k) {
                        continue;
                    }
                    let mut row: BTreeMap<usize, Scalar> = BTreeMap::new();
                    let mut add = |var: usize, v: Scalar, row: &mut BTreeMap<usize, Scalar>| {
                        let entry = row.entry(var).or_insert_with(|| f.zero());
                        *entry = f.add(entry, &v);
                    };
                    for (l, c) in &bij {
                        if let Some((var, neg)) = c_of(*l, k) {
                            add(var, if neg { f.neg(c) } else { c.clone() }, &mut row);
                        }
                    }
                    for (l, c) in &self.alg.bracket_basis(j, k) {
                        if let Some((var, neg)) = c_of(i, *l) {
                            let v = f.neg(c);
                            add(var, if neg { f.neg(&v) } else { v }, &mut row);
                        }
                    }
                    let sign = if self.alg.parity(i) == 1 && self.alg.parity(j) == 1 {
                        f.one()
                    } else {
                        f.from_int(-1)
                    };
                    for (l, c) in &self.alg.bracket_basis(i, k) {
                        if let Some((var, neg)) = c_of(j, *l) {
                            let v = f.mul(&f.neg(&sign), c);
                            add(var, if neg { f.neg(&v) } else { v }, &mut row);
                        }
                    }
                    let row: SparseVec =
                        row.into_iter().filter(|(_, c)| !f.is_zero(c)).collect();
                    if !row.is_empty() {
                        ech.insert(row);
                    }
                }
            }
        }
        // gauge fixing: c(F_0, E_0) = 0, c(L_1, L_-1) = (1 - (alpha+1)^2)/2,
        // c(G_1, G_-1) = 1
        let key_of = |fa: StringyFamily, m: i64, fb: StringyFamily, n: i64| -> usize {
            let a = self.index_of(fa, m).unwrap();
            let b = self.index_of(fb, n).unwrap();
            let key = if a <= b { (a, b) } else { (b, a) };
            pair_index[&key]
        };
        let mut constraints: Vec<(SparseVec, Scalar)> = Vec::new();
        constraints.push((vec![(key_of(E, 0, F, 0), f.one())], f.zero()));
        let ap1 = f.add(&self.alpha, &f.one());
        let l1_expect = half(f, &f.sub(&f.one(), &f.mul(&ap1, &ap1)));
        // canonical pair stores c(L_{-1}, L_1) when -1-index < 1-index;
        // orientation bookkeeping handled through c_of below
        let (l1var, l1neg) = c_of(
            self.index_of(L, 1).unwrap(),
            self.index_of(L, -1).unwrap(),
        )
        .unwrap();
        constraints.push((
            vec![(l1var, f.one())],
            if l1neg { f.neg(&l1_expect) } else { l1_expect },
        ));
        let (g1var, g1neg) = c_of(
            self.index_of(G, 1).unwrap(),
            self.index_of(G, -1).unwrap(),
        )
        .unwrap();
        constraints.push((
            vec![(g1var, f.one())],
            if g1neg { f.neg(&f.one()) } else { f.one() },
        ));
        // assemble: solve the combined affine system
        let mut rows: Vec<SparseVec> = Vec::new();
        let mut rhs: Vec<Scalar> = Vec::new();
        for (p, r) in ech.rows() {
            let _ = p;
            rows.push(r.clone());
            rhs.push(f.zero());
        }
        for (r, v) in constraints {
            rows.push(r);
            rhs.push(v);
        }
        let sol = crate::linalg::solve_sparse(f, &rows, nvars, Some(&rhs));
        let x = sol
            .particular
            .ok_or("cocycle constraints inconsistent with the identity")?;
        let read = |fa: StringyFamily, m: i64, fb: StringyFamily, n: i64| -> Scalar {
            let a = self.index_of(fa, m).unwrap();
            let b = self.index_of(fb, n).unwrap();
            let (var, neg) = c_of(a, b).unwrap();
            if neg {
                f.neg(&x[var])
            } else {
                x[var].clone()
            }
        };
        let mut lvals = Vec::new();
        let mut gvals = Vec::new();
        let mut fevals = Vec::new();
        for m in 1..=max_m {
            lvals.push(read(L, m, L, -m));
            gvals.push(read(G, m, G, -m));
            fevals.push(read(F, m, E, -m));
        }
        Ok((lvals, gvals, fevals))
    }

    /// The hat extension: central element plus the grading derivation; the
    /// cocycle values come from the solved table.
    pub fn hat_extension(&self) -> Result<SuperAlgebra, String> {
        use StringyFamily::*;
        let f = self.alg.field.clone();
        let nb = self.alg.dim();
        let (lv, gv, fe) = self.solved_cocycle_values(self.window)?;
        let c_idx = nb;
        let e_idx = nb + 1;
        let mut raw: Vec<(usize, usize, SparseVec)> = Vec::new();
        for ((i, j), v) in self.alg.stored_brackets() {
            raw.push((*i as usize, *j as usize, v.clone()));
        }
        let mut cval = |fa: StringyFamily, m: i64, fb: StringyFamily, n: i64, v: Scalar,
                        raw: &mut Vec<(usize, usize, SparseVec)>| {
            if f.is_zero(&v) {
                return;
            }
            if let (Some(a), Some(b)) = (self.index_of(fa, m), self.index_of(fb, n)) {
                raw.push((a, b, vec![(c_idx, v)]));
            }
        };
        for m in 1..=self.window {
            let idx = (m - 1) as usize;
            cval(L, m, L, -m, lv[idx].clone(), &mut raw);
            cval(G, m, G, -m, gv[idx].clone(), &mut raw);
            cval(F, m, E, -m, fe[idx].clone(), &mut raw);
            cval(E, m, F, -m, f.neg(&fe[idx]), &mut raw);
        }
        // also negative-m halves of the antisymmetric tables
        // (L_m, L_n) entries for m < 0 are the antisymmetric mirrors and are
        // already covered by canonicalization inside SuperAlgebra::new
        let outer = self.outer_derivation()?;
        for (j, v) in outer.iter().enumerate() {
            if !v.is_empty() {
                raw.push((e_idx, j, v.clone()));
            }
        }
        let mut basis = self.alg.basis.clone();
        basis.push(BasisElem {
            name: "chat".into(),
            parity: 0,
            degree: Some(0),
        });
        basis.push(BasisElem {
            name: "Ehat".into(),
            parity: 0,
            degree: Some(0),
        });
        SuperAlgebra::new(f, basis, raw, None).map_err(|e| e.to_string())
    }
}

// ---------------------------------------------------------------------------
// Laurent contact series in one even and six odd indeterminates.

/// Laurent contact algebra truncated to a symmetric window of the contact
/// grading; used for the residue-type pairing check in six odd variables.
pub struct LaurentContact {
    pub alg: SuperAlgebra,
    /// (t power, odd mask) per basis element
    pub monos: Vec<(i64, u8)>,
    pub window: i64,
}

pub fn build_laurent_contact6(field: &Field, window: i64) -> Result<LaurentContact, String> {
    if field.characteristic() != 0 {
        return Err("built over characteristic 0".into());
    }
    let f = field;
    // monomial degree: 2k + |mask|; element degree subtracts 2
    let mut monos = Vec::new();
    for mask in 0u8..64 {
        let mdeg = mask.count_ones() as i64;
        // 2k + mdeg - 2 in [-window, window]
        let mut k = (-window - mdeg + 2).div_euclid(2) - 1;
        while 2 * k + mdeg - 2 < -window {
            k += 1;
        }
        while 2 * k + mdeg - 2 <= window {
            monos.push((k, mask));
            k += 1;
        }
    }
    monos.sort();
    let index: BTreeMap<(i64, u8), usize> = monos
        .iter()
        .enumerate()
        .map(|(i, m)| (*m, i))
        .collect();
    // contact bracket on generating functions: pairs (xi_j, eta_j) for
    // j = 0..2 with xi = bits 0..2, eta = bits 3..5
    let euler = |m: u8| -> i64 { m.count_ones() as i64 };
    let parity = |m: u8| -> u8 { (m.count_ones() % 2) as u8 };
    let koszul = |ma: u8, mb: u8| -> i64 {
        let mut inv = 0;
        let mut t = mb;
        while t != 0 {
            let j = t.trailing_zeros();
            inv += (ma >> (j + 1)).count_ones();
            t &= t - 1;
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    };
    let dtheta = |term: (i64, u8), j: u32| -> Option<((i64, u8), i64)> {
        let (k, m) = term;
        if m & (1 << j) == 0 {
            return None;
        }
        let below = (m & ((1u8 << j) - 1)).count_ones();
        Some(((k, m & !(1 << j)), if below % 2 == 0 { 1 } else { -1 }))
    };
    let bracket = |a: (i64, u8), b: (i64, u8)| -> Vec<((i64, u8), Scalar)> {
        let f = field;
        let mut out: BTreeMap<(i64, u8), Scalar> = BTreeMap::new();
        let mut add = |key: (i64, u8), v: Scalar, out: &mut BTreeMap<(i64, u8), Scalar>| {
            if f.is_zero(&v) {
                return;
            }
            let entry = out.entry(key).or_insert_with(|| f.zero());
            *entry = f.add(entry, &v);
            if f.is_zero(entry) {
                out.remove(&key);
            }
        };
        // (2 - E)(f) dt(g): coefficient (2 - euler(ma)) * kb on t^{ka+kb-1}
        let (ka, ma) = a;
        let (kb, mb) = b;
        if ma & mb == 0 || true {
            // term 1
            if mb & ma == 0 {
                let c1 = f.from_int((2 - euler(ma)) * kb);
                let sign = koszul(ma, mb);
                add(
                    (ka + kb - 1, ma | mb),
                    f.mul(&c1, &f.from_int(sign)),
                    &mut out,
                );
                let c2 = f.from_int(-ka * (2 - euler(mb)));
                add(
                    (ka + kb - 1, ma | mb),
                    f.mul(&c2, &f.from_int(sign)),
                    &mut out,
                );
            }
            // Poisson part: -(-1)^{p(a)} sum_j (dxi_j a)(deta_j b) + (deta_j a)(dxi_j b)
            let psign = if parity(ma) == 1 { 1 } else { -1 };
            for j in 0..3u32 {
                for (da, db) in [(j, j + 3), (j + 3, j)] {
                    if let (Some(((k1, m1), s1)), Some(((k2, m2), s2))) =
                        (dtheta((ka, ma), da), dtheta((kb, mb), db))
                    {
                        if m1 & m2 != 0 {
                            continue;
                        }
                        let sk = koszul(m1, m2);
                        let total = -psign * s1 * s2 * sk;
                        add((k1 + k2, m1 | m2), f.from_int(total), &mut out);
                    }
                }
            }
        }
        out.into_iter().collect()
    };
    let deg = |m: &(i64, u8)| -> i64 { 2 * m.0 + m.1.count_ones() as i64 - 2 };
    let nb = monos.len();
    let mut raw = Vec::new();
    for a in 0..nb {
        for b in a..nb {
            let pa = parity(monos[a].1);
            if a == b && pa == 0 {
                continue;
            }
            // truncation: drop brackets leaving the window
            if deg(&monos[a]) + deg(&monos[b]) + 2 > window + 2
                || deg(&monos[a]) + deg(&monos[b]) + 2 < -window + 2
            {
                // the bracket's element degree is deg_a + deg_b + 2 - 2
                if (deg(&monos[a]) + deg(&monos[b]) + 2).abs() > window {
                    continue;
                }
            }
            let br = bracket(monos[a], monos[b]);
            let mut vec = SparseVec::new();
            let mut escaped = false;
            for (key, c) in br {
                match index.get(&key) {
                    Some(i) => vec.push((*i, c)),
                    None => {
                        escaped = true;
                        break;
                    }
                }
            }
            if escaped {
                continue; // truncated
            }
            vec.sort_by_key(|(i, _)| *i);
            if !vec.is_empty() {
                raw.push((a, b, vec));
            }
        }
    }
    let basis: Vec<BasisElem> = monos
        .iter()
        .map(|m| BasisElem {
            name: format!("t^{}m{:06b}", m.0, m.1),
            parity: parity(m.1),
            degree: Some(deg(m)),
        })
        .collect();
    let alg = SuperAlgebra::new(f.clone(), basis, raw, None)
        .map_err(|e| e.to_string())?
        .with_meta("k_laurent_6", &[]);
    Ok(LaurentContact {
        alg,
        monos,
        window,
    })
}

impl LaurentContact {
    /// Interior triple for the contact grading window.
    pub fn interior(&self, i: usize, j: usize, k: usize) -> bool {
        let d = |x: usize| self.alg.basis[x].degree.unwrap();
        let (a, b, c) = (d(i), d(j), d(k));
        (a + b).abs() <= self.window && (b + c).abs() <= self.window && (a + b + c).abs() <= self.window
    }

    /// Residue half-density pairing: coefficient of t^{-1} theta-top in fg.
    pub fn residue_pairing(&self) -> BilinearForm {
        let f = &self.alg.field;
        let nb = self.monos.len();
        let mut gram = Mat::zero(f, nb, nb);
        for a in 0..nb {
            for b in 0..nb {
                let (ka, ma) = self.monos[a];
                let (kb, mb) = self.monos[b];
                if ka + kb != -1 || ma | mb != 0b111111 || ma & mb != 0 {
                    continue;
                }
                let mut inv = 0;
                let mut t = mb;
                while t != 0 {
                    let j = t.trailing_zeros();
                    inv += (ma >> (j + 1)).count_ones();
                    t &= t - 1;
                }
                *gram.at_mut(a, b) = if inv % 2 == 0 {
                    f.one()
                } else {
                    f.from_int(-1)
                };
            }
        }
        BilinearForm { parity: 0, gram }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixalg;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn sl2_with_trace(f: &Field) -> (SuperAlgebra, BilinearForm) {
        let m = matrixalg::sl(f, 2, 0);
        let b = matrixalg::tr_form(f, &m);
        (m.alg, b)
    }

    #[test]
    fn untwisted_sl2_loop_dimensions() {
        let f = Field::Q;
        let (sl2, _) = sl2_with_trace(&f);
        let lp = loop_build(&sl2, None, 2).unwrap();
        assert_eq!(lp.alg.dim(), 15);
    }

    #[test]
    fn residue_pairing_values() {
        let f = Field::Q;
        let (sl2, tr) = sl2_with_trace(&f);
        let lp = loop_build(&sl2, None, 2).unwrap();
        let nis = lp.residue_nis(&tr);
        // (e t^2, f t^-2) = tr(ef) = 1 and (e t^2, f t^-1) = 0
        let e = sl2.index_of("E12").unwrap();
        let fe = sl2.index_of("E21").unwrap();
        let find = |target: usize, k: i64| -> usize {
            lp.layout
                .iter()
                .position(|(row, kk)| *kk == k && row.len() == 1 && row[0].0 == target)
                .unwrap()
        };
        assert_eq!(*nis.gram.at(find(e, 2), find(fe, -2)), f.one());
        assert!(f.is_zero(nis.gram.at(find(e, 2), find(fe, -1))));
        // (h t, h t^-1) = tr(h^2) = 2
        let h = sl2.index_of("H1").unwrap();
        assert_eq!(*nis.gram.at(find(h, 1), find(h, -1)), f.from_int(2));
        assert!(lp.interior_invariance_violation(&nis).is_none());
    }

    #[test]
    fn central_cocycle_values() {
        let f = Field::Q;
        let (sl2, tr) = sl2_with_trace(&f);
        let lp = loop_build(&sl2, None, 2).unwrap();
        let e = sl2.index_of("E12").unwrap();
        let fe = sl2.index_of("E21").unwrap();
        let h = sl2.index_of("H1").unwrap();
        let find = |target: usize, k: i64| -> usize {
            lp.layout
                .iter()
                .position(|(row, kk)| *kk == k && row.len() == 1 && row[0].0 == target)
                .unwrap()
        };
        // c(e t, f t^-1) = -tr(ef) = -1
        assert_eq!(
            lp.central_cocycle(&tr, find(e, 1), find(fe, -1)),
            f.from_int(-1)
        );
        // c on constant loops vanishes
        assert!(f.is_zero(&lp.central_cocycle(&tr, find(e, 0), find(fe, 0))));
        // c(h t^2, h t^-2) = -2 tr(h^2) = -4
        assert_eq!(
            lp.central_cocycle(&tr, find(h, 2), find(h, -2)),
            f.from_int(-4)
        );
        assert!(lp.cocycle_violations(&tr).is_empty());
    }

    #[test]
    fn psq2_twisted_loop_odd_residue_form() {
        let f = Field::Q;
        let psq2 = matrixalg::psq(&f, 2);
        let qtr = matrixalg::qtr_form(&f, &psq2);
        // parity twist: +1 on even, -1 on odd part
        let n = psq2.alg.dim();
        let mut psi = Mat::zero(&f, n, n);
        for i in 0..n {
            *psi.at_mut(i, i) = if psq2.alg.parity(i) == 1 {
                f.from_int(-1)
            } else {
                f.one()
            };
        }
        let zeta = f.from_int(-1);
        let lp = loop_build(&psq2.alg, Some((&psi, &zeta, 2)), 3).unwrap();
        // even degrees carry the even part, odd degrees the odd part
        for (row, k) in &lp.layout {
            let par = psq2.alg.parity(row[0].0);
            assert_eq!(i64::from(par), k.rem_euclid(2), "degree {k}");
        }
        let nis = lp.residue_nis(&qtr);
        assert_eq!(nis.parity, 1);
        assert!(!nis.gram.is_zero(&f));
        assert!(lp.interior_invariance_violation(&nis).is_none());
        assert!(lp.cocycle_violations(&qtr).is_empty());
    }

    #[test]
    fn stringy_membership_and_brackets() {
        let f = Field::Q;
        let alpha = Scalar::Rat(BigRational::new(BigInt::from(1), BigInt::from(2)));
        let s = build_stringy(&f, &alpha, 4).unwrap();
        assert_eq!(s.alg.dim(), 8 * 9);
        // interior jacobi
        let nb = s.alg.dim();
        let mut checked = 0;
        for i in (0..nb).step_by(7) {
            for j in (0..nb).step_by(5) {
                for k in (0..nb).step_by(3) {
                    if s.interior(i, j, k) {
                        assert!(jacobi_triple_ok(&s.alg, i, j, k), "triple {i},{j},{k}");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn stringy_integer_alpha_rejected() {
        let f = Field::Q;
        assert!(build_stringy(&f, &f.from_int(2), 4).is_err());
    }

    #[test]
    fn stringy_cocycle_table() {
        let f = Field::Q;
        let alpha = Scalar::Rat(BigRational::new(BigInt::from(1), BigInt::from(2)));
        let s = build_stringy(&f, &alpha, 7).unwrap();
        let (lv, gv, fe) = s.solved_cocycle_values(3).unwrap();
        // c(G_m, G_-m) = m
        for (i, v) in gv.iter().enumerate() {
            assert_eq!(*v, f.from_int(i as i64 + 1), "G value at m={}", i + 1);
        }
        // c(F_m, E_-m) = m
        for (i, v) in fe.iter().enumerate() {
            assert_eq!(*v, f.from_int(i as i64 + 1), "FE value at m={}", i + 1);
        }
        // c(L_m, L_-m) = m (m^2 - (alpha+1)^2) / 2
        let ap1 = f.add(&alpha, &f.one());
        let ap1sq = f.mul(&ap1, &ap1);
        for (i, v) in lv.iter().enumerate() {
            let m = i as i64 + 1;
            let expect = f.mul(
                &f.from_int(m),
                &f.sub(&f.from_int(m * m), &ap1sq),
            );
            let expect = f.div(&expect, &f.from_int(2)).unwrap();
            assert_eq!(*v, expect, "L value at m={m}");
        }
    }

    #[test]
    fn stringy_hat_graded_search_returns_none() {
        let f = Field::Q;
        let alpha = Scalar::Rat(BigRational::new(BigInt::from(1), BigInt::from(2)));
        let s = build_stringy(&f, &alpha, 3).unwrap();
        let hat = s.hat_extension().unwrap();
        let window = s.window;
        let kinds = s.kinds.clone();
        let tdeg = move |x: usize| -> i64 {
            if x >= kinds.len() {
                return 0;
            }
            let (fam, n) = kinds[x];
            match fam {
                StringyFamily::Lam | StringyFamily::Eps => n - 1,
                StringyFamily::Phi | StringyFamily::Gam => n + 1,
                _ => n,
            }
        };
        let interior = move |i: usize, j: usize, k: usize| -> bool {
            let m = window - 1;
            let (a, b, c) = (tdeg(i), tdeg(j), tdeg(k));
            (a + b).abs() <= m && (b + c).abs() <= m && (a + b + c).abs() <= m
        };
        let (_, res) = graded_nis_search(&hat, 0, &interior);
        assert!(res.form.is_none());
        assert!(matches!(
            res.certificate,
            NisCertificate::CommonRadical(_) | NisCertificate::EmptySpace
        ));
    }

    #[test]
    fn sl2_loop_graded_search_finds_residue_form() {
        let f = Field::Q;
        let (sl2, tr) = sl2_with_trace(&f);
        let lp = loop_build(&sl2, None, 3).unwrap();
        let layout: Vec<i64> = lp.layout.iter().map(|(_, k)| *k).collect();
        let window = lp.window;
        let interior = move |i: usize, j: usize, k: usize| -> bool {
            let (a, b, c) = (layout[i], layout[j], layout[k]);
            (a + b).abs() <= window && (b + c).abs() <= window && (a + b + c).abs() <= window
        };
        let (space, res) = graded_nis_search(&lp.alg, 0, &interior);
        assert!(space.dim() >= 1);
        let found = res.form.expect("graded search finds the residue form");
        // it restricts to a multiple of the residue pairing on matched slots
        let nis = lp.residue_nis(&tr);
        let e = sl2.index_of("E12").unwrap();
        let fe = sl2.index_of("E21").unwrap();
        let find = |target: usize, k: i64| -> usize {
            lp.layout
                .iter()
                .position(|(row, kk)| *kk == k && row.len() == 1 && row[0].0 == target)
                .unwrap()
        };
        let a = find(e, 1);
        let b = find(fe, -1);
        assert!(!f.is_zero(found.gram.at(a, b)));
        assert!(!f.is_zero(nis.gram.at(a, b)));
    }

    #[test]
    fn laurent_contact6_residue_nis() {
        let f = Field::Q;
        let lc = build_laurent_contact6(&f, 4).unwrap();
        let nis = lc.residue_pairing();
        assert_eq!(nis.parity, 0);
        // interior invariance
        let nb = lc.alg.dim();
        for i in (0..nb).step_by(11) {
            for j in (0..nb).step_by(7) {
                let bij = lc.alg.bracket_basis(i, j);
                for k in (0..nb).step_by(5) {
                    if !lc.interior(i, j, k) {
                        continue;
                    }
                    let lhs = nis.value(&f, &bij, &[(k, f.one())]);
                    let rhs = nis.value(&f, &[(i, f.one())], &lc.alg.bracket_basis(j, k));
                    assert_eq!(lhs, rhs, "triple ({i},{j},{k})");
                }
            }
        }
        // every basis element in the pairing-symmetric part has a partner
        let mut paired = 0;
        for a in 0..nb {
            if (0..nb).any(|b| !f.is_zero(nis.gram.at(a, b))) {
                paired += 1;
            }
        }
        assert!(paired > nb / 2);
    }
}
