//! Double extensions: the forward construction from (algebra, form,
//! derivation) data, recognition of a double extension inside an algebra
//! with a nondegenerate invariant form and central derived elements, and
//! queerification of restricted Lie algebras in characteristic 2.

use crate::algebra::{AlgebraError, BasisElem, Subspace, SuperAlgebra};
use crate::forms::BilinearForm;
use crate::linalg::{sv_axpy, sv_from_dense, Echelon, Mat, SparseVec};
use crate::scalar::{Field, Scalar};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct DExtensionData {
    pub base: SuperAlgebra,
    pub form: BilinearForm,
    /// Matrix of the derivation in the base's basis (columns are images).
    pub derivation: Mat,
    pub parity_d: u8,
}

#[derive(Clone, Debug)]
pub struct DoubleExtension {
    pub alg: SuperAlgebra,
    pub form: BilinearForm,
    /// basis layout: c at 0, base at 1..=n, d at n+1
    pub c_index: usize,
    pub d_index: usize,
    /// the derivation is inner, so the extension splits off
    pub decomposable: bool,
}

impl DExtensionData {
    fn apply_d(&self, x: &[(usize, Scalar)]) -> SparseVec {
        let f = &self.base.field;
        let n = self.base.dim();
        let mut out = vec![f.zero(); n];
        for (j, c) in x {
            for i in 0..n {
                let m = self.derivation.at(i, *j);
                if !f.is_zero(m) {
                    out[i] = f.add(&out[i], &f.mul(m, c));
                }
            }
        }
        sv_from_dense(f, &out)
    }

    /// D[x,y] = [Dx,y] + (-1)^{p(D)p(x)} [x,Dy] on all basis pairs.
    pub fn check_derivation(&self) -> Result<(), String> {
        let f = &self.base.field;
        let n = self.base.dim();
        for i in 0..n {
            for j in 0..n {
                let lhs = self.apply_d(&self.base.bracket_basis(i, j));
                let mut rhs = self
                    .base
                    .bracket(&self.apply_d(&[(i, f.one())]), &[(j, f.one())]);
                let sign = if self.parity_d == 1
                    && self.base.parity(i) == 1
                    && f.characteristic() != 2
                {
                    f.from_int(-1)
                } else {
                    f.one()
                };
                let term = self
                    .base
                    .bracket(&[(i, f.one())], &self.apply_d(&[(j, f.one())]));
                sv_axpy(f, &mut rhs, &sign, &term);
                let mut diff = lhs;
                sv_axpy(f, &mut diff, &f.from_int(-1), &rhs);
                if !diff.is_empty() {
                    return Err(format!("not a derivation at pair ({i},{j})"));
                }
            }
        }
        Ok(())
    }

    /// B(Da, b) + (-1)^{p(a)p(D)} B(a, Db) = 0 on all basis pairs.
    pub fn check_d_invariance(&self) -> Result<(), String> {
        let f = &self.base.field;
        let n = self.base.dim();
        for a in 0..n {
            for b in 0..n {
                let da = self.apply_d(&[(a, f.one())]);
                let db = self.apply_d(&[(b, f.one())]);
                let lhs = self.form.value(f, &da, &[(b, f.one())]);
                let sign = if self.base.parity(a) == 1
                    && self.parity_d == 1
                    && f.characteristic() != 2
                {
                    f.from_int(-1)
                } else {
                    f.one()
                };
                let rhs = f.mul(&sign, &self.form.value(f, &[(a, f.one())], &db));
                if !f.is_zero(&f.add(&lhs, &rhs)) {
                    return Err(format!("form is not derivation-invariant at ({a},{b})"));
                }
            }
        }
        Ok(())
    }

    fn check_odd_square(&self) -> Result<(), String> {
        if self.parity_d == 0 {
            return Ok(());
        }
        let f = &self.base.field;
        let d2 = self.derivation.mul(f, &self.derivation);
        if d2.is_zero(f) {
            Ok(())
        } else {
            Err("odd derivation must square to zero".into())
        }
    }

    /// Is D inner, i.e. D = ad_x for some x in the base?
    pub fn inner_witness(&self) -> Option<Vec<Scalar>> {
        let f = &self.base.field;
        let n = self.base.dim();
        // unknowns x_k; equations: sum_k x_k [e_k, e_j]_i = D_{ij}
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for j in 0..n {
            let mut per_i: BTreeMap<usize, SparseVec> = BTreeMap::new();
            for k in 0..n {
                for (i, c) in self.base.bracket_basis(k, j) {
                    per_i.entry(i).or_default().push((k, c));
                }
            }
            for i in 0..n {
                let mut row = per_i.remove(&i).unwrap_or_default();
                row.sort_by_key(|(k, _)| *k);
                rows.push(row);
                rhs.push(self.derivation.at(i, j).clone());
            }
        }
        let sol = crate::linalg::solve_sparse(f, &rows, n, Some(&rhs));
        sol.particular
    }
}

/// Builds the double extension g = base_omega semidirect K d with central c
/// and the extended nondegenerate form.
pub fn double_extend(data: &DExtensionData) -> Result<DoubleExtension, String> {
    data.check_derivation()?;
    data.check_d_invariance()?;
    data.check_odd_square()?;
    let f = data.base.field.clone();
    let n = data.base.dim();
    if !data.form.is_nondegenerate(&f) {
        return Err("base form must be nondegenerate".into());
    }
    if data.form.invariance_violation(&data.base).is_some() {
        return Err("base form must be invariant".into());
    }
    let c_index = 0usize;
    let d_index = n + 1;
    let parity_c = (data.parity_d + data.form.parity) % 2;
    let mut basis = Vec::with_capacity(n + 2);
    basis.push(BasisElem {
        name: "c".into(),
        parity: parity_c,
        degree: None,
    });
    for b in &data.base.basis {
        basis.push(BasisElem {
            name: format!("b.{}", b.name),
            parity: b.parity,
            degree: None,
        });
    }
    basis.push(BasisElem {
        name: "d".into(),
        parity: data.parity_d,
        degree: None,
    });
    let mut raw: Vec<(usize, usize, SparseVec)> = Vec::new();
    // base brackets plus the cocycle omega(a,b) = B(Da, b)
    for i in 0..n {
        for j in i..n {
            if i == j && !(data.base.parity(i) == 1 && f.characteristic() != 2) {
                continue;
            }
            let mut vec: SparseVec = data
                .base
                .bracket_basis(i, j)
                .into_iter()
                .map(|(k, c)| (k + 1, c))
                .collect();
            let da = data.apply_d(&[(i, f.one())]);
            let omega = data.form.value(&f, &da, &[(j, f.one())]);
            if !f.is_zero(&omega) {
                vec.insert(0, (c_index, omega));
            }
            if !vec.is_empty() {
                raw.push((i + 1, j + 1, vec));
            }
        }
    }
    // [d, x] = D x
    for j in 0..n {
        let dj = data.apply_d(&[(j, f.one())]);
        if dj.is_empty() {
            continue;
        }
        let vec: SparseVec = dj.into_iter().map(|(k, c)| (k + 1, c)).collect();
        raw.push((d_index, j + 1, vec));
    }
    let alg = SuperAlgebra::new(f.clone(), basis, raw, None)
        .map_err(|e| e.to_string())?
        .with_meta("double_extension", &[]);
    // extended form
    let dim = n + 2;
    let mut gram = Mat::zero(&f, dim, dim);
    for i in 0..n {
        for j in 0..n {
            *gram.at_mut(i + 1, j + 1) = data.form.gram.at(i, j).clone();
        }
    }
    *gram.at_mut(d_index, c_index) = f.one();
    let sign = if data.parity_d == 1 && parity_c == 1 && f.characteristic() != 2 {
        f.from_int(-1)
    } else {
        f.one()
    };
    *gram.at_mut(c_index, d_index) = sign;
    let form = BilinearForm {
        parity: data.form.parity,
        gram,
    };
    // verify the construction end to end
    let violations = alg.check_jacobi(crate::algebra::JacobiMode::All);
    if !violations.is_empty() {
        return Err(format!("extension breaks the Jacobi identity: {violations:?}"));
    }
    if let Some(t) = form.invariance_violation(&alg) {
        return Err(format!("extended form not invariant at {t:?}"));
    }
    if !form.is_nondegenerate(&f) {
        return Err("extended form is degenerate".into());
    }
    let decomposable = data.inner_witness().is_some();
    Ok(DoubleExtension {
        alg,
        form,
        c_index,
        d_index,
        decomposable,
    })
}

#[derive(Clone, Debug)]
pub enum RecognitionOutcome {
    /// The hypothesis fails: no central element inside the derived algebra.
    NotApplicable,
    /// A central c with B(c,c) != 0 splits off a line: nothing interesting.
    Decomposable,
    Recognized(Box<Recognition>),
}

#[derive(Clone, Debug)]
pub struct Recognition {
    pub data: DExtensionData,
    pub c: SparseVec,
    pub d: SparseVec,
    /// rows embedding the recovered base (the subspace W) into g
    pub w_rows: Vec<SparseVec>,
    /// the cocycle values sigma(x, y) = B(d, [x, y]) on the W basis
    pub sigma: Mat,
}

fn subspace_intersection(field: &Field, a: &Subspace, b: &Subspace) -> Vec<SparseVec> {
    // vectors sum lambda_i b_i lying in span(a)
    let ech_a = a.echelon(field);
    let rows: Vec<SparseVec> = b
        .rows
        .iter()
        .map(|r| ech_a.reduce(r.clone()))
        .collect();
    // kernel over the lambda coefficients
    let mut eq_rows: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for (li, r) in rows.iter().enumerate() {
        for (coord, c) in r {
            eq_rows.entry(*coord).or_default().push((li, c.clone()));
        }
    }
    let eqs: Vec<SparseVec> = eq_rows
        .into_values()
        .map(|mut r| {
            r.sort_by_key(|(i, _)| *i);
            r
        })
        .collect();
    let kernel = crate::linalg::kernel_sparse(field, &eqs, b.rows.len());
    kernel
        .iter()
        .map(|lambda| {
            let mut v = SparseVec::new();
            for (li, c) in lambda.iter().enumerate() {
                if !field.is_zero(c) {
                    sv_axpy(field, &mut v, c, &b.rows[li]);
                }
            }
            v
        })
        .filter(|v| !v.is_empty())
        .collect()
}

/// Recognizes g with NIS B as a double extension when the derived algebra
/// meets the center, following the proof steps: c from the intersection,
/// d with B(d,c) = 1 normalized to B(d,d) = 0, V = c-perp, W = d-perp in V,
/// the base on W with the descended form and derivation.
pub fn recognize_double_extension(
    g: &SuperAlgebra,
    b: &BilinearForm,
) -> Result<RecognitionOutcome, String> {
    let f = g.field.clone();
    if !b.is_nondegenerate(&f) {
        return Err("the form must be nondegenerate".into());
    }
    if b.invariance_violation(g).is_some() {
        return Err("the form must be invariant".into());
    }
    let center = g.center();
    let (_, derived_rows) = g.derived_algebra();
    let derived = Subspace {
        ambient: g.dim(),
        rows: derived_rows,
    };
    let inter = subspace_intersection(&f, &derived, &center);
    if inter.is_empty() {
        return Ok(RecognitionOutcome::NotApplicable);
    }
    let c = inter[0].clone();
    if !f.is_zero(&b.value(&f, &c, &c)) {
        return Ok(RecognitionOutcome::Decomposable);
    }
    let n = g.dim();
    // d0 with B(d0, c) = 1
    let row: SparseVec = (0..n)
        .filter_map(|j| {
            let v = b.value(&f, &[(j, f.one())], &c);
            if f.is_zero(&v) {
                None
            } else {
                Some((j, v))
            }
        })
        .collect();
    let sol = crate::linalg::solve_sparse(&f, &[row], n, Some(&[f.one()]));
    let d0 = sol
        .particular
        .ok_or("no vector pairs with c; form degenerate?")?;
    let mut d = sv_from_dense(&f, &d0);
    // normalize B(d,d) = 0: d -> d - (1/2) B(d,d) c
    let bdd = b.value(&f, &d, &d);
    if !f.is_zero(&bdd) {
        if f.characteristic() == 2 {
            return Err("cannot normalize the complement in characteristic 2".into());
        }
        let half = f.div(&bdd, &f.from_int(2)).unwrap();
        sv_axpy(&f, &mut d, &f.neg(&half), &c);
    }
    // V = c-perp, W = d-perp intersect V
    let c_perp_rows: Vec<SparseVec> = {
        let functional: SparseVec = (0..n)
            .filter_map(|j| {
                let v = b.value(&f, &c, &[(j, f.one())]);
                if f.is_zero(&v) {
                    None
                } else {
                    Some((j, v))
                }
            })
            .collect();
        crate::linalg::kernel_sparse(&f, &[functional], n)
            .iter()
            .map(|v| sv_from_dense(&f, v))
            .collect()
    };
    let d_functional: SparseVec = (0..n)
        .filter_map(|j| {
            let v = b.value(&f, &d, &[(j, f.one())]);
            if f.is_zero(&v) {
                None
            } else {
                Some((j, v))
            }
        })
        .collect();
    let v_sub = g.homogeneous_subspace(&c_perp_rows);
    // W = vectors of V killed by the d functional
    let w_vecs: Vec<SparseVec> = {
        let mut eqs: Vec<SparseVec> = Vec::new();
        let mut eq = SparseVec::new();
        for (li, r) in v_sub.rows.iter().enumerate() {
            let mut acc = f.zero();
            for (j, cj) in r {
                if let Some(val) = crate::linalg::sv_get(&d_functional, *j) {
                    acc = f.add(&acc, &f.mul(val, cj));
                }
            }
            if !f.is_zero(&acc) {
                eq.push((li, acc));
            }
        }
        eqs.push(eq);
        let kernel = crate::linalg::kernel_sparse(&f, &eqs, v_sub.rows.len());
        kernel
            .iter()
            .map(|lambda| {
                let mut v = SparseVec::new();
                for (li, cc) in lambda.iter().enumerate() {
                    if !f.is_zero(cc) {
                        sv_axpy(&f, &mut v, cc, &v_sub.rows[li]);
                    }
                }
                v
            })
            .filter(|v| !v.is_empty())
            .collect()
    };
    let w_sub = g.homogeneous_subspace(&w_vecs);
    let w_rows = w_sub.rows.clone();
    let m = w_rows.len();
    if m + 2 != n {
        return Err(format!(
            "complement dimension mismatch: dim W = {m}, dim g = {n}"
        ));
    }
    // base algebra on W: bracket minus its c component; the c component is
    // sigma(x,y) = B(d, [x,y])
    let mut ech_w = Echelon::new(&f);
    let ncoord = n;
    for (idx, r) in w_rows.iter().enumerate() {
        let mut aug = r.clone();
        aug.push((ncoord + idx, f.one()));
        ech_w.insert(aug);
    }
    let mut basis = Vec::with_capacity(m);
    for (idx, r) in w_rows.iter().enumerate() {
        let parity = r
            .first()
            .map(|(i, _)| g.parity(*i))
            .unwrap_or(0);
        let _ = idx;
        basis.push(BasisElem {
            name: format!("w{idx}"),
            parity,
            degree: None,
        });
    }
    let mut raw = Vec::new();
    let mut sigma = Mat::zero(&f, m, m);
    for i in 0..m {
        for j in i..m {
            if i == j && !(basis[i].parity == 1 && f.characteristic() != 2) {
                continue;
            }
            let br = g.bracket(&w_rows[i], &w_rows[j]);
            let s = b.value(&f, &d, &br);
            *sigma.at_mut(i, j) = s.clone();
            if i != j {
                let flip = basis[i].parity == 1 && basis[j].parity == 1
                    && f.characteristic() != 2;
                *sigma.at_mut(j, i) = if flip { s.clone() } else { f.neg(&s) };
            }
            // remove the c component: br - s c lies in span W
            let mut w_part = br;
            sv_axpy(&f, &mut w_part, &f.neg(&s), &c);
            let reduced = ech_w.reduce(w_part);
            if reduced.iter().any(|(t, _)| *t < ncoord) {
                return Err(format!("bracket escaped W + Kc at pair ({i},{j})"));
            }
            let mut vec: SparseVec = reduced
                .into_iter()
                .map(|(t, cc)| (t - ncoord, f.neg(&cc)))
                .collect();
            vec.sort_by_key(|(t, _)| *t);
            if !vec.is_empty() {
                raw.push((i, j, vec));
            }
        }
    }
    let base =
        SuperAlgebra::new(f.clone(), basis, raw, None).map_err(|e: AlgebraError| e.to_string())?;
    // descended form
    let mut gram = Mat::zero(&f, m, m);
    for i in 0..m {
        for j in 0..m {
            *gram.at_mut(i, j) = b.value(&f, &w_rows[i], &w_rows[j]);
        }
    }
    let form = BilinearForm {
        parity: b.parity,
        gram,
    };
    // derivation D = pr_W([d, w])
    let mut derivation = Mat::zero(&f, m, m);
    let parity_d = {
        let mut par = 0u8;
        for (i, _) in &d {
            par = g.parity(*i);
            break;
        }
        par
    };
    for j in 0..m {
        let br = g.bracket(&d, &w_rows[j]);
        let s = b.value(&f, &d, &br);
        let mut w_part = br;
        sv_axpy(&f, &mut w_part, &f.neg(&s), &c);
        let reduced = ech_w.reduce(w_part);
        if reduced.iter().any(|(t, _)| *t < ncoord) {
            return Err("derivation image escaped W + Kc".into());
        }
        for (t, cc) in reduced {
            *derivation.at_mut(t - ncoord, j) = f.neg(&cc);
        }
    }
    let data = DExtensionData {
        base,
        form,
        derivation,
        parity_d,
    };
    // sigma must agree with B_h(D x, y)
    for i in 0..m {
        let di = data.apply_d(&[(i, f.one())]);
        for j in 0..m {
            let expect = data.form.value(&f, &di, &[(j, f.one())]);
            if expect != *sigma.at(i, j) {
                return Err(format!("cocycle mismatch at ({i},{j})"));
            }
        }
    }
    Ok(RecognitionOutcome::Recognized(Box::new(Recognition {
        data,
        c,
        d,
        w_rows,
        sigma,
    })))
}

/// Verifies that rebuilding from recognized data reproduces the original
/// structure constants in the (c, W, d) basis.
pub fn verify_roundtrip(g: &SuperAlgebra, rec: &Recognition) -> Result<(), String> {
    let rebuilt = double_extend(&rec.data)?;
    let f = &g.field;
    let m = rec.w_rows.len();
    // map rebuilt basis index -> vector in g
    let vec_of = |idx: usize| -> SparseVec {
        if idx == rebuilt.c_index {
            rec.c.clone()
        } else if idx == rebuilt.d_index {
            rec.d.clone()
        } else {
            rec.w_rows[idx - 1].clone()
        }
    };
    let dim = m + 2;
    // natural coordinates: express any g-vector in the (c, W, d) basis
    let mut ech = Echelon::new(f);
    for idx in 0..dim {
        let mut aug = vec_of(idx);
        aug.push((g.dim() + idx, f.one()));
        ech.insert(aug);
    }
    let coords = |v: &SparseVec| -> Result<SparseVec, String> {
        let reduced = ech.reduce(v.clone());
        if reduced.iter().any(|(t, _)| *t < g.dim()) {
            return Err("vector outside the recognized frame".into());
        }
        let mut out: SparseVec = reduced
            .into_iter()
            .map(|(t, c)| (t - g.dim(), f.neg(&c)))
            .collect();
        out.sort_by_key(|(t, _)| *t);
        Ok(out)
    };
    for i in 0..dim {
        for j in 0..dim {
            let expect = rebuilt.alg.bracket_basis(i, j);
            let got = coords(&g.bracket(&vec_of(i), &vec_of(j)))?;
            if expect != got {
                return Err(format!("structure constants differ at ({i},{j})"));
            }
        }
    }
    Ok(())
}

/// Queerification of a restricted Lie algebra in characteristic 2: the
/// doubled space with odd copy, bracket [x, Py] = P[x,y], squaring of the
/// odd copy given by the restricted power map, and the odd pairing
/// q(x, Py) = B(x, y).
pub fn queerify(
    g: &SuperAlgebra,
    pmap: &[SparseVec],
    b: &BilinearForm,
) -> Result<(SuperAlgebra, BilinearForm), String> {
    let f = g.field.clone();
    if f.characteristic() != 2 {
        return Err("queerification needs characteristic 2".into());
    }
    if g.basis.iter().any(|x| x.parity == 1) {
        return Err("the input must be a plain Lie algebra".into());
    }
    if pmap.len() != g.dim() {
        return Err("restricted power data must cover the basis".into());
    }
    if !b.is_nondegenerate(&f) || b.invariance_violation(g).is_some() {
        return Err("need a nondegenerate invariant form".into());
    }
    let n = g.dim();
    let mut basis = Vec::with_capacity(2 * n);
    for x in &g.basis {
        basis.push(BasisElem {
            name: x.name.clone(),
            parity: 0,
            degree: None,
        });
    }
    for x in &g.basis {
        basis.push(BasisElem {
            name: format!("P{}", x.name),
            parity: 1,
            degree: None,
        });
    }
    let mut raw = Vec::new();
    let mut squaring: BTreeMap<u32, SparseVec> = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            let br = g.bracket_basis(i, j);
            if br.is_empty() {
                continue;
            }
            if i != j {
                raw.push((i, j, br.clone()));
            }
            // [x, Py] = P[x, y]
            let shifted: SparseVec = br.iter().map(|(k, c)| (k + n, c.clone())).collect();
            raw.push((i, j + n, shifted.clone()));
            if i != j {
                raw.push((j, i + n, br.iter().map(|(k, c)| (k + n, c.clone())).collect()));
            }
            // [Px, Py] = polarization of the squaring:
            // s(x + y) + s(x) + s(y) = [x, y]... the polarization of the
            // restricted power map is exactly the original bracket composed
            // with it; here [Px, Py] for distinct basis elements comes from
            // s(e_i + e_j) = s(e_i) + s(e_j) + [e_i, e_j]
            raw.push((i + n, j + n, br));
        }
        // squaring of the odd copy: (P e_i)^2 = e_i^{[2]}
        if !pmap[i].is_empty() {
            squaring.insert((i + n) as u32, pmap[i].clone());
        }
    }
    let alg = SuperAlgebra::new(f.clone(), basis, raw, Some(squaring))
        .map_err(|e| e.to_string())?
        .with_meta("queerification", &[]);
    let violations = alg.check_jacobi(crate::algebra::JacobiMode::All);
    if !violations.is_empty() {
        return Err(format!(
            "restricted data breaks the squaring consistency: {violations:?}"
        ));
    }
    // odd form: q(x, Py) = B(x, y), zero on (even, even) and (odd, odd)
    let mut gram = Mat::zero(&f, 2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = b.gram.at(i, j).clone();
            *gram.at_mut(i, j + n) = v.clone();
            *gram.at_mut(j + n, i) = v;
        }
    }
    let form = BilinearForm { parity: 1, gram };
    if let Some(t) = form.invariance_violation(&alg) {
        return Err(format!("odd pairing not invariant at {t:?}"));
    }
    if !form.is_nondegenerate(&f) {
        return Err("odd pairing degenerate".into());
    }
    Ok((alg, form))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::test_algebras::sl2;
    use crate::algebra::JacobiMode;
    use crate::matrixalg;

    fn oscillator_data(f: &Field) -> DExtensionData {
        // two-dimensional even abelian base, identity form, rotation
        let base = SuperAlgebra::new(
            f.clone(),
            vec![BasisElem::even("a"), BasisElem::even("b")],
            vec![],
            None,
        )
        .unwrap();
        let form = BilinearForm {
            parity: 0,
            gram: Mat::identity(f, 2),
        };
        let derivation = Mat::from_rows(f, &[vec![0, 1], vec![-1, 0]]);
        DExtensionData {
            base,
            form,
            derivation,
            parity_d: 0,
        }
    }

    #[test]
    fn oscillator_extension() {
        let f = Field::Q;
        let data = oscillator_data(&f);
        let ext = double_extend(&data).unwrap();
        assert_eq!(ext.alg.dim(), 4);
        assert!(!ext.decomposable);
        assert!(ext.alg.check_jacobi(JacobiMode::All).is_empty());
        assert!(ext.form.invariance_violation(&ext.alg).is_none());
        assert!(ext.form.is_nondegenerate(&f));
        // [a, b] = omega(a,b) c = B(Da, b) c = B(-b, b) c = -c
        let br = ext.alg.bracket_basis(1, 2);
        assert_eq!(br, vec![(ext.c_index, f.from_int(-1))]);
    }

    #[test]
    fn rejected_when_not_invariant() {
        let f = Field::Q;
        let mut data = oscillator_data(&f);
        // break the invariance: D no longer skew for the identity form
        data.derivation = Mat::from_rows(&f, &[vec![1, 0], vec![0, 0]]);
        assert!(double_extend(&data).is_err());
    }

    #[test]
    fn odd_derivation_square_enforced() {
        let f = Field::Q;
        // 0|2-dimensional abelian base with odd pairing
        let base = SuperAlgebra::new(
            f.clone(),
            vec![BasisElem::odd("e"), BasisElem::odd("fbar")],
            vec![],
            None,
        )
        .unwrap();
        let mut gram = Mat::zero(&f, 2, 2);
        *gram.at_mut(0, 1) = f.one();
        *gram.at_mut(1, 0) = f.one();
        let form = BilinearForm { parity: 1, gram };
        // an odd derivation with nonzero square gets rejected
        let data = DExtensionData {
            base: base.clone(),
            form: form.clone(),
            derivation: Mat::from_rows(&f, &[vec![0, 1], vec![1, 0]]),
            parity_d: 1,
        };
        assert!(double_extend(&data).is_err());
    }

    #[test]
    fn gl11_from_odd_abelian_base() {
        // 0|2 abelian with odd form B(e, f) = 1 and diagonal action (1, -1)
        let f = Field::Q;
        let base = SuperAlgebra::new(
            f.clone(),
            vec![BasisElem::odd("e"), BasisElem::odd("fbar")],
            vec![],
            None,
        )
        .unwrap();
        let mut gram = Mat::zero(&f, 2, 2);
        *gram.at_mut(0, 1) = f.one();
        // odd supersymmetric: B(f, e) = (+1) B(e, f) on opposite parities,
        // but both are odd here: B(f,e) = -B(e,f)
        *gram.at_mut(1, 0) = f.from_int(-1);
        let form = BilinearForm { parity: 0, gram };
        // hold on: e, fbar both odd means B(e,fbar) pairs odd with odd,
        // hence the form is even, and supersymmetry gives the minus sign
        let data = DExtensionData {
            base,
            form,
            derivation: Mat::from_rows(&f, &[vec![1, 0], vec![0, -1]]),
            parity_d: 0,
        };
        let ext = double_extend(&data).unwrap();
        assert_eq!(ext.alg.sdim(), (2, 2));
        // compare with the matrix model: c -> 1_2, d -> diag(1/2, -1/2),
        // e -> E12, fbar -> E21 maps brackets onto gl(1|1)
        let gl11 = matrixalg::gl(&f, 1, 1);
        let e12 = gl11.alg.index_of("E12").unwrap();
        let e21 = gl11.alg.index_of("E21").unwrap();
        let br = gl11.alg.bracket_basis(e12, e21);
        // [E12, E21] = E11 + E22 = identity; in the extension
        // [e, fbar] = omega(e, fbar) c = B(De, fbar) c = B(e, fbar) c = c
        let ext_br = ext.alg.bracket_basis(1, 2);
        assert_eq!(ext_br, vec![(ext.c_index, f.one())]);
        assert_eq!(br.len(), 2);
        // and the derivation matches [diag(1/2,-1/2), .] eigenvalues 1, -1
        let dbr = ext.alg.bracket_basis(ext.d_index, 1);
        assert_eq!(dbr, vec![(1, f.one())]);
        let dbr2 = ext.alg.bracket_basis(ext.d_index, 2);
        assert_eq!(dbr2, vec![(2, f.from_int(-1))]);
    }

    #[test]
    fn inner_derivation_flagged_decomposable() {
        let f = Field::Q;
        let alg = sl2(&f);
        let space = crate::forms::invariant_forms(&alg, 0);
        let form = space.basis[0].clone();
        // D = ad_h
        let mut derivation = Mat::zero(&f, 3, 3);
        for j in 0..3 {
            for (k, c) in alg.bracket_basis(1, j) {
                *derivation.at_mut(k, j) = c;
            }
        }
        let data = DExtensionData {
            base: alg,
            form,
            derivation,
            parity_d: 0,
        };
        let ext = double_extend(&data).unwrap();
        assert!(ext.decomposable);
    }

    #[test]
    fn recognize_trivial_center_not_applicable() {
        let f = Field::Q;
        let alg = sl2(&f);
        let form = crate::forms::invariant_forms(&alg, 0).basis[0].clone();
        let out = recognize_double_extension(&alg, &form).unwrap();
        assert!(matches!(out, RecognitionOutcome::NotApplicable));
    }

    #[test]
    fn recognize_gl22_recovers_psl22() {
        let f = Field::Q;
        let gl22 = matrixalg::gl(&f, 2, 2);
        let b = matrixalg::str_form(&f, &gl22);
        let out = recognize_double_extension(&gl22.alg, &b).unwrap();
        let RecognitionOutcome::Recognized(rec) = out else {
            panic!("should recognize");
        };
        assert_eq!(rec.data.base.sdim(), (6, 8));
        assert!(rec.data.form.is_nondegenerate(&f));
        assert!(rec
            .data
            .form
            .invariance_violation(&rec.data.base)
            .is_none());
        verify_roundtrip(&gl22.alg, &rec).unwrap();
    }

    #[test]
    fn recognize_oscillator_roundtrip() {
        let f = Field::Q;
        let data = oscillator_data(&f);
        let ext = double_extend(&data).unwrap();
        let out = recognize_double_extension(&ext.alg, &ext.form).unwrap();
        let RecognitionOutcome::Recognized(rec) = out else {
            panic!("should recognize");
        };
        assert_eq!(rec.data.base.dim(), 2);
        verify_roundtrip(&ext.alg, &rec).unwrap();
    }

    #[test]
    fn queerify_gl2_over_f2() {
        let f = Field::gf(2, 1);
        let gl2 = matrixalg::gl(&f, 2, 0);
        let b = matrixalg::tr_form(&f, &gl2);
        assert!(b.is_nondegenerate(&f));
        // restricted power map: matrix squaring
        let pmap: Vec<SparseVec> = gl2
            .mats
            .iter()
            .map(|m| {
                let sq = m.mul(&f, m);
                // express in the basis: E_ij squared is E_ij E_ij
                let mut out = SparseVec::new();
                for (idx, mm) in gl2.mats.iter().enumerate() {
                    // basis matrices are unit matrices: coefficient is the
                    // corresponding entry
                    let mut val = f.zero();
                    for (a, bb) in sq.data.iter().zip(mm.data.iter()) {
                        if !f.is_zero(bb) {
                            val = a.clone();
                        }
                    }
                    if !f.is_zero(&val) {
                        out.push((idx, val));
                    }
                }
                out
            })
            .collect();
        let (qalg, qform) = queerify(&gl2.alg, &pmap, &b).unwrap();
        assert_eq!(qalg.sdim(), (4, 4));
        assert!(qform.is_nondegenerate(&f));
        assert!(qform.invariance_violation(&qalg).is_none());
        assert_eq!(qform.parity, 1);
        // q(x, y) = q(Px, Py) = 0 structurally
        for i in 0..4 {
            for j in 0..4 {
                assert!(f.is_zero(qform.gram.at(i, j)));
                assert!(f.is_zero(qform.gram.at(i + 4, j + 4)));
            }
        }
    }

    #[test]
    fn queerify_abelian_with_identity_form() {
        let f = Field::gf(2, 1);
        let base = SuperAlgebra::new(
            f.clone(),
            vec![BasisElem::even("a"), BasisElem::even("b")],
            vec![],
            None,
        )
        .unwrap();
        let form = BilinearForm {
            parity: 0,
            gram: Mat::identity(&f, 2),
        };
        let pmap = vec![SparseVec::new(), SparseVec::new()];
        let (qalg, qform) = queerify(&base, &pmap, &form).unwrap();
        // all brackets vanish, including on the odd part
        assert!(qalg.stored_brackets().is_empty());
        assert!(qform.is_nondegenerate(&f));
    }

    #[test]
    fn queerify_requires_pmap_consistency() {
        let f = Field::gf(2, 1);
        let alg = SuperAlgebra::new(
            f.clone(),
            vec![
                BasisElem::even("x"),
                BasisElem::even("y"),
                BasisElem::even("z"),
            ],
            vec![(0, 1, vec![(2, f.one())])],
            None,
        )
        .unwrap();
        // heisenberg over GF(2) has no nondegenerate invariant form
        let space = crate::forms::invariant_forms(&alg, 0);
        let res = crate::forms::find_nis(&f, &space);
        assert!(res.form.is_none());
    }
}
