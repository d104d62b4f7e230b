//! Finite-dimensional Lie (super)algebras as sparse structure constants,
//! with the structural queries everything else builds on: Jacobi checking,
//! derived algebra, center, quotients, ideals, simplicity.

use crate::linalg::{sv_axpy, Echelon, SparseVec};
use crate::scalar::{Field, Scalar};
use crate::util::{map_indexed, SplitMix64};
use std::collections::BTreeMap;
use std::fmt;

/// Default cap for exhaustive operations (Jacobi over all triples, ideal
/// search). Overridable per call.
pub const DIM_CAP: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElem {
    pub name: String,
    pub parity: u8,
    pub degree: Option<i64>,
}

impl BasisElem {
    pub fn even(name: impl Into<String>) -> Self {
        BasisElem {
            name: name.into(),
            parity: 0,
            degree: None,
        }
    }

    pub fn odd(name: impl Into<String>) -> Self {
        BasisElem {
            name: name.into(),
            parity: 1,
            degree: None,
        }
    }

    pub fn with_degree(mut self, d: i64) -> Self {
        self.degree = Some(d);
        self
    }
}

#[derive(Clone, Debug, Default)]
pub struct Meta {
    pub series: Option<String>,
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug)]
pub enum AlgebraError {
    ParityViolation { i: usize, j: usize, k: usize },
    DegreeViolation { i: usize, j: usize, k: usize },
    DiagonalBracket(usize),
    SquaringWithoutChar2,
    SquaringParity(usize),
    NotAnIdeal { basis: usize, witness: Vec<Scalar> },
    NotClosed { i: usize, j: usize },
    InhomogeneousSubspace,
    DimensionCap { dim: usize, cap: usize },
    FieldMismatch,
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::ParityViolation { i, j, k } => {
                write!(f, "bracket [{i},{j}] has component {k} of wrong parity")
            }
            AlgebraError::DegreeViolation { i, j, k } => {
                write!(f, "bracket [{i},{j}] has component {k} of wrong degree")
            }
            AlgebraError::DiagonalBracket(i) => {
                write!(f, "diagonal bracket [{i},{i}] not allowed here")
            }
            AlgebraError::SquaringWithoutChar2 => {
                write!(f, "squaring map requires characteristic 2")
            }
            AlgebraError::SquaringParity(i) => {
                write!(f, "squaring value of {i} has wrong parity")
            }
            AlgebraError::NotAnIdeal { basis, witness: _ } => {
                write!(f, "subspace is not an ideal (bracket with basis {basis} escapes)")
            }
            AlgebraError::NotClosed { i, j } => {
                write!(f, "subspace not closed under bracket at pair ({i},{j})")
            }
            AlgebraError::InhomogeneousSubspace => write!(f, "subspace is not parity-homogeneous"),
            AlgebraError::DimensionCap { dim, cap } => {
                write!(f, "dimension {dim} exceeds cap {cap}; pass a larger cap to force")
            }
            AlgebraError::FieldMismatch => write!(f, "field mismatch"),
        }
    }
}

impl std::error::Error for AlgebraError {}

/// A finite-dimensional Lie (super)algebra given by a homogeneous basis and
/// sparse structure constants stored for i <= j only; the other half is
/// reconstructed through superantisymmetry.
#[derive(Clone, Debug)]
pub struct SuperAlgebra {
    pub field: Field,
    pub basis: Vec<BasisElem>,
    brackets: BTreeMap<(u32, u32), SparseVec>,
    /// Optional squaring data, characteristic 2 only. For odd elements this
    /// is the super squaring x -> x^2; for even elements of a plain Lie
    /// algebra it doubles as the restricted power map.
    pub squaring: Option<BTreeMap<u32, SparseVec>>,
    pub meta: Meta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobiMode {
    All,
    Random { samples: usize, seed: u64 },
}

/// A subspace as reduced echelon rows over the ambient coordinates.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub ambient: usize,
    /// Echelon rows, each nonzero, sorted by pivot column.
    pub rows: Vec<SparseVec>,
}

impl Subspace {
    pub fn from_vectors(field: &Field, ambient: usize, vecs: &[SparseVec]) -> Subspace {
        let mut ech = Echelon::new(field);
        for v in vecs {
            ech.insert(v.clone());
        }
        Subspace {
            ambient,
            rows: ech.rows().iter().map(|(_, r)| r.clone()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn echelon(&self, field: &Field) -> Echelon {
        let mut ech = Echelon::new(field);
        for r in &self.rows {
            ech.insert(r.clone());
        }
        ech
    }

    pub fn contains(&self, field: &Field, v: &SparseVec) -> bool {
        self.echelon(field).contains(v)
    }
}

impl SuperAlgebra {
    /// Builds an algebra from raw bracket entries, canonicalizing storage and
    /// validating parity/degree homogeneity. Entries may be given in any
    /// order and orientation; duplicates accumulate.
    pub fn new(
        field: Field,
        basis: Vec<BasisElem>,
        raw: Vec<(usize, usize, SparseVec)>,
        squaring: Option<BTreeMap<u32, SparseVec>>,
    ) -> Result<SuperAlgebra, AlgebraError> {
        let char2 = field.characteristic() == 2;
        let mut brackets: BTreeMap<(u32, u32), SparseVec> = BTreeMap::new();
        for (i, j, vec) in raw {
            if vec.is_empty() {
                continue;
            }
            let (key, adjusted) = if i < j {
                ((i as u32, j as u32), vec)
            } else if i > j {
                // [e_i, e_j] = -(-1)^{p_i p_j} [e_j, e_i]
                let sign_neg = !char2;
                let flip = basis[i].parity == 1 && basis[j].parity == 1;
                let mut v = vec;
                // coefficient for stored (j,i): s where [e_j,e_i] = s * given
                // given = [e_i,e_j] = -(-1)^{pp} [e_j,e_i]
                // so [e_j,e_i] = -(-1)^{pp} given
                let mut scale_minus = true; // always a factor -1
                if flip {
                    scale_minus = !scale_minus; // extra -1 from (-1)^{p_i p_j}
                }
                if scale_minus && sign_neg {
                    v = v.iter().map(|(k, s)| (*k, field.neg(s))).collect();
                }
                ((j as u32, i as u32), v)
            } else {
                // diagonal: allowed only for odd i in characteristic != 2
                if basis[i].parity == 1 && !char2 {
                    ((i as u32, i as u32), vec)
                } else {
                    return Err(AlgebraError::DiagonalBracket(i));
                }
            };
            match brackets.get_mut(&key) {
                Some(existing) => {
                    sv_axpy(&field, existing, &field.one(), &adjusted);
                    if existing.is_empty() {
                        brackets.remove(&key);
                    }
                }
                None => {
                    brackets.insert(key, adjusted);
                }
            }
        }
        if squaring.is_some() && !char2 {
            return Err(AlgebraError::SquaringWithoutChar2);
        }
        let alg = SuperAlgebra {
            field,
            basis,
            brackets,
            squaring,
            meta: Meta::default(),
        };
        alg.validate_homogeneity()?;
        Ok(alg)
    }

    pub fn with_meta(mut self, series: &str, params: &[(&str, String)]) -> Self {
        self.meta.series = Some(series.to_string());
        for (k, v) in params {
            self.meta.params.insert(k.to_string(), v.clone());
        }
        self
    }

    fn validate_homogeneity(&self) -> Result<(), AlgebraError> {
        for ((i, j), vec) in &self.brackets {
            let (i, j) = (*i as usize, *j as usize);
            let parity = (self.basis[i].parity + self.basis[j].parity) % 2;
            let deg = match (self.basis[i].degree, self.basis[j].degree) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
            for (k, _) in vec {
                if self.basis[*k].parity != parity {
                    return Err(AlgebraError::ParityViolation { i, j, k: *k });
                }
                if let (Some(d), Some(dk)) = (deg, self.basis[*k].degree) {
                    if d != dk {
                        return Err(AlgebraError::DegreeViolation { i, j, k: *k });
                    }
                }
            }
        }
        if let Some(sq) = &self.squaring {
            for (i, vec) in sq {
                let i = *i as usize;
                for (k, _) in vec {
                    // square of a homogeneous element is even
                    if self.basis[*k].parity != 0 {
                        return Err(AlgebraError::SquaringParity(i));
                    }
                    if let (Some(d), Some(dk)) = (self.basis[i].degree, self.basis[*k].degree) {
                        if 2 * d != dk {
                            return Err(AlgebraError::DegreeViolation { i, j: i, k: *k });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn sdim(&self) -> (usize, usize) {
        let odd = self.basis.iter().filter(|b| b.parity == 1).count();
        (self.basis.len() - odd, odd)
    }

    pub fn parity(&self, i: usize) -> u8 {
        self.basis[i].parity
    }

    pub fn graded(&self) -> bool {
        self.basis.iter().all(|b| b.degree.is_some())
    }

    pub fn stored_brackets(&self) -> &BTreeMap<(u32, u32), SparseVec> {
        &self.brackets
    }

    /// [e_i, e_j] with superantisymmetry applied for i > j.
    pub fn bracket_basis(&self, i: usize, j: usize) -> SparseVec {
        if i <= j {
            self.brackets
                .get(&(i as u32, j as u32))
                .cloned()
                .unwrap_or_default()
        } else {
            let stored = self
                .brackets
                .get(&(j as u32, i as u32))
                .cloned()
                .unwrap_or_default();
            let both_odd = self.basis[i].parity == 1 && self.basis[j].parity == 1;
            if both_odd {
                stored
            } else {
                stored
                    .iter()
                    .map(|(k, s)| (*k, self.field.neg(s)))
                    .collect()
            }
        }
    }

    /// Bilinear extension of the bracket to sparse coordinate vectors.
    pub fn bracket(&self, x: &[(usize, Scalar)], y: &[(usize, Scalar)]) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, ci) in x {
            for (j, cj) in y {
                let b = self.bracket_basis(*i, *j);
                if b.is_empty() {
                    continue;
                }
                let c = self.field.mul(ci, cj);
                sv_axpy(&self.field, &mut out, &c, &b);
            }
        }
        out
    }

    /// Squaring value of basis element i (zero when absent).
    pub fn squaring_basis(&self, i: usize) -> SparseVec {
        self.squaring
            .as_ref()
            .and_then(|m| m.get(&(i as u32)).cloned())
            .unwrap_or_default()
    }

    /// Super Jacobi check in derivation form:
    /// [x,[y,z]] = [[x,y],z] + (-1)^{p(x)p(y)} [y,[x,z]].
    /// With a squaring map (p = 2) additionally checks
    /// [s(x), y] = [x, [x, y]] for every basis x with squaring data.
    /// Returns the violating triples; empty means pass.
    pub fn check_jacobi(&self, mode: JacobiMode) -> Vec<(usize, usize, usize)> {
        let n = self.dim();
        let triple_ok = |i: usize, j: usize, k: usize| -> bool {
            let a = self.bracket(&self.bracket_basis(i, j), &[(k, self.field.one())]);
            let b = self.bracket(&[(i, self.field.one())], &self.bracket_basis(j, k));
            let c = self.bracket(&[(j, self.field.one())], &self.bracket_basis(i, k));
            // b - a - sign * c == 0
            let mut acc = b;
            sv_axpy(&self.field, &mut acc, &self.field.from_int(-1), &a);
            let sign = if self.basis[i].parity == 1 && self.basis[j].parity == 1 {
                self.field.one()
            } else {
                self.field.from_int(-1)
            };
            sv_axpy(&self.field, &mut acc, &sign, &c);
            acc.is_empty()
        };
        let mut violations: Vec<(usize, usize, usize)> = match mode {
            JacobiMode::All => {
                let per_i = map_indexed(n, |i| {
                    let mut out = Vec::new();
                    for j in 0..n {
                        for k in 0..n {
                            if !triple_ok(i, j, k) {
                                out.push((i, j, k));
                            }
                        }
                    }
                    out
                });
                per_i.into_iter().flatten().collect()
            }
            JacobiMode::Random { samples, seed } => {
                let mut rng = SplitMix64::new(seed);
                let triples: Vec<(usize, usize, usize)> = (0..samples)
                    .map(|_| {
                        (
                            rng.usize_below(n),
                            rng.usize_below(n),
                            rng.usize_below(n),
                        )
                    })
                    .collect();
                let flags = map_indexed(triples.len(), |t| {
                    let (i, j, k) = triples[t];
                    if triple_ok(i, j, k) {
                        None
                    } else {
                        Some((i, j, k))
                    }
                });
                flags.into_iter().flatten().collect()
            }
        };
        // squaring consistency at p = 2
        if let Some(sq) = &self.squaring {
            for (i, sx) in sq {
                let i = *i as usize;
                for j in 0..n {
                    let lhs = self.bracket(sx, &[(j, self.field.one())]);
                    let inner = self.bracket_basis(i, j);
                    let rhs = self.bracket(&[(i, self.field.one())], &inner);
                    let mut acc = lhs;
                    sv_axpy(&self.field, &mut acc, &self.field.from_int(-1), &rhs);
                    if !acc.is_empty() {
                        violations.push((i, i, j));
                    }
                }
            }
        }
        violations.sort();
        violations.dedup();
        violations
    }

    /// Derived algebra [g, g] (plus squaring images when present), returned
    /// as a new algebra together with its embedding rows into `self`.
    pub fn derived_algebra(&self) -> (SuperAlgebra, Vec<SparseVec>) {
        let mut spanning = Vec::new();
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                let b = self.bracket_basis(i, j);
                if !b.is_empty() {
                    spanning.push(b);
                }
            }
        }
        if let Some(sq) = &self.squaring {
            for v in sq.values() {
                if !v.is_empty() {
                    spanning.push(v.clone());
                }
            }
        }
        let sub = self.homogeneous_subspace(&spanning);
        let alg = self
            .subalgebra_on(&sub)
            .expect("derived algebra is bracket-closed");
        (alg, sub.rows)
    }

    /// Center: kernel of the joint adjoint action.
    pub fn center(&self) -> Subspace {
        let n = self.dim();
        // unknowns x_i; equations: sum_i x_i [e_i, e_j]_k = 0 for all j, k
        let mut rows: Vec<SparseVec> = Vec::new();
        for j in 0..n {
            let mut per_k: BTreeMap<usize, SparseVec> = BTreeMap::new();
            for i in 0..n {
                for (k, c) in self.bracket_basis(i, j) {
                    per_k.entry(k).or_default().push((i, c));
                }
            }
            for (_, mut row) in per_k {
                row.sort_by_key(|(i, _)| *i);
                rows.push(row);
            }
        }
        let kernel = crate::linalg::kernel_sparse(&self.field, &rows, n);
        let vecs: Vec<SparseVec> = kernel
            .iter()
            .map(|v| crate::linalg::sv_from_dense(&self.field, v))
            .collect();
        self.homogeneous_subspace(&vecs)
    }

    /// Splits spanning vectors into parity (and degree, when graded)
    /// homogeneous components and echelonizes per class. The result is a
    /// homogeneous echelon basis, ordered by (degree, parity, pivot).
    pub fn homogeneous_subspace(&self, spanning: &[SparseVec]) -> Subspace {
        let mut classes: BTreeMap<(i64, u8), Echelon> = BTreeMap::new();
        for v in spanning {
            let mut split: BTreeMap<(i64, u8), SparseVec> = BTreeMap::new();
            for (i, c) in v {
                let key = (self.basis[*i].degree.unwrap_or(0), self.basis[*i].parity);
                split.entry(key).or_default().push((*i, c.clone()));
            }
            for (key, mut comp) in split {
                comp.sort_by_key(|(i, _)| *i);
                classes
                    .entry(key)
                    .or_insert_with(|| Echelon::new(&self.field))
                    .insert(comp);
            }
        }
        let mut rows = Vec::new();
        for (_, ech) in classes {
            for (_, r) in ech.rows() {
                rows.push(r.clone());
            }
        }
        Subspace {
            ambient: self.dim(),
            rows,
        }
    }

    /// Restricts the algebra to a bracket-closed homogeneous subspace.
    pub fn subalgebra_on(&self, sub: &Subspace) -> Result<SuperAlgebra, AlgebraError> {
        let ech = sub.echelon(&self.field);
        let m = sub.rows.len();
        let mut basis = Vec::with_capacity(m);
        for (idx, r) in sub.rows.iter().enumerate() {
            let (par, deg) = self.row_homogeneity(r)?;
            basis.push(BasisElem {
                name: format!("s{idx}"),
                parity: par,
                degree: deg,
            });
        }
        // map from ambient pivot column to subspace row index
        let mut pivot_to_row = BTreeMap::new();
        for (idx, r) in sub.rows.iter().enumerate() {
            pivot_to_row.insert(r[0].0, idx);
        }
        let mut raw = Vec::new();
        let mut sq_out: BTreeMap<u32, SparseVec> = BTreeMap::new();
        for i in 0..m {
            for j in i..m {
                if i == j && !(self.basis_parity_of_row(&sub.rows[i]) == 1
                    && self.field.characteristic() != 2)
                {
                    continue;
                }
                let b = self.bracket(&sub.rows[i], &sub.rows[j]);
                if b.is_empty() {
                    continue;
                }
                let coords = ech
                    .coordinates(&b)
                    .ok_or(AlgebraError::NotClosed { i, j })?;
                let vec: SparseVec = coords
                    .into_iter()
                    .map(|(pivot, c)| (pivot_to_row[&pivot], c))
                    .collect();
                let mut vec = vec;
                vec.sort_by_key(|(k, _)| *k);
                raw.push((i, j, vec));
            }
        }
        if let Some(_sq) = &self.squaring {
            for (i, row) in sub.rows.iter().enumerate() {
                let sv = self.square_vector(row);
                if sv.is_empty() {
                    continue;
                }
                let coords = ech
                    .coordinates(&sv)
                    .ok_or(AlgebraError::NotClosed { i, j: i })?;
                let mut vec: SparseVec = coords
                    .into_iter()
                    .map(|(pivot, c)| (pivot_to_row[&pivot], c))
                    .collect();
                vec.sort_by_key(|(k, _)| *k);
                sq_out.insert(i as u32, vec);
            }
        }
        let squaring = if self.squaring.is_some() {
            Some(sq_out)
        } else {
            None
        };
        SuperAlgebra::new(self.field.clone(), basis, raw, squaring)
    }

    fn basis_parity_of_row(&self, row: &SparseVec) -> u8 {
        row.first()
            .map(|(i, _)| self.basis[*i].parity)
            .unwrap_or(0)
    }

    fn row_homogeneity(&self, row: &SparseVec) -> Result<(u8, Option<i64>), AlgebraError> {
        let mut parity = None;
        let mut degree = None;
        let mut degree_consistent = true;
        for (i, _) in row {
            let p = self.basis[*i].parity;
            match parity {
                None => parity = Some(p),
                Some(q) if q != p => return Err(AlgebraError::InhomogeneousSubspace),
                _ => {}
            }
            match (degree, self.basis[*i].degree) {
                (None, d) => degree = d,
                (Some(a), Some(b)) if a != b => degree_consistent = false,
                _ => {}
            }
        }
        Ok((
            parity.unwrap_or(0),
            if degree_consistent { degree } else { None },
        ))
    }

    /// Squaring extended to arbitrary vectors at p = 2:
    /// s(sum c_i e_i) = sum c_i^2 s(e_i) + sum_{i<j} c_i c_j [e_i, e_j].
    pub fn square_vector(&self, x: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (a, (i, ci)) in x.iter().enumerate() {
            let c2 = self.field.mul(ci, ci);
            sv_axpy(&self.field, &mut out, &c2, &self.squaring_basis(*i));
            for (j, cj) in x.iter().skip(a + 1) {
                let c = self.field.mul(ci, cj);
                sv_axpy(&self.field, &mut out, &c, &self.bracket_basis(*i, *j));
            }
        }
        out
    }

    /// True when [g, V] is contained in V.
    pub fn is_ideal(&self, sub: &Subspace) -> Result<(), AlgebraError> {
        let ech = sub.echelon(&self.field);
        for j in 0..self.dim() {
            for row in &sub.rows {
                let b = self.bracket(&[(j, self.field.one())], row);
                if !ech.contains(&b) {
                    return Err(AlgebraError::NotAnIdeal {
                        basis: j,
                        witness: crate::linalg::sv_to_dense(&self.field, row, self.dim()),
                    });
                }
            }
        }
        Ok(())
    }

    /// Quotient by an ideal: basis is the set of non-pivot coordinates.
    pub fn quotient(&self, ideal: &Subspace) -> Result<SuperAlgebra, AlgebraError> {
        self.is_ideal(ideal)?;
        for row in &ideal.rows {
            self.row_homogeneity(row)?;
        }
        let ech = ideal.echelon(&self.field);
        let pivots: std::collections::BTreeSet<usize> = ech.pivots().into_iter().collect();
        let keep: Vec<usize> = (0..self.dim()).filter(|i| !pivots.contains(i)).collect();
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(a, i)| (*i, a)).collect();
        let basis: Vec<BasisElem> = keep
            .iter()
            .map(|&i| BasisElem {
                name: format!("q.{}", self.basis[i].name),
                parity: self.basis[i].parity,
                degree: self.basis[i].degree,
            })
            .collect();
        let project = |v: &SparseVec| -> SparseVec {
            let reduced = ech.reduce(v.clone());
            reduced
                .into_iter()
                .map(|(i, c)| (pos[&i], c))
                .collect::<Vec<_>>()
        };
        let mut raw = Vec::new();
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate().skip(a) {
                if i == j && !(self.basis[i].parity == 1 && self.field.characteristic() != 2) {
                    continue;
                }
                let br = self.bracket_basis(i, j);
                let mut vec = project(&br);
                vec.sort_by_key(|(k, _)| *k);
                if !vec.is_empty() {
                    raw.push((a, b, vec));
                }
            }
        }
        let squaring = match &self.squaring {
            None => None,
            Some(sq) => {
                let mut out = BTreeMap::new();
                for (a, &i) in keep.iter().enumerate() {
                    if let Some(v) = sq.get(&(i as u32)) {
                        let mut vec = project(v);
                        vec.sort_by_key(|(k, _)| *k);
                        if !vec.is_empty() {
                            out.insert(a as u32, vec);
                        }
                    }
                }
                Some(out)
            }
        };
        SuperAlgebra::new(self.field.clone(), basis, raw, squaring)
    }

    /// Minimal adjoint-invariant subspace containing `seed`.
    pub fn invariant_closure(&self, seed: &[(usize, Scalar)]) -> Subspace {
        let mut ech = Echelon::new(&self.field);
        let mut queue = vec![seed.to_vec()];
        ech.insert(seed.to_vec());
        while let Some(v) = queue.pop() {
            for j in 0..self.dim() {
                let b = self.bracket(&[(j, self.field.one())], &v);
                let reduced = ech.reduce(b);
                if !reduced.is_empty() {
                    queue.push(reduced.clone());
                    ech.insert(reduced);
                }
            }
        }
        Subspace {
            ambient: self.dim(),
            rows: ech.rows().iter().map(|(_, r)| r.clone()).collect(),
        }
    }

    /// Exhaustive-ish simplicity test: closes the invariant subspace from
    /// every basis vector and a batch of seeded random vectors. Refuses
    /// (returns Err) above the dimension cap rather than guessing.
    pub fn is_simple(&self, cap: Option<usize>) -> Result<bool, AlgebraError> {
        let cap = cap.unwrap_or(DIM_CAP);
        let n = self.dim();
        if n > cap {
            return Err(AlgebraError::DimensionCap { dim: n, cap });
        }
        if n <= 1 {
            return Ok(false);
        }
        let (derived, _) = self.derived_algebra();
        if derived.dim() < n {
            return Ok(false);
        }
        if self.center().dim() > 0 {
            return Ok(false);
        }
        let full = |sub: &Subspace| sub.dim() == n;
        for i in 0..n {
            let closure = self.invariant_closure(&[(i, self.field.one())]);
            if !full(&closure) {
                return Ok(false);
            }
        }
        let mut rng = SplitMix64::new(0xA55A);
        for _ in 0..(2 * n) {
            let mut v: SparseVec = Vec::new();
            for i in 0..n {
                let c = self.field.sample(&mut rng, 5);
                if !self.field.is_zero(&c) {
                    v.push((i, c));
                }
            }
            if v.is_empty() {
                continue;
            }
            let closure = self.invariant_closure(&v);
            if !full(&closure) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Degrees present in the grading with component dimensions.
    pub fn graded_components(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, b) in self.basis.iter().enumerate() {
            out.entry(b.degree.unwrap_or(0)).or_default().push(i);
        }
        out
    }

    /// Drops degree data (used when a quotient breaks a grading).
    pub fn forget_grading(mut self) -> Self {
        for b in self.basis.iter_mut() {
            b.degree = None;
        }
        self
    }

    pub fn basis_names(&self) -> Vec<&str> {
        self.basis.iter().map(|b| b.name.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }
}

#[cfg(test)]
pub mod test_algebras {
    use super::*;

    /// Heisenberg: [x, y] = z.
    pub fn heisenberg(field: &Field) -> SuperAlgebra {
        SuperAlgebra::new(
            field.clone(),
            vec![
                BasisElem::even("x"),
                BasisElem::even("y"),
                BasisElem::even("z"),
            ],
            vec![(0, 1, vec![(2, field.one())])],
            None,
        )
        .unwrap()
    }

    /// sl(2) with [h,e] = 2e, [h,f] = -2f, [e,f] = h; basis order (e, h, f).
    pub fn sl2(field: &Field) -> SuperAlgebra {
        SuperAlgebra::new(
            field.clone(),
            vec![
                BasisElem::even("e").with_degree(1),
                BasisElem::even("h").with_degree(0),
                BasisElem::even("f").with_degree(-1),
            ],
            vec![
                (1, 0, vec![(0, field.from_int(2))]),
                (1, 2, vec![(2, field.from_int(-2))]),
                (0, 2, vec![(1, field.one())]),
            ],
            None,
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_algebras::*;
    use super::*;

    #[test]
    fn heisenberg_passes_jacobi() {
        let alg = heisenberg(&Field::Q);
        assert!(alg.check_jacobi(JacobiMode::All).is_empty());
    }

    #[test]
    fn sl2_passes_jacobi() {
        let alg = sl2(&Field::Q);
        assert!(alg.check_jacobi(JacobiMode::All).is_empty());
    }

    #[test]
    fn wrong_constant_violates_on_h_e_f() {
        // [h,e] = e instead of 2e
        let f = Field::Q;
        let alg = SuperAlgebra::new(
            f.clone(),
            vec![
                BasisElem::even("e"),
                BasisElem::even("h"),
                BasisElem::even("f"),
            ],
            vec![
                (1, 0, vec![(0, f.one())]),
                (1, 2, vec![(2, f.from_int(-2))]),
                (0, 2, vec![(1, f.one())]),
            ],
            None,
        )
        .unwrap();
        let violations = alg.check_jacobi(JacobiMode::All);
        assert!(!violations.is_empty());
        // some violation touches the triple {h, e, f} in some order
        assert!(violations.iter().any(|(i, j, k)| {
            let mut v = [*i, *j, *k];
            v.sort();
            v == [0, 1, 2]
        }));
    }

    #[test]
    fn heisenberg_derived_center_quotient() {
        let f = Field::Q;
        let alg = heisenberg(&f);
        let (derived, rows) = alg.derived_algebra();
        assert_eq!(derived.dim(), 1);
        assert_eq!(rows[0], vec![(2, f.one())]);
        let center = alg.center();
        assert_eq!(center.dim(), 1);
        assert_eq!(center.rows[0], vec![(2, f.one())]);
        let q = alg.quotient(&center).unwrap();
        assert_eq!(q.dim(), 2);
        assert!(q.stored_brackets().is_empty());
    }

    #[test]
    fn quotient_by_zero_is_identity() {
        let f = Field::Q;
        let alg = sl2(&f);
        let zero = Subspace {
            ambient: 3,
            rows: vec![],
        };
        let q = alg.quotient(&zero).unwrap();
        assert_eq!(q.dim(), 3);
        for ((i, j), v) in alg.stored_brackets() {
            assert_eq!(q.stored_brackets().get(&(*i, *j)), Some(v));
        }
    }

    #[test]
    fn quotient_by_non_ideal_rejected() {
        let f = Field::Q;
        let alg = sl2(&f);
        let sub = Subspace::from_vectors(&f, 3, &[vec![(0, f.one())]]); // span(e)
        assert!(matches!(
            alg.quotient(&sub),
            Err(AlgebraError::NotAnIdeal { .. })
        ));
    }

    #[test]
    fn simplicity() {
        assert!(sl2(&Field::Q).is_simple(None).unwrap());
        assert!(!heisenberg(&Field::Q).is_simple(None).unwrap());
    }

    #[test]
    fn derived_and_center_are_ideals() {
        let alg = heisenberg(&Field::Q);
        let (_, rows) = alg.derived_algebra();
        let sub = Subspace {
            ambient: 3,
            rows,
        };
        assert!(alg.is_ideal(&sub).is_ok());
        assert!(alg.is_ideal(&alg.center()).is_ok());
    }

    #[test]
    fn jacobi_random_mode_agrees() {
        let alg = sl2(&Field::gf(7, 1));
        assert!(alg
            .check_jacobi(JacobiMode::Random {
                samples: 50,
                seed: 7
            })
            .is_empty());
    }
}
