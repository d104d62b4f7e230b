//! Exact field arithmetic: the rationals and small finite fields GF(p^k).
//!
//! Scalars are canonical values (reduced fractions, residue polynomials of
//! degree < k) so equality is structural. All arithmetic goes through a
//! [`Field`] handle; no floating point anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Construction-time description of a field, as given by a user or a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    /// 0 for the rationals, otherwise a prime.
    pub characteristic: u64,
    /// Extension degree k; 1 when characteristic is 0.
    pub extension_degree: u32,
    /// Monic irreducible modulus coefficients (low to high, length k+1).
    /// Absent for k = 1 or characteristic 0; a canonical one is chosen.
    pub modulus: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldError {
    CompositeCharacteristic(u64),
    BadExtensionDegree(u32),
    ReducibleModulus(Vec<u64>),
    BadModulus(String),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::CompositeCharacteristic(p) => {
                write!(f, "characteristic {p} is not 0 or prime")
            }
            FieldError::BadExtensionDegree(k) => {
                write!(f, "extension degree {k} out of range (1..=8)")
            }
            FieldError::ReducibleModulus(m) => write!(f, "modulus {m:?} is reducible"),
            FieldError::BadModulus(s) => write!(f, "bad modulus: {s}"),
        }
    }
}

impl std::error::Error for FieldError {}

/// An exact field: the rationals or GF(p^k) with a fixed modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Field {
    Q,
    Gf {
        p: u64,
        k: u32,
        /// Monic modulus, low-to-high coefficients, length k+1. For k = 1
        /// this is the trivial `x` and never used in arithmetic.
        modulus: Vec<u64>,
    },
}

/// A field element in canonical form.
///
/// GF elements pack the residue polynomial digits base p into a u64, which
/// keeps scalars cheap to copy and hash for p^k up to 7^8.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rat(BigRational),
    Gf(u64),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Polynomial helpers over GF(p), coefficients low to high, for modulus search
// and irreducibility testing. Sizes here are tiny (deg <= 8).
fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_rem(&mut prod, m, p);
    prod
}

/// Reduces `a` modulo monic `m` in place (then trims).
fn poly_rem(a: &mut Vec<u64>, m: &[u64], p: u64) {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = *a.last().unwrap() % p;
        let shift = a.len() - 1 - dm;
        if lead != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let idx = shift + i;
                let sub = (lead * mi) % p;
                a[idx] = (a[idx] + p * p - sub) % p;
            }
        }
        a.pop();
        poly_trim(a);
        if a.is_empty() {
            break;
        }
    }
    poly_trim(a);
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        // x mod y with y made monic first
        let inv = mod_inv_u64(*y.last().unwrap(), p);
        let ym: Vec<u64> = y.iter().map(|c| c * inv % p).collect();
        poly_rem(&mut x, &ym, p);
        std::mem::swap(&mut x, &mut y);
    }
    x
}

fn mod_inv_u64(a: u64, p: u64) -> u64 {
    // Fermat; p is a small prime.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// x^(p^e) mod m by repeated Frobenius.
fn poly_xpow_pe(m: &[u64], p: u64, e: u32) -> Vec<u64> {
    let mut x = vec![0u64, 1];
    poly_rem(&mut x, m, p);
    for _ in 0..e {
        // raise to p-th power
        let mut acc = vec![1u64];
        let mut base = x.clone();
        let mut exp = p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = poly_mul_mod(&acc, &base, m, p);
            }
            base = poly_mul_mod(&base, &base, m, p);
            exp >>= 1;
        }
        x = acc;
    }
    x
}

fn poly_is_irreducible(m: &[u64], p: u64) -> bool {
    let k = (m.len() - 1) as u32;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    // x^(p^k) == x mod m
    let xpk = poly_xpow_pe(m, p, k);
    let mut x = vec![0u64, 1];
    poly_rem(&mut x, m, p);
    if xpk != x {
        return false;
    }
    // gcd(x^(p^(k/q)) - x, m) must be constant for every prime divisor q of k
    let mut q = 2;
    let mut kk = k;
    let mut primes = Vec::new();
    while q * q <= kk {
        if kk % q == 0 {
            primes.push(q);
            while kk % q == 0 {
                kk /= q;
            }
        }
        q += 1;
    }
    if kk > 1 {
        primes.push(kk);
    }
    for q in primes {
        let mut diff = poly_xpow_pe(m, p, k / q);
        // diff -= x
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        poly_trim(&mut diff);
        let g = poly_gcd(&diff, m, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of degree k over
/// GF(p). This serves as a fixed modulus table: the result is deterministic,
/// and for the small fields used in practice it matches the usual choices
/// (x^2+x+1 for GF(4), x^3+x+1 for GF(8), x^2+1 for GF(9), x^4+x+1 for
/// GF(16)).
pub fn canonical_modulus(p: u64, k: u32) -> Vec<u64> {
    if k == 1 {
        return vec![0, 1];
    }
    let total = (p as u128).pow(k);
    for idx in 0..total {
        let mut m = Vec::with_capacity(k as usize + 1);
        let mut v = idx;
        for _ in 0..k {
            m.push((v % p as u128) as u64);
            v /= p as u128;
        }
        m.push(1);
        if poly_is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}

impl Field {
    /// Builds a field from a spec, validating all invariants.
    pub fn make(spec: &FieldSpec) -> Result<Field, FieldError> {
        if spec.characteristic == 0 {
            if spec.extension_degree != 1 {
                return Err(FieldError::BadExtensionDegree(spec.extension_degree));
            }
            return Ok(Field::Q);
        }
        let p = spec.characteristic;
        if !is_prime(p) {
            return Err(FieldError::CompositeCharacteristic(p));
        }
        let k = spec.extension_degree;
        if k == 0 || k > 8 {
            return Err(FieldError::BadExtensionDegree(k));
        }
        let modulus = match &spec.modulus {
            Some(m) => {
                let mut m = m.clone();
                for c in m.iter_mut() {
                    *c %= p;
                }
                poly_trim(&mut m);
                if m.len() != k as usize + 1 {
                    return Err(FieldError::BadModulus(format!(
                        "degree {} does not match extension degree {}",
                        m.len().saturating_sub(1),
                        k
                    )));
                }
                if *m.last().unwrap() != 1 {
                    return Err(FieldError::BadModulus("not monic".into()));
                }
                if !poly_is_irreducible(&m, p) {
                    return Err(FieldError::ReducibleModulus(m));
                }
                m
            }
            None => canonical_modulus(p, k),
        };
        Ok(Field::Gf { p, k, modulus })
    }

    pub fn q() -> Field {
        Field::Q
    }

    pub fn gf(p: u64, k: u32) -> Field {
        Field::make(&FieldSpec {
            characteristic: p,
            extension_degree: k,
            modulus: None,
        })
        .expect("valid prime power")
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Q => 0,
            Field::Gf { p, .. } => *p,
        }
    }

    /// Number of elements for finite fields, None for the rationals.
    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Q => None,
            Field::Gf { p, k, .. } => Some(p.pow(*k)),
        }
    }

    pub fn spec(&self) -> FieldSpec {
        match self {
            Field::Q => FieldSpec {
                characteristic: 0,
                extension_degree: 1,
                modulus: None,
            },
            Field::Gf { p, k, modulus } => FieldSpec {
                characteristic: *p,
                extension_degree: *k,
                modulus: if *k == 1 { None } else { Some(modulus.clone()) },
            },
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Q => Scalar::Rat(BigRational::zero()),
            Field::Gf { .. } => Scalar::Gf(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Q => Scalar::Rat(BigRational::one()),
            Field::Gf { .. } => Scalar::Gf(1),
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Gf(v) => *v == 0,
        }
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        match self {
            Field::Q => Scalar::Rat(BigRational::from(BigInt::from(n))),
            Field::Gf { p, .. } => {
                let r = n.rem_euclid(*p as i64) as u64;
                Scalar::Gf(r)
            }
        }
    }

    fn unpack(&self, v: u64) -> [u64; 8] {
        let p = self.characteristic();
        let mut out = [0u64; 8];
        let mut v = v;
        for slot in out.iter_mut() {
            *slot = v % p;
            v /= p;
        }
        out
    }

    fn pack(&self, digits: &[u64]) -> u64 {
        let p = self.characteristic();
        let mut v = 0u64;
        for &d in digits.iter().rev() {
            v = v * p + d % p;
        }
        v
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Q, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (Field::Gf { p, .. }, Scalar::Gf(x), Scalar::Gf(y)) => {
                let xa = self.unpack(*x);
                let ya = self.unpack(*y);
                let mut out = [0u64; 8];
                for i in 0..8 {
                    out[i] = (xa[i] + ya[i]) % p;
                }
                Scalar::Gf(self.pack(&out))
            }
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Field::Q, Scalar::Rat(x)) => Scalar::Rat(-x),
            (Field::Gf { p, .. }, Scalar::Gf(x)) => {
                let xa = self.unpack(*x);
                let mut out = [0u64; 8];
                for i in 0..8 {
                    out[i] = (p - xa[i]) % p;
                }
                Scalar::Gf(self.pack(&out))
            }
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Q, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (Field::Gf { p, k, modulus }, Scalar::Gf(x), Scalar::Gf(y)) => {
                let xa = self.unpack(*x);
                let ya = self.unpack(*y);
                let kk = *k as usize;
                let mut prod = vec![0u64; 2 * kk];
                for i in 0..kk {
                    if xa[i] == 0 {
                        continue;
                    }
                    for j in 0..kk {
                        prod[i + j] = (prod[i + j] + xa[i] * ya[j]) % p;
                    }
                }
                poly_rem(&mut prod, modulus, *p);
                Scalar::Gf(self.pack(&prod))
            }
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return None;
        }
        match (self, a) {
            (Field::Q, Scalar::Rat(x)) => Scalar::Rat(x.recip()).into(),
            (Field::Gf { p, k, .. }, _) => {
                // a^(p^k - 2)
                let e = p.pow(*k) - 2;
                let mut result = self.one();
                let mut base = a.clone();
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        result = self.mul(&result, &base);
                    }
                    base = self.mul(&base, &base);
                    e >>= 1;
                }
                Some(result)
            }
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    pub fn pow(&self, a: &Scalar, e: i64) -> Scalar {
        if e < 0 {
            let inv = self.inv(a).expect("inverse of zero");
            return self.pow(&inv, -e);
        }
        let mut result = self.one();
        let mut base = a.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        result
    }

    /// All elements of a finite field in a fixed order (panics on Q).
    pub fn elements(&self) -> Vec<Scalar> {
        match self {
            Field::Q => panic!("rationals are not enumerable"),
            Field::Gf { p, k, .. } => {
                let n = p.pow(*k);
                (0..n)
                    .map(|i| {
                        // i counted base p equals the packed digit form
                        let mut digits = Vec::with_capacity(*k as usize);
                        let mut v = i;
                        for _ in 0..*k {
                            digits.push(v % p);
                            v /= p;
                        }
                        Scalar::Gf(self.pack(&digits))
                    })
                    .collect()
            }
        }
    }

    /// A generator element for sampling (the class of x for k > 1, else the
    /// smallest generator-ish value 1).
    pub fn adjoined(&self) -> Scalar {
        match self {
            Field::Q => self.one(),
            Field::Gf { p, k, .. } => {
                if *k == 1 {
                    self.one()
                } else {
                    Scalar::Gf(*p) // the element "a" = x
                }
            }
        }
    }

    /// Deterministic pseudo-random nonzero-or-any scalar for property tests.
    pub fn sample(&self, rng: &mut crate::util::SplitMix64, height: u32) -> Scalar {
        match self {
            Field::Q => {
                let num = rng.below(2 * height as u64 + 1) as i64 - height as i64;
                let den = rng.below(height as u64) as i64 + 1;
                Scalar::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
            }
            Field::Gf { p, k, .. } => {
                let n = p.pow(*k);
                let i = rng.below(n);
                let mut digits = Vec::with_capacity(*k as usize);
                let mut v = i;
                for _ in 0..*k {
                    digits.push(v % p);
                    v /= p;
                }
                Scalar::Gf(self.pack(&digits))
            }
        }
    }

    /// Canonical string form: "a/b" over Q, a residue polynomial in `a`
    /// over GF(p^k), e.g. "a^2+2*a+1", or a plain digit for k = 1.
    pub fn format(&self, s: &Scalar) -> String {
        match (self, s) {
            (Field::Q, Scalar::Rat(r)) => {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            (Field::Gf { k, .. }, Scalar::Gf(v)) => {
                let digits = self.unpack(*v);
                if *k == 1 {
                    return digits[0].to_string();
                }
                let mut parts = Vec::new();
                for i in (0..*k as usize).rev() {
                    let c = digits[i];
                    if c == 0 {
                        continue;
                    }
                    let term = match (i, c) {
                        (0, c) => c.to_string(),
                        (1, 1) => "a".to_string(),
                        (1, c) => format!("{c}*a"),
                        (i, 1) => format!("a^{i}"),
                        (i, c) => format!("{c}*a^{i}"),
                    };
                    parts.push(term);
                }
                if parts.is_empty() {
                    "0".to_string()
                } else {
                    parts.join("+")
                }
            }
            _ => panic!("scalar/field mismatch"),
        }
    }

    /// Parses the canonical string form produced by [`Field::format`].
    pub fn parse(&self, s: &str) -> Result<Scalar, String> {
        let s = s.trim();
        match self {
            Field::Q => {
                if let Some((n, d)) = s.split_once('/') {
                    let n: BigInt = n.trim().parse().map_err(|e| format!("{e}"))?;
                    let d: BigInt = d.trim().parse().map_err(|e| format!("{e}"))?;
                    if d.is_zero() {
                        return Err("zero denominator".into());
                    }
                    Ok(Scalar::Rat(BigRational::new(n, d)))
                } else {
                    let n: BigInt = s.parse().map_err(|e| format!("{e}"))?;
                    Ok(Scalar::Rat(BigRational::from(n)))
                }
            }
            Field::Gf { p, .. } => {
                let mut digits = [0u64; 8];
                for term in s.split('+') {
                    let term = term.trim();
                    if term.is_empty() {
                        return Err("empty term".into());
                    }
                    let (coef, pow) = if let Some(rest) = term.strip_prefix("a^") {
                        (1u64, rest.parse::<usize>().map_err(|e| format!("{e}"))?)
                    } else if term == "a" {
                        (1u64, 1usize)
                    } else if let Some((c, apow)) = term.split_once("*a^") {
                        (
                            c.trim().parse().map_err(|e| format!("{e}"))?,
                            apow.parse::<usize>().map_err(|e| format!("{e}"))?,
                        )
                    } else if let Some(c) = term.strip_suffix("*a") {
                        (c.trim().parse().map_err(|e| format!("{e}"))?, 1usize)
                    } else {
                        (term.parse().map_err(|e| format!("{e}"))?, 0usize)
                    };
                    if pow >= 8 {
                        return Err(format!("power {pow} too large"));
                    }
                    digits[pow] = (digits[pow] + coef) % p;
                }
                Ok(Scalar::Gf(self.pack(&digits)))
            }
        }
    }

    /// Binomial coefficient C(n, k) as a field element.
    pub fn binomial(&self, n: u64, k: u64) -> Scalar {
        if k > n {
            return self.zero();
        }
        match self {
            Field::Q => {
                let mut num = BigInt::one();
                let mut den = BigInt::one();
                for i in 0..k {
                    num *= BigInt::from(n - i);
                    den *= BigInt::from(i + 1);
                }
                Scalar::Rat(BigRational::new(num, den))
            }
            Field::Gf { p, .. } => {
                // Lucas' theorem digit by digit
                let mut n = n;
                let mut k = k;
                let mut acc = 1u64;
                while k > 0 || n > 0 {
                    let nd = n % p;
                    let kd = k % p;
                    if kd > nd {
                        return self.zero();
                    }
                    // small binomial mod p
                    let mut b = 1u64;
                    for i in 0..kd {
                        b = b * ((nd - i) % p) % p;
                        b = b * mod_inv_u64((i + 1) % p, *p) % p;
                    }
                    acc = acc * b % p;
                    n /= p;
                    k /= p;
                }
                Scalar::Gf(acc)
            }
        }
    }

    /// Hook for tests: numerator magnitude proxy for Q (0 for GF).
    pub fn is_rat(&self) -> bool {
        matches!(self, Field::Q)
    }
}

impl Scalar {
    pub fn as_rat(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(r) => Some(r),
            _ => None,
        }
    }
}

/// Convenience for tests: exact integer-valued rational check.
pub fn rat_int(s: &Scalar) -> Option<i64> {
    match s {
        Scalar::Rat(r) if r.denom().is_one() => {
            let n = r.numer();
            if n.abs() <= BigInt::from(i64::MAX) {
                Some(n.to_string().parse().unwrap())
            } else {
                None
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::SplitMix64;

    #[test]
    fn gf8_has_eight_elements() {
        let spec = FieldSpec {
            characteristic: 2,
            extension_degree: 3,
            modulus: Some(vec![1, 1, 0, 1]), // x^3 + x + 1
        };
        let f = Field::make(&spec).unwrap();
        assert_eq!(f.order(), Some(8));
        let elems = f.elements();
        assert_eq!(elems.len(), 8);
        // closure under multiplication and uniqueness
        for a in &elems {
            for b in &elems {
                let c = f.mul(a, b);
                assert!(elems.contains(&c));
            }
        }
    }

    #[test]
    fn q_characteristic_zero() {
        let f = Field::make(&FieldSpec {
            characteristic: 0,
            extension_degree: 1,
            modulus: None,
        })
        .unwrap();
        assert_eq!(f.characteristic(), 0);
        assert_eq!(f.order(), None);
    }

    #[test]
    fn composite_characteristic_rejected() {
        let err = Field::make(&FieldSpec {
            characteristic: 4,
            extension_degree: 1,
            modulus: None,
        })
        .unwrap_err();
        assert_eq!(err, FieldError::CompositeCharacteristic(4));
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x+1)^2 over GF(2)
        let err = Field::make(&FieldSpec {
            characteristic: 2,
            extension_degree: 2,
            modulus: Some(vec![1, 0, 1]),
        })
        .unwrap_err();
        assert!(matches!(err, FieldError::ReducibleModulus(_)));
    }

    #[test]
    fn canonical_moduli_match_standard_choices() {
        assert_eq!(canonical_modulus(2, 2), vec![1, 1, 1]);
        assert_eq!(canonical_modulus(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(canonical_modulus(2, 4), vec![1, 1, 0, 0, 1]);
        assert_eq!(canonical_modulus(3, 2), vec![1, 0, 1]);
    }

    fn check_axioms(f: &Field, seed: u64) {
        let mut rng = SplitMix64::new(seed);
        for _ in 0..200 {
            let a = f.sample(&mut rng, 10);
            let b = f.sample(&mut rng, 10);
            let c = f.sample(&mut rng, 10);
            // associativity and commutativity
            assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
            assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
            // distributivity
            assert_eq!(
                f.mul(&a, &f.add(&b, &c)),
                f.add(&f.mul(&a, &b), &f.mul(&a, &c))
            );
            // inverses
            if !f.is_zero(&a) {
                let ai = f.inv(&a).unwrap();
                assert_eq!(f.mul(&a, &ai), f.one());
            }
            assert!(f.is_zero(&f.add(&a, &f.neg(&a))));
        }
    }

    #[test]
    fn field_axioms_sampled() {
        check_axioms(&Field::Q, 1);
        check_axioms(&Field::gf(2, 3), 2);
        check_axioms(&Field::gf(3, 2), 3);
        check_axioms(&Field::gf(5, 1), 4);
        check_axioms(&Field::gf(7, 2), 5);
        check_axioms(&Field::gf(2, 8), 6);
    }

    #[test]
    fn format_parse_roundtrip() {
        let fields = [Field::Q, Field::gf(2, 3), Field::gf(3, 2), Field::gf(5, 1)];
        let mut rng = SplitMix64::new(9);
        for f in &fields {
            for _ in 0..50 {
                let a = f.sample(&mut rng, 12);
                let s = f.format(&a);
                let back = f.parse(&s).unwrap();
                assert_eq!(a, back, "roundtrip failed for {s}");
            }
        }
    }

    #[test]
    fn binomial_lucas() {
        let f3 = Field::gf(3, 1);
        assert_eq!(f3.binomial(2, 1), Scalar::Gf(2));
        assert_eq!(f3.binomial(3, 1), Scalar::Gf(0));
        assert_eq!(f3.binomial(4, 2), Scalar::Gf(0));
        let q = Field::Q;
        assert_eq!(q.binomial(5, 2), q.from_int(10));
    }
}
