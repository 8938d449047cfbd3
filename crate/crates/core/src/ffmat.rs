//! Finite fields GF(p^k), square matrices over them, and the classical
//! bilinear / hermitian forms used to cut out symplectic, unitary and
//! orthogonal groups.
//!
//! A field element is its coefficient vector modulo the field's defining
//! polynomial, packed into a `u32` as base-`p` digits (digit `j` is the
//! coefficient of `x^j`). Prime fields are the special case `k = 1`.

use std::fmt;
use std::sync::Arc;

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Packed field element, see the module docs.
pub type Elem = u32;

/// Largest field order accepted by [`Field::new`].
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

const MUL_TABLE_LIMIT: u32 = 256;

#[derive(Clone)]
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, low-to-high coefficients, length `k + 1`.
    modulus: Vec<u32>,
    mul_table: Option<Vec<Elem>>,
    primitive: Elem,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.k)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k
    }
}
impl Eq for Field {}

impl Field {
    /// GF(p^k) with the least monic irreducible modulus of degree `k`, where
    /// polynomials are compared by the integer value of their packed lower
    /// coefficients. Prime fields use the modulus `x`.
    pub fn new(p: u32, k: u32) -> Result<Arc<Field>> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if k == 0 {
            return Err(Error::BadSpec("field extension degree must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
        if q > MAX_FIELD_ORDER {
            return Err(Error::SizeCapExceeded {
                what: "field order",
                value: q as u128,
                cap: MAX_FIELD_ORDER as u128,
            });
        }
        let q = q as u32;
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            least_irreducible(p, k)
        };
        let mut field = Field {
            p,
            k,
            q,
            modulus,
            mul_table: None,
            primitive: 1,
        };
        if q <= MUL_TABLE_LIMIT {
            let mut table = vec![0; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = field.mul_slow(a, b);
                }
            }
            field.mul_table = Some(table);
        }
        field.primitive = (1..q)
            .find(|&a| field.mult_order(a) == (q - 1) as u64)
            .unwrap_or(1);
        Ok(Arc::new(field))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Least element generating the multiplicative group.
    pub fn primitive(&self) -> Elem {
        self.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.q
    }

    /// Embeds an integer through the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as Elem
    }

    fn digits(&self, a: Elem) -> Vec<u32> {
        let mut d = vec![0; self.k as usize];
        let mut a = a;
        for slot in d.iter_mut() {
            *slot = a % self.p;
            a /= self.p;
        }
        d
    }

    fn pack(&self, d: &[u32]) -> Elem {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if self.k == 1 {
            return (self.p - a) % self.p;
        }
        let d: Vec<u32> = self.digits(a).iter().map(|&c| (self.p - c) % self.p).collect();
        self.pack(&d)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.mul_table {
            Some(t) => t[(a * self.q + b) as usize],
            None => self.mul_slow(a, b),
        }
    }

    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p as u64;
        if self.k == 1 {
            return ((a as u64 * b as u64) % p) as Elem;
        }
        let k = self.k as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * k - 1];
        for i in 0..k {
            for j in 0..k {
                prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        // reduce by the monic modulus, highest degree first
        for deg in (k..2 * k - 1).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for j in 0..k {
                let sub = c * self.modulus[j] as u64 % p;
                prod[deg - k + j] = (prod[deg - k + j] + p - sub) % p;
            }
        }
        let d: Vec<u32> = prod[..k].iter().map(|&c| c as u32).collect();
        self.pack(&d)
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::Singular);
        }
        Ok(self.pow(a, (self.q - 2) as u64))
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: Elem) -> u64 {
        if a == 0 {
            return 0;
        }
        let mut x = a;
        let mut n = 1;
        while x != 1 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// `a ↦ a^(p^e)`.
    pub fn frobenius(&self, a: Elem, e: u32) -> Elem {
        self.pow(a, (self.p as u64).pow(e % self.k))
    }

    /// The involutory automorphism `a ↦ a^√q` of a field of square order.
    pub fn conj(&self, a: Elem) -> Elem {
        self.frobenius(a, self.k / 2)
    }
}

fn poly_has_factor_of_degree(p: u32, poly: &[u32], d: u32) -> bool {
    // trial division by every monic polynomial of degree d
    let count = (p as u64).pow(d);
    for code in 0..count {
        let mut div = Vec::with_capacity(d as usize + 1);
        let mut c = code;
        for _ in 0..d {
            div.push((c % p as u64) as u32);
            c /= p as u64;
        }
        div.push(1);
        if poly_rem(p, poly, &div).iter().all(|&c| c == 0) {
            return true;
        }
    }
    false
}

fn poly_rem(p: u32, num: &[u32], div: &[u32]) -> Vec<u32> {
    let mut r: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let p = p as u64;
    let dd = div.len() - 1;
    for deg in (dd..r.len()).rev() {
        let c = r[deg] % p;
        if c == 0 {
            continue;
        }
        for j in 0..=dd {
            let sub = c * div[j] as u64 % p;
            r[deg - dd + j] = (r[deg - dd + j] + p - sub) % p;
        }
    }
    r.truncate(dd);
    r.into_iter().map(|c| c as u32).collect()
}

fn least_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    for code in 0..count {
        let mut poly = Vec::with_capacity(k as usize + 1);
        let mut c = code;
        for _ in 0..k {
            poly.push((c % p as u64) as u32);
            c /= p as u64;
        }
        poly.push(1);
        if poly[0] == 0 {
            continue;
        }
        if !(1..=k / 2).any(|d| poly_has_factor_of_degree(p, &poly, d)) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Square matrix over a finite field, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Arc<Field>,
    n: usize,
    entries: Vec<Elem>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.field)?;
        for r in 0..self.n {
            write!(f, "{}{:?}", if r == 0 { " " } else { "," }, self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zero(field: &Arc<Field>, n: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn identity(field: &Arc<Field>, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: &Arc<Field>, rows: &[Vec<Elem>]) -> Result<Matrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadSpec("matrix rows must form a square".into()));
        }
        if rows.iter().flatten().any(|&e| e >= field.order()) {
            return Err(Error::BadSpec("matrix entry outside the field".into()));
        }
        Ok(Matrix {
            field: field.clone(),
            n,
            entries: rows.concat(),
        })
    }

    pub fn diag(field: &Arc<Field>, d: &[Elem]) -> Matrix {
        let mut m = Matrix::zero(field, d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.entries[r * self.n + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.entries[r * self.n..(r + 1) * self.n]
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|r| (0..self.n).all(|c| self.get(r, c) == u32::from(r == c)))
    }

    fn check_compatible(&self, other: &Matrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DegreeMismatch(self.n, other.n));
        }
        if self.field != other.field {
            return Err(Error::BadSpec("matrices over different fields".into()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_compatible(other)?;
        let f = &self.field;
        let mut out = Matrix::zero(f, self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                let mut acc = 0;
                for k in 0..self.n {
                    acc = f.add(acc, f.mul(self.get(r, k), other.get(k, c)));
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_compatible(other)?;
        let f = &self.field;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Matrix {
            field: f.clone(),
            n: self.n,
            entries,
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_compatible(other)?;
        let f = &self.field;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(Matrix {
            field: f.clone(),
            n: self.n,
            entries,
        })
    }

    pub fn scale(&self, s: Elem) -> Matrix {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            n: self.n,
            entries: self.entries.iter().map(|&a| f.mul(a, s)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(&self.field, self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Applies `a ↦ a^(p^e)` to every entry.
    pub fn frobenius(&self, e: u32) -> Matrix {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            n: self.n,
            entries: self.entries.iter().map(|&a| f.frobenius(a, e)).collect(),
        }
    }

    /// Column vector image `M v`.
    pub fn apply(&self, v: &[Elem]) -> Vec<Elem> {
        let f = &self.field;
        (0..self.n)
            .map(|r| {
                (0..self.n).fold(0, |acc, c| f.add(acc, f.mul(self.get(r, c), v[c])))
            })
            .collect()
    }

    /// Reduces a copy to row echelon form; returns (rank, determinant).
    fn eliminate(&self) -> (usize, Elem) {
        let f = &self.field;
        let n = self.n;
        let mut m = self.entries.clone();
        let mut det = 1;
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| m[r * n + col] != 0) else {
                det = 0;
                continue;
            };
            if piv != rank {
                for c in 0..n {
                    m.swap(piv * n + c, rank * n + c);
                }
                det = f.neg(det);
            }
            let pv = m[rank * n + col];
            det = f.mul(det, pv);
            let pinv = f.inv(pv).expect("pivot nonzero");
            for r in rank + 1..n {
                let factor = f.mul(m[r * n + col], pinv);
                if factor == 0 {
                    continue;
                }
                for c in col..n {
                    let v = f.sub(m[r * n + c], f.mul(factor, m[rank * n + c]));
                    m[r * n + c] = v;
                }
            }
            rank += 1;
        }
        (rank, det)
    }

    pub fn det(&self) -> Elem {
        self.eliminate().1
    }

    pub fn rank(&self) -> usize {
        self.eliminate().0
    }

    /// Gauss–Jordan inverse.
    pub fn inv(&self) -> Result<Matrix> {
        let f = &self.field;
        let n = self.n;
        let mut a = self.entries.clone();
        let mut b = Matrix::identity(f, n).entries;
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r * n + col] != 0).ok_or(Error::Singular)?;
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
                b.swap(piv * n + c, col * n + c);
            }
            let pinv = f.inv(a[col * n + col])?;
            for c in 0..n {
                a[col * n + c] = f.mul(a[col * n + c], pinv);
                b[col * n + c] = f.mul(b[col * n + c], pinv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col];
                if factor == 0 {
                    continue;
                }
                for c in 0..n {
                    a[r * n + c] = f.sub(a[r * n + c], f.mul(factor, a[col * n + c]));
                    b[r * n + c] = f.sub(b[r * n + c], f.mul(factor, b[col * n + c]));
                }
            }
        }
        Ok(Matrix {
            field: f.clone(),
            n,
            entries: b,
        })
    }

    /// Multiplicative order in GL(n, q).
    pub fn order(&self) -> Result<u64> {
        if self.det() == 0 {
            return Err(Error::Singular);
        }
        let mut x = self.clone();
        let mut k = 1;
        while !x.is_identity() {
            x = x.mul(self)?;
            k += 1;
        }
        Ok(k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    Symplectic,
    Hermitian,
    Symmetric,
    None,
}

#[derive(Clone, Debug)]
pub struct FormSpec {
    pub kind: FormKind,
    pub gram: Matrix,
    /// Order of the field automorphism applied to the second argument.
    pub twist: u32,
}

impl FormSpec {
    /// Alternating form with Gram matrix antidiag(1,…,1,−1,…,−1).
    pub fn symplectic(field: &Arc<Field>, n: usize) -> Result<FormSpec> {
        if n % 2 != 0 || n == 0 {
            return Err(Error::BadSpec(format!("symplectic form needs even dimension, got {n}")));
        }
        let mut g = Matrix::zero(field, n);
        for i in 0..n {
            let v = if i < n / 2 { 1 } else { field.neg(1) };
            g.set(i, n - 1 - i, v);
        }
        Ok(FormSpec {
            kind: FormKind::Symplectic,
            gram: g,
            twist: 1,
        })
    }

    /// Hermitian form with identity Gram matrix over GF(q²).
    pub fn hermitian(field: &Arc<Field>, n: usize) -> Result<FormSpec> {
        if field.k() % 2 != 0 {
            return Err(Error::BadSpec("hermitian form needs a field of square order".into()));
        }
        Ok(FormSpec {
            kind: FormKind::Hermitian,
            gram: Matrix::identity(field, n),
            twist: 2,
        })
    }

    /// Symmetric form with identity Gram matrix.
    pub fn symmetric(field: &Arc<Field>, n: usize) -> FormSpec {
        FormSpec {
            kind: FormKind::Symmetric,
            gram: Matrix::identity(field, n),
            twist: 1,
        }
    }

    fn twisted(&self, m: &Matrix) -> Matrix {
        if self.twist == 2 {
            m.frobenius(m.field().k() / 2)
        } else {
            m.clone()
        }
    }

    /// `(u, v) = uᵀ · gram · v^σ`.
    pub fn eval(&self, u: &[Elem], v: &[Elem]) -> Elem {
        let f = self.gram.field();
        let vs: Vec<Elem> = if self.twist == 2 {
            v.iter().map(|&x| f.conj(x)).collect()
        } else {
            v.to_vec()
        };
        let gv = self.gram.apply(&vs);
        u.iter().zip(&gv).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    /// Checks the invariants of the form kind against the Gram matrix.
    pub fn validate(&self) -> Result<()> {
        let g = &self.gram;
        let f = g.field();
        let n = g.dim();
        let ok = match self.kind {
            FormKind::Symplectic => {
                g.det() != 0
                    && (0..n).all(|i| g.get(i, i) == 0)
                    && (0..n).all(|i| (0..n).all(|j| g.get(i, j) == f.neg(g.get(j, i))))
            }
            FormKind::Hermitian => {
                g.det() != 0
                    && self.twist == 2
                    && (0..n).all(|i| (0..n).all(|j| g.get(i, j) == f.conj(g.get(j, i))))
            }
            FormKind::Symmetric => {
                g.det() != 0 && (0..n).all(|i| (0..n).all(|j| g.get(i, j) == g.get(j, i)))
            }
            FormKind::None => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BadSpec(format!("gram matrix is not a valid {:?} form", self.kind)))
        }
    }
}

/// True iff `aᵀ · gram · a^σ = gram`.
pub fn preserves_form(a: &Matrix, form: &FormSpec) -> bool {
    if form.kind == FormKind::None {
        return true;
    }
    let lhs = a
        .transpose()
        .mul(&form.gram)
        .and_then(|m| m.mul(&form.twisted(a)));
    matches!(lhs, Ok(m) if m == form.gram)
}

/// True iff `(a v, v) = 0` for every vector `v`.
///
/// `v ↦ (a v, v)` is a quadratic form, so it vanishes everywhere once it
/// vanishes on the basis vectors and on their pairwise sums.
pub fn form_value_vanishes(a: &Matrix, form: &FormSpec) -> Result<bool> {
    if !preserves_form(a, form) {
        return Err(Error::FormViolation);
    }
    let n = a.dim();
    let f = a.field();
    let basis = |i: usize| {
        let mut v = vec![0; n];
        v[i] = 1;
        v
    };
    let q = |v: &[Elem]| form.eval(&a.apply(v), v);
    for i in 0..n {
        if q(&basis(i)) != 0 {
            return Ok(false);
        }
        for j in i + 1..n {
            let mut v = basis(i);
            v[j] = f.add(v[j], 1);
            if q(&v) != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Transvection `v ↦ v + λ (v, w) w` for an alternating or hermitian form.
pub fn form_transvection(form: &FormSpec, w: &[Elem], lambda: Elem) -> Matrix {
    let g = &form.gram;
    let f = g.field();
    let n = g.dim();
    let mut m = Matrix::identity(f, n);
    // (v, w) = Σ_i v_i · (gram · w^σ)_i
    let ws: Vec<Elem> = if form.twist == 2 {
        w.iter().map(|&x| f.conj(x)).collect()
    } else {
        w.to_vec()
    };
    let gw = g.apply(&ws);
    for r in 0..n {
        for c in 0..n {
            let add = f.mul(lambda, f.mul(w[r], gw[c]));
            m.set(r, c, f.add(m.get(r, c), add));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_vectors(f: &Field, n: usize) -> Vec<Vec<Elem>> {
        let q = f.order() as usize;
        (0..q.pow(n as u32))
            .map(|mut code| {
                (0..n)
                    .map(|_| {
                        let d = (code % q) as Elem;
                        code /= q;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn field_construction() {
        let f5 = Field::new(5, 1).unwrap();
        assert_eq!(f5.modulus(), &[0, 1]);
        assert_eq!(f5.order(), 5);
        let f4 = Field::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        assert!(matches!(Field::new(6, 1), Err(Error::NotPrime(6))));
        assert!(matches!(Field::new(2, 21), Err(Error::SizeCapExceeded { .. })));
    }

    #[test]
    fn gf9_modulus_is_least_irreducible() {
        // oracle: a monic quadratic over GF(3) is irreducible iff it has no root
        let mut least = None;
        'outer: for code in 0..9u32 {
            let (c0, c1) = (code % 3, code / 3);
            for x in 0..3 {
                if (x * x + c1 * x + c0) % 3 == 0 {
                    continue 'outer;
                }
            }
            least = Some(vec![c0, c1, 1]);
            break;
        }
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(Some(f9.modulus().to_vec()), least);
        assert_eq!(f9.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn multiplicative_groups_are_cyclic() {
        for (p, k) in [(2, 1), (2, 2), (2, 3), (2, 5), (3, 2), (5, 1), (7, 1), (3, 3), (2, 9)] {
            let f = Field::new(p, k).unwrap();
            assert_eq!(f.mult_order(f.primitive()), (f.order() - 1) as u64, "{f:?}");
            for a in 1..f.order() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn matrix_basics() {
        let f5 = Field::new(5, 1).unwrap();
        let d = Matrix::diag(&f5, &[2, 3]);
        assert_eq!(d.inv().unwrap(), Matrix::diag(&f5, &[3, 2]));
        let a = Matrix::from_rows(&f5, &[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(Matrix::identity(&f5, 2).mul(&a).unwrap(), a);
        let sing = Matrix::from_rows(&f5, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert!(matches!(sing.inv(), Err(Error::Singular)));
    }

    #[test]
    fn random_inverse_over_gf3() {
        let f3 = Field::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut done = 0;
        while done < 20 {
            let rows: Vec<Vec<Elem>> =
                (0..4).map(|_| (0..4).map(|_| rng.gen_range(0..3)).collect()).collect();
            let a = Matrix::from_rows(&f3, &rows).unwrap();
            if a.det() == 0 {
                assert!(a.inv().is_err());
                continue;
            }
            let ai = a.inv().unwrap();
            assert!(a.mul(&ai).unwrap().is_identity());
            assert!(ai.mul(&a).unwrap().is_identity());
            done += 1;
        }
    }

    #[test]
    fn form_preservation_examples() {
        let f5 = Field::new(5, 1).unwrap();
        let sp = FormSpec::symplectic(&f5, 2).unwrap();
        sp.validate().unwrap();
        assert!(preserves_form(&Matrix::identity(&f5, 2), &sp));
        assert!(preserves_form(&Matrix::diag(&f5, &[2, 3]), &sp));
        assert!(!preserves_form(&Matrix::diag(&f5, &[2, 2]), &sp));

        let f3 = Field::new(3, 1).unwrap();
        let sym = FormSpec::symmetric(&f3, 2);
        let t = Matrix::from_rows(&f3, &[vec![1, 1], vec![0, 1]]).unwrap();
        assert!(!preserves_form(&t, &sym));
    }

    #[test]
    fn preservation_closed_under_products() {
        let f3 = Field::new(3, 1).unwrap();
        let sp = FormSpec::symplectic(&f3, 4).unwrap();
        let vecs = all_vectors(&f3, 4);
        let ts: Vec<Matrix> = vecs[1..12]
            .iter()
            .map(|w| form_transvection(&sp, w, 1))
            .collect();
        for a in &ts {
            assert!(preserves_form(a, &sp));
            assert!(preserves_form(&a.inv().unwrap(), &sp));
            for b in &ts {
                assert!(preserves_form(&a.mul(b).unwrap(), &sp));
            }
        }
    }

    #[test]
    fn vanishing_form_values_in_sp4_2() {
        let f2 = Field::new(2, 1).unwrap();
        let sp = FormSpec::symplectic(&f2, 4).unwrap();
        let id = Matrix::identity(&f2, 4);
        assert!(form_value_vanishes(&id, &sp).unwrap());

        let vecs = all_vectors(&f2, 4);
        let exhaustive = |a: &Matrix| vecs.iter().all(|v| sp.eval(&a.apply(v), v) == 0);

        let w = vec![1, 0, 0, 0];
        let t = form_transvection(&sp, &w, 1);
        assert!(!form_value_vanishes(&t, &sp).unwrap());
        assert!(!exhaustive(&t));

        // w ⟂ w': two commuting transvections give a c2 involution, the
        // three-fold product t_w t_w' t_{w+w'} the a2 involution
        let w2 = vec![0, 1, 0, 0];
        let ws = vec![1, 1, 0, 0];
        assert_eq!(sp.eval(&w, &w2), 0);
        let c2 = t.mul(&form_transvection(&sp, &w2, 1)).unwrap();
        assert!(!form_value_vanishes(&c2, &sp).unwrap());
        let a2 = c2.mul(&form_transvection(&sp, &ws, 1)).unwrap();
        assert_eq!(a2.order().unwrap(), 2);
        assert!(form_value_vanishes(&a2, &sp).unwrap());
        assert!(exhaustive(&a2));

        let not_sp = Matrix::diag(&Field::new(3, 1).unwrap(), &[1, 2, 1, 1]);
        let sp3 = FormSpec::symplectic(not_sp.field(), 4).unwrap();
        assert!(matches!(form_value_vanishes(&not_sp, &sp3), Err(Error::FormViolation)));
    }

    #[test]
    fn vanishing_not_closed_under_products() {
        let f2 = Field::new(2, 1).unwrap();
        let sp = FormSpec::symplectic(&f2, 4).unwrap();
        let vecs = all_vectors(&f2, 4);
        // every element of the group generated by a few transvections
        let gens: Vec<Matrix> = vecs[1..]
            .iter()
            .map(|w| form_transvection(&sp, w, 1))
            .collect();
        let mut elems = vec![Matrix::identity(&f2, 4)];
        let mut i = 0;
        while i < elems.len() {
            for g in &gens {
                let h = elems[i].mul(g).unwrap();
                if !elems.contains(&h) {
                    elems.push(h);
                }
            }
            i += 1;
        }
        assert_eq!(elems.len(), 720);
        let vanishing: Vec<&Matrix> = elems
            .iter()
            .filter(|a| form_value_vanishes(a, &sp).unwrap())
            .collect();
        let mut some_product_fails = false;
        let mut commuting_product_fails = false;
        for a in &vanishing {
            for b in &vanishing {
                let ab = a.mul(b).unwrap();
                if !form_value_vanishes(&ab, &sp).unwrap() {
                    some_product_fails = true;
                    if ab == b.mul(a).unwrap() {
                        commuting_product_fails = true;
                    }
                }
            }
        }
        assert!(some_product_fails);
        // even commuting pairs need not give a vanishing product
        assert!(commuting_product_fails);
    }

    #[test]
    fn hermitian_form_over_gf9() {
        let f9 = Field::new(3, 2).unwrap();
        let h = FormSpec::hermitian(&f9, 3).unwrap();
        h.validate().unwrap();
        // a diagonal matrix with entries of norm 1 is unitary
        let unit: Vec<Elem> = f9
            .elements()
            .filter(|&a| a != 0 && f9.mul(a, f9.conj(a)) == 1)
            .collect();
        assert_eq!(unit.len(), 4);
        let d = Matrix::diag(&f9, &[unit[1], unit[2], 1]);
        assert!(preserves_form(&d, &h));
        let bad = Matrix::diag(&f9, &[f9.primitive(), 1, 1]);
        assert!(!preserves_form(&bad, &h));
    }
}
