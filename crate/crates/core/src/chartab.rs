//! Irreducible character tables by the Dixon–Schneider method.
//!
//! Working modulo the least prime `ℓ ≡ 1 (mod e)` above `2√|G|`, the class
//! matrices `(M_j)_{ik} = a_{jik}` act on `F_ℓ^k` and their common
//! eigenvectors are the central characters `ω_χ(C_i) = |C_i| χ(g_i) / χ(1)`.
//! The space is split by one class matrix at a time until every piece is a
//! line. Degrees follow from the first orthogonality relation and each
//! value is lifted to characteristic zero as the multiplicities of the
//! eigenvalues of `g_i` in the representation, read off the power maps.

use std::cmp::Reverse;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::algebra::structure_constants_row;
use crate::arith::{inv_mod, isqrt, mul_mod, p_part, pow_mod, prime_one_mod, primitive_root};
use crate::classes::{ClassTable, FusionMap};
use crate::cyclo::{Cyclo, Evaluator, Num};
use crate::error::{cap_check, Error, Result};

/// Largest number of classes accepted.
pub const MAX_CLASSES: usize = 200;

/// A class function given by one value per class.
pub type ClassFunction = Vec<Cyclo>;

#[derive(Debug)]
pub struct CharTable {
    classes: Arc<ClassTable>,
    values: Vec<Vec<Cyclo>>,
    degrees: Vec<u64>,
    dixon_prime: u64,
    eval: Evaluator,
}

/// Serialized table: eigenvalue multiplicities per row and class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharTableData {
    pub exponent: u64,
    pub dixon_prime: u64,
    pub verification_primes: [u64; 2],
    pub degrees: Vec<u64>,
    pub mults: Vec<Vec<Vec<i64>>>,
}

// ---- linear algebra over F_ℓ -------------------------------------------

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b) % p
}

/// Row-reduces in place; returns the pivot columns.
fn rref(m: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = inv_mod(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for col in 0..cols {
                    let t = mul_mod(f, m[r][col], p);
                    m[i][col] = sub_mod(m[i][col], t, p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

/// Basis of `{x : m x = 0}`.
fn nullspace(mut m: Vec<Vec<u64>>, n: usize, p: u64) -> Vec<Vec<u64>> {
    let pivots = rref(&mut m, p);
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u64; n];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = (p - m[r][free]) % p;
        }
        basis.push(v);
    }
    basis
}

/// Characteristic polynomial (coefficients from the constant term up) via
/// reduction to upper Hessenberg form.
fn charpoly(mut h: Vec<Vec<u64>>, p: u64) -> Vec<u64> {
    let n = h.len();
    for c in 0..n.saturating_sub(2) {
        let Some(r) = (c + 1..n).find(|&r| h[r][c] != 0) else {
            continue;
        };
        if r != c + 1 {
            h.swap(r, c + 1);
            for row in h.iter_mut() {
                row.swap(r, c + 1);
            }
        }
        let inv = inv_mod(h[c + 1][c], p);
        for i in c + 2..n {
            let f = mul_mod(h[i][c], inv, p);
            if f == 0 {
                continue;
            }
            for col in 0..n {
                let t = mul_mod(f, h[c + 1][col], p);
                h[i][col] = sub_mod(h[i][col], t, p);
            }
            for row in h.iter_mut() {
                let t = mul_mod(f, row[i], p);
                row[c + 1] = (row[c + 1] + t) % p;
            }
        }
    }
    // polys[m] = characteristic polynomial of the leading m×m block
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 1..=n {
        let hm = h[m - 1][m - 1];
        let prev = &polys[m - 1];
        let mut next = vec![0u64; m + 1];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] = (next[d + 1] + c) % p;
            next[d] = sub_mod(next[d], mul_mod(hm, c, p), p);
        }
        let mut prod = 1u64;
        for i in (1..m).rev() {
            prod = mul_mod(prod, h[i][i - 1], p);
            let coef = mul_mod(h[i - 1][m - 1], prod, p);
            if coef == 0 {
                continue;
            }
            for (d, &c) in polys[i - 1].iter().enumerate() {
                next[d] = sub_mod(next[d], mul_mod(coef, c, p), p);
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

fn poly_eval(poly: &[u64], x: u64, p: u64) -> u64 {
    poly.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

/// A subspace of `F_ℓ^k` held as a reduced row echelon basis.
struct Space {
    basis: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Space {
    fn new(mut basis: Vec<Vec<u64>>, p: u64) -> Space {
        let pivots = rref(&mut basis, p);
        Space { basis, pivots }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Splits into eigenspaces of `m` (which must leave the space invariant).
    fn split(&self, m: &[Vec<u64>], p: u64) -> Result<Vec<Space>> {
        let d = self.dim();
        let k = m.len();
        let images: Vec<Vec<u64>> = self
            .basis
            .iter()
            .map(|b| {
                (0..k)
                    .map(|i| m[i].iter().zip(b).fold(0, |acc, (&x, &y)| (acc + mul_mod(x, y, p)) % p))
                    .collect()
            })
            .collect();
        // restricted matrix: a[r][s] = coordinate r of m·b_s
        let a: Vec<Vec<u64>> = (0..d)
            .map(|r| (0..d).map(|s| images[s][self.pivots[r]]).collect())
            .collect();
        for (s, img) in images.iter().enumerate() {
            for i in 0..k {
                let v = (0..d).fold(0, |acc, r| (acc + mul_mod(a[r][s], self.basis[r][i], p)) % p);
                if v != img[i] {
                    return Err(Error::Internal("class matrix does not preserve the space".into()));
                }
            }
        }
        let poly = charpoly(a.clone(), p);
        let mut pieces = Vec::new();
        let mut total = 0;
        for lambda in 0..p {
            if poly_eval(&poly, lambda, p) != 0 {
                continue;
            }
            let mut shifted = a.clone();
            for (r, row) in shifted.iter_mut().enumerate() {
                row[r] = sub_mod(row[r], lambda, p);
            }
            let coords = nullspace(shifted, d, p);
            let vecs: Vec<Vec<u64>> = coords
                .iter()
                .map(|c| {
                    (0..k)
                        .map(|i| (0..d).fold(0, |acc, s| (acc + mul_mod(c[s], self.basis[s][i], p)) % p))
                        .collect()
                })
                .collect();
            total += vecs.len();
            pieces.push(Space::new(vecs, p));
            if total == d {
                break;
            }
        }
        if total != d {
            return Err(Error::Internal("class matrix is not diagonalizable mod the Dixon prime".into()));
        }
        Ok(pieces)
    }
}

// ---- the table ---------------------------------------------------------------

impl CharTable {
    pub fn new(classes: Arc<ClassTable>) -> Result<CharTable> {
        let k = classes.len();
        cap_check("number of classes", k as u128, MAX_CLASSES as u128)?;
        let order = classes.group().order();
        let e = classes.exponent();
        let ell = prime_one_mod(e, isqrt(4 * order) as u64);
        let z = pow_mod(primitive_root(ell), (ell - 1) / e, ell);

        let identity: Vec<Vec<u64>> = (0..k)
            .map(|i| (0..k).map(|c| u64::from(i == c)).collect())
            .collect();
        let mut spaces = vec![Space::new(identity, ell)];
        // cheap matrices first: those of small classes
        let mut order_of_use: Vec<usize> = (1..k).collect();
        order_of_use.sort_by_key(|&j| (classes.size(j), j));
        for j in order_of_use {
            if spaces.iter().all(|s| s.dim() == 1) {
                break;
            }
            let m: Vec<Vec<u64>> = (0..k)
                .map(|i| {
                    structure_constants_row(&classes, j, i)
                        .map(|row| row.into_iter().map(|a| (a % ell as u128) as u64).collect())
                })
                .collect::<Result<_>>()?;
            let mut next = Vec::new();
            for s in spaces {
                if s.dim() == 1 {
                    next.push(s);
                } else {
                    next.extend(s.split(&m, ell)?);
                }
            }
            spaces = next;
        }
        if spaces.len() != k || spaces.iter().any(|s| s.dim() != 1) {
            return Err(Error::Internal("class matrices did not separate the characters".into()));
        }

        let mut rows: Vec<(u64, Vec<Cyclo>)> = Vec::with_capacity(k);
        for s in &spaces {
            let w = &s.basis[0];
            if w[0] != 1 {
                return Err(Error::Internal("central character vanishes at the identity".into()));
            }
            rows.push(lift_row(&classes, w, ell, z)?);
        }
        rows.sort_by(|a, b| {
            (a.0, Reverse(flatten(&a.1))).cmp(&(b.0, Reverse(flatten(&b.1))))
        });
        let table = CharTable {
            eval: Evaluator::new(e)?,
            classes,
            degrees: rows.iter().map(|r| r.0).collect(),
            values: rows.into_iter().map(|r| r.1).collect(),
            dixon_prime: ell,
        };
        table.validate()?;
        Ok(table)
    }

    /// Checks degree arithmetic and both orthogonality relations exactly.
    pub fn validate(&self) -> Result<()> {
        let t = &self.classes;
        let k = t.len();
        let order = t.group().order();
        let bad = |m: String| Err(Error::Internal(format!("character table: {m}")));
        if self.values.len() != k || self.values.iter().any(|r| r.len() != k) {
            return bad("table is not square".into());
        }
        if self.degrees.iter().map(|&d| d as u128 * d as u128).sum::<u128>() != order {
            return bad("sum of squared degrees differs from the group order".into());
        }
        for (r, &d) in self.degrees.iter().enumerate() {
            if order % d as u128 != 0 {
                return bad(format!("degree {d} does not divide the group order"));
            }
            if self.values[r][0] != Cyclo::integer(d as i64) && self.values[r][0].as_plain_integer() != Some(d as i64) {
                return bad("value at the identity is not the degree".into());
            }
        }
        for i in 0..k {
            if self.values[0][i].coeff_sum() != 1 || self.values[0][i].as_plain_integer() != Some(1) {
                return bad("first row is not the trivial character".into());
            }
        }
        let ev = &self.eval;
        let nums: Vec<Vec<Num>> = self
            .values
            .iter()
            .map(|row| row.iter().map(|v| ev.num(v)).collect())
            .collect();
        for a in 0..k {
            for b in a..k {
                let mut acc = ev.zero();
                for c in 0..k {
                    let term = ev.mul(nums[a][c], nums[b][t.inverse(c)]);
                    acc = ev.add(acc, ev.mul(ev.int(t.size(c) as i128), term));
                }
                let want = if a == b { order as i128 } else { 0 };
                if ev.to_integer(acc)? != want {
                    return bad(format!("rows {a} and {b} are not orthogonal"));
                }
            }
        }
        for i in 0..k {
            for j in i..k {
                let mut acc = ev.zero();
                for r in 0..k {
                    acc = ev.add(acc, ev.mul(nums[r][i], nums[r][t.inverse(j)]));
                }
                let want = if i == j { t.centralizer_order(i) as i128 } else { 0 };
                if ev.to_integer(acc)? != want {
                    return bad(format!("columns {i} and {j} are not orthogonal"));
                }
            }
        }
        Ok(())
    }

    pub fn classes(&self) -> &Arc<ClassTable> {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn degree(&self, r: usize) -> u64 {
        self.degrees[r]
    }

    pub fn value(&self, r: usize, i: usize) -> &Cyclo {
        &self.values[r][i]
    }

    pub fn row(&self, r: usize) -> &[Cyclo] {
        &self.values[r]
    }

    pub fn exponent(&self) -> u64 {
        self.eval.exponent()
    }

    pub fn dixon_prime(&self) -> u64 {
        self.dixon_prime
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.eval
    }

    /// `(1/|G|) Σ_k |C_k| φ(g_k) ψ(g_k⁻¹)`.
    pub fn inner_product(&self, phi: &[Cyclo], psi: &[Cyclo]) -> Result<Ratio<i128>> {
        inner_product_on(&self.classes, &self.eval, phi, psi)
    }

    /// `[χ|_H, χ|_H]_H = 1`, where `fusion` maps the classes of `h` into ours.
    pub fn restriction_is_irreducible(&self, h: &ClassTable, fusion: &FusionMap, r: usize) -> Result<bool> {
        let res: ClassFunction = (0..h.len())
            .map(|i| self.values[r][fusion.image(i)].clone())
            .collect();
        Ok(inner_product_on(h, &self.eval, &res, &res)? == Ratio::from_integer(1))
    }

    /// The unique row of degree `|G|_p` vanishing on every class of
    /// elements of order divisible by `p`.
    pub fn steinberg_character(&self, p: u64) -> Result<usize> {
        let t = &self.classes;
        let deg = p_part(t.group().order(), p as u128) as u64;
        let cands: Vec<usize> = (0..self.len())
            .filter(|&r| {
                self.degrees[r] == deg
                    && (0..t.len()).all(|i| {
                        t.element_order(i) % p != 0
                            || self.eval.cyclo_equal(&self.values[r][i], &Cyclo::integer(0)).unwrap_or(false)
                    })
            })
            .collect();
        match cands.as_slice() {
            [r] => Ok(*r),
            [] => Err(Error::SteinbergNotIdentified(format!("no row of degree {deg} vanishes on {p}-singular classes"))),
            _ => Err(Error::SteinbergNotIdentified(format!("{} candidate rows", cands.len()))),
        }
    }

    /// `a_ijk` from the character formula
    /// `(|C_i||C_j|/|G|) Σ_χ χ(g_i) χ(g_j) χ(g_k⁻¹) / χ(1)`; a non-integral or
    /// negative result is an error.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Result<u128> {
        let t = &self.classes;
        let ev = &self.eval;
        let mut acc = ev.zero();
        for r in 0..self.len() {
            let prod = ev.mul(
                ev.mul(ev.num(&self.values[r][i]), ev.num(&self.values[r][j])),
                ev.num(&self.values[r][t.inverse(k)]),
            );
            acc = ev.add(acc, ev.div_int(prod, self.degrees[r] as i128));
        }
        let scaled = ev.mul(acc, ev.int(t.size(i) as i128 * t.size(j) as i128));
        let a = ev.to_integer(ev.div_int(scaled, t.group().order() as i128))?;
        u128::try_from(a).map_err(|_| Error::Internal(format!("negative structure constant for ({i}, {j}, {k})")))
    }

    /// Two classes of `support` on which `phi` differs, if any.
    pub fn nonconstancy_witness(&self, phi: &[Cyclo], support: &[usize]) -> Result<Option<(usize, usize)>> {
        nonconstancy_witness(&self.eval, phi, support)
    }

    pub fn to_data(&self) -> CharTableData {
        CharTableData {
            exponent: self.eval.exponent(),
            dixon_prime: self.dixon_prime,
            verification_primes: self.eval.primes(),
            degrees: self.degrees.clone(),
            mults: self
                .values
                .iter()
                .map(|row| row.iter().map(|v| v.coeffs().to_vec()).collect())
                .collect(),
        }
    }

    /// Rebuilds a table from serialized data and re-validates it.
    pub fn from_data(classes: Arc<ClassTable>, data: CharTableData) -> Result<CharTable> {
        let k = classes.len();
        if data.exponent != classes.exponent() || data.mults.len() != k || data.degrees.len() != k {
            return Err(Error::Internal("character table does not match the class table".into()));
        }
        let mut values = Vec::with_capacity(k);
        for row in data.mults {
            if row.len() != k {
                return Err(Error::Internal("character table row has wrong length".into()));
            }
            let mut vals = Vec::with_capacity(k);
            for (i, m) in row.into_iter().enumerate() {
                if m.len() as u64 != classes.element_order(i) {
                    return Err(Error::Internal("multiplicity vector has wrong length".into()));
                }
                vals.push(Cyclo::new(m.len() as u32, m));
            }
            values.push(vals);
        }
        let eval = Evaluator::new(data.exponent)?;
        if eval.primes() != data.verification_primes {
            return Err(Error::Internal("verification primes differ".into()));
        }
        let table = CharTable {
            classes,
            values,
            degrees: data.degrees,
            dixon_prime: data.dixon_prime,
            eval,
        };
        table.validate()?;
        Ok(table)
    }
}

fn flatten(row: &[Cyclo]) -> Vec<i64> {
    row.iter().flat_map(|v| v.coeffs().iter().copied()).collect()
}

/// Turns a normalized central character into a degree and exact values.
fn lift_row(t: &ClassTable, w: &[u64], ell: u64, z: u64) -> Result<(u64, Vec<Cyclo>)> {
    let k = t.len();
    let order = t.group().order();
    let red = |x: u128| (x % ell as u128) as u64;
    let mut s = 0u64;
    for i in 0..k {
        let term = mul_mod(mul_mod(w[i], w[t.inverse(i)], ell), inv_mod(red(t.size(i)), ell), ell);
        s = (s + term) % ell;
    }
    if s == 0 {
        return Err(Error::Internal("degree equation degenerate".into()));
    }
    let d2 = mul_mod(red(order), inv_mod(s, ell), ell);
    let degree = (1..=isqrt(order) as u64)
        .find(|&d| mul_mod(d, d, ell) == d2 && order % d as u128 == 0)
        .ok_or_else(|| Error::Internal("no admissible degree".into()))?;
    let chi: Vec<u64> = (0..k)
        .map(|i| mul_mod(mul_mod(w[i], degree % ell, ell), inv_mod(red(t.size(i)), ell), ell))
        .collect();
    let e = t.exponent();
    let mut values = Vec::with_capacity(k);
    for i in 0..k {
        let o = t.element_order(i);
        let zeta = pow_mod(z, e / o, ell);
        let inv_o = inv_mod(o % ell, ell);
        let mut mults = Vec::with_capacity(o as usize);
        for j in 0..o {
            // m_j = (1/o) Σ_t χ(g^t) ζ^{-jt}
            let step = pow_mod(zeta, (o - j % o) % o, ell);
            let mut acc = 0u64;
            let mut zt = 1u64;
            for tpow in 0..o {
                acc = (acc + mul_mod(chi[t.power(i, tpow as i64)], zt, ell)) % ell;
                zt = mul_mod(zt, step, ell);
            }
            let m = mul_mod(acc, inv_o, ell);
            if m > degree {
                return Err(Error::Internal("eigenvalue multiplicity out of range".into()));
            }
            mults.push(m as i64);
        }
        if mults.iter().sum::<i64>() != degree as i64 {
            return Err(Error::Internal("eigenvalue multiplicities do not add up to the degree".into()));
        }
        values.push(Cyclo::new(o as u32, mults));
    }
    Ok((degree, values))
}

/// `(1/|H|) Σ_k |C_k| φ(g_k) ψ(g_k⁻¹)` over the classes of `t`.
pub fn inner_product_on(t: &ClassTable, ev: &Evaluator, phi: &[Cyclo], psi: &[Cyclo]) -> Result<Ratio<i128>> {
    let mut acc = ev.zero();
    for c in 0..t.len() {
        let term = ev.mul(ev.num(&phi[c]), ev.num(&psi[t.inverse(c)]));
        acc = ev.add(acc, ev.mul(ev.int(t.size(c) as i128), term));
    }
    let n = ev.to_integer(acc)?;
    Ok(Ratio::new(n, t.group().order() as i128))
}

/// Number of points fixed by each class representative.
pub fn fixed_point_character(t: &ClassTable) -> ClassFunction {
    t.reps()
        .iter()
        .map(|r| Cyclo::integer(r.num_fixed() as i64))
        .collect()
}

/// Two classes of `support` on which `phi` takes different values.
pub fn nonconstancy_witness(ev: &Evaluator, phi: &[Cyclo], support: &[usize]) -> Result<Option<(usize, usize)>> {
    let Some(&first) = support.first() else {
        return Ok(None);
    };
    for &k in &support[1..] {
        if !ev.cyclo_equal(&phi[first], &phi[k])? {
            return Ok(Some((first, k)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::class_fusion;
    use crate::group::PermGroup;
    use crate::perm::Perm;

    fn cyc(n: usize, cs: &[&[u32]]) -> Perm {
        Perm::from_cycles(n, cs).unwrap()
    }

    fn table(gens: Vec<Perm>) -> CharTable {
        let g = Arc::new(PermGroup::from_gens(gens).unwrap());
        CharTable::new(Arc::new(ClassTable::new(g).unwrap())).unwrap()
    }

    fn sym(n: usize) -> Vec<Perm> {
        let all: Vec<u32> = (0..n as u32).collect();
        vec![cyc(n, &[&[0, 1]]), cyc(n, &[&all])]
    }

    fn alt(n: usize) -> Vec<Perm> {
        (2..n as u32).map(|k| cyc(n, &[&[0, 1, k]])).collect()
    }

    #[test]
    fn charpoly_of_small_matrix() {
        let p = 101;
        // [[2,1],[0,3]] has (x-2)(x-3) = x² - 5x + 6
        let cp = charpoly(vec![vec![2, 1], vec![0, 3]], p);
        assert_eq!(cp, vec![6, p - 5, 1]);
        let m = vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]];
        let cp = charpoly(m.clone(), p);
        // determinant = -3, trace = 16
        assert_eq!(cp[3], 1);
        assert_eq!(cp[2], p - 16);
        assert_eq!(cp[0], 3);
    }

    #[test]
    fn cyclic_of_order_two() {
        let t = table(vec![cyc(2, &[&[0, 1]])]);
        assert_eq!(t.degrees(), &[1, 1]);
        assert_eq!(t.value(1, 1).to_complex().0.round(), -1.0);
    }

    #[test]
    fn small_tables() {
        let a5 = table(alt(5));
        assert_eq!(a5.degrees(), &[1, 3, 3, 4, 5]);
        let s5 = table(sym(5));
        assert_eq!(s5.degrees(), &[1, 1, 4, 4, 5, 5, 6]);
        let s4 = table(sym(4));
        assert_eq!(s4.degrees(), &[1, 1, 2, 3, 3]);
        let a4 = table(alt(4));
        assert_eq!(a4.degrees(), &[1, 1, 1, 3]);
    }

    #[test]
    fn inner_products_and_permutation_character() {
        let t = table(sym(5));
        for r in 0..t.len() {
            assert_eq!(t.inner_product(t.row(r), t.row(r)).unwrap(), Ratio::from_integer(1));
        }
        let f = fixed_point_character(t.classes());
        let one = t.row(0).to_vec();
        assert_eq!(t.inner_product(&f, &one).unwrap(), Ratio::from_integer(1));
        assert_eq!(t.inner_product(&f, &f).unwrap(), Ratio::from_integer(2));
        assert_eq!(f[0], Cyclo::integer(5));
    }

    #[test]
    fn restriction_to_alternating() {
        let s5 = table(sym(5));
        let a5 = ClassTable::new(Arc::new(PermGroup::from_gens(alt(5)).unwrap())).unwrap();
        let fusion = class_fusion(&a5, s5.classes()).unwrap();
        let irreducible: Vec<bool> = (0..s5.len())
            .map(|r| s5.restriction_is_irreducible(&a5, &fusion, r).unwrap())
            .collect();
        // only the degree-6 character splits
        assert_eq!(irreducible, vec![true, true, true, true, true, true, false]);
    }

    #[test]
    fn structure_constants_agree_with_counting() {
        let t = table(sym(5));
        let c = t.classes();
        for i in 0..t.len() {
            for j in 0..t.len() {
                let row = structure_constants_row(c, i, j).unwrap();
                for k in 0..t.len() {
                    assert_eq!(t.structure_constant(i, j, k).unwrap(), row[k]);
                }
            }
        }
    }

    #[test]
    fn serialization_roundtrip() {
        let t = table(alt(5));
        let data = t.to_data();
        let back = CharTable::from_data(t.classes().clone(), data.clone()).unwrap();
        assert_eq!(back.to_data(), data);
        let mut broken = data;
        broken.mults[1][1] = vec![0, 3];
        assert!(CharTable::from_data(t.classes().clone(), broken).is_err());
    }
}
