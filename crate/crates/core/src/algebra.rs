//! Class algebra: structure constants by counting, product supports,
//! centralizer orbit counts and centralizer-product factorizations.
//!
//! `a_ijk` is the number of pairs `(x, y) ∈ C_i × C_j` with `xy = g_k` for
//! the fixed representative `g_k`. All constants of one pair `(i, j)` come
//! from a single pass over the smaller class: with `y = g_j` fixed,
//! `n_k = #{x ∈ C_i : x g_j ∈ C_k}` and then `a_ijk = n_k |C_j| / |C_k|`.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{cap_check, Error, Result};
use crate::classes::ClassTable;
use crate::group::{ConjugacyOrbit, PermGroup};
use crate::perm::Perm;

static IDENTITY_CHECKS: AtomicU64 = AtomicU64::new(0);

/// Number of supports whose counting identity `Σ_k a_ijk |C_k| = |C_i||C_j|`
/// has been checked so far in this process. A failure is always an error,
/// so every counted check passed.
pub fn counting_identity_checks() -> u64 {
    IDENTITY_CHECKS.load(Ordering::Relaxed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Counting,
    Character,
    Both,
}

/// The classes met by the product `C_i C_j`, with their structure constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductSupport {
    pub i: usize,
    pub j: usize,
    /// `(k, a_ijk)` with `a_ijk > 0`, sorted by `k`.
    #[serde(serialize_with = "ser_entries")]
    pub entries: Vec<(usize, u128)>,
    pub method: Method,
}

fn ser_entries<S: serde::Serializer>(e: &[(usize, u128)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(e.len()))?;
    for (k, a) in e {
        seq.serialize_element(&(k, a.to_string()))?;
    }
    seq.end()
}

impl ProductSupport {
    pub fn classes(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// All structure constants `a_ijk`, indexed by `k`.
pub fn structure_constants_row(t: &ClassTable, i: usize, j: usize) -> Result<Vec<u128>> {
    let k = t.len();
    let (si, sj) = (t.size(i), t.size(j));
    let cap = t.group().caps().max_class as u128;
    // iterate over the smaller class, holding a representative of the other fixed
    let iterate_i = si <= sj;
    cap_check("class enumeration", si.min(sj), cap)?;
    let counts: Vec<u64> = if iterate_i {
        let members = t.members(i)?;
        let y = t.rep(j);
        count_classes(t, members.len(), |n| members[n].compose(y))
    } else {
        let members = t.members(j)?;
        let x = t.rep(i);
        count_classes(t, members.len(), |n| x.compose(&members[n]))
    };
    let other = if iterate_i { sj } else { si };
    let mut row = vec![0u128; k];
    for c in 0..k {
        let pairs = counts[c] as u128 * other;
        if pairs % t.size(c) != 0 {
            return Err(Error::Internal(format!(
                "non-integral structure constant for ({i}, {j}, {c})"
            )));
        }
        row[c] = pairs / t.size(c);
    }
    let lhs: u128 = row.iter().zip(t.sizes()).map(|(a, s)| a * s).sum();
    if lhs != si * sj {
        return Err(Error::Internal(format!("counting identity fails for ({i}, {j})")));
    }
    IDENTITY_CHECKS.fetch_add(1, Ordering::Relaxed);
    Ok(row)
}

fn count_classes<F>(t: &ClassTable, n: usize, product: F) -> Vec<u64>
where
    F: Fn(usize) -> Perm + Sync,
{
    let k = t.len();
    (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; k],
            |mut acc, idx| {
                acc[t.classify(&product(idx))] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; k],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// `a_ijk` for one triple, by testing `x⁻¹ g_k ∈ C_j` for every `x` in the
/// smaller of `C_i`, `C_j`.
pub fn structure_constant(t: &ClassTable, i: usize, j: usize, k: usize) -> Result<u128> {
    let cap = t.group().caps().max_class as u128;
    cap_check("class enumeration", t.size(i).min(t.size(j)), cap)?;
    let g = t.rep(k);
    let count = if t.size(i) <= t.size(j) {
        t.members(i)?
            .par_iter()
            .filter(|x| t.classify(&x.inverse().compose(g)) == j)
            .count()
    } else {
        t.members(j)?
            .par_iter()
            .filter(|y| t.classify(&g.compose(&y.inverse())) == i)
            .count()
    };
    Ok(count as u128)
}

/// Classes meeting `C_i C_j`, by counting.
pub fn product_support(t: &ClassTable, i: usize, j: usize) -> Result<ProductSupport> {
    let row = structure_constants_row(t, i, j)?;
    Ok(ProductSupport {
        i,
        j,
        entries: row
            .into_iter()
            .enumerate()
            .filter(|(_, a)| *a > 0)
            .collect(),
        method: Method::Counting,
    })
}

/// Whether `C_i C_j` is a single class; otherwise two witnessing classes.
pub fn is_single_class_product(t: &ClassTable, i: usize, j: usize) -> Result<(bool, Option<(usize, usize)>)> {
    let s = product_support(t, i, j)?;
    if s.len() == 1 {
        Ok((true, None))
    } else {
        Ok((false, Some((s.entries[0].0, s.entries[1].0))))
    }
}

/// Orbits of `C_G(a)` acting by conjugation on the class of `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleCosetCount {
    pub count: usize,
    pub orbit_sizes: Vec<usize>,
}

/// `|C_G(a) \ G / C_G(b)|` as the number of `C_G(a)`-orbits on `b^G`.
pub fn centralizer_orbit_count(g: &PermGroup, a: &Perm, b: &Perm) -> Result<DoubleCosetCount> {
    g.require(a)?;
    g.require(b)?;
    let ca = g.centralizer(a)?;
    let class = g.conjugacy_orbit(b)?;
    Ok(orbit_partition(&class, ca.generators()))
}

/// Partition of an enumerated class into orbits of the group generated by `gens`.
pub fn orbit_partition(class: &ConjugacyOrbit, gens: &[Perm]) -> DoubleCosetCount {
    let elems = class.elements();
    let mut seen = vec![false; elems.len()];
    let mut orbit_sizes = Vec::new();
    for start in 0..elems.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = vec![start];
        let mut size = 0;
        while let Some(n) = queue.pop() {
            size += 1;
            for h in gens {
                let m = elems
                    .get_index_of(&elems[n].conj(h))
                    .expect("class is closed under conjugation");
                if !seen[m] {
                    seen[m] = true;
                    queue.push(m);
                }
            }
        }
        orbit_sizes.push(size);
    }
    DoubleCosetCount {
        count: orbit_sizes.len(),
        orbit_sizes,
    }
}

/// Outcome of the test `G = C_G(a) C_G(b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SzepResult {
    pub factors: bool,
    #[serde(serialize_with = "ser_u128")]
    pub product_size: u128,
}

pub(crate) fn ser_u128<S: serde::Serializer>(v: &u128, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `|C(a) C(b)| = |C(a)| |C(b)| / |C(a) ∩ C(b)|`; the intersection order is
/// `|C(a)|` divided by the length of the `C(a)`-orbit of `b`.
pub fn szep_factorization(g: &PermGroup, a: &Perm, b: &Perm) -> Result<SzepResult> {
    let ca = g.centralizer(a)?;
    g.require(b)?;
    szep_with_centralizer(g, &ca, b)
}

pub(crate) fn szep_with_centralizer(g: &PermGroup, ca: &PermGroup, b: &Perm) -> Result<SzepResult> {
    let cb_order = g.order() / g.conjugacy_orbit(b)?.len() as u128;
    let orbit = ConjugacyOrbit::new(b, ca.generators(), g.caps().max_class)?;
    let product_size = cb_order * orbit.len() as u128;
    Ok(SzepResult {
        factors: product_size == g.order(),
        product_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn cyc(n: usize, cs: &[&[u32]]) -> Perm {
        Perm::from_cycles(n, cs).unwrap()
    }

    fn table(gens: Vec<Perm>) -> ClassTable {
        ClassTable::new(Arc::new(PermGroup::from_gens(gens).unwrap())).unwrap()
    }

    fn brute(t: &ClassTable, i: usize, j: usize, k: usize) -> u128 {
        let ci = t.members(i).unwrap();
        let cj = t.members(j).unwrap();
        let g = t.rep(k);
        ci.iter()
            .flat_map(|x| cj.iter().map(move |y| x.compose(y)))
            .filter(|p| p == g)
            .count() as u128
    }

    #[test]
    fn s3_transpositions() {
        let t = table(vec![cyc(3, &[&[0, 1]]), cyc(3, &[&[0, 1, 2]])]);
        let tr = (0..3).find(|&i| t.element_order(i) == 2).unwrap();
        let three = (0..3).find(|&i| t.element_order(i) == 3).unwrap();
        assert_eq!(structure_constant(&t, tr, tr, three).unwrap(), 3);
        assert_eq!(structure_constant(&t, tr, tr, 0).unwrap(), 3);
        let row = structure_constants_row(&t, tr, tr).unwrap();
        assert_eq!(row[0] * 1 + row[three] * 2, 9);
    }

    #[test]
    fn a4_three_cycles_multiply_to_one_class() {
        let t = table(vec![cyc(4, &[&[0, 1, 2]]), cyc(4, &[&[0, 1], &[2, 3]])]);
        let threes: Vec<usize> = (0..t.len()).filter(|&i| t.element_order(i) == 3).collect();
        let c = threes[0];
        let s = product_support(&t, c, c).unwrap();
        assert_eq!(s.classes(), vec![t.inverse(c)]);
        assert_eq!(s.entries[0].1, 4);
        assert_eq!(is_single_class_product(&t, c, c).unwrap(), (true, None));
    }

    #[test]
    fn rows_agree_with_brute_force() {
        let t = table(vec![cyc(5, &[&[0, 1]]), cyc(5, &[&[0, 1, 2, 3, 4]])]);
        for i in 0..t.len() {
            for j in 0..t.len() {
                let row = structure_constants_row(&t, i, j).unwrap();
                for k in 0..t.len() {
                    let b = brute(&t, i, j, k);
                    assert_eq!(row[k], b, "({i},{j},{k})");
                    assert_eq!(structure_constant(&t, i, j, k).unwrap(), b);
                }
                if i == 0 {
                    assert_eq!(product_support(&t, 0, j).unwrap().classes(), vec![j]);
                }
            }
        }
    }

    #[test]
    fn orbit_counts() {
        let g = PermGroup::from_gens(vec![cyc(5, &[&[0, 1]]), cyc(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        let id = Perm::identity(5);
        let t = cyc(5, &[&[0, 1]]);
        assert_eq!(centralizer_orbit_count(&g, &t, &id).unwrap().count, 1);
        let d = centralizer_orbit_count(&g, &t, &t).unwrap();
        // the transpositions commuting with, meeting, or disjoint from (0 1)
        assert_eq!(d.count, 3);
        assert_eq!(d.orbit_sizes.iter().sum::<usize>(), 10);
        let c3 = cyc(5, &[&[0, 1, 2]]);
        assert_eq!(
            centralizer_orbit_count(&g, &t, &c3).unwrap().count,
            centralizer_orbit_count(&g, &c3, &t).unwrap().count
        );
    }

    #[test]
    fn szep_in_s5() {
        let g = PermGroup::from_gens(vec![cyc(5, &[&[0, 1]]), cyc(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        let t = cyc(5, &[&[0, 1]]);
        let r = szep_factorization(&g, &t, &t).unwrap();
        // C(t) C(t) = C(t)
        assert_eq!(r.product_size, 12);
        assert!(!r.factors);
    }
}
