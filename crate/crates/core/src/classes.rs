//! Conjugacy classes: enumeration, identification, power maps and fusion.
//!
//! Classes are found by sampling uniform random elements (and their
//! powers), enumerating the conjugation orbit of every new one, and
//! stopping exactly when the class sizes add up to the group order. A
//! deterministic sweep over the stabilizer-chain enumeration takes over if
//! sampling stalls, so the table is always complete.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use indexmap::IndexSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{lcm, prime_divisors};
use crate::error::{Error, Result};
use crate::group::{ConjugacyOrbit, PermGroup};
use crate::perm::Perm;

/// Conjugation invariants used to sort classes and to narrow down
/// identification before any membership test.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub order: u64,
    pub cycle_type: Vec<u32>,
    /// Cycle type of `x^m` for each prime `m` dividing the order.
    pub power_types: Vec<(u64, Vec<u32>)>,
}

impl Fingerprint {
    pub fn of(x: &Perm) -> Fingerprint {
        let order = x.order();
        let power_types = prime_divisors(order as u128)
            .into_iter()
            .map(|m| (m as u64, x.pow(m as i64).cycle_type()))
            .collect();
        Fingerprint {
            order,
            cycle_type: x.cycle_type(),
            power_types,
        }
    }
}

/// Complete list of conjugacy classes of a permutation group.
#[derive(Debug)]
pub struct ClassTable {
    group: Arc<PermGroup>,
    reps: Vec<Perm>,
    sizes: Vec<u128>,
    fingerprints: Vec<Fingerprint>,
    inverse_map: Vec<usize>,
    /// `powers[i][t]` is the class of `reps[i]^t`, for `t < ord(reps[i])`.
    powers: Vec<Vec<usize>>,
    by_cycle_type: HashMap<Vec<u32>, Vec<usize>>,
    members: Vec<OnceLock<IndexSet<Perm>>>,
    centralizers: Vec<OnceLock<Arc<PermGroup>>>,
}

/// Serialized form of a class table (sizes as decimal strings).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTableData {
    pub order: String,
    pub reps: Vec<Perm>,
    pub sizes: Vec<String>,
    pub centralizer_orders: Vec<String>,
    pub fingerprints: Vec<Fingerprint>,
    pub inverse_map: Vec<usize>,
    pub powers: Vec<Vec<usize>>,
}

/// Sampling rounds without a new class before switching to the sweep.
const STALL_LIMIT: usize = 400;

struct Builder<'a> {
    group: &'a PermGroup,
    orbits: Vec<IndexSet<Perm>>,
    by_cycle_type: HashMap<Vec<u32>, Vec<usize>>,
    total: u128,
}

impl Builder<'_> {
    fn known(&self, x: &Perm, ct: &[u32]) -> bool {
        self.by_cycle_type
            .get(ct)
            .is_some_and(|cands| cands.iter().any(|&c| self.orbits[c].contains(x)))
    }

    /// Records the class of `x` if new; returns whether it was.
    fn offer(&mut self, x: &Perm) -> Result<bool> {
        let ct = x.cycle_type();
        if self.known(x, &ct) {
            return Ok(false);
        }
        let orbit = self.group.conjugacy_orbit(x)?.into_elements();
        self.total += orbit.len() as u128;
        self.by_cycle_type.entry(ct).or_default().push(self.orbits.len());
        self.orbits.push(orbit);
        Ok(true)
    }
}

impl ClassTable {
    pub fn new(group: Arc<PermGroup>) -> Result<ClassTable> {
        let order = group.order();
        let mut b = Builder {
            group: &group,
            orbits: Vec::new(),
            by_cycle_type: HashMap::new(),
            total: 0,
        };
        b.offer(&group.identity())?;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c1a5);
        let mut stale = 0;
        while b.total < order && stale < STALL_LIMIT {
            let g = group.random_element(&mut rng);
            let o = g.order() as i64;
            let mut fresh = false;
            for t in 1..o {
                if o % t == 0 && b.offer(&g.pow(t))? {
                    fresh = true;
                }
            }
            stale = if fresh { 0 } else { stale + 1 };
        }
        let mut idx = 0u128;
        while b.total < order {
            b.offer(&group.element_at(idx))?;
            idx += 1;
        }
        if b.total != order {
            return Err(Error::Internal("class sizes overshoot the group order".into()));
        }
        log::debug!("{} classes found in a group of order {}", b.orbits.len(), order);

        let mut keyed: Vec<(u64, u128, Fingerprint, Perm)> = b
            .orbits
            .iter()
            .map(|orb| {
                let rep = orb.iter().min().unwrap().clone();
                let fp = Fingerprint::of(&rep);
                (fp.order, orb.len() as u128, fp, rep)
            })
            .collect();
        keyed.sort();
        let reps: Vec<Perm> = keyed.iter().map(|k| k.3.clone()).collect();
        let sizes: Vec<u128> = keyed.iter().map(|k| k.1).collect();
        let fingerprints: Vec<Fingerprint> = keyed.into_iter().map(|k| k.2).collect();
        let mut table = ClassTable::assemble(group.clone(), reps, sizes, fingerprints, None)?;
        table.certify()?;
        Ok(table)
    }

    fn assemble(
        group: Arc<PermGroup>,
        reps: Vec<Perm>,
        sizes: Vec<u128>,
        fingerprints: Vec<Fingerprint>,
        maps: Option<(Vec<usize>, Vec<Vec<usize>>)>,
    ) -> Result<ClassTable> {
        let k = reps.len();
        let mut by_cycle_type: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
        for (i, fp) in fingerprints.iter().enumerate() {
            by_cycle_type.entry(fp.cycle_type.clone()).or_default().push(i);
        }
        let mut table = ClassTable {
            group,
            reps,
            sizes,
            fingerprints,
            inverse_map: Vec::new(),
            powers: Vec::new(),
            by_cycle_type,
            members: (0..k).map(|_| OnceLock::new()).collect(),
            centralizers: (0..k).map(|_| OnceLock::new()).collect(),
        };
        match maps {
            Some((inv, powers)) => {
                table.inverse_map = inv;
                table.powers = powers;
            }
            None => {
                let inv = (0..k)
                    .map(|i| table.classify(&table.reps[i].inverse()))
                    .collect();
                let powers = (0..k)
                    .map(|i| {
                        let x = &table.reps[i];
                        let o = table.fingerprints[i].order;
                        let mut acc = table.group.identity();
                        let mut row = Vec::with_capacity(o as usize);
                        for _ in 0..o {
                            row.push(table.classify(&acc));
                            acc = acc.compose(x);
                        }
                        row
                    })
                    .collect();
                table.inverse_map = inv;
                table.powers = powers;
            }
        }
        Ok(table)
    }

    /// Checks the table invariants and that classes with equal
    /// fingerprints and sizes have non-conjugate representatives.
    fn certify(&mut self) -> Result<()> {
        self.validate()?;
        let k = self.len();
        for a in 0..k {
            for b in a + 1..k {
                if self.fingerprints[a] == self.fingerprints[b] && self.sizes[a] == self.sizes[b] {
                    if self.group.conjugating_element(&self.reps[a], &self.reps[b])?.is_some() {
                        return Err(Error::Internal(format!("classes {a} and {b} are conjugate")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Cheap structural checks shared by construction and cache loading.
    pub fn validate(&self) -> Result<()> {
        let order = self.group.order();
        let k = self.len();
        let bad = |m: &str| Err(Error::Internal(format!("class table: {m}")));
        if k == 0 || !self.reps[0].is_identity() || self.sizes[0] != 1 {
            return bad("class 0 must be the identity");
        }
        if self.sizes.iter().sum::<u128>() != order {
            return bad("class sizes do not sum to the group order");
        }
        if self.sizes.iter().any(|&s| s == 0 || order % s != 0) {
            return bad("class size does not divide the group order");
        }
        if self.inverse_map.len() != k || self.powers.len() != k || self.fingerprints.len() != k {
            return bad("map lengths differ from the number of classes");
        }
        for i in 0..k {
            if self.inverse_map[self.inverse_map[i]] != i {
                return bad("inverse map is not an involution");
            }
            if self.powers[i].len() as u64 != self.fingerprints[i].order
                || self.powers[i].first() != Some(&0)
                || self.powers[i].iter().any(|&c| c >= k)
            {
                return bad("power table malformed");
            }
            if self.powers[i].get(1).is_some_and(|&c| c != i) {
                return bad("first power is not the class itself");
            }
            if Fingerprint::of(&self.reps[i]) != self.fingerprints[i] {
                return bad("fingerprint does not match representative");
            }
            if !self.group.contains(&self.reps[i]) {
                return bad("representative outside the group");
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<PermGroup> {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> &[Perm] {
        &self.reps
    }

    pub fn rep(&self, i: usize) -> &Perm {
        &self.reps[i]
    }

    pub fn sizes(&self) -> &[u128] {
        &self.sizes
    }

    pub fn size(&self, i: usize) -> u128 {
        self.sizes[i]
    }

    pub fn centralizer_order(&self, i: usize) -> u128 {
        self.group.order() / self.sizes[i]
    }

    pub fn fingerprint(&self, i: usize) -> &Fingerprint {
        &self.fingerprints[i]
    }

    pub fn element_order(&self, i: usize) -> u64 {
        self.fingerprints[i].order
    }

    pub fn inverse_map(&self) -> &[usize] {
        &self.inverse_map
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse_map[i]
    }

    /// Class of `reps[i]^t` for any integer `t`.
    pub fn power(&self, i: usize, t: i64) -> usize {
        let o = self.powers[i].len() as i64;
        self.powers[i][t.rem_euclid(o) as usize]
    }

    /// The `m`-th power map as a class index vector.
    pub fn power_map(&self, m: i64) -> Vec<usize> {
        (0..self.len()).map(|i| self.power(i, m)).collect()
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> u64 {
        self.fingerprints
            .iter()
            .fold(1u128, |e, f| lcm(e, f.order as u128)) as u64
    }

    /// Every element of class `i`, breadth first from the representative.
    pub fn members(&self, i: usize) -> Result<&IndexSet<Perm>> {
        if let Some(m) = self.members[i].get() {
            return Ok(m);
        }
        let orbit = ConjugacyOrbit::new(&self.reps[i], self.group.generators(), self.group.caps().max_class)?;
        let set = orbit.into_elements();
        if set.len() as u128 != self.sizes[i] {
            return Err(Error::Internal("class enumeration disagrees with recorded size".into()));
        }
        Ok(self.members[i].get_or_init(|| set))
    }

    /// `C_G(reps[i])`, computed once.
    pub fn centralizer(&self, i: usize) -> Result<Arc<PermGroup>> {
        if let Some(c) = self.centralizers[i].get() {
            return Ok(c.clone());
        }
        let c = Arc::new(self.group.centralizer(&self.reps[i])?);
        if c.order() != self.centralizer_order(i) {
            return Err(Error::Internal("centralizer order mismatch".into()));
        }
        Ok(self.centralizers[i].get_or_init(|| c).clone())
    }

    /// Class index of `x`, which must lie in the group.
    pub fn identify_class(&self, x: &Perm) -> Result<usize> {
        self.group.require(x)?;
        Ok(self.classify(x))
    }

    /// Class index of a group element, skipping the membership test.
    ///
    /// Narrowing is by cycle type, then full fingerprint, and only then by
    /// looking `x` up in the enumerated classes.
    pub fn classify(&self, x: &Perm) -> usize {
        let ct = x.cycle_type();
        let cands = self
            .by_cycle_type
            .get(&ct)
            .expect("element of the group has a known cycle type");
        if cands.len() == 1 {
            return cands[0];
        }
        let fp = Fingerprint::of(x);
        let cands: Vec<usize> = cands
            .iter()
            .copied()
            .filter(|&c| self.fingerprints[c] == fp)
            .collect();
        if cands.len() == 1 {
            return cands[0];
        }
        for &c in &cands[..cands.len() - 1] {
            if self.members(c).expect("class within caps").contains(x) {
                return c;
            }
        }
        *cands.last().expect("element of the group has a known fingerprint")
    }

    pub fn to_data(&self) -> ClassTableData {
        ClassTableData {
            order: self.group.order().to_string(),
            reps: self.reps.clone(),
            sizes: self.sizes.iter().map(u128::to_string).collect(),
            centralizer_orders: (0..self.len()).map(|i| self.centralizer_order(i).to_string()).collect(),
            fingerprints: self.fingerprints.clone(),
            inverse_map: self.inverse_map.clone(),
            powers: self.powers.clone(),
        }
    }

    /// Rebuilds a table from serialized data, re-validating it against `group`.
    pub fn from_data(group: Arc<PermGroup>, data: ClassTableData) -> Result<ClassTable> {
        let parse = |s: &String| {
            s.parse::<u128>()
                .map_err(|_| Error::Internal(format!("bad integer {s:?} in class table")))
        };
        if parse(&data.order)? != group.order() {
            return Err(Error::Internal("class table belongs to a different group".into()));
        }
        let sizes = data.sizes.iter().map(parse).collect::<Result<Vec<_>>>()?;
        let cents = data.centralizer_orders.iter().map(parse).collect::<Result<Vec<_>>>()?;
        if cents.len() != sizes.len()
            || sizes.iter().zip(&cents).any(|(s, c)| s * c != group.order())
            || data.reps.len() != sizes.len()
        {
            return Err(Error::Internal("class table sizes inconsistent".into()));
        }
        if data.reps.iter().any(|r| r.degree() != group.degree()) {
            return Err(Error::Internal("class table degree mismatch".into()));
        }
        let table = ClassTable::assemble(
            group,
            data.reps,
            sizes,
            data.fingerprints,
            Some((data.inverse_map, data.powers)),
        )?;
        table.validate()?;
        Ok(table)
    }
}

/// Map from the classes of a subgroup to the classes of the ambient group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FusionMap {
    pub map: Vec<usize>,
}

impl FusionMap {
    pub fn image(&self, i: usize) -> usize {
        self.map[i]
    }

    /// Subgroup classes fusing into ambient class `j`.
    pub fn preimage(&self, j: usize) -> Vec<usize> {
        (0..self.map.len()).filter(|&i| self.map[i] == j).collect()
    }
}

/// Fuses the classes of `h` into those of `g`.
pub fn class_fusion(h: &ClassTable, g: &ClassTable) -> Result<FusionMap> {
    if h.group().degree() != g.group().degree()
        || !h.group().generators().iter().all(|x| g.group().contains(x))
    {
        return Err(Error::NotASubgroup);
    }
    let map: Vec<usize> = h.reps().iter().map(|r| g.classify(r)).collect();
    for (i, &j) in map.iter().enumerate() {
        if h.element_order(i) != g.element_order(j) || h.fingerprint(i) != g.fingerprint(j) {
            return Err(Error::Internal("fused classes have different fingerprints".into()));
        }
    }
    Ok(FusionMap { map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn cyc(n: usize, cs: &[&[u32]]) -> Perm {
        Perm::from_cycles(n, cs).unwrap()
    }

    fn sym(n: usize) -> Arc<PermGroup> {
        let all: Vec<u32> = (0..n as u32).collect();
        Arc::new(PermGroup::new(n, vec![cyc(n, &[&[0, 1]]), cyc(n, &[&all])]).unwrap())
    }

    fn alt(n: usize) -> Arc<PermGroup> {
        let gens = (2..n as u32).map(|k| cyc(n, &[&[0, 1, k]])).collect();
        Arc::new(PermGroup::new(n, gens).unwrap())
    }

    fn exhaustive_partition(g: &PermGroup) -> Vec<Vec<Perm>> {
        let elems = g.elements();
        let mut seen: IndexSet<Perm> = IndexSet::new();
        let mut parts = Vec::new();
        for x in &elems {
            if seen.contains(x) {
                continue;
            }
            let mut class: Vec<Perm> = elems.iter().map(|h| x.conj(h)).collect();
            class.sort();
            class.dedup();
            seen.extend(class.iter().cloned());
            parts.push(class);
        }
        parts
    }

    #[test]
    fn class_counts() {
        let s5 = ClassTable::new(sym(5)).unwrap();
        assert_eq!(s5.len(), 7);
        let a4 = ClassTable::new(alt(4)).unwrap();
        assert_eq!(a4.sizes(), &[1, 3, 4, 4]);
        let a5 = ClassTable::new(alt(5)).unwrap();
        assert_eq!(a5.sizes(), &[1, 15, 20, 12, 12]);
        for t in [&s5, &a4, &a5] {
            for i in 0..t.len() {
                assert_eq!(t.size(i) * t.centralizer_order(i), t.group().order());
            }
        }
    }

    #[test]
    fn matches_exhaustive_partition() {
        for g in [sym(4), alt(5), sym(5), alt(6)] {
            let t = ClassTable::new(g.clone()).unwrap();
            let mut oracle: Vec<(u128, Perm)> = exhaustive_partition(&g)
                .into_iter()
                .map(|c| (c.len() as u128, c[0].clone()))
                .collect();
            assert_eq!(oracle.len(), t.len());
            oracle.sort();
            for (_, x) in oracle {
                let i = t.classify(&x);
                assert!(t.members(i).unwrap().contains(&x));
            }
        }
    }

    #[test]
    fn identification() {
        let t = ClassTable::new(alt(4)).unwrap();
        assert_eq!(t.identify_class(&Perm::identity(4)).unwrap(), 0);
        let a = t.identify_class(&cyc(4, &[&[0, 1, 2]])).unwrap();
        let b = t.identify_class(&cyc(4, &[&[0, 2, 1]])).unwrap();
        assert_ne!(a, b);
        assert_eq!(t.inverse(a), b);
        assert!(matches!(t.identify_class(&cyc(4, &[&[0, 1]])), Err(Error::NotInGroup)));

        let g = alt(6);
        let t = ClassTable::new(g.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let i = rng.gen_range(0..t.len());
            let h = g.random_element(&mut rng);
            assert_eq!(t.identify_class(&t.rep(i).conj(&h)).unwrap(), i);
        }
    }

    #[test]
    fn power_maps() {
        let t = ClassTable::new(alt(5)).unwrap();
        let fives: Vec<usize> = (0..t.len()).filter(|&i| t.element_order(i) == 5).collect();
        assert_eq!(fives.len(), 2);
        let sq = t.power_map(2);
        assert_eq!(sq[fives[0]], fives[1]);
        assert_eq!(sq[fives[1]], fives[0]);
        for i in 0..t.len() {
            if t.element_order(i) == 2 {
                assert_eq!(t.inverse(i), i);
            }
            let o = t.element_order(i) as i64;
            assert_eq!(t.power(i, o), 0);
            assert_eq!(t.power(i, -1), t.inverse(i));
        }
    }

    #[test]
    fn fusion_of_alternating_into_symmetric() {
        let s = ClassTable::new(sym(5)).unwrap();
        let a = ClassTable::new(alt(5)).unwrap();
        let f = class_fusion(&a, &s).unwrap();
        let fives: Vec<usize> = (0..a.len()).filter(|&i| a.element_order(i) == 5).collect();
        assert_eq!(f.image(fives[0]), f.image(fives[1]));
        let id = class_fusion(&s, &s).unwrap();
        assert_eq!(id.map, (0..s.len()).collect::<Vec<_>>());
        assert!(matches!(class_fusion(&s, &a), Err(Error::NotASubgroup)));
    }

    #[test]
    fn serialization_roundtrip() {
        let g = alt(5);
        let t = ClassTable::new(g.clone()).unwrap();
        let json = serde_json::to_string(&t.to_data()).unwrap();
        let back = ClassTable::from_data(g.clone(), serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.to_data(), t.to_data());
        let mut broken: ClassTableData = serde_json::from_str(&json).unwrap();
        broken.sizes[1] = "14".into();
        assert!(ClassTable::from_data(g, broken).is_err());
    }
}
