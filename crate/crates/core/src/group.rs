//! Permutation groups via a base and strong generating set.
//!
//! The stabilizer chain is built by deterministic Schreier–Sims with the
//! base extended by the first moved point of each non-sifting residue.
//! Centralizers come from the stabilizer of `x` in the conjugation action
//! (Schreier generators sampled until the known order is reached); element
//! transporters come from a backtrack search through a chain whose base
//! follows the cycles of `x`.

use indexmap::IndexSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{is_power_of, isqrt};
use crate::error::{cap_check, Error, Result};
use crate::perm::Perm;

/// Resource caps. Operations fail with `SizeCapExceeded` rather than
/// silently sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_degree: usize,
    pub max_order: u128,
    pub max_class: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_degree: 5000,
            max_order: 100_000_000,
            max_class: 5_000_000,
        }
    }
}

#[derive(Clone, Debug)]
struct Level {
    point: u32,
    gens: Vec<Perm>,
    orbit: Vec<u32>,
    /// `transversal[γ]` maps the base point to `γ`.
    transversal: Vec<Option<Perm>>,
    transversal_inv: Vec<Option<Perm>>,
}

impl Level {
    fn new(point: u32, gens: Vec<Perm>, degree: usize) -> Level {
        let mut level = Level {
            point,
            gens,
            orbit: Vec::new(),
            transversal: Vec::new(),
            transversal_inv: Vec::new(),
        };
        level.recompute(degree);
        level
    }

    fn recompute(&mut self, degree: usize) {
        let mut transversal: Vec<Option<Perm>> = vec![None; degree];
        transversal[self.point as usize] = Some(Perm::identity(degree));
        let mut orbit = vec![self.point];
        let mut i = 0;
        while i < orbit.len() {
            let beta = orbit[i];
            for s in &self.gens {
                let img = s.image(beta);
                if transversal[img as usize].is_none() {
                    let u = transversal[beta as usize].as_ref().unwrap().compose(s);
                    transversal[img as usize] = Some(u);
                    orbit.push(img);
                }
            }
            i += 1;
        }
        self.transversal_inv = transversal
            .iter()
            .map(|u| u.as_ref().map(Perm::inverse))
            .collect();
        self.transversal = transversal;
        self.orbit = orbit;
    }
}

/// A permutation group with a verified stabilizer chain.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    levels: Vec<Level>,
    order: u128,
    caps: Caps,
}

fn sift_levels(levels: &[Level], mut g: Perm, from: usize) -> (Perm, usize) {
    for (l, level) in levels.iter().enumerate().skip(from) {
        let img = g.image(level.point);
        match &level.transversal_inv[img as usize] {
            None => return (g, l),
            Some(ui) => g = g.compose(ui),
        }
    }
    (g, levels.len())
}

fn chain_order(levels: &[Level]) -> u128 {
    levels.iter().map(|l| l.orbit.len() as u128).product()
}

fn schreier_sims(degree: usize, gens: &[Perm], prefix: &[u32], caps: &Caps) -> Result<Vec<Level>> {
    let mut base: Vec<u32> = Vec::new();
    for &b in prefix {
        if !base.contains(&b) {
            base.push(b);
        }
    }
    for g in gens {
        if base.iter().all(|&b| g.fixes(b)) {
            base.push(g.first_moved().expect("generators are nontrivial"));
        }
    }
    let mut levels: Vec<Level> = base
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let s: Vec<Perm> = gens
                .iter()
                .filter(|g| base[..i].iter().all(|&c| g.fixes(c)))
                .cloned()
                .collect();
            Level::new(b, s, degree)
        })
        .collect();
    cap_check("group order", chain_order(&levels), caps.max_order)?;

    let mut i = levels.len() as isize - 1;
    while i >= 0 {
        let li = i as usize;
        let mut restart = None;
        'scan: for idx in 0..levels[li].orbit.len() {
            let beta = levels[li].orbit[idx];
            for s_idx in 0..levels[li].gens.len() {
                let s = &levels[li].gens[s_idx];
                let img = s.image(beta);
                let u = levels[li].transversal[beta as usize].as_ref().unwrap();
                let ui = levels[li].transversal_inv[img as usize].as_ref().unwrap();
                let schreier = u.compose(s).compose(ui);
                if schreier.is_identity() {
                    continue;
                }
                let (h, j) = sift_levels(&levels, schreier, li + 1);
                if j < levels.len() || !h.is_identity() {
                    if j == levels.len() {
                        let b = h.first_moved().unwrap();
                        levels.push(Level::new(b, Vec::new(), degree));
                    }
                    for level in levels.iter_mut().take(j + 1).skip(li + 1) {
                        level.gens.push(h.clone());
                        level.recompute(degree);
                    }
                    cap_check("group order", chain_order(&levels), caps.max_order)?;
                    restart = Some(j);
                    break 'scan;
                }
            }
        }
        match restart {
            Some(j) => i = j as isize,
            None => i -= 1,
        }
    }
    Ok(levels)
}

/// Breadth-first orbit of an element under conjugation, with a Schreier
/// tree back to the starting element.
#[derive(Clone, Debug)]
pub struct ConjugacyOrbit {
    elements: IndexSet<Perm>,
    parent: Vec<(u32, u32)>,
    gens: Vec<Perm>,
}

impl ConjugacyOrbit {
    /// Enumerates `{x^g : g ∈ ⟨gens⟩}`, failing once it exceeds `cap`.
    pub fn new(x: &Perm, gens: &[Perm], cap: usize) -> Result<ConjugacyOrbit> {
        let mut elements = IndexSet::new();
        let mut parent = vec![(0, u32::MAX)];
        elements.insert(x.clone());
        let mut i = 0;
        while i < elements.len() {
            for (gi, g) in gens.iter().enumerate() {
                let y = elements[i].conj(g);
                if elements.insert(y) {
                    parent.push((i as u32, gi as u32));
                    if elements.len() > cap {
                        return Err(Error::SizeCapExceeded {
                            what: "conjugacy class",
                            value: elements.len() as u128,
                            cap: cap as u128,
                        });
                    }
                }
            }
            i += 1;
        }
        Ok(ConjugacyOrbit {
            elements,
            parent,
            gens: gens.to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &IndexSet<Perm> {
        &self.elements
    }

    pub fn index_of(&self, y: &Perm) -> Option<usize> {
        self.elements.get_index_of(y)
    }

    /// An element `t` of the acting group with `x^t = elements[i]`.
    pub fn transversal(&self, i: usize) -> Perm {
        let mut path = Vec::new();
        let mut j = i;
        while j != 0 {
            let (p, g) = self.parent[j];
            path.push(g);
            j = p as usize;
        }
        let mut t = Perm::identity(self.elements[0].degree());
        for &g in path.iter().rev() {
            t = t.compose(&self.gens[g as usize]);
        }
        t
    }

    pub fn into_elements(self) -> IndexSet<Perm> {
        self.elements
    }
}

/// Result of [`PermGroup::structure_flags`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct StructureFlags {
    pub is_p_group: bool,
    pub is_solvable: bool,
}

impl PermGroup {
    /// Builds the stabilizer chain of `⟨gens⟩` on `degree` points.
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<PermGroup> {
        PermGroup::with_caps(degree, gens, Caps::default())
    }

    pub fn with_caps(degree: usize, gens: Vec<Perm>, caps: Caps) -> Result<PermGroup> {
        PermGroup::with_base_prefix(degree, gens, &[], caps)
    }

    /// Like [`PermGroup::with_caps`], with the base starting at `prefix`.
    pub fn with_base_prefix(
        degree: usize,
        gens: Vec<Perm>,
        prefix: &[u32],
        caps: Caps,
    ) -> Result<PermGroup> {
        cap_check("degree", degree as u128, caps.max_degree as u128)?;
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(g.degree(), degree));
            }
        }
        let mut uniq: Vec<Perm> = Vec::new();
        for g in gens {
            if !g.is_identity() && !uniq.contains(&g) {
                uniq.push(g);
            }
        }
        let levels = schreier_sims(degree, &uniq, prefix, &caps)?;
        let order = chain_order(&levels);
        let group = PermGroup {
            degree,
            gens: uniq,
            levels,
            order,
            caps,
        };
        group.verify_chain()?;
        Ok(group)
    }

    /// Convenience constructor that takes the degree from the first generator.
    pub fn from_gens(gens: Vec<Perm>) -> Result<PermGroup> {
        let degree = gens
            .first()
            .map(Perm::degree)
            .ok_or_else(|| Error::BadSpec("no generators given".into()))?;
        PermGroup::new(degree, gens)
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup {
            degree,
            gens: Vec::new(),
            levels: Vec::new(),
            order: 1,
            caps: Caps::default(),
        }
    }

    fn verify_chain(&self) -> Result<()> {
        for g in &self.gens {
            let (h, j) = sift_levels(&self.levels, g.clone(), 0);
            if j != self.levels.len() || !h.is_identity() {
                return Err(Error::Internal("generator does not sift through the chain".into()));
            }
        }
        let base = self.base();
        for (i, b) in base.iter().enumerate() {
            if base[..i].contains(b) {
                return Err(Error::Internal("repeated base point".into()));
            }
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn with_caps_replaced(mut self, caps: Caps) -> PermGroup {
        self.caps = caps;
        self
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn strong_generators(&self) -> Vec<Perm> {
        let mut out: Vec<Perm> = Vec::new();
        for l in &self.levels {
            for g in &l.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    pub fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn contains(&self, x: &Perm) -> bool {
        if x.degree() != self.degree {
            return false;
        }
        let (h, j) = sift_levels(&self.levels, x.clone(), 0);
        j == self.levels.len() && h.is_identity()
    }

    pub(crate) fn require(&self, x: &Perm) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::NotInGroup)
        }
    }

    /// Uniformly random element: one transversal element per level.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Perm {
        let mut acc = self.identity();
        for level in self.levels.iter().rev() {
            let gamma = level.orbit[rng.gen_range(0..level.orbit.len())];
            acc = acc.compose(level.transversal[gamma as usize].as_ref().unwrap());
        }
        acc
    }

    /// Every element; intended for small groups and oracles.
    pub fn elements(&self) -> Vec<Perm> {
        let mut acc = vec![self.identity()];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(acc.len() * level.orbit.len());
            for a in &acc {
                for &gamma in &level.orbit {
                    next.push(a.compose(level.transversal[gamma as usize].as_ref().unwrap()));
                }
            }
            acc = next;
        }
        acc
    }

    /// The element at position `index` of [`PermGroup::elements`], without
    /// materializing the list.
    pub fn element_at(&self, mut index: u128) -> Perm {
        let mut digits = Vec::with_capacity(self.levels.len());
        for level in &self.levels {
            let len = level.orbit.len() as u128;
            digits.push(level.orbit[(index % len) as usize]);
            index /= len;
        }
        let mut acc = self.identity();
        for (level, gamma) in self.levels.iter().zip(digits).rev() {
            acc = acc.compose(level.transversal[gamma as usize].as_ref().unwrap());
        }
        acc
    }

    /// Orbit of a point under the group.
    pub fn orbit(&self, point: u32) -> Vec<u32> {
        let mut seen = vec![false; self.degree];
        let mut orbit = vec![point];
        seen[point as usize] = true;
        let mut i = 0;
        while i < orbit.len() {
            for g in &self.gens {
                let img = g.image(orbit[i]);
                if !seen[img as usize] {
                    seen[img as usize] = true;
                    orbit.push(img);
                }
            }
            i += 1;
        }
        orbit
    }

    /// Conjugacy class of `x` under this group, breadth first from `x`.
    pub fn conjugacy_orbit(&self, x: &Perm) -> Result<ConjugacyOrbit> {
        ConjugacyOrbit::new(x, &self.gens, self.caps.max_class)
    }

    /// `⟨elems⟩`, which must lie in this group.
    pub fn generated_subgroup(&self, elems: &[Perm]) -> Result<PermGroup> {
        for e in elems {
            self.require(e)?;
        }
        PermGroup::with_caps(self.degree, elems.to_vec(), self.caps)
    }

    /// Smallest normal subgroup containing `seeds`.
    pub fn normal_closure(&self, seeds: &[Perm]) -> Result<PermGroup> {
        for s in seeds {
            self.require(s)?;
        }
        let mut gens: Vec<Perm> = seeds.iter().filter(|s| !s.is_identity()).cloned().collect();
        let mut k = PermGroup::with_caps(self.degree, gens.clone(), self.caps)?;
        let mut i = 0;
        // every generator of k, old or new, is conjugated by every generator
        while i < gens.len() {
            for g in &self.gens {
                let c = gens[i].conj(g);
                if !k.contains(&c) {
                    gens.push(c);
                    k = PermGroup::with_caps(self.degree, gens.clone(), self.caps)?;
                }
            }
            i += 1;
        }
        Ok(k)
    }

    /// Commutator subgroup: normal closure of the generator commutators.
    pub fn derived_subgroup(&self) -> Result<PermGroup> {
        let mut comms = Vec::new();
        for (i, a) in self.gens.iter().enumerate() {
            for b in &self.gens[i + 1..] {
                let c = Perm::commutator(a, b);
                if !c.is_identity() && !comms.contains(&c) {
                    comms.push(c);
                }
            }
        }
        self.normal_closure(&comms)
    }

    /// Orders of the derived series, ending at the first repeated term.
    pub fn derived_series_orders(&self) -> Result<Vec<u128>> {
        let mut orders = vec![self.order];
        let mut h = self.clone();
        while !h.is_trivial() {
            let d = h.derived_subgroup()?;
            let o = d.order;
            if o == h.order {
                break;
            }
            orders.push(o);
            h = d;
        }
        Ok(orders)
    }

    pub fn is_solvable(&self) -> Result<bool> {
        Ok(*self.derived_series_orders()?.last().unwrap() == 1)
    }

    pub fn structure_flags(&self, p: u64) -> Result<StructureFlags> {
        Ok(StructureFlags {
            is_p_group: is_power_of(self.order, p as u128),
            is_solvable: self.is_solvable()?,
        })
    }

    pub fn is_abelian(&self) -> bool {
        self.gens
            .iter()
            .enumerate()
            .all(|(i, a)| self.gens[i + 1..].iter().all(|b| a.compose(b) == b.compose(a)))
    }

    /// `C_G(x)` via the stabilizer of `x` in the conjugation action.
    pub fn centralizer(&self, x: &Perm) -> Result<PermGroup> {
        self.require(x)?;
        let orbit = self.conjugacy_orbit(x)?;
        self.stabilizer_from_orbit(&orbit, x)
    }

    /// Stabilizer of the orbit's starting element; `seed` is a known member.
    pub(crate) fn stabilizer_from_orbit(&self, orbit: &ConjugacyOrbit, seed: &Perm) -> Result<PermGroup> {
        let target = self.order / orbit.len() as u128;
        if self.order % orbit.len() as u128 != 0 {
            return Err(Error::Internal("orbit size does not divide group order".into()));
        }
        let mut gens: Vec<Perm> = Vec::new();
        if !seed.is_identity() {
            gens.push(seed.clone());
        }
        let mut cur = PermGroup::with_caps(self.degree, gens.clone(), self.caps)?;
        if cur.order == target {
            return Ok(cur);
        }
        let n = orbit.len();
        let s = self.gens.len();
        let schreier = |i: usize, gi: usize| {
            let g = &self.gens[gi];
            let y = orbit.elements()[i].conj(g);
            let j = orbit.index_of(&y).expect("orbit closed under generators");
            orbit.transversal(i).compose(g).compose(&orbit.transversal(j).inverse())
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0xC3A7 ^ (n as u64) << 8);
        let mut misses = 0;
        while cur.order < target && misses < 64 {
            let sg = schreier(rng.gen_range(0..n), rng.gen_range(0..s));
            if cur.contains(&sg) {
                misses += 1;
                continue;
            }
            misses = 0;
            gens.push(sg);
            cur = PermGroup::with_caps(self.degree, gens.clone(), self.caps)?;
        }
        if cur.order < target {
            // exhaustive Schreier generators
            'all: for i in 0..n {
                for gi in 0..s {
                    let sg = schreier(i, gi);
                    if !cur.contains(&sg) {
                        gens.push(sg);
                        cur = PermGroup::with_caps(self.degree, gens.clone(), self.caps)?;
                        if cur.order == target {
                            break 'all;
                        }
                    }
                }
            }
        }
        if cur.order != target {
            return Err(Error::Internal(format!(
                "stabilizer order {} differs from orbit-stabilizer value {}",
                cur.order, target
            )));
        }
        Ok(cur)
    }

    /// Some `t` with `t⁻¹ x t = y`, by backtrack search; `None` when `x` and
    /// `y` are not conjugate.
    pub fn conjugating_element(&self, x: &Perm, y: &Perm) -> Result<Option<Perm>> {
        self.require(x)?;
        self.require(y)?;
        if x.cycle_type() != y.cycle_type() {
            return Ok(None);
        }
        if x == y {
            return Ok(Some(self.identity()));
        }
        let found = Transporter::new(self, x, y)?.search();
        if let Some(t) = &found {
            if &x.conj(t) != y || !self.contains(t) {
                return Err(Error::Internal("transporter failed verification".into()));
            }
        }
        Ok(found)
    }

    /// Same contract as [`PermGroup::conjugating_element`], by enumerating the
    /// class of `x`.
    pub fn conjugating_element_by_orbit(&self, x: &Perm, y: &Perm) -> Result<Option<Perm>> {
        self.require(x)?;
        self.require(y)?;
        if x.cycle_type() != y.cycle_type() {
            return Ok(None);
        }
        let orbit = self.conjugacy_orbit(x)?;
        Ok(orbit.index_of(y).map(|i| orbit.transversal(i)))
    }

    /// Rebuilds the chain with the given base prefix.
    pub fn rebased(&self, prefix: &[u32]) -> Result<PermGroup> {
        let g = PermGroup::with_base_prefix(self.degree, self.gens.clone(), prefix, self.caps)?;
        if g.order != self.order {
            return Err(Error::Internal("rebasing changed the group order".into()));
        }
        Ok(g)
    }

    /// Lower bound on the number of base points, for diagnostics.
    pub fn base_length_hint(&self) -> usize {
        isqrt(self.levels.len() as u128) as usize
    }
}

/// Backtrack search for an element conjugating `x` to `y`.
///
/// The base lists the points of `x` cycle by cycle (longest first), so after
/// the first point of a cycle is placed the rest of the cycle is forced:
/// `t` must send `b^x` to `(b^t)^y`.
struct Transporter<'a> {
    chain: PermGroup,
    x: &'a Perm,
    y: &'a Perm,
    base: Vec<u32>,
    /// For each base position, the position of its x-preimage when earlier.
    prev_in_cycle: Vec<Option<usize>>,
    x_len: Vec<u32>,
    y_len: Vec<u32>,
}

impl<'a> Transporter<'a> {
    fn new(group: &PermGroup, x: &'a Perm, y: &'a Perm) -> Result<Transporter<'a>> {
        let mut cycles: Vec<Vec<u32>> = Vec::new();
        let n = x.degree();
        let mut seen = vec![false; n];
        for start in 0..n as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut c = vec![start];
            seen[start as usize] = true;
            let mut j = x.image(start);
            while j != start {
                seen[j as usize] = true;
                c.push(j);
                j = x.image(j);
            }
            cycles.push(c);
        }
        cycles.sort_by(|a, b| b.len().cmp(&a.len()));
        let order: Vec<u32> = cycles.concat();
        let chain = group.rebased(&order)?;
        let base = chain.base();
        let mut pos = vec![usize::MAX; n];
        for (i, &b) in base.iter().enumerate() {
            pos[b as usize] = i;
        }
        let prev_in_cycle = base
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let pre = x.inverse().image(b);
                let p = pos[pre as usize];
                (p < i).then_some(p)
            })
            .collect();
        Ok(Transporter {
            x_len: x.cycle_lengths(),
            y_len: y.cycle_lengths(),
            chain,
            x,
            y,
            base,
            prev_in_cycle,
        })
    }

    fn search(&self) -> Option<Perm> {
        let id = self.chain.identity();
        let mut images = vec![0u32; self.base.len()];
        self.descend(0, &id, &mut images)
    }

    fn descend(&self, l: usize, partial: &Perm, images: &mut Vec<u32>) -> Option<Perm> {
        if l == self.base.len() {
            let t = partial.clone();
            return (self.x.conj(&t) == *self.y).then_some(t);
        }
        let level = &self.chain.levels[l];
        let b = self.base[l];
        let partial_inv = partial.inverse();
        let try_gamma = |gamma: u32, images: &mut Vec<u32>| -> Option<Perm> {
            let u = level.transversal[gamma as usize].as_ref()?;
            let next = u.compose(partial);
            let c = next.image(b);
            if self.x_len[b as usize] != self.y_len[c as usize] {
                return None;
            }
            images[l] = c;
            self.descend(l + 1, &next, images)
        };
        match self.prev_in_cycle[l] {
            Some(p) => {
                // forced: the image of b is the y-image of the image of b's preimage
                let c = self.y.image(images[p]);
                let gamma = partial_inv.image(c);
                try_gamma(gamma, images)
            }
            None => {
                for &gamma in &level.orbit {
                    if let Some(t) = try_gamma(gamma, images) {
                        return Some(t);
                    }
                }
                None
            }
        }
    }
}
