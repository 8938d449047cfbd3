//! Permutations of `{0, …, n−1}` acting on the right.
//!
//! `a * b` applies `a` first, then `b`; the conjugate `x^g` is `g⁻¹ x g`.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::arith::lcm;
use crate::error::{Error, Result};

/// A permutation stored as its image array: point `i` maps to `images[i]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Perm {
    images: Vec<u32>,
}

impl TryFrom<Vec<u32>> for Perm {
    type Error = Error;

    fn try_from(images: Vec<u32>) -> Result<Self> {
        Perm::from_images(images)
    }
}

impl From<Perm> for Vec<u32> {
    fn from(p: Perm) -> Self {
        p.images
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm {
            images: (0..n as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::InvalidPerm(format!("{images:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation of degree `n` from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Perm> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut touched = vec![false; n];
        for c in cycles {
            for (i, &a) in c.iter().enumerate() {
                let b = c[(i + 1) % c.len()];
                if a as usize >= n || b as usize >= n || touched[a as usize] {
                    return Err(Error::InvalidPerm(format!("bad cycle {c:?} for degree {n}")));
                }
                touched[a as usize] = true;
                images[a as usize] = b;
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn image(&self, i: u32) -> u32 {
        self.images[i as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &j)| *i as u32 != j)
            .map(|(i, _)| i as u32)
    }

    pub fn fixes(&self, i: u32) -> bool {
        self.image(i) == i
    }

    pub fn num_fixed(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, &j)| *i as u32 == j).count()
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm { images: inv }
    }

    /// `self` then `other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self.images.iter().map(|&i| other.images[i as usize]).collect(),
        }
    }

    pub fn pow(&self, e: i64) -> Perm {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Perm::identity(self.degree());
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&b);
            }
            b = b.compose(&b);
            e >>= 1;
        }
        acc
    }

    /// `g⁻¹ · self · g`.
    pub fn conj(&self, g: &Perm) -> Perm {
        // point g(i) goes to g(self(i))
        let mut out = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            out[g.images[i] as usize] = g.images[j as usize];
        }
        Perm { images: out }
    }

    /// `a⁻¹ b⁻¹ a b`.
    pub fn commutator(a: &Perm, b: &Perm) -> Perm {
        a.inverse().compose(&b.inverse()).compose(a).compose(b)
    }

    /// Nontrivial cycles, each starting at its least point, sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut c = vec![start as u32];
            seen[start] = true;
            let mut j = self.images[start] as usize;
            while j != start {
                seen[j] = true;
                c.push(j as u32);
                j = self.images[j] as usize;
            }
            if c.len() > 1 {
                out.push(c);
            }
        }
        out
    }

    /// Multiset of cycle lengths (fixed points included), decreasing.
    pub fn cycle_type(&self) -> Vec<u32> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                len += 1;
                j = self.images[j] as usize;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// Length of the cycle through every point.
    pub fn cycle_lengths(&self) -> Vec<u32> {
        let n = self.images.len();
        let mut len = vec![0; n];
        for start in 0..n {
            if len[start] != 0 {
                continue;
            }
            let mut members = vec![start];
            let mut j = self.images[start] as usize;
            while j != start {
                members.push(j);
                j = self.images[j] as usize;
            }
            let l = members.len() as u32;
            for m in members {
                len[m] = l;
            }
        }
        len
    }

    /// Element order, saturating at `u64::MAX` for absurd degrees.
    pub fn order(&self) -> u64 {
        let o = self
            .cycle_type()
            .into_iter()
            .fold(1u128, |acc, l| lcm(acc, l as u128).min(u64::MAX as u128));
        o as u64
    }

    pub fn is_even(&self) -> bool {
        let transpositions: u32 = self.cycle_type().iter().map(|l| l - 1).sum();
        transpositions % 2 == 0
    }
}

impl Mul for &Perm {
    type Output = Perm;

    fn mul(self, rhs: &Perm) -> Perm {
        self.compose(rhs)
    }
}

impl Mul for Perm {
    type Output = Perm;

    fn mul(self, rhs: Perm) -> Perm {
        self.compose(&rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_perm(n: usize) -> impl Strategy<Value = Perm> {
        Just((0..n as u32).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Perm::from_images(v).unwrap())
    }

    #[test]
    fn right_action_convention() {
        let a = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
        let b = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        // 0 -a-> 1 -b-> 2
        assert_eq!((&a * &b).image(0), 2);
        assert_eq!(a.conj(&b), b.inverse().compose(&a).compose(&b));
        assert_eq!(format!("{:?}", &a * &b), "(0 2 1)");
    }

    #[test]
    fn cycle_data() {
        let x = Perm::from_cycles(7, &[&[0, 1, 2], &[3, 4]]).unwrap();
        assert_eq!(x.cycle_type(), vec![3, 2, 1, 1]);
        assert_eq!(x.order(), 6);
        assert_eq!(x.num_fixed(), 2);
        assert!(!x.is_even());
        assert_eq!(x.first_moved(), Some(0));
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert!(Perm::from_cycles(3, &[&[0, 1], &[1, 2]]).is_err());
    }

    #[test]
    fn serde_roundtrip_validates() {
        let x = Perm::from_cycles(4, &[&[0, 3]]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "[3,1,2,0]");
        let back: Perm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<Perm>("[1,1]").is_err());
    }

    proptest! {
        #[test]
        fn group_laws(a in arb_perm(9), b in arb_perm(9), c in arb_perm(9)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert!((&a * &a.inverse()).is_identity());
            prop_assert_eq!(a.conj(&b).cycle_type(), a.cycle_type());
            prop_assert!(a.pow(a.order() as i64).is_identity());
            prop_assert_eq!(a.pow(-3), a.inverse().pow(3));
        }
    }
}
