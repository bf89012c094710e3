//! Ambient algebraic structures, their elements, and composition laws.
//!
//! Every element carries a payload matching exactly one structure. All
//! operations validate membership first, so elements of different
//! structures never meet inside a composition.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SumsetError};

pub const MAX_PERMUTATION_DEGREE: usize = 8;
pub const MAX_UNIVERSE: usize = 16;

/// The algebraic context a finite set lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AmbientStructure {
    #[serde(rename = "Z")]
    Integers,
    /// Integer lattice of the given dimension.
    #[serde(rename = "Zd")]
    Lattice(usize),
    /// Integers modulo `n`.
    #[serde(rename = "Zmod")]
    Residues(u64),
    /// Symmetric group on `{1..degree}` under function composition.
    #[serde(rename = "Sym")]
    Permutations(usize),
    /// Subsets of a `u`-element universe under intersection.
    #[serde(rename = "Intersect")]
    IntersectionSemigroup(usize),
    /// `k`-fold direct power with componentwise composition.
    #[serde(rename = "Power")]
    DirectPower { base: Box<AmbientStructure>, k: usize },
}

impl AmbientStructure {
    pub fn power(base: AmbientStructure, k: usize) -> Self {
        AmbientStructure::DirectPower {
            base: Box::new(base),
            k,
        }
    }

    /// Checks the parameter ranges of this structure (recursively for powers).
    pub fn validate(&self) -> Result<()> {
        use AmbientStructure::*;
        match self {
            Integers => Ok(()),
            Lattice(d) if *d >= 1 => Ok(()),
            Lattice(_) => Err(SumsetError::InvalidStructure("lattice dimension must be >= 1".into())),
            Residues(n) if *n >= 1 => Ok(()),
            Residues(_) => Err(SumsetError::InvalidStructure("modulus must be >= 1".into())),
            Permutations(n) if (1..=MAX_PERMUTATION_DEGREE).contains(n) => Ok(()),
            Permutations(n) => Err(SumsetError::InvalidStructure(format!(
                "permutation degree {n} outside 1..={MAX_PERMUTATION_DEGREE}"
            ))),
            IntersectionSemigroup(u) if (1..=MAX_UNIVERSE).contains(u) => Ok(()),
            IntersectionSemigroup(u) => Err(SumsetError::InvalidStructure(format!(
                "universe size {u} outside 1..={MAX_UNIVERSE}"
            ))),
            DirectPower { k: 0, .. } => Err(SumsetError::InvalidStructure("direct power needs k >= 1".into())),
            DirectPower { base, .. } => base.validate(),
        }
    }

    pub fn is_commutative(&self) -> bool {
        match self {
            AmbientStructure::Permutations(n) => *n < 3,
            AmbientStructure::DirectPower { base, .. } => base.is_commutative(),
            _ => true,
        }
    }

    /// True when every element has an inverse, so differences are defined.
    pub fn is_group(&self) -> bool {
        match self {
            AmbientStructure::IntersectionSemigroup(_) => false,
            AmbientStructure::DirectPower { base, .. } => base.is_group(),
            _ => true,
        }
    }

    pub fn contains(&self, x: &Element) -> bool {
        use AmbientStructure::*;
        match (self, x) {
            (Integers, Element::Int(_)) => true,
            (Lattice(d), Element::Vector(v)) => v.len() == *d,
            (Residues(n), Element::Residue(r)) => r < n,
            (Permutations(n), Element::Perm(p)) => p.degree() == *n,
            (IntersectionSemigroup(u), Element::Subset(m)) => (*m as u32) >> *u == 0,
            (DirectPower { base, k }, Element::Tuple(t)) => t.len() == *k && t.iter().all(|c| base.contains(c)),
            _ => false,
        }
    }

    pub fn check(&self, x: &Element) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(SumsetError::StructureMismatch(format!(
                "{x} is not an element of {self}"
            )))
        }
    }

    /// Composes `x` then `y` in the structure's law. For permutations this is
    /// function composition `x ∘ y`, i.e. `y` is applied first.
    pub fn compose(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.compose_unchecked(x, y))
    }

    /// Composition without membership checks; callers guarantee membership.
    pub(crate) fn compose_unchecked(&self, x: &Element, y: &Element) -> Element {
        use AmbientStructure::*;
        match (self, x, y) {
            (Integers, Element::Int(a), Element::Int(b)) => Element::Int(a + b),
            (Lattice(_), Element::Vector(a), Element::Vector(b)) => {
                Element::Vector(a.iter().zip(b).map(|(p, q)| p + q).collect())
            }
            (Residues(n), Element::Residue(a), Element::Residue(b)) => {
                Element::Residue(((*a as u128 + *b as u128) % *n as u128) as u64)
            }
            (Permutations(_), Element::Perm(a), Element::Perm(b)) => Element::Perm(a.compose(b)),
            (IntersectionSemigroup(_), Element::Subset(a), Element::Subset(b)) => Element::Subset(a & b),
            (DirectPower { base, .. }, Element::Tuple(a), Element::Tuple(b)) => {
                Element::Tuple(a.iter().zip(b).map(|(p, q)| base.compose_unchecked(p, q)).collect())
            }
            _ => unreachable!("compose_unchecked called with mismatched payloads"),
        }
    }

    /// Inverse element, when the structure is a group.
    pub fn inverse(&self, x: &Element) -> Result<Option<Element>> {
        self.check(x)?;
        Ok(self.inverse_unchecked(x))
    }

    pub(crate) fn inverse_unchecked(&self, x: &Element) -> Option<Element> {
        use AmbientStructure::*;
        match (self, x) {
            (Integers, Element::Int(a)) => Some(Element::Int(-a)),
            (Lattice(_), Element::Vector(v)) => Some(Element::Vector(v.iter().map(|c| -c).collect())),
            (Residues(n), Element::Residue(a)) => Some(Element::Residue((n - a) % n)),
            (Permutations(_), Element::Perm(p)) => Some(Element::Perm(p.inverse())),
            (IntersectionSemigroup(_), _) => None,
            (DirectPower { base, .. }, Element::Tuple(t)) => t
                .iter()
                .map(|c| base.inverse_unchecked(c))
                .collect::<Option<Vec<_>>>()
                .map(Element::Tuple),
            _ => None,
        }
    }

    /// Sorts `xs` into the canonical total order of this structure.
    ///
    /// Integers and residues sort numerically, lattice points and tuples
    /// lexicographically by coordinate, permutations lexicographically in
    /// one-line notation, subsets by bitmask value. Duplicates are kept.
    pub fn canonical_order(&self, xs: &[Element]) -> Result<Vec<Element>> {
        for x in xs {
            self.check(x)?;
        }
        let mut out = xs.to_vec();
        out.sort();
        Ok(out)
    }

    /// Number of elements, for finite structures small enough to count in `u64`.
    pub fn cardinality(&self) -> Option<u64> {
        use AmbientStructure::*;
        match self {
            Integers | Lattice(_) => None,
            Residues(n) => Some(*n),
            Permutations(n) => Some((1..=*n as u64).product()),
            IntersectionSemigroup(u) => Some(1u64 << u),
            DirectPower { base, k } => base.cardinality()?.checked_pow(*k as u32),
        }
    }

    /// All elements in canonical order. `None` for infinite structures or
    /// when there are more than `cap` elements.
    pub fn all_elements(&self, cap: u64) -> Option<Vec<Element>> {
        use AmbientStructure::*;
        if self.cardinality()? > cap {
            return None;
        }
        let out = match self {
            Integers | Lattice(_) => return None,
            Residues(n) => (0..*n).map(Element::Residue).collect(),
            Permutations(n) => Permutation::all(*n).into_iter().map(Element::Perm).collect(),
            IntersectionSemigroup(u) => (0..(1u32 << u)).map(|m| Element::Subset(m as u16)).collect(),
            DirectPower { base, k } => {
                let base_elems = base.all_elements(cap)?;
                let mut acc: Vec<Vec<Element>> = vec![Vec::new()];
                for _ in 0..*k {
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix| {
                            base_elems.iter().map(move |e| {
                                let mut t = prefix.clone();
                                t.push(e.clone());
                                t
                            })
                        })
                        .collect();
                }
                acc.into_iter().map(Element::Tuple).collect()
            }
        };
        Some(out)
    }
}

impl fmt::Display for AmbientStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AmbientStructure::*;
        match self {
            Integers => write!(f, "Z"),
            Lattice(d) => write!(f, "Z^{d}"),
            Residues(n) => write!(f, "Z/{n}Z"),
            Permutations(n) => write!(f, "S_{n}"),
            IntersectionSemigroup(u) => write!(f, "(2^[{u}], ∩)"),
            DirectPower { base, k } => write!(f, "({base})^{k}"),
        }
    }
}

/// A bijection on `{0..degree}`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation((0..degree as u8).collect())
    }

    /// Builds a permutation from 1-based one-line notation, e.g. `[2, 3, 1]`.
    pub fn from_one_line(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n == 0 || n > MAX_PERMUTATION_DEGREE {
            return Err(SumsetError::InvalidElement(format!("permutation of degree {n}")));
        }
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &img in images {
            if img == 0 || img > n || seen[img - 1] {
                return Err(SumsetError::InvalidElement(format!(
                    "{images:?} is not a bijection on 1..={n}"
                )));
            }
            seen[img - 1] = true;
            out.push((img - 1) as u8);
        }
        Ok(Permutation(out))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// 1-based one-line notation.
    pub fn one_line(&self) -> Vec<usize> {
        self.0.iter().map(|&i| i as usize + 1).collect()
    }

    /// `self ∘ other`: apply `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut r = vec![0u8; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            r[p as usize] = i as u8;
        }
        Permutation(r)
    }

    /// Every permutation of the given degree in lexicographic one-line order.
    pub fn all(degree: usize) -> Vec<Permutation> {
        let mut cur: Vec<u8> = (0..degree as u8).collect();
        let mut out = vec![Permutation(cur.clone())];
        // next_permutation
        while let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) {
            let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
            out.push(Permutation(cur.clone()));
        }
        out
    }
}

/// An element of some [`AmbientStructure`].
///
/// The derived ordering is the canonical order within each structure.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Int(BigInt),
    Vector(Vec<BigInt>),
    Residue(u64),
    Perm(Permutation),
    /// Bitmask; bit `j` stands for universe member `j + 1`.
    Subset(u16),
    Tuple(Vec<Element>),
}

impl Element {
    pub fn int(v: i64) -> Self {
        Element::Int(BigInt::from(v))
    }

    pub fn vector(coords: &[i64]) -> Self {
        Element::Vector(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Subset of a universe given by 1-based members.
    pub fn subset(members: &[usize]) -> Self {
        Element::Subset(members.iter().fold(0u16, |m, &j| m | (1 << (j - 1))))
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Element::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_zero_int(&self) -> bool {
        matches!(self, Element::Int(v) if v.is_zero())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Int(v) => write!(f, "{v}"),
            Element::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            Element::Residue(r) => write!(f, "{r}"),
            Element::Perm(p) => {
                let parts: Vec<String> = p.one_line().iter().map(|c| c.to_string()).collect();
                write!(f, "[{}]", parts.join(" "))
            }
            Element::Subset(m) => {
                let members: Vec<String> = (0..16)
                    .filter(|j| m >> j & 1 == 1)
                    .map(|j| (j + 1).to_string())
                    .collect();
                write!(f, "{{{}}}", members.join(","))
            }
            Element::Tuple(t) => {
                let parts: Vec<String> = t.iter().map(|c| c.to_string()).collect();
                write!(f, "<{}>", parts.join(", "))
            }
        }
    }
}
