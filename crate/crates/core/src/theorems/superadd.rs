//! Superadditivity of sumset cardinalities over the integers, the marked-copy
//! witness, and the lattice-to-integer reduction for torsion-free groups.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::instance_digest;
use crate::algebra::{AmbientStructure, Element};
use crate::error::{Result, SumsetError};
use crate::report::InequalityReport;
use crate::set::FiniteSet;
use crate::sumset::{leave_one_out, sumset};

/// Constructive artifacts behind `(k-1)|S| >= (k-1)|S'| >= sum |S_i| - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperadditivityWitness {
    /// `A_i' = {min A_i, max A_i}`.
    pub endpoint_sets: Vec<FiniteSet>,
    /// `S_i'`: the full sumset with `A_i` replaced by `A_i'`.
    pub s_prime_parts: Vec<FiniteSet>,
    pub s_prime: FiniteSet,
    /// Marked elements of each of the `k - 1` copies of `S`, in original coordinates.
    pub marked: Vec<FiniteSet>,
    /// `max A_i - min A_i`.
    pub a_values: Vec<BigInt>,
    /// `sum |S_i| - 1`.
    pub target: BigInt,
}

impl SuperadditivityWitness {
    pub fn marked_count(&self) -> usize {
        self.marked.iter().map(FiniteSet::len).sum()
    }

    /// `(k-1)|S'| >= sum |S_i| - 1`, the sharper half of the chain.
    pub fn endpoint_report(&self, digest: &str) -> InequalityReport {
        let k = self.endpoint_sets.len();
        InequalityReport::at_least(
            "superadd-endpoint",
            BigInt::from((k - 1) * self.s_prime.len()),
            self.target.clone(),
            digest,
        )
    }
}

/// `{min A_i, max A_i}` for each integer set.
pub fn endpoint_sets(sets: &[FiniteSet]) -> Result<Vec<FiniteSet>> {
    sets.iter()
        .map(|s| {
            if *s.structure() != AmbientStructure::Integers {
                return Err(SumsetError::StructureMismatch(format!(
                    "endpoint sets need integer sets, got {}; reduce lattice sets first",
                    s.structure()
                )));
            }
            s.require_nonempty()?;
            let ends = vec![s.min().unwrap().clone(), s.max().unwrap().clone()];
            FiniteSet::new(AmbientStructure::Integers, ends)
        })
        .collect()
}

/// Checks superadditivity for `k >= 2` nonempty integer sets and builds the marked set.
///
/// The report compares `(k-1)|S|` with `sum |S_i| - 1`; the witness carries
/// `S'` and the marks, and the marking identities are asserted before returning.
pub fn verify_superadditivity(sets: &[FiniteSet]) -> Result<(InequalityReport, SuperadditivityWitness)> {
    let k = sets.len();
    if k < 2 {
        return Err(SumsetError::NeedTwoSummands);
    }
    let z = AmbientStructure::Integers;
    let endpoints = endpoint_sets(sets)?;
    let full = sumset(&z, sets)?;
    let leave: Vec<FiniteSet> = (0..k).map(|i| leave_one_out(&z, sets, i)).collect::<Result<_>>()?;
    let target: BigInt = BigInt::from(leave.iter().map(FiniteSet::len).sum::<usize>()) - 1;

    let mut s_prime_parts = Vec::with_capacity(k);
    for i in 0..k {
        let mut replaced = sets.to_vec();
        replaced[i] = endpoints[i].clone();
        s_prime_parts.push(sumset(&z, &replaced)?);
    }
    let s_prime = s_prime_parts
        .iter()
        .skip(1)
        .try_fold(s_prime_parts[0].clone(), |acc, p| acc.union(p))?;

    let marked = marked_copies(sets)?;
    let a_values = sets
        .iter()
        .map(|s| int_of(s.max().unwrap()) - int_of(s.min().unwrap()))
        .collect();
    let witness = SuperadditivityWitness {
        endpoint_sets: endpoints,
        s_prime_parts,
        s_prime,
        marked,
        a_values,
        target: target.clone(),
    };

    if BigInt::from(witness.marked_count()) != target {
        return Err(SumsetError::TheoremViolation(format!(
            "marked set has {} elements, expected {target}",
            witness.marked_count()
        )));
    }
    if let Some(x) = witness.marked.iter().flatten().find(|x| !witness.s_prime.contains(x)) {
        return Err(SumsetError::TheoremViolation(format!("marked element {x} outside S'")));
    }
    if !witness.s_prime.is_subset_of(&full) {
        return Err(SumsetError::TheoremViolation("S' is not contained in S".into()));
    }

    let digest = instance_digest(&z, sets);
    let report = InequalityReport::at_least("superadd", BigInt::from((k - 1) * full.len()), target, &digest);
    Ok((report, witness))
}

fn int_of(e: &Element) -> BigInt {
    e.as_int().expect("integer set").clone()
}

/// Marks `k - 1` copies of `S` after translating every minimum to 0.
///
/// With prefix sums `P_j = a_1 + ... + a_j`, copy `c` marks
/// `(S_{k-c+1})_{<= P_{k-c}}` and `a_{k-c} + (S_{k-c})_{> P_{k-c-1}}`.
fn marked_copies(sets: &[FiniteSet]) -> Result<Vec<FiniteSet>> {
    let k = sets.len();
    let z = AmbientStructure::Integers;
    let mins: Vec<BigInt> = sets.iter().map(|s| int_of(s.min().unwrap())).collect();
    let shift: BigInt = mins.iter().sum();
    let translated: Vec<FiniteSet> = sets
        .iter()
        .zip(&mins)
        .map(|(s, m)| FiniteSet::new(z.clone(), s.iter().map(|e| Element::Int(int_of(e) - m)).collect()))
        .collect::<Result<_>>()?;
    let a: Vec<BigInt> = translated.iter().map(|s| int_of(s.max().unwrap())).collect();
    let mut prefix = vec![BigInt::zero()];
    for ai in &a {
        let next = prefix.last().unwrap() + ai;
        prefix.push(next);
    }
    // leave[j] is S_{j+1} of the translated sets
    let leave: Vec<FiniteSet> = (0..k)
        .map(|i| leave_one_out(&z, &translated, i))
        .collect::<Result<_>>()?;

    let mut copies = Vec::with_capacity(k - 1);
    for c in 1..k {
        let head_cut = &prefix[k - c];
        let tail_cut = &prefix[k - c - 1];
        let lift = &a[k - c - 1];
        let mut marks = BTreeSet::new();
        for x in leave[k - c].iter().map(int_of).filter(|x| x <= head_cut) {
            marks.insert(Element::Int(x + &shift));
        }
        for x in leave[k - c - 1].iter().map(int_of).filter(|x| x > tail_cut) {
            marks.insert(Element::Int(x + lift + &shift));
        }
        copies.push(FiniteSet::new(z.clone(), marks.into_iter().collect())?);
    }
    Ok(copies)
}

/// `(z_1, ..., z_d) -> m z_1 + m^2 z_2 + ... + m^d z_d`.
pub fn phi_embedding(m: &BigInt, point: &[BigInt]) -> BigInt {
    let mut power = m.clone();
    let mut acc = BigInt::zero();
    for z in point {
        acc += z * &power;
        power *= m;
    }
    acc
}

/// Result of collapsing lattice sets to integer sets with an injective `phi_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionFreeReduction {
    pub m: BigInt,
    pub images: Vec<FiniteSet>,
    /// `phi_m^{-1}` of the endpoint sets of the images; at most two points each.
    pub endpoint_preimages: Vec<FiniteSet>,
    /// Number of distinct lattice points on which injectivity was checked.
    pub certified_points: usize,
}

/// Finds the first `m` in `1 + 2k·max|z|, doubled until injective` for which
/// `phi_m` is one-to-one on `S`, every `S_i`, and every `A_i`.
pub fn torsion_free_reduce(sets: &[FiniteSet]) -> Result<TorsionFreeReduction> {
    let structure = match sets.first().map(FiniteSet::structure) {
        Some(s @ AmbientStructure::Lattice(_)) => s.clone(),
        Some(other) => {
            return Err(SumsetError::StructureMismatch(format!(
                "torsion-free reduction needs lattice sets, got {other}"
            )))
        }
        None => return Err(SumsetError::EmptySet),
    };
    let k = sets.len();
    let full = sumset(&structure, sets)?;
    let mut points: BTreeSet<&Element> = full.iter().collect();
    let leave: Vec<FiniteSet> = if k >= 2 {
        (0..k)
            .map(|i| leave_one_out(&structure, sets, i))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    points.extend(leave.iter().flatten());
    points.extend(sets.iter().flatten());

    let max_abs = sets
        .iter()
        .flatten()
        .flat_map(|e| match e {
            Element::Vector(v) => v.iter().map(|c| c.abs()).collect::<Vec<_>>(),
            _ => unreachable!("lattice payload"),
        })
        .max()
        .unwrap_or_default();
    let mut m = BigInt::one() + BigInt::from(2 * k) * max_abs;
    fn coords(e: &Element) -> &[BigInt] {
        match e {
            Element::Vector(v) => v,
            _ => unreachable!("lattice payload"),
        }
    }
    for _ in 0..64 {
        let images: BTreeSet<BigInt> = points.iter().map(|p| phi_embedding(&m, coords(p))).collect();
        if images.len() == points.len() {
            let z = AmbientStructure::Integers;
            let mut image_sets = Vec::with_capacity(k);
            let mut preimages = Vec::with_capacity(k);
            for s in sets {
                let back: HashMap<BigInt, &Element> = s.iter().map(|e| (phi_embedding(&m, coords(e)), e)).collect();
                let img = FiniteSet::new(z.clone(), back.keys().cloned().map(Element::Int).collect())?;
                let ends = [img.min().unwrap(), img.max().unwrap()]
                    .iter()
                    .map(|e| (*back[e.as_int().unwrap()]).clone())
                    .collect();
                preimages.push(FiniteSet::new(structure.clone(), ends)?);
                image_sets.push(img);
            }
            return Ok(TorsionFreeReduction {
                m,
                images: image_sets,
                endpoint_preimages: preimages,
                certified_points: points.len(),
            });
        }
        m *= 2;
    }
    Err(SumsetError::TheoremViolation(
        "no injective phi_m found in schedule".into(),
    ))
}

/// Superadditivity for lattice sets: reduce to integers, verify, and
/// recompute `S'` in the lattice from the endpoint preimages.
pub fn verify_superadditivity_torsion_free(
    sets: &[FiniteSet],
) -> Result<(InequalityReport, TorsionFreeReduction, SuperadditivityWitness)> {
    if sets.len() < 2 {
        return Err(SumsetError::NeedTwoSummands);
    }
    for s in sets {
        s.require_nonempty()?;
    }
    let reduction = torsion_free_reduce(sets)?;
    let (_, witness) = verify_superadditivity(&reduction.images)?;
    let structure = sets[0].structure().clone();
    let k = sets.len();

    let full = sumset(&structure, sets)?;
    let total: usize = (0..k)
        .map(|i| leave_one_out(&structure, sets, i).map(|s| s.len()))
        .sum::<Result<usize>>()?;
    let mut s_prime = FiniteSet::empty(structure.clone());
    for i in 0..k {
        let mut replaced = sets.to_vec();
        replaced[i] = reduction.endpoint_preimages[i].clone();
        s_prime = s_prime.union(&sumset(&structure, &replaced)?)?;
    }
    if s_prime.len() != witness.s_prime.len() {
        return Err(SumsetError::TheoremViolation(format!(
            "lattice S' has {} elements but its image has {}",
            s_prime.len(),
            witness.s_prime.len()
        )));
    }
    let target = BigInt::from(total) - 1;
    if BigInt::from((k - 1) * s_prime.len()) < target || !s_prime.is_subset_of(&full) {
        return Err(SumsetError::TheoremViolation("torsion-free chain fails for S'".into()));
    }
    let report = InequalityReport::at_least(
        "superadd-tf",
        BigInt::from((k - 1) * full.len()),
        target,
        &instance_digest(&structure, sets),
    );
    Ok((report, reduction, witness))
}
