//! Submultiplicativity `|S|^{k-1} <= prod |S_i|`, the lexicographically
//! minimal decomposition map behind it, and the projection lemma.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;

use super::instance_digest;
use crate::algebra::{AmbientStructure, Element};
use crate::error::{Result, SumsetError};
use crate::report::InequalityReport;
use crate::set::FiniteSet;
use crate::sumset::{check_summands, leave_one_out, sumset};

/// The map sending every `s in S` to its lexicographically smallest index tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct LexDecomposition {
    /// `S` in canonical order.
    pub sums: Vec<Element>,
    /// `tuples[n]` decomposes `sums[n]`; 0-based positions into each summand's canonical order.
    pub tuples: Vec<Vec<usize>>,
    /// The summands, whose canonical order fixes the indices.
    pub element_orders: Vec<FiniteSet>,
}

impl LexDecomposition {
    pub fn tuple_for(&self, s: &Element) -> Option<&[usize]> {
        self.sums.binary_search(s).ok().map(|n| self.tuples[n].as_slice())
    }

    /// The image `B` of the map as a set of index tuples.
    pub fn b_set(&self) -> BTreeSet<&[usize]> {
        self.tuples.iter().map(Vec::as_slice).collect()
    }
}

fn require_commutative(structure: &AmbientStructure, what: &str) -> Result<()> {
    if structure.is_commutative() {
        Ok(())
    } else {
        Err(SumsetError::NotCommutative(format!(
            "{what} defined for commutative structures only"
        )))
    }
}

/// Builds the lex-min decomposition map and re-checks its invariants.
///
/// Groups use suffix-sumset membership: at each position the smallest index
/// whose remainder still lies in the sum of the later summands is taken.
/// Semigroups without inverses enumerate every index tuple.
pub fn lex_min_decomposition(structure: &AmbientStructure, sets: &[FiniteSet]) -> Result<LexDecomposition> {
    require_commutative(structure, "lex decomposition")?;
    if sets.len() < 2 {
        return Err(SumsetError::NeedTwoSummands);
    }
    check_summands(structure, sets)?;
    let decomposition = if structure.is_group() {
        greedy_decomposition(structure, sets)?
    } else {
        enumerated_decomposition(structure, sets)
    };
    check_lex_invariants(structure, &decomposition)?;
    Ok(decomposition)
}

fn greedy_decomposition(structure: &AmbientStructure, sets: &[FiniteSet]) -> Result<LexDecomposition> {
    let k = sets.len();
    // suffix[j] = A_j + ... + A_{k-1}
    let mut suffix: Vec<FiniteSet> = vec![sets[k - 1].clone()];
    for j in (0..k - 1).rev() {
        let next = sumset(structure, &[sets[j].clone(), suffix.last().unwrap().clone()])?;
        suffix.push(next);
    }
    suffix.reverse();
    let full = suffix[0].clone();
    let mut tuples = Vec::with_capacity(full.len());
    for s in full.iter() {
        let mut rest = s.clone();
        let mut tuple = Vec::with_capacity(k);
        for j in 0..k {
            let pick = if j == k - 1 {
                sets[j].index_of(&rest)
            } else {
                sets[j].iter().position(|c| {
                    let diff = difference(structure, &rest, c);
                    suffix[j + 1].contains(&diff)
                })
            };
            let i =
                pick.ok_or_else(|| SumsetError::TheoremViolation(format!("{s} has no decomposition at position {j}")))?;
            rest = difference(structure, &rest, &sets[j].elements()[i]);
            tuple.push(i);
        }
        tuples.push(tuple);
    }
    Ok(LexDecomposition {
        sums: full.into_elements(),
        tuples,
        element_orders: sets.to_vec(),
    })
}

fn difference(structure: &AmbientStructure, x: &Element, y: &Element) -> Element {
    let inv = structure.inverse_unchecked(y).expect("group element");
    structure.compose_unchecked(x, &inv)
}

fn enumerated_decomposition(structure: &AmbientStructure, sets: &[FiniteSet]) -> LexDecomposition {
    let mut best: BTreeMap<Element, Vec<usize>> = BTreeMap::new();
    for tuple in index_tuples(sets) {
        let sum = tuple_sum(structure, sets, &tuple, None);
        // lexicographic enumeration: the first tuple seen for a sum is minimal
        best.entry(sum).or_insert(tuple);
    }
    let (sums, tuples) = best.into_iter().unzip();
    LexDecomposition {
        sums,
        tuples,
        element_orders: sets.to_vec(),
    }
}

/// Every index tuple in lexicographic order.
pub(crate) fn index_tuples(sets: &[FiniteSet]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let sizes: Vec<usize> = sets.iter().map(FiniteSet::len).collect();
    let mut next = if sizes.iter().all(|&n| n > 0) {
        Some(vec![0; sizes.len()])
    } else {
        None
    };
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        for pos in (0..succ.len()).rev() {
            succ[pos] += 1;
            if succ[pos] < sizes[pos] {
                next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(current)
    })
}

/// Sum of the chosen elements, optionally skipping one coordinate.
fn tuple_sum(structure: &AmbientStructure, sets: &[FiniteSet], tuple: &[usize], skip: Option<usize>) -> Element {
    let mut acc: Option<Element> = None;
    for (j, &i) in tuple.iter().enumerate() {
        if Some(j) == skip {
            continue;
        }
        let e = &sets[j].elements()[i];
        acc = Some(match acc {
            None => e.clone(),
            Some(a) => structure.compose_unchecked(&a, e),
        });
    }
    acc.expect("at least one coordinate remains")
}

/// `|B| = |S|`, every tuple sums to its element, and in every coordinate
/// projection distinct tuples have distinct coordinate sums.
pub fn check_lex_invariants(structure: &AmbientStructure, d: &LexDecomposition) -> Result<()> {
    let sets = &d.element_orders;
    if d.b_set().len() != d.sums.len() {
        return Err(SumsetError::TheoremViolation(format!(
            "|B| = {} but |S| = {}",
            d.b_set().len(),
            d.sums.len()
        )));
    }
    for (s, t) in d.sums.iter().zip(&d.tuples) {
        if tuple_sum(structure, sets, t, None) != *s {
            return Err(SumsetError::TheoremViolation(format!(
                "tuple {t:?} does not sum to {s}"
            )));
        }
    }
    for j in 0..sets.len() {
        let mut seen: HashMap<Element, Vec<usize>> = HashMap::new();
        let projected: BTreeSet<Vec<usize>> = d
            .tuples
            .iter()
            .map(|t| t.iter().enumerate().filter(|&(p, _)| p != j).map(|(_, &i)| i).collect())
            .collect();
        for p in projected {
            let mut full = p.clone();
            full.insert(j, 0);
            let sum = tuple_sum(structure, sets, &full, Some(j));
            if let Some(other) = seen.insert(sum.clone(), p.clone()) {
                return Err(SumsetError::TheoremViolation(format!(
                    "projection {j}: tuples {other:?} and {p:?} share the sum {sum}"
                )));
            }
        }
    }
    Ok(())
}

/// `|S|^{k-1} <= prod |S_i|` in exact integers.
pub fn verify_submultiplicativity(structure: &AmbientStructure, sets: &[FiniteSet]) -> Result<InequalityReport> {
    require_commutative(structure, "submultiplicativity")?;
    let k = sets.len();
    if k < 2 {
        return Err(SumsetError::NeedTwoSummands);
    }
    let full = sumset(structure, sets)?;
    let mut rhs = BigInt::from(1);
    for i in 0..k {
        rhs *= leave_one_out(structure, sets, i)?.len();
    }
    let lhs = BigInt::from(full.len()).pow(k as u32 - 1);
    Ok(InequalityReport::at_most(
        "submult",
        lhs,
        rhs,
        &instance_digest(structure, sets),
    ))
}

/// `|B|` and the sizes of its `d` coordinate-deleting projections.
pub fn projection_sizes<T: Ord + Clone>(tuples: &[Vec<T>]) -> Result<(usize, Vec<usize>)> {
    let d = tuples.first().ok_or(SumsetError::EmptySet)?.len();
    if tuples.iter().any(|t| t.len() != d) {
        return Err(SumsetError::Precondition("all tuples must have the same arity".into()));
    }
    if d < 2 {
        return Err(SumsetError::Precondition("projection lemma needs arity d >= 2".into()));
    }
    let b: BTreeSet<&Vec<T>> = tuples.iter().collect();
    let sizes = (0..d)
        .map(|i| {
            b.iter()
                .map(|t| {
                    let mut p = (*t).clone();
                    p.remove(i);
                    p
                })
                .collect::<BTreeSet<_>>()
                .len()
        })
        .collect();
    Ok((b.len(), sizes))
}

/// `|B|^{d-1} <= prod |B_i|` for a finite set of lattice points `B` in `Z^d`.
pub fn verify_projection_lemma(b: &FiniteSet) -> Result<InequalityReport> {
    let tuples: Vec<Vec<BigInt>> = b
        .iter()
        .map(|e| match e {
            Element::Vector(v) => Ok(v.clone()),
            other => Err(SumsetError::StructureMismatch(format!(
                "projection lemma needs lattice points, got {other}"
            ))),
        })
        .collect::<Result<_>>()?;
    let (size, projections) = projection_sizes(&tuples)?;
    let d = projections.len();
    let rhs: BigInt = projections.iter().map(|&n| BigInt::from(n)).product();
    Ok(InequalityReport::at_most(
        "projection",
        BigInt::from(size).pow(d as u32 - 1),
        rhs,
        &instance_digest(b.structure(), std::slice::from_ref(b)),
    ))
}
