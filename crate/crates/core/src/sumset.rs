//! n-fold, leave-one-out, iterated, direct-power, and graph-restricted sumsets.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use crate::algebra::{AmbientStructure, Element};
use crate::engine::{BitWindow, DEFAULT_WINDOW};
use crate::error::{Result, SumsetError};
use crate::set::{AdditionGraph, FiniteSet};

/// Which integer sumset engine to use. Results never depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Bitset when the integer sums fit [`DEFAULT_WINDOW`], generic otherwise.
    #[default]
    Auto,
    Generic,
    /// Bitset; fails with a precondition error when the sums do not fit the window.
    Bitset,
}

/// `A_1 + ... + A_k`, composed left to right in list order.
pub fn sumset(structure: &AmbientStructure, sets: &[FiniteSet]) -> Result<FiniteSet> {
    sumset_with(Engine::Auto, structure, sets)
}

pub fn sumset_with(engine: Engine, structure: &AmbientStructure, sets: &[FiniteSet]) -> Result<FiniteSet> {
    check_summands(structure, sets)?;
    let window = match engine {
        Engine::Generic => None,
        Engine::Auto => integer_window(structure, sets, DEFAULT_WINDOW),
        Engine::Bitset => Some(
            integer_window(structure, sets, DEFAULT_WINDOW)
                .ok_or_else(|| SumsetError::Precondition("integer sums do not fit the bitset window".into()))?,
        ),
    };
    Ok(match window {
        Some(values) => bitset_sumset(&values),
        None => generic_sumset(structure, sets),
    })
}

/// Sumset of every summand except the one at 0-based position `index`.
///
/// The remaining summands keep their relative order.
pub fn leave_one_out(structure: &AmbientStructure, sets: &[FiniteSet], index: usize) -> Result<FiniteSet> {
    if sets.len() < 2 {
        return Err(SumsetError::NeedTwoSummands);
    }
    if index >= sets.len() {
        return Err(SumsetError::IndexOutOfRange { index, len: sets.len() });
    }
    let rest: Vec<FiniteSet> = sets
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != index)
        .map(|(_, s)| s.clone())
        .collect();
    sumset(structure, &rest)
}

/// `kA = A + ... + A` (k copies).
pub fn iterated_sum(structure: &AmbientStructure, a: &FiniteSet, k: usize) -> Result<FiniteSet> {
    if k == 0 {
        return Err(SumsetError::NonPositiveK);
    }
    sumset(structure, &vec![a.clone(); k])
}

/// `{A[i] ∘ B[j] : (i, j) an edge}`. May be empty.
pub fn restricted_pair_sumset(
    structure: &AmbientStructure,
    a: &FiniteSet,
    b: &FiniteSet,
    graph: &AdditionGraph,
) -> Result<FiniteSet> {
    check_member(structure, a)?;
    check_member(structure, b)?;
    if graph.left_size() != a.len() || graph.right_size() != b.len() {
        return Err(SumsetError::DimensionMismatch(format!(
            "graph is {} x {}, sets have sizes {} and {}",
            graph.left_size(),
            graph.right_size(),
            a.len(),
            b.len()
        )));
    }
    let sums: BTreeSet<Element> = graph
        .edges()
        .iter()
        .map(|&(i, j)| structure.compose_unchecked(&a.elements()[i], &b.elements()[j]))
        .collect();
    Ok(FiniteSet::from_sorted_unchecked(
        structure.clone(),
        sums.into_iter().collect(),
    ))
}

/// `{a_1 + a_2 + a_3 : every pair among the three is an edge}` for a symmetric self-graph on `A`.
///
/// Repeated vertices are only possible through loop edges.
pub fn graph_triple_sumset(a: &FiniteSet, graph: &AdditionGraph) -> Result<FiniteSet> {
    if !graph.is_symmetric() {
        return Err(SumsetError::NonSymmetricGraph(
            "triple sumsets need an undirected self-graph".into(),
        ));
    }
    if graph.left_size() != a.len() {
        return Err(SumsetError::DimensionMismatch(format!(
            "graph on {} vertices, set of size {}",
            graph.left_size(),
            a.len()
        )));
    }
    let structure = a.structure();
    let elems = a.elements();
    let mut sums = BTreeSet::new();
    for i in 0..elems.len() {
        for j in graph.neighbours(i) {
            let partial = structure.compose_unchecked(&elems[i], &elems[j]);
            for l in graph.neighbours(j) {
                if graph.has_edge(i, l) {
                    sums.insert(structure.compose_unchecked(&partial, &elems[l]));
                }
            }
        }
    }
    Ok(FiniteSet::from_sorted_unchecked(
        structure.clone(),
        sums.into_iter().collect(),
    ))
}

/// The k-fold Cartesian power `X^k` inside `DirectPower(structure, k)`.
pub fn direct_power(structure: &AmbientStructure, x: &FiniteSet, k: usize) -> Result<FiniteSet> {
    if k == 0 {
        return Err(SumsetError::NonPositiveK);
    }
    check_member(structure, x)?;
    x.require_nonempty()?;
    let mut tuples: Vec<Vec<Element>> = vec![Vec::new()];
    for _ in 0..k {
        tuples = tuples
            .into_iter()
            .flat_map(|prefix| {
                x.iter().map(move |e| {
                    let mut t = prefix.clone();
                    t.push(e.clone());
                    t
                })
            })
            .collect();
    }
    // lexicographic generation over a sorted base is already canonical
    Ok(FiniteSet::from_sorted_unchecked(
        AmbientStructure::power(structure.clone(), k),
        tuples.into_iter().map(Element::Tuple).collect(),
    ))
}

pub(crate) fn check_member(structure: &AmbientStructure, set: &FiniteSet) -> Result<()> {
    if set.structure() != structure {
        return Err(SumsetError::StructureMismatch(format!(
            "set over {} used in {}",
            set.structure(),
            structure
        )));
    }
    Ok(())
}

pub(crate) fn check_summands(structure: &AmbientStructure, sets: &[FiniteSet]) -> Result<()> {
    if sets.is_empty() {
        return Err(SumsetError::EmptySet);
    }
    for s in sets {
        check_member(structure, s)?;
        s.require_nonempty()?;
    }
    Ok(())
}

/// Integer payloads as `i64` when every partial sum stays inside `window`.
fn integer_window(structure: &AmbientStructure, sets: &[FiniteSet], window: u64) -> Option<Vec<Vec<i64>>> {
    if *structure != AmbientStructure::Integers {
        return None;
    }
    let mut span: u64 = 1;
    let mut lo_total: i64 = 0;
    let mut out = Vec::with_capacity(sets.len());
    for s in sets {
        let vals: Vec<i64> = s
            .iter()
            .map(|e| e.as_int().and_then(|v| v.to_i64()))
            .collect::<Option<_>>()?;
        let lo = *vals.first()?;
        let hi = *vals.last()?;
        span = span.checked_add(hi.checked_sub(lo)? as u64)?;
        lo_total = lo_total.checked_add(lo)?;
        out.push(vals);
    }
    // the window must also keep absolute values well inside i64
    let hi_total = lo_total.checked_add(i64::try_from(span).ok()?)?;
    (span <= window && hi_total.checked_abs().is_some()).then_some(out)
}

fn bitset_sumset(values: &[Vec<i64>]) -> FiniteSet {
    let mut windows = values.iter().map(|v| BitWindow::from_values(v).expect("nonempty"));
    let first = windows.next().expect("at least one summand");
    let total = windows.fold(first, |acc, w| acc.sum(&w));
    FiniteSet::from_sorted_unchecked(AmbientStructure::Integers, total.values().map(Element::int).collect())
}

fn generic_sumset(structure: &AmbientStructure, sets: &[FiniteSet]) -> FiniteSet {
    let mut acc: Vec<Element> = sets[0].elements().to_vec();
    for s in &sets[1..] {
        acc = pair_sum(structure, &acc, s.elements());
    }
    FiniteSet::from_sorted_unchecked(structure.clone(), acc)
}

pub(crate) fn pair_sum(structure: &AmbientStructure, a: &[Element], b: &[Element]) -> Vec<Element> {
    let mut out: Vec<Element> = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| structure.compose_unchecked(x, y)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
