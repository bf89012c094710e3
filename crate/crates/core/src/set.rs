//! Finite sets of structure elements and addition graphs between them.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::algebra::{AmbientStructure, Element};
use crate::error::{Result, SumsetError};

/// A deduplicated, canonically ordered finite set of elements of one structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteSet {
    structure: AmbientStructure,
    elements: Vec<Element>,
}

impl FiniteSet {
    pub fn new(structure: AmbientStructure, elements: Vec<Element>) -> Result<Self> {
        let mut elements = structure.canonical_order(&elements)?;
        elements.dedup();
        Ok(FiniteSet { structure, elements })
    }

    /// Builds a set from elements already known to be sorted, unique, and members.
    pub(crate) fn from_sorted_unchecked(structure: AmbientStructure, elements: Vec<Element>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        FiniteSet { structure, elements }
    }

    pub fn empty(structure: AmbientStructure) -> Self {
        FiniteSet {
            structure,
            elements: Vec::new(),
        }
    }

    pub fn integers(values: &[i64]) -> Self {
        let mut elements: Vec<Element> = values.iter().map(|&v| Element::int(v)).collect();
        elements.sort();
        elements.dedup();
        FiniteSet {
            structure: AmbientStructure::Integers,
            elements,
        }
    }

    pub fn residues(modulus: u64, values: &[u64]) -> Result<Self> {
        AmbientStructure::Residues(modulus).validate()?;
        FiniteSet::new(
            AmbientStructure::Residues(modulus),
            values.iter().map(|&v| Element::Residue(v % modulus)).collect(),
        )
    }

    pub fn lattice(dim: usize, points: &[&[i64]]) -> Result<Self> {
        FiniteSet::new(
            AmbientStructure::Lattice(dim),
            points.iter().map(|p| Element::vector(p)).collect(),
        )
    }

    pub fn structure(&self) -> &AmbientStructure {
        &self.structure
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<Element> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Element> {
        self.elements.iter()
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// 0-based position of `x` in canonical order.
    pub fn index_of(&self, x: &Element) -> Option<usize> {
        self.elements.binary_search(x).ok()
    }

    pub fn is_subset_of(&self, other: &FiniteSet) -> bool {
        self.structure == other.structure && self.elements.iter().all(|x| other.contains(x))
    }

    pub fn min(&self) -> Option<&Element> {
        self.elements.first()
    }

    pub fn max(&self) -> Option<&Element> {
        self.elements.last()
    }

    pub fn union(&self, other: &FiniteSet) -> Result<FiniteSet> {
        self.same_structure(other)?;
        let merged: BTreeSet<Element> = self.elements.iter().chain(&other.elements).cloned().collect();
        Ok(FiniteSet::from_sorted_unchecked(
            self.structure.clone(),
            merged.into_iter().collect(),
        ))
    }

    pub fn difference(&self, other: &FiniteSet) -> Result<FiniteSet> {
        self.same_structure(other)?;
        let rest = self.elements.iter().filter(|x| !other.contains(x)).cloned().collect();
        Ok(FiniteSet::from_sorted_unchecked(self.structure.clone(), rest))
    }

    /// The subset picked out by `mask`, bit `j` selecting the `j`-th element.
    pub fn select(&self, mask: u64) -> FiniteSet {
        let picked = self
            .elements
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .map(|(_, e)| e.clone())
            .collect();
        FiniteSet::from_sorted_unchecked(self.structure.clone(), picked)
    }

    /// Integer payloads, for sets over `Z`.
    pub fn int_values(&self) -> Result<Vec<&BigInt>> {
        self.elements
            .iter()
            .map(|e| {
                e.as_int().ok_or_else(|| {
                    SumsetError::StructureMismatch(format!("expected an integer set, got {}", self.structure))
                })
            })
            .collect()
    }

    pub fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(SumsetError::EmptySet)
        } else {
            Ok(())
        }
    }

    pub(crate) fn same_structure(&self, other: &FiniteSet) -> Result<()> {
        if self.structure == other.structure {
            Ok(())
        } else {
            Err(SumsetError::StructureMismatch(format!(
                "sets over {} and {} cannot be combined",
                self.structure, other.structure
            )))
        }
    }
}

impl std::fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.elements.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl<'a> IntoIterator for &'a FiniteSet {
    type Item = &'a Element;
    type IntoIter = std::slice::Iter<'a, Element>;
    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// Which index pairs `(i, j)` of two operand sets may be added.
///
/// Indices are 0-based positions in the canonical order of the operands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditionGraph {
    left_size: usize,
    right_size: usize,
    edges: BTreeSet<(usize, usize)>,
    symmetric: bool,
    loops_allowed: bool,
}

impl AdditionGraph {
    pub fn new(
        left_size: usize,
        right_size: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        symmetric: bool,
        loops_allowed: bool,
    ) -> Result<Self> {
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        for &(i, j) in &edges {
            if i >= left_size || j >= right_size {
                return Err(SumsetError::DimensionMismatch(format!(
                    "edge ({i}, {j}) outside {left_size} x {right_size}"
                )));
            }
            if i == j && !loops_allowed && symmetric {
                return Err(SumsetError::Precondition(format!("loop edge ({i}, {i}) not allowed")));
            }
        }
        if symmetric {
            if left_size != right_size {
                return Err(SumsetError::DimensionMismatch(
                    "a symmetric graph needs equal side sizes".into(),
                ));
            }
            if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| !edges.contains(&(j, i))) {
                return Err(SumsetError::NonSymmetricGraph(format!(
                    "edge ({i}, {j}) present without ({j}, {i})"
                )));
            }
        }
        Ok(AdditionGraph {
            left_size,
            right_size,
            edges,
            symmetric,
            loops_allowed,
        })
    }

    /// Symmetric self-graph built from unordered pairs; each pair is inserted in both directions.
    pub fn undirected(
        size: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
        loops_allowed: bool,
    ) -> Result<Self> {
        let edges: Vec<(usize, usize)> = pairs.into_iter().flat_map(|(i, j)| [(i, j), (j, i)]).collect();
        AdditionGraph::new(size, size, edges, true, loops_allowed)
    }

    pub fn complete(left_size: usize, right_size: usize, loops_allowed: bool) -> Self {
        let symmetric = left_size == right_size;
        let edges = (0..left_size)
            .flat_map(|i| (0..right_size).map(move |j| (i, j)))
            .filter(|&(i, j)| loops_allowed || !symmetric || i != j)
            .collect();
        AdditionGraph {
            left_size,
            right_size,
            edges,
            symmetric,
            loops_allowed,
        }
    }

    pub fn left_size(&self) -> usize {
        self.left_size
    }

    pub fn right_size(&self) -> usize {
        self.right_size
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn loops_allowed(&self) -> bool {
        self.loops_allowed
    }

    /// Neighbours of `i` on the right side, ascending.
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((i, 0)..(i + 1, 0)).map(|&(_, j)| j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_sorts_and_dedups() {
        let s = FiniteSet::integers(&[3, 1, 3, 2]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.elements()[0], Element::int(1));
        let r = FiniteSet::residues(5, &[7, 2, 12]).unwrap();
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn construction_rejects_foreign_elements() {
        let err = FiniteSet::new(AmbientStructure::Residues(3), vec![Element::Residue(3)]).unwrap_err();
        assert!(matches!(err, SumsetError::StructureMismatch(_)));
    }

    #[test]
    fn select_follows_bit_order() {
        let s = FiniteSet::integers(&[4, 8, 15]);
        assert_eq!(s.select(0b101), FiniteSet::integers(&[4, 15]));
        assert!(s.select(0).is_empty());
    }

    #[test]
    fn graph_validation() {
        assert!(AdditionGraph::new(2, 2, [(0, 2)], false, true).is_err());
        assert!(matches!(
            AdditionGraph::new(2, 2, [(0, 1)], true, true),
            Err(SumsetError::NonSymmetricGraph(_))
        ));
        assert!(AdditionGraph::new(2, 2, [(1, 1)], true, false).is_err());
        let g = AdditionGraph::undirected(3, [(0, 1), (1, 2)], false).unwrap();
        assert_eq!(g.edges().len(), 4);
        assert_eq!(g.neighbours(1).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn complete_graph_respects_loop_flag() {
        assert_eq!(AdditionGraph::complete(3, 3, true).edges().len(), 9);
        assert_eq!(AdditionGraph::complete(3, 3, false).edges().len(), 6);
        assert_eq!(AdditionGraph::complete(2, 3, false).edges().len(), 6);
    }
}
