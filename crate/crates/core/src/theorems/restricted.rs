//! Restricted sums: the three-set bound for `S ⊆ B_1 + B_2`, Cauchy-Davenport,
//! the addition-graph family on which the graph inequality fails, and the
//! direct-power identity behind the tensor trick.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::instance_digest;
use crate::algebra::{AmbientStructure, Element};
use crate::error::{Result, SumsetError};
use crate::report::InequalityReport;
use crate::set::{AdditionGraph, FiniteSet};
use crate::sumset::{check_summands, direct_power, graph_triple_sumset, restricted_pair_sumset, sumset};

/// `|S + A|^2 <= |S| |A + B_1| |A + B_2|` for `S ⊆ B_1 + B_2`.
pub fn verify_restricted_three_sum(
    structure: &AmbientStructure,
    a: &FiniteSet,
    b1: &FiniteSet,
    b2: &FiniteSet,
    s: &FiniteSet,
) -> Result<InequalityReport> {
    if !structure.is_commutative() {
        return Err(SumsetError::NotCommutative(
            "restricted three-sum bound needs a commutative structure".into(),
        ));
    }
    let all = [a.clone(), b1.clone(), b2.clone(), s.clone()];
    check_summands(structure, &all)?;
    let b_sum = sumset(structure, &[b1.clone(), b2.clone()])?;
    if !s.is_subset_of(&b_sum) {
        return Err(SumsetError::NotSubset("B1+B2".into()));
    }
    let lhs = BigInt::from(sumset(structure, &[s.clone(), a.clone()])?.len()).pow(2);
    let rhs = BigInt::from(s.len())
        * sumset(structure, &[a.clone(), b1.clone()])?.len()
        * sumset(structure, &[a.clone(), b2.clone()])?.len();
    Ok(InequalityReport::at_most(
        "restsum",
        lhs,
        rhs,
        &instance_digest(structure, &all),
    ))
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `|A + B| >= min(|A| + |B| - 1, p)` in `Z/pZ`.
pub fn cauchy_davenport_check(p: u64, a: &FiniteSet, b: &FiniteSet) -> Result<InequalityReport> {
    if !is_prime(p) {
        return Err(SumsetError::NotPrime);
    }
    let structure = AmbientStructure::Residues(p);
    let sets = [a.clone(), b.clone()];
    check_summands(&structure, &sets)?;
    let lhs = sumset(&structure, &sets)?.len() as u64;
    let rhs = (a.len() as u64 + b.len() as u64 - 1).min(p);
    Ok(InequalityReport::at_least(
        "cauchy-davenport",
        lhs,
        rhs,
        &instance_digest(&structure, &sets),
    ))
}

/// The interval `[1, n]` with edges `a ~ a'` whenever `a + a' ∈ S`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphCounterexample {
    pub n: usize,
    pub s: FiniteSet,
    pub a: FiniteSet,
    pub graph: AdditionGraph,
    pub pair_sums: FiniteSet,
    pub triple_sums: FiniteSet,
    /// `|A +_G A +_G A|^2 <= |A +_G A|^3`; fails for qualifying `S` of size 6 or more.
    pub report: InequalityReport,
}

fn even_values(s: &FiniteSet) -> Result<Vec<i64>> {
    s.iter()
        .map(|e| {
            let v = e
                .as_int()
                .and_then(|v| i64::try_from(v).ok())
                .ok_or_else(|| SumsetError::Precondition(format!("{e} is not a machine integer")))?;
            Ok(v)
        })
        .collect()
}

fn in_window(n: usize, v: i64) -> bool {
    let n = n as i64;
    3 * v > 2 * n && 3 * v < 4 * n
}

fn triple_sums_distinct(values: &[i64]) -> bool {
    let mut seen = BTreeSet::new();
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            for l in j + 1..values.len() {
                if !seen.insert(values[i] + values[j] + values[l]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Checks that `S` is a nonempty set of even integers inside `(2n/3, 4n/3)`
/// whose 3-element subsets have pairwise distinct sums.
pub fn check_family_set(n: usize, s: &FiniteSet) -> Result<()> {
    if n < 6 {
        return Err(SumsetError::Precondition(format!("n = {n} must be at least 6")));
    }
    if *s.structure() != AmbientStructure::Integers {
        return Err(SumsetError::StructureMismatch("S must be a set of integers".into()));
    }
    s.require_nonempty()?;
    let values = even_values(s)?;
    if let Some(v) = values.iter().find(|&&v| v % 2 != 0) {
        return Err(SumsetError::Precondition(format!("{v} in S is odd")));
    }
    if let Some(v) = values.iter().find(|&&v| !in_window(n, v)) {
        return Err(SumsetError::Precondition(format!(
            "{v} in S lies outside (2n/3, 4n/3) for n = {n}"
        )));
    }
    if !triple_sums_distinct(&values) {
        return Err(SumsetError::Precondition(
            "two 3-element subsets of S have equal sums".into(),
        ));
    }
    Ok(())
}

/// Builds the family with loop edges `(a, a)` whenever `2a ∈ S`.
pub fn build_graph_counterexample(n: usize, s: &FiniteSet) -> Result<GraphCounterexample> {
    build_graph_counterexample_with(n, s, true)
}

pub fn build_graph_counterexample_with(n: usize, s: &FiniteSet, loops: bool) -> Result<GraphCounterexample> {
    check_family_set(n, s)?;
    let a = FiniteSet::integers(&(1..=n as i64).collect::<Vec<_>>());
    let targets: BTreeSet<i64> = even_values(s)?.into_iter().collect();
    let edges = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| (loops || i != j) && targets.contains(&((i + j + 2) as i64)));
    let graph = AdditionGraph::new(n, n, edges, true, loops)?;
    let z = AmbientStructure::Integers;
    let pair_sums = restricted_pair_sumset(&z, &a, &a, &graph)?;
    let triple_sums = graph_triple_sumset(&a, &graph)?;
    let digest = instance_digest(&z, &[a.clone(), s.clone()]);
    let report = InequalityReport::at_most(
        "graph-triple",
        BigInt::from(triple_sums.len()).pow(2),
        BigInt::from(pair_sums.len()).pow(3),
        &digest,
    );
    Ok(GraphCounterexample {
        n,
        s: s.clone(),
        a,
        graph,
        pair_sums,
        triple_sums,
        report,
    })
}

/// Scans even integers of `(2n/3, 4n/3)` upwards, keeping each candidate whose
/// addition leaves all 2-subset and all 3-subset sums distinct, until `target`
/// elements are kept. Distinct pair sums keep later extensions possible.
pub fn greedy_family_set(n: usize, target: usize) -> Result<FiniteSet> {
    if n < 6 {
        return Err(SumsetError::Precondition(format!("n = {n} must be at least 6")));
    }
    if target == 0 {
        return Err(SumsetError::Precondition("target size must be positive".into()));
    }
    let start = (2 * n as i64) / 3 + 1;
    let mut kept: Vec<i64> = Vec::with_capacity(target);
    let mut sums: BTreeSet<i64> = BTreeSet::new();
    let mut pair_sums: BTreeSet<i64> = BTreeSet::new();
    for c in (start..).take_while(|&c| in_window(n, c) || c <= start) {
        if c % 2 != 0 || !in_window(n, c) {
            continue;
        }
        let fresh_pairs: Vec<i64> = kept.iter().map(|&x| x + c).collect();
        if fresh_pairs.iter().any(|t| pair_sums.contains(t)) {
            continue;
        }
        let mut fresh = Vec::new();
        let mut ok = true;
        'pairs: for i in 0..kept.len() {
            for j in i + 1..kept.len() {
                let t = kept[i] + kept[j] + c;
                if sums.contains(&t) || fresh.contains(&t) {
                    ok = false;
                    break 'pairs;
                }
                fresh.push(t);
            }
        }
        if ok {
            kept.push(c);
            sums.extend(fresh);
            pair_sums.extend(fresh_pairs);
            if kept.len() == target {
                return Ok(FiniteSet::integers(&kept));
            }
        }
    }
    Err(SumsetError::Precondition(format!(
        "greedy scan found only {} of {target} elements for n = {n}",
        kept.len()
    )))
}

/// `(|X^k + Y^k|, |X + Y|^k)` for small sets.
pub fn tensor_power_sizes(
    structure: &AmbientStructure,
    x: &FiniteSet,
    y: &FiniteSet,
    k: usize,
) -> Result<(usize, usize)> {
    if !(1..=3).contains(&k) {
        return Err(SumsetError::Precondition(format!(
            "tensor check supports k in 1..=3, got {k}"
        )));
    }
    if x.len() > 6 || y.len() > 6 {
        return Err(SumsetError::SearchCap("tensor check needs |X|, |Y| <= 6".into()));
    }
    let base = sumset(structure, &[x.clone(), y.clone()])?.len();
    let power = AmbientStructure::power(structure.clone(), k);
    let xk = direct_power(structure, x, k)?;
    let yk = direct_power(structure, y, k)?;
    let lifted = sumset(&power, &[xk, yk])?.len();
    Ok((lifted, base.pow(k as u32)))
}

/// `|X^k + Y^k| = |X + Y|^k`.
pub fn tensor_power_identity_check(
    structure: &AmbientStructure,
    x: &FiniteSet,
    y: &FiniteSet,
    k: usize,
) -> Result<bool> {
    let (lifted, expected) = tensor_power_sizes(structure, x, y, k)?;
    Ok(lifted == expected)
}

/// Distinct values `(s_1 + s_2 + s_3) / 2` over 3-element subsets of `S`.
pub fn half_triple_sums(s: &FiniteSet) -> Result<BTreeSet<Element>> {
    let v = even_values(s)?;
    let mut out = BTreeSet::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            for l in j + 1..v.len() {
                out.insert(Element::int((v[i] + v[j] + v[l]) / 2));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::int;

    fn z(v: &[i64]) -> FiniteSet {
        FiniteSet::integers(v)
    }

    const Z: AmbientStructure = AmbientStructure::Integers;

    #[test]
    fn restsum_examples() {
        let r = verify_restricted_three_sum(&Z, &z(&[0, 1]), &z(&[0, 1]), &z(&[0, 2]), &z(&[0, 3])).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (int(16), int(24)));
        assert!(r.holds);
        let r = verify_restricted_three_sum(&Z, &z(&[4]), &z(&[1]), &z(&[2]), &z(&[3])).unwrap();
        assert!(r.is_equality());
    }

    #[test]
    fn restsum_subset_check() {
        let err = verify_restricted_three_sum(&Z, &z(&[0]), &z(&[0, 1]), &z(&[0]), &z(&[5])).unwrap_err();
        assert_eq!(err.to_string(), "S must be a subset of B1+B2");
        assert_eq!(
            verify_restricted_three_sum(&Z, &z(&[0]), &z(&[0]), &z(&[0]), &FiniteSet::empty(Z)).unwrap_err(),
            SumsetError::EmptySet
        );
    }

    #[test]
    fn cauchy_davenport_examples() {
        let a = FiniteSet::residues(5, &[0, 1, 2]).unwrap();
        let r = cauchy_davenport_check(5, &a, &a).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (int(5), int(5)));
        let zero = FiniteSet::residues(7, &[0]).unwrap();
        let r = cauchy_davenport_check(7, &zero, &zero).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (int(1), int(1)));
        let a = FiniteSet::residues(3, &[0, 1]).unwrap();
        let r = cauchy_davenport_check(3, &a, &a).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (int(3), int(3)));
        let c = FiniteSet::residues(6, &[0, 1]).unwrap();
        assert_eq!(cauchy_davenport_check(6, &c, &c).unwrap_err(), SumsetError::NotPrime);
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn binary_family_fails_the_graph_inequality() {
        let s = z(&[82, 84, 88, 96, 112, 144]);
        let fam = build_graph_counterexample(120, &s).unwrap();
        assert_eq!(fam.pair_sums, s);
        assert!(fam.triple_sums.len() >= 20);
        for h in half_triple_sums(&s).unwrap() {
            assert!(fam.triple_sums.contains(&h));
        }
        assert!(!fam.report.holds);
        assert_eq!(fam.report.rhs, int(216));
    }

    #[test]
    fn without_loops_the_triple_count_is_binomial() {
        let s = z(&[82, 84, 88, 96, 112, 144]);
        let fam = build_graph_counterexample_with(120, &s, false).unwrap();
        assert_eq!(fam.triple_sums.len(), 20);
        assert_eq!(fam.report.lhs, int(400));
    }

    #[test]
    fn three_element_family() {
        let s = z(&[82, 84, 86]);
        let no_loops = build_graph_counterexample_with(120, &s, false).unwrap();
        assert_eq!(no_loops.report.lhs, int(1));
        assert!(no_loops.report.holds);
        // loops add the sums of repeated pair sums: (s1 + s2 + s3) / 2 over multisets
        let loops = build_graph_counterexample(120, &s).unwrap();
        assert_eq!(loops.triple_sums, z(&[123, 124, 125, 126, 127, 128, 129]));
        assert!(!loops.report.holds);
    }

    #[test]
    fn family_preconditions() {
        for bad in [vec![], vec![83], vec![80], vec![160], vec![82, 84, 86, 88, 90]] {
            assert!(check_family_set(120, &z(&bad)).is_err(), "{bad:?}");
        }
        assert!(check_family_set(5, &z(&[4])).is_err());
        assert!(check_family_set(120, &z(&[82, 84, 86, 88])).is_ok());
    }

    #[test]
    fn greedy_family_qualifies() {
        let s = greedy_family_set(120, 6).unwrap();
        assert_eq!(s.len(), 6);
        check_family_set(120, &s).unwrap();
        let family = build_graph_counterexample(120, &s).unwrap();
        assert_eq!(family.pair_sums.len(), 6);
        assert!(family.triple_sums.len() >= 20);
        assert!(!family.report.holds);
        assert!(greedy_family_set(6, 50).is_err());
    }

    #[test]
    fn tensor_examples() {
        assert!(tensor_power_identity_check(&Z, &z(&[0, 5]), &z(&[1, 2, 9]), 1).unwrap());
        assert_eq!(tensor_power_sizes(&Z, &z(&[0, 1]), &z(&[0, 2]), 2).unwrap(), (16, 16));
        assert_eq!(
            tensor_power_sizes(&Z, &z(&[0, 1, 3]), &z(&[0, 1]), 2).unwrap(),
            (25, 25)
        );
        assert!(tensor_power_sizes(&Z, &z(&[0]), &z(&[0]), 4).is_err());
        assert!(tensor_power_sizes(&Z, &z(&[0, 1, 2, 3, 4, 5, 6]), &z(&[0]), 2).is_err());
    }
}
