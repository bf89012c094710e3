//! Plünnecke-type subset searches, the large-subset induction, and the
//! monotonicity chains for iterated sums.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::instance_digest;
use crate::algebra::AmbientStructure;
use crate::engine::BitWindow;
use crate::error::{Result, SumsetError};
use crate::report::{int, Direction, InequalityReport};
use crate::set::FiniteSet;
use crate::sumset::{check_summands, iterated_sum, sumset};

/// Largest `|A|` the exhaustive subset searches accept.
pub const SEARCH_CAP: usize = 20;

/// A nonempty `X ⊆ A` with controlled sumset growth.
#[derive(Debug, Clone, PartialEq)]
pub struct PlunneckeWitness {
    pub x_set: FiniteSet,
    /// The exact right-hand side, when it is rational.
    pub bound: Option<BigRational>,
    /// `|X + ...|` actually attained.
    pub achieved: BigInt,
    /// The integer cross-multiplied comparison that certifies the witness.
    pub report: InequalityReport,
}

fn check_cap(a: &FiniteSet) -> Result<()> {
    if a.len() > SEARCH_CAP {
        Err(SumsetError::SearchCap(format!("|A| = {} > {SEARCH_CAP}", a.len())))
    } else {
        Ok(())
    }
}

fn require_commutative(structure: &AmbientStructure) -> Result<()> {
    if structure.is_commutative() {
        Ok(())
    } else {
        Err(SumsetError::NotCommutative(
            "Plünnecke-type searches need a commutative structure".into(),
        ))
    }
}

/// Computes `|X + T|` for many subsets `X` of a fixed `A` and fixed `T`.
enum SubsetSums {
    Bits { a: Vec<i64>, t: BitWindow },
    Generic { a: FiniteSet, t: FiniteSet },
}

impl SubsetSums {
    fn new(a: &FiniteSet, t: &FiniteSet) -> Self {
        let as_i64 =
            |s: &FiniteSet| -> Option<Vec<i64>> { s.iter().map(|e| e.as_int().and_then(|v| v.to_i64())).collect() };
        if let (Some(av), Some(tv)) = (as_i64(a), as_i64(t)) {
            let span = |v: &[i64]| v.last()?.checked_sub(*v.first()?);
            let small = matches!((span(&av), span(&tv)), (Some(x), Some(y)) if x < 1 << 20 && y < 1 << 20);
            if small {
                return SubsetSums::Bits {
                    a: av,
                    t: BitWindow::from_values(&tv).expect("nonempty"),
                };
            }
        }
        SubsetSums::Generic {
            a: a.clone(),
            t: t.clone(),
        }
    }

    fn count(&self, mask: u64) -> usize {
        match self {
            SubsetSums::Bits { a, t } => {
                let picked: Vec<i64> = a
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask >> j & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                BitWindow::from_values(&picked).expect("nonempty mask").sum_count(t)
            }
            SubsetSums::Generic { a, t } => {
                let x = a.select(mask);
                sumset(a.structure(), &[x, t.clone()]).expect("validated inputs").len()
            }
        }
    }
}

/// `x^ex * y^ey <= z^ez * w^ew` over nonnegative integers, each factor given as `(base, exponent)`.
fn cross_le(lhs: [(usize, u32); 2], rhs: [(usize, u32); 2]) -> bool {
    let fast = || -> Option<bool> {
        let side = |f: [(usize, u32); 2]| -> Option<u128> {
            (f[0].0 as u128)
                .checked_pow(f[0].1)?
                .checked_mul((f[1].0 as u128).checked_pow(f[1].1)?)
        };
        Some(side(lhs)? <= side(rhs)?)
    };
    fast().unwrap_or_else(|| {
        let side = |f: [(usize, u32); 2]| BigInt::from(f[0].0).pow(f[0].1) * BigInt::from(f[1].0).pow(f[1].1);
        side(lhs) <= side(rhs)
    })
}

/// Finds the smallest-bitmask nonempty `X ⊆ A` with `|X + kB| <= α^{k/i} |X|`,
/// `α = |A + iB| / |A|`, checked as `|X+kB|^i |A|^k <= |A+iB|^k |X|^i`.
pub fn find_plunnecke_subset(a: &FiniteSet, b: &FiniteSet, i: usize, k: usize) -> Result<PlunneckeWitness> {
    if i == 0 || k <= i {
        return Err(SumsetError::Precondition(format!(
            "need 1 <= i < k, got i = {i}, k = {k}"
        )));
    }
    let structure = a.structure().clone();
    require_commutative(&structure)?;
    check_summands(&structure, &[a.clone(), b.clone()])?;
    check_cap(a)?;
    let m = a.len();
    let ib = iterated_sum(&structure, b, i)?;
    let kb = iterated_sum(&structure, b, k)?;
    let a_ib = sumset(&structure, &[a.clone(), ib])?.len();
    let sums = SubsetSums::new(a, &kb);
    let (ie, ke) = (i as u32, k as u32);
    for mask in 1u64..(1 << m) {
        let x_len = mask.count_ones() as usize;
        let achieved = sums.count(mask);
        if cross_le([(achieved, ie), (m, ke)], [(a_ib, ke), (x_len, ie)]) {
            let lhs = BigInt::from(achieved).pow(ie) * BigInt::from(m).pow(ke);
            let rhs = BigInt::from(a_ib).pow(ke) * BigInt::from(x_len).pow(ie);
            let digest = instance_digest(&structure, &[a.clone(), b.clone()]);
            let bound = k.is_multiple_of(i).then(|| {
                let alpha = BigRational::new(BigInt::from(a_ib), BigInt::from(m));
                num_traits::pow(alpha, k / i) * int(x_len)
            });
            return Ok(PlunneckeWitness {
                x_set: a.select(mask),
                bound,
                achieved: BigInt::from(achieved),
                report: InequalityReport::at_most("plunnecke", lhs, rhs, &digest),
            });
        }
    }
    Err(SumsetError::TheoremViolation(format!(
        "no X ⊆ {a} satisfies |X+{k}B| <= α^({k}/{i})|X| for B = {b}"
    )))
}

/// Finds the smallest-bitmask nonempty `X ⊆ A` with
/// `|X + B_1 + ... + B_h| · m^h <= s · |X|`, `m = |A|`, `s = prod |A + B_i|`.
pub fn find_plunnecke_subset_multi(a: &FiniteSet, bs: &[FiniteSet]) -> Result<PlunneckeWitness> {
    let structure = a.structure().clone();
    require_commutative(&structure)?;
    if bs.is_empty() {
        return Err(SumsetError::Precondition("need at least one B set".into()));
    }
    check_summands(&structure, std::slice::from_ref(a))?;
    check_summands(&structure, bs)?;
    check_cap(a)?;
    let m = a.len();
    let h = bs.len() as u32;
    let s: BigInt = bs
        .iter()
        .map(|b| sumset(&structure, &[a.clone(), b.clone()]).map(|x| BigInt::from(x.len())))
        .product::<Result<BigInt>>()?;
    let b_total = sumset(&structure, bs)?;
    let sums = SubsetSums::new(a, &b_total);
    let mh = BigInt::from(m).pow(h);
    for mask in 1u64..(1 << m) {
        let x_len = mask.count_ones() as usize;
        let achieved = BigInt::from(sums.count(mask));
        let lhs = &achieved * &mh;
        let rhs = &s * x_len;
        if lhs <= rhs {
            let mut all = vec![a.clone()];
            all.extend_from_slice(bs);
            let digest = instance_digest(&structure, &all);
            return Ok(PlunneckeWitness {
                x_set: a.select(mask),
                bound: Some(BigRational::new(rhs.clone(), mh)),
                achieved,
                report: InequalityReport::at_most("plunnecke-multi", lhs, rhs, &digest),
            });
        }
    }
    Err(SumsetError::TheoremViolation(format!(
        "no X ⊆ {a} satisfies |X+B_1+...+B_h| <= α_1...α_h |X|"
    )))
}

/// `sum_{j<k} s/(m-j)^h + (x_len - k) s/(m-k+1)^h`.
pub fn large_subset_bound(s: &BigInt, m: usize, h: u32, k: usize, x_len: usize) -> BigRational {
    let term = |j: usize| BigRational::new(s.clone(), BigInt::from(m - j).pow(h));
    let head: BigRational = (0..k).map(term).fold(BigRational::zero(), |acc, t| acc + t);
    let tail = term(k - 1) * int(x_len as i64 - k as i64);
    head + tail
}

/// `s/(h-1) (1/(m-t)^{h-1} - 1/m^{h-1}) + (x_len - t) s/(m-t)^h` for rational `0 <= t < m`.
///
/// For `h = 1` the first term is a logarithm, so only `t = 0` is accepted there.
pub fn smooth_large_subset_bound(s: &BigInt, m: usize, h: u32, t: &BigRational, x_len: usize) -> Result<BigRational> {
    let m_r = int(m);
    if t.is_negative() || *t >= m_r {
        return Err(SumsetError::Precondition(format!("t = {t} must satisfy 0 <= t < {m}")));
    }
    if h == 0 {
        return Err(SumsetError::Precondition("h must be positive".into()));
    }
    let s_r = BigRational::from_integer(s.clone());
    let gap = &m_r - t;
    let integral = if t.is_zero() {
        BigRational::zero()
    } else if h == 1 {
        return Err(SumsetError::Precondition(
            "h = 1 with t > 0 gives an irrational bound".into(),
        ));
    } else {
        let inv_pow = |x: &BigRational, e: u32| num_traits::pow(x.recip(), e as usize);
        &s_r / int(h - 1) * (inv_pow(&gap, h - 1) - inv_pow(&m_r, h - 1))
    };
    let tail = (int(x_len) - t) * &s_r / num_traits::pow(gap, h as usize);
    Ok(integral + tail)
}

/// Runs the induction on `k`: start from a single witness and, while `|X| < j`,
/// add a witness found inside `A \ X`. Every stage is checked against its bound.
pub fn construct_large_subset(a: &FiniteSet, bs: &[FiniteSet], k: usize) -> Result<PlunneckeWitness> {
    if k == 0 {
        return Err(SumsetError::NonPositiveK);
    }
    if k > a.len() {
        return Err(SumsetError::Precondition(format!("k = {k} exceeds |A| = {}", a.len())));
    }
    let base = find_plunnecke_subset_multi(a, bs)?;
    let structure = a.structure().clone();
    let m = a.len();
    let h = bs.len() as u32;
    let s: BigInt = bs
        .iter()
        .map(|b| sumset(&structure, &[a.clone(), b.clone()]).map(|x| BigInt::from(x.len())))
        .product::<Result<BigInt>>()?;
    let b_total = sumset(&structure, bs)?;

    let mut x = base.x_set;
    let mut achieved = base.achieved;
    let mut bound = large_subset_bound(&s, m, h, 1, x.len());
    for stage in 2..=k {
        if x.len() < stage {
            let rest = a.difference(&x)?;
            let y = find_plunnecke_subset_multi(&rest, bs)?;
            x = x.union(&y.x_set)?;
            achieved = BigInt::from(sumset(&structure, &[x.clone(), b_total.clone()])?.len());
        }
        bound = large_subset_bound(&s, m, h, stage, x.len());
        if int(achieved.clone()) > bound {
            return Err(SumsetError::TheoremViolation(format!(
                "stage {stage}: |X+B| = {achieved} exceeds {bound}"
            )));
        }
    }
    let mut all = vec![a.clone()];
    all.extend_from_slice(bs);
    let report = InequalityReport::new(
        "plunnecke-large",
        int(achieved.clone()),
        bound.clone(),
        Direction::AtMost,
        instance_digest(&structure, &all),
    );
    Ok(PlunneckeWitness {
        x_set: x,
        bound: Some(bound),
        achieved,
        report,
    })
}

/// Finds `X ⊆ A` with `|X| > t` obeying the smooth bound, via the induction with `k = floor(t) + 1`.
pub fn verify_smooth_large_subset(a: &FiniteSet, bs: &[FiniteSet], t: &BigRational) -> Result<PlunneckeWitness> {
    if t.is_negative() || *t >= int(a.len()) {
        return Err(SumsetError::Precondition(format!("t = {t} must satisfy 0 <= t < |A|")));
    }
    let k = t.floor().to_integer().to_usize().expect("t < |A|") + 1;
    let mut w = construct_large_subset(a, bs, k)?;
    let structure = a.structure();
    let s: BigInt = bs
        .iter()
        .map(|b| sumset(structure, &[a.clone(), b.clone()]).map(|x| BigInt::from(x.len())))
        .product::<Result<BigInt>>()?;
    let bound = smooth_large_subset_bound(&s, a.len(), bs.len() as u32, t, w.x_set.len())?;
    if int(w.x_set.len()) <= *t || int(w.achieved.clone()) > bound {
        return Err(SumsetError::TheoremViolation(format!(
            "|X| = {}, |X+B| = {} against smooth bound {bound}",
            w.x_set.len(),
            w.achieved
        )));
    }
    w.report = InequalityReport::new(
        "plunnecke-smooth",
        int(w.achieved.clone()),
        bound.clone(),
        Direction::AtMost,
        w.report.instance_digest.clone(),
    );
    w.bound = Some(bound);
    Ok(w)
}

/// For `1 <= i < k <= kmax`: `k(|iA|-1) <= i(|kA|-1)` and `|kA|^i <= |iA|^k`.
pub fn verify_lev_monotonicity(a: &FiniteSet, kmax: usize) -> Result<Vec<InequalityReport>> {
    if *a.structure() != AmbientStructure::Integers {
        return Err(SumsetError::StructureMismatch(
            "monotonicity chains need an integer set".into(),
        ));
    }
    a.require_nonempty()?;
    if kmax < 2 {
        return Err(SumsetError::Precondition("kmax must be at least 2".into()));
    }
    let z = AmbientStructure::Integers;
    let mut sizes = vec![0usize];
    let mut cur = a.clone();
    sizes.push(cur.len());
    for _ in 2..=kmax {
        cur = sumset(&z, &[cur, a.clone()])?;
        sizes.push(cur.len());
    }
    let digest = instance_digest(&z, std::slice::from_ref(a));
    let mut out = Vec::new();
    for k in 2..=kmax {
        for i in 1..k {
            out.push(InequalityReport::at_most(
                &format!("lev-linear({i},{k})"),
                BigInt::from(k) * (sizes[i] - 1),
                BigInt::from(i) * (sizes[k] - 1),
                &digest,
            ));
            out.push(InequalityReport::at_most(
                &format!("lev-root({i},{k})"),
                BigInt::from(sizes[k]).pow(i as u32),
                BigInt::from(sizes[i]).pow(k as u32),
                &digest,
            ));
        }
    }
    Ok(out)
}

/// `num / den` as an exact rational.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
