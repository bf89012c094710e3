//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

use sumsets::algebra::{AmbientStructure, Element};
use sumsets::report::int;
use sumsets::search::{run_hunt, HuntConfig};
use sumsets::set::FiniteSet;
use sumsets::sumset::{leave_one_out, sumset};
use sumsets::theorems::*;
use sumsets::SumsetError;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: SumsetError) -> String {
    e.to_string()
}

fn random_values(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_size: usize) -> Vec<i64> {
    let size = rng.gen_range(1..=max_size);
    (0..size).map(|_| rng.gen_range(lo..=hi)).collect()
}

fn random_ints(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_size: usize) -> FiniteSet {
    FiniteSet::integers(&random_values(rng, lo, hi, max_size))
}

/// Nonempty random subset of `s` with at most `max_size` elements.
fn random_subset(rng: &mut ChaCha8Rng, s: &FiniteSet, max_size: usize) -> FiniteSet {
    let size = rng.gen_range(1..=max_size.min(s.len()));
    let picked: Vec<Element> = s.elements().choose_multiple(rng, size).cloned().collect();
    FiniteSet::new(s.structure().clone(), picked).unwrap()
}

fn random_finite(rng: &mut ChaCha8Rng, structure: &AmbientStructure, max_size: usize) -> FiniteSet {
    let all = structure.all_elements(1 << 16).unwrap();
    let size = rng.gen_range(1..=max_size);
    let picked = (0..size).map(|_| all[rng.gen_range(0..all.len())].clone()).collect();
    FiniteSet::new(structure.clone(), picked).unwrap()
}

/// Sumset by folding `compose` over all tuples.
fn naive_sumset(structure: &AmbientStructure, sets: &[FiniteSet]) -> BTreeSet<Element> {
    let mut acc: BTreeSet<Element> = sets[0].iter().cloned().collect();
    for s in &sets[1..] {
        acc = acc
            .iter()
            .flat_map(|x| s.iter().map(move |y| structure.compose(x, y).unwrap()))
            .collect();
    }
    acc
}

fn criterion_1() -> Outcome {
    let z = AmbientStructure::Integers;
    let a = FiniteSet::integers(&[0, 1, 3]);
    let two = naive_sumset(&z, &[a.clone(), a.clone()]).len();
    let three = naive_sumset(&z, &[a.clone(), a.clone(), a.clone()]).len();
    ensure(two == 6 && three == 9, || format!("|2A| = {two}, |3A| = {three}"))?;
    let (r, _) = verify_superadditivity(&[a.clone(), a.clone(), a]).map_err(e2s)?;
    ensure(r.holds && r.lhs == int(18) && r.rhs == int(17), || {
        format!("superadd report {:?}", r.to_json())
    })?;

    let sets = [
        FiniteSet::integers(&[0, 2]),
        FiniteSet::integers(&[0, 1]),
        FiniteSet::integers(&[0, 3]),
    ];
    let s = sumset(&z, &sets).map_err(e2s)?;
    let leave: usize = (0..3).map(|i| leave_one_out(&z, &sets, i).unwrap().len()).sum();
    ensure(s.len() == 7 && leave - 1 == 11, || {
        format!("|S| = {}, sum |S_i| - 1 = {}", s.len(), leave - 1)
    })?;
    let r = verify_submultiplicativity(&z, &sets).map_err(e2s)?;
    ensure(r.holds && r.lhs == int(49) && r.rhs == int(64), || {
        format!("submult report {:?}", r.to_json())
    })?;
    Ok("2*9 >= 3*6-1 and 49 <= 64".into())
}

fn criterion_2() -> Outcome {
    let z = AmbientStructure::Integers;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 0..1000 {
        let k = rng.gen_range(2..=4);
        let sets: Vec<FiniteSet> = (0..k).map(|_| random_ints(&mut rng, 0, 50, 8)).collect();
        let (r, w) = verify_superadditivity(&sets).map_err(|e| format!("instance {n}: {e}"))?;
        let full = naive_sumset(&z, &sets);
        let leave: usize = (0..k)
            .map(|i| {
                let rest: Vec<FiniteSet> = sets
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, s)| s.clone())
                    .collect();
                naive_sumset(&z, &rest).len()
            })
            .sum();
        ensure(r.holds && (k - 1) * full.len() + 1 >= leave, || {
            format!("instance {n}: inequality fails")
        })?;
        ensure(w.marked_count() == leave - 1, || {
            format!("instance {n}: |M| = {} != {}", w.marked_count(), leave - 1)
        })?;
        ensure(w.marked.iter().all(|m| m.is_subset_of(&w.s_prime)), || {
            format!("instance {n}: M not inside S'")
        })?;
        ensure(w.s_prime.iter().all(|x| full.contains(x)), || {
            format!("instance {n}: S' not inside S")
        })?;
    }
    Ok("1000 instances, witness identities hold".into())
}

fn criterion_3() -> Outcome {
    let structures = [
        AmbientStructure::Integers,
        AmbientStructure::Residues(30),
        AmbientStructure::Lattice(2),
        AmbientStructure::IntersectionSemigroup(6),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for st in &structures {
        for n in 0..1000 {
            let k = rng.gen_range(2..=3);
            let sets: Vec<FiniteSet> = (0..k)
                .map(|_| match st {
                    AmbientStructure::Integers => random_ints(&mut rng, -20, 20, 5),
                    AmbientStructure::Residues(m) => {
                        let m = rng.gen_range(1..=*m);
                        let vals: Vec<u64> = (0..rng.gen_range(1..=5)).map(|_| rng.gen_range(0..m)).collect();
                        FiniteSet::residues(30, &vals).unwrap()
                    }
                    AmbientStructure::Lattice(_) => {
                        let pts: Vec<Vec<i64>> = (0..rng.gen_range(1..=5))
                            .map(|_| vec![rng.gen_range(-4..=4), rng.gen_range(-4..=4)])
                            .collect();
                        let refs: Vec<&[i64]> = pts.iter().map(Vec::as_slice).collect();
                        FiniteSet::lattice(2, &refs).unwrap()
                    }
                    other => random_finite(&mut rng, other, 5),
                })
                .collect();
            let tag = || format!("{st} instance {n}");
            let r = verify_submultiplicativity(st, &sets).map_err(|e| format!("{}: {e}", tag()))?;
            let size = naive_sumset(st, &sets).len();
            let prod: BigInt = (0..k)
                .map(|i| BigInt::from(leave_one_out(st, &sets, i).unwrap().len()))
                .product();
            ensure(r.holds && BigInt::from(size).pow(k as u32 - 1) <= prod, || {
                format!("{}: inequality fails", tag())
            })?;
            let d = lex_min_decomposition(st, &sets).map_err(|e| format!("{}: {e}", tag()))?;
            check_lex_invariants(st, &d).map_err(|e| format!("{}: {e}", tag()))?;
            ensure(d.b_set().len() == size, || format!("{}: |B| != |S|", tag()))?;
        }
    }
    Ok("4000 instances across 4 structures".into())
}

fn criterion_4() -> Outcome {
    let cube: Vec<Vec<i64>> = (0..81)
        .map(|m| (0..4).map(|j| (m / 3i64.pow(j)) % 3).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 0..1000 {
        let size = rng.gen_range(1..=cube.len());
        let picked: Vec<&[i64]> = cube.choose_multiple(&mut rng, size).map(Vec::as_slice).collect();
        let b = FiniteSet::lattice(4, &picked).unwrap();
        let r = verify_projection_lemma(&b).map_err(|e| format!("subset {n}: {e}"))?;
        ensure(r.holds, || format!("subset {n}: {:?}", r.to_json()))?;
    }
    let corners: Vec<Vec<i64>> = (0..8).map(|m| (0..3).map(|j| (m >> j) & 1).collect()).collect();
    let (size, proj) = projection_sizes(&corners).map_err(e2s)?;
    ensure(size == 8 && proj == vec![4, 4, 4], || {
        format!("box sizes {size}, {proj:?}")
    })?;
    let refs: Vec<&[i64]> = corners.iter().map(Vec::as_slice).collect();
    let r = verify_projection_lemma(&FiniteSet::lattice(3, &refs).unwrap()).map_err(e2s)?;
    ensure(r.lhs == int(64) && r.rhs == int(64), || {
        format!("box report {:?}", r.to_json())
    })?;
    Ok("1000 subsets of {0,1,2}^4; box equality 64 = 64".into())
}

/// Nonempty subsets of `[0, hi]` with at most `cap` elements.
fn small_subsets(hi: i64, cap: usize) -> Vec<FiniteSet> {
    (1u32..1 << (hi + 1))
        .filter(|m| m.count_ones() as usize <= cap)
        .map(|m| FiniteSet::integers(&(0..=hi).filter(|j| m >> j & 1 == 1).collect::<Vec<_>>()))
        .collect()
}

fn criterion_5() -> Outcome {
    let a_sets = small_subsets(10, 5);
    let b_sets = small_subsets(8, 4);
    let violations = AtomicUsize::new(0);
    let errors = AtomicUsize::new(0);
    a_sets.par_iter().for_each(|a| {
        for b in &b_sets {
            for k in [2, 3] {
                match find_plunnecke_subset(a, b, 1, k) {
                    Ok(w) if w.report.holds => {}
                    Ok(_) | Err(SumsetError::TheoremViolation(_)) => {
                        violations.fetch_add(1, Ordering::Relaxed);
                    }
                    Err(_) => {
                        errors.fetch_add(1, Ordering::Relaxed);
                    }
                }
            }
        }
    });
    let exhaustive = a_sets.len() * b_sets.len() * 2;
    let c_sets = small_subsets(6, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples: Vec<(usize, usize, usize)> = (0..10_000)
        .map(|_| {
            (
                rng.gen_range(0..a_sets.len()),
                rng.gen_range(0..b_sets.len()),
                rng.gen_range(0..c_sets.len()),
            )
        })
        .collect();
    samples.par_iter().for_each(|&(i, j, l)| {
        match find_plunnecke_subset_multi(&a_sets[i], &[b_sets[j].clone(), c_sets[l].clone()]) {
            Ok(w) if w.report.holds => {}
            Ok(_) | Err(SumsetError::TheoremViolation(_)) => {
                violations.fetch_add(1, Ordering::Relaxed);
            }
            Err(_) => {
                errors.fetch_add(1, Ordering::Relaxed);
            }
        }
    });
    let (v, e) = (violations.into_inner(), errors.into_inner());
    ensure(v == 0 && e == 0, || format!("{v} theorem violations, {e} other errors"))?;
    Ok(format!(
        "{exhaustive} exhaustive searches, 10000 sampled h = 2 searches"
    ))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let z = AmbientStructure::Integers;
    for n in 0..1000 {
        let a = random_ints(&mut rng, 0, 30, 6);
        let b1 = random_ints(&mut rng, 0, 30, 6);
        let b2 = random_ints(&mut rng, 0, 30, 6);
        let s = random_subset(&mut rng, &sumset(&z, &[b1.clone(), b2.clone()]).unwrap(), 6);
        let r = verify_restricted_three_sum(&z, &a, &b1, &b2, &s).map_err(|e| format!("instance {n}: {e}"))?;
        ensure(r.holds, || format!("instance {n}: {:?}", r.to_json()))?;
    }
    let primes = [5u64, 7, 11, 13, 17, 19, 23, 29, 31];
    for n in 0..200 {
        let p = primes[n % primes.len()];
        let st = AmbientStructure::Residues(p);
        let draw = |rng: &mut ChaCha8Rng| {
            let vals: Vec<u64> = (0..rng.gen_range(1..=6)).map(|_| rng.gen_range(0..p)).collect();
            FiniteSet::residues(p, &vals).unwrap()
        };
        let (a, b1, b2) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let s = random_subset(&mut rng, &sumset(&st, &[b1.clone(), b2.clone()]).unwrap(), 6);
        let r = verify_restricted_three_sum(&st, &a, &b1, &b2, &s).map_err(|e| format!("Z/{p} instance {n}: {e}"))?;
        ensure(r.holds, || format!("Z/{p} instance {n}: {:?}", r.to_json()))?;
    }
    Ok("1000 integer and 200 residue instances".into())
}

fn criterion_7() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_sumsets"))
        .args(["family", "--n", "120", "--target-size", "6"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(2), || {
        format!("exit status {:?}", out.status.code())
    })?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let s: Vec<i64> = v["s"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
    let set = FiniteSet::integers(&s);
    ensure(s.len() == 6, || format!("S = {s:?}"))?;
    check_family_set(120, &set).map_err(e2s)?;
    let fam = build_graph_counterexample(120, &set).map_err(e2s)?;
    let (pairs, triples) = (fam.pair_sums.len(), fam.triple_sums.len());
    ensure(
        pairs == 6 && triples >= 20 && v["pair_sums"] == pairs && v["triple_sums"] == triples,
        || format!("pair sums {pairs}, triple sums {triples}"),
    )?;
    let (lhs, rhs) = (BigInt::from(triples).pow(2), BigInt::from(pairs).pow(3));
    ensure(lhs >= BigInt::from(400) && lhs > rhs && !fam.report.holds, || {
        format!("{lhs} vs {rhs}")
    })?;
    Ok(format!("S = {s:?}: {lhs} > {rhs}, exit 2"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let st = AmbientStructure::Lattice(2);
    for n in 0..200 {
        let k = rng.gen_range(2..=3);
        let sets: Vec<FiniteSet> = (0..k)
            .map(|_| {
                let pts: Vec<Vec<i64>> = (0..rng.gen_range(1..=5))
                    .map(|_| vec![rng.gen_range(-6..=6), rng.gen_range(-6..=6)])
                    .collect();
                let refs: Vec<&[i64]> = pts.iter().map(Vec::as_slice).collect();
                FiniteSet::lattice(2, &refs).unwrap()
            })
            .collect();
        let (r, red, _) = verify_superadditivity_torsion_free(&sets).map_err(|e| format!("instance {n}: {e}"))?;
        ensure(r.holds, || format!("instance {n}: {:?}", r.to_json()))?;
        let mut points: BTreeSet<Element> = sumset(&st, &sets).unwrap().into_elements().into_iter().collect();
        for i in 0..k {
            points.extend(leave_one_out(&st, &sets, i).unwrap().into_elements());
            points.extend(sets[i].iter().cloned());
        }
        let images: BTreeSet<BigInt> = points
            .iter()
            .map(|p| match p {
                Element::Vector(v) => phi_embedding(&red.m, v),
                _ => unreachable!(),
            })
            .collect();
        ensure(images.len() == points.len(), || {
            format!("instance {n}: phi_{} not injective", red.m)
        })?;
        ensure(red.endpoint_preimages.iter().all(|e| e.len() <= 2), || {
            format!("instance {n}: endpoint preimage too big")
        })?;
    }
    Ok("200 lattice instances".into())
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let z = AmbientStructure::Integers;
    for n in 0..100 {
        let x = random_ints(&mut rng, -5, 5, 3);
        let y = random_ints(&mut rng, -5, 5, 3);
        for k in [2, 3] {
            let (power, direct) = tensor_power_sizes(&z, &x, &y, k).map_err(|e| format!("pair {n}: {e}"))?;
            let base = naive_sumset(&z, &[x.clone(), y.clone()]).len();
            ensure(power == direct && direct == base.pow(k as u32), || {
                format!("pair {n}, k = {k}: {power} vs {direct}")
            })?;
        }
    }
    Ok("100 pairs, k in {2, 3}".into())
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for (label, mut config, expected) in [
        ("Q1", HuntConfig::q1_default(), 9261),
        ("Q2", HuntConfig::q2_default(), 10_000),
    ] {
        config.instance_budget = 10_000;
        config.seed = 10;
        let mut logs = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("{label}-{run}.jsonl"));
            config.log_path = Some(path.clone());
            let summary = run_hunt(&config).map_err(|e| format!("{label}: {e}"))?;
            ensure(summary.instances_run == expected, || {
                format!("{label}: ran {}", summary.instances_run)
            })?;
            ensure(!summary.found_violation(), || {
                format!("{label}: violation {:?}", summary.violations[0].to_json())
            })?;
            logs.push(std::fs::read(path).map_err(|e| e.to_string())?);
        }
        ensure(logs[0] == logs[1], || format!("{label}: logs differ"))?;
        let lines = logs[0].split(|&b| b == b'\n').filter(|l| !l.is_empty()).count();
        ensure(lines == expected as usize, || format!("{label}: {lines} log lines"))?;
        notes.push(format!("{label} {expected} instances"));
    }
    Ok(notes.join(", ") + ", logs byte-identical, no violations")
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("fixed-instance suite", criterion_1, Duration::from_secs(1)),
        ("superadditivity properties", criterion_2, Duration::from_secs(30)),
        ("submultiplicativity properties", criterion_3, Duration::from_secs(60)),
        ("projection lemma", criterion_4, Duration::from_secs(10)),
        ("Plunnecke existence", criterion_5, Duration::from_secs(300)),
        ("restricted three-sum", criterion_6, Duration::from_secs(30)),
        ("graph counterexample family", criterion_7, Duration::from_secs(5)),
        ("torsion-free reduction", criterion_8, Duration::from_secs(30)),
        ("tensor identity", criterion_9, Duration::from_secs(10)),
        ("deterministic hunts", criterion_10, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = result.and_then(|detail| {
            if took <= *limit {
                Ok(detail)
            } else {
                Err(format!("took {took:.2?}, limit {limit:?}"))
            }
        });
        match result {
            Ok(detail) => println!("PASS criterion {} {name} ({took:.2?}): {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL criterion {} {name} ({took:.2?}): {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
