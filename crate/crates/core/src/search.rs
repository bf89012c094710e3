//! Counterexample hunts for the two open sumset questions.
//!
//! Q1: in a noncommutative group, is `|S|^{k-1} <= prod n_i` with
//! `n_i = max_{a in A_i} |A_1 + ... + {a} + ... + A_k|`?
//!
//! Q2: for `S ⊆ B_1 + ... + B_k`, is
//! `|S + A|^k <= |S| prod_i |A + B_1 + ... (B_i omitted) ... + B_k|`?
//!
//! Every evaluated instance becomes one JSONL record; runs are fully
//! determined by the config (seed, budget, start index).

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{AmbientStructure, Element};
use crate::error::SumsetError;
use crate::instance::{Instance, InstanceError};
use crate::set::FiniteSet;
use crate::sumset::{check_summands, sumset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Question {
    Q1,
    Q2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HuntMode {
    Exhaustive,
    Random,
}

#[derive(Debug, Error)]
pub enum HuntError {
    #[error(transparent)]
    Sumset(#[from] SumsetError),
    #[error("invalid hunt config: {0}")]
    Config(String),
    #[error("log I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HuntConfig {
    pub question: Question,
    /// Q1: a noncommutative finite structure. Q2: integers.
    pub structure: AmbientStructure,
    /// Q1: number of summands. Q2: number of B sets.
    pub k: usize,
    /// Largest cardinality of any generated set.
    pub size_cap: usize,
    /// Q2 carrier is `[0, value_range]`.
    pub value_range: i64,
    pub mode: HuntMode,
    pub seed: u64,
    pub instance_budget: u64,
    /// Index of the first instance to evaluate (resuming from a checkpoint).
    pub start_index: u64,
    pub log_path: Option<PathBuf>,
    pub checkpoint_path: Option<PathBuf>,
    pub stop_on_violation: bool,
}

impl HuntConfig {
    /// Exhaustive Q1 hunt in `S_3` with three summands of at most two elements.
    pub fn q1_default() -> Self {
        HuntConfig {
            question: Question::Q1,
            structure: AmbientStructure::Permutations(3),
            k: 3,
            size_cap: 2,
            value_range: 0,
            mode: HuntMode::Exhaustive,
            seed: 0,
            instance_budget: 10_000,
            start_index: 0,
            log_path: None,
            checkpoint_path: None,
            stop_on_violation: true,
        }
    }

    /// Random Q2 hunt with three B sets, sets of at most five elements in `[0, 40]`.
    pub fn q2_default() -> Self {
        HuntConfig {
            question: Question::Q2,
            structure: AmbientStructure::Integers,
            k: 3,
            size_cap: 5,
            value_range: 40,
            mode: HuntMode::Random,
            seed: 0,
            instance_budget: 10_000,
            start_index: 0,
            log_path: None,
            checkpoint_path: None,
            stop_on_violation: true,
        }
    }

    pub fn validate(&self) -> Result<(), HuntError> {
        self.structure.validate()?;
        if self.size_cap == 0 {
            return Err(HuntError::Config("size cap must be positive".into()));
        }
        match self.question {
            Question::Q1 => {
                if self.structure.is_commutative() {
                    return Err(HuntError::Sumset(q1_commutative()));
                }
                if self.k < 3 {
                    return Err(HuntError::Config("Q1 hunts need k >= 3".into()));
                }
                if self.structure.cardinality().is_none_or(|n| n > 40_320) {
                    return Err(HuntError::Config(
                        "Q1 structure must be finite with at most 40320 elements".into(),
                    ));
                }
            }
            Question::Q2 => {
                if self.structure != AmbientStructure::Integers {
                    return Err(HuntError::Config("Q2 hunts run over the integers".into()));
                }
                if self.k < 3 {
                    return Err(HuntError::Sumset(q2_small_k()));
                }
                if self.value_range < 0 {
                    return Err(HuntError::Config("value range must be nonnegative".into()));
                }
            }
        }
        Ok(())
    }
}

fn q1_commutative() -> SumsetError {
    SumsetError::NotCommutative("Question 1 targets noncommutative structures".into())
}

fn q2_small_k() -> SumsetError {
    SumsetError::Precondition("Question 2 needs k >= 3 B sets (k = 2 is a theorem)".into())
}

/// One evaluated instance. `violation` holds exactly when `lhs > rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct HuntRecord {
    pub instance_index: u64,
    pub question: Question,
    pub instance: Value,
    pub lhs: BigInt,
    pub rhs: BigInt,
    pub slack: BigInt,
    pub violation: bool,
}

impl HuntRecord {
    fn new(question: Question, instance: Value, lhs: BigInt, rhs: BigInt) -> Self {
        let slack = &rhs - &lhs;
        HuntRecord {
            instance_index: 0,
            question,
            instance,
            violation: lhs > rhs,
            lhs,
            rhs,
            slack,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "instance_index": self.instance_index,
            "question": self.question,
            "instance": self.instance,
            "lhs": self.lhs.to_string(),
            "rhs": self.rhs.to_string(),
            "slack": self.slack.to_string(),
            "violation": self.violation,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, HuntError> {
        let field = |k: &str| {
            v.get(k)
                .ok_or_else(|| HuntError::Config(format!("record lacks \"{k}\"")))
        };
        let big = |k: &str| -> Result<BigInt, HuntError> {
            field(k)?
                .as_str()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| HuntError::Config(format!("\"{k}\" must be a decimal string")))
        };
        Ok(HuntRecord {
            instance_index: field("instance_index")?.as_u64().unwrap_or_default(),
            question: serde_json::from_value(field("question")?.clone())
                .map_err(|e| HuntError::Config(e.to_string()))?,
            instance: field("instance")?.clone(),
            lhs: big("lhs")?,
            rhs: big("rhs")?,
            slack: big("slack")?,
            violation: field("violation")?.as_bool().unwrap_or_default(),
        })
    }
}

/// Evaluates Q1 for `sets` composed in list order.
pub fn eval_question1(structure: &AmbientStructure, sets: &[FiniteSet]) -> Result<HuntRecord, SumsetError> {
    if structure.is_commutative() {
        return Err(q1_commutative());
    }
    let k = sets.len();
    if k < 2 {
        return Err(SumsetError::NeedTwoSummands);
    }
    check_summands(structure, sets)?;
    let full = sumset(structure, sets)?.len();
    let mut rhs = BigInt::from(1);
    for i in 0..k {
        let mut spliced = sets.to_vec();
        let mut n_i = 0;
        for a in sets[i].iter() {
            spliced[i] = FiniteSet::from_sorted_unchecked(structure.clone(), vec![a.clone()]);
            n_i = n_i.max(sumset(structure, &spliced)?.len());
        }
        rhs *= n_i;
    }
    let lhs = BigInt::from(full).pow(k as u32 - 1);
    let instance = Instance::new(structure.clone(), sets.to_vec()).to_json();
    Ok(HuntRecord::new(Question::Q1, instance, lhs, rhs))
}

/// Evaluates Q2. The recorded instance lists its sets as `[A, B_1, ..., B_k, S]`.
pub fn eval_question2(a: &FiniteSet, bs: &[FiniteSet], s: &FiniteSet) -> Result<HuntRecord, SumsetError> {
    let z = AmbientStructure::Integers;
    let k = bs.len();
    if k < 3 {
        return Err(q2_small_k());
    }
    check_summands(&z, std::slice::from_ref(a))?;
    check_summands(&z, bs)?;
    check_summands(&z, std::slice::from_ref(s))?;
    let b_sum = sumset(&z, bs)?;
    if !s.is_subset_of(&b_sum) {
        return Err(SumsetError::NotSubset("B1+...+Bk".into()));
    }
    let lhs = BigInt::from(sumset(&z, &[s.clone(), a.clone()])?.len()).pow(k as u32);
    let mut rhs = BigInt::from(s.len());
    for i in 0..k {
        let mut parts = vec![a.clone()];
        parts.extend(bs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, b)| b.clone()));
        rhs *= sumset(&z, &parts)?.len();
    }
    let mut sets = vec![a.clone()];
    sets.extend_from_slice(bs);
    sets.push(s.clone());
    let instance = Instance::new(z, sets).to_json();
    Ok(HuntRecord::new(Question::Q2, instance, lhs, rhs))
}

/// Re-runs a logged instance through its evaluator.
pub fn reevaluate(question: Question, instance: &Value) -> Result<HuntRecord, HuntError> {
    let inst = Instance::from_json(instance)?;
    let record = match question {
        Question::Q1 => eval_question1(&inst.structure, &inst.sets)?,
        Question::Q2 => {
            let n = inst.sets.len();
            if n < 5 {
                return Err(HuntError::Config(
                    "Q2 instances list [A, B_1..B_k, S] with k >= 3".into(),
                ));
            }
            eval_question2(&inst.sets[0], &inst.sets[1..n - 1], &inst.sets[n - 1])?
        }
    };
    Ok(record)
}

/// Outcome of a hunt.
#[derive(Debug, Clone, PartialEq)]
pub struct HuntSummary {
    pub instances_run: u64,
    pub next_index: u64,
    pub min_slack: Option<BigInt>,
    /// The closest call: smallest slack, earliest index on ties.
    pub min_slack_record: Option<HuntRecord>,
    pub violations: Vec<HuntRecord>,
}

impl HuntSummary {
    pub fn found_violation(&self) -> bool {
        !self.violations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "instances_run": self.instances_run,
            "next_index": self.next_index,
            "min_slack": self.min_slack.as_ref().map(|s| s.to_string()),
            "min_slack_instance": self.min_slack_record.as_ref().map(HuntRecord::to_json),
            "violations": self.violations.iter().map(HuntRecord::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Subsets of `{0..n}` with `1..=cap` elements in increasing bitmask order.
#[derive(Debug, Clone)]
struct CappedSubsets {
    n: usize,
    cap: usize,
    current: Vec<usize>,
    done: bool,
}

impl CappedSubsets {
    fn new(n: usize, cap: usize) -> Self {
        CappedSubsets {
            n,
            cap,
            current: Vec::new(),
            done: n == 0,
        }
    }

    /// Adds `2^p` to the mask, `p <= min(current)`.
    fn add_power(&mut self, p: usize) {
        let run = self
            .current
            .iter()
            .enumerate()
            .take_while(|&(t, &v)| v == p + t)
            .count();
        self.current.drain(..run);
        self.current.insert(0, p + run);
    }
}

impl Iterator for CappedSubsets {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        self.add_power(0);
        while self.current.len() > self.cap {
            let low = self.current[0];
            self.add_power(low);
        }
        if *self.current.last().unwrap() >= self.n {
            self.done = true;
            return None;
        }
        Some(self.current.clone())
    }
}

fn pick(carrier: &[Element], idx: &[usize], structure: &AmbientStructure) -> FiniteSet {
    FiniteSet::from_sorted_unchecked(structure.clone(), idx.iter().map(|&i| carrier[i].clone()).collect())
}

/// Generated instance: Q1 summands, or Q2 `[A, B_1..B_k, S]`.
type Draft = Vec<FiniteSet>;

/// Exhaustive enumeration in canonical order: first set most significant.
struct ExhaustiveInstances {
    question: Question,
    structure: AmbientStructure,
    carrier: Vec<Element>,
    cap: usize,
    slots: usize,
    odometer: Vec<CappedSubsets>,
    values: Vec<Vec<usize>>,
    inner: Option<(Vec<Element>, CappedSubsets)>,
    started: bool,
    done: bool,
}

impl ExhaustiveInstances {
    fn new(config: &HuntConfig, carrier: Vec<Element>) -> Self {
        let slots = match config.question {
            Question::Q1 => config.k,
            Question::Q2 => config.k + 1,
        };
        ExhaustiveInstances {
            question: config.question,
            structure: config.structure.clone(),
            cap: config.size_cap,
            slots,
            odometer: Vec::new(),
            values: Vec::new(),
            inner: None,
            started: false,
            done: carrier.is_empty(),
            carrier,
        }
    }

    fn advance_outer(&mut self) -> bool {
        if !self.started {
            self.started = true;
            for _ in 0..self.slots {
                let mut it = CappedSubsets::new(self.carrier.len(), self.cap);
                match it.next() {
                    Some(v) => self.values.push(v),
                    None => return false,
                }
                self.odometer.push(it);
            }
            return true;
        }
        for pos in (0..self.slots).rev() {
            if let Some(v) = self.odometer[pos].next() {
                self.values[pos] = v;
                return true;
            }
            let mut fresh = CappedSubsets::new(self.carrier.len(), self.cap);
            self.values[pos] = fresh.next().expect("nonempty carrier");
            self.odometer[pos] = fresh;
        }
        false
    }

    fn outer_sets(&self) -> Vec<FiniteSet> {
        self.values
            .iter()
            .map(|v| pick(&self.carrier, v, &self.structure))
            .collect()
    }
}

impl Iterator for ExhaustiveInstances {
    type Item = Draft;
    fn next(&mut self) -> Option<Draft> {
        if self.done {
            return None;
        }
        match self.question {
            Question::Q1 => {
                if !self.advance_outer() {
                    self.done = true;
                    return None;
                }
                Some(self.outer_sets())
            }
            Question::Q2 => loop {
                if let Some((b_sum, subsets)) = self.inner.as_mut() {
                    if let Some(idx) = subsets.next() {
                        let s = pick(b_sum, &idx, &self.structure);
                        let mut sets = self.outer_sets();
                        sets.push(s);
                        return Some(sets);
                    }
                }
                if !self.advance_outer() {
                    self.done = true;
                    return None;
                }
                let bs = &self.outer_sets()[1..];
                let b_sum = sumset(&self.structure, bs)
                    .expect("nonempty generated sets")
                    .into_elements();
                let subsets = CappedSubsets::new(b_sum.len(), self.cap);
                self.inner = Some((b_sum, subsets));
            },
        }
    }
}

/// Uniform nonempty subset of `carrier` with at most `cap` elements.
fn random_subset(rng: &mut ChaCha8Rng, carrier: &[Element], cap: usize, structure: &AmbientStructure) -> FiniteSet {
    let n = carrier.len();
    let cap = cap.min(n);
    let weights: Vec<u128> = (1..=cap).map(|j| binomial(n, j)).collect();
    let total: u128 = weights.iter().sum();
    let mut ticket = rng.gen_range(0..total);
    let mut size = cap;
    for (j, w) in weights.iter().enumerate() {
        if ticket < *w {
            size = j + 1;
            break;
        }
        ticket -= w;
    }
    let mut idx: Vec<usize> = sample(rng, n, size).into_vec();
    idx.sort_unstable();
    pick(carrier, &idx, structure)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// The instance at `index` of a random hunt; depends only on `(seed, index)`.
fn random_instance(config: &HuntConfig, carrier: &[Element], index: u64) -> Draft {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index);
    let structure = &config.structure;
    let cap = config.size_cap;
    match config.question {
        Question::Q1 => (0..config.k)
            .map(|_| random_subset(&mut rng, carrier, cap, structure))
            .collect(),
        Question::Q2 => {
            let mut sets: Vec<FiniteSet> = (0..=config.k)
                .map(|_| random_subset(&mut rng, carrier, cap, structure))
                .collect();
            let b_sum = sumset(structure, &sets[1..])
                .expect("nonempty generated sets")
                .into_elements();
            sets.push(random_subset(&mut rng, &b_sum, cap, structure));
            sets
        }
    }
}

fn evaluate(config: &HuntConfig, draft: &Draft) -> Result<HuntRecord, SumsetError> {
    match config.question {
        Question::Q1 => eval_question1(&config.structure, draft),
        Question::Q2 => {
            let n = draft.len();
            eval_question2(&draft[0], &draft[1..n - 1], &draft[n - 1])
        }
    }
}

fn carrier(config: &HuntConfig) -> Vec<Element> {
    match config.question {
        Question::Q1 => config
            .structure
            .all_elements(40_320)
            .expect("validated finite structure"),
        Question::Q2 => (0..=config.value_range).map(Element::int).collect(),
    }
}

const BATCH: usize = 512;

/// Runs a hunt, writing one JSONL record per instance in index order.
pub fn run_hunt(config: &HuntConfig) -> Result<HuntSummary, HuntError> {
    config.validate()?;
    let carrier = carrier(config);
    let mut log: Option<BufWriter<File>> = match &config.log_path {
        Some(p) => {
            let file = if config.start_index > 0 {
                OpenOptions::new().create(true).append(true).open(p)?
            } else {
                File::create(p)?
            };
            Some(BufWriter::new(file))
        }
        None => None,
    };
    let end = config.start_index.saturating_add(config.instance_budget);
    let mut exhaustive = match config.mode {
        HuntMode::Exhaustive => {
            let mut it = ExhaustiveInstances::new(config, carrier.clone());
            for _ in 0..config.start_index {
                if it.next().is_none() {
                    break;
                }
            }
            Some(it)
        }
        HuntMode::Random => None,
    };

    let mut summary = HuntSummary {
        instances_run: 0,
        next_index: config.start_index,
        min_slack: None,
        min_slack_record: None,
        violations: Vec::new(),
    };
    let mut index = config.start_index;
    'outer: while index < end {
        let take = (end - index).min(BATCH as u64) as usize;
        let drafts: Vec<(u64, Draft)> = match exhaustive.as_mut() {
            Some(it) => it
                .by_ref()
                .take(take)
                .enumerate()
                .map(|(o, d)| (index + o as u64, d))
                .collect(),
            None => (0..take as u64)
                .map(|o| (index + o, random_instance(config, &carrier, index + o)))
                .collect(),
        };
        if drafts.is_empty() {
            break;
        }
        let records: Vec<HuntRecord> = drafts
            .par_iter()
            .map(|(i, d)| {
                evaluate(config, d).map(|mut r| {
                    r.instance_index = *i;
                    r
                })
            })
            .collect::<Result<_, _>>()?;
        for record in records {
            if let Some(w) = log.as_mut() {
                serde_json::to_writer(&mut *w, &record.to_json()).map_err(std::io::Error::from)?;
                w.write_all(b"\n")?;
            }
            summary.instances_run += 1;
            index = record.instance_index + 1;
            summary.next_index = index;
            if summary.min_slack.as_ref().is_none_or(|m| record.slack < *m) {
                summary.min_slack = Some(record.slack.clone());
                summary.min_slack_record = Some(record.clone());
            }
            if record.violation {
                summary.violations.push(record);
                if config.stop_on_violation {
                    break 'outer;
                }
            }
        }
        if let Some(p) = &config.checkpoint_path {
            write_checkpoint(p, summary.next_index)?;
        }
    }
    if let Some(mut w) = log {
        w.flush()?;
    }
    if let Some(p) = &config.checkpoint_path {
        write_checkpoint(p, summary.next_index)?;
    }
    Ok(summary)
}

fn write_checkpoint(path: &PathBuf, next_index: u64) -> Result<(), HuntError> {
    std::fs::write(
        path,
        serde_json::to_string(&json!({"next_index": next_index})).expect("json"),
    )?;
    Ok(())
}

/// Reads `{"next_index": n}`.
pub fn read_checkpoint(path: &PathBuf) -> Result<u64, HuntError> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(InstanceError::from)?;
    v.get("next_index")
        .and_then(Value::as_u64)
        .ok_or_else(|| HuntError::Config("checkpoint lacks next_index".into()))
}
