//! Availability-bias experiments built on the three algorithms.
//!
//! A guess state encodes how salient each item is before any search. The
//! same good probability `a` drives both the ease of recall (retrievals per
//! time budget, roughly `∝ √a`) and the counting judgment (`≈ aN`), so
//! whatever inflates `a` inflates both together. The scenarios below set up
//! partitions and salience weights, run recall and estimation side by side,
//! and check that their orderings agree.

use std::collections::HashSet;
use std::io::BufRead;

use rayon::prelude::*;
use serde::Serialize;

use crate::amplify::{amplified_state, availability_by_number, availability_by_speed, schedule};
use crate::count::{median, merge_register_outcomes, mode, scale_outcome, CountBin};
use crate::error::{Error, Result};
use crate::estimate::{est_amp_distribution, sample_outcome, EstimationConfig};
use crate::statevec::{check_dim, good_probability, measure, prepare, GuessPrep, Oracle};

const SAMPLE_WORDS: &str = include_str!("../data/sample_words.txt");

/// An ordered word list with optional per-word frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    words: Vec<String>,
    freqs: Option<Vec<f64>>,
}

impl Lexicon {
    pub fn new(words: Vec<String>, freqs: Option<Vec<f64>>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyLexicon);
        }
        let mut seen = HashSet::new();
        for (i, word) in words.iter().enumerate() {
            if word.is_empty() {
                return Err(Error::EmptyWord { line: i + 1 });
            }
            if !seen.insert(word.as_str()) {
                return Err(Error::DuplicateWord {
                    line: i + 1,
                    word: word.clone(),
                });
            }
        }
        if let Some(freqs) = &freqs {
            check_dim(words.len(), freqs.len())?;
            for (i, &f) in freqs.iter().enumerate() {
                if !f.is_finite() || f < 0.0 {
                    return Err(Error::NegativeFrequency {
                        line: i + 1,
                        value: f,
                    });
                }
            }
            if freqs.iter().sum::<f64>() <= 0.0 {
                return Err(Error::ZeroTotalWeight);
            }
        }
        Ok(Self { words, freqs })
    }

    /// The word list bundled with the crate.
    pub fn sample() -> Self {
        load_lexicon(SAMPLE_WORDS.as_bytes()).expect("bundled lexicon is valid")
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn freqs(&self) -> Option<&[f64]> {
        self.freqs.as_deref()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Parses `word` or `word<TAB>frequency` lines.
///
/// Words are lowercased. Blank lines and lines starting with `#` are skipped.
/// Either every entry carries a frequency or none does.
pub fn load_lexicon<R: BufRead>(source: R) -> Result<Lexicon> {
    let mut words = Vec::new();
    let mut freqs = Vec::new();
    let mut with_freq: Option<bool> = None;
    let mut seen = HashSet::new();

    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Io(e.to_string()))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (word, freq) = match line.split_once('\t') {
            Some((word, raw)) => {
                let raw = raw.trim();
                let value: f64 = raw.parse().map_err(|_| Error::MalformedFrequency {
                    line: line_no,
                    value: raw.to_string(),
                })?;
                if !value.is_finite() {
                    return Err(Error::MalformedFrequency {
                        line: line_no,
                        value: raw.to_string(),
                    });
                }
                if value < 0.0 {
                    return Err(Error::NegativeFrequency {
                        line: line_no,
                        value,
                    });
                }
                (word, Some(value))
            }
            None => (line, None),
        };
        match with_freq {
            None => with_freq = Some(freq.is_some()),
            Some(expected) if expected != freq.is_some() => {
                return Err(Error::MixedFormat { line: line_no })
            }
            _ => {}
        }
        let word = word.trim().to_lowercase();
        if word.is_empty() {
            return Err(Error::EmptyWord { line: line_no });
        }
        if !seen.insert(word.clone()) {
            return Err(Error::DuplicateWord {
                line: line_no,
                word,
            });
        }
        words.push(word);
        freqs.extend(freq);
    }

    if words.is_empty() {
        return Err(Error::EmptyLexicon);
    }
    let freqs = with_freq.unwrap_or(false).then_some(freqs);
    Lexicon::new(words, freqs)
}

/// Good items: words whose `position`-th character (1-based) is `letter`.
pub fn letter_position_oracle(lex: &Lexicon, letter: char, position: usize) -> Result<Oracle> {
    if position == 0 {
        return Err(Error::InvalidParameter("letter position is 1-based".into()));
    }
    let letter = letter.to_lowercase().next().unwrap_or(letter);
    Oracle::from_fn(lex.len(), |i| {
        lex.words[i].chars().nth(position - 1) == Some(letter)
    })
}

/// Guess state from base weights (frequencies, or 1) times every boost that covers a word.
pub fn build_guess_state(lex: &Lexicon, boosts: &[(Oracle, f64)]) -> Result<GuessPrep> {
    let mut weights = match &lex.freqs {
        Some(freqs) => freqs.clone(),
        None => vec![1.0; lex.len()],
    };
    for (oracle, factor) in boosts {
        check_dim(lex.len(), oracle.dim())?;
        if !factor.is_finite() || *factor <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "boost factor must be positive, got {factor}"
            )));
        }
        for x in oracle.good_indices() {
            weights[x] *= factor;
        }
    }
    GuessPrep::weighted(weights)
}

/// A group of items sharing one salience factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSpec {
    pub label: String,
    pub size: usize,
    pub weight_factor: f64,
}

impl GroupSpec {
    pub fn new(label: impl Into<String>, size: usize, weight_factor: f64) -> Self {
        Self {
            label: label.into(),
            size,
            weight_factor,
        }
    }
}

/// Whether recall ordering and estimate ordering agree across groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Agree,
    Disagree,
    /// Some pair is tied on recall or on the estimate, and none disagrees.
    Tie,
}

impl Agreement {
    /// Compares every pair of groups by `recalled` and by `t_hat`.
    pub fn from_groups(groups: &[GroupOutcome]) -> Self {
        let mut tied = false;
        for (i, g) in groups.iter().enumerate() {
            for h in &groups[i + 1..] {
                let recall = g.recalled.cmp(&h.recalled);
                let estimate = g.t_hat.partial_cmp(&h.t_hat);
                match estimate {
                    Some(est) if recall.is_ne() && est.is_ne() => {
                        if recall != est {
                            return Agreement::Disagree;
                        }
                    }
                    _ => tied = true,
                }
            }
        }
        if tied {
            Agreement::Tie
        } else {
            Agreement::Agree
        }
    }
}

/// Per-group measurements from one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupOutcome {
    pub label: String,
    /// True number of good items in the group's partition.
    pub t_true: usize,
    /// Good probability of the shared guess state for this partition.
    pub a: f64,
    /// Availability by speed: steps per retrieval attempt.
    pub speed: u64,
    /// Availability by number: attempts that fit in the budget.
    pub capacity: u64,
    /// Attempts that returned a good item.
    pub recalled: u64,
    pub y: usize,
    pub a_hat: f64,
    pub t_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub seed: u64,
    pub groups: Vec<GroupOutcome>,
    pub agreement: Agreement,
}

/// Outcome of spending a time budget on repeated retrievals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RecallTally {
    pub attempts: u64,
    pub recalled: u64,
    pub time_used: u64,
}

/// Stable 64-bit mix of a base seed and a stream tag.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Prepared per-partition quantities that do not depend on the seed.
struct Partition {
    label: String,
    oracle: Oracle,
    a: f64,
    speed: u64,
    capacity: u64,
    /// Outcome probabilities of one retrieval attempt.
    retrieval: Vec<f64>,
    estimation: EstimationConfig,
    register: Vec<f64>,
}

impl Partition {
    fn new(
        label: &str,
        prep: &GuessPrep,
        oracle: Oracle,
        register_dim: usize,
        budget: u64,
    ) -> Result<Self> {
        if oracle.good_count() == 0 {
            return Err(Error::EmptyPartition(label.to_string()));
        }
        let a = good_probability(&prepare(prep, oracle.dim())?, &oracle)?;
        let sched = schedule(a)?;
        let retrieval = amplified_state(prep, &oracle, sched.iterations)?.probabilities();
        let estimation = EstimationConfig::new(register_dim, prep.clone(), oracle.clone())?;
        let register = est_amp_distribution(&estimation)?;
        Ok(Self {
            label: label.to_string(),
            a,
            speed: availability_by_speed(a)?,
            capacity: availability_by_number(a, budget)?,
            retrieval,
            estimation,
            register,
            oracle,
        })
    }

    fn recall(&self, seed: u64) -> Result<RecallTally> {
        if self.capacity == 0 {
            return Ok(RecallTally {
                attempts: 0,
                recalled: 0,
                time_used: 0,
            });
        }
        let items = crate::statevec::sample_indices(&self.retrieval, seed, self.capacity as usize)?;
        Ok(RecallTally {
            attempts: self.capacity,
            recalled: items.iter().filter(|&&x| self.oracle.is_good(x)).count() as u64,
            time_used: self.capacity * self.speed,
        })
    }

    fn run(&self, seed: u64, stream: u64) -> Result<GroupOutcome> {
        let tally = self.recall(derive_seed(seed, 2 * stream))?;
        let outcome = sample_outcome(
            &self.estimation,
            self.register.clone(),
            derive_seed(seed, 2 * stream + 1),
        )?;
        let estimate = scale_outcome(&self.estimation, outcome.y, outcome.a_hat);
        Ok(GroupOutcome {
            label: self.label.clone(),
            t_true: self.oracle.good_count(),
            a: self.a,
            speed: self.speed,
            capacity: self.capacity,
            recalled: tally.recalled,
            y: outcome.y,
            a_hat: estimate.a_hat,
            t_hat: estimate.t_hat,
        })
    }

    fn count_bins(&self) -> Vec<CountBin> {
        merge_register_outcomes(&self.register, self.oracle.dim())
    }
}

fn run_partitions(partitions: &[Partition], seed: u64) -> Result<ScenarioResult> {
    let groups = partitions
        .iter()
        .enumerate()
        .map(|(i, p)| p.run(seed, i as u64))
        .collect::<Result<Vec<_>>>()?;
    let agreement = Agreement::from_groups(&groups);
    Ok(ScenarioResult {
        seed,
        groups,
        agreement,
    })
}

/// Repeated retrievals under a time budget.
///
/// Each attempt costs `availability_by_speed(a)` steps whether or not it
/// lands on a good item; only good outcomes count as recalled.
pub fn recall_under_budget(
    prep: &GuessPrep,
    oracle: &Oracle,
    budget: u64,
    seed: u64,
) -> Result<RecallTally> {
    let a = good_probability(&prepare(prep, oracle.dim())?, oracle)?;
    let attempts = availability_by_number(a, budget)?;
    if attempts == 0 {
        return Ok(RecallTally {
            attempts: 0,
            recalled: 0,
            time_used: 0,
        });
    }
    let speed = availability_by_speed(a)?;
    let state = amplified_state(prep, oracle, schedule(a)?.iterations)?;
    let items = measure(&state, seed, attempts as usize)?;
    Ok(RecallTally {
        attempts,
        recalled: items.iter().filter(|&&x| oracle.is_good(x)).count() as u64,
        time_used: attempts * speed,
    })
}

/// Exact per-group `t_hat` law, without sampling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupDistribution {
    pub label: String,
    pub t_true: usize,
    pub a: f64,
    pub modal_t_hat: f64,
    pub median_t_hat: f64,
    pub bins: Vec<CountBin>,
}

impl GroupDistribution {
    fn from_partition(p: &Partition) -> Self {
        let bins = p.count_bins();
        Self {
            label: p.label.clone(),
            t_true: p.oracle.good_count(),
            a: p.a,
            modal_t_hat: mode(&bins),
            median_t_hat: median(&bins),
            bins,
        }
    }
}

/// Parameters of the letter-position experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LetterScenario {
    pub letter: char,
    /// Salience multiplier applied to words with the letter first.
    pub boost: f64,
    pub register_dim: usize,
    pub budget: u64,
}

impl Default for LetterScenario {
    fn default() -> Self {
        Self {
            letter: 'r',
            boost: 4.0,
            register_dim: 128,
            budget: 60,
        }
    }
}

/// First-position versus third-position partitions over one boosted guess state.
pub struct LetterExperiment {
    partitions: Vec<Partition>,
}

impl LetterExperiment {
    pub fn new(lex: &Lexicon, params: &LetterScenario) -> Result<Self> {
        if !params.boost.is_finite() || params.boost <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "boost must be positive, got {}",
                params.boost
            )));
        }
        let first = letter_position_oracle(lex, params.letter, 1)?;
        let third = letter_position_oracle(lex, params.letter, 3)?;
        let prep = build_guess_state(lex, &[(first.clone(), params.boost)])?;
        let partitions = vec![
            Partition::new(
                "position-1",
                &prep,
                first,
                params.register_dim,
                params.budget,
            )?,
            Partition::new(
                "position-3",
                &prep,
                third,
                params.register_dim,
                params.budget,
            )?,
        ];
        Ok(Self { partitions })
    }

    pub fn run(&self, seed: u64) -> Result<ScenarioResult> {
        run_partitions(&self.partitions, seed)
    }

    pub fn distributions(&self) -> Vec<GroupDistribution> {
        self.partitions
            .iter()
            .map(GroupDistribution::from_partition)
            .collect()
    }
}

/// One run of the letter-position experiment.
pub fn run_letter_scenario(
    lex: &Lexicon,
    params: &LetterScenario,
    seed: u64,
) -> Result<ScenarioResult> {
    LetterExperiment::new(lex, params)?.run(seed)
}

/// Parameters of the two-group name-list experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamesScenario {
    pub groups: [GroupSpec; 2],
    pub register_dim: usize,
    pub budget: u64,
    pub trials: usize,
}

impl Default for NamesScenario {
    fn default() -> Self {
        Self {
            groups: [
                GroupSpec::new("famous", 19, 2.0),
                GroupSpec::new("less-famous", 20, 1.0),
            ],
            register_dim: 32,
            budget: 60,
            trials: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamesReport {
    pub trials: Vec<ScenarioResult>,
    pub distributions: Vec<GroupDistribution>,
    pub summary: CorrelationSummary,
}

/// Items `0..size₁` form the first group, the rest the second; trial `i` uses seed `seed + i`.
pub fn run_names_scenario(params: &NamesScenario, seed: u64) -> Result<NamesReport> {
    for g in &params.groups {
        if g.size == 0 {
            return Err(Error::InvalidParameter(format!(
                "group {:?} is empty",
                g.label
            )));
        }
        if !g.weight_factor.is_finite() || g.weight_factor <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "group {:?} needs a positive weight factor",
                g.label
            )));
        }
    }
    if params.trials < 2 {
        return Err(Error::InvalidParameter(
            "at least two trials are needed".into(),
        ));
    }
    let [first, second] = &params.groups;
    let n = first.size + second.size;
    let weights = (0..n)
        .map(|x| {
            if x < first.size {
                first.weight_factor
            } else {
                second.weight_factor
            }
        })
        .collect();
    let prep = GuessPrep::weighted(weights)?;
    let partitions = vec![
        Partition::new(
            &first.label,
            &prep,
            Oracle::new(n, 0..first.size)?,
            params.register_dim,
            params.budget,
        )?,
        Partition::new(
            &second.label,
            &prep,
            Oracle::new(n, first.size..n)?,
            params.register_dim,
            params.budget,
        )?,
    ];

    let trials = (0..params.trials as u64)
        .into_par_iter()
        .map(|i| run_partitions(&partitions, seed.wrapping_add(i)))
        .collect::<Result<Vec<_>>>()?;
    let summary = correlation_summary(&trials)?;
    Ok(NamesReport {
        distributions: partitions
            .iter()
            .map(GroupDistribution::from_partition)
            .collect(),
        trials,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationSummary {
    pub results: usize,
    pub agreements: usize,
    pub disagreements: usize,
    pub ties: usize,
    /// Fraction of untied results that agree; `None` when every result is tied.
    pub agreement_rate: Option<f64>,
    /// Spearman correlation of `√a` against `t_hat` over every group of every result.
    pub rank_correlation: Option<f64>,
}

impl CorrelationSummary {
    /// The agreement rate, or [`Error::NoSignal`] when every comparison tied.
    pub fn rate(&self) -> Result<f64> {
        self.agreement_rate.ok_or(Error::NoSignal)
    }
}

pub fn correlation_summary(results: &[ScenarioResult]) -> Result<CorrelationSummary> {
    if results.len() < 2 {
        return Err(Error::InvalidParameter(
            "correlation needs at least two results".into(),
        ));
    }
    let tally = |kind| results.iter().filter(|r| r.agreement == kind).count();
    let agreements = tally(Agreement::Agree);
    let disagreements = tally(Agreement::Disagree);
    let decided = agreements + disagreements;

    let (ease, judged): (Vec<f64>, Vec<f64>) = results
        .iter()
        .flat_map(|r| r.groups.iter().map(|g| (g.a.sqrt(), g.t_hat)))
        .unzip();

    Ok(CorrelationSummary {
        results: results.len(),
        agreements,
        disagreements,
        ties: tally(Agreement::Tie),
        agreement_rate: (decided > 0).then(|| agreements as f64 / decided as f64),
        rank_correlation: spearman(&ease, &judged),
    })
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut out = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            out[i] = rank;
        }
        start = end;
    }
    out
}

fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean) * (a - mean);
        syy += (b - mean) * (b - mean);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
