//! Exact language enumeration for the spacing shift of `P`.
//!
//! A length-`n` word is admissible iff the pairwise distances between its
//! 1-positions all lie in `P`, i.e. its 1-positions form a clique in the
//! distance graph on `{0, …, n − 1}`. Positions are 0-based.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Budget, DistanceGraph};
use crate::pset::PSetView;
use crate::rational::{ratio, ser_pq, sig17, to_pq, Rational};

/// Largest word length accepted by the naive `2ⁿ` enumerator.
pub const NAIVE_MAX_N: usize = 24;

/// A finite 0/1 word, stored as the sorted list of its 1-positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Configuration {
    len: usize,
    ones: Vec<usize>,
}

impl Configuration {
    pub fn new(len: usize, ones: Vec<usize>) -> Result<Self> {
        if ones.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation(
                "configuration",
                "ones must be strictly increasing",
            ));
        }
        if ones.last().is_some_and(|&last| last >= len) {
            return Err(Error::validation(
                "configuration",
                "a one lies outside the word",
            ));
        }
        Ok(Configuration { len, ones })
    }

    pub fn zeros(len: usize) -> Self {
        Configuration {
            len,
            ones: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn ones(&self) -> &[usize] {
        &self.ones
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        self.ones.binary_search(&i).is_ok()
    }

    pub fn to_bits(&self) -> Vec<bool> {
        let mut bits = vec![false; self.len];
        for &i in &self.ones {
            bits[i] = true;
        }
        bits
    }

    /// `σ^t` of the word, zero-filled at the right end to keep the length.
    pub fn shifted(&self, t: usize) -> Self {
        Configuration {
            len: self.len,
            ones: self
                .ones
                .iter()
                .filter(|&&i| i >= t)
                .map(|&i| i - t)
                .collect(),
        }
    }

    /// The word placed at `offset` inside a zero word of length `len`;
    /// ones falling past the end are dropped.
    pub fn embed(&self, offset: usize, len: usize) -> Self {
        Configuration {
            len,
            ones: self
                .ones
                .iter()
                .map(|&i| i + offset)
                .filter(|&i| i < len)
                .collect(),
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .to_bits()
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut ones = Vec::new();
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => ones.push(i),
                '0' => {}
                other => {
                    return Err(Error::validation(
                        "word",
                        format!("unexpected symbol {other:?}"),
                    ))
                }
            }
        }
        Ok(Configuration {
            len: s.chars().count(),
            ones,
        })
    }
}

/// Every pairwise distance between 1-positions lies in `P`.
pub fn is_admissible(config: &Configuration, view: &PSetView) -> Result<bool> {
    if let (Some(&first), Some(&last)) = (config.ones.first(), config.ones.last()) {
        if last - first > view.horizon() {
            return Err(Error::OutOfRange {
                what: "difference",
                value: last - first,
                horizon: view.horizon(),
            });
        }
    }
    let ones = &config.ones;
    Ok(ones
        .iter()
        .enumerate()
        .all(|(a, &i)| ones[a + 1..].iter().all(|&j| view.has(j - i))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    Naive,
    Optimized,
}

fn check_length(view: &PSetView, n: usize) -> Result<()> {
    if n > view.horizon() {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            horizon: view.horizon(),
        });
    }
    Ok(())
}

/// Exact number of admissible words of length `n`, the all-zero word included.
pub fn count_words(view: &PSetView, n: usize, mode: CountMode, budget: u64) -> Result<BigUint> {
    check_length(view, n)?;
    match mode {
        CountMode::Naive => count_naive(view, n),
        CountMode::Optimized => {
            let graph = DistanceGraph::new(view, n);
            graph.count_cliques(&graph.all(), &mut Budget::new(budget))
        }
    }
}

/// Tests all `2ⁿ` words pair by pair against the membership table.
fn count_naive(view: &PSetView, n: usize) -> Result<BigUint> {
    if n > NAIVE_MAX_N {
        return Err(Error::validation(
            "n",
            format!("naive enumeration is limited to n <= {NAIVE_MAX_N}"),
        ));
    }
    let allowed: Vec<bool> = (0..n).map(|d| d > 0 && view.has(d)).collect();
    let mut ones = Vec::with_capacity(n);
    let mut count = 0u64;
    for mask in 0u32..(1u32 << n) {
        ones.clear();
        ones.extend((0..n).filter(|&i| mask >> i & 1 == 1));
        let ok = ones
            .iter()
            .enumerate()
            .all(|(a, &i)| ones[a + 1..].iter().all(|&j| allowed[j - i]));
        count += ok as u64;
    }
    Ok(BigUint::from(count))
}

/// Maximum number of ones in an admissible length-`n` word, with the
/// lexicographically least witness.
pub fn max_ones(view: &PSetView, n: usize, budget: u64) -> Result<(usize, Configuration)> {
    check_length(view, n)?;
    let graph = DistanceGraph::new(view, n);
    let best = graph.max_clique(&graph.all(), &mut Budget::new(budget))?;
    Ok((best.len(), Configuration { len: n, ones: best }))
}

/// Scans `0..horizon` and keeps every position compatible with all ones
/// chosen so far.
pub fn greedy_point(view: &PSetView, horizon: usize) -> Result<Configuration> {
    check_length(view, horizon)?;
    let mut ones: Vec<usize> = Vec::new();
    for pos in 0..horizon {
        if ones.iter().all(|&c| view.has(pos - c)) {
            ones.push(pos);
        }
    }
    Ok(Configuration { len: horizon, ones })
}

pub fn log2_big(c: &BigUint) -> f64 {
    let bits = c.bits();
    if bits <= 64 {
        return c.to_u64().expect("fits").to_f64().expect("finite").log2();
    }
    let shift = bits - 64;
    let top = (c >> shift).to_u64().expect("fits") as f64;
    top.log2() + shift as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanguageRecord {
    pub n: usize,
    #[serde(serialize_with = "ser_decimal")]
    pub c_n: BigUint,
    pub h_n: f64,
    pub omega_n: usize,
    #[serde(serialize_with = "ser_pq")]
    pub omega_over_n: Rational,
}

fn ser_decimal<S: Serializer>(c: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_str_radix(10))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanguageProfile {
    pub records: Vec<LanguageRecord>,
}

/// `(n, c(n), log₂ c(n) / n, ω(n))` for every `n` in the grid.
pub fn entropy_profile(view: &PSetView, n_grid: &[usize], budget: u64) -> Result<LanguageProfile> {
    let records = n_grid
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::validation("n_grid", "lengths must be >= 1"));
            }
            let c_n = count_words(view, n, CountMode::Optimized, budget)?;
            let (omega_n, _) = max_ones(view, n, budget)?;
            Ok(LanguageRecord {
                n,
                h_n: log2_big(&c_n) / n as f64,
                c_n,
                omega_n,
                omega_over_n: ratio(omega_n, n),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LanguageProfile { records })
}

impl LanguageProfile {
    pub fn get(&self, n: usize) -> Option<&LanguageRecord> {
        self.records.iter().find(|r| r.n == n)
    }

    /// CSV with columns `n,c_n,h_n,omega_n,omega_over_n`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "c_n", "h_n", "omega_n", "omega_over_n"])?;
        for r in &self.records {
            w.write_record([
                r.n.to_string(),
                r.c_n.to_str_radix(10),
                sig17(r.h_n),
                r.omega_n.to_string(),
                to_pq(&r.omega_over_n),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Least gap `g ∈ [0, max_gap]` such that `u·0^g·v` is admissible, given
/// admissible `u` and `v`.
pub fn join_gap(
    view: &PSetView,
    u: &Configuration,
    v: &Configuration,
    max_gap: usize,
) -> Result<Option<usize>> {
    let reach = u.len + max_gap + v.len;
    if reach > view.horizon() + 1 {
        return Err(Error::OutOfRange {
            what: "|u| + gap + |v|",
            value: reach,
            horizon: view.horizon(),
        });
    }
    Ok((0..=max_gap).find(|&g| {
        u.ones
            .iter()
            .all(|&i| v.ones.iter().all(|&j| view.has(u.len + g + j - i)))
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitivityReport {
    pub word_len_cap: usize,
    pub gap_cap: usize,
    pub words: usize,
    pub joinable: usize,
    pub total: usize,
    /// First pair `(u, v)` in (length, lexicographic) order with no zero gap.
    pub least_failing: Option<(String, String)>,
}

impl TransitivityReport {
    pub fn all_joinable(&self) -> bool {
        self.joinable == self.total
    }
}

/// Admissible words of lengths `1..=max_len`, ordered by length then lexicographically.
pub fn admissible_words(view: &PSetView, max_len: usize) -> Result<Vec<Configuration>> {
    if max_len > NAIVE_MAX_N {
        return Err(Error::validation(
            "word_len_cap",
            format!("word enumeration is limited to length {NAIVE_MAX_N}"),
        ));
    }
    check_length(view, max_len)?;
    let mut words = Vec::new();
    for len in 1..=max_len {
        let mut this_len: Vec<Configuration> = (0u32..1 << len)
            .map(|mask| Configuration {
                len,
                ones: (0..len).filter(|&i| mask >> i & 1 == 1).collect(),
            })
            .filter(|c| is_admissible(c, view).unwrap_or(false))
            .collect();
        this_len.sort_by_key(|c| c.to_string());
        words.extend(this_len);
    }
    Ok(words)
}

/// Zero-gap joinability of every ordered pair of admissible words of length
/// at most `word_len_cap`, with gaps up to `gap_cap`.
pub fn transitive_gap_check(
    view: &PSetView,
    word_len_cap: usize,
    gap_cap: usize,
) -> Result<TransitivityReport> {
    if word_len_cap == 0 {
        return Err(Error::validation("word_len_cap", "must be >= 1"));
    }
    if 2 * word_len_cap + gap_cap > view.horizon() {
        return Err(Error::validation(
            "caps",
            format!(
                "2L + G = {} exceeds the horizon {}",
                2 * word_len_cap + gap_cap,
                view.horizon()
            ),
        ));
    }
    let words = admissible_words(view, word_len_cap)?;
    let mut joinable = 0;
    let mut least_failing = None;
    for u in &words {
        for v in &words {
            if join_gap(view, u, v, gap_cap)?.is_some() {
                joinable += 1;
            } else if least_failing.is_none() {
                least_failing = Some((u.to_string(), v.to_string()));
            }
        }
    }
    Ok(TransitivityReport {
        word_len_cap,
        gap_cap,
        words: words.len(),
        joinable,
        total: words.len() * words.len(),
        least_failing,
    })
}
