//! Named finite-scale experiments with machine-checkable verdicts.
//!
//! Each experiment records its observations as string tables, runs a list of
//! exact checks, and reports `consistent` when every check passes. A search
//! that runs out of nodes makes the whole run `inconclusive`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::corpus::{self, CORPUS_VERSION};
use crate::detect::{find_delta_chain, find_ip_ip_generator, verify};
use crate::dynamics::{named_points, periodic_point_check, proximal_probe, PeriodicOutcome};
use crate::error::{Error, Result};
use crate::language::{
    count_words, greedy_point, log2_big, max_ones, transitive_gap_check, CountMode,
};
use crate::pset::{build_pset, PSetSpec};
use crate::rational::{ratio, sig17, to_pq};

pub const EXPERIMENTS: [&str; 9] = [
    "delta-kills-density",
    "zero-density-zero-entropy",
    "density-entropy-bound",
    "entropy-iff-banach",
    "zero-entropy-proximal",
    "transitive-needs-ipip",
    "squares-zero-entropy",
    "positive-entropy-no-periodic",
    "high-density-trivial-dynamics",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Violation,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Violation => "violation",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub id: String,
    pub parameters: Value,
    pub budget: u64,
    pub observations: Vec<Table>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Long-format CSV: `table,row,column,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["table", "row", "column", "value"])?;
        for t in &self.observations {
            for (i, row) in t.rows.iter().enumerate() {
                for (c, v) in t.columns.iter().zip(row) {
                    w.write_record([t.name.as_str(), &i.to_string(), c, v])?;
                }
            }
        }
        for (i, c) in self.checks.iter().enumerate() {
            w.write_record(["checks", &i.to_string(), "name", &c.name])?;
            w.write_record(["checks", &i.to_string(), "passed", &c.passed.to_string()])?;
            w.write_record(["checks", &i.to_string(), "detail", &c.detail])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Default)]
struct Run {
    observations: Vec<Table>,
    checks: Vec<Check>,
    notes: Vec<String>,
}

impl Run {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }
}

/// `δ(n) = log₂(n + 1) / n`.
pub fn slack(n: usize) -> f64 {
    ((n + 1) as f64).log2() / n as f64
}

/// Shared trend rule for "decreasing toward 0": the last value is at most
/// half the first, and no step rises by more than `δ` at the later length.
pub fn decays(series: &[(usize, f64)]) -> std::result::Result<(), String> {
    let (Some(&(n0, first)), Some(&(n1, last))) = (series.first(), series.last()) else {
        return Err("empty series".into());
    };
    if last > first / 2.0 {
        return Err(format!(
            "value at n={n1} is {} > half of {} at n={n0}",
            sig17(last),
            sig17(first)
        ));
    }
    rises_within_slack(series)
}

/// No step of the series rises by more than `δ` at the later length.
pub fn rises_within_slack(series: &[(usize, f64)]) -> std::result::Result<(), String> {
    for pair in series.windows(2) {
        let ((_, a), (n, b)) = (pair[0], pair[1]);
        if b - a > slack(n) {
            return Err(format!(
                "rise {} at n={n} exceeds slack {}",
                sig17(b - a),
                sig17(slack(n))
            ));
        }
    }
    Ok(())
}

fn verdict_detail(r: std::result::Result<(), String>) -> (bool, String) {
    match r {
        Ok(()) => (true, "ok".into()),
        Err(e) => (false, e),
    }
}

/// `Σ_{j ≤ k} C(n, j)`.
pub fn binomial_prefix_sum(n: usize, k: usize) -> BigUint {
    let mut term = BigUint::one();
    let mut sum = BigUint::one();
    for j in 1..=k.min(n) {
        term = term * (n - j + 1) / j;
        sum += &term;
    }
    sum
}

fn parse<T: for<'de> Deserialize<'de>>(params: &Value) -> Result<T> {
    let params = if params.is_null() {
        json!({})
    } else {
        params.clone()
    };
    serde_json::from_value(params).map_err(|e| Error::validation("params", e.to_string()))
}

fn need(cond: bool, node: &str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::validation(node, reason))
    }
}

/// Runs one experiment. `params` is a JSON object whose keys override the
/// experiment defaults; `budget` caps every individual search.
pub fn run_experiment(id: &str, params: &Value, budget: u64) -> Result<ExperimentReport> {
    let mut run = Run::default();
    let outcome = match id {
        "delta-kills-density" => {
            parse(params).and_then(|p| delta_kills_density(p, budget, &mut run))
        }
        "zero-density-zero-entropy" => {
            parse(params).and_then(|p| zero_density_zero_entropy(p, budget, &mut run))
        }
        "density-entropy-bound" => {
            parse(params).and_then(|p| density_entropy_bound(p, budget, &mut run))
        }
        "entropy-iff-banach" => parse(params).and_then(|p| entropy_iff_banach(p, budget, &mut run)),
        "zero-entropy-proximal" => {
            parse(params).and_then(|p| zero_entropy_proximal(p, budget, &mut run))
        }
        "transitive-needs-ipip" => {
            parse(params).and_then(|p| transitive_needs_ipip(p, budget, &mut run))
        }
        "squares-zero-entropy" => {
            parse(params).and_then(|p| squares_zero_entropy(p, budget, &mut run))
        }
        "positive-entropy-no-periodic" => {
            parse(params).and_then(|p| positive_entropy_no_periodic(p, budget, &mut run))
        }
        "high-density-trivial-dynamics" => {
            parse(params).and_then(|p| high_density_trivial_dynamics(p, budget, &mut run))
        }
        other => return Err(Error::UnknownExperiment(other.to_string())),
    };
    let verdict = match outcome {
        Ok(parameters) => {
            let verdict = if run.checks.iter().all(|c| c.passed) {
                Verdict::Consistent
            } else {
                Verdict::Violation
            };
            return Ok(ExperimentReport {
                id: id.to_string(),
                parameters,
                budget,
                observations: run.observations,
                checks: run.checks,
                verdict,
                notes: run.notes,
            });
        }
        Err(Error::BudgetExhausted { budget }) => {
            run.note(format!(
                "a search exhausted its budget of {budget} nodes after {} completed checks",
                run.checks.len()
            ));
            Verdict::Inconclusive
        }
        Err(e) => return Err(e),
    };
    Ok(ExperimentReport {
        id: id.to_string(),
        parameters: if params.is_null() {
            json!({})
        } else {
            params.clone()
        },
        budget,
        observations: run.observations,
        checks: run.checks,
        verdict,
        notes: run.notes,
    })
}

fn not_multiples(k: usize) -> PSetSpec {
    PSetSpec::Multiples { k }.complement()
}

// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct KParams {
    k: usize,
    n_max: usize,
}

impl Default for KParams {
    fn default() -> Self {
        KParams { k: 3, n_max: 24 }
    }
}

fn delta_kills_density(p: KParams, budget: u64, run: &mut Run) -> Result<Value> {
    need(p.k >= 1, "k", "must be >= 1")?;
    need(p.n_max >= 1, "n_max", "must be >= 1")?;
    let spec = not_multiples(p.k);
    let view = build_pset(&spec, p.n_max)?;
    let hits: Vec<usize> = (p.k..=p.n_max)
        .step_by(p.k)
        .filter(|&m| view.has(m))
        .collect();
    run.check(
        "P avoids the multiples of k",
        hits.is_empty(),
        format!("multiples of {} in P up to {}: {hits:?}", p.k, p.n_max),
    );

    let mut table = Table::new("max_ones", &["n", "omega_n", "witness", "window_density"]);
    let mut series = Vec::new();
    let mut over = Vec::new();
    for n in 1..=p.n_max {
        let (omega, witness) = max_ones(&view, n, budget)?;
        if omega > p.k {
            over.push(n);
        }
        table.push(vec![
            n.to_string(),
            omega.to_string(),
            witness.to_string(),
            to_pq(&ratio(omega, n)),
        ]);
        series.push((n, omega as f64 / n as f64));
    }
    let last = table.rows.last().map(|r| r[1].clone()).unwrap_or_default();
    run.observations.push(table);
    run.check(
        "omega(n) <= k for every n",
        over.is_empty(),
        format!("violating n: {over:?}"),
    );
    let (ok, detail) = verdict_detail(decays(&series));
    run.check("witness window density decays", ok, detail);
    run.note(format!("omega({}) = {last}", p.n_max));
    Ok(json!({"spec": spec, "k": p.k, "n_max": p.n_max, "horizon": p.n_max}))
}

fn zero_density_zero_entropy(p: KParams, budget: u64, run: &mut Run) -> Result<Value> {
    need(p.k >= 1, "k", "must be >= 1")?;
    need(p.n_max >= 1, "n_max", "must be >= 1")?;
    let spec = not_multiples(p.k);
    let view = build_pset(&spec, p.n_max)?;
    let mut table = Table::new("complexity", &["n", "c_n", "poly_bound", "h_n"]);
    let mut series = Vec::new();
    let mut over = Vec::new();
    for n in 1..=p.n_max {
        let c = count_words(&view, n, CountMode::Optimized, budget)?;
        let bound = binomial_prefix_sum(n, p.k);
        if c > bound {
            over.push(n);
        }
        let h = log2_big(&c) / n as f64;
        table.push(vec![
            n.to_string(),
            c.to_string(),
            bound.to_string(),
            sig17(h),
        ]);
        series.push((n, h));
    }
    run.observations.push(table);
    run.check(
        "c(n) <= sum_{j<=k} C(n, j)",
        over.is_empty(),
        format!("violating n: {over:?}"),
    );
    let (ok, detail) = verdict_detail(decays(&series));
    run.check("h_n decays", ok, detail);
    Ok(json!({"spec": spec, "k": p.k, "n_max": p.n_max, "horizon": p.n_max}))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BoundParams {
    ks: Vec<usize>,
    n_min: usize,
    n_max: usize,
    l: u32,
    include_corpus: bool,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            ks: vec![1, 2, 3],
            n_min: 8,
            n_max: 24,
            l: 0,
            include_corpus: true,
        }
    }
}

/// `h_n ≥ γ/(l+1) − δ(n)` with `γ = ω(n)/n`, decided exactly as
/// `(c(n)·(n+1))^{l+1} ≥ 2^{ω(n)}`.
pub fn entropy_bound_holds(c: &BigUint, n: usize, omega: usize, l: u32) -> bool {
    (c * BigUint::from(n + 1)).pow(l + 1) >= BigUint::one() << omega
}

fn density_entropy_bound(p: BoundParams, budget: u64, run: &mut Run) -> Result<Value> {
    need(
        !p.ks.is_empty() && p.ks.iter().all(|&k| k >= 1),
        "ks",
        "must be a nonempty list of k >= 1",
    )?;
    need(
        p.n_min >= 1 && p.n_min <= p.n_max,
        "n_min",
        "must satisfy 1 <= n_min <= n_max",
    )?;
    let horizon = p.n_max;
    let mut targets: Vec<(String, PSetSpec, usize)> =
        p.ks.iter()
            .map(|&k| (format!("multiples{k}"), PSetSpec::Multiples { k }, k))
            .collect();
    if p.include_corpus {
        for m in corpus::shipped()? {
            if targets.iter().any(|(name, _, _)| name == m.name) {
                continue;
            }
            let view = build_pset(&m.spec, horizon)?;
            if let Some(&k) = p.ks.iter().find(|&&k| view.contains_multiples(k, horizon)) {
                targets.push((m.name.to_string(), m.spec, k));
            }
        }
    }
    let mut table = Table::new(
        "bound",
        &[
            "member", "k", "n", "c_n", "omega_n", "h_n", "gamma", "rhs", "holds",
        ],
    );
    let mut failures = Vec::new();
    for (name, spec, k) in &targets {
        let view = build_pset(spec, horizon)?;
        run.check(
            format!("{name} contains {k}N on [1..{horizon}]"),
            view.contains_multiples(*k, horizon),
            "",
        );
        for n in p.n_min..=p.n_max {
            let c = count_words(&view, n, CountMode::Optimized, budget)?;
            let (omega, _) = max_ones(&view, n, budget)?;
            let holds = entropy_bound_holds(&c, n, omega, p.l);
            if !holds {
                failures.push(format!("{name}@{n}"));
            }
            let rhs = omega as f64 / n as f64 / (p.l + 1) as f64 - slack(n);
            table.push(vec![
                name.clone(),
                k.to_string(),
                n.to_string(),
                c.to_string(),
                omega.to_string(),
                sig17(log2_big(&c) / n as f64),
                to_pq(&ratio(omega, n)),
                sig17(rhs),
                holds.to_string(),
            ]);
        }
    }
    run.observations.push(table);
    run.check(
        "h_n >= gamma/(l+1) - log2(n+1)/n",
        failures.is_empty(),
        format!("failures: {failures:?}"),
    );
    let members: Vec<&str> = targets.iter().map(|(n, _, _)| n.as_str()).collect();
    Ok(
        json!({"ks": p.ks, "n_min": p.n_min, "n_max": p.n_max, "l": p.l,
              "horizon": horizon, "members": members}),
    )
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SweepParams {
    n_grid: Vec<usize>,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams {
            n_grid: vec![8, 12, 16, 20, 24],
        }
    }
}

fn entropy_iff_banach(p: SweepParams, budget: u64, run: &mut Run) -> Result<Value> {
    need(
        !p.n_grid.is_empty() && p.n_grid.iter().all(|&n| n >= 1),
        "n_grid",
        "must be a nonempty list of n >= 1",
    )?;
    need(
        p.n_grid.windows(2).all(|w| w[0] < w[1]),
        "n_grid",
        "must be strictly increasing",
    )?;
    let horizon = *p.n_grid.last().expect("nonempty");
    let mut table = Table::new(
        "profile",
        &[
            "member",
            "n",
            "c_n",
            "h_n",
            "omega_n",
            "omega_over_n",
            "lower",
            "upper",
            "sandwiched",
        ],
    );
    let mut trends = Table::new("trends", &["member", "h_decays", "density_decays"]);
    let mut failures = Vec::new();
    for m in corpus::shipped()? {
        let view = build_pset(&m.spec, horizon)?;
        let (mut hs, mut gs) = (Vec::new(), Vec::new());
        for &n in &p.n_grid {
            let c = count_words(&view, n, CountMode::Optimized, budget)?;
            let (omega, _) = max_ones(&view, n, budget)?;
            let lower = BigUint::one() << omega;
            let upper = binomial_prefix_sum(n, omega);
            let ok = lower <= c && c <= upper;
            if !ok {
                failures.push(format!("{}@{n}", m.name));
            }
            let h = log2_big(&c) / n as f64;
            hs.push((n, h));
            gs.push((n, omega as f64 / n as f64));
            table.push(vec![
                m.name.to_string(),
                n.to_string(),
                c.to_string(),
                sig17(h),
                omega.to_string(),
                to_pq(&ratio(omega, n)),
                lower.to_string(),
                upper.to_string(),
                ok.to_string(),
            ]);
        }
        trends.push(vec![
            m.name.to_string(),
            decays(&hs).is_ok().to_string(),
            decays(&gs).is_ok().to_string(),
        ]);
    }
    run.observations.push(table);
    run.observations.push(trends);
    run.check(
        "2^omega(n) <= c(n) <= sum_{j<=omega(n)} C(n, j)",
        failures.is_empty(),
        format!("failures: {failures:?}"),
    );
    run.note(
        "the sandwich gives omega/n <= h_n <= H2(omega/n), so h_n and the best window density \
         omega/n vanish together; the trend table is informational",
    );
    Ok(json!({"n_grid": p.n_grid, "horizon": horizon, "corpus_version": CORPUS_VERSION}))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ProximalParams {
    members: Vec<String>,
    horizon: usize,
    /// Per-member horizons that replace `horizon`.
    horizon_overrides: BTreeMap<String, usize>,
    max_block: usize,
}

impl Default for ProximalParams {
    fn default() -> Self {
        ProximalParams {
            members: [
                "not-multiples2",
                "not-multiples3",
                "not-multiples5",
                "squares",
                "not-squares",
                "fs-powers-of-3",
                "delta-squares",
                "diffset-fs-1-4-16-64",
            ]
            .map(String::from)
            .to_vec(),
            horizon: 256,
            // the greedy square-difference-free point has its first gap of
            // more than 32 zeros at 276..311
            horizon_overrides: BTreeMap::from([("not-squares".to_string(), 512)]),
            max_block: 32,
        }
    }
}

fn resolve_member(name: &str) -> Result<PSetSpec> {
    corpus::member(name)
        .map(|m| m.spec)
        .ok_or_else(|| Error::validation("members", format!("unknown corpus member {name:?}")))
}

fn zero_entropy_proximal(p: ProximalParams, budget: u64, run: &mut Run) -> Result<Value> {
    let mut table = Table::new(
        "pairs",
        &[
            "member",
            "horizon",
            "x",
            "y",
            "first_agreement",
            "blocks_ok",
        ],
    );
    for name in &p.members {
        let horizon = p.horizon_overrides.get(name).copied().unwrap_or(p.horizon);
        need(
            p.max_block >= 1 && p.max_block <= horizon,
            "max_block",
            "must satisfy 1 <= max_block <= horizon",
        )?;
        let view = build_pset(&resolve_member(name)?, horizon)?;
        let points = named_points(&view, horizon, budget)?;
        let bad: Vec<&str> = points
            .iter()
            .filter(|x| !x.admissible)
            .map(|x| x.name.as_str())
            .collect();
        run.check(
            format!("{name}: generator points admissible"),
            bad.is_empty(),
            format!("{bad:?}"),
        );
        let mut failing = Vec::new();
        for (i, x) in points.iter().enumerate() {
            for y in &points[i + 1..] {
                let mut first = None;
                let mut ok = true;
                for block in 1..=p.max_block {
                    match proximal_probe(x, y, block)? {
                        Some(m) if block == p.max_block => first = Some(m),
                        Some(_) => {}
                        None => ok = false,
                    }
                }
                if !ok {
                    failing.push(format!("({}, {})", x.name, y.name));
                }
                table.push(vec![
                    name.clone(),
                    horizon.to_string(),
                    x.name.clone(),
                    y.name.clone(),
                    first.map_or("none".into(), |m| m.to_string()),
                    ok.to_string(),
                ]);
            }
        }
        run.check(
            format!(
                "{name}: every pair agrees on a block of each length <= {}",
                p.max_block
            ),
            failing.is_empty(),
            format!("failing pairs: {failing:?}"),
        );
    }
    run.observations.push(table);
    Ok(json!({"members": p.members, "horizon": p.horizon,
              "horizon_overrides": p.horizon_overrides, "max_block": p.max_block}))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct NonTransitive {
    k: usize,
    p: (usize, usize),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TransitiveParams {
    generators: Vec<Vec<usize>>,
    horizon: usize,
    word_len_cap: usize,
    gap_cap: usize,
    ipip_depth: usize,
    ipip_bound: usize,
    non_transitive: Vec<NonTransitive>,
}

impl Default for NonTransitive {
    fn default() -> Self {
        NonTransitive { k: 3, p: (1, 2) }
    }
}

impl Default for TransitiveParams {
    fn default() -> Self {
        TransitiveParams {
            generators: vec![vec![1, 4, 16, 64], vec![1, 3, 9, 27], vec![2, 5, 13, 40]],
            horizon: 200,
            word_len_cap: 3,
            gap_cap: 40,
            ipip_depth: 3,
            ipip_bound: 200,
            non_transitive: vec![NonTransitive::default(), NonTransitive { k: 4, p: (1, 3) }],
        }
    }
}

fn transitive_needs_ipip(p: TransitiveParams, budget: u64, run: &mut Run) -> Result<Value> {
    let mut joins = Table::new(
        "joinability",
        &[
            "instance",
            "words",
            "joinable",
            "total",
            "least_failing_u",
            "least_failing_v",
        ],
    );
    let mut ipip = Table::new("ipip", &["instance", "witness", "verified"]);
    let push_join = |t: &mut Table, name: &str, r: &crate::language::TransitivityReport| {
        let (u, v) = r.least_failing.clone().unwrap_or_default();
        t.push(vec![
            name.to_string(),
            r.words.to_string(),
            r.joinable.to_string(),
            r.total.to_string(),
            u,
            v,
        ]);
    };
    let mut specs = Vec::new();
    for gens in &p.generators {
        let fs = build_pset(&PSetSpec::FiniteSums { gens: gens.clone() }, p.horizon)?;
        let spec = PSetSpec::DiffSet {
            set: fs.members().collect(),
        };
        let view = build_pset(&spec, p.horizon)?;
        let name = format!("diffset-fs{gens:?}");
        let r = transitive_gap_check(&view, p.word_len_cap, p.gap_cap)?;
        push_join(&mut joins, &name, &r);
        run.check(
            format!("{name}: all word pairs joinable"),
            r.all_joinable(),
            format!("{}/{} joinable", r.joinable, r.total),
        );
        let search = find_ip_ip_generator(&view, p.ipip_depth, p.ipip_bound, budget)?;
        let verified = search.witness.as_ref().is_some_and(|w| verify(&view, w));
        ipip.push(vec![
            name.clone(),
            search
                .witness
                .as_ref()
                .map_or("none".into(), |w| w.to_json()),
            verified.to_string(),
        ]);
        run.check(
            format!("{name}: IP-IP generator found and verified"),
            verified,
            "",
        );
        specs.push(spec);
    }
    for nt in &p.non_transitive {
        need(nt.k >= 1, "non_transitive.k", "must be >= 1")?;
        let (p1, p2) = (nt.p.0.min(nt.p.1), nt.p.0.max(nt.p.1));
        need(
            p1 >= 1 && (p2 - p1) % nt.k != 0,
            "non_transitive.p",
            "p2 - p1 must not be a multiple of k",
        )?;
        let spec = PSetSpec::Union {
            of: vec![
                PSetSpec::Multiples { k: nt.k },
                PSetSpec::Explicit {
                    elems: vec![p1, p2],
                },
            ],
        };
        let view = build_pset(&spec, p.horizon)?;
        let r = transitive_gap_check(&view, p.word_len_cap, p.gap_cap)?;
        push_join(&mut joins, &format!("multiples{}+{{{p1},{p2}}}", nt.k), &r);
        run.note(format!(
            "{}N + {{{p1},{p2}}}: {} of {} pairs not joinable within gap {}",
            nt.k,
            r.total - r.joinable,
            r.total,
            p.gap_cap
        ));
    }
    run.observations.push(joins);
    run.observations.push(ipip);
    Ok(
        json!({"instances": specs, "non_transitive": p.non_transitive, "horizon": p.horizon,
              "word_len_cap": p.word_len_cap, "gap_cap": p.gap_cap,
              "ipip_depth": p.ipip_depth, "ipip_bound": p.ipip_bound}),
    )
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SquaresParams {
    n_grid: Vec<usize>,
    delta_depth: usize,
    delta_bound: usize,
    deep_depths: Vec<usize>,
    deep_bound: usize,
    deep_budget: u64,
}

impl Default for SquaresParams {
    fn default() -> Self {
        SquaresParams {
            n_grid: vec![8, 12, 16, 20, 24],
            delta_depth: 3,
            delta_bound: 100,
            deep_depths: vec![5, 6],
            deep_bound: 1000,
            deep_budget: 100_000,
        }
    }
}

fn squares_zero_entropy(p: SquaresParams, budget: u64, run: &mut Run) -> Result<Value> {
    need(p.n_grid.len() >= 2, "n_grid", "needs at least two lengths")?;
    need(
        p.n_grid.windows(2).all(|w| w[0] < w[1]) && p.n_grid[0] >= 1,
        "n_grid",
        "must be strictly increasing from n >= 1",
    )?;
    let horizon = *p.n_grid.last().expect("nonempty");
    let spec = PSetSpec::Squares.complement();
    let view = build_pset(&spec, horizon)?;
    let mut table = Table::new("profile", &["n", "c_n", "h_n", "omega_n", "omega_over_n"]);
    let (mut hs, mut gs) = (Vec::new(), Vec::new());
    let mut exact_gs = Vec::new();
    for &n in &p.n_grid {
        let c = count_words(&view, n, CountMode::Optimized, budget)?;
        let (omega, _) = max_ones(&view, n, budget)?;
        let h = log2_big(&c) / n as f64;
        hs.push((n, h));
        gs.push((n, omega as f64 / n as f64));
        exact_gs.push(ratio(omega, n));
        table.push(vec![
            n.to_string(),
            c.to_string(),
            sig17(h),
            omega.to_string(),
            to_pq(&ratio(omega, n)),
        ]);
    }
    run.observations.push(table);
    let (h0, h1) = (hs[0].1, hs[hs.len() - 1].1);
    run.check(
        "h_n at the last length < h_n at the first",
        h1 < h0,
        format!("{} vs {}", sig17(h1), sig17(h0)),
    );
    let (g0, g1) = (exact_gs[0], exact_gs[exact_gs.len() - 1]);
    run.check(
        "omega(n)/n at the last length < at the first",
        g1 < g0,
        format!("{} vs {}", to_pq(&g1), to_pq(&g0)),
    );
    let (ok, detail) = verdict_detail(rises_within_slack(&hs));
    run.check("h_n rises stay within slack", ok, detail);
    let (ok, detail) = verdict_detail(rises_within_slack(&gs));
    run.check("omega(n)/n rises stay within slack", ok, detail);

    let squares = build_pset(&PSetSpec::Squares, p.delta_bound.max(p.deep_bound))?;
    let mut chains = Table::new(
        "delta_chains",
        &["depth", "bound", "budget", "outcome", "explored"],
    );
    let r = find_delta_chain(&squares, p.delta_depth, p.delta_bound, budget)?;
    let verified = r.witness.as_ref().is_some_and(|w| verify(&squares, w));
    chains.push(vec![
        p.delta_depth.to_string(),
        p.delta_bound.to_string(),
        budget.to_string(),
        r.witness.as_ref().map_or("none".into(), |w| w.to_json()),
        r.explored.to_string(),
    ]);
    run.check(
        format!(
            "Squares has a depth-{} delta chain below {}",
            p.delta_depth, p.delta_bound
        ),
        verified,
        "",
    );
    for &depth in &p.deep_depths {
        let outcome = match find_delta_chain(&squares, depth, p.deep_bound, p.deep_budget) {
            Ok(r) => (
                r.witness.map_or("none".into(), |w| w.to_json()),
                r.explored.to_string(),
            ),
            Err(Error::BudgetExhausted { .. }) => {
                ("budget_exhausted".into(), p.deep_budget.to_string())
            }
            Err(e) => return Err(e),
        };
        chains.push(vec![
            depth.to_string(),
            p.deep_bound.to_string(),
            p.deep_budget.to_string(),
            outcome.0,
            outcome.1,
        ]);
    }
    run.observations.push(chains);
    Ok(json!({"spec": spec, "n_grid": p.n_grid, "horizon": horizon,
              "delta_depth": p.delta_depth, "delta_bound": p.delta_bound,
              "deep_depths": p.deep_depths, "deep_bound": p.deep_bound, "deep_budget": p.deep_budget}))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct NoPeriodicParams {
    s: PSetSpec,
    s_horizon: usize,
    n_grid: Vec<usize>,
    min_slope: (usize, usize),
    max_period: usize,
    periodic_horizon: usize,
}

impl Default for NoPeriodicParams {
    fn default() -> Self {
        NoPeriodicParams {
            s: PSetSpec::Bohr {
                alpha: std::f64::consts::SQRT_2 - 1.0,
                interval: (0.0, 0.2),
            },
            s_horizon: 200,
            n_grid: vec![8, 12, 16, 20, 24, 32],
            min_slope: (1, 5),
            max_period: 6,
            periodic_horizon: 120,
        }
    }
}

fn positive_entropy_no_periodic(p: NoPeriodicParams, budget: u64, run: &mut Run) -> Result<Value> {
    p.s.validate()?;
    need(p.min_slope.1 >= 1, "min_slope", "denominator must be >= 1")?;
    need(p.max_period >= 1, "max_period", "must be >= 1")?;
    need(
        p.periodic_horizon <= p.s_horizon,
        "periodic_horizon",
        "must not exceed s_horizon",
    )?;
    need(
        p.n_grid.iter().all(|&n| n >= 1 && n <= p.s_horizon),
        "n_grid",
        "lengths must lie in [1..s_horizon]",
    )?;
    let s_view = build_pset(&p.s, p.s_horizon)?;
    let s: Vec<usize> = s_view.members().collect();
    let spec = PSetSpec::DiffSet { set: s.clone() };
    let view = build_pset(&spec, p.s_horizon)?;
    let slope = ratio(p.min_slope.0, p.min_slope.1);

    let mut table = Table::new("growth", &["n", "omega_n", "s_window_max", "omega_over_n"]);
    let (mut below_window, mut below_slope) = (Vec::new(), Vec::new());
    for &n in &p.n_grid {
        let (omega, _) = max_ones(&view, n, budget)?;
        // any n consecutive positions of S form an admissible word
        let window = (1..=p.s_horizon + 1 - n)
            .map(|a| s.iter().filter(|&&x| x >= a && x < a + n).count())
            .max()
            .unwrap_or(0);
        if omega < window {
            below_window.push(n);
        }
        if ratio(omega, n) < slope {
            below_slope.push(n);
        }
        table.push(vec![
            n.to_string(),
            omega.to_string(),
            window.to_string(),
            to_pq(&ratio(omega, n)),
        ]);
    }
    run.observations.push(table);
    run.check(
        "omega(n) >= densest window of S",
        below_window.is_empty(),
        format!("violating n: {below_window:?}"),
    );
    run.check(
        format!("omega(n)/n >= {}", to_pq(&slope)),
        below_slope.is_empty(),
        format!("violating n: {below_slope:?}"),
    );

    let mut periodic = Table::new("periodic", &["k", "outcome", "least_failing_multiple"]);
    let mut found = Vec::new();
    for k in 1..=p.max_period {
        match periodic_point_check(&view, k, p.periodic_horizon)? {
            PeriodicOutcome::Periodic(_) => {
                found.push(k);
                periodic.push(vec![k.to_string(), "periodic".into(), String::new()]);
            }
            PeriodicOutcome::Missing {
                least_failing_multiple,
            } => periodic.push(vec![
                k.to_string(),
                "missing".into(),
                least_failing_multiple.to_string(),
            ]),
        }
    }
    run.observations.push(periodic);
    run.check(
        format!("no periodic point of period <= {}", p.max_period),
        found.is_empty(),
        format!("periodic for k in {found:?}"),
    );
    run.note("the candidate is not certified Bohr-free; findings hold on the stated horizons only");
    Ok(
        json!({"s": p.s, "s_horizon": p.s_horizon, "spec_digest": spec.digest(), "n_grid": p.n_grid,
              "min_slope": to_pq(&slope), "max_period": p.max_period,
              "periodic_horizon": p.periodic_horizon}),
    )
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct HighDensityParams {
    k: usize,
    horizon: usize,
    epsilon: (usize, usize),
}

impl Default for HighDensityParams {
    fn default() -> Self {
        HighDensityParams {
            k: 10,
            horizon: 1000,
            epsilon: (1, 8),
        }
    }
}

fn high_density_trivial_dynamics(
    p: HighDensityParams,
    budget: u64,
    run: &mut Run,
) -> Result<Value> {
    need(p.k >= 1, "k", "must be >= 1")?;
    need(p.epsilon.1 >= 1, "epsilon", "denominator must be >= 1")?;
    need(p.horizon >= p.k, "horizon", "must be >= k")?;
    let eps = ratio(p.epsilon.0, p.epsilon.1);
    run.check(
        "1/k < epsilon",
        ratio(1, p.k) < eps,
        format!("1/{} vs {}", p.k, to_pq(&eps)),
    );
    let spec = not_multiples(p.k);
    let view = build_pset(&spec, p.horizon)?;
    let floor = ratio(p.k - 1, p.k);
    let mut count = 0;
    let mut low = Vec::new();
    for n in 1..=p.horizon {
        count += view.has(n) as usize;
        if ratio(count, n) < floor {
            low.push(n);
        }
    }
    let mut table = Table::new("points", &["point", "ones", "positions"]);
    run.check(
        "prefix density of P >= 1 - 1/k at every n",
        low.is_empty(),
        format!(
            "density at H = {}; violating n: {low:?}",
            to_pq(&ratio(count, p.horizon))
        ),
    );
    let greedy = greedy_point(&view, p.horizon)?;
    let points = named_points(&view, p.horizon.min(256), budget)?;
    table.push(vec![
        "greedy".into(),
        greedy.ones().len().to_string(),
        format!("{:?}", greedy.ones()),
    ]);
    for x in &points {
        table.push(vec![
            x.name.clone(),
            x.config.ones().len().to_string(),
            format!("{:?}", x.config.ones()),
        ]);
    }
    let heavy: Vec<&str> = points
        .iter()
        .filter(|x| x.config.ones().len() > p.k)
        .map(|x| x.name.as_str())
        .collect();
    run.check(
        "greedy point has at most k ones",
        greedy.ones().len() <= p.k,
        format!("{} ones", greedy.ones().len()),
    );
    run.check(
        "generator points have at most k ones",
        heavy.is_empty(),
        format!("{heavy:?}"),
    );
    run.observations.push(table);
    Ok(json!({"spec": spec, "k": p.k, "horizon": p.horizon, "epsilon": to_pq(&eps)}))
}

// ---------------------------------------------------------------------------

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes `<id>.json` and `<id>.csv` (and SVG plots when asked) into `dir`.
pub fn write_report(dir: &Path, report: &ExperimentReport, plots: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_atomic(
        &dir.join(format!("{}.json", report.id)),
        (report.to_json() + "\n").as_bytes(),
    )?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    write_atomic(&dir.join(format!("{}.csv", report.id)), &csv)?;
    if plots {
        for (name, svg) in crate::plot::report_plots(report) {
            write_atomic(&dir.join(name), svg.as_bytes())?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexEntry {
    pub id: String,
    pub verdict: Verdict,
    pub checks: usize,
    pub failed: usize,
}

/// Runs every experiment with its defaults and writes the reports plus an
/// `index.json` into `dir`.
pub fn run_all(dir: &Path, budget: u64, plots: bool) -> Result<Vec<IndexEntry>> {
    let mut index = Vec::new();
    for id in EXPERIMENTS {
        let report = run_experiment(id, &Value::Null, budget)?;
        write_report(dir, &report, plots)?;
        index.push(IndexEntry {
            id: id.to_string(),
            verdict: report.verdict,
            checks: report.checks.len(),
            failed: report.failed_checks().count(),
        });
    }
    let doc = json!({"corpus_version": CORPUS_VERSION, "experiments": index});
    let text = serde_json::to_string_pretty(&doc).expect("index serializes") + "\n";
    write_atomic(&dir.join("index.json"), text.as_bytes())?;
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_sums() {
        assert_eq!(binomial_prefix_sum(5, 0), BigUint::from(1u32));
        assert_eq!(binomial_prefix_sum(5, 2), BigUint::from(16u32));
        assert_eq!(binomial_prefix_sum(4, 9), BigUint::from(16u32));
    }

    #[test]
    fn trend_rule() {
        assert!(decays(&[(1, 1.0), (2, 0.7), (3, 0.4)]).is_ok());
        assert!(decays(&[(1, 1.0), (2, 0.6)]).is_err());
        // a rise of 0.5 at n=2 exceeds log2(3)/2
        assert!(decays(&[(1, 1.0), (2, 0.1), (3, 0.9), (4, 0.2)]).is_err());
    }

    #[test]
    fn entropy_bound_at_multiples2_n20() {
        // c(20) = 2047, omega = 10
        assert!(entropy_bound_holds(&BigUint::from(2047u32), 20, 10, 0));
        assert!(!entropy_bound_holds(&BigUint::from(1u32), 20, 10, 0));
    }

    #[test]
    fn unknown_experiment() {
        let err = run_experiment("nope", &Value::Null, 10).unwrap_err();
        assert!(matches!(err, Error::UnknownExperiment(_)));
    }

    #[test]
    fn delta_kills_density_example() {
        let r = run_experiment(
            "delta-kills-density",
            &json!({"k": 3, "n_max": 24}),
            crate::DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Consistent, "{:?}", r.checks);
        let t = &r.observations[0];
        assert_eq!(t.rows.last().unwrap()[1], "3");
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let r = run_experiment("zero-density-zero-entropy", &Value::Null, 5).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.notes[0].contains("budget of 5"));
    }

    #[test]
    fn bad_params_are_validation_errors() {
        let err = run_experiment("delta-kills-density", &json!({"kk": 3}), 10).unwrap_err();
        assert_eq!(err.kind(), "validation");
    }
}
