//! Bounded searches for the finite certificates behind Δ-sets, IP-sets and
//! IP−IP sets, plus gap/run scans and intersectivity refutation.
//!
//! A search that finds nothing only says that no certificate of the given
//! depth exists below the given bound. It never proves that the underlying
//! infinite structure is absent.

use serde::{Deserialize, Serialize};

use crate::bits::extract;
use crate::error::{Error, Result};
use crate::graph::{Budget, DistanceGraph};
use crate::pset::PSetView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    DeltaChain,
    IpGenerator,
    SyndeticGap,
    ThickRun,
    #[serde(rename = "ip_minus_ip")]
    IpMinusIp,
    IntersectiveHit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Strictly increasing list (Δ-chain `S`, or generator `A`).
    List(Vec<usize>),
    Value(usize),
}

/// A concrete certificate. `verified` is only set by re-checking the
/// certificate against a view with direct arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "WitnessJson", try_from = "WitnessJson")]
pub struct StructureWitness {
    pub kind: WitnessKind,
    pub certificate: Certificate,
    pub verified: bool,
    pub depth: Option<usize>,
    pub bound: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct WitnessJson {
    kind: WitnessKind,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    chain: Option<Vec<usize>>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    generator: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<usize>,
    verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound: Option<usize>,
}

impl From<StructureWitness> for WitnessJson {
    fn from(w: StructureWitness) -> Self {
        let (mut chain, mut generator, mut value) = (None, None, None);
        match (w.kind, w.certificate) {
            (WitnessKind::DeltaChain, Certificate::List(s)) => chain = Some(s),
            (_, Certificate::List(a)) => generator = Some(a),
            (_, Certificate::Value(v)) => value = Some(v),
        }
        WitnessJson {
            kind: w.kind,
            chain,
            generator,
            value,
            verified: w.verified,
            depth: w.depth,
            bound: w.bound,
        }
    }
}

impl TryFrom<WitnessJson> for StructureWitness {
    type Error = String;

    fn try_from(j: WitnessJson) -> std::result::Result<Self, String> {
        let certificate = match j.kind {
            WitnessKind::DeltaChain => Certificate::List(j.chain.ok_or("delta_chain needs `S`")?),
            WitnessKind::IpGenerator | WitnessKind::IpMinusIp => {
                Certificate::List(j.generator.ok_or("generator witness needs `A`")?)
            }
            _ => Certificate::Value(j.value.ok_or("scalar witness needs `value`")?),
        };
        Ok(StructureWitness {
            kind: j.kind,
            certificate,
            verified: j.verified,
            depth: j.depth,
            bound: j.bound,
        })
    }
}

impl StructureWitness {
    pub fn list(&self) -> Option<&[usize]> {
        match &self.certificate {
            Certificate::List(v) => Some(v),
            Certificate::Value(_) => None,
        }
    }

    pub fn value(&self) -> Option<usize> {
        match self.certificate {
            Certificate::Value(v) => Some(v),
            Certificate::List(_) => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("witness serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation("witness", e.to_string()))
    }
}

/// Outcome of a bounded search, carrying its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub depth: usize,
    pub bound: usize,
    pub explored: u64,
    pub witness: Option<StructureWitness>,
}

fn check_bound(view: &PSetView, bound: usize) -> Result<()> {
    if bound > view.horizon() {
        return Err(Error::OutOfRange {
            what: "search_bound",
            value: bound,
            horizon: view.horizon(),
        });
    }
    Ok(())
}

fn in_view(view: &PSetView, d: usize) -> bool {
    d >= 1 && d <= view.horizon() && view.has(d)
}

fn strictly_increasing(v: &[usize]) -> bool {
    v.first().is_none_or(|&x| x >= 1) && v.windows(2).all(|w| w[0] < w[1])
}

/// All nonempty subset sums, one entry per subset (duplicates kept).
pub fn subset_sums(gens: &[usize]) -> Vec<usize> {
    let mut sums = vec![0usize];
    for &g in gens {
        let shifted: Vec<usize> = sums.iter().map(|s| s + g).collect();
        sums.extend(shifted);
    }
    sums.remove(0);
    sums
}

/// `S` strictly increasing with every `s_i − s_j (i > j)` in `P`.
pub fn verify_delta_chain(view: &PSetView, chain: &[usize]) -> bool {
    strictly_increasing(chain)
        && chain
            .iter()
            .enumerate()
            .all(|(i, &hi)| chain[..i].iter().all(|&lo| in_view(view, hi - lo)))
}

/// `A` strictly increasing, its `2^|A| − 1` subset sums pairwise distinct and
/// all in `P`.
pub fn verify_ip_generator(view: &PSetView, gens: &[usize]) -> bool {
    if !strictly_increasing(gens) {
        return false;
    }
    let mut sums = subset_sums(gens);
    if !sums.iter().all(|&s| in_view(view, s)) {
        return false;
    }
    sums.sort_unstable();
    sums.windows(2).all(|w| w[0] < w[1])
}

/// `A` strictly increasing with distinct subset sums, and every `u − v` with
/// `u > v` in `FS(A)` in `P`.
pub fn verify_ip_ip_generator(view: &PSetView, gens: &[usize]) -> bool {
    if !strictly_increasing(gens) {
        return false;
    }
    let mut sums = subset_sums(gens);
    sums.sort_unstable();
    if sums.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    sums.iter()
        .enumerate()
        .all(|(i, &u)| sums[..i].iter().all(|&v| in_view(view, u - v)))
}

/// Re-checks a list witness against `view`. Scalar witnesses need their own
/// context and are rejected here.
pub fn verify(view: &PSetView, witness: &StructureWitness) -> bool {
    match (&witness.kind, &witness.certificate) {
        (WitnessKind::DeltaChain, Certificate::List(s)) => verify_delta_chain(view, s),
        (WitnessKind::IpGenerator, Certificate::List(a)) => verify_ip_generator(view, a),
        (WitnessKind::IpMinusIp, Certificate::List(a)) => verify_ip_ip_generator(view, a),
        (WitnessKind::SyndeticGap, Certificate::Value(g)) => {
            syndetic_gap(view).map(|s| s.gap) == Some(*g)
        }
        (WitnessKind::ThickRun, Certificate::Value(r)) => thick_run(view) == *r,
        _ => false,
    }
}

fn listed(
    kind: WitnessKind,
    view: &PSetView,
    list: Vec<usize>,
    depth: usize,
    bound: usize,
) -> StructureWitness {
    let mut w = StructureWitness {
        kind,
        certificate: Certificate::List(list),
        verified: false,
        depth: Some(depth),
        bound: Some(bound),
    };
    w.verified = verify(view, &w);
    assert!(
        w.verified,
        "search produced an invalid {kind:?} certificate"
    );
    w
}

/// Lexicographically least `S = (s_1 < … < s_depth)` with `s_depth <= bound`
/// and all pairwise differences in `P`.
pub fn find_delta_chain(
    view: &PSetView,
    depth: usize,
    bound: usize,
    budget: u64,
) -> Result<SearchReport> {
    if depth < 2 {
        return Err(Error::validation("depth", "delta chains need depth >= 2"));
    }
    check_bound(view, bound)?;
    let mut budget = Budget::new(budget);
    // Chains are translation invariant, so the least chain starts at 1 if any
    // chain fits below the bound. Vertex v stands for the value v + 1.
    let witness = if bound == 0 {
        None
    } else {
        let graph = DistanceGraph::new(view, bound);
        graph
            .first_clique(&[0], depth, &mut budget)?
            .map(|c| c.into_iter().map(|v| v + 1).collect::<Vec<_>>())
    };
    Ok(SearchReport {
        depth,
        bound,
        explored: budget.used(),
        witness: witness.map(|s| listed(WitnessKind::DeltaChain, view, s, depth, bound)),
    })
}

/// Lexicographically least `A = (a_1 < … < a_depth)` with distinct subset
/// sums, `FS(A) ⊆ P` and `ΣA <= bound`.
pub fn find_ip_generator(
    view: &PSetView,
    depth: usize,
    bound: usize,
    budget: u64,
) -> Result<SearchReport> {
    if depth < 1 {
        return Err(Error::validation("depth", "IP generators need depth >= 1"));
    }
    check_bound(view, bound)?;
    let mut budget = Budget::new(budget);
    let mut search = SumSearch {
        view,
        bound,
        depth,
        gens: Vec::new(),
        sums: Vec::new(),
        differences_too: false,
    };
    let found = search.run(&mut budget)?;
    Ok(SearchReport {
        depth,
        bound,
        explored: budget.used(),
        witness: found.map(|a| listed(WitnessKind::IpGenerator, view, a, depth, bound)),
    })
}

/// Lexicographically least `A` with distinct subset sums, every positive
/// difference of `FS(A)` in `P`, and `ΣA <= bound`.
pub fn find_ip_ip_generator(
    view: &PSetView,
    depth: usize,
    bound: usize,
    budget: u64,
) -> Result<SearchReport> {
    if depth < 1 {
        return Err(Error::validation(
            "depth",
            "IP-IP generators need depth >= 1",
        ));
    }
    check_bound(view, bound)?;
    let mut budget = Budget::new(budget);
    let mut search = SumSearch {
        view,
        bound,
        depth,
        gens: Vec::new(),
        sums: Vec::new(),
        differences_too: true,
    };
    let found = search.run(&mut budget)?;
    Ok(SearchReport {
        depth,
        bound,
        explored: budget.used(),
        witness: found.map(|a| listed(WitnessKind::IpMinusIp, view, a, depth, bound)),
    })
}

/// Depth-first search over increasing generator lists, in lexicographic
/// order, extending the subset-sum table one generator at a time.
struct SumSearch<'a> {
    view: &'a PSetView,
    bound: usize,
    depth: usize,
    gens: Vec<usize>,
    /// FS(gens), one entry per nonempty subset.
    sums: Vec<usize>,
    /// Check differences of sums (IP−IP) instead of the sums themselves.
    differences_too: bool,
}

impl SumSearch<'_> {
    fn run(&mut self, budget: &mut Budget) -> Result<Option<Vec<usize>>> {
        Ok(self.extend(budget)?.then(|| self.gens.clone()))
    }

    fn total(&self) -> usize {
        self.gens.iter().sum()
    }

    fn extend(&mut self, budget: &mut Budget) -> Result<bool> {
        if self.gens.len() == self.depth {
            return Ok(true);
        }
        let remaining = self.depth - self.gens.len();
        let start = self.gens.last().map_or(1, |&a| a + 1);
        let base = self.total();
        for a in start..=self.bound {
            // cheapest completion uses a, a+1, …, a+remaining-1
            let least_total = base + remaining * a + remaining * (remaining - 1) / 2;
            if least_total > self.bound {
                break;
            }
            budget.tick()?;
            if let Some(new_sums) = self.accept(a) {
                let old_len = self.sums.len();
                self.gens.push(a);
                self.sums.extend(new_sums);
                if self.extend(budget)? {
                    return Ok(true);
                }
                self.gens.pop();
                self.sums.truncate(old_len);
            }
        }
        Ok(false)
    }

    /// The sums contributed by generator `a` if the extended list is valid.
    fn accept(&self, a: usize) -> Option<Vec<usize>> {
        let new_sums: Vec<usize> = std::iter::once(a)
            .chain(self.sums.iter().map(|s| s + a))
            .collect();
        if new_sums.iter().any(|s| self.sums.contains(s)) {
            return None;
        }
        if !self.differences_too {
            return new_sums
                .iter()
                .all(|&s| in_view(self.view, s))
                .then_some(new_sums);
        }
        // new − old and new − new pairs; old − old pairs were checked earlier
        let cross_ok = new_sums
            .iter()
            .all(|&u| self.sums.iter().all(|&v| in_view(self.view, u.abs_diff(v))));
        let inner_ok = new_sums.iter().enumerate().all(|(i, &u)| {
            new_sums[..i]
                .iter()
                .all(|&v| in_view(self.view, u.abs_diff(v)))
        });
        (cross_ok && inner_ok).then_some(new_sums)
    }
}

/// Gap statistics of `A ∩ [1..H]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SyndeticGap {
    /// Longest run of non-members that ends before `H` (runs starting at 1
    /// count: the left end of ℕ is not a truncation).
    pub gap: usize,
    /// Length of the run of non-members ending at `H`, if `H ∉ A`.
    pub censored_tail: Option<usize>,
}

/// `None` when `A ∩ [1..H]` is empty.
pub fn syndetic_gap(view: &PSetView) -> Option<SyndeticGap> {
    let mut gap = 0;
    let mut run = 0;
    let mut any = false;
    for n in 1..=view.horizon() {
        if view.has(n) {
            any = true;
            gap = gap.max(run);
            run = 0;
        } else {
            run += 1;
        }
    }
    any.then_some(SyndeticGap {
        gap,
        censored_tail: (run > 0).then_some(run),
    })
}

/// Longest run of consecutive members within `[1..H]`.
pub fn thick_run(view: &PSetView) -> usize {
    let (mut best, mut run) = (0, 0);
    for n in 1..=view.horizon() {
        if view.has(n) {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

/// Least `e ∈ E ∩ (A − A)` within the shared horizon, as an
/// `IntersectiveHit`. `None` means `A − A` avoids `E` up to `H`.
pub fn intersective_refute(
    e_view: &PSetView,
    a_view: &PSetView,
) -> Result<Option<StructureWitness>> {
    if e_view.horizon() != a_view.horizon() {
        return Err(Error::validation(
            "horizon",
            format!(
                "E and A views must share a horizon ({} vs {})",
                e_view.horizon(),
                a_view.horizon()
            ),
        ));
    }
    let a = a_view.bits().words();
    let hit = e_view.members().find(|&e| {
        // some a with a, a + e both in A (bit i ⇔ i + 1 ∈ A)
        (0..a.len()).any(|w| a[w] & extract(a, (w * 64 + e) as isize) != 0)
    });
    Ok(hit.map(|e| {
        let mut w = StructureWitness {
            kind: WitnessKind::IntersectiveHit,
            certificate: Certificate::Value(e),
            verified: false,
            depth: None,
            bound: None,
        };
        w.verified = verify_intersective_hit(e_view, a_view, e);
        w
    }))
}

pub fn verify_intersective_hit(e_view: &PSetView, a_view: &PSetView, e: usize) -> bool {
    e >= 1
        && e <= e_view.horizon()
        && e_view.has(e)
        && a_view
            .members()
            .any(|a| a + e <= a_view.horizon() && a_view.has(a + e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pset::{build_pset, PSetSpec};
    use crate::DEFAULT_BUDGET;

    fn view(spec: PSetSpec, h: usize) -> PSetView {
        build_pset(&spec, h).unwrap()
    }

    fn list(r: &SearchReport) -> Option<Vec<usize>> {
        r.witness.as_ref().map(|w| {
            assert!(w.verified);
            w.list().unwrap().to_vec()
        })
    }

    #[test]
    fn delta_chain_examples() {
        let sq = view(PSetSpec::Squares, 100);
        let r = find_delta_chain(&sq, 3, 100, DEFAULT_BUDGET).unwrap();
        assert_eq!(list(&r), Some(vec![1, 10, 26]));
        let evens = view(PSetSpec::Multiples { k: 2 }, 10);
        let r = find_delta_chain(&evens, 4, 10, DEFAULT_BUDGET).unwrap();
        assert_eq!(list(&r), Some(vec![1, 3, 5, 7]));
        let one = view(PSetSpec::Explicit { elems: vec![1] }, 1000);
        assert_eq!(
            list(&find_delta_chain(&one, 3, 1000, DEFAULT_BUDGET).unwrap()),
            None
        );
        assert!(matches!(
            find_delta_chain(&one, 1, 10, DEFAULT_BUDGET),
            Err(Error::Validation { .. })
        ));
        assert!(matches!(
            find_delta_chain(&one, 2, 1001, DEFAULT_BUDGET),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn ip_generator_examples() {
        let nat = view(PSetSpec::Multiples { k: 1 }, 10);
        assert_eq!(
            list(&find_ip_generator(&nat, 3, 10, DEFAULT_BUDGET).unwrap()),
            Some(vec![1, 2, 4])
        );
        let evens = view(PSetSpec::Multiples { k: 2 }, 10);
        assert_eq!(
            list(&find_ip_generator(&evens, 2, 10, DEFAULT_BUDGET).unwrap()),
            Some(vec![2, 4])
        );
        let sq = view(PSetSpec::Squares, 10000);
        assert_eq!(
            list(&find_ip_generator(&sq, 2, 10000, DEFAULT_BUDGET).unwrap()),
            Some(vec![9, 16])
        );
        assert!(find_ip_generator(&sq, 0, 10, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn ip_ip_examples() {
        let m3 = view(PSetSpec::Multiples { k: 3 }, 30);
        assert_eq!(
            list(&find_ip_ip_generator(&m3, 2, 30, DEFAULT_BUDGET).unwrap()),
            Some(vec![3, 6])
        );
        let nat = view(PSetSpec::Multiples { k: 1 }, 20);
        assert_eq!(
            list(&find_ip_ip_generator(&nat, 3, 20, DEFAULT_BUDGET).unwrap()),
            Some(vec![1, 2, 4])
        );
        let five = view(PSetSpec::Explicit { elems: vec![5] }, 100);
        assert_eq!(
            list(&find_ip_ip_generator(&five, 2, 100, DEFAULT_BUDGET).unwrap()),
            None
        );
    }

    #[test]
    fn gaps_and_runs() {
        let evens = view(PSetSpec::Multiples { k: 2 }, 100);
        assert_eq!(syndetic_gap(&evens).unwrap().gap, 1);
        let sq = view(PSetSpec::Squares, 100);
        assert_eq!(
            syndetic_gap(&sq),
            Some(SyndeticGap {
                gap: 18,
                censored_tail: None
            })
        );
        let sq99 = view(PSetSpec::Squares, 99);
        assert_eq!(
            syndetic_gap(&sq99),
            Some(SyndeticGap {
                gap: 16,
                censored_tail: Some(18)
            })
        );
        let nat = view(PSetSpec::Multiples { k: 1 }, 50);
        assert_eq!(syndetic_gap(&nat).unwrap().gap, 0);
        assert_eq!(
            syndetic_gap(&view(PSetSpec::Explicit { elems: vec![] }, 5)),
            None
        );

        assert_eq!(thick_run(&view(PSetSpec::Squares.complement(), 100)), 18);
        assert_eq!(thick_run(&evens), 1);
        assert_eq!(thick_run(&nat), 50);
    }

    #[test]
    fn intersective_examples() {
        let sq = view(PSetSpec::Squares, 100);
        let evens = view(PSetSpec::Multiples { k: 2 }, 100);
        let hit = intersective_refute(&sq, &evens).unwrap().unwrap();
        assert_eq!(hit.value(), Some(4));
        assert!(hit.verified);
        let one = view(PSetSpec::Explicit { elems: vec![1] }, 1000);
        let evens = view(PSetSpec::Multiples { k: 2 }, 1000);
        assert_eq!(intersective_refute(&one, &evens).unwrap(), None);
        let nat = view(PSetSpec::Multiples { k: 1 }, 100);
        let a = view(
            PSetSpec::Explicit {
                elems: vec![10, 17, 40],
            },
            100,
        );
        assert_eq!(
            intersective_refute(&nat, &a).unwrap().unwrap().value(),
            Some(7)
        );
    }

    #[test]
    fn witness_json_shape() {
        let sq = view(PSetSpec::Squares, 100);
        let w = find_delta_chain(&sq, 3, 100, DEFAULT_BUDGET)
            .unwrap()
            .witness
            .unwrap();
        let text = w.to_json();
        assert_eq!(
            text,
            r#"{"kind":"delta_chain","S":[1,10,26],"verified":true,"depth":3,"bound":100}"#
        );
        assert_eq!(StructureWitness::from_json(&text).unwrap(), w);
        let bad = r#"{"kind":"delta_chain","A":[1],"verified":true}"#;
        assert!(StructureWitness::from_json(bad).is_err());
    }

    #[test]
    fn verify_rejects_bad_certificates() {
        let sq = view(PSetSpec::Squares, 100);
        assert!(!verify_delta_chain(&sq, &[1, 10, 27]));
        assert!(!verify_delta_chain(&sq, &[10, 1]));
        let nat = view(PSetSpec::Multiples { k: 1 }, 20);
        // 1 + 2 = 3 collides with the generator 3
        assert!(!verify_ip_generator(&nat, &[1, 2, 3]));
        assert!(verify_ip_generator(&nat, &[1, 2, 4]));
    }
}
