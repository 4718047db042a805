//! Symbolic descriptions of subsets of ℕ = {1, 2, 3, ...}, their finite
//! materialization, and density estimates at a finite horizon.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::BitRow;
use crate::error::{Error, Result};
use crate::rational::{ratio, ser_pq, ser_pq_pairs, Rational};

/// Shrink applied to both ends of a Bohr interval before testing `frac(n·α)`.
pub const BOHR_MARGIN: f64 = 1e-9;

/// Constructor tree for a set `P ⊆ ℕ`.
///
/// The JSON form is internally tagged by `"type"`, e.g. `{"type":"multiples","k":3}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PSetSpec {
    Explicit {
        elems: Vec<usize>,
    },
    Multiples {
        k: usize,
    },
    Squares,
    /// All nonempty subset sums of a finite generator list.
    #[serde(rename = "fs")]
    FiniteSums {
        gens: Vec<usize>,
    },
    /// `{s_i − s_j : i > j}` for a strictly increasing sequence.
    #[serde(rename = "delta")]
    DeltaOf {
        seq: Vec<usize>,
    },
    /// `{a − a′ : a > a′}` for a strictly increasing base set.
    #[serde(rename = "diffset")]
    DiffSet {
        set: Vec<usize>,
    },
    Bohr {
        alpha: f64,
        interval: (f64, f64),
    },
    Complement {
        of: Box<PSetSpec>,
    },
    Union {
        of: Vec<PSetSpec>,
    },
    Intersect {
        of: Vec<PSetSpec>,
    },
}

impl PSetSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: PSetSpec =
            serde_json::from_str(text).map_err(|e| Error::validation("spec", e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn complement(self) -> Self {
        PSetSpec::Complement { of: Box::new(self) }
    }

    /// SHA-256 of the compact JSON encoding, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at("$")
    }

    fn validate_at(&self, path: &str) -> Result<()> {
        fn increasing(path: &str, field: &str, v: &[usize]) -> Result<()> {
            if v.first() == Some(&0) {
                return Err(Error::validation(
                    format!("{path}.{field}"),
                    "elements must be >= 1",
                ));
            }
            if let Some(w) = v.windows(2).find(|w| w[0] >= w[1]) {
                return Err(Error::validation(
                    format!("{path}.{field}"),
                    format!("not strictly increasing at {} -> {}", w[0], w[1]),
                ));
            }
            Ok(())
        }
        match self {
            PSetSpec::Explicit { elems } => increasing(path, "elems", elems),
            PSetSpec::DeltaOf { seq } => increasing(path, "seq", seq),
            PSetSpec::DiffSet { set } => increasing(path, "set", set),
            PSetSpec::Multiples { k } if *k == 0 => {
                Err(Error::validation(format!("{path}.k"), "k must be >= 1"))
            }
            PSetSpec::FiniteSums { gens } if gens.contains(&0) => Err(Error::validation(
                format!("{path}.gens"),
                "generators must be >= 1",
            )),
            PSetSpec::Bohr { alpha, interval } => {
                let (lo, hi) = *interval;
                if !(alpha.is_finite() && *alpha > 0.0 && *alpha < 1.0) {
                    return Err(Error::validation(
                        format!("{path}.alpha"),
                        "alpha must lie in (0, 1)",
                    ));
                }
                if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= 1.0) {
                    return Err(Error::validation(
                        format!("{path}.interval"),
                        "interval must satisfy 0 <= lo < hi <= 1",
                    ));
                }
                Ok(())
            }
            PSetSpec::Complement { of } => of.validate_at(&format!("{path}.of")),
            PSetSpec::Union { of } | PSetSpec::Intersect { of } => of
                .iter()
                .enumerate()
                .try_for_each(|(i, part)| part.validate_at(&format!("{path}.of[{i}]"))),
            _ => Ok(()),
        }
    }

    /// Pointwise membership by direct evaluation of the tree, independent of
    /// any materialized table. `n = 0` is never a member.
    pub fn contains(&self, n: usize) -> bool {
        if n == 0 {
            return false;
        }
        match self {
            PSetSpec::Explicit { elems } => elems.binary_search(&n).is_ok(),
            PSetSpec::Multiples { k } => n.is_multiple_of(*k),
            PSetSpec::Squares => {
                let r = n.isqrt();
                r * r == n
            }
            PSetSpec::FiniteSums { gens } => {
                // subset-sum reachability of exactly n, at least one generator used
                let mut reach = vec![false; n + 1];
                reach[0] = true;
                for &g in gens {
                    if g > n {
                        continue;
                    }
                    for s in (g..=n).rev() {
                        reach[s] |= reach[s - g];
                    }
                }
                reach[n]
            }
            PSetSpec::DeltaOf { seq: base } | PSetSpec::DiffSet { set: base } => {
                base.iter().any(|&a| base.binary_search(&(a + n)).is_ok())
            }
            PSetSpec::Bohr { alpha, interval } => bohr_member(*alpha, *interval, n),
            PSetSpec::Complement { of } => !of.contains(n),
            PSetSpec::Union { of } => of.iter().any(|p| p.contains(n)),
            PSetSpec::Intersect { of } => of.iter().all(|p| p.contains(n)),
        }
    }

    /// Membership table over `[1..horizon]`; bit `n − 1` is set iff `n ∈ P`.
    fn materialize(&self, horizon: usize) -> BitRow {
        let mut bits = BitRow::new(horizon);
        match self {
            PSetSpec::Explicit { elems } => {
                for &n in elems.iter().filter(|&&n| n <= horizon) {
                    bits.set(n - 1);
                }
            }
            PSetSpec::Multiples { k } => {
                for n in (*k..=horizon).step_by(*k) {
                    bits.set(n - 1);
                }
            }
            PSetSpec::Squares => {
                for r in (1..).take_while(|r| r * r <= horizon) {
                    bits.set(r * r - 1);
                }
            }
            PSetSpec::FiniteSums { gens } => {
                let mut reach = BitRow::new(horizon + 1);
                reach.set(0);
                for &g in gens.iter().filter(|&&g| g <= horizon) {
                    for s in (g..=horizon).rev() {
                        if reach.get(s - g) {
                            reach.set(s);
                        }
                    }
                }
                for s in reach.ones().filter(|&s| s > 0) {
                    bits.set(s - 1);
                }
            }
            PSetSpec::DeltaOf { seq: base } | PSetSpec::DiffSet { set: base } => {
                for (i, &hi) in base.iter().enumerate() {
                    for &lo in &base[..i] {
                        let d = hi - lo;
                        if d <= horizon {
                            bits.set(d - 1);
                        }
                    }
                }
            }
            PSetSpec::Bohr { alpha, interval } => {
                for n in 1..=horizon {
                    if bohr_member(*alpha, *interval, n) {
                        bits.set(n - 1);
                    }
                }
            }
            PSetSpec::Complement { of } => bits = of.materialize(horizon).not(),
            PSetSpec::Union { of } => {
                for part in of {
                    bits.or_with(&part.materialize(horizon));
                }
            }
            PSetSpec::Intersect { of } => {
                bits = BitRow::full(horizon);
                for part in of {
                    bits.and_with(&part.materialize(horizon));
                }
            }
        }
        bits
    }
}

fn bohr_member(alpha: f64, (lo, hi): (f64, f64), n: usize) -> bool {
    let frac = (n as f64 * alpha).fract();
    frac > lo + BOHR_MARGIN && frac < hi - BOHR_MARGIN
}

/// Materialized membership of `P` over `[1..H]`. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PSetView {
    horizon: usize,
    bits: BitRow,
    spec_digest: String,
}

/// Materializes `spec` over `[1..horizon]`.
pub fn build_pset(spec: &PSetSpec, horizon: usize) -> Result<PSetView> {
    if horizon == 0 {
        return Err(Error::validation("horizon", "must be >= 1"));
    }
    spec.validate()?;
    Ok(PSetView {
        horizon,
        bits: spec.materialize(horizon),
        spec_digest: spec.digest(),
    })
}

impl PSetView {
    /// A view over an explicit member list, tagged with the digest of the
    /// equivalent `Explicit` spec. Members beyond the horizon are dropped.
    pub fn from_members(horizon: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut elems: Vec<usize> = members.into_iter().filter(|&n| n >= 1).collect();
        elems.sort_unstable();
        elems.dedup();
        build_pset(&PSetSpec::Explicit { elems }, horizon)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn spec_digest(&self) -> &str {
        &self.spec_digest
    }

    /// `n ∈ P`, for `1 <= n <= H`.
    pub fn member(&self, n: usize) -> Result<bool> {
        if n == 0 || n > self.horizon {
            return Err(Error::OutOfRange {
                what: "n",
                value: n,
                horizon: self.horizon,
            });
        }
        Ok(self.bits.get(n - 1))
    }

    /// Unchecked membership for callers that have already bounded `n` by the
    /// horizon. Returns false for 0.
    #[inline]
    pub(crate) fn has(&self, n: usize) -> bool {
        debug_assert!(n <= self.horizon);
        n != 0 && self.bits.get(n - 1)
    }

    /// Bit `n − 1` set iff `n ∈ P`.
    pub(crate) fn bits(&self) -> &BitRow {
        &self.bits
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones().map(|i| i + 1)
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones()
    }

    /// Whether every multiple of `k` in `[1..upto]` is a member.
    pub fn contains_multiples(&self, k: usize, upto: usize) -> bool {
        self.least_missing_multiple(k, upto).is_none()
    }

    pub(crate) fn least_missing_multiple(&self, k: usize, upto: usize) -> Option<usize> {
        (k..=upto.min(self.horizon))
            .step_by(k)
            .find(|&m| !self.has(m))
    }

    pub fn is_subset_of(&self, other: &PSetView) -> bool {
        self.horizon == other.horizon
            && self
                .bits
                .words()
                .iter()
                .zip(other.bits.words())
                .all(|(a, b)| a & !b == 0)
    }
}

/// Finite-horizon density estimates for a set `A ⊆ [1..H]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub horizon: usize,
    pub n0: usize,
    /// `(n, |A ∩ [1..n]| / n)` for every `n` in `[1..H]`.
    #[serde(serialize_with = "ser_pq_pairs")]
    pub prefix_densities: Vec<(usize, Rational)>,
    /// Minimum prefix density over `n >= n0`.
    #[serde(serialize_with = "ser_pq")]
    pub lower_est: Rational,
    /// Maximum prefix density over `n >= n0`.
    #[serde(serialize_with = "ser_pq")]
    pub upper_est: Rational,
    /// `(W, max over windows [m+1..m+W] ⊆ [1..H] of |A ∩ window| / W)`.
    #[serde(serialize_with = "ser_pq_pairs")]
    pub banach_profile: Vec<(usize, Rational)>,
}

impl DensityReport {
    pub fn prefix_density(&self, n: usize) -> Option<Rational> {
        self.prefix_densities
            .get(n.checked_sub(1)?)
            .map(|&(_, r)| r)
    }

    pub fn banach(&self, window: usize) -> Option<Rational> {
        self.banach_profile
            .iter()
            .find(|(w, _)| *w == window)
            .map(|&(_, r)| r)
    }
}

/// Default tail cutoff `n0 = max(1, H / 2)`.
pub fn default_n0(horizon: usize) -> usize {
    (horizon / 2).max(1)
}

pub fn density_report(view: &PSetView, n0: usize, window_grid: &[usize]) -> Result<DensityReport> {
    let h = view.horizon;
    if window_grid.is_empty() {
        return Err(Error::validation("window_grid", "must not be empty"));
    }
    if n0 == 0 || n0 > h {
        return Err(Error::OutOfRange {
            what: "n0",
            value: n0,
            horizon: h,
        });
    }
    if let Some(&w) = window_grid.iter().find(|&&w| w == 0 || w > h) {
        return Err(Error::OutOfRange {
            what: "window",
            value: w,
            horizon: h,
        });
    }

    // prefix[n] = |A ∩ [1..n]|
    let mut prefix = Vec::with_capacity(h + 1);
    prefix.push(0usize);
    for n in 1..=h {
        prefix.push(prefix[n - 1] + view.has(n) as usize);
    }
    let prefix_densities: Vec<(usize, Rational)> =
        (1..=h).map(|n| (n, ratio(prefix[n], n))).collect();
    let tail = &prefix_densities[n0 - 1..];
    let lower_est = tail.iter().map(|&(_, r)| r).min().expect("nonempty tail");
    let upper_est = tail.iter().map(|&(_, r)| r).max().expect("nonempty tail");

    let banach_profile = window_grid
        .iter()
        .map(|&w| {
            let best = (w..=h)
                .map(|end| prefix[end] - prefix[end - w])
                .max()
                .unwrap_or(0);
            (w, ratio(best, w))
        })
        .collect();

    Ok(DensityReport {
        horizon: h,
        n0,
        prefix_densities,
        lower_est,
        upper_est,
        banach_profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn members(spec: &PSetSpec, h: usize) -> Vec<usize> {
        build_pset(spec, h).unwrap().members().collect()
    }

    #[test]
    fn multiples_fs_and_diffset() {
        assert_eq!(members(&PSetSpec::Multiples { k: 3 }, 10), vec![3, 6, 9]);
        assert_eq!(
            members(&PSetSpec::FiniteSums { gens: vec![1, 2] }, 10),
            vec![1, 2, 3]
        );
        assert_eq!(
            members(
                &PSetSpec::DiffSet {
                    set: vec![1, 10, 26]
                },
                30
            ),
            vec![9, 16, 25]
        );
        assert_eq!(
            members(&PSetSpec::FiniteSums { gens: vec![2, 5] }, 10),
            vec![2, 5, 7]
        );
    }

    #[test]
    fn membership_examples() {
        let evens = build_pset(&PSetSpec::Multiples { k: 2 }, 10).unwrap();
        assert!(evens.member(4).unwrap());
        let sq = build_pset(&PSetSpec::Squares, 100).unwrap();
        assert!(!sq.member(50).unwrap());
        let nonsq = build_pset(&PSetSpec::Squares.complement(), 100).unwrap();
        assert!(!nonsq.member(49).unwrap());
        assert!(nonsq.member(50).unwrap());
    }

    #[test]
    fn member_out_of_range_is_an_error() {
        let v = build_pset(&PSetSpec::Squares, 10).unwrap();
        assert!(matches!(v.member(11), Err(Error::OutOfRange { .. })));
        assert!(matches!(v.member(0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn validation_names_the_node() {
        let bad = PSetSpec::Union {
            of: vec![
                PSetSpec::Squares,
                PSetSpec::Complement {
                    of: Box::new(PSetSpec::Explicit { elems: vec![3, 3] }),
                },
            ],
        };
        match build_pset(&bad, 10) {
            Err(Error::Validation { node, .. }) => assert_eq!(node, "$.of[1].of.elems"),
            other => panic!("unexpected {other:?}"),
        }
        let bohr = PSetSpec::Bohr {
            alpha: 0.3,
            interval: (0.5, 0.5),
        };
        assert!(matches!(bohr.validate(), Err(Error::Validation { .. })));
        assert!(build_pset(&PSetSpec::Squares, 0).is_err());
    }

    #[test]
    fn json_round_trip_and_unknown_type() {
        let text = r#"{"type":"union","of":[{"type":"multiples","k":3},{"type":"explicit","elems":[1,2]}]}"#;
        let spec = PSetSpec::from_json(text).unwrap();
        assert_eq!(spec.to_json(), text);
        assert!(PSetSpec::from_json(r#"{"type":"primes"}"#).is_err());
        assert!(PSetSpec::from_json(r#"{"type":"multiples","k":3,"extra":1}"#).is_err());
        let bohr =
            PSetSpec::from_json(r#"{"type":"bohr","alpha":0.61803398875,"interval":[0.0,0.25]}"#)
                .unwrap();
        assert!(matches!(bohr, PSetSpec::Bohr { .. }));
        assert!(PSetSpec::from_json(r#"{"type":"delta","seq":[1,4,9]}"#).is_ok());
        assert!(PSetSpec::from_json(r#"{"type":"fs","gens":[2,5]}"#).is_ok());
        assert!(PSetSpec::from_json(r#"{"type":"squares"}"#).is_ok());
    }

    #[test]
    fn bohr_excludes_margin_band() {
        // frac(n/4) takes the exact values 0, .25, .5, .75: the open interval
        // (0.25, 0.75) minus the margin contains only n ≡ 2 (mod 4).
        let v = build_pset(
            &PSetSpec::Bohr {
                alpha: 0.25,
                interval: (0.25, 0.75),
            },
            12,
        )
        .unwrap();
        assert_eq!(v.members().collect::<Vec<_>>(), vec![2, 6, 10]);
    }

    #[test]
    fn density_full_set() {
        let v = PSetView::from_members(40, 1..=40).unwrap();
        let r = density_report(&v, 20, &[1, 5, 40]).unwrap();
        assert_eq!(r.lower_est, ratio(1, 1));
        assert_eq!(r.upper_est, ratio(1, 1));
        assert!(r.banach_profile.iter().all(|(_, d)| *d == ratio(1, 1)));
    }

    #[test]
    fn density_squares() {
        let v = build_pset(&PSetSpec::Squares, 100).unwrap();
        let r = density_report(&v, 50, &[10]).unwrap();
        assert_eq!(r.prefix_density(100), Some(ratio(10, 100)));

        let v = build_pset(&PSetSpec::Squares, 2000).unwrap();
        let r = density_report(&v, 1000, &[50]).unwrap();
        assert_eq!(r.banach(50), Some(ratio(7, 50)));
    }

    #[test]
    fn density_errors() {
        let v = build_pset(&PSetSpec::Squares, 10).unwrap();
        assert!(matches!(
            density_report(&v, 5, &[]),
            Err(Error::Validation { .. })
        ));
        assert!(density_report(&v, 11, &[2]).is_err());
        assert!(density_report(&v, 5, &[11]).is_err());
    }
}
