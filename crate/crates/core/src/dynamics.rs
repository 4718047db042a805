//! Orbit-level probes on truncated points of the spacing shift.
//!
//! The metric is the cylinder metric `d(x, y) = 2^−min{i : x_i ≠ y_i}`, so
//! `d(σ^m x, σ^m y) < 2^−l` holds exactly when `x` and `y` agree on the
//! block `m ..= m + l`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::language::{greedy_point, is_admissible, max_ones, Configuration};
use crate::pset::PSetView;
use crate::rational::{ratio, ser_pq, Rational};

/// A named, truncated point with its admissibility against a view.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitPoint {
    pub name: String,
    pub config: Configuration,
    pub admissible: bool,
    /// Digest of the spec the flag refers to; `None` for an unchecked point.
    pub view_digest: Option<String>,
}

impl OrbitPoint {
    pub fn checked(
        name: impl Into<String>,
        config: Configuration,
        view: &PSetView,
    ) -> Result<Self> {
        let admissible = is_admissible(&config, view)?;
        Ok(OrbitPoint {
            name: name.into(),
            config,
            admissible,
            view_digest: Some(view.spec_digest().to_string()),
        })
    }

    pub fn unchecked(name: impl Into<String>, config: Configuration) -> Self {
        OrbitPoint {
            name: name.into(),
            config,
            admissible: false,
            view_digest: None,
        }
    }

    pub fn len(&self) -> usize {
        self.config.len()
    }

    pub fn is_empty(&self) -> bool {
        self.config.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CylinderDistance {
    /// `d = 2^−i` where `i` is the first index of disagreement.
    Exponent(usize),
    /// The points agree on the whole window.
    Infinite,
}

fn same_length(x: &OrbitPoint, y: &OrbitPoint) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::validation(
            "points",
            format!("length mismatch: {} vs {}", x.len(), y.len()),
        ));
    }
    Ok(())
}

fn agreement(x: &OrbitPoint, y: &OrbitPoint) -> Vec<bool> {
    x.config
        .to_bits()
        .iter()
        .zip(y.config.to_bits())
        .map(|(a, b)| *a == b)
        .collect()
}

pub fn cylinder_distance_exponent(x: &OrbitPoint, y: &OrbitPoint) -> Result<CylinderDistance> {
    same_length(x, y)?;
    Ok(agreement(x, y)
        .iter()
        .position(|&same| !same)
        .map_or(CylinderDistance::Infinite, CylinderDistance::Exponent))
}

/// `F_n = hits / n`; the denominator is always `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FValue {
    pub n: usize,
    pub hits: usize,
}

impl FValue {
    pub fn value(&self) -> Rational {
        ratio(self.hits, self.n)
    }
}

impl Serialize for FValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.n, format!("{}/{}", self.hits, self.n)).serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FStatReport {
    pub l: usize,
    pub x: String,
    pub y: String,
    pub values: Vec<FValue>,
    /// Minimum of `F_n` over the last quarter of the grid.
    #[serde(serialize_with = "ser_pq")]
    pub tail_min: Rational,
}

impl FStatReport {
    /// CSV with `# key=value` metadata lines followed by `n,F_n`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# l={}", self.l)?;
        writeln!(out, "# x={}", self.x)?;
        writeln!(out, "# y={}", self.y)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "F_n"])?;
        for v in &self.values {
            w.write_record([v.n.to_string(), format!("{}/{}", v.hits, v.n)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `F_n = |{0 <= m < n : x, y agree on m ..= m + l}| / n` for `n` in the grid.
pub fn f_statistic(
    x: &OrbitPoint,
    y: &OrbitPoint,
    l: usize,
    n_grid: &[usize],
) -> Result<FStatReport> {
    same_length(x, y)?;
    if n_grid.is_empty() || n_grid.contains(&0) {
        return Err(Error::validation("n_grid", "must be nonempty with n >= 1"));
    }
    let max_n = *n_grid.iter().max().expect("nonempty");
    if max_n + l >= x.len() {
        return Err(Error::validation(
            "n_grid",
            format!(
                "max(n) + l = {} must be below the point length {}",
                max_n + l,
                x.len()
            ),
        ));
    }
    let agree = agreement(x, y);
    // close[m]: agreement on the whole block m..=m+l
    let mut disagreements: usize = agree[..=l].iter().filter(|&&a| !a).count();
    let mut prefix = Vec::with_capacity(max_n + 1);
    prefix.push(0usize);
    for m in 0..max_n {
        if m > 0 {
            disagreements -= !agree[m - 1] as usize;
            disagreements += !agree[m + l] as usize;
        }
        prefix.push(prefix[m] + (disagreements == 0) as usize);
    }
    let values: Vec<FValue> = n_grid
        .iter()
        .map(|&n| FValue { n, hits: prefix[n] })
        .collect();
    let tail_len = values.len().div_ceil(4);
    let tail_min = values[values.len() - tail_len..]
        .iter()
        .map(FValue::value)
        .min()
        .expect("nonempty tail");
    Ok(FStatReport {
        l,
        x: x.name.clone(),
        y: y.name.clone(),
        values,
        tail_min,
    })
}

/// Least `m` with `x` and `y` equal on `[m, m + block)`.
pub fn proximal_probe(x: &OrbitPoint, y: &OrbitPoint, block: usize) -> Result<Option<usize>> {
    same_length(x, y)?;
    if block > x.len() {
        return Ok(None);
    }
    let agree = agreement(x, y);
    let mut run = 0;
    if block == 0 {
        return Ok(Some(0));
    }
    for (i, &same) in agree.iter().enumerate() {
        run = if same { run + 1 } else { 0 };
        if run >= block {
            return Ok(Some(i + 1 - block));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodicOutcome {
    /// The truncation of `(1 0^{k−1})^∞`, admissibility verified.
    Periodic(OrbitPoint),
    Missing {
        least_failing_multiple: usize,
    },
}

/// Whether `(1 0^{k−1})^∞` restricted to `[0, horizon)` is admissible, which
/// holds iff every multiple of `k` up to `horizon` lies in `P`.
pub fn periodic_point_check(view: &PSetView, k: usize, horizon: usize) -> Result<PeriodicOutcome> {
    if k == 0 {
        return Err(Error::validation("k", "period must be >= 1"));
    }
    if k * (horizon / k) > view.horizon() {
        return Err(Error::OutOfRange {
            what: "k * floor(horizon / k)",
            value: k * (horizon / k),
            horizon: view.horizon(),
        });
    }
    if let Some(m) = view.least_missing_multiple(k, horizon) {
        return Ok(PeriodicOutcome::Missing {
            least_failing_multiple: m,
        });
    }
    let config = Configuration::new(horizon, (0..horizon).step_by(k).collect())?;
    let point = OrbitPoint::checked(format!("periodic-k{k}"), config, view)?;
    assert!(point.admissible, "periodic point failed re-verification");
    Ok(PeriodicOutcome::Periodic(point))
}

/// Lengths whose `max_ones` witnesses seed the named point family.
pub const WITNESS_LENGTHS: [usize; 4] = [4, 8, 12, 16];
/// Offsets at which each witness is placed in the zero word.
pub const WITNESS_OFFSETS: [usize; 3] = [0, 1, 5];
/// Periods tried for the periodic generator.
pub const MAX_PERIOD: usize = 6;

/// The deterministic point family used by experiments: the zero point, the
/// greedy point, `max_ones` witnesses padded with zeros, and every periodic
/// point of period at most `MAX_PERIOD`. All points have length `horizon`.
pub fn named_points(view: &PSetView, horizon: usize, budget: u64) -> Result<Vec<OrbitPoint>> {
    let mut points = vec![
        OrbitPoint::checked("zero", Configuration::zeros(horizon), view)?,
        OrbitPoint::checked("greedy", greedy_point(view, horizon)?, view)?,
    ];
    for n in WITNESS_LENGTHS.into_iter().filter(|&n| n <= horizon) {
        let (_, witness) = max_ones(view, n, budget)?;
        for offset in WITNESS_OFFSETS.into_iter().filter(|&t| t + n <= horizon) {
            points.push(OrbitPoint::checked(
                format!("maxones-n{n}-at{offset}"),
                witness.embed(offset, horizon),
                view,
            )?);
        }
    }
    for k in 1..=MAX_PERIOD.min(horizon) {
        if let PeriodicOutcome::Periodic(p) = periodic_point_check(view, k, horizon)? {
            points.push(p);
        }
    }
    Ok(points)
}

/// Seeded random admissible point: scans positions in order and sets a one
/// with probability 1/2 whenever that keeps the word admissible.
pub fn random_point(view: &PSetView, horizon: usize, seed: u64) -> Result<OrbitPoint> {
    if horizon > view.horizon() {
        return Err(Error::OutOfRange {
            what: "horizon",
            value: horizon,
            horizon: view.horizon(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ones: Vec<usize> = Vec::new();
    for pos in 0..horizon {
        if rng.gen_bool(0.5) && ones.iter().all(|&c| view.has(pos - c)) {
            ones.push(pos);
        }
    }
    OrbitPoint::checked(
        format!("random-s{seed}"),
        Configuration::new(horizon, ones)?,
        view,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pset::{build_pset, PSetSpec};
    use crate::DEFAULT_BUDGET;

    fn pt(s: &str) -> OrbitPoint {
        OrbitPoint::unchecked(s, s.parse().unwrap())
    }

    fn alternating(len: usize, phase: usize) -> OrbitPoint {
        let ones = (phase..len).step_by(2).collect();
        OrbitPoint::unchecked("alt", Configuration::new(len, ones).unwrap())
    }

    #[test]
    fn distance_examples() {
        let x = pt("1000");
        assert_eq!(
            cylinder_distance_exponent(&x, &x).unwrap(),
            CylinderDistance::Infinite
        );
        assert_eq!(
            cylinder_distance_exponent(&x, &pt("0000")).unwrap(),
            CylinderDistance::Exponent(0)
        );
        assert_eq!(
            cylinder_distance_exponent(&pt("0010"), &pt("0000")).unwrap(),
            CylinderDistance::Exponent(2)
        );
        assert!(cylinder_distance_exponent(&x, &pt("000")).is_err());
    }

    #[test]
    fn f_statistic_examples() {
        let x = alternating(64, 0);
        let r = f_statistic(&x, &x, 3, &[10, 20, 40]).unwrap();
        assert!(r.values.iter().all(|v| v.hits == v.n));

        let zero = OrbitPoint::unchecked("zero", Configuration::zeros(64));
        let r = f_statistic(&x, &zero, 0, &[1, 2, 3, 7, 10, 21]).unwrap();
        for v in &r.values {
            // x is zero at odd positions: m = 1, 3, 5, …
            assert_eq!(v.hits, v.n / 2);
        }
        let spike = OrbitPoint::unchecked("spike", Configuration::new(64, vec![0]).unwrap());
        let r = f_statistic(&spike, &zero, 0, &[10]).unwrap();
        assert_eq!(r.values[0].value(), ratio(9, 10));
        assert_eq!(r.tail_min, ratio(9, 10));
        assert!(f_statistic(&spike, &zero, 10, &[54]).is_err());
    }

    #[test]
    fn f_statistic_csv_keeps_denominator() {
        let zero = OrbitPoint::unchecked("zero", Configuration::zeros(20));
        let r = f_statistic(&zero, &zero, 0, &[4]).unwrap();
        let mut out = Vec::new();
        r.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "# l=0\n# x=zero\n# y=zero\nn,F_n\n4,4/4\n"
        );
    }

    #[test]
    fn proximal_examples() {
        let zero = OrbitPoint::unchecked("zero", Configuration::zeros(30));
        assert_eq!(proximal_probe(&zero, &zero, 30).unwrap(), Some(0));

        let no3 = build_pset(&PSetSpec::Multiples { k: 3 }.complement(), 60).unwrap();
        let g = greedy_point(&no3, 60).unwrap();
        let x = OrbitPoint::checked("greedy", g.clone(), &no3).unwrap();
        let y = OrbitPoint::checked("shifted greedy", g.shifted(1), &no3).unwrap();
        assert!(y.admissible);
        assert_eq!(proximal_probe(&x, &y, 20).unwrap(), Some(3));

        assert_eq!(
            proximal_probe(&alternating(40, 0), &alternating(40, 1), 2).unwrap(),
            None
        );
    }

    #[test]
    fn periodic_examples() {
        let m3 = build_pset(&PSetSpec::Multiples { k: 3 }, 30).unwrap();
        match periodic_point_check(&m3, 3, 30).unwrap() {
            PeriodicOutcome::Periodic(p) => {
                assert!(p.admissible);
                assert!(p.config.to_string().starts_with("100100100"));
            }
            other => panic!("{other:?}"),
        }
        let odd = build_pset(&PSetSpec::Multiples { k: 2 }.complement(), 30).unwrap();
        assert_eq!(
            periodic_point_check(&odd, 2, 30).unwrap(),
            PeriodicOutcome::Missing {
                least_failing_multiple: 2
            }
        );
        let nat = build_pset(&PSetSpec::Multiples { k: 1 }, 30).unwrap();
        match periodic_point_check(&nat, 1, 30).unwrap() {
            PeriodicOutcome::Periodic(p) => assert_eq!(p.config.ones().len(), 30),
            other => panic!("{other:?}"),
        }
        assert!(periodic_point_check(&nat, 0, 30).is_err());
        assert!(periodic_point_check(&nat, 1, 31).is_err());
    }

    #[test]
    fn named_points_are_admissible() {
        let evens = build_pset(&PSetSpec::Multiples { k: 2 }, 64).unwrap();
        let pts = named_points(&evens, 64, DEFAULT_BUDGET).unwrap();
        assert!(pts.iter().all(|p| p.admissible && p.len() == 64));
        let names: Vec<_> = pts.iter().map(|p| p.name.as_str()).collect();
        assert!(names.contains(&"periodic-k2") && names.contains(&"periodic-k4"));
        assert!(!names.contains(&"periodic-k3"));
    }

    #[test]
    fn random_point_is_seeded_and_admissible() {
        let sq = build_pset(&PSetSpec::Squares.complement(), 100).unwrap();
        let a = random_point(&sq, 100, 7).unwrap();
        let b = random_point(&sq, 100, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.admissible);
    }
}
