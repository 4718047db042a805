//! Brute-force oracle and generators shared by the integration tests. The
//! oracle reads membership through `PSetSpec::contains` only, never through a
//! materialized view.

#![allow(dead_code)]

use proptest::prelude::*;
use spacelab::PSetSpec;

/// Membership table `d -> d ∈ P` for `d < len`, by pointwise evaluation.
pub fn table(spec: &PSetSpec, len: usize) -> Vec<bool> {
    (0..len).map(|d| spec.contains(d)).collect()
}

fn admissible_mask(mask: u64, n: usize, t: &[bool]) -> bool {
    let ones: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
    ones.iter()
        .enumerate()
        .all(|(a, &i)| ones[a + 1..].iter().all(|&j| t[j - i]))
}

/// Admissible words of length `n`, by exhaustive enumeration.
pub fn count(spec: &PSetSpec, n: usize) -> u64 {
    assert!(n <= 24);
    let t = table(spec, n.max(1));
    (0u64..1 << n)
        .filter(|&m| admissible_mask(m, n, &t))
        .count() as u64
}

/// Largest number of ones in an admissible word of length `n`.
pub fn max_ones(spec: &PSetSpec, n: usize) -> usize {
    assert!(n <= 20);
    let t = table(spec, n.max(1));
    (0u64..1 << n)
        .filter(|&m| admissible_mask(m, n, &t))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Whether every pairwise difference of `ones` is in `P`.
pub fn admissible(spec: &PSetSpec, ones: &[usize]) -> bool {
    ones.iter()
        .enumerate()
        .all(|(a, &i)| ones[a + 1..].iter().all(|&j| spec.contains(j.abs_diff(i))))
}

fn increasing(max: usize, len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::btree_set(1..max, len).prop_map(|s| s.into_iter().collect())
}

/// Leaf specs with small parameters.
pub fn leaf() -> impl Strategy<Value = PSetSpec> {
    prop_oneof![
        increasing(40, 0..8).prop_map(|elems| PSetSpec::Explicit { elems }),
        (1usize..7).prop_map(|k| PSetSpec::Multiples { k }),
        Just(PSetSpec::Squares),
        proptest::collection::vec(1usize..15, 1..4).prop_map(|gens| PSetSpec::FiniteSums { gens }),
        increasing(30, 0..5).prop_map(|seq| PSetSpec::DeltaOf { seq }),
        increasing(30, 0..5).prop_map(|set| PSetSpec::DiffSet { set }),
        (0.01f64..0.99, 0.0f64..0.5, 0.05f64..0.5).prop_map(|(alpha, lo, w)| PSetSpec::Bohr {
            alpha,
            interval: (lo, (lo + w).min(1.0)),
        }),
    ]
}

/// Specs up to two levels of boolean combination.
pub fn spec() -> impl Strategy<Value = PSetSpec> {
    leaf().prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|s| s.complement()),
            proptest::collection::vec(inner.clone(), 1..3).prop_map(|of| PSetSpec::Union { of }),
            proptest::collection::vec(inner, 1..3).prop_map(|of| PSetSpec::Intersect { of }),
        ]
    })
}
