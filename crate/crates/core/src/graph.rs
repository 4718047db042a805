//! Clique search in the distance graph of `P`.
//!
//! Vertices are `0..n`; `i < j` are adjacent iff `j − i ∈ P`. The graph is
//! translation invariant, so the adjacency row of `v` (restricted to `j > v`)
//! is the membership table of `P` shifted left by `v + 1`. Rows are never
//! stored; they are extracted word by word from the view's bit table.

use num_bigint::BigUint;
use num_traits::One;

use crate::bits::extract;
use crate::error::{Error, Result};
use crate::pset::PSetView;

/// Node counter shared by every bounded search.
#[derive(Debug, Clone)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    #[inline]
    pub fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::BudgetExhausted { budget: self.limit })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}

/// Exact counter that stays in `u128` until it overflows.
#[derive(Debug, Default)]
struct Tally {
    small: u128,
    big: BigUint,
}

impl Tally {
    fn add(&mut self, x: u128) {
        match self.small.checked_add(x) {
            Some(s) => self.small = s,
            None => {
                self.big += BigUint::from(self.small) + BigUint::from(x);
                self.small = 0;
            }
        }
    }

    fn add_pow2(&mut self, k: usize) {
        if k < 127 {
            self.add(1u128 << k);
        } else {
            self.big += BigUint::one() << k;
        }
    }

    fn total(self) -> BigUint {
        self.big + BigUint::from(self.small)
    }
}

pub(crate) struct DistanceGraph<'a> {
    n: usize,
    words: usize,
    p: &'a [u64],
}

fn popcount(set: &[u64]) -> usize {
    set.iter().map(|w| w.count_ones() as usize).sum()
}

fn ones(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + tz)
            }
        })
    })
}

/// Members of `set` at positions `>= from`.
fn count_from(set: &[u64], from: usize) -> usize {
    let q = from / 64;
    if q >= set.len() {
        return 0;
    }
    let head = (set[q] >> (from % 64)).count_ones() as usize;
    head + popcount(&set[q + 1..])
}

impl<'a> DistanceGraph<'a> {
    /// Distance graph on `n` vertices. Differences up to `n − 1` are read
    /// from the view, so `n − 1 <= H` is required.
    pub fn new(view: &'a PSetView, n: usize) -> Self {
        debug_assert!(n <= view.horizon() + 1);
        DistanceGraph {
            n,
            words: n.div_ceil(64),
            p: view.bits().words(),
        }
    }

    fn last_mask(&self) -> u64 {
        match self.n % 64 {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    pub fn all(&self) -> Vec<u64> {
        let mut set = vec![u64::MAX; self.words];
        if let Some(last) = set.last_mut() {
            *last &= self.last_mask();
        }
        set
    }

    /// Word `w` of the forward adjacency row of `v`.
    #[inline]
    fn row_word(&self, v: usize, w: usize) -> u64 {
        extract(self.p, (w * 64) as isize - v as isize - 1)
    }

    /// `dst = src ∩ row(v)`.
    pub fn restrict(&self, dst: &mut [u64], src: &[u64], v: usize) {
        for w in 0..self.words {
            dst[w] = src[w] & self.row_word(v, w);
        }
        if let Some(last) = dst.last_mut() {
            *last &= self.last_mask();
        }
    }

    fn is_clique(&self, set: &[u64]) -> bool {
        ones(set).all(|v| {
            (v / 64..self.words).all(|w| {
                let mut above = set[w];
                if w == v / 64 {
                    let shift = v % 64 + 1;
                    above = if shift == 64 {
                        0
                    } else {
                        above & (u64::MAX << shift)
                    };
                }
                above & !self.row_word(v, w) == 0
            })
        })
    }

    /// Number of cliques contained in `allowed`, the empty clique included.
    pub fn count_cliques(&self, allowed: &[u64], budget: &mut Budget) -> Result<BigUint> {
        let mut tally = Tally::default();
        let mut pool = Vec::new();
        self.count_rec(allowed, budget, &mut pool, &mut tally)?;
        Ok(tally.total())
    }

    fn count_rec(
        &self,
        allowed: &[u64],
        budget: &mut Budget,
        pool: &mut Vec<Vec<u64>>,
        tally: &mut Tally,
    ) -> Result<()> {
        budget.tick()?;
        let k = popcount(allowed);
        if k <= 1 || self.is_clique(allowed) {
            tally.add_pow2(k);
            return Ok(());
        }
        tally.add(1);
        let mut child = pool.pop().unwrap_or_else(|| vec![0; self.words]);
        for v in ones(allowed) {
            self.restrict(&mut child, allowed, v);
            self.count_rec(&child, budget, pool, tally)?;
        }
        pool.push(child);
        Ok(())
    }

    /// A maximum clique inside `allowed`, lexicographically least among those
    /// of maximum size.
    pub fn max_clique(&self, allowed: &[u64], budget: &mut Budget) -> Result<Vec<usize>> {
        let mut best = Vec::new();
        let mut current = Vec::new();
        let mut pool = Vec::new();
        self.max_rec(allowed, &mut current, &mut best, budget, &mut pool)?;
        Ok(best)
    }

    fn max_rec(
        &self,
        allowed: &[u64],
        current: &mut Vec<usize>,
        best: &mut Vec<usize>,
        budget: &mut Budget,
        pool: &mut Vec<Vec<u64>>,
    ) -> Result<()> {
        budget.tick()?;
        if current.len() > best.len() {
            best.clone_from(current);
        }
        let k = popcount(allowed);
        if current.len() + k <= best.len() {
            return Ok(());
        }
        if self.is_clique(allowed) {
            // the only clique of this size in the subtree, and the first one visited
            best.clone_from(current);
            best.extend(ones(allowed));
            return Ok(());
        }
        let mut child = pool.pop().unwrap_or_else(|| vec![0; self.words]);
        for v in ones(allowed) {
            if current.len() + count_from(allowed, v) <= best.len() {
                break;
            }
            self.restrict(&mut child, allowed, v);
            current.push(v);
            self.max_rec(&child, current, best, budget, pool)?;
            current.pop();
        }
        pool.push(child);
        Ok(())
    }

    /// Lexicographically first clique of exactly `size` vertices that extends
    /// `prefix` (itself a clique) using vertices of `allowed` greater than it.
    pub fn first_clique(
        &self,
        prefix: &[usize],
        size: usize,
        budget: &mut Budget,
    ) -> Result<Option<Vec<usize>>> {
        let mut allowed = self.all();
        let mut scratch = vec![0; self.words];
        for &v in prefix {
            self.restrict(&mut scratch, &allowed, v);
            std::mem::swap(&mut allowed, &mut scratch);
        }
        let mut current = prefix.to_vec();
        let mut pool = Vec::new();
        if self.first_rec(&allowed, &mut current, size, budget, &mut pool)? {
            Ok(Some(current))
        } else {
            Ok(None)
        }
    }

    fn first_rec(
        &self,
        allowed: &[u64],
        current: &mut Vec<usize>,
        size: usize,
        budget: &mut Budget,
        pool: &mut Vec<Vec<u64>>,
    ) -> Result<bool> {
        budget.tick()?;
        if current.len() >= size {
            return Ok(true);
        }
        let mut child = pool.pop().unwrap_or_else(|| vec![0; self.words]);
        let mut found = false;
        for v in ones(allowed) {
            if current.len() + count_from(allowed, v) < size {
                break;
            }
            self.restrict(&mut child, allowed, v);
            current.push(v);
            if self.first_rec(&child, current, size, budget, pool)? {
                found = true;
                break;
            }
            current.pop();
        }
        pool.push(child);
        Ok(found)
    }
}
