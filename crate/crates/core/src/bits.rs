//! Fixed-length bit rows used for membership tables and distance-graph adjacency.

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitRow {
    words: Vec<u64>,
    len: usize,
}

impl BitRow {
    pub fn new(len: usize) -> Self {
        BitRow {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut row = BitRow {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        row.trim();
        row
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len && (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] |= 1u64 << (i & 63);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn not(&self) -> BitRow {
        let mut out = BitRow {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.trim();
        out
    }

    pub fn or_with(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn and_with(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn ones(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + tz);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_row_trims_tail() {
        let row = BitRow::full(70);
        assert_eq!(row.count_ones(), 70);
        assert_eq!(row.not().count_ones(), 0);
        assert!(!row.get(70));
    }

    #[test]
    fn ones_iterates_in_order() {
        let mut row = BitRow::new(200);
        for i in [0, 5, 63, 64, 130, 199] {
            row.set(i);
        }
        assert_eq!(row.ones().collect::<Vec<_>>(), vec![0, 5, 63, 64, 130, 199]);
    }
}

/// The 64 bits `start .. start + 64` of `words`, with positions outside the
/// array reading as zero.
#[inline]
pub(crate) fn extract(words: &[u64], start: isize) -> u64 {
    let word_at = |k: isize| -> u64 {
        if k < 0 || k as usize >= words.len() {
            0
        } else {
            words[k as usize]
        }
    };
    let q = start.div_euclid(64);
    let r = start.rem_euclid(64) as u32;
    if r == 0 {
        word_at(q)
    } else {
        (word_at(q) >> r) | (word_at(q + 1) << (64 - r))
    }
}
