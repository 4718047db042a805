//! Exact rationals and their text form.
//!
//! Every density and frequency in this crate is an exact `u64` ratio. Text
//! output always uses the `p/q` form, including when `q = 1`.

use num_rational::Ratio;
use serde::Serializer;

pub type Rational = Ratio<u64>;

pub fn ratio(num: usize, den: usize) -> Rational {
    Ratio::new(num as u64, den as u64)
}

pub fn to_pq(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Formats a float with 17 significant digits in plain notation.
pub fn sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (16 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub(crate) fn ser_pq<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&to_pq(r))
}

pub(crate) fn ser_pq_pairs<S: Serializer>(
    v: &[(usize, Rational)],
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (n, r) in v {
        seq.serialize_element(&(n, to_pq(r)))?;
    }
    seq.end()
}
