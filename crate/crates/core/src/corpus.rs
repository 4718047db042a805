//! The versioned corpus of `P` descriptions shipped in `crates/core/corpus/`.

use crate::error::Result;
use crate::pset::PSetSpec;

/// Bumped whenever a member is added, removed or changed.
pub const CORPUS_VERSION: u32 = 1;

macro_rules! member {
    ($name:literal) => {
        ($name, include_str!(concat!("../corpus/", $name, ".json")))
    };
}

const MEMBERS: [(&str, &str); 15] = [
    member!("full"),
    member!("multiples2"),
    member!("multiples3"),
    member!("multiples5"),
    member!("not-multiples2"),
    member!("not-multiples3"),
    member!("not-multiples5"),
    member!("squares"),
    member!("not-squares"),
    member!("fs-powers-of-3"),
    member!("delta-squares"),
    member!("diffset-fs-1-4-16-64"),
    member!("bohr-golden"),
    member!("multiples3-plus-1-2"),
    member!("even-nonsquares"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusMember {
    pub name: &'static str,
    pub spec: PSetSpec,
}

/// All members, in a fixed order.
pub fn shipped() -> Result<Vec<CorpusMember>> {
    MEMBERS
        .iter()
        .map(|&(name, text)| {
            Ok(CorpusMember {
                name,
                spec: PSetSpec::from_json(text)?,
            })
        })
        .collect()
}

pub fn member(name: &str) -> Option<CorpusMember> {
    shipped().ok()?.into_iter().find(|m| m.name == name)
}
