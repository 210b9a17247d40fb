//! The catalog of exceptional conformal extensions at desk scale: eleven
//! entries, each recording the ambient theory, the level-1 target, and the
//! full branching matrix (rows = target simples, entries = multiplicities of
//! ambient weights). The data ships as JSON embedded at compile time and is
//! cross-checked against the independently computed modular invariants in the
//! test suite.

use crate::weights::parse_weight;
use crate::{Error, Result};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

/// One branching row: a target simple object and the multiset of ambient
/// weights it restricts to (with multiplicities).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogRow {
    /// Target weight label (unshifted, at level 1).
    pub target: String,
    /// Ambient weights (compact label strings) with multiplicities.
    pub restriction: Vec<(String, i64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogEntry {
    /// Ambient algebra, e.g. "A2".
    pub algebra: String,
    pub level: i64,
    /// Target theory, e.g. "E7 level 1".
    pub target_algebra: String,
    pub target_level: i64,
    pub rows: Vec<CatalogRow>,
}

static RAW: &str = include_str!("../data/table_2_1.json");

/// All catalog entries, in (algebra, level) order.
pub static CATALOG: Lazy<Vec<CatalogEntry>> =
    Lazy::new(|| serde_json::from_str(RAW).expect("embedded catalog must parse"));

/// Look up an entry by ambient algebra and level.
pub fn lookup(algebra: &str, level: i64) -> Option<&'static CatalogEntry> {
    CATALOG
        .iter()
        .find(|e| e.algebra == algebra && e.level == level)
}

/// The diagonal coefficients Z_λ = Σ_M B_{M,λ}² of the étale algebra
/// attached to a catalog entry — i.e. the vacuum-row restriction. Only the
/// vacuum row contributes to the algebra object itself, so this returns the
/// multiplicities from the row whose target is the vacuum.
pub fn etale_coefficients(entry: &CatalogEntry, rank: usize) -> Result<Vec<(Vec<i64>, i64)>> {
    let vacuum = entry
        .rows
        .iter()
        .find(|r| {
            parse_weight(&r.target, target_rank(&entry.target_algebra).unwrap_or(rank))
                .map(|w| w.iter().all(|&l| l == 0))
                .unwrap_or(false)
        })
        .ok_or_else(|| Error::Msg(format!("catalog entry {} {} has no vacuum row", entry.algebra, entry.level)))?;
    let mut out = Vec::new();
    for (label, mult) in &vacuum.restriction {
        out.push((parse_weight(label, rank)?, *mult));
    }
    out.sort();
    Ok(out)
}

fn target_rank(spec: &str) -> Option<usize> {
    spec[1..].parse().ok()
}

/// Does a claimed étale coefficient vector match a catalog entry? Returns the
/// target name when it does.
pub fn match_etale(algebra: &str, level: i64, z: &[(Vec<i64>, i64)]) -> Option<String> {
    let entry = lookup(algebra, level)?;
    let rank: usize = algebra[1..].parse().ok()?;
    let expected = etale_coefficients(entry, rank).ok()?;
    if expected == z {
        Some(format!("{} level {}", entry.target_algebra, entry.target_level))
    } else {
        None
    }
}
