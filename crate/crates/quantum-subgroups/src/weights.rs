//! Dominant weights at a fixed level, conformal weights, orbit expansion.
//!
//! The level-k alcove is P_+^k = {λ ∈ Z_{≥0}^r : Σ a_i^∨ λ_i ≤ k}. Externally
//! every weight is *unshifted* (the vacuum is 0); the modular formulas operate
//! on the shifted alcove ρ + P_+^k and the conversion is done at module
//! boundaries. Weights are stored as plain `Vec<i64>` Dynkin labels; the
//! `Weight` wrapper carries the convention tag for serialized artifacts.

use crate::liealg::{AlgebraData, Rat};
use crate::{Error, Result};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;

/// Which alcove a set of labels lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Vacuum is 0 = (0,…,0); labels satisfy Σ a_i^∨ λ_i ≤ k.
    Unshifted,
    /// Vacuum is ρ = (1,…,1); labels are strictly positive, Σ a_i^∨ λ_i < κ.
    Shifted,
}

/// A weight with an explicit convention tag (used in serialized artifacts;
/// internal code passes bare label vectors).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weight {
    pub labels: Vec<i64>,
    pub convention: Convention,
}

/// A fixed algebra at a fixed level, with the derived constants every stage
/// needs: κ = k + h^∨, the central charge, and the Galois modulus N·κ.
#[derive(Debug, Clone)]
pub struct LevelContext {
    pub alg: Arc<AlgebraData>,
    pub k: i64,
    pub kappa: i64,
    pub central_charge: Rat,
    pub galois_modulus: i64,
}

impl LevelContext {
    pub fn new(alg: Arc<AlgebraData>, k: i64) -> LevelContext {
        assert!(k >= 1, "level must be positive");
        let kappa = k + alg.dual_coxeter;
        let central_charge = Ratio::new(k * alg.dim_g, kappa);
        let galois_modulus = alg.center_exponent * kappa;
        LevelContext {
            alg,
            k,
            kappa,
            central_charge,
            galois_modulus,
        }
    }

    /// Shift a weight into the ρ-translated alcove.
    pub fn shift(&self, lam: &[i64]) -> Vec<i64> {
        lam.iter().map(|&l| l + 1).collect()
    }

    /// Undo the ρ-shift.
    pub fn unshift(&self, lam: &[i64]) -> Vec<i64> {
        lam.iter().map(|&l| l - 1).collect()
    }

    /// True if the unshifted labels lie in P_+^k.
    pub fn contains(&self, lam: &[i64]) -> bool {
        lam.len() == self.alg.rank
            && lam.iter().all(|&l| l >= 0)
            && self.alg.label0(lam, self.k) >= 0
    }

    /// Exact conformal weight h_λ = (λ|λ+2ρ)/(2κ) for unshifted labels.
    pub fn conformal_weight(&self, lam: &[i64]) -> Rat {
        let two_rho: Vec<i64> = lam.iter().map(|&l| l + 2).collect();
        self.alg.inner_product(lam, &two_rho) / Ratio::from_integer(2 * self.kappa)
    }

    /// True if the twist θ(λ) = e^{2πi h_λ} is 1, i.e. h_λ ∈ Z. Exact.
    pub fn twist_is_trivial(&self, lam: &[i64]) -> bool {
        self.conformal_weight(lam).is_integer()
    }

    /// Number of weights in P_+^k, computed by dynamic programming so callers
    /// can check enumeration budgets before materializing anything.
    pub fn weight_count(&self) -> u128 {
        // counts[s] = #ways to reach Σ a_i^∨ λ_i = s with labels so far.
        let k = self.k as usize;
        let mut counts = vec![0u128; k + 1];
        counts[0] = 1;
        for &a in &self.alg.comarks {
            let a = a as usize;
            // unbounded-knapsack style accumulation
            for s in a..=k {
                counts[s] += counts[s - a];
            }
        }
        counts.iter().sum()
    }

    /// All of P_+^k in lexicographic order. Errors if the alcove exceeds
    /// `budget` weights; use `for_each_weight` to stream larger alcoves.
    pub fn enumerate_level(&self, budget: u128) -> Result<Vec<Vec<i64>>> {
        let count = self.weight_count();
        if count > budget {
            return Err(Error::EnumerationTooLarge { count, budget });
        }
        let mut out = Vec::with_capacity(count as usize);
        self.for_each_weight(&mut |lam| out.push(lam.to_vec()));
        Ok(out)
    }

    /// Visit every weight of P_+^k in lexicographic order without
    /// materializing the whole alcove.
    pub fn for_each_weight(&self, f: &mut dyn FnMut(&[i64])) {
        let r = self.alg.rank;
        let mut lam = vec![0i64; r];
        self.walk(&mut lam, 0, self.k, f);
    }

    fn walk(&self, lam: &mut Vec<i64>, pos: usize, remaining: i64, f: &mut dyn FnMut(&[i64])) {
        if pos == lam.len() {
            f(lam);
            return;
        }
        let a = self.alg.comarks[pos];
        for v in 0..=remaining / a {
            lam[pos] = v;
            self.walk(lam, pos + 1, remaining - v * a, f);
        }
        lam[pos] = 0;
    }

    /// All unshifted weights of P_+^k with h_min ≤ h_λ ≤ h_max, in
    /// lexicographic order.
    ///
    /// Uses branch-and-bound on the quadratic Q(λ) = (λ|λ+2ρ): every entry of
    /// the quadratic form is positive, so Q is monotone in each label on the
    /// positive orthant and a prefix whose zero-completion already exceeds
    /// 2κ·h_max can be pruned wholesale. This keeps large-κ windows (h ≤ 3 at
    /// κ in the thousands) tractable where a full alcove scan is not.
    pub fn enumerate_h_window(&self, h_min: Rat, h_max: Rat) -> Vec<Vec<i64>> {
        let two_kappa = Ratio::from_integer(2 * self.kappa);
        let q_min = h_min * two_kappa;
        let q_max = h_max * two_kappa;
        let mut out = Vec::new();
        let r = self.alg.rank;
        let mut lam = vec![0i64; r];
        self.window_walk(&mut lam, 0, self.k, q_min, q_max, &mut out);
        out
    }

    fn window_walk(
        &self,
        lam: &mut Vec<i64>,
        pos: usize,
        remaining: i64,
        q_min: Rat,
        q_max: Rat,
        out: &mut Vec<Vec<i64>>,
    ) {
        // Q of the current prefix with zero completion; monotone lower bound.
        let two_rho: Vec<i64> = lam.iter().map(|&l| l + 2).collect();
        let q = self.alg.inner_product(lam, &two_rho);
        if q > q_max {
            return;
        }
        if pos == lam.len() {
            if q >= q_min {
                out.push(lam.clone());
            }
            return;
        }
        let a = self.alg.comarks[pos];
        for v in 0..=remaining / a {
            lam[pos] = v;
            // Monotonicity: once the prefix itself exceeds q_max, larger v
            // only increase Q, so the loop below breaks via the early return
            // inside the recursive call. Do the check here to stop the loop.
            let two_rho: Vec<i64> = lam.iter().map(|&l| l + 2).collect();
            if self.alg.inner_product(lam, &two_rho) > q_max {
                lam[pos] = 0;
                return;
            }
            self.window_walk(lam, pos + 1, remaining - v * a, q_min, q_max, out);
        }
        lam[pos] = 0;
    }

    /// Apply the m-th power of the designated simple-current generator to
    /// unshifted labels. For A-series this rotates the extended labels m steps.
    pub fn current_power(&self, gen: &[usize], m: usize, lam: &[i64]) -> Vec<i64> {
        let mut cur = lam.to_vec();
        for _ in 0..m {
            cur = self.alg.apply_simple_current(gen, &cur, self.k);
        }
        cur
    }
}

/// An orbit of weights under a group of simple currents, optionally extended
/// by the duality (charge-conjugation) involution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    /// Lexicographically least member; the canonical name of the orbit.
    pub representative: Vec<i64>,
    /// All members, sorted lexicographically, deduplicated.
    pub members: Vec<Vec<i64>>,
    /// Human-readable tag, e.g. "J5", "J2c", "c", "1".
    pub group_tag: String,
}

/// Expand the orbit of `lam` (unshifted) under the listed simple-current
/// permutations (closed under composition is not required; the closure is
/// taken) and, if `with_duality`, under λ ↦ λ*.
pub fn expand_orbit(
    ctx: &LevelContext,
    lam: &[i64],
    perms: &[Vec<usize>],
    with_duality: bool,
    group_tag: &str,
) -> Orbit {
    let mut members: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut frontier = vec![lam.to_vec()];
    members.insert(lam.to_vec());
    while let Some(w) = frontier.pop() {
        let mut images: Vec<Vec<i64>> = perms
            .iter()
            .map(|p| ctx.alg.apply_simple_current(p, &w, ctx.k))
            .collect();
        if with_duality {
            images.push(ctx.alg.contragredient(&w));
        }
        for img in images {
            if members.insert(img.clone()) {
                frontier.push(img);
            }
        }
    }
    let members: Vec<Vec<i64>> = members.into_iter().collect();
    Orbit {
        representative: members[0].clone(),
        members,
        group_tag: group_tag.to_string(),
    }
}

/// Partition a set of weights into orbits; weights not in `set` reachable by
/// the group action are still included in their orbit (the caller guarantees
/// closure when that matters).
pub fn orbit_partition(
    ctx: &LevelContext,
    set: &[Vec<i64>],
    perms: &[Vec<usize>],
    with_duality: bool,
    group_tag: &str,
) -> Vec<Orbit> {
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut orbits = Vec::new();
    for w in set {
        if seen.contains(w) {
            continue;
        }
        let orbit = expand_orbit(ctx, w, perms, with_duality, group_tag);
        for m in &orbit.members {
            seen.insert(m.clone());
        }
        orbits.push(orbit);
    }
    orbits.sort_by(|a, b| a.representative.cmp(&b.representative));
    orbits
}

/// Parse a weight string: "(0110)", "0110", "(0,40,3)", with letters a–z
/// standing for 10–35 in the compact digit form.
pub fn parse_weight(s: &str, rank: usize) -> Result<Vec<i64>> {
    let bad = || Error::BadWeight(s.to_string());
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    // A single label is written as a plain number: "16" at rank 1 is the
    // weight (16), not the digit string [1, 6].
    if rank == 1 {
        if let Ok(l) = inner.trim().parse::<i64>() {
            if l >= 0 {
                return Ok(vec![l]);
            }
            return Err(bad());
        }
    }
    let labels: Vec<i64> = if inner.contains(',') {
        inner
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    } else {
        inner
            .chars()
            .map(|c| match c {
                '0'..='9' => Ok(c as i64 - '0' as i64),
                'a'..='z' => Ok(c as i64 - 'a' as i64 + 10),
                _ => Err(bad()),
            })
            .collect::<Result<_>>()?
    };
    if labels.len() != rank || labels.iter().any(|&l| l < 0) {
        return Err(bad());
    }
    Ok(labels)
}

/// Canonical display form: compact digits when all labels fit, else
/// comma-separated. Inverse of `parse_weight` on its own output.
pub fn format_weight(labels: &[i64]) -> String {
    if labels.len() == 1 {
        format!("({})", labels[0])
    } else if labels.iter().all(|&l| (0..=9).contains(&l)) {
        let digits: String = labels.iter().map(|&l| (b'0' + l as u8) as char).collect();
        format!("({digits})")
    } else {
        let parts: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{algebra, Series};

    fn ctx(series: Series, rank: usize, k: i64) -> LevelContext {
        LevelContext::new(algebra(series, rank).unwrap(), k)
    }

    #[test]
    fn alcove_counts() {
        // |P_+^k(A_r)| = C(k+r, r).
        let binom = |n: i64, r: i64| -> u128 {
            (1..=r as u128).fold(1u128, |acc, i| acc * (n as u128 - r as u128 + i) / i)
        };
        for r in 1..=4 {
            for k in 1..=9 {
                let c = ctx(Series::A, r, k);
                assert_eq!(c.weight_count(), binom(k + r as i64, r as i64), "A{r} k={k}");
                assert_eq!(c.enumerate_level(10_000).unwrap().len() as u128, c.weight_count());
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let c = ctx(Series::A, 4, 100);
        assert!(matches!(
            c.enumerate_level(1000),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn conformal_weights_a1() {
        // h_n = n(n+2)/(4κ) for A_1.
        let c = ctx(Series::A, 1, 10);
        assert_eq!(c.conformal_weight(&[0]), Ratio::from_integer(0));
        assert_eq!(c.conformal_weight(&[6]), Ratio::from_integer(1)); // 6·8/48
        assert_eq!(c.conformal_weight(&[10]), Ratio::new(5, 2));
        assert!(c.twist_is_trivial(&[6]));
        assert!(!c.twist_is_trivial(&[1]));
    }

    #[test]
    fn conformal_weight_a2_adjoint() {
        // (1,1) is the adjoint; h = h^∨/κ = 3/κ.
        for k in 2..=9 {
            let c = ctx(Series::A, 2, k);
            assert_eq!(c.conformal_weight(&[1, 1]), Ratio::new(3, k + 3));
        }
    }

    #[test]
    fn h_window_matches_brute_force() {
        for (r, k) in [(1usize, 12i64), (2, 9), (3, 8)] {
            let c = ctx(Series::A, r, k);
            let lo = Ratio::new(1, 2);
            let hi = Ratio::from_integer(2);
            let fast = c.enumerate_h_window(lo, hi);
            let brute: Vec<Vec<i64>> = c
                .enumerate_level(100_000)
                .unwrap()
                .into_iter()
                .filter(|w| {
                    let h = c.conformal_weight(w);
                    h >= lo && h <= hi
                })
                .collect();
            assert_eq!(fast, brute, "A{r} k={k}");
        }
    }

    #[test]
    fn vacuum_orbit_a2_level9() {
        let c = ctx(Series::A, 2, 9);
        let gen = c.alg.simple_currents[c.alg.sc_generators[0]].clone();
        let orbit = expand_orbit(&c, &[0, 0], &[gen], false, "J3");
        assert_eq!(
            orbit.members,
            vec![vec![0, 0], vec![0, 9], vec![9, 0]]
        );
        assert_eq!(orbit.representative, vec![0, 0]);
    }

    #[test]
    fn orbit_partition_counts() {
        // A_3 k=8: (020) and (303) each have a free J-orbit of size 4.
        let c = ctx(Series::A, 3, 8);
        let gen = c.alg.simple_currents[c.alg.sc_generators[0]].clone();
        let o = expand_orbit(&c, &[0, 2, 0], &[gen.clone()], false, "J4");
        assert_eq!(o.members.len(), 4);
        assert!(o.members.contains(&vec![6, 0, 2]));
        let o = expand_orbit(&c, &[3, 0, 3], &[gen.clone()], false, "J4");
        assert_eq!(o.members.len(), 4);
        // J⁴ = id on every weight; (222) has all extended labels equal, so it
        // is fixed by J outright.
        assert_eq!(c.current_power(&gen, 4, &[1, 2, 1]), vec![1, 2, 1]);
        assert_eq!(c.current_power(&gen, 1, &[2, 2, 2]), vec![2, 2, 2]);
        // Partition of {vacuum orbit ∪ (121) orbit ∪ (222) orbit}.
        let orbits = orbit_partition(
            &c,
            &[vec![0, 0, 0], vec![1, 2, 1], vec![8, 0, 0], vec![2, 2, 2]],
            &[gen],
            false,
            "J4",
        );
        assert_eq!(orbits.len(), 3);
        let sizes: Vec<usize> = orbits.iter().map(|o| o.members.len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 9); // 4 + 4 + 1
    }

    #[test]
    fn weight_parsing() {
        assert_eq!(parse_weight("(0110)", 4).unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(parse_weight("(0,40,3)", 3).unwrap(), vec![0, 40, 3]);
        assert_eq!(parse_weight("(f0f)", 3).unwrap(), vec![15, 0, 15]);
        assert_eq!(parse_weight("(01w2)", 4).unwrap(), vec![0, 1, 32, 2]);
        assert!(parse_weight("(011)", 4).is_err());
        assert_eq!(format_weight(&[0, 1, 1, 0]), "(0110)");
        assert_eq!(format_weight(&[0, 40, 3]), "(0,40,3)");
        for w in [vec![0, 1, 1, 0], vec![0, 40, 3], vec![15, 0, 15]] {
            assert_eq!(parse_weight(&format_weight(&w), w.len()).unwrap(), w);
        }
    }

    #[test]
    fn current_power_cycles() {
        let c = ctx(Series::A, 4, 5);
        let gen = c.alg.simple_currents[c.alg.sc_generators[0]].clone();
        let w = vec![1, 0, 0, 1];
        assert_eq!(c.current_power(&gen, 5, &w), w);
        let mut seen = std::collections::BTreeSet::new();
        for m in 0..5 {
            seen.insert(c.current_power(&gen, m, &w));
        }
        assert_eq!(seen.len(), 5);
    }
}
