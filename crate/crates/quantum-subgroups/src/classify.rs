//! Steps 1–3 of the classification: level thresholds, detection of the
//! finitely many levels that could carry an exotic extension, and the
//! positivity-driven elimination/identification engine.
//!
//! **Step 1 (thresholds).** For each level, p is the smallest prime coprime
//! to f_g·κ and L_max = ⌊p(p−1)h^∨dim(g)/(6κ)⌋. A level can carry an exotic
//! extension only if L_max ≥ 2 or the level admits a Lie-type conformal
//! extension; and κ is a priori bounded by a fixed prime product, so the scan
//! is finite.
//!
//! **Step 2 (candidate windows).** A surviving level is kept only if some
//! candidate weight that is not a simple current has conformal weight in
//! [2, L_max] (at Lie-type levels, in [1, max(1, L_max)]).
//!
//! **Step 3 (elimination).** Any connected étale algebra has the shape
//! A = ⟨1⟩_{J_A} + Σ_λ Z_λ⟨λ⟩ over orbits of candidates under 𝒢_A = ⟨C,J_A⟩,
//! and evaluating Σ_λ Z_λ S_{λ,μ} ≥ 0 at probe weights μ in the centralizer
//! of J_A yields upper bounds on the Z_λ. The engine sweeps probes in order
//! of increasing conformal weight, then two-probe nonnegative combinations,
//! and finally enumerates the residual coefficient box exhaustively against
//! positivity at every centralizer weight. The outcome is a replayable
//! certificate (no exotic object), a uniquely identified object, or an
//! honest `Unresolved`.

use crate::galois;
use crate::liealg::{AlgebraData, Rat, Series};
use crate::modular::a_series_s_shifted;
use crate::weights::{expand_orbit, orbit_partition, LevelContext, Orbit};
use crate::{catalog, Error, Result};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Default probe budget for the elimination engine.
pub const DEFAULT_PROBE_BUDGET: usize = 5000;

/// Residual coefficient boxes larger than this are not enumerated.
const Z_BOX_CAP: u128 = 2_000_000;

/// Full positivity checks enumerate the whole alcove up to this size; beyond
/// it only the probe set is used.
const FULL_CHECK_ALCOVE_CAP: u128 = 150_000;

/// Per-level arithmetic thresholds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub k: i64,
    pub kappa: i64,
    /// Smallest prime coprime to f_g·κ.
    pub p: i64,
    pub l_max: i64,
    pub survives_step1: bool,
    pub lie_type: bool,
}

fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Threshold data for one level.
pub fn l_max(ctx: &LevelContext) -> ThresholdReport {
    let alg = &ctx.alg;
    let m = alg.f_g * ctx.kappa;
    let p = (2..).find(|&p| is_prime(p) && m % p != 0).unwrap();
    let l_max = p * (p - 1) * alg.dual_coxeter * alg.dim_g / (6 * ctx.kappa);
    let lie_type = galois::is_lie_type(ctx, None);
    ThresholdReport {
        k: ctx.k,
        kappa: ctx.kappa,
        p,
        l_max,
        survives_step1: l_max >= 2 || lie_type,
        lie_type,
    }
}

/// A priori bound on κ: the product of the first primes (omitting f_g) up to
/// the smallest l ≥ 5 whose full prime product reaches A(p_l² − p_l), where
/// A = h^∨ dim(g)/12.
pub fn kappa_max(alg: &AlgebraData) -> i64 {
    let a = Ratio::new(alg.dual_coxeter * alg.dim_g, 12);
    let mut primes: Vec<i64> = Vec::new();
    let mut n = 2;
    loop {
        if is_prime(n) {
            primes.push(n);
            let l = primes.len();
            if l >= 5 {
                let pl = primes[l - 1];
                let product: i64 = primes.iter().product();
                if Ratio::from_integer(product) >= a * Ratio::from_integer(pl * pl - pl) {
                    return primes.iter().filter(|&&p| p != alg.f_g).product();
                }
            }
        }
        n += 1;
    }
}

/// All threshold reports for k = 1 .. κ_max − h^∨.
pub fn step1_reports(alg: std::sync::Arc<AlgebraData>) -> Vec<ThresholdReport> {
    let k_max = kappa_max(&alg) - alg.dual_coxeter;
    (1..=k_max)
        .map(|k| l_max(&LevelContext::new(alg.clone(), k)))
        .collect()
}

/// Step-1 surviving levels.
pub fn step1_levels(alg: std::sync::Arc<AlgebraData>) -> Vec<i64> {
    step1_reports(alg)
        .into_iter()
        .filter(|r| r.survives_step1)
        .map(|r| r.k)
        .collect()
}

/// True if `lam` is a simple-current image of the vacuum.
pub fn is_simple_current(ctx: &LevelContext, lam: &[i64]) -> bool {
    ctx.alg
        .simple_currents
        .iter()
        .any(|p| ctx.alg.simple_current_weight(p, ctx.k) == lam)
}

/// Is there any candidate at this level that is not a simple current? This
/// decides the "candidates consist of only simple currents" elimination and
/// can require a scan of the full alcove; the A-series scan is parallelised
/// and uses an exact integer twist prefilter before the expensive
/// total-positivity test.
pub fn has_non_sc_candidate(ctx: &LevelContext) -> Result<bool> {
    let currents: BTreeSet<Vec<i64>> = ctx
        .alg
        .simple_currents
        .iter()
        .map(|p| ctx.alg.simple_current_weight(p, ctx.k))
        .collect();
    if ctx.alg.series != Series::A || ctx.alg.rank > 4 {
        let cands = galois::candidate_set(ctx, None)?;
        return Ok(cands.iter().any(|w| !currents.contains(w)));
    }
    let r = ctx.alg.rank;
    let rp = r as i64 + 1;
    let modulus = 2 * ctx.kappa * rp;
    let chunks: Vec<Result<bool>> = (0..=ctx.k)
        .into_par_iter()
        .map(|l1| {
            let mut lam = vec![0i64; r];
            lam[0] = l1;
            let mut found = false;
            let mut walk = |lam: &mut Vec<i64>, depth: usize, rest: i64| -> Result<()> {
                // Hand-rolled DFS over the remaining labels.
                fn go(
                    ctx: &LevelContext,
                    lam: &mut Vec<i64>,
                    depth: usize,
                    rest: i64,
                    modulus: i64,
                    currents: &BTreeSet<Vec<i64>>,
                    found: &mut bool,
                ) -> Result<()> {
                    if *found {
                        return Ok(());
                    }
                    if depth == lam.len() {
                        let two_rho: Vec<i64> = lam.iter().map(|&l| l + 2).collect();
                        if galois::a_ip_scaled(lam, &two_rho).rem_euclid(modulus) == 0
                            && !currents.contains(lam.as_slice())
                            && galois::is_candidate(ctx, lam, None)?
                        {
                            *found = true;
                        }
                        return Ok(());
                    }
                    for v in 0..=rest {
                        lam[depth] = v;
                        go(ctx, lam, depth + 1, rest - v, modulus, currents, found)?;
                        if *found {
                            break;
                        }
                    }
                    lam[depth] = 0;
                    Ok(())
                }
                go(ctx, lam, depth, rest, modulus, &currents, &mut found)
            };
            walk(&mut lam, 1, ctx.k - l1)?;
            Ok(found)
        })
        .collect();
    for c in chunks {
        if c? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Step-2 filter for a single level. A level is eliminated when no
/// twist-trivial weight of totally positive quantum dimension has conformal
/// weight in the window [1, L_max] (levels with a Lie-type conformal
/// extension are exempt from this window test), or when every candidate is a
/// simple current. The window test is cheap, so it runs before the
/// full-alcove simple-current scan.
pub fn step2_survives(ctx: &LevelContext, report: &ThresholdReport) -> Result<bool> {
    if !report.lie_type {
        let mut found = false;
        for lam in ctx.enumerate_h_window(Rat::from_integer(1), Rat::from_integer(report.l_max)) {
            let h = ctx.conformal_weight(&lam);
            if h.is_integer() && galois::totally_positive(ctx, &lam)? {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    has_non_sc_candidate(ctx)
}

/// Step-2 surviving levels (the finitely many levels that can carry an
/// exotic extension).
pub fn step2_levels(alg: std::sync::Arc<AlgebraData>) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for report in step1_reports(alg.clone()) {
        if !report.survives_step1 {
            continue;
        }
        let ctx = LevelContext::new(alg.clone(), report.k);
        if step2_survives(&ctx, &report)? {
            out.push(report.k);
        }
    }
    Ok(out)
}

/// Ocneanu simplicity criterion for a *shifted* weight: Ind(λ) is simple
/// when (λ+λ*−2ρ | λ+λ*) < 2κ·h_bound. Exact rational test.
pub fn ocneanu_simple(ctx: &LevelContext, lam_shifted: &[i64], h_bound: Rat) -> bool {
    let dual = ctx.alg.contragredient(lam_shifted);
    let sum: Vec<i64> = lam_shifted.iter().zip(&dual).map(|(&a, &b)| a + b).collect();
    let minus: Vec<i64> = sum.iter().map(|&v| v - 2).collect();
    ctx.alg.inner_product(&minus, &sum) < Ratio::from_integer(2 * ctx.kappa) * h_bound
}

/// Divisors d of r' = r+1 for which the order-d simple-current extension of
/// A_r at level k exists: d odd with d² | kr', or d even with 2d² | kr'.
pub fn sc_admissible_divisors(ctx: &LevelContext) -> Vec<i64> {
    assert_eq!(ctx.alg.series, Series::A);
    let rp = ctx.alg.rank as i64 + 1;
    let krp = ctx.k * rp;
    (1..=rp)
        .filter(|&d| {
            rp % d == 0
                && if d % 2 == 1 {
                    krp % (d * d) == 0
                } else {
                    krp % (2 * d * d) == 0
                }
        })
        .collect()
}

/// Choice of simple-current subgroup for the elimination engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JChoice {
    /// Largest admissible divisor (the default per the reduction lemma).
    Auto,
    /// d = 1.
    Trivial,
    /// d = r+1 (errors when inadmissible).
    Full,
    Explicit(i64),
}

/// One probe: a nonnegative combination Σ x·S_{·,μ}.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ProbeTerm {
    pub mu: Vec<i64>,
    pub x: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitBound {
    pub orbit_rep: Vec<i64>,
    pub bound: i64,
}

/// Replayable elimination certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub algebra: String,
    pub level: i64,
    /// Order of the simple-current subgroup J_A used.
    pub jgroup: i64,
    /// The probes that produced the final bounds, in application order.
    pub probes: Vec<Vec<ProbeTerm>>,
    pub bounds: Vec<OrbitBound>,
    pub verdict: String,
}

/// A (candidate) connected étale algebra: the simple-current part ⟨1⟩_{J_A}
/// with coefficient 1 plus orbit coefficients Z.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaleObject {
    pub algebra: String,
    pub level: i64,
    pub jgroup: i64,
    /// All orbits of 𝒢_A = ⟨C, J_A⟩ on the support, vacuum orbit first.
    pub orbits: Vec<Orbit>,
    /// Coefficient per support weight (unshifted), sorted; vacuum-orbit
    /// weights carry 1.
    pub z: Vec<(Vec<i64>, i64)>,
}

impl EtaleObject {
    pub fn z_of(&self, lam: &[i64]) -> i64 {
        self.z
            .iter()
            .find(|(w, _)| w == lam)
            .map(|&(_, z)| z)
            .unwrap_or(0)
    }

    /// Support weights with nonzero coefficient, sorted.
    pub fn support(&self) -> Vec<Vec<i64>> {
        self.z
            .iter()
            .filter(|(_, z)| *z > 0)
            .map(|(w, _)| w.clone())
            .collect()
    }
}

/// Outcome of `eliminate_level`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    NoExotic {
        certificate: Certificate,
    },
    Identified {
        etale: EtaleObject,
        matches_catalog: Option<String>,
    },
    Unresolved {
        bounds: Vec<OrbitBound>,
        /// Nonzero coefficient assignments that passed every positivity
        /// check, when more than one did.
        survivors: Vec<Vec<(Vec<i64>, i64)>>,
    },
}

/// Resolve a `JChoice` to a divisor.
pub fn resolve_jchoice(ctx: &LevelContext, j: JChoice) -> Result<i64> {
    let adm = sc_admissible_divisors(ctx);
    match j {
        JChoice::Auto => Ok(*adm.iter().max().unwrap_or(&1)),
        JChoice::Trivial => Ok(1),
        JChoice::Full => {
            let rp = ctx.alg.rank as i64 + 1;
            if adm.contains(&rp) {
                Ok(rp)
            } else {
                Err(Error::Msg(format!(
                    "full simple-current group (d={rp}) is not admissible at level {}",
                    ctx.k
                )))
            }
        }
        JChoice::Explicit(d) => {
            if adm.contains(&d) {
                Ok(d)
            } else {
                Err(Error::Msg(format!(
                    "d={d} is not an admissible simple-current divisor at level {}",
                    ctx.k
                )))
            }
        }
    }
}

/// The elimination engine state for one (level, J_A) pair.
struct Engine<'a> {
    ctx: &'a LevelContext,
    d: i64,
    /// Vacuum orbit ⟨1⟩_{J_A} (unshifted members).
    vac: Vec<Vec<i64>>,
    /// Non-vacuum candidate orbits under ⟨C, J_A⟩.
    orbits: Vec<Orbit>,
    /// Shifted members per orbit, for S evaluations.
    members_shifted: Vec<Vec<Vec<i64>>>,
    /// Current upper bounds per orbit.
    bounds: Vec<i64>,
    probes_used: Vec<Vec<ProbeTerm>>,
}

/// (vacuum term, per-orbit coefficients) of the positivity row at probe μ.
struct Row {
    v: f64,
    c: Vec<f64>,
}

impl<'a> Engine<'a> {
    fn new(ctx: &'a LevelContext, d: i64) -> Result<Engine<'a>> {
        let rp = ctx.alg.rank + 1;
        let gen = ctx.alg.simple_currents[ctx.alg.sc_generators[0]].clone();
        let j_gen = {
            // J_A generator = (r'/d)-th power of the basic rotation.
            let mut p: Vec<usize> = (0..rp).collect();
            for _ in 0..(rp as i64 / d) {
                p = p.iter().map(|&i| gen[i]).collect();
            }
            p
        };
        let vac_orbit = expand_orbit(ctx, &vec![0; ctx.alg.rank], &[j_gen.clone()], false, "vac");
        // Every element of J_A must be twist-trivial for ⟨1⟩_{J_A} to be an
        // algebra; admissibility guarantees this, but assert it anyway.
        for w in &vac_orbit.members {
            assert!(
                ctx.twist_is_trivial(w),
                "inadmissible simple-current subgroup: {w:?} has nontrivial twist"
            );
        }
        assert_eq!(vac_orbit.members.len() as i64, d);

        let candidates = galois::candidate_set(ctx, None)?;
        let in_centralizer: Vec<Vec<i64>> = candidates
            .into_iter()
            .filter(|w| crate::modular::a_series_centralizer_test(d, w))
            .filter(|w| !vac_orbit.members.contains(w))
            .collect();
        let mut orbits = orbit_partition(ctx, &in_centralizer, &[j_gen.clone()], true, "");
        // Tag orbits in the ⟨…⟩_d / ⟨…⟩_{dc} notation: d for the J_A orbit,
        // with a trailing c when charge conjugation enlarges it.
        for o in &mut orbits {
            let j_only = expand_orbit(ctx, &o.representative, &[j_gen.clone()], false, "");
            o.group_tag = if j_only.members.len() == o.members.len() {
                format!("{d}")
            } else {
                format!("{d}c")
            };
        }
        // Orbit support must be candidate-closed: drop orbits reaching
        // outside the candidate/centralizer set (their Z is forced to 0 by
        // closure under J_A and duality).
        let cand_set: BTreeSet<Vec<i64>> = in_centralizer.iter().cloned().collect();
        let (orbits, dead): (Vec<Orbit>, Vec<Orbit>) = orbits
            .into_iter()
            .partition(|o| o.members.iter().all(|m| cand_set.contains(m)));
        drop(dead);

        let members_shifted: Vec<Vec<Vec<i64>>> = orbits
            .iter()
            .map(|o| o.members.iter().map(|m| ctx.shift(m)).collect())
            .collect();

        // Initial bounds: quantum dimension, improved to 1 for Galois
        // associates of the vacuum (their diagonal multiplicity is 1).
        let assoc1 = galois_associates_of_vacuum(ctx)?;
        let rho = vec![1i64; ctx.alg.rank];
        let s11 = a_series_s_shifted(ctx, &rho, &rho).re;
        let bounds: Vec<i64> = orbits
            .iter()
            .map(|o| {
                let rep_shifted = ctx.shift(&o.representative);
                let qdim = (a_series_s_shifted(ctx, &rep_shifted, &rho).re / s11).abs();
                let cap = (qdim + 1e-6).floor().min(1e15) as i64;
                if assoc1.contains(&o.representative)
                    || o.members.iter().any(|m| assoc1.contains(m))
                {
                    cap.min(1)
                } else {
                    cap
                }
            })
            .collect();

        Ok(Engine {
            ctx,
            d,
            vac: vac_orbit.members,
            orbits,
            members_shifted,
            bounds,
            probes_used: Vec::new(),
        })
    }

    /// Positivity row at a centralizer weight μ (unshifted).
    fn row(&self, mu: &[i64]) -> Row {
        let mu_shifted = self.ctx.shift(mu);
        let rho = vec![1i64; self.ctx.alg.rank];
        let v = self.d as f64 * a_series_s_shifted(self.ctx, &rho, &mu_shifted).re;
        let c = self
            .members_shifted
            .iter()
            .map(|members| {
                members
                    .iter()
                    .map(|m| a_series_s_shifted(self.ctx, m, &mu_shifted).re)
                    .sum()
            })
            .collect();
        Row { v, c }
    }

    fn combine(rows: &[(&Row, i64)]) -> Row {
        let n = rows[0].0.c.len();
        let mut v = 0.0;
        let mut c = vec![0.0; n];
        for (r, x) in rows {
            v += r.v * *x as f64;
            for (ci, rc) in c.iter_mut().zip(&r.c) {
                *ci += rc * *x as f64;
            }
        }
        Row { v, c }
    }

    fn eps(row: &Row) -> f64 {
        let scale: f64 = row.v.abs() + row.c.iter().map(|x| x.abs()).sum::<f64>();
        1e-9 * scale.max(1e-6)
    }

    /// Apply a combined row; returns true if any bound improved.
    fn apply(&mut self, row: &Row, terms: &[ProbeTerm]) -> bool {
        let eps = Self::eps(row);
        let mut improved = false;
        for o in 0..self.orbits.len() {
            if row.c[o] >= -eps || self.bounds[o] == 0 {
                continue;
            }
            let mut slack = row.v;
            for (o2, (&c2, &b2)) in row.c.iter().zip(&self.bounds).enumerate() {
                if o2 != o && c2 > eps {
                    slack += b2 as f64 * c2;
                }
            }
            let nb = ((slack / -row.c[o]) + 1e-6).floor().max(0.0) as i64;
            if nb < self.bounds[o] {
                self.bounds[o] = nb;
                improved = true;
            }
        }
        if improved {
            self.probes_used.push(terms.to_vec());
        }
        improved
    }

    fn all_zero(&self) -> bool {
        self.bounds.iter().all(|&b| b == 0)
    }

    fn bound_list(&self) -> Vec<OrbitBound> {
        self.orbits
            .iter()
            .zip(&self.bounds)
            .map(|(o, &b)| OrbitBound {
                orbit_rep: o.representative.clone(),
                bound: b,
            })
            .collect()
    }
}

/// The set of Galois images ℓ.1 of the vacuum (unshifted), over all units ℓ.
pub fn galois_associates_of_vacuum(ctx: &LevelContext) -> Result<BTreeSet<Vec<i64>>> {
    let vac = vec![0i64; ctx.alg.rank];
    let mut out = BTreeSet::new();
    for ell in galois::units(ctx.galois_modulus) {
        out.insert(galois::galois_act(ctx, ell, &vac)?.0);
    }
    Ok(out)
}

/// Probe supply: centralizer weights ordered by (h, qdim), truncated to the
/// budget. Streams by conformal-weight windows when the alcove is too large
/// to enumerate outright.
fn probe_list(ctx: &LevelContext, d: i64, budget: usize) -> Result<Vec<Vec<i64>>> {
    let rho = vec![1i64; ctx.alg.rank];
    let s11 = a_series_s_shifted(ctx, &rho, &rho).re;
    let keyed = |w: &Vec<i64>| -> (Rat, f64) {
        let h = ctx.conformal_weight(w);
        let qd = (a_series_s_shifted(ctx, &ctx.shift(w), &rho).re / s11).abs();
        (h, qd)
    };
    let mut pool: Vec<Vec<i64>> = Vec::new();
    if ctx.weight_count() <= FULL_CHECK_ALCOVE_CAP {
        ctx.for_each_weight(&mut |w| {
            if crate::modular::a_series_centralizer_test(d, w) && w.iter().any(|&l| l != 0) {
                pool.push(w.to_vec());
            }
        });
    } else {
        let mut h_lo = 0i64;
        while pool.len() < 3 * budget && h_lo < 40 {
            let window = ctx.enumerate_h_window(
                Rat::from_integer(h_lo),
                Rat::from_integer(h_lo + 1) - Ratio::new(1, 1_000_000_000),
            );
            for w in window {
                if crate::modular::a_series_centralizer_test(d, &w) && w.iter().any(|&l| l != 0) {
                    pool.push(w);
                }
            }
            h_lo += 1;
        }
    }
    let mut keyed_pool: Vec<((Rat, f64), Vec<i64>)> =
        pool.into_iter().map(|w| (keyed(&w), w)).collect();
    keyed_pool.sort_by(|a, b| {
        a.0 .0
            .cmp(&b.0 .0)
            .then(a.0 .1.partial_cmp(&b.0 .1).unwrap())
            .then(a.1.cmp(&b.1))
    });
    Ok(keyed_pool
        .into_iter()
        .take(budget)
        .map(|(_, w)| w)
        .collect())
}

/// Positivity check of a fixed coefficient assignment against a set of μ.
fn assignment_positive(engine: &Engine, z: &[i64], mus: &[Vec<i64>]) -> bool {
    for mu in mus {
        let row = engine.row(mu);
        let eps = Engine::eps(&row).max(1e-7 * row.v.abs().max(1e-6));
        let total: f64 = row.v
            + row
                .c
                .iter()
                .zip(z)
                .map(|(&c, &zi)| c * zi as f64)
                .sum::<f64>();
        if total < -eps {
            return false;
        }
    }
    true
}

/// Run the elimination engine at one level.
pub fn eliminate_level(ctx: &LevelContext, j: JChoice, probe_budget: usize) -> Result<Verdict> {
    if ctx.alg.series != Series::A {
        return Err(Error::Msg(
            "the elimination engine supports the A-series only".into(),
        ));
    }
    let d = resolve_jchoice(ctx, j)?;
    let mut engine = Engine::new(ctx, d)?;
    let probes = probe_list(ctx, d, probe_budget)?;

    let certificate = |engine: &Engine| Certificate {
        algebra: ctx.alg.spec_string(),
        level: ctx.k,
        jgroup: d,
        probes: engine.probes_used.clone(),
        bounds: engine.bound_list(),
        verdict: "no-exotic".into(),
    };

    if engine.orbits.is_empty() {
        return Ok(Verdict::NoExotic {
            certificate: certificate(&engine),
        });
    }

    // Pass 0: look for a single probe that alone zeroes every orbit — the
    // preferred one-line certificate.
    let mut rows: Vec<Row> = Vec::with_capacity(probes.len());
    for mu in &probes {
        let row = engine.row(mu);
        let eps = Engine::eps(&row);
        let kills_all = row.c.iter().all(|&c| c < -eps)
            && row
                .c
                .iter()
                .all(|&c| ((row.v / -c) + 1e-6).floor() as i64 == 0);
        if kills_all {
            let terms = vec![ProbeTerm {
                mu: mu.clone(),
                x: 1,
            }];
            engine.bounds.iter_mut().for_each(|b| *b = 0);
            engine.probes_used.push(terms);
            return Ok(Verdict::NoExotic {
                certificate: certificate(&engine),
            });
        }
        rows.push(row);
    }

    // Pass 1: single probes to a fixpoint.
    loop {
        let mut improved = false;
        for (mu, row) in probes.iter().zip(&rows) {
            if engine.apply(
                row,
                &[ProbeTerm {
                    mu: mu.clone(),
                    x: 1,
                }],
            ) {
                improved = true;
            }
        }
        if !improved || engine.all_zero() {
            break;
        }
    }

    // Pass 2: two-probe nonnegative combinations over the leading probes.
    if !engine.all_zero() {
        let lead = probes.len().min(60);
        'outer: loop {
            let mut improved = false;
            for i in 0..lead {
                for j2 in i + 1..lead {
                    for xi in 1..=3i64 {
                        for xj in 1..=3i64 {
                            let row = Engine::combine(&[(&rows[i], xi), (&rows[j2], xj)]);
                            let terms = vec![
                                ProbeTerm {
                                    mu: probes[i].clone(),
                                    x: xi,
                                },
                                ProbeTerm {
                                    mu: probes[j2].clone(),
                                    x: xj,
                                },
                            ];
                            if engine.apply(&row, &terms) {
                                improved = true;
                                if engine.all_zero() {
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }

    if engine.all_zero() {
        return Ok(Verdict::NoExotic {
            certificate: certificate(&engine),
        });
    }

    // Residual box: exhaust coefficient assignments against positivity.
    let box_size: u128 = engine
        .bounds
        .iter()
        .map(|&b| (b as u128) + 1)
        .product();
    if box_size > Z_BOX_CAP {
        return Ok(Verdict::Unresolved {
            bounds: engine.bound_list(),
            survivors: Vec::new(),
        });
    }
    // μ-set for the final check: the whole centralizer when enumerable,
    // otherwise the probe list.
    let mus: Vec<Vec<i64>> = if ctx.weight_count() <= FULL_CHECK_ALCOVE_CAP {
        let mut all = Vec::new();
        ctx.for_each_weight(&mut |w| {
            if crate::modular::a_series_centralizer_test(d, w) {
                all.push(w.to_vec());
            }
        });
        all
    } else {
        probes.clone()
    };

    let n = engine.orbits.len();
    let mut z = vec![0i64; n];
    let mut survivors: Vec<Vec<i64>> = Vec::new();
    'enumerate: loop {
        if z.iter().any(|&zi| zi > 0) && assignment_positive(&engine, &z, &mus) {
            survivors.push(z.clone());
        }
        // Odometer increment within the bounds box.
        for i in 0..n {
            if z[i] < engine.bounds[i] {
                z[i] += 1;
                for zj in z.iter_mut().take(i) {
                    *zj = 0;
                }
                continue 'enumerate;
            }
        }
        break;
    }

    let make_z = |zvec: &[i64]| -> Vec<(Vec<i64>, i64)> {
        let mut out: Vec<(Vec<i64>, i64)> = engine.vac.iter().map(|w| (w.clone(), 1)).collect();
        for (o, &zo) in engine.orbits.iter().zip(zvec) {
            if zo > 0 {
                for m in &o.members {
                    out.push((m.clone(), zo));
                }
            }
        }
        out.sort();
        out
    };

    match survivors.len() {
        0 => {
            engine.bounds.iter_mut().for_each(|b| *b = 0);
            let mut cert = certificate(&engine);
            cert.verdict = "no-exotic-after-box-search".into();
            Ok(Verdict::NoExotic { certificate: cert })
        }
        1 => {
            let zvec = &survivors[0];
            let mut orbits = vec![Orbit {
                representative: vec![0; ctx.alg.rank],
                members: engine.vac.clone(),
                group_tag: format!("{d}"),
            }];
            for (o, &zo) in engine.orbits.iter().zip(zvec) {
                if zo > 0 {
                    orbits.push(o.clone());
                }
            }
            let etale = EtaleObject {
                algebra: ctx.alg.spec_string(),
                level: ctx.k,
                jgroup: d,
                orbits,
                z: make_z(zvec),
            };
            let matches_catalog = catalog::match_etale(&etale.algebra, ctx.k, &etale.z);
            Ok(Verdict::Identified {
                etale,
                matches_catalog,
            })
        }
        _ => Ok(Verdict::Unresolved {
            bounds: engine.bound_list(),
            survivors: survivors.iter().map(|zv| make_z(zv)).collect(),
        }),
    }
}

/// Report from `check_etale_necessary`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NecessaryReport {
    pub connected: bool,
    pub duality_symmetric: bool,
    pub current_closed: bool,
    pub support_in_centralizer: bool,
    pub all_candidates: bool,
    pub qdim_bound_ok: bool,
    pub positivity_ok: bool,
    pub ocneanu_consistent: bool,
    pub pass: bool,
}

/// Verify every necessary condition on a claimed étale object: connectedness,
/// duality/current symmetry of the coefficients, candidate support, the
/// quantum-dimension cap, positivity of Σ Z_λ S_{λ,μ} at every centralizer μ
/// (within the enumeration cap), and consistency with the induced-module
/// simplicity bound.
pub fn check_etale_necessary(ctx: &LevelContext, etale: &EtaleObject) -> Result<NecessaryReport> {
    let vac = vec![0i64; ctx.alg.rank];
    let connected = etale.z_of(&vac) == 1;
    let support = etale.support();

    let duality_symmetric = support
        .iter()
        .all(|w| etale.z_of(&ctx.alg.contragredient(w)) == etale.z_of(w));

    let rp = ctx.alg.rank + 1;
    let gen = ctx.alg.simple_currents[ctx.alg.sc_generators[0]].clone();
    let mut j_gen: Vec<usize> = (0..rp).collect();
    for _ in 0..(rp as i64 / etale.jgroup) {
        j_gen = j_gen.iter().map(|&i| gen[i]).collect();
    }
    let current_closed = support.iter().all(|w| {
        let img = ctx.alg.apply_simple_current(&j_gen, w, ctx.k);
        etale.z_of(&img) == etale.z_of(w)
    });

    let support_in_centralizer = support
        .iter()
        .all(|w| crate::modular::a_series_centralizer_test(etale.jgroup, w));

    let mut all_candidates = true;
    for w in &support {
        if !galois::is_candidate(ctx, w, None)? {
            all_candidates = false;
        }
    }

    let rho = vec![1i64; ctx.alg.rank];
    let s11 = a_series_s_shifted(ctx, &rho, &rho).re;
    let qdim_bound_ok = support.iter().all(|w| {
        let qd = a_series_s_shifted(ctx, &ctx.shift(w), &rho).re / s11;
        (etale.z_of(w) as f64) <= qd + 1e-6
    });

    // Positivity at every centralizer weight (capped).
    let mut positivity_ok = true;
    if ctx.weight_count() <= FULL_CHECK_ALCOVE_CAP {
        let mut mus = Vec::new();
        ctx.for_each_weight(&mut |w| {
            if crate::modular::a_series_centralizer_test(etale.jgroup, w) {
                mus.push(w.to_vec());
            }
        });
        for mu in &mus {
            let mu_shifted = ctx.shift(mu);
            let total: f64 = etale
                .z
                .iter()
                .map(|(w, zc)| {
                    *zc as f64 * a_series_s_shifted(ctx, &ctx.shift(w), &mu_shifted).re
                })
                .sum();
            if total < -1e-7 {
                positivity_ok = false;
                break;
            }
        }
    }

    // Simplicity-bound consistency: h(A) is the minimum conformal weight of
    // the non-vacuum-orbit support; no non-simple-current support weight may
    // satisfy the simplicity inequality at that h(A).
    let vac_orbit = expand_orbit(ctx, &vac, &[j_gen.clone()], false, "vac");
    let non_vac: Vec<&Vec<i64>> = support
        .iter()
        .filter(|w| !vac_orbit.members.contains(*w))
        .collect();
    let ocneanu_consistent = if non_vac.is_empty() {
        true
    } else {
        let h_a = non_vac
            .iter()
            .map(|w| ctx.conformal_weight(w))
            .min()
            .unwrap();
        non_vac
            .iter()
            .filter(|w| !is_simple_current(ctx, w))
            .all(|w| !ocneanu_simple(ctx, &ctx.shift(w), h_a))
    };

    let pass = connected
        && duality_symmetric
        && current_closed
        && support_in_centralizer
        && all_candidates
        && qdim_bound_ok
        && positivity_ok
        && ocneanu_consistent;
    Ok(NecessaryReport {
        connected,
        duality_symmetric,
        current_closed,
        support_in_centralizer,
        all_candidates,
        qdim_bound_ok,
        positivity_ok,
        ocneanu_consistent,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{algebra, Series};

    fn ctx(rank: usize, k: i64) -> LevelContext {
        LevelContext::new(algebra(Series::A, rank).unwrap(), k)
    }

    #[test]
    fn threshold_examples() {
        let r = l_max(&ctx(1, 10));
        assert_eq!((r.p, r.l_max, r.lie_type), (5, 1, true));
        let r = l_max(&ctx(1, 13));
        assert_eq!((r.p, r.l_max), (7, 2));
        let r = l_max(&ctx(2, 207));
        assert_eq!((r.p, r.l_max), (11, 2));
    }

    #[test]
    fn kappa_max_values() {
        assert_eq!(kappa_max(&algebra(Series::A, 1).unwrap()), 1155);
        assert_eq!(kappa_max(&algebra(Series::A, 2).unwrap()), 2310);
        assert!(kappa_max(&algebra(Series::A, 4).unwrap()) >= 1050 + 5);
    }

    #[test]
    fn step1_a1() {
        let levels = step1_levels(algebra(Series::A, 1).unwrap());
        assert_eq!(levels, vec![1, 4, 7, 10, 13, 28]);
    }

    #[test]
    fn step2_a1_a2() {
        assert_eq!(step2_levels(algebra(Series::A, 1).unwrap()).unwrap(), vec![10, 28]);
        assert_eq!(
            step2_levels(algebra(Series::A, 2).unwrap()).unwrap(),
            vec![5, 9, 21, 57]
        );
    }

    #[test]
    fn step2_a3() {
        assert_eq!(
            step2_levels(algebra(Series::A, 3).unwrap()).unwrap(),
            vec![4, 6, 8, 10, 11, 12, 14, 16, 18, 20, 26, 32, 38, 86]
        );
    }

    #[test]
    fn step2_a4() {
        assert_eq!(
            step2_levels(algebra(Series::A, 4).unwrap()).unwrap(),
            vec![
                3, 5, 7, 9, 10, 11, 13, 15, 17, 19, 21, 23, 25, 31, 35, 37, 43, 49, 55, 85,
                115
            ]
        );
    }

    #[test]
    fn admissible_divisors() {
        assert_eq!(sc_admissible_divisors(&ctx(3, 8)), vec![1, 2, 4]);
        assert_eq!(sc_admissible_divisors(&ctx(1, 10)), vec![1]);
        assert_eq!(sc_admissible_divisors(&ctx(1, 28)), vec![1, 2]);
        assert_eq!(sc_admissible_divisors(&ctx(4, 5)), vec![1, 5]);
        assert_eq!(sc_admissible_divisors(&ctx(2, 21)), vec![1, 3]);
    }

    #[test]
    fn ocneanu_examples() {
        let c = ctx(1, 10);
        // ρ itself: 0 < anything.
        assert!(ocneanu_simple(&c, &[1], Rat::new(1, 2)));
        // λ = (6) unshifted → (7): (12|14)/2 = 84 ≥ 2κ·1 = 24.
        assert!(!ocneanu_simple(&c, &[7], Rat::from_integer(1)));
    }

    #[test]
    fn eliminate_a1_10_identifies() {
        let c = ctx(1, 10);
        let v = eliminate_level(&c, JChoice::Auto, 100).unwrap();
        match v {
            Verdict::Identified { etale, .. } => {
                assert_eq!(etale.jgroup, 1);
                assert_eq!(etale.z_of(&[6]), 1);
                assert_eq!(etale.support(), vec![vec![0], vec![6]]);
                let report = check_etale_necessary(&c, &etale).unwrap();
                assert!(report.pass, "{report:?}");
            }
            other => panic!("expected Identified, got {other:?}"),
        }
    }

    #[test]
    fn eliminate_a1_28_identifies() {
        let c = ctx(1, 28);
        let v = eliminate_level(&c, JChoice::Auto, 200).unwrap();
        match v {
            Verdict::Identified { etale, .. } => {
                assert_eq!(etale.jgroup, 2);
                assert_eq!(
                    etale.support(),
                    vec![vec![0], vec![10], vec![18], vec![28]]
                );
            }
            other => panic!("expected Identified, got {other:?}"),
        }
    }

    #[test]
    fn eliminate_a2_57_no_exotic() {
        let c = ctx(2, 57);
        let v = eliminate_level(&c, JChoice::Auto, DEFAULT_PROBE_BUDGET).unwrap();
        match v {
            Verdict::NoExotic { certificate } => {
                assert_eq!(certificate.jgroup, 3);
                assert!(certificate.bounds.iter().all(|b| b.bound == 0));
            }
            other => panic!("expected NoExotic, got {other:?}"),
        }
    }

    #[test]
    fn eliminate_identifies_all_catalog_levels() {
        let cases: &[(usize, i64)] = &[
            (2, 5),
            (2, 9),
            (2, 21),
            (3, 4),
            (3, 6),
            (3, 8),
            (4, 3),
            (4, 5),
            (4, 7),
        ];
        for &(rank, k) in cases {
            let c = ctx(rank, k);
            let v = eliminate_level(&c, JChoice::Auto, DEFAULT_PROBE_BUDGET).unwrap();
            match v {
                Verdict::Identified {
                    etale,
                    matches_catalog,
                } => {
                    assert_eq!(
                        matches_catalog.as_deref().map(|_| ()),
                        Some(()),
                        "A{rank} level {k}: identified object does not match the catalog: {:?}",
                        etale.z
                    );
                    let report = check_etale_necessary(&c, &etale).unwrap();
                    assert!(report.pass, "A{rank} level {k}: {report:?}");
                }
                other => panic!("A{rank} level {k}: expected Identified, got {other:?}"),
            }
        }
    }

    #[test]
    fn eliminate_a3_11_no_exotic_with_trivial_jgroup() {
        let c = ctx(3, 11);
        let v = eliminate_level(&c, JChoice::Trivial, DEFAULT_PROBE_BUDGET).unwrap();
        assert!(matches!(v, Verdict::NoExotic { .. }), "{v:?}");
    }

    #[test]
    fn trivial_algebra_passes_necessary_checks() {
        let c = ctx(2, 5);
        let etale = EtaleObject {
            algebra: "A2".into(),
            level: 5,
            jgroup: 1,
            orbits: vec![crate::weights::Orbit {
                representative: vec![0, 0],
                members: vec![vec![0, 0]],
                group_tag: "1".into(),
            }],
            z: vec![(vec![0, 0], 1)],
        };
        assert!(check_etale_necessary(&c, &etale).unwrap().pass);
    }

    #[test]
    fn bad_trial_object_fails_positivity() {
        // At (A_4,5), A = 1 + (0220) alone is not étale.
        let c = ctx(4, 5);
        let etale = EtaleObject {
            algebra: "A4".into(),
            level: 5,
            jgroup: 1,
            orbits: vec![],
            z: vec![(vec![0, 0, 0, 0], 1), (vec![0, 2, 2, 0], 1)],
        };
        let report = check_etale_necessary(&c, &etale).unwrap();
        assert!(!report.positivity_ok);
    }
}
