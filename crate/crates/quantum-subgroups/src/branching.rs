//! Stages 4–5: reconstructing and certifying branching matrices.
//!
//! A connected étale algebra A in C(g,k) that survives the elimination stage
//! determines a conformal extension: a level-1 target category C^e together
//! with a nonnegative-integer branching matrix B (rows = target simples,
//! columns = ambient simples) intertwining the modular data, BS = S^e B and
//! BT = T^e B. This module recovers B from the coefficient vector Z_λ of A
//! alone, by a bounded integer search over the vacuum column of the
//! intertwining equation, and then certifies the result against the full
//! equations.
//!
//! The search is insulated from floating-point error by design: every
//! comparison of S-matrix data happens at a scale set by the smallest
//! level-1 S-entry (never smaller than ~1/√(rank+1)), far above the 1e-6
//! guard bands used here, and all twist comparisons are exact rational
//! arithmetic on conformal weights.

use crate::catalog::CatalogEntry;
use crate::galois;
use crate::liealg::{self, AlgebraData, Rat, Series};
use crate::modular::{self, ModularData};
use crate::weights::{orbit_partition, parse_weight, LevelContext};
use crate::{Error, Result};
use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Guard band for comparisons of sums of S-matrix entries during the solve.
pub const SOLVE_TOL: f64 = 1e-6;
/// Residual threshold for accepting a candidate branching matrix.
pub const CANDIDATE_RESIDUAL_TOL: f64 = 1e-5;
/// Residual threshold for the S-commutation test of a modular invariant.
pub const INVARIANT_S_TOL: f64 = 1e-7;
/// Cap on certified candidate matrices before the search reports ambiguity.
const CANDIDATE_CAP: usize = 64;
/// Cap on per-class row-content solutions.
const CLASS_SOLUTION_CAP: usize = 512;
/// Node budget for one class enumeration.
const CLASS_NODE_BUDGET: usize = 5_000_000;
/// Cap on target permutations considered per class.
const PERM_CAP: usize = 1024;
/// Budget for quadratic consistency checks during assignment.
const ASSIGN_CHECK_BUDGET: usize = 50_000_000;

fn frac(r: Rat) -> Rat {
    r - r.floor()
}

// ---------------------------------------------------------------------------
// Survivor tables
// ---------------------------------------------------------------------------

/// One ambient simple with positive vacuum-row pairing 𝒮(μ) = Σ_λ Z_λ S_{λ,μ}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurvivorEntry {
    pub weight: Vec<i64>,
    /// 𝒮(μ), a positive real number.
    pub value: f64,
    /// Exact conformal weight h_μ; survivors sharing h mod 1 share a twist.
    pub h: Rat,
    /// True when μ can appear in at most one row of B, with multiplicity 1.
    pub singleton: bool,
}

/// The simples μ with 𝒮(μ) > 0 for a claimed algebra object, with twist
/// grouping and singleton flags. Positivity is decided against the threshold
/// S_{1,1}/2: a true pairing is either ≥ S_{1,1} or exactly 0, so the test is
/// immune to round-off at any realistic precision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurvivorTable {
    /// S_{1,1} of the ambient category (sets the positivity scale).
    pub s11: f64,
    /// 𝒮(1), the vacuum pairing (sets the singleton scale).
    pub vacuum_value: f64,
    pub entries: Vec<SurvivorEntry>,
}

impl SurvivorTable {
    pub fn value_of(&self, weight: &[i64]) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.weight == weight)
            .map(|e| e.value)
    }
}

/// Compute the survivor table of the algebra object with coefficients `z`
/// (pairs of unshifted weight and multiplicity).
///
/// A simple μ survives iff 𝒮(μ) ≥ S_{1,1}/2, and is flagged singleton iff
/// 𝒮(μ) < 2𝒮(1) − S_{1,1}/2. Singleton flags are then closed under duality
/// and the Galois action, both of which preserve the singleton property.
pub fn survivor_table(md: &ModularData, z: &[(Vec<i64>, i64)]) -> Result<SurvivorTable> {
    let n = md.dim();
    let rank = md.ctx.alg.rank;
    let vac = md.idx(&vec![0; rank])?;
    let s11 = md.s[vac][vac].re;
    let mut vals = vec![0.0f64; n];
    for (lam, mult) in z {
        let i = md.idx(lam)?;
        for mu in 0..n {
            vals[mu] += *mult as f64 * md.s[i][mu].re;
        }
    }
    let vacuum_value = vals[vac];
    if vacuum_value < s11 * 0.5 {
        return Err(Error::Msg(
            "vacuum pairing is not positive; not an algebra object".into(),
        ));
    }
    let guard = 0.5 * s11;
    let mut survivors: Vec<usize> = (0..n).filter(|&mu| vals[mu] >= guard).collect();
    survivors.sort_by(|&a, &b| md.simples[a].cmp(&md.simples[b]));

    let mut singleton: BTreeMap<usize, bool> = survivors
        .iter()
        .map(|&mu| (mu, vals[mu] < 2.0 * vacuum_value - guard))
        .collect();
    // Close the flags under duality and the Galois action.
    let flagged: Vec<usize> = singleton
        .iter()
        .filter(|&(_, &f)| f)
        .map(|(&mu, _)| mu)
        .collect();
    for mu in flagged {
        let w = md.simples[mu].clone();
        let mut images = vec![md.ctx.alg.contragredient(&w)];
        for ell in galois::units(md.ctx.galois_modulus) {
            images.push(galois::galois_act(&md.ctx, ell, &w)?.0);
        }
        for img in images {
            if let Ok(i) = md.idx(&img) {
                if let Some(f) = singleton.get_mut(&i) {
                    *f = true;
                }
            }
        }
    }

    let entries = survivors
        .iter()
        .map(|&mu| SurvivorEntry {
            weight: md.simples[mu].clone(),
            value: vals[mu],
            h: md.h[mu],
            singleton: singleton[&mu],
        })
        .collect();
    Ok(SurvivorTable {
        s11,
        vacuum_value,
        entries,
    })
}

/// Consistency check on a full set of branching rows: the transported vacuum
/// column must be a unit vector, Σ_M (Σ_μ B_{M,μ} S_{μ,1})² = 1. Returns the
/// absolute defect.
pub fn completeness_defect(md: &ModularData, rows: &[BranchingRow]) -> Result<f64> {
    let vac = md.idx(&vec![0; md.ctx.alg.rank])?;
    let mut total = 0.0;
    for row in rows {
        let mut s = 0.0;
        for (w, m) in &row.terms {
            s += *m as f64 * md.s[md.idx(w)?][vac].re;
        }
        total += s * s;
    }
    Ok((total - 1.0).abs())
}

// ---------------------------------------------------------------------------
// Modular-invariant checking
// ---------------------------------------------------------------------------

/// Result of testing a nonnegative-integer matrix for modular invariance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantReport {
    pub square: bool,
    pub nonneg: bool,
    pub vacuum_one: bool,
    /// max |ZS − SZ| entrywise.
    pub s_residual: f64,
    /// Exact: every nonzero Z_{λ,μ} has h_λ ≡ h_μ mod 1.
    pub t_compatible: bool,
    pub pass: bool,
}

/// Check the modular-invariant conditions for a matrix over the simples of
/// `md`: nonnegative integers, Z_{1,1} = 1, ZT = TZ (exact, via conformal
/// weights), ZS = SZ (numeric, threshold `INVARIANT_S_TOL`).
pub fn check_modular_invariant(md: &ModularData, z: &[Vec<i64>]) -> InvariantReport {
    let n = md.dim();
    let square = z.len() == n && z.iter().all(|row| row.len() == n);
    if !square {
        return InvariantReport {
            square,
            nonneg: false,
            vacuum_one: false,
            s_residual: f64::INFINITY,
            t_compatible: false,
            pass: false,
        };
    }
    let nonneg = z.iter().all(|row| row.iter().all(|&v| v >= 0));
    let vac = md
        .idx(&vec![0; md.ctx.alg.rank])
        .expect("vacuum is a simple");
    let vacuum_one = z[vac][vac] == 1;

    let mut t_compatible = true;
    for i in 0..n {
        for j in 0..n {
            if z[i][j] != 0 && !frac(md.h[i] - md.h[j]).is_integer() {
                t_compatible = false;
            }
        }
    }

    let mut s_residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut zs = Complex64::new(0.0, 0.0);
            let mut sz = Complex64::new(0.0, 0.0);
            for l in 0..n {
                zs += z[i][l] as f64 * md.s[l][j];
                sz += md.s[i][l] * z[l][j] as f64;
            }
            s_residual = s_residual.max((zs - sz).norm());
        }
    }

    let pass = square && nonneg && vacuum_one && t_compatible && s_residual < INVARIANT_S_TOL;
    InvariantReport {
        square,
        nonneg,
        vacuum_one,
        s_residual,
        t_compatible,
        pass,
    }
}

/// The order-d simple-current modular invariant of C(A_r, k), as a matrix
/// over the simples of `md`. With r' = r+1 and k' = κ when kr' is odd, k' = k
/// otherwise, the invariant exists iff d | r' and (for even d) r'k'/d is
/// even; its entries are
///
///   Z_{λ,μ} = Σ_{j=1}^{d} [ d | t(λ) + j·r'k'/(2d) ] · [ μ = J^{jr'/d} λ ],
///
/// where t is the t-statistic on unshifted labels and J the basic rotation.
/// d = 1 gives the identity (diagonal) invariant.
pub fn simple_current_invariant(md: &ModularData, d: i64) -> Result<Vec<Vec<i64>>> {
    let ctx = &md.ctx;
    if ctx.alg.series != Series::A {
        return Err(Error::Msg(
            "simple-current invariant constructor supports the A series only".into(),
        ));
    }
    let rp = ctx.alg.rank as i64 + 1;
    if d < 1 || rp % d != 0 {
        return Err(Error::Msg(format!(
            "order {d} does not divide the simple-current group order {rp}"
        )));
    }
    let kp = if (ctx.k * rp) % 2 == 1 { ctx.kappa } else { ctx.k };
    if d % 2 == 0 && (rp * kp / d) % 2 != 0 {
        return Err(Error::Msg(format!(
            "order-{d} simple-current invariant does not exist at level {}",
            ctx.k
        )));
    }
    let gen = ctx.alg.simple_currents[ctx.alg.sc_generators[0]].clone();
    let n = md.dim();
    let mut z = vec![vec![0i64; n]; n];
    for (i, lam) in md.simples.iter().enumerate() {
        let t = modular::t_statistic(lam);
        for j in 1..=d {
            // d | t + j·r'k'/(2d)  ⇔  2d·t + j·r'k' ≡ 0 (mod 2d²)
            if (2 * d * t + j * rp * kp).rem_euclid(2 * d * d) == 0 {
                let img = ctx.current_power(&gen, (j * (rp / d)) as usize, lam);
                z[i][md.idx(&img)?] += 1;
            }
        }
    }
    Ok(z)
}

// ---------------------------------------------------------------------------
// Branching solve
// ---------------------------------------------------------------------------

/// One row of a branching matrix: the restriction of a target simple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BranchingRow {
    /// Target weight (unshifted, level 1).
    pub target: Vec<i64>,
    /// Ambient weights with multiplicities, sorted.
    pub terms: Vec<(Vec<i64>, i64)>,
}

/// A candidate branching matrix, certified against the full intertwining
/// equation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchingSolution {
    pub target_spec: String,
    pub rows: Vec<BranchingRow>,
    /// max |BS − S^e B| for this solution.
    pub s_residual: f64,
    /// |Σ_M (Σ_μ B_{M,μ} S_{μ,1})² − 1|.
    pub completeness_defect: f64,
    /// Number of targets M whose row contains a weight with h_μ = h^e_M
    /// exactly (not just mod 1); used to rank diagram-symmetric solutions.
    pub h_matched: usize,
}

/// All certified branching matrices for a given algebra object and target.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchingOutcome {
    /// Best solution first (most exact conformal-weight matches, then
    /// lexicographic). Solutions beyond the first differ by a diagram
    /// symmetry of the target (or a genuine ambiguity — see `ambiguous`).
    pub solutions: Vec<BranchingSolution>,
    /// True when more than one inequivalent solution was found or a search
    /// cap was hit.
    pub ambiguous: bool,
}

/// Build a level context from an algebra spec string like "A3" or "D10".
pub fn context_for(spec: &str, level: i64) -> Result<LevelContext> {
    let proto = AlgebraData::parse_spec(spec)?;
    let alg = liealg::algebra(proto.series, proto.rank)?;
    Ok(LevelContext::new(alg, level))
}

struct ClassTarget {
    /// Index into the target modular data.
    idx: usize,
    /// S^e_{M,1}, a positive real.
    se: f64,
}

struct ClassOrbit {
    /// Ambient simple indices with a common multiplicity in every row.
    members: Vec<usize>,
    /// Σ_{μ∈orbit} S_{μ,1}.
    qd: f64,
    /// 𝒮(orbit representative), constant on the orbit.
    val: f64,
}

/// Bounded enumeration of the row contents of one twist class: per-target
/// multiplicity vectors over the class orbits, subject to the row sums
/// Σ_o B_{t,o}·qd_o = se_t and column sums Σ_t B_{t,o}·se_t = val_o.
///
/// The search is orbit-major: each orbit's total usage (fixed by its column
/// sum) is distributed across the rows, largest qd first, while each row
/// tracks its residual capacity se_t − Σ assigned. A row whose residual is
/// positive but smaller than any remaining orbit can never be completed, so
/// dead branches die within a few levels. Targets with equal se are
/// interchangeable here — rows tied so far take non-increasing shares — and
/// the assignment to concrete targets happens later.
struct ClassEnum<'a> {
    targets: &'a [ClassTarget],
    orbits: &'a [ClassOrbit],
    pinned: Option<&'a [i64]>,
    /// Smallest orbit qd among positions o.. .
    min_qd_suffix: Vec<f64>,
    /// Upper bound on what orbits o.. can still add to a single row.
    max_add_suffix: Vec<f64>,
    nodes: usize,
    truncated: bool,
    /// The consumer asked to stop (its solution cap was reached).
    stopped: bool,
}

impl<'a> ClassEnum<'a> {
    fn new(targets: &'a [ClassTarget], orbits: &'a [ClassOrbit], pinned: Option<&'a [i64]>) -> Self {
        let se_min = targets.iter().map(|t| t.se).fold(f64::INFINITY, f64::min);
        let no = orbits.len();
        let mut min_qd_suffix = vec![f64::INFINITY; no + 1];
        let mut max_add_suffix = vec![0.0f64; no + 1];
        for o in (0..no).rev() {
            min_qd_suffix[o] = min_qd_suffix[o + 1].min(orbits[o].qd);
            let bcap = ((orbits[o].val + SOLVE_TOL) / se_min).floor();
            max_add_suffix[o] = max_add_suffix[o + 1] + bcap * orbits[o].qd;
        }
        ClassEnum {
            targets,
            orbits,
            pinned,
            min_qd_suffix,
            max_add_suffix,
            nodes: 0,
            truncated: false,
            stopped: false,
        }
    }

    /// Enumerate; every complete solution is offered to `keep`, which owns
    /// the storage and filtering and returns false to stop the search.
    fn run(&mut self, keep: &mut dyn FnMut(&[Vec<i64>]) -> bool) {
        let nt = self.targets.len();
        let mut b = vec![vec![0i64; self.orbits.len()]; nt];
        let mut rcap: Vec<f64> = self.targets.iter().map(|t| t.se).collect();
        // tied[t]: row t is interchangeable with row t−1 and identical so far.
        let tied: Vec<bool> = (0..nt)
            .map(|t| {
                t > 0
                    && !(self.pinned.is_some() && t == 1)
                    && (self.targets[t].se - self.targets[t - 1].se).abs() < 1e-9
            })
            .collect();
        self.orbit_dfs(0, &mut b, &mut rcap, &tied, keep);
    }

    fn orbit_dfs(
        &mut self,
        o: usize,
        b: &mut Vec<Vec<i64>>,
        rcap: &mut Vec<f64>,
        tied: &[bool],
        keep: &mut dyn FnMut(&[Vec<i64>]) -> bool,
    ) {
        if self.truncated || self.stopped {
            return;
        }
        if o == self.orbits.len() {
            if rcap.iter().all(|&c| c.abs() <= SOLVE_TOL) && !keep(b) {
                self.stopped = true;
            }
            return;
        }
        // Rows that still need more than everything downstream, or less than
        // the smallest remaining orbit, are stuck.
        for &c in rcap.iter() {
            if c > self.max_add_suffix[o] + SOLVE_TOL
                || (c > SOLVE_TOL && c < self.min_qd_suffix[o] - SOLVE_TOL)
            {
                return;
            }
        }
        self.share_dfs(o, 0, self.orbits[o].val, b, rcap, tied, keep);
    }

    /// Distribute orbit `o` across rows t.., with `remaining` of the column
    /// sum still unassigned.
    fn share_dfs(
        &mut self,
        o: usize,
        t: usize,
        remaining: f64,
        b: &mut Vec<Vec<i64>>,
        rcap: &mut Vec<f64>,
        tied: &[bool],
        keep: &mut dyn FnMut(&[Vec<i64>]) -> bool,
    ) {
        self.nodes += 1;
        if self.nodes > CLASS_NODE_BUDGET {
            self.truncated = true;
        }
        if self.truncated || self.stopped {
            return;
        }
        let nt = self.targets.len();
        if t == nt {
            if remaining.abs() > SOLVE_TOL {
                return;
            }
            // Recompute ties for the next orbit and recurse.
            let tied_next: Vec<bool> = (0..nt)
                .map(|tt| tied[tt] && b[tt][o] == b[tt - 1][o])
                .collect();
            self.orbit_dfs(o + 1, b, rcap, &tied_next, keep);
            return;
        }
        let se = self.targets[t].se;
        let qd = self.orbits[o].qd;
        let forced: Option<i64> = match self.pinned {
            Some(p) if t == 0 => Some(p[o]),
            _ => None,
        };
        let mut smax = ((rcap[t] + SOLVE_TOL) / qd)
            .floor()
            .min((remaining + SOLVE_TOL) / se)
            .max(-1.0) as i64;
        let mut smin = 0i64;
        if tied[t] {
            smax = smax.min(b[t - 1][o]);
        }
        if let Some(f) = forced {
            if f < smin || f > smax {
                return;
            }
            smin = f;
            smax = f;
        }
        for s in smin..=smax {
            b[t][o] = s;
            rcap[t] -= s as f64 * qd;
            self.share_dfs(o, t + 1, remaining - s as f64 * se, b, rcap, tied, keep);
            rcap[t] += s as f64 * qd;
        }
        b[t][o] = 0;
    }
}

/// Row-to-target assignment data for one twist class.
struct ClassData {
    /// Target indices (into the target modular data), canonical order:
    /// pinned vacuum first, then descending S^e_{M,1}.
    target_ids: Vec<usize>,
    /// Candidate permutations (position → source position) respecting the
    /// interchangeable-target groups.
    perms: Vec<Vec<usize>>,
    /// Row contents per enumerated solution, per canonical position:
    /// sorted (ambient simple index, multiplicity) pairs.
    solutions: Vec<Vec<Vec<(usize, i64)>>>,
}

fn u_pair(md: &ModularData, a: &[(usize, i64)], b: &[(usize, i64)]) -> Complex64 {
    let mut u = Complex64::new(0.0, 0.0);
    for &(la, m1) in a {
        for &(mu, m2) in b {
            u += (m1 * m2) as f64 * md.s[la][mu];
        }
    }
    u
}

fn g_pair(a: &[(usize, i64)], b: &[(usize, i64)]) -> i64 {
    let (mut i, mut j, mut g) = (0, 0, 0i64);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                g += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    g
}

/// Within-class screen for a row-content candidate: some permutation of the
/// interchangeable targets must satisfy the class-diagonal block of the
/// quadratic consistency test B S Bᵀ = S^e (B Bᵀ). Candidates that merely
/// balance the row and column sums but cannot intertwine the S-matrices are
/// discarded here, before the cross-class assignment ever sees them.
fn class_viable(
    md: &ModularData,
    tmd: &ModularData,
    target_ids: &[usize],
    perms: &[Vec<usize>],
    contents: &[Vec<(usize, i64)>],
) -> bool {
    'perm: for perm in perms {
        let assigned: Vec<&Vec<(usize, i64)>> = perm.iter().map(|&src| &contents[src]).collect();
        for mp in 0..assigned.len() {
            for np in 0..assigned.len() {
                let lhs = u_pair(md, assigned[mp], assigned[np]);
                let mut rhs = Complex64::new(0.0, 0.0);
                for kp in 0..assigned.len() {
                    let gv = g_pair(assigned[kp], assigned[np]);
                    if gv != 0 {
                        rhs += tmd.s[target_ids[mp]][target_ids[kp]] * gv as f64;
                    }
                }
                if (lhs - rhs).norm() > SOLVE_TOL {
                    continue 'perm;
                }
            }
        }
        return true;
    }
    false
}

/// Interleaved search over per-class row contents and their assignment to
/// targets, pruned class by class with the quadratic consistency test
/// B S Bᵀ = S^e (B Bᵀ). Rows in different classes have disjoint supports
/// (different twists), so the overlap matrix B Bᵀ is block-diagonal per
/// class and the test factors into per-class-pair conditions.
struct AssignSearch<'a> {
    md: &'a ModularData,
    tmd: &'a ModularData,
    classes: &'a [ClassData],
    assigned: Vec<Vec<Vec<(usize, i64)>>>,
    checks: usize,
    truncated: bool,
    found: Vec<Vec<Vec<Vec<(usize, i64)>>>>,
}

impl AssignSearch<'_> {
    fn search(&mut self, ci: usize) {
        if self.truncated || self.found.len() >= CANDIDATE_CAP {
            return;
        }
        if ci == self.classes.len() {
            self.found.push(self.assigned.clone());
            return;
        }
        let classes = self.classes;
        for sol in &classes[ci].solutions {
            for perm in &classes[ci].perms {
                self.assigned[ci] = perm.iter().map(|&src| sol[src].clone()).collect();
                if self.consistent(ci) {
                    self.search(ci + 1);
                }
                if self.truncated {
                    break;
                }
            }
        }
        self.assigned[ci].clear();
    }

    /// Check every quadratic condition involving class `ci` against the
    /// classes assigned so far (pairs among earlier classes were already
    /// checked at earlier depths).
    fn consistent(&mut self, ci: usize) -> bool {
        for cm in 0..=ci {
            for mp in 0..self.assigned[cm].len() {
                for cn in 0..=ci {
                    if cm != ci && cn != ci {
                        continue;
                    }
                    for np in 0..self.assigned[cn].len() {
                        self.checks += 1;
                        if self.checks > ASSIGN_CHECK_BUDGET {
                            self.truncated = true;
                            return false;
                        }
                        let lhs =
                            u_pair(self.md, &self.assigned[cm][mp], &self.assigned[cn][np]);
                        let mut rhs = Complex64::new(0.0, 0.0);
                        let tm = self.classes[cm].target_ids[mp];
                        for kp in 0..self.assigned[cn].len() {
                            let gv = g_pair(&self.assigned[cn][kp], &self.assigned[cn][np]);
                            if gv != 0 {
                                let tk = self.classes[cn].target_ids[kp];
                                rhs += self.tmd.s[tm][tk] * gv as f64;
                            }
                        }
                        if (lhs - rhs).norm() > SOLVE_TOL {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// All position→source permutations respecting group structure: positions in
/// the same group (equal S^e, not pinned) may be permuted among themselves.
fn group_permutations(groups: &[Vec<usize>], n: usize) -> (Vec<Vec<usize>>, bool) {
    let mut perms: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut truncated = false;
    for group in groups {
        let mut next = Vec::new();
        'outer: for base in &perms {
            let mut idx: Vec<usize> = (0..group.len()).collect();
            loop {
                let mut p = base.clone();
                for (pos, &src) in idx.iter().enumerate() {
                    p[group[pos]] = base[group[src]];
                }
                next.push(p);
                if next.len() > PERM_CAP {
                    truncated = true;
                    break 'outer;
                }
                if !next_permutation(&mut idx) {
                    break;
                }
            }
        }
        perms = next;
    }
    (perms, truncated)
}

fn next_permutation(idx: &mut [usize]) -> bool {
    let n = idx.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && idx[i - 1] >= idx[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while idx[j] <= idx[i - 1] {
        j -= 1;
    }
    idx.swap(i - 1, j);
    idx[i..].reverse();
    true
}

/// Solve for the branching matrix of the algebra object with coefficients
/// `z` (unshifted weights with multiplicities) into the level-1 category of
/// `target_spec` (e.g. "E7"). Returns every certified solution; more than
/// one indicates a diagram symmetry of the target (reported, not hidden).
///
/// The search runs in three stages. First the survivors are partitioned into
/// twist classes and, within each class, into orbits of the simple-current
/// group of A (read off from the support of `z`); the row contents of each
/// class are the solutions of a small system of row/column-sum equations
/// over nonnegative integers. Second, row contents are assigned to concrete
/// targets class by class, pruned by the quadratic consistency test
/// B S Bᵀ = S^e (B Bᵀ) which distinguishes targets with equal quantum
/// dimension. Third, each assembled matrix is certified against the full
/// equation BS = S^e B and discarded unless the residual is below
/// `CANDIDATE_RESIDUAL_TOL`.
pub fn solve_branching(
    ctx: &LevelContext,
    z: &[(Vec<i64>, i64)],
    target_spec: &str,
) -> Result<BranchingOutcome> {
    if ctx.alg.series != Series::A {
        return Err(Error::Msg(
            "branching solve supports A-series ambient categories only".into(),
        ));
    }
    let tctx = context_for(target_spec, 1)?;
    if tctx.central_charge != ctx.central_charge {
        return Err(Error::Msg(format!(
            "central charge mismatch: ambient {} vs {} level 1 at {}",
            ctx.central_charge, target_spec, tctx.central_charge
        )));
    }
    let md = modular::modular_data(ctx, 200_000)?;
    let tmd = modular::level1_data(tctx.alg.clone())?;
    let st = survivor_table(&md, z)?;
    let z_map: BTreeMap<Vec<i64>, i64> = z.iter().cloned().collect();

    // The simple-current group of A: powers of the basic rotation whose
    // vacuum image lies in the support of z.
    let rp = ctx.alg.rank + 1;
    let gen = ctx.alg.simple_currents[ctx.alg.sc_generators[0]].clone();
    let vac0 = vec![0i64; ctx.alg.rank];
    let d = (0..rp)
        .filter(|&m| z_map.contains_key(&ctx.current_power(&gen, m, &vac0)))
        .count();
    let mut j_gen: Vec<usize> = (0..rp).collect();
    for _ in 0..(rp / d) {
        j_gen = j_gen.iter().map(|&i| gen[i]).collect();
    }

    // Galois parity signatures refine the twist classes: on the support of
    // a row, every weight carries the same parity ε_ℓ as the target does,
    // for each ℓ acting on both cyclotomic fields. Signatures are taken
    // relative to the respective vacua so the two sides are comparable.
    let ells: Vec<i64> = galois::units(ctx.galois_modulus)
        .into_iter()
        .filter(|l| l.gcd(&tctx.galois_modulus) == 1)
        .collect();
    let vac_sig: Vec<i32> = ells
        .iter()
        .map(|&l| galois::parity_product(ctx, &ctx.shift(&vac0), l))
        .collect::<Result<_>>()?;
    let tvac_w = vec![0i64; tctx.alg.rank];
    let tvac_sig: Vec<i32> = ells
        .iter()
        .map(|&l| galois::parity_product(&tctx, &tctx.shift(&tvac_w), l))
        .collect::<Result<_>>()?;
    let rel_sig = |w: &[i64]| -> Result<Vec<i32>> {
        ells.iter()
            .zip(&vac_sig)
            .map(|(&l, &s0)| Ok(galois::parity_product(ctx, &ctx.shift(w), l)? * s0))
            .collect()
    };
    let rel_sig_e = |w: &[i64]| -> Result<Vec<i32>> {
        ells.iter()
            .zip(&tvac_sig)
            .map(|(&l, &s0)| Ok(galois::parity_product(&tctx, &tctx.shift(w), l)? * s0))
            .collect()
    };

    // Orbits of the survivors under the simple-current group.
    let survivor_weights: Vec<Vec<i64>> = st.entries.iter().map(|e| e.weight.clone()).collect();
    let survivor_set: BTreeSet<Vec<i64>> = survivor_weights.iter().cloned().collect();
    let value_of: BTreeMap<Vec<i64>, f64> = st
        .entries
        .iter()
        .map(|e| (e.weight.clone(), e.value))
        .collect();
    let vac_idx = md.idx(&vac0)?;
    let orbits = orbit_partition(ctx, &survivor_weights, &[j_gen], false, "J");
    type ClassKey = (Rat, Vec<i32>);
    let mut orbit_info: Vec<(ClassKey, ClassOrbit, Vec<i64>)> = Vec::new();
    for orb in &orbits {
        let rep = &orb.representative;
        let val = value_of[rep];
        let key: ClassKey = (frac(ctx.conformal_weight(rep)), rel_sig(rep)?);
        let mut qd = 0.0;
        let mut members = Vec::new();
        for m in &orb.members {
            if !survivor_set.contains(m)
                || (value_of[m] - val).abs() > SOLVE_TOL
                || (frac(ctx.conformal_weight(m)), rel_sig(m)?) != key
            {
                return Err(Error::Msg(
                    "survivor set is not closed under the simple-current group".into(),
                ));
            }
            let i = md.idx(m)?;
            qd += md.s[i][vac_idx].re;
            members.push(i);
        }
        orbit_info.push((key, ClassOrbit { members, qd, val }, rep.clone()));
    }

    // Partition targets and orbits by twist class (h mod 1, exact) refined
    // by parity signature.
    let ne = tmd.dim();
    let tvac = tmd.idx(&tvac_w)?;
    let mut classes: BTreeMap<ClassKey, (Vec<ClassTarget>, Vec<usize>)> = BTreeMap::new();
    for m in 0..ne {
        let se = tmd.s[m][tvac].re;
        classes
            .entry((frac(tmd.h[m]), rel_sig_e(&tmd.simples[m])?))
            .or_default()
            .0
            .push(ClassTarget { idx: m, se });
    }
    for (oi, (key, _, _)) in orbit_info.iter().enumerate() {
        match classes.get_mut(key) {
            Some(c) => c.1.push(oi),
            None => return Err(Error::NoBranchingSolution),
        }
    }
    for (_, (_, orbs)) in &classes {
        if orbs.is_empty() {
            return Err(Error::NoBranchingSolution);
        }
    }

    // Canonical order: pinned vacuum first, then descending S^e_{M,1};
    // orbits largest first for enumeration pruning.
    let vac_key: ClassKey = (frac(Rat::from_integer(0)), vec![1; ells.len()]);
    for (key, (targets, orbit_ids)) in classes.iter_mut() {
        targets.sort_by(|a, b| {
            let pa = *key == vac_key && a.idx == tvac;
            let pb = *key == vac_key && b.idx == tvac;
            pb.cmp(&pa)
                .then(b.se.partial_cmp(&a.se).unwrap())
                .then(a.idx.cmp(&b.idx))
        });
        orbit_ids.sort_by(|&a, &b| {
            orbit_info[b]
                .1
                .qd
                .partial_cmp(&orbit_info[a].1.qd)
                .unwrap()
                .then(orbit_info[a].2.cmp(&orbit_info[b].2))
        });
    }

    // Stage 1: per-class row contents.
    let mut class_data: Vec<ClassData> = Vec::new();
    let mut ambiguous = false;
    for (key, (targets, orbit_ids)) in classes.iter() {
        let corbits: Vec<ClassOrbit> = orbit_ids
            .iter()
            .map(|&oi| ClassOrbit {
                members: orbit_info[oi].1.members.clone(),
                qd: orbit_info[oi].1.qd,
                val: orbit_info[oi].1.val,
            })
            .collect();
        let pinned_vec: Option<Vec<i64>> = if *key == vac_key && targets[0].idx == tvac {
            // The vacuum row of B is the algebra object itself.
            let mut p = Vec::with_capacity(orbit_ids.len());
            for &oi in orbit_ids.iter() {
                let rep = &orbit_info[oi].2;
                let mult = z_map.get(rep).copied().unwrap_or(0);
                for m in &orbit_info[oi].1.members {
                    let w = &md.simples[*m];
                    if z_map.get(w).copied().unwrap_or(0) != mult {
                        return Err(Error::Msg(
                            "algebra coefficients are not constant on current orbits".into(),
                        ));
                    }
                }
                p.push(mult);
            }
            Some(p)
        } else {
            None
        };
        // Interchangeable groups: runs of equal se among unpinned positions.
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let start0 = usize::from(pinned_vec.is_some());
        let mut start = start0;
        while start < targets.len() {
            let mut end = start + 1;
            while end < targets.len() && (targets[end].se - targets[start].se).abs() < 1e-9 {
                end += 1;
            }
            if end - start > 1 {
                groups.push((start..end).collect());
            }
            start = end;
        }
        let (perms, trunc) = group_permutations(&groups, targets.len());
        ambiguous |= trunc;
        let target_ids: Vec<usize> = targets.iter().map(|t| t.idx).collect();

        // Enumerate row contents, screening each candidate in-stream so the
        // solution cap counts only candidates that can pass the quadratic
        // test within this class.
        let mut solutions: Vec<Vec<Vec<(usize, i64)>>> = Vec::new();
        let mut capped = false;
        let mut search = ClassEnum::new(targets, &corbits, pinned_vec.as_deref());
        search.run(&mut |rows: &[Vec<i64>]| {
            let contents: Vec<Vec<(usize, i64)>> = rows
                .iter()
                .map(|row| {
                    let mut content: BTreeMap<usize, i64> = BTreeMap::new();
                    for (&b, orb) in row.iter().zip(&corbits) {
                        if b != 0 {
                            for &m in &orb.members {
                                *content.entry(m).or_insert(0) += b;
                            }
                        }
                    }
                    content.into_iter().collect()
                })
                .collect();
            if class_viable(&md, &tmd, &target_ids, &perms, &contents) {
                solutions.push(contents);
            }
            if solutions.len() >= CLASS_SOLUTION_CAP {
                capped = true;
                false
            } else {
                true
            }
        });
        ambiguous |= search.truncated || capped;
        if solutions.is_empty() {
            return Err(Error::NoBranchingSolution);
        }
        class_data.push(ClassData {
            target_ids,
            perms,
            solutions,
        });
    }

    // Stage 2: assign rows to targets, class by class.
    let nc = class_data.len();
    let mut search = AssignSearch {
        md: &md,
        tmd: &tmd,
        classes: &class_data,
        assigned: vec![Vec::new(); nc],
        checks: 0,
        truncated: false,
        found: Vec::new(),
    };
    search.search(0);
    ambiguous |= search.truncated || search.found.len() >= CANDIDATE_CAP;

    // Stage 3: certify each assembled matrix against the full equation.
    let n = md.dim();
    let mut accepted: Vec<BranchingSolution> = Vec::new();
    let mut seen: BTreeSet<Vec<BranchingRow>> = BTreeSet::new();
    for cand in &search.found {
        let mut b = vec![vec![0i64; n]; ne];
        for (ci, rows) in cand.iter().enumerate() {
            for (pos, content) in rows.iter().enumerate() {
                let m = class_data[ci].target_ids[pos];
                for &(mu, mult) in content {
                    b[m][mu] += mult;
                }
            }
        }
        let mut resid = 0.0f64;
        for m in 0..ne {
            for mu in 0..n {
                let mut bs = Complex64::new(0.0, 0.0);
                for nu in 0..n {
                    if b[m][nu] != 0 {
                        bs += b[m][nu] as f64 * md.s[nu][mu];
                    }
                }
                let mut sb = Complex64::new(0.0, 0.0);
                for nn in 0..ne {
                    if b[nn][mu] != 0 {
                        sb += tmd.s[m][nn] * b[nn][mu] as f64;
                    }
                }
                resid = resid.max((bs - sb).norm());
            }
        }
        if resid > CANDIDATE_RESIDUAL_TOL {
            continue;
        }
        let rows: Vec<BranchingRow> = (0..ne)
            .map(|m| BranchingRow {
                target: tmd.simples[m].clone(),
                terms: (0..n)
                    .filter(|&mu| b[m][mu] != 0)
                    .map(|mu| (md.simples[mu].clone(), b[m][mu]))
                    .collect(),
            })
            .collect();
        if !seen.insert(rows.clone()) {
            continue;
        }
        let h_matched = (0..ne)
            .filter(|&m| {
                rows[m]
                    .terms
                    .iter()
                    .any(|(w, _)| ctx.conformal_weight(w) == tmd.h[m])
            })
            .count();
        let completeness = completeness_defect(&md, &rows)?;
        accepted.push(BranchingSolution {
            target_spec: target_spec.to_string(),
            rows,
            s_residual: resid,
            completeness_defect: completeness,
            h_matched,
        });
    }

    if accepted.is_empty() {
        return Err(Error::NoBranchingSolution);
    }
    accepted.sort_by(|a, b| {
        b.h_matched
            .cmp(&a.h_matched)
            .then_with(|| a.rows.cmp(&b.rows))
    });
    let ambiguous = ambiguous || accepted.len() > 1;
    Ok(BranchingOutcome {
        solutions: accepted,
        ambiguous,
    })
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

/// Outcome of certifying a branching matrix against the modular data of both
/// categories.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub algebra: String,
    pub level: i64,
    pub target: String,
    /// Every target simple appears as exactly one row.
    pub rows_complete: bool,
    /// max |BS − S^e B|.
    pub s_residual: f64,
    /// Exact: central charges agree and h^e_M ≡ h_μ mod 1 on every nonzero
    /// entry (equivalent to BT = T^e B).
    pub t_compatible: bool,
    /// (BᵀB)_{1,1}; must be 1 for a connected algebra.
    pub z_vacuum: i64,
    /// max |ZS − SZ| for Z = BᵀB.
    pub z_s_residual: f64,
    /// Exact twist compatibility of Z = BᵀB.
    pub z_t_compatible: bool,
    /// Galois parities ε_ℓ(μ) are constant on the support of each row, for
    /// every ℓ acting on both categories.
    pub parity_constant: bool,
    /// |Σ_M (Σ_μ B_{M,μ} S_{μ,1})² − 1|.
    pub completeness_defect: f64,
    pub pass: bool,
}

/// Certify a catalog entry: rebuild both modular data sets from scratch and
/// check every identity a conformal extension must satisfy.
pub fn verify_branching(entry: &CatalogEntry) -> Result<VerificationReport> {
    if entry.target_level != 1 {
        return Err(Error::Msg("only level-1 targets are supported".into()));
    }
    let ctx = context_for(&entry.algebra, entry.level)?;
    let tctx = context_for(&entry.target_algebra, 1)?;
    let md = modular::modular_data(&ctx, 200_000)?;
    let tmd = modular::level1_data(tctx.alg.clone())?;
    let n = md.dim();
    let ne = tmd.dim();

    // Assemble B, checking row completeness.
    let mut b = vec![vec![0i64; n]; ne];
    let mut seen_targets = vec![0usize; ne];
    let mut rows: Vec<BranchingRow> = Vec::new();
    for row in &entry.rows {
        let tw = parse_weight(&row.target, tctx.alg.rank)?;
        let m = tmd.idx(&tw)?;
        seen_targets[m] += 1;
        let mut terms = Vec::new();
        for (label, mult) in &row.restriction {
            let w = parse_weight(label, ctx.alg.rank)?;
            b[m][md.idx(&w)?] += mult;
            terms.push((w, *mult));
        }
        terms.sort();
        rows.push(BranchingRow { target: tw, terms });
    }
    let rows_complete = seen_targets.iter().all(|&c| c == 1);

    // BS = S^e B.
    let mut s_residual = 0.0f64;
    for m in 0..ne {
        for mu in 0..n {
            let mut bs = Complex64::new(0.0, 0.0);
            for nu in 0..n {
                if b[m][nu] != 0 {
                    bs += b[m][nu] as f64 * md.s[nu][mu];
                }
            }
            let mut sb = Complex64::new(0.0, 0.0);
            for nn in 0..ne {
                if b[nn][mu] != 0 {
                    sb += tmd.s[m][nn] * b[nn][mu] as f64;
                }
            }
            s_residual = s_residual.max((bs - sb).norm());
        }
    }

    // BT = T^e B, exactly: equal central charges and h^e_M ≡ h_μ mod 1.
    let mut t_compatible = ctx.central_charge == tctx.central_charge;
    for m in 0..ne {
        for mu in 0..n {
            if b[m][mu] != 0 && !frac(tmd.h[m] - md.h[mu]).is_integer() {
                t_compatible = false;
            }
        }
    }

    // Z = BᵀB is a modular invariant with Z_{1,1} = 1.
    let mut zmat = vec![vec![0i64; n]; n];
    for m in 0..ne {
        for i in 0..n {
            if b[m][i] != 0 {
                for j in 0..n {
                    zmat[i][j] += b[m][i] * b[m][j];
                }
            }
        }
    }
    let zrep = check_modular_invariant(&md, &zmat);
    let vac = md.idx(&vec![0i64; ctx.alg.rank])?;
    let z_vacuum = zmat[vac][vac];

    // Galois parities constant on each row, for every ℓ acting on both
    // cyclotomic fields.
    let mut parity_constant = true;
    for ell in galois::units(ctx.galois_modulus) {
        if ell.gcd(&tctx.galois_modulus) != 1 {
            continue;
        }
        for row in &rows {
            let mut first: Option<i32> = None;
            for (w, _) in &row.terms {
                let p = galois::parity_product(&ctx, &ctx.shift(w), ell)?;
                match first {
                    None => first = Some(p),
                    Some(f) => {
                        if f != p {
                            parity_constant = false;
                        }
                    }
                }
            }
        }
    }

    let completeness = completeness_defect(&md, &rows)?;

    let pass = rows_complete
        && s_residual < 1e-8
        && t_compatible
        && z_vacuum == 1
        && zrep.s_residual < INVARIANT_S_TOL
        && zrep.t_compatible
        && parity_constant
        && completeness < 1e-6;
    Ok(VerificationReport {
        algebra: entry.algebra.clone(),
        level: entry.level,
        target: format!("{} level {}", entry.target_algebra, entry.target_level),
        rows_complete,
        s_residual,
        t_compatible,
        z_vacuum,
        z_s_residual: zrep.s_residual,
        z_t_compatible: zrep.t_compatible,
        parity_constant,
        completeness_defect: completeness,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::liealg::algebra;

    fn actx(rank: usize, k: i64) -> LevelContext {
        LevelContext::new(algebra(Series::A, rank).unwrap(), k)
    }

    fn catalog_z(algebra: &str, level: i64) -> Vec<(Vec<i64>, i64)> {
        let entry = catalog::lookup(algebra, level).unwrap();
        let rank: usize = algebra[1..].parse().unwrap();
        catalog::etale_coefficients(entry, rank).unwrap()
    }

    fn table_for(rank: usize, k: i64, alg_name: &str) -> SurvivorTable {
        let ctx = actx(rank, k);
        let md = modular::modular_data(&ctx, 100_000).unwrap();
        survivor_table(&md, &catalog_z(alg_name, k)).unwrap()
    }

    #[test]
    fn survivor_values_a1_level10() {
        let st = table_for(1, 10, "A1");
        let got: BTreeMap<Vec<i64>, f64> = st
            .entries
            .iter()
            .map(|e| (e.weight.clone(), e.value))
            .collect();
        let expect = [
            (vec![0], 0.5),
            (vec![6], 0.5),
            (vec![4], 0.5),
            (vec![10], 0.5),
            (vec![3], 0.707),
            (vec![7], 0.707),
        ];
        assert_eq!(got.len(), expect.len());
        for (w, v) in expect {
            assert!((got[&w] - v).abs() < 5e-4, "{w:?}: {} vs {v}", got[&w]);
        }
        assert!(st.entries.iter().all(|e| e.singleton));
        // Twist classes: h mod 1 takes three values.
        let fracs: BTreeSet<Rat> = st.entries.iter().map(|e| frac(e.h)).collect();
        assert_eq!(fracs.len(), 3);
    }

    #[test]
    fn survivor_values_a3_level4_and_a4_level5() {
        let st = table_for(3, 4, "A3");
        let v111 = st.value_of(&[1, 1, 1]).unwrap();
        assert!((v111 - 1.414).abs() < 5e-4);
        let e111 = st.entries.iter().find(|e| e.weight == [1, 1, 1]).unwrap();
        assert!(!e111.singleton);
        assert!((st.vacuum_value - 0.5).abs() < 1e-9);

        let st = table_for(4, 5, "A4");
        let v = st.value_of(&[1, 1, 1, 1]).unwrap();
        assert!((v - 2.5).abs() < 1e-6);
        assert!(!st
            .entries
            .iter()
            .find(|e| e.weight == [1, 1, 1, 1])
            .unwrap()
            .singleton);
        let v = st.value_of(&[1, 0, 0, 1]).unwrap();
        assert!((v - 0.5).abs() < 1e-6);
        assert!(st
            .entries
            .iter()
            .find(|e| e.weight == [1, 0, 0, 1])
            .unwrap()
            .singleton);
    }

    #[test]
    fn current_invariants_accepted() {
        // Order 1 is the diagonal invariant at every level.
        let ctx = actx(1, 5);
        let md = modular::modular_data(&ctx, 1000).unwrap();
        let z = simple_current_invariant(&md, 1).unwrap();
        for (i, row) in z.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, i64::from(i == j));
            }
        }
        // Order 2 exists for A_1 iff the level is even; the result commutes
        // with S and T.
        for k in 2..=16 {
            let ctx = actx(1, k);
            let md = modular::modular_data(&ctx, 1000).unwrap();
            let z = simple_current_invariant(&md, 2);
            if k % 2 == 0 {
                let rep = check_modular_invariant(&md, &z.unwrap());
                assert!(rep.pass, "A1 level {k}: {rep:?}");
            } else {
                assert!(z.is_err());
            }
        }
        // A_3 level 8 admits orders 1, 2, 4.
        let ctx = actx(3, 8);
        let md = modular::modular_data(&ctx, 100_000).unwrap();
        for d in [1, 2, 4] {
            let z = simple_current_invariant(&md, d).unwrap();
            assert!(check_modular_invariant(&md, &z).pass, "A3 level 8 d={d}");
        }
    }

    #[test]
    fn exceptional_invariant_a1_level16() {
        let ctx = actx(1, 16);
        let md = modular::modular_data(&ctx, 1000).unwrap();
        let idx = |l: i64| md.idx(&[l]).unwrap();
        let mut z = vec![vec![0i64; 17]; 17];
        for (a, b) in [(0, 0), (0, 16), (16, 0), (16, 16)] {
            z[idx(a)][idx(b)] = 1;
        }
        for (a, b) in [(4, 4), (4, 12), (12, 4), (12, 12)] {
            z[idx(a)][idx(b)] = 1;
        }
        for (a, b) in [(6, 6), (6, 10), (10, 6), (10, 10)] {
            z[idx(a)][idx(b)] = 1;
        }
        for (a, b) in [(8, 8), (2, 8), (14, 8), (8, 2), (8, 14)] {
            z[idx(a)][idx(b)] = 1;
        }
        let rep = check_modular_invariant(&md, &z);
        assert!(rep.pass, "{rep:?}");

        // Perturbations are rejected.
        for (i, j) in [(0, 1), (2, 2), (8, 8), (3, 5), (16, 16)] {
            let mut bad = z.clone();
            bad[i][j] = i64::from(z[i][j] == 0); // flip 0↔1
            assert!(
                !check_modular_invariant(&md, &bad).pass,
                "perturbation at ({i},{j}) accepted"
            );
        }
    }

    fn entry_rows(algebra: &str, level: i64) -> Vec<BranchingRow> {
        let entry = catalog::lookup(algebra, level).unwrap();
        let rank: usize = algebra[1..].parse().unwrap();
        let trank: usize = entry.target_algebra[1..].parse().unwrap();
        entry
            .rows
            .iter()
            .map(|r| {
                let mut terms: Vec<(Vec<i64>, i64)> = r
                    .restriction
                    .iter()
                    .map(|(l, m)| (parse_weight(l, rank).unwrap(), *m))
                    .collect();
                terms.sort();
                BranchingRow {
                    target: parse_weight(&r.target, trank).unwrap(),
                    terms,
                }
            })
            .collect()
    }

    /// Compare two full row sets up to a diagram symmetry of the target:
    /// rows sorted by (h^e of target, terms) must agree.
    fn rows_match(tmd: &ModularData, a: &[BranchingRow], b: &[BranchingRow]) -> bool {
        let key = |rows: &[BranchingRow]| {
            let mut v: Vec<(Rat, Vec<(Vec<i64>, i64)>)> = rows
                .iter()
                .map(|r| (tmd.h[tmd.idx(&r.target).unwrap()], r.terms.clone()))
                .collect();
            v.sort();
            v
        };
        key(a) == key(b)
    }

    #[test]
    fn solve_a1_level10() {
        let ctx = actx(1, 10);
        let out = solve_branching(&ctx, &catalog_z("A1", 10), "C2").unwrap();
        let tmd = modular::level1_data(algebra(Series::C, 2).unwrap()).unwrap();
        assert!(rows_match(&tmd, &out.solutions[0].rows, &entry_rows("A1", 10)));
        assert!(out.solutions[0].s_residual < 1e-8);
        assert!(out.solutions[0].completeness_defect < 1e-6);
    }

    #[test]
    fn solve_a2_level9() {
        let ctx = actx(2, 9);
        let out = solve_branching(&ctx, &catalog_z("A2", 9), "E6").unwrap();
        let tmd = modular::level1_data(algebra(Series::E, 6).unwrap()).unwrap();
        assert!(rows_match(&tmd, &out.solutions[0].rows, &entry_rows("A2", 9)));
        // Both non-vacuum rows restrict to the same three weights.
        let nonvac: Vec<&BranchingRow> = out.solutions[0]
            .rows
            .iter()
            .filter(|r| r.target.iter().any(|&l| l != 0))
            .collect();
        assert_eq!(nonvac.len(), 2);
        assert_eq!(nonvac[0].terms, nonvac[1].terms);
    }

    #[test]
    fn solve_a3_level4() {
        let ctx = actx(3, 4);
        let out = solve_branching(&ctx, &catalog_z("A3", 4), "B7").unwrap();
        let tmd = modular::level1_data(algebra(Series::B, 7).unwrap()).unwrap();
        assert!(rows_match(&tmd, &out.solutions[0].rows, &entry_rows("A3", 4)));
        // The spinor row is 2·(111): fixed by the rank argument.
        let spinor = out.solutions[0]
            .rows
            .iter()
            .find(|r| *r.target.last().unwrap() == 1)
            .unwrap();
        assert_eq!(spinor.terms, vec![(vec![1, 1, 1], 2)]);
    }

    #[test]
    fn solve_a4_level5() {
        let ctx = actx(4, 5);
        let out = solve_branching(&ctx, &catalog_z("A4", 5), "D12").unwrap();
        let tmd = modular::level1_data(algebra(Series::D, 12).unwrap()).unwrap();
        let best = &out.solutions[0];
        assert!(rows_match(&tmd, &best.rows, &entry_rows("A4", 5)));
        // Exact conformal-weight matching pins the vector row: h(1001) = 1/2.
        let vector = best.rows.iter().find(|r| r.target[0] == 1).unwrap();
        assert!(vector.terms.iter().any(|(w, _)| w == &vec![1, 0, 0, 1]));
        assert_eq!(best.h_matched, tmd.dim());
    }

    #[test]
    fn solve_rejects_wrong_target() {
        let ctx = actx(1, 10);
        assert!(solve_branching(&ctx, &catalog_z("A1", 10), "G2").is_err());
    }

    #[test]
    fn verify_catalog_subset() {
        for (alg, level) in [("A1", 10), ("A2", 5), ("A3", 8)] {
            let entry = catalog::lookup(alg, level).unwrap();
            let rep = verify_branching(entry).unwrap();
            assert!(rep.pass, "{alg} level {level}: {rep:?}");
            assert!(rep.s_residual < 1e-8);
        }
    }

    #[test]
    fn verify_detects_corruption() {
        let mut entry = catalog::lookup("A1", 10).unwrap().clone();
        // Swap (3) and (4) between the two non-vacuum rows.
        for row in &mut entry.rows {
            for term in &mut row.restriction {
                if term.0 == "3" {
                    term.0 = "4".into();
                } else if term.0 == "4" {
                    term.0 = "3".into();
                }
            }
        }
        let rep = verify_branching(&entry).unwrap();
        assert!(!rep.pass);
        assert!(rep.s_residual > 0.1);
    }

    #[test]
    fn completeness_a2_level21() {
        let entry = catalog::lookup("A2", 21).unwrap();
        let rep = verify_branching(entry).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.completeness_defect < 1e-6);
    }
}
