//! Galois symmetry of the S-matrix: parities, the ℓ-action on the alcove,
//! and the candidate sets it carves out.
//!
//! For ℓ coprime to the Galois modulus N·κ, the Galois automorphism
//! σ_ℓ permutes the (shifted) alcove: ℓλ folds back to a unique alcove weight
//! ℓ.λ with a sign ε_ℓ(λ) = det ω of the folding Weyl element, and
//! σ(S_{λ,μ}) = ε_ℓ(λ) S_{ℓ.λ,μ} = ε_ℓ(μ) S_{λ,ℓ.μ}.
//!
//! Everything here is exact integer/rational arithmetic. In particular the
//! relative parity ε_ℓ(λ)ε_ℓ(1) is a product over positive roots of signs of
//! sines at rational multiples of π, and each sign is read off from a residue,
//! never from a floating-point sine.
//!
//! A weight λ is a *candidate* (possible support of a connected étale
//! algebra) when its twist is trivial (h_λ ∈ Z), its quantum dimension is
//! totally positive (parity +1 for every ℓ), and h_λ ≠ 1 — the last exclusion
//! being waived at the finitely many levels admitting a Lie-type conformal
//! extension.

use crate::liealg::{Rat, Series};
use crate::weights::LevelContext;
use crate::{Error, Result};
use num_integer::Integer;

/// Step cap for alcove folding; reaching it indicates a logic error upstream.
const FOLD_STEP_CAP: usize = 1_000_000;

/// Levels at which a Lie-type conformal extension exists (conformal
/// embeddings g_k ⊂ (g')_1), for the algebras whose classification we run.
/// Other series accept an explicit override instead.
pub fn lie_type_levels(series: Series, rank: usize) -> Option<&'static [i64]> {
    match (series, rank) {
        (Series::A, 1) => Some(&[4, 10, 28]),
        (Series::A, 2) => Some(&[3, 5, 9, 21]),
        (Series::A, 3) => Some(&[2, 4, 6, 8]),
        (Series::A, 4) => Some(&[3, 5, 7]),
        _ => None,
    }
}

/// Whether this level admits a Lie-type conformal extension, per the static
/// table (or an override list supplied by the caller).
pub fn is_lie_type(ctx: &LevelContext, override_levels: Option<&[i64]>) -> bool {
    let levels = override_levels
        .map(|l| l.to_vec())
        .or_else(|| lie_type_levels(ctx.alg.series, ctx.alg.rank).map(|l| l.to_vec()));
    levels.is_some_and(|l| l.contains(&ctx.k))
}

/// The units of Z/m, ascending.
pub fn units(m: i64) -> Vec<i64> {
    (1..m).filter(|l| l.gcd(&m) == 1).collect()
}

/// Exact sign of sin(π·x) for rational x = num/den not an integer.
/// Returns Err on an integer x (a weight on an alcove wall).
fn sine_sign(num: i128, den: i128) -> Result<i32> {
    debug_assert!(den > 0);
    let m = num.rem_euclid(2 * den);
    if m == 0 || m == den {
        return Err(Error::Msg(
            "sine sign undefined: weight pairs integrally with a root".into(),
        ));
    }
    Ok(if m < den { 1 } else { -1 })
}

/// Relative Galois parity ε_ℓ(λ)·ε_ℓ(1) for *shifted* λ, as a product over
/// positive roots of sign(sin(πℓ(λ|α)/κ))·sign(sin(πℓ(ρ|α)/κ)).
pub fn parity_product(ctx: &LevelContext, lam_shifted: &[i64], ell: i64) -> Result<i32> {
    let mut total = 1i32;
    for root in &ctx.alg.pos_roots {
        let pairing = root.pair(lam_shifted);
        let rho_pairing = root.pair(&vec![1; ctx.alg.rank]);
        // sin(π ℓ (λ|α)/κ): (λ|α) = p/q exactly.
        let s1 = sine_sign(
            ell as i128 * *pairing.numer() as i128,
            *pairing.denom() as i128 * ctx.kappa as i128,
        )?;
        let s2 = sine_sign(
            ell as i128 * *rho_pairing.numer() as i128,
            *rho_pairing.denom() as i128 * ctx.kappa as i128,
        )?;
        total *= s1 * s2;
    }
    Ok(total)
}

/// Fold an arbitrary (shifted-coordinate) weight into the open alcove,
/// returning the alcove representative and the determinant sign of the
/// folding affine-Weyl element. Errors if the weight lies on a wall.
pub fn fold_to_alcove(ctx: &LevelContext, x: &[i64]) -> Result<(Vec<i64>, i32)> {
    let mut x = x.to_vec();
    let mut sign = 1i32;
    for _ in 0..FOLD_STEP_CAP {
        if let Some(i) = x.iter().position(|&v| v <= 0) {
            if x[i] == 0 {
                return Err(Error::Msg("weight lies on an alcove wall".into()));
            }
            ctx.alg.reflect_simple(&mut x, i);
            sign = -sign;
            continue;
        }
        let x0 = ctx.alg.label0(&x, ctx.kappa);
        if x0 > 0 {
            return Ok((x, sign));
        }
        if x0 == 0 {
            return Err(Error::Msg("weight lies on the affine alcove wall".into()));
        }
        // Affine reflection about (x|θ^∨) = κ: x ↦ x + x_0·θ.
        for (xi, &t) in x.iter_mut().zip(&ctx.alg.theta_weight) {
            *xi += x0 * t;
        }
        sign = -sign;
    }
    Err(Error::FoldingDiverged)
}

/// The Galois action ℓ.λ on an unshifted alcove weight: fold ℓ·(λ+ρ) and
/// unshift. Returns (ℓ.λ, ε_ℓ(λ)). Requires gcd(ℓ, Nκ) = 1.
pub fn galois_act(ctx: &LevelContext, ell: i64, lam_unshifted: &[i64]) -> Result<(Vec<i64>, i32)> {
    if ell.gcd(&ctx.galois_modulus) != 1 {
        return Err(Error::EllNotCoprime(ell, ctx.galois_modulus));
    }
    let shifted = ctx.shift(lam_unshifted);
    let scaled: Vec<i64> = shifted.iter().map(|&v| v * ell.rem_euclid(ctx.galois_modulus)).collect();
    let (folded, sign) = fold_to_alcove(ctx, &scaled)?;
    Ok((ctx.unshift(&folded), sign))
}

/// ε_ℓ(λ) for unshifted λ, from the folding determinant.
pub fn parity(ctx: &LevelContext, ell: i64, lam_unshifted: &[i64]) -> Result<i32> {
    Ok(galois_act(ctx, ell, lam_unshifted)?.1)
}

/// Totally positive quantum dimension: ε_ℓ(λ)ε_ℓ(1) = +1 for every unit ℓ
/// of Z/Nκ. (σ(qdim λ) = ε_ℓ(λ)ε_ℓ(1)·qdim(ℓ.λ) and alcove qdims are
/// positive, so this is exactly total positivity of qdim λ.)
pub fn totally_positive(ctx: &LevelContext, lam_unshifted: &[i64]) -> Result<bool> {
    let shifted = ctx.shift(lam_unshifted);
    for ell in units(ctx.galois_modulus) {
        if ell == 1 {
            continue;
        }
        if parity_product(ctx, &shifted, ell)? == -1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Candidate predicate: trivial twist, totally positive qdim, and h ≠ 1
/// unless the level is Lie-type.
pub fn is_candidate(
    ctx: &LevelContext,
    lam_unshifted: &[i64],
    lie_type_override: Option<&[i64]>,
) -> Result<bool> {
    let h = ctx.conformal_weight(lam_unshifted);
    if !h.is_integer() {
        return Ok(false);
    }
    if h == Rat::from_integer(1) && !is_lie_type(ctx, lie_type_override) {
        return Ok(false);
    }
    totally_positive(ctx, lam_unshifted)
}

/// Scaled A-series inner product r'·(λ|μ) as an exact integer, for the fast
/// integrality prefilter in full-alcove candidate scans.
pub(crate) fn a_ip_scaled(lam: &[i64], mu: &[i64]) -> i64 {
    let r = lam.len();
    let rp = r as i64 + 1;
    let mut acc = 0i64;
    let (mut ls, mut ms) = (0i64, 0i64);
    let (mut lt, mut mt) = (0i64, 0i64);
    for i in (0..r).rev() {
        ls += lam[i];
        ms += mu[i];
        acc += ls * ms;
        lt += (i as i64 + 1) * lam[i];
        mt += (i as i64 + 1) * mu[i];
    }
    acc * rp - lt * mt
}

/// The full candidate set 𝔉 at this level: every weight of P_+^k passing
/// `is_candidate`, in lexicographic order. Streams the alcove, so large
/// levels are fine; the expensive total-positivity test only runs on weights
/// that already have integral conformal weight.
pub fn candidate_set(
    ctx: &LevelContext,
    lie_type_override: Option<&[i64]>,
) -> Result<Vec<Vec<i64>>> {
    let mut integral: Vec<Vec<i64>> = Vec::new();
    if ctx.alg.series == Series::A {
        let rp = ctx.alg.rank as i64 + 1;
        let modulus = 2 * ctx.kappa * rp;
        ctx.for_each_weight(&mut |lam| {
            let two_rho: Vec<i64> = lam.iter().map(|&l| l + 2).collect();
            if a_ip_scaled(lam, &two_rho).rem_euclid(modulus) == 0 {
                integral.push(lam.to_vec());
            }
        });
    } else {
        ctx.for_each_weight(&mut |lam| {
            if ctx.conformal_weight(lam).is_integer() {
                integral.push(lam.to_vec());
            }
        });
    }
    let mut out = Vec::new();
    for lam in integral {
        if is_candidate(ctx, &lam, lie_type_override)? {
            out.push(lam);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{algebra, Series};
    use crate::modular::a_series_s;
    use num_complex::Complex64;

    fn ctx(series: Series, rank: usize, k: i64) -> LevelContext {
        LevelContext::new(algebra(series, rank).unwrap(), k)
    }

    /// Minimal fixed-seed generator for reproducible random triples.
    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self, bound: usize) -> usize {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((self.0 >> 33) as usize) % bound
        }
    }

    #[test]
    fn parity_matches_folding_sign() {
        for (r, k) in [(2usize, 7i64), (3, 5)] {
            let c = ctx(Series::A, r, k);
            let alcove = c.enumerate_level(10_000).unwrap();
            for ell in units(c.galois_modulus) {
                let eps_one = parity(&c, ell, &vec![0; r]).unwrap();
                for lam in &alcove {
                    let eps = parity(&c, ell, lam).unwrap();
                    let prod = parity_product(&c, &c.shift(lam), ell).unwrap();
                    assert_eq!(eps * eps_one, prod, "A{r} k={k} ℓ={ell} λ={lam:?}");
                }
            }
        }
    }

    #[test]
    fn galois_action_is_invertible() {
        let c = ctx(Series::A, 3, 6);
        let m = c.galois_modulus;
        for ell in units(m) {
            let inv = units(m)
                .into_iter()
                .find(|&j| (j * ell) % m == 1)
                .unwrap();
            for lam in c.enumerate_level(10_000).unwrap() {
                let (img, _) = galois_act(&c, ell, &lam).unwrap();
                let (back, _) = galois_act(&c, inv, &img).unwrap();
                assert_eq!(back, lam);
            }
        }
    }

    #[test]
    fn parity_constant_on_current_and_dual_orbits() {
        let c = ctx(Series::A, 2, 6);
        let gen = c.alg.simple_currents[c.alg.sc_generators[0]].clone();
        for lam in c.enumerate_level(10_000).unwrap() {
            let shifted = c.shift(&lam);
            let j_lam = c.alg.apply_simple_current(&gen, &lam, c.k);
            let dual = c.alg.contragredient(&lam);
            for ell in [5i64, 7, 11] {
                let p = parity_product(&c, &shifted, ell).unwrap();
                assert_eq!(p, parity_product(&c, &c.shift(&j_lam), ell).unwrap());
                assert_eq!(p, parity_product(&c, &c.shift(&dual), ell).unwrap());
            }
        }
    }

    #[test]
    fn galois_rule_on_random_triples() {
        // ε_ℓ(λ) S_{ℓ.λ,μ} = ε_ℓ(μ) S_{λ,ℓ.μ}
        let mut rng = Lcg(0x9e3779b97f4a7c15);
        for (r, k) in [(2usize, 8i64), (3, 5)] {
            let c = ctx(Series::A, r, k);
            let alcove = c.enumerate_level(10_000).unwrap();
            let us = units(c.galois_modulus);
            for _ in 0..25 {
                let lam = &alcove[rng.next(alcove.len())];
                let mu = &alcove[rng.next(alcove.len())];
                let ell = us[rng.next(us.len())];
                let (llam, el) = galois_act(&c, ell, lam).unwrap();
                let (lmu, em) = galois_act(&c, ell, mu).unwrap();
                let lhs = a_series_s(&c, &llam, mu) * el as f64;
                let rhs = a_series_s(&c, lam, &lmu) * em as f64;
                assert!(
                    (lhs - rhs).norm() < 1e-7,
                    "A{r} k={k} ℓ={ell} λ={lam:?} μ={mu:?}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn explicit_galois_images_a3_level6() {
        let c = ctx(Series::A, 3, 6);
        assert_eq!(galois_act(&c, 7, &[0, 0, 2]).unwrap().0, vec![3, 0, 1]);
        assert_eq!(galois_act(&c, 7, &[2, 1, 2]).unwrap().0, vec![0, 3, 0]);
    }

    #[test]
    fn ell_must_be_coprime() {
        let c = ctx(Series::A, 1, 10);
        // modulus 24; ℓ = 6 shares a factor.
        assert!(matches!(
            galois_act(&c, 6, &[2]),
            Err(Error::EllNotCoprime(6, 24))
        ));
    }

    #[test]
    fn a1_candidate_sets_closed_form() {
        for k in 1..=30i64 {
            let c = ctx(Series::A, 1, k);
            let got = candidate_set(&c, None).unwrap();
            let expect: Vec<Vec<i64>> = match k {
                10 => vec![vec![0], vec![6]],
                28 => vec![vec![0], vec![10], vec![18], vec![28]],
                _ if k % 4 == 0 => vec![vec![0], vec![k]],
                _ => vec![vec![0]],
            };
            assert_eq!(got, expect, "k={k}");
        }
    }

    #[test]
    fn candidate_sets_are_orbit_closed() {
        for (r, k) in [(2usize, 9i64), (3, 8), (4, 5)] {
            let c = ctx(Series::A, r, k);
            let set = candidate_set(&c, None).unwrap();
            let gen = c.alg.simple_currents[c.alg.sc_generators[0]].clone();
            for lam in &set {
                let j = c.alg.apply_simple_current(&gen, lam, k);
                let d = c.alg.contragredient(lam);
                assert!(set.contains(&j), "A{r} k={k}: J{lam:?}={j:?} missing");
                assert!(set.contains(&d), "A{r} k={k}: C{lam:?}={d:?} missing");
            }
        }
    }
}
