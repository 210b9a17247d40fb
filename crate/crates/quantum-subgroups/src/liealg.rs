//! Exact static data of simple finite-dimensional Lie algebras.
//!
//! Everything in this module is exact rational arithmetic: quadratic forms,
//! root pairings and Weyl-vector norms feed strict inequality and integrality
//! tests downstream, so floats are banned here.
//!
//! Conventions: the invariant bilinear form (·|·) is normalized so the highest
//! root has norm-squared 2. Weights are stored by their Dynkin labels
//! λ_i = ⟨λ, α_i^∨⟩ (the fundamental-weight basis). Simple roots in this basis
//! are the columns of the Cartan matrix: (α_j)_i = A_{ij} with
//! A_{ij} = ⟨α_j, α_i^∨⟩ = 2(α_i|α_j)/(α_i|α_i).

use crate::{Error, Result};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Exact rational scalar used throughout the engine.
pub type Rat = Ratio<i64>;

/// The classification series of a simple Lie algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Series::A => "A",
            Series::B => "B",
            Series::C => "C",
            Series::D => "D",
            Series::E => "E",
            Series::F => "F",
            Series::G => "G",
        };
        write!(f, "{s}")
    }
}

/// A positive root α = Σ_j c_j α_j, stored with precomputed pairing
/// coefficients so that (λ|α) = Σ_j pairing_j · λ_j is a dot product in the
/// Dynkin labels of λ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosRoot {
    /// Coefficients c_j over the simple roots.
    pub root_coords: Vec<i64>,
    /// pairing_j = c_j · d_j, so (λ|α) = Σ_j pairing_j λ_j (exact rational).
    pub pairing: Vec<Rat>,
    /// Half the norm-squared, d_α = (α|α)/2 (1 for long roots).
    pub d_alpha: Rat,
}

impl PosRoot {
    /// (λ|α) for λ given by Dynkin labels.
    pub fn pair(&self, labels: &[i64]) -> Rat {
        let mut acc = Rat::zero();
        for (p, &l) in self.pairing.iter().zip(labels) {
            acc += *p * Rat::from_integer(l);
        }
        acc
    }

    /// Height Σ_j c_j of the root.
    pub fn height(&self) -> i64 {
        self.root_coords.iter().sum()
    }
}

/// Static root-system constants of a simple Lie algebra.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraData {
    pub series: Series,
    pub rank: usize,
    /// Cartan matrix A_{ij} = ⟨α_j, α_i^∨⟩.
    pub cartan: Vec<Vec<i64>>,
    /// d_i = (α_i|α_i)/2; equals 1 for long simple roots.
    pub d: Vec<Rat>,
    /// Marks a_i: coefficients of the highest root over the simple roots.
    pub marks: Vec<i64>,
    /// Co-marks a_i^∨ = a_i d_i.
    pub comarks: Vec<i64>,
    /// Dual Coxeter number h^∨ = 1 + Σ a_i^∨.
    pub dual_coxeter: i64,
    /// Coxeter number h = 1 + Σ a_i.
    pub coxeter: i64,
    /// dim g = rank + number of roots.
    pub dim_g: i64,
    /// Quadratic form F_{ij} = (Λ_i|Λ_j), symmetric positive definite.
    pub quad_form: Vec<Vec<Rat>>,
    /// All positive roots with pairing data; simple roots come first.
    pub pos_roots: Vec<PosRoot>,
    /// Highest root in Dynkin-label (fundamental weight) coordinates.
    pub theta_weight: Vec<i64>,
    /// (ρ|ρ) where ρ = (1,…,1); equals h^∨ dim(g)/12.
    pub weyl_vector_norm: Rat,
    /// Smallest f ≥ 1 with fρ in the coroot lattice. Equals 1, 2 or 3 for
    /// every algebra whose thresholds are computed (it is 4 only for odd-rank
    /// B, which occurs purely as an extension target where f is never used).
    pub f_g: i64,
    /// Smallest N with N·(weight lattice) ⊆ coroot lattice.
    pub center_exponent: i64,
    /// Permutation (0-based on node indices) implementing λ ↦ λ*.
    pub duality_perm: Vec<usize>,
    /// Simple-current permutations of the extended Dynkin labels {0,…,r}.
    /// `simple_currents[0]` is always the identity; `sc_generators` indexes a
    /// designated generating set within this list.
    pub simple_currents: Vec<Vec<usize>>,
    pub sc_generators: Vec<usize>,
    /// Order of the finite Weyl group.
    pub weyl_order: u128,
}

fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(n, d)
}

/// Cartan matrix and simple-root half-norms per series (Bourbaki numbering).
fn cartan_and_d(series: Series, r: usize) -> Result<(Vec<Vec<i64>>, Vec<Rat>)> {
    let bad = || Error::InvalidRank {
        series: series.to_string(),
        rank: r,
    };
    let valid = match series {
        Series::A => r >= 1,
        Series::B => r >= 2,
        Series::C => r >= 2,
        Series::D => r >= 3,
        Series::E => (6..=8).contains(&r),
        Series::F => r == 4,
        Series::G => r == 2,
    };
    if !valid || r > 14 {
        return Err(bad());
    }

    let mut a = vec![vec![0i64; r]; r];
    for i in 0..r {
        a[i][i] = 2;
    }
    let chain = |a: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        a[i][j] = -1;
        a[j][i] = -1;
    };
    let mut d = vec![Rat::one(); r];
    match series {
        Series::A => {
            for i in 0..r.saturating_sub(1) {
                chain(&mut a, i, i + 1);
            }
        }
        Series::B => {
            // α_r short: |α_r|² = 1.
            for i in 0..r - 1 {
                chain(&mut a, i, i + 1);
            }
            a[r - 1][r - 2] = -2; // ⟨α_{r-1}, α_r^∨⟩... row r-1 is short
            a[r - 2][r - 1] = -1;
            d[r - 1] = rat(1, 2);
        }
        Series::C => {
            // α_1..α_{r-1} short, α_r long.
            for i in 0..r - 1 {
                chain(&mut a, i, i + 1);
            }
            a[r - 2][r - 1] = -2;
            a[r - 1][r - 2] = -1;
            for di in d.iter_mut().take(r - 1) {
                *di = rat(1, 2);
            }
        }
        Series::D => {
            for i in 0..r - 2 {
                chain(&mut a, i, i + 1);
            }
            chain(&mut a, r - 3, r - 1);
        }
        Series::E => {
            // Bourbaki: chain 1-3-4-5-6(-7)(-8), node 2 attached to node 4.
            chain(&mut a, 0, 2);
            chain(&mut a, 1, 3);
            for i in 2..r - 1 {
                chain(&mut a, i, i + 1);
            }
        }
        Series::F => {
            // 1-2⇒3-4 with α_3, α_4 short.
            chain(&mut a, 0, 1);
            chain(&mut a, 2, 3);
            a[1][2] = -1;
            a[2][1] = -2;
            d[2] = rat(1, 2);
            d[3] = rat(1, 2);
        }
        Series::G => {
            // α_1 long, α_2 short with |α_2|² = 2/3.
            a[0][1] = -1;
            a[1][0] = -3;
            d[1] = rat(1, 3);
        }
    }
    // Consistency: A_{ij} = (α_i|α_j)/d_i must make D·A symmetric.
    for i in 0..r {
        for j in 0..r {
            debug_assert_eq!(d[i] * Rat::from_integer(a[i][j]), d[j] * Rat::from_integer(a[j][i]));
        }
    }
    Ok((a, d))
}

/// Closure of the simple roots under simple reflections, in root coordinates.
fn generate_roots(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let r = cartan.len();
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut frontier: Vec<Vec<i64>> = Vec::new();
    for i in 0..r {
        let mut e = vec![0i64; r];
        e[i] = 1;
        seen.insert(e.clone());
        frontier.push(e);
    }
    while let Some(c) = frontier.pop() {
        for i in 0..r {
            // ⟨α, α_i^∨⟩ = Σ_j c_j A_{ij}
            let pair: i64 = (0..r).map(|j| c[j] * cartan[i][j]).sum();
            let mut c2 = c.clone();
            c2[i] -= pair;
            if seen.insert(c2.clone()) {
                frontier.push(c2);
            }
        }
    }
    seen.into_iter().collect()
}

/// Exact inverse of a square rational matrix by Gauss–Jordan elimination.
fn rational_inverse(m: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rat>> = m.iter().cloned().collect();
    let mut inv = vec![vec![Rat::zero(); n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = Rat::one();
    }
    for col in 0..n {
        let pivot = (col..n)
            .find(|&row| !aug[row][col].is_zero())
            .expect("matrix is singular");
        aug.swap(col, pivot);
        inv.swap(col, pivot);
        let p = aug[col][col];
        for x in aug[col].iter_mut() {
            *x /= p;
        }
        for x in inv[col].iter_mut() {
            *x /= p;
        }
        for row in 0..n {
            if row != col && !aug[row][col].is_zero() {
                let f = aug[row][col];
                for j in 0..n {
                    let (a, b) = (aug[col][j], inv[col][j]);
                    aug[row][j] -= f * a;
                    inv[row][j] -= f * b;
                }
            }
        }
    }
    inv
}

fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    // (p∘q)(λ)_i = (q applied first): new[i] = mid[p[i]] = old[q[p[i]]]
    p.iter().map(|&i| q[i]).collect()
}

/// Generate the closure of a permutation set under composition.
fn permutation_group(generators: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let identity: Vec<usize> = (0..n).collect();
    let mut group: BTreeSet<Vec<usize>> = BTreeSet::new();
    group.insert(identity);
    loop {
        let mut added = false;
        let snapshot: Vec<_> = group.iter().cloned().collect();
        for g in generators {
            for h in &snapshot {
                let gh = compose(g, h);
                if group.insert(gh) {
                    added = true;
                }
            }
        }
        if !added {
            return group.into_iter().collect();
        }
    }
}

fn weyl_order(series: Series, r: usize) -> u128 {
    let fact = |n: usize| -> u128 { (1..=n as u128).product() };
    match series {
        Series::A => fact(r + 1),
        Series::B | Series::C => (1u128 << r) * fact(r),
        Series::D => (1u128 << (r - 1)) * fact(r),
        Series::E => match r {
            6 => 51_840,
            7 => 2_903_040,
            _ => 696_729_600,
        },
        Series::F => 1_152,
        Series::G => 12,
    }
}

/// Simple-current generators as permutations of the extended node set {0,…,r}.
fn simple_current_generators(series: Series, r: usize) -> Vec<Vec<usize>> {
    // A permutation perm acts by (Jλ)_i = λ_{perm[i]} on extended labels.
    match series {
        Series::A => {
            // Cyclic rotation: Jλ = (λ_0, λ_1, …, λ_{r-1}), so node i reads
            // the old label at i-1 (mod r+1).
            let n = r + 1;
            vec![(0..n).map(|i| (i + n - 1) % n).collect()]
        }
        Series::B => {
            let mut p: Vec<usize> = (0..=r).collect();
            p.swap(0, 1);
            vec![p]
        }
        Series::C => vec![(0..=r).rev().collect()],
        Series::D => {
            let mut v: Vec<usize> = (0..=r).collect();
            v.swap(0, 1);
            v.swap(r - 1, r);
            if r % 2 == 0 {
                // Z_2×Z_2: both spinor currents are involutions; the full
                // reversal of the extended diagram is one of them.
                let s: Vec<usize> = (0..=r).rev().collect();
                vec![v, s]
            } else {
                // Z_4: the spinor current rotates the two forks of the
                // extended diagram, σ: 0→r→1→r-1→0, i→r-i in the middle;
                // σ² is the vector current. perm[i] = σ^{-1}(i).
                let mut p: Vec<usize> = (0..=r).map(|i| r - i).collect();
                p[0] = r - 1;
                p[1] = r;
                p[r - 1] = 1;
                p[r] = 0;
                vec![p]
            }
        }
        Series::E if r == 6 => {
            // Legs of the extended diagram from the center node 4 (Bourbaki):
            // 4-3-1, 4-5-6, 4-2-0. Rotate the legs: 1→3's leg etc.
            // σ maps node positions: 0→6→1→0 (tips), 2→5→3→2 (middles), 4 fixed.
            // perm[i] = σ^{-1}(i) so that new[i] = old[perm[i]].
            let sigma: [usize; 7] = [6, 0, 5, 2, 4, 3, 1]; // σ(0)=6, σ(1)=0, σ(2)=5, σ(3)=2, σ(4)=4, σ(5)=3, σ(6)=1
            let mut perm = vec![0usize; 7];
            for (i, &s) in sigma.iter().enumerate() {
                perm[s] = i;
            }
            vec![perm]
        }
        Series::E if r == 7 => {
            // Extended diagram is the chain 0-1-3-4-5-6-7 with 2 hanging off 4;
            // the order-2 symmetry reflects the chain.
            let sigma: [usize; 8] = [7, 6, 2, 5, 4, 3, 1, 0];
            vec![sigma.to_vec()] // an involution, so perm = σ
        }
        _ => Vec::new(), // E_8, F_4, G_2: trivial center
    }
}

fn expected_center_order(series: Series, r: usize) -> usize {
    match series {
        Series::A => r + 1,
        Series::B | Series::C => 2,
        Series::D => 4,
        Series::E => match r {
            6 => 3,
            7 => 2,
            _ => 1,
        },
        Series::F | Series::G => 1,
    }
}

/// Build the full static data for a simple Lie algebra.
///
/// All structural invariants (strange formula, positive-root count, comark
/// integrality, duality involution, simple-current group order) are asserted
/// during construction, so a successfully built `AlgebraData` is trustworthy.
pub fn build_algebra(series: Series, rank: usize) -> Result<AlgebraData> {
    let (cartan, d) = cartan_and_d(series, rank)?;
    let r = rank;

    let all_roots = generate_roots(&cartan);
    let pos: Vec<Vec<i64>> = all_roots
        .iter()
        .filter(|c| c.iter().all(|&x| x >= 0))
        .cloned()
        .collect();
    assert_eq!(all_roots.len(), 2 * pos.len(), "root system must be symmetric");
    let dim_g = r as i64 + all_roots.len() as i64;

    let mut pos_roots: Vec<PosRoot> = pos
        .iter()
        .map(|c| {
            let pairing: Vec<Rat> = c
                .iter()
                .zip(&d)
                .map(|(&cj, dj)| Rat::from_integer(cj) * dj)
                .collect();
            // (α|α)/2 = (Σ c_j α_j | α) / 2 = Σ_j c_j d_j ⟨α, α_j^∨⟩... use
            // (α|α) = Σ_{j,m} c_j c_m (α_j|α_m) with (α_j|α_m) = d_m A_{mj}.
            let mut norm = Rat::zero();
            for (j, &cj) in c.iter().enumerate() {
                for (m, &cm) in c.iter().enumerate() {
                    norm += Rat::from_integer(cj * cm) * d[m] * Rat::from_integer(cartan[m][j]);
                }
            }
            PosRoot {
                root_coords: c.clone(),
                pairing,
                d_alpha: norm / Rat::from_integer(2),
            }
        })
        .collect();
    pos_roots.sort_by_key(|p| (p.height(), p.root_coords.clone()));

    // Highest root: unique root of maximal height; it must be long (d = 1).
    let theta = pos_roots.last().expect("nonempty root system").clone();
    assert!(theta.d_alpha.is_one(), "highest root must be long");
    let marks = theta.root_coords.clone();
    let comarks: Vec<i64> = marks
        .iter()
        .zip(&d)
        .map(|(&m, dj)| {
            let c = Rat::from_integer(m) * dj;
            assert!(c.is_integer(), "comarks must be integral");
            c.to_integer()
        })
        .collect();
    let dual_coxeter = 1 + comarks.iter().sum::<i64>();
    let coxeter = 1 + marks.iter().sum::<i64>();

    // θ in Dynkin-label coordinates: θ_i = Σ_j a_j A_{ij}.
    let theta_weight: Vec<i64> = (0..r)
        .map(|i| (0..r).map(|j| marks[j] * cartan[i][j]).sum())
        .collect();

    // F = A^{-1} scaled by d: F_{ij} = (Λ_i|Λ_j) = (A^{-1})_{ij} d_i.
    let cartan_rat: Vec<Vec<Rat>> = cartan
        .iter()
        .map(|row| row.iter().map(|&x| Rat::from_integer(x)).collect())
        .collect();
    let ainv = rational_inverse(&cartan_rat);
    let quad_form: Vec<Vec<Rat>> = (0..r)
        .map(|i| (0..r).map(|j| ainv[i][j] * d[i]).collect())
        .collect();
    for i in 0..r {
        for j in 0..r {
            assert_eq!(quad_form[i][j], quad_form[j][i], "quad form must be symmetric");
        }
    }

    // (ρ|ρ) = Σ_{ij} F_{ij}; strange-formula check.
    let mut weyl_vector_norm = Rat::zero();
    for row in &quad_form {
        for x in row {
            weyl_vector_norm += *x;
        }
    }
    assert_eq!(
        weyl_vector_norm,
        Rat::new(dual_coxeter * dim_g, 12),
        "(ρ|ρ) must equal h^∨ dim(g)/12"
    );
    assert_eq!(pos_roots.len() as i64, (dim_g - r as i64) / 2);

    // Coroot basis in Dynkin labels: (α_j^∨)_i = A_{ij}/d_j; used for f_g and
    // the center exponent.
    let coroot_mat: Vec<Vec<Rat>> = (0..r)
        .map(|i| (0..r).map(|j| Rat::from_integer(cartan[i][j]) / d[j]).collect())
        .collect();
    let coroot_inv = rational_inverse(&coroot_mat);
    let f_g = (1..=6)
        .find(|&f| {
            // x = f · M^{-1} ρ must be integral.
            (0..r).all(|j| {
                let mut x = Rat::zero();
                for i in 0..r {
                    x += coroot_inv[j][i];
                }
                (x * Rat::from_integer(f)).is_integer()
            })
        })
        .expect("fρ must lie in the coroot lattice for some small f");
    let mut center_exponent: i64 = 1;
    for row in &coroot_inv {
        for x in row {
            center_exponent = center_exponent.lcm(x.denom());
        }
    }

    // Duality permutation: fold -Λ_i to the dominant chamber; the result is
    // Λ_{i*}. (Dominant representative of the Weyl orbit of -Λ_i is -w_0 Λ_i.)
    let reflect = |labels: &mut Vec<i64>, i: usize| {
        let li = labels[i];
        for (j, l) in labels.iter_mut().enumerate() {
            *l -= li * cartan[j][i];
        }
    };
    let mut duality_perm = vec![0usize; r];
    for i in 0..r {
        let mut lam = vec![0i64; r];
        lam[i] = -1;
        loop {
            match lam.iter().position(|&x| x < 0) {
                Some(j) => reflect(&mut lam, j),
                None => break,
            }
        }
        let star = lam
            .iter()
            .position(|&x| x == 1)
            .expect("dominant representative of -Λ_i must be fundamental");
        assert!(lam.iter().filter(|&&x| x != 0).count() == 1);
        duality_perm[i] = star;
    }
    for (i, &s) in duality_perm.iter().enumerate() {
        assert_eq!(duality_perm[s], i, "duality must be an involution");
    }

    let sc_gen_perms = simple_current_generators(series, rank);
    let simple_currents = permutation_group(&sc_gen_perms, r + 1);
    assert_eq!(
        simple_currents.len(),
        expected_center_order(series, rank),
        "simple-current group must match the center"
    );
    let sc_generators: Vec<usize> = sc_gen_perms
        .iter()
        .map(|g| simple_currents.iter().position(|h| h == g).expect("generator in group"))
        .collect();

    Ok(AlgebraData {
        series,
        rank,
        cartan,
        d,
        marks,
        comarks,
        dual_coxeter,
        coxeter,
        dim_g,
        quad_form,
        pos_roots,
        theta_weight,
        weyl_vector_norm,
        f_g,
        center_exponent,
        duality_perm,
        simple_currents,
        sc_generators,
        weyl_order: weyl_order(series, rank),
    })
}

impl AlgebraData {
    /// Parse a spec string like "A3", "g2", "D12" (case-insensitive).
    pub fn parse_spec(spec: &str) -> Result<AlgebraData> {
        let spec = spec.trim();
        let mut chars = spec.chars();
        let s = chars
            .next()
            .ok_or_else(|| Error::BadAlgebraSpec(spec.to_string()))?;
        let series = match s.to_ascii_uppercase() {
            'A' => Series::A,
            'B' => Series::B,
            'C' => Series::C,
            'D' => Series::D,
            'E' => Series::E,
            'F' => Series::F,
            'G' => Series::G,
            _ => return Err(Error::BadAlgebraSpec(spec.to_string())),
        };
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::BadAlgebraSpec(spec.to_string()))?;
        build_algebra(series, rank)
    }

    /// Canonical spec string, e.g. "A3".
    pub fn spec_string(&self) -> String {
        format!("{}{}", self.series, self.rank)
    }

    /// Exact inner product λᵀ F μ of two weights in Dynkin labels.
    pub fn inner_product(&self, lam: &[i64], mu: &[i64]) -> Rat {
        let mut acc = Rat::zero();
        for (i, &li) in lam.iter().enumerate() {
            if li == 0 {
                continue;
            }
            let mut row = Rat::zero();
            for (j, &mj) in mu.iter().enumerate() {
                if mj != 0 {
                    row += self.quad_form[i][j] * Rat::from_integer(mj);
                }
            }
            acc += Rat::from_integer(li) * row;
        }
        acc
    }

    /// Contragredient (dual) weight λ* via the duality permutation.
    pub fn contragredient(&self, lam: &[i64]) -> Vec<i64> {
        (0..self.rank).map(|i| lam[self.duality_perm[i]]).collect()
    }

    /// λ_0 at a given top label (level k for unshifted weights, κ for shifted).
    pub fn label0(&self, lam: &[i64], top: i64) -> i64 {
        top - self
            .comarks
            .iter()
            .zip(lam)
            .map(|(&a, &l)| a * l)
            .sum::<i64>()
    }

    /// Apply a simple-current permutation of extended labels to a weight.
    ///
    /// `top` is k for unshifted weights, κ for shifted ones; the permutation
    /// acts on the extended label vector (λ_0, λ_1, …, λ_r).
    pub fn apply_simple_current(&self, perm: &[usize], lam: &[i64], top: i64) -> Vec<i64> {
        let mut ext = Vec::with_capacity(self.rank + 1);
        ext.push(self.label0(lam, top));
        ext.extend_from_slice(lam);
        (1..=self.rank).map(|i| ext[perm[i]]).collect()
    }

    /// Simple reflection s_i acting on Dynkin labels.
    pub fn reflect_simple(&self, lam: &mut [i64], i: usize) {
        let li = lam[i];
        for (j, l) in lam.iter_mut().enumerate() {
            *l -= li * self.cartan[j][i];
        }
    }

    /// The extended Cartan matrix pairing ⟨α_j, α_i^∨⟩ for i,j ∈ {0,…,r},
    /// where α_0 = -θ. Used to validate diagram symmetries in tests.
    pub fn extended_cartan(&self) -> Vec<Vec<Rat>> {
        let r = self.rank;
        let n = r + 1;
        // Root coordinates of the extended simple roots over (θ, α_1..α_r):
        // express everything via (λ|μ) on root coordinates of the finite system.
        // α_0 = -θ has root coords -marks.
        let coords = |i: usize| -> Vec<i64> {
            if i == 0 {
                self.marks.iter().map(|&m| -m).collect()
            } else {
                let mut e = vec![0i64; r];
                e[i - 1] = 1;
                e
            }
        };
        let ip = |a: &[i64], b: &[i64]| -> Rat {
            let mut acc = Rat::zero();
            for (j, &aj) in a.iter().enumerate() {
                for (m, &bm) in b.iter().enumerate() {
                    acc += Rat::from_integer(aj * bm)
                        * self.d[m]
                        * Rat::from_integer(self.cartan[m][j]);
                }
            }
            acc
        };
        let mut ext = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            let ci = coords(i);
            let norm = ip(&ci, &ci);
            for j in 0..n {
                let cj = coords(j);
                ext[i][j] = Rat::from_integer(2) * ip(&ci, &cj) / norm;
            }
        }
        ext
    }

    /// Unshifted Dynkin labels of the simple-current image J(0) at level k.
    pub fn simple_current_weight(&self, perm: &[usize], k: i64) -> Vec<i64> {
        self.apply_simple_current(perm, &vec![0; self.rank], k)
    }
}

/// Global immutable cache of built algebras (they are pure data).
pub fn algebra(series: Series, rank: usize) -> Result<std::sync::Arc<AlgebraData>> {
    use once_cell::sync::Lazy;
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex};
    static CACHE: Lazy<Mutex<HashMap<(Series, usize), Arc<AlgebraData>>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    let mut cache = CACHE.lock().expect("algebra cache poisoned");
    if let Some(a) = cache.get(&(series, rank)) {
        return Ok(a.clone());
    }
    let built = Arc::new(build_algebra(series, rank)?);
    cache.insert((series, rank), built.clone());
    Ok(built)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a1_constants() {
        let g = build_algebra(Series::A, 1).unwrap();
        assert_eq!(g.dual_coxeter, 2);
        assert_eq!(g.dim_g, 3);
        assert_eq!(g.weyl_vector_norm, rat(1, 2));
        assert_eq!(g.center_exponent, 2);
    }

    #[test]
    fn a4_constants() {
        let g = build_algebra(Series::A, 4).unwrap();
        assert_eq!(g.dual_coxeter, 5);
        assert_eq!(g.dim_g, 24);
        assert_eq!(g.f_g, 1);
        assert_eq!(g.center_exponent, 5);
        assert!(g.comarks.iter().all(|&c| c == 1));
    }

    #[test]
    fn f_g_table() {
        // f = 1 for even-rank A; f_{G_2} = 3; f_{E_6} = f_{E_8} = 1;
        // f_{D_r} = 1 iff r ≡ 0,1 (mod 4).
        assert_eq!(build_algebra(Series::A, 1).unwrap().f_g, 2);
        assert_eq!(build_algebra(Series::A, 2).unwrap().f_g, 1);
        assert_eq!(build_algebra(Series::A, 3).unwrap().f_g, 2);
        assert_eq!(build_algebra(Series::A, 4).unwrap().f_g, 1);
        assert_eq!(build_algebra(Series::G, 2).unwrap().f_g, 3);
        assert_eq!(build_algebra(Series::E, 6).unwrap().f_g, 1);
        assert_eq!(build_algebra(Series::E, 8).unwrap().f_g, 1);
        assert_eq!(build_algebra(Series::D, 4).unwrap().f_g, 1);
        assert_eq!(build_algebra(Series::D, 5).unwrap().f_g, 1);
        assert_eq!(build_algebra(Series::D, 6).unwrap().f_g, 2);
        assert_eq!(build_algebra(Series::D, 7).unwrap().f_g, 2);
        assert_eq!(build_algebra(Series::D, 8).unwrap().f_g, 1);
    }

    #[test]
    fn dimension_table() {
        let cases = [
            (Series::A, 3, 15),
            (Series::B, 7, 105),
            (Series::C, 2, 10),
            (Series::D, 10, 190),
            (Series::D, 12, 276),
            (Series::E, 6, 78),
            (Series::E, 7, 133),
            (Series::E, 8, 248),
            (Series::F, 4, 52),
            (Series::G, 2, 14),
        ];
        for (s, r, dim) in cases {
            assert_eq!(build_algebra(s, r).unwrap().dim_g, dim, "{s}{r}");
        }
    }

    #[test]
    fn a_series_quad_form() {
        // (Λ_i|Λ_j) = i(r'-j)/r' for i ≤ j.
        for r in 1..=4 {
            let g = build_algebra(Series::A, r).unwrap();
            let rp = r as i64 + 1;
            for i in 0..r {
                for j in i..r {
                    assert_eq!(
                        g.quad_form[i][j],
                        rat((i as i64 + 1) * (rp - (j as i64 + 1)), rp),
                        "A{r} F[{i}][{j}]"
                    );
                }
            }
        }
    }

    #[test]
    fn a2_fundamental_norm() {
        let g = build_algebra(Series::A, 2).unwrap();
        assert_eq!(g.inner_product(&[1, 0], &[1, 0]), rat(2, 3));
    }

    #[test]
    fn contragredient_reverses_a_series() {
        let g = build_algebra(Series::A, 3).unwrap();
        assert_eq!(g.contragredient(&[0, 1, 2]), vec![2, 1, 0]);
        let g2 = build_algebra(Series::A, 2).unwrap();
        assert_eq!(g2.contragredient(&[4, 7]), vec![7, 4]);
        assert_eq!(g2.contragredient(&[1, 1]), vec![1, 1]);
    }

    #[test]
    fn duality_on_d_series() {
        // D_r: duality is trivial for even r, swaps the spinor nodes for odd r.
        let g = build_algebra(Series::D, 5).unwrap();
        assert_eq!(g.duality_perm[3], 4);
        assert_eq!(g.duality_perm[4], 3);
        let g = build_algebra(Series::D, 6).unwrap();
        assert_eq!(g.duality_perm, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn simple_current_rotation_a_series() {
        // A_1 k=10: J(6) = (4); A_2 k=5: J(0,0) = (5,0).
        let g = build_algebra(Series::A, 1).unwrap();
        let j = &g.simple_currents[g.sc_generators[0]];
        assert_eq!(g.apply_simple_current(j, &[6], 10), vec![4]);
        let g = build_algebra(Series::A, 2).unwrap();
        let j = &g.simple_currents[g.sc_generators[0]];
        assert_eq!(g.apply_simple_current(j, &[0, 0], 5), vec![5, 0]);
        assert_eq!(g.apply_simple_current(j, &[5, 0], 5), vec![0, 5]);
    }

    #[test]
    fn simple_currents_preserve_extended_diagram() {
        for (s, r) in [
            (Series::A, 4),
            (Series::B, 7),
            (Series::C, 2),
            (Series::D, 10),
            (Series::D, 9),
            (Series::E, 6),
            (Series::E, 7),
        ] {
            let g = build_algebra(s, r).unwrap();
            let ext = g.extended_cartan();
            for perm in &g.simple_currents {
                for i in 0..=r {
                    for j in 0..=r {
                        assert_eq!(
                            ext[perm[i]][perm[j]], ext[i][j],
                            "{s}{r} perm {perm:?} at ({i},{j})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn marks_and_comarks_b_series() {
        let g = build_algebra(Series::B, 7).unwrap();
        assert_eq!(g.marks, vec![1, 2, 2, 2, 2, 2, 2]);
        assert_eq!(g.comarks, vec![1, 2, 2, 2, 2, 2, 1]);
        assert_eq!(g.dual_coxeter, 13);
    }

    #[test]
    fn g2_marks() {
        let g = build_algebra(Series::G, 2).unwrap();
        assert_eq!(g.marks, vec![2, 3]);
        assert_eq!(g.comarks, vec![2, 1]);
        assert_eq!(g.dual_coxeter, 4);
        assert_eq!(g.coxeter, 6);
    }

    #[test]
    fn spec_parsing_roundtrip() {
        for s in ["A1", "a4", "B7", "d12", "E7", "G2"] {
            let g = AlgebraData::parse_spec(s).unwrap();
            assert_eq!(
                g.spec_string().to_ascii_lowercase(),
                s.to_ascii_lowercase()
            );
        }
        assert!(AlgebraData::parse_spec("H3").is_err());
        assert!(AlgebraData::parse_spec("B1").is_err());
    }
}
