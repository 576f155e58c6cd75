//! Independence of linear forms versus the characteristic-function equation,
//! both decided by enumeration.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cyclotomic::{Cyclo, CyclotomicRing};
use super::dist::{idempotent_classify, random_dist, Dist, Profile};
use super::group::{AutMatrix, FiniteGroup};
use crate::error::{Error, Result};

/// Default cap on `|G|^n`.
pub const DEFAULT_TUPLE_CAP: u64 = 1_000_000;

/// `n×n` matrix of endomorphisms of `G`; row `j` is the form
/// `L_j = Σ_i α_ij ξ_i`, with `α_ij` stored at `[j][i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteForms {
    pub rows: Vec<Vec<AutMatrix>>,
}

impl FiniteForms {
    pub fn new(g: &FiniteGroup, rows: Vec<Vec<AutMatrix>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParams("forms must be square and nonempty".into()));
        }
        for (j, row) in rows.iter().enumerate() {
            for (i, a) in row.iter().enumerate() {
                AutMatrix::new(g, a.entries.clone()).map_err(|_| Error::NotHomomorphism { row: j, col: i })?;
            }
        }
        Ok(Self { rows })
    }

    /// Integer coefficients acting as scalars.
    pub fn scalars(g: &FiniteGroup, coeffs: &[Vec<i64>]) -> Result<Self> {
        let rows = coeffs.iter().map(|r| r.iter().map(|&k| AutMatrix::scalar(g, k)).collect()).collect();
        Self::new(g, rows)
    }

    /// `ξ1+ξ2+ξ3, ξ1-ξ2+ξ3, ξ1-ξ2-ξ3`.
    pub fn three_forms(g: &FiniteGroup) -> Self {
        Self::scalars(g, &[vec![1, 1, 1], vec![1, -1, 1], vec![1, -1, -1]]).expect("scalars are homomorphisms")
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn all_automorphisms(&self, g: &FiniteGroup) -> bool {
        self.rows.iter().flatten().all(|a| a.is_automorphism(g))
    }

    /// First row and column are the identity.
    pub fn is_normalized(&self, g: &FiniteGroup) -> bool {
        let id = AutMatrix::scalar(g, 1);
        let same = |a: &AutMatrix| a.table(g) == id.table(g);
        self.rows[0].iter().all(same) && self.rows.iter().all(|r| same(&r[0]))
    }
}

fn check_budget(g: &FiniteGroup, n: usize, cap: u64) -> Result<u64> {
    let total = (g.order() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(Error::BudgetExceeded { points: total, cap });
    }
    Ok(total as u64)
}

fn check_shape(dists: &[Dist], forms: &FiniteForms) -> Result<()> {
    if dists.len() != forms.n() {
        return Err(Error::InvalidParams(format!("{} distributions for {} forms", dists.len(), forms.n())));
    }
    Ok(())
}

/// `μ̂(y) = Σ_x p(x)·(x, y)` for every character index `y`.
pub fn char_fn(g: &FiniteGroup, d: &Dist) -> Vec<Complex64> {
    let m = g.exponent() as f64;
    let total = d.total() as f64;
    let support = d.support();
    g.elements()
        .map(|y| {
            let mut acc = Complex64::zero();
            for &i in &support {
                let e = g.pairing(&g.element(i), &y) as f64;
                let angle = 2.0 * core::f64::consts::PI * e / m;
                acc += Complex64::new(libm::cos(angle), libm::sin(angle)) * d.weights()[i] as f64;
            }
            acc / total
        })
        .collect()
}

/// `total(d)·μ̂(y)` in `Z[ζ_M]`, `M` the exponent of `G`.
pub fn char_fn_exact(g: &FiniteGroup, d: &Dist, ring: &CyclotomicRing) -> Result<Vec<Cyclo>> {
    let support = d.support();
    g.elements()
        .map(|y| {
            let mut counts = vec![0i128; ring.order()];
            for &i in &support {
                counts[g.pairing(&g.element(i), &y) as usize] += d.weights()[i] as i128;
            }
            ring.from_exponents(&counts)
        })
        .collect()
}

/// Whether `L_1, …, L_n` are independent, from the exact joint law.
pub fn joint_independence_check(g: &FiniteGroup, dists: &[Dist], forms: &FiniteForms, cap: u64) -> Result<bool> {
    check_shape(dists, forms)?;
    let n = forms.n();
    let total = check_budget(g, n, cap)? as usize;
    let order = g.order();
    let tables: Vec<Vec<Vec<usize>>> = forms.rows.iter().map(|r| r.iter().map(|a| a.table(g)).collect()).collect();
    let overflow = || Error::InvalidParams("joint law overflowed i128".into());

    // joint[z] and marginals, all as integers over T = ∏ total_i
    let mut joint = vec![0i128; total];
    let mut marg = vec![vec![0i128; order]; n];
    let supports: Vec<Vec<usize>> = dists.iter().map(Dist::support).collect();
    let mut pick = vec![0usize; n];
    'tuples: loop {
        let mut w = 1i128;
        for (i, &k) in pick.iter().enumerate() {
            w = w.checked_mul(dists[i].weights()[supports[i][k]] as i128).ok_or_else(overflow)?;
        }
        let mut z = 0usize;
        for (j, row) in tables.iter().enumerate() {
            let mut acc = 0usize;
            for (i, table) in row.iter().enumerate() {
                acc = g.add_idx(acc, table[supports[i][pick[i]]]);
            }
            marg[j][acc] += w;
            z = z * order + acc;
        }
        joint[z] += w;
        for i in (0..n).rev() {
            pick[i] += 1;
            if pick[i] < supports[i].len() {
                continue 'tuples;
            }
            pick[i] = 0;
        }
        break;
    }

    let t: i128 = dists.iter().try_fold(1i128, |acc, d| acc.checked_mul(d.total() as i128)).ok_or_else(overflow)?;
    let t_pow = (1..n).try_fold(1i128, |acc, _| acc.checked_mul(t)).ok_or_else(overflow)?;
    let mut z_digits = vec![0usize; n];
    for cell in joint.iter() {
        let lhs = cell.checked_mul(t_pow).ok_or_else(overflow)?;
        let mut rhs = 1i128;
        for (j, &d) in z_digits.iter().enumerate() {
            rhs = rhs.checked_mul(marg[j][d]).ok_or_else(overflow)?;
        }
        if lhs != rhs {
            return Ok(false);
        }
        for i in (0..n).rev() {
            z_digits[i] += 1;
            if z_digits[i] < order {
                break;
            }
            z_digits[i] = 0;
        }
    }
    Ok(true)
}

/// How [`sd_equation_check`] compares values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exactness {
    /// In `Z[ζ_M]`, no tolerance.
    Exact,
    /// Complex floating point with the given tolerance.
    Float(f64),
}

/// Whether `∏_i μ̂_i(Σ_j α̃_ij u_j) = ∏_i ∏_j μ̂_i(α̃_ij u_j)` for every
/// tuple of characters.
pub fn sd_equation_check(
    g: &FiniteGroup,
    dists: &[Dist],
    forms: &FiniteForms,
    exactness: Exactness,
    cap: u64,
) -> Result<bool> {
    check_shape(dists, forms)?;
    let n = forms.n();
    check_budget(g, n, cap)?;
    // adj[i][j] = table of α̃_ij
    let adj: Vec<Vec<Vec<usize>>> =
        (0..n).map(|i| (0..n).map(|j| forms.rows[j][i].adjoint(g).table(g)).collect()).collect();
    match exactness {
        Exactness::Float(tol) => {
            let hats: Vec<Vec<Complex64>> = dists.iter().map(|d| char_fn(g, d)).collect();
            for_each_tuple(g.order(), n, |u| {
                let mut lhs = Complex64::new(1.0, 0.0);
                let mut rhs = Complex64::new(1.0, 0.0);
                for i in 0..n {
                    let mut arg = 0;
                    for (j, &uj) in u.iter().enumerate() {
                        let v = adj[i][j][uj];
                        arg = g.add_idx(arg, v);
                        rhs *= hats[i][v];
                    }
                    lhs *= hats[i][arg];
                }
                Ok((lhs - rhs).norm() <= tol)
            })
        }
        Exactness::Exact => {
            let ring = CyclotomicRing::new(g.exponent() as usize);
            let hats: Vec<Vec<Cyclo>> = dists.iter().map(|d| char_fn_exact(g, d, &ring)).collect::<Result<_>>()?;
            // lhs carries ∏ total_i, rhs ∏ total_i^n
            let mut lift = 1i128;
            for d in dists {
                for _ in 1..n {
                    lift = lift
                        .checked_mul(d.total() as i128)
                        .ok_or_else(|| Error::InvalidParams("normalisation overflowed i128".into()))?;
                }
            }
            for_each_tuple(g.order(), n, |u| {
                let mut lhs = ring.from_integer(lift);
                let mut rhs = ring.from_integer(1);
                for i in 0..n {
                    let mut arg = 0;
                    for (j, &uj) in u.iter().enumerate() {
                        let v = adj[i][j][uj];
                        arg = g.add_idx(arg, v);
                        rhs = ring.mul(&rhs, &hats[i][v])?;
                    }
                    lhs = ring.mul(&lhs, &hats[i][arg])?;
                }
                Ok(lhs == rhs)
            })
        }
    }
}

/// Runs `check` on every `n`-tuple of indices below `radix`, stopping at
/// the first `false`.
fn for_each_tuple(radix: usize, n: usize, mut check: impl FnMut(&[usize]) -> Result<bool>) -> Result<bool> {
    let mut u = vec![0usize; n];
    loop {
        if !check(&u)? {
            return Ok(false);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(true);
            }
            i -= 1;
            u[i] += 1;
            if u[i] < radix {
                break;
            }
            u[i] = 0;
        }
    }
}

/// Both sides of the equivalence on one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Equivalence {
    pub independent: bool,
    pub equation_exact: bool,
    pub equation_float: bool,
}

impl Equivalence {
    pub fn agrees(&self) -> bool {
        self.independent == self.equation_exact && self.independent == self.equation_float
    }
}

pub fn equivalence_test(g: &FiniteGroup, dists: &[Dist], forms: &FiniteForms, cap: u64) -> Result<Equivalence> {
    Ok(Equivalence {
        independent: joint_independence_check(g, dists, forms, cap)?,
        equation_exact: sd_equation_check(g, dists, forms, Exactness::Exact, cap)?,
        equation_float: sd_equation_check(g, dists, forms, Exactness::Float(1e-9), cap)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub dists: Vec<Dist>,
    pub forms: FiniteForms,
}

/// Reproducible instance with `n` forms whose coefficients are scalar units.
///
/// The distributions are, with equal odds: shifts of the Haar distribution
/// of one random cyclic subgroup; each independently degenerate or Haar on
/// `G`; or random draws from [`random_dist`].
pub fn random_instance(g: &FiniteGroup, n: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = g.order();
    let units: Vec<i64> = (1..g.exponent() as i64).filter(|k| num_integer::Integer::gcd(k, &(g.exponent() as i64)) == 1).collect();
    let coeffs: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| units[rng.gen_range(0..units.len())]).collect()).collect();
    let forms = FiniteForms::scalars(g, &coeffs).expect("scalars are homomorphisms");
    let dists = match rng.gen_range(0..3) {
        0 => {
            let k = g.element(rng.gen_range(0..order));
            (0..n).map(|_| Dist::shifted_haar(g, core::slice::from_ref(&k), &g.element(rng.gen_range(0..order)))).collect()
        }
        1 => (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Dist::haar(g)
                } else {
                    Dist::degenerate(g, &g.element(rng.gen_range(0..order)))
                }
            })
            .collect(),
        _ => (0..n)
            .map(|_| {
                let profile = if rng.gen_bool(0.5) { Profile::Dirichlet } else { Profile::Sparse };
                random_dist(g, rng.gen(), profile)
            })
            .collect(),
    };
    Instance { dists, forms }
}

/// A random distribution that is not a shift of a Haar distribution, found
/// by redrawing from the seed stream.
pub fn random_non_idempotent(g: &FiniteGroup, seed: u64) -> Dist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let profile = if rng.gen_bool(0.5) { Profile::Dirichlet } else { Profile::Sparse };
        let d = random_dist(g, rng.gen(), profile);
        if !idempotent_classify(g, &d).is_shifted_idempotent {
            return d;
        }
    }
}
