//! Deformation parameters, the odd structure constants Λ(I,J) computed two
//! independent ways, and the exact polynomial Moyal engine.
//!
//! The graded product factorizes as (f⋆g)_K = Σ_{IΔJ=K} Λ(I,J)·(f_I ⋆_θ g_J):
//! the even sector is a Moyal product at θ = 1/a₀ and the odd sector is the
//! table Λ. `lambda_bruteforce` expands the defining Berezin integral over 3n
//! generators; `lambda_closedform` evaluates the closed coefficient formula.
//! Their entrywise agreement is the central cross-check of the crate.

use crate::error::{Error, Result};
use crate::grassmann::{berezin_bank, eps, exp_even, gr_mul, GrassmannElement, IndexSubset};
use crate::poly::Polynomial;
use crate::scalar::{Scalar, C64};

/// Deformation data (a₀, α) with every derived constant recomputed on demand.
#[derive(Clone, Debug)]
pub struct DeformParams<S: Scalar> {
    a0: S,
    alpha: S,
}

impl<S: Scalar> DeformParams<S> {
    pub fn new(a0: S, alpha: S) -> Result<Self> {
        if a0.is_zero() {
            return Err(Error::InvalidParameter("a0 must be nonzero".into()));
        }
        if alpha.is_zero() || (alpha.clone() + S::one()).is_zero() {
            return Err(Error::InvalidParameter("alpha must avoid {0, -1}".into()));
        }
        Ok(DeformParams { a0, alpha })
    }

    pub fn a0(&self) -> S {
        self.a0.clone()
    }

    pub fn alpha(&self) -> S {
        self.alpha.clone()
    }

    pub fn theta(&self) -> S {
        self.a0.inv()
    }

    /// λ = −(α+1)²/(4α).
    pub fn lambda(&self) -> S {
        let ap1 = self.alpha.clone() + S::one();
        -(ap1.clone() * ap1).div(&(S::from_int(4) * self.alpha.clone()))
    }

    /// c = 4a₀λ = −a₀(1+α)²/α.
    pub fn c(&self) -> S {
        S::from_int(4) * self.a0.clone() * self.lambda()
    }

    /// r₁ = (ia₀)ⁿ(−1)^{n(n+1)/2}.
    pub fn r1(&self, n: usize) -> S {
        (S::i() * self.a0.clone()).powi(n as i64) * S::sign((n * (n + 1) / 2) as u64)
    }

    /// κ_odd = κ·(πθ)^m = (−1)ⁿαⁿ / (r₁(1+α)^{2n}): the odd remainder of the
    /// full normalization after the Moyal prefactor 1/(πθ)^m is factored out.
    pub fn kappa_odd(&self, n: usize) -> S {
        let ap1 = self.alpha.clone() + S::one();
        let num = S::sign(n as u64) * self.alpha.powi(n as i64);
        num.div(&(self.r1(n) * ap1.powi(2 * n as i64)))
    }

    /// The coefficient Λ({i},{i}) = iα/(a₀(1+α)²) of the n=1 table; the
    /// normalized odd generators are ξ̂ = ξ/√Λ.
    pub fn lambda_diag(&self) -> S {
        let ap1 = self.alpha.clone() + S::one();
        (S::i() * self.alpha.clone()).div(&(self.a0.clone() * ap1.clone() * ap1))
    }
}

impl DeformParams<C64> {
    /// r₀ = (π/a₀)^{m/2}; only meaningful for real a₀ > 0.
    pub fn r0(&self, m: usize) -> f64 {
        (std::f64::consts::PI / self.a0.re).powf(m as f64 / 2.0)
    }

    /// γ = (−1)ⁿ/(r₀r₁(1+α)ⁿ), the unit-compatibility normalization of Σ.
    pub fn gamma(&self, m: usize, n: usize) -> C64 {
        let ap1 = self.alpha + C64::one();
        let denom = C64::from_ratio(1, 1) * self.r0(m) * self.r1(n) * Scalar::powi(&ap1, n as i64);
        C64::sign(n as u64).div(&denom)
    }

    /// r = γ²r₁αⁿ, the square of Σ.
    pub fn r_const(&self, m: usize, n: usize) -> C64 {
        let g = self.gamma(m, n);
        g * g * self.r1(n) * Scalar::powi(&self.alpha, n as i64)
    }

    /// κ = γαⁿ/(r₀(1+α)ⁿ), the full normalization of the integral product.
    pub fn kappa(&self, m: usize, n: usize) -> C64 {
        let ap1 = self.alpha + C64::one();
        let denom = C64::from_ratio(1, 1) * self.r0(m) * Scalar::powi(&ap1, n as i64);
        self.gamma(m, n) * Scalar::powi(&self.alpha, n as i64) / denom
    }

    /// Resolution-of-identity constant C = r₀r₁2^{m/2}(−1)ⁿ.
    pub fn resolution_constant(&self, m: usize, n: usize) -> C64 {
        self.r1(n) * self.r0(m) * 2f64.powf(m as f64 / 2.0) * C64::sign(n as u64).re
    }
}

/// Table Λ(I,J) with target subset IΔJ.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants<S: Scalar> {
    n: usize,
    table: Vec<S>,
}

impl<S: Scalar> StructureConstants<S> {
    fn index(&self, i: IndexSubset, j: IndexSubset) -> usize {
        ((i.mask() as usize) << self.n) | j.mask() as usize
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficient(&self, i: IndexSubset, j: IndexSubset) -> S {
        self.table[self.index(i, j)].clone()
    }

    pub fn target(&self, i: IndexSubset, j: IndexSubset) -> IndexSubset {
        IndexSubset::from_mask(i.mask() ^ j.mask())
    }

    pub fn entries(&self) -> impl Iterator<Item = (IndexSubset, IndexSubset, &S)> {
        let n = self.n;
        self.table.iter().enumerate().map(move |(idx, c)| {
            (
                IndexSubset::from_mask((idx >> n) as u32),
                IndexSubset::from_mask((idx & ((1 << n) - 1)) as u32),
                c,
            )
        })
    }
}

/// Λ(I,J)·ξ^{IΔJ} = κ_odd ∫dξ₁dξ₂ ξ₁^I ξ₂^J e^{ic(ξ·ξ₁+ξ₁·ξ₂+ξ₂·ξ)},
/// expanded exactly over 3n generators and Berezin-integrated twice.
pub fn lambda_bruteforce<S: Scalar>(n: usize, params: &DeformParams<S>) -> Result<StructureConstants<S>> {
    let gens = 3 * n;
    let ic = S::i() * params.c();
    // Banks: ξ = bits 0..n, ξ₁ = bits n..2n, ξ₂ = bits 2n..3n.
    let mut phase = GrassmannElement::<S>::zero(gens);
    for p in 0..n {
        let xi = GrassmannElement::generator(gens, p + 1);
        let xi1 = GrassmannElement::generator(gens, n + p + 1);
        let xi2 = GrassmannElement::generator(gens, 2 * n + p + 1);
        let mut term = gr_mul(&xi, &xi1)?;
        term = term.add(&gr_mul(&xi1, &xi2)?);
        term = term.add(&gr_mul(&xi2, &xi)?);
        phase = phase.add(&term.scale(&ic));
    }
    let kernel = exp_even(&phase)?;
    let kappa_odd = params.kappa_odd(n);
    let bank1 = IndexSubset::from_mask(IndexSubset::full(n).mask() << n);
    let bank2 = IndexSubset::from_mask(IndexSubset::full(n).mask() << (2 * n));

    let mut table = vec![S::zero(); 1 << (2 * n)];
    for i_mask in 0u32..1 << n {
        for j_mask in 0u32..1 << n {
            let xi1_i = GrassmannElement::<S>::basis(gens, IndexSubset::from_mask(i_mask << n));
            let xi2_j = GrassmannElement::<S>::basis(gens, IndexSubset::from_mask(j_mask << (2 * n)));
            let integrand = gr_mul(&gr_mul(&xi1_i, &xi2_j)?, &kernel)?;
            let integrated = berezin_bank(&berezin_bank(&integrand, bank2), bank1);
            let target = i_mask ^ j_mask;
            for (subset, coeff) in integrated.terms() {
                if subset.mask() != target {
                    return Err(Error::InvalidParameter(format!(
                        "stray component {:?} in Lambda({i_mask:#b},{j_mask:#b})",
                        subset
                    )));
                }
                table[((i_mask as usize) << n) | j_mask as usize] =
                    kappa_odd.clone() * coeff.clone();
            }
        }
    }
    Ok(StructureConstants { n, table })
}

/// Closed-form coefficient: with D = I∩J and d = |D|,
/// Λ(I,J) = κ_odd·(ic)^{n−d}·(−1)^{d(d+1)/2+n(n+1)/2+|I|d}·ε(I∖D,J∖D)·ε(D,IΔJ).
pub fn lambda_closedform<S: Scalar>(n: usize, params: &DeformParams<S>) -> Result<StructureConstants<S>> {
    let ic = S::i() * params.c();
    let kappa_odd = params.kappa_odd(n);
    let mut table = vec![S::zero(); 1 << (2 * n)];
    for i_mask in 0u32..1 << n {
        for j_mask in 0u32..1 << n {
            let d_mask = i_mask & j_mask;
            let d = d_mask.count_ones() as u64;
            let card_i = i_mask.count_ones() as u64;
            let s1 = eps(
                IndexSubset::from_mask(i_mask & !d_mask),
                IndexSubset::from_mask(j_mask & !d_mask),
            );
            let s2 = eps(
                IndexSubset::from_mask(d_mask),
                IndexSubset::from_mask(i_mask ^ j_mask),
            );
            if s1 == 0 || s2 == 0 {
                return Err(Error::InvalidParameter("vanishing reorder sign".into()));
            }
            let mut coeff = ic.powi(n as i64 - d as i64)
                * S::sign(d * (d + 1) / 2 + (n as u64) * (n as u64 + 1) / 2 + card_i * d);
            if s1 * s2 < 0 {
                coeff = -coeff;
            }
            table[((i_mask as usize) << n) | j_mask as usize] = kappa_odd.clone() * coeff;
        }
    }
    Ok(StructureConstants { n, table })
}

/// Exact Weyl-ordered Moyal product on polynomials over ℝᵐ with the standard
/// symplectic pairing of consecutive coordinate pairs; terminating expansion
/// f⋆g = Σ_k (iθ/2)ᵏ/k! Πᵏ(f⊗g).
pub fn moyal_poly<S: Scalar>(f: &Polynomial<S>, g: &Polynomial<S>, theta: &S) -> Result<Polynomial<S>> {
    let m = f.nvars();
    if m != g.nvars() {
        return Err(Error::DimensionMismatch(format!(
            "polynomial variable counts {m} vs {}",
            g.nvars()
        )));
    }
    if m % 2 != 0 {
        return Err(Error::OddEvenDimension(m));
    }
    let half_itheta = S::i() * theta.clone() * S::from_ratio(1, 2);
    let mut acc = Polynomial::zero(m);
    let mut pairs: Vec<(Polynomial<S>, Polynomial<S>)> = vec![(f.clone(), g.clone())];
    let mut prefactor = S::one();
    let mut k: i64 = 0;
    while !pairs.is_empty() {
        for (p, q) in &pairs {
            acc = acc.add(&p.mul(q).scale(&prefactor));
        }
        k += 1;
        prefactor = prefactor * half_itheta.clone() * S::from_ratio(1, k);
        let mut next = Vec::new();
        for (p, q) in &pairs {
            for j in 0..m / 2 {
                let (a, b) = (2 * j, 2 * j + 1);
                let t1 = (p.diff(a), q.diff(b));
                if !t1.0.is_zero() && !t1.1.is_zero() {
                    next.push(t1);
                }
                let (dp, dq) = (p.diff(b), q.diff(a));
                if !dp.is_zero() && !dq.is_zero() {
                    next.push((dp.scale(&-S::one()), dq));
                }
            }
        }
        pairs = next;
    }
    Ok(acc)
}

/// x̃_μ as a polynomial: x̃ = (2/θ)ω(x,·) for the standard ω, so
/// x̃_{2j} = −(2/θ)x_{2j+1} and x̃_{2j+1} = (2/θ)x_{2j} (0-based μ).
pub fn xtilde_poly<S: Scalar>(m: usize, mu: usize, theta: &S) -> Polynomial<S> {
    assert!(mu < m && m % 2 == 0);
    let two_over_theta = S::from_int(2) * theta.inv();
    let (partner, sign) = if mu % 2 == 0 {
        (mu + 1, -S::one())
    } else {
        (mu - 1, S::one())
    };
    Polynomial::var(m, partner).scale(&(sign * two_over_theta))
}
