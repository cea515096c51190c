//! Exact exterior-algebra engine over n odd generators.
//!
//! Basis elements θ^I are indexed by subsets I ⊆ {1..n}; a subset is stored
//! as an n-bit mask (bit k−1 ⇔ member k), which makes the reordering sign
//! ε(I,J) a popcount computation. All operations are exact over the chosen
//! coefficient ring and keep elements pruned of zero coefficients.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// Strictly increasing subset of {1..n}, stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct IndexSubset {
    mask: u32,
}

impl IndexSubset {
    pub const EMPTY: IndexSubset = IndexSubset { mask: 0 };

    pub fn from_mask(mask: u32) -> Self {
        IndexSubset { mask }
    }

    /// Build from 1-based members; rejects duplicates and non-positive entries.
    pub fn from_members(members: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &m in members {
            if m == 0 || m > 32 {
                return Err(Error::InvalidParameter(format!("member {m} out of range")));
            }
            let bit = 1u32 << (m - 1);
            if mask & bit != 0 {
                return Err(Error::InvalidParameter(format!("duplicate member {m}")));
            }
            mask |= bit;
        }
        Ok(IndexSubset { mask })
    }

    pub fn full(n: usize) -> Self {
        IndexSubset {
            mask: if n == 0 { 0 } else { (1u32 << n) - 1 },
        }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn members(&self) -> Vec<usize> {
        (0..32).filter(|b| self.mask >> b & 1 == 1).map(|b| b + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn complement(&self, n: usize) -> Self {
        IndexSubset {
            mask: Self::full(n).mask & !self.mask,
        }
    }

    pub fn valid_for(&self, n: usize) -> bool {
        self.mask & !Self::full(n).mask == 0
    }
}

/// Sign of merging θ^I·θ^J into θ^{I∪J}: zero on overlap, otherwise (−1) to
/// the number of transpositions needed to sort the concatenation of I and J.
pub fn eps(i: IndexSubset, j: IndexSubset) -> i32 {
    eps_mask(i.mask(), j.mask())
}

pub(crate) fn eps_mask(i: u32, j: u32) -> i32 {
    if i & j != 0 {
        return 0;
    }
    let mut transpositions = 0u32;
    let mut jj = j;
    while jj != 0 {
        let bit = jj.trailing_zeros();
        transpositions += (i >> (bit + 1)).count_ones();
        jj &= jj - 1;
    }
    if transpositions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Finite ℂ-linear combination of basis subsets of ⋀ℝⁿ.
#[derive(Clone, PartialEq, Debug)]
pub struct GrassmannElement<S: Scalar> {
    n: usize,
    coeffs: BTreeMap<u32, S>,
}

impl<S: Scalar> GrassmannElement<S> {
    pub fn zero(n: usize) -> Self {
        GrassmannElement {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::basis(n, IndexSubset::EMPTY)
    }

    pub fn scalar(n: usize, c: S) -> Self {
        let mut e = Self::zero(n);
        e.add_term(0, c);
        e
    }

    pub fn basis(n: usize, subset: IndexSubset) -> Self {
        assert!(subset.valid_for(n), "subset out of range for n={n}");
        let mut e = Self::zero(n);
        e.add_term(subset.mask(), S::one());
        e
    }

    /// Generator θ^k, 1-based.
    pub fn generator(n: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= n);
        Self::basis(n, IndexSubset::from_mask(1 << (k - 1)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, subset: IndexSubset) -> S {
        self.coeffs.get(&subset.mask()).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (IndexSubset, &S)> {
        self.coeffs.iter().map(|(&m, c)| (IndexSubset::from_mask(m), c))
    }

    pub(crate) fn add_term(&mut self, mask: u32, c: S) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(mask) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    o.insert(sum);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (&m, c) in &other.coeffs {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.n);
        for (&m, v) in &self.coeffs {
            out.add_term(m, v.clone() * c.clone());
        }
        out
    }

    /// Complex conjugation of coefficients; the generators stay real.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (&m, v) in &self.coeffs {
            out.add_term(m, v.conj());
        }
        out
    }

    /// Parity of the element if homogeneous, else `None`.
    pub fn parity(&self) -> Option<u8> {
        let mut p = None;
        for &m in self.coeffs.keys() {
            let q = (m.count_ones() % 2) as u8;
            match p {
                None => p = Some(q),
                Some(r) if r == q => {}
                _ => return None,
            }
        }
        p.or(Some(0))
    }
}

/// Product θ^I·θ^J = ε(I,J)θ^{I∪J}, extended bilinearly.
pub fn gr_mul<S: Scalar>(a: &GrassmannElement<S>, b: &GrassmannElement<S>) -> Result<GrassmannElement<S>> {
    if a.n != b.n {
        return Err(Error::MismatchedN(a.n, b.n));
    }
    let mut out = GrassmannElement::zero(a.n);
    for (&ma, ca) in &a.coeffs {
        for (&mb, cb) in &b.coeffs {
            let s = eps_mask(ma, mb);
            if s == 0 {
                continue;
            }
            let mut c = ca.clone() * cb.clone();
            if s < 0 {
                c = -c;
            }
            out.add_term(ma | mb, c);
        }
    }
    Ok(out)
}

/// Hodge operation ∗θ^I = ε(I,∁I)θ^{∁I}, extended linearly.
pub fn hodge<S: Scalar>(a: &GrassmannElement<S>) -> GrassmannElement<S> {
    let n = a.n;
    let mut out = GrassmannElement::zero(n);
    for (subset, c) in a.terms() {
        let comp = subset.complement(n);
        let s = eps(subset, comp);
        let mut v = c.clone();
        if s < 0 {
            v = -v;
        }
        out.add_term(comp.mask(), v);
    }
    out
}

/// Supersymmetric scalar product ⟨θ^I,θ^J⟩ = ε(I,∁I)δ_{J,∁I},
/// antilinear in the first argument.
pub fn super_scal<S: Scalar>(a: &GrassmannElement<S>, b: &GrassmannElement<S>) -> Result<S> {
    if a.n != b.n {
        return Err(Error::MismatchedN(a.n, b.n));
    }
    let mut acc = S::zero();
    for (subset, ca) in a.terms() {
        let comp = subset.complement(a.n);
        let cb = b.coeff(comp);
        if cb.is_zero() {
            continue;
        }
        let s = eps(subset, comp);
        let mut term = ca.conj() * cb;
        if s < 0 {
            term = -term;
        }
        acc = acc + term;
    }
    Ok(acc)
}

/// Positive definite scalar product (θ^I,θ^J) = δ_{I,J}.
pub fn pos_scal<S: Scalar>(a: &GrassmannElement<S>, b: &GrassmannElement<S>) -> Result<S> {
    if a.n != b.n {
        return Err(Error::MismatchedN(a.n, b.n));
    }
    let mut acc = S::zero();
    for (subset, ca) in a.terms() {
        acc = acc + ca.conj() * b.coeff(subset);
    }
    Ok(acc)
}

/// Berezin integral over all n generators: the coefficient of θ^{1..n}.
pub fn berezin<S: Scalar>(a: &GrassmannElement<S>) -> S {
    a.coeff(IndexSubset::full(a.n))
}

/// Berezin integral over the generators in `bank` only. The measure acts
/// from the left: terms are rewritten as θ^{bank}·θ^{rest} and the bank
/// factor is stripped, so ∫dξ ξ^{1..k}·(rest) = rest with no sign when the
/// bank occupies the lowest indices.
pub fn berezin_bank<S: Scalar>(a: &GrassmannElement<S>, bank: IndexSubset) -> GrassmannElement<S> {
    let bm = bank.mask();
    let mut out = GrassmannElement::zero(a.n);
    for (&m, c) in &a.coeffs {
        if m & bm != bm {
            continue;
        }
        let rest = m & !bm;
        let s = eps_mask(bm, rest);
        let mut v = c.clone();
        if s < 0 {
            v = -v;
        }
        out.add_term(rest, v);
    }
    out
}

/// Exponential of a nilpotent even element (every term of degree ≥ 2 and
/// even): the power series terminates.
pub fn exp_even<S: Scalar>(x: &GrassmannElement<S>) -> Result<GrassmannElement<S>> {
    for (subset, _) in x.terms() {
        if subset.len() < 2 || subset.len() % 2 != 0 {
            return Err(Error::InvalidParameter(
                "exp_even requires a nilpotent even argument".into(),
            ));
        }
    }
    let mut acc = GrassmannElement::one(x.n);
    let mut power = GrassmannElement::one(x.n);
    let mut factorial: i64 = 1;
    for k in 1..=(x.n as i64 / 2 + 1) {
        power = gr_mul(&power, x)?;
        if power.is_zero() {
            break;
        }
        factorial *= k;
        acc = acc.add(&power.scale(&S::from_ratio(1, factorial)));
    }
    Ok(acc)
}

/// e^{ic'ξ·ξ₀} = Σ_J (ic')^{|J|}(−1)^{|J|(|J|−1)/2} ξ^J ξ₀^J over 2n
/// generators: bank ξ occupies indices 1..n, bank ξ₀ indices n+1..2n.
pub fn odd_exp<S: Scalar>(cp: S, n: usize) -> GrassmannElement<S> {
    let mut out = GrassmannElement::zero(2 * n);
    let icp = S::i() * cp;
    for j in 0u32..1 << n {
        let k = j.count_ones() as u64;
        let mut c = icp.powi(k as i64);
        if (k * (k.wrapping_sub(1)) / 2) % 2 == 1 {
            c = -c;
        }
        out.add_term(j | j << n, c);
    }
    out
}

/// Odd Fourier transform F_β f(ξ₀) = ∫dξ e^{−(ia₀β/2)ω₁(ξ,ξ₀)} f(ξ) with
/// ω₁(ξ,ξ₀) = 2ξ·ξ₀, computed exactly via `odd_exp` and a bank Berezin
/// integral. Input and output live in ⋀ℝⁿ.
pub fn odd_fourier<S: Scalar>(f: &GrassmannElement<S>, beta: S, a0: S) -> Result<GrassmannElement<S>> {
    let n = f.n;
    let kernel = odd_exp(-(a0 * beta), n);
    // Lift f to the ξ bank (low indices) of the doubled algebra.
    let mut lifted = GrassmannElement::zero(2 * n);
    for (&m, c) in &f.coeffs {
        lifted.add_term(m, c.clone());
    }
    let product = gr_mul(&kernel, &lifted)?;
    let integrated = berezin_bank(&product, IndexSubset::full(n));
    let mut out = GrassmannElement::zero(n);
    for (&m, c) in &integrated.coeffs {
        debug_assert_eq!(m & IndexSubset::full(n).mask(), 0);
        out.add_term(m >> n, c.clone());
    }
    Ok(out)
}
