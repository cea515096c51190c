//! Functions on superspace: a Grassmann expansion Σ_I f_I(x)·ξ^I whose
//! coefficients live in an even algebra (exact polynomials or grid samples).
//!
//! The graded star product is assembled sectorwise,
//! (f⋆g)_K = Σ_{IΔJ=K} Λ(I,J)·(f_I ⋆_θ g_J),
//! with the even factor delegated to the backend and the odd table Λ taken
//! from [`crate::starproduct`].

use crate::error::{Error, Result};
use crate::grassmann::IndexSubset;
use crate::gridfn::{moyal_grid, GridFn2};
use crate::poly::Polynomial;
use crate::scalar::{Scalar, C64};
use crate::starproduct::{moyal_poly, StructureConstants};
use std::collections::BTreeMap;

/// Even coefficient algebra: what the body of a superfunction is made of.
pub trait EvenAlgebra: Clone {
    type Coef: Scalar;

    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: &Self::Coef) -> Self;
    /// The even (Moyal) product at deformation parameter θ.
    fn star(&self, other: &Self, theta: &Self::Coef) -> Result<Self>;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// ∫ over the even variables; not every backend supports it.
    fn integrate(&self) -> Result<Self::Coef>;
}

impl<S: Scalar> EvenAlgebra for Polynomial<S> {
    type Coef = S;

    fn add(&self, other: &Self) -> Self {
        Polynomial::add(self, other)
    }
    fn scale(&self, c: &S) -> Self {
        Polynomial::scale(self, c)
    }
    fn star(&self, other: &Self, theta: &S) -> Result<Self> {
        moyal_poly(self, other, theta)
    }
    fn conj(&self) -> Self {
        Polynomial::conj(self)
    }
    fn is_zero(&self) -> bool {
        Polynomial::is_zero(self)
    }
    fn integrate(&self) -> Result<S> {
        Err(Error::Unsupported(
            "polynomials are not integrable over the plane".into(),
        ))
    }
}

impl EvenAlgebra for GridFn2 {
    type Coef = C64;

    fn add(&self, other: &Self) -> Self {
        GridFn2::add(self, other)
    }
    fn scale(&self, c: &C64) -> Self {
        GridFn2::scale(self, *c)
    }
    fn star(&self, other: &Self, theta: &C64) -> Result<Self> {
        if theta.im != 0.0 {
            return Err(Error::InvalidParameter(
                "grid Moyal product needs a real theta".into(),
            ));
        }
        moyal_grid(self, other, theta.re)
    }
    fn conj(&self) -> Self {
        GridFn2::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
    fn integrate(&self) -> Result<C64> {
        Ok(GridFn2::integrate(self))
    }
}

/// Σ_I f_I ξ^I with n odd generators; absent components are zero.
#[derive(Clone, Debug)]
pub struct SuperFunction<B: EvenAlgebra> {
    n: usize,
    components: BTreeMap<u32, B>,
}

impl<B: EvenAlgebra> SuperFunction<B> {
    pub fn new(n: usize) -> Self {
        SuperFunction {
            n,
            components: BTreeMap::new(),
        }
    }

    pub fn from_component(n: usize, subset: IndexSubset, body: B) -> Self {
        let mut f = Self::new(n);
        f.set_component(subset, body);
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn component(&self, subset: IndexSubset) -> Option<&B> {
        self.components.get(&subset.mask())
    }

    pub fn set_component(&mut self, subset: IndexSubset, body: B) {
        assert!(subset.mask() < 1 << self.n, "subset out of range");
        if body.is_zero() {
            self.components.remove(&subset.mask());
        } else {
            self.components.insert(subset.mask(), body);
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (IndexSubset, &B)> {
        self.components
            .iter()
            .map(|(&m, b)| (IndexSubset::from_mask(m), b))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (subset, body) in other.components() {
            let merged = match out.component(subset) {
                Some(b) => b.add(body),
                None => body.clone(),
            };
            out.set_component(subset, merged);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-B::Coef::one()))
    }

    pub fn scale(&self, c: &B::Coef) -> Self {
        let mut out = Self::new(self.n);
        for (subset, body) in self.components() {
            out.set_component(subset, body.scale(c));
        }
        out
    }

    /// Coefficientwise conjugation; the odd monomials are self-conjugate
    /// under the graded involution.
    pub fn conj(&self) -> Self {
        let mut out = Self::new(self.n);
        for (subset, body) in self.components() {
            out.set_component(subset, body.conj());
        }
        out
    }

    /// 0 or 1 if every nonzero component has the same parity, None otherwise.
    pub fn parity(&self) -> Option<u32> {
        let mut parity = None;
        for (subset, _) in self.components() {
            let p = subset.len() as u32 % 2;
            match parity {
                None => parity = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        parity
    }
}

/// The graded star product. `lambda` must be a table for the same n; θ is the
/// even deformation parameter (θ = 1/a₀ for matching conventions).
pub fn super_star<B: EvenAlgebra>(
    f: &SuperFunction<B>,
    g: &SuperFunction<B>,
    lambda: &StructureConstants<B::Coef>,
    theta: &B::Coef,
) -> Result<SuperFunction<B>> {
    if f.n != g.n || f.n != lambda.n() {
        return Err(Error::MismatchedN(f.n, g.n.max(lambda.n())));
    }
    let mut out: SuperFunction<B> = SuperFunction::new(f.n);
    for (i, bi) in f.components() {
        for (j, bj) in g.components() {
            let coeff = lambda.coefficient(i, j);
            if coeff.is_zero() {
                continue;
            }
            let prod = bi.star(bj, theta)?.scale(&coeff);
            let k = lambda.target(i, j);
            let merged = match out.component(k) {
                Some(b) => b.add(&prod),
                None => prod,
            };
            out.set_component(k, merged);
        }
    }
    Ok(out)
}

/// Supertrace: Berezin integration keeps only the top component,
/// str(f) = ∫dx f_{1..n}(x).
pub fn supertrace_fn<B: EvenAlgebra>(f: &SuperFunction<B>) -> Result<B::Coef> {
    match f.component(IndexSubset::full(f.n)) {
        Some(body) => body.integrate(),
        None => Ok(B::Coef::zero()),
    }
}

/// Twisted trace: the body integral ∫dx f_∅(x).
pub fn twisted_trace<B: EvenAlgebra>(f: &SuperFunction<B>) -> Result<B::Coef> {
    match f.component(IndexSubset::EMPTY) {
        Some(body) => body.integrate(),
        None => Ok(B::Coef::zero()),
    }
}
