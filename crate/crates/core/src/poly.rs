//! Sparse multivariate polynomials over a [`Scalar`] ring.

use crate::scalar::Scalar;
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<S: Scalar> {
    nvars: usize,
    terms: BTreeMap<Vec<u16>, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, S::one())
    }

    /// The variable x_i (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(exps, S::one());
        p
    }

    pub fn monomial(nvars: usize, exps: Vec<u16>, c: S) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(exps, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u16]) -> S {
        self.terms.get(exps).cloned().unwrap_or_else(S::zero)
    }

    fn add_term(&mut self, exps: Vec<u16>, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
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
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Partial derivative ∂/∂x_i.
    pub fn diff(&self, i: usize) -> Self {
        assert!(i < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[i] -= 1;
            out.add_term(exps, c.clone() * S::from_int(e[i] as i64));
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.conj());
        }
        out
    }

    pub fn eval(&self, point: &[S]) -> S {
        assert_eq!(point.len(), self.nvars);
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                term = term * x.powi(k as i64);
            }
            acc = acc + term;
        }
        acc
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::CRat;

    #[test]
    fn arithmetic_and_diff() {
        // (x+y)² = x² + 2xy + y², ∂x → 2x + 2y.
        let x = Polynomial::<CRat>::var(2, 0);
        let y = Polynomial::<CRat>::var(2, 1);
        let s = x.add(&y);
        let sq = s.mul(&s);
        assert_eq!(sq.coeff(&[1, 1]), CRat::from_int(2));
        let dx = sq.diff(0);
        assert_eq!(dx, s.scale(&CRat::from_int(2)));
    }

    #[test]
    fn eval_matches_expansion() {
        let x = Polynomial::<CRat>::var(1, 0);
        let p = x.mul(&x).add(&Polynomial::constant(1, CRat::from_int(3)));
        assert_eq!(p.eval(&[CRat::from_int(5)]), CRat::from_int(28));
    }
}
