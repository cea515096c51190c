//! Rational-function coefficients for the symbolic field-theory verifier.
//!
//! Identities in this module family are stated over the parameter field
//! ℚ(i)(a, b, α, θ, M, λ): `a` and `b` are the components of the odd-sector
//! parameter η = a + bξ, α and θ the deformation parameters, M the mass and
//! λ the coupling. A [`RationalCoeff`] is a quotient of two multivariate
//! polynomials over exact Gaussian rationals, so every verdict downstream is
//! tolerance-free.

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::{CRat, Scalar, C64};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Number of parameter indeterminates and their fixed order.
pub const NVARS: usize = 6;
pub const VAR_NAMES: [&str; NVARS] = ["a", "b", "alpha", "theta", "M", "lambda"];

pub const VAR_A: usize = 0;
pub const VAR_B: usize = 1;
pub const VAR_ALPHA: usize = 2;
pub const VAR_THETA: usize = 3;
pub const VAR_M: usize = 4;
pub const VAR_LAMBDA: usize = 5;

type P = Polynomial<CRat>;

/// Leading (lexicographically largest) monomial of a nonzero polynomial.
fn leading(p: &P) -> (Vec<u16>, CRat) {
    p.terms()
        .max_by(|a, b| a.0.cmp(b.0))
        .map(|(e, c)| (e.clone(), c.clone()))
        .expect("leading monomial of zero polynomial")
}

/// Exact multivariate division: `Some(q)` with p = q·d when d divides p.
fn exact_div(p: &P, d: &P) -> Option<P> {
    if d.is_zero() {
        return None;
    }
    let (de, dc) = leading(d);
    let mut rem = p.clone();
    let mut quot = P::zero(NVARS);
    while !rem.is_zero() {
        let (re, rc) = leading(&rem);
        let mut qe = vec![0u16; NVARS];
        for v in 0..NVARS {
            if re[v] < de[v] {
                return None;
            }
            qe[v] = re[v] - de[v];
        }
        let qc = rc.div(&dc);
        let qterm = P::monomial(NVARS, qe, qc);
        rem = rem.sub(&qterm.mul(d));
        quot = quot.add(&qterm);
    }
    Some(quot)
}

/// Divide a polynomial by the monomial x^e (must divide every term).
fn div_monomial(p: &P, e: &[u16]) -> P {
    let mut out = P::zero(NVARS);
    for (exps, c) in p.terms() {
        let mut ne = vec![0u16; NVARS];
        for v in 0..NVARS {
            ne[v] = exps[v] - e[v];
        }
        out = out.add(&P::monomial(NVARS, ne, c.clone()));
    }
    out
}

fn min_exponents(p: &P) -> Vec<u16> {
    let mut min = vec![u16::MAX; NVARS];
    for (exps, _) in p.terms() {
        for v in 0..NVARS {
            min[v] = min[v].min(exps[v]);
        }
    }
    min
}

/// Multivariate rational function over ℚ(i) in the six model parameters.
///
/// Canonical form: common monomial content removed, the denominator's
/// leading coefficient normalized to 1, and the denominator cleared whenever
/// it divides the numerator exactly. Equality is decided by
/// cross-multiplication, so it does not depend on how far the reduction got.
#[derive(Clone)]
pub struct RationalCoeff {
    num: P,
    den: P,
}

impl RationalCoeff {
    fn make(num: P, den: P) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let mut r = RationalCoeff { num, den };
        r.reduce();
        r
    }

    pub fn from_poly(num: P) -> Self {
        RationalCoeff::make(num, P::one(NVARS))
    }

    /// The indeterminate with the given index (see the `VAR_*` constants).
    pub fn var(v: usize) -> Self {
        assert!(v < NVARS);
        RationalCoeff::from_poly(P::var(NVARS, v))
    }

    pub fn constant(c: CRat) -> Self {
        RationalCoeff::from_poly(P::constant(NVARS, c))
    }

    pub fn numerator(&self) -> &P {
        &self.num
    }

    pub fn denominator(&self) -> &P {
        &self.den
    }

    /// The odd diagonal structure constant Λ({1},{1}) = iαθ/(1+α)².
    pub fn lambda_diag() -> Self {
        let alpha = P::var(NVARS, VAR_ALPHA);
        let theta = P::var(NVARS, VAR_THETA);
        let one_plus = P::one(NVARS).add(&alpha);
        let num = alpha.mul(&theta).scale(&CRat::i());
        RationalCoeff::make(num, one_plus.mul(&one_plus))
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = P::one(NVARS);
            return;
        }
        // Common monomial content.
        let mn = min_exponents(&self.num);
        let md = min_exponents(&self.den);
        let common: Vec<u16> = (0..NVARS).map(|v| mn[v].min(md[v])).collect();
        if common.iter().any(|&e| e > 0) {
            self.num = div_monomial(&self.num, &common);
            self.den = div_monomial(&self.den, &common);
        }
        // Clear the denominator when it divides the numerator.
        if let Some(q) = exact_div(&self.num, &self.den) {
            self.num = q;
            self.den = P::one(NVARS);
        } else {
            // The only non-monomial denominator factor arising in this
            // calculus is (1+α); strip shared powers of it.
            let one_plus = P::one(NVARS).add(&P::var(NVARS, VAR_ALPHA));
            loop {
                match (exact_div(&self.num, &one_plus), exact_div(&self.den, &one_plus)) {
                    (Some(n), Some(d)) => {
                        self.num = n;
                        self.den = d;
                    }
                    _ => break,
                }
            }
        }
        // Normalize the denominator's leading coefficient to 1.
        let (_, lc) = leading(&self.den);
        if lc != CRat::one() {
            let inv = Scalar::inv(&lc);
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    /// Numeric evaluation at a parameter point, in variable order.
    pub fn eval(&self, point: &[C64; NVARS]) -> C64 {
        let at = |p: &P| -> C64 {
            let mut acc = C64::new(0.0, 0.0);
            for (exps, c) in p.terms() {
                let mut term = c.to_c64();
                for v in 0..NVARS {
                    for _ in 0..exps[v] {
                        term *= point[v];
                    }
                }
                acc += term;
            }
            acc
        };
        at(&self.num) / at(&self.den)
    }

    /// Substitute exact values for a subset of the variables.
    pub fn substitute(&self, assign: &[(usize, CRat)]) -> Result<Self> {
        let sub_poly = |p: &P| -> P {
            let mut out = P::zero(NVARS);
            for (exps, c) in p.terms() {
                let mut coeff = c.clone();
                let mut ne = exps.clone();
                for (v, value) in assign {
                    coeff = coeff * Scalar::powi(value, exps[*v] as i64);
                    ne[*v] = 0;
                }
                out = out.add(&P::monomial(NVARS, ne, coeff));
            }
            out
        };
        let den = sub_poly(&self.den);
        if den.is_zero() {
            return Err(Error::InvalidParameter(
                "substitution hits a pole of the coefficient".into(),
            ));
        }
        Ok(RationalCoeff::make(sub_poly(&self.num), den))
    }
}

impl PartialEq for RationalCoeff {
    fn eq(&self, other: &Self) -> bool {
        // a/b = c/d  iff  ad = cb; exact and gcd-independent.
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl fmt::Debug for RationalCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", poly_string(&self.num), poly_string(&self.den))
    }
}

/// Readable rendering used in proof reports.
pub fn poly_string(p: &P) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|a, b| b.0.cmp(a.0));
    for (exps, c) in terms {
        let mut t = format!("{}", c.to_c64());
        for v in 0..NVARS {
            match exps[v] {
                0 => {}
                1 => t.push_str(&format!("*{}", VAR_NAMES[v])),
                e => t.push_str(&format!("*{}^{}", VAR_NAMES[v], e)),
            }
        }
        parts.push(t);
    }
    parts.join(" + ")
}

impl Add for RationalCoeff {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        RationalCoeff::make(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl Sub for RationalCoeff {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for RationalCoeff {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        RationalCoeff::make(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl Neg for RationalCoeff {
    type Output = Self;
    fn neg(self) -> Self {
        RationalCoeff {
            num: self.num.scale(&-CRat::one()),
            den: self.den,
        }
    }
}

impl Scalar for RationalCoeff {
    fn zero() -> Self {
        RationalCoeff::from_poly(P::zero(NVARS))
    }
    fn one() -> Self {
        RationalCoeff::from_poly(P::one(NVARS))
    }
    fn i() -> Self {
        RationalCoeff::constant(CRat::i())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        RationalCoeff::constant(CRat::from_ratio(num, den))
    }
    /// Complex conjugation; all six parameters are real indeterminates.
    fn conj(&self) -> Self {
        RationalCoeff {
            num: self.num.conj(),
            den: self.den.conj(),
        }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn inv(&self) -> Self {
        assert!(!self.num.is_zero(), "inverse of the zero coefficient");
        RationalCoeff::make(self.den.clone(), self.num.clone())
    }
    fn to_c64(&self) -> C64 {
        // Meaningful for constants only; parameter-dependent coefficients
        // have no canonical numeric view.
        let constant = |p: &P| -> Option<C64> {
            let mut acc = C64::new(0.0, 0.0);
            for (exps, c) in p.terms() {
                if exps.iter().any(|&e| e != 0) {
                    return None;
                }
                acc += c.to_c64();
            }
            Some(acc)
        };
        match (constant(&self.num), constant(&self.den)) {
            (Some(n), Some(d)) => n / d,
            _ => C64::new(f64::NAN, f64::NAN),
        }
    }
    fn from_f64(x: f64) -> Option<Self> {
        crate::scalar::crat_from_f64(x).map(RationalCoeff::constant)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> RationalCoeff {
        RationalCoeff::var(VAR_A)
    }
    fn alpha() -> RationalCoeff {
        RationalCoeff::var(VAR_ALPHA)
    }

    #[test]
    fn field_axioms_on_sample_elements() {
        let x = a() * alpha() + RationalCoeff::from_ratio(3, 2);
        let y = RationalCoeff::lambda_diag() - a();
        let z = alpha() * alpha() + RationalCoeff::one();
        assert_eq!(
            (x.clone() + y.clone()) * z.clone(),
            x.clone() * z.clone() + y.clone() * z.clone()
        );
        assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
        assert_eq!(x.clone() - x.clone(), RationalCoeff::zero());
        let w = x.clone() * Scalar::inv(&y);
        assert_eq!(w * y, x);
    }

    #[test]
    fn reduction_cancels_common_factors() {
        // (1+alpha)^3 / (1+alpha)^2 collapses to a polynomial.
        let op = RationalCoeff::one() + alpha();
        let cube = op.clone() * op.clone() * op.clone();
        let square = op.clone() * op.clone();
        let q = cube * Scalar::inv(&square);
        assert_eq!(q.denominator().total_degree(), 0);
        assert_eq!(q, op);
    }

    #[test]
    fn lambda_diag_matches_the_n1_table() {
        use crate::starproduct::{lambda_closedform, DeformParams};
        // Evaluate the symbolic Λ-diagonal at numeric parameters and compare
        // with the structure-constant table at a0 = 1/theta.
        let theta = 0.4f64;
        let alpha_v = 1.7f64;
        let params = DeformParams::new(C64::new(1.0 / theta, 0.0), C64::new(alpha_v, 0.0)).unwrap();
        let table = lambda_closedform(1, &params).unwrap();
        let sub = crate::grassmann::IndexSubset::from_mask(1);
        let want = table.coefficient(sub, sub);
        let point = [
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(alpha_v, 0.0),
            C64::new(theta, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ];
        let got = RationalCoeff::lambda_diag().eval(&point);
        assert!((got - want).norm() <= 1e-14);
    }

    #[test]
    fn conjugation_flips_i_only() {
        let c = RationalCoeff::lambda_diag();
        assert_eq!(Scalar::conj(&c), -c.clone());
        let r = a() * a();
        assert_eq!(Scalar::conj(&r), r);
    }

    #[test]
    fn substitution_specializes_exactly() {
        let c = RationalCoeff::lambda_diag();
        let at_one = c
            .substitute(&[(VAR_ALPHA, CRat::one()), (VAR_THETA, CRat::one())])
            .unwrap();
        // i/4 at alpha = theta = 1.
        assert_eq!(at_one, RationalCoeff::from_ratio(1, 4) * RationalCoeff::i());
        assert!(c.substitute(&[(VAR_ALPHA, -CRat::one())]).is_err());
    }
}
