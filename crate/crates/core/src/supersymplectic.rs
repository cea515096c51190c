//! Graded symplectic linear algebra: Darboux bases, signatures of the odd
//! block, maximal isotropic subspaces, and the Heisenberg supergroup built on
//! top, with supernumber coordinates and Taylor extension of smooth maps.

use crate::error::{Error, Result};
use crate::grassmann::{gr_mul, GrassmannElement, IndexSubset};
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use ndarray::{Array1, Array2};

/// A graded bilinear form: skew-symmetric on the even block of size p,
/// symmetric on the odd block of size q, no cross terms.
#[derive(Clone, Debug)]
pub struct GradedForm {
    even: Array2<f64>,
    odd: Array2<f64>,
}

/// Result of a Darboux reduction: change-of-basis matrices with
/// Pᵀ·even·P the standard block form and Qᵀ·odd·Q = diag(±2).
#[derive(Clone, Debug)]
pub struct DarbouxBasis {
    pub even_transform: Array2<f64>,
    pub odd_transform: Array2<f64>,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl GradedForm {
    pub fn new(even: Array2<f64>, odd: Array2<f64>) -> Result<Self> {
        if !even.is_square() || !odd.is_square() {
            return Err(Error::DimensionMismatch("form blocks must be square".into()));
        }
        let tol = 1e-12
            * even
                .iter()
                .chain(odd.iter())
                .map(|x| x.abs())
                .fold(1.0, f64::max);
        for ((i, j), &v) in even.indexed_iter() {
            if (v + even[[j, i]]).abs() > tol {
                return Err(Error::InvalidParameter("even block is not skew".into()));
            }
        }
        for ((i, j), &v) in odd.indexed_iter() {
            if (v - odd[[j, i]]).abs() > tol {
                return Err(Error::InvalidParameter("odd block is not symmetric".into()));
            }
        }
        Ok(GradedForm { even, odd })
    }

    /// The standard form: even pairs ω(e_i,f_i) = 1, odd diagonal +2 (first
    /// `n_plus` slots) and −2.
    pub fn canonical(pairs: usize, n_plus: usize, n_minus: usize) -> Self {
        let p = 2 * pairs;
        let mut even = Array2::zeros((p, p));
        for k in 0..pairs {
            even[[2 * k, 2 * k + 1]] = 1.0;
            even[[2 * k + 1, 2 * k]] = -1.0;
        }
        let q = n_plus + n_minus;
        let mut odd = Array2::zeros((q, q));
        for k in 0..q {
            odd[[k, k]] = if k < n_plus { 2.0 } else { -2.0 };
        }
        GradedForm { even, odd }
    }

    pub fn even_dim(&self) -> usize {
        self.even.nrows()
    }

    pub fn odd_dim(&self) -> usize {
        self.odd.nrows()
    }

    pub fn even_block(&self) -> &Array2<f64> {
        &self.even
    }

    pub fn odd_block(&self) -> &Array2<f64> {
        &self.odd
    }

    /// Value of the form on two vectors of the full graded space, laid out
    /// as even coordinates followed by odd coordinates.
    pub fn pair(&self, u: &Array1<f64>, v: &Array1<f64>) -> Result<f64> {
        let (p, q) = (self.even_dim(), self.odd_dim());
        if u.len() != p + q || v.len() != p + q {
            return Err(Error::DimensionMismatch(format!(
                "vectors must have length {}",
                p + q
            )));
        }
        let ue = u.slice(ndarray::s![..p]).to_owned();
        let ve = v.slice(ndarray::s![..p]).to_owned();
        let uo = u.slice(ndarray::s![p..]).to_owned();
        let vo = v.slice(ndarray::s![p..]).to_owned();
        Ok(ue.dot(&self.even.dot(&ve)) + uo.dot(&self.odd.dot(&vo)))
    }

    /// Darboux reduction of both blocks. Fails with [`Error::DegenerateForm`]
    /// when a block is singular relative to `1e-10·max|entry|`.
    pub fn darboux_basis(&self) -> Result<DarbouxBasis> {
        let even_transform = darboux_even(&self.even)?;
        let (odd_transform, n_plus, n_minus) = diagonalize_odd(&self.odd)?;
        Ok(DarbouxBasis {
            even_transform,
            odd_transform,
            n_plus,
            n_minus,
        })
    }

    /// Sylvester signature (n₊, n₋) of the odd block scaled to ±2.
    pub fn signature(&self) -> Result<(usize, usize)> {
        let (_, np, nm) = diagonalize_odd(&self.odd)?;
        Ok((np, nm))
    }

    /// A maximal isotropic subspace: the first member of each even Darboux
    /// pair together with θ_k + η_k for k up to min(n₊, n₋). Vectors live in
    /// the full graded space.
    pub fn max_isotropic(&self) -> Result<Vec<Array1<f64>>> {
        let basis = self.darboux_basis()?;
        let (p, q) = (self.even_dim(), self.odd_dim());
        let mut out = Vec::new();
        for k in 0..p / 2 {
            let mut v = Array1::zeros(p + q);
            for i in 0..p {
                v[i] = basis.even_transform[[i, 2 * k]];
            }
            out.push(v);
        }
        for k in 0..basis.n_plus.min(basis.n_minus) {
            let mut v = Array1::zeros(p + q);
            for i in 0..q {
                v[p + i] =
                    basis.odd_transform[[i, k]] + basis.odd_transform[[i, basis.n_plus + k]];
            }
            out.push(v);
        }
        Ok(out)
    }
}

fn form_value(a: &Array2<f64>, u: &Array1<f64>, v: &Array1<f64>) -> f64 {
    u.dot(&a.dot(v))
}

/// Symplectic Gram-Schmidt on a skew form; columns of the result come in
/// Darboux pairs (u₁, v₁, u₂, v₂, …).
fn darboux_even(a: &Array2<f64>) -> Result<Array2<f64>> {
    let p = a.nrows();
    if p % 2 != 0 {
        return Err(Error::OddEvenDimension(p));
    }
    let tol = 1e-10 * a.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let mut pool: Vec<Array1<f64>> = (0..p)
        .map(|i| {
            let mut e = Array1::zeros(p);
            e[i] = 1.0;
            e
        })
        .collect();
    let mut columns: Vec<Array1<f64>> = Vec::new();
    while !pool.is_empty() {
        // Largest pairing decides the pivot pair.
        let mut best = (0usize, 0usize, 0.0f64);
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                let w = form_value(a, &pool[i], &pool[j]).abs();
                if w > best.2 {
                    best = (i, j, w);
                }
            }
        }
        if best.2 <= tol {
            return Err(Error::DegenerateForm);
        }
        let u = pool[best.0].clone();
        let scale = 1.0 / form_value(a, &u, &pool[best.1]);
        let v = pool[best.1].map(|x| x * scale);
        pool.remove(best.1);
        pool.remove(best.0);
        for w in pool.iter_mut() {
            let cu = form_value(a, &u, w);
            let cv = form_value(a, &v, w);
            *w = &*w + &u.map(|x| x * cv) - &v.map(|x| x * cu);
        }
        columns.push(u);
        columns.push(v);
    }
    let mut out = Array2::zeros((p, p));
    for (j, c) in columns.iter().enumerate() {
        for i in 0..p {
            out[[i, j]] = c[i];
        }
    }
    Ok(out)
}

/// Congruence diagonalization of a symmetric form with rescaling to ±2;
/// positive columns first. Returns (Q, n₊, n₋).
fn diagonalize_odd(b: &Array2<f64>) -> Result<(Array2<f64>, usize, usize)> {
    let q = b.nrows();
    let tol = 1e-10 * b.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let mut pool: Vec<Array1<f64>> = (0..q)
        .map(|i| {
            let mut e = Array1::zeros(q);
            e[i] = 1.0;
            e
        })
        .collect();
    let mut plus: Vec<Array1<f64>> = Vec::new();
    let mut minus: Vec<Array1<f64>> = Vec::new();
    while !pool.is_empty() {
        // Prefer a diagonal pivot; fall back to u+v when only off-diagonal
        // pairings survive.
        let mut idx = None;
        let mut best = tol;
        for (i, u) in pool.iter().enumerate() {
            let d = form_value(b, u, u).abs();
            if d > best {
                best = d;
                idx = Some(i);
            }
        }
        let u = match idx {
            Some(i) => pool.remove(i),
            None => {
                let mut found = None;
                'outer: for i in 0..pool.len() {
                    for j in i + 1..pool.len() {
                        if form_value(b, &pool[i], &pool[j]).abs() > tol {
                            found = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                let (i, j) = found.ok_or(Error::DegenerateForm)?;
                let u = &pool[i] + &pool[j];
                pool.remove(j);
                pool.remove(i);
                pool.push(u.clone());
                continue;
            }
        };
        let d = form_value(b, &u, &u);
        for w in pool.iter_mut() {
            let c = form_value(b, &u, w) / d;
            *w = &*w - &u.map(|x| x * c);
        }
        let scaled = u.map(|x| x * (2.0 / d.abs()).sqrt());
        if d > 0.0 {
            plus.push(scaled);
        } else {
            minus.push(scaled);
        }
    }
    let (np, nm) = (plus.len(), minus.len());
    let mut out = Array2::zeros((q, q));
    for (j, c) in plus.iter().chain(minus.iter()).enumerate() {
        for i in 0..q {
            out[[i, j]] = c[i];
        }
    }
    Ok((out, np, nm))
}

/// An even or odd supernumber: an element of an auxiliary Grassmann algebra
/// of `AUX_GENERATORS` generators (enough soul directions for the tests and
/// the group law; raise if a model needs more).
pub type SuperNumber<S> = GrassmannElement<S>;

pub const AUX_GENERATORS: usize = 4;

/// Element (x, a) of the Heisenberg supergroup over a graded form: x has one
/// supernumber coordinate per basis direction (even slots even, odd slots
/// odd), and a is the even central coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct HeisenbergElement<S: Scalar> {
    pub coords: Vec<SuperNumber<S>>,
    pub central: SuperNumber<S>,
}

impl<S: Scalar> HeisenbergElement<S> {
    pub fn new(coords: Vec<SuperNumber<S>>, central: SuperNumber<S>) -> Result<Self> {
        if central.parity() == Some(1) {
            return Err(Error::ParityMismatch("central coordinate must be even".into()));
        }
        Ok(HeisenbergElement { coords, central })
    }

    pub fn identity(dim: usize) -> Self {
        HeisenbergElement {
            coords: vec![GrassmannElement::zero(AUX_GENERATORS); dim],
            central: GrassmannElement::zero(AUX_GENERATORS),
        }
    }

    pub fn inverse(&self) -> Self {
        HeisenbergElement {
            coords: self.coords.iter().map(|c| c.scale(&-S::one())).collect(),
            central: self.central.scale(&-S::one()),
        }
    }
}

/// ω(x, y) with supernumber coordinates; the form matrix supplies the scalar
/// coefficients, the Grassmann algebra the (anti)commutation.
pub fn graded_pairing<S: Scalar>(
    form: &GradedForm,
    x: &[SuperNumber<S>],
    y: &[SuperNumber<S>],
) -> Result<SuperNumber<S>> {
    let (p, q) = (form.even_dim(), form.odd_dim());
    if x.len() != p + q || y.len() != p + q {
        return Err(Error::DimensionMismatch(format!(
            "coordinate vectors must have length {}",
            p + q
        )));
    }
    let coeff = |v: f64| -> Option<S> {
        if v == 0.0 {
            return None;
        }
        // Form entries are held as doubles; the canonical forms use ±1, ±2.
        crate::scalar::scalar_from_f64(v)
    };
    let mut acc = GrassmannElement::zero(AUX_GENERATORS);
    for i in 0..p {
        for j in 0..p {
            if let Some(c) = coeff(form.even[[i, j]]) {
                acc = acc.add(&gr_mul(&x[i], &y[j])?.scale(&c));
            }
        }
    }
    for i in 0..q {
        for j in 0..q {
            if let Some(c) = coeff(form.odd[[i, j]]) {
                acc = acc.add(&gr_mul(&x[p + i], &y[p + j])?.scale(&c));
            }
        }
    }
    Ok(acc)
}

/// Group law (x + aZ)(y + bZ) = (x + y) + (a + b + ½ω(x,y))Z.
pub fn heis_mul<S: Scalar>(
    form: &GradedForm,
    g: &HeisenbergElement<S>,
    h: &HeisenbergElement<S>,
) -> Result<HeisenbergElement<S>> {
    let coords = g
        .coords
        .iter()
        .zip(&h.coords)
        .map(|(a, b)| a.add(b))
        .collect();
    let omega = graded_pairing(form, &g.coords, &h.coords)?;
    let central = g
        .central
        .add(&h.central)
        .add(&omega.scale(&S::from_ratio(1, 2)));
    Ok(HeisenbergElement { coords, central })
}

/// Coadjoint action on functionals (μ, b):
/// Ad*_{(x,a)}(μ, b) = (μ − b·ω(x,·), b). Functionals are stored through the
/// same coordinate layout, with μ applied by the euclidean pairing.
pub fn coadjoint<S: Scalar>(
    form: &GradedForm,
    g: &HeisenbergElement<S>,
    mu: &[SuperNumber<S>],
    b: &SuperNumber<S>,
) -> Result<(Vec<SuperNumber<S>>, SuperNumber<S>)> {
    let dim = form.even_dim() + form.odd_dim();
    if mu.len() != dim || g.coords.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "functional must have length {dim}"
        )));
    }
    // ω(x,·) as a coordinate functional: component j is Σ_i x_i ω_{ij}.
    let mut out = Vec::with_capacity(dim);
    let (p, _q) = (form.even_dim(), form.odd_dim());
    for j in 0..dim {
        let mut omega_j = GrassmannElement::zero(AUX_GENERATORS);
        for i in 0..dim {
            let entry = if i < p && j < p {
                form.even[[i, j]]
            } else if i >= p && j >= p {
                form.odd[[i - p, j - p]]
            } else {
                0.0
            };
            if let Some(c) = crate::scalar::scalar_from_f64::<S>(entry) {
                omega_j = omega_j.add(&g.coords[i].scale(&c));
            }
        }
        let shift = gr_mul(b, &omega_j)?;
        out.push(mu[j].sub(&shift));
    }
    Ok((out, b.clone()))
}

/// Taylor extension of a polynomial map to supernumber arguments:
/// f(x₀ + s) = Σ_k ∂^k f(x₀)·s^k / k!, terminating by nilpotency of the
/// soul s. This is a genuinely different evaluation route from plain
/// Grassmann-algebra arithmetic and serves as its cross-check.
pub fn taylor_extend<S: Scalar>(
    f: &Polynomial<S>,
    point: &[SuperNumber<S>],
) -> Result<SuperNumber<S>> {
    if point.len() != f.nvars() {
        return Err(Error::DimensionMismatch(format!(
            "expected {} arguments",
            f.nvars()
        )));
    }
    let naux = point
        .first()
        .map(|g| g.n())
        .unwrap_or(AUX_GENERATORS);
    let mut bodies = Vec::with_capacity(point.len());
    let mut souls = Vec::with_capacity(point.len());
    for g in point {
        if g.parity() == Some(1) {
            return Err(Error::ParityMismatch(
                "arguments of an even map must be even supernumbers".into(),
            ));
        }
        let body = g.coeff(IndexSubset::EMPTY);
        let mut soul = g.clone();
        soul = soul.sub(&GrassmannElement::scalar(naux, body.clone()));
        bodies.push(body);
        souls.push(soul);
    }

    // Enumerate multi-indices k with k_i at most the variable degree; each
    // soul power is cached and pruned once it vanishes.
    let mut soul_powers: Vec<Vec<SuperNumber<S>>> = Vec::new();
    for (i, s) in souls.iter().enumerate() {
        let mut powers = vec![GrassmannElement::one(naux)];
        let max_deg = f
            .terms()
            .map(|(e, _)| e[i] as usize)
            .max()
            .unwrap_or(0);
        let mut acc = GrassmannElement::one(naux);
        for _ in 0..max_deg {
            acc = gr_mul(&acc, s)?;
            if acc.is_zero() {
                break;
            }
            powers.push(acc.clone());
        }
        soul_powers.push(powers);
    }

    let nvars = f.nvars();
    let mut total = GrassmannElement::zero(naux);
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
    while let Some((var, k)) = stack.pop() {
        if var == nvars {
            // ∂^k f / k! at the body point, times Π soulᵏ.
            let mut deriv = f.clone();
            let mut factorial = S::one();
            for (i, &ki) in k.iter().enumerate() {
                for step in 0..ki {
                    deriv = deriv.diff(i);
                    factorial = factorial * S::from_int(step as i64 + 1);
                }
            }
            if deriv.is_zero() {
                continue;
            }
            let scalar = deriv.eval(&bodies).div(&factorial);
            if scalar.is_zero() {
                continue;
            }
            let mut term = GrassmannElement::scalar(naux, scalar);
            for (i, &ki) in k.iter().enumerate() {
                term = gr_mul(&term, &soul_powers[i][ki])?;
            }
            total = total.add(&term);
            continue;
        }
        for ki in 0..soul_powers[var].len() {
            let mut next = k.clone();
            next.push(ki);
            stack.push((var + 1, next));
        }
    }
    Ok(total)
}
