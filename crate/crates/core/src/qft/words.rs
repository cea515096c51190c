//! Star words and the inner-derivation rewrite system.
//!
//! A [`StarWord`] is an ordered product of atomic field tokens joined by the
//! deformed product; a [`FormalExpr`] is a linear combination of words times
//! an optional odd generator ξ (the n = 1 odd sector), with
//! [`RationalCoeff`] coefficients.
//!
//! The rewrite system eliminates bare multiplier tokens x̃_μ using the exact
//! first-order expansion of the Moyal product with a linear symbol,
//!   x̃_μ ⋆ φ = x̃_μφ + i ∂_μφ,     φ ⋆ x̃_μ = x̃_μφ − i ∂_μφ,
//! so the commutator yields 2i∂_μφ and the anticommutator 2x̃_μφ. A redex is
//! an x̃_μ token with exactly one unambiguous φ neighbor; the doubly flanked
//! patterns φ·x̃·φ and x̃·φ·x̃ are left alone (word-level rewriting cannot
//! pick an association order there, and no expression built by the verifier
//! produces them). Distinct redexes then share no tokens, so the system has
//! no critical pairs and is confluent.

use super::ratfn::RationalCoeff;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// Atomic factors. The μ tag names the spatial direction; every identity
/// here is verified direction by direction, with the sum over μ restored by
/// the trace axioms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Token {
    /// The scalar field φ.
    Phi,
    /// ∂_μφ.
    DPhi(u8),
    /// The pointwise product x̃_μφ.
    XPhi(u8),
    /// The bare multiplier x̃_μ.
    X(u8),
    /// The opaque even star square (φ⋆φ).
    PhiPhi,
}

/// An ordered ⋆-product of tokens; the empty word is the unit.
pub type StarWord = Vec<Token>;

/// Linear combination of (word, ξ-power) with rational-function
/// coefficients; the odd sector has the single generator ξ of n = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalExpr {
    terms: BTreeMap<(StarWord, u8), RationalCoeff>,
}

impl FormalExpr {
    pub fn zero() -> Self {
        FormalExpr {
            terms: BTreeMap::new(),
        }
    }

    pub fn term(word: StarWord, xi: u8, coeff: RationalCoeff) -> Self {
        let mut e = FormalExpr::zero();
        e.accumulate(word, xi, coeff);
        e
    }

    pub fn one() -> Self {
        FormalExpr::term(Vec::new(), 0, RationalCoeff::one())
    }

    fn accumulate(&mut self, word: StarWord, xi: u8, coeff: RationalCoeff) {
        assert!(xi <= 1, "odd sector has a single generator");
        if coeff.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry((word, xi))
            .or_insert_with(RationalCoeff::zero);
        *entry = entry.clone() + coeff;
        // Prune exact cancellations to keep the form canonical.
        let keys: Vec<_> = self
            .terms
            .iter()
            .filter(|(_, c)| c.is_zero())
            .map(|(k, _)| k.clone())
            .collect();
        for k in keys {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&StarWord, u8, &RationalCoeff)> {
        self.terms.iter().map(|((w, x), c)| (w, *x, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &StarWord, xi: u8) -> RationalCoeff {
        self.terms
            .get(&(word.clone(), xi))
            .cloned()
            .unwrap_or_else(RationalCoeff::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((w, x), c) in &other.terms {
            out.accumulate(w.clone(), *x, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-RationalCoeff::one()))
    }

    pub fn scale(&self, c: &RationalCoeff) -> Self {
        let mut out = FormalExpr::zero();
        for ((w, x), v) in &self.terms {
            out.accumulate(w.clone(), *x, v.clone() * c.clone());
        }
        out
    }

    /// The part with the given ξ-power.
    pub fn sector(&self, xi: u8) -> Self {
        let mut out = FormalExpr::zero();
        for ((w, x), v) in &self.terms {
            if *x == xi {
                out.accumulate(w.clone(), *x, v.clone());
            }
        }
        out
    }

    /// Componentwise complex conjugation of a real-field expression: the
    /// coefficients are conjugated and each word is reversed (the even
    /// factors φ, ∂φ, x̃φ, φ⋆φ are real, and conjugation reverses the
    /// deformed product).
    pub fn conj(&self) -> Self {
        let mut out = FormalExpr::zero();
        for ((w, x), v) in &self.terms {
            let mut rw = w.clone();
            rw.reverse();
            out.accumulate(rw, *x, Scalar::conj(v));
        }
        out
    }
}

/// The n = 1 deformed product at the expression level:
/// (A + Bξ) ⋆ (C + Dξ) = A⋆C + Λ₁₁ B⋆D + (A⋆D + B⋆C)ξ, with the even
/// factors multiplied by word concatenation and Λ₁₁ = iαθ/(1+α)².
pub fn super_expand(e1: &FormalExpr, e2: &FormalExpr) -> FormalExpr {
    super_expand_channels(e1, e2, true)
}

/// Same as [`super_expand`] with the odd×odd channel optionally dropped;
/// the flag exists to expose the quantum correction ξ⋆ξ = Λ₁₁ separately
/// (in the undeformed superalgebra that square is identically zero).
pub fn super_expand_channels(e1: &FormalExpr, e2: &FormalExpr, odd_channel: bool) -> FormalExpr {
    let lambda = RationalCoeff::lambda_diag();
    let mut out = FormalExpr::zero();
    for ((w1, x1), c1) in &e1.terms {
        for ((w2, x2), c2) in &e2.terms {
            let mut word = w1.clone();
            word.extend_from_slice(w2);
            let coeff = c1.clone() * c2.clone();
            match (x1, x2) {
                (0, 0) => out.accumulate(word, 0, coeff),
                (1, 1) => {
                    if odd_channel {
                        out.accumulate(word, 0, coeff * lambda.clone());
                    }
                }
                _ => out.accumulate(word, 1, coeff),
            }
        }
    }
    out
}

/// ⋆-commutator. With `graded`, homogeneous components anticommute when
/// both are odd (parity = ξ-degree, the field factors all being even
/// functions); without it, the bracket is A⋆B − B⋆A throughout.
pub fn star_commutator(e1: &FormalExpr, e2: &FormalExpr, graded: bool) -> FormalExpr {
    let forward = super_expand(e1, e2);
    let mut backward = FormalExpr::zero();
    for x1 in 0..2u8 {
        for x2 in 0..2u8 {
            let block = super_expand(&e2.sector(x2), &e1.sector(x1));
            let sign = if graded && x1 == 1 && x2 == 1 {
                RationalCoeff::one()
            } else {
                -RationalCoeff::one()
            };
            backward = backward.add(&block.scale(&sign));
        }
    }
    forward.add(&backward)
}

/// One-step redexes of the inner-derivation rules in a word: the positions
/// at which a bare x̃ token touches an unambiguous φ neighbor.
fn redexes(word: &StarWord) -> Vec<usize> {
    let mut out = Vec::new();
    for (p, t) in word.iter().enumerate() {
        if let Token::X(_) = t {
            let left_phi = p > 0 && word[p - 1] == Token::Phi;
            let right_phi = p + 1 < word.len() && word[p + 1] == Token::Phi;
            if left_phi ^ right_phi {
                // A φ flanked by two x̃ tokens is claimed by both; neither
                // contraction is a redex, for the same reason as φ·x̃·φ.
                let q = if left_phi { p - 1 } else { p + 1 };
                let beyond = if left_phi {
                    q.checked_sub(1).map(|i| word[i])
                } else {
                    word.get(q + 1).copied()
                };
                if !matches!(beyond, Some(Token::X(_))) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Rewrite the redex at `pos` in `word`, producing the two-term result.
fn apply_rule(word: &StarWord, pos: usize) -> Result<FormalExpr> {
    let mu = match word[pos] {
        Token::X(mu) => mu,
        _ => return Err(Error::InvalidParameter("no x-tilde token at redex".into())),
    };
    let left_phi = pos > 0 && word[pos - 1] == Token::Phi;
    let (phi_at, deriv_sign) = if left_phi {
        // φ ⋆ x̃ = x̃φ − i∂φ.
        (pos - 1, -RationalCoeff::i())
    } else {
        // x̃ ⋆ φ = x̃φ + i∂φ.
        (pos + 1, RationalCoeff::i())
    };
    let splice = |replacement: Token| -> StarWord {
        let (lo, hi) = (pos.min(phi_at), pos.max(phi_at));
        let mut w = Vec::with_capacity(word.len() - 1);
        w.extend_from_slice(&word[..lo]);
        w.push(replacement);
        w.extend_from_slice(&word[hi + 1..]);
        w
    };
    let mut out = FormalExpr::term(splice(Token::XPhi(mu)), 0, RationalCoeff::one());
    out = out.add(&FormalExpr::term(splice(Token::DPhi(mu)), 0, deriv_sign));
    Ok(out)
}

/// Normal form under the inner-derivation rules. `pick` selects which redex
/// to contract when several are available (0 is a deterministic choice;
/// randomized schedules exercise confluence).
pub fn rewrite_linear_star_with(
    e: &FormalExpr,
    mut pick: impl FnMut(usize) -> usize,
) -> Result<FormalExpr> {
    let mut done = FormalExpr::zero();
    let mut pending = e.clone();
    let mut guard = 0usize;
    while !pending.is_zero() {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::InvalidParameter(
                "rewriting failed to terminate".into(),
            ));
        }
        // Take one term and contract one redex, or emit it when normal.
        let ((word, xi), coeff) = {
            let (k, v) = pending.terms.iter().next().unwrap();
            (k.clone(), v.clone())
        };
        pending.terms.remove(&(word.clone(), xi));
        let reds = redexes(&word);
        if reds.is_empty() {
            done.accumulate(word, xi, coeff);
        } else {
            let pos = reds[pick(reds.len()) % reds.len()];
            let expanded = apply_rule(&word, pos)?;
            for ((w, _), c) in &expanded.terms {
                pending.accumulate(w.clone(), xi, c.clone() * coeff.clone());
            }
        }
    }
    Ok(done)
}

/// Deterministic normal form (leftmost redex first).
pub fn rewrite_linear_star(e: &FormalExpr) -> Result<FormalExpr> {
    rewrite_linear_star_with(e, |_| 0)
}

/// Render an expression for reports: sorted terms "coeff · w1*w2 [ξ]".
pub fn expr_string(e: &FormalExpr) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (word, xi, coeff) in e.terms() {
        let w = if word.is_empty() {
            "1".to_string()
        } else {
            word.iter()
                .map(|t| format!("{t:?}"))
                .collect::<Vec<_>>()
                .join("*")
        };
        let suffix = if xi == 1 { "·ξ" } else { "" };
        parts.push(format!("({coeff:?})·{w}{suffix}"));
    }
    parts.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn a() -> RationalCoeff {
        RationalCoeff::var(super::super::ratfn::VAR_A)
    }

    #[test]
    fn commutator_and_anticommutator_of_the_multiplier() {
        let x = FormalExpr::term(vec![Token::X(0)], 0, RationalCoeff::one());
        let phi = FormalExpr::term(vec![Token::Phi], 0, RationalCoeff::one());
        // [−(i/2)x̃, φ]⋆ → ∂φ.
        let half = RationalCoeff::from_ratio(-1, 2) * RationalCoeff::i();
        let bracket = star_commutator(&x.scale(&half), &phi, false);
        let nf = rewrite_linear_star(&bracket).unwrap();
        assert_eq!(
            nf,
            FormalExpr::term(vec![Token::DPhi(0)], 0, RationalCoeff::one())
        );
        // x̃⋆φ + φ⋆x̃ → 2 x̃φ.
        let anti = super_expand(&x, &phi).add(&super_expand(&phi, &x));
        let nf = rewrite_linear_star(&anti).unwrap();
        assert_eq!(
            nf,
            FormalExpr::term(vec![Token::XPhi(0)], 0, RationalCoeff::from_int(2))
        );
        // x̃ ⋆ 1 stays x̃.
        let unit = rewrite_linear_star(&super_expand(&x, &FormalExpr::one())).unwrap();
        assert_eq!(unit, x);
    }

    #[test]
    fn rewriting_is_linear_over_coefficients() {
        let x = FormalExpr::term(vec![Token::X(1)], 0, a());
        let phi = FormalExpr::term(vec![Token::Phi], 0, RationalCoeff::one());
        let e = super_expand(&x, &phi);
        let nf = rewrite_linear_star(&e).unwrap();
        assert_eq!(nf.coefficient(&vec![Token::XPhi(1)], 0), a());
        assert_eq!(
            nf.coefficient(&vec![Token::DPhi(1)], 0),
            RationalCoeff::i() * a()
        );
    }

    fn random_expr(rng: &mut ChaCha8Rng) -> FormalExpr {
        let mut e = FormalExpr::zero();
        for _ in 0..rng.gen_range(1..4) {
            let len = rng.gen_range(0..5);
            let mut word = Vec::new();
            for _ in 0..len {
                word.push(match rng.gen_range(0..5) {
                    0 => Token::Phi,
                    1 => Token::DPhi(rng.gen_range(0..2)),
                    2 => Token::XPhi(rng.gen_range(0..2)),
                    3 => Token::X(rng.gen_range(0..2)),
                    _ => Token::PhiPhi,
                });
            }
            let coeff = RationalCoeff::from_int(rng.gen_range(-3..4));
            e = e.add(&FormalExpr::term(word, rng.gen_range(0..2), coeff));
        }
        e
    }

    #[test]
    fn normal_forms_do_not_depend_on_the_schedule() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let e = random_expr(&mut rng);
            let reference = rewrite_linear_star(&e).unwrap();
            for _ in 0..3 {
                let mut sched = ChaCha8Rng::seed_from_u64(rng.gen());
                let shuffled =
                    rewrite_linear_star_with(&e, |k| sched.gen_range(0..k)).unwrap();
                assert_eq!(shuffled, reference);
            }
            // Normal forms are fixed points.
            assert_eq!(rewrite_linear_star(&reference).unwrap(), reference);
        }
    }

    #[test]
    fn graded_bracket_anticommutes_the_odd_sectors() {
        let f = FormalExpr::term(vec![Token::Phi], 1, a());
        let g = FormalExpr::term(vec![Token::DPhi(0)], 1, RationalCoeff::one());
        // Both odd: graded bracket is the anticommutator.
        let graded = star_commutator(&f, &g, true);
        let anti = super_expand(&f, &g).add(&super_expand(&g, &f));
        assert_eq!(graded, anti);
        let plain = star_commutator(&f, &g, false);
        assert_eq!(plain, super_expand(&f, &g).sub(&super_expand(&g, &f)));
    }
}
