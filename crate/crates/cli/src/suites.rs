//! The verification suites behind the `verify` subcommands. Each suite
//! reuses the library machinery and reports one record per check.

use crate::config::RunConfig;
use crate::report::{check, check_bool, CheckRecord, SuiteReport};
use anyhow::{bail, Result};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use supermoyal::clifford_fine::{
    factor_set_from_star, is_factor_set, search_equivalence, sigma_clifford, FactorSet,
    lambda_closed_coefficient,
};
use supermoyal::grassmann::{berezin, eps, gr_mul, hodge, GrassmannElement, IndexSubset};
use supermoyal::gridfn::{moyal_grid, GridFn2};
use supermoyal::hilbert::{
    cstar_super_check, super_pairing, superadjoint, wedge_multiplication, HilbertSuper,
    SuperOperator,
};
use supermoyal::poly::Polynomial;
use supermoyal::qft::{self, verify_action_identity, verify_bracket_identity, QftParams};
use supermoyal::quantization::{
    berezin_transform, omega_fn, reference_gaussian, resolution_check, GridModel,
};
use supermoyal::scalar::{crat_from_f64, C64, CRat, Scalar};
use supermoyal::starproduct::{lambda_bruteforce, lambda_closedform, moyal_poly, DeformParams};
use supermoyal::superfn::{super_star, SuperFunction};
use supermoyal::supersymplectic::GradedForm;
use supermoyal::supertorus::{normalized_odd_generator, torus_star, TorusElement};

pub const SUITES: &[&str] = &[
    "grassmann",
    "symplectic",
    "hilbert",
    "star",
    "quantization",
    "clifford",
    "torus",
    "qft",
];

pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<SuiteReport> {
    let checks = match name {
        "grassmann" => grassmann_suite(cfg)?,
        "symplectic" => symplectic_suite(cfg)?,
        "hilbert" => hilbert_suite(cfg)?,
        "star" => star_suite(cfg)?,
        "quantization" => quantization_suite(cfg)?,
        "clifford" => clifford_suite(cfg)?,
        "torus" => torus_suite(cfg)?,
        "qft" => qft_suite(cfg)?,
        other => bail!("unknown suite {other}"),
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        checks,
    })
}

fn params_c64(cfg: &RunConfig) -> Result<DeformParams<C64>> {
    Ok(DeformParams::new(
        C64::new(cfg.a0, 0.0),
        C64::new(cfg.alpha_re, cfg.alpha_im),
    )?)
}

fn params_crat(cfg: &RunConfig) -> Result<DeformParams<CRat>> {
    let lift = |x: f64| {
        crat_from_f64(x).ok_or_else(|| anyhow::anyhow!("parameter {x} is not finite"))
    };
    let alpha = lift(cfg.alpha_re)? + CRat::i() * lift(cfg.alpha_im)?;
    Ok(DeformParams::new(lift(cfg.a0)?, alpha)?)
}

// ---------------------------------------------------------------------------
// grassmann

fn grassmann_suite(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let tol = cfg.tol.structural;
    let mut out = Vec::new();

    out.push(check("eps cocycle on disjoint triples", "eps-cocycle", tol, || {
        let mut dev = 0.0f64;
        for i in 0..16u32 {
            for j in 0..16u32 {
                for k in 0..16u32 {
                    if i & j != 0 || i & k != 0 || j & k != 0 {
                        continue;
                    }
                    let s = |a: u32, b: u32| eps(IndexSubset::from_mask(a), IndexSubset::from_mask(b));
                    let lhs = s(i, j) * s(i | j, k);
                    let rhs = s(j, k) * s(i, j | k);
                    dev = dev.max((lhs - rhs).abs() as f64);
                }
            }
        }
        dev
    }));

    out.push(check("wedge product associativity", "wedge-assoc", tol, || {
        let n = 4usize;
        let mut dev = 0.0f64;
        for a in 0..1u32 << n {
            for b in 0..1u32 << n {
                for c in 0..1u32 << n {
                    let ea = GrassmannElement::<C64>::basis(n, IndexSubset::from_mask(a));
                    let eb = GrassmannElement::<C64>::basis(n, IndexSubset::from_mask(b));
                    let ec = GrassmannElement::<C64>::basis(n, IndexSubset::from_mask(c));
                    let lhs = gr_mul(&gr_mul(&ea, &eb).unwrap(), &ec).unwrap();
                    let rhs = gr_mul(&ea, &gr_mul(&eb, &ec).unwrap()).unwrap();
                    dev = dev.max(gr_dev(&lhs, &rhs));
                }
            }
        }
        dev
    }));

    out.push(check("Hodge double dual sign", "hodge-double", tol, || {
        let mut dev = 0.0f64;
        for n in 1..=4usize {
            for m in 0..1u32 << n {
                let e = GrassmannElement::<C64>::basis(n, IndexSubset::from_mask(m));
                let twice = hodge(&hodge(&e));
                let d = m.count_ones() as usize;
                let sign = if (d * (n - d)) % 2 == 1 { -1.0 } else { 1.0 };
                dev = dev.max(gr_dev(&twice, &e.scale(&C64::new(sign, 0.0))));
            }
        }
        dev
    }));

    out.push(check("graded conjugation rule", "conj-graded", tol, || {
        let n = 4usize;
        let mut dev = 0.0f64;
        for a in 0..1u32 << n {
            for b in 0..1u32 << n {
                let ea = GrassmannElement::<C64>::basis(n, IndexSubset::from_mask(a))
                    .scale(&C64::new(1.0, 0.5));
                let eb = GrassmannElement::<C64>::basis(n, IndexSubset::from_mask(b))
                    .scale(&C64::new(-0.3, 1.0));
                let lhs = gr_mul(&ea, &eb).unwrap().conj();
                let sign = if (a.count_ones() * b.count_ones()) % 2 == 1 {
                    C64::new(-1.0, 0.0)
                } else {
                    C64::new(1.0, 0.0)
                };
                let rhs = gr_mul(&eb.conj(), &ea.conj()).unwrap().scale(&sign);
                dev = dev.max(gr_dev(&lhs, &rhs));
                // Involution.
                dev = dev.max(gr_dev(&ea.conj().conj(), &ea));
            }
        }
        dev
    }));

    out.push(check("Berezin integral picks the top", "berezin-top", tol, || {
        let mut dev = 0.0f64;
        for n in 1..=4usize {
            for m in 0..1u32 << n {
                let e = GrassmannElement::<C64>::basis(n, IndexSubset::from_mask(m));
                let want = if m == (1 << n) - 1 { 1.0 } else { 0.0 };
                dev = dev.max((berezin(&e) - C64::new(want, 0.0)).norm());
            }
        }
        dev
    }));

    Ok(out)
}

fn gr_dev(a: &GrassmannElement<C64>, b: &GrassmannElement<C64>) -> f64 {
    let mut dev = 0.0f64;
    for (s, c) in a.terms() {
        dev = dev.max((*c - b.coeff(s)).norm());
    }
    for (s, c) in b.terms() {
        dev = dev.max((*c - a.coeff(s)).norm());
    }
    dev
}

// ---------------------------------------------------------------------------
// symplectic

fn symplectic_suite(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let tol = cfg.tol.structural;
    let pairs = (cfg.m / 2).max(1);
    let (np, nm) = (cfg.n.max(1), 1usize);
    let canonical = GradedForm::canonical(pairs, np, nm);
    let (p_even, q_odd) = (2 * pairs, np + nm);

    // Congruence-transform the canonical form by fixed well-conditioned
    // matrices; Darboux reduction must recover the blocks.
    let basis_change = |dim: usize, scale: f64| {
        Array2::from_shape_fn((dim, dim), |(i, j)| {
            let bump = ((i * 7 + j * 3 + 1) % 5) as f64 * scale;
            if i == j {
                1.0 + bump
            } else {
                bump * 0.5
            }
        })
    };
    let p0 = basis_change(p_even, 0.08);
    let q0 = basis_change(q_odd, 0.06);
    let even = p0.t().dot(canonical.even_block()).dot(&p0);
    let odd = q0.t().dot(canonical.odd_block()).dot(&q0);
    let form = GradedForm::new(even.clone(), odd.clone())?;
    let basis = form.darboux_basis()?;
    let canonical_even = canonical.even_block().clone();

    let mut out = Vec::new();
    out.push(check(
        "Darboux reduction of the even block",
        "darboux-even",
        tol,
        || {
            let got = basis.even_transform.t().dot(&even).dot(&basis.even_transform);
            max_abs_diff(&got, &canonical_even)
        },
    ));
    out.push(check(
        "odd block diagonalizes to plus/minus 2",
        "darboux-odd",
        tol,
        || {
            let got = basis.odd_transform.t().dot(&odd).dot(&basis.odd_transform);
            let mut dev = 0.0f64;
            for ((i, j), v) in got.indexed_iter() {
                if i == j {
                    dev = dev.max((v.abs() - 2.0).abs());
                } else {
                    dev = dev.max(v.abs());
                }
            }
            dev
        },
    ));
    out.push(check_bool(
        "Sylvester signature is congruence invariant",
        "odd-signature",
        || match form.signature() {
            Ok(sig) => sig == (np, nm) && sig == (basis.n_plus, basis.n_minus),
            Err(_) => false,
        },
    ));
    Ok(out)
}

fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// hilbert

fn hilbert_suite(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let tol = cfg.tol.structural;
    let n = cfg.n.clamp(1, 3);
    let space = HilbertSuper::exterior_model(n);
    let mut out = Vec::new();

    let gens: Vec<(SuperOperator, SuperOperator)> = (0..n)
        .map(|i| {
            let op = wedge_multiplication(n, IndexSubset::from_mask(1 << i));
            let dag = superadjoint(&space, &op)?;
            Ok((op, dag))
        })
        .collect::<Result<_>>()?;
    let report = cstar_super_check(&space, &gens)?;
    out.push(check(
        "superinvolution axioms on wedge generators",
        "superinvolution",
        tol,
        || {
            report
                .violations
                .iter()
                .map(|v| v.residual)
                .fold(0.0, f64::max)
        },
    ));

    out.push(check(
        "superadjoint defining property",
        "superadjoint-defining",
        tol,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let mut dev = 0.0f64;
            for case in 0..100usize {
                let degree = (case % 2) as u8;
                let t = random_homogeneous(&mut rng, &space, degree);
                let td = superadjoint(&space, &t).unwrap();
                for parity in [0u8, 1] {
                    let x = random_parity_vec(&mut rng, &space, parity);
                    let y = random_vec(&mut rng, space.dim());
                    let lhs = super_pairing(&space, &td.matrix.dot(&x), &y).unwrap();
                    let rhs = super_pairing(&space, &x, &t.matrix.dot(&y)).unwrap();
                    let expect = if degree == 1 && parity == 1 { -rhs } else { rhs };
                    dev = dev.max((lhs - expect).norm() / (1.0 + rhs.norm()));
                }
            }
            dev
        },
    ));

    out.push(check(
        "pairing is superhermitian",
        "pairing-superhermitian",
        tol,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let mut dev = 0.0f64;
            for _ in 0..50 {
                for (px, py) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
                    let x = random_parity_vec(&mut rng, &space, px);
                    let y = random_parity_vec(&mut rng, &space, py);
                    let lhs = super_pairing(&space, &x, &y).unwrap();
                    let mut rhs = super_pairing(&space, &y, &x).unwrap().conj();
                    if px * py == 1 {
                        rhs = -rhs;
                    }
                    dev = dev.max((lhs - rhs).norm());
                }
            }
            dev
        },
    ));

    Ok(out)
}

fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> Array1<C64> {
    Array1::from_shape_fn(dim, |_| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn random_parity_vec(rng: &mut ChaCha8Rng, space: &HilbertSuper, parity: u8) -> Array1<C64> {
    let mut x = random_vec(rng, space.dim());
    for i in 0..space.dim() {
        if space.grading()[i] != parity {
            x[i] = C64::new(0.0, 0.0);
        }
    }
    x
}

fn random_homogeneous(rng: &mut ChaCha8Rng, space: &HilbertSuper, degree: u8) -> SuperOperator {
    let dim = space.dim();
    let matrix = Array2::from_shape_fn((dim, dim), |(i, j)| {
        if (space.grading()[i] + space.grading()[j]) % 2 == degree {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        } else {
            C64::new(0.0, 0.0)
        }
    });
    SuperOperator::new(space, matrix, degree).unwrap()
}

// ---------------------------------------------------------------------------
// star

fn star_suite(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let tol = cfg.tol.structural;
    let n_max = cfg.n.clamp(1, 4);
    let mut out = Vec::new();

    if cfg.exact {
        let p = params_crat(cfg)?;
        out.push(check_bool(
            "structure constants: Berezin integral vs closed form (exact)",
            "lambda-crosscheck",
            || {
                (1..=n_max).all(|n| {
                    let brute = lambda_bruteforce(n, &p).unwrap();
                    let closed = lambda_closedform(n, &p).unwrap();
                    (0..1u32 << n).all(|a| {
                        (0..1u32 << n).all(|b| {
                            let (i, j) = (IndexSubset::from_mask(a), IndexSubset::from_mask(b));
                            brute.coefficient(i, j) == closed.coefficient(i, j)
                        })
                    })
                })
            },
        ));
    } else {
        let p = params_c64(cfg)?;
        out.push(check(
            "structure constants: Berezin integral vs closed form",
            "lambda-crosscheck",
            tol,
            || {
                let mut dev = 0.0f64;
                for n in 1..=n_max {
                    let brute = lambda_bruteforce(n, &p).unwrap();
                    let closed = lambda_closedform(n, &p).unwrap();
                    for (i, j, c) in brute.entries() {
                        dev = dev.max((closed.coefficient(i, j) - c).norm());
                    }
                }
                dev
            },
        ));
    }

    {
        let p = params_c64(cfg)?;
        out.push(check(
            "closed coefficient formula matches the table",
            "lambda-closed-coefficient",
            tol,
            || {
                let mut dev = 0.0f64;
                for n in 1..=n_max.min(3) {
                    let table = lambda_closedform(n, &p).unwrap();
                    for (i, j, c) in table.entries() {
                        dev = dev.max((lambda_closed_coefficient(&p, n, i, j) - c).norm());
                    }
                }
                dev
            },
        ));
    }

    let p = params_crat(cfg)?;
    out.push(check_bool("one-generator product table", "table-n1", || {
        product_table_check(&p, 1)
    }));
    out.push(check_bool("two-generator product table", "table-n2", || {
        product_table_check(&p, 2)
    }));
    Ok(out)
}

/// Compare the graded star against the explicit n=1/n=2 component tables
/// (Moyal products of the bodies weighted by the diagonal coefficients).
fn product_table_check(p: &DeformParams<CRat>, n: usize) -> bool {
    let theta = p.theta();
    let lam = match lambda_closedform(n, p) {
        Ok(l) => l,
        Err(_) => return false,
    };
    let x = Polynomial::<CRat>::var(2, 0);
    let y = Polynomial::<CRat>::var(2, 1);
    let body = |k: i64| {
        x.scale(&CRat::from_int(k + 1))
            .add(&y.mul(&y).scale(&CRat::from_int(2 * k - 3)))
            .add(&Polynomial::constant(2, CRat::from_int(k - 1)))
    };
    let masks: Vec<IndexSubset> = (0..1u32 << n).map(IndexSubset::from_mask).collect();
    let mut f = SuperFunction::<Polynomial<CRat>>::new(n);
    let mut g = SuperFunction::<Polynomial<CRat>>::new(n);
    for (k, &m) in masks.iter().enumerate() {
        f.set_component(m, body(k as i64));
        g.set_component(m, body(k as i64 + masks.len() as i64));
    }
    let prod = match super_star(&f, &g, &lam, &theta) {
        Ok(p) => p,
        Err(_) => return false,
    };
    // Independent expansion straight from the table entries.
    let mut want = SuperFunction::<Polynomial<CRat>>::new(n);
    for &i in &masks {
        for &j in &masks {
            let c = lam.coefficient(i, j);
            if c.is_zero() {
                continue;
            }
            let term = moyal_poly(f.component(i).unwrap(), g.component(j).unwrap(), &theta)
                .unwrap()
                .scale(&c);
            let k = lam.target(i, j);
            let merged = match want.component(k) {
                Some(b) => b.add(&term),
                None => term,
            };
            want.set_component(k, merged);
        }
    }
    // The n=1 anchor coefficient.
    if n == 1 {
        let d = IndexSubset::from_mask(1);
        if lam.coefficient(d, d) != p.lambda_diag() {
            return false;
        }
    }
    masks.iter().all(|&m| prod.component(m) == want.component(m))
}

// ---------------------------------------------------------------------------
// quantization

fn gaussian_super(model: &GridModel, widths: &[(u32, f64, f64)]) -> SuperFunction<GridFn2> {
    let mut f = SuperFunction::new(model.n());
    for &(mask, sx, amp) in widths {
        let body = GridFn2::from_fn(model.grid(), |x, w| {
            C64::new(amp * (-(x * x + w * w) / (2.0 * sx * sx)).exp(), 0.0)
        });
        f.set_component(IndexSubset::from_mask(mask), body);
    }
    f
}

fn split_parity(f: &SuperFunction<GridFn2>, parity: u32) -> SuperFunction<GridFn2> {
    let mut out = SuperFunction::new(f.n());
    for (subset, body) in f.components() {
        if subset.len() as u32 % 2 == parity {
            out.set_component(subset, body.clone());
        }
    }
    out
}

fn frob(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn quantization_suite(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let model = GridModel::new(cfg.m, cfg.n, cfg.grid, cfg.extent, params_c64(cfg)?)?;
    let n = model.n();
    let mut out = Vec::new();

    // Mixed-parity Gaussian symbols on the first odd generator (if any).
    let odd_mask = if n >= 1 { 1u32 } else { 0 };
    let f = gaussian_super(&model, &[(0, 1.0, 1.0), (odd_mask, 1.3, 0.6)]);
    let g = gaussian_super(&model, &[(0, 1.1, 0.8), (odd_mask, 0.9, -0.4)]);

    out.push(check(
        "quantization is a star homomorphism",
        "omega-homomorphism",
        cfg.tol.homomorphism,
        || {
            let lam = lambda_closedform(n, model.params()).unwrap();
            let theta = C64::new(1.0 / model.a0(), 0.0);
            let fg = super_star(&f, &g, &lam, &theta).unwrap();
            let of = [
                omega_fn(&model, &split_parity(&f, 0)).unwrap(),
                omega_fn(&model, &split_parity(&f, 1)).unwrap(),
            ];
            let og = [
                omega_fn(&model, &split_parity(&g, 0)).unwrap(),
                omega_fn(&model, &split_parity(&g, 1)).unwrap(),
            ];
            let mut prod = of[0].compose(&og[0]).matrix;
            for (i, j) in [(0usize, 1usize), (1, 0), (1, 1)] {
                prod = prod + of[i].compose(&og[j]).matrix;
            }
            let want = omega_fn(&model, &split_parity(&fg, 0)).unwrap().matrix
                + omega_fn(&model, &split_parity(&fg, 1)).unwrap().matrix;
            let diff = Array2::from_shape_fn(want.dim(), |idx| prod[idx] - want[idx]);
            frob(&diff) / frob(&want).max(1e-30)
        },
    ));

    out.push(check(
        "quantization intertwines conjugation with the superadjoint",
        "omega-conjugation",
        cfg.tol.conjugation,
        || {
            let space = model.space();
            let mut dev = 0.0f64;
            for parity in [0u32, 1u32.min(n as u32)] {
                let h = split_parity(&gaussian_super(&model, &[(0, 1.0, 0.9), (odd_mask, 1.0, 0.7)]), parity);
                if h.components().count() == 0 {
                    continue;
                }
                let oh = omega_fn(&model, &h).unwrap();
                let ohc = omega_fn(&model, &h.conj()).unwrap();
                let op = SuperOperator::new(&space, oh.matrix.clone(), oh.degree).unwrap();
                let dag = superadjoint(&space, &op).unwrap();
                let d = dag
                    .matrix
                    .iter()
                    .zip(ohc.matrix.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0f64, f64::max)
                    / oh.max_abs().max(1e-30);
                dev = dev.max(d);
            }
            dev
        },
    ));

    let phi = reference_gaussian(&model, 1.0);
    out.push(check(
        "resolution of the identity",
        "resolution-identity",
        cfg.tol.resolution,
        || {
            let npts = model.grid().n_pts;
            let mut psi = Array1::from_elem(model.dim(), C64::new(0.0, 0.0));
            for i in 0..npts {
                let x = model.grid().node(i);
                let gsn = (-x * x / 2.0).exp();
                psi[model.index(i, 0)] = C64::new(0.6 * gsn, 0.0);
                if n >= 1 {
                    psi[model.index(i, 1)] = C64::new(gsn * (0.3 + 0.2 * x), 0.1 * gsn);
                }
            }
            match resolution_check(&model, &phi, &psi) {
                Ok(report) => report.rel_error,
                Err(_) => f64::INFINITY,
            }
        },
    ));
    if (cfg.m, cfg.n, cfg.a0) == (2, 1, 1.0) {
        out.push(check(
            "resolution constant is 2 pi i",
            "resolution-constant",
            cfg.tol.resolution,
            || {
                let c = model.params().resolution_constant(2, 1);
                (c - C64::new(0.0, 2.0 * std::f64::consts::PI)).norm()
            },
        ));
    }

    if n >= 1 {
        out.push(check(
            "Berezin transform recovers the symbol",
            "berezin-transform",
            cfg.tol.berezin,
            || {
                let h = model.grid().spacing();
                let z1 = (2.0 * h, 1.3);
                let sym = gaussian_super(&model, &[(0, 1.0, 1.0)]);
                let mut dev = 0.0f64;
                for beta in [C64::new(0.0, 0.0), model.alpha() * 0.5] {
                    match berezin_transform(&model, &sym, z1, beta) {
                        Ok(report) => {
                            let want = (-(z1.0 * z1.0 + z1.1 * z1.1) / 2.0).exp();
                            for (subset, _, recovered) in &report.components {
                                let target = if subset.is_empty() { want } else { 0.0 };
                                dev = dev
                                    .max((recovered - C64::new(target, 0.0)).norm() / (1.0 + want));
                            }
                        }
                        Err(_) => dev = f64::INFINITY,
                    }
                }
                dev
            },
        ));
    }

    // Tracial identity and twisted-trace cyclicity work at the level of the
    // symbols; only the sectors that survive the integrals are computed.
    let lam = lambda_closedform(n, model.params())?;
    let theta = 1.0 / model.a0();
    let widths_f: Vec<(u32, f64, f64)> = (0..1u32 << n)
        .map(|m| (m, 1.0 + 0.07 * m as f64, 1.0 - 0.2 * m as f64))
        .collect();
    let widths_g: Vec<(u32, f64, f64)> = (0..1u32 << n)
        .map(|m| (m, 1.1 - 0.05 * m as f64, 0.8 + 0.15 * m as f64))
        .collect();
    let tf = gaussian_super(&model, &widths_f);
    let tg = gaussian_super(&model, &widths_g);

    out.push(check(
        "tracial identity for the graded star",
        "tracial-identity",
        cfg.tol.trace,
        || {
            // Top sector of f*g: only disjoint pairs (I, complement) reach
            // it, with the undeformed coefficient eps(I, comp).
            let full = (1u32 << n) - 1;
            let mut lhs = C64::new(0.0, 0.0);
            let mut rhs = C64::new(0.0, 0.0);
            for m in 0..=full {
                let i = IndexSubset::from_mask(m);
                let j = IndexSubset::from_mask(full & !m);
                let (bi, bj) = match (tf.component(i), tg.component(j)) {
                    (Some(a), Some(b)) => (a, b),
                    _ => continue,
                };
                let c = lam.coefficient(i, j);
                lhs += c * moyal_grid(bi, bj, theta).unwrap().integrate();
                rhs += c * bi.mul_pointwise(bj).integrate();
            }
            (lhs - rhs).norm() / rhs.norm().max(1e-30)
        },
    ));

    out.push(check(
        "twisted trace is cyclic",
        "twisted-trace-cyclicity",
        cfg.tol.cyclicity,
        || {
            // Body sector of f*g: pairs (I, I) with coefficient Lambda(I,I).
            let body_trace = |a: &SuperFunction<GridFn2>, b: &SuperFunction<GridFn2>| {
                let mut acc = C64::new(0.0, 0.0);
                for m in 0..1u32 << n {
                    let i = IndexSubset::from_mask(m);
                    if let (Some(ba), Some(bb)) = (a.component(i), b.component(i)) {
                        acc += lam.coefficient(i, i)
                            * moyal_grid(ba, bb, theta).unwrap().integrate();
                    }
                }
                acc
            };
            let ab = body_trace(&tf, &tg);
            let ba = body_trace(&tg, &tf);
            (ab - ba).norm() / ab.norm().max(1e-30)
        },
    ));

    Ok(out)
}

// ---------------------------------------------------------------------------
// clifford

fn clifford_suite(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let p = params_c64(cfg)?;
    let n_max = cfg.n.clamp(1, 4);
    let mut out = Vec::new();

    out.push(check_bool(
        "Clifford factor set satisfies the cocycle identity",
        "sigma-cl-cocycle",
        || (0..=n_max).all(|n| is_factor_set(&sigma_clifford(n), 1e-12)),
    ));

    out.push(check_bool(
        "star factor set equivalent to sigma_cl on both root branches",
        "star-factor-equivalence",
        || {
            (1..=n_max).all(|n| {
                let lam = match lambda_closedform(n, &p) {
                    Ok(l) => l,
                    Err(_) => return false,
                };
                [false, true].into_iter().all(|branch| {
                    factor_set_from_star(&lam, &p, branch)
                        .map(|r| r.equivalent)
                        .unwrap_or(false)
                })
            })
        },
    ));

    out.push(check(
        "normalized generators close a Clifford algebra",
        "clifford-relations",
        cfg.tol.structural,
        || {
            let mut dev = 0.0f64;
            for n in 1..=5usize {
                let lam = lambda_closedform(n, &p).unwrap();
                let theta = p.theta();
                let root = p.lambda_diag().sqrt();
                let one = Polynomial::<C64>::one(2);
                let gen = |i: usize| {
                    SuperFunction::from_component(
                        n,
                        IndexSubset::from_mask(1 << (i - 1)),
                        one.scale(&(C64::new(1.0, 0.0) / root)),
                    )
                };
                for i in 1..=n {
                    let sq = super_star(&gen(i), &gen(i), &lam, &theta).unwrap();
                    dev = dev.max(poly_dev(
                        sq.component(IndexSubset::EMPTY).unwrap_or(&Polynomial::zero(2)),
                        &one,
                    ));
                    for j in i + 1..=n {
                        let anti = super_star(&gen(i), &gen(j), &lam, &theta)
                            .unwrap()
                            .add(&super_star(&gen(j), &gen(i), &lam, &theta).unwrap());
                        for (_, body) in anti.components() {
                            dev = dev.max(poly_dev(body, &Polynomial::zero(2)));
                        }
                    }
                }
            }
            dev
        },
    ));

    out.push(check_bool(
        "Clifford multiplier is not a coboundary",
        "nontrivial-multiplier",
        || match search_equivalence(&sigma_clifford(2), &FactorSet::constant_one(2), 1e-9) {
            Ok(found) => found.is_none(),
            Err(_) => false,
        },
    ));

    Ok(out)
}

fn poly_dev(a: &Polynomial<C64>, b: &Polynomial<C64>) -> f64 {
    let diff = a.sub(b);
    diff.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// torus

fn torus_suite(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let alpha = C64::new(cfg.alpha_re, cfg.alpha_im);
    let n = cfg.n.clamp(1, 3);
    let thetas = [0.25, 1.0 / 3.0, 0.618_033_988_749_894_9, 0.75];
    let mut out = Vec::new();

    out.push(check(
        "V U = exp(2 pi i theta) U V",
        "torus-commutation",
        cfg.tol.structural,
        || {
            let mut dev = 0.0f64;
            for &theta in &thetas {
                let u = TorusElement::mode(n, theta, 1, 0, 0);
                let v = TorusElement::mode(n, theta, 0, 1, 0);
                let vu = torus_star(&v, &u, alpha).unwrap();
                let uv = torus_star(&u, &v, alpha).unwrap();
                let phase = C64::new(0.0, 2.0 * std::f64::consts::PI * theta).exp();
                dev = dev.max(torus_dev(&vu, &uv.scale(phase)));
            }
            dev
        },
    ));

    out.push(check(
        "normalized odd generators satisfy Cl(n) relations",
        "torus-odd-relations",
        cfg.tol.structural,
        || {
            let mut dev = 0.0f64;
            for &theta in &thetas[..2] {
                let gens: Vec<TorusElement> = (1..=n)
                    .map(|i| normalized_odd_generator(n, theta, alpha, i).unwrap().0)
                    .collect();
                for i in 0..n {
                    let sq = torus_star(&gens[i], &gens[i], alpha).unwrap();
                    let one = TorusElement::mode(n, theta, 0, 0, 0);
                    dev = dev.max(torus_dev(&sq, &one));
                    for j in i + 1..n {
                        let anti = torus_star(&gens[i], &gens[j], alpha)
                            .unwrap()
                            .add(&torus_star(&gens[j], &gens[i], alpha).unwrap())
                            .unwrap();
                        dev = dev.max(torus_dev(&anti, &TorusElement::new(n, theta)));
                    }
                }
            }
            dev
        },
    ));

    out.push(check(
        "theta = 0 degenerates to the supercommutative algebra",
        "torus-degeneration",
        cfg.tol.structural,
        || {
            let mut f = TorusElement::new(n, 0.0);
            f.set(1, 0, 0, C64::new(0.7, 0.2));
            f.set(0, 1, 1, C64::new(-0.4, 1.0));
            let mut g = TorusElement::new(n, 0.0);
            g.set(0, 2, 0, C64::new(1.0, -0.3));
            g.set(1, 1, 0, C64::new(0.5, 0.5));
            let fg = torus_star(&f, &g, alpha).unwrap();
            let gf = torus_star(&g, &f, alpha).unwrap();
            // g is even, so f*g = g*f with no grading sign.
            torus_dev(&fg, &gf)
        },
    ));

    Ok(out)
}

fn torus_dev(a: &TorusElement, b: &TorusElement) -> f64 {
    let mut dev = 0.0f64;
    for (k, l, m, c) in a.terms() {
        dev = dev.max((c - b.coefficient(k, l, m)).norm());
    }
    for (k, l, m, c) in b.terms() {
        dev = dev.max((c - a.coefficient(k, l, m)).norm());
    }
    dev
}

// ---------------------------------------------------------------------------
// qft

fn qft_suite(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();

    out.push(check_bool(
        "graded bracket identity holds exactly",
        "bracket-identity",
        || verify_bracket_identity(true).map(|r| r.status).unwrap_or(false),
    ));
    out.push(check_bool(
        "plain bracket misses the harmonic term",
        "bracket-plain-fails",
        || verify_bracket_identity(false).map(|r| !r.status).unwrap_or(false),
    ));
    out.push(check_bool(
        "action identity holds exactly",
        "action-identity",
        || {
            verify_action_identity(true, false)
                .map(|v| v.report.status)
                .unwrap_or(false)
        },
    ));
    out.push(check_bool(
        "kept odd-square channel leaves the closed-form residual",
        "action-residual",
        || match verify_action_identity(true, true) {
            Ok(v) => {
                let want = qft::verify::residual_closed_form();
                v.diff.len() == want.len()
                    && v.diff
                        .iter()
                        .all(|(w, c)| want.get(w).map(|d| d == c).unwrap_or(false))
            }
            Err(_) => false,
        },
    ));

    let p = QftParams {
        a: 1.0,
        b: 1.0,
        alpha: cfg.alpha_re,
        theta: 1.0 / cfg.a0,
        mass: 1.0,
        coupling: 1.0,
    };
    match qft::numeric_crosscheck(cfg.grid, cfg.extent, p) {
        Ok(nc) => {
            out.push(check(
                "numeric crosscheck of the action identity",
                "qft-numeric",
                cfg.tol.numeric,
                || nc.relative_deviation,
            ));
            out.push(check(
                "integration-by-parts axiom by quadrature",
                "qft-parts-axiom",
                1e-8,
                || nc.parts_axiom_residual,
            ));
            out.push(check(
                "measured odd-channel residual matches the symbolic one",
                "qft-residual-numeric",
                cfg.tol.numeric,
                || nc.residual_deviation,
            ));
        }
        Err(e) => bail!("numeric crosscheck failed to run: {e}"),
    }

    Ok(out)
}
