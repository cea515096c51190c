//! Finite-dimensional Hilbert superspaces (ℋ, J, parity), the superadjoint
//! calculus on graded operators, Krein decomposition in parity 1, and an
//! axiom checker for superinvolutive operator algebras.

use crate::error::{Error, Result};
use crate::grassmann::{eps, IndexSubset};
use crate::scalar::C64;
use ndarray::{Array1, Array2};

const EXACT_TOL: f64 = 1e-12;

/// (ℋ, J, n): a graded Hilbert space with a unitary J of degree `parity`
/// satisfying J²x = (−1)^{(parity+1)|x|}x on homogeneous x.
#[derive(Clone, Debug)]
pub struct HilbertSuper {
    dim: usize,
    grading: Vec<u8>,
    j_op: Array2<C64>,
    parity: u8,
}

/// Homogeneous operator: block sparsity matches its ℤ₂ degree.
#[derive(Clone, Debug)]
pub struct SuperOperator {
    pub matrix: Array2<C64>,
    pub degree: u8,
}

fn mat_mul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b)
}

fn dagger_plain(a: &Array2<C64>) -> Array2<C64> {
    let (r, c) = a.dim();
    Array2::from_shape_fn((c, r), |(i, j)| a[[j, i]].conj())
}

fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

impl HilbertSuper {
    pub fn new(grading: Vec<u8>, j_op: Array2<C64>, parity: u8) -> Result<Self> {
        let dim = grading.len();
        if j_op.dim() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "J must be {dim}x{dim}"
            )));
        }
        let space = HilbertSuper {
            dim,
            grading,
            j_op,
            parity: parity % 2,
        };
        space.validate()?;
        Ok(space)
    }

    fn validate(&self) -> Result<()> {
        // J unitary.
        let jh_j = mat_mul(&dagger_plain(&self.j_op), &self.j_op);
        let id = Array2::from_shape_fn((self.dim, self.dim), |(i, j)| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        if max_abs_diff(&jh_j, &id) > EXACT_TOL {
            return Err(Error::InvalidParameter("J is not unitary".into()));
        }
        // J homogeneous of degree `parity`.
        for ((i, j), v) in self.j_op.indexed_iter() {
            if v.norm() > EXACT_TOL
                && (self.grading[i] + self.grading[j]) % 2 != self.parity
            {
                return Err(Error::ParityMismatch(
                    "J is not homogeneous of the declared parity".into(),
                ));
            }
        }
        // J² sign rule and the adjoint rule J* = (−1)^{(n+1)|x|}J columnwise.
        let j2 = mat_mul(&self.j_op, &self.j_op);
        let jh = dagger_plain(&self.j_op);
        for j in 0..self.dim {
            let s = if (self.parity as usize + 1) * self.grading[j] as usize % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            for i in 0..self.dim {
                let want = if i == j { C64::new(s, 0.0) } else { C64::new(0.0, 0.0) };
                if (j2[[i, j]] - want).norm() > EXACT_TOL {
                    return Err(Error::InvalidParameter("J² sign rule fails".into()));
                }
                if (jh[[i, j]] - self.j_op[[i, j]] * s).norm() > EXACT_TOL {
                    return Err(Error::InvalidParameter("J adjoint rule fails".into()));
                }
            }
        }
        Ok(())
    }

    /// The ⋀ℝⁿ model: basis θ^I, grading |I| mod 2, J = Hodge, parity n.
    pub fn exterior_model(n: usize) -> Self {
        let dim = 1usize << n;
        let grading: Vec<u8> = (0..dim).map(|m| (m.count_ones() % 2) as u8).collect();
        let mut j_op = Array2::from_elem((dim, dim), C64::new(0.0, 0.0));
        for m in 0..dim as u32 {
            let i = IndexSubset::from_mask(m);
            let c = i.complement(n);
            j_op[[c.mask() as usize, m as usize]] =
                C64::new(eps(i, c) as f64, 0.0);
        }
        HilbertSuper {
            dim,
            grading,
            j_op,
            parity: (n % 2) as u8,
        }
    }

    /// One-dimensional even space with J = 1.
    pub fn trivial() -> Self {
        HilbertSuper {
            dim: 1,
            grading: vec![0],
            j_op: Array2::from_elem((1, 1), C64::new(1.0, 0.0)),
            parity: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn grading(&self) -> &[u8] {
        &self.grading
    }

    pub fn j_op(&self) -> &Array2<C64> {
        &self.j_op
    }

    /// The parity operator 𝔓 = (−1)^{grading}.
    pub fn parity_operator(&self) -> Array2<C64> {
        Array2::from_shape_fn((self.dim, self.dim), |(i, j)| {
            if i == j {
                C64::new(if self.grading[i] == 0 { 1.0 } else { -1.0 }, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

/// ⟨x, y⟩ = (Jx, y), conjugate-linear in the first slot.
pub fn super_pairing(space: &HilbertSuper, x: &Array1<C64>, y: &Array1<C64>) -> Result<C64> {
    if x.len() != space.dim || y.len() != space.dim {
        return Err(Error::DimensionMismatch(format!(
            "vectors must have length {}",
            space.dim
        )));
    }
    let jx = space.j_op.dot(x);
    Ok(jx.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum())
}

/// The plain scalar product (x, y).
pub fn scalar_product(x: &Array1<C64>, y: &Array1<C64>) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

impl SuperOperator {
    pub fn new(space: &HilbertSuper, matrix: Array2<C64>, degree: u8) -> Result<Self> {
        if matrix.dim() != (space.dim, space.dim) {
            return Err(Error::DimensionMismatch("operator size".into()));
        }
        for ((i, j), v) in matrix.indexed_iter() {
            if v.norm() > EXACT_TOL
                && (space.grading[i] + space.grading[j]) % 2 != degree % 2
            {
                return Err(Error::ParityMismatch(format!(
                    "entry ({i},{j}) breaks homogeneity of degree {degree}"
                )));
            }
        }
        Ok(SuperOperator {
            matrix,
            degree: degree % 2,
        })
    }

    pub fn identity(space: &HilbertSuper) -> Self {
        SuperOperator {
            matrix: Array2::from_shape_fn((space.dim, space.dim), |(i, j)| {
                C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
            }),
            degree: 0,
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        SuperOperator {
            matrix: mat_mul(&self.matrix, &other.matrix),
            degree: (self.degree + other.degree) % 2,
        }
    }
}

/// Split an arbitrary matrix into its even and odd homogeneous parts via the
/// parity operator: f₀ = ½(T + 𝔓T𝔓), f₁ = ½(T − 𝔓T𝔓).
pub fn split_operator(space: &HilbertSuper, t: &Array2<C64>) -> (SuperOperator, SuperOperator) {
    let p = space.parity_operator();
    let ptp = mat_mul(&p, &mat_mul(t, &p));
    let half = C64::new(0.5, 0.0);
    let even = Array2::from_shape_fn(t.dim(), |idx| (t[idx] + ptp[idx]) * half);
    let odd = Array2::from_shape_fn(t.dim(), |idx| (t[idx] - ptp[idx]) * half);
    (
        SuperOperator { matrix: even, degree: 0 },
        SuperOperator { matrix: odd, degree: 1 },
    )
}

/// Superadjoint of a homogeneous operator:
/// T†x = (−1)^{(n+1)(|T|+|x|)+|T||x|} J T* J x, so that
/// ⟨T†x, y⟩ = (−1)^{|T||x|}⟨x, Ty⟩.
pub fn superadjoint(space: &HilbertSuper, t: &SuperOperator) -> Result<SuperOperator> {
    let core = mat_mul(
        &space.j_op,
        &mat_mul(&dagger_plain(&t.matrix), &space.j_op),
    );
    let n1 = space.parity as usize + 1;
    let td = t.degree as usize;
    let mut matrix = core;
    for j in 0..space.dim {
        let x = space.grading[j] as usize;
        if (n1 * (td + x) + td * x) % 2 == 1 {
            for i in 0..space.dim {
                matrix[[i, j]] = -matrix[[i, j]];
            }
        }
    }
    SuperOperator::new(space, matrix, t.degree)
}

/// Graded tensor product of superspaces; basis order is lexicographic
/// (i₁, i₂) with index i₁·dim₂ + i₂.
pub fn tensor_superspace(h1: &HilbertSuper, h2: &HilbertSuper) -> HilbertSuper {
    let dim = h1.dim * h2.dim;
    let mut grading = Vec::with_capacity(dim);
    for &p1 in &h1.grading {
        for &p2 in &h2.grading {
            grading.push((p1 + p2) % 2);
        }
    }
    let mut j_op = Array2::from_elem((dim, dim), C64::new(0.0, 0.0));
    for c1 in 0..h1.dim {
        for c2 in 0..h2.dim {
            let sign = if (h1.parity as usize + h1.grading[c1] as usize)
                * h2.grading[c2] as usize
                % 2
                == 1
            {
                -1.0
            } else {
                1.0
            };
            let col = c1 * h2.dim + c2;
            for r1 in 0..h1.dim {
                let a = h1.j_op[[r1, c1]];
                if a.norm() == 0.0 {
                    continue;
                }
                for r2 in 0..h2.dim {
                    let b = h2.j_op[[r2, c2]];
                    if b.norm() == 0.0 {
                        continue;
                    }
                    j_op[[r1 * h2.dim + r2, col]] = a * b * sign;
                }
            }
        }
    }
    HilbertSuper {
        dim,
        grading,
        j_op,
        parity: (h1.parity + h2.parity) % 2,
    }
}

/// Direct sum of two spaces of equal parity.
pub fn direct_sum_superspace(h1: &HilbertSuper, h2: &HilbertSuper) -> Result<HilbertSuper> {
    if h1.parity != h2.parity {
        return Err(Error::ParityMismatch(
            "direct summands must share their parity".into(),
        ));
    }
    let dim = h1.dim + h2.dim;
    let mut grading = h1.grading.clone();
    grading.extend_from_slice(&h2.grading);
    let mut j_op = Array2::from_elem((dim, dim), C64::new(0.0, 0.0));
    for ((i, j), &v) in h1.j_op.indexed_iter() {
        j_op[[i, j]] = v;
    }
    for ((i, j), &v) in h2.j_op.indexed_iter() {
        j_op[[h1.dim + i, h1.dim + j]] = v;
    }
    HilbertSuper::new(grading, j_op, h1.parity)
}

/// Krein decomposition of a parity-1 space: orthonormal bases of
/// ℋ± = Ker(J ∓ id); J is then a Hermitian unitary involution and the
/// projectors are ½(id ± J).
pub fn krein_decompose(space: &HilbertSuper) -> Result<(Vec<Array1<C64>>, Vec<Array1<C64>>)> {
    if space.parity != 1 {
        return Err(Error::Unsupported(
            "Krein decomposition needs a parity-1 space".into(),
        ));
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (bucket, sgn) in [(&mut plus, 1.0), (&mut minus, -1.0)] {
        for j in 0..space.dim {
            // Column j of the projector ½(id + sgn·J).
            let mut v = Array1::from_elem(space.dim, C64::new(0.0, 0.0));
            for i in 0..space.dim {
                let idp = if i == j { 1.0 } else { 0.0 };
                v[i] = (C64::new(idp, 0.0) + space.j_op[[i, j]] * sgn) * 0.5;
            }
            // Gram-Schmidt against what the bucket already holds.
            for u in bucket.iter() {
                let c = scalar_product(u, &v);
                for i in 0..space.dim {
                    v[i] -= u[i] * c;
                }
            }
            let norm = scalar_product(&v, &v).re.sqrt();
            if norm > 1e-10 {
                bucket.push(v.map(|z| z / norm));
            }
        }
    }
    Ok((plus, minus))
}

/// Spectral (operator) norm via power iteration on T*T.
pub fn spectral_norm(t: &Array2<C64>) -> f64 {
    let (r, c) = t.dim();
    if r == 0 || c == 0 {
        return 0.0;
    }
    let gram = mat_mul(&dagger_plain(t), t);
    let trace = |m: &Array2<C64>| -> f64 { (0..m.nrows()).map(|i| m[[i, i]].re).sum() };
    if trace(&gram) <= 0.0 {
        return 0.0;
    }
    // Repeated squaring concentrates the spectrum on its top eigenvalue; the
    // trace ratio tr(G·G^{2^k})/tr(G^{2^k}) then reads it off. The estimate
    // depends on the spectrum only, so operators with equal singular values
    // get equal norms to rounding accuracy.
    let mut power = gram.clone();
    for _ in 0..24 {
        let t = trace(&power);
        power.mapv_inplace(|z| z / t);
        power = mat_mul(&power, &power);
    }
    let lambda = trace(&mat_mul(&gram, &power)) / trace(&power);
    lambda.max(0.0).sqrt()
}

/// One line of a C*-superalgebra axiom report.
#[derive(Clone, Debug)]
pub struct AxiomViolation {
    pub axiom: String,
    pub witness: String,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct CStarReport {
    pub violations: Vec<AxiomViolation>,
}

impl CStarReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the superinvolution axioms on a finite generator list with declared
/// †-images: ρ(a†) = ρ(a)†, (a†)† = a, (ab)† = (−1)^{|a||b|}b†a†, and
/// ‖a†‖ = ‖a‖ in spectral norm.
pub fn cstar_super_check(
    space: &HilbertSuper,
    generators: &[(SuperOperator, SuperOperator)],
) -> Result<CStarReport> {
    let mut violations = Vec::new();
    let mut record = |axiom: &str, witness: String, residual: f64, tol: f64| {
        if residual > tol {
            violations.push(AxiomViolation {
                axiom: axiom.to_string(),
                witness,
                residual,
            });
        }
    };
    for (idx, (a, a_dag)) in generators.iter().enumerate() {
        let computed = superadjoint(space, a)?;
        record(
            "representation: declared dagger equals superadjoint",
            format!("generator {idx}"),
            max_abs_diff(&computed.matrix, &a_dag.matrix),
            EXACT_TOL,
        );
        let double = superadjoint(space, &computed)?;
        record(
            "involutivity: (a dagger) dagger = a",
            format!("generator {idx}"),
            max_abs_diff(&double.matrix, &a.matrix),
            EXACT_TOL,
        );
        let na = spectral_norm(&a.matrix);
        let nd = spectral_norm(&computed.matrix);
        record(
            "isometry: norm of dagger equals norm",
            format!("generator {idx}"),
            (na - nd).abs(),
            1e-10 * na.max(1.0),
        );
    }
    for (i, (a, _)) in generators.iter().enumerate() {
        for (j, (b, _)) in generators.iter().enumerate() {
            let ab = a.compose(b);
            let lhs = superadjoint(space, &ab)?;
            let mut rhs = superadjoint(space, b)?.compose(&superadjoint(space, a)?);
            if a.degree * b.degree == 1 {
                rhs.matrix.mapv_inplace(|z| -z);
            }
            record(
                "antimultiplicativity with the graded sign",
                format!("pair ({i},{j})"),
                max_abs_diff(&lhs.matrix, &rhs.matrix),
                EXACT_TOL,
            );
        }
    }
    Ok(CStarReport { violations })
}

/// Left multiplication by θ^I on the exterior model.
pub fn wedge_multiplication(n: usize, i: IndexSubset) -> SuperOperator {
    let dim = 1usize << n;
    let mut matrix = Array2::from_elem((dim, dim), C64::new(0.0, 0.0));
    for jm in 0..dim as u32 {
        if i.mask() & jm != 0 {
            continue;
        }
        let j = IndexSubset::from_mask(jm);
        matrix[[(i.mask() | jm) as usize, jm as usize]] = C64::new(eps(i, j) as f64, 0.0);
    }
    SuperOperator {
        matrix,
        degree: (i.len() % 2) as u8,
    }
}
