//! Dense complex operator algebra.
//!
//! Everything here works on [`CMat`] (a dense `Complex64` matrix) in the
//! conventions used throughout the crate: Choi-style bipartite operators live
//! on `out ⊗ in` with the row index `(a, i) = a * d_in + i`, and the
//! vectorization map sends `|i⟩⟨j|` to `|i⟩ ⊗ |j⟩` (row-major flattening).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex matrix used everywhere in the crate.
pub type CMat = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVec = DVector<Complex64>;

/// Relative Hermiticity tolerance for validated operator types.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Eigenvalue floor below which an operator is rejected as not PSD.
pub const PSD_EIG_FLOOR: f64 = -1e-9;
/// Tolerance on `tr(rho) = 1` for density operators.
pub const UNIT_TRACE_TOL: f64 = 1e-9;
/// Tolerance on the Euclidean norm of pure states.
pub const UNIT_NORM_TOL: f64 = 1e-10;

/// Input/output dimension pair of a channel-like object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimPair {
    pub d_out: usize,
    pub d_in: usize,
}

impl DimPair {
    pub fn new(d_out: usize, d_in: usize) -> Result<Self> {
        if d_out == 0 || d_in == 0 {
            return Err(Error::InvalidParameter(
                "dimensions must be at least 1".into(),
            ));
        }
        Ok(DimPair { d_out, d_in })
    }

    /// Dimension of the Choi space `out ⊗ in`.
    pub fn choi_dim(&self) -> usize {
        self.d_out * self.d_in
    }
}

/// Dimensions of a tripartite `out ⊗ in ⊗ env` pure state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriDims {
    pub d_out: usize,
    pub d_in: usize,
    pub d_env: usize,
}

impl TriDims {
    pub fn new(d_out: usize, d_in: usize, d_env: usize) -> Result<Self> {
        if d_out == 0 || d_in == 0 || d_env == 0 {
            return Err(Error::InvalidParameter(
                "dimensions must be at least 1".into(),
            ));
        }
        Ok(TriDims {
            d_out,
            d_in,
            d_env,
        })
    }

    pub fn total(&self) -> usize {
        self.d_out * self.d_in * self.d_env
    }

    pub fn choi(&self) -> DimPair {
        DimPair {
            d_out: self.d_out,
            d_in: self.d_in,
        }
    }
}

/// Complex identity matrix.
pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Conjugate transpose.
pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

/// Trace as a complex scalar.
pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().sum()
}

/// Frobenius norm.
pub fn frob_norm(m: &CMat) -> f64 {
    m.norm()
}

/// Symmetrize away anti-Hermitian round-off: `(M + M†)/2`.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Max-norm deviation from Hermiticity, `‖M − M†‖∞`.
pub fn hermiticity_deviation(m: &CMat) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    op_norm(&(m - m.adjoint()))
}

fn check_square(m: &CMat, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn check_finite(m: &CMat) -> Result<()> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParameter(
            "matrix contains non-finite entries".into(),
        ));
    }
    Ok(())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Schatten-norm order selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schatten {
    /// Trace norm, the sum of singular values.
    One,
    /// Frobenius norm.
    Two,
    /// Operator norm, the largest singular value.
    Infinity,
}

/// Schatten p-norm: the ℓ_p norm of the singular values.
pub fn schatten_norm(m: &CMat, p: Schatten) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    match p {
        Schatten::One => sv.iter().sum(),
        Schatten::Two => sv.iter().map(|s| s * s).sum::<f64>().sqrt(),
        Schatten::Infinity => sv.iter().copied().fold(0.0, f64::max),
    }
}

/// Trace norm `‖M‖₁`.
pub fn trace_norm(m: &CMat) -> f64 {
    schatten_norm(m, Schatten::One)
}

/// Operator norm `‖M‖∞` (largest singular value).
pub fn op_norm(m: &CMat) -> f64 {
    schatten_norm(m, Schatten::Infinity)
}

/// Row-major vectorization: `vec(|i⟩⟨j|) = |i⟩ ⊗ |j⟩`.
pub fn vec_mat(k: &CMat) -> CVec {
    let (r, c) = (k.nrows(), k.ncols());
    CVec::from_fn(r * c, |idx, _| k[(idx / c, idx % c)])
}

/// Inverse of [`vec_mat`]: reshape a `d_out * d_in` vector into a matrix.
pub fn unvec_mat(v: &CVec, d_out: usize, d_in: usize) -> Result<CMat> {
    if v.len() != d_out * d_in {
        return Err(Error::DimensionMismatch(format!(
            "cannot reshape vector of length {} into {}x{}",
            v.len(),
            d_out,
            d_in
        )));
    }
    Ok(CMat::from_fn(d_out, d_in, |i, j| v[i * d_in + j]))
}

/// Partial trace over the subsystems *not* listed in `keep`.
///
/// `dims` gives the subsystem dimensions in tensor order; `keep` lists the
/// subsystem indices that survive, in their original order.
pub fn partial_trace(x: &CMat, dims: &[usize], keep: &[usize]) -> Result<CMat> {
    check_square(x, "partial trace input")?;
    let total: usize = dims.iter().product();
    if x.nrows() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix side {} does not match product of dims {:?}",
            x.nrows(),
            dims
        )));
    }
    let n = dims.len();
    if keep.iter().any(|&i| i >= n) {
        return Err(Error::DimensionMismatch(format!(
            "keep indices {keep:?} out of range for {n} subsystems"
        )));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() {
        return Err(Error::InvalidParameter(
            "keep indices must be distinct".into(),
        ));
    }
    let traced: Vec<usize> = (0..n).filter(|i| !sorted.contains(i)).collect();

    // strides of the full index in subsystem order
    let mut stride = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        stride[i] = stride[i + 1] * dims[i + 1];
    }

    let kept_dim: usize = sorted.iter().map(|&i| dims[i]).product();
    let traced_dim: usize = traced.iter().map(|&i| dims[i]).product();

    // decompose a flat index over the listed subsystems into the full offset
    let offset = |flat: usize, subs: &[usize]| -> usize {
        let mut rem = flat;
        let mut off = 0;
        for &s in subs {
            let later: usize = subs
                .iter()
                .filter(|&&t| t > s)
                .map(|&t| dims[t])
                .product();
            let digit = (rem / later) % dims[s];
            rem %= later;
            off += digit * stride[s];
        }
        off
    };

    let mut out = CMat::zeros(kept_dim, kept_dim);
    for r in 0..kept_dim {
        let r_off = offset(r, &sorted);
        for c in 0..kept_dim {
            let c_off = offset(c, &sorted);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..traced_dim {
                let t_off = offset(t, &traced);
                acc += x[(r_off + t_off, c_off + t_off)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted
/// descending. Returns `(eigenvalues, eigenvectors)` with eigenvectors as
/// columns, so `H = V diag(λ) V†`.
pub fn hermitian_eig(h: &CMat) -> Result<(DVector<f64>, CMat)> {
    check_square(h, "hermitian_eig input")?;
    check_finite(h)?;
    let scale = op_norm(h).max(1.0);
    let dev = hermiticity_deviation(h);
    if dev > HERMITICITY_TOL * scale {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: HERMITICITY_TOL * scale,
        });
    }
    let se = hermitize(h).symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap());
    let vals = DVector::from_fn(n, |i, _| se.eigenvalues[order[i]]);
    let vecs = CMat::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    Ok((vals, vecs))
}

/// Apply a real function to the eigenvalues of a Hermitian matrix.
pub fn hermitian_apply(h: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat> {
    let (vals, vecs) = hermitian_eig(h)?;
    let n = h.nrows();
    let d = CMat::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(f(vals[i]), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(&vecs * d * vecs.adjoint())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &CMat) -> Result<f64> {
    let (vals, _) = hermitian_eig(h)?;
    Ok(vals[vals.len() - 1])
}

/// A square matrix validated to be Hermitian within [`HERMITICITY_TOL`].
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: CMat,
}

impl HermitianOperator {
    pub fn new(matrix: CMat) -> Result<Self> {
        check_square(&matrix, "Hermitian operator")?;
        check_finite(&matrix)?;
        let scale = op_norm(&matrix).max(1.0);
        let dev = hermiticity_deviation(&matrix);
        if dev > HERMITICITY_TOL * scale {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: HERMITICITY_TOL * scale,
            });
        }
        Ok(HermitianOperator {
            matrix: hermitize(&matrix),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn mat(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_mat(self) -> CMat {
        self.matrix
    }
}

/// A density operator: Hermitian, PSD within [`PSD_EIG_FLOOR`], unit trace.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: CMat,
}

impl DensityOperator {
    pub fn new(matrix: CMat) -> Result<Self> {
        let herm = HermitianOperator::new(matrix)?;
        let min = min_eigenvalue(herm.mat())?;
        if min < PSD_EIG_FLOOR {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        let tr = trace(herm.mat()).re;
        if (tr - 1.0).abs() > UNIT_TRACE_TOL {
            return Err(Error::NotNormalized(format!(
                "density operator trace {tr} deviates from 1"
            )));
        }
        Ok(DensityOperator {
            matrix: herm.into_mat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn mat(&self) -> &CMat {
        &self.matrix
    }

    /// Rank-1 density operator `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        DensityOperator {
            matrix: v * v.adjoint(),
        }
    }
}

/// A unit vector in `C^d`.
#[derive(Debug, Clone)]
pub struct PureState {
    amplitudes: CVec,
}

impl PureState {
    pub fn new(amplitudes: CVec) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("empty state vector".into()));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "state vector contains non-finite entries".into(),
            ));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotNormalized(format!(
                "state norm {norm} deviates from 1"
            )));
        }
        Ok(PureState { amplitudes })
    }

    /// Normalize an arbitrary nonzero vector into a state.
    pub fn normalized(v: CVec) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(
                "cannot normalize zero or non-finite vector".into(),
            ));
        }
        PureState::new(v / Complex64::new(norm, 0.0))
    }

    /// Computational basis state `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dim {dim}"
            )));
        }
        let mut v = CVec::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        PureState::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> CMat {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// Inner product `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Factor `Y = A^{1/2} K A^{1/2}` with `K` Hermitian and `‖K‖∞ ≤ 1`,
/// given `-A ⪯ Y ⪯ A`.
///
/// The construction restricts to the support of `A` and applies pseudo-inverse
/// square roots; eigenvalues of `A` below `1e-10 · λ_max` are treated as
/// kernel. Fails if the interval precondition does not hold within tolerance.
pub fn interval_contraction(
    a: &HermitianOperator,
    y: &HermitianOperator,
) -> Result<HermitianOperator> {
    if a.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!(
            "interval_contraction dims {} vs {}",
            a.dim(),
            y.dim()
        )));
    }
    let scale = op_norm(a.mat()).max(1.0);
    let pre_tol = 1e-8 * scale;

    let min_a = min_eigenvalue(a.mat())?;
    if min_a < -pre_tol {
        return Err(Error::NotPositive {
            min_eigenvalue: min_a,
        });
    }
    let lower = min_eigenvalue(&(a.mat() + y.mat()))?;
    let upper = min_eigenvalue(&(a.mat() - y.mat()))?;
    if lower < -pre_tol || upper < -pre_tol {
        return Err(Error::PreconditionViolated(format!(
            "-A <= Y <= A fails: min eig(A+Y) = {lower:.3e}, min eig(A-Y) = {upper:.3e}"
        )));
    }

    let (vals, vecs) = hermitian_eig(a.mat())?;
    let lambda_max = vals[0].max(0.0);
    if lambda_max == 0.0 {
        // A = 0 forces Y = 0 (within tolerance); K = 0.
        let n = a.dim();
        if op_norm(y.mat()) > pre_tol {
            return Err(Error::PreconditionViolated(
                "A = 0 but Y is nonzero".into(),
            ));
        }
        return HermitianOperator::new(CMat::zeros(n, n));
    }
    let cutoff = 1e-10 * lambda_max;
    let n = a.dim();
    let pinv_sqrt = CMat::from_fn(n, n, |i, j| {
        if i == j && vals[i] > cutoff {
            Complex64::new(1.0 / vals[i].sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let p = &vecs * pinv_sqrt * vecs.adjoint();
    let k = hermitize(&(&p * y.mat() * &p));
    HermitianOperator::new(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_cmat(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
        CMat::from_fn(rows, cols, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMat {
        hermitize(&random_cmat(rng, n, n))
    }

    fn random_cvec(rng: &mut impl Rng, n: usize) -> CVec {
        CVec::from_fn(n, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn kron_identity_case() {
        let i2 = identity(2);
        assert_eq!(kron(&i2, &i2), identity(4));
    }

    #[test]
    fn kron_basis_projectors() {
        // |0⟩⟨0| ⊗ |1⟩⟨1| is the rank-1 projector onto index 1 of dim 4.
        let p0 = PureState::basis(2, 0).unwrap().projector();
        let p1 = PureState::basis(2, 1).unwrap().projector();
        let k = kron(&p0, &p1);
        let expected = PureState::basis(4, 1).unwrap().projector();
        assert!(frob_norm(&(k - expected)) < 1e-14);
    }

    #[test]
    fn kron_mixed_product_oracle() {
        // (A ⊗ B)(x ⊗ y) == (Ax) ⊗ (By), checked by direct multiplication.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_cmat(&mut rng, 2, 2);
            let b = random_cmat(&mut rng, 2, 2);
            let x = random_cvec(&mut rng, 2);
            let y = random_cvec(&mut rng, 2);
            let xy = CVec::from_fn(4, |i, _| x[i / 2] * y[i % 2]);
            let lhs = kron(&a, &b) * xy;
            let ax = &a * &x;
            let by = &b * &y;
            let rhs = CVec::from_fn(4, |i, _| ax[i / 2] * by[i % 2]);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = random_hermitian(&mut rng, 2);
        let sigma = random_hermitian(&mut rng, 3);
        let x = kron(&rho, &sigma);
        let got = partial_trace(&x, &[2, 3], &[0]).unwrap();
        let expected = &rho * trace(&sigma);
        assert!(frob_norm(&(got - expected)) < 1e-12);
    }

    #[test]
    fn partial_trace_maximally_entangled_marginal() {
        // tr over the second factor of Ω (d_in = 2) is I/2.
        let omega = CVec::from_vec(vec![
            c(1.0 / 2f64.sqrt(), 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0 / 2f64.sqrt(), 0.0),
        ]);
        let proj = &omega * omega.adjoint();
        let got = partial_trace(&proj, &[2, 2], &[0]).unwrap();
        let expected = identity(2) * c(0.5, 0.0);
        assert!(frob_norm(&(got - expected)) < 1e-14);
    }

    /// Brute-force 6-index partial trace over the middle factor.
    fn naive_middle_trace(x: &CMat, d: (usize, usize, usize)) -> CMat {
        let (d0, d1, d2) = d;
        let mut out = CMat::zeros(d0 * d2, d0 * d2);
        for a in 0..d0 {
            for b in 0..d0 {
                for u in 0..d2 {
                    for v in 0..d2 {
                        let mut acc = c(0.0, 0.0);
                        for m in 0..d1 {
                            let row = (a * d1 + m) * d2 + u;
                            let col = (b * d1 + m) * d2 + v;
                            acc += x[(row, col)];
                        }
                        out[(a * d2 + u, b * d2 + v)] = acc;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn partial_trace_tripartite_matches_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = random_cmat(&mut rng, 12, 12);
        let got = partial_trace(&x, &[2, 3, 2], &[0, 2]).unwrap();
        let expected = naive_middle_trace(&x, (2, 3, 2));
        assert!(frob_norm(&(got - expected)) < 1e-12);
    }

    #[test]
    fn partial_trace_dimension_mismatch_errors() {
        let x = identity(5);
        assert!(partial_trace(&x, &[2, 3], &[0]).is_err());
    }

    #[test]
    fn vec_of_matrix_unit() {
        // vec(|0⟩⟨1|) in 2x2 is the basis vector at index 1 of dim 4.
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        let v = vec_mat(&m);
        let mut expected = CVec::zeros(4);
        expected[1] = c(1.0, 0.0);
        assert_eq!(v, expected);
    }

    #[test]
    fn unvec_inverts_vec() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let k = random_cmat(&mut rng, 3, 2);
        let back = unvec_mat(&vec_mat(&k), 3, 2).unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn vec_identity_is_omega_amplitudes() {
        // vec(I₂)/√2 equals |Ω⟩ for d_in = 2: expanding Ω entrywise gives
        // amplitude 1/√2 on |00⟩ and |11⟩.
        let v = vec_mat(&identity(2)) / c(2f64.sqrt(), 0.0);
        assert_abs_diff_eq!(v[0].re, 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(v[3].re, 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(v[1], c(0.0, 0.0));
        assert_eq!(v[2], c(0.0, 0.0));
    }

    #[test]
    fn unvec_length_mismatch_errors() {
        let v = CVec::zeros(5);
        assert!(unvec_mat(&v, 2, 2).is_err());
    }

    #[test]
    fn schatten_norms_of_identity() {
        let i4 = identity(4);
        assert_abs_diff_eq!(schatten_norm(&i4, Schatten::One), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            schatten_norm(&i4, Schatten::Infinity),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn schatten_norms_rank_one() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert_abs_diff_eq!(schatten_norm(&m, Schatten::One), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            schatten_norm(&m, Schatten::Infinity),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn trace_norm_matches_variational_characterisation() {
        // ‖H‖₁ equals tr(G H) at G = sign(H), the maximizer over -I ⪯ G ⪯ I.
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..10 {
            let h = random_hermitian(&mut rng, 4);
            let sign = hermitian_apply(&h, |t| if t >= 0.0 { 1.0 } else { -1.0 }).unwrap();
            let variational = trace(&(&sign * &h)).re;
            assert_abs_diff_eq!(trace_norm(&h), variational, epsilon = 1e-10);
        }
    }

    #[test]
    fn hermitian_eig_diagonal() {
        let d = CMat::from_diagonal(&CVec::from_vec(vec![c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]));
        let (vals, _) = hermitian_eig(&d).unwrap();
        assert_abs_diff_eq!(vals[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hermitian_eig_pauli_x() {
        let mut x = CMat::zeros(2, 2);
        x[(0, 1)] = c(1.0, 0.0);
        x[(1, 0)] = c(1.0, 0.0);
        let (vals, vecs) = hermitian_eig(&x).unwrap();
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], -1.0, epsilon = 1e-12);
        // eigenvector of +1 is |+⟩ up to phase
        let plus = vecs.column(0);
        assert_abs_diff_eq!((plus[0] / plus[1]).re, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn hermitian_eig_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let h = random_hermitian(&mut rng, 6);
            let (vals, vecs) = hermitian_eig(&h).unwrap();
            let d = CMat::from_diagonal(&CVec::from_fn(6, |i, _| c(vals[i], 0.0)));
            let rec = &vecs * d * vecs.adjoint();
            assert!(frob_norm(&(rec - &h)) < 1e-9);
            let unitary_dev = frob_norm(&(vecs.adjoint() * &vecs - identity(6)));
            assert!(unitary_dev < 1e-9);
        }
    }

    #[test]
    fn hermitian_eig_rejects_non_hermitian() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(hermitian_eig(&m).is_err());
    }

    #[test]
    fn hermitian_eig_matches_char_poly_roots_2x2() {
        // closed-form roots of the characteristic polynomial for 2x2
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let h = random_hermitian(&mut rng, 2);
            let tr = trace(&h).re;
            let det = (h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)]).re;
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            let (vals, _) = hermitian_eig(&h).unwrap();
            assert_abs_diff_eq!(vals[0], tr / 2.0 + disc, epsilon = 1e-10);
            assert_abs_diff_eq!(vals[1], tr / 2.0 - disc, epsilon = 1e-10);
        }
    }

    #[test]
    fn interval_contraction_identity_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let y0 = random_hermitian(&mut rng, 4);
        let y = &y0 / c(op_norm(&y0) * 1.5, 0.0); // ensure ‖Y‖∞ < 1
        let a = HermitianOperator::new(identity(4)).unwrap();
        let yh = HermitianOperator::new(y.clone()).unwrap();
        let k = interval_contraction(&a, &yh).unwrap();
        assert!(frob_norm(&(k.mat() - &y)) < 1e-10);
    }

    #[test]
    fn interval_contraction_zero_case() {
        let a = HermitianOperator::new(CMat::zeros(3, 3)).unwrap();
        let y = HermitianOperator::new(CMat::zeros(3, 3)).unwrap();
        let k = interval_contraction(&a, &y).unwrap();
        assert_eq!(op_norm(k.mat()), 0.0);

        let bad = HermitianOperator::new(identity(3)).unwrap();
        assert!(interval_contraction(&a, &bad).is_err());
    }

    #[test]
    fn interval_contraction_forward_construction_oracle() {
        // Build Y = A^{1/2} K₀ A^{1/2} from a random contraction K₀ and a
        // rank-deficient PSD A; the output must reconstruct Y.
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..200 {
            let n = 5;
            let g = random_cmat(&mut rng, n, 3);
            let a = &g * g.adjoint(); // PSD, rank <= 3
            let k0 = random_hermitian(&mut rng, n);
            let k0 = &k0 / c(op_norm(&k0) * 1.2, 0.0);
            // exact-rank square root: flooring removes eigensolver fuzz on the
            // kernel, which an unfloored sqrt would amplify to ~1e-8
            let sqrt_a = hermitian_apply(&a, |t| if t > 1e-12 { t.sqrt() } else { 0.0 }).unwrap();
            let y = hermitize(&(&sqrt_a * &k0 * &sqrt_a));

            let ah = HermitianOperator::new(a).unwrap();
            let yh = HermitianOperator::new(y.clone()).unwrap();
            let k = interval_contraction(&ah, &yh).unwrap();

            assert!(op_norm(k.mat()) <= 1.0 + 1e-8);
            let rec = hermitize(&(&sqrt_a * k.mat() * &sqrt_a));
            assert!(op_norm(&(rec - &y)) <= 1e-8);
        }
    }

    #[test]
    fn interval_contraction_rejects_violated_precondition() {
        let a = HermitianOperator::new(identity(2) * c(0.5, 0.0)).unwrap();
        let y = HermitianOperator::new(identity(2)).unwrap();
        assert!(interval_contraction(&a, &y).is_err());
    }

    #[test]
    fn density_operator_validation() {
        assert!(DensityOperator::new(identity(2) * c(0.5, 0.0)).is_ok());
        assert!(DensityOperator::new(identity(2)).is_err()); // trace 2
        let mut neg = CMat::zeros(2, 2);
        neg[(0, 0)] = c(1.5, 0.0);
        neg[(1, 1)] = c(-0.5, 0.0);
        assert!(DensityOperator::new(neg).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn partial_trace_preserves_trace(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_cmat(&mut rng, 12, 12);
            let reduced = partial_trace(&x, &[2, 3, 2], &[1]).unwrap();
            let d = (trace(&reduced) - trace(&x)).norm();
            prop_assert!(d < 1e-10);
        }

        #[test]
        fn vec_unvec_roundtrip_is_exact(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = random_cmat(&mut rng, 4, 3);
            let back = unvec_mat(&vec_mat(&k), 4, 3).unwrap();
            // bit-identical reshaping
            prop_assert!(k.iter().zip(back.iter()).all(|(a, b)| a == b));
        }

        #[test]
        fn trace_norm_dominates_op_norm(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_cmat(&mut rng, 4, 4);
            prop_assert!(trace_norm(&m) >= op_norm(&m) - 1e-12);
        }

        #[test]
        fn norms_agree_on_rank_one(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_cvec(&mut rng, 4);
            let v = random_cvec(&mut rng, 4);
            let m = u * v.adjoint();
            prop_assert!((trace_norm(&m) - op_norm(&m)).abs() < 1e-10);
        }
    }
}
