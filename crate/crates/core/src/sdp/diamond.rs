//! Diamond-norm computation and the CPTP projection.
//!
//! For a Hermiticity-preserving map with normalized Choi operator `J` on
//! `H_out ⊗ H_in`, the diamond norm is the SDP
//!
//! ```text
//! ‖Φ‖◇ = d_in · max { tr(J Y) : −I⊗σ ⪯ Y ⪯ I⊗σ, σ a density operator }
//! ```
//!
//! solved here as a single joint program in `(Y, σ)`. The minimization form
//! used inside the CPTP projection is the Lagrangian dual, derived once and
//! enforced by an equivalence test rather than trusted:
//!
//! ```text
//! ‖Φ‖◇ = min { μ : P, Q ⪰ 0, P − Q = d_in·J, tr_out(P + Q) = μ·I }
//! ```

use num_complex::Complex64;
use rand::Rng;

use crate::channel::ChoiOperator;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_apply, hermitian_eig, hermiticity_deviation, hermitize, identity, kron, op_norm,
    partial_trace, trace_norm, CMat, DimPair, PureState, TriDims,
};

use super::problem::{SdpConstraint, SdpProblem};
use super::solver::{solve_sdp, SdpSolution, SdpStatus, SolverOptions};

/// How a diamond-norm value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiamondMethod {
    /// Joint SDP over `(Y, σ)`.
    Sdp,
    /// Closed form `d_in · ‖tr_out J‖∞` for PSD Choi operators.
    PositiveClosedForm,
    /// Random-restart ascent over pure inputs; a lower bound only.
    BruteforceLower,
}

/// A diamond-norm value with its certificate.
#[derive(Debug, Clone)]
pub struct DiamondValue {
    pub value: f64,
    pub method: DiamondMethod,
    /// Solver certificate, when an SDP was solved. The certificate refers to
    /// the input scaled by `1/normalization`.
    pub certificate: Option<SdpSolution>,
    pub normalization: f64,
}

/// Orthonormal Hermitian basis of n x n matrices (n² elements).
fn herm_basis(n: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(n * n);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        let mut e = CMat::zeros(n, n);
        e[(i, i)] = Complex64::new(1.0, 0.0);
        out.push(e);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sym = CMat::zeros(n, n);
            sym[(i, j)] = Complex64::new(inv_sqrt2, 0.0);
            sym[(j, i)] = Complex64::new(inv_sqrt2, 0.0);
            out.push(sym);
            let mut asym = CMat::zeros(n, n);
            asym[(i, j)] = Complex64::new(0.0, inv_sqrt2);
            asym[(j, i)] = Complex64::new(0.0, -inv_sqrt2);
            out.push(asym);
        }
    }
    out
}

/// Orthonormal basis of the traceless Hermitian n x n matrices
/// (n² − 1 elements, generalized Gell-Mann construction).
fn traceless_herm_basis(n: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(n * n - 1);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for l in 1..n {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut d = CMat::zeros(n, n);
        for i in 0..l {
            d[(i, i)] = Complex64::new(norm, 0.0);
        }
        d[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
        out.push(d);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sym = CMat::zeros(n, n);
            sym[(i, j)] = Complex64::new(inv_sqrt2, 0.0);
            sym[(j, i)] = Complex64::new(inv_sqrt2, 0.0);
            out.push(sym);
            let mut asym = CMat::zeros(n, n);
            asym[(i, j)] = Complex64::new(0.0, inv_sqrt2);
            asym[(j, i)] = Complex64::new(0.0, -inv_sqrt2);
            out.push(asym);
        }
    }
    out
}

/// Real trace inner product of Hermitian matrices.
fn hinner(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(p, q)| p.re * q.re + p.im * q.im)
        .sum()
}

fn validate_choi_block(j: &CMat, d_in: usize) -> Result<usize> {
    if j.nrows() != j.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "Choi block must be square, got {}x{}",
            j.nrows(),
            j.ncols()
        )));
    }
    if d_in == 0 || j.nrows() % d_in != 0 {
        return Err(Error::DimensionMismatch(format!(
            "side {} is not divisible by d_in = {d_in}",
            j.nrows()
        )));
    }
    let scale = op_norm(j).max(1.0);
    let dev = hermiticity_deviation(j);
    if dev > 1e-9 * scale {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: 1e-9 * scale,
        });
    }
    Ok(j.nrows() / d_in)
}

/// Build the joint-(Y, σ) maximization as a standard-form problem over two
/// PSD blocks `XA = I⊗σ − Y` and `XB = I⊗σ + Y`.
fn primal_diamond_problem(j_normalized: &CMat, d_in: usize, d_out: usize) -> SdpProblem {
    let d = d_in * d_out;
    let half = Complex64::new(d_in as f64 / 2.0, 0.0);
    let objective = vec![j_normalized * half, j_normalized * (-half)];

    let mut constraints = Vec::new();
    // XA + XB must lie in the subspace { I_out ⊗ σ }: orthogonality to every
    // traceless-out ⊗ Hermitian-in basis element
    let in_basis = herm_basis(d_in);
    for p in traceless_herm_basis(d_out) {
        for q in &in_basis {
            let g = kron(&p, q);
            constraints.push(SdpConstraint {
                mats: vec![g.clone(), g],
                rhs: 0.0,
            });
        }
    }
    // normalization tr(XA + XB) = 2 tr(I ⊗ σ) = 2 d_out
    constraints.push(SdpConstraint {
        mats: vec![identity(d), identity(d)],
        rhs: 2.0 * d_out as f64,
    });

    SdpProblem {
        block_dims: vec![d, d],
        objective,
        constraints,
    }
}

/// Diamond norm of the Hermiticity-preserving map with normalized Choi
/// operator `j` (need not be PSD), with explicit solver options.
pub fn diamond_norm_with(j: &CMat, d_in: usize, opts: &SolverOptions) -> Result<DiamondValue> {
    let d_out = validate_choi_block(j, d_in)?;
    let scale = op_norm(j);
    if scale < 1e-14 {
        return Ok(DiamondValue {
            value: 0.0,
            method: DiamondMethod::PositiveClosedForm,
            certificate: None,
            normalization: 1.0,
        });
    }
    let jn = j / Complex64::new(scale, 0.0);
    let problem = primal_diamond_problem(&jn, d_in, d_out);
    let sol = solve_sdp(&problem, opts)?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::SolverFailure {
            message: format!("diamond-norm SDP ended with status {:?}", sol.status),
            primal: -sol.value * scale,
            dual: -sol.dual_value * scale,
        });
    }
    Ok(DiamondValue {
        value: -sol.value * scale,
        method: DiamondMethod::Sdp,
        certificate: Some(sol),
        normalization: scale,
    })
}

/// Diamond norm with default solver options.
pub fn diamond_norm(j: &CMat, d_in: usize) -> Result<DiamondValue> {
    diamond_norm_with(j, d_in, &SolverOptions::default())
}

/// Diamond norm through the derived dual program
/// `min { μ : P, Q ⪰ 0, P − Q = d_in J, tr_out(P+Q) = μ I }`.
///
/// Exists as an independent path: its agreement with [`diamond_norm`] is a
/// release-blocking equivalence test, not an assumption.
pub fn diamond_norm_via_dual(j: &CMat, d_in: usize, opts: &SolverOptions) -> Result<DiamondValue> {
    let d_out = validate_choi_block(j, d_in)?;
    let d = d_in * d_out;
    let scale = op_norm(j);
    if scale < 1e-14 {
        return Ok(DiamondValue {
            value: 0.0,
            method: DiamondMethod::PositiveClosedForm,
            certificate: None,
            normalization: 1.0,
        });
    }
    let jn = j / Complex64::new(scale, 0.0);

    let zero_d = CMat::zeros(d, d);
    let zero_mu = CMat::zeros(1, 1);
    let one_mu = identity(1);

    let mut constraints = Vec::new();
    // P − Q = d_in J, coordinate by coordinate in an orthonormal basis
    for b in herm_basis(d) {
        let rhs = d_in as f64 * hinner(&b, &jn);
        constraints.push(SdpConstraint {
            mats: vec![b.clone(), -&b, zero_mu.clone()],
            rhs,
        });
    }
    // tr_out(P + Q) − μ I = 0
    for g in herm_basis(d_in) {
        let lifted = kron(&identity(d_out), &g);
        let tr_g: f64 = g.diagonal().iter().map(|z| z.re).sum();
        constraints.push(SdpConstraint {
            mats: vec![lifted.clone(), lifted, one_mu.clone() * Complex64::new(-tr_g, 0.0)],
            rhs: 0.0,
        });
    }
    let problem = SdpProblem {
        block_dims: vec![d, d, 1],
        objective: vec![zero_d.clone(), zero_d, one_mu],
        constraints,
    };
    let sol = solve_sdp(&problem, opts)?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::SolverFailure {
            message: format!("dual diamond-norm SDP ended with status {:?}", sol.status),
            primal: sol.value * scale,
            dual: sol.dual_value * scale,
        });
    }
    Ok(DiamondValue {
        value: sol.value * scale,
        method: DiamondMethod::Sdp,
        certificate: Some(sol),
        normalization: scale,
    })
}

/// Closed-form diamond norm `d_in · ‖tr_out J‖∞` for a PSD Choi operator.
pub fn diamond_norm_positive(j: &ChoiOperator) -> Result<DiamondValue> {
    let min_eig = j.min_eigenvalue()?;
    if min_eig < crate::channel::CP_EIG_FLOOR {
        return Err(Error::NotPositive {
            min_eigenvalue: min_eig,
        });
    }
    let dims = j.dims();
    let marginal = partial_trace(j.mat(), &[dims.d_out, dims.d_in], &[1])?;
    Ok(DiamondValue {
        value: dims.d_in as f64 * op_norm(&marginal),
        method: DiamondMethod::PositiveClosedForm,
        certificate: None,
        normalization: 1.0,
    })
}

/// The value `d_in‖(Φ⊗id)(ψψ†)‖₁` of one pure input, given as the matrix `A`
/// with `ψ = Σ_{ij} A_{ij} |j⟩⊗|i⟩` and `tr(A†A) = 1`; the output operator is
/// `d_in (I⊗A) J (I⊗A)†`.
fn pure_input_value(j: &CMat, a: &CMat, d_out: usize) -> (f64, CMat) {
    let lifted = kron(&identity(d_out), a);
    let out = hermitize(&(&lifted * j * lifted.adjoint())) * Complex64::new(a.ncols() as f64, 0.0);
    (trace_norm(&out), out)
}

/// Quadratic form `G` on `vec(A)` such that
/// `vec(A)† G vec(A) = d_in tr((I⊗A)† H (I⊗A) J)`.
fn input_quadratic_form(j: &CMat, h: &CMat, d_in: usize, d_out: usize) -> CMat {
    let m = d_in * d_in;
    let mut g = CMat::zeros(m, m);
    for jj in 0..d_in {
        for i in 0..d_in {
            let row = jj * d_in + i;
            for u in 0..d_in {
                for v in 0..d_in {
                    let col = u * d_in + v;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for a in 0..d_out {
                        for c in 0..d_out {
                            acc += h[(a * d_in + jj, c * d_in + u)]
                                * j[(c * d_in + v, a * d_in + i)];
                        }
                    }
                    g[(row, col)] = acc * Complex64::new(d_in as f64, 0.0);
                }
            }
        }
    }
    hermitize(&g)
}

/// Brute-force lower bound on the diamond norm: the best of `budget` random
/// pure inputs on `in ⊗ in`, each refined by alternating between the optimal
/// discriminating observable (the sign of the output operator) and the best
/// input for that observable (the top eigenvector of the induced quadratic
/// form). Always at most the SDP value.
pub fn diamond_lower_bound(
    j: &CMat,
    d_in: usize,
    budget: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    let d_out = validate_choi_block(j, d_in)?;
    if op_norm(j) < 1e-14 {
        return Ok(0.0);
    }
    let mut best = 0.0f64;
    for _ in 0..budget.max(1) {
        let psi = crate::haar::sample_haar_state(d_in * d_in, rng);
        // ψ components in (in ⊗ reference) order: A_{ij} = ψ[(j, i)]
        let mut a = CMat::from_fn(d_in, d_in, |i, jj| psi.amplitudes()[jj * d_in + i]);
        let mut current = 0.0f64;
        for _ in 0..50 {
            let (val, out) = pure_input_value(j, &a, d_out);
            if val > best {
                best = val;
            }
            if val <= current + 1e-12 {
                break;
            }
            current = val;
            let h = hermitian_apply(&out, |t| if t >= 0.0 { 1.0 } else { -1.0 })?;
            let g = input_quadratic_form(j, &h, d_in, d_out);
            let (_, vecs) = hermitian_eig(&g)?;
            let top = vecs.column(0);
            a = CMat::from_fn(d_in, d_in, |k, l| top[k * d_in + l]);
        }
    }
    Ok(best)
}

/// Diamond-norm projection onto CPTP maps: returns the Choi operator of the
/// closest channel to the Hermitian estimate `j_est` together with the
/// certified distance `min_{Φ CPTP} ‖Φ − Λ_est‖◇` (up to the gap tolerance).
///
/// Solved as one SDP coupling the dual diamond-norm epigraph with the CPTP
/// constraints `Ĵ ⪰ 0`, `tr_out Ĵ = I/d_in`:
///
/// ```text
/// min μ  s.t.  P, Q, Ĵ, T ⪰ 0,
///              P − Q = d_in (Ĵ − J_est),
///              tr_out(P + Q) + T = μ I.
/// ```
pub fn cptp_project(j_est: &CMat, dims: DimPair, gap_tol: f64) -> Result<(ChoiOperator, f64)> {
    let d_out_check = validate_choi_block(j_est, dims.d_in)?;
    if d_out_check != dims.d_out {
        return Err(Error::DimensionMismatch(format!(
            "estimate side {} does not match dims ({}, {})",
            j_est.nrows(),
            dims.d_out,
            dims.d_in
        )));
    }
    let d = dims.choi_dim();
    let d_in = dims.d_in;
    let d_out = dims.d_out;

    let zero_d = CMat::zeros(d, d);
    let zero_in = CMat::zeros(d_in, d_in);
    let zero_mu = CMat::zeros(1, 1);
    let one_mu = identity(1);

    let mut constraints = Vec::new();
    // P − Q − d_in Ĵ = −d_in J_est
    for b in herm_basis(d) {
        let rhs = -(d_in as f64) * hinner(&b, j_est);
        constraints.push(SdpConstraint {
            mats: vec![
                b.clone(),
                -&b,
                &b * Complex64::new(-(d_in as f64), 0.0),
                zero_in.clone(),
                zero_mu.clone(),
            ],
            rhs,
        });
    }
    // tr_out(P + Q) + T − μ I = 0
    for g in herm_basis(d_in) {
        let lifted = kron(&identity(d_out), &g);
        let tr_g: f64 = g.diagonal().iter().map(|z| z.re).sum();
        constraints.push(SdpConstraint {
            mats: vec![
                lifted.clone(),
                lifted,
                zero_d.clone(),
                g.clone(),
                one_mu.clone() * Complex64::new(-tr_g, 0.0),
            ],
            rhs: 0.0,
        });
    }
    // tr_out Ĵ = I / d_in
    for g in herm_basis(d_in) {
        let lifted = kron(&identity(d_out), &g);
        let tr_g: f64 = g.diagonal().iter().map(|z| z.re).sum();
        constraints.push(SdpConstraint {
            mats: vec![
                zero_d.clone(),
                zero_d.clone(),
                lifted,
                zero_in.clone(),
                zero_mu.clone(),
            ],
            rhs: tr_g / d_in as f64,
        });
    }

    let problem = SdpProblem {
        block_dims: vec![d, d, d, d_in, 1],
        objective: vec![
            zero_d.clone(),
            zero_d.clone(),
            zero_d,
            zero_in,
            one_mu,
        ],
        constraints,
    };
    let opts = SolverOptions {
        gap_tol,
        ..SolverOptions::default()
    };
    let sol = solve_sdp(&problem, &opts)?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::SolverFailure {
            message: format!(
                "CPTP projection SDP ended with status {:?}; best certified distance {:.6e}",
                sol.status, sol.value
            ),
            primal: sol.value,
            dual: sol.dual_value,
        });
    }
    let distance = sol.value;

    // polish the returned block onto the TP affine subspace exactly
    let j_hat_raw = sol.primal[2].clone();
    let marginal = partial_trace(&j_hat_raw, &[d_out, d_in], &[1])?;
    let correction = kron(
        &identity(d_out),
        &((identity(d_in) / Complex64::new(d_in as f64, 0.0) - marginal)
            / Complex64::new(d_out as f64, 0.0)),
    );
    let j_hat = ChoiOperator::new(dims, hermitize(&(j_hat_raw + correction)))?;
    Ok((j_hat, distance))
}

/// Both sides of the diamond-norm Cauchy–Schwarz inequality for two
/// purifications on `out ⊗ in ⊗ env`: with `J_ij = tr_E |Φ_i⟩⟨Φ_j|`, returns
/// `(‖J₁₂ + J₂₁‖◇, 2√(‖J₁₁‖◇ ‖J₂₂‖◇))`.
pub fn diamond_cs_check(
    phi1: &PureState,
    phi2: &PureState,
    dims: TriDims,
) -> Result<(f64, f64)> {
    let total = dims.total();
    if phi1.dim() != total || phi2.dim() != total {
        return Err(Error::DimensionMismatch(format!(
            "states of dims {} and {} do not match out*in*env = {total}",
            phi1.dim(),
            phi2.dim()
        )));
    }
    let d = dims.d_out * dims.d_in;
    let outer12: CMat = phi1.amplitudes() * phi2.amplitudes().adjoint();
    let j12 = partial_trace(&outer12, &[d, dims.d_env], &[0])?;
    let cross = hermitize(&(&j12 + j12.adjoint())) * Complex64::new(2.0, 0.0) / Complex64::new(2.0, 0.0);
    // ‖J₁₂ + J₂₁‖◇ with J₂₁ = J₁₂†
    let lhs = diamond_norm(&cross, dims.d_in)?.value;

    let j11 = partial_trace(&phi1.projector(), &[d, dims.d_env], &[0])?;
    let j22 = partial_trace(&phi2.projector(), &[d, dims.d_env], &[0])?;
    let n11 = diamond_norm_positive(&ChoiOperator::new(dims.choi(), j11)?)?.value;
    let n22 = diamond_norm_positive(&ChoiOperator::new(dims.choi(), j22)?)?.value;
    Ok((lhs, 2.0 * (n11 * n22).sqrt()))
}
