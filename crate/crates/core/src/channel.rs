//! Quantum-channel representations: Kraus families, normalized Choi
//! operators, isometries, conversions, and random instance generators.
//!
//! Conventions: the normalized Choi operator `J(Λ) = (Λ ⊗ id)(Ω)` lives on
//! `H_out ⊗ H_in` (row index `(a, i) = a·d_in + i`) and has unit trace. Any
//! Kraus family `{K_α}` satisfies `J = d_in⁻¹ Σ_α vec(K_α) vec(K_α)†`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::haar::sample_haar_isometry;
use crate::linalg::{
    self, dagger, hermitian_eig, hermitize, identity, op_norm, partial_trace,
    trace, unvec_mat, vec_mat, CMat, CVec, DensityOperator, DimPair, PureState,
};

/// Tolerance on `Σ K†K = I` for Kraus families.
pub const TRACE_PRESERVATION_TOL: f64 = 1e-8;
/// Tolerance on `tr(J) = 1` and `tr_out(J) = I/d_in` for Choi operators.
pub const CHOI_TOL: f64 = 1e-8;
/// Eigenvalues below `-1e-7` mark a Choi operator as not completely positive.
pub const CP_EIG_FLOOR: f64 = -1e-7;
/// Relative eigenvalue cutoff separating Kraus rank from eigensolver noise.
pub const RANK_CUTOFF: f64 = 1e-8;
/// Tolerance on `V†V = I` for isometries.
pub const ISOMETRY_TOL: f64 = 1e-9;

/// The normalized maximally entangled state vector `|Ω⟩` on `C^d ⊗ C^d`.
pub fn maximally_entangled(d: usize) -> PureState {
    let amp = 1.0 / (d as f64).sqrt();
    let mut v = CVec::zeros(d * d);
    for j in 0..d {
        v[j * d + j] = Complex64::new(amp, 0.0);
    }
    PureState::new(v).expect("omega is normalized")
}

/// A CPTP map given as a list of Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dims: DimPair,
    kraus_ops: Vec<CMat>,
}

impl KrausChannel {
    pub fn new(dims: DimPair, kraus_ops: Vec<CMat>) -> Result<Self> {
        if kraus_ops.is_empty() {
            return Err(Error::InvalidParameter(
                "Kraus family must be nonempty".into(),
            ));
        }
        for k in &kraus_ops {
            if k.nrows() != dims.d_out || k.ncols() != dims.d_in {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.nrows(),
                    k.ncols(),
                    dims.d_out,
                    dims.d_in
                )));
            }
        }
        let mut sum = CMat::zeros(dims.d_in, dims.d_in);
        for k in &kraus_ops {
            sum += dagger(k) * k;
        }
        let dev = op_norm(&(sum - identity(dims.d_in)));
        if dev > TRACE_PRESERVATION_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(KrausChannel { dims, kraus_ops })
    }

    pub fn dims(&self) -> DimPair {
        self.dims
    }

    pub fn kraus_ops(&self) -> &[CMat] {
        &self.kraus_ops
    }

    /// The identity channel on `C^d`.
    pub fn identity_channel(d: usize) -> Result<Self> {
        KrausChannel::new(DimPair::new(d, d)?, vec![identity(d)])
    }

    /// The unitary (or isometric) channel `ρ ↦ VρV†`.
    pub fn from_isometry(v: &Isometry) -> Self {
        KrausChannel {
            dims: v.dims(),
            kraus_ops: vec![v.mat().clone()],
        }
    }

    /// The completely dephasing qubit channel `{|0⟩⟨0|, |1⟩⟨1|}`.
    pub fn dephasing_qubit() -> Self {
        let dims = DimPair::new(2, 2).unwrap();
        let ops = (0..2)
            .map(|b| {
                let e = PureState::basis(2, b).unwrap();
                e.projector()
            })
            .collect();
        KrausChannel { dims, kraus_ops: ops }
    }

    /// State-preparation channel (`d_in = 1`) for a rank-`r` state
    /// `ρ = Σ λ_i |v_i⟩⟨v_i|`: Kraus operators `√λ_i |v_i⟩`.
    pub fn state_preparation(rho: &DensityOperator, rank_cap: usize) -> Result<Self> {
        let (vals, vecs) = hermitian_eig(rho.mat())?;
        let cutoff = RANK_CUTOFF * vals[0].max(0.0);
        let mut ops = Vec::new();
        for i in 0..vals.len() {
            if vals[i] > cutoff {
                let col = vecs.column(i) * Complex64::new(vals[i].sqrt(), 0.0);
                ops.push(CMat::from_fn(rho.dim(), 1, |r, _| col[r]));
            }
        }
        if ops.len() > rank_cap {
            return Err(Error::RankTooLarge {
                rank: ops.len(),
                max: rank_cap,
            });
        }
        KrausChannel::new(DimPair::new(rho.dim(), 1)?, ops)
    }
}

/// Normalized Choi operator on `out ⊗ in` with dimension metadata.
#[derive(Debug, Clone)]
pub struct ChoiOperator {
    dims: DimPair,
    matrix: CMat,
    /// Set when an unnormalized input was rescaled to unit trace on ingestion.
    rescaled: bool,
}

impl ChoiOperator {
    /// Validate a Hermitian, unit-trace Choi operator. Inputs whose trace
    /// deviates from 1 beyond tolerance are rescaled and flagged.
    pub fn new(dims: DimPair, matrix: CMat) -> Result<Self> {
        let side = dims.choi_dim();
        if matrix.nrows() != side || matrix.ncols() != side {
            return Err(Error::DimensionMismatch(format!(
                "Choi operator side {} does not match d_out*d_in = {}",
                matrix.nrows(),
                side
            )));
        }
        let scale = op_norm(&matrix).max(1.0);
        let dev = linalg::hermiticity_deviation(&matrix);
        if dev > linalg::HERMITICITY_TOL * scale {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: linalg::HERMITICITY_TOL * scale,
            });
        }
        let matrix = hermitize(&matrix);
        let tr = trace(&matrix).re;
        if (tr - 1.0).abs() <= CHOI_TOL {
            return Ok(ChoiOperator {
                dims,
                matrix,
                rescaled: false,
            });
        }
        if tr.abs() < 1e-12 {
            return Err(Error::NotNormalized(
                "Choi operator has vanishing trace and cannot be rescaled".into(),
            ));
        }
        Ok(ChoiOperator {
            dims,
            matrix: matrix / Complex64::new(tr, 0.0),
            rescaled: true,
        })
    }

    pub fn dims(&self) -> DimPair {
        self.dims
    }

    pub fn mat(&self) -> &CMat {
        &self.matrix
    }

    /// Whether the input was rescaled to unit trace during construction.
    pub fn was_rescaled(&self) -> bool {
        self.rescaled
    }

    /// Smallest eigenvalue; complete positivity means this is ≳ 0.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        linalg::min_eigenvalue(&self.matrix)
    }

    /// Complete positivity within the Choi eigenvalue floor.
    pub fn is_cp(&self) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= CP_EIG_FLOOR)
    }

    /// Trace preservation: `tr_out(J) = I/d_in` within tolerance.
    pub fn is_tp(&self) -> Result<bool> {
        let marginal = partial_trace(&self.matrix, &[self.dims.d_out, self.dims.d_in], &[1])?;
        let target = identity(self.dims.d_in) / Complex64::new(self.dims.d_in as f64, 0.0);
        Ok(op_norm(&(marginal - target)) <= CHOI_TOL)
    }

    /// Numerical rank with the relative eigenvalue cutoff.
    pub fn rank(&self) -> Result<usize> {
        let (vals, _) = hermitian_eig(&self.matrix)?;
        let cutoff = RANK_CUTOFF * vals[0].max(0.0);
        Ok(vals.iter().filter(|&&v| v > cutoff).count())
    }
}

/// A linear map `V` with `V†V = I` (so `d_in ≤ d_out`).
#[derive(Debug, Clone)]
pub struct Isometry {
    dims: DimPair,
    matrix: CMat,
}

impl Isometry {
    pub fn new(matrix: CMat) -> Result<Self> {
        let dims = DimPair::new(matrix.nrows(), matrix.ncols())?;
        if dims.d_in > dims.d_out {
            return Err(Error::DimensionMismatch(format!(
                "isometry requires d_in <= d_out, got {} > {}",
                dims.d_in, dims.d_out
            )));
        }
        let dev = op_norm(&(dagger(&matrix) * &matrix - identity(dims.d_in)));
        if dev > ISOMETRY_TOL {
            return Err(Error::NotNormalized(format!(
                "V†V deviates from identity by {dev:.3e}"
            )));
        }
        Ok(Isometry { dims, matrix })
    }

    pub fn dims(&self) -> DimPair {
        self.dims
    }

    pub fn mat(&self) -> &CMat {
        &self.matrix
    }
}

/// `J(Λ) = d_in⁻¹ Σ_α vec(K_α) vec(K_α)†`.
pub fn kraus_to_choi(c: &KrausChannel) -> ChoiOperator {
    let side = c.dims().choi_dim();
    let mut j = CMat::zeros(side, side);
    for k in c.kraus_ops() {
        let v = vec_mat(k);
        j += &v * v.adjoint();
    }
    j /= Complex64::new(c.dims().d_in as f64, 0.0);
    ChoiOperator {
        dims: c.dims(),
        matrix: hermitize(&j),
        rescaled: false,
    }
}

/// Spectral Kraus family `K_α = √(d_in λ_α) vec⁻¹(v_α)` of a CP, TP Choi
/// operator. The Kraus count is the numerical rank of `J`.
pub fn choi_to_kraus(j: &ChoiOperator) -> Result<KrausChannel> {
    let (vals, vecs) = hermitian_eig(j.mat())?;
    let min = vals[vals.len() - 1];
    if min < CP_EIG_FLOOR {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    let dims = j.dims();
    let cutoff = RANK_CUTOFF * vals[0].max(0.0);
    let mut ops = Vec::new();
    for i in 0..vals.len() {
        if vals[i] > cutoff {
            let scale = Complex64::new((dims.d_in as f64 * vals[i]).sqrt(), 0.0);
            let col = CVec::from_fn(vecs.nrows(), |r, _| vecs[(r, i)] * scale);
            ops.push(unvec_mat(&col, dims.d_out, dims.d_in)?);
        }
    }
    // truncation discards up to rank*cutoff of trace mass; restore exact
    // trace preservation with an M^{-1/2} polish of the same order
    let mut m = CMat::zeros(dims.d_in, dims.d_in);
    for k in &ops {
        m += dagger(k) * k;
    }
    let dev = op_norm(&(&m - identity(dims.d_in)));
    if dev > 1e-5 {
        return Err(Error::NotTracePreserving(dev));
    }
    if dev > 1e-12 {
        let m_inv_sqrt = crate::linalg::hermitian_apply(&m, |t| 1.0 / t.max(1e-12).sqrt())?;
        for k in &mut ops {
            *k *= &m_inv_sqrt;
        }
    }
    KrausChannel::new(dims, ops)
}

/// Apply the channel to a density operator: `Λ(ρ) = Σ K_α ρ K_α†`.
pub fn apply_channel(c: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dim() != c.dims().d_in {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} does not match channel input dim {}",
            rho.dim(),
            c.dims().d_in
        )));
    }
    let mut out = CMat::zeros(c.dims().d_out, c.dims().d_out);
    for k in c.kraus_ops() {
        out += k * rho.mat() * dagger(k);
    }
    DensityOperator::new(hermitize(&out))
}

/// Kraus-rank dimension constraint: `⌈d_in/d_out⌉ ≤ k ≤ d_in·d_out`.
pub fn validate_rank_bounds(dims: DimPair, k: usize) -> bool {
    let lower = dims.d_in.div_ceil(dims.d_out);
    k >= lower && k <= dims.d_in * dims.d_out
}

/// Random Kraus-rank-`k` channel via a Stinespring dilation with a
/// Haar-random isometry `V : C^{d_in} → C^{d_out·k}`, so the Kraus operators
/// are `K_α = (I ⊗ ⟨α|) V` and the channel is exactly CPTP.
pub fn random_channel(dims: DimPair, k: usize, rng: &mut impl Rng) -> Result<KrausChannel> {
    if !validate_rank_bounds(dims, k) {
        return Err(Error::InvalidRank {
            d_in: dims.d_in,
            d_out: dims.d_out,
            k,
        });
    }
    let v = sample_haar_isometry(dims.d_out * k, dims.d_in, rng)?;
    let ops = (0..k)
        .map(|alpha| CMat::from_fn(dims.d_out, dims.d_in, |a, j| v[(a * k + alpha, j)]))
        .collect();
    KrausChannel::new(dims, ops)
}

/// Input marginal `tr_out(J)`; equals `I/d_in` exactly for CPTP channels.
pub fn choi_input_marginal(j: &ChoiOperator) -> Result<DensityOperator> {
    let m = partial_trace(j.mat(), &[j.dims().d_out, j.dims().d_in], &[1])?;
    DensityOperator::new(hermitize(&m))
}

/// Choi operator of the difference of two channels, `J(Λ_A) − J(Λ_B)`,
/// as a raw Hermitian block for the diamond-norm program.
pub fn choi_difference(a: &KrausChannel, b: &KrausChannel) -> Result<CMat> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch(format!(
            "channel dims {:?} vs {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(kraus_to_choi(a).mat() - kraus_to_choi(b).mat())
}
