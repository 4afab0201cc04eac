//! Specializations of the learning pipeline: state preparation (`d_in = 1`),
//! isometries (`k = 1`), and binary / multi-outcome POVMs via their
//! classical–quantum channels.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{choi_to_kraus, kraus_to_choi, ChoiOperator, Isometry, KrausChannel};
use crate::error::{Error, Result};
use crate::haar::RngStream;
use crate::linalg::{
    hermitian_apply, hermitian_eig, hermiticity_deviation, hermitize, identity, op_norm,
    trace_norm, CMat, DensityOperator, DimPair, HermitianOperator,
};
use crate::sdp::diamond_norm;
use crate::tomography::{run_algorithm1_detailed, TomographyConfig, TrialRecord};

/// Eigenvalue floor accepted when validating POVM effects.
pub const POVM_EIG_FLOOR: f64 = -1e-7;
/// Tolerance on `Σ_j E_j = I` for multi-outcome POVMs.
pub const POVM_SUM_TOL: f64 = 1e-8;

/// A two-outcome measurement, specified by its first effect `E`
/// (the second is `I − E`).
#[derive(Debug, Clone)]
pub struct BinaryPovm {
    dim: usize,
    effect: CMat,
}

impl BinaryPovm {
    pub fn new(effect: CMat) -> Result<Self> {
        let herm = HermitianOperator::new(effect)?;
        let dim = herm.dim();
        let e = herm.into_mat();
        let (vals, _) = hermitian_eig(&e)?;
        if vals.min() < POVM_EIG_FLOOR {
            return Err(Error::NotPositive {
                min_eigenvalue: vals.min(),
            });
        }
        if vals.max() > 1.0 - POVM_EIG_FLOOR {
            return Err(Error::InvalidParameter(format!(
                "effect has eigenvalue {} above 1",
                vals.max()
            )));
        }
        Ok(BinaryPovm { dim, effect: e })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effect(&self) -> &CMat {
        &self.effect
    }
}

/// An `L`-outcome POVM: PSD effects summing to the identity.
#[derive(Debug, Clone)]
pub struct MultiPovm {
    dim: usize,
    effects: Vec<CMat>,
}

impl MultiPovm {
    pub fn new(effects: Vec<CMat>) -> Result<Self> {
        if effects.len() < 2 {
            return Err(Error::InvalidParameter(
                "a POVM needs at least two outcomes".into(),
            ));
        }
        let dim = effects[0].nrows();
        let mut sum = CMat::zeros(dim, dim);
        for e in &effects {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::DimensionMismatch(
                    "POVM effects must share one square dimension".into(),
                ));
            }
            let scale = op_norm(e).max(1.0);
            if hermiticity_deviation(e) > 1e-9 * scale {
                return Err(Error::NotHermitian {
                    deviation: hermiticity_deviation(e),
                    tolerance: 1e-9 * scale,
                });
            }
            let (vals, _) = hermitian_eig(&hermitize(e))?;
            if vals.min() < POVM_EIG_FLOOR {
                return Err(Error::NotPositive {
                    min_eigenvalue: vals.min(),
                });
            }
            sum += e;
        }
        let dev = op_norm(&(sum - identity(dim)));
        if dev > POVM_SUM_TOL {
            return Err(Error::NotNormalized(format!(
                "POVM effects sum deviates from identity by {dev:.3e}"
            )));
        }
        Ok(MultiPovm {
            dim,
            effects: effects.iter().map(hermitize).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effects(&self) -> &[CMat] {
        &self.effects
    }

    pub fn num_outcomes(&self) -> usize {
        self.effects.len()
    }
}

/// Outcome of a state-learning run.
#[derive(Debug, Clone)]
pub struct StateLearnOutcome {
    pub estimate: DensityOperator,
    /// Realized `½‖ρ̂ − ρ‖₁`.
    pub trace_distance: f64,
    pub record: TrialRecord,
}

/// Outcome of an isometry-learning run.
#[derive(Debug, Clone)]
pub struct IsometryLearnOutcome {
    pub estimate: KrausChannel,
    /// Realized `½‖Λ̂ − Λ‖◇`.
    pub diamond_error: f64,
    pub record: TrialRecord,
}

/// Outcome of a binary-POVM learning run.
#[derive(Debug, Clone)]
pub struct BinaryPovmLearnOutcome {
    pub estimate: BinaryPovm,
    /// Realized `‖Ê − E‖∞`.
    pub opnorm_error: f64,
    pub record: TrialRecord,
}

/// Outcome of a multi-outcome POVM learning run.
#[derive(Debug, Clone)]
pub struct MultiPovmLearnOutcome {
    pub estimate: MultiPovm,
    /// Max over outcomes of `‖Ê_j − E_j‖∞` after renormalization.
    pub max_opnorm_error: f64,
    /// Per-element operator-norm errors before the renormalization step,
    /// matching the per-element learning guarantee exactly.
    pub raw_opnorm_errors: Vec<f64>,
    pub records: Vec<TrialRecord>,
}

fn pipeline_config(
    dims: DimPair,
    k: usize,
    n_uses: usize,
    delta: f64,
    seed: RngStream,
) -> TomographyConfig {
    TomographyConfig {
        dims,
        k,
        n_uses,
        delta,
        gap_tol: 1e-7,
        seed,
    }
}

/// Learn a rank-≤`r` state from `n_uses` copies by running the channel
/// pipeline on its preparation channel (`d_in = 1`); for state preparations
/// the diamond distance is exactly the trace distance.
pub fn learn_state(
    rho: &DensityOperator,
    r: usize,
    n_uses: usize,
    delta: f64,
    seed: RngStream,
) -> Result<StateLearnOutcome> {
    let channel = KrausChannel::state_preparation(rho, r)?;
    let cfg = pipeline_config(DimPair::new(rho.dim(), 1)?, r, n_uses, delta, seed);
    let (record, j_hat) = run_algorithm1_detailed(&channel, &cfg)?;
    // with d_in = 1 the projected Choi operator is the state estimate itself
    let estimate = DensityOperator::new(j_hat.mat().clone())?;
    let trace_distance = 0.5 * trace_norm(&(estimate.mat() - rho.mat()));
    Ok(StateLearnOutcome {
        estimate,
        trace_distance,
        record,
    })
}

/// Learn an isometric channel (`k = 1` fast path: the Choi state is already
/// pure, so no coherent purification is involved).
pub fn learn_isometry(
    v: &Isometry,
    n_uses: usize,
    delta: f64,
    seed: RngStream,
) -> Result<IsometryLearnOutcome> {
    let channel = KrausChannel::from_isometry(v);
    let cfg = pipeline_config(v.dims(), 1, n_uses, delta, seed);
    let (record, j_hat) = run_algorithm1_detailed(&channel, &cfg)?;
    let estimate = choi_to_kraus(&j_hat)?;
    Ok(IsometryLearnOutcome {
        estimate,
        diamond_error: 0.5 * record.diamond_error_final,
        record,
    })
}

/// Classical–quantum channel `Λ_E(ρ) = Σ_b tr(M_b ρ) |b⟩⟨b|` of a binary
/// POVM. Its normalized Choi operator is `Σ_b |b⟩⟨b| ⊗ M_bᵀ / d` and its
/// Kraus rank is at most `2d`.
pub fn povm_to_channel(m: &BinaryPovm) -> Result<KrausChannel> {
    let d = m.dim();
    let dims = DimPair::new(2, d)?;
    let mut kraus = Vec::new();
    for (b, effect) in [m.effect().clone(), identity(d) - m.effect()]
        .into_iter()
        .enumerate()
    {
        let (vals, vecs) = hermitian_eig(&effect)?;
        for i in 0..d {
            let w = vals[i].max(0.0);
            if w > 1e-14 {
                // K = √w |b⟩⟨u_i|
                let mut k = CMat::zeros(2, d);
                let sq = Complex64::new(w.sqrt(), 0.0);
                for c in 0..d {
                    k[(b, c)] = sq * vecs[(c, i)].conj();
                }
                kraus.push(k);
            }
        }
    }
    KrausChannel::new(dims, kraus)
}

/// Both sides of the binary-POVM diamond-norm identity:
/// `(‖Λ_E − Λ_F‖◇, 2‖E − F‖∞)`.
pub fn povm_diamond_identity(e: &BinaryPovm, f: &BinaryPovm) -> Result<(f64, f64)> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch(format!(
            "POVM dims {} vs {}",
            e.dim(),
            f.dim()
        )));
    }
    let je = kraus_to_choi(&povm_to_channel(e)?);
    let jf = kraus_to_choi(&povm_to_channel(f)?);
    let lhs = diamond_norm(&(je.mat() - jf.mat()), e.dim())?.value;
    let rhs = 2.0 * op_norm(&(e.effect() - f.effect()));
    Ok((lhs, rhs))
}

/// Clip a Hermitian matrix's eigenvalues into `[0, 1]`: the Frobenius-norm
/// projection onto the set of valid effects, so it never increases the
/// Frobenius error to any `0 ⪯ E ⪯ I`. In operator norm it can increase the
/// error slightly, but never beyond a factor 2, since the clip itself moves
/// the matrix by at most `dist_∞(X, [0, I]) ≤ ‖X − E‖∞`.
pub fn clip_effect(x: &CMat) -> Result<CMat> {
    hermitian_apply(x, |t| t.clamp(0.0, 1.0))
}

/// Extract the first effect estimate from a learned binary-POVM channel:
/// transpose and rescale the `b = 0` diagonal block of the Choi operator,
/// then eigen-clip into `[0, I]`.
pub fn extract_binary_effect(j: &ChoiOperator) -> Result<CMat> {
    let dims = j.dims();
    if dims.d_out != 2 {
        return Err(Error::DimensionMismatch(format!(
            "binary-POVM channels have d_out = 2, got {}",
            dims.d_out
        )));
    }
    let d = dims.d_in;
    let block0 = CMat::from_fn(d, d, |i, jj| j.mat()[(i, jj)]);
    clip_effect(&hermitize(&(block0.transpose() * Complex64::new(d as f64, 0.0))))
}

/// Learn a binary POVM in operator norm through its channel, with `k = 2d`.
pub fn learn_binary_povm(
    e: &BinaryPovm,
    n_uses: usize,
    delta: f64,
    seed: RngStream,
) -> Result<BinaryPovmLearnOutcome> {
    let d = e.dim();
    let d_tot = 4 * d * d;
    if delta <= 4.0 * (-(d_tot as f64)).exp() {
        return Err(Error::OutOfRegime { delta, d_tot });
    }
    let channel = povm_to_channel(e)?;
    let dims = DimPair::new(2, d)?;
    let cfg = pipeline_config(dims, 2 * d, n_uses, delta, seed);
    let (record, j_hat) = run_algorithm1_detailed(&channel, &cfg)?;
    let e_hat = extract_binary_effect(&j_hat)?;
    let opnorm_error = op_norm(&(&e_hat - e.effect()));
    Ok(BinaryPovmLearnOutcome {
        estimate: BinaryPovm::new(e_hat)?,
        opnorm_error,
        record,
    })
}

/// Learn an `L`-outcome POVM by learning each binary coarse-graining
/// `{E_j, I − E_j}` independently with failure budget `δ/L`, then restoring
/// the sum constraint by spreading the residual evenly:
/// `Ê_j ← Ê_j + (I − Σ Ê_i)/L`.
pub fn learn_multi_povm(
    m: &MultiPovm,
    n_per_element: usize,
    delta: f64,
    seed: RngStream,
) -> Result<MultiPovmLearnOutcome> {
    let l = m.num_outcomes();
    let d = m.dim();
    let d_tot = 4 * d * d;
    let delta_j = delta / l as f64;
    if delta_j <= 4.0 * (-(d_tot as f64)).exp() {
        return Err(Error::OutOfRegime {
            delta: delta_j,
            d_tot,
        });
    }

    let mut raw_estimates = Vec::with_capacity(l);
    let mut raw_errors = Vec::with_capacity(l);
    let mut records = Vec::with_capacity(l);
    for (j, effect) in m.effects().iter().enumerate() {
        let binary = BinaryPovm::new(effect.clone())?;
        let element_seed = RngStream::new(seed.seed, seed.stream_id.wrapping_add(j as u64 + 1));
        let outcome = learn_binary_povm(&binary, n_per_element, delta_j, element_seed)?;
        raw_errors.push(outcome.opnorm_error);
        raw_estimates.push(outcome.estimate.effect().clone());
        records.push(outcome.record);
    }

    // renormalize: spread the sum residual evenly across the outcomes
    let mut residual = identity(d);
    for e in &raw_estimates {
        residual -= e;
    }
    let share = residual / Complex64::new(l as f64, 0.0);
    let renormalized: Vec<CMat> = raw_estimates.iter().map(|e| e + &share).collect();
    let max_opnorm_error = renormalized
        .iter()
        .zip(m.effects())
        .map(|(e_hat, e)| op_norm(&(e_hat - e)))
        .fold(0.0, f64::max);
    Ok(MultiPovmLearnOutcome {
        estimate: MultiPovm::new(renormalized)?,
        max_opnorm_error,
        raw_opnorm_errors: raw_errors,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_channel, random_channel};
    use crate::haar::{sample_haar_state, sample_haar_unitary};
    use crate::linalg::{frob_norm, trace, PureState};
    use approx::assert_abs_diff_eq;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_effect(rng: &mut impl Rng, d: usize) -> BinaryPovm {
        // random Hermitian squeezed into [0, I]
        let h = hermitize(&CMat::from_fn(d, d, |_, _| {
            c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        }));
        let lo = hermitian_eig(&h).unwrap().0.min();
        let hi = hermitian_eig(&h).unwrap().0.max();
        let scaled = (h - identity(d) * c64(lo, 0.0)) / c64((hi - lo).max(1e-9), 0.0);
        BinaryPovm::new(scaled).unwrap()
    }

    #[test]
    fn binary_povm_validation() {
        assert!(BinaryPovm::new(identity(2) * c64(0.5, 0.0)).is_ok());
        assert!(BinaryPovm::new(identity(2) * c64(1.5, 0.0)).is_err());
        assert!(BinaryPovm::new(identity(2) * c64(-0.1, 0.0)).is_err());
    }

    #[test]
    fn multi_povm_validation() {
        let third = identity(2) / c64(3.0, 0.0);
        assert!(MultiPovm::new(vec![third.clone(), third.clone(), third.clone()]).is_ok());
        assert!(MultiPovm::new(vec![third.clone(), third]).is_err()); // sums to 2/3 I
    }

    #[test]
    fn povm_channel_statistics_match_born_rule() {
        let mut rng = crate::haar::RngStream::new(80, 0).rng();
        for _ in 0..20 {
            let e = random_effect(&mut rng, 3);
            let ch = povm_to_channel(&e).unwrap();
            let psi = sample_haar_state(3, &mut rng);
            let rho = DensityOperator::from_pure(&psi);
            let out = apply_channel(&ch, &rho).unwrap();
            let p0 = trace(&(e.effect() * rho.mat())).re;
            assert_abs_diff_eq!(out.mat()[(0, 0)].re, p0, epsilon = 1e-10);
            assert_abs_diff_eq!(out.mat()[(1, 1)].re, 1.0 - p0, epsilon = 1e-10);
            assert!(out.mat()[(0, 1)].norm() < 1e-12);
        }
    }

    #[test]
    fn povm_channel_trivial_effects() {
        // E = I: the channel constantly outputs |0⟩⟨0|
        let e = BinaryPovm::new(identity(2)).unwrap();
        let ch = povm_to_channel(&e).unwrap();
        let mut rng = crate::haar::RngStream::new(81, 0).rng();
        let rho = DensityOperator::from_pure(&sample_haar_state(2, &mut rng));
        let out = apply_channel(&ch, &rho).unwrap();
        let e0 = PureState::basis(2, 0).unwrap().projector();
        assert!(frob_norm(&(out.mat() - e0)) < 1e-10);

        // E = I/2: the output is I/2 regardless of input
        let e = BinaryPovm::new(identity(2) * c64(0.5, 0.0)).unwrap();
        let ch = povm_to_channel(&e).unwrap();
        let out = apply_channel(&ch, &rho).unwrap();
        assert!(frob_norm(&(out.mat() - identity(2) * c64(0.5, 0.0))) < 1e-10);
    }

    #[test]
    fn povm_channel_choi_block_structure() {
        // J(Λ_E) = Σ_b |b⟩⟨b| ⊗ M_bᵀ / d
        let mut rng = crate::haar::RngStream::new(82, 0).rng();
        let e = random_effect(&mut rng, 3);
        let j = kraus_to_choi(&povm_to_channel(&e).unwrap());
        let d = 3usize;
        let scale = c64(1.0 / d as f64, 0.0);
        let m0 = e.effect().transpose() * scale;
        let m1 = (identity(d) - e.effect()).transpose() * scale;
        for i in 0..d {
            for jj in 0..d {
                assert!((j.mat()[(i, jj)] - m0[(i, jj)]).norm() < 1e-12);
                assert!((j.mat()[(d + i, d + jj)] - m1[(i, jj)]).norm() < 1e-12);
                assert!(j.mat()[(i, d + jj)].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn diamond_identity_trivial_and_paper_cases() {
        let e = BinaryPovm::new(identity(2) * c64(0.3, 0.0)).unwrap();
        let (lhs, rhs) = povm_diamond_identity(&e, &e).unwrap();
        assert!(lhs.abs() < 1e-7);
        assert_eq!(rhs, 0.0);

        // E = |0⟩⟨0|, F = 0 gives (2, 2)
        let e = BinaryPovm::new(PureState::basis(2, 0).unwrap().projector()).unwrap();
        let f = BinaryPovm::new(CMat::zeros(2, 2)).unwrap();
        let (lhs, rhs) = povm_diamond_identity(&e, &f).unwrap();
        assert_abs_diff_eq!(lhs, 2.0, epsilon = 1e-5);
        assert_abs_diff_eq!(rhs, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn diamond_identity_on_random_pairs() {
        let mut rng = crate::haar::RngStream::new(83, 0).rng();
        for d in [2usize, 3] {
            for _ in 0..5 {
                let e = random_effect(&mut rng, d);
                let f = random_effect(&mut rng, d);
                let (lhs, rhs) = povm_diamond_identity(&e, &f).unwrap();
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn effect_extraction_inverts_the_forward_map() {
        // on the exact Choi operator (no estimator noise) the extraction
        // recovers the effect
        let mut rng = crate::haar::RngStream::new(84, 0).rng();
        for d in [2usize, 3] {
            let e = random_effect(&mut rng, d);
            let j = kraus_to_choi(&povm_to_channel(&e).unwrap());
            let extracted = extract_binary_effect(&j).unwrap();
            assert!(op_norm(&(extracted - e.effect())) < 1e-8);
        }
    }

    #[test]
    fn clipping_error_contracts() {
        // Eigen-clipping is the Frobenius projection onto the effect set, so
        // it is nonexpansive in Frobenius norm; in operator norm it can
        // expand (strict monotonicity fails on e.g. 3x3 instances drawn
        // here), but never beyond the triangle-inequality factor 2.
        let mut rng = crate::haar::RngStream::new(85, 0).rng();
        for _ in 0..200 {
            let d = 3;
            let e = random_effect(&mut rng, d);
            let noise = hermitize(&CMat::from_fn(d, d, |_, _| {
                c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            })) * c64(0.3, 0.0);
            let x = e.effect() + noise;
            let clipped = clip_effect(&x).unwrap();
            let before_f = frob_norm(&(&x - e.effect()));
            let after_f = frob_norm(&(&clipped - e.effect()));
            assert!(after_f <= before_f + 1e-10);
            let before = op_norm(&(&x - e.effect()));
            let after = op_norm(&(&clipped - e.effect()));
            assert!(after <= 2.0 * before + 1e-10);
        }
        // exactness on feasible inputs
        let e = random_effect(&mut rng, 3);
        let same = clip_effect(e.effect()).unwrap();
        assert!(op_norm(&(same - e.effect())) < 1e-10);
    }

    #[test]
    fn learn_state_pure_qubit() {
        let mut rng = crate::haar::RngStream::new(86, 0).rng();
        let mut ok = 0;
        let trials = 20;
        for t in 0..trials {
            let psi = sample_haar_state(2, &mut rng);
            let rho = DensityOperator::from_pure(&psi);
            let out =
                learn_state(&rho, 1, 10_000, 0.1, RngStream::new(9000 + t, 0)).unwrap();
            // the trace distance equals half the pipeline's diamond error
            assert_abs_diff_eq!(
                out.trace_distance,
                0.5 * out.record.diamond_error_final,
                epsilon = 1e-8
            );
            if out.trace_distance <= 0.1 {
                ok += 1;
            }
        }
        assert!(ok as f64 / trials as f64 >= 0.95, "ok = {ok}");
    }

    #[test]
    fn learn_state_full_rank_stays_physical() {
        let rho = DensityOperator::new(identity(3) / c64(3.0, 0.0)).unwrap();
        let out = learn_state(&rho, 3, 500, 0.2, RngStream::new(87, 0)).unwrap();
        // projection guarantees a PSD, trace-1 estimate
        assert!((trace(out.estimate.mat()).re - 1.0).abs() < 1e-9);
        let min = hermitian_eig(out.estimate.mat()).unwrap().0.min();
        assert!(min > -1e-8);
    }

    #[test]
    fn learn_state_rejects_rank_violation() {
        let rho = DensityOperator::new(identity(3) / c64(3.0, 0.0)).unwrap();
        assert!(learn_state(&rho, 1, 100, 0.2, RngStream::new(88, 0)).is_err());
    }

    #[test]
    fn learn_isometry_qubit_unitary() {
        let mut rng = crate::haar::RngStream::new(89, 0).rng();
        let mut errs = Vec::new();
        for t in 0..20 {
            let u = Isometry::new(sample_haar_unitary(2, &mut rng)).unwrap();
            let out = learn_isometry(&u, 10_000, 0.1, RngStream::new(9100 + t, 0)).unwrap();
            errs.push(out.diamond_error);
            // the estimate is itself a valid channel
            assert_eq!(out.estimate.dims(), u.dims());
        }
        errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(errs[errs.len() / 2] <= 0.1, "median {}", errs[errs.len() / 2]);
    }

    #[test]
    fn learn_isometry_embedding_matches_state_preparation() {
        // a 1 → 2 embedding isometry prepares |0⟩; learning it behaves like
        // state learning
        let mut v = CMat::zeros(2, 1);
        v[(0, 0)] = c64(1.0, 0.0);
        let iso = Isometry::new(v).unwrap();
        let out = learn_isometry(&iso, 5_000, 0.2, RngStream::new(90, 0)).unwrap();
        assert!(out.diamond_error <= 0.2);
    }

    #[test]
    fn learn_binary_povm_interior_effect() {
        let e = BinaryPovm::new(identity(2) * c64(0.5, 0.0)).unwrap();
        let mut ok = 0;
        let trials = 10;
        for t in 0..trials {
            let out = learn_binary_povm(&e, 100_000, 0.1, RngStream::new(9200 + t, 0)).unwrap();
            if out.opnorm_error <= 0.1 {
                ok += 1;
            }
        }
        assert!(ok >= 9, "ok = {ok}");
    }

    #[test]
    fn learn_binary_povm_regime_check() {
        let e = BinaryPovm::new(identity(2) * c64(0.5, 0.0)).unwrap();
        assert!(matches!(
            learn_binary_povm(&e, 100, 1e-9, RngStream::new(91, 0)),
            Err(Error::OutOfRegime { .. })
        ));
    }

    #[test]
    fn learn_multi_povm_respects_constraints() {
        // interior POVM: effects bounded well away from the PSD boundary
        let mut z = CMat::zeros(2, 2);
        z[(0, 0)] = c64(0.2, 0.0);
        z[(1, 1)] = c64(-0.2, 0.0);
        let e1 = identity(2) / c64(3.0, 0.0) + &z;
        let e2 = identity(2) / c64(3.0, 0.0) - &z;
        let e3 = identity(2) / c64(3.0, 0.0);
        let povm = MultiPovm::new(vec![e1, e2, e3]).unwrap();

        let out = learn_multi_povm(&povm, 50_000, 0.3, RngStream::new(92, 0)).unwrap();
        // the sum constraint is restored exactly
        let mut sum = CMat::zeros(2, 2);
        for e in out.estimate.effects() {
            sum += e;
        }
        assert!(op_norm(&(sum - identity(2))) < 1e-10);
        // renormalization moves each element by at most the average residual,
        // so the reported error stays within 2x the worst raw error
        let worst_raw: f64 = out.raw_opnorm_errors.iter().copied().fold(0.0, f64::max);
        assert!(out.max_opnorm_error <= 2.0 * worst_raw + 1e-10);
    }

    #[test]
    fn learn_multi_povm_two_outcomes_consistent_with_binary() {
        let e = identity(2) * c64(0.4, 0.0);
        let povm = MultiPovm::new(vec![e.clone(), identity(2) - &e]).unwrap();
        let out = learn_multi_povm(&povm, 50_000, 0.2, RngStream::new(93, 0)).unwrap();
        // complements stay complements after renormalization
        let sum = out.estimate.effects()[0].clone() + &out.estimate.effects()[1];
        assert!(op_norm(&(sum - identity(2))) < 1e-10);
    }

    #[test]
    fn wrappers_preserve_factor_two_law() {
        let mut rng = crate::haar::RngStream::new(94, 0).rng();
        let psi = sample_haar_state(2, &mut rng);
        let rho = DensityOperator::from_pure(&psi);
        let out = learn_state(&rho, 1, 1000, 0.2, RngStream::new(95, 0)).unwrap();
        assert!(
            out.record.diamond_error_final
                <= 2.0 * out.record.diamond_error_est + 2e-6
        );

        let u = Isometry::new(sample_haar_unitary(2, &mut rng)).unwrap();
        let out = learn_isometry(&u, 1000, 0.2, RngStream::new(96, 0)).unwrap();
        assert!(
            out.record.diamond_error_final
                <= 2.0 * out.record.diamond_error_est + 2e-6
        );
    }

    #[test]
    fn random_channel_smoke_for_learned_estimates() {
        // downstream consumers get valid channels back
        let mut rng = crate::haar::RngStream::new(97, 0).rng();
        let ch = random_channel(DimPair::new(2, 2).unwrap(), 2, &mut rng).unwrap();
        let j = kraus_to_choi(&ch);
        assert!(j.is_cp().unwrap() && j.is_tp().unwrap());
    }
}
