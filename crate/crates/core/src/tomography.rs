//! Statistically exact simulation of the diamond-distance channel-learning
//! protocol, plus its theoretical error-bound and sample-complexity
//! calculators.
//!
//! The `N` channel uses are never simulated as physical measurements.
//! Instead the estimator's exact output law is sampled directly: the squared
//! overlap of a covariant pure-state estimator with the truth follows
//! `Beta(N+1, d−1)`, and its error direction is Haar-random in the orthogonal
//! complement. This makes a single trial O(poly(d_tot)) regardless of `N`,
//! which is what allows Monte-Carlo reproduction of the sample-complexity
//! scaling at desk scale.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{kraus_to_choi, validate_rank_bounds, ChoiOperator, KrausChannel, RANK_CUTOFF};
use crate::error::{Error, Result};
use crate::haar::{haar_orthogonal_error, sample_beta, sample_haar_unitary, RngStream};
use crate::linalg::{
    hermitian_eig, hermitize, partial_trace, CMat, CVec, DimPair, PureState,
};
use crate::sdp::{cptp_project, diamond_norm, DiamondValue};

/// Configuration of one protocol run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TomographyConfig {
    pub dims: DimPair,
    /// Kraus-rank cap of the unknown channel; the purifying register has
    /// dimension `k`.
    pub k: usize,
    /// Number of channel uses `N`.
    pub n_uses: usize,
    /// Target failure probability.
    pub delta: f64,
    /// Gap tolerance handed to the projection SDP.
    pub gap_tol: f64,
    pub seed: RngStream,
}

impl TomographyConfig {
    pub fn validate(&self) -> Result<()> {
        if !validate_rank_bounds(self.dims, self.k) {
            return Err(Error::InvalidRank {
                d_in: self.dims.d_in,
                d_out: self.dims.d_out,
                k: self.k,
            });
        }
        if self.n_uses == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        if !(0.0 < self.delta && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be in (0,1), got {}",
                self.delta
            )));
        }
        if !(self.gap_tol > 0.0) {
            return Err(Error::InvalidParameter("gap_tol must be positive".into()));
        }
        Ok(())
    }

    /// Total purification dimension `d_out · d_in · k`.
    pub fn d_tot(&self) -> usize {
        self.dims.d_out * self.dims.d_in * self.k
    }
}

/// Outcome of the simulated covariant pure-state estimator.
#[derive(Debug, Clone)]
pub struct PureEstimate {
    pub estimate: PureState,
    /// Realized squared overlap `X = |⟨v|ψ⟩|²`.
    pub true_overlap_sq: f64,
    /// Realized trace-distance error `√(1 − X)`.
    pub epsilon_pure_realized: f64,
}

/// The pieces of the diamond-distance error bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundComponents {
    pub d_tot: usize,
    /// Marginal-norm prefactor `2 + √(ln(4/δ)/(k d_out))`.
    pub c_delta: f64,
    /// Overlap cutoff `1 − (δ/4)^{1/(d_tot−1)}`.
    pub eps_ov: f64,
    /// `√(eps_ov/(1−eps_ov))`.
    pub c_ov: f64,
    /// Subleading bracket correction.
    pub s_delta: f64,
    /// The pure-state accuracy the bound was evaluated at.
    pub eps_pure_bound: f64,
    /// `c_delta · (4 + s_delta) · eps_pure`; bounds both the raw-estimate
    /// diamond error and half the projected-estimate diamond error.
    pub total_bound: f64,
    /// Single-dimensional total space; the bound degenerates to 0.
    pub degenerate: bool,
    /// Whether `δ > 4 exp(−d_tot)`, the regime of the simplified
    /// sample-complexity statement.
    pub in_simplified_regime: bool,
}

/// Wall-clock milliseconds spent in each pipeline stage.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct StageTimings {
    pub prepare_ms: f64,
    pub purify_ms: f64,
    pub tomography_ms: f64,
    pub project_ms: f64,
    pub diamond_ms: f64,
}

/// One end-to-end protocol run.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub config: TomographyConfig,
    pub true_overlap_sq: f64,
    pub epsilon_pure_realized: f64,
    /// `‖Λ_est − Λ‖◇` before CPTP regularisation.
    pub diamond_error_est: f64,
    /// `‖Λ̂ − Λ‖◇` after CPTP regularisation.
    pub diamond_error_final: f64,
    /// Certified `‖Λ̂ − Λ_est‖◇` from the projection SDP.
    pub projection_distance: f64,
    pub bound: BoundComponents,
    pub timings: StageTimings,
}

/// Canonical spectral purification of a Choi operator followed by a
/// Haar-random unitary on the `k`-dimensional environment, producing the
/// random purification the protocol measures.
pub fn purify_choi(j: &ChoiOperator, k: usize, rng: &mut impl rand::Rng) -> Result<PureState> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let (vals, vecs) = hermitian_eig(j.mat())?;
    let cutoff = RANK_CUTOFF * vals[0].max(0.0);
    let rank = vals.iter().filter(|&&v| v > cutoff).count();
    if rank > k {
        return Err(Error::RankTooLarge { rank, max: k });
    }
    let d = j.mat().nrows();
    // amplitudes as a (system, environment) matrix, M[x, α] = component of
    // |x⟩ ⊗ |α⟩
    let mut m = CMat::zeros(d, k);
    for (alpha, i) in (0..vals.len()).filter(|&i| vals[i] > cutoff).enumerate() {
        let w = Complex64::new(vals[i].max(0.0).sqrt(), 0.0);
        for x in 0..d {
            m[(x, alpha)] = vecs[(x, i)] * w;
        }
    }
    // randomize the purification: |Φ⟩ ← (I ⊗ U)|Φ⟩, i.e. M ← M Uᵀ
    let u = sample_haar_unitary(k, rng);
    let m = m * u.transpose();
    let amps = CVec::from_fn(d * k, |idx, _| m[(idx / k, idx % k)]);
    PureState::normalized(amps)
}

/// Draw one output of a covariant pure-state estimator run on `N` copies of
/// `psi`: the squared overlap is `Beta(N+1, d−1)` and the error direction is
/// Haar in the orthogonal complement, so the returned state is
/// `√X |ψ⟩ + √(1−X) |ψ_err⟩` with `|⟨v|ψ⟩|² = X` exactly.
pub fn simulate_covariant_pure_tomography(
    psi: &PureState,
    n_uses: usize,
    rng: &mut impl rand::Rng,
) -> Result<PureEstimate> {
    if n_uses == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let d = psi.dim();
    if d == 1 {
        // single-state space: the estimator is exact
        return Ok(PureEstimate {
            estimate: psi.clone(),
            true_overlap_sq: 1.0,
            epsilon_pure_realized: 0.0,
        });
    }
    let x = sample_beta((n_uses + 1) as f64, (d - 1) as f64, rng)?;
    let err = haar_orthogonal_error(psi, rng)?;
    let v = psi.amplitudes() * Complex64::new(x.sqrt(), 0.0)
        + err.amplitudes() * Complex64::new((1.0 - x).sqrt(), 0.0);
    Ok(PureEstimate {
        estimate: PureState::new(v)?,
        true_overlap_sq: x,
        epsilon_pure_realized: (1.0 - x).sqrt(),
    })
}

/// Copies needed by the covariant estimator for squared-overlap error `η`
/// with failure probability `δ`: `⌈4 (d + ln(1/δ)) / η⌉`.
pub fn hayashi_sample_size(d: usize, eta: f64, delta: f64) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    if !(0.0 < eta && eta < 1.0) || !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eta and delta must lie in (0,1), got ({eta}, {delta})"
        )));
    }
    Ok((4.0 * (d as f64 + (1.0 / delta).ln()) / eta).ceil() as usize)
}

/// Full diamond-distance error bound at a given pure-state accuracy:
/// `C(δ) · [4 + S_δ(d_tot)] · ε_pure` with the δ budget split
/// δ/2 tomography, δ/4 marginal-norm event, δ/4 overlap event.
pub fn theoretical_bound(
    dims: DimPair,
    k: usize,
    delta: f64,
    eps_pure: f64,
) -> Result<BoundComponents> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be in (0,1), got {delta}"
        )));
    }
    if !(0.0..=1.0).contains(&eps_pure) {
        return Err(Error::InvalidParameter(format!(
            "eps_pure must lie in [0,1], got {eps_pure}"
        )));
    }
    let d_tot = dims.d_out * dims.d_in * k;
    let c_delta = 2.0 + ((4.0 / delta).ln() / (k * dims.d_out) as f64).sqrt();
    let in_simplified_regime = delta > 4.0 * (-(d_tot as f64)).exp();
    if d_tot == 1 {
        return Ok(BoundComponents {
            d_tot,
            c_delta,
            eps_ov: 0.0,
            c_ov: 0.0,
            s_delta: 0.0,
            eps_pure_bound: eps_pure,
            total_bound: 0.0,
            degenerate: true,
            in_simplified_regime,
        });
    }
    let eps_ov = 1.0 - (delta / 4.0).powf(1.0 / (d_tot as f64 - 1.0));
    let c_ov = (eps_ov / (1.0 - eps_ov)).sqrt();
    let s_delta = (1.0 / (1.0 - eps_ov) - 1.0)
        + 4.0 * c_ov
        + c_ov * c_ov
        + 2.0 * (1.0 + c_ov) * (1.0 / (1.0 - eps_ov).sqrt() - 1.0);
    let total_bound = c_delta * (4.0 + s_delta) * eps_pure;
    Ok(BoundComponents {
        d_tot,
        c_delta,
        eps_ov,
        c_ov,
        s_delta,
        eps_pure_bound: eps_pure,
        total_bound,
        degenerate: false,
        in_simplified_regime,
    })
}

/// Explicit channel uses for target diamond-distance accuracy `eps` and
/// failure probability `delta`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SampleComplexity {
    /// Smallest `N` for which the full bound, evaluated at the covariant
    /// estimator rate `ε_pure = √(4 (d_tot + ln(2/δ)) / N)`, is ≤ `eps`.
    pub n: usize,
    /// Leading-order value `⌈256 d_in d_out k / eps²⌉` for comparison.
    pub leading_order: usize,
}

/// Invert the full error bound for the number of channel uses.
///
/// Requires the simplified regime `δ > 4 exp(−d_tot)`; outside it, run at a
/// constant failure probability and boost by repetition instead.
pub fn sample_complexity(
    dims: DimPair,
    k: usize,
    eps: f64,
    delta: f64,
) -> Result<SampleComplexity> {
    if !(0.0 < eps && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0,1], got {eps}"
        )));
    }
    if !validate_rank_bounds(dims, k) {
        return Err(Error::InvalidRank {
            d_in: dims.d_in,
            d_out: dims.d_out,
            k,
        });
    }
    let bound = theoretical_bound(dims, k, delta, 1.0)?;
    if !bound.in_simplified_regime {
        return Err(Error::OutOfRegime {
            delta,
            d_tot: bound.d_tot,
        });
    }
    // total(N) = C (4 + S) √(4 (d_tot + ln(2/δ)) / N) is strictly decreasing,
    // so the smallest admissible N has a closed form.
    let prefactor = bound.c_delta * (4.0 + bound.s_delta);
    let copies_term = 4.0 * (bound.d_tot as f64 + (2.0 / delta).ln());
    let n = (copies_term * (prefactor / eps).powi(2)).ceil().max(1.0) as usize;
    let leading_order = (256.0 * (dims.d_in * dims.d_out * k) as f64 / (eps * eps)).ceil() as usize;
    Ok(SampleComplexity { n, leading_order })
}

/// The pure-state accuracy achieved by the covariant estimator with `n` uses
/// at failure probability `delta/2`, per the `√(4(d_tot+ln(2/δ))/N)` rate.
pub fn hayashi_eps_pure(d_tot: usize, n_uses: usize, delta: f64) -> f64 {
    (4.0 * (d_tot as f64 + (2.0 / delta).ln()) / n_uses as f64)
        .sqrt()
        .min(1.0)
}

/// Run the whole learning pipeline once against a known channel:
/// exact Choi preparation, random purification, simulated covariant
/// pure-state tomography, Choi reconstruction, CPTP regularisation, and
/// diamond-distance scoring of both estimates against the truth.
pub fn run_algorithm1(channel: &KrausChannel, cfg: &TomographyConfig) -> Result<TrialRecord> {
    run_algorithm1_detailed(channel, cfg).map(|(record, _)| record)
}

/// Like [`run_algorithm1`], additionally returning the projected Choi
/// estimate for callers that post-process it (state, isometry, and POVM
/// learners).
pub fn run_algorithm1_detailed(
    channel: &KrausChannel,
    cfg: &TomographyConfig,
) -> Result<(TrialRecord, ChoiOperator)> {
    cfg.validate()?;
    if channel.dims() != cfg.dims {
        return Err(Error::DimensionMismatch(format!(
            "channel dims {:?} do not match config {:?}",
            channel.dims(),
            cfg.dims
        ))
        .in_stage("prepare"));
    }
    let mut rng = cfg.seed.rng();
    let d = cfg.dims.choi_dim();

    // (1) the N parallel uses prepare copies of the Choi state exactly
    let t0 = Instant::now();
    let j_true = kraus_to_choi(channel);
    if j_true.rank().map_err(|e| e.in_stage("prepare"))? > cfg.k {
        return Err(Error::RankTooLarge {
            rank: j_true.rank()?,
            max: cfg.k,
        }
        .in_stage("prepare"));
    }
    let prepare_ms = t0.elapsed().as_secs_f64() * 1e3;

    // (2) random purification on the k-dimensional environment
    let t0 = Instant::now();
    let phi_c = purify_choi(&j_true, cfg.k, &mut rng).map_err(|e| e.in_stage("purify"))?;
    let purify_ms = t0.elapsed().as_secs_f64() * 1e3;

    // (3) covariant pure-state tomography with N copies, simulated exactly
    let t0 = Instant::now();
    let estimate = simulate_covariant_pure_tomography(&phi_c, cfg.n_uses, &mut rng)
        .map_err(|e| e.in_stage("tomography"))?;
    let tomography_ms = t0.elapsed().as_secs_f64() * 1e3;

    // (4) Choi reconstruction by tracing out the environment
    let j_est = partial_trace(&estimate.estimate.projector(), &[d, cfg.k], &[0])
        .map_err(|e| e.in_stage("reconstruct"))?;
    let j_est = hermitize(&j_est);

    // (5) CPTP regularisation
    let t0 = Instant::now();
    let (j_hat, projection_distance) = cptp_project(&j_est, cfg.dims, cfg.gap_tol)
        .map_err(|e| e.in_stage("project"))?;
    let project_ms = t0.elapsed().as_secs_f64() * 1e3;

    // (6) score both estimates in diamond norm against the truth
    let t0 = Instant::now();
    let score = |mat: &CMat| -> Result<DiamondValue> { diamond_norm(mat, cfg.dims.d_in) };
    let diamond_error_est = score(&(&j_est - j_true.mat()))
        .map_err(|e| e.in_stage("diamond"))?
        .value;
    let diamond_error_final = score(&(j_hat.mat() - j_true.mat()))
        .map_err(|e| e.in_stage("diamond"))?
        .value;
    let diamond_ms = t0.elapsed().as_secs_f64() * 1e3;

    let bound = theoretical_bound(cfg.dims, cfg.k, cfg.delta, estimate.epsilon_pure_realized)?;

    let record = TrialRecord {
        config: *cfg,
        true_overlap_sq: estimate.true_overlap_sq,
        epsilon_pure_realized: estimate.epsilon_pure_realized,
        diamond_error_est,
        diamond_error_final,
        projection_distance,
        bound,
        timings: StageTimings {
            prepare_ms,
            purify_ms,
            tomography_ms,
            project_ms,
            diamond_ms,
        },
    };
    Ok((record, j_hat))
}
