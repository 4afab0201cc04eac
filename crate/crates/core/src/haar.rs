//! Haar-random samplers and the concentration bounds attached to them.
//!
//! All samplers take an explicit RNG so that trials running in parallel can
//! use independent, reproducible streams (see [`RngStream`]).

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, DimPair, PureState};

/// Seed plus stream id; identical pairs reproduce identical draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Instantiate the deterministic generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// One standard complex Gaussian scalar: `X + iY` with `X, Y ~ N(0, 1/2)`.
pub fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * scale, im * scale)
}

/// Standard complex Gaussian vector in `C^d`; each `|g_α|²` is i.i.d. Exp(1).
pub fn sample_complex_gaussian(d: usize, rng: &mut impl Rng) -> CVec {
    DVector::from_fn(d, |_, _| complex_gaussian(rng))
}

/// Haar-random state: a normalized standard complex Gaussian vector.
pub fn sample_haar_state(d: usize, rng: &mut impl Rng) -> PureState {
    loop {
        let g = sample_complex_gaussian(d, rng);
        if let Ok(psi) = PureState::normalized(g) {
            return psi;
        }
    }
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random isometry `C^cols -> C^rows` (requires `cols <= rows`):
/// QR of a Ginibre matrix with the diagonal phase correction.
pub fn sample_haar_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> Result<CMat> {
    if cols > rows {
        return Err(Error::DimensionMismatch(format!(
            "isometry needs cols <= rows, got {cols} > {rows}"
        )));
    }
    let g = ginibre(rows, cols, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // normalize the phases of the triangular factor's diagonal
    let mut v = q;
    for j in 0..cols {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / Complex64::new(rjj.norm(), 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..rows {
            v[(i, j)] *= phase;
        }
    }
    Ok(v)
}

/// Haar-random unitary on `C^d`.
pub fn sample_haar_unitary(d: usize, rng: &mut impl Rng) -> CMat {
    sample_haar_isometry(d, d, rng).expect("square isometry")
}

/// Survival probability of the overlap squared of a Haar state with a fixed
/// vector: `Pr[|⟨v|Ψ⟩|² ≥ ε] = (1−ε)^{d−1}`.
pub fn overlap_tail(epsilon: f64, d: usize) -> f64 {
    assert!((0.0..=1.0).contains(&epsilon));
    assert!(d >= 1);
    (1.0 - epsilon).powi(d as i32 - 1)
}

/// Exponential relaxation of [`overlap_tail`]: `exp(−(d−1)ε)`.
pub fn overlap_tail_relaxed(epsilon: f64, d: usize) -> f64 {
    assert!((0.0..=1.0).contains(&epsilon));
    assert!(d >= 1);
    (-((d - 1) as f64) * epsilon).exp()
}

/// Beta(α, β) sample as a ratio of Gamma variates.
pub fn sample_beta(alpha: f64, beta: f64, rng: &mut impl Rng) -> Result<f64> {
    if !(alpha > 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta parameters must be positive, got ({alpha}, {beta})"
        )));
    }
    let ga = Gamma::new(alpha, 1.0)
        .map_err(|e| Error::InvalidParameter(format!("gamma shape {alpha}: {e}")))?;
    let gb = Gamma::new(beta, 1.0)
        .map_err(|e| Error::InvalidParameter(format!("gamma shape {beta}: {e}")))?;
    loop {
        let x = ga.sample(rng);
        let y = gb.sample(rng);
        let s = x + y;
        if s > 0.0 {
            return Ok((x / s).clamp(0.0, 1.0));
        }
    }
}

/// Closed-form tail bound on the operator norm of the reduced state of a
/// Haar-random pure state on `C^n ⊗ C^s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundReport {
    pub n: usize,
    pub s: usize,
    pub delta: f64,
    /// `(1/√n + (1 + √(ln(1/δ)/n))/√s)²`; holds with probability ≥ 1−δ.
    pub bound: f64,
}

/// Bound on `‖ρ_A‖∞` for a Haar state on `C^n ⊗ C^s` with `n ≤ s`.
pub fn reduced_opnorm_bound(n: usize, s: usize, delta: f64) -> Result<TailBoundReport> {
    if n == 0 || s == 0 || n > s {
        return Err(Error::InvalidParameter(format!(
            "reduced_opnorm_bound requires 1 <= n <= s, got n={n}, s={s}"
        )));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be in (0,1), got {delta}"
        )));
    }
    let nf = n as f64;
    let sf = s as f64;
    let root = 1.0 / nf.sqrt() + (1.0 + ((1.0 / delta).ln() / nf).sqrt()) / sf.sqrt();
    Ok(TailBoundReport {
        n,
        s,
        delta,
        bound: root * root,
    })
}

/// Simplified bound on the operator norm of the input marginal of a random
/// purified Choi state: `(1/d_in)(2 + √(ln(1/δ)/(k·d_out)))²`.
///
/// Requires `d_in ≤ k·d_out` (the regime allowed for Kraus-rank-k channels).
pub fn choi_marginal_bound(dims: DimPair, k: usize, delta_haar: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if dims.d_in > k * dims.d_out {
        return Err(Error::InvalidRank {
            d_in: dims.d_in,
            d_out: dims.d_out,
            k,
        });
    }
    if !(0.0 < delta_haar && delta_haar <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta_haar must be in (0,1], got {delta_haar}"
        )));
    }
    let kd = (k * dims.d_out) as f64;
    let root = 2.0 + ((1.0 / delta_haar).ln() / kd).sqrt();
    Ok(root * root / dims.d_in as f64)
}

/// Haar-random state on the orthogonal complement of `psi`: draw a global
/// Haar state, project out `psi`, renormalize.
pub fn haar_orthogonal_error(psi: &PureState, rng: &mut impl Rng) -> Result<PureState> {
    let d = psi.dim();
    if d < 2 {
        return Err(Error::InvalidParameter(
            "no orthogonal complement in dimension 1".into(),
        ));
    }
    loop {
        let g = sample_haar_state(d, rng);
        let ov = psi.overlap(&g);
        let projected = g.amplitudes() - psi.amplitudes() * ov;
        if projected.norm() > 1e-12 {
            return PureState::normalized(projected);
        }
    }
}
