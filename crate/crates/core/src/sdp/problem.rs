//! Problem description for the block-Hermitian SDP solver.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_deviation, op_norm, CMat};

/// One Hermitian matrix per PSD block.
pub type BlockMat = Vec<CMat>;

/// Real trace inner product `Σ_b Re tr(A_b B_b)` of Hermitian block matrices.
pub fn block_inner(a: &BlockMat, b: &BlockMat) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            // tr(XY) = Σ X_rc conj(Y_rc) for Hermitian X, Y
            x.iter()
                .zip(y.iter())
                .map(|(p, q)| p.re * q.re + p.im * q.im)
                .sum::<f64>()
        })
        .sum()
}

/// Frobenius norm of a block matrix.
pub fn block_frob(a: &BlockMat) -> f64 {
    a.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
}

pub fn block_zeros(dims: &[usize]) -> BlockMat {
    dims.iter().map(|&n| CMat::zeros(n, n)).collect()
}

/// One affine equality constraint `⟨A, X⟩ = b`.
#[derive(Debug, Clone)]
pub struct SdpConstraint {
    pub mats: BlockMat,
    pub rhs: f64,
}

/// Standard-form SDP: minimize `⟨C, X⟩` subject to `⟨A_i, X⟩ = b_i`, `X ⪰ 0`
/// over block-diagonal Hermitian `X`.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    pub objective: BlockMat,
    pub constraints: Vec<SdpConstraint>,
}

impl SdpProblem {
    pub fn new(
        block_dims: Vec<usize>,
        objective: BlockMat,
        constraints: Vec<SdpConstraint>,
    ) -> Result<Self> {
        if block_dims.is_empty() || block_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter(
                "SDP needs at least one nonempty block".into(),
            ));
        }
        let check_blocks = |mats: &BlockMat, what: &str| -> Result<()> {
            if mats.len() != block_dims.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{what} has {} blocks, expected {}",
                    mats.len(),
                    block_dims.len()
                )));
            }
            for (m, &d) in mats.iter().zip(&block_dims) {
                if m.nrows() != d || m.ncols() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "{what} block is {}x{}, expected {d}x{d}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                let scale = op_norm(m).max(1.0);
                if hermiticity_deviation(m) > 1e-9 * scale {
                    return Err(Error::NotHermitian {
                        deviation: hermiticity_deviation(m),
                        tolerance: 1e-9 * scale,
                    });
                }
            }
            Ok(())
        };
        check_blocks(&objective, "objective")?;
        for (i, c) in constraints.iter().enumerate() {
            check_blocks(&c.mats, &format!("constraint {i}"))?;
            if !c.rhs.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "constraint {i} has non-finite rhs"
                )));
            }
        }
        Ok(SdpProblem {
            block_dims,
            objective,
            constraints,
        })
    }

    /// Total complex dimension across blocks.
    pub fn total_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }
}

/// Real embedding of a Hermitian matrix: `H ↦ [[Re H, −Im H], [Im H, Re H]]`
/// (returned with zero imaginary part). `H ⪰ 0` iff its embedding is PSD, and
/// `⟨E(A), E(B)⟩ = 2⟨A, B⟩`.
pub fn real_embed(h: &CMat) -> CMat {
    let n = h.nrows();
    CMat::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, r) = (i / n, i % n);
        let (bj, c) = (j / n, j % n);
        let z = h[(r, c)];
        let v = match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        };
        Complex64::new(v, 0.0)
    })
}

/// Map a whole SDP through the real embedding. The embedded problem's optimal
/// value is exactly twice the original, solved over real symmetric blocks of
/// doubled size; this provides an independent numerical path for cross-checks.
pub fn real_embed_problem(p: &SdpProblem) -> SdpProblem {
    SdpProblem {
        block_dims: p.block_dims.iter().map(|&d| 2 * d).collect(),
        objective: p.objective.iter().map(real_embed).collect(),
        constraints: p
            .constraints
            .iter()
            .map(|c| SdpConstraint {
                mats: c.mats.iter().map(real_embed).collect(),
                rhs: 2.0 * c.rhs,
            })
            .collect(),
    }
}
