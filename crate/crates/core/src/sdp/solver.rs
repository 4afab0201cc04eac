//! Dense primal-dual path-following interior-point solver with
//! Nesterov–Todd scaling and a Mehrotra predictor-corrector step.
//!
//! Instances here are tiny (blocks of side ≤ 64, a few hundred constraints),
//! so everything is dense and certificate-producing: the returned solution
//! carries the primal blocks, dual multipliers, and the achieved gaps.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitize, CMat};

use super::problem::{block_frob, block_inner, block_zeros, BlockMat, SdpProblem};

/// Solver configuration.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Relative duality-gap tolerance.
    pub gap_tol: f64,
    /// Relative primal/dual feasibility tolerance.
    pub feas_tol: f64,
    /// Iteration cap.
    pub max_iter: usize,
    /// Maximum total complex dimension across blocks.
    pub max_total_dim: usize,
    /// Fraction of the maximal step to the PSD boundary taken each iteration.
    pub step_frac: f64,
    /// Use Mehrotra's second-order correction term (adaptive centering is
    /// always on).
    pub second_order: bool,
    /// Print per-iteration diagnostics to stderr.
    pub trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            gap_tol: 1e-7,
            feas_tol: 1e-8,
            max_iter: 200,
            max_total_dim: 256,
            step_frac: 0.98,
            second_order: true,
            trace: false,
        }
    }
}

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    /// Gap and feasibility tolerances reached.
    Optimal,
    /// Iteration cap hit; the iterate is the best found.
    MaxIter,
    /// Diverging iterates: the problem is judged primal or dual infeasible
    /// (or unbounded).
    Infeasible,
}

/// Primal-dual solution with certificates.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Primal objective `⟨C, X⟩`.
    pub value: f64,
    /// Dual objective `bᵀy`.
    pub dual_value: f64,
    /// Absolute objective gap `|⟨C,X⟩ − bᵀy|`.
    pub duality_gap: f64,
    /// Complementarity `⟨X, S⟩` (equals the gap at exact feasibility).
    pub complementarity: f64,
    /// Relative primal infeasibility `‖b − 𝒜(X)‖ / (1 + ‖b‖)`.
    pub primal_residual: f64,
    /// Relative dual infeasibility `‖C − S − 𝒜*(y)‖_F / (1 + ‖C‖_F)`.
    pub dual_residual: f64,
    pub iterations: usize,
    pub status: SdpStatus,
    /// Primal blocks `X` (positive definite up to the achieved gap).
    pub primal: BlockMat,
    /// Dual multipliers `y`.
    pub dual_y: Vec<f64>,
    /// Dual slack blocks `S = C − 𝒜*(y)` at the final iterate.
    pub dual_slack: BlockMat,
}

struct Workspace<'a> {
    p: &'a SdpProblem,
    n_total: f64,
}

impl<'a> Workspace<'a> {
    fn apply_a(&self, x: &BlockMat) -> Vec<f64> {
        self.p
            .constraints
            .iter()
            .map(|c| block_inner(&c.mats, x))
            .collect()
    }

    fn apply_a_star(&self, y: &[f64]) -> BlockMat {
        let mut out = block_zeros(&self.p.block_dims);
        for (c, &yi) in self.p.constraints.iter().zip(y) {
            if yi != 0.0 {
                for (o, a) in out.iter_mut().zip(&c.mats) {
                    *o += a * Complex64::new(yi, 0.0);
                }
            }
        }
        out
    }
}

/// Eigendecomposition used internally; assumes the block is Hermitian by
/// construction and floors eigenvalues for inverse powers.
fn eig(block: &CMat) -> (DVector<f64>, CMat) {
    let se = hermitize(block).symmetric_eigen();
    (se.eigenvalues, se.eigenvectors)
}

fn spectral_power(block: &CMat, pow: f64, floor: f64) -> CMat {
    let (vals, vecs) = eig(block);
    let n = block.nrows();
    let d = CMat::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(vals[i].max(floor).powf(pow), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    &vecs * d * vecs.adjoint()
}

/// Nesterov–Todd scaling point `W` per block: `W S W = X`.
fn nt_scaling(x: &CMat, s: &CMat) -> CMat {
    let x_half = spectral_power(x, 0.5, 1e-300);
    let t = &x_half * s * &x_half;
    let t_inv_half = spectral_power(&t, -0.5, 1e-300);
    hermitize(&(&x_half * t_inv_half * x_half))
}

/// Largest `α` keeping `M + α ΔM ⪰ 0`, via the smallest eigenvalue of
/// `L⁻¹ ΔM L⁻†` with `M = L L†`.
fn max_step(m: &CMat, dm: &CMat) -> f64 {
    let (vals, vecs) = eig(m);
    let n = m.nrows();
    let inv_sqrt = CMat::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(1.0 / vals[i].max(1e-300).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let l_inv = inv_sqrt * vecs.adjoint();
    let scaled = hermitize(&(&l_inv * dm * l_inv.adjoint()));
    let min = eig(&scaled).0.min();
    if min >= -1e-14 {
        f64::INFINITY
    } else {
        -1.0 / min
    }
}

fn block_max_step(m: &BlockMat, dm: &BlockMat) -> f64 {
    m.iter()
        .zip(dm)
        .map(|(a, b)| max_step(a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Solve the standard-form SDP with an infeasible-start NT predictor-corrector
/// method. Returns `Ok` with status [`SdpStatus::MaxIter`] or
/// [`SdpStatus::Infeasible`] when the tolerances were not reached; hard
/// validation problems are `Err`.
pub fn solve_sdp(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    if p.total_dim() > opts.max_total_dim {
        return Err(Error::InvalidParameter(format!(
            "total block dimension {} exceeds configured maximum {}",
            p.total_dim(),
            opts.max_total_dim
        )));
    }
    let m = p.num_constraints();
    let b: Vec<f64> = p.constraints.iter().map(|c| c.rhs).collect();
    let ws = Workspace {
        p,
        n_total: p.total_dim() as f64,
    };

    // scale-aware identity start
    let data_scale = block_frob(&p.objective)
        .max(p.constraints.iter().map(|c| block_frob(&c.mats)).fold(0.0, f64::max))
        .max(b.iter().map(|v| v.abs()).fold(0.0, f64::max))
        .max(1.0);
    let mut x: BlockMat = p
        .block_dims
        .iter()
        .map(|&d| CMat::identity(d, d) * Complex64::new(data_scale, 0.0))
        .collect();
    let mut s = x.clone();
    let mut y = vec![0.0f64; m];

    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let c_norm = block_frob(&p.objective);

    let mut iterations = 0;
    let mut status = SdpStatus::MaxIter;

    for iter in 0..opts.max_iter {
        iterations = iter;

        // residuals
        let ax = ws.apply_a(&x);
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
        let astar_y = ws.apply_a_star(&y);
        let rd: BlockMat = p
            .objective
            .iter()
            .zip(&s)
            .zip(&astar_y)
            .map(|((c, sb), ay)| c - sb - ay)
            .collect();

        let pobj = block_inner(&p.objective, &x);
        let dobj: f64 = b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
        let compl = block_inner(&x, &s);
        let denom = 1.0 + pobj.abs() + dobj.abs();
        let rel_gap = (pobj - dobj).abs() / denom;
        let rel_compl = compl / denom;
        let prim_res = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + b_norm);
        let dual_res = block_frob(&rd) / (1.0 + c_norm);

        if opts.trace {
            eprintln!(
                "iter {iter:3} pobj {pobj:+.6e} dobj {dobj:+.6e} gap {rel_gap:.2e} \
                 compl {rel_compl:.2e} rp {prim_res:.2e} rd {dual_res:.2e} |X| {:.2e}",
                block_frob(&x)
            );
        }
        if rel_gap.max(rel_compl) <= opts.gap_tol
            && prim_res <= opts.feas_tol
            && dual_res <= opts.feas_tol
        {
            status = SdpStatus::Optimal;
            break;
        }
        if !pobj.is_finite()
            || block_frob(&x) > 1e14 * data_scale
            || y.iter().any(|v| v.abs() > 1e14 * data_scale)
        {
            status = SdpStatus::Infeasible;
            break;
        }

        let mu = compl / ws.n_total;

        // NT scaling and the Schur complement M_ij = <A_i, W A_j W>
        let w: BlockMat = x.iter().zip(&s).map(|(xb, sb)| nt_scaling(xb, sb)).collect();
        let s_inv: BlockMat = s.iter().map(|sb| spectral_power(sb, -1.0, 1e-300)).collect();

        let sandwich = |mat: &BlockMat| -> BlockMat {
            w.iter()
                .zip(mat)
                .map(|(wb, mb)| hermitize(&(wb * mb * wb)))
                .collect()
        };

        let mut schur = DMatrix::<f64>::zeros(m, m);
        let mut waw: Vec<BlockMat> = Vec::with_capacity(m);
        for c in &p.constraints {
            waw.push(sandwich(&c.mats));
        }
        for j in 0..m {
            for i in 0..=j {
                let v = block_inner(&p.constraints[i].mats, &waw[j]);
                schur[(i, j)] = v;
                schur[(j, i)] = v;
            }
        }
        let chol = {
            let mut attempt = schur.clone();
            let mut ridge = 0.0;
            loop {
                match nalgebra::linalg::Cholesky::new(attempt.clone()) {
                    Some(c) => break c,
                    None => {
                        let bump = if ridge == 0.0 {
                            1e-12 * (1.0 + schur.diagonal().amax())
                        } else {
                            ridge * 10.0
                        };
                        if bump > 1e3 * (1.0 + schur.diagonal().amax()) {
                            return Err(Error::SolverFailure {
                                message: "Schur complement is numerically singular".into(),
                                primal: pobj,
                                dual: dobj,
                            });
                        }
                        ridge = bump;
                        attempt = schur.clone();
                        for i in 0..m {
                            attempt[(i, i)] += ridge;
                        }
                    }
                }
            }
        };

        // one Newton solve for a given complementarity target
        let solve_direction = |rc: &BlockMat| -> (Vec<f64>, BlockMat, BlockMat) {
            let w_rd_w = sandwich(&rd);
            let u: BlockMat = rc
                .iter()
                .zip(&w_rd_w)
                .map(|(rcb, wrw)| rcb - wrw)
                .collect();
            let au = ws.apply_a(&u);
            let h = DVector::<f64>::from_fn(m, |i, _| rp[i] - au[i]);
            let dy = if m > 0 {
                chol.solve(&h)
            } else {
                DVector::zeros(0)
            };
            let dy_vec: Vec<f64> = dy.iter().copied().collect();
            let astar_dy = ws.apply_a_star(&dy_vec);
            let ds: BlockMat = rd
                .iter()
                .zip(&astar_dy)
                .map(|(rdb, ad)| rdb - ad)
                .collect();
            let w_astar_w = sandwich(&astar_dy);
            let dx: BlockMat = u
                .iter()
                .zip(&w_astar_w)
                .map(|(ub, wa)| hermitize(&(ub + wa)))
                .collect();
            (dy_vec, dx, ds)
        };

        // predictor: aim at complementarity zero
        let rc_affine: BlockMat = x.iter().map(|xb| -xb.clone()).collect();
        let (_dy_a, dx_a, ds_a) = solve_direction(&rc_affine);
        let alpha_p_aff = (opts.step_frac * block_max_step(&x, &dx_a)).min(1.0);
        let alpha_d_aff = (opts.step_frac * block_max_step(&s, &ds_a)).min(1.0);

        let x_aff: BlockMat = x
            .iter()
            .zip(&dx_a)
            .map(|(xb, d)| xb + d * Complex64::new(alpha_p_aff, 0.0))
            .collect();
        let s_aff: BlockMat = s
            .iter()
            .zip(&ds_a)
            .map(|(sb, d)| sb + d * Complex64::new(alpha_d_aff, 0.0))
            .collect();
        let mu_aff = block_inner(&x_aff, &s_aff) / ws.n_total;
        let sigma = (mu_aff / mu).powi(3).clamp(1e-12, 1.0);

        // corrector: target σμ S⁻¹ − X, optionally minus the Mehrotra
        // second-order term Sym(ΔXₐ ΔSₐ S⁻¹). The second-order direction can
        // degrade near a degenerate optimal face, so it is kept only when it
        // permits at least as large a step as the plain centering direction.
        let rc_plain: BlockMat = x
            .iter()
            .zip(&s_inv)
            .map(|(xb, sib)| sib * Complex64::new(sigma * mu, 0.0) - xb)
            .collect();
        let (mut dy, mut dx, mut ds) = solve_direction(&rc_plain);
        let mut alpha_p = (opts.step_frac * block_max_step(&x, &dx)).min(1.0);
        let mut alpha_d = (opts.step_frac * block_max_step(&s, &ds)).min(1.0);
        if opts.second_order {
            let rc_so: BlockMat = rc_plain
                .iter()
                .zip(dx_a.iter().zip(&ds_a))
                .zip(&s_inv)
                .map(|((base, (dxa, dsa)), sib)| base - hermitize(&(dxa * dsa * sib)))
                .collect();
            let (dy2, dx2, ds2) = solve_direction(&rc_so);
            let ap2 = (opts.step_frac * block_max_step(&x, &dx2)).min(1.0);
            let ad2 = (opts.step_frac * block_max_step(&s, &ds2)).min(1.0);
            if ap2.min(ad2) >= alpha_p.min(alpha_d) {
                (dy, dx, ds) = (dy2, dx2, ds2);
                (alpha_p, alpha_d) = (ap2, ad2);
            }
        }

        for (xb, d) in x.iter_mut().zip(&dx) {
            *xb = hermitize(&(&*xb + d * Complex64::new(alpha_p, 0.0)));
        }
        for (sb, d) in s.iter_mut().zip(&ds) {
            *sb = hermitize(&(&*sb + d * Complex64::new(alpha_d, 0.0)));
        }
        for (yi, d) in y.iter_mut().zip(&dy) {
            *yi += alpha_d * d;
        }
    }

    // final report
    let ax = ws.apply_a(&x);
    let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
    let astar_y = ws.apply_a_star(&y);
    let rd: BlockMat = p
        .objective
        .iter()
        .zip(&s)
        .zip(&astar_y)
        .map(|((c, sb), ay)| c - sb - ay)
        .collect();
    let pobj = block_inner(&p.objective, &x);
    let dobj: f64 = b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();

    Ok(SdpSolution {
        value: pobj,
        dual_value: dobj,
        duality_gap: (pobj - dobj).abs(),
        complementarity: block_inner(&x, &s),
        primal_residual: rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + b_norm),
        dual_residual: block_frob(&rd) / (1.0 + c_norm),
        iterations,
        status,
        primal: x,
        dual_y: y,
        dual_slack: s,
    })
}
