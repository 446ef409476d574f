//! Direct saddle-point solves and a shift-invert subspace eigensolver.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::{Mat, Side};

use crate::assembly::SaddleSystem;
use crate::error::{Error, Result};
use crate::meshing::SplitMix64;
use crate::sparse::{dot, norm, CsrMatrix};

const REFINEMENT_STEPS: usize = 5;
const SADDLE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SourceSolution {
    pub u_coeffs: Vec<f64>,
    pub p_coeffs: Vec<f64>,
    /// ‖K z − rhs‖ for the full block matrix K.
    pub residual_norm: f64,
    /// `residual_norm / (1 + ‖rhs‖)`.
    pub relative_residual: f64,
    /// ‖Bᵀu‖ / (‖B‖∞ ‖u‖), zero when u vanishes.
    pub constraint_residual: f64,
}

#[derive(Clone, Debug)]
pub struct EigenSolution {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub multipliers: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub cluster_ids: Vec<usize>,
    pub iterations: usize,
    pub shift: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    pub shift: f64,
    /// Subspace size; `None` means k + 5.
    pub block_size: Option<usize>,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl EigenOptions {
    pub fn with_shift(shift: f64) -> Self {
        Self { shift, block_size: None, max_iterations: 200, tolerance: 1e-9, seed: 0x5eed }
    }
}

struct Factored {
    lu: Lu<usize, f64>,
    matrix: CsrMatrix,
}

impl Factored {
    fn new(matrix: CsrMatrix) -> Result<Self> {
        let lu = matrix.to_faer()?.sp_lu().map_err(|e| Error::Singular(format!("LU factorization failed: {e:?}")))?;
        Ok(Self { lu, matrix })
    }

    /// Solves K Z = R column by column with iterative refinement.
    fn solve(&self, rhs: &Mat<f64>) -> Result<(Mat<f64>, Vec<f64>)> {
        let mut z = self.lu.solve(rhs);
        let mut res = vec![0.0; rhs.ncols()];
        for c in 0..rhs.ncols() {
            let b: Vec<f64> = (0..rhs.nrows()).map(|i| rhs[(i, c)]).collect();
            let bnorm = norm(&b);
            let mut x: Vec<f64> = (0..rhs.nrows()).map(|i| z[(i, c)]).collect();
            let mut r = residual(&self.matrix, &x, &b);
            let mut rnorm = norm(&r);
            for _ in 0..REFINEMENT_STEPS {
                if rnorm <= SADDLE_TOL * 1e-3 * (1.0 + bnorm) {
                    break;
                }
                let mut d = Mat::from_fn(r.len(), 1, |i, _| r[i]);
                self.lu.solve_in_place(d.as_mut());
                let trial: Vec<f64> = x.iter().enumerate().map(|(i, v)| v + d[(i, 0)]).collect();
                let tr = residual(&self.matrix, &trial, &b);
                let tn = norm(&tr);
                if tn.is_nan() || tn >= rnorm {
                    break;
                }
                x = trial;
                r = tr;
                rnorm = tn;
            }
            if !rnorm.is_finite() || x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Singular("non-finite solution of the block system".into()));
            }
            for (i, v) in x.iter().enumerate() {
                z[(i, c)] = *v;
            }
            res[c] = rnorm / (1.0 + bnorm);
        }
        Ok((z, res))
    }
}

fn residual(k: &CsrMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    k.matvec(x).iter().zip(b).map(|(kx, bi)| kx - bi).collect()
}

/// ‖Bᵀu‖ / (‖B‖∞ ‖u‖).
pub fn constraint_residual(system: &SaddleSystem, u: &[f64]) -> f64 {
    let un = norm(u);
    if un == 0.0 || system.n_p == 0 {
        return 0.0;
    }
    norm(&system.b.matvec_transpose(u)) / (system.b.norm_inf().max(f64::MIN_POSITIVE) * un)
}

/// Solves [A B; Bᵀ 0][u; p] = [f; 0] by sparse LU with iterative refinement.
pub fn solve_saddle(system: &SaddleSystem) -> Result<SourceSolution> {
    if system.n_u == 0 {
        return Err(Error::InvalidParameter("saddle system has no free vector unknowns".into()));
    }
    let factored = Factored::new(system.block())?;
    let rhs = system.rhs();
    let (z, rel) = factored.solve(&Mat::from_fn(rhs.len(), 1, |i, _| rhs[i]))?;
    let relative_residual = rel[0];
    if relative_residual > SADDLE_TOL {
        return Err(Error::Singular(format!("block residual {relative_residual:e} after refinement")));
    }
    let u_coeffs: Vec<f64> = (0..system.n_u).map(|i| z[(i, 0)]).collect();
    let p_coeffs: Vec<f64> = (0..system.n_p).map(|i| z[(system.n_u + i, 0)]).collect();
    let constraint_residual = constraint_residual(system, &u_coeffs);
    Ok(SourceSolution {
        residual_norm: relative_residual * (1.0 + norm(&rhs)),
        relative_residual,
        constraint_residual,
        u_coeffs,
        p_coeffs,
    })
}

fn col(m: &Mat<f64>, c: usize, rows: std::ops::Range<usize>) -> Vec<f64> {
    rows.map(|i| m[(i, c)]).collect()
}

/// Modified Gram–Schmidt in the M inner product, applied twice. Columns that
/// collapse are dropped.
fn m_orthonormalize(mass: &CsrMatrix, cols: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut mbasis: Vec<Vec<f64>> = Vec::new();
    for mut v in cols {
        let start = dot(&v, &mass.matvec(&v)).max(0.0).sqrt();
        for _ in 0..2 {
            for (q, mq) in basis.iter().zip(&mbasis) {
                let c = dot(&v, mq);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let mv = mass.matvec(&v);
        let n = dot(&v, &mv).max(0.0).sqrt();
        if n <= 1e-10 * start || n == 0.0 {
            continue;
        }
        basis.push(v.iter().map(|a| a / n).collect());
        mbasis.push(mv.iter().map(|a| a / n).collect());
    }
    basis
}

/// Smallest positive eigenvalues of A x + B w = λ M x, Bᵀ x = 0, nearest to
/// the shift.
pub fn solve_eigen(system: &SaddleSystem, k: usize, shift: f64) -> Result<EigenSolution> {
    solve_eigen_with(system, k, EigenOptions::with_shift(shift))
}

pub fn solve_eigen_with(system: &SaddleSystem, k: usize, opts: EigenOptions) -> Result<EigenSolution> {
    let (nu, np) = (system.n_u, system.n_p);
    if k == 0 {
        return Err(Error::InvalidParameter("number of eigenvalues must be at least 1".into()));
    }
    if !opts.shift.is_finite() {
        return Err(Error::InvalidParameter("shift must be finite".into()));
    }
    let bsize = opts.block_size.unwrap_or(k + 5).max(k).min(nu);
    if bsize < k {
        return Err(Error::InvalidParameter(format!("requested {k} eigenvalues from {nu} unknowns")));
    }
    let sigma = opts.shift;
    let factored = Factored::new(system.shifted_block(sigma))?;

    // x ↦ (y, q) with [A−σM B; Bᵀ 0][y; q] = [Mx; 0]
    let apply = |xs: &[Vec<f64>]| -> Result<Mat<f64>> {
        let mut rhs = Mat::<f64>::zeros(nu + np, xs.len());
        for (c, x) in xs.iter().enumerate() {
            for (i, v) in system.mass.matvec(x).into_iter().enumerate() {
                rhs[(i, c)] = v;
            }
        }
        Ok(factored.solve(&rhs)?.0)
    };

    let mut rng = SplitMix64(opts.seed);
    let start: Vec<Vec<f64>> = (0..bsize).map(|_| (0..nu).map(|_| rng.next_f64() - 0.5).collect()).collect();
    let y0 = apply(&start)?;
    let mut x = m_orthonormalize(&system.mass, (0..bsize).map(|c| col(&y0, c, 0..nu)).collect());
    let mut theta: Vec<f64> = Vec::new();
    let mut last_defect = f64::INFINITY;

    for iter in 0..opts.max_iterations {
        let yp = apply(&x)?;
        let y: Vec<Vec<f64>> = (0..x.len()).map(|c| col(&yp, c, 0..nu)).collect();

        if !theta.is_empty() {
            let want = wanted(&theta, sigma, k);
            let defect = want
                .iter()
                .map(|&i| {
                    let d: Vec<f64> = y[i].iter().zip(&x[i]).map(|(a, b)| (theta[i] - sigma) * a - b).collect();
                    dot(&d, &system.mass.matvec(&d)).max(0.0).sqrt()
                })
                .fold(0.0, f64::max);
            last_defect = defect;
            if want.len() == k && defect <= opts.tolerance {
                return finish(system, &x, &yp, &theta, &want, sigma, iter + 1);
            }
        }

        let q = m_orthonormalize(&system.mass, y);
        if q.len() < k {
            return Err(Error::Singular("subspace collapsed during iteration".into()));
        }
        let aq: Vec<Vec<f64>> = q.iter().map(|v| system.a.matvec(v)).collect();
        let m = q.len();
        let h = Mat::from_fn(m, m, |i, j| 0.5 * (dot(&q[i], &aq[j]) + dot(&q[j], &aq[i])));
        let evd = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Singular(format!("Rayleigh-Ritz eigensolve failed: {e:?}")))?;
        let s = evd.S().column_vector();
        let v = evd.U();
        theta = (0..m).map(|i| s[i]).collect();
        x = (0..m)
            .map(|j| {
                let mut out = vec![0.0; nu];
                for (i, qi) in q.iter().enumerate() {
                    let c = v[(i, j)];
                    out.iter_mut().zip(qi).for_each(|(o, a)| *o += c * a);
                }
                out
            })
            .collect();
    }
    Err(Error::NoConvergence { iterations: opts.max_iterations, residual: last_defect })
}

/// Indices of admissible Ritz values nearest σ, ascending by value.
fn wanted(theta: &[f64], sigma: f64, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..theta.len()).filter(|&i| theta[i] > 0.0 && theta[i].abs() <= 1e12).collect();
    idx.sort_by(|&a, &b| (theta[a] - sigma).abs().total_cmp(&(theta[b] - sigma).abs()));
    idx.truncate(k);
    idx.sort_by(|&a, &b| theta[a].total_cmp(&theta[b]));
    idx
}

fn finish(
    system: &SaddleSystem,
    x: &[Vec<f64>],
    yp: &Mat<f64>,
    theta: &[f64],
    want: &[usize],
    sigma: f64,
    iterations: usize,
) -> Result<EigenSolution> {
    let (nu, np) = (system.n_u, system.n_p);
    let mut out = EigenSolution {
        eigenvalues: Vec::new(),
        eigenvectors: Vec::new(),
        multipliers: Vec::new(),
        residuals: Vec::new(),
        cluster_ids: Vec::new(),
        iterations,
        shift: sigma,
    };
    for &i in want {
        let lam = theta[i];
        let w: Vec<f64> = col(yp, i, nu..nu + np).iter().map(|v| (lam - sigma) * v).collect();
        let mx = system.mass.matvec(&x[i]);
        let ax = system.a.matvec(&x[i]);
        let bw = system.b.matvec(&w);
        let r: Vec<f64> = (0..nu).map(|j| ax[j] + bw[j] - lam * mx[j]).collect();
        let rel = norm(&r) / (lam * norm(&mx));
        if rel.is_nan() || rel > 1e-5 * lam.abs() {
            continue;
        }
        out.eigenvalues.push(lam);
        out.eigenvectors.push(x[i].clone());
        out.multipliers.push(w);
        out.residuals.push(rel);
    }
    if out.eigenvalues.is_empty() {
        return Err(Error::NoConvergence { iterations, residual: f64::INFINITY });
    }
    out.cluster_ids = cluster_ids(&out.eigenvalues, 1e-6);
    Ok(out)
}

/// Groups ascending values whose consecutive relative gap is within `rel`.
pub fn cluster_ids(values: &[f64], rel: f64) -> Vec<usize> {
    let mut ids = Vec::with_capacity(values.len());
    let mut id = 0;
    for (i, v) in values.iter().enumerate() {
        if i > 0 && (v - values[i - 1]).abs() > rel * v.abs().max(values[i - 1].abs()) {
            id += 1;
        }
        ids.push(id);
    }
    ids
}
