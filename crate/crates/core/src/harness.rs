//! Manufactured solution, discretization errors, and the h/p studies.

use std::f64::consts::PI;
use std::io::Write;

use crate::assembly::{assemble, assemble_operators, default_quadrature, physical_modes};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::meshing::{build_dof_map, lshape_mesh, perturbed_quad_mesh, refine, structured_square_mesh, DofMap, Mesh};
use crate::refbasis::SpectralOrder;
use crate::solvers::{constraint_residual, solve_eigen, solve_saddle, EigenSolution, SourceSolution};

/// A field with its curl, double curl and quad-curl load, as plain functions.
#[derive(Clone, Copy)]
pub struct ExactSolution {
    pub u: fn(Point) -> Point,
    pub curl_u: fn(Point) -> f64,
    pub curlcurl_u: fn(Point) -> Point,
    pub f: fn(Point) -> Point,
}

impl ExactSolution {
    pub fn zero() -> Self {
        Self { u: |_| [0.0, 0.0], curl_u: |_| 0.0, curlcurl_u: |_| [0.0, 0.0], f: |_| [0.0, 0.0] }
    }
}

/// Derivatives 0..=5 of sin³(πt).
fn sin_cubed(t: f64) -> [f64; 6] {
    let (s, c) = (PI * t).sin_cos();
    let s2 = s * s;
    [
        s2 * s,
        3.0 * PI * s2 * c,
        PI.powi(2) * (6.0 * s - 9.0 * s2 * s),
        PI.powi(3) * c * (6.0 - 27.0 * s2),
        PI.powi(4) * (81.0 * s2 * s - 60.0 * s),
        PI.powi(5) * c * (243.0 * s2 - 60.0),
    ]
}

/// u = (∂yψ, −∂xψ) with stream function ψ = sin³(πx) sin³(πy).
pub fn manufactured_solution() -> ExactSolution {
    ExactSolution {
        u: |p| {
            let (x, y) = (sin_cubed(p[0]), sin_cubed(p[1]));
            [x[0] * y[1], -x[1] * y[0]]
        },
        curl_u: |p| {
            let (x, y) = (sin_cubed(p[0]), sin_cubed(p[1]));
            -(x[2] * y[0] + x[0] * y[2])
        },
        curlcurl_u: |p| {
            let (x, y) = (sin_cubed(p[0]), sin_cubed(p[1]));
            [-(x[2] * y[1] + x[0] * y[3]), x[3] * y[0] + x[1] * y[2]]
        },
        f: |p| {
            let (x, y) = (sin_cubed(p[0]), sin_cubed(p[1]));
            let dy = x[4] * y[1] + 2.0 * x[2] * y[3] + x[0] * y[5];
            let dx = x[5] * y[0] + 2.0 * x[3] * y[2] + x[1] * y[4];
            [dy, -dx]
        },
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    /// Free vector unknowns.
    pub dofs: usize,
    pub l2: f64,
    pub hcurl_semi: f64,
    pub hcurl2_semi: f64,
    pub order_l2: Option<f64>,
    pub order_hcurl: Option<f64>,
    pub order_hcurl2: Option<f64>,
}

/// Quadrature points per direction for error integrals.
pub fn error_quadrature(order: SpectralOrder) -> usize {
    order.max_index() + 6
}

/// L² norms of the field, curl and double-curl errors. `h` is reported as
/// sqrt(area / elements), the uniform cell size of the same mesh.
pub fn error_norms(
    mesh: &Mesh,
    dofmap: &DofMap,
    order: SpectralOrder,
    u_coeffs: &[f64],
    exact: &ExactSolution,
    q: usize,
) -> Result<ErrorReport> {
    if order != dofmap.order {
        return Err(Error::DimensionMismatch(format!("DOF map built for order {} not {order}", dofmap.order)));
    }
    if u_coeffs.len() != dofmap.n_u() {
        return Err(Error::DimensionMismatch(format!("{} coefficients for {} unknowns", u_coeffs.len(), dofmap.n_u())));
    }
    let mut sums = [0.0; 3];
    for (e, quad) in mesh.quads().iter().enumerate() {
        let local = dofmap.gather_u(e, u_coeffs);
        for pm in physical_modes(quad, order, q)? {
            let mut v = [0.0; 2];
            let mut c = 0.0;
            let mut cc = [0.0; 2];
            for (i, &a) in local.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                v[0] += a * pm.value[i][0];
                v[1] += a * pm.value[i][1];
                c += a * pm.curl[i];
                cc[0] += a * pm.curl_curl[i][0];
                cc[1] += a * pm.curl_curl[i][1];
            }
            let (ue, ce, cce) = ((exact.u)(pm.point), (exact.curl_u)(pm.point), (exact.curlcurl_u)(pm.point));
            sums[0] += pm.weight * ((v[0] - ue[0]).powi(2) + (v[1] - ue[1]).powi(2));
            sums[1] += pm.weight * (c - ce).powi(2);
            sums[2] += pm.weight * ((cc[0] - cce[0]).powi(2) + (cc[1] - cce[1]).powi(2));
        }
    }
    let area: f64 = mesh.quads().iter().map(|q| q.area()).sum();
    Ok(ErrorReport {
        h: (area / mesh.num_elements() as f64).sqrt(),
        dofs: dofmap.n_u(),
        l2: sums[0].sqrt(),
        hcurl_semi: sums[1].sqrt(),
        hcurl2_semi: sums[2].sqrt(),
        order_l2: None,
        order_hcurl: None,
        order_hcurl2: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshKind {
    Uniform,
    Perturbed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Square,
    LShape,
}

impl Domain {
    pub fn default_shift(self) -> f64 {
        match self {
            Domain::Square => 500.0,
            Domain::LShape => 300.0,
        }
    }

    /// Uniform mesh with n cells per unit length.
    pub fn mesh(self, n: usize) -> Result<Mesh> {
        match self {
            Domain::Square => structured_square_mesh(n),
            Domain::LShape => lshape_mesh(n),
        }
    }
}

/// Interior vertex jitter of perturbed meshes, as a fraction of h.
pub const DEFAULT_PERTURBATION: f64 = 0.15;

/// Mesh on the unit square with n cells per side. Perturbed meshes jitter
/// the coarsest level and refine it, so h is the base cell size.
pub fn source_mesh(kind: MeshKind, n: usize, seed: u64) -> Result<Mesh> {
    match kind {
        MeshKind::Uniform => structured_square_mesh(n),
        MeshKind::Perturbed => perturbed_quad_mesh(n, DEFAULT_PERTURBATION, seed),
    }
}

/// Assembles and solves the manufactured problem; returns the solution and its errors.
pub fn solve_manufactured(
    mesh: &Mesh,
    order: SpectralOrder,
    q: Option<usize>,
) -> Result<(DofMap, SourceSolution, ErrorReport)> {
    let exact = manufactured_solution();
    let dofmap = build_dof_map(mesh, order, true)?;
    let system = assemble(mesh, &dofmap, order, exact.f, q.unwrap_or_else(|| default_quadrature(order)))?;
    let sol = solve_saddle(&system)?;
    let report = error_norms(mesh, &dofmap, order, &sol.u_coeffs, &exact, error_quadrature(order))?;
    Ok((dofmap, sol, report))
}

fn rate(prev: f64, cur: f64, h_prev: f64, h_cur: f64) -> Option<f64> {
    (prev > 0.0 && cur > 0.0).then(|| (prev / cur).ln() / (h_prev / h_cur).ln())
}

/// Fills the order fields from consecutive levels.
pub fn annotate_orders(reports: &mut [ErrorReport]) {
    for i in 1..reports.len() {
        let (p, c) = (reports[i - 1].clone(), &mut reports[i]);
        c.order_l2 = rate(p.l2, c.l2, p.h, c.h);
        c.order_hcurl = rate(p.hcurl_semi, c.hcurl_semi, p.h, c.h);
        c.order_hcurl2 = rate(p.hcurl2_semi, c.hcurl2_semi, p.h, c.h);
    }
}

/// Manufactured-solution errors on `levels` meshes starting from `base_n`
/// cells per side, halving h each level.
pub fn convergence_study(
    kind: MeshKind,
    base_n: usize,
    levels: usize,
    order: SpectralOrder,
    seed: u64,
) -> Result<Vec<ErrorReport>> {
    if levels < 1 {
        return Err(Error::InvalidParameter("study needs at least one level".into()));
    }
    let mut mesh = source_mesh(kind, base_n, seed)?;
    let mut reports = Vec::with_capacity(levels);
    for level in 0..levels {
        if level > 0 {
            mesh = match kind {
                MeshKind::Uniform => structured_square_mesh(base_n << level)?,
                MeshKind::Perturbed => refine(&mesh)?,
            };
        }
        let (_, _, mut report) = solve_manufactured(&mesh, order, None)?;
        report.h = 1.0 / (base_n << level) as f64;
        reports.push(report);
    }
    annotate_orders(&mut reports);
    Ok(reports)
}

/// Errors for orders (n,n,n), n in `orders`, on a fixed uniform mesh.
pub fn p_convergence_study(n: usize, orders: &[usize]) -> Result<Vec<(SpectralOrder, ErrorReport)>> {
    let mesh = structured_square_mesh(n)?;
    orders
        .iter()
        .map(|&p| {
            let order = SpectralOrder::uniform(p)?;
            Ok((order, solve_manufactured(&mesh, order, None)?.2))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct EigenLevel {
    pub h: f64,
    pub n_u: usize,
    pub solution: EigenSolution,
    /// ‖Bᵀv‖ / (‖B‖∞ ‖v‖) per eigenvector.
    pub constraint_residuals: Vec<f64>,
}

const SHIFT_RETRIES: [f64; 4] = [1.0, 0.93, 1.07, 0.81];

/// First k eigenvalues on the uniform mesh with n cells per unit length.
/// A failed solve is retried with a perturbed shift.
pub fn eigen_study(domain: Domain, n: usize, order: SpectralOrder, k: usize, shift: Option<f64>) -> Result<EigenLevel> {
    let mesh = domain.mesh(n)?;
    let dofmap = build_dof_map(&mesh, order, true)?;
    let system = assemble_operators(&mesh, &dofmap, default_quadrature(order))?;
    let sigma = shift.unwrap_or_else(|| domain.default_shift());
    let mut last = None;
    for factor in SHIFT_RETRIES {
        match solve_eigen(&system, k, sigma * factor) {
            Ok(solution) => {
                let constraint_residuals =
                    solution.eigenvectors.iter().map(|v| constraint_residual(&system, v)).collect();
                return Ok(EigenLevel { h: 1.0 / n as f64, n_u: system.n_u, solution, constraint_residuals });
            }
            Err(e @ (Error::Singular(_) | Error::NoConvergence { .. })) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Eigen studies at n = base_n, 2 base_n, … .
pub fn eigen_levels(
    domain: Domain,
    base_n: usize,
    levels: usize,
    order: SpectralOrder,
    k: usize,
) -> Result<Vec<EigenLevel>> {
    (0..levels).map(|l| eigen_study(domain, base_n << l, order, k, None)).collect()
}

/// Observed order log2(d₁/d₂) from three values on halving meshes, where
/// dᵢ is the relative change between consecutive levels.
pub fn observed_order(values: [f64; 3]) -> f64 {
    let d1 = ((values[1] - values[0]) / values[0]).abs();
    let d2 = ((values[2] - values[1]) / values[1]).abs();
    (d1 / d2).log2()
}

/// Richardson extrapolation of three values on halving meshes.
/// Returns (limit, observed order).
pub fn richardson(values: [f64; 3]) -> (f64, f64) {
    let d1 = values[0] - values[1];
    let d2 = values[1] - values[2];
    let p = (d1 / d2).abs().log2();
    (values[2] - d2 / (2f64.powf(p) - 1.0), p)
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.16e}"))
}

pub fn write_source_csv<W: Write>(mut w: W, reports: &[ErrorReport]) -> Result<()> {
    writeln!(w, "h,dofs,l2_err,l2_order,hcurl_err,hcurl_order,hcurl2_err,hcurl2_order")?;
    for r in reports {
        writeln!(
            w,
            "{:.16e},{},{:.16e},{},{:.16e},{},{:.16e},{}",
            r.h,
            r.dofs,
            r.l2,
            opt(r.order_l2),
            r.hcurl_semi,
            opt(r.order_hcurl),
            r.hcurl2_semi,
            opt(r.order_hcurl2)
        )?;
    }
    Ok(())
}

pub fn write_eigen_csv<W: Write>(mut w: W, levels: &[EigenLevel]) -> Result<()> {
    writeln!(w, "h,index,lambda,cluster_id")?;
    for level in levels {
        let s = &level.solution;
        for (i, (lam, c)) in s.eigenvalues.iter().zip(&s.cluster_ids).enumerate() {
            writeln!(w, "{:.16e},{},{:.16e},{}", level.h, i + 1, lam, c)?;
        }
    }
    Ok(())
}
