//! Floating-point layer: Hamiltonian flows (fixed-step RK4), flow-map
//! bracket invariance, induced symplectic pairings on leaves, tensor-product
//! Gauss-Legendre leaf integrals, Dirac pairings and the symplectic
//! volume-form bracket identity.

pub mod expr;
pub mod quad;

use num_traits::Zero;
use serde::Deserialize;

use crate::calculus::schouten;
use crate::error::{Error, Result};
use crate::exterior::{DiffForm, MultiVector};
use crate::linalg::{self, QMatrix};
use crate::poisson::{bracket, hamiltonian_field, PoissonStructure};
use crate::ring::{Point, Poly, Rational};

pub use expr::Expr;

/// Relative tolerance for the range and well-definedness checks of the
/// leaf pairing.
const RANGE_TOL: f64 = 1e-9;

/// A fixed-step RK4 integration request for one Hamiltonian flow.
#[derive(Debug, Clone)]
pub struct FlowSpec {
    pub hamiltonian: Poly,
    pub start: Vec<f64>,
    pub duration: f64,
    pub steps: usize,
}

impl FlowSpec {
    fn validate(&self, num_vars: usize) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Invalid("step count must be at least 1".into()));
        }
        if !self.duration.is_finite() {
            return Err(Error::NonFinite("flow duration".into()));
        }
        if self.start.len() != num_vars {
            return Err(Error::DimensionMismatch {
                expected: num_vars,
                got: self.start.len(),
            });
        }
        Ok(())
    }
}

fn field_components(p: &PoissonStructure, h: &Poly) -> Result<Vec<Poly>> {
    let n = p.num_vars();
    let x_h = hamiltonian_field(p, h)?;
    Ok((0..n).map(|j| x_h.coefficient(&[j])).collect())
}

fn rk4_step(components: &[Poly], x: &[f64], dt: f64) -> Vec<f64> {
    let eval = |y: &[f64]| -> Vec<f64> { components.iter().map(|c| c.eval_f64(y)).collect() };
    let n = x.len();
    let k1 = eval(x);
    let mid1: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * dt * k1[i]).collect();
    let k2 = eval(&mid1);
    let mid2: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * dt * k2[i]).collect();
    let k3 = eval(&mid2);
    let end: Vec<f64> = (0..n).map(|i| x[i] + dt * k3[i]).collect();
    let k4 = eval(&end);
    (0..n)
        .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// RK4 trajectory of `x' = X_h(x)`, including the start point.
pub fn flow(p: &PoissonStructure, spec: &FlowSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate(p.num_vars())?;
    let components = field_components(p, &spec.hamiltonian)?;
    let dt = spec.duration / spec.steps as f64;
    let mut out = Vec::with_capacity(spec.steps + 1);
    let mut x = spec.start.clone();
    out.push(x.clone());
    for step in 0..spec.steps {
        x = rk4_step(&components, &x, dt);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("trajectory at step {}", step + 1)));
        }
        out.push(x.clone());
    }
    Ok(out)
}

fn flow_endpoint(
    components: &[Poly],
    start: &[f64],
    duration: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    let dt = duration / steps as f64;
    let mut x = start.to_vec();
    for step in 0..steps {
        x = rk4_step(components, &x, dt);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("trajectory at step {}", step + 1)));
        }
    }
    Ok(x)
}

/// The structure matrix `B(x)` with `B[i][j] = {x_i, x_j}(x)`.
fn structure_matrix_f64(bivector: &MultiVector, x: &[f64]) -> Vec<Vec<f64>> {
    let n = bivector.num_vars();
    let mut b = vec![vec![0.0; n]; n];
    for (k, c) in bivector.terms() {
        let (i, j) = (k[0], k[1]);
        let v = c.eval_f64(x);
        b[i][j] += v;
        b[j][i] -= v;
    }
    b
}

fn gradient_f64(f: &Poly, x: &[f64]) -> Vec<f64> {
    (0..f.num_vars())
        .map(|i| f.partial(i).expect("index in range").eval_f64(x))
        .collect()
}

fn bilinear(a: &[f64], b: &[Vec<f64>], c: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, ai) in a.iter().enumerate() {
        for (j, cj) in c.iter().enumerate() {
            acc += ai * b[i][j] * cj;
        }
    }
    acc
}

/// Residual of the flow-invariance identity
/// `{g ∘ phi_t, h ∘ phi_t}(x) = {g, h}(phi_t(x))`, with the flow-map
/// Jacobian estimated by central finite differences of step `fd_step`.
pub fn bracket_invariance_check(
    p: &PoissonStructure,
    spec: &FlowSpec,
    g: &Poly,
    h: &Poly,
    fd_step: f64,
) -> Result<f64> {
    spec.validate(p.num_vars())?;
    let n = p.num_vars();
    let components = field_components(p, &spec.hamiltonian)?;
    let end = flow_endpoint(&components, &spec.start, spec.duration, spec.steps)?;
    // Jacobian columns d(phi_t)/d(x_i)
    let mut jac = vec![vec![0.0; n]; n]; // jac[a][i] = d phi_a / d x_i
    for i in 0..n {
        let mut plus = spec.start.clone();
        plus[i] += fd_step;
        let mut minus = spec.start.clone();
        minus[i] -= fd_step;
        let fp = flow_endpoint(&components, &plus, spec.duration, spec.steps)?;
        let fm = flow_endpoint(&components, &minus, spec.duration, spec.steps)?;
        for a in 0..n {
            jac[a][i] = (fp[a] - fm[a]) / (2.0 * fd_step);
        }
    }
    let b_start = structure_matrix_f64(p.bivector(), &spec.start);
    let b_end = structure_matrix_f64(p.bivector(), &end);
    let grad_g = gradient_f64(g, &end);
    let grad_h = gradient_f64(h, &end);
    // (J^T grad_g)^T B(x) (J^T grad_h)
    let jt = |v: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| (0..n).map(|a| jac[a][i] * v[a]).sum())
            .collect()
    };
    let lhs = bilinear(&jt(&grad_g), &b_start, &jt(&grad_h));
    let rhs = bilinear(&grad_g, &b_end, &grad_h);
    let residual = (lhs - rhs).abs();
    if !residual.is_finite() {
        return Err(Error::NonFinite("bracket invariance residual".into()));
    }
    Ok(residual)
}

/// Particular solution of `B a = u` with free variables zero, plus a basis
/// of the numerical null space and the residual norm of the solution.
#[allow(clippy::needless_range_loop)]
fn solve_with_kernel(b: &[Vec<f64>], u: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>, f64) {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = b[i].clone();
            row.push(u[i]);
            row
        })
        .collect();
    let scale = m
        .iter()
        .flat_map(|r| r[..n].iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    let tol = 1e-12 * scale;
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for col in 0..n {
        let Some(sel) = (r..n).max_by(|&a, &b2| {
            m[a][col]
                .abs()
                .partial_cmp(&m[b2][col].abs())
                .expect("finite")
        }) else {
            break;
        };
        if m[sel][col].abs() <= tol {
            continue;
        }
        m.swap(r, sel);
        for i in 0..n {
            if i == r {
                continue;
            }
            let f = m[i][col] / m[r][col];
            if f != 0.0 {
                for j in col..=n {
                    m[i][j] -= f * m[r][j];
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let mut alpha = vec![0.0; n];
    for (row, &pc) in pivots.iter().enumerate() {
        alpha[pc] = m[row][n] / m[row][pc];
    }
    let mut kernel = Vec::new();
    for free in 0..n {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![0.0; n];
        v[free] = 1.0;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[row][free] / m[row][pc];
        }
        kernel.push(v);
    }
    let mut residual = 0.0f64;
    for i in 0..n {
        let mut acc = -u[i];
        for j in 0..n {
            acc += b[i][j] * alpha[j];
        }
        residual += acc * acc;
    }
    (alpha, kernel, residual.sqrt())
}

/// The induced leaf pairing `w_N(u, v)` at a point: solve `B(x) a = u` in
/// the least-squares sense and return `a . v`. The value is checked to be
/// independent of the null-space representative.
pub fn leaf_form_at(p: &PoissonStructure, x: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
    p.require_verified()?;
    let n = p.num_vars();
    if x.len() != n || u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len().max(u.len()).max(v.len()),
        });
    }
    for value in x.iter().chain(u).chain(v) {
        if !value.is_finite() {
            return Err(Error::NonFinite("leaf pairing input".into()));
        }
    }
    let b = structure_matrix_f64(p.bivector(), x);
    let unorm = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let (alpha, kernel, residual) = solve_with_kernel(&b, u);
    if residual > RANGE_TOL * (1.0 + unorm) {
        return Err(Error::OutsideRange(residual));
    }
    let value: f64 = alpha.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    for w in &kernel {
        let drift: f64 = w.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        if drift.abs() > RANGE_TOL * (1.0 + value.abs()) {
            return Err(Error::ChartInvariant(format!(
                "leaf pairing not well-defined: null-space drift {drift:e}"
            )));
        }
    }
    Ok(value)
}

#[derive(Debug, Deserialize)]
struct ChartFile {
    params: Vec<String>,
    bounds: Vec<[f64; 2]>,
    map: Vec<String>,
    nodes: Vec<usize>,
}

/// A parametrized symplectic-leaf patch with its tensor-product quadrature.
#[derive(Debug, Clone)]
pub struct LeafChart {
    pub params: Vec<String>,
    pub bounds: Vec<(f64, f64)>,
    pub map: Vec<Expr>,
    pub nodes: Vec<usize>,
}

impl LeafChart {
    pub fn from_json(text: &str) -> Result<LeafChart> {
        let file: ChartFile = serde_json::from_str(text).map_err(|e| Error::ParseFile {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if file.params.is_empty() || !file.params.len().is_multiple_of(2) {
            return Err(Error::Invalid(
                "charts need an even, positive number of parameters".into(),
            ));
        }
        if file.bounds.len() != file.params.len() || file.nodes.len() != file.params.len() {
            return Err(Error::Invalid(
                "bounds and nodes must match the parameter count".into(),
            ));
        }
        if file.nodes.contains(&0) {
            return Err(Error::Invalid("node counts must be positive".into()));
        }
        let map = file
            .map
            .iter()
            .map(|s| expr::ExprParser::parse(s, &file.params))
            .collect::<Result<Vec<_>>>()?;
        Ok(LeafChart {
            params: file.params,
            bounds: file.bounds.iter().map(|b| (b[0], b[1])).collect(),
            map,
            nodes: file.nodes,
        })
    }

    /// Half the parameter count: the leaf is 2k-dimensional.
    pub fn half_dim(&self) -> usize {
        self.params.len() / 2
    }

    pub fn point_at(&self, theta: &[f64]) -> Vec<f64> {
        self.map.iter().map(|e| e.eval(theta)).collect()
    }

    fn tangents_at(&self, diffs: &[Vec<Expr>], theta: &[f64]) -> Vec<Vec<f64>> {
        diffs
            .iter()
            .map(|column| column.iter().map(|e| e.eval(theta)).collect())
            .collect()
    }

    /// Symbolic parameter derivatives of the map, one column per parameter.
    fn map_derivatives(&self) -> Vec<Vec<Expr>> {
        (0..self.params.len())
            .map(|i| self.map.iter().map(|e| e.diff(i)).collect())
            .collect()
    }
}

fn numeric_rank(b: &[Vec<f64>]) -> usize {
    let zero = vec![0.0; b.len()];
    let (_, kernel, _) = solve_with_kernel(b, &zero);
    b.len() - kernel.len()
}

/// Signed sum over perfect matchings: the Pfaffian of an antisymmetric
/// matrix given as full rows.
fn pfaffian(w: &[Vec<f64>]) -> f64 {
    let n = w.len();
    if n == 0 {
        return 1.0;
    }
    let mut acc = 0.0;
    let mut sign = 1.0;
    for j in 1..n {
        if w[0][j] != 0.0 {
            let keep: Vec<usize> = (1..n).filter(|&i| i != j).collect();
            let sub: Vec<Vec<f64>> = keep
                .iter()
                .map(|&r| keep.iter().map(|&c| w[r][c]).collect())
                .collect();
            acc += sign * w[0][j] * pfaffian(&sub);
        }
        sign = -sign;
    }
    acc
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

struct QuadratureGrid {
    /// Cartesian product of per-axis nodes, with combined weights.
    points: Vec<(Vec<f64>, f64)>,
}

fn tensor_grid(chart: &LeafChart, nodes_override: Option<&[usize]>) -> QuadratureGrid {
    let counts = nodes_override.unwrap_or(&chart.nodes);
    let axes: Vec<(Vec<f64>, Vec<f64>)> = chart
        .bounds
        .iter()
        .zip(counts.iter())
        .map(|(&(a, b), &n)| quad::gauss_legendre_on(n, a, b))
        .collect();
    let mut points = vec![(Vec::new(), 1.0)];
    for (xs, ws) in &axes {
        let mut next = Vec::with_capacity(points.len() * xs.len());
        for (prefix, w) in &points {
            for (x, wx) in xs.iter().zip(ws.iter()) {
                let mut p = prefix.clone();
                p.push(*x);
                next.push((p, w * wx));
            }
        }
        points = next;
    }
    QuadratureGrid { points }
}

/// Validate the chart invariants at every quadrature node and accumulate
/// the leaf functional `<delta_N, f> = ∫ f(sigma(theta)) rho(theta) dtheta`
/// where `rho` is the pullback density of the induced symplectic volume.
pub fn leaf_integrate_with_nodes(
    p: &PoissonStructure,
    chart: &LeafChart,
    f: &Poly,
    nodes_override: Option<&[usize]>,
) -> Result<f64> {
    p.require_verified()?;
    let n = p.num_vars();
    if chart.map.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: chart.map.len(),
        });
    }
    if f.num_vars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f.num_vars(),
        });
    }
    let k = chart.half_dim();
    let diffs = chart.map_derivatives();
    let grid = tensor_grid(chart, nodes_override);
    let mut acc = 0.0f64;
    for (theta, weight) in &grid.points {
        let x = chart.point_at(theta);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("chart image at a quadrature node".into()));
        }
        let b = structure_matrix_f64(p.bivector(), &x);
        if numeric_rank(&b) != 2 * k {
            return Err(Error::ChartInvariant(format!(
                "structure rank {} != 2k = {} at a quadrature node",
                numeric_rank(&b),
                2 * k
            )));
        }
        let tangents = chart.tangents_at(&diffs, theta);
        // tangency: every tangent must lie in the range of B(x)
        let mut pairing = vec![vec![0.0; 2 * k]; 2 * k];
        for i in 0..2 * k {
            let norm = tangents[i].iter().map(|v| v * v).sum::<f64>().sqrt();
            let (alpha, _, residual) = solve_with_kernel(&b, &tangents[i]);
            if residual > RANGE_TOL * (1.0 + norm) {
                return Err(Error::ChartInvariant(format!(
                    "tangent {} leaves the Hamiltonian span (residual {residual:e})",
                    i + 1
                )));
            }
            for j in 0..2 * k {
                let val: f64 = alpha
                    .iter()
                    .zip(tangents[j].iter())
                    .map(|(a, b)| a * b)
                    .sum();
                pairing[i][j] = val;
            }
        }
        // antisymmetrize away roundoff before the Pfaffian
        let mut w = vec![vec![0.0; 2 * k]; 2 * k];
        for i in 0..2 * k {
            for j in 0..2 * k {
                w[i][j] = 0.5 * (pairing[i][j] - pairing[j][i]);
            }
        }
        let density = factorial(k) * pfaffian(&w);
        acc += weight * f.eval_f64(&x) * density;
    }
    if !acc.is_finite() {
        return Err(Error::NonFinite("leaf integral".into()));
    }
    Ok(acc)
}

pub fn leaf_integrate(p: &PoissonStructure, chart: &LeafChart, f: &Poly) -> Result<f64> {
    leaf_integrate_with_nodes(p, chart, f, None)
}

/// `|<delta_N, {phi, psi}>|`: vanishes up to quadrature error for closed
/// leaves, because Hamiltonian fields are tangent to them.
pub fn leaf_distribution_check(
    p: &PoissonStructure,
    chart: &LeafChart,
    phi: &Poly,
    psi: &Poly,
    nodes_override: Option<&[usize]>,
) -> Result<f64> {
    let br = bracket(p, phi, psi)?;
    Ok(leaf_integrate_with_nodes(p, chart, &br, nodes_override)?.abs())
}

/// Exact Dirac pairing `<delta_a, {f, g}> = {f, g}(a)`.
pub fn dirac_pairing(p: &PoissonStructure, a: &Point, f: &Poly, g: &Poly) -> Result<Rational> {
    bracket(p, f, g)?.eval(a)
}

#[derive(Debug)]
pub struct VolumeBracketReport {
    pub holds: bool,
    pub sign: i64,
}

/// Build the inverse bivector of a constant symplectic form.
fn inverse_bivector(omega: &DiffForm) -> Result<PoissonStructure> {
    let n = omega.num_vars();
    if !n.is_multiple_of(2) {
        return Err(Error::Degenerate("odd-dimensional form".into()));
    }
    if !omega.is_homogeneous(2) || omega.is_zero() {
        return Err(Error::WrongDegree(2));
    }
    let mut w = QMatrix::zero(n, n);
    for (k, c) in omega.terms() {
        let Some(value) = c.as_constant() else {
            return Err(Error::Invalid(
                "the symplectic form must have constant coefficients".into(),
            ));
        };
        w[(k[0], k[1])] = value.clone();
        w[(k[1], k[0])] = -value;
    }
    let inv = linalg::inverse(&w)
        .ok_or_else(|| Error::Degenerate("the symplectic form matrix is singular".into()))?;
    let mut bivector = MultiVector::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            let c = inv[(i, j)].clone();
            if !c.is_zero() {
                bivector.add_term(vec![i, j], Poly::constant(n, c));
            }
        }
    }
    crate::poisson::jacobi_check(&bivector)
}

fn wedge_power_form(omega: &DiffForm, k: usize) -> DiffForm {
    let mut acc = DiffForm::from_poly(Poly::one(omega.num_vars()));
    for _ in 0..k {
        acc = acc.wedge(omega).expect("same ring");
    }
    acc
}

/// Both sides of `{f,g} w^k = sign * k * dg ∧ df ∧ w^(k-1)` for the global
/// sign fixed from coordinate pairs. Exact symbolic computation.
pub fn volume_bracket_check(
    half_dim: usize,
    omega: &DiffForm,
    f: &Poly,
    g: &Poly,
) -> Result<VolumeBracketReport> {
    let n = omega.num_vars();
    if n != 2 * half_dim {
        return Err(Error::DimensionMismatch {
            expected: 2 * half_dim,
            got: n,
        });
    }
    let p = inverse_bivector(omega)?;
    let omega_k = wedge_power_form(omega, half_dim);
    let omega_km1 = wedge_power_form(omega, half_dim - 1);
    let both = |a: &Poly, b: &Poly| -> Result<(DiffForm, DiffForm)> {
        let lhs = omega_k.scale_poly(&bracket(&p, a, b)?)?;
        let rhs = crate::calculus::d_of_poly(b)
            .wedge(&crate::calculus::d_of_poly(a))?
            .wedge(&omega_km1)?
            .scale(&Rational::from_integer((half_dim as i64).into()));
        Ok((lhs, rhs))
    };
    // fix the sign from the first coordinate pair with a nonzero bracket
    let mut sign: Option<i64> = None;
    'outer: for i in 0..n {
        for j in i + 1..n {
            let (lhs, rhs) = both(&Poly::var(n, i)?, &Poly::var(n, j)?)?;
            if lhs.is_zero() && rhs.is_zero() {
                continue;
            }
            if lhs == rhs {
                sign = Some(1);
            } else if lhs == rhs.neg() {
                sign = Some(-1);
            } else {
                return Ok(VolumeBracketReport {
                    holds: false,
                    sign: 0,
                });
            }
            break 'outer;
        }
    }
    let sign = sign.ok_or_else(|| Error::Degenerate("no coordinate pair fixes the sign".into()))?;
    let (lhs, rhs) = both(f, g)?;
    let rhs = if sign == 1 { rhs } else { rhs.neg() };
    Ok(VolumeBracketReport {
        holds: lhs == rhs,
        sign,
    })
}

/// The self-bracket `[p, p]`, exposed for flow diagnostics.
pub fn self_bracket(p: &PoissonStructure) -> MultiVector {
    schouten(p.bivector(), p.bivector()).expect("same ring")
}

/// The unit-sphere chart in spherical angles, the standard leaf of the
/// so(3) structure.
pub fn unit_sphere_chart(nodes: usize) -> LeafChart {
    LeafChart::from_json(&format!(
        r#"{{
            "params": ["theta", "phi"],
            "bounds": [[0.0, 3.141592653589793], [0.0, 6.283185307179586]],
            "map": ["sin(theta)*cos(phi)", "sin(theta)*sin(phi)", "cos(theta)"],
            "nodes": [{nodes}, {nodes}]
        }}"#
    ))
    .expect("valid chart")
}
