//! Navier–Stokes, SRTD and EVSS drivers.

use std::sync::Arc;

use crate::benchmarks::ProblemSpec;
use crate::error::{Error, Result};
use crate::fem::{build_space, demean, error_norm, norm, CellQuadrature, FEFunction, Family, Norm, ValueShape};
use crate::forms::{
    assemble_stage2_on, assemble_stage3_on, pressure_pin, stage1_source, transport_pattern, Constraints, EvssSystem,
    MixedSpace, ModelParams, NavierStokesSystem, PreviousIterate, EVSS_D, EVSS_P, EVSS_SIGMA, EVSS_U,
};
use crate::linalg::{newton_solve_with, LuSolver, NewtonOptions, NewtonReport, NewtonStop};
use crate::mesh::Mesh;

/// Taylor–Hood pair on `mesh`.
pub fn taylor_hood_space(mesh: &Arc<Mesh>) -> MixedSpace {
    MixedSpace::new(vec![
        build_space(mesh, Family::P2, ValueShape::Vector2),
        build_space(mesh, Family::P1, ValueShape::Scalar),
    ])
    .expect("fields share the mesh")
}

/// `(u, p, Σ, D_h)` spaces of the EVSS formulation.
pub fn evss_space(mesh: &Arc<Mesh>) -> MixedSpace {
    MixedSpace::new(vec![
        build_space(mesh, Family::P2, ValueShape::Vector2),
        build_space(mesh, Family::P1, ValueShape::Scalar),
        build_space(mesh, Family::P2, ValueShape::SymTensor2),
        build_space(mesh, Family::P1, ValueShape::SymTensor2Traceless),
    ])
    .expect("fields share the mesh")
}

/// Velocity Dirichlet data of `problem` on field `u_field` and a zero pin on
/// the first boundary vertex of pressure field `p_field`.
pub fn flow_constraints(problem: &ProblemSpec, ms: &MixedSpace, u_field: usize, p_field: usize) -> Result<Constraints> {
    let mut c = Constraints::new();
    for (tag, g) in &problem.dirichlet {
        c.add_dirichlet(ms, u_field, *tag, |p, out| out.copy_from_slice(&g(p)))?;
    }
    c.fix(pressure_pin(ms, p_field), 0.0);
    Ok(c)
}

/// Vector of `∫ (∇·u) q` over every P1 basis function `q`.
pub fn continuity_residual(u: &FEFunction) -> Vec<f64> {
    let mesh = u.space().mesh().clone();
    let mut out = vec![0.0; mesh.n_vertices()];
    let mut cq = CellQuadrature::new();
    let mut grads = [[0.0; 2]; 2];
    for cell in 0..mesh.n_cells() {
        cq.reinit(&mesh, cell);
        let nodes = u.space().cell_nodes(cell);
        for q in 0..cq.n_points() {
            grads.iter_mut().for_each(|g| *g = [0.0; 2]);
            for (a, &n) in nodes.iter().enumerate() {
                let g = cq.table(u.space().family()).grads[q][a];
                for c in 0..2 {
                    let v = u.coeffs()[2 * n + c];
                    grads[c][0] += g[0] * v;
                    grads[c][1] += g[1] * v;
                }
            }
            let div = grads[0][0] + grads[1][1];
            for (i, &v) in mesh.cells()[cell].iter().enumerate() {
                out[v] += cq.weights[q] * cq.p1.values[q][i] * div;
            }
        }
    }
    out
}

/// `T = Σ + 2η₀ D_h` on the P2 symmetric space of `sigma`; the P1 traceless
/// `D_h` is interpolated exactly onto the P2 nodes.
pub fn recover_stress(sigma: &FEFunction, d: &FEFunction, eta0: f64) -> Result<FEFunction> {
    let ss = sigma.space();
    let ds = d.space();
    if ss.family() != Family::P2
        || ss.shape() != ValueShape::SymTensor2
        || ds.family() != Family::P1
        || ds.shape() != ValueShape::SymTensor2Traceless
        || !Arc::ptr_eq(ss.mesh(), ds.mesh())
    {
        return Err(Error::ShapeMismatch(
            "expected P2 symmetric Σ and P1 traceless D on one mesh".into(),
        ));
    }
    let mesh = ss.mesh();
    let nv = mesh.n_vertices();
    let dc = d.coeffs();
    let mut t = sigma.coeffs().to_vec();
    for node in 0..ss.n_nodes() {
        let (xx, xy) = if node < nv {
            (dc[2 * node], dc[2 * node + 1])
        } else {
            let [a, b] = mesh.edges()[node - nv];
            (0.5 * (dc[2 * a] + dc[2 * b]), 0.5 * (dc[2 * a + 1] + dc[2 * b + 1]))
        };
        t[3 * node] += 2.0 * eta0 * xx;
        t[3 * node + 1] += 2.0 * eta0 * xy;
        t[3 * node + 2] -= 2.0 * eta0 * xx;
    }
    FEFunction::from_coeffs(ss, t)
}

fn initial_guess(ms: &MixedSpace, constraints: &Constraints) -> Vec<f64> {
    let mut x = vec![0.0; ms.n_dofs()];
    constraints.impose(&mut x);
    x
}

#[derive(Clone, Debug)]
pub struct NseSolution {
    pub u: FEFunction,
    /// Zero-mean pressure.
    pub p: FEFunction,
    pub newton: NewtonReport,
}

/// Steady Navier–Stokes on Taylor–Hood elements by Newton from rest.
pub fn navier_stokes_solve(problem: &ProblemSpec, eta0: f64, mesh: &Arc<Mesh>) -> Result<NseSolution> {
    navier_stokes_solve_with(problem, eta0, mesh, &NewtonOptions::default())
}

pub fn navier_stokes_solve_with(
    problem: &ProblemSpec,
    eta0: f64,
    mesh: &Arc<Mesh>,
    options: &NewtonOptions,
) -> Result<NseSolution> {
    ModelParams::newtonian(eta0)?;
    let ms = taylor_hood_space(mesh);
    let constraints = flow_constraints(problem, &ms, 0, 1)?;
    let x0 = initial_guess(&ms, &constraints);
    let mut sys = NavierStokesSystem::new(ms.clone(), eta0, problem.body_force.as_ref(), constraints)?;
    let (x, report) = newton_solve_with(&mut sys, &x0, options, &mut LuSolver::new())?;
    if !report.converged {
        return Err(Error::NotConverged(format!(
            "Navier-Stokes Newton stopped with {:?} after {} iterations",
            report.stop, report.iterations
        )));
    }
    let mut parts = ms.split(&x)?.into_iter();
    let u = parts.next().unwrap();
    let mut p = parts.next().unwrap();
    demean(&mut p)?;
    Ok(NseSolution { u, p, newton: report })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SrtdOptions {
    /// Stop once the relative velocity increment falls to this value.
    pub tol: f64,
    pub max_iter: usize,
    /// Streamline upwinding in stages 2 and 3.
    pub supg: bool,
    pub newton: NewtonOptions,
}

impl Default for SrtdOptions {
    fn default() -> Self {
        SrtdOptions {
            tol: 1e-9,
            max_iter: 20,
            supg: false,
            newton: NewtonOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SRTDResult {
    pub u: FEFunction,
    /// Stage-2 pressure.
    pub p: FEFunction,
    /// Stage-1 pressure, zero mean.
    pub pi: FEFunction,
    pub t: FEFunction,
    /// `‖uⁿ − uⁿ⁻¹‖ / ‖uⁿ‖` in L2, one entry per completed iteration.
    pub residual_history: Vec<f64>,
    /// `‖uⁿ − uⁿ⁻¹‖` in L2.
    pub increment_history: Vec<f64>,
    /// Newton iterations of stage 1 in each SRTD iteration.
    pub newton_iterations: Vec<usize>,
    pub converged: bool,
    /// Zero-based index into `residual_history` of the returned fields.
    pub best_iteration: usize,
    /// Why the iteration stopped early, if it did.
    pub failure: Option<String>,
}

struct Iterate {
    u: FEFunction,
    p: FEFunction,
    pi: FEFunction,
    t: FEFunction,
}

/// Three-stage SRTD iteration from zero initial data.
///
/// Numerical failures (stage-1 Newton breakdown, singular transport
/// systems, non-finite fields) end the iteration and are reported through
/// `converged` and `failure`; only invalid input is an error.
pub fn srtd_solve(
    problem: &ProblemSpec,
    params: &ModelParams,
    mesh: &Arc<Mesh>,
    options: &SrtdOptions,
) -> Result<SRTDResult> {
    params.validate()?;
    if !(options.tol > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "tolerance {} must be positive",
            options.tol
        )));
    }
    let ms = taylor_hood_space(mesh);
    let (vs, ps) = (ms.field(0).clone(), ms.field(1).clone());
    let ts = build_space(mesh, Family::P2, ValueShape::SymTensor2);
    let constraints = flow_constraints(problem, &ms, 0, 1)?;
    let force = problem.body_force.as_ref();
    let mut stage1 =
        NavierStokesSystem::with_source(ms.clone(), params.eta0, vec![0.0; ms.n_dofs()], constraints.clone())?;
    let (pat2, pat3) = (transport_pattern(&ps)?, transport_pattern(&ts)?);
    let (mut lu1, mut lu2, mut lu3) = (LuSolver::new(), LuSolver::new(), LuSolver::new());

    let mut x = initial_guess(&ms, &constraints);
    let mut cur = Iterate {
        u: FEFunction::zeros(&vs),
        p: FEFunction::zeros(&ps),
        pi: FEFunction::zeros(&ps),
        t: FEFunction::zeros(&ts),
    };
    let mut best: Option<(usize, f64, Iterate)> = None;
    let mut result = SRTDResult {
        u: cur.u.clone(),
        p: cur.p.clone(),
        pi: cur.pi.clone(),
        t: cur.t.clone(),
        residual_history: Vec::new(),
        increment_history: Vec::new(),
        newton_iterations: Vec::new(),
        converged: false,
        best_iteration: 0,
        failure: None,
    };

    for _ in 0..options.max_iter {
        let step = (|| -> Result<(Iterate, Vec<f64>, usize)> {
            let prev = PreviousIterate {
                u: &cur.u,
                p: &cur.p,
                t: &cur.t,
            };
            stage1.set_source(stage1_source(&ms, params, force, &prev)?)?;
            let (x_new, report) = newton_solve_with(&mut stage1, &x, &options.newton, &mut lu1)?;
            if !report.converged {
                return Err(Error::NotConverged(format!(
                    "stage-1 Newton stopped with {:?} after {} iterations",
                    report.stop, report.iterations
                )));
            }
            let mut parts = ms.split(&x_new)?.into_iter();
            let u = parts.next().unwrap();
            let mut pi = parts.next().unwrap();
            demean(&mut pi)?;

            let (a2, b2) = assemble_stage2_on(&pat2, &ps, params.lambda1, &u, &pi, options.supg)?;
            lu2.factor(&a2)?;
            let p = FEFunction::from_coeffs(&ps, lu2.solve(&b2)?)?;

            let (a3, b3) = assemble_stage3_on(&pat3, &ts, params, &u, options.supg)?;
            lu3.factor(&a3)?;
            let t = FEFunction::from_coeffs(&ts, lu3.solve(&b3)?)?;
            if !(u.is_finite() && p.is_finite() && t.is_finite()) {
                return Err(Error::Singular("non-finite SRTD iterate".into()));
            }
            Ok((Iterate { u, p, pi, t }, x_new, report.iterations))
        })();
        let (next, x_new, newton_its) = match step {
            Ok(v) => v,
            Err(e @ (Error::NotConverged(_) | Error::Singular(_))) => {
                result.failure = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        let mut diff = next.u.clone();
        diff.axpy(-1.0, &cur.u)?;
        let inc = norm(&diff, Norm::L2);
        let un = norm(&next.u, Norm::L2);
        let res = if un > 0.0 { inc / un } else { inc };
        result.residual_history.push(res);
        result.increment_history.push(inc);
        result.newton_iterations.push(newton_its);
        x = x_new;
        cur = next;
        let k = result.residual_history.len() - 1;
        if !res.is_finite() {
            result.failure = Some("non-finite SRTD residual".into());
            break;
        }
        if res <= options.tol {
            result.converged = true;
            best = Some((k, res, cur));
            break;
        }
        if best.as_ref().map_or(true, |b| res < b.1) {
            best = Some((
                k,
                res,
                Iterate {
                    u: cur.u.clone(),
                    p: cur.p.clone(),
                    pi: cur.pi.clone(),
                    t: cur.t.clone(),
                },
            ));
        }
    }
    if let Some((k, _, it)) = best {
        result.best_iteration = k;
        result.u = it.u;
        result.p = it.p;
        result.pi = it.pi;
        result.t = it.t;
    }
    Ok(result)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvssOptions {
    pub supg: bool,
    pub newton: NewtonOptions,
}

impl Default for EvssOptions {
    fn default() -> Self {
        EvssOptions {
            supg: true,
            newton: NewtonOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EVSSResult {
    pub u: FEFunction,
    /// Zero-mean pressure.
    pub p: FEFunction,
    pub sigma: FEFunction,
    pub d: FEFunction,
    /// `Σ + 2η₀ D_h` on the P2 symmetric space.
    pub t_recovered: FEFunction,
    pub newton: NewtonReport,
    pub converged: bool,
}

/// Coupled EVSS Newton solve warm-started from the Navier–Stokes solution
/// with `Σ = D_h = 0`.
///
/// A Newton breakdown is reported through `converged`; the fields are then
/// the last finite iterate (the warm start if none was finite).
pub fn evss_solve(
    problem: &ProblemSpec,
    params: &ModelParams,
    mesh: &Arc<Mesh>,
    options: &EvssOptions,
) -> Result<EVSSResult> {
    params.validate()?;
    let nse = navier_stokes_solve_with(problem, params.eta0, mesh, &options.newton)?;
    let ms = evss_space(mesh);
    let constraints = flow_constraints(problem, &ms, EVSS_U, EVSS_P)?;
    let mut x0 = vec![0.0; ms.n_dofs()];
    ms.block_mut(&mut x0, EVSS_U).copy_from_slice(nse.u.coeffs());
    let pin = pressure_pin(&ms, EVSS_P) - ms.offset(EVSS_P);
    let p_pin = nse.p.coeffs()[pin];
    for (dst, src) in ms.block_mut(&mut x0, EVSS_P).iter_mut().zip(nse.p.coeffs()) {
        *dst = src - p_pin;
    }
    constraints.impose(&mut x0);
    let mut sys = EvssSystem::new(
        ms.clone(),
        *params,
        problem.body_force.as_ref(),
        constraints,
        options.supg,
    )?;
    let (x, newton) = match newton_solve_with(&mut sys, &x0, &options.newton, &mut LuSolver::new()) {
        Ok((x, rep)) => (x, rep),
        Err(Error::Singular(_)) => (
            x0.clone(),
            NewtonReport {
                iterations: 0,
                residual_history: Vec::new(),
                converged: false,
                stop: NewtonStop::Singular,
            },
        ),
        Err(e) => return Err(e),
    };
    let x = if x.iter().all(|v| v.is_finite()) { x } else { x0 };
    let mut parts = ms.split(&x)?;
    demean(&mut parts[EVSS_P])?;
    let t_recovered = recover_stress(&parts[EVSS_SIGMA], &parts[EVSS_D], params.eta0)?;
    let mut it = parts.into_iter();
    Ok(EVSSResult {
        u: it.next().unwrap(),
        p: it.next().unwrap(),
        sigma: it.next().unwrap(),
        d: it.next().unwrap(),
        t_recovered,
        converged: newton.converged,
        newton,
    })
}

/// Relative L2 velocity difference `‖a − b‖ / ‖b‖` (interpolating `a` onto
/// the space of `b` when they differ).
pub fn relative_velocity_difference(a: &FEFunction, b: &FEFunction) -> Result<f64> {
    Ok(error_norm(b, a, Norm::L2)? / norm(b, Norm::L2))
}
