use std::sync::Arc;

use nalgebra::Point2;
use o3flow::fem::{build_space, norm, FEFunction, Family, Norm, ValueShape};
use o3flow::forms::{
    assemble_stage2, assemble_stage3, pressure_pin, stage1_system, Constraints, EvssSystem, MixedSpace, ModelParams,
    NavierStokesSystem, PreviousIterate, VectorField,
};
use o3flow::linalg::{jacobian_fd_error, lu_solve, newton_solve, norm2, norm_inf, NonlinearSystem};
use o3flow::mesh::{eccentric_annulus_mesh, unit_square_mesh, BoundaryTag, Mesh};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn square(n: usize) -> Arc<Mesh> {
    Arc::new(unit_square_mesh(n).unwrap())
}

fn taylor_hood(mesh: &Arc<Mesh>) -> MixedSpace {
    MixedSpace::new(vec![
        build_space(mesh, Family::P2, ValueShape::Vector2),
        build_space(mesh, Family::P1, ValueShape::Scalar),
    ])
    .unwrap()
}

fn evss_space(mesh: &Arc<Mesh>) -> MixedSpace {
    MixedSpace::new(vec![
        build_space(mesh, Family::P2, ValueShape::Vector2),
        build_space(mesh, Family::P1, ValueShape::Scalar),
        build_space(mesh, Family::P2, ValueShape::SymTensor2),
        build_space(mesh, Family::P1, ValueShape::SymTensor2Traceless),
    ])
    .unwrap()
}

fn cavity_constraints(ms: &MixedSpace, lid: f64) -> Constraints {
    let mut c = Constraints::new();
    c.add_dirichlet(ms, 0, BoundaryTag::SquareWallsFloor, |_, g| g.fill(0.0))
        .unwrap();
    c.add_dirichlet(ms, 0, BoundaryTag::SquareTop, |p, g| {
        g[0] = lid * 16.0 * p.x * p.x * (1.0 - p.x) * (1.0 - p.x);
        g[1] = 0.0;
    })
    .unwrap();
    c.fix(pressure_pin(ms, 1), 0.0);
    c
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_fn(rng: &mut ChaCha8Rng, space: &Arc<o3flow::fem::FunctionSpace>) -> FEFunction {
    FEFunction::from_coeffs(space, random_vec(rng, space.n_dofs())).unwrap()
}

fn swirl_force() -> VectorField {
    Arc::new(|p: Point2<f64>| [(3.0 * p.y).sin(), p.x * p.x - 0.5])
}

fn check_fd<S: NonlinearSystem>(system: &mut S, n: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..3 {
        let x = random_vec(&mut rng, n);
        for _ in 0..3 {
            let v = random_vec(&mut rng, n);
            let err = jacobian_fd_error(system, &x, &v, 1e-6).unwrap();
            assert!(err < 1e-6, "finite-difference mismatch {err:e}");
        }
    }
}

#[test]
fn navier_stokes_jacobian_matches_finite_differences() {
    let mesh = square(3);
    let ms = taylor_hood(&mesh);
    let cons = cavity_constraints(&ms, 1.0);
    let n = ms.n_dofs();
    let mut sys = NavierStokesSystem::new(ms, 0.7, Some(&swirl_force()), cons).unwrap();
    check_fd(&mut sys, n, 11);
}

#[test]
fn stage1_jacobian_matches_finite_differences() {
    let mesh = square(3);
    let ms = taylor_hood(&mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let u = random_fn(&mut rng, ms.field(0));
    let p = random_fn(&mut rng, ms.field(1));
    let t = random_fn(&mut rng, &build_space(&mesh, Family::P2, ValueShape::SymTensor2));
    let prev = PreviousIterate { u: &u, p: &p, t: &t };
    let params = ModelParams::ucm(1.0, 0.3).unwrap();
    let cons = cavity_constraints(&ms, 1.0);
    let n = ms.n_dofs();
    let mut sys = stage1_system(ms, &params, Some(&swirl_force()), &prev, cons).unwrap();
    check_fd(&mut sys, n, 13);
}

#[test]
fn evss_jacobian_matches_finite_differences() {
    let mesh = square(3);
    let params = [
        ModelParams::ucm(1.0, 0.4).unwrap(),
        ModelParams::corotational(0.8, 0.3).unwrap(),
        ModelParams::new(1.2, 0.5, -0.2).unwrap(),
    ];
    for (k, p) in params.iter().enumerate() {
        for supg in [false, true] {
            let ms = evss_space(&mesh);
            let cons = cavity_constraints(&ms, 1.0);
            let n = ms.n_dofs();
            let mut sys = EvssSystem::new(ms, *p, Some(&swirl_force()), cons, supg).unwrap();
            check_fd(&mut sys, n, 20 + k as u64);
        }
    }
}

#[test]
fn evss_jacobian_on_annulus() {
    let mesh = Arc::new(eccentric_annulus_mesh(1.0, 0.5, 0.25, 0.3).unwrap());
    let ms = evss_space(&mesh);
    let mut cons = Constraints::new();
    cons.add_dirichlet(&ms, 0, BoundaryTag::AnnulusOuter, |_, g| g.fill(0.0))
        .unwrap();
    cons.add_dirichlet(&ms, 0, BoundaryTag::AnnulusInner, |p, g| {
        g[0] = -2.0 * (p.y - 0.25);
        g[1] = 2.0 * p.x;
    })
    .unwrap();
    let n = ms.n_dofs();
    let mut sys = EvssSystem::new(ms, ModelParams::ucm(1.0, 0.5).unwrap(), None, cons, true).unwrap();
    check_fd(&mut sys, n, 31);
}

#[test]
fn rest_state_is_exact_for_every_formulation() {
    let mesh = square(4);
    let ms = taylor_hood(&mesh);
    let cons = cavity_constraints(&ms, 0.0);
    let x = vec![0.0; ms.n_dofs()];
    let mut nse = NavierStokesSystem::new(ms.clone(), 1.0, None, cons.clone()).unwrap();
    assert!(norm_inf(&nse.residual(&x).unwrap()) < 1e-13);

    let u = FEFunction::zeros(ms.field(0));
    let p = FEFunction::zeros(ms.field(1));
    let t = FEFunction::zeros(&build_space(&mesh, Family::P2, ValueShape::SymTensor2));
    let prev = PreviousIterate { u: &u, p: &p, t: &t };
    let params = ModelParams::ucm(1.0, 0.5).unwrap();
    let mut s1 = stage1_system(ms, &params, None, &prev, cons).unwrap();
    assert!(norm_inf(&s1.residual(&x).unwrap()) < 1e-13);

    let es = evss_space(&mesh);
    let cons = cavity_constraints(&es, 0.0);
    let x = vec![0.0; es.n_dofs()];
    let mut ev = EvssSystem::new(es, params, None, cons, true).unwrap();
    assert!(norm_inf(&ev.residual(&x).unwrap()) < 1e-13);
}

#[test]
fn unconstrained_rest_jacobian_is_symmetric() {
    // at u = 0 only the viscous block and the pressure coupling remain
    let mesh = square(4);
    let ms = taylor_hood(&mesh);
    let mut nse = NavierStokesSystem::new(ms.clone(), 1.3, None, Constraints::new()).unwrap();
    let jac = nse.jacobian(&vec![0.0; ms.n_dofs()]).unwrap();
    assert!(jac.asymmetry() < 1e-13);
}

#[test]
fn stage2_mass_matrix_is_symmetric() {
    let mesh = square(4);
    let p1 = build_space(&mesh, Family::P1, ValueShape::Scalar);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = random_fn(&mut rng, &build_space(&mesh, Family::P2, ValueShape::Vector2));
    let pi = random_fn(&mut rng, &p1);
    let (a, _) = assemble_stage2(&p1, 0.0, &u, &pi, false).unwrap();
    assert!(a.asymmetry() < 1e-13);
}

#[test]
fn stage1_without_relaxation_matches_navier_stokes() {
    let mesh = square(6);
    let ms = taylor_hood(&mesh);
    let cons = cavity_constraints(&ms, 1.0);
    let f = swirl_force();
    let x0 = vec![0.0; ms.n_dofs()];
    let mut nse = NavierStokesSystem::new(ms.clone(), 1.0, Some(&f), cons.clone()).unwrap();
    let (x_nse, rep) = newton_solve(&mut nse, &x0, &Default::default()).unwrap();
    assert!(rep.converged);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = random_fn(&mut rng, ms.field(0));
    let p = random_fn(&mut rng, ms.field(1));
    let t = random_fn(&mut rng, &build_space(&mesh, Family::P2, ValueShape::SymTensor2));
    let prev = PreviousIterate { u: &u, p: &p, t: &t };
    let params = ModelParams::newtonian(1.0).unwrap();
    let mut s1 = stage1_system(ms, &params, Some(&f), &prev, cons).unwrap();
    let (x_s1, rep) = newton_solve(&mut s1, &x0, &Default::default()).unwrap();
    assert!(rep.converged);
    let diff: Vec<f64> = x_nse.iter().zip(&x_s1).map(|(a, b)| a - b).collect();
    assert!(norm_inf(&diff) < 1e-12, "{}", norm_inf(&diff));
}

#[test]
fn stage1_source_vanishes_for_zero_data() {
    let mesh = square(3);
    let ms = taylor_hood(&mesh);
    let u = FEFunction::zeros(ms.field(0));
    let p = FEFunction::zeros(ms.field(1));
    let t = FEFunction::zeros(&build_space(&mesh, Family::P2, ValueShape::SymTensor2));
    let prev = PreviousIterate { u: &u, p: &p, t: &t };
    let src = o3flow::forms::stage1_source(&ms, &ModelParams::ucm(1.0, 0.2).unwrap(), None, &prev).unwrap();
    assert!(src.iter().all(|&s| s == 0.0));
}

#[test]
fn stage2_reproduces_pressure_without_transport() {
    let mesh = square(5);
    let p1 = build_space(&mesh, Family::P1, ValueShape::Scalar);
    let p2v = build_space(&mesh, Family::P2, ValueShape::Vector2);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pi = random_fn(&mut rng, &p1);
    let u_rand = random_fn(&mut rng, &p2v);
    let zero = FEFunction::zeros(&p2v);
    for (lam, u) in [(0.0, &u_rand), (0.7, &zero)] {
        let (a, b) = assemble_stage2(&p1, lam, u, &pi, false).unwrap();
        let p = lu_solve(&a, &b).unwrap();
        let diff: Vec<f64> = p.iter().zip(pi.coeffs()).map(|(a, b)| a - b).collect();
        assert!(norm_inf(&diff) < 1e-12);
    }
}

#[test]
fn stage2_manufactured_uniform_flow() {
    // p = x solves p + λ u·∇p = π for u = (1, 0), π = x + λ
    let mesh = square(20);
    let lam = 0.3;
    let p1 = build_space(&mesh, Family::P1, ValueShape::Scalar);
    let u = FEFunction::interpolate(&build_space(&mesh, Family::P2, ValueShape::Vector2), |_, v| {
        v[0] = 1.0;
        v[1] = 0.0;
    });
    let pi = FEFunction::interpolate(&p1, |x, v| v[0] = x.x + lam);
    for supg in [false, true] {
        let (a, b) = assemble_stage2(&p1, lam, &u, &pi, supg).unwrap();
        let p = lu_solve(&a, &b).unwrap();
        let err = p1
            .node_coords()
            .iter()
            .zip(&p)
            .map(|(x, v)| (v - x.x).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err:e}");
    }
}

#[test]
fn stage3_special_cases() {
    let mesh = square(6);
    let ts = build_space(&mesh, Family::P2, ValueShape::SymTensor2);
    let vs = build_space(&mesh, Family::P2, ValueShape::Vector2);

    // u = 0 gives T = 0
    let zero = FEFunction::zeros(&vs);
    let (a, b) = assemble_stage3(&ts, &ModelParams::ucm(1.0, 0.5).unwrap(), &zero, false).unwrap();
    assert!(norm_inf(&lu_solve(&a, &b).unwrap()) == 0.0);

    // rigid rotation has D = 0, so the corotational stress vanishes
    let rot = FEFunction::interpolate(&vs, |x, v| {
        v[0] = -x.y;
        v[1] = x.x;
    });
    for supg in [false, true] {
        let (a, b) = assemble_stage3(&ts, &ModelParams::corotational(1.0, 0.5).unwrap(), &rot, supg).unwrap();
        let t = FEFunction::from_coeffs(&ts, lu_solve(&a, &b).unwrap()).unwrap();
        assert!(norm(&t, Norm::L2) < 1e-10);
    }

    // λ₁ = 0: the projection of 2η₀D, exact when D is quadratic
    let eta0 = 1.7;
    let u = FEFunction::interpolate(&vs, |x, v| {
        v[0] = x.x * x.x;
        v[1] = -2.0 * x.x * x.y;
    });
    let (a, b) = assemble_stage3(&ts, &ModelParams::newtonian(eta0).unwrap(), &u, false).unwrap();
    let t = lu_solve(&a, &b).unwrap();
    let exact = FEFunction::interpolate(&ts, |x, v| {
        // ∇u = [[2x, 0], [−2y, −2x]]
        v[0] = 4.0 * eta0 * x.x;
        v[1] = -2.0 * eta0 * x.y;
        v[2] = -4.0 * eta0 * x.x;
    });
    let diff: Vec<f64> = t.iter().zip(exact.coeffs()).map(|(a, b)| a - b).collect();
    assert!(norm2(&diff) < 1e-11, "{:e}", norm2(&diff));
}
