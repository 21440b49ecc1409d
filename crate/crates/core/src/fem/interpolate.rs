use std::sync::Arc;

use nalgebra::Point2;

use super::function::FEFunction;
use super::locate::PointLocator;
use super::space::FunctionSpace;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpolationOptions {
    /// Points whose barycentric coordinates are all `>= -snap_tol` count as
    /// inside a cell.
    pub snap_tol: f64,
    /// Points up to this distance outside the source mesh are evaluated by
    /// extending the polynomial of the nearest cell. Zero disables it.
    pub extrapolation_tol: f64,
}

impl Default for InterpolationOptions {
    fn default() -> Self {
        InterpolationOptions {
            snap_tol: 1e-10,
            extrapolation_tol: 0.0,
        }
    }
}

/// Point-evaluates `f` at the nodes of `target`.
pub fn interpolate_to(f: &FEFunction, target: &Arc<FunctionSpace>) -> Result<FEFunction> {
    interpolate_to_with(f, target, &InterpolationOptions::default())
}

pub fn interpolate_to_with(
    f: &FEFunction,
    target: &Arc<FunctionSpace>,
    options: &InterpolationOptions,
) -> Result<FEFunction> {
    let source = f.space();
    if source.shape() != target.shape() {
        return Err(Error::ShapeMismatch(format!(
            "cannot interpolate a {} field into a {} space",
            source.shape(),
            target.shape()
        )));
    }
    if source.same_as(target) {
        return FEFunction::from_coeffs(target, f.coeffs().to_vec());
    }
    let nc = target.n_components();
    let mut out = vec![0.0; target.n_dofs()];
    if Arc::ptr_eq(source.mesh(), target.mesh()) {
        for cell in 0..target.mesh().n_cells() {
            for (k, &node) in target.cell_nodes(cell).iter().enumerate() {
                let bary = target.family().node_bary(k);
                f.eval_in_cell(cell, bary, &mut out[node * nc..(node + 1) * nc]);
            }
        }
        return FEFunction::from_coeffs(target, out);
    }
    let locator = PointLocator::new(source.mesh());
    for (node, p) in target.node_coords().iter().enumerate() {
        eval_at(f, &locator, p, options, &mut out[node * nc..(node + 1) * nc])?;
    }
    FEFunction::from_coeffs(target, out)
}

/// Evaluates `f` at an arbitrary point using `locator` (built on `f`'s mesh).
pub fn eval_at(
    f: &FEFunction,
    locator: &PointLocator,
    p: &Point2<f64>,
    options: &InterpolationOptions,
    out: &mut [f64],
) -> Result<()> {
    let loc = locator.locate(p, options.snap_tol);
    if loc.distance > options.extrapolation_tol {
        return Err(Error::OutsideMesh { x: p.x, y: p.y });
    }
    f.eval_in_cell(loc.cell, loc.bary, out);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{build_space, Family, ValueShape};
    use crate::mesh::unit_square_mesh;

    fn square(n: usize) -> Arc<crate::mesh::Mesh> {
        Arc::new(unit_square_mesh(n).unwrap())
    }

    #[test]
    fn constant_is_exact() {
        let a = build_space(&square(5), Family::P2, ValueShape::Vector2);
        let b = build_space(&square(7), Family::P1, ValueShape::Vector2);
        let f = FEFunction::interpolate(&a, |_, out| out.copy_from_slice(&[2.5, -1.25]));
        let g = interpolate_to(&f, &b).unwrap();
        for (k, v) in g.coeffs().iter().enumerate() {
            assert_eq!(*v, if k % 2 == 0 { 2.5 } else { -1.25 });
        }
    }

    #[test]
    fn p1_reproduces_linears() {
        let a = build_space(&square(10), Family::P1, ValueShape::Scalar);
        let b = build_space(&square(20), Family::P1, ValueShape::Scalar);
        let f = FEFunction::interpolate(&a, |p, out| out[0] = 3.0 * p.x - 1.0);
        let g = interpolate_to(&f, &b).unwrap();
        for (p, v) in b.node_coords().iter().zip(g.coeffs()) {
            assert!((v - (3.0 * p.x - 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn p2_reproduces_quadratics() {
        let a = build_space(&square(10), Family::P2, ValueShape::Scalar);
        let b = build_space(&square(20), Family::P2, ValueShape::Scalar);
        let f = FEFunction::interpolate(&a, |p, out| out[0] = p.x * p.x);
        let g = interpolate_to(&f, &b).unwrap();
        for (p, v) in b.node_coords().iter().zip(g.coeffs()) {
            assert!((v - p.x * p.x).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_on_same_space() {
        let a = build_space(&square(4), Family::P2, ValueShape::SymTensor2);
        let f = FEFunction::interpolate(&a, |p, out| out.copy_from_slice(&[p.x, p.y * p.x, 1.0]));
        assert_eq!(interpolate_to(&f, &a).unwrap().coeffs(), f.coeffs());
    }

    #[test]
    fn shape_mismatch_and_outside() {
        let a = build_space(&square(4), Family::P1, ValueShape::Scalar);
        let b = build_space(&square(4), Family::P1, ValueShape::Vector2);
        let f = FEFunction::zeros(&a);
        assert!(matches!(interpolate_to(&f, &b), Err(Error::ShapeMismatch(_))));

        let big = Arc::new(
            crate::mesh::Mesh::from_cells(
                vec![Point2::new(0.0, 0.0), Point2::new(2.0, 0.0), Point2::new(0.0, 2.0)],
                vec![[0, 1, 2]],
                |_, _| crate::mesh::BoundaryTag::SquareWallsFloor,
            )
            .unwrap(),
        );
        let t = build_space(&big, Family::P1, ValueShape::Scalar);
        match interpolate_to(&f, &t) {
            Err(Error::OutsideMesh { x, y }) => assert_eq!((x, y), (2.0, 0.0)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
