use super::element::CellQuadrature;
use super::function::FEFunction;
use super::interpolate::{interpolate_to_with, InterpolationOptions};
use super::space::ValueShape;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Norm {
    L2,
    /// Full H1 norm: L2 plus gradient seminorm.
    H1,
}

/// `(‖f‖²_L2, |f|²_H1)` with component weights from the value shape.
fn squared_parts(f: &FEFunction) -> (f64, f64) {
    let space = f.space();
    let mesh = space.mesh();
    let nc = space.n_components();
    let weights = space.shape().norm_weights();
    let mut quad = CellQuadrature::new();
    let (mut l2, mut h1) = (0.0, 0.0);
    let coeffs = f.coeffs();
    for cell in 0..mesh.n_cells() {
        quad.reinit(mesh, cell);
        let table = quad.table(space.family());
        let nodes = space.cell_nodes(cell);
        for q in 0..quad.n_points() {
            for c in 0..nc {
                let (mut v, mut g) = (0.0, [0.0; 2]);
                for (a, &node) in nodes.iter().enumerate() {
                    let coef = coeffs[node * nc + c];
                    v += table.values[q][a] * coef;
                    g[0] += table.grads[q][a][0] * coef;
                    g[1] += table.grads[q][a][1] * coef;
                }
                l2 += quad.weights[q] * weights[c] * v * v;
                h1 += quad.weights[q] * weights[c] * (g[0] * g[0] + g[1] * g[1]);
            }
        }
    }
    (l2, h1)
}

pub fn norm(f: &FEFunction, which: Norm) -> f64 {
    let (l2, h1) = squared_parts(f);
    match which {
        Norm::L2 => l2.sqrt(),
        Norm::H1 => (l2 + h1).sqrt(),
    }
}

/// `‖fine − I(coarse)‖`, where `I` interpolates `coarse` onto `fine`'s space
/// (skipped when the spaces coincide). Integrated on the fine mesh.
pub fn error_norm(fine: &FEFunction, coarse: &FEFunction, which: Norm) -> Result<f64> {
    error_norm_with(fine, coarse, which, &InterpolationOptions::default())
}

pub fn error_norm_with(
    fine: &FEFunction,
    coarse: &FEFunction,
    which: Norm,
    options: &InterpolationOptions,
) -> Result<f64> {
    if fine.space().shape() != coarse.space().shape() {
        return Err(Error::ShapeMismatch(format!(
            "error norm between {} and {} fields",
            fine.space().shape(),
            coarse.space().shape()
        )));
    }
    let mut diff = interpolate_to_with(coarse, fine.space(), options)?;
    for (d, f) in diff.coeffs_mut().iter_mut().zip(fine.coeffs()) {
        *d = f - *d;
    }
    Ok(norm(&diff, which))
}

/// Integral of each component over the domain.
pub fn integrate(f: &FEFunction) -> Vec<f64> {
    let space = f.space();
    let mesh = space.mesh();
    let nc = space.n_components();
    let mut quad = CellQuadrature::new();
    let mut out = vec![0.0; nc];
    for cell in 0..mesh.n_cells() {
        quad.reinit(mesh, cell);
        let table = quad.table(space.family());
        for (a, &node) in space.cell_nodes(cell).iter().enumerate() {
            let w: f64 = (0..quad.n_points()).map(|q| quad.weights[q] * table.values[q][a]).sum();
            for c in 0..nc {
                out[c] += w * f.coeffs()[node * nc + c];
            }
        }
    }
    out
}

/// Shifts a scalar field to zero mean.
pub fn demean(f: &mut FEFunction) -> Result<()> {
    if f.space().shape() != ValueShape::Scalar {
        return Err(Error::ShapeMismatch("demean needs a scalar field".into()));
    }
    let mean = integrate(f)[0] / f.space().mesh().total_area();
    for c in f.coeffs_mut() {
        *c -= mean;
    }
    Ok(())
}

/// A demeaned copy of a scalar field.
pub fn demeaned(f: &FEFunction) -> Result<FEFunction> {
    let mut g = f.clone();
    demean(&mut g)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{build_space, Family};
    use crate::mesh::unit_square_mesh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn linear_l2() {
        let mesh = Arc::new(unit_square_mesh(6).unwrap());
        let s = build_space(&mesh, Family::P1, ValueShape::Scalar);
        let f = FEFunction::interpolate(&s, |p, o| o[0] = p.x);
        let e = error_norm(&f, &FEFunction::zeros(&s), Norm::L2).unwrap();
        assert!((e - (1.0f64 / 3.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn quadratic_h1() {
        let mesh = Arc::new(unit_square_mesh(5).unwrap());
        let s = build_space(&mesh, Family::P2, ValueShape::Scalar);
        let f = FEFunction::interpolate(&s, |p, o| o[0] = p.x * p.x);
        let e = error_norm(&f, &FEFunction::zeros(&s), Norm::H1).unwrap();
        assert!((e - (0.2f64 + 4.0 / 3.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn self_distance_zero_and_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mesh = Arc::new(unit_square_mesh(4).unwrap());
        let s = build_space(&mesh, Family::P2, ValueShape::SymTensor2);
        let mut rand_field = || {
            let c: Vec<f64> = (0..s.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            FEFunction::from_coeffs(&s, c).unwrap()
        };
        let (f, g, h) = (rand_field(), rand_field(), rand_field());
        for n in [Norm::L2, Norm::H1] {
            assert_eq!(error_norm(&f, &f, n).unwrap(), 0.0);
            let fg = error_norm(&f, &g, n).unwrap();
            let gh = error_norm(&g, &h, n).unwrap();
            let fh = error_norm(&f, &h, n).unwrap();
            assert!(fh <= fg + gh + 1e-12);
        }
    }

    #[test]
    fn tensor_weights_give_frobenius() {
        let mesh = Arc::new(unit_square_mesh(2).unwrap());
        let sym = build_space(&mesh, Family::P1, ValueShape::SymTensor2);
        let tl = build_space(&mesh, Family::P1, ValueShape::SymTensor2Traceless);
        // [[1,2],[2,3]] has Frobenius norm sqrt(18); [[1,2],[2,-1]] sqrt(10)
        let a = FEFunction::interpolate(&sym, |_, o| o.copy_from_slice(&[1.0, 2.0, 3.0]));
        let b = FEFunction::interpolate(&tl, |_, o| o.copy_from_slice(&[1.0, 2.0]));
        assert!((norm(&a, Norm::L2) - 18f64.sqrt()).abs() < 1e-13);
        assert!((norm(&b, Norm::L2) - 10f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn demean_zeroes_integral() {
        let mesh = Arc::new(unit_square_mesh(3).unwrap());
        let s = build_space(&mesh, Family::P1, ValueShape::Scalar);
        let mut f = FEFunction::interpolate(&s, |p, o| o[0] = 1.0 + p.x * p.y);
        demean(&mut f).unwrap();
        assert!(integrate(&f)[0].abs() < 1e-14);
    }
}
