use nalgebra::Point2;

use super::basis::{eval_basis, Family};
use super::quadrature::{QuadratureRule, ASSEMBLY_DEGREE};
use crate::mesh::Mesh;

/// Affine map from the reference triangle to a mesh cell.
#[derive(Clone, Copy, Debug)]
pub struct CellGeometry {
    pub points: [Point2<f64>; 3],
    /// Determinant of the Jacobian (twice the cell area).
    pub det: f64,
    /// Inverse-transpose Jacobian, row-major.
    pub jinv_t: [[f64; 2]; 2],
    pub diameter: f64,
}

impl CellGeometry {
    pub fn new(mesh: &Mesh, cell: usize) -> Self {
        let points = mesh.cell_points(cell);
        let (a, b) = (points[1] - points[0], points[2] - points[0]);
        let det = a.x * b.y - b.x * a.y;
        // J = [a b] (columns); J^{-T} = [[b.y, -a.y], [-b.x, a.x]] / det
        let jinv_t = [[b.y / det, -a.y / det], [-b.x / det, a.x / det]];
        CellGeometry {
            points,
            det,
            jinv_t,
            diameter: mesh.cell_diameter(cell),
        }
    }

    #[inline]
    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.jinv_t[0][0] * g[0] + self.jinv_t[0][1] * g[1],
            self.jinv_t[1][0] * g[0] + self.jinv_t[1][1] * g[1],
        ]
    }

    pub fn map(&self, bary: [f64; 3]) -> Point2<f64> {
        Point2::from(
            bary[0] * self.points[0].coords + bary[1] * self.points[1].coords + bary[2] * self.points[2].coords,
        )
    }

    /// Barycentric coordinates of `p` (not clipped).
    pub fn bary(&self, p: &Point2<f64>) -> [f64; 3] {
        let d = p - self.points[0];
        let xi = self.jinv_t[0][0] * d.x + self.jinv_t[1][0] * d.y;
        let eta = self.jinv_t[0][1] * d.x + self.jinv_t[1][1] * d.y;
        [1.0 - xi - eta, xi, eta]
    }
}

/// Basis values and physical gradients of one family at every quadrature
/// point of a cell.
#[derive(Clone, Debug)]
pub struct FamilyTable {
    pub n: usize,
    ref_values: Vec<[f64; 6]>,
    ref_grads: Vec<[[f64; 2]; 6]>,
    pub values: Vec<[f64; 6]>,
    pub grads: Vec<[[f64; 2]; 6]>,
}

impl FamilyTable {
    fn new(family: Family, rule: &QuadratureRule) -> Self {
        let evals: Vec<_> = rule.points.iter().map(|&p| eval_basis(family, p)).collect();
        let ref_values: Vec<[f64; 6]> = evals.iter().map(|b| b.values).collect();
        let ref_grads: Vec<[[f64; 2]; 6]> = evals.iter().map(|b| b.grads).collect();
        FamilyTable {
            n: family.n_local(),
            values: ref_values.clone(),
            grads: ref_grads.clone(),
            ref_values,
            ref_grads,
        }
    }

    fn reinit(&mut self, geo: &CellGeometry) {
        for (phys, refg) in self.grads.iter_mut().zip(&self.ref_grads) {
            for i in 0..self.n {
                phys[i] = geo.grad(refg[i]);
            }
        }
        debug_assert_eq!(self.values, self.ref_values);
    }
}

/// Per-cell quadrature data for P1 and P2 on the global assembly rule.
#[derive(Clone, Debug)]
pub struct CellQuadrature {
    rule: QuadratureRule,
    pub geo: CellGeometry,
    /// Physical weights (reference weight times Jacobian determinant).
    pub weights: Vec<f64>,
    pub points: Vec<Point2<f64>>,
    pub p1: FamilyTable,
    pub p2: FamilyTable,
}

impl CellQuadrature {
    pub fn new() -> Self {
        Self::with_degree(ASSEMBLY_DEGREE)
    }

    pub fn with_degree(degree: usize) -> Self {
        let rule = QuadratureRule::new(degree).expect("tabulated quadrature degree");
        let nq = rule.n_points();
        let dummy = CellGeometry {
            points: [Point2::origin(); 3],
            det: 0.0,
            jinv_t: [[0.0; 2]; 2],
            diameter: 0.0,
        };
        CellQuadrature {
            p1: FamilyTable::new(Family::P1, &rule),
            p2: FamilyTable::new(Family::P2, &rule),
            rule,
            geo: dummy,
            weights: vec![0.0; nq],
            points: vec![Point2::origin(); nq],
        }
    }

    pub fn n_points(&self) -> usize {
        self.weights.len()
    }

    pub fn reinit(&mut self, mesh: &Mesh, cell: usize) {
        self.geo = CellGeometry::new(mesh, cell);
        for q in 0..self.rule.n_points() {
            self.weights[q] = self.rule.weights[q] * self.geo.det;
            self.points[q] = self.geo.map(self.rule.points[q]);
        }
        self.p1.reinit(&self.geo);
        self.p2.reinit(&self.geo);
    }

    pub fn table(&self, family: Family) -> &FamilyTable {
        match family {
            Family::P1 => &self.p1,
            Family::P2 => &self.p2,
        }
    }
}

impl Default for CellQuadrature {
    fn default() -> Self {
        Self::new()
    }
}
