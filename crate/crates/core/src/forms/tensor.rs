//! Pointwise 2×2 tensor kernels.
//!
//! Velocity gradients follow `(∇u)_ij = ∂u_i/∂x_j`; the advective derivative
//! of a tensor is `(u·∇B)_ij = ∂_k B_ij u_k`.

use nalgebra::{Matrix2, Vector2};

use super::params::ModelParams;

pub type Mat2 = Matrix2<f64>;
pub type Vec2 = Vector2<f64>;

/// Rate of deformation `½(∇u + ∇uᵗ)`.
pub fn deformation(grad_u: &Mat2) -> Mat2 {
    0.5 * (grad_u + grad_u.transpose())
}

/// Spin `½(∇uᵗ − ∇u)`, so that `∇u = D − W`.
pub fn spin(grad_u: &Mat2) -> Mat2 {
    0.5 * (grad_u.transpose() - grad_u)
}

/// Steady O3 left side
/// `T + λ₁(u·∇T + W·T − T·W) − μ₁(D·T + T·D)`, with `u·∇T` supplied.
pub fn o3_constitutive_lhs(advective_t: &Mat2, grad_u: &Mat2, t: &Mat2, params: &ModelParams) -> Mat2 {
    let d = deformation(grad_u);
    let w = spin(grad_u);
    t + params.lambda1 * (advective_t + w * t - t * w) - params.mu1 * (d * t + t * d)
}

/// Symmetric basis tensors for the stored `(xx, xy, yy)` components.
pub const SYM_BASIS: [[[f64; 2]; 2]; 3] = [
    [[1.0, 0.0], [0.0, 0.0]],
    [[0.0, 1.0], [1.0, 0.0]],
    [[0.0, 0.0], [0.0, 1.0]],
];

/// Traceless symmetric basis tensors for the stored `(xx, xy)` components.
pub const TRACELESS_BASIS: [[[f64; 2]; 2]; 2] = [[[1.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [1.0, 0.0]]];

pub fn basis_mat(b: &[[f64; 2]; 2]) -> Mat2 {
    Mat2::new(b[0][0], b[0][1], b[1][0], b[1][1])
}

pub fn sym_from(c: &[f64]) -> Mat2 {
    Mat2::new(c[0], c[1], c[1], c[2])
}

pub fn traceless_from(c: &[f64]) -> Mat2 {
    Mat2::new(c[0], c[1], c[1], -c[0])
}

/// `M : E_a` for the three symmetric basis tensors.
#[inline]
pub fn contract_sym(m: &Mat2) -> [f64; 3] {
    [m[(0, 0)], m[(0, 1)] + m[(1, 0)], m[(1, 1)]]
}

/// `M : F_a` for the two traceless basis tensors.
#[inline]
pub fn contract_traceless(m: &Mat2) -> [f64; 2] {
    [m[(0, 0)] - m[(1, 1)], m[(0, 1)] + m[(1, 0)]]
}

pub fn frob(a: &Mat2, b: &Mat2) -> f64 {
    a.component_mul(b).sum()
}
