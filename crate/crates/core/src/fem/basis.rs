use std::fmt;

/// Continuous Lagrange element family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    P1,
    P2,
}

impl Family {
    /// Local basis functions per cell.
    pub fn n_local(self) -> usize {
        match self {
            Family::P1 => 3,
            Family::P2 => 6,
        }
    }

    /// Barycentric coordinates of local node `k`. Nodes 0..3 are the
    /// vertices; P2 node `3 + k` is the midpoint of the edge opposite vertex `k`.
    pub fn node_bary(self, k: usize) -> [f64; 3] {
        match k {
            0 => [1.0, 0.0, 0.0],
            1 => [0.0, 1.0, 0.0],
            2 => [0.0, 0.0, 1.0],
            3 => [0.0, 0.5, 0.5],
            4 => [0.5, 0.0, 0.5],
            5 => [0.5, 0.5, 0.0],
            _ => panic!("local node {k} out of range for {self}"),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::P1 => "P1",
            Family::P2 => "P2",
        })
    }
}

/// Basis values and reference gradients (with respect to `(ξ, η)`) at a
/// point. Only the first `n` entries are meaningful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisValues {
    pub n: usize,
    pub values: [f64; 6],
    pub grads: [[f64; 2]; 6],
}

// reference gradients of λ0, λ1, λ2
const DLAMBDA: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

pub fn eval_basis(family: Family, bary: [f64; 3]) -> BasisValues {
    let mut out = BasisValues {
        n: family.n_local(),
        values: [0.0; 6],
        grads: [[0.0; 2]; 6],
    };
    let l = bary;
    match family {
        Family::P1 => {
            for i in 0..3 {
                out.values[i] = l[i];
                out.grads[i] = DLAMBDA[i];
            }
        }
        Family::P2 => {
            for i in 0..3 {
                out.values[i] = l[i] * (2.0 * l[i] - 1.0);
                let s = 4.0 * l[i] - 1.0;
                out.grads[i] = [s * DLAMBDA[i][0], s * DLAMBDA[i][1]];
            }
            for k in 0..3 {
                let (a, b) = ((k + 1) % 3, (k + 2) % 3);
                out.values[3 + k] = 4.0 * l[a] * l[b];
                out.grads[3 + k] = [
                    4.0 * (l[b] * DLAMBDA[a][0] + l[a] * DLAMBDA[b][0]),
                    4.0 * (l[b] * DLAMBDA[a][1] + l[a] * DLAMBDA[b][1]),
                ];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lagrange_property() {
        for family in [Family::P1, Family::P2] {
            let n = family.n_local();
            for k in 0..n {
                let b = eval_basis(family, family.node_bary(k));
                for i in 0..n {
                    let expected = if i == k { 1.0 } else { 0.0 };
                    assert!((b.values[i] - expected).abs() < 1e-15, "{family} node {k} fn {i}");
                }
            }
        }
    }

    #[test]
    fn partition_of_unity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let (x, y): (f64, f64) = (rng.gen(), rng.gen());
            let (x, y) = if x + y > 1.0 { (1.0 - x, 1.0 - y) } else { (x, y) };
            for family in [Family::P1, Family::P2] {
                let b = eval_basis(family, [1.0 - x - y, x, y]);
                let sum: f64 = b.values[..b.n].iter().sum();
                assert!((sum - 1.0).abs() < 1e-14);
                for d in 0..2 {
                    let g: f64 = b.grads[..b.n].iter().map(|g| g[d]).sum();
                    assert!(g.abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn gradients_match_differences() {
        let (x, y, eps) = (0.2, 0.3, 1e-6);
        let at = |x: f64, y: f64| eval_basis(Family::P2, [1.0 - x - y, x, y]);
        let b = at(x, y);
        for i in 0..6 {
            let dx = (at(x + eps, y).values[i] - at(x - eps, y).values[i]) / (2.0 * eps);
            let dy = (at(x, y + eps).values[i] - at(x, y - eps).values[i]) / (2.0 * eps);
            assert!((dx - b.grads[i][0]).abs() < 1e-8 && (dy - b.grads[i][1]).abs() < 1e-8);
        }
    }
}
