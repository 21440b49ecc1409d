use crate::error::{Error, Result};

/// Exactness degree used for all assembly and norm integrals.
pub const ASSEMBLY_DEGREE: usize = 6;

/// Symmetric quadrature on the reference triangle `(0,0), (1,0), (0,1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub degree: usize,
    /// Barycentric coordinates `(λ0, λ1, λ2)`; reference coordinates are
    /// `(ξ, η) = (λ1, λ2)`.
    pub points: Vec<[f64; 3]>,
    /// Weights summing to the reference area 1/2.
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// The smallest tabulated rule exact for polynomials of total degree
    /// `degree` (Dunavant rules with 1, 3, 6 and 12 points).
    pub fn new(degree: usize) -> Result<Self> {
        let mut rule = QuadratureRule {
            degree: 0,
            points: Vec::new(),
            weights: Vec::new(),
        };
        match degree {
            0 | 1 => {
                rule.degree = 1;
                rule.push_orbit1(1.0);
            }
            2 => {
                rule.degree = 2;
                rule.push_orbit3(1.0 / 6.0, 1.0 / 3.0);
            }
            3 | 4 => {
                rule.degree = 4;
                rule.push_orbit3(0.445948490915965, 0.223381589678011);
                rule.push_orbit3(0.091576213509771, 0.109951743655322);
            }
            5 | 6 => {
                rule.degree = 6;
                rule.push_orbit3(0.249286745170910, 0.116786275726379);
                rule.push_orbit3(0.063089014491502, 0.050844906370207);
                rule.push_orbit6(0.053145049844817, 0.310352451033784, 0.082851075618374);
            }
            d => return Err(Error::QuadratureDegree(d)),
        }
        Ok(rule)
    }

    pub fn n_points(&self) -> usize {
        self.weights.len()
    }

    fn push_orbit1(&mut self, w: f64) {
        self.points.push([1.0 / 3.0; 3]);
        self.weights.push(0.5 * w);
    }

    /// The three points with two coordinates equal to `a`.
    fn push_orbit3(&mut self, a: f64, w: f64) {
        let b = 1.0 - 2.0 * a;
        for p in [[b, a, a], [a, b, a], [a, a, b]] {
            self.points.push(p);
            self.weights.push(0.5 * w);
        }
    }

    /// The six permutations of `(a, b, 1 - a - b)`.
    fn push_orbit6(&mut self, a: f64, b: f64, w: f64) {
        let c = 1.0 - a - b;
        for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            self.points.push(p);
            self.weights.push(0.5 * w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn monomials_exact() {
        for d in [1, 2, 4, 6] {
            let rule = QuadratureRule::new(d).unwrap();
            assert!((rule.weights.iter().sum::<f64>() - 0.5).abs() < 1e-14);
            for a in 0..=d {
                for b in 0..=(d - a) {
                    // ∫ x^a y^b over the reference triangle = a! b! / (a+b+2)!
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    let approx: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * p[1].powi(a as i32) * p[2].powi(b as i32))
                        .sum();
                    assert!(((approx - exact) / exact).abs() < 1e-13, "d={d} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn degree_seven_not_exact() {
        let rule = QuadratureRule::new(6).unwrap();
        let exact = factorial(7) / factorial(9);
        let approx: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(p, w)| w * p[1].powi(7))
            .sum();
        assert!(((approx - exact) / exact).abs() > 1e-8);
        assert!(QuadratureRule::new(7).is_err());
    }
}
