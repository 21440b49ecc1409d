use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Point2, Vector2};

use crate::error::{Error, Result};
use crate::forms::VectorField;
use crate::mesh::{eccentric_annulus_mesh, unit_square_mesh, BoundaryTag, Mesh};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Geometry {
    UnitSquare,
    /// Outer circle of radius `outer` at the origin, inner circle of radius
    /// `inner` centred at `(0, eccentricity)`.
    EccentricAnnulus {
        outer: f64,
        inner: f64,
        eccentricity: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    LidDrivenCavity,
    JournalBearing,
    Manufactured,
}

impl ProblemKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ldc" | "cavity" => Ok(ProblemKind::LidDrivenCavity),
            "jb" | "bearing" => Ok(ProblemKind::JournalBearing),
            "mms" | "manufactured" => Ok(ProblemKind::Manufactured),
            other => Err(Error::InvalidParameters(format!(
                "unknown problem {other:?} (expected ldc, jb or mms)"
            ))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::LidDrivenCavity => "ldc",
            ProblemKind::JournalBearing => "jb",
            ProblemKind::Manufactured => "mms",
        })
    }
}

/// Mesh resolution: grid divisions for the square, target edge length for
/// the annulus. Either converts to the other as `h = 1/n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeshResolution {
    Divisions(usize),
    Size(f64),
}

impl MeshResolution {
    pub fn h(self) -> f64 {
        match self {
            MeshResolution::Divisions(n) => 1.0 / n as f64,
            MeshResolution::Size(h) => h,
        }
    }
}

impl fmt::Display for MeshResolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshResolution::Divisions(n) => write!(f, "n={n}"),
            MeshResolution::Size(h) => write!(f, "h={h}"),
        }
    }
}

/// Exact velocity and pressure of a manufactured problem.
#[derive(Clone)]
pub struct ExactSolution {
    pub velocity: VectorField,
    pub pressure: Arc<dyn Fn(Point2<f64>) -> f64 + Send + Sync>,
}

/// A steady flow problem with tangential Dirichlet velocity data.
#[derive(Clone)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub geometry: Geometry,
    pub dirichlet: Vec<(BoundaryTag, VectorField)>,
    pub body_force: Option<VectorField>,
    /// Characteristic speed U.
    pub speed: f64,
    /// `Wi = wi_factor · λ₁ · U`.
    pub wi_factor: f64,
    /// `Re = re_factor · U / η₀`.
    pub re_factor: f64,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("kind", &self.kind)
            .field("geometry", &self.geometry)
            .field("speed", &self.speed)
            .finish_non_exhaustive()
    }
}

fn check_speed(u: f64) -> Result<()> {
    if u > 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!(
            "characteristic speed U = {u} must be positive"
        )))
    }
}

/// Lid profile `16x²(1−x)²`, equal to 1 at the centre and 0 at the corners.
pub fn lid_profile(x: f64) -> f64 {
    16.0 * x * x * (1.0 - x) * (1.0 - x)
}

/// Unit square, lid velocity `U·(16x²(1−x)², 0)` on top, no slip elsewhere.
pub fn lid_driven_cavity(speed: f64) -> Result<ProblemSpec> {
    check_speed(speed)?;
    let zero: VectorField = Arc::new(|_| [0.0, 0.0]);
    let lid: VectorField = Arc::new(move |p: Point2<f64>| [speed * lid_profile(p.x), 0.0]);
    Ok(ProblemSpec {
        kind: ProblemKind::LidDrivenCavity,
        geometry: Geometry::UnitSquare,
        // the lid goes last so the corners take its (zero) value
        dirichlet: vec![(BoundaryTag::SquareWallsFloor, zero), (BoundaryTag::SquareTop, lid)],
        body_force: None,
        speed,
        wi_factor: 1.0,
        re_factor: 1.0,
        exact: None,
    })
}

pub const BEARING_OUTER: f64 = 1.0;
pub const BEARING_INNER: f64 = 0.5;
pub const BEARING_ECCENTRICITY: f64 = 0.25;

/// Eccentric annulus with the inner cylinder rotating counterclockwise at
/// surface speed U about its own centre; the outer cylinder is at rest.
pub fn journal_bearing(speed: f64) -> Result<ProblemSpec> {
    check_speed(speed)?;
    let omega = speed / BEARING_INNER;
    let (cx, cy) = (0.0, BEARING_ECCENTRICITY);
    let zero: VectorField = Arc::new(|_| [0.0, 0.0]);
    let inner: VectorField = Arc::new(move |p: Point2<f64>| [-omega * (p.y - cy), omega * (p.x - cx)]);
    Ok(ProblemSpec {
        kind: ProblemKind::JournalBearing,
        geometry: Geometry::EccentricAnnulus {
            outer: BEARING_OUTER,
            inner: BEARING_INNER,
            eccentricity: BEARING_ECCENTRICITY,
        },
        dirichlet: vec![(BoundaryTag::AnnulusOuter, zero), (BoundaryTag::AnnulusInner, inner)],
        body_force: None,
        speed,
        wi_factor: 1.0 / BEARING_INNER,
        re_factor: 1.0 / BEARING_INNER,
        exact: None,
    })
}

/// Navier–Stokes on the unit square with stream function
/// `ψ = sin²(πx) sin²(πy)`, pressure `cos(πx) cos(πy)` and the matching body
/// force for viscosity `eta0`. Velocity vanishes on the whole boundary.
pub fn manufactured_navier_stokes(eta0: f64) -> Result<ProblemSpec> {
    if !(eta0 > 0.0) {
        return Err(Error::InvalidParameters(format!("eta0 = {eta0} must be positive")));
    }
    let zero: VectorField = Arc::new(|_| [0.0, 0.0]);
    let velocity: VectorField = Arc::new(|p: Point2<f64>| {
        let (sx, sy) = ((PI * p.x).sin(), (PI * p.y).sin());
        [
            PI * sx * sx * (2.0 * PI * p.y).sin(),
            -PI * (2.0 * PI * p.x).sin() * sy * sy,
        ]
    });
    let force: VectorField = Arc::new(move |p: Point2<f64>| {
        let (x, y) = (p.x, p.y);
        let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
        let (s2x, s2y) = ((2.0 * PI * x).sin(), (2.0 * PI * y).sin());
        let (c2x, c2y) = ((2.0 * PI * x).cos(), (2.0 * PI * y).cos());
        let pi3 = PI * PI * PI;
        let u1 = PI * sx * sx * s2y;
        let u2 = -PI * s2x * sy * sy;
        let lap1 = 2.0 * pi3 * c2x * s2y - 4.0 * pi3 * sx * sx * s2y;
        let lap2 = 4.0 * pi3 * s2x * sy * sy - 2.0 * pi3 * s2x * c2y;
        let (u1x, u1y) = (PI * PI * s2x * s2y, 2.0 * PI * PI * sx * sx * c2y);
        let (u2x, u2y) = (-2.0 * PI * PI * c2x * sy * sy, -PI * PI * s2x * s2y);
        let px = -PI * sx * (PI * y).cos();
        let py = -PI * (PI * x).cos() * sy;
        [
            -eta0 * lap1 + u1 * u1x + u2 * u1y + px,
            -eta0 * lap2 + u1 * u2x + u2 * u2y + py,
        ]
    });
    Ok(ProblemSpec {
        kind: ProblemKind::Manufactured,
        geometry: Geometry::UnitSquare,
        dirichlet: vec![
            (BoundaryTag::SquareWallsFloor, zero.clone()),
            (BoundaryTag::SquareTop, zero),
        ],
        body_force: Some(force),
        speed: 1.0,
        wi_factor: 1.0,
        re_factor: 1.0,
        exact: Some(ExactSolution {
            velocity,
            pressure: Arc::new(|p: Point2<f64>| (PI * p.x).cos() * (PI * p.y).cos()),
        }),
    })
}

impl ProblemSpec {
    pub fn build(kind: ProblemKind, speed: f64, eta0: f64) -> Result<Self> {
        match kind {
            ProblemKind::LidDrivenCavity => lid_driven_cavity(speed),
            ProblemKind::JournalBearing => journal_bearing(speed),
            ProblemKind::Manufactured => manufactured_navier_stokes(eta0),
        }
    }

    pub fn wi_of(&self, lambda1: f64) -> f64 {
        self.wi_factor * lambda1 * self.speed
    }

    pub fn lambda1_for_wi(&self, wi: f64) -> f64 {
        wi / (self.wi_factor * self.speed)
    }

    pub fn re_of(&self, eta0: f64) -> f64 {
        self.re_factor * self.speed / eta0
    }

    pub fn mesh(&self, res: MeshResolution) -> Result<Arc<Mesh>> {
        let mesh = match self.geometry {
            Geometry::UnitSquare => {
                let n = match res {
                    MeshResolution::Divisions(n) => n,
                    MeshResolution::Size(h) => (1.0 / h).round().max(1.0) as usize,
                };
                unit_square_mesh(n)?
            }
            Geometry::EccentricAnnulus {
                outer,
                inner,
                eccentricity,
            } => eccentric_annulus_mesh(outer, inner, eccentricity, res.h())?,
        };
        Ok(Arc::new(mesh))
    }

    /// Largest `|g·n|` over Gauss points of every boundary edge. Straight
    /// edges use their own normal; edges on a circle use the exact radial
    /// normal of that circle.
    pub fn max_normal_flux(&self, mesh: &Mesh) -> f64 {
        let gauss = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
        let mut worst: f64 = 0.0;
        for ([a, b], tag) in mesh.oriented_boundary_edges() {
            let Some((_, g)) = self.dirichlet.iter().rev().find(|(t, _)| *t == tag) else {
                continue;
            };
            let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
            for s in gauss {
                let p = pa + s * (pb - pa);
                let n = match (self.geometry, tag) {
                    (Geometry::EccentricAnnulus { eccentricity, .. }, BoundaryTag::AnnulusInner) => {
                        (p - Point2::new(0.0, eccentricity)).normalize()
                    }
                    (Geometry::EccentricAnnulus { .. }, BoundaryTag::AnnulusOuter) => p.coords.normalize(),
                    _ => {
                        let t = pb - pa;
                        Vector2::new(t.y, -t.x).normalize()
                    }
                };
                let v = g(p);
                worst = worst.max((v[0] * n.x + v[1] * n.y).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lid_values() {
        let p = lid_driven_cavity(2.0).unwrap();
        let lid = &p.dirichlet[1].1;
        assert_eq!(lid(Point2::new(0.5, 1.0)), [2.0, 0.0]);
        assert_eq!(lid(Point2::new(0.0, 1.0)), [0.0, 0.0]);
        assert_eq!(lid(Point2::new(1.0, 1.0)), [0.0, 0.0]);
        assert!((lid(Point2::new(0.25, 1.0))[0] - 0.5625 * 2.0).abs() < 1e-15);
        assert_eq!(p.wi_of(0.3), 0.6);
    }

    #[test]
    fn bearing_speed_and_weissenberg() {
        let p = journal_bearing(1.0).unwrap();
        assert!((p.wi_of(0.05) - 0.1).abs() < 1e-15);
        assert_eq!(p.re_of(1.0), 2.0);
        let mesh = p.mesh(MeshResolution::Size(0.1)).unwrap();
        let inner = &p.dirichlet[1].1;
        for v in mesh.vertices_with_tag(BoundaryTag::AnnulusInner) {
            let g = inner(mesh.vertices()[v]);
            assert!(((g[0] * g[0] + g[1] * g[1]).sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_data_is_tangential() {
        for p in [journal_bearing(1.5).unwrap(), lid_driven_cavity(1.0).unwrap()] {
            for h in [0.2, 0.1] {
                let mesh = p.mesh(MeshResolution::Size(h)).unwrap();
                assert!(p.max_normal_flux(&mesh) < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_nonpositive_speed() {
        assert!(lid_driven_cavity(0.0).is_err());
        assert!(journal_bearing(-1.0).is_err());
    }

    #[test]
    fn manufactured_force_matches_finite_differences() {
        let eta0 = 0.7;
        let p = manufactured_navier_stokes(eta0).unwrap();
        let exact = p.exact.clone().unwrap();
        let f = p.body_force.clone().unwrap();
        let d = 1e-4;
        let u = |x: f64, y: f64| (exact.velocity)(Point2::new(x, y));
        let pr = |x: f64, y: f64| (exact.pressure)(Point2::new(x, y));
        for &(x, y) in &[(0.3, 0.6), (0.71, 0.12), (0.5, 0.5), (0.05, 0.93)] {
            let (c, e, w, n, s) = (u(x, y), u(x + d, y), u(x - d, y), u(x, y + d), u(x, y - d));
            let mut expect = [0.0; 2];
            for k in 0..2 {
                let lap = (e[k] + w[k] + n[k] + s[k] - 4.0 * c[k]) / (d * d);
                let ux = (e[k] - w[k]) / (2.0 * d);
                let uy = (n[k] - s[k]) / (2.0 * d);
                expect[k] = -eta0 * lap + c[0] * ux + c[1] * uy;
            }
            expect[0] += (pr(x + d, y) - pr(x - d, y)) / (2.0 * d);
            expect[1] += (pr(x, y + d) - pr(x, y - d)) / (2.0 * d);
            let got = f(Point2::new(x, y));
            for k in 0..2 {
                assert!(
                    (got[k] - expect[k]).abs() < 1e-5 * (1.0 + expect[k].abs()),
                    "{got:?} vs {expect:?}"
                );
            }
            let div = (e[0] - w[0]) / (2.0 * d) + (n[1] - s[1]) / (2.0 * d);
            assert!(div.abs() < 1e-6);
        }
        for t in [0.0, 0.37, 1.0] {
            for q in [
                Point2::new(t, 0.0),
                Point2::new(t, 1.0),
                Point2::new(0.0, t),
                Point2::new(1.0, t),
            ] {
                let v = (exact.velocity)(q);
                assert!(v[0].abs() < 1e-14 && v[1].abs() < 1e-14);
            }
        }
    }
}
