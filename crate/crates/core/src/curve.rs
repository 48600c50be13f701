//! Curve representations, genericity validation, and Frenet data.
//!
//! Two families are supported: closed oriented polylines ([`PolyCurve`]) and
//! smooth closed curves given as truncated trigonometric series per
//! coordinate ([`FourierCurve`]). Fourier curves have exact derivatives of
//! every order, so no approximation error enters the critical-point pipeline.

use crate::error::{Error, Result};
use crate::tol::Tolerances;
use crate::Vec3;

/// Closed oriented polyline in R^3. Vertex order defines the orientation;
/// edge `i` joins vertex `i` to vertex `i + 1 (mod v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCurve {
    vertices: Vec<Vec3>,
    knotted: bool,
}

impl PolyCurve {
    /// Builds a closed polyline. Requires at least 3 vertices, finite
    /// coordinates, and strictly positive edge lengths. Genericity beyond
    /// that (non-planarity, non-collinear triples, non-parallel ridges) is
    /// reported by [`PolyCurve::validate`], not enforced here.
    pub fn new(vertices: Vec<Vec3>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidCurve(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite()) {
                return Err(Error::InvalidCurve(format!("vertex {i} is not finite")));
            }
        }
        let n = vertices.len();
        for i in 0..n {
            let d = vertices[(i + 1) % n] - vertices[i];
            if d.norm() == 0.0 {
                return Err(Error::InvalidCurve(format!(
                    "vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        Ok(PolyCurve {
            vertices,
            knotted: false,
        })
    }

    /// Marks the curve as knotted. Knottedness is input metadata; it can be
    /// cross-checked with [`crate::witness::knot_determinant`].
    pub fn with_knotted(mut self, knotted: bool) -> Self {
        self.knotted = knotted;
        self
    }

    pub fn knotted(&self) -> bool {
        self.knotted
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    /// Number of vertices (= number of edges).
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Vertex by cyclic index.
    pub fn vertex(&self, i: usize) -> Vec3 {
        self.vertices[i % self.vertices.len()]
    }

    /// Edge `i` as (start, end) = (vertex i, vertex i+1).
    pub fn edge(&self, i: usize) -> (Vec3, Vec3) {
        (self.vertex(i), self.vertex(i + 1))
    }

    /// Unit direction of edge `i`.
    pub fn edge_dir(&self, i: usize) -> Vec3 {
        let (a, b) = self.edge(i);
        (b - a).normalize()
    }

    /// Unit directions pointing away from vertex `i` along its two adjacent
    /// edges: `e1` toward the next vertex, `e2` toward the previous one.
    pub fn away_dirs(&self, i: usize) -> (Vec3, Vec3) {
        let n = self.vertices.len();
        let v = self.vertex(i);
        let e1 = (self.vertex(i + 1) - v).normalize();
        let e2 = (self.vertex(i + n - 1) - v).normalize();
        (e1, e2)
    }

    pub fn centroid(&self) -> Vec3 {
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }

    /// Largest pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                d = d.max((self.vertices[i] - self.vertices[j]).norm());
            }
        }
        d
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.vertices.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                (b - a).norm()
            })
            .sum()
    }

    /// Genericity report: planarity, collinear consecutive triples, pairwise
    /// parallel edge directions, pairwise parallel ridge directions. The
    /// checks cover exactly the properties downstream operations rely on;
    /// a curve passing all of them is accepted by every operation.
    pub fn validate(&self, tol: &Tolerances) -> GenericityReport {
        let eps = tol.eps_geom;
        let n = self.vertices.len();
        let mut report = GenericityReport::default();

        report.planar = planar_points(&self.vertices, eps);

        // Collinear consecutive triples, reported by the middle vertex.
        for i in 0..n {
            let (e1, e2) = self.away_dirs(i);
            if e1.cross(&e2).norm() < eps {
                report.collinear_triples.push(i);
            }
        }

        // Pairwise parallel edge directions (covers anti-parallel).
        let dirs: Vec<Vec3> = (0..n).map(|i| self.edge_dir(i)).collect();
        for i in 0..n {
            for j in i + 1..n {
                if dirs[i].cross(&dirs[j]).norm() < eps {
                    report.parallel_edges.push((i, j));
                }
            }
        }

        // Pairwise parallel ridge directions. Ridges at collinear vertices
        // do not exist and are skipped; they are already reported above.
        let ridges: Vec<Option<Vec3>> = (0..n)
            .map(|i| {
                let (e1, e2) = self.away_dirs(i);
                let r = e1.cross(&e2);
                (r.norm() >= eps).then(|| r.normalize())
            })
            .collect();
        for i in 0..n {
            for j in i + 1..n {
                if let (Some(ri), Some(rj)) = (ridges[i], ridges[j]) {
                    if ri.cross(&rj).norm() < eps {
                        report.parallel_ridges.push((i, j));
                    }
                }
            }
        }

        report
    }
}

/// One coordinate of a Fourier curve: `a0 + sum_k a[k-1] cos(kt) + b[k-1] sin(kt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl FourierSeries {
    pub fn constant(a0: f64) -> Self {
        FourierSeries {
            a0,
            a: vec![],
            b: vec![],
        }
    }

    /// Evaluates the series or one of its derivatives (termwise, exact).
    fn eval(&self, t: f64, order: usize) -> f64 {
        let mut acc = if order == 0 { self.a0 } else { 0.0 };
        for (idx, (&a, &b)) in self.a.iter().zip(self.b.iter()).enumerate() {
            let k = (idx + 1) as f64;
            // Each derivative maps (a, b) -> (k b, -k a).
            let (mut ca, mut cb) = (a, b);
            for _ in 0..order {
                let na = k * cb;
                let nb = -k * ca;
                ca = na;
                cb = nb;
            }
            let (s, c) = (k * t).sin_cos();
            acc += ca * c + cb * s;
        }
        acc
    }
}

/// Smooth closed curve as a truncated trigonometric series per coordinate,
/// parametrized over `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCurve {
    order: usize,
    coords: [FourierSeries; 3],
    knotted: bool,
}

impl FourierCurve {
    pub fn new(order: usize, coords: [FourierSeries; 3]) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidCurve("fourier order must be >= 1".into()));
        }
        for (axis, s) in ["x", "y", "z"].iter().zip(coords.iter()) {
            if s.a.len() != order || s.b.len() != order {
                return Err(Error::InvalidCurve(format!(
                    "coordinate {axis}: expected {order} cosine and sine coefficients"
                )));
            }
            if !s.a0.is_finite()
                || s.a.iter().any(|c| !c.is_finite())
                || s.b.iter().any(|c| !c.is_finite())
            {
                return Err(Error::InvalidCurve(format!(
                    "coordinate {axis}: non-finite coefficient"
                )));
            }
        }
        Ok(FourierCurve {
            order,
            coords,
            knotted: false,
        })
    }

    pub fn with_knotted(mut self, knotted: bool) -> Self {
        self.knotted = knotted;
        self
    }

    pub fn knotted(&self) -> bool {
        self.knotted
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coords(&self) -> &[FourierSeries; 3] {
        &self.coords
    }

    /// Point (`order = 0`) or derivative (`order = 1..=3`) at parameter `t`.
    pub fn eval(&self, t: f64, order: usize) -> Vec3 {
        debug_assert!(order <= 3, "derivative order 0..=3");
        Vec3::new(
            self.coords[0].eval(t, order),
            self.coords[1].eval(t, order),
            self.coords[2].eval(t, order),
        )
    }

    /// Frenet frame, curvature and torsion at `t`.
    ///
    /// `kappa = |c' x c''| / |c'|^3`, `tau = det(c', c'', c''') / |c' x c''|^2`.
    /// Fails with [`Error::DegenerateCurvature`] where `|c' x c''| < eps |c'|^3`.
    pub fn frenet(&self, t: f64, tol: &Tolerances) -> Result<FrenetFrame> {
        let c0 = self.eval(t, 0);
        let c1 = self.eval(t, 1);
        let c2 = self.eval(t, 2);
        let c3 = self.eval(t, 3);
        let speed = c1.norm();
        if speed == 0.0 {
            return Err(Error::DegenerateCurvature { t });
        }
        let cr = c1.cross(&c2);
        let crn = cr.norm();
        if crn < tol.eps_geom * speed.powi(3) {
            return Err(Error::DegenerateCurvature { t });
        }
        let tangent = c1 / speed;
        let binormal = cr / crn;
        let normal = binormal.cross(&tangent);
        Ok(FrenetFrame {
            t,
            point: c0,
            tangent,
            normal,
            binormal,
            curvature: crn / speed.powi(3),
            torsion: c3.dot(&cr) / (crn * crn),
        })
    }

    /// Genericity report over a sample grid: regularity, curvature bounded
    /// away from zero, planarity of the sampled point set.
    pub fn validate(&self, samples: usize, tol: &Tolerances) -> GenericityReport {
        let samples = samples.max(16 * (self.order + 1));
        let mut report = GenericityReport::default();
        let mut points = Vec::with_capacity(samples);
        let mut max_speed: f64 = 0.0;
        let speeds: Vec<(f64, f64)> = (0..samples)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
                points.push(self.eval(t, 0));
                let s = self.eval(t, 1).norm();
                max_speed = max_speed.max(s);
                (t, s)
            })
            .collect();
        for (t, s) in speeds {
            if s < 1e-6 * max_speed {
                report.irregular.push(t);
                continue;
            }
            if self.frenet(t, tol).is_err() {
                report.degenerate_curvature.push(t);
            }
        }
        report.planar = planar_points(&points, tol.eps_geom);
        report
    }

    pub fn centroid_and_diameter(&self, samples: usize) -> (Vec3, f64) {
        let pts: Vec<Vec3> = (0..samples)
            .map(|i| self.eval(2.0 * std::f64::consts::PI * i as f64 / samples as f64, 0))
            .collect();
        let centroid = pts.iter().sum::<Vec3>() / pts.len() as f64;
        let mut d: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                d = d.max((pts[i] - pts[j]).norm());
            }
        }
        (centroid, d)
    }
}

/// Frenet data at one parameter of a smooth curve.
#[derive(Debug, Clone, Copy)]
pub struct FrenetFrame {
    pub t: f64,
    pub point: Vec3,
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
    /// 1/length units; strictly positive on accepted curves.
    pub curvature: f64,
    /// 1/length units; sign per the right-handed frame.
    pub torsion: f64,
}

/// Outcome of the genericity checks. Empty vectors and `planar = false`
/// mean the curve is accepted by every downstream operation.
#[derive(Debug, Clone, Default)]
pub struct GenericityReport {
    /// Vertex/point set has affine rank < 3.
    pub planar: bool,
    /// Middle vertex index of each collinear consecutive triple.
    pub collinear_triples: Vec<usize>,
    /// Edge index pairs with parallel (or anti-parallel) directions.
    pub parallel_edges: Vec<(usize, usize)>,
    /// Vertex index pairs whose ridge directions are parallel.
    pub parallel_ridges: Vec<(usize, usize)>,
    /// Parameters where a smooth curve's curvature predicate fails.
    pub degenerate_curvature: Vec<f64>,
    /// Parameters where a smooth curve's speed is near zero.
    pub irregular: Vec<f64>,
}

impl GenericityReport {
    pub fn is_generic(&self) -> bool {
        !self.planar
            && self.collinear_triples.is_empty()
            && self.parallel_edges.is_empty()
            && self.parallel_ridges.is_empty()
            && self.degenerate_curvature.is_empty()
            && self.irregular.is_empty()
    }

    /// Generic as needed by wedge/lune constructions, which do not care
    /// about parallel non-adjacent edges of smooth data.
    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if self.planar {
            parts.push("planar".to_string());
        }
        if !self.collinear_triples.is_empty() {
            parts.push(format!("collinear triples at {:?}", self.collinear_triples));
        }
        if !self.parallel_edges.is_empty() {
            parts.push(format!("parallel edges {:?}", self.parallel_edges));
        }
        if !self.parallel_ridges.is_empty() {
            parts.push(format!("parallel ridges {:?}", self.parallel_ridges));
        }
        if !self.degenerate_curvature.is_empty() {
            parts.push(format!(
                "degenerate curvature at {} parameters",
                self.degenerate_curvature.len()
            ));
        }
        if !self.irregular.is_empty() {
            parts.push(format!("irregular at {} parameters", self.irregular.len()));
        }
        if parts.is_empty() {
            "generic".to_string()
        } else {
            parts.join("; ")
        }
    }
}

/// Affine rank < 3 test on a point set: smallest covariance eigenvalue
/// versus the largest, at relative tolerance `eps` on extents.
fn planar_points(points: &[Vec3], eps: f64) -> bool {
    let n = points.len() as f64;
    let centroid: Vec3 = points.iter().sum::<Vec3>() / n;
    let mut cov = nalgebra::Matrix3::<f64>::zeros();
    for p in points {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    let eig = nalgebra::SymmetricEigen::new(cov);
    let mut ev: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (min, max) = (ev[0].max(0.0), ev[2].max(0.0));
    if max == 0.0 {
        return true;
    }
    // Eigenvalues scale as squared extents.
    (min / max).sqrt() < eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::Tolerances;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    pub(crate) fn unit_square() -> PolyCurve {
        PolyCurve::new(vec![
            v(1.0, 1.0, 0.0),
            v(-1.0, 1.0, 0.0),
            v(-1.0, -1.0, 0.0),
            v(1.0, -1.0, 0.0),
        ])
        .unwrap()
    }

    pub(crate) fn tetra4() -> PolyCurve {
        PolyCurve::new(vec![
            v(1.0, 1.0, 1.0),
            v(1.0, -1.0, -1.0),
            v(-1.0, 1.0, -1.0),
            v(-1.0, -1.0, 1.0),
        ])
        .unwrap()
    }

    pub(crate) fn unit_circle() -> FourierCurve {
        let mut x = FourierSeries::constant(0.0);
        x.a = vec![1.0];
        x.b = vec![0.0];
        let mut y = FourierSeries::constant(0.0);
        y.a = vec![0.0];
        y.b = vec![1.0];
        let z = FourierSeries {
            a0: 0.0,
            a: vec![0.0],
            b: vec![0.0],
        };
        FourierCurve::new(1, [x, y, z]).unwrap()
    }

    #[test]
    fn square_is_planar_with_parallel_edges() {
        let tol = Tolerances::default();
        let report = unit_square().validate(&tol);
        assert!(report.planar);
        assert!(!report.parallel_edges.is_empty());
        // Opposite edges of the square are anti-parallel.
        assert!(report.parallel_edges.contains(&(0, 2)));
        assert!(report.parallel_edges.contains(&(1, 3)));
    }

    #[test]
    fn tetra4_passes_all_checks() {
        let tol = Tolerances::default();
        let report = tetra4().validate(&tol);
        assert!(!report.planar);
        assert!(report.collinear_triples.is_empty());
        assert!(report.parallel_edges.is_empty());
        assert!(report.parallel_ridges.is_empty());
        assert!(report.is_generic());
    }

    #[test]
    fn triangle_is_planar() {
        let tol = Tolerances::default();
        let tri = PolyCurve::new(vec![v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)]).unwrap();
        assert!(tri.validate(&tol).planar);
    }

    #[test]
    fn validate_is_pure() {
        let tol = Tolerances::default();
        let c = tetra4();
        let r1 = c.validate(&tol);
        let r2 = c.validate(&tol);
        assert_eq!(r1.planar, r2.planar);
        assert_eq!(r1.collinear_triples, r2.collinear_triples);
        assert_eq!(r1.parallel_edges, r2.parallel_edges);
        assert_eq!(r1.parallel_ridges, r2.parallel_ridges);
    }

    #[test]
    fn construction_rejects_degenerate_input() {
        assert!(PolyCurve::new(vec![v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0)]).is_err());
        assert!(PolyCurve::new(vec![
            v(0.0, 0.0, 0.0),
            v(0.0, 0.0, 0.0),
            v(1.0, 0.0, 0.0)
        ])
        .is_err());
        assert!(PolyCurve::new(vec![
            v(0.0, 0.0, 0.0),
            v(1.0, 0.0, f64::NAN),
            v(1.0, 1.0, 0.0)
        ])
        .is_err());
    }

    #[test]
    fn circle_eval_and_derivatives() {
        let c = unit_circle();
        let pi = std::f64::consts::PI;
        assert!((c.eval(0.0, 0) - v(1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((c.eval(0.0, 1) - v(0.0, 1.0, 0.0)).norm() < 1e-15);
        assert!((c.eval(pi / 2.0, 2) - v(0.0, -1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn circle_frenet() {
        let tol = Tolerances::default();
        let c = unit_circle();
        for i in 0..8 {
            let t = i as f64 * 0.7;
            let f = c.frenet(t, &tol).unwrap();
            assert!((f.curvature - 1.0).abs() < 1e-12);
            assert!((f.binormal - v(0.0, 0.0, 1.0)).norm() < 1e-12);
            assert!(f.torsion.abs() < 1e-12);
        }
    }

    #[test]
    fn radius_two_circle_curvature() {
        let tol = Tolerances::default();
        let mut x = FourierSeries::constant(0.0);
        x.a = vec![2.0];
        x.b = vec![0.0];
        let mut y = FourierSeries::constant(0.0);
        y.a = vec![0.0];
        y.b = vec![2.0];
        let z = FourierSeries {
            a0: 0.0,
            a: vec![0.0],
            b: vec![0.0],
        };
        let c = FourierCurve::new(1, [x, y, z]).unwrap();
        let f = c.frenet(0.3, &tol).unwrap();
        assert!((f.curvature - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_fourier_input_errors() {
        let tol = Tolerances::default();
        // A straight segment swept back and forth: c(t) = (cos t, 0, 0).
        let mut x = FourierSeries::constant(0.0);
        x.a = vec![1.0];
        x.b = vec![0.0];
        let y = FourierSeries {
            a0: 0.0,
            a: vec![0.0],
            b: vec![0.0],
        };
        let z = FourierSeries {
            a0: 0.0,
            a: vec![0.0],
            b: vec![0.0],
        };
        let c = FourierCurve::new(1, [x, y, z]).unwrap();
        assert!(matches!(
            c.frenet(0.4, &tol),
            Err(Error::DegenerateCurvature { .. })
        ));
    }

    #[test]
    fn frame_orthonormality_on_grid() {
        let tol = Tolerances::default();
        // Lifted ellipse; curvature never vanishes.
        let c = crate::generate::ellipse(2.0, 1.0, 0.1);
        for i in 0..256 {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 256.0;
            let f = c.frenet(t, &tol).unwrap();
            assert!(f.binormal.dot(&f.tangent).abs() < 1e-9);
            assert!((f.binormal - f.tangent.cross(&f.normal)).norm() < 1e-9);
            assert!((f.tangent.norm() - 1.0).abs() < 1e-12);
            assert!((f.normal.norm() - 1.0).abs() < 1e-12);
            assert!(f.curvature > 0.0);
        }
    }

    #[test]
    fn curvature_matches_finite_differences() {
        let tol = Tolerances::default();
        let c = crate::generate::ellipse(2.0, 1.0, 0.1);
        let h = 1e-5;
        for i in 0..32 {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 32.0;
            // Central differences on positions only.
            let pm = c.eval(t - h, 0);
            let p0 = c.eval(t, 0);
            let pp = c.eval(t + h, 0);
            let d1 = (pp - pm) / (2.0 * h);
            let d2 = (pp - 2.0 * p0 + pm) / (h * h);
            let kappa_fd = d1.cross(&d2).norm() / d1.norm().powi(3);
            let kappa = c.frenet(t, &tol).unwrap().curvature;
            assert!(
                (kappa - kappa_fd).abs() <= 1e-4 * kappa.abs(),
                "t={t}: {kappa} vs fd {kappa_fd}"
            );
        }
    }
}
