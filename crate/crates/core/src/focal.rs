//! Focal machinery of a smooth curve: osculating centers, focal lines,
//! the focal surface, triple-normal points, and chases along paths of
//! parameter triples.
//!
//! The squared distance from `y` has a degenerate critical point at
//! parameter `t` exactly when `y` lies on the focal line of `t`: the line
//! through the osculating center `F(t) = c + n/kappa` in the binormal
//! direction. The union of those lines is the focal surface, the
//! bifurcation set of the census: crossing one sheet transversally changes
//! the normal count by exactly 2.

use crate::curve::FourierCurve;
use crate::error::{Error, Result};
use crate::sqd::{default_grid, smooth_normals, FootKind};
use crate::tol::Tolerances;
use crate::Vec3;
use rayon::prelude::*;

const TAU: f64 = std::f64::consts::TAU;

/// Center of the osculating circle at `t`.
pub fn osculating_center(curve: &FourierCurve, t: f64, tol: &Tolerances) -> Result<Vec3> {
    let frame = curve.frenet(t, tol)?;
    Ok(frame.point + frame.normal / frame.curvature)
}

/// Focal line of parameter `t`: through the osculating center, along the
/// binormal.
#[derive(Debug, Clone, Copy)]
pub struct FocalLine {
    pub base: Vec3,
    pub direction: Vec3,
    pub t: f64,
}

impl FocalLine {
    pub fn point_at(&self, s: f64) -> Vec3 {
        self.base + s * self.direction
    }

    /// Distance from `y` to the line.
    pub fn distance(&self, y: Vec3) -> f64 {
        (y - self.base).cross(&self.direction).norm()
    }
}

pub fn focal_line(curve: &FourierCurve, t: f64, tol: &Tolerances) -> Result<FocalLine> {
    let frame = curve.frenet(t, tol)?;
    Ok(FocalLine {
        base: frame.point + frame.normal / frame.curvature,
        direction: frame.binormal,
        t,
    })
}

/// Regular sample grid of the focal surface `P(t, s) = F(t) + s b(t)`.
#[derive(Debug, Clone)]
pub struct FocalSurfaceMesh {
    /// Row `i` holds the line of parameter `ts[i]` sampled at all `ss`.
    pub points: Vec<Vec<Vec3>>,
    pub ts: Vec<f64>,
    pub ss: Vec<f64>,
}

pub fn sample_focal_surface(
    curve: &FourierCurve,
    t_count: usize,
    s_range: f64,
    s_count: usize,
    tol: &Tolerances,
) -> Result<FocalSurfaceMesh> {
    if t_count < 2 || s_count < 2 {
        return Err(Error::InvalidInput("mesh resolutions must be >= 2".into()));
    }
    if !(s_range.is_finite() && s_range > 0.0) {
        return Err(Error::InvalidInput("s range must be positive".into()));
    }
    let ts: Vec<f64> = (0..t_count).map(|i| TAU * i as f64 / t_count as f64).collect();
    let ss: Vec<f64> = (0..s_count)
        .map(|j| -s_range + 2.0 * s_range * j as f64 / (s_count - 1) as f64)
        .collect();
    let points = ts
        .par_iter()
        .map(|&t| {
            let line = focal_line(curve, t, tol)?;
            Ok(ss.iter().map(|&s| line.point_at(s)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FocalSurfaceMesh { points, ts, ss })
}

/// Common point of the three normal planes at `t1, t2, t3`, classified.
#[derive(Debug, Clone)]
pub struct TripleNormalPoint {
    pub params: [f64; 3],
    pub y: Vec3,
    pub kinds: [FootKind; 3],
    /// Spectral condition number of the unit-row normal-plane system.
    pub condition: f64,
}

fn second_derivative_kind(curve: &FourierCurve, t: f64, y: Vec3, tol: &Tolerances) -> Result<FootKind> {
    let c = curve.eval(t, 0);
    let c1 = curve.eval(t, 1);
    let c2 = curve.eval(t, 2);
    let h = c1.norm_squared() + (c - y).dot(&c2);
    if h.abs() < tol.eps_geom * (c1.norm_squared() + (c - y).norm() * c2.norm()) {
        return Err(Error::NonGenericPoint(format!(
            "degenerate critical point at t = {t:.6}"
        )));
    }
    Ok(if h < 0.0 { FootKind::Max } else { FootKind::Min })
}

/// Intersects the normal planes of three distinct parameters and
/// classifies each as a max or min of the squared distance from the
/// intersection point.
pub fn triple_normal_point(
    curve: &FourierCurve,
    params: [f64; 3],
    tol: &Tolerances,
) -> Result<TripleNormalPoint> {
    for i in 0..3 {
        for j in i + 1..3 {
            let gap = (params[i] - params[j]).rem_euclid(TAU);
            if gap.min(TAU - gap) < tol.eps_geom {
                return Err(Error::InvalidInput(format!(
                    "parameters {i} and {j} coincide mod 2 pi"
                )));
            }
        }
    }
    let rows: Vec<(Vec3, f64)> = params
        .iter()
        .map(|&t| {
            let c1 = curve.eval(t, 1);
            let speed = c1.norm();
            let unit = c1 / speed;
            (unit, unit.dot(&curve.eval(t, 0)))
        })
        .collect();
    let m = nalgebra::Matrix3::from_rows(&[
        rows[0].0.transpose(),
        rows[1].0.transpose(),
        rows[2].0.transpose(),
    ]);
    if m.determinant().abs() < tol.eps_geom {
        return Err(Error::SingularSystem);
    }
    let rhs = Vec3::new(rows[0].1, rows[1].1, rows[2].1);
    let y = m.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    let svd = m.svd(false, false);
    let condition = svd.singular_values.max() / svd.singular_values.min();
    let kinds = [
        second_derivative_kind(curve, params[0], y, tol)?,
        second_derivative_kind(curve, params[1], y, tol)?,
        second_derivative_kind(curve, params[2], y, tol)?,
    ];
    Ok(TripleNormalPoint {
        params,
        y,
        kinds,
        condition,
    })
}

/// One logged event of a chase along a path of parameter triples,
/// attached to the path segment from node `index` to `index + 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum ChaseEvent {
    /// The census size changed by exactly two.
    Bifurcation { index: usize, delta: i32 },
    /// The (kind1, kind2, kind3) pattern changed without an infinity
    /// passage.
    PatternChange {
        index: usize,
        from: [FootKind; 3],
        to: [FootKind; 3],
    },
    /// The normal-plane determinant changed sign with the intersection
    /// point far outside the curve's scale; all three kinds flip.
    InfinityPassage { index: usize },
}

/// Chase of a parameter-triple path: per-node triple points, censuses, and
/// the events between consecutive nodes.
#[derive(Debug, Clone)]
pub struct ChaseLog {
    pub nodes: Vec<TripleNormalPoint>,
    pub censuses: Vec<usize>,
    pub events: Vec<ChaseEvent>,
}

fn plane_det(curve: &FourierCurve, params: [f64; 3]) -> f64 {
    let u = |t: f64| {
        let c1 = curve.eval(t, 1);
        c1 / c1.norm()
    };
    nalgebra::Matrix3::from_rows(&[
        u(params[0]).transpose(),
        u(params[1]).transpose(),
        u(params[2]).transpose(),
    ])
    .determinant()
}

/// Walks `path` and logs every bifurcation (`|delta N| = 2`), kind-pattern
/// change, and infinity passage. The census at each node comes from
/// [`smooth_normals`]; a jump by more than two between consecutive nodes
/// without an infinity passage means the path skipped events.
pub fn chase_triple(
    curve: &FourierCurve,
    path: &[[f64; 3]],
    tol: &Tolerances,
) -> Result<ChaseLog> {
    if path.len() < 2 {
        return Err(Error::InvalidInput("chase path needs at least 2 nodes".into()));
    }
    let (_, diameter) = curve.centroid_and_diameter(64 * (curve.order() + 1));
    let grid = default_grid(curve.order());
    let mut nodes = Vec::with_capacity(path.len());
    let mut censuses = Vec::with_capacity(path.len());
    for &params in path {
        let node = triple_normal_point(curve, params, tol)?;
        censuses.push(smooth_normals(curve, node.y, grid, tol)?.n());
        nodes.push(node);
    }
    let mut events = Vec::new();
    for i in 0..nodes.len() - 1 {
        let (a, b) = (&nodes[i], &nodes[i + 1]);
        let delta = censuses[i + 1] as i32 - censuses[i] as i32;
        let det_flip =
            plane_det(curve, a.params) * plane_det(curve, b.params) < 0.0;
        let far = a.y.norm().max(b.y.norm()) > 1e6 * diameter;
        if det_flip && far {
            if (0..3).any(|k| a.kinds[k] == b.kinds[k]) {
                return Err(Error::PathTooCoarse(format!(
                    "kinds did not all flip across the infinity passage at segment {i}"
                )));
            }
            events.push(ChaseEvent::InfinityPassage { index: i });
            continue;
        }
        if delta.abs() > 2 {
            return Err(Error::PathTooCoarse(format!(
                "census jumps from {} to {} across segment {i}",
                censuses[i],
                censuses[i + 1]
            )));
        }
        if delta != 0 {
            events.push(ChaseEvent::Bifurcation { index: i, delta });
        }
        if a.kinds != b.kinds {
            events.push(ChaseEvent::PatternChange {
                index: i,
                from: a.kinds,
                to: b.kinds,
            });
        }
    }
    Ok(ChaseLog {
        nodes,
        censuses,
        events,
    })
}

/// A located transverse self-intersection of the focal surface, with the
/// censuses of the four chambers around it.
#[derive(Debug, Clone)]
pub struct FocalSelfIntersection {
    pub point: Vec3,
    /// `(t, s)` coordinates of the two sheets through the point.
    pub sheets: [(f64, f64); 2],
    pub probes: [usize; 4],
}

impl FocalSelfIntersection {
    pub fn base_n(&self) -> usize {
        *self.probes.iter().min().expect("four probes")
    }

    pub fn max_n(&self) -> usize {
        *self.probes.iter().max().expect("four probes")
    }
}

/// Four-chamber law at a transverse sheet crossing: the sorted censuses
/// are `{N, N+2, N+2, N+4}`.
pub fn four_chamber_ok(ns: &[usize; 4]) -> bool {
    let mut s = *ns;
    s.sort_unstable();
    s[1] == s[0] + 2 && s[2] == s[0] + 2 && s[3] == s[0] + 4
}

fn sheet_normal(curve: &FourierCurve, t: f64, tol: &Tolerances) -> Result<Vec3> {
    let h = 1e-6;
    let fa = focal_line(curve, t - h, tol)?;
    let fb = focal_line(curve, t + h, tol)?;
    let dt = (fb.base - fa.base) / (2.0 * h);
    let b = focal_line(curve, t, tol)?.direction;
    let n = dt.cross(&b);
    if n.norm() < 1e-12 {
        return Err(Error::NonGenericCurve(format!(
            "focal sheet tangent degenerate at t = {t:.6}"
        )));
    }
    Ok(n.normalize())
}

/// Finds sample points where two sheets of the focal surface cross
/// transversally, and probes the four adjacent chambers.
///
/// Seeds come from close pairs of mesh points with well-separated curve
/// parameters; each seed is refined by damped least squares on
/// `F(t) + s b(t) = F(t') + s' b(t')`. Accepted points must have residual
/// below `1e-8 * diameter`, transverse sheet normals, and a probe multiset
/// obeying the four-chamber law; candidates whose probes keep landing on
/// non-generic points are dropped.
pub fn find_focal_self_intersections(
    curve: &FourierCurve,
    resolution: usize,
    tol: &Tolerances,
) -> Result<Vec<FocalSelfIntersection>> {
    if resolution < 8 {
        return Err(Error::InvalidInput("resolution must be >= 8".into()));
    }
    let (_, diameter) = curve.centroid_and_diameter(64 * (curve.order() + 1));
    let s_range = 3.0 * diameter;
    let mesh = sample_focal_surface(curve, resolution, s_range, resolution, tol)?;
    let min_dt = TAU / 12.0;

    // Seed pairs: close mesh points on parameter-separated lines, found
    // through a uniform spatial hash.
    let cell = 4.0 * s_range / resolution as f64;
    let mut hash: std::collections::HashMap<(i64, i64, i64), Vec<(usize, usize)>> =
        std::collections::HashMap::new();
    let key = |p: Vec3| {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    };
    for (i, row) in mesh.points.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            hash.entry(key(p)).or_default().push((i, j));
        }
    }
    let mut seeds: Vec<[f64; 4]> = Vec::new();
    for (i, row) in mesh.points.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            let (kx, ky, kz) = key(p);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        let Some(bucket) = hash.get(&(kx + dx, ky + dy, kz + dz)) else {
                            continue;
                        };
                        for &(i2, j2) in bucket {
                            if i2 <= i {
                                continue;
                            }
                            let dt = (mesh.ts[i] - mesh.ts[i2]).rem_euclid(TAU);
                            if dt.min(TAU - dt) < min_dt {
                                continue;
                            }
                            if (p - mesh.points[i2][j2]).norm() < cell {
                                seeds.push([mesh.ts[i], mesh.ss[j], mesh.ts[i2], mesh.ss[j2]]);
                            }
                        }
                    }
                }
            }
        }
    }

    let residual = |x: &[f64; 4]| -> Result<Vec3> {
        let la = focal_line(curve, x[0], tol)?;
        let lb = focal_line(curve, x[2], tol)?;
        Ok(la.point_at(x[1]) - lb.point_at(x[3]))
    };
    let accept = 1e-8 * diameter;
    let refined: Vec<Option<([f64; 4], Vec3)>> = seeds
        .par_iter()
        .map(|seed| {
            let mut x = *seed;
            let mut lambda = 1e-3;
            let mut r = residual(&x).ok()?;
            for _ in 0..60 {
                if r.norm() < 0.5 * accept {
                    break;
                }
                let h = 1e-7;
                let mut jac = nalgebra::SMatrix::<f64, 3, 4>::zeros();
                for k in 0..4 {
                    let mut xp = x;
                    xp[k] += h;
                    let rp = residual(&xp).ok()?;
                    jac.set_column(k, &((rp - r) / h));
                }
                let jt = jac.transpose();
                let lhs = jt * jac + lambda * nalgebra::SMatrix::<f64, 4, 4>::identity();
                let step = lhs.lu().solve(&(-jt * r))?;
                let mut xn = x;
                for k in 0..4 {
                    xn[k] += step[k];
                }
                match residual(&xn) {
                    Ok(rn) if rn.norm() < r.norm() => {
                        x = xn;
                        r = rn;
                        lambda = (lambda * 0.3).max(1e-12);
                    }
                    _ => lambda *= 8.0,
                }
            }
            let dt = (x[0] - x[2]).rem_euclid(TAU);
            if r.norm() < accept
                && dt.min(TAU - dt) >= 0.5 * min_dt
                && x[1].abs() <= 1.5 * s_range
                && x[3].abs() <= 1.5 * s_range
            {
                Some((x, focal_line(curve, x[0], tol).ok()?.point_at(x[1])))
            } else {
                None
            }
        })
        .collect();

    // The solution locus is a curve; keep samples spaced along it.
    let mut accepted: Vec<([f64; 4], Vec3)> = Vec::new();
    for item in refined.into_iter().flatten() {
        if accepted.iter().all(|(_, p)| (p - item.1).norm() > 1e-2 * diameter) {
            accepted.push(item);
        }
    }

    let grid = default_grid(curve.order());
    let mut out = Vec::new();
    'candidate: for (x, point) in accepted {
        let n1 = match sheet_normal(curve, x[0], tol) {
            Ok(n) => n,
            Err(_) => continue,
        };
        let n2 = match sheet_normal(curve, x[2], tol) {
            Ok(n) => n,
            Err(_) => continue,
        };
        if n1.cross(&n2).norm() < 1e-4 {
            continue;
        }
        let mut delta = 1e-4 * diameter;
        for _ in 0..4 {
            let mut probes = [0usize; 4];
            let mut ok = true;
            for (k, (s1, s2)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
                .into_iter()
                .enumerate()
            {
                match smooth_normals(curve, point + delta * (s1 * n1 + s2 * n2), grid, tol) {
                    Ok(c) => probes[k] = c.n(),
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && four_chamber_ok(&probes) {
                out.push(FocalSelfIntersection {
                    point,
                    sheets: [(x[0], x[1]), (x[2], x[3])],
                    probes,
                });
                continue 'candidate;
            }
            delta /= 8.0;
        }
    }
    out.sort_by(|a, b| {
        a.sheets[0]
            .0
            .partial_cmp(&b.sheets[0].0)
            .expect("finite parameters")
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::sqd::oracle;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn circle_centers_collapse_to_origin() {
        let c = generate::circle(1.0);
        for t in [0.0, 1.0, 2.5, 4.0] {
            assert!(osculating_center(&c, t, &tol()).unwrap().norm() < 1e-12);
        }
        let line = focal_line(&c, 0.0, &tol()).unwrap();
        assert!(line.base.norm() < 1e-12);
        assert!((line.direction - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-12);
        let line2 = focal_line(&c, std::f64::consts::FRAC_PI_3, &tol()).unwrap();
        assert!(line2.base.norm() < 1e-12);
        assert!((line2.direction.cross(&line.direction)).norm() < 1e-12);
    }

    #[test]
    fn big_circle_center_still_origin() {
        let c = generate::circle(2.0);
        let y = osculating_center(&c, std::f64::consts::FRAC_PI_2, &tol()).unwrap();
        assert!(y.norm() < 1e-12);
    }

    #[test]
    fn planar_ellipse_evolute() {
        let c = generate::ellipse(2.0, 1.0, 0.0);
        let y = osculating_center(&c, 0.0, &tol()).unwrap();
        assert!((y - Vec3::new(1.5, 0.0, 0.0)).norm() < 1e-12, "{y:?}");
    }

    #[test]
    fn circle_mesh_sits_on_the_axis() {
        let mesh = sample_focal_surface(&generate::circle(1.0), 16, 2.0, 5, &tol()).unwrap();
        for row in &mesh.points {
            for p in row {
                assert!(p.x.abs() < 1e-12 && p.y.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn planar_ellipse_mesh_sweeps_the_evolute() {
        let (a, b) = (2.0, 1.0);
        let mesh = sample_focal_surface(&generate::ellipse(a, b, 0.0), 24, 1.0, 3, &tol()).unwrap();
        for (i, row) in mesh.points.iter().enumerate() {
            let t = mesh.ts[i];
            let expected = Vec3::new(
                (a * a - b * b) / a * t.cos().powi(3),
                -(a * a - b * b) / b * t.sin().powi(3),
                0.0,
            );
            for (j, p) in row.iter().enumerate() {
                let q = Vec3::new(p.x, p.y, 0.0);
                assert!((q - expected).norm() < 1e-9, "t slice {t}");
                assert!((p.z - mesh.ss[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_fourier_mesh_is_bounded() {
        let c = generate::random_fourier(2, 11, &tol()).unwrap();
        let mesh = sample_focal_surface(&c, 32, 3.0, 7, &tol()).unwrap();
        for row in &mesh.points {
            for p in row {
                assert!(p.norm().is_finite());
            }
        }
    }

    #[test]
    fn circle_triples_are_singular() {
        let c = generate::circle(1.0);
        let err = triple_normal_point(&c, [0.3, 1.7, 4.0], &tol()).unwrap_err();
        assert!(matches!(err, Error::SingularSystem), "{err}");
    }

    #[test]
    fn coincident_parameters_are_rejected() {
        let c = generate::ellipse(2.0, 1.0, 0.1);
        let err = triple_normal_point(&c, [0.5, 0.5, 2.0], &tol()).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)), "{err}");
    }

    #[test]
    fn perturbed_ellipse_triples_have_small_residuals() {
        let c = generate::perturbed_ellipse(2.0, 1.0, 0.1, 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut tested = 0;
        while tested < 20 {
            let mut ts: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.0..TAU));
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if (ts[1] - ts[0]).min(ts[2] - ts[1]).min(TAU - ts[2] + ts[0]) < 0.2 {
                continue;
            }
            let Ok(tp) = triple_normal_point(&c, ts, &tol()) else {
                continue;
            };
            for &t in &tp.params {
                let r = (c.eval(t, 0) - tp.y).dot(&c.eval(t, 1)).abs()
                    / ((c.eval(t, 0) - tp.y).norm() * c.eval(t, 1).norm());
                assert!(r < 1e-9, "residual {r}");
            }
            tested += 1;
        }
    }

    #[test]
    fn constant_path_logs_nothing() {
        let c = generate::ellipse(2.0, 1.0, 0.1);
        let node = [0.4, 2.2, 4.4];
        let log = chase_triple(&c, &[node, node, node], &tol()).unwrap();
        assert!(log.events.is_empty());
        assert_eq!(log.censuses.len(), 3);
    }

    #[test]
    fn theorem_one_chase_logs_an_event() {
        // Rotating (a, b, c) to (b, c, a) forces the kind pattern
        // (Max, Max, Min) to become (Max, Min, Max), so some event fires
        // along the way.
        let c = generate::perturbed_ellipse(2.0, 1.0, 0.1, 0.1);
        let start = [0.4, 2.2, 4.4];
        let target = [2.2, 4.4, 0.4 + TAU];
        let steps = 600;
        let path: Vec<[f64; 3]> = (0..=steps)
            .map(|k| {
                let f = k as f64 / steps as f64;
                std::array::from_fn(|i| start[i] + f * (target[i] - start[i]))
            })
            .collect();
        match chase_triple(&c, &path, &tol()) {
            Ok(log) => {
                let k0 = log.nodes[0].kinds;
                assert_eq!(log.nodes[steps].kinds, [k0[1], k0[2], k0[0]]);
                assert_ne!(log.nodes[steps].kinds, k0);
                assert!(log
                    .events
                    .iter()
                    .any(|e| matches!(e, ChaseEvent::PatternChange { .. })));
            }
            Err(Error::PathTooCoarse(m)) => panic!("refine the test path: {m}"),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn circle_has_no_accepted_self_intersection() {
        let out = find_focal_self_intersections(&generate::circle(1.0), 24, &tol()).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn perturbed_ellipse_self_intersections_obey_four_chamber_law() {
        let c = generate::perturbed_ellipse(2.0, 1.0, 0.1, 0.1);
        let out = find_focal_self_intersections(&c, 48, &tol()).unwrap();
        assert!(!out.is_empty());
        for hit in &out {
            assert!(four_chamber_ok(&hit.probes), "{:?}", hit.probes);
            assert!(hit.max_n() == hit.base_n() + 4);
        }
    }

    #[test]
    fn trefoil_self_intersection_has_a_rich_chamber() {
        let out =
            find_focal_self_intersections(&generate::fourier_trefoil(), 48, &tol()).unwrap();
        assert!(!out.is_empty());
        let mut best = 0;
        for hit in &out {
            assert!(four_chamber_ok(&hit.probes), "{:?}", hit.probes);
            // A knot admits no point with two normals, so every chamber
            // around a knot holds at least four.
            assert!(hit.base_n() >= 4, "{:?}", hit.probes);
            best = best.max(hit.max_n());
        }
        assert!(best >= 8, "max chamber census {best}");
    }

    #[test]
    fn focal_crossing_changes_census_by_two() {
        let c = generate::ellipse(2.0, 1.0, 0.1);
        let t = tol();
        let grid = default_grid(c.order());
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut tested = 0;
        while tested < 10 {
            let tt = rng.gen_range(0.0..TAU);
            let Ok(line) = focal_line(&c, tt, &t) else {
                continue;
            };
            let s = rng.gen_range(0.5..1.5);
            let p = line.point_at(s);
            let n1 = sheet_normal(&c, tt, &t).unwrap();
            let step = 1e-3;
            let (a, b) = (p + step * n1, p - step * n1);
            let (Ok(ca), Ok(cb)) = (smooth_normals(&c, a, grid, &t), smooth_normals(&c, b, grid, &t))
            else {
                continue;
            };
            // The straddle is only conclusive when no other sheet passes
            // between the probes; skip ambiguous draws.
            if (ca.n() as i32 - cb.n() as i32).abs() == 2 {
                tested += 1;
            } else if ca.n() == cb.n() {
                continue;
            } else {
                panic!("census jumped by {} across one sheet", ca.n() as i32 - cb.n() as i32);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn chamber_constancy_off_the_focal_surface(seed in 0u64..1 << 48) {
            let c = generate::ellipse(2.0, 1.0, 0.1);
            let t = tol();
            let grid = default_grid(c.order());
            let mesh = sample_focal_surface(&c, 96, 6.0, 33, &t).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dist_to_mesh = |p: Vec3| -> f64 {
                let mut d = f64::MAX;
                for row in &mesh.points {
                    for &q in row {
                        d = d.min((p - q).norm());
                    }
                }
                d
            };
            let mut tested = 0;
            while tested < 2 {
                let a = Vec3::new(
                    rng.gen_range(-2.5..2.5),
                    rng.gen_range(-2.5..2.5),
                    rng.gen_range(-2.5..2.5),
                );
                let b = a + Vec3::new(
                    rng.gen_range(-0.3..0.3),
                    rng.gen_range(-0.3..0.3),
                    rng.gen_range(-0.3..0.3),
                );
                let margin = 0.25;
                let clear = (0..=8).all(|k| {
                    let f = k as f64 / 8.0;
                    dist_to_mesh(a + f * (b - a)) > margin
                });
                if !clear {
                    continue;
                }
                let (Ok(ca), Ok(cb)) =
                    (smooth_normals(&c, a, grid, &t), smooth_normals(&c, b, grid, &t))
                else {
                    continue;
                };
                prop_assert_eq!(ca.n(), cb.n());
                tested += 1;
            }
        }

        #[test]
        fn triple_point_census_never_contradicts_oracle(seed in 0u64..1 << 48) {
            let c = generate::ellipse(2.0, 1.0, 0.1);
            let t = tol();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ts = [
                rng.gen_range(0.0..2.0),
                rng.gen_range(2.1..4.1),
                rng.gen_range(4.2..6.2),
            ];
            if let Ok(tp) = triple_normal_point(&c, ts, &t) {
                let grid = default_grid(c.order());
                if let Ok(census) = smooth_normals(&c, tp.y, grid, &t) {
                    let brute = oracle::smooth_scan(&c, tp.y, 100_000);
                    // Sign-change isolation needs a node between roots; a
                    // triple point close to the focal surface has a nearly
                    // merged foot pair below that resolution. Skip those.
                    let mut params: Vec<f64> = brute.iter().map(|f| f.1).collect();
                    params.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let min_gap = params
                        .windows(2)
                        .map(|w| w[1] - w[0])
                        .chain(std::iter::once(TAU - params.last().unwrap() + params[0]))
                        .fold(f64::MAX, f64::min);
                    if min_gap > 2.0 * TAU / grid as f64 {
                        prop_assert_eq!(census.n(), brute.len());
                    }
                }
            }
        }
    }
}
