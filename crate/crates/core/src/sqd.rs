//! Critical points of the squared-distance function and the normal census.
//!
//! For a base point `y` and a closed curve `C`, the feet of normals from `y`
//! are the local maxima and minima of `x -> |x - y|^2` restricted to `C`.
//! On a closed curve they alternate, so the census carries as much structure
//! as a count: even size, equally many maxima and minima, cyclic Max/Min
//! alternation, and (for polylines) maxima only at vertices.

use crate::curve::{FourierCurve, PolyCurve};
use crate::error::{Error, Result};
use crate::tol::{PredicateMode, Tolerances};
use crate::Vec3;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};

pub const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Kind of critical point of the squared-distance function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FootKind {
    Max,
    Min,
}

impl FootKind {
    pub fn flip(self) -> FootKind {
        match self {
            FootKind::Max => FootKind::Min,
            FootKind::Min => FootKind::Max,
        }
    }
}

/// Where on the curve a foot sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FootLocation {
    /// Polyline vertex index.
    Vertex(usize),
    /// Strictly interior point of polyline edge `index`, at barycentric `s`.
    Edge { index: usize, s: f64 },
    /// Smooth-curve parameter in `[0, 2pi)`.
    Param(f64),
}

impl FootLocation {
    /// Cyclic sort key along the curve: vertices at integers, edge feet in
    /// between, smooth parameters as themselves.
    fn position(&self) -> f64 {
        match *self {
            FootLocation::Vertex(i) => i as f64,
            FootLocation::Edge { index, s } => index as f64 + s,
            FootLocation::Param(t) => t,
        }
    }
}

/// One foot of a normal from `y`.
#[derive(Debug, Clone)]
pub struct NormalFoot {
    pub kind: FootKind,
    pub location: FootLocation,
    pub point: Vec3,
    pub sq_dist: f64,
}

/// All normals from one base point, feet in cyclic curve order.
#[derive(Debug, Clone)]
pub struct NormalCensus {
    pub y: Vec3,
    pub feet: Vec<NormalFoot>,
}

impl NormalCensus {
    pub fn n(&self) -> usize {
        self.feet.len()
    }

    pub fn max_count(&self) -> usize {
        self.feet.iter().filter(|f| f.kind == FootKind::Max).count()
    }

    pub fn min_count(&self) -> usize {
        self.feet.iter().filter(|f| f.kind == FootKind::Min).count()
    }
}

/// Structural laws every census must satisfy: n >= 2 and even, equally many
/// maxima and minima, cyclic alternation. Returns the first violation.
pub fn census_check(census: &NormalCensus) -> std::result::Result<(), String> {
    let n = census.n();
    if n < 2 {
        return Err(format!("n = {n}; a closed bounded curve admits at least 2 normals"));
    }
    if n % 2 != 0 {
        return Err(format!("n = {n} is odd"));
    }
    let (maxima, minima) = (census.max_count(), census.min_count());
    if maxima != minima {
        return Err(format!("{maxima} maxima vs {minima} minima"));
    }
    for i in 0..n {
        let a = census.feet[i].kind;
        let b = census.feet[(i + 1) % n].kind;
        if a == b {
            return Err(format!("feet {i} and {} are both {a:?}", (i + 1) % n));
        }
    }
    Ok(())
}

/// Default sample grid for smooth-curve root isolation.
pub fn default_grid(order: usize) -> usize {
    64 * (order + 1)
}

/// Normal census of a polyline.
///
/// A vertex `v` with unit directions `e1` (toward the next vertex) and `e2`
/// (toward the previous) is a Max iff `(v-y).e1 < 0` and `(v-y).e2 < 0`, a
/// Min iff both are positive, and not critical otherwise. Edge feet are the
/// orthogonal projections of `y` onto edge lines, always minima, and count
/// only when strictly interior.
///
/// Fails with [`Error::NonGenericPoint`] when a sign predicate is within
/// `eps_geom` (relative) of zero, an edge foot is within `eps_geom` of an
/// endpoint, or `y` lies on the curve: such `y` sit on the bifurcation set
/// and the caller must perturb them. Under [`PredicateMode::Exact`] the
/// predicates are evaluated in rational arithmetic and only exact zeroes
/// are rejected.
pub fn pl_normals(curve: &PolyCurve, y: Vec3, tol: &Tolerances) -> Result<NormalCensus> {
    if !(y.x.is_finite() && y.y.is_finite() && y.z.is_finite()) {
        return Err(Error::InvalidInput("base point must be finite".into()));
    }
    let v = curve.vertex_count();
    let diameter = curve.diameter();
    let mut feet: Vec<NormalFoot> = Vec::new();

    for i in 0..v {
        let p = curve.vertex(i);
        let r = p - y;
        let dist = r.norm();
        if dist < tol.eps_geom * diameter {
            return Err(Error::NonGenericPoint(format!(
                "base point coincides with vertex {i}"
            )));
        }
        let signs = match tol.predicate_mode {
            PredicateMode::Float => {
                let (e1, e2) = curve.away_dirs(i);
                let d1 = r.dot(&e1);
                let d2 = r.dot(&e2);
                let margin = tol.eps_geom * dist;
                if d1.abs() <= margin || d2.abs() <= margin {
                    return Err(Error::NonGenericPoint(format!(
                        "vertex {i}: side predicate {:.3e}/{:.3e} within eps of zero",
                        d1, d2
                    )));
                }
                (d1.signum() as i8, d2.signum() as i8)
            }
            PredicateMode::Exact => {
                let s1 = exact_dot_sign(r, curve.vertex(i + 1) - p);
                let s2 = exact_dot_sign(r, curve.vertex(i + v - 1) - p);
                if s1 == 0 || s2 == 0 {
                    return Err(Error::NonGenericPoint(format!(
                        "vertex {i}: side predicate is exactly zero"
                    )));
                }
                (s1, s2)
            }
        };
        let kind = match signs {
            (-1, -1) => Some(FootKind::Max),
            (1, 1) => Some(FootKind::Min),
            _ => None,
        };
        if let Some(kind) = kind {
            feet.push(NormalFoot {
                kind,
                location: FootLocation::Vertex(i),
                point: p,
                sq_dist: dist * dist,
            });
        }
    }

    for i in 0..v {
        let (a, b) = curve.edge(i);
        let u = b - a;
        let s = match tol.predicate_mode {
            PredicateMode::Float => {
                let s = (y - a).dot(&u) / u.norm_squared();
                if !(-0.5..1.5).contains(&s) {
                    continue;
                }
                if (s - 0.0).abs() <= tol.eps_geom || (1.0 - s).abs() <= tol.eps_geom {
                    return Err(Error::NonGenericPoint(format!(
                        "edge {i}: foot parameter {s:.3e} within eps of an endpoint"
                    )));
                }
                if !(0.0..=1.0).contains(&s) {
                    continue;
                }
                s
            }
            PredicateMode::Exact => {
                let num = exact_dot(y - a, u);
                let den = exact_dot(u, u);
                let s = num / den;
                if s.is_zero() || s == BigRational::from_float(1.0).unwrap() {
                    return Err(Error::NonGenericPoint(format!(
                        "edge {i}: foot exactly at an endpoint"
                    )));
                }
                if s.is_negative() || s > BigRational::from_float(1.0).unwrap() {
                    continue;
                }
                s.to_f64().expect("barycentric coordinate in (0,1)")
            }
        };
        let point = a + s * u;
        let sq_dist = (point - y).norm_squared();
        if sq_dist < (tol.eps_geom * diameter).powi(2) {
            return Err(Error::NonGenericPoint(format!(
                "base point lies on edge {i}"
            )));
        }
        feet.push(NormalFoot {
            kind: FootKind::Min,
            location: FootLocation::Edge { index: i, s },
            point,
            sq_dist,
        });
    }

    feet.sort_by(|a, b| {
        a.location
            .position()
            .partial_cmp(&b.location.position())
            .expect("finite positions")
    });
    let census = NormalCensus { y, feet };
    census_check(&census)
        .map_err(|msg| Error::NonGenericPoint(format!("census laws violated: {msg}")))?;
    Ok(census)
}

/// Normal census of a smooth curve.
///
/// The derivative `f'(t) = 2 (c(t)-y) . c'(t)` is sampled on `grid` nodes
/// per period (at least `16 (order+1)`, default [`default_grid`]), roots are
/// isolated by sign changes and refined by bisection to `eps_root`, and each
/// root is classified by the sign of `f''`. Second derivatives within
/// `eps_geom` (relative) of zero mean `y` lies on the bifurcation set and
/// give [`Error::NonGenericPoint`].
pub fn smooth_normals(
    curve: &FourierCurve,
    y: Vec3,
    grid: usize,
    tol: &Tolerances,
) -> Result<NormalCensus> {
    if !(y.x.is_finite() && y.y.is_finite() && y.z.is_finite()) {
        return Err(Error::InvalidInput("base point must be finite".into()));
    }
    let min_grid = 16 * (curve.order() + 1);
    if grid < min_grid {
        return Err(Error::InvalidInput(format!(
            "grid {grid} below the root-isolation minimum {min_grid}"
        )));
    }
    // Half of f': roots and signs are unaffected.
    let g = |t: f64| (curve.eval(t, 0) - y).dot(&curve.eval(t, 1));

    let nodes: Vec<f64> = (0..grid).map(|j| TAU * j as f64 / grid as f64).collect();
    let values: Vec<f64> = nodes.iter().map(|&t| g(t)).collect();
    let base = curve.eval(0.0, 0);
    let mut extent: f64 = 0.0;
    let mut nearest = f64::INFINITY;
    for &t in &nodes {
        let p = curve.eval(t, 0);
        extent = extent.max((p - base).norm());
        nearest = nearest.min((p - y).norm());
    }
    let scale = extent.max(1e-300);
    if nearest < tol.eps_geom * scale {
        return Err(Error::NonGenericPoint("base point lies on the curve".into()));
    }

    let mut roots: Vec<f64> = Vec::new();
    for j in 0..grid {
        let ga = values[j];
        let gb = values[(j + 1) % grid];
        // A node can be a root outright (symmetric inputs do this); record
        // it once and skip the adjacent intervals.
        if ga == 0.0 {
            roots.push(nodes[j]);
            continue;
        }
        if gb == 0.0 || ga * gb > 0.0 {
            continue;
        }
        let (mut a, mut b) = (nodes[j], if j + 1 == grid { TAU } else { nodes[j + 1] });
        let mut ga = ga;
        while b - a > tol.eps_root {
            let m = 0.5 * (a + b);
            let gm = g(m);
            if gm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if ga * gm < 0.0 {
                b = m;
            } else {
                a = m;
                ga = gm;
            }
        }
        roots.push((0.5 * (a + b)).rem_euclid(TAU));
    }

    let mut feet: Vec<NormalFoot> = Vec::new();
    for t in roots {
        let c0 = curve.eval(t, 0);
        let c1 = curve.eval(t, 1);
        let c2 = curve.eval(t, 2);
        // Half of f'': |c'|^2 + (c-y).c''.
        let h = c1.norm_squared() + (c0 - y).dot(&c2);
        let h_scale = c1.norm_squared() + (c0 - y).norm() * c2.norm();
        if h.abs() < tol.eps_geom * h_scale {
            return Err(Error::NonGenericPoint(format!(
                "degenerate critical point at t = {t:.6}: second derivative within eps of zero"
            )));
        }
        let sq_dist = (c0 - y).norm_squared();
        if sq_dist < (tol.eps_geom * scale).powi(2) {
            return Err(Error::NonGenericPoint("base point lies on the curve".into()));
        }
        feet.push(NormalFoot {
            kind: if h > 0.0 { FootKind::Min } else { FootKind::Max },
            location: FootLocation::Param(t),
            point: c0,
            sq_dist,
        });
    }

    feet.sort_by(|a, b| {
        a.location
            .position()
            .partial_cmp(&b.location.position())
            .expect("finite parameters")
    });
    let census = NormalCensus { y, feet };
    census_check(&census)
        .map_err(|msg| Error::NonGenericPoint(format!("census laws violated: {msg}")))?;
    Ok(census)
}

fn exact_dot(u: Vec3, w: Vec3) -> BigRational {
    let r = |x: f64| BigRational::from_float(x).expect("finite coordinate");
    r(u.x) * r(w.x) + r(u.y) * r(w.y) + r(u.z) * r(w.z)
}

fn exact_dot_sign(u: Vec3, w: Vec3) -> i8 {
    let d = exact_dot(u, w);
    if d.is_zero() {
        0
    } else if d.is_positive() {
        1
    } else {
        -1
    }
}

pub mod oracle {
    //! Brute-force scans used as independent references in tests.

    use super::*;

    /// Dense subdivision scan of the squared distance along a polyline.
    /// Vertices are sample nodes; interior extrema are refined by exact
    /// projection, vertex extrema are kept at the vertex.
    pub fn pl_scan(curve: &PolyCurve, y: Vec3, total_samples: usize) -> Vec<(FootKind, Vec3)> {
        let v = curve.vertex_count();
        let perimeter = curve.perimeter();
        // (sample point, Some(vertex index) when the sample is a vertex, edge index)
        let mut samples: Vec<(Vec3, Option<usize>, usize, f64)> = Vec::new();
        for i in 0..v {
            let (a, b) = curve.edge(i);
            let len = (b - a).norm();
            let k = ((total_samples as f64 * len / perimeter).round() as usize).max(4);
            for j in 0..k {
                let s = j as f64 / k as f64;
                let vertex = (j == 0).then_some(i);
                samples.push((a + s * (b - a), vertex, i, s));
            }
        }
        let n = samples.len();
        let d: Vec<f64> = samples.iter().map(|(p, ..)| (p - y).norm_squared()).collect();
        let mut out = Vec::new();
        for j in 0..n {
            let (prev, next) = (d[(j + n - 1) % n], d[(j + 1) % n]);
            let kind = if d[j] > prev && d[j] > next {
                FootKind::Max
            } else if d[j] < prev && d[j] < next {
                FootKind::Min
            } else {
                continue;
            };
            let (p, vertex, edge, _) = samples[j];
            let point = match vertex {
                Some(_) => p,
                None => {
                    let (a, b) = curve.edge(edge);
                    let u = b - a;
                    let s = (y - a).dot(&u) / u.norm_squared();
                    a + s * u
                }
            };
            out.push((kind, point));
        }
        out
    }

    /// Dense scan of the squared distance on a smooth curve; each extremum
    /// is refined by ternary search on its bracketing interval.
    pub fn smooth_scan(curve: &FourierCurve, y: Vec3, samples: usize) -> Vec<(FootKind, f64)> {
        let f = |t: f64| (curve.eval(t, 0) - y).norm_squared();
        let d: Vec<f64> = (0..samples)
            .map(|j| f(TAU * j as f64 / samples as f64))
            .collect();
        let mut out = Vec::new();
        for j in 0..samples {
            let (prev, next) = (d[(j + samples - 1) % samples], d[(j + 1) % samples]);
            let kind = if d[j] > prev && d[j] > next {
                FootKind::Max
            } else if d[j] < prev && d[j] < next {
                FootKind::Min
            } else {
                continue;
            };
            let step = TAU / samples as f64;
            let mut lo = TAU * j as f64 / samples as f64 - step;
            let mut hi = lo + 2.0 * step;
            for _ in 0..80 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                let keep_low = match kind {
                    FootKind::Max => f(m1) > f(m2),
                    FootKind::Min => f(m1) < f(m2),
                };
                if keep_low {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            out.push((kind, (0.5 * (lo + hi)).rem_euclid(TAU)));
        }
        out.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        out
    }
}
