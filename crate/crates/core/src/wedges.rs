//! The bifurcation set of a polyline: wedges, triple points, chamber
//! probes, crossing scans, and the superscribed sphere.
//!
//! A vertex `v` with away directions `e1`, `e2` is a maximum of the squared
//! distance from `y` exactly when `(y-v).e1 > 0` and `(y-v).e2 > 0`. The
//! boundary of that region is a pair of half-planes (the wedge faces), and
//! the union of all faces is where the census changes. Everything in this
//! module is a consequence: crossing one face changes `N` by exactly 2,
//! meeting three faces in general position gives 8 chambers with counts in
//! the 1-3-3-1 pattern `{N, N+2, N+2, N+2, N+4, N+4, N+4, N+6}`.

use crate::curve::PolyCurve;
use crate::error::{Error, Result};
use crate::sqd::{pl_normals, FootKind};
use crate::tol::Tolerances;
use crate::Vec3;
use rayon::prelude::*;

/// Which of a wedge's two faces: `First` is the plane normal to `e1`
/// (constrained to the `e2 >= 0` side), `Second` the plane normal to `e2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceId {
    First,
    Second,
}

impl FaceId {
    pub const BOTH: [FaceId; 2] = [FaceId::First, FaceId::Second];
}

/// Wedge of a polyline vertex: the two bounded half-planes
/// `{(x-v).e1 = 0, (x-v).e2 >= 0}` and `{(x-v).e2 = 0, (x-v).e1 >= 0}`,
/// meeting along the ridge through `v` in direction `e1 x e2`.
#[derive(Debug, Clone)]
pub struct Wedge {
    pub vertex: usize,
    pub apex: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
}

impl Wedge {
    /// Unit ridge direction.
    pub fn ridge_dir(&self) -> Vec3 {
        self.e1.cross(&self.e2).normalize()
    }

    /// Unit normal of the face's carrier plane.
    pub fn face_normal(&self, face: FaceId) -> Vec3 {
        match face {
            FaceId::First => self.e1,
            FaceId::Second => self.e2,
        }
    }

    /// Direction of the face's half-plane constraint.
    pub fn face_constraint(&self, face: FaceId) -> Vec3 {
        match face {
            FaceId::First => self.e2,
            FaceId::Second => self.e1,
        }
    }

    /// Euclidean distance from `p` to the (unbounded) face, honoring the
    /// half-plane constraint: plane distance where the projection lands in
    /// the half-plane, ridge-line distance otherwise.
    pub fn face_distance(&self, face: FaceId, p: Vec3) -> f64 {
        let normal = self.face_normal(face);
        let constraint = self.face_constraint(face);
        let d = p - self.apex;
        let off = d.dot(&normal);
        let proj = d - off * normal;
        if proj.dot(&constraint) >= 0.0 {
            off.abs()
        } else {
            let r = self.ridge_dir();
            (d - d.dot(&r) * r).norm()
        }
    }
}

/// Side classification of a point against one wedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// The wedge's vertex is a Max of the squared distance from here.
    MaxSide,
    Outside,
    OnFace(FaceId),
}

/// Builds the wedge of vertex `i`. Fails with [`Error::CollinearEdges`]
/// when the adjacent edges are collinear (no ridge direction).
pub fn wedge_of_vertex(curve: &PolyCurve, i: usize, tol: &Tolerances) -> Result<Wedge> {
    let (e1, e2) = curve.away_dirs(i);
    if e1.cross(&e2).norm() < tol.eps_geom {
        return Err(Error::CollinearEdges { vertex: i });
    }
    Ok(Wedge {
        vertex: i,
        apex: curve.vertex(i),
        e1,
        e2,
    })
}

/// Classifies `y` against the wedge, with `eps_geom`-relative margins for
/// the face cases.
pub fn membership(w: &Wedge, y: Vec3, tol: &Tolerances) -> Membership {
    let d = y - w.apex;
    let d1 = d.dot(&w.e1);
    let d2 = d.dot(&w.e2);
    let margin = tol.eps_geom * d.norm();
    if d1.abs() <= margin && d2 >= -margin {
        return Membership::OnFace(FaceId::First);
    }
    if d2.abs() <= margin && d1 >= -margin {
        return Membership::OnFace(FaceId::Second);
    }
    if d1 > margin && d2 > margin {
        return Membership::MaxSide;
    }
    Membership::Outside
}

/// One chamber probe: the probed point and its census size.
#[derive(Debug, Clone, Copy)]
pub struct ProbeSample {
    pub point: Vec3,
    pub n: usize,
}

/// A point on faces of three wedges from distinct vertices, with its
/// 8-chamber probe.
#[derive(Debug, Clone)]
pub struct TriplePoint {
    pub point: Vec3,
    /// The three (vertex, face) pairs whose faces meet here, vertex-sorted.
    pub faces: [(usize, FaceId); 3],
    /// Probe samples indexed by sign pattern: bit `k` of the index set
    /// means the `+` side of face `k`'s plane.
    pub probes: [ProbeSample; 8],
    pub delta: f64,
}

impl TriplePoint {
    pub fn base_n(&self) -> usize {
        self.probes.iter().map(|p| p.n).min().expect("8 probes")
    }

    pub fn max_n(&self) -> usize {
        self.probes.iter().map(|p| p.n).max().expect("8 probes")
    }
}

/// Checks the 1-3-3-1 chamber pattern `{N, N+2 x3, N+4 x3, N+6}`.
pub fn probe_multiset_ok(ns: &[usize; 8]) -> bool {
    let mut sorted = *ns;
    sorted.sort_unstable();
    let base = sorted[0];
    sorted
        == [
            base,
            base + 2,
            base + 2,
            base + 2,
            base + 4,
            base + 4,
            base + 4,
            base + 6,
        ]
}

/// Result of the triple enumeration, with bookkeeping on skipped systems.
#[derive(Debug, Clone, Default)]
pub struct TripleScan {
    pub points: Vec<TriplePoint>,
    /// Near-singular 3x3 systems skipped.
    pub singular_skipped: usize,
    /// Solutions discarded because they miss a face's half-plane.
    pub exterior_rejected: usize,
    /// Candidates dropped because no probe delta produced a clean pattern.
    pub probe_failed: usize,
}

/// Enumerates all triple intersections of wedge faces.
///
/// All `C(v,3)` vertex triples and the 8 face choices per triple give 3x3
/// linear systems; solutions are kept when strictly interior to all three
/// half-plane constraints (margin `eps_geom * diameter`), deduplicated at
/// `1e-7 * diameter`, and equipped with chamber probes. A solution within
/// eps of a face boundary is [`Error::NonGenericCurve`]: perturb the curve.
pub fn triple_intersections(curve: &PolyCurve, tol: &Tolerances) -> Result<TripleScan> {
    let report = curve.validate(tol);
    if !report.is_generic() {
        return Err(Error::NonGenericCurve(report.summary()));
    }
    let v = curve.vertex_count();
    let diameter = curve.diameter();
    let margin = tol.eps_geom * diameter;
    let wedges: Vec<Wedge> = (0..v)
        .map(|i| wedge_of_vertex(curve, i, tol))
        .collect::<Result<_>>()?;

    let mut triples = Vec::new();
    for i in 0..v {
        for j in i + 1..v {
            for k in j + 1..v {
                triples.push((i, j, k));
            }
        }
    }

    enum TripleOutcome {
        Candidates(Vec<(Vec3, [(usize, FaceId); 3])>),
        Boundary(String),
    }

    let outcomes: Vec<(TripleOutcome, usize, usize)> = triples
        .par_iter()
        .map(|&(i, j, k)| {
            let mut candidates = Vec::new();
            let mut singular = 0usize;
            let mut exterior = 0usize;
            for combo in 0..8u8 {
                let faces = [
                    (i, FaceId::BOTH[(combo & 1) as usize]),
                    (j, FaceId::BOTH[((combo >> 1) & 1) as usize]),
                    (k, FaceId::BOTH[((combo >> 2) & 1) as usize]),
                ];
                let rows: Vec<(Vec3, Vec3, Vec3)> = faces
                    .iter()
                    .map(|&(idx, f)| {
                        let w = &wedges[idx];
                        (w.face_normal(f), w.face_constraint(f), w.apex)
                    })
                    .collect();
                let a = nalgebra::Matrix3::from_rows(&[
                    rows[0].0.transpose(),
                    rows[1].0.transpose(),
                    rows[2].0.transpose(),
                ]);
                let b = Vec3::new(
                    rows[0].0.dot(&rows[0].2),
                    rows[1].0.dot(&rows[1].2),
                    rows[2].0.dot(&rows[2].2),
                );
                // Rows are unit vectors, so the determinant is already the
                // relative conditioning measure.
                if a.determinant().abs() < tol.eps_geom {
                    singular += 1;
                    continue;
                }
                let p = a.lu().solve(&b).expect("determinant checked");
                let constraints: Vec<f64> =
                    rows.iter().map(|(_, c, apex)| (p - apex).dot(c)).collect();
                if constraints.iter().any(|&c| c < -margin) {
                    // Clearly off some face; incidental zeros on the other
                    // constraints don't make the outcome ambiguous.
                    exterior += 1;
                } else if constraints.iter().any(|&c| c <= margin) {
                    return (
                        TripleOutcome::Boundary(format!(
                            "triple point {p:?} within eps of a face boundary"
                        )),
                        singular,
                        exterior,
                    );
                } else {
                    candidates.push((Vec3::from(p), faces));
                }
            }
            (TripleOutcome::Candidates(candidates), singular, exterior)
        })
        .collect();

    let mut scan = TripleScan::default();
    let mut candidates = Vec::new();
    for (outcome, singular, exterior) in outcomes {
        scan.singular_skipped += singular;
        scan.exterior_rejected += exterior;
        match outcome {
            TripleOutcome::Boundary(msg) => return Err(Error::NonGenericCurve(msg)),
            TripleOutcome::Candidates(c) => candidates.extend(c),
        }
    }

    // Canonical order: vertex triple, then face pattern order from the
    // enumeration above, then point. Deduplicate spatially, keeping the
    // first representative.
    let dedup = 1e-7 * diameter;
    let mut kept: Vec<(Vec3, [(usize, FaceId); 3])> = Vec::new();
    for (p, faces) in candidates {
        if kept.iter().all(|(q, _)| (p - q).norm() >= dedup) {
            kept.push((p, faces));
        }
    }

    let probed: Vec<Option<TriplePoint>> = kept
        .par_iter()
        .map(|&(p, faces)| {
            let normals = [
                wedges[faces[0].0].face_normal(faces[0].1),
                wedges[faces[1].0].face_normal(faces[1].1),
                wedges[faces[2].0].face_normal(faces[2].1),
            ];
            let base_delta = probe_delta(&wedges, &faces, p);
            for shrink in [1.0, 8.0, 64.0, 512.0] {
                let delta = base_delta / shrink;
                match probe_chambers(curve, p, normals, delta, tol) {
                    Ok(probes) => {
                        return Some(Ok(TriplePoint {
                            point: p,
                            faces,
                            probes,
                            delta,
                        }))
                    }
                    Err(Error::ProbeTooCoarse(_)) => continue,
                    Err(e) => return Some(Err(e)),
                }
            }
            None
        })
        .map(|r| r.transpose())
        .collect::<Result<_>>()?;

    for tp in probed {
        match tp {
            Some(tp) => scan.points.push(tp),
            None => scan.probe_failed += 1,
        }
    }
    Ok(scan)
}

/// Default probe displacement for a triple point: a small fraction of the
/// distance to the nearest face that is not one of the three active ones.
fn probe_delta(wedges: &[Wedge], active: &[(usize, FaceId); 3], p: Vec3) -> f64 {
    let mut nearest = f64::INFINITY;
    for w in wedges {
        for face in FaceId::BOTH {
            if active.contains(&(w.vertex, face)) {
                continue;
            }
            nearest = nearest.min(w.face_distance(face, p));
        }
    }
    1e-4 * nearest
}

/// Probes the 8 chambers around a triple point.
///
/// The primary probe set is `p + delta (s0 nu0 + s1 nu1 + s2 nu2)` over all
/// sign patterns. When the face normals are strongly correlated this can
/// land two probes in one chamber; the dual-basis probe set (which realizes
/// every sign pattern of the three plane offsets by construction) is tried
/// before giving up. Census failures and pattern violations surface as
/// [`Error::ProbeTooCoarse`]; callers retry with a smaller delta. A clean
/// pattern whose smallest count is 2 on a curve flagged knotted is an input
/// contradiction and fails loudly.
pub fn probe_chambers(
    curve: &PolyCurve,
    p: Vec3,
    normals: [Vec3; 3],
    delta: f64,
    tol: &Tolerances,
) -> Result<[ProbeSample; 8]> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::ProbeTooCoarse(format!(
            "probe displacement {delta:.3e} is not usable"
        )));
    }
    let signs = |idx: usize| -> Vec3 {
        Vec3::new(
            if idx & 1 != 0 { 1.0 } else { -1.0 },
            if idx & 2 != 0 { 1.0 } else { -1.0 },
            if idx & 4 != 0 { 1.0 } else { -1.0 },
        )
    };

    let direct: Vec<Vec3> = (0..8)
        .map(|idx| {
            let s = signs(idx);
            p + delta * (s.x * normals[0] + s.y * normals[1] + s.z * normals[2])
        })
        .collect();

    let attempt = |points: &[Vec3]| -> std::result::Result<[ProbeSample; 8], Option<Error>> {
        let mut samples = [ProbeSample {
            point: p,
            n: 0,
        }; 8];
        for (idx, &q) in points.iter().enumerate() {
            match pl_normals(curve, q, tol) {
                Ok(census) => {
                    samples[idx] = ProbeSample {
                        point: q,
                        n: census.n(),
                    }
                }
                Err(Error::NonGenericPoint(_)) => return Err(None),
                Err(e) => return Err(Some(e)),
            }
        }
        let ns: [usize; 8] = std::array::from_fn(|i| samples[i].n);
        if !probe_multiset_ok(&ns) {
            return Err(None);
        }
        Ok(samples)
    };

    let outcome = attempt(&direct).or_else(|first| {
        if let Some(e) = first {
            return Err(Some(e));
        }
        // Dual basis: rows of M are the normals, columns of M^-1 give
        // displacement directions with exact plane-offset signs.
        let m = nalgebra::Matrix3::from_rows(&[
            normals[0].transpose(),
            normals[1].transpose(),
            normals[2].transpose(),
        ]);
        let Some(m_inv) = m.try_inverse() else {
            return Err(None);
        };
        let raw: Vec<Vec3> = (0..8).map(|idx| m_inv * signs(idx)).collect();
        let longest = raw
            .iter()
            .map(|d| d.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let scale = delta * 3.0f64.sqrt() / longest;
        let dual: Vec<Vec3> = raw.iter().map(|d| p + scale * d).collect();
        attempt(&dual)
    });

    match outcome {
        Ok(samples) => {
            let base = samples.iter().map(|s| s.n).min().expect("8 probes");
            if curve.knotted() && base < 4 {
                return Err(Error::InvalidCurve(format!(
                    "curve is flagged knotted but a chamber with N = {base} exists \
                     (a point with 2 normals certifies the unknot)"
                )));
            }
            Ok(samples)
        }
        Err(Some(e)) => Err(e),
        Err(None) => Err(Error::ProbeTooCoarse(format!(
            "no clean 1-3-3-1 pattern at delta {delta:.3e}"
        ))),
    }
}

/// A sphere through four vertices containing the whole curve.
#[derive(Debug, Clone)]
pub struct SphereWitness {
    pub center: Vec3,
    pub radius: f64,
    pub contacts: [usize; 4],
}

/// Finds a superscribed sphere by enumerating vertex quadruples.
///
/// Each affinely independent quadruple has a circumsphere (a 3x3 system in
/// squared-distance differences); the first one that contains every other
/// vertex strictly inside wins. The four contact vertices are then maxima
/// of the squared distance from the center, so the census there has at
/// least 4 maxima and `n >= 8`.
pub fn superscribed_sphere(curve: &PolyCurve, tol: &Tolerances) -> Result<SphereWitness> {
    let v = curve.vertex_count();
    if v < 4 {
        return Err(Error::InvalidCurve(format!(
            "superscribed sphere needs at least 4 vertices, got {v}"
        )));
    }
    let report = curve.validate(tol);
    if report.planar {
        return Err(Error::NonGenericCurve(
            "curve is planar; no containing sphere has 4 contact vertices in general position"
                .into(),
        ));
    }
    let diameter = curve.diameter();
    let mut tried = 0usize;
    for a in 0..v {
        for b in a + 1..v {
            for c in b + 1..v {
                for d in c + 1..v {
                    tried += 1;
                    let quad = [a, b, c, d];
                    let p0 = curve.vertex(a);
                    let rows: Vec<Vec3> = quad[1..].iter().map(|&i| curve.vertex(i) - p0).collect();
                    let m = nalgebra::Matrix3::from_rows(&[
                        (2.0 * rows[0]).transpose(),
                        (2.0 * rows[1]).transpose(),
                        (2.0 * rows[2]).transpose(),
                    ]);
                    // Relative-scale singularity test on the raw rows.
                    let scale = rows.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min);
                    if scale <= 0.0
                        || m.determinant().abs()
                            < tol.eps_geom * rows.iter().map(|r| 8.0 * r.norm()).product::<f64>()
                    {
                        continue;
                    }
                    let rhs = Vec3::new(
                        curve.vertex(quad[1]).norm_squared() - p0.norm_squared(),
                        curve.vertex(quad[2]).norm_squared() - p0.norm_squared(),
                        curve.vertex(quad[3]).norm_squared() - p0.norm_squared(),
                    );
                    let Some(center) = m.lu().solve(&rhs) else {
                        continue;
                    };
                    let center = Vec3::from(center);
                    let radius = (p0 - center).norm();
                    if !radius.is_finite() || radius <= 0.0 {
                        continue;
                    }
                    let margin = tol.eps_geom.max(1e-12) * radius.max(diameter);
                    let mut contained = true;
                    for i in 0..v {
                        if quad.contains(&i) {
                            continue;
                        }
                        if (curve.vertex(i) - center).norm() >= radius - margin {
                            contained = false;
                            break;
                        }
                    }
                    if !contained {
                        continue;
                    }
                    // Safety net: the center must actually see >= 4 maxima.
                    match pl_normals(curve, center, tol) {
                        Ok(census)
                            if census.feet.iter().filter(|f| f.kind == FootKind::Max).count()
                                >= 4 =>
                        {
                            return Ok(SphereWitness {
                                center,
                                radius,
                                contacts: quad,
                            });
                        }
                        _ => continue,
                    }
                }
            }
        }
    }
    Err(Error::NoSphereFound {
        quadruples_tried: tried,
    })
}

/// One census change along a scanned segment.
#[derive(Debug, Clone)]
pub struct CrossingEvent {
    /// Segment parameter in (0,1).
    pub s: f64,
    pub point: Vec3,
    pub delta_n: i32,
    /// Wedge (vertex) whose face is crossed.
    pub vertex: usize,
    pub face: FaceId,
}

/// Walks the segment from `y0` to `y1` in `steps` steps and resolves every
/// census change to a single wedge-face crossing with `|delta N| = 2`.
///
/// Brackets where the count changes are narrowed by bisection; a bracket
/// that still jumps by more than 2 at minimal width means the segment hits
/// two sheets at once and fails with [`Error::NonTransverse`].
pub fn crossing_scan(
    curve: &PolyCurve,
    y0: Vec3,
    y1: Vec3,
    steps: usize,
    tol: &Tolerances,
) -> Result<Vec<CrossingEvent>> {
    if steps < 2 {
        return Err(Error::InvalidInput("crossing scan needs at least 2 steps".into()));
    }
    let v = curve.vertex_count();
    let wedges: Vec<Wedge> = (0..v)
        .map(|i| wedge_of_vertex(curve, i, tol))
        .collect::<Result<_>>()?;
    let at = |s: f64| y0 + s * (y1 - y0);
    let census_at = |s: f64| pl_normals(curve, at(s), tol).map(|c| (s, c.n()));

    // Interior grid nodes that land exactly on a sheet drift forward by a
    // few percent of the step; endpoint failures propagate because the
    // preconditions require generic endpoints.
    let step = 1.0 / steps as f64;
    let mut nodes: Vec<(f64, usize)> = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let s = k as f64 * step;
        if k == 0 || k == steps {
            nodes.push(census_at(s)?);
            continue;
        }
        let node = [0.0, 0.00618, 0.01618, 0.03141, 0.06180]
            .iter()
            .find_map(|drift| census_at(s + drift * step).ok());
        match node {
            Some(n) => nodes.push(n),
            None => {
                return Err(Error::NonTransverse(format!(
                    "no generic sample near segment parameter {s:.6}"
                )))
            }
        }
    }

    // Brackets with a census change are narrowed until minimal width; each
    // surviving bracket must then carry a single +-2 jump across a single
    // face crossing. Bracket endpoints are generic by construction, so the
    // split point may sit anywhere inside: when the midpoint lands in a
    // non-generic band, other golden-section fractions get it out. The
    // minimal width bounds the band widths a segment of reasonable
    // transversality produces; a bracket whose interior stays non-generic
    // down to that width runs along the bifurcation set.
    let min_width = 1e-6f64.max(tol.eps_root);
    let fractions = [0.5, 0.381966, 0.618034, 0.263932, 0.736068, 0.145898, 0.854102];
    let mut events = Vec::new();
    let mut stack: Vec<((f64, usize), (f64, usize))> = Vec::new();
    for pair in nodes.windows(2) {
        if pair[0].1 != pair[1].1 {
            stack.push((pair[0], pair[1]));
        }
    }

    while let Some(((sa, na), (sb, nb))) = stack.pop() {
        debug_assert_ne!(na, nb);
        if sb - sa > min_width {
            let Some((sm, nm)) = fractions
                .iter()
                .find_map(|f| census_at(sa + f * (sb - sa)).ok())
            else {
                return Err(Error::NonTransverse(format!(
                    "no generic sample inside bracket near s = {:.6}",
                    0.5 * (sa + sb)
                )));
            };
            if nm != na {
                stack.push(((sa, na), (sm, nm)));
            }
            if nm != nb {
                stack.push(((sm, nm), (sb, nb)));
            }
            continue;
        }
        if (nb as i32 - na as i32).abs() > 2 {
            return Err(Error::NonTransverse(format!(
                "census jumps from {na} to {nb} across one sheet crossing near s = {:.6}",
                0.5 * (sa + sb)
            )));
        }

        // Exactly one face plane must change sign across the bracket, with
        // the crossing point inside the face's half-plane.
        let mut hits = Vec::new();
        for w in &wedges {
            for face in FaceId::BOTH {
                let normal = w.face_normal(face);
                let ga = (at(sa) - w.apex).dot(&normal);
                let gb = (at(sb) - w.apex).dot(&normal);
                if ga == 0.0 || gb == 0.0 || ga * gb < 0.0 {
                    // The plane offset is affine in s: solve directly.
                    let s_star = sa + (sb - sa) * ga / (ga - gb);
                    let p_star = at(s_star);
                    let c = (p_star - w.apex).dot(&w.face_constraint(face));
                    if c > tol.eps_geom * (p_star - w.apex).norm() {
                        hits.push((s_star, p_star, w.vertex, face));
                    }
                }
            }
        }
        match hits.len() {
            1 => {
                let (s, point, vertex, face) = hits[0];
                events.push(CrossingEvent {
                    s,
                    point,
                    delta_n: nb as i32 - na as i32,
                    vertex,
                    face,
                });
            }
            0 => {
                return Err(Error::NonTransverse(format!(
                    "census changes near s = {:.6} with no face crossing in range",
                    0.5 * (sa + sb)
                )))
            }
            _ => {
                return Err(Error::NonTransverse(format!(
                    "{} simultaneous face crossings near s = {:.6}",
                    hits.len(),
                    0.5 * (sa + sb)
                )))
            }
        }
    }

    events.sort_by(|a, b| a.s.partial_cmp(&b.s).expect("finite parameters"));
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn v3(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    fn unit_square() -> PolyCurve {
        PolyCurve::new(vec![
            v3(1.0, 1.0, 0.0),
            v3(-1.0, 1.0, 0.0),
            v3(-1.0, -1.0, 0.0),
            v3(1.0, -1.0, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn square_wedge_geometry() {
        let w = wedge_of_vertex(&unit_square(), 0, &tol()).unwrap();
        assert!((w.e1 - v3(-1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((w.e2 - v3(0.0, -1.0, 0.0)).norm() < 1e-15);
        assert!(w.ridge_dir().cross(&v3(0.0, 0.0, 1.0)).norm() < 1e-15);

        assert_eq!(membership(&w, v3(0.0, 0.0, 0.0), &tol()), Membership::MaxSide);
        assert_eq!(membership(&w, v3(2.0, 0.0, 0.0), &tol()), Membership::Outside);
        assert_eq!(
            membership(&w, v3(1.0, 0.0, 0.0), &tol()),
            Membership::OnFace(FaceId::First)
        );
        assert_eq!(
            membership(&w, v3(0.0, 1.0, 0.0), &tol()),
            Membership::OnFace(FaceId::Second)
        );
    }

    #[test]
    fn face_distance_cases() {
        let w = wedge_of_vertex(&unit_square(), 0, &tol()).unwrap();
        // Projection lands inside the half-plane: plane distance.
        assert!((w.face_distance(FaceId::First, v3(5.0, 0.0, 0.0)) - 4.0).abs() < 1e-12);
        // Projection misses the half-plane: ridge distance.
        let d = w.face_distance(FaceId::First, v3(5.0, 3.0, 0.0));
        assert!((d - 20.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tetra_vertex_sees_origin_as_maxside() {
        let w = wedge_of_vertex(&generate::tetra4(), 0, &tol()).unwrap();
        assert_eq!(membership(&w, v3(0.0, 0.0, 0.0), &tol()), Membership::MaxSide);
    }

    #[test]
    fn collinear_edges_are_rejected() {
        let c = PolyCurve::new(vec![
            v3(0.0, 0.0, 0.0),
            v3(1.0, 0.0, 0.0),
            v3(2.0, 0.0, 0.0),
            v3(1.0, 1.0, 1.0),
        ])
        .unwrap();
        assert!(matches!(
            wedge_of_vertex(&c, 1, &tol()),
            Err(Error::CollinearEdges { vertex: 1 })
        ));
    }

    #[test]
    fn planar_curve_fails_triple_gate() {
        assert!(matches!(
            triple_intersections(&unit_square(), &tol()),
            Err(Error::NonGenericCurve(_))
        ));
    }

    #[test]
    fn trefoil_triples_exist_and_probe_clean() {
        let curve = generate::stick_trefoil(6).unwrap();
        let scan = triple_intersections(&curve, &tol()).unwrap();
        assert!(!scan.points.is_empty(), "no triple points found");
        for tp in &scan.points {
            let ns: [usize; 8] = std::array::from_fn(|i| tp.probes[i].n);
            assert!(probe_multiset_ok(&ns), "bad pattern {ns:?}");
            assert!(tp.base_n() >= 4, "knotted curve with N = {}", tp.base_n());
            assert_eq!(tp.max_n(), tp.base_n() + 6);
        }
        assert!(
            scan.points.iter().any(|tp| tp.max_n() >= 10),
            "no chamber with 10 normals"
        );
    }

    #[test]
    fn tetra_triples_are_validated() {
        // The regular tetrahedral quadrilateral is exactly degenerate: the
        // face planes of vertices 0, 1, 2 meet at (2, 0, -2), which lies on
        // the ridge of vertex 1. Either the scan succeeds with validated
        // points or it reports the curve as non-generic.
        match triple_intersections(&generate::tetra4(), &tol()) {
            Ok(scan) => {
                for tp in &scan.points {
                    let ns: [usize; 8] = std::array::from_fn(|i| tp.probes[i].n);
                    assert!(probe_multiset_ok(&ns));
                    assert!(tp.base_n() >= 2);
                }
            }
            Err(Error::NonGenericCurve(_)) => {}
            Err(e) => panic!("unexpected error: {e}"),
        }
    }

    #[test]
    fn triples_are_deterministic_across_thread_counts() {
        let curve = generate::stick_trefoil(6).unwrap();
        let a = triple_intersections(&curve, &tol()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| triple_intersections(&curve, &tol()).unwrap());
        assert_eq!(a.points.len(), b.points.len());
        for (x, y) in a.points.iter().zip(b.points.iter()) {
            assert_eq!(x.point, y.point);
            assert_eq!(x.faces, y.faces);
            let nx: Vec<usize> = x.probes.iter().map(|p| p.n).collect();
            let ny: Vec<usize> = y.probes.iter().map(|p| p.n).collect();
            assert_eq!(nx, ny);
        }
    }

    #[test]
    fn tetra_sphere_is_the_circumsphere() {
        let w = superscribed_sphere(&generate::tetra4(), &tol()).unwrap();
        assert!(w.center.norm() < 1e-9);
        assert!((w.radius - 3.0f64.sqrt()).abs() < 1e-9);
        assert_eq!(w.contacts, [0, 1, 2, 3]);
        let census = pl_normals(&generate::tetra4(), w.center, &tol()).unwrap();
        assert_eq!(census.n(), 8);
    }

    #[test]
    fn random_hexagon_spheres_give_eight_normals() {
        for seed in [3u64, 5, 8, 13, 21] {
            let curve = generate::random_polygon(6, seed, &tol()).unwrap();
            let w = superscribed_sphere(&curve, &tol()).unwrap();
            for &i in &w.contacts {
                assert!(((curve.vertex(i) - w.center).norm() - w.radius).abs() < 1e-9 * w.radius);
            }
            let census = pl_normals(&curve, w.center, &tol()).unwrap();
            assert!(census.n() >= 8, "seed {seed}: n = {}", census.n());
        }
    }

    #[test]
    fn planar_square_has_no_sphere_witness() {
        assert!(matches!(
            superscribed_sphere(&unit_square(), &tol()),
            Err(Error::NonGenericCurve(_))
        ));
    }

    fn jittered_square() -> PolyCurve {
        // Breaks the coplanar face planes of the exact square.
        PolyCurve::new(vec![
            v3(1.0, 1.0, 0.013),
            v3(-1.0, 1.0, -0.007),
            v3(-1.0, -1.0, 0.011),
            v3(1.0, -1.0, -0.017),
        ])
        .unwrap()
    }

    #[test]
    fn crossing_scan_obeys_the_law() {
        let curve = jittered_square();
        let y0 = v3(0.02, 0.03, 0.01);
        let y1 = v3(351.0, 23.0, 17.0);
        let events = crossing_scan(&curve, y0, y1, 400, &tol()).unwrap();
        let n0 = pl_normals(&curve, y0, &tol()).unwrap().n() as i32;
        let n1 = pl_normals(&curve, y1, &tol()).unwrap().n() as i32;
        assert!(!events.is_empty());
        for e in &events {
            assert_eq!(e.delta_n.abs(), 2);
        }
        let total: i32 = events.iter().map(|e| e.delta_n).sum();
        assert_eq!(n1 - n0, total);
        assert_eq!(n1, 2);
    }

    #[test]
    fn scan_inside_one_chamber_is_empty() {
        let curve = jittered_square();
        let events =
            crossing_scan(&curve, v3(0.01, 0.02, 0.03), v3(0.05, 0.01, 0.02), 50, &tol()).unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn exact_square_scan_is_nontransverse() {
        let err = crossing_scan(
            &unit_square(),
            v3(0.0, 0.0, 0.0),
            v3(5.0, 0.0, 0.0),
            64,
            &tol(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonTransverse(_)), "{err}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn membership_matches_census(seed in 0u64..1 << 48, nv in 4usize..=12,
                                     ox in -2.0f64..2.0, oy in -2.0f64..2.0, oz in -2.0f64..2.0) {
            let t = tol();
            let curve = generate::random_polygon(nv, seed, &t).unwrap();
            let y = v3(ox, oy, oz);
            let Ok(census) = pl_normals(&curve, y, &t) else {
                return Ok(());
            };
            for i in 0..curve.vertex_count() {
                let w = wedge_of_vertex(&curve, i, &t).unwrap();
                let is_max = census.feet.iter().any(|f| {
                    f.kind == FootKind::Max
                        && matches!(f.location, crate::sqd::FootLocation::Vertex(j) if j == i)
                });
                match membership(&w, y, &t) {
                    Membership::MaxSide => prop_assert!(is_max),
                    Membership::Outside => prop_assert!(!is_max),
                    Membership::OnFace(_) => {}
                }
            }
        }
    }
}
