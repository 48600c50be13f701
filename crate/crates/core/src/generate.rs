//! Built-in curve generators: exact shapes and seeded random families.
//!
//! Random generators draw from a `ChaCha8Rng` seeded with the given value,
//! so identical seeds reproduce identical curves on any platform. Families
//! with genericity requirements retry with derived seeds and give up after
//! 100 attempts.

use crate::curve::{FourierCurve, FourierSeries, PolyCurve};
use crate::error::{Error, Result};
use crate::tol::Tolerances;
use crate::Vec3;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MAX_RETRIES: usize = 100;

fn series(a0: f64, a: Vec<f64>, b: Vec<f64>) -> FourierSeries {
    FourierSeries { a0, a, b }
}

/// Circle of radius `r` in the xy-plane.
pub fn circle(r: f64) -> FourierCurve {
    FourierCurve::new(
        1,
        [
            series(0.0, vec![r], vec![0.0]),
            series(0.0, vec![0.0], vec![r]),
            series(0.0, vec![0.0], vec![0.0]),
        ],
    )
    .expect("circle coefficients are valid")
}

/// Ellipse `(a cos t, b sin t, lift sin 2t)`. With `lift = 0` the curve is
/// planar; a small positive lift is the usual way to move it off the
/// degenerate planar stratum.
pub fn ellipse(a: f64, b: f64, lift: f64) -> FourierCurve {
    FourierCurve::new(
        2,
        [
            series(0.0, vec![a, 0.0], vec![0.0, 0.0]),
            series(0.0, vec![0.0, 0.0], vec![b, 0.0]),
            series(0.0, vec![0.0, 0.0], vec![0.0, lift]),
        ],
    )
    .expect("ellipse coefficients are valid")
}

/// Lifted ellipse with a fixed symmetry-breaking wobble of the given
/// magnitude in the third harmonics. The plain lifted ellipse is symmetric
/// under a half-turn, which keeps its focal sheets from ever crossing; the
/// wobble removes that symmetry so the focal surface self-intersects.
pub fn perturbed_ellipse(a: f64, b: f64, lift: f64, wobble: f64) -> FourierCurve {
    let w = wobble;
    FourierCurve::new(
        3,
        [
            series(0.0, vec![a, 0.0, 0.5 * w], vec![0.0, 0.2 * w, 0.0]),
            series(0.0, vec![0.0, 0.3 * w, 0.0], vec![b, 0.0, 0.4 * w]),
            series(0.0, vec![0.0, 0.0, 0.2 * w], vec![0.0, lift, 0.5 * w]),
        ],
    )
    .expect("perturbed ellipse coefficients are valid")
}

/// Smooth trefoil on the torus: `((2+cos 3t) cos 2t, (2+cos 3t) sin 2t, sin 3t)`,
/// expanded into an order-5 Fourier curve. Marked knotted.
pub fn fourier_trefoil() -> FourierCurve {
    // cos 3t cos 2t = (cos 5t + cos t)/2; cos 3t sin 2t = (sin 5t - sin t)/2.
    let x = series(0.0, vec![0.5, 2.0, 0.0, 0.0, 0.5], vec![0.0; 5]);
    let y = series(0.0, vec![0.0; 5], vec![-0.5, 2.0, 0.0, 0.0, 0.5]);
    let z = series(0.0, vec![0.0; 5], vec![0.0, 0.0, 1.0, 0.0, 0.0]);
    FourierCurve::new(5, [x, y, z])
        .expect("trefoil coefficients are valid")
        .with_knotted(true)
}

/// Random closed curve of the given Fourier order with coefficient decay
/// `1/k^2`, retried until the genericity checks pass. Order 1 images are
/// always planar ellipses, so `order >= 2` is required.
pub fn random_fourier(order: usize, seed: u64, tol: &Tolerances) -> Result<FourierCurve> {
    if order < 2 {
        return Err(Error::InvalidInput(
            "random fourier curves need order >= 2 (order 1 is always planar)".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RETRIES {
        let mut coords = Vec::with_capacity(3);
        for _ in 0..3 {
            let mut a = Vec::with_capacity(order);
            let mut b = Vec::with_capacity(order);
            for k in 1..=order {
                let decay = 1.0 / (k * k) as f64;
                a.push(decay * rng.gen_range(-1.0..1.0));
                b.push(decay * rng.gen_range(-1.0..1.0));
            }
            coords.push(series(0.0, a, b));
        }
        let coords: [FourierSeries; 3] = coords.try_into().expect("three coordinates");
        let curve = FourierCurve::new(order, coords)?;
        if curve.validate(64 * (order + 1), tol).is_generic() {
            return Ok(curve);
        }
    }
    Err(Error::GenericityRetryExceeded {
        retries: MAX_RETRIES,
    })
}

/// Random closed polygon with `v` vertices uniform in `[-1,1]^3`, retried
/// until the genericity checks pass.
pub fn random_polygon(v: usize, seed: u64, tol: &Tolerances) -> Result<PolyCurve> {
    if v < 4 {
        return Err(Error::InvalidInput(
            "random polygons need at least 4 vertices (3 are always planar)".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RETRIES {
        let vertices: Vec<Vec3> = (0..v)
            .map(|_| {
                Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect();
        let Ok(curve) = PolyCurve::new(vertices) else {
            continue;
        };
        if curve.validate(tol).is_generic() {
            return Ok(curve);
        }
    }
    Err(Error::GenericityRetryExceeded {
        retries: MAX_RETRIES,
    })
}

/// Polygonal trefoil with `sticks >= 6` vertices, sampled from the smooth
/// torus trefoil with a fixed phase offset. At six sticks this is the
/// classic two-triangle realization (the minimal stick number of the
/// trefoil is 6). A fixed small jitter breaks the exact threefold symmetry
/// of the raw sampling, which otherwise puts wedge-face intersections
/// exactly on ridges. Marked knotted.
pub fn stick_trefoil(sticks: usize) -> Result<PolyCurve> {
    if sticks < 6 {
        return Err(Error::InvalidInput(
            "the trefoil needs at least 6 sticks".into(),
        ));
    }
    let smooth = fourier_trefoil();
    let phase = 0.3;
    let vertices: Vec<Vec3> = (0..sticks)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / sticks as f64 + phase;
            let k = j as f64;
            smooth.eval(t, 0)
                + 0.02
                    * Vec3::new(
                        (7.0 * k + 1.0).sin(),
                        (11.0 * k + 2.0).sin(),
                        (13.0 * k + 3.0).sin(),
                    )
        })
        .collect();
    Ok(PolyCurve::new(vertices)?.with_knotted(true))
}

/// Polygonal figure-eight knot: samples of the curve
/// `((2+cos 2t) cos 3t, (2+cos 2t) sin 3t, sin 4t)` with the same phase
/// and jitter treatment as [`stick_trefoil`]. Needs more sticks than the
/// trefoil to keep its knot type; 16 is comfortable. Marked knotted.
pub fn stick_figure_eight(sticks: usize) -> Result<PolyCurve> {
    if sticks < 8 {
        return Err(Error::InvalidInput(
            "the figure-eight needs at least 8 sticks".into(),
        ));
    }
    let phase = 0.3;
    let vertices: Vec<Vec3> = (0..sticks)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / sticks as f64 + phase;
            let k = j as f64;
            let r = 2.0 + (2.0 * t).cos();
            Vec3::new(r * (3.0 * t).cos(), r * (3.0 * t).sin(), (4.0 * t).sin())
                + 0.02
                    * Vec3::new(
                        (7.0 * k + 1.0).sin(),
                        (11.0 * k + 2.0).sin(),
                        (13.0 * k + 3.0).sin(),
                    )
        })
        .collect();
    Ok(PolyCurve::new(vertices)?.with_knotted(true))
}

/// The tetrahedral 4-gon: four alternating vertices of the cube, the
/// smallest non-planar closed polygon.
pub fn tetra4() -> PolyCurve {
    PolyCurve::new(vec![
        Vec3::new(1.0, 1.0, 1.0),
        Vec3::new(1.0, -1.0, -1.0),
        Vec3::new(-1.0, 1.0, -1.0),
        Vec3::new(-1.0, -1.0, 1.0),
    ])
    .expect("tetra4 is a valid polygon")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_eval() {
        let c = circle(2.0);
        assert!((c.eval(0.0, 0) - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-15);
        let pi = std::f64::consts::PI;
        assert!((c.eval(pi, 0) - Vec3::new(-2.0, 0.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn ellipse_matches_closed_form() {
        let c = ellipse(2.0, 1.0, 0.25);
        for i in 0..64 {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
            let expect = Vec3::new(2.0 * t.cos(), t.sin(), 0.25 * (2.0 * t).sin());
            assert!((c.eval(t, 0) - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn flat_ellipse_is_planar_lifted_is_not() {
        let tol = Tolerances::default();
        assert!(ellipse(2.0, 1.0, 0.0).validate(256, &tol).planar);
        assert!(!ellipse(2.0, 1.0, 0.05).validate(256, &tol).planar);
    }

    #[test]
    fn fourier_trefoil_matches_torus_form() {
        let c = fourier_trefoil();
        assert!(c.knotted());
        assert_eq!(c.order(), 5);
        for i in 0..64 {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
            let r = 2.0 + (3.0 * t).cos();
            let expect = Vec3::new(r * (2.0 * t).cos(), r * (2.0 * t).sin(), (3.0 * t).sin());
            assert!((c.eval(t, 0) - expect).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn fourier_trefoil_is_generic() {
        let tol = Tolerances::default();
        let report = fourier_trefoil().validate(512, &tol);
        assert!(report.is_generic(), "{}", report.summary());
    }

    #[test]
    fn random_fourier_is_deterministic_and_generic() {
        let tol = Tolerances::default();
        let a = random_fourier(3, 7, &tol).unwrap();
        let b = random_fourier(3, 7, &tol).unwrap();
        assert_eq!(a, b);
        assert!(a.validate(256, &tol).is_generic());
        assert!(random_fourier(1, 7, &tol).is_err());
    }

    #[test]
    fn random_polygon_is_deterministic_and_generic() {
        let tol = Tolerances::default();
        let a = random_polygon(8, 11, &tol).unwrap();
        let b = random_polygon(8, 11, &tol).unwrap();
        assert_eq!(a, b);
        assert!(a.validate(&tol).is_generic());
    }

    #[test]
    fn stick_trefoil_shape() {
        let tol = Tolerances::default();
        for sticks in [6, 8, 12] {
            let c = stick_trefoil(sticks).unwrap();
            assert_eq!(c.vertex_count(), sticks);
            assert!(c.knotted());
            let report = c.validate(&tol);
            assert!(report.is_generic(), "sticks={sticks}: {}", report.summary());
        }
        assert!(stick_trefoil(5).is_err());
    }

    #[test]
    fn tetra4_is_the_cube_alternation() {
        let c = tetra4();
        assert_eq!(c.vertex_count(), 4);
        for v in c.vertices() {
            assert!((v.norm_squared() - 3.0).abs() < 1e-15);
        }
    }
}
