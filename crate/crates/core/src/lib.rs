//! Normals from points to closed space curves.
//!
//! A normal from a point `y` is a segment `yx` where `x` is a local maximum
//! or local minimum of the squared distance function restricted to the curve.
//! This crate computes and classifies those normals for two curve families
//! (closed polylines and truncated Fourier curves), builds the bifurcation
//! structures that govern how the normal count changes (focal surface for
//! smooth curves, vertex wedges for polylines, the lune arrangement on the
//! sphere of directions), and searches for witness points with many normals.
//!
//! Modules follow the pipeline:
//!
//! - [`curve`]: curve types, genericity validation, Frenet data
//! - [`sqd`]: critical points of the squared distance function, the census
//! - [`focal`]: osculating centers, focal lines/surface, triple-normal chase
//! - [`wedges`]: per-vertex wedges, triple intersections, superscribed sphere
//! - [`infinity`]: lunes and their arc arrangement on the direction sphere
//! - [`witness`]: witness searches, unknot certificate, knot diagram plumbing
//! - [`generate`]: test-curve generators (circle, ellipse, trefoil, ...)
//! - [`io`]: curve file schema and canonical JSON/OBJ output

pub mod curve;
pub mod error;
pub mod focal;
pub mod generate;
pub mod infinity;
pub mod io;
pub mod sqd;
pub mod tol;
pub mod wedges;
pub mod witness;

pub use curve::{FourierCurve, FrenetFrame, GenericityReport, PolyCurve};
pub use error::{Error, Result};
pub use sqd::{FootKind, NormalCensus, NormalFoot};
pub use tol::Tolerances;

/// 3-vector over `f64`; all geometry in this crate lives in R^3.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Either curve family, as read from a curve file.
#[derive(Debug, Clone)]
pub enum Curve {
    Pl(PolyCurve),
    Fourier(FourierCurve),
}

impl Curve {
    pub fn knotted(&self) -> bool {
        match self {
            Curve::Pl(c) => c.knotted(),
            Curve::Fourier(c) => c.knotted(),
        }
    }

    /// Census of normals from `y`, dispatching on the curve family.
    pub fn normals(&self, y: Vec3, grid: Option<usize>, tol: &Tolerances) -> Result<NormalCensus> {
        match self {
            Curve::Pl(c) => sqd::pl_normals(c, y, tol),
            Curve::Fourier(c) => {
                let g = grid.unwrap_or_else(|| sqd::default_grid(c.order()));
                sqd::smooth_normals(c, y, g, tol)
            }
        }
    }
}
