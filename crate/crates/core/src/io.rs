//! Curve files, canonical JSON output, and OBJ export.
//!
//! All tool output is deterministic: object keys are emitted in sorted
//! order and floating-point numbers are printed with 17 significant digits,
//! so identical inputs yield byte-identical files.

use crate::curve::{FourierCurve, FourierSeries, PolyCurve};
use crate::error::{Error, Result};
use crate::sqd::{FootLocation, NormalCensus};
use crate::{Curve, Vec3};
use serde_json::{json, Map, Value};
use std::fmt::Write as _;

/// Parses a curve from its JSON document.
///
/// Schemas:
/// `{"type":"pl","vertices":[[x,y,z],...]}` or
/// `{"type":"fourier","order":m,"coeffs":{"x":{"a0":..,"a":[..],"b":[..]},"y":{..},"z":{..}}}`,
/// each with an optional `"knotted":bool`. Non-finite numbers are rejected
/// (they are not valid JSON to begin with).
pub fn parse_curve(text: &str) -> Result<Curve> {
    let doc: Value = serde_json::from_str(text)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::InvalidInput("curve document must be a JSON object".into()))?;
    let ty = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidInput("missing \"type\" field".into()))?;
    let knotted = match obj.get("knotted") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(Error::InvalidInput("\"knotted\" must be a boolean".into())),
    };
    match ty {
        "pl" => {
            let verts = obj
                .get("vertices")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidInput("pl curve needs \"vertices\" array".into()))?;
            let vertices = verts
                .iter()
                .map(parse_vec3)
                .collect::<Result<Vec<Vec3>>>()?;
            Ok(Curve::Pl(PolyCurve::new(vertices)?.with_knotted(knotted)))
        }
        "fourier" => {
            let order = obj
                .get("order")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::InvalidInput("fourier curve needs integer \"order\"".into()))?
                as usize;
            let coeffs = obj
                .get("coeffs")
                .and_then(Value::as_object)
                .ok_or_else(|| Error::InvalidInput("fourier curve needs \"coeffs\" object".into()))?;
            let series = |axis: &str| -> Result<FourierSeries> {
                let c = coeffs
                    .get(axis)
                    .and_then(Value::as_object)
                    .ok_or_else(|| Error::InvalidInput(format!("missing coeffs.{axis}")))?;
                let a0 = c
                    .get("a0")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| Error::InvalidInput(format!("coeffs.{axis}.a0 must be a number")))?;
                let vec = |name: &str| -> Result<Vec<f64>> {
                    c.get(name)
                        .and_then(Value::as_array)
                        .ok_or_else(|| {
                            Error::InvalidInput(format!("coeffs.{axis}.{name} must be an array"))
                        })?
                        .iter()
                        .map(|v| {
                            v.as_f64().ok_or_else(|| {
                                Error::InvalidInput(format!("coeffs.{axis}.{name}: non-number entry"))
                            })
                        })
                        .collect()
                };
                Ok(FourierSeries {
                    a0,
                    a: vec("a")?,
                    b: vec("b")?,
                })
            };
            let curve = FourierCurve::new(order, [series("x")?, series("y")?, series("z")?])?;
            Ok(Curve::Fourier(curve.with_knotted(knotted)))
        }
        other => Err(Error::InvalidInput(format!("unknown curve type {other:?}"))),
    }
}

pub fn read_curve_file(path: &std::path::Path) -> Result<Curve> {
    parse_curve(&std::fs::read_to_string(path)?)
}

fn parse_vec3(v: &Value) -> Result<Vec3> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| Error::InvalidInput("point must be a 3-element array".into()))?;
    let mut out = [0.0; 3];
    for (i, x) in arr.iter().enumerate() {
        out[i] = x
            .as_f64()
            .ok_or_else(|| Error::InvalidInput("point coordinate must be a number".into()))?;
    }
    Ok(Vec3::new(out[0], out[1], out[2]))
}

/// Serializes a curve back to its JSON document form.
pub fn curve_json(curve: &Curve) -> Value {
    match curve {
        Curve::Pl(c) => json!({
            "type": "pl",
            "knotted": c.knotted(),
            "vertices": c.vertices().iter().map(|v| vec3_json(*v)).collect::<Vec<_>>(),
        }),
        Curve::Fourier(c) => {
            let series = |s: &FourierSeries| {
                json!({"a0": s.a0, "a": s.a.clone(), "b": s.b.clone()})
            };
            json!({
                "type": "fourier",
                "knotted": c.knotted(),
                "order": c.order(),
                "coeffs": {
                    "x": series(&c.coords()[0]),
                    "y": series(&c.coords()[1]),
                    "z": series(&c.coords()[2]),
                },
            })
        }
    }
}

pub fn vec3_json(v: Vec3) -> Value {
    json!([v.x, v.y, v.z])
}

/// Census document: point, count, and the feet in cyclic order.
pub fn census_json(census: &NormalCensus) -> Value {
    let feet: Vec<Value> = census
        .feet
        .iter()
        .map(|f| {
            let mut m = Map::new();
            m.insert("kind".into(), json!(format!("{:?}", f.kind)));
            match f.location {
                FootLocation::Vertex(i) => {
                    m.insert("vertex".into(), json!(i));
                }
                FootLocation::Edge { index, s } => {
                    m.insert("edge".into(), json!(index));
                    m.insert("s".into(), json!(s));
                }
                FootLocation::Param(t) => {
                    m.insert("t".into(), json!(t));
                }
            }
            m.insert("point".into(), vec3_json(f.point));
            m.insert("sq_dist".into(), json!(f.sq_dist));
            Value::Object(m)
        })
        .collect();
    json!({
        "y": vec3_json(census.y),
        "n": census.n(),
        "feet": feet,
    })
}

/// Canonical printer: sorted keys (the default map is ordered), floats as
/// `{:.16e}` (17 significant digits), integers plain. Not whitespace-padded.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value);
    out
}

fn write_value(out: &mut String, value: &Value) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                let _ = write!(out, "{:.16e}", n.as_f64().expect("finite float"));
            }
        }
        Value::String(s) => {
            let _ = write!(out, "{}", Value::String(s.clone()));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, v)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", Value::String(k.clone()));
                out.push(':');
                write_value(out, v);
            }
            out.push('}');
        }
    }
}

/// Small OBJ accumulator. Right-handed coordinates, one `o` block per sheet.
#[derive(Default)]
pub struct ObjWriter {
    buf: String,
    vertex_count: usize,
}

impl ObjWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(&mut self, name: &str) {
        let _ = writeln!(self.buf, "o {name}");
    }

    /// Adds a vertex, returning its 1-based OBJ index.
    pub fn vertex(&mut self, p: Vec3) -> usize {
        self.vertex_count += 1;
        let _ = writeln!(self.buf, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
        self.vertex_count
    }

    pub fn face(&mut self, indices: &[usize]) {
        let _ = write!(self.buf, "f");
        for i in indices {
            let _ = write!(self.buf, " {i}");
        }
        self.buf.push('\n');
    }

    /// Polyline element (`l`), e.g. a focal line segment or wedge ridge.
    pub fn line(&mut self, indices: &[usize]) {
        let _ = write!(self.buf, "l");
        for i in indices {
            let _ = write!(self.buf, " {i}");
        }
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
