//! Compact sets and their deterministic evaluation grids.
//!
//! The built-in shapes (disk, segment, simple polygon) have connected
//! complements. Unions are accepted as given; whether their complement is
//! connected is the caller's responsibility.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::check_finite;
use crate::text::{fmt_complex, fmt_f64, Tokens};

/// Slack for geometric membership checks.
pub const GEOMETRIC_SLACK: f64 = 1e-12;

/// Grids closer than `SEPARATION_FACTOR / density` are rejected as too
/// coarse to certify disjointness.
pub const SEPARATION_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub enum SetSpec {
    Disk { center: Complex64, radius: f64 },
    Segment { a: Complex64, b: Complex64 },
    Polygon { vertices: Vec<Complex64>, filled: bool },
    Union(Vec<SetSpec>),
}

impl SetSpec {
    pub fn disk(center: Complex64, radius: f64) -> Self {
        SetSpec::Disk { center, radius }
    }

    pub fn segment(a: Complex64, b: Complex64) -> Self {
        SetSpec::Segment { a, b }
    }

    pub fn polygon(vertices: Vec<Complex64>, filled: bool) -> Self {
        SetSpec::Polygon { vertices, filled }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at("set")
    }

    fn validate_at(&self, path: &str) -> Result<()> {
        match self {
            SetSpec::Disk { center, radius } => {
                check_finite(*center, &format!("{path}.center"))?;
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::invalid(
                        format!("{path}.radius"),
                        format!("must be positive and finite, got {radius}"),
                    ));
                }
            }
            SetSpec::Segment { a, b } => {
                check_finite(*a, &format!("{path}.a"))?;
                check_finite(*b, &format!("{path}.b"))?;
                if a == b {
                    return Err(Error::invalid(
                        format!("{path}.b"),
                        "segment endpoints coincide",
                    ));
                }
            }
            SetSpec::Polygon { vertices, .. } => {
                if vertices.len() < 3 {
                    return Err(Error::invalid(
                        format!("{path}.vertices"),
                        format!("need at least 3 vertices, got {}", vertices.len()),
                    ));
                }
                for (i, v) in vertices.iter().enumerate() {
                    check_finite(*v, &format!("{path}.vertices[{i}]"))?;
                }
                let v0 = vertices[0];
                let scale = vertices
                    .iter()
                    .map(|v| (v - v0).norm())
                    .fold(0.0, f64::max);
                let spread = vertices
                    .windows(2)
                    .map(|w| cross(w[0] - v0, w[1] - v0).abs())
                    .fold(0.0, f64::max);
                if spread <= 1e-14 * scale * scale {
                    return Err(Error::invalid(
                        format!("{path}.vertices"),
                        "all vertices are collinear",
                    ));
                }
            }
            SetSpec::Union(members) => {
                if members.is_empty() {
                    return Err(Error::invalid(format!("{path}.members"), "empty union"));
                }
                for (i, m) in members.iter().enumerate() {
                    m.validate_at(&format!("{path}.members[{i}]"))?;
                }
            }
        }
        Ok(())
    }

    /// Shift every geometric datum by `delta`.
    pub fn translate(&self, delta: Complex64) -> Self {
        match self {
            SetSpec::Disk { center, radius } => SetSpec::Disk {
                center: center + delta,
                radius: *radius,
            },
            SetSpec::Segment { a, b } => SetSpec::Segment {
                a: a + delta,
                b: b + delta,
            },
            SetSpec::Polygon { vertices, filled } => SetSpec::Polygon {
                vertices: vertices.iter().map(|v| v + delta).collect(),
                filled: *filled,
            },
            SetSpec::Union(members) => {
                SetSpec::Union(members.iter().map(|m| m.translate(delta)).collect())
            }
        }
    }

    /// Closed-set membership up to `slack`.
    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        match self {
            SetSpec::Disk { center, radius } => (z - center).norm() <= radius + slack,
            SetSpec::Segment { a, b } => segment_distance(z, *a, *b) <= slack,
            SetSpec::Polygon { vertices, filled } => {
                let on_edge = edges(vertices).any(|(a, b)| segment_distance(z, a, b) <= slack);
                on_edge || (*filled && winding_inside(vertices, z))
            }
            SetSpec::Union(members) => members.iter().any(|m| m.contains(z, slack)),
        }
    }

    /// Strict interior membership. Segments and outline polygons have none.
    pub fn interior_contains(&self, z: Complex64) -> bool {
        match self {
            SetSpec::Disk { center, radius } => (z - center).norm() < *radius,
            SetSpec::Segment { .. } => false,
            SetSpec::Polygon { vertices, filled } => {
                *filled
                    && winding_inside(vertices, z)
                    && edges(vertices).all(|(a, b)| segment_distance(z, a, b) > 0.0)
            }
            SetSpec::Union(members) => members.iter().any(|m| m.interior_contains(z)),
        }
    }

    /// Prefix token encoding used inside certificates.
    pub fn to_tokens(&self) -> String {
        let mut out = String::new();
        self.write_tokens(&mut out);
        out
    }

    fn write_tokens(&self, out: &mut String) {
        match self {
            SetSpec::Disk { center, radius } => {
                let _ = write!(out, "disk {} {}", fmt_complex(*center), fmt_f64(*radius));
            }
            SetSpec::Segment { a, b } => {
                let _ = write!(out, "segment {} {}", fmt_complex(*a), fmt_complex(*b));
            }
            SetSpec::Polygon { vertices, filled } => {
                let kind = if *filled { "filled" } else { "outline" };
                let _ = write!(out, "polygon {kind} {}", vertices.len());
                for v in vertices {
                    let _ = write!(out, " {}", fmt_complex(*v));
                }
            }
            SetSpec::Union(members) => {
                let _ = write!(out, "union {}", members.len());
                for m in members {
                    out.push(' ');
                    m.write_tokens(out);
                }
            }
        }
    }

    pub fn read_tokens(t: &mut Tokens<'_>) -> Result<Self> {
        let spec = match t.next_str()? {
            "disk" => SetSpec::Disk {
                center: t.next_complex()?,
                radius: t.next_f64()?,
            },
            "segment" => SetSpec::Segment {
                a: t.next_complex()?,
                b: t.next_complex()?,
            },
            "polygon" => {
                let filled = match t.next_str()? {
                    "filled" => true,
                    "outline" => false,
                    other => {
                        return Err(Error::parse(
                            t.line(),
                            format!("expected filled|outline, got {other:?}"),
                        ))
                    }
                };
                let n = t.next_usize()?;
                let vertices = (0..n).map(|_| t.next_complex()).collect::<Result<_>>()?;
                SetSpec::Polygon { vertices, filled }
            }
            "union" => {
                let n = t.next_usize()?;
                SetSpec::Union((0..n).map(|_| SetSpec::read_tokens(t)).collect::<Result<_>>()?)
            }
            other => {
                return Err(Error::parse(t.line(), format!("unknown set kind {other:?}")));
            }
        };
        spec.validate()
            .map_err(|e| Error::parse(t.line(), e.to_string()))?;
        Ok(spec)
    }
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn edges(vertices: &[Complex64]) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
    let n = vertices.len();
    (0..n).map(move |i| (vertices[i], vertices[(i + 1) % n]))
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0)
    };
    (z - (a + d * t)).norm()
}

fn winding_inside(vertices: &[Complex64], z: Complex64) -> bool {
    let mut inside = false;
    for (a, b) in edges(vertices) {
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) / (b.im - a.im) * (b.re - a.re);
            if z.re < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// A set together with its evaluation grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSet {
    spec: SetSpec,
    density: f64,
    points: Vec<Complex64>,
}

impl SampledSet {
    pub fn spec(&self) -> &SetSpec {
        &self.spec
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Deterministic grid: boundaries at `density` points per unit length,
/// filled interiors at roughly `density` points per unit area.
pub fn sample(spec: &SetSpec, density: f64) -> Result<SampledSet> {
    spec.validate()?;
    if !(density.is_finite() && density > 0.0) {
        return Err(Error::invalid(
            "density",
            format!("must be positive and finite, got {density}"),
        ));
    }
    let mut points = Vec::new();
    sample_into(spec, density, &mut points);
    Ok(SampledSet {
        spec: spec.clone(),
        density,
        points,
    })
}

fn sample_into(spec: &SetSpec, density: f64, out: &mut Vec<Complex64>) {
    match spec {
        SetSpec::Disk { center, radius } => {
            push_circle(*center, *radius, ring_count(*radius, density), out);
            // interior rings spaced so the area density is ~density
            let h = 1.0 / density.sqrt();
            let mut k = 1.0;
            let mut any = false;
            while radius - k * h > 0.0 {
                let r = radius - k * h;
                push_circle(*center, r, ((2.0 * PI * r / h).ceil() as usize).max(1), out);
                any = true;
                k += 1.0;
            }
            if any {
                out.push(*center);
            }
        }
        SetSpec::Segment { a, b } => push_segment(*a, *b, density, true, out),
        SetSpec::Polygon { vertices, filled } => {
            for (a, b) in edges(vertices) {
                push_segment(a, b, density, false, out);
            }
            if *filled {
                push_polygon_interior(vertices, density, out);
            }
        }
        SetSpec::Union(members) => {
            for m in members {
                sample_into(m, density, out);
            }
        }
    }
}

fn ring_count(radius: f64, density: f64) -> usize {
    ((2.0 * PI * radius * density).ceil() as usize).max(1)
}

fn push_circle(center: Complex64, radius: f64, count: usize, out: &mut Vec<Complex64>) {
    for j in 0..count {
        let theta = 2.0 * PI * (j as f64) / (count as f64);
        // exact values on the axes keep e.g. the 4-point circle at {1, i, -1, -i}
        let (s, c) = match (4 * j) % count {
            0 => match (4 * j) / count {
                0 => (0.0, 1.0),
                1 => (1.0, 0.0),
                2 => (0.0, -1.0),
                _ => (-1.0, 0.0),
            },
            _ => theta.sin_cos(),
        };
        out.push(center + Complex64::new(radius * c, radius * s));
    }
}

fn push_segment(a: Complex64, b: Complex64, density: f64, closed: bool, out: &mut Vec<Complex64>) {
    let n = (((b - a).norm() * density).ceil() as usize).max(1);
    let last = if closed { n } else { n - 1 };
    for j in 0..=last {
        let point = if j == n {
            b
        } else {
            a + (b - a) * (j as f64 / n as f64)
        };
        out.push(point);
    }
}

fn push_polygon_interior(vertices: &[Complex64], density: f64, out: &mut Vec<Complex64>) {
    let h = 1.0 / density.sqrt();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for v in vertices {
        x0 = x0.min(v.re);
        x1 = x1.max(v.re);
        y0 = y0.min(v.im);
        y1 = y1.max(v.im);
    }
    let nx = ((x1 - x0) / h).floor() as usize;
    let ny = ((y1 - y0) / h).floor() as usize;
    for j in 0..ny {
        for i in 0..nx {
            let z = Complex64::new(x0 + (i as f64 + 0.5) * h, y0 + (j as f64 + 0.5) * h);
            if winding_inside(vertices, z) {
                out.push(z);
            }
        }
    }
}

/// Maximum modulus over a non-empty list.
pub fn discrete_sup_norm(values: &[Complex64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(values.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

pub fn min_pairwise_distance(a: &SampledSet, b: &SampledSet) -> f64 {
    a.points
        .iter()
        .flat_map(|p| b.points.iter().map(move |q| (p - q).norm()))
        .fold(f64::INFINITY, f64::min)
}

/// Refuses grid pairs closer than `SEPARATION_FACTOR / density`, using the
/// coarser of the two densities.
pub fn check_separated(a: &SampledSet, a_name: &str, b: &SampledSet, b_name: &str) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let distance = min_pairwise_distance(a, b);
    let threshold = SEPARATION_FACTOR / a.density.min(b.density);
    if distance < threshold {
        return Err(Error::NotSeparated {
            a: a_name.to_string(),
            b: b_name.to_string(),
            distance,
            threshold,
        });
    }
    Ok(())
}
