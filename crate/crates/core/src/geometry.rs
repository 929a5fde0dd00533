//! Planar scenes: archipelagos (finite unions of Jordan domains with
//! pairwise disjoint closures) with optional lakes (compact holes strictly
//! inside the islands), plus the point/boundary/hull queries the moment and
//! reconstruction pipelines need.
//!
//! All geometry values are immutable after construction; every operation here
//! is a pure function, safe to call from parallel grid evaluation.

use std::fmt;
use std::sync::Arc;

use num_complex::{Complex, Complex64};

use crate::dd::Real;
use crate::error::GeometryError;

/// Minimum sampled clearance certified between island closures and between
/// lakes and the outer boundary.
pub const DISJOINTNESS_TOL: f64 = 1e-9;

/// Default number of boundary samples cached per Jordan curve; used for
/// winding-number membership and sampled boundary distance.
pub const JORDAN_SAMPLES: usize = 1024;

/// Which point set of a scene a query refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    /// The archipelago `G`: union of open islands.
    G,
    /// `G* = G` minus the lake closures.
    GStar,
    /// The lakes `K`.
    K,
}

/// Which boundary set a distance query refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Island boundaries only.
    Gamma,
    /// Island and lake boundaries.
    GammaStar,
}

/// Closed boundary curve given by a parametrization of `[0, 2pi)`.
pub trait BoundarySampler: Send + Sync {
    /// Point on the curve at parameter `t`.
    fn point(&self, t: f64) -> Complex64;
    /// Derivative dz/dt at parameter `t`.
    fn derivative(&self, t: f64) -> Complex64;
}

/// A Jordan-curve region, represented by its boundary parametrization only.
/// Interior membership and distances use the cached sample polyline.
#[derive(Clone)]
pub struct JordanCurve {
    kind: JordanKind,
    samples: Arc<Vec<Complex64>>,
}

#[derive(Clone)]
enum JordanKind {
    /// Component `component` of `{ |z^m - 1| < r^m }`, the one containing
    /// the m-th root of unity `exp(2 pi i component / m)`. Capacity of the
    /// full boundary is `r`.
    Lemniscate { m: u32, r: f64, component: u32 },
    Custom(Arc<dyn BoundarySampler>),
}

impl fmt::Debug for JordanCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            JordanKind::Lemniscate { m, r, component } => {
                write!(f, "JordanCurve::Lemniscate(m={m}, r={r}, component={component})")
            }
            JordanKind::Custom(_) => write!(f, "JordanCurve::Custom"),
        }
    }
}

impl JordanCurve {
    pub fn lemniscate_component(m: u32, r: f64, component: u32) -> Result<Self, GeometryError> {
        if m == 0 || !(r > 0.0 && r < 1.0) {
            return Err(GeometryError::InvalidPrimitive(format!(
                "lemniscate requires m >= 1 and 0 < r < 1, got m={m}, r={r}"
            )));
        }
        if component >= m {
            return Err(GeometryError::InvalidPrimitive(format!(
                "lemniscate component {component} out of range for m={m}"
            )));
        }
        let kind = JordanKind::Lemniscate { m, r, component };
        let samples = Arc::new(sample_kind(&kind, JORDAN_SAMPLES));
        Ok(JordanCurve { kind, samples })
    }

    /// Wrap a user-supplied closed counterclockwise parametrization.
    /// Closure is checked: `point(0)` must match the `t -> 2pi` limit within
    /// 1e-12 of the curve diameter.
    pub fn custom(sampler: Arc<dyn BoundarySampler>, samples: usize) -> Result<Self, GeometryError> {
        let kind = JordanKind::Custom(sampler);
        let pts = sample_kind(&kind, samples.max(16));
        let diam = polyline_diameter(&pts);
        let closure_gap = {
            let s = match &kind {
                JordanKind::Custom(s) => s,
                _ => unreachable!(),
            };
            (s.point(0.0) - s.point(2.0 * std::f64::consts::PI * (1.0 - 1e-13))).norm()
        };
        if closure_gap > 1e-12 * diam.max(1.0) + 1e-9 * diam {
            return Err(GeometryError::InvalidPrimitive(format!(
                "jordan sampler is not closed: endpoint gap {closure_gap:.3e} vs diameter {diam:.3e}"
            )));
        }
        if signed_area(&pts) <= 0.0 {
            return Err(GeometryError::InvalidPrimitive(
                "jordan sampler must be counterclockwise (positive enclosed area)".into(),
            ));
        }
        Ok(JordanCurve {
            kind,
            samples: Arc::new(pts),
        })
    }

    pub fn point(&self, t: f64) -> Complex64 {
        match &self.kind {
            JordanKind::Lemniscate { m, r, component } => {
                lemniscate_boundary::<f64>(*m, *r, *component, t).0
            }
            JordanKind::Custom(s) => s.point(t),
        }
    }

    pub fn derivative(&self, t: f64) -> Complex64 {
        match &self.kind {
            JordanKind::Lemniscate { m, r, component } => {
                lemniscate_boundary::<f64>(*m, *r, *component, t).1
            }
            JordanKind::Custom(s) => s.derivative(t),
        }
    }

    /// Cached boundary polyline (closed; last point connects to first).
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub(crate) fn lemniscate_params(&self) -> Option<(u32, f64, u32)> {
        match self.kind {
            JordanKind::Lemniscate { m, r, component } => Some((m, r, component)),
            JordanKind::Custom(_) => None,
        }
    }
}

fn sample_kind(kind: &JordanKind, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|q| {
            let t = 2.0 * std::f64::consts::PI * (q as f64) / (n as f64);
            match kind {
                JordanKind::Lemniscate { m, r, component } => {
                    lemniscate_boundary::<f64>(*m, *r, *component, t).0
                }
                JordanKind::Custom(s) => s.point(t),
            }
        })
        .collect()
}

/// Boundary point and derivative of one lemniscate component, in either
/// working precision. The component factor is the m-th root of unity
/// `exp(2 pi i k / m)`; the radial factor is the principal m-th root of
/// `1 + r^m e^{i t}`, refined by Newton steps from an f64 seed so the dd
/// path reaches full precision without a dd exp/log.
pub fn lemniscate_boundary<T: Real>(m: u32, r: f64, component: u32, theta: T) -> (Complex<T>, Complex<T>) {
    let rho_f = r.powi(m as i32);
    let rho = T::from_f64(rho_f);
    let (sin_t, cos_t) = theta.sin_cos();
    let e_it = Complex::new(cos_t, sin_t);
    // u = 1 + rho e^{i t}; |u - 1| = rho < 1 keeps u in the right half plane,
    // so the principal m-th root is well defined and smooth in t.
    let u = Complex::new(T::one() + rho * e_it.re, rho * e_it.im);
    let u64c = Complex64::new(u.re.to_f64(), u.im.to_f64());
    let seed = {
        let (rad, ang) = u64c.to_polar();
        Complex64::from_polar(rad.powf(1.0 / m as f64), ang / m as f64)
    };
    let mut root = Complex::new(T::from_f64(seed.re), T::from_f64(seed.im));
    let m_t = T::from_f64(m as f64);
    for _ in 0..3 {
        // Newton on z^m = u.
        let zm1 = cpow(root, m - 1);
        let f = zm1 * root - u;
        let df = Complex::new(m_t, T::zero()) * zm1;
        root = root - f / df;
    }
    let two_pi_k_over_m = T::pi() * T::from_f64(2.0 * component as f64 / m as f64);
    let (sw, cw) = two_pi_k_over_m.sin_cos();
    let omega = Complex::new(cw, sw);
    let z = omega * root;
    // dz/dt = z * i rho e^{i t} / (m u).
    let i_rho_e = Complex::new(-rho * e_it.im, rho * e_it.re);
    let dz = z * i_rho_e / (Complex::new(m_t, T::zero()) * u);
    (z, dz)
}

/// Integer power of a complex value by repeated squaring.
pub fn cpow<T: Real>(z: Complex<T>, n: u32) -> Complex<T> {
    let mut acc = Complex::new(T::one(), T::zero());
    let mut base = z;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// Simple counterclockwise polygon.
#[derive(Clone, Debug)]
pub struct Polygon {
    vertices: Vec<Complex64>,
}

impl Polygon {
    /// Builds a polygon from at least three finite vertices, rejecting
    /// self-intersections and normalizing orientation to counterclockwise.
    pub fn new(mut vertices: Vec<Complex64>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::InvalidPrimitive(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        for v in &vertices {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(GeometryError::NonFinite);
            }
        }
        let area = signed_area(&vertices);
        if area == 0.0 {
            return Err(GeometryError::InvalidPrimitive(
                "polygon has zero signed area".into(),
            ));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        let poly = Polygon { vertices };
        if !poly.is_simple() {
            return Err(GeometryError::SelfIntersecting);
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// True when no two non-adjacent edges intersect.
    pub fn is_simple(&self) -> bool {
        let v = &self.vertices;
        let n = v.len();
        for i in 0..n {
            let (a1, a2) = (v[i], v[(i + 1) % n]);
            for j in (i + 1)..n {
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (b1, b2) = (v[j], v[(j + 1) % n]);
                if segments_intersect(a1, a2, b1, b2) {
                    return false;
                }
            }
        }
        true
    }

    pub fn contains(&self, z: Complex64) -> bool {
        point_in_polygon(&self.vertices, z)
    }

    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        (0..n)
            .map(|i| point_segment_distance(z, v[i], v[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// A primitive signed region: disks and polygons admit exact moments, Jordan
/// regions go through boundary quadrature.
#[derive(Clone, Debug)]
pub enum PrimitiveRegion {
    Disk { center: Complex64, radius: f64 },
    Polygon(Polygon),
    Jordan(JordanCurve),
}

impl PrimitiveRegion {
    pub fn disk(center: Complex64, radius: f64) -> Result<Self, GeometryError> {
        if !center.re.is_finite() || !center.im.is_finite() || !radius.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if radius <= 0.0 {
            return Err(GeometryError::InvalidPrimitive(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        Ok(PrimitiveRegion::Disk { center, radius })
    }

    /// Open-interior membership. Points on the boundary may land either way.
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            PrimitiveRegion::Disk { center, radius } => (z - center).norm() < *radius,
            PrimitiveRegion::Polygon(p) => p.contains(z),
            PrimitiveRegion::Jordan(j) => point_in_polygon(j.samples(), z),
        }
    }

    /// Distance from `z` to the region boundary. Exact for disks and
    /// polygons, sampled (at the cached density) for Jordan curves.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match self {
            PrimitiveRegion::Disk { center, radius } => ((z - center).norm() - radius).abs(),
            PrimitiveRegion::Polygon(p) => p.boundary_distance(z),
            PrimitiveRegion::Jordan(j) => {
                let s = j.samples();
                let n = s.len();
                (0..n)
                    .map(|i| point_segment_distance(z, s[i], s[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Boundary polyline used for disjointness certification and hulls.
    pub fn boundary_samples(&self, n: usize) -> Vec<Complex64> {
        match self {
            PrimitiveRegion::Disk { center, radius } => (0..n)
                .map(|q| {
                    let t = 2.0 * std::f64::consts::PI * (q as f64) / (n as f64);
                    center + Complex64::from_polar(*radius, t)
                })
                .collect(),
            PrimitiveRegion::Polygon(p) => {
                // Distribute samples along edges proportionally to length,
                // always keeping the vertices themselves.
                let v = p.vertices();
                let mut out = Vec::with_capacity(n + v.len());
                let total: f64 = (0..v.len())
                    .map(|i| (v[(i + 1) % v.len()] - v[i]).norm())
                    .sum();
                for i in 0..v.len() {
                    let a = v[i];
                    let b = v[(i + 1) % v.len()];
                    let len = (b - a).norm();
                    let k = ((n as f64) * len / total).ceil() as usize;
                    for j in 0..k.max(1) {
                        out.push(a + (b - a) * (j as f64 / k.max(1) as f64));
                    }
                }
                out
            }
            PrimitiveRegion::Jordan(j) => {
                if n <= j.samples().len() {
                    j.samples().to_vec()
                } else {
                    (0..n)
                        .map(|q| j.point(2.0 * std::f64::consts::PI * (q as f64) / (n as f64)))
                        .collect()
                }
            }
        }
    }

    /// A point in the open interior (used by nesting checks).
    fn interior_point(&self) -> Complex64 {
        match self {
            PrimitiveRegion::Disk { center, .. } => *center,
            PrimitiveRegion::Polygon(p) => {
                // Centroid works for the convex-ish recovered contours; fall
                // back to a diagonal midpoint probe for concave shapes.
                let v = p.vertices();
                let c = v.iter().sum::<Complex64>() / v.len() as f64;
                if p.contains(c) {
                    return c;
                }
                for i in 0..v.len() {
                    for j in (i + 2)..v.len() {
                        let mid = (v[i] + v[j]) * 0.5;
                        if p.contains(mid) {
                            return mid;
                        }
                    }
                }
                c
            }
            PrimitiveRegion::Jordan(j) => {
                let s = j.samples();
                s.iter().sum::<Complex64>() / s.len() as f64
            }
        }
    }
}

/// An archipelago with lakes: validated so that island closures are pairwise
/// disjoint and every lake sits strictly inside the island union.
#[derive(Clone, Debug)]
pub struct Scene {
    islands: Vec<PrimitiveRegion>,
    lakes: Vec<PrimitiveRegion>,
}

impl Scene {
    pub fn new(islands: Vec<PrimitiveRegion>, lakes: Vec<PrimitiveRegion>) -> Result<Self, GeometryError> {
        if islands.is_empty() {
            return Err(GeometryError::InvalidScene("scene has no islands".into()));
        }
        let scene = Scene { islands, lakes };
        scene.validate()?;
        Ok(scene)
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let samples: Vec<Vec<Complex64>> = self
            .islands
            .iter()
            .map(|r| r.boundary_samples(256))
            .collect();
        // Pairwise disjoint closures: no boundary sample of one island may
        // fall inside (or within tolerance of) the other, and neither may be
        // nested in the other.
        for i in 0..self.islands.len() {
            for j in (i + 1)..self.islands.len() {
                let mut min_d = f64::INFINITY;
                for &p in &samples[i] {
                    if self.islands[j].contains(p) {
                        min_d = 0.0;
                        break;
                    }
                    min_d = min_d.min(self.islands[j].boundary_distance(p));
                }
                for &p in &samples[j] {
                    if min_d == 0.0 || self.islands[i].contains(p) {
                        min_d = 0.0;
                        break;
                    }
                    min_d = min_d.min(self.islands[i].boundary_distance(p));
                }
                if min_d <= DISJOINTNESS_TOL {
                    return Err(GeometryError::InvalidScene(format!(
                        "islands {i} and {j} overlap or touch (sampled separation {min_d:.3e})"
                    )));
                }
                if self.islands[j].contains(self.islands[i].interior_point())
                    || self.islands[i].contains(self.islands[j].interior_point())
                {
                    return Err(GeometryError::InvalidScene(format!(
                        "islands {i} and {j} are nested"
                    )));
                }
            }
        }
        // Lakes must be pairwise disjoint: moment additivity subtracts them
        // individually.
        for i in 0..self.lakes.len() {
            for j in (i + 1)..self.lakes.len() {
                let overlap = self.lakes[i]
                    .boundary_samples(128)
                    .iter()
                    .any(|&p| self.lakes[j].contains(p))
                    || self.lakes[j]
                        .boundary_samples(128)
                        .iter()
                        .any(|&p| self.lakes[i].contains(p))
                    || self.lakes[j].contains(self.lakes[i].interior_point())
                    || self.lakes[i].contains(self.lakes[j].interior_point());
                if overlap {
                    return Err(GeometryError::InvalidScene(format!(
                        "lakes {i} and {j} overlap"
                    )));
                }
            }
        }
        // Every lake strictly inside the island union with positive clearance
        // from the outer boundary.
        for (li, lake) in self.lakes.iter().enumerate() {
            let mut pts = lake.boundary_samples(256);
            pts.push(lake.interior_point());
            for &p in &pts {
                let host = self.islands.iter().find(|isl| isl.contains(p));
                match host {
                    None => {
                        return Err(GeometryError::InvalidScene(format!(
                            "lake {li} is not contained in the islands (point {p} escapes)"
                        )));
                    }
                    Some(isl) => {
                        let d = isl.boundary_distance(p);
                        if d <= DISJOINTNESS_TOL {
                            return Err(GeometryError::InvalidScene(format!(
                                "lake {li} touches the outer boundary (clearance {d:.3e})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn islands(&self) -> &[PrimitiveRegion] {
        &self.islands
    }

    pub fn lakes(&self) -> &[PrimitiveRegion] {
        &self.lakes
    }

    /// Open-set membership for `G`, `G*`, or `K`. Boundary points may return
    /// either value.
    pub fn contains(&self, z: Complex64, which: RegionKind) -> bool {
        let in_g = self.islands.iter().any(|r| r.contains(z));
        match which {
            RegionKind::G => in_g,
            RegionKind::K => self.lakes.iter().any(|r| r.contains(z)),
            RegionKind::GStar => {
                in_g
                    && !self
                        .lakes
                        .iter()
                        .any(|r| r.contains(z) || r.boundary_distance(z) <= DISJOINTNESS_TOL)
            }
        }
    }

    /// Euclidean distance from `z` to the requested boundary set.
    pub fn boundary_distance(&self, z: Complex64, which: BoundaryKind) -> f64 {
        let gamma = self
            .islands
            .iter()
            .map(|r| r.boundary_distance(z))
            .fold(f64::INFINITY, f64::min);
        match which {
            BoundaryKind::Gamma => gamma,
            BoundaryKind::GammaStar => self
                .lakes
                .iter()
                .map(|r| r.boundary_distance(z))
                .fold(gamma, f64::min),
        }
    }

    /// Convex hull of the island union, from `samples_per_region` boundary
    /// samples per island (circle sampling error is r*(pi/n)^2/2).
    pub fn convex_hull(&self, samples_per_region: usize) -> Vec<Complex64> {
        let mut pts = Vec::new();
        for isl in &self.islands {
            pts.extend(isl.boundary_samples(samples_per_region));
        }
        convex_hull(&pts)
    }
}

/// Rectangular evaluation frame with grid resolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Frame {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, nx: usize, ny: usize) -> Result<Self, GeometryError> {
        if !(xmin.is_finite() && xmax.is_finite() && ymin.is_finite() && ymax.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if xmin >= xmax || ymin >= ymax || nx < 2 || ny < 2 {
            return Err(GeometryError::InvalidFrame(format!(
                "need xmin < xmax, ymin < ymax, nx >= 2, ny >= 2; got [{xmin},{xmax}]x[{ymin},{ymax}] {nx}x{ny}"
            )));
        }
        Ok(Frame { xmin, xmax, ymin, ymax, nx, ny })
    }

    pub fn hx(&self) -> f64 {
        (self.xmax - self.xmin) / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        (self.ymax - self.ymin) / self.ny as f64
    }

    /// Grid spacing used for level calibration: the coarser of the two axes.
    pub fn h(&self) -> f64 {
        self.hx().max(self.hy())
    }

    /// Cell-center at grid index (ix, iy).
    pub fn center(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(
            self.xmin + (ix as f64 + 0.5) * self.hx(),
            self.ymin + (iy as f64 + 0.5) * self.hy(),
        )
    }

    /// All nx*ny cell centers, row-major (x varies fastest).
    pub fn grid_points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                out.push(self.center(ix, iy));
            }
        }
        out
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.xmin && z.re <= self.xmax && z.im >= self.ymin && z.im <= self.ymax
    }
}

/// Counterclockwise convex hull by monotone chain. Degenerate input is
/// handled: a single point hulls to itself, collinear points hull to the two
/// extreme segment endpoints.
pub fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    assert!(!points.is_empty(), "convex_hull needs at least one point");
    let mut pts: Vec<Complex64> = points.to_vec();
    pts.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    pts.dedup_by(|a, b| a.re == b.re && a.im == b.im);
    if pts.len() == 1 {
        return pts;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| -> f64 {
        (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
    };
    let mut lower: Vec<Complex64> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Complex64> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Distance from a point to a convex hull (0 inside). The hull must be in
/// counterclockwise order as produced by [`convex_hull`].
pub fn distance_to_convex_hull(hull: &[Complex64], z: Complex64) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => (z - hull[0]).norm(),
        2 => point_segment_distance(z, hull[0], hull[1]),
        n => {
            let mut inside = true;
            let mut min_edge = f64::INFINITY;
            for i in 0..n {
                let a = hull[i];
                let b = hull[(i + 1) % n];
                let cr = (b.re - a.re) * (z.im - a.im) - (b.im - a.im) * (z.re - a.re);
                if cr < 0.0 {
                    inside = false;
                }
                min_edge = min_edge.min(point_segment_distance(z, a, b));
            }
            if inside {
                0.0
            } else {
                min_edge
            }
        }
    }
}

/// Shoelace signed area of a closed polyline (positive = counterclockwise).
pub fn signed_area(vertices: &[Complex64]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        s += a.re * b.im - b.re * a.im;
    }
    0.5 * s
}

fn polyline_diameter(pts: &[Complex64]) -> f64 {
    let hull = convex_hull(pts);
    let mut d = 0.0f64;
    for i in 0..hull.len() {
        for j in (i + 1)..hull.len() {
            d = d.max((hull[i] - hull[j]).norm());
        }
    }
    d
}

/// Crossing-number point-in-polygon test (even-odd rule).
pub fn point_in_polygon(vertices: &[Complex64], z: Complex64) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (vi, vj) = (vertices[i], vertices[j]);
        if (vi.im > z.im) != (vj.im > z.im) {
            let x_cross = vj.re + (vi.re - vj.re) * (z.im - vj.im) / (vi.im - vj.im);
            if z.re < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn point_segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a).re * ab.re + (z - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// Proper or improper intersection of two closed segments.
fn segments_intersect(a1: Complex64, a2: Complex64, b1: Complex64, b2: Complex64) -> bool {
    let d = |p: Complex64, q: Complex64, r: Complex64| {
        (q.re - p.re) * (r.im - p.im) - (q.im - p.im) * (r.re - p.re)
    };
    let d1 = d(b1, b2, a1);
    let d2 = d(b1, b2, a2);
    let d3 = d(a1, a2, b1);
    let d4 = d(a1, a2, b2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Complex64, q: Complex64, r: Complex64| {
        d(p, q, r) == 0.0
            && r.re >= p.re.min(q.re)
            && r.re <= p.re.max(q.re)
            && r.im >= p.im.min(q.im)
            && r.im <= p.im.max(q.im)
    };
    on(b1, b2, a1) || on(b1, b2, a2) || on(a1, a2, b1) || on(a1, a2, b2)
}

/// Distance from a point to a closed polyline (vertex list, wrap-around edge).
pub fn point_polyline_distance(z: Complex64, polyline: &[Complex64], closed: bool) -> f64 {
    let n = polyline.len();
    if n == 0 {
        return f64::INFINITY;
    }
    if n == 1 {
        return (z - polyline[0]).norm();
    }
    let last = if closed { n } else { n - 1 };
    (0..last)
        .map(|i| point_segment_distance(z, polyline[i], polyline[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between two closed polylines, measured on
/// their vertex samples against the other's edges.
pub fn hausdorff_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |from: &[Complex64], to: &[Complex64]| {
        from.iter()
            .map(|&p| point_polyline_distance(p, to, true))
            .fold(0.0f64, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Hausdorff distance between a closed polyline and a circle.
pub fn hausdorff_to_circle(polyline: &[Complex64], center: Complex64, radius: f64) -> f64 {
    let to_circle = polyline
        .iter()
        .map(|&p| ((p - center).norm() - radius).abs())
        .fold(0.0f64, f64::max);
    let n = 2048;
    let from_circle = (0..n)
        .map(|q| {
            let t = 2.0 * std::f64::consts::PI * (q as f64) / (n as f64);
            point_polyline_distance(center + Complex64::from_polar(radius, t), polyline, true)
        })
        .fold(0.0f64, f64::max);
    to_circle.max(from_circle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_disk_scene() -> Scene {
        Scene::new(vec![PrimitiveRegion::disk(c(0.0, 0.0), 1.0).unwrap()], vec![]).unwrap()
    }

    fn disk_with_lake() -> Scene {
        Scene::new(
            vec![PrimitiveRegion::disk(c(0.0, 0.0), 1.0).unwrap()],
            vec![PrimitiveRegion::disk(c(0.0, 0.0), 0.25).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn contains_examples() {
        assert!(unit_disk_scene().contains(c(0.0, 0.0), RegionKind::G));
        assert!(!disk_with_lake().contains(c(0.0, 0.0), RegionKind::GStar));
        // Two islands from the three-disk configuration; z = 2 is the center
        // of the second one.
        let scene = Scene::new(
            vec![
                PrimitiveRegion::disk(c(-1.0, 0.0), 0.5).unwrap(),
                PrimitiveRegion::disk(c(2.0, 0.0), 1.0).unwrap(),
            ],
            vec![],
        )
        .unwrap();
        assert!(scene.contains(c(2.0, 0.0), RegionKind::G));
    }

    #[test]
    fn gstar_subset_of_g() {
        let scene = disk_with_lake();
        for q in 0..500 {
            let t = q as f64 * 0.013;
            let z = c(1.4 * (t).sin() * (0.7 * t).cos(), 1.4 * (1.3 * t).sin());
            if scene.contains(z, RegionKind::GStar) {
                assert!(scene.contains(z, RegionKind::G));
            }
        }
    }

    #[test]
    fn boundary_distance_examples() {
        let scene = unit_disk_scene();
        assert_eq!(scene.boundary_distance(c(0.0, 0.0), BoundaryKind::Gamma), 1.0);
        assert_eq!(scene.boundary_distance(c(2.0, 0.0), BoundaryKind::Gamma), 1.0);
        let square = Scene::new(
            vec![PrimitiveRegion::Polygon(
                Polygon::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]).unwrap(),
            )],
            vec![],
        )
        .unwrap();
        assert_eq!(square.boundary_distance(c(0.5, 0.5), BoundaryKind::Gamma), 0.5);
    }

    #[test]
    fn gamma_star_includes_lakes() {
        let scene = disk_with_lake();
        let z = c(0.0, 0.0);
        assert_eq!(scene.boundary_distance(z, BoundaryKind::Gamma), 1.0);
        assert_eq!(scene.boundary_distance(z, BoundaryKind::GammaStar), 0.25);
    }

    #[test]
    fn hull_drops_interior_point() {
        let hull = convex_hull(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(0.3, 0.3)]);
        assert_eq!(hull.len(), 3);
        for p in [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)] {
            assert!(hull.iter().any(|&h| (h - p).norm() == 0.0));
        }
    }

    #[test]
    fn hull_degenerate_cases() {
        assert_eq!(convex_hull(&[c(2.0, 3.0)]), vec![c(2.0, 3.0)]);
        let hull = convex_hull(&[c(0.0, 0.0), c(1.0, 1.0), c(2.0, 2.0), c(0.5, 0.5)]);
        assert_eq!(hull.len(), 2);
        assert!(hull.contains(&c(0.0, 0.0)) && hull.contains(&c(2.0, 2.0)));
    }

    #[test]
    fn hull_of_circle_samples_keeps_all_in_order() {
        let pts: Vec<Complex64> = (0..100)
            .map(|q| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * q as f64 / 100.0))
            .collect();
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 100);
        // Counterclockwise circular order: strictly increasing angle mod 2pi.
        let angs: Vec<f64> = hull.iter().map(|p| p.im.atan2(p.re)).collect();
        let start = angs
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        for k in 1..angs.len() {
            let a = angs[(start + k - 1) % angs.len()];
            let b = angs[(start + k) % angs.len()];
            assert!(b > a, "hull not in circular order");
        }
    }

    #[test]
    fn grid_points_examples() {
        let f = Frame::new(0.0, 1.0, 0.0, 1.0, 2, 2).unwrap();
        let pts = f.grid_points();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0], c(0.25, 0.25));
        assert_eq!(pts[3], c(0.75, 0.75));

        let f = Frame::new(-2.0, 5.0, -2.0, 2.0, 7, 4).unwrap();
        let pts = f.grid_points();
        assert_eq!(pts.len(), 28);
        assert_eq!(f.hx(), 1.0);
        assert_eq!(f.hy(), 1.0);
        assert_eq!(pts[0], c(-1.5, -1.5));

        let f = Frame::new(0.0, 2.0, 0.0, 3.0, 2, 3).unwrap();
        let pts = f.grid_points();
        assert_eq!(pts.len(), 6);
        // Row-major: x varies fastest.
        assert_eq!(pts[1], c(1.5, 0.5));
        assert_eq!(pts[2], c(0.5, 1.5));
    }

    #[test]
    fn scene_rejects_overlapping_islands() {
        let r = Scene::new(
            vec![
                PrimitiveRegion::disk(c(0.0, 0.0), 1.0).unwrap(),
                PrimitiveRegion::disk(c(1.5, 0.0), 1.0).unwrap(),
            ],
            vec![],
        );
        assert!(r.is_err());
    }

    #[test]
    fn scene_rejects_nested_islands() {
        let r = Scene::new(
            vec![
                PrimitiveRegion::disk(c(0.0, 0.0), 2.0).unwrap(),
                PrimitiveRegion::disk(c(0.0, 0.0), 0.5).unwrap(),
            ],
            vec![],
        );
        assert!(r.is_err());
    }

    #[test]
    fn scene_rejects_lake_touching_boundary() {
        let r = Scene::new(
            vec![PrimitiveRegion::disk(c(0.0, 0.0), 1.0).unwrap()],
            vec![PrimitiveRegion::disk(c(0.5, 0.0), 0.5).unwrap()],
        );
        assert!(r.is_err());
        let r = Scene::new(
            vec![PrimitiveRegion::disk(c(0.0, 0.0), 1.0).unwrap()],
            vec![PrimitiveRegion::disk(c(3.0, 0.0), 0.5).unwrap()],
        );
        assert!(r.is_err());
    }

    #[test]
    fn polygon_orientation_normalized() {
        let p = Polygon::new(vec![c(0.0, 0.0), c(0.0, 1.0), c(1.0, 1.0), c(1.0, 0.0)]).unwrap();
        assert!(p.area() > 0.0);
        let bowtie = Polygon::new(vec![c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert!(bowtie.is_err());
    }

    #[test]
    fn lemniscate_components_close_up() {
        for m in [1u32, 2, 3] {
            for comp in 0..m {
                let j = JordanCurve::lemniscate_component(m, 0.8, comp).unwrap();
                let a = j.point(0.0);
                let b = j.point(2.0 * std::f64::consts::PI - 1e-12);
                assert!((a - b).norm() < 1e-9);
                // On-curve identity |z^m - 1| = r^m.
                for q in 0..32 {
                    let t = 2.0 * std::f64::consts::PI * q as f64 / 32.0;
                    let z = j.point(t);
                    let lhs = (z.powu(m) - 1.0).norm();
                    assert!((lhs - 0.8f64.powi(m as i32)).abs() < 1e-12);
                }
                assert!(signed_area(j.samples()) > 0.0, "component must be ccw");
            }
        }
    }

    #[test]
    fn lemniscate_scene_is_valid() {
        let islands = vec![
            PrimitiveRegion::Jordan(JordanCurve::lemniscate_component(2, 0.8, 0).unwrap()),
            PrimitiveRegion::Jordan(JordanCurve::lemniscate_component(2, 0.8, 1).unwrap()),
        ];
        let scene = Scene::new(islands, vec![]).unwrap();
        assert!(scene.contains(c(1.0, 0.0), RegionKind::G));
        assert!(scene.contains(c(-1.0, 0.0), RegionKind::G));
        assert!(!scene.contains(c(0.0, 0.0), RegionKind::G));
    }

    #[test]
    fn lemniscate_dd_matches_f64() {
        use crate::dd::Dd;
        for q in 0..16 {
            let t = 2.0 * std::f64::consts::PI * q as f64 / 16.0;
            let (z64, dz64) = lemniscate_boundary::<f64>(2, 0.8, 0, t);
            let (zdd, dzdd) = lemniscate_boundary::<Dd>(2, 0.8, 0, Dd::from_f64(t));
            assert!((z64 - c(zdd.re.to_f64(), zdd.im.to_f64())).norm() < 1e-13);
            assert!((dz64 - c(dzdd.re.to_f64(), dzdd.im.to_f64())).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn hull_is_convex_and_contains_inputs(pts in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..40)) {
            let pts: Vec<Complex64> = pts.into_iter().map(|(x, y)| c(x, y)).collect();
            let hull = convex_hull(&pts);
            // Convexity: every consecutive triple turns left (or hull is degenerate).
            if hull.len() >= 3 {
                for i in 0..hull.len() {
                    let o = hull[i];
                    let a = hull[(i + 1) % hull.len()];
                    let b = hull[(i + 2) % hull.len()];
                    let cr = (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re);
                    prop_assert!(cr > 0.0);
                }
            }
            // Containment of every input within tolerance.
            for &p in &pts {
                prop_assert!(distance_to_convex_hull(&hull, p) < 1e-9);
            }
        }
    }
}
