//! Christoffel functions, kernel partial sums, grid fields, and level-curve
//! extraction.
//!
//! `lambda_n(z)` is the reciprocal of `sum_{k<=n} |p_k(z)|^2`; the sum is
//! accumulated from the rescaled recurrence values so everything effectively
//! happens in log space — outside the region lambda reaches 1e-300 scales at
//! high degree, far below what a naive sum could represent.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bergman::{eval_scaled, BasisData, BergmanBasis};
use crate::error::{FormatError, GeometryError};
use crate::geometry::{signed_area, Frame};

/// What a sampled field's values mean.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldMeaning {
    /// `lambda_n^(1/2)`: decays linearly with the distance to the boundary,
    /// the default reconstruction field.
    LambdaSqrt,
    /// `lambda_n` itself.
    Lambda,
    /// `ln lambda_n` (the only meaning that can go negative).
    LogLambda,
}

impl FieldMeaning {
    pub fn tag(self) -> &'static str {
        match self {
            FieldMeaning::LambdaSqrt => "lambda_sqrt",
            FieldMeaning::Lambda => "lambda",
            FieldMeaning::LogLambda => "log_lambda",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "lambda_sqrt" => Some(FieldMeaning::LambdaSqrt),
            "lambda" => Some(FieldMeaning::Lambda),
            "log_lambda" => Some(FieldMeaning::LogLambda),
            _ => None,
        }
    }

    fn from_ln_lambda(self, ln_lambda: f64) -> f64 {
        match self {
            FieldMeaning::LambdaSqrt => (0.5 * ln_lambda).exp(),
            FieldMeaning::Lambda => ln_lambda.exp(),
            FieldMeaning::LogLambda => ln_lambda,
        }
    }
}

/// `ln lambda_n(z)` from the scaled recurrence values.
pub fn lambda_ln(data: &BasisData<f64>, n: usize, z: Complex64) -> f64 {
    let vals = eval_scaled(data, n, z);
    let sum: f64 = vals.q.iter().map(|q| q.norm_sqr()).sum();
    -(sum.ln() + 2.0 * vals.log_scale)
}

/// `lambda_n(z) = 1 / sum_{k<=n} |p_k(z)|^2`, always positive.
pub fn lambda(basis: &BergmanBasis, n: usize, z: Complex64) -> f64 {
    lambda_ln(basis.view(), n, z).exp()
}

/// Kernel partial sum `K_n(z, zeta) = sum_{k<=n} conj(p_k(zeta)) p_k(z)`.
/// Satisfies `K_n(z, z) = 1 / lambda_n(z)` exactly.
pub fn kernel(basis: &BergmanBasis, n: usize, z: Complex64, zeta: Complex64) -> Complex64 {
    let vz = eval_scaled(basis.view(), n, z);
    let vzeta = eval_scaled(basis.view(), n, zeta);
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in vz.q.iter().zip(vzeta.q.iter()) {
        acc += b.conj() * a;
    }
    acc * (vz.log_scale + vzeta.log_scale).exp()
}

/// Scalar field sampled at the cell centers of a frame, row-major.
#[derive(Clone, Debug)]
pub struct ScalarField {
    pub frame: Frame,
    pub degree: usize,
    pub meaning: FieldMeaning,
    /// values[iy * nx + ix]; finite, and nonnegative except for `LogLambda`.
    pub values: Vec<f64>,
    /// Level-calibration constant `c` (level = c * h) when the field was
    /// produced with a calibrated level in mind.
    pub calibration: Option<f64>,
}

impl ScalarField {
    #[inline]
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.frame.nx + ix]
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// Evaluate the Christoffel field on a grid. Data-parallel over rows;
/// deterministic (each value depends only on its own grid point).
pub fn field(basis: &BergmanBasis, n: usize, frame: Frame, meaning: FieldMeaning) -> ScalarField {
    let data = basis.view();
    assert!(n <= data.degree(), "field degree exceeds basis degree");
    let nx = frame.nx;
    let values: Vec<f64> = (0..frame.ny)
        .into_par_iter()
        .flat_map_iter(|iy| {
            let data = &*data;
            (0..nx).map(move |ix| {
                let z = frame.center(ix, iy);
                meaning.from_ln_lambda(lambda_ln(data, n, z))
            })
        })
        .collect();
    ScalarField {
        frame,
        degree: n,
        meaning,
        values,
        calibration: None,
    }
}

/// The boundary-estimate level for degree `n`, a region area `mu00`, and
/// grid spacing `h`; returned as `(c, level)` with `level = c * h`.
///
/// Calibration rule: on the unit-disk reference at the same degree, the level
/// whose curve has zero mean radial error is the value of `lambda_n^(1/2)`
/// on the circle itself, `sqrt(2 pi / ((n+1)(n+2)))` (the radial profile is
/// strictly decreasing, so that level crosses at radius exactly 1). The
/// reference value is transported to other scales by the area-equivalent
/// radius `sqrt(mu00 / pi)`, under which the square-root Christoffel field is
/// exactly covariant — for a disk of any radius the level curve is then the
/// circle itself at every degree.
pub fn calibrated_level(n: usize, mu00: f64, h: f64) -> (f64, f64) {
    let scale = (mu00 / std::f64::consts::PI).sqrt();
    let level = scale * (2.0 * std::f64::consts::PI / ((n as f64 + 1.0) * (n as f64 + 2.0))).sqrt();
    (level / h, level)
}

/// Radial profile of the unit-disk reference field,
/// `lambda_n^(1/2)(rho) = [sum_{k<=n} (k+1) rho^(2k) / pi]^(-1/2)`.
pub fn disk_profile_sqrt(n: usize, rho: f64) -> f64 {
    let t = rho * rho;
    let mut sum = 0.0f64;
    let mut tk = 1.0f64;
    for k in 0..=n {
        sum += (k as f64 + 1.0) * tk;
        tk *= t;
    }
    (sum / std::f64::consts::PI).powf(-0.5)
}

// ---------------------------------------------------------------------------
// Level curves by marching squares
// ---------------------------------------------------------------------------

/// One extracted level polyline.
#[derive(Clone, Debug)]
pub struct Polyline {
    pub points: Vec<Complex64>,
    pub closed: bool,
}

impl Polyline {
    pub fn enclosed_area(&self) -> f64 {
        if self.closed {
            signed_area(&self.points).abs()
        } else {
            0.0
        }
    }
}

/// Level curves of a field at one level: closed loops are simple by
/// construction of the cell-by-cell extraction; open chains end on the frame
/// border (the symptom of a frame that cuts the region).
#[derive(Clone, Debug)]
pub struct ContourSet {
    pub level: f64,
    pub polylines: Vec<Polyline>,
}

impl ContourSet {
    pub fn closed_count(&self) -> usize {
        self.polylines.iter().filter(|p| p.closed).count()
    }

    pub fn open_count(&self) -> usize {
        self.polylines.iter().filter(|p| !p.closed).count()
    }
}

/// Lattice-edge key: (ix, iy, horizontal?) for the edge starting at grid
/// point (ix, iy) going +x (horizontal) or +y (vertical).
type EdgeKey = (usize, usize, bool);

/// Marching squares with linear interpolation on cell edges. Saddle cells are
/// resolved by the cell-center average rule. Polylines come back ordered by
/// descending enclosed area (closed first, then open chains by length).
pub fn contours(field: &ScalarField, level: f64) -> ContourSet {
    let nx = field.frame.nx;
    let ny = field.frame.ny;
    let val = |ix: usize, iy: usize| field.value(ix, iy);
    let point = |ix: usize, iy: usize| field.frame.center(ix, iy);
    // Interpolated crossing on the edge from (ix,iy) along +x or +y.
    let cross = |key: EdgeKey| -> Complex64 {
        let (ix, iy, horiz) = key;
        let (a, b) = if horiz {
            ((ix, iy), (ix + 1, iy))
        } else {
            ((ix, iy), (ix, iy + 1))
        };
        let va = val(a.0, a.1);
        let vb = val(b.0, b.1);
        let t = if vb == va {
            0.5
        } else {
            ((level - va) / (vb - va)).clamp(0.0, 1.0)
        };
        let pa = point(a.0, a.1);
        let pb = point(b.0, b.1);
        pa + (pb - pa) * t
    };

    // Per-cell segments between edge keys.
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for iy in 0..ny.saturating_sub(1) {
        for ix in 0..nx.saturating_sub(1) {
            let v00 = val(ix, iy) >= level;
            let v10 = val(ix + 1, iy) >= level;
            let v11 = val(ix + 1, iy + 1) >= level;
            let v01 = val(ix, iy + 1) >= level;
            let code = (v00 as u8) | (v10 as u8) << 1 | (v11 as u8) << 2 | (v01 as u8) << 3;
            if code == 0 || code == 15 {
                continue;
            }
            let bottom: EdgeKey = (ix, iy, true);
            let top: EdgeKey = (ix, iy + 1, true);
            let left: EdgeKey = (ix, iy, false);
            let right: EdgeKey = (ix + 1, iy, false);
            match code {
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((top, left)),
                5 | 10 => {
                    // Saddle: split by the cell-center average.
                    let center = 0.25
                        * (val(ix, iy) + val(ix + 1, iy) + val(ix + 1, iy + 1) + val(ix, iy + 1));
                    let center_inside = center >= level;
                    let connect_first = (code == 5) == center_inside;
                    if connect_first {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    // Stitch segments into chains. Each lattice edge carries at most one
    // crossing point, so keys identify shared endpoints exactly.
    use std::collections::HashMap;
    let mut adjacency: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (sid, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(sid);
        adjacency.entry(*b).or_default().push(sid);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();

    for sid in 0..segments.len() {
        if used[sid] {
            continue;
        }
        let (a0, b0) = segments[sid];
        used[sid] = true;
        let mut keys = vec![a0, b0];
        let mut closed = false;
        for pass in 0..2 {
            loop {
                let tip = if pass == 0 { *keys.last().unwrap() } else { keys[0] };
                let next = adjacency
                    .get(&tip)
                    .and_then(|sids| sids.iter().find(|&&s| !used[s]).copied());
                match next {
                    Some(seg) => {
                        used[seg] = true;
                        let (a, b) = segments[seg];
                        let other = if a == tip { b } else { a };
                        if pass == 0 {
                            keys.push(other);
                        } else {
                            keys.insert(0, other);
                        }
                    }
                    None => break,
                }
            }
            if keys.len() > 2 && keys[0] == *keys.last().unwrap() {
                keys.pop();
                closed = true;
                break;
            }
        }
        let points: Vec<Complex64> = keys.into_iter().map(cross).collect();
        if points.len() >= 2 {
            polylines.push(Polyline { points, closed });
        }
    }

    polylines.sort_by(|a, b| {
        (b.closed, b.enclosed_area(), b.points.len())
            .partial_cmp(&(a.closed, a.enclosed_area(), a.points.len()))
            .unwrap()
    });
    ContourSet { level, polylines }
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

/// Field CSV: a `#` header comment with frame, grid, degree, meaning and
/// calibration, then `x,y,value` rows in row-major grid order.
pub fn write_field(field: &ScalarField) -> String {
    let f = &field.frame;
    let mut out = String::new();
    out.push_str(&format!(
        "# field v1 frame={:.16e},{:.16e},{:.16e},{:.16e} grid={},{} n={} meaning={} calib={}\n",
        f.xmin,
        f.xmax,
        f.ymin,
        f.ymax,
        f.nx,
        f.ny,
        field.degree,
        field.meaning.tag(),
        field
            .calibration
            .map(|c| format!("{c:.16e}"))
            .unwrap_or_else(|| "none".into()),
    ));
    out.push_str("x,y,value\n");
    for iy in 0..f.ny {
        for ix in 0..f.nx {
            let z = f.center(ix, iy);
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                z.re,
                z.im,
                field.value(ix, iy)
            ));
        }
    }
    out
}

pub fn read_field(text: &str) -> Result<ScalarField, FormatError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(FormatError::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let header = header
        .strip_prefix("# field v1")
        .ok_or_else(|| FormatError::Header("expected `# field v1` header".into()))?;
    let mut frame_vals: Option<Vec<f64>> = None;
    let mut grid: Option<(usize, usize)> = None;
    let mut degree = 0usize;
    let mut meaning = FieldMeaning::LambdaSqrt;
    let mut calibration = None;
    for tok in header.split_whitespace() {
        if let Some(v) = tok.strip_prefix("frame=") {
            let vals: Result<Vec<f64>, _> = v.split(',').map(str::parse::<f64>).collect();
            frame_vals = Some(vals.map_err(|e| FormatError::Header(format!("bad frame: {e}")))?);
        } else if let Some(v) = tok.strip_prefix("grid=") {
            let parts: Vec<&str> = v.split(',').collect();
            if parts.len() != 2 {
                return Err(FormatError::Header("grid needs nx,ny".into()));
            }
            grid = Some((
                parts[0].parse().map_err(|_| FormatError::Header("bad nx".into()))?,
                parts[1].parse().map_err(|_| FormatError::Header("bad ny".into()))?,
            ));
        } else if let Some(v) = tok.strip_prefix("n=") {
            degree = v.parse().map_err(|_| FormatError::Header("bad degree".into()))?;
        } else if let Some(v) = tok.strip_prefix("meaning=") {
            meaning = FieldMeaning::from_tag(v)
                .ok_or_else(|| FormatError::Header(format!("unknown meaning `{v}`")))?;
        } else if let Some(v) = tok.strip_prefix("calib=") {
            if v != "none" {
                calibration = Some(v.parse().map_err(|_| FormatError::Header("bad calib".into()))?);
            }
        }
    }
    let fv = frame_vals.ok_or_else(|| FormatError::Header("missing frame".into()))?;
    let (nx, ny) = grid.ok_or_else(|| FormatError::Header("missing grid".into()))?;
    if fv.len() != 4 {
        return Err(FormatError::Header("frame needs 4 values".into()));
    }
    let frame = Frame::new(fv[0], fv[1], fv[2], fv[3], nx, ny)
        .map_err(|e: GeometryError| FormatError::Header(e.to_string()))?;
    let mut values = Vec::with_capacity(nx * ny);
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() || line == "x,y,value" {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(FormatError::Parse {
                line: idx + 1,
                message: format!("expected 3 columns, found {}", cols.len()),
            });
        }
        values.push(cols[2].parse::<f64>().map_err(|_| FormatError::Parse {
            line: idx + 1,
            message: format!("bad value `{}`", cols[2]),
        })?);
    }
    if values.len() != nx * ny {
        return Err(FormatError::Parse {
            line: 0,
            message: format!("expected {} values, found {}", nx * ny, values.len()),
        });
    }
    Ok(ScalarField {
        frame,
        degree,
        meaning,
        values,
        calibration,
    })
}

/// Contour CSV: `curve_id,seq,x,y,closed` rows.
pub fn write_contours(set: &ContourSet) -> String {
    let mut out = String::from("curve_id,seq,x,y,closed\n");
    for (cid, poly) in set.polylines.iter().enumerate() {
        for (seq, p) in poly.points.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{}\n",
                cid,
                seq,
                p.re,
                p.im,
                if poly.closed { 1 } else { 0 }
            ));
        }
    }
    out
}

/// Minimal SVG writer: one path per polyline, level carried in stroke
/// metadata, frame mapped to the viewBox (y axis flipped to mathematical
/// orientation).
pub struct SvgDocument {
    frame: Frame,
    body: String,
}

impl SvgDocument {
    pub fn new(frame: Frame) -> Self {
        SvgDocument {
            frame,
            body: String::new(),
        }
    }

    fn map(&self, p: Complex64) -> (f64, f64) {
        (p.re, self.frame.ymin + self.frame.ymax - p.im)
    }

    pub fn add_polyline(&mut self, points: &[Complex64], closed: bool, stroke: &str, level: Option<f64>) {
        if points.is_empty() {
            return;
        }
        let mut d = String::new();
        for (i, &p) in points.iter().enumerate() {
            let (x, y) = self.map(p);
            d.push_str(&format!("{}{:.6} {:.6} ", if i == 0 { "M" } else { "L" }, x, y));
        }
        if closed {
            d.push('Z');
        }
        let level_attr = level
            .map(|l| format!(" data-level=\"{l:.6e}\""))
            .unwrap_or_default();
        self.body.push_str(&format!(
            "  <path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{:.6}\"{}/>\n",
            d.trim_end(),
            stroke,
            self.frame.h() * 0.35,
            level_attr
        ));
    }

    pub fn add_points(&mut self, points: &[Complex64], fill: &str) {
        let r = self.frame.h() * 0.5;
        for &p in points {
            let (x, y) = self.map(p);
            self.body.push_str(&format!(
                "  <circle cx=\"{x:.6}\" cy=\"{y:.6}\" r=\"{r:.6}\" fill=\"{fill}\"/>\n"
            ));
        }
    }

    pub fn finish(self) -> String {
        let f = &self.frame;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">\n{}</svg>\n",
            f.xmin,
            f.ymin,
            f.xmax - f.xmin,
            f.ymax - f.ymin,
            self.body
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::orthogonalize;
    use crate::geometry::RegionKind;
    use crate::moments::scene_moments;
    use crate::presets;
    use crate::Precision;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn disk_basis(n: usize) -> BergmanBasis {
        let m = scene_moments(&presets::unit_disk_scene(), n, RegionKind::G, Precision::Double).unwrap();
        orthogonalize(&m, n).unwrap()
    }

    fn annulus_basis(n: usize) -> BergmanBasis {
        let m = scene_moments(&presets::annulus_scene(0.5), n, RegionKind::GStar, Precision::Double).unwrap();
        orthogonalize(&m, n).unwrap()
    }

    #[test]
    fn lambda_at_disk_center_is_pi() {
        let basis = disk_basis(20);
        for n in [1usize, 5, 20] {
            assert_relative_eq!(lambda(&basis, n, Complex64::new(0.0, 0.0)), PI, max_relative = 1e-12);
        }
    }

    #[test]
    fn lambda_tends_to_bergman_limit_inside() {
        // lambda_n -> pi (1 - |z|^2)^2 inside the disk (geometric series).
        let basis = disk_basis(120);
        for &r in &[0.0, 0.3, 0.5] {
            let z = Complex64::new(r, 0.0);
            let limit = PI * (1.0 - r * r).powi(2);
            let got = lambda(&basis, 120, z);
            let t: f64 = r * r;
            // Tail of sum (k+1) t^k beyond n is ~ (n+2) t^(n+1) / (1-t)^2.
            let tail_rel = 122.0 * t.powi(121) / (1.0 - t).powi(2) * PI / limit;
            assert_relative_eq!(got, limit, max_relative = tail_rel.max(1e-10));
        }
    }

    #[test]
    fn comparison_principle_against_annulus() {
        let n = 40;
        let full = disk_basis(n);
        let holed = annulus_basis(n);
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let l_star = lambda_ln(holed.view(), n, z);
            let l_full = lambda_ln(full.view(), n, z);
            assert!(
                l_star <= l_full + 1e-12,
                "comparison principle violated at {z}: {l_star} vs {l_full}"
            );
        }
    }

    #[test]
    fn kernel_diagonal_inverts_lambda() {
        let basis = annulus_basis(30);
        for &z in &[Complex64::new(0.7, 0.1), Complex64::new(-0.6, 0.55)] {
            let k = kernel(&basis, 30, z, z);
            assert!(k.im.abs() < 1e-12 * k.re);
            assert_relative_eq!(k.re * lambda(&basis, 30, z), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn kernel_hermitian_symmetry() {
        let basis = annulus_basis(25);
        let z = Complex64::new(0.4, 0.3);
        let zeta = Complex64::new(-0.2, 0.8);
        let a = kernel(&basis, 25, z, zeta);
        let b = kernel(&basis, 25, zeta, z).conj();
        assert!((a - b).norm() < 1e-13 * a.norm().max(1e-13));
    }

    #[test]
    fn field_symmetry_and_meanings() {
        let basis = disk_basis(12);
        let frame = Frame::new(-0.5, 0.5, -0.5, 0.5, 2, 2).unwrap();
        let f = field(&basis, 12, frame, FieldMeaning::LambdaSqrt);
        assert_eq!(f.values.len(), 4);
        for &v in &f.values[1..] {
            assert_relative_eq!(v, f.values[0], max_relative = 1e-12);
        }
        let f2 = field(&basis, 12, frame, FieldMeaning::Lambda);
        for (a, b) in f.values.iter().zip(f2.values.iter()) {
            assert_relative_eq!(a * a, *b, max_relative = 1e-12);
        }
        let f3 = field(&basis, 12, frame, FieldMeaning::LogLambda);
        for (a, b) in f2.values.iter().zip(f3.values.iter()) {
            assert_relative_eq!(a.ln(), *b, max_relative = 1e-12);
        }
    }

    #[test]
    fn field_decays_outside() {
        // lambda^(1/2) at distance 0.5 outside the unit circle, degree 80.
        let basis = disk_basis(80);
        let v = lambda_ln(basis.view(), 80, Complex64::new(1.5, 0.0));
        assert!((0.5 * v).exp() < 1e-12, "field value {}", (0.5 * v).exp());
    }

    #[test]
    fn calibrated_level_hits_unit_radius() {
        for n in [20usize, 60] {
            let (_, level) = calibrated_level(n, std::f64::consts::PI, 0.01);
            assert_relative_eq!(disk_profile_sqrt(n, 1.0), level, max_relative = 1e-13);
            assert!(disk_profile_sqrt(n, 0.98) > level);
            assert!(disk_profile_sqrt(n, 1.02) < level);
        }
    }

    #[test]
    fn contours_on_radial_field() {
        // Analytic radial field sampled on a grid; the extracted contour must
        // track the analytic level radius within two grid cells.
        let n = 40;
        let frame = Frame::new(-1.4, 1.4, -1.4, 1.4, 128, 128).unwrap();
        let values: Vec<f64> = (0..128 * 128)
            .map(|i| {
                let z = frame.center(i % 128, i / 128);
                disk_profile_sqrt(n, z.norm())
            })
            .collect();
        let f = ScalarField {
            frame,
            degree: n,
            meaning: FieldMeaning::LambdaSqrt,
            values,
            calibration: None,
        };
        let (_, level) = calibrated_level(n, std::f64::consts::PI, frame.h());
        let set = contours(&f, level);
        assert_eq!(set.closed_count(), 1, "one closed curve expected");
        assert_eq!(set.open_count(), 0);
        let poly = &set.polylines[0];
        let mean_r: f64 = poly.points.iter().map(|p| p.norm()).sum::<f64>() / poly.points.len() as f64;
        assert!((mean_r - 1.0).abs() < 2.0 * frame.h(), "mean radius {mean_r}");
        for p in &poly.points {
            let v = disk_profile_sqrt(n, p.norm());
            assert!(
                (v - level).abs() < 0.05 * level,
                "contour point off-level: {v} vs {level}"
            );
        }
    }

    #[test]
    fn contour_level_above_max_empty() {
        let basis = disk_basis(10);
        let frame = Frame::new(-1.0, 1.0, -1.0, 1.0, 32, 32).unwrap();
        let f = field(&basis, 10, frame, FieldMeaning::LambdaSqrt);
        let (_, hi) = f.min_max();
        let set = contours(&f, hi * 2.0);
        assert!(set.polylines.is_empty());
    }

    #[test]
    fn open_contour_when_frame_cuts_region() {
        // Frame covering only the right half of the disk: the level curve
        // must exit through the border.
        let basis = disk_basis(30);
        let frame = Frame::new(0.0, 1.6, -1.6, 1.6, 96, 96).unwrap();
        let f = field(&basis, 30, frame, FieldMeaning::LambdaSqrt);
        let (_, level) = calibrated_level(30, std::f64::consts::PI, frame.h());
        let set = contours(&f, level);
        assert!(set.open_count() > 0, "expected an open chain");
        for poly in set.polylines.iter().filter(|p| !p.closed) {
            for e in [poly.points[0], *poly.points.last().unwrap()] {
                let d = (e.re - frame.xmin)
                    .min(frame.xmax - e.re)
                    .min(e.im - frame.ymin)
                    .min(frame.ymax - e.im);
                assert!(d <= 1.5 * frame.h(), "open end {e} far from border");
            }
        }
    }

    #[test]
    fn field_io_roundtrip() {
        let basis = disk_basis(8);
        let frame = Frame::new(-1.0, 1.0, -0.5, 0.5, 8, 4).unwrap();
        let mut f = field(&basis, 8, frame, FieldMeaning::LambdaSqrt);
        f.calibration = Some(2.5);
        let text = write_field(&f);
        let back = read_field(&text).unwrap();
        assert_eq!(back.frame, f.frame);
        assert_eq!(back.degree, 8);
        assert_eq!(back.meaning, FieldMeaning::LambdaSqrt);
        assert_eq!(back.calibration, Some(2.5));
        assert_eq!(back.values, f.values);
    }

    #[test]
    fn contour_csv_shape() {
        let set = ContourSet {
            level: 0.25,
            polylines: vec![Polyline {
                points: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                closed: false,
            }],
        };
        let text = write_contours(&set);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "curve_id,seq,x,y,closed");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,0,"));
        assert!(lines[1].ends_with(",0"));
    }

    #[test]
    fn svg_document_structure() {
        let frame = Frame::new(-1.0, 1.0, -1.0, 1.0, 10, 10).unwrap();
        let mut doc = SvgDocument::new(frame);
        doc.add_polyline(
            &[Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.5)],
            false,
            "#004488",
            Some(0.1),
        );
        doc.add_points(&[Complex64::new(0.0, 0.0)], "#000000");
        let text = doc.finish();
        assert!(text.starts_with("<svg"));
        assert!(text.contains("data-level"));
        assert!(text.contains("<circle"));
        assert!(text.ends_with("</svg>\n"));
    }
}
