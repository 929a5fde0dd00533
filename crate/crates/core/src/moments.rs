//! Complex area moments `mu_ij = integral of z^i conj(z)^j dA` over scenes.
//!
//! Every moment is computed through the boundary reduction
//! `mu_ij = 1/(2 I (j+1)) * closed integral of z^i conj(z)^(j+1) dz`
//! (Green's theorem): exactly for disks (closed form) and polygons
//! (Gauss-Legendre of exactly-integrated polynomial edge integrands), and by
//! periodic trapezoidal quadrature for Jordan boundaries, which is spectrally
//! accurate on analytic curves.
//!
//! Entry computations are pure and independent; tables are immutable once
//! assembled. Hermitian symmetry `mu_ij = conj(mu_ji)` is exact by
//! construction: only `i <= j` is computed, the rest is reflected.

use num_complex::{Complex, Complex64};
use rayon::prelude::*;

use crate::dd::{Dd, Real};
use crate::qd::Qd;
use crate::error::{FormatError, MomentError};
use crate::geometry::{cpow, lemniscate_boundary, JordanCurve, Polygon, PrimitiveRegion, RegionKind, Scene};
use crate::Precision;

/// Hard cap on moment degree; binomial/power recurrences overflow f64 range
/// far beyond any degree the orthogonalization can use.
pub const DEGREE_CAP: usize = 512;

/// Dense Hermitian moment table in one working precision.
#[derive(Clone, Debug)]
pub struct MomentTable<T: Real> {
    degree: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> MomentTable<T> {
    pub fn zeros(degree: usize) -> Self {
        MomentTable {
            degree,
            entries: vec![Complex::new(T::zero(), T::zero()); (degree + 1) * (degree + 1)],
        }
    }

    /// Build from the upper triangle `i <= j`; the lower triangle is the
    /// Hermitian reflection, so symmetry is exact by construction.
    pub fn from_upper(degree: usize, mut upper: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut t = MomentTable::zeros(degree);
        for i in 0..=degree {
            for j in i..=degree {
                let v = upper(i, j);
                t.set_pair(i, j, v);
            }
        }
        t
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.degree + 1) + j
    }

    pub fn set_pair(&mut self, i: usize, j: usize, v: Complex<T>) {
        // Hermitian by construction: the diagonal is projected to its real
        // part (quadrature leaves a spurious imaginary dust there).
        let v = if i == j {
            Complex::new(v.re, T::zero())
        } else {
            v
        };
        let id = self.idx(i, j);
        self.entries[id] = v;
        let jd = self.idx(j, i);
        self.entries[jd] = v.conj();
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[self.idx(i, j)]
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `y_j = sum_i v_i mu_ij` for the moment bilinear form; with it
    /// `<v, p> = sum_j y_j conj(p_j)`.
    pub fn left_apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.degree + 1;
        let mut y = vec![Complex::new(T::zero(), T::zero()); n];
        for (i, &vi) in v.iter().enumerate() {
            if vi.re == T::zero() && vi.im == T::zero() {
                continue;
            }
            let row = &self.entries[i * n..(i + 1) * n];
            for (yj, &m) in y.iter_mut().zip(row.iter()) {
                *yj = *yj + vi * m;
            }
        }
        y
    }

    /// Moment inner product `<a, b> = sum_{i,j} a_i conj(b_j) mu_ij`.
    pub fn inner_product(&self, a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
        let y = self.left_apply(a);
        dot_conj(&y, b)
    }

    pub fn sub(&self, other: &MomentTable<T>) -> MomentTable<T> {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        let mut out = MomentTable::zeros(self.degree);
        for i in 0..self.entries.len() {
            out.entries[i] = self.entries[i] - other.entries[i];
        }
        out
    }

    pub fn add(&self, other: &MomentTable<T>) -> MomentTable<T> {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        let mut out = MomentTable::zeros(self.degree);
        for i in 0..self.entries.len() {
            out.entries[i] = self.entries[i] + other.entries[i];
        }
        out
    }

    pub fn truncated(&self, degree: usize) -> MomentTable<T> {
        assert!(degree <= self.degree);
        MomentTable::from_upper(degree, |i, j| self.get(i, j))
    }

    /// Moments of the same measure about a translated origin:
    /// `mu~_ij = integral (z-c)^i conj(z-c)^j dA`, computed exactly by the
    /// binomial congruence `S mu S^H` with `S_ia = C(i,a) (-c)^(i-a)`.
    pub fn translated(&self, c: Complex<T>) -> MomentTable<T> {
        let n = self.degree;
        let neg_c = -c;
        // Row i of the binomial transform, entries a = 0..=i.
        let mut s: Vec<Vec<Complex<T>>> = Vec::with_capacity(n + 1);
        let one = Complex::new(T::one(), T::zero());
        for i in 0..=n {
            let mut row = vec![Complex::new(T::zero(), T::zero()); i + 1];
            // Walk a = i down to 0: C(i,a) (-c)^(i-a), multiplicatively.
            let mut val = one;
            row[i] = val;
            for a in (0..i).rev() {
                let factor = T::from_f64((a + 1) as f64) / T::from_f64((i - a) as f64);
                val = val * neg_c * Complex::new(factor, T::zero());
                row[a] = val;
            }
            s.push(row);
        }
        // B = S mu.
        let zero = Complex::new(T::zero(), T::zero());
        let rows: Vec<Vec<Complex<T>>> = (0..=n)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![zero; n + 1];
                for (a, sa) in s[i].iter().enumerate() {
                    if sa.re == T::zero() && sa.im == T::zero() {
                        continue;
                    }
                    for (j, slot) in row.iter_mut().enumerate() {
                        *slot = *slot + *sa * self.get(a, j);
                    }
                }
                row
            })
            .collect();
        // mu~ = B S^H, upper triangle only (Hermitian by construction).
        let mut out = MomentTable::zeros(n);
        for i in 0..=n {
            for j in i..=n {
                let mut acc = zero;
                for (b, sb) in s[j].iter().enumerate() {
                    acc = acc + rows[i][b] * sb.conj();
                }
                out.set_pair(i, j, acc);
            }
        }
        out
    }

    pub fn to_f64(&self) -> MomentTable<f64> {
        MomentTable {
            degree: self.degree,
            entries: self
                .entries
                .iter()
                .map(|c| Complex64::new(c.re.to_f64(), c.im.to_f64()))
                .collect(),
        }
    }

    /// Hermitian Cholesky up to `degree`; returns the first pivot index whose
    /// value fails positivity, if any. This is the positive-definiteness
    /// certificate for the Gram form.
    pub fn cholesky_check(&self, degree: usize) -> Result<(), usize> {
        let n = degree + 1;
        let mut l = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            for j in 0..=i {
                // Note the bilinear-form convention: Gram entry (i, j) for
                // monomials is mu_ji = <z^i, z^j>.
                let mut s = self.get(j, i);
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k].conj();
                }
                if i == j {
                    if !(s.re > T::zero()) {
                        return Err(i);
                    }
                    l[i * n + i] = Complex::new(s.re.sqrt(), T::zero());
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn dot_conj<T: Real>(y: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (yj, bj) in y.iter().zip(b.iter()) {
        acc = acc + *yj * bj.conj();
    }
    acc
}

/// Moment matrix in its requested working precision.
#[derive(Clone, Debug)]
pub enum MomentMatrix {
    Double(MomentTable<f64>),
    Extended(MomentTable<Dd>),
    Quad(MomentTable<Qd>),
}

impl MomentMatrix {
    pub fn degree(&self) -> usize {
        match self {
            MomentMatrix::Double(t) => t.degree(),
            MomentMatrix::Extended(t) => t.degree(),
            MomentMatrix::Quad(t) => t.degree(),
        }
    }

    pub fn precision(&self) -> Precision {
        match self {
            MomentMatrix::Double(_) => Precision::Double,
            MomentMatrix::Extended(_) => Precision::Extended,
            MomentMatrix::Quad(_) => Precision::Quad,
        }
    }

    /// Entry in f64 (rounded if the table is wider).
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match self {
            MomentMatrix::Double(t) => t.get(i, j),
            MomentMatrix::Extended(t) => {
                let v = t.get(i, j);
                Complex64::new(v.re.to_f64(), v.im.to_f64())
            }
            MomentMatrix::Quad(t) => {
                let v = t.get(i, j);
                Complex64::new(v.re.to_f64(), v.im.to_f64())
            }
        }
    }

    pub fn mu00(&self) -> f64 {
        self.get(0, 0).re
    }

    pub fn to_f64_table(&self) -> MomentTable<f64> {
        match self {
            MomentMatrix::Double(t) => t.clone(),
            MomentMatrix::Extended(t) => t.to_f64(),
            MomentMatrix::Quad(t) => t.to_f64(),
        }
    }

    /// Entrywise difference; mixed precisions fall back to double.
    pub fn sub(&self, other: &MomentMatrix) -> MomentMatrix {
        match (self, other) {
            (MomentMatrix::Double(a), MomentMatrix::Double(b)) => MomentMatrix::Double(a.sub(b)),
            (MomentMatrix::Extended(a), MomentMatrix::Extended(b)) => {
                MomentMatrix::Extended(a.sub(b))
            }
            (MomentMatrix::Quad(a), MomentMatrix::Quad(b)) => MomentMatrix::Quad(a.sub(b)),
            (a, b) => MomentMatrix::Double(a.to_f64_table().sub(&b.to_f64_table())),
        }
    }

    pub fn truncated(&self, degree: usize) -> MomentMatrix {
        match self {
            MomentMatrix::Double(t) => MomentMatrix::Double(t.truncated(degree)),
            MomentMatrix::Extended(t) => MomentMatrix::Extended(t.truncated(degree)),
            MomentMatrix::Quad(t) => MomentMatrix::Quad(t.truncated(degree)),
        }
    }
}

fn check_cap(i: usize, j: usize) -> Result<(), MomentError> {
    if i > DEGREE_CAP || j > DEGREE_CAP {
        return Err(MomentError::DegreeCap(i.max(j), DEGREE_CAP));
    }
    Ok(())
}

/// Exact disk moment
/// `pi * sum_k C(i,k) C(j,k) c^(i-k) conj(c)^(j-k) rho^(2k+2) / (k+1)`,
/// evaluated by a balanced multiplicative term recurrence so intermediates
/// never exceed the magnitude of the result.
pub fn disk_moment<T: Real>(center: Complex64, radius: f64, i: usize, j: usize) -> Result<Complex<T>, MomentError> {
    check_cap(i, j)?;
    let rho2 = T::from_f64(radius) * T::from_f64(radius);
    let c = Complex::new(T::from_f64(center.re), T::from_f64(center.im));
    let pi = T::pi();
    if center.re == 0.0 && center.im == 0.0 {
        if i != j {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        let k1 = T::from_f64((i + 1) as f64);
        let v = pi * rho2.powi_real(i as i32 + 1) / k1;
        return Ok(Complex::new(v, T::zero()));
    }
    let cc = c.norm_sqr();
    // t_0 = c^i conj(c)^j rho^2.
    let mut term = cpow(c, i as u32) * cpow(c.conj(), j as u32) * Complex::new(rho2, T::zero());
    let mut sum = term;
    let kmax = i.min(j);
    for k in 0..kmax {
        let kf = k as f64;
        let num = T::from_f64((i as f64 - kf) * (j as f64 - kf) * (kf + 1.0));
        let den = T::from_f64((kf + 1.0) * (kf + 1.0) * (kf + 2.0));
        let scale = num / den * rho2 / cc;
        term = term * Complex::new(scale, T::zero());
        sum = sum + term;
    }
    let out = sum * Complex::new(pi, T::zero());
    if !out.re.is_finite() || !out.im.is_finite() {
        return Err(MomentError::Overflow(i, j));
    }
    Ok(out)
}

trait PowiReal: Real {
    fn powi_real(self, n: i32) -> Self;
}
impl<T: Real> PowiReal for T {
    fn powi_real(self, n: i32) -> Self {
        let mut acc = T::one();
        let mut base = self;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            T::one() / acc
        } else {
            acc
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1]. f64 Newton seeds refined in
/// the working precision, so the dd path reaches full accuracy.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..(n + 1) / 2 {
        // Tricomi-style seed, then f64 Newton.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..16 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        // Refine in T.
        let mut xt = T::from_f64(x);
        for _ in 0..3 {
            let (p, dp) = legendre_pair_t::<T>(n, xt);
            xt = xt - p / dp;
        }
        let (_, dp) = legendre_pair_t::<T>(n, xt);
        let one = T::one();
        let w = T::from_f64(2.0) / ((one - xt * xt) * dp * dp);
        nodes.push(xt);
        weights.push(w);
    }
    // Mirror the positive half (stored largest-first) into the full
    // symmetric set, ascending. Odd n keeps the single node at x = 0.
    let m = nodes.len();
    let mut all_nodes = Vec::with_capacity(n);
    let mut all_weights = Vec::with_capacity(n);
    for k in 0..m {
        all_nodes.push(-nodes[k]);
        all_weights.push(weights[k]);
    }
    let skip = n % 2;
    for k in (0..m - skip).rev() {
        all_nodes.push(nodes[k]);
        all_weights.push(weights[k]);
    }
    (all_nodes, all_weights)
}

fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn legendre_pair_t<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=n {
        let kf = T::from_f64(k as f64);
        let two_k_m1 = T::from_f64(2.0 * k as f64 - 1.0);
        let k_m1 = T::from_f64(k as f64 - 1.0);
        let p2 = (two_k_m1 * x * p1 - k_m1 * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_f64(n as f64);
    let dp = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// Exact polygon moment by the boundary reduction, each edge integrated by
/// Gauss-Legendre with enough nodes to integrate the polynomial edge
/// integrand exactly.
pub fn polygon_moment<T: Real>(polygon: &Polygon, i: usize, j: usize) -> Result<Complex<T>, MomentError> {
    check_cap(i, j)?;
    let n_nodes = (i + j + 2).div_ceil(2);
    let (nodes, weights) = gauss_legendre::<T>(n_nodes);
    let v = polygon.vertices();
    let m = v.len();
    let mut acc = Complex::new(T::zero(), T::zero());
    for e in 0..m {
        let a = lift::<T>(v[e]);
        let b = lift::<T>(v[(e + 1) % m]);
        let mid = (a + b) * half::<T>();
        let dir = (b - a) * half::<T>();
        for (x, w) in nodes.iter().zip(weights.iter()) {
            let z = mid + dir * Complex::new(*x, T::zero());
            let val = cpow(z, i as u32) * cpow(z.conj(), (j + 1) as u32);
            acc = acc + val * dir * Complex::new(*w, T::zero());
        }
    }
    Ok(boundary_reduce(acc, j))
}

#[inline]
fn half<T: Real>() -> Complex<T> {
    Complex::new(T::from_f64(0.5), T::zero())
}

#[inline]
fn lift<T: Real>(z: Complex64) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

/// Divide the contour integral `closed integral z^i conj(z)^(j+1) dz` by
/// `2 I (j+1)` to recover the area moment.
#[inline]
fn boundary_reduce<T: Real>(contour: Complex<T>, j: usize) -> Complex<T> {
    let den = T::from_f64(2.0 * (j + 1) as f64);
    // 1/(2 I (j+1)) * w  =  -I/(2(j+1)) * w.
    Complex::new(contour.im / den, -(contour.re / den))
}

/// Trapezoidal (periodic) quadrature of the boundary reduction for one
/// Jordan moment. Returns the value and an error estimate obtained by
/// comparing against half the node count.
pub fn jordan_moment(curve: &JordanCurve, i: usize, j: usize, quad_nodes: usize) -> Result<(Complex64, f64), MomentError> {
    check_cap(i, j)?;
    if quad_nodes < 16 {
        return Err(MomentError::QuadratureDiverged(format!(
            "quad_nodes must be >= 16, got {quad_nodes}"
        )));
    }
    let full = jordan_moment_raw::<f64>(curve, i, j, quad_nodes)?;
    let halfn = jordan_moment_raw::<f64>(curve, i, j, quad_nodes / 2)?;
    let est = (full - halfn).norm();
    let scale = full.norm().max(1e-300);
    if est > 1e-6 * scale.max(1.0) {
        return Err(MomentError::QuadratureDiverged(format!(
            "estimate {est:.3e} for entry ({i},{j}) at {quad_nodes} nodes; increase quad_nodes"
        )));
    }
    Ok((full, est))
}

fn jordan_moment_raw<T: Real>(curve: &JordanCurve, i: usize, j: usize, n: usize) -> Result<Complex<T>, MomentError> {
    let mut acc = Complex::new(T::zero(), T::zero());
    let two_pi = T::pi() + T::pi();
    let n_t = T::from_f64(n as f64);
    for q in 0..n {
        let theta = two_pi * T::from_f64(q as f64) / n_t;
        let (z, dz) = sample_curve::<T>(curve, theta)?;
        let val = cpow(z, i as u32) * cpow(z.conj(), (j + 1) as u32);
        acc = acc + val * dz;
    }
    acc = acc * Complex::new(two_pi / n_t, T::zero());
    if !acc.re.is_finite() || !acc.im.is_finite() {
        return Err(MomentError::Overflow(i, j));
    }
    Ok(boundary_reduce(acc, j))
}

fn sample_curve<T: Real>(curve: &JordanCurve, theta: T) -> Result<(Complex<T>, Complex<T>), MomentError> {
    if let Some((m, r, component)) = curve.lemniscate_params() {
        return Ok(lemniscate_boundary::<T>(m, r, component, theta));
    }
    if std::any::TypeId::of::<T>() == std::any::TypeId::of::<f64>() {
        let t = theta.to_f64();
        let z = curve.point(t);
        let dz = curve.derivative(t);
        Ok((
            Complex::new(T::from_f64(z.re), T::from_f64(z.im)),
            Complex::new(T::from_f64(dz.re), T::from_f64(dz.im)),
        ))
    } else {
        Err(MomentError::ExtendedPrecisionUnsupported)
    }
}

/// Full moment table of a single Jordan region up to `degree`, with the node
/// count doubled until the hardest entry passes a self-consistency test at
/// the working precision.
fn jordan_region_table<T: Real>(curve: &JordanCurve, degree: usize) -> Result<MomentTable<T>, MomentError> {
    let rel_tol = if T::NAME == "dd" { 1e-28 } else { 1e-13 };
    let mut n = 512usize;
    loop {
        let top_full = jordan_moment_raw::<T>(curve, degree, degree, n)?;
        let top_half = jordan_moment_raw::<T>(curve, degree, degree, n / 2)?;
        let err = (top_full - top_half).norm_sqr().to_f64().sqrt();
        let scale = top_full.norm_sqr().to_f64().sqrt().max(1e-300);
        if err <= rel_tol * scale.max(1e-30) {
            break;
        }
        n *= 2;
        if n > (1 << 17) {
            return Err(MomentError::QuadratureDiverged(format!(
                "entry ({degree},{degree}) still moving ({err:.3e} rel {scale:.3e}) at {n} nodes"
            )));
        }
    }
    // Sample once, accumulate every entry from shared power tables.
    let two_pi = T::pi() + T::pi();
    let n_t = T::from_f64(n as f64);
    let zero = Complex::new(T::zero(), T::zero());
    let samples: Result<Vec<_>, MomentError> = (0..n)
        .map(|q| sample_curve::<T>(curve, two_pi * T::from_f64(q as f64) / n_t))
        .collect();
    let samples = samples?;
    let d1 = degree + 1;
    let per_node: Vec<Vec<Complex<T>>> = samples
        .par_iter()
        .map(|(z, dz)| {
            let mut zp = Vec::with_capacity(d1);
            let mut zbp = Vec::with_capacity(d1 + 1);
            let one = Complex::new(T::one(), T::zero());
            zp.push(one);
            zbp.push(one);
            for k in 0..degree {
                let last = zp[k];
                zp.push(last * *z);
            }
            let zb = z.conj();
            for k in 0..=degree {
                let last = zbp[k];
                zbp.push(last * zb);
            }
            let mut local = vec![zero; d1 * d1];
            for i in 0..d1 {
                let zi_dz = zp[i] * *dz;
                for j in i..d1 {
                    local[i * d1 + j] = zi_dz * zbp[j + 1];
                }
            }
            local
        })
        .collect();
    let mut acc = vec![zero; d1 * d1];
    for local in &per_node {
        for (a, l) in acc.iter_mut().zip(local.iter()) {
            *a = *a + *l;
        }
    }
    let step = Complex::new(two_pi / n_t, T::zero());
    let table = MomentTable::from_upper(degree, |i, j| {
        let v = acc[i * d1 + j] * step;
        boundary_reduce(v, j)
    });
    for i in 0..=degree {
        for j in i..=degree {
            let v = table.get(i, j);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(MomentError::Overflow(i, j));
            }
        }
    }
    Ok(table)
}

fn disk_region_table<T: Real>(center: Complex64, radius: f64, degree: usize) -> Result<MomentTable<T>, MomentError> {
    let d1 = degree + 1;
    let rows: Result<Vec<Vec<Complex<T>>>, MomentError> = (0..d1)
        .into_par_iter()
        .map(|i| (i..d1).map(|j| disk_moment::<T>(center, radius, i, j)).collect())
        .collect();
    let rows = rows?;
    Ok(MomentTable::from_upper(degree, |i, j| rows[i][j - i]))
}

fn polygon_region_table<T: Real>(polygon: &Polygon, degree: usize) -> Result<MomentTable<T>, MomentError> {
    check_cap(degree, degree)?;
    let n_nodes = (2 * degree + 2).div_ceil(2);
    let (nodes, weights) = gauss_legendre::<T>(n_nodes);
    let v = polygon.vertices();
    let m = v.len();
    let d1 = degree + 1;
    let zero = Complex::new(T::zero(), T::zero());
    let per_edge: Vec<Vec<Complex<T>>> = (0..m)
        .into_par_iter()
        .map(|e| {
            let a = lift::<T>(v[e]);
            let b = lift::<T>(v[(e + 1) % m]);
            let mid = (a + b) * half::<T>();
            let dir = (b - a) * half::<T>();
            let mut local = vec![zero; d1 * d1];
            for (x, w) in nodes.iter().zip(weights.iter()) {
                let z = mid + dir * Complex::new(*x, T::zero());
                let wdir = dir * Complex::new(*w, T::zero());
                let mut zp = Vec::with_capacity(d1);
                let mut zbp = Vec::with_capacity(d1 + 1);
                let one = Complex::new(T::one(), T::zero());
                zp.push(one);
                for k in 0..degree {
                    let last = zp[k];
                    zp.push(last * z);
                }
                let zb = z.conj();
                zbp.push(one);
                for k in 0..=degree {
                    let last = zbp[k];
                    zbp.push(last * zb);
                }
                for i in 0..d1 {
                    let zi = zp[i] * wdir;
                    for j in i..d1 {
                        local[i * d1 + j] = local[i * d1 + j] + zi * zbp[j + 1];
                    }
                }
            }
            local
        })
        .collect();
    let mut acc = vec![zero; d1 * d1];
    for local in &per_edge {
        for (a, l) in acc.iter_mut().zip(local.iter()) {
            *a = *a + *l;
        }
    }
    let table = MomentTable::from_upper(degree, |i, j| boundary_reduce(acc[i * d1 + j], j));
    for i in 0..=degree {
        let v = table.get(i, i);
        if !v.re.is_finite() {
            return Err(MomentError::Overflow(i, i));
        }
    }
    Ok(table)
}

fn region_table<T: Real>(region: &PrimitiveRegion, degree: usize) -> Result<MomentTable<T>, MomentError> {
    match region {
        PrimitiveRegion::Disk { center, radius } => disk_region_table::<T>(*center, *radius, degree),
        PrimitiveRegion::Polygon(p) => polygon_region_table::<T>(p, degree),
        PrimitiveRegion::Jordan(j) => jordan_region_table::<T>(j, degree),
    }
}

fn scene_table<T: Real>(scene: &Scene, degree: usize, which: RegionKind) -> Result<MomentTable<T>, MomentError> {
    let mut acc = MomentTable::<T>::zeros(degree);
    let regions: &[PrimitiveRegion] = match which {
        RegionKind::G => scene.islands(),
        RegionKind::K => scene.lakes(),
        RegionKind::GStar => {
            let g = scene_table::<T>(scene, degree, RegionKind::G)?;
            let k = scene_table::<T>(scene, degree, RegionKind::K)?;
            return Ok(g.sub(&k));
        }
    };
    for r in regions {
        acc = acc.add(&region_table::<T>(r, degree)?);
    }
    Ok(acc)
}

/// Moments of a scene region up to `degree`, in the requested precision.
/// `G*` moments are the entrywise difference of island and lake moments.
pub fn scene_moments(scene: &Scene, degree: usize, which: RegionKind, precision: Precision) -> Result<MomentMatrix, MomentError> {
    check_cap(degree, degree)?;
    match precision {
        Precision::Double => Ok(MomentMatrix::Double(scene_table::<f64>(scene, degree, which)?)),
        Precision::Extended => Ok(MomentMatrix::Extended(scene_table::<Dd>(scene, degree, which)?)),
        Precision::Quad => Ok(MomentMatrix::Quad(scene_table::<Qd>(scene, degree, which)?)),
    }
}

// ---------------------------------------------------------------------------
// File format
//
//   moments v1 degree=<n> precision=<double|dd>
//   i j re im                  (double; 17 significant digits)
//   i j re_hi re_lo im_hi im_lo  (dd; exact component round-trip)
//
// One line per entry with i <= j; the reader reconstructs the Hermitian
// reflection.
// ---------------------------------------------------------------------------

pub fn write_moments(matrix: &MomentMatrix) -> String {
    let n = matrix.degree();
    let mut out = String::new();
    out.push_str(&format!(
        "moments v1 degree={} precision={}\n",
        n,
        matrix.precision().tag()
    ));
    match matrix {
        MomentMatrix::Double(t) => {
            for i in 0..=n {
                for j in i..=n {
                    let v = t.get(i, j);
                    out.push_str(&format!("{} {} {:.16e} {:.16e}\n", i, j, v.re, v.im));
                }
            }
        }
        MomentMatrix::Extended(t) => {
            for i in 0..=n {
                for j in i..=n {
                    let v = t.get(i, j);
                    out.push_str(&format!(
                        "{} {} {:.16e} {:.16e} {:.16e} {:.16e}\n",
                        i,
                        j,
                        v.re.hi(),
                        v.re.lo(),
                        v.im.hi(),
                        v.im.lo()
                    ));
                }
            }
        }
        MomentMatrix::Quad(t) => {
            for i in 0..=n {
                for j in i..=n {
                    let v = t.get(i, j);
                    let (r, m) = (v.re.parts(), v.im.parts());
                    out.push_str(&format!(
                        "{} {} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}\n",
                        i, j, r[0], r[1], r[2], r[3], m[0], m[1], m[2], m[3]
                    ));
                }
            }
        }
    }
    out
}

pub fn read_moments(text: &str) -> Result<MomentMatrix, FormatError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(FormatError::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let mut degree: Option<usize> = None;
    let mut precision = Precision::Double;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("moments") || fields.next() != Some("v1") {
        return Err(FormatError::Header(
            "expected `moments v1` header".into(),
        ));
    }
    for f in fields {
        if let Some(d) = f.strip_prefix("degree=") {
            degree = Some(d.parse().map_err(|_| FormatError::Header(format!("bad degree `{d}`")))?);
        } else if let Some(p) = f.strip_prefix("precision=") {
            precision = Precision::from_tag(p)
                .ok_or_else(|| FormatError::Header(format!("unknown precision `{p}`")))?;
        }
    }
    let n = degree.ok_or_else(|| FormatError::Header("missing degree field".into()))?;
    let expected = (n + 1) * (n + 2) / 2;
    let mut seen = 0usize;

    let parse_entry = |lineno: usize, line: &str, want: usize| -> Result<(usize, usize, Vec<f64>), FormatError> {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != want + 2 {
            return Err(FormatError::Parse {
                line: lineno,
                message: format!("expected {} fields, found {}", want + 2, toks.len()),
            });
        }
        let i: usize = toks[0].parse().map_err(|_| FormatError::Parse {
            line: lineno,
            message: format!("bad index `{}`", toks[0]),
        })?;
        let j: usize = toks[1].parse().map_err(|_| FormatError::Parse {
            line: lineno,
            message: format!("bad index `{}`", toks[1]),
        })?;
        let mut vals = Vec::with_capacity(want);
        for t in &toks[2..] {
            vals.push(t.parse::<f64>().map_err(|_| FormatError::Parse {
                line: lineno,
                message: format!("bad number `{t}`"),
            })?);
        }
        if i > n || j > n {
            return Err(FormatError::Parse {
                line: lineno,
                message: format!("entry ({i},{j}) exceeds header degree {n}"),
            });
        }
        if i > j {
            return Err(FormatError::Parse {
                line: lineno,
                message: format!("entry ({i},{j}) is below the diagonal"),
            });
        }
        Ok((i, j, vals))
    };

    match precision {
        Precision::Double => {
            let mut t = MomentTable::<f64>::zeros(n);
            for (idx, line) in lines {
                let lineno = idx + 1;
                if line.trim().is_empty() {
                    continue;
                }
                let (i, j, v) = parse_entry(lineno, line, 2)?;
                t.set_pair(i, j, Complex64::new(v[0], v[1]));
                seen += 1;
            }
            if seen != expected {
                return Err(FormatError::Parse {
                    line: seen + 1,
                    message: format!("truncated file: {seen} entries, expected {expected}"),
                });
            }
            Ok(MomentMatrix::Double(t))
        }
        Precision::Extended => {
            let mut t = MomentTable::<Dd>::zeros(n);
            for (idx, line) in lines {
                let lineno = idx + 1;
                if line.trim().is_empty() {
                    continue;
                }
                let (i, j, v) = parse_entry(lineno, line, 4)?;
                t.set_pair(
                    i,
                    j,
                    Complex::new(Dd::from_parts(v[0], v[1]), Dd::from_parts(v[2], v[3])),
                );
                seen += 1;
            }
            if seen != expected {
                return Err(FormatError::Parse {
                    line: seen + 1,
                    message: format!("truncated file: {seen} entries, expected {expected}"),
                });
            }
            Ok(MomentMatrix::Extended(t))
        }
        Precision::Quad => {
            let mut t = MomentTable::<Qd>::zeros(n);
            for (idx, line) in lines {
                let lineno = idx + 1;
                if line.trim().is_empty() {
                    continue;
                }
                let (i, j, v) = parse_entry(lineno, line, 8)?;
                t.set_pair(
                    i,
                    j,
                    Complex::new(
                        Qd::from_parts([v[0], v[1], v[2], v[3]]),
                        Qd::from_parts([v[4], v[5], v[6], v[7]]),
                    ),
                );
                seen += 1;
            }
            if seen != expected {
                return Err(FormatError::Parse {
                    line: seen + 1,
                    message: format!("truncated file: {seen} entries, expected {expected}"),
                });
            }
            Ok(MomentMatrix::Quad(t))
        }
    }
}

pub fn save_moments(matrix: &MomentMatrix, path: &std::path::Path) -> Result<(), FormatError> {
    std::fs::write(path, write_moments(matrix))?;
    Ok(())
}

pub fn load_moments(path: &std::path::Path) -> Result<MomentMatrix, FormatError> {
    let text = std::fs::read_to_string(path)?;
    read_moments(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PrimitiveRegion;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disk_moment_examples() {
        let m00 = disk_moment::<f64>(c(0.0, 0.0), 1.0, 0, 0).unwrap();
        assert_relative_eq!(m00.re, PI, max_relative = 1e-15);
        let m11 = disk_moment::<f64>(c(0.0, 0.0), 1.0, 1, 1).unwrap();
        assert_relative_eq!(m11.re, PI / 2.0, max_relative = 1e-15);
        let m10 = disk_moment::<f64>(c(0.0, 0.0), 1.0, 1, 0).unwrap();
        assert_eq!(m10, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn disk_moment_offcenter_against_quadrature() {
        // Independent 2-D midpoint quadrature oracle on a coarse polar grid.
        let center = c(0.7, -0.3);
        let rho = 0.8;
        for (i, j) in [(0usize, 0usize), (1, 0), (2, 1), (3, 3), (2, 4)] {
            let exact = disk_moment::<f64>(center, rho, i, j).unwrap();
            let mut acc = Complex64::new(0.0, 0.0);
            let nr = 400;
            let nt = 400;
            for a in 0..nr {
                let r = rho * (a as f64 + 0.5) / nr as f64;
                for b in 0..nt {
                    let t = 2.0 * PI * (b as f64 + 0.5) / nt as f64;
                    let z = center + Complex64::from_polar(r, t);
                    acc += z.powu(i as u32) * z.conj().powu(j as u32) * r;
                }
            }
            acc *= rho / nr as f64 * 2.0 * PI / nt as f64;
            assert!(
                (acc - exact).norm() < 2e-4 * exact.norm().max(1.0),
                "({i},{j}): quadrature {acc} vs exact {exact}"
            );
        }
    }

    #[test]
    fn disk_moment_dd_matches_f64() {
        let center = c(0.5, 0.25);
        let v64 = disk_moment::<f64>(center, 0.6, 5, 7).unwrap();
        let vdd = disk_moment::<Dd>(center, 0.6, 5, 7).unwrap();
        assert!((v64 - c(vdd.re.to_f64(), vdd.im.to_f64())).norm() < 1e-15 * v64.norm().max(1e-30));
    }

    #[test]
    fn polygon_moment_examples() {
        let square = Polygon::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]).unwrap();
        let m00 = polygon_moment::<f64>(&square, 0, 0).unwrap();
        assert_relative_eq!(m00.re, 1.0, max_relative = 1e-14);
        assert!(m00.im.abs() < 1e-14);
        // mu_10 = integral of (x + I y) over the unit square = 1/2 + I/2.
        let m10 = polygon_moment::<f64>(&square, 1, 0).unwrap();
        assert_relative_eq!(m10.re, 0.5, max_relative = 1e-14);
        assert_relative_eq!(m10.im, 0.5, max_relative = 1e-14);
        let tri = Polygon::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let t00 = polygon_moment::<f64>(&tri, 0, 0).unwrap();
        assert_relative_eq!(t00.re, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_monomials_exactly() {
        for n in [1usize, 2, 3, 5, 8, 33, 82] {
            let (x, w) = gauss_legendre::<f64>(n);
            assert_eq!(x.len(), n);
            for k in (0..2 * n).step_by(2) {
                let quad: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                let exact = 2.0 / (k as f64 + 1.0);
                assert_relative_eq!(quad, exact, max_relative = 1e-12);
            }
            let s: f64 = w.iter().sum();
            assert_relative_eq!(s, 2.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn gauss_legendre_dd_refines_f64() {
        let (x, w) = gauss_legendre::<Dd>(40);
        let quad = x
            .iter()
            .zip(&w)
            .fold(Dd::ZERO, |acc, (xi, wi)| acc + *wi * xi.powi(20));
        let exact = Dd::from_f64(2.0) / Dd::from_f64(21.0);
        assert!(((quad - exact) / exact).abs().to_f64() < 1e-29);
    }

    #[test]
    fn jordan_circle_matches_disk() {
        // A unit circle as a custom sampler.
        struct Circle;
        impl crate::geometry::BoundarySampler for Circle {
            fn point(&self, t: f64) -> Complex64 {
                Complex64::from_polar(1.0, t)
            }
            fn derivative(&self, t: f64) -> Complex64 {
                Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, t)
            }
        }
        let curve = JordanCurve::custom(std::sync::Arc::new(Circle), 512).unwrap();
        let (v, est) = jordan_moment(&curve, 1, 1, 256).unwrap();
        assert!((v.re - PI / 2.0).abs() < 1e-12, "got {v}");
        assert!(v.im.abs() < 1e-12);
        assert!(est < 1e-12);
        // Degree sweep against the closed form.
        for (i, j) in [(0, 0), (3, 3), (10, 10), (20, 20), (7, 5)] {
            let (v, _) = jordan_moment(&curve, i, j, 512).unwrap();
            let exact = disk_moment::<f64>(c(0.0, 0.0), 1.0, i, j).unwrap();
            assert!((v - exact).norm() <= 1e-12 * exact.norm().max(1.0), "({i},{j})");
        }
    }

    #[test]
    fn jordan_orientation_flips_sign() {
        struct Clockwise;
        impl crate::geometry::BoundarySampler for Clockwise {
            fn point(&self, t: f64) -> Complex64 {
                Complex64::from_polar(1.0, -t)
            }
            fn derivative(&self, t: f64) -> Complex64 {
                Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, -t)
            }
        }
        // The constructor rejects clockwise curves; check the raw quadrature
        // sign convention directly instead.
        let r = JordanCurve::custom(std::sync::Arc::new(Clockwise), 256);
        assert!(r.is_err());
    }

    #[test]
    fn lemniscate_area_against_monte_carlo() {
        use rand::{Rng, SeedableRng};
        let islands = vec![
            PrimitiveRegion::Jordan(JordanCurve::lemniscate_component(2, 0.8, 0).unwrap()),
            PrimitiveRegion::Jordan(JordanCurve::lemniscate_component(2, 0.8, 1).unwrap()),
        ];
        let scene = Scene::new(islands, vec![]).unwrap();
        let m = scene_moments(&scene, 0, RegionKind::G, Precision::Double).unwrap();
        let area = m.mu00();
        assert!(area > 0.0);
        // Seeded Monte-Carlo on the bounding box; sigma ~ 3e-4.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let (x0, x1, y0, y1) = (-1.3f64, 1.3f64, -0.35f64, 0.35f64);
        let total = (x1 - x0) * (y1 - y0);
        let n = 4_000_000usize;
        let mut hits = 0usize;
        for _ in 0..n {
            let z = c(rng.gen_range(x0..x1), rng.gen_range(y0..y1));
            if (z * z - 1.0).norm() < 0.64 {
                hits += 1;
            }
        }
        let mc = total * hits as f64 / n as f64;
        assert!((mc - area).abs() < 1.5e-3, "mc {mc} vs quadrature {area}");
    }

    #[test]
    fn lemniscate_odd_entries_match_closed_form() {
        // Substituting w = z^2 - 1 (each oval maps bijectively onto
        // |w| < r^2 with |dz/dw|^2 = 1/(4|1+w|)) turns a both-odd moment into
        // a polynomial integral over that disk:
        //   mu_{2a+1,2b+1} = (1/2) * disk_moment(center=1, r^2, a, b).
        let islands = vec![
            PrimitiveRegion::Jordan(JordanCurve::lemniscate_component(2, 0.8, 0).unwrap()),
            PrimitiveRegion::Jordan(JordanCurve::lemniscate_component(2, 0.8, 1).unwrap()),
        ];
        let scene = Scene::new(islands, vec![]).unwrap();
        let m = scene_moments(&scene, 7, RegionKind::G, Precision::Double).unwrap();
        for (a, b) in [(0usize, 0usize), (1, 0), (1, 1), (2, 3), (3, 3)] {
            let got = m.get(2 * a + 1, 2 * b + 1);
            let want = disk_moment::<f64>(c(1.0, 0.0), 0.64, a, b).unwrap() * 0.5;
            assert!(
                (got - want).norm() < 1e-12 * want.norm().max(1e-3),
                "({a},{b}): {got} vs {want}"
            );
        }
        // Mixed parity vanishes by the two-fold rotational symmetry.
        assert!(m.get(1, 0).norm() < 1e-13);
        assert!(m.get(2, 1).norm() < 1e-13);
    }

    #[test]
    fn scene_moments_additivity() {
        let scene = Scene::new(
            vec![PrimitiveRegion::disk(c(0.0, 0.0), 1.0).unwrap()],
            vec![PrimitiveRegion::disk(c(0.0, 0.0), 0.25).unwrap()],
        )
        .unwrap();
        let n = 8;
        let g = scene_moments(&scene, n, RegionKind::G, Precision::Double).unwrap();
        let k = scene_moments(&scene, n, RegionKind::K, Precision::Double).unwrap();
        let gs = scene_moments(&scene, n, RegionKind::GStar, Precision::Double).unwrap();
        for i in 0..=n {
            for j in 0..=n {
                let sum = gs.get(i, j) + k.get(i, j);
                assert!((sum - g.get(i, j)).norm() < 1e-15 * g.get(i, j).norm().max(1e-15));
            }
        }
        // Annulus entry (1,1) example: pi/2 - pi (1/4)^4 / 2.
        let expect = PI / 2.0 - PI * 0.25f64.powi(4) / 2.0;
        assert_relative_eq!(gs.get(1, 1).re, expect, max_relative = 1e-14);
    }

    #[test]
    fn no_lakes_gives_zero_k_matrix() {
        let scene = Scene::new(vec![PrimitiveRegion::disk(c(0.0, 0.0), 1.0).unwrap()], vec![]).unwrap();
        let k = scene_moments(&scene, 4, RegionKind::K, Precision::Double).unwrap();
        for i in 0..=4 {
            for j in 0..=4 {
                assert_eq!(k.get(i, j), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn centroid_translation_covariance() {
        let scene = Scene::new(vec![PrimitiveRegion::disk(c(0.0, 0.0), 0.7).unwrap()], vec![]).unwrap();
        let shifted = Scene::new(vec![PrimitiveRegion::disk(c(1.5, -0.5), 0.7).unwrap()], vec![]).unwrap();
        let m = scene_moments(&scene, 1, RegionKind::G, Precision::Double).unwrap();
        let ms = scene_moments(&shifted, 1, RegionKind::G, Precision::Double).unwrap();
        // Row/column convention: mu_{10} = <z^1 conj(z)^0> is the centroid
        // numerator.
        let c0 = m.get(1, 0) / m.get(0, 0);
        let c1 = ms.get(1, 0) / ms.get(0, 0);
        assert!((c1 - c0 - c(1.5, -0.5)).norm() < 1e-13);
    }

    #[test]
    fn regular_polygon_approximates_disk() {
        let n_gon = 4096;
        let verts: Vec<Complex64> = (0..n_gon)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n_gon as f64))
            .collect();
        let poly = Polygon::new(verts).unwrap();
        for (i, j) in [(0usize, 0usize), (1, 1), (4, 4), (5, 5), (3, 7)] {
            if i + j > 10 {
                continue;
            }
            let got = polygon_moment::<f64>(&poly, i, j).unwrap();
            let want = disk_moment::<f64>(c(0.0, 0.0), 1.0, i, j).unwrap();
            if want.norm() > 0.0 {
                assert!(
                    (got - want).norm() / want.norm() < 1e-5,
                    "({i},{j}): rel err {}",
                    (got - want).norm() / want.norm()
                );
            }
        }
    }

    #[test]
    fn hermitian_and_positive_definite() {
        let scene = crate::presets::pentagon_disk_scene();
        let m = scene_moments(&scene, 10, RegionKind::GStar, Precision::Double).unwrap();
        for i in 0..=10 {
            for j in 0..=10 {
                let a = m.get(i, j);
                let b = m.get(j, i).conj();
                assert_eq!(a, b, "hermitian reflection must be exact");
            }
        }
        match &m {
            MomentMatrix::Double(t) => {
                for d in [2usize, 5, 10] {
                    assert!(t.cholesky_check(d).is_ok(), "gram not PD at degree {d}");
                }
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn degree_cap_enforced() {
        let err = disk_moment::<f64>(c(0.0, 0.0), 1.0, 600, 0);
        assert!(matches!(err, Err(MomentError::DegreeCap(600, _))));
    }

    #[test]
    fn moments_io_roundtrip_bit_identical() {
        let scene = Scene::new(
            vec![PrimitiveRegion::disk(c(0.5, 0.0), 1.0).unwrap()],
            vec![PrimitiveRegion::disk(c(0.5, 0.25), 0.2).unwrap()],
        )
        .unwrap();
        for precision in [Precision::Double, Precision::Extended] {
            let m = scene_moments(&scene, 6, RegionKind::GStar, precision).unwrap();
            let text = write_moments(&m);
            let back = read_moments(&text).unwrap();
            assert_eq!(back.degree(), 6);
            assert_eq!(back.precision(), precision);
            match (&m, &back) {
                (MomentMatrix::Double(a), MomentMatrix::Double(b)) => {
                    for i in 0..=6 {
                        for j in 0..=6 {
                            assert_eq!(a.get(i, j), b.get(i, j));
                        }
                    }
                }
                (MomentMatrix::Extended(a), MomentMatrix::Extended(b)) => {
                    for i in 0..=6 {
                        for j in 0..=6 {
                            assert_eq!(a.get(i, j).re.hi(), b.get(i, j).re.hi());
                            assert_eq!(a.get(i, j).re.lo(), b.get(i, j).re.lo());
                            assert_eq!(a.get(i, j).im.hi(), b.get(i, j).im.hi());
                            assert_eq!(a.get(i, j).im.lo(), b.get(i, j).im.lo());
                        }
                    }
                }
                _ => panic!("precision changed in roundtrip"),
            }
        }
    }

    #[test]
    fn truncated_file_reports_line() {
        let scene = Scene::new(vec![PrimitiveRegion::disk(c(0.0, 0.0), 1.0).unwrap()], vec![]).unwrap();
        let m = scene_moments(&scene, 3, RegionKind::G, Precision::Double).unwrap();
        let text = write_moments(&m);
        let cut: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        match read_moments(&cut) {
            Err(FormatError::Parse { line, message }) => {
                assert!(message.contains("truncated"), "{message}");
                assert!(line > 0);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn header_degree_mismatch_rejected() {
        let text = "moments v1 degree=1 precision=double\n0 0 3.0 0.0\n0 1 0.0 0.0\n1 1 1.0 0.0\n2 2 1.0 0.0\n";
        match read_moments(text) {
            Err(FormatError::Parse { message, .. }) => {
                assert!(message.contains("exceeds header degree"), "{message}");
            }
            other => panic!("expected mismatch error, got {other:?}"),
        }
    }
}
