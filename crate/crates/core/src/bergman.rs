//! Orthonormal Bergman polynomial bases built from moment matrices by the
//! Arnoldi Gram-Schmidt process.
//!
//! At step k the vector `z * p_{k-1}` (a coefficient shift) is orthogonalized
//! against `p_0 .. p_{k-1}` in the moment inner product
//! `<a, b> = sum a_i conj(b_j) mu_ij`, with one round of iterative
//! re-orthogonalization, and normalized so the leading coefficient
//! `gamma_k` stays real and positive. The recurrence coefficients form an
//! upper Hessenberg table `H` with `z p_{k-1} = sum_j H[j][k-1] p_j`; its
//! leading k-by-k block is the comrade matrix whose eigenvalues are the zeros
//! of `p_k`.
//!
//! Monomial coefficients are kept for I/O and cross-checks; the Hessenberg
//! recurrence is authoritative for evaluation because coefficients of
//! high-degree orthonormal polynomials are exponentially ill-scaled.

use num_complex::{Complex, Complex64};

use crate::dd::{Dd, Real};
use crate::error::{BergmanError, FormatError};
use crate::moments::{dot_conj, MomentMatrix, MomentTable};
use crate::qd::Qd;
use crate::Precision;

/// Basis data in one working precision.
#[derive(Clone, Debug)]
pub struct BasisData<T: Real> {
    degree: usize,
    gammas: Vec<T>,
    /// coeffs[k][j] = coefficient of z^j in p_k; len k+1.
    coeffs: Vec<Vec<Complex<T>>>,
    /// hess[k-1][i] = H_{i,k-1}, the expansion z p_{k-1} = sum_i H_{i,k-1} p_i;
    /// column k-1 has length k+1 and positive real subdiagonal H_{k,k-1}.
    hess: Vec<Vec<Complex<T>>>,
}

impl<T: Real> BasisData<T> {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gamma(&self, k: usize) -> T {
        self.gammas[k]
    }

    pub fn coeffs(&self, k: usize) -> &[Complex<T>] {
        &self.coeffs[k]
    }

    pub fn hess_column(&self, k: usize) -> &[Complex<T>] {
        &self.hess[k]
    }

    pub fn to_f64(&self) -> BasisData<f64> {
        BasisData {
            degree: self.degree,
            gammas: self.gammas.iter().map(|g| g.to_f64()).collect(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.iter().map(|v| Complex64::new(v.re.to_f64(), v.im.to_f64())).collect())
                .collect(),
            hess: self
                .hess
                .iter()
                .map(|c| c.iter().map(|v| Complex64::new(v.re.to_f64(), v.im.to_f64())).collect())
                .collect(),
        }
    }
}

/// Diagnostics of an early stop: at `degree` the orthogonalized direction had
/// squared norm `ratio` times the shifted vector's, below the breakdown
/// tolerance of the working precision — the Gram form is numerically
/// semidefinite from that degree on.
#[derive(Clone, Copy, Debug)]
pub struct Breakdown {
    pub degree: usize,
    pub ratio: f64,
}

/// Wide-precision payload retained alongside the f64 view.
#[derive(Clone, Debug)]
pub enum HighPrecData {
    None,
    Dd(BasisData<Dd>),
    Qd(BasisData<Qd>),
}

/// Orthonormal polynomial system with leading coefficients, Arnoldi
/// Hessenberg data, and per-degree re-orthogonalization residuals.
#[derive(Clone, Debug)]
pub struct BergmanBasis {
    precision: Precision,
    view: BasisData<f64>,
    high: HighPrecData,
    residuals: Vec<f64>,
    breakdown: Option<Breakdown>,
}

impl BergmanBasis {
    pub fn degree(&self) -> usize {
        self.view.degree
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// f64 view used by all evaluation paths.
    pub fn view(&self) -> &BasisData<f64> {
        &self.view
    }

    pub fn extended(&self) -> Option<&BasisData<Dd>> {
        match &self.high {
            HighPrecData::Dd(d) => Some(d),
            _ => None,
        }
    }

    pub fn quad(&self) -> Option<&BasisData<Qd>> {
        match &self.high {
            HighPrecData::Qd(d) => Some(d),
            _ => None,
        }
    }

    pub fn gamma(&self, k: usize) -> f64 {
        self.view.gammas[k]
    }

    /// Natural log of `gamma_k`, evaluated in the widest precision held.
    pub fn gamma_ln(&self, k: usize) -> f64 {
        match &self.high {
            HighPrecData::None => self.view.gammas[k].ln(),
            HighPrecData::Dd(d) => d.gammas[k].to_f64().ln(),
            HighPrecData::Qd(d) => d.gammas[k].to_f64().ln(),
        }
    }

    /// Max re-orthogonalization correction per degree, relative to the
    /// shifted vector norm; a cheap orthonormality-defect monitor.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn breakdown(&self) -> Option<Breakdown> {
        self.breakdown
    }

    /// Largest degree whose build kept every re-orthogonalization residual
    /// at or below `tol`. Degrees past this point carry directions the Gram
    /// conditioning could no longer orthogonalize at working precision; their
    /// values distort Christoffel fields silently (no breakdown fires because
    /// roundoff keeps the norms positive).
    pub fn usable_degree(&self, tol: f64) -> usize {
        let mut k = 0usize;
        for (d, &r) in self.residuals.iter().enumerate() {
            if r <= tol {
                k = d;
            } else {
                break;
            }
        }
        k
    }
}

fn arnoldi<T: Real>(moments: &MomentTable<T>, n: usize) -> Result<(BasisData<T>, Vec<f64>, Option<Breakdown>), BergmanError> {
    if n > moments.degree() {
        return Err(BergmanError::DegreeTooHigh {
            requested: n,
            available: moments.degree(),
        });
    }
    let mu00 = moments.get(0, 0).re;
    let scale00 = moments.get(0, 0).norm_sqr().to_f64().sqrt();
    if !(mu00.to_f64() > 0.0) || mu00.to_f64() <= T::BREAKDOWN_TOL * scale00.max(1.0) {
        return Err(BergmanError::Breakdown {
            degree: 0,
            ratio: mu00.to_f64(),
        });
    }
    let czero = Complex::new(T::zero(), T::zero());
    let g0 = T::one() / mu00.sqrt();
    let mut gammas = vec![g0];
    let mut coeffs: Vec<Vec<Complex<T>>> = vec![vec![Complex::new(g0, T::zero())]];
    let mut hess: Vec<Vec<Complex<T>>> = Vec::new();
    let mut residuals = vec![0.0f64];
    let mut breakdown = None;

    for k in 1..=n {
        // v = z * p_{k-1}: shift coefficients up one degree.
        let mut v = vec![czero; k + 1];
        for (j, &c) in coeffs[k - 1].iter().enumerate() {
            v[j + 1] = c;
        }
        let y = moments.left_apply(&v);
        let shifted_norm2 = dot_conj(&y, &v).re;
        // First Gram-Schmidt pass.
        let mut h: Vec<Complex<T>> = Vec::with_capacity(k + 1);
        for p in coeffs.iter() {
            h.push(dot_conj(&y, p));
        }
        for (j, p) in coeffs.iter().enumerate() {
            for (vi, pi) in v.iter_mut().zip(p.iter()) {
                *vi = *vi - h[j] * *pi;
            }
        }
        // One re-orthogonalization pass; its corrections double as the
        // orthonormality-defect monitor.
        let y2 = moments.left_apply(&v);
        let mut max_correction = 0.0f64;
        for (j, p) in coeffs.iter().enumerate() {
            let d = dot_conj(&y2, p);
            max_correction = max_correction.max(d.norm_sqr().to_f64().sqrt());
            h[j] = h[j] + d;
            for (vi, pi) in v.iter_mut().zip(p.iter()) {
                *vi = *vi - d * *pi;
            }
        }
        let y3 = moments.left_apply(&v);
        let norm2 = dot_conj(&y3, &v).re;
        let ratio = norm2.to_f64() / shifted_norm2.to_f64().max(f64::MIN_POSITIVE);
        if !(norm2.to_f64() > 0.0) || ratio <= T::BREAKDOWN_TOL {
            breakdown = Some(Breakdown { degree: k, ratio });
            break;
        }
        let hk = norm2.sqrt();
        let inv = T::one() / hk;
        let pk: Vec<Complex<T>> = v.iter().map(|c| *c * Complex::new(inv, T::zero())).collect();
        // Leading coefficient stays exactly real and positive: the shift and
        // the lower-degree subtractions never touch it, and we divide by a
        // positive real.
        let gk = gammas[k - 1] * inv;
        gammas.push(gk);
        h.push(Complex::new(hk, T::zero()));
        hess.push(h);
        coeffs.push(pk);
        residuals.push(max_correction / shifted_norm2.to_f64().sqrt().max(f64::MIN_POSITIVE));
    }

    let degree = gammas.len() - 1;
    Ok((
        BasisData {
            degree,
            gammas,
            coeffs,
            hess,
        },
        residuals,
        breakdown,
    ))
}

/// Builds the orthonormal basis `p_0 .. p_n` from a moment matrix. On a
/// numerically semidefinite Gram form the largest clean partial basis is
/// returned with breakdown diagnostics; only a degenerate `mu_00` is a hard
/// error.
pub fn orthogonalize(moments: &MomentMatrix, n: usize) -> Result<BergmanBasis, BergmanError> {
    match moments {
        MomentMatrix::Double(t) => {
            let (data, residuals, breakdown) = arnoldi(t, n)?;
            Ok(BergmanBasis {
                precision: Precision::Double,
                view: data.to_f64(),
                high: HighPrecData::None,
                residuals,
                breakdown,
            })
        }
        MomentMatrix::Extended(t) => {
            let (data, residuals, breakdown) = arnoldi(t, n)?;
            Ok(BergmanBasis {
                precision: Precision::Extended,
                view: data.to_f64(),
                high: HighPrecData::Dd(data),
                residuals,
                breakdown,
            })
        }
        MomentMatrix::Quad(t) => {
            let (data, residuals, breakdown) = arnoldi(t, n)?;
            Ok(BergmanBasis {
                precision: Precision::Quad,
                view: data.to_f64(),
                high: HighPrecData::Qd(data),
                residuals,
                breakdown,
            })
        }
    }
}

/// Full orthonormality defect `max |<p_i, p_j> - delta_ij|` over all pairs
/// up to the basis degree, evaluated in the basis precision.
pub fn gram_residual(basis: &BergmanBasis, moments: &MomentMatrix) -> f64 {
    fn defect<T: Real>(data: &BasisData<T>, table: &MomentTable<T>) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..=data.degree {
            let y = table.left_apply(&data.coeffs[i]);
            for j in 0..=i {
                let g = dot_conj(&y, &data.coeffs[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                let err = ((g.re.to_f64() - target).powi(2) + g.im.to_f64().powi(2)).sqrt();
                worst = worst.max(err);
            }
        }
        worst
    }
    match (&basis.high, moments) {
        (HighPrecData::Dd(data), MomentMatrix::Extended(t)) => defect(data, t),
        (HighPrecData::Qd(data), MomentMatrix::Quad(t)) => defect(data, t),
        _ => defect(&basis.view, &moments.to_f64_table()),
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// All basis values at one point, in scaled form `p_k(z) = q_k * exp(s)`,
/// computed by the Hessenberg recurrence with dynamic rescaling so exterior
/// growth at high degree never overflows.
pub struct ScaledValues {
    pub q: Vec<Complex64>,
    pub log_scale: f64,
}

impl ScaledValues {
    pub fn ln_abs(&self, k: usize) -> f64 {
        self.q[k].norm().ln() + self.log_scale
    }

    pub fn value(&self, k: usize) -> Complex64 {
        self.q[k] * self.log_scale.exp()
    }
}

const RESCALE_THRESHOLD: f64 = 1e140;

/// Evaluate `p_0 .. p_n` at `z` by the Hessenberg recurrence.
pub fn eval_scaled(data: &BasisData<f64>, n: usize, z: Complex64) -> ScaledValues {
    assert!(n <= data.degree, "degree {n} exceeds basis degree {}", data.degree);
    let mut q = Vec::with_capacity(n + 1);
    q.push(data.coeffs[0][0]);
    let mut log_scale = 0.0f64;
    for k in 1..=n {
        let col = &data.hess[k - 1];
        let mut next = z * q[k - 1];
        for (j, qv) in q.iter().enumerate() {
            next -= col[j] * qv;
        }
        next /= col[k];
        if next.norm() > RESCALE_THRESHOLD {
            let f = next.norm();
            let inv = 1.0 / f;
            for qv in q.iter_mut() {
                *qv *= inv;
            }
            next *= inv;
            log_scale += f.ln();
        }
        q.push(next);
    }
    ScaledValues { q, log_scale }
}

/// `p_k(z)` by the recurrence (authoritative evaluation path).
pub fn evaluate(basis: &BergmanBasis, k: usize, z: Complex64) -> Complex64 {
    eval_scaled(basis.view(), k, z).value(k)
}

/// `p_k(z)` by monomial Horner; cross-check mode only, ill-scaled at high
/// degree.
pub fn evaluate_horner(basis: &BergmanBasis, k: usize, z: Complex64) -> Complex64 {
    let c = basis.view().coeffs(k);
    let mut acc = Complex64::new(0.0, 0.0);
    for v in c.iter().rev() {
        acc = acc * z + v;
    }
    acc
}

// ---------------------------------------------------------------------------
// Zeros via the comrade (Hessenberg) matrix
// ---------------------------------------------------------------------------

const EIGEN_MAX_SWEEPS_PER_EIGENVALUE: usize = 64;

/// Zeros of `p_k`: the eigenvalues of the leading k-by-k block of the
/// Hessenberg table, by a shifted complex QR iteration. Multiplicities are
/// preserved (each eigenvalue is reported once per occurrence).
pub fn zeros(basis: &BergmanBasis, k: usize) -> Result<Vec<Complex64>, BergmanError> {
    if k < 1 || k > basis.degree() {
        return Err(BergmanError::BasisDegree {
            requested: k,
            available: basis.degree(),
        });
    }
    let data = basis.view();
    let mut h = vec![Complex64::new(0.0, 0.0); k * k];
    for col in 0..k {
        let column = data.hess_column(col);
        for row in 0..=(col + 1).min(k - 1) {
            h[row * k + col] = column[row];
        }
    }
    hessenberg_eigenvalues(&mut h, k)
}

/// Shifted QR on an upper Hessenberg complex matrix (explicit Givens form).
fn hessenberg_eigenvalues(h: &mut [Complex64], n: usize) -> Result<Vec<Complex64>, BergmanError> {
    let mut eigs = Vec::with_capacity(n);
    if n == 0 {
        return Ok(eigs);
    }
    let at = |h: &[Complex64], i: usize, j: usize| h[i * n + j];
    let mut hi = n - 1;
    let mut iters_here = 0usize;
    loop {
        // Deflate converged 1x1 blocks from the bottom.
        while hi > 0 {
            let sub = at(h, hi, hi - 1).norm();
            let scale = at(h, hi, hi).norm() + at(h, hi - 1, hi - 1).norm();
            if sub <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
                h[hi * n + hi - 1] = Complex64::new(0.0, 0.0);
                eigs.push(at(h, hi, hi));
                hi -= 1;
                iters_here = 0;
            } else {
                break;
            }
        }
        if hi == 0 {
            eigs.push(at(h, 0, 0));
            break;
        }
        // Active block [lo..=hi].
        let mut lo = hi;
        while lo > 0 {
            let sub = at(h, lo, lo - 1).norm();
            let scale = at(h, lo, lo).norm() + at(h, lo - 1, lo - 1).norm();
            if sub <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
                h[lo * n + lo - 1] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        iters_here += 1;
        if iters_here > EIGEN_MAX_SWEEPS_PER_EIGENVALUE {
            return Err(BergmanError::EigenNonConvergence(
                EIGEN_MAX_SWEEPS_PER_EIGENVALUE * n,
            ));
        }
        // Wilkinson shift from the trailing 2x2, with a rare exceptional
        // shift to break symmetry stalls.
        let a = at(h, hi - 1, hi - 1);
        let b = at(h, hi - 1, hi);
        let c = at(h, hi, hi - 1);
        let d = at(h, hi, hi);
        let sigma = if iters_here % 24 == 0 {
            d + Complex64::new(c.norm(), 0.0) * Complex64::new(1.0, 0.5).unscale(1.2)
        } else {
            let tr_half = (a + d) * 0.5;
            let disc = ((a - d) * 0.5).powu(2) + b * c;
            let root = disc.sqrt();
            let e1 = tr_half + root;
            let e2 = tr_half - root;
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        // Explicit QR step on the active block: A - sigma I = Q R, then
        // A <- R Q + sigma I via a chain of complex Givens rotations.
        for i in lo..=hi {
            h[i * n + i] -= sigma;
        }
        let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let f = at(h, i, i);
            let g = at(h, i + 1, i);
            let (cr, s) = givens(f, g);
            rotations.push((cr, s));
            for j in i..=hi {
                let x = at(h, i, j);
                let y = at(h, i + 1, j);
                h[i * n + j] = x * cr + y * s;
                h[(i + 1) * n + j] = -x * s.conj() + y * cr;
            }
        }
        for (idx, (cr, s)) in rotations.iter().enumerate() {
            let i = lo + idx;
            let top = lo;
            for r in top..=(i + 1).min(hi) {
                let x = at(h, r, i);
                let y = at(h, r, i + 1);
                h[r * n + i] = x * *cr + y * s.conj();
                h[r * n + i + 1] = -x * *s + y * *cr;
            }
        }
        for i in lo..=hi {
            h[i * n + i] += sigma;
        }
    }
    Ok(eigs)
}

/// Complex Givens rotation: real `c >= 0` and complex `s` with
/// `[c s; -conj(s) c] [f; g] = [r; 0]`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let r = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / r;
    let phase = f / fn_;
    let s = phase * g.conj() / r;
    (c, s)
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Per-degree ratios `gamma_k(B) / gamma_k(A)`, and the capacity-normalized
/// sequence `sqrt((k+1)/pi) / (gamma_k(B) cap^(k+1))` when a capacity is
/// supplied. Computed in extended precision when both bases carry it.
pub struct GammaRatioReport {
    pub ratios: Vec<f64>,
    pub normalized: Option<Vec<f64>>,
}

pub fn gamma_ratio_report(a: &BergmanBasis, b: &BergmanBasis, capacity: Option<f64>) -> Result<GammaRatioReport, BergmanError> {
    if a.degree() != b.degree() {
        return Err(BergmanError::BasisDegree {
            requested: a.degree(),
            available: b.degree(),
        });
    }
    let ratios = match (&a.high, &b.high) {
        (HighPrecData::Dd(da), HighPrecData::Dd(db)) => (0..=a.degree())
            .map(|k| (db.gamma(k) / da.gamma(k)).to_f64())
            .collect(),
        (HighPrecData::Qd(da), HighPrecData::Qd(db)) => (0..=a.degree())
            .map(|k| (db.gamma(k) / da.gamma(k)).to_f64())
            .collect(),
        _ => (0..=a.degree()).map(|k| b.gamma(k) / a.gamma(k)).collect(),
    };
    let normalized = capacity.map(|cap| normalized_gamma_sequence(b, cap));
    Ok(GammaRatioReport { ratios, normalized })
}

/// `sqrt((k+1)/pi) / (gamma_k cap^(k+1))` per degree.
pub fn normalized_gamma_sequence(basis: &BergmanBasis, capacity: f64) -> Vec<f64> {
    match &basis.high {
        HighPrecData::Dd(data) => (0..=data.degree())
            .map(|k| {
                let num = (Dd::from_f64((k + 1) as f64) / Dd::PI).sqrt();
                let den = data.gamma(k) * Dd::from_f64(capacity).powi(k as i32 + 1);
                (num / den).to_f64()
            })
            .collect(),
        HighPrecData::Qd(data) => (0..=data.degree())
            .map(|k| {
                let num = (Qd::from_f64((k + 1) as f64) / Qd::PI).sqrt();
                let den = data.gamma(k) * Qd::from_f64(capacity).powi(k as i32 + 1);
                (num / den).to_f64()
            })
            .collect(),
        HighPrecData::None => (0..=basis.degree())
            .map(|k| {
                let num = (((k + 1) as f64) / std::f64::consts::PI).sqrt();
                // Evaluate in log space: gamma_k cap^(k+1) overflows f64 for
                // small capacities at high degree.
                let ln_den = basis.gamma(k).ln() + (k as f64 + 1.0) * capacity.ln();
                (num.ln() - ln_den).exp()
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// File format
//
//   basis v1 degree=<n> precision=<double|dd>
//   gamma <k> <value...>
//   coef <k> <j> <re...> <im...>
//   h <i> <k> <re...> <im...>
//
// Extended precision stores each number as an exact hi/lo component pair.
// ---------------------------------------------------------------------------

pub fn write_basis(basis: &BergmanBasis) -> String {
    let mut out = String::new();
    let n = basis.degree();
    out.push_str(&format!(
        "basis v1 degree={} precision={}\n",
        n,
        basis.precision().tag()
    ));
    // Each number is serialized as the exact f64 components of its working
    // precision: 1 (double), 2 (dd) or 4 (qd).
    fn emit<T: Real>(out: &mut String, n: usize, data: &BasisData<T>, comps: impl Fn(T) -> Vec<f64>) {
        let fmt_val = |v: T| {
            comps(v)
                .iter()
                .map(|c| format!("{c:.16e}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        for k in 0..=n {
            out.push_str(&format!("gamma {} {}\n", k, fmt_val(data.gamma(k))));
        }
        for k in 0..=n {
            for (j, c) in data.coeffs(k).iter().enumerate() {
                out.push_str(&format!("coef {} {} {} {}\n", k, j, fmt_val(c.re), fmt_val(c.im)));
            }
        }
        for k in 0..n {
            for (i, c) in data.hess_column(k).iter().enumerate() {
                out.push_str(&format!("h {} {} {} {}\n", i, k, fmt_val(c.re), fmt_val(c.im)));
            }
        }
    }
    match &basis.high {
        HighPrecData::None => emit(&mut out, n, basis.view(), |v: f64| vec![v]),
        HighPrecData::Dd(d) => emit(&mut out, n, d, |v: Dd| vec![v.hi(), v.lo()]),
        HighPrecData::Qd(d) => emit(&mut out, n, d, |v: Qd| v.parts().to_vec()),
    }
    out
}

struct BasisRecords {
    gammas: Vec<Vec<f64>>,
    coeffs: Vec<Vec<(Vec<f64>, Vec<f64>)>>,
    hess: Vec<Vec<(Vec<f64>, Vec<f64>)>>,
}

fn assemble_basis<T: Real>(n: usize, rec: &BasisRecords, make: impl Fn(&[f64]) -> T) -> BasisData<T> {
    BasisData {
        degree: n,
        gammas: rec.gammas.iter().map(|v| make(v)).collect(),
        coeffs: rec
            .coeffs
            .iter()
            .map(|row| row.iter().map(|(re, im)| Complex::new(make(re), make(im))).collect())
            .collect(),
        hess: rec
            .hess
            .iter()
            .map(|row| row.iter().map(|(re, im)| Complex::new(make(re), make(im))).collect())
            .collect(),
    }
}

pub fn read_basis(text: &str) -> Result<BergmanBasis, FormatError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(FormatError::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("basis") || fields.next() != Some("v1") {
        return Err(FormatError::Header("expected `basis v1` header".into()));
    }
    let mut degree: Option<usize> = None;
    let mut precision = Precision::Double;
    for f in fields {
        if let Some(d) = f.strip_prefix("degree=") {
            degree = Some(d.parse().map_err(|_| FormatError::Header(format!("bad degree `{d}`")))?);
        } else if let Some(p) = f.strip_prefix("precision=") {
            precision = Precision::from_tag(p)
                .ok_or_else(|| FormatError::Header(format!("unknown precision `{p}`")))?;
        }
    }
    let n = degree.ok_or_else(|| FormatError::Header("missing degree field".into()))?;
    let per_value = match precision {
        Precision::Double => 1,
        Precision::Extended => 2,
        Precision::Quad => 4,
    };

    let zero_pair = || (vec![0.0; per_value], vec![0.0; per_value]);
    let mut rec = BasisRecords {
        gammas: vec![vec![0.0; per_value]; n + 1],
        coeffs: (0..=n).map(|k| vec![zero_pair(); k + 1]).collect(),
        hess: (0..n).map(|k| vec![zero_pair(); k + 2]).collect(),
    };
    let mut gamma_seen = vec![false; n + 1];

    let parse_nums = |lineno: usize, toks: &[&str]| -> Result<Vec<f64>, FormatError> {
        toks.iter()
            .map(|t| {
                t.parse::<f64>().map_err(|_| FormatError::Parse {
                    line: lineno,
                    message: format!("bad number `{t}`"),
                })
            })
            .collect()
    };

    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = |message: String| FormatError::Parse { line: lineno, message };
        match toks[0] {
            "gamma" => {
                if toks.len() != 2 + per_value {
                    return Err(bad(format!("gamma line needs {} fields", 2 + per_value)));
                }
                let k: usize = toks[1].parse().map_err(|_| bad(format!("bad index `{}`", toks[1])))?;
                if k > n {
                    return Err(bad(format!("gamma index {k} exceeds degree {n}")));
                }
                rec.gammas[k] = parse_nums(lineno, &toks[2..])?;
                gamma_seen[k] = true;
            }
            "coef" => {
                if toks.len() != 3 + 2 * per_value {
                    return Err(bad(format!("coef line needs {} fields", 3 + 2 * per_value)));
                }
                let k: usize = toks[1].parse().map_err(|_| bad(format!("bad index `{}`", toks[1])))?;
                let j: usize = toks[2].parse().map_err(|_| bad(format!("bad index `{}`", toks[2])))?;
                if k > n || j > k {
                    return Err(bad(format!("coef index ({k},{j}) out of range")));
                }
                rec.coeffs[k][j] = (
                    parse_nums(lineno, &toks[3..3 + per_value])?,
                    parse_nums(lineno, &toks[3 + per_value..])?,
                );
            }
            "h" => {
                if toks.len() != 3 + 2 * per_value {
                    return Err(bad(format!("h line needs {} fields", 3 + 2 * per_value)));
                }
                let i: usize = toks[1].parse().map_err(|_| bad(format!("bad index `{}`", toks[1])))?;
                let k: usize = toks[2].parse().map_err(|_| bad(format!("bad index `{}`", toks[2])))?;
                if k >= n || i > k + 1 {
                    return Err(bad(format!("h index ({i},{k}) out of range")));
                }
                rec.hess[k][i] = (
                    parse_nums(lineno, &toks[3..3 + per_value])?,
                    parse_nums(lineno, &toks[3 + per_value..])?,
                );
            }
            other => return Err(bad(format!("unknown record `{other}`"))),
        }
    }
    if let Some(k) = gamma_seen.iter().position(|s| !s) {
        return Err(FormatError::Header(format!("missing gamma record for degree {k}")));
    }
    let (view, high) = match precision {
        Precision::Double => {
            let data = assemble_basis::<f64>(n, &rec, |v| v[0]);
            (data, HighPrecData::None)
        }
        Precision::Extended => {
            let data = assemble_basis::<Dd>(n, &rec, |v| Dd::from_parts(v[0], v[1]));
            (data.to_f64(), HighPrecData::Dd(data))
        }
        Precision::Quad => {
            let data = assemble_basis::<Qd>(n, &rec, |v| Qd::from_parts([v[0], v[1], v[2], v[3]]));
            (data.to_f64(), HighPrecData::Qd(data))
        }
    };
    Ok(BergmanBasis {
        precision,
        view,
        high,
        residuals: Vec::new(),
        breakdown: None,
    })
}

pub fn save_basis(basis: &BergmanBasis, path: &std::path::Path) -> Result<(), FormatError> {
    std::fs::write(path, write_basis(basis))?;
    Ok(())
}

pub fn load_basis(path: &std::path::Path) -> Result<BergmanBasis, FormatError> {
    let text = std::fs::read_to_string(path)?;
    read_basis(&text)
}
