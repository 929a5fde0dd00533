//! Verification suites: each check compares a pipeline quantity against a
//! closed form or a structural bound and reports value, threshold and
//! PASS/FAIL. The `verify` subcommand renders these as a CSV report.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use crate::bergman::{evaluate, gamma_ratio_report, normalized_gamma_sequence, orthogonalize, zeros, BergmanBasis};
use crate::christoffel::{kernel, lambda, lambda_ln};
use crate::error::Error;
use crate::geometry::{convex_hull, distance_to_convex_hull, BoundaryKind, RegionKind, Scene};
use crate::moments::scene_moments;
use crate::oracles::{annulus_kernel_j, check_exterior_bounds, check_nth_root, k_sharp, AnalyticScene};
use crate::presets;
use crate::Precision;

/// One verification check outcome.
#[derive(Clone, Debug)]
pub struct CheckResult {
    /// Machine-readable check id.
    pub check: String,
    /// Short tag naming the property family the check exercises.
    pub reference: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckResult {
    fn upper(check: &str, reference: &str, value: f64, threshold: f64) -> Self {
        CheckResult {
            check: check.into(),
            reference: reference.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }

    fn lower(check: &str, reference: &str, value: f64, threshold: f64) -> Self {
        CheckResult {
            check: check.into(),
            reference: reference.into(),
            value,
            threshold,
            pass: value >= threshold,
        }
    }
}

/// CSV rendering: `check,paper_ref,value,threshold,pass`.
pub fn report_csv(results: &[CheckResult]) -> String {
    let mut out = String::from("check,paper_ref,value,threshold,pass\n");
    for r in results {
        out.push_str(&format!(
            "{},{},{:.6e},{:.6e},{}\n",
            r.check,
            r.reference,
            r.value,
            r.threshold,
            if r.pass { "PASS" } else { "FAIL" }
        ));
    }
    out
}

pub fn suite_names() -> &'static [&'static str] {
    &["disk-annulus", "kernels", "lemniscate", "exterior", "all"]
}

/// Runs a named suite at top degree `n`.
pub fn run_suite(name: &str, n: usize) -> Result<Vec<CheckResult>, Error> {
    match name {
        "disk-annulus" => disk_annulus_suite(n),
        "kernels" => kernels_suite(n),
        "lemniscate" => lemniscate_suite(n),
        "exterior" => exterior_suite(n),
        "all" => {
            let mut all = disk_annulus_suite(n)?;
            all.extend(kernels_suite(n)?);
            all.extend(lemniscate_suite(40.min(n))?);
            all.extend(exterior_suite(n.max(80))?);
            Ok(all)
        }
        other => Err(Error::Reconstruct(crate::error::ReconstructError::Infeasible(
            format!("unknown suite `{other}`; known: {:?}", suite_names()),
        ))),
    }
}

fn disk_basis(n: usize) -> Result<BergmanBasis, Error> {
    let m = scene_moments(&presets::unit_disk_scene(), n, RegionKind::G, Precision::Double)?;
    Ok(orthogonalize(&m, n)?)
}

fn annulus_basis(n: usize, r: f64) -> Result<BergmanBasis, Error> {
    let m = scene_moments(&presets::annulus_scene(r), n, RegionKind::GStar, Precision::Double)?;
    Ok(orthogonalize(&m, n)?)
}

/// Disk vs concentric annulus (r = 1/2): ratio convergence, closeness in
/// `L^2`, exterior Christoffel ratio, and the comparison principle.
fn disk_annulus_suite(n: usize) -> Result<Vec<CheckResult>, Error> {
    let n = n.max(40);
    let r = 0.5f64;
    let disk = disk_basis(n)?;
    let ann = annulus_basis(n, r)?;
    let mut out = Vec::new();

    // Closed-form reproduction of the disk leading coefficients.
    let mut worst = 0.0f64;
    for k in 0..=n {
        let expect = (((k + 1) as f64) / std::f64::consts::PI).sqrt();
        worst = worst.max((disk.gamma(k) / expect - 1.0).abs());
    }
    out.push(CheckResult::upper("disk-gamma-closed-form", "leading-coefficient", worst, 1e-10));

    // Ratio against the annulus closed form, and its geometric decay rate.
    let rep = gamma_ratio_report(&disk, &ann, None)?;
    let mut worst = 0.0f64;
    for k in 0..=n.min(40) {
        let expect = (1.0 - r.powi(2 * k as i32 + 2)).powf(-0.5);
        worst = worst.max((rep.ratios[k] / expect - 1.0).abs());
    }
    out.push(CheckResult::upper("gamma-ratio-closed-form", "ratio-convergence", worst, 1e-8));
    let dev = |k: usize| (rep.ratios[k] - 1.0).abs();
    let q = (dev(12) / dev(2)).powf(1.0 / 10.0);
    out.push(CheckResult::upper("gamma-ratio-geometric-rate", "ratio-convergence", q, 0.3));

    // Exterior Christoffel ratio at fixed points.
    let pts = [
        Complex64::new(2.0, 0.0),
        Complex64::new(-3.0, 0.0),
        Complex64::new(2.0, 2.0),
    ];
    let mut worst = 0.0f64;
    for &z in &pts {
        let ratio = (lambda_ln(ann.view(), n.min(40), z) - lambda_ln(disk.view(), n.min(40), z)).exp();
        worst = worst.max((ratio - 1.0).abs());
    }
    out.push(CheckResult::upper("lambda-ratio-exterior", "christoffel-ratio", worst, 1e-6));

    // L2(G) distance between same-degree polynomials at the top degree.
    let table = scene_moments(&presets::unit_disk_scene(), n, RegionKind::G, Precision::Double)?
        .to_f64_table();
    let k = n.min(40);
    let mut diff: Vec<Complex64> = ann.view().coeffs(k).to_vec();
    for (d, c) in diff.iter_mut().zip(disk.view().coeffs(k)) {
        *d -= c;
    }
    let l2 = table.inner_product(&diff, &diff).re.max(0.0).sqrt();
    out.push(CheckResult::upper("l2-difference-top-degree", "polynomial-closeness", l2, 1e-3));

    // Comparison principle at seeded random points.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut violations = 0usize;
    for _ in 0..500 {
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let ls = lambda_ln(ann.view(), n, z);
        let lf = lambda_ln(disk.view(), n, z);
        if ls > lf + 1e-12 {
            violations += 1;
        }
    }
    out.push(CheckResult::upper("comparison-principle", "christoffel-monotonicity", violations as f64, 0.0));

    // gamma monotone between the holed and full domains.
    let mut violations = 0usize;
    for k in 0..=n {
        if ann.gamma(k) < disk.gamma(k) * (1.0 - 1e-13) {
            violations += 1;
        }
    }
    out.push(CheckResult::upper("gamma-monotone", "leading-coefficient", violations as f64, 0.0));
    Ok(out)
}

/// Kernel partial sums against the closed-form series, and the block
/// structure of the transported kernel.
fn kernels_suite(n: usize) -> Result<Vec<CheckResult>, Error> {
    let n = n.max(60);
    let r = 0.5f64;
    let ann = annulus_basis(n, r)?;
    let mut worst = 0.0f64;
    let steps = 9;
    for a in 0..steps {
        for b in 0..steps {
            let w = Complex64::from_polar(0.9 * (a as f64 / (steps - 1) as f64), 2.3 * a as f64);
            let zeta = Complex64::from_polar(0.9 * (b as f64 / (steps - 1) as f64), 1.1 * b as f64 + 0.4);
            let (j, _) = annulus_kernel_j(w, zeta, r, 1e-14).map_err(to_err)?;
            let k = kernel(&ann, 60.min(n), w, zeta);
            worst = worst.max((k - j).norm() / j.norm());
        }
    }
    let mut out = vec![CheckResult::upper(
        "kernel-partial-sum-vs-series",
        "kernel-series",
        worst,
        1e-3,
    )];

    let disks = vec![(Complex64::new(0.0, 0.0), 1.0), (Complex64::new(3.0, 0.0), 0.5)];
    let v = k_sharp(Complex64::new(0.2, 0.1), Complex64::new(3.1, 0.05), &disks, r).map_err(to_err)?;
    out.push(CheckResult::upper("kernel-cross-island-block", "kernel-block-structure", v.norm(), 0.0));

    let z = Complex64::new(0.62, -0.3);
    let identity = (kernel(&ann, 60.min(n), z, z).re * lambda(&ann, 60.min(n), z) - 1.0).abs();
    out.push(CheckResult::upper("kernel-diagonal-identity", "kernel-diagonal", identity, 1e-12));
    Ok(out)
}

fn to_err(e: crate::error::OracleError) -> Error {
    Error::Reconstruct(crate::error::ReconstructError::Infeasible(e.to_string()))
}

/// Lemniscate (m = 2, r = 0.8) n-th-root and limit-point checks from
/// quadrature moments in extended precision.
fn lemniscate_suite(n: usize) -> Result<Vec<CheckResult>, Error> {
    let n = n.max(40);
    let top = if n % 2 == 0 { n + 1 } else { n };
    let scene = presets::lemniscate_scene(2, 0.8);
    let analytic = AnalyticScene::Lemniscate { m: 2, r: 0.8 };
    let m = scene_moments(&scene, top.max(60), RegionKind::G, Precision::Extended)?;
    let basis = orthogonalize(&m, top.max(60))?;
    let mut out = Vec::new();

    // n-th root of the leading coefficient, capacity-normalized, at n = 40.
    // The polynomial prefactor sqrt((n+1)/pi) makes this converge like
    // exp(ln n / 2n): the true value at n = 40 sits near 1.044, so the 2%
    // gate pinned here reports FAIL; the prefactor-corrected sequence below
    // is the convergent one.
    let rep = check_nth_root(&basis, &analytic, &[], &[40]).map_err(to_err)?;
    out.push(CheckResult::upper(
        "nth-root-gamma-capacity",
        "capacity-limit",
        rep.gamma_deviation[0].abs(),
        0.02,
    ));
    // Prefactor-corrected diagnostic: n-th root of the normalized sequence
    // sqrt((n+1)/pi) / (gamma_n cap^(n+1)) — the quantity with a finite
    // limit at these degrees.
    let normalized = normalized_gamma_sequence(&basis, 0.8);
    let corrected = (normalized[40].abs().ln() / 40.0).exp() - 1.0;
    out.push(CheckResult::upper(
        "nth-root-gamma-corrected",
        "capacity-limit",
        corrected.abs(),
        0.02,
    ));

    // Pointwise n-th roots against the Green function at exterior points.
    let pts = [
        Complex64::new(0.0, 0.4),
        Complex64::new(0.0, -0.4),
        Complex64::new(0.0, 0.5),
    ];
    let rep = check_nth_root(&basis, &analytic, &pts, &[top]).map_err(to_err)?;
    let mut worst = 0.0f64;
    for per_z in &rep.magnitude_ratio {
        for v in per_z {
            worst = worst.max((v - 1.0).abs());
        }
    }
    out.push(CheckResult::upper("nth-root-magnitude", "green-function-limit", worst, 0.02));

    // Two accumulation values of the normalized sequence: even degrees near
    // r, odd degrees near 1.
    let lo = 20usize;
    let hi = 60usize.min(basis.degree());
    let (mut even_sum, mut even_n, mut odd_sum, mut odd_n) = (0.0f64, 0usize, 0.0f64, 0usize);
    for k in lo..=hi {
        if k % 2 == 0 {
            even_sum += normalized[k];
            even_n += 1;
        } else {
            odd_sum += normalized[k];
            odd_n += 1;
        }
    }
    let even_mean = even_sum / even_n as f64;
    let odd_mean = odd_sum / odd_n as f64;
    out.push(CheckResult::upper(
        "limit-points-even-mean",
        "normalized-sequence-clusters",
        (even_mean / 0.8 - 1.0).abs(),
        0.05,
    ));
    out.push(CheckResult::upper(
        "limit-points-odd-mean",
        "normalized-sequence-clusters",
        (odd_mean - 1.0).abs(),
        0.05,
    ));
    Ok(out)
}

/// Exterior growth and boundary-distance structure on the disk scene, plus
/// zero containment in the convex hull.
fn exterior_suite(n: usize) -> Result<Vec<CheckResult>, Error> {
    let n = n.max(80);
    let disk = disk_basis(n)?;
    let scene = AnalyticScene::UnitDisk;
    let mut out = Vec::new();

    // Normalized exterior magnitudes stay in a narrow positive band.
    let pts: Vec<Complex64> = (0..12)
        .map(|q| Complex64::from_polar(2.0, 2.0 * std::f64::consts::PI * q as f64 / 12.0))
        .collect();
    let degrees: Vec<usize> = (10..=n.min(80)).step_by(5).collect();
    let rep = check_exterior_bounds(&disk, &scene, &pts, &degrees).map_err(to_err)?;
    out.push(CheckResult::lower("exterior-band-min", "exterior-growth", rep.min, 1e-8));
    out.push(CheckResult::upper(
        "exterior-band-spread",
        "exterior-growth",
        rep.max / rep.min,
        3.0,
    ));

    // lambda^(1/2) / dist bounded below on interior samples of the annulus
    // pair, excluding 0.1-neighborhoods of hole and boundary.
    let ann = annulus_basis(n.min(80), 0.5)?;
    let geo = presets::annulus_scene(0.5);
    let mut min_ratio = f64::INFINITY;
    for a in 0..40 {
        for b in 0..8 {
            let rho = 0.62 + 0.28 * (b as f64 / 7.0);
            let z = Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * a as f64 / 40.0);
            let dist = geo.boundary_distance(z, BoundaryKind::Gamma);
            if geo.boundary_distance(z, BoundaryKind::GammaStar) < 0.1 || dist < 0.02 {
                continue;
            }
            let v = (0.5 * lambda_ln(ann.view(), n.min(80), z)).exp();
            min_ratio = min_ratio.min(v / dist);
        }
    }
    out.push(CheckResult::lower(
        "interior-sqrt-lambda-over-dist",
        "boundary-distance-bound",
        min_ratio,
        1e-8,
    ));

    // log lambda^(1/2) + n g bounded above uniformly: the per-degree maxima
    // must not grow across n in {20, 40, 80}.
    let ring: Vec<Complex64> = (0..16)
        .map(|q| Complex64::from_polar(1.8, 2.0 * std::f64::consts::PI * q as f64 / 16.0 + 0.1))
        .collect();
    let mut maxima = Vec::new();
    for &deg in &[20usize, 40, 80] {
        let mut m = f64::NEG_INFINITY;
        for &z in &ring {
            let g = scene.green(z).map_err(to_err)?;
            m = m.max(0.5 * lambda_ln(disk.view(), deg, z) + deg as f64 * g);
        }
        maxima.push(m);
    }
    let growth = (maxima[1] - maxima[0]).max(maxima[2] - maxima[1]);
    out.push(CheckResult::upper(
        "exterior-upper-envelope-monotone",
        "christoffel-decay",
        growth,
        1e-9,
    ));

    // Zeros inside the convex hull of the region (dilated by 1e-6).
    let holed_scene = presets::disk_with_lake_scene();
    let star = scene_moments(&holed_scene, n.min(80), RegionKind::GStar, Precision::Double)?;
    let holed = orthogonalize(&star, n.min(80))?;
    let worst = fejer_worst_distance(&holed, &holed_scene, &[n.min(80)])?;
    out.push(CheckResult::upper("fejer-zero-containment", "zero-location", worst, 1e-6));
    Ok(out)
}

/// Largest distance of any computed zero to the scene's convex hull, over
/// the given degrees.
pub fn fejer_worst_distance(basis: &BergmanBasis, scene: &Scene, degrees: &[usize]) -> Result<f64, Error> {
    let hull = scene.convex_hull(65_536);
    let mut worst = 0.0f64;
    for &k in degrees {
        for z in zeros(basis, k)? {
            worst = worst.max(distance_to_convex_hull(&hull, z));
        }
    }
    Ok(worst)
}

/// Convex hull of the zeros of `p_k` is inside the scene hull (helper shared
/// with the acceptance suite).
pub fn hull_of_zeros(basis: &BergmanBasis, k: usize) -> Result<Vec<Complex64>, Error> {
    Ok(convex_hull(&zeros(basis, k)?))
}

/// Sweep `evaluate` consistency between recurrence and Horner on request
/// (diagnostic used by tests and the CLI self-check).
pub fn recurrence_horner_worst(basis: &BergmanBasis, points: &[Complex64], degrees: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for &z in points {
        for &k in degrees {
            let a = evaluate(basis, k, z);
            let b = crate::bergman::evaluate_horner(basis, k, z);
            worst = worst.max((a - b).norm() / a.norm().max(1e-300));
        }
    }
    worst
}
