//! Closed-form reference data and asymptotic checkers: disk/annulus kernels,
//! Green functions with known capacities, and the reports that back the
//! verification suites.
//!
//! Conformal maps are implemented for disk islands only (affine maps onto the
//! unit disk); the transported-kernel oracle is therefore restricted to
//! multi-disk scenes, which is exactly where a closed form exists.

use num_complex::Complex64;

use crate::bergman::{eval_scaled, BergmanBasis};
use crate::error::OracleError;
use crate::geometry::{PrimitiveRegion, Scene};
use crate::presets;

/// Affine conformal map of a disk island onto the unit disk:
/// `phi(z) = (z - center) / radius`, `phi'(z) = 1 / radius`.
#[derive(Clone, Copy, Debug)]
pub struct ConformalDiskMap {
    pub center: Complex64,
    pub radius: f64,
}

impl ConformalDiskMap {
    pub fn apply(&self, z: Complex64) -> Complex64 {
        (z - self.center) / self.radius
    }

    pub fn derivative(&self) -> f64 {
        1.0 / self.radius
    }
}

/// Scenes with known capacity and Green function.
#[derive(Clone, Debug)]
pub enum AnalyticScene {
    UnitDisk,
    OffsetDisk { center: Complex64, radius: f64 },
    /// The annulus inner < |z| < 1 seen as the unit disk with a concentric
    /// lake: the outer boundary is still the unit circle.
    Annulus { inner: f64 },
    /// `{ |z^m - 1| < r^m }`, capacity r.
    Lemniscate { m: u32, r: f64 },
    MultiDisk(Vec<(Complex64, f64)>),
}

impl AnalyticScene {
    /// Logarithmic capacity of the outer boundary, where known.
    pub fn capacity(&self) -> Option<f64> {
        match self {
            AnalyticScene::UnitDisk | AnalyticScene::Annulus { .. } => Some(1.0),
            AnalyticScene::OffsetDisk { radius, .. } => Some(*radius),
            AnalyticScene::Lemniscate { r, .. } => Some(*r),
            AnalyticScene::MultiDisk(_) => None,
        }
    }

    /// Green function of the exterior with pole at infinity; vanishes on the
    /// boundary, behaves like `log|z| + log(1/cap)` near infinity.
    pub fn green(&self, z: Complex64) -> Result<f64, OracleError> {
        let g = match self {
            AnalyticScene::UnitDisk | AnalyticScene::Annulus { .. } => z.norm().ln(),
            AnalyticScene::OffsetDisk { center, radius } => ((z - center).norm() / radius).ln(),
            AnalyticScene::Lemniscate { m, r } => {
                (z.powu(*m) - 1.0).norm().ln() / *m as f64 - r.ln()
            }
            AnalyticScene::MultiDisk(_) => {
                return Err(OracleError::Unsupported(
                    "no closed-form Green function for a general multi-disk scene".into(),
                ))
            }
        };
        if g < -1e-12 {
            return Err(OracleError::PointInside(format!("{z}")));
        }
        Ok(g.max(0.0))
    }

    /// Matching geometry scene for the moment pipelines.
    pub fn to_scene(&self) -> Scene {
        match self {
            AnalyticScene::UnitDisk => presets::unit_disk_scene(),
            AnalyticScene::OffsetDisk { center, radius } => Scene::new(
                vec![PrimitiveRegion::disk(*center, *radius).unwrap()],
                vec![],
            )
            .unwrap(),
            AnalyticScene::Annulus { inner } => presets::annulus_scene(*inner),
            AnalyticScene::Lemniscate { m, r } => presets::lemniscate_scene(*m, *r),
            AnalyticScene::MultiDisk(disks) => Scene::new(
                disks
                    .iter()
                    .map(|(c, r)| PrimitiveRegion::disk(*c, *r).unwrap())
                    .collect(),
                vec![],
            )
            .unwrap(),
        }
    }
}

/// Reproducing kernel of the unit disk with the annulus inner product
/// (monomials have norm `sqrt(pi (1 - r^(2n+2)) / (n+1))` there):
///
/// `J(w, omega) = sum_nu r^(2 nu) / (pi (1 - r^(2 nu) w conj(omega))^2)`.
///
/// The series is truncated once a term falls below `tol`; the term count is
/// returned for diagnostics. `r = 0` collapses to the classical disk Bergman
/// kernel `1 / (pi (1 - w conj(omega))^2)`.
pub fn annulus_kernel_j(
    w: Complex64,
    omega: Complex64,
    r: f64,
    tol: f64,
) -> Result<(Complex64, usize), OracleError> {
    const MAX_TERMS: usize = 10_000;
    let t = w * omega.conj();
    if t.norm() >= 1.0 {
        return Err(OracleError::Divergent(t.norm()));
    }
    let r2 = r * r;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut r2nu = 1.0f64;
    for nu in 0..MAX_TERMS {
        let den = Complex64::new(1.0, 0.0) - t * r2nu;
        let term = r2nu / (std::f64::consts::PI * den * den);
        acc += term;
        if term.norm() < tol {
            return Ok((acc, nu + 1));
        }
        r2nu *= r2;
    }
    Ok((acc, MAX_TERMS))
}

/// Transported kernel for a multi-disk archipelago whose holes are the
/// preimages of `|w| <= r` under the island maps: zero across distinct
/// islands, and the conformally transported `J` within one island.
pub fn k_sharp(
    z: Complex64,
    zeta: Complex64,
    disks: &[(Complex64, f64)],
    r: f64,
) -> Result<Complex64, OracleError> {
    let island_of = |p: Complex64| -> Option<usize> {
        disks.iter().position(|(c, rho)| (p - c).norm() < *rho)
    };
    let iz = island_of(z).ok_or_else(|| OracleError::PointOutsideIslands(format!("{z}")))?;
    let izeta = island_of(zeta).ok_or_else(|| OracleError::PointOutsideIslands(format!("{zeta}")))?;
    if iz != izeta {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let map = ConformalDiskMap {
        center: disks[iz].0,
        radius: disks[iz].1,
    };
    let (j, _) = annulus_kernel_j(map.apply(z), map.apply(zeta), r, 1e-14)?;
    let d = map.derivative();
    Ok(j * d * d)
}

/// Green function of an analytic scene's exterior (0 on the boundary).
pub fn green_function(scene: &AnalyticScene, z: Complex64) -> Result<f64, OracleError> {
    scene.green(z)
}

// ---------------------------------------------------------------------------
// Asymptotic checkers
// ---------------------------------------------------------------------------

/// n-th-root report: per-degree deviations `gamma_n^(1/n) * cap - 1` and,
/// per exterior point, the ratios `|p_n(z)|^(1/n) / exp(g(z))`.
#[derive(Clone, Debug)]
pub struct NthRootReport {
    pub degrees: Vec<usize>,
    pub gamma_deviation: Vec<f64>,
    /// magnitude_ratio[zi][di] for point zi and degree index di.
    pub magnitude_ratio: Vec<Vec<f64>>,
}

pub fn check_nth_root(
    basis: &BergmanBasis,
    scene: &AnalyticScene,
    points: &[Complex64],
    degrees: &[usize],
) -> Result<NthRootReport, OracleError> {
    let cap = scene
        .capacity()
        .ok_or_else(|| OracleError::Unsupported("capacity unknown for this scene".into()))?;
    let mut gamma_deviation = Vec::with_capacity(degrees.len());
    for &n in degrees {
        let root = (basis.gamma(n).ln() / n as f64).exp();
        gamma_deviation.push(root * cap - 1.0);
    }
    let mut magnitude_ratio = Vec::with_capacity(points.len());
    for &z in points {
        let g = scene.green(z)?;
        let vals = eval_scaled(basis.view(), *degrees.iter().max().unwrap(), z);
        let mut per_degree = Vec::with_capacity(degrees.len());
        for &n in degrees {
            let root = (vals.ln_abs(n) / n as f64).exp();
            per_degree.push(root / g.exp());
        }
        magnitude_ratio.push(per_degree);
    }
    Ok(NthRootReport {
        degrees: degrees.to_vec(),
        gamma_deviation,
        magnitude_ratio,
    })
}

/// Exterior-bound report: `|p_n(z)| / (sqrt(n) exp(n g(z)))` over a sweep of
/// points and degrees; the assertion of interest is that min and max stay
/// within fixed positive bounds.
#[derive(Clone, Debug)]
pub struct ExteriorBoundsReport {
    pub min: f64,
    pub max: f64,
    /// normalized[zi][di].
    pub normalized: Vec<Vec<f64>>,
}

pub fn check_exterior_bounds(
    basis: &BergmanBasis,
    scene: &AnalyticScene,
    points: &[Complex64],
    degrees: &[usize],
) -> Result<ExteriorBoundsReport, OracleError> {
    let max_n = *degrees.iter().max().unwrap();
    let mut normalized = Vec::with_capacity(points.len());
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &z in points {
        let g = scene.green(z)?;
        let vals = eval_scaled(basis.view(), max_n, z);
        let mut per_degree = Vec::with_capacity(degrees.len());
        for &n in degrees {
            let ln_norm = vals.ln_abs(n) - 0.5 * (n as f64).ln() - n as f64 * g;
            let v = ln_norm.exp();
            lo = lo.min(v);
            hi = hi.max(v);
            per_degree.push(v);
        }
        normalized.push(per_degree);
    }
    Ok(ExteriorBoundsReport {
        min: lo,
        max: hi,
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::orthogonalize;
    use crate::geometry::RegionKind;
    use crate::moments::scene_moments;
    use crate::Precision;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn j_collapses_to_disk_kernel_at_r_zero() {
        let w = c(0.3, 0.2);
        let om = c(-0.1, 0.5);
        let (j, terms) = annulus_kernel_j(w, om, 0.0, 1e-14).unwrap();
        let den = Complex64::new(1.0, 0.0) - w * om.conj();
        let disk = 1.0 / (PI * den * den);
        assert!((j - disk).norm() < 1e-15);
        assert!(terms <= 2);
    }

    #[test]
    fn j_at_origin_is_geometric_series() {
        let r: f64 = 0.5;
        let (j, _) = annulus_kernel_j(c(0.0, 0.0), c(0.0, 0.0), r, 1e-15).unwrap();
        assert_relative_eq!(j.re, 1.0 / (PI * (1.0 - r * r)), max_relative = 1e-13);
        assert!(j.im.abs() < 1e-16);
    }

    #[test]
    fn j_hermitian_at_random_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..32 {
            let w = c(rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9));
            let om = c(rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9));
            if w.norm() >= 1.0 || om.norm() >= 1.0 {
                continue;
            }
            let (a, _) = annulus_kernel_j(w, om, 0.5, 1e-14).unwrap();
            let (b, _) = annulus_kernel_j(om, w, 0.5, 1e-14).unwrap();
            assert!((a - b.conj()).norm() < 1e-13 * a.norm().max(1e-13));
        }
    }

    #[test]
    fn j_divergence_guard() {
        assert!(annulus_kernel_j(c(1.2, 0.0), c(1.0, 0.0), 0.5, 1e-10).is_err());
    }

    #[test]
    fn k_sharp_block_structure() {
        let disks = vec![(c(0.0, 0.0), 1.0), (c(3.0, 0.0), 0.5)];
        // Cross-island: exactly zero.
        let v = k_sharp(c(0.2, 0.1), c(3.1, 0.0), &disks, 0.4).unwrap();
        assert_eq!(v, c(0.0, 0.0));
        // Single unit-disk island: k_sharp is J itself.
        let z = c(0.3, -0.2);
        let zeta = c(0.1, 0.4);
        let v = k_sharp(z, zeta, &disks[..1], 0.4).unwrap();
        let (j, _) = annulus_kernel_j(z, zeta, 0.4, 1e-14).unwrap();
        assert!((v - j).norm() < 1e-15);
        // Offset island with unit radius: translation transport.
        let disks2 = vec![(c(2.0, 0.0), 1.0)];
        let v = k_sharp(z + 2.0, zeta + 2.0, &disks2, 0.4).unwrap();
        assert!((v - j).norm() < 1e-15);
        // Outside everything: rejected.
        assert!(k_sharp(c(10.0, 0.0), zeta, &disks, 0.4).is_err());
    }

    #[test]
    fn k_sharp_diagonal_positive() {
        let disks = vec![(c(0.0, 0.0), 1.0), (c(3.0, 0.0), 0.5)];
        for &z in &[c(0.5, 0.1), c(3.2, 0.1), c(-0.7, 0.2)] {
            let v = k_sharp(z, z, &disks, 0.3).unwrap();
            assert!(v.im.abs() < 1e-15);
            assert!(v.re > 0.0);
        }
    }

    #[test]
    fn green_function_examples() {
        let disk = AnalyticScene::UnitDisk;
        assert_eq!(green_function(&disk, c(1.0, 0.0)).unwrap(), 0.0);
        assert_relative_eq!(
            green_function(&disk, c(std::f64::consts::E, 0.0)).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        assert!(green_function(&disk, c(0.5, 0.0)).is_err());

        let lem = AnalyticScene::Lemniscate { m: 2, r: 0.8 };
        // Points on |z^2 - 1| = 0.64 have zero Green value.
        for q in 0..16 {
            let t = 2.0 * PI * q as f64 / 16.0;
            let u = Complex64::new(1.0, 0.0) + Complex64::from_polar(0.64, t);
            let z = u.sqrt();
            assert!(green_function(&lem, z).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn green_normalization_at_infinity() {
        // g(z) - log|z| -> log(1/cap) with O(1/|z|) error, checked at 1e6.
        let far = c(1e6, 3e5);
        for scene in [
            AnalyticScene::UnitDisk,
            AnalyticScene::OffsetDisk {
                center: c(2.0, 0.0),
                radius: 0.5,
            },
            AnalyticScene::Lemniscate { m: 2, r: 0.8 },
            AnalyticScene::Annulus { inner: 0.5 },
        ] {
            let cap = scene.capacity().unwrap();
            let g = scene.green(far).unwrap();
            let defect = g - far.norm().ln() - (1.0 / cap).ln();
            assert!(defect.abs() < 1e-5, "{scene:?}: defect {defect}");
        }
    }

    #[test]
    fn green_vanishes_on_sampled_boundaries() {
        let scenes = [
            AnalyticScene::UnitDisk,
            AnalyticScene::OffsetDisk {
                center: c(-1.0, 2.0),
                radius: 0.75,
            },
        ];
        for scene in scenes {
            let geo = scene.to_scene();
            for isl in geo.islands() {
                for p in isl.boundary_samples(64) {
                    assert!(scene.green(p).unwrap().abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn lemniscate_green_is_harmonic_outside() {
        let lem = AnalyticScene::Lemniscate { m: 2, r: 0.8 };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let h = 1e-3;
        let mut checked = 0;
        while checked < 50 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            // Stay clearly outside so the whole stencil is exterior.
            if (z * z - 1.0).norm() < 0.8 {
                continue;
            }
            let g = |p: Complex64| lem.green(p).unwrap();
            let lap = (g(z + c(h, 0.0)) + g(z - c(h, 0.0)) + g(z + c(0.0, h)) + g(z - c(0.0, h))
                - 4.0 * g(z))
                / (h * h);
            assert!(lap.abs() < 1e-4, "Laplacian {lap} at {z}");
            checked += 1;
        }
    }

    #[test]
    fn nth_root_on_disk_closed_form() {
        let n = 40;
        let m = scene_moments(&presets::unit_disk_scene(), n, RegionKind::G, Precision::Double).unwrap();
        let basis = orthogonalize(&m, n).unwrap();
        let scene = AnalyticScene::UnitDisk;
        let rep = check_nth_root(&basis, &scene, &[c(2.0, 0.0)], &[10, 20, 40]).unwrap();
        // gamma_n^(1/n) = ((n+1)/pi)^(1/(2n)); deviations shrink but stay
        // positive at these degrees.
        for (di, &n) in rep.degrees.iter().enumerate() {
            let expect = (((n as f64 + 1.0) / PI).ln() / (2.0 * n as f64)).exp() - 1.0;
            assert_relative_eq!(rep.gamma_deviation[di], expect, max_relative = 1e-8);
        }
        // |p_n(2)|^(1/n) = ((n+1)/pi)^(1/(2n)) * 2 and exp(g) = 2.
        for (di, &n) in rep.degrees.iter().enumerate() {
            let expect = (((n as f64 + 1.0) / PI).ln() / (2.0 * n as f64)).exp();
            assert_relative_eq!(rep.magnitude_ratio[0][di], expect, max_relative = 1e-8);
        }
    }

    #[test]
    fn exterior_bounds_disk_band() {
        let n = 80;
        let m = scene_moments(&presets::unit_disk_scene(), n, RegionKind::G, Precision::Double).unwrap();
        let basis = orthogonalize(&m, n).unwrap();
        let scene = AnalyticScene::UnitDisk;
        let points: Vec<Complex64> = (0..8)
            .map(|q| Complex64::from_polar(2.0, 2.0 * PI * q as f64 / 8.0))
            .collect();
        let degrees: Vec<usize> = (10..=80).step_by(10).collect();
        let rep = check_exterior_bounds(&basis, &scene, &points, &degrees).unwrap();
        // Closed form: normalized magnitude is sqrt((n+1)/(n pi)), in
        // [0.5, 0.7] over this sweep, and strictly positive.
        assert!(rep.min > 0.5 && rep.max < 0.7, "band [{}, {}]", rep.min, rep.max);
        for (zi, _) in points.iter().enumerate() {
            for (di, &n) in degrees.iter().enumerate() {
                let expect = ((n as f64 + 1.0) / (n as f64 * PI)).sqrt();
                assert_relative_eq!(rep.normalized[zi][di], expect, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn holed_to_full_pointwise_ratio_decays_geometrically() {
        // p_n(holed)/p_n(full) - 1 for the disk/annulus pair vanishes like
        // r^(2n+2) outside the hull; check the error at least halves every
        // five degrees from n = 20 on.
        let n = 45;
        let full = orthogonalize(
            &scene_moments(&presets::unit_disk_scene(), n, RegionKind::G, Precision::Double).unwrap(),
            n,
        )
        .unwrap();
        let holed = orthogonalize(
            &scene_moments(&presets::annulus_scene(0.5), n, RegionKind::GStar, Precision::Double).unwrap(),
            n,
        )
        .unwrap();
        let z = c(1.7, 0.9);
        let dev = |k: usize| {
            let a = crate::bergman::evaluate(&holed, k, z);
            let b = crate::bergman::evaluate(&full, k, z);
            (a / b - Complex64::new(1.0, 0.0)).norm()
        };
        let mut prev = dev(20);
        for k in [25usize, 30, 35] {
            let d = dev(k);
            assert!(
                d <= 0.5 * prev || d < 1e-14,
                "deviation did not halve: {prev} -> {d} at n={k}"
            );
            prev = d;
        }
    }
}
