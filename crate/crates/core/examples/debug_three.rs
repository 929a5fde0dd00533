use archi::geometry::{Frame, RegionKind};
use archi::moments::scene_moments;
use archi::reconstruct::*;
use archi::{presets, Precision};
use num_complex::Complex64;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let scene = presets::three_disks_scene();
    let star = scene_moments(&scene, 80, RegionKind::GStar, Precision::Quad).unwrap();
    let hat = scene_moments(&scene, 80, RegionKind::G, Precision::Quad).unwrap();
    println!("qd moments: {:.1}s", t0.elapsed().as_secs_f64());
    let t0 = Instant::now();
    let basis = archi::bergman::orthogonalize(&star, 80).unwrap();
    println!("qd arnoldi: {:.1}s; degree {} usable(1e-7) {}", t0.elapsed().as_secs_f64(), basis.degree(), basis.usable_degree(1e-7));
    let mut cfg = ReconstructionConfig::new(80, 256, 256).unwrap();
    cfg.frame_policy = FramePolicy::Manual(Frame::new(-3.0, 4.0, -2.0, 3.0, 256, 256).unwrap());
    let t0 = Instant::now();
    let a = phase_a(&star, &cfg).unwrap();
    println!("phase A: regions {}, open {}, degree_used {} ({:.1}s)", a.regions.len(), a.open_contours, a.degree_used, t0.elapsed().as_secs_f64());
    for p in &a.regions {
        let c: Complex64 = p.vertices().iter().sum::<Complex64>() / p.vertices().len() as f64;
        println!("   island centroid {:+.3}{:+.3}i area {:.3}", c.re, c.im, p.area());
    }
    let b = phase_b(&star, &hat, &cfg).unwrap();
    println!("phase B oracle: lakes {}, degree {}", b.k_hat.len(), b.detail.as_ref().map(|d| d.degree_used).unwrap_or(0));
    for p in &b.k_hat {
        let c: Complex64 = p.vertices().iter().sum::<Complex64>() / p.vertices().len() as f64;
        println!("   lake centroid {:+.3}{:+.3}i area {:.3}", c.re, c.im, p.area());
    }
    // Pentagon scene at qd.
    let scene53 = presets::pentagon_disk_scene();
    let t0 = Instant::now();
    let star53 = scene_moments(&scene53, 80, RegionKind::GStar, Precision::Quad).unwrap();
    println!("pentagon qd moments: {:.1}s", t0.elapsed().as_secs_f64());
    let b53 = archi::bergman::orthogonalize(&star53, 80).unwrap();
    println!("pentagon: degree {} usable {}", b53.degree(), b53.usable_degree(1e-7));
    let mut cfg53 = ReconstructionConfig::new(80, 256, 256).unwrap();
    cfg53.frame_policy = FramePolicy::Manual(Frame::new(-2.0, 5.0, -2.0, 2.0, 256, 256).unwrap());
    let a53 = phase_a(&star53, &cfg53).unwrap();
    println!("pentagon phase A: regions {}, open {}, degree_used {}", a53.regions.len(), a53.open_contours, a53.degree_used);
}
