use archi::geometry::{hausdorff_to_circle, Frame, RegionKind};
use archi::moments::scene_moments;
use archi::reconstruct::*;
use archi::{presets, Precision};
use num_complex::Complex64;
use std::time::Instant;

fn main() {
    // AC9 main case: disk(0,1) with lake disk(1/2,1/4), n=60, 256^2.
    let t0 = Instant::now();
    let scene = presets::disk_with_lake_scene();
    let n = 60;
    let star = scene_moments(&scene, n, RegionKind::GStar, Precision::Double).unwrap();
    let cfg = ReconstructionConfig::new(n, 256, 256).unwrap();
    let r = reconstruct_full(&star, &cfg).unwrap();
    let d_outer = hausdorff_to_circle(r.g_hat[0].vertices(), Complex64::new(0.0, 0.0), 1.0);
    println!("disk-lake n=60 256^2: |g_hat|={} outer Hausdorff {:.4}", r.g_hat.len(), d_outer);
    if let Some(k) = r.k_hat.first() {
        let d_lake = hausdorff_to_circle(k.vertices(), Complex64::new(0.5, 0.0), 0.25);
        println!("  lake Hausdorff {:.4}, phase-B degree {}", d_lake, r.phase_b.as_ref().unwrap().degree_used);
    } else {
        println!("  NO LAKE: {:?}", r.notes);
    }
    println!("  elapsed {:.1}s", t0.elapsed().as_secs_f64());

    // Example pentagon+disk scene: counts on the reference frame at n=80 (dd).
    let t0 = Instant::now();
    let scene53 = presets::pentagon_disk_scene();
    let star53 = scene_moments(&scene53, 80, RegionKind::GStar, Precision::Extended).unwrap();
    let mut cfg53 = ReconstructionConfig::new(80, 256, 256).unwrap();
    cfg53.frame_policy = FramePolicy::Manual(Frame::new(-2.0, 5.0, -2.0, 2.0, 256, 256).unwrap());
    let a53 = phase_a(&star53, &cfg53).unwrap();
    println!("pentagon+disk n=80 frame [-2,5]x[-2,2]: regions {}, open {}, degree_used {}, residual {:.2e}",
        a53.regions.len(), a53.open_contours, a53.degree_used, a53.residual_max);
    println!("  elapsed {:.1}s (dd moments degree 80 + arnoldi + field)", t0.elapsed().as_secs_f64());

    // Bad frame [3,6]x[-2,2] must raise open-contour warnings.
    let mut cfg_bad = ReconstructionConfig::new(80, 128, 128).unwrap();
    cfg_bad.frame_policy = FramePolicy::Manual(Frame::new(3.0, 6.0, -2.0, 2.0, 128, 128).unwrap());
    let a_bad = phase_a(&star53, &cfg_bad).unwrap();
    println!("bad frame: open contours {}", a_bad.open_contours);

    // Three-disk scene with three lakes, oracle mode at n=80 dd.
    let t0 = Instant::now();
    let scene54 = presets::three_disks_scene();
    let star54 = scene_moments(&scene54, 80, RegionKind::GStar, Precision::Extended).unwrap();
    let hat54 = scene_moments(&scene54, 80, RegionKind::G, Precision::Extended).unwrap();
    let mut cfg54 = ReconstructionConfig::new(80, 256, 256).unwrap();
    cfg54.frame_policy = FramePolicy::Manual(Frame::new(-3.0, 4.0, -2.0, 3.0, 256, 256).unwrap());
    let a54 = phase_a(&star54, &cfg54).unwrap();
    println!("three disks phase A: regions {}, open {}", a54.regions.len(), a54.open_contours);
    let b54 = phase_b(&star54, &hat54, &cfg54).unwrap();
    println!("three disks phase B (oracle): lakes {}, degree {}", b54.k_hat.len(),
        b54.detail.as_ref().map(|d| d.degree_used).unwrap_or(0));
    for k in &b54.k_hat {
        let c: Complex64 = k.vertices().iter().sum::<Complex64>() / k.vertices().len() as f64;
        println!("  lake centroid {:+.3}{:+.3}i area {:.4}", c.re, c.im, k.area());
    }
    println!("  elapsed {:.1}s", t0.elapsed().as_secs_f64());
}
