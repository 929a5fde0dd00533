use archi::geometry::{Frame, RegionKind};
use archi::moments::scene_moments;
use archi::{presets, Precision};
use num_complex::Complex64;

fn main() {
    let scene = presets::three_disks_scene();
    let star = scene_moments(&scene, 80, RegionKind::GStar, Precision::Quad).unwrap();
    let basis = archi::bergman::orthogonalize(&star, 80).unwrap();
    let frame = Frame::new(-3.0, 4.0, -2.0, 3.0, 256, 256).unwrap();
    let f = archi::christoffel::field(&basis, 80, frame, archi::christoffel::FieldMeaning::LambdaSqrt);
    let level = 0.043;
    // Flood fill the >= level set from each island center.
    let idx_of = |z: Complex64| -> (usize, usize) {
        let ix = ((z.re - frame.xmin) / frame.hx() - 0.5).round() as usize;
        let iy = ((z.im - frame.ymin) / frame.hy() - 0.5).round() as usize;
        (ix, iy)
    };
    let mut label = vec![0u8; 256 * 256];
    let mut stack = Vec::new();
    for (li, c) in [Complex64::new(2.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(-1.0, 0.0)].iter().enumerate() {
        let (ix, iy) = idx_of(*c);
        stack.push((ix, iy));
        while let Some((x, y)) = stack.pop() {
            let id = y * 256 + x;
            if label[id] != 0 || f.values[id] < level { continue; }
            label[id] = li as u8 + 1;
            if x > 0 { stack.push((x - 1, y)); }
            if x < 255 { stack.push((x + 1, y)); }
            if y > 0 { stack.push((x, y - 1)); }
            if y < 255 { stack.push((x, y + 1)); }
        }
    }
    // Did island 2's fill reach island 3's center?
    let (ix3, iy3) = idx_of(Complex64::new(0.0, 2.0));
    println!("label at island-3 center: {} (1 = reached from island 2)", label[iy3 * 256 + ix3]);
    let counts: Vec<usize> = (1..=3).map(|l| label.iter().filter(|&&v| v == l).count()).collect();
    println!("component cell counts: {counts:?} (cell area {:.5})", frame.hx() * frame.hy());
    println!("component areas: {:?}", counts.iter().map(|c| *c as f64 * frame.hx() * frame.hy()).collect::<Vec<_>>());
}
