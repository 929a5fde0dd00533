//! Reference scenes used by the verification suites and tests.

use num_complex::Complex64;

use crate::geometry::{JordanCurve, Polygon, PrimitiveRegion, Scene};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The open unit disk, no lakes.
pub fn unit_disk_scene() -> Scene {
    Scene::new(vec![PrimitiveRegion::disk(c(0.0, 0.0), 1.0).unwrap()], vec![]).unwrap()
}

/// Unit disk with an off-center lake: disk(1/2, 1/4).
pub fn disk_with_lake_scene() -> Scene {
    Scene::new(
        vec![PrimitiveRegion::disk(c(0.0, 0.0), 1.0).unwrap()],
        vec![PrimitiveRegion::disk(c(0.5, 0.0), 0.25).unwrap()],
    )
    .unwrap()
}

/// Concentric annulus r < |z| < 1 as a disk with a centered lake.
pub fn annulus_scene(r: f64) -> Scene {
    Scene::new(
        vec![PrimitiveRegion::disk(c(0.0, 0.0), 1.0).unwrap()],
        vec![PrimitiveRegion::disk(c(0.0, 0.0), r).unwrap()],
    )
    .unwrap()
}

/// The m-component lemniscate `{ |z^m - 1| < r^m }`, whose boundary has
/// logarithmic capacity `r`.
pub fn lemniscate_scene(m: u32, r: f64) -> Scene {
    let islands = (0..m)
        .map(|k| PrimitiveRegion::Jordan(JordanCurve::lemniscate_component(m, r, k).unwrap()))
        .collect();
    Scene::new(islands, vec![]).unwrap()
}

/// Two islands: the canonical pentagon (vertices at the fifth roots of
/// unity) and the disk |z - 7/2| < 2/3, with lake disk(1/2, 1/4).
pub fn pentagon_disk_scene() -> Scene {
    let verts: Vec<Complex64> = (0..5)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 5.0))
        .collect();
    Scene::new(
        vec![
            PrimitiveRegion::Polygon(Polygon::new(verts).unwrap()),
            PrimitiveRegion::disk(c(3.5, 0.0), 2.0 / 3.0).unwrap(),
        ],
        vec![PrimitiveRegion::disk(c(0.5, 0.0), 0.25).unwrap()],
    )
    .unwrap()
}

/// Three disk islands with one disk lake each.
pub fn three_disks_scene() -> Scene {
    Scene::new(
        vec![
            PrimitiveRegion::disk(c(-1.0, 0.0), 0.5).unwrap(),
            PrimitiveRegion::disk(c(2.0, 0.0), 1.0).unwrap(),
            PrimitiveRegion::disk(c(0.0, 2.0), 0.5).unwrap(),
        ],
        vec![
            PrimitiveRegion::disk(c(-1.0, 0.0), 1.0 / 3.0).unwrap(),
            PrimitiveRegion::disk(c(2.0, 0.0), 1.0 / 3.0).unwrap(),
            PrimitiveRegion::disk(c(0.0, 2.0), 0.25).unwrap(),
        ],
    )
    .unwrap()
}

/// Text-format grammar for scene description files:
///
/// ```text
/// # comment
/// island disk <cx> <cy> <r>
/// island polygon <x1> <y1> <x2> <y2> <x3> <y3> [...]
/// island lemniscate <m> <r>        # expands to the m components
/// lake disk <cx> <cy> <r>
/// lake polygon ...
/// ```
///
/// Tokens are whitespace-separated; `#` starts a comment.
pub fn parse_scene(text: &str) -> Result<Scene, crate::error::GeometryError> {
    use crate::error::GeometryError;
    let mut islands = Vec::new();
    let mut lakes = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let err = |msg: String| GeometryError::InvalidScene(format!("line {}: {}", lineno + 1, msg));
        if toks.len() < 2 {
            return Err(err("expected `<island|lake> <primitive> ...`".into()));
        }
        let target = match toks[0] {
            "island" => &mut islands,
            "lake" => &mut lakes,
            other => return Err(err(format!("unknown role `{other}`"))),
        };
        let nums: Result<Vec<f64>, _> = toks[2..].iter().map(|t| t.parse::<f64>()).collect();
        let nums = nums.map_err(|e| err(format!("bad number: {e}")))?;
        match toks[1] {
            "disk" => {
                if nums.len() != 3 {
                    return Err(err("disk needs `cx cy r`".into()));
                }
                target.push(PrimitiveRegion::disk(c(nums[0], nums[1]), nums[2])?);
            }
            "polygon" => {
                if nums.len() < 6 || nums.len() % 2 != 0 {
                    return Err(err("polygon needs at least 3 coordinate pairs".into()));
                }
                let verts: Vec<Complex64> = nums.chunks(2).map(|p| c(p[0], p[1])).collect();
                target.push(PrimitiveRegion::Polygon(Polygon::new(verts)?));
            }
            "lemniscate" => {
                if nums.len() != 2 {
                    return Err(err("lemniscate needs `m r`".into()));
                }
                let m = nums[0] as u32;
                if nums[0].fract() != 0.0 || m == 0 {
                    return Err(err(format!("lemniscate m must be a positive integer, got {}", nums[0])));
                }
                for k in 0..m {
                    target.push(PrimitiveRegion::Jordan(JordanCurve::lemniscate_component(
                        m, nums[1], k,
                    )?));
                }
            }
            other => return Err(err(format!("unknown primitive `{other}`"))),
        }
    }
    Scene::new(islands, lakes)
}

pub fn load_scene(path: &std::path::Path) -> Result<Scene, crate::Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_scene(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RegionKind;

    #[test]
    fn parse_roundtrip_scene() {
        let text = "\
# a disk with a lake and a polygon island
island disk 0 0 1
lake disk 0.5 0 0.25   # the lake
island polygon 2 0 3 0 3 1 2 1
";
        let scene = parse_scene(text).unwrap();
        assert_eq!(scene.islands().len(), 2);
        assert_eq!(scene.lakes().len(), 1);
        assert!(scene.contains(Complex64::new(2.5, 0.5), RegionKind::G));
    }

    #[test]
    fn parse_lemniscate_expands_components() {
        let scene = parse_scene("island lemniscate 2 0.8").unwrap();
        assert_eq!(scene.islands().len(), 2);
    }

    #[test]
    fn parse_errors_name_lines() {
        let err = parse_scene("island disk 0 0\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
        let err = parse_scene("\n\nocean disk 0 0 1\n").unwrap_err();
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn preset_scenes_validate() {
        unit_disk_scene();
        disk_with_lake_scene();
        annulus_scene(0.5);
        lemniscate_scene(2, 0.8);
        pentagon_disk_scene();
        three_disks_scene();
    }
}
