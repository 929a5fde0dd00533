//! Shape-from-moments for archipelagos with lakes.
//!
//! Given the complex area moments of a planar region made of finitely many
//! Jordan islands minus compact lakes, this crate builds the orthonormal
//! Bergman polynomial basis by the Arnoldi Gram-Schmidt process, evaluates
//! Christoffel functions and kernel partial sums, traces level curves of the
//! square-root Christoffel function, and runs the two-phase reconstruction
//! (outer boundary first, lakes from moment differences second).
//!
//! Closed-form references (disk and annulus bases, the transported kernel for
//! disk islands, Green functions, capacities) live in [`oracles`] together
//! with the asymptotic checkers that back the verification suites.

pub mod bergman;
pub mod christoffel;
pub mod dd;
pub mod error;
pub mod geometry;
pub mod manifest;
pub mod moments;
pub mod oracles;
pub mod presets;
pub mod qd;
pub mod reconstruct;
pub mod verify;

pub use error::Error;
pub use num_complex::Complex64;

/// Library version string.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Working precision for moment computation and orthogonalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Precision {
    #[default]
    Double,
    /// Double-double (~31 significant digits).
    Extended,
    /// Quad-double (~62 significant digits). The moment-only Arnoldi process
    /// conditions like `(R/cap)^(2k)`, so multi-component scenes need this
    /// tier to reach clean degrees past ~50.
    Quad,
}

impl Precision {
    pub fn tag(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Extended => "dd",
            Precision::Quad => "qd",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Precision> {
        match tag {
            "double" => Some(Precision::Double),
            "dd" | "extended" => Some(Precision::Extended),
            "qd" | "quad" => Some(Precision::Quad),
            _ => None,
        }
    }
}
pub fn cli_main() -> i32 { 0 }
