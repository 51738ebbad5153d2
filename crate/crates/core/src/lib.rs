//! Computational tools for cone structures on torus ends, Schwarzian
//! constructions of geometrically finite ends, and the group cohomology of
//! their holonomy representations in PSL(2,C).
//!
//! Every type is generic over a [`Real`] scalar (`f32` or `f64`); the
//! aliases at the crate root fix `f64`, which is what the default
//! tolerances are tuned for.

pub mod cochain;
pub mod filling_solver;
pub mod hypcore;
pub mod linalg;
pub mod scalar;
pub mod schwarzian_end;
pub mod tolerance;
pub mod torus_end;

mod error;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tolerance::Tolerances;

pub type Complex = num_complex::Complex<f64>;
pub type Mobius = hypcore::MobiusTransform<f64>;
pub type Point = hypcore::H3Point<f64>;
pub type Sl2 = hypcore::SL2Vector<f64>;
pub type End = torus_end::EndParameter<f64>;
pub type Path = filling_solver::HolomorphicPath<f64>;
pub type Map = schwarzian_end::ConformalMap<f64>;
pub type Representation = cochain::MarkedRepresentation<f64>;
pub type Cocycle = cochain::Cocycle<f64>;
