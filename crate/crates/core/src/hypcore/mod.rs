//! PSL(2,C) acting on the Riemann sphere and on the upper half-space model
//! of hyperbolic 3-space.

mod h3;
mod mobius;
mod sl2;

pub use h3::{hyp_distance, H3Point};
pub use mobius::{ExtComplex, FixedPoints, IsomClass, MobiusTransform};
pub use sl2::SL2Vector;
