//! Exact Euler characteristics and Poincaré polynomials of moduli spaces of
//! stable quiver representations.
//!
//! Four independent pipelines compute the same integers:
//!
//! * [`motive`]: Harder–Narasimhan recursion for the motive of the
//!   semistable locus, specialised to Poincaré polynomials and Euler
//!   characteristics;
//! * [`localization`]: torus fixed points counted as stable spanning trees of
//!   a bipartite covering quiver, summed with the multiple-cover weights of
//!   [`tropical::mps_euler`];
//! * [`tropical`]: a recursive count of tropical curves;
//! * [`vertex`]: ordered factorization in the tropical vertex group.
//!
//! [`report`] runs them side by side and checks that they agree.

pub mod error;
pub mod localization;
pub mod motive;
pub mod poly;
pub mod quiver;
pub mod report;
pub mod symfunc;
#[cfg(test)]
mod test_support;
pub mod tropical;
pub mod vertex;

pub use error::{Error, Result};
