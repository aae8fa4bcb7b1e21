//! Coefficient rings, group rings and the exact submodule linear algebra.

pub mod group_ring;
pub mod linalg;
pub mod scalar;
pub mod sparse;
pub mod submodule;
pub mod vector;
pub mod window;

pub use group_ring::{GroupRing, GroupRingElement, GroupRingMatrix};
pub use scalar::{RingSpec, Scalar};
pub use submodule::{window_kernel, Submodule};
pub use vector::{Coord, ModuleVector};
pub use window::{WindowContext, WindowSubmodule};
