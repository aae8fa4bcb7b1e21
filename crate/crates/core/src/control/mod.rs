//! Bounded control of module homomorphisms.

pub mod bounds;
pub mod geometric;
pub mod morphism;

pub use bounds::{
    bound_of, check_bicontrolled, check_bounded, check_equivariance, check_injective, check_surjective, classify_morphism,
    generator_bound, minimal_bicontrol, Admissibility, Classification,
};
pub use geometric::{compose_geometric, GeometricModule, GeometricMorphism};
pub use morphism::{FilteredMorphism, MorphismAction};
