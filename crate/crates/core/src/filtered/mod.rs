//! Γ-filtered modules: presentations, filtration rules, window evaluation and certificates.

pub mod checks;
pub mod equivariant;
pub mod filtration;
pub mod module;
pub mod sampling;

pub use checks::{
    antithetic_in_window, check_antithetic_pair, check_insular, check_lean, minimal_constant, minimal_insular, minimal_lean,
    Insularity,
};
pub use equivariant::{action_from_equivariant, equivariant_of, EquivariantAction, EquivariantStructure, PsiRule};
pub use filtration::{FilteredModule, FilteredWindow, FiltrationRule};
pub use module::{Generator, PresentedModule};
pub use sampling::SamplingPlan;
