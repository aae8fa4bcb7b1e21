//! Free covers, kernels, resolutions and the image/cokernel/idempotent pipelines.

pub mod chain;
pub mod groebner;
pub mod kernel;
pub mod laurent;
pub mod pipelines;

pub use chain::{free_cover, resolve, FreeCover, ResolutionChain, ResolveOptions, StageReport};
pub use kernel::{is_tier_a, kernel_of, presentation_kernel, Completeness, KernelMode, SyzygyResult};
pub use pipelines::{
    certify_module, check_complement, idempotent_image, image_cokernel, IdempotentReport, ImageCokernel, ModuleCertificates,
};
