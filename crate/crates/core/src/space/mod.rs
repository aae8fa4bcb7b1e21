//! Word metrics, Cayley balls, enlargements, asymptotic-dimension covers and
//! uniform embeddings for the supported group families.

pub mod bs;
pub mod cover;
pub mod embedding;
pub mod group;
pub mod metric;

pub use cover::{build_cover, verify_cover, Cover, CoverScheme};
pub use embedding::{sample_pairs, verify_uniform_embedding, MapRule, UniformEmbedding, WitnessFn};
pub use group::{Family, GroupElement, GroupSpec};
pub use metric::{ball, ball_elements, diameter, enlarge, MetricSubset};
