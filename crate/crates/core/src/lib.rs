pub mod certificate;
pub mod cli;
pub mod control;
pub mod error;
pub mod filtered;
pub mod resolution;
pub mod ring;
pub mod space;
