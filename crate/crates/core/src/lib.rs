pub mod chern;
pub mod cholesky;
pub mod exterior;
pub mod mdsl;
pub mod sample;
pub mod wjet;
