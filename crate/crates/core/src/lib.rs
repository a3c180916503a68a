//! Parliamentary speech corpus construction and diachronic word-usage change
//! detection.

pub mod align;
pub mod corpus;
pub mod detect;
pub mod embed;
pub mod eval;
pub mod ingest;
pub mod linalg;
pub mod parser;
pub mod preprocess;
pub mod resolve;
pub mod scalar;
pub mod text;

pub use scalar::Scalar;

pub type Matrix32 = linalg::Matrix<f32>;
pub type Matrix64 = linalg::Matrix<f64>;
pub type EmbeddingModel32 = embed::EmbeddingModel<f32>;
pub type EmbeddingModel64 = embed::EmbeddingModel<f64>;
pub type CompassModels32 = embed::CompassModels<f32>;
pub type CompassModels64 = embed::CompassModels<f64>;
pub type AlignmentResult32 = align::AlignmentResult<f32>;
pub type AlignmentResult64 = align::AlignmentResult<f64>;
