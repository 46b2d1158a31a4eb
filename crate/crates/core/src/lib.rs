pub mod anchors;
pub mod cli;
pub mod connection;
pub mod engine;
pub mod error;
pub mod field;
pub mod jet;
pub mod lck;
pub mod models;
pub mod quadrature;
pub mod report;
pub mod suite;
pub mod tensor;
