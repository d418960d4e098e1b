//! Interactive certificates for Krylov sequences of sparse matrices over prime
//! fields, with exact operation-count accounting.

pub mod applications;
pub mod checkpoint;
pub mod dense;
pub mod engine;
pub mod error;
pub mod field;
pub mod logdepth;
pub mod poly;
pub mod protocol;
pub mod prover;
pub mod recursive;
pub mod report;
pub mod sequence;
pub mod session;
pub mod sparse;

pub use error::Error;
