pub mod engine;
pub mod graph;
pub mod harness;
pub mod protocol;
pub mod radio;
pub mod verifier;
