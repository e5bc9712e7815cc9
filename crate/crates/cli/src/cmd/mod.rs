pub mod bound;
pub mod chain;
pub mod gaussian;
pub mod mala;
