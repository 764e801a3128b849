//! Certified test data: named fixtures, seeded generators and independent oracles.

pub mod dgla;
pub mod generate;
pub mod hodge;
pub mod named;
pub mod oracles;
pub mod random;
pub mod samples;
