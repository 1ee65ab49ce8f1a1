//! Cylindrical algebraic decomposition with cell adjacency, computed with
//! validated disc arithmetic instead of exact algebraic-number arithmetic.

pub mod arith;
pub mod poly;
pub mod numroots;
pub mod isolate;
pub mod ralg;
pub mod cad;
pub mod adjacency;
pub mod par;
