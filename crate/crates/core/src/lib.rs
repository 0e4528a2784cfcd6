pub mod certified;
pub mod corpus;
pub mod cylinder;
pub mod geometry;
pub mod lattice;
pub mod nesterenko;
mod par;
pub mod records;
pub mod svg;
pub mod transference;
