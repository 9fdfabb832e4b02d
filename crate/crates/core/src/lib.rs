pub mod poly;
pub mod solver;
pub mod geometry;
pub mod systems;
pub mod quadric;
pub mod enumerative;
