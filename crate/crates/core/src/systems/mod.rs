//! Concrete systems: the cat map, a north-south circle map, shifts over a
//! finite alphabet or the circle, the dyadic odometer and circle rotations.

pub mod cat;
pub mod circle;
pub mod north_south;
pub mod odometer;
pub mod rotation;
pub mod sequence;
