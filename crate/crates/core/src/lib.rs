//! Iterated function systems on the plane and the circle: Hutchinson operator
//! on occupancy grids, probabilistic and deterministic chaos games, and
//! empirical checkers for minimality, contractibility and fibre structure.

pub mod chaosgame;
pub mod circle;
pub mod dynamics;
pub mod sequences;
pub mod setops;
pub mod tolerances;
