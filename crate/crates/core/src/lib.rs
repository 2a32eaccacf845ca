//! Pseudo-Boolean constraints to CNF through interval-labelled ROBDDs.

pub mod builder;
pub mod encode;
pub mod families;
pub mod interval;
pub mod io;
pub mod pb;
pub mod propagate;
pub mod robdd;
pub mod verify;
