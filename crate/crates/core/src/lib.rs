//! Exact-arithmetic engine for the outer billiard outside the regular 12-gon.

pub mod field;
pub mod geometry;
pub mod billiard;
pub mod dynamics;
pub mod sampling;
pub mod similarity;
pub mod partition;
pub mod periods;
pub mod render;
pub mod checks;
pub mod cli;
