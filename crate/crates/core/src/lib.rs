//! Computational laboratory for 2-step nilsystems: the Heisenberg nilmanifold
//! and flat tori, Gowers–Host–Kra seminorm estimators, self-joinings as
//! empirical measures, and experiments probing local rigidity of joinings
//! near the diagonal.

pub mod error;
pub mod joinings;
pub mod nilgroup;
pub mod par;
pub mod rigidity;
pub mod seminorms;
pub mod systems;

pub use error::{Error, Result};
pub use nilgroup::{dist, haar_sample, heis_inv, heis_mul, reduce, GroupElement, MetricConfig, NilPoint, Space};
pub use systems::{project_torus_factor, vertical_average, vertical_rotate, NilSystem, Observable};
