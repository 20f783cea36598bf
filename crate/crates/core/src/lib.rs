//! Darboux curves on surfaces given in principal charts.
//!
//! A Darboux curve is a curve whose osculating sphere is tangent to the
//! surface. The crate integrates them on analytic surfaces, checks their
//! first integrals, classifies the ridges where they change behaviour, and
//! models their sphere lifts in the Lorentz space of spheres.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod integrals;
pub mod numeric;
pub mod quadric_dynamics;
pub mod ridge;
pub mod sphere;
pub mod taylor;

pub use error::{Error, Result};
