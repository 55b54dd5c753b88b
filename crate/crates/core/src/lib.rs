//! Numerical toolkit for two-dimensional minimal cones in R^n.
//!
//! Cones are represented by their traces on the unit sphere ([`cone_net`]).
//! The remaining modules measure how those traces respond to perturbation,
//! compute harmonic-replacement area savings over planar sectors, straighten
//! near-geodesic curves with maximal-function thresholds, and integrate the
//! decay inequalities for density excess.

pub mod cone_net;
pub mod decay;
pub mod harmonic;
pub mod perturbation;
pub mod quadrature;
pub mod sphere;
pub mod straighten;
pub mod tolerances;
