//! Solver and verifier toolkit for the Plateau problem for convex
//! hypersurfaces of constant Gaussian curvature.
//!
//! The crate is organized around the objects of the construction:
//!
//! * [`symcone`] — symmetric-matrix cones (`P`, `F_t`, duals) with seeded
//!   audits of the Dirichlet and invariance axioms;
//! * [`bodies`] — convex planar bodies bounded by circular arcs and
//!   segments, scenarios, hulls, intersection and distance machinery;
//! * [`probe`] — the viscosity verifier: paraboloid touching probes that
//!   search for witnesses against the curvature conditions;
//! * [`perron2d`] — the constructive intersection of the generating family
//!   of curvature-`t` disks in the plane, with its closed-form oracle;
//! * [`mongeampere`] — the monotone wide-stencil graph solver for the
//!   three-dimensional free surface over the rim disk.

pub mod bodies;
pub mod geom;
pub mod mongeampere;
pub mod perron2d;
pub mod probe;
pub mod symcone;

pub use geom::Vec2;
