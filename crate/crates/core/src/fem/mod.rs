//! Reference-element machinery: quadrature, Lagrange bases and dof maps.

pub mod basis;
pub mod quadrature;
pub mod space;

pub use basis::{p1_basis, p2_basis};
pub use quadrature::{triangle_quadrature, QuadratureRule, ASSEMBLY_DEGREE, NORM_DEGREE};
pub use space::{build_space, ElementGeometry, FeSpace, SpaceKind, Tabulation};
