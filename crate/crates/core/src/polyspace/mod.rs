//! Polynomial kernel: scaled monomials, 1D Gauss rules and polygon quadrature.

mod gauss;
mod monomials;
mod quadrature;

pub use gauss::{gauss_legendre, gauss_lobatto, lagrange_basis, legendre, EdgeRule};
pub use monomials::{monomial_index, poly_dim, poly_dim_signed, ScaledMonomialBasis};
pub use quadrature::{
    ear_clip, monomial_mass, polygon_quadrature, polygon_quadrature_with, PolygonRule, TriangleRule,
};
