//! Local serendipity machinery: DoF functionals, polynomial projectors, the
//! lift to enlarged-space DoFs and the stabilized local matrices.

mod element;
mod layout;

#[cfg(test)]
mod tests;

pub use element::{condition_number, default_quadrature_degree, element_operators, reproduction_error, Element, ElementOperators, CONDITION_LIMIT};
pub use layout::{LocalDofLayout, SpaceKind};
