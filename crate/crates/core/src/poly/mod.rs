//! Sparse multivariate polynomials over exact scalars, homogeneous forms, and
//! matrices with polynomial entries.

mod form;
mod matrix;
pub mod parse;
#[allow(clippy::module_inception)]
mod poly;
mod var;

pub use form::HomForm;
pub use matrix::PolyMatrix;
pub use poly::{Monomial, Poly};
pub use var::{indexed_vars, Var};

/// Bindings map from parsed `name -> polynomial string` pairs.
pub fn parse_bindings<'a, I>(pairs: I) -> Result<std::collections::HashMap<Var, Poly>, crate::error::PolyError>
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    pairs.into_iter().map(|(k, v)| Ok((Var::new(k), v.parse::<Poly>()?))).collect()
}
