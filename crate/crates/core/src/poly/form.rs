use std::fmt;

use crate::error::PolyError;
use crate::poly::{Poly, Var};

/// A form of degree `e` in the argument variables `y_1..y_n` (the dual basis of
/// `M`). Coefficients may involve other variables (the base ring).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomForm {
    poly: Poly,
    degree: u32,
    args: Vec<Var>,
}

impl HomForm {
    pub fn new(poly: Poly, degree: u32, args: Vec<Var>) -> Result<Self, PolyError> {
        if degree < 1 {
            return Err(PolyError::InvalidForm("form degree must be positive".into()));
        }
        let mut seen = args.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != args.len() {
            return Err(PolyError::InvalidForm("repeated argument variable".into()));
        }
        if let Some((m, _)) = poly.terms().find(|(m, _)| m.degree_in(&args) != degree) {
            return Err(PolyError::NotHomogeneous { degree, detail: format!("term {m}") });
        }
        Ok(HomForm { poly, degree, args })
    }

    pub fn zero(degree: u32, args: Vec<Var>) -> Self {
        HomForm { poly: Poly::zero(), degree, args }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn args(&self) -> &[Var] {
        &self.args
    }

    /// `F(m)` for `m = Σ values[i] x_i`.
    pub fn evaluate(&self, values: &[Poly]) -> Poly {
        let bindings = self.args.iter().copied().zip(values.iter().cloned()).collect();
        self.poly.substitute(&bindings)
    }

    /// Sum of two forms over the same arguments and degree.
    pub fn sum(&self, other: &HomForm) -> Result<HomForm, PolyError> {
        if self.degree != other.degree || self.args != other.args {
            return Err(PolyError::InvalidForm("forms differ in degree or arguments".into()));
        }
        Ok(HomForm { poly: &self.poly + &other.poly, degree: self.degree, args: self.args.clone() })
    }
}

impl fmt::Display for HomForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::indexed_vars;

    #[test]
    fn homogeneity_is_checked() {
        let y = indexed_vars("y", 2);
        assert!(HomForm::new("y1*y2 + x*y1^2".parse().unwrap(), 2, y.clone()).is_ok());
        assert!(HomForm::new("y1*y2 + y1".parse().unwrap(), 2, y).is_err());
    }

    #[test]
    fn evaluation() {
        let y = indexed_vars("y", 2);
        let f = HomForm::new("y1*y2".parse().unwrap(), 2, y).unwrap();
        let v = f.evaluate(&["a+b".parse().unwrap(), "a-b".parse().unwrap()]);
        assert_eq!(v, "a^2-b^2".parse().unwrap());
    }
}
