use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::RobyError;
use crate::freealg::{CharPoly, FreeAlgebra};
use crate::poly::{Poly, PolyMatrix, Var};
use crate::roby::GradedRobyModule;

/// A module map `A -> End(W)` given by one matrix per basis element of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharMorphism {
    algebra: Arc<FreeAlgebra>,
    matrices: Vec<PolyMatrix>,
}

impl CharMorphism {
    pub fn new(algebra: Arc<FreeAlgebra>, matrices: Vec<PolyMatrix>) -> Result<Self, RobyError> {
        if matrices.len() != algebra.rank() {
            return Err(RobyError::Invalid(format!("{} matrices for an algebra of rank {}", matrices.len(), algebra.rank())));
        }
        let n = matrices[0].rows();
        if matrices.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(RobyError::Invalid("matrices must be square of a common size".into()));
        }
        Ok(CharMorphism { algebra, matrices })
    }

    pub fn algebra(&self) -> &Arc<FreeAlgebra> {
        &self.algebra
    }

    pub fn matrices(&self) -> &[PolyMatrix] {
        &self.matrices
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].rows()
    }

    /// `C(a) = Σ Γ_i C(γ_i)`.
    pub fn generic_matrix(&self) -> PolyMatrix {
        let coeffs: Vec<Poly> = self.algebra.dual_vars().iter().map(|&v| Poly::var(v)).collect();
        let mats: Vec<&PolyMatrix> = self.matrices.iter().collect();
        PolyMatrix::linear_combination(&coeffs, &mats).expect("shapes checked")
    }

    /// Applies `bindings` to the matrices and the source algebra.
    pub fn substitute(&self, bindings: &HashMap<Var, Poly>) -> Result<Self, RobyError> {
        Ok(CharMorphism {
            algebra: Arc::new(self.algebra.substitute(bindings)?),
            matrices: self.matrices.iter().map(|m| m.substitute(bindings)).collect(),
        })
    }
}

/// `C(γ) = -ψ(γ) ψ(T)^{d-1}`. Fails unless `ψ(T)^d = I`.
pub fn char_morphism(m: &GradedRobyModule) -> Result<CharMorphism, RobyError> {
    let t = m.t_action().ok_or(RobyError::NoTSlot)?;
    let alg = m.algebra().ok_or(RobyError::NoAlgebra)?.clone();
    let d = alg.rank() as u64;
    let t_inv = t.pow(d - 1)?;
    if t_inv.mul(t)? != PolyMatrix::identity(m.dim()) {
        return Err(RobyError::Invalid("T-action is not of order dividing the rank".into()));
    }
    let matrices = m.actions()[..alg.rank()].iter().map(|a| a.mul(&t_inv).map(|p| p.neg())).collect::<Result<Vec<_>, _>>()?;
    CharMorphism::new(alg, matrices)
}

/// Unit and multiplicativity of a map with respect to the source structure constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismCheck {
    pub unit: bool,
    pub multiplicative: bool,
    /// First pair `(i, j)` with `C(γ_i)C(γ_j) ≠ Σ c_ijk C(γ_k)`.
    pub first_failure: Option<(usize, usize)>,
}

impl MorphismCheck {
    pub fn passed(&self) -> bool {
        self.unit && self.multiplicative
    }
}

/// Result of [`verify_char_morphism`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharMorphismReport {
    pub dim: usize,
    pub identity: bool,
    /// First nonzero entry `(row, col, value)` of `χ(C(a), a)`.
    pub first_nonzero: Option<(usize, usize, String)>,
    /// Whether `C` is moreover an algebra morphism.
    pub algebra_morphism: MorphismCheck,
}

impl CharMorphismReport {
    pub fn passed(&self) -> bool {
        self.identity
    }
}

pub(crate) fn morphism_check(alg: &FreeAlgebra, mats: &[PolyMatrix]) -> MorphismCheck {
    let d = alg.rank();
    let n = mats[0].rows();
    let unit_refs: Vec<&PolyMatrix> = mats.iter().collect();
    let unit_image = PolyMatrix::linear_combination(alg.unit(), &unit_refs).expect("shapes");
    let unit = unit_image == PolyMatrix::identity(n);
    let mut first_failure = None;
    'outer: for i in 0..d {
        for j in i..d {
            let lhs = mats[i].mul(&mats[j]).expect("square");
            let coeffs: Vec<Poly> = (0..d).map(|k| alg.structure_constant(i, j, k).clone()).collect();
            let rhs = PolyMatrix::linear_combination(&coeffs, &unit_refs).expect("shapes");
            if lhs != rhs {
                first_failure = Some((i, j));
                break 'outer;
            }
        }
    }
    MorphismCheck { unit, multiplicative: first_failure.is_none(), first_failure }
}

/// Checks `χ(C(a), a) = 0` with `a` generic, and reports separately whether
/// `C` is an algebra morphism.
pub fn verify_char_morphism(c: &CharMorphism, chi: &CharPoly) -> Result<CharMorphismReport, RobyError> {
    if chi.rank() != c.matrices.len() {
        return Err(RobyError::Invalid(format!("characteristic polynomial of rank {} for {} matrices", chi.rank(), c.matrices.len())));
    }
    let residual = chi.evaluate_at_matrix(&c.generic_matrix());
    let first_nonzero = residual.nonzeros().next().map(|(r, col, p)| (r, col, p.to_string()));
    Ok(CharMorphismReport {
        dim: c.dim(),
        identity: first_nonzero.is_none(),
        first_nonzero,
        algebra_morphism: morphism_check(&c.algebra, &c.matrices),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[&str]]) -> PolyMatrix {
        PolyMatrix::parse_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn non_algebra_characteristic_morphism() {
        let alg = Arc::new(FreeAlgebra::split(2));
        let c = CharMorphism::new(alg.clone(), vec![m(&[&["1", "a"], &["0", "0"]]), m(&[&["0", "b"], &["0", "1"]])]).unwrap();
        let r = verify_char_morphism(&c, &alg.char_poly()).unwrap();
        assert!(r.identity);
        assert!(!r.algebra_morphism.unit);
        assert!(!r.algebra_morphism.multiplicative);
        assert_eq!(r.algebra_morphism.first_failure, Some((0, 1)));

        // with a + b = 0 the map is an algebra morphism
        let c = CharMorphism::new(alg.clone(), vec![m(&[&["1", "a"], &["0", "0"]]), m(&[&["0", "-a"], &["0", "1"]])]).unwrap();
        assert!(verify_char_morphism(&c, &alg.char_poly()).unwrap().algebra_morphism.passed());
    }

    #[test]
    fn identity_images_fail() {
        let alg = Arc::new(FreeAlgebra::split(2));
        let c = CharMorphism::new(alg.clone(), vec![PolyMatrix::identity(2), PolyMatrix::identity(2)]).unwrap();
        let r = verify_char_morphism(&c, &alg.char_poly()).unwrap();
        assert!(!r.identity);
        assert_eq!(r.first_nonzero.as_ref().map(|e| e.2.clone()), Some("G1*G2".to_string()));
    }

    #[test]
    fn regular_representation_passes() {
        let alg = Arc::new(FreeAlgebra::monogenic(&"z^3 - x*z - y".parse().unwrap(), Var::new("z"), None).unwrap());
        let d = alg.rank();
        let mats = (0..d)
            .map(|i| {
                let mut u = vec![Poly::zero(); d];
                u[i] = Poly::one();
                alg.multiplication_matrix(&u)
            })
            .collect();
        let c = CharMorphism::new(alg.clone(), mats).unwrap();
        let r = verify_char_morphism(&c, &alg.char_poly()).unwrap();
        assert!(r.identity);
        assert!(r.algebra_morphism.passed());
    }
}
