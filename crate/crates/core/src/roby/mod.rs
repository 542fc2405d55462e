//! Graded Roby modules, twisted tensor products and characteristic morphisms.

mod charmor;
mod filtration;
mod monomial;
mod split;
mod tensor;

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::RobyError;
use crate::freealg::FreeAlgebra;
use crate::poly::{HomForm, Poly, PolyMatrix, Var};

pub use charmor::{char_morphism, verify_char_morphism, CharMorphism, CharMorphismReport, MorphismCheck};
pub use filtration::{graded_quotients, verify_filtered_pseudo, FilteredPseudoReport, Filtration};
pub use monomial::{monomial_charpoly_roby, monomial_roby, MonomialSpec};
pub use split::{cyclic_cover_seed, induce_roby, split_roby};
pub use tensor::{form_roby, twisted_tensor, twisted_tensor_any_root, zero_module};

/// A `Z/eZ`-graded module `W` with one action matrix per argument variable of
/// its target form. For characteristic-polynomial targets the arguments are
/// `Γ_1..Γ_d, t` and the last action is the T-slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedRobyModule {
    degree: u32,
    grading: Vec<u32>,
    actions: Vec<PolyMatrix>,
    target: HomForm,
    t_slot: Option<usize>,
    algebra: Option<Arc<FreeAlgebra>>,
}

impl GradedRobyModule {
    /// Module for a form target. `actions[i]` is the image of the basis vector
    /// dual to `target.args()[i]`.
    pub fn new(grading: Vec<u32>, actions: Vec<PolyMatrix>, target: HomForm) -> Result<Self, RobyError> {
        let m = GradedRobyModule { degree: target.degree(), grading, actions, target, t_slot: None, algebra: None };
        m.check_shapes()?;
        Ok(m)
    }

    /// Module for the characteristic polynomial of `alg`, from the images of
    /// `γ_1..γ_d` and of `T`.
    pub fn for_char_poly(alg: Arc<FreeAlgebra>, grading: Vec<u32>, gamma_actions: Vec<PolyMatrix>, t_action: PolyMatrix) -> Result<Self, RobyError> {
        let target = alg.char_poly().to_form();
        let mut actions = gamma_actions;
        actions.push(t_action);
        let t = actions.len() - 1;
        let m = GradedRobyModule { degree: target.degree(), grading, actions, target, t_slot: Some(t), algebra: Some(alg) };
        m.check_shapes()?;
        Ok(m)
    }

    /// Module with T-slot whose target is an explicit form in `Γ_1..Γ_d, t`
    /// (a summand of a characteristic polynomial).
    pub fn with_t_slot(grading: Vec<u32>, actions: Vec<PolyMatrix>, target: HomForm) -> Result<Self, RobyError> {
        let t = actions.len().checked_sub(1).ok_or_else(|| RobyError::Invalid("no actions".into()))?;
        let m = GradedRobyModule { degree: target.degree(), grading, actions, target, t_slot: Some(t), algebra: None };
        m.check_shapes()?;
        Ok(m)
    }

    fn check_shapes(&self) -> Result<(), RobyError> {
        if self.degree < 1 {
            return Err(RobyError::Invalid("roby degree must be positive".into()));
        }
        let n = self.grading.len();
        if n == 0 {
            return Err(RobyError::Invalid("module must have positive dimension".into()));
        }
        if let Some(g) = self.grading.iter().find(|&&g| g >= self.degree) {
            return Err(RobyError::Invalid(format!("grading value {g} is not reduced mod {}", self.degree)));
        }
        if self.actions.len() != self.target.args().len() {
            return Err(RobyError::Invalid(format!("{} actions for {} argument variables", self.actions.len(), self.target.args().len())));
        }
        if let Some(a) = self.actions.iter().find(|a| a.rows() != n || a.cols() != n) {
            return Err(RobyError::Invalid(format!("action of shape {}x{} on a {n}-dimensional module", a.rows(), a.cols())));
        }
        let base: Vec<Var> = self.actions.iter().flat_map(|a| a.variables()).collect();
        if let Some(v) = base.iter().find(|v| self.target.args().contains(v)) {
            return Err(RobyError::Invalid(format!("action entries use argument variable `{v}`")));
        }
        Ok(())
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.grading.len()
    }

    pub fn grading(&self) -> &[u32] {
        &self.grading
    }

    pub fn actions(&self) -> &[PolyMatrix] {
        &self.actions
    }

    pub fn action(&self, i: usize) -> &PolyMatrix {
        &self.actions[i]
    }

    pub fn target(&self) -> &HomForm {
        &self.target
    }

    pub fn t_slot(&self) -> Option<usize> {
        self.t_slot
    }

    pub fn t_action(&self) -> Option<&PolyMatrix> {
        self.t_slot.map(|i| &self.actions[i])
    }

    pub fn algebra(&self) -> Option<&Arc<FreeAlgebra>> {
        self.algebra.as_ref()
    }

    /// Declares `alg` as the source algebra; the target must equal its
    /// characteristic polynomial.
    pub fn attach_algebra(mut self, alg: Arc<FreeAlgebra>) -> Result<Self, RobyError> {
        if self.t_slot != Some(self.actions.len() - 1) || alg.rank() + 1 != self.actions.len() {
            return Err(RobyError::NoTSlot);
        }
        if alg.char_poly().to_form() != self.target {
            return Err(RobyError::TargetMismatch);
        }
        self.algebra = Some(alg);
        Ok(self)
    }

    /// `Σ arg_i · action_i`, the action of the generic element.
    pub fn generic_action(&self) -> PolyMatrix {
        let coeffs: Vec<Poly> = self.target.args().iter().map(|&v| Poly::var(v)).collect();
        let mats: Vec<&PolyMatrix> = self.actions.iter().collect();
        PolyMatrix::linear_combination(&coeffs, &mats).expect("shapes checked at construction")
    }

    /// Applies `bindings` to every action entry and to the target.
    pub fn substitute(&self, bindings: &HashMap<Var, Poly>) -> Result<Self, RobyError> {
        if bindings.keys().any(|v| self.target.args().contains(v)) {
            return Err(RobyError::Invalid("bindings touch argument variables".into()));
        }
        let actions = self.actions.iter().map(|a| a.substitute(bindings)).collect();
        let target = HomForm::new(self.target.poly().substitute(bindings), self.degree, self.target.args().to_vec())?;
        let algebra = match &self.algebra {
            Some(a) => Some(Arc::new(a.substitute(bindings)?)),
            None => None,
        };
        Ok(GradedRobyModule { actions, target, algebra, ..self.clone() })
    }

    /// Same module with its algebra replaced (the target is checked against it).
    pub(crate) fn with_algebra_unchecked(mut self, alg: Option<Arc<FreeAlgebra>>) -> Self {
        self.algebra = alg;
        self
    }
}

/// Failure location inside a matrix identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryMismatch {
    pub row: usize,
    pub col: usize,
    pub expected: String,
    pub actual: String,
}

/// Result of [`verify_roby`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RobyReport {
    pub dim: usize,
    pub degree: u32,
    pub graded: bool,
    /// `(action index, row, col)` of the first entry breaking the grading.
    pub grading_violation: Option<(usize, usize, usize)>,
    pub identity: bool,
    pub first_mismatch: Option<EntryMismatch>,
}

impl RobyReport {
    pub fn passed(&self) -> bool {
        self.graded && self.identity
    }
}

/// Checks gradedness and `(Σ s_i A_i)^e = F(s)·I` exactly, with the target's
/// argument variables as the symbolic coefficients `s`.
pub fn verify_roby(m: &GradedRobyModule) -> RobyReport {
    let e = m.degree;
    let grading_violation = m.actions.iter().enumerate().find_map(|(k, a)| {
        a.nonzeros().find(|&(r, c, _)| m.grading[r] != (m.grading[c] + 1) % e).map(|(r, c, _)| (k, r, c))
    });
    let power = m.generic_action().pow(e as u64).expect("square");
    let expected = m.target.poly();
    let n = m.dim();
    let mut first_mismatch = None;
    'outer: for r in 0..n {
        for c in 0..n {
            let want = if r == c { expected.clone() } else { Poly::zero() };
            let got = power.get(r, c);
            if *got != want {
                first_mismatch = Some(EntryMismatch { row: r, col: c, expected: want.to_string(), actual: got.to_string() });
                break 'outer;
            }
        }
    }
    RobyReport { dim: n, degree: e, graded: grading_violation.is_none(), grading_violation, identity: first_mismatch.is_none(), first_mismatch }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::indexed_vars;

    #[test]
    fn zero_module_passes() {
        let y = indexed_vars("y", 2);
        let z = PolyMatrix::zeros(3, 3);
        let m = GradedRobyModule::new(vec![0, 1, 0], vec![z.clone(), z], HomForm::zero(2, y)).unwrap();
        assert!(verify_roby(&m).passed());
    }

    #[test]
    fn shape_errors() {
        let y = indexed_vars("y", 1);
        let f = HomForm::new("y1^2".parse().unwrap(), 2, y).unwrap();
        assert!(GradedRobyModule::new(vec![0, 1], vec![PolyMatrix::zeros(3, 3)], f.clone()).is_err());
        assert!(GradedRobyModule::new(vec![0, 2], vec![PolyMatrix::zeros(2, 2)], f.clone()).is_err());
        let bad = PolyMatrix::parse_rows(&[vec!["0", "y1"], vec!["1", "0"]]).unwrap();
        assert!(GradedRobyModule::new(vec![0, 1], vec![bad], f).is_err());
    }

    #[test]
    fn grading_violation_is_reported() {
        let y = indexed_vars("y", 1);
        let f = HomForm::new("y1^2".parse().unwrap(), 2, y).unwrap();
        // identity squares correctly to 1 but is not degree one
        let m = GradedRobyModule::new(vec![0, 1], vec![PolyMatrix::identity(2)], f).unwrap();
        let r = verify_roby(&m);
        assert!(r.identity);
        assert!(!r.graded);
        assert_eq!(r.grading_violation, Some((0, 0, 0)));
    }
}
