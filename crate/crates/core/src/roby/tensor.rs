use crate::error::RobyError;
use crate::poly::{HomForm, Poly, PolyMatrix};
use crate::roby::{monomial_roby, GradedRobyModule};
use crate::scalar::CycScalar;

fn is_primitive_root(xi: &CycScalar, e: u32) -> bool {
    xi.pow(e as u64).is_one() && (1..e).all(|k| !xi.pow(k as u64).is_one())
}

/// `Z/eZ`-graded tensor product `M1 ⊗̂_ξ M2`:
/// `φ(m)(w1 ⊗ w2) = φ1(m)w1 ⊗ w2 + ξ^{deg w1} w1 ⊗ φ2(m)w2`.
/// `ξ` must be a primitive `e`-th root of unity.
pub fn twisted_tensor(m1: &GradedRobyModule, m2: &GradedRobyModule, xi: &CycScalar) -> Result<GradedRobyModule, RobyError> {
    if m1.degree() == m2.degree() && !is_primitive_root(xi, m1.degree()) {
        return Err(RobyError::NonPrimitiveTwist(m1.degree()));
    }
    twisted_tensor_any_root(m1, m2, xi)
}

/// Same construction without the primitivity check; the result is generally
/// not a Roby module when `ξ` is not primitive.
pub fn twisted_tensor_any_root(m1: &GradedRobyModule, m2: &GradedRobyModule, xi: &CycScalar) -> Result<GradedRobyModule, RobyError> {
    let e = m1.degree();
    if e != m2.degree() {
        return Err(RobyError::DegreeMismatch(e, m2.degree()));
    }
    if m1.target().args() != m2.target().args() || m1.t_slot() != m2.t_slot() {
        return Err(RobyError::ArgumentMismatch);
    }
    let twist = PolyMatrix::diagonal(m1.grading().iter().map(|&g| Poly::constant(xi.pow(g as u64))).collect());
    let id2 = PolyMatrix::identity(m2.dim());
    let actions = m1
        .actions()
        .iter()
        .zip(m2.actions())
        .map(|(a1, a2)| {
            let mut a = PolyMatrix::kron(a1, &id2);
            a.add_assign(&PolyMatrix::kron(&twist, a2)).expect("same shape");
            a
        })
        .collect();
    let grading = m1.grading().iter().flat_map(|&g1| m2.grading().iter().map(move |&g2| (g1 + g2) % e)).collect();
    let target = m1.target().sum(m2.target())?;
    let algebra = match (m1.algebra(), m2.algebra()) {
        (Some(a), Some(b)) if a == b => Some(a.clone()),
        _ => None,
    };
    let base = match m1.t_slot() {
        Some(_) => GradedRobyModule::with_t_slot(grading, actions, target)?,
        None => GradedRobyModule::new(grading, actions, target)?,
    };
    Ok(base.with_algebra_unchecked(algebra))
}

/// Module for an arbitrary form: one monomial module per term, tensored left
/// to right with `ξ = ζ_e`. The zero form gets [`zero_module`].
pub fn form_roby(f: &HomForm) -> Result<GradedRobyModule, RobyError> {
    let xi = CycScalar::make_root(f.degree());
    let mut acc: Option<GradedRobyModule> = None;
    for (m, c) in f.poly().sorted_terms() {
        let term = HomForm::new(Poly::term(c.clone(), m.clone()), f.degree(), f.args().to_vec())?;
        let next = monomial_roby(&term)?;
        acc = Some(match acc {
            None => next,
            Some(a) => twisted_tensor(&a, &next, &xi)?,
        });
    }
    match acc {
        Some(a) => Ok(a),
        None => {
            let one = GradedRobyModule::new(vec![0], vec![PolyMatrix::zeros(1, 1); f.args().len()], f.clone())?;
            Ok(zero_module(&one))
        }
    }
}

/// The rank-one module with all actions zero and zero target, shaped like `like`.
pub fn zero_module(like: &GradedRobyModule) -> GradedRobyModule {
    let actions = vec![PolyMatrix::zeros(1, 1); like.actions().len()];
    let target = HomForm::zero(like.degree(), like.target().args().to_vec());
    match like.t_slot() {
        Some(_) => GradedRobyModule::with_t_slot(vec![0], actions, target),
        None => GradedRobyModule::new(vec![0], actions, target),
    }
    .expect("zero module is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::indexed_vars;
    use crate::roby::verify_roby;

    fn monomial(s: &str, e: u32, n: usize) -> GradedRobyModule {
        monomial_roby(&HomForm::new(s.parse().unwrap(), e, indexed_vars("y", n)).unwrap()).unwrap()
    }

    #[test]
    fn classical_clifford_rank_two() {
        let m = twisted_tensor(&monomial("y1^2", 2, 2), &monomial("y2^2", 2, 2), &CycScalar::make_root(2)).unwrap();
        assert_eq!(m.dim(), 4);
        assert_eq!(m.generic_action().pow(2).unwrap(), PolyMatrix::scalar(4, "y1^2 + y2^2".parse().unwrap()));
        assert!(verify_roby(&m).passed());
    }

    #[test]
    fn cubic_sum_over_zeta3() {
        let m = twisted_tensor(&monomial("y1^3", 3, 2), &monomial("y2^3", 3, 2), &CycScalar::make_root(3)).unwrap();
        assert_eq!(m.dim(), 9);
        assert_eq!(m.generic_action().pow(3).unwrap(), PolyMatrix::scalar(9, "y1^3 + y2^3".parse().unwrap()));
    }

    #[test]
    fn untwisted_fails() {
        let a = monomial("y1^2", 2, 2);
        let b = monomial("y2^2", 2, 2);
        assert!(matches!(twisted_tensor(&a, &b, &CycScalar::one()), Err(RobyError::NonPrimitiveTwist(2))));
        let m = twisted_tensor_any_root(&a, &b, &CycScalar::one()).unwrap();
        let r = verify_roby(&m);
        assert!(r.graded);
        assert!(!r.identity);
        assert!(r.first_mismatch.is_some());
    }

    #[test]
    fn zero_module_is_neutral() {
        let a = monomial("y1*y2", 2, 2);
        let m = twisted_tensor(&a, &zero_module(&a), &CycScalar::make_root(2)).unwrap();
        assert_eq!(m.actions(), a.actions());
        assert_eq!(m.grading(), a.grading());
        assert_eq!(m.target(), a.target());
    }

    #[test]
    fn mismatched_degrees() {
        let a = monomial("y1^2", 2, 1);
        let b = monomial("y1^3", 3, 1);
        assert!(matches!(twisted_tensor(&a, &b, &CycScalar::make_root(2)), Err(RobyError::DegreeMismatch(2, 3))));
    }

    #[test]
    fn form_roby_builds_sums() {
        let y = indexed_vars("y", 3);
        let f = HomForm::new("y1^3 - 2*y2*y3^2 + y1*y2*y3".parse().unwrap(), 3, y.clone()).unwrap();
        let m = form_roby(&f).unwrap();
        assert_eq!(m.dim(), 27);
        assert!(verify_roby(&m).passed());
        let z = form_roby(&HomForm::zero(2, y)).unwrap();
        assert_eq!(z.dim(), 1);
        assert!(verify_roby(&z).passed());
    }
}
