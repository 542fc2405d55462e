use std::fmt;

use serde::Serialize;

use crate::error::RobyError;
use crate::freealg::FreeAlgebra;
use crate::poly::{HomForm, Poly, PolyMatrix};
use crate::roby::GradedRobyModule;

/// Roby module of a single-term form `c·y_{i_1}⋯y_{i_e}` on `W = R{w_1..w_e}`:
/// `x_{i_j}` sends `w_j` to `w_{j+1}` (indices mod `e`), and the coefficient
/// `c` rides on the wrap-around step `w_e -> w_1`.
pub fn monomial_roby(f: &HomForm) -> Result<GradedRobyModule, RobyError> {
    if f.poly().num_terms() != 1 {
        return Err(RobyError::MultiTermForm);
    }
    let (mono, coeff) = f.poly().terms().next().expect("one term");
    let args = f.args();
    let (arg_part, base_part) = mono.split(args);
    let c = Poly::term(coeff.clone(), base_part);
    let mut indices = Vec::with_capacity(f.degree() as usize);
    for (k, v) in args.iter().enumerate() {
        for _ in 0..arg_part.exponent(*v) {
            indices.push(k);
        }
    }
    let e = indices.len();
    let mut actions = vec![PolyMatrix::zeros(e, e); args.len()];
    for (j, &i) in indices.iter().enumerate() {
        let next = (j + 1) % e;
        let entry = if j + 1 == e { c.clone() } else { Poly::one() };
        let prev = actions[i].get(next, j).clone();
        actions[i].set(next, j, &prev + &entry);
    }
    let grading = (1..=e as u32).map(|j| j % e as u32).collect();
    GradedRobyModule::new(grading, actions, f.clone())
}

/// One monomial `t^i (c_1 Γ_{k_1})⋯(c_{d-i} Γ_{k_{d-i}})` of a
/// characteristic-polynomial difference. Dual indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialSpec {
    pub t_exponent: usize,
    pub coefficients: Vec<Poly>,
    pub dual_indices: Vec<usize>,
}

impl MonomialSpec {
    pub fn new(t_exponent: usize, factors: Vec<(Poly, usize)>) -> Self {
        let (coefficients, dual_indices) = factors.into_iter().unzip();
        MonomialSpec { t_exponent, coefficients, dual_indices }
    }

    pub fn factor_count(&self) -> usize {
        self.coefficients.len()
    }

    /// The value `t^i Π c_s Γ_{k_s}` as a polynomial.
    pub fn value(&self, alg: &FreeAlgebra) -> Poly {
        let mut p = Poly::var(alg.t_var()).pow(self.t_exponent as u32);
        for (c, &k) in self.coefficients.iter().zip(&self.dual_indices) {
            p = &p * &(c * &Poly::var(alg.dual_vars()[k]));
        }
        p
    }

    fn validate(&self, alg: &FreeAlgebra) -> Result<(), RobyError> {
        let d = alg.rank();
        if self.coefficients.len() != self.dual_indices.len() {
            return Err(RobyError::MalformedMonomial("coefficient and index lists differ in length".into()));
        }
        if self.t_exponent >= d {
            return Err(RobyError::MalformedMonomial(format!("t-exponent {} must be below the rank {d}", self.t_exponent)));
        }
        if self.factor_count() != d - self.t_exponent {
            return Err(RobyError::MalformedMonomial(format!("expected {} factors, found {}", d - self.t_exponent, self.factor_count())));
        }
        if let Some(k) = self.dual_indices.iter().find(|&&k| k >= d) {
            return Err(RobyError::MalformedMonomial(format!("dual index {k} out of range")));
        }
        let reserved: Vec<_> = alg.dual_vars().iter().copied().chain([alg.t_var()]).collect();
        if self.coefficients.iter().any(|c| c.variables().iter().any(|v| reserved.contains(v))) {
            return Err(RobyError::MalformedMonomial("coefficients may not involve dual or t variables".into()));
        }
        Ok(())
    }

    /// Whether each `c_s` is homogeneous of degree `deg γ_{k_s}` (graded algebras only).
    pub fn degrees_consistent(&self, alg: &FreeAlgebra) -> Option<bool> {
        let deg = alg.degrees()?;
        Some(self.coefficients.iter().zip(&self.dual_indices).all(|(c, &k)| {
            c.is_zero() || (deg[k] >= 0 && c.is_homogeneous_in(alg.coeff_vars(), deg[k] as u32))
        }))
    }
}

impl fmt::Display for MonomialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t_exponent > 0 {
            write!(f, "t^{}", self.t_exponent)?;
        }
        for (c, k) in self.coefficients.iter().zip(&self.dual_indices) {
            write!(f, "({c})G{}", k + 1)?;
        }
        Ok(())
    }
}

/// Module on `R{ε_1..ε_d}` for one monomial: `T` shifts `ε_r -> ε_{r+1}` for
/// `r ≤ i`, and `γ_p` sends `ε_r` to `c_{r-i} δ(p, k_{r-i}) ε_{r+1}` for
/// `r > i`, with `ε_{d+1} = ε_1`.
pub fn monomial_charpoly_roby(spec: &MonomialSpec, alg: &FreeAlgebra) -> Result<GradedRobyModule, RobyError> {
    spec.validate(alg)?;
    let d = alg.rank();
    let i = spec.t_exponent;
    let mut actions = vec![PolyMatrix::zeros(d, d); d + 1];
    for r in 0..d {
        let next = (r + 1) % d;
        if r < i {
            actions[d].set(next, r, Poly::one());
        } else {
            let s = r - i;
            let p = spec.dual_indices[s];
            actions[p].set(next, r, spec.coefficients[s].clone());
        }
    }
    let mut args = alg.dual_vars().to_vec();
    args.push(alg.t_var());
    let target = HomForm::new(spec.value(alg), d as u32, args)?;
    let grading = (1..=d as u32).map(|r| r % d as u32).collect();
    GradedRobyModule::with_t_slot(grading, actions, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{indexed_vars, Var};
    use crate::roby::verify_roby;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn two_variable_product() {
        let y = indexed_vars("y", 2);
        let f = HomForm::new(p("y1*y2"), 2, y).unwrap();
        let m = monomial_roby(&f).unwrap();
        assert_eq!(m.action(0), &PolyMatrix::parse_rows(&[vec!["0", "0"], vec!["1", "0"]]).unwrap());
        assert_eq!(m.action(1), &PolyMatrix::parse_rows(&[vec!["0", "1"], vec!["0", "0"]]).unwrap());
        assert_eq!(m.generic_action().pow(2).unwrap(), PolyMatrix::scalar(2, p("y1*y2")));
        assert!(verify_roby(&m).passed());
    }

    #[test]
    fn square_and_cube() {
        let y = indexed_vars("y", 3);
        let sq = monomial_roby(&HomForm::new(p("y1^2"), 2, y.clone()).unwrap()).unwrap();
        assert!(verify_roby(&sq).passed());
        let cube = monomial_roby(&HomForm::new(p("y1*y2*y3"), 3, y.clone()).unwrap()).unwrap();
        assert_eq!(cube.dim(), 3);
        assert_eq!(cube.generic_action().pow(3).unwrap(), PolyMatrix::scalar(3, p("y1*y2*y3")));
        let coeff = monomial_roby(&HomForm::new(p("-5/2*x*y1^2*y3"), 3, y.clone()).unwrap()).unwrap();
        assert!(verify_roby(&coeff).passed());
        assert!(matches!(monomial_roby(&HomForm::new(p("y1^2 + y2^2"), 2, y).unwrap()), Err(RobyError::MultiTermForm)));
    }

    #[test]
    fn charpoly_monomial_quadric_difference() {
        let alg = FreeAlgebra::monogenic(&p("z^2 - (x*y + z2^2)"), Var::new("z"), Some(1)).unwrap();
        let spec = MonomialSpec::new(0, vec![(p("-z2"), 1), (p("z2"), 1)]);
        let m = monomial_charpoly_roby(&spec, &alg).unwrap();
        assert!(m.action(2).is_zero());
        // ψ(a + b z + r T)^2 = -z2^2 b^2
        assert_eq!(m.generic_action().pow(2).unwrap(), PolyMatrix::scalar(2, p("-z2^2*G2^2")));
        assert!(verify_roby(&m).passed());
        assert_eq!(spec.degrees_consistent(&alg), Some(true));
    }

    #[test]
    fn charpoly_monomial_with_t() {
        let alg = FreeAlgebra::monogenic(&p("z^3 - x*z - y"), Var::new("z"), None).unwrap();
        let spec = MonomialSpec::new(1, vec![(p("x"), 1), (p("3*z2"), 2)]);
        let m = monomial_charpoly_roby(&spec, &alg).unwrap();
        assert_eq!(m.target().poly(), &p("3*x*z2*t*G2*G3"));
        assert!(verify_roby(&m).passed());
    }

    #[test]
    fn charpoly_monomial_rejects_malformed() {
        let alg = FreeAlgebra::split(2);
        assert!(monomial_charpoly_roby(&MonomialSpec::new(2, vec![]), &alg).is_err());
        assert!(monomial_charpoly_roby(&MonomialSpec::new(0, vec![(p("x"), 0)]), &alg).is_err());
        assert!(monomial_charpoly_roby(&MonomialSpec::new(0, vec![(p("x"), 0), (p("1"), 5)]), &alg).is_err());
        assert!(monomial_charpoly_roby(&MonomialSpec::new(0, vec![(p("t"), 0), (p("1"), 1)]), &alg).is_err());
    }

    #[test]
    fn zero_monomial_gives_zero_target() {
        let alg = FreeAlgebra::split(2);
        let m = monomial_charpoly_roby(&MonomialSpec::new(0, vec![(Poly::zero(), 0), (Poly::zero(), 1)]), &alg).unwrap();
        assert!(m.target().poly().is_zero());
        assert!(m.actions().iter().all(PolyMatrix::is_zero));
        assert!(verify_roby(&m).passed());
    }
}
