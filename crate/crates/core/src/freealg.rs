//! Finite free commutative algebras over a polynomial coefficient ring, their
//! regular representations, and the generic characteristic polynomial.

use std::collections::HashMap;
use std::fmt;

use crate::error::AlgebraError;
use crate::poly::{indexed_vars, HomForm, Poly, PolyMatrix, Var};

/// A commutative algebra `A = R{γ_1..γ_d}` given by structure constants
/// `γ_i γ_j = Σ_k c[i][j][k] γ_k` with `c` in `R = k[coefficient vars]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreeAlgebra {
    basis: Vec<String>,
    degrees: Option<Vec<i64>>,
    coeff_vars: Vec<Var>,
    structure: Vec<Vec<Vec<Poly>>>,
    unit: Vec<Poly>,
    unit_is_first: bool,
    dual_vars: Vec<Var>,
    t_var: Var,
}

impl FreeAlgebra {
    /// Validates commutativity, the unit law, associativity and (when degrees
    /// are given) homogeneity of the structure constants.
    pub fn new(
        basis: Vec<String>,
        degrees: Option<Vec<i64>>,
        coeff_vars: Vec<Var>,
        structure: Vec<Vec<Vec<Poly>>>,
        unit: Vec<Poly>,
    ) -> Result<Self, AlgebraError> {
        let alg = Self::assemble(basis, degrees, coeff_vars, structure, unit)?;
        alg.validate()?;
        Ok(alg)
    }

    /// Builds without the commutativity/unit/associativity checks. Intended for
    /// negative controls; downstream identities are meaningless on invalid input.
    pub fn new_unchecked(
        basis: Vec<String>,
        degrees: Option<Vec<i64>>,
        coeff_vars: Vec<Var>,
        structure: Vec<Vec<Vec<Poly>>>,
        unit: Vec<Poly>,
    ) -> Result<Self, AlgebraError> {
        Self::assemble(basis, degrees, coeff_vars, structure, unit)
    }

    fn assemble(
        basis: Vec<String>,
        degrees: Option<Vec<i64>>,
        coeff_vars: Vec<Var>,
        structure: Vec<Vec<Vec<Poly>>>,
        unit: Vec<Poly>,
    ) -> Result<Self, AlgebraError> {
        let d = basis.len();
        if d == 0 {
            return Err(AlgebraError::EmptyBasis);
        }
        let shape_ok = structure.len() == d && structure.iter().all(|row| row.len() == d && row.iter().all(|c| c.len() == d));
        if !shape_ok || unit.len() != d {
            return Err(AlgebraError::Invalid(format!("structure constants must be {d}x{d}x{d} with a length-{d} unit")));
        }
        if let Some(deg) = &degrees {
            if deg.len() != d {
                return Err(AlgebraError::Invalid("one degree per basis element required".into()));
            }
        }
        let dual_vars = indexed_vars("G", d);
        let t_var = Var::new("t");
        for v in &coeff_vars {
            if dual_vars.contains(v) || *v == t_var {
                return Err(AlgebraError::Invalid(format!("coefficient variable `{v}` clashes with a dual or t variable")));
            }
        }
        for p in structure.iter().flatten().flatten().chain(unit.iter()) {
            if let Some(v) = p.variables().into_iter().find(|v| !coeff_vars.contains(v)) {
                return Err(AlgebraError::Invalid(format!("structure constant uses undeclared variable `{v}`")));
            }
        }
        let unit_is_first = unit[0].is_one() && unit[1..].iter().all(Poly::is_zero);
        Ok(FreeAlgebra { basis, degrees, coeff_vars, structure, unit, unit_is_first, dual_vars, t_var })
    }

    fn validate(&self) -> Result<(), AlgebraError> {
        let d = self.rank();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if self.structure[i][j][k] != self.structure[j][i][k] {
                        return Err(AlgebraError::NotCommutative { i, j, k });
                    }
                }
            }
        }
        for j in 0..d {
            let mut e = vec![Poly::zero(); d];
            e[j] = Poly::one();
            if self.multiply(&self.unit, &e) != e {
                return Err(AlgebraError::UnitLaw(j));
            }
        }
        for i in 0..d {
            for j in i..d {
                for k in 0..d {
                    // (γ_i γ_j) γ_k versus γ_i (γ_j γ_k)
                    let left: Vec<Poly> = (0..d)
                        .map(|m| (0..d).fold(Poly::zero(), |acc, l| &acc + &(&self.structure[i][j][l] * &self.structure[l][k][m])))
                        .collect();
                    let right: Vec<Poly> = (0..d)
                        .map(|m| (0..d).fold(Poly::zero(), |acc, l| &acc + &(&self.structure[j][k][l] * &self.structure[i][l][m])))
                        .collect();
                    if left != right {
                        return Err(AlgebraError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        if let Some(deg) = &self.degrees {
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        let c = &self.structure[i][j][k];
                        let expected = deg[i] + deg[j] - deg[k];
                        let ok = c.is_zero() || (expected >= 0 && c.is_homogeneous_in(&self.coeff_vars, expected as u32));
                        if !ok {
                            return Err(AlgebraError::NotGraded { i, j, k, expected });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `R[z]/(p(z))` on the basis `1, z, …, z^{d-1}`. `generator_degree`
    /// grades the algebra with `deg z^i = i * generator_degree`.
    pub fn monogenic(p: &Poly, z: Var, generator_degree: Option<i64>) -> Result<Self, AlgebraError> {
        let coeffs = p.coefficients_in(z);
        let d = coeffs.len() - 1;
        if d == 0 || !coeffs[d].is_one() {
            return Err(AlgebraError::NotMonic(z.to_string()));
        }
        let mut coeff_vars: Vec<Var> = p.variables().into_iter().filter(|v| *v != z).collect();
        coeff_vars.sort_by_key(|v| v.name());
        // z^k as coordinates on 1..z^{d-1}, for k up to 2d-2
        let mut powers: Vec<Vec<Poly>> = Vec::with_capacity(2 * d - 1);
        for k in 0..(2 * d - 1) {
            let v = if k < d {
                let mut v = vec![Poly::zero(); d];
                v[k] = Poly::one();
                v
            } else {
                // z^k = z * z^{k-1}; shift then replace z^d by -(p_0 + ... + p_{d-1} z^{d-1})
                let prev = &powers[k - 1];
                let top = prev[d - 1].clone();
                let mut v = vec![Poly::zero(); d];
                v[1..].clone_from_slice(&prev[..d - 1]);
                if !top.is_zero() {
                    for (i, slot) in v.iter_mut().enumerate() {
                        *slot = &*slot - &(&top * &coeffs[i]);
                    }
                }
                v
            };
            powers.push(v);
        }
        let structure = (0..d).map(|i| (0..d).map(|j| powers[i + j].clone()).collect()).collect();
        let basis = (0..d)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => z.to_string(),
                _ => format!("{z}^{i}"),
            })
            .collect();
        let degrees = generator_degree.map(|g| (0..d as i64).map(|i| i * g).collect());
        let mut unit = vec![Poly::zero(); d];
        unit[0] = Poly::one();
        Self::new(basis, degrees, coeff_vars, structure, unit)
    }

    /// `R^{×d}` on orthogonal idempotents `e_1..e_d`; the unit is `e_1 + … + e_d`.
    pub fn split(d: usize) -> Self {
        let structure = (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|k| if i == j && j == k { Poly::one() } else { Poly::zero() }).collect()).collect())
            .collect();
        let basis = (1..=d).map(|i| format!("e{i}")).collect();
        Self::new(basis, Some(vec![0; d]), Vec::new(), structure, vec![Poly::one(); d]).expect("split algebra is valid")
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    pub fn degrees(&self) -> Option<&[i64]> {
        self.degrees.as_deref()
    }

    pub fn coeff_vars(&self) -> &[Var] {
        &self.coeff_vars
    }

    /// `Γ_1..Γ_d`.
    pub fn dual_vars(&self) -> &[Var] {
        &self.dual_vars
    }

    pub fn t_var(&self) -> Var {
        self.t_var
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Poly {
        &self.structure[i][j][k]
    }

    /// Coordinates of the unit element.
    pub fn unit(&self) -> &[Poly] {
        &self.unit
    }

    /// `false` when the unit is not `γ_1` (the idempotent presentation of a split algebra).
    pub fn unit_is_first_basis_element(&self) -> bool {
        self.unit_is_first
    }

    /// Product of two elements given in coordinates.
    pub fn multiply(&self, u: &[Poly], v: &[Poly]) -> Vec<Poly> {
        let d = self.rank();
        let mut out = vec![Poly::zero(); d];
        for i in 0..d {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if v[j].is_zero() {
                    continue;
                }
                let uv = &u[i] * &v[j];
                for (k, slot) in out.iter_mut().enumerate() {
                    let c = &self.structure[i][j][k];
                    if !c.is_zero() {
                        *slot += &(&uv * c);
                    }
                }
            }
        }
        out
    }

    /// Matrix of multiplication by the generic element `a = Σ Γ_i γ_i`.
    pub fn regular_representation(&self) -> PolyMatrix {
        let gens: Vec<Poly> = self.dual_vars.iter().map(|&v| Poly::var(v)).collect();
        self.multiplication_matrix(&gens)
    }

    /// Matrix of multiplication by `u` (column `j` holds the coordinates of `u γ_j`).
    pub fn multiplication_matrix(&self, u: &[Poly]) -> PolyMatrix {
        let d = self.rank();
        PolyMatrix::from_fn(d, d, |k, j| {
            (0..d).fold(Poly::zero(), |acc, i| {
                let c = &self.structure[i][j][k];
                if c.is_zero() || u[i].is_zero() {
                    acc
                } else {
                    &acc + &(&u[i] * c)
                }
            })
        })
    }

    pub fn char_poly(&self) -> CharPoly {
        let coeffs = berkowitz(&self.regular_representation());
        CharPoly::from_descending(coeffs, self.dual_vars.clone(), self.t_var)
    }

    /// Applies `bindings` to every structure constant (base change along a
    /// map of coefficient rings).
    pub fn substitute(&self, bindings: &HashMap<Var, Poly>) -> Result<Self, AlgebraError> {
        if let Some(v) = bindings.keys().find(|v| self.dual_vars.contains(v) || **v == self.t_var) {
            return Err(AlgebraError::BindsDualVariable(v.to_string()));
        }
        let structure = self
            .structure
            .iter()
            .map(|row| row.iter().map(|c| c.iter().map(|p| p.substitute(bindings)).collect()).collect())
            .collect();
        let unit = self.unit.iter().map(|p| p.substitute(bindings)).collect();
        let mut coeff_vars: Vec<Var> = self.coeff_vars.iter().copied().filter(|v| !bindings.contains_key(v)).collect();
        for p in bindings.values() {
            for v in p.variables() {
                if !coeff_vars.contains(&v) {
                    coeff_vars.push(v);
                }
            }
        }
        let degrees = self.degrees.clone();
        let alg = Self::assemble(self.basis.clone(), degrees, coeff_vars, structure, unit)?;
        // base change preserves the algebra axioms; grading survives only for homogeneous substitutions
        match alg.validate() {
            Ok(()) => Ok(alg),
            Err(AlgebraError::NotGraded { .. }) => {
                let alg = FreeAlgebra { degrees: None, ..alg };
                alg.validate()?;
                Ok(alg)
            }
            Err(e) => Err(e),
        }
    }

    /// Same algebra with a larger declared coefficient ring.
    pub fn with_coeff_vars(&self, vars: &[Var]) -> Result<Self, AlgebraError> {
        let mut cv = self.coeff_vars.clone();
        for v in vars {
            if !cv.contains(v) {
                cv.push(*v);
            }
        }
        Self::assemble(self.basis.clone(), self.degrees.clone(), cv, self.structure.clone(), self.unit.clone())
    }
}

/// Coefficients of `det(tI - A)` from the highest power down, computed with
/// Berkowitz's division-free recurrence.
pub fn berkowitz(a: &PolyMatrix) -> Vec<Poly> {
    assert!(a.is_square(), "berkowitz needs a square matrix");
    let n = a.rows();
    let mut p: Vec<Poly> = vec![Poly::one()];
    for r in 0..n {
        // leading r x r block A_r, column S = A[0..r, r], row R = A[r, 0..r]
        let a_rr = a.get(r, r).clone();
        let mut col: Vec<Poly> = Vec::with_capacity(r + 2);
        col.push(Poly::one());
        col.push(-&a_rr);
        let mut v: Vec<Poly> = (0..r).map(|i| a.get(i, r).clone()).collect();
        for k in 0..r {
            if k > 0 {
                // v <- A_r v
                v = (0..r)
                    .map(|i| (0..r).fold(Poly::zero(), |acc, j| if a.get(i, j).is_zero() || v[j].is_zero() { acc } else { &acc + &(a.get(i, j) * &v[j]) }))
                    .collect();
            }
            let rv = (0..r).fold(Poly::zero(), |acc, j| if a.get(r, j).is_zero() || v[j].is_zero() { acc } else { &acc + &(a.get(r, j) * &v[j]) });
            col.push(-&rv);
        }
        // p_{r+1} = T p_r with T lower-triangular Toeplitz built from col
        let next: Vec<Poly> = (0..r + 2)
            .map(|i| {
                (0..=r.min(i)).fold(Poly::zero(), |acc, j| {
                    if j >= p.len() || i - j >= col.len() || col[i - j].is_zero() || p[j].is_zero() {
                        acc
                    } else {
                        &acc + &(&col[i - j] * &p[j])
                    }
                })
            })
            .collect();
        p = next;
    }
    p
}

/// The generic characteristic polynomial `χ_A(t) = det(tI - ρ_A(Σ Γ_i γ_i))`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharPoly {
    rank: usize,
    dual_vars: Vec<Var>,
    t_var: Var,
    poly: Poly,
}

impl CharPoly {
    fn from_descending(coeffs: Vec<Poly>, dual_vars: Vec<Var>, t_var: Var) -> Self {
        let d = coeffs.len() - 1;
        let t = Poly::var(t_var);
        let mut poly = Poly::zero();
        for (j, c) in coeffs.iter().enumerate() {
            poly += &(c * &t.pow((d - j) as u32));
        }
        CharPoly { rank: d, dual_vars, t_var, poly }
    }

    /// Wraps an explicit polynomial, checking it is monic of degree `rank` in `t`.
    pub fn from_poly(poly: Poly, dual_vars: Vec<Var>, t_var: Var) -> Result<Self, AlgebraError> {
        let rank = dual_vars.len();
        let coeffs = poly.coefficients_in(t_var);
        if coeffs.len() != rank + 1 || !coeffs[rank].is_one() {
            return Err(AlgebraError::NotMonic(t_var.to_string()));
        }
        Ok(CharPoly { rank, dual_vars, t_var, poly })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn dual_vars(&self) -> &[Var] {
        &self.dual_vars
    }

    pub fn t_var(&self) -> Var {
        self.t_var
    }

    /// Coefficient of `t^k` for `k = 0..=d`.
    pub fn coefficients(&self) -> Vec<Poly> {
        let mut c = self.poly.coefficients_in(self.t_var);
        c.resize(self.rank + 1, Poly::zero());
        c
    }

    /// As a degree-`d` form in the arguments `Γ_1..Γ_d, t`.
    pub fn to_form(&self) -> HomForm {
        let mut args = self.dual_vars.clone();
        args.push(self.t_var);
        HomForm::new(self.poly.clone(), self.rank as u32, args).expect("characteristic polynomial is homogeneous")
    }

    /// Substitution on coefficient-ring variables only.
    pub fn restrict(&self, bindings: &HashMap<Var, Poly>) -> Result<CharPoly, AlgebraError> {
        if let Some(v) = bindings.keys().find(|v| self.dual_vars.contains(v) || **v == self.t_var) {
            return Err(AlgebraError::BindsDualVariable(v.to_string()));
        }
        Ok(CharPoly { poly: self.poly.substitute(bindings), ..self.clone() })
    }

    /// `Σ_k coeff_k · M^k` (Horner), with `Γ` left symbolic in the coefficients.
    pub fn evaluate_at_matrix(&self, m: &PolyMatrix) -> PolyMatrix {
        let coeffs = self.coefficients();
        let n = m.rows();
        let mut acc = PolyMatrix::scalar(n, coeffs[self.rank].clone());
        for k in (0..self.rank).rev() {
            acc = acc.mul(m).expect("square matrix");
            acc.add_assign(&PolyMatrix::scalar(n, coeffs[k].clone())).expect("same shape");
        }
        acc
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

/// Outcome of a Cayley–Hamilton check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyHamiltonReport {
    pub passed: bool,
    /// First nonzero entry of `χ(ρ(a), a)` when the check fails.
    pub first_nonzero: Option<(usize, usize, Poly)>,
}

/// `χ(ρ(a), a) = 0` for the generic element `a`.
pub fn cayley_hamilton_check(alg: &FreeAlgebra) -> CayleyHamiltonReport {
    cayley_hamilton_residual(&alg.char_poly(), &alg.regular_representation())
}

/// Evaluates `chi` at an arbitrary generic matrix and reports whether the result vanishes.
pub fn cayley_hamilton_residual(chi: &CharPoly, rho: &PolyMatrix) -> CayleyHamiltonReport {
    let residual = chi.evaluate_at_matrix(rho);
    let first_nonzero = residual.nonzeros().next().map(|(i, j, p)| (i, j, p.clone()));
    CayleyHamiltonReport { passed: first_nonzero.is_none(), first_nonzero }
}
