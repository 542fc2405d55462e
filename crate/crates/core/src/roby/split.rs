use std::sync::Arc;

use crate::error::RobyError;
use crate::freealg::FreeAlgebra;
use crate::poly::{Poly, PolyMatrix};
use crate::roby::charmor::morphism_check;
use crate::roby::{char_morphism, verify_roby, GradedRobyModule};
use crate::scalar::CycScalar;

fn cyclic_shift(d: usize) -> PolyMatrix {
    let mut p = PolyMatrix::zeros(d, d);
    for j in 0..d {
        p.set((j + 1) % d, j, Poly::one());
    }
    p
}

fn cyclic_grading(d: usize) -> Vec<u32> {
    (1..=d as u32).map(|j| j % d as u32).collect()
}

/// Module for `χ = Π(t - x_i)` of `R^{×d}` on `R{w_1..w_d}`: `T` shifts
/// `w_i -> w_{i+1}` and `e_i` sends `w_{i-1}` to `-w_i` (indices mod `d`).
pub fn split_roby(d: usize) -> GradedRobyModule {
    assert!(d >= 1, "split module needs positive rank");
    let alg = Arc::new(FreeAlgebra::split(d));
    let gamma = (0..d)
        .map(|i| {
            let mut m = PolyMatrix::zeros(d, d);
            m.set(i, (i + d - 1) % d, Poly::int(-1));
            m
        })
        .collect();
    GradedRobyModule::for_char_poly(alg, cyclic_grading(d), gamma, cyclic_shift(d)).expect("split module is well formed")
}

/// Seed for `A = R[z]/(z^d - q)` from a matrix `Z` with `Z^d = q·I`.
///
/// `W = k^d ⊗ k^n` (block `j` graded `j+1`), `ψ(T)` is the cyclic block
/// shift and `ψ(a) = -C(a)ψ(T)` with `C(z) = diag(ζ Z, ζ^2 Z, …, ζ^d Z)`,
/// so that the extracted characteristic morphism is `C`, an algebra map.
pub fn cyclic_cover_seed(alg: Arc<FreeAlgebra>, z: &PolyMatrix) -> Result<GradedRobyModule, RobyError> {
    let d = alg.rank();
    if d < 2 || !z.is_square() {
        return Err(RobyError::Invalid("cyclic cover needs rank at least 2 and a square matrix".into()));
    }
    if !alg.unit_is_first_basis_element() {
        return Err(RobyError::Invalid("algebra must be presented on 1, z, ..., z^(d-1)".into()));
    }
    let q = alg.structure_constant(1, d - 1, 0).clone();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let expected = if i + j < d {
                    if k == i + j { Poly::one() } else { Poly::zero() }
                } else if k == i + j - d {
                    q.clone()
                } else {
                    Poly::zero()
                };
                if alg.structure_constant(i, j, k) != &expected {
                    return Err(RobyError::Invalid("algebra is not of the form R[z]/(z^d - q) on the power basis".into()));
                }
            }
        }
    }
    let n = z.rows();
    if z.pow(d as u64)? != PolyMatrix::scalar(n, q.clone()) {
        return Err(RobyError::ModuleAxioms(format!("Z^{d} is not ({q})·I")));
    }
    let zeta = CycScalar::make_root(d as u32);
    let t = PolyMatrix::kron(&cyclic_shift(d), &PolyMatrix::identity(n));
    let z_powers: Vec<PolyMatrix> = (0..d).map(|m| z.pow(m as u64)).collect::<Result<_, _>>()?;
    let gamma = (0..d)
        .map(|m| {
            let blocks = (0..d).map(|j| z_powers[m].scale_scalar(&zeta.pow(((j + 1) * m) as u64)));
            let c = blocks.fold(None, |acc: Option<PolyMatrix>, b| Some(match acc {
                None => b,
                Some(a) => PolyMatrix::direct_sum(&a, &b),
            }));
            c.expect("d >= 2").mul(&t).map(|p| p.neg())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let grading = cyclic_grading(d).into_iter().flat_map(|g| std::iter::repeat_n(g, n)).collect();
    GradedRobyModule::for_char_poly(alg, grading, gamma, t)
}

/// Restricts a split module over `B ⊗ k^{×d}` to `A` along an embedding
/// `η: A -> B ⊗ k^{×d}`, after tensoring with a `B`-module `E = W ⊗ R`.
///
/// `module_action[k]` is the action of the `k`-th basis element of `B` on `W`;
/// `embedding[p][k][i]` is the coefficient of `b_k ⊗ e_i` in `η(γ_p)`.
/// The module axioms and the morphism property of `η` are checked first; the
/// Roby identity of the output and the morphism property of its `C` after.
pub fn induce_roby(
    split: &GradedRobyModule,
    alg_a: Arc<FreeAlgebra>,
    alg_b: &FreeAlgebra,
    module_action: &[PolyMatrix],
    embedding: &[Vec<Vec<Poly>>],
) -> Result<GradedRobyModule, RobyError> {
    let d = split.degree() as usize;
    let t_split = split.t_action().ok_or(RobyError::NoTSlot)?;
    if split.actions().len() != d + 1 {
        return Err(RobyError::Invalid("split module must act through d idempotents and T".into()));
    }
    let rb = alg_b.rank();
    if module_action.len() != rb || module_action.iter().any(|m| !m.is_square() || m.rows() != module_action[0].rows()) {
        return Err(RobyError::ModuleAxioms("one square action matrix of common size per basis element of B".into()));
    }
    let check = morphism_check(alg_b, module_action);
    if !check.passed() {
        return Err(RobyError::ModuleAxioms(match check.first_failure {
            Some((i, j)) if check.unit => format!("action is not multiplicative on basis pair ({i},{j})"),
            _ => "unit of B does not act as the identity".into(),
        }));
    }
    let ra = alg_a.rank();
    let shape_ok = embedding.len() == ra && embedding.iter().all(|row| row.len() == rb && row.iter().all(|c| c.len() == d));
    if !shape_ok {
        return Err(RobyError::Invalid(format!("embedding must be {ra}x{rb}x{d}")));
    }
    // each component η_i: A -> B must be an algebra map
    for i in 0..d {
        let image = |p: usize| -> Vec<Poly> { (0..rb).map(|k| embedding[p][k][i].clone()).collect() };
        let unit_image = (0..ra).fold(vec![Poly::zero(); rb], |acc, p| {
            let ip = image(p);
            acc.iter().zip(&ip).map(|(a, b)| a + &(&alg_a.unit()[p] * b)).collect()
        });
        if unit_image != alg_b.unit() {
            return Err(RobyError::Invalid(format!("embedding component {i} does not preserve the unit")));
        }
        for p in 0..ra {
            for q in p..ra {
                let lhs = alg_b.multiply(&image(p), &image(q));
                let rhs = (0..ra).fold(vec![Poly::zero(); rb], |acc, r| {
                    let ir = image(r);
                    let c = alg_a.structure_constant(p, q, r);
                    acc.iter().zip(&ir).map(|(a, b)| a + &(c * b)).collect()
                });
                if lhs != rhs {
                    return Err(RobyError::Invalid(format!("embedding component {i} is not multiplicative on ({p},{q})")));
                }
            }
        }
    }
    let n = module_action[0].rows();
    let gamma = (0..ra)
        .map(|p| {
            let mut acc = PolyMatrix::zeros(n * d, n * d);
            for i in 0..d {
                let coeffs: Vec<Poly> = (0..rb).map(|k| embedding[p][k][i].clone()).collect();
                if coeffs.iter().all(Poly::is_zero) {
                    continue;
                }
                let refs: Vec<&PolyMatrix> = module_action.iter().collect();
                let beta = PolyMatrix::linear_combination(&coeffs, &refs)?;
                acc.add_assign(&PolyMatrix::kron(&beta, split.action(i)))?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>, RobyError>>()?;
    let t = PolyMatrix::kron(&PolyMatrix::identity(n), t_split);
    let grading = (0..n).flat_map(|_| split.grading().iter().copied()).collect();
    let out = GradedRobyModule::for_char_poly(alg_a, grading, gamma, t)?;
    let report = verify_roby(&out);
    if !report.passed() {
        return Err(RobyError::Invalid("induced module fails the Roby identity".into()));
    }
    let c = char_morphism(&out)?;
    if !morphism_check(c.algebra(), c.matrices()).passed() {
        return Err(RobyError::Invalid("induced characteristic morphism is not an algebra morphism".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Var;
    use crate::roby::{char_morphism, verify_char_morphism};

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn split_roby_identity_and_c() {
        for d in 2..=4 {
            let m = split_roby(d);
            assert!(verify_roby(&m).passed(), "d = {d}");
            let c = char_morphism(&m).unwrap();
            for (i, ci) in c.matrices().iter().enumerate() {
                let mut e = PolyMatrix::zeros(d, d);
                e.set(i, i, Poly::one());
                assert_eq!(ci, &e);
            }
        }
        let m2 = split_roby(2);
        assert_eq!(m2.t_action().unwrap(), &PolyMatrix::parse_rows(&[vec!["0", "1"], vec!["1", "0"]]).unwrap());
        assert_eq!(m2.generic_action().pow(2).unwrap(), PolyMatrix::scalar(2, p("(t - G1)*(t - G2)")));
    }

    #[test]
    fn quadric_seed() {
        let alg = Arc::new(FreeAlgebra::monogenic(&p("z^2 - x*y"), Var::new("z"), Some(1)).unwrap());
        let b = PolyMatrix::parse_rows(&[vec!["0", "x"], vec!["y", "0"]]).unwrap();
        let seed = cyclic_cover_seed(alg.clone(), &b).unwrap();
        assert_eq!(seed.dim(), 4);
        assert!(verify_roby(&seed).passed());
        assert_eq!(seed.generic_action().pow(2).unwrap(), PolyMatrix::scalar(4, p("(t - G1)^2 - G2^2*x*y")));
        let c = char_morphism(&seed).unwrap();
        assert_eq!(c.matrices()[1], PolyMatrix::direct_sum(&b.neg(), &b));
        assert!(c.matrices()[0] == PolyMatrix::identity(4));
        let r = verify_char_morphism(&c, &alg.char_poly()).unwrap();
        assert!(r.identity && r.algebra_morphism.passed());
        // T is block-antidiagonal
        let t = seed.t_action().unwrap();
        assert_eq!(t.submatrix(&[0, 1], &[0, 1]), PolyMatrix::zeros(2, 2));
        assert_eq!(t.submatrix(&[2, 3], &[0, 1]), PolyMatrix::identity(2));
    }

    #[test]
    fn cyclic_seed_rejects_bad_matrix() {
        let alg = Arc::new(FreeAlgebra::monogenic(&p("z^2 - x*y"), Var::new("z"), None).unwrap());
        let bad = PolyMatrix::parse_rows(&[vec!["0", "x"], vec!["x", "0"]]).unwrap();
        assert!(matches!(cyclic_cover_seed(alg, &bad), Err(RobyError::ModuleAxioms(_))));
        let not_pure = Arc::new(FreeAlgebra::monogenic(&p("z^2 - x*z - y"), Var::new("z"), None).unwrap());
        assert!(cyclic_cover_seed(not_pure, &PolyMatrix::identity(1)).is_err());
    }

    #[test]
    fn induce_from_trivial_closure_is_split() {
        let d = 3;
        let a = Arc::new(FreeAlgebra::split(d));
        let b = FreeAlgebra::split(1);
        let emb: Vec<Vec<Vec<Poly>>> =
            (0..d).map(|p| vec![(0..d).map(|i| if i == p { Poly::one() } else { Poly::zero() }).collect()]).collect();
        let out = induce_roby(&split_roby(d), a, &b, &[PolyMatrix::identity(1)], &emb).unwrap();
        let reference = split_roby(d);
        assert_eq!(out.actions(), reference.actions());
        assert_eq!(out.grading(), reference.grading());
    }

    #[test]
    fn induce_quadric_double_cover() {
        let a = Arc::new(FreeAlgebra::monogenic(&p("z^2 - x*y"), Var::new("z"), Some(1)).unwrap());
        let b = (*a).clone();
        let beta = vec![PolyMatrix::identity(2), PolyMatrix::parse_rows(&[vec!["0", "x"], vec!["y", "0"]]).unwrap()];
        // 1 -> (1, 1), z -> (z, -z)
        let emb = vec![vec![vec![p("1"), p("1")], vec![p("0"), p("0")]], vec![vec![p("0"), p("0")], vec![p("1"), p("-1")]]];
        let out = induce_roby(&split_roby(2), a.clone(), &b, &beta, &emb).unwrap();
        assert_eq!(out.dim(), 4);
        assert!(verify_roby(&out).passed());
        let c = char_morphism(&out).unwrap();
        assert!(verify_char_morphism(&c, &a.char_poly()).unwrap().algebra_morphism.passed());
    }

    #[test]
    fn induce_rejects_zero_action() {
        let d = 2;
        let a = Arc::new(FreeAlgebra::split(d));
        let b = FreeAlgebra::split(1);
        let emb: Vec<Vec<Vec<Poly>>> =
            (0..d).map(|p| vec![(0..d).map(|i| if i == p { Poly::one() } else { Poly::zero() }).collect()]).collect();
        let r = induce_roby(&split_roby(d), a, &b, &[PolyMatrix::zeros(1, 1)], &emb);
        assert!(matches!(r, Err(RobyError::ModuleAxioms(_))));
    }
}
