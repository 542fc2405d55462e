//! Extension of a characteristic morphism from a line to the whole space:
//! decompose `χ - χ_ℓ` into monomials, tensor the seed with one monomial
//! module per term, extract `C`, and check the filtered structure on the line.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::error::{AlgebraError, LineError, RobyError};
use crate::freealg::FreeAlgebra;
use crate::linegeom::{is_ulrich_over_line, restrict_to_line, GradedModuleP1, Line};
use crate::poly::{Monomial, Poly, PolyMatrix, Var};
use crate::roby::{
    char_morphism, cyclic_cover_seed, graded_quotients, monomial_charpoly_roby, split_roby, twisted_tensor, verify_char_morphism,
    verify_filtered_pseudo, verify_roby, CharMorphism, CharMorphismReport, FilteredPseudoReport, Filtration, GradedRobyModule,
    MonomialSpec, RobyReport,
};
use crate::scalar::CycScalar;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("seed rejected: {0}")]
    SeedRejected(String),
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("module would have dimension {dim}, above the limit {limit}")]
    TooLarge { dim: String, limit: usize },
    #[error("verification failed at step `{step}`: {detail}")]
    Verification { step: String, detail: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Roby(#[from] RobyError),
    #[error(transparent)]
    Line(#[from] LineError),
}

impl PipelineError {
    /// Input problems as opposed to failed identities.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, PipelineError::Verification { .. })
    }
}

/// How the module on the line is obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Seed {
    /// The split module; the restricted algebra must be `k[x,y]^{×d}` on its idempotent basis.
    Split,
    /// Cyclic-cover seed for `z^d = q` from a matrix `Z` with `Z^d = q·I`.
    CyclicCover(PolyMatrix),
    /// Explicit module over `k[x,y]` with T-slot.
    Module(GradedRobyModule),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineSpec {
    pub algebra: Arc<FreeAlgebra>,
    pub line: Line,
    pub seed: Seed,
}

/// Status of one pipeline step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

/// One monomial of `χ - χ_0` with its degree bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialRecord {
    pub spec: String,
    pub degrees_consistent: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub chi: Poly,
    pub chi_line: Poly,
    pub graded_mode: bool,
    pub coordinate_change: bool,
    pub monomials: Vec<MonomialSpec>,
    pub monomial_records: Vec<MonomialRecord>,
    pub seed: GradedRobyModule,
    pub seed_morphism: CharMorphism,
    pub module: GradedRobyModule,
    pub morphism: CharMorphism,
    pub filtration: Filtration,
    pub restricted: CharMorphism,
    pub roby: RobyReport,
    pub char_report: CharMorphismReport,
    pub filtered: FilteredPseudoReport,
    pub quotients_match_seed: bool,
    pub line_splitting_type: Vec<i64>,
    pub steps: Vec<StepReport>,
}

impl PipelineOutput {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.passed)
    }
}

struct Steps(Vec<StepReport>, Instant);

impl Steps {
    fn record(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> Result<(), PipelineError> {
        let millis = self.1.elapsed().as_millis();
        self.1 = Instant::now();
        let detail = detail.into();
        self.0.push(StepReport { name: name.into(), passed, detail: detail.clone(), millis });
        if passed {
            Ok(())
        } else {
            Err(PipelineError::Verification { step: name.into(), detail })
        }
    }
}

fn in_line_ideal(c: &Poly, zs: &[Var]) -> bool {
    c.terms().all(|(m, _)| zs.iter().any(|z| m.exponent(*z) > 0))
}

/// Splits `χ - χ_0` into monomials `t^i (c_1 Γ_{k_1})⋯(c_{d-i} Γ_{k_{d-i}})`
/// whose last coefficient lies in the ideal of the line `z = 0`.
///
/// Ungraded: terms are grouped by their `(Γ, t)` part and the whole
/// coefficient goes on the last factor. Graded: each term's base monomial is
/// spread over the factors by `deg γ_k`, line variables filling the last
/// factor first, falling back to the ungraded split when that is impossible.
pub fn decompose(alg: &FreeAlgebra, diff: &Poly, zs: &[Var]) -> Result<Vec<MonomialSpec>, PipelineError> {
    let d = alg.rank();
    let t = alg.t_var();
    let mut args: Vec<Var> = alg.dual_vars().to_vec();
    args.push(t);
    let mut out = Vec::new();
    for (mono, coeff) in diff.collect_in(&args) {
        let i = mono.exponent(t) as usize;
        let mut idx: Vec<usize> = Vec::new();
        for (k, g) in alg.dual_vars().iter().enumerate() {
            idx.extend(std::iter::repeat_n(k, mono.exponent(*g) as usize));
        }
        if i >= d || idx.len() != d - i {
            return Err(PipelineError::Decomposition(format!("term {mono} is not of degree {d} in the dual and t variables")));
        }
        if !in_line_ideal(&coeff, zs) {
            return Err(PipelineError::Decomposition(format!("coefficient {coeff} of {mono} has a term off the line ideal")));
        }
        match alg.degrees() {
            Some(deg) => {
                for (m, s) in coeff.sorted_terms() {
                    out.push(graded_split(i, &idx, deg, m, s, zs).unwrap_or_else(|| ungraded_split(i, &idx, Poly::term(s.clone(), m.clone()))));
                }
            }
            None => out.push(ungraded_split(i, &idx, coeff)),
        }
    }
    Ok(out)
}

fn ungraded_split(i: usize, idx: &[usize], coeff: Poly) -> MonomialSpec {
    let n = idx.len();
    let factors = idx.iter().enumerate().map(|(s, &k)| (if s + 1 == n { coeff.clone() } else { Poly::one() }, k)).collect();
    MonomialSpec::new(i, factors)
}

fn graded_split(i: usize, idx: &[usize], deg: &[i64], m: &Monomial, s: &CycScalar, zs: &[Var]) -> Option<MonomialSpec> {
    let mut order: Vec<usize> = idx.to_vec();
    order.sort_by_key(|&k| (deg[k], k));
    let total: i64 = order.iter().map(|&k| deg[k]).sum();
    if total != m.total_degree() as i64 || order.iter().any(|&k| deg[k] < 0) {
        return None;
    }
    // variables with line variables first, each repeated by its exponent
    let mut vars: Vec<Var> = Vec::new();
    for pass_z in [true, false] {
        for &(v, e) in m.pairs() {
            if zs.contains(&v) == pass_z {
                vars.extend(std::iter::repeat_n(v, e as usize));
            }
        }
    }
    let mut coeffs = vec![Poly::one(); order.len()];
    let mut pos = 0;
    for slot in (0..order.len()).rev() {
        let need = deg[order[slot]] as usize;
        let part = Monomial::from_pairs(vars[pos..pos + need].iter().map(|&v| (v, 1)));
        coeffs[slot] = Poly::term(CycScalar::one(), part);
        pos += need;
    }
    coeffs[0] = coeffs[0].scale(s);
    let last = coeffs.last().expect("at least one factor");
    if !in_line_ideal(last, zs) {
        return None;
    }
    Some(MonomialSpec::new(i, coeffs.into_iter().zip(order).collect()))
}

/// Blocks `W ⊗ ε_μ` of the tensor product of the seed with `k` monomial
/// modules of rank `d`, ordered by decreasing `Σ μ_j`, then lexicographically.
pub fn tensor_blocks(seed_dim: usize, d: usize, k: usize) -> Vec<Vec<usize>> {
    let stride = d.pow(k as u32);
    let mut mus: Vec<Vec<usize>> = (0..stride)
        .map(|mut n| {
            let mut mu = vec![0; k];
            for j in (0..k).rev() {
                mu[j] = n % d;
                n /= d;
            }
            mu
        })
        .collect();
    mus.sort_by(|a, b| b.iter().sum::<usize>().cmp(&a.iter().sum::<usize>()).then(a.cmp(b)));
    mus.iter()
        .map(|mu| {
            let off = mu.iter().fold(0, |acc, &e| acc * d + e);
            (0..seed_dim).map(|w| w * stride + off).collect()
        })
        .collect()
}

fn build_seed(seed: &Seed, alg_line: &Arc<FreeAlgebra>) -> Result<GradedRobyModule, PipelineError> {
    let reject = |e: RobyError| PipelineError::SeedRejected(e.to_string());
    match seed {
        Seed::Split => {
            let m = split_roby(alg_line.rank());
            let split_alg = m.algebra().expect("split module carries its algebra");
            if split_alg.char_poly() != alg_line.char_poly() {
                return Err(PipelineError::SeedRejected("restricted algebra is not split on its given basis".into()));
            }
            Ok(m.with_algebra_unchecked(Some(alg_line.clone())))
        }
        Seed::CyclicCover(z) => cyclic_cover_seed(alg_line.clone(), z).map_err(reject),
        Seed::Module(m) => {
            let stripped = GradedRobyModule::with_t_slot(m.grading().to_vec(), m.actions().to_vec(), m.target().clone()).map_err(reject)?;
            stripped.attach_algebra(alg_line.clone()).map_err(|e| match e {
                RobyError::TargetMismatch => PipelineError::SeedRejected("seed target differs from the characteristic polynomial on the line".into()),
                other => reject(other),
            })
        }
    }
}

/// Largest module [`run`] will assemble. Actions are dense, so memory grows
/// with the square of this.
pub const DEFAULT_MAX_MODULE_DIM: usize = 1024;

/// Runs the full construction and every verification.
pub fn run(spec: &PipelineSpec) -> Result<PipelineOutput, PipelineError> {
    run_traced(spec).1
}

/// Like [`run`], also returning the steps completed before any failure. A
/// failure is the last entry, marked failed.
pub fn run_traced(spec: &PipelineSpec) -> (Vec<StepReport>, Result<PipelineOutput, PipelineError>) {
    run_traced_with_limit(spec, DEFAULT_MAX_MODULE_DIM)
}

/// [`run_traced`] with an explicit cap on the module dimension.
pub fn run_traced_with_limit(spec: &PipelineSpec, max_dim: usize) -> (Vec<StepReport>, Result<PipelineOutput, PipelineError>) {
    let mut steps = Steps(Vec::new(), Instant::now());
    let res = run_inner(spec, max_dim, &mut steps);
    if let Err(e) = &res {
        if steps.0.last().is_none_or(|s| s.passed) {
            let name = match e {
                PipelineError::SeedRejected(_) => "seed",
                PipelineError::Decomposition(_) => "decomposition",
                PipelineError::TooLarge { .. } => "assembly",
                _ => "input",
            };
            let _ = steps.record(name, false, e.to_string());
        }
    }
    let mut res = res;
    if let Ok(out) = &mut res {
        out.steps = steps.0.clone();
    }
    (steps.0, res)
}

fn run_inner(spec: &PipelineSpec, max_dim: usize, steps: &mut Steps) -> Result<PipelineOutput, PipelineError> {
    let alg0 = spec.algebra.clone();
    let line = &spec.line;
    line.check_covers(alg0.coeff_vars())?;
    let zs: Vec<Var> = line.bindings.keys().copied().collect();

    // move the line to z = 0
    let coordinate_change = !line.is_coordinate();
    let shift: HashMap<Var, Poly> = line.bindings.iter().map(|(z, l)| (*z, &Poly::var(*z) + l)).collect();
    let unshift: HashMap<Var, Poly> = line.bindings.iter().map(|(z, l)| (*z, &Poly::var(*z) - l)).collect();
    let alg = if coordinate_change { Arc::new(alg0.substitute(&shift)?) } else { alg0.clone() };
    let zero_line = Line::coordinate(line.x, line.y, &zs)?;
    let to_line = zero_line.as_map();

    let chi = alg.char_poly();
    let alg_line = Arc::new(alg.substitute(&to_line)?);
    let chi_line = alg_line.char_poly();
    let base_change = chi.restrict(&to_line)? == chi_line;
    steps.record("characteristic polynomial", base_change, format!("chi = {chi}; on the line: {chi_line}"))?;

    let seed = build_seed(&spec.seed, &alg_line)?;
    let seed_report = verify_roby(&seed);
    if !seed_report.passed() {
        let detail = match &seed_report.first_mismatch {
            Some(e) => format!("entry ({},{}) is {} but should be {}", e.row, e.col, e.actual, e.expected),
            None => "seed is not graded".into(),
        };
        return Err(PipelineError::SeedRejected(format!("Roby identity fails: {detail}")));
    }
    let seed_c = char_morphism(&seed)?;
    let seed_check = verify_char_morphism(&seed_c, &chi_line)?;
    if !seed_check.algebra_morphism.passed() {
        return Err(PipelineError::SeedRejected("seed characteristic morphism is not an algebra morphism".into()));
    }
    steps.record("seed", true, format!("{}-dimensional seed passes the Roby identity; its C is an algebra morphism", seed.dim()))?;

    let diff = chi.poly() - chi_line.poly();
    let monomials = decompose(&alg, &diff, &zs)?;
    let graded_mode = alg.degrees().is_some();
    let monomial_records: Vec<MonomialRecord> =
        monomials.iter().map(|m| MonomialRecord { spec: m.to_string(), degrees_consistent: m.degrees_consistent(&alg) }).collect();
    let recomposed = monomials.iter().fold(Poly::zero(), |acc, m| &acc + &m.value(&alg));
    steps.record(
        "decomposition",
        recomposed == diff,
        format!("{} monomial(s){}", monomials.len(), if graded_mode { "" } else { "; ungraded mode" }),
    )?;

    let d = alg.rank();
    let dim = (d as u128).checked_pow(monomials.len() as u32).and_then(|p| p.checked_mul(seed.dim() as u128));
    if dim.is_none_or(|n| n > max_dim as u128) {
        let dim = dim.map_or_else(|| format!("{}·{d}^{}", seed.dim(), monomials.len()), |n| n.to_string());
        return Err(PipelineError::TooLarge { dim, limit: max_dim });
    }
    let xi = CycScalar::make_root(d as u32);
    let mut module = GradedRobyModule::with_t_slot(seed.grading().to_vec(), seed.actions().to_vec(), seed.target().clone())?;
    for m in &monomials {
        module = twisted_tensor(&module, &monomial_charpoly_roby(m, &alg)?, &xi)?;
    }
    let module = module.attach_algebra(alg.clone())?;
    steps.record("assembly", true, format!("{}-dimensional module", module.dim()))?;

    let roby = verify_roby(&module);
    let detail = match &roby.first_mismatch {
        Some(e) => format!("entry ({},{}) is {} but should be {}", e.row, e.col, e.actual, e.expected),
        None if !roby.graded => format!("grading violated at {:?}", roby.grading_violation),
        None => "Roby identity holds".into(),
    };
    steps.record("roby identity", roby.passed(), detail)?;

    let morphism = char_morphism(&module)?;
    let char_report = verify_char_morphism(&morphism, &chi)?;
    let detail = match &char_report.first_nonzero {
        Some((r, c, p)) => format!("entry ({r},{c}) of chi(C(a), a) is {p}"),
        None => "chi(C(a), a) = 0".into(),
    };
    steps.record("characteristic morphism", char_report.passed(), detail)?;

    let blocks = tensor_blocks(seed.dim(), d, monomials.len());
    let filtration = Filtration::from_blocks(module.dim(), &blocks)?;
    let restricted = restrict_to_line(&morphism, &zero_line)?;
    let filtered = verify_filtered_pseudo(&restricted, &filtration)?;
    let detail = if let Some((k, r, c)) = filtered.first_violation {
        format!("C(gamma_{}) moves basis vector {c} out of its flag (entry {r})", k + 1)
    } else if let Some(q) = filtered.first_failing_quotient {
        format!("graded piece {q} is not an algebra morphism")
    } else {
        format!("{} graded pieces", blocks.len())
    };
    steps.record("filtered pseudomorphism", filtered.passed(), detail)?;

    let quotients = graded_quotients(&restricted, &filtration);
    let quotients_match_seed = quotients.iter().all(|q| q.as_slice() == seed_c.matrices());
    steps.record("graded pieces", quotients_match_seed, "every graded piece equals the seed's C")?;

    let underlying = GradedModuleP1::underlying(&restricted, line.x, line.y)?;
    let st = underlying.splitting_type()?;
    steps.record("splitting type", is_ulrich_over_line(&st), format!("{st}"))?;

    let (module, morphism, restricted) = if coordinate_change {
        let module = module.substitute(&unshift)?.attach_algebra(alg0.clone())?;
        let morphism = morphism.substitute(&unshift)?;
        let back = restrict_to_line(&morphism, line)?;
        let same = back.matrices() == restricted.matrices();
        steps.record("coordinate change", same, "restriction to the original line matches")?;
        (module, morphism, back)
    } else {
        (module, morphism, restricted)
    };

    Ok(PipelineOutput {
        chi: chi.poly().clone(),
        chi_line: chi_line.poly().clone(),
        graded_mode,
        coordinate_change,
        monomials,
        monomial_records,
        seed,
        seed_morphism: seed_c,
        module,
        morphism,
        filtration,
        restricted,
        roby,
        char_report,
        filtered,
        quotients_match_seed,
        line_splitting_type: st.parts().to_vec(),
        steps: Vec::new(),
    })
}

/// Built-in inputs.
pub mod examples {
    use super::*;
    use crate::roby::{monomial_roby, twisted_tensor as tt};
    use crate::poly::{indexed_vars, HomForm};

    fn v(s: &str) -> Var {
        Var::new(s)
    }

    fn parse(s: &str) -> Poly {
        s.parse().expect("valid literal")
    }

    /// `z^2 = xy + z2^2` over `Q[x,y,z2]`, line `z2 = 0`, seed from `[[0,x],[y,0]]`.
    pub fn quadric() -> PipelineSpec {
        let algebra = Arc::new(FreeAlgebra::monogenic(&parse("z^2 - (x*y + z2^2)"), v("z"), Some(1)).expect("valid"));
        let line = Line::coordinate(v("x"), v("y"), &[v("z2")]).expect("valid");
        let b = PolyMatrix::parse_rows(&[vec!["0", "x"], vec!["y", "0"]]).expect("valid");
        PipelineSpec { algebra, line, seed: Seed::CyclicCover(b) }
    }

    /// `z^2 = xy` over `Q[x,y,z2]`: nothing depends on `z2`.
    pub fn trivial() -> PipelineSpec {
        let algebra = Arc::new(
            FreeAlgebra::monogenic(&parse("z^2 - x*y"), v("z"), Some(1)).expect("valid").with_coeff_vars(&[v("z2")]).expect("valid"),
        );
        let line = Line::coordinate(v("x"), v("y"), &[v("z2")]).expect("valid");
        let b = PolyMatrix::parse_rows(&[vec!["0", "x"], vec!["y", "0"]]).expect("valid");
        PipelineSpec { algebra, line, seed: Seed::CyclicCover(b) }
    }

    /// `Z = x A_1 + y A_2` from the 9-dimensional module of `y_1^3 + y_2^3`, so `Z^3 = (x^3 + y^3) I`.
    pub fn cubic_matrix() -> PolyMatrix {
        let y = indexed_vars("y", 2);
        let m1 = monomial_roby(&HomForm::new(parse("y1^3"), 3, y.clone()).expect("valid")).expect("valid");
        let m2 = monomial_roby(&HomForm::new(parse("y2^3"), 3, y).expect("valid")).expect("valid");
        let m = tt(&m1, &m2, &CycScalar::make_root(3)).expect("valid");
        let mut z = m.action(0).scale(&parse("x"));
        z.add_assign(&m.action(1).scale(&parse("y"))).expect("same shape");
        z
    }

    /// `z^3 = x^3 + y^3 + z2^3` over `Q[x,y,z2]`, line `z2 = 0`.
    pub fn cubic_algebra() -> Arc<FreeAlgebra> {
        Arc::new(FreeAlgebra::monogenic(&parse("z^3 - (x^3 + y^3 + z2^3)"), v("z"), Some(1)).expect("valid"))
    }

    /// Valid 27-dimensional cubic seed.
    pub fn cubic() -> PipelineSpec {
        let line = Line::coordinate(v("x"), v("y"), &[v("z2")]).expect("valid");
        PipelineSpec { algebra: cubic_algebra(), line, seed: Seed::CyclicCover(cubic_matrix()) }
    }

    /// The 9-dimensional module of `x^3 + y^3` with `z` acting by `Z` and zero
    /// T-slot, declared as a module for the characteristic polynomial on the line.
    pub fn cubic_naive() -> PipelineSpec {
        let line = Line::coordinate(v("x"), v("y"), &[v("z2")]).expect("valid");
        let alg = cubic_algebra();
        let y = indexed_vars("y", 2);
        let m1 = monomial_roby(&HomForm::new(parse("y1^3"), 3, y.clone()).expect("valid")).expect("valid");
        let m2 = monomial_roby(&HomForm::new(parse("y2^3"), 3, y).expect("valid")).expect("valid");
        let m = tt(&m1, &m2, &CycScalar::make_root(3)).expect("valid");
        let z = cubic_matrix();
        let n = z.rows();
        let chi_line = alg.substitute(&[(v("z2"), Poly::zero())].into_iter().collect()).expect("valid").char_poly().to_form();
        let actions = vec![PolyMatrix::zeros(n, n), z, PolyMatrix::zeros(n, n), PolyMatrix::zeros(n, n)];
        let seed = GradedRobyModule::with_t_slot(m.grading().to_vec(), actions, chi_line).expect("shapes");
        PipelineSpec { algebra: alg, line, seed: Seed::Module(seed) }
    }
}
