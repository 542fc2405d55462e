//! TOML spec files for algebras, Roby modules, characteristic morphisms,
//! pipelines, modules over `k[x,y]` and the tool configuration.
//!
//! Polynomials are strings in the usual syntax; matrices are row-major
//! arrays of strings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{AlgebraError, LineError, PolyError, RobyError};
use crate::freealg::FreeAlgebra;
use crate::linegeom::{GradedModuleP1, Line};
use crate::pipeline::{PipelineSpec, Seed};
use crate::poly::{HomForm, Poly, PolyMatrix, Var};
use crate::roby::{CharMorphism, GradedRobyModule};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot access `{path}`")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed spec file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("cannot serialize spec: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("missing section `[{0}]`")]
    MissingSection(&'static str),
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Roby(#[from] RobyError),
    #[error(transparent)]
    Line(#[from] LineError),
}

fn var(name: &str) -> Result<Var, SpecError> {
    if Var::is_valid_name(name) {
        Ok(Var::new(name))
    } else {
        Err(SpecError::Invalid(format!("`{name}` is not a variable name")))
    }
}

fn vars(names: &[String]) -> Result<Vec<Var>, SpecError> {
    names.iter().map(|n| var(n)).collect()
}

fn names(vs: &[Var]) -> Vec<String> {
    vs.iter().map(|v| v.name().to_string()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<String>]) -> Result<PolyMatrix, SpecError> {
    Ok(PolyMatrix::parse_rows(rows)?)
}

pub fn matrix_to_rows(m: &PolyMatrix) -> Vec<Vec<String>> {
    m.to_string_rows()
}

/// An algebra over `R = k[coeff_vars]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraSpec {
    /// `R[z]/(p(z))`.
    Monogenic {
        polynomial: String,
        generator: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generator_degree: Option<i64>,
        /// Coefficient variables beyond those occurring in the polynomial.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        extra_vars: Vec<String>,
    },
    /// `k[x_1..x_d]^{×d}` on the idempotent basis.
    Split { rank: usize },
    /// Products keyed `"a*b"`, each given by its coordinates in basis order.
    Explicit {
        basis: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        degrees: Option<Vec<i64>>,
        coeff_vars: Vec<String>,
        unit: Vec<String>,
        #[serde(default)]
        products: BTreeMap<String, Vec<String>>,
    },
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<FreeAlgebra, SpecError> {
        match self {
            AlgebraSpec::Monogenic { polynomial, generator, generator_degree, extra_vars } => {
                let p: Poly = polynomial.parse()?;
                let alg = FreeAlgebra::monogenic(&p, var(generator)?, *generator_degree)?;
                Ok(if extra_vars.is_empty() { alg } else { alg.with_coeff_vars(&vars(extra_vars)?)? })
            }
            AlgebraSpec::Split { rank } => {
                if *rank == 0 {
                    return Err(SpecError::Invalid("split algebra needs positive rank".into()));
                }
                Ok(FreeAlgebra::split(*rank))
            }
            AlgebraSpec::Explicit { basis, degrees, coeff_vars, unit, products } => {
                let d = basis.len();
                let cvars = vars(coeff_vars)?;
                if unit.len() != d {
                    return Err(SpecError::Invalid(format!("unit has {} entries for rank {d}", unit.len())));
                }
                let unit = unit.iter().map(|s| s.parse()).collect::<Result<Vec<Poly>, _>>()?;
                let mut structure = vec![vec![vec![Poly::zero(); d]; d]; d];
                for (key, value) in products {
                    let (a, b) = key.split_once('*').ok_or_else(|| SpecError::Invalid(format!("product key `{key}` is not `a*b`")))?;
                    let pos = |n: &str| {
                        basis.iter().position(|b| b == n.trim()).ok_or_else(|| SpecError::Invalid(format!("unknown basis element `{}`", n.trim())))
                    };
                    let (i, j) = (pos(a)?, pos(b)?);
                    if value.len() != d {
                        return Err(SpecError::Invalid(format!("product `{key}` has {} coordinates for rank {d}", value.len())));
                    }
                    let coords = value.iter().map(|c| c.parse()).collect::<Result<Vec<Poly>, _>>()?;
                    structure[i][j] = coords.clone();
                    structure[j][i] = coords;
                }
                Ok(FreeAlgebra::new(basis.clone(), degrees.clone(), cvars, structure, unit)?)
            }
        }
    }

    /// Explicit spec describing `alg` exactly; zero products are omitted.
    pub fn from_algebra(alg: &FreeAlgebra) -> Self {
        let d = alg.rank();
        let basis = alg.basis_names().to_vec();
        let mut products = BTreeMap::new();
        for i in 0..d {
            for j in i..d {
                let coords: Vec<&Poly> = (0..d).map(|k| alg.structure_constant(i, j, k)).collect();
                if coords.iter().any(|c| !c.is_zero()) {
                    products.insert(format!("{}*{}", basis[i], basis[j]), coords.iter().map(|c| c.to_string()).collect());
                }
            }
        }
        AlgebraSpec::Explicit {
            basis,
            degrees: alg.degrees().map(<[i64]>::to_vec),
            coeff_vars: names(alg.coeff_vars()),
            unit: alg.unit().iter().map(Poly::to_string).collect(),
            products,
        }
    }
}

/// Any file with an `[algebra]` section; other sections are ignored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub algebra: AlgebraSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub arg: String,
    pub rows: Vec<Vec<String>>,
}

/// A graded Roby module. Without `form` the target is the characteristic
/// polynomial of the file's algebra and the arguments are `G1..Gd, t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub grading: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub args: Option<Vec<String>>,
    /// The last argument is the T-slot.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub t_slot: bool,
    #[serde(default, rename = "action")]
    pub actions: Vec<ActionSpec>,
}

impl ModuleSpec {
    fn ordered_actions(&self, args: &[Var], n: usize) -> Result<Vec<PolyMatrix>, SpecError> {
        let mut out: Vec<Option<PolyMatrix>> = vec![None; args.len()];
        for a in &self.actions {
            let i = args
                .iter()
                .position(|v| v.name() == a.arg)
                .ok_or_else(|| SpecError::Invalid(format!("action for `{}`, which is not an argument variable", a.arg)))?;
            if out[i].is_some() {
                return Err(SpecError::Invalid(format!("two actions for `{}`", a.arg)));
            }
            out[i] = Some(matrix_from_rows(&a.rows)?);
        }
        // unlisted arguments act by zero
        Ok(out.into_iter().map(|m| m.unwrap_or_else(|| PolyMatrix::zeros(n, n))).collect())
    }

    /// Builds the module; `algebra` is required when `form` is absent.
    pub fn build(&self, algebra: Option<Arc<FreeAlgebra>>) -> Result<GradedRobyModule, SpecError> {
        let n = self.grading.len();
        match &self.form {
            None => {
                let alg = algebra.ok_or(SpecError::MissingSection("algebra"))?;
                let mut args = alg.dual_vars().to_vec();
                args.push(alg.t_var());
                let mut actions = self.ordered_actions(&args, n)?;
                let t = actions.pop().expect("t argument");
                Ok(GradedRobyModule::for_char_poly(alg, self.grading.clone(), actions, t)?)
            }
            Some(f) => {
                let args = vars(self.args.as_deref().ok_or_else(|| SpecError::Invalid("`form` needs `args`".into()))?)?;
                let poly: Poly = f.parse()?;
                let degree = match self.degree {
                    Some(e) => e,
                    None => poly.terms().next().map(|(m, _)| m.degree_in(&args)).ok_or_else(|| SpecError::Invalid("zero form needs `degree`".into()))?,
                };
                let target = HomForm::new(poly, degree, args.clone())?;
                let actions = self.ordered_actions(&args, n)?;
                let m = if self.t_slot {
                    GradedRobyModule::with_t_slot(self.grading.clone(), actions, target)?
                } else {
                    GradedRobyModule::new(self.grading.clone(), actions, target)?
                };
                Ok(match algebra {
                    Some(alg) if self.t_slot => m.attach_algebra(alg)?,
                    _ => m,
                })
            }
        }
    }

    pub fn from_module(m: &GradedRobyModule) -> Self {
        let args = m.target().args();
        let actions = args.iter().zip(m.actions()).map(|(v, a)| ActionSpec { arg: v.name().to_string(), rows: matrix_to_rows(a) }).collect();
        if m.algebra().is_some() {
            return ModuleSpec { grading: m.grading().to_vec(), form: None, degree: None, args: None, t_slot: false, actions };
        }
        ModuleSpec {
            grading: m.grading().to_vec(),
            form: Some(m.target().poly().to_string()),
            degree: Some(m.degree()),
            args: Some(names(args)),
            t_slot: m.t_slot().is_some(),
            actions,
        }
    }
}

/// `[algebra]` (optional) plus `[module]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSpec>,
    pub module: ModuleSpec,
}

impl ModuleFile {
    pub fn build(&self) -> Result<GradedRobyModule, SpecError> {
        let alg = self.algebra.as_ref().map(|a| a.build().map(Arc::new)).transpose()?;
        self.module.build(alg)
    }

    pub fn from_module(m: &GradedRobyModule) -> Self {
        ModuleFile { algebra: m.algebra().map(|a| AlgebraSpec::from_algebra(a)), module: ModuleSpec::from_module(m) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixEntry {
    pub basis: String,
    pub rows: Vec<Vec<String>>,
}

/// A characteristic morphism: its source algebra and one matrix per basis element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismFile {
    pub algebra: AlgebraSpec,
    #[serde(rename = "matrix")]
    pub matrices: Vec<MatrixEntry>,
}

impl MorphismFile {
    pub fn build(&self) -> Result<CharMorphism, SpecError> {
        let alg = Arc::new(self.algebra.build()?);
        let mut mats: Vec<Option<PolyMatrix>> = vec![None; alg.rank()];
        for e in &self.matrices {
            let i = alg
                .basis_names()
                .iter()
                .position(|b| *b == e.basis)
                .ok_or_else(|| SpecError::Invalid(format!("unknown basis element `{}`", e.basis)))?;
            mats[i] = Some(matrix_from_rows(&e.rows)?);
        }
        let mats = mats
            .into_iter()
            .zip(alg.basis_names())
            .map(|(m, b)| m.ok_or_else(|| SpecError::Invalid(format!("no matrix for `{b}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CharMorphism::new(alg, mats)?)
    }

    pub fn from_morphism(c: &CharMorphism) -> Self {
        MorphismFile {
            algebra: AlgebraSpec::from_algebra(c.algebra()),
            matrices: c.algebra().basis_names().iter().zip(c.matrices()).map(|(b, m)| MatrixEntry { basis: b.clone(), rows: matrix_to_rows(m) }).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSpec {
    pub x: String,
    pub y: String,
    /// `z = L(x, y)` for every other coefficient variable.
    pub bindings: BTreeMap<String, String>,
}

impl LineSpec {
    pub fn build(&self) -> Result<Line, SpecError> {
        let bindings = self.bindings.iter().map(|(k, v)| Ok((var(k)?, v.parse::<Poly>()?))).collect::<Result<BTreeMap<_, _>, SpecError>>()?;
        Ok(Line::new(var(&self.x)?, var(&self.y)?, bindings)?)
    }

    pub fn from_line(l: &Line) -> Self {
        LineSpec {
            x: l.x.name().to_string(),
            y: l.y.name().to_string(),
            bindings: l.bindings.iter().map(|(k, v)| (k.name().to_string(), v.to_string())).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeedSpec {
    Split,
    CyclicCover {
        matrix: Vec<Vec<String>>,
    },
    /// Without `form` the target is the characteristic polynomial on the line.
    Module {
        module: ModuleSpec,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morphism: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

impl OutputSpec {
    fn is_empty(&self) -> bool {
        self.module.is_none() && self.morphism.is_none() && self.report.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineFile {
    pub algebra: AlgebraSpec,
    pub line: LineSpec,
    pub seed: SeedSpec,
    #[serde(default, skip_serializing_if = "OutputSpec::is_empty")]
    pub output: OutputSpec,
}

impl PipelineFile {
    pub fn build(&self) -> Result<PipelineSpec, SpecError> {
        let algebra = Arc::new(self.algebra.build()?);
        let line = self.line.build()?;
        let seed = match &self.seed {
            SeedSpec::Split => Seed::Split,
            SeedSpec::CyclicCover { matrix } => Seed::CyclicCover(matrix_from_rows(matrix)?),
            SeedSpec::Module { module } => {
                if module.form.is_some() {
                    Seed::Module(module.build(None)?)
                } else {
                    line.check_covers(algebra.coeff_vars())?;
                    let on_line = Arc::new(algebra.substitute(&line.as_map())?);
                    let chi = on_line.char_poly().to_form();
                    let mut args = on_line.dual_vars().to_vec();
                    args.push(on_line.t_var());
                    let actions = module.ordered_actions(&args, module.grading.len())?;
                    Seed::Module(GradedRobyModule::with_t_slot(module.grading.clone(), actions, chi)?)
                }
            }
        };
        Ok(PipelineSpec { algebra, line, seed })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct P1ModuleSpec {
    pub x: String,
    pub y: String,
    pub gen_degrees: Vec<i64>,
    #[serde(default)]
    pub rel_degrees: Vec<i64>,
    #[serde(default)]
    pub relations: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct P1ModuleFile {
    pub p1module: P1ModuleSpec,
}

impl P1ModuleFile {
    pub fn build(&self) -> Result<GradedModuleP1, SpecError> {
        let s = &self.p1module;
        let relations = if s.relations.is_empty() { PolyMatrix::zeros(s.gen_degrees.len(), 0) } else { matrix_from_rows(&s.relations)? };
        Ok(GradedModuleP1::new(var(&s.x)?, var(&s.y)?, s.gen_degrees.clone(), s.rel_degrees.clone(), relations)?)
    }

    pub fn from_module(m: &GradedModuleP1, x: Var, y: Var) -> Self {
        let relations = if m.rel_degrees().is_empty() { vec![] } else { matrix_to_rows(m.relations()) };
        P1ModuleFile {
            p1module: P1ModuleSpec {
                x: x.name().to_string(),
                y: y.name().to_string(),
                gen_degrees: m.gen_degrees().to_vec(),
                rel_degrees: m.rel_degrees().to_vec(),
                relations,
            },
        }
    }
}

/// Tool configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Directory for relative output paths.
    pub output_dir: Option<PathBuf>,
    /// Largest cyclotomic order a run may need.
    pub field_order_cap: u32,
    /// Extra twists on each side of the Hilbert-function window.
    pub degree_padding: i64,
    /// Largest module a pipeline run may assemble.
    pub max_module_dim: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { output_dir: None, field_order_cap: 64, degree_padding: 2, max_module_dim: crate::pipeline::DEFAULT_MAX_MODULE_DIM }
    }
}

impl Config {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        match &self.output_dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p.to_path_buf(),
        }
    }
}

pub fn from_str<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, SpecError> {
    Ok(toml::from_str(s)?)
}

pub fn to_string<T: Serialize>(value: &T) -> Result<String, SpecError> {
    Ok(toml::to_string(value)?)
}

pub fn read<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, SpecError> {
    let s = std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.to_path_buf(), source })?;
    from_str(&s)
}

pub fn write<T: Serialize>(path: &Path, value: &T) -> Result<(), SpecError> {
    let s = to_string(value)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| SpecError::Io { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, s).map_err(|source| SpecError::Io { path: path.to_path_buf(), source })
}
