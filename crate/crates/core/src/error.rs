use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cyclotomic order must be at least 1")]
    ZeroOrder,
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("form is not homogeneous of degree {degree} in its argument variables: {detail}")]
    NotHomogeneous { degree: u32, detail: String },
    #[error("invalid form: {0}")]
    InvalidForm(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("polynomial is not monic in `{0}`")]
    NotMonic(String),
    #[error("algebra must have rank at least 1")]
    EmptyBasis,
    #[error("structure constants are not commutative at ({i},{j},{k})")]
    NotCommutative { i: usize, j: usize, k: usize },
    #[error("unit law fails for basis element {0}")]
    UnitLaw(usize),
    #[error("associativity fails for basis triple ({0},{1},{2})")]
    NotAssociative(usize, usize, usize),
    #[error("structure constant c[{i}][{j}][{k}] is not homogeneous of degree {expected}")]
    NotGraded { i: usize, j: usize, k: usize, expected: i64 },
    #[error("bindings may only touch coefficient variables; `{0}` is a dual or t variable")]
    BindsDualVariable(String),
    #[error("invalid algebra: {0}")]
    Invalid(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RobyError {
    #[error("roby degree mismatch: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("argument variables differ between the tensor factors")]
    ArgumentMismatch,
    #[error("twist is not a primitive {0}-th root of unity")]
    NonPrimitiveTwist(u32),
    #[error("form has more than one term; monomial construction needs a single term")]
    MultiTermForm,
    #[error("module has no T-slot; characteristic morphisms need a characteristic-polynomial target")]
    NoTSlot,
    #[error("module carries no source algebra")]
    NoAlgebra,
    #[error("module target does not equal the characteristic polynomial of the algebra")]
    TargetMismatch,
    #[error("malformed monomial spec: {0}")]
    MalformedMonomial(String),
    #[error("invalid module: {0}")]
    Invalid(String),
    #[error("module data fails the algebra-module axioms: {0}")]
    ModuleAxioms(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineError {
    #[error("relation entry ({row},{col}) is not homogeneous of degree {expected}")]
    NotHomogeneous { row: usize, col: usize, expected: i64 },
    #[error("module is not the section module of a vector bundle: {0}")]
    NotABundle(String),
    #[error("line bindings invalid: {0}")]
    Bindings(String),
    #[error("invalid module presentation: {0}")]
    Invalid(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
