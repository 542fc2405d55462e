//! Graded modules over `k[x,y]`, splitting types of bundles on the projective
//! line, and Ulrich checks for curves over the line.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::LineError;
use crate::poly::{Monomial, Poly, PolyMatrix, Var};
use crate::roby::CharMorphism;
use crate::scalar::CycScalar;

/// Cokernel of a homogeneous map `⊕ S(-rel_c) -> ⊕ S(-gen_r)` over `S = k[x,y]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModuleP1 {
    x: Var,
    y: Var,
    gen_degrees: Vec<i64>,
    rel_degrees: Vec<i64>,
    relations: PolyMatrix,
}

impl GradedModuleP1 {
    pub fn new(x: Var, y: Var, gen_degrees: Vec<i64>, rel_degrees: Vec<i64>, relations: PolyMatrix) -> Result<Self, LineError> {
        if gen_degrees.is_empty() {
            return Err(LineError::Invalid("module needs at least one generator".into()));
        }
        if rel_degrees.is_empty() {
            if relations.rows() * relations.cols() != 0 && !(relations.cols() == 0 || relations.rows() == gen_degrees.len()) {
                return Err(LineError::Invalid("relation matrix given without relation degrees".into()));
            }
        } else if relations.rows() != gen_degrees.len() || relations.cols() != rel_degrees.len() {
            return Err(LineError::Invalid(format!(
                "relation matrix is {}x{} but there are {} generators and {} relations",
                relations.rows(),
                relations.cols(),
                gen_degrees.len(),
                rel_degrees.len()
            )));
        }
        for (r, c, p) in relations.nonzeros() {
            if p.variables().iter().any(|v| *v != x && *v != y) {
                return Err(LineError::Invalid(format!("relation entry ({r},{c}) involves variables other than {x}, {y}")));
            }
            let expected = rel_degrees[c] - gen_degrees[r];
            if expected < 0 || !p.is_homogeneous_in(&[x, y], expected as u32) {
                return Err(LineError::NotHomogeneous { row: r, col: c, expected });
            }
        }
        let relations = if rel_degrees.is_empty() { PolyMatrix::zeros(gen_degrees.len(), 0) } else { relations };
        Ok(GradedModuleP1 { x, y, gen_degrees, rel_degrees, relations })
    }

    /// Free module with the given generator degrees.
    pub fn free(x: Var, y: Var, gen_degrees: Vec<i64>) -> Result<Self, LineError> {
        let n = gen_degrees.len();
        Self::new(x, y, gen_degrees, vec![], PolyMatrix::zeros(n, 0))
    }

    /// `W ⊗ k[x,y]` underlying a characteristic morphism over the line
    /// (degree-0 generators), after checking every entry lies in `k[x,y]`.
    pub fn underlying(c: &CharMorphism, x: Var, y: Var) -> Result<Self, LineError> {
        for m in c.matrices() {
            if let Some(v) = m.variables().into_iter().find(|v| *v != x && *v != y) {
                return Err(LineError::Bindings(format!("matrix entries still involve `{v}`")));
            }
        }
        Self::free(x, y, vec![0; c.dim()])
    }

    pub fn gen_degrees(&self) -> &[i64] {
        &self.gen_degrees
    }

    pub fn rel_degrees(&self) -> &[i64] {
        &self.rel_degrees
    }

    pub fn relations(&self) -> &PolyMatrix {
        &self.relations
    }

    /// `dim_k M_k`.
    pub fn hilbert_value(&self, k: i64) -> usize {
        let free: usize = self.gen_degrees.iter().map(|g| dim_s(k - g)).sum();
        free - self.relation_rank(k)
    }

    fn relation_rank(&self, k: i64) -> usize {
        if self.rel_degrees.is_empty() {
            return 0;
        }
        // rows: (generator r, monomial x^a y^{n-a}); columns: (relation c, monomial)
        let mut row_index: HashMap<(usize, u32), usize> = HashMap::new();
        for (r, g) in self.gen_degrees.iter().enumerate() {
            let n = k - g;
            if n >= 0 {
                for a in 0..=n as u32 {
                    let idx = row_index.len();
                    row_index.insert((r, a), idx);
                }
            }
        }
        let mut columns: Vec<Vec<CycScalar>> = Vec::new();
        for (c, rd) in self.rel_degrees.iter().enumerate() {
            let n = k - rd;
            if n < 0 {
                continue;
            }
            for a in 0..=n as u32 {
                let shift = Monomial::from_pairs([(self.x, a), (self.y, n as u32 - a)]);
                let mut col = vec![CycScalar::zero(); row_index.len()];
                for r in 0..self.gen_degrees.len() {
                    let entry = self.relations.get(r, c);
                    if entry.is_zero() {
                        continue;
                    }
                    for (m, coeff) in entry.mul_monomial(&shift).terms() {
                        let idx = row_index[&(r, m.exponent(self.x))];
                        col[idx] = &col[idx] + coeff;
                    }
                }
                columns.push(col);
            }
        }
        rank(columns)
    }

    /// `h(k)` for `lo ≤ k ≤ hi`.
    pub fn hilbert_function(&self, lo: i64, hi: i64) -> Vec<usize> {
        (lo..=hi).map(|k| self.hilbert_value(k)).collect()
    }

    fn window(&self, padding: i64) -> (i64, i64) {
        let min_g = *self.gen_degrees.iter().min().expect("nonempty");
        let max_g = *self.gen_degrees.iter().max().expect("nonempty");
        let max_rel = self.rel_degrees.iter().copied().max().unwrap_or(max_g).max(max_g);
        (min_g - 1 - padding, max_rel + self.gen_degrees.len() as i64 + 1 + padding)
    }

    /// Splitting type of the bundle whose section module this is, read off the
    /// first difference of the Hilbert function.
    pub fn splitting_type(&self) -> Result<SplittingType, LineError> {
        self.splitting_type_padded(0)
    }

    /// As [`splitting_type`](Self::splitting_type) with the degree window widened by `padding` on both sides.
    pub fn splitting_type_padded(&self, padding: i64) -> Result<SplittingType, LineError> {
        let (lo, hi) = self.window(padding.max(0));
        let h: Vec<i64> = (lo - 1..=hi).map(|k| self.hilbert_value(k) as i64).collect();
        let delta: Vec<i64> = h.windows(2).map(|w| w[1] - w[0]).collect();
        // delta[j] = Δh(lo + j)
        if delta[0] != 0 || h[0] != 0 {
            return Err(LineError::NotABundle(format!("nonzero sections in degree {}", lo - 1)));
        }
        if let Some(j) = delta.windows(2).position(|w| w[1] < w[0]) {
            return Err(LineError::NotABundle(format!("first difference of the Hilbert function drops at degree {}", lo + j as i64 + 1)));
        }
        let mut parts = Vec::new();
        for j in 1..delta.len() {
            let k = lo + j as i64;
            for _ in 0..(delta[j] - delta[j - 1]) {
                parts.push(-k);
            }
        }
        let n = delta.len();
        if n >= 2 && delta[n - 1] != delta[n - 2] {
            return Err(LineError::NotABundle("Hilbert function has not stabilized in the degree window".into()));
        }
        let st = SplittingType::new(parts);
        for (j, &hk) in h.iter().enumerate() {
            let k = lo - 1 + j as i64;
            if st.h0_twist(k) as i64 != hk {
                return Err(LineError::NotABundle(format!("Hilbert function disagrees with a split bundle in degree {k}")));
            }
        }
        Ok(st)
    }
}

fn dim_s(n: i64) -> usize {
    if n < 0 {
        0
    } else {
        n as usize + 1
    }
}

/// Rank of a list of column vectors over the scalar field (Gaussian elimination).
pub fn rank(mut columns: Vec<Vec<CycScalar>>) -> usize {
    let Some(len) = columns.first().map(Vec::len) else { return 0 };
    let mut r = 0;
    for row in 0..len {
        let Some(p) = (r..columns.len()).find(|&c| !columns[c][row].is_zero()) else { continue };
        columns.swap(r, p);
        let inv = columns[r][row].inv().expect("nonzero pivot");
        let pivot: Vec<CycScalar> = columns[r].iter().map(|v| v * &inv).collect();
        for c in (r + 1)..columns.len() {
            let f = columns[c][row].clone();
            if f.is_zero() {
                continue;
            }
            for (i, v) in pivot.iter().enumerate().skip(row) {
                if !v.is_zero() {
                    columns[c][i] = &columns[c][i] - &(&f * v);
                }
            }
        }
        columns[r] = pivot;
        r += 1;
    }
    r
}

/// Multiset `a_1 ≥ … ≥ a_r` with `E ≅ ⊕ O(a_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplittingType(Vec<i64>);

impl SplittingType {
    pub fn new(mut parts: Vec<i64>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        SplittingType(parts)
    }

    pub fn parts(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `h^0(E(k)) = Σ max(0, a_i + k + 1)`.
    pub fn h0_twist(&self, k: i64) -> u64 {
        self.0.iter().map(|a| (a + k + 1).max(0) as u64).sum()
    }

    /// `h^1(E(k)) = Σ max(0, -a_i - k - 1)`.
    pub fn h1_twist(&self, k: i64) -> u64 {
        self.0.iter().map(|a| (-a - k - 1).max(0) as u64).sum()
    }

    /// Multiset union.
    pub fn direct_sum(&self, other: &SplittingType) -> SplittingType {
        SplittingType::new(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Ulrich on the line itself means trivial.
pub fn is_ulrich_over_line(s: &SplittingType) -> bool {
    s.0.iter().all(|&a| a == 0)
}

/// `E` on a rational curve with `O_C(1) = O(e)` is Ulrich iff `E(-1)` has no
/// cohomology, i.e. every `a_i - e = -1`.
pub fn is_ulrich_on_embedded_curve(s: &SplittingType, e: i64) -> bool {
    assert!(e >= 1, "curve degree must be positive");
    s.0.iter().all(|&a| a - e == -1)
}

/// A line `z_i = L_i(x, y)` inside `Proj k[x, y, z_2, …]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub x: Var,
    pub y: Var,
    pub bindings: BTreeMap<Var, Poly>,
}

impl Line {
    pub fn new(x: Var, y: Var, bindings: BTreeMap<Var, Poly>) -> Result<Self, LineError> {
        if x == y {
            return Err(LineError::Bindings("line coordinates must differ".into()));
        }
        for (v, l) in &bindings {
            if *v == x || *v == y {
                return Err(LineError::Bindings(format!("binding touches line coordinate `{v}`")));
            }
            if l.variables().iter().any(|w| *w != x && *w != y) || !(l.is_zero() || l.is_homogeneous_in(&[x, y], 1) && l.total_degree() == Some(1)) {
                return Err(LineError::Bindings(format!("`{v}` must map to a linear form in {x}, {y}")));
            }
        }
        Ok(Line { x, y, bindings })
    }

    /// The coordinate line `z_i = 0` for all listed `z_i`.
    pub fn coordinate(x: Var, y: Var, zs: &[Var]) -> Result<Self, LineError> {
        Self::new(x, y, zs.iter().map(|&z| (z, Poly::zero())).collect())
    }

    pub fn is_coordinate(&self) -> bool {
        self.bindings.values().all(Poly::is_zero)
    }

    pub fn as_map(&self) -> HashMap<Var, Poly> {
        self.bindings.iter().map(|(k, v)| (*k, v.clone())).collect()
    }

    /// Checks the bindings cover exactly the non-line variables of `coeff_vars`.
    pub fn check_covers(&self, coeff_vars: &[Var]) -> Result<(), LineError> {
        for v in coeff_vars {
            if *v != self.x && *v != self.y && !self.bindings.contains_key(v) {
                return Err(LineError::Bindings(format!("no binding for `{v}`")));
            }
        }
        Ok(())
    }
}

/// Substitutes the line equations into every matrix entry and into the source algebra.
pub fn restrict_to_line(c: &CharMorphism, line: &Line) -> Result<CharMorphism, LineError> {
    line.check_covers(c.algebra().coeff_vars())?;
    c.substitute(&line.as_map()).map_err(|e| LineError::Invalid(e.to_string()))
}
