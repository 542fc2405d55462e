use serde::Serialize;

use crate::error::RobyError;
use crate::poly::PolyMatrix;
use crate::roby::charmor::{morphism_check, CharMorphism, MorphismCheck};

/// Increasing chain of coordinate subspaces `F_1 ⊂ F_2 ⊂ … ⊂ W`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Filtration {
    dim: usize,
    flags: Vec<Vec<usize>>,
    levels: Vec<i64>,
}

impl Filtration {
    /// `flags[k]` lists the basis indices spanning the `k`-th subspace.
    pub fn new(dim: usize, flags: Vec<Vec<usize>>, levels: Vec<i64>) -> Result<Self, RobyError> {
        if flags.is_empty() || flags.len() != levels.len() {
            return Err(RobyError::Invalid("filtration needs one level per flag".into()));
        }
        let mut flags = flags;
        for f in &mut flags {
            f.sort_unstable();
            f.dedup();
            if f.iter().any(|&i| i >= dim) {
                return Err(RobyError::Invalid("flag index out of range".into()));
            }
        }
        for w in flags.windows(2) {
            let contained = w[0].iter().all(|i| w[1].binary_search(i).is_ok());
            if !contained || w[0].len() == w[1].len() {
                return Err(RobyError::Invalid("flags must be strictly increasing".into()));
            }
        }
        if flags.last().map(Vec::len) != Some(dim) || flags[0].is_empty() {
            return Err(RobyError::Invalid("filtration must start nonzero and end at the whole space".into()));
        }
        Ok(Filtration { dim, flags, levels })
    }

    /// The one-step filtration `0 ⊂ W`.
    pub fn trivial(dim: usize) -> Self {
        Filtration { dim, flags: vec![(0..dim).collect()], levels: vec![0] }
    }

    /// Flags are the unions of the first `k` blocks.
    pub fn from_blocks(dim: usize, blocks: &[Vec<usize>]) -> Result<Self, RobyError> {
        let mut flags = Vec::with_capacity(blocks.len());
        let mut acc = Vec::new();
        for b in blocks {
            acc.extend_from_slice(b);
            flags.push(acc.clone());
        }
        let levels = (1..=blocks.len() as i64).collect();
        Self::new(dim, flags, levels)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn flags(&self) -> &[Vec<usize>] {
        &self.flags
    }

    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    /// Basis indices of each graded piece `F_k / F_{k-1}`.
    pub fn quotient_indices(&self) -> Vec<Vec<usize>> {
        let mut prev: &[usize] = &[];
        self.flags
            .iter()
            .map(|f| {
                let q = f.iter().copied().filter(|i| prev.binary_search(i).is_err()).collect();
                prev = f;
                q
            })
            .collect()
    }
}

/// Result of [`verify_filtered_pseudo`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FilteredPseudoReport {
    pub preserves_flags: bool,
    /// `(matrix index, row, col)` of the first entry leaving a flag.
    pub first_violation: Option<(usize, usize, usize)>,
    pub quotients: Vec<MorphismCheck>,
    pub quotient_morphisms: bool,
    pub first_failing_quotient: Option<usize>,
}

impl FilteredPseudoReport {
    pub fn passed(&self) -> bool {
        self.preserves_flags && self.quotient_morphisms
    }
}

/// Induced maps on each graded piece, one list of matrices per piece.
pub fn graded_quotients(c: &CharMorphism, f: &Filtration) -> Vec<Vec<PolyMatrix>> {
    f.quotient_indices().iter().map(|idx| c.matrices().iter().map(|m| m.submatrix(idx, idx)).collect()).collect()
}

/// (i) every `C(γ_i)` preserves every flag; (ii) on every graded piece the
/// induced map satisfies the unit law and multiplicativity.
pub fn verify_filtered_pseudo(c: &CharMorphism, f: &Filtration) -> Result<FilteredPseudoReport, RobyError> {
    if f.dim() != c.dim() {
        return Err(RobyError::Invalid(format!("filtration of a {}-dimensional space on a {}-dimensional morphism", f.dim(), c.dim())));
    }
    let mut first_violation = None;
    'outer: for flag in f.flags() {
        let mut inside = vec![false; f.dim()];
        for &i in flag {
            inside[i] = true;
        }
        for (k, m) in c.matrices().iter().enumerate() {
            if let Some((r, col, _)) = m.nonzeros().find(|&(r, col, _)| inside[col] && !inside[r]) {
                first_violation = Some((k, r, col));
                break 'outer;
            }
        }
    }
    let quotients: Vec<MorphismCheck> = graded_quotients(c, f).iter().map(|mats| morphism_check(c.algebra(), mats)).collect();
    let first_failing_quotient = quotients.iter().position(|q| !q.passed());
    Ok(FilteredPseudoReport {
        preserves_flags: first_violation.is_none(),
        first_violation,
        quotient_morphisms: first_failing_quotient.is_none(),
        quotients,
        first_failing_quotient,
    })
}
