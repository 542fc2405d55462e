use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::PolyError;
use crate::poly::{Poly, Var};
use crate::scalar::CycScalar;

/// Dense-storage matrix of polynomials. Products skip zero entries, so
/// structurally sparse matrices (the common case here) multiply quickly.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, data: vec![Poly::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Poly::one())
    }

    /// `λ·I`.
    pub fn scalar(n: usize, lambda: Poly) -> Self {
        let mut m = Self::zeros(n, n);
        if !lambda.is_zero() {
            for i in 0..n {
                m.data[i * n + i] = lambda.clone();
            }
        }
        m
    }

    pub fn diagonal(entries: Vec<Poly>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, p) in entries.into_iter().enumerate() {
            m.data[i * n + i] = p;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self, PolyError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(PolyError::Dimension("ragged rows".into()));
        }
        Ok(PolyMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Parses a row-major nested list of polynomial strings.
    pub fn parse_rows<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<Self, PolyError> {
        let parsed = rows
            .iter()
            .map(|row| row.iter().map(|s| s.as_ref().parse::<Poly>()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(parsed)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        PolyMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Poly {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Poly) {
        self.data[r * self.cols + c] = p;
    }

    pub fn to_rows(&self) -> Vec<Vec<Poly>> {
        self.data.chunks(self.cols.max(1)).map(<[Poly]>::to_vec).take(self.rows).collect()
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|p| !p.is_zero()).count()
    }

    /// Iterator over `(row, col, entry)` for nonzero entries in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, &Poly)> {
        let cols = self.cols;
        self.data.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(move |(k, p)| (k / cols, k % cols, p))
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly + Sync + Send) -> PolyMatrix {
        PolyMatrix { rows: self.rows, cols: self.cols, data: self.data.par_iter().map(f).collect() }
    }

    pub fn scale(&self, p: &Poly) -> PolyMatrix {
        if p.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        self.map(|e| if e.is_zero() { Poly::zero() } else { e * p })
    }

    pub fn scale_scalar(&self, c: &CycScalar) -> PolyMatrix {
        self.map(|e| e.scale(c))
    }

    pub fn neg(&self) -> PolyMatrix {
        self.map(|e| -e)
    }

    fn check_same_shape(&self, other: &PolyMatrix, what: &str) -> Result<(), PolyError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(PolyError::Dimension(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix, PolyError> {
        self.check_same_shape(other, "add")?;
        let data = self.data.par_iter().zip(other.data.par_iter()).map(|(a, b)| a + b).collect();
        Ok(PolyMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix, PolyError> {
        self.check_same_shape(other, "sub")?;
        let data = self.data.par_iter().zip(other.data.par_iter()).map(|(a, b)| a - b).collect();
        Ok(PolyMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn add_assign(&mut self, other: &PolyMatrix) -> Result<(), PolyError> {
        self.check_same_shape(other, "add")?;
        self.data.par_iter_mut().zip(other.data.par_iter()).for_each(|(a, b)| {
            if !b.is_zero() {
                *a += b;
            }
        });
        Ok(())
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix, PolyError> {
        if self.cols != other.rows {
            return Err(PolyError::Dimension(format!(
                "mul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let n = other.cols;
        let other_rows: Vec<Vec<(usize, &Poly)>> = (0..other.rows)
            .map(|k| (0..n).filter_map(|j| Some((j, other.get(k, j))).filter(|(_, p)| !p.is_zero())).collect())
            .collect();
        let data: Vec<Poly> = (0..self.rows)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut acc = vec![Poly::zero(); n];
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    for &(j, b) in &other_rows[k] {
                        acc[j] += &(a * b);
                    }
                }
                acc
            })
            .collect();
        Ok(PolyMatrix { rows: self.rows, cols: n, data })
    }

    /// `M^k` by binary exponentiation; `k = 0` gives the identity.
    pub fn pow(&self, mut k: u64) -> Result<PolyMatrix, PolyError> {
        if !self.is_square() {
            return Err(PolyError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut acc: Option<PolyMatrix> = None;
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.unwrap_or_else(|| PolyMatrix::identity(self.rows)))
    }

    /// Returns `λ` when the matrix equals `λ·I` exactly.
    pub fn is_scalar_multiple_of_identity(&self) -> Option<Poly> {
        if !self.is_square() {
            return None;
        }
        if self.rows == 0 {
            return Some(Poly::zero());
        }
        let lambda = self.get(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                let ok = if i == j { *e == lambda } else { e.is_zero() };
                if !ok {
                    return None;
                }
            }
        }
        Some(lambda)
    }

    /// First `(row, col)` where `self` and `other` differ, row-major.
    pub fn first_difference(&self, other: &PolyMatrix) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((0, 0));
        }
        self.data.iter().zip(&other.data).position(|(a, b)| a != b).map(|k| (k / self.cols, k % self.cols))
    }

    /// Kronecker product; row index of `a ⊗ b` is `ia * b.rows + ib`.
    pub fn kron(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
        let rows = a.rows * b.rows;
        let cols = a.cols * b.cols;
        let mut out = PolyMatrix::zeros(rows, cols);
        for (ia, ja, pa) in a.nonzeros() {
            for (ib, jb, pb) in b.nonzeros() {
                out.set(ia * b.rows + ib, ja * b.cols + jb, pa * pb);
            }
        }
        out
    }

    /// Block-diagonal sum.
    pub fn direct_sum(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(a.rows + b.rows, a.cols + b.cols);
        for (i, j, p) in a.nonzeros() {
            out.set(i, j, p.clone());
        }
        for (i, j, p) in b.nonzeros() {
            out.set(a.rows + i, a.cols + j, p.clone());
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        PolyMatrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn transpose(&self) -> PolyMatrix {
        PolyMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn substitute(&self, bindings: &HashMap<Var, Poly>) -> PolyMatrix {
        self.map(|e| e.substitute(bindings))
    }

    pub fn variables(&self) -> std::collections::BTreeSet<Var> {
        self.data.iter().flat_map(Poly::variables).collect()
    }

    /// Σ coeffs[i] · mats[i].
    pub fn linear_combination(coeffs: &[Poly], mats: &[&PolyMatrix]) -> Result<PolyMatrix, PolyError> {
        let (rows, cols) = mats.first().map_or((0, 0), |m| (m.rows, m.cols));
        let mut acc = PolyMatrix::zeros(rows, cols);
        for (c, m) in coeffs.iter().zip(mats) {
            if c.is_zero() {
                continue;
            }
            acc.add_assign(&m.scale(c))?;
        }
        Ok(acc)
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyMatrix{}x{}{}", self.rows, self.cols, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[&str]]) -> PolyMatrix {
        let v: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        PolyMatrix::parse_rows(&v).unwrap()
    }

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn power_examples() {
        assert_eq!(PolyMatrix::identity(3).pow(5).unwrap(), PolyMatrix::identity(3));
        let a = m(&[&["0", "x"], &["y", "0"]]);
        assert_eq!(a.pow(2).unwrap(), PolyMatrix::scalar(2, p("x*y")));
        assert_eq!(a.pow(0).unwrap(), PolyMatrix::identity(2));
        assert!(PolyMatrix::zeros(2, 3).pow(2).is_err());
    }

    #[test]
    fn companion_cube() {
        // companion matrix of t^3 - c, cube computed by hand: c*I
        let comp = m(&[&["0", "0", "c"], &["1", "0", "0"], &["0", "1", "0"]]);
        assert_eq!(comp.pow(3).unwrap(), PolyMatrix::scalar(3, p("c")));
    }

    #[test]
    fn scalar_identity_detection() {
        assert_eq!(PolyMatrix::zeros(2, 2).is_scalar_multiple_of_identity(), Some(Poly::zero()));
        assert_eq!(PolyMatrix::diagonal(vec![p("x"), p("x")]).is_scalar_multiple_of_identity(), Some(p("x")));
        assert_eq!(PolyMatrix::diagonal(vec![p("x"), p("y")]).is_scalar_multiple_of_identity(), None);
    }

    #[test]
    fn kron_ordering() {
        let a = m(&[&["1", "2"], &["3", "4"]]);
        let b = m(&[&["0", "x"], &["y", "0"]]);
        let k = PolyMatrix::kron(&a, &b);
        assert_eq!(k.get(0, 1), &p("x"));
        assert_eq!(k.get(1, 2), &p("2*y"));
        assert_eq!(k.get(3, 2), &p("4*y"));
        assert_eq!(k.get(2, 3), &p("4*x"));
    }

    #[test]
    fn dimension_errors() {
        let a = PolyMatrix::zeros(2, 3);
        assert!(a.mul(&a).is_err());
        assert!(a.add(&PolyMatrix::zeros(3, 2)).is_err());
    }
}
