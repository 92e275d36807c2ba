//! Dense matrices over cyclotomic fields, exact Gaussian elimination, and the
//! tensor-product convention used for the monodromy matrices.
//!
//! Basis vectors of `(C^2)^{(x)n}` are indexed by 0/1 words `I = (i_1, ..., i_n)`
//! whose linear position is `i_1 + 2 i_2 + ... + 2^{n-1} i_n`, so the first
//! letter varies fastest. [`paper_kron`] is the product compatible with that
//! order: `(A (x) B)(u (x) w) = (Au) (x) (Bw)` when `u` is the fast index.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::CycNum;

/// A column vector.
pub type Vector = Vec<CycNum>;

#[derive(Clone)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    conductor: u32,
    entries: Vec<CycNum>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize, conductor: u32) -> Self {
        ExactMatrix { rows, cols, conductor, entries: vec![CycNum::zero(conductor); rows * cols] }
    }

    pub fn identity(size: usize, conductor: u32) -> Self {
        let mut m = Self::zeros(size, size, conductor);
        for i in 0..size {
            m.entries[i * size + i] = CycNum::one(conductor);
        }
        m
    }

    /// Build from rows, lifting every entry to the lcm of the conductors.
    pub fn from_rows(rows: Vec<Vec<CycNum>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let entries: Vec<CycNum> = rows.into_iter().flatten().collect();
        Ok(Self::from_entries(r, c, entries))
    }

    fn from_entries(rows: usize, cols: usize, entries: Vec<CycNum>) -> Self {
        let conductor = entries.iter().fold(1u32, |acc, x| acc.lcm(&x.conductor()));
        let entries = entries.into_iter().map(|x| x.lift(conductor)).collect();
        ExactMatrix { rows, cols, conductor, entries }
    }

    /// Integer matrix, stored over `Q`.
    pub fn from_integers(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let entries = rows.iter().flat_map(|row| row.iter().map(|&x| CycNum::from_integer(1, x))).collect();
        ExactMatrix { rows: r, cols: c, conductor: 1, entries }
    }

    /// Matrix with the given vectors as columns.
    pub fn from_columns(columns: &[Vector]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|v| v.len() != r) {
            return Err(Error::DimensionMismatch("columns of different lengths".into()));
        }
        let entries = (0..r).flat_map(|i| columns.iter().map(move |col| col[i].clone())).collect();
        Ok(Self::from_entries(r, c, entries))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycNum {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: CycNum) {
        let value = self.absorb(value);
        self.entries[i * self.cols + j] = value;
    }

    fn absorb(&mut self, value: CycNum) -> CycNum {
        if self.conductor % value.conductor() != 0 {
            self.lift_to(self.conductor.lcm(&value.conductor()));
        }
        value.lift(self.conductor)
    }

    /// Re-express every entry in `Q(zeta_m)`.
    pub fn lift_to(&mut self, m: u32) {
        if m != self.conductor {
            for x in &mut self.entries {
                *x = x.lift(m);
            }
            self.conductor = m;
        }
    }

    pub fn row(&self, i: usize) -> Vector {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[CycNum] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&CycNum) -> CycNum) -> Self {
        Self::from_entries(self.rows, self.cols, self.entries.iter().map(f).collect())
    }

    pub fn transpose(&self) -> Self {
        let entries = (0..self.cols)
            .flat_map(|j| (0..self.rows).map(move |i| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        ExactMatrix { rows: self.cols, cols: self.rows, conductor: self.conductor, entries }
    }

    /// Entrywise involution `M -> M^v`.
    pub fn involution(&self) -> Self {
        self.map(CycNum::involution)
    }

    pub fn scale(&self, s: &CycNum) -> Self {
        self.map(|x| x * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        Self::from_entries(self.rows, self.cols, self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        Self::from_entries(self.rows, self.cols, self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let conductor = self.conductor.lcm(&other.conductor);
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = CycNum::zero(conductor);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                entries.push(acc);
            }
        }
        Self::from_entries(self.rows, other.cols, entries)
    }

    pub fn apply(&self, v: &[CycNum]) -> Vector {
        assert_eq!(self.cols, v.len(), "shape mismatch in apply");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(CycNum::zero(self.conductor), |acc, k| {
                    let a = self.get(i, k);
                    if a.is_zero() || v[k].is_zero() {
                        acc
                    } else {
                        &acc + &(a * &v[k])
                    }
                })
            })
            .collect()
    }

    pub fn pow(&self, exp: i64) -> Result<Self> {
        assert!(self.is_square(), "pow of non-square matrix");
        let base = if exp < 0 { self.inverse()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut result = Self::identity(self.rows, self.conductor);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(result)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CycNum::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j { x.is_one() } else { x.is_zero() }
                })
            })
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j).is_zero()))
    }

    /// First position where two same-shape matrices differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Some((0, 0));
        }
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != other.get(i, j))
    }

    /// Reduced row echelon form and pivot columns. Pivots are chosen as the
    /// first nonzero entry in each column, scanning rows top-down.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let x = m.get(r, j);
                if !x.is_zero() {
                    m.entries[r * m.cols + j] = x * &inv;
                }
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let y = m.get(r, j);
                    if !y.is_zero() {
                        let updated = m.get(i, j) - &(&f * y);
                        m.entries[i * m.cols + j] = updated;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Result<CycNum> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let mut det = CycNum::one(self.conductor);
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(CycNum::zero(self.conductor));
            };
            if p != c {
                m.swap_rows(c, p);
                det = -det;
            }
            let pivot = m.get(c, c).clone();
            det = &det * &pivot;
            let inv = pivot.inv()?;
            for i in c + 1..m.rows {
                let f = m.get(i, c);
                if f.is_zero() {
                    continue;
                }
                let f = f * &inv;
                for j in c..m.cols {
                    let y = m.get(c, j);
                    if !y.is_zero() {
                        let updated = m.get(i, j) - &(&f * y);
                        m.entries[i * m.cols + j] = updated;
                    }
                }
            }
        }
        Ok(det)
    }

    /// A basis of the right kernel `{w : A w = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut w = vec![CycNum::zero(self.conductor); self.cols];
                w[f] = CycNum::one(self.conductor);
                for (row, &p) in pivots.iter().enumerate() {
                    w[p] = -r.get(row, f);
                }
                w
            })
            .collect()
    }

    pub fn solve(&self, b: &[CycNum]) -> Result<Vector> {
        if !self.is_square() || b.len() != self.rows {
            return Err(Error::DimensionMismatch("solve needs a square system".into()));
        }
        let mut aug = Self::zeros(self.rows, self.cols + 1, self.conductor);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < self.cols || pivots.contains(&self.cols) {
            return Err(Error::SingularMatrix);
        }
        Ok((0..self.rows).map(|i| r.get(i, self.cols).clone()).collect())
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n, self.conductor);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, CycNum::one(self.conductor));
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::SingularMatrix);
        }
        let entries = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| r.get(i, n + j).clone()).collect();
        Ok(ExactMatrix { rows: n, cols: n, conductor: r.conductor, entries })
    }
}

impl PartialEq for ExactMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}

impl Eq for ExactMatrix {}

/// Tensor product in the block convention where block `(i, j)` is `A * b_ij`.
///
/// This is `B (x) A` in the usual Kronecker notation. It is the product under
/// which `e_{i_1} (x) ... (x) e_{i_n}` sits at position `i_1 + 2 i_2 + ...`.
pub fn paper_kron(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut entries = Vec::with_capacity(rows * cols);
    for bi in 0..b.rows {
        for p in 0..a.rows {
            for bj in 0..b.cols {
                for q in 0..a.cols {
                    entries.push(a.get(p, q) * b.get(bi, bj));
                }
            }
        }
    }
    ExactMatrix::from_entries(rows, cols, entries)
}

/// Tensor product of vectors in the same convention: the first factor is the fast index.
pub fn paper_kron_vec(u: &[CycNum], w: &[CycNum]) -> Vector {
    w.iter().flat_map(|y| u.iter().map(move |x| x * y)).collect()
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} over Q(zeta_{}) [", self.rows, self.cols, self.conductor)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<CycNum>>,
}

impl Serialize for ExactMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr { rows: self.rows, cols: self.cols, entries: (0..self.rows).map(|i| self.row(i)).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MatrixRepr::deserialize(d)?;
        if repr.entries.len() != repr.rows || repr.entries.iter().any(|r| r.len() != repr.cols) {
            return Err(D::Error::custom("matrix dimensions do not match entry count"));
        }
        ExactMatrix::from_rows(repr.entries).map_err(D::Error::custom)
    }
}

/// A 0/1 word `I = (i_1, ..., i_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexWord(Vec<u8>);

impl IndexWord {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParameter("index words contain only 0 and 1".into()));
        }
        Ok(IndexWord(bits))
    }

    pub fn zeros(n: usize) -> Self {
        IndexWord(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        IndexWord(vec![1; n])
    }

    /// The word at linear position `rank` among words of length `n`.
    pub fn from_rank(rank: usize, n: usize) -> Self {
        IndexWord((0..n).map(|k| (rank >> k & 1) as u8).collect())
    }

    /// All words of length `n` in basis order.
    pub fn all(n: usize) -> impl Iterator<Item = IndexWord> {
        (0..1usize << n).map(move |r| Self::from_rank(r, n))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.iter().enumerate().map(|(k, &b)| (b as usize) << k).sum()
    }

    /// `|I| = i_1 + ... + i_n`.
    pub fn weight(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }

    /// Letterwise product `I . I'`.
    pub fn meet(&self, other: &IndexWord) -> IndexWord {
        IndexWord(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }
}

impl fmt::Display for IndexWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Standard unit vector `e_I`.
pub fn basis_vector(word: &IndexWord, conductor: u32) -> Vector {
    let mut v = vec![CycNum::zero(conductor); 1 << word.len()];
    v[word.rank()] = CycNum::one(conductor);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(k: i64) -> CycNum {
        CycNum::from_integer(1, k)
    }

    #[test]
    fn kron_identity() {
        let e2 = ExactMatrix::identity(2, 1);
        assert_eq!(paper_kron(&e2, &e2), ExactMatrix::identity(4, 1));
    }

    #[test]
    fn kron_block_layout() {
        let a = ExactMatrix::from_integers(&[&[1, 2], &[3, 4]]);
        let b = ExactMatrix::from_integers(&[&[0, 5], &[6, 7]]);
        let k = paper_kron(&a, &b);
        // block (0,1) is 5*A
        assert_eq!(k.get(0, 2), &int(5));
        assert_eq!(k.get(1, 3), &int(20));
        // block (1,0) is 6*A
        assert_eq!(k.get(3, 1), &int(24));
        assert!(k.get(0, 0).is_zero());
    }

    #[test]
    fn basis_vectors() {
        let v = basis_vector(&IndexWord::new(vec![0, 0]).unwrap(), 1);
        assert_eq!(v, vec![int(1), int(0), int(0), int(0)]);
        let v = basis_vector(&IndexWord::new(vec![1, 0]).unwrap(), 1);
        assert_eq!(v, vec![int(0), int(1), int(0), int(0)]);
        assert_eq!(IndexWord::new(vec![0, 1, 1]).unwrap().rank(), 6);
        assert!(IndexWord::new(vec![2]).is_err());
    }

    #[test]
    fn elimination_basics() {
        let z5 = CycNum::root_of_unity(5, 1);
        let one = CycNum::one(5);
        let g = ExactMatrix::from_rows(vec![
            vec![one.clone(), -&z5.inv().unwrap()],
            vec![CycNum::zero(5), z5.inv().unwrap()],
        ])
        .unwrap();
        let gi = g.inverse().unwrap();
        assert!(gi.mul(&g).is_identity());
        assert!(ExactMatrix::identity(4, 1).det().unwrap().is_one());

        let s = ExactMatrix::from_integers(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.inverse(), Err(Error::SingularMatrix));
        assert_eq!(s.rank(), 1);
        let k = s.kernel_basis();
        assert_eq!(k.len(), 1);
        assert!(s.apply(&k[0]).iter().all(CycNum::is_zero));
        assert!(s.det().unwrap().is_zero());
    }

    #[test]
    fn solve_round_trip() {
        let a = ExactMatrix::from_integers(&[&[2, 1, 0], &[0, 1, 3], &[1, 0, 1]]);
        let b = vec![int(1), int(2), int(3)];
        let x = a.solve(&b).unwrap();
        assert_eq!(a.apply(&x), b);
        assert_eq!(a.det().unwrap(), int(5));
    }

    #[test]
    fn json_format() {
        let m = ExactMatrix::from_integers(&[&[1, 0], &[0, -1]]);
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with("{\"rows\":2,\"cols\":2,\"entries\":[[{\"N\":1,\"coeffs\":[\"1/1\"]}"));
        let back: ExactMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ExactMatrix>(r#"{"rows":2,"cols":2,"entries":[]}"#).is_err());
    }
}
