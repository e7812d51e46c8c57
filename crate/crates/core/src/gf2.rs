//! Linear algebra over F₂ with one machine word per vector.
//!
//! Coordinate `i` of a vector lives in bit `i` of the word. The textual form
//! writes coordinate 0 first, so `"110"` has bits 0 and 1 set.
//!
//! Subspaces are kept in reduced row-echelon form where the pivot of a row is
//! its lowest set coordinate, pivots increase down the list and every pivot
//! column is cleared in all other rows. Two subspaces are equal exactly when
//! their basis lists are equal, which makes them cheap to hash and dedupe.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum supported vector length.
pub const MAX_LEN: usize = 64;

#[inline]
fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Fixed-length bit string, at most 64 coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitVec {
    bits: u64,
    len: u8,
}

impl BitVec {
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::arg(format!("bit vector length {len} outside 1..=64")));
        }
        if bits & !mask(len) != 0 {
            return Err(Error::arg(format!("bits {bits:#x} do not fit in length {len}")));
        }
        Ok(Self { bits, len: len as u8 })
    }

    /// Truncating constructor for internal use where the length is known valid.
    #[inline]
    pub(crate) fn from_word(bits: u64, len: usize) -> Self {
        debug_assert!((1..=MAX_LEN).contains(&len));
        Self { bits: bits & mask(len), len: len as u8 }
    }

    pub fn zero(len: usize) -> Self {
        Self::from_word(0, len)
    }

    pub fn ones(len: usize) -> Self {
        Self::from_word(mask(len), len)
    }

    pub fn unit(i: usize, len: usize) -> Self {
        assert!(i < len, "unit index {i} out of range for length {len}");
        Self::from_word(1 << i, len)
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    #[inline]
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Standard dot product mod 2.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        (self.bits & other.bits).count_ones() & 1 == 1
    }

    pub fn xor(&self, other: &BitVec) -> Result<BitVec> {
        check_len(self.len(), other.len())?;
        Ok(Self::from_word(self.bits ^ other.bits, self.len()))
    }

    /// Concatenation `(self, other)`, `self` in the low coordinates.
    pub fn concat(&self, other: &BitVec) -> Result<BitVec> {
        let len = self.len() + other.len();
        if len > MAX_LEN {
            return Err(Error::arg("concatenated length exceeds 64"));
        }
        Ok(Self::from_word(self.bits | (other.bits << self.len), len))
    }

    /// Splits off the first `at` coordinates.
    pub fn split(&self, at: usize) -> (BitVec, BitVec) {
        assert!(at > 0 && at < self.len());
        (Self::from_word(self.bits & mask(at), at), Self::from_word(self.bits >> at, self.len() - at))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        let mut len = 0usize;
        for c in s.chars() {
            match c {
                '0' => {}
                '1' => {
                    if len < 64 {
                        bits |= 1 << len
                    }
                }
                _ => return Err(Error::arg(format!("invalid bit character {c:?}"))),
            }
            len += 1;
        }
        BitVec::new(bits, len)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}

pub fn hamming_weight(v: &BitVec) -> u32 {
    v.weight()
}

/// `q(x) = x·x mod 4`, i.e. the Hamming weight mod 4.
pub fn q_mod4(x: &BitVec) -> u8 {
    (x.weight() & 3) as u8
}

/// `𝔮(x, y) = x·x − y·y mod 4`.
pub fn qq_mod4(x: &BitVec, y: &BitVec) -> Result<u8> {
    check_len(x.len(), y.len())?;
    Ok(qq_word(x.bits, y.bits))
}

#[inline]
pub(crate) fn qq_word(x: u64, y: u64) -> u8 {
    (x.count_ones().wrapping_sub(y.count_ones()) & 3) as u8
}

/// Subspace of F₂^ambient in canonical reduced row-echelon form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct F2Subspace {
    ambient: usize,
    basis: Vec<u64>,
}

impl fmt::Debug for F2Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.basis().map(|v| v.to_string()).collect();
        write!(f, "F2Subspace[{}]{{{}}}", self.ambient, rows.join(", "))
    }
}

impl F2Subspace {
    pub fn zero(ambient: usize) -> Self {
        assert!((1..=MAX_LEN).contains(&ambient));
        Self { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_words(ambient, (0..ambient).map(|i| 1u64 << i))
    }

    /// Span of `rows`; all rows must share one length.
    pub fn span(rows: &[BitVec]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::arg("cannot infer ambient dimension of an empty row list"));
        };
        let ambient = first.len();
        for r in rows {
            check_len(ambient, r.len())?;
        }
        Ok(Self::from_words(ambient, rows.iter().map(|r| r.bits)))
    }

    /// Span of `rows` with an explicit ambient dimension (rows may be empty).
    pub fn span_in(ambient: usize, rows: &[BitVec]) -> Result<Self> {
        if ambient == 0 || ambient > MAX_LEN {
            return Err(Error::arg(format!("ambient dimension {ambient} outside 1..=64")));
        }
        for r in rows {
            check_len(ambient, r.len())?;
        }
        Ok(Self::from_words(ambient, rows.iter().map(|r| r.bits)))
    }

    pub(crate) fn from_words(ambient: usize, words: impl IntoIterator<Item = u64>) -> Self {
        let mut s = Self::zero(ambient);
        for w in words {
            s.insert_word(w & mask(ambient));
        }
        s
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> impl Iterator<Item = BitVec> + '_ {
        self.basis.iter().map(move |&w| BitVec::from_word(w, self.ambient))
    }

    #[inline]
    pub(crate) fn words(&self) -> &[u64] {
        &self.basis
    }

    /// Reduces `w` against the basis; zero iff `w` is in the span.
    #[inline]
    pub(crate) fn reduce(&self, mut w: u64) -> u64 {
        for &row in &self.basis {
            if w & (row & row.wrapping_neg()) != 0 {
                w ^= row;
            }
        }
        w
    }

    #[inline]
    pub(crate) fn contains_word(&self, w: u64) -> bool {
        self.reduce(w) == 0
    }

    pub fn contains(&self, v: &BitVec) -> Result<bool> {
        check_len(self.ambient, v.len())?;
        Ok(self.contains_word(v.bits))
    }

    /// Adds `w` to the span, keeping the basis canonical. Returns whether the
    /// dimension grew.
    pub(crate) fn insert_word(&mut self, w: u64) -> bool {
        let r = self.reduce(w);
        if r == 0 {
            return false;
        }
        let pivot = r & r.wrapping_neg();
        for row in self.basis.iter_mut() {
            if *row & pivot != 0 {
                *row ^= r;
            }
        }
        let pos = self.basis.iter().position(|&row| (row & row.wrapping_neg()) > pivot).unwrap_or(self.basis.len());
        self.basis.insert(pos, r);
        true
    }

    pub fn with(&self, v: &BitVec) -> Result<Self> {
        check_len(self.ambient, v.len())?;
        let mut s = self.clone();
        s.insert_word(v.bits);
        Ok(s)
    }

    pub fn sum(&self, other: &F2Subspace) -> Result<Self> {
        check_len(self.ambient, other.ambient)?;
        let mut s = self.clone();
        for &w in &other.basis {
            s.insert_word(w);
        }
        Ok(s)
    }

    /// Orthogonal complement under the standard dot product.
    pub fn perp(&self) -> Self {
        let pivots: u64 = self.basis.iter().map(|&r| r & r.wrapping_neg()).fold(0, |a, b| a | b);
        let mut out = Self::zero(self.ambient);
        for c in 0..self.ambient {
            let col = 1u64 << c;
            if pivots & col != 0 {
                continue;
            }
            // free column c: set e_c plus the pivot of every row that has bit c
            let mut v = col;
            for &row in &self.basis {
                if row & col != 0 {
                    v |= row & row.wrapping_neg();
                }
            }
            out.insert_word(v);
        }
        out
    }

    pub fn intersect(&self, other: &F2Subspace) -> Result<Self> {
        check_len(self.ambient, other.ambient)?;
        Ok(self.perp().sum(&other.perp())?.perp())
    }

    pub fn is_subspace_of(&self, other: &F2Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|&w| other.contains_word(w))
    }

    /// All 2^dim elements, in Gray-code order starting from zero.
    pub fn elements(&self) -> SpanIter<'_> {
        SpanIter { basis: &self.basis, counter: 0, current: 0, ambient: self.ambient, done: false }
    }

    pub(crate) fn element_words(&self) -> impl Iterator<Item = u64> + '_ {
        self.elements().map(|v| v.bits)
    }
}

/// Gray-code walk through a span.
pub struct SpanIter<'a> {
    basis: &'a [u64],
    counter: u64,
    current: u64,
    ambient: usize,
    done: bool,
}

impl Iterator for SpanIter<'_> {
    type Item = BitVec;

    fn next(&mut self) -> Option<BitVec> {
        if self.done {
            return None;
        }
        let out = BitVec::from_word(self.current, self.ambient);
        self.counter += 1;
        if self.counter >> self.basis.len() != 0 {
            self.done = true;
        } else {
            self.current ^= self.basis[self.counter.trailing_zeros() as usize];
        }
        Some(out)
    }
}

/// Row reduction of an arbitrary row list.
pub fn rref(rows: &[BitVec]) -> Result<(F2Subspace, usize)> {
    if rows.is_empty() {
        return Err(Error::arg("empty row list has no ambient dimension; use F2Subspace::zero"));
    }
    let s = F2Subspace::span(rows)?;
    let rank = s.dim();
    Ok((s, rank))
}

/// Square matrix over F₂ stored by columns.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitMatrix {
    size: usize,
    columns: Vec<u64>,
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self.columns.iter().map(|&c| BitVec::from_word(c, self.size).to_string()).collect();
        write!(f, "BitMatrix(cols=[{}])", cols.join(", "))
    }
}

impl BitMatrix {
    pub fn from_columns(columns: Vec<BitVec>) -> Result<Self> {
        let size = columns.len();
        if size == 0 || size > MAX_LEN {
            return Err(Error::arg(format!("matrix size {size} outside 1..=64")));
        }
        for c in &columns {
            check_len(size, c.len())?;
        }
        Ok(Self { size, columns: columns.iter().map(|c| c.bits).collect() })
    }

    pub(crate) fn from_column_words(size: usize, columns: Vec<u64>) -> Self {
        debug_assert_eq!(columns.len(), size);
        Self { size, columns }
    }

    pub fn identity(size: usize) -> Self {
        Self { size, columns: (0..size).map(|i| 1u64 << i).collect() }
    }

    /// Matrix with `columns[i] = e_{perm[i]}`, so that it maps coordinate `i` to `perm[i]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let size = perm.len();
        let mut seen = 0u64;
        for &p in perm {
            if p >= size || seen & (1 << p) != 0 {
                return Err(Error::arg(format!("{perm:?} is not a permutation")));
            }
            seen |= 1 << p;
        }
        Ok(Self { size, columns: perm.iter().map(|&p| 1u64 << p).collect() })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn column(&self, j: usize) -> BitVec {
        BitVec::from_word(self.columns[j], self.size)
    }

    pub fn columns(&self) -> impl Iterator<Item = BitVec> + '_ {
        self.columns.iter().map(move |&c| BitVec::from_word(c, self.size))
    }

    pub(crate) fn column_words(&self) -> &[u64] {
        &self.columns
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        (self.columns[col] >> row) & 1 == 1
    }

    #[inline]
    pub(crate) fn apply_word(&self, x: u64) -> u64 {
        let mut out = 0u64;
        let mut rest = x;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            out ^= self.columns[j];
            rest &= rest - 1;
        }
        out
    }

    pub fn apply(&self, x: &BitVec) -> Result<BitVec> {
        check_len(self.size, x.len())?;
        Ok(BitVec::from_word(self.apply_word(x.bits), self.size))
    }

    pub fn rank(&self) -> usize {
        F2Subspace::from_words(self.size, self.columns.iter().copied()).dim()
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.size
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &BitMatrix) -> Result<BitMatrix> {
        check_len(self.size, other.size)?;
        Ok(Self { size: self.size, columns: other.columns.iter().map(|&c| self.apply_word(c)).collect() })
    }

    pub fn is_permutation(&self) -> bool {
        self.columns.iter().all(|c| c.count_ones() == 1)
            && self.columns.iter().fold(0u64, |a, &c| a | c) == mask(self.size)
    }
}
