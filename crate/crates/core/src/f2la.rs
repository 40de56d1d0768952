//! Dense bit-packed linear algebra over GF(2).
//!
//! The Cartier operator is 1/2-linear, but every entry of its matrix lies in
//! GF(2), where the Frobenius twist is the identity. So the matrix of `C^k` is
//! the plain power `M^k`, and `dim ker C = cols - rank(M)` over any extension.

use std::fmt;
use std::io::{self, Read, Write};

use thiserror::Error;

use crate::error::{Error, Result};
use crate::params::SuzukiParams;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A packed vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "BitVector({s})")
    }
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_ones<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        ones(&self.words)
    }
}

/// Positions of set bits in a packed word slice.
fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let tz = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(wi * WORD + tz)
        })
    })
}

/// Dense row-major GF(2) matrix; bits past `cols` in each row stay zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let s: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '.' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

#[inline]
fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix whose column `j` is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for i in col.iter_ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            m.row_mut(i).copy_from_slice(r.words());
        }
        m
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

    pub fn words_per_row(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row_vector(&self, i: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row(i).to_vec(),
        }
    }

    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_ones(self.rows, (0..self.rows).filter(|&i| self.get(i, j)))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        self.data[i * self.stride + j / WORD] >> (j % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.stride + j / WORD];
        let mask = 1u64 << (j % WORD);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * self.stride);
        head[lo * self.stride..(lo + 1) * self.stride].swap_with_slice(&mut tail[..self.stride]);
    }

    /// `row[dst] ^= row[src]`, touching only words from `from_word` on.
    fn xor_rows(&mut self, dst: usize, src: usize, from_word: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (d, sr) = if dst < src {
            let (head, tail) = self.data.split_at_mut(src * s);
            (&mut head[dst * s..(dst + 1) * s], &tail[..s])
        } else {
            let (head, tail) = self.data.split_at_mut(dst * s);
            (&mut tail[..s], &head[src * s..(src + 1) * s])
        };
        xor_into(&mut d[from_word..], &sr[from_word..]);
    }

    /// Gauss-Jordan elimination in place, row swaps only. Returns pivot columns.
    fn reduce(&mut self, full: bool) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            let w = c / WORD;
            let start = if full { 0 } else { r + 1 };
            for i in start..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_rows(i, r, w);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().reduce(false).len()
    }

    /// Basis of the right kernel `{ v : M v = 0 }`.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let mut a = self.clone();
        let pivots = a.reduce(true);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVector::unit(self.cols, f);
                for (row, &pc) in pivots.iter().enumerate() {
                    if a.get(row, f) {
                        v.set(pc, true);
                    }
                }
                v
            })
            .collect()
    }

    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            let parity = self
                .row(i)
                .iter()
                .zip(v.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            if parity & 1 == 1 {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        let s = out.stride;
        for (i, chunk) in out.data.chunks_mut(s.max(1)).enumerate().take(self.rows) {
            for k in ones(self.row(i)) {
                xor_into(chunk, other.row(k));
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in ones(self.row(i)) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// True iff `v` lies in the column space.
    pub fn column_space_contains(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.rows {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} rows",
                v.len(),
                self.rows
            )));
        }
        let mut cols: Vec<BitVector> = (0..self.cols).map(|j| self.column(j)).collect();
        let before = BitMatrix::from_columns(self.rows, &cols).rank();
        cols.push(v.clone());
        Ok(BitMatrix::from_columns(self.rows, &cols).rank() == before)
    }

    /// Ranks of `M, M^2, ...` until the rank reaches zero or stops falling.
    pub fn rank_profile(&self) -> Result<RankProfile> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "rank profile of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut ranks = Vec::new();
        let mut power = self.clone();
        let mut nilpotency = None;
        for k in 1..=self.cols.max(1) {
            let r = power.rank();
            let stalled = ranks.last() == Some(&r);
            ranks.push(r);
            if r == 0 {
                nilpotency = Some(k);
                break;
            }
            if stalled {
                break;
            }
            power = power.matmul(self)?;
        }
        Ok(RankProfile {
            g: self.cols,
            ranks,
            nilpotency,
        })
    }
}

pub fn rank(m: &BitMatrix) -> usize {
    m.rank()
}

pub fn kernel_basis(m: &BitMatrix) -> Vec<BitVector> {
    m.kernel_basis()
}

pub fn matmul(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    a.matmul(b)
}

pub fn rank_profile(m: &BitMatrix) -> Result<RankProfile> {
    m.rank_profile()
}

/// Ranks `r_k = rank(M^k)` of the powers of a square matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankProfile {
    pub g: usize,
    /// `ranks[k - 1] = rank(M^k)`.
    pub ranks: Vec<usize>,
    /// Smallest `k` with `M^k = 0`, if the matrix is nilpotent.
    pub nilpotency: Option<usize>,
}

impl RankProfile {
    /// `g - rank(M)`.
    pub fn a_number(&self) -> usize {
        self.g - self.ranks.first().copied().unwrap_or(0)
    }
}

/// Errors reading or writing the `SZCM` matrix cache.
#[derive(Debug, Error)]
pub enum CacheError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("dimension mismatch: header says m={m}, g={g}, but S_m has genus {expected}")]
    DimensionMismatch { m: u32, g: u32, expected: u64 },
    #[error("short read: expected {expected} bytes of matrix data, found {found}")]
    ShortRead { expected: usize, found: usize },
    #[error("matrix is not square g x g: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

pub const SZCM_MAGIC: &[u8; 4] = b"SZCM";
pub const SZCM_VERSION: u8 = 1;

/// Writes `"SZCM"`, version byte, `m` and `g` as little-endian u32, then `g`
/// rows of `ceil(g / 64)` little-endian u64 words.
pub fn write_szcm<W: Write>(mut w: W, m: u32, matrix: &BitMatrix) -> std::result::Result<(), CacheError> {
    if !matrix.is_square() {
        return Err(CacheError::NotSquare {
            rows: matrix.rows,
            cols: matrix.cols,
        });
    }
    let g = u32::try_from(matrix.rows).map_err(|_| CacheError::CorruptHeader("g exceeds u32".into()))?;
    w.write_all(SZCM_MAGIC)?;
    w.write_all(&[SZCM_VERSION])?;
    w.write_all(&m.to_le_bytes())?;
    w.write_all(&g.to_le_bytes())?;
    let mut buf = Vec::with_capacity(matrix.data.len() * 8);
    for word in &matrix.data {
        buf.extend_from_slice(&word.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

fn read_up_to<R: Read>(r: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

/// Reads an `SZCM` stream; returns `m` and the matrix.
pub fn read_szcm<R: Read>(mut r: R) -> std::result::Result<(u32, BitMatrix), CacheError> {
    let mut header = [0u8; 13];
    let got = read_up_to(&mut r, &mut header)?;
    if got < header.len() {
        return Err(CacheError::ShortRead {
            expected: header.len(),
            found: got,
        });
    }
    if &header[..4] != SZCM_MAGIC {
        return Err(CacheError::CorruptHeader(format!("bad magic {:?}", &header[..4])));
    }
    if header[4] != SZCM_VERSION {
        return Err(CacheError::CorruptHeader(format!("unsupported version {}", header[4])));
    }
    let m = u32::from_le_bytes(header[5..9].try_into().unwrap());
    let g = u32::from_le_bytes(header[9..13].try_into().unwrap());
    let params = SuzukiParams::new(m).map_err(|e| CacheError::CorruptHeader(format!("m={m}: {e}")))?;
    if params.g != g as u64 {
        return Err(CacheError::DimensionMismatch {
            m,
            g,
            expected: params.g,
        });
    }
    let n = g as usize;
    let mut matrix = BitMatrix::zeros(n, n);
    let expected = matrix.data.len() * 8;
    let mut bytes = vec![0u8; expected];
    let found = read_up_to(&mut r, &mut bytes)?;
    if found < expected {
        return Err(CacheError::ShortRead { expected, found });
    }
    for (word, chunk) in matrix.data.iter_mut().zip(bytes.chunks_exact(8)) {
        *word = u64::from_le_bytes(chunk.try_into().unwrap());
    }
    let pad = n % WORD;
    if pad != 0 {
        let mask = !0u64 << pad;
        if (0..n).any(|i| matrix.row(i)[matrix.stride - 1] & mask != 0) {
            return Err(CacheError::CorruptHeader("nonzero padding bits".into()));
        }
    }
    let mut trailing = [0u8; 1];
    if read_up_to(&mut r, &mut trailing)? != 0 {
        return Err(CacheError::CorruptHeader("trailing bytes after matrix data".into()));
    }
    Ok((m, matrix))
}
