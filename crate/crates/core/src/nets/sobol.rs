use alloc::vec;
use alloc::vec::Vec;

use super::DirectionNumberTable;
use crate::{Error, PointSet, Result};

/// Number of binary digits carried per coordinate.
const DIGITS: usize = 64;

/// Largest `m` for which every point of a `2^m` net converts to `f64` exactly.
pub const MAX_RESOLUTION: u32 = 52;

const TWO_POW_NEG_64: f64 = 1.0 / 18_446_744_073_709_551_616.0;

/// Converts a 64-bit dyadic numerator (scale `2^64`) to a float in `[0, 1)`.
#[inline]
pub fn dyadic_to_f64(bits: u64) -> f64 {
    bits as f64 * TWO_POW_NEG_64
}

/// Generating columns for one coordinate, each stored as a 64-bit binary
/// fraction: column `k` is `m_{k+1} * 2^(64 - k - 1)`.
fn generating_columns(dimension: usize, table: &DirectionNumberTable) -> Result<[u64; DIGITS]> {
    let mut v = [0u64; DIGITS];
    if dimension == 1 {
        for (k, col) in v.iter_mut().enumerate() {
            *col = 1u64 << (DIGITS - 1 - k);
        }
        return Ok(v);
    }
    let record = table.record(dimension).ok_or(Error::DimensionUnsupported {
        requested: dimension,
        available: table.max_dimension(),
    })?;
    let s = record.degree as usize;
    for (k, &m) in record.initial.iter().enumerate().take(DIGITS) {
        v[k] = m << (DIGITS - 1 - k);
    }
    for k in s..DIGITS {
        let mut x = v[k - s] ^ (v[k - s] >> s);
        for i in 1..s {
            // a_i is bit (s - 1 - i) of the packed coefficient word
            if (record.coefficients >> (s - 1 - i)) & 1 == 1 {
                x ^= v[k - i];
            }
        }
        v[k] = x;
    }
    Ok(v)
}

/// The infinite base-2 Sobol `(t, s)`-sequence in natural (non-Gray) order.
///
/// Point `i` is the XOR of the generating columns selected by the binary
/// digits of `i`, so every aligned block of `2^m` points is a `(t, m, s)`-net
/// and any prefix is the prefix of the same sequence.
#[derive(Debug, Clone)]
pub struct SobolSequence {
    dim: usize,
    // columns[j * DIGITS + k]
    columns: Vec<u64>,
}

impl SobolSequence {
    pub fn new(dim: usize, table: &DirectionNumberTable) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1"));
        }
        if dim > table.max_dimension() {
            return Err(Error::DimensionUnsupported {
                requested: dim,
                available: table.max_dimension(),
            });
        }
        let mut columns = Vec::with_capacity(dim * DIGITS);
        for j in 1..=dim {
            columns.extend_from_slice(&generating_columns(j, table)?);
        }
        Ok(SobolSequence { dim, columns })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn column(&self, j: usize, k: usize) -> u64 {
        self.columns[j * DIGITS + k]
    }

    /// Writes point `index` as 64-bit dyadic numerators.
    pub fn point_bits(&self, index: u64, out: &mut [u64]) {
        assert_eq!(out.len(), self.dim, "output dimension mismatch");
        for (j, o) in out.iter_mut().enumerate() {
            let mut x = 0u64;
            let mut i = index;
            let mut k = 0;
            while i != 0 {
                if i & 1 == 1 {
                    x ^= self.column(j, k);
                }
                i >>= 1;
                k += 1;
            }
            *o = x;
        }
    }

    /// Writes point `index` as floats in `[0, 1)`.
    pub fn point(&self, index: u64, out: &mut [f64]) {
        let mut bits = vec![0u64; self.dim];
        self.point_bits(index, &mut bits);
        for (o, b) in out.iter_mut().zip(bits) {
            *o = dyadic_to_f64(b);
        }
    }

    /// First `count` points as exact dyadic numerators.
    pub fn prefix_dyadic(&self, count: u64) -> Result<DyadicPoints> {
        if count > 1u64 << MAX_RESOLUTION {
            return Err(Error::ResolutionUnsupported {
                requested: 64 - count.leading_zeros(),
                max: MAX_RESOLUTION,
            });
        }
        let n = count as usize;
        let mut bits = vec![0u64; n * self.dim];
        for i in 1..n {
            // x(i) = x(i with its lowest set bit cleared) ^ column(ctz(i))
            let parent = i & (i - 1);
            let k = i.trailing_zeros() as usize;
            for j in 0..self.dim {
                bits[i * self.dim + j] = bits[parent * self.dim + j] ^ self.column(j, k);
            }
        }
        Ok(DyadicPoints {
            dim: self.dim,
            bits,
        })
    }

    /// A cursor that emits the sequence from index 0.
    pub fn stream(&self) -> SobolStream {
        SobolStream {
            dim: self.dim,
            index: 0,
            state: vec![0; self.dim],
            flips: self.flip_masks(),
        }
    }

    fn flip_masks(&self) -> Vec<u64> {
        // flips[j * DIGITS + c] = column(j, 0) ^ .. ^ column(j, c)
        let mut flips = vec![0u64; self.dim * DIGITS];
        for j in 0..self.dim {
            let mut acc = 0;
            for c in 0..DIGITS {
                acc ^= self.column(j, c);
                flips[j * DIGITS + c] = acc;
            }
        }
        flips
    }
}

/// Sequential reader over a [`SobolSequence`]; advancing from `i - 1` to `i`
/// flips the digits `0..=ctz(i)`, which costs one XOR per coordinate.
#[derive(Debug, Clone)]
pub struct SobolStream {
    dim: usize,
    index: u64,
    state: Vec<u64>,
    flips: Vec<u64>,
}

impl SobolStream {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Index of the point the next call to [`next_bits`](Self::next_bits) returns.
    pub fn position(&self) -> u64 {
        self.index
    }

    pub fn next_bits(&mut self, out: &mut [u64]) {
        if self.index > 0 {
            let c = self.index.trailing_zeros() as usize;
            for j in 0..self.dim {
                self.state[j] ^= self.flips[j * DIGITS + c];
            }
        }
        out.copy_from_slice(&self.state);
        self.index += 1;
    }

    pub fn next_point(&mut self, out: &mut [f64]) {
        if self.index > 0 {
            let c = self.index.trailing_zeros() as usize;
            for j in 0..self.dim {
                self.state[j] ^= self.flips[j * DIGITS + c];
            }
        }
        for (o, &b) in out.iter_mut().zip(&self.state) {
            *o = dyadic_to_f64(b);
        }
        self.index += 1;
    }

    pub fn restart(&mut self) {
        self.index = 0;
        self.state.iter_mut().for_each(|x| *x = 0);
    }
}

/// Points held as exact 64-bit dyadic numerators over `2^64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicPoints {
    dim: usize,
    bits: Vec<u64>,
}

impl DyadicPoints {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.bits.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn point(&self, index: usize) -> &[u64] {
        &self.bits[index * self.dim..(index + 1) * self.dim]
    }

    pub fn iter(&self) -> core::slice::ChunksExact<'_, u64> {
        self.bits.chunks_exact(self.dim)
    }

    pub fn to_point_set(&self) -> PointSet {
        let coords = self.bits.iter().map(|&b| dyadic_to_f64(b)).collect();
        PointSet::from_flat(self.dim, coords).expect("dimension is positive")
    }

    /// Exact conversion from floats; every coordinate must lie in `[0, 1)`
    /// and be a multiple of `2^-64`.
    pub fn from_point_set(points: &PointSet) -> Result<Self> {
        let scale = 18_446_744_073_709_551_616.0;
        let mut bits = Vec::with_capacity(points.as_flat().len());
        for &x in points.as_flat() {
            if !(0.0..1.0).contains(&x) {
                return Err(Error::InvalidArgument("coordinate outside [0, 1)"));
            }
            let scaled = x * scale;
            let b = scaled as u64;
            if b as f64 != scaled {
                return Err(Error::InvalidArgument("coordinate is not a 64-bit dyadic rational"));
            }
            bits.push(b);
        }
        Ok(DyadicPoints {
            dim: points.dim(),
            bits,
        })
    }
}

/// A base-2 digital `(t, m, s)`-net given by its generating columns.
#[derive(Debug, Clone)]
pub struct DigitalNet {
    m: u32,
    s: usize,
    // columns[j][k], k < m
    columns: Vec<Vec<u64>>,
}

impl DigitalNet {
    /// The first `2^m` points of the Sobol sequence in dimension `s`.
    pub fn sobol(m: u32, s: usize, table: &DirectionNumberTable) -> Result<Self> {
        if m > MAX_RESOLUTION {
            return Err(Error::ResolutionUnsupported {
                requested: m,
                max: MAX_RESOLUTION,
            });
        }
        let seq = SobolSequence::new(s, table)?;
        let columns = (0..s)
            .map(|j| (0..m as usize).map(|k| seq.column(j, k)).collect())
            .collect();
        Ok(DigitalNet { m, s, columns })
    }

    pub fn base(&self) -> u32 {
        2
    }

    pub fn resolution(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.s
    }

    pub fn point_count(&self) -> u64 {
        1u64 << self.m
    }

    /// Generating columns of coordinate `j` (0-based) as 64-bit fractions.
    pub fn columns(&self, j: usize) -> &[u64] {
        &self.columns[j]
    }

    pub fn points_dyadic(&self) -> DyadicPoints {
        let n = self.point_count() as usize;
        let mut bits = vec![0u64; n * self.s];
        for i in 1..n {
            let parent = i & (i - 1);
            let k = i.trailing_zeros() as usize;
            for j in 0..self.s {
                bits[i * self.s + j] = bits[parent * self.s + j] ^ self.columns[j][k];
            }
        }
        DyadicPoints { dim: self.s, bits }
    }

    pub fn points(&self) -> PointSet {
        self.points_dyadic().to_point_set()
    }
}

/// The first `2^m` Sobol points in `[0, 1)^s`, in generation order.
pub fn sobol_points(m: u32, s: usize, table: &DirectionNumberTable) -> Result<PointSet> {
    Ok(DigitalNet::sobol(m, s, table)?.points())
}

/// The first `count` points of the `s`-dimensional Sobol sequence.
pub fn sobol_prefix(count: u64, s: usize, table: &DirectionNumberTable) -> Result<PointSet> {
    if count == 0 {
        return Err(Error::InvalidArgument("prefix length must be at least 1"));
    }
    Ok(SobolSequence::new(s, table)?.prefix_dyadic(count)?.to_point_set())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Radical inverse in base 2, computed digit by digit.
    fn van_der_corput(mut i: u64) -> f64 {
        let mut x = 0.0;
        let mut scale = 0.5;
        while i != 0 {
            if i & 1 == 1 {
                x += scale;
            }
            i >>= 1;
            scale *= 0.5;
        }
        x
    }

    #[test]
    fn origin_first() {
        let table = DirectionNumberTable::bundled();
        let pts = sobol_points(0, 3, &table).unwrap();
        assert_eq!(pts.as_flat(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_dimensional_pair() {
        let table = DirectionNumberTable::bundled();
        let pts = sobol_points(1, 2, &table).unwrap();
        assert_eq!(pts.as_flat(), &[0.0, 0.0, 0.5, 0.5]);
    }

    #[test]
    fn first_coordinate_is_van_der_corput() {
        let pts = sobol_points(3, 1, &DirectionNumberTable::default()).unwrap();
        assert_eq!(
            pts.as_flat(),
            &[0.0, 0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875]
        );
        let pts = sobol_points(10, 1, &DirectionNumberTable::default()).unwrap();
        for (i, &x) in pts.as_flat().iter().enumerate() {
            assert_eq!(x, van_der_corput(i as u64));
        }
    }

    #[test]
    fn short_prefix() {
        let table = DirectionNumberTable::default();
        assert_eq!(sobol_prefix(3, 1, &table).unwrap().as_flat(), &[0.0, 0.5, 0.25]);
        let table = DirectionNumberTable::bundled();
        assert_eq!(sobol_prefix(1, 2, &table).unwrap().as_flat(), &[0.0, 0.0]);
    }

    #[test]
    fn dimension_beyond_table() {
        let table = DirectionNumberTable::parse("2 1 0 1\n").unwrap();
        assert!(matches!(
            sobol_points(4, 3, &table),
            Err(Error::DimensionUnsupported {
                requested: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn known_third_coordinate() {
        // dimension 3 (x^2 + x + 1, m = 1, 3), natural order
        let table = DirectionNumberTable::bundled();
        let pts = sobol_points(3, 3, &table).unwrap();
        let third = pts.column(2);
        assert_eq!(third, [0.0, 0.5, 0.75, 0.25, 0.375, 0.875, 0.625, 0.125]);
    }

    #[test]
    fn stream_matches_random_access_and_prefix() {
        let table = DirectionNumberTable::bundled();
        let seq = SobolSequence::new(6, &table).unwrap();
        let prefix = seq.prefix_dyadic(1000).unwrap();
        let mut stream = seq.stream();
        let mut a = [0u64; 6];
        let mut b = [0u64; 6];
        for i in 0..1000 {
            stream.next_bits(&mut a);
            seq.point_bits(i as u64, &mut b);
            assert_eq!(a, b);
            assert_eq!(prefix.point(i), &a);
        }
        stream.restart();
        stream.next_bits(&mut a);
        assert_eq!(a, [0; 6]);
    }

    #[test]
    fn dyadic_round_trip() {
        let table = DirectionNumberTable::bundled();
        let net = DigitalNet::sobol(8, 4, &table).unwrap();
        let dy = net.points_dyadic();
        assert_eq!(DyadicPoints::from_point_set(&dy.to_point_set()).unwrap(), dy);
        assert!(DyadicPoints::from_point_set(&PointSet::from_scalars(&[1.0])).is_err());
    }
}
