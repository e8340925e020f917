use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Joe–Kuo "new-joe-kuo-6" direction numbers, dimensions 2 through 1024.
const BUNDLED: &str = include_str!("../../data/new-joe-kuo-6.1024");

/// One line of a Joe–Kuo table: the primitive polynomial for a dimension and
/// its initial direction integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionRecord {
    pub dimension: usize,
    /// Degree `s` of the primitive polynomial.
    pub degree: u32,
    /// Interior coefficients `a_1 .. a_{s-1}` packed with `a_1` as the most
    /// significant bit.
    pub coefficients: u32,
    /// Initial direction integers `m_1 .. m_s`; `m_i` is odd and below `2^i`.
    pub initial: Vec<u64>,
}

/// Direction numbers for dimensions `2..=max_dimension`. Dimension 1 is the
/// van der Corput sequence and needs no record.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DirectionNumberTable {
    records: Vec<DirectionRecord>,
}

impl DirectionNumberTable {
    /// The table shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled direction numbers are valid")
    }

    /// Parses the whitespace-separated Joe–Kuo layout `d s a m_1 .. m_s`.
    ///
    /// A first line starting with a non-digit is treated as a header. Blank
    /// lines are skipped. Records may appear in any order but must cover a
    /// contiguous range of dimensions starting at 2.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines: Vec<(usize, &str)> = Vec::new();
        let mut first = true;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let header = first && !line.starts_with(|c: char| c.is_ascii_digit());
            first = false;
            if !header {
                lines.push((i + 1, line));
            }
        }
        let mut parsed: Vec<(usize, DirectionRecord)> = Vec::with_capacity(lines.len());
        for (line_no, line) in lines {
            parsed.push((line_no, parse_record(line_no, line)?));
        }
        parsed.sort_by_key(|(_, r)| r.dimension);
        for (i, (line_no, record)) in parsed.iter().enumerate() {
            if record.dimension != i + 2 {
                return Err(Error::InvalidDirectionNumbers {
                    line: *line_no,
                    message: format!(
                        "dimension {} breaks the contiguous range starting at 2 (expected {})",
                        record.dimension,
                        i + 2
                    ),
                });
            }
        }
        Ok(DirectionNumberTable {
            records: parsed.into_iter().map(|(_, r)| r).collect(),
        })
    }

    /// Highest dimension a Sobol net can be built for with this table.
    pub fn max_dimension(&self) -> usize {
        self.records.len() + 1
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Record for `dimension` (1-based, so the first record is dimension 2).
    pub fn record(&self, dimension: usize) -> Option<&DirectionRecord> {
        dimension.checked_sub(2).and_then(|i| self.records.get(i))
    }

    pub fn records(&self) -> &[DirectionRecord] {
        &self.records
    }
}

fn parse_record(line_no: usize, line: &str) -> Result<DirectionRecord> {
    let mut fields = Vec::new();
    for tok in line.split_whitespace() {
        let v: u64 = tok.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("expected a non-negative integer, found {tok:?}"),
        })?;
        fields.push(v);
    }
    if fields.len() < 3 {
        return Err(Error::Parse {
            line: line_no,
            message: "expected at least `d s a`".to_string(),
        });
    }
    let (dimension, degree, coefficients) = (fields[0], fields[1], fields[2]);
    let invalid = |message| Error::InvalidDirectionNumbers {
        line: line_no,
        message,
    };
    if dimension < 2 {
        return Err(invalid(format!("dimension must be at least 2, found {dimension}")));
    }
    if degree == 0 || degree > 63 {
        return Err(invalid(format!("polynomial degree {degree} out of range 1..=63")));
    }
    let initial = &fields[3..];
    if initial.len() as u64 != degree {
        return Err(Error::Parse {
            line: line_no,
            message: format!(
                "degree {degree} requires {degree} direction integers, found {}",
                initial.len()
            ),
        });
    }
    if coefficients >> (degree - 1) != 0 {
        return Err(invalid(format!(
            "coefficient {coefficients} does not fit degree {degree}"
        )));
    }
    for (i, &m) in initial.iter().enumerate() {
        let bits = i + 1;
        if m % 2 == 0 {
            return Err(invalid(format!("m_{bits} = {m} is even")));
        }
        if m >> bits != 0 {
            return Err(invalid(format!("m_{bits} = {m} is not below 2^{bits}")));
        }
    }
    Ok(DirectionRecord {
        dimension: dimension as usize,
        degree: degree as u32,
        coefficients: coefficients as u32,
        initial: initial.to_vec(),
    })
}
