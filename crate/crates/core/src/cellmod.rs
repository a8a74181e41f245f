//! Cell states, demodulation, modulation and rewrite costs.

use std::cmp::Ordering;

use thiserror::Error;

use crate::permlib::{MsPermutation, MultisetSpec, PermError};
use crate::scalar::Level;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum CellError {
    #[error("state has {n} cells but the spec needs {expected}")]
    DimensionMismatch { n: usize, expected: usize },
    #[error("rank {rank} outside [1, {q}]")]
    RankOutOfRange { rank: usize, q: usize },
    #[error("state does not demodulate to a valid permutation")]
    IllegalState,
    #[error("permutations have different multiset specs")]
    SpecMismatch,
    #[error("gap between rank {rank} and rank {} is below 1", rank + 1)]
    PreconditionViolated { rank: usize },
    #[error("cell {cell} has a negative or non-finite level")]
    InvalidLevel { cell: usize },
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Vector of non-negative finite cell levels.
#[derive(Debug, Clone, PartialEq)]
pub struct CellState<T> {
    levels: Vec<T>,
}

impl<T: Level> CellState<T> {
    pub fn new(levels: Vec<T>) -> Result<Self, CellError> {
        for (cell, x) in levels.iter().enumerate() {
            if !x.is_finite_level() || *x < T::zero() {
                return Err(CellError::InvalidLevel { cell });
            }
        }
        Ok(Self { levels })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            levels: vec![T::zero(); n],
        }
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn into_levels(self) -> Vec<T> {
        self.levels
    }

    pub fn n(&self) -> usize {
        self.levels.len()
    }

    /// Highest level over all cells.
    pub fn max_level(&self) -> T {
        self.levels
            .iter()
            .cloned()
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

/// Outcome of demodulation: a permutation or the illegal marker F.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DemodResult {
    Valid(MsPermutation),
    Illegal,
}

impl DemodResult {
    pub fn valid(self) -> Option<MsPermutation> {
        match self {
            DemodResult::Valid(p) => Some(p),
            DemodResult::Illegal => None,
        }
    }
}

fn cmp_levels<T: PartialOrd>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Demodulation into `S_{q,z}`.
pub fn demodulate<T: Level>(x: &CellState<T>, q: usize, z: usize) -> Result<DemodResult, CellError> {
    demodulate_spec(x, &MultisetSpec::uniform(q, z)?)
}

/// Demodulation for arbitrary multiplicities: the lowest `mult[0]` cells get
/// the first rank and so on.
pub fn demodulate_spec<T: Level>(
    x: &CellState<T>,
    spec: &MultisetSpec,
) -> Result<DemodResult, CellError> {
    let n = spec.n();
    if x.n() != n {
        return Err(CellError::DimensionMismatch {
            n: x.n(),
            expected: n,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cmp_levels(&x.levels[a], &x.levels[b]).then(a.cmp(&b)));
    let mut inv = vec![0; n];
    let mut pos = 0;
    for (i, &m) in spec.mult().iter().enumerate() {
        if pos > 0 && x.levels[order[pos - 1]] == x.levels[order[pos]] {
            return Ok(DemodResult::Illegal);
        }
        for &cell in &order[pos..pos + m] {
            inv[cell] = spec.base() + i;
        }
        pos += m;
    }
    Ok(DemodResult::Valid(MsPermutation::new(spec.clone(), inv)?))
}

/// `Gamma_x(i)`: highest level among the cells of rank `i`.
pub fn gamma<T: Level>(x: &CellState<T>, perm: &MsPermutation, i: usize) -> Result<T, CellError> {
    let spec = perm.spec();
    if i < spec.base() || i > spec.top() {
        return Err(CellError::RankOutOfRange {
            rank: i,
            q: spec.top(),
        });
    }
    check_dims(x, perm)?;
    Ok(perm
        .cells_of_rank(i)
        .into_iter()
        .map(|j| x.levels[j].clone())
        .fold(None, |acc: Option<T>, v| match acc {
            Some(a) if a >= v => Some(a),
            _ => Some(v),
        })
        .expect("every rank has at least one cell"))
}

fn check_dims<T>(x: &CellState<T>, perm: &MsPermutation) -> Result<(), CellError> {
    if x.levels.len() != perm.n() {
        return Err(CellError::DimensionMismatch {
            n: x.levels.len(),
            expected: perm.n(),
        });
    }
    Ok(())
}

/// Minimal-increase programming of `s` so that it demodulates to `pi`,
/// with a gap of 1 between consecutive ranks.
pub fn modulate<T: Level>(pi: &MsPermutation, s: &CellState<T>) -> Result<CellState<T>, CellError> {
    check_dims(s, pi)?;
    let spec = pi.spec();
    let mut x = s.levels.clone();
    let mut prev_top: Option<T> = None;
    for label in spec.base()..=spec.top() {
        let mut top: Option<T> = None;
        for j in pi.cells_of_rank(label) {
            if let Some(p) = &prev_top {
                let floor = p.clone() + T::one();
                if floor > x[j] {
                    x[j] = floor;
                }
            }
            if top.as_ref().is_none_or(|t| x[j] > *t) {
                top = Some(x[j].clone());
            }
        }
        prev_top = top;
    }
    Ok(CellState { levels: x })
}

fn demod_like<T: Level>(s: &CellState<T>, pi: &MsPermutation) -> Result<MsPermutation, CellError> {
    check_dims(s, pi)?;
    demodulate_spec(s, pi.spec())?
        .valid()
        .ok_or(CellError::IllegalState)
}

/// `alpha(s -> pi) = Gamma_x(q) - Gamma_s(q)` with `x = modulate(pi, s)`.
pub fn cost_states<T: Level>(s: &CellState<T>, pi: &MsPermutation) -> Result<T, CellError> {
    let sigma = demod_like(s, pi)?;
    let top = pi.spec().top();
    let x = modulate(pi, s)?;
    Ok(gamma(&x, pi, top)? - gamma(s, &sigma, top)?)
}

/// `alpha(sigma -> pi) = max_j (sigma^{-1}(j) - pi^{-1}(j))`.
pub fn cost_perms(sigma: &MsPermutation, pi: &MsPermutation) -> Result<i64, CellError> {
    if sigma.spec() != pi.spec() {
        return Err(CellError::SpecMismatch);
    }
    Ok(sigma
        .inv()
        .iter()
        .zip(pi.inv())
        .map(|(&a, &b)| a as i64 - b as i64)
        .max()
        .unwrap_or(0))
}

/// Comparison of the state cost with the permutation cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop1Report<T> {
    pub lhs: T,
    pub rhs: i64,
    /// `Gamma_s(q) - Gamma_s(1) = q - 1`, where equality is expected.
    pub tight: bool,
}

impl<T: Level> Prop1Report<T> {
    /// `lhs <= rhs`, with equality when tight.
    pub fn holds(&self) -> bool {
        let rhs = if self.rhs >= 0 {
            T::from_count(self.rhs as usize)
        } else {
            T::zero() - T::from_count(self.rhs.unsigned_abs() as usize)
        };
        if self.tight {
            self.lhs == rhs
        } else {
            self.lhs <= rhs
        }
    }
}

/// Evaluates both costs for a state whose rank maxima are at least 1 apart.
pub fn prop1_check<T: Level>(s: &CellState<T>, pi: &MsPermutation) -> Result<Prop1Report<T>, CellError> {
    let sigma = demod_like(s, pi)?;
    let spec = pi.spec();
    let tops = (spec.base()..=spec.top())
        .map(|i| gamma(s, &sigma, i))
        .collect::<Result<Vec<T>, _>>()?;
    for (k, w) in tops.windows(2).enumerate() {
        if w[1].clone() - w[0].clone() < T::one() {
            return Err(CellError::PreconditionViolated {
                rank: spec.base() + k,
            });
        }
    }
    let span = tops[tops.len() - 1].clone() - tops[0].clone();
    Ok(Prop1Report {
        lhs: cost_states(s, pi)?,
        rhs: cost_perms(&sigma, pi)?,
        tight: span == T::from_count(spec.q() - 1),
    })
}

/// Parses one CSV row of decimal levels.
pub fn parse_levels_row(line: &str) -> Result<Vec<f64>, String> {
    line.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad level {:?}: {e}", t.trim()))
        })
        .collect()
}

/// Parses a cell-state file: one row per state, `#` lines and blank lines skipped.
pub fn parse_state_file(text: &str) -> Result<Vec<CellState<f64>>, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let levels = parse_levels_row(l)?;
            CellState::new(levels).map_err(|e| e.to_string())
        })
        .collect()
}
