//! Non-empty compact real intervals, ordered by reverse inclusion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `[lo, hi]` with `lo <= hi`, both finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactInterval<T> {
    lo: T,
    hi: T,
}

impl<T: Real> CompactInterval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidInterval {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        Ok(Self { lo, hi })
    }

    /// `[x, x]`.
    pub fn point(x: T) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn lo(&self) -> T {
        self.lo
    }

    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `x` lies in `[lo - tol, hi + tol]`.
    pub fn contains_within(&self, x: T, tol: T) -> bool {
        self.lo - tol <= x && x <= self.hi + tol
    }

    /// `k + [lo, hi]`.
    pub fn translate(&self, k: T) -> Self {
        Self {
            lo: self.lo + k,
            hi: self.hi + k,
        }
    }

    /// `{k x : x in self}`.
    pub fn scale(&self, k: T) -> Self {
        let (a, b) = (self.lo * k, self.hi * k);
        if k < T::zero() {
            Self { lo: b, hi: a }
        } else {
            Self { lo: a, hi: b }
        }
    }

    /// Minkowski sum.
    pub fn add(&self, other: &Self) -> Self {
        Self {
            lo: self.lo + other.lo,
            hi: self.hi + other.hi,
        }
    }

    /// `self ⊑ other` in the reverse-inclusion order, i.e. `other ⊆ self`.
    pub fn below(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// [`below`](Self::below) with each endpoint comparison relaxed by `tol`.
    pub fn below_within(&self, other: &Self, tol: T) -> bool {
        self.lo <= other.lo + tol && other.hi <= self.hi + tol
    }

    /// Largest endpoint difference.
    pub fn distance(&self, other: &Self) -> T {
        (self.lo - other.lo).abs().max((self.hi - other.hi).abs())
    }

    pub fn to_f64(&self) -> CompactInterval<f64> {
        CompactInterval {
            lo: self.lo.as_f64(),
            hi: self.hi.as_f64(),
        }
    }
}

pub fn translate<T: Real>(k: T, a: &CompactInterval<T>) -> CompactInterval<T> {
    a.translate(k)
}

pub fn scale_interval<T: Real>(k: T, a: &CompactInterval<T>) -> CompactInterval<T> {
    a.scale(k)
}

pub fn add_intervals<T: Real>(a: &CompactInterval<T>, b: &CompactInterval<T>) -> CompactInterval<T> {
    a.add(b)
}

/// `a ⊑ b` iff `b ⊆ a`.
pub fn reverse_inclusion_leq<T: Real>(a: &CompactInterval<T>, b: &CompactInterval<T>) -> bool {
    a.below(b)
}

/// Supremum of a nested chain `a_0 ⊇ a_1 ⊇ ...`, i.e. its intersection.
///
/// Nesting is checked with slack `tol`. Stops once neither endpoint moves by
/// `tol` or more in a step, or when the sequence ends.
pub fn directed_intersection<T: Real, I>(chain: I, tol: T) -> Result<CompactInterval<T>>
where
    I: IntoIterator<Item = CompactInterval<T>>,
{
    let mut chain = chain.into_iter();
    let mut current = chain.next().ok_or(Error::EmptyChain)?;
    for (index, next) in chain.enumerate() {
        if !current.below_within(&next, tol) {
            return Err(Error::NotNested { index: index + 1 });
        }
        let moved = current.distance(&next);
        // keep the tightest bounds seen so far
        current = CompactInterval {
            lo: current.lo.max(next.lo),
            hi: current.hi.min(next.hi).max(current.lo.max(next.lo)),
        };
        if moved < tol {
            break;
        }
    }
    Ok(current)
}
