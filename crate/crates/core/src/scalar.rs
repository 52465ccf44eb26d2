//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating point type the laboratory can run on: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Sum that does not depend on thread scheduling: fixed-size chunks are
/// reduced in parallel, then the partials are added left to right.
pub fn det_sum<T, F>(len: usize, term: F) -> T
where
    T: Real,
    F: Fn(usize) -> T + Sync,
{
    use rayon::prelude::*;
    const CHUNK: usize = 4096;
    if len <= CHUNK {
        return (0..len).map(&term).fold(T::zero(), |a, b| a + b);
    }
    let partials: Vec<T> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(len);
            (lo..hi).map(&term).fold(T::zero(), |a, b| a + b)
        })
        .collect();
    partials.into_iter().fold(T::zero(), |a, b| a + b)
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    det_sum(a.len(), |i| a[i] * b[i])
}

pub(crate) fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
