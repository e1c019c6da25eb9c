//! Rotation numbers as exact continued fractions `θ = [0; a₁, a₂, …]`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Expansion stops when the Gauss-map remainder drops below this.
const REMAINDER_EPS: f64 = 1e-14;

/// A rotation number in `(0, 1)` given by a finite prefix of partial quotients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationNumber {
    partial_quotients: Vec<u64>,
    /// The prefix is the whole expansion (the number is rational).
    terminating: bool,
    float_hint: Option<f64>,
}

/// A convergent `p/q` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub p: u64,
    pub q: u64,
}

impl Convergent {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl RotationNumber {
    pub fn new(partial_quotients: Vec<u64>, terminating: bool) -> Result<Self> {
        if partial_quotients.is_empty() {
            return Err(Error::InvalidInput("at least one partial quotient is required".into()));
        }
        if partial_quotients.contains(&0) {
            return Err(Error::InvalidInput("partial quotients must be positive".into()));
        }
        Ok(Self { partial_quotients, terminating, float_hint: None })
    }

    /// The golden mean `(√5 - 1)/2 = [0; 1, 1, 1, …]` with `len` partial quotients.
    pub fn golden(len: usize) -> Self {
        Self {
            partial_quotients: vec![1; len.max(1)],
            terminating: false,
            float_hint: Some((5f64.sqrt() - 1.0) / 2.0),
        }
    }

    pub fn with_float_hint(mut self, x: f64) -> Self {
        self.float_hint = Some(x);
        self
    }

    pub fn partial_quotients(&self) -> &[u64] {
        &self.partial_quotients
    }

    pub fn is_terminating(&self) -> bool {
        self.terminating
    }

    pub fn float_hint(&self) -> Option<f64> {
        self.float_hint
    }

    /// `θ` in double precision: the hint if present, else the prefix evaluated
    /// from the innermost quotient outwards.
    pub fn value(&self) -> f64 {
        if let Some(x) = self.float_hint {
            return x;
        }
        let mut x = 0.0;
        for &a in self.partial_quotients.iter().rev() {
            x = 1.0 / (a as f64 + x);
        }
        x
    }

    pub fn max_partial_quotient(&self) -> u64 {
        self.partial_quotients.iter().copied().max().unwrap_or(0)
    }

    /// Bounded type with constant `bound`, as far as the prefix can tell.
    pub fn is_bounded_type(&self, bound: u64) -> bool {
        !self.terminating && self.max_partial_quotient() <= bound
    }

    /// `p_k/q_k` for `k = 1..=depth`. A terminating expansion stops at its
    /// last convergent, which is the number itself.
    pub fn convergents(&self, depth: usize) -> Result<Vec<Convergent>> {
        let available = self.partial_quotients.len();
        let depth = if self.terminating {
            depth.min(available)
        } else if depth > available {
            return Err(Error::DepthExceeded { requested: depth, available });
        } else {
            depth
        };
        let (mut p_prev, mut q_prev) = (1u64, 0u64);
        let (mut p, mut q) = (0u64, 1u64);
        let mut out = Vec::with_capacity(depth);
        for &a in &self.partial_quotients[..depth] {
            let overflow = || Error::DepthExceeded { requested: depth, available: out.len() };
            let p_next = a.checked_mul(p).and_then(|x| x.checked_add(p_prev)).ok_or_else(overflow)?;
            let q_next = a.checked_mul(q).and_then(|x| x.checked_add(q_prev)).ok_or_else(overflow)?;
            (p_prev, q_prev, p, q) = (p, q, p_next, q_next);
            out.push(Convergent { p, q });
        }
        Ok(out)
    }

    /// Truncated Brjuno sum `Σ_{k<depth} log(q_{k+1}) / q_k`, with `q₀ = 1`.
    pub fn brjuno_sum(&self, depth: usize) -> Result<f64> {
        if self.terminating {
            return Err(Error::NotApplicable);
        }
        if depth < 2 {
            return Err(Error::InvalidInput(format!("depth {depth} must be at least 2")));
        }
        let conv = self.convergents(depth)?;
        let mut q_prev = 1.0;
        let mut sum = 0.0;
        for c in &conv {
            sum += (c.q as f64).ln() / q_prev;
            q_prev = c.q as f64;
        }
        Ok(sum)
    }
}

/// Gauss-map expansion of `x ∈ (0, 1)` to at most `depth` partial quotients.
///
/// Stops early, marking the result as terminating, when the remainder falls
/// below `1e-14`. Fails when the requested depth is beyond what double
/// precision determines.
pub fn cf_expand(x: f64, depth: usize) -> Result<RotationNumber> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidInput(format!("{x} is not in (0, 1)")));
    }
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    if depth > 30 {
        log::warn!("continued fraction depth {depth} > 30 from a double is unreliable");
    }
    let mut quotients = Vec::with_capacity(depth);
    let mut rem = x;
    let mut terminating = false;
    // Error in the remainder is amplified by roughly q_k² after k steps.
    let (mut q_prev, mut q) = (0.0f64, 1.0f64);
    while quotients.len() < depth {
        if q * q * f64::EPSILON > 1e-2 {
            return Err(Error::PrecisionExhausted(depth));
        }
        let inv = 1.0 / rem;
        let mut a = inv.floor();
        let mut next = inv - a;
        if next > 1.0 - REMAINDER_EPS {
            a += 1.0;
            next = 0.0;
        }
        quotients.push(a as u64);
        (q_prev, q) = (q, a * q + q_prev);
        if next < REMAINDER_EPS {
            terminating = true;
            break;
        }
        rem = next;
    }
    Ok(RotationNumber { partial_quotients: quotients, terminating, float_hint: Some(x) })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Whether `p/q` is in lowest terms.
pub fn coprime(p: u64, q: u64) -> bool {
    gcd(p, q) == 1
}
