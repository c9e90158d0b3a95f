//! Exact multiple t-sums
//! `t_k(s_1, ..., s_d) = sum_{k >= k_1 > ... > k_d > 0} prod (2 k_i - 1)^-s_i`.

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TSumComposition {
    parts: Vec<u32>,
}

impl TSumComposition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidSeries("t-sum composition must be nonempty".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidSeries("t-sum exponents must be positive".into()));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }
}

fn odd_power_recip(i: u64, s: u32) -> Rational {
    let d = Integer::from(2 * i - 1).pow(s);
    Rational::from((Integer::from(1), d))
}

/// Exact value of `t_k(s)`; zero when the depth exceeds `k`.
pub fn t_sum(k: u64, s: &TSumComposition) -> Rational {
    let d = s.depth();
    if k == 0 || d as u64 > k {
        return Rational::new();
    }
    let k = k as usize;
    // prefix[m] = sum over i <= m for the innermost level
    let mut prev: Vec<Rational> = vec![Rational::new(); k + 1];
    let last = s.parts[d - 1];
    for m in 1..=k {
        prev[m] = Rational::from(&prev[m - 1] + &odd_power_recip(m as u64, last));
    }
    for level in (0..d - 1).rev() {
        let sj = s.parts[level];
        let mut cur = vec![Rational::new(); k + 1];
        for m in 1..=k {
            let inner = Rational::from(&odd_power_recip(m as u64, sj) * &prev[m - 1]);
            cur[m] = Rational::from(&cur[m - 1] + &inner);
        }
        prev = cur;
    }
    prev[k].clone()
}
