//! Levin u-transform for slowly convergent alternating series.

use rug::ops::Pow;
use rug::Float;

use crate::numeric::Real;

/// Levin u-transform of order `k` built from partial sums `s[0..=k]` and
/// terms `a[0..=k]` (with `s[j] = s[j-1] + a[j]`), using `beta = 1`.
pub(crate) fn levin_u(s: &[Real], a: &[Real], k: usize) -> Option<Real> {
    if s.len() <= k || a.len() <= k {
        return None;
    }
    let wp = s[0].prec();
    let mut num = Float::new(wp);
    let mut den = Float::new(wp);
    let kb = Float::with_val(wp, k + 1);
    let mut binom = Float::with_val(wp, 1);
    for j in 0..=k {
        if j > 0 {
            binom *= (k - j + 1) as u32;
            binom /= j as u32;
        }
        if a[j].is_zero() {
            return None;
        }
        // omega_j = (j + 1) a_j
        let omega = Float::with_val(wp, &a[j] * (j + 1) as u32);
        let ratio = Float::with_val(wp, (j + 1) as u32) / &kb;
        let mut c = Float::with_val(wp, ratio.pow(k as i32 - 1)) * &binom / omega;
        if j % 2 == 1 {
            c = -c;
        }
        num += Float::with_val(wp, &c * &s[j]);
        den += c;
    }
    if den.is_zero() {
        return None;
    }
    Some(num / den)
}
