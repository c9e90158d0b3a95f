//! Double-exponential (tanh-sinh) quadrature.
//!
//! The substitution `x = tanh(pi/2 sinh s)` maps `(-1, 1)` onto the real
//! line and makes the transformed integrand decay double-exponentially, so
//! the trapezoidal rule converges quadratically in the number of levels even
//! for integrands with logarithmic or algebraic endpoint singularities.
//! Abscissas are never placed on an endpoint: each node carries its exact
//! distance to the nearer endpoint, which integrands can use to avoid
//! cancellation (for example `1 - x` near `x = 1`).

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::numeric::{to_scientific, PrecisionContext, Real};

/// An evaluation point handed to an integrand.
#[derive(Debug, Clone)]
pub struct Abscissa {
    /// The point itself.
    pub t: Real,
    /// `t - lower`, computed without cancellation.
    pub from_lower: Real,
    /// `upper - t`, computed without cancellation.
    pub to_upper: Real,
}

type Integrand = dyn Fn(&Abscissa) -> Real + Send + Sync;

/// A real integrand on `[lower, upper]`.
pub struct IntegrandSpec {
    f: Box<Integrand>,
    lower: Real,
    upper: Real,
}

impl IntegrandSpec {
    pub fn new(
        lower: Real,
        upper: Real,
        f: impl Fn(&Abscissa) -> Real + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(lower < upper) {
            return Err(Error::Domain(format!(
                "integration bounds must satisfy lower < upper (got {lower} and {upper})"
            )));
        }
        Ok(Self {
            f: Box::new(f),
            lower,
            upper,
        })
    }

    /// Integrand that only looks at `t`.
    pub fn of_t(
        lower: Real,
        upper: Real,
        f: impl Fn(&Real) -> Real + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(lower, upper, move |a: &Abscissa| f(&a.t))
    }

    pub fn lower(&self) -> &Real {
        &self.lower
    }

    pub fn upper(&self) -> &Real {
        &self.upper
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Number of step halvings before giving up.
    pub max_level: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { max_level: 12 }
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: Real,
    /// Absolute difference between the last two levels.
    pub estimate: Real,
    pub level: u32,
    pub evaluations: usize,
}

struct Node {
    /// `tanh(u)`
    x: Real,
    /// `1 - tanh(u)`
    delta: Real,
    weight: Real,
}

type NodeCache = RwLock<HashMap<(u32, u32), Arc<Vec<Node>>>>;

fn node_cache() -> &'static NodeCache {
    static CACHE: OnceLock<NodeCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Nodes with `s = j` (level 0) or `s = (2j+1) 2^-level`, `s >= 0`.
fn level_nodes(bits: u32, level: u32) -> Arc<Vec<Node>> {
    if let Some(nodes) = node_cache().read().unwrap().get(&(bits, level)) {
        return nodes.clone();
    }
    let nodes = Arc::new(generate_nodes(bits, level));
    node_cache()
        .write()
        .unwrap()
        .entry((bits, level))
        .or_insert(nodes)
        .clone()
}

fn generate_nodes(bits: u32, level: u32) -> Vec<Node> {
    let wp = bits + 20;
    let half_pi = Float::with_val(wp, Constant::Pi) / 2;
    // Weights must fall below eps^2 so that inverse square-root endpoint
    // singularities are also resolved.
    let cutoff = Float::with_val(wp, Float::i_exp(1, -(2 * bits as i32) - 20));
    let h = Float::with_val(wp, Float::i_exp(1, -(level as i32)));
    let mut out = Vec::new();
    let mut j: u64 = 0;
    loop {
        let s = if level == 0 {
            Float::with_val(wp, j)
        } else {
            Float::with_val(wp, &h * (2 * j + 1))
        };
        let u: Float = Float::with_val(wp, s.sinh_ref()) * &half_pi;
        let e2u = Float::with_val(wp, &u * 2u32).exp();
        let delta = Float::with_val(wp, Float::with_val(wp, &e2u + 1u32).recip() * 2u32);
        let x = Float::with_val(wp, 1u32 - &delta);
        let cosh_u = Float::with_val(wp, u.cosh_ref());
        let weight = Float::with_val(wp, s.cosh_ref()) * &half_pi / cosh_u.square();
        let done = weight < cutoff;
        out.push(Node {
            x: Float::with_val(bits, x),
            delta: Float::with_val(bits, delta),
            weight: Float::with_val(bits, weight),
        });
        if done {
            break;
        }
        j += 1;
    }
    out
}

/// Integrates with the default options.
pub fn quad_de(f: &IntegrandSpec, ctx: &PrecisionContext) -> Result<QuadResult> {
    quad_de_with(f, ctx, QuadOptions::default())
}

pub fn quad_de_with(
    f: &IntegrandSpec,
    ctx: &PrecisionContext,
    opts: QuadOptions,
) -> Result<QuadResult> {
    let bits = ctx.bits();
    let a = Float::with_val(bits, &f.lower);
    let b = Float::with_val(bits, &f.upper);
    let center = Float::with_val(bits, &a + &b) / 2u32;
    let half = Float::with_val(bits, &b - &a) / 2u32;
    let width = Float::with_val(bits, &b - &a);
    let clamp = Float::with_val(bits, &width * Float::with_val(bits, Float::i_exp(1, -(bits as i32 / 2))));
    let tol = {
        let mut t = ctx.tolerance();
        t /= 1000u32;
        t
    };

    let mut raw = Float::new(bits);
    let mut evaluations = 0usize;
    let mut previous: Option<Real> = None;
    let mut last_diff = Float::with_val(bits, f64::INFINITY);

    let eval = |delta: &Real, left: bool| -> Result<Option<Real>> {
        let near = Float::with_val(bits, &half * delta);
        let far = Float::with_val(bits, &width - &near);
        let (t, from_lower, to_upper) = if left {
            (Float::with_val(bits, &a + &near), near.clone(), far)
        } else {
            (Float::with_val(bits, &b - &near), far, near.clone())
        };
        let v = (f.f)(&Abscissa {
            t,
            from_lower,
            to_upper,
        });
        if v.is_finite() {
            Ok(Some(v))
        } else if near < clamp {
            Ok(None)
        } else {
            Err(Error::NonFiniteIntegrand(to_scientific(&near, 6)))
        }
    };

    for level in 0..=opts.max_level {
        let nodes = level_nodes(bits, level);
        for (idx, node) in nodes.iter().enumerate() {
            let center_node = level == 0 && idx == 0;
            let mut contrib = Float::new(bits);
            if center_node {
                let v = (f.f)(&Abscissa {
                    t: center.clone(),
                    from_lower: half.clone(),
                    to_upper: half.clone(),
                });
                evaluations += 1;
                if !v.is_finite() {
                    return Err(Error::NonFiniteIntegrand(to_scientific(&center, 6)));
                }
                contrib += v;
            } else {
                // Interior nodes near the centre use tanh(u) directly; the
                // delta form is exact for both, so always use it.
                let _ = &node.x;
                for left in [false, true] {
                    evaluations += 1;
                    if let Some(v) = eval(&node.delta, left)? {
                        contrib += v;
                    }
                }
            }
            contrib *= &node.weight;
            raw += contrib;
        }
        let h = Float::with_val(bits, Float::i_exp(1, -(level as i32)));
        let estimate = Float::with_val(bits, &raw * &h) * &half;
        if let Some(prev) = previous.take() {
            let diff = Float::with_val(bits, &estimate - &prev).abs();
            let scale = Float::with_val(bits, estimate.abs_ref()).max(&Float::with_val(bits, 1));
            let converged = level >= 3 && diff <= Float::with_val(bits, &tol * &scale);
            last_diff = diff.clone();
            if converged {
                return Ok(QuadResult {
                    value: estimate,
                    estimate: diff,
                    level,
                    evaluations,
                });
            }
        }
        previous = Some(estimate);
    }
    Err(Error::QuadratureNonConvergence {
        levels: opts.max_level,
        estimate: to_scientific(&last_diff, 3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{context, fundamental, ConstantName};

    fn close(a: &Real, b: &Real, digits: i32) -> bool {
        let d = Float::with_val(a.prec(), a - b).abs();
        d < Float::with_val(a.prec(), Float::i_exp(1, 0)) * crate::numeric::pow10(-digits, a.prec())
    }

    #[test]
    fn polynomial() {
        let ctx = context(30).unwrap();
        let f = IntegrandSpec::of_t(ctx.real(0), ctx.real(1), |t| t.clone()).unwrap();
        let r = quad_de(&f, &ctx).unwrap();
        assert!(close(&r.value, &ctx.real(0.5), 30));
    }

    #[test]
    fn log_endpoint_singularity() {
        // int_0^1 ln t dt = -1
        let ctx = context(30).unwrap();
        let f = IntegrandSpec::of_t(ctx.real(0), ctx.real(1), |t| t.clone().ln()).unwrap();
        let r = quad_de(&f, &ctx).unwrap();
        assert!(close(&r.value, &ctx.real(-1), 30));
    }

    #[test]
    fn inverse_sqrt_uses_complement() {
        // int_0^1 dt / sqrt(1 - t) = 2, evaluated through the exact distance
        let ctx = context(30).unwrap();
        let f = IntegrandSpec::new(ctx.real(0), ctx.real(1), |a: &Abscissa| {
            a.to_upper.clone().sqrt().recip()
        })
        .unwrap();
        let r = quad_de(&f, &ctx).unwrap();
        assert!(close(&r.value, &ctx.real(2), 28));
    }

    #[test]
    fn catalan_log_tangent() {
        // int_0^{pi/4} (ln sin t - ln cos t) dt = -G
        let ctx = context(30).unwrap();
        let pi = fundamental(ConstantName::Pi, &ctx);
        let g = fundamental(ConstantName::CatalanG, &ctx);
        let f = IntegrandSpec::of_t(ctx.real(0), pi / 4, |t| {
            let s = Float::with_val(t.prec(), t.sin_ref()).ln();
            let c = Float::with_val(t.prec(), t.cos_ref()).ln();
            s - c
        })
        .unwrap();
        let r = quad_de(&f, &ctx).unwrap();
        assert!(close(&r.value, &(-g), 30));
    }

    #[test]
    fn rejects_empty_interval_and_reports_non_convergence() {
        let ctx = context(20).unwrap();
        assert!(IntegrandSpec::of_t(ctx.real(1), ctx.real(1), |t| t.clone()).is_err());
        // A wildly oscillating integrand cannot converge in two levels.
        let f = IntegrandSpec::of_t(ctx.real(0), ctx.real(1), |t| {
            Float::with_val(t.prec(), t * 1000u32).sin()
        })
        .unwrap();
        let err = quad_de_with(&f, &ctx, QuadOptions { max_level: 2 }).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }
}
