//! Composite Gauss–Legendre quadrature with panel doubling.

use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::accum::{tree_reduce, CompensatedSum};
use crate::{Error, Result};

/// Nodes per panel.
pub const PANEL_ORDER: usize = 16;
const PANELS_PER_TASK: usize = 64;
/// Upper limit on the panel count reached by doubling.
pub const MAX_PANELS: usize = 1 << 21;

/// Nodes and weights of the `PANEL_ORDER`-point rule on `[−1, 1]`,
/// sorted by node.
pub fn panel_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let rule = GaussLegendre::new(PANEL_ORDER).expect("order ≥ 2");
        let mut pairs = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    /// `∫|g|` on the final rule, the scale for rounding noise.
    pub abs_integral: f64,
    pub panels: usize,
    /// `|I_{2P} − I_P|` at the last doubling.
    pub change: f64,
}

/// `∫_a^b g` on `panels` equal panels, reduced in a fixed order so the result
/// does not depend on the thread count.
pub fn integrate_fixed<G>(a: f64, b: f64, panels: usize, g: G) -> (Complex64, f64)
where
    G: Fn(f64) -> Complex64 + Sync,
{
    let rule = panel_rule();
    let width = (b - a) / panels as f64;
    let tasks = panels.div_ceil(PANELS_PER_TASK);
    let parts: Vec<CompensatedSum> = (0..tasks)
        .into_par_iter()
        .map(|t| {
            let mut acc = CompensatedSum::new();
            let end = ((t + 1) * PANELS_PER_TASK).min(panels);
            for p in t * PANELS_PER_TASK..end {
                let mid = a + (p as f64 + 0.5) * width;
                let half = 0.5 * width;
                for &(x, w) in rule {
                    acc.add(g(mid + half * x) * (w * half));
                }
            }
            acc
        })
        .collect();
    let total = tree_reduce(parts);
    (total.value(), total.abs_total())
}

pub fn integrate_real_fixed<G>(a: f64, b: f64, panels: usize, g: G) -> f64
where
    G: Fn(f64) -> f64 + Sync,
{
    integrate_fixed(a, b, panels, |x| Complex64::new(g(x), 0.0)).0.re
}

/// Doubles the panel count, starting from `min_panels`, until
/// `|I_{2P} − I_P| ≤ rel_tol·|I_{2P}| + 1e-14·∫|g|`.
pub fn integrate_adaptive<G>(
    a: f64,
    b: f64,
    min_panels: usize,
    rel_tol: f64,
    context: &str,
    g: G,
) -> Result<Integral>
where
    G: Fn(f64) -> Complex64 + Sync,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(format!(
            "integration interval [{a}, {b}] in {context}"
        )));
    }
    let mut panels = min_panels.max(1);
    let (mut prev, _) = integrate_fixed(a, b, panels, &g);
    loop {
        panels *= 2;
        let (value, abs_integral) = integrate_fixed(a, b, panels, &g);
        let change = (value - prev).norm();
        let allowed = rel_tol * value.norm() + 1e-14 * abs_integral;
        if change <= allowed {
            return Ok(Integral {
                value,
                abs_integral,
                panels,
                change,
            });
        }
        if panels >= MAX_PANELS {
            return Err(Error::accuracy(
                context,
                change / value.norm().max(f64::MIN_POSITIVE),
                rel_tol,
            ));
        }
        prev = value;
    }
}
