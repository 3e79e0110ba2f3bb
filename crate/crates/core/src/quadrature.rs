//! Composite Gauss–Legendre rules on finite intervals.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Largest Gauss order used inside one panel.
pub const PANEL_ORDER: usize = 16;

/// Nodes and weights of a quadrature rule on `[a, b]`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect::<crate::sum::CompensatedSum>()
            .value()
    }
}

/// A single Gauss–Legendre rule of the given order mapped to `[a, b]`.
pub fn gauss_legendre(a: f64, b: f64, order: usize) -> Rule {
    let order = NonZeroUsize::new(order).expect("quadrature order must be positive");
    let rule = GaussLegendre::new(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let (nodes, weights) = rule
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .unzip();
    Rule { nodes, weights }
}

/// Equal-width panels carrying at least `n` nodes in total.
///
/// The panel count is `ceil(n / 16)` and every panel gets the same order
/// `ceil(n / panels)`, so the result has `n` nodes when `n` is a multiple of
/// the panel count and slightly more otherwise.
pub fn composite(a: f64, b: f64, n: usize) -> Rule {
    let n = n.max(1);
    let panels = n.div_ceil(PANEL_ORDER);
    let order = n.div_ceil(panels);
    let base = gauss_legendre(-1.0, 1.0, order);
    let width = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let hi = if p + 1 == panels { b } else { lo + width };
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (&x, &w) in base.nodes.iter().zip(&base.weights) {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }
    Rule { nodes, weights }
}
