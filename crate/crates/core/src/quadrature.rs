//! Gauss–Legendre rules mapped to finite intervals.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

/// Nodes and weights on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn gauss_legendre(count: usize, a: f64, b: f64) -> Result<Self> {
        let degree = NonZeroUsize::new(count).ok_or(Error::InvalidConfig {
            field: "nodes",
            reason: "quadrature needs at least one node".into(),
        })?;
        let rule = GaussLegendre::new(degree);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let (nodes, weights) = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (mid + half * x, half * w))
            .unzip();
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}
