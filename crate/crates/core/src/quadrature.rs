//! Quadrature rules on `[0, 1]` used to average forces along free flights.
//!
//! A rule with weights `ω_i` and nodes `λ_i` approximates
//! `∫_a^b f(t) dt ≈ (b - a) Σ ω_i f(λ_i a + (1 - λ_i) b)`. Force integrals
//! along a free flight are evaluated at the convex combinations
//! `λ_i q_start + (1 - λ_i) q_end` directly.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::potential::Potential;

/// The rules shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinRule {
    Midpoint,
    GaussLegendre2,
    GaussLegendre3,
    GaussLegendre5,
    GaussLobatto3,
    GaussLobatto5,
}

impl BuiltinRule {
    pub const ALL: [BuiltinRule; 6] = [
        BuiltinRule::Midpoint,
        BuiltinRule::GaussLegendre2,
        BuiltinRule::GaussLegendre3,
        BuiltinRule::GaussLegendre5,
        BuiltinRule::GaussLobatto3,
        BuiltinRule::GaussLobatto5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinRule::Midpoint => "midpoint",
            BuiltinRule::GaussLegendre2 => "gauss_legendre_2",
            BuiltinRule::GaussLegendre3 => "gauss_legendre_3",
            BuiltinRule::GaussLegendre5 => "gauss_legendre_5",
            BuiltinRule::GaussLobatto3 => "gauss_lobatto_3",
            BuiltinRule::GaussLobatto5 => "gauss_lobatto_5",
        }
    }

    pub fn rule(self) -> QuadratureRule {
        // (weights, nodes, exact degree); Gauss-Legendre with n points is exact
        // up to degree 2n-1, Gauss-Lobatto up to 2n-3.
        let (weights, nodes, degree): (&[f64], &[f64], u32) = match self {
            BuiltinRule::Midpoint => (&[1.0], &[0.5], 1),
            BuiltinRule::GaussLegendre2 => (
                &[0.5, 0.5],
                &[0.21132486540518711775, 0.78867513459481288225],
                3,
            ),
            BuiltinRule::GaussLegendre3 => (
                &[5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0],
                &[0.11270166537925831148, 0.5, 0.88729833462074168852],
                5,
            ),
            BuiltinRule::GaussLegendre5 => (
                &[
                    0.11846344252809454376,
                    0.23931433524968323402,
                    0.28444444444444444444,
                    0.23931433524968323402,
                    0.11846344252809454376,
                ],
                &[
                    0.04691007703066800360,
                    0.23076534494715845448,
                    0.5,
                    0.76923465505284154552,
                    0.95308992296933199640,
                ],
                9,
            ),
            BuiltinRule::GaussLobatto3 => (&[1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0], &[0.0, 0.5, 1.0], 3),
            BuiltinRule::GaussLobatto5 => (
                &[1.0 / 20.0, 49.0 / 180.0, 16.0 / 45.0, 49.0 / 180.0, 1.0 / 20.0],
                &[0.0, 0.17267316464601142810, 0.5, 0.82732683535398857190, 1.0],
                7,
            ),
        };
        QuadratureRule::new(self.name(), weights.to_vec(), nodes.to_vec(), degree)
            .expect("builtin rules are valid")
    }
}

impl FromStr for BuiltinRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::UnknownRule(s.to_string()))
    }
}

impl fmt::Display for BuiltinRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Look up a builtin rule by name.
pub fn builtin_rule(name: &str) -> Result<QuadratureRule> {
    name.parse::<BuiltinRule>().map(BuiltinRule::rule)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    name: String,
    weights: Vec<f64>,
    nodes: Vec<f64>,
    exact_degree: u32,
    symmetric: bool,
}

impl QuadratureRule {
    /// Validates and builds a rule. Weights must sum to one, nodes must lie
    /// in `[0, 1]` and the rule must integrate affine functions exactly.
    pub fn new(name: impl Into<String>, weights: Vec<f64>, nodes: Vec<f64>, exact_degree: u32) -> Result<Self> {
        let name = name.into();
        if weights.is_empty() || weights.len() != nodes.len() {
            return Err(Error::InvalidArgument(format!(
                "rule `{name}`: {} weights for {} nodes",
                weights.len(),
                nodes.len()
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidArgument(format!("rule `{name}`: weights sum to {sum}")));
        }
        if nodes.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::InvalidArgument(format!("rule `{name}`: node outside [0, 1]")));
        }
        if exact_degree < 1 {
            return Err(Error::InvalidArgument(format!(
                "rule `{name}`: exact degree must be at least 1"
            )));
        }
        for k in 0..=exact_degree.min(15) as i32 {
            let got: f64 = weights.iter().zip(&nodes).map(|(w, l)| w * (1.0 - l).powi(k)).sum();
            if (got - 1.0 / (k as f64 + 1.0)).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "rule `{name}` does not integrate t^{k} exactly"
                )));
            }
        }
        let n = weights.len();
        let symmetric = (0..n).all(|i| {
            (weights[i] - weights[n - 1 - i]).abs() <= 1e-15 && (nodes[i] + nodes[n - 1 - i] - 1.0).abs() <= 1e-15
        });
        Ok(Self {
            name,
            weights,
            nodes,
            exact_degree,
            symmetric,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn exact_degree(&self) -> u32 {
        self.exact_degree
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn points(&self) -> usize {
        self.weights.len()
    }

    /// `(b - a) Σ ω_i f(λ_i a + (1 - λ_i) b)`; the interval may be reversed.
    pub fn integrate_scalar<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let s: f64 = self
            .weights
            .iter()
            .zip(&self.nodes)
            .map(|(w, l)| w * f(l * a + (1.0 - l) * b))
            .sum();
        (b - a) * s
    }

    /// `h Σ ω_i ∇V(λ_i q_start + (1 - λ_i) q_end)`, allocating the result.
    pub fn integrate_force<P: Potential + ?Sized>(
        &self,
        potential: &P,
        q_start: &[f64],
        q_end: &[f64],
        h: f64,
    ) -> Result<Vec<f64>> {
        let mut ws = ForceWorkspace::new(q_start.len());
        let mut out = vec![0.0; q_start.len()];
        let mut evals = 0;
        ws.integrate(self, potential, q_start, q_end, h, &mut out, &mut evals)
            .map_err(|m| Error::domain(0, m))?;
        Ok(out)
    }
}

/// Scratch buffers for force integrals in the stepping loops.
#[derive(Debug, Clone)]
pub(crate) struct ForceWorkspace {
    point: Vec<f64>,
    grad: Vec<f64>,
}

impl ForceWorkspace {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            point: vec![0.0; dim],
            grad: vec![0.0; dim],
        }
    }

    /// Writes the quadrature force integral into `out` and adds the number
    /// of force evaluations to `evals`.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn integrate<P: Potential + ?Sized>(
        &mut self,
        rule: &QuadratureRule,
        potential: &P,
        q_start: &[f64],
        q_end: &[f64],
        h: f64,
        out: &mut [f64],
        evals: &mut u64,
    ) -> std::result::Result<(), String> {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (&w, &l) in rule.weights.iter().zip(&rule.nodes) {
            for ((x, a), b) in self.point.iter_mut().zip(q_start).zip(q_end) {
                *x = l * a + (1.0 - l) * b;
            }
            potential.check_domain(&self.point)?;
            potential.gradient(&self.point, &mut self.grad);
            *evals += potential.interaction_count() as u64;
            let hw = h * w;
            for (o, g) in out.iter_mut().zip(&self.grad) {
                *o += hw * g;
            }
        }
        Ok(())
    }

    /// Exact integral for a potential with affine gradient:
    /// `(h/2)(∇V(q_start) + ∇V(q_end))`.
    pub(crate) fn integrate_affine<P: Potential + ?Sized>(
        &mut self,
        potential: &P,
        q_start: &[f64],
        q_end: &[f64],
        h: f64,
        out: &mut [f64],
        evals: &mut u64,
    ) -> std::result::Result<(), String> {
        potential.check_domain(q_start)?;
        potential.check_domain(q_end)?;
        potential.gradient(q_start, out);
        potential.gradient(q_end, &mut self.grad);
        *evals += 2 * potential.interaction_count() as u64;
        for (o, g) in out.iter_mut().zip(&self.grad) {
            *o = 0.5 * h * (*o + g);
        }
        Ok(())
    }
}
