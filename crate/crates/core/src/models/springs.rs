//! Networks of one-dimensional springs between particles and fixed walls.

use crate::potential::Potential;

/// Energy law of a single spring as a function of its elongation `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpringLaw {
    /// `½ k d²`
    Harmonic(f64),
    /// `c d⁴`
    Quartic(f64),
}

impl SpringLaw {
    fn energy(self, d: f64) -> f64 {
        match self {
            SpringLaw::Harmonic(k) => 0.5 * k * d * d,
            SpringLaw::Quartic(c) => c * d.powi(4),
        }
    }

    fn force(self, d: f64) -> f64 {
        match self {
            SpringLaw::Harmonic(k) => k * d,
            SpringLaw::Quartic(c) => 4.0 * c * d.powi(3),
        }
    }

    fn stiffness(self, d: f64) -> f64 {
        match self {
            SpringLaw::Harmonic(k) => k,
            SpringLaw::Quartic(c) => 12.0 * c * d * d,
        }
    }
}

/// A spring from `left` to `right`; `None` stands for a wall fixed at zero.
/// The elongation is `q[right] - q[left]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spring {
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub law: SpringLaw,
}

impl Spring {
    pub fn new(left: Option<usize>, right: Option<usize>, law: SpringLaw) -> Self {
        Self { left, right, law }
    }

    fn elongation(&self, q: &[f64]) -> f64 {
        let at = |i: Option<usize>| i.map_or(0.0, |i| q[i]);
        at(self.right) - at(self.left)
    }
}

/// `V(q) = Σ_s law_s(q[right_s] - q[left_s])` over a fixed set of springs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpringNetwork {
    dim: usize,
    springs: Vec<Spring>,
}

impl SpringNetwork {
    pub fn new(dim: usize, springs: Vec<Spring>) -> Self {
        for s in &springs {
            for i in [s.left, s.right].into_iter().flatten() {
                assert!(i < dim, "spring endpoint {i} outside dimension {dim}");
            }
        }
        Self { dim, springs }
    }

    /// A chain `0 - q_0 - q_1 - … - q_{n-1} - 0` with one law per spring
    /// (`laws.len() == n + 1`).
    pub fn fixed_chain(laws: &[SpringLaw]) -> Self {
        let n = laws.len() - 1;
        let springs = laws
            .iter()
            .enumerate()
            .map(|(i, &law)| {
                let left = i.checked_sub(1);
                let right = (i < n).then_some(i);
                Spring::new(left, right, law)
            })
            .collect();
        Self::new(n, springs)
    }

    pub fn springs(&self) -> &[Spring] {
        &self.springs
    }

    /// Sub-network made of the springs selected by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Spring) -> bool) -> Self {
        Self {
            dim: self.dim,
            springs: self.springs.iter().copied().filter(|s| keep(s)).collect(),
        }
    }
}

impl Potential for SpringNetwork {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, q: &[f64]) -> f64 {
        self.springs.iter().map(|s| s.law.energy(s.elongation(q))).sum()
    }

    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        for s in &self.springs {
            let f = s.law.force(s.elongation(q));
            if let Some(r) = s.right {
                out[r] += f;
            }
            if let Some(l) = s.left {
                out[l] -= f;
            }
        }
    }

    fn hessian_action(&self, q: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        out.iter_mut().for_each(|g| *g = 0.0);
        for s in &self.springs {
            let k = s.law.stiffness(s.elongation(q));
            let dv = s.elongation(v);
            if let Some(r) = s.right {
                out[r] += k * dv;
            }
            if let Some(l) = s.left {
                out[l] -= k * dv;
            }
        }
        true
    }

    fn is_quadratic(&self) -> bool {
        self.springs.iter().all(|s| matches!(s.law, SpringLaw::Harmonic(_)))
    }

    fn interaction_count(&self) -> usize {
        self.springs.len()
    }
}

/// Uniform harmonic chain `½ω² Σ_{i=1}^{n+1} (q_i - q_{i-1})²` with fixed ends.
pub fn harmonic_chain(n: usize, omega: f64) -> SpringNetwork {
    SpringNetwork::fixed_chain(&vec![SpringLaw::Harmonic(omega * omega); n + 1])
}

/// Two free particles joined by a quartic spring `c (q_1 - q_0)⁴`.
pub fn quartic_pair(c: f64) -> SpringNetwork {
    SpringNetwork::new(2, vec![Spring::new(Some(0), Some(1), SpringLaw::Quartic(c))])
}
