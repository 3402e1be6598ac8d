//! Gauss–Legendre quadrature rules.
//!
//! Nodes and weights are computed by Newton iteration on the Legendre
//! polynomial recurrence, which is accurate to machine precision for the
//! orders used here (up to a few hundred points).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature order must be at least 2, got {0}")]
    OrderTooSmall(usize),
}

/// A Gauss–Legendre rule of fixed order on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self, QuadError> {
        if order < 2 {
            return Err(QuadError::OrderTooSmall(order));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Roots come in ± pairs; solve the upper half and mirror.
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (4.0 * i as f64 + 3.0) / (4.0 * n as f64 + 2.0))
                .cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                    let (_, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
            nodes[i] = -x;
            weights[i] = w;
        }
        // Odd order: the middle root is exactly zero.
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        half * sum
    }
}

/// Legendre polynomial P_n and its derivative at `x`, by the three-term
/// recurrence and the standard derivative identity.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_order_below_two() {
        assert!(GaussLegendre::new(0).is_err());
        assert!(GaussLegendre::new(1).is_err());
        assert!(GaussLegendre::new(2).is_ok());
    }

    #[test]
    fn five_point_rule_matches_reference_values() {
        let rule = GaussLegendre::new(5).unwrap();
        let nodes_ref = [
            -0.906179845938664,
            -0.5384693101056831,
            0.0,
            0.5384693101056831,
            0.906179845938664,
        ];
        let weights_ref = [
            0.23692688505618908,
            0.47862867049936647,
            0.5688888888888889,
            0.47862867049936647,
            0.23692688505618908,
        ];
        for i in 0..5 {
            assert!((rule.nodes()[i] - nodes_ref[i]).abs() < 1e-15);
            assert!((rule.weights()[i] - weights_ref[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_sum_to_two_at_high_order() {
        for order in [3, 10, 51, 104, 208] {
            let rule = GaussLegendre::new(order).unwrap();
            let sum: f64 = rule.weights().iter().sum();
            assert!(
                (sum - 2.0).abs() < 1e-13,
                "order {order}: weight sum {sum}"
            );
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // Order n is exact through degree 2n-1.
        let rule = GaussLegendre::new(6).unwrap();
        let exact = 1.0 / 12.0; // ∫₀¹ x¹¹ dx
        let got = rule.integrate(0.0, 1.0, |x| x.powi(11));
        assert!((got - exact).abs() < 1e-16, "got {got}");

        // And an easy transcendental on a shifted interval.
        let rule = GaussLegendre::new(20).unwrap();
        let got = rule.integrate(0.0, std::f64::consts::PI, f64::sin);
        assert!((got - 2.0).abs() < 1e-14, "got {got}");
    }

    #[test]
    fn high_order_integrates_gaussian() {
        let rule = GaussLegendre::new(104).unwrap();
        let got = rule.integrate(-8.0, 8.0, |x| (-0.5 * x * x).exp());
        let exact = (2.0 * std::f64::consts::PI).sqrt();
        assert!((got - exact).abs() / exact < 1e-14);
    }

    #[test]
    fn degenerate_interval_is_zero() {
        let rule = GaussLegendre::new(8).unwrap();
        assert_eq!(rule.integrate(1.0, 1.0, |x| x), 0.0);
    }
}
