//! Adaptive moment estimation over a flat parameter block.

/// Default numerical-stability constant.
pub const ADAM_EPSILON: f64 = 1e-8;

/// Running first and second moments plus the step counter for one parameter
/// block.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// Advance one step on gradient `g` and return the bias-corrected
    /// parameter delta `-eta * m_hat / (sqrt(v_hat) + epsilon)`.
    pub fn delta(&mut self, g: &[f64], eta: f64, beta1: f64, beta2: f64, epsilon: f64) -> Vec<f64> {
        assert_eq!(g.len(), self.m.len(), "gradient length mismatch");
        self.t += 1;
        let bc1 = 1.0 - beta1.powi(self.t as i32);
        let bc2 = 1.0 - beta2.powi(self.t as i32);
        let mut out = Vec::with_capacity(g.len());
        for ((m, v), &gi) in self.m.iter_mut().zip(&mut self.v).zip(g) {
            *m = beta1 * *m + (1.0 - beta1) * gi;
            *v = beta2 * *v + (1.0 - beta2) * gi * gi;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            out.push(-eta * m_hat / (v_hat.sqrt() + epsilon));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate_signs() {
        let mut adam = AdamState::new(3);
        let delta = adam.delta(&[2.0, -0.5, 0.0], 0.1, 0.9, 0.999, ADAM_EPSILON);
        // With t = 1, m_hat = g and v_hat = g^2, so the move is -eta*sign(g)
        // up to epsilon.
        assert!((delta[0] + 0.1).abs() < 1e-6);
        assert!((delta[1] - 0.1).abs() < 1e-6);
        assert_eq!(delta[2], 0.0);
    }

    #[test]
    fn zero_gradients_never_move() {
        let mut adam = AdamState::new(2);
        for _ in 0..5 {
            let delta = adam.delta(&[0.0, 0.0], 0.5, 0.9, 0.999, ADAM_EPSILON);
            assert_eq!(delta, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn constant_gradient_keeps_stable_step() {
        // With constant g the bias-corrected moments stay m_hat = g and
        // v_hat = g^2, so consecutive deltas coincide.
        let mut adam = AdamState::new(1);
        let d1 = adam.delta(&[3.0], 0.2, 0.9, 0.999, ADAM_EPSILON);
        let d2 = adam.delta(&[3.0], 0.2, 0.9, 0.999, ADAM_EPSILON);
        assert!(d1[0] < 0.0 && d2[0] < 0.0);
        assert!((d1[0] - d2[0]).abs() < 1e-9);
    }
}
