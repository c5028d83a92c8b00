//! Nesterov-accelerated gradient with one-cycle schedules. The schedule
//! is a linear triangle: the learning rate ramps from its floor to the
//! peak at the midpoint and back; momentum runs the opposite way.

/// One-cycle linear schedule over a fixed number of steps.
#[derive(Debug, Clone)]
pub struct OneCycle {
    pub min_lr: f64,
    pub max_lr: f64,
    pub min_momentum: f64,
    pub max_momentum: f64,
    pub total_steps: usize,
}

impl OneCycle {
    pub fn new(total_steps: usize) -> OneCycle {
        OneCycle {
            min_lr: 1e-5,
            max_lr: 0.14,
            min_momentum: 0.8,
            max_momentum: 0.95,
            total_steps: total_steps.max(1),
        }
    }

    /// Position in [0, 1] along the triangle: 0 at both ends, 1 at the
    /// midpoint.
    fn ramp(&self, step: usize) -> f64 {
        let t = (step.min(self.total_steps) as f64) / (self.total_steps as f64);
        if t <= 0.5 {
            2.0 * t
        } else {
            2.0 * (1.0 - t)
        }
    }

    pub fn lr(&self, step: usize) -> f64 {
        self.min_lr + (self.max_lr - self.min_lr) * self.ramp(step)
    }

    /// High when the learning rate is low and vice versa.
    pub fn momentum(&self, step: usize) -> f64 {
        self.max_momentum - (self.max_momentum - self.min_momentum) * self.ramp(step)
    }
}

/// NAG over a flat `f32` parameter vector. The velocity is part of the
/// checkpointable state: a spike revert must restore it too, or the next
/// steps would replay the corrupted direction.
#[derive(Debug, Clone)]
pub struct Nag {
    pub velocity: Vec<f32>,
}

impl Nag {
    pub fn new(param_count: usize) -> Nag {
        Nag {
            velocity: vec![0.0; param_count],
        }
    }

    /// v <- mu * v + g;  p <- p - lr * (g + mu * v)
    pub fn step(&mut self, params: &mut [f32], grad: &[f32], lr: f64, momentum: f64) {
        let mu = momentum as f32;
        let lr = lr as f32;
        for ((p, g), v) in params.iter_mut().zip(grad).zip(&mut self.velocity) {
            *v = mu * *v + g;
            *p -= lr * (g + mu * *v);
        }
    }
}
