use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Ratio of smoothing length to particle spacing.
pub const H_OVER_DX: f64 = 1.3;

/// 2D Wendland C2 kernel with support `2h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub h: f64,
    pub alpha: f64,
}

impl KernelSpec {
    pub fn new(h: f64) -> Self {
        KernelSpec { h, alpha: 7.0 / (4.0 * PI * h * h) }
    }

    pub fn from_spacing(dx: f64) -> Self {
        Self::new(H_OVER_DX * dx)
    }

    pub fn support_radius(&self) -> f64 {
        2.0 * self.h
    }

    pub fn w(&self, r: f64) -> f64 {
        let q = r / self.h;
        if q >= 2.0 {
            return 0.0;
        }
        let t = 1.0 - 0.5 * q;
        self.alpha * t * t * t * t * (2.0 * q + 1.0)
    }

    /// `F(r)` with `grad_i W_ij = F(r) * (x_i - x_j)`; never positive.
    pub fn grad_factor(&self, r: f64) -> f64 {
        let q = r / self.h;
        if q >= 2.0 {
            return 0.0;
        }
        let t = 1.0 - 0.5 * q;
        -5.0 * self.alpha * t * t * t / (self.h * self.h)
    }

    /// Gradient with respect to `x_i` for `rvec = x_i - x_j`.
    pub fn grad_w(&self, rvec: [f64; 2]) -> [f64; 2] {
        let r = rvec[0].hypot(rvec[1]);
        if r == 0.0 {
            return [0.0, 0.0];
        }
        let f = self.grad_factor(r);
        [f * rvec[0], f * rvec[1]]
    }
}

pub fn kernel_w(r: f64, spec: &KernelSpec) -> f64 {
    spec.w(r)
}

pub fn kernel_grad_w(rvec: [f64; 2], spec: &KernelSpec) -> [f64; 2] {
    spec.grad_w(rvec)
}
