//! Forward-mode dual numbers carrying a gradient with respect to p⃗.
//!
//! Momentum-space multipliers are written once as functions of `Dual` and
//! their gradients (needed by anticommutators with x̂ = i∂/∂p) come out exact.

use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::Vector3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub g: Vector3<f64>,
}

impl Dual {
    pub fn constant(v: f64) -> Self {
        Self { v, g: Vector3::zeros() }
    }

    /// The three coordinate functions p_x, p_y, p_z at the point p.
    pub fn variables(p: &Vector3<f64>) -> [Dual; 3] {
        [
            Dual { v: p.x, g: Vector3::x() },
            Dual { v: p.y, g: Vector3::y() },
            Dual { v: p.z, g: Vector3::z() },
        ]
    }

    pub fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        Self { v: r, g: self.g * (0.5 / r) }
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        Self { v: r, g: self.g * (-r * r) }
    }
}

pub fn dot(a: &[Dual; 3], b: &[Dual; 3]) -> Dual {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn dot_const(a: &[Dual; 3], b: &Vector3<f64>) -> Dual {
    a[0] * b.x + a[1] * b.y + a[2] * b.z
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, g: self.g + o.g }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, g: self.g - o.g }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual { v: self.v * o.v, g: self.g * o.v + o.g * self.v }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        self * o.recip()
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { v: -self.v, g: -self.g }
    }
}

impl Add<f64> for Dual {
    type Output = Dual;
    fn add(self, o: f64) -> Dual {
        Dual { v: self.v + o, g: self.g }
    }
}

impl Sub<f64> for Dual {
    type Output = Dual;
    fn sub(self, o: f64) -> Dual {
        Dual { v: self.v - o, g: self.g }
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, o: f64) -> Dual {
        Dual { v: self.v * o, g: self.g * o }
    }
}

impl Div<f64> for Dual {
    type Output = Dual;
    fn div(self, o: f64) -> Dual {
        Dual { v: self.v / o, g: self.g / o }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn energy_gradient_is_velocity() {
        let p = Vector3::new(0.3, -1.2, 2.0);
        let m = 1.7;
        let v = Dual::variables(&p);
        let w = (dot(&v, &v) + m * m).sqrt();
        let expect = (p.norm_squared() + m * m).sqrt();
        assert_relative_eq!(w.v, expect, max_relative = 1e-15);
        assert!((w.g - p / expect).amax() < 1e-15);
    }

    #[test]
    fn quotient_rule() {
        let p = Vector3::new(0.5, 0.25, -1.0);
        let v = Dual::variables(&p);
        let f = v[0] / (v[1] * v[1] + 1.0);
        let d = 0.0625 + 1.0;
        assert_relative_eq!(f.g.x, 1.0 / d, max_relative = 1e-15);
        assert_relative_eq!(f.g.y, -0.5 * 2.0 * 0.25 / (d * d), max_relative = 1e-15);
        assert_eq!(f.g.z, 0.0);
    }
}
