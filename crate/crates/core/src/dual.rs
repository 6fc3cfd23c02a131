//! Second-order forward-mode differentiation numbers.
//!
//! `Dual2<N>` carries a value, an N-gradient and a full N×N Hessian through
//! arithmetic, so any composite scalar built from the supported operations
//! yields machine-precision first and second derivatives with respect to the
//! seeded variables.  This removes hand-derived chain rules from the contact
//! kinematics, where gap and angle quantities are smooth but deeply nested
//! functions of 24 element dofs plus curve parameters.
//!
//! The cost of one multiplication is O(N²); callers keep N as small as the
//! variable set allows and only evaluate where second derivatives are
//! actually needed.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Value + gradient + Hessian with respect to `N` seeded variables.
#[derive(Debug, Clone, Copy)]
pub struct Dual2<const N: usize> {
    pub v: f64,
    pub g: [f64; N],
    pub h: [[f64; N]; N],
}

impl<const N: usize> Dual2<N> {
    pub const fn constant(v: f64) -> Self {
        Self {
            v,
            g: [0.0; N],
            h: [[0.0; N]; N],
        }
    }

    /// Seed variable `index` with value `v` (unit gradient entry).
    pub fn variable(v: f64, index: usize) -> Self {
        let mut d = Self::constant(v);
        d.g[index] = 1.0;
        d
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.v
    }

    /// Apply a scalar function given f(v), f′(v), f″(v).
    #[inline]
    fn lift(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Self::constant(f0);
        for i in 0..N {
            out.g[i] = f1 * self.g[i];
        }
        for i in 0..N {
            for j in 0..N {
                out.h[i][j] = f1 * self.h[i][j] + f2 * self.g[i] * self.g[j];
            }
        }
        out
    }

    pub fn sqrt(&self) -> Self {
        let r = self.v.sqrt();
        self.lift(r, 0.5 / r, -0.25 / (r * self.v))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.lift(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.lift(c, -s, -c)
    }

    pub fn recip(&self) -> Self {
        let inv = 1.0 / self.v;
        self.lift(inv, -inv * inv, 2.0 * inv * inv * inv)
    }

    pub fn square(&self) -> Self {
        *self * *self
    }

    pub fn powi(&self, n: i32) -> Self {
        let f0 = self.v.powi(n);
        let f1 = f64::from(n) * self.v.powi(n - 1);
        let f2 = f64::from(n) * f64::from(n - 1) * self.v.powi(n - 2);
        self.lift(f0, f1, f2)
    }
}

impl<const N: usize> Add for Dual2<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.v += rhs.v;
        for i in 0..N {
            self.g[i] += rhs.g[i];
        }
        for i in 0..N {
            for j in 0..N {
                self.h[i][j] += rhs.h[i][j];
            }
        }
        self
    }
}

impl<const N: usize> AddAssign for Dual2<N> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const N: usize> Sub for Dual2<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.v -= rhs.v;
        for i in 0..N {
            self.g[i] -= rhs.g[i];
        }
        for i in 0..N {
            for j in 0..N {
                self.h[i][j] -= rhs.h[i][j];
            }
        }
        self
    }
}

impl<const N: usize> SubAssign for Dual2<N> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<const N: usize> Neg for Dual2<N> {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.v = -self.v;
        for i in 0..N {
            self.g[i] = -self.g[i];
        }
        for i in 0..N {
            for j in 0..N {
                self.h[i][j] = -self.h[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Mul for Dual2<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::constant(self.v * rhs.v);
        for i in 0..N {
            out.g[i] = self.g[i] * rhs.v + self.v * rhs.g[i];
        }
        for i in 0..N {
            for j in 0..N {
                out.h[i][j] = self.h[i][j] * rhs.v
                    + self.v * rhs.h[i][j]
                    + self.g[i] * rhs.g[j]
                    + self.g[j] * rhs.g[i];
            }
        }
        out
    }
}

impl<const N: usize> Div for Dual2<N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<const N: usize> Add<f64> for Dual2<N> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.v += rhs;
        self
    }
}

impl<const N: usize> Sub<f64> for Dual2<N> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.v -= rhs;
        self
    }
}

impl<const N: usize> Mul<f64> for Dual2<N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        self.v *= rhs;
        for i in 0..N {
            self.g[i] *= rhs;
        }
        for i in 0..N {
            for j in 0..N {
                self.h[i][j] *= rhs;
            }
        }
        self
    }
}

impl<const N: usize> Mul<Dual2<N>> for f64 {
    type Output = Dual2<N>;
    fn mul(self, rhs: Dual2<N>) -> Dual2<N> {
        rhs * self
    }
}

impl<const N: usize> Div<f64> for Dual2<N> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self * (1.0 / rhs)
    }
}

/// Three-vector of dual numbers.
#[derive(Debug, Clone, Copy)]
pub struct DualVec3<const N: usize>(pub [Dual2<N>; 3]);

impl<const N: usize> DualVec3<N> {
    pub fn constant(v: crate::Vec3) -> Self {
        Self([
            Dual2::constant(v[0]),
            Dual2::constant(v[1]),
            Dual2::constant(v[2]),
        ])
    }

    /// Seed components as variables `first`, `first+1`, `first+2`.
    pub fn variables(v: crate::Vec3, first: usize) -> Self {
        Self([
            Dual2::variable(v[0], first),
            Dual2::variable(v[1], first + 1),
            Dual2::variable(v[2], first + 2),
        ])
    }

    pub fn value(&self) -> crate::Vec3 {
        crate::Vec3::new(self.0[0].v, self.0[1].v, self.0[2].v)
    }

    pub fn dot(&self, o: &Self) -> Dual2<N> {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(&self, o: &Self) -> Self {
        Self([
            self.0[1] * o.0[2] - self.0[2] * o.0[1],
            self.0[2] * o.0[0] - self.0[0] * o.0[2],
            self.0[0] * o.0[1] - self.0[1] * o.0[0],
        ])
    }

    pub fn norm_squared(&self) -> Dual2<N> {
        self.dot(self)
    }

    pub fn norm(&self) -> Dual2<N> {
        self.norm_squared().sqrt()
    }

    pub fn scale(&self, s: Dual2<N>) -> Self {
        Self([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl<const N: usize> Add for DualVec3<N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<const N: usize> Sub for DualVec3<N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// f(x) = x₀·sin(x₁) + ‖x‖ + x₀²/x₂ exercises mul, div, sqrt, sin.
    fn sample<const N: usize>(x: [Dual2<N>; 3]) -> Dual2<N> {
        let v = DualVec3([x[0], x[1], x[2]]);
        x[0] * x[1].sin() + v.norm() + x[0].square() / x[2]
    }

    fn sample_f64(x: [f64; 3]) -> f64 {
        x[0] * x[1].sin() + (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
            + x[0] * x[0] / x[2]
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let x0 = [0.7, -0.4, 1.3];
        let seeded = [
            Dual2::<3>::variable(x0[0], 0),
            Dual2::<3>::variable(x0[1], 1),
            Dual2::<3>::variable(x0[2], 2),
        ];
        let d = sample(seeded);
        assert!((d.v - sample_f64(x0)).abs() < 1e-14);

        let h = 1e-5;
        for i in 0..3 {
            let mut xp = x0;
            let mut xm = x0;
            xp[i] += h;
            xm[i] -= h;
            let fd = (sample_f64(xp) - sample_f64(xm)) / (2.0 * h);
            assert!(
                (fd - d.g[i]).abs() < 1e-8,
                "gradient {i}: fd={fd} ad={}",
                d.g[i]
            );
        }
        for i in 0..3 {
            for j in 0..3 {
                let mut xpp = x0;
                let mut xpm = x0;
                let mut xmp = x0;
                let mut xmm = x0;
                xpp[i] += h;
                xpp[j] += h;
                xpm[i] += h;
                xpm[j] -= h;
                xmp[i] -= h;
                xmp[j] += h;
                xmm[i] -= h;
                xmm[j] -= h;
                let fd = (sample_f64(xpp) - sample_f64(xpm) - sample_f64(xmp)
                    + sample_f64(xmm))
                    / (4.0 * h * h);
                assert!(
                    (fd - d.h[i][j]).abs() < 2e-5,
                    "hessian ({i},{j}): fd={fd} ad={}",
                    d.h[i][j]
                );
                assert!((d.h[i][j] - d.h[j][i]).abs() < 1e-14, "hessian symmetry");
            }
        }
    }

    #[test]
    fn cross_product_derivatives() {
        // c(x) = (a(x) × b(x))·e₃ with a = (x₀, x₁, 0), b = (x₂, x₀, x₁):
        // value x₀·x₀ − x₁·x₂ has known gradient and Hessian.
        let x = [1.2, -0.3, 0.8];
        let a = DualVec3([
            Dual2::<3>::variable(x[0], 0),
            Dual2::variable(x[1], 1),
            Dual2::constant(0.0),
        ]);
        let b = DualVec3([
            Dual2::variable(x[2], 2),
            Dual2::variable(x[0], 0),
            Dual2::variable(x[1], 1),
        ]);
        let c = a.cross(&b).0[2];
        assert!((c.v - (x[0] * x[0] - x[1] * x[2])).abs() < 1e-14);
        assert!((c.g[0] - 2.0 * x[0]).abs() < 1e-14);
        assert!((c.g[1] + x[2]).abs() < 1e-14);
        assert!((c.g[2] + x[1]).abs() < 1e-14);
        assert!((c.h[0][0] - 2.0).abs() < 1e-14);
        assert!((c.h[1][2] + 1.0).abs() < 1e-14);
        assert!(c.h[1][1].abs() < 1e-14);
    }

    #[test]
    fn powi_matches_repeated_multiplication() {
        let x = Dual2::<1>::variable(1.7, 0);
        let a = x.powi(4);
        let b = x * x * x * x;
        assert!((a.v - b.v).abs() < 1e-12);
        assert!((a.g[0] - b.g[0]).abs() < 1e-11);
        assert!((a.h[0][0] - b.h[0][0]).abs() < 1e-11);
    }

    #[test]
    fn constants_carry_no_derivatives() {
        let c = Dual2::<2>::constant(3.5);
        let x = Dual2::<2>::variable(2.0, 0);
        let y = c * x + c;
        assert!((y.v - 10.5).abs() < 1e-14);
        assert!((y.g[0] - 3.5).abs() < 1e-14);
        assert!(y.g[1].abs() == 0.0);
        assert!(y.h[0][0].abs() == 0.0);
    }
}
