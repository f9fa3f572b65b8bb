//! Independent oracle arithmetic and the worked matrices shared by the integration tests.
#![allow(dead_code)]

use std::ops::{Add, Mul, Neg, Sub};

use qdets_core::{QMatrix, Quaternion};

/// Plain Hamilton arithmetic, kept separate from the library's quaternion type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct O(pub [f64; 4]);

pub const fn o(w: f64, x: f64, y: f64, z: f64) -> O {
    O([w, x, y, z])
}

pub const ONE: O = o(1.0, 0.0, 0.0, 0.0);
pub const I: O = o(0.0, 1.0, 0.0, 0.0);
pub const J: O = o(0.0, 0.0, 1.0, 0.0);
pub const K: O = o(0.0, 0.0, 0.0, 1.0);
pub const ZERO: O = o(0.0, 0.0, 0.0, 0.0);

impl Add for O {
    type Output = O;
    fn add(self, b: O) -> O {
        let a = self.0;
        O([a[0] + b.0[0], a[1] + b.0[1], a[2] + b.0[2], a[3] + b.0[3]])
    }
}

impl Sub for O {
    type Output = O;
    fn sub(self, b: O) -> O {
        self + (-b)
    }
}

impl Neg for O {
    type Output = O;
    fn neg(self) -> O {
        self.s(-1.0)
    }
}

impl Mul for O {
    type Output = O;
    fn mul(self, b: O) -> O {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = b.0;
        O([
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ])
    }
}

impl Mul<f64> for O {
    type Output = O;
    fn mul(self, k: f64) -> O {
        self.s(k)
    }
}

impl O {
    pub fn s(self, k: f64) -> O {
        O(self.0.map(|c| c * k))
    }

    pub fn norm(self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn inv(self) -> O {
        let n2 = self.norm().powi(2);
        O([self.0[0] / n2, -self.0[1] / n2, -self.0[2] / n2, -self.0[3] / n2])
    }

    /// Integer power by repeated multiplication; negative powers invert.
    pub fn pow(self, n: i32) -> O {
        let base = if n < 0 { self.inv() } else { self };
        (0..n.unsigned_abs()).fold(ONE, |acc, _| acc * base)
    }

    pub fn exp(self) -> O {
        let [w, x, y, z] = self.0;
        let v = (x * x + y * y + z * z).sqrt();
        let e = w.exp();
        if v == 0.0 {
            return o(e, 0.0, 0.0, 0.0);
        }
        let k = e * v.sin() / v;
        o(e * v.cos(), k * x, k * y, k * z)
    }

    pub fn ln(self) -> O {
        let [w, x, y, z] = self.0;
        let v = (x * x + y * y + z * z).sqrt();
        let theta = v.atan2(w);
        let k = if v == 0.0 { 0.0 } else { theta / v };
        o(self.norm().ln(), k * x, k * y, k * z)
    }

    pub fn q(self) -> Quaternion {
        Quaternion::new(self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl From<Quaternion> for O {
    fn from(q: Quaternion) -> O {
        o(q.w, q.x, q.y, q.z)
    }
}

/// `cos t + u sin t` for a unit imaginary `u`, i.e. `e^{u t}`.
pub fn e_axis(u: O, t: f64) -> O {
    ONE.s(t.cos()) + u.s(t.sin())
}

pub fn c(re: f64, im: f64) -> O {
    o(re, im, 0.0, 0.0)
}

pub fn mat(rows: &[&[O]]) -> QMatrix {
    let r: Vec<Vec<Quaternion>> = rows.iter().map(|row| row.iter().map(|x| x.q()).collect()).collect();
    let refs: Vec<&[Quaternion]> = r.iter().map(Vec::as_slice).collect();
    QMatrix::from_rows(&refs)
}

/// Largest absolute entrywise component difference.
pub fn diff(a: &QMatrix, b: &QMatrix) -> f64 {
    a.max_abs_diff(b)
}

/// `A = [[i, 1], [0, 1+i]]`: two distinct standard eigenvalues.
pub fn distinct_pair() -> QMatrix {
    mat(&[&[I, ONE], &[ZERO, ONE + I]])
}

/// `A = [[i, j], [0, i]]`: one repeated eigenvalue with two independent eigenvectors.
pub fn repeated_pair() -> QMatrix {
    mat(&[&[I, J], &[ZERO, I]])
}

/// `A = [[i, 1, 0], [0, j, 0], [0, 1, k]]`: not diagonalizable.
pub fn defective_3x3() -> QMatrix {
    mat(&[&[I, ONE, ZERO], &[ZERO, J, ZERO], &[ZERO, ONE, K]])
}

pub fn defective_3x3_alphas() -> Vec<Quaternion> {
    vec![Quaternion::I, -Quaternion::I, Quaternion::J]
}

/// `A = [[i, j, j], [k, 1, k], [0, 0, 1]]`.
pub fn mixed_3x3() -> QMatrix {
    mat(&[&[I, J, J], &[K, ONE, K], &[ZERO, ZERO, ONE]])
}

pub fn mixed_3x3_alphas() -> Vec<Quaternion> {
    vec![Quaternion::ONE, Quaternion::ZERO, Quaternion::new(1.0, 1.0, 0.0, 0.0), Quaternion::new(1.0, -1.0, 0.0, 0.0)]
}

/// Printed eigen fundamental matrix of the distinct pair on the integers.
pub fn distinct_pair_fundamental(t: i32) -> QMatrix {
    let (a, b) = (c(1.0, 1.0).pow(t), c(2.0, 1.0).pow(t));
    mat(&[&[a, b], &[ZERO, b]])
}

/// Printed eigen fundamental matrix of the repeated pair on the integers.
pub fn repeated_pair_fundamental(t: i32) -> QMatrix {
    let a = c(1.0, 1.0).pow(t);
    mat(&[&[a, K * a * 0.5], &[ZERO, a]])
}

/// Printed Putzer matrices `P_1`, `P_2` of the defective example.
pub fn defective_3x3_p() -> [QMatrix; 2] {
    [
        mat(&[&[ZERO, ONE, ZERO], &[ZERO, J - I, ZERO], &[ZERO, ONE, K - I]]),
        mat(&[&[ZERO, J + I, ZERO], &[ZERO, ZERO, ZERO], &[ZERO, J + K, ZERO]]),
    ]
}

/// Printed closed form of `Ψ(t, 0)` for the defective example on the reals.
pub fn defective_3x3_reals(t: f64) -> QMatrix {
    let (ei, ej, ek) = (e_axis(I, t), e_axis(J, t), e_axis(K, t));
    let emi = e_axis(-I, t);
    let s = t.sin();
    let m01 = (ei - K * emi).s(t / 2.0) + (ONE + K).s(0.5 * s);
    let m21 = (ej + I * ej).s(t / 2.0) + (ONE - I).s(0.5 * s);
    mat(&[&[ei, m01, ZERO], &[ZERO, ej, ZERO], &[ZERO, m21, ek]])
}

/// Printed closed form of `Ψ(t, 0)` for the defective example on the integers.
pub fn defective_3x3_integers_printed(t: i32) -> QMatrix {
    let p = c(1.0, 1.0).pow(t);
    let g1 = c(1.0, -1.0).pow(t) - p;
    let g2 = o(1.0, 1.0, -1.0, 1.0).pow(t - 1) - o(1.0, -1.0, -1.0, -1.0).pow(t - 1);
    let two = 2f64.powi(-t);
    let m01 = I * g1 * 0.5 + (ONE + I) * g2 * two - o(1.0, -1.0, 1.0, 1.0).s(0.5);
    let m11 = p + (ONE - K) * g1 * 0.5;
    let m21 = I * g1 * 0.5 + (I + K) * g2 * two - o(1.0, -1.0, -1.0, 1.0).s(0.5);
    let m22 = p + (ONE + J) * g1 * 0.5;
    mat(&[&[p, m01, ZERO], &[ZERO, m11, ZERO], &[ZERO, m21, m22]])
}

/// Printed third Putzer scalar `φ_3` for the defective example on the integers.
pub fn defective_3x3_phi3_printed(t: i32) -> O {
    let a = o(1.0, -1.0, -1.0, -1.0);
    let b = o(1.0, 1.0, -1.0, 1.0);
    let two = 2f64.powi(-t);
    (ONE - a.pow(t) * two) * b * 0.25 + (ONE - b.pow(t) * two) * o(-1.0, 1.0, 1.0, 1.0) * 0.25
}

/// Printed Putzer matrices `P_1..P_3` of the mixed example.
pub fn mixed_3x3_p() -> [QMatrix; 3] {
    [
        mat(&[&[I - ONE, J, J], &[K, ZERO, K], &[ZERO, ZERO, ZERO]]),
        mat(&[&[-ONE, K, I + K], &[J, -I, K - I], &[ZERO, ZERO, ZERO]]),
        mat(&[&[ZERO, J.s(-2.0), J.s(-2.0)], &[ZERO, ONE.s(-2.0), ONE.s(-2.0)], &[ZERO, ZERO, ZERO]]),
    ]
}

fn mixed_3x3_form(g1: O, g2: O, g4: O, growth: O) -> QMatrix {
    let g3 = o(-1.0, -1.0, -1.0, 1.0).s(0.5);
    let half = |x: O| x.s(0.5);
    mat(&[
        &[half(ONE - I) + half(ONE + I) * g1, half(K - J) + g2, J * g3 + g4 - growth],
        &[half(J - K) + half(K - J) * g1, half(ONE - I) - J * g2, I * g3 - J * g4 - (ONE - J - K) * growth],
        &[ZERO, ZERO, growth],
    ])
}

/// Printed closed form of `Ψ(t, 0)` for the mixed example on the integers.
pub fn mixed_3x3_integers(t: i32) -> QMatrix {
    let g1 = c(2.0, 1.0).pow(t);
    let g2 = half_jk() * c(2.0, -1.0).pow(t);
    let g4 = g1 * o(1.0, -1.0, 1.0, -1.0).s(0.5);
    mixed_3x3_form(g1, g2, g4, ONE.s(2f64.powi(t)))
}

/// Printed closed form of `Ψ(t, 0)` for the mixed example on the reals.
pub fn mixed_3x3_reals(t: f64) -> QMatrix {
    let g1 = e_axis(I, t).s(t.exp());
    let g2 = half_jk() * e_axis(-I, t).s(t.exp());
    let g4 = g1 * o(1.0, -1.0, 1.0, -1.0).s(0.5);
    mixed_3x3_form(g1, g2, g4, ONE.s(t.exp()))
}

fn half_jk() -> O {
    (J - K).s(0.5)
}

/// Printed solution of the forced diagonal system `A = diag(j, k)`, `f = (i, t j)`, `φ(0) = (j, k)`.
pub fn forced_solution(t: i32) -> [O; 2] {
    let pj = (ONE + J).pow(t);
    let pk = (ONE + K).pow(t);
    [J * pj + (pj - ONE) * K, K * pk + (ONE - pk + K.s(t as f64)) * J]
}
