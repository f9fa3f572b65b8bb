//! Roots of real polynomials via a balanced companion matrix and Francis double-shift QR,
//! followed by cluster polishing for multiple roots.

use num_complex::Complex64;

use crate::error::{QdetError, Result};

const CLUSTER_RADIUS: f64 = 1e-3;
const CLUSTER_ACCEPT: f64 = 1e-9;
const MAX_QR_ITERS: usize = 60;

/// All `d` complex roots of `Σ coeffs[k] λ^{d−k}` (highest degree first, `coeffs[0] != 0`).
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let lead = *coeffs.first().ok_or_else(|| QdetError::InvalidInput("empty polynomial".into()))?;
    if lead == 0.0 || !coeffs.iter().all(|c| c.is_finite()) {
        return Err(QdetError::InvalidInput("leading coefficient must be finite and nonzero".into()));
    }
    let d = coeffs.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();

    // substitute λ = s z so the roots of the working polynomial are O(1)
    let s = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.abs().powf(1.0 / k as f64))
        .fold(0.0, f64::max);
    let s = if s > 0.0 { s } else { 1.0 };
    let mut work: Vec<f64> = monic.iter().enumerate().map(|(k, c)| c / s.powi(k as i32)).collect();

    let mut zeros = 0;
    let norm = work.iter().map(|c| c.abs()).fold(0.0, f64::max);
    while work.len() > 1 && work.last().unwrap().abs() <= 1e-14 * norm {
        work.pop();
        zeros += 1;
    }

    let mut raw = companion_eigenvalues(&work)?;
    raw.iter_mut().for_each(|z| *z *= s);
    raw.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(zeros));

    let polished = polish_clusters(&monic, raw);
    for z in &polished {
        let resid = horner(&monic, *z).norm();
        let bound = 1e-6 * abs_scale(&monic, z.norm()).max(1.0);
        if !(resid <= bound) {
            return Err(QdetError::RootFindingFailed { residual: resid, bound });
        }
    }
    Ok(polished)
}

fn companion_eigenvalues(monic: &[f64]) -> Result<Vec<Complex64>> {
    let d = monic.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    if d == 1 {
        return Ok(vec![Complex64::new(-monic[1], 0.0)]);
    }
    let mut a = vec![vec![0.0; d]; d];
    for j in 0..d {
        a[0][j] = -monic[j + 1];
    }
    for i in 1..d {
        a[i][i - 1] = 1.0;
    }
    balance(&mut a);
    hqr(a)
}

/// Diagonal similarity that equalizes row and column norms (radix-2 scaling).
fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix (Francis double-shift QR).
fn hqr(mut a: Vec<Vec<f64>>) -> Result<Vec<Complex64>> {
    let n = a.len() as isize;
    let eps = f64::EPSILON;
    let mut wr = vec![Complex64::new(0.0, 0.0); n as usize];
    let mut anorm = 0.0;
    for i in 0..n as usize {
        for j in i.saturating_sub(1)..n as usize {
            anorm += a[i][j].abs();
        }
    }
    let at = |i: isize| i as usize;
    let mut nn: isize = n - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l > 0 {
                let mut s = a[at(l - 1)][at(l - 1)].abs() + a[at(l)][at(l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[at(l)][at(l - 1)].abs() <= eps * s {
                    a[at(l)][at(l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[at(nn)][at(nn)];
            if l == nn {
                wr[at(nn)] = Complex64::new(x + t, 0.0);
                nn -= 1;
            } else {
                let mut y = a[at(nn - 1)][at(nn - 1)];
                let mut w = a[at(nn)][at(nn - 1)] * a[at(nn - 1)][at(nn)];
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + z.copysign(p);
                        wr[at(nn - 1)] = Complex64::new(x + z, 0.0);
                        wr[at(nn)] = wr[at(nn - 1)];
                        if z != 0.0 {
                            wr[at(nn)] = Complex64::new(x - w / z, 0.0);
                        }
                    } else {
                        wr[at(nn)] = Complex64::new(x + p, -z);
                        wr[at(nn - 1)] = wr[at(nn)].conj();
                    }
                    nn -= 2;
                } else {
                    if its == MAX_QR_ITERS {
                        return Err(QdetError::RootFindingFailed { residual: f64::INFINITY, bound: 0.0 });
                    }
                    if its % 10 == 0 && its > 0 {
                        // exceptional shift
                        t += x;
                        for i in 0..=at(nn) {
                            a[i][i] -= x;
                        }
                        let s = a[at(nn)][at(nn - 1)].abs() + a[at(nn - 1)][at(nn - 2)].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let (mut p, mut q, mut r);
                    let mut m = nn - 2;
                    loop {
                        let z = a[at(m)][at(m)];
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - w) / a[at(m + 1)][at(m)] + a[at(m)][at(m + 1)];
                        q = a[at(m + 1)][at(m + 1)] - z - rr - ss;
                        r = a[at(m + 2)][at(m + 1)];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[at(m)][at(m - 1)].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[at(m - 1)][at(m - 1)].abs() + z.abs() + a[at(m + 1)][at(m + 1)].abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nn - 1 {
                        a[at(i + 2)][at(i)] = 0.0;
                        if i != m {
                            a[at(i + 2)][at(i - 1)] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = a[at(k)][at(k - 1)];
                            q = a[at(k + 1)][at(k - 1)];
                            r = 0.0;
                            if k + 1 != nn {
                                r = a[at(k + 2)][at(k - 1)];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = (p * p + q * q + r * r).sqrt().copysign(p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[at(k)][at(k - 1)] = -a[at(k)][at(k - 1)];
                                }
                            } else {
                                a[at(k)][at(k - 1)] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            let z = r / s;
                            q /= p;
                            r /= p;
                            for j in at(k)..=at(nn) {
                                p = a[at(k)][j] + q * a[at(k + 1)][j];
                                if k + 1 != nn {
                                    p += r * a[at(k + 2)][j];
                                    a[at(k + 2)][j] -= p * z;
                                }
                                a[at(k + 1)][j] -= p * y;
                                a[at(k)][j] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in at(l)..=at(mmin) {
                                p = x * a[i][at(k)] + y * a[i][at(k + 1)];
                                if k + 1 != nn {
                                    p += z * a[i][at(k + 2)];
                                    a[i][at(k + 2)] -= p * r;
                                }
                                a[i][at(k + 1)] -= p * q;
                                a[i][at(k)] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l + 1 >= nn {
                break;
            }
        }
    }
    Ok(wr)
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `Σ |a_j| r^{d−j}`, the natural size of `p(z)` for `|z| = r`.
fn abs_scale(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * r + c.abs())
}

/// Taylor coefficients `T_0..T_{count−1}` of `p` at `z` (`T_k = p^{(k)}(z)/k!`).
fn taylor(coeffs: &[f64], z: Complex64, count: usize) -> Vec<Complex64> {
    let mut work: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        if work.is_empty() {
            out.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut quotient = Vec::with_capacity(work.len().saturating_sub(1));
        for (i, &c) in work.iter().enumerate() {
            acc = acc * z + c;
            if i + 1 < work.len() {
                quotient.push(acc);
            }
        }
        out.push(acc);
        work = quotient;
    }
    out
}

fn taylor_abs(coeffs: &[f64], r: f64, count: usize) -> Vec<f64> {
    let abs: Vec<f64> = coeffs.iter().map(|c| c.abs()).collect();
    taylor(&abs, Complex64::new(r, 0.0), count).into_iter().map(|c| c.re).collect()
}

fn newton(coeffs: &[f64], mut z: Complex64, order: usize) -> Complex64 {
    // Newton on p^{(order−1)}; step T_{m−1}/(m T_m)
    for _ in 0..50 {
        let t = taylor(coeffs, z, order + 1);
        let denom = t[order] * order as f64;
        if denom.norm() == 0.0 {
            break;
        }
        let step = t[order - 1] / denom;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1e-300) {
            break;
        }
    }
    z
}

fn snap_real(z: Complex64) -> Complex64 {
    if z.im.abs() <= 1e-9 * z.norm().max(1.0) {
        Complex64::new(z.re, 0.0)
    } else {
        z
    }
}

fn polish_clusters(coeffs: &[f64], raw: Vec<Complex64>) -> Vec<Complex64> {
    let mut used = vec![false; raw.len()];
    let mut out = Vec::with_capacity(raw.len());
    for i in 0..raw.len() {
        if used[i] {
            continue;
        }
        let seed = raw[i];
        let radius = CLUSTER_RADIUS * seed.norm().max(1.0);
        let members: Vec<usize> =
            (i..raw.len()).filter(|&j| !used[j] && (raw[j] - seed).norm() <= radius).collect();
        let m = members.len();
        let center = members.iter().map(|&j| raw[j]).sum::<Complex64>() / m as f64;
        let mut accepted = false;
        if m > 1 {
            let c = newton(coeffs, center, m);
            let t = taylor(coeffs, c, m);
            let sc = taylor_abs(coeffs, c.norm(), m);
            if t.iter().zip(&sc).all(|(tk, s)| tk.norm() <= CLUSTER_ACCEPT * s.max(1.0)) {
                let c = snap_real(c);
                out.extend(std::iter::repeat(c).take(m));
                accepted = true;
            }
        }
        if accepted {
            for &j in &members {
                used[j] = true;
            }
        } else {
            used[i] = true;
            out.push(snap_real(newton(coeffs, seed, 1)));
        }
    }
    out
}
