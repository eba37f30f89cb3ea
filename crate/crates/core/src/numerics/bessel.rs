//! Bessel functions of the first kind for integer order.
//!
//! Power series for small arguments, Miller's backward recurrence in the
//! intermediate range and the Hankel asymptotic expansion (orders 0 and 1,
//! then forward recurrence) for large arguments.

use alloc::vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// `J_n(x)` for any integer `n` and real `x`.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    if !x.is_finite() {
        return if x.is_nan() { f64::NAN } else { 0.0 };
    }
    let order = n.unsigned_abs();
    let mut sign = if n < 0 && order % 2 == 1 { -1.0 } else { 1.0 };
    if x < 0.0 && order % 2 == 1 {
        sign = -sign;
    }
    sign * j_nonneg(order, x.abs())
}

fn j_nonneg(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x < SERIES_LIMIT {
        return series(n, x);
    }
    if x < ASYMPTOTIC_LIMIT || (n as f64) >= x {
        return miller(n, x);
    }
    let j0 = hankel(0, x);
    if n == 0 {
        return j0;
    }
    let j1 = hankel(1, x);
    let (mut prev, mut cur) = (j0, j1);
    for k in 1..n {
        let next = 2.0 * k as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + n as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > half {
            break;
        }
        k += 1.0;
        if k > 500.0 {
            break;
        }
    }
    sum
}

fn miller(n: u32, x: f64) -> f64 {
    let top = (n as f64).max(x);
    let mut m = (top + 20.0 + (40.0 * top).sqrt()) as usize;
    m += m % 2;
    let mut values = vec![0.0; m + 2];
    values[m] = 1e-300;
    let mut jp1 = 0.0;
    let mut j = values[m];
    for k in (1..=m).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        values[k - 1] = j;
        if j.abs() > 1e250 {
            for v in values[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
            j *= 1e-250;
            jp1 *= 1e-250;
        }
    }
    let mut norm = values[0];
    let mut k = 2;
    while k <= m {
        norm += 2.0 * values[k];
        k += 2;
    }
    values[n as usize] / norm
}

fn hankel(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= last || next == 0.0 {
            break;
        }
        last = next.abs();
        term = next;
        // Signs follow the pattern +t0, +t1, -t2, -t3, +t4, +t5, ...
        let s = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += s * term;
        } else {
            p += s * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
