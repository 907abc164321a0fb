//! Dense helpers for the small square complex matrices stored at each node.
//!
//! Matrices are row-major slices of length `n * n`.

use alloc::vec;
use alloc::vec::Vec;

use crate::C64;

pub fn identity(n: usize) -> Vec<C64> {
    let mut m = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        m[i * n + i] = C64::new(1.0, 0.0);
    }
    m
}

/// `out += scale * a * b`.
pub fn mul_acc(out: &mut [C64], a: &[C64], b: &[C64], n: usize, scale: C64) {
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k] * scale;
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
}

pub fn mul(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    mul_acc(&mut out, a, b, n, C64::new(1.0, 0.0));
    out
}

pub fn trace(a: &[C64], n: usize) -> C64 {
    (0..n).map(|i| a[i * n + i]).sum()
}

/// Block-diagonal sum of an `n`-matrix and an `m`-matrix.
pub fn direct_sum(a: &[C64], n: usize, b: &[C64], m: usize) -> Vec<C64> {
    let s = n + m;
    let mut out = vec![C64::new(0.0, 0.0); s * s];
    for i in 0..n {
        out[i * s..i * s + n].copy_from_slice(&a[i * n..i * n + n]);
    }
    for i in 0..m {
        out[(n + i) * s + n..(n + i) * s + s].copy_from_slice(&b[i * m..i * m + m]);
    }
    out
}

/// Kronecker product `a ⊗ b` with `a` the outer index.
pub fn kron(a: &[C64], n: usize, b: &[C64], m: usize) -> Vec<C64> {
    let s = n * m;
    let mut out = vec![C64::new(0.0, 0.0); s * s];
    for i in 0..n {
        for j in 0..n {
            let aij = a[i * n + j];
            for k in 0..m {
                for l in 0..m {
                    out[(i * m + k) * s + j * m + l] = aij * b[k * m + l];
                }
            }
        }
    }
    out
}

pub fn max_abs(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        assert_eq!(kron(&identity(2), 2, &identity(3), 3), identity(6));
    }

    #[test]
    fn direct_sum_trace_adds() {
        let a = [c(1.0), c(2.0), c(3.0), c(4.0)];
        let b = [c(7.0)];
        assert_eq!(trace(&direct_sum(&a, 2, &b, 1), 3), c(12.0));
    }

    #[test]
    fn mul_matches_hand_product() {
        let a = [c(1.0), c(2.0), c(3.0), c(4.0)];
        let b = [c(0.0), c(1.0), c(1.0), c(0.0)];
        assert_eq!(mul(&a, &b, 2), vec![c(2.0), c(1.0), c(4.0), c(3.0)]);
    }
}
