#![allow(dead_code)]

use gramstab::{CirculatorySystem, GyroscopicSystem, MonicPolynomial, RealSquareMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..=1.0))
}

/// Symmetric matrix with entries uniform in [−1, 1].
pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> RealSquareMatrix {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.gen_range(-1.0..=1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    RealSquareMatrix::new(m).unwrap()
}

/// Skew-symmetric matrix with entries uniform in [−1, 1].
pub fn random_skew(rng: &mut impl Rng, n: usize) -> RealSquareMatrix {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = rng.gen_range(-1.0..=1.0);
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
    }
    RealSquareMatrix::new(m).unwrap()
}

pub fn random_circulatory(rng: &mut impl Rng, n: usize) -> CirculatorySystem {
    CirculatorySystem::new(random_symmetric(rng, n), random_skew(rng, n)).unwrap()
}

pub fn random_gyroscopic(rng: &mut impl Rng, n: usize) -> GyroscopicSystem {
    GyroscopicSystem::new(random_skew(rng, n), random_symmetric(rng, n)).unwrap()
}

/// Coefficients `a₁..aₙ` of `∏(α − r_i)` by repeated multiplication.
pub fn expand_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, &a) in c.iter().enumerate() {
            next[i] += a;
            next[i + 1] -= a * r;
        }
        c = next;
    }
    c.remove(0);
    c
}

pub fn poly_from_roots(roots: &[Complex64]) -> MonicPolynomial {
    MonicPolynomial::new(expand_roots(roots).iter().map(|a| a.re).collect()).unwrap()
}

pub fn real(roots: &[f64]) -> Vec<Complex64> {
    roots.iter().map(|&r| Complex64::new(r, 0.0)).collect()
}

/// `n` roots: random real ones and conjugate pairs inside `|z| ≤ radius`.
pub fn random_conjugate_closed(rng: &mut impl Rng, n: usize, radius: f64) -> Vec<Complex64> {
    let mut roots = Vec::with_capacity(n);
    while roots.len() < n {
        if roots.len() + 2 <= n && rng.gen_bool(0.5) {
            let re = rng.gen_range(-radius..=radius) * 0.7;
            let im = rng.gen_range(0.05..=radius * 0.7);
            roots.push(Complex64::new(re, im));
            roots.push(Complex64::new(re, -im));
        } else {
            roots.push(Complex64::new(rng.gen_range(-radius..=radius), 0.0));
        }
    }
    roots
}

// Closed-form region polynomials of the two example families.

pub fn circ_cond_i(k: f64, c: f64) -> f64 {
    3.0 * c * c - 3.0 * k * k - 1.0
}

pub fn circ_cond_ii(k: f64, c: f64) -> f64 {
    let d = c * c - k * k;
    -d * d + 14.0 * c * c - 2.0 * k * k - 1.0
}

pub fn circ_cond_iii(k: f64, c: f64) -> f64 {
    let (c2, k2) = (c * c, k * k);
    4.0 * c2.powi(3) - 4.0 * k2.powi(3) - 12.0 * c2 * k2 * (c2 - k2) + 8.0 * c2 * c2 - 3.0 * k2 * k2
        + 4.0 * c2 * k2
        + 4.0 * c2
}

/// Charged particle, second criterion fires iff this is negative.
pub fn charged_cond_ii(k: f64, c: f64) -> f64 {
    let c2 = c * c;
    c2.powi(3) + 4.0 * c2 * c2 * k + 10.0 * c2 * k * k + 6.0 * k.powi(3)
}

/// Charged particle, third criterion fires iff `k < 0` and this is positive.
pub fn charged_cond_iii(k: f64, c: f64) -> f64 {
    let c2 = c * c;
    2.0 * c2.powi(3) + 7.0 * c2 * c2 * k + 18.0 * c2 * k * k + 8.0 * k.powi(3)
}
