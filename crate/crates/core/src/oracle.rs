//! Spectral ground truth for the criteria.
//!
//! Roots are found by Aberth–Ehrlich simultaneous iteration with Newton
//! polishing. This path shares nothing with the trace and Gramian
//! computations it is used to check.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mech::{circulatory_reduced_polynomial, gyro_reduced_polynomial};
use crate::mech::{CirculatorySystem, GyroscopicSystem};
use crate::polycrit::{CriterionVerdict, MonicPolynomial};

pub const MAX_SWEEPS: usize = 200;
pub const POLISH_STEPS: usize = 4;

/// Largest accepted scaled residual `|Q(z)| / Σ|a_k||z|^{n−k}`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// A root is non-real when `|Im z| > NONREAL_TOL · max(1, |z|)`.
pub const NONREAL_TOL: f64 = 1e-7;

/// A root is in the right half-plane when `Re z > POSITIVE_REAL_TOL · max(1, |z|)`.
pub const POSITIVE_REAL_TOL: f64 = 1e-8;

const STEP_TOL: f64 = 4.0 * f64::EPSILON;

pub const METHOD: &str = "aberth-ehrlich+newton";

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// Scaled residual of each root.
    pub residuals: Vec<f64>,
    pub method: &'static str,
}

impl RootSet {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Value and derivative of `z^n + a₁z^{n−1} + … + a_n` by Horner's rule.
fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(1.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in coeffs {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn scaled_residual(coeffs: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    let (p, _) = eval_with_derivative(coeffs, z);
    let magnitude = coeffs.iter().fold(1.0, |acc, a| acc * r + a.abs());
    if magnitude == 0.0 {
        0.0
    } else {
        p.norm() / magnitude
    }
}

fn initial_guesses(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let radius = coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| a.abs().powf(1.0 / (j + 1) as f64))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let center = -coeffs[0] / n as f64;
    (0..n)
        .map(|j| {
            let angle = TAU * j as f64 / n as f64 + 0.4;
            let r = radius * (1.0 + 0.05 * j as f64 / n as f64);
            Complex64::new(center, 0.0) + Complex64::from_polar(r, angle)
        })
        .collect()
}

fn aberth(coeffs: &[f64]) -> Vec<Complex64> {
    let mut z = initial_guesses(coeffs);
    let n = z.len();
    for _ in 0..MAX_SWEEPS {
        let mut largest_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval_with_derivative(coeffs, z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                continue;
            }
            z[i] -= step;
            largest_step = largest_step.max(step.norm() / z[i].norm().max(1.0));
        }
        if largest_step <= STEP_TOL {
            break;
        }
    }
    z
}

fn polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    let mut best = scaled_residual(coeffs, z);
    for _ in 0..POLISH_STEPS {
        let (p, dp) = eval_with_derivative(coeffs, z);
        let candidate = z - p / dp;
        if !candidate.is_finite() {
            break;
        }
        let r = scaled_residual(coeffs, candidate);
        if r >= best {
            break;
        }
        z = candidate;
        best = r;
    }
    z
}

/// All complex roots of a monic real polynomial.
pub fn find_roots(poly: &MonicPolynomial) -> Result<RootSet> {
    let mut coeffs = poly.coeffs();
    let mut roots = Vec::with_capacity(coeffs.len());
    // exact zero roots
    while let Some((&0.0, rest)) = coeffs.split_last() {
        roots.push(Complex64::new(0.0, 0.0));
        coeffs = rest;
    }
    match coeffs.len() {
        0 => {}
        1 => roots.push(Complex64::new(-coeffs[0], 0.0)),
        _ => roots.extend(aberth(coeffs).into_iter().map(|z| polish(coeffs, z))),
    }

    let full = poly.coeffs();
    let residuals: Vec<f64> = roots.iter().map(|&z| scaled_residual(full, z)).collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if worst > RESIDUAL_TOL || !worst.is_finite() {
        return Err(Error::Convergence {
            sweeps: MAX_SWEEPS,
            residual: worst,
            best: roots,
        });
    }
    Ok(RootSet {
        roots,
        residuals,
        method: METHOD,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub has_nonreal: bool,
    pub has_positive_real: bool,
    pub nonreal_witnesses: Vec<Complex64>,
    pub positive_real_witnesses: Vec<Complex64>,
}

pub fn is_nonreal(z: Complex64) -> bool {
    z.im.abs() > NONREAL_TOL * z.norm().max(1.0)
}

pub fn has_positive_real_part(z: Complex64) -> bool {
    z.re > POSITIVE_REAL_TOL * z.norm().max(1.0)
}

pub fn classify_roots(roots: &[Complex64]) -> SpectralReport {
    let nonreal_witnesses: Vec<_> = roots.iter().copied().filter(|&z| is_nonreal(z)).collect();
    let positive_real_witnesses: Vec<_> = roots
        .iter()
        .copied()
        .filter(|&z| has_positive_real_part(z))
        .collect();
    SpectralReport {
        has_nonreal: !nonreal_witnesses.is_empty(),
        has_positive_real: !positive_real_witnesses.is_empty(),
        nonreal_witnesses,
        positive_real_witnesses,
    }
}

pub fn classify_spectrum(rs: &RootSet) -> SpectralReport {
    classify_roots(&rs.roots)
}

/// Systems whose characteristic polynomial is even in `λ`, `P(λ) = Q(λ²)`.
pub trait EvenPencil {
    fn reduced_polynomial(&self) -> Result<MonicPolynomial>;
}

impl EvenPencil for CirculatorySystem {
    fn reduced_polynomial(&self) -> Result<MonicPolynomial> {
        circulatory_reduced_polynomial(self)
    }
}

impl EvenPencil for GyroscopicSystem {
    fn reduced_polynomial(&self) -> Result<MonicPolynomial> {
        gyro_reduced_polynomial(self)
    }
}

/// Spectra of `Q(α)` and of `P(λ)` for one system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpectrum {
    pub reduced_roots: RootSet,
    /// Classification of the `α` roots of `Q`.
    pub reduced: SpectralReport,
    /// `±√α` for every root `α`.
    pub lambda_roots: Vec<Complex64>,
    /// Classification of the `λ` roots of `P`.
    pub lambda: SpectralReport,
}

impl SystemSpectrum {
    pub fn unstable(&self) -> bool {
        self.lambda.has_positive_real
    }
}

pub fn verify_instability<S: EvenPencil + ?Sized>(sys: &S) -> Result<SystemSpectrum> {
    let q = sys.reduced_polynomial()?;
    let reduced_roots = find_roots(&q)?;
    let lambda_roots: Vec<Complex64> = reduced_roots
        .roots
        .iter()
        .flat_map(|a| {
            let r = a.sqrt();
            [r, -r]
        })
        .collect();
    Ok(SystemSpectrum {
        reduced: classify_spectrum(&reduced_roots),
        lambda: classify_roots(&lambda_roots),
        reduced_roots,
        lambda_roots,
    })
}

/// What a fired verdict claims about the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Context {
    /// Polynomial criteria: a non-real root.
    Poly,
    /// Matrix criteria: a non-real eigenvalue.
    Matrix,
    /// Circulatory criteria: a characteristic root with `Re λ > 0`.
    Circulatory,
    /// Gyroscopic criteria: a characteristic root with `Re λ > 0`.
    Gyroscopic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub violations: Vec<String>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Flags every fired verdict whose spectral claim the report does not back.
/// Non-fired verdicts claim nothing.
pub fn check_sufficiency(
    verdicts: &[CriterionVerdict],
    report: &SpectralReport,
    context: Context,
) -> ConsistencyReport {
    let (holds, claim) = match context {
        Context::Poly | Context::Matrix => (report.has_nonreal, "a non-real root"),
        Context::Circulatory | Context::Gyroscopic => {
            (report.has_positive_real, "a root with positive real part")
        }
    };
    let violations = verdicts
        .iter()
        .filter(|v| v.fired && !holds)
        .map(|v| {
            format!(
                "{} fired (margin {:e}) but the spectrum has no {claim}",
                v.id, v.margin
            )
        })
        .collect();
    ConsistencyReport { violations }
}
