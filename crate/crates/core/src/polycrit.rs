//! Polynomial-level criteria for a non-real root.
//!
//! For a monic `Q(α) = αⁿ + a₁αⁿ⁻¹ + … + aₙ` with roots `α₁..αₙ`, let
//! `v_i = (α₁ⁱ, …, αₙⁱ)`. The Gram matrix of any subset of the `v_i`
//! under the (non-conjugated) bilinear product has entries
//! `⟨v_p, v_q⟩ = s_{p+q}`, the root power sums. If all roots are real the
//! Gram determinant is non-negative, so a negative one certifies a root
//! with non-zero imaginary part.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative width of the strictness band applied to every verdict.
pub const STRICTNESS: f64 = 1e-12;

/// Relative bound on the imaginary residue of a power sum of roots.
pub const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// Relative threshold below which a Gram determinant counts as a certificate.
pub const GRAM_TOL: f64 = 1e-10;

/// Default largest subset size searched by [`complex_root_certificate`].
pub const DEFAULT_GRAM_SIZE: usize = 3;

/// Monic real polynomial `αⁿ + a₁αⁿ⁻¹ + … + aₙ`, stored as `a₁..aₙ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPolynomial {
    coeffs: Vec<f64>,
}

impl MonicPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::input("polynomial degree must be at least 1"));
        }
        if let Some(i) = coeffs.iter().position(|a| !a.is_finite()) {
            return Err(Error::input(format!("coefficient a{} is not finite", i + 1)));
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `a₁..aₙ`; the leading 1 is implicit.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `a_k` for `k ≥ 1`, zero beyond the degree; `a₀ = 1`.
    pub fn coeff(&self, k: usize) -> f64 {
        match k {
            0 => 1.0,
            k if k <= self.coeffs.len() => self.coeffs[k - 1],
            _ => 0.0,
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &a| acc * z + a)
    }
}

/// Root power sums `s₁..s_max` of a polynomial with `n` roots (`s₀ = n`).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSums {
    n: usize,
    values: Vec<f64>,
}

impl PowerSums {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("power sums need at least one root"));
        }
        if values.is_empty() {
            return Err(Error::input("power sums need max ≥ 1"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("power sum overflowed to a non-finite value"));
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max(&self) -> usize {
        self.values.len()
    }

    /// `s₁..s_max`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `s_k`, with `s₀ = n` exactly. Panics if `k > max`.
    pub fn s(&self, k: usize) -> f64 {
        if k == 0 {
            self.n as f64
        } else {
            self.values[k - 1]
        }
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        (k <= self.max()).then(|| self.s(k))
    }
}

/// One evaluated strict inequality `lhs < rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionVerdict {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    pub fired: bool,
    pub tolerance: f64,
}

impl CriterionVerdict {
    /// Evaluates `lhs < rhs` with the relative strictness band.
    pub fn less_than(id: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let tolerance = STRICTNESS * 1f64.max(lhs.abs()).max(rhs.abs());
        let margin = rhs - lhs;
        Self {
            id: id.into(),
            lhs,
            rhs,
            margin,
            fired: margin > tolerance,
            tolerance,
        }
    }
}

/// Power sums `s₁..s_{max_k}` from the coefficients via Newton's identities.
pub fn newton_power_sums(poly: &MonicPolynomial, max_k: usize) -> Result<PowerSums> {
    if max_k == 0 {
        return Err(Error::input("max_k must be at least 1"));
    }
    let n = poly.degree();
    let a = poly.coeffs();
    let mut s: Vec<f64> = Vec::with_capacity(max_k);
    for k in 1..=max_k {
        // s_k = -(a₁s_{k-1} + … + a_{m}s_{k-m}) - k·a_k, last term only for k ≤ n
        let m = (k - 1).min(n);
        let mut acc: f64 = (1..=m).map(|j| a[j - 1] * s[k - j - 1]).sum();
        if k <= n {
            acc += k as f64 * a[k - 1];
        }
        s.push(-acc);
    }
    PowerSums::new(n, s)
}

/// Power sums computed directly from a root list. The imaginary residue of
/// each sum is returned alongside; a root list not closed under conjugation
/// is rejected.
pub fn power_sums_from_roots(roots: &[Complex64], max_k: usize) -> Result<(PowerSums, Vec<f64>)> {
    if roots.is_empty() {
        return Err(Error::input("root list is empty"));
    }
    if max_k == 0 {
        return Err(Error::input("max_k must be at least 1"));
    }
    let mut powers: Vec<Complex64> = roots.to_vec();
    let mut sums = Vec::with_capacity(max_k);
    let mut residues = Vec::with_capacity(max_k);
    for k in 1..=max_k {
        if k > 1 {
            for (p, r) in powers.iter_mut().zip(roots) {
                *p *= r;
            }
        }
        let sum: Complex64 = powers.iter().sum();
        let residue = sum.im.abs();
        if residue > IMAG_RESIDUE_TOL * 1f64.max(sum.norm()) {
            return Err(Error::consistency(format!(
                "power sum s{k} has imaginary residue {residue:e}; roots are not closed under conjugation"
            )));
        }
        sums.push(sum.re);
        residues.push(residue);
    }
    Ok((PowerSums::new(roots.len(), sums)?, residues))
}

fn gram_matrix(ps: &PowerSums, indices: &[usize]) -> Result<DMatrix<f64>> {
    if indices.is_empty() {
        return Err(Error::input("Gram index list is empty"));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("Gram indices must be strictly increasing"));
    }
    let top = 2 * indices[indices.len() - 1];
    if top > ps.max() {
        return Err(Error::input(format!(
            "Gram entry needs s{top} but only s1..s{} are available",
            ps.max()
        )));
    }
    let k = indices.len();
    Ok(DMatrix::from_fn(k, k, |p, q| ps.s(indices[p] + indices[q])))
}

/// `Gram(v_{i₁}, …, v_{i_k})`, the determinant of `[s_{i_p + i_q}]`.
pub fn gram_determinant(ps: &PowerSums, indices: &[usize]) -> Result<f64> {
    Ok(gram_matrix(ps, indices)?.lu().determinant())
}

/// The three two-vector Gramian criteria `n·s₂ < s₁²`, `n·s₄ < s₂²` and
/// `s₂·s₄ < s₃²`.
pub fn prop1_verdicts(ps: &PowerSums) -> Result<[CriterionVerdict; 3]> {
    if ps.max() < 4 {
        return Err(Error::input("prop1 needs power sums up to s4"));
    }
    let n = ps.n() as f64;
    let (s1, s2, s3, s4) = (ps.s(1), ps.s(2), ps.s(3), ps.s(4));
    Ok([
        CriterionVerdict::less_than("prop1-i", n * s2, s1 * s1),
        CriterionVerdict::less_than("prop1-ii", n * s4, s2 * s2),
        CriterionVerdict::less_than("prop1-iii", s2 * s4, s3 * s3),
    ])
}

/// The same three criteria written in the coefficients alone, with the
/// degree split `n = 2`, `n = 3`, `n ≥ 4`.
pub fn prop2_verdicts(poly: &MonicPolynomial) -> Result<[CriterionVerdict; 3]> {
    let n = poly.degree();
    if n < 2 {
        return Err(Error::input("prop2 needs degree at least 2"));
    }
    let nf = n as f64;
    let (a1, a2, a3, a4) = (poly.coeff(1), poly.coeff(2), poly.coeff(3), poly.coeff(4));

    let first = CriterionVerdict::less_than("prop2-i", nf * (a1 * a1 - 2.0 * a2), a1 * a1);

    let (second, third) = match n {
        2 => {
            let disc = a1 * a1 - 4.0 * a2;
            (
                CriterionVerdict::less_than("prop2-ii", a1 * a1 * disc, 0.0),
                CriterionVerdict::less_than("prop2-iii", a2 * a2 * disc, 0.0),
            )
        }
        3 => (
            CriterionVerdict::less_than(
                "prop2-ii",
                a1.powi(4) + 6.0 * a1 * a3 + a2 * a2,
                4.0 * a1 * a1 * a2,
            ),
            CriterionVerdict::less_than(
                "prop2-iii",
                a1 * a1 * a2 * a2 + 10.0 * a1 * a2 * a3,
                2.0 * a1.powi(3) * a3 + 4.0 * a2.powi(3) + 9.0 * a3 * a3,
            ),
        ),
        _ => {
            let s2 = a1 * a1 - 2.0 * a2;
            (
                CriterionVerdict::less_than(
                    "prop2-ii",
                    nf * (a1.powi(4) - 4.0 * a1 * a1 * a2 + 4.0 * a1 * a3 + 2.0 * a2 * a2 - 4.0 * a4),
                    s2 * s2,
                ),
                CriterionVerdict::less_than(
                    "prop2-iii",
                    a1 * a1 * a2 * a2 + 10.0 * a1 * a2 * a3 + 8.0 * a2 * a4,
                    2.0 * a1.powi(3) * a3 + 4.0 * a1 * a1 * a4 + 4.0 * a2.powi(3) + 9.0 * a3 * a3,
                ),
            )
        }
    };
    Ok([first, second, third])
}

/// A Gram determinant over a subset of root-power vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct GramCertificate {
    pub indices: Vec<usize>,
    pub value: f64,
    /// Threshold the value was compared against (`value < −tolerance`).
    pub tolerance: f64,
}

impl GramCertificate {
    pub fn is_certificate(&self) -> bool {
        self.value < -self.tolerance
    }

    /// The certificate as a verdict `Gram < 0`.
    pub fn to_verdict(&self) -> CriterionVerdict {
        let id = format!(
            "gram[{}]",
            self.indices
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        let margin = -self.value;
        CriterionVerdict {
            id,
            lhs: self.value,
            rhs: 0.0,
            margin,
            fired: self.is_certificate(),
            tolerance: self.tolerance,
        }
    }
}

/// Calls `f` on every strictly increasing `size`-subset of `0..n` in
/// lexicographic order until it returns `false`.
fn for_each_subset(n: usize, size: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if size == 0 || size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let mut i = size;
        while i > 0 && idx[i - 1] == n - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn subset_sizes(max_subset_size: usize) -> std::ops::RangeInclusive<usize> {
    // Single-vector Gramians s_{2i} < 0 already make Gram(v₀, v_i) negative,
    // so singletons are searched only when nothing larger is allowed.
    if max_subset_size == 1 {
        1..=1
    } else {
        2..=max_subset_size
    }
}

fn scan_grams(
    poly: &MonicPolynomial,
    max_subset_size: usize,
    mut visit: impl FnMut(GramCertificate) -> bool,
) -> Result<()> {
    let n = poly.degree();
    if max_subset_size == 0 || max_subset_size > n {
        return Err(Error::input(format!(
            "max_subset_size must lie in 1..={n}, got {max_subset_size}"
        )));
    }
    let ps = newton_power_sums(poly, (2 * (n - 1)).max(1))?;
    let mut result = Ok(());
    'sizes: for size in subset_sizes(max_subset_size) {
        let mut keep_going = true;
        for_each_subset(n, size, |indices| {
            let gram = match gram_matrix(&ps, indices) {
                Ok(g) => g,
                Err(e) => {
                    result = Err(e);
                    keep_going = false;
                    return false;
                }
            };
            let scale = gram.amax().max(1.0);
            let cert = GramCertificate {
                indices: indices.to_vec(),
                value: gram.lu().determinant(),
                tolerance: GRAM_TOL * scale.powi(size as i32),
            };
            keep_going = visit(cert);
            keep_going
        });
        if !keep_going {
            break 'sizes;
        }
    }
    result
}

/// Searches Gram determinants over index subsets of `0..n` by increasing
/// size, then lexicographically, and returns the first one below
/// `−tolerance`.
pub fn complex_root_certificate(
    poly: &MonicPolynomial,
    max_subset_size: usize,
) -> Result<Option<GramCertificate>> {
    let mut found = None;
    scan_grams(poly, max_subset_size, |cert| {
        if cert.is_certificate() {
            found = Some(cert);
            false
        } else {
            true
        }
    })?;
    Ok(found)
}

/// The smallest Gram determinant over the same search space (first in
/// search order on ties).
pub fn least_gram(poly: &MonicPolynomial, max_subset_size: usize) -> Result<GramCertificate> {
    let mut best: Option<GramCertificate> = None;
    scan_grams(poly, max_subset_size, |cert| {
        if best.as_ref().is_none_or(|b| cert.value < b.value) {
            best = Some(cert);
        }
        true
    })?;
    best.ok_or_else(|| Error::input("no Gram subsets to search"))
}
