//! Matrix-level criteria: symmetric/skew splitting, power sums of the
//! spectrum from traces, and characteristic polynomials.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::polycrit::{newton_power_sums, CriterionVerdict, MonicPolynomial, PowerSums};

/// Largest dimension accepted by [`char_poly`].
pub const CHAR_POLY_MAX_DIM: usize = 64;

/// Relative disagreement between the two trace routes that is reported as
/// a consistency failure.
pub const TRACE_ROUTE_TOL: f64 = 1e-6;

/// Relative tolerance of the Newton-identity check on characteristic
/// polynomial coefficients.
pub const CHAR_POLY_CHECK_TOL: f64 = 1e-8;

/// Dense real `n × n` matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSquareMatrix(DMatrix<f64>);

impl RealSquareMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::input(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::input("matrix dimension must be at least 1"));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("matrix has non-finite entries"));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::input(format!(
                "row of length {} in a matrix with {n} rows",
                r.len()
            )));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// `‖M‖²`, the sum of squared entries.
    pub fn frobenius_sq(&self) -> f64 {
        frobenius_sq(&self.0)
    }
}

pub(crate) fn frobenius_sq(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum()
}

/// `M = M_s + M_a` with `M_s` symmetric and `M_a` skew-symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymSkewSplit {
    pub sym: RealSquareMatrix,
    pub skew: RealSquareMatrix,
}

pub fn sym_skew_split(m: &RealSquareMatrix) -> SymSkewSplit {
    let a = m.as_dmatrix();
    let n = m.n();
    let sym = DMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)]) / 2.0);
    let skew = DMatrix::from_fn(n, n, |i, j| (a[(i, j)] - a[(j, i)]) / 2.0);
    SymSkewSplit {
        sym: RealSquareMatrix(sym),
        skew: RealSquareMatrix(skew),
    }
}

/// The norm/trace quantities of a split that all criteria are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SplitInvariants {
    /// `Tr(M_s)`
    pub tr_sym: f64,
    /// `‖M_s‖² − ‖M_a‖²`
    pub s2: f64,
    /// `Tr(M_s³) + 3 Tr(M_s M_a²)`
    pub s3: f64,
    /// `‖M_s²‖² + ‖M_a²‖² − 4‖M_s M_a‖² + 2 Tr((M_s M_a)²)`
    pub s4: f64,
}

impl SplitInvariants {
    pub fn of(sym: &DMatrix<f64>, skew: &DMatrix<f64>) -> Self {
        let sym2 = sym * sym;
        let skew2 = skew * skew;
        let mixed = sym * skew;
        Self {
            tr_sym: sym.trace(),
            s2: frobenius_sq(sym) - frobenius_sq(skew),
            s3: (&sym2 * sym).trace() + 3.0 * (sym * &skew2).trace(),
            s4: frobenius_sq(&sym2) + frobenius_sq(&skew2) - 4.0 * frobenius_sq(&mixed)
                + 2.0 * (&mixed * &mixed).trace(),
        }
    }
}

/// `s₁..s₄` of a matrix spectrum computed along two routes.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePowerSums {
    /// `Tr(Mᵏ)`, the primary values.
    pub direct: PowerSums,
    /// The same sums from the norms and traces of `M_s` and `M_a`.
    pub via_split: [f64; 4],
}

impl TracePowerSums {
    /// Largest disagreement between the routes, relative to `max(1, ‖M‖ᵏ)`.
    pub fn max_relative_gap(&self, frobenius: f64) -> f64 {
        (1..=4)
            .map(|k| {
                let scale = frobenius.powi(k as i32).max(1.0);
                (self.direct.s(k) - self.via_split[k - 1]).abs() / scale
            })
            .fold(0.0, f64::max)
    }
}

pub fn trace_power_sums(m: &RealSquareMatrix) -> Result<TracePowerSums> {
    let a = m.as_dmatrix();
    let a2 = a * a;
    let a3 = &a2 * a;
    let direct = PowerSums::new(
        m.n(),
        vec![a.trace(), a2.trace(), a3.trace(), (&a2 * &a2).trace()],
    )?;

    let split = sym_skew_split(m);
    let inv = SplitInvariants::of(split.sym.as_dmatrix(), split.skew.as_dmatrix());
    let out = TracePowerSums {
        direct,
        via_split: [inv.tr_sym, inv.s2, inv.s3, inv.s4],
    };
    let gap = out.max_relative_gap(m.frobenius_sq().sqrt());
    if gap > TRACE_ROUTE_TOL {
        return Err(Error::consistency(format!(
            "trace power sums disagree with the symmetric/skew identities (relative gap {gap:e})"
        )));
    }
    Ok(out)
}

/// Criteria for a complex eigenvalue written in `M_s` and `M_a`.
pub fn theorem1_verdicts(m: &RealSquareMatrix) -> [CriterionVerdict; 3] {
    let split = sym_skew_split(m);
    let inv = SplitInvariants::of(split.sym.as_dmatrix(), split.skew.as_dmatrix());
    let n = m.n() as f64;
    [
        CriterionVerdict::less_than("thm1-i", n * inv.s2, inv.tr_sym * inv.tr_sym),
        CriterionVerdict::less_than("thm1-ii", n * inv.s4, inv.s2 * inv.s2),
        CriterionVerdict::less_than("thm1-iii", inv.s2 * inv.s4, inv.s3 * inv.s3),
    ]
}

/// `det(αI − M)` by the Faddeev–LeVerrier recursion.
pub fn char_poly(m: &RealSquareMatrix) -> Result<MonicPolynomial> {
    let n = m.n();
    if n > CHAR_POLY_MAX_DIM {
        return Err(Error::input(format!(
            "characteristic polynomial limited to n ≤ {CHAR_POLY_MAX_DIM}, got {n}"
        )));
    }
    let a = m.as_dmatrix();
    let mut coeffs = Vec::with_capacity(n);
    // N₁ = I, a_k = −Tr(A N_k)/k, N_{k+1} = A N_k + a_k I
    let mut nk = DMatrix::<f64>::identity(n, n);
    for k in 1..=n {
        let ank = a * &nk;
        let ak = -ank.trace() / k as f64;
        coeffs.push(ak);
        nk = ank;
        for i in 0..n {
            nk[(i, i)] += ak;
        }
    }
    let poly = MonicPolynomial::new(coeffs)?;

    let kmax = 4;
    let from_coeffs = newton_power_sums(&poly, kmax)?;
    let frob = m.frobenius_sq().sqrt();
    let mut power = a.clone();
    for k in 1..=kmax {
        let tr = power.trace();
        let scale = frob.powi(k as i32).max(1.0);
        let gap = (from_coeffs.s(k) - tr).abs() / scale;
        if gap > CHAR_POLY_CHECK_TOL {
            return Err(Error::consistency(format!(
                "characteristic polynomial fails Newton's identity at k={k} (relative gap {gap:e})"
            )));
        }
        power = &power * a;
    }
    Ok(poly)
}
