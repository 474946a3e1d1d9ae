//! Mechanical systems `q'' + (D + G) q' + (K + C) q = 0` and the instability
//! verdicts for their circulatory (`D = G = 0`) and gyroscopic conservative
//! (`D = C = 0`) sub-classes.

use std::fmt;

use nalgebra::{Cholesky, DMatrix};

use crate::error::{Error, Result};
use crate::matcrit::{char_poly, frobenius_sq, sym_skew_split, RealSquareMatrix};
use crate::polycrit::{newton_power_sums, CriterionVerdict, MonicPolynomial};

/// Largest Frobenius distance from the required symmetry class that is
/// projected away instead of rejected.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Relative zero test for the blocks of a normal form.
pub const ZERO_BLOCK_TOL: f64 = 1e-10;

/// Relative pivot threshold for the mass matrix.
pub const MASS_PIVOT_TOL: f64 = 1e-12;

/// Largest dimension for which the `2n × 2n` state matrix is expanded.
pub const GYRO_MAX_DIM: usize = 32;

/// Relative size of odd-power coefficients of `P(λ)` tolerated as rounding.
pub const ODD_COEFF_TOL: f64 = 1e-9;

/// Relative tolerance of the closed-form vs. polynomial power-sum check.
pub const GYRO_IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    Symmetric,
    Skew,
}

fn enforce(m: RealSquareMatrix, kind: Symmetry, name: &str) -> Result<RealSquareMatrix> {
    let split = sym_skew_split(&m);
    let (keep, drop) = match kind {
        Symmetry::Symmetric => (split.sym, split.skew),
        Symmetry::Skew => (split.skew, split.sym),
    };
    // ‖M − Mᵀ‖ = 2‖M_a‖, ‖M + Mᵀ‖ = 2‖M_s‖
    let distance = 2.0 * drop.frobenius_sq().sqrt();
    if distance > SYMMETRY_TOL {
        let what = match kind {
            Symmetry::Symmetric => "symmetric",
            Symmetry::Skew => "skew-symmetric",
        };
        return Err(Error::input(format!(
            "{name} must be {what} (asymmetry {distance:e})"
        )));
    }
    Ok(keep)
}

fn same_dim(a: &RealSquareMatrix, b: &RealSquareMatrix, names: &str) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::input(format!(
            "{names} have different dimensions ({} vs {})",
            a.n(),
            b.n()
        )));
    }
    Ok(())
}

/// `q'' + K q + C q = 0` with `K` symmetric and `C` skew-symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculatorySystem {
    k: RealSquareMatrix,
    c: RealSquareMatrix,
}

impl CirculatorySystem {
    pub fn new(stiffness: RealSquareMatrix, circulatory: RealSquareMatrix) -> Result<Self> {
        same_dim(&stiffness, &circulatory, "K and C")?;
        Ok(Self {
            k: enforce(stiffness, Symmetry::Symmetric, "K")?,
            c: enforce(circulatory, Symmetry::Skew, "C")?,
        })
    }

    pub fn n(&self) -> usize {
        self.k.n()
    }

    pub fn stiffness(&self) -> &RealSquareMatrix {
        &self.k
    }

    pub fn circulatory(&self) -> &RealSquareMatrix {
        &self.c
    }
}

/// `q'' + G q' + K q = 0` with `G` skew-symmetric and `K` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct GyroscopicSystem {
    g: RealSquareMatrix,
    k: RealSquareMatrix,
}

impl GyroscopicSystem {
    pub fn new(gyroscopic: RealSquareMatrix, stiffness: RealSquareMatrix) -> Result<Self> {
        same_dim(&gyroscopic, &stiffness, "G and K")?;
        Ok(Self {
            g: enforce(gyroscopic, Symmetry::Skew, "G")?,
            k: enforce(stiffness, Symmetry::Symmetric, "K")?,
        })
    }

    pub fn n(&self) -> usize {
        self.k.n()
    }

    pub fn gyroscopic(&self) -> &RealSquareMatrix {
        &self.g
    }

    pub fn stiffness(&self) -> &RealSquareMatrix {
        &self.k
    }
}

/// Taxonomy of normal-form systems; the first matching class wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// `D = G = C = 0`, `K` positive definite.
    Conservative,
    /// `D = C = 0`.
    GyroscopicConservative,
    /// `G = C = 0`, `D` and `K` positive definite.
    DampedNonGyroscopic,
    /// `D = G = 0`.
    Circulatory,
    /// `G = 0`.
    ConstraintDamping,
    General,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Conservative => "conservative",
            Classification::GyroscopicConservative => "gyroscopic-conservative",
            Classification::DampedNonGyroscopic => "damped-non-gyroscopic",
            Classification::Circulatory => "circulatory",
            Classification::ConstraintDamping => "constraint-damping",
            Classification::General => "general",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `q'' + (D + G) q' + (K + C) q = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalForm {
    pub d: RealSquareMatrix,
    pub g: RealSquareMatrix,
    pub k: RealSquareMatrix,
    pub c: RealSquareMatrix,
    pub classification: Classification,
}

fn positive_definite(m: &RealSquareMatrix) -> bool {
    Cholesky::new(m.as_dmatrix().clone()).is_some()
}

/// Brings `M q'' + A₂ q' + A₃ q = 0` to normal form by solving with `M` and
/// splitting `M⁻¹A₂ = D + G`, `M⁻¹A₃ = K + C`.
pub fn normal_form(
    mass: &RealSquareMatrix,
    a2: &RealSquareMatrix,
    a3: &RealSquareMatrix,
) -> Result<NormalForm> {
    same_dim(mass, a2, "M and A2")?;
    same_dim(mass, a3, "M and A3")?;
    let asym = 2.0 * sym_skew_split(mass).skew.frobenius_sq().sqrt();
    if asym > SYMMETRY_TOL {
        return Err(Error::input(format!(
            "mass matrix must be symmetric (asymmetry {asym:e})"
        )));
    }

    let mass_norm = mass.frobenius_sq().sqrt();
    let lu = mass.as_dmatrix().clone().lu();
    let threshold = MASS_PIVOT_TOL * mass_norm;
    if lu.u().diagonal().iter().any(|p| p.abs() < threshold) || mass_norm == 0.0 {
        return Err(Error::input("mass matrix is singular"));
    }
    let solve = |rhs: &RealSquareMatrix| -> Result<RealSquareMatrix> {
        let x = lu
            .solve(rhs.as_dmatrix())
            .ok_or_else(|| Error::input("mass matrix is singular"))?;
        RealSquareMatrix::new(x)
    };
    let velocity = solve(a2)?;
    let position = solve(a3)?;

    let vs = sym_skew_split(&velocity);
    let ps = sym_skew_split(&position);
    let is_zero = |block: &RealSquareMatrix, whole: &RealSquareMatrix| {
        block.frobenius_sq().sqrt() <= ZERO_BLOCK_TOL * (1.0 + whole.frobenius_sq().sqrt())
    };
    let d0 = is_zero(&vs.sym, &velocity);
    let g0 = is_zero(&vs.skew, &velocity);
    let c0 = is_zero(&ps.skew, &position);

    let classification = if d0 && g0 && c0 && positive_definite(&ps.sym) {
        Classification::Conservative
    } else if d0 && c0 {
        Classification::GyroscopicConservative
    } else if g0 && c0 && positive_definite(&vs.sym) && positive_definite(&ps.sym) {
        Classification::DampedNonGyroscopic
    } else if d0 && g0 {
        Classification::Circulatory
    } else if g0 {
        Classification::ConstraintDamping
    } else {
        Classification::General
    };

    Ok(NormalForm {
        d: vs.sym,
        g: vs.skew,
        k: ps.sym,
        c: ps.skew,
        classification,
    })
}

/// Instability verdicts for a circulatory system: the three Gramian
/// criteria (`thm2-i..iii`), the alternative form of the second one
/// (`rmk-ii-alt`) and the two sign corollaries (`cor-i`, `cor-ii`).
pub fn circulatory_verdicts(sys: &CirculatorySystem) -> [CriterionVerdict; 6] {
    let k = sys.k.as_dmatrix();
    let c = sys.c.as_dmatrix();
    let n = sys.n() as f64;

    let k2 = k * k;
    let c2 = c * c;
    let kc = k * c;
    let ck = c * k;
    let nk = frobenius_sq(k);
    let nc = frobenius_sq(c);
    let tr_k = k.trace();

    let s2 = nk - nc;
    let sq_k2 = frobenius_sq(&k2);
    let sq_c2 = frobenius_sq(&c2);
    let sq_kc = frobenius_sq(&kc);
    let tr_kc2 = (&kc * &kc).trace();
    let s4 = sq_k2 + sq_c2 - 4.0 * sq_kc + 2.0 * tr_kc2;
    let s3 = (&k2 * k).trace() + 3.0 * (k * &c2).trace();

    let sym_sq = frobenius_sq(&(&k2 + &c2));
    let skew_sq = frobenius_sq(&(&kc + &ck));

    [
        CriterionVerdict::less_than("thm2-i", n * s2, tr_k * tr_k),
        CriterionVerdict::less_than("thm2-ii", n * s4, s2 * s2),
        CriterionVerdict::less_than("thm2-iii", s2 * s4, s3 * s3),
        CriterionVerdict::less_than("rmk-ii-alt", sym_sq - s2 * s2 / n, skew_sq),
        CriterionVerdict::less_than("cor-i", nk.sqrt(), nc.sqrt()),
        CriterionVerdict::less_than("cor-ii", sq_k2 + sq_c2 + 2.0 * tr_kc2, 4.0 * sq_kc),
    ]
}

/// `2n(2‖K‖² + ‖G²‖² + 4 Tr(GᵀKG)) < (2 Tr K + ‖G‖²)²`.
pub fn gyroscopic_verdict_thm4(sys: &GyroscopicSystem) -> CriterionVerdict {
    let g = sys.g.as_dmatrix();
    let k = sys.k.as_dmatrix();
    let n = sys.n() as f64;
    let g2 = g * g;
    let gtkg = g.transpose() * k * g;
    let s4p = 2.0 * frobenius_sq(k) + frobenius_sq(&g2) + 4.0 * gtkg.trace();
    let s2p = 2.0 * k.trace() + frobenius_sq(g);
    CriterionVerdict::less_than("thm4", 2.0 * n * s4p, s2p * s2p)
}

/// `Q(α) = det(αI + K + C)`, the characteristic polynomial of `−(K + C)`.
pub fn circulatory_reduced_polynomial(sys: &CirculatorySystem) -> Result<MonicPolynomial> {
    let m = -(sys.k.as_dmatrix() + sys.c.as_dmatrix());
    char_poly(&RealSquareMatrix::new(m)?)
}

fn state_matrix(sys: &GyroscopicSystem) -> DMatrix<f64> {
    let n = sys.n();
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, n), (n, n)).fill_with_identity();
    a.view_mut((n, 0), (n, n)).copy_from(&(-sys.k.as_dmatrix()));
    a.view_mut((n, n), (n, n)).copy_from(&(-sys.g.as_dmatrix()));
    a
}

/// `P(λ) = det(λ²I + λG + K)` as the characteristic polynomial of the state
/// matrix `[[0, I], [−K, −G]]`.
pub fn gyro_pencil_polynomial(sys: &GyroscopicSystem) -> Result<MonicPolynomial> {
    if sys.n() > GYRO_MAX_DIM {
        return Err(Error::input(format!(
            "gyroscopic systems limited to n ≤ {GYRO_MAX_DIM}, got {}",
            sys.n()
        )));
    }
    char_poly(&RealSquareMatrix::new(state_matrix(sys))?)
}

/// `Q(α)` with `Q(λ²) = P(λ)`. The odd-power coefficients of `P` must vanish.
pub fn gyro_reduced_polynomial(sys: &GyroscopicSystem) -> Result<MonicPolynomial> {
    let p = gyro_pencil_polynomial(sys)?;
    let scale = 1.0 + p.coeffs().iter().fold(0.0f64, |m, a| m.max(a.abs()));
    for (j, &a) in p.coeffs().iter().enumerate().step_by(2) {
        if a.abs() > ODD_COEFF_TOL * scale {
            return Err(Error::consistency(format!(
                "P(λ) has odd-power coefficient a{} = {a:e}",
                j + 1
            )));
        }
    }
    MonicPolynomial::new(p.coeffs().iter().skip(1).step_by(2).copied().collect())
}

/// Power sums of `P(λ)` and of the reduced `Q(α)`, related by
/// `s₂ᴾ = 2s₁ᵠ` and `s₄ᴾ = 2s₂ᵠ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GyroPowerSums {
    pub s2_p: f64,
    pub s4_p: f64,
    pub s1_q: f64,
    pub s2_q: f64,
}

/// Closed-form `s₂ᴾ = −2 Tr K − ‖G‖²` and
/// `s₄ᴾ = 2‖K‖² + ‖G²‖² + 4 Tr(GᵀKG)`, checked against Newton sums of the
/// expanded `P` and `Q`.
pub fn gyro_power_sum_identities(sys: &GyroscopicSystem) -> Result<GyroPowerSums> {
    let g = sys.g.as_dmatrix();
    let k = sys.k.as_dmatrix();
    let s2_p = -2.0 * k.trace() - frobenius_sq(g);
    let s4_p =
        2.0 * frobenius_sq(k) + frobenius_sq(&(g * g)) + 4.0 * (g.transpose() * k * g).trace();
    let closed = GyroPowerSums {
        s2_p,
        s4_p,
        s1_q: s2_p / 2.0,
        s2_q: s4_p / 2.0,
    };

    let p = gyro_pencil_polynomial(sys)?;
    let q = gyro_reduced_polynomial(sys)?;
    let ps_p = newton_power_sums(&p, 4)?;
    let ps_q = newton_power_sums(&q, 2)?;

    // ‖A‖² for the state matrix bounds the rounding of its trace powers.
    let state_sq = sys.n() as f64 + frobenius_sq(k) + frobenius_sq(g);
    let checks = [
        ("s2P", closed.s2_p, ps_p.s(2), state_sq),
        ("s4P", closed.s4_p, ps_p.s(4), state_sq * state_sq),
        ("s1Q", closed.s1_q, ps_q.s(1), state_sq),
        ("s2Q", closed.s2_q, ps_q.s(2), state_sq * state_sq),
    ];
    for (name, a, b, scale) in checks {
        let gap = (a - b).abs() / scale.max(1.0);
        if gap > GYRO_IDENTITY_TOL {
            return Err(Error::consistency(format!(
                "{name}: closed form {a} vs polynomial {b} (relative gap {gap:e})"
            )));
        }
    }
    Ok(closed)
}

/// The 3×3 circulatory family `K = [[1,0,0],[0,1,k],[0,k,0]]`,
/// `C = [[0,c,0],[−c,0,0],[0,0,0]]`.
pub fn example_circulatory3(k: f64, c: f64) -> CirculatorySystem {
    let stiffness = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, k, 0.0, k, 0.0]);
    let circ = DMatrix::from_row_slice(3, 3, &[0.0, c, 0.0, -c, 0.0, 0.0, 0.0, 0.0, 0.0]);
    CirculatorySystem {
        k: RealSquareMatrix::new(stiffness).expect("finite parameters"),
        c: RealSquareMatrix::new(circ).expect("finite parameters"),
    }
}

/// Linearised charged particle in a stationary field:
/// `K = [[k,0,0],[0,0,k],[0,k,0]]`, `G = [[0,c,0],[−c,0,0],[0,0,0]]`.
pub fn example_charged_particle(k: f64, c: f64) -> GyroscopicSystem {
    let stiffness = DMatrix::from_row_slice(3, 3, &[k, 0.0, 0.0, 0.0, 0.0, k, 0.0, k, 0.0]);
    let gyro = DMatrix::from_row_slice(3, 3, &[0.0, c, 0.0, -c, 0.0, 0.0, 0.0, 0.0, 0.0]);
    GyroscopicSystem {
        g: RealSquareMatrix::new(gyro).expect("finite parameters"),
        k: RealSquareMatrix::new(stiffness).expect("finite parameters"),
    }
}
