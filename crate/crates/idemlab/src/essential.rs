//! Desk-scale analysis of eps-idempotents and eps-commuting pairs.
//!
//! "Compact" is modeled as "small norm" throughout: an eps-idempotent is a
//! matrix with ‖T²−T‖ small, and the classifier returns the nearby exact
//! idempotent recovered as the Riesz projection around the eigenvalue
//! cluster at 1. The trichotomy — close to I, close to 0, or close to a
//! proper idempotent — is decided by counting eigenvalues in the two
//! cluster basins around 0 and 1.

use crate::error::{Error, Result};
use crate::idempotent::Idempotent;
use crate::numkernel::{op_norm, CMatrix};
use crate::spectral::{cluster_contour, riesz_projection, SpectrumReport, DEFAULT_CONTOUR_NODES};
use num_complex::Complex64;

/// Largest admitted idempotency defect ‖T²−T‖.
pub const DEFAULT_EPS_MAX: f64 = 0.1;

/// Default admitted commutator norm for eps-commuting pairs.
pub const DEFAULT_DELTA: f64 = 0.05;

/// Eigenvalues belong to the cluster at c ∈ {0,1} when |λ−c| < 0.25;
/// ‖T²−T‖ ≤ 0.1 forces every eigenvalue into one of the two basins.
pub const CLUSTER_BASIN: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsCase {
    NearIdentity,
    NearZero,
    NearProper,
}

/// Classification of an eps-idempotent with its recovered exact idempotent.
#[derive(Debug, Clone)]
pub struct EpsIdempotentClass {
    pub case: EpsCase,
    /// The nearby exact idempotent (I, 0, or the 1-cluster Riesz projection).
    pub s: Idempotent,
    /// Measured distance ‖T − S‖.
    pub distance: f64,
    /// Idempotency defect ‖T² − T‖ of the input.
    pub eps: f64,
    /// Eigenvalue counts in the basins around 0 and 1.
    pub clusters: (usize, usize),
}

/// Classifies T by its eigenvalue clusters and recovers the nearby exact
/// idempotent via the Riesz projection at the 1-cluster.
pub fn nearest_exact_idempotent(t: &CMatrix, eps_max: f64) -> Result<EpsIdempotentClass> {
    if !t.is_square() {
        return Err(Error::dim("classifier input must be square", t.rows(), t.cols()));
    }
    let n = t.rows();
    let eps = op_norm(&(&(t * t) - t));
    if !(eps <= eps_max) {
        return Err(Error::NotNearIdempotent { residual: eps, eps_max });
    }
    let spec = SpectrumReport::of(t)?;
    let one = Complex64::new(1.0, 0.0);
    let mut near0 = 0usize;
    let mut near1 = 0usize;
    for ev in &spec.eigenvalues {
        if ev.norm() < CLUSTER_BASIN {
            near0 += 1;
        } else if (ev - one).norm() < CLUSTER_BASIN {
            near1 += 1;
        } else {
            return Err(Error::NotNearIdempotent { residual: eps.max(ev.norm().min((ev - one).norm())), eps_max });
        }
    }

    let contour = cluster_contour(&spec, one, CLUSTER_BASIN, true, DEFAULT_CONTOUR_NODES)?;
    let riesz = riesz_projection(t, &contour)?;

    let (case, s_matrix) = if near1 == 0 {
        let drift = op_norm(&riesz.p);
        if drift > 1e-6 {
            return Err(Error::SpectrumViolation { deviation: drift });
        }
        (EpsCase::NearZero, CMatrix::zeros(n, n))
    } else if near0 == 0 {
        let drift = op_norm(&(&riesz.p - &CMatrix::identity(n)));
        if drift > 1e-6 {
            return Err(Error::SpectrumViolation { deviation: drift });
        }
        (EpsCase::NearIdentity, CMatrix::identity(n))
    } else {
        (EpsCase::NearProper, riesz.p.clone())
    };

    let s = Idempotent::validate(&s_matrix, 1e-10)?;
    let distance = op_norm(&(t - s.matrix()));
    Ok(EpsIdempotentClass { case, s, distance, eps, clusters: (near0, near1) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairCase {
    SumNearIdentity,
    DifferenceSmall,
    ProductAnnihilatesS,
}

/// Residuals of the three candidate conclusions for an eps-commuting pair;
/// the one named by the chosen case is the minimal one.
#[derive(Debug, Clone)]
pub struct PairResiduals {
    /// ‖R − I‖.
    pub near_identity: f64,
    /// ‖R‖.
    pub near_zero: f64,
    /// ‖R − S‖ for the classifier's S.
    pub near_proper: f64,
    /// Case-specific reported norms.
    pub reported: Vec<(&'static str, f64)>,
}

/// Case analysis of an eps-commuting idempotent pair through R = (T₁−T₂)².
#[derive(Debug, Clone)]
pub struct EssentialPairCase {
    pub case: PairCase,
    pub r: CMatrix,
    pub classification: EpsIdempotentClass,
    pub residuals: PairResiduals,
}

impl EssentialPairCase {
    pub fn named_residual(&self) -> f64 {
        match self.case {
            PairCase::SumNearIdentity => self.residuals.near_identity,
            PairCase::DifferenceSmall => self.residuals.near_zero,
            PairCase::ProductAnnihilatesS => self.residuals.near_proper,
        }
    }

    /// The residual selected by the case never exceeds the other candidates.
    pub fn named_is_minimal(&self) -> bool {
        let m = self.named_residual();
        m <= self.residuals.near_identity + 1e-12
            && m <= self.residuals.near_zero + 1e-12
            && m <= self.residuals.near_proper + 1e-12
    }
}

/// Classifies an eps-commuting pair: R = (T₁−T₂)² is an eps-idempotent
/// (its defect is exactly ‖D²‖), and the trichotomy of R maps onto the
/// three pair conclusions.
pub fn pair_case_analysis(
    t1: &Idempotent,
    t2: &Idempotent,
    delta: f64,
) -> Result<EssentialPairCase> {
    if t1.dim() != t2.dim() {
        return Err(Error::dim("pair dimensions", t1.dim(), t2.dim()));
    }
    let n = t1.dim();
    let eye = CMatrix::identity(n);
    let m1 = t1.matrix();
    let m2 = t2.matrix();
    let d = &(m1 * m2) - &(m2 * m1);
    let d_norm = op_norm(&d);
    if !(d_norm <= delta) {
        return Err(Error::NotEpsCommuting { norm: d_norm, delta });
    }

    let diff = m1 - m2;
    let r = &diff * &diff;
    // forced by the pair algebra: R² − R = D², so the defect is ≤ δ²
    let defect = op_norm(&(&(&r * &r) - &r));
    let algebra_slack = 1e-10 * (1.0 + op_norm(m1) + op_norm(m2)).powi(4);
    if defect > d_norm * d_norm + algebra_slack {
        return Err(Error::Certification { residual: defect, tol: d_norm * d_norm + algebra_slack });
    }

    let classification = nearest_exact_idempotent(&r, DEFAULT_EPS_MAX)?;
    let s = classification.s.matrix().clone();

    let near_identity = op_norm(&(&r - &eye));
    let near_zero = op_norm(&r);
    let near_proper = op_norm(&(&r - &s));

    let (case, reported) = match classification.case {
        EpsCase::NearIdentity => (
            PairCase::SumNearIdentity,
            vec![
                ("norm_t1t2", op_norm(&(m1 * m2))),
                ("norm_t2t1", op_norm(&(m2 * m1))),
                ("norm_sum_minus_identity", op_norm(&(&(m1 + m2) - &eye))),
            ],
        ),
        EpsCase::NearZero => (
            PairCase::DifferenceSmall,
            vec![
                ("norm_t1_one_minus_t2", op_norm(&(m1 * &(&eye - m2)))),
                ("norm_t2_one_minus_t1", op_norm(&(m2 * &(&eye - m1)))),
                ("norm_difference", op_norm(&diff)),
            ],
        ),
        EpsCase::NearProper => (
            PairCase::ProductAnnihilatesS,
            vec![
                ("norm_t1t2_s", op_norm(&(&(m1 * m2) * &s))),
                ("norm_t2t1_s", op_norm(&(&(m2 * m1) * &s))),
                ("norm_sum_minus_identity_s", op_norm(&(&(&(m1 + m2) - &eye) * &s))),
            ],
        ),
    };

    Ok(EssentialPairCase {
        case,
        r,
        classification,
        residuals: PairResiduals { near_identity, near_zero, near_proper, reported },
    })
}

/// Quantitative converse data: smallness of T₁+T₂−I or of T₁−T₂ forces a
/// small commutator, through the exact identities
/// D = (T₁−T₂)(T₁+T₂−I) and D = (T₁−T₂)T₁ − T₁(T₁−T₂).
#[derive(Debug, Clone)]
pub struct ConverseReport {
    pub norm_sum_minus_identity: f64,
    pub norm_difference: f64,
    pub norm_commutator: f64,
    /// (‖T₁‖+‖T₂‖)·‖T₁+T₂−I‖.
    pub bound_via_sum: f64,
    /// (1+‖T₁‖+‖T₂‖)·‖T₁−T₂‖.
    pub bound_via_difference: f64,
}

impl ConverseReport {
    pub fn sum_bound_holds(&self) -> bool {
        self.norm_commutator <= self.bound_via_sum + 1e-12
    }

    pub fn difference_bound_holds(&self) -> bool {
        self.norm_commutator <= self.bound_via_difference + 1e-12
    }
}

pub fn converse_checks(t1: &Idempotent, t2: &Idempotent) -> Result<ConverseReport> {
    if t1.dim() != t2.dim() {
        return Err(Error::dim("pair dimensions", t1.dim(), t2.dim()));
    }
    let eye = CMatrix::identity(t1.dim());
    let m1 = t1.matrix();
    let m2 = t2.matrix();
    let d = &(m1 * m2) - &(m2 * m1);
    let n1 = op_norm(m1);
    let n2 = op_norm(m2);
    let norm_sum_minus_identity = op_norm(&(&(m1 + m2) - &eye));
    let norm_difference = op_norm(&(m1 - m2));
    Ok(ConverseReport {
        norm_sum_minus_identity,
        norm_difference,
        norm_commutator: op_norm(&d),
        bound_via_sum: (n1 + n2) * norm_sum_minus_identity,
        bound_via_difference: (1.0 + n1 + n2) * norm_difference,
    })
}

/// The 3m×3m block construction showing that annihilation on an idempotent
/// does not force a small commutator.
#[derive(Debug, Clone)]
pub struct BlockCounterexample {
    pub t1: Idempotent,
    pub t2: Idempotent,
    pub s: Idempotent,
    pub norm_t1t2_s: f64,
    pub norm_t2t1_s: f64,
    pub norm_sum_minus_identity_s: f64,
    pub commutator_norm: f64,
}

/// Builds T₁ = [[I,0,A₁],[0,I,A₂],[0,0,0]], T₂ = diag(0,0,I), S = diag(I,0,0);
/// then T₁T₂S = T₂T₁S = (T₁+T₂−I)S = 0 exactly while ‖D‖ = ‖[A₁;A₂]‖.
pub fn example54(a1: &CMatrix, a2: &CMatrix) -> Result<BlockCounterexample> {
    if !a1.is_square() || !a2.is_square() || a1.rows() != a2.rows() || a1.rows() == 0 {
        return Err(Error::dim("example blocks must be square of equal size", a1.rows(), a2.rows()));
    }
    let m = a1.rows();
    let eye = CMatrix::identity(m);
    let zero = CMatrix::zeros(m, m);
    let t1 = CMatrix::from_blocks(&[
        &[&eye, &zero, a1],
        &[&zero, &eye, a2],
        &[&zero, &zero, &zero],
    ]);
    let t2 = CMatrix::from_blocks(&[
        &[&zero, &zero, &zero],
        &[&zero, &zero, &zero],
        &[&zero, &zero, &eye],
    ]);
    let s = CMatrix::from_blocks(&[
        &[&eye, &zero, &zero],
        &[&zero, &zero, &zero],
        &[&zero, &zero, &zero],
    ]);
    let big_eye = CMatrix::identity(3 * m);
    let d = &(&t1 * &t2) - &(&t2 * &t1);
    let report = BlockCounterexample {
        t1: Idempotent::validate_default(&t1)?,
        t2: Idempotent::validate_default(&t2)?,
        s: Idempotent::validate_default(&s)?,
        norm_t1t2_s: op_norm(&(&(&t1 * &t2) * &s)),
        norm_t2t1_s: op_norm(&(&(&t2 * &t1) * &s)),
        norm_sum_minus_identity_s: op_norm(&(&(&(&t1 + &t2) - &big_eye) * &s)),
        commutator_norm: op_norm(&d),
    };
    Ok(report)
}
