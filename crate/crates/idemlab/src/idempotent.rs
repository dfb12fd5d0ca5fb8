//! Validated idempotents and their geometry.
//!
//! An idempotent T (T² = T) is the oblique projection onto R(T) along
//! N(T). With respect to the orthogonal splitting ℂⁿ = R(T) ⊕ N(T*), the
//! restricted projection P_{N(T*)}|_{N(T)} is invertible and T takes the
//! block form [[I, X],[0, 0]] with X = −P_{R(T)}|_{N(T)} · (P_{N(T*)}|_{N(T)})⁻¹.
//! The same data gives an explicit similarity T = V · P_{R(T)} · V⁻¹ and the
//! witness operator W = (P_{N(T*)}|_{N(T)})⁻¹ P_{N(T*)}, which has the same
//! invariant subspaces as T and collapses algebraically to I − T.

use crate::error::{Error, Result};
use crate::numkernel::{
    condition_number, inverse, op_norm, random_orthonormal, singular_values, svd_rank, CMatrix,
    DEFAULT_RANK_TOL,
};
use crate::subspace::{
    self, complement, intersect, invariance, leq, Invariance, Subspace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Condition-number level above which Ando data is flagged as unreliable.
pub const KAPPA_WARN: f64 = 1e8;

/// Scale-invariant default: residual ‖T²−T‖ against 1e−8·max(1, ‖T‖²).
pub fn default_idempotency_tol(t: &CMatrix) -> f64 {
    let norm = op_norm(t);
    1e-8 * (norm * norm).max(1.0)
}

/// A matrix certified to satisfy T² = T within tolerance, with its four
/// fundamental subspaces cached.
#[derive(Debug, Clone)]
pub struct Idempotent {
    t: CMatrix,
    residual: f64,
    range: Subspace,
    null: Subspace,
    range_star: Subspace,
    null_star: Subspace,
}

impl Idempotent {
    /// Validates idempotency at the scale-invariant default tolerance.
    pub fn validate_default(t: &CMatrix) -> Result<Self> {
        let tol = default_idempotency_tol(t);
        Self::validate(t, tol)
    }

    /// Validates ‖T²−T‖ ≤ tol and computes R(T), N(T), R(T*), N(T*).
    pub fn validate(t: &CMatrix, tol: f64) -> Result<Self> {
        if !t.is_square() {
            return Err(Error::dim("idempotent must be square", t.rows(), t.cols()));
        }
        let residual = op_norm(&(&(t * t) - t));
        if !(residual <= tol) {
            return Err(Error::NotIdempotent { residual, tol });
        }
        let n = t.rows();
        let fwd = svd_rank(t, DEFAULT_RANK_TOL)?;
        let adj = svd_rank(&t.adjoint(), DEFAULT_RANK_TOL)?;
        if fwd.rank != adj.rank {
            return Err(Error::DegenerateGeometry {
                detail: format!("rank(T) = {} but rank(T*) = {}", fwd.rank, adj.rank),
            });
        }
        let range = Subspace::from_basis(fwd.range_basis)?;
        let null = Subspace::from_basis(fwd.null_basis)?;
        let range_star = Subspace::from_basis(adj.range_basis)?;
        let null_star = Subspace::from_basis(adj.null_basis)?;
        debug_assert_eq!(range.dim() + null.dim(), n);
        let alignment = subspace::gap(&null_star, &complement(&range)?)?;
        if alignment > 1e-8 {
            return Err(Error::DegenerateGeometry {
                detail: format!("N(T*) vs R(T)^perp misaligned by {alignment:.3e}"),
            });
        }
        Ok(Idempotent { t: t.clone(), residual, range, null, range_star, null_star })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.t
    }

    pub fn dim(&self) -> usize {
        self.t.rows()
    }

    pub fn rank(&self) -> usize {
        self.range.dim()
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn range(&self) -> &Subspace {
        &self.range
    }

    pub fn null(&self) -> &Subspace {
        &self.null
    }

    pub fn range_star(&self) -> &Subspace {
        &self.range_star
    }

    pub fn null_star(&self) -> &Subspace {
        &self.null_star
    }
}

/// Seeded random oblique projection of rank r on ℂⁿ.
///
/// `skew` bounds the mixing of the null direction into the range: the frame
/// of N(T) is complement(R) tilted by a Gaussian block of spectral norm
/// `skew`, so the smallest principal angle between R(T) and N(T) stays above
/// π/2 − arctan(skew). `skew = 0` yields an orthogonal projection.
pub fn random_idempotent(n: usize, r: usize, skew: f64, seed: u64) -> Result<Idempotent> {
    if r > n || n == 0 {
        return Err(Error::BadParameters(format!("rank {r} out of range for dimension {n}")));
    }
    if !skew.is_finite() || skew < 0.0 {
        return Err(Error::BadParameters(format!("skew must be finite and >= 0, got {skew}")));
    }
    if r == 0 {
        return Idempotent::validate_default(&CMatrix::zeros(n, n));
    }
    if r == n {
        return Idempotent::validate_default(&CMatrix::identity(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b_r = random_orthonormal(n, r, &mut rng);
    let b_n0 = complement(&Subspace::from_basis(b_r.clone())?)?;
    let mut tilt = crate::numkernel::random_matrix(r, n - r, &mut rng);
    let tnorm = op_norm(&tilt);
    if skew > 0.0 && tnorm > 0.0 {
        tilt = tilt.scale_re(skew / tnorm);
    } else {
        tilt = CMatrix::zeros(r, n - r);
    }
    let n_raw = &b_n0.basis().clone() + &(&b_r * &tilt);
    let n_space = Subspace::from_span(&n_raw)?;
    if n_space.dim() != n - r {
        return Err(Error::DegenerateGeometry {
            detail: format!("null frame collapsed to dimension {}", n_space.dim()),
        });
    }
    let c = complement(&n_space)?;
    let small = &c.basis().adjoint() * &b_r;
    let t = &(&b_r * &inverse(&small)?) * &c.basis().adjoint();
    Idempotent::validate_default(&t)
}

/// The canonical block data of an idempotent on R(T) ⊕ N(T*).
#[derive(Debug, Clone)]
pub struct AndoForm {
    /// Off-diagonal block of T: r×(n−r), coordinates (R(T) ← N(T*)).
    pub x: CMatrix,
    /// Matrix of (P_{N(T*)}|_{N(T)})⁻¹ in the stored frames, N(T*) → N(T).
    pub a: CMatrix,
    /// Ambient similarity with T = V · P_{R(T)} · V⁻¹.
    pub v: CMatrix,
    /// Explicit inverse of `v` (block form [[I, −X'],[0, I]]).
    pub v_inv: CMatrix,
    /// Condition number of P_{N(T*)}|_{N(T)}.
    pub kappa: f64,
    /// Condition number of the similarity.
    pub kappa_v: f64,
    /// ‖T − U·[[I, X],[0,0]]·U*‖ in the stored frames.
    pub block_residual: f64,
    /// ‖T − V·P_{R(T)}·V⁻¹‖.
    pub similarity_residual: f64,
    basis_null: CMatrix,
    basis_null_star: CMatrix,
}

impl AndoForm {
    pub fn is_ill_conditioned(&self) -> bool {
        self.kappa > KAPPA_WARN
    }

    /// Witness operator W = A · P_{N(T*)} assembled in ambient coordinates;
    /// its range lies inside N(T).
    pub fn witness(&self) -> CMatrix {
        &(&self.basis_null * &self.a) * &self.basis_null_star.adjoint()
    }
}

/// Embeds an (r+s)×(r+s) block structure [[I, X],[0,0]] in the frames U = [B1 | B2].
fn block_idempotent_ambient(b1: &CMatrix, b2: &CMatrix, x: &CMatrix) -> CMatrix {
    &(b1 * &b1.adjoint()) + &(&(b1 * x) * &b2.adjoint())
}

/// Computes the Ando block form, the similarity V, and conditioning data.
pub fn ando_form(e: &Idempotent) -> Result<AndoForm> {
    let n = e.dim();
    let b_r = e.range().basis().clone();
    let b_n = e.null().basis().clone();
    let b_ns = e.null_star().basis().clone();

    // restricted projection N(T) -> N(T*) in the stored frames
    let m = &b_ns.adjoint() * &b_n;
    let s = m.rows();
    let (kappa, invertible) = if s == 0 {
        (1.0, true)
    } else {
        let sv = singular_values(&m)?;
        let smin = sv[s - 1];
        (if smin > 0.0 { sv[0] / smin } else { f64::INFINITY }, smin > 1e-12 * sv[0].max(1.0))
    };
    if !invertible {
        return Err(Error::DegenerateGeometry {
            detail: format!("restricted projection singular (kappa {kappa:.3e}); idempotency tolerance too loose"),
        });
    }
    let a = inverse(&m)?;
    let x = -&(&(&b_r.adjoint() * &b_n) * &a);

    // V = U · [[I, -X],[0, I]] · U* in ambient coordinates; its inverse
    // flips the sign of the off-diagonal block.
    let eye = CMatrix::identity(n);
    let v = &eye + &(&(&b_r * &(-&x)) * &b_ns.adjoint());
    let v_inv = &eye + &(&(&b_r * &x) * &b_ns.adjoint());
    let kappa_v = condition_number(&v);

    let t = e.matrix();
    let rebuilt = block_idempotent_ambient(&b_r, &b_ns, &x);
    let block_residual = op_norm(&(t - &rebuilt));
    let p_r = e.range().projector();
    let similar = &(&v * &p_r) * &v_inv;
    let similarity_residual = op_norm(&(t - &similar));

    let bound = 1e-8 * kappa_v.max(1.0) * op_norm(t).max(1.0);
    if block_residual > bound || similarity_residual > bound {
        return Err(Error::Certification {
            residual: block_residual.max(similarity_residual),
            tol: bound,
        });
    }

    Ok(AndoForm {
        x,
        a,
        v,
        v_inv,
        kappa,
        kappa_v,
        block_residual,
        similarity_residual,
        basis_null: b_n,
        basis_null_star: b_ns,
    })
}

/// W = (P_{N(T*)}|_{N(T)})⁻¹ · P_{N(T*)} as an ambient operator, verified
/// against the algebraic identity W = I − T.
pub fn witness_operator(e: &Idempotent) -> Result<CMatrix> {
    let form = ando_form(e)?;
    let w = form.witness();
    let t = e.matrix();
    let deviation = op_norm(&(&(&w + t) - &CMatrix::identity(e.dim())));
    let bound = 1e-8 * op_norm(t).max(1.0) * form.kappa.max(1.0);
    if deviation > bound {
        return Err(Error::Certification { residual: deviation, tol: bound });
    }
    Ok(w)
}

/// Invariance verdicts for a subspace under T and under the witness W.
#[derive(Debug, Clone, Copy)]
pub struct InvarianceEquiv {
    pub under_t: Invariance,
    pub under_w: Invariance,
}

impl InvarianceEquiv {
    /// The two verdicts are asserted equal by the theory; disagreement at
    /// tolerance is a counterexample artifact.
    pub fn agree(&self) -> bool {
        self.under_t.holds() == self.under_w.holds()
    }
}

/// Evaluates S-invariance under T and under the witness operator.
pub fn invariance_equiv(e: &Idempotent, s: &Subspace, tol: f64) -> Result<InvarianceEquiv> {
    let w = witness_operator(e)?;
    Ok(InvarianceEquiv {
        under_t: invariance(e.matrix(), s, tol)?,
        under_w: invariance(&w, s, tol)?,
    })
}

/// Verdict pair for subspaces of N(T*): invariance is equivalent to
/// containment in N(T) ∩ N(T*).
#[derive(Debug, Clone, Copy)]
pub struct NullstarCheck {
    pub invariant: bool,
    pub contained_in_meet: bool,
    pub invariance_residual: f64,
}

pub fn nullstar_invariant_check(e: &Idempotent, s: &Subspace, tol: f64) -> Result<NullstarCheck> {
    if !leq(s, e.null_star(), tol)? {
        return Err(Error::PreconditionViolated("subspace is not inside N(T*)".into()));
    }
    let inv = invariance(e.matrix(), s, tol)?;
    let meet = intersect(e.null(), e.null_star())?;
    Ok(NullstarCheck {
        invariant: inv.holds(),
        contained_in_meet: leq(s, &meet, tol)?,
        invariance_residual: inv.residual,
    })
}

/// Verdict pair for subspaces of R(T): reduction (invariance under T and T*)
/// is equivalent to containment in R(T) ∩ R(T*).
#[derive(Debug, Clone, Copy)]
pub struct ReducingCheck {
    pub reduces: bool,
    pub contained_in_meet: bool,
    pub residual_t: f64,
    pub residual_t_star: f64,
}

pub fn reducing_check(e: &Idempotent, s: &Subspace, tol: f64) -> Result<ReducingCheck> {
    if !leq(s, e.range(), tol)? {
        return Err(Error::PreconditionViolated("subspace is not inside R(T)".into()));
    }
    let inv_t = invariance(e.matrix(), s, tol)?;
    let inv_ts = invariance(&e.matrix().adjoint(), s, tol)?;
    let meet = intersect(e.range(), e.range_star())?;
    Ok(ReducingCheck {
        reduces: inv_t.holds() && inv_ts.holds(),
        contained_in_meet: leq(s, &meet, tol)?,
        residual_t: inv_t.residual,
        residual_t_star: inv_ts.residual,
    })
}

/// Transports an invariant subspace of P_{R(T)} to one of T through V.
pub fn lat_transport(e: &Idempotent, s: &Subspace, tol: f64) -> Result<Subspace> {
    let p_r = e.range().projector();
    let pre = invariance(&p_r, s, tol)?;
    if !pre.holds() {
        return Err(Error::PreconditionViolated(format!(
            "subspace not invariant under P_R(T) (residual {:.3e})",
            pre.residual
        )));
    }
    let form = ando_form(e)?;
    let image = Subspace::from_span(&(&form.v * s.basis()))?;
    let post = invariance(e.matrix(), &image, tol)?;
    if !post.holds() {
        return Err(Error::Certification { residual: post.residual, tol: post.threshold });
    }
    Ok(image)
}

/// Random T-invariant subspace R' ∔ N' with R' ⊆ R(T), N' ⊆ N(T).
pub fn random_invariant_subspace<R: Rng>(e: &Idempotent, rng: &mut R) -> Result<Subspace> {
    let pick = |inside: &Subspace, rng: &mut R| -> Result<Subspace> {
        let k = if inside.dim() == 0 { 0 } else { rng.gen_range(0..=inside.dim()) };
        if k == 0 {
            return Ok(Subspace::zero(inside.ambient()));
        }
        let coeff = crate::numkernel::random_matrix(inside.dim(), k, rng);
        Subspace::from_span(&(inside.basis() * &coeff))
    };
    let r_part = pick(e.range(), rng)?;
    let n_part = pick(e.null(), rng)?;
    subspace::sum(&r_part, &n_part)
}
