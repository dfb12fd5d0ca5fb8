//! Closed subspaces of ℂⁿ, stored as orthonormal frames.
//!
//! A subspace is an ambient dimension plus an n×k matrix with orthonormal
//! columns; k = 0 encodes the zero subspace. Storing orthonormal frames —
//! even where the surrounding theory works with non-orthogonal algebraic
//! complements — keeps every predicate a bounded-conditioning computation;
//! oblique structure is recovered on demand by [`oblique_decompose`].

use crate::error::{Error, Result};
use crate::numkernel::{op_norm, solve, svd_rank, CMatrix, DEFAULT_RANK_TOL};
use num_complex::Complex64;
use rand::Rng;

/// Orthonormality defect allowed in a stored basis.
pub const ORTHO_TOL: f64 = 1e-12;

/// Default tolerance for containment and invariance predicates.
pub const DEFAULT_PREDICATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    basis: CMatrix,
}

impl Subspace {
    /// Wraps a frame that is already orthonormal (within [`ORTHO_TOL`]).
    pub fn from_basis(basis: CMatrix) -> Result<Self> {
        let n = basis.rows();
        let k = basis.cols();
        if k > n {
            return Err(Error::dim("basis wider than ambient", n, k));
        }
        let gram = &basis.adjoint() * &basis;
        let defect = op_norm(&(&gram - &CMatrix::identity(k)));
        if defect > ORTHO_TOL {
            return Err(Error::BadParameters(format!(
                "basis is not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Subspace { ambient: n, basis })
    }

    /// Subspace spanned by the columns of an arbitrary matrix
    /// (orthonormalized through the rank-revealing SVD).
    ///
    /// Everything in this module lives at unit scale (orthonormal frames,
    /// projectors), so the rank cutoff is floored at `DEFAULT_RANK_TOL`
    /// absolute: a span of rounding noise is the zero subspace, not a line.
    pub fn from_span(m: &CMatrix) -> Result<Self> {
        let decomp = crate::numkernel::svd(m)?;
        let smax = decomp.sigma.first().copied().unwrap_or(0.0);
        let cutoff = DEFAULT_RANK_TOL * smax.max(1.0);
        let rank = decomp.sigma.iter().take_while(|&&s| s > cutoff).count();
        Ok(Subspace { ambient: m.rows(), basis: decomp.u.block(0, 0, m.rows(), rank) })
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: CMatrix::zeros(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: CMatrix::identity(ambient) }
    }

    /// Span of selected standard basis vectors.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let mut basis = CMatrix::zeros(ambient, indices.len());
        for (c, &i) in indices.iter().enumerate() {
            basis[(i, c)] = Complex64::new(1.0, 0.0);
        }
        Subspace { ambient, basis }
    }

    /// Haar-ish random k-dimensional subspace, deterministic per rng state.
    pub fn random<R: Rng>(ambient: usize, k: usize, rng: &mut R) -> Self {
        Subspace {
            ambient,
            basis: crate::numkernel::random_orthonormal(ambient, k, rng),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Orthogonal projector P = B·B*.
    pub fn projector(&self) -> CMatrix {
        &self.basis * &self.basis.adjoint()
    }

    fn check_ambient(&self, other: &Subspace, context: &'static str) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::dim(context, self.ambient, other.ambient));
        }
        Ok(())
    }
}

/// Containment S1 ⊆ S2, true iff ‖(I − P₂)·B₁‖ ≤ tol.
pub fn leq(s1: &Subspace, s2: &Subspace, tol: f64) -> Result<bool> {
    s1.check_ambient(s2, "leq ambient")?;
    Ok(leq_residual(s1, s2) <= tol)
}

pub fn leq_residual(s1: &Subspace, s2: &Subspace) -> f64 {
    let mut rest = s1.basis().clone();
    let p2 = s2.projector();
    rest = &rest - &(&p2 * s1.basis());
    op_norm(&rest)
}

/// Gap metric ‖P₁ − P₂‖ (spectral norm); zero iff the subspaces agree.
pub fn gap(s1: &Subspace, s2: &Subspace) -> Result<f64> {
    s1.check_ambient(s2, "gap ambient")?;
    Ok(op_norm(&(&s1.projector() - &s2.projector())))
}

/// Intersection via the nullspace of the stacked complement projectors.
pub fn intersect(s1: &Subspace, s2: &Subspace) -> Result<Subspace> {
    s1.check_ambient(s2, "intersect ambient")?;
    let n = s1.ambient();
    let eye = CMatrix::identity(n);
    let stacked = (&eye - &s1.projector()).vstack(&(&eye - &s2.projector()));
    // unit-scale cutoff as in from_span: when the subspaces coincide the
    // stacked matrix is all rounding noise and the nullspace is everything
    let decomp = crate::numkernel::svd(&stacked)?;
    let smax = decomp.sigma.first().copied().unwrap_or(0.0);
    let cutoff = DEFAULT_RANK_TOL * smax.max(1.0);
    let rank = decomp.sigma.iter().take_while(|&&s| s > cutoff).count();
    Ok(Subspace { ambient: n, basis: decomp.v.block(0, rank, n, n - rank) })
}

/// Closed span of the union.
pub fn sum(s1: &Subspace, s2: &Subspace) -> Result<Subspace> {
    s1.check_ambient(s2, "sum ambient")?;
    Subspace::from_span(&s1.basis().hstack(s2.basis()))
}

/// Orthogonal complement.
pub fn complement(s: &Subspace) -> Result<Subspace> {
    let rk = svd_rank(&s.basis().adjoint(), DEFAULT_RANK_TOL)?;
    Ok(Subspace { ambient: s.ambient(), basis: rk.null_basis })
}

/// Invariance check of S under T with its residual.
#[derive(Debug, Clone, Copy)]
pub struct Invariance {
    /// ‖(I − P_S)·T·P_S‖.
    pub residual: f64,
    /// tol · max(1, ‖T‖).
    pub threshold: f64,
}

impl Invariance {
    pub fn holds(&self) -> bool {
        self.residual <= self.threshold
    }
}

/// Residual test for T·S ⊆ S at relative tolerance `tol`.
pub fn invariance(t: &CMatrix, s: &Subspace, tol: f64) -> Result<Invariance> {
    if !t.is_square() || t.rows() != s.ambient() {
        return Err(Error::dim("invariance operator vs ambient", t.rows(), s.ambient()));
    }
    let p = s.projector();
    let tp = t * &p;
    let residual = op_norm(&(&tp - &(&p * &tp)));
    Ok(Invariance { residual, threshold: tol * op_norm(t).max(1.0) })
}

pub fn is_invariant(t: &CMatrix, s: &Subspace, tol: f64) -> Result<bool> {
    Ok(invariance(t, s, tol)?.holds())
}

/// Splits x along the algebraic direct sum R ∔ N.
///
/// Requires dim R + dim N = n and the stacked frame [B_R B_N] to be
/// numerically invertible; the sine of the smallest principal angle between
/// R and N shows up as its smallest singular value.
pub fn oblique_decompose(
    x: &[Complex64],
    r: &Subspace,
    n_space: &Subspace,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    r.check_ambient(n_space, "oblique_decompose ambient")?;
    let n = r.ambient();
    if x.len() != n {
        return Err(Error::dim("oblique_decompose vector length", n, x.len()));
    }
    if r.dim() + n_space.dim() != n {
        return Err(Error::NotComplementary { sigma_min: 0.0 });
    }
    let stacked = r.basis().hstack(n_space.basis());
    let sv = crate::numkernel::singular_values(&stacked)?;
    let sigma_min = sv.last().copied().unwrap_or(0.0);
    if sigma_min <= 1e-12 * sv.first().copied().unwrap_or(1.0) {
        return Err(Error::NotComplementary { sigma_min });
    }
    let rhs = CMatrix::from_fn(n, 1, |i, _| x[i]);
    let coeffs = solve(&stacked, &rhs).map_err(|_| Error::NotComplementary { sigma_min })?;
    let mut xr = vec![Complex64::new(0.0, 0.0); n];
    let mut xn = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        for c in 0..r.dim() {
            xr[i] += r.basis()[(i, c)] * coeffs[(c, 0)];
        }
        for c in 0..n_space.dim() {
            xn[i] += n_space.basis()[(i, c)] * coeffs[(r.dim() + c, 0)];
        }
    }
    Ok((xr, xn))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn span_e1() -> Subspace {
        Subspace::coordinate(2, &[0])
    }

    fn span_diag() -> Subspace {
        let s = 1.0 / 2f64.sqrt();
        Subspace::from_basis(CMatrix::from_real_rows(&[&[s], &[s]])).unwrap()
    }

    #[test]
    fn projector_examples() {
        let p = span_e1().projector();
        assert!((&p - &CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]])).fro_norm() < 1e-14);

        assert_eq!(Subspace::zero(2).projector(), CMatrix::zeros(2, 2));

        let pd = span_diag().projector();
        let expected = CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!((&pd - &expected).fro_norm() < 1e-14);
    }

    #[test]
    fn leq_examples() {
        let e1 = span_e1();
        let e2 = Subspace::coordinate(2, &[1]);
        let full = Subspace::full(2);
        assert!(leq(&e1, &full, DEFAULT_PREDICATE_TOL).unwrap());
        assert!(!leq(&e1, &e2, DEFAULT_PREDICATE_TOL).unwrap());
        // residual of span (1,1)/sqrt(2) against span e1 is 1/sqrt(2)
        let r = leq_residual(&span_diag(), &e1);
        assert!((r - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gap_examples() {
        let e1 = span_e1();
        let e2 = Subspace::coordinate(2, &[1]);
        assert!(gap(&e1, &e1).unwrap() < 1e-14);
        assert!((gap(&e1, &e2).unwrap() - 1.0).abs() < 1e-12);
        // gap(span e1, span (cos t, sin t)) = |sin t|, here 0.5 at t = pi/6
        let t = std::f64::consts::PI / 6.0;
        let line = Subspace::from_basis(CMatrix::from_real_rows(&[&[t.cos()], &[t.sin()]])).unwrap();
        assert!((gap(&e1, &line).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lattice_examples() {
        let s12 = Subspace::coordinate(3, &[0, 1]);
        let s23 = Subspace::coordinate(3, &[1, 2]);
        let inter = intersect(&s12, &s23).unwrap();
        assert_eq!(inter.dim(), 1);
        assert!(gap(&inter, &Subspace::coordinate(3, &[1])).unwrap() < 1e-10);

        let e1 = Subspace::coordinate(2, &[0]);
        let e2 = Subspace::coordinate(2, &[1]);
        let s = sum(&e1, &e2).unwrap();
        assert!(s.is_full());

        let comp = complement(&span_diag()).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let expected = Subspace::from_basis(CMatrix::from_real_rows(&[&[s], &[-s]])).unwrap();
        assert!(gap(&comp, &expected).unwrap() < 1e-12);
    }

    #[test]
    fn complement_of_zero_is_full() {
        let z = Subspace::zero(3);
        let c = complement(&z).unwrap();
        assert!(c.is_full());
    }

    #[test]
    fn invariance_examples() {
        let t = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let e1 = span_e1();
        let e2 = Subspace::coordinate(2, &[1]);
        assert!(is_invariant(&CMatrix::identity(2), &e2, DEFAULT_PREDICATE_TOL).unwrap());
        assert!(is_invariant(&t, &e1, DEFAULT_PREDICATE_TOL).unwrap());
        assert!(!is_invariant(&t, &e2, DEFAULT_PREDICATE_TOL).unwrap());
    }

    #[test]
    fn oblique_orthogonal_case() {
        let r = Subspace::coordinate(2, &[0]);
        let n = Subspace::coordinate(2, &[1]);
        let x = [Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)];
        let (xr, xn) = oblique_decompose(&x, &r, &n).unwrap();
        assert!((xr[0].re - 3.0).abs() < 1e-14 && xr[1].norm() < 1e-14);
        assert!((xn[1].re - 4.0).abs() < 1e-14 && xn[0].norm() < 1e-14);
    }

    #[test]
    fn oblique_skew_case() {
        // R = span e1, N = span (1,1)/sqrt(2), x = (0,1) -> x_R = (-1,0), x_N = (1,1)
        let r = Subspace::coordinate(2, &[0]);
        let n = span_diag();
        let x = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let (xr, xn) = oblique_decompose(&x, &r, &n).unwrap();
        assert!((xr[0].re + 1.0).abs() < 1e-12 && xr[1].norm() < 1e-12);
        assert!((xn[0].re - 1.0).abs() < 1e-12 && (xn[1].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oblique_fixed_point_in_r() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = Subspace::random(4, 2, &mut rng);
        let n = complement(&r).unwrap();
        let x = r.basis().column(0);
        let (xr, xn) = oblique_decompose(&x, &r, &n).unwrap();
        for i in 0..4 {
            assert!((xr[i] - x[i]).norm() < 1e-12);
            assert!(xn[i].norm() < 1e-12);
        }
    }

    #[test]
    fn oblique_rejects_non_complementary() {
        let r = Subspace::coordinate(3, &[0]);
        let n = Subspace::coordinate(3, &[1]);
        let x = [Complex64::new(1.0, 0.0); 3];
        assert!(matches!(
            oblique_decompose(&x, &r, &n),
            Err(Error::NotComplementary { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn projector_is_idempotent_and_self_adjoint(seed in any::<u64>(), n in 1usize..8, kraw in 0usize..8) {
            let k = kraw.min(n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = Subspace::random(n, k, &mut rng);
            let p = s.projector();
            prop_assert!(op_norm(&(&(&p * &p) - &p)) <= 1e-12);
            prop_assert!(op_norm(&(&p.adjoint() - &p)) <= 1e-12);
        }

        #[test]
        fn gap_is_a_metric(seed in any::<u64>(), n in 2usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Subspace::random(n, (seed % n as u64) as usize, &mut rng);
            let b = Subspace::random(n, ((seed / 7) % n as u64) as usize, &mut rng);
            let c = Subspace::random(n, ((seed / 49) % n as u64) as usize, &mut rng);
            let dab = gap(&a, &b).unwrap();
            let dba = gap(&b, &a).unwrap();
            prop_assert!((dab - dba).abs() == 0.0);
            let dac = gap(&a, &c).unwrap();
            let dcb = gap(&c, &b).unwrap();
            prop_assert!(dab <= dac + dcb + 1e-10);
        }

        #[test]
        fn dimension_formula(seed in any::<u64>(), n in 1usize..8, k1 in 0usize..8, k2 in 0usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s1 = Subspace::random(n, k1.min(n), &mut rng);
            let s2 = Subspace::random(n, k2.min(n), &mut rng);
            let di = intersect(&s1, &s2).unwrap().dim();
            let ds = sum(&s1, &s2).unwrap().dim();
            prop_assert_eq!(di + ds, s1.dim() + s2.dim());
        }

        #[test]
        fn oblique_matches_orthogonal_projection_on_complements(seed in any::<u64>(), n in 2usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = 1 + (seed % (n as u64 - 1)) as usize;
            let r = Subspace::random(n, k, &mut rng);
            let nc = complement(&r).unwrap();
            let x: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new((i as f64 * 0.37).sin() + seed as f64 * 1e-19, (i as f64 - 1.5).cos()))
                .collect();
            let (xr, _) = oblique_decompose(&x, &r, &nc).unwrap();
            let px = r.projector().apply(&x);
            for i in 0..n {
                prop_assert!((xr[i] - px[i]).norm() < 1e-10);
            }
        }
    }
}
