//! Spectra, desk-scale quasinilpotency, Riesz projections by contour
//! quadrature, and the spectral identities for idempotent pairs.

use crate::error::{Error, Result};
use crate::idempotent::Idempotent;
use crate::numkernel::{eig, hausdorff, inverse, op_norm, CMatrix};
use crate::subspace::{invariance, Subspace};
use num_complex::Complex64;

/// Default node count for contour quadrature.
pub const DEFAULT_CONTOUR_NODES: usize = 256;

/// Distance at which a point is identified with one of the excluded
/// spectral points {0, 1, −1} in the pair identities.
pub const MEMBERSHIP_TOL: f64 = 1e-7;

/// Hausdorff threshold declaring the product/difference identity satisfied.
pub const IDENTITY_TOL: f64 = 1e-6;

/// Node-doubling delta above which the quadrature is declared unconverged.
pub const QUADRATURE_CONV_TOL: f64 = 1e-9;

/// Relative tolerance for the desk quasinilpotency test.
pub const DEFAULT_QNIL_TOL: f64 = 1e-8;

/// Eigenvalue multiset of an operator, with the spectral radius.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    pub spectral_radius: f64,
}

impl SpectrumReport {
    pub fn of(t: &CMatrix) -> Result<Self> {
        let eigenvalues = eig(t)?;
        let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(SpectrumReport { eigenvalues, spectral_radius })
    }
}

/// Desk-scale quasinilpotency evidence: the spectral-radius test and the
/// n-th power cross-check (at finite dimension quasinilpotent = nilpotent).
#[derive(Debug, Clone, Copy)]
pub struct QuasinilpotencyReport {
    pub spectral_radius: f64,
    pub radius_threshold: f64,
    pub radius_pass: bool,
    pub power_norm: f64,
    pub power_threshold: f64,
    pub power_pass: bool,
}

pub fn quasinilpotency_report(t: &CMatrix, tol: f64) -> Result<QuasinilpotencyReport> {
    let spec = SpectrumReport::of(t)?;
    let norm = op_norm(t);
    let radius_threshold = tol * norm.max(1.0);
    let power_norm = op_norm(&t.pow(t.rows()));
    let power_threshold = tol * norm.powi(t.rows() as i32);
    Ok(QuasinilpotencyReport {
        spectral_radius: spec.spectral_radius,
        radius_threshold,
        radius_pass: spec.spectral_radius <= radius_threshold,
        power_norm,
        power_threshold,
        power_pass: power_norm <= power_threshold,
    })
}

/// True iff the spectral radius is below `tol · max(1, ‖T‖)`.
pub fn is_quasinilpotent_desk(t: &CMatrix, tol: f64) -> Result<bool> {
    Ok(quasinilpotency_report(t, tol)?.radius_pass)
}

/// Circular contour validated against a spectrum: no eigenvalue may sit on
/// the annulus of relative width 1e−3 around the circle.
#[derive(Debug, Clone, Copy)]
pub struct Contour {
    pub center: Complex64,
    pub radius: f64,
    pub nodes: usize,
}

impl Contour {
    pub fn new(center: Complex64, radius: f64, nodes: usize, spec: &SpectrumReport) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::BadParameters(format!("contour radius must be positive, got {radius}")));
        }
        if nodes < 16 {
            return Err(Error::BadParameters(format!("contour needs at least 16 nodes, got {nodes}")));
        }
        let required = radius * 1e-3;
        for ev in &spec.eigenvalues {
            let distance = ((ev - center).norm() - radius).abs();
            if distance < required {
                return Err(Error::ContourTooClose { distance, required });
            }
        }
        Ok(Contour { center, radius, nodes })
    }
}

/// Riesz projection data: the quadrature output with its certificates.
#[derive(Debug, Clone)]
pub struct RieszResult {
    pub p: CMatrix,
    pub idempotency_residual: f64,
    pub invariance_residual_range: f64,
    pub invariance_residual_null: f64,
    /// Eigenvalues of T strictly inside the contour.
    pub inside_spectrum: Vec<Complex64>,
    /// Node-doubling delta of the quadrature.
    pub convergence_delta: f64,
    pub range: Subspace,
    pub null: Subspace,
}

/// Trapezoid sum of (1/2πi)∮(λ−T)⁻¹dλ over `nodes` points, with the phase
/// `offset` (in node units) selecting the plain grid or the midpoints.
fn contour_quadrature(t: &CMatrix, contour: &Contour, nodes: usize, offset: f64) -> Result<CMatrix> {
    let n = t.rows();
    let mut acc = CMatrix::zeros(n, n);
    for k in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * (k as f64 + offset) / nodes as f64;
        let dir = Complex64::new(theta.cos(), theta.sin());
        let lambda = contour.center + dir * contour.radius;
        let mut shifted = -t;
        for i in 0..n {
            shifted[(i, i)] += lambda;
        }
        let res = inverse(&shifted).map_err(|_| Error::ContourTooClose {
            distance: 0.0,
            required: contour.radius * 1e-3,
        })?;
        acc = &acc + &res.scale(dir * contour.radius);
    }
    Ok(acc.scale_re(1.0 / nodes as f64))
}

/// Riesz spectral projection by contour quadrature.
///
/// The separation precondition is re-verified against a fresh spectrum of T;
/// the quadrature runs at `nodes` and `2·nodes` and the refined value is
/// returned with the doubling delta as its convergence certificate.
pub fn riesz_projection(t: &CMatrix, contour: &Contour) -> Result<RieszResult> {
    if !t.is_square() {
        return Err(Error::dim("riesz_projection matrix must be square", t.rows(), t.cols()));
    }
    let spec = SpectrumReport::of(t)?;
    let required = contour.radius * 1e-3;
    for ev in &spec.eigenvalues {
        let distance = ((ev - contour.center).norm() - contour.radius).abs();
        if distance < required {
            return Err(Error::ContourTooClose { distance, required });
        }
    }

    let coarse = contour_quadrature(t, contour, contour.nodes, 0.0)?;
    let mid = contour_quadrature(t, contour, contour.nodes, 0.5)?;
    let fine = (&coarse + &mid).scale_re(0.5);
    let convergence_delta = op_norm(&(&fine - &coarse));
    if convergence_delta > QUADRATURE_CONV_TOL {
        return Err(Error::QuadratureNotConverged { delta: convergence_delta });
    }
    let p = fine;

    let idempotency_residual = op_norm(&(&(&p * &p) - &p));
    let eye = CMatrix::identity(t.rows());
    let range = Subspace::from_span(&p)?;
    let null = Subspace::from_span(&(&eye - &p))?;
    let inv_r = invariance(t, &range, 1.0)?;
    let inv_n = invariance(t, &null, 1.0)?;
    let inside_spectrum: Vec<Complex64> = spec
        .eigenvalues
        .iter()
        .copied()
        .filter(|ev| (ev - contour.center).norm() < contour.radius)
        .collect();

    Ok(RieszResult {
        p,
        idempotency_residual,
        invariance_residual_range: inv_r.residual,
        invariance_residual_null: inv_n.residual,
        inside_spectrum,
        convergence_delta,
        range,
        null,
    })
}

/// Spectrum of T compressed to a subspace, i.e. of B*·T·B in the frame B.
pub fn restricted_spectrum(t: &CMatrix, s: &Subspace) -> Result<Vec<Complex64>> {
    let b = s.basis();
    eig(&(&(&b.adjoint() * t) * b))
}

/// Places a circle around the eigenvalue cluster at `target`.
///
/// The radius is the midpoint of the radial gap between the near cluster
/// (within `min_gap` of the target) and the rest of the spectrum. With no
/// near eigenvalues the call fails unless `allow_empty`, in which case the
/// circle has radius half the distance to the nearest eigenvalue.
pub fn cluster_contour(
    spec: &SpectrumReport,
    target: Complex64,
    min_gap: f64,
    allow_empty: bool,
    nodes: usize,
) -> Result<Contour> {
    if spec.eigenvalues.is_empty() {
        return Err(Error::NoSpectralGap { detail: "empty spectrum".into() });
    }
    let dists: Vec<f64> = spec.eigenvalues.iter().map(|ev| (ev - target).norm()).collect();
    let inner = dists.iter().copied().filter(|&d| d <= min_gap).fold(f64::NEG_INFINITY, f64::max);
    let outer = dists.iter().copied().filter(|&d| d > min_gap).fold(f64::INFINITY, f64::min);

    if inner == f64::NEG_INFINITY {
        if !allow_empty {
            return Err(Error::NoSpectralGap {
                detail: format!("no eigenvalue within {min_gap} of the target"),
            });
        }
        let radius = outer / 2.0;
        return Contour::new(target, radius, nodes, spec);
    }
    if outer == f64::INFINITY {
        // the whole spectrum clusters at the target: enclose everything
        let radius = inner + inner.max(1.0);
        return Contour::new(target, radius, nodes, spec);
    }

    let radius = 0.5 * (inner + outer);
    let gap_width = outer - inner;
    let resolution = 2.0 * std::f64::consts::PI * radius / DEFAULT_CONTOUR_NODES as f64;
    if gap_width < 10.0 * resolution {
        return Err(Error::NoSpectralGap {
            detail: format!("gap {gap_width:.3e} below 10x quadrature resolution {resolution:.3e}"),
        });
    }
    Contour::new(target, radius, nodes, spec)
}

/// Both sides of the product/difference spectral identity
/// σ(pq)∖{0,1} = {1−μ² : μ ∈ σ(p−q)∖{0,±1}}, with their Hausdorff distance.
#[derive(Debug, Clone)]
pub struct ProductDifferenceReport {
    pub product_side: Vec<Complex64>,
    pub difference_side: Vec<Complex64>,
    pub hausdorff_distance: f64,
}

impl ProductDifferenceReport {
    pub fn holds(&self) -> bool {
        self.hausdorff_distance <= IDENTITY_TOL
    }
}

pub fn product_difference_identity(p: &Idempotent, q: &Idempotent) -> Result<ProductDifferenceReport> {
    if p.dim() != q.dim() {
        return Err(Error::dim("pair dimensions", p.dim(), q.dim()));
    }
    let one = Complex64::new(1.0, 0.0);
    let excluded_prod = [Complex64::new(0.0, 0.0), one];
    let excluded_diff = [Complex64::new(0.0, 0.0), one, -one];

    let product_side: Vec<Complex64> = eig(&(p.matrix() * q.matrix()))?
        .into_iter()
        .filter(|z| excluded_prod.iter().all(|e| (z - e).norm() > MEMBERSHIP_TOL))
        .collect();
    let difference_side: Vec<Complex64> = eig(&(p.matrix() - q.matrix()))?
        .into_iter()
        .filter(|z| excluded_diff.iter().all(|e| (z - e).norm() > MEMBERSHIP_TOL))
        .map(|mu| one - mu * mu)
        .collect();

    let hausdorff_distance = hausdorff(&product_side, &difference_side);
    Ok(ProductDifferenceReport { product_side, difference_side, hausdorff_distance })
}

/// Residual of the algebraic identity (p−q)⁴ − (p−q)² = (pq − qp)².
#[derive(Debug, Clone, Copy)]
pub struct CommutatorIdentity {
    pub residual: f64,
    pub threshold: f64,
}

impl CommutatorIdentity {
    pub fn holds(&self) -> bool {
        self.residual <= self.threshold
    }
}

pub fn commutator_identity(p: &Idempotent, q: &Idempotent) -> Result<CommutatorIdentity> {
    if p.dim() != q.dim() {
        return Err(Error::dim("pair dimensions", p.dim(), q.dim()));
    }
    let diff = p.matrix() - q.matrix();
    let d = &(p.matrix() * q.matrix()) - &(q.matrix() * p.matrix());
    let lhs = &diff.pow(4) - &diff.pow(2);
    let residual = op_norm(&(&lhs - &(&d * &d)));
    let scale = 1.0 + op_norm(p.matrix()) + op_norm(q.matrix());
    Ok(CommutatorIdentity { residual, threshold: 1e-8 * scale.powi(4) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idempotent::random_idempotent;
    use crate::subspace::gap;

    fn spec_of(t: &CMatrix) -> SpectrumReport {
        SpectrumReport::of(t).unwrap()
    }

    #[test]
    fn quasinilpotent_examples() {
        let mut strictly_upper = CMatrix::zeros(4, 4);
        for i in 0..3 {
            strictly_upper[(i, i + 1)] = Complex64::new(1.0 + i as f64, -0.5);
        }
        assert!(is_quasinilpotent_desk(&strictly_upper, DEFAULT_QNIL_TOL).unwrap());

        let diag = CMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1e-3]]);
        assert!(!is_quasinilpotent_desk(&diag, DEFAULT_QNIL_TOL).unwrap());

        assert!(is_quasinilpotent_desk(&CMatrix::zeros(3, 3), DEFAULT_QNIL_TOL).unwrap());
    }

    #[test]
    fn quasinil_power_cross_check_agrees_on_nilpotents() {
        let mut j = CMatrix::zeros(5, 5);
        for i in 0..4 {
            j[(i, i + 1)] = Complex64::new(2.0, 1.0);
        }
        let report = quasinilpotency_report(&j, DEFAULT_QNIL_TOL).unwrap();
        assert!(report.radius_pass && report.power_pass);
    }

    #[test]
    fn riesz_isolated_diagonal_eigenvalue() {
        let t = CMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 2.0]]);
        let contour =
            Contour::new(Complex64::new(2.0, 0.0), 1.0, DEFAULT_CONTOUR_NODES, &spec_of(&t)).unwrap();
        let out = riesz_projection(&t, &contour).unwrap();
        let expected = CMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]);
        assert!(op_norm(&(&out.p - &expected)) < 1e-12);
        assert_eq!(out.inside_spectrum.len(), 1);
    }

    #[test]
    fn riesz_non_normal_matches_hand_projector() {
        // T = [[0,1],[0,2]] satisfies T^2 = 2T, so the projector at the
        // eigenvalue 2 is T/2 = [[0, 0.5],[0, 1]]
        let t = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 2.0]]);
        let contour =
            Contour::new(Complex64::new(2.0, 0.0), 1.0, DEFAULT_CONTOUR_NODES, &spec_of(&t)).unwrap();
        let out = riesz_projection(&t, &contour).unwrap();
        let expected = CMatrix::from_real_rows(&[&[0.0, 0.5], &[0.0, 1.0]]);
        assert!(op_norm(&(&out.p - &expected)) < 1e-9);
        assert!(out.idempotency_residual < 1e-10);
    }

    #[test]
    fn riesz_recovers_range_projection_of_idempotent() {
        let e = random_idempotent(6, 2, 1.0, 19).unwrap();
        let contour = Contour::new(
            Complex64::new(1.0, 0.0),
            0.5,
            DEFAULT_CONTOUR_NODES,
            &spec_of(e.matrix()),
        )
        .unwrap();
        let out = riesz_projection(e.matrix(), &contour).unwrap();
        assert!(gap(&out.range, e.range()).unwrap() < 1e-8);
        assert!(out.invariance_residual_range < 1e-9);
        assert!(out.invariance_residual_null < 1e-9);
    }

    #[test]
    fn contour_rejects_eigenvalue_on_circle() {
        let t = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let spec = spec_of(&t);
        assert!(matches!(
            Contour::new(Complex64::new(0.0, 0.0), 1.0, 64, &spec),
            Err(Error::ContourTooClose { .. })
        ));
    }

    #[test]
    fn quadrature_node_doubling_is_tiny() {
        let t = CMatrix::from_real_rows(&[&[0.3, 1.0, 0.0], &[0.0, 0.1, 0.5], &[0.0, 0.0, 2.0]]);
        let spec = spec_of(&t);
        let contour = Contour::new(Complex64::new(2.0, 0.0), 0.8, 256, &spec).unwrap();
        let out = riesz_projection(&t, &contour).unwrap();
        assert!(out.convergence_delta <= 1e-10, "delta {}", out.convergence_delta);
    }

    #[test]
    fn riesz_partition_sums_to_identity() {
        let t = CMatrix::from_real_rows(&[&[0.0, 0.4], &[0.0, 2.0]]);
        let spec = spec_of(&t);
        let c0 = cluster_contour(&spec, Complex64::new(0.0, 0.0), 0.25, false, 256).unwrap();
        let c1 = cluster_contour(&spec, Complex64::new(2.0, 0.0), 0.25, false, 256).unwrap();
        let p0 = riesz_projection(&t, &c0).unwrap().p;
        let p1 = riesz_projection(&t, &c1).unwrap().p;
        assert!(op_norm(&(&(&p0 + &p1) - &CMatrix::identity(2))) < 1e-9);
        let commute = &(&p1 * &t) - &(&t * &p1);
        assert!(op_norm(&commute) <= 1e-8 * op_norm(&t));
    }

    #[test]
    fn cluster_contour_examples() {
        // spectrum {0, 1}, target 1 -> center 1, radius 0.5
        let spec = spec_of(&CMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]));
        let c = cluster_contour(&spec, Complex64::new(1.0, 0.0), 0.25, false, 256).unwrap();
        assert!((c.radius - 0.5).abs() < 1e-12);

        // spectrum {0, 0.1, 1}, target 0: gap (0.1, 1) has midpoint 0.55
        let spec = spec_of(&CMatrix::from_real_rows(&[
            &[0.0, 0.0, 0.0],
            &[0.0, 0.1, 0.0],
            &[0.0, 0.0, 1.0],
        ]));
        let c = cluster_contour(&spec, Complex64::new(0.0, 0.0), 0.25, false, 256).unwrap();
        assert!((c.radius - 0.55).abs() < 1e-12);

        // spectrum {1}, target 0: empty interior policy
        let spec = spec_of(&CMatrix::from_real_rows(&[&[1.0]]));
        assert!(matches!(
            cluster_contour(&spec, Complex64::new(0.0, 0.0), 0.25, false, 256),
            Err(Error::NoSpectralGap { .. })
        ));
        let c = cluster_contour(&spec, Complex64::new(0.0, 0.0), 0.25, true, 256).unwrap();
        assert!((c.radius - 0.5).abs() < 1e-12);
    }

    #[test]
    fn product_difference_identity_trivial_cases() {
        let p = random_idempotent(4, 2, 1.0, 5).unwrap();
        let rep = product_difference_identity(&p, &p).unwrap();
        assert!(rep.product_side.is_empty());
        assert!(rep.difference_side.is_empty());
        assert_eq!(rep.hausdorff_distance, 0.0);

        let t0 = Idempotent::validate_default(&CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]))
            .unwrap();
        let q = Idempotent::validate_default(&CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]))
            .unwrap();
        let rep = product_difference_identity(&t0, &q).unwrap();
        assert!(rep.product_side.is_empty(), "{:?}", rep.product_side);
        assert!(rep.difference_side.is_empty(), "{:?}", rep.difference_side);
    }

    #[test]
    fn product_difference_identity_random_pairs() {
        for seed in 0..25 {
            let n = 3 + (seed as usize % 6);
            let p = random_idempotent(n, 1 + seed as usize % (n - 1), 1.0, 900 + seed).unwrap();
            let q = random_idempotent(n, 1 + (seed as usize / 2) % (n - 1), 1.3, 1900 + seed).unwrap();
            let rep = product_difference_identity(&p, &q).unwrap();
            assert!(rep.holds(), "seed {seed}: distance {}", rep.hausdorff_distance);
        }
    }

    #[test]
    fn commutator_identity_cases() {
        let p = random_idempotent(5, 2, 1.0, 31).unwrap();
        let same = commutator_identity(&p, &p).unwrap();
        assert!(same.residual < 1e-12);

        // commuting pair: diagonal projections
        let a = Idempotent::validate_default(&CMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0],
        ]))
        .unwrap();
        let b = Idempotent::validate_default(&CMatrix::from_real_rows(&[
            &[0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0],
        ]))
        .unwrap();
        let rep = commutator_identity(&a, &b).unwrap();
        assert!(rep.residual <= 1e-10);

        for seed in 0..15 {
            let n = 4 + (seed as usize % 5);
            let p = random_idempotent(n, 1 + seed as usize % (n - 1), 1.4, 70 + seed).unwrap();
            let q = random_idempotent(n, 1 + (3 * seed as usize) % (n - 1), 0.8, 170 + seed).unwrap();
            let rep = commutator_identity(&p, &q).unwrap();
            assert!(rep.holds(), "seed {seed}: residual {}", rep.residual);
        }
    }
}
