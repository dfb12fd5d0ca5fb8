//! Command implementations behind the `idemlab` binary. Each command
//! returns a deterministic JSON-ready report; wall time is added by the
//! binary so reports stay byte-identical across runs.

use super::io::MatrixFile;
use super::trials::{run_suite, Suite};
use crate::error::{Error, Result};
use crate::essential::DEFAULT_EPS_MAX;
use crate::idempotent::{ando_form, default_idempotency_tol, Idempotent, KAPPA_WARN};
use crate::numkernel::{eig, op_norm, random_matrix, CMatrix};
use crate::pairs::extract_invariant_with_trace;
use crate::spectral::quasinilpotency_report;
use crate::subspace::{invariance, Subspace, DEFAULT_PREDICATE_TOL};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::str::FromStr;

/// Whether a finished command maps to exit 0 or to the validation exit (2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Success,
    Validation,
}

#[derive(Debug, Clone)]
pub struct CommandReport {
    pub command: &'static str,
    pub pass: bool,
    pub exit_class: ExitClass,
    pub warnings: Vec<String>,
    pub body: Value,
    /// Eigenvalue list used by `--csv`.
    pub primary_spectrum: Vec<Complex64>,
}

fn spectrum_json(values: &[Complex64]) -> Value {
    Value::Array(values.iter().map(|z| json!([z.re, z.im])).collect())
}

fn matrix_json(m: &CMatrix) -> Value {
    serde_json::to_value(MatrixFile::from_matrix(m)).expect("matrix serialization")
}

fn is_validation_error(e: &Error) -> bool {
    matches!(
        e,
        Error::NotIdempotent { .. }
            | Error::PreconditionViolated(_)
            | Error::NotNearIdempotent { .. }
            | Error::NotEpsCommuting { .. }
            | Error::ExtractionFailed
            | Error::Certification { .. }
            | Error::SpectrumViolation { .. }
            | Error::ContourTooClose { .. }
            | Error::NoSpectralGap { .. }
            | Error::DegenerateGeometry { .. }
    )
}

fn validation_report(command: &'static str, err: &Error, body: Value) -> CommandReport {
    let mut map = serde_json::Map::new();
    map.insert("error".into(), Value::String(err.to_string()));
    if let Value::Object(extra) = body {
        for (k, v) in extra {
            map.insert(k, v);
        }
    }
    CommandReport {
        command,
        pass: false,
        exit_class: ExitClass::Validation,
        warnings: Vec::new(),
        body: Value::Object(map),
        primary_spectrum: Vec::new(),
    }
}

/// Validate an idempotent and emit its block form, similarity, conditioning
/// data, and witness operator.
pub fn cmd_decompose(t: &CMatrix, tol: Option<f64>) -> Result<CommandReport> {
    let tol = tol.unwrap_or_else(|| default_idempotency_tol(t));
    let e = match Idempotent::validate(t, tol) {
        Ok(e) => e,
        Err(err @ Error::NotIdempotent { residual, .. }) => {
            return Ok(validation_report(
                "decompose",
                &err,
                json!({"idempotency_residual": residual, "tolerance": tol}),
            ));
        }
        Err(err) => return Err(err),
    };
    let form = ando_form(&e)?;
    let witness = form.witness();
    let eye = CMatrix::identity(e.dim());
    let witness_deviation = op_norm(&(&(&witness + e.matrix()) - &eye));
    let spectrum = eig(t)?;

    let mut warnings = Vec::new();
    if form.is_ill_conditioned() {
        warnings.push(format!(
            "restricted projection is ill-conditioned (kappa {:.3e} > {KAPPA_WARN:.0e})",
            form.kappa
        ));
    }

    let body = json!({
        "input": matrix_json(t),
        "n": e.dim(),
        "rank": e.rank(),
        "tolerance": tol,
        "idempotency_residual": e.residual(),
        "kappa": form.kappa,
        "kappa_v": form.kappa_v,
        "x_block": matrix_json(&form.x),
        "v": matrix_json(&form.v),
        "v_inv": matrix_json(&form.v_inv),
        "witness": matrix_json(&witness),
        "block_residual": form.block_residual,
        "similarity_residual": form.similarity_residual,
        "witness_deviation": witness_deviation,
        "range_basis": matrix_json(e.range().basis()),
        "spectrum": spectrum_json(&spectrum),
    });
    Ok(CommandReport {
        command: "decompose",
        pass: true,
        exit_class: ExitClass::Success,
        warnings,
        body,
        primary_spectrum: spectrum,
    })
}

/// Matrix of the constant-target composition operator on polynomial
/// coefficients {1, z, ..., z^degree}: row 0 holds (1, α, α², ...).
pub fn hardy_matrix(alpha: Complex64, degree: usize) -> CMatrix {
    let n = degree + 1;
    let mut m = CMatrix::zeros(n, n);
    let mut power = Complex64::new(1.0, 0.0);
    for j in 0..n {
        m[(0, j)] = power;
        power *= alpha;
    }
    m
}

fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Composition-operator demo: validates the coefficient matrix, compares
/// invariance verdicts for span{1,z} and span{z}, and checks the witness
/// action f ↦ f − f(α) against a polynomial-evaluation oracle.
pub fn cmd_hardy(alpha: Complex64, degree: usize, seed: u64, tol: Option<f64>) -> Result<CommandReport> {
    if alpha.norm() >= 1.0 {
        return Err(Error::BadParameters(format!("|alpha| must be < 1, got {}", alpha.norm())));
    }
    if degree < 1 {
        return Err(Error::BadParameters("degree must be at least 1".into()));
    }
    let tol = tol.unwrap_or(DEFAULT_PREDICATE_TOL);
    let n = degree + 1;
    let c = hardy_matrix(alpha, degree);
    let e = Idempotent::validate_default(&c)?;
    let witness = crate::idempotent::witness_operator(&e)?;

    let span_1z = Subspace::coordinate(n, &[0, 1]);
    let span_z = Subspace::coordinate(n, &[1]);
    let inv_1z_t = invariance(&c, &span_1z, tol)?;
    let inv_1z_w = invariance(&witness, &span_1z, tol)?;
    let inv_z_t = invariance(&c, &span_z, tol)?;
    let inv_z_w = invariance(&witness, &span_z, tol)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut witness_max_error = 0.0f64;
    for _ in 0..50 {
        let coeffs = random_matrix(n, 1, &mut rng).column(0);
        let shifted = witness.apply(&coeffs);
        let value = horner(&coeffs, alpha);
        let mut err = 0.0f64;
        for (i, w_i) in shifted.iter().enumerate() {
            let expected = if i == 0 { coeffs[0] - value } else { coeffs[i] };
            err += (w_i - expected).norm_sqr();
        }
        witness_max_error = witness_max_error.max(err.sqrt());
    }

    let z_expected = alpha.norm() == 0.0;
    let pass = inv_1z_t.holds()
        && inv_1z_w.holds()
        && inv_z_t.holds() == z_expected
        && inv_z_w.holds() == z_expected
        && witness_max_error <= 1e-10;
    let spectrum = eig(&c)?;

    let body = json!({
        "alpha": [alpha.re, alpha.im],
        "degree": degree,
        "tolerance": tol,
        "idempotency_residual": e.residual(),
        "span_1z": {
            "invariant_under_t": inv_1z_t.holds(),
            "invariant_under_witness": inv_1z_w.holds(),
            "residual_t": inv_1z_t.residual,
        },
        "span_z": {
            "invariant_under_t": inv_z_t.holds(),
            "invariant_under_witness": inv_z_w.holds(),
            "residual_t": inv_z_t.residual,
            "expected": z_expected,
        },
        "witness_max_error": witness_max_error,
        "witness_trials": 50,
        "spectrum": spectrum_json(&spectrum),
    });
    Ok(CommandReport {
        command: "hardy",
        pass,
        exit_class: if pass { ExitClass::Success } else { ExitClass::Validation },
        warnings: Vec::new(),
        body,
        primary_spectrum: spectrum,
    })
}

/// Full pipeline from a quasinilpotent operator to a certified invariant
/// subspace, reporting every intermediate object.
pub fn cmd_pipeline_nrr(a: &CMatrix) -> Result<CommandReport> {
    let qnil = match quasinilpotency_report(a, crate::spectral::DEFAULT_QNIL_TOL) {
        Ok(q) => q,
        Err(err) => return Err(err),
    };
    let qnil_json = json!({
        "spectral_radius": qnil.spectral_radius,
        "radius_threshold": qnil.radius_threshold,
        "radius_pass": qnil.radius_pass,
        "power_norm": qnil.power_norm,
        "power_pass": qnil.power_pass,
    });
    let trace = match extract_invariant_with_trace(a) {
        Ok(t) => t,
        Err(err) if is_validation_error(&err) => {
            return Ok(validation_report(
                "pipeline-nrr",
                &err,
                json!({"input": matrix_json(a), "quasinilpotency": qnil_json}),
            ));
        }
        Err(err) => return Err(err),
    };

    let d_spectrum = trace.pair.commutator_spectrum.eigenvalues.clone();
    let body = json!({
        "input": matrix_json(a),
        "quasinilpotency": qnil_json,
        "t1": matrix_json(trace.pair.t1.matrix()),
        "t2": matrix_json(trace.pair.t2.matrix()),
        "commutator_spectrum": spectrum_json(&d_spectrum),
        "common_subspace": {
            "basis": matrix_json(trace.common.m.basis()),
            "dim": trace.common.m.dim(),
            "residual_t1": trace.common.residual_t1,
            "residual_t2": trace.common.residual_t2,
            "m0_spectrum": spectrum_json(&trace.common.intermediate.m0_spectrum),
        },
        "split": {
            "range_dim": trace.split_range.dim(),
            "null_dim": trace.split_null.dim(),
        },
        "branch": trace.branch,
        "invariant_subspace": {
            "basis": matrix_json(trace.subspace.basis()),
            "dim": trace.subspace.dim(),
            "residual": trace.residual,
        },
    });
    Ok(CommandReport {
        command: "pipeline-nrr",
        pass: true,
        exit_class: ExitClass::Success,
        warnings: Vec::new(),
        body,
        primary_spectrum: d_spectrum,
    })
}

/// Batch runner over the named suites.
pub fn cmd_trials(
    suite: &str,
    count: usize,
    seed: u64,
    max_dim: Option<usize>,
) -> Result<CommandReport> {
    let suite = Suite::from_str(suite)?;
    let max_dim = max_dim.unwrap_or_else(|| suite.default_max_dim());
    let report = run_suite(suite, count, seed, max_dim);
    let pass = report.pass;
    let body = serde_json::to_value(&report).expect("suite report serialization");
    Ok(CommandReport {
        command: "trials",
        pass,
        exit_class: if pass { ExitClass::Success } else { ExitClass::Validation },
        warnings: Vec::new(),
        body,
        primary_spectrum: Vec::new(),
    })
}

/// Classifier entry used by demos: kept here so the binary surface and the
/// examples share one code path.
pub fn classify_matrix(t: &CMatrix) -> Result<Value> {
    let out = crate::essential::nearest_exact_idempotent(t, DEFAULT_EPS_MAX)?;
    Ok(json!({
        "case": format!("{:?}", out.case),
        "distance": out.distance,
        "eps": out.eps,
        "clusters": [out.clusters.0, out.clusters.1],
        "rank": out.s.rank(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_t0_report() {
        let t = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let rep = cmd_decompose(&t, None).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.body["rank"], json!(1));
        let x = rep.body["x_block"]["entries"][0].as_array().unwrap();
        let x_abs = (x[0].as_f64().unwrap().powi(2) + x[1].as_f64().unwrap().powi(2)).sqrt();
        assert!((x_abs - 1.0).abs() < 1e-10);
        assert!(rep.body["idempotency_residual"].as_f64().unwrap() < 1e-12);
    }

    #[test]
    fn decompose_orthogonal_projection_has_identity_similarity() {
        let t = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let rep = cmd_decompose(&t, None).unwrap();
        assert!(rep.pass);
        let v = MatrixFile {
            rows: rep.body["v"]["rows"].as_u64().unwrap() as usize,
            cols: rep.body["v"]["cols"].as_u64().unwrap() as usize,
            entries: serde_json::from_value(rep.body["v"]["entries"].clone()).unwrap(),
        }
        .to_matrix()
        .unwrap();
        assert!(op_norm(&(&v - &CMatrix::identity(2))) < 1e-12);
    }

    #[test]
    fn decompose_rejects_non_idempotent_with_report() {
        let t = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let rep = cmd_decompose(&t, None).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.exit_class, ExitClass::Validation);
        assert!((rep.body["idempotency_residual"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hardy_standard_demo() {
        let rep = cmd_hardy(Complex64::new(0.5, 0.0), 8, 0, None).unwrap();
        assert!(rep.pass, "{}", rep.body);
        assert_eq!(rep.body["span_1z"]["invariant_under_t"], json!(true));
        assert_eq!(rep.body["span_z"]["invariant_under_t"], json!(false));
        assert!(rep.body["witness_max_error"].as_f64().unwrap() <= 1e-10);
    }

    #[test]
    fn hardy_alpha_zero_makes_span_z_invariant() {
        let rep = cmd_hardy(Complex64::new(0.0, 0.0), 5, 0, None).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.body["span_z"]["invariant_under_t"], json!(true));
    }

    #[test]
    fn hardy_witness_matches_shift_example() {
        // f = 1 + 2z at alpha = 0.5: f(alpha) = 2, so W f = f - 2 = -1 + 2z
        let c = hardy_matrix(Complex64::new(0.5, 0.0), 3);
        let e = Idempotent::validate_default(&c).unwrap();
        let w = crate::idempotent::witness_operator(&e).unwrap();
        let f = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let shifted = w.apply(&f);
        assert!((shifted[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-10);
        assert!((shifted[1] - Complex64::new(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn hardy_rejects_alpha_outside_disc() {
        assert!(matches!(
            cmd_hardy(Complex64::new(1.5, 0.0), 4, 0, None),
            Err(Error::BadParameters(_))
        ));
    }

    #[test]
    fn pipeline_on_jordan_block() {
        let a = CMatrix::from_real_rows(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        let rep = cmd_pipeline_nrr(&a).unwrap();
        assert!(rep.pass, "{}", rep.body);
        assert!(rep.body["invariant_subspace"]["residual"].as_f64().unwrap() <= 1e-7);
    }

    #[test]
    fn pipeline_rejects_non_quasinilpotent() {
        let a = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let rep = cmd_pipeline_nrr(&a).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.exit_class, ExitClass::Validation);
    }

    #[test]
    fn trials_command_small_run() {
        let rep = cmd_trials("lat-equiv", 5, 42, Some(8)).unwrap();
        assert!(rep.pass, "{}", rep.body);
        assert_eq!(rep.body["pass_count"], json!(5));
    }

    #[test]
    fn trials_unknown_suite() {
        assert!(matches!(cmd_trials("bogus", 1, 0, None), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn reports_are_deterministic() {
        let a = cmd_hardy(Complex64::new(0.3, 0.2), 6, 9, None).unwrap();
        let b = cmd_hardy(Complex64::new(0.3, 0.2), 6, 9, None).unwrap();
        assert_eq!(
            serde_json::to_string(&a.body).unwrap(),
            serde_json::to_string(&b.body).unwrap()
        );
    }
}
