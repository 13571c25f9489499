//! Numerical verification of the canonical-mean theorems by direct
//! minimization over the cone, plus analytical-gradient checks, the
//! mean-axiom auditor, and operator-monotonicity sampling.
//!
//! The minimizer works on the unconstrained parametrization `M = exp(S)`
//! with `S` symmetric, so iterates stay in the cone by construction; the
//! chain rule through the exponential reuses the Daleckii–Krein divided
//! differences. Descent directions are plain gradients; step sizes start
//! from a Barzilai–Borwein spectral estimate and are backtracked under
//! the Armijo condition, which keeps the iteration count flat across the
//! sampled conditioning range.
//!
//! Sample sweeps are embarrassingly parallel: each sample is a pure
//! function of `(seed, index)`, so reports merge by reduction. With the
//! `parallel` feature (default) sweeps run on rayon; the `*_sequential`
//! entry points always run serially and exist for benchmarking and
//! debugging.

use crate::divergences::{forward_raw, reverse_raw, SymmetrizationDirection};
use crate::error::{Result, SpdError};
use crate::means::{
    arithmetic_mean, canonical_reverse_mean, geometric_mean, mean_dispatch, MeanKind,
    DEFAULT_QUAD_NODES,
};
use crate::mirror_maps::{make_map, MapKind, MirrorMap};
use crate::sampling::{
    random_gl, random_ordered_pair, random_orthogonal, random_spd, random_spd_in_range,
    random_sym, rng_for,
};
use crate::spd_core::{
    daleckii_krein_apply, dd_exp, frobenius_inner, loewner_leq, matrix_function, MatrixFn,
    SpdMatrix, SymMatrix, DEFAULT_SPD_TOL,
};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Descent controls for [`minimize_symmetrized`].
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Base gradient tolerance; the effective stopping threshold is
    /// `grad_tolerance * (1 + |objective at the initial point|)`.
    pub grad_tolerance: f64,
    /// Backtracking shrink factor, in (0, 1).
    pub shrink: f64,
    pub initial_step: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo_c1: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iters: 500,
            grad_tolerance: 1e-9,
            shrink: 0.5,
            initial_step: 1.0,
            armijo_c1: 1e-4,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(SpdError::InvalidConfig("max_iters must be positive".into()));
        }
        if !(self.grad_tolerance > 0.0) {
            return Err(SpdError::InvalidConfig(
                "grad_tolerance must be positive".into(),
            ));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(SpdError::InvalidConfig("shrink must lie in (0, 1)".into()));
        }
        if !(self.initial_step > 0.0) {
            return Err(SpdError::InvalidConfig(
                "initial_step must be positive".into(),
            ));
        }
        if !(self.armijo_c1 > 0.0 && self.armijo_c1 < 1.0) {
            return Err(SpdError::InvalidConfig("armijo_c1 must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationRecord {
    pub iteration: usize,
    pub objective: f64,
    pub grad_norm: f64,
    pub step: f64,
}

/// Outcome of one symmetrized-divergence minimization.
#[derive(Debug, Clone)]
pub struct Minimization {
    pub argmin: SpdMatrix,
    pub converged: bool,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
}

/// Which check a [`VerificationReport`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TheoremCheck {
    Thm1,
    Thm2,
    Eq10Grad,
    Eq11Grad,
    MeanAxioms,
    OperatorMonotone,
    Table2Consistency,
}

#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FailureRecord {
    pub digest: String,
    pub residual: f64,
}

/// Structured outcome of a sampled verification sweep. `passed` holds iff
/// `max_residual <= tolerance` and `failures` is empty.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    pub theorem: TheoremCheck,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_residual: f64,
    pub failures: Vec<FailureRecord>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl VerificationReport {
    fn from_samples(
        theorem: TheoremCheck,
        seed: u64,
        tolerance: f64,
        samples: Vec<(String, f64)>,
        notes: Vec<String>,
    ) -> Self {
        let max_residual = samples.iter().map(|s| s.1).fold(0.0f64, f64::max);
        let failures: Vec<FailureRecord> = samples
            .iter()
            .filter(|s| s.1 > tolerance)
            .map(|s| FailureRecord {
                digest: s.0.clone(),
                residual: s.1,
            })
            .collect();
        let passed = failures.is_empty() && max_residual <= tolerance;
        Self {
            theorem,
            samples: samples.len(),
            seed,
            tolerance,
            max_residual,
            failures,
            notes,
            passed,
        }
    }
}

fn sweep<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

fn sweep_sequential<T>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

fn collect_samples(results: Vec<Result<(String, f64)>>) -> Result<Vec<(String, f64)>> {
    results.into_iter().collect()
}

/// Gradient of the forward symmetrization in `M`:
/// the Hessian of `psi` at `M` applied to `M - (X+Y)/2`.
pub fn forward_objective_gradient(
    map: &dyn MirrorMap,
    x: &SpdMatrix,
    y: &SpdMatrix,
    m: &SpdMatrix,
) -> Result<SymMatrix> {
    crate::spd_core::check_same_dim(x.dim(), y.dim())?;
    crate::spd_core::check_same_dim(x.dim(), m.dim())?;
    let half_sum = arithmetic_mean(x, y)?;
    let dir = m.sym().sub(half_sum.sym())?;
    map.hess_apply(m, &dir)
}

/// Gradient of the reverse symmetrization in `M`:
/// `grad psi(M) - (grad psi(X) + grad psi(Y))/2`.
pub fn reverse_objective_gradient(
    map: &dyn MirrorMap,
    x: &SpdMatrix,
    y: &SpdMatrix,
    m: &SpdMatrix,
) -> Result<SymMatrix> {
    crate::spd_core::check_same_dim(x.dim(), y.dim())?;
    crate::spd_core::check_same_dim(x.dim(), m.dim())?;
    let gbar = map.grad(x)?.add(&map.grad(y)?)?.scale(0.5);
    map.grad(m)?.sub(&gbar)
}

fn objective_value(
    map: &dyn MirrorMap,
    x: &SpdMatrix,
    y: &SpdMatrix,
    m: &SpdMatrix,
    direction: SymmetrizationDirection,
) -> Result<f64> {
    match direction {
        SymmetrizationDirection::Forward => forward_raw(map, x, y, m),
        SymmetrizationDirection::Reverse => reverse_raw(map, x, y, m),
    }
}

fn objective_gradient(
    map: &dyn MirrorMap,
    x: &SpdMatrix,
    y: &SpdMatrix,
    m: &SpdMatrix,
    direction: SymmetrizationDirection,
) -> Result<SymMatrix> {
    match direction {
        SymmetrizationDirection::Forward => forward_objective_gradient(map, x, y, m),
        SymmetrizationDirection::Reverse => reverse_objective_gradient(map, x, y, m),
    }
}

/// Minimizes the symmetrized divergence over the cone by gradient
/// descent with Armijo backtracking on `M = exp(S)`.
///
/// Returns the best iterate with `converged == false` when the budget is
/// exhausted above tolerance, rather than erring.
pub fn minimize_symmetrized(
    map: &dyn MirrorMap,
    x: &SpdMatrix,
    y: &SpdMatrix,
    direction: SymmetrizationDirection,
    cfg: &OptimizerConfig,
) -> Result<Minimization> {
    cfg.validate()?;
    crate::spd_core::check_same_dim(x.dim(), y.dim())?;

    let init = geometric_mean(x, y)?;
    let mut s = matrix_function(&init, MatrixFn::Log)?;
    let mut eig_s = s.eigen()?;
    let mut m = SpdMatrix::from_spectral(&eig_s, f64::exp)?;
    let mut f = objective_value(map, x, y, &m, direction)?;
    let grad_stop = cfg.grad_tolerance * (1.0 + f.abs());

    let mut trace = Vec::new();
    let mut converged = false;
    let mut prev: Option<(SymMatrix, SymMatrix)> = None; // (S, grad_S) of last iterate
    let mut iterations = 0;

    for iter in 0..cfg.max_iters {
        let g_m = objective_gradient(map, x, y, &m, direction)?;
        // Chain rule of the exponential chart: grad_S = Dexp_S[grad_M].
        let g_s = daleckii_krein_apply(&eig_s, &g_m, dd_exp)?;
        let g_norm = g_s.frobenius_norm();
        trace.push(IterationRecord {
            iteration: iter,
            objective: f,
            grad_norm: g_norm,
            step: 0.0,
        });
        if g_norm <= grad_stop {
            converged = true;
            iterations = iter;
            break;
        }

        // Barzilai-Borwein spectral step, clamped; Armijo backtracking
        // below keeps it safe.
        let mut step = match &prev {
            Some((s_old, g_old)) => {
                let ds = s.sub(s_old)?;
                let dg = g_s.sub(g_old)?;
                let num = frobenius_inner(&ds, &ds)?;
                let den = frobenius_inner(&ds, &dg)?;
                if den > 0.0 && num.is_finite() {
                    (num / den).clamp(1e-12, 1e6)
                } else {
                    cfg.initial_step
                }
            }
            None => cfg.initial_step.min(1.0 / g_norm.max(1.0)),
        };

        let mut accepted = None;
        for _ in 0..80 {
            let s_trial = s.sub(&g_s.scale(step))?;
            let trial = (|| -> Result<(SymMatrix, crate::spd_core::EigenPair, SpdMatrix, f64)> {
                let eig_trial = s_trial.eigen()?;
                let m_trial = SpdMatrix::from_spectral(&eig_trial, f64::exp)?;
                let f_trial = objective_value(map, x, y, &m_trial, direction)?;
                Ok((s_trial, eig_trial, m_trial, f_trial))
            })();
            if let Ok((s_trial, eig_trial, m_trial, f_trial)) = trial {
                if f_trial.is_finite() && f_trial <= f - cfg.armijo_c1 * step * g_norm * g_norm {
                    accepted = Some((s_trial, eig_trial, m_trial, f_trial));
                    break;
                }
            }
            step *= cfg.shrink;
        }

        let Some((s_new, eig_new, m_new, f_new)) = accepted else {
            // Line search stalled at machine precision; report the best
            // iterate without the converged flag.
            iterations = iter;
            break;
        };

        if let Some(last) = trace.last_mut() {
            last.step = step;
        }
        prev = Some((s.clone(), g_s));
        s = s_new;
        eig_s = eig_new;
        m = m_new;
        f = f_new;
        iterations = iter + 1;
    }

    Ok(Minimization {
        argmin: m,
        converged,
        iterations,
        trace,
    })
}

fn closed_form_mean(
    map: &dyn MirrorMap,
    direction: SymmetrizationDirection,
    x: &SpdMatrix,
    y: &SpdMatrix,
) -> Result<SpdMatrix> {
    match direction {
        SymmetrizationDirection::Forward => arithmetic_mean(x, y),
        SymmetrizationDirection::Reverse => canonical_reverse_mean(map, x, y),
    }
}

fn theorem_sample(
    map: &dyn MirrorMap,
    direction: SymmetrizationDirection,
    n: usize,
    cfg: &OptimizerConfig,
    seed: u64,
    index: u64,
) -> Result<(String, f64)> {
    let mut rng = rng_for(seed, index);
    let x = random_spd(&mut rng, n);
    let y = random_spd(&mut rng, n);
    let run = minimize_symmetrized(map, &x, &y, direction, cfg)?;
    let closed = closed_form_mean(map, direction, &x, &y)?;
    let resid = run.argmin.sym().sub(closed.sym())?.frobenius_norm()
        / closed.sym().frobenius_norm().max(f64::MIN_POSITIVE);
    Ok((x.digest(), resid))
}

fn verify_theorem_impl(
    map: &dyn MirrorMap,
    direction: SymmetrizationDirection,
    n: usize,
    num_samples: usize,
    cfg: &OptimizerConfig,
    seed: u64,
    tolerance: f64,
    parallel: bool,
) -> Result<VerificationReport> {
    if direction == SymmetrizationDirection::Reverse
        && !(map.is_grad_operator_monotone() && map.is_spectral())
    {
        return Err(SpdError::HypothesisNotDeclared { map: map.kind() });
    }
    let task = |i: usize| theorem_sample(map, direction, n, cfg, seed, i as u64);
    let results = if parallel {
        sweep(num_samples, task)
    } else {
        sweep_sequential(num_samples, task)
    };
    let theorem = match direction {
        SymmetrizationDirection::Forward => TheoremCheck::Thm1,
        SymmetrizationDirection::Reverse => TheoremCheck::Thm2,
    };
    Ok(VerificationReport::from_samples(
        theorem,
        seed,
        tolerance,
        collect_samples(results)?,
        Vec::new(),
    ))
}

/// Draws random SPD pairs, minimizes the symmetrized divergence
/// numerically, and reports the worst relative distance between the
/// numeric argmin and the closed-form canonical mean.
pub fn verify_theorem(
    map: &dyn MirrorMap,
    direction: SymmetrizationDirection,
    n: usize,
    num_samples: usize,
    cfg: &OptimizerConfig,
    seed: u64,
    tolerance: f64,
) -> Result<VerificationReport> {
    verify_theorem_impl(map, direction, n, num_samples, cfg, seed, tolerance, true)
}

/// As [`verify_theorem`], forcing the sequential sweep.
pub fn verify_theorem_sequential(
    map: &dyn MirrorMap,
    direction: SymmetrizationDirection,
    n: usize,
    num_samples: usize,
    cfg: &OptimizerConfig,
    seed: u64,
    tolerance: f64,
) -> Result<VerificationReport> {
    verify_theorem_impl(map, direction, n, num_samples, cfg, seed, tolerance, false)
}

/// Default relative tolerance for the analytic-vs-finite-difference
/// gradient identity checks.
pub const GRADIENT_CHECK_TOL: f64 = 1e-5;

fn gradient_sample(
    map: &dyn MirrorMap,
    direction: SymmetrizationDirection,
    n: usize,
    seed: u64,
    index: u64,
) -> Result<(String, f64)> {
    let mut rng = rng_for(seed, index);
    // Moderate spread keeps M +- h E inside the cone for the FD probes.
    let x = random_spd_in_range(&mut rng, n, -1.0, 1.0);
    let y = random_spd_in_range(&mut rng, n, -1.0, 1.0);
    let m = random_spd_in_range(&mut rng, n, -1.0, 1.0);
    let analytic = objective_gradient(map, &x, &y, &m, direction)?;

    let h = 1e-5 * m.sym().frobenius_norm();
    let mut fd = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut e = nalgebra::DMatrix::<f64>::zeros(n, n);
            e[(i, j)] = 1.0;
            e[(j, i)] = 1.0;
            let plus = SpdMatrix::validate(m.as_matrix() + &e * h, DEFAULT_SPD_TOL)?;
            let minus = SpdMatrix::validate(m.as_matrix() - &e * h, DEFAULT_SPD_TOL)?;
            let df = (objective_value(map, &x, &y, &plus, direction)?
                - objective_value(map, &x, &y, &minus, direction)?)
                / (2.0 * h);
            // df is the derivative along E = e_ij + e_ji (or e_ii);
            // translate back to gradient entries via <G, E>.
            if i == j {
                fd[(i, i)] = df;
            } else {
                fd[(i, j)] = 0.5 * df;
                fd[(j, i)] = 0.5 * df;
            }
        }
    }
    let fd = SymMatrix::new(fd)?;
    let resid =
        analytic.sub(&fd)?.frobenius_norm() / fd.frobenius_norm().max(f64::MIN_POSITIVE);
    Ok((m.digest(), resid))
}

/// Checks the analytic objective gradients against central finite
/// differences of the symmetrized divergences on random `(X, Y, M)`
/// triples.
pub fn gradient_identity_check(
    map: &dyn MirrorMap,
    direction: SymmetrizationDirection,
    n: usize,
    num_samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let results = sweep(num_samples, |i| {
        gradient_sample(map, direction, n, seed, i as u64)
    });
    let theorem = match direction {
        SymmetrizationDirection::Forward => TheoremCheck::Eq10Grad,
        SymmetrizationDirection::Reverse => TheoremCheck::Eq11Grad,
    };
    Ok(VerificationReport::from_samples(
        theorem,
        seed,
        GRADIENT_CHECK_TOL,
        collect_samples(results)?,
        Vec::new(),
    ))
}

/// Relative tolerance for closed-form consistency checks.
pub const TABLE2_TOL: f64 = 1e-9;

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Cross-checks the published per-map closed forms against the generic
/// compositions on random pairs.
///
/// The forward cells and the squared-Frobenius reverse cell must agree
/// with the symmetrized divergence at the canonical mean. The entropy
/// reverse cells agree instead with the published corollary expression
/// `(psi(X)+psi(Y))/2 - psi*((gX+gY)/2)`; their deviation from the
/// reverse symmetrization at the canonical mean is measured and reported
/// in `notes`, and the canonical closed form
/// [`crate::divergences::canonical_reverse_closed`] is checked to match
/// the composition exactly.
pub fn table2_consistency(
    kind: MapKind,
    n: usize,
    num_samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let map = make_map(kind);
    let results = sweep(num_samples, |i| -> Result<(String, f64, f64)> {
        let mut rng = rng_for(seed, i as u64);
        let x = random_spd(&mut rng, n);
        let y = random_spd(&mut rng, n);

        let m_fwd = arithmetic_mean(&x, &y)?;
        let fwd_generic = forward_raw(map, &x, &y, &m_fwd)?;
        let js = crate::divergences::jensen_shannon_closed(map, &x, &y)?.value;
        let cell_fwd =
            crate::divergences::table2_closed_form(kind, SymmetrizationDirection::Forward, &x, &y)?
                .value;

        let m_rev = canonical_reverse_mean(map, &x, &y)?;
        let rev_generic = reverse_raw(map, &x, &y, &m_rev)?;
        let crc = crate::divergences::canonical_reverse_closed(map, &x, &y)?.value;
        let cell_rev =
            crate::divergences::table2_closed_form(kind, SymmetrizationDirection::Reverse, &x, &y)?
                .value;
        // The printed reverse cells equal the corollary expression below
        // for every map; for the entropy maps it differs from rev_generic.
        let gx = map.grad(&x)?;
        let gy = map.grad(&y)?;
        let printed_corollary = 0.5 * (map.psi(&x)? + map.psi(&y)?)
            - map.conjugate(&gx.add(&gy)?.scale(0.5))?;

        let checked = [
            rel_diff(js, fwd_generic),
            rel_diff(cell_fwd, fwd_generic),
            rel_diff(crc, rev_generic),
            rel_diff(cell_rev, printed_corollary),
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        let printed_defect = rel_diff(cell_rev, rev_generic);
        Ok((x.digest(), checked, printed_defect))
    });

    let mut samples = Vec::with_capacity(num_samples);
    let mut max_defect = 0.0f64;
    for r in results {
        let (digest, checked, defect) = r?;
        samples.push((digest, checked));
        max_defect = max_defect.max(defect);
    }

    let mut notes = Vec::new();
    if max_defect > TABLE2_TOL {
        notes.push(format!(
            "published {kind} reverse cell deviates from the reverse symmetrization at the \
             canonical mean (max relative deviation {max_defect:.3e}); the cell simplifies the \
             dual conjugate average to the primal potential average, dropping the Fenchel-Young \
             corner terms. Resolved in favor of the canonical closed form, which matches the \
             composition to {TABLE2_TOL:e}."
        ));
    }
    Ok(VerificationReport::from_samples(
        TheoremCheck::Table2Consistency,
        seed,
        TABLE2_TOL,
        samples,
        notes,
    ))
}

/// Result of sampling one mean axiom.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxiomResult {
    pub max_residual: f64,
    pub tolerance: f64,
    pub checked: usize,
    pub passed: bool,
}

impl AxiomResult {
    fn new(residuals: Vec<f64>, tolerance: f64) -> Self {
        let max_residual = residuals.iter().copied().fold(0.0f64, f64::max);
        Self {
            max_residual,
            tolerance,
            checked: residuals.len(),
            passed: max_residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum InvarianceClass {
    GLn,
    On,
    Neither,
}

impl std::fmt::Display for InvarianceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InvarianceClass::GLn => "GLn",
            InvarianceClass::On => "On",
            InvarianceClass::Neither => "Neither",
        })
    }
}

/// A congruence matrix witnessing failure of GL(n) invariance, stored
/// row-major alongside the residual it produced.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GlWitness {
    pub p: Vec<Vec<f64>>,
    pub residual: f64,
}

/// Per-axiom sampled results for one mean, with the invariance class
/// determination.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxiomReport {
    pub mean: String,
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub positivity: AxiomResult,
    pub symmetry: AxiomResult,
    pub betweenness: AxiomResult,
    pub monotonicity: AxiomResult,
    pub gl_invariance: AxiomResult,
    pub orthogonal_invariance: AxiomResult,
    pub continuity: AxiomResult,
    pub invariance_class: InvarianceClass,
    pub gl_witness: Option<GlWitness>,
}

const INVARIANCE_TOL: f64 = 1e-8;
const LOEWNER_TOL: f64 = 1e-8;
const SYMMETRY_TOL: f64 = 1e-10;
const CONTINUITY_FACTOR: f64 = 10.0;
const CONTINUITY_PERTURBATION: f64 = 1e-6;

/// Evaluates a mean, mapping cone-exit and breakdown errors to `None`:
/// for the auditor these are axiom failures (data), not crashes. The
/// literal logarithmic integral genuinely leaves the cone on wide pairs.
fn mean_or_none(
    kind: MeanKind,
    a: &SpdMatrix,
    b: &SpdMatrix,
) -> Result<Option<SpdMatrix>> {
    match mean_dispatch(kind, a, b, DEFAULT_QUAD_NODES) {
        Ok(m) => Ok(Some(m)),
        Err(
            SpdError::NotPositiveDefinite { .. }
            | SpdError::AsymmetryTooLarge { .. }
            | SpdError::NumericalBreakdown { .. },
        ) => Ok(None),
        Err(other) => Err(other),
    }
}

fn congruence_residual(
    kind: MeanKind,
    a: &SpdMatrix,
    b: &SpdMatrix,
    p: &nalgebra::DMatrix<f64>,
) -> Result<f64> {
    let ap = SpdMatrix::validate(p.transpose() * a.as_matrix() * p, DEFAULT_SPD_TOL)?;
    let bp = SpdMatrix::validate(p.transpose() * b.as_matrix() * p, DEFAULT_SPD_TOL)?;
    let (Some(lhs), Some(m)) = (mean_or_none(kind, &ap, &bp)?, mean_or_none(kind, a, b)?)
    else {
        return Ok(1.0);
    };
    let rhs = SymMatrix::new(p.transpose() * m.as_matrix() * p)?;
    Ok(lhs.sym().sub(&rhs)?.frobenius_norm() / rhs.frobenius_norm().max(f64::MIN_POSITIVE))
}

/// Samples the mean axioms (positivity, symmetry, betweenness on ordered
/// pairs, monotonicity, congruence invariance under GL(n) and O(n),
/// a Lipschitz continuity probe) and classifies the invariance of the
/// mean. Failures are data, not errors.
pub fn audit_mean_axioms(
    kind: MeanKind,
    n: usize,
    num_samples: usize,
    seed: u64,
) -> Result<AxiomReport> {
    struct Sample {
        positivity: f64,
        symmetry: f64,
        betweenness: f64,
        monotonicity: f64,
        gl: f64,
        gl_p: nalgebra::DMatrix<f64>,
        orthogonal: f64,
        continuity: f64,
    }

    let results = sweep(num_samples, |i| -> Result<Sample> {
        let mut rng = rng_for(seed, i as u64);

        // The draws stay at moderate conditioning so that the continuity
        // amplification heuristic and the cone membership of the
        // logarithmic integral are meaningful; a mean that exits the cone
        // anyway is recorded as a positivity failure.
        let a = random_spd_in_range(&mut rng, n, -1.0, 1.0);
        let b = random_spd_in_range(&mut rng, n, -1.0, 1.0);
        let pair = match (mean_or_none(kind, &a, &b)?, mean_or_none(kind, &b, &a)?) {
            (Some(m), Some(m_ba)) => Some((m, m_ba)),
            _ => None,
        };
        // (i) positivity: validated output means positive spectrum.
        let positivity = match &pair {
            Some((m, _)) if m.min_eigenvalue() > 0.0 => 0.0,
            _ => 1.0,
        };
        // (ii) symmetry.
        let symmetry = match &pair {
            Some((m, m_ba)) => {
                m.sym().sub(m_ba.sym())?.frobenius_norm()
                    / m.sym().frobenius_norm().max(f64::MIN_POSITIVE)
            }
            None => 1.0,
        };

        // (iii) betweenness on a Loewner-ordered pair.
        let (lo, hi) = random_ordered_pair(&mut rng, n);
        let betweenness = match mean_or_none(kind, &lo, &hi)? {
            Some(mid) => {
                defect_leq(lo.sym(), mid.sym())?.max(defect_leq(mid.sym(), hi.sym())?)
            }
            None => 1.0,
        };

        // (iv) monotonicity in the first argument.
        let (a1, a2) = random_ordered_pair(&mut rng, n);
        let c = random_spd_in_range(&mut rng, n, -1.0, 1.0);
        let monotonicity = match (mean_or_none(kind, &a1, &c)?, mean_or_none(kind, &a2, &c)?) {
            (Some(m1), Some(m2)) => defect_leq(m1.sym(), m2.sym())?,
            _ => 1.0,
        };

        // (v) congruence invariance.
        let p = random_gl(&mut rng, n);
        let gl = congruence_residual(kind, &a, &b, &p)?;
        let q = random_orthogonal(&mut rng, n);
        let orthogonal = congruence_residual(kind, &a, &b, &q)?;

        // (vi) continuity probe: relative output change against 10x the
        // relative input perturbation.
        let mc = mean_or_none(kind, &a, &b)?;
        let dir = random_sym(&mut rng, n, CONTINUITY_PERTURBATION * a.sym().frobenius_norm());
        let a_pert = SpdMatrix::validate(a.as_matrix() + dir.as_matrix(), DEFAULT_SPD_TOL)?;
        let mc2 = mean_or_none(kind, &a_pert, &b)?;
        let continuity = match (mc, mc2) {
            (Some(mc), Some(mc2)) => {
                let in_rel = dir.frobenius_norm() / a.sym().frobenius_norm();
                let out_rel = mc2.sym().sub(mc.sym())?.frobenius_norm()
                    / mc.sym().frobenius_norm().max(f64::MIN_POSITIVE);
                out_rel / (CONTINUITY_FACTOR * in_rel)
            }
            _ => 1.0,
        };

        Ok(Sample {
            positivity,
            symmetry,
            betweenness,
            monotonicity,
            gl,
            gl_p: p,
            orthogonal,
            continuity,
        })
    });

    let samples: Vec<Sample> = results.into_iter().collect::<Result<_>>()?;
    let collect = |f: fn(&Sample) -> f64| samples.iter().map(f).collect::<Vec<_>>();

    let gl_invariance = AxiomResult::new(collect(|s| s.gl), INVARIANCE_TOL);
    let orthogonal_invariance = AxiomResult::new(collect(|s| s.orthogonal), INVARIANCE_TOL);
    let invariance_class = if gl_invariance.passed {
        InvarianceClass::GLn
    } else if orthogonal_invariance.passed {
        InvarianceClass::On
    } else {
        InvarianceClass::Neither
    };
    let gl_witness = if gl_invariance.passed {
        None
    } else {
        samples
            .iter()
            .max_by(|u, v| u.gl.partial_cmp(&v.gl).expect("finite residuals"))
            .map(|s| GlWitness {
                p: (0..n)
                    .map(|i| (0..n).map(|j| s.gl_p[(i, j)]).collect())
                    .collect(),
                residual: s.gl,
            })
    };

    Ok(AxiomReport {
        mean: kind.name(),
        dim: n,
        samples: num_samples,
        seed,
        positivity: AxiomResult::new(collect(|s| s.positivity), 0.5),
        symmetry: AxiomResult::new(collect(|s| s.symmetry), SYMMETRY_TOL),
        betweenness: AxiomResult::new(collect(|s| s.betweenness), LOEWNER_TOL),
        monotonicity: AxiomResult::new(collect(|s| s.monotonicity), LOEWNER_TOL),
        gl_invariance,
        orthogonal_invariance,
        continuity: AxiomResult::new(collect(|s| s.continuity), 1.0),
        invariance_class,
        gl_witness,
    })
}

/// Signed Löwner defect: how far `b - a` dips below zero.
fn defect_leq(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    let min = b.sub(a)?.eigen()?.min_eigenvalue();
    Ok((-min).max(0.0))
}

/// Samples Löwner-ordered pairs and checks that the map gradient
/// preserves the order.
pub fn audit_operator_monotone(
    map: &dyn MirrorMap,
    n: usize,
    num_samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let results = sweep(num_samples, |i| -> Result<(String, f64)> {
        let mut rng = rng_for(seed, i as u64);
        let (a, b) = random_ordered_pair(&mut rng, n);
        let ga = map.grad(&a)?;
        let gb = map.grad(&b)?;
        let defect = defect_leq(&ga, &gb)?;
        debug_assert!(loewner_leq(&ga, &gb, 1e-9)? == (defect <= 1e-9));
        Ok((a.digest(), defect))
    });
    Ok(VerificationReport::from_samples(
        TheoremCheck::OperatorMonotone,
        seed,
        1e-9,
        collect_samples(results)?,
        Vec::new(),
    ))
}
