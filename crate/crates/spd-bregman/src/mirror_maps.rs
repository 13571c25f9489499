//! Mirror maps on the SPD cone: the potential `psi`, its gradient,
//! Hessian action, Legendre–Fenchel conjugate `psi*`, and the conjugate
//! gradient, for the three standard choices
//!
//! - squared Frobenius norm        `|X|_F^2`
//! - negative von Neumann entropy  `trace(X log X - X)`
//! - Burg entropy                  `-log det X`
//!
//! The gradient of each map is a bijection onto its dual domain and
//! `grad_conjugate` inverts it; [`check_duality`] measures the numerical
//! round-trip residual.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SpdError};
use crate::spd_core::{
    daleckii_krein_apply, dd_log, matrix_function, sym_exp_spd, MatrixFn,
    SpdMatrix, SymMatrix, DEFAULT_SPD_TOL,
};

/// Default relative tolerance for Fenchel round-trip checks.
pub const DUALITY_TOL: f64 = 1e-9;

/// The three built-in mirror maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MapKind {
    SquaredFrobenius,
    NegVonNeumann,
    Burg,
}

impl MapKind {
    pub const ALL: [MapKind; 3] = [
        MapKind::SquaredFrobenius,
        MapKind::NegVonNeumann,
        MapKind::Burg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapKind::SquaredFrobenius => "frobenius",
            MapKind::NegVonNeumann => "von-neumann",
            MapKind::Burg => "burg",
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "frobenius" => Ok(MapKind::SquaredFrobenius),
            "von-neumann" => Ok(MapKind::NegVonNeumann),
            "burg" => Ok(MapKind::Burg),
            other => Err(format!(
                "unknown mirror map '{other}' (expected frobenius, von-neumann, or burg)"
            )),
        }
    }
}

/// A mirror map of Legendre type on the SPD cone.
///
/// The declared flags feed the reverse-theorem hypothesis gate: operator
/// monotonicity of the gradient and spectrality of the potential cannot
/// be checked exhaustively, so each built-in declares them and the
/// verification module samples them.
pub trait MirrorMap: Send + Sync {
    fn kind(&self) -> MapKind;

    fn name(&self) -> &'static str {
        self.kind().name()
    }

    /// Potential `psi(X)`.
    fn psi(&self, x: &SpdMatrix) -> Result<f64>;

    /// Euclidean gradient of `psi`, an element of the dual space.
    fn grad(&self, x: &SpdMatrix) -> Result<SymMatrix>;

    /// Action of the Hessian of `psi` at `x` on the symmetric direction
    /// `s`, i.e. the directional derivative of the gradient.
    fn hess_apply(&self, x: &SpdMatrix, s: &SymMatrix) -> Result<SymMatrix>;

    /// Legendre–Fenchel conjugate `psi*(Y)`; errors with
    /// `DualDomainViolation` outside the dual domain.
    fn conjugate(&self, y: &SymMatrix) -> Result<f64>;

    /// Gradient of the conjugate; inverts `grad`.
    fn grad_conjugate(&self, y: &SymMatrix) -> Result<SpdMatrix>;

    fn in_dual_domain(&self, y: &SymMatrix) -> bool;

    fn is_grad_operator_monotone(&self) -> bool;

    fn is_spectral(&self) -> bool;
}

fn dual_violation(kind: MapKind) -> SpdError {
    SpdError::DualDomainViolation { map: kind }
}

fn is_positive_definite(y: &SymMatrix) -> bool {
    match y.eigen() {
        Ok(eig) => {
            let max = eig.max_eigenvalue().abs().max(eig.min_eigenvalue().abs());
            eig.min_eigenvalue() > DEFAULT_SPD_TOL * max.max(1.0)
        }
        Err(_) => false,
    }
}

/// `psi(X) = |X|_F^2` with gradient `2X` and Hessian action `2S`.
pub struct SquaredFrobenius;

impl MirrorMap for SquaredFrobenius {
    fn kind(&self) -> MapKind {
        MapKind::SquaredFrobenius
    }

    fn psi(&self, x: &SpdMatrix) -> Result<f64> {
        let n = x.sym().frobenius_norm();
        Ok(n * n)
    }

    fn grad(&self, x: &SpdMatrix) -> Result<SymMatrix> {
        Ok(x.sym().scale(2.0))
    }

    fn hess_apply(&self, x: &SpdMatrix, s: &SymMatrix) -> Result<SymMatrix> {
        crate::spd_core::check_same_dim(x.dim(), s.dim())?;
        Ok(s.scale(2.0))
    }

    fn conjugate(&self, y: &SymMatrix) -> Result<f64> {
        if !self.in_dual_domain(y) {
            return Err(dual_violation(self.kind()));
        }
        let n = y.frobenius_norm();
        Ok(0.25 * n * n)
    }

    fn grad_conjugate(&self, y: &SymMatrix) -> Result<SpdMatrix> {
        if !self.in_dual_domain(y) {
            return Err(dual_violation(self.kind()));
        }
        SpdMatrix::from_sym(y.scale(0.5), DEFAULT_SPD_TOL)
    }

    fn in_dual_domain(&self, y: &SymMatrix) -> bool {
        is_positive_definite(y)
    }

    fn is_grad_operator_monotone(&self) -> bool {
        true
    }

    fn is_spectral(&self) -> bool {
        true
    }
}

/// `psi(X) = trace(X log X - X)` with gradient `log X`; the Hessian acts
/// by the Daleckii–Krein divided differences of `log` in the eigenbasis
/// of `X`. The dual domain is all of the symmetric matrices and
/// `grad psi*(Y) = exp Y`.
pub struct NegVonNeumann;

impl MirrorMap for NegVonNeumann {
    fn kind(&self) -> MapKind {
        MapKind::NegVonNeumann
    }

    fn psi(&self, x: &SpdMatrix) -> Result<f64> {
        let eig = x.eigen()?;
        Ok(eig
            .eigenvalues()
            .iter()
            .map(|&l| l * l.ln() - l)
            .sum())
    }

    fn grad(&self, x: &SpdMatrix) -> Result<SymMatrix> {
        matrix_function(x, MatrixFn::Log)
    }

    fn hess_apply(&self, x: &SpdMatrix, s: &SymMatrix) -> Result<SymMatrix> {
        crate::spd_core::check_same_dim(x.dim(), s.dim())?;
        daleckii_krein_apply(&x.eigen()?, s, dd_log)
    }

    fn conjugate(&self, y: &SymMatrix) -> Result<f64> {
        let eig = y.eigen()?;
        Ok(eig.eigenvalues().iter().map(|&l| l.exp()).sum())
    }

    fn grad_conjugate(&self, y: &SymMatrix) -> Result<SpdMatrix> {
        sym_exp_spd(y)
    }

    fn in_dual_domain(&self, _y: &SymMatrix) -> bool {
        true
    }

    fn is_grad_operator_monotone(&self) -> bool {
        true
    }

    fn is_spectral(&self) -> bool {
        true
    }
}

/// `psi(X) = -log det X` with gradient `-X^{-1}` and Hessian action
/// `X^{-1} S X^{-1}`. The dual domain is the negative definite cone and
/// `grad psi*(Y) = -Y^{-1}`.
pub struct Burg;

impl MirrorMap for Burg {
    fn kind(&self) -> MapKind {
        MapKind::Burg
    }

    fn psi(&self, x: &SpdMatrix) -> Result<f64> {
        let eig = x.eigen()?;
        Ok(-eig.eigenvalues().iter().map(|&l| l.ln()).sum::<f64>())
    }

    fn grad(&self, x: &SpdMatrix) -> Result<SymMatrix> {
        matrix_function(x, MatrixFn::NegInverse)
    }

    fn hess_apply(&self, x: &SpdMatrix, s: &SymMatrix) -> Result<SymMatrix> {
        crate::spd_core::check_same_dim(x.dim(), s.dim())?;
        let inv = matrix_function(x, MatrixFn::Inverse)?;
        Ok(SymMatrix::symmetrize_unchecked(
            &(inv.as_matrix() * s.as_matrix() * inv.as_matrix()),
        ))
    }

    fn conjugate(&self, y: &SymMatrix) -> Result<f64> {
        if !self.in_dual_domain(y) {
            return Err(dual_violation(self.kind()));
        }
        let eig = y.eigen()?;
        let n = y.dim() as f64;
        // -n - log det(-Y), with det(-Y) = prod(-lambda_i) over the
        // (all negative) spectrum of Y.
        Ok(-n - eig.eigenvalues().iter().map(|&l| (-l).ln()).sum::<f64>())
    }

    fn grad_conjugate(&self, y: &SymMatrix) -> Result<SpdMatrix> {
        if !self.in_dual_domain(y) {
            return Err(dual_violation(self.kind()));
        }
        let eig = y.eigen()?;
        SpdMatrix::from_spectral(&eig, |l| -1.0 / l)
    }

    fn in_dual_domain(&self, y: &SymMatrix) -> bool {
        is_positive_definite(&y.scale(-1.0))
    }

    fn is_grad_operator_monotone(&self) -> bool {
        true
    }

    fn is_spectral(&self) -> bool {
        true
    }
}

/// Returns the map implementation for `kind`.
pub fn make_map(kind: MapKind) -> &'static dyn MirrorMap {
    match kind {
        MapKind::SquaredFrobenius => &SquaredFrobenius,
        MapKind::NegVonNeumann => &NegVonNeumann,
        MapKind::Burg => &Burg,
    }
}

/// Relative Fenchel round-trip residual
/// `|grad_conjugate(grad(x)) - x|_F / |x|_F`.
pub fn check_duality(map: &dyn MirrorMap, x: &SpdMatrix) -> Result<f64> {
    let g = map.grad(x)?;
    if !map.in_dual_domain(&g) {
        return Err(dual_violation(map.kind()));
    }
    let back = map.grad_conjugate(&g)?;
    let scale = x.sym().frobenius_norm().max(f64::MIN_POSITIVE);
    Ok(back.sym().sub(x.sym())?.frobenius_norm() / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_orthogonal, random_spd, random_sym, rng_for};
    use crate::spd_core::frobenius_inner;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn spd1(v: f64) -> SpdMatrix {
        SpdMatrix::validate(DMatrix::from_element(1, 1, v), DEFAULT_SPD_TOL).unwrap()
    }

    fn spd_diag(d: &[f64]) -> SpdMatrix {
        SpdMatrix::from_sym(SymMatrix::from_diagonal(d), DEFAULT_SPD_TOL).unwrap()
    }

    #[test]
    fn burg_scalar_values() {
        let map = make_map(MapKind::Burg);
        let x = spd1(2.0);
        assert_relative_eq!(map.psi(&x).unwrap(), -(2f64.ln()), max_relative = 1e-12);
        assert_relative_eq!(map.grad(&x).unwrap().entry(0, 0), -0.5, max_relative = 1e-12);
    }

    #[test]
    fn von_neumann_at_identity() {
        let map = make_map(MapKind::NegVonNeumann);
        let x = SpdMatrix::identity(2);
        assert_relative_eq!(map.psi(&x).unwrap(), -2.0, max_relative = 1e-12);
        assert!(map.grad(&x).unwrap().frobenius_norm() <= 1e-14);
    }

    #[test]
    fn frobenius_on_a_diagonal_point() {
        let map = make_map(MapKind::SquaredFrobenius);
        let x = spd_diag(&[1.0, 2.0]);
        assert_relative_eq!(map.psi(&x).unwrap(), 5.0, max_relative = 1e-12);
        let g = map.grad(&x).unwrap();
        assert_relative_eq!(g.entry(0, 0), 2.0, max_relative = 1e-12);
        assert_relative_eq!(g.entry(1, 1), 4.0, max_relative = 1e-12);
    }

    #[test]
    fn hessian_action_examples() {
        let s = SymMatrix::from_rows(&[vec![0.4, -0.2], vec![-0.2, 1.3]]).unwrap();

        let frob = make_map(MapKind::SquaredFrobenius);
        let x = spd_diag(&[3.0, 7.0]);
        let hs = frob.hess_apply(&x, &s).unwrap();
        assert!(hs.sub(&s.scale(2.0)).unwrap().frobenius_norm() <= 1e-14);

        let burg = make_map(MapKind::Burg);
        let hs = burg.hess_apply(&SpdMatrix::identity(2), &s).unwrap();
        assert!(hs.sub(&s).unwrap().frobenius_norm() <= 1e-13);

        // Von Neumann on a diagonal point: entrywise divided differences
        // of log, with 1/lambda on the diagonal.
        let vn = make_map(MapKind::NegVonNeumann);
        let x = spd_diag(&[1.0, 4.0]);
        let hs = vn.hess_apply(&x, &s).unwrap();
        assert_relative_eq!(hs.entry(0, 0), 0.4 / 1.0, max_relative = 1e-12);
        assert_relative_eq!(hs.entry(1, 1), 1.3 / 4.0, max_relative = 1e-12);
        assert_relative_eq!(
            hs.entry(0, 1),
            -0.2 * (4f64.ln() - 1f64.ln()) / 3.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn hessian_matches_central_differences_of_grad() {
        for kind in MapKind::ALL {
            let map = make_map(kind);
            for k in 0..12 {
                let mut rng = rng_for(101, k);
                let n = 2 + (k % 4) as usize;
                let x = random_spd(&mut rng, n);
                let s = random_sym(&mut rng, n, 1.0);
                let h = 1e-5 * (1.0 + x.sym().frobenius_norm());
                let xp = SpdMatrix::validate(
                    x.as_matrix() + s.as_matrix() * h,
                    DEFAULT_SPD_TOL,
                );
                let xm = SpdMatrix::validate(
                    x.as_matrix() - s.as_matrix() * h,
                    DEFAULT_SPD_TOL,
                );
                let (Ok(xp), Ok(xm)) = (xp, xm) else {
                    continue; // perturbation left the cone; skip the draw
                };
                let fd = map
                    .grad(&xp)
                    .unwrap()
                    .sub(&map.grad(&xm).unwrap())
                    .unwrap()
                    .scale(0.5 / h);
                let analytic = map.hess_apply(&x, &s).unwrap();
                let rel = analytic.sub(&fd).unwrap().frobenius_norm()
                    / fd.frobenius_norm().max(1e-12);
                assert!(rel <= 1e-5, "{kind} sample {k}: rel {rel:e}");
            }
        }
    }

    #[test]
    fn hessian_is_self_adjoint_and_positive() {
        for kind in MapKind::ALL {
            let map = make_map(kind);
            for k in 0..20 {
                let mut rng = rng_for(102, k);
                let n = 2 + (k % 5) as usize;
                let x = random_spd(&mut rng, n);
                let s = random_sym(&mut rng, n, 1.0);
                let t = random_sym(&mut rng, n, 1.0);
                let hs = map.hess_apply(&x, &s).unwrap();
                let ht = map.hess_apply(&x, &t).unwrap();
                let lhs = frobenius_inner(&hs, &t).unwrap();
                let rhs = frobenius_inner(&s, &ht).unwrap();
                let scale = lhs.abs().max(rhs.abs()).max(1.0);
                assert!((lhs - rhs).abs() / scale <= 1e-10, "{kind} self-adjoint");
                assert!(
                    frobenius_inner(&hs, &s).unwrap() > 0.0,
                    "{kind} positive definiteness"
                );
            }
        }
    }

    #[test]
    fn fenchel_round_trip_both_directions() {
        for kind in MapKind::ALL {
            let map = make_map(kind);
            for n in 1..=8 {
                for k in 0..10 {
                    let mut rng = rng_for(103, (n * 100 + k) as u64);
                    let x = random_spd(&mut rng, n);
                    let resid = check_duality(map, &x).unwrap();
                    assert!(resid <= DUALITY_TOL, "{kind} n={n} residual {resid:e}");

                    // Dual-side round trip: grad(grad_conjugate(Y)) == Y on a
                    // dual-domain point manufactured from a primal draw.
                    let y = map.grad(&x).unwrap();
                    let back = map.grad(&map.grad_conjugate(&y).unwrap()).unwrap();
                    let rel = back.sub(&y).unwrap().frobenius_norm()
                        / y.frobenius_norm().max(f64::MIN_POSITIVE);
                    assert!(rel <= DUALITY_TOL, "{kind} dual-side residual {rel:e}");
                }
            }
        }
    }

    #[test]
    fn duality_examples() {
        let burg = make_map(MapKind::Burg);
        let mut rng = rng_for(104, 0);
        let x = random_spd(&mut rng, 4);
        assert!(check_duality(burg, &x).unwrap() <= 1e-10);

        let vn = make_map(MapKind::NegVonNeumann);
        assert!(check_duality(vn, &SpdMatrix::identity(3)).unwrap() <= 1e-12);

        let frob = make_map(MapKind::SquaredFrobenius);
        let x = spd1(3.0);
        let g = frob.grad(&x).unwrap();
        assert_relative_eq!(g.entry(0, 0), 6.0, max_relative = 1e-12);
        assert_relative_eq!(
            frob.grad_conjugate(&g).unwrap().sym().entry(0, 0),
            3.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn fenchel_young_equality_at_matched_pairs() {
        for kind in MapKind::ALL {
            let map = make_map(kind);
            for k in 0..20 {
                let mut rng = rng_for(105, k);
                let n = 1 + (k % 6) as usize;
                let x = random_spd(&mut rng, n);
                let g = map.grad(&x).unwrap();
                let lhs = map.psi(&x).unwrap() + map.conjugate(&g).unwrap();
                let rhs = frobenius_inner(&g, x.sym()).unwrap();
                let scale = lhs.abs().max(rhs.abs()).max(1.0);
                assert!((lhs - rhs).abs() / scale <= 1e-9, "{kind} Fenchel-Young");
            }
        }
    }

    #[test]
    fn gradients_are_operator_monotone_on_samples() {
        for kind in MapKind::ALL {
            let map = make_map(kind);
            for k in 0..20 {
                let mut rng = rng_for(106, k);
                let (a, b) = crate::sampling::random_ordered_pair(&mut rng, 3);
                let ga = map.grad(&a).unwrap();
                let gb = map.grad(&b).unwrap();
                assert!(
                    crate::spd_core::loewner_leq(&ga, &gb, 1e-9).unwrap(),
                    "{kind} monotone sample {k}"
                );
            }
        }
    }

    #[test]
    fn potentials_are_spectral() {
        for kind in MapKind::ALL {
            let map = make_map(kind);
            for k in 0..20 {
                let mut rng = rng_for(107, k);
                let n = 2 + (k % 5) as usize;
                let x = random_spd(&mut rng, n);
                let p = random_orthogonal(&mut rng, n);
                let xc = SpdMatrix::validate(
                    p.transpose() * x.as_matrix() * &p,
                    DEFAULT_SPD_TOL,
                )
                .unwrap();
                let a = map.psi(&x).unwrap();
                let b = map.psi(&xc).unwrap();
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{kind} spectral");
            }
        }
    }

    #[test]
    fn dual_domain_violations_are_reported() {
        let frob = make_map(MapKind::SquaredFrobenius);
        let indef = SymMatrix::from_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            frob.conjugate(&indef),
            Err(SpdError::DualDomainViolation {
                map: MapKind::SquaredFrobenius
            })
        ));
        let burg = make_map(MapKind::Burg);
        let pd = SymMatrix::from_diagonal(&[1.0, 2.0]);
        assert!(matches!(
            burg.grad_conjugate(&pd),
            Err(SpdError::DualDomainViolation { map: MapKind::Burg })
        ));
        // Von Neumann accepts the whole symmetric space.
        let vn = make_map(MapKind::NegVonNeumann);
        assert!(vn.in_dual_domain(&indef));
    }
}
