//! Signature-parameterized Clifford algebra on 2×2 complex matrices.
//!
//! The two signatures share one set of gamma matrices through the constant
//! `k`: γ¹ = diag(1, −1) and γ² = [[0, −k], [k, 0]] with k = i (Euclidean) or
//! k = 1 (Lorentzian).  Orientation is fixed once by ε₁₂ = +1 and the
//! chirality element γ := γ₁γ₂ (lowered indices); every downstream sign
//! convention inherits from these two choices.

use thiserror::Error;

use crate::jets::C;

#[derive(Debug, Error, PartialEq)]
pub enum CliffordError {
    #[error("spin element constraint a^2 + eta b^2 = 1 violated by {0:.3e}")]
    ConstraintViolation(f64),
}

/// Metric signature: η = +1 is Euclidean (2,0), η = −1 is Lorentzian (1,1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Euclidean,
    Lorentzian,
}

impl Signature {
    /// The sign η, which is also det η_ab.
    pub fn eta(self) -> f64 {
        match self {
            Signature::Euclidean => 1.0,
            Signature::Lorentzian => -1.0,
        }
    }

    /// η_ab = diag(1, η), frame indices a, b ∈ {1, 2} (0-based here).
    pub fn eta_ab(self, a: usize, b: usize) -> f64 {
        if a != b {
            0.0
        } else if a == 0 {
            1.0
        } else {
            self.eta()
        }
    }

    /// η^{ab}; diagonal ±1 so it coincides with η_ab.
    pub fn eta_up(self, a: usize, b: usize) -> f64 {
        self.eta_ab(a, b)
    }

    /// ε_ab with ε₁₂ = +1.
    pub fn epsilon_ab(self, a: usize, b: usize) -> f64 {
        if a == 0 && b == 1 {
            1.0
        } else if a == 1 && b == 0 {
            -1.0
        } else {
            0.0
        }
    }

    /// ε^{ab} = η^{ac}η^{bd}ε_cd, so ε^{12} = η.
    pub fn epsilon_up(self, a: usize, b: usize) -> f64 {
        self.eta() * self.epsilon_ab(a, b)
    }

    /// The constant k in γ²: i for Euclidean, 1 for Lorentzian.
    pub fn k(self) -> C {
        match self {
            Signature::Euclidean => C::new(0.0, 1.0),
            Signature::Lorentzian => C::new(1.0, 0.0),
        }
    }
}

/// A constant 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Mat2 {
        Mat2([[C::new(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Mat2 {
        let mut m = Mat2::zero();
        m.0[0][0] = C::new(1.0, 0.0);
        m.0[1][1] = C::new(1.0, 0.0);
        m
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][c] + rhs.0[r][c];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][c] - rhs.0[r][c];
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][0] * rhs.0[0][c] + self.0[r][1] * rhs.0[1][c];
            }
        }
        out
    }

    pub fn scale(&self, s: C) -> Mat2 {
        let mut out = *self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] *= s;
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2([
            [self.0[0][0], self.0[1][0]],
            [self.0[0][1], self.0[1][1]],
        ])
    }

    pub fn trace(&self) -> C {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm() < 1e-14 {
            return None;
        }
        let inv = C::new(1.0, 0.0) / d;
        Some(Mat2([
            [self.0[1][1] * inv, -self.0[0][1] * inv],
            [-self.0[1][0] * inv, self.0[0][0] * inv],
        ]))
    }

    /// Largest entrywise deviation from `rhs`.
    pub fn max_diff(&self, rhs: &Mat2) -> f64 {
        let mut m = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                m = m.max((self.0[r][c] - rhs.0[r][c]).norm());
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.max_diff(&Mat2::zero())
    }
}

/// Gamma matrices and chirality element for a signature.
#[derive(Debug, Clone, Copy)]
pub struct GammaSet {
    pub signature: Signature,
    pub identity: Mat2,
    gamma_up: [Mat2; 2],
    /// γ := γ₁γ₂ (lowered indices).
    pub gamma_chir: Mat2,
}

impl GammaSet {
    pub fn new(sig: Signature) -> GammaSet {
        let zero = C::new(0.0, 0.0);
        let one = C::new(1.0, 0.0);
        let k = sig.k();
        let gamma1 = Mat2([[one, zero], [zero, -one]]);
        let gamma2 = Mat2([[zero, -k], [k, zero]]);
        // γ = γ₁γ₂ = η_{1a}γ^a · η_{2b}γ^b = η γ¹γ²
        let gamma_chir = gamma1.mul(&gamma2).scale(C::new(sig.eta(), 0.0));
        let set = GammaSet {
            signature: sig,
            identity: Mat2::identity(),
            gamma_up: [gamma1, gamma2],
            gamma_chir,
        };
        set.assert_dirac_condition();
        set
    }

    fn assert_dirac_condition(&self) {
        for a in 0..2 {
            for b in 0..2 {
                let anti = self.gamma_up[a]
                    .mul(&self.gamma_up[b])
                    .add(&self.gamma_up[b].mul(&self.gamma_up[a]));
                let want = Mat2::identity().scale(C::new(2.0 * self.signature.eta_up(a, b), 0.0));
                assert_eq!(anti, want, "Dirac condition failed for a={a} b={b}");
            }
        }
    }

    /// γ^a, a ∈ {0, 1} for the printed γ¹, γ².
    pub fn gamma_up(&self, a: usize) -> Mat2 {
        self.gamma_up[a]
    }

    /// γ_a = η_ab γ^b.
    pub fn gamma_down(&self, a: usize) -> Mat2 {
        self.gamma_up[a].scale(C::new(self.signature.eta_ab(a, a), 0.0))
    }

    /// Expand M = sI + v_a γ^a + p γ; the basis {I, γ¹, γ², γ} is complete,
    /// so the decomposition always exists and is unique.  Traces give it in
    /// closed form: tr(γ^a γ_b) = 2δ^a_b and tr(γγ) = −2η.
    pub fn basis_decompose(&self, m: &Mat2) -> (C, [C; 2], C) {
        let half = C::new(0.5, 0.0);
        let s = m.trace() * half;
        let v = [
            m.mul(&self.gamma_down(0)).trace() * half,
            m.mul(&self.gamma_down(1)).trace() * half,
        ];
        let p = m.mul(&self.gamma_chir).trace() * half * C::new(-self.signature.eta(), 0.0);
        (s, v, p)
    }

    pub fn basis_recompose(&self, s: C, v: [C; 2], p: C) -> Mat2 {
        self.identity
            .scale(s)
            .add(&self.gamma_up(0).scale(v[0]))
            .add(&self.gamma_up(1).scale(v[1]))
            .add(&self.gamma_chir.scale(p))
    }
}

/// Element of Spin(η): S = aI + bγ with a² + ηb² = 1.
#[derive(Debug, Clone, Copy)]
pub struct SpinElement {
    pub a: C,
    pub b: C,
}

impl SpinElement {
    pub fn new(sig: Signature, a: C, b: C) -> Result<SpinElement, CliffordError> {
        let residual = (a * a + b * b * C::new(sig.eta(), 0.0) - C::new(1.0, 0.0)).norm();
        if residual > 1e-12 {
            return Err(CliffordError::ConstraintViolation(residual));
        }
        Ok(SpinElement { a, b })
    }

    /// One-parameter subgroup: (cos t, sin t) or (cosh t, sinh t).
    pub fn from_angle(sig: Signature, t: f64) -> SpinElement {
        match sig {
            Signature::Euclidean => SpinElement {
                a: C::new(t.cos(), 0.0),
                b: C::new(t.sin(), 0.0),
            },
            Signature::Lorentzian => SpinElement {
                a: C::new(t.cosh(), 0.0),
                b: C::new(t.sinh(), 0.0),
            },
        }
    }

    pub fn matrix(&self, gammas: &GammaSet) -> Mat2 {
        gammas
            .identity
            .scale(self.a)
            .add(&gammas.gamma_chir.scale(self.b))
    }

    /// Group product, computed through (aI + bγ)(a'I + b'γ) with γ² = −ηI.
    pub fn compose(&self, sig: Signature, rhs: &SpinElement) -> SpinElement {
        let eta = C::new(sig.eta(), 0.0);
        SpinElement {
            a: self.a * rhs.a - eta * self.b * rhs.b,
            b: self.a * rhs.b + self.b * rhs.a,
        }
    }
}

/// Covering map Spin(η) → SO(η) in matrix form, defined by the conjugation
/// S γ^b S⁻¹ = γ_a... more precisely S γ^b S⁻¹ = Σ_a l^a_b γ^a:
///
///   l(S) = [[a²−ηb², 2ab], [−2ηab, a²−ηb²]].
///
/// For Euclidean signature this is the familiar rotation by twice the spin
/// angle; for Lorentzian it is the symmetric boost matrix.  (A rotation-form
/// matrix with antisymmetric off-diagonal entries would not preserve
/// diag(1, −1), so the upper-right entry carries no η.)
pub fn covering_map(sig: Signature, s: &SpinElement) -> Mat2 {
    let eta = C::new(sig.eta(), 0.0);
    let diag = s.a * s.a - eta * s.b * s.b;
    let two_ab = C::new(2.0, 0.0) * s.a * s.b;
    Mat2([[diag, two_ab], [-eta * two_ab, diag]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SIGS: [Signature; 2] = [Signature::Euclidean, Signature::Lorentzian];

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn random_mat(rng: &mut ChaCha8Rng) -> Mat2 {
        let mut m = Mat2::zero();
        for r in 0..2 {
            for col in 0..2 {
                m.0[r][col] = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            }
        }
        m
    }

    #[test]
    fn printed_gamma_matrices() {
        let e = GammaSet::new(Signature::Euclidean);
        assert_eq!(
            e.gamma_up(1),
            Mat2([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
        );
        let l = GammaSet::new(Signature::Lorentzian);
        assert_eq!(
            l.gamma_up(1),
            Mat2([[c(0.0, 0.0), c(-1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
        );
        for sig in SIGS {
            let g = GammaSet::new(sig);
            let sq1 = g.gamma_up(0).mul(&g.gamma_up(0));
            let sq2 = g.gamma_up(1).mul(&g.gamma_up(1));
            assert_eq!(sq1, Mat2::identity());
            assert_eq!(sq2, Mat2::identity().scale(c(sig.eta(), 0.0)));
        }
    }

    #[test]
    fn chirality_element_identities() {
        for sig in SIGS {
            let g = GammaSet::new(sig);
            let gamma = g.gamma_chir;
            // γ₁γ₂ = −γ₂γ₁
            let g1g2 = g.gamma_down(0).mul(&g.gamma_down(1));
            let g2g1 = g.gamma_down(1).mul(&g.gamma_down(0));
            assert!(g1g2.max_diff(&g2g1.scale(c(-1.0, 0.0))) == 0.0);
            // γ anticommutes with both γ^a
            for a in 0..2 {
                let anti = g.gamma_up(a).mul(&gamma).add(&gamma.mul(&g.gamma_up(a)));
                assert!(anti.max_abs() < 1e-15);
            }
            // γ² = −ηI by direct multiplication
            let sq = gamma.mul(&gamma);
            assert!(sq.max_diff(&Mat2::identity().scale(c(-sig.eta(), 0.0))) < 1e-15);
        }
    }

    #[test]
    fn basis_is_linearly_independent() {
        // Gram matrix of tr(A†B) over {I, γ¹, γ², γ} is nonsingular iff the
        // set is independent; for these unitary-like matrices it is diagonal.
        for sig in SIGS {
            let g = GammaSet::new(sig);
            let basis = [g.identity, g.gamma_up(0), g.gamma_up(1), g.gamma_chir];
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let mut ip = c(0.0, 0.0);
                    for r in 0..2 {
                        for col in 0..2 {
                            ip += a.0[r][col].conj() * b.0[r][col];
                        }
                    }
                    if i == j {
                        assert!(ip.norm() > 1.9);
                    } else {
                        assert!(ip.norm() < 1e-15, "basis pair ({i},{j}) not orthogonal");
                    }
                }
            }
        }
    }

    #[test]
    fn basis_decompose_fixtures() {
        for sig in SIGS {
            let g = GammaSet::new(sig);
            let (s, v, p) = g.basis_decompose(&g.identity);
            assert!((s - c(1.0, 0.0)).norm() < 1e-15);
            assert!(v[0].norm() < 1e-15 && v[1].norm() < 1e-15 && p.norm() < 1e-15);
            let (s, v, p) = g.basis_decompose(&g.gamma_chir);
            assert!(s.norm() < 1e-15 && v[0].norm() < 1e-15 && v[1].norm() < 1e-15);
            assert!((p - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn basis_decompose_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for sig in SIGS {
            let g = GammaSet::new(sig);
            for _ in 0..1000 {
                let m = random_mat(&mut rng);
                let (s, v, p) = g.basis_decompose(&m);
                let back = g.basis_recompose(s, v, p);
                assert!(back.max_diff(&m) < 1e-13);
            }
        }
    }

    #[test]
    fn covering_map_fixtures() {
        for sig in SIGS {
            let s = SpinElement::new(sig, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
            assert!(covering_map(sig, &s).max_diff(&Mat2::identity()) < 1e-15);
        }
        // Euclidean: rotation by 2t
        let t = 0.3f64;
        let s = SpinElement::from_angle(Signature::Euclidean, t);
        let l = covering_map(Signature::Euclidean, &s);
        let want = Mat2([
            [c((2.0 * t).cos(), 0.0), c((2.0 * t).sin(), 0.0)],
            [c(-(2.0 * t).sin(), 0.0), c((2.0 * t).cos(), 0.0)],
        ]);
        assert!(l.max_diff(&want) < 1e-14);
        // Lorentzian: boost with cosh 2s on the diagonal, sinh 2s off it
        let t = 0.4f64;
        let s = SpinElement::from_angle(Signature::Lorentzian, t);
        let l = covering_map(Signature::Lorentzian, &s);
        let want = Mat2([
            [c((2.0 * t).cosh(), 0.0), c((2.0 * t).sinh(), 0.0)],
            [c((2.0 * t).sinh(), 0.0), c((2.0 * t).cosh(), 0.0)],
        ]);
        assert!(l.max_diff(&want) < 1e-13);
    }

    #[test]
    fn covering_map_preserves_eta_and_is_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for sig in SIGS {
            let eta = Mat2([
                [c(1.0, 0.0), c(0.0, 0.0)],
                [c(0.0, 0.0), c(sig.eta(), 0.0)],
            ]);
            for _ in 0..100 {
                let s1 = SpinElement::from_angle(sig, rng.gen_range(-1.5..1.5));
                let s2 = SpinElement::from_angle(sig, rng.gen_range(-1.5..1.5));
                let l1 = covering_map(sig, &s1);
                let l2 = covering_map(sig, &s2);
                // lᵀ η l = η (l is real here, so transpose == conjugate layout)
                let lt = Mat2([[l1.0[0][0], l1.0[1][0]], [l1.0[0][1], l1.0[1][1]]]);
                assert!(lt.mul(&eta).mul(&l1).max_diff(&eta) < 1e-12);
                let prod = s1.compose(sig, &s2);
                assert!(covering_map(sig, &prod).max_diff(&l1.mul(&l2)) < 1e-12);
            }
        }
    }

    #[test]
    fn spin_constraint_enforced() {
        let err = SpinElement::new(Signature::Euclidean, c(1.0, 0.0), c(0.5, 0.0)).unwrap_err();
        assert!(matches!(err, CliffordError::ConstraintViolation(_)));
    }

    #[test]
    fn spin_covering_conjugation() {
        // The defining property: S γ^b S⁻¹ expands over the γ^a with the
        // covering-map matrix as coefficients.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for sig in SIGS {
            let g = GammaSet::new(sig);
            for _ in 0..50 {
                let s = SpinElement::from_angle(sig, rng.gen_range(-1.2..1.2));
                let sm = s.matrix(&g);
                let sinv = sm.inverse().unwrap();
                let l = covering_map(sig, &s);
                for b in 0..2 {
                    let lhs = sm.mul(&g.gamma_up(b)).mul(&sinv);
                    let mut rhs = Mat2::zero();
                    for a in 0..2 {
                        rhs = rhs.add(&g.gamma_up(a).scale(l.0[a][b]));
                    }
                    assert!(lhs.max_diff(&rhs) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn two_forms_of_spin_connection_agree() {
        // ⅛ Γ^{ab}[γ_a, γ_b] = ¼ Γ^{ab} ε_ab γ for antisymmetric Γ^{ab}
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for sig in SIGS {
            let g = GammaSet::new(sig);
            for _ in 0..100 {
                let w = rng.gen_range(-3.0..3.0);
                let gamma_ab = [[0.0, w], [-w, 0.0]];
                let mut lhs = Mat2::zero();
                let mut eps_contraction = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        let comm = g
                            .gamma_down(a)
                            .mul(&g.gamma_down(b))
                            .sub(&g.gamma_down(b).mul(&g.gamma_down(a)));
                        lhs = lhs.add(&comm.scale(c(gamma_ab[a][b] / 8.0, 0.0)));
                        eps_contraction += gamma_ab[a][b] * sig.epsilon_ab(a, b);
                    }
                }
                let rhs = g.gamma_chir.scale(c(eps_contraction / 4.0, 0.0));
                assert!(lhs.max_diff(&rhs) < 1e-13);
            }
        }
    }
}
