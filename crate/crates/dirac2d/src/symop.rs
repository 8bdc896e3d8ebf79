//! The Dirac operator and its first- and second-order symmetry operators.
//!
//! 𝔻ψ = iγ^a∇_aψ − mψ.  A second-order symmetry operator has the form
//! 𝕂 = 𝔼^{ab}∇_{ab} + 𝔽^a∇_a + 𝔾 with matrix coefficients
//!
//!   𝔼^{ab} = e^{ab}I + 2α^{(a}γ^{b)}
//!   𝔽^a    = (ζ^a + ∇_c e^{ac})I + (γ^c∇_cα^a + Aγ^a) + ⅓ε_{bc}∇^b e^{ac}γ
//!   𝔾      = gI − ¼Rα_bγ^b + ¼ε_{ba}∇^bζ^aγ
//!
//! built from a Killing tensor e^{ab}, Killing vectors α^a and ζ^a, a constant
//! A, and a scalar g with ∇^a g = −¼∇_b(Re^{ab}).  Setting e and α to zero
//! recovers the first-order operator 𝕃 = ζ^a∇_a + Aγ^a∇_a + 𝔾.  The
//! commutator [𝕂, 𝔻] is evaluated numerically on jets of test spinors; it
//! vanishes exactly when the data satisfy the conditions above.

use thiserror::Error;

use crate::clifford::Mat2;
use crate::expr::{EvalError, Expr};
use crate::geometry::{
    frame_first, geometry_at, mat2_apply, second_sym_derivative, FrameField, GeomError,
    GeometryJet, SpinorJet,
};
use crate::jets::{Jet, JetError, C};
use crate::killing::{
    frame_tensor_gradient, frame_vector_gradient, synthesize_g_jet, KillingData, KillingError,
};

#[derive(Debug, Error)]
pub enum SymOpError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Killing(#[from] KillingError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// A 2×2 spinor-space matrix whose entries are jets; used for the
/// position-dependent operator coefficients.
#[derive(Debug, Clone)]
pub struct MatJet(pub [[Jet; 2]; 2]);

impl MatJet {
    pub fn zero(order: usize) -> MatJet {
        MatJet([
            [Jet::zero(order), Jet::zero(order)],
            [Jet::zero(order), Jet::zero(order)],
        ])
    }

    /// self + j·m, entrywise, truncating to the lower order.
    pub fn add_scaled(&self, m: &Mat2, j: &Jet) -> MatJet {
        let mut out = self.clone();
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = out.0[r][c].add_trunc(&j.scale(m.0[r][c]));
            }
        }
        out
    }

    pub fn apply(&self, s: &SpinorJet) -> SpinorJet {
        SpinorJet {
            c: [
                self.0[0][0]
                    .mul_trunc(&s.c[0])
                    .add_trunc(&self.0[0][1].mul_trunc(&s.c[1])),
                self.0[1][0]
                    .mul_trunc(&s.c[0])
                    .add_trunc(&self.0[1][1].mul_trunc(&s.c[1])),
            ],
        }
    }

    /// Point value of the matrix.
    pub fn value(&self) -> Mat2 {
        let mut m = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                m.0[r][c] = self.0[r][c].value();
            }
        }
        m
    }
}

/// 𝔻 = iγ^a∇_a − m on a fixed frame.
#[derive(Debug, Clone)]
pub struct DiracOperator {
    pub frame: FrameField,
    pub mass: C,
}

impl DiracOperator {
    pub fn new(frame: FrameField, mass: C) -> DiracOperator {
        DiracOperator { frame, mass }
    }

    pub fn apply(&self, psi: &SpinorJet, point: (C, C)) -> Result<SpinorJet, SymOpError> {
        let geo = geometry_at(&self.frame, point, psi.order().max(2))?;
        Ok(self.apply_with(&geo, psi)?)
    }

    /// Apply with a precomputed geometry jet (same frame, same point).
    pub fn apply_with(&self, geo: &GeometryJet, psi: &SpinorJet) -> Result<SpinorJet, JetError> {
        let d1 = frame_first(psi, geo)?;
        let mut out = SpinorJet::zero(d1[0].order());
        for a in 0..2 {
            out = out.add_trunc(&mat2_apply(&geo.gammas.gamma_up(a), &d1[a]));
        }
        Ok(out
            .scale(C::new(0.0, 1.0))
            .sub_trunc(&psi.scale(self.mass)))
    }
}

/// Matrix coefficients of 𝕂 at a point, as jets: `e2[a][b]` = 𝔼^{ab},
/// `f1[a]` = 𝔽^a, `g0` = 𝔾.
#[derive(Debug, Clone)]
pub struct OperatorCoefficients {
    pub e2: [[MatJet; 2]; 2],
    pub f1: [MatJet; 2],
    pub g0: MatJet,
}

/// A symmetry operator candidate built from Killing data on a frame.  When
/// `data.g_scalar` is `None` the scalar g is synthesized from the
/// integrability condition by path integration from `g_corner` (the additive
/// constant is a multiple of the identity and drops out of commutators).
#[derive(Debug, Clone)]
pub struct SymmetryOperator {
    pub data: KillingData,
    pub frame: FrameField,
    pub g_corner: (f64, f64),
    pub g_steps: usize,
}

impl SymmetryOperator {
    pub fn second_order(
        data: KillingData,
        frame: FrameField,
        g_corner: (f64, f64),
        g_steps: usize,
    ) -> SymmetryOperator {
        SymmetryOperator {
            data,
            frame,
            g_corner,
            g_steps,
        }
    }

    /// First-order operator 𝕃 = (ζ^a + Aγ^a)∇_a + gI + ¼ε_{ba}∇^bζ^aγ:
    /// the general form with e^{ab} = 0 and α = 0.
    pub fn first_order(
        zeta: [Expr; 2],
        a_const: C,
        g_const: C,
        frame: FrameField,
    ) -> SymmetryOperator {
        let zero = || Expr::num(0.0);
        let data = KillingData {
            e_tensor: [[zero(), zero()], [zero(), zero()]],
            alpha: [zero(), zero()],
            zeta,
            a_const,
            g_scalar: Some(Expr::Num(g_const)),
        };
        SymmetryOperator {
            data,
            frame,
            g_corner: (0.0, 0.0),
            g_steps: 2,
        }
    }

    /// Build the coefficient jets at `point` from a geometry jet of the same
    /// frame and point.  Coefficient orders come out as `geo.order − 2`.
    pub fn coefficients(
        &self,
        geo: &GeometryJet,
        point: (C, C),
    ) -> Result<OperatorCoefficients, SymOpError> {
        let sig = geo.signature;
        let gam = &geo.gammas;
        let order = geo.order;
        let co = order.saturating_sub(2);
        let kd = &self.data;

        let ejet = |e: &Expr| -> Result<Jet, EvalError> { e.eval_jet(point, order) };
        let e_vals = [
            [ejet(&kd.e_tensor[0][0])?, ejet(&kd.e_tensor[0][1])?],
            [ejet(&kd.e_tensor[1][0])?, ejet(&kd.e_tensor[1][1])?],
        ];
        let alpha = [ejet(&kd.alpha[0])?, ejet(&kd.alpha[1])?];
        let zeta = [ejet(&kd.zeta[0])?, ejet(&kd.zeta[1])?];
        let tgrad = frame_tensor_gradient(&kd.e_tensor, geo, point)?; // ∇_c e^{ab}
        let agrad = frame_vector_gradient(&kd.alpha, geo, point)?; // ∇_c α^a
        let zgrad = frame_vector_gradient(&kd.zeta, geo, point)?; // ∇_c ζ^a

        // 𝔼^{ab} = e^{ab}I + α^aγ^b + α^bγ^a
        let ident = Mat2::identity();
        let mut e2 = [
            [MatJet::zero(co), MatJet::zero(co)],
            [MatJet::zero(co), MatJet::zero(co)],
        ];
        for a in 0..2 {
            for b in 0..2 {
                e2[a][b] = MatJet::zero(co)
                    .add_scaled(&ident, &e_vals[a][b])
                    .add_scaled(&gam.gamma_up(b), &alpha[a])
                    .add_scaled(&gam.gamma_up(a), &alpha[b]);
            }
        }

        // 𝔽^a
        let mut f1 = [MatJet::zero(co), MatJet::zero(co)];
        for a in 0..2 {
            let mut f = MatJet::zero(co);
            // (ζ^a + ∇_c e^{ac}) I
            let mut scal = zeta[a].clone();
            for c in 0..2 {
                scal = scal.add_trunc(&tgrad[c][a][c]);
            }
            f = f.add_scaled(&ident, &scal);
            // γ^c ∇_c α^a + A γ^a
            for c in 0..2 {
                f = f.add_scaled(&gam.gamma_up(c), &agrad[c][a]);
            }
            f = f.add_scaled(&gam.gamma_up(a).scale(kd.a_const), &Jet::constant(co, C::new(1.0, 0.0)));
            // ⅓ ε_{bc} ∇^b e^{ac} γ
            let mut pseudo = Jet::zero(co);
            for b in 0..2 {
                for c in 0..2 {
                    let w = sig.epsilon_ab(b, c) * sig.eta_up(b, b) / 3.0;
                    if w != 0.0 {
                        pseudo = pseudo.add_trunc(&tgrad[b][a][c].scale(C::new(w, 0.0)));
                    }
                }
            }
            f1[a] = f.add_scaled(&gam.gamma_chir, &pseudo);
        }

        // 𝔾 = gI − ¼Rα_bγ^b + ¼ε_{ba}∇^bζ^aγ
        let g_jet = match &kd.g_scalar {
            Some(e) => e.eval_jet(point, co)?,
            None => synthesize_g_jet(
                &kd.e_tensor,
                &self.frame,
                point,
                co,
                self.g_corner,
                self.g_steps,
            )?,
        };
        let mut g0 = MatJet::zero(co).add_scaled(&ident, &g_jet);
        for b in 0..2 {
            let coef = C::new(-0.25 * sig.eta_ab(b, b), 0.0);
            g0 = g0.add_scaled(&gam.gamma_up(b), &geo.ricci.mul_trunc(&alpha[b]).scale(coef));
        }
        let mut zpseudo = Jet::zero(co);
        for b in 0..2 {
            for a in 0..2 {
                let w = 0.25 * sig.epsilon_ab(b, a) * sig.eta_up(b, b);
                if w != 0.0 {
                    zpseudo = zpseudo.add_trunc(&zgrad[b][a].scale(C::new(w, 0.0)));
                }
            }
        }
        g0 = g0.add_scaled(&gam.gamma_chir, &zpseudo);

        Ok(OperatorCoefficients { e2, f1, g0 })
    }

    pub fn apply(&self, psi: &SpinorJet, point: (C, C)) -> Result<SpinorJet, SymOpError> {
        let geo = geometry_at(&self.frame, point, psi.order().max(2) + 2)?;
        let coefs = self.coefficients(&geo, point)?;
        self.apply_with(&geo, &coefs, psi)
    }

    /// 𝕂ψ = 𝔼^{ab}∇_{ab}ψ + 𝔽^a∇_aψ + 𝔾ψ with precomputed coefficients.
    pub fn apply_with(
        &self,
        geo: &GeometryJet,
        coefs: &OperatorCoefficients,
        psi: &SpinorJet,
    ) -> Result<SpinorJet, SymOpError> {
        let sym2 = second_sym_derivative(psi, geo)?;
        let d1 = frame_first(psi, geo)?;
        let mut out = SpinorJet::zero(psi.order().saturating_sub(2));
        for a in 0..2 {
            for b in 0..2 {
                out = out.add_trunc(&coefs.e2[a][b].apply(&sym2[a][b]));
            }
            out = out.add_trunc(&coefs.f1[a].apply(&d1[a]));
        }
        Ok(out.add_trunc(&coefs.g0.apply(psi)))
    }
}

/// Point value of [𝕂, 𝔻]ψ = 𝕂(𝔻ψ) − 𝔻(𝕂ψ): the max component norm of the
/// constant term of the result jet.  `psi` must have order ≥ 3 so the
/// commutator retains an order-0 part.
pub fn commutator_residual(
    op: &SymmetryOperator,
    dirac: &DiracOperator,
    psi: &SpinorJet,
    point: (C, C),
) -> Result<f64, SymOpError> {
    let geo = geometry_at(&op.frame, point, psi.order().max(3) + 2)?;
    let coefs = op.coefficients(&geo, point)?;
    let dpsi = dirac.apply_with(&geo, psi)?;
    let kdpsi = op.apply_with(&geo, &coefs, &dpsi)?;
    let kpsi = op.apply_with(&geo, &coefs, psi)?;
    let dkpsi = dirac.apply_with(&geo, &kpsi)?;
    let r = kdpsi.sub_trunc(&dkpsi);
    Ok(r.c[0].value().norm().max(r.c[1].value().norm()))
}
