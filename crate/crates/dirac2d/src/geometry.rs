//! Spin-frame geometry as truncated jets at a point.
//!
//! A spin frame e^μ_a determines everything else: the metric g_μν = e^a_μ
//! η_ab e^b_ν, its Levi-Civita connection, the spin connection Γ^{ab}_μ, the
//! spinor connection Γ_μ = ¼Γ^{ab}_μ ε_ab γ, and the Ricci scalar.  All of
//! these are computed here as jets, together with spinor covariant
//! derivatives up to third order and the curvature identities they satisfy.
//!
//! Conventions: Riemann tensor
//! R^α_{βμν} = ∂_μΓ^α_{βν} − ∂_νΓ^α_{βμ} + Γ^α_{σμ}Γ^σ_{βν} − Γ^α_{σν}Γ^σ_{βμ},
//! Ricci scalar R = g^{βν}R^α_{βαν}, ε₁₂ = +1.  The pair (Riemann sign, ε
//! orientation) is pinned by requiring [∇_c,∇_d]ψ = ¼γψε_cd R on the sphere
//! fixture; see the tests.

use thiserror::Error;

use crate::clifford::{GammaSet, Mat2, Signature};
use crate::expr::{self, EvalError, Expr, ParseError};
use crate::jets::{Axis, Jet, JetError, C};

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("frame is degenerate: |det e| = {0:.3e}")]
    DegenerateFrame(f64),
    #[error("frame has complex components (max imaginary magnitude {0:.3e}) but allow_complex is off")]
    ComplexFrame(f64),
    #[error("spin transformation violates a^2 + eta b^2 = 1 by {0:.3e}")]
    SpinConstraint(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("order {0} too low: geometry needs order >= 2")]
    OrderTooLow(usize),
}

/// Spin frame e^μ_a(x, y) given symbolically; rows μ, columns a.
#[derive(Debug, Clone)]
pub struct FrameField {
    pub signature: Signature,
    pub e: [[Expr; 2]; 2],
    pub allow_complex: bool,
}

impl FrameField {
    pub fn new(signature: Signature, e: [[Expr; 2]; 2], allow_complex: bool) -> FrameField {
        FrameField {
            signature,
            e,
            allow_complex,
        }
    }

    /// Parse the four components from strings, row-major: `[[e^x_1, e^x_2], [e^y_1, e^y_2]]`.
    pub fn parse(
        signature: Signature,
        src: [[&str; 2]; 2],
        allow_complex: bool,
    ) -> Result<FrameField, ParseError> {
        Ok(FrameField {
            signature,
            e: [
                [expr::parse(src[0][0])?, expr::parse(src[0][1])?],
                [expr::parse(src[1][0])?, expr::parse(src[1][1])?],
            ],
            allow_complex,
        })
    }
}

/// Two-component spinor with jet entries of a common order.
#[derive(Debug, Clone)]
pub struct SpinorJet {
    pub c: [Jet; 2],
}

impl SpinorJet {
    pub fn zero(order: usize) -> SpinorJet {
        SpinorJet {
            c: [Jet::zero(order), Jet::zero(order)],
        }
    }

    pub fn order(&self) -> usize {
        self.c[0].order().min(self.c[1].order())
    }

    pub fn add_trunc(&self, rhs: &SpinorJet) -> SpinorJet {
        SpinorJet {
            c: [
                self.c[0].add_trunc(&rhs.c[0]),
                self.c[1].add_trunc(&rhs.c[1]),
            ],
        }
    }

    pub fn sub_trunc(&self, rhs: &SpinorJet) -> SpinorJet {
        SpinorJet {
            c: [
                self.c[0].sub_trunc(&rhs.c[0]),
                self.c[1].sub_trunc(&rhs.c[1]),
            ],
        }
    }

    pub fn scale(&self, s: C) -> SpinorJet {
        SpinorJet {
            c: [self.c[0].scale(s), self.c[1].scale(s)],
        }
    }

    /// Multiply every component by a jet scalar, truncating to the lower order.
    pub fn mul_jet(&self, s: &Jet) -> SpinorJet {
        SpinorJet {
            c: [self.c[0].mul_trunc(s), self.c[1].mul_trunc(s)],
        }
    }

    pub fn partial(&self, axis: Axis) -> Result<SpinorJet, JetError> {
        Ok(SpinorJet {
            c: [self.c[0].partial(axis)?, self.c[1].partial(axis)?],
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.c[0].max_abs().max(self.c[1].max_abs())
    }
}

/// Apply a constant matrix to a spinor of jets.
pub fn mat2_apply(m: &Mat2, s: &SpinorJet) -> SpinorJet {
    SpinorJet {
        c: [
            s.c[0].scale(m.0[0][0]).add_trunc(&s.c[1].scale(m.0[0][1])),
            s.c[0].scale(m.0[1][0]).add_trunc(&s.c[1].scale(m.0[1][1])),
        ],
    }
}

/// All geometric data at one point, as jets.
#[derive(Debug, Clone)]
pub struct GeometryJet {
    pub signature: Signature,
    pub order: usize,
    /// e^μ_a, indexed [μ][a]; order n.
    pub e_up: [[Jet; 2]; 2],
    /// e^a_μ, indexed [a][μ]; order n.
    pub e_dn: [[Jet; 2]; 2],
    /// g_μν; order n.
    pub g: [[Jet; 2]; 2],
    /// g^μν; order n.
    pub g_inv: [[Jet; 2]; 2],
    /// Γ^α_{βμ}, indexed [α][β][μ]; order n−1.
    pub christoffel: [[[Jet; 2]; 2]; 2],
    /// Γ^{ab}_μ, indexed [a][b][μ]; order n−1.
    pub spin_conn: [[[Jet; 2]; 2]; 2],
    /// Ricci scalar; order n−2.
    pub ricci: Jet,
    /// Gamma matrices for the signature.
    pub gammas: GammaSet,
}

impl GeometryJet {
    /// The jet coefficient of γ in the spinor connection:
    /// Γ_μ = ¼Γ^{ab}_μ ε_ab γ = ½ Γ^{12}_μ γ.
    pub fn spinor_conn(&self, mu: usize) -> Jet {
        self.spin_conn[0][1][mu].scale(C::new(0.5, 0.0))
    }

    /// Max-norm residual of metricity ∇_α g_μν = 0 over all stored indices.
    pub fn metricity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for alpha in 0..2 {
            let axis = [Axis::X, Axis::Y][alpha];
            for mu in 0..2 {
                for nu in 0..2 {
                    let mut r = self.g[mu][nu].partial(axis).expect("order >= 1");
                    for sigma in 0..2 {
                        r = r
                            .sub_trunc(&self.christoffel[sigma][mu][alpha].mul_trunc(&self.g[sigma][nu]))
                            .sub_trunc(&self.christoffel[sigma][nu][alpha].mul_trunc(&self.g[mu][sigma]));
                    }
                    worst = worst.max(r.max_abs());
                }
            }
        }
        worst
    }

    /// Max-norm residual of e^a_μ e^μ_b − δ^a_b over stored orders.
    pub fn duality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..2 {
            for b in 0..2 {
                let mut s = Jet::zero(self.order);
                for mu in 0..2 {
                    s = s.add_trunc(&self.e_dn[a][mu].mul_trunc(&self.e_up[mu][b]));
                }
                let delta = if a == b { 1.0 } else { 0.0 };
                let r = s.sub_trunc(&Jet::constant(self.order, C::new(delta, 0.0)));
                worst = worst.max(r.max_abs());
            }
        }
        worst
    }
}

/// Evaluate the frame expressions and build the geometry at a point.
pub fn geometry_at(
    frame: &FrameField,
    point: (C, C),
    order: usize,
) -> Result<GeometryJet, GeomError> {
    if order < 2 {
        return Err(GeomError::OrderTooLow(order));
    }
    let mut e_up = [
        [Jet::zero(order), Jet::zero(order)],
        [Jet::zero(order), Jet::zero(order)],
    ];
    for mu in 0..2 {
        for a in 0..2 {
            e_up[mu][a] = frame.e[mu][a].eval_jet(point, order)?;
        }
    }
    geometry_from_jets(frame.signature, e_up, frame.allow_complex)
}

/// Build the geometry directly from frame jets (used for transformed frames).
pub fn geometry_from_jets(
    sig: Signature,
    e_up: [[Jet; 2]; 2],
    allow_complex: bool,
) -> Result<GeometryJet, GeomError> {
    let order = e_up[0][0].order();
    if order < 2 {
        return Err(GeomError::OrderTooLow(order));
    }
    if !allow_complex {
        let mut worst = 0.0f64;
        for row in &e_up {
            for j in row {
                worst = worst.max(j.max_abs_imag());
            }
        }
        if worst > 1e-12 {
            return Err(GeomError::ComplexFrame(worst));
        }
    }

    let det = e_up[0][0]
        .mul_trunc(&e_up[1][1])
        .sub_trunc(&e_up[0][1].mul_trunc(&e_up[1][0]));
    if det.value().norm() < 1e-10 {
        return Err(GeomError::DegenerateFrame(det.value().norm()));
    }
    let inv_det = det.reciprocal()?;
    // inverse frame e^a_μ, indexed [a][μ]
    let e_dn = [
        [
            e_up[1][1].mul_trunc(&inv_det),
            e_up[0][1].mul_trunc(&inv_det).neg(),
        ],
        [
            e_up[1][0].mul_trunc(&inv_det).neg(),
            e_up[0][0].mul_trunc(&inv_det),
        ],
    ];

    let zero = || Jet::zero(order);
    let mut g = [[zero(), zero()], [zero(), zero()]];
    let mut g_inv = [[zero(), zero()], [zero(), zero()]];
    for mu in 0..2 {
        for nu in 0..2 {
            let mut s = zero();
            let mut si = zero();
            for a in 0..2 {
                let eta = C::new(sig.eta_ab(a, a), 0.0);
                s = s.add_trunc(&e_dn[a][mu].mul_trunc(&e_dn[a][nu]).scale(eta));
                si = si.add_trunc(&e_up[mu][a].mul_trunc(&e_up[nu][a]).scale(eta));
            }
            g[mu][nu] = s;
            g_inv[mu][nu] = si;
        }
    }

    // Levi-Civita: Γ^α_{βμ} = ½ g^{ασ}(∂_β g_σμ + ∂_μ g_σβ − ∂_σ g_βμ)
    let axes = [Axis::X, Axis::Y];
    let mut dg = [[[zero(), zero()], [zero(), zero()]], [[zero(), zero()], [zero(), zero()]]];
    for lam in 0..2 {
        for mu in 0..2 {
            for nu in 0..2 {
                dg[lam][mu][nu] = g[mu][nu].partial(axes[lam])?;
            }
        }
    }
    let mut christoffel =
        [[[zero(), zero()], [zero(), zero()]], [[zero(), zero()], [zero(), zero()]]];
    for alpha in 0..2 {
        for beta in 0..2 {
            for mu in 0..2 {
                let mut s = Jet::zero(order - 1);
                for sigma in 0..2 {
                    let inner = dg[beta][sigma][mu]
                        .add_trunc(&dg[mu][sigma][beta])
                        .sub_trunc(&dg[sigma][beta][mu]);
                    s = s.add_trunc(&g_inv[alpha][sigma].mul_trunc(&inner));
                }
                christoffel[alpha][beta][mu] = s.scale(C::new(0.5, 0.0));
            }
        }
    }

    // spin connection: Γ^{ab}_μ = e^a_α(Γ^α_{βμ} e^{bβ} + ∂_μ e^α_c η^{cb})
    let mut spin_conn =
        [[[zero(), zero()], [zero(), zero()]], [[zero(), zero()], [zero(), zero()]]];
    for a in 0..2 {
        for b in 0..2 {
            let eta_b = C::new(sig.eta_up(b, b), 0.0);
            for mu in 0..2 {
                let mut s = Jet::zero(order - 1);
                for alpha in 0..2 {
                    let mut inner = e_up[alpha][b].partial(axes[mu])?;
                    for beta in 0..2 {
                        inner = inner
                            .add_trunc(&christoffel[alpha][beta][mu].mul_trunc(&e_up[beta][b]));
                    }
                    s = s.add_trunc(&e_dn[a][alpha].mul_trunc(&inner));
                }
                spin_conn[a][b][mu] = s.scale(eta_b);
            }
        }
    }

    // Riemann and Ricci scalar
    let mut ricci = Jet::zero(order - 2);
    for beta in 0..2 {
        for nu in 0..2 {
            let mut r_trace = Jet::zero(order - 2);
            for alpha in 0..2 {
                // R^α_{βαν}
                let mut term = christoffel[alpha][beta][nu]
                    .partial(axes[alpha])?
                    .sub_trunc(&christoffel[alpha][beta][alpha].partial(axes[nu])?);
                for sigma in 0..2 {
                    term = term
                        .add_trunc(
                            &christoffel[alpha][sigma][alpha]
                                .mul_trunc(&christoffel[sigma][beta][nu]),
                        )
                        .sub_trunc(
                            &christoffel[alpha][sigma][nu]
                                .mul_trunc(&christoffel[sigma][beta][alpha]),
                        );
                }
                r_trace = r_trace.add_trunc(&term);
            }
            ricci = ricci.add_trunc(&g_inv[beta][nu].mul_trunc(&r_trace));
        }
    }

    Ok(GeometryJet {
        signature: sig,
        order,
        e_up,
        e_dn,
        g,
        g_inv,
        christoffel,
        spin_conn,
        ricci,
        gammas: GammaSet::new(sig),
    })
}

/// Spinor covariant derivative in coordinate indices: ∇_μψ = ∂_μψ + Γ_μψ.
pub fn covariant_derivative(
    psi: &SpinorJet,
    geo: &GeometryJet,
) -> Result<[SpinorJet; 2], JetError> {
    let gamma = geo.gammas.gamma_chir;
    let mut out = [
        SpinorJet::zero(psi.order().saturating_sub(1)),
        SpinorJet::zero(psi.order().saturating_sub(1)),
    ];
    for (mu, axis) in [Axis::X, Axis::Y].into_iter().enumerate() {
        let dpsi = psi.partial(axis)?;
        let conn = mat2_apply(&gamma, psi).mul_jet(&geo.spinor_conn(mu));
        out[mu] = dpsi.add_trunc(&conn);
    }
    Ok(out)
}

/// Second covariant derivative ∇_μ∇_νψ in coordinate indices, [μ][ν].
pub fn coord_second(
    psi: &SpinorJet,
    geo: &GeometryJet,
) -> Result<[[SpinorJet; 2]; 2], JetError> {
    let d1 = covariant_derivative(psi, geo)?;
    let gamma = geo.gammas.gamma_chir;
    let lower = d1[0].order().saturating_sub(1);
    let mut out = [
        [SpinorJet::zero(lower), SpinorJet::zero(lower)],
        [SpinorJet::zero(lower), SpinorJet::zero(lower)],
    ];
    for (mu, axis) in [Axis::X, Axis::Y].into_iter().enumerate() {
        for nu in 0..2 {
            let mut t = d1[nu]
                .partial(axis)?
                .add_trunc(&mat2_apply(&gamma, &d1[nu]).mul_jet(&geo.spinor_conn(mu)));
            for sigma in 0..2 {
                t = t.sub_trunc(&d1[sigma].mul_jet(&geo.christoffel[sigma][nu][mu]));
            }
            out[mu][nu] = t;
        }
    }
    Ok(out)
}

/// Third covariant derivative ∇_λ∇_μ∇_νψ in coordinate indices, [λ][μ][ν].
pub fn coord_third(
    psi: &SpinorJet,
    geo: &GeometryJet,
) -> Result<[[[SpinorJet; 2]; 2]; 2], JetError> {
    let d2 = coord_second(psi, geo)?;
    let gamma = geo.gammas.gamma_chir;
    let lower = d2[0][0].order().saturating_sub(1);
    let z = || SpinorJet::zero(lower);
    let mut out = [
        [[z(), z()], [z(), z()]],
        [[z(), z()], [z(), z()]],
    ];
    for (lam, axis) in [Axis::X, Axis::Y].into_iter().enumerate() {
        for mu in 0..2 {
            for nu in 0..2 {
                let mut t = d2[mu][nu]
                    .partial(axis)?
                    .add_trunc(&mat2_apply(&gamma, &d2[mu][nu]).mul_jet(&geo.spinor_conn(lam)));
                for sigma in 0..2 {
                    t = t
                        .sub_trunc(&d2[sigma][nu].mul_jet(&geo.christoffel[sigma][mu][lam]))
                        .sub_trunc(&d2[mu][sigma].mul_jet(&geo.christoffel[sigma][nu][lam]));
                }
                out[lam][mu][nu] = t;
            }
        }
    }
    Ok(out)
}

/// Frame projection of the first derivative: ∇_aψ = e^μ_a ∇_μψ.
pub fn frame_first(
    psi: &SpinorJet,
    geo: &GeometryJet,
) -> Result<[SpinorJet; 2], JetError> {
    let d1 = covariant_derivative(psi, geo)?;
    Ok(project1(&d1, geo))
}

fn project1(d1: &[SpinorJet; 2], geo: &GeometryJet) -> [SpinorJet; 2] {
    let mut out = [
        SpinorJet::zero(d1[0].order()),
        SpinorJet::zero(d1[0].order()),
    ];
    for a in 0..2 {
        let mut s = SpinorJet::zero(d1[0].order());
        for mu in 0..2 {
            s = s.add_trunc(&d1[mu].mul_jet(&geo.e_up[mu][a]));
        }
        out[a] = s;
    }
    out
}

fn project2(d2: &[[SpinorJet; 2]; 2], geo: &GeometryJet) -> [[SpinorJet; 2]; 2] {
    let ord = d2[0][0].order();
    let z = || SpinorJet::zero(ord);
    let mut out = [[z(), z()], [z(), z()]];
    for a in 0..2 {
        for b in 0..2 {
            let mut s = z();
            for mu in 0..2 {
                for nu in 0..2 {
                    s = s.add_trunc(
                        &d2[mu][nu]
                            .mul_jet(&geo.e_up[mu][a])
                            .mul_jet(&geo.e_up[nu][b]),
                    );
                }
            }
            out[a][b] = s;
        }
    }
    out
}

fn project3(d3: &[[[SpinorJet; 2]; 2]; 2], geo: &GeometryJet) -> [[[SpinorJet; 2]; 2]; 2] {
    let ord = d3[0][0][0].order();
    let z = || SpinorJet::zero(ord);
    let mut out = [[[z(), z()], [z(), z()]], [[z(), z()], [z(), z()]]];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let mut s = z();
                for lam in 0..2 {
                    for mu in 0..2 {
                        for nu in 0..2 {
                            s = s.add_trunc(
                                &d3[lam][mu][nu]
                                    .mul_jet(&geo.e_up[lam][a])
                                    .mul_jet(&geo.e_up[mu][b])
                                    .mul_jet(&geo.e_up[nu][c]),
                            );
                        }
                    }
                }
                out[a][b][c] = s;
            }
        }
    }
    out
}

/// Symmetrized second frame derivative ∇_{ab}ψ = ½(∇_a∇_b + ∇_b∇_a)ψ.
pub fn second_sym_derivative(
    psi: &SpinorJet,
    geo: &GeometryJet,
) -> Result<[[SpinorJet; 2]; 2], JetError> {
    let p2 = project2(&coord_second(psi, geo)?, geo);
    let half = C::new(0.5, 0.0);
    let ord = p2[0][0].order();
    let z = || SpinorJet::zero(ord);
    let mut out = [[z(), z()], [z(), z()]];
    for a in 0..2 {
        for b in 0..2 {
            out[a][b] = p2[a][b].add_trunc(&p2[b][a]).scale(half);
        }
    }
    Ok(out)
}

/// Fully symmetrized third frame derivative ∇_{abc}ψ.
pub fn third_sym_derivative(
    psi: &SpinorJet,
    geo: &GeometryJet,
) -> Result<[[[SpinorJet; 2]; 2]; 2], JetError> {
    let p3 = project3(&coord_third(psi, geo)?, geo);
    let sixth = C::new(1.0 / 6.0, 0.0);
    let ord = p3[0][0][0].order();
    let z = || SpinorJet::zero(ord);
    let mut out = [[[z(), z()], [z(), z()]], [[z(), z()], [z(), z()]]];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                out[a][b][c] = p3[a][b][c]
                    .add_trunc(&p3[a][c][b])
                    .add_trunc(&p3[b][a][c])
                    .add_trunc(&p3[b][c][a])
                    .add_trunc(&p3[c][a][b])
                    .add_trunc(&p3[c][b][a])
                    .scale(sixth);
            }
        }
    }
    Ok(out)
}

/// Residuals of the two Ricci identities:
/// [∇_c,∇_d]ψ = ¼γψε_cd R  and
/// [∇_a,∇_b]∇_cψ = (R/4)γε_ab∇_cψ − (R/2)ε^d_c ε_ab ∇_dψ.
pub fn ricci_identity_check(psi: &SpinorJet, geo: &GeometryJet) -> Result<(f64, f64), JetError> {
    let sig = geo.signature;
    let gamma = geo.gammas.gamma_chir;
    let quarter_r = geo.ricci.scale(C::new(0.25, 0.0));

    let p2 = project2(&coord_second(psi, geo)?, geo);
    let mut worst1 = 0.0f64;
    for c in 0..2 {
        for d in 0..2 {
            let comm = p2[c][d].sub_trunc(&p2[d][c]);
            let rhs = mat2_apply(&gamma, psi)
                .mul_jet(&quarter_r)
                .scale(C::new(sig.epsilon_ab(c, d), 0.0));
            worst1 = worst1.max(comm.sub_trunc(&rhs).max_abs());
        }
    }

    let d1 = project1(&covariant_derivative(psi, geo)?, geo);
    let p3 = project3(&coord_third(psi, geo)?, geo);
    let mut worst2 = 0.0f64;
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let comm = p3[a][b][c].sub_trunc(&p3[b][a][c]);
                let eps_ab = C::new(sig.epsilon_ab(a, b), 0.0);
                let mut rhs = mat2_apply(&gamma, &d1[c]).mul_jet(&quarter_r).scale(eps_ab);
                // Second term written signature-uniformly as the Riemann
                // action on the covector leg, −(R/2)(η_cb∇_a − η_ca∇_b);
                // this equals −(R/2)ε^d_c ε_ab ∇_d times η, so the printed
                // ε-form is recovered in the Euclidean case.
                let lower = d1[a]
                    .scale(C::new(sig.eta_ab(c, b), 0.0))
                    .sub_trunc(&d1[b].scale(C::new(sig.eta_ab(c, a), 0.0)));
                rhs = rhs.sub_trunc(&lower.mul_jet(&geo.ricci).scale(C::new(0.5, 0.0)));
                worst2 = worst2.max(comm.sub_trunc(&rhs).max_abs());
            }
        }
    }
    Ok((worst1, worst2))
}

/// Residuals of the appendix identities:
/// ∇_a∇_cψ = ∇_{ac}ψ + (R/8)ε_ac γψ  and the full third-order display
/// ∇_{ab}∇_cψ = ∇_{abc}ψ + (1/12)(∇_aR ε_bc + ∇_bR ε_ac)γψ
///             + (R/8)(ε_ac γ∇_bψ + ε_bc γ∇_aψ)
///             + (R/12)(−η_ac∇_b − η_bc∇_a + 2η_ab∇_c)ψ.
pub fn appendix_identity_check(
    psi: &SpinorJet,
    geo: &GeometryJet,
) -> Result<(f64, f64), JetError> {
    let sig = geo.signature;
    let gamma = geo.gammas.gamma_chir;

    let p2 = project2(&coord_second(psi, geo)?, geo);
    let sym2 = second_sym_derivative(psi, geo)?;
    let eighth_r = geo.ricci.scale(C::new(0.125, 0.0));
    let mut worst_app2 = 0.0f64;
    for a in 0..2 {
        for c in 0..2 {
            let rhs = sym2[a][c].add_trunc(
                &mat2_apply(&gamma, psi)
                    .mul_jet(&eighth_r)
                    .scale(C::new(sig.epsilon_ab(a, c), 0.0)),
            );
            worst_app2 = worst_app2.max(p2[a][c].sub_trunc(&rhs).max_abs());
        }
    }

    let d1 = project1(&covariant_derivative(psi, geo)?, geo);
    let p3 = project3(&coord_third(psi, geo)?, geo);
    let sym3 = third_sym_derivative(psi, geo)?;
    // ∇_a R = e^μ_a ∂_μ R
    let mut grad_r = [Jet::zero(geo.order - 2), Jet::zero(geo.order - 2)];
    for a in 0..2 {
        let mut s = Jet::zero(geo.order - 2);
        for (mu, axis) in [Axis::X, Axis::Y].into_iter().enumerate() {
            s = s.add_trunc(&geo.ricci.partial(axis)?.mul_trunc(&geo.e_up[mu][a]));
        }
        grad_r[a] = s;
    }
    let gamma_psi = mat2_apply(&gamma, psi);
    let twelfth = C::new(1.0 / 12.0, 0.0);
    let eighth = C::new(0.125, 0.0);
    let mut worst_app3 = 0.0f64;
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                // LHS: ∇_{ab}∇_cψ, symmetrization of the outer pair
                let lhs = p3[a][b][c].add_trunc(&p3[b][a][c]).scale(C::new(0.5, 0.0));
                let eps = |p: usize, q: usize| C::new(sig.epsilon_ab(p, q), 0.0);
                let eta = |p: usize, q: usize| C::new(sig.eta_ab(p, q), 0.0);
                let mut rhs = sym3[a][b][c]
                    .add_trunc(
                        &gamma_psi
                            .mul_jet(&grad_r[a])
                            .scale(eps(b, c) * twelfth)
                            .add_trunc(&gamma_psi.mul_jet(&grad_r[b]).scale(eps(a, c) * twelfth)),
                    )
                    .add_trunc(
                        &mat2_apply(&gamma, &d1[b])
                            .mul_jet(&geo.ricci)
                            .scale(eps(a, c) * eighth),
                    )
                    .add_trunc(
                        &mat2_apply(&gamma, &d1[a])
                            .mul_jet(&geo.ricci)
                            .scale(eps(b, c) * eighth),
                    );
                let mut lin = SpinorJet::zero(d1[0].order());
                lin = lin
                    .sub_trunc(&d1[b].scale(eta(a, c)))
                    .sub_trunc(&d1[a].scale(eta(b, c)))
                    .add_trunc(&d1[c].scale(eta(a, b) * C::new(2.0, 0.0)));
                rhs = rhs.add_trunc(&lin.mul_jet(&geo.ricci).scale(twelfth));
                worst_app3 = worst_app3.max(lhs.sub_trunc(&rhs).max_abs());
            }
        }
    }
    Ok((worst_app2, worst_app3))
}

/// Spin covariance: transform the frame by l̄(φ) and the spinor by φ = aI + bγ
/// with a(x,y)² + η b(x,y)² = 1, and compare ∇'_μψ' against φ∇_μψ.
pub fn spin_covariance_check(
    frame: &FrameField,
    psi: &SpinorJet,
    a_expr: &Expr,
    b_expr: &Expr,
    point: (C, C),
    order: usize,
) -> Result<f64, GeomError> {
    let sig = frame.signature;
    let geo = geometry_at(frame, point, order)?;
    let a = a_expr.eval_jet(point, order)?;
    let b = b_expr.eval_jet(point, order)?;
    let eta = C::new(sig.eta(), 0.0);
    let constraint = a
        .mul_trunc(&a)
        .add_trunc(&b.mul_trunc(&b).scale(eta))
        .sub_trunc(&Jet::constant(order, C::new(1.0, 0.0)));
    if constraint.value().norm() > 1e-10 {
        return Err(GeomError::SpinConstraint(constraint.value().norm()));
    }

    // The conjugation φγ^bφ⁻¹ = Σ_a l^a_b γ^a forces the frame to rotate as
    // e'^μ_a = Σ_b l^a_b(φ) e^μ_b so that e^μ_a γ^a transforms by conjugation.
    // l(φ) has diagonal a²−ηb², upper-right 2ab, lower-left −2ηab.
    let diag = a.mul_trunc(&a).sub_trunc(&b.mul_trunc(&b).scale(eta));
    let two_ab = a.mul_trunc(&b).scale(C::new(2.0, 0.0));
    let lmat = [
        [diag.clone(), two_ab.clone()],
        [two_ab.scale(eta).neg(), diag],
    ];

    let mut e_prime = [
        [Jet::zero(order), Jet::zero(order)],
        [Jet::zero(order), Jet::zero(order)],
    ];
    for mu in 0..2 {
        for a_idx in 0..2 {
            let mut s = Jet::zero(order);
            for b_idx in 0..2 {
                s = s.add_trunc(&geo.e_up[mu][b_idx].mul_trunc(&lmat[a_idx][b_idx]));
            }
            e_prime[mu][a_idx] = s;
        }
    }
    let geo_prime = geometry_from_jets(sig, e_prime, true)?;

    // φ as a jet-valued matrix: φ = aI + bγ
    let gamma = geo.gammas.gamma_chir;
    let apply_phi = |s: &SpinorJet| -> SpinorJet {
        s.mul_jet(&a).add_trunc(&mat2_apply(&gamma, s).mul_jet(&b))
    };

    let psi_prime = apply_phi(psi);
    let d_prime = covariant_derivative(&psi_prime, &geo_prime)?;
    let d_plain = covariant_derivative(psi, &geo)?;
    let mut worst = 0.0f64;
    for mu in 0..2 {
        let want = apply_phi(&d_plain[mu]);
        worst = worst.max(d_prime[mu].sub_trunc(&want).max_abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn flat_frame(sig: Signature) -> FrameField {
        FrameField::parse(sig, [["1", "0"], ["0", "1"]], false).unwrap()
    }

    fn sphere_frame() -> FrameField {
        let f = "(1 + x^2 + y^2) / 2";
        FrameField::parse(Signature::Euclidean, [[f, "0"], ["0", f]], false).unwrap()
    }

    fn liouville_frame() -> FrameField {
        // A(u) = 0, B(v) = v^2 + 2 with (u, v) = (x, y): e^μ_a = δ^μ_a / √(A+B)
        let f = "1 / sqrt(y^2 + 2)";
        FrameField::parse(Signature::Lorentzian, [[f, "0"], ["0", f]], false).unwrap()
    }

    fn random_spinor(rng: &mut ChaCha8Rng, order: usize) -> SpinorJet {
        let mut s = SpinorJet::zero(order);
        for comp in 0..2 {
            for i in 0..=order {
                for j in 0..=(order - i) {
                    s.c[comp].set(
                        i,
                        j,
                        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    );
                }
            }
        }
        s
    }

    #[test]
    fn flat_geometry_is_trivial() {
        for sig in [Signature::Euclidean, Signature::Lorentzian] {
            let geo = geometry_at(&flat_frame(sig), (c(0.3, 0.0), c(-0.2, 0.0)), 4).unwrap();
            assert!((geo.g[0][0].value() - c(1.0, 0.0)).norm() < 1e-15);
            assert!((geo.g[1][1].value() - c(sig.eta(), 0.0)).norm() < 1e-15);
            assert!(geo.g[0][1].max_abs() < 1e-15);
            for a in 0..2 {
                for b in 0..2 {
                    for mu in 0..2 {
                        assert!(geo.christoffel[a][b][mu].max_abs() < 1e-15);
                        assert!(geo.spin_conn[a][b][mu].max_abs() < 1e-15);
                    }
                }
            }
            assert!(geo.ricci.max_abs() < 1e-15);
        }
    }

    #[test]
    fn sphere_scalar_curvature_is_two() {
        // e^μ_a = δ^μ_a(1+x²+y²)/2 is the unit round sphere in stereographic
        // coordinates; conformal oracle K = −e^{−2φ}Δφ with
        // φ = ln(2/(1+x²+y²)) gives K = 1, R = 2K = 2.
        let frame = sphere_frame();
        for (x, y) in [(0.0, 0.0), (0.4, -0.3), (-1.1, 0.7), (2.0, 1.5)] {
            let geo = geometry_at(&frame, (c(x, 0.0), c(y, 0.0)), 4).unwrap();
            assert!(
                (geo.ricci.value() - c(2.0, 0.0)).norm() < 1e-9,
                "R = {} at ({x}, {y})",
                geo.ricci.value()
            );
            // R is constant: derivative coefficients vanish too
            assert!(geo.ricci.sub_trunc(&Jet::constant(2, c(2.0, 0.0))).max_abs() < 1e-8);
        }
    }

    #[test]
    fn liouville_curvature_matches_finite_differences() {
        let frame = liouville_frame();
        let point = (0.3, 0.4);
        let geo = geometry_at(&frame, (c(point.0, 0.0), c(point.1, 0.0)), 4).unwrap();

        // independent pipeline: numeric metric -> FD Christoffels -> FD Riemann -> R
        let h = 1e-4;
        let gmat = |_x: f64, y: f64| -> [[f64; 2]; 2] {
            let b = y * y + 2.0;
            // g = (A+B) diag(1, η)
            [[b, 0.0], [0.0, -b]]
        };
        let ginv = |x: f64, y: f64| -> [[f64; 2]; 2] {
            let g = gmat(x, y);
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            [
                [g[1][1] / det, -g[0][1] / det],
                [-g[1][0] / det, g[0][0] / det],
            ]
        };
        let christ = |x: f64, y: f64| -> [[[f64; 2]; 2]; 2] {
            let gi = ginv(x, y);
            let dg = |lam: usize, mu: usize, nu: usize| -> f64 {
                let (dx, dy) = if lam == 0 { (h, 0.0) } else { (0.0, h) };
                (gmat(x + dx, y + dy)[mu][nu] - gmat(x - dx, y - dy)[mu][nu]) / (2.0 * h)
            };
            let mut out = [[[0.0; 2]; 2]; 2];
            for al in 0..2 {
                for be in 0..2 {
                    for mu in 0..2 {
                        let mut s = 0.0;
                        for si in 0..2 {
                            s += gi[al][si] * (dg(be, si, mu) + dg(mu, si, be) - dg(si, be, mu));
                        }
                        out[al][be][mu] = 0.5 * s;
                    }
                }
            }
            out
        };
        let (x, y) = point;
        let gi = ginv(x, y);
        let gamma0 = christ(x, y);
        let mut r_scalar = 0.0;
        for be in 0..2 {
            for nu in 0..2 {
                let mut r_trace = 0.0;
                for al in 0..2 {
                    let dgamma = |lam: usize, a: usize, b2: usize, m: usize| -> f64 {
                        let (dx, dy) = if lam == 0 { (h, 0.0) } else { (0.0, h) };
                        (christ(x + dx, y + dy)[a][b2][m] - christ(x - dx, y - dy)[a][b2][m])
                            / (2.0 * h)
                    };
                    let mut term = dgamma(al, al, be, nu) - dgamma(nu, al, be, al);
                    for si in 0..2 {
                        term += gamma0[al][si][al] * gamma0[si][be][nu]
                            - gamma0[al][si][nu] * gamma0[si][be][al];
                    }
                    r_trace += term;
                }
                r_scalar += gi[be][nu] * r_trace;
            }
        }
        assert!(
            (geo.ricci.value() - c(r_scalar, 0.0)).norm() < 1e-5,
            "jet R = {}, FD R = {r_scalar}",
            geo.ricci.value()
        );
    }

    #[test]
    fn flat_covariant_derivative_is_partial() {
        let geo = geometry_at(&flat_frame(Signature::Euclidean), (c(0.0, 0.0), c(0.0, 0.0)), 3)
            .unwrap();
        let mut psi = SpinorJet::zero(3);
        psi.c[0] = Jet::variable(3, Axis::X, c(0.0, 0.0));
        psi.c[1] = Jet::variable(3, Axis::Y, c(0.0, 0.0));
        let d = covariant_derivative(&psi, &geo).unwrap();
        assert!((d[0].c[0].value() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(d[0].c[1].max_abs() < 1e-15);
        assert!(d[1].c[0].max_abs() < 1e-15);
        assert!((d[1].c[1].value() - c(1.0, 0.0)).norm() < 1e-15);

        let zero = SpinorJet::zero(3);
        let dz = covariant_derivative(&zero, &geo).unwrap();
        assert!(dz[0].max_abs() < 1e-15 && dz[1].max_abs() < 1e-15);
    }

    #[test]
    fn sphere_transport_matches_finite_differences() {
        // ψ given symbolically so the FD oracle can evaluate it off-point
        let psi1 = expr::parse("x^2 * y - y").unwrap();
        let psi2 = expr::parse("x + x * y^2").unwrap();
        let frame = sphere_frame();
        let (x, y) = (0.3, -0.5);
        let point = (c(x, 0.0), c(y, 0.0));
        let geo = geometry_at(&frame, point, 4).unwrap();
        let psi = SpinorJet {
            c: [
                psi1.eval_jet(point, 4).unwrap(),
                psi2.eval_jet(point, 4).unwrap(),
            ],
        };
        let d = covariant_derivative(&psi, &geo).unwrap();

        let h = 1e-5;
        let gamma = geo.gammas.gamma_chir;
        for mu in 0..2 {
            let (dx, dy) = if mu == 0 { (h, 0.0) } else { (0.0, h) };
            let at = |e: &Expr, xx: f64, yy: f64| {
                e.eval_jet((c(xx, 0.0), c(yy, 0.0)), 0).unwrap().value()
            };
            let fd = [
                (at(&psi1, x + dx, y + dy) - at(&psi1, x - dx, y - dy)) / c(2.0 * h, 0.0),
                (at(&psi2, x + dx, y + dy) - at(&psi2, x - dx, y - dy)) / c(2.0 * h, 0.0),
            ];
            let g12 = geo.spinor_conn(mu).value();
            let p = [psi.c[0].value(), psi.c[1].value()];
            for comp in 0..2 {
                let conn = g12 * (gamma.0[comp][0] * p[0] + gamma.0[comp][1] * p[1]);
                let want = fd[comp] + conn;
                assert!(
                    (d[mu].c[comp].value() - want).norm() < 1e-6,
                    "mu={mu} comp={comp}"
                );
            }
        }
    }

    #[test]
    fn flat_second_derivative_is_partials() {
        let geo = geometry_at(&flat_frame(Signature::Lorentzian), (c(0.1, 0.0), c(0.2, 0.0)), 4)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_spinor(&mut rng, 4);
        let sym2 = second_sym_derivative(&psi, &geo).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let axes = [Axis::X, Axis::Y];
                let want = psi.partial(axes[a]).unwrap().partial(axes[b]).unwrap();
                assert!(sym2[a][b].sub_trunc(&want).max_abs() < 1e-13);
            }
        }
    }

    #[test]
    fn symmetrized_derivatives_are_symmetric() {
        let geo = geometry_at(&sphere_frame(), (c(0.2, 0.0), c(0.5, 0.0)), 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random_spinor(&mut rng, 5);
        let sym2 = second_sym_derivative(&psi, &geo).unwrap();
        assert!(sym2[0][1].sub_trunc(&sym2[1][0]).max_abs() < 1e-14);
        let sym3 = third_sym_derivative(&psi, &geo).unwrap();
        for perm in [[0, 1, 1], [1, 0, 1], [1, 1, 0]] {
            assert!(
                sym3[perm[0]][perm[1]][perm[2]]
                    .sub_trunc(&sym3[0][1][1])
                    .max_abs()
                    < 1e-13
            );
        }
    }

    #[test]
    fn ricci_and_appendix_identities_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let frames = [
            flat_frame(Signature::Euclidean),
            flat_frame(Signature::Lorentzian),
            sphere_frame(),
            liouville_frame(),
        ];
        for frame in &frames {
            for _ in 0..12 {
                let x = rng.gen_range(-0.8..0.8);
                let y = rng.gen_range(-0.8..0.8);
                let geo = geometry_at(frame, (c(x, 0.0), c(y, 0.0)), 5).unwrap();
                let psi = random_spinor(&mut rng, 5);
                let (r1, r2) = ricci_identity_check(&psi, &geo).unwrap();
                assert!(r1 < 1e-8, "com1 residual {r1} at ({x}, {y})");
                assert!(r2 < 1e-8, "com2 residual {r2} at ({x}, {y})");
                let (a2, a3) = appendix_identity_check(&psi, &geo).unwrap();
                assert!(a2 < 1e-8, "app2 residual {a2} at ({x}, {y})");
                assert!(a3 < 1e-7, "app3 residual {a3} at ({x}, {y})");
            }
        }
    }

    #[test]
    fn metricity_and_duality() {
        for frame in [sphere_frame(), liouville_frame()] {
            let geo = geometry_at(&frame, (c(0.25, 0.0), c(-0.4, 0.0)), 5).unwrap();
            assert!(geo.metricity_residual() < 1e-11);
            assert!(geo.duality_residual() < 1e-12);
        }
    }

    #[test]
    fn spin_connection_antisymmetry_and_christoffel_symmetry() {
        let geo = geometry_at(&sphere_frame(), (c(0.6, 0.0), c(-0.2, 0.0)), 4).unwrap();
        for mu in 0..2 {
            assert!(geo.spin_conn[0][0][mu].max_abs() < 1e-12);
            assert!(geo.spin_conn[1][1][mu].max_abs() < 1e-12);
            assert!(
                geo.spin_conn[0][1][mu]
                    .add_trunc(&geo.spin_conn[1][0][mu])
                    .max_abs()
                    < 1e-12
            );
            for alpha in 0..2 {
                for beta in 0..2 {
                    assert!(
                        geo.christoffel[alpha][beta][mu]
                            .sub_trunc(&geo.christoffel[alpha][mu][beta])
                            .max_abs()
                            < 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn spin_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let point = (c(0.3, 0.0), c(0.2, 0.0));
        let psi = random_spinor(&mut rng, 5);

        // identity transformation: exact
        let r = spin_covariance_check(
            &sphere_frame(),
            &psi,
            &expr::parse("1").unwrap(),
            &expr::parse("0").unwrap(),
            point,
            5,
        )
        .unwrap();
        assert!(r < 1e-12, "identity residual {r}");

        // Euclidean: (a, b) = (cos(xy), sin(xy)) on the sphere frame
        let r = spin_covariance_check(
            &sphere_frame(),
            &psi,
            &expr::parse("cos(x*y)").unwrap(),
            &expr::parse("sin(x*y)").unwrap(),
            point,
            5,
        )
        .unwrap();
        assert!(r < 1e-8, "euclidean residual {r}");

        // Lorentzian: (a, b) = (cosh(x + y^2), sinh(x + y^2)) on the flat frame
        let r = spin_covariance_check(
            &flat_frame(Signature::Lorentzian),
            &psi,
            &expr::parse("cosh(x + y^2)").unwrap(),
            &expr::parse("sinh(x + y^2)").unwrap(),
            point,
            5,
        )
        .unwrap();
        assert!(r < 1e-8, "lorentzian residual {r}");
    }

    #[test]
    fn degenerate_and_complex_frames_error() {
        let f = FrameField::parse(Signature::Euclidean, [["x", "0"], ["0", "1"]], false).unwrap();
        let err = geometry_at(&f, (c(0.0, 0.0), c(0.0, 0.0)), 3).unwrap_err();
        assert!(matches!(err, GeomError::DegenerateFrame(_)));

        let f = FrameField::parse(Signature::Euclidean, [["i", "0"], ["0", "1"]], false).unwrap();
        let err = geometry_at(&f, (c(0.0, 0.0), c(0.0, 0.0)), 3).unwrap_err();
        assert!(matches!(err, GeomError::ComplexFrame(_)));
    }
}

