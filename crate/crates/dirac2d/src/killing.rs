//! Killing equations and the integrability condition for the scalar g.
//!
//! The second-order symmetry operator requires e^{ab} to be a Killing tensor,
//! α^a and ζ^a Killing vectors (or zero), and a scalar g satisfying
//! ∇^a g = −¼∇_b(R e^{ab}).  This module evaluates the residuals of those
//! conditions at points and synthesizes g numerically: the right-hand side is
//! a coordinate 1-form ω_μ; when dω = 0, g is recovered by path integration
//! for its value and directly from the jets of ω for its derivatives.

use thiserror::Error;

use crate::clifford::Signature;
use crate::expr::{EvalError, Expr};
use crate::geometry::{geometry_at, FrameField, GeomError, GeometryJet};
use crate::jets::{Axis, Jet, JetError, C};

#[derive(Debug, Error)]
pub enum KillingError {
    #[error("right-hand side 1-form is not closed: max |dω| = {0:.3e} exceeds tolerance {1:.3e}")]
    NotClosed(f64, f64),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Inputs of the second-order operator: frame components of the Killing
/// tensor e^{ab}, the Killing vectors α^a and ζ^a, the constant A, and the
/// scalar g (either given in closed form or synthesized from integrability).
#[derive(Debug, Clone)]
pub struct KillingData {
    pub e_tensor: [[Expr; 2]; 2],
    pub alpha: [Expr; 2],
    pub zeta: [Expr; 2],
    pub a_const: C,
    /// `None` means "synthesize g from the integrability condition".
    pub g_scalar: Option<Expr>,
}

fn eval2(v: &[Expr; 2], point: (C, C), order: usize) -> Result<[Jet; 2], EvalError> {
    Ok([v[0].eval_jet(point, order)?, v[1].eval_jet(point, order)?])
}

fn eval22(m: &[[Expr; 2]; 2], point: (C, C), order: usize) -> Result<[[Jet; 2]; 2], EvalError> {
    Ok([
        [m[0][0].eval_jet(point, order)?, m[0][1].eval_jet(point, order)?],
        [m[1][0].eval_jet(point, order)?, m[1][1].eval_jet(point, order)?],
    ])
}

/// ∇_μ of a coordinate vector field V^ν (jets), index layout [μ][ν].
fn coord_vector_gradient(
    v: &[Jet; 2],
    geo: &GeometryJet,
) -> Result<[[Jet; 2]; 2], JetError> {
    let lower = v[0].order().saturating_sub(1);
    let z = || Jet::zero(lower);
    let mut out = [[z(), z()], [z(), z()]];
    for (mu, axis) in [Axis::X, Axis::Y].into_iter().enumerate() {
        for nu in 0..2 {
            let mut t = v[nu].partial(axis)?;
            for sigma in 0..2 {
                t = t.add_trunc(&geo.christoffel[nu][sigma][mu].mul_trunc(&v[sigma]));
            }
            out[mu][nu] = t;
        }
    }
    Ok(out)
}

/// Frame-index gradient ∇_c v^a as jets, layout [c][a] (c is the lower
/// derivative index).  `v` holds frame components v^a.
pub fn frame_vector_gradient(
    v: &[Expr; 2],
    geo: &GeometryJet,
    point: (C, C),
) -> Result<[[Jet; 2]; 2], KillingError> {
    let order = geo.order;
    let vf = eval2(v, point, order)?;
    // coordinate components V^μ = e^μ_a v^a
    let mut vc = [Jet::zero(order), Jet::zero(order)];
    for mu in 0..2 {
        let mut s = Jet::zero(order);
        for a in 0..2 {
            s = s.add_trunc(&geo.e_up[mu][a].mul_trunc(&vf[a]));
        }
        vc[mu] = s;
    }
    let grad = coord_vector_gradient(&vc, geo)?;
    let lower = grad[0][0].order();
    let z = || Jet::zero(lower);
    let mut out = [[z(), z()], [z(), z()]];
    for c in 0..2 {
        for a in 0..2 {
            let mut s = z();
            for mu in 0..2 {
                for nu in 0..2 {
                    s = s.add_trunc(
                        &grad[mu][nu]
                            .mul_trunc(&geo.e_up[mu][c])
                            .mul_trunc(&geo.e_dn[a][nu]),
                    );
                }
            }
            out[c][a] = s;
        }
    }
    Ok(out)
}

/// Symmetrized frame-index Killing-vector residual ∇^{(a}v^{b)} as jets.
pub fn killing_vector_jets(
    v: &[Expr; 2],
    geo: &GeometryJet,
    point: (C, C),
) -> Result<[[Jet; 2]; 2], KillingError> {
    let grad = frame_vector_gradient(v, geo, point)?;
    let sig = geo.signature;
    // raise the derivative index: ∇^a v^b = η^{aa} ∇_a v^b
    let up = |a: usize, b: usize| grad[a][b].scale(C::new(sig.eta_up(a, a), 0.0));
    let half = C::new(0.5, 0.0);
    Ok([
        [up(0, 0), up(0, 1).add_trunc(&up(1, 0)).scale(half)],
        [up(1, 0).add_trunc(&up(0, 1)).scale(half), up(1, 1)],
    ])
}

/// Point values of the Killing-vector residual.
pub fn killing_vector_residual(
    v: &[Expr; 2],
    geo: &GeometryJet,
    point: (C, C),
) -> Result<[[C; 2]; 2], KillingError> {
    let jets = killing_vector_jets(v, geo, point)?;
    Ok([
        [jets[0][0].value(), jets[0][1].value()],
        [jets[1][0].value(), jets[1][1].value()],
    ])
}

/// ∇_λ of a coordinate (2,0) tensor K^{μν} (jets), layout [λ][μ][ν].
fn coord_tensor_gradient(
    k: &[[Jet; 2]; 2],
    geo: &GeometryJet,
) -> Result<[[[Jet; 2]; 2]; 2], JetError> {
    let lower = k[0][0].order().saturating_sub(1);
    let z = || Jet::zero(lower);
    let mut out = [[[z(), z()], [z(), z()]], [[z(), z()], [z(), z()]]];
    for (lam, axis) in [Axis::X, Axis::Y].into_iter().enumerate() {
        for mu in 0..2 {
            for nu in 0..2 {
                let mut t = k[mu][nu].partial(axis)?;
                for sigma in 0..2 {
                    t = t
                        .add_trunc(&geo.christoffel[mu][sigma][lam].mul_trunc(&k[sigma][nu]))
                        .add_trunc(&geo.christoffel[nu][sigma][lam].mul_trunc(&k[mu][sigma]));
                }
                out[lam][mu][nu] = t;
            }
        }
    }
    Ok(out)
}

/// Frame-index gradient ∇_c K^{ab} as jets, layout [c][a][b] (c is the lower
/// derivative index).  `k` holds frame components K^{ab}.
pub fn frame_tensor_gradient(
    k: &[[Expr; 2]; 2],
    geo: &GeometryJet,
    point: (C, C),
) -> Result<[[[Jet; 2]; 2]; 2], KillingError> {
    let order = geo.order;
    let kf = eval22(k, point, order)?;
    // coordinate components K^{μν} = e^μ_a e^ν_b K^{ab}
    let z0 = || Jet::zero(order);
    let mut kc = [[z0(), z0()], [z0(), z0()]];
    for mu in 0..2 {
        for nu in 0..2 {
            let mut s = z0();
            for a in 0..2 {
                for b in 0..2 {
                    s = s.add_trunc(
                        &kf[a][b]
                            .mul_trunc(&geo.e_up[mu][a])
                            .mul_trunc(&geo.e_up[nu][b]),
                    );
                }
            }
            kc[mu][nu] = s;
        }
    }
    let grad = coord_tensor_gradient(&kc, geo)?;
    let lower = grad[0][0][0].order();
    let z = || Jet::zero(lower);
    let mut out = [[[z(), z()], [z(), z()]], [[z(), z()], [z(), z()]]];
    for c in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                let mut s = z();
                for lam in 0..2 {
                    for mu in 0..2 {
                        for nu in 0..2 {
                            s = s.add_trunc(
                                &grad[lam][mu][nu]
                                    .mul_trunc(&geo.e_up[lam][c])
                                    .mul_trunc(&geo.e_dn[a][mu])
                                    .mul_trunc(&geo.e_dn[b][nu]),
                            );
                        }
                    }
                }
                out[c][a][b] = s;
            }
        }
    }
    Ok(out)
}

/// Totally symmetrized Killing-tensor residual ∇^{(c}K^{ab)} as jets,
/// layout [c][a][b].  `k` holds frame components K^{ab}.
pub fn killing_tensor_jets(
    k: &[[Expr; 2]; 2],
    geo: &GeometryJet,
    point: (C, C),
) -> Result<[[[Jet; 2]; 2]; 2], KillingError> {
    let grad = frame_tensor_gradient(k, geo, point)?;
    let sig = geo.signature;
    let lower = grad[0][0][0].order();
    let z = || Jet::zero(lower);
    // raise the derivative index: ∇^c K^{ab} = η^{cc} ∇_c K^{ab}
    let mut nck = [[[z(), z()], [z(), z()]], [[z(), z()], [z(), z()]]];
    for c in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                nck[c][a][b] = grad[c][a][b].scale(C::new(sig.eta_up(c, c), 0.0));
            }
        }
    }
    // total symmetrization over (c, a, b)
    let sixth = C::new(1.0 / 6.0, 0.0);
    let mut out = [[[z(), z()], [z(), z()]], [[z(), z()], [z(), z()]]];
    for c in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                out[c][a][b] = nck[c][a][b]
                    .add_trunc(&nck[c][b][a])
                    .add_trunc(&nck[a][c][b])
                    .add_trunc(&nck[a][b][c])
                    .add_trunc(&nck[b][a][c])
                    .add_trunc(&nck[b][c][a])
                    .scale(sixth);
            }
        }
    }
    Ok(out)
}

/// Max-norm point value of the Killing-tensor residual.
pub fn killing_tensor_residual(
    k: &[[Expr; 2]; 2],
    geo: &GeometryJet,
    point: (C, C),
) -> Result<f64, KillingError> {
    let jets = killing_tensor_jets(k, geo, point)?;
    let mut worst = 0.0f64;
    for plane in &jets {
        for row in plane {
            for j in row {
                worst = worst.max(j.value().norm());
            }
        }
    }
    Ok(worst)
}

/// The coordinate 1-form ω_μ with ∂_μ g = ω_μ, from ∇^a g = −¼∇_b(Re^{ab}).
/// Needs geometry of order ≥ 4 for a jet of order ≥ 1 (two derivative losses
/// beyond R).
pub fn integrability_one_form(
    k: &[[Expr; 2]; 2],
    geo: &GeometryJet,
    point: (C, C),
) -> Result<[Jet; 2], KillingError> {
    let order = geo.order;
    let kf = eval22(k, point, order)?;
    // S^{μν} = R K^{μν}
    let z0 = || Jet::zero(order);
    let mut s_t = [[z0(), z0()], [z0(), z0()]];
    for mu in 0..2 {
        for nu in 0..2 {
            let mut s = z0();
            for a in 0..2 {
                for b in 0..2 {
                    s = s.add_trunc(
                        &kf[a][b]
                            .mul_trunc(&geo.e_up[mu][a])
                            .mul_trunc(&geo.e_up[nu][b]),
                    );
                }
            }
            s_t[mu][nu] = s.mul_trunc(&geo.ricci);
        }
    }
    // divergence D^μ = ∇_ν S^{μν}
    let lower = s_t[0][0].order().saturating_sub(1);
    let mut div = [Jet::zero(lower), Jet::zero(lower)];
    for mu in 0..2 {
        let mut d = Jet::zero(lower);
        for (nu, axis) in [Axis::X, Axis::Y].into_iter().enumerate() {
            let mut t = s_t[mu][nu].partial(axis)?;
            for sigma in 0..2 {
                t = t
                    .add_trunc(&geo.christoffel[mu][sigma][nu].mul_trunc(&s_t[sigma][nu]))
                    .add_trunc(&geo.christoffel[nu][sigma][nu].mul_trunc(&s_t[mu][sigma]));
            }
            d = d.add_trunc(&t);
        }
        div[mu] = d;
    }
    // ∇^a g = ρ^a := −¼ e^a_μ D^μ, then ω_μ = e^a_μ η_ab ρ^b
    let sig = geo.signature;
    let mut rho = [Jet::zero(lower), Jet::zero(lower)];
    for a in 0..2 {
        let mut s = Jet::zero(lower);
        for mu in 0..2 {
            s = s.add_trunc(&geo.e_dn[a][mu].mul_trunc(&div[mu]));
        }
        rho[a] = s.scale(C::new(-0.25, 0.0));
    }
    let mut omega = [Jet::zero(lower), Jet::zero(lower)];
    for mu in 0..2 {
        let mut s = Jet::zero(lower);
        for a in 0..2 {
            s = s.add_trunc(
                &geo.e_dn[a][mu]
                    .mul_trunc(&rho[a])
                    .scale(C::new(sig.eta_ab(a, a), 0.0)),
            );
        }
        omega[mu] = s;
    }
    Ok(omega)
}

/// Result of checking integrability and synthesizing g on a grid.
#[derive(Debug, Clone)]
pub struct IntegrabilityResult {
    /// max |∂ₓω_y − ∂_yω_x| over the grid.
    pub closedness_residual: f64,
    /// g sampled on the grid, `g_field[ix][iy]`, with g(corner) = 0.
    pub g_field: Vec<Vec<C>>,
    /// grid coordinates along x and y.
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

/// Check dω = 0 on a grid over `region = (x0, y0, x1, y1)` and synthesize g
/// by two-leg trapezoidal path integration from the corner (x0, y0).
pub fn integrability_check(
    k: &[[Expr; 2]; 2],
    frame: &FrameField,
    region: (f64, f64, f64, f64),
    grid: usize,
    tol: f64,
) -> Result<IntegrabilityResult, KillingError> {
    let (x0, y0, x1, y1) = region;
    let n = grid.max(2);
    let xs: Vec<f64> = (0..n)
        .map(|i| x0 + (x1 - x0) * i as f64 / (n - 1) as f64)
        .collect();
    let ys: Vec<f64> = (0..n)
        .map(|i| y0 + (y1 - y0) * i as f64 / (n - 1) as f64)
        .collect();

    // ω and its closedness on the whole grid; ω jets of order ≥ 1 give the
    // curl exactly at each sample point, no finite differencing needed
    let mut omega_x = vec![vec![C::new(0.0, 0.0); n]; n];
    let mut omega_y = vec![vec![C::new(0.0, 0.0); n]; n];
    let mut closedness = 0.0f64;
    for (ix, &x) in xs.iter().enumerate() {
        for (iy, &y) in ys.iter().enumerate() {
            let point = (C::new(x, 0.0), C::new(y, 0.0));
            let geo = geometry_at(frame, point, 4)?;
            let omega = integrability_one_form(k, &geo, point)?;
            omega_x[ix][iy] = omega[0].value();
            omega_y[ix][iy] = omega[1].value();
            let curl = omega[1].coeff(1, 0) - omega[0].coeff(0, 1);
            closedness = closedness.max(curl.norm());
        }
    }
    if closedness > tol {
        return Err(KillingError::NotClosed(closedness, tol));
    }

    // g(x, y) = ∫ corner→(x, y0) ω_x dx + ∫ (x, y0)→(x, y) ω_y dy
    let hx = if n > 1 { xs[1] - xs[0] } else { 0.0 };
    let hy = if n > 1 { ys[1] - ys[0] } else { 0.0 };
    let mut g_field = vec![vec![C::new(0.0, 0.0); n]; n];
    for ix in 0..n {
        for iy in 0..n {
            let mut g = C::new(0.0, 0.0);
            for i in 1..=ix {
                g += (omega_x[i - 1][0] + omega_x[i][0]) * C::new(0.5 * hx, 0.0);
            }
            for j in 1..=iy {
                g += (omega_y[ix][j - 1] + omega_y[ix][j]) * C::new(0.5 * hy, 0.0);
            }
            g_field[ix][iy] = g;
        }
    }

    Ok(IntegrabilityResult {
        closedness_residual: closedness,
        g_field,
        xs,
        ys,
    })
}

/// Synthesize the jet of g at a point: the constant term comes from a two-leg
/// trapezoidal path integral from `corner` (step count `steps` per leg); all
/// higher coefficients come exactly from the jets of ω via ∂ₓg = ω_x,
/// ∂_y g = ω_y.  The additive constant is fixed by g(corner) = 0.
pub fn synthesize_g_jet(
    k: &[[Expr; 2]; 2],
    frame: &FrameField,
    point: (C, C),
    order: usize,
    corner: (f64, f64),
    steps: usize,
) -> Result<Jet, KillingError> {
    let geo_order = (order + 3).max(4);
    let geo = geometry_at(frame, point, geo_order)?;
    let omega = integrability_one_form(k, &geo, point)?;

    let mut g = Jet::zero(order);
    for i in 0..=order {
        for j in 0..=(order - i) {
            if i > 0 {
                g.set(i, j, omega[0].coeff(i - 1, j) / C::new(i as f64, 0.0));
            } else if j > 0 {
                g.set(i, j, omega[1].coeff(0, j - 1) / C::new(j as f64, 0.0));
            }
        }
    }

    // constant term by path integration corner→(x, y0)→(x, y), composite
    // Simpson on each leg
    let (x0, y0) = corner;
    let x1 = point.0.re;
    let y1 = point.1.re;
    let nsteps = (steps.max(2) + 1) & !1;
    let omega_at = |x: f64, y: f64| -> Result<(C, C), KillingError> {
        let p = (C::new(x, 0.0), C::new(y, 0.0));
        let geo = geometry_at(frame, p, 4)?;
        let om = integrability_one_form(k, &geo, p)?;
        Ok((om[0].value(), om[1].value()))
    };
    let simpson_weight = |i: usize| -> f64 {
        if i == 0 || i == nsteps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut total = C::new(0.0, 0.0);
    let hx = (x1 - x0) / nsteps as f64;
    if hx.abs() > 0.0 {
        for i in 0..=nsteps {
            let v = omega_at(x0 + hx * i as f64, y0)?.0;
            total += v * C::new(simpson_weight(i) * hx / 3.0, 0.0);
        }
    }
    let hy = (y1 - y0) / nsteps as f64;
    if hy.abs() > 0.0 {
        for j in 0..=nsteps {
            let v = omega_at(x1, y0 + hy * j as f64)?.1;
            total += v * C::new(simpson_weight(j) * hy / 3.0, 0.0);
        }
    }
    g.set(0, 0, total);
    Ok(g)
}

/// Convenience: the Liouville frame diag(1/√(A+B), 1/√(A+B)) as expressions,
/// given A(x) and B(y) source strings.
pub fn liouville_frame(
    sig: Signature,
    a_of_x: &str,
    b_of_y: &str,
) -> Result<FrameField, crate::expr::ParseError> {
    let f = format!("1 / sqrt(({a_of_x}) + ({b_of_y}))");
    FrameField::parse(sig, [[&f, "0"], ["0", &f]], false)
}
