//! Type-I separation of variables for the Dirac equation.
//!
//! Writing 𝔻ψ = Ã∂ₓψ + B̃∂_yψ + C̃ψ with
//!
//!   Ã = [[A₁, A₂], [−A₂, −A₁]],  B̃ = [[B₁, B₂], [−B₂, −B₁]],
//!   C̃ = [[C₁, −C₂], [C₂, −C₁]],
//!
//! the scalar coefficients are A₁ = ie¹₁, A₂ = −ike¹₂, B₁ = ie²₁,
//! B₂ = −ike²₂, C₁ = −(i/2)e^μ₂Γ¹²_μ, C₂ = (i/2)ηk·e^μ₁Γ¹²_μ.  Type-I
//! separation requires A₁ = B₂ = 0, which the antidiagonal Liouville frame
//! realizes; the x-parts are pure exponentials aᵢ = cᵢe^{κx} and the y-parts
//! (b₁, b₂) solve a linear first-order system integrated here by classical
//! fixed-step RK4.  The separation constants are normalized so that
//! μ₁ = κc₂/c₁, μ₂ = κc₁/c₂, hence μ₁μ₂ = κ² is the eigenvalue of
//! 𝕂 = diag(∂ₓ², ∂ₓ²).  The module also covers the complex-variable scheme
//! on flat Lorentzian space, where z = x + iy and z̄ = x − iy separate the
//! equation with a constant complex frame.

use std::io::{self, Write};

use thiserror::Error;

use crate::clifford::{Mat2, Signature};
use crate::expr::{EvalError, Expr, ParseError};
use crate::geometry::{
    frame_first, geometry_at, mat2_apply, FrameField, GeomError, GeometryJet, SpinorJet,
};
use crate::jets::{Axis, Jet, JetError, C};

#[derive(Debug, Error)]
pub enum SepError {
    #[error("separation requires a nonzero Dirac eigenvalue λ")]
    LambdaZero,
    #[error("conformal factor A+B = {value} is degenerate at ({x}, {y})")]
    RegionViolation { x: f64, y: f64, value: C },
    #[error("y-integration unstable at y = {y}: |b| = {norm:.3e}; reduce the step")]
    StepUnstable { y: f64, norm: f64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// A Liouville metric g = (A(x)+B(y))(dx² + η dy²) given by its two profile
/// functions; x is the ignorable coordinate whenever A = 0.
#[derive(Debug, Clone)]
pub struct LiouvilleMetric {
    pub signature: Signature,
    pub a_expr: Expr,
    pub b_expr: Expr,
}

impl LiouvilleMetric {
    pub fn new(signature: Signature, a_of_x: &str, b_of_y: &str) -> Result<LiouvilleMetric, SepError> {
        Ok(LiouvilleMetric {
            signature,
            a_expr: crate::expr::parse(a_of_x)?,
            b_expr: crate::expr::parse(b_of_y)?,
        })
    }

    /// A(x) + B(y) at a point.
    pub fn conformal_factor(&self, point: (C, C)) -> Result<C, SepError> {
        Ok(self.a_expr.eval_jet(point, 0)?.value() + self.b_expr.eval_jet(point, 0)?.value())
    }

    /// Check that A + B stays away from zero on a sample grid over
    /// `region = (x0, y0, x1, y1)`.
    pub fn check_region(
        &self,
        region: (f64, f64, f64, f64),
        grid: usize,
    ) -> Result<(), SepError> {
        let (x0, y0, x1, y1) = region;
        let n = grid.max(2);
        for i in 0..n {
            for j in 0..n {
                let x = x0 + (x1 - x0) * i as f64 / (n - 1) as f64;
                let y = y0 + (y1 - y0) * j as f64 / (n - 1) as f64;
                let f = self.conformal_factor((C::new(x, 0.0), C::new(y, 0.0)))?;
                let bad = match self.signature {
                    Signature::Euclidean => f.re <= 1e-10,
                    Signature::Lorentzian => f.norm() <= 1e-10,
                };
                if bad {
                    return Err(SepError::RegionViolation { x, y, value: f });
                }
            }
        }
        Ok(())
    }

    /// The diagonal frame diag(1/√(A+B), 1/√(A+B)): induced metric
    /// (A+B)·diag(1, η), the form in which K^{ab} = diag(B, −ηA).
    pub fn diagonal_frame(&self) -> Result<FrameField, SepError> {
        let f = format!("1 / sqrt(({}) + ({}))", self.a_expr, self.b_expr);
        Ok(FrameField::parse(
            self.signature,
            [[&f, "0"], ["0", &f]],
            false,
        )?)
    }

    /// The antidiagonal D5 frame [[0, 1/√(A+B)], [−1/√(A+B), 0]] (rows μ,
    /// columns a).  It swaps which coordinate leg carries η: the induced
    /// metric is (A+B)·diag(η, 1).  This is the frame in which A₁ = B₂ = 0
    /// and the equation separates.
    pub fn d5_frame(&self) -> Result<FrameField, SepError> {
        let f = format!("1 / sqrt(({}) + ({}))", self.a_expr, self.b_expr);
        let nf = format!("-({f})");
        Ok(FrameField::parse(
            self.signature,
            [["0", &f], [&nf, "0"]],
            false,
        )?)
    }
}

/// The six scalar coefficients of 𝔻 at a point.
#[derive(Debug, Clone, Copy)]
pub struct SeparationCoefficients {
    pub a1: C,
    pub a2: C,
    pub b1: C,
    pub b2: C,
    pub c1: C,
    pub c2: C,
}

impl SeparationCoefficients {
    pub fn a_tilde(&self) -> Mat2 {
        Mat2([[self.a1, self.a2], [-self.a2, -self.a1]])
    }

    pub fn b_tilde(&self) -> Mat2 {
        Mat2([[self.b1, self.b2], [-self.b2, -self.b1]])
    }

    pub fn c_tilde(&self) -> Mat2 {
        Mat2([[self.c1, -self.c2], [self.c2, -self.c1]])
    }
}

/// Evaluate the coefficient functions from the frame at a point.
pub fn separation_coefficients(
    frame: &FrameField,
    point: (C, C),
) -> Result<SeparationCoefficients, SepError> {
    let geo = geometry_at(frame, point, 2)?;
    Ok(separation_coefficients_from_geo(&geo))
}

pub fn separation_coefficients_from_geo(geo: &GeometryJet) -> SeparationCoefficients {
    let i = C::new(0.0, 1.0);
    let k = geo.signature.k();
    let eta = C::new(geo.signature.eta(), 0.0);
    let e = |mu: usize, a: usize| geo.e_up[mu][a].value();
    // w_a = ½ e^μ_a Γ¹²_μ
    let w = |a: usize| {
        (0..2)
            .map(|mu| e(mu, a) * geo.spinor_conn(mu).value())
            .sum::<C>()
    };
    SeparationCoefficients {
        a1: i * e(0, 0),
        a2: -i * k * e(0, 1),
        b1: i * e(1, 0),
        b2: -i * k * e(1, 1),
        c1: -i * w(1),
        c2: i * eta * k * w(0),
    }
}

/// 𝔻ψ − λψ at a point, computed from the scalar-coefficient form
/// Ã∂ₓψ + B̃∂_yψ + C̃ψ; the coefficients are position dependent, so only the
/// constant term of the result is meaningful.
pub fn coefficient_dirac_value(
    co: &SeparationCoefficients,
    psi: &SpinorJet,
    lambda: C,
) -> Result<[C; 2], JetError> {
    let dx = psi.partial(Axis::X)?;
    let dy = psi.partial(Axis::Y)?;
    let out = mat2_apply(&co.a_tilde(), &dx)
        .add_trunc(&mat2_apply(&co.b_tilde(), &dy))
        .add_trunc(&mat2_apply(&co.c_tilde(), psi))
        .sub_trunc(&psi.scale(lambda));
    Ok([out.c[0].value(), out.c[1].value()])
}

/// Max residual, over sample points and random-ish spinor jets, between the
/// covariant Dirac operator iγ^a∇_a and the explicit D5 form
///
///   𝔻 = R₁(y)[[[0, −ik], [ik, 0]]∂ₓ − i·diag(1, −1)∂_y]
///       + (i/2)R₁′(y)·diag(1, −1),
///
/// where B(y) = 1/R₁(y)².  Requires A = 0.
pub fn d5_dirac_form_check(
    m: &LiouvilleMetric,
    points: &[(f64, f64)],
    spinors: &[SpinorJet],
) -> Result<f64, SepError> {
    let frame = m.d5_frame()?;
    let k = m.signature.k();
    let i = C::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for &(x, y) in points {
        let point = (C::new(x, 0.0), C::new(y, 0.0));
        let geo = geometry_at(&frame, point, 3)?;
        // R₁ = 1/√B and R₁′ from the jet of B
        let b_jet = m.b_expr.eval_jet(point, 2)?;
        let r1_jet = b_jet.sqrt()?.reciprocal()?;
        let r1 = r1_jet.value();
        let r1p = r1_jet.partial(Axis::Y)?.value();
        let x_mat = Mat2([[C::new(0.0, 0.0), -i * k], [i * k, C::new(0.0, 0.0)]]).scale(r1);
        let y_mat = Mat2([[-i, C::new(0.0, 0.0)], [C::new(0.0, 0.0), i]]).scale(r1);
        let c_mat = Mat2([[i, C::new(0.0, 0.0)], [C::new(0.0, 0.0), -i]])
            .scale(r1p * C::new(0.5, 0.0));
        for psi in spinors {
            // covariant form
            let d1 = frame_first(psi, &geo)?;
            let mut cov = SpinorJet::zero(d1[0].order());
            for a in 0..2 {
                cov = cov.add_trunc(&mat2_apply(&geo.gammas.gamma_up(a), &d1[a]));
            }
            let cov = cov.scale(i);
            // explicit form
            let disp = mat2_apply(&x_mat, &psi.partial(Axis::X)?)
                .add_trunc(&mat2_apply(&y_mat, &psi.partial(Axis::Y)?))
                .add_trunc(&mat2_apply(&c_mat, psi));
            let d = cov.sub_trunc(&disp);
            worst = worst.max(d.c[0].value().norm()).max(d.c[1].value().norm());
        }
    }
    Ok(worst)
}

/// A separated solution ψᵢ(x, y) = aᵢ(x)bᵢ(y) with aᵢ = cᵢe^{κx} and the
/// y-parts tabulated on a uniform grid.
#[derive(Debug, Clone)]
pub struct SeparatedSolution {
    pub lambda: C,
    pub kappa: C,
    pub mu1: C,
    pub mu2: C,
    pub c1: C,
    pub c2: C,
    pub ys: Vec<f64>,
    pub b1: Vec<C>,
    pub b2: Vec<C>,
    pub h: f64,
}

impl SeparatedSolution {
    /// ψ at (x, ys[iy]) as point values.
    pub fn psi_value(&self, x: f64, iy: usize) -> [C; 2] {
        let e = (self.kappa * C::new(x, 0.0)).exp();
        [self.c1 * e * self.b1[iy], self.c2 * e * self.b2[iy]]
    }

    /// Write the y-part tables as CSV: y, Re b1, Im b1, Re b2, Im b2.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "y,re_b1,im_b1,re_b2,im_b2")?;
        for (i, &y) in self.ys.iter().enumerate() {
            writeln!(
                out,
                "{y},{},{},{},{}",
                self.b1[i].re, self.b1[i].im, self.b2[i].re, self.b2[i].im
            )?;
        }
        Ok(())
    }
}

/// Solve the separated y-system for a Liouville metric with A = 0.  The
/// x-relations with normalized factor functions fix μ₁ = κc₂/c₁ and
/// μ₂ = κc₁/c₂; the y-system
///
///   (B₁F)ḃ₁ + (C₁ − λ)F b₁ = −μ₁ b₂,
///   (B₁F)ḃ₂ + (C₁ + λ)F b₂ = −μ₂ b₁,       F(y) = i√B(y)/k,
///
/// is integrated by classical RK4 from y_range.0 with b₁ = b₂ = 1.
pub fn separate_solve(
    m: &LiouvilleMetric,
    lambda: C,
    kappa: C,
    c1: C,
    c2: C,
    y_range: (f64, f64),
    h: f64,
) -> Result<SeparatedSolution, SepError> {
    if lambda.norm() == 0.0 {
        return Err(SepError::LambdaZero);
    }
    let frame = m.d5_frame()?;
    let i = C::new(0.0, 1.0);
    let k = m.signature.k();
    let mu1 = kappa * c2 / c1;
    let mu2 = kappa * c1 / c2;

    // right-hand side of (ḃ₁, ḃ₂) at y
    let rhs = |y: f64, b: [C; 2]| -> Result<[C; 2], SepError> {
        let point = (C::new(0.0, 0.0), C::new(y, 0.0));
        let co = separation_coefficients(&frame, point)?;
        let b_val = m.b_expr.eval_jet(point, 0)?.value();
        let f = i * b_val.sqrt() / k;
        let d = co.b1 * f;
        Ok([
            (-mu1 * b[1] - (co.c1 - lambda) * f * b[0]) / d,
            (-mu2 * b[0] - (co.c1 + lambda) * f * b[1]) / d,
        ])
    };

    let n = ((y_range.1 - y_range.0) / h).round() as usize;
    let mut ys = Vec::with_capacity(n + 1);
    let mut b1 = Vec::with_capacity(n + 1);
    let mut b2 = Vec::with_capacity(n + 1);
    let mut b = [C::new(1.0, 0.0), C::new(1.0, 0.0)];
    let mut y = y_range.0;
    ys.push(y);
    b1.push(b[0]);
    b2.push(b[1]);
    for _ in 0..n {
        let k1 = rhs(y, b)?;
        let half = C::new(0.5 * h, 0.0);
        let k2 = rhs(y + 0.5 * h, [b[0] + half * k1[0], b[1] + half * k1[1]])?;
        let k3 = rhs(y + 0.5 * h, [b[0] + half * k2[0], b[1] + half * k2[1]])?;
        let hh = C::new(h, 0.0);
        let k4 = rhs(y + h, [b[0] + hh * k3[0], b[1] + hh * k3[1]])?;
        let sixth = C::new(h / 6.0, 0.0);
        for c in 0..2 {
            b[c] += sixth
                * (k1[c] + C::new(2.0, 0.0) * (k2[c] + k3[c]) + k4[c]);
        }
        y += h;
        let norm = b[0].norm().max(b[1].norm());
        if !norm.is_finite() || norm > 1e8 {
            return Err(SepError::StepUnstable { y, norm });
        }
        ys.push(y);
        b1.push(b[0]);
        b2.push(b[1]);
    }

    Ok(SeparatedSolution {
        lambda,
        kappa,
        mu1,
        mu2,
        c1,
        c2,
        ys,
        b1,
        b2,
        h,
    })
}

/// Residual ‖𝔻ψ − λψ‖/‖ψ‖ of a separated solution at interior table points.
/// ∂ₓψ = κψ is exact; ∂_yψ uses a 7-point central difference on the b-tables
/// (error O(h⁶), below the O(h⁴) integration error being measured).
pub fn separated_dirac_residual(
    m: &LiouvilleMetric,
    sol: &SeparatedSolution,
    x_samples: &[f64],
) -> Result<f64, SepError> {
    let frame = m.d5_frame()?;
    let n = sol.ys.len();
    if n < 7 {
        return Ok(0.0);
    }
    // 7-point first-derivative stencil
    let w = [-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
    let deriv = |tab: &[C], idx: usize| -> C {
        let mut d = C::new(0.0, 0.0);
        for (s, &ws) in w.iter().enumerate() {
            d += C::new(ws / sol.h, 0.0) * tab[idx + s - 3];
        }
        d
    };
    let mut worst = 0.0f64;
    for iy in 3..n - 3 {
        let y = sol.ys[iy];
        let co = separation_coefficients(&frame, (C::new(0.0, 0.0), C::new(y, 0.0)))?;
        let db1 = deriv(&sol.b1, iy);
        let db2 = deriv(&sol.b2, iy);
        for &x in x_samples {
            let e = (sol.kappa * C::new(x, 0.0)).exp();
            let psi = [sol.c1 * e * sol.b1[iy], sol.c2 * e * sol.b2[iy]];
            let dx = [sol.kappa * psi[0], sol.kappa * psi[1]];
            let dy = [sol.c1 * e * db1, sol.c2 * e * db2];
            let at = co.a_tilde();
            let bt = co.b_tilde();
            let ct = co.c_tilde();
            let scale = psi[0].norm().max(psi[1].norm()).max(1e-300);
            for r in 0..2 {
                let v = at.0[r][0] * dx[0] + at.0[r][1] * dx[1]
                    + bt.0[r][0] * dy[0] + bt.0[r][1] * dy[1]
                    + ct.0[r][0] * psi[0] + ct.0[r][1] * psi[1]
                    - sol.lambda * psi[r];
                worst = worst.max(v.norm() / scale);
            }
        }
    }
    Ok(worst)
}

/// The constant complex frame on flat Lorentzian space that brings 𝔻 to its
/// z-separable form: e¹₁ = i/2, e²₁ = −1/2, e¹₂ = 1/2, e²₂ = −i/2.
pub fn minkowski_complex_frame() -> FrameField {
    FrameField::parse(
        Signature::Lorentzian,
        [["i/2", "1/2"], ["-1/2", "-i/2"]],
        true,
    )
    .expect("constant frame parses")
}

/// ∂_z = ½(∂ₓ − i∂_y) and ∂_z̄ = ½(∂ₓ + i∂_y) on spinor jets.
pub fn partial_z(psi: &SpinorJet, conjugate: bool) -> Result<SpinorJet, JetError> {
    let s = if conjugate {
        C::new(0.0, 0.5)
    } else {
        C::new(0.0, -0.5)
    };
    Ok(psi
        .partial(Axis::X)?
        .scale(C::new(0.5, 0.0))
        .add_trunc(&psi.partial(Axis::Y)?.scale(s)))
}

/// The z-form 𝔻₀ψ = [[0, −1], [1, 0]]∂_zψ + i·diag(1, −1)∂_z̄ψ.  The
/// covariant operator iγ^a∇_a on the complex frame equals i·𝔻₀.
pub fn minkowski_z_form(psi: &SpinorJet) -> Result<SpinorJet, JetError> {
    let i = C::new(0.0, 1.0);
    let zero = C::new(0.0, 0.0);
    let m_z = Mat2([[zero, -C::new(1.0, 0.0)], [C::new(1.0, 0.0), zero]]);
    let m_zb = Mat2([[i, zero], [zero, -i]]);
    Ok(mat2_apply(&m_z, &partial_z(psi, false)?)
        .add_trunc(&mat2_apply(&m_zb, &partial_z(psi, true)?)))
}

/// Max residual between iγ^a∇_a on the complex frame and i·(z-form) over the
/// given spinor jets at a point.
pub fn minkowski_form_residual(psi: &[SpinorJet], point: (C, C)) -> Result<f64, SepError> {
    let frame = minkowski_complex_frame();
    let geo = geometry_at(&frame, point, 3)?;
    let i = C::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for p in psi {
        let d1 = frame_first(p, &geo)?;
        let mut cov = SpinorJet::zero(d1[0].order());
        for a in 0..2 {
            cov = cov.add_trunc(&mat2_apply(&geo.gammas.gamma_up(a), &d1[a]));
        }
        let cov = cov.scale(i);
        let zf = minkowski_z_form(p)?.scale(i);
        let d = cov.sub_trunc(&zf);
        worst = worst.max(d.max_abs());
    }
    Ok(worst)
}

/// The exponential family ψ = (p, iq − λ)e^{pz + qz̄} solves 𝔻₀ψ = λψ when
/// p² + q² = −λ²; returns (λ, c₁, c₂) for given (p, q).
pub fn minkowski_exponential(p: C, q: C) -> (C, C, C) {
    let lambda = (-(p * p + q * q)).sqrt();
    (lambda, p, C::new(0.0, 1.0) * q - lambda)
}

/// Build the jet of (c₁, c₂)e^{pz + qz̄} at a point through (x, y).
pub fn exponential_spinor(
    p: C,
    q: C,
    c1: C,
    c2: C,
    point: (C, C),
    order: usize,
) -> SpinorJet {
    // pz + qz̄ = (p+q)x + i(p−q)y
    let cx = p + q;
    let cy = C::new(0.0, 1.0) * (p - q);
    let mut phase = Jet::zero(order);
    phase.set(0, 0, cx * point.0 + cy * point.1);
    if order >= 1 {
        phase.set(1, 0, cx);
        phase.set(0, 1, cy);
    }
    let e = phase.exp();
    SpinorJet {
        c: [e.scale(c1), e.scale(c2)],
    }
}

/// Residuals of the momenta identities H = P² + P̄² and L = i(P² − P̄²) with
/// H = ½(pₓ² − p_y²), L = pₓp_y, P = ½(pₓ − ip_y), P̄ = ½(pₓ + ip_y).
pub fn hj_momenta_identities(px: C, py: C) -> (f64, f64) {
    let i = C::new(0.0, 1.0);
    let h = C::new(0.5, 0.0) * (px * px - py * py);
    let l = px * py;
    let p = C::new(0.5, 0.0) * (px - i * py);
    let pb = C::new(0.5, 0.0) * (px + i * py);
    (
        (h - (p * p + pb * pb)).norm(),
        (l - i * (p * p - pb * pb)).norm(),
    )
}
