use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::GaussianMixture;

/// Projection of the initial state onto the beam labelled `(p, q)`:
/// `int exp(-(y - q)^2 / (2 eps) - i p (y - q) / eps) psi0(y) dy`,
/// in closed form term by term.
pub fn y_overlap(psi0: &GaussianMixture, p: f64, q: f64) -> Complex64 {
    let eps = psi0.eps;
    psi0.terms
        .iter()
        .map(|t| {
            // exponent is -A y^2 + B y + C
            let a = 0.5 / eps + t.alpha;
            let b = Complex64::new(q / eps + 2.0 * t.alpha * t.center, (t.momentum - p) / eps);
            let c = Complex64::new(
                -0.5 * q * q / eps - t.alpha * t.center * t.center,
                (p * q - t.momentum * t.center) / eps,
            );
            t.amp * (PI / a).sqrt() * (b * b / (4.0 * a) + c).exp()
        })
        .sum()
}

/// Same projection for an arbitrary `psi0`, by adaptive Gauss-Kronrod
/// quadrature on `q +- 10 sqrt(eps)`.
pub fn y_overlap_quadrature(
    psi0: impl Fn(f64) -> Complex64,
    p: f64,
    q: f64,
    eps: f64,
    rel_tol: f64,
) -> Result<Complex64> {
    let half = 10.0 * eps.sqrt();
    let f = |y: f64| {
        let d = y - q;
        Complex64::new(-0.5 * d * d / eps, -p * d / eps).exp() * psi0(y)
    };
    integrate(&f, q - half, q + half, rel_tol)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Piece {
    lo: f64,
    hi: f64,
    value: Complex64,
    // |Kronrod - Gauss|
    error: f64,
    // Kronrod estimate of the integral of |f|, for the round-off floor
    magnitude: f64,
}

fn kronrod15(f: &impl Fn(f64) -> Complex64, lo: f64, hi: f64) -> Piece {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let center = f(mid);
    let mut k = center * WGK[7];
    let mut g = center * WG[3];
    let mut m = center.norm() * WGK[7];
    for i in 0..7 {
        let dx = half * XGK[i];
        let (left, right) = (f(mid - dx), f(mid + dx));
        k += (left + right) * WGK[i];
        m += (left.norm() + right.norm()) * WGK[i];
        if i % 2 == 1 {
            g += (left + right) * WG[i / 2];
        }
    }
    Piece {
        lo,
        hi,
        value: k * half,
        error: ((k - g) * half).norm(),
        magnitude: m * half.abs(),
    }
}

/// Globally adaptive G7K15 quadrature of a complex integrand.
pub fn integrate(f: &impl Fn(f64) -> Complex64, a: f64, b: f64, rel_tol: f64) -> Result<Complex64> {
    const MAX_INTERVALS: usize = 2000;
    let mut pieces = vec![kronrod15(f, a, b)];
    loop {
        let total: Complex64 = pieces.iter().map(|p| p.value).sum();
        let err: f64 = pieces.iter().map(|p| p.error).sum();
        let magnitude: f64 = pieces.iter().map(|p| p.magnitude).sum();
        // cancellation below round-off of |f| cannot be resolved
        if err <= rel_tol * total.norm() || err <= 64.0 * f64::EPSILON * magnitude || err < 1e-300 {
            return Ok(total);
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::numerical(format!(
                "quadrature on [{a}, {b}] did not converge (error {err:.3e}, value {total})"
            )));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let Piece { lo, hi, .. } = pieces.swap_remove(worst);
        let m = 0.5 * (lo + hi);
        pieces.push(kronrod15(f, lo, m));
        pieces.push(kronrod15(f, m, hi));
    }
}
