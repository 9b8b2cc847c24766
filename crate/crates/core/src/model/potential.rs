/// Polynomial external potential `V(x)`.
///
/// All variants are polynomials so `V'` and `V''` come out analytically.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// `V(x) = coeff * x^2`
    Quadratic { coeff: f64 },
    /// `V(x) = a * x^2 + b * x^4`
    DoubleWell { a: f64, b: f64 },
    /// `V(x) = sum_n coeffs[n] * x^n`, ascending powers.
    Polynomial { coeffs: Vec<f64> },
}

impl Potential {
    /// `(V(x), V'(x), V''(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        match *self {
            Potential::Quadratic { coeff } => (coeff * x * x, 2.0 * coeff * x, 2.0 * coeff),
            Potential::DoubleWell { a, b } => {
                let x2 = x * x;
                (
                    a * x2 + b * x2 * x2,
                    2.0 * a * x + 4.0 * b * x2 * x,
                    2.0 * a + 12.0 * b * x2,
                )
            }
            Potential::Polynomial { ref coeffs } => horner3(coeffs, x),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x).0
    }

    /// Adds `shift * x^2` to the potential.
    pub fn with_quadratic_shift(&self, shift: f64) -> Potential {
        match *self {
            Potential::Quadratic { coeff } => Potential::Quadratic {
                coeff: coeff + shift,
            },
            Potential::DoubleWell { a, b } => Potential::DoubleWell { a: a + shift, b },
            Potential::Polynomial { ref coeffs } => {
                let mut c = coeffs.clone();
                if c.len() < 3 {
                    c.resize(3, 0.0);
                }
                c[2] += shift;
                Potential::Polynomial { coeffs: c }
            }
        }
    }

    /// Coefficient list in ascending powers.
    pub fn coeffs(&self) -> Vec<f64> {
        match *self {
            Potential::Quadratic { coeff } => vec![0.0, 0.0, coeff],
            Potential::DoubleWell { a, b } => vec![0.0, 0.0, a, 0.0, b],
            Potential::Polynomial { ref coeffs } => coeffs.clone(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }
}

// value and first two derivatives in one Horner pass
fn horner3(coeffs: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
    for &c in coeffs.iter().rev() {
        ddp = ddp * x + 2.0 * dp;
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp, ddp)
}
