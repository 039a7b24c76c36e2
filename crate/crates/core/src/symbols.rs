//! Closed-form bilinear frequency symbols and their quadrature oracle.
//!
//! The basic object is `m(xi, xi1) = int_0^1 sgn(xi + a xi1) da`, the
//! averaged sign whose kinks sit on the lines `xi = 0` and `xi + xi1 = 0`.
//! Everything else here is built from it: the indicator variant, the
//! oriented primitive, products with rescaled second arguments, and the
//! circular product with the frequency roles exchanged.
//!
//! Conventions: `sgn(0) = 0` and `1_{R+}(0) = 1/2`, so the affine relation
//! `m = 2 m_+ - 1` holds at every point.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Sign function with `sgn(0) = 0`.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Half-line indicator with the symmetric convention `1_{R+}(0) = 1/2`.
pub fn indicator_pos(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// `int_0^1 sgn(xi + a xi1) da`, exactly.
///
/// With `a* = -xi/xi1`: when the integrand never changes sign on `(0,1)`
/// the value is the sign at the midpoint `xi + xi1/2`; otherwise the two
/// constant pieces contribute `sgn(xi) a* + sgn(xi+xi1) (1-a*)`.
pub fn eval_c1(xi: f64, xi1: f64) -> f64 {
    if xi1 == 0.0 {
        return sgn(xi);
    }
    let a_star = -xi / xi1;
    if a_star > 0.0 && a_star < 1.0 {
        sgn(xi) * a_star + sgn(xi + xi1) * (1.0 - a_star)
    } else {
        sgn(xi + 0.5 * xi1)
    }
}

/// `int_0^1 1_{R+}(xi + a xi1) da`, exactly.
pub fn eval_c1_indicator(xi: f64, xi1: f64) -> f64 {
    if xi1 == 0.0 {
        return indicator_pos(xi);
    }
    let a_star = -xi / xi1;
    if a_star > 0.0 && a_star < 1.0 {
        indicator_pos(xi) * a_star + indicator_pos(xi + xi1) * (1.0 - a_star)
    } else {
        indicator_pos(xi + 0.5 * xi1)
    }
}

/// Oriented primitive `int_0^{xi1} 1_{R+}(xi + a) da`, piecewise linear.
pub fn eval_primitive(xi: f64, xi1: f64) -> f64 {
    if xi1 >= 0.0 {
        (xi + xi1).clamp(0.0, xi1)
    } else {
        -xi.clamp(0.0, -xi1)
    }
}

/// Product symbol `(int sgn(xi + a a_scale xi1) da)(int sgn(xi + a b_scale xi1) da)`.
pub fn eval_gen22(a: f64, b: f64, xi: f64, xi1: f64) -> Result<f64> {
    if a == 0.0 {
        return Err(CoreError::ZeroParameter("a"));
    }
    if b == 0.0 {
        return Err(CoreError::ZeroParameter("b"));
    }
    Ok(eval_c1(xi, a * xi1) * eval_c1(xi, b * xi1))
}

/// Circular product `(int sgn(xi1 + a a_scale xi2) da)(int sgn(xi2 + b b_scale xi1) db)`,
/// symmetric in `(xi1, xi2)` when `a = b`.
pub fn eval_circular(a: f64, b: f64, xi1: f64, xi2: f64) -> Result<f64> {
    if a == 0.0 {
        return Err(CoreError::ZeroParameter("a"));
    }
    if b == 0.0 {
        return Err(CoreError::ZeroParameter("b"));
    }
    Ok(eval_c1(xi1, a * xi2) * eval_c1(xi2, b * xi1))
}

/// A point of the bilinear frequency plane (with an optional third
/// coordinate for adjoint bookkeeping).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyPoint {
    pub xi: f64,
    pub xi1: f64,
    pub xi2: Option<f64>,
}

impl FrequencyPoint {
    pub fn new(xi: f64, xi1: f64) -> Self {
        FrequencyPoint {
            xi,
            xi1,
            xi2: None,
        }
    }
}

/// Which adjoint of a bilinear multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdjointSlot {
    Star1,
    Star2,
}

/// A bilinear symbol: a kind plus its parameters, evaluable pointwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SymbolDescriptor {
    /// `int_0^1 sgn(xi + a xi1) da`
    C1Sgn,
    /// `int_0^1 1_{R+}(xi + a xi1) da`
    C1Indicator,
    /// Product of two sign averages with rescaled second arguments.
    Gen22 { a: f64, b: f64 },
    /// Product with the frequency roles exchanged between the factors.
    Circular { a: f64, b: f64 },
    /// `Gen22 { a: 1, b: 1 }` by definition.
    DoubleCommutator,
    Constant(f64),
    /// `-i sgn` of one coordinate (0 = first, 1 = second).
    SeparableSgn { axis: u8 },
    /// Adjoint substitution wrapped around another symbol.
    Adjoint {
        inner: Box<SymbolDescriptor>,
        slot: AdjointSlot,
    },
}

impl SymbolDescriptor {
    pub fn gen22(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 {
            return Err(CoreError::ZeroParameter("a"));
        }
        if b == 0.0 {
            return Err(CoreError::ZeroParameter("b"));
        }
        Ok(SymbolDescriptor::Gen22 { a, b })
    }

    pub fn circular(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 {
            return Err(CoreError::ZeroParameter("a"));
        }
        if b == 0.0 {
            return Err(CoreError::ZeroParameter("b"));
        }
        Ok(SymbolDescriptor::Circular { a, b })
    }

    /// Human-readable formula of this symbol.
    pub fn formula(&self) -> String {
        match self {
            SymbolDescriptor::C1Sgn => "int_0^1 sgn(xi + a xi1) da".into(),
            SymbolDescriptor::C1Indicator => "int_0^1 1_{R+}(xi + a xi1) da".into(),
            SymbolDescriptor::Gen22 { a, b } => format!(
                "(int_0^1 sgn(xi + {a} a xi1) da)(int_0^1 sgn(xi + {b} a xi1) da)"
            ),
            SymbolDescriptor::Circular { a, b } => format!(
                "(int_0^1 sgn(xi1 + {a} a xi2) da)(int_0^1 sgn(xi2 + {b} b xi1) db)"
            ),
            SymbolDescriptor::DoubleCommutator => "(int_0^1 sgn(xi + a xi1) da)^2".into(),
            SymbolDescriptor::Constant(c) => format!("{c}"),
            SymbolDescriptor::SeparableSgn { axis } => format!("-i sgn(arg{axis})"),
            SymbolDescriptor::Adjoint { inner, slot } => {
                let sub = match slot {
                    AdjointSlot::Star1 => "m(-x-y, y)",
                    AdjointSlot::Star2 => "m(x, -x-y)",
                };
                format!("{sub} of [{}]", inner.formula())
            }
        }
    }

    /// Pointwise evaluation at the pair `(x, y)` of frequency coordinates.
    ///
    /// For the commutator kinds these are `(xi, xi1)`; for the circular
    /// kind `(xi1, xi2)`.  Real-valued kinds return a real complex number.
    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        match self {
            SymbolDescriptor::C1Sgn => Complex64::new(eval_c1(x, y), 0.0),
            SymbolDescriptor::C1Indicator => Complex64::new(eval_c1_indicator(x, y), 0.0),
            SymbolDescriptor::Gen22 { a, b } => {
                Complex64::new(eval_c1(x, *a * y) * eval_c1(x, *b * y), 0.0)
            }
            SymbolDescriptor::Circular { a, b } => {
                Complex64::new(eval_c1(x, *a * y) * eval_c1(y, *b * x), 0.0)
            }
            SymbolDescriptor::DoubleCommutator => {
                let v = eval_c1(x, y);
                Complex64::new(v * v, 0.0)
            }
            SymbolDescriptor::Constant(c) => Complex64::new(*c, 0.0),
            SymbolDescriptor::SeparableSgn { axis } => {
                let arg = if *axis == 0 { x } else { y };
                Complex64::new(0.0, -sgn(arg))
            }
            SymbolDescriptor::Adjoint { inner, slot } => match slot {
                AdjointSlot::Star1 => inner.eval(-x - y, y),
                AdjointSlot::Star2 => inner.eval(x, -x - y),
            },
        }
    }

    /// Real-part evaluation; exact for every kind except `SeparableSgn`.
    pub fn eval_real(&self, x: f64, y: f64) -> f64 {
        self.eval(x, y).re
    }

    /// The adjoint symbol `m(-x-y, y)` (star 1) or `m(x, -x-y)` (star 2).
    pub fn adjoint(&self, slot: AdjointSlot) -> SymbolDescriptor {
        SymbolDescriptor::Adjoint {
            inner: Box::new(self.clone()),
            slot,
        }
    }
}

/// Midpoint-rule evaluation of the defining parameter integral(s).
///
/// This is the independent check for the closed forms above: `O(1/M)`
/// error from the rule plus at most one node-straddling jump per factor.
pub fn quadrature_oracle(
    descriptor: &SymbolDescriptor,
    point: FrequencyPoint,
    nodes: usize,
) -> Result<f64> {
    if nodes < 10 {
        return Err(CoreError::TooFewNodes(nodes));
    }
    let midpoint_avg = |f: &dyn Fn(f64) -> f64| -> f64 {
        let mut acc = 0.0;
        for i in 0..nodes {
            let alpha = (i as f64 + 0.5) / nodes as f64;
            acc += f(alpha);
        }
        acc / nodes as f64
    };
    let (x, y) = (point.xi, point.xi1);
    match descriptor {
        SymbolDescriptor::C1Sgn => Ok(midpoint_avg(&|a| sgn(x + a * y))),
        SymbolDescriptor::C1Indicator => Ok(midpoint_avg(&|a| indicator_pos(x + a * y))),
        SymbolDescriptor::Gen22 { a, b } => {
            let (sa, sb) = (*a, *b);
            Ok(midpoint_avg(&|t| sgn(x + t * sa * y)) * midpoint_avg(&|t| sgn(x + t * sb * y)))
        }
        SymbolDescriptor::DoubleCommutator => {
            let v = midpoint_avg(&|a| sgn(x + a * y));
            Ok(v * v)
        }
        SymbolDescriptor::Circular { a, b } => {
            let (sa, sb) = (*a, *b);
            Ok(midpoint_avg(&|t| sgn(x + t * sa * y)) * midpoint_avg(&|t| sgn(y + t * sb * x)))
        }
        SymbolDescriptor::Adjoint { inner, slot } => {
            let sub = match slot {
                AdjointSlot::Star1 => FrequencyPoint::new(-x - y, y),
                AdjointSlot::Star2 => FrequencyPoint::new(x, -x - y),
            };
            quadrature_oracle(inner, sub, nodes)
        }
        SymbolDescriptor::Constant(_) => Err(CoreError::UnsupportedKind("constant")),
        SymbolDescriptor::SeparableSgn { .. } => Err(CoreError::UnsupportedKind("separable_sgn")),
    }
}

/// Midpoint quadrature of the oriented primitive over `[0, xi1]`.
pub fn primitive_quadrature(xi: f64, xi1: f64, nodes: usize) -> Result<f64> {
    if nodes < 10 {
        return Err(CoreError::TooFewNodes(nodes));
    }
    let mut acc = 0.0;
    for i in 0..nodes {
        let alpha = xi1 * (i as f64 + 0.5) / nodes as f64;
        acc += indicator_pos(xi + alpha);
    }
    Ok(acc * xi1 / nodes as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn c1_trivial_values() {
        assert_eq!(eval_c1(1.0, 0.0), 1.0);
        assert_eq!(eval_c1(2.0, 1.0), 1.0);
        assert_eq!(eval_c1(0.0, 0.0), 0.0);
    }

    #[test]
    fn c1_derived_values_match_oracle() {
        // sign change at a* = 1/2 and a* = 1/4; frozen from the midpoint rule
        for ((xi, xi1), want) in [((-1.0, 2.0), 0.0), ((-1.0, 4.0), 0.5)] {
            assert_abs_diff_eq!(eval_c1(xi, xi1), want, epsilon = 1e-15);
            let q = quadrature_oracle(
                &SymbolDescriptor::C1Sgn,
                FrequencyPoint::new(xi, xi1),
                1_000_000,
            )
            .unwrap();
            assert_abs_diff_eq!(q, want, epsilon = 2e-6);
        }
    }

    #[test]
    fn indicator_values() {
        assert_eq!(eval_c1_indicator(1.0, 0.0), 1.0);
        assert_abs_diff_eq!(eval_c1_indicator(-1.0, 4.0), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(eval_c1_indicator(-1.0, 2.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn primitive_values() {
        assert_eq!(eval_primitive(1.0, 2.0), 2.0);
        assert_eq!(eval_primitive(-3.0, 2.0), 0.0);
        assert_eq!(eval_primitive(-1.0, 2.0), 1.0);
        // oriented case, cross-checked by quadrature
        for (xi, xi1) in [(-1.0, 2.0), (0.3, -1.5), (-0.2, -3.0), (1.0, -0.5)] {
            let q = primitive_quadrature(xi, xi1, 2_000_000).unwrap();
            assert_abs_diff_eq!(eval_primitive(xi, xi1), q, epsilon = 1e-5);
        }
    }

    #[test]
    fn primitive_relates_to_indicator_average() {
        for (xi, xi1) in [(-1.0, 4.0), (2.0, 3.0), (-0.7, -2.0), (0.4, -1.0)] {
            assert_abs_diff_eq!(
                eval_primitive(xi, xi1) / xi1,
                eval_c1_indicator(xi, xi1),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn gen22_values() {
        assert_abs_diff_eq!(eval_gen22(1.0, 1.0, -1.0, 4.0).unwrap(), 0.25, epsilon = 1e-15);
        assert_eq!(eval_gen22(1.0, 1.0, 1.0, 0.0).unwrap(), 1.0);
        // factorwise: eval_c1(-1,2) * eval_c1(-1,-1) = 0 * (-1)
        assert_eq!(eval_gen22(2.0, -1.0, -1.0, 1.0).unwrap(), 0.0);
        assert!(eval_gen22(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(eval_gen22(1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn circular_values() {
        assert_eq!(eval_circular(1.0, 1.0, 3.0, 3.0).unwrap(), 1.0);
        // eval_c1(-1,4) * eval_c1(4,-1) = 0.5 * 1
        assert_abs_diff_eq!(
            eval_circular(1.0, 1.0, -1.0, 4.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert!(eval_circular(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn oracle_constant_sign_is_exact() {
        let q = quadrature_oracle(&SymbolDescriptor::C1Sgn, FrequencyPoint::new(5.0, 1.0), 100)
            .unwrap();
        assert_eq!(q, 1.0);
    }

    #[test]
    fn oracle_gen22() {
        let q = quadrature_oracle(
            &SymbolDescriptor::Gen22 { a: 1.0, b: 1.0 },
            FrequencyPoint::new(-1.0, 4.0),
            1_000_000,
        )
        .unwrap();
        assert_abs_diff_eq!(q, 0.25, epsilon = 1e-5);
    }

    #[test]
    fn oracle_rejects() {
        let p = FrequencyPoint::new(1.0, 1.0);
        assert!(quadrature_oracle(&SymbolDescriptor::C1Sgn, p, 9).is_err());
        assert!(quadrature_oracle(&SymbolDescriptor::Constant(1.0), p, 100).is_err());
        assert!(
            quadrature_oracle(&SymbolDescriptor::SeparableSgn { axis: 0 }, p, 100).is_err()
        );
    }

    #[test]
    fn adjoint_substitution() {
        let m = SymbolDescriptor::C1Sgn;
        let star2 = m.adjoint(AdjointSlot::Star2);
        // m(xi1, -xi1-xi2) at (1, -3) is m(1, 2) = 1
        assert_eq!(star2.eval(1.0, -3.0).re, eval_c1(1.0, 2.0));
        assert_eq!(star2.eval(1.0, -3.0).re, 1.0);

        let c = SymbolDescriptor::Constant(1.0);
        assert_eq!(c.adjoint(AdjointSlot::Star2).eval(0.3, 0.7).re, 1.0);
    }

    #[test]
    fn double_commutator_is_square() {
        let d = SymbolDescriptor::DoubleCommutator;
        for (x, y) in [(-1.0, 4.0), (0.5, -2.0), (3.0, 0.0)] {
            let v = eval_c1(x, y);
            assert_eq!(d.eval(x, y).re, v * v);
        }
    }
}
