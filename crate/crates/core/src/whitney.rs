//! Double Fourier coefficients of the windowed symbol on Whitney regions.
//!
//! The symbol is smoothly localized to one dyadic frequency box by a
//! window built from the mother cutoff, then expanded in a double Fourier
//! series over a guard-banded period box.  The three window shapes are
//!
//! * `low_high`: low-pass in the first variable, band in the second.  The
//!   low-pass is `theta(xi / 2^{k-2})`, three octaves below the band, so
//!   the support never meets the line `xi + xi1 = 0`; only the `xi = 0`
//!   kink survives, which is what limits the decay to quadratic in `n`.
//! * `high_low`: the mirror image (a classical paraproduct symbol, kept
//!   for completeness and excluded from decay experiments).
//! * `high_high`: band times band, which straddles `xi + xi1 = 0` and
//!   produces the anti-diagonal coefficient ridge.
//!
//! Coefficients are computed on the lattice `j / (Q 2^k)` with `Q = 8`
//! (the period box is `Q` times the dyadic scale, leaving a guard band of
//! twice the window support).  Every `Q`-th entry, rescaled by `Q^2`, is
//! a coefficient on the coarse lattice `n / 2^k` in which the decay
//! statements are calibrated; [`CoeffTable::paper_coeff`] exposes that
//! view and [`verify_decay`] measures it.
//!
//! Windows are evaluated in scale-normalized coordinates and all scale
//! factors are powers of two, so tables at different `k` agree bit for
//! bit; [`verify_scale_uniformity`] checks exactly that.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bumps::{psi_hat, theta};
use crate::error::{CoreError, Result};
use crate::fit::{angle_bracket, fit_power_law};
use crate::symbols::SymbolDescriptor;

/// Ratio of the period box to the dyadic scale.
pub const PERIOD_FACTOR: usize = 8;

/// Boundary-ring magnitude above which a table is flagged as aliased.
pub const ALIASING_FLOOR: f64 = 1e-8;

/// Which piece of the three-part symbol decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymbolPart {
    LowHigh,
    HighLow,
    HighHigh,
}

impl SymbolPart {
    pub fn as_str(&self) -> &'static str {
        match self {
            SymbolPart::LowHigh => "low_high",
            SymbolPart::HighLow => "high_low",
            SymbolPart::HighHigh => "high_high",
        }
    }

    /// The `high_low` window carries a classical paraproduct symbol and
    /// is excluded from the decay experiments.
    pub fn is_classical(&self) -> bool {
        matches!(self, SymbolPart::HighLow)
    }
}

/// A base symbol multiplied by one Whitney window at scale `2^k`.
#[derive(Debug, Clone)]
pub struct WindowedSymbol {
    pub part: SymbolPart,
    pub scale: i32,
    pub base: SymbolDescriptor,
}

/// Smooth localization to one dyadic box, per part, at scale `2^k`.
pub fn build_windowed_symbol(
    part: SymbolPart,
    scale: i32,
    base: SymbolDescriptor,
) -> Result<WindowedSymbol> {
    match base {
        SymbolDescriptor::C1Indicator
        | SymbolDescriptor::C1Sgn
        | SymbolDescriptor::Gen22 { .. }
        | SymbolDescriptor::DoubleCommutator
        | SymbolDescriptor::Constant(_) => {}
        _ => return Err(CoreError::UnsupportedBase),
    }
    Ok(WindowedSymbol { part, scale, base })
}

impl WindowedSymbol {
    /// Window value in scale-normalized coordinates `u = xi / 2^k`.
    fn window_normalized(&self, u: f64, v: f64) -> f64 {
        match self.part {
            SymbolPart::LowHigh => theta(4.0 * u) * psi_hat(v),
            SymbolPart::HighLow => psi_hat(u) * theta(4.0 * v),
            SymbolPart::HighHigh => psi_hat(u) * psi_hat(v),
        }
    }

    /// The windowed symbol at a frequency pair.
    pub fn eval(&self, xi: f64, xi1: f64) -> f64 {
        let inv = (-self.scale as f64).exp2();
        let w = self.window_normalized(xi * inv, xi1 * inv);
        if w == 0.0 {
            return 0.0;
        }
        self.base.eval_real(xi, xi1) * w
    }

    /// Half-width of the period box `[-Q 2^k / 2, Q 2^k / 2)`.
    pub fn period_half_width(&self) -> f64 {
        0.5 * PERIOD_FACTOR as f64 * (self.scale as f64).exp2()
    }
}

/// Fitted decay diagnostics of one coefficient table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub part: SymbolPart,
    pub k: i32,
    /// Coarse-lattice half-width the fit ran over.
    pub n_max: usize,
    pub resolution: usize,
    /// Max of `|C|` over the bound shape with `# = 4`.
    pub c_quad: f64,
    /// Power-law exponent along the `n` axis (`n1 = 0` slice).
    pub exp_n: f64,
    /// Power-law exponent along the `n1` axis (`n = 0` slice).
    pub exp_n1: f64,
}

/// Which bound shape [`verify_decay`] measures against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayKind {
    /// `<n>^{-2} <n1>^{-4}`
    Plain,
    /// `<n>^{-2} <n-n1>^{-4} + <n>^{-4} <n1>^{-4}`
    Tilde,
}

/// Double Fourier coefficients of a windowed symbol, complete on the
/// square `|j|, |j1| <= n_max` of the fine lattice `j / (Q 2^k)`.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    pub part: SymbolPart,
    pub scale: i32,
    pub n_max: usize,
    pub resolution: usize,
    /// Row-major `(2 n_max + 1)^2` block, row `j`, column `j1`.
    coeffs: Vec<Complex64>,
    /// Set when a boundary-ring coefficient exceeds [`ALIASING_FLOOR`].
    pub aliasing_flag: bool,
    pub decay_fit: Option<DecayReport>,
}

impl CoeffTable {
    fn stride(&self) -> usize {
        2 * self.n_max + 1
    }

    /// Coefficient at fine-lattice indices `(j, j1)`.
    pub fn get(&self, j: i64, j1: i64) -> Complex64 {
        let n = self.n_max as i64;
        assert!(j.abs() <= n && j1.abs() <= n, "index outside table");
        let row = (j + n) as usize;
        let col = (j1 + n) as usize;
        self.coeffs[row * self.stride() + col]
    }

    /// Largest coarse-lattice index available: `n_max / Q`.
    pub fn paper_n_max(&self) -> usize {
        self.n_max / PERIOD_FACTOR
    }

    /// Coefficient on the coarse lattice `n / 2^k`: every `Q`-th fine
    /// entry, rescaled by `Q^2`.
    pub fn paper_coeff(&self, n: i64, n1: i64) -> Complex64 {
        let q = PERIOD_FACTOR as i64;
        self.get(n * q, n1 * q) * (PERIOD_FACTOR * PERIOD_FACTOR) as f64
    }

    /// Resum the table at a frequency pair (partial Fourier synthesis).
    pub fn synthesize(&self, xi: f64, xi1: f64) -> Complex64 {
        let period = PERIOD_FACTOR as f64 * (self.scale as f64).exp2();
        let n = self.n_max as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        // row phase precomputation keeps this O(n) per row
        let col_phases: Vec<Complex64> = (-n..=n)
            .map(|j1| Complex64::from_polar(1.0, 2.0 * PI * j1 as f64 * xi1 / period))
            .collect();
        for j in -n..=n {
            let row_phase = Complex64::from_polar(1.0, 2.0 * PI * j as f64 * xi / period);
            let row = ((j + n) as usize) * self.stride();
            let mut row_acc = Complex64::new(0.0, 0.0);
            for (c, p) in self.coeffs[row..row + self.stride()].iter().zip(&col_phases) {
                row_acc += c * p;
            }
            acc += row_phase * row_acc;
        }
        acc
    }

    /// Elementwise max difference against another table of the same shape.
    pub fn max_abs_diff(&self, other: &CoeffTable) -> f64 {
        assert_eq!(self.n_max, other.n_max);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Attach the decay report for the natural bound shape of the part.
    pub fn with_decay_fit(mut self) -> Self {
        let kind = match self.part {
            SymbolPart::HighHigh => DecayKind::Tilde,
            _ => DecayKind::Plain,
        };
        self.decay_fit = Some(verify_decay(&self, kind));
        self
    }
}

/// Sample the windowed symbol over the period box and transform.
///
/// `n_max` is the fine-lattice half-width of the table; `resolution` is
/// the number of midpoint samples per axis and must be a power of two at
/// least `8 n_max`.
pub fn compute_coeffs(ws: &WindowedSymbol, n_max: usize, resolution: usize) -> Result<CoeffTable> {
    if !resolution.is_power_of_two() {
        return Err(CoreError::BadResolution(resolution));
    }
    if resolution < 8 * n_max {
        return Err(CoreError::InsufficientResolution {
            resolution,
            floor: 8 * n_max,
        });
    }
    let r = resolution;
    let q = PERIOD_FACTOR as f64;
    let scale = (ws.scale as f64).exp2();
    // midpoint nodes in normalized coordinates; all quantities dyadic so
    // that node * 2^k is exact and tables match across scales bitwise
    let du = q / r as f64;
    let node = |i: usize| -> f64 { -0.5 * q + (i as f64 + 0.5) * du };

    let mut planner = FftPlanner::new();
    let fft_row = planner.plan_fft_forward(r);

    let width = 2 * n_max + 1;
    // pass 1: per-row FFT over xi1, keep the low bins
    let kept_rows: Vec<Vec<Complex64>> = (0..r)
        .into_par_iter()
        .map(|i| {
            let u = node(i);
            let xi = scale * u;
            let mut row: Vec<Complex64> = (0..r)
                .map(|l| {
                    let v = node(l);
                    Complex64::new(ws.eval(xi, scale * v), 0.0)
                })
                .collect();
            fft_row.process(&mut row);
            let mut kept = Vec::with_capacity(width);
            for j1 in -(n_max as i64)..=(n_max as i64) {
                kept.push(row[j1.rem_euclid(r as i64) as usize]);
            }
            kept
        })
        .collect();

    // pass 2: FFT over the row index for each kept column
    let fft_col = planner.plan_fft_forward(r);
    let cols: Vec<Vec<Complex64>> = (0..width)
        .into_par_iter()
        .map(|c| {
            let mut col: Vec<Complex64> = (0..r).map(|i| kept_rows[i][c]).collect();
            fft_col.process(&mut col);
            let mut kept = Vec::with_capacity(width);
            for j in -(n_max as i64)..=(n_max as i64) {
                kept.push(col[j.rem_euclid(r as i64) as usize]);
            }
            kept
        })
        .collect();

    // assemble with the midpoint-node phases:
    // C(j,j1) = (1/r^2) (-1)^{j+j1} e^{-i pi (j+j1)/r} X[j mod r, j1 mod r]
    let phase = |j: i64| -> Complex64 {
        let sign = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Complex64::from_polar(sign / r as f64, -PI * j as f64 / r as f64)
    };
    let mut coeffs = vec![Complex64::new(0.0, 0.0); width * width];
    for (ri, j) in (-(n_max as i64)..=(n_max as i64)).enumerate() {
        let pj = phase(j);
        for (ci, j1) in (-(n_max as i64)..=(n_max as i64)).enumerate() {
            coeffs[ri * width + ci] = pj * phase(j1) * cols[ci][ri];
        }
    }

    let mut table = CoeffTable {
        part: ws.part,
        scale: ws.scale,
        n_max,
        resolution,
        coeffs,
        aliasing_flag: false,
        decay_fit: None,
    };
    let n = n_max as i64;
    let mut boundary_max = 0.0f64;
    for j in -n..=n {
        for &j1 in &[-n, n] {
            boundary_max = boundary_max.max(table.get(j, j1).norm());
            boundary_max = boundary_max.max(table.get(j1, j).norm());
        }
    }
    table.aliasing_flag = boundary_max > ALIASING_FLOOR;
    Ok(table)
}

/// Measure the coarse-lattice coefficients against the `# = 4` bound
/// shape and fit the axis decay exponents.
pub fn verify_decay(table: &CoeffTable, which: DecayKind) -> DecayReport {
    let pn = table.paper_n_max() as i64;
    let bound = |n: i64, n1: i64| -> f64 {
        match which {
            DecayKind::Plain => angle_bracket(n).powi(-2) * angle_bracket(n1).powi(-4),
            DecayKind::Tilde => {
                angle_bracket(n).powi(-2) * angle_bracket(n - n1).powi(-4)
                    + angle_bracket(n).powi(-4) * angle_bracket(n1).powi(-4)
            }
        }
    };
    let mut c_quad = 0.0f64;
    for n in -pn..=pn {
        for n1 in -pn..=pn {
            let v = table.paper_coeff(n, n1).norm();
            c_quad = c_quad.max(v / bound(n, n1));
        }
    }
    let fit_axis = |slice: &dyn Fn(i64) -> f64| -> f64 {
        let hi = pn.min(64);
        let mut ns = Vec::new();
        let mut vals = Vec::new();
        for n in -hi..=hi {
            if n.abs() >= 8 {
                ns.push(n);
                vals.push(slice(n));
            }
        }
        fit_power_law(&ns, &vals)
    };
    DecayReport {
        part: table.part,
        k: table.scale,
        n_max: table.paper_n_max(),
        resolution: table.resolution,
        c_quad,
        exp_n: fit_axis(&|n| table.paper_coeff(n, 0).norm()),
        exp_n1: fit_axis(&|n1| table.paper_coeff(0, n1).norm()),
    }
}

/// Max elementwise deviation of the tables at the listed scales from the
/// scale-0 table, over the full fine lattice.
pub fn verify_scale_uniformity(
    base: &SymbolDescriptor,
    part: SymbolPart,
    k_list: &[i32],
    n_max: usize,
    resolution: usize,
) -> Result<f64> {
    let reference = compute_coeffs(&build_windowed_symbol(part, 0, base.clone())?, n_max, resolution)?;
    let mut worst = 0.0f64;
    for &k in k_list {
        let table = if k == 0 {
            reference.clone()
        } else {
            compute_coeffs(&build_windowed_symbol(part, k, base.clone())?, n_max, resolution)?
        };
        worst = worst.max(table.max_abs_diff(&reference));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsupported_base() {
        assert!(build_windowed_symbol(
            SymbolPart::LowHigh,
            0,
            SymbolDescriptor::SeparableSgn { axis: 0 }
        )
        .is_err());
        assert!(build_windowed_symbol(
            SymbolPart::LowHigh,
            0,
            SymbolDescriptor::Circular { a: 1.0, b: 1.0 }
        )
        .is_err());
    }

    #[test]
    fn constant_base_reduces_to_window() {
        let ws =
            build_windowed_symbol(SymbolPart::LowHigh, 0, SymbolDescriptor::Constant(1.0)).unwrap();
        for (u, v) in [(0.1, 1.0), (-0.2, -1.5), (0.0, 0.7), (0.21, 1.9)] {
            let expect = theta(4.0 * u) * psi_hat(v);
            assert_eq!(ws.eval(u, v), expect);
        }
    }

    #[test]
    fn window_supports() {
        let ind = SymbolDescriptor::C1Indicator;
        let k = 0;
        let lh = build_windowed_symbol(SymbolPart::LowHigh, k, ind.clone()).unwrap();
        let hh = build_windowed_symbol(SymbolPart::HighHigh, k, ind).unwrap();
        // exhaustive scan over a grid of the period box
        let m = 160;
        let half = lh.period_half_width();
        for i in 0..m {
            for l in 0..m {
                let xi = -half + (i as f64 + 0.5) * 2.0 * half / m as f64;
                let xi1 = -half + (l as f64 + 0.5) * 2.0 * half / m as f64;
                if lh.eval(xi, xi1) != 0.0 {
                    assert!(xi.abs() <= 4.0 + 1e-12, "low_high xi leak at {xi}");
                    assert!(
                        (0.25..=4.0 + 1e-12).contains(&xi1.abs()),
                        "low_high xi1 leak at {xi1}"
                    );
                }
                if hh.eval(xi, xi1) != 0.0 {
                    assert!(xi.abs() > 0.25, "high_high xi leak at {xi}");
                }
            }
        }
    }

    #[test]
    fn zero_symbol_gives_zero_table() {
        let ws =
            build_windowed_symbol(SymbolPart::LowHigh, 0, SymbolDescriptor::Constant(0.0)).unwrap();
        let t = compute_coeffs(&ws, 16, 128).unwrap();
        for j in -16..=16 {
            for j1 in -16..=16 {
                assert_eq!(t.get(j, j1), Complex64::new(0.0, 0.0));
            }
        }
        let report = verify_decay(&t, DecayKind::Plain);
        assert_eq!(report.c_quad, 0.0);
        assert!(!t.aliasing_flag);
    }

    #[test]
    fn resolution_preconditions() {
        let ws =
            build_windowed_symbol(SymbolPart::LowHigh, 0, SymbolDescriptor::C1Indicator).unwrap();
        assert!(matches!(
            compute_coeffs(&ws, 32, 128),
            Err(CoreError::InsufficientResolution { .. })
        ));
        assert!(matches!(
            compute_coeffs(&ws, 8, 100),
            Err(CoreError::BadResolution(100))
        ));
    }

    #[test]
    fn separable_window_coefficients_factor() {
        // constant base: 2D coefficients are products of 1D window
        // coefficients, computed here by direct midpoint sums
        let ws =
            build_windowed_symbol(SymbolPart::HighHigh, 0, SymbolDescriptor::Constant(1.0)).unwrap();
        let n_max = 16;
        let r = 256;
        let table = compute_coeffs(&ws, n_max, r).unwrap();
        let q = PERIOD_FACTOR as f64;
        let one_d = |j: i64| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..r {
                let u = -0.5 * q + (i as f64 + 0.5) * q / r as f64;
                acc += Complex64::from_polar(psi_hat(u), -2.0 * PI * j as f64 * u / q);
            }
            acc / r as f64
        };
        for (j, j1) in [(0, 0), (3, -5), (-8, 2), (16, 16)] {
            let direct = one_d(j) * one_d(j1);
            assert!(
                (table.get(j, j1) - direct).norm() < 1e-12,
                "({j},{j1}): {} vs {}",
                table.get(j, j1),
                direct
            );
        }
    }

    #[test]
    fn hermitian_symmetry_for_real_symbols() {
        let ws =
            build_windowed_symbol(SymbolPart::LowHigh, 0, SymbolDescriptor::C1Indicator).unwrap();
        let t = compute_coeffs(&ws, 24, 256).unwrap();
        for j in -24..=24 {
            for j1 in -24..=24 {
                let a = t.get(-j, -j1);
                let b = t.get(j, j1).conj();
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn scale_uniformity_small() {
        let dev = verify_scale_uniformity(
            &SymbolDescriptor::C1Indicator,
            SymbolPart::LowHigh,
            &[-2, 0, 3],
            16,
            128,
        )
        .unwrap();
        assert!(dev <= 1e-10, "deviation {dev}");
        let dev0 =
            verify_scale_uniformity(&SymbolDescriptor::C1Indicator, SymbolPart::LowHigh, &[0], 16, 128)
                .unwrap();
        assert_eq!(dev0, 0.0);
    }
}
