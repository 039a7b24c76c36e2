//! Bilinear multiplier application, adjoints, the kernel-side principal
//! value oracle, and the discrete model operator.
//!
//! The reference multiplier application is the exact double sum over the
//! frequency lattice,
//!
//! ```text
//! T_m(f,g)(x_j) = sum_{m1,m2} m(xi_{m1}, xi_{m2}) fhat[m1] ghat[m2]
//!                  e^{2 pi i x_j (xi_{m1}+xi_{m2})} / (2L)^2 ,
//! ```
//!
//! with the output bin `m1 + m2` folded modulo `N` (exact at grid
//! points).  The kernel-side commutator oracle integrates the truncated
//! singular integral directly with the inner average taken from the
//! discrete antiderivative; the two routes are tied together by the
//! normalization `C1(f, a) = -i pi T_m(f, a)` for the averaged-sign
//! symbol `m`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

use crate::bumps::{BumpType, PacketBand};
use crate::dyadic::DyadicInterval;
use crate::error::{CoreError, Result};
use crate::grid::{lp_norm, Grid, SampledFunction, Side};
use crate::symbols::{AdjointSlot, SymbolDescriptor};

/// The adjoint symbol `m(-x-y, y)` (star 1) or `m(x, -x-y)` (star 2).
pub fn adjoint_symbol(m: &SymbolDescriptor, slot: AdjointSlot) -> SymbolDescriptor {
    m.adjoint(slot)
}

fn require_space_pair(f: &SampledFunction, g: &SampledFunction) -> Result<()> {
    if f.grid != g.grid {
        return Err(CoreError::GridMismatch);
    }
    for side in [f.side, g.side] {
        if side != Side::Space {
            return Err(CoreError::SideMismatch {
                expected: Side::Space,
                got: side,
            });
        }
    }
    Ok(())
}

/// Exact double-frequency-sum application of a bilinear multiplier.
pub fn apply_multiplier(
    m: &SymbolDescriptor,
    f: &SampledFunction,
    g: &SampledFunction,
) -> Result<SampledFunction> {
    require_space_pair(f, g)?;
    let grid = f.grid;
    let n = grid.len();
    let fh = f.to_frequency()?;
    let gh = g.to_frequency()?;
    let w = grid.freq_spacing();

    // per-row accumulation into folded output bins, reduced across threads
    let spectrum = (0..n)
        .into_par_iter()
        .fold(
            || vec![Complex64::new(0.0, 0.0); n],
            |mut acc, i| {
                let xi1 = grid.frequency(i);
                let m1 = grid.freq_index(i);
                let fv = fh.values[i];
                if fv.norm_sqr() != 0.0 {
                    for j in 0..n {
                        let xi2 = grid.frequency(j);
                        let sym = m.eval(xi1, xi2);
                        if sym.norm_sqr() != 0.0 {
                            let s = m1 + grid.freq_index(j) + (n / 2) as i64;
                            let slot = s.rem_euclid(n as i64) as usize;
                            acc[slot] += sym * fv * gh.values[j] * w;
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![Complex64::new(0.0, 0.0); n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    SampledFunction::from_values(grid, Side::Frequency, spectrum)?.to_space()
}

/// Frequency-side realization of the first commutator: the averaged-sign
/// multiplier applied on a zero-padded grid (to suppress circular
/// wrap-around of the slowly decaying output) and scaled by `-i pi`.
pub fn c1_frequency_side(
    f: &SampledFunction,
    a: &SampledFunction,
    pad: usize,
) -> Result<SampledFunction> {
    require_space_pair(f, a)?;
    let grid = f.grid;
    let n = grid.len();
    let pad = pad.max(1).next_power_of_two();
    let scale = Complex64::new(0.0, -std::f64::consts::PI);
    if pad == 1 {
        let t = apply_multiplier(&SymbolDescriptor::C1Sgn, f, a)?;
        let values = t.values.into_iter().map(|z| z * scale).collect();
        return SampledFunction::from_values(grid, Side::Space, values);
    }
    let big_grid = Grid::new(grid.half_width() * pad as f64, n * pad)?;
    let ofs = (pad - 1) * n / 2;
    let mut fb = SampledFunction::zeros(big_grid, Side::Space);
    let mut ab = SampledFunction::zeros(big_grid, Side::Space);
    fb.values[ofs..ofs + n].copy_from_slice(&f.values);
    ab.values[ofs..ofs + n].copy_from_slice(&a.values);
    let t = apply_multiplier(&SymbolDescriptor::C1Sgn, &fb, &ab)?;
    let values = t.values[ofs..ofs + n].iter().map(|z| z * scale).collect();
    SampledFunction::from_values(grid, Side::Space, values)
}

/// Discrete trilinear form `Lambda(f1, f2, f3) = h sum T_m(f1,f2) f3`.
pub fn trilinear_form(
    m: &SymbolDescriptor,
    f1: &SampledFunction,
    f2: &SampledFunction,
    f3: &SampledFunction,
) -> Result<Complex64> {
    if f3.grid != f1.grid {
        return Err(CoreError::GridMismatch);
    }
    let t = apply_multiplier(m, f1, f2)?;
    let h = f1.grid.spacing();
    Ok(t.values
        .iter()
        .zip(&f3.values)
        .map(|(a, b)| a * b)
        .sum::<Complex64>()
        * h)
}

/// Truncation of the principal value integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationParams {
    /// Inner cutoff; must be at least the grid spacing.
    pub epsilon: f64,
}

impl TruncationParams {
    pub fn new(epsilon: f64) -> Self {
        TruncationParams { epsilon }
    }
}

/// Output of [`c1_pv_oracle`] with its truncation bookkeeping.
#[derive(Debug, Clone)]
pub struct PvOracleOutput {
    pub output: SampledFunction,
    /// Outer cutoff actually used.
    pub outer_cutoff: f64,
    /// Set when `1/epsilon` exceeded the domain and was clamped.
    pub outer_clamped: bool,
}

/// Kernel-side commutator: midpoint quadrature of
/// `-int_{eps<|t|<1/eps} [avg of a on (x, x+t)] f(x+t) dt/t`
/// on the symmetric integer-step grid `t = m h`.
///
/// The inner average is `(A(x+t) - A(x))/t` with `A` the trapezoid
/// antiderivative of the samples of `a`; `f` is extended by zero and `A`
/// by its end values.  An outer cutoff beyond the domain width `2L` is
/// clamped (flagged in the output): for functions supported inside the
/// domain the clamped range already covers every pair of grid points.
pub fn c1_pv_oracle(
    f: &SampledFunction,
    a: &SampledFunction,
    trunc: TruncationParams,
) -> Result<PvOracleOutput> {
    require_space_pair(f, a)?;
    let grid = f.grid;
    let h = grid.spacing();
    let n = grid.len();
    if trunc.epsilon < h {
        return Err(CoreError::EpsilonBelowSpacing {
            eps: trunc.epsilon,
            h,
        });
    }
    let full_outer = 1.0 / trunc.epsilon;
    let domain_width = 2.0 * grid.half_width();
    let outer_clamped = full_outer > domain_width;
    let outer = full_outer.min(domain_width);

    // trapezoid antiderivative of a
    let mut antider = vec![Complex64::new(0.0, 0.0); n];
    for j in 1..n {
        antider[j] = antider[j - 1] + (a.values[j - 1] + a.values[j]) * (0.5 * h);
    }
    let m_min = ((trunc.epsilon / h) - 1e-9).ceil().max(1.0) as i64;
    let m_max = ((outer / h) + 1e-9).floor() as i64;

    let a_at = |j: i64| -> Complex64 {
        if j < 0 {
            antider[0]
        } else if j >= n as i64 {
            antider[n - 1]
        } else {
            antider[j as usize]
        }
    };
    let f_at = |j: i64| -> Complex64 {
        if (0..n as i64).contains(&j) {
            f.values[j as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };

    let values: Vec<Complex64> = (0..n as i64)
        .into_par_iter()
        .map(|j| {
            let aj = a_at(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for m in m_min..=m_max {
                // h * [mean(x, x+t) f(x+t)/t + mean(x, x-t) f(x-t)/(-t)]
                // with t = m h collapses to 1/(m^2 h) * [...]
                let plus = (a_at(j + m) - aj) * f_at(j + m);
                let minus = (a_at(j - m) - aj) * f_at(j - m);
                acc += (plus + minus) / (m * m) as f64;
            }
            -acc / h
        })
        .collect();

    Ok(PvOracleOutput {
        output: SampledFunction::from_values(grid, Side::Space, values)?,
        outer_cutoff: outer,
        outer_clamped,
    })
}

/// Specification of the discrete model operator
/// `T(f, g) = sum_I |I|^{-1/2} <f, P1_{I_n1}> <g, P2_{I_n2}> P3_I`.
#[derive(Debug, Clone)]
pub struct ModelOperatorSpec {
    pub intervals: Vec<DyadicInterval>,
    pub shift1: i64,
    pub shift2: i64,
    /// Bump types of the three slots; at least two must be psi.
    pub types: [BumpType; 3],
}

impl ModelOperatorSpec {
    pub fn new(
        intervals: Vec<DyadicInterval>,
        shift1: i64,
        shift2: i64,
        types: [BumpType; 3],
    ) -> Result<Self> {
        let psi_count = types.iter().filter(|t| **t == BumpType::Psi).count();
        if psi_count < 2 {
            return Err(CoreError::TooFewPsiSlots(psi_count));
        }
        let mut seen = HashSet::new();
        for i in &intervals {
            if !seen.insert(*i) {
                return Err(CoreError::IntervalOutOfDomain {
                    left: i.left(),
                    right: i.right(),
                });
            }
        }
        Ok(ModelOperatorSpec {
            intervals,
            shift1,
            shift2,
            types,
        })
    }

    pub fn psi_count(&self) -> usize {
        self.types.iter().filter(|t| **t == BumpType::Psi).count()
    }
}

fn check_in_domain(grid: Grid, iv: DyadicInterval) -> Result<()> {
    let l = grid.half_width();
    if iv.left() < -l - 1e-12 || iv.right() > l + 1e-12 {
        return Err(CoreError::IntervalOutOfDomain {
            left: iv.left(),
            right: iv.right(),
        });
    }
    Ok(())
}

/// Apply the model operator as an exact finite sum over the collection.
pub fn apply_model_operator(
    spec: &ModelOperatorSpec,
    f: &SampledFunction,
    g: &SampledFunction,
) -> Result<SampledFunction> {
    require_space_pair(f, g)?;
    let grid = f.grid;
    let mut bands: HashMap<(BumpType, i32), PacketBand> = HashMap::new();
    for iv in &spec.intervals {
        check_in_domain(grid, *iv)?;
        check_in_domain(grid, iv.shift(spec.shift1))?;
        check_in_domain(grid, iv.shift(spec.shift2))?;
        for ty in spec.types {
            if let std::collections::hash_map::Entry::Vacant(e) = bands.entry((ty, iv.scale)) {
                e.insert(PacketBand::new(grid, ty, iv.scale)?);
            }
        }
    }
    let fh = f.to_frequency()?;
    let gh = g.to_frequency()?;
    let mut out_hat = SampledFunction::zeros(grid, Side::Frequency);
    for iv in &spec.intervals {
        let b1 = &bands[&(spec.types[0], iv.scale)];
        let b2 = &bands[&(spec.types[1], iv.scale)];
        let b3 = &bands[&(spec.types[2], iv.scale)];
        let ip1 = b1.inner_from_spectrum(&fh, iv.shift(spec.shift1).center());
        let ip2 = b2.inner_from_spectrum(&gh, iv.shift(spec.shift2).center());
        let coeff = ip1 * ip2 / iv.length().sqrt();
        b3.accumulate_into_spectrum(&mut out_hat, iv.center(), coeff);
    }
    out_hat.to_space()
}

/// Machine-readable record of one operator comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub op: String,
    pub grid: GridInfo,
    pub epsilon: f64,
    pub rel_l2_error: f64,
    pub linf_error: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridInfo {
    pub l: f64,
    pub n: usize,
}

impl GridInfo {
    pub fn of(grid: Grid) -> Self {
        GridInfo {
            l: grid.half_width(),
            n: grid.len(),
        }
    }
}

/// Relative L^2 and absolute sup distance between two space-side
/// functions (the first is the reference for the relative error).
pub fn error_pair(reference: &SampledFunction, other: &SampledFunction) -> Result<(f64, f64)> {
    if reference.grid != other.grid {
        return Err(CoreError::GridMismatch);
    }
    let diff = SampledFunction::from_values(
        reference.grid,
        Side::Space,
        reference
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect(),
    )?;
    let rel = lp_norm(&diff, 2.0)? / lp_norm(reference, 2.0)?.max(f64::MIN_POSITIVE);
    Ok((rel, diff.max_abs()))
}

/// Compare the frequency-side commutator against the kernel-side oracle.
pub fn compare_multiplier_vs_kernel(
    f: &SampledFunction,
    a: &SampledFunction,
    epsilon: f64,
    pad: usize,
) -> Result<ComparisonReport> {
    let freq = c1_frequency_side(f, a, pad)?;
    let kernel = c1_pv_oracle(f, a, TruncationParams::new(epsilon))?;
    let (rel, linf) = error_pair(&freq, &kernel.output)?;
    Ok(ComparisonReport {
        op: "c1_multiplier_vs_pv_kernel".into(),
        grid: GridInfo::of(f.grid),
        epsilon,
        rel_l2_error: rel,
        linf_error: linf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{hilbert_periodic, pointwise_product};
    use std::f64::consts::PI;

    fn gauss(grid: Grid) -> SampledFunction {
        SampledFunction::from_fn(grid, |x| (-PI * x * x).exp())
    }

    #[test]
    fn constant_symbol_is_pointwise_product() {
        let grid = Grid::new(8.0, 256).unwrap();
        let f = gauss(grid);
        let g = SampledFunction::from_fn(grid, |x| (-0.5 * x * x).exp() * (2.0 * x).cos());
        let t = apply_multiplier(&SymbolDescriptor::Constant(1.0), &f, &g).unwrap();
        let p = pointwise_product(&f, &g).unwrap();
        let err = t
            .values
            .iter()
            .zip(&p.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "err {err}");
    }

    #[test]
    fn separable_sign_factorizes_into_hilbert_product() {
        let grid = Grid::new(8.0, 256).unwrap();
        let f = gauss(grid);
        let g = SampledFunction::from_fn(grid, |x| (-0.4 * x * x).exp());
        let t = apply_multiplier(&SymbolDescriptor::SeparableSgn { axis: 0 }, &f, &g).unwrap();
        let hf = hilbert_periodic(&f).unwrap();
        let p = pointwise_product(&hf, &g).unwrap();
        let err = t
            .values
            .iter()
            .zip(&p.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "err {err}");
    }

    #[test]
    fn grid_mismatch_rejected() {
        let f = gauss(Grid::new(8.0, 256).unwrap());
        let g = gauss(Grid::new(8.0, 128).unwrap());
        assert!(matches!(
            apply_multiplier(&SymbolDescriptor::Constant(1.0), &f, &g),
            Err(CoreError::GridMismatch)
        ));
    }

    #[test]
    fn trilinear_is_pairing_with_output() {
        let grid = Grid::new(8.0, 128).unwrap();
        let f = gauss(grid);
        let a = SampledFunction::from_fn(grid, |x| (-0.3 * x * x).exp());
        let g = SampledFunction::from_fn(grid, |x| x * (-x * x).exp());
        let m = SymbolDescriptor::C1Sgn;
        let t = apply_multiplier(&m, &f, &a).unwrap();
        let h = grid.spacing();
        let direct: Complex64 = t
            .values
            .iter()
            .zip(&g.values)
            .map(|(x, y)| x * y)
            .sum::<Complex64>()
            * h;
        let lam = trilinear_form(&m, &f, &a, &g).unwrap();
        assert!((lam - direct).norm() < 1e-12);
    }

    #[test]
    fn constant_trilinear_matches_quadrature() {
        let grid = Grid::new(8.0, 128).unwrap();
        let f = gauss(grid);
        let g = SampledFunction::from_fn(grid, |x| (-0.7 * (x - 0.5) * (x - 0.5)).exp());
        let one = SampledFunction::from_fn(grid, |_| 1.0);
        let lam = trilinear_form(&SymbolDescriptor::Constant(1.0), &f, &g, &one).unwrap();
        let h = grid.spacing();
        let direct: Complex64 = f
            .values
            .iter()
            .zip(&g.values)
            .map(|(a, b)| a * b)
            .sum::<Complex64>()
            * h;
        assert!((lam - direct).norm() < 1e-10);
    }

    #[test]
    fn pv_oracle_zero_input() {
        let grid = Grid::new(8.0, 512).unwrap(); // h = 1/32, 1/h > 2L
        let zero = SampledFunction::zeros(grid, Side::Space);
        let a = SampledFunction::from_fn(grid, |_| 1.0);
        let out = c1_pv_oracle(&zero, &a, TruncationParams::new(grid.spacing())).unwrap();
        assert_eq!(out.output.max_abs(), 0.0);
        assert!(out.outer_clamped);
        assert_eq!(out.outer_cutoff, 16.0);
    }

    #[test]
    fn pv_oracle_antisymmetry_for_even_input() {
        let grid = Grid::new(8.0, 512).unwrap();
        let f = gauss(grid);
        let a = SampledFunction::from_fn(grid, |_| 1.0);
        let out = c1_pv_oracle(&f, &a, TruncationParams::new(grid.spacing()))
            .unwrap()
            .output;
        // x_j and -x_j are both grid points except at j = 0
        let n = grid.len();
        for j in 1..n {
            let v = out.values[j];
            let w = out.values[n - j];
            assert!(
                (v + w).norm() <= 1e-8 * (1.0 + v.norm()),
                "asymmetry at {}",
                grid.point(j)
            );
        }
    }

    #[test]
    fn pv_oracle_epsilon_guard() {
        let grid = Grid::new(8.0, 256).unwrap();
        let f = gauss(grid);
        let a = SampledFunction::from_fn(grid, |_| 1.0);
        assert!(matches!(
            c1_pv_oracle(&f, &a, TruncationParams::new(grid.spacing() / 2.0)),
            Err(CoreError::EpsilonBelowSpacing { .. })
        ));
        // epsilon large enough that 1/eps fits: no clamp flag
        let out = c1_pv_oracle(&f, &a, TruncationParams::new(0.25)).unwrap();
        assert!(!out.outer_clamped);
        assert!((out.outer_cutoff - 4.0).abs() < 1e-12);
    }

    #[test]
    fn model_operator_empty_collection() {
        let grid = Grid::new(16.0, 512).unwrap();
        let spec = ModelOperatorSpec::new(
            vec![],
            0,
            0,
            [BumpType::Phi, BumpType::Psi, BumpType::Psi],
        )
        .unwrap();
        let f = gauss(grid);
        let out = apply_model_operator(&spec, &f, &f).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn model_operator_single_interval_normalization() {
        let grid = Grid::new(16.0, 1024).unwrap();
        let iv = DyadicInterval::new(0, 1); // [1, 2]
        let types = [BumpType::Psi, BumpType::Psi, BumpType::Psi];
        let spec = ModelOperatorSpec::new(vec![iv], 2, -1, types).unwrap();
        let b1 = PacketBand::new(grid, BumpType::Psi, 0).unwrap();
        let f = b1.synthesize(iv.shift(2).center()).unwrap();
        let g = b1.synthesize(iv.shift(-1).center()).unwrap();
        let out = apply_model_operator(&spec, &f, &g).unwrap();
        let expect = b1.synthesize(iv.center()).unwrap();
        // |I|^{-1/2} <f,P1><g,P2> = 1 * 1 * 1
        let err = out
            .values
            .iter()
            .zip(&expect.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "err {err}");
    }

    #[test]
    fn model_operator_guards() {
        assert!(matches!(
            ModelOperatorSpec::new(vec![], 0, 0, [BumpType::Phi, BumpType::Phi, BumpType::Psi]),
            Err(CoreError::TooFewPsiSlots(1))
        ));
        let dup = DyadicInterval::new(0, 1);
        assert!(ModelOperatorSpec::new(
            vec![dup, dup],
            0,
            0,
            [BumpType::Psi, BumpType::Psi, BumpType::Psi]
        )
        .is_err());

        let grid = Grid::new(16.0, 1024).unwrap();
        let f = gauss(grid);
        let far = DyadicInterval::new(0, 40); // [40, 41] leaves [-16, 16]
        let spec = ModelOperatorSpec::new(
            vec![far],
            0,
            0,
            [BumpType::Psi, BumpType::Psi, BumpType::Psi],
        )
        .unwrap();
        assert!(matches!(
            apply_model_operator(&spec, &f, &f),
            Err(CoreError::IntervalOutOfDomain { .. })
        ));
    }
}
