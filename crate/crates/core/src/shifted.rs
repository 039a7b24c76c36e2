//! Shifted dyadic maximal and square functions, the Hardy-Littlewood
//! maximal function, the Calderon-Zygmund decomposition, and the
//! adversarial norm-growth measurement.
//!
//! All operators run over the finite dyadic tree representable on the
//! grid: scales from one cell up to half the domain, intervals that lie
//! entirely inside `[-L, L]` (intervals clipped by the boundary would
//! distort averages and are excluded).  This requires a dyadic grid:
//! both the spacing and the half-width must be powers of two.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bumps::{BumpType, PacketBand};
use crate::dyadic::DyadicInterval;
use crate::error::{CoreError, Result};
use crate::fit::{angle_bracket, fit_line};
use crate::grid::{lp_norm, Grid, SampledFunction, Side};

/// Decay exponent of the localization weight, as printed.
const WEIGHT_EXPONENT: i32 = 100;

/// Scales and positions of the dyadic tree representable on a grid.
#[derive(Debug, Clone, Copy)]
pub struct DyadicTree {
    grid: Grid,
    /// Cell scale: `h = 2^{k_min}`.
    pub k_min: i32,
    /// Half-domain scale: `L = 2^{k_max}`.
    pub k_max: i32,
}

impl DyadicTree {
    pub fn new(grid: Grid) -> Result<Self> {
        if !grid.is_dyadic() {
            return Err(CoreError::NonDyadicGrid);
        }
        let k_min = grid.spacing().log2().round() as i32;
        let k_max = grid.half_width().log2().round() as i32;
        Ok(DyadicTree { grid, k_min, k_max })
    }

    /// Number of grid cells per interval at scale `k`.
    pub fn cells(&self, k: i32) -> usize {
        1usize << (k - self.k_min)
    }

    /// Index range `n'` of the intervals at scale `k` inside the domain.
    pub fn index_range(&self, k: i32) -> std::ops::Range<i64> {
        let count = (2.0 * self.grid.half_width() / (k as f64).exp2()) as i64;
        (-count / 2)..(count / 2)
    }

    /// First grid slot of interval `(k, index)`.
    pub fn first_slot(&self, k: i32, index: i64) -> usize {
        let cells = self.cells(k) as i64;
        (index * cells + (self.grid.len() / 2) as i64) as usize
    }
}

fn abs_values(f: &SampledFunction) -> Vec<f64> {
    f.values.iter().map(|z| z.norm()).collect()
}

/// Prefix sums with a leading zero: `P[j] = sum_{i<j} v[i]`.
fn prefix(v: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(v.len() + 1);
    let mut acc = 0.0;
    p.push(0.0);
    for x in v {
        acc += x;
        p.push(acc);
    }
    p
}

/// Sum of `v` over the clipped slot range `[a, b)` via prefix sums.
fn window_sum(p: &[f64], a: i64, b: i64) -> f64 {
    let n = (p.len() - 1) as i64;
    let a = a.clamp(0, n) as usize;
    let b = b.clamp(0, n) as usize;
    if b <= a {
        0.0
    } else {
        p[b] - p[a]
    }
}

fn require_space(f: &SampledFunction) -> Result<()> {
    if f.side != Side::Space {
        return Err(CoreError::SideMismatch {
            expected: Side::Space,
            got: f.side,
        });
    }
    Ok(())
}

/// Sharp shifted maximal function: for each `x`, the sup over dyadic
/// `I` containing `x` of the plain average of `|f|` over the translate
/// `I_n` (zero extension outside the domain).
pub fn sharp_shifted_maximal(f: &SampledFunction, shift: i64) -> Result<SampledFunction> {
    require_space(f)?;
    let tree = DyadicTree::new(f.grid)?;
    let p = prefix(&abs_values(f));
    let n = f.grid.len();
    let mut best = vec![0.0f64; n];
    for k in tree.k_min..=tree.k_max {
        let cells = tree.cells(k) as i64;
        for index in tree.index_range(k) {
            let start = tree.first_slot(k, index) as i64;
            let shifted_start = start - shift * cells;
            let avg = window_sum(&p, shifted_start, shifted_start + cells) / cells as f64;
            let (a, b) = (start as usize, (start + cells) as usize);
            for slot in a..b {
                if avg > best[slot] {
                    best[slot] = avg;
                }
            }
        }
    }
    SampledFunction::from_values(
        f.grid,
        Side::Space,
        best.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    )
}

/// Localization weight `(1 + dist(u, [-1/2, 1/2]))^{-100}` in units of
/// the interval length.
fn chi_weight(u: f64) -> f64 {
    (1.0 + (u.abs() - 0.5).max(0.0)).powi(-WEIGHT_EXPONENT)
}

/// Shifted maximal function with the exponent-100 localization weight:
/// sup over dyadic `I` containing `x` of
/// `|I|^{-1} int |f(y)| (1 + dist(y, I_n)/|I_n|)^{-100} dy`,
/// the integral truncated to the grid domain.
pub fn shifted_maximal(f: &SampledFunction, shift: i64) -> Result<SampledFunction> {
    require_space(f)?;
    let tree = DyadicTree::new(f.grid)?;
    let av = abs_values(f);
    let n = f.grid.len() as i64;
    let h = f.grid.spacing();
    let mut best = vec![0.0f64; f.grid.len()];
    for k in tree.k_min..=tree.k_max {
        let cells = tree.cells(k) as i64;
        // weight in cell units around the shifted interval; below 1e-18
        // the tail cannot move any comparison at f64 precision
        let radius = (1.01 * cells as f64).ceil() as i64 + 1;
        let kernel: Vec<f64> = (-radius..=radius)
            .map(|d| {
                // cell d (relative to the interval start) has midpoint
                // offset (d + 1/2)/cells - 1/2 from the interval center
                let u = (d as f64 + 0.5) / cells as f64 - 0.5;
                chi_weight(u)
            })
            .collect();
        for index in tree.index_range(k) {
            let start = tree.first_slot(k, index) as i64;
            let shifted_start = start - shift * cells;
            let mut acc = 0.0;
            for (off, w) in kernel.iter().enumerate() {
                let j = shifted_start - radius + off as i64;
                if (0..n).contains(&j) {
                    acc += av[j as usize] * w;
                }
            }
            let value = acc * h / (cells as f64 * h);
            let (a, b) = (start as usize, (start + cells) as usize);
            for slot in a..b {
                if value > best[slot] {
                    best[slot] = value;
                }
            }
        }
    }
    SampledFunction::from_values(
        f.grid,
        Side::Space,
        best.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    )
}

/// Classical Hardy-Littlewood maximal function: exact sup over all grid
/// intervals containing each point, by an `O(N^2)` sweep.
pub fn hardy_littlewood_maximal(f: &SampledFunction) -> Result<SampledFunction> {
    require_space(f)?;
    let av = abs_values(f);
    let p = prefix(&av);
    let n = av.len();
    let best = (0..n)
        .into_par_iter()
        .fold(
            || vec![0.0f64; n],
            |mut best, a| {
                // suffix max over b of avg(a, b), walked from the right
                let mut run = f64::NEG_INFINITY;
                let mut suffix = vec![0.0f64; n - a];
                for b in (a + 1..=n).rev() {
                    let avg = (p[b] - p[a]) / (b - a) as f64;
                    if avg > run {
                        run = avg;
                    }
                    suffix[b - 1 - a] = run;
                }
                for j in a..n {
                    if suffix[j - a] > best[j] {
                        best[j] = suffix[j - a];
                    }
                }
                best
            },
        )
        .reduce(
            || vec![0.0f64; n],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    if b > *a {
                        *a = b;
                    }
                }
                x
            },
        );
    SampledFunction::from_values(
        f.grid,
        Side::Space,
        best.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    )
}

/// Shifted square function built from psi-type wave packets:
/// `(sum_I |<f, P_{I_n}>|^2 / |I| 1_I(x))^{1/2}` over all representable
/// tree intervals whose shifted translate stays inside the domain.
pub fn shifted_square(
    f: &SampledFunction,
    shift: i64,
    family: BumpType,
) -> Result<SampledFunction> {
    require_space(f)?;
    if family == BumpType::Phi {
        return Err(CoreError::PhiFamilyRejected);
    }
    let tree = DyadicTree::new(f.grid)?;
    let grid = f.grid;
    let n = grid.len();
    let fh = f.to_frequency()?;
    let mut sq = vec![0.0f64; n + 1]; // difference array
    // packet scales: 4h <= 2^k <= L
    for k in (tree.k_min + 2)..=tree.k_max {
        let band = PacketBand::new(grid, family, k)?;
        // <f, P_c> for all centers at this scale from one band-filtered
        // inverse transform, read off at the center slots
        let mut g_hat = SampledFunction::zeros(grid, Side::Frequency);
        for i in 0..n {
            g_hat.values[i] = fh.values[i];
        }
        let filtered = {
            let mut spec = band.spectrum(0.0);
            for i in 0..n {
                spec.values[i] = spec.values[i].conj() * g_hat.values[i];
            }
            spec.to_space()?
        };
        let cells = tree.cells(k) as i64;
        let inv_len = 1.0 / (k as f64).exp2();
        for index in tree.index_range(k) {
            let iv = DyadicInterval::new(k, index);
            let shifted = iv.shift(shift);
            if shifted.left() < -grid.half_width() || shifted.right() > grid.half_width() {
                continue;
            }
            let center_slot = grid.slot_of(shifted.center());
            let inner = filtered.values[center_slot];
            let start = tree.first_slot(k, index);
            let add = inner.norm_sqr() * inv_len;
            sq[start] += add;
            sq[start + cells as usize] -= add;
        }
    }
    let mut acc = 0.0;
    let values = (0..n)
        .map(|j| {
            acc += sq[j];
            Complex64::new(acc.max(0.0).sqrt(), 0.0)
        })
        .collect();
    SampledFunction::from_values(grid, Side::Space, values)
}

/// One Calderon-Zygmund decomposition `f = g + sum_J b_J` at level
/// `lambda`.
#[derive(Debug, Clone)]
pub struct CzResult {
    pub level: f64,
    /// Selected maximal dyadic intervals, pairwise disjoint.
    pub selected: Vec<DyadicInterval>,
    pub good: SampledFunction,
    /// Mean-zero bad parts, one per selected interval.
    pub bad: Vec<(DyadicInterval, SampledFunction)>,
    /// Total length of the selected intervals.
    pub omega_measure: f64,
    /// Set when a root interval itself was selected (no dyadic parent
    /// inside the domain, so the `2 lambda` average bound is not
    /// guaranteed).
    pub root_selected: bool,
}

/// Top-down selection of maximal dyadic intervals with average of `|f|`
/// strictly above `lambda`, then the good/bad split.
pub fn cz_decompose(f: &SampledFunction, lambda: f64) -> Result<CzResult> {
    require_space(f)?;
    if !(lambda > 0.0) {
        return Err(CoreError::BadLevel(lambda));
    }
    let tree = DyadicTree::new(f.grid)?;
    let av = abs_values(f);
    let p = prefix(&av);
    let mut selected = Vec::new();
    let mut root_selected = false;

    // iterative descent from the two root intervals [-L, 0], [0, L]
    let mut stack: Vec<(DyadicInterval, bool)> = vec![
        (DyadicInterval::new(tree.k_max, -1), true),
        (DyadicInterval::new(tree.k_max, 0), true),
    ];
    while let Some((iv, is_root)) = stack.pop() {
        let cells = tree.cells(iv.scale) as i64;
        let start = tree.first_slot(iv.scale, iv.index) as i64;
        let avg = window_sum(&p, start, start + cells) / cells as f64;
        if avg > lambda {
            selected.push(iv);
            root_selected |= is_root;
        } else if iv.scale > tree.k_min {
            let (a, b) = iv.children();
            stack.push((a, false));
            stack.push((b, false));
        }
    }
    selected.sort();

    let h = f.grid.spacing();
    let mut good = f.values.clone();
    let mut bad = Vec::with_capacity(selected.len());
    let mut omega = 0.0;
    for &iv in &selected {
        let cells = tree.cells(iv.scale);
        let start = tree.first_slot(iv.scale, iv.index);
        let mean = f.values[start..start + cells]
            .iter()
            .sum::<Complex64>()
            / cells as f64;
        let mut b_vals = vec![Complex64::new(0.0, 0.0); f.grid.len()];
        for j in start..start + cells {
            b_vals[j] = f.values[j] - mean;
            good[j] = mean;
        }
        bad.push((iv, SampledFunction::from_values(f.grid, Side::Space, b_vals)?));
        omega += iv.length();
    }
    let _ = h;
    Ok(CzResult {
        level: lambda,
        selected,
        good: SampledFunction::from_values(f.grid, Side::Space, good)?,
        bad,
        omega_measure: omega,
        root_selected,
    })
}

/// Which shifted operator a norm-growth table measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpKind {
    Maximal,
    Square,
}

impl OpKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OpKind::Maximal => "maximal",
            OpKind::Square => "square",
        }
    }
}

/// Fit record of the model `c0 + c1 log<n>`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LogFit {
    pub c0: f64,
    pub c1: f64,
    pub residual: f64,
}

/// Measured lower bounds on shifted-operator norms across shifts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormGrowthTable {
    pub kind: OpKind,
    pub p: f64,
    pub shifts: Vec<i64>,
    /// Per shift: max over the trial inputs of `|Op f|_p / |f|_p`.
    pub norms: Vec<f64>,
    pub fit: LogFit,
    /// Exponent of the power-law fit `norm ~ <n>^e`.
    pub power_exponent: f64,
}

/// Seeded adversarial input families: translated spikes, random dyadic
/// combs, indicator trains, and band-limited noise.
fn adversarial_input(grid: Grid, rng: &mut impl Rng, which: usize) -> SampledFunction {
    let n = grid.len();
    let mut vals = vec![Complex64::new(0.0, 0.0); n];
    match which % 4 {
        0 => {
            // unit spike in the central half
            let j = rng.random_range(n / 4..3 * n / 4);
            vals[j] = Complex64::new(1.0, 0.0);
        }
        1 => {
            // random +-1 comb on dyadic blocks of the central half
            let block = 1usize << rng.random_range(0..5);
            let mut j = n / 4;
            while j < 3 * n / 4 {
                let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                for l in j..(j + block).min(3 * n / 4) {
                    vals[l] = Complex64::new(s, 0.0);
                }
                j += block;
            }
        }
        2 => {
            // train of short indicators with dyadic spacing
            let width = 1usize << rng.random_range(0..3);
            let period = width << rng.random_range(1..5);
            let offset = rng.random_range(0..period);
            let mut j = n / 4 + offset;
            while j + width < 3 * n / 4 {
                for l in j..j + width {
                    vals[l] = Complex64::new(1.0, 0.0);
                }
                j += period;
            }
        }
        _ => {
            // band-limited noise, mostly for the square function
            let band = rng.random_range(4..n / 8);
            let f = crate::grid::random_band_limited(grid, band, rng)
                .expect("band-limited input");
            vals = f.values;
        }
    }
    SampledFunction {
        grid,
        values: vals,
        side: Side::Space,
    }
}

/// Adversarial lower bounds on `|Op^n|_{L^p -> L^p}` for each shift,
/// with the `c0 + c1 log<n>` fit and the power-law exponent.
///
/// Determinism: trial `t` draws from the stream `seed + t`, so the same
/// seed reproduces the table exactly.
pub fn measure_norm_growth(
    grid: Grid,
    kind: OpKind,
    p: f64,
    shifts: &[i64],
    trials: usize,
    seed: u64,
) -> Result<NormGrowthTable> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(CoreError::ExponentOutOfRange(p));
    }
    if trials == 0 {
        return Err(CoreError::NoTrials);
    }
    let mut shifts: Vec<i64> = shifts.to_vec();
    shifts.sort_unstable();
    shifts.dedup();

    let inputs: Vec<SampledFunction> = (0..trials)
        .map(|t| {
            let mut rng = crate::seeded_rng(seed, t as u64);
            let which = rng.random_range(0..4);
            adversarial_input(grid, &mut rng, which)
        })
        .collect();
    let input_norms: Vec<f64> = inputs
        .iter()
        .map(|f| lp_norm(f, p))
        .collect::<Result<_>>()?;

    let norms: Vec<f64> = shifts
        .par_iter()
        .map(|&shift| {
            let mut best = 0.0f64;
            for (f, &fnorm) in inputs.iter().zip(&input_norms) {
                if fnorm == 0.0 {
                    continue;
                }
                let out = match kind {
                    OpKind::Maximal => shifted_maximal(f, shift)?,
                    OpKind::Square => shifted_square(f, shift, BumpType::Psi)?,
                };
                let r = lp_norm(&out, p)? / fnorm;
                if r > best {
                    best = r;
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;

    let xs: Vec<f64> = shifts.iter().map(|&s| angle_bracket(s).ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|&v| v.max(f64::MIN_POSITIVE)).collect();
    let log_ys: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let (c1, c0, residual) = fit_line(&xs, &ys);
    let (power_exponent, _, _) = fit_line(&xs, &log_ys);
    Ok(NormGrowthTable {
        kind,
        p,
        shifts,
        norms,
        fit: LogFit { c0, c1, residual },
        power_exponent,
    })
}
