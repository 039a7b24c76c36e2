//! Uniform sampling grids and the discrete Fourier calculus on them.
//!
//! A [`Grid`] covers `[-L, L]` with `N` (power of two) samples at spacing
//! `h = 2L/N`.  Space-side functions are sampled at `x_j = -L + j h`;
//! frequency-side functions live on the lattice `xi_m = m / (2L)` for
//! `m = -N/2 .. N/2 - 1`.  The forward transform realizes the continuous
//! Fourier integral
//!
//! ```text
//! fhat(xi_m) = h * sum_j f(x_j) e^{-2 pi i x_j xi_m}
//! ```
//!
//! so that Plancherel holds between the weighted norms
//! `h * sum |f|^2 = (1/2L) * sum |fhat|^2` up to rounding.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::sync::Arc;

use crate::error::{CoreError, Result};

/// Which side of the Fourier transform a sample vector lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Space,
    Frequency,
}

/// Transform direction for [`dft`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Uniform grid on `[-L, L]` with a power-of-two number of samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    half_width: f64,
    n: usize,
}

/// Checked constructor for [`Grid`].
pub fn make_grid(half_width: f64, n: usize) -> Result<Grid> {
    Grid::new(half_width, n)
}

impl Grid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(CoreError::BadHalfWidth(half_width));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(CoreError::BadSampleCount(n));
        }
        Ok(Grid { half_width, n })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample spacing `h = 2L/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Frequency lattice spacing `1/(2L)`.
    pub fn freq_spacing(&self) -> f64 {
        1.0 / (2.0 * self.half_width)
    }

    /// `x_j = -L + j h`.
    pub fn point(&self, j: usize) -> f64 {
        -self.half_width + self.spacing() * j as f64
    }

    /// Frequency of slot `i`, namely `(i - N/2) / (2L)`.
    pub fn frequency(&self, i: usize) -> f64 {
        (i as i64 - (self.n / 2) as i64) as f64 * self.freq_spacing()
    }

    /// Signed lattice index of slot `i` (`-N/2 ..= N/2-1`).
    pub fn freq_index(&self, i: usize) -> i64 {
        i as i64 - (self.n / 2) as i64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.point(j))
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.frequency(i))
    }

    /// Grid slot containing the point `x` (clamped to the domain).
    pub fn slot_of(&self, x: f64) -> usize {
        let j = ((x + self.half_width) / self.spacing()).floor() as i64;
        j.clamp(0, self.n as i64 - 1) as usize
    }

    /// True when both `L` and `h` are powers of two, so that dyadic
    /// intervals align exactly with grid cells.
    pub fn is_dyadic(&self) -> bool {
        is_power_of_two_f64(self.half_width) && is_power_of_two_f64(self.spacing())
    }
}

fn is_power_of_two_f64(x: f64) -> bool {
    x > 0.0 && x.is_finite() && x.log2().fract() == 0.0 && x == x.log2().round().exp2()
}

/// Samples of a function on a [`Grid`], tagged with the side it lives on.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub side: Side,
}

impl SampledFunction {
    pub fn zeros(grid: Grid, side: Side) -> Self {
        SampledFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            side,
        }
    }

    /// Sample a real-valued function on the space side.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().map(|x| Complex64::new(f(x), 0.0)).collect();
        SampledFunction {
            grid,
            values,
            side: Side::Space,
        }
    }

    pub fn from_complex_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().map(f).collect();
        SampledFunction {
            grid,
            values,
            side: Side::Space,
        }
    }

    pub fn from_values(grid: Grid, side: Side, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(CoreError::GridMismatch);
        }
        Ok(SampledFunction { grid, side, values })
    }

    /// L2 norm with the natural measure of the side (`h` in space,
    /// `1/(2L)` in frequency).
    pub fn l2_norm(&self) -> f64 {
        let w = match self.side {
            Side::Space => self.grid.spacing(),
            Side::Frequency => self.grid.freq_spacing(),
        };
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * w).sqrt()
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn to_frequency(&self) -> Result<SampledFunction> {
        dft(self, Direction::Forward)
    }

    pub fn to_space(&self) -> Result<SampledFunction> {
        dft(self, Direction::Inverse)
    }
}

fn plan(n: usize, dir: Direction) -> Arc<dyn rustfft::Fft<f64>> {
    let mut planner = FftPlanner::new();
    match dir {
        Direction::Forward => planner.plan_fft_forward(n),
        Direction::Inverse => planner.plan_fft_inverse(n),
    }
}

/// Discrete Fourier transform realizing the continuous-integral convention.
///
/// Forward requires a space-side input and produces the frequency side;
/// inverse goes the other way.  A forward-then-inverse round trip is the
/// identity up to rounding.
pub fn dft(f: &SampledFunction, direction: Direction) -> Result<SampledFunction> {
    let expected = match direction {
        Direction::Forward => Side::Space,
        Direction::Inverse => Side::Frequency,
    };
    if f.side != expected {
        return Err(CoreError::SideMismatch {
            expected,
            got: f.side,
        });
    }
    let n = f.grid.len();
    let half = (n / 2) as i64;
    match direction {
        Direction::Forward => {
            let mut buf = f.values.clone();
            plan(n, Direction::Forward).process(&mut buf);
            let h = f.grid.spacing();
            // fhat(xi_m) = h (-1)^m FFT[f][m mod N], slot i holds m = i - N/2
            let values = (0..n)
                .map(|i| {
                    let m = i as i64 - half;
                    let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    buf[m.rem_euclid(n as i64) as usize] * (h * sign)
                })
                .collect();
            Ok(SampledFunction {
                grid: f.grid,
                values,
                side: Side::Frequency,
            })
        }
        Direction::Inverse => {
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            for i in 0..n {
                let m = i as i64 - half;
                let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                buf[m.rem_euclid(n as i64) as usize] = f.values[i] * sign;
            }
            plan(n, Direction::Inverse).process(&mut buf);
            let scale = f.grid.freq_spacing();
            let values = buf.into_iter().map(|z| z * scale).collect();
            Ok(SampledFunction {
                grid: f.grid,
                values,
                side: Side::Space,
            })
        }
    }
}

/// Riemann-sum L^p norm `(h * sum |f|^p)^{1/p}`; the max norm for `p = inf`.
pub fn lp_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    if f.side != Side::Space {
        return Err(CoreError::SideMismatch {
            expected: Side::Space,
            got: f.side,
        });
    }
    if !(p > 0.0) {
        return Err(CoreError::BadExponent(p));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let h = f.grid.spacing();
    let sum: f64 = f.values.iter().map(|z| z.norm().powf(p)).sum();
    Ok((h * sum).powf(1.0 / p))
}

/// Pointwise product in space.
pub fn pointwise_product(f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    if f.grid != g.grid {
        return Err(CoreError::GridMismatch);
    }
    let values = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a * b)
        .collect();
    SampledFunction::from_values(f.grid, Side::Space, values)
}

/// Grid inner product `h * sum f conj(g)` (space side).
pub fn inner_product(f: &SampledFunction, g: &SampledFunction) -> Result<Complex64> {
    if f.grid != g.grid {
        return Err(CoreError::GridMismatch);
    }
    let h = f.grid.spacing();
    Ok(f.values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a * b.conj())
        .sum::<Complex64>()
        * h)
}

/// Periodic spectral Hilbert transform on the grid itself: multiply the
/// spectrum by `-i sgn(xi)` (with `sgn(0) = 0`).
pub fn hilbert_periodic(f: &SampledFunction) -> Result<SampledFunction> {
    let mut fh = f.to_frequency()?;
    for (i, v) in fh.values.iter_mut().enumerate() {
        let xi = fh.grid.frequency(i);
        let s = if xi > 0.0 {
            1.0
        } else if xi < 0.0 {
            -1.0
        } else {
            0.0
        };
        *v *= Complex64::new(0.0, -s);
    }
    fh.to_space()
}

/// Spectral realization of the Hilbert transform of the real line.
///
/// The grid transform is circular, so the input is zero-padded onto a
/// domain `pad` times wider (same spacing) before the multiplier is
/// applied; the result is cropped back.  For functions supported well
/// inside the grid this suppresses the wrap-around tails of the output.
pub fn hilbert_line(f: &SampledFunction, pad: usize) -> Result<SampledFunction> {
    if f.side != Side::Space {
        return Err(CoreError::SideMismatch {
            expected: Side::Space,
            got: f.side,
        });
    }
    let pad = pad.max(1).next_power_of_two();
    let n = f.grid.len();
    let big_grid = Grid::new(f.grid.half_width() * pad as f64, n * pad)?;
    let mut big = SampledFunction::zeros(big_grid, Side::Space);
    let ofs = (pad - 1) * n / 2;
    big.values[ofs..ofs + n].copy_from_slice(&f.values);
    let out = hilbert_periodic(&big)?;
    SampledFunction::from_values(f.grid, Side::Space, out.values[ofs..ofs + n].to_vec())
}

/// Band-limited random real function with spectrum in `|m| <= band`
/// (lattice index), drawn from the given RNG.
pub fn random_band_limited(
    grid: Grid,
    band: usize,
    rng: &mut impl rand::Rng,
) -> Result<SampledFunction> {
    let n = grid.len();
    let band = band.min(n / 2 - 1);
    let mut fh = SampledFunction::zeros(grid, Side::Frequency);
    let half = n / 2;
    for m in 1..=band {
        let re = rng.random_range(-1.0..1.0);
        let im = rng.random_range(-1.0..1.0);
        let z = Complex64::new(re, im);
        fh.values[half + m] = z;
        fh.values[half - m] = z.conj();
    }
    fh.values[half] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
    fh.to_space()
}
