//! Littlewood-Paley windows and L^2-normalized wave packets.
//!
//! Everything descends from one smooth even cutoff `theta`: identically 1
//! on `|x| <= 1/2`, identically 0 on `|x| >= 1`, built from the standard
//! `exp(-1/t)` transition.  The band window `psi_hat(x) = theta(x/2) -
//! theta(x)` is supported on `1/2 <= |x| <= 2` and telescopes into a
//! partition of unity across dyadic scales.
//!
//! Wave packets adapted to a dyadic interval `I` use the same profiles:
//! a phi packet has the symmetric spectrum `theta(|I| xi)`, a psi packet
//! the one-sided spectrum `psi_hat(|I| xi) 1_{xi > 0}`, both translated
//! to the interval center by a phase and normalized to unit L^2 norm on
//! the grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dyadic::DyadicInterval;
use crate::error::{CoreError, Result};
use crate::grid::{Grid, SampledFunction, Side};

/// `exp(-1/t)` for positive `t`, zero otherwise.
fn decay(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth monotone step: 0 for `t <= 0`, 1 for `t >= 1`.
pub fn transition(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = decay(t);
        a / (a + decay(1.0 - t))
    }
}

/// Even cutoff: 1 on `|x| <= 1/2`, 0 on `|x| >= 1`, smooth in between.
pub fn theta(x: f64) -> f64 {
    transition(2.0 - 2.0 * x.abs())
}

/// Band window `theta(x/2) - theta(x)`, supported on `1/2 <= |x| <= 2`.
pub fn psi_hat(x: f64) -> f64 {
    theta(0.5 * x) - theta(x)
}

/// `psi_hat` of the dyadic rescaling: supported on `2^{k-1} <= |xi| <= 2^{k+1}`.
pub fn psi_hat_scale(k: i32, xi: f64) -> f64 {
    psi_hat(xi / (k as f64).exp2())
}

/// Low-pass companion `sum_{j<k} psi_hat_scale(j, .) = theta(xi / 2^k)`
/// away from the origin (and 1 there).
pub fn phi_hat_scale(k: i32, xi: f64) -> f64 {
    theta(xi / (k as f64).exp2())
}

/// Bump flavors of the two support geometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BumpType {
    /// Spectrum in a symmetric interval around the origin.
    Phi,
    /// Spectrum in an interval separated from the origin by a comparable
    /// distance.
    Psi,
}

/// A frequency-side bump profile: either one window of a Littlewood-Paley
/// partition (from [`make_lp_family`]) or a normalized wave packet
/// adapted to a shifted dyadic interval (from [`BumpFamily::packet`]).
#[derive(Debug, Clone)]
pub struct BumpFamily {
    pub bump_type: BumpType,
    /// Dyadic scale exponent.  For partition windows the band is
    /// `|xi| ~ 2^scale`; for packets the interval length is `2^scale`.
    pub scale: i32,
    pub shift: i64,
    /// Frequency-side samples on the grid lattice.
    pub profile: SampledFunction,
    /// Enclosing interval of the positive-frequency support (mirrored for
    /// two-sided windows).
    pub fourier_support: (f64, f64),
}

/// Littlewood-Paley band windows `psi_hat_scale(k, .)` for
/// `k_min <= k <= k_max`, sampled on the grid's frequency lattice.
///
/// Their sum is exactly 1 on the annulus `2^{k_min} <= |xi| <= 2^{k_max}`.
pub fn make_lp_family(k_min: i32, k_max: i32, grid: Grid) -> Result<Vec<BumpFamily>> {
    if k_min > k_max {
        return Err(CoreError::ScaleOutOfRange(k_min));
    }
    // lowest band must clear the frequency spacing, highest must fit
    // under the Nyquist frequency
    if (k_min as f64 - 1.0).exp2() < grid.freq_spacing() {
        return Err(CoreError::ScaleOutOfRange(k_min));
    }
    if (k_max as f64 + 1.0).exp2() > 0.5 / grid.spacing() {
        return Err(CoreError::ScaleOutOfRange(k_max));
    }
    Ok((k_min..=k_max)
        .map(|k| {
            let profile = SampledFunction {
                grid,
                values: grid
                    .frequencies()
                    .map(|xi| Complex64::new(psi_hat_scale(k, xi), 0.0))
                    .collect(),
                side: Side::Frequency,
            };
            BumpFamily {
                bump_type: BumpType::Psi,
                scale: k,
                shift: 0,
                profile,
                fourier_support: ((k as f64 - 1.0).exp2(), (k as f64 + 1.0).exp2()),
            }
        })
        .collect())
}

/// Precomputed frequency band of the packets at one scale: the envelope
/// values on the occupied lattice slots and the shared normalization.
///
/// Packets at the same scale differ only by the translation phase
/// `e^{-2 pi i c xi}`, so inner products, synthesis, and accumulation all
/// reduce to short sums over the band.
#[derive(Debug, Clone)]
pub struct PacketBand {
    pub grid: Grid,
    pub bump_type: BumpType,
    /// Interval length `2^scale`.
    pub scale: i32,
    /// Occupied lattice slots.
    slots: Vec<usize>,
    /// Normalized envelope values on those slots.
    envelope: Vec<f64>,
    support: (f64, f64),
}

impl PacketBand {
    /// Build the band for packets adapted to intervals of length `2^scale`.
    ///
    /// Representable scales satisfy `4h <= 2^scale <= L`.
    pub fn new(grid: Grid, bump_type: BumpType, scale: i32) -> Result<Self> {
        let len = (scale as f64).exp2();
        if len < 4.0 * grid.spacing() || len > grid.half_width() {
            return Err(CoreError::ScaleOutOfRange(scale));
        }
        let raw = |xi: f64| -> f64 {
            match bump_type {
                BumpType::Phi => theta(len * xi),
                BumpType::Psi => {
                    if xi > 0.0 {
                        psi_hat(len * xi)
                    } else {
                        0.0
                    }
                }
            }
        };
        let mut slots = Vec::new();
        let mut envelope = Vec::new();
        for i in 0..grid.len() {
            let v = raw(grid.frequency(i));
            if v != 0.0 {
                slots.push(i);
                envelope.push(v);
            }
        }
        let norm_sq: f64 = envelope.iter().map(|v| v * v).sum::<f64>() * grid.freq_spacing();
        let inv = 1.0 / norm_sq.sqrt();
        for v in &mut envelope {
            *v *= inv;
        }
        let support = match bump_type {
            BumpType::Phi => (-1.0 / len, 1.0 / len),
            BumpType::Psi => (0.5 / len, 2.0 / len),
        };
        Ok(PacketBand {
            grid,
            bump_type,
            scale,
            slots,
            envelope,
            support,
        })
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// `<g, packet centered at c>` from the spectrum of `g`, by the
    /// Plancherel sum over the band.
    pub fn inner_from_spectrum(&self, g_hat: &SampledFunction, center: f64) -> Complex64 {
        let w = self.grid.freq_spacing();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&i, &b) in self.slots.iter().zip(&self.envelope) {
            let xi = self.grid.frequency(i);
            // conj(B e^{-2 pi i c xi}) = B e^{+2 pi i c xi}
            let phase = Complex64::from_polar(1.0, 2.0 * PI * center * xi);
            acc += g_hat.values[i] * b * phase;
        }
        acc * w
    }

    /// Add `coeff * packet(center)` into an output spectrum.
    pub fn accumulate_into_spectrum(
        &self,
        out_hat: &mut SampledFunction,
        center: f64,
        coeff: Complex64,
    ) {
        for (&i, &b) in self.slots.iter().zip(&self.envelope) {
            let xi = self.grid.frequency(i);
            let phase = Complex64::from_polar(1.0, -2.0 * PI * center * xi);
            out_hat.values[i] += coeff * b * phase;
        }
    }

    /// Frequency-side samples of the packet centered at `c`.
    pub fn spectrum(&self, center: f64) -> SampledFunction {
        let mut out = SampledFunction::zeros(self.grid, Side::Frequency);
        self.accumulate_into_spectrum(&mut out, center, Complex64::new(1.0, 0.0));
        out
    }

    /// Space-side samples of the packet centered at `c`.
    pub fn synthesize(&self, center: f64) -> Result<SampledFunction> {
        self.spectrum(center).to_space()
    }
}

impl BumpFamily {
    /// The normalized wave packet adapted to `interval.shift(shift)`.
    pub fn packet(
        grid: Grid,
        bump_type: BumpType,
        interval: DyadicInterval,
        shift: i64,
    ) -> Result<Self> {
        let band = PacketBand::new(grid, bump_type, interval.scale)?;
        let target = interval.shift(shift);
        let profile = band.spectrum(target.center());
        Ok(BumpFamily {
            bump_type,
            scale: interval.scale,
            shift,
            profile,
            fourier_support: band.support(),
        })
    }

    /// Discrete L^2 norm of the profile (should be 1 for packets).
    pub fn l2_norm(&self) -> f64 {
        self.profile.l2_norm()
    }
}
