//! Geometry, power budgets, and Rayleigh-faded channel realizations.
//!
//! Large-scale attenuation is `d^{-exponent/2}` in amplitude (exponent 3 by
//! default); small-scale fading is i.i.d. unit-variance circularly-symmetric
//! complex Gaussian. Channel reciprocity means `h_DR` is the same vector as
//! `h_RD` used in row orientation, so only `h_RS` and `h_RD` are stored.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::scalar::Real;

pub const DEFAULT_PATH_LOSS_EXPONENT: f64 = 3.0;

/// Node placement on the D–R–S line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry<T> {
    d_ds: T,
    ratio_dr: T,
}

impl<T: Real> Geometry<T> {
    /// `d_ds` in meters; `ratio_dr = d_DR / d_DS` strictly inside (0, 1).
    pub fn new(d_ds: T, ratio_dr: T) -> Result<Self> {
        if !(d_ds > T::zero()) || !d_ds.is_finite() {
            return Err(Error::Domain(format!("d_DS must be positive, got {d_ds}")));
        }
        if !(ratio_dr > T::zero() && ratio_dr < T::one()) {
            return Err(Error::Domain(format!("d_DR/d_DS must lie in (0, 1), got {ratio_dr}")));
        }
        Ok(Self { d_ds, ratio_dr })
    }

    pub fn d_ds(&self) -> T {
        self.d_ds
    }

    pub fn ratio_dr(&self) -> T {
        self.ratio_dr
    }

    pub fn d_dr(&self) -> T {
        self.ratio_dr * self.d_ds
    }

    pub fn d_rs(&self) -> T {
        self.d_ds - self.d_dr()
    }

    pub fn with_ratio(&self, ratio_dr: T) -> Result<Self> {
        Self::new(self.d_ds, ratio_dr)
    }
}

/// Transmit budgets at the destination (energy flow) and source, in watts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerBudget<T> {
    pub p_d: T,
    pub p_s: T,
}

impl<T: Real> PowerBudget<T> {
    pub fn new(p_d: T, p_s: T) -> Result<Self> {
        if !(p_d >= T::zero()) || !p_d.is_finite() {
            return Err(Error::Domain(format!("P_D must be nonnegative, got {p_d}")));
        }
        if !(p_s > T::zero()) || !p_s.is_finite() {
            return Err(Error::Domain(format!("P_S must be positive, got {p_s}")));
        }
        Ok(Self { p_d, p_s })
    }

    /// Same source budget with the energy flow switched off.
    pub fn without_energy_flow(&self) -> Self {
        Self {
            p_d: T::zero(),
            p_s: self.p_s,
        }
    }
}

/// Receiver noise power (watts), shared by the relay ID chain and the destination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel<T> {
    pub sigma_n_sq: T,
}

impl<T: Real> NoiseModel<T> {
    pub fn new(sigma_n_sq: T) -> Result<Self> {
        if !(sigma_n_sq > T::zero()) || !sigma_n_sq.is_finite() {
            return Err(Error::Domain(format!(
                "noise variance must be positive, got {sigma_n_sq}"
            )));
        }
        Ok(Self { sigma_n_sq })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathLoss<T> {
    pub exponent: T,
}

impl<T: Real> Default for PathLoss<T> {
    fn default() -> Self {
        Self {
            exponent: T::lit(DEFAULT_PATH_LOSS_EXPONENT),
        }
    }
}

impl<T: Real> PathLoss<T> {
    pub fn amplitude(&self, d: T) -> Result<T> {
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::Domain(format!("distance must be positive, got {d}")));
        }
        Ok(d.powf(-self.exponent / T::lit(2.0)))
    }
}

/// `d^{-3/2}`
pub fn path_loss_amplitude<T: Real>(d: T) -> Result<T> {
    PathLoss::default().amplitude(d)
}

/// One Monte Carlo draw of the relay's channels.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization<T> {
    h_rs: Vector<T>,
    h_rd: Vector<T>,
}

impl<T: Real> ChannelRealization<T> {
    pub fn new(h_rs: Vector<T>, h_rd: Vector<T>) -> Result<Self> {
        if h_rs.len() != h_rd.len() || h_rs.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "h_RS has {} antennas, h_RD has {}",
                h_rs.len(),
                h_rd.len()
            )));
        }
        if !h_rs.is_finite() || !h_rd.is_finite() {
            return Err(Error::InvalidInput("channel entries must be finite".into()));
        }
        Ok(Self { h_rs, h_rd })
    }

    pub fn antennas(&self) -> usize {
        self.h_rs.len()
    }

    pub fn h_rs(&self) -> &Vector<T> {
        &self.h_rs
    }

    pub fn h_rd(&self) -> &Vector<T> {
        &self.h_rd
    }

    /// Relay-to-destination channel; identical entries to `h_RD` by reciprocity.
    pub fn h_dr(&self) -> &Vector<T> {
        &self.h_rd
    }

    /// First `r` antennas of a larger realization.
    pub fn truncated(&self, r: usize) -> Result<Self> {
        if r == 0 || r > self.antennas() {
            return Err(Error::InvalidInput(format!(
                "cannot keep {r} of {} antennas",
                self.antennas()
            )));
        }
        Self::new(
            Vector::from_vec(self.h_rs.as_slice()[..r].to_vec()),
            Vector::from_vec(self.h_rd.as_slice()[..r].to_vec()),
        )
    }
}

/// `r` i.i.d. CN(0, 1) entries.
pub fn sample_small_scale<T, R>(r: usize, rng: &mut R) -> Vector<T>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let half = T::lit(0.5).sqrt();
    Vector::from_vec(
        (0..r)
            .map(|_| {
                let re: T = StandardNormal.sample(rng);
                let im: T = StandardNormal.sample(rng);
                Complex::new(re * half, im * half)
            })
            .collect(),
    )
}

/// Draws `h_RS` then `h_RD` from one generator.
pub fn realize_channels<T, R>(geom: &Geometry<T>, r: usize, rng: &mut R) -> Result<ChannelRealization<T>>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    realize_channels_with(geom, &PathLoss::default(), r, rng)
}

pub fn realize_channels_with<T, R>(
    geom: &Geometry<T>,
    path_loss: &PathLoss<T>,
    r: usize,
    rng: &mut R,
) -> Result<ChannelRealization<T>>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    if r == 0 {
        return Err(Error::InvalidInput("antenna count must be at least 1".into()));
    }
    let a_rs = path_loss.amplitude(geom.d_rs())?;
    let a_dr = path_loss.amplitude(geom.d_dr())?;
    let h_rs = sample_small_scale::<T, R>(r, rng).scale(a_rs);
    let h_rd = sample_small_scale::<T, R>(r, rng).scale(a_dr);
    ChannelRealization::new(h_rs, h_rd)
}

/// Named sub-streams of the counter-based generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    SourceRelay = 0,
    DestinationRelay = 1,
    Oracle = 2,
}

const STREAM_TAG_BITS: u32 = 8;

/// Seeded generator handing out independent ChaCha streams keyed by
/// `(trial, link)`. A trial's channels depend only on the master seed and the
/// trial index, so every sweep point and protocol variant can replay them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamSampler {
    master_seed: u64,
}

impl StreamSampler {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream(&self, trial: u64, link: Stream) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream((trial << STREAM_TAG_BITS) | link as u64);
        rng
    }

    /// Channels for `trial`; a smaller `r` yields a prefix of a larger one.
    pub fn realize<T>(
        &self,
        trial: u64,
        geom: &Geometry<T>,
        path_loss: &PathLoss<T>,
        r: usize,
    ) -> Result<ChannelRealization<T>>
    where
        T: Real,
        StandardNormal: Distribution<T>,
    {
        if r == 0 {
            return Err(Error::InvalidInput("antenna count must be at least 1".into()));
        }
        let a_rs = path_loss.amplitude(geom.d_rs())?;
        let a_dr = path_loss.amplitude(geom.d_dr())?;
        let h_rs = sample_small_scale::<T, _>(r, &mut self.stream(trial, Stream::SourceRelay)).scale(a_rs);
        let h_rd = sample_small_scale::<T, _>(r, &mut self.stream(trial, Stream::DestinationRelay)).scale(a_dr);
        ChannelRealization::new(h_rs, h_rd)
    }
}
