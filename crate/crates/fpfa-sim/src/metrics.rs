//! Link quality and hardware cost metrics.

use std::fmt;
use std::str::FromStr;

use crate::channel::{BandSpec, CMatrix, CRow};
use crate::error::{Result, SimError};
use crate::port_select::stack_rows;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Reference noise temperature, K.
pub const NOISE_TEMPERATURE: f64 = 290.0;

/// Transmitter architectures under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// Frequency bands with per-band subarrays and movable-port receivers.
    Fpfa,
    /// Single band, full array, movable-port receivers.
    Pfa,
    /// Single band, full array, receivers pinned to one port.
    Fixed,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [Architecture::Fpfa, Architecture::Pfa, Architecture::Fixed];
}

impl FromStr for Architecture {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fpfa" => Ok(Self::Fpfa),
            "pfa" => Ok(Self::Pfa),
            "fixed" => Ok(Self::Fixed),
            other => Err(SimError::Config(format!(
                "unknown architecture '{other}' (expected fpfa, pfa or fixed)"
            ))),
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fpfa => "fpfa",
            Self::Pfa => "pfa",
            Self::Fixed => "fixed",
        })
    }
}

/// Per-component power draw of the transmit chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    pub phase_shifter_w: f64,
    pub rf_chain_w: f64,
    pub baseband_w: f64,
}

impl Default for PowerModel {
    fn default() -> Self {
        Self {
            phase_shifter_w: 0.042,
            rf_chain_w: 0.120,
            baseband_w: 0.200,
        }
    }
}

/// Thermal noise power over one band: k T B raised by the receiver noise
/// figure.
pub fn noise_power(band: &BandSpec, noise_figure_db: f64) -> f64 {
    BOLTZMANN * NOISE_TEMPERATURE * band.bandwidth_hz * 10f64.powf(noise_figure_db / 10.0)
}

/// Post-precoding SINR of every user in one group.
///
/// rows[u] is user u's channel at its selected port; digital column u is the
/// user's stream. Power amplitudes scale the streams, so user u receives
/// p_u^2 |h_u F f_u|^2 against the other streams' leakage plus noise.
pub fn sinr(
    rows: &[CRow],
    analog: &CMatrix,
    digital: &CMatrix,
    powers: &[f64],
    noise_w: f64,
) -> Result<Vec<f64>> {
    let users = rows.len();
    if users == 0 {
        return Err(SimError::Dimension("sinr over zero users".into()));
    }
    if digital.ncols() != users || powers.len() != users {
        return Err(SimError::Dimension(format!(
            "{users} rows against {} streams and {} powers",
            digital.ncols(),
            powers.len()
        )));
    }
    if analog.ncols() != digital.nrows() {
        return Err(SimError::Dimension(format!(
            "analog chains {} vs digital rows {}",
            analog.ncols(),
            digital.nrows()
        )));
    }
    if rows.iter().any(|r| r.len() != analog.nrows()) {
        return Err(SimError::Dimension(
            "channel row length differs from antenna count".into(),
        ));
    }
    // NaN fails this test too, unlike `<= 0.0` alone.
    if noise_w.is_nan() || noise_w <= 0.0 {
        return Err(SimError::Config(format!("noise power {noise_w} must be positive")));
    }

    // coupling[u][i]: what user u hears of stream i.
    let coupling = stack_rows(rows) * analog * digital;
    let mut out = Vec::with_capacity(users);
    for u in 0..users {
        let signal = powers[u].powi(2) * coupling[(u, u)].norm_sqr();
        let mut interference = 0.0;
        for i in 0..users {
            if i != u {
                interference += powers[i].powi(2) * coupling[(u, i)].norm_sqr();
            }
        }
        out.push(signal / (interference + noise_w));
    }
    Ok(out)
}

/// Sum spectral efficiency, bit/s/Hz.
pub fn sum_se(sinrs: &[f64]) -> f64 {
    sinrs.iter().map(|g| (1.0 + g).log2()).sum()
}

/// Static hardware power draw of one architecture.
///
/// The banded architecture runs per-band subarrays: U N_t / K phase
/// shifters, U / K RF chains and K baseband units. The single-band
/// architectures drive the whole array per user: U N_t shifters, U chains,
/// one baseband unit.
pub fn power_consumption(
    arch: Architecture,
    users: usize,
    antennas: usize,
    bands: usize,
    model: &PowerModel,
) -> f64 {
    let (u, nt) = (users as f64, antennas as f64);
    match arch {
        Architecture::Fpfa => {
            let k = bands as f64;
            model.phase_shifter_w * u * nt / k + model.rf_chain_w * u / k + model.baseband_w * k
        }
        Architecture::Pfa | Architecture::Fixed => {
            model.phase_shifter_w * u * nt + model.rf_chain_w * u + model.baseband_w
        }
    }
}

/// Sum spectral efficiency per watt of hardware power.
pub fn energy_efficiency(sum_se: f64, power_w: f64) -> f64 {
    sum_se / power_w
}

/// Outcome for one user in one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct UserReport {
    pub user: usize,
    pub band: usize,
    pub port: usize,
    /// False when the user was shed to keep its group invertible.
    pub served: bool,
    pub sinr: f64,
    pub se: f64,
}

/// Aggregate outcome of one architecture over one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkReport {
    pub architecture: Architecture,
    pub users: Vec<UserReport>,
    pub sum_se: f64,
    /// Bandwidth-weighted sum rate, bit/s.
    pub throughput_bps: f64,
    pub power_w: f64,
    pub energy_efficiency: f64,
    pub outages: usize,
}

impl LinkReport {
    /// Roll per-user results up into drop totals. `bandwidths[k]` is the
    /// bandwidth of band k in Hz.
    pub fn assemble(
        architecture: Architecture,
        users: Vec<UserReport>,
        power_w: f64,
        bandwidths: &[f64],
    ) -> Result<Self> {
        let mut sum = 0.0;
        let mut throughput = 0.0;
        let mut outages = 0;
        for u in &users {
            let b = bandwidths.get(u.band).ok_or_else(|| {
                SimError::Dimension(format!("user {} on unknown band {}", u.user, u.band))
            })?;
            sum += u.se;
            throughput += b * u.se;
            outages += usize::from(!u.served);
        }
        Ok(Self {
            architecture,
            users,
            sum_se: sum,
            throughput_bps: throughput,
            power_w,
            energy_efficiency: energy_efficiency(sum, power_w),
            outages,
        })
    }
}

impl fmt::Display for LinkReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:>5}: sum SE {:8.3} bit/s/Hz | throughput {:8.3} Gbit/s | power {:7.2} W | EE {:.4} bit/s/Hz/W | outages {}",
            self.architecture.to_string(),
            self.sum_se,
            self.throughput_bps / 1e9,
            self.power_w,
            self.energy_efficiency,
            self.outages
        )
    }
}
