//! Scenario configuration: a flat key=value file, every key overridable on
//! the command line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channel::{ArraySpec, BandSpec};
use crate::error::{Result, SimError};
use crate::metrics::Architecture;
use crate::port_select::UserOrder;

/// Quantity varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    TxPowerDbm,
    Users,
    Antennas,
}

impl FromStr for SweepAxis {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tx_power_dbm" => Ok(Self::TxPowerDbm),
            "users" => Ok(Self::Users),
            "antennas" => Ok(Self::Antennas),
            other => Err(SimError::Config(format!(
                "unknown sweep axis '{other}' (expected tx_power_dbm, users or antennas)"
            ))),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TxPowerDbm => "tx_power_dbm",
            Self::Users => "users",
            Self::Antennas => "antennas",
        })
    }
}

/// Full description of one simulated deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Band carriers in GHz, one subarray per band.
    pub band_centers_ghz: Vec<f64>,
    /// Bandwidth of each band as a fraction of its carrier.
    pub bandwidth_ratio: f64,
    /// Total BS antennas N_t.
    pub antennas: usize,
    /// Users per drop U.
    pub users: usize,
    /// Candidate ports per fluid antenna N.
    pub ports: usize,
    /// Port line length in carrier wavelengths.
    pub port_line_wavelengths: u32,
    /// Transmit power budget in dBm.
    pub tx_power_dbm: f64,
    /// Architectures evaluated per drop.
    pub architectures: Vec<Architecture>,
    /// Monte Carlo drops per sweep point.
    pub drops: usize,
    /// Base RNG seed; drop d uses seed + d.
    pub seed: u64,
    /// Minimum horizontal BS-user distance, metres.
    pub r_min_m: f64,
    /// Cell radius, metres.
    pub cell_radius_m: f64,
    /// Angular width of the coverage sector, degrees.
    pub sector_deg: f64,
    /// BS array height, metres.
    pub bs_height_m: f64,
    /// User antenna height, metres.
    pub user_height_m: f64,
    /// Propagation paths per user: 1 = LoS, 2 = LoS + ground bounce.
    pub paths: usize,
    /// Ground reflection coefficient magnitude.
    pub reflection_magnitude: f64,
    /// Ground reflection coefficient phase, degrees.
    pub reflection_phase_deg: f64,
    /// Receiver noise figure, dB.
    pub noise_figure_db: f64,
    /// Band the single-band architectures transmit on.
    pub pfa_band: usize,
    /// Order users lock in their ports.
    pub port_order: UserOrder,
    /// Quantity swept by the sweep command.
    pub sweep_axis: SweepAxis,
    /// Values visited along the sweep axis.
    pub sweep_values: Vec<f64>,
    /// Output directory for sweep artifacts.
    pub out_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            band_centers_ghz: vec![270.0, 300.0, 330.0, 360.0],
            bandwidth_ratio: 0.1,
            antennas: 128,
            users: 60,
            ports: 500,
            port_line_wavelengths: 15,
            tx_power_dbm: 20.0,
            architectures: Architecture::ALL.to_vec(),
            drops: 150,
            seed: 1,
            r_min_m: 1.0,
            cell_radius_m: 25.0,
            sector_deg: 120.0,
            bs_height_m: 20.0,
            user_height_m: 1.5,
            paths: 2,
            reflection_magnitude: 0.5,
            reflection_phase_deg: 180.0,
            noise_figure_db: 7.0,
            pfa_band: 1,
            port_order: UserOrder::NormDescending,
            sweep_axis: SweepAxis::TxPowerDbm,
            sweep_values: vec![10.0, 15.0, 20.0, 25.0, 30.0],
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse_scalar<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| SimError::Config(format!("key '{key}': bad value '{value}': {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    value.split(',').map(|v| parse_scalar(key, v)).collect()
}

impl ScenarioConfig {
    /// Read a key=value file on top of the defaults. Blank lines and lines
    /// starting with '#' are skipped; later keys override earlier ones.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut config = Self::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SimError::Config(format!("line {}: expected key=value, got '{line}'", lineno + 1))
            })?;
            self.apply_pair(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Set one configuration key from its textual form. Unknown keys are
    /// rejected rather than ignored.
    pub fn apply_pair(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "band_centers_ghz" => self.band_centers_ghz = parse_list(key, value)?,
            "bandwidth_ratio" => self.bandwidth_ratio = parse_scalar(key, value)?,
            "antennas" => self.antennas = parse_scalar(key, value)?,
            "users" => self.users = parse_scalar(key, value)?,
            "ports" => self.ports = parse_scalar(key, value)?,
            "port_line_wavelengths" => self.port_line_wavelengths = parse_scalar(key, value)?,
            "tx_power_dbm" => self.tx_power_dbm = parse_scalar(key, value)?,
            "architectures" => self.architectures = parse_list(key, value)?,
            "drops" => self.drops = parse_scalar(key, value)?,
            "seed" => self.seed = parse_scalar(key, value)?,
            "r_min_m" => self.r_min_m = parse_scalar(key, value)?,
            "cell_radius_m" => self.cell_radius_m = parse_scalar(key, value)?,
            "sector_deg" => self.sector_deg = parse_scalar(key, value)?,
            "bs_height_m" => self.bs_height_m = parse_scalar(key, value)?,
            "user_height_m" => self.user_height_m = parse_scalar(key, value)?,
            "paths" => self.paths = parse_scalar(key, value)?,
            "reflection_magnitude" => self.reflection_magnitude = parse_scalar(key, value)?,
            "reflection_phase_deg" => self.reflection_phase_deg = parse_scalar(key, value)?,
            "noise_figure_db" => self.noise_figure_db = parse_scalar(key, value)?,
            "pfa_band" => self.pfa_band = parse_scalar(key, value)?,
            "port_order" => self.port_order = parse_scalar(key, value)?,
            "sweep_axis" => self.sweep_axis = parse_scalar(key, value)?,
            "sweep_values" => self.sweep_values = parse_list(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            other => {
                return Err(SimError::Config(format!("unknown configuration key '{other}'")))
            }
        }
        Ok(())
    }

    /// Reject configurations the pipeline cannot run.
    pub fn validate(&self) -> Result<()> {
        let bail = |msg: String| Err(SimError::Config(msg));
        if self.band_centers_ghz.is_empty() {
            return bail("at least one band required".into());
        }
        if self.band_centers_ghz.iter().any(|&f| f <= 0.0) {
            return bail("band carriers must be positive".into());
        }
        if !(self.bandwidth_ratio > 0.0 && self.bandwidth_ratio < 2.0) {
            return bail(format!("bandwidth ratio {} out of (0, 2)", self.bandwidth_ratio));
        }
        if self.users == 0 || self.antennas == 0 || self.ports == 0 || self.drops == 0 {
            return bail("users, antennas, ports and drops must be positive".into());
        }
        let bands = self.band_centers_ghz.len();
        if !self.antennas.is_multiple_of(bands) {
            return bail(format!(
                "{} antennas not divisible into {bands} bands",
                self.antennas
            ));
        }
        if self.pfa_band >= bands {
            return bail(format!("pfa_band {} out of 0..{bands}", self.pfa_band));
        }
        if !(self.r_min_m > 0.0 && self.cell_radius_m > self.r_min_m) {
            return bail(format!(
                "drop radii {}..{} invalid",
                self.r_min_m, self.cell_radius_m
            ));
        }
        if !(self.sector_deg > 0.0 && self.sector_deg <= 360.0) {
            return bail(format!("sector {} degrees out of (0, 360]", self.sector_deg));
        }
        if !(self.user_height_m > 0.0 && self.bs_height_m > self.user_height_m) {
            return bail(format!(
                "heights bs {} m, user {} m need bs above user above ground",
                self.bs_height_m, self.user_height_m
            ));
        }
        if !(self.paths == 1 || self.paths == 2) {
            return bail(format!("paths {} unsupported (1 or 2)", self.paths));
        }
        if !(0.0..=1.0).contains(&self.reflection_magnitude) {
            return bail(format!(
                "reflection magnitude {} out of [0, 1]",
                self.reflection_magnitude
            ));
        }
        if self.noise_figure_db < 0.0 {
            return bail(format!("noise figure {} dB negative", self.noise_figure_db));
        }
        if self.architectures.is_empty() {
            return bail("no architectures selected".into());
        }
        for (i, a) in self.architectures.iter().enumerate() {
            if self.architectures[..i].contains(a) {
                return bail(format!("architecture {a} listed twice"));
            }
        }
        if self.architectures.contains(&Architecture::Fpfa)
            && self.fpfa_rf_chains() > self.antennas / bands
        {
            return bail(format!(
                "{} users need {} chains per band, subarray has only {} antennas",
                self.users,
                self.fpfa_rf_chains(),
                self.antennas / bands
            ));
        }
        if (self.architectures.contains(&Architecture::Pfa)
            || self.architectures.contains(&Architecture::Fixed))
            && self.users > self.antennas
        {
            return bail(format!(
                "{} users exceed {} antennas on the single-band architectures",
                self.users, self.antennas
            ));
        }
        if self.sweep_values.is_empty() {
            return bail("sweep_values must not be empty".into());
        }
        if matches!(self.sweep_axis, SweepAxis::Users | SweepAxis::Antennas) {
            for &v in &self.sweep_values {
                if v < 1.0 || v.fract() != 0.0 {
                    return bail(format!("sweep value {v} is not a positive integer"));
                }
            }
        }
        Ok(())
    }

    /// Band list with derived bandwidths.
    pub fn bands(&self) -> Vec<BandSpec> {
        self.band_centers_ghz
            .iter()
            .enumerate()
            .map(|(k, &ghz)| {
                let hz = ghz * 1.0e9;
                BandSpec::new(k, hz, self.bandwidth_ratio * hz)
            })
            .collect()
    }

    pub fn bandwidths(&self) -> Vec<f64> {
        self.bands().iter().map(|b| b.bandwidth_hz).collect()
    }

    /// RF chains per band, enough for an even user split.
    pub fn fpfa_rf_chains(&self) -> usize {
        self.users.div_ceil(self.band_centers_ghz.len())
    }

    /// Per-band subarray with the movable-port receiver line.
    pub fn fpfa_array(&self) -> Result<ArraySpec> {
        ArraySpec::new(
            self.antennas,
            self.band_centers_ghz.len(),
            self.fpfa_rf_chains(),
            self.ports,
            self.port_line_wavelengths,
        )
    }

    /// Whole array on one band, movable ports.
    pub fn pfa_array(&self) -> Result<ArraySpec> {
        ArraySpec::new(
            self.antennas,
            1,
            self.users,
            self.ports,
            self.port_line_wavelengths,
        )
    }

    /// Whole array on one band, receivers pinned to a single port.
    pub fn fixed_array(&self) -> Result<ArraySpec> {
        ArraySpec::new(self.antennas, 1, self.users, 1, self.port_line_wavelengths)
    }

    /// Band used by the single-band architectures.
    pub fn pfa_band_spec(&self) -> BandSpec {
        self.bands()[self.pfa_band]
    }

    /// Carrier at which path amplitudes are stored.
    pub fn reference_hz(&self) -> f64 {
        self.band_centers_ghz[self.pfa_band] * 1.0e9
    }

    pub fn tx_power_w(&self) -> f64 {
        10f64.powf((self.tx_power_dbm - 30.0) / 10.0)
    }

    /// Copy of this configuration with the sweep axis pinned to `value`.
    pub fn at_sweep_value(&self, value: f64) -> Result<Self> {
        let mut point = self.clone();
        match self.sweep_axis {
            SweepAxis::TxPowerDbm => point.tx_power_dbm = value,
            SweepAxis::Users => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(SimError::Config(format!("user count {value} not integral")));
                }
                point.users = value as usize;
            }
            SweepAxis::Antennas => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(SimError::Config(format!("antenna count {value} not integral")));
                }
                point.antennas = value as usize;
            }
        }
        point.validate()?;
        Ok(point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn defaults_validate_and_derive() {
        let config = ScenarioConfig::default();
        config.validate().unwrap();
        assert_eq!(config.fpfa_rf_chains(), 15);
        let array = config.fpfa_array().unwrap();
        assert_eq!((array.x, array.z), (8, 4));
        assert_eq!(array.subarray_size(), 32);
        assert_eq!(array.rf_chains, 15);
        let bands = config.bands();
        assert_eq!(bands.len(), 4);
        assert_relative_eq!(bands[1].center_hz, 300.0e9);
        assert_relative_eq!(bands[1].bandwidth_hz, 30.0e9);
        assert_relative_eq!(config.reference_hz(), 300.0e9);
        assert_relative_eq!(config.tx_power_w(), 0.1, epsilon = 1e-12);
        assert_eq!(config.fixed_array().unwrap().ports, 1);
        assert_eq!(config.pfa_array().unwrap().rf_chains, 60);
        assert_eq!(config.pfa_band_spec().index, 1);
    }

    #[test]
    fn parses_every_key() {
        let text = "\
# full override
band_centers_ghz = 100, 200
bandwidth_ratio = 0.05
antennas = 64
users = 8
ports = 33
port_line_wavelengths = 10
tx_power_dbm = 17.5
architectures = fpfa, pfa
drops = 12
seed = 99
r_min_m = 2.0
cell_radius_m = 30
sector_deg = 90
bs_height_m = 10
user_height_m = 1.0
paths = 1
reflection_magnitude = 0.3
reflection_phase_deg = 90
noise_figure_db = 5
pfa_band = 0
port_order = index
sweep_axis = users
sweep_values = 4, 8
out_dir = results
";
        let mut config = ScenarioConfig::default();
        config.apply_text(text).unwrap();
        assert_eq!(config.band_centers_ghz, vec![100.0, 200.0]);
        assert_relative_eq!(config.bandwidth_ratio, 0.05);
        assert_eq!(config.antennas, 64);
        assert_eq!(config.users, 8);
        assert_eq!(config.ports, 33);
        assert_eq!(config.port_line_wavelengths, 10);
        assert_relative_eq!(config.tx_power_dbm, 17.5);
        assert_eq!(config.architectures, vec![Architecture::Fpfa, Architecture::Pfa]);
        assert_eq!(config.drops, 12);
        assert_eq!(config.seed, 99);
        assert_relative_eq!(config.r_min_m, 2.0);
        assert_relative_eq!(config.cell_radius_m, 30.0);
        assert_relative_eq!(config.sector_deg, 90.0);
        assert_relative_eq!(config.bs_height_m, 10.0);
        assert_relative_eq!(config.user_height_m, 1.0);
        assert_eq!(config.paths, 1);
        assert_relative_eq!(config.reflection_magnitude, 0.3);
        assert_relative_eq!(config.reflection_phase_deg, 90.0);
        assert_relative_eq!(config.noise_figure_db, 5.0);
        assert_eq!(config.pfa_band, 0);
        assert_eq!(config.port_order, UserOrder::Index);
        assert_eq!(config.sweep_axis, SweepAxis::Users);
        assert_eq!(config.sweep_values, vec![4.0, 8.0]);
        assert_eq!(config.out_dir, PathBuf::from("results"));
        config.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_and_malformed_input() {
        let mut config = ScenarioConfig::default();
        assert!(config.apply_pair("carrier", "300").is_err());
        assert!(config.apply_pair("users", "sixty").is_err());
        assert!(config.apply_text("users 60").is_err());
        assert!(config.apply_pair("architectures", "fpfa,laser").is_err());
    }

    #[test]
    fn later_keys_override_earlier_ones() {
        let mut config = ScenarioConfig::default();
        config.apply_text("users = 10\nusers = 20\n\n# end\n").unwrap();
        assert_eq!(config.users, 20);
    }

    #[test]
    fn validation_rejects_inconsistent_scenarios() {
        let cases: &[(&str, &str)] = &[
            ("antennas", "130"),
            ("pfa_band", "9"),
            ("users", "200"),
            ("r_min_m", "25"),
            ("paths", "3"),
            ("sector_deg", "0"),
            ("reflection_magnitude", "1.5"),
            ("bandwidth_ratio", "0"),
            ("users", "0"),
        ];
        for (key, value) in cases {
            let mut config = ScenarioConfig::default();
            config.apply_pair(key, value).unwrap();
            assert!(config.validate().is_err(), "{key}={value} accepted");
        }
        let mut config = ScenarioConfig::default();
        config.apply_pair("architectures", "fpfa,fpfa").unwrap();
        assert!(config.validate().is_err());
        // 200 users fit when only the banded architecture runs on 1024 antennas.
        let mut config = ScenarioConfig::default();
        config.apply_text("users = 200\nantennas = 1024\narchitectures = fpfa").unwrap();
        config.validate().unwrap();
    }

    #[test]
    fn sweep_point_overrides_axis_value() {
        let config = ScenarioConfig::default();
        let p = config.at_sweep_value(25.0).unwrap();
        assert_relative_eq!(p.tx_power_dbm, 25.0);
        assert_eq!(p.users, config.users);

        let mut by_users = ScenarioConfig::default();
        by_users.apply_pair("sweep_axis", "users").unwrap();
        let p = by_users.at_sweep_value(32.0).unwrap();
        assert_eq!(p.users, 32);
        assert!(by_users.at_sweep_value(32.5).is_err());

        let mut by_antennas = ScenarioConfig::default();
        by_antennas.apply_pair("sweep_axis", "antennas").unwrap();
        let p = by_antennas.at_sweep_value(256.0).unwrap();
        assert_eq!(p.antennas, 256);
        // 90 antennas do not split into 4 bands.
        assert!(by_antennas.at_sweep_value(90.0).is_err());
    }

    #[test]
    fn sweep_values_must_match_axis() {
        let mut config = ScenarioConfig::default();
        config.apply_pair("sweep_axis", "users").unwrap();
        config.apply_pair("sweep_values", "16,32.5").unwrap();
        assert!(config.validate().is_err());
        config.apply_pair("sweep_values", "16,32").unwrap();
        config.validate().unwrap();
    }
}
