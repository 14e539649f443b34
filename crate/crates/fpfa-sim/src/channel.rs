//! User drops and port-resolved multipath channel synthesis.
//!
//! The BS carries one uniform planar subarray per frequency band; each user
//! carries one linear fluid antenna per band whose element can sit at any of
//! `N` ports along a short line. The pseudo channel tensor stacks the channel
//! row of every candidate port, so downstream stages can pick ports by plain
//! row indexing.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector, RowDVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::ScenarioConfig;
use crate::error::{Result, SimError};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub type Cpx = Complex<f64>;
pub type CMatrix = DMatrix<Cpx>;
pub type CVector = DVector<Cpx>;
pub type CRow = RowDVector<Cpx>;

#[inline]
pub fn phasor(theta: f64) -> Cpx {
    Complex::new(theta.cos(), theta.sin())
}

/// One operating frequency band and the antenna geometry tied to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    /// Position of the band in the scenario's band list.
    pub index: usize,
    /// Central frequency f_k in Hz.
    pub center_hz: f64,
    /// Bandwidth B_k in Hz (defaults to 10% of the carrier).
    pub bandwidth_hz: f64,
}

impl BandSpec {
    pub fn new(index: usize, center_hz: f64, bandwidth_hz: f64) -> Self {
        Self {
            index,
            center_hz,
            bandwidth_hz,
        }
    }

    /// Carrier wavelength λ_k in metres.
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.center_hz
    }

    /// Antenna element spacing d_a = λ_k / 2, exactly c / (2 f_k).
    pub fn antenna_spacing(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.center_hz)
    }

    /// Band edges [f_k - B_k/2, f_k + B_k/2].
    pub fn edges(&self) -> (f64, f64) {
        (
            self.center_hz - 0.5 * self.bandwidth_hz,
            self.center_hz + 0.5 * self.bandwidth_hz,
        )
    }
}

/// BS subarray dimensions plus the user-side port line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArraySpec {
    /// Total BS antennas N_t across all bands.
    pub total_antennas: usize,
    /// Number of frequency bands K.
    pub bands: usize,
    /// Subarray width (horizontal elements), X.
    pub x: usize,
    /// Subarray height (vertical elements), Z.
    pub z: usize,
    /// RF chains L_t.
    pub rf_chains: usize,
    /// Candidate ports per fluid antenna, N.
    pub ports: usize,
    /// Port line length in carrier wavelengths.
    pub line_wavelengths: u32,
}

impl ArraySpec {
    /// Build a spec with the squarest X x Z factorisation of N_t / K (X >= Z).
    pub fn new(
        total_antennas: usize,
        bands: usize,
        rf_chains: usize,
        ports: usize,
        line_wavelengths: u32,
    ) -> Result<Self> {
        if bands == 0 || total_antennas == 0 {
            return Err(SimError::Config(
                "antenna and band counts must be positive".into(),
            ));
        }
        if !total_antennas.is_multiple_of(bands) {
            return Err(SimError::Config(format!(
                "total antennas {total_antennas} not divisible by {bands} bands"
            )));
        }
        if rf_chains == 0 {
            return Err(SimError::Config("need at least one RF chain".into()));
        }
        if ports == 0 {
            return Err(SimError::Config("need at least one port".into()));
        }
        let (x, z) = squarest_dims(total_antennas / bands);
        Ok(Self {
            total_antennas,
            bands,
            x,
            z,
            rf_chains,
            ports,
            line_wavelengths,
        })
    }

    /// Antennas per subarray, N_t / K.
    pub fn subarray_size(&self) -> usize {
        self.x * self.z
    }

    /// Port spacing d_p for a band: line length spread over N - 1 gaps,
    /// endpoints included. Zero for a single port.
    pub fn port_spacing(&self, band: &BandSpec) -> f64 {
        if self.ports <= 1 {
            0.0
        } else {
            f64::from(self.line_wavelengths) * band.wavelength() / (self.ports as f64 - 1.0)
        }
    }

    /// Same geometry with a different port count.
    pub fn with_ports(&self, ports: usize) -> Self {
        Self { ports, ..*self }
    }
}

/// Factor `n` as X * Z with X >= Z and X - Z minimal.
fn squarest_dims(n: usize) -> (usize, usize) {
    let mut z = (n as f64).sqrt() as usize;
    while z > 1 && !n.is_multiple_of(z) {
        z -= 1;
    }
    (n / z.max(1), z.max(1))
}

/// One propagation path from the BS to a user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEntry {
    /// Path length D_p in metres.
    pub distance_m: f64,
    /// Transmit azimuth φ_p in radians (measured in the horizontal plane).
    pub azimuth: f64,
    /// Transmit polar angle θ_p in radians (from the vertical array axis).
    pub elevation: f64,
    /// Receive angle φ^r_p at the user's port line, radians.
    pub rx_angle: f64,
    /// Path gain magnitude |α_p| at the reference frequency (linear).
    pub amplitude: f64,
    /// Extra path phase in radians (reflection coefficient phase; 0 for LoS).
    pub phase: f64,
}

/// Per-user multipath description, independent of band-specific phasing.
///
/// Amplitudes are stored at `reference_hz`; [`pseudo_channel`] rescales them
/// to each band's carrier (free-space gain goes as 1/f, so the reference
/// choice cancels out of the synthesized channel).
#[derive(Debug, Clone, PartialEq)]
pub struct UserPaths {
    pub user: usize,
    /// Horizontal position relative to the BS, metres (boresight along +y).
    pub position: [f64; 2],
    pub reference_hz: f64,
    pub paths: Vec<PathEntry>,
}

impl UserPaths {
    pub fn line_of_sight(&self) -> &PathEntry {
        &self.paths[0]
    }

    pub fn is_los_only(&self) -> bool {
        self.paths.len() == 1
    }
}

/// Channel rows of every candidate port: an N x (N_t/K) matrix where row n is
/// the physical channel seen when the fluid antenna sits at port n.
#[derive(Debug, Clone, PartialEq)]
pub struct PortChannelTensor {
    pub user: usize,
    pub band: usize,
    pub matrix: CMatrix,
}

impl PortChannelTensor {
    pub fn ports(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Draw `U` users uniformly over the annular coverage sector and build their
/// LoS (and, for two-path scenarios, ground-reflection) path descriptions.
///
/// Positions are area-uniform over radius `[r_min, cell_radius]` and the
/// configured azimuth sector about boresight. The reflected path comes from
/// the image-source construction: BS mirrored below ground, so the bounce
/// arrives at the user from below with inverted receive angle.
pub fn drop_users(config: &ScenarioConfig, seed: u64) -> Result<Vec<UserPaths>> {
    if config.users == 0 {
        return Err(SimError::Config("user count must be positive".into()));
    }
    if config.r_min_m >= config.cell_radius_m {
        return Err(SimError::Config(format!(
            "minimum drop radius {} m must be below the cell radius {} m",
            config.r_min_m, config.cell_radius_m
        )));
    }
    if config.paths == 0 || config.paths > 2 {
        return Err(SimError::Config(format!(
            "unsupported path count {} (expected 1 or 2)",
            config.paths
        )));
    }

    let f_ref = config.reference_hz();
    let h_t = config.bs_height_m;
    let h_r = config.user_height_m;
    let half_sector = config.sector_deg.to_radians() / 2.0;
    let gamma_mag = config.reflection_magnitude;
    let gamma_phase = config.reflection_phase_deg.to_radians();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut users = Vec::with_capacity(config.users);
    for u in 0..config.users {
        // Area-uniform radius over the annulus.
        let t: f64 = rng.gen_range(0.0..1.0);
        let r2 = config.r_min_m.powi(2) + t * (config.cell_radius_m.powi(2) - config.r_min_m.powi(2));
        let d_h = r2.sqrt();
        let bearing: f64 = rng.gen_range(-half_sector..half_sector);
        // Boresight along +y; the subarray plane spans x (horizontal) and z (vertical).
        let x = d_h * bearing.sin();
        let y = d_h * bearing.cos();

        let mut paths = Vec::with_capacity(config.paths);

        let d_los = (d_h * d_h + (h_t - h_r).powi(2)).sqrt();
        paths.push(PathEntry {
            distance_m: d_los,
            azimuth: y.atan2(x),
            elevation: ((h_r - h_t) / d_los).acos(),
            rx_angle: ((h_t - h_r) / d_los).asin(),
            amplitude: friis_amplitude(f_ref, d_los),
            phase: 0.0,
        });

        if config.paths == 2 {
            // Image of the BS at -h_t: the departure ray aims at the user's
            // mirror image below ground, the arrival comes up from the bounce.
            let d_ref = (d_h * d_h + (h_t + h_r).powi(2)).sqrt();
            paths.push(PathEntry {
                distance_m: d_ref,
                azimuth: y.atan2(x),
                elevation: ((-h_r - h_t) / d_ref).acos(),
                rx_angle: -((h_t + h_r) / d_ref).asin(),
                amplitude: gamma_mag * friis_amplitude(f_ref, d_ref),
                phase: gamma_phase,
            });
        }

        users.push(UserPaths {
            user: u,
            position: [x, y],
            reference_hz: f_ref,
            paths,
        });
    }
    Ok(users)
}

/// Free-space path amplitude c / (4 π f D).
pub fn friis_amplitude(freq_hz: f64, distance_m: f64) -> f64 {
    SPEED_OF_LIGHT / (4.0 * PI * freq_hz * distance_m)
}

/// Transmit response of the X x Z planar subarray toward one path.
///
/// Element (x, z) carries phase (2π/λ) d_a (x sinθ cosφ + z cosθ); the first
/// element is the phase reference. Elements are laid out z-major so the
/// vector index is x * Z + z.
pub fn tx_steering_vector(band: &BandSpec, path: &PathEntry, x_dim: usize, z_dim: usize) -> CVector {
    let scale = 2.0 * PI / band.wavelength() * band.antenna_spacing();
    let horiz = path.elevation.sin() * path.azimuth.cos();
    let vert = path.elevation.cos();
    let mut v = CVector::zeros(x_dim * z_dim);
    for xi in 0..x_dim {
        for zi in 0..z_dim {
            v[xi * z_dim + zi] = phasor(scale * (xi as f64 * horiz + zi as f64 * vert));
        }
    }
    v
}

/// Receive phase progression over the port line: entry n is
/// exp(j (2π/λ) d_p n sin φ^r), with port 0 as the phase reference.
pub fn rx_port_phase_vector(band: &BandSpec, rx_angle: f64, ports: usize, spacing_m: f64) -> CVector {
    let step = 2.0 * PI / band.wavelength() * spacing_m * rx_angle.sin();
    CVector::from_fn(ports, |n, _| phasor(step * n as f64))
}

/// Synthesize the pseudo channel tensor for one user and band:
/// the sum over paths of |α_p| e^{j(ψ_p - 2π D_p / λ)} a_r a_t^H.
///
/// Under the planar-wave assumption the angles and gain magnitudes are shared
/// by all ports; only the port phase progression differs per row.
pub fn pseudo_channel(user: &UserPaths, band: &BandSpec, array: &ArraySpec) -> Result<PortChannelTensor> {
    if user.paths.is_empty() {
        return Err(SimError::Config(format!("user {} has no paths", user.user)));
    }
    let m = array.subarray_size();
    let n = array.ports;
    let spacing = array.port_spacing(band);
    let mut h = CMatrix::zeros(n, m);
    for path in &user.paths {
        // Rescale the stored reference-frequency amplitude to this carrier.
        let amp = path.amplitude * user.reference_hz / band.center_hz;
        let gain = amp * phasor(path.phase - 2.0 * PI / band.wavelength() * path.distance_m);
        let a_t = tx_steering_vector(band, path, array.x, array.z);
        let a_r = rx_port_phase_vector(band, path.rx_angle, n, spacing);
        for row in 0..n {
            let left = gain * a_r[row];
            for col in 0..m {
                h[(row, col)] += left * a_t[col].conj();
            }
        }
    }
    Ok(PortChannelTensor {
        user: user.user,
        band: band.index,
        matrix: h,
    })
}

/// Channel row for one selected port (0-based).
pub fn channel_row(tensor: &PortChannelTensor, port: usize) -> Result<CRow> {
    if port >= tensor.ports() {
        return Err(SimError::PortOutOfRange {
            port,
            count: tensor.ports(),
        });
    }
    Ok(tensor.matrix.row(port).into_owned())
}
