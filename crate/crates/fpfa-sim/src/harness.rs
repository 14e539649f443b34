//! Drop evaluation and the Monte Carlo sweep driver.
//!
//! One drop draws user geometry from a seed and runs the full pipeline for
//! each configured architecture on that shared geometry, so per-drop
//! comparisons are paired. A sweep repeats drops with seed = base + index at
//! every sweep point and aggregates deterministic statistics.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::channel::{self, CMatrix, CRow, PortChannelTensor, UserPaths};
use crate::config::{ScenarioConfig, SweepAxis};
use crate::error::{Result, SimError};
use crate::freq_alloc::{correlation_matrix, frequency_invariance_check, group_users};
use crate::metrics::{self, Architecture, LinkReport, PowerModel, UserReport};
use crate::plot::{self, Series};
use crate::port_select::{select_ports, stack_rows, UserOrder};
use crate::precoder::{allocate_power, analog_precoder, digital_precoder};

/// Left singular vector entries above this mark a user as part of the
/// near-collinear conflict set when a group cannot be zero-forced.
const CONFLICT_TOL: f64 = 1e-3;

/// Run the pipeline for every configured architecture on one shared drop.
pub fn run_drop_all(config: &ScenarioConfig, seed: u64) -> Result<Vec<LinkReport>> {
    config.validate()?;
    let users = channel::drop_users(config, seed)?;
    config
        .architectures
        .iter()
        .map(|&arch| evaluate_architecture(config, &users, arch))
        .collect()
}

/// Run the pipeline for one architecture. Geometry depends only on
/// (config, seed), so calling this per architecture with one seed yields
/// paired comparisons.
pub fn run_drop(config: &ScenarioConfig, arch: Architecture, seed: u64) -> Result<LinkReport> {
    config.validate()?;
    let users = channel::drop_users(config, seed)?;
    evaluate_architecture(config, &users, arch)
}

/// Evaluate one architecture over an already drawn set of users.
pub fn evaluate_architecture(
    config: &ScenarioConfig,
    users: &[UserPaths],
    arch: Architecture,
) -> Result<LinkReport> {
    let model = PowerModel::default();
    let bandwidths = config.bandwidths();
    let amplitude = allocate_power(config.tx_power_w(), users.len())?[0];
    let mut reports: Vec<UserReport> = Vec::with_capacity(users.len());

    match arch {
        Architecture::Fpfa => {
            let bands = config.bands();
            let array = config.fpfa_array()?;
            // Grouping looks at the first band's channels at the first port;
            // correlations of single-port rows need no port geometry.
            let probe = array.with_ports(1);
            let rows: Vec<CRow> = users
                .iter()
                .map(|u| channel::channel_row(&channel::pseudo_channel(u, &bands[0], &probe)?, 0))
                .collect::<Result<_>>()?;
            let corr = correlation_matrix(&rows)?;
            let assignment = group_users(&corr, bands.len(), array.rf_chains)?;
            for (k, group) in assignment.groups.iter().enumerate() {
                if group.is_empty() {
                    continue;
                }
                let tensors: Vec<PortChannelTensor> = group
                    .iter()
                    .map(|&u| channel::pseudo_channel(&users[u], &bands[k], &array))
                    .collect::<Result<_>>()?;
                let noise = metrics::noise_power(&bands[k], config.noise_figure_db);
                reports.extend(serve_group(
                    group,
                    &tensors,
                    k,
                    array.rf_chains,
                    amplitude,
                    noise,
                    config.port_order,
                )?);
            }
        }
        Architecture::Pfa | Architecture::Fixed => {
            let array = if arch == Architecture::Pfa {
                config.pfa_array()?
            } else {
                config.fixed_array()?
            };
            let band = config.pfa_band_spec();
            let group: Vec<usize> = (0..users.len()).collect();
            let tensors: Vec<PortChannelTensor> = users
                .iter()
                .map(|u| channel::pseudo_channel(u, &band, &array))
                .collect::<Result<_>>()?;
            let noise = metrics::noise_power(&band, config.noise_figure_db);
            reports.extend(serve_group(
                &group,
                &tensors,
                band.index,
                array.rf_chains,
                amplitude,
                noise,
                config.port_order,
            )?);
        }
    }

    reports.sort_by_key(|r| r.user);
    let power = metrics::power_consumption(
        arch,
        users.len(),
        config.antennas,
        config.band_centers_ghz.len(),
        &model,
    );
    LinkReport::assemble(arch, reports, power, &bandwidths)
}

/// Port selection, precoding and SINR for one co-banded group.
///
/// If the effective channel cannot be zero-forced, the weakest member of the
/// near-collinear conflict set is shed and the precoder rebuilt; shed users
/// appear in the output as unserved. Power amplitudes are fixed up front, so
/// shedding does not raise anyone's transmit power.
pub fn serve_group(
    group: &[usize],
    tensors: &[PortChannelTensor],
    band: usize,
    rf_chains: usize,
    amplitude: f64,
    noise_w: f64,
    order: UserOrder,
) -> Result<Vec<UserReport>> {
    if group.is_empty() || group.len() != tensors.len() {
        return Err(SimError::Dimension(format!(
            "group of {} users against {} tensors",
            group.len(),
            tensors.len()
        )));
    }
    let refs: Vec<&PortChannelTensor> = tensors.iter().collect();
    let selection = select_ports(&refs, order)?;

    let mut active: Vec<usize> = (0..group.len()).collect();
    let mut outcome: Option<(Vec<CRow>, CMatrix, CMatrix)> = None;
    while !active.is_empty() {
        let rows: Vec<CRow> = active.iter().map(|&i| selection.rows[i].clone()).collect();
        let h = stack_rows(&rows);
        let analog = analog_precoder(&h, rf_chains)?;
        let effective = &h * &analog;
        match digital_precoder(&effective, &analog) {
            Ok(digital) => {
                outcome = Some((rows, analog, digital));
                break;
            }
            Err(SimError::SingularGroup { .. }) => {
                let victim = conflict_victim(&effective, &rows);
                active.remove(victim);
            }
            Err(e) => return Err(e),
        }
    }

    let sinrs = match &outcome {
        Some((rows, analog, digital)) => metrics::sinr(
            rows,
            analog,
            digital,
            &vec![amplitude; rows.len()],
            noise_w,
        )?,
        None => Vec::new(),
    };

    let mut reports = Vec::with_capacity(group.len());
    for (pos, &user) in group.iter().enumerate() {
        let slot = active.iter().position(|&a| a == pos);
        let (served, gamma) = match slot {
            Some(j) if outcome.is_some() => (true, sinrs[j]),
            _ => (false, 0.0),
        };
        reports.push(UserReport {
            user,
            band,
            port: selection.ports[pos],
            served,
            sinr: gamma,
            se: (1.0 + gamma).log2(),
        });
    }
    Ok(reports)
}

/// Position of the user to shed from a group that lost rank: the weakest row
/// among those loading the smallest singular direction.
fn conflict_victim(effective: &CMatrix, rows: &[CRow]) -> usize {
    let svd = effective.clone().svd(true, false);
    let u = svd.u.expect("svd requested u");
    let weakest_direction = u.column(u.ncols() - 1);
    let mut candidates: Vec<usize> = (0..rows.len())
        .filter(|&i| weakest_direction[i].norm() > CONFLICT_TOL)
        .collect();
    if candidates.is_empty() {
        candidates = (0..rows.len()).collect();
    }
    candidates
        .into_iter()
        .min_by(|&a, &b| rows[a].norm().total_cmp(&rows[b].norm()))
        .expect("nonempty candidate set")
}

/// SINR of one user at every candidate port, with the whole precoder chain
/// rebuilt per port. The other users keep their normally selected ports.
/// Runs on the single-band full-array configuration.
pub fn port_sinr_curve(config: &ScenarioConfig, seed: u64, probe: usize) -> Result<Vec<f64>> {
    config.validate()?;
    if probe >= config.users {
        return Err(SimError::Config(format!(
            "probe user {probe} out of 0..{}",
            config.users
        )));
    }
    let users = channel::drop_users(config, seed)?;
    let band = config.pfa_band_spec();
    let array = config.pfa_array()?;
    let tensors: Vec<PortChannelTensor> = users
        .iter()
        .map(|u| channel::pseudo_channel(u, &band, &array))
        .collect::<Result<_>>()?;
    let refs: Vec<&PortChannelTensor> = tensors.iter().collect();
    let selection = select_ports(&refs, config.port_order)?;
    let amplitude = allocate_power(config.tx_power_w(), config.users)?[0];
    let noise = metrics::noise_power(&band, config.noise_figure_db);

    let mut curve = Vec::with_capacity(array.ports);
    for port in 0..array.ports {
        let rows: Vec<CRow> = (0..users.len())
            .map(|u| {
                if u == probe {
                    channel::channel_row(&tensors[u], port)
                } else {
                    Ok(selection.rows[u].clone())
                }
            })
            .collect::<Result<_>>()?;
        let h = stack_rows(&rows);
        let analog = analog_precoder(&h, array.rf_chains)?;
        let effective = &h * &analog;
        let gamma = match digital_precoder(&effective, &analog) {
            Ok(digital) => {
                metrics::sinr(&rows, &analog, &digital, &vec![amplitude; rows.len()], noise)?[probe]
            }
            // A port collinear with a neighbour cannot carry the stream.
            Err(SimError::SingularGroup { .. }) => 0.0,
            Err(e) => return Err(e),
        };
        curve.push(gamma);
    }
    Ok(curve)
}

/// Per-drop metric traces of one architecture at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchStats {
    pub architecture: Architecture,
    /// Indexed by drop. Drops with outages are included to keep pairing.
    pub sum_se: Vec<f64>,
    pub throughput_bps: Vec<f64>,
    pub energy_efficiency: Vec<f64>,
    /// Drops in which at least one user went unserved.
    pub outage_drops: usize,
}

impl ArchStats {
    pub fn clean_drops(&self) -> usize {
        self.sum_se.len() - self.outage_drops
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub drops: usize,
    pub stats: Vec<ArchStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Linear-interpolation percentile over a copy of the input; q in [0, 1].
pub fn percentile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let t = pos - lo as f64;
        sorted[lo] * (1.0 - t) + sorted[hi] * t
    }
}

/// Run the configured sweep: per sweep value, `drops` paired drops with
/// seed = base + drop index, parallelised per drop, aggregated in drop
/// order.
pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepResult> {
    config.validate()?;
    let mut points = Vec::with_capacity(config.sweep_values.len());
    for &value in &config.sweep_values {
        let point_config = config.at_sweep_value(value)?;
        let drops: Vec<Vec<LinkReport>> = (0..point_config.drops)
            .into_par_iter()
            .map(|d| run_drop_all(&point_config, point_config.seed.wrapping_add(d as u64)))
            .collect::<Result<_>>()?;

        let stats = point_config
            .architectures
            .iter()
            .enumerate()
            .map(|(a, &architecture)| {
                let reports: Vec<&LinkReport> = drops.iter().map(|d| &d[a]).collect();
                ArchStats {
                    architecture,
                    sum_se: reports.iter().map(|r| r.sum_se).collect(),
                    throughput_bps: reports.iter().map(|r| r.throughput_bps).collect(),
                    energy_efficiency: reports.iter().map(|r| r.energy_efficiency).collect(),
                    outage_drops: reports.iter().filter(|r| r.outages > 0).count(),
                }
            })
            .collect();

        points.push(SweepPoint {
            axis_value: value,
            drops: point_config.drops,
            stats,
        });
    }
    Ok(SweepResult {
        axis: config.sweep_axis,
        points,
    })
}

impl SweepResult {
    /// CSV with one row per (sweep point, architecture, statistic). Values
    /// carry 9 significant digits so identical runs are byte identical.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sweep_axis,sweep_value,architecture,statistic,value\n");
        for point in &self.points {
            for stats in &point.stats {
                let mut row = |statistic: &str, value: f64| {
                    let _ = writeln!(
                        out,
                        "{},{:.8e},{},{statistic},{value:.8e}",
                        self.axis, point.axis_value, stats.architecture
                    );
                };
                row("sum_se_mean", mean(&stats.sum_se));
                row("sum_se_p10", percentile(&stats.sum_se, 0.10));
                row("sum_se_p90", percentile(&stats.sum_se, 0.90));
                row("throughput_mean_bps", mean(&stats.throughput_bps));
                row("energy_efficiency_mean", mean(&stats.energy_efficiency));
                row("outage_drops", stats.outage_drops as f64);
                row("clean_drops", stats.clean_drops() as f64);
            }
        }
        out
    }

    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sweep over {}", self.axis);
        for point in &self.points {
            let _ = writeln!(
                out,
                "\n{} = {} ({} drops)",
                self.axis, point.axis_value, point.drops
            );
            for s in &point.stats {
                let _ = writeln!(
                    out,
                    "  {:>5}: sum SE mean {:9.3} bit/s/Hz (p10 {:9.3}, p90 {:9.3}) | \
                     EE {:.4} bit/s/Hz/W | outage drops {}",
                    s.architecture.to_string(),
                    mean(&s.sum_se),
                    percentile(&s.sum_se, 0.10),
                    percentile(&s.sum_se, 0.90),
                    mean(&s.energy_efficiency),
                    s.outage_drops
                );
            }
        }
        out
    }

    fn curve(&self, pick: impl Fn(&ArchStats) -> f64 + Copy, arch_index: usize) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|p| (p.axis_value, pick(&p.stats[arch_index])))
            .collect()
    }

    fn architectures(&self) -> Vec<Architecture> {
        self.points
            .first()
            .map(|p| p.stats.iter().map(|s| s.architecture).collect())
            .unwrap_or_default()
    }
}

/// Write sweep.csv, summary.txt and the SVG charts into the configured
/// output directory. Plot failures are reported but never fatal; the CSV is
/// the contract.
pub fn write_outputs(config: &ScenarioConfig, result: &SweepResult) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&config.out_dir)?;
    let mut written = Vec::new();

    let csv_path = config.out_dir.join("sweep.csv");
    let mut file = std::fs::File::create(&csv_path)?;
    file.write_all(result.to_csv().as_bytes())?;
    written.push(csv_path);

    let summary_path = config.out_dir.join("summary.txt");
    std::fs::write(&summary_path, result.summary_text())?;
    written.push(summary_path);

    let axis_label = result.axis.to_string();
    type Pick = Box<dyn Fn(&ArchStats) -> f64>;
    let charts: [(&str, &str, Pick, bool); 2] = [
        (
            "sum_se.svg",
            "sum spectral efficiency (bit/s/Hz)",
            Box::new(|s: &ArchStats| mean(&s.sum_se)),
            true,
        ),
        (
            "energy_efficiency.svg",
            "energy efficiency (bit/s/Hz/W)",
            Box::new(|s: &ArchStats| mean(&s.energy_efficiency)),
            false,
        ),
    ];
    for (file_name, y_label, pick, with_band) in &charts {
        let series: Vec<Series> = result
            .architectures()
            .iter()
            .enumerate()
            .map(|(i, arch)| Series {
                name: arch.to_string(),
                points: result.curve(|s| pick(s), i),
                band: with_band.then(|| {
                    result
                        .points
                        .iter()
                        .map(|p| {
                            (
                                percentile(&p.stats[i].sum_se, 0.10),
                                percentile(&p.stats[i].sum_se, 0.90),
                            )
                        })
                        .collect()
                }),
            })
            .collect();
        let path = config.out_dir.join(file_name);
        match plot::write_line_chart(&path, y_label, &axis_label, y_label, &series) {
            Ok(()) => written.push(path),
            Err(e) => eprintln!("warning: chart {file_name} not written: {e}"),
        }
    }
    Ok(written)
}

/// One entry of the self-check suite.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        detail,
    }
}

/// Fast invariant suite over randomly drawn instances, for the `validate`
/// subcommand. Each entry reports what was measured.
pub fn self_check(seed: u64) -> Result<Vec<CheckResult>> {
    let mut results = Vec::new();

    let mut config = ScenarioConfig::default();
    config.apply_text("users = 16\nantennas = 64\nports = 40\ndrops = 4")?;
    config.validate()?;
    let users = channel::drop_users(&config, seed)?;
    let bands = config.bands();
    let array = config.fpfa_array()?;

    // Correlation range over real drop rows.
    let probe = array.with_ports(1);
    let rows: Vec<CRow> = users
        .iter()
        .map(|u| channel::channel_row(&channel::pseudo_channel(u, &bands[0], &probe)?, 0))
        .collect::<Result<_>>()?;
    let corr = correlation_matrix(&rows)?;
    let mut worst: f64 = 0.0;
    for i in 0..rows.len() {
        for j in 0..rows.len() {
            let r = corr.get(i, j);
            worst = worst.max((-r).max(r - 1.0));
        }
    }
    results.push(check(
        "correlation in unit interval",
        worst <= 0.0,
        format!("worst excursion {worst:.3e}"),
    ));

    // Grouping produces a valid partition.
    let assignment = group_users(&corr, bands.len(), array.rf_chains)?;
    results.push(check(
        "grouping is a valid partition",
        assignment.validate(users.len(), array.rf_chains).is_ok(),
        format!(
            "sizes {:?}",
            assignment.groups.iter().map(Vec::len).collect::<Vec<_>>()
        ),
    ));

    // Precoding invariants on the first nonempty group.
    let group = assignment
        .groups
        .iter()
        .enumerate()
        .find(|(_, g)| !g.is_empty())
        .map(|(k, g)| (k, g.clone()))
        .expect("some group is nonempty");
    let tensors: Vec<PortChannelTensor> = group
        .1
        .iter()
        .map(|&u| channel::pseudo_channel(&users[u], &bands[group.0], &array))
        .collect::<Result<_>>()?;
    let refs: Vec<&PortChannelTensor> = tensors.iter().collect();
    let selection = select_ports(&refs, config.port_order)?;
    let h = selection.stacked();
    let analog = analog_precoder(&h, array.rf_chains)?;
    let target = 1.0 / (array.subarray_size() as f64).sqrt();
    let modulus_err = analog
        .iter()
        .map(|e| (e.norm() - target).abs())
        .fold(0.0_f64, f64::max);
    results.push(check(
        "analog entries constant modulus",
        modulus_err < 1e-12,
        format!("max deviation {modulus_err:.3e}"),
    ));

    match digital_precoder(&(&h * &analog), &analog) {
        Ok(digital) => {
            let coupling = &h * &analog * &digital;
            let mut leak: f64 = 0.0;
            let mut power_err: f64 = 0.0;
            for u in 0..coupling.nrows() {
                let diag = coupling[(u, u)].norm_sqr();
                for i in 0..coupling.ncols() {
                    if i != u {
                        leak = leak.max(coupling[(u, i)].norm_sqr() / diag);
                    }
                }
                power_err = power_err.max(((&analog * digital.column(u)).norm() - 1.0).abs());
            }
            results.push(check(
                "zero-forcing leakage below -60 dB",
                leak < 1e-6,
                format!("worst leakage ratio {leak:.3e}"),
            ));
            results.push(check(
                "precoded stream power unity",
                power_err < 1e-9,
                format!("max deviation {power_err:.3e}"),
            ));
        }
        Err(e) => {
            results.push(check("zero-forcing leakage below -60 dB", false, e.to_string()));
            results.push(check("precoded stream power unity", false, e.to_string()));
        }
    }

    // Single-path correlations must agree across bands.
    let mut los_config = config.clone();
    los_config.apply_text("paths = 1\nusers = 12")?;
    let los_users = channel::drop_users(&los_config, seed ^ 0x5eed)?;
    let deviation = frequency_invariance_check(&los_users, &bands, &array)?;
    results.push(check(
        "line-of-sight correlation band-invariant",
        deviation < 1e-9,
        format!("max deviation {deviation:.3e}"),
    ));

    Ok(results)
}
