//! Hybrid precoding for one user group: a constant-modulus analog stage
//! steered from the group channel's right singular vectors, followed by a
//! zero-forcing digital stage over the effective channel.

use nalgebra::Complex;

use crate::channel::{CMatrix, CVector, Cpx};
use crate::error::{Result, SimError};

/// Relative singular value cutoff for rank decisions.
const RANK_TOL: f64 = 1e-10;

/// Relative magnitude below which an entry does not anchor a phase.
const PHASE_TOL: f64 = 1e-8;

/// Rotate a column so its first significant entry is real positive. Pins the
/// arbitrary global phase a singular vector comes with.
fn normalise_column_phase(col: &mut CVector) {
    let largest = col.iter().map(|e| e.norm()).fold(0.0_f64, f64::max);
    if largest == 0.0 {
        return;
    }
    let anchor = col
        .iter()
        .find(|e| e.norm() > PHASE_TOL * largest)
        .copied()
        .expect("column has a significant entry");
    let rotation = anchor.conj() / anchor.norm();
    for e in col.iter_mut() {
        *e *= rotation;
    }
}

/// Constant-modulus analog matrix for a group channel of selected rows.
///
/// The first `rf_chains` right singular vectors of the group channel give
/// the steering directions; each becomes a column of unit-modulus phases
/// scaled by 1/sqrt(M). Groups smaller than the chain count contribute fewer
/// singular vectors, so the remainder is filled with a deterministic
/// orthonormal completion before the phase projection.
pub fn analog_precoder(group_channel: &CMatrix, rf_chains: usize) -> Result<CMatrix> {
    let (users, m) = group_channel.shape();
    if users == 0 || m == 0 {
        return Err(SimError::Dimension("empty group channel".into()));
    }
    if rf_chains == 0 || rf_chains > m {
        return Err(SimError::Config(format!(
            "rf chain count {rf_chains} outside 1..={m}"
        )));
    }

    let svd = group_channel.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd requested v_t");
    let mut columns: Vec<CVector> = Vec::with_capacity(rf_chains);
    for i in 0..rf_chains.min(v_t.nrows()) {
        // Row i of V^H is v_i^H; undo the conjugate transpose.
        let mut col = v_t.row(i).adjoint();
        normalise_column_phase(&mut col);
        columns.push(col);
    }

    // Complete with Gram-Schmidt over identity columns when the group is
    // smaller than the chain count.
    let mut candidate = 0;
    while columns.len() < rf_chains {
        if candidate >= m {
            return Err(SimError::DegenerateChannel(
                "failed to complete an orthonormal analog basis".into(),
            ));
        }
        let mut v = CVector::zeros(m);
        v[candidate] = Cpx::new(1.0, 0.0);
        candidate += 1;
        for q in &columns {
            let coeff = q.dotc(&v);
            v -= q * coeff;
        }
        let n = v.norm();
        if n > 1e-6 {
            let mut col = v / Complex::new(n, 0.0);
            normalise_column_phase(&mut col);
            columns.push(col);
        }
    }

    let scale = 1.0 / (m as f64).sqrt();
    let mut analog = CMatrix::zeros(m, rf_chains);
    for (c, col) in columns.iter().enumerate() {
        for r in 0..m {
            analog[(r, c)] = Complex::from_polar(scale, col[r].arg());
        }
    }
    Ok(analog)
}

/// Zero-forcing digital matrix over the effective channel G = H F.
///
/// Columns are the right pseudo-inverse of G, rescaled so every transmitted
/// stream leaves the full precoder chain with unit power: |F f_u| = 1.
/// A group whose effective channel loses rank cannot be zero-forced and
/// comes back as a [`SimError::SingularGroup`].
pub fn digital_precoder(effective: &CMatrix, analog: &CMatrix) -> Result<CMatrix> {
    let (users, chains) = effective.shape();
    if users == 0 {
        return Err(SimError::Dimension("empty effective channel".into()));
    }
    if analog.ncols() != chains {
        return Err(SimError::Dimension(format!(
            "analog has {} chains, effective expects {chains}",
            analog.ncols()
        )));
    }
    if users > chains {
        return Err(SimError::Config(format!(
            "{users} users on {chains} rf chains cannot be zero-forced"
        )));
    }

    let svd = effective.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = RANK_TOL * smax;
    let rank = if smax == 0.0 {
        0
    } else {
        svd.singular_values.iter().filter(|&&s| s > tol).count()
    };
    if rank < users {
        return Err(SimError::SingularGroup { rank, users });
    }

    let mut digital = svd
        .pseudo_inverse(tol)
        .map_err(|e| SimError::DegenerateChannel(e.into()))?;
    for u in 0..users {
        let radiated = analog * digital.column(u);
        let n = radiated.norm();
        if n == 0.0 {
            return Err(SimError::DegenerateChannel(format!(
                "stream {u} radiates no power"
            )));
        }
        let mut col = digital.column_mut(u);
        col /= Complex::new(n, 0.0);
    }
    Ok(digital)
}

/// Even power split: every user transmits with amplitude sqrt(total / users).
pub fn allocate_power(total_w: f64, users: usize) -> Result<Vec<f64>> {
    if users == 0 {
        return Err(SimError::Config("power split over zero users".into()));
    }
    // NaN fails this test too, unlike `< 0.0` alone.
    if total_w.is_nan() || total_w < 0.0 {
        return Err(SimError::Config(format!("negative transmit power {total_w}")));
    }
    Ok(vec![(total_w / users as f64).sqrt(); users])
}
