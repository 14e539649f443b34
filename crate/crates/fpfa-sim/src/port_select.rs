//! Sequential port selection against the span of prior selections.
//!
//! Users are processed one at a time. Each newcomer scans its candidate port
//! rows and keeps the one whose transpose retains the most energy orthogonal
//! to the span of the transposed rows already locked in. Scoring the raw
//! projection instead would favour ports sitting in multipath fades (small
//! projection because the whole row is small), which starves the user of
//! signal power; maximising the rejected energy keeps the stacked group
//! channel both strong and well conditioned for the zero-forcing stage
//! downstream.

use std::fmt;
use std::str::FromStr;

use crate::channel::{channel_row, CMatrix, CRow, CVector, PortChannelTensor};
use crate::error::{Result, SimError};

/// Relative singular value cutoff when ranking a basis.
const RANK_TOL: f64 = 1e-10;

/// Order in which users lock in their ports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UserOrder {
    /// Strongest first: descending first-port channel norm, index on ties.
    #[default]
    NormDescending,
    /// Plain input order.
    Index,
}

impl FromStr for UserOrder {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "norm_desc" => Ok(Self::NormDescending),
            "index" => Ok(Self::Index),
            other => Err(SimError::Config(format!(
                "unknown user order '{other}' (expected norm_desc or index)"
            ))),
        }
    }
}

impl fmt::Display for UserOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NormDescending => "norm_desc",
            Self::Index => "index",
        })
    }
}

/// Outcome of a port sweep for one co-banded user group.
#[derive(Debug, Clone, PartialEq)]
pub struct PortSelection {
    /// ports[u] is the chosen port of input user u.
    pub ports: Vec<usize>,
    /// rows[u] is the channel row of input user u at its chosen port.
    pub rows: Vec<CRow>,
    /// Input indices in the order they were processed.
    pub order: Vec<usize>,
}

impl PortSelection {
    /// Selected rows stacked into a group channel matrix, input order.
    pub fn stacked(&self) -> CMatrix {
        stack_rows(&self.rows)
    }
}

pub fn stack_rows(rows: &[CRow]) -> CMatrix {
    let cols = rows.first().map_or(0, CRow::len);
    CMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c])
}

/// Orthonormal basis (as matrix columns) of the span of the given rows
/// transposed without conjugation. Empty input gives a zero-column matrix.
fn transposed_span_basis(rows: &[CRow]) -> CMatrix {
    if rows.is_empty() {
        return CMatrix::zeros(0, 0);
    }
    // Columns of B^T are the plain-transposed rows; its left singular
    // vectors span the same column space.
    let bt = stack_rows(rows).transpose();
    let m = bt.nrows();
    let svd = bt.svd(true, false);
    let u = svd.u.expect("svd requested u");
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return CMatrix::zeros(m, 0);
    }
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_TOL * smax)
        .count();
    u.columns(0, rank).into_owned()
}

fn projected_norm(basis: &CMatrix, x: &CVector) -> f64 {
    if basis.ncols() == 0 {
        return 0.0;
    }
    (basis.adjoint() * x).norm()
}

/// Norm of the candidate row's transpose projected onto the span of the
/// transposes of the already selected rows. Zero when nothing is selected.
pub fn projection_norm(selected: &[CRow], candidate: &CRow) -> Result<f64> {
    if let Some(first) = selected.first() {
        if first.len() != candidate.len() {
            return Err(SimError::Dimension(format!(
                "candidate has {} entries, basis rows have {}",
                candidate.len(),
                first.len()
            )));
        }
    }
    let basis = transposed_span_basis(selected);
    Ok(projected_norm(&basis, &candidate.transpose()))
}

/// Pick one port per user, greedily maximising the channel energy kept
/// orthogonal to the rows already taken. The first user in the processing
/// order gets port 0; ties on the score go to the lowest port index.
/// Outputs stay aligned with the input order.
pub fn select_ports(tensors: &[&PortChannelTensor], order: UserOrder) -> Result<PortSelection> {
    if tensors.is_empty() {
        return Err(SimError::Config("port selection over zero users".into()));
    }
    let ports = tensors[0].ports();
    let cols = tensors[0].matrix.ncols();
    for t in tensors {
        if t.ports() != ports || t.matrix.ncols() != cols {
            return Err(SimError::Dimension(format!(
                "tensor for user {} has shape {}x{}, expected {ports}x{cols}",
                t.user,
                t.ports(),
                t.matrix.ncols()
            )));
        }
    }

    let mut sequence: Vec<usize> = (0..tensors.len()).collect();
    if order == UserOrder::NormDescending {
        let norms: Vec<f64> = tensors
            .iter()
            .map(|t| t.matrix.row(0).norm())
            .collect();
        // Stable sort keeps index order among equal norms.
        sequence.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    }

    let mut chosen_ports = vec![0usize; tensors.len()];
    let mut chosen_rows: Vec<Option<CRow>> = vec![None; tensors.len()];
    let mut locked: Vec<CRow> = Vec::with_capacity(tensors.len());

    for (step, &user) in sequence.iter().enumerate() {
        let tensor = tensors[user];
        let port = if step == 0 {
            0
        } else {
            // One factorisation of the locked set serves every candidate.
            let basis = transposed_span_basis(&locked);
            let mut best_port = 0;
            let mut best_score = f64::NEG_INFINITY;
            for p in 0..ports {
                let x = tensor.matrix.row(p).transpose();
                let n = projected_norm(&basis, &x);
                // Energy the zero-forcing stage can actually use.
                let rejected = x.norm_squared() - n * n;
                if rejected > best_score {
                    best_score = rejected;
                    best_port = p;
                }
            }
            best_port
        };
        let row = channel_row(tensor, port)?;
        chosen_ports[user] = port;
        locked.push(row.clone());
        chosen_rows[user] = Some(row);
    }

    Ok(PortSelection {
        ports: chosen_ports,
        rows: chosen_rows.into_iter().map(Option::unwrap).collect(),
        order: sequence,
    })
}
