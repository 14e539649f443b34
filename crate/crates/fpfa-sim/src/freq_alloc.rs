//! Correlation-driven assignment of users to frequency bands.
//!
//! Users whose channels point the same way should not share a band, because
//! the digital stage cannot separate nearly collinear rows. The grouping pass
//! walks user pairs from most to least correlated and breaks up co-banded
//! pairs greedily, subject to the per-band RF chain budget.

use nalgebra::DMatrix;

use crate::channel::{self, ArraySpec, BandSpec, CRow, UserPaths};
use crate::error::{Result, SimError};

/// Symmetric matrix of channel correlation magnitudes. The diagonal stays
/// zero by convention: self-correlation never enters any objective.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    values: DMatrix<f64>,
}

impl CorrelationMatrix {
    pub fn from_fn(users: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = DMatrix::zeros(users, users);
        for i in 0..users {
            for j in (i + 1)..users {
                let r = f(i, j);
                values[(i, j)] = r;
                values[(j, i)] = r;
            }
        }
        Self { values }
    }

    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }
}

/// Normalised correlation |<a, b>| / (|a| |b|) between two channel rows.
///
/// The modulus discards the absolute phase, so the value is invariant to
/// complex scaling of either argument and always lands in [0, 1].
pub fn correlation(a: &CRow, b: &CRow) -> Result<f64> {
    if a.len() != b.len() {
        return Err(SimError::Dimension(format!(
            "correlation of rows with {} and {} entries",
            a.len(),
            b.len()
        )));
    }
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return Err(SimError::DegenerateChannel(
            "correlation against an all-zero row".into(),
        ));
    }
    let mut dot = channel::Cpx::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        dot += x * y.conj();
    }
    Ok((dot.norm() / (na * nb)).min(1.0))
}

/// Pairwise correlations of one channel row per user.
pub fn correlation_matrix(rows: &[CRow]) -> Result<CorrelationMatrix> {
    let users = rows.len();
    let mut values = DMatrix::zeros(users, users);
    for i in 0..users {
        for j in (i + 1)..users {
            let r = correlation(&rows[i], &rows[j])?;
            values[(i, j)] = r;
            values[(j, i)] = r;
        }
    }
    Ok(CorrelationMatrix { values })
}

/// Largest correlation disagreement between bands for pure line-of-sight
/// drops.
///
/// With half-wavelength spacing at each carrier the steering phases are
/// frequency independent, so single-path correlations must agree across
/// bands; this measures how far they drift. Multipath channels mix
/// path delays that do depend on the carrier, so no such identity holds and
/// the check refuses to run.
pub fn frequency_invariance_check(
    users: &[UserPaths],
    bands: &[BandSpec],
    array: &ArraySpec,
) -> Result<f64> {
    if users.len() < 2 || bands.len() < 2 {
        return Err(SimError::Config(
            "invariance check needs at least two users and two bands".into(),
        ));
    }
    if users.iter().any(|u| !u.is_los_only()) {
        return Err(SimError::NotApplicable(
            "correlation is only band-invariant for single-path channels".into(),
        ));
    }
    let probe = array.with_ports(1);
    let mut reference: Option<CorrelationMatrix> = None;
    let mut worst = 0.0_f64;
    for band in bands {
        let rows = users
            .iter()
            .map(|u| {
                let t = channel::pseudo_channel(u, band, &probe)?;
                channel::channel_row(&t, 0)
            })
            .collect::<Result<Vec<_>>>()?;
        let corr = correlation_matrix(&rows)?;
        match &reference {
            None => reference = Some(corr),
            Some(base) => {
                for i in 0..users.len() {
                    for j in (i + 1)..users.len() {
                        worst = worst.max((corr.get(i, j) - base.get(i, j)).abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Which users transmit on which band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAssignment {
    /// groups[k] holds the user indices on band k, ascending.
    pub groups: Vec<Vec<usize>>,
    /// band_of[u] is the band index of user u.
    pub band_of: Vec<usize>,
}

impl GroupAssignment {
    fn from_membership(membership: Vec<usize>, bands: usize) -> Self {
        let mut groups = vec![Vec::new(); bands];
        for (user, &g) in membership.iter().enumerate() {
            groups[g].push(user);
        }
        Self {
            groups,
            band_of: membership,
        }
    }

    /// Check the assignment covers every user exactly once within capacity.
    pub fn validate(&self, users: usize, capacity: usize) -> Result<()> {
        if self.band_of.len() != users {
            return Err(SimError::Dimension(format!(
                "assignment covers {} users, expected {users}",
                self.band_of.len()
            )));
        }
        let mut seen = vec![false; users];
        for (k, group) in self.groups.iter().enumerate() {
            if group.len() > capacity {
                return Err(SimError::Config(format!(
                    "band {k} holds {} users, capacity {capacity}",
                    group.len()
                )));
            }
            for &u in group {
                if u >= users || seen[u] {
                    return Err(SimError::Config(format!(
                        "user {u} repeated or out of range in band {k}"
                    )));
                }
                if self.band_of[u] != k {
                    return Err(SimError::Config(format!(
                        "user {u} listed on band {k} but mapped to {}",
                        self.band_of[u]
                    )));
                }
                seen[u] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(SimError::Config("assignment misses a user".into()));
        }
        Ok(())
    }
}

/// Greedy band assignment separating the most correlated user pairs.
///
/// All users start on band 0. Pairs are visited once, ordered by descending
/// correlation (index order breaks ties). When a visited pair shares a band,
/// the member contributing more correlation to that band moves out (larger
/// user index on a tie) and lands on the band where it adds the least
/// correlation among bands with a free slot (lowest band index on a tie).
/// The member's own band counts as a destination only if it has room after
/// the removal, so the oversized initial band drains as pairs are visited.
pub fn group_users(
    corr: &CorrelationMatrix,
    bands: usize,
    capacity: usize,
) -> Result<GroupAssignment> {
    let users = corr.size();
    if bands == 0 || capacity == 0 {
        return Err(SimError::Config("need at least one band and one slot".into()));
    }
    if users > bands * capacity {
        return Err(SimError::Config(format!(
            "{users} users exceed {bands} bands x {capacity} slots"
        )));
    }

    let mut membership = vec![0usize; users];
    let mut sizes = vec![0usize; bands];
    sizes[0] = users;

    let mut pairs = Vec::with_capacity(users * (users - 1) / 2);
    for i in 0..users {
        for j in (i + 1)..users {
            pairs.push((i, j));
        }
    }
    pairs.sort_by(|&(ai, aj), &(bi, bj)| {
        corr.get(bi, bj)
            .total_cmp(&corr.get(ai, aj))
            .then(ai.cmp(&bi))
            .then(aj.cmp(&bj))
    });

    // Correlation a user contributes to its current band.
    let intra_sum = |membership: &[usize], u: usize| -> f64 {
        let g = membership[u];
        (0..users)
            .filter(|&m| m != u && membership[m] == g)
            .map(|m| corr.get(u, m))
            .sum()
    };

    for (i, j) in pairs {
        if membership[i] != membership[j] {
            continue;
        }
        let si = intra_sum(&membership, i);
        let sj = intra_sum(&membership, j);
        let mover = if si > sj {
            i
        } else if sj > si {
            j
        } else {
            i.max(j)
        };
        let from = membership[mover];
        sizes[from] -= 1;

        let mut best: Option<(f64, usize)> = None;
        for (g, &size) in sizes.iter().enumerate() {
            if size >= capacity {
                continue;
            }
            let added: f64 = (0..users)
                .filter(|&m| m != mover && membership[m] == g)
                .map(|m| corr.get(mover, m))
                .sum();
            let better = match best {
                None => true,
                Some((cost, band)) => added < cost || (added == cost && g < band),
            };
            if better {
                best = Some((added, g));
            }
        }
        // Total capacity >= users guarantees a free slot somewhere.
        let (_, dest) = best.expect("no band with a free slot");
        membership[mover] = dest;
        sizes[dest] += 1;
    }

    Ok(GroupAssignment::from_membership(membership, bands))
}

/// Objective the grouping pass minimises: the sum of correlations over
/// unordered co-banded user pairs.
pub fn sum_intragroup_correlation(corr: &CorrelationMatrix, assignment: &GroupAssignment) -> f64 {
    let mut total = 0.0;
    for group in &assignment.groups {
        for (a, &i) in group.iter().enumerate() {
            for &j in &group[a + 1..] {
                total += corr.get(i, j);
            }
        }
    }
    total
}
