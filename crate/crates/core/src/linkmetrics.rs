//! SINR and Shannon rates.
//!
//! Gains enter as squared magnitudes `g_ij = |h_ij|^2` in a [`GainTable`]
//! indexed by (user, AP). Cell membership comes from an [`Association`]; by
//! default every user is served by every AP.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SimError};

/// Noise power derived from an Es/N0 value and a reference power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub esn0_db: f64,
    pub sigma_sq: f64,
}

impl NoiseModel {
    pub fn new(esn0_db: f64, reference_power: f64) -> Result<Self> {
        if !(reference_power > 0.0 && reference_power.is_finite()) {
            return Err(SimError::Config(format!(
                "noise reference power must be positive, got {reference_power}"
            )));
        }
        if !esn0_db.is_finite() {
            return Err(SimError::Config(format!(
                "Es/N0 must be finite, got {esn0_db}"
            )));
        }
        Ok(Self {
            esn0_db,
            sigma_sq: noise_power(esn0_db, reference_power),
        })
    }
}

/// `reference_power / 10^(esn0_db / 10)`.
pub fn noise_power(esn0_db: f64, reference_power: f64) -> f64 {
    reference_power / 10f64.powf(esn0_db / 10.0)
}

/// Rule that collapses per-subcarrier DL gains into one value per link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GainAggregation {
    Mean,
    Min,
}

impl GainAggregation {
    pub const ALL: [GainAggregation; 2] = [GainAggregation::Mean, GainAggregation::Min];

    pub fn as_str(&self) -> &'static str {
        match self {
            GainAggregation::Mean => "mean",
            GainAggregation::Min => "min",
        }
    }
}

impl fmt::Display for GainAggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GainAggregation {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mean" => Ok(GainAggregation::Mean),
            "min" => Ok(GainAggregation::Min),
            other => Err(SimError::Config(format!(
                "unknown scenario '{other}', expected mean or min"
            ))),
        }
    }
}

/// Mean or minimum of non-negative gains.
///
/// The mean is computed as `min + mean(g - min)`, so `Min <= Mean` holds
/// bit-for-bit and not only in exact arithmetic.
pub fn aggregate_gain(gains: &[f64], mode: GainAggregation) -> Result<f64> {
    if gains.is_empty() {
        return Err(SimError::InvalidInput(
            "cannot aggregate an empty gain vector".into(),
        ));
    }
    if let Some(g) = gains.iter().find(|g| !(**g >= 0.0) || !g.is_finite()) {
        return Err(SimError::InvalidInput(format!(
            "gains must be finite and non-negative, got {g}"
        )));
    }
    let min = gains.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(match mode {
        GainAggregation::Min => min,
        GainAggregation::Mean => {
            let excess: f64 = gains.iter().map(|g| g - min).sum();
            min + excess / gains.len() as f64
        }
    })
}

/// Which users each AP serves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Association {
    n_users: usize,
    cells: Vec<Vec<usize>>,
}

impl Association {
    /// Every user belongs to every AP's cell.
    pub fn full(n_users: usize, n_aps: usize) -> Self {
        Self {
            n_users,
            cells: vec![(0..n_users).collect(); n_aps],
        }
    }

    /// Explicit cells, one list of user indices per AP.
    pub fn from_cells(n_users: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        for (j, cell) in cells.iter().enumerate() {
            if let Some(&u) = cell.iter().find(|&&u| u >= n_users) {
                return Err(SimError::Config(format!(
                    "AP {j} lists user index {u} but only {n_users} users exist"
                )));
            }
            let mut sorted = cell.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != cell.len() {
                return Err(SimError::Config(format!("AP {j} lists a user twice")));
            }
        }
        Ok(Self { n_users, cells })
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_aps(&self) -> usize {
        self.cells.len()
    }

    pub fn users_of(&self, ap: usize) -> &[usize] {
        &self.cells[ap]
    }

    pub fn serves(&self, ap: usize, user: usize) -> bool {
        self.cells[ap].contains(&user)
    }
}

/// Squared channel magnitudes per (user, AP).
#[derive(Debug, Clone, PartialEq)]
pub struct GainTable {
    n_users: usize,
    n_aps: usize,
    values: Vec<f64>,
}

impl GainTable {
    pub fn new(n_users: usize, n_aps: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_users * n_aps {
            return Err(SimError::Shape(format!(
                "gain table {n_users}x{n_aps} needs {} values, got {}",
                n_users * n_aps,
                values.len()
            )));
        }
        if values.iter().any(|g| !(*g >= 0.0)) {
            return Err(SimError::InvalidInput("gains must be non-negative".into()));
        }
        Ok(Self {
            n_users,
            n_aps,
            values,
        })
    }

    pub fn from_fn(
        n_users: usize,
        n_aps: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(n_users * n_aps);
        for i in 0..n_users {
            for j in 0..n_aps {
                values.push(f(i, j));
            }
        }
        Self::new(n_users, n_aps, values)
    }

    pub fn get(&self, user: usize, ap: usize) -> f64 {
        self.values[user * self.n_aps + ap]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_users, self.n_aps)
    }
}

fn check_inputs(
    user: usize,
    ap: usize,
    powers: &[f64],
    expected_powers: usize,
    gains: &GainTable,
    assoc: &Association,
    sigma_sq: f64,
) -> Result<()> {
    if gains.shape() != (assoc.n_users(), assoc.n_aps()) {
        return Err(SimError::Shape(format!(
            "gain table {:?} does not match association {}x{}",
            gains.shape(),
            assoc.n_users(),
            assoc.n_aps()
        )));
    }
    if powers.len() != expected_powers {
        return Err(SimError::Shape(format!(
            "expected {expected_powers} powers, got {}",
            powers.len()
        )));
    }
    if user >= assoc.n_users() || ap >= assoc.n_aps() {
        return Err(SimError::InvalidInput(format!(
            "link (user {user}, AP {ap}) out of range"
        )));
    }
    if !(sigma_sq > 0.0) {
        return Err(SimError::InvalidInput(format!(
            "noise power must be > 0, got {sigma_sq}"
        )));
    }
    Ok(())
}

/// UL SINR of user `i` at AP `j` on one subcarrier:
///
/// ```text
/// P_i g_ij / (sigma^2 + sum_{l != i, l in U_j} P_l g_lj
///                     + sum_{b != j} sum_{k != i, k in U_b} P_k g_kb)
/// ```
pub fn sinr_ul(
    user: usize,
    ap: usize,
    user_powers: &[f64],
    gains: &GainTable,
    assoc: &Association,
    sigma_sq: f64,
) -> Result<f64> {
    check_inputs(
        user,
        ap,
        user_powers,
        assoc.n_users(),
        gains,
        assoc,
        sigma_sq,
    )?;
    let signal = user_powers[user] * gains.get(user, ap);
    let intra: f64 = assoc
        .users_of(ap)
        .iter()
        .filter(|&&l| l != user)
        .map(|&l| user_powers[l] * gains.get(l, ap))
        .sum();
    let inter: f64 = (0..assoc.n_aps())
        .filter(|&b| b != ap)
        .map(|b| {
            assoc
                .users_of(b)
                .iter()
                .filter(|&&k| k != user)
                .map(|&k| user_powers[k] * gains.get(k, b))
                .sum::<f64>()
        })
        .sum();
    Ok(signal / (sigma_sq + intra + inter))
}

/// DL SINR of user `i` served by AP `j`, from aggregated gains:
///
/// ```text
/// P_j g_ij / (sigma^2 + sum_{l != i, l in U_j} P_j g_lj
///                     + sum_{b != j} sum_{k != i, k in U_b} P_b g_kb)
/// ```
pub fn sinr_dl(
    user: usize,
    ap: usize,
    ap_powers: &[f64],
    gains: &GainTable,
    assoc: &Association,
    sigma_sq: f64,
) -> Result<f64> {
    check_inputs(user, ap, ap_powers, assoc.n_aps(), gains, assoc, sigma_sq)?;
    let p_j = ap_powers[ap];
    let signal = p_j * gains.get(user, ap);
    let intra: f64 = assoc
        .users_of(ap)
        .iter()
        .filter(|&&l| l != user)
        .map(|&l| p_j * gains.get(l, ap))
        .sum();
    let inter: f64 = (0..assoc.n_aps())
        .filter(|&b| b != ap)
        .map(|b| {
            assoc
                .users_of(b)
                .iter()
                .filter(|&&k| k != user)
                .map(|&k| ap_powers[b] * gains.get(k, b))
                .sum::<f64>()
        })
        .sum();
    Ok(signal / (sigma_sq + intra + inter))
}

/// Shannon rate `bw * log2(1 + sinr)` in bits/s.
pub fn rate(bw: f64, sinr: f64) -> f64 {
    bw * sinr.ln_1p() / LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn noise_examples() {
        assert_eq!(noise_power(0.0, 1.0), 1.0);
        assert_relative_eq!(noise_power(10.0, 1.0), 0.1, max_relative = 1e-15);
        assert_relative_eq!(noise_power(3.0, 0.01), 0.0050119, max_relative = 1e-5);
        assert!(NoiseModel::new(0.0, 0.0).is_err());
    }

    #[test]
    fn aggregation_examples() {
        assert_eq!(
            aggregate_gain(&[1.0, 2.0, 3.0], GainAggregation::Mean).unwrap(),
            2.0
        );
        assert_eq!(
            aggregate_gain(&[1.0, 2.0, 3.0], GainAggregation::Min).unwrap(),
            1.0
        );
        assert!(aggregate_gain(&[], GainAggregation::Min).is_err());
        assert!(aggregate_gain(&[-1.0], GainAggregation::Min).is_err());
        assert_eq!(
            "min".parse::<GainAggregation>().unwrap(),
            GainAggregation::Min
        );
        assert!("max".parse::<GainAggregation>().is_err());
    }

    #[test]
    fn sinr_ul_examples() {
        let single = Association::full(1, 1);
        let g = GainTable::new(1, 1, vec![1.0]).unwrap();
        assert_eq!(sinr_ul(0, 0, &[1.0], &g, &single, 0.5).unwrap(), 2.0);
        assert_eq!(sinr_ul(0, 0, &[0.0], &g, &single, 0.5).unwrap(), 0.0);

        let pair = Association::full(2, 1);
        let g = GainTable::new(2, 1, vec![1.0, 1.0]).unwrap();
        assert_eq!(sinr_ul(0, 0, &[1.0, 1.0], &g, &pair, 1.0).unwrap(), 0.5);
        assert!(sinr_ul(0, 0, &[1.0], &g, &pair, 1.0).is_err());
    }

    #[test]
    fn sinr_dl_examples() {
        let single = Association::full(1, 1);
        let g = GainTable::new(1, 1, vec![1.0]).unwrap();
        assert_relative_eq!(sinr_dl(0, 0, &[0.01], &g, &single, 0.01).unwrap(), 1.0);

        let pair = Association::full(2, 1);
        let g = GainTable::new(2, 1, vec![1.0, 1.0]).unwrap();
        let s = sinr_dl(0, 0, &[1.0], &g, &pair, 1e-15).unwrap();
        assert_relative_eq!(s, 1.0, max_relative = 1e-12);

        let g = GainTable::new(1, 1, vec![0.0]).unwrap();
        assert_eq!(sinr_dl(0, 0, &[0.01], &g, &single, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn rate_examples() {
        assert_eq!(rate(1.0, 1.0), 1.0);
        assert_relative_eq!(rate(2.0, 3.0), 4.0, max_relative = 1e-15);
        assert_relative_eq!(rate(1e6, 10.0), 3.4594316e6, max_relative = 1e-7);
        assert_eq!(rate(1e6, 0.0), 0.0);
    }

    #[test]
    fn cells_respected() {
        // User 1 only in AP 1's cell: it must not interfere at AP 0.
        let assoc = Association::from_cells(2, vec![vec![0], vec![1]]).unwrap();
        let g = GainTable::new(2, 2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let s = sinr_ul(0, 0, &[1.0, 1.0], &g, &assoc, 1.0).unwrap();
        assert_eq!(s, 1.0 / (1.0 + 1.0));
        assert!(Association::from_cells(2, vec![vec![2]]).is_err());
        assert!(Association::from_cells(2, vec![vec![0, 0]]).is_err());
    }

    proptest! {
        #[test]
        fn min_never_exceeds_mean(v in prop::collection::vec(0.0f64..1e3, 1..80)) {
            let mean = aggregate_gain(&v, GainAggregation::Mean).unwrap();
            let min = aggregate_gain(&v, GainAggregation::Min).unwrap();
            prop_assert!(min <= mean);
            prop_assert!(mean <= v.iter().copied().fold(0.0, f64::max) * (1.0 + 1e-12));
        }

        #[test]
        fn sinr_monotone_in_noise_and_interference(
            g in prop::collection::vec(0.0f64..2.0, 4),
            p in prop::collection::vec(0.0f64..1.0, 2),
            s1 in 1e-3f64..1.0, extra in 0.0f64..1.0, boost in 0.0f64..1.0,
        ) {
            let assoc = Association::full(2, 2);
            let table = GainTable::new(2, 2, g).unwrap();
            let base = sinr_ul(0, 1, &p, &table, &assoc, s1).unwrap();
            prop_assert!(base >= 0.0);
            prop_assert!(sinr_ul(0, 1, &p, &table, &assoc, s1 + extra).unwrap() <= base);
            let louder = [p[0], p[1] + boost];
            prop_assert!(sinr_ul(0, 1, &louder, &table, &assoc, s1).unwrap() <= base);
            prop_assert!(rate(1.0, base + extra) >= rate(1.0, base));
        }
    }
}
