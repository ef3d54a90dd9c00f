//! Flat `key = value` sweep configuration.
//!
//! One key per line, `#` starts a comment, lists are comma separated and
//! position lists separate points with `;`. Every key is optional; missing
//! keys keep the defaults of [`SweepConfig::default`].

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::beamforming::Codebook;
use crate::channel::{ArrayConfig, ChannelConfig, SmallScaleModel, SubcarrierGrid, TapProfile};
use crate::error::{Result, SimError};
use crate::linkmetrics::GainAggregation;
use crate::qos::TrafficModel;
use crate::topology::{AccessPoint, IndoorArea, NetworkTopology, Position3D, User};

/// Interpretation of the queue rates `mu` and `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueueUnits {
    /// `mu = 4e-9`, `lambda = 2e-9` as tabulated.
    AsPrinted,
    /// `mu = 4e9`, `lambda = 2e9`.
    Reciprocal,
}

impl QueueUnits {
    pub fn rates(&self) -> (f64, f64) {
        match self {
            QueueUnits::AsPrinted => (4e-9, 2e-9),
            QueueUnits::Reciprocal => (4e9, 2e9),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "paper" => Ok(QueueUnits::AsPrinted),
            "reciprocal" => Ok(QueueUnits::Reciprocal),
            other => Err(SimError::Config(format!(
                "unknown queue units '{other}', expected paper or reciprocal"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Placement {
    /// Explicit coordinates, one per AP and one per user.
    Fixed {
        aps: Vec<Position3D>,
        users: Vec<Position3D>,
    },
    /// Uniform draws inside the area from the run seed.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub fc: f64,
    pub pathloss_exponent: f64,
    pub n_sc: usize,
    pub bw_total: f64,
    pub n_t: Vec<usize>,
    pub n_rf: Vec<usize>,
    /// Explicit codebook list; replaces the `n_t` x `n_rf` product when set.
    pub codebook_list: Option<Vec<Codebook>>,
    pub n_r: usize,
    pub s_bits: f64,
    pub a_bits: f64,
    pub v_bits: f64,
    pub n_aps: usize,
    pub n_users: usize,
    pub p_b: f64,
    pub p_u: f64,
    pub mu: f64,
    pub lambda: f64,
    pub gamma_d: f64,
    pub r_min: f64,
    pub v_j: usize,
    pub esn0_start: f64,
    pub esn0_step: f64,
    pub esn0_stop: f64,
    pub scenarios: Vec<GainAggregation>,
    pub seed: u64,
    pub tap_count: usize,
    /// Tap spacing in seconds; `None` means one sample period `1/bw_total`.
    pub tap_spacing: Option<f64>,
    pub antenna_spacing: f64,
    pub epsilon0: f64,
    pub m_capacity: f64,
    pub n_share: f64,
    pub gain_model: SmallScaleModel,
    pub array_gain: bool,
    pub placement: Placement,
    pub area: IndoorArea,
    pub mode_bin: f64,
}

pub const DEFAULT_AP_POSITIONS: [Position3D; 2] = [
    Position3D::new(2.5, 4.0, 2.5),
    Position3D::new(7.5, 13.0, 2.5),
];
pub const DEFAULT_USER_POSITIONS: [Position3D; 2] = [
    Position3D::new(3.0, 6.0, 1.5),
    Position3D::new(6.5, 11.0, 1.5),
];

impl Default for SweepConfig {
    fn default() -> Self {
        let (mu, lambda) = QueueUnits::AsPrinted.rates();
        Self {
            fc: 60e9,
            pathloss_exponent: 3.2,
            n_sc: 64,
            bw_total: 2.16e9,
            n_t: vec![2, 4, 8],
            n_rf: vec![1, 2],
            codebook_list: None,
            n_r: 1,
            s_bits: 512.0 * 24.0,
            a_bits: 6.0,
            v_bits: 5.0,
            n_aps: 2,
            n_users: 2,
            p_b: 10e-3,
            p_u: 5e-3,
            mu,
            lambda,
            gamma_d: 0.02,
            r_min: 0.0,
            v_j: 2,
            esn0_start: 0.0,
            esn0_step: 1.0,
            esn0_stop: 20.0,
            scenarios: GainAggregation::ALL.to_vec(),
            seed: 1,
            tap_count: 4,
            tap_spacing: None,
            antenna_spacing: 0.5,
            epsilon0: 0.01,
            m_capacity: 1e6,
            n_share: 2.0,
            gain_model: SmallScaleModel::Gaussian,
            array_gain: true,
            placement: Placement::Fixed {
                aps: DEFAULT_AP_POSITIONS.to_vec(),
                users: DEFAULT_USER_POSITIONS.to_vec(),
            },
            area: IndoorArea::default(),
            mode_bin: 1e-6,
        }
    }
}

fn num(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| SimError::Config(format!("{key}: '{v}' is not a number")))?;
    if !x.is_finite() {
        return Err(SimError::Config(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn count(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| SimError::Config(format!("{key}: '{v}' is not a non-negative integer")))
}

fn count_list(key: &str, v: &str) -> Result<Vec<usize>> {
    let out = v
        .split(',')
        .map(|t| count(key, t))
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        return Err(SimError::Config(format!("{key}: empty list")));
    }
    Ok(out)
}

fn positions(key: &str, v: &str) -> Result<Vec<Position3D>> {
    v.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let c: Vec<f64> = p.split(',').map(|t| num(key, t)).collect::<Result<_>>()?;
            match c.as_slice() {
                [x, y, z] => Ok(Position3D::new(*x, *y, *z)),
                _ => Err(SimError::Config(format!("{key}: '{p}' must be x,y,z"))),
            }
        })
        .collect()
}

fn range(key: &str, v: &str) -> Result<std::ops::RangeInclusive<f64>> {
    let (a, b) = v
        .split_once(',')
        .ok_or_else(|| SimError::Config(format!("{key}: expected lo,hi")))?;
    Ok(num(key, a)?..=num(key, b)?)
}

fn flag(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(SimError::Config(format!("{key}: '{other}' is not on/off"))),
    }
}

/// Parses `mean`, `min` or `both`.
pub fn parse_scenarios(v: &str) -> Result<Vec<GainAggregation>> {
    match v.trim() {
        "both" => Ok(GainAggregation::ALL.to_vec()),
        "" => Err(SimError::Config("scenario list is empty".into())),
        other => {
            let mut out = other
                .split(',')
                .map(str::parse)
                .collect::<Result<Vec<GainAggregation>>>()?;
            out.sort();
            out.dedup();
            Ok(out)
        }
    }
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut ap_pos = None;
        let mut user_pos = None;
        let mut random = false;
        let mut codebook_spec = None;
        let mut explicit_queue = (None, None);
        let mut units = QueueUnits::AsPrinted;
        let (mut ax, mut ay, mut az) = (
            cfg.area.x_range.clone(),
            cfg.area.y_range.clone(),
            cfg.area.z_range.clone(),
        );

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SimError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "fc" => cfg.fc = num(key, value)?,
                "w" => cfg.pathloss_exponent = num(key, value)?,
                "n_sc" => cfg.n_sc = count(key, value)?,
                "bw_total" => cfg.bw_total = num(key, value)?,
                "n_t" => cfg.n_t = count_list(key, value)?,
                "n_rf" => cfg.n_rf = count_list(key, value)?,
                "n_r" => cfg.n_r = count(key, value)?,
                "codebooks" => codebook_spec = Some(value.to_string()),
                "s_i" => cfg.s_bits = num(key, value)?,
                "a_i" => cfg.a_bits = num(key, value)?,
                "v" => cfg.v_bits = num(key, value)?,
                "b" => cfg.n_aps = count(key, value)?,
                "u" => cfg.n_users = count(key, value)?,
                "p_b" => cfg.p_b = num(key, value)?,
                "p_u" => cfg.p_u = num(key, value)?,
                "mu" => explicit_queue.0 = Some(num(key, value)?),
                "lambda" => explicit_queue.1 = Some(num(key, value)?),
                "queue_units" => units = QueueUnits::parse(value)?,
                "gamma_d" => cfg.gamma_d = num(key, value)?,
                "r_min" => cfg.r_min = num(key, value)?,
                "v_j" => cfg.v_j = count(key, value)?,
                "esn0_start" => cfg.esn0_start = num(key, value)?,
                "esn0_step" => cfg.esn0_step = num(key, value)?,
                "esn0_stop" => cfg.esn0_stop = num(key, value)?,
                "scenario" => cfg.scenarios = parse_scenarios(value)?,
                "seed" => {
                    cfg.seed = value
                        .parse()
                        .map_err(|_| SimError::Config(format!("seed: '{value}' is not a u64")))?
                }
                "tap_count" => cfg.tap_count = count(key, value)?,
                "tap_spacing" => cfg.tap_spacing = Some(num(key, value)?),
                "antenna_spacing" => cfg.antenna_spacing = num(key, value)?,
                "epsilon0" => cfg.epsilon0 = num(key, value)?,
                "m_capacity" => cfg.m_capacity = num(key, value)?,
                "n_share" => cfg.n_share = num(key, value)?,
                "gain_model" => {
                    cfg.gain_model = match value {
                        "gaussian" => SmallScaleModel::Gaussian,
                        "ramp" => SmallScaleModel::PhaseRamp,
                        other => {
                            return Err(SimError::Config(format!(
                                "gain_model: '{other}' is not gaussian or ramp"
                            )))
                        }
                    }
                }
                "array_gain" => cfg.array_gain = flag(key, value)?,
                "placement" => {
                    random = match value {
                        "random" => true,
                        "fixed" => false,
                        other => {
                            return Err(SimError::Config(format!(
                                "placement: '{other}' is not fixed or random"
                            )))
                        }
                    }
                }
                "ap_pos" => ap_pos = Some(positions(key, value)?),
                "user_pos" => user_pos = Some(positions(key, value)?),
                "area_x" => ax = range(key, value)?,
                "area_y" => ay = range(key, value)?,
                "area_z" => az = range(key, value)?,
                "mode_bin" => cfg.mode_bin = num(key, value)?,
                other => {
                    return Err(SimError::Config(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }

        cfg.area = IndoorArea::new(ax, ay, az)?;
        if let Some(spec) = codebook_spec {
            cfg.set_codebook_spec(&spec)?;
        }
        cfg.set_queue_units(units);
        if let Some(mu) = explicit_queue.0 {
            cfg.mu = mu;
        }
        if let Some(lambda) = explicit_queue.1 {
            cfg.lambda = lambda;
        }
        cfg.placement = if random {
            Placement::Random
        } else {
            Placement::Fixed {
                aps: ap_pos.unwrap_or_else(|| DEFAULT_AP_POSITIONS.to_vec()),
                users: user_pos.unwrap_or_else(|| DEFAULT_USER_POSITIONS.to_vec()),
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set_queue_units(&mut self, units: QueueUnits) {
        (self.mu, self.lambda) = units.rates();
    }

    /// Applies a `start:step:stop` override.
    pub fn set_esn0_spec(&mut self, spec: &str) -> Result<()> {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, step, stop] = parts.as_slice() else {
            return Err(SimError::Config(format!(
                "Es/N0 grid '{spec}' must be start:step:stop"
            )));
        };
        self.esn0_start = num("esn0", start)?;
        self.esn0_step = num("esn0", step)?;
        self.esn0_stop = num("esn0", stop)?;
        Ok(())
    }

    /// Applies a `NTxNRF,...` override that replaces the `n_t` x `n_rf`
    /// product.
    pub fn set_codebook_spec(&mut self, spec: &str) -> Result<()> {
        let list = spec
            .split(',')
            .map(|t| {
                let c = t.parse::<Codebook>()?;
                Codebook::new(c.n_tx, c.n_rf, self.n_r, 1)
            })
            .collect::<Result<Vec<_>>>()?;
        self.codebook_list = Some(list);
        Ok(())
    }

    /// Codebooks of the sweep in (n_tx, n_rf) order. Pairs of the `n_t` x
    /// `n_rf` product with `n_rf > n_tx` are skipped.
    pub fn codebooks(&self) -> Result<Vec<Codebook>> {
        let mut out = Vec::new();
        if let Some(list) = &self.codebook_list {
            out.clone_from(list);
        } else {
            for &t in &self.n_t {
                for &r in &self.n_rf {
                    if r <= t {
                        out.push(Codebook::new(t, r, self.n_r, 1)?);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(SimError::Config("no valid (n_t, n_rf) pair".into()));
        }
        Ok(out)
    }

    /// `start + k * step` for every k with the value not past `stop`.
    pub fn esn0_grid(&self) -> Result<Vec<f64>> {
        if !(self.esn0_step > 0.0) || self.esn0_start > self.esn0_stop {
            return Err(SimError::Config(format!(
                "Es/N0 grid {}:{}:{} must have step > 0 and start <= stop",
                self.esn0_start, self.esn0_step, self.esn0_stop
            )));
        }
        let n = ((self.esn0_stop - self.esn0_start) / self.esn0_step + 1e-9).floor() as usize + 1;
        Ok((0..n)
            .map(|k| self.esn0_start + k as f64 * self.esn0_step)
            .collect())
    }

    pub fn traffic(&self) -> Result<TrafficModel> {
        TrafficModel::new(
            self.s_bits,
            self.a_bits,
            self.v_bits,
            self.m_capacity,
            self.n_share,
            self.mu,
            self.lambda,
        )
    }

    pub fn channel_config(&self) -> Result<ChannelConfig> {
        let grid = SubcarrierGrid::new(self.n_sc, self.fc, self.bw_total)?;
        let spacing_s = self.tap_spacing.unwrap_or_else(|| grid.sampling_period());
        Ok(ChannelConfig {
            grid,
            pathloss_exponent: self.pathloss_exponent,
            small_scale: self.gain_model,
            seed: self.seed,
            taps: TapProfile {
                count: self.tap_count,
                spacing_s,
            },
            array: ArrayConfig {
                spacing_over_wavelength: self.antenna_spacing,
                array_gain: self.array_gain,
            },
        })
    }

    pub fn topology(&self) -> Result<NetworkTopology> {
        let (ap_pos, user_pos) = match &self.placement {
            Placement::Fixed { aps, users } => {
                if aps.len() != self.n_aps || users.len() != self.n_users {
                    return Err(SimError::Config(format!(
                        "{} AP and {} user positions given for b={} and u={}",
                        aps.len(),
                        users.len(),
                        self.n_aps,
                        self.n_users
                    )));
                }
                (aps.clone(), users.clone())
            }
            Placement::Random => {
                // Separate stream from the small-scale draws of the same seed.
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(1);
                let aps = (0..self.n_aps)
                    .map(|_| self.area.sample(&mut rng))
                    .collect();
                let users = (0..self.n_users)
                    .map(|_| self.area.sample(&mut rng))
                    .collect();
                (aps, users)
            }
        };
        let aps = ap_pos
            .into_iter()
            .enumerate()
            .map(|(k, position)| AccessPoint {
                id: k + 1,
                position,
                power_w: self.p_b,
                service_rate: self.mu,
            })
            .collect();
        let users = user_pos
            .into_iter()
            .enumerate()
            .map(|(k, position)| User {
                id: k + 1,
                position,
                power_w: self.p_u,
                arrival_rate: self.lambda,
                delay_tolerance_s: self.gamma_d,
                reference_position: position,
            })
            .collect();
        NetworkTopology::new(self.area.clone(), aps, users)
    }

    /// Checks everything that can be checked before any evaluation.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("fc", self.fc),
            ("w", self.pathloss_exponent),
            ("bw_total", self.bw_total),
            ("p_b", self.p_b),
            ("antenna_spacing", self.antenna_spacing),
            ("epsilon0", self.epsilon0),
            ("mode_bin", self.mode_bin),
        ];
        for (k, v) in positive {
            if !(v > 0.0) {
                return Err(SimError::Config(format!("{k} must be > 0, got {v}")));
            }
        }
        for (k, v) in [
            ("p_u", self.p_u),
            ("gamma_d", self.gamma_d),
            ("r_min", self.r_min),
        ] {
            if !(v >= 0.0) {
                return Err(SimError::Config(format!("{k} must be >= 0, got {v}")));
            }
        }
        if self.n_aps == 0 || self.n_users == 0 || self.n_sc == 0 || self.n_r == 0 {
            return Err(SimError::Config("b, u, n_sc and n_r must be >= 1".into()));
        }
        if self.tap_count == 0 {
            return Err(SimError::Config("tap_count must be >= 1".into()));
        }
        if let Some(s) = self.tap_spacing {
            if !(s >= 0.0) {
                return Err(SimError::Config(format!(
                    "tap_spacing must be >= 0, got {s}"
                )));
            }
        }
        if self.scenarios.is_empty() {
            return Err(SimError::Config("scenario list is empty".into()));
        }
        self.codebooks()?;
        self.esn0_grid()?;
        self.traffic()?;
        self.channel_config()?;
        self.topology()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_complete() {
        let cfg = SweepConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.codebooks().unwrap().len(), 6);
        let grid = cfg.esn0_grid().unwrap();
        assert_eq!(grid.len(), 21);
        assert_eq!(grid[20], 20.0);
        assert_eq!(cfg.scenarios.len(), 2);
    }

    #[test]
    fn parses_keys_comments_and_lists() {
        let text = "\
# test
n_t = 2, 4   # antennas
n_rf = 1
esn0_start = 0
esn0_step = 0.5
esn0_stop = 2
scenario = min
queue_units = reciprocal
gain_model = ramp
array_gain = off
ap_pos = 1,1,2.5; 9,16,2.5
user_pos = 2,3,1.5; 8,14,1.5
";
        let cfg = SweepConfig::parse(text).unwrap();
        assert_eq!(cfg.n_t, vec![2, 4]);
        assert_eq!(cfg.codebooks().unwrap().len(), 2);
        assert_eq!(cfg.esn0_grid().unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(cfg.scenarios, vec![GainAggregation::Min]);
        assert_eq!((cfg.mu, cfg.lambda), (4e9, 2e9));
        assert_eq!(cfg.gain_model, SmallScaleModel::PhaseRamp);
        assert!(!cfg.array_gain);
        let topo = cfg.topology().unwrap();
        assert_eq!(topo.users()[1].position, Position3D::new(8.0, 14.0, 1.5));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SweepConfig::parse("bogus = 1").is_err());
        assert!(SweepConfig::parse("n_sc").is_err());
        assert!(SweepConfig::parse("n_sc = -3").is_err());
        assert!(SweepConfig::parse("mu = 1\nlambda = 2").is_err());
        assert!(SweepConfig::parse("esn0_step = 0").is_err());
        assert!(SweepConfig::parse("u = 3").is_err());
        assert!(SweepConfig::parse("ap_pos = 1,2").is_err());
        assert!(SweepConfig::parse("ap_pos = 50,1,1; 2,2,2").is_err());
        assert!(matches!(
            SweepConfig::parse("scenario = max"),
            Err(SimError::Config(_))
        ));
    }

    #[test]
    fn random_placement_is_seeded() {
        let cfg = SweepConfig::parse("placement = random\nu = 3\nb = 2\nseed = 9").unwrap();
        let a = cfg.topology().unwrap();
        let b = cfg.topology().unwrap();
        assert_eq!(a.users(), b.users());
        assert_eq!(a.n_users(), 3);
    }

    #[test]
    fn overrides() {
        let mut cfg = SweepConfig::default();
        cfg.set_esn0_spec("5:5:15").unwrap();
        assert_eq!(cfg.esn0_grid().unwrap(), vec![5.0, 10.0, 15.0]);
        assert!(cfg.set_esn0_spec("1:2").is_err());
        cfg.set_codebook_spec("8x2,2x1").unwrap();
        let list = cfg.codebooks().unwrap();
        assert_eq!(
            list.iter().map(|c| c.label()).collect::<Vec<_>>(),
            ["2A1R", "8A2R"]
        );
        assert!(cfg.set_codebook_spec("2x3").is_err());
        assert_eq!(parse_scenarios("both").unwrap().len(), 2);
    }
}
