//! UL scalar channels and rank-1 LoS DL channel matrices per subcarrier.
//!
//! The UL channel of user `i` towards AP `j` on subcarrier `n` is
//! `g_n * d_ij^-w`. The DL channel matrix is
//!
//! ```text
//! H_ij,n = 10^(FSPL_dB / 10) * c_n * sum_k exp(-k*dt / tau_ij) * a_rx(aoa) * a_tx(aod)^H
//! ```
//!
//! where `c_n` is the per-subcarrier small-scale coefficient (the 1-degree
//! phase ramp, or a seeded complex Gaussian draw) and `tau_ij = d_ij / c`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, SimError};
use crate::numerics::ComplexMatrix;
use crate::topology::{departure_arrival_angles, NetworkTopology, Position3D};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// OFDM subcarrier layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierGrid {
    n_sc: usize,
    carrier_frequency: f64,
    total_bandwidth: f64,
}

impl SubcarrierGrid {
    pub fn new(n_sc: usize, carrier_frequency: f64, total_bandwidth: f64) -> Result<Self> {
        if n_sc == 0 {
            return Err(SimError::Config("need at least one subcarrier".into()));
        }
        if !(carrier_frequency > 0.0 && carrier_frequency.is_finite()) {
            return Err(SimError::Config(format!(
                "carrier frequency must be positive, got {carrier_frequency}"
            )));
        }
        if !(total_bandwidth > 0.0 && total_bandwidth.is_finite()) {
            return Err(SimError::Config(format!(
                "bandwidth must be positive, got {total_bandwidth}"
            )));
        }
        Ok(Self {
            n_sc,
            carrier_frequency,
            total_bandwidth,
        })
    }

    pub fn n_sc(&self) -> usize {
        self.n_sc
    }

    pub fn carrier_frequency(&self) -> f64 {
        self.carrier_frequency
    }

    pub fn total_bandwidth(&self) -> f64 {
        self.total_bandwidth
    }

    pub fn subcarrier_bandwidth(&self) -> f64 {
        self.total_bandwidth / self.n_sc as f64
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    /// Sample period `1 / total_bandwidth`, the default DL tap spacing.
    pub fn sampling_period(&self) -> f64 {
        1.0 / self.total_bandwidth
    }
}

/// Unit-modulus ramp `exp(j * n * pi/180)` for `n = 1..=n_sc`.
pub fn subcarrier_phase_ramp(n_sc: usize) -> Vec<Complex64> {
    (1..=n_sc)
        .map(|n| Complex64::from_polar(1.0, n as f64 * PI / 180.0))
        .collect()
}

/// UL coefficient `ramp_n * d^-w`.
pub fn ul_channel(d: f64, w: f64, ramp_n: Complex64) -> Result<Complex64> {
    if !(d > 0.0) {
        return Err(SimError::DegenerateGeometry(format!(
            "UL distance must be positive, got {d}"
        )));
    }
    Ok(ramp_n * d.powf(-w))
}

/// Free-space path loss `20 log10(lambda / (4 pi d))` in dB (negative beyond
/// `lambda / 4pi`).
pub fn fspl_db(d: f64, wavelength: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(SimError::DegenerateGeometry(format!(
            "path-loss distance must be positive, got {d}"
        )));
    }
    if !(wavelength > 0.0) {
        return Err(SimError::InvalidInput(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    Ok(20.0 * (wavelength / (4.0 * PI * d)).log10())
}

/// Path gain of one subcarrier: distance-only magnitude plus the ramp phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGain {
    pub gain_db: f64,
    pub phase: f64,
}

pub fn path_gain_per_subcarrier(d: f64, grid: &SubcarrierGrid) -> Result<Vec<PathGain>> {
    let gain_db = fspl_db(d, grid.wavelength())?;
    Ok((1..=grid.n_sc())
        .map(|n| PathGain {
            gain_db,
            phase: n as f64 * PI / 180.0,
        })
        .collect())
}

/// ULA response `(1/sqrt(N)) exp(-j k 2pi (d/lambda) sin(theta))`, k = 0..N-1.
pub fn steering_vector(
    n_elements: usize,
    azimuth_deg: f64,
    spacing_over_wavelength: f64,
) -> Vec<Complex64> {
    let amp = 1.0 / (n_elements as f64).sqrt();
    let step = -2.0 * PI * spacing_over_wavelength * azimuth_deg.to_radians().sin();
    (0..n_elements)
        .map(|k| Complex64::from_polar(amp, k as f64 * step))
        .collect()
}

/// How the per-subcarrier small-scale coefficient is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallScaleModel {
    /// Deterministic unit-modulus ramp, 1 degree per subcarrier.
    PhaseRamp,
    /// Seeded circularly-symmetric complex Gaussian, unit mean power.
    Gaussian,
}

/// Discrete delay taps `t_k = k * spacing`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TapProfile {
    pub count: usize,
    pub spacing_s: f64,
}

impl TapProfile {
    /// `sum_k exp(-t_k / tau)`.
    pub fn decay_sum(&self, tau: f64) -> f64 {
        (0..self.count)
            .map(|k| (-(k as f64) * self.spacing_s / tau).exp())
            .sum()
    }
}

/// Antenna array options shared by the AP and user ULAs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig {
    /// Element spacing in wavelengths.
    pub spacing_over_wavelength: f64,
    /// Scale the DL matrix by `sqrt(Nt * Nr)` so larger arrays collect more
    /// energy. Off gives a unit-norm steering outer product.
    pub array_gain: bool,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            spacing_over_wavelength: 0.5,
            array_gain: true,
        }
    }
}

/// Geometry of one AP -> user link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub distance: f64,
    pub aod_deg: f64,
    pub aoa_deg: f64,
}

impl LinkGeometry {
    /// AP is the transmitter and the user the receiver.
    pub fn between(ap: Position3D, user: Position3D) -> Result<Self> {
        let (aod_deg, aoa_deg) = departure_arrival_angles(ap, user)?;
        Ok(Self {
            distance: crate::topology::distance(ap, user),
            aod_deg,
            aoa_deg,
        })
    }

    /// Propagation delay `d / c`.
    pub fn delay(&self) -> f64 {
        self.distance / SPEED_OF_LIGHT
    }
}

/// DL channel of one link on one subcarrier, shape `n_rx x n_tx`, rank 1.
pub fn dl_channel_matrix(
    link: &LinkGeometry,
    coefficient: Complex64,
    wavelength: f64,
    (n_tx, n_rx): (usize, usize),
    taps: &TapProfile,
    array: &ArrayConfig,
) -> Result<ComplexMatrix> {
    if n_tx == 0 || n_rx == 0 {
        return Err(SimError::Shape("antenna counts must be >= 1".into()));
    }
    if taps.count == 0 {
        return Err(SimError::Config("tap count must be >= 1".into()));
    }
    let pg_db = fspl_db(link.distance, wavelength)?;
    let mut amplitude = 10f64.powf(pg_db / 10.0) * taps.decay_sum(link.delay());
    if array.array_gain {
        amplitude *= ((n_tx * n_rx) as f64).sqrt();
    }
    let a_tx = steering_vector(n_tx, link.aod_deg, array.spacing_over_wavelength);
    let a_rx = steering_vector(n_rx, link.aoa_deg, array.spacing_over_wavelength);
    let scale = coefficient * amplitude;
    Ok(ComplexMatrix::from_fn(n_rx, n_tx, |r, c| {
        scale * a_rx[r] * a_tx[c].conj()
    }))
}

/// Channel synthesis settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub grid: SubcarrierGrid,
    /// UL path-loss exponent `w`.
    pub pathloss_exponent: f64,
    pub small_scale: SmallScaleModel,
    pub seed: u64,
    pub taps: TapProfile,
    pub array: ArrayConfig,
}

/// Codebook-independent channel state of one (user, AP) link.
#[derive(Debug, Clone)]
pub struct LinkScalars {
    pub geometry: LinkGeometry,
    /// UL coefficients `h_ijn`, one per subcarrier.
    pub ul: Vec<Complex64>,
    /// DL small-scale coefficients `c_n`, one per subcarrier.
    pub dl_coefficients: Vec<Complex64>,
}

impl LinkScalars {
    /// `|h_ijn|^2`.
    pub fn ul_gains(&self) -> Vec<f64> {
        self.ul.iter().map(|h| h.norm_sqr()).collect()
    }

    /// Aggregate UL channel `sum_n h_ijn`.
    pub fn ul_aggregate(&self) -> Complex64 {
        self.ul.iter().sum()
    }
}

/// UL coefficients and DL small-scale draws for every (user, AP) pair.
#[derive(Debug, Clone)]
pub struct LinkChannelSet {
    n_users: usize,
    n_aps: usize,
    links: Vec<LinkScalars>,
}

impl LinkChannelSet {
    /// Draws are taken in (user, AP) order, UL block then DL block, so the
    /// result depends only on the topology, subcarrier count and seed.
    pub fn synthesize(topology: &NetworkTopology, config: &ChannelConfig) -> Result<Self> {
        let n_sc = config.grid.n_sc();
        let ramp = subcarrier_phase_ramp(n_sc);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
            match config.small_scale {
                SmallScaleModel::PhaseRamp => ramp.clone(),
                SmallScaleModel::Gaussian => (0..n_sc)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(rng);
                        let im: f64 = StandardNormal.sample(rng);
                        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                    })
                    .collect(),
            }
        };

        let mut links = Vec::with_capacity(topology.n_users() * topology.n_aps());
        for user in topology.users() {
            for ap in topology.aps() {
                let geometry = LinkGeometry::between(ap.position, user.position)?;
                let g_ul = draw(&mut rng);
                let g_dl = draw(&mut rng);
                let ul = g_ul
                    .iter()
                    .map(|&g| ul_channel(geometry.distance, config.pathloss_exponent, g))
                    .collect::<Result<Vec<_>>>()?;
                links.push(LinkScalars {
                    geometry,
                    ul,
                    dl_coefficients: g_dl,
                });
            }
        }
        Ok(Self {
            n_users: topology.n_users(),
            n_aps: topology.n_aps(),
            links,
        })
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_aps(&self) -> usize {
        self.n_aps
    }

    pub fn link(&self, user: usize, ap: usize) -> &LinkScalars {
        &self.links[user * self.n_aps + ap]
    }
}

/// DL channel matrices for one antenna configuration.
#[derive(Debug, Clone)]
pub struct DlChannelSet {
    n_users: usize,
    n_aps: usize,
    n_tx: usize,
    n_rx: usize,
    matrices: Vec<Vec<ComplexMatrix>>,
    delays: Vec<f64>,
    path_gain_db: Vec<f64>,
}

impl DlChannelSet {
    pub fn build(
        links: &LinkChannelSet,
        config: &ChannelConfig,
        n_tx: usize,
        n_rx: usize,
    ) -> Result<Self> {
        let wavelength = config.grid.wavelength();
        let mut matrices = Vec::with_capacity(links.links.len());
        let mut delays = Vec::with_capacity(links.links.len());
        let mut path_gain_db = Vec::with_capacity(links.links.len());
        for link in &links.links {
            let per_sc = link
                .dl_coefficients
                .iter()
                .map(|&c| {
                    dl_channel_matrix(
                        &link.geometry,
                        c,
                        wavelength,
                        (n_tx, n_rx),
                        &config.taps,
                        &config.array,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            matrices.push(per_sc);
            delays.push(link.geometry.delay());
            path_gain_db.push(fspl_db(link.geometry.distance, wavelength)?);
        }
        Ok(Self {
            n_users: links.n_users,
            n_aps: links.n_aps,
            n_tx,
            n_rx,
            matrices,
            delays,
            path_gain_db,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rx, self.n_tx)
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_aps(&self) -> usize {
        self.n_aps
    }

    /// Per-subcarrier matrices of (user, AP).
    pub fn link(&self, user: usize, ap: usize) -> &[ComplexMatrix] {
        &self.matrices[user * self.n_aps + ap]
    }

    pub fn delay(&self, user: usize, ap: usize) -> f64 {
        self.delays[user * self.n_aps + ap]
    }

    pub fn path_gain_db(&self, user: usize, ap: usize) -> f64 {
        self.path_gain_db[user * self.n_aps + ap]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::svd;
    use crate::topology::{AccessPoint, IndoorArea, User};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const LAMBDA_60G: f64 = SPEED_OF_LIGHT / 60e9;

    fn unit_array() -> ArrayConfig {
        ArrayConfig {
            spacing_over_wavelength: 0.5,
            array_gain: false,
        }
    }

    #[test]
    fn ramp_examples() {
        let r = subcarrier_phase_ramp(1);
        assert_abs_diff_eq!(r[0].re, 0.9998477, epsilon = 1e-7);
        assert_abs_diff_eq!(r[0].im, 0.0174524, epsilon = 1e-7);

        let r = subcarrier_phase_ramp(64);
        assert_abs_diff_eq!(r[63].arg(), 1.1170107, epsilon = 1e-7);
        for z in &r {
            assert_abs_diff_eq!(z.norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn ul_examples() {
        assert_eq!(
            ul_channel(1.0, 3.2, Complex64::new(1.0, 0.0)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        let h = ul_channel(2.0, 3.2, Complex64::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(h.re, 0.1088188, epsilon = 1e-7);
        let h = ul_channel(2.0, 3.2, Complex64::from_polar(1.0, 30f64.to_radians())).unwrap();
        assert_abs_diff_eq!(h.norm(), 0.1088188, epsilon = 1e-7);
        assert_abs_diff_eq!(h.arg().to_degrees(), 30.0, epsilon = 1e-9);
        assert!(matches!(
            ul_channel(0.0, 3.2, Complex64::new(1.0, 0.0)),
            Err(SimError::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn fspl_examples() {
        assert_abs_diff_eq!(LAMBDA_60G, 4.99654e-3, epsilon = 1e-8);
        assert_abs_diff_eq!(fspl_db(1.0, LAMBDA_60G).unwrap(), -68.01, epsilon = 5e-3);
        assert_abs_diff_eq!(fspl_db(0.1, LAMBDA_60G).unwrap(), -48.01, epsilon = 5e-3);
        assert_abs_diff_eq!(
            fspl_db(LAMBDA_60G / (4.0 * PI), LAMBDA_60G).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert!(fspl_db(-1.0, LAMBDA_60G).is_err());
    }

    #[test]
    fn path_gain_examples() {
        let grid = SubcarrierGrid::new(90, 60e9, 2.16e9).unwrap();
        let pg = path_gain_per_subcarrier(1.0, &grid).unwrap();
        assert_abs_diff_eq!(pg[0].gain_db, -68.01, epsilon = 5e-3);
        assert_abs_diff_eq!(pg[0].phase, 0.0174533, epsilon = 1e-7);
        assert!(pg.iter().all(|p| p.gain_db == pg[0].gain_db));
        assert_abs_diff_eq!(pg[89].phase, PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn steering_examples() {
        let a = steering_vector(2, 0.0, 0.5);
        for z in &a {
            assert_abs_diff_eq!(z.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-7);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }
        let a = steering_vector(2, 30.0, 0.5);
        assert_abs_diff_eq!(a[0].re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-7);
        assert_abs_diff_eq!(a[1].re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a[1].im, -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-7);
        let a = steering_vector(8, 73.0, 0.5);
        let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dl_matrix_example_single_rx() {
        let link = LinkGeometry {
            distance: 1.0,
            aod_deg: 0.0,
            aoa_deg: 180.0,
        };
        let taps = TapProfile {
            count: 1,
            spacing_s: 1e-9,
        };
        assert_eq!(taps.decay_sum(link.delay()), 1.0);
        let n = 5;
        let ramp = subcarrier_phase_ramp(n)[n - 1];
        let h = dl_channel_matrix(&link, ramp, LAMBDA_60G, (2, 1), &taps, &unit_array()).unwrap();
        assert_eq!(h.shape(), (1, 2));
        let amp = 10f64.powf(fspl_db(1.0, LAMBDA_60G).unwrap() / 10.0);
        for c in 0..2 {
            let expected = ramp * amp * std::f64::consts::FRAC_1_SQRT_2;
            assert_abs_diff_eq!((h[(0, c)] - expected).norm(), 0.0, epsilon = 1e-22);
        }
    }

    #[test]
    fn dl_matrix_rank_and_norm() {
        let link = LinkGeometry {
            distance: 3.7,
            aod_deg: 37.0,
            aoa_deg: 217.0,
        };
        let taps = TapProfile {
            count: 4,
            spacing_s: 1.0 / 2.16e9,
        };
        let coeff = Complex64::from_polar(1.0, 0.3);
        let h = dl_channel_matrix(&link, coeff, LAMBDA_60G, (8, 2), &taps, &unit_array()).unwrap();
        let s = svd(&h).unwrap();
        assert!(s.singular_values[0] > 0.0);
        assert!(s.singular_values[1] <= 1e-12 * s.singular_values[0]);
        let expected =
            10f64.powf(fspl_db(3.7, LAMBDA_60G).unwrap() / 10.0) * taps.decay_sum(link.delay());
        assert!((h.frobenius_norm() - expected).abs() <= 1e-9 * expected);

        let boosted = dl_channel_matrix(
            &link,
            coeff,
            LAMBDA_60G,
            (8, 2),
            &taps,
            &ArrayConfig::default(),
        )
        .unwrap();
        assert!((boosted.frobenius_norm() - expected * 4.0).abs() <= 1e-9 * expected);
    }

    fn small_topology() -> NetworkTopology {
        let ap = |id, x, y| AccessPoint {
            id,
            position: Position3D::new(x, y, 2.5),
            power_w: 0.01,
            service_rate: 4e-9,
        };
        let user = |id, x, y| User {
            id,
            position: Position3D::new(x, y, 1.5),
            power_w: 0.005,
            arrival_rate: 2e-9,
            delay_tolerance_s: 0.02,
            reference_position: Position3D::new(x, y, 1.5),
        };
        NetworkTopology::new(
            IndoorArea::default(),
            vec![ap(1, 2.5, 4.0), ap(2, 7.5, 13.0)],
            vec![user(1, 3.0, 6.0), user(2, 6.5, 11.0)],
        )
        .unwrap()
    }

    fn config(model: SmallScaleModel) -> ChannelConfig {
        ChannelConfig {
            grid: SubcarrierGrid::new(64, 60e9, 2.16e9).unwrap(),
            pathloss_exponent: 3.2,
            small_scale: model,
            seed: 42,
            taps: TapProfile {
                count: 4,
                spacing_s: 1.0 / 2.16e9,
            },
            array: unit_array(),
        }
    }

    #[test]
    fn ramp_mode_ul_has_constant_modulus_and_aggregate_matches_loop() {
        let topo = small_topology();
        let cfg = config(SmallScaleModel::PhaseRamp);
        let set = LinkChannelSet::synthesize(&topo, &cfg).unwrap();
        let ramp = subcarrier_phase_ramp(64);
        for i in 0..2 {
            for j in 0..2 {
                let d = topo.link_distance(i, j);
                let link = set.link(i, j);
                for h in &link.ul {
                    assert!((h.norm() - d.powf(-3.2)).abs() <= 1e-12 * d.powf(-3.2));
                }
                let mut brute = Complex64::new(0.0, 0.0);
                for g in &ramp {
                    brute += ul_channel(d, 3.2, *g).unwrap();
                }
                assert!((link.ul_aggregate() - brute).norm() <= 1e-12 * brute.norm().max(1e-30));
            }
        }
    }

    #[test]
    fn ramp_mode_dl_subcarriers_differ_by_phase_only() {
        let topo = small_topology();
        let cfg = config(SmallScaleModel::PhaseRamp);
        let links = LinkChannelSet::synthesize(&topo, &cfg).unwrap();
        let dl = DlChannelSet::build(&links, &cfg, 4, 1).unwrap();
        let hs = dl.link(0, 1);
        let h1 = &hs[0];
        for (n, h) in hs.iter().enumerate() {
            let expected = Complex64::from_polar(1.0, n as f64 * PI / 180.0);
            for (a, b) in h.as_slice().iter().zip(h1.as_slice()) {
                assert!((a / b - expected).norm() < 1e-9);
            }
        }
        assert_eq!(dl.delay(0, 1), topo.link_distance(0, 1) / SPEED_OF_LIGHT);
    }

    #[test]
    fn gaussian_mode_is_seeded() {
        let topo = small_topology();
        let cfg = config(SmallScaleModel::Gaussian);
        let a = LinkChannelSet::synthesize(&topo, &cfg).unwrap();
        let b = LinkChannelSet::synthesize(&topo, &cfg).unwrap();
        assert_eq!(a.link(1, 0).ul, b.link(1, 0).ul);
        assert_eq!(a.link(1, 1).dl_coefficients, b.link(1, 1).dl_coefficients);
        let mut other = cfg.clone();
        other.seed = 43;
        let c = LinkChannelSet::synthesize(&topo, &other).unwrap();
        assert_ne!(a.link(0, 0).ul, c.link(0, 0).ul);
    }

    proptest! {
        #[test]
        fn doubling_distance_scales_ul(d in 0.5f64..20.0, w in 1.0f64..5.0) {
            let one = Complex64::new(1.0, 0.0);
            let near = ul_channel(d, w, one).unwrap().norm();
            let far = ul_channel(2.0 * d, w, one).unwrap().norm();
            prop_assert!((far / near - 2f64.powf(-w)).abs() < 1e-12);

            let link = |dist| LinkGeometry { distance: dist, aod_deg: 20.0, aoa_deg: 200.0 };
            let taps = TapProfile { count: 4, spacing_s: 1.0 / 2.16e9 };
            let hn = dl_channel_matrix(&link(d), one, LAMBDA_60G, (2, 1), &taps, &unit_array()).unwrap();
            let hf = dl_channel_matrix(&link(2.0 * d), one, LAMBDA_60G, (2, 1), &taps, &unit_array()).unwrap();
            prop_assert!(hf.frobenius_norm() < hn.frobenius_norm());
        }
    }
}
