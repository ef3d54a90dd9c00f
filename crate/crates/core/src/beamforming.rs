//! One-shot SVD beamformers.
//!
//! The full-digital baseline takes the dominant singular pair of each
//! subcarrier matrix. The hybrid design splits the beamformer into an analog
//! stage shared by all subcarriers, built from the dominant eigenvectors of
//! the subcarrier-summed covariances and projected onto constant modulus, and
//! a per-subcarrier digital stage from the SVD of the analog-filtered channel
//! `G_A^H H_n P_A`. Nothing is iterated, so identical inputs give identical
//! matrices.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SimError};
use crate::numerics::{svd, unit_modulus_normalize, ComplexMatrix};

/// Below this Frobenius norm a composite beam is treated as radiating nothing.
const NULL_BEAM_NORM: f64 = 1e-300;

/// Antenna / RF-chain configuration of one link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codebook {
    pub n_tx: usize,
    pub n_rf: usize,
    pub n_rx: usize,
    pub n_ds: usize,
}

impl Codebook {
    pub fn new(n_tx: usize, n_rf: usize, n_rx: usize, n_ds: usize) -> Result<Self> {
        if n_ds == 0 || n_rx == 0 {
            return Err(SimError::Config(
                "codebook needs n_ds >= 1 and n_rx >= 1".into(),
            ));
        }
        if !(n_ds <= n_rf && n_rf <= n_tx) {
            return Err(SimError::Config(format!(
                "codebook requires n_ds <= n_rf <= n_tx, got n_ds={n_ds} n_rf={n_rf} n_tx={n_tx}"
            )));
        }
        if n_ds > n_rx {
            return Err(SimError::Config(format!(
                "codebook requires n_ds <= n_rx, got n_ds={n_ds} n_rx={n_rx}"
            )));
        }
        Ok(Self {
            n_tx,
            n_rf,
            n_rx,
            n_ds,
        })
    }

    /// Single-stream, single-antenna-user codebook.
    pub fn single_stream(n_tx: usize, n_rf: usize) -> Result<Self> {
        Self::new(n_tx, n_rf, 1, 1)
    }

    /// Short name such as `4A2R`.
    pub fn label(&self) -> String {
        format!("{}A{}R", self.n_tx, self.n_rf)
    }
}

impl fmt::Display for Codebook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses `NTxNRF` (e.g. `4x2`) or the label form `4A2R`, giving a
/// single-stream codebook with one receive antenna.
impl FromStr for Codebook {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || SimError::Config(format!("cannot parse codebook '{s}', expected NTxNRF"));
        let (a, b) = if let Some((a, b)) = t.split_once(['x', 'X']) {
            (a, b)
        } else if let Some(rest) = t.strip_suffix(['R', 'r']) {
            rest.split_once(['A', 'a']).ok_or_else(bad)?
        } else {
            return Err(bad());
        };
        let n_tx = a.trim().parse().map_err(|_| bad())?;
        let n_rf = b.trim().parse().map_err(|_| bad())?;
        Codebook::single_stream(n_tx, n_rf)
    }
}

/// The six evaluated configurations: Nt in {2, 4, 8} times NRF in {1, 2},
/// with Nr = NDS = 1.
pub fn standard_codebooks() -> Vec<Codebook> {
    let mut out = Vec::with_capacity(6);
    for n_tx in [2, 4, 8] {
        for n_rf in [1, 2] {
            out.push(Codebook::single_stream(n_tx, n_rf).expect("static codebook is valid"));
        }
    }
    out
}

/// Unconstrained SVD beamformer for one subcarrier. Returns
/// `(precoder: Nt x n_ds, combiner: Nr x n_ds)`.
pub fn full_digital(h: &ComplexMatrix, n_ds: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let rank_cap = h.rows().min(h.cols());
    if n_ds == 0 || n_ds > rank_cap {
        return Err(SimError::Shape(format!(
            "n_ds={n_ds} must be in 1..={rank_cap} for a {}x{} channel",
            h.rows(),
            h.cols()
        )));
    }
    let s = svd(h)?;
    Ok((
        s.right.leading_columns(n_ds)?,
        s.left.leading_columns(n_ds)?,
    ))
}

fn check_channel_set(channels: &[ComplexMatrix]) -> Result<(usize, usize)> {
    let first = channels
        .first()
        .ok_or_else(|| SimError::InvalidInput("need at least one subcarrier matrix".into()))?;
    let shape = first.shape();
    if let Some(bad) = channels.iter().find(|h| h.shape() != shape) {
        return Err(SimError::Shape(format!(
            "subcarrier matrices disagree in shape: {:?} vs {:?}",
            shape,
            bad.shape()
        )));
    }
    Ok(shape)
}

/// Analog combiner `Nr x 1`: dominant eigenvector of `sum_n H_n H_n^H`,
/// every entry forced to modulus `1/sqrt(Nr)`.
pub fn analog_combiner(channels: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let (n_rx, _) = check_channel_set(channels)?;
    let mut cov = ComplexMatrix::zeros(n_rx, n_rx);
    for h in channels {
        cov = cov.add(&h.matmul(&h.adjoint())?)?;
    }
    let u = svd(&cov)?.left.leading_columns(1)?;
    Ok(unit_modulus_normalize(&u, 1.0 / (n_rx as f64).sqrt()))
}

/// Analog precoder `Nt x n_rf`: leading eigenvectors of `sum_n H_n^H H_n`,
/// every entry forced to modulus `1/sqrt(Nt)`.
pub fn analog_precoder(channels: &[ComplexMatrix], n_rf: usize) -> Result<ComplexMatrix> {
    let (_, n_tx) = check_channel_set(channels)?;
    if n_rf == 0 || n_rf > n_tx {
        return Err(SimError::Shape(format!(
            "n_rf={n_rf} must be in 1..={n_tx}"
        )));
    }
    let mut cov = ComplexMatrix::zeros(n_tx, n_tx);
    for h in channels {
        cov = cov.add(&h.adjoint().matmul(h)?)?;
    }
    let u = svd(&cov)?.left.leading_columns(n_rf)?;
    Ok(unit_modulus_normalize(&u, 1.0 / (n_tx as f64).sqrt()))
}

/// Digital stage for the analog-filtered channel `h_d` (shape
/// `streams_rx x n_rf`). Returns `(precoder: n_rf x n_ds, combiner)`; the
/// precoder is semi-unitary.
pub fn hybrid_digital(
    h_d: &ComplexMatrix,
    n_ds: usize,
    n_rf: usize,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if h_d.cols() != n_rf {
        return Err(SimError::Shape(format!(
            "analog-filtered channel has {} columns, expected n_rf={n_rf}",
            h_d.cols()
        )));
    }
    if n_ds == 0 || n_ds > n_rf || n_ds > h_d.rows() {
        return Err(SimError::Shape(format!(
            "n_ds={n_ds} incompatible with a {}x{} analog-filtered channel",
            h_d.rows(),
            h_d.cols()
        )));
    }
    let s = svd(h_d)?;
    Ok((
        s.right.leading_columns(n_ds)?,
        s.left.leading_columns(n_ds)?,
    ))
}

/// `G^H H P`.
pub fn effective_channel(
    g: &ComplexMatrix,
    h: &ComplexMatrix,
    p: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    g.adjoint().matmul(h)?.matmul(p)
}

/// How the analog stage is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnalogStage {
    /// Covariance-sum SVD projected onto constant modulus.
    #[default]
    Svd,
    /// Identity analog matrices (requires `n_rf = n_tx`); the hybrid design
    /// then degenerates to the full-digital one.
    Bypass,
}

/// Output of [`design_link`].
///
/// `digital_precoders` are stored semi-unitary; the radiated signal on
/// subcarrier `n` is `power_scale * P_A * P_D[n]`. `effective_channels` are
/// measured per unit-norm transmit and receive beam, so for a single stream
/// their modulus never exceeds the largest singular value of the raw channel.
#[derive(Debug, Clone)]
pub struct BeamformingSolution {
    pub codebook: Codebook,
    pub analog_precoder: ComplexMatrix,
    pub analog_combiner: ComplexMatrix,
    pub digital_precoders: Vec<ComplexMatrix>,
    pub digital_combiners: Vec<ComplexMatrix>,
    pub effective_channels: Vec<ComplexMatrix>,
    pub power_scale: f64,
}

impl BeamformingSolution {
    /// `|H_eff,n|_F^2` per subcarrier.
    pub fn effective_gains(&self) -> Vec<f64> {
        self.effective_channels
            .iter()
            .map(ComplexMatrix::frobenius_norm_sqr)
            .collect()
    }

    /// Total radiated power `sum_n |power_scale * P_A * P_D[n]|_F^2`.
    pub fn transmit_power(&self) -> f64 {
        let s2 = self.power_scale * self.power_scale;
        self.digital_precoders
            .iter()
            .map(|p| {
                let beam = &self.analog_precoder * p;
                s2 * beam.frobenius_norm_sqr()
            })
            .sum()
    }

    /// Largest deviation of `|[P_A]_kl|^2` from `1/Nt`.
    pub fn precoder_modulus_error(&self) -> f64 {
        modulus_error(&self.analog_precoder, self.codebook.n_tx)
    }

    /// Largest deviation of `|[G_A]_kl|^2` from `1/Nr`.
    pub fn combiner_modulus_error(&self) -> f64 {
        modulus_error(&self.analog_combiner, self.codebook.n_rx)
    }

    /// Largest `|P_D^H P_D - I|_F` over all subcarriers.
    pub fn digital_unitarity_error(&self) -> f64 {
        self.digital_precoders
            .iter()
            .map(ComplexMatrix::unitarity_error)
            .fold(0.0, f64::max)
    }
}

fn modulus_error(m: &ComplexMatrix, n: usize) -> f64 {
    let target = 1.0 / n as f64;
    m.as_slice()
        .iter()
        .map(|z| (z.norm_sqr() - target).abs())
        .fold(0.0, f64::max)
}

/// Full hybrid design for one (user, AP) link.
///
/// `link_power` is the DL power budget assigned to this link; the digital
/// precoders share one scale factor so the radiated power over all
/// subcarriers equals it.
pub fn design_link(
    channels: &[ComplexMatrix],
    codebook: &Codebook,
    link_power: f64,
    stage: AnalogStage,
) -> Result<BeamformingSolution> {
    let shape = check_channel_set(channels)?;
    if shape != (codebook.n_rx, codebook.n_tx) {
        return Err(SimError::Shape(format!(
            "channels are {}x{} but codebook {} expects {}x{}",
            shape.0, shape.1, codebook, codebook.n_rx, codebook.n_tx
        )));
    }
    if !(link_power >= 0.0 && link_power.is_finite()) {
        return Err(SimError::InvalidInput(format!(
            "link power must be finite and >= 0, got {link_power}"
        )));
    }

    let (p_a, g_a) = match stage {
        AnalogStage::Svd => (
            analog_precoder(channels, codebook.n_rf)?,
            analog_combiner(channels)?,
        ),
        AnalogStage::Bypass => {
            if codebook.n_rf != codebook.n_tx {
                return Err(SimError::Shape(
                    "bypassing the analog stage requires n_rf = n_tx".into(),
                ));
            }
            (
                ComplexMatrix::identity(codebook.n_tx),
                ComplexMatrix::identity(codebook.n_rx),
            )
        }
    };
    let g_a_h = g_a.adjoint();

    let n_sc = channels.len();
    let mut precoders = Vec::with_capacity(n_sc);
    let mut combiners = Vec::with_capacity(n_sc);
    let mut effective = Vec::with_capacity(n_sc);
    let mut beam_energy = 0.0;
    for h in channels {
        let h_d = g_a_h.matmul(h)?.matmul(&p_a)?;
        let (p_d, g_d) = hybrid_digital(&h_d, codebook.n_ds, codebook.n_rf)?;
        let tx_beam = p_a.matmul(&p_d)?;
        let rx_beam = g_a.matmul(&g_d)?;
        let tx_norm = tx_beam.frobenius_norm();
        let rx_norm = rx_beam.frobenius_norm();
        let raw = effective_channel(&g_d, &h_d, &p_d)?;
        let eff = if tx_norm > NULL_BEAM_NORM && rx_norm > NULL_BEAM_NORM {
            raw.scale_real(1.0 / (tx_norm * rx_norm))
        } else {
            ComplexMatrix::zeros(raw.rows(), raw.cols())
        };
        beam_energy += tx_norm * tx_norm;
        precoders.push(p_d);
        combiners.push(g_d);
        effective.push(eff);
    }
    let power_scale = if beam_energy > 0.0 {
        (link_power / beam_energy).sqrt()
    } else {
        0.0
    };

    Ok(BeamformingSolution {
        codebook: *codebook,
        analog_precoder: p_a,
        analog_combiner: g_a,
        digital_precoders: precoders,
        digital_combiners: combiners,
        effective_channels: effective,
        power_scale,
    })
}
