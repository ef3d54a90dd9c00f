//! Delay chain and the two-factor QoS utility.
//!
//! Per subcarrier `n` of a link the total delay is
//! `D_n = S/c_DL + A/c_UL,n + v N/M + 1/(mu - lambda)`. The utility is the
//! product of a delay factor, linear between the tolerance `gamma` (value 1)
//! and the worst subcarrier delay `D_max` (value 0), and a tracking factor
//! `1 - e_n / max_k e_k` built from a position-error model.

use crate::error::{Result, SimError};

/// Payload sizes, processing capacity and queue rates of one user/AP pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficModel {
    /// DL payload per frame, bits.
    pub s_bits: f64,
    /// UL tracking report, bits.
    pub a_bits: f64,
    /// Rendering workload, bits.
    pub v_bits: f64,
    /// AP processing capacity, work units per second.
    pub m_capacity: f64,
    /// Number of users sharing the processing capacity.
    pub n_share: f64,
    /// Queue service rate.
    pub mu: f64,
    /// Request arrival rate.
    pub lambda: f64,
}

impl TrafficModel {
    pub fn new(
        s_bits: f64,
        a_bits: f64,
        v_bits: f64,
        m_capacity: f64,
        n_share: f64,
        mu: f64,
        lambda: f64,
    ) -> Result<Self> {
        if !(s_bits > 0.0) || !(a_bits > 0.0) {
            return Err(SimError::Config(format!(
                "payload sizes must be positive (s={s_bits}, a={a_bits})"
            )));
        }
        if !(0.0..=s_bits).contains(&v_bits) {
            return Err(SimError::Config(format!(
                "rendering workload v={v_bits} must lie in [0, s={s_bits}]"
            )));
        }
        if !(m_capacity > 0.0) || !(n_share > 0.0) {
            return Err(SimError::Config(format!(
                "processing capacity and share must be positive (m={m_capacity}, n={n_share})"
            )));
        }
        if !(mu > lambda) || !(lambda >= 0.0) {
            return Err(SimError::Config(format!(
                "queue needs mu > lambda >= 0, got mu={mu} lambda={lambda}"
            )));
        }
        Ok(Self {
            s_bits,
            a_bits,
            v_bits,
            m_capacity,
            n_share,
            mu,
            lambda,
        })
    }

    pub fn processing_delay(&self) -> f64 {
        self.v_bits / (self.m_capacity / self.n_share)
    }

    pub fn queue_delay(&self) -> f64 {
        1.0 / (self.mu - self.lambda)
    }
}

/// `s/c_dl + a/c_ul`.
pub fn transmission_delay(s_bits: f64, a_bits: f64, rate_dl: f64, rate_ul: f64) -> Result<f64> {
    if !(rate_dl > 0.0) || !(rate_ul > 0.0) {
        return Err(SimError::InfeasibleLink(format!(
            "zero rate (dl={rate_dl}, ul={rate_ul})"
        )));
    }
    Ok(s_bits / rate_dl + a_bits / rate_ul)
}

/// `v / (m / n)`.
pub fn processing_delay(v_bits: f64, m_capacity: f64, n_share: f64) -> Result<f64> {
    if !(m_capacity > 0.0) || !(n_share > 0.0) {
        return Err(SimError::Config(format!(
            "processing capacity and share must be positive (m={m_capacity}, n={n_share})"
        )));
    }
    Ok(v_bits / (m_capacity / n_share))
}

/// M/M/1 sojourn time `1/(mu - lambda)`.
pub fn queue_delay(mu: f64, lambda: f64) -> Result<f64> {
    if !(mu > lambda) {
        return Err(SimError::Config(format!(
            "queue unstable: mu={mu} must exceed lambda={lambda}"
        )));
    }
    Ok(1.0 / (mu - lambda))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayBreakdown {
    pub transmission: f64,
    pub processing: f64,
    pub queue: f64,
    pub total: f64,
}

pub fn total_delay(transmission: f64, processing: f64, queue: f64) -> DelayBreakdown {
    DelayBreakdown {
        transmission,
        processing,
        queue,
        total: transmission + processing + queue,
    }
}

/// Delay factor: 1 below `gamma_d`, falling linearly to 0 at `d_max`.
pub fn conditional_utility(d: f64, d_max: f64, gamma_d: f64) -> Result<f64> {
    if d > d_max {
        return Err(SimError::InvalidInput(format!(
            "delay {d} exceeds the maximum {d_max}"
        )));
    }
    Ok(conditional_utility_from_slack(
        d,
        d_max - d,
        d_max - gamma_d,
        gamma_d,
    ))
}

/// Delay factor from precomputed `slack = d_max - d` and
/// `headroom = d_max - gamma_d`.
///
/// Total delays can be dominated by a huge queue term, so `d_max - d` formed
/// from the totals loses every digit of the transmission difference. Callers
/// that know the slack from its components pass it here directly.
pub fn conditional_utility_from_slack(d: f64, slack: f64, headroom: f64, gamma_d: f64) -> f64 {
    if d < gamma_d || headroom <= 0.0 {
        1.0
    } else {
        (slack / headroom).clamp(0.0, 1.0)
    }
}

/// Position error `epsilon0 / sqrt(1 + sinr)`.
pub fn tracking_error(sinr_ul: f64, epsilon0: f64) -> f64 {
    epsilon0 / (1.0 + sinr_ul).sqrt()
}

/// `1 - error / max(errors)`; 1 when every error is zero.
pub fn tracking_utility(error: f64, all_errors: &[f64]) -> Result<f64> {
    if all_errors.is_empty() {
        return Err(SimError::InvalidInput(
            "tracking error vector is empty".into(),
        ));
    }
    let worst = all_errors.iter().copied().fold(0.0, f64::max);
    if worst == 0.0 {
        return Ok(1.0);
    }
    Ok((1.0 - error / worst).clamp(0.0, 1.0))
}

pub fn total_utility(conditional: f64, tracking: f64) -> f64 {
    conditional * tracking
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityReport {
    pub conditional_utility: f64,
    pub tracking_utility: f64,
    pub total_utility: f64,
    pub d_max: f64,
    pub gamma_d: f64,
}

/// Delays and utilities of one link over all subcarriers.
#[derive(Debug, Clone)]
pub struct LinkQos {
    pub delays: Vec<DelayBreakdown>,
    pub utilities: Vec<UtilityReport>,
    pub d_max: f64,
}

impl LinkQos {
    pub fn utility_sum(&self) -> f64 {
        self.utilities.iter().map(|u| u.total_utility).sum()
    }

    pub fn mean_utility(&self) -> f64 {
        self.utility_sum() / self.utilities.len() as f64
    }

    /// Mean transmission delay over subcarriers.
    pub fn mean_transmission(&self) -> f64 {
        self.delays.iter().map(|d| d.transmission).sum::<f64>() / self.delays.len() as f64
    }
}

/// QoS of one link given its DL rate and per-subcarrier UL rates and SINRs.
///
/// The DL term is common to every subcarrier, so `D_max - D_n` equals the
/// spread of the UL terms and is computed from them alone.
pub fn link_qos(
    traffic: &TrafficModel,
    gamma_d: f64,
    epsilon0: f64,
    rate_dl: f64,
    rates_ul: &[f64],
    sinrs_ul: &[f64],
) -> Result<LinkQos> {
    if rates_ul.is_empty() || rates_ul.len() != sinrs_ul.len() {
        return Err(SimError::Shape(format!(
            "need matching non-empty UL rate and SINR vectors, got {} and {}",
            rates_ul.len(),
            sinrs_ul.len()
        )));
    }
    if !(rate_dl > 0.0) {
        return Err(SimError::InfeasibleLink(format!("DL rate is {rate_dl}")));
    }
    if let Some(r) = rates_ul.iter().find(|r| !(**r > 0.0)) {
        return Err(SimError::InfeasibleLink(format!("UL rate is {r}")));
    }
    let proc = traffic.processing_delay();
    let queue = traffic.queue_delay();
    let dl_term = traffic.s_bits / rate_dl;
    let ul_terms: Vec<f64> = rates_ul.iter().map(|r| traffic.a_bits / r).collect();
    let worst_ul = ul_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let delays: Vec<DelayBreakdown> = ul_terms
        .iter()
        .map(|ul| total_delay(dl_term + ul, proc, queue))
        .collect();
    // Addition is monotone, so the worst subcarrier is the one with the worst UL term.
    let d_max = total_delay(dl_term + worst_ul, proc, queue).total;
    let headroom = d_max - gamma_d;

    let errors: Vec<f64> = sinrs_ul
        .iter()
        .map(|s| tracking_error(*s, epsilon0))
        .collect();
    let mut utilities = Vec::with_capacity(delays.len());
    for ((delay, ul), err) in delays.iter().zip(&ul_terms).zip(&errors) {
        let conditional =
            conditional_utility_from_slack(delay.total, worst_ul - ul, headroom, gamma_d);
        let tracking = tracking_utility(*err, &errors)?;
        utilities.push(UtilityReport {
            conditional_utility: conditional,
            tracking_utility: tracking,
            total_utility: total_utility(conditional, tracking),
            d_max,
            gamma_d,
        });
    }
    Ok(LinkQos {
        delays,
        utilities,
        d_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn transmission_examples() {
        let d = transmission_delay(12288.0, 6.0, 1e9, 1e6).unwrap();
        assert_relative_eq!(d, 1.8288e-5, max_relative = 1e-12);
        assert_relative_eq!(transmission_delay(10.0, 6.0, 4.0, 4.0).unwrap(), 4.0);
        let h = transmission_delay(12288.0, 6.0, 2e9, 2e6).unwrap();
        assert_relative_eq!(h, d / 2.0, max_relative = 1e-15);
        assert!(matches!(
            transmission_delay(1.0, 1.0, 0.0, 1.0),
            Err(SimError::InfeasibleLink(_))
        ));
    }

    #[test]
    fn processing_and_queue_examples() {
        assert_eq!(processing_delay(5.0, 10.0, 2.0).unwrap(), 1.0);
        assert_eq!(processing_delay(0.0, 10.0, 2.0).unwrap(), 0.0);
        assert_relative_eq!(
            processing_delay(12288.0, 1e6, 2.0).unwrap(),
            12288.0 * 2.0 / 1e6
        );
        assert!(processing_delay(1.0, 0.0, 2.0).is_err());

        assert_eq!(queue_delay(2.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            queue_delay(4e-9, 2e-9).unwrap(),
            5.0e8,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            queue_delay(4e9, 2e9).unwrap(),
            5.0e-10,
            max_relative = 1e-12
        );
        assert!(queue_delay(1.0, 1.0).is_err());
    }

    #[test]
    fn total_delay_examples() {
        assert_eq!(total_delay(1.0, 2.0, 3.0).total, 6.0);
        assert_eq!(total_delay(0.0, 0.0, 7.5).total, 7.5);
    }

    #[test]
    fn utility_examples() {
        assert_eq!(conditional_utility(0.02, 0.05, 0.02).unwrap(), 1.0);
        assert_eq!(conditional_utility(0.05, 0.05, 0.02).unwrap(), 0.0);
        assert_eq!(conditional_utility(0.01, 0.05, 0.02).unwrap(), 1.0);
        assert_relative_eq!(
            conditional_utility(0.035, 0.05, 0.02).unwrap(),
            0.5,
            max_relative = 1e-12
        );
        assert!(conditional_utility(0.06, 0.05, 0.02).is_err());

        assert_eq!(tracking_utility(2.0, &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(tracking_utility(0.0, &[0.0, 2.0]).unwrap(), 1.0);
        assert_eq!(tracking_utility(1.0, &[1.0, 2.0]).unwrap(), 0.5);
        assert_eq!(tracking_utility(0.0, &[0.0, 0.0]).unwrap(), 1.0);

        assert_eq!(tracking_error(0.0, 0.3), 0.3);
        assert_eq!(tracking_error(3.0, 1.0), 0.5);
        assert_relative_eq!(tracking_error(99.0, 2.0), 0.2, max_relative = 1e-15);

        assert_eq!(total_utility(1.0, 1.0), 1.0);
        assert_eq!(total_utility(0.5, 0.5), 0.25);
        assert_eq!(total_utility(0.7, 0.0), 0.0);
    }

    #[test]
    fn traffic_model_validation() {
        assert!(TrafficModel::new(12288.0, 6.0, 5.0, 1e6, 2.0, 4e-9, 2e-9).is_ok());
        assert!(TrafficModel::new(12288.0, 6.0, 5.0, 1e6, 2.0, 2e-9, 2e-9).is_err());
        assert!(TrafficModel::new(4.0, 6.0, 5.0, 1e6, 2.0, 4.0, 2.0).is_err());
        assert!(TrafficModel::new(12288.0, 6.0, 5.0, 0.0, 2.0, 4.0, 2.0).is_err());
    }

    #[test]
    fn link_qos_resolves_tiny_spreads_under_a_huge_queue() {
        let t = TrafficModel::new(12288.0, 6.0, 5.0, 1e6, 2.0, 4e-9, 2e-9).unwrap();
        let q = link_qos(&t, 0.02, 0.01, 1e9, &[1e6, 2e6, 4e6], &[1.0, 3.0, 15.0]).unwrap();
        // Worst subcarrier has zero slack, the others land strictly inside (0, 1).
        assert_eq!(q.utilities[0].conditional_utility, 0.0);
        assert!(q.utilities[2].conditional_utility > 0.0);
        assert_eq!(q.utilities[0].tracking_utility, 0.0);
        assert!(q.mean_utility() > 0.0 && q.mean_utility() <= 1.0);
        assert_eq!(q.d_max, q.delays[0].total);

        assert!(matches!(
            link_qos(&t, 0.02, 0.01, 0.0, &[1.0], &[1.0]),
            Err(SimError::InfeasibleLink(_))
        ));
    }

    #[test]
    fn link_qos_matches_direct_formula_when_well_conditioned() {
        let t = TrafficModel::new(12288.0, 6.0, 5.0, 1e6, 2.0, 4e9, 2e9).unwrap();
        let rates = [1e5, 2e5, 3e5];
        let q = link_qos(&t, 1e-5, 0.01, 1e9, &rates, &[1.0, 2.0, 3.0]).unwrap();
        for (d, u) in q.delays.iter().zip(&q.utilities) {
            let direct = conditional_utility(d.total, q.d_max, 1e-5).unwrap();
            assert!((direct - u.conditional_utility).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn conditional_monotone_and_bounded(
            gamma in 0.0f64..1.0, span in 1e-3f64..1.0, a in 0.0f64..1.0, b in 0.0f64..1.0,
        ) {
            let d_max = gamma + span;
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let (d1, d2) = (lo * d_max, hi * d_max);
            let u1 = conditional_utility(d1, d_max, gamma).unwrap();
            let u2 = conditional_utility(d2, d_max, gamma).unwrap();
            prop_assert!((0.0..=1.0).contains(&u1) && (0.0..=1.0).contains(&u2));
            prop_assert!(u2 <= u1);
        }

        #[test]
        fn faster_dl_never_hurts(r in 1e3f64..1e9, k in 1.0f64..10.0) {
            let slow = transmission_delay(12288.0, 6.0, r, 1e6).unwrap();
            let fast = transmission_delay(12288.0, 6.0, r * k, 1e6).unwrap();
            prop_assert!(fast <= slow);
            let d = total_delay(slow, 2.5e-4, 5e-10);
            prop_assert_eq!(d.total, d.transmission + d.processing + d.queue);
        }
    }
}
