//! Scenario x codebook x Es/N0 sweep.
//!
//! Everything that does not depend on the sweep axes is computed once by
//! [`Simulator::new`]: the topology, the UL channels and, per codebook, the
//! DL matrices and beamforming solutions. Each sweep point then only
//! aggregates gains, evaluates SINRs, rates and QoS, and checks constraints.

use std::collections::BTreeMap;

use crate::beamforming::{design_link, AnalogStage, BeamformingSolution, Codebook};
use crate::channel::{DlChannelSet, LinkChannelSet};
use crate::error::{Result, SimError};
use crate::linkmetrics::{
    aggregate_gain, rate, sinr_dl, sinr_ul, Association, GainAggregation, GainTable, NoiseModel,
};
use crate::qos::{link_qos, total_delay, TrafficModel};
use crate::runner::config::SweepConfig;
use crate::runner::constraints::{check_constraints, letters_for, Limits, LinkState, Violation};
use crate::runner::csv_io::{sort_records, LinkRecord, SummaryRow};
use crate::runner::stats::{min_statistic, mode_statistic};
use crate::topology::NetworkTopology;

/// Beamforming of every link for one codebook.
#[derive(Debug, Clone)]
pub struct CodebookDesign {
    pub codebook: Codebook,
    pub channels: DlChannelSet,
    /// Indexed `user * n_aps + ap`.
    pub solutions: Vec<BeamformingSolution>,
}

impl CodebookDesign {
    pub fn solution(&self, user: usize, ap: usize) -> &BeamformingSolution {
        &self.solutions[user * self.channels.n_aps() + ap]
    }
}

/// Result of one (scenario, codebook, Es/N0) point.
#[derive(Debug, Clone)]
pub struct PointEvaluation {
    pub scenario: GainAggregation,
    pub codebook: Codebook,
    pub esn0_db: f64,
    pub records: Vec<LinkRecord>,
    /// Sum over feasible links and subcarriers of the per-subcarrier utility.
    pub objective: f64,
    pub violations: Vec<Violation>,
    /// Per-link DL SINR, indexed `user * n_aps + ap`.
    pub sinr_dl: Vec<f64>,
    /// Per-link, per-subcarrier UL SINR, indexed `user * n_aps + ap`.
    pub sinr_ul: Vec<Vec<f64>>,
}

impl PointEvaluation {
    pub fn feasible(&self) -> bool {
        self.records.iter().all(|r| r.feasible)
    }
}

/// Compact per-point outcome kept by [`run_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub scenario: GainAggregation,
    pub codebook: Codebook,
    pub esn0_db: f64,
    pub objective: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub records: Vec<LinkRecord>,
    pub points: Vec<PointSummary>,
    pub summary: Vec<SummaryRow>,
}

impl SweepResult {
    /// Mean record utility of one (scenario, codebook) over the grid and
    /// all links; infeasible records count as zero.
    pub fn mean_utility(&self, scenario: GainAggregation, codebook: &Codebook) -> f64 {
        let sel: Vec<f64> = self
            .records
            .iter()
            .filter(|r| {
                r.scenario == scenario && r.n_tx == codebook.n_tx && r.n_rf == codebook.n_rf
            })
            .map(|r| r.utility.unwrap_or(0.0))
            .collect();
        sel.iter().sum::<f64>() / sel.len().max(1) as f64
    }
}

/// Precomputed state of a sweep.
#[derive(Debug, Clone)]
pub struct Simulator {
    config: SweepConfig,
    topology: NetworkTopology,
    links: LinkChannelSet,
    traffic: TrafficModel,
    association: Association,
    esn0_grid: Vec<f64>,
    designs: Vec<CodebookDesign>,
    /// `|h_ijn|^2` per subcarrier.
    ul_tables: Vec<GainTable>,
    ul_bandwidth: f64,
    dl_bandwidth: f64,
}

impl Simulator {
    pub fn new(config: &SweepConfig) -> Result<Self> {
        config.validate()?;
        let topology = config.topology()?;
        let channel_cfg = config.channel_config()?;
        let links = LinkChannelSet::synthesize(&topology, &channel_cfg)?;
        let traffic = config.traffic()?;
        let (n_users, n_aps) = (topology.n_users(), topology.n_aps());
        let association = Association::full(n_users, n_aps);
        let n_sc = channel_cfg.grid.n_sc();

        let ul_tables = (0..n_sc)
            .map(|n| GainTable::from_fn(n_users, n_aps, |i, j| links.link(i, j).ul[n].norm_sqr()))
            .collect::<Result<Vec<_>>>()?;

        let mut designs = Vec::new();
        for codebook in config.codebooks()? {
            let channels = DlChannelSet::build(&links, &channel_cfg, codebook.n_tx, codebook.n_rx)?;
            let mut solutions = Vec::with_capacity(n_users * n_aps);
            for i in 0..n_users {
                for j in 0..n_aps {
                    let served = association.users_of(j).len().max(1);
                    let link_power = topology.aps()[j].power_w / served as f64;
                    solutions.push(design_link(
                        channels.link(i, j),
                        &codebook,
                        link_power,
                        AnalogStage::Svd,
                    )?);
                }
            }
            designs.push(CodebookDesign {
                codebook,
                channels,
                solutions,
            });
        }

        Ok(Self {
            esn0_grid: config.esn0_grid()?,
            config: config.clone(),
            topology,
            links,
            traffic,
            association,
            designs,
            ul_tables,
            ul_bandwidth: channel_cfg.grid.subcarrier_bandwidth(),
            dl_bandwidth: channel_cfg.grid.total_bandwidth(),
        })
    }

    pub fn config(&self) -> &SweepConfig {
        &self.config
    }

    pub fn topology(&self) -> &NetworkTopology {
        &self.topology
    }

    pub fn links(&self) -> &LinkChannelSet {
        &self.links
    }

    pub fn association(&self) -> &Association {
        &self.association
    }

    pub fn designs(&self) -> &[CodebookDesign] {
        &self.designs
    }

    pub fn esn0_grid(&self) -> &[f64] {
        &self.esn0_grid
    }

    pub fn ul_tables(&self) -> &[GainTable] {
        &self.ul_tables
    }

    pub fn ul_bandwidth(&self) -> f64 {
        self.ul_bandwidth
    }

    pub fn dl_bandwidth(&self) -> f64 {
        self.dl_bandwidth
    }

    pub fn design(&self, codebook: &Codebook) -> Result<&CodebookDesign> {
        self.designs
            .iter()
            .find(|d| d.codebook == *codebook)
            .ok_or_else(|| {
                SimError::Config(format!("codebook {codebook} is not part of the sweep"))
            })
    }

    /// DL gains of one codebook aggregated under `scenario`.
    pub fn dl_gains(
        &self,
        design: &CodebookDesign,
        scenario: GainAggregation,
    ) -> Result<GainTable> {
        let (n_users, n_aps) = (self.topology.n_users(), self.topology.n_aps());
        let mut values = Vec::with_capacity(n_users * n_aps);
        for i in 0..n_users {
            for j in 0..n_aps {
                values.push(aggregate_gain(
                    &design.solution(i, j).effective_gains(),
                    scenario,
                )?);
            }
        }
        GainTable::new(n_users, n_aps, values)
    }

    pub fn evaluate_point(
        &self,
        scenario: GainAggregation,
        codebook: &Codebook,
        esn0_db: f64,
    ) -> Result<PointEvaluation> {
        let design = self.design(codebook)?;
        let cfg = &self.config;
        let sigma_sq = NoiseModel::new(esn0_db, cfg.p_b)?.sigma_sq;
        let (n_users, n_aps) = (self.topology.n_users(), self.topology.n_aps());
        let user_powers: Vec<f64> = self.topology.users().iter().map(|u| u.power_w).collect();
        let ap_powers: Vec<f64> = self.topology.aps().iter().map(|a| a.power_w).collect();
        let dl_gains = self.dl_gains(design, scenario)?;

        let mut sinr_ul_all = Vec::with_capacity(n_users * n_aps);
        let mut sinr_dl_all = Vec::with_capacity(n_users * n_aps);
        let mut states = Vec::new();
        for i in 0..n_users {
            for j in 0..n_aps {
                let ul = self
                    .ul_tables
                    .iter()
                    .map(|t| sinr_ul(i, j, &user_powers, t, &self.association, sigma_sq))
                    .collect::<Result<Vec<_>>>()?;
                let dl = sinr_dl(i, j, &ap_powers, &dl_gains, &self.association, sigma_sq)?;
                if self.association.serves(j, i) {
                    let sol = design.solution(i, j);
                    states.push(LinkState {
                        ap: j,
                        user: i,
                        rate_dl: rate(self.dl_bandwidth, dl),
                        user_power: user_powers[i],
                        transmit_power: sol.transmit_power(),
                        precoder_modulus_error: sol.precoder_modulus_error(),
                        combiner_modulus_error: sol.combiner_modulus_error(),
                    });
                }
                sinr_ul_all.push(ul);
                sinr_dl_all.push(dl);
            }
        }
        let limits = Limits {
            v_j: cfg.v_j,
            r_min: cfg.r_min,
            p_b: cfg.p_b,
        };
        let ap_indices: Vec<usize> = (0..n_aps).collect();
        let violations = check_constraints(&ap_indices, &states, &limits);

        let proc = self.traffic.processing_delay();
        let queue = self.traffic.queue_delay();
        let mut records = Vec::with_capacity(n_users * n_aps);
        let mut objective = 0.0;
        for j in 0..n_aps {
            for i in 0..n_users {
                let k = i * n_aps + j;
                let sinrs_ul = &sinr_ul_all[k];
                let rates_ul: Vec<f64> = sinrs_ul
                    .iter()
                    .map(|s| rate(self.ul_bandwidth, *s))
                    .collect();
                let rate_ul_mean = rates_ul.iter().sum::<f64>() / rates_ul.len() as f64;
                let rate_dl = rate(self.dl_bandwidth, sinr_dl_all[k]);
                let letters = letters_for(&violations, j, i);
                let qos = match link_qos(
                    &self.traffic,
                    self.topology.users()[i].delay_tolerance_s,
                    cfg.epsilon0,
                    rate_dl,
                    &rates_ul,
                    sinrs_ul,
                ) {
                    Ok(q) => Some(q),
                    Err(SimError::InfeasibleLink(_)) => None,
                    Err(e) => return Err(e),
                };
                let feasible = letters.is_empty() && qos.is_some();
                let (d_trans, utility) = match &qos {
                    Some(q) => {
                        if feasible {
                            objective += q.utility_sum();
                        }
                        (q.mean_transmission(), feasible.then(|| q.mean_utility()))
                    }
                    None => (f64::INFINITY, None),
                };
                records.push(LinkRecord {
                    scenario,
                    n_tx: codebook.n_tx,
                    n_rf: codebook.n_rf,
                    esn0_db,
                    ap: self.topology.aps()[j].id,
                    user: self.topology.users()[i].id,
                    rate_dl_bps: rate_dl,
                    rate_ul_bps: rate_ul_mean,
                    d_trans_s: d_trans,
                    d_proc_s: proc,
                    d_queue_s: queue,
                    d_total_s: total_delay(d_trans, proc, queue).total,
                    utility,
                    feasible,
                    violations: letters,
                });
            }
        }
        Ok(PointEvaluation {
            scenario,
            codebook: *codebook,
            esn0_db,
            records,
            objective,
            violations,
            sinr_dl: sinr_dl_all,
            sinr_ul: sinr_ul_all,
        })
    }

    /// Evaluates the full Cartesian product and builds the summary.
    pub fn run(&self) -> Result<SweepResult> {
        let mut records = Vec::new();
        let mut points = Vec::new();
        for &scenario in &self.config.scenarios {
            for design in &self.designs {
                for &esn0 in &self.esn0_grid {
                    let p = self.evaluate_point(scenario, &design.codebook, esn0)?;
                    points.push(PointSummary {
                        scenario,
                        codebook: design.codebook,
                        esn0_db: esn0,
                        objective: p.objective,
                        feasible: p.feasible(),
                    });
                    records.extend(p.records);
                }
            }
        }
        sort_records(&mut records);
        let summary = summarize(&records, self.config.mode_bin)?;
        Ok(SweepResult {
            records,
            points,
            summary,
        })
    }
}

/// Builds the simulator for `config` and evaluates a single point.
pub fn evaluate_sweep_point(
    config: &SweepConfig,
    scenario: GainAggregation,
    codebook: &Codebook,
    esn0_db: f64,
) -> Result<PointEvaluation> {
    let mut cfg = config.clone();
    cfg.codebook_list = Some(vec![*codebook]);
    Simulator::new(&cfg)?.evaluate_point(scenario, codebook, esn0_db)
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    Simulator::new(config)?.run()
}

/// Codebook with the largest objective among the feasible ones at
/// (scenario, esn0). Ties go to fewer antennas, then fewer RF chains.
/// `None` means no codebook is feasible there.
pub fn select_best_codebook(
    points: &[PointSummary],
    scenario: GainAggregation,
    esn0_db: f64,
) -> Option<Codebook> {
    let mut candidates: Vec<&PointSummary> = points
        .iter()
        .filter(|p| p.scenario == scenario && p.esn0_db == esn0_db && p.feasible)
        .collect();
    candidates.sort_by_key(|p| (p.codebook.n_tx, p.codebook.n_rf));
    let mut best: Option<&PointSummary> = None;
    for p in candidates {
        if best.is_none_or(|b| p.objective > b.objective) {
            best = Some(p);
        }
    }
    best.map(|p| p.codebook)
}

/// Per-link statistics over the Es/N0 grid.
pub fn summarize(records: &[LinkRecord], mode_bin: f64) -> Result<Vec<SummaryRow>> {
    let mut groups: BTreeMap<(&'static str, usize, usize, usize, usize), Vec<&LinkRecord>> =
        BTreeMap::new();
    for r in records {
        groups
            .entry((r.scenario.as_str(), r.n_tx, r.n_rf, r.ap, r.user))
            .or_default()
            .push(r);
    }
    let mut out = Vec::with_capacity(groups.len());
    for rows in groups.values() {
        let first = rows[0];
        let utilities: Vec<f64> = rows.iter().filter_map(|r| r.utility).collect();
        let delays: Vec<f64> = rows.iter().map(|r| r.d_trans_s).collect();
        out.push(SummaryRow {
            scenario: first.scenario,
            n_tx: first.n_tx,
            n_rf: first.n_rf,
            ap: first.ap,
            user: first.user,
            mean_utility: (!utilities.is_empty())
                .then(|| utilities.iter().sum::<f64>() / utilities.len() as f64),
            min_d_trans_s: min_statistic(&delays)?,
            mode_d_trans_s: mode_statistic(&delays, mode_bin)?,
        });
    }
    Ok(out)
}
