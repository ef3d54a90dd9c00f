//! Feasibility checks of one evaluated sweep point.
//!
//! Five families, identified by letter:
//! `a` users per AP at most `V_j`; `b` DL rate at least `r_min`;
//! `c` UL powers of an AP's users and its radiated DL power within `P_B`;
//! `d`, `e` analog precoder / combiner entries of modulus squared `1/Nt`
//! and `1/Nr`.

use std::fmt;

/// Tolerance of the constant-modulus checks.
pub const MODULUS_TOL: f64 = 1e-12;
/// Relative slack on power budgets, absorbing rounding in the sums.
pub const POWER_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    UsersPerAp,
    MinRate,
    Power,
    PrecoderModulus,
    CombinerModulus,
}

impl ConstraintKind {
    pub fn letter(&self) -> char {
        match self {
            ConstraintKind::UsersPerAp => 'a',
            ConstraintKind::MinRate => 'b',
            ConstraintKind::Power => 'c',
            ConstraintKind::PrecoderModulus => 'd',
            ConstraintKind::CombinerModulus => 'e',
        }
    }
}

/// One failed check. `user` is `None` for AP-wide constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ConstraintKind,
    pub ap: usize,
    pub user: Option<usize>,
    pub measured: f64,
    pub required: f64,
}

impl Violation {
    /// `measured / required`; for the rate constraint this is the achieved
    /// fraction of `r_min`.
    pub fn ratio(&self) -> f64 {
        self.measured / self.required
    }

    /// Whether this violation concerns the given link.
    pub fn touches(&self, ap: usize, user: usize) -> bool {
        self.ap == ap && self.user.is_none_or(|u| u == user)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) AP {}", self.kind.letter(), self.ap)?;
        if let Some(u) = self.user {
            write!(f, " user {u}")?;
        }
        write!(
            f,
            ": measured {} vs required {}",
            self.measured, self.required
        )
    }
}

/// Measured quantities of one served link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkState {
    pub ap: usize,
    pub user: usize,
    pub rate_dl: f64,
    pub user_power: f64,
    /// Radiated DL power of the link's beamformer.
    pub transmit_power: f64,
    /// Largest `| |[P_A]_kl|^2 - 1/Nt |`.
    pub precoder_modulus_error: f64,
    /// Largest `| |[G_A]_kl|^2 - 1/Nr |`.
    pub combiner_modulus_error: f64,
}

/// Limits shared by every AP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub v_j: usize,
    pub r_min: f64,
    pub p_b: f64,
}

/// Returns every violated constraint; an empty list means feasible.
///
/// `aps` lists the AP indices, `links` one entry per served (user, AP).
pub fn check_constraints(aps: &[usize], links: &[LinkState], limits: &Limits) -> Vec<Violation> {
    let mut out = Vec::new();
    for &ap in aps {
        let served: Vec<&LinkState> = links.iter().filter(|l| l.ap == ap).collect();
        if served.len() > limits.v_j {
            out.push(Violation {
                kind: ConstraintKind::UsersPerAp,
                ap,
                user: None,
                measured: served.len() as f64,
                required: limits.v_j as f64,
            });
        }
        let budget = limits.p_b * (1.0 + POWER_RTOL);
        let ul_power: f64 = served.iter().map(|l| l.user_power).sum();
        let dl_power: f64 = served.iter().map(|l| l.transmit_power).sum();
        for measured in [ul_power, dl_power] {
            if measured > budget {
                out.push(Violation {
                    kind: ConstraintKind::Power,
                    ap,
                    user: None,
                    measured,
                    required: limits.p_b,
                });
            }
        }
        for l in served {
            if !(l.rate_dl >= limits.r_min) {
                out.push(Violation {
                    kind: ConstraintKind::MinRate,
                    ap,
                    user: Some(l.user),
                    measured: l.rate_dl,
                    required: limits.r_min,
                });
            }
            if !(l.precoder_modulus_error <= MODULUS_TOL) {
                out.push(Violation {
                    kind: ConstraintKind::PrecoderModulus,
                    ap,
                    user: Some(l.user),
                    measured: l.precoder_modulus_error,
                    required: MODULUS_TOL,
                });
            }
            if !(l.combiner_modulus_error <= MODULUS_TOL) {
                out.push(Violation {
                    kind: ConstraintKind::CombinerModulus,
                    ap,
                    user: Some(l.user),
                    measured: l.combiner_modulus_error,
                    required: MODULUS_TOL,
                });
            }
        }
    }
    out
}

/// Sorted, de-duplicated letters of the violations touching one link.
pub fn letters_for(violations: &[Violation], ap: usize, user: usize) -> Vec<char> {
    let mut v: Vec<char> = violations
        .iter()
        .filter(|x| x.touches(ap, user))
        .map(|x| x.kind.letter())
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(ap: usize, user: usize) -> LinkState {
        LinkState {
            ap,
            user,
            rate_dl: 1e6,
            user_power: 0.005,
            transmit_power: 0.005,
            precoder_modulus_error: 0.0,
            combiner_modulus_error: 0.0,
        }
    }

    const LIMITS: Limits = Limits {
        v_j: 2,
        r_min: 0.0,
        p_b: 0.01,
    };

    #[test]
    fn two_users_within_limit_is_feasible() {
        let links = [link(0, 0), link(0, 1), link(1, 0), link(1, 1)];
        assert!(check_constraints(&[0, 1], &links, &LIMITS).is_empty());
    }

    #[test]
    fn too_many_users() {
        let links = [link(0, 0), link(0, 1), link(0, 2)];
        let mut lim = LIMITS;
        lim.p_b = 1.0;
        let v = check_constraints(&[0], &links, &lim);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind.letter(), 'a');
        assert_eq!(letters_for(&v, 0, 2), vec!['a']);
    }

    #[test]
    fn rate_violation_reports_ratio() {
        let mut l = link(0, 0);
        l.rate_dl = 0.5;
        let mut lim = LIMITS;
        lim.r_min = 1.0;
        let v = check_constraints(&[0], &[l], &lim);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ConstraintKind::MinRate);
        assert_eq!(v[0].ratio(), 0.5);
        assert!(v[0].to_string().starts_with("(b) AP 0 user 0"));
    }

    #[test]
    fn power_and_modulus() {
        let mut l = link(0, 0);
        l.transmit_power = 0.02;
        l.precoder_modulus_error = 1e-11;
        l.combiner_modulus_error = 1e-13;
        let v = check_constraints(&[0], &[l], &LIMITS);
        let letters = letters_for(&v, 0, 0);
        assert_eq!(letters, vec!['c', 'd']);
        assert!(letters_for(&v, 1, 0).is_empty());
    }
}
