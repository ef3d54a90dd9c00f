//! Indoor geometry: node placement, distances and azimuth angles.

use std::collections::HashSet;
use std::ops::RangeInclusive;

use rand::Rng;

use crate::error::{Result, SimError};

/// Point in the indoor box, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3D {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn translate(&self, dx: f64, dy: f64, dz: f64) -> Self {
        Self::new(self.x + dx, self.y + dy, self.z + dz)
    }
}

/// Euclidean distance in meters.
pub fn distance(p: Position3D, q: Position3D) -> f64 {
    let (dx, dy, dz) = (q.x - p.x, q.y - p.y, q.z - p.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Azimuth of departure at `tx` and of arrival at `rx`, both in degrees in
/// `[0, 360)`.
///
/// The departure direction is `rx - tx` and the arrival direction is its
/// negation; only the x/y components matter. The quadrant-aware `atan2`
/// is used so the full circle is covered.
pub fn departure_arrival_angles(tx: Position3D, rx: Position3D) -> Result<(f64, f64)> {
    let dx = rx.x - tx.x;
    let dy = rx.y - tx.y;
    if dx == 0.0 && dy == 0.0 {
        return Err(SimError::DegenerateGeometry(format!(
            "tx {tx:?} and rx {rx:?} share the same (x, y) position"
        )));
    }
    let aod = wrap_degrees(dy.atan2(dx).to_degrees());
    let aoa = wrap_degrees(aod + 180.0);
    Ok((aod, aoa))
}

fn wrap_degrees(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    // rem_euclid of a tiny negative number rounds up to 360.0
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

/// Axis-aligned box the nodes live in.
#[derive(Debug, Clone, PartialEq)]
pub struct IndoorArea {
    pub x_range: RangeInclusive<f64>,
    pub y_range: RangeInclusive<f64>,
    pub z_range: RangeInclusive<f64>,
}

impl Default for IndoorArea {
    fn default() -> Self {
        Self {
            x_range: 0.0..=10.0,
            y_range: 0.0..=17.0,
            z_range: 0.0..=3.0,
        }
    }
}

impl IndoorArea {
    pub fn new(
        x_range: RangeInclusive<f64>,
        y_range: RangeInclusive<f64>,
        z_range: RangeInclusive<f64>,
    ) -> Result<Self> {
        for (name, r) in [("x", &x_range), ("y", &y_range), ("z", &z_range)] {
            if !(r.start().is_finite() && r.end().is_finite()) || r.start() > r.end() {
                return Err(SimError::Config(format!(
                    "{name} range {:?} must be finite and non-empty",
                    r
                )));
            }
        }
        Ok(Self {
            x_range,
            y_range,
            z_range,
        })
    }

    pub fn contains(&self, p: Position3D) -> bool {
        self.x_range.contains(&p.x) && self.y_range.contains(&p.y) && self.z_range.contains(&p.z)
    }

    /// Uniformly random point inside the box.
    pub fn sample(&self, rng: &mut impl Rng) -> Position3D {
        let pick = |rng: &mut dyn rand::RngCore, r: &RangeInclusive<f64>| {
            if r.start() == r.end() {
                *r.start()
            } else {
                rng.random_range(r.clone())
            }
        };
        Position3D::new(
            pick(rng, &self.x_range),
            pick(rng, &self.y_range),
            pick(rng, &self.z_range),
        )
    }
}

/// Access point.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessPoint {
    pub id: usize,
    pub position: Position3D,
    /// Transmit power `P_B` in watts.
    pub power_w: f64,
    /// Queue service rate `mu`.
    pub service_rate: f64,
}

/// VR user (station).
#[derive(Debug, Clone, PartialEq)]
pub struct User {
    pub id: usize,
    pub position: Position3D,
    /// Uplink transmit power `P_U` in watts.
    pub power_w: f64,
    /// Request arrival rate `lambda`.
    pub arrival_rate: f64,
    /// Delay tolerance `gamma_D` in seconds.
    pub delay_tolerance_s: f64,
    /// Reference position used by the tracking-accuracy model.
    pub reference_position: Position3D,
}

/// Validated set of APs and users inside an [`IndoorArea`].
#[derive(Debug, Clone)]
pub struct NetworkTopology {
    area: IndoorArea,
    aps: Vec<AccessPoint>,
    users: Vec<User>,
}

impl NetworkTopology {
    pub fn new(area: IndoorArea, aps: Vec<AccessPoint>, users: Vec<User>) -> Result<Self> {
        if aps.is_empty() || users.is_empty() {
            return Err(SimError::Config(
                "topology needs at least one AP and one user".into(),
            ));
        }
        let mut seen = HashSet::new();
        for ap in &aps {
            if !seen.insert(ap.id) {
                return Err(SimError::Config(format!("duplicate AP id {}", ap.id)));
            }
            check_position(&area, ap.position, "AP", ap.id)?;
            if !(ap.power_w > 0.0) {
                return Err(SimError::Config(format!("AP {} power must be > 0", ap.id)));
            }
        }
        seen.clear();
        for u in &users {
            if !seen.insert(u.id) {
                return Err(SimError::Config(format!("duplicate user id {}", u.id)));
            }
            check_position(&area, u.position, "user", u.id)?;
            if !(u.power_w >= 0.0) {
                return Err(SimError::Config(format!(
                    "user {} power must be >= 0",
                    u.id
                )));
            }
            for ap in &aps {
                if !(ap.service_rate > u.arrival_rate) {
                    return Err(SimError::Config(format!(
                        "queue unstable: AP {} service rate {} must exceed user {} arrival rate {}",
                        ap.id, ap.service_rate, u.id, u.arrival_rate
                    )));
                }
            }
        }
        Ok(Self { area, aps, users })
    }

    pub fn area(&self) -> &IndoorArea {
        &self.area
    }

    pub fn aps(&self) -> &[AccessPoint] {
        &self.aps
    }

    pub fn users(&self) -> &[User] {
        &self.users
    }

    pub fn n_aps(&self) -> usize {
        self.aps.len()
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    /// Distance between user `i` and AP `j` (indices, not ids).
    pub fn link_distance(&self, user: usize, ap: usize) -> f64 {
        distance(self.users[user].position, self.aps[ap].position)
    }
}

fn check_position(area: &IndoorArea, p: Position3D, kind: &str, id: usize) -> Result<()> {
    if !p.is_finite() || !area.contains(p) {
        return Err(SimError::Config(format!(
            "{kind} {id} position {p:?} lies outside the indoor area"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn p(x: f64, y: f64, z: f64) -> Position3D {
        Position3D::new(x, y, z)
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(p(0.0, 0.0, 0.0), p(3.0, 4.0, 0.0)), 5.0);
        assert_eq!(distance(p(1.0, 1.0, 1.0), p(1.0, 1.0, 1.0)), 0.0);
        assert_eq!(distance(p(1.0, 2.0, 3.0), p(4.0, 6.0, 3.0)), 5.0);
    }

    #[test]
    fn angle_examples() {
        let (aod, aoa) = departure_arrival_angles(p(0.0, 0.0, 0.0), p(1.0, 1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(aod, 45.0, epsilon = 1e-12);
        assert_abs_diff_eq!(aoa, 225.0, epsilon = 1e-12);

        let (aod, aoa) = departure_arrival_angles(p(0.0, 0.0, 0.0), p(0.0, 2.0, 1.0)).unwrap();
        assert_eq!((aod, aoa), (90.0, 270.0));

        let (aod, aoa) = departure_arrival_angles(p(2.0, 3.0, 1.0), p(1.0, 3.0, 1.0)).unwrap();
        assert_eq!((aod, aoa), (180.0, 0.0));
    }

    #[test]
    fn shared_xy_is_degenerate() {
        let err = departure_arrival_angles(p(1.0, 1.0, 0.0), p(1.0, 1.0, 2.5)).unwrap_err();
        assert!(matches!(err, SimError::DegenerateGeometry(_)));
    }

    #[test]
    fn default_area_matches_room() {
        let a = IndoorArea::default();
        assert!(a.contains(p(10.0, 17.0, 3.0)));
        assert!(!a.contains(p(10.1, 1.0, 1.0)));
        assert!(IndoorArea::new(1.0..=0.0, 0.0..=1.0, 0.0..=1.0).is_err());
    }

    fn ap(id: usize, pos: Position3D) -> AccessPoint {
        AccessPoint {
            id,
            position: pos,
            power_w: 0.01,
            service_rate: 4.0,
        }
    }

    fn user(id: usize, pos: Position3D) -> User {
        User {
            id,
            position: pos,
            power_w: 0.005,
            arrival_rate: 2.0,
            delay_tolerance_s: 0.02,
            reference_position: pos,
        }
    }

    #[test]
    fn topology_validation() {
        let area = IndoorArea::default();
        let ok = NetworkTopology::new(
            area.clone(),
            vec![ap(1, p(1.0, 1.0, 2.0)), ap(2, p(9.0, 16.0, 2.0))],
            vec![user(1, p(2.0, 3.0, 1.0))],
        )
        .unwrap();
        assert_abs_diff_eq!(ok.link_distance(0, 0), 6f64.sqrt(), epsilon = 1e-12);

        let dup = NetworkTopology::new(
            area.clone(),
            vec![ap(1, p(1.0, 1.0, 2.0)), ap(1, p(2.0, 1.0, 2.0))],
            vec![user(1, p(2.0, 3.0, 1.0))],
        );
        assert!(dup.is_err());

        let outside = NetworkTopology::new(
            area.clone(),
            vec![ap(1, p(11.0, 1.0, 2.0))],
            vec![user(1, p(2.0, 3.0, 1.0))],
        );
        assert!(outside.is_err());

        let mut slow = ap(1, p(1.0, 1.0, 2.0));
        slow.service_rate = 2.0;
        let unstable = NetworkTopology::new(area, vec![slow], vec![user(1, p(2.0, 3.0, 1.0))]);
        assert!(matches!(unstable, Err(SimError::Config(_))));
    }

    fn arb_pos() -> impl Strategy<Value = Position3D> {
        (-20.0f64..20.0, -20.0f64..20.0, -5.0f64..5.0).prop_map(|(x, y, z)| p(x, y, z))
    }

    proptest! {
        #[test]
        fn triangle_inequality(a in arb_pos(), b in arb_pos(), c in arb_pos()) {
            prop_assert!(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12);
            prop_assert_eq!(distance(a, b), distance(b, a));
        }

        #[test]
        fn angles_translation_invariant_and_swap(
            a in arb_pos(), b in arb_pos(),
            dx in -5.0f64..5.0, dy in -5.0f64..5.0, dz in -2.0f64..2.0,
        ) {
            prop_assume!((a.x - b.x).abs() > 1e-6 || (a.y - b.y).abs() > 1e-6);
            let (aod, aoa) = departure_arrival_angles(a, b).unwrap();
            prop_assert!((0.0..360.0).contains(&aod) && (0.0..360.0).contains(&aoa));

            let (taod, taoa) = departure_arrival_angles(
                a.translate(dx, dy, dz), b.translate(dx, dy, dz)).unwrap();
            let circ = |x: f64, y: f64| { let d = (x - y).abs(); d.min(360.0 - d) };
            prop_assert!(circ(aod, taod) < 1e-6);
            prop_assert!(circ(aoa, taoa) < 1e-6);

            let (saod, saoa) = departure_arrival_angles(b, a).unwrap();
            prop_assert!(circ(saod, aoa) < 1e-9);
            prop_assert!(circ(saoa, aod) < 1e-9);
        }
    }
}
