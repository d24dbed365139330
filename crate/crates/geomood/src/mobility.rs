//! User mobility: radius of gyration over message positions.
//!
//! A user's radius of gyration is the root-mean-square great-circle
//! distance from their positions to the centroid of those positions (the
//! arithmetic mean latitude/longitude). A tract's mobility is the mean
//! radius over the distinct users who posted from it.

use crate::error::Error;
use crate::geo::{haversine, LatLon};
use crate::ingest::GeoMessage;
use crate::Result;
use std::collections::{BTreeMap, BTreeSet, HashSet};

/// One user's mobility summary.
#[derive(Debug, Clone, PartialEq)]
pub struct UserMobility {
    pub user_id: String,
    pub n_points: u64,
    pub center: LatLon,
    pub radius_m: f64,
}

/// One tract's mobility summary: mean user radius over distinct users.
#[derive(Debug, Clone, PartialEq)]
pub struct TractMobility {
    pub tract_id: String,
    pub n_users: u64,
    pub mean_radius_m: f64,
}

/// Which messages contribute position points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PointScope {
    /// Every message a user posted.
    #[default]
    AllMessages,
    /// Only the user's check-in announcements.
    CheckinsOnly,
}

fn check_span(points: &[LatLon], who: &str) -> Result<()> {
    let min = points.iter().map(|p| p.lon).fold(f64::INFINITY, f64::min);
    let max = points
        .iter()
        .map(|p| p.lon)
        .fold(f64::NEG_INFINITY, f64::max);
    if max - min > 180.0 {
        return Err(Error::AntimeridianSpan { who: who.into() });
    }
    Ok(())
}

/// Arithmetic mean position in degree space.
///
/// Errors on an empty set, and on sets spanning more than 180° of
/// longitude, where the degree-space mean stops being meaningful.
pub fn center_of_mass(points: &[LatLon]) -> Result<LatLon> {
    if points.is_empty() {
        return Err(Error::EmptyInput {
            what: "points for center of mass".into(),
        });
    }
    check_span(points, "center of mass")?;
    let n = points.len() as f64;
    Ok(LatLon::new(
        points.iter().map(|p| p.lat).sum::<f64>() / n,
        points.iter().map(|p| p.lon).sum::<f64>() / n,
    ))
}

/// Radius of gyration in meters: RMS great-circle distance to the centroid.
///
/// A single point gives exactly 0. Two points give half their separation.
///
/// ```
/// use geomood::geo::LatLon;
/// use geomood::mobility::radius_of_gyration;
///
/// let home = LatLon::new(34.05, -118.24);
/// assert_eq!(radius_of_gyration(&[home]).unwrap(), 0.0);
/// ```
pub fn radius_of_gyration(points: &[LatLon]) -> Result<f64> {
    let center = center_of_mass(points)?;
    let n = points.len() as f64;
    let sum_sq: f64 = points
        .iter()
        .map(|&p| {
            let d = haversine(p, center);
            d * d
        })
        .sum();
    Ok((sum_sq / n).sqrt())
}

/// Computes one user's mobility from their points.
pub fn user_mobility(user_id: &str, points: &[LatLon]) -> Result<UserMobility> {
    if points.is_empty() {
        return Err(Error::EmptyInput {
            what: format!("points for user {user_id}"),
        });
    }
    check_span(points, &format!("user {user_id}"))?;
    let center = center_of_mass(points)?;
    let radius_m = radius_of_gyration(points)?;
    Ok(UserMobility {
        user_id: user_id.to_string(),
        n_points: points.len() as u64,
        center,
        radius_m,
    })
}

/// Groups messages by user and computes each user's mobility.
///
/// With [`PointScope::CheckinsOnly`], only messages whose id appears in
/// `checkin_ids` contribute points; users with no such message get no entry.
/// Message order within a user follows corpus order, and the result is
/// keyed (hence ordered) by user id.
pub fn compute_user_mobilities(
    messages: &[GeoMessage],
    scope: PointScope,
    checkin_ids: &HashSet<String>,
) -> Result<BTreeMap<String, UserMobility>> {
    let mut points_by_user: BTreeMap<&str, Vec<LatLon>> = BTreeMap::new();
    for msg in messages {
        if scope == PointScope::CheckinsOnly && !checkin_ids.contains(&msg.message_id) {
            continue;
        }
        points_by_user
            .entry(msg.user_id.as_str())
            .or_default()
            .push(msg.position());
    }
    points_by_user
        .into_iter()
        .map(|(user_id, points)| Ok((user_id.to_string(), user_mobility(user_id, &points)?)))
        .collect()
}

/// Aggregates user radii per tract.
///
/// `posters` maps each tract to the distinct users who posted from it.
/// Every listed user must have a mobility entry; a missing one is an
/// internal error (the caller filtered inconsistently). Tracts appear in id
/// order; a tract with no users is omitted.
pub fn tract_mobility(
    user_mobilities: &BTreeMap<String, UserMobility>,
    posters: &BTreeMap<String, BTreeSet<String>>,
) -> Result<Vec<TractMobility>> {
    posters
        .iter()
        .filter(|(_, users)| !users.is_empty())
        .map(|(tract_id, users)| {
            let mut sum = 0.0;
            for user_id in users {
                let m = user_mobilities.get(user_id).ok_or_else(|| {
                    Error::internal(format!(
                        "tract {tract_id} lists user {user_id} with no mobility entry"
                    ))
                })?;
                sum += m.radius_m;
            }
            Ok(TractMobility {
                tract_id: tract_id.clone(),
                n_users: users.len() as u64,
                mean_radius_m: sum / users.len() as f64,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    fn msg(id: &str, user: &str, lat: f64, lon: f64) -> GeoMessage {
        GeoMessage {
            message_id: id.to_string(),
            user_id: user.to_string(),
            timestamp: Utc.with_ymd_and_hms(2014, 7, 1, 12, 0, 0).unwrap(),
            lat,
            lon,
            text: String::new(),
        }
    }

    #[test]
    fn single_point_has_zero_radius() {
        let p = LatLon::new(34.05, -118.24);
        assert_eq!(radius_of_gyration(&[p]).unwrap(), 0.0);
        let m = user_mobility("u1", &[p]).unwrap();
        assert_eq!(m.n_points, 1);
        assert_eq!(m.center, p);
    }

    #[test]
    fn two_points_give_half_their_separation() {
        // Reference: r_g of two points is d/2 with the centroid midway;
        // degree-space midpoint vs great-circle midpoint differ by far less
        // than 0.1% at city scales.
        let a = LatLon::new(34.00, -118.30);
        let b = LatLon::new(34.20, -118.10);
        let d = haversine(a, b);
        let r = radius_of_gyration(&[a, b]).unwrap();
        assert!(
            (r - d / 2.0).abs() / (d / 2.0) < 1e-3,
            "r={r}, d/2={}",
            d / 2.0
        );
    }

    #[test]
    fn identical_points_collapse_to_zero() {
        let p = LatLon::new(34.05, -118.24);
        assert_eq!(radius_of_gyration(&[p, p, p, p]).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_square_of_points_matches_hand_computation() {
        // Four points on a tiny square around the origin; by symmetry the
        // centroid is the origin and all four distances are equal, so the
        // radius equals that common distance.
        let eps = 0.01;
        let pts = [
            LatLon::new(eps, eps),
            LatLon::new(eps, -eps),
            LatLon::new(-eps, eps),
            LatLon::new(-eps, -eps),
        ];
        let d = haversine(pts[0], LatLon::new(0.0, 0.0));
        let r = radius_of_gyration(&pts).unwrap();
        assert!((r - d).abs() < 1e-9, "r={r} d={d}");
    }

    #[test]
    fn empty_input_and_antimeridian_spans_error() {
        assert!(matches!(
            radius_of_gyration(&[]),
            Err(Error::EmptyInput { .. })
        ));
        let pts = [LatLon::new(0.0, 179.5), LatLon::new(0.0, -179.5)];
        assert!(matches!(
            radius_of_gyration(&pts),
            Err(Error::AntimeridianSpan { .. })
        ));
    }

    #[test]
    fn mobilities_group_by_user_in_id_order() {
        let messages = vec![
            msg("m1", "zoe", 34.0, -118.0),
            msg("m2", "amy", 34.0, -118.0),
            msg("m3", "zoe", 34.1, -118.0),
            msg("m4", "amy", 34.0, -118.0),
        ];
        let mob =
            compute_user_mobilities(&messages, PointScope::AllMessages, &HashSet::new()).unwrap();
        let users: Vec<&String> = mob.keys().collect();
        assert_eq!(users, ["amy", "zoe"]);
        assert_eq!(mob["amy"].n_points, 2);
        assert_eq!(mob["amy"].radius_m, 0.0);
        assert!(mob["zoe"].radius_m > 1000.0);
    }

    #[test]
    fn checkin_scope_restricts_points_and_users() {
        let messages = vec![
            msg("m1", "amy", 34.0, -118.0),
            msg("m2", "amy", 35.0, -118.0),
            msg("m3", "bob", 34.0, -118.0),
        ];
        let checkin_ids: HashSet<String> = ["m1".to_string()].into_iter().collect();
        let mob =
            compute_user_mobilities(&messages, PointScope::CheckinsOnly, &checkin_ids).unwrap();
        assert_eq!(mob.len(), 1);
        assert_eq!(mob["amy"].n_points, 1);
        assert_eq!(mob["amy"].radius_m, 0.0);
    }

    #[test]
    fn tract_means_average_distinct_users() {
        let mut mobilities = BTreeMap::new();
        for (user, r) in [("amy", 100.0), ("bob", 300.0), ("cal", 500.0)] {
            mobilities.insert(
                user.to_string(),
                UserMobility {
                    user_id: user.to_string(),
                    n_points: 2,
                    center: LatLon::new(0.0, 0.0),
                    radius_m: r,
                },
            );
        }
        let mut posters: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        posters.insert(
            "T1".into(),
            ["amy".to_string(), "bob".to_string()].into_iter().collect(),
        );
        posters.insert("T2".into(), ["cal".to_string()].into_iter().collect());
        posters.insert("T3".into(), BTreeSet::new());

        let tracts = tract_mobility(&mobilities, &posters).unwrap();
        assert_eq!(tracts.len(), 2, "userless tract omitted");
        assert_eq!(tracts[0].tract_id, "T1");
        assert_eq!(tracts[0].n_users, 2);
        assert_eq!(tracts[0].mean_radius_m, 200.0);
        assert_eq!(tracts[1].mean_radius_m, 500.0);
    }

    #[test]
    fn missing_user_mobility_is_an_internal_error() {
        let mut posters: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        posters.insert("T1".into(), ["ghost".to_string()].into_iter().collect());
        let err = tract_mobility(&BTreeMap::new(), &posters).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
