use crate::Scalar;

use super::GeoError;

/// Mean Earth radius (IUGG) in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint<T = f64> {
    pub lat: T,
    pub lon: T,
}

impl<T: Scalar> GeoPoint<T> {
    /// Validated constructor: latitude in [-90, 90], longitude in [-180, 180].
    pub fn new(lat: T, lon: T) -> Result<Self, GeoError> {
        if !(lat >= T::lit(-90.0) && lat <= T::lit(90.0)) {
            return Err(GeoError::LatitudeOutOfRange(lat.as_f64()));
        }
        if !(lon >= T::lit(-180.0) && lon <= T::lit(180.0)) {
            return Err(GeoError::LongitudeOutOfRange(lon.as_f64()));
        }
        Ok(Self { lat, lon })
    }

    fn unit_vector(self) -> [T; 3] {
        let (lat, lon) = (self.lat.to_radians(), self.lon.to_radians());
        [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
    }
}

/// Great-circle distance in km (haversine form, atan2 for stability near
/// antipodes).
pub fn haversine_km<T: Scalar>(a: GeoPoint<T>, b: GeoPoint<T>) -> T {
    let two = T::lit(2.0);
    let (lat1, lat2) = (a.lat.to_radians(), b.lat.to_radians());
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();
    let s_lat = (dlat / two).sin();
    let s_lon = (dlon / two).sin();
    let h = (s_lat * s_lat + lat1.cos() * lat2.cos() * s_lon * s_lon).min(T::one());
    let central = two * h.sqrt().atan2((T::one() - h).sqrt());
    central * T::lit(EARTH_RADIUS_KM)
}

fn cross<T: Scalar>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot<T: Scalar>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm<T: Scalar>(a: [T; 3]) -> T {
    dot(a, a).sqrt()
}

/// Distance from `p` to the great-circle arc `a`-`b`, clamped to the
/// endpoints when the perpendicular foot falls outside the arc.
fn segment_distance_km<T: Scalar>(p: GeoPoint<T>, a: GeoPoint<T>, b: GeoPoint<T>) -> T {
    let endpoint = haversine_km(p, a).min(haversine_km(p, b));
    let (va, vb, vp) = (a.unit_vector(), b.unit_vector(), p.unit_vector());
    let n = cross(va, vb);
    let n_len = norm(n);
    // Coincident or antipodal endpoints do not define a unique great circle.
    if n_len < T::lit(1e-12) {
        return endpoint;
    }
    let n = [n[0] / n_len, n[1] / n_len, n[2] / n_len];
    let sin_xt = dot(vp, n);
    let foot = [vp[0] - sin_xt * n[0], vp[1] - sin_xt * n[1], vp[2] - sin_xt * n[2]];
    let foot_len = norm(foot);
    if foot_len < T::lit(1e-12) {
        return endpoint;
    }
    let within = dot(cross(va, foot), n) >= T::zero() && dot(cross(foot, vb), n) >= T::zero();
    if !within {
        return endpoint;
    }
    let cross_track = sin_xt.abs().atan2(foot_len) * T::lit(EARTH_RADIUS_KM);
    cross_track.min(endpoint)
}

/// Shortest distance from `p` to the polyline through `track`, in km.
pub fn point_to_track_km<T: Scalar>(p: GeoPoint<T>, track: &[GeoPoint<T>]) -> Result<T, GeoError> {
    match track {
        [] => Err(GeoError::EmptyTrack),
        [only] => Ok(haversine_km(p, *only)),
        _ => Ok(track
            .windows(2)
            .map(|w| segment_distance_km(p, w[0], w[1]))
            .fold(T::infinity(), T::min)),
    }
}
