use super::dopri::OdeSystem;

/// Planar Cartesian state `[x, y, ẋ, ẏ, τ]` with `dτ/dt = 1/(2r)`.
pub(crate) struct Cartesian2;

impl OdeSystem<5> for Cartesian2 {
    fn rhs(&self, _t: f64, y: &[f64; 5], dy: &mut [f64; 5]) {
        let r = y[0].hypot(y[1]);
        let r3 = r * r * r;
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = -y[0] / r3 + 1.0;
        dy[3] = -y[1] / r3;
        dy[4] = 0.5 / r;
    }
}

/// Spatial Cartesian state `[x, y, z, ẋ, ẏ, ż, τ]`, field along z.
pub(crate) struct Cartesian3;

impl OdeSystem<7> for Cartesian3 {
    fn rhs(&self, _t: f64, y: &[f64; 7], dy: &mut [f64; 7]) {
        let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        let r3 = r * r * r;
        dy[0] = y[3];
        dy[1] = y[4];
        dy[2] = y[5];
        dy[3] = -y[0] / r3;
        dy[4] = -y[1] / r3;
        dy[5] = -y[2] / r3 + 1.0;
        dy[6] = 0.5 / r;
    }
}

/// `[ξ, ξ′, η, η′]` in the plane.
pub(crate) struct Parabolic2 {
    pub h: f64,
}

impl OdeSystem<4> for Parabolic2 {
    fn rhs(&self, _tau: f64, y: &[f64; 4], dy: &mut [f64; 4]) {
        let (xi, eta) = (y[0], y[2]);
        dy[0] = y[1];
        dy[1] = 2.0 * xi * (xi * xi + self.h);
        dy[2] = y[3];
        dy[3] = 2.0 * eta * (self.h - eta * eta);
    }
}

/// `[ξ, ξ′, η, η′]` in space with the centrifugal terms `L²/ξ³`, `L²/η³`.
pub(crate) struct Parabolic3 {
    pub h: f64,
    pub l2: f64,
}

impl OdeSystem<4> for Parabolic3 {
    fn rhs(&self, _tau: f64, y: &[f64; 4], dy: &mut [f64; 4]) {
        let (xi, eta) = (y[0], y[2]);
        dy[0] = y[1];
        dy[1] = 2.0 * xi * (xi * xi + self.h) + self.l2 / (xi * xi * xi);
        dy[2] = y[3];
        dy[3] = 2.0 * eta * (self.h - eta * eta) + self.l2 / (eta * eta * eta);
    }
}
