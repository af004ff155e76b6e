//! Linear Kalman filter for 2D constant-velocity tracks.
//!
//! State layout is `[x, y, vx, vy]`; observations are positions with isotropic
//! noise `R = sigma * I`.

use nalgebra::{Matrix2, Matrix2x4, Matrix4, Matrix4x2, Vector2, Vector4};

use crate::error::{Error, Result};
use crate::TargetId;

/// Initial per-axis velocity variance, (m/s)^2.
pub const INITIAL_VELOCITY_VARIANCE: f64 = 100.0;

#[derive(Clone, Debug, PartialEq)]
pub struct FilterTrack {
    pub target_id: TargetId,
    pub state: Vector4<f64>,
    pub covariance: Matrix4<f64>,
    pub last_update_cpi: u64,
}

impl FilterTrack {
    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.state[0], self.state[1])
    }

    pub fn velocity(&self) -> Vector2<f64> {
        Vector2::new(self.state[2], self.state[3])
    }
}

/// Constant-velocity transition with white-noise acceleration of intensity `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct MotionModel {
    pub transition: Matrix4<f64>,
    pub process_noise: Matrix4<f64>,
}

impl MotionModel {
    pub fn constant_velocity(dt: f64, q: f64) -> Self {
        #[rustfmt::skip]
        let transition = Matrix4::new(
            1.0, 0.0, dt,  0.0,
            0.0, 1.0, 0.0, dt,
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
        );
        let p = q * dt.powi(3) / 3.0;
        let c = q * dt.powi(2) / 2.0;
        let v = q * dt;
        #[rustfmt::skip]
        let process_noise = Matrix4::new(
            p,   0.0, c,   0.0,
            0.0, p,   0.0, c,
            c,   0.0, v,   0.0,
            0.0, c,   0.0, v,
        );
        MotionModel {
            transition,
            process_noise,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementModel {
    pub observation: Matrix2x4<f64>,
    noise_variance: f64,
}

impl MeasurementModel {
    pub fn new(noise_variance: f64) -> Result<Self> {
        if !(noise_variance > 0.0 && noise_variance.is_finite()) {
            return Err(Error::InvalidMeasurement(noise_variance));
        }
        #[rustfmt::skip]
        let observation = Matrix2x4::new(
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
        );
        Ok(MeasurementModel {
            observation,
            noise_variance,
        })
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    fn noise(&self) -> Matrix2<f64> {
        Matrix2::identity() * self.noise_variance
    }
}

/// Residual of one update together with its predicted covariance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Innovation {
    pub residual: Vector2<f64>,
    pub covariance: Matrix2<f64>,
}

impl Innovation {
    pub fn norm(&self) -> f64 {
        self.residual.norm()
    }

    /// Normalized innovation squared, `y^T S^-1 y`.
    pub fn nis(&self) -> f64 {
        let inv = self
            .covariance
            .try_inverse()
            .unwrap_or_else(|| Matrix2::from_element(f64::NAN));
        (self.residual.transpose() * inv * self.residual)[(0, 0)]
    }
}

/// Starts a track at a single position fix with zero velocity.
pub fn init_track(z: Vector2<f64>, sigma: f64, cpi: u64, target_id: TargetId) -> Result<FilterTrack> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidMeasurement(sigma));
    }
    Ok(FilterTrack {
        target_id,
        state: Vector4::new(z.x, z.y, 0.0, 0.0),
        covariance: Matrix4::from_diagonal(&Vector4::new(
            sigma,
            sigma,
            INITIAL_VELOCITY_VARIANCE,
            INITIAL_VELOCITY_VARIANCE,
        )),
        last_update_cpi: cpi,
    })
}

pub fn predict(track: &mut FilterTrack, model: &MotionModel) {
    let f = &model.transition;
    track.state = f * track.state;
    let p = f * track.covariance * f.transpose() + model.process_noise;
    track.covariance = symmetrize(p);
}

/// Folds a position fix into the track, returning the innovation against the
/// prior state. The covariance uses the Joseph form and is re-symmetrized.
pub fn update(track: &mut FilterTrack, z: Vector2<f64>, model: &MeasurementModel) -> Result<Innovation> {
    let h = &model.observation;
    let p = &track.covariance;
    let residual = z - h * track.state;
    let s = symmetrize2(h * p * h.transpose() + model.noise());
    let s_inv = s.try_inverse().ok_or(Error::NumericalFailure)?;
    let gain: Matrix4x2<f64> = p * h.transpose() * s_inv;
    track.state += gain * residual;
    let i_kh = Matrix4::identity() - gain * h;
    let joseph = i_kh * p * i_kh.transpose() + gain * model.noise() * gain.transpose();
    track.covariance = symmetrize(joseph);
    Ok(Innovation {
        residual,
        covariance: s,
    })
}

/// Distance between a predicted and an observed position.
pub fn innovation_norm(predicted: Vector2<f64>, z: Vector2<f64>) -> f64 {
    (z - predicted).norm()
}

fn symmetrize(p: Matrix4<f64>) -> Matrix4<f64> {
    (p + p.transpose()) * 0.5
}

fn symmetrize2(p: Matrix2<f64>) -> Matrix2<f64> {
    (p + p.transpose()) * 0.5
}
