use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::optimize::golden_section;
use crate::tol;

use super::{cross, dot3, norm3, spin_moments, QuantumState, SpinMoments};

/// Transverse variance profile `V(θ) = Var(cosθ S_⊥1 + sinθ S_⊥2)` in the
/// frame orthogonal to the mean spin.
#[derive(Debug, Clone)]
pub struct SqueezingEllipse {
    pub theta: Vec<f64>,
    pub variance: Vec<f64>,
    pub v_min: f64,
    pub v_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub mean_spin: [f64; 3],
    /// `[e⊥1, e⊥2]`; `(e⊥1, e⊥2, ⟨S⟩/|⟨S⟩|)` is right-handed.
    pub frame: [[f64; 3]; 2],
    /// 2×2 covariance of `(S_⊥1, S_⊥2)`.
    pub covariance: [[f64; 2]; 2],
}

impl SqueezingEllipse {
    pub fn variance_at(&self, theta: f64) -> f64 {
        ellipse_variance(&self.covariance, theta)
    }

    /// Unit vector along the minimum-variance direction.
    pub fn squeezed_axis(&self) -> [f64; 3] {
        self.direction(self.theta_min)
    }

    pub fn antisqueezed_axis(&self) -> [f64; 3] {
        self.direction(self.theta_max)
    }

    pub fn direction(&self, theta: f64) -> [f64; 3] {
        let [e1, e2] = self.frame;
        let (c, s) = (theta.cos(), theta.sin());
        [
            c * e1[0] + s * e2[0],
            c * e1[1] + s * e2[1],
            c * e1[2] + s * e2[2],
        ]
    }
}

fn ellipse_variance(c: &[[f64; 2]; 2], theta: f64) -> f64 {
    let (co, si) = (theta.cos(), theta.sin());
    co * co * c[0][0] + 2.0 * co * si * c[0][1] + si * si * c[1][1]
}

/// Orthonormal transverse frame for a mean-spin direction.
pub(crate) fn transverse_frame(mean: [f64; 3]) -> Result<[[f64; 3]; 2]> {
    let len = norm3(mean);
    if !(len > 0.0) {
        return Err(Error::ZeroMeanSpin);
    }
    let e = [mean[0] / len, mean[1] / len, mean[2] / len];
    let reference = if e[2].abs() > 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let p = dot3(reference, e);
    let mut e1 = [
        reference[0] - p * e[0],
        reference[1] - p * e[1],
        reference[2] - p * e[2],
    ];
    let n1 = norm3(e1);
    e1 = [e1[0] / n1, e1[1] / n1, e1[2] / n1];
    let e2 = cross(e, e1);
    Ok([e1, e2])
}

/// Ellipse from precomputed spin moments.
pub fn ellipse_from_moments(m: &SpinMoments, grid: usize) -> Result<SqueezingEllipse> {
    if m.length() <= tol::ALGEBRAIC {
        return Err(Error::ZeroMeanSpin);
    }
    let frame = transverse_frame(m.mean)?;
    let mut cov = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut v = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    v += frame[a][i] * m.cov[i][j] * frame[b][j];
                }
            }
            cov[a][b] = v;
        }
    }
    let grid = grid.max(8);
    let theta: Vec<f64> = (0..grid).map(|k| PI * k as f64 / grid as f64).collect();
    let variance: Vec<f64> = theta.iter().map(|&t| ellipse_variance(&cov, t)).collect();
    let step = PI / grid as f64;
    let imin = argbest(&variance, |a, b| a < b);
    let imax = argbest(&variance, |a, b| a > b);
    let t0 = theta[imin];
    let (theta_min, v_min) = golden_section(
        |t| ellipse_variance(&cov, t),
        t0 - step,
        t0 + step,
        tol::GOLDEN,
    );
    let t1 = theta[imax];
    let (theta_max, neg) = golden_section(
        |t| -ellipse_variance(&cov, t),
        t1 - step,
        t1 + step,
        tol::GOLDEN,
    );
    Ok(SqueezingEllipse {
        theta,
        variance,
        v_min,
        v_max: -neg,
        theta_min: theta_min.rem_euclid(PI),
        theta_max: theta_max.rem_euclid(PI),
        mean_spin: m.mean,
        frame,
        covariance: cov,
    })
}

fn argbest(v: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if better(x, v[best]) {
            best = i;
        }
    }
    best
}

/// Variance ellipse of the collective spin transverse to `⟨S⟩`, sampled on
/// `grid` angles in `[0, π)` and refined by golden-section search.
pub fn squeezing_ellipse(state: &QuantumState, grid: usize) -> Result<SqueezingEllipse> {
    let m = spin_moments(state)?;
    ellipse_from_moments(&m, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{coherent_spin_state, dicke_state, SpinSpace};

    #[test]
    fn css_is_isotropic() {
        let sp = SpinSpace::from_atoms(12);
        let css = coherent_spin_state(sp, 0.7, 1.9);
        let e = squeezing_ellipse(&css, 64).unwrap();
        for v in &e.variance {
            assert!((v - 3.0).abs() < 1e-10);
        }
        assert!((e.v_min - 3.0).abs() < 1e-10 && (e.v_max - 3.0).abs() < 1e-10);
    }

    #[test]
    fn dicke_has_no_frame() {
        let sp = SpinSpace::new(3.0).unwrap();
        let d = dicke_state(sp, 0.0).unwrap();
        assert!(matches!(squeezing_ellipse(&d, 16), Err(Error::ZeroMeanSpin)));
    }

    #[test]
    fn frame_is_right_handed() {
        for mean in [[1.0, 0.0, 0.0], [0.0, 0.0, 2.0], [0.3, -0.4, 0.5]] {
            let [e1, e2] = transverse_frame(mean).unwrap();
            let n = norm3(mean);
            let e = [mean[0] / n, mean[1] / n, mean[2] / n];
            let c = cross(e1, e2);
            for k in 0..3 {
                assert!((c[k] - e[k]).abs() < 1e-12);
            }
        }
    }
}
