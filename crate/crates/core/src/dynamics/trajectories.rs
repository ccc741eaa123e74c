use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::CouplingMatrix;
use crate::optimize;
use crate::spin::ellipse::transverse_frame;

use super::check_times;

/// Classical site Hamiltonian
/// `H = Σ_{i<j} J_ij [xy·(s⁺_i s⁻_j + h.c.) + zz·s^z_i s^z_j] + Σ_i h_i s^z_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpinModel {
    Xy,
    Ising,
    /// `zz = delta`, so `delta = 2` is the isotropic Heisenberg point.
    Xxz { delta: f64 },
}

impl SpinModel {
    fn weights(self) -> (f64, f64) {
        match self {
            SpinModel::Xy => (1.0, 0.0),
            SpinModel::Ising => (0.0, 1.0),
            SpinModel::Xxz { delta } => (1.0, delta),
        }
    }
}

/// Initial product state: spin length and polar/azimuthal angles per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialSpins {
    pub spin_length: f64,
    pub angles: Vec<[f64; 2]>,
}

impl InitialSpins {
    pub fn uniform(n_sites: usize, spin_length: f64, theta: f64, phi: f64) -> Self {
        InitialSpins { spin_length, angles: vec![[theta, phi]; n_sites] }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrajectoryOptions {
    /// Local error per step (step doubling), relative to the spin length.
    pub tol: f64,
    pub keep_tracks: bool,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        TrajectoryOptions { tol: 1e-11, keep_tracks: true }
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    pub n_traj: usize,
    pub seed: u64,
    pub times: Vec<f64>,
    /// `tracks[k][t][i]`; empty unless requested.
    pub tracks: Vec<Vec<Vec<[f64; 3]>>>,
    /// Ensemble mean `mean[t][i]`.
    pub mean: Vec<Vec<[f64; 3]>>,
    /// Connected `⟨s^x_i s^x_j⟩ − ⟨s^x_i⟩⟨s^x_j⟩` per time.
    pub cxx: Vec<DMatrix<f64>>,
    /// Largest `| |s_i(t)| − |s_i(0)| |` over all trajectories.
    pub max_length_drift: f64,
    pub steps: usize,
}

impl TrajectoryEnsemble {
    /// `|Σ_i s⊥_i| / Σ_i |s_i(0)|` of the ensemble mean per time.
    pub fn transverse_magnetization(&self, spin_length: f64) -> Vec<f64> {
        self.mean
            .iter()
            .map(|sites| {
                let (x, y) = sites.iter().fold((0.0, 0.0), |(a, b), s| (a + s[0], b + s[1]));
                (x * x + y * y).sqrt() / (sites.len() as f64 * spin_length)
            })
            .collect()
    }
}

struct Rhs<'a> {
    j: &'a DMatrix<f64>,
    h: &'a [f64],
    xy: f64,
    zz: f64,
}

impl Rhs<'_> {
    fn eval(&self, y: &DVector<f64>, out: &mut DVector<f64>) {
        let m = self.h.len();
        let x = DVector::from_fn(m, |i, _| y[3 * i]);
        let yy = DVector::from_fn(m, |i, _| y[3 * i + 1]);
        let z = DVector::from_fn(m, |i, _| y[3 * i + 2]);
        let bx = self.j * &x * (2.0 * self.xy);
        let by = self.j * &yy * (2.0 * self.xy);
        let bz = self.j * &z * self.zz;
        for i in 0..m {
            let b = [bx[i], by[i], bz[i] + self.h[i]];
            let s = [x[i], yy[i], z[i]];
            out[3 * i] = b[1] * s[2] - b[2] * s[1];
            out[3 * i + 1] = b[2] * s[0] - b[0] * s[2];
            out[3 * i + 2] = b[0] * s[1] - b[1] * s[0];
        }
    }

    fn rk4(&self, y: &DVector<f64>, h: f64) -> DVector<f64> {
        let n = y.len();
        let mut k1 = DVector::zeros(n);
        let mut k2 = DVector::zeros(n);
        let mut k3 = DVector::zeros(n);
        let mut k4 = DVector::zeros(n);
        self.eval(y, &mut k1);
        self.eval(&(y + &k1 * (0.5 * h)), &mut k2);
        self.eval(&(y + &k2 * (0.5 * h)), &mut k3);
        self.eval(&(y + &k3 * h), &mut k4);
        y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    }

    #[cfg(test)]
    fn energy(&self, y: &DVector<f64>) -> f64 {
        let m = self.h.len();
        let mut e = 0.0;
        for i in 0..m {
            e += self.h[i] * y[3 * i + 2];
            for k in i + 1..m {
                let jik = self.j[(i, k)];
                if jik != 0.0 {
                    e += jik
                        * (2.0 * self.xy * (y[3 * i] * y[3 * k] + y[3 * i + 1] * y[3 * k + 1])
                            + self.zz * y[3 * i + 2] * y[3 * k + 2]);
                }
            }
        }
        e
    }
}

/// Integrates one trajectory with RK4 and step-doubling error control,
/// hitting every requested time exactly.
fn integrate(rhs: &Rhs, y0: DVector<f64>, times: &[f64], tol: f64, scale: f64) -> (Vec<DVector<f64>>, usize) {
    let mut y = y0;
    let mut t = 0.0;
    let mut h: f64 = 1e-2;
    let mut steps = 0;
    let mut out = Vec::with_capacity(times.len());
    let abs_tol = tol * scale;
    for &target in times {
        while t < target {
            let dt = h.min(target - t);
            let full = rhs.rk4(&y, dt);
            let half = rhs.rk4(&rhs.rk4(&y, 0.5 * dt), 0.5 * dt);
            let err = (&half - &full).amax() / 15.0;
            if err <= abs_tol || dt < 1e-12 {
                y = &half + (&half - &full) / 15.0;
                t += dt;
                steps += 1;
                let fac = if err == 0.0 { 2.0 } else { (0.9 * (abs_tol / err).powf(0.2)).clamp(0.3, 2.0) };
                if dt == h || fac < 1.0 {
                    h = dt * fac;
                }
            } else {
                h = dt * (0.9 * (abs_tol / err).powf(0.2)).clamp(0.1, 0.9);
            }
        }
        out.push(y.clone());
    }
    (out, steps)
}

fn direction(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Classical (`n_traj = 1`) or truncated-Wigner (`n_traj > 1`) dynamics of
/// an array of spins, `ds_i/dt = B_i × s_i` with `B_i = ∂H/∂s_i`.
///
/// Trajectory `k` draws its initial noise from ChaCha8 stream `k` of `seed`,
/// so results do not depend on thread scheduling.
#[allow(clippy::too_many_arguments)]
pub fn mean_field_trajectories(
    j: &CouplingMatrix,
    fields: &[f64],
    model: SpinModel,
    initial: &InitialSpins,
    n_traj: usize,
    seed: u64,
    times: &[f64],
    opts: TrajectoryOptions,
) -> Result<TrajectoryEnsemble> {
    let m = j.n_sites();
    if fields.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: fields.len() });
    }
    if initial.angles.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: initial.angles.len() });
    }
    let s = initial.spin_length;
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::param("spin_length", format!("must be positive, got {s}")));
    }
    if n_traj == 0 {
        return Err(Error::param("n_traj", "need at least one trajectory"));
    }
    check_times(times)?;
    let (xy, zz) = model.weights();
    let rhs = Rhs { j: j.matrix(), h: fields, xy, zz };
    let dirs: Vec<[f64; 3]> = initial.angles.iter().map(|a| direction(a[0], a[1])).collect();
    let frames: Vec<[[f64; 3]; 2]> = dirs
        .iter()
        .map(|d| transverse_frame(*d))
        .collect::<Result<_>>()?;
    let noise = Normal::new(0.0, (s / 2.0).sqrt()).expect("positive variance");

    let runs: Vec<(Vec<DVector<f64>>, usize, f64)> = (0..n_traj)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut y0 = DVector::zeros(3 * m);
            for i in 0..m {
                let (a, b) = if n_traj > 1 { (noise.sample(&mut rng), noise.sample(&mut rng)) } else { (0.0, 0.0) };
                for c in 0..3 {
                    y0[3 * i + c] = s * dirs[i][c] + a * frames[i][0][c] + b * frames[i][1][c];
                }
            }
            let len0: Vec<f64> = (0..m).map(|i| site(&y0, i)).map(norm).collect();
            let (track, steps) = integrate(&rhs, y0, times, opts.tol, s);
            let drift = track
                .iter()
                .flat_map(|y| (0..m).map(move |i| (i, norm(site(y, i)))))
                .map(|(i, l)| (l - len0[i]).abs())
                .fold(0.0, f64::max);
            (track, steps, drift)
        })
        .collect();

    let nt = times.len();
    let mut mean = vec![vec![[0.0; 3]; m]; nt];
    let mut second = vec![DMatrix::<f64>::zeros(m, m); nt];
    let mut steps = 0;
    let mut drift: f64 = 0.0;
    for (track, st, dr) in &runs {
        steps += st;
        drift = drift.max(*dr);
        for (ti, y) in track.iter().enumerate() {
            for i in 0..m {
                for c in 0..3 {
                    mean[ti][i][c] += y[3 * i + c];
                }
                for k in 0..m {
                    second[ti][(i, k)] += y[3 * i] * y[3 * k];
                }
            }
        }
    }
    let inv = 1.0 / n_traj as f64;
    let mut cxx = Vec::with_capacity(nt);
    for ti in 0..nt {
        for v in mean[ti].iter_mut() {
            for c in v.iter_mut() {
                *c *= inv;
            }
        }
        let mx: Vec<f64> = mean[ti].iter().map(|v| v[0]).collect();
        cxx.push(DMatrix::from_fn(m, m, |i, k| second[ti][(i, k)] * inv - mx[i] * mx[k]));
    }
    let tracks = if opts.keep_tracks {
        runs.into_iter()
            .map(|(track, _, _)| track.iter().map(|y| (0..m).map(|i| site(y, i)).collect()).collect())
            .collect()
    } else {
        Vec::new()
    };
    Ok(TrajectoryEnsemble {
        n_traj,
        seed,
        times: times.to_vec(),
        tracks,
        mean,
        cxx,
        max_length_drift: drift,
        steps,
    })
}

fn site(y: &DVector<f64>, i: usize) -> [f64; 3] {
    [y[3 * i], y[3 * i + 1], y[3 * i + 2]]
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Classical energy of a configuration under `model`.
#[cfg(test)]
fn classical_energy(j: &CouplingMatrix, fields: &[f64], model: SpinModel, spins: &[[f64; 3]]) -> f64 {
    let (xy, zz) = model.weights();
    let rhs = Rhs { j: j.matrix(), h: fields, xy, zz };
    let y = DVector::from_iterator(3 * spins.len(), spins.iter().flat_map(|s| s.iter().copied()));
    rhs.energy(&y)
}

/// Smallest all-to-all exchange `χ` (with `J_ij = χ/M`) for which spins
/// initialized along `x` keep a late-time transverse magnetization above ½
/// in the fields `h_j`. Located by bisection on `[lo, hi]`.
pub fn bcs_protection_threshold(
    fields: &[f64],
    spin_length: f64,
    t_final: f64,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    let m = fields.len();
    if m < 2 {
        return Err(Error::param("fields", "need at least two sites"));
    }
    let times = optimize::linspace(0.0, t_final, 201);
    let init = InitialSpins::uniform(m, spin_length, std::f64::consts::FRAC_PI_2, 0.0);
    let opts = TrajectoryOptions { tol: 1e-9, keep_tracks: false };
    let protected = |chi: f64| -> Result<bool> {
        let j = CouplingMatrix::all_to_all(m, chi / m as f64);
        let run = mean_field_trajectories(&j, fields, SpinModel::Xy, &init, 1, 0, &times, opts)?;
        let mag = run.transverse_magnetization(spin_length);
        let tail = &mag[mag.len() * 3 / 4..];
        Ok(tail.iter().sum::<f64>() / tail.len() as f64 > 0.5)
    };
    if protected(lo)? || !protected(hi)? {
        return Err(Error::param("bracket", "protection must switch on inside [lo, hi]"));
    }
    let mut failure = None;
    let x = optimize::bisect_predicate(
        |chi| match protected(chi) {
            Ok(p) => p,
            Err(e) => {
                failure.get_or_insert(e);
                true
            }
        },
        lo,
        hi,
        rel_tol,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::Boundary;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn free_larmor_precession() {
        let m = 3;
        let h = 0.7;
        let j = CouplingMatrix::zeros(m, Boundary::Open);
        let init = InitialSpins::uniform(m, 0.5, FRAC_PI_2, 0.0);
        let times = [0.0, 1.0, 2.5];
        let r = mean_field_trajectories(&j, &[h; 3], SpinModel::Xy, &init, 1, 1, &times, Default::default()).unwrap();
        for (t, sites) in times.iter().zip(&r.mean) {
            for s in sites {
                assert!((s[0] - 0.5 * (h * t).cos()).abs() < 1e-9);
                assert!((s[1] - 0.5 * (h * t).sin()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn two_site_flip_flop_matches_single_magnon() {
        // both spins near the south pole, site 0 tilted by ε: the transverse
        // amplitude hops like the exact single-excitation state, cos²(Jt)
        let jv = 0.9;
        let eps = 1e-4;
        let j = CouplingMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, jv, jv, 0.0]), Boundary::Open).unwrap();
        let init = InitialSpins { spin_length: 0.5, angles: vec![[PI - eps, 0.0], [PI, 0.0]] };
        let times: Vec<f64> = (0..9).map(|k| 0.4 * k as f64).collect();
        let r = mean_field_trajectories(&j, &[0.0, 0.0], SpinModel::Xy, &init, 1, 0, &times, Default::default())
            .unwrap();
        for (t, sites) in times.iter().zip(&r.mean) {
            let a0 = sites[0][0].hypot(sites[0][1]);
            let a1 = sites[1][0].hypot(sites[1][1]);
            let frac = a0 * a0 / (a0 * a0 + a1 * a1);
            assert!((frac - (jv * t).cos().powi(2)).abs() < 1e-6, "t={t} frac={frac}");
        }
    }

    #[test]
    fn lengths_and_energy_conserved_and_reproducible() {
        let m = 6;
        let jm = DMatrix::from_fn(m, m, |a, b| if a == b { 0.0 } else { 1.0 / (1.0 + (a as f64 - b as f64).abs()) });
        let j = CouplingMatrix::new(jm, Boundary::Open).unwrap();
        let fields: Vec<f64> = (0..m).map(|i| 0.1 * i as f64).collect();
        let init = InitialSpins::uniform(m, 2.0, 1.1, 0.3);
        let times = optimize::linspace(0.0, 5.0, 11);
        let model = SpinModel::Xxz { delta: 0.6 };
        let a = mean_field_trajectories(&j, &fields, model, &init, 8, 42, &times, Default::default()).unwrap();
        assert!(a.max_length_drift < 1e-6);
        for track in &a.tracks {
            let e0 = classical_energy(&j, &fields, model, &track[0]);
            for snap in track {
                assert!((classical_energy(&j, &fields, model, snap) - e0).abs() < 1e-6);
            }
        }
        let b = mean_field_trajectories(&j, &fields, model, &init, 8, 42, &times, Default::default()).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.cxx, b.cxx);
        let c = mean_field_trajectories(&j, &fields, model, &init, 8, 43, &times, Default::default()).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn wigner_noise_has_half_spin_variance() {
        let m = 1;
        let j = CouplingMatrix::zeros(m, Boundary::Open);
        let init = InitialSpins::uniform(m, 3.0, FRAC_PI_2, 0.0);
        let r = mean_field_trajectories(&j, &[0.0], SpinModel::Xy, &init, 4000, 9, &[0.0], Default::default()).unwrap();
        // transverse components of a +x spin are y and z
        let ys: Vec<f64> = r.tracks.iter().map(|t| t[0][0][1]).collect();
        let var = ys.iter().map(|y| y * y).sum::<f64>() / ys.len() as f64;
        assert!((var - 1.5).abs() < 0.1, "var {var}");
    }

    #[test]
    fn rejects_bad_input() {
        let j = CouplingMatrix::zeros(2, Boundary::Open);
        let init = InitialSpins::uniform(2, 0.5, 0.0, 0.0);
        assert!(mean_field_trajectories(&j, &[0.0], SpinModel::Xy, &init, 1, 0, &[0.0], Default::default()).is_err());
        let bad = InitialSpins::uniform(2, 0.0, 0.0, 0.0);
        assert!(mean_field_trajectories(&j, &[0.0; 2], SpinModel::Xy, &bad, 1, 0, &[0.0], Default::default()).is_err());
        assert!(CouplingMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]), Boundary::Open).is_err());
    }

    #[test]
    fn protection_threshold_scales_with_field_spread() {
        let m = 24;
        let spread = |w: f64| -> Vec<f64> { (0..m).map(|i| w * (i as f64 / (m - 1) as f64 - 0.5)).collect() };
        let t1 = bcs_protection_threshold(&spread(1.0), 0.5, 60.0, 0.01, 20.0, 1e-3).unwrap();
        let t2 = bcs_protection_threshold(&spread(2.0), 0.5, 30.0, 0.02, 40.0, 1e-3).unwrap();
        assert!(t1 > 0.01 && t1 < 20.0);
        // dimensionless: doubling the spread and halving the time doubles χ_c
        assert!((t2 / t1 - 2.0).abs() < 0.02, "{t1} {t2}");
    }
}
