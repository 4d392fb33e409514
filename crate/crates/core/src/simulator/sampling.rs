use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use serde::{Deserialize, Serialize};

use crate::diagenc::walsh::fwht_in_place;
use crate::error::{QdlcError, Result};
use crate::stateprep::fsl::qft_coefficients;
use crate::types::C64;

/// Entries of the true distribution at or below this are treated as outside its support.
pub const SUPPORT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    Identity,
    Qft,
    Walsh,
}

impl Transform {
    pub const ALL: [Transform; 3] = [Transform::Identity, Transform::Qft, Transform::Walsh];

    pub fn name(&self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::Qft => "qft",
            Transform::Walsh => "walsh",
        }
    }
}

/// Measurement distribution after applying `t` to the state. Entries at or
/// below `SUPPORT_FLOOR` are transform round-off and are set to zero.
pub fn transform_distribution(amps: &[C64], t: Transform) -> Vec<f64> {
    let v = match t {
        Transform::Identity => amps.to_vec(),
        Transform::Qft => qft_coefficients(amps),
        Transform::Walsh => {
            let mut v = amps.to_vec();
            fwht_in_place(&mut v);
            v
        }
    };
    let p: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
    let total: f64 = p.iter().sum();
    let p: Vec<f64> = p.iter().map(|&x| if x / total > SUPPORT_FLOOR { x } else { 0.0 }).collect();
    let s: f64 = p.iter().sum();
    p.iter().map(|x| x / s).collect()
}

/// Sum p_i ln(p_i / q_i), with 0 ln 0 = 0. Infinite when q misses p's support.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(QdlcError::Dimension("distributions differ in length".into()));
    }
    if p.iter().chain(q).any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(QdlcError::Domain("probabilities must be finite and nonnegative".into()));
    }
    let mut kl = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b == 0.0 {
                return Ok(f64::INFINITY);
            }
            kl += a * (a / b).ln();
        }
    }
    Ok(kl.max(0.0))
}

/// Empirical frequencies with delta = 1/(10 shots) added on the support of `p`.
pub fn smoothed_empirical(counts: &[u64], shots: u64, p: &[f64]) -> Vec<f64> {
    let delta = 1.0 / (10.0 * shots as f64);
    let q: Vec<f64> = counts
        .iter()
        .zip(p)
        .map(|(&c, &pi)| c as f64 / shots as f64 + if pi > SUPPORT_FLOOR { delta } else { 0.0 })
        .collect();
    let s: f64 = q.iter().sum();
    q.iter().map(|x| x / s).collect()
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn trial_seed(seed: u64, transform: Transform, shots: u64, trial: usize) -> u64 {
    let t = Transform::ALL.iter().position(|x| *x == transform).unwrap() as u64;
    splitmix64(splitmix64(splitmix64(seed ^ t.wrapping_mul(0xA24B_AED4_963E_E407)) ^ shots) ^ trial as u64)
}

/// Multinomial draw by sequential conditional binomials.
pub fn sample_counts<R: Rng>(p: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; p.len()];
    let mut left = shots;
    let mut mass = 1.0;
    for (i, &pi) in p.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == p.len() {
            counts[i] = left;
            break;
        }
        let r = if mass > 0.0 { (pi / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = if r >= 1.0 {
            left
        } else if r <= 0.0 {
            0
        } else {
            rng.sample(Binomial::new(left, r).expect("valid binomial"))
        };
        counts[i] = k;
        left -= k;
        mass -= pi;
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlRow {
    pub transform: Transform,
    pub shots: u64,
    pub trial: usize,
    pub kl: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotsResult {
    pub transform: Transform,
    /// `None` when the tolerance is not reached within the grid.
    pub shots: Option<u64>,
    pub last_mean_kl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingStudy {
    pub amplitudes: Vec<C64>,
    pub transforms: Vec<Transform>,
    pub shots_grid: Vec<u64>,
    pub trials: usize,
    pub seed: u64,
}

impl SamplingStudy {
    pub fn new(amplitudes: Vec<C64>, shots_grid: Vec<u64>, trials: usize, seed: u64) -> Self {
        SamplingStudy { amplitudes, transforms: Transform::ALL.to_vec(), shots_grid, trials, seed }
    }

    /// Shots grid 10^(k/per_decade) for k in lo..=hi, deduplicated.
    pub fn log_grid(lo: i32, hi: i32, per_decade: u32) -> Vec<u64> {
        let mut g: Vec<u64> = (lo..=hi).map(|k| 10f64.powf(k as f64 / per_decade as f64).round() as u64).collect();
        g.dedup();
        g
    }
}

/// Every (transform, shots, trial) KL value of the study.
pub fn kl_study(study: &SamplingStudy) -> Result<Vec<KlRow>> {
    let mut rows = Vec::new();
    for &t in &study.transforms {
        let p = transform_distribution(&study.amplitudes, t);
        for &shots in &study.shots_grid {
            if shots == 0 {
                return Err(QdlcError::Domain("shots must be positive".into()));
            }
            for trial in 0..study.trials {
                let seed = trial_seed(study.seed, t, shots, trial);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let counts = sample_counts(&p, shots, &mut rng);
                let q = smoothed_empirical(&counts, shots, &p);
                rows.push(KlRow { transform: t, shots, trial, kl: kl_divergence(&p, &q)?, seed });
            }
        }
    }
    Ok(rows)
}

/// Mean KL per (transform, shots) from study rows, in grid order.
pub fn mean_curve(rows: &[KlRow], t: Transform) -> Vec<(u64, f64)> {
    let mut out: Vec<(u64, f64, usize)> = Vec::new();
    for r in rows.iter().filter(|r| r.transform == t) {
        match out.iter_mut().find(|e| e.0 == r.shots) {
            Some(e) => {
                e.1 += r.kl;
                e.2 += 1;
            }
            None => out.push((r.shots, r.kl, 1)),
        }
    }
    out.into_iter().map(|(s, k, c)| (s, k / c as f64)).collect()
}

pub fn shots_to_tolerance(study: &SamplingStudy, tol: f64) -> Result<(Vec<ShotsResult>, Vec<KlRow>)> {
    if study.trials < 10 {
        return Err(QdlcError::Domain("at least 10 trials are required".into()));
    }
    let rows = kl_study(study)?;
    let results = study
        .transforms
        .iter()
        .map(|&t| {
            let curve = mean_curve(&rows, t);
            let hit = curve.iter().find(|(_, k)| *k <= tol).map(|(s, _)| *s);
            ShotsResult { transform: t, shots: hit, last_mean_kl: curve.last().map_or(f64::NAN, |c| c.1) }
        })
        .collect();
    Ok((results, rows))
}
