//! Time partitions `0 = t_0 < … < t_N = T` and their derived step parameters.
//!
//! Indices follow the usual 1-based step convention: `tau(n) = t_n − t_{n−1}`
//! for `n = 1..=N`, half steps `tau_half(n)` for `n = 1..=N−1`, step ratios
//! `ratio(n)` for `n = 2..=N` and ratio variations `gamma(n)` for `n = 3..=N`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a grid is generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridKind {
    Uniform,
    /// `tau_{n+1} = ratio * tau_n`.
    Geometric { ratio: f64 },
    /// Smooth random step density with `tau_max <= d * tau_min`.
    Random { seed: u64, d: f64 },
}

/// An immutable time grid together with every derived parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    steps: Vec<f64>,
    half_steps: Vec<f64>,
    half_nodes: Vec<f64>,
    ratios: Vec<f64>,
    gammas: Vec<f64>,
    tau_max: f64,
    tau_min: f64,
    r_max: f64,
    r_min: f64,
    c_gamma: f64,
    sigma: f64,
}

impl TimeGrid {
    /// Builds a grid of `n` steps on `[0, horizon]`.
    pub fn build(kind: &GridKind, n: usize, horizon: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 steps, got {n}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidGrid(format!("horizon must be positive, got {horizon}")));
        }
        let weights: Vec<f64> = match kind {
            GridKind::Uniform => vec![1.0; n],
            GridKind::Geometric { ratio } => {
                if !(*ratio > 0.0 && ratio.is_finite()) {
                    return Err(Error::InvalidGrid(format!("geometric ratio must be positive, got {ratio}")));
                }
                (0..n).map(|k| ratio.powi(k as i32)).collect()
            }
            GridKind::Random { seed, d } => random_weights(*seed, *d, n)?,
        };
        let total: f64 = weights.iter().sum();
        let steps: Vec<f64> = match kind {
            GridKind::Uniform => vec![horizon / n as f64; n],
            _ => weights.iter().map(|w| horizon * w / total).collect(),
        };
        Self::from_steps(&steps)
    }

    /// Builds a grid from explicit step lengths; the horizon is their sum.
    pub fn from_steps(steps: &[f64]) -> Result<Self> {
        let n = steps.len();
        if n < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 steps, got {n}")));
        }
        if let Some(bad) = steps.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidGrid(format!("nonpositive step {bad}")));
        }
        let mut nodes = Vec::with_capacity(n + 1);
        nodes.push(0.0);
        let mut acc = 0.0;
        for s in steps {
            acc += s;
            nodes.push(acc);
        }
        let steps = steps.to_vec();
        // tau_{n+1/2}, n = 1..N-1
        let half_steps: Vec<f64> = steps.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        // t_{n+1/2}, n = 0..N-1 (n = 0 extends the definition)
        let half_nodes: Vec<f64> = (0..n).map(|k| nodes[k] + 0.5 * steps[k]).collect();
        // r_n, n = 2..N
        let ratios: Vec<f64> = steps.windows(2).map(|w| w[1] / w[0]).collect();
        // gamma_n, n = 3..N
        let gammas: Vec<f64> = ratios
            .windows(2)
            .map(|r| (1.0 / r[1] - 1.0 / r[0]).max(0.0))
            .collect();
        let tau_max = steps.iter().copied().fold(f64::MIN, f64::max);
        let tau_min = steps.iter().copied().fold(f64::MAX, f64::min);
        let r_max = ratios.iter().copied().fold(f64::MIN, f64::max);
        let r_min = ratios.iter().copied().fold(f64::MAX, f64::min);
        let c_gamma = gammas
            .iter()
            .zip(&steps[2..])
            .map(|(g, t)| g / t)
            .fold(0.0, f64::max);
        let sigma = 0.5
            * steps
                .windows(2)
                .map(|w| (w[1] - w[0]).powi(2) / (w[1] + w[0]))
                .sum::<f64>();
        Ok(Self {
            nodes,
            steps,
            half_steps,
            half_nodes,
            ratios,
            gammas,
            tau_max,
            tau_min,
            r_max,
            r_min,
            c_gamma,
            sigma,
        })
    }

    /// Number of steps `N`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.nodes[self.len()]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    /// `t_n`, `n = 0..=N`.
    pub fn t(&self, n: usize) -> f64 {
        self.nodes[n]
    }

    /// `tau_n`, `n = 1..=N`.
    pub fn tau(&self, n: usize) -> f64 {
        self.steps[n - 1]
    }

    /// `tau_{n+1/2}`, `n = 1..=N-1`.
    pub fn tau_half(&self, n: usize) -> f64 {
        self.half_steps[n - 1]
    }

    /// `t_{n+1/2}`, `n = 0..=N-1`.
    pub fn t_half(&self, n: usize) -> f64 {
        self.half_nodes[n]
    }

    /// `r_n = tau_n / tau_{n-1}`, `n = 2..=N`.
    pub fn ratio(&self, n: usize) -> f64 {
        self.ratios[n - 2]
    }

    /// `gamma_n = max(0, 1/r_n - 1/r_{n-1})`, `n = 3..=N`.
    pub fn gamma(&self, n: usize) -> f64 {
        self.gammas[n - 3]
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn tau_min(&self) -> f64 {
        self.tau_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn c_gamma(&self) -> f64 {
        self.c_gamma
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Breakpoints of the half-grid interpolants:
    /// `0, t_{1/2}, t_{3/2}, …, t_{N-1/2}, T`.
    pub fn half_grid_breakpoints(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(self.len() + 1);
        b.push(0.0);
        b.extend_from_slice(&self.half_nodes);
        b.push(self.horizon());
        b
    }

    /// Two-column CSV `(index, t_n)`.
    pub fn to_nodes_csv(&self) -> String {
        let mut s = String::from("n,t_n\n");
        for (i, t) in self.nodes.iter().enumerate() {
            s.push_str(&format!("{i},{t}\n"));
        }
        s
    }

    /// Full parameter table: per-node rows followed by a `parameter,value` block.
    pub fn to_parameter_csv(&self) -> String {
        let n = self.len();
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut s = String::from("n,t_n,tau_n,tau_half,t_half,r_n,gamma_n\n");
        for i in 0..=n {
            s.push_str(&format!(
                "{i},{},{},{},{},{},{}\n",
                self.nodes[i],
                opt((i >= 1).then(|| self.tau(i))),
                opt((1..n).contains(&i).then(|| self.tau_half(i))),
                opt((i < n).then(|| self.t_half(i))),
                opt((i >= 2).then(|| self.ratio(i))),
                opt((i >= 3).then(|| self.gamma(i))),
            ));
        }
        s.push_str("\nparameter,value\n");
        for (k, v) in [
            ("T", self.horizon()),
            ("tau_max", self.tau_max),
            ("tau_min", self.tau_min),
            ("r_max", self.r_max),
            ("r_min", self.r_min),
            ("c_gamma", self.c_gamma),
            ("sigma", self.sigma),
        ] {
            s.push_str(&format!("{k},{v}\n"));
        }
        s
    }
}

/// Step weights drawn from a seeded low-frequency random density with values
/// in `[1, d)`, so neighbouring steps differ by `O(1/N)` and `sigma → 0`
/// along refinement with a fixed seed.
fn random_weights(seed: u64, d: f64, n: usize) -> Result<Vec<f64>> {
    if !(d >= 1.0 && d.is_finite()) {
        return Err(Error::InvalidGrid(format!("ratio bound D must be >= 1, got {d}")));
    }
    const MODES: usize = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(f64, f64)> = (0..MODES)
        .map(|k| {
            let amp = rng.gen_range(-1.0..1.0) / (k + 1) as f64;
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            (amp, phase)
        })
        .collect();
    let norm: f64 = modes.iter().map(|m| m.0.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    // keep a margin below d so rounding in the normalisation cannot exceed it
    let span = (d - 1.0) * (1.0 - 1e-6);
    Ok((0..n)
        .map(|i| {
            let s = (i as f64 + 0.5) / n as f64;
            let wave: f64 = modes
                .iter()
                .enumerate()
                .map(|(k, (a, ph))| a * (std::f64::consts::TAU * (k + 1) as f64 * s + ph).sin())
                .sum::<f64>()
                / norm;
            1.0 + span * 0.5 * (1.0 + wave.clamp(-1.0, 1.0))
        })
        .collect())
}

/// Outcome of checking the a priori step constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct StepConstraintReport {
    /// `2 (mu_A - c_M |gamma|^p) / (beta_B |i_WV|)`.
    pub coercivity_bound: f64,
    /// `1 / (2 beta)`, infinite when `beta = 0`.
    pub growth_bound: f64,
    pub bound: f64,
    pub tau_max: f64,
    pub admissible: bool,
    /// `bound - tau_max`.
    pub slack: f64,
    /// Coarser existence condition `tau_max < 1/beta`.
    pub existence_ok: bool,
}

/// Checks `tau_max < min{2(mu_A - c_M |gamma|^p)/(beta_B |i_WV|), 1/(2 beta)}`.
pub fn check_step_constraint(
    grid: &TimeGrid,
    ledger: &crate::operators::ConstantsLedger,
) -> Result<StepConstraintReport> {
    let h0 = ledger.mu_a - ledger.c_m * ledger.gamma_norm.powf(ledger.p);
    if h0 <= 0.0 {
        return Err(Error::HypothesisViolated(format!(
            "mu_A = {} <= c_M |gamma|^p = {}",
            ledger.mu_a,
            ledger.c_m * ledger.gamma_norm.powf(ledger.p)
        )));
    }
    let coercivity_bound = 2.0 * h0 / (ledger.beta_b * ledger.embedding_wv);
    let growth_bound = if ledger.beta > 0.0 {
        1.0 / (2.0 * ledger.beta)
    } else {
        f64::INFINITY
    };
    let bound = coercivity_bound.min(growth_bound);
    let tau_max = grid.tau_max();
    Ok(StepConstraintReport {
        coercivity_bound,
        growth_bound,
        bound,
        tau_max,
        admissible: tau_max < bound,
        slack: bound - tau_max,
        existence_ok: ledger.beta <= 0.0 || tau_max < 1.0 / ledger.beta,
    })
}
