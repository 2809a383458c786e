//! Randomized property suites.
//!
//! Each suite runs `trials` independent trials per dimension. Trial `t` at
//! dimension `n` draws from its own generator seeded by
//! `trial_seed(trial_seed(seed, n), t)`, so trials can run in parallel and
//! any failure can be replayed from the seed recorded in the report.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::density::{chain_supremum, dyadic_diagonal_state, dyadic_value, FixpointConfig, PartialDensityOperator};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, Matrix};
use crate::logic::{additivity_deviation, gleason_measure, state_leq, ClosedSubspace};
use crate::observable::BoundedObservable;
use crate::qlang::{interpret, parse_with};
use crate::random::{self, SeededRng};
use crate::tolerance::Tolerances;

type Pdo = PartialDensityOperator<f64>;

/// Random events sampled by the measure-order test.
pub const MEASURE_SAMPLES: usize = 200;
/// Smallest measure gap that counts as a separation.
pub const SEPARATION: f64 = 1e-9;
/// Random events per trial in the continuity check of the Gleason map.
pub const CONTINUITY_SAMPLES: usize = 50;
/// Iteration cap for loops in randomly generated programs.
pub const RANDOM_PROGRAM_MAX_ITER: usize = 200;
/// Unrollings per loop in the linearity check, where every loop runs a fixed
/// number of steps.
pub const LINEARITY_UNROLLINGS: usize = 12;
const MAX_FAILING_SEEDS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Gleason,
    Dcpo,
    Interval,
    Qlang,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Gleason, Suite::Dcpo, Suite::Interval, Suite::Qlang];

    fn invariants(self) -> &'static [Invariant] {
        match self {
            Suite::Gleason => GLEASON,
            Suite::Dcpo => DCPO,
            Suite::Interval => INTERVAL,
            Suite::Qlang => QLANG,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Gleason => "gleason",
            Suite::Dcpo => "dcpo",
            Suite::Interval => "interval",
            Suite::Qlang => "qlang",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.to_string() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}' (expected gleason, dcpo, interval or qlang)")))
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub fixpoint: FixpointConfig<f64>,
    pub tol: Tolerances<f64>,
    /// Feeds the dcpo suite a chain that decreases at one step.
    pub negative_control: bool,
}

impl VerifyConfig {
    pub fn new(suite: Suite, dims: Vec<usize>, trials: usize, seed: u64) -> Self {
        Self {
            suite,
            dims,
            trials,
            seed,
            fixpoint: FixpointConfig::default(),
            tol: Tolerances::default(),
            negative_control: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fixpoint.validate()?;
        self.tol.validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.dims.is_empty() {
            return Err(Error::Config("no dimensions given".into()));
        }
        for &n in &self.dims {
            if !(2..=16).contains(&n) {
                return Err(Error::Config(format!("dimension {n} outside 2..=16")));
            }
            if self.suite == Suite::Qlang && !n.is_power_of_two() {
                return Err(Error::Config(format!("qlang suite needs power-of-two dimensions, got {n}")));
            }
        }
        if self.negative_control && self.suite != Suite::Dcpo {
            return Err(Error::Config("the negative control exists only for the dcpo suite".into()));
        }
        Ok(())
    }
}

struct Invariant {
    name: &'static str,
    criterion: &'static str,
    /// Whether a larger recorded value is worse.
    larger_is_worse: bool,
}

const fn inv(name: &'static str, criterion: &'static str, larger_is_worse: bool) -> Invariant {
    Invariant {
        name,
        criterion,
        larger_is_worse,
    }
}

const ERRORS: &str = "no_errors";

const GLEASON: &[Invariant] = &[
    inv(ERRORS, "every trial evaluates without error", true),
    inv("order_agreement", "Löwner test agrees with sampled measure order (value: max G(f)(K) - G(g)(K))", true),
    inv("witness_separation", "Löwner failure witness separates the measures by > 1e-9", false),
    inv("additivity", "|p(join of orthogonal family) - sum| < 1e-8", true),
    inv("empty_event", "p({0}) == 0 exactly", true),
    inv("full_space", "|p(H) - tr f| <= 1e-10", true),
    inv("event_monotonicity", "K1 <= K2 implies p(K1) <= p(K2) + 1e-9", true),
    inv("measure_linearity", "|G(rf)(K) - r G(f)(K)| <= 1e-10", true),
    inv("de_morgan", "(A meet B)' == A' join B' within proj_tol", true),
    inv("complement_involution", "A'' == A within proj_tol", true),
];

const DCPO: &[Invariant] = &[
    inv(ERRORS, "every trial evaluates without error", true),
    inv("chain_monotone", "chain elements increase in the Löwner order", true),
    inv("chain_converged", "geometric chain converges within max_iterations", true),
    inv("supremum_limit", "||sup - f||_max <= 1e-8", true),
    inv("gap_halving", "|gap_{k+1} - gap_k / 2| <= 1e-12", true),
    inv("upper_bound", "every chain element is Löwner-below the supremum", true),
    inv("measure_continuity", "|G(sup)(K) - sup_k G(f_k)(K)| <= 1e-6 on 50 events", true),
    inv("dyadic_chain", "dyadic truncations converge to the exact dyadic state within 1e-12", true),
];

const INTERVAL: &[Invariant] = &[
    inv(ERRORS, "every trial evaluates without error", true),
    inv("monotonicity", "p <= q implies E(A|q) inside E(A|p) within 1e-9", true),
    inv("containment", "tr(A g) in E(A|f) within 1e-9 for total g >= f", true),
    inv("trace_one_degenerate", "tr f = 1 gives width <= 1e-10 at tr(A f)", true),
    inv("scaling_law", "E(kA|f) == k E(A|f) within 1e-9", true),
    inv("commuting_sum_containment", "E(kA + lB|f) inside k E(A|f) + l E(B|f) within 1e-9", true),
    inv("commuting_sum_total", "E(kA + lB|f) == k E(A|f) + l E(B|f) within 1e-9 when tr f = 1", true),
    inv("square_law", "square interval == expected_interval_op(A A) within 1e-9", true),
    inv("interval_chain_limit", "intersection of E(A|f_k) == E(A|f) within 1e-6", true),
    inv("e0_limit", "E0(A|f_k) -> E0(A|f) within 1e-8", true),
    inv("e0_sup_positive", "sup_k E0(A|f_k) == E0(A|f) within 1e-8 for A >= 0", true),
];

const QLANG: &[Invariant] = &[
    inv(ERRORS, "every run evaluates without error", true),
    inv("chain_monotone", "loop approximant chains increase in the Löwner order", true),
    inv("linearity", "[[P]](a r1 + b r2) == a [[P]](r1) + b [[P]](r2) within 1e-8", true),
    inv("trace_nonincreasing", "tr(out) <= tr(in) + 1e-9", true),
    inv("unitary_trace_preserved", "|tr(out) - tr(in)| <= 1e-9 for unitary-only programs", true),
    inv("branch_trace_preserved", "|tr(out) - tr(in)| <= 1e-9 for loop-free programs", true),
    inv("residual_identity", "|residual - (1 - tr out)| <= 1e-12", true),
    inv("trace_log_nondecreasing", "chain_trace_log is nondecreasing", true),
    inv("fair_coin_residual", "residual after n iterations == 2^-n within 1e-9", true),
    inv("fair_coin_converged", "converged output has trace >= 1 - trace_tol", true),
    inv("diverging_residual", "diverging loop has residual exactly 1", true),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailingTrial {
    pub dim: usize,
    pub trial: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub name: &'static str,
    pub criterion: &'static str,
    pub passed: usize,
    pub failed: usize,
    /// Worst recorded value; `null` when nothing was measured.
    pub worst: Option<f64>,
    /// At most 32 failing trials, in trial order.
    pub failing: Vec<FailingTrial>,
    /// Chain index at which the first failure was detected, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub negative_control: bool,
    pub passed: bool,
    pub invariants: Vec<InvariantReport>,
    /// Messages of the first errors, in trial order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

struct Obs {
    invariant: usize,
    value: Option<f64>,
    ok: bool,
    witness: Option<usize>,
}

struct Recorder {
    invariants: &'static [Invariant],
    obs: Vec<Obs>,
    errors: Vec<String>,
}

impl Recorder {
    fn index(&self, name: &str) -> usize {
        self.invariants
            .iter()
            .position(|i| i.name == name)
            .unwrap_or_else(|| panic!("unknown invariant {name}"))
    }

    fn record(&mut self, name: &str, value: Option<f64>, ok: bool, witness: Option<usize>) {
        let invariant = self.index(name);
        self.obs.push(Obs {
            invariant,
            value,
            ok,
            witness,
        });
    }

    /// Records `value` and passes iff `value <= bound`.
    fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.record(name, Some(value), value <= bound, None);
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.record(name, Some(if ok { 0.0 } else { 1.0 }), ok, None);
    }

    fn error(&mut self, e: Error) {
        let has_chain = self.invariants.iter().any(|i| i.name == "chain_monotone");
        match e {
            Error::NotIncreasing { index, .. } if has_chain => {
                self.record("chain_monotone", Some(1.0), false, Some(index));
            }
            other => {
                self.record(ERRORS, None, false, None);
                self.errors.push(other.to_string());
            }
        }
    }
}

/// Runs one suite and aggregates the results in trial order.
pub fn run_suite(cfg: &VerifyConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let invariants = cfg.suite.invariants();
    let jobs: Vec<(usize, usize)> = cfg
        .dims
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let results: Vec<(FailingTrial, Recorder)> = jobs
        .par_iter()
        .map(|&(n, t)| {
            let seed = random::trial_seed(random::trial_seed(cfg.seed, n as u64), t as u64);
            let mut rng = random::rng(seed);
            let mut rec = Recorder {
                invariants,
                obs: Vec::new(),
                errors: Vec::new(),
            };
            let outcome = match cfg.suite {
                Suite::Gleason => gleason_trial(n, &mut rng, cfg, &mut rec),
                Suite::Dcpo => dcpo_trial(n, &mut rng, cfg, &mut rec),
                Suite::Interval => interval_trial(n, &mut rng, cfg, &mut rec),
                Suite::Qlang => qlang_trial(n, t, &mut rng, cfg, &mut rec),
            };
            if let Err(e) = outcome {
                rec.error(e);
            }
            let trial = FailingTrial { dim: n, trial: t, seed };
            (trial, rec)
        })
        .collect();

    let mut reports: Vec<InvariantReport> = invariants
        .iter()
        .map(|i| InvariantReport {
            name: i.name,
            criterion: i.criterion,
            passed: 0,
            failed: 0,
            worst: None,
            failing: Vec::new(),
            witness_index: None,
        })
        .collect();
    let mut errors = Vec::new();
    for (trial, rec) in results {
        for o in rec.obs {
            let spec = &invariants[o.invariant];
            let r = &mut reports[o.invariant];
            if o.ok {
                r.passed += 1;
            } else {
                r.failed += 1;
                if r.failing.len() < MAX_FAILING_SEEDS && r.failing.last() != Some(&trial) {
                    r.failing.push(trial.clone());
                }
                if r.witness_index.is_none() {
                    r.witness_index = o.witness;
                }
            }
            if let Some(v) = o.value {
                let worse = |a: f64, b: f64| if spec.larger_is_worse { a.max(b) } else { a.min(b) };
                r.worst = Some(r.worst.map_or(v, |w| worse(w, v)));
            }
        }
        errors.extend(rec.errors.into_iter().take(MAX_FAILING_SEEDS - errors.len().min(MAX_FAILING_SEEDS)));
    }
    Ok(VerifyReport {
        suite: cfg.suite,
        seed: cfg.seed,
        dims: cfg.dims.clone(),
        trials: cfg.trials,
        negative_control: cfg.negative_control,
        passed: reports.iter().all(|r| r.failed == 0),
        invariants: reports,
        errors,
    })
}

/// How a pair from [`random_pair`] was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    /// `g = f + positive remainder`, so `f <= g`.
    Comparable,
    /// Independent operators of equal trace; incomparable unless equal.
    EqualTrace,
    /// `g = f - a x x† + a y y†` with `x` the top eigenvector of `f`.
    Swap,
}

/// Random pair of partial density operators; one third of the pairs are
/// Löwner-comparable. Incomparable pairs differ by a traceless operator
/// whose negative part is not small, so the sampled measure order can see
/// the violation.
pub fn random_pair(rng: &mut SeededRng, n: usize, tol: &Tolerances<f64>) -> Result<(Pdo, Pdo, PairKind)> {
    match rng.random_range(0..3) {
        0 => {
            let f = random::partial_density::<f64>(rng, n);
            let room = (1.0 - f.trace()).max(0.0) * rng.random::<f64>();
            let g = f.matrix().try_add(&random::psd_with_trace(rng, n, room))?;
            Ok((f.clone(), Pdo::repaired(g, tol)?, PairKind::Comparable))
        }
        1 => {
            let t = rng.random_range(0.05..1.0);
            let f = random::partial_density_with_trace::<f64>(rng, n, t);
            let g = random::partial_density_with_trace::<f64>(rng, n, t);
            Ok((f, g, PairKind::EqualTrace))
        }
        _ => {
            let t = rng.random_range(0.05..1.0);
            let f = random::partial_density_with_trace::<f64>(rng, n, t);
            let eig = hermitian_eig(f.matrix(), tol)?;
            let a = eig.max_eigenvalue() * rng.random_range(0.2..1.0);
            let x = eig.eigenvector(n - 1);
            let y = random::unit_vector::<f64>(rng, n);
            let g = f
                .matrix()
                .try_sub(&Matrix::projector(&x).scale(a))?
                .try_add(&Matrix::projector(&y).scale(a))?;
            Ok((f, Pdo::repaired(g, tol)?, PairKind::Swap))
        }
    }
}

fn gleason_trial(n: usize, rng: &mut SeededRng, cfg: &VerifyConfig, rec: &mut Recorder) -> Result<()> {
    let tol = &cfg.tol;

    let (f, g, _) = random_pair(rng, n, tol)?;
    let order = state_leq(&f, &g, tol)?;
    let mut sampled = f64::NEG_INFINITY;
    for _ in 0..MEASURE_SAMPLES {
        let k = random::any_subspace::<f64>(rng, n);
        sampled = sampled.max(gleason_measure(&f, &k, tol)? - gleason_measure(&g, &k, tol)?);
    }
    rec.record("order_agreement", Some(sampled), order.leq == (sampled <= SEPARATION), None);
    if let Some(w) = &order.witness {
        let sep = gleason_measure(&f, w, tol)? - gleason_measure(&g, w, tol)?;
        rec.record("witness_separation", Some(sep), sep > SEPARATION, None);
    } else if !order.leq {
        rec.record("witness_separation", None, false, None);
    }

    let f = random::partial_density::<f64>(rng, n);
    rec.at_most("additivity", additivity_deviation(&f, rng, tol)?, 1e-8);
    let empty = gleason_measure(&f, &ClosedSubspace::zero(n), tol)?;
    rec.record("empty_event", Some(empty.abs()), empty == 0.0, None);
    let full = gleason_measure(&f, &ClosedSubspace::full(n), tol)?;
    rec.at_most("full_space", (full - f.trace()).abs(), 1e-10);

    let k1 = random::any_subspace::<f64>(rng, n);
    let k2 = k1.join(&random::any_subspace(rng, n), tol)?;
    let rise = gleason_measure(&f, &k1, tol)? - gleason_measure(&f, &k2, tol)?;
    rec.at_most("event_monotonicity", rise, 1e-9);

    let r = rng.random::<f64>();
    let k = random::any_subspace::<f64>(rng, n);
    let scaled = gleason_measure(&f.scale(r)?, &k, tol)?;
    rec.at_most("measure_linearity", (scaled - r * gleason_measure(&f, &k, tol)?).abs(), 1e-10);

    let a = random::any_subspace::<f64>(rng, n);
    let b = random::any_subspace::<f64>(rng, n);
    let lhs = a.meet(&b, tol)?.orthocomplement();
    let rhs = a.orthocomplement().join(&b.orthocomplement(), tol)?;
    rec.at_most("de_morgan", lhs.distance(&rhs)?, tol.proj);
    rec.at_most("complement_involution", a.orthocomplement().orthocomplement().distance(&a)?, tol.proj);
    Ok(())
}

/// `(1 - 2^-k) f`.
fn geometric_element(f: &Pdo, k: usize) -> Result<Pdo> {
    f.scale(1.0 - 0.5f64.powi(k as i32))
}

fn dcpo_trial(n: usize, rng: &mut SeededRng, cfg: &VerifyConfig, rec: &mut Recorder) -> Result<()> {
    let tol = &cfg.tol;
    let f = random::partial_density::<f64>(rng, n);
    let chain = (0..).map(|k| geometric_element(&f, k));
    let limit = crate::density::try_chain_supremum(chain, &cfg.fixpoint, tol);
    let limit = {
        let limit = limit?;
        rec.flag("chain_monotone", true);
        limit
    };
    rec.flag("chain_converged", limit.converged);
    rec.at_most("supremum_limit", limit.value.matrix().distance(f.matrix())?, 1e-8);
    let gaps: Vec<f64> = limit.trace_log.windows(2).map(|w| w[1] - w[0]).collect();
    let halving = gaps
        .windows(2)
        .map(|w| (w[1] - w[0] / 2.0).abs())
        .fold(0.0, f64::max);
    rec.at_most("gap_halving", halving, 1e-12);

    let elements = (0..=limit.iterations)
        .map(|k| geometric_element(&f, k))
        .collect::<Result<Vec<_>>>()?;
    let mut below = true;
    for e in &elements {
        below &= e.loewner_leq(&limit.value, tol)?.leq;
    }
    rec.flag("upper_bound", below);
    let mut worst = 0.0f64;
    for _ in 0..CONTINUITY_SAMPLES {
        let k = random::any_subspace::<f64>(rng, n);
        let mut sup = f64::NEG_INFINITY;
        for e in &elements {
            sup = sup.max(gleason_measure(e, &k, tol)?);
        }
        worst = worst.max((gleason_measure(&limit.value, &k, tol)? - sup).abs());
    }
    rec.at_most("measure_continuity", worst, 1e-6);

    let bits: Vec<u8> = (0..n).map(|_| rng.random_range(0..=1u8)).collect();
    let exact = dyadic_diagonal_state::<f64>(&bits, n)?;
    // truncate after each 1 digit; a 0 digit adds a flat step that would end
    // the trace-gap iteration early
    let cuts = std::iter::once(0).chain((0..n).filter(|&i| bits[i] == 1).map(|i| i + 1));
    let truncations = cuts
        .map(|k| dyadic_diagonal_state::<f64>(&bits[..k], n))
        .collect::<Result<Vec<_>>>()?;
    let lim = chain_supremum(truncations, &cfg.fixpoint, tol)?;
    let value = dyadic_value(&bits);
    let value = *value.numer() as f64 / *value.denom() as f64;
    let deviation = lim
        .value
        .matrix()
        .distance(exact.matrix())?
        .max((lim.value.trace() - value).abs());
    rec.at_most("dyadic_chain", deviation, 1e-12);

    if cfg.negative_control {
        let t = rng.random_range(0.5..1.0);
        let f = random::partial_density_with_trace::<f64>(rng, n, t);
        let bad = rng.random_range(2..6usize);
        let corrupted = (0..).map(|k| {
            if k == bad {
                geometric_element(&f, k - 1)?.scale(0.5)
            } else {
                geometric_element(&f, k)
            }
        });
        match crate::density::try_chain_supremum(corrupted, &cfg.fixpoint, tol) {
            Ok(_) => rec.flag("chain_monotone", true),
            Err(Error::NotIncreasing { index, .. }) => rec.record("chain_monotone", Some(1.0), false, Some(index)),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn interval_trial(n: usize, rng: &mut SeededRng, cfg: &VerifyConfig, rec: &mut Recorder) -> Result<()> {
    let tol = &cfg.tol;
    let a = random::random_hermitian::<f64>(rng, n);
    let obs = BoundedObservable::from_hermitian(a.clone(), tol)?;

    let p = random::partial_density::<f64>(rng, n);
    let room = (1.0 - p.trace()).max(0.0) * rng.random::<f64>();
    let q = Pdo::repaired(p.matrix().try_add(&random::psd_with_trace(rng, n, room))?, tol)?;
    let (ep, eq) = (obs.expected_interval(&p, tol)?, obs.expected_interval(&q, tol)?);
    let escape = (ep.lo() - eq.lo()).max(eq.hi() - ep.hi()).max(0.0);
    rec.at_most("monotonicity", escape, 1e-9);

    let f = random::partial_density::<f64>(rng, n);
    let g = Pdo::repaired(
        f.matrix()
            .try_add(&random::psd_with_trace(rng, n, (1.0 - f.trace()).max(0.0)))?,
        tol,
    )?;
    let ef = obs.expected_interval(&f, tol)?;
    let total = a.trace_product(g.matrix())?.re;
    let outside = (ef.lo() - total).max(total - ef.hi()).max(0.0);
    rec.at_most("containment", outside, 1e-9);

    let f1 = random::partial_density_with_trace::<f64>(rng, n, 1.0);
    let e1 = obs.expected_interval(&f1, tol)?;
    let direct = a.trace_product(f1.matrix())?.re;
    rec.at_most(
        "trace_one_degenerate",
        e1.width().max((e1.lo() - direct).abs()),
        1e-10,
    );

    let k = rng.random_range(-3.0..3.0);
    let scaled = BoundedObservable::from_hermitian(a.scale(k), tol)?.expected_interval(&f, tol)?;
    rec.at_most("scaling_law", scaled.distance(&ef.scale(k)), 1e-9);

    // commuting pair in a shared eigenbasis
    let u = random::random_unitary::<f64>(rng, n);
    let diag = |rng: &mut SeededRng| -> Vec<f64> { (0..n).map(|_| rng.random_range(-2.0..2.0)).collect() };
    let ca = u.conjugate(&Matrix::from_diag(&diag(rng)))?.hermitian_part();
    let cb = u.conjugate(&Matrix::from_diag(&diag(rng)))?.hermitian_part();
    let (k, l) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    let combo = ca.scale(k).try_add(&cb.scale(l))?;
    let oa = BoundedObservable::from_hermitian(ca, tol)?;
    let ob = BoundedObservable::from_hermitian(cb, tol)?;
    let oc = BoundedObservable::from_hermitian(combo, tol)?;
    let lin = |x: &Pdo| -> Result<_> {
        let lhs = oc.expected_interval(x, tol)?;
        let rhs = oa.expected_interval(x, tol)?.scale(k).add(&ob.expected_interval(x, tol)?.scale(l));
        Ok((lhs, rhs))
    };
    let (lhs, rhs) = lin(&f)?;
    let escape = (rhs.lo() - lhs.lo()).max(lhs.hi() - rhs.hi()).max(0.0);
    rec.at_most("commuting_sum_containment", escape, 1e-9);
    let (lhs, rhs) = lin(&f1)?;
    rec.at_most("commuting_sum_total", lhs.distance(&rhs), 1e-9);

    let square = obs.square_interval(&f, tol)?;
    let via_op = crate::observable::expected_interval_op(&a.mat_mul(&a)?.hermitian_part(), &f, tol)?;
    rec.at_most("square_law", square.distance(&via_op), 1e-9);

    // geometric chain f_k = (1 - 2^-k) f
    let limit = crate::density::try_chain_supremum((0..).map(|k| geometric_element(&f, k)), &cfg.fixpoint, tol)?;
    let intervals = (0..=limit.iterations.max(60))
        .map(|k| obs.expected_interval(&geometric_element(&f, k)?, tol))
        .collect::<Result<Vec<_>>>()?;
    let meet = crate::interval::directed_intersection(intervals, 1e-12)?;
    rec.at_most("interval_chain_limit", meet.distance(&ef), 1e-6);
    let e0_f = obs.e0(&f, tol)?;
    rec.at_most("e0_limit", (obs.e0(&limit.value, tol)? - e0_f).abs(), 1e-8);

    let (m, _) = obs.spectrum_bounds();
    let shifted = a.try_sub(&Matrix::identity(n).scale(m))?;
    let positive = BoundedObservable::from_hermitian(shifted, tol)?;
    let mut sup = f64::NEG_INFINITY;
    for k in 0..=limit.iterations {
        sup = sup.max(positive.e0(&geometric_element(&f, k)?, tol)?);
    }
    rec.at_most("e0_sup_positive", (sup - positive.e0(&f, tol)?).abs(), 1e-8);
    Ok(())
}

/// Source text of a random program over `qubits` qubits with nesting depth
/// at most `max_depth`. Loop bodies use only X, Y, Z, H and CNOT so that
/// loop states revisit themselves instead of drifting forever.
pub fn random_program(rng: &mut SeededRng, qubits: usize, max_depth: usize, loops: bool, branches: bool) -> String {
    let mut out = String::new();
    for q in 0..qubits {
        out.push_str(&format!("qubit q{q};\n"));
    }
    let gen = Gen { qubits, loops, branches };
    gen.block(rng, max_depth, false, 1, &mut out);
    out
}

struct Gen {
    qubits: usize,
    loops: bool,
    branches: bool,
}

impl Gen {
    fn block(&self, rng: &mut SeededRng, depth: usize, in_loop: bool, indent: usize, out: &mut String) {
        for _ in 0..rng.random_range(1..=3) {
            self.statement(rng, depth, in_loop, indent, out);
        }
    }

    fn guard(&self, rng: &mut SeededRng) -> String {
        let q = rng.random_range(0..self.qubits);
        let ket = ["|0>", "|1>", "|+>", "|->"][rng.random_range(0..4)];
        format!("q{q} in {ket}")
    }

    fn statement(&self, rng: &mut SeededRng, depth: usize, in_loop: bool, indent: usize, out: &mut String) {
        let pad = "    ".repeat(indent.saturating_sub(1));
        let roll = rng.random::<f64>();
        if depth > 0 && self.loops && roll < 0.3 {
            out.push_str(&format!("{pad}while {} {{\n", self.guard(rng)));
            self.block(rng, depth - 1, true, indent + 1, out);
            out.push_str(&format!("{pad}}}\n"));
        } else if depth > 0 && self.branches && roll < 0.6 {
            out.push_str(&format!("{pad}if {} {{\n", self.guard(rng)));
            self.block(rng, depth - 1, in_loop, indent + 1, out);
            if rng.random_bool(0.7) {
                out.push_str(&format!("{pad}}} else {{\n"));
                self.block(rng, depth - 1, in_loop, indent + 1, out);
            }
            out.push_str(&format!("{pad}}}\n"));
        } else {
            out.push_str(&pad);
            out.push_str(&self.gate(rng, in_loop));
            out.push('\n');
        }
    }

    fn gate(&self, rng: &mut SeededRng, in_loop: bool) -> String {
        let q = rng.random_range(0..self.qubits);
        if self.qubits > 1 && rng.random_bool(0.25) {
            let mut r = rng.random_range(0..self.qubits - 1);
            if r >= q {
                r += 1;
            }
            return format!("cnot q{q} q{r};");
        }
        if !in_loop && rng.random_bool(0.1) {
            let u = random::random_unitary::<f64>(rng, 2);
            let entry = |r: usize, c: usize| format!("({:e} + {:e}i)", u[(r, c)].re, u[(r, c)].im);
            return format!(
                "unitary [[{}, {}], [{}, {}]] q{q};",
                entry(0, 0),
                entry(0, 1),
                entry(1, 0),
                entry(1, 1)
            );
        }
        let names: &[&str] = if in_loop { &["x", "y", "z", "h"] } else { &["x", "y", "z", "h", "s", "t"] };
        format!("{} q{q};", names[rng.random_range(0..names.len())])
    }
}

fn qlang_trial(n: usize, index: usize, rng: &mut SeededRng, cfg: &VerifyConfig, rec: &mut Recorder) -> Result<()> {
    let tol = &cfg.tol;
    let qubits = n.trailing_zeros() as usize;
    let capped = FixpointConfig {
        max_iterations: cfg.fixpoint.max_iterations.min(RANDOM_PROGRAM_MAX_ITER),
        ..cfg.fixpoint
    };

    // general programs
    let depth = rng.random_range(0..=3);
    let src = random_program(rng, qubits, depth, true, true);
    let prog = parse_with::<f64>(&src, tol)?;
    let input = random::partial_density::<f64>(rng, n);
    let report = interpret(&prog, &input, &capped, tol)?;
    rec.flag("chain_monotone", true);
    rec.at_most("trace_nonincreasing", report.output.trace() - input.trace(), 1e-9);
    rec.at_most(
        "residual_identity",
        (report.residual - (1.0 - report.output.trace())).abs(),
        1e-12,
    );
    let drop = report
        .chain_trace_log
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(0.0, f64::max);
    rec.at_most("trace_log_nondecreasing", drop, 0.0);

    // linearity with a fixed number of unrollings per loop
    let fixed = FixpointConfig {
        max_iterations: LINEARITY_UNROLLINGS,
        trace_tol: f64::MIN_POSITIVE,
        monotonicity_check: cfg.fixpoint.monotonicity_check,
    };
    let r1 = random::partial_density::<f64>(rng, n);
    let r2 = random::partial_density::<f64>(rng, n);
    let alpha = rng.random::<f64>();
    let beta = (1.0 - alpha) * rng.random::<f64>();
    let mix = Pdo::repaired(r1.matrix().scale(alpha).try_add(&r2.matrix().scale(beta))?, tol)?;
    let out = |rho: &Pdo| -> Result<Matrix<f64>> { Ok(interpret(&prog, rho, &fixed, tol)?.output.into_matrix()) };
    let combined = out(&r1)?.scale(alpha).try_add(&out(&r2)?.scale(beta))?;
    rec.at_most("linearity", out(&mix)?.distance(&combined)?, 1e-8);

    // unitary-only and loop-free programs preserve trace
    let prog = parse_with::<f64>(&random_program(rng, qubits, 0, false, false), tol)?;
    let out = interpret(&prog, &input, &capped, tol)?;
    rec.at_most("unitary_trace_preserved", (out.output.trace() - input.trace()).abs(), 1e-9);
    let prog = parse_with::<f64>(&random_program(rng, qubits, 3, false, true), tol)?;
    let out = interpret(&prog, &input, &capped, tol)?;
    rec.at_most("branch_trace_preserved", (out.output.trace() - input.trace()).abs(), 1e-9);

    // fair coin on the first qubit, the others idle
    let decls: String = (0..qubits).map(|q| format!("qubit q{q}; ")).collect();
    let coin = parse_with::<f64>(&format!("{decls}h q0; while q0 in |1> {{ h q0; }}"), tol)?;
    let ground = Pdo::basis_state(n, 0);
    let steps = 1 + index % 30;
    let truncated = FixpointConfig {
        max_iterations: steps,
        trace_tol: f64::MIN_POSITIVE,
        ..cfg.fixpoint
    };
    let out = interpret(&coin, &ground, &truncated, tol)?;
    rec.at_most("fair_coin_residual", (out.residual - 0.5f64.powi(steps as i32)).abs(), 1e-9);
    let out = interpret(&coin, &ground, &cfg.fixpoint, tol)?;
    rec.flag(
        "fair_coin_converged",
        out.converged && out.output.trace() >= 1.0 - cfg.fixpoint.trace_tol,
    );

    let diverge = parse_with::<f64>(&format!("{decls}while q0 in |0> {{ skip; }}"), tol)?;
    let out = interpret(&diverge, &ground, &cfg.fixpoint, tol)?;
    rec.record("diverging_residual", Some((out.residual - 1.0).abs()), out.residual == 1.0, None);
    Ok(())
}
