//! Differential harness: runs the reference simulator and the compiled
//! terms side by side and compares the decoded amplitudes exactly.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::canon::CanonicalSuperposition;
use crate::compile::{
    decode_superposition, encode_superposition, CompileError, CompiledAutomaton, DecodeMode,
    ScaleLedger, ScalingMode,
};
use crate::pqca::{self, Configuration, PqcaSpec, RationalMatrix, Sublattices, SuperposedState};
use crate::reduce::reduce_sum;
use crate::term::Term;

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("fuel exhausted after {steps} parallel steps")]
    FuelExhausted { steps: u64 },
    #[error(transparent)]
    Compile(#[from] CompileError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub scaling: ScalingMode,
    pub decode: DecodeMode,
    /// Budget of parallel steps over the whole run.
    pub fuel: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            scaling: ScalingMode::Product,
            decode: DecodeMode::Ledger,
            fuel: DEFAULT_FUEL,
        }
    }
}

/// The compiled side after each step: compressed superpositions and the
/// parallel steps each application of the step term took.
#[derive(Clone, Debug)]
pub struct CompiledRun {
    pub states: Vec<CanonicalSuperposition>,
    pub steps: Vec<u64>,
    pub work: Vec<u64>,
    pub elapsed: Vec<Duration>,
    pub ledger: ScaleLedger,
}

impl CompiledRun {
    /// Parallel steps of the first `k` applications.
    pub fn steps_through(&self, k: usize) -> u64 {
        self.steps[..k].iter().sum()
    }

    pub fn work_through(&self, k: usize) -> u64 {
        self.work[..k].iter().sum()
    }

    pub fn elapsed_through(&self, k: usize) -> Duration {
        self.elapsed[..k].iter().sum()
    }

    pub fn ledger_at(&self, k: usize) -> ScaleLedger {
        self.ledger.after_steps(k as u64)
    }
}

/// Applies the step term `k` times to the encoded initial state. Each
/// application reduces `[STEP M1 : n1, ...]` to normal form.
pub fn run_compiled(
    compiled: &CompiledAutomaton,
    initial: &SuperposedState,
    k: usize,
    fuel: u64,
) -> Result<CompiledRun, HarnessError> {
    let (start, d) = encode_superposition(initial);
    let mut run = CompiledRun {
        states: vec![start],
        steps: Vec::with_capacity(k),
        work: Vec::with_capacity(k),
        elapsed: Vec::with_capacity(k),
        ledger: ScaleLedger {
            d,
            ..compiled.ledger.clone()
        },
    };
    let mut remaining = fuel;
    for _ in 0..k {
        let clock = Instant::now();
        let current = run.states.last().expect("initial state present");
        let applied = current
            .entries()
            .map(|(t, n)| (Term::app(compiled.step_term.clone(), t.clone()), n.clone()));
        let (next, trace) = reduce_sum(applied, remaining);
        if trace.fuel_exhausted {
            return Err(HarnessError::FuelExhausted {
                steps: fuel - remaining + trace.steps,
            });
        }
        remaining -= trace.steps;
        run.steps.push(trace.steps);
        run.work.push(trace.work);
        run.elapsed.push(clock.elapsed());
        run.states.push(next);
    }
    Ok(run)
}

/// Both sides at every step `0..=k`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub reference: Vec<SuperposedState>,
    pub decoded: Vec<SuperposedState>,
    pub compiled: CompiledRun,
}

impl Trajectory {
    pub fn agrees(&self) -> bool {
        self.reference == self.decoded
    }
}

pub fn trajectory(
    spec: &PqcaSpec,
    initial: &SuperposedState,
    k: usize,
    options: RunOptions,
) -> Result<Trajectory, HarnessError> {
    let compiled = CompiledAutomaton::new(spec, options.scaling);
    let mut reference = vec![initial.clone()];
    for _ in 0..k {
        let next = pqca::step(reference.last().expect("nonempty"), spec);
        reference.push(next);
    }
    let run = run_compiled(&compiled, initial, k, options.fuel)?;
    let decoded = run
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| decode_superposition(s, &run.ledger_at(i), options.decode))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Trajectory {
        reference,
        decoded,
        compiled: run,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigDiff {
    pub config: Configuration,
    pub reference: BigRational,
    pub compiled: BigRational,
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub spec_id: String,
    pub k: usize,
    pub left: SuperposedState,
    pub right: SuperposedState,
    pub equal: bool,
    pub diffs: Vec<ConfigDiff>,
    pub parallel_steps: u64,
    pub work: u64,
    pub ledger: ScaleLedger,
    pub wall_time: Duration,
}

pub fn diff_states(left: &SuperposedState, right: &SuperposedState) -> Vec<ConfigDiff> {
    let mut configs: Vec<&Configuration> = left.iter().map(|(c, _)| c).collect();
    configs.extend(right.iter().map(|(c, _)| c));
    configs.sort();
    configs.dedup();
    configs
        .into_iter()
        .filter_map(|c| {
            let (a, b) = (left.amplitude(c), right.amplitude(c));
            (a != b).then(|| ConfigDiff {
                config: c.clone(),
                reference: a,
                compiled: b,
            })
        })
        .collect()
}

pub fn report_from(spec_id: &str, k: usize, t: &Trajectory, wall_time: Duration) -> ComparisonReport {
    let left = t.reference[k].clone();
    let right = t.decoded[k].clone();
    let diffs = diff_states(&left, &right);
    ComparisonReport {
        spec_id: spec_id.to_string(),
        k,
        equal: diffs.is_empty(),
        left,
        right,
        diffs,
        parallel_steps: t.compiled.steps_through(k),
        work: t.compiled.work_through(k),
        ledger: t.compiled.ledger_at(k),
        wall_time,
    }
}

pub fn compare(
    spec_id: &str,
    spec: &PqcaSpec,
    initial: &SuperposedState,
    k: usize,
    options: RunOptions,
) -> Result<ComparisonReport, HarnessError> {
    let clock = Instant::now();
    let t = trajectory(spec, initial, k, options)?;
    Ok(report_from(spec_id, k, &t, clock.elapsed()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub k: usize,
    pub steps: u64,
    pub work: u64,
    pub wall_time: Duration,
}

/// Cumulative cost of `k` steps for every requested `k`, from one run to
/// the largest.
pub fn bench(
    spec: &PqcaSpec,
    initial: &SuperposedState,
    ks: &[usize],
    options: RunOptions,
) -> Result<Vec<BenchRow>, HarnessError> {
    let max = ks.iter().copied().max().unwrap_or(0);
    let compiled = CompiledAutomaton::new(spec, options.scaling);
    let run = run_compiled(&compiled, initial, max, options.fuel)?;
    Ok(ks
        .iter()
        .map(|&k| BenchRow {
            k,
            steps: run.steps_through(k),
            work: run.work_through(k),
            wall_time: run.elapsed_through(k),
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
    /// RMS residual over the mean of the observations.
    pub relative_residual: f64,
}

/// Least-squares line through `(x, y)` points.
pub fn linear_fit(points: &[(f64, f64)]) -> LinearFit {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = mean_y - slope * mean_x;
    let rms = (points
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    LinearFit {
        slope,
        intercept,
        rms_residual: rms,
        relative_residual: if mean_y == 0.0 { 0.0 } else { rms / mean_y },
    }
}

/// The two exact rational 2x2 orthogonal blocks used by the random catalog:
/// a rotation and a reflection.
pub fn rotation_block() -> [[BigRational; 2]; 2] {
    let r = |n: i64| BigRational::new(n.into(), 5.into());
    [[r(3), r(4)], [r(-4), r(3)]]
}

pub fn reflection_block() -> [[BigRational; 2]; 2] {
    let r = |n: i64| BigRational::new(n.into(), 5.into());
    [[r(3), r(4)], [r(4), r(-3)]]
}

fn permutation_matrix(perm: &[usize]) -> RationalMatrix {
    let n = perm.len();
    let mut m = RationalMatrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        m.set(i, j, BigRational::from_integer(BigInt::from(1)));
    }
    m
}

/// A random exact orthogonal `n x n` matrix: the identity with up to
/// `n / 2` disjoint 2x2 blocks embedded, multiplied by a random permutation.
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> RationalMatrix {
    let mut m = RationalMatrix::identity(n);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let blocks = rng.gen_range(0..=n / 2);
    for pair in idx.chunks(2).take(blocks) {
        let block = if rng.gen_bool(0.5) {
            rotation_block()
        } else {
            reflection_block()
        };
        let (i, j) = (pair[0], pair[1]);
        for (a, &p) in [i, j].iter().enumerate() {
            for (b, &q) in [i, j].iter().enumerate() {
                m.set(p, q, block[a][b].clone());
            }
        }
    }
    if rng.gen_bool(0.5) {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        m = m.mul(&permutation_matrix(&perm));
    }
    m
}

/// Ordered factorisations of `n` into three positive factors.
pub fn factorisations(n: usize) -> Vec<Sublattices> {
    let mut out = Vec::new();
    for l in 1..=n {
        for m in 1..=n {
            if n.is_multiple_of(l * m) {
                out.push(Sublattices::new(l, m, n / (l * m)));
            }
        }
    }
    out
}

/// A random validated-unitary spec with at most `max_states` states per
/// cell and at most `max_width` cells.
pub fn random_spec(rng: &mut impl Rng, max_states: usize, max_width: usize) -> PqcaSpec {
    let n = rng.gen_range(1..=max_states);
    let sublattices = *factorisations(n).choose(rng).expect("n >= 1");
    let width = rng.gen_range(1..=max_width);
    let mut spec = PqcaSpec::new(sublattices, random_orthogonal(n, rng), width);
    spec.accept_cell = rng.gen_range(0..width);
    spec.accept_states = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    spec
}

pub fn random_configuration(spec: &PqcaSpec, rng: &mut impl Rng) -> Configuration {
    Configuration(
        (0..spec.width)
            .map(|_| rng.gen_range(0..spec.states()))
            .collect(),
    )
}

/// A random state vector with small rational amplitudes (not normalised).
pub fn random_state(spec: &PqcaSpec, rng: &mut impl Rng) -> SuperposedState {
    let mut out = SuperposedState::new();
    for c in spec.configurations() {
        if rng.gen_bool(0.6) {
            let a = BigRational::new(rng.gen_range(-9..=9).into(), rng.gen_range(1..=7).into());
            if !a.is_zero() {
                out.add(c, a);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn catalog_matrices_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let spec = random_spec(&mut rng, 4, 4);
            let report = pqca::validate(&spec);
            assert!(report.errors.is_empty(), "{:?}", report.errors);
            assert!(report.unitary, "{}", spec.lambda);
        }
    }

    #[test]
    fn fit_of_exact_line() {
        let fit = linear_fit(&[(1.0, 5.0), (2.0, 7.0), (3.0, 9.0)]);
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0).abs() < 1e-12);
        assert!(fit.rms_residual < 1e-12);
    }

    #[test]
    fn compare_zero_steps_is_trivially_equal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = random_spec(&mut rng, 4, 3);
        let c = random_configuration(&spec, &mut rng);
        let report =
            compare("r", &spec, &SuperposedState::basis(c), 0, RunOptions::default()).unwrap();
        assert!(report.equal);
        assert_eq!(report.parallel_steps, 0);
    }

    #[test]
    fn count_total_mode_on_stochastic_matrix() {
        let spec = PqcaSpec::new(
            Sublattices::new(1, 2, 1),
            RationalMatrix::from_ratios(&[&[(2, 3), (1, 3)], &[(0, 1), (1, 1)]]),
            1,
        );
        let init = SuperposedState::basis(Configuration(vec![0]));
        let options = RunOptions {
            decode: DecodeMode::CountTotal,
            ..RunOptions::default()
        };
        assert!(compare("s", &spec, &init, 1, options).unwrap().equal);
    }

    #[test]
    fn fuel_exhaustion_surfaces() {
        let spec = PqcaSpec::new(Sublattices::new(1, 2, 1), RationalMatrix::identity(2), 1);
        let init = SuperposedState::basis(Configuration(vec![1]));
        let options = RunOptions {
            fuel: 3,
            ..RunOptions::default()
        };
        assert!(matches!(
            compare("id", &spec, &init, 1, options),
            Err(HarnessError::FuelExhausted { .. })
        ));
    }

    #[test]
    fn superposed_initial_state() {
        let spec = PqcaSpec::new(
            Sublattices::new(1, 2, 1),
            RationalMatrix::from_ratios(&[&[(3, 5), (4, 5)], &[(4, 5), (-3, 5)]]),
            2,
        );
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let init: SuperposedState = [
            (Configuration(vec![0, 1]), r(3, 5)),
            (Configuration(vec![1, 1]), r(-4, 5)),
        ]
        .into_iter()
        .collect();
        let report = compare("s", &spec, &init, 2, RunOptions::default()).unwrap();
        assert!(report.equal, "{:?}", report.diffs);
    }
}
