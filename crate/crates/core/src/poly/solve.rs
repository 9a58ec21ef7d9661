use alloc::vec;
use alloc::vec::Vec;

use super::backend::{decide_exists, BackendOptions, Decision};
use super::formula::{build_basis_guess_formula, build_fillin_formula, subsets_up_to, Problem};
use super::PolyError;
use crate::chordal::{chordal_complete, min_fill_in, ChordalError, Completion};
use crate::embed::{is_embeddable_on, realize, Realization};
use crate::linalg::{cholesky_solve, symmetric_eigen};
use crate::matrix::{squared_distance, PartialMatrix};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub restarts: usize,
    pub seed: u64,
    pub tol: Tolerances,
    /// Separate variables for both orientations of each unspecified pair.
    pub split_vars: bool,
    pub fill_budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            restarts: 64,
            seed: 0,
            tol: Tolerances::default(),
            split_vars: false,
            fill_budget: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoCertificate {
    /// A clique of specified entries whose submatrix is not d-embeddable.
    CliqueInfeasible(Vec<usize>),
    /// The existential formula was refuted (without variables or by
    /// interval arithmetic over a box containing every solution).
    Refuted,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    /// `completion` agrees with every specified entry bit-for-bit and
    /// `realization` realizes it in `R^d`.
    Yes {
        completion: PartialMatrix,
        realization: Realization,
    },
    No(NoCertificate),
    Unknown,
}

/// First maximal clique of the specified graph that is not d-embeddable.
pub fn infeasible_clique(
    m: &PartialMatrix,
    d: usize,
    tol: &Tolerances,
) -> Result<Option<Vec<usize>>, PolyError> {
    for c in m.graph().maximal_cliques() {
        if !is_embeddable_on(m, &c, d, tol)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// `dist[u][v]`: square of the shortest path length between `u` and `v`
/// using edge lengths `sqrt(m_uv)`; bounds every completion's entry.
pub fn path_bounds(m: &PartialMatrix) -> Vec<Vec<Option<f64>>> {
    let n = m.order();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if let Some(v) = m.get(i, j) {
                *cell = libm::sqrt(v);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    dist.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| {
                    if v.is_finite() {
                        Some(v * v * (1.0 + 1e-12))
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect()
}

fn backend_options(
    problem: &Problem,
    m: &PartialMatrix,
    opts: &SolveOptions,
    restarts: usize,
    seed: u64,
) -> BackendOptions {
    let bounds = path_bounds(m);
    let sound = (0..problem.vars.len() as u32)
        .map(|id| {
            let (u, v) = problem.vars.pair_of(id);
            bounds[u][v]
        })
        .collect();
    BackendOptions {
        restarts,
        seed,
        tol: opts.tol,
        sound_upper: Some(sound),
        ..BackendOptions::default()
    }
}

/// Complete `m` directly.
fn decide_complete(m: &PartialMatrix, d: usize, tol: &Tolerances) -> SolveOutcome {
    match realize(m, d, tol) {
        Ok(r) => SolveOutcome::Yes {
            completion: m.clone(),
            realization: r,
        },
        Err(_) => SolveOutcome::No(NoCertificate::CliqueInfeasible((0..m.order()).collect())),
    }
}

/// Decision through a chordal supergraph with at most `kmax` fill edges.
pub fn solve_fillin(
    m: &PartialMatrix,
    d: usize,
    kmax: usize,
    opts: &SolveOptions,
) -> Result<SolveOutcome, PolyError> {
    if let Some(c) = infeasible_clique(m, d, &opts.tol)? {
        return Ok(SolveOutcome::No(NoCertificate::CliqueInfeasible(c)));
    }
    if m.is_complete() {
        return Ok(decide_complete(m, d, &opts.tol));
    }
    let fill = match min_fill_in(&m.graph(), kmax, opts.fill_budget) {
        Ok(Some(f)) => f,
        Ok(None) => return Err(PolyError::FillInTooLarge { kmax }),
        Err(ChordalError::BudgetExceeded) => return Err(PolyError::BudgetExceeded),
        Err(e) => return Err(e.into()),
    };
    let problem = build_fillin_formula(m, &fill, d, opts.split_vars, &opts.tol)?;
    let bopts = backend_options(&problem, m, opts, opts.restarts, opts.seed);
    match decide_exists(&problem, &bopts) {
        Decision::Sat(x) => {
            let partial = problem.substitute(m, &x);
            let loose = loosened(&opts.tol);
            match chordal_complete(&partial, d, &loose) {
                Ok(Completion::Complete { matrix, .. }) => Ok(certify(m, matrix, d, &opts.tol)),
                _ => Ok(SolveOutcome::Unknown),
            }
        }
        Decision::Unsat => Ok(SolveOutcome::No(NoCertificate::Refuted)),
        Decision::Unknown => Ok(SolveOutcome::Unknown),
    }
}

/// Thresholds for assembling an approximate completion from backend values;
/// the result is always re-checked with the strict ones.
fn loosened(tol: &Tolerances) -> Tolerances {
    Tolerances {
        eig: tol.eig * 1e4,
        cm: tol.cm * 1e4,
        real: tol.real * 1e4,
        atom: tol.atom,
    }
}

/// Yes only if the candidate keeps every specified entry of `m` and passes
/// `realize`. Backend values solve equalities with double roots only to
/// about the square root of machine precision, so a candidate that fails is
/// snapped to its nearest rank-`d` configuration, polished against the
/// specified entries of `m`, and checked again.
fn certify(
    m: &PartialMatrix,
    candidate: PartialMatrix,
    d: usize,
    tol: &Tolerances,
) -> SolveOutcome {
    let direct = keep_specified(m, candidate.clone());
    if let Some(out) = accept(m, direct, d, tol) {
        return out;
    }
    let points = polish_points(m, truncated_points(&candidate, d), d);
    let n = m.order();
    let mut snapped = PartialMatrix::unspecified(n);
    for i in 0..n {
        for j in (i + 1)..n {
            snapped.set(i, j, squared_distance(&points[i], &points[j]));
        }
    }
    accept(m, keep_specified(m, snapped), d, tol).unwrap_or(SolveOutcome::Unknown)
}

fn keep_specified(m: &PartialMatrix, mut candidate: PartialMatrix) -> PartialMatrix {
    let n = m.order();
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(v) = m.get(i, j) {
                candidate.set(i, j, v);
            }
        }
    }
    candidate
}

fn accept(
    m: &PartialMatrix,
    candidate: PartialMatrix,
    d: usize,
    tol: &Tolerances,
) -> Option<SolveOutcome> {
    match realize(&candidate, d, tol) {
        Ok(r) if r.realizes(m, tol) => Some(SolveOutcome::Yes {
            completion: candidate,
            realization: r,
        }),
        _ => None,
    }
}

/// Top `d` eigenpairs of the double-centred Gram matrix of a complete `c`.
fn truncated_points(c: &PartialMatrix, d: usize) -> Vec<Vec<f64>> {
    let n = c.order();
    let at = |i: usize, j: usize| c.get(i, j).unwrap_or(0.0);
    let nf = n as f64;
    let row: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| at(i, j)).sum::<f64>() / nf)
        .collect();
    let all = row.iter().sum::<f64>() / nf;
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] = -0.5 * (at(i, j) - row[i] - row[j] + all);
        }
    }
    let eig = symmetric_eigen(n, &b);
    (0..n)
        .map(|i| {
            (0..d)
                .map(|k| {
                    if k < n {
                        libm::sqrt(eig.values[k].max(0.0)) * eig.vector_entry(i, k)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Damped Gauss-Newton on point coordinates for the specified entries of `m`.
fn polish_points(m: &PartialMatrix, mut points: Vec<Vec<f64>>, d: usize) -> Vec<Vec<f64>> {
    let n = m.order();
    let dim = n * d;
    if dim == 0 {
        return points;
    }
    let scale = crate::tolerance::unit_scale(m.max_entry());
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(v) = m.get(i, j) {
                pairs.push((i, j, v / scale));
            }
        }
    }
    let s = libm::sqrt(scale);
    let mut x: Vec<f64> = points.iter().flatten().map(|v| v / s).collect();
    let cost = |x: &[f64]| -> f64 {
        pairs
            .iter()
            .map(|&(i, j, v)| {
                let r = squared_distance(&x[i * d..(i + 1) * d], &x[j * d..(j + 1) * d]) - v;
                r * r
            })
            .sum()
    };
    let mut c = cost(&x);
    let mut lambda = 1e-6;
    for _ in 0..100 {
        if c < 1e-30 {
            break;
        }
        let mut jtj = vec![0.0; dim * dim];
        let mut jtr = vec![0.0; dim];
        for &(i, j, v) in &pairs {
            let r = squared_distance(&x[i * d..(i + 1) * d], &x[j * d..(j + 1) * d]) - v;
            for a in 0..d {
                let ga = 2.0 * (x[i * d + a] - x[j * d + a]);
                jtr[i * d + a] += ga * r;
                jtr[j * d + a] -= ga * r;
                for b in 0..d {
                    let gb = 2.0 * (x[i * d + b] - x[j * d + b]);
                    jtj[(i * d + a) * dim + i * d + b] += ga * gb;
                    jtj[(j * d + a) * dim + j * d + b] += ga * gb;
                    jtj[(i * d + a) * dim + j * d + b] -= ga * gb;
                    jtj[(j * d + a) * dim + i * d + b] -= ga * gb;
                }
            }
        }
        let mut improved = false;
        while lambda < 1e10 {
            let mut sys = jtj.clone();
            for a in 0..dim {
                sys[a * dim + a] += lambda * (1.0 + jtj[a * dim + a]);
            }
            let neg: Vec<f64> = jtr.iter().map(|v| -v).collect();
            if let Some(step) = cholesky_solve(dim, &sys, &neg) {
                let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
                let tc = cost(&trial);
                if tc < c {
                    x = trial;
                    c = tc;
                    lambda = (lambda / 10.0).max(1e-15);
                    improved = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    for (i, p) in points.iter_mut().enumerate() {
        for (k, v) in p.iter_mut().enumerate() {
            *v = x[i * d + k] * s;
        }
    }
    points
}

/// Decision by guessing the metric basis of the completion. Basis candidates
/// are tried largest first, then lexicographically; a first pass spends an
/// eighth of the restarts on each and a second pass the rest on those still
/// undecided.
pub fn solve_exact(
    m: &PartialMatrix,
    d: usize,
    opts: &SolveOptions,
) -> Result<SolveOutcome, PolyError> {
    if let Some(c) = infeasible_clique(m, d, &opts.tol)? {
        return Ok(SolveOutcome::No(NoCertificate::CliqueInfeasible(c)));
    }
    if m.is_complete() {
        return Ok(decide_complete(m, d, &opts.tol));
    }
    let n = m.order();
    let all: Vec<usize> = (0..n).collect();
    let mut candidates: Vec<Vec<usize>> = subsets_up_to(&all, d + 1)
        .into_iter()
        .filter(|y| !y.is_empty())
        .collect();
    candidates.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let first = (opts.restarts / 8).max(1);
    let second = opts.restarts.saturating_sub(first);
    let mut pending: Vec<Problem> = Vec::new();
    for y in &candidates {
        let problem = build_basis_guess_formula(m, y, d, opts.split_vars)?;
        let bopts = backend_options(&problem, m, opts, first, opts.seed);
        match decide_exists(&problem, &bopts) {
            Decision::Sat(x) => {
                if let SolveOutcome::Yes {
                    completion,
                    realization,
                } = certify(m, problem.substitute(m, &x), d, &opts.tol)
                {
                    return Ok(SolveOutcome::Yes {
                        completion,
                        realization,
                    });
                }
                pending.push(problem);
            }
            Decision::Unsat => {}
            Decision::Unknown => pending.push(problem),
        }
    }
    if pending.is_empty() {
        return Ok(SolveOutcome::No(NoCertificate::Refuted));
    }
    if second > 0 {
        for problem in &pending {
            let bopts = backend_options(
                problem,
                m,
                opts,
                second,
                opts.seed.wrapping_add(first as u64),
            );
            if let Decision::Sat(x) = decide_exists(problem, &bopts) {
                if let SolveOutcome::Yes {
                    completion,
                    realization,
                } = certify(m, problem.substitute(m, &x), d, &opts.tol)
                {
                    return Ok(SolveOutcome::Yes {
                        completion,
                        realization,
                    });
                }
            }
        }
    }
    Ok(SolveOutcome::Unknown)
}
