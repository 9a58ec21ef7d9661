//! Independent numerical oracle: multi-start Levenberg-Marquardt over point
//! coordinates plus a clique-infeasibility scan. It shares no algorithmic
//! code with the core solvers and is used to cross-check them.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use edmc_core::{PartialMatrix, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Worker threads for restarts; `None` uses rayon's default.
    pub threads: Option<usize>,
    pub tol: Tolerances,
    pub max_iterations: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            restarts: 64,
            seed: 0,
            threads: None,
            tol: Tolerances::default(),
            max_iterations: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleVerdict {
    /// Points reproducing every specified entry within `τ_real`.
    Yes(Vec<Vec<f64>>),
    /// A fully specified clique whose submatrix is not d-embeddable.
    CertifiedNo { clique: Vec<usize> },
    /// Every restart failed but no infeasible clique exists; a heuristic no.
    Unknown,
}

struct Pairs {
    n: usize,
    list: Vec<(usize, usize, f64)>,
}

impl Pairs {
    fn of(m: &PartialMatrix, scale: f64) -> Self {
        let n = m.order();
        let mut list = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if let Some(v) = m.get(i, j) {
                    list.push((i, j, v / scale));
                }
            }
        }
        Pairs { n, list }
    }
}

fn adjacency(m: &PartialMatrix) -> Vec<Vec<bool>> {
    let n = m.order();
    (0..n)
        .map(|i| (0..n).map(|j| i != j && m.get(i, j).is_some()).collect())
        .collect()
}

/// Bron-Kerbosch with a pivot chosen to maximise `|P ∩ N(u)|`.
fn maximal_cliques(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    fn expand(
        adj: &[Vec<bool>],
        r: &mut Vec<usize>,
        p: Vec<usize>,
        x: Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() {
            if x.is_empty() {
                let mut c = r.clone();
                c.sort_unstable();
                out.push(c);
            }
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
            .unwrap();
        let mut p = p;
        let mut x = x;
        let branch: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        for v in branch {
            let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
            let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
            r.push(v);
            expand(adj, r, np, nx, out);
            r.pop();
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut out = Vec::new();
    expand(
        adj,
        &mut Vec::new(),
        (0..adj.len()).collect(),
        Vec::new(),
        &mut out,
    );
    out.sort();
    out
}

/// Anchored Gram test: PSD with rank at most `d`, thresholds relative to the
/// clique's largest entry.
fn clique_embeddable(m: &PartialMatrix, c: &[usize], d: usize, tol: &Tolerances) -> bool {
    if c.len() <= 1 {
        return true;
    }
    let k = c.len() - 1;
    let a = c[0];
    let at = |i: usize, j: usize| if i == j { 0.0 } else { m.get(i, j).unwrap() };
    let mut scale = 0.0f64;
    for &i in c {
        for &j in c {
            scale = scale.max(at(i, j));
        }
    }
    let g = DMatrix::from_fn(k, k, |p, q| {
        let (i, j) = (c[p + 1], c[q + 1]);
        0.5 * (at(a, i) + at(a, j) - at(i, j))
    });
    let eig = SymmetricEigen::new(g).eigenvalues;
    let thr = tol.eig_abs(scale);
    eig.iter().all(|&l| l >= -thr) && eig.iter().filter(|&&l| l > thr).count() <= d
}

/// First maximal clique (in sorted order) that fails the Gram test.
pub fn clique_scan(m: &PartialMatrix, d: usize, tol: &Tolerances) -> Option<Vec<usize>> {
    maximal_cliques(&adjacency(m))
        .into_iter()
        .find(|c| !clique_embeddable(m, c, d, tol))
}

fn cost(pairs: &Pairs, x: &DVector<f64>, d: usize) -> f64 {
    pairs
        .list
        .iter()
        .map(|&(i, j, v)| {
            let r = (0..d)
                .map(|k| (x[i * d + k] - x[j * d + k]).powi(2))
                .sum::<f64>()
                - v;
            r * r
        })
        .sum()
}

fn levenberg_marquardt(
    pairs: &Pairs,
    mut x: DVector<f64>,
    d: usize,
    iterations: usize,
) -> DVector<f64> {
    let dim = pairs.n * d;
    let mut lambda = 1e-3;
    let mut f = cost(pairs, &x, d);
    for _ in 0..iterations {
        if f < 1e-28 {
            break;
        }
        let mut jtj = DMatrix::<f64>::zeros(dim, dim);
        let mut jtr = DVector::<f64>::zeros(dim);
        let mut row = vec![0.0; 2 * d];
        for &(i, j, v) in &pairs.list {
            let mut r = -v;
            for k in 0..d {
                let diff = x[i * d + k] - x[j * d + k];
                r += diff * diff;
                row[k] = 2.0 * diff;
                row[d + k] = -2.0 * diff;
            }
            let idx = |a: usize| if a < d { i * d + a } else { j * d + a - d };
            for a in 0..2 * d {
                jtr[idx(a)] += row[a] * r;
                for b in 0..2 * d {
                    jtj[(idx(a), idx(b))] += row[a] * row[b];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut sys = jtj.clone();
            for a in 0..dim {
                sys[(a, a)] += lambda * (1.0 + jtj[(a, a)]);
            }
            let Some(chol) = sys.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let step = chol.solve(&jtr);
            let trial = &x - step;
            let ft = cost(pairs, &trial, d);
            if ft < f {
                x = trial;
                f = ft;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    x
}

/// Classical scaling of the shortest-path completion, in normalised units.
fn mds_start(m: &PartialMatrix, d: usize, scale: f64) -> DVector<f64> {
    let n = m.order();
    let mut dist = DMatrix::from_fn(n, n, |i, j| match m.get(i, j) {
        Some(v) => (v / scale).sqrt(),
        None if i == j => 0.0,
        None => f64::INFINITY,
    });
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[(i, k)] + dist[(k, j)];
                if via < dist[(i, j)] {
                    dist[(i, j)] = via;
                }
            }
        }
    }
    let finite_max = dist
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(1.0f64, f64::max);
    let sq = dist.map(|v| {
        if v.is_finite() {
            v * v
        } else {
            finite_max * finite_max
        }
    });
    let centre = DMatrix::<f64>::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let b = &centre * sq * &centre * -0.5;
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]));
    DVector::from_fn(n * d, |p, _| {
        let (i, k) = (p / d, p % d);
        match order.get(k) {
            Some(&col) => eig.eigenvectors[(i, col)] * eig.eigenvalues[col].max(0.0).sqrt(),
            None => 0.0,
        }
    })
}

fn random_start(n: usize, d: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(n * d, |_, _| rng.random::<f64>())
}

fn attempt(
    m: &PartialMatrix,
    pairs: &Pairs,
    d: usize,
    scale: f64,
    restart: usize,
    opts: &OracleOptions,
) -> Option<Vec<Vec<f64>>> {
    let n = m.order();
    let start = if restart == 0 {
        mds_start(m, d, scale)
    } else {
        random_start(
            n,
            d,
            opts.seed
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .wrapping_add(restart as u64),
        )
    };
    let x = levenberg_marquardt(pairs, start, d, opts.max_iterations);
    let s = scale.sqrt();
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..d).map(|k| x[i * d + k] * s).collect())
        .collect();
    let bound = opts.tol.real_abs(m.max_entry());
    let ok = pairs.list.iter().all(|&(i, j, _)| {
        let v = m.get(i, j).unwrap();
        let dd: f64 = (0..d).map(|k| (points[i][k] - points[j][k]).powi(2)).sum();
        (dd - v).abs() <= bound
    });
    ok.then_some(points)
}

/// Decides `m` numerically. The clique scan runs first; the lowest-indexed
/// successful restart supplies the points, so the result does not depend on
/// the thread count.
pub fn oracle_solve(m: &PartialMatrix, d: usize, opts: &OracleOptions) -> OracleVerdict {
    let n = m.order();
    if let Some(clique) = clique_scan(m, d, &opts.tol) {
        return OracleVerdict::CertifiedNo { clique };
    }
    if n == 0 {
        return OracleVerdict::Yes(Vec::new());
    }
    if d == 0 {
        // Everything must coincide; the clique scan already checked specified zeros.
        return if m.max_entry() == 0.0 {
            OracleVerdict::Yes(vec![Vec::new(); n])
        } else {
            OracleVerdict::Unknown
        };
    }
    let scale = edmc_core::tolerance::unit_scale(m.max_entry());
    let pairs = Pairs::of(m, scale);
    let run = || {
        (0..opts.restarts.max(1))
            .into_par_iter()
            .find_map_first(|r| attempt(m, &pairs, d, scale, r, opts))
    };
    let found = match opts.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
        {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    };
    match found {
        Some(points) => OracleVerdict::Yes(points),
        None => OracleVerdict::Unknown,
    }
}
