use nalgebra::DMatrix;
use proptest::prelude::*;

use edmc_core::chordal::{
    chordal_complete, chordal_edm_check, min_fill_in, CliqueCheck, Completion, FillIn,
};
use edmc_core::compress::{compress_maxdeg, CompressOutcome, Verdict};
use edmc_core::embed::{
    cm_determinant, embedding_dimension, is_strongly_embeddable, metric_basis, realize,
    realize_centered,
};
use edmc_core::poly::{build_augmented_cm, build_fillin_formula, Indeterminates};
use edmc_core::{PartialMatrix, Tolerances, UnderlyingGraph};

fn points(n: std::ops::RangeInclusive<usize>, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, d), n)
}

fn cloud() -> impl Strategy<Value = (usize, Vec<Vec<f64>>)> {
    (1usize..=4).prop_flat_map(|d| (Just(d), points(1..=20, d)))
}

fn to_matrix(pts: &[Vec<f64>]) -> DMatrix<f64> {
    let d = pts.first().map_or(0, |p| p.len());
    DMatrix::from_fn(pts.len(), d, |i, j| pts[i][j])
}

/// Residual of the best rigid motion (rotation or reflection plus
/// translation) taking `a` onto `b`.
fn procrustes(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let (mut a, mut b) = (to_matrix(a), to_matrix(b));
    for m in [&mut a, &mut b] {
        let c = m.row_mean();
        for mut r in m.row_iter_mut() {
            r -= &c;
        }
    }
    let svd = (a.transpose() * &b).svd(true, true);
    let r = svd.u.unwrap() * svd.v_t.unwrap();
    (a * r - b).abs().max()
}

/// Chordality by repeated removal of simplicial vertices.
fn chordal_by_elimination(g: &UnderlyingGraph) -> bool {
    let n = g.order();
    let mut alive = vec![true; n];
    for _ in 0..n {
        let simplicial = (0..n).find(|&v| {
            alive[v] && {
                let nb: Vec<usize> = g.neighbors(v).filter(|&u| alive[u]).collect();
                nb.iter()
                    .enumerate()
                    .all(|(i, &a)| nb[i + 1..].iter().all(|&b| g.has_edge(a, b)))
            }
        });
        match simplicial {
            Some(v) => alive[v] = false,
            None => return false,
        }
    }
    true
}

fn brute_min_fill(g: &UnderlyingGraph, kmax: usize) -> Option<usize> {
    let non = g.non_edges();
    fn rec(g: &mut UnderlyingGraph, non: &[(usize, usize)], start: usize, left: usize) -> bool {
        if left == 0 {
            return chordal_by_elimination(g);
        }
        for i in start..non.len() {
            let (u, v) = non[i];
            g.add_edge(u, v);
            let ok = rec(g, non, i + 1, left - 1);
            g.remove_edge(u, v);
            if ok {
                return true;
            }
        }
        false
    }
    (0..=kmax).find(|&k| rec(&mut g.clone(), &non, 0, k))
}

fn graph_strategy(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = UnderlyingGraph> {
    n.prop_flat_map(|n| {
        prop::collection::vec(prop::bool::weighted(0.5), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = UnderlyingGraph::empty(n);
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if bits[k] {
                        g.add_edge(i, j);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

/// Chordal graph grown by attaching each new vertex to a random subset of a
/// maximal clique of the current graph.
fn chordal_graph(n: usize, picks: &[(usize, u32)]) -> UnderlyingGraph {
    let mut g = UnderlyingGraph::empty(n);
    for (v, &(ci, mask)) in picks.iter().enumerate().take(n).skip(1) {
        let cliques = g.induced(&(0..v).collect::<Vec<_>>()).maximal_cliques();
        let c = &cliques[ci % cliques.len()];
        for (k, &u) in c.iter().enumerate() {
            if mask & (1 << (k % 32)) != 0 || k == 0 {
                g.add_edge(u, v);
            }
        }
    }
    g
}

fn masked(pts: &[Vec<f64>], g: &UnderlyingGraph) -> PartialMatrix {
    let full = PartialMatrix::from_points(pts);
    let mut m = PartialMatrix::unspecified(pts.len());
    for (u, v) in g.edges() {
        m.set(u, v, full.get(u, v).unwrap());
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cm_matches_simplex_volume(pts in (1usize..=4).prop_flat_map(|j| points(j + 1..=j + 1, j))) {
        let j = pts.len() - 1;
        let m = PartialMatrix::from_points(&pts);
        let idx: Vec<usize> = (0..=j).collect();
        let cm = cm_determinant(&m, &idx).unwrap();
        let e = DMatrix::from_fn(j, j, |r, c| pts[r + 1][c] - pts[0][c]);
        let det = e.determinant();
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        // (-1)^{j+1} 2^j (j!)^2 V^2 with V = |det E| / j!
        let want = sign * 2f64.powi(j as i32) * det * det;
        let scale = m.max_entry().max(1.0).powi(j as i32);
        prop_assert!((cm - want).abs() <= 1e-9 * scale, "cm={} want={}", cm, want);
    }

    #[test]
    fn realization_round_trip((d, pts) in cloud()) {
        let tol = Tolerances::default();
        let m = PartialMatrix::from_points(&pts);
        let r = realize(&m, d, &tol).unwrap();
        prop_assert!(r.max_residual(&m) <= tol.real_abs(m.max_entry()));
    }

    #[test]
    fn basis_size_is_dimension_plus_one((_d, pts) in cloud()) {
        let tol = Tolerances::default();
        let m = PartialMatrix::from_points(&pts);
        let dim = embedding_dimension(&m, &tol).unwrap();
        prop_assert_eq!(metric_basis(&m, &tol).unwrap().len(), dim + 1);
        prop_assert!(is_strongly_embeddable(&m, dim, &tol).unwrap());
    }

    #[test]
    fn realizations_agree_up_to_rigid_motion((d, pts) in cloud()) {
        let tol = Tolerances::default();
        let m = PartialMatrix::from_points(&pts);
        let a = realize(&m, d, &tol).unwrap();
        let b = realize_centered(&m, d, &tol).unwrap();
        let res = procrustes(&a.points, &b.points);
        prop_assert!(res <= 1e-6 * m.max_entry().sqrt().max(1.0), "residual {}", res);
        prop_assert!(procrustes(&a.points, &pts) <= 1e-6 * m.max_entry().sqrt().max(1.0));
    }

    #[test]
    fn strong_embeddability_is_monotone((_d, pts) in cloud(), extra in 0usize..3) {
        let tol = Tolerances::default();
        let m = PartialMatrix::from_points(&pts);
        for r in 0..=4 {
            if is_strongly_embeddable(&m, r, &tol).unwrap() {
                prop_assert!(realize(&m, r + extra, &tol).is_ok());
                if r > 0 {
                    prop_assert!(realize(&m, r - 1, &tol).is_err());
                }
            }
        }
    }

    #[test]
    fn augmented_cm_degree_bound(pts in points(2..=5, 2), hide in prop::collection::vec(any::<bool>(), 10)) {
        let n = pts.len();
        let mut m = PartialMatrix::from_points(&pts);
        let mut pairs = Vec::new();
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if hide[k] {
                    m.unset(i, j);
                    pairs.push((i, j));
                }
                k += 1;
            }
        }
        let idx: Vec<usize> = (0..n).collect();
        for split in [false, true] {
            let vars = Indeterminates::new(&pairs, split);
            let p = build_augmented_cm(&m, &idx, &vars).unwrap();
            prop_assert!(p.degree() <= n.min(2 * vars.len()));
            // each unordered pair contributes at most two factors
            prop_assert!(p.degree() <= 2 * pairs.len());
        }
    }

    #[test]
    fn min_fill_in_matches_brute_force(g in graph_strategy(3..=7)) {
        let kmax = 3;
        let got = min_fill_in(&g, kmax, 5_000_000).unwrap();
        let want = brute_min_fill(&g, kmax);
        prop_assert_eq!(got.as_ref().map(|f| f.edges.len()), want);
        if let Some(f) = got {
            let mut h = g.clone();
            for &(u, v) in &f.edges {
                prop_assert!(!g.has_edge(u, v));
                h.add_edge(u, v);
            }
            prop_assert!(chordal_by_elimination(&h));
        }
    }

    #[test]
    fn chordal_check_and_completion_agree(
        d in 1usize..=3,
        n in 2usize..=20,
        picks in prop::collection::vec((0usize..8, any::<u32>()), 20),
        pts in points(20..=20, 3),
        noise in prop::collection::vec(0.0f64..2.0, 400),
        garble in any::<bool>(),
    ) {
        let tol = Tolerances::default();
        let pts: Vec<Vec<f64>> = pts[..n].iter().map(|p| p[..d].to_vec()).collect();
        let g = chordal_graph(n, &picks);
        let mut m = masked(&pts, &g);
        if garble {
            for (k, (u, v)) in g.edges().into_iter().enumerate() {
                m.set(u, v, noise[k % noise.len()]);
            }
        }
        let check = chordal_edm_check(&m, d, &tol).unwrap();
        match chordal_complete(&m, d, &tol).unwrap() {
            Completion::Complete { matrix, .. } => {
                prop_assert_eq!(&check, &CliqueCheck::Yes);
                for (u, v) in g.edges() {
                    prop_assert_eq!(matrix.get(u, v).unwrap().to_bits(), m.get(u, v).unwrap().to_bits());
                }
                prop_assert!(realize(&matrix, d, &tol).is_ok());
            }
            Completion::No { clique } => {
                prop_assert_eq!(&check, &CliqueCheck::No { clique: clique.clone() });
                prop_assert!(realize(&m.principal(&clique), d, &tol).is_err());
            }
        }
        if !garble {
            prop_assert_eq!(check, CliqueCheck::Yes);
        }
    }

    #[test]
    fn ground_truth_satisfies_fillin_formula(
        d in 1usize..=2,
        pts in points(4..=7, 2),
        g in graph_strategy(7..=7),
        split in any::<bool>(),
    ) {
        let tol = Tolerances::default();
        let n = pts.len();
        let pts: Vec<Vec<f64>> = pts.iter().map(|p| p[..d].to_vec()).collect();
        let g = g.induced(&(0..n).collect::<Vec<_>>());
        let m = masked(&pts, &g);
        let Some(fill) = min_fill_in(&g, 4, 5_000_000).unwrap() else {
            return Ok(());
        };
        let problem = build_fillin_formula(&m, &FillIn { edges: fill.edges.clone() }, d, split, &tol).unwrap();
        let truth = PartialMatrix::from_points(&pts);
        let x: Vec<f64> = (0..problem.vars.len() as u32)
            .map(|id| {
                let (u, v) = problem.vars.pair_of(id);
                truth.get(u, v).unwrap()
            })
            .collect();
        prop_assert!(problem.formula.eval(&x, problem.scale, tol.atom));
    }

    #[test]
    fn maxdeg_respects_bound_and_is_deterministic(
        d in 1usize..=2,
        pts in points(13..=25, 2),
        holes in prop::collection::vec((0usize..25, 0usize..25), 0..30),
    ) {
        let tol = Tolerances::default();
        let n = pts.len();
        let pts: Vec<Vec<f64>> = pts.iter().map(|p| p[..d].to_vec()).collect();
        let mut m = PartialMatrix::from_points(&pts);
        for (u, v) in holes {
            let (u, v) = (u % n, v % n);
            if u != v && m.unspecified_in_row(u) == 0 && m.unspecified_in_row(v) == 0 {
                m.unset(u, v);
            }
        }
        let a = compress_maxdeg(&m, d, 1, &tol).unwrap();
        let b = compress_maxdeg(&m, d, 1, &tol).unwrap();
        prop_assert_eq!(&a, &b);
        let mut all: Vec<usize> = a.kept().iter().chain(a.removed()).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        match a {
            CompressOutcome::Reduced { instance, kept, .. } => {
                prop_assert!(instance.order() <= (d + 1) * 4);
                prop_assert_eq!(instance, m.principal(&kept));
            }
            CompressOutcome::Solved { verdict, .. } => prop_assert!(matches!(verdict, Verdict::Yes(_))),
        }
    }
}
