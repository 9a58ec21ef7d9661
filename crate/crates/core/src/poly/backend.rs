//! Numerical existential backend.
//!
//! Sat answers come with an assignment that satisfies every atom of one
//! disjunct choice per clause, checked after the fact. Unsat is reported when
//! the formula simplifies to false without variables, or when interval
//! branch-and-prune refutes every disjunct choice over a box that is known to
//! contain every solution. Everything else is Unknown.

use alloc::vec;
use alloc::vec::Vec;

use super::formula::{Atom, Formula, Problem, Relation};
use super::polynomial::Interval;
use crate::linalg::cholesky_solve;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    /// Values for every variable of the problem.
    Sat(Vec<f64>),
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackendOptions {
    pub restarts: usize,
    /// Offset into the quasi-random start sequence.
    pub seed: u64,
    pub tol: Tolerances,
    /// Per-variable upper bounds valid for every solution, when known.
    /// Interval refutation is only attempted for groups whose variables all
    /// have one.
    pub sound_upper: Option<Vec<Option<f64>>>,
    /// Upper end of the search box; default is four times the scale.
    pub box_upper: Option<f64>,
    /// Cap on the number of disjunct combinations per variable group.
    pub combination_cap: usize,
    /// Boxes examined per refutation attempt.
    pub box_budget: usize,
    pub max_iterations: usize,
}

impl Default for BackendOptions {
    fn default() -> Self {
        BackendOptions {
            restarts: 64,
            seed: 0,
            tol: Tolerances::default(),
            sound_upper: None,
            box_upper: None,
            combination_cap: 4096,
            box_budget: 20_000,
            max_iterations: 300,
        }
    }
}

/// Replaces variable-free atoms by their truth value and folds constants.
pub fn simplify(f: &Formula, scale: f64, tol: f64) -> Formula {
    match f {
        Formula::Const(b) => Formula::Const(*b),
        Formula::Atom(a) => match a.polynomial.as_constant() {
            Some(_) => Formula::Const(a.holds(&[], scale, tol)),
            None => Formula::Atom(a.clone()),
        },
        Formula::And(children) => {
            let mut out = Vec::new();
            for c in children {
                match simplify(c, scale, tol) {
                    Formula::Const(false) => return Formula::Const(false),
                    Formula::Const(true) => {}
                    Formula::And(inner) => out.extend(inner),
                    other => out.push(other),
                }
            }
            match out.len() {
                0 => Formula::Const(true),
                1 => out.pop().unwrap(),
                _ => Formula::And(out),
            }
        }
        Formula::Or(children) => {
            let mut out = Vec::new();
            for c in children {
                match simplify(c, scale, tol) {
                    Formula::Const(true) => return Formula::Const(true),
                    Formula::Const(false) => {}
                    Formula::Or(inner) => out.extend(inner),
                    other => out.push(other),
                }
            }
            match out.len() {
                0 => Formula::Const(false),
                1 => out.pop().unwrap(),
                _ => Formula::Or(out),
            }
        }
    }
}

type Conjunction = Vec<Atom>;
type Clause = Vec<Conjunction>;

fn dnf(f: &Formula, cap: usize) -> Option<Vec<Conjunction>> {
    match f {
        Formula::Const(true) => Some(vec![Vec::new()]),
        Formula::Const(false) => Some(Vec::new()),
        Formula::Atom(a) => Some(vec![vec![a.clone()]]),
        Formula::Or(children) => {
            let mut out = Vec::new();
            for c in children {
                out.extend(dnf(c, cap)?);
                if out.len() > cap {
                    return None;
                }
            }
            Some(out)
        }
        Formula::And(children) => {
            let mut acc: Vec<Conjunction> = vec![Vec::new()];
            for c in children {
                let part = dnf(c, cap)?;
                if acc.len().saturating_mul(part.len()) > cap {
                    return None;
                }
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for p in &part {
                        let mut conj = a.clone();
                        conj.extend(p.iter().cloned());
                        next.push(conj);
                    }
                }
                acc = next;
            }
            Some(acc)
        }
    }
}

fn clauses(f: &Formula, cap: usize) -> Option<Vec<Clause>> {
    match f {
        Formula::And(children) => {
            let mut out = Vec::new();
            for c in children {
                out.extend(clauses(c, cap)?);
            }
            Some(out)
        }
        other => Some(vec![dnf(other, cap)?]),
    }
}

fn clause_vars(c: &Clause) -> Vec<u32> {
    let mut v: Vec<u32> = c
        .iter()
        .flatten()
        .flat_map(|a| a.polynomial.variables())
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Decides whether some nonnegative assignment satisfies the formula.
pub fn decide_exists(problem: &Problem, opts: &BackendOptions) -> Decision {
    let tol = opts.tol.atom;
    let scale = problem.scale;
    let nv = problem.vars.len();
    let f = simplify(&problem.formula, scale, tol);
    match f {
        Formula::Const(true) => return Decision::Sat(vec![0.0; nv]),
        Formula::Const(false) => return Decision::Unsat,
        _ => {}
    }
    let Some(cls) = clauses(&f, opts.combination_cap) else {
        return Decision::Unknown;
    };
    // clauses sharing a variable must be solved together
    let cvars: Vec<Vec<u32>> = cls.iter().map(clause_vars).collect();
    let mut parent: Vec<usize> = (0..cls.len()).collect();
    let mut owner: Vec<Option<usize>> = vec![None; nv];
    for (ci, vs) in cvars.iter().enumerate() {
        for &v in vs {
            match owner[v as usize] {
                Some(o) => {
                    let (a, b) = (find(&mut parent, o), find(&mut parent, ci));
                    parent[a.max(b)] = a.min(b);
                }
                None => owner[v as usize] = Some(ci),
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_group: Vec<Option<usize>> = vec![None; cls.len()];
    for ci in 0..cls.len() {
        let r = find(&mut parent, ci);
        match root_group[r] {
            Some(g) => groups[g].push(ci),
            None => {
                root_group[r] = Some(groups.len());
                groups.push(vec![ci]);
            }
        }
    }
    let upper = opts.box_upper.unwrap_or(4.0 * scale);
    let mut x = vec![0.0; nv];
    for group in &groups {
        let members: Vec<&Clause> = group.iter().map(|&ci| &cls[ci]).collect();
        let mut gv: Vec<u32> = group
            .iter()
            .flat_map(|&ci| cvars[ci].iter().copied())
            .collect();
        gv.sort_unstable();
        gv.dedup();
        match solve_group(&members, &gv, nv, scale, upper, opts) {
            GroupResult::Sat(vals) => {
                for &v in &gv {
                    x[v as usize] = vals[v as usize];
                }
            }
            GroupResult::Unsat => return Decision::Unsat,
            GroupResult::Unknown => return Decision::Unknown,
        }
    }
    if !problem.formula.eval(&x, scale, tol) {
        return Decision::Unknown;
    }
    Decision::Sat(x)
}

enum GroupResult {
    Sat(Vec<f64>),
    Unsat,
    Unknown,
}

fn solve_group(
    members: &[&Clause],
    gv: &[u32],
    nv: usize,
    scale: f64,
    upper: f64,
    opts: &BackendOptions,
) -> GroupResult {
    if members.iter().any(|c| c.is_empty()) {
        return GroupResult::Unsat;
    }
    let total: usize = members
        .iter()
        .fold(1usize, |acc, c| acc.saturating_mul(c.len()));
    if total > opts.combination_cap {
        return GroupResult::Unknown;
    }
    let sound: Option<Vec<f64>> = opts.sound_upper.as_ref().and_then(|s| {
        gv.iter()
            .map(|&v| s.get(v as usize).copied().flatten())
            .collect()
    });
    let mut combos: Vec<Conjunction> = Vec::with_capacity(total);
    let mut choice = vec![0usize; members.len()];
    loop {
        let conj: Conjunction = members
            .iter()
            .zip(&choice)
            .flat_map(|(c, &k)| c[k].iter().cloned())
            .collect();
        combos.push(conj);
        let mut pos = 0;
        while pos < choice.len() {
            choice[pos] += 1;
            if choice[pos] < members[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
        if pos == choice.len() {
            break;
        }
    }
    let mut alive: Vec<&Conjunction> = Vec::new();
    for conj in &combos {
        let refuted = match &sound {
            Some(hi) => refute(conj, gv, hi, nv, scale, opts),
            None => false,
        };
        if !refuted {
            alive.push(conj);
        }
    }
    if alive.is_empty() {
        return GroupResult::Unsat;
    }
    for attempt in 0..2 {
        let u = upper * if attempt == 0 { 1.0 } else { 2.0 };
        for conj in &alive {
            if let Some(x) = multistart(conj, gv, nv, scale, u, opts) {
                return GroupResult::Sat(x);
            }
        }
    }
    GroupResult::Unknown
}

/// Interval branch-and-prune over `[0, hi]`. True only if every box is
/// excluded by some atom.
fn refute(
    conj: &Conjunction,
    gv: &[u32],
    hi: &[f64],
    nv: usize,
    scale: f64,
    opts: &BackendOptions,
) -> bool {
    let tol = opts.tol.atom;
    let mut root = vec![Interval::new(0.0, 0.0); nv];
    for (k, &v) in gv.iter().enumerate() {
        root[v as usize] = Interval::new(0.0, hi[k]);
    }
    let min_width = 1e-12 * hi.iter().copied().fold(0.0, f64::max).max(scale);
    let mut stack = vec![root];
    let mut seen = 0usize;
    while let Some(b) = stack.pop() {
        seen += 1;
        if seen > opts.box_budget {
            return false;
        }
        let excluded = conj.iter().any(|a| {
            let r = a.polynomial.eval_interval(&b);
            let lo = a.normalised(r.lo, scale);
            let hi = a.normalised(r.hi, scale);
            match a.relation {
                Relation::Eq => lo > tol || hi < -tol,
                Relation::Gt => hi <= tol,
                Relation::Ge => hi < -tol,
            }
        });
        if excluded {
            continue;
        }
        let (wv, w) =
            gv.iter()
                .map(|&v| (v, b[v as usize].width()))
                .fold(
                    (gv[0], -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if w <= min_width {
            return false;
        }
        let iv = b[wv as usize];
        let mid = 0.5 * (iv.lo + iv.hi);
        let mut left = b.clone();
        left[wv as usize] = Interval::new(iv.lo, mid);
        let mut right = b;
        right[wv as usize] = Interval::new(mid, iv.hi);
        stack.push(right);
        stack.push(left);
    }
    true
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = 2u64;
    while out.len() < count {
        if out
            .iter()
            .take_while(|&&p| p * p <= c)
            .all(|&p| !c.is_multiple_of(p))
        {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Residuals of a conjunction at `y` (variables in units of `scale`) with
/// their Jacobian over the group variables.
fn residuals(
    conj: &Conjunction,
    gv: &[u32],
    x: &[f64],
    scale: f64,
    margin: f64,
    jac: &mut Vec<f64>,
    grad: &mut [f64],
) -> Vec<f64> {
    let k = gv.len();
    let mut r = Vec::with_capacity(conj.len());
    jac.clear();
    for a in conj {
        let norm = libm::pow(scale, a.degree as f64);
        let v = a.polynomial.eval_grad(x, grad) / norm;
        let (res, sign) = match a.relation {
            Relation::Eq => (v, 1.0),
            Relation::Gt => {
                if v < margin {
                    (margin - v, -1.0)
                } else {
                    (0.0, 0.0)
                }
            }
            Relation::Ge => {
                if v < 0.0 {
                    (-v, -1.0)
                } else {
                    (0.0, 0.0)
                }
            }
        };
        r.push(res);
        for &gvv in gv.iter().take(k) {
            // derivative with respect to the scaled variable y = x / scale
            jac.push(sign * grad[gvv as usize] * scale / norm);
        }
    }
    r
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn multistart(
    conj: &Conjunction,
    gv: &[u32],
    nv: usize,
    scale: f64,
    upper: f64,
    opts: &BackendOptions,
) -> Option<Vec<f64>> {
    let bases = primes(gv.len());
    for restart in 0..opts.restarts.max(1) {
        let idx = opts.seed.wrapping_add(restart as u64 + 1);
        let mut x = vec![0.0; nv];
        for (k, &v) in gv.iter().enumerate() {
            x[v as usize] = halton(idx, bases[k]) * upper;
        }
        if let Some(x) = levenberg_marquardt(conj, gv, x, scale, upper, opts) {
            return Some(x);
        }
    }
    None
}

/// Projected Levenberg-Marquardt on the residuals, followed by polishing of
/// the equality residuals once every atom holds.
fn levenberg_marquardt(
    conj: &Conjunction,
    gv: &[u32],
    mut x: Vec<f64>,
    scale: f64,
    upper: f64,
    opts: &BackendOptions,
) -> Option<Vec<f64>> {
    let tol = opts.tol.atom;
    let margin = 4.0 * tol;
    let k = gv.len();
    let nv = x.len();
    let mut grad = vec![0.0; nv];
    let mut jac = Vec::new();
    let mut r = residuals(conj, gv, &x, scale, margin, &mut jac, &mut grad);
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    let mut stalled = 0;
    for _ in 0..opts.max_iterations {
        let holds = conj.iter().all(|a| a.holds(&x, scale, tol));
        if holds && (c < 1e-28 || stalled >= 6) {
            return Some(x);
        }
        let m = r.len();
        let mut jtj = vec![0.0; k * k];
        let mut jtr = vec![0.0; k];
        for row in 0..m {
            let jr = &jac[row * k..(row + 1) * k];
            for a in 0..k {
                jtr[a] += jr[a] * r[row];
                for b in 0..k {
                    jtj[a * k + b] += jr[a] * jr[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut sys = jtj.clone();
            for a in 0..k {
                sys[a * k + a] += lambda * (jtj[a * k + a] + 1e-12);
            }
            let neg: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let Some(step) = cholesky_solve(k, &sys, &neg) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = x.clone();
            for (a, &v) in gv.iter().enumerate() {
                trial[v as usize] = (x[v as usize] + step[a] * scale).clamp(0.0, upper);
            }
            let mut tj = Vec::new();
            let tr = residuals(conj, gv, &trial, scale, margin, &mut tj, &mut grad);
            let tc = cost(&tr);
            if tc < c {
                stalled = if tc > 0.5 * c { stalled + 1 } else { 0 };
                x = trial;
                r = tr;
                jac = tj;
                c = tc;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    if conj.iter().all(|a| a.holds(&x, scale, tol)) {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::formula::Indeterminates;
    use crate::poly::polynomial::Polynomial;

    fn problem(formula: Formula, vars: usize) -> Problem {
        let pairs: Vec<(usize, usize)> = (0..vars).map(|k| (k, k + 1)).collect();
        Problem {
            formula,
            vars: Indeterminates::new(&pairs[..vars], false),
            scale: 1.0,
        }
    }

    #[test]
    fn constants() {
        let opts = BackendOptions::default();
        assert_eq!(
            decide_exists(&problem(Formula::Const(true), 0), &opts),
            Decision::Sat(vec![])
        );
        assert_eq!(
            decide_exists(&problem(Formula::Const(false), 0), &opts),
            Decision::Unsat
        );
        let false_atom = Formula::Atom(Atom {
            polynomial: Polynomial::constant(-1.0),
            relation: Relation::Ge,
            degree: 0,
        });
        assert_eq!(
            decide_exists(&problem(false_atom, 0), &opts),
            Decision::Unsat
        );
    }

    #[test]
    fn linear_equation() {
        let lhs = Polynomial::variable(0)
            .scale(2.0)
            .add(&Polynomial::constant(-6.0));
        let f = Formula::And(vec![
            Formula::Atom(Atom {
                polynomial: lhs,
                relation: Relation::Eq,
                degree: 1,
            }),
            Formula::Atom(Atom {
                polynomial: Polynomial::variable(0),
                relation: Relation::Ge,
                degree: 1,
            }),
        ]);
        let mut p = problem(f, 1);
        p.scale = 3.0;
        match decide_exists(&p, &BackendOptions::default()) {
            Decision::Sat(x) => assert!((x[0] - 3.0).abs() < 1e-10),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn interval_refutes_with_sound_box() {
        // z^2 + 1 = 0 has no real root
        let mut poly = Polynomial::variable(0).mul_var(0);
        poly = poly.add(&Polynomial::constant(1.0));
        let f = Formula::Atom(Atom {
            polynomial: poly,
            relation: Relation::Eq,
            degree: 2,
        });
        let p = problem(f, 1);
        let unsound = decide_exists(&p, &BackendOptions::default());
        assert_eq!(unsound, Decision::Unknown);
        let opts = BackendOptions {
            sound_upper: Some(vec![Some(10.0)]),
            ..BackendOptions::default()
        };
        assert_eq!(decide_exists(&p, &opts), Decision::Unsat);
    }
}
