use alloc::vec;
use alloc::vec::Vec;

use super::polynomial::{symbolic_determinant, Cell, Polynomial};
use super::PolyError;
use crate::chordal::{is_chordal, maximal_cliques_chordal, Chordality, FillIn};
use crate::embed::{metric_basis_on, EdmError};
use crate::matrix::PartialMatrix;
use crate::tolerance::Tolerances;

/// Indeterminates standing for unspecified entries. By default one variable
/// per unordered pair; with `split` the two orientations get separate
/// variables tied by equality atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Indeterminates {
    pairs: Vec<(usize, usize)>,
    split: bool,
}

impl Indeterminates {
    /// Variables for the given pairs (normalised to `u < v`, deduplicated).
    pub fn new(pairs: &[(usize, usize)], split: bool) -> Self {
        let mut p: Vec<(usize, usize)> = pairs.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        p.sort_unstable();
        p.dedup();
        Indeterminates { pairs: p, split }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn is_split(&self) -> bool {
        self.split
    }

    pub fn len(&self) -> usize {
        if self.split {
            2 * self.pairs.len()
        } else {
            self.pairs.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.pairs.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// Variable for the ordered entry `(u, v)`.
    pub fn id(&self, u: usize, v: usize) -> Option<u32> {
        let k = self.pairs.binary_search(&(u.min(v), u.max(v))).ok()?;
        Some(if self.split {
            (2 * k + usize::from(u > v)) as u32
        } else {
            k as u32
        })
    }

    /// Unordered pair a variable stands for.
    pub fn pair_of(&self, id: u32) -> (usize, usize) {
        let k = id as usize;
        if self.split {
            self.pairs[k / 2]
        } else {
            self.pairs[k]
        }
    }

    /// Value of each unordered pair under an assignment.
    pub fn pair_values(&self, x: &[f64]) -> Vec<((usize, usize), f64)> {
        self.pairs
            .iter()
            .enumerate()
            .map(|(k, &p)| (p, if self.split { x[2 * k] } else { x[k] }))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Gt,
    Ge,
}

/// `polynomial (relation) 0`. `degree` is the homogeneous degree in the
/// matrix entries, used to normalise by `scale^degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub polynomial: Polynomial,
    pub relation: Relation,
    pub degree: usize,
}

impl Atom {
    /// Truth at `x`, with `tol` on the normalised value; strict atoms need a
    /// margin of `tol`.
    pub fn holds(&self, x: &[f64], scale: f64, tol: f64) -> bool {
        let v = self.normalised(self.polynomial.eval(x), scale);
        match self.relation {
            Relation::Eq => libm::fabs(v) <= tol,
            Relation::Gt => v > tol,
            Relation::Ge => v >= -tol,
        }
    }

    pub fn normalised(&self, value: f64, scale: f64) -> f64 {
        value / libm::pow(scale, self.degree as f64)
    }
}

/// Negation-free formula over atoms.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Const(bool),
    Atom(Atom),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn atom_count(&self) -> usize {
        match self {
            Formula::Const(_) => 0,
            Formula::Atom(_) => 1,
            Formula::And(v) | Formula::Or(v) => v.iter().map(Formula::atom_count).sum(),
        }
    }

    /// Distinct variable ids used anywhere, ascending.
    pub fn variables(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<u32>) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(a) => out.extend(a.polynomial.variables()),
            Formula::And(v) | Formula::Or(v) => v.iter().for_each(|f| f.collect_vars(out)),
        }
    }

    pub fn eval(&self, x: &[f64], scale: f64, tol: f64) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Atom(a) => a.holds(x, scale, tol),
            Formula::And(v) => v.iter().all(|f| f.eval(x, scale, tol)),
            Formula::Or(v) => v.iter().any(|f| f.eval(x, scale, tol)),
        }
    }
}

/// Formula together with its variables and the scale atoms are measured in.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub formula: Formula,
    pub vars: Indeterminates,
    pub scale: f64,
}

impl Problem {
    /// Copy of `m` with every variable pair set from `x`.
    pub fn substitute(&self, m: &PartialMatrix, x: &[f64]) -> PartialMatrix {
        let mut out = m.clone();
        for ((u, v), val) in self.vars.pair_values(x) {
            out.set(u, v, val.max(0.0));
        }
        out
    }
}

/// Cayley-Menger determinant of `m[idx]` with unspecified pairs replaced by
/// their indeterminates.
pub fn build_augmented_cm(
    m: &PartialMatrix,
    idx: &[usize],
    vars: &Indeterminates,
) -> Result<Polynomial, PolyError> {
    let k = idx.len() + 1;
    let mut a = vec![Cell::Const(0.0); k * k];
    for r in 1..k {
        a[r] = Cell::Const(1.0);
        a[r * k] = Cell::Const(1.0);
    }
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            if r == c {
                continue;
            }
            a[(r + 1) * k + c + 1] = match vars.id(i, j) {
                Some(id) => Cell::Var(id),
                None => Cell::Const(m.get(i, j).ok_or(PolyError::UnhousedPair { i, j })?),
            };
        }
    }
    Ok(symbolic_determinant(k, &a))
}

fn cm_atom(
    m: &PartialMatrix,
    idx: &[usize],
    vars: &Indeterminates,
    relation: Relation,
    sign: f64,
) -> Result<Formula, PolyError> {
    let p = build_augmented_cm(m, idx, vars)?;
    Ok(Formula::Atom(Atom {
        polynomial: if sign < 0.0 { p.scale(-1.0) } else { p },
        relation,
        degree: idx.len().saturating_sub(1),
    }))
}

/// Atoms asserting that `basis` is a metric basis of the completed
/// `m[clique]` and that the variables in `own` are nonnegative and (in split
/// mode) symmetric.
fn basis_atoms(
    m: &PartialMatrix,
    basis: &[usize],
    clique: &[usize],
    vars: &Indeterminates,
    own: &[(usize, usize)],
) -> Result<Vec<Formula>, PolyError> {
    let mut atoms = Vec::new();
    for j in 1..basis.len() {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        atoms.push(cm_atom(m, &basis[..=j], vars, Relation::Gt, sign)?);
    }
    let rest: Vec<usize> = clique
        .iter()
        .copied()
        .filter(|x| !basis.contains(x))
        .collect();
    let mut set = basis.to_vec();
    for &x in &rest {
        set.push(x);
        atoms.push(cm_atom(m, &set, vars, Relation::Eq, 1.0)?);
        set.pop();
    }
    for (a, &x) in rest.iter().enumerate() {
        for &y in &rest[a + 1..] {
            set.push(x);
            set.push(y);
            atoms.push(cm_atom(m, &set, vars, Relation::Eq, 1.0)?);
            set.pop();
            set.pop();
        }
    }
    for &(u, v) in own {
        let id = vars.id(u, v).expect("pair has a variable");
        atoms.push(Formula::Atom(Atom {
            polynomial: Polynomial::variable(id),
            relation: Relation::Ge,
            degree: 1,
        }));
        if vars.is_split() {
            let back = vars.id(v, u).unwrap();
            atoms.push(Formula::Atom(Atom {
                polynomial: Polynomial::variable(id).add(&Polynomial::variable(back).scale(-1.0)),
                relation: Relation::Eq,
                degree: 1,
            }));
        }
    }
    Ok(atoms)
}

/// Formula asserting that `y` is a metric basis of some completion of `m` in
/// `R^d`; every unspecified pair is a variable.
pub fn build_basis_guess_formula(
    m: &PartialMatrix,
    y: &[usize],
    d: usize,
    split: bool,
) -> Result<Problem, PolyError> {
    let pairs = m.unspecified_pairs();
    let vars = Indeterminates::new(&pairs, split);
    let scale = crate::tolerance::unit_scale(m.max_entry());
    if y.len() > d + 1 || y.is_empty() {
        return Ok(Problem {
            formula: Formula::Const(false),
            vars,
            scale,
        });
    }
    let all: Vec<usize> = (0..m.order()).collect();
    let atoms = basis_atoms(m, y, &all, &vars, vars.pairs())?;
    Ok(Problem {
        formula: Formula::And(atoms),
        vars,
        scale,
    })
}

/// Formula that is satisfiable exactly when `m` has a completion in `R^d`,
/// built over the chordal supergraph `G + fill`. Only the fill pairs are
/// variables.
pub fn build_fillin_formula(
    m: &PartialMatrix,
    fill: &FillIn,
    d: usize,
    split: bool,
    tol: &Tolerances,
) -> Result<Problem, PolyError> {
    let mut g = m.graph();
    for &(u, v) in &fill.edges {
        if m.is_specified(u, v) {
            return Err(PolyError::FillOnSpecified { i: u, j: v });
        }
        g.add_edge(u, v);
    }
    let vars = Indeterminates::new(&fill.edges, split);
    let scale = crate::tolerance::unit_scale(m.max_entry());
    let peo = match is_chordal(&g) {
        Chordality::Chordal(p) => p,
        Chordality::NotChordal(cycle) => return Err(PolyError::NotChordal { cycle }),
    };
    let cliques = maximal_cliques_chordal(&g, &peo)
        .map_err(|_| PolyError::NotChordal { cycle: Vec::new() })?;
    let mut psis = Vec::with_capacity(cliques.len());
    for c in &cliques {
        let own: Vec<(usize, usize)> = vars
            .pairs()
            .iter()
            .copied()
            .filter(|(u, v)| c.binary_search(u).is_ok() && c.binary_search(v).is_ok())
            .collect();
        let mut vx: Vec<usize> = own.iter().flat_map(|&(u, v)| [u, v]).collect();
        vx.sort_unstable();
        vx.dedup();
        let fixed: Vec<usize> = c
            .iter()
            .copied()
            .filter(|u| vx.binary_search(u).is_err())
            .collect();
        let base = match metric_basis_on(m, &fixed, tol) {
            Ok(b) => b.indices,
            Err(EdmError::NotEdm) => {
                return Ok(Problem {
                    formula: Formula::Const(false),
                    vars,
                    scale,
                })
            }
            Err(e) => return Err(e.into()),
        };
        if base.len() > d + 1 {
            return Ok(Problem {
                formula: Formula::Const(false),
                vars,
                scale,
            });
        }
        let room = d + 1 - base.len();
        let mut disjuncts = Vec::new();
        for ysub in subsets_up_to(&vx, room) {
            let mut b = base.clone();
            b.extend(ysub);
            disjuncts.push(Formula::And(basis_atoms(m, &b, c, &vars, &own)?));
        }
        psis.push(Formula::Or(disjuncts));
    }
    Ok(Problem {
        formula: Formula::And(psis),
        vars,
        scale,
    })
}

/// All subsets of `items` with at most `k` elements, by size then
/// lexicographically.
pub fn subsets_up_to(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for size in 1..=k.min(items.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| items[i]).collect());
            let mut pos = size;
            while pos > 0 && idx[pos - 1] == items.len() - size + pos - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            for q in pos..size {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    out
}
