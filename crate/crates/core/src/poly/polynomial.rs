use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

/// Sorted multiset of variable ids.
pub type Monomial = Vec<u32>;

/// Sparse real polynomial in nonnegative variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, f64>,
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn variable(id: u32) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(vec![id], 1.0);
        p
    }

    pub fn add_term(&mut self, mono: Monomial, coef: f64) {
        if coef == 0.0 {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(coef);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for constants and the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    /// Value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => self.terms.get(&Vec::new()).copied(),
            _ => None,
        }
    }

    /// Distinct variable ids, ascending.
    pub fn variables(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in self.terms() {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    /// Product with the single variable `id`.
    pub fn mul_var(&self, id: u32) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in self.terms() {
            let mut mono = m.clone();
            let at = mono.partition_point(|&v| v <= id);
            mono.insert(at, id);
            out.add_term(mono, c);
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms()
            .map(|(m, c)| m.iter().fold(c, |acc, &v| acc * x[v as usize]))
            .sum()
    }

    /// Value and gradient (dense over `x.len()` variables).
    pub fn eval_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        for g in grad.iter_mut() {
            *g = 0.0;
        }
        let mut value = 0.0;
        for (m, c) in self.terms() {
            value += m.iter().fold(c, |acc, &v| acc * x[v as usize]);
            for k in 0..m.len() {
                if k > 0 && m[k] == m[k - 1] {
                    continue;
                }
                // d/dx_v of x_v^e is e x_v^{e-1}
                let mult = m.iter().filter(|&&v| v == m[k]).count() as f64;
                let mut skipped = false;
                let mut p = c * mult;
                for &v in m {
                    if v == m[k] && !skipped {
                        skipped = true;
                        continue;
                    }
                    p *= x[v as usize];
                }
                grad[m[k] as usize] += p;
            }
        }
        value
    }

    /// Enclosure of the range over a box of nonnegative intervals, widened
    /// outward by a relative rounding margin.
    pub fn eval_interval(&self, boxes: &[Interval]) -> Interval {
        let mut lo = 0.0;
        let mut hi = 0.0;
        let mut mag = 0.0;
        for (m, c) in self.terms() {
            let mut a = 1.0;
            let mut b = 1.0;
            for &v in m {
                a *= boxes[v as usize].lo;
                b *= boxes[v as usize].hi;
            }
            if c >= 0.0 {
                lo += c * a;
                hi += c * b;
            } else {
                lo += c * b;
                hi += c * a;
            }
            mag += libm::fabs(c) * b;
        }
        let pad = 1e-12 * mag + f64::MIN_POSITIVE;
        Interval::new(lo - pad, hi + pad)
    }
}

/// Entry of a symbolic matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Const(f64),
    Var(u32),
}

/// Determinant of a `k x k` matrix of constants and single variables by
/// Laplace expansion along rows, memoised over the set of remaining columns.
pub fn symbolic_determinant(k: usize, a: &[Cell]) -> Polynomial {
    assert!(k <= 20, "symbolic determinant is limited to order 20");
    if k == 0 {
        return Polynomial::constant(1.0);
    }
    let full: u32 = (1u32 << k) - 1;
    let mut memo: BTreeMap<u32, Polynomial> = BTreeMap::new();
    minor(k, a, full, &mut memo)
}

fn minor(k: usize, a: &[Cell], cols: u32, memo: &mut BTreeMap<u32, Polynomial>) -> Polynomial {
    let used = k - cols.count_ones() as usize;
    if used == k {
        return Polynomial::constant(1.0);
    }
    if let Some(p) = memo.get(&cols) {
        return p.clone();
    }
    let row = used;
    let mut out = Polynomial::zero();
    let mut sign = 1.0;
    for c in 0..k {
        if cols & (1 << c) == 0 {
            continue;
        }
        let e = a[row * k + c];
        if e != Cell::Const(0.0) {
            let sub = minor(k, a, cols & !(1 << c), memo);
            let term = match e {
                Cell::Const(v) => sub.scale(v * sign),
                Cell::Var(id) => sub.mul_var(id).scale(sign),
            };
            out = out.add(&term);
        }
        sign = -sign;
    }
    memo.insert(cols, out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_constants() {
        let a = [
            Cell::Const(2.0),
            Cell::Const(1.0),
            Cell::Const(0.0),
            Cell::Const(1.0),
            Cell::Const(3.0),
            Cell::Const(1.0),
            Cell::Const(0.0),
            Cell::Const(1.0),
            Cell::Const(4.0),
        ];
        let p = symbolic_determinant(3, &a);
        assert_eq!(p.as_constant(), Some(18.0));
    }

    #[test]
    fn bordered_pair_is_two_z() {
        let a = [
            Cell::Const(0.0),
            Cell::Const(1.0),
            Cell::Const(1.0),
            Cell::Const(1.0),
            Cell::Const(0.0),
            Cell::Var(0),
            Cell::Const(1.0),
            Cell::Var(0),
            Cell::Const(0.0),
        ];
        let p = symbolic_determinant(3, &a);
        assert_eq!(p, Polynomial::variable(0).scale(2.0));
    }

    #[test]
    fn gradient_matches_differences() {
        let mut p = Polynomial::zero();
        p.add_term(vec![0, 0, 1], 3.0);
        p.add_term(vec![1], -2.0);
        p.add_term(vec![], 5.0);
        let x = [1.5, 0.7];
        let mut g = [0.0; 2];
        let v = p.eval_grad(&x, &mut g);
        assert!((v - p.eval(&x)).abs() < 1e-14);
        for i in 0..2 {
            let h = 1e-6;
            let mut xp = x;
            xp[i] += h;
            let mut xm = x;
            xm[i] -= h;
            let fd = (p.eval(&xp) - p.eval(&xm)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6, "{} vs {}", fd, g[i]);
        }
    }

    #[test]
    fn interval_encloses_samples() {
        let mut p = Polynomial::zero();
        p.add_term(vec![0, 1], -1.0);
        p.add_term(vec![0], 2.0);
        let b = [Interval::new(0.0, 2.0), Interval::new(1.0, 3.0)];
        let r = p.eval_interval(&b);
        for i in 0..=10 {
            for j in 0..=10 {
                let x = [2.0 * i as f64 / 10.0, 1.0 + 2.0 * j as f64 / 10.0];
                let v = p.eval(&x);
                assert!(r.lo <= v && v <= r.hi);
            }
        }
    }
}
