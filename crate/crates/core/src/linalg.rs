//! Dense exact linear algebra over any [`Scalar`] field: reduced row
//! echelon form, kernels, solving, subspaces and quotient spaces with
//! stored representatives.  Everything is deterministic: pivots are chosen
//! left to right unless an explicit column order is given.

use crate::scalar::Scalar;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<S> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix<S> {
        let mut t = Matrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out: Matrix<S> = Matrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).clone() + a.clone() * b.clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..self.cols {
                    if !self.get(i, j).is_zero() && !v[j].is_zero() {
                        acc = acc + self.get(i, j).clone() * v[j].clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// In-place reduced row echelon form with pivot columns tried in the
    /// given order; returns the pivot columns in elimination order.
    pub fn rref_in_order(&mut self, col_order: &[usize]) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for &c in col_order {
            if next_row >= self.rows {
                break;
            }
            let mut pr = None;
            for r in next_row..self.rows {
                if !self.get(r, c).is_zero() {
                    pr = Some(r);
                    break;
                }
            }
            let Some(pr) = pr else { continue };
            self.swap_rows(next_row, pr);
            let inv = self.get(next_row, c).inv();
            for j in 0..self.cols {
                let v = self.get(next_row, j).clone() * inv.clone();
                self.set(next_row, j, v);
            }
            for r in 0..self.rows {
                if r == next_row || self.get(r, c).is_zero() {
                    continue;
                }
                let f = self.get(r, c).clone();
                for j in 0..self.cols {
                    let v = self.get(r, j).clone() - f.clone() * self.get(next_row, j).clone();
                    self.set(r, j, v);
                }
            }
            pivots.push(c);
            next_row += 1;
        }
        pivots
    }

    pub fn rref(&mut self) -> Vec<usize> {
        let order: Vec<usize> = (0..self.cols).collect();
        self.rref_in_order(&order)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel {x : Ax = 0}.
    pub fn kernel(&self) -> Vec<Vec<S>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = Some(i);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut x = vec![S::zero(); self.cols];
            x[free] = S::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -m.get(i, free).clone();
            }
            basis.push(x);
        }
        basis
    }

    /// One solution of Ax = b (free variables zero), if consistent.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        let order: Vec<usize> = (0..self.cols).collect();
        self.solve_in_order(b, &order)
    }

    /// Solve with pivot columns tried in the given order; different orders
    /// produce different particular solutions.
    pub fn solve_in_order(&self, b: &[S], col_order: &[usize]) -> Option<Vec<S>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zero(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let pivots = aug.rref_in_order(col_order);
        // inconsistent iff a pivot appears in the last column
        for r in 0..self.rows {
            if (0..self.cols).all(|c| aug.get(r, c).is_zero()) && !aug.get(r, self.cols).is_zero() {
                return None;
            }
        }
        let mut x = vec![S::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = aug.get(i, self.cols).clone();
        }
        Some(x)
    }

    /// Determinant by fraction elimination (square matrices).
    pub fn det(&self) -> S {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = self.rows;
        let mut det = S::one();
        for c in 0..n {
            let mut pr = None;
            for r in c..n {
                if !m.get(r, c).is_zero() {
                    pr = Some(r);
                    break;
                }
            }
            let Some(pr) = pr else { return S::zero() };
            if pr != c {
                m.swap_rows(c, pr);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = det * piv.clone();
            let inv = piv.inv();
            for r in c + 1..n {
                if m.get(r, c).is_zero() {
                    continue;
                }
                let f = m.get(r, c).clone() * inv.clone();
                for j in c..n {
                    let v = m.get(r, j).clone() - f.clone() * m.get(c, j).clone();
                    m.set(r, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix<S>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zero(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, S::one());
        }
        let order: Vec<usize> = (0..n).collect();
        let pivots = aug.rref_in_order(&order);
        if pivots.len() != n {
            return None;
        }
        let mut out = Matrix::zero(n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, aug.get(r, n + c).clone());
            }
        }
        Some(out)
    }
}

/// A subspace of k^n held in reduced row echelon form.
#[derive(Debug, Clone)]
pub struct Subspace<S> {
    pub ambient: usize,
    rows: Vec<Vec<S>>,
    pivots: Vec<usize>,
}

impl<S: Scalar> Subspace<S> {
    pub fn empty(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: vec![],
            pivots: vec![],
        }
    }

    pub fn full(ambient: usize) -> Self {
        let mut s = Subspace::empty(ambient);
        for i in 0..ambient {
            let mut v = vec![S::zero(); ambient];
            v[i] = S::one();
            s.insert(v);
        }
        s
    }

    pub fn from_spanning(ambient: usize, vecs: impl IntoIterator<Item = Vec<S>>) -> Self {
        let mut s = Subspace::empty(ambient);
        for v in vecs {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.rows
    }

    /// Reduce v modulo the subspace (the unique coset representative with
    /// zeros in the pivot columns).
    pub fn reduce(&self, v: &[S]) -> Vec<S> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for j in 0..self.ambient {
                if !row[j].is_zero() {
                    v[j] = v[j].clone() - f.clone() * row[j].clone();
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[S]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Insert a vector into the spanning set; true if the dimension grew.
    pub fn insert(&mut self, v: Vec<S>) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut v = self.reduce(&v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = x.clone() * inv.clone();
            }
        }
        // clear column p in existing rows to keep RREF
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for j in 0..self.ambient {
                if !v[j].is_zero() {
                    row[j] = row[j].clone() - f.clone() * v[j].clone();
                }
            }
        }
        let at = self.pivots.iter().position(|&x| x > p).unwrap_or(self.pivots.len());
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }

    pub fn sum(&self, other: &Subspace<S>) -> Subspace<S> {
        let mut s = self.clone();
        for v in other.basis() {
            s.insert(v.clone());
        }
        s
    }

    /// Intersection by the Zassenhaus block trick.
    pub fn intersect(&self, other: &Subspace<S>) -> Subspace<S> {
        assert_eq!(self.ambient, other.ambient);
        let n = self.ambient;
        let mut rows = Vec::new();
        for v in self.basis() {
            let mut r = v.clone();
            r.extend(v.iter().cloned());
            rows.push(r);
        }
        for v in other.basis() {
            let mut r = v.clone();
            r.extend(vec![S::zero(); n]);
            rows.push(r);
        }
        if rows.is_empty() {
            return Subspace::empty(n);
        }
        let mut m = Matrix::from_rows(rows);
        m.rref();
        let mut out = Subspace::empty(n);
        for r in 0..m.rows {
            let left_zero = (0..n).all(|c| m.get(r, c).is_zero());
            if left_zero {
                let v: Vec<S> = (n..2 * n).map(|c| m.get(r, c).clone()).collect();
                out.insert(v);
            }
        }
        out
    }

    pub fn is_subspace_of(&self, other: &Subspace<S>) -> bool {
        self.rows.iter().all(|v| other.contains(v))
    }

    /// Coordinates of v in the RREF basis rows, if v lies in the span.
    pub fn coords_of(&self, v: &[S]) -> Option<Vec<S>> {
        let mut coords = vec![S::zero(); self.rows.len()];
        let mut rem = v.to_vec();
        for (i, (row, &p)) in self.rows.iter().zip(&self.pivots).enumerate() {
            if rem[p].is_zero() {
                continue;
            }
            let f = rem[p].clone();
            for j in 0..self.ambient {
                if !row[j].is_zero() {
                    rem[j] = rem[j].clone() - f.clone() * row[j].clone();
                }
            }
            coords[i] = f;
        }
        if rem.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn equals(&self, other: &Subspace<S>) -> bool {
        self.dim() == other.dim() && self.is_subspace_of(other)
    }
}

/// A quotient V/W of spans, with stored representative lifts.
#[derive(Debug, Clone)]
pub struct Quotient<S> {
    pub ambient: usize,
    den: Subspace<S>,
    /// Representatives reduced mod den, in RREF.
    reps: Subspace<S>,
}

impl<S: Scalar> Quotient<S> {
    pub fn new(num: &Subspace<S>, den: &Subspace<S>) -> Self {
        assert_eq!(num.ambient, den.ambient);
        let mut reps = Subspace::empty(num.ambient);
        for v in num.basis() {
            reps.insert(den.reduce(v));
        }
        Quotient {
            ambient: num.ambient,
            den: den.clone(),
            reps,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.dim()
    }

    pub fn den(&self) -> &Subspace<S> {
        &self.den
    }

    pub fn rep(&self, i: usize) -> &[S] {
        &self.reps.basis()[i]
    }

    /// Class coordinates of an ambient vector, if it lies in num + den.
    pub fn coords(&self, v: &[S]) -> Option<Vec<S>> {
        let red = self.den.reduce(v);
        let mut coords = vec![S::zero(); self.dim()];
        let mut rem = red;
        for (i, row) in self.reps.basis().iter().enumerate() {
            let p = self.reps.pivots[i];
            if rem[p].is_zero() {
                continue;
            }
            let f = rem[p].clone();
            for j in 0..self.ambient {
                if !row[j].is_zero() {
                    rem[j] = rem[j].clone() - f.clone() * row[j].clone();
                }
            }
            coords[i] = f;
        }
        if rem.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn is_zero_class(&self, v: &[S]) -> bool {
        self.den.contains(v)
    }
}

/// An ordered basis labelled by keys, with reverse lookup.
#[derive(Debug, Clone)]
pub struct Basis<K: Ord + Clone> {
    keys: Vec<K>,
    index: BTreeMap<K, usize>,
}

impl<K: Ord + Clone> Basis<K> {
    pub fn new(keys: Vec<K>) -> Self {
        let index = keys
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();
        Basis { keys, index }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, i: usize) -> &K {
        &self.keys[i]
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn index_of(&self, k: &K) -> Option<usize> {
        self.index.get(k).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::RatFunc;
    use num_traits::{One, Zero};

    fn rf(s: &str) -> RatFunc {
        crate::qfield::parse_ratfunc(s).unwrap()
    }

    #[test]
    fn rref_and_rank() {
        let m = Matrix::from_rows(vec![
            vec![rf("1"), rf("q")],
            vec![rf("q"), rf("q^2")],
        ]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn solve_and_inverse() {
        let m = Matrix::from_rows(vec![
            vec![rf("1"), rf("q")],
            vec![rf("0"), rf("q+1")],
        ]);
        let b = vec![rf("q^2"), rf("q+1")];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert_eq!(m.det(), rf("q+1"));
    }

    #[test]
    fn subspace_quotient() {
        let a = Subspace::from_spanning(
            3,
            vec![
                vec![RatFunc::one(), RatFunc::zero(), RatFunc::zero()],
                vec![RatFunc::zero(), RatFunc::one(), RatFunc::zero()],
            ],
        );
        let b = Subspace::from_spanning(
            3,
            vec![vec![RatFunc::one(), RatFunc::one(), RatFunc::zero()]],
        );
        assert!(b.is_subspace_of(&a));
        let q = Quotient::new(&a, &b);
        assert_eq!(q.dim(), 1);
        let i = a.intersect(&b);
        assert_eq!(i.dim(), 1);
    }
}
