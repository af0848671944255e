//! Exact integer / rational dense matrices.
//!
//! Everything a lattice needs to be *provably* right at 2^36 scale runs
//! through this module: determinants, inverses, Hermite and Smith normal
//! forms, and LLL reduction, all in exact arithmetic. Floating point never
//! enters here.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense matrix of exact rationals, row-major. Rows are lattice basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

impl RatMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut m = RatMat::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        RatMat::from_fn(r, c, |i, j| BigRational::from(BigInt::from(rows[i][j])))
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        let mut out = RatMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a * &other[(k, j)];
                    out[(i, j)] += p;
                }
            }
        }
        out
    }

    /// Exact determinant by fraction-preserving Gaussian elimination.
    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = BigRational::one();
        for k in 0..n {
            let pivot = (k..n).find(|&i| !a[(i, k)].is_zero());
            let Some(p) = pivot else {
                return BigRational::zero();
            };
            if p != k {
                a.swap_rows(p, k);
                det = -det;
            }
            det *= a[(k, k)].clone();
            let inv = a[(k, k)].recip();
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let factor = &a[(i, k)] * &inv;
                for j in k..n {
                    let sub = &factor * &a[(k, j)];
                    a[(i, j)] -= sub;
                }
            }
        }
        det
    }

    /// Exact inverse via Gauss-Jordan. Returns `None` when singular.
    pub fn inverse(&self) -> Option<RatMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMat::identity(n);
        for k in 0..n {
            let p = (k..n).find(|&i| !a[(i, k)].is_zero())?;
            if p != k {
                a.swap_rows(p, k);
                inv.swap_rows(p, k);
            }
            let piv_inv = a[(k, k)].recip();
            for j in 0..n {
                a[(k, j)] *= &piv_inv;
                inv[(k, j)] *= &piv_inv;
            }
            for i in 0..n {
                if i == k || a[(i, k)].is_zero() {
                    continue;
                }
                let factor = a[(i, k)].clone();
                for j in 0..n {
                    let s = &factor * &a[(k, j)];
                    a[(i, j)] -= s;
                    let s = &factor * &inv[(k, j)];
                    inv[(i, j)] -= s;
                }
            }
        }
        Some(inv)
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            let a = i * self.cols + c;
            let b = j * self.cols + c;
            self.data.swap(a, b);
        }
    }

    /// True when every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn to_int(&self) -> Option<IntMat> {
        if !self.is_integral() {
            return None;
        }
        Some(IntMat::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].to_integer()
        }))
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| rational_to_f64(&self[(i, j)]))
                    .collect()
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for RatMat {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    // num_rational has no direct conversion for BigRational; go through a
    // scaled integer division to keep 53 bits of precision.
    let num = x.numer();
    let den = x.denom();
    if num.is_zero() {
        return 0.0;
    }
    let shift = 64i64;
    let scaled: BigInt = (num << shift) / den;
    let mut approx = 0.0f64;
    let (sign, digits) = scaled.to_u64_digits();
    for (k, d) in digits.iter().enumerate() {
        approx += (*d as f64) * 2f64.powi(64 * k as i32);
    }
    if sign == num_bigint::Sign::Minus {
        approx = -approx;
    }
    approx * 2f64.powi(-(shift as i32))
}

/// Dense matrix of exact integers, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = IntMat::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        IntMat::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat::from_fn(self.rows, self.cols, |i, j| {
            BigRational::from(self[(i, j)].clone())
        })
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a * &other[(k, j)];
                    out[(i, j)] += p;
                }
            }
        }
        out
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        (0..self.cols).all(|j| self[(i, j)].is_zero())
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            let a = i * self.cols + c;
            let b = j * self.cols + c;
            self.data.swap(a, b);
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            let a = r * self.cols + i;
            let b = r * self.cols + j;
            self.data.swap(a, b);
        }
    }

    /// row[i] += c * row[k]
    pub fn add_row_multiple(&mut self, i: usize, k: usize, c: &BigInt) {
        assert_ne!(i, k);
        for j in 0..self.cols {
            let add = c * &self[(k, j)];
            self[(i, j)] += add;
        }
    }

    /// col[j] += c * col[k]
    pub fn add_col_multiple(&mut self, j: usize, k: usize, c: &BigInt) {
        assert_ne!(j, k);
        for i in 0..self.rows {
            let add = c * &self[(i, k)];
            self[(i, j)] += add;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_i64()).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Row-style Hermite normal form of a generating set.
///
/// Input rows may be redundant; the result is a full set of independent rows
/// spanning the same integer row space (zero rows removed), in row echelon
/// form with positive pivots.
pub fn hnf_row_basis(gen: &IntMat) -> IntMat {
    let mut a = gen.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        // Euclidean elimination: leave a single nonzero entry in this column
        // among rows >= pivot_row.
        loop {
            let mut nonzero: Vec<usize> = (pivot_row..rows)
                .filter(|&i| !a[(i, col)].is_zero())
                .collect();
            if nonzero.len() <= 1 {
                break;
            }
            nonzero.sort_by_key(|&i| a[(i, col)].abs());
            let small = nonzero[0];
            for &i in &nonzero[1..] {
                let q = &a[(i, col)] / &a[(small, col)];
                let neg_q = -q;
                a.add_row_multiple(i, small, &neg_q);
            }
        }
        if let Some(nz) = (pivot_row..rows).find(|&i| !a[(i, col)].is_zero()) {
            a.swap_rows(pivot_row, nz);
            if a[(pivot_row, col)].is_negative() {
                a.negate_row(pivot_row);
            }
            // Reduce entries above the pivot into canonical range [0, pivot).
            for i in 0..pivot_row {
                let q = a[(i, col)].div_floor(&a[(pivot_row, col)]);
                if !q.is_zero() {
                    let neg_q = -q;
                    a.add_row_multiple(i, pivot_row, &neg_q);
                }
            }
            pivot_row += 1;
        }
    }
    let kept: Vec<usize> = (0..rows).filter(|&i| !a.row_is_zero(i)).collect();
    IntMat::from_fn(kept.len(), cols, |i, j| a[(kept[i], j)].clone())
}

/// Smith normal form `A = U * D * V` of a square integer matrix.
///
/// `U` and `V` are unimodular; `D` is diagonal with `d[i]` dividing `d[i+1]`
/// and nonnegative. `v_inv` is the exact inverse of `V`, and `u_inv` of `U`,
/// both tracked during reduction rather than recomputed.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: IntMat,
    pub d: Vec<BigInt>,
    pub v: IntMat,
    pub u_inv: IntMat,
    pub v_inv: IntMat,
}

pub fn smith_normal_form(a: &IntMat) -> Smith {
    assert_eq!(a.rows, a.cols, "Smith reduction restricted to square input");
    let n = a.rows;
    let mut b = a.clone();
    // Invariant maintained throughout: a = u * b * v.
    let mut u = IntMat::identity(n);
    let mut v = IntMat::identity(n);
    let mut u_inv = IntMat::identity(n);
    let mut v_inv = IntMat::identity(n);

    // Row op b <- E*b pairs with u <- u*E^{-1} (and u_inv <- E*u_inv);
    // col op b <- b*E pairs with v <- E^{-1}*v (and v_inv <- v_inv*E).
    for k in 0..n {
        'pivot: loop {
            // Smallest nonzero entry in the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if b[(i, j)].is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if b[(bi, bj)].abs() <= b[(i, j)].abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break 'pivot; // trailing block all zero
            };
            if pi != k {
                b.swap_rows(pi, k);
                u.swap_cols(pi, k);
                u_inv.swap_rows(pi, k);
            }
            if pj != k {
                b.swap_cols(pj, k);
                v.swap_rows(pj, k);
                v_inv.swap_cols(pj, k);
            }
            if b[(k, k)].is_negative() {
                b.negate_row(k);
                u.negate_col(k);
                u_inv.negate_row(k);
            }

            let mut dirty = false;
            for i in k + 1..n {
                if b[(i, k)].is_zero() {
                    continue;
                }
                let q = div_round(&b[(i, k)], &b[(k, k)]);
                if !q.is_zero() {
                    let neg_q = -&q;
                    b.add_row_multiple(i, k, &neg_q);
                    u.add_col_multiple(k, i, &q);
                    u_inv.add_row_multiple(i, k, &neg_q);
                }
                if !b[(i, k)].is_zero() {
                    dirty = true;
                }
            }
            for j in k + 1..n {
                if b[(k, j)].is_zero() {
                    continue;
                }
                let q = div_round(&b[(k, j)], &b[(k, k)]);
                if !q.is_zero() {
                    let neg_q = -&q;
                    b.add_col_multiple(j, k, &neg_q);
                    v.add_row_multiple(k, j, &q);
                    v_inv.add_col_multiple(j, k, &neg_q);
                }
                if !b[(k, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'pivot;
            }

            // Divisibility: the pivot must divide every trailing entry.
            for i in k + 1..n {
                for j in k + 1..n {
                    if (&b[(i, j)] % &b[(k, k)]).is_zero() {
                        continue;
                    }
                    // Fold row i into row k and retry the pivot search.
                    let one = BigInt::one();
                    let neg_one = -&one;
                    b.add_row_multiple(k, i, &one);
                    u.add_col_multiple(i, k, &neg_one);
                    u_inv.add_row_multiple(k, i, &one);
                    continue 'pivot;
                }
            }
            break 'pivot;
        }
    }

    let d: Vec<BigInt> = (0..n).map(|i| b[(i, i)].clone()).collect();
    Smith {
        u,
        d,
        v,
        u_inv,
        v_inv,
    }
}

/// Round-to-nearest integer division (ties toward even quotient magnitude not
/// required; any fixed choice keeps remainders at most half the divisor).
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    // r in [0, |b|) for positive b (pivots are made positive before use).
    let twice: BigInt = &r * 2;
    if twice.abs() > b.abs() {
        q + 1
    } else {
        q
    }
}

/// Exact LLL reduction (delta = 3/4) of a full-rank rational basis.
///
/// Returns the reduced basis together with the unimodular transform `t`
/// such that `reduced = t * basis`.
pub fn lll_reduce(basis: &RatMat) -> (RatMat, IntMat) {
    let n = basis.rows;
    let mut b = basis.clone();
    let mut t = IntMat::identity(n);
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));

    // Gram-Schmidt data, recomputed incrementally.
    let mut mu = RatMat::zero(n, n);
    let mut norms: Vec<BigRational> = vec![BigRational::zero(); n];
    let mut gso_rows: Vec<Vec<BigRational>> = vec![Vec::new(); n];

    let compute_gso = |b: &RatMat,
                       mu: &mut RatMat,
                       norms: &mut Vec<BigRational>,
                       gso: &mut Vec<Vec<BigRational>>,
                       upto: usize| {
        for i in 0..=upto {
            let mut star: Vec<BigRational> = b.row(i).to_vec();
            for j in 0..i {
                let dot = dot_rat(b.row(i), &gso[j]);
                let m = &dot / &norms[j];
                for (s, g) in star.iter_mut().zip(gso[j].iter()) {
                    *s -= &m * g;
                }
                mu[(i, j)] = m;
            }
            norms[i] = dot_rat(&star, &star);
            gso[i] = star;
        }
    };

    compute_gso(&b, &mut mu, &mut norms, &mut gso_rows, n - 1);

    let mut k = 1;
    while k < n {
        // Size reduction of row k against rows k-1 .. 0.
        for j in (0..k).rev() {
            let half = BigRational::new(BigInt::from(1), BigInt::from(2));
            if mu[(k, j)].abs() > half {
                let q = round_rat(&mu[(k, j)]);
                for c in 0..b.cols {
                    let s = BigRational::from(q.clone()) * &b[(j, c)];
                    b[(k, c)] -= s;
                }
                let neg_q = -&q;
                t.add_row_multiple(k, j, &neg_q);
                compute_gso(&b, &mut mu, &mut norms, &mut gso_rows, k);
            }
        }
        // Lovász condition.
        let lhs = &norms[k];
        let rhs = (&delta - &mu[(k, k - 1)] * &mu[(k, k - 1)]) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            b.swap_rows(k, k - 1);
            t.swap_rows(k, k - 1);
            compute_gso(&b, &mut mu, &mut norms, &mut gso_rows, k);
            k = k.max(2) - 1;
        }
    }
    (b, t)
}

fn dot_rat(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b.iter())
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

fn round_rat(x: &BigRational) -> BigInt {
    let two = BigInt::from(2);
    let num = x.numer() * &two;
    let den = x.denom() * &two;
    // floor((2a + b) / 2b) rounds to nearest with half-up.
    (num + x.denom()).div_floor(&den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(rows: &[Vec<i64>]) -> IntMat {
        IntMat::from_i64_rows(rows)
    }

    #[test]
    fn det_and_inverse_2x2() {
        let m = RatMat::from_i64_rows(&[vec![2, 0], vec![1, 2]]);
        assert_eq!(m.det(), BigRational::from(BigInt::from(4)));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RatMat::identity(2));
    }

    #[test]
    fn det_singular() {
        let m = RatMat::from_i64_rows(&[vec![1, 2], vec![2, 4]]);
        assert!(m.det().is_zero());
        assert!(m.inverse().is_none());
    }

    #[test]
    fn hnf_collapses_redundant_generators() {
        // Rows generate 2Z x 2Z with redundancy.
        let g = int(&[vec![2, 0], vec![0, 2], vec![2, 2], vec![4, 0]]);
        let h = hnf_row_basis(&g);
        assert_eq!(h.rows, 2);
        let det = h.to_rat().det();
        assert_eq!(det.abs(), BigRational::from(BigInt::from(4)));
    }

    #[test]
    fn smith_diagonal_already() {
        let a = int(&[vec![4, 0], vec![0, 4]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.d, vec![BigInt::from(4), BigInt::from(4)]);
        check_smith(&a, &s);
    }

    #[test]
    fn smith_of_sheared_basis() {
        let a = int(&[vec![2, 0], vec![1, 2]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.d, vec![BigInt::from(1), BigInt::from(4)]);
        check_smith(&a, &s);
    }

    #[test]
    fn smith_known_4x4() {
        let a = int(&[
            vec![-6, 111, -36, 6],
            vec![5, -672, 210, 74],
            vec![0, -255, 81, 24],
            vec![-7, 255, -81, -10],
        ]);
        let s = smith_normal_form(&a);
        assert_eq!(
            s.d,
            vec![
                BigInt::from(1),
                BigInt::from(3),
                BigInt::from(21),
                BigInt::from(0)
            ]
        );
        check_smith(&a, &s);
    }

    fn check_smith(a: &IntMat, s: &Smith) {
        let n = a.rows;
        let d = IntMat::from_fn(n, n, |i, j| {
            if i == j {
                s.d[i].clone()
            } else {
                BigInt::zero()
            }
        });
        assert_eq!(s.u.mul(&d).mul(&s.v), *a, "U*D*V must reproduce the input");
        assert_eq!(s.u.mul(&s.u_inv), IntMat::identity(n));
        assert_eq!(s.v.mul(&s.v_inv), IntMat::identity(n));
        let det_u = s.u.to_rat().det();
        let det_v = s.v.to_rat().det();
        assert_eq!(det_u.abs(), BigRational::one(), "U unimodular");
        assert_eq!(det_v.abs(), BigRational::one(), "V unimodular");
        for w in s.d.windows(2) {
            if !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "divisibility chain");
            }
        }
    }

    #[test]
    fn lll_transform_is_exact() {
        let basis = RatMat::from_i64_rows(&[vec![1, 1, 1], vec![-1, 0, 2], vec![3, 5, 6]]);
        let (red, t) = lll_reduce(&basis);
        assert_eq!(t.to_rat().mul(&basis), red, "reduced = T * basis");
        assert_eq!(t.to_rat().det().abs(), BigRational::one());
        // Same lattice volume.
        assert_eq!(red.det().abs(), basis.det().abs());
    }

    #[test]
    fn rational_f64_conversion() {
        let x = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert!((rational_to_f64(&x) - 1.0 / 3.0).abs() < 1e-15);
        let y = BigRational::new(BigInt::from(-7), BigInt::from(2));
        assert_eq!(rational_to_f64(&y), -3.5);
    }
}
