use std::fmt;

use serde::Serialize;

use super::HomologyError;

/// Dense integer matrix with overflow-checked arithmetic.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

fn ov() -> HomologyError {
    HomologyError::Overflow
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds a matrix from rows of equal length.
    pub fn from_rows(rows: &[Vec<i64>]) -> IntMatrix {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Product accumulated in 128 bits, so only the final entries need to
    /// fit in `i64`.
    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, HomologyError> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0i128;
                for k in 0..self.cols {
                    let p = i128::from(self[(i, k)]) * i128::from(other[(k, j)]);
                    acc = acc.checked_add(p).ok_or_else(ov)?;
                }
                out[(i, j)] = i64::try_from(acc).map_err(|_| HomologyError::Overflow)?;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>, HomologyError> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).try_fold(0i64, |acc, (a, b)| {
                    acc.checked_add(a.checked_mul(*b).ok_or_else(ov)?)
                        .ok_or_else(ov)
                })
            })
            .collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    pub fn add_row(&mut self, dst: usize, src: usize, k: i64) -> Result<(), HomologyError> {
        for j in 0..self.cols {
            let p = k.checked_mul(self[(src, j)]).ok_or_else(ov)?;
            self[(dst, j)] = self[(dst, j)].checked_add(p).ok_or_else(ov)?;
        }
        Ok(())
    }

    /// col[dst] += k * col[src]
    pub fn add_col(&mut self, dst: usize, src: usize, k: i64) -> Result<(), HomologyError> {
        for i in 0..self.rows {
            let p = k.checked_mul(self[(i, src)]).ok_or_else(ov)?;
            self[(i, dst)] = self[(i, dst)].checked_add(p).ok_or_else(ov)?;
        }
        Ok(())
    }

    pub fn negate_row(&mut self, i: usize) -> Result<(), HomologyError> {
        for j in 0..self.cols {
            self[(i, j)] = self[(i, j)].checked_neg().ok_or_else(ov)?;
        }
        Ok(())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)] == 0))
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of a Smith normal form computation: `u * m * v == s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Smith {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl Smith {
    fn max_transform_entry(&self) -> u64 {
        self.u
            .data
            .iter()
            .chain(&self.v.data)
            .map(|x| x.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Nonzero diagonal entries, each dividing the next.
    pub fn invariant_factors(&self) -> Vec<i64> {
        (0..self.rank).map(|i| self.s[(i, i)]).collect()
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    i64::try_from(a).unwrap_or(i64::MAX)
}

/// Wide working copy used during elimination.
struct Wide {
    cols: usize,
    data: Vec<i128>,
}

impl Wide {
    fn from(m: &IntMatrix) -> Wide {
        Wide {
            cols: m.cols,
            data: m.data.iter().map(|&x| i128::from(x)).collect(),
        }
    }

    fn identity(n: usize) -> Wide {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Wide { cols: n, data }
    }

    fn at(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    fn rows(&self) -> usize {
        self.data.len() / self.cols.max(1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows() {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    fn add_row(&mut self, dst: usize, src: usize, k: i128) -> Result<(), HomologyError> {
        for j in 0..self.cols {
            let p = k.checked_mul(self.at(src, j)).ok_or_else(ov)?;
            let x = &mut self.data[dst * self.cols + j];
            *x = x.checked_add(p).ok_or_else(ov)?;
        }
        Ok(())
    }

    fn add_col(&mut self, dst: usize, src: usize, k: i128) -> Result<(), HomologyError> {
        for i in 0..self.rows() {
            let p = k.checked_mul(self.at(i, src)).ok_or_else(ov)?;
            let x = &mut self.data[i * self.cols + dst];
            *x = x.checked_add(p).ok_or_else(ov)?;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self.data[i * self.cols + j] = -self.data[i * self.cols + j];
        }
    }

    fn narrow(self, rows: usize) -> Result<IntMatrix, HomologyError> {
        let data = self
            .data
            .into_iter()
            .map(|x| i64::try_from(x).map_err(|_| HomologyError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(IntMatrix {
            rows,
            cols: self.cols,
            data,
        })
    }
}

/// Quotient rounded to nearest, so the remainder is at most half the divisor.
fn nearest_quotient(a: i128, p: i128) -> i128 {
    let mut q = a.div_euclid(p);
    let r = a - q * p;
    if 2 * r > p.abs() {
        q += p.signum();
    }
    q
}

impl Wide {
    fn transpose(&self) -> Wide {
        let rows = self.rows();
        let mut data = vec![0; self.data.len()];
        for i in 0..rows {
            for j in 0..self.cols {
                data[j * rows + i] = self.at(i, j);
            }
        }
        Wide { cols: rows, data }
    }

    fn is_diagonal(&self) -> bool {
        (0..self.rows()).all(|i| (0..self.cols).all(|j| i == j || self.at(i, j) == 0))
    }
}

/// Row-style Hermite form: pivots positive, entries above each pivot
/// reduced into `[0, pivot)`. Row operations are mirrored on `u`.
fn hermite_rows(a: &mut Wide, u: &mut Wide) -> Result<(), HomologyError> {
    let rows = a.rows();
    let mut r = 0;
    for c in 0..a.cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a.at(i, c) != 0) else {
            continue;
        };
        a.swap_rows(r, p);
        u.swap_rows(r, p);
        // Euclid on the column: the smallest entry becomes the pivot and the
        // others are reduced by nearest quotients until they vanish.
        loop {
            let best = (r..rows)
                .filter(|&i| a.at(i, c) != 0)
                .min_by_key(|&i| a.at(i, c).unsigned_abs())
                .expect("column has a nonzero entry");
            a.swap_rows(r, best);
            u.swap_rows(r, best);
            let p = a.at(r, c);
            let mut done = true;
            for i in r + 1..rows {
                let q = nearest_quotient(a.at(i, c), p);
                if q != 0 {
                    a.add_row(i, r, -q)?;
                    u.add_row(i, r, -q)?;
                }
                done &= a.at(i, c) == 0;
            }
            if done {
                break;
            }
        }
        if a.at(r, c) < 0 {
            a.negate_row(r);
            u.negate_row(r);
        }
        let p = a.at(r, c);
        for i in 0..r {
            let q = a.at(i, c).div_euclid(p);
            if q != 0 {
                a.add_row(i, r, -q)?;
                u.add_row(i, r, -q)?;
            }
        }
        r += 1;
    }
    Ok(())
}

/// Smith normal form with both unimodular transforms.
///
/// The reduction is order sensitive, so if the transforms come out large it
/// is retried on the transpose of `m` and on row and column reversals of it.
/// The candidate with the smallest transforms is kept, among those whose
/// products `u * m` and `m * v` still fit in `i64`.
pub fn smith_normal_form(m: &IntMatrix) -> Result<Smith, HomologyError> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut best: Option<(u64, Smith)> = None;
    for variant in 0..6 {
        let transpose = variant % 2 == 1;
        let reverse = variant / 2;
        let p = reversal(rows, reverse == 1);
        let q = reversal(cols, reverse == 2);
        let Ok(candidate) = (|| {
            let pm = p.mul(m)?.mul(&q)?;
            let sm = if transpose {
                let t = smith_core(&pm.transpose())?;
                Smith {
                    u: t.v.transpose(),
                    s: t.s.transpose(),
                    v: t.u.transpose(),
                    rank: t.rank,
                }
            } else {
                smith_core(&pm)?
            };
            let u = sm.u.mul(&p)?;
            let v = q.mul(&sm.v)?;
            u.mul(m)?;
            m.mul(&v)?;
            Ok::<_, HomologyError>(Smith { u, v, ..sm })
        })() else {
            continue;
        };
        let size = candidate.max_transform_entry();
        if best.as_ref().is_none_or(|(b, _)| size < *b) {
            best = Some((size, candidate));
        }
        if size < 1 << 20 {
            break;
        }
    }
    best.map(|(_, s)| s).ok_or(HomologyError::Overflow)
}

/// The identity, or the order-reversing permutation matrix.
fn reversal(n: usize, reverse: bool) -> IntMatrix {
    let mut p = IntMatrix::zeros(n, n);
    for i in 0..n {
        p[(i, if reverse { n - 1 - i } else { i })] = 1;
    }
    p
}

/// Row and column Hermite reductions alternate until the matrix is
/// diagonal, which keeps the transforms small; a final elimination pass
/// enforces the divisibility chain. Work is done in 128-bit arithmetic and
/// results that do not fit back into `i64` are reported as overflow.
fn smith_core(m: &IntMatrix) -> Result<Smith, HomologyError> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = Wide::from(m);
    let mut u = Wide::identity(rows);
    let mut v = Wide::identity(cols);
    if rows > 0 && cols > 0 {
        let mut rounds = 0;
        while !s.is_diagonal() {
            hermite_rows(&mut s, &mut u)?;
            let mut st = s.transpose();
            let mut vt = v.transpose();
            hermite_rows(&mut st, &mut vt)?;
            s = st.transpose();
            v = vt.transpose();
            rounds += 1;

            if rounds > 64 {
                break;
            }
        }
    }
    let rank = eliminate(&mut s, &mut u, &mut v)?;
    let diag: Vec<i128> = (0..rank).map(|i| s.at(i, i)).collect();
    for _ in 0..2 {
        reduce_kernel_rows(&mut u, rank)?;
        let mut vt = v.transpose();
        reduce_kernel_rows(&mut vt, rank)?;
        v = vt.transpose();
        balance(&mut u, &mut v, &diag)?;
    }
    Ok(Smith {
        u: u.narrow(rows)?,
        s: s.narrow(rows)?,
        v: v.narrow(cols)?,
        rank,
    })
}

/// Trades size between `u` and `v` without changing `u * m * v`: adding
/// `q` times row j of `u` to row i is undone on the diagonal by subtracting
/// `q * d_j / d_i` times column i of `v` from column j, valid when d_i
/// divides d_j.
fn balance(u: &mut Wide, v: &mut Wide, diag: &[i128]) -> Result<(), HomologyError> {
    let urow = |u: &Wide, i: usize| -> Vec<f64> { (0..u.cols).map(|k| u.at(i, k) as f64).collect() };
    let vcol = |v: &Wide, j: usize| -> Vec<f64> { (0..v.rows()).map(|k| v.at(k, j) as f64).collect() };
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let n = diag.len();
    for _ in 0..200 {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j || diag[j] % diag[i] != 0 {
                    continue;
                }
                let k = (diag[j] / diag[i]) as f64;
                let (ui, uj) = (urow(u, i), urow(u, j));
                let (vi, vj) = (vcol(v, i), vcol(v, j));
                let denom = dot(&uj, &uj) + k * k * dot(&vi, &vi);
                let q = (-(dot(&ui, &uj) - k * dot(&vj, &vi)) / denom).round();
                if q == 0.0 || !q.is_finite() {
                    continue;
                }
                let gain = -(2.0 * q * (dot(&ui, &uj) - k * dot(&vj, &vi)) + q * q * denom);
                if gain <= 0.5 {
                    continue;
                }
                let q = q as i128;
                u.add_row(i, j, q)?;
                v.add_col(j, i, -(q.checked_mul(diag[j] / diag[i]).ok_or_else(ov)?))?;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(())
}

/// Shrinks the rows of `u` from `rank` on, which span a kernel lattice and
/// may be recombined freely, then reduces the leading rows against them.
/// Only exact integer row operations are applied; floating point only
/// steers the choice of multipliers.
fn reduce_kernel_rows(u: &mut Wide, rank: usize) -> Result<(), HomologyError> {
    let rows = u.rows();
    let dot = |u: &Wide, a: usize, b: usize| -> f64 {
        (0..u.cols).map(|j| u.at(a, j) as f64 * u.at(b, j) as f64).sum()
    };
    for _ in 0..200 {
        let mut changed = false;
        for i in 0..rows {
            for j in rank..rows {
                if i == j {
                    continue;
                }
                let nj = dot(u, j, j);
                if nj == 0.0 {
                    continue;
                }
                let q = (dot(u, i, j) / nj).round();
                if q == 0.0 || !q.is_finite() {
                    continue;
                }
                let q = q as i128;
                let before = dot(u, i, i);
                let mut trial = Wide {
                    cols: u.cols,
                    data: (0..u.cols).map(|k| u.at(i, k)).collect(),
                };
                for k in 0..u.cols {
                    trial.data[k] = trial.data[k]
                        .checked_sub(q.checked_mul(u.at(j, k)).ok_or_else(ov)?)
                        .ok_or_else(ov)?;
                }
                if dot(&trial, 0, 0) < before {
                    for k in 0..u.cols {
                        u.data[i * u.cols + k] = trial.data[k];
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(())
}

/// Pivoting elimination to Smith form; on a diagonal input it only repairs
/// the divisibility chain.
fn eliminate(s: &mut Wide, u: &mut Wide, v: &mut Wide) -> Result<usize, HomologyError> {
    let rows = s.rows();
    let cols = s.cols;
    let mut t = 0;
    'pivots: while t < rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = s.at(i, j);
                    if x != 0
                        && best.is_none_or(|(bi, bj)| x.unsigned_abs() < s.at(bi, bj).unsigned_abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break 'pivots };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = s.at(t, t);
            let mut clean = true;
            for i in t + 1..rows {
                let q = nearest_quotient(s.at(i, t), p);
                if q != 0 {
                    s.add_row(i, t, -q)?;
                    u.add_row(i, t, -q)?;
                }
                clean &= s.at(i, t) == 0;
            }
            for j in t + 1..cols {
                let q = nearest_quotient(s.at(t, j), p);
                if q != 0 {
                    s.add_col(j, t, -q)?;
                    v.add_col(j, t, -q)?;
                }
                clean &= s.at(t, j) == 0;
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| s.at(i, j) % p != 0));
            match bad {
                Some(i) => {
                    s.add_row(t, i, 1)?;
                    u.add_row(t, i, 1)?;
                }
                None => break,
            }
        }
        if s.at(t, t) < 0 {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    Ok(t)
}
