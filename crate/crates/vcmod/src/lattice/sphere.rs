//! Schnorr-Euchner closest-point enumeration.
//!
//! The decoder is built once per lattice: the basis is LLL-reduced in exact
//! arithmetic, the unimodular transform back to the original integer frame
//! is kept, and enumeration runs in f64 on the reduced QR factors. A Babai
//! rounding step recenters the query first so enumeration always works on
//! small residuals.

use super::exact::{lll_reduce, RatMat};

/// Relative tolerance for treating two candidate distances as tied.
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SphereDecoder {
    dim: usize,
    /// Rows of the LLL-reduced basis.
    reduced: Vec<Vec<f64>>,
    /// Inverse of the reduced basis (row-vector convention: coords = y * inv).
    reduced_inv: Vec<Vec<f64>>,
    /// Upper-triangular factor of reducedᵀ = Q R.
    r: Vec<Vec<f64>>,
    /// Qᵀ, applied to residual queries.
    q_t: Vec<Vec<f64>>,
    /// Unimodular transform: reduced = t * original.
    t: Vec<Vec<i64>>,
}

impl SphereDecoder {
    pub fn new(basis: &RatMat) -> Self {
        let n = basis.rows;
        let (reduced_rat, t_int) = lll_reduce(basis);
        let reduced = reduced_rat.to_f64();
        let reduced_inv = reduced_rat
            .inverse()
            .expect("full-rank basis stays full rank under LLL")
            .to_f64();
        let t = t_int
            .to_i64()
            .expect("LLL transform entries exceed i64 range");

        // QR of A = reducedᵀ by modified Gram-Schmidt; columns of A are the
        // basis vectors, so a[i][j] = reduced[j][i].
        let mut a = vec![vec![0.0; n]; n];
        for (j, row) in reduced.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                a[i][j] = v;
            }
        }
        let mut q = vec![vec![0.0; n]; n];
        let mut r = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut v: Vec<f64> = (0..n).map(|i| a[i][j]).collect();
            for k in 0..j {
                let dot: f64 = (0..n).map(|i| q[i][k] * v[i]).sum();
                r[k][j] = dot;
                for i in 0..n {
                    v[i] -= dot * q[i][k];
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            r[j][j] = norm;
            for i in 0..n {
                q[i][j] = v[i] / norm;
            }
        }
        let q_t: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| q[j][i]).collect()).collect();

        SphereDecoder {
            dim: n,
            reduced,
            reduced_inv,
            r,
            q_t,
            t,
        }
    }

    /// Closest lattice point to `y`; returns the integer label in the
    /// *original* basis frame. Ties resolve to the lexicographically
    /// smallest original label.
    pub fn decode(&self, y: &[f64]) -> Vec<i64> {
        let n = self.dim;
        // Babai recentering in the reduced frame.
        let coords: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| y[i] * self.reduced_inv[i][j]).sum())
            .collect();
        let w: Vec<i64> = coords.iter().map(|c| c.round() as i64).collect();
        let resid: Vec<f64> = (0..n)
            .map(|i| {
                let mut v = y[i];
                for (k, &wk) in w.iter().enumerate() {
                    v -= wk as f64 * self.reduced[k][i];
                }
                v
            })
            .collect();

        // z = Qᵀ resid; minimize ||z - R uᵀ||².
        let z: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| self.q_t[i][j] * resid[j]).sum())
            .collect();

        let mut state = Search {
            r: &self.r,
            z: &z,
            u: vec![0i64; n],
            best: f64::INFINITY,
            ties: Vec::new(),
        };
        state.descend(n - 1, 0.0);

        // Map surviving tie candidates to original-frame labels and take the
        // smallest. Candidates that were within tolerance of an older, worse
        // best are filtered out here.
        let cutoff = state.best + state.tol();
        let mut labels: Vec<Vec<i64>> = state
            .ties
            .iter()
            .filter(|(d, _)| *d <= cutoff)
            .map(|(_, u)| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| (w[k] + u[k]) * self.t[k][j])
                            .sum::<i64>()
                    })
                    .collect()
            })
            .collect();
        labels.sort();
        labels.remove(0)
    }
}

struct Search<'a> {
    r: &'a [Vec<f64>],
    z: &'a [f64],
    u: Vec<i64>,
    best: f64,
    ties: Vec<(f64, Vec<i64>)>,
}

impl Search<'_> {
    fn tol(&self) -> f64 {
        TIE_TOL * (1.0 + self.best)
    }

    fn descend(&mut self, level: usize, dist: f64) {
        let n = self.z.len();
        let diag = self.r[level][level];
        let mut c = self.z[level];
        for j in level + 1..n {
            c -= self.r[level][j] * self.u[j] as f64;
        }
        c /= diag;

        let base = c.round() as i64;
        // Zig-zag enumeration by increasing distance from the real center.
        let toward_up = c - base as f64 >= 0.0;
        for k in 0u64.. {
            let offset = if k == 0 {
                0
            } else if k % 2 == 1 {
                let step = k.div_ceil(2) as i64;
                if toward_up {
                    step
                } else {
                    -step
                }
            } else {
                let step = (k / 2) as i64;
                if toward_up {
                    -step
                } else {
                    step
                }
            };
            let cand = base + offset;
            let term = diag * (c - cand as f64);
            let d = dist + term * term;
            if d > self.best + self.tol() {
                // Distances are nondecreasing along the zig-zag.
                break;
            }
            self.u[level] = cand;
            if level == 0 {
                if d < self.best - self.tol() {
                    self.best = d;
                    self.ties.clear();
                    self.ties.push((d, self.u.clone()));
                } else {
                    self.best = self.best.min(d);
                    self.ties.push((d, self.u.clone()));
                }
            } else {
                self.descend(level - 1, d);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_integer_grid() {
        let basis = RatMat::from_i64_rows(&[vec![1, 0], vec![0, 1]]);
        let dec = SphereDecoder::new(&basis);
        assert_eq!(dec.decode(&[0.4, -1.6]), vec![0, -2]);
        assert_eq!(dec.decode(&[2.0, 3.0]), vec![2, 3]);
    }

    #[test]
    fn tie_takes_smallest_label() {
        let basis = RatMat::from_i64_rows(&[vec![1, 0], vec![0, 1]]);
        let dec = SphereDecoder::new(&basis);
        // Exact midpoints tie four candidates; (0,0) is the smallest label.
        assert_eq!(dec.decode(&[0.5, 0.5]), vec![0, 0]);
        assert_eq!(dec.decode(&[-0.5, 0.5]), vec![-1, 0]);
    }

    #[test]
    fn sheared_basis_matches_expectation() {
        // Basis rows (2,0),(1,2): point (1.9,1.9) is closest to (1,2)=0*(2,0)+1*(1,2).
        let basis = RatMat::from_i64_rows(&[vec![2, 0], vec![1, 2]]);
        let dec = SphereDecoder::new(&basis);
        let label = dec.decode(&[1.1, 1.9]);
        // Point = label[0]*(2,0)+label[1]*(1,2) should equal (1,2).
        let x = 2.0 * label[0] as f64 + label[1] as f64;
        let y = 2.0 * label[1] as f64;
        assert_eq!((x, y), (1.0, 2.0));
    }
}
