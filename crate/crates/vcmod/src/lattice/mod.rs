//! Lattice representation, Voronoi quantization and sublattice arithmetic.
//!
//! A [`Lattice`] holds an exact rational basis (rows are basis vectors) with
//! a cached determinant and a decode strategy. Quantizer inputs and outputs
//! are floating point; everything structural (determinants, coset counts,
//! Smith decompositions) is exact.

pub mod exact;
pub mod presets;
mod sphere;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use exact::{rational_to_f64, smith_normal_form, IntMat, RatMat};
pub use presets::parse_rational;
use sphere::SphereDecoder;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("input vector contains a non-finite value")]
    NonFinite,
    #[error("dimension mismatch: lattice is {expected}-dimensional, input has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("brute-force decoding limited to dim <= 6, lattice has dim {0}")]
    BruteForceDim(usize),
    #[error("basis is singular (zero determinant)")]
    Singular,
    #[error("round-per-dimension decoding requires a diagonal basis")]
    NotDiagonal,
    #[error("second lattice is not a sublattice of the first")]
    NotSublattice,
    #[error("determinant ratio is not an integer; lattice pair is inconsistent")]
    NonIntegerIndex,
    #[error("unknown lattice preset `{0}`")]
    UnknownPreset(String),
    #[error("lattice config: {0}")]
    Config(String),
}

/// Decode strategy for the closest-point search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderHint {
    /// Exact rounding per coordinate; valid only for diagonal bases.
    RoundPerDimension,
    /// Schnorr-Euchner enumeration on an LLL-reduced basis. Exact for any
    /// full-rank basis.
    Sphere,
    /// Exhaustive search within an adaptive radius; oracle use, dim <= 6.
    BruteForce,
}

/// A full-rank lattice given by an exact rational basis (rows).
#[derive(Debug, Clone)]
pub struct Lattice {
    dim: usize,
    basis: RatMat,
    det_abs: BigRational,
    hint: DecoderHint,
    basis_f64: Vec<Vec<f64>>,
    inv_f64: Vec<Vec<f64>>,
    sphere: Option<SphereDecoder>,
}

/// A lattice point: exact coordinates plus the integer label `u` with
/// `coords = u * basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint {
    pub coords: Vec<BigRational>,
    pub integer_label: Vec<i64>,
}

impl LatticePoint {
    pub fn coords_f64(&self) -> Vec<f64> {
        self.coords.iter().map(rational_to_f64).collect()
    }
}

/// Result of quantizing a real vector onto a lattice.
#[derive(Debug, Clone)]
pub struct QuantizeResult {
    pub nearest: LatticePoint,
    pub residual: Vec<f64>,
    pub dist2: f64,
}

impl Lattice {
    pub fn new(basis: RatMat, hint: DecoderHint) -> Result<Self, LatticeError> {
        assert_eq!(basis.rows, basis.cols, "basis must be square");
        let dim = basis.rows;
        let det = basis.det();
        if det.is_zero() {
            return Err(LatticeError::Singular);
        }
        if hint == DecoderHint::RoundPerDimension && !is_diagonal(&basis) {
            return Err(LatticeError::NotDiagonal);
        }
        let inv = basis.inverse().ok_or(LatticeError::Singular)?;
        let sphere = match hint {
            DecoderHint::Sphere => Some(SphereDecoder::new(&basis)),
            _ => None,
        };
        Ok(Lattice {
            dim,
            basis_f64: basis.to_f64(),
            inv_f64: inv.to_f64(),
            det_abs: det.abs(),
            basis,
            hint,
            sphere,
        })
    }

    /// Builds with an automatic hint: diagonal bases round per dimension,
    /// everything else gets the sphere decoder.
    pub fn with_auto_hint(basis: RatMat) -> Result<Self, LatticeError> {
        let hint = if is_diagonal(&basis) {
            DecoderHint::RoundPerDimension
        } else {
            DecoderHint::Sphere
        };
        Lattice::new(basis, hint)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &RatMat {
        &self.basis
    }

    pub fn basis_f64(&self) -> &[Vec<f64>] {
        &self.basis_f64
    }

    pub fn det_abs(&self) -> &BigRational {
        &self.det_abs
    }

    pub fn decoder_hint(&self) -> DecoderHint {
        self.hint
    }

    /// The lattice point with the given integer label.
    pub fn point(&self, label: &[i64]) -> LatticePoint {
        assert_eq!(label.len(), self.dim);
        let coords: Vec<BigRational> = (0..self.dim)
            .map(|j| {
                (0..self.dim)
                    .map(|k| BigRational::from(BigInt::from(label[k])) * &self.basis[(k, j)])
                    .sum()
            })
            .collect();
        LatticePoint {
            coords,
            integer_label: label.to_vec(),
        }
    }

    fn check_input(&self, y: &[f64]) -> Result<(), LatticeError> {
        if y.len() != self.dim {
            return Err(LatticeError::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(LatticeError::NonFinite);
        }
        Ok(())
    }

    /// Closest lattice point to `y` under the configured decode strategy.
    ///
    /// Ties on Voronoi boundaries resolve to the lexicographically smallest
    /// integer label, so the quantizer is a deterministic function.
    pub fn closest_point(&self, y: &[f64]) -> Result<QuantizeResult, LatticeError> {
        self.check_input(y)?;
        let label = match self.hint {
            DecoderHint::RoundPerDimension => self.round_label(y),
            DecoderHint::Sphere => self
                .sphere
                .as_ref()
                .expect("sphere decoder built at construction")
                .decode(y),
            DecoderHint::BruteForce => self.brute_force_label(y)?,
        };
        Ok(self.quantize_result(y, label))
    }

    fn quantize_result(&self, y: &[f64], label: Vec<i64>) -> QuantizeResult {
        let nearest = self.point(&label);
        let coords = nearest.coords_f64();
        let residual: Vec<f64> = y.iter().zip(&coords).map(|(a, b)| a - b).collect();
        let dist2 = residual.iter().map(|v| v * v).sum();
        QuantizeResult {
            nearest,
            residual,
            dist2,
        }
    }

    fn round_label(&self, y: &[f64]) -> Vec<i64> {
        (0..self.dim)
            .map(|i| {
                let q = y[i] / self.basis_f64[i][i];
                // Round to nearest; exact halves go to the smaller label.
                (q - 0.5).ceil() as i64
            })
            .collect()
    }

    fn brute_force_label(&self, y: &[f64]) -> Result<Vec<i64>, LatticeError> {
        if self.dim > 6 {
            return Err(LatticeError::BruteForceDim(self.dim));
        }
        let n = self.dim;
        let t: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| y[i] * self.inv_f64[i][j]).sum())
            .collect();
        let w: Vec<i64> = t.iter().map(|c| c.round() as i64).collect();
        // Search radius starts at the distance to the rounded point and
        // doubles until a candidate at most that far away is found.
        let mut rho2 = {
            let q = self.quantize_result(y, w.clone());
            q.dist2.max(1e-12)
        };
        let col_norms: Vec<f64> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| self.inv_f64[i][j] * self.inv_f64[i][j])
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        loop {
            let rho = rho2.sqrt();
            let lo: Vec<i64> = (0..n)
                .map(|i| (t[i] - rho * col_norms[i] - 1e-9).ceil() as i64)
                .collect();
            let hi: Vec<i64> = (0..n)
                .map(|i| (t[i] + rho * col_norms[i] + 1e-9).floor() as i64)
                .collect();
            let mut best = f64::INFINITY;
            let mut ties: Vec<(f64, Vec<i64>)> = Vec::new();
            let mut u = lo.clone();
            'enumerate: loop {
                let d2 = self.dist2_to_label(y, &u);
                let tol = 1e-9 * (1.0 + best);
                if d2 < best - tol {
                    best = d2;
                    ties.clear();
                    ties.push((d2, u.clone()));
                } else if d2 <= best + tol {
                    best = best.min(d2);
                    ties.push((d2, u.clone()));
                }
                for i in 0..n {
                    u[i] += 1;
                    if u[i] <= hi[i] {
                        continue 'enumerate;
                    }
                    u[i] = lo[i];
                }
                break;
            }
            let tol = 1e-9 * (1.0 + best);
            if best <= rho2 + tol {
                let mut labels: Vec<Vec<i64>> = ties
                    .into_iter()
                    .filter(|(d, _)| *d <= best + tol)
                    .map(|(_, u)| u)
                    .collect();
                labels.sort();
                return Ok(labels.remove(0));
            }
            rho2 *= 4.0;
        }
    }

    fn dist2_to_label(&self, y: &[f64], label: &[i64]) -> f64 {
        (0..self.dim)
            .map(|j| {
                let x: f64 = (0..self.dim)
                    .map(|k| label[k] as f64 * self.basis_f64[k][j])
                    .sum();
                let d = y[j] - x;
                d * d
            })
            .sum()
    }
}

fn is_diagonal(m: &RatMat) -> bool {
    (0..m.rows).all(|i| (0..m.cols).all(|j| i == j || m[(i, j)].is_zero()))
}

/// Representative of `x` inside the fundamental Voronoi region of `lat`:
/// `x - Q(x)` where `Q` is the closest-point quantizer.
pub fn mod_lattice(lat: &Lattice, x: &[f64]) -> Result<Vec<f64>, LatticeError> {
    Ok(lat.closest_point(x)?.residual)
}

/// Number of cosets `|coding / shaping|`, i.e. the exact determinant ratio.
///
/// Errors when `shaping` is not a sublattice of `coding` or the ratio is not
/// an integer.
pub fn coset_count(coding: &Lattice, shaping: &Lattice) -> Result<BigInt, LatticeError> {
    sublattice_relation(coding, shaping)?;
    let ratio = shaping.det_abs() / coding.det_abs();
    if !ratio.is_integer() {
        return Err(LatticeError::NonIntegerIndex);
    }
    Ok(ratio.to_integer())
}

/// The integer matrix `M` expressing the shaping basis in coding-lattice
/// coordinates: `G_s = M * G_c`.
pub fn sublattice_relation(coding: &Lattice, shaping: &Lattice) -> Result<IntMat, LatticeError> {
    if coding.dim() != shaping.dim() {
        return Err(LatticeError::DimensionMismatch {
            expected: coding.dim(),
            got: shaping.dim(),
        });
    }
    let inv = coding.basis().inverse().ok_or(LatticeError::Singular)?;
    let m = shaping.basis().mul(&inv);
    m.to_int().ok_or(LatticeError::NotSublattice)
}

/// Smith decomposition of a coding/shaping pair.
///
/// `radices` is the diagonal of the Smith normal form of the relation matrix
/// `M` (so `prod(radices) = coset_count`), and `left`/`right` are the
/// unimodular transforms with `M = left * diag(radices) * right`. Inverses
/// of both transforms are exposed for label arithmetic.
#[derive(Debug, Clone)]
pub struct SmithRadices {
    pub radices: Vec<BigInt>,
    pub relation: IntMat,
    pub left: IntMat,
    pub right: IntMat,
    pub left_inv: IntMat,
    pub right_inv: IntMat,
}

/// Per-coordinate radices `M_1..M_dim` of the quotient group, with
/// `M_i | M_{i+1}` and product equal to [`coset_count`].
pub fn smith_radices(coding: &Lattice, shaping: &Lattice) -> Result<SmithRadices, LatticeError> {
    let m = sublattice_relation(coding, shaping)?;
    let count = coset_count(coding, shaping)?;
    let s = smith_normal_form(&m);
    let product: BigInt = s.d.iter().product();
    debug_assert_eq!(product.abs(), count.abs());
    Ok(SmithRadices {
        radices: s.d,
        relation: m,
        left: s.u,
        right: s.v,
        left_inv: s.u_inv,
        right_inv: s.v_inv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use presets::{dn, scaled, zn};

    #[test]
    fn round_per_dimension_examples() {
        let z2 = zn(2);
        let q = z2.closest_point(&[0.4, -1.6]).unwrap();
        assert_eq!(q.nearest.integer_label, vec![0, -2]);
        assert!((q.dist2 - 0.32).abs() < 1e-12);
    }

    #[test]
    fn idempotent_on_lattice_points() {
        let lat = scaled(&dn(4), &parse_rational("4").unwrap()).unwrap();
        let p = lat.point(&[1, -2, 0, 3]);
        let y = p.coords_f64();
        let q = lat.closest_point(&y).unwrap();
        assert_eq!(q.nearest.integer_label, vec![1, -2, 0, 3]);
        assert_eq!(q.dist2, 0.0);
    }

    #[test]
    fn mod_lattice_coordinatewise() {
        let l4 = scaled(&zn(2), &parse_rational("4").unwrap()).unwrap();
        let r = mod_lattice(&l4, &[5.0, -1.0]).unwrap();
        assert_eq!(r, vec![1.0, -1.0]);
        // Already inside the Voronoi region: unchanged.
        let r = mod_lattice(&l4, &[0.7, -1.3]).unwrap();
        assert_eq!(r, vec![0.7, -1.3]);
    }

    #[test]
    fn mod_lattice_idempotent() {
        let basis = RatMat::from_i64_rows(&[vec![8, 0], vec![4, 8]]);
        let lat = Lattice::new(basis, DecoderHint::Sphere).unwrap();
        for i in 0..50 {
            let x = [2.13 * i as f64 - 31.0, -1.71 * i as f64 + 17.0];
            let once = mod_lattice(&lat, &x).unwrap();
            let twice = mod_lattice(&lat, &once).unwrap();
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn coset_count_z2_mod_4z2() {
        let z2 = zn(2);
        let l4 = scaled(&z2, &parse_rational("4").unwrap()).unwrap();
        assert_eq!(coset_count(&z2, &l4).unwrap(), BigInt::from(16));
        assert_eq!(coset_count(&z2, &z2).unwrap(), BigInt::from(1));
    }

    #[test]
    fn coset_count_rejects_non_sublattice() {
        let z2 = zn(2);
        let half = scaled(&z2, &parse_rational("1/2").unwrap()).unwrap();
        assert!(matches!(
            coset_count(&z2, &half),
            Err(LatticeError::NotSublattice)
        ));
    }

    #[test]
    fn coset_count_multiplicative_under_direct_sum() {
        // (Z^2 / 4Z^2) x (Z^2 / 2Z^2): direct sum has product count.
        let z2 = zn(2);
        let l4 = scaled(&z2, &parse_rational("4").unwrap()).unwrap();
        let l2 = scaled(&z2, &parse_rational("2").unwrap()).unwrap();
        let c1 = coset_count(&z2, &l4).unwrap();
        let c2 = coset_count(&z2, &l2).unwrap();

        let z4 = zn(4);
        let sum_basis = RatMat::from_fn(4, 4, |i, j| {
            if i == j {
                if i < 2 {
                    parse_rational("4").unwrap()
                } else {
                    parse_rational("2").unwrap()
                }
            } else {
                num_rational::BigRational::zero()
            }
        });
        let sum = Lattice::new(sum_basis, DecoderHint::RoundPerDimension).unwrap();
        assert_eq!(coset_count(&z4, &sum).unwrap(), c1 * c2);
    }

    #[test]
    fn smith_radices_examples() {
        let z2 = zn(2);
        let l4 = scaled(&z2, &parse_rational("4").unwrap()).unwrap();
        let s = smith_radices(&z2, &l4).unwrap();
        assert_eq!(s.radices, vec![BigInt::from(4), BigInt::from(4)]);

        let sheared = Lattice::new(
            RatMat::from_i64_rows(&[vec![2, 0], vec![1, 2]]),
            DecoderHint::Sphere,
        )
        .unwrap();
        let s = smith_radices(&z2, &sheared).unwrap();
        assert_eq!(s.radices, vec![BigInt::from(1), BigInt::from(4)]);
        // Transforms reproduce the relation matrix.
        let d = IntMat::from_fn(2, 2, |i, j| {
            if i == j {
                s.radices[i].clone()
            } else {
                BigInt::zero()
            }
        });
        assert_eq!(s.left.mul(&d).mul(&s.right), s.relation);

        let s = smith_radices(&z2, &z2).unwrap();
        assert_eq!(s.radices, vec![BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn sphere_matches_brute_force_on_sheared_lattice() {
        // Oracle: enumerate all labels with |u_i| <= 8 directly.
        let rows = vec![vec![2i64, 0], vec![1, 2]];
        let lat = Lattice::new(RatMat::from_i64_rows(&rows), DecoderHint::Sphere).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) * 8.0 - 4.0
        };
        for _ in 0..200 {
            let y = [next(), next()];
            let got = lat.closest_point(&y).unwrap();
            let mut best = f64::INFINITY;
            for u0 in -8..=8i64 {
                for u1 in -8..=8i64 {
                    let x = [2.0 * u0 as f64 + u1 as f64, 2.0 * u1 as f64];
                    let d = (y[0] - x[0]).powi(2) + (y[1] - x[1]).powi(2);
                    if d < best {
                        best = d;
                    }
                }
            }
            assert!(
                (got.dist2 - best).abs() < 1e-9,
                "sphere {} vs oracle {} at {:?}",
                got.dist2,
                best,
                y
            );
        }
    }

    #[test]
    fn translation_invariance() {
        let lat = Lattice::new(
            RatMat::from_i64_rows(&[vec![2, 0], vec![1, 2]]),
            DecoderHint::Sphere,
        )
        .unwrap();
        let shift = lat.point(&[3, -2]);
        let sh = shift.coords_f64();
        for i in 0..40 {
            let y = [0.31 * i as f64 - 3.0 + 0.013, -0.27 * i as f64 + 2.0 + 0.017];
            let q0 = lat.closest_point(&y).unwrap();
            let y_shift = [y[0] + sh[0], y[1] + sh[1]];
            let q1 = lat.closest_point(&y_shift).unwrap();
            assert_eq!(
                q1.nearest.integer_label,
                vec![
                    q0.nearest.integer_label[0] + 3,
                    q0.nearest.integer_label[1] - 2
                ]
            );
        }
    }

    #[test]
    fn brute_force_rejects_high_dim() {
        let basis = RatMat::identity(7);
        let lat = Lattice::new(basis, DecoderHint::BruteForce).unwrap();
        assert!(matches!(
            lat.closest_point(&[0.0; 7]),
            Err(LatticeError::BruteForceDim(7))
        ));
    }

    #[test]
    fn input_validation() {
        let z2 = zn(2);
        assert!(matches!(
            z2.closest_point(&[f64::NAN, 0.0]),
            Err(LatticeError::NonFinite)
        ));
        assert!(matches!(
            z2.closest_point(&[0.0]),
            Err(LatticeError::DimensionMismatch { .. })
        ));
    }
}
