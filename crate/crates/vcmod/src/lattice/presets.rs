//! Named lattice presets and text-config loading.
//!
//! Presets cover the cubic lattices `Z_n`, the checkerboard lattices `D_n`,
//! scaled variants of both, and fully explicit bases with entries given as
//! exact integer or rational strings (`"4"`, `"-3/2"`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use super::exact::RatMat;
use super::{DecoderHint, Lattice, LatticeError};

/// The cubic lattice Z^dim.
pub fn zn(dim: usize) -> Lattice {
    Lattice::new(RatMat::identity(dim), DecoderHint::RoundPerDimension)
        .expect("identity basis is valid")
}

/// The checkerboard lattice D_dim = {x in Z^dim : sum(x) even}, dim >= 2.
pub fn dn(dim: usize) -> Lattice {
    assert!(dim >= 2, "D_n needs dim >= 2");
    let basis = RatMat::from_fn(dim, dim, |i, j| {
        let v: i64 = if i == 0 {
            match j {
                0 | 1 => -1,
                _ => 0,
            }
        } else if j + 1 == i {
            1
        } else if j == i {
            -1
        } else {
            0
        };
        BigRational::from(BigInt::from(v))
    });
    Lattice::new(basis, DecoderHint::Sphere).expect("D_n basis is full rank")
}

/// Scales every basis vector by an exact rational factor.
pub fn scaled(lat: &Lattice, factor: &BigRational) -> Result<Lattice, LatticeError> {
    if factor.is_zero() {
        return Err(LatticeError::Singular);
    }
    let b = lat.basis();
    let basis = RatMat::from_fn(b.rows, b.cols, |i, j| factor * &b[(i, j)]);
    Lattice::new(basis, lat.decoder_hint())
}

/// Parses an exact rational from `"n"` or `"n/d"` form.
pub fn parse_rational(s: &str) -> Result<BigRational, LatticeError> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim())
                .map_err(|e| LatticeError::Config(format!("bad numerator `{n}`: {e}")))?;
            let d = BigInt::from_str(d.trim())
                .map_err(|e| LatticeError::Config(format!("bad denominator `{d}`: {e}")))?;
            if d.is_zero() {
                return Err(LatticeError::Config("zero denominator".into()));
            }
            Ok(BigRational::new(n, d))
        }
        None => BigInt::from_str(s)
            .map(BigRational::from)
            .map_err(|e| LatticeError::Config(format!("bad integer `{s}`: {e}"))),
    }
}

/// Text-config form of a lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeConfig {
    /// "Z", "D", or "explicit".
    pub preset: String,
    #[serde(default)]
    pub dim: Option<usize>,
    /// Exact rational scale factor, e.g. "2" or "1/2".
    #[serde(default)]
    pub scale: Option<String>,
    /// Row-major basis entries for `preset = "explicit"`.
    #[serde(default)]
    pub basis: Option<Vec<Vec<String>>>,
    /// "round", "sphere", or "brute-force"; omitted = automatic.
    #[serde(default)]
    pub decoder: Option<String>,
}

impl LatticeConfig {
    pub fn build(&self) -> Result<Lattice, LatticeError> {
        let base = match self.preset.as_str() {
            "Z" | "z" => {
                let dim = self
                    .dim
                    .ok_or_else(|| LatticeError::Config("preset Z needs `dim`".into()))?;
                zn(dim)
            }
            "D" | "d" => {
                let dim = self
                    .dim
                    .ok_or_else(|| LatticeError::Config("preset D needs `dim`".into()))?;
                dn(dim)
            }
            "explicit" => {
                let rows = self
                    .basis
                    .as_ref()
                    .ok_or_else(|| LatticeError::Config("explicit preset needs `basis`".into()))?;
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(LatticeError::Config("basis must be square".into()));
                }
                let mut mat = RatMat::zero(n, n);
                for (i, row) in rows.iter().enumerate() {
                    for (j, cell) in row.iter().enumerate() {
                        mat[(i, j)] = parse_rational(cell)?;
                    }
                }
                Lattice::with_auto_hint(mat)?
            }
            other => return Err(LatticeError::UnknownPreset(other.to_string())),
        };
        let base = match &self.scale {
            Some(s) => scaled(&base, &parse_rational(s)?)?,
            None => base,
        };
        match self.decoder.as_deref() {
            None => Ok(base),
            Some("round") => Lattice::new(base.basis().clone(), DecoderHint::RoundPerDimension),
            Some("sphere") => Lattice::new(base.basis().clone(), DecoderHint::Sphere),
            Some("brute-force") => Lattice::new(base.basis().clone(), DecoderHint::BruteForce),
            Some(other) => Err(LatticeError::Config(format!("unknown decoder `{other}`"))),
        }
    }
}

/// Loads a lattice from TOML text.
pub fn from_config_str(text: &str) -> Result<Lattice, LatticeError> {
    let cfg: LatticeConfig =
        toml::from_str(text).map_err(|e| LatticeError::Config(e.to_string()))?;
    cfg.build()
}
