//! Point sets in R^d and the distance comparisons built on them.
//!
//! Exact point sets hold rational coordinates. Before any comparison they are
//! rescaled to a common denominator, so every squared distance is an integer;
//! when the magnitudes allow it those integers live in `i128`, otherwise in
//! `BigInt`. Float point sets compare squared distances under a relative
//! margin so that near-ties are treated conservatively.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Default relative comparison margin for float point sets.
pub const DEFAULT_FLOAT_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("point {index} has {got} coordinates, expected {expected}")]
    WrongArity { index: usize, got: usize, expected: usize },
    #[error("points {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error("non-finite coordinate in point {0}")]
    NonFinite(usize),
    #[error("dimension must be at least 1")]
    ZeroDimension,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coordinates {
    Exact(Vec<BigRational>),
    Float { values: Vec<f64>, margin: f64 },
}

/// `n` pairwise-distinct points in R^d, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    d: usize,
    n: usize,
    coords: Coordinates,
}

impl PointSet {
    pub fn exact(d: usize, points: Vec<Vec<BigRational>>) -> Result<Self, PointError> {
        if d == 0 {
            return Err(PointError::ZeroDimension);
        }
        let n = points.len();
        let mut flat = Vec::with_capacity(n * d);
        for (index, p) in points.into_iter().enumerate() {
            if p.len() != d {
                return Err(PointError::WrongArity {
                    index,
                    got: p.len(),
                    expected: d,
                });
            }
            flat.extend(p);
        }
        let set = Self {
            d,
            n,
            coords: Coordinates::Exact(flat),
        };
        set.check_distinct()?;
        Ok(set)
    }

    pub fn from_integers(d: usize, points: &[Vec<i64>]) -> Result<Self, PointError> {
        Self::exact(
            d,
            points
                .iter()
                .map(|p| p.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    /// 1-D exact points from rational literals such as `"5/2"` or `"6.5"`.
    pub fn line(values: &[&str]) -> Result<Self, PointError> {
        Self::exact(
            1,
            values
                .iter()
                .map(|s| vec![parse_rational(s).expect("valid rational literal")])
                .collect(),
        )
    }

    pub fn float(d: usize, points: Vec<Vec<f64>>) -> Result<Self, PointError> {
        Self::float_with_margin(d, points, DEFAULT_FLOAT_MARGIN)
    }

    pub fn float_with_margin(d: usize, points: Vec<Vec<f64>>, margin: f64) -> Result<Self, PointError> {
        if d == 0 {
            return Err(PointError::ZeroDimension);
        }
        let n = points.len();
        let mut values = Vec::with_capacity(n * d);
        for (index, p) in points.into_iter().enumerate() {
            if p.len() != d {
                return Err(PointError::WrongArity {
                    index,
                    got: p.len(),
                    expected: d,
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(PointError::NonFinite(index));
            }
            values.extend(p);
        }
        let set = Self {
            d,
            n,
            coords: Coordinates::Float { values, margin },
        };
        set.check_distinct()?;
        Ok(set)
    }

    fn check_distinct(&self) -> Result<(), PointError> {
        let mut idx: Vec<usize> = (0..self.n).collect();
        match &self.coords {
            Coordinates::Exact(c) => {
                let row = |i: usize| &c[i * self.d..(i + 1) * self.d];
                idx.sort_by(|&a, &b| row(a).cmp(row(b)));
                for w in idx.windows(2) {
                    if row(w[0]) == row(w[1]) {
                        return Err(PointError::Duplicate(w[0].min(w[1]), w[0].max(w[1])));
                    }
                }
            }
            Coordinates::Float { values, .. } => {
                let row = |i: usize| &values[i * self.d..(i + 1) * self.d];
                idx.sort_by(|&a, &b| {
                    row(a)
                        .iter()
                        .zip(row(b))
                        .map(|(x, y)| x.total_cmp(y))
                        .find(|o| o.is_ne())
                        .unwrap_or(Ordering::Equal)
                });
                for w in idx.windows(2) {
                    if row(w[0]) == row(w[1]) {
                        return Err(PointError::Duplicate(w[0].min(w[1]), w[0].max(w[1])));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.coords, Coordinates::Exact(_))
    }

    pub fn coordinates(&self) -> &Coordinates {
        &self.coords
    }

    /// Exact coordinates of point `i`; `None` for float point sets.
    pub fn exact_point(&self, i: usize) -> Option<&[BigRational]> {
        match &self.coords {
            Coordinates::Exact(c) => Some(&c[i * self.d..(i + 1) * self.d]),
            Coordinates::Float { .. } => None,
        }
    }

    pub fn point_f64(&self, i: usize) -> Vec<f64> {
        match &self.coords {
            Coordinates::Exact(c) => c[i * self.d..(i + 1) * self.d]
                .iter()
                .map(|x| x.to_f64().unwrap_or(f64::NAN))
                .collect(),
            Coordinates::Float { values, .. } => values[i * self.d..(i + 1) * self.d].to_vec(),
        }
    }

    /// Applies an exact affine map `x -> s * R x + t` to every point.
    pub fn transform(&self, rotation: &[Vec<BigRational>], scale: &BigRational, shift: &[BigRational]) -> Self {
        let Coordinates::Exact(c) = &self.coords else {
            panic!("transform requires exact coordinates");
        };
        let d = self.d;
        let mut out = Vec::with_capacity(c.len());
        for i in 0..self.n {
            let p = &c[i * d..(i + 1) * d];
            for r in 0..d {
                let mut acc = BigRational::zero();
                for (a, x) in rotation[r].iter().zip(p) {
                    acc += a * x;
                }
                out.push(acc * scale + &shift[r]);
            }
        }
        Self {
            d,
            n: self.n,
            coords: Coordinates::Exact(out),
        }
    }

    /// Picks the comparison engine for this point set.
    pub(crate) fn metric(&self) -> Metric {
        match &self.coords {
            Coordinates::Float { values, margin } => Metric::Float {
                d: self.d,
                coords: values.clone(),
                margin: *margin,
            },
            Coordinates::Exact(c) => {
                let mut lcm = BigInt::one();
                for x in c {
                    lcm = lcm.lcm(x.denom());
                }
                let ints: Vec<BigInt> = c.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
                // i128 is safe when d * (2 * max)^2 < 2^126
                let max_abs = ints.iter().map(|x| x.abs()).max().unwrap_or_default();
                let bits = max_abs.bits() + 1;
                let dim_bits = (self.d as u64).next_power_of_two().trailing_zeros() as u64;
                if 2 * bits + dim_bits < 126 {
                    Metric::Small {
                        d: self.d,
                        coords: ints.iter().map(|x| x.to_i128().expect("bounded")).collect(),
                    }
                } else {
                    Metric::Big {
                        d: self.d,
                        coords: ints,
                    }
                }
            }
        }
    }
}

/// Squared-distance engine. Values from [`Metric::sq`] must only be compared
/// through the metric's own predicates.
#[derive(Debug, Clone)]
pub(crate) enum Metric {
    Small { d: usize, coords: Vec<i128> },
    Big { d: usize, coords: Vec<BigInt> },
    Float { d: usize, coords: Vec<f64>, margin: f64 },
}

#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub(crate) enum SqDist {
    Small(i128),
    Big(BigInt),
    Float(f64),
}

impl Metric {
    pub(crate) fn sq(&self, u: usize, v: usize) -> SqDist {
        match self {
            Metric::Small { d, coords } => {
                let (a, b) = (&coords[u * d..(u + 1) * d], &coords[v * d..(v + 1) * d]);
                SqDist::Small(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
            }
            Metric::Big { d, coords } => {
                let (a, b) = (&coords[u * d..(u + 1) * d], &coords[v * d..(v + 1) * d]);
                let mut acc = BigInt::zero();
                for (x, y) in a.iter().zip(b) {
                    let diff = x - y;
                    acc += &diff * &diff;
                }
                SqDist::Big(acc)
            }
            Metric::Float { d, coords, .. } => {
                let (a, b) = (&coords[u * d..(u + 1) * d], &coords[v * d..(v + 1) * d]);
                SqDist::Float(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
            }
        }
    }

    fn margin(&self) -> f64 {
        match self {
            Metric::Float { margin, .. } => *margin,
            _ => 0.0,
        }
    }

    /// `a < b`, demanding a gap larger than the margin in float mode.
    pub(crate) fn lt(&self, a: &SqDist, b: &SqDist) -> bool {
        match (a, b) {
            (SqDist::Float(x), SqDist::Float(y)) => y - x > self.margin() * x.max(*y),
            _ => a < b,
        }
    }

    /// `a <= b`, where anything within the margin counts as equal.
    pub(crate) fn le(&self, a: &SqDist, b: &SqDist) -> bool {
        match (a, b) {
            (SqDist::Float(x), SqDist::Float(y)) => x - y <= self.margin() * x.max(*y),
            _ => a <= b,
        }
    }

    /// `a == b` up to the margin.
    pub(crate) fn tie(&self, a: &SqDist, b: &SqDist) -> bool {
        self.le(a, b) && self.le(b, a)
    }

    pub(crate) fn cmp(&self, a: &SqDist, b: &SqDist) -> Ordering {
        match (a, b) {
            (SqDist::Float(x), SqDist::Float(y)) => x.total_cmp(y),
            _ => a.partial_cmp(b).expect("same metric"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {0:?} as a rational number")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, an integer, or a finite decimal (`"-6.25"`, `"1e-3"`)
/// into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let all = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(&all).map_err(|_| err())?;
    if neg {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(numer * num::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num::pow(ten, (-scale) as usize))
    })
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Rounds a float onto the grid `2^-bits` and returns it exactly.
pub fn rationalize(x: f64, bits: u32) -> BigRational {
    let scale = (1u64 << bits) as f64;
    let numer = (x * scale).round();
    let numer = BigInt::from(numer as i128);
    BigRational::new(numer, BigInt::one() << bits)
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = match &self.coords {
                Coordinates::Exact(c) => c[i * self.d..(i + 1) * self.d].iter().map(format_rational).collect(),
                Coordinates::Float { values, .. } => values[i * self.d..(i + 1) * self.d]
                    .iter()
                    .map(|x| x.to_string())
                    .collect(),
            };
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn parses_literals() {
        assert_eq!(parse_rational("5/2").unwrap(), q(5, 2));
        assert_eq!(parse_rational("2.5").unwrap(), q(5, 2));
        assert_eq!(parse_rational("-6.25").unwrap(), q(-25, 4));
        assert_eq!(parse_rational("12").unwrap(), q(12, 1));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("1.5E2").unwrap(), q(150, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for x in [q(5, 2), q(-7, 3), q(4, 1), q(0, 1)] {
            assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
    }

    #[test]
    fn rejects_duplicates_and_bad_arity() {
        assert_eq!(
            PointSet::from_integers(1, &[vec![0], vec![3], vec![0]]).unwrap_err(),
            PointError::Duplicate(0, 2)
        );
        assert!(matches!(
            PointSet::from_integers(2, &[vec![0, 1], vec![3]]),
            Err(PointError::WrongArity { index: 1, .. })
        ));
        assert!(PointSet::float(1, vec![vec![f64::NAN]]).is_err());
    }

    #[test]
    fn metric_picks_small_ints_and_scales_denominators() {
        let p = PointSet::line(&["0", "5/2", "6.5"]).unwrap();
        let m = p.metric();
        assert!(matches!(m, Metric::Small { .. }));
        // distances scaled by 2: 5 and 13 -> squares 25 and 169
        assert_eq!(m.sq(0, 1), SqDist::Small(25));
        assert_eq!(m.sq(0, 2), SqDist::Small(169));

        let huge = BigRational::from_integer(BigInt::one() << 80);
        let big = PointSet::exact(1, vec![vec![BigRational::zero()], vec![huge]]).unwrap();
        assert!(matches!(big.metric(), Metric::Big { .. }));
    }

    #[test]
    fn float_margin_is_conservative() {
        let p = PointSet::float(1, vec![vec![0.0], vec![1.0], vec![-1.0 - 1e-12]]).unwrap();
        let m = p.metric();
        let (a, b) = (m.sq(0, 1), m.sq(0, 2));
        assert!(!m.lt(&a, &b));
        assert!(m.le(&b, &a));
        assert!(m.tie(&a, &b));
    }

    #[test]
    fn rationalize_grid() {
        assert_eq!(rationalize(0.5, 4), q(1, 2));
        assert_eq!(rationalize(0.3, 2), q(1, 4));
    }
}
