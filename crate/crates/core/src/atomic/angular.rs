use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Integer or half-integer quantum number, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    /// Accepts values within `1e-9` of a multiple of ½.
    pub fn from_f64(x: f64) -> Result<Self> {
        let twice = (2.0 * x).round();
        if !x.is_finite() || (2.0 * x - twice).abs() > 1e-9 || twice.abs() > 1e6 {
            return Err(Error::invalid(format!("{x} is not an integer or half-integer")));
        }
        Ok(HalfInt(twice as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        0.5 * self.0 as f64
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Number of projections `2j + 1`.
    pub fn multiplicity(self) -> usize {
        (self.0 + 1).max(0) as usize
    }

    /// `-j, -j+1, …, j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let j = self.0;
        (0..=j).map(move |k| HalfInt(2 * k - j))
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: Self) -> Self {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: Self) -> Self {
        HalfInt(self.0 - rhs.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> Self {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Parses `"3/2"`, `"-1/2"`, `"2"` or `"1.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| Error::invalid(format!("bad quantum number `{s}`")))?;
            match den.trim() {
                "2" => Ok(HalfInt(num)),
                "1" => Ok(HalfInt(2 * num)),
                _ => Err(Error::invalid(format!("bad quantum number `{s}`"))),
            }
        } else {
            let x: f64 = s.parse().map_err(|_| Error::invalid(format!("bad quantum number `{s}`")))?;
            HalfInt::from_f64(x)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        HalfInt::from_f64(x).map_err(serde::de::Error::custom)
    }
}

fn factorial(n: i32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `x` is a valid `(j, m)` pair: `j ≥ 0`, `|m| ≤ j`, `j − m` integral.
fn valid(j: HalfInt, m: HalfInt) -> bool {
    j.0 >= 0 && m.0.abs() <= j.0 && (j.0 - m.0) % 2 == 0
}

/// Clebsch–Gordan coefficient `⟨j1 m1; j2 m2 | j m⟩` in the Condon–Shortley
/// phase convention. Inconsistent quantum numbers give `0`.
pub fn clebsch_gordan(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> f64 {
    if !(valid(j1, m1) && valid(j2, m2) && valid(j, m)) || m1.0 + m2.0 != m.0 {
        return 0.0;
    }
    if j.0 < (j1.0 - j2.0).abs() || j.0 > j1.0 + j2.0 || (j1.0 + j2.0 + j.0) % 2 != 0 {
        return 0.0;
    }
    // everything below is an integer; work with plain values
    let h = |x: i32| x / 2;
    let (a, b, c) = (j1.0, j2.0, j.0);
    let triangle = factorial(h(c + a - b)) * factorial(h(c - a + b)) * factorial(h(a + b - c)) / factorial(h(a + b + c) + 1);
    let norm = ((c + 1) as f64 * triangle
        * factorial(h(c + m.0))
        * factorial(h(c - m.0))
        * factorial(h(a - m1.0))
        * factorial(h(a + m1.0))
        * factorial(h(b - m2.0))
        * factorial(h(b + m2.0)))
    .sqrt();
    let k_min = 0.max(h(b - c - m1.0)).max(h(a - c + m2.0));
    let k_max = h(a + b - c).min(h(a - m1.0)).min(h(b + m2.0));
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(h(a + b - c) - k)
            * factorial(h(a - m1.0) - k)
            * factorial(h(b + m2.0) - k)
            * factorial(h(c - b + m1.0) + k)
            * factorial(h(c - a - m2.0) + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / denom;
    }
    norm * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("3/2".parse::<HalfInt>().unwrap(), h(3));
        assert_eq!("2.5".parse::<HalfInt>().unwrap(), h(5));
        assert_eq!("-1/2".parse::<HalfInt>().unwrap(), h(-1));
        assert!("0.3".parse::<HalfInt>().is_err());
        assert!("1/3".parse::<HalfInt>().is_err());
        assert_eq!(h(5).to_string(), "5/2");
        assert_eq!(h(4).to_string(), "2");
        assert_eq!(h(3).projections().collect::<Vec<_>>(), vec![h(-3), h(-1), h(1), h(3)]);
    }

    #[test]
    fn scalar_coupling_is_identity() {
        for j in 0..6 {
            for m in h(j).projections() {
                assert_relative_eq!(clebsch_gordan(h(j), m, h(0), h(0), h(j), m), 1.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn spin_singlet() {
        let c = clebsch_gordan(h(1), h(1), h(1), h(-1), h(0), h(0));
        assert_relative_eq!(c, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        let c = clebsch_gordan(h(1), h(-1), h(1), h(1), h(0), h(0));
        assert_relative_eq!(c, -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn known_values() {
        // ⟨1 0; 1/2 1/2 | 3/2 1/2⟩ = √(2/3), ⟨1 1; 1/2 −1/2 | 1/2 1/2⟩ = √(2/3)
        assert_relative_eq!(clebsch_gordan(h(2), h(0), h(1), h(1), h(3), h(1)), (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(clebsch_gordan(h(2), h(2), h(1), h(-1), h(1), h(1)), (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(clebsch_gordan(h(2), h(0), h(1), h(1), h(1), h(1)), -(1.0f64 / 3.0).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn inconsistent_numbers_give_zero() {
        assert_eq!(clebsch_gordan(h(1), h(1), h(1), h(1), h(0), h(0)), 0.0);
        assert_eq!(clebsch_gordan(h(1), h(3), h(1), h(-1), h(2), h(2)), 0.0);
        assert_eq!(clebsch_gordan(h(2), h(0), h(2), h(0), h(6), h(0)), 0.0);
        assert_eq!(clebsch_gordan(h(2), h(0), h(1), h(1), h(2), h(1)), 0.0);
    }
}
