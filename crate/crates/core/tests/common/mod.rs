//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use shuttle_stark::atomic::HalfInt;

/// `⟨j1 m1; j2 m2 | J M⟩` for every valid combination, built by applying the
/// lowering operator to stretched states and Gram–Schmidt on each top state
/// (Condon–Shortley phase: `⟨j1 j1; j2 J−j1 | J J⟩ > 0`). Keys are twice the
/// quantum numbers `(J, M, m1, m2)`.
pub fn ladder_cg(j1: i32, j2: i32) -> BTreeMap<(i32, i32, i32, i32), f64> {
    type State = HashMap<(i32, i32), f64>;
    let lower = |state: &State| -> State {
        let mut out = State::new();
        for (&(m1, m2), &c) in state {
            // J₋|j m⟩ = √((j+m)(j−m+1)) |j m−1⟩, in twice-units
            let f1 = (((j1 + m1) as f64 / 2.0) * ((j1 - m1) as f64 / 2.0 + 1.0)).sqrt();
            if f1 > 0.0 {
                *out.entry((m1 - 2, m2)).or_default() += c * f1;
            }
            let f2 = (((j2 + m2) as f64 / 2.0) * ((j2 - m2) as f64 / 2.0 + 1.0)).sqrt();
            if f2 > 0.0 {
                *out.entry((m1, m2 - 2)).or_default() += c * f2;
            }
        }
        out
    };
    let dot = |a: &State, b: &State| a.iter().map(|(k, v)| v * b.get(k).copied().unwrap_or(0.0)).sum::<f64>();
    let normalise = |s: &mut State| {
        let n = dot(s, s).sqrt();
        s.values_mut().for_each(|v| *v /= n);
    };

    let mut states: BTreeMap<(i32, i32), State> = BTreeMap::new();
    let mut big_j = j1 + j2;
    while big_j >= (j1 - j2).abs() {
        let mut top = State::new();
        top.insert((j1, big_j - j1), 1.0);
        for jp in ((big_j + 2)..=(j1 + j2)).step_by(2) {
            let other = &states[&(jp, big_j)];
            let p = dot(other, &top);
            for (k, v) in other {
                *top.entry(*k).or_default() -= p * v;
            }
        }
        normalise(&mut top);
        let mut m = big_j;
        let mut current = top;
        loop {
            states.insert((big_j, m), current.clone());
            if m == -big_j {
                break;
            }
            current = lower(&current);
            normalise(&mut current);
            m -= 2;
        }
        big_j -= 2;
    }
    let mut out = BTreeMap::new();
    for ((jj, mm), state) in states {
        for ((m1, m2), c) in state {
            if c.abs() > 1e-300 {
                out.insert((jj, mm, m1, m2), c);
            }
        }
    }
    out
}

pub fn h(twice: i32) -> HalfInt {
    HalfInt::from_twice(twice)
}

/// Max-norm distance between two functions sampled on `n + 1` points of `[0, span]`.
pub fn sup_distance(span: f64, n: usize, f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64) -> f64 {
    (0..=n)
        .map(|k| {
            let t = span * k as f64 / n as f64;
            (f(t) - g(t)).abs()
        })
        .fold(0.0, f64::max)
}

/// `ζ = ∫ q̈²` for a polynomial acceleration given by its coefficients in
/// `τ = t/T` (lowest order first), integrated symbolically on `[0, 1]`.
pub fn polynomial_zeta(accel: &[f64]) -> f64 {
    let mut sq = vec![0.0; 2 * accel.len()];
    for (i, a) in accel.iter().enumerate() {
        for (j, b) in accel.iter().enumerate() {
            sq[i + j] += a * b;
        }
    }
    sq.iter().enumerate().map(|(k, c)| c / (k + 1) as f64).sum()
}
