//! The counting polynomial `f(u, v) = 2(uv)² + (u + v) − 3uv` on `[0, 1]²`.
//!
//! All evaluation is exact. The grid check works with the scaled integer
//! `N⁴·f(i/N, j/N) = 2i²j² + (i + j)N³ − 3ijN²`, and the partial derivatives
//! `N³·∂f/∂u = 4ij² + N³ − 3jN²`, `N³·∂f/∂v = 4i²j + N³ − 3iN²`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::Rational;

pub fn f_uv(u: Rational, v: Rational) -> Result<Rational> {
    let unit = |x: &Rational| *x >= Rational::zero() && *x <= Rational::one();
    if !unit(&u) || !unit(&v) {
        return Err(Error::OutOfUnitInterval);
    }
    let two = Rational::from_integer(2);
    let three = Rational::from_integer(3);
    let uv = u * v;
    Ok(two * uv * uv + (u + v) - three * uv)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalPoint {
    pub u: Rational,
    pub v: Rational,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridCheck {
    /// Grid points are `(i/N, j/N)` for `0 <= i, j <= N`.
    pub resolution: u32,
    pub points: u64,
    pub negative_points: u64,
    pub min_value: Rational,
    pub argmin: (Rational, Rational),
    /// Interior grid points where both partial derivatives vanish.
    pub critical_points: Vec<CriticalPoint>,
}

impl GridCheck {
    pub fn nonnegative(&self) -> bool {
        self.negative_points == 0
    }
}

/// Evaluates `f` exactly on the `(N+1)²` grid of `[0, 1]²`.
pub fn grid_check(resolution: u32) -> GridCheck {
    let n = resolution as i128;
    let (n2, n3) = (n * n, n * n * n);
    let n4 = n2 * n2;
    let mut negative = 0;
    let mut best: Option<(i128, i128, i128)> = None;
    let mut critical = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            let scaled = 2 * i * i * j * j + (i + j) * n3 - 3 * i * j * n2;
            if scaled < 0 {
                negative += 1;
            }
            if best.is_none_or(|(s, _, _)| scaled < s) {
                best = Some((scaled, i, j));
            }
            let interior = i > 0 && i < n && j > 0 && j < n;
            if interior && 4 * i * j * j + n3 - 3 * j * n2 == 0 && 4 * i * i * j + n3 - 3 * i * n2 == 0 {
                critical.push(CriticalPoint {
                    u: Rational::new(i, n),
                    v: Rational::new(j, n),
                    value: Rational::new(scaled, n4),
                });
            }
        }
    }
    let (s, i, j) = best.expect("grid is nonempty");
    GridCheck {
        resolution,
        points: ((n + 1) * (n + 1)) as u64,
        negative_points: negative,
        min_value: Rational::new(s, n4),
        argmin: (Rational::new(i, n), Rational::new(j, n)),
        critical_points: critical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn exact_values() {
        assert_eq!(f_uv(r(1, 2), r(1, 2)).unwrap(), r(3, 8));
        assert_eq!(f_uv(r(1, 1), r(1, 1)).unwrap(), r(1, 1));
        for k in 0..=7 {
            assert_eq!(f_uv(r(0, 1), r(k, 7)).unwrap(), r(k, 7));
        }
        assert!(matches!(f_uv(r(-1, 2), r(1, 2)), Err(Error::OutOfUnitInterval)));
        assert!(matches!(f_uv(r(1, 2), r(3, 2)), Err(Error::OutOfUnitInterval)));
    }

    #[test]
    fn scaled_grid_matches_rational_evaluation() {
        let n = 12;
        let g = grid_check(n as u32);
        let mut min = None::<Rational>;
        for i in 0..=n {
            for j in 0..=n {
                let v = f_uv(r(i, n), r(j, n)).unwrap();
                if min.is_none_or(|m| v < m) {
                    min = Some(v);
                }
            }
        }
        assert_eq!(g.min_value, min.unwrap());
        assert_eq!(g.critical_points.len(), 1);
        assert_eq!(g.critical_points[0].value, r(3, 8));
    }

    #[test]
    fn odd_resolution_misses_the_critical_point() {
        let g = grid_check(7);
        assert!(g.critical_points.is_empty());
        assert!(g.nonnegative());
    }
}
