use serde::{Deserialize, Serialize};

use super::{extended, same_space, FiniteMetricSpace, FinitelySupportedMeasure, MASS_TOL};
use crate::error::{Error, Result};
use crate::C64;

/// Largest support (union of both supports) handled by [`kr_distance`].
pub const MAX_SUPPORT: usize = 64;

const THETA_GRID: usize = 256;
const THETA_TOL: f64 = 1e-6;

/// Kantorovich-Rubinstein distance with its certificate.
///
/// `primal` is the cost of an explicit transport plan, `dual` is
/// `|sum_x f(x) (mu - nu)(x)|` for the 1-Lipschitz `potentials` f, and
/// `gap` is their difference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrReport {
    #[serde(with = "extended")]
    pub value: f64,
    #[serde(with = "extended")]
    pub primal: f64,
    #[serde(with = "extended")]
    pub dual: f64,
    pub gap: f64,
    #[serde(with = "extended::option_vec")]
    pub potentials: Option<Vec<f64>>,
    /// Phase maximizing the real transport problem, for complex weights.
    pub theta: Option<f64>,
}

impl KrReport {
    fn infinite() -> Self {
        KrReport {
            value: f64::INFINITY,
            primal: f64::INFINITY,
            dual: f64::INFINITY,
            gap: 0.0,
            potentials: None,
            theta: None,
        }
    }
}

/// `sup_f |int f d mu - int f d nu|` over 1-Lipschitz `f`. Infinite when
/// the total masses differ or mass has to cross an infinite distance.
pub fn kr_distance(mu: &FinitelySupportedMeasure, nu: &FinitelySupportedMeasure) -> Result<KrReport> {
    if !same_space(mu.space(), nu.space()) {
        return Err(Error::MismatchedSpaces);
    }
    let diff: Vec<C64> = mu.weights().iter().zip(nu.weights()).map(|(a, b)| a - b).collect();
    let support = mu
        .weights()
        .iter()
        .zip(nu.weights())
        .filter(|(a, b)| a.norm_sqr() != 0.0 || b.norm_sqr() != 0.0)
        .count();
    if support > MAX_SUPPORT {
        return Err(Error::SupportTooLarge { size: support, max: MAX_SUPPORT });
    }
    let tv: f64 = diff.iter().map(|z| z.norm()).sum();
    let mass: C64 = diff.iter().sum();
    if mass.norm() > MASS_TOL * tv.max(1.0) {
        return Ok(KrReport::infinite());
    }
    let space = mu.space();
    if diff.iter().all(|z| z.im == 0.0) {
        let rho: Vec<f64> = diff.iter().map(|z| z.re).collect();
        let sol = transport(space, &rho);
        let Some(f) = sol.potentials else {
            return Ok(KrReport::infinite());
        };
        let dual = pair(&f, &rho);
        return Ok(KrReport {
            value: sol.cost,
            primal: sol.cost,
            dual,
            gap: (sol.cost - dual).abs(),
            potentials: Some(f),
            theta: None,
        });
    }
    complex_distance(space, &diff)
}

fn complex_distance(space: &FiniteMetricSpace, diff: &[C64]) -> Result<KrReport> {
    let rotated = |theta: f64| -> Vec<f64> {
        let r = C64::from_polar(1.0, theta);
        diff.iter().map(|z| (r * z).re).collect()
    };
    let cost = |theta: f64| transport(space, &rotated(theta)).cost;
    // theta and theta + pi give the same problem
    let h = std::f64::consts::PI / THETA_GRID as f64;
    let mut best = (0.0, cost(0.0));
    for k in 1..THETA_GRID {
        let t = k as f64 * h;
        let c = cost(t);
        if c > best.1 {
            best = (t, c);
        }
    }
    if best.1.is_infinite() {
        return Ok(KrReport::infinite());
    }
    let (mut a, mut b) = (best.0 - h, best.0 + h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (cost(x1), cost(x2));
    while b - a > THETA_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = cost(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = cost(x1);
        }
    }
    for (t, c) in [(x1, f1), (x2, f2)] {
        if c > best.1 {
            best = (t, c);
        }
    }
    let theta = best.0.rem_euclid(std::f64::consts::PI);
    let sol = transport(space, &rotated(theta));
    let f = sol.potentials.expect("finite cost has potentials");
    let paired: C64 = f.iter().zip(diff).map(|(x, z)| z * *x).sum();
    let dual = paired.norm();
    Ok(KrReport {
        value: dual.max(sol.cost),
        primal: sol.cost,
        dual,
        gap: (dual - sol.cost).abs(),
        potentials: Some(f),
        theta: Some(theta),
    })
}

fn pair(f: &[f64], rho: &[f64]) -> f64 {
    f.iter().zip(rho).map(|(a, b)| a * b).sum::<f64>().abs()
}

struct Transport {
    cost: f64,
    /// One value per point of the space; `None` when the cost is infinite.
    potentials: Option<Vec<f64>>,
}

/// Optimal transport of the positive part of `rho` onto its negative part,
/// by successive shortest paths in the residual network.
fn transport(space: &FiniteMetricSpace, rho: &[f64]) -> Transport {
    let src: Vec<usize> = (0..rho.len()).filter(|&i| rho[i] > 0.0).collect();
    let snk: Vec<usize> = (0..rho.len()).filter(|&i| rho[i] < 0.0).collect();
    if src.is_empty() || snk.is_empty() {
        return Transport { cost: 0.0, potentials: Some(vec![0.0; rho.len()]) };
    }
    let (m, k) = (src.len(), snk.len());
    let c: Vec<Vec<f64>> = src.iter().map(|&i| snk.iter().map(|&j| space.distance(i, j)).collect()).collect();
    let mut supply: Vec<f64> = src.iter().map(|&i| rho[i]).collect();
    let mut demand: Vec<f64> = snk.iter().map(|&j| -rho[j]).collect();
    let total = supply.iter().sum::<f64>().max(demand.iter().sum());
    let thr = 1e-14 * total;
    let mut x = vec![vec![0.0; k]; m];
    let n = m + k;
    let guard = 4 * n * n + 100;
    for _ in 0..guard {
        if supply.iter().sum::<f64>() <= thr || demand.iter().sum::<f64>() <= thr {
            break;
        }
        let starts: Vec<usize> = (0..m).filter(|&i| supply[i] > thr / n as f64).collect();
        let (dist, pred) = residual_paths(&c, &x, &starts);
        let end = (0..k)
            .filter(|&j| demand[j] > thr / n as f64 && dist[m + j].is_finite())
            .min_by(|&a, &b| dist[m + a].total_cmp(&dist[m + b]));
        let Some(j) = end else {
            return Transport { cost: f64::INFINITY, potentials: None };
        };
        let mut path = vec![m + j];
        let mut v = m + j;
        while let Some(u) = pred[v] {
            path.push(u);
            v = u;
        }
        path.reverse();
        let mut amount = supply[path[0]].min(demand[j]);
        for w in path.windows(2) {
            if w[0] >= m {
                amount = amount.min(x[w[1]][w[0] - m]);
            }
        }
        for w in path.windows(2) {
            if w[0] < m {
                x[w[0]][w[1] - m] += amount;
            } else {
                let e = &mut x[w[1]][w[0] - m];
                *e = (*e - amount).max(0.0);
            }
        }
        supply[path[0]] -= amount;
        demand[j] -= amount;
    }
    let cost: f64 = (0..m)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .filter(|&(i, j)| x[i][j] > 0.0)
        .map(|(i, j)| x[i][j] * c[i][j])
        .sum();
    let (dist, _) = residual_paths(&c, &x, &(0..m).collect::<Vec<_>>());
    // sinks unreachable from any source keep potential 0
    let psi: Vec<f64> = (0..k).map(|j| if dist[m + j].is_finite() { -dist[m + j] } else { 0.0 }).collect();
    let f = (0..rho.len())
        .map(|z| {
            let v = snk
                .iter()
                .zip(&psi)
                .map(|(&y, p)| p + space.distance(z, y))
                .fold(f64::INFINITY, f64::min);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        })
        .collect();
    Transport { cost, potentials: Some(f) }
}

/// Bellman-Ford from `starts` (distance 0) over forward edges `i -> j` of
/// cost `c[i][j]` and backward edges `j -> i` of cost `-c[i][j]` where the
/// flow is positive. Sources are nodes `0..m`, sinks `m..m+k`.
fn residual_paths(c: &[Vec<f64>], x: &[Vec<f64>], starts: &[usize]) -> (Vec<f64>, Vec<Option<usize>>) {
    let (m, k) = (c.len(), c[0].len());
    let n = m + k;
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    for &s in starts {
        dist[s] = 0.0;
    }
    let scale = c.iter().flatten().filter(|v| v.is_finite()).fold(1.0f64, |a, &v| a.max(v));
    let eps = 1e-13 * scale;
    for _ in 0..n {
        let mut changed = false;
        for i in 0..m {
            for j in 0..k {
                let cij = c[i][j];
                if !cij.is_finite() {
                    continue;
                }
                if dist[i] + cij < dist[m + j] - eps {
                    dist[m + j] = dist[i] + cij;
                    pred[m + j] = Some(i);
                    changed = true;
                }
                if x[i][j] > 0.0 && dist[m + j] - cij < dist[i] - eps {
                    dist[i] = dist[m + j] - cij;
                    pred[i] = Some(m + j);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (dist, pred)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn line(xs: &[f64]) -> Arc<FiniteMetricSpace> {
        Arc::new(FiniteMetricSpace::from_points(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap())
    }

    /// On the line the distance is the L1 distance of the distribution functions.
    fn cdf_oracle(xs: &[f64], a: &[f64], b: &[f64]) -> f64 {
        let mut idx: Vec<usize> = (0..xs.len()).collect();
        idx.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
        let mut acc = 0.0;
        let mut out = 0.0;
        for w in idx.windows(2) {
            acc += a[w[0]] - b[w[0]];
            out += acc.abs() * (xs[w[1]] - xs[w[0]]);
        }
        out
    }

    fn assert_lipschitz(space: &FiniteMetricSpace, f: &[f64]) {
        for i in 0..f.len() {
            for j in 0..f.len() {
                assert!((f[i] - f[j]).abs() <= space.distance(i, j) + 1e-12);
            }
        }
    }

    #[test]
    fn equal_measures_are_at_distance_zero() {
        let s = line(&[0.0, 1.0, 2.5]);
        let mu = FinitelySupportedMeasure::probability(s, &[0.2, 0.3, 0.5]).unwrap();
        let r = kr_distance(&mu, &mu).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.gap, 0.0);
    }

    #[test]
    fn diracs_are_at_their_distance() {
        let s = line(&[0.0, 1.7]);
        let dx = FinitelySupportedMeasure::dirac(s.clone(), 0).unwrap();
        let dy = FinitelySupportedMeasure::dirac(s.clone(), 1).unwrap();
        let r = kr_distance(&dx, &dy).unwrap();
        assert!((r.value - 1.7).abs() < 1e-12);
        assert!(r.gap < 1e-12);
        assert_lipschitz(&s, r.potentials.as_ref().unwrap());
        let half = FinitelySupportedMeasure::probability(s, &[0.5, 0.5]).unwrap();
        assert!((kr_distance(&half, &dx).unwrap().value - 0.85).abs() < 1e-12);
    }

    #[test]
    fn half_and_half_on_discrete_space() {
        let s = Arc::new(FiniteMetricSpace::discrete(2));
        let a = FinitelySupportedMeasure::probability(s.clone(), &[0.5, 0.5]).unwrap();
        let b = FinitelySupportedMeasure::probability(s, &[1.0, 0.0]).unwrap();
        assert!((kr_distance(&a, &b).unwrap().value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn matches_line_oracle() {
        let xs = [0.3, -1.2, 2.0, 0.9, 4.4, -0.1, 1.6];
        let s = line(&xs);
        let a = [0.1, 0.2, 0.05, 0.25, 0.1, 0.2, 0.1];
        let b = [0.3, 0.0, 0.2, 0.1, 0.15, 0.05, 0.2];
        let mu = FinitelySupportedMeasure::probability(s.clone(), &a).unwrap();
        let nu = FinitelySupportedMeasure::probability(s.clone(), &b).unwrap();
        let r = kr_distance(&mu, &nu).unwrap();
        assert!((r.value - cdf_oracle(&xs, &a, &b)).abs() < 1e-12, "{r:?}");
        assert!(r.gap < 1e-12);
        assert_lipschitz(&s, r.potentials.as_ref().unwrap());
    }

    #[test]
    fn unequal_mass_is_infinite() {
        let s = Arc::new(FiniteMetricSpace::discrete(2));
        let a = FinitelySupportedMeasure::absolutely_convex(s.clone(), vec![C64::new(0.5, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let b = FinitelySupportedMeasure::dirac(s, 1).unwrap();
        let r = kr_distance(&a, &b).unwrap();
        assert!(r.value.is_infinite());
        assert!(r.potentials.is_none());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains(r#""value":"inf""#), "{json}");
    }

    #[test]
    fn disconnected_points_are_infinitely_far() {
        let inf = f64::INFINITY;
        let s = Arc::new(FiniteMetricSpace::new(vec![vec![0.0, inf], vec![inf, 0.0]]).unwrap());
        let dx = FinitelySupportedMeasure::dirac(s.clone(), 0).unwrap();
        let dy = FinitelySupportedMeasure::dirac(s.clone(), 1).unwrap();
        assert!(kr_distance(&dx, &dy).unwrap().value.is_infinite());
        assert_eq!(kr_distance(&dx, &dx).unwrap().value, 0.0);
    }

    #[test]
    fn complex_weights_take_the_best_phase() {
        let s = line(&[0.0, 2.0]);
        let i = C64::new(0.0, 1.0);
        let zero = C64::new(0.0, 0.0);
        let a = FinitelySupportedMeasure::absolutely_convex(s.clone(), vec![i, zero]).unwrap();
        let b = FinitelySupportedMeasure::absolutely_convex(s.clone(), vec![zero, i]).unwrap();
        let r = kr_distance(&a, &b).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
        assert!(r.theta.is_some());
        assert!(r.gap < 1e-9);
        assert_lipschitz(&s, r.potentials.as_ref().unwrap());
    }

    #[test]
    fn mismatched_and_oversized_inputs() {
        let a = FinitelySupportedMeasure::dirac(Arc::new(FiniteMetricSpace::discrete(2)), 0).unwrap();
        let b = FinitelySupportedMeasure::dirac(Arc::new(FiniteMetricSpace::discrete(3)), 0).unwrap();
        assert!(matches!(kr_distance(&a, &b), Err(Error::MismatchedSpaces)));
        let s = Arc::new(FiniteMetricSpace::discrete(MAX_SUPPORT + 1));
        let w = vec![1.0 / (MAX_SUPPORT + 1) as f64; MAX_SUPPORT + 1];
        let u = FinitelySupportedMeasure::probability(s.clone(), &w);
        let u = u.unwrap_or_else(|_| {
            let mut w = w.clone();
            let t: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= t);
            FinitelySupportedMeasure::probability(s.clone(), &w).unwrap()
        });
        let d = FinitelySupportedMeasure::dirac(s, 0).unwrap();
        assert!(matches!(kr_distance(&u, &d), Err(Error::SupportTooLarge { .. })));
    }
}
