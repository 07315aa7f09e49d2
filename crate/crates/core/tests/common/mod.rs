//! Reference implementations shared by the integration tests. None of these
//! call into the library's solvers.

#![allow(dead_code)]

use eld::generators::{barabasi_albert, cycle, erdos_renyi, ring_of_cliques, wheel, WeightDist};
use eld::Graph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Cyclic Jacobi eigensolver. Returns ascending eigenvalues and the matching
/// eigenvectors as columns (`vecs[r][i]` is entry `i` of vector `r`).
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].total_cmp(&m[j][j]));
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&c| (0..n).map(|r| v[r][c]).collect())
        .collect();
    (values, vectors)
}

/// Dense Laplacian `D − A` written straight from the edge list.
pub fn dense_laplacian(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut l = vec![vec![0.0; n]; n];
    for e in g.edges() {
        l[e.u][e.v] -= e.w;
        l[e.v][e.u] -= e.w;
        l[e.u][e.u] += e.w;
        l[e.v][e.v] += e.w;
    }
    l
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
pub fn assignment_cost(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| cost[p[j] - 1][j - 1]).sum()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Wasserstein-p between uniform measures by optimal assignment: each atom
/// of `a` is split into `L/m_a` equal pieces and each atom of `b` into
/// `L/m_b`, `L = lcm(m_a, m_b)`; by Birkhoff's theorem an optimal coupling of
/// the split measures is a permutation. No ordering of the supports is used.
pub fn brute_force_wasserstein(a: &[f64], b: &[f64], p: f64) -> f64 {
    let l = a.len() / gcd(a.len(), b.len()) * b.len();
    let xs: Vec<f64> = a
        .iter()
        .flat_map(|&x| std::iter::repeat_n(x, l / a.len()))
        .collect();
    let ys: Vec<f64> = b
        .iter()
        .flat_map(|&y| std::iter::repeat_n(y, l / b.len()))
        .collect();
    let cost: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| ys.iter().map(|y| (x - y).abs().powf(p)).collect())
        .collect();
    (assignment_cost(&cost) / l as f64).powf(1.0 / p)
}

pub fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Random orthonormal `n × k` matrix as `k` columns, via Gram-Schmidt.
pub fn random_orthonormal(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < k {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for c in &cols {
                let d: f64 = v.iter().zip(c).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(c).for_each(|(x, y)| *x -= d * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    cols
}

/// A connected weighted ER graph.
pub fn connected_weighted_er(n: usize, prob: f64, rng: &mut ChaCha8Rng) -> Graph {
    loop {
        let g = erdos_renyi(n, prob, rng.gen(), WeightDist::Exponential { scale: 20.0 }).unwrap();
        if g.is_connected() {
            return g;
        }
    }
}

/// A graph from one of the five families, with between `lo` and `hi`
/// vertices.
pub fn random_family_graph(lo: usize, hi: usize, rng: &mut ChaCha8Rng) -> Graph {
    loop {
        let n = rng.gen_range(lo..=hi);
        let g = match rng.gen_range(0..5) {
            0 => cycle(n).ok(),
            1 => wheel(n).ok(),
            2 => {
                let size = rng.gen_range(2..=5usize);
                let cliques = n / size;
                ring_of_cliques(cliques, size).ok()
            }
            3 => erdos_renyi(
                n,
                rng.gen_range(0.1..0.9),
                rng.gen(),
                WeightDist::Exponential {
                    scale: rng.gen_range(1.0..30.0),
                },
            )
            .ok(),
            _ => barabasi_albert(n, rng.gen_range(1..4).min(n - 1), rng.gen()).ok(),
        };
        if let Some(g) = g.filter(|g| (lo..=hi).contains(&g.n())) {
            return g;
        }
    }
}

/// Whether the `count` smallest eigenvalues are pairwise separated by `gap`.
pub fn has_simple_low_spectrum(g: &Graph, count: usize, gap: f64) -> bool {
    let (vals, _) = jacobi_eigen(&dense_laplacian(g));
    vals.windows(2).take(count).all(|w| w[1] - w[0] > gap)
}
