//! Graph families: cycles, wheels, rings of cliques, Erdős–Rényi and
//! Barabási–Albert.
//!
//! Random families use `ChaCha8Rng` seeded with `seed_from_u64(seed)`.
//! Erdős–Rényi visits pairs `(i, j)`, `i < j`, in row-major order, drawing one
//! uniform for inclusion and, for included edges with exponential weights, one
//! more uniform mapped through the inverse CDF (`scale` is the mean).
//! Barabási–Albert draws attachment targets in arrival order.
//!
//! Canonical spec strings:
//!
//! ```text
//! cycle:N            wheel:N            roc:CLIQUES,SIZE
//! er:N,PROB[,seed=S][,exp=SCALE]        ba:N,M[,seed=S]
//! ```

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("{family} needs {requirement}")]
    TooSmall {
        family: &'static str,
        requirement: &'static str,
    },
    #[error("edge probability {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error("exponential scale {0} must be positive")]
    BadScale(f64),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("cannot parse generator spec {spec:?}: {reason}")]
    Parse { spec: String, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum WeightDist {
    #[default]
    Unit,
    /// Exponential with the given mean.
    Exponential { scale: f64 },
}

impl WeightDist {
    fn validate(self) -> Result<(), GeneratorError> {
        match self {
            WeightDist::Exponential { scale } if !(scale > 0.0 && scale.is_finite()) => {
                Err(GeneratorError::BadScale(scale))
            }
            _ => Ok(()),
        }
    }

    fn sample(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            WeightDist::Unit => 1.0,
            WeightDist::Exponential { scale } => {
                let u: f64 = rng.gen();
                -scale * (1.0 - u).ln()
            }
        }
    }
}

/// A parametrized graph family instance.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Cycle {
        n: usize,
    },
    Wheel {
        n: usize,
    },
    RingOfCliques {
        cliques: usize,
        size: usize,
    },
    ErdosRenyi {
        n: usize,
        prob: f64,
        seed: u64,
        weights: WeightDist,
    },
    BarabasiAlbert {
        n: usize,
        m: usize,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Graph, GeneratorError> {
        match *self {
            GeneratorSpec::Cycle { n } => cycle(n),
            GeneratorSpec::Wheel { n } => wheel(n),
            GeneratorSpec::RingOfCliques { cliques, size } => ring_of_cliques(cliques, size),
            GeneratorSpec::ErdosRenyi {
                n,
                prob,
                seed,
                weights,
            } => erdos_renyi(n, prob, seed, weights),
            GeneratorSpec::BarabasiAlbert { n, m, seed } => barabasi_albert(n, m, seed),
        }
    }

    /// Same spec with a different seed; deterministic families are returned
    /// unchanged.
    pub fn with_seed(&self, seed: u64) -> GeneratorSpec {
        let mut out = self.clone();
        match &mut out {
            GeneratorSpec::ErdosRenyi { seed: s, .. }
            | GeneratorSpec::BarabasiAlbert { seed: s, .. } => *s = seed,
            _ => {}
        }
        out
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Cycle { n } => write!(f, "cycle:{n}"),
            GeneratorSpec::Wheel { n } => write!(f, "wheel:{n}"),
            GeneratorSpec::RingOfCliques { cliques, size } => write!(f, "roc:{cliques},{size}"),
            GeneratorSpec::ErdosRenyi {
                n,
                prob,
                seed,
                weights,
            } => {
                write!(f, "er:{n},{prob},seed={seed}")?;
                if let WeightDist::Exponential { scale } = weights {
                    write!(f, ",exp={scale}")?;
                }
                Ok(())
            }
            GeneratorSpec::BarabasiAlbert { n, m, seed } => write!(f, "ba:{n},{m},seed={seed}"),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| GeneratorError::Parse {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let (family, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| fail("missing ':'"))?;
        let mut positional = Vec::new();
        let mut seed = None;
        let mut exp = None;
        for part in rest.split(',').map(str::trim) {
            match part.split_once('=') {
                Some(("seed", v)) => {
                    seed = Some(v.parse::<u64>().map_err(|_| fail("bad seed"))?);
                }
                Some(("exp", v)) => {
                    exp = Some(v.parse::<f64>().map_err(|_| fail("bad exp scale"))?);
                }
                Some((key, _)) => return Err(fail(&format!("unknown option {key:?}"))),
                None => positional.push(part),
            }
        }
        let int = |i: usize| -> Result<usize, GeneratorError> {
            positional
                .get(i)
                .ok_or_else(|| fail("missing parameter"))?
                .parse()
                .map_err(|_| fail("expected a non-negative integer"))
        };
        let arity = |count: usize| {
            if positional.len() == count {
                Ok(())
            } else {
                Err(fail(&format!("expected {count} positional parameter(s)")))
            }
        };
        let no_options = |allowed_seed: bool, allowed_exp: bool| {
            if (seed.is_some() && !allowed_seed) || (exp.is_some() && !allowed_exp) {
                Err(fail("option not valid for this family"))
            } else {
                Ok(())
            }
        };
        match family {
            "cycle" | "wheel" => {
                arity(1)?;
                no_options(false, false)?;
                let n = int(0)?;
                Ok(if family == "cycle" {
                    GeneratorSpec::Cycle { n }
                } else {
                    GeneratorSpec::Wheel { n }
                })
            }
            "roc" => {
                arity(2)?;
                no_options(false, false)?;
                Ok(GeneratorSpec::RingOfCliques {
                    cliques: int(0)?,
                    size: int(1)?,
                })
            }
            "er" => {
                arity(2)?;
                no_options(true, true)?;
                let prob = positional[1]
                    .parse::<f64>()
                    .map_err(|_| fail("bad probability"))?;
                Ok(GeneratorSpec::ErdosRenyi {
                    n: int(0)?,
                    prob,
                    seed: seed.unwrap_or(0),
                    weights: exp
                        .map(|scale| WeightDist::Exponential { scale })
                        .unwrap_or(WeightDist::Unit),
                })
            }
            "ba" => {
                arity(2)?;
                no_options(true, false)?;
                Ok(GeneratorSpec::BarabasiAlbert {
                    n: int(0)?,
                    m: int(1)?,
                    seed: seed.unwrap_or(0),
                })
            }
            _ => Err(fail("unknown family")),
        }
    }
}

pub fn cycle(n: usize) -> Result<Graph, GeneratorError> {
    if n < 3 {
        return Err(GeneratorError::TooSmall {
            family: "cycle",
            requirement: "n >= 3",
        });
    }
    Ok(Graph::unweighted(n, (0..n).map(|i| (i, (i + 1) % n)))?)
}

/// Hub `0` joined to every rim vertex; rim `1..n` forms a cycle. `n` counts
/// all vertices.
pub fn wheel(n: usize) -> Result<Graph, GeneratorError> {
    if n < 4 {
        return Err(GeneratorError::TooSmall {
            family: "wheel",
            requirement: "n >= 4",
        });
    }
    let spokes = (1..n).map(|i| (0, i));
    let rim = (1..n).map(|i| (i, if i + 1 < n { i + 1 } else { 1 }));
    Ok(Graph::unweighted(n, spokes.chain(rim))?)
}

/// `cliques` complete graphs of `size` vertices. Clique `q` holds vertices
/// `q·size..(q+1)·size`; its first vertex is bridged to the first vertex of
/// clique `q + 1 (mod cliques)`.
///
/// With two cliques both bridges would be the same edge, so the second one
/// joins the last vertices instead.
pub fn ring_of_cliques(cliques: usize, size: usize) -> Result<Graph, GeneratorError> {
    if cliques < 2 || size < 2 {
        return Err(GeneratorError::TooSmall {
            family: "ring of cliques",
            requirement: "at least 2 cliques of at least 2 vertices",
        });
    }
    let n = cliques * size;
    let mut edges = Vec::with_capacity(cliques * (size * (size - 1) / 2 + 1));
    for q in 0..cliques {
        let base = q * size;
        for i in 0..size {
            for j in i + 1..size {
                edges.push((base + i, base + j));
            }
        }
        if cliques == 2 && q == 1 {
            edges.push((size - 1, base + size - 1));
        } else {
            edges.push((base, ((q + 1) % cliques) * size));
        }
    }
    Ok(Graph::unweighted(n, edges)?)
}

pub fn erdos_renyi(
    n: usize,
    prob: f64,
    seed: u64,
    weights: WeightDist,
) -> Result<Graph, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::TooSmall {
            family: "Erdős–Rényi",
            requirement: "n >= 1",
        });
    }
    if !(0.0..=1.0).contains(&prob) {
        return Err(GeneratorError::BadProbability(prob));
    }
    weights.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let u: f64 = rng.gen();
            if u < prob {
                edges.push((i, j, weights.sample(&mut rng)));
            }
        }
    }
    Ok(Graph::new(n, edges)?)
}

/// Preferential attachment starting from `m` isolated vertices. The first
/// arrival links to all of them; later arrivals pick `m` distinct targets
/// with probability proportional to degree.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph, GeneratorError> {
    if m == 0 || m >= n {
        return Err(GeneratorError::BadParams(format!(
            "Barabási–Albert needs 1 <= m < n (got n={n}, m={m})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Every edge endpoint once, so a uniform index is a degree-weighted draw.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * m * (n - m));
    let mut edges = Vec::with_capacity(m * (n - m));
    let mut targets: Vec<usize> = (0..m).collect();
    for v in m..n {
        for &t in &targets {
            edges.push((v, t));
            endpoints.push(v);
            endpoints.push(t);
        }
        targets.clear();
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
    }
    Ok(Graph::unweighted(n, edges)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::laplacian;
    use proptest::prelude::*;

    #[test]
    fn cycle_examples() {
        let c3 = cycle(3).unwrap();
        assert_eq!(c3.edge_count(), 3);
        assert_eq!(c3.edge_degrees(), vec![2, 2, 2]);
        let c4 = cycle(4).unwrap();
        assert_eq!((c4.n(), c4.edge_count()), (4, 4));
        assert!(c4.edge_degrees().iter().all(|&d| d == 2));
        let c50 = cycle(50).unwrap();
        assert_eq!(c50.edge_count(), 50);
        assert!(c50.is_connected());
        assert!(cycle(2).is_err());
    }

    #[test]
    fn wheel_examples() {
        let w4 = wheel(4).unwrap();
        assert_eq!(w4.edge_count(), 6);
        assert_eq!(w4.edge_degrees(), vec![3, 3, 3, 3]);
        let w5 = wheel(5).unwrap();
        assert_eq!(w5.edge_degrees(), vec![4, 3, 3, 3, 3]);
        assert_eq!(wheel(100).unwrap().edge_count(), 198);
        assert!(wheel(3).is_err());
    }

    #[test]
    fn ring_of_cliques_examples() {
        let r = ring_of_cliques(3, 3).unwrap();
        assert_eq!(r.n(), 9);
        assert_eq!(r.edge_count(), 12);
        let r = ring_of_cliques(2, 2).unwrap();
        assert_eq!((r.n(), r.edge_count()), (4, 4));
        assert!(r.is_connected());
        assert_eq!(r.edge_degrees(), vec![2; 4]);
        // The first vertex of each clique carries both of its bridges.
        let r = ring_of_cliques(4, 3).unwrap();
        assert_eq!(r.edge_degrees(), vec![4, 2, 2, 4, 2, 2, 4, 2, 2, 4, 2, 2]);
        assert!(ring_of_cliques(1, 3).is_err());
        assert!(ring_of_cliques(3, 1).is_err());
    }

    #[test]
    fn erdos_renyi_extremes_and_errors() {
        let full = erdos_renyi(7, 1.0, 3, WeightDist::Unit).unwrap();
        assert_eq!(full.edge_count(), 21);
        let empty = erdos_renyi(7, 0.0, 3, WeightDist::Unit).unwrap();
        assert_eq!(empty.edge_count(), 0);
        assert_eq!(
            erdos_renyi(5, 1.5, 0, WeightDist::Unit).unwrap_err(),
            GeneratorError::BadProbability(1.5)
        );
        assert_eq!(
            erdos_renyi(5, 0.5, 0, WeightDist::Exponential { scale: 0.0 }).unwrap_err(),
            GeneratorError::BadScale(0.0)
        );
    }

    #[test]
    fn erdos_renyi_is_reproducible() {
        let w = WeightDist::Exponential { scale: 20.0 };
        let a = erdos_renyi(20, 0.2, 7, w).unwrap();
        let b = erdos_renyi(20, 0.2, 7, w).unwrap();
        assert_eq!(a, b);
        assert!(a.edges().iter().all(|e| e.w >= 0.0));
        assert_ne!(a, erdos_renyi(20, 0.2, 8, w).unwrap());
    }

    #[test]
    fn erdos_renyi_mean_edge_count() {
        let total: usize = (0..200)
            .map(|s| {
                erdos_renyi(30, 0.2, s, WeightDist::Unit)
                    .unwrap()
                    .edge_count()
            })
            .sum();
        let mean = total as f64 / 200.0;
        let expected = 0.2 * 435.0;
        assert!((mean - expected).abs() <= 0.1 * expected, "{mean}");
    }

    #[test]
    fn exponential_weights_have_the_requested_mean() {
        let g = erdos_renyi(200, 1.0, 11, WeightDist::Exponential { scale: 20.0 }).unwrap();
        let mean = g.edges().iter().map(|e| e.w).sum::<f64>() / g.edge_count() as f64;
        assert!((mean - 20.0).abs() < 1.0, "{mean}");
    }

    #[test]
    fn barabasi_albert_examples() {
        let g = barabasi_albert(50, 3, 1).unwrap();
        assert_eq!(g.edge_count(), 47 * 3);
        assert_eq!(g, barabasi_albert(50, 3, 1).unwrap());
        let tree = barabasi_albert(5, 1, 9).unwrap();
        assert_eq!(tree.edge_count(), 4);
        assert!(tree.is_connected());
        assert!(barabasi_albert(3, 3, 0).is_err());
        assert!(barabasi_albert(3, 0, 0).is_err());
    }

    #[test]
    fn spec_strings() {
        for s in [
            "cycle:50",
            "wheel:100",
            "roc:6,3",
            "er:100,0.8,seed=7,exp=20",
            "er:30,0.2,seed=0",
            "ba:500,3,seed=1",
        ] {
            let spec: GeneratorSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        let er: GeneratorSpec = "er:10,0.5".parse().unwrap();
        assert_eq!(er.to_string(), "er:10,0.5,seed=0");
        for bad in [
            "cycle",
            "cycle:x",
            "cycle:5,seed=1",
            "roc:3",
            "tree:4",
            "er:5,0.5,foo=1",
            "ba:5",
        ] {
            assert!(bad.parse::<GeneratorSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn cycle_fiedler_value() {
        use nalgebra::SymmetricEigen;
        let l = laplacian(&cycle(50).unwrap()).to_dense();
        let mut ev: Vec<f64> = SymmetricEigen::new(l).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let expected = 2.0 - 2.0 * (2.0 * std::f64::consts::PI / 50.0).cos();
        assert!((ev[1] - expected).abs() < 1e-10);
    }

    fn spec_strategy() -> impl Strategy<Value = GeneratorSpec> {
        prop_oneof![
            (3usize..40).prop_map(|n| GeneratorSpec::Cycle { n }),
            (4usize..40).prop_map(|n| GeneratorSpec::Wheel { n }),
            (2usize..6, 2usize..6)
                .prop_map(|(cliques, size)| GeneratorSpec::RingOfCliques { cliques, size }),
            (
                1usize..40,
                0.0f64..=1.0,
                any::<u64>(),
                prop::option::of(0.1f64..50.0)
            )
                .prop_map(|(n, prob, seed, scale)| GeneratorSpec::ErdosRenyi {
                    n,
                    prob,
                    seed,
                    weights: scale
                        .map_or(WeightDist::Unit, |scale| WeightDist::Exponential { scale }),
                }),
            (2usize..40, any::<u64>()).prop_flat_map(|(n, seed)| (1..n)
                .prop_map(move |m| { GeneratorSpec::BarabasiAlbert { n, m, seed } })),
        ]
    }

    proptest! {
        #[test]
        fn specs_round_trip_and_generate(spec in spec_strategy()) {
            let parsed: GeneratorSpec = spec.to_string().parse().unwrap();
            prop_assert_eq!(&parsed, &spec);
            let g = spec.generate().unwrap();
            if matches!(spec, GeneratorSpec::Cycle { .. } | GeneratorSpec::Wheel { .. } | GeneratorSpec::RingOfCliques { .. }) {
                prop_assert!(g.is_connected());
            }
            // Generated edge lists already satisfy validation.
            let rebuilt = Graph::new(g.n(), g.edges().iter().map(|e| (e.u, e.v, e.w)));
            prop_assert!(rebuilt.is_ok());
        }
    }
}
