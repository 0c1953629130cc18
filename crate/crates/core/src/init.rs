//! Population initialization: good-nodes sets and the pseudo-random baseline.
//!
//! A good-nodes set places node `k` at the fractional parts `{k·g_1}, …, {k·g_D}`
//! of a fixed generator vector `g`, then maps the unit cube affinely onto the
//! search box. The default generator is the classical cyclotomic choice
//! `g_j = 2·cos(2πj/p)` with `p` the smallest prime not below `2D + 3`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{uniform, RngStream};
use crate::space::{Individual, SearchSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMode {
    #[default]
    GoodNodes,
    Random,
}

impl std::str::FromStr for InitMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "good-nodes" | "goodnodes" | "good_nodes" => Ok(Self::GoodNodes),
            "random" => Ok(Self::Random),
            other => Err(format!(
                "unknown init mode `{other}` (expected good-nodes or random)"
            )),
        }
    }
}

/// How the per-dimension generator offsets are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorRule {
    /// `g_j = 2·cos(2πj/p)`, `p` the smallest prime `>= 2D + 3`.
    Cyclotomic,
    /// `g_j = r^j`, the power sequence with offset `r > 0`.
    Power { r: f64 },
}

impl GeneratorRule {
    pub fn offsets(self, dim: usize) -> Vec<f64> {
        match self {
            GeneratorRule::Cyclotomic => {
                let p = smallest_prime_at_least(2 * dim + 3) as f64;
                (1..=dim)
                    .map(|j| 2.0 * (2.0 * std::f64::consts::PI * j as f64 / p).cos())
                    .collect()
            }
            GeneratorRule::Power { r } => (1..=dim as i32).map(|j| r.powi(j)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoodNodesConfig {
    count: usize,
    offsets: Vec<f64>,
}

impl GoodNodesConfig {
    pub fn new(count: usize, offsets: Vec<f64>) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter(
                "good-nodes count must be at least 1".into(),
            ));
        }
        if offsets.is_empty() {
            return Err(Error::InvalidParameter(
                "good-nodes dimension must be at least 1".into(),
            ));
        }
        if let Some(bad) = offsets.iter().find(|g| !g.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite generator offset {bad}"
            )));
        }
        Ok(Self { count, offsets })
    }

    pub fn with_rule(count: usize, dim: usize, rule: GeneratorRule) -> Result<Self> {
        if let GeneratorRule::Power { r } = rule {
            if r.is_nan() || r <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "power offset r must be > 0, got {r}"
                )));
            }
        }
        Self::new(count, rule.offsets(dim))
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dim(&self) -> usize {
        self.offsets.len()
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }
}

/// `x - floor(x)`, kept strictly below one.
fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        // x was a tiny negative number and the subtraction rounded up
        f64::from_bits(1.0f64.to_bits() - 1)
    } else {
        f
    }
}

/// Unit-cube nodes, row `k - 1` holding `{k·g_j}` for `k = 1..=count`.
pub fn good_nodes_unit(config: &GoodNodesConfig) -> Vec<Vec<f64>> {
    (1..=config.count)
        .map(|k| config.offsets.iter().map(|g| frac(k as f64 * g)).collect())
        .collect()
}

/// `x = lower + p·(upper - lower)` per row and dimension.
pub fn map_to_space(unit_points: &[Vec<f64>], space: &SearchSpace) -> Result<Vec<Vec<f64>>> {
    unit_points
        .iter()
        .map(|p| {
            space.check_dim(p.len())?;
            Ok(p.iter()
                .zip(space.lower().iter().zip(space.upper()))
                .map(|(u, (lo, hi))| lo + u * (hi - lo))
                .collect())
        })
        .collect()
}

pub fn init_good_nodes(n: usize, space: &SearchSpace) -> Result<Vec<Individual>> {
    check_population(n)?;
    let config = GoodNodesConfig::with_rule(n, space.dim(), GeneratorRule::Cyclotomic)?;
    Ok(map_to_space(&good_nodes_unit(&config), space)?
        .into_iter()
        .map(Individual::new)
        .collect())
}

/// Coordinates uniform on `[lower, upper)`, drawn point by point, dimension by
/// dimension.
pub fn init_random(n: usize, space: &SearchSpace, rng: &mut RngStream) -> Result<Vec<Individual>> {
    check_population(n)?;
    Ok((0..n)
        .map(|_| {
            Individual::new(
                space
                    .lower()
                    .iter()
                    .zip(space.upper())
                    .map(|(lo, hi)| lo + uniform(rng) * (hi - lo))
                    .collect(),
            )
        })
        .collect())
}

pub fn initialize(
    mode: InitMode,
    n: usize,
    space: &SearchSpace,
    rng: &mut RngStream,
) -> Result<Vec<Individual>> {
    match mode {
        InitMode::GoodNodes => init_good_nodes(n, space),
        InitMode::Random => init_random(n, space, rng),
    }
}

fn check_population(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidParameter(format!(
            "population size must be at least 2, got {n}"
        )))
    } else {
        Ok(())
    }
}

fn smallest_prime_at_least(n: usize) -> usize {
    (n.max(2)..)
        .find(|&c| (2..).take_while(|d| d * d <= c).all(|d| c % d != 0))
        .expect("primes are unbounded")
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::rng::rng_stream;
    use proptest::prelude::*;

    #[test]
    fn single_node_is_fractional_part() {
        let cfg = GoodNodesConfig::new(1, vec![1.5]).unwrap();
        assert_eq!(good_nodes_unit(&cfg), vec![vec![0.5]]);
    }

    #[test]
    fn integer_multiples_wrap_to_zero() {
        let cfg = GoodNodesConfig::new(2, vec![1.5]).unwrap();
        assert_eq!(good_nodes_unit(&cfg), vec![vec![0.5], vec![0.0]]);
    }

    #[test]
    fn cyclotomic_nodes_match_high_precision_values() {
        // frac(k * 2cos(2πj/7)) at 50 digits (mpmath)
        let expected = [
            [0.24697960371746706105, 0.55495813208737119142],
            [0.4939592074349341221, 0.10991626417474238284],
            [0.74093881115240118315, 0.66487439626211357427],
        ];
        let cfg = GoodNodesConfig::with_rule(3, 2, GeneratorRule::Cyclotomic).unwrap();
        let nodes = good_nodes_unit(&cfg);
        for (row, want) in nodes.iter().zip(expected) {
            for (got, want) in row.iter().zip(want) {
                assert!((got - want).abs() < 1e-12, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn negative_offsets_use_floor_convention() {
        let cfg = GoodNodesConfig::new(1, vec![-0.25]).unwrap();
        assert_eq!(good_nodes_unit(&cfg), vec![vec![0.75]]);
        assert!(frac(-1e-300) < 1.0);
    }

    #[test]
    fn prime_selection() {
        assert_eq!(smallest_prime_at_least(7), 7);
        assert_eq!(smallest_prime_at_least(8), 11);
        assert_eq!(smallest_prime_at_least(2 * 30 + 3), 67);
    }

    #[test]
    fn power_rule_offsets() {
        let offs = GeneratorRule::Power { r: 2.0 }.offsets(3);
        assert_eq!(offs, vec![2.0, 4.0, 8.0]);
        assert!(GoodNodesConfig::with_rule(3, 2, GeneratorRule::Power { r: -1.0 }).is_err());
    }

    #[test]
    fn mapping_examples() {
        let wide = SearchSpace::uniform(1, -100.0, 100.0).unwrap();
        assert_eq!(map_to_space(&[vec![0.5]], &wide).unwrap(), vec![vec![0.0]]);
        assert_eq!(
            map_to_space(&[vec![0.0]], &wide).unwrap(),
            vec![vec![-100.0]]
        );
        let rastrigin = SearchSpace::uniform(1, -5.12, 5.12).unwrap();
        let x = map_to_space(&[vec![0.25]], &rastrigin).unwrap()[0][0];
        assert!((x - -2.56).abs() < 1e-15);
        assert!(map_to_space(&[vec![0.1, 0.2]], &wide).is_err());
    }

    #[test]
    fn two_nodes_are_distinct() {
        let space = SearchSpace::uniform(1, 0.0, 1.0).unwrap();
        let pop = init_good_nodes(2, &space).unwrap();
        assert_ne!(pop[0].position(), pop[1].position());
    }

    #[test]
    fn good_nodes_fill_high_dimensional_box() {
        let space = SearchSpace::uniform(30, -32.0, 32.0).unwrap();
        let pop = init_good_nodes(30, &space).unwrap();
        assert_eq!(pop.len(), 30);
        assert!(pop
            .iter()
            .all(|ind| space.contains(ind.position()) && ind.fitness().is_none()));
    }

    #[test]
    fn good_nodes_are_pure() {
        let space = SearchSpace::uniform(5, -1.0, 1.0).unwrap();
        assert_eq!(
            init_good_nodes(20, &space).unwrap(),
            init_good_nodes(20, &space).unwrap()
        );
    }

    #[test]
    fn random_init_is_reproducible_and_uniform() {
        let space = SearchSpace::uniform(1, 0.0, 1.0).unwrap();
        let a = init_random(10_000, &space, &mut rng_stream(3)).unwrap();
        let b = init_random(10_000, &space, &mut rng_stream(3)).unwrap();
        assert_eq!(a, b);
        let mean = a.iter().map(|i| i.position()[0]).sum::<f64>() / a.len() as f64;
        assert!((0.49..=0.51).contains(&mean), "mean {mean}");
        assert!(a.iter().all(|i| space.contains(i.position())));
    }

    #[test]
    fn population_must_have_two_members() {
        let space = SearchSpace::uniform(1, 0.0, 1.0).unwrap();
        assert!(init_good_nodes(1, &space).is_err());
        assert!(init_random(1, &space, &mut rng_stream(0)).is_err());
    }

    #[test]
    fn init_mode_parses() {
        assert_eq!(
            "good-nodes".parse::<InitMode>().unwrap(),
            InitMode::GoodNodes
        );
        assert_eq!("random".parse::<InitMode>().unwrap(), InitMode::Random);
        assert!("sobol".parse::<InitMode>().is_err());
    }

    proptest! {
        #[test]
        fn unit_nodes_stay_in_unit_interval(count in 1usize..64, offs in proptest::collection::vec(-50.0f64..50.0, 1..6)) {
            let cfg = GoodNodesConfig::new(count, offs).unwrap();
            for row in good_nodes_unit(&cfg) {
                prop_assert!(row.iter().all(|u| (0.0..1.0).contains(u)));
            }
        }

        #[test]
        fn mapping_is_monotone(p in 0.0f64..1.0, q in 0.0f64..1.0, lo in -100.0f64..0.0, width in 0.1f64..100.0) {
            let space = SearchSpace::uniform(1, lo, lo + width).unwrap();
            let m = map_to_space(&[vec![p], vec![q]], &space).unwrap();
            if p < q {
                prop_assert!(m[0][0] <= m[1][0]);
            }
            prop_assert!(space.contains(&m[0]));
        }
    }
}
