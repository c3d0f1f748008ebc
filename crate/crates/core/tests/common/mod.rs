#![allow(dead_code)]

use hopsched::{generate, EdgeTarget, GenSpec, ProjectNetwork, Task};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random DAG with shuffled labels, so edges are not always low-to-high index.
pub fn random_dag(seed: u64, max_n: usize, p: f64) -> ProjectNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = rng.gen_range(1..=max_n);
    let base = generate(&GenSpec::new(n, EdgeTarget::Probability(p)).with_demands(0.0, 3.0).with_seed(seed)).unwrap();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    permuted(&base, &perm)
}

/// Task `i` of `net` becomes task `perm[i]` of the result.
pub fn permuted(net: &ProjectNetwork, perm: &[usize]) -> ProjectNetwork {
    let n = net.len();
    let mut tasks: Vec<Option<Task>> = vec![None; n];
    for (i, t) in net.tasks().iter().enumerate() {
        tasks[perm[i]] = Some(t.clone());
    }
    let edges = net.edges().iter().map(|&(i, j)| (perm[i], perm[j])).collect();
    ProjectNetwork::from_indices(tasks.into_iter().map(Option::unwrap).collect(), edges).unwrap()
}

pub fn random_starts(seed: u64, n: usize, hi: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(7));
    (0..n).map(|_| rng.gen_range(0.0..hi)).collect()
}
