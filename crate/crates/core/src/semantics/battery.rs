use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TransitionSystem;
use crate::syntax::{ActionId, AtomId};

/// Shape of the random models in a battery.
#[derive(Clone, Debug)]
pub struct BatterySpec {
    pub max_states: usize,
    pub atoms: Vec<AtomId>,
    pub actions: Vec<ActionId>,
    /// Probability that a state satisfies an atom.
    pub prop_density: f64,
    /// Probability of each `(s, a, t)` edge.
    pub edge_density: f64,
}

impl BatterySpec {
    pub fn new(max_states: usize, atoms: Vec<AtomId>, actions: Vec<ActionId>) -> Self {
        BatterySpec {
            max_states,
            atoms,
            actions,
            prop_density: 0.5,
            edge_density: 0.4,
        }
    }
}

/// One model with `1..=max_states` states.
pub fn random_model<R: Rng>(rng: &mut R, spec: &BatterySpec) -> TransitionSystem {
    let n = rng.gen_range(1..=spec.max_states.max(1));
    let mut m = TransitionSystem::with_states(n);
    for p in &spec.atoms {
        let members: Vec<usize> = (0..n).filter(|_| rng.gen_bool(spec.prop_density)).collect();
        m.set_prop_indices(p.clone(), members);
    }
    for a in &spec.actions {
        for s in 0..n {
            for t in 0..n {
                if rng.gen_bool(spec.edge_density) {
                    m.add_edge(a.clone(), s, t);
                }
            }
        }
    }
    m
}

/// `count` models drawn from a ChaCha stream seeded with `seed`.
pub fn random_models(seed: u64, count: usize, spec: &BatterySpec) -> Vec<TransitionSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_model(&mut rng, spec)).collect()
}
