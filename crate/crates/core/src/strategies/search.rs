use rand::seq::SliceRandom;
use rand::Rng;

use super::{strategy_rng, GaConfig, NoObserver, StepObserver, StrategyRng};
use crate::coverage::{CoverageMatrix, Ordering};
use crate::evaluation::apsc_of_permutation;
use crate::strategies::StrategyId;

#[derive(Clone)]
struct Individual {
    genes: Vec<usize>,
    fitness: f64,
}

/// Partially mapped crossover. The child copies `p1[lo..=hi]` and fills the
/// remaining positions from `p2`, following the segment mapping for values
/// that would otherwise be duplicated.
#[allow(clippy::needless_range_loop)]
pub fn pmx(p1: &[usize], p2: &[usize], lo: usize, hi: usize) -> Vec<usize> {
    let n = p1.len();
    assert!(lo <= hi && hi < n && p2.len() == n);
    const EMPTY: usize = usize::MAX;
    let mut child = vec![EMPTY; n];
    let mut pos_in_p2 = vec![0usize; n];
    for (i, &v) in p2.iter().enumerate() {
        pos_in_p2[v] = i;
    }
    let mut in_segment = vec![false; n];
    for i in lo..=hi {
        child[i] = p1[i];
        in_segment[p1[i]] = true;
    }
    for i in lo..=hi {
        let v = p2[i];
        if in_segment[v] {
            continue;
        }
        let mut j = i;
        loop {
            j = pos_in_p2[p1[j]];
            if j < lo || j > hi {
                break;
            }
        }
        child[j] = v;
    }
    for i in 0..n {
        if child[i] == EMPTY {
            child[i] = p2[i];
        }
    }
    child
}

fn tournament<'a>(rng: &mut StrategyRng, pop: &'a [Individual], size: usize) -> &'a Individual {
    let mut best = &pop[rng.gen_range(0..pop.len())];
    for _ in 1..size {
        let other = &pop[rng.gen_range(0..pop.len())];
        if other.fitness > best.fitness {
            best = other;
        }
    }
    best
}

fn fittest(pop: &[Individual]) -> &Individual {
    pop.iter()
        .reduce(|a, b| if b.fitness > a.fitness { b } else { a })
        .expect("population is non-empty")
}

/// Genetic search over test orders maximizing APSC (average percentage of
/// statement coverage). Tournament selection, PMX crossover, swap mutation
/// and single-individual elitism. `recompute_count` counts fitness
/// evaluations.
pub fn search_based(matrix: &CoverageMatrix, seed: u64, ga: &GaConfig) -> Ordering {
    search_based_observed(matrix, seed, ga, &mut NoObserver)
}

pub fn search_based_observed<O: StepObserver>(
    matrix: &CoverageMatrix,
    seed: u64,
    ga: &GaConfig,
    observer: &mut O,
) -> Ordering {
    let n = matrix.test_count();
    if n == 1 {
        observer.selected(0, None);
        return Ordering::new(StrategyId::Search, seed, vec![0]);
    }
    let mut rng = strategy_rng(seed);
    let mut evaluations = 0u64;
    let mut evaluate = |genes: Vec<usize>| {
        evaluations += 1;
        let fitness = apsc_of_permutation(&genes, matrix);
        Individual { genes, fitness }
    };

    let mut population: Vec<Individual> = (0..ga.population)
        .map(|_| {
            let mut genes: Vec<usize> = (0..n).collect();
            genes.shuffle(&mut rng);
            evaluate(genes)
        })
        .collect();

    for _ in 0..ga.generations {
        let mut next = Vec::with_capacity(ga.population);
        next.push(fittest(&population).clone());
        while next.len() < ga.population {
            let a = tournament(&mut rng, &population, ga.tournament_size);
            let b = tournament(&mut rng, &population, ga.tournament_size);
            let mut genes = if rng.gen_bool(ga.crossover_rate) {
                let x = rng.gen_range(0..n);
                let y = rng.gen_range(0..n);
                pmx(&a.genes, &b.genes, x.min(y), x.max(y))
            } else {
                a.genes.clone()
            };
            if rng.gen_bool(ga.mutation_rate) {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                genes.swap(i, j);
            }
            next.push(evaluate(genes));
        }
        population = next;
    }

    let best = fittest(&population);
    for &t in &best.genes {
        observer.selected(t, None);
    }
    let mut ordering = Ordering::new(StrategyId::Search, seed, best.genes.clone());
    ordering.instrumentation.recompute_count = evaluations;
    ordering
}
