use malleable::{machine_loads, Assignment, Instance, MachineSet, SpeedModel};
use malleable_bench::{exact_milp, generate, lp_lower_bound, Family, GeneratorConfig, MilpLimits};

/// Minimum max-load over every assignment of non-empty sets.
fn enumerate_opt(inst: &Instance) -> f64 {
    let n = inst.job_count();
    let full = MachineSet::full(inst.machine_count());
    let sets: Vec<MachineSet> = full.subsets().filter(|s| !s.is_empty()).collect();
    let mut idx = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let a = Assignment::new(idx.iter().map(|&k| sets[k]).collect());
        if let Ok(p) = machine_loads(inst, &a) {
            best = best.min(p.max_load);
        }
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < sets.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return best;
        }
    }
}

fn small_instances() -> impl Iterator<Item = Instance> {
    let families = [Family::Coverage, Family::BudgetAdditive, Family::MatroidMatching, Family::MatroidRank];
    (0..30u64).map(move |seed| {
        let family = families[seed as usize % families.len()];
        let n = 1 + (seed as usize % 4);
        let m = 2 + (seed as usize % 3);
        generate(&GeneratorConfig::new(family, n, m, seed)).unwrap()
    })
}

#[test]
fn branch_and_bound_matches_enumeration() {
    for inst in small_instances() {
        let exact = exact_milp(&inst, MilpLimits::default()).unwrap();
        let brute = enumerate_opt(&inst);
        assert!((exact.value - brute).abs() <= 1e-9 * brute.max(1.0), "{} vs {brute}", exact.value);
        let load = machine_loads(&inst, &exact.assignment).unwrap().max_load;
        assert!((load - exact.value).abs() <= 1e-9 * load.max(1.0));
    }
}

#[test]
fn lp_bound_never_exceeds_optimum() {
    for inst in small_instances() {
        let exact = exact_milp(&inst, MilpLimits::default()).unwrap();
        let lb = lp_lower_bound(&inst).unwrap();
        assert!(lb <= exact.value * (1.0 + 1e-7), "bound {lb} above optimum {}", exact.value);
    }
}
