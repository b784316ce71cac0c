use malleable::submodular::solve_submodular;
use malleable_bench::gantt::gantt_rects;
use malleable_bench::{emit_gantt, generate, read_csv, write_csv, BenchRecord, Family, GeneratorConfig};
use proptest::prelude::*;

#[test]
fn gantt_rectangles_never_overlap_on_a_lane() {
    for seed in 0..10 {
        let inst = generate(&GeneratorConfig::new(Family::BudgetAdditive, 6, 4, seed)).unwrap();
        let schedule = solve_submodular(&inst, 1e-6).unwrap().schedule;
        let rects = gantt_rects(&inst, &schedule).unwrap();
        for (a, ra) in rects.iter().enumerate() {
            for rb in &rects[a + 1..] {
                let lanes_meet = ra.first_lane < rb.first_lane + rb.lanes && rb.first_lane < ra.first_lane + ra.lanes;
                let times_meet = ra.start < rb.end - 1e-9 && rb.start < ra.end - 1e-9;
                assert!(!(lanes_meet && times_meet), "{ra:?} overlaps {rb:?}");
            }
        }
        let svg = emit_gantt(&inst, &schedule).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}

fn record() -> impl Strategy<Value = BenchRecord> {
    (
        "[a-z_]{1,12}",
        1usize..100,
        1usize..64,
        any::<u64>(),
        prop::sample::select(vec!["submodular", "matroid", "transform_opt"]),
        (0.0f64..1e6, 0.0f64..1e6, 0.0f64..1e6, 0.0f64..1e4),
    )
        .prop_map(|(family, n, m, seed, algo, (lb, load, makespan, ms))| BenchRecord {
            instance_id: format!("{family}-n{n}-m{m}-s{seed}"),
            family,
            n,
            m,
            seed,
            algo: algo.to_string(),
            lower_bound: lb,
            load,
            makespan,
            ratio_load: load / lb.max(1e-9),
            ratio_makespan: makespan / lb.max(1e-9),
            ms,
        })
}

proptest! {
    #[test]
    fn csv_round_trip(records in prop::collection::vec(record(), 0..20)) {
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        prop_assert_eq!(read_csv(buf.as_slice()).unwrap(), records);
    }
}
