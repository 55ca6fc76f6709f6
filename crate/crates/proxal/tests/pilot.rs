use proxal::lowrank::{gen_instance, run_method, BenchOptions, MethodName};

#[test]
#[ignore]
fn pilot_paper_dims() {
    let opts = BenchOptions {
        unsafe_heuristic: true,
        ..Default::default()
    };
    for seed in [1000u64, 1001, 1002] {
        let t0 = std::time::Instant::now();
        let inst = gen_instance(seed, 100, 110, 4, 450).unwrap();
        println!("seed {seed}: gen {:.2}s", t0.elapsed().as_secs_f64());
        for name in [
            MethodName::Altproj,
            MethodName::Avrgproj,
            MethodName::Dr,
            MethodName::GlobIpianoAltprojBt,
            MethodName::LocIpianoAltprojBt,
        ] {
            let t0 = std::time::Instant::now();
            let trace = run_method(name, &inst, &opts).unwrap();
            let r0 = trace.initial_residual().unwrap();
            let mut line = format!(
                "  {name:<28} {:>4} iters {:>6.2}s status={:?} ",
                trace.len() - 1,
                t0.elapsed().as_secs_f64(),
                trace.status
            );
            for p in [1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12] {
                match trace.iterations_to_precision(p) {
                    Some(k) => line.push_str(&format!("{k:>5}")),
                    None => line.push_str("  ---"),
                }
            }
            line.push_str(&format!("  rel_last={:.1e}", trace.last_residual().unwrap() / r0));
            println!("{line}");
        }
    }
}
