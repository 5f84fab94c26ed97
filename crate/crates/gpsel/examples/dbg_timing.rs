use gpsel::bench::{run_replicates, SimExample};
use gpsel::selector::Method;
use std::time::Instant;

fn main() {
    let ex = SimExample::standard(1).unwrap();
    let methods = Method::all(true);
    let t = Instant::now();
    let report = run_replicates(&ex, &methods, 15, 200, 100, 42).unwrap();
    println!("100 reps, all methods: {:.1?}", t.elapsed());
    for row in &report.rows {
        println!(
            "{:>7}  mse {:.3} ({:.3})  hits {:?}  fp {:?}",
            row.method,
            row.metrics.mse,
            row.metrics.mse_se,
            row.metrics.hits.map(|v| (v * 100.0).round() / 100.0),
            row.metrics.fp.map(|v| (v * 100.0).round() / 100.0)
        );
    }
}
