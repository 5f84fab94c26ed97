use gpsel::special::{log_integral_01, QuadOpts};

fn main() {
    let v = log_integral_01(|_t, omt| -0.5 * omt.ln(), 6, QuadOpts::default()).unwrap();
    println!("sing err: {:e}", v - 2f64.ln());
    let w = 1e-8f64;
    let v = log_integral_01(move |_t, omt| w.ln() - 2.0 * (omt + w).ln(), 1, QuadOpts::default()).unwrap();
    println!("layer err: {:e}", v - (1.0 - w / (1.0 + w)).ln());
}
