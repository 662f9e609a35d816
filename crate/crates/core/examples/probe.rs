//! Ad-hoc solver probe: `probe key=value ...`.
use pohozaev::*;
use std::time::Instant;
fn main() {
    let mut cfg = SolverConfig::default();
    let mut lambda = 1.0;
    let mut model = "power".to_string();
    let mut s = 0.5;
    let mut dr: Option<f64> = None;
    for a in std::env::args().skip(1) {
        let (k, v) = a.split_once('=').expect("key=value");
        match k {
            "lambda" => lambda = v.parse().unwrap(),
            "model" => model = v.into(),
            "s" => s = v.parse().unwrap(),
            "M" => cfg.panels = v.parse().unwrap(),
            "R" => cfg.r_star = v.parse().unwrap(),
            "dr" => dr = Some(v.parse().unwrap()),
            "eps" => cfg.eps_stop = v.parse().unwrap(),
            "amin" => cfg.alpha_min = v.parse().unwrap(),
            "sortol" => cfg.sor_tol = v.parse().unwrap(),
            "solver" => cfg.linear_solver = v.parse().unwrap(),
            "maxit" => cfg.max_outer_iterations = v.parse().unwrap(),
            _ => panic!("unknown key {k}"),
        }
    }
    if let Some(dr) = dr {
        cfg.panels = (cfg.r_star / dr).round() as usize;
    }
    let model = match model.as_str() {
        "asym" => NonlinearityModel::asym_linear(lambda, s).unwrap(),
        "quintic" => NonlinearityModel::quintic_example(),
        "nonmono" => NonlinearityModel::nonmonotone(lambda, s).unwrap(),
        _ => NonlinearityModel::power(lambda).unwrap(),
    };
    let t = Instant::now();
    match solve_default(&model, &cfg) {
        Ok(r) => {
            let minv = r.trace.iter().map(|e| e.grad_norm).fold(f64::INFINITY, f64::min);
            println!(
                "M={} u0={:.6} I={:.6} |v|={:.3e} min|v|={:.3e} it={} rs={} sweeps={} R*={:.4} status={:?} {:.2?}",
                cfg.panels,
                r.u_at_zero,
                r.action,
                r.grad_norm,
                minv,
                r.outer_iterations,
                r.restarts,
                r.sor_sweeps,
                r.r_star_final(),
                r.status,
                t.elapsed()
            );
            if std::env::var("PROFILE").is_ok() {
                for x in [
                    0.0, 0.1, 0.402, 1.006, 1.601, 2.004, 3.002, 4.007, 5.005, 5.207, 6.003, 7.0, 7.604, 8.007, 8.208,
                    8.3, 8.351, 8.376, 8.384,
                ] {
                    println!("  r={x:.3} u={:.6e}", r.solution.sample(x));
                }
            }
        }
        Err(e) => println!("error {e} {:.2?}", t.elapsed()),
    }
}
