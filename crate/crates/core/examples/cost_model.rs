//! Ideal parareal cost against worker count, for illustrative phase times.

use vpbgk::parareal::{predict_cost, PerfModel};

fn main() {
    let base = PerfModel {
        t_hmm: 0.5,
        t_fluid: 0.002,
        t_lift: 0.01,
        workers: 1,
        ng: 200,
        iterations: 5,
    };
    println!("serial fine cost {:.1} s", base.serial_cost());
    println!(
        "{:>8} {:>12} {:>6} {:>8}",
        "workers", "T_parareal", "k_opt", "speedup"
    );
    for workers in [1, 2, 4, 8, 16, 32, 64, 128] {
        let c = predict_cost(&PerfModel { workers, ..base });
        println!(
            "{workers:>8} {:>12.2} {:>6} {:>8.2}",
            c.t_parareal,
            c.k_opt.map_or("-".into(), |k| k.to_string()),
            base.serial_cost() / c.t_parareal
        );
    }
}
