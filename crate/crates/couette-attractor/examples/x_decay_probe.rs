//! Probe the horizontal decay of the steady profile: max_Y |profile(X, Y)|
//! for a ladder of X values, at two spectral cutoffs to expose the
//! truncation floor.

use couette_attractor::kernel::{profile_columns, solve_h, HMethod};

fn main() {
    let h = solve_h(HMethod::LaplaceInversion, 15.75, 6300).expect("boundary density");
    let ys: Vec<f64> = (0..=48).map(|i| i as f64 * 0.125).collect();
    let xs: Vec<f64> = vec![
        0.0, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 12.0, 16.0, 20.0, 24.0, 28.0,
    ];
    for &kmax in &[40.0, 62.0] {
        let cols = profile_columns(&h, &xs, &ys, kmax);
        println!("k_max = {kmax}");
        for (ix, &x) in xs.iter().enumerate() {
            let mut mx: f64 = 0.0;
            let mut argy = 0.0;
            for (iy, row) in cols.iter().enumerate() {
                if row[ix].abs() > mx {
                    mx = row[ix].abs();
                    argy = ys[iy];
                }
            }
            println!("  X = {x:5.1}   max|profile| = {mx:11.4e}   at Y = {argy:5.3}");
        }
    }
}
