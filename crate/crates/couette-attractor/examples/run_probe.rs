//! Scratch probe: track the X-mean (kx = 0) sector of a linear run.
//!
//! Prints, every 0.1 in tau: dist, M2, max |field|, the row-mean profile
//! m(Y) = <f>_X at a few heights, the "uniform excess" proxy
//! u(Y) = <(1 - S'(X)) f>_X (zero for core-supported fields), and the largest
//! fluctuation at the seam.

use couette_attractor::selfsim::{
    moments, profile_on_grid, weighted_dist_tail, SimConfig, Simulator,
};

fn sprime(x: f64, lx: f64) -> f64 {
    let x0 = 0.85 * lx;
    let ax = x.abs();
    if ax <= x0 {
        return 1.0;
    }
    let w = lx - x0;
    let u = ((ax - x0) / w).min(1.0);
    (1.0 - u) * (1.0 - u) * (1.0 + 2.0 * u - 15.0 * u * u - 30.0 * u * u * (x0 / w))
}

fn main() {
    let cfg_json = r#"{
        "nu": 1.0, "m": 6,
        "LX": 12.0, "LY": 10.0,
        "NX": 128, "NY": 128,
        "dtau": 0.0015, "tau_end": 3.0,
        "scheme": "rk3-explicit-diffusion-implicit",
        "model": "linear-l",
        "init": { "type": "bump-m2", "params": { "a": 1.0, "b": 1.0, "m2": 1.0 } }
    }"#;
    let cfg: SimConfig = serde_json::from_str(cfg_json).unwrap();
    let grid = cfg.grid().unwrap();
    let profile = profile_on_grid(grid);
    let mut sim = Simulator::new(cfg).unwrap();
    let m2_ref = moments(&sim.omega).2;

    let nx = grid.nx;
    let stations: Vec<usize> = [0.5f64, 0.9, 1.5, 2.3, 3.8, 6.0, 8.5]
        .iter()
        .map(|y| (y / grid.dy()).round() as usize)
        .collect();
    let sp: Vec<f64> = (0..nx).map(|ix| sprime(grid.x(ix), grid.lx)).collect();

    let mut next_report = 0.0f64;
    loop {
        if sim.tau + 1e-9 >= next_report {
            let f = &sim.omega;
            let (dist, tail) = weighted_dist_tail(f, &profile, m2_ref, 6);
            let m2 = moments(f).2;
            // row means and ring-deficient means
            let mut mean_line = String::new();
            let mut udef_line = String::new();
            for &iy in &stations {
                let row = &f.v[iy * nx..(iy + 1) * nx];
                let m: f64 = row.iter().sum::<f64>() / nx as f64;
                let u: f64 = row
                    .iter()
                    .zip(&sp)
                    .map(|(v, s)| v * (1.0 - s))
                    .sum::<f64>()
                    / nx as f64;
                mean_line += &format!(" {:9.2e}", m);
                udef_line += &format!(" {:9.2e}", u);
            }
            // biggest mean row overall
            let mut mmax = 0.0f64;
            let mut mmax_y = 0.0f64;
            for iy in 0..grid.rows() {
                let m: f64 =
                    f.v[iy * nx..(iy + 1) * nx].iter().sum::<f64>() / nx as f64;
                if m.abs() > mmax {
                    mmax = m.abs();
                    mmax_y = grid.y(iy);
                }
            }
            // largest deviation from the row mean in the seam ring
            let mut seam_fluct = 0.0f64;
            for iy in 0..grid.rows() {
                let row = &f.v[iy * nx..(iy + 1) * nx];
                let m: f64 = row.iter().sum::<f64>() / nx as f64;
                for ix in 0..nx {
                    if grid.x(ix).abs() > 0.95 * grid.lx {
                        seam_fluct = seam_fluct.max((row[ix] - m).abs());
                    }
                }
            }
            println!(
                "tau {:4.2}  dist {:9.3e} (tail {:5.3})  m2 {:.8}  max {:8.2e}  \
                 mmax {:8.2e}@Y={:4.2}  seamfl {:8.2e}",
                sim.tau,
                dist,
                tail,
                m2,
                f.max_abs(),
                mmax,
                mmax_y,
                seam_fluct
            );
            println!("   mean(Y): {}", mean_line);
            println!("   udef(Y): {}", udef_line);
            next_report += 0.1;
        }
        if sim.tau >= sim.cfg.tau_end - 1e-9 {
            break;
        }
        sim.step().unwrap();
    }
}
