//! The device model on its own: a constant motor torque against the
//! closed-form first-order response, and the encoder plus Butterworth
//! derivative chain estimating a constant velocity.
//!
//! `cargo run --example plant_velocity_filter`

use wrist_testbed::plant::{encode_position, DerivativeFilter, Plant, PlantParams, PlantState};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PlantParams::default();
    let mut plant = Plant::new(params.clone(), PlantState::at_rest(0.0))?;

    // J·ω' = τ − b·ω  →  ω(t) = (τ/b)(1 − e^(−bt/J))
    let tau = 2.0; // mNm, small enough to stay clear of the limiter for 1 s
    let (j, b) = (params.inertia_j, params.damping_b);
    println!("{:>6}{:>14}{:>14}{:>12}", "t", "sim dps", "exact dps", "measured");
    for k in 1..=1000 {
        let s = plant.step(tau, 0.0)?;
        if k % 100 == 0 {
            let t = s.t_s;
            let exact = (tau / 1000.0 / b * (1.0 - (-b * t / j).exp())).to_degrees();
            // samples carry the filtered estimate; the true state lags nothing
            println!("{t:>6.2}{:>14.4}{exact:>14.4}{:>12.4}", plant.state().velocity_dps, s.velocity_dps);
        }
    }

    let dt = params.dt_s;
    let mut f = DerivativeFilter::new(params.filter_cutoff_hz, dt)?;
    let v = 45.0;
    let mut est = 0.0;
    for k in 0..=1000 {
        let angle = encode_position(v * k as f64 * dt, params.encoder_counts_per_rev);
        est = f.estimate_velocity(angle, dt)?;
        if k == 500 {
            println!("\nafter 0.5 s: estimate {est:.3} dps vs true {v} ({:.3}% error)", 100.0 * (est - v).abs() / v);
        }
    }
    println!("after 1.0 s: estimate {est:.3} dps");
    println!("encoder step: {:.5} deg", 360.0 / params.encoder_counts_per_rev as f64);
    Ok(())
}
