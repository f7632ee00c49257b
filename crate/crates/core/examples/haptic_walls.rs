//! Haptic rendering: the static wall torque profile, and a moving gap that
//! guides the handle through a reference velocity while the plant is
//! simulated.
//!
//! `cargo run --example haptic_walls`

use wrist_testbed::haptics::{home_torque, wall_torque, MovingGap, PdGains, WallGains, WallPair};
use wrist_testbed::plant::{Plant, PlantParams, PlantState};
use wrist_testbed::protocol::{ramp_midrange_rate, MIDRANGE_WINDOW};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let walls = WallPair::new(-1.5, 1.5, 30.0, 0.3)?;
    println!("static walls at ±1.5 deg, K = 30 N·m/rad");
    for angle in [-3.0, -1.6, 0.0, 1.0, 1.6, 2.0, 3.0] {
        println!("  θ = {angle:>5.1}  τ = {:>8.2} mNm", wall_torque(angle, 0.0, &walls));
    }

    // a passive hand: PD toward wherever the gap currently is, as if
    // following the walls, plus the walls themselves
    let params = PlantParams::default();
    let mut plant = Plant::new(params, PlantState::at_rest(0.0))?;
    let gap = MovingGap { ref_velocity: 30.0, half_width: 1.5, start: 0.0, end: 34.0, gains: WallGains::default() };
    let hand = PdGains { kp: 0.2, kd: 0.01 };
    let mut traj = Vec::new();
    for _ in 0..2000 {
        let st = plant.state();
        let motor = wall_torque(st.angle_deg, st.velocity_dps, &gap.walls(st.t));
        let human = home_torque(&st, gap.center(st.t), hand);
        traj.push(plant.step(motor, human)?);
    }
    let last = traj.last().unwrap();
    println!("\nguided by a 30 dps gap: end angle {:.2} deg (gap stops at {})", last.angle_deg, gap.end);
    println!("midrange rate {:.2} dps", ramp_midrange_rate(&traj, MIDRANGE_WINDOW)?);
    Ok(())
}
