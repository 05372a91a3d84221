//! The post-selected dual-rail CNOT with five mismatch locations.

use super::Circuit;

/// Coincidence success probability of the ideal gate.
pub const CNOT_SUCCESS_PROBABILITY: f64 = 1.0 / 9.0;

const THIRD: f64 = 1.0 / 3.0;

/// Builds the CNOT network.
///
/// The target qubit sits in a Mach-Zehnder interferometer of two 50/50
/// splitters. Inside it, rail `t0` meets the control's `c1` rail on a 1/3
/// splitter (sign flip on reflection from `c1`), while `c0` and `t1` each lose
/// 2/3 of their amplitude to the discarded vacuum modes `v1`, `v2` so that all
/// four coincidence paths carry amplitude 1/3.
///
/// τ-boxes: τ1 on `c0` and τ3 on `t0` at the input, τ2 on `c1` before the
/// central splitter, τ4 on `t1` inside the target interferometer, τ5 on `t0`
/// after the closing splitter.
pub fn build_cnot() -> Circuit {
    Circuit::builder()
        .modes(&["c0", "c1", "t0", "t1", "v1", "v2"])
        .tau("c0", 1)
        .tau("t0", 3)
        .beamsplitter("t0", "t1", 0.5, "t1")
        .tau("c1", 2)
        .tau("t1", 4)
        .beamsplitter("c1", "t0", THIRD, "c1")
        .beamsplitter("c0", "v1", THIRD, "v1")
        .beamsplitter("t1", "v2", THIRD, "v2")
        .beamsplitter("t0", "t1", 0.5, "t1")
        .tau("t0", 5)
        .control(&["c0", "c1"])
        .target(&["t0", "t1"])
        .build()
        .expect("CNOT circuit is well formed")
}
