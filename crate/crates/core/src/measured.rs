//! Laboratory results of the two experiments, kept as comparison targets
//! for the simulator and the report.

/// `(value, uncertainty)` pairs for `p(u_0)..p(u_7)`.
pub const CHSH_PROBABILITIES: [(f64, f64); 8] = [
    (0.4262, 0.0031),
    (0.4239, 0.0057),
    (0.4313, 0.0069),
    (0.4319, 0.0058),
    (0.4259, 0.0031),
    (0.4257, 0.0045),
    (0.4226, 0.0028),
    (0.4260, 0.0031),
];
pub const S_TOTAL: (f64, f64) = (3.413, 0.013);

/// `(value, uncertainty)` pairs for `p(v_0)..p(v_7)`.
pub const NC_PROBABILITIES: [(f64, f64); 8] = [
    (0.2809, 0.0038),
    (0.2854, 0.0038),
    (0.2857, 0.0038),
    (0.3110, 0.0039),
    (0.2983, 0.0038),
    (0.2833, 0.0036),
    (0.2810, 0.0036),
    (0.3095, 0.0038),
];
pub const R_TOTAL: (f64, f64) = (2.335, 0.011);

/// Measured `W_1..W_16`, all with uncertainty 0.016.
pub const W_VALUES: [f64; 16] = [
    0.997, 0.997, 0.996, 0.996, 0.996, 0.996, 0.996, 0.996, 0.996, 0.996, 0.996, 0.997, 0.996,
    0.996, 0.996, 0.996,
];
pub const W_UNCERTAINTY: f64 = 0.016;

/// Previously known bounds from two copies of a single scenario.
pub const EARLIER_R_BOUND_PRINTED: f64 = 2.5298;
pub const EARLIER_S_BOUND_PRINTED: f64 = 3.5777;

/// One exclusivity test: `p(1 | μ_j ; e_i)` with its measured value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusivityTest {
    /// Index of the measured projector `μ_j`.
    pub measured: usize,
    /// Index of the prepared event `e_i`.
    pub prepared: usize,
    pub value: f64,
    pub uncertainty: f64,
}

const fn t(measured: usize, prepared: usize, value: f64, uncertainty: f64) -> ExclusivityTest {
    ExclusivityTest {
        measured,
        prepared,
        value,
        uncertainty,
    }
}

/// Bell-experiment exclusivity tests, in printed order.
pub const CHSH_EXCLUSIVITY: [ExclusivityTest; 32] = [
    t(0, 0, 0.997916, 0.000076),
    t(4, 0, 1.8e-6, 1.9e-6),
    t(3, 0, 0.000635, 0.000030),
    t(5, 0, 0.000373, 0.000024),
    t(3, 3, 0.997823, 0.000059),
    t(7, 3, 2.2e-6, 1.9e-6),
    t(6, 3, 0.000639, 0.000040),
    t(0, 3, 0.000437, 0.000017),
    t(6, 6, 0.997484, 0.000062),
    t(2, 6, 3.3e-6, 2.5e-6),
    t(3, 6, 0.000651, 0.000037),
    t(1, 6, 0.000606, 0.000032),
    t(1, 1, 0.996928, 0.000096),
    t(5, 1, 1.1e-6, 1.2e-6),
    t(6, 1, 0.000666, 0.000045),
    t(4, 1, 0.000937, 0.000040),
    t(4, 4, 0.995531, 0.000075),
    t(0, 4, 6.4e-6, 2.7e-6),
    t(1, 4, 0.001419, 0.000040),
    t(7, 4, 0.000864, 0.000027),
    t(7, 7, 0.992080, 0.000120),
    t(3, 7, 1.49e-5, 5.8e-6),
    t(4, 7, 0.001816, 0.000047),
    t(2, 7, 0.000637, 0.000027),
    t(2, 2, 0.995735, 0.000098),
    t(6, 2, 3.3e-6, 2.1e-6),
    t(7, 2, 0.000477, 0.000022),
    t(5, 2, 0.001469, 0.000026),
    t(5, 5, 0.996841, 0.000066),
    t(1, 5, 2.9e-6, 2.1e-6),
    t(2, 5, 0.000893, 0.000041),
    t(0, 5, 0.001314, 0.000051),
];

/// NC-experiment exclusivity tests, in printed order.
pub const NC_EXCLUSIVITY: [ExclusivityTest; 40] = [
    t(0, 0, 0.9920, 0.0010),
    t(1, 0, 0.0026, 0.0007),
    t(2, 0, 0.0026, 0.0007),
    t(6, 0, 0.0014, 0.0005),
    t(7, 0, 0.0012, 0.0005),
    t(1, 1, 0.9930, 0.0010),
    t(0, 1, 0.0022, 0.0007),
    t(2, 1, 0.0040, 0.0009),
    t(3, 1, 0.0007, 0.0004),
    t(7, 1, 0.0029, 0.0008),
    t(2, 2, 0.9840, 0.0010),
    t(0, 2, 0.0018, 0.0006),
    t(1, 2, 0.0019, 0.0006),
    t(3, 2, 0.0033, 0.0008),
    t(4, 2, 0.007, 0.001),
    t(3, 3, 0.9890, 0.0010),
    t(1, 3, 0.0040, 0.0009),
    t(2, 3, 0.0026, 0.0007),
    t(4, 3, 0.006, 0.001),
    t(5, 3, 0.0015, 0.0005),
    t(4, 4, 0.9910, 0.0010),
    t(2, 4, 0.0008, 0.0004),
    t(3, 4, 0.0019, 0.0006),
    t(5, 4, 0.0009, 0.0005),
    t(6, 4, 0.008, 0.001),
    t(5, 5, 0.9860, 0.0010),
    t(3, 5, 0.0030, 0.0008),
    t(4, 5, 0.0018, 0.0006),
    t(6, 5, 0.007, 0.001),
    t(7, 5, 0.0007, 0.0004),
    t(6, 6, 0.9870, 0.0010),
    t(0, 6, 0.0028, 0.0008),
    t(4, 6, 0.0007, 0.0009),
    t(5, 6, 0.0041, 0.0009),
    t(7, 6, 0.0014, 0.0005),
    t(7, 7, 0.9960, 0.0010),
    t(0, 7, 0.006, 0.001),
    t(1, 7, 0.0029, 0.0008),
    t(5, 7, 0.0009, 0.0005),
    t(6, 7, 0.0043, 0.0009),
];

/// Rounded components of `v_0..v_7` as listed with the measurement bases.
pub const PRINTED_V: [[f64; 5]; 8] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0, 0.0],
    [0.586, 0.0, 0.0, 0.644, -0.493],
    [0.172, 0.586, 0.0, 0.377, 0.697],
    [0.586, 0.172, 0.586, -0.533, 0.0],
    [0.0, -0.586, -0.172, -0.377, 0.697],
    [0.0, 0.0, -0.586, -0.644, -0.493],
];

const W_A: [f64; 5] = [0.202, -0.787, 0.213, 0.202, 0.503];
const W_B: [f64; 5] = [0.494, -0.0855, -0.782, -0.345, 0.137];

/// Rounded completion vectors `(w_{2k+1}, w_{2k+2})` listed for bases I..VIII.
/// Bases III to VIII all repeat the same two rows.
pub const PRINTED_W: [[[f64; 5]; 2]; 8] = [
    [
        [0.0, -0.806, 0.206, 0.206, -0.515],
        [0.0, 0.086, 0.76, -0.63, -0.082],
    ],
    [
        [0.0, 0.0, 0.0, 0.707, 0.707],
        [0.0, 0.0, 0.0, 0.707, -0.707],
    ],
    [W_A, W_B],
    [W_A, W_B],
    [W_A, W_B],
    [W_A, W_B],
    [W_A, W_B],
    [W_A, W_B],
];
