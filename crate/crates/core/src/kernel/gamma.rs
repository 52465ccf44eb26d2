use crate::scalar::Real;

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments that are not non-positive integers.
pub fn gamma<T: Real>(z: T) -> T {
    let half = T::lit(0.5);
    if z < half {
        // reflection
        let pi = T::PI();
        return pi / ((pi * z).sin() * gamma(T::one() - z));
    }
    let z = z - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += T::lit(c) / (z + T::from_usize_lossy(k));
    }
    let t = z + T::lit(LANCZOS_G) + half;
    (T::lit(2.0) * T::PI()).sqrt() * t.powf(z + half) * (-t).exp() * acc
}
