#![allow(dead_code)]

use bandlimited_up::random::project_admissible;
use bandlimited_up::CoeffVec;
use num_complex::Complex64;
use proptest::prelude::*;

pub fn demo() -> CoeffVec {
    CoeffVec::from_real(0, &[1.0, 1.0]).unwrap()
}

pub fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

pub fn coeff_vec(max_len: usize) -> impl Strategy<Value = CoeffVec> {
    (-8i64..8, prop::collection::vec(complex(), 1..=max_len)).prop_filter_map("zero vector", |(n_min, c)| {
        let f = CoeffVec::new(n_min, c).ok()?;
        (f.norm() > 1e-3).then_some(f)
    })
}

pub fn admissible_vec(max_len: usize) -> impl Strategy<Value = CoeffVec> {
    (-8i64..8, prop::collection::vec(complex(), 2..=max_len.max(2))).prop_filter_map(
        "zero after projection",
        |(n_min, mut c)| {
            project_admissible(n_min, &mut c);
            let f = CoeffVec::new(n_min, c).ok()?;
            (f.norm() > 1e-3).then_some(f)
        },
    )
}

pub fn delta() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(0.5), Just(0.25), Just(0.125), 0.01..=1.0f64]
}
