//! Workloads shared by the benchmarks in `benches/` and their smoke test.

use std::f64::consts::PI;

use cmc1face::frame::IntegratorOptions;
use cmc1face::surface::Region;
use cmc1face::weierstrass::{make_example, Example, WeierstrassData};

pub struct Workload {
    pub name: &'static str,
    pub data: WeierstrassData,
    pub region: Region,
    pub n: usize,
}

pub fn options() -> IntegratorOptions {
    IntegratorOptions::default()
}

/// The standard figure regions at bench resolution `n × n`.
pub fn workloads(n: usize) -> Vec<Workload> {
    let ex = |e| make_example(e, &[]).expect("catalogue defaults are valid");
    vec![
        Workload {
            name: "catenoid",
            data: ex(Example::Catenoid),
            region: Region::LogPolar { log_r: [-5.0, 5.0], theta: [0.0, PI] },
            n,
        },
        Workload {
            name: "enneper",
            data: ex(Example::Enneper),
            region: Region::Cartesian { x: [-1.3, 1.3], y: [-1.3, 1.3] },
            n,
        },
        Workload {
            name: "helicoid",
            data: ex(Example::Helicoid),
            region: Region::Cartesian { x: [-0.9, 0.9], y: [-PI, PI] },
            n,
        },
    ]
}
