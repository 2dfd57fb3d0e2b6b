#![no_main]

use egn_bounds::enip::{verify_spec, Projection};
use egn_bounds::io::parse_enip_spec;
use egn_bounds::limits::set_max_qubits;
use egn_bounds::state::DensityMatrix;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    set_max_qubits(4);
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = parse_enip_spec(text) else {
        return;
    };
    if spec.generators.len() > 8 {
        return;
    }
    let Ok(report) = verify_spec(&spec) else {
        return;
    };
    if report.passed {
        let projection = Projection::new(spec).expect("a passing spec builds a projection");
        let rho = DensityMatrix::maximally_mixed(projection.n_qubits()).expect("size already checked");
        let out = projection.group_average(&rho).expect("dimensions match");
        assert!(out.max_abs_diff(&rho) < 1e-12);
    }
});
