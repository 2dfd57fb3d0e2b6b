#![no_main]

use egn_bounds::io::parse_state;
use egn_bounds::limits::set_max_qubits;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // keeps each input to at most a 16x16 matrix
    set_max_qubits(4);
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rho) = parse_state(text) {
        let t = rho.to_bloch();
        assert_eq!(t.n_qubits(), rho.n_qubits());
        assert!(rho.min_eigenvalue() >= -1e-6);
    }
});
