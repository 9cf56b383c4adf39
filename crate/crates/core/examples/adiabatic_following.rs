//! Excitation relative to the moving trap minimum along a protocol.
//! The counterdiabatic drive follows the equilibrium exactly; the unitarily
//! equivalent drive leaves it in the middle and lands back on it at the end.
//!
//! cargo run --example adiabatic_following

use sta_transport::experiments::stop_grid;
use sta_transport::prelude::*;

fn main() -> sta_transport::Result<()> {
    let params = OscillatorParams::default();
    let opts = TraceOptions {
        faithful: true,
        ..Default::default()
    };
    for spec in [
        ProtocolSpec::counterdiabatic(0.4, Direction::Backward),
        ProtocolSpec::unitary_equivalent(0.4, Direction::Backward),
    ] {
        let stops = stop_grid(spec.duration(&params), 9);
        println!("{}:", spec.label());
        for pt in run_instantaneous_trace(&spec, &params, &stops, &opts)? {
            println!(
                "  t = {:.3}  n_inst = {:.3e}  n_lab = {:.3}  after CD return = {:.3e}",
                pt.t,
                pt.n_inst,
                pt.n_lab,
                pt.n_faithful.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
