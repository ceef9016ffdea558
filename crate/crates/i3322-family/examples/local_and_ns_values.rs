//! Classical and no-signalling values across the parameter plane.
//!
//! Both bounds have closed forms (piecewise in alpha1, alpha3); this example
//! prints them alongside brute-force references — deterministic-vertex
//! enumeration for the local value, a vertex LP over the no-signalling
//! polytope for the other — on a small tour of the plane.

use i3322_family::bounds::{local_value_closed, local_value_enum, ns_value_closed, ns_value_lp};
use i3322_family::functional::FunctionalParams;
use i3322_family::sweep::format_sig;
use i3322_family::Result;

fn main() -> Result<()> {
    println!("alpha1  alpha2  alpha3 | beta_L (piece)           | beta_NS  | enum, LP agree");
    for (a1, a2, a3) in [
        (1.0, 1, 1.0), // I3322
        (0.0, 0, 1.0),
        (0.5, 0, 2.0),
        (2.0, 0, 1.0),
        (0.25, 1, 1.75),
        (3.0, 1, 0.5),
        (0.0, 1, 0.0),
    ] {
        let params = FunctionalParams::new(a1, a2, a3)?;
        let (beta_l, piece) = local_value_closed(&params);
        let enum_opt = local_value_enum(&params);
        let beta_ns = ns_value_closed(&params);
        let lp = ns_value_lp(&params)?;
        let ok = (beta_l - enum_opt.value).abs() < 1e-12 && (beta_ns - lp.value).abs() < 1e-9;
        println!(
            "{a1:<7} {a2:<7} {a3:<6} | {:<8} {piece:<15?} | {:<8} | {ok}",
            format_sig(beta_l, 9),
            format_sig(beta_ns, 9),
        );
        assert!(ok);
    }

    // The witness strategy attains the closed-form value exactly.
    let params = FunctionalParams::i3322();
    let opt = local_value_enum(&params);
    println!(
        "\nI3322 witness: a = {:?}, b = {:?} attains {}",
        opt.strategy.a, opt.strategy.b, opt.value
    );
    Ok(())
}
