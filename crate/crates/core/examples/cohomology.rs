//! Invariants and first cohomology of the logarithmic local systems, the
//! class of the polylogarithm, and rigidity of extensions.

use polylog::localsys::{check_rigidity, ext_class_of_pol, h0, h1, log_rep, residue_component};

fn main() -> polylog::Result<()> {
    println!("{:>3} {:>8} {:>8}", "n", "dim h0", "dim h1");
    for n in 0..=6 {
        let rep = log_rep(n);
        println!("{n:>3} {:>8} {:>8}", h0(&rep).len(), h1(&rep).dimension());
    }

    let n = 4;
    let h = h1(&log_rep(n));
    let c = ext_class_of_pol(n)?;
    println!("\nclass of Pol at level {n}");
    println!("  coordinates: {:?}", h.coordinates(&c).iter().map(ToString::to_string).collect::<Vec<_>>());
    let r = residue_component(&h, &c);
    println!("  residue at 1: {:?}", r.residue_at_one.iter().map(ToString::to_string).collect::<Vec<_>>());

    for n in [2, 5, 8] {
        let report = check_rigidity(n, 6, 1)?;
        println!(
            "rigidity n={n}: {} conjugate pairs, {} separated pairs, passed={}",
            report.conjugate_pairs, report.separated_pairs, report.passed
        );
    }
    Ok(())
}
