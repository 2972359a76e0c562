//! Polylogarithm classes at roots of unity: the exact splitting of the
//! logarithmic fiber, the class computed two ways, and a regulator table.

use polylog::cyclotomic::{cyclotomic_class, epsilon_value, regulator_vector, split_log_fiber, RootOfUnity};

fn main() -> polylog::Result<()> {
    let w = RootOfUnity::new(2, 5)?;
    let s = split_log_fiber(&w, 3)?;
    println!("Log fiber at 2/5 (l = {}) splits by\n{:?}\n", s.l, s.splitting);

    let c = cyclotomic_class(3, &w, 1e-9)?;
    println!("class of Li_3 at 2/5");
    println!("  continuation: {:?}", c.way1.value);
    println!("  Hurwitz:      {:?}", c.way2);
    println!("  agree mod (2πi)^3 Q: {} (residual {:.1e})\n", c.agree, c.residual);

    let reg = regulator_vector(2, 8, 1e-9)?;
    println!("{:>3}  {:>24}  {:>24}", "a", "re", "im");
    for e in &reg.entries {
        let v = e.class.value_c64();
        println!("{:>3}  {:>24.16e}  {:>24.16e}", e.a, v.re, v.im);
    }
    println!("conjugation symmetric: {}", reg.symmetric);

    let eps = epsilon_value(2, 1, 8, 1e-9)?;
    println!("\nepsilon at 1/8 is {} times the class", eps.factor);
    Ok(())
}
