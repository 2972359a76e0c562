//! Kummer-type mixed Tate structures: classes, Baer sums, twists and exact
//! splittings.

use polylog::dd::cdd;
use polylog::mhs::{baer_sum, ext_class, make_kummer, twist, CycloScalar};
use polylog::qlinalg::qf;

fn main() -> polylog::Result<()> {
    // log 2 as an extension of Q(0) by Q(1)
    let log2 = CycloScalar::numeric(cdd(std::f64::consts::LN_2, 0.0));
    let h = make_kummer(&log2, 1)?;
    println!("class of K(log 2): {:?}", ext_class(&h)?);

    // adding 2πi·3/2 does not change the class
    let shifted = make_kummer(&(log2.clone() + CycloScalar::term(qf(3, 2), 1)), 1)?;
    println!("class after a period shift: {:?}", ext_class(&shifted)?);

    let sum = baer_sum(&h, &h)?;
    println!("Baer sum with itself: {:?}", ext_class(&sum)?);

    let t = twist(&h, 2);
    println!("twists after Q(2) twist: {:?}", t.twists());

    let rational = make_kummer(&CycloScalar::term(qf(5, 7), 1), 1)?;
    match rational.splitting(0.0) {
        Some(u) => println!("K(2πi·5/7) splits by {u:?}"),
        None => println!("K(2πi·5/7) does not split"),
    }
    println!("K(log 2) split: {}", h.is_split(1e-12));
    Ok(())
}
