//! Principal values of Li_k by series, continuation and Hurwitz sums.

use polylog::cyclotomic::{li_at_root_bounded, RootOfUnity};
use polylog::dd::cdd;
use polylog::polynum::{li_continue, li_principal, Path};

fn main() -> polylog::Result<()> {
    for (k, re, im) in [(2, 0.5, 0.0), (3, -1.0, 0.0), (2, -3.0, 0.0), (4, 2.0, 1.5), (5, 0.3, 0.4)] {
        let e = li_principal(k, cdd(re, im), 1e-25)?;
        println!("Li_{k}({re}{im:+}i) = {:.15e} {:+.15e}i   [{:?}, err {:.1e}]", e.value.re.to_f64(), e.value.im.to_f64(), e.method, e.err);
    }

    let w = RootOfUnity::new(1, 4)?;
    let (v, err) = li_at_root_bounded(3, &w, 1e-25)?;
    println!("Li_3(i) = {:.17} {:+.17}i   [Hurwitz, err {err:.1e}]", v.re, v.im);

    // a path that winds once around 1 lands on another branch
    let path = Path::from_points(&[(1.0, -0.5), (1.5, 0.0), (1.0, 0.5), (0.3, 0.4)])?;
    let s = li_continue(&path, 3, 1e-20)?;
    println!("after winding around 1: Li_2(0.3+0.4i) = {} {:+}i ({} steps)", s.li(2).re, s.li(2).im, s.steps());
    Ok(())
}
