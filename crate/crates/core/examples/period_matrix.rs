//! The period matrix at the base point as a mixed Tate structure, and the
//! invariance of the global section f.

use polylog::localsys::parse_word;
use polylog::periods::{build_p, verify_f_invariance};
use polylog::polynum::ContinuationState;

fn main() -> polylog::Result<()> {
    let p = build_p(&ContinuationState::initial(3))?;
    let hs = p.to_mhs()?;
    println!("twists: {:?}", hs.twists());
    for row in hs.period() {
        println!("  {row:?}");
    }

    for spec in ["alpha0", "alpha1^-1"] {
        let r = verify_f_invariance(&parse_word(spec)?, 6, 1e-9)?;
        println!("f around {spec}: residual {:.1e}, passed {}", r.max_residual, r.passed);
    }
    Ok(())
}
