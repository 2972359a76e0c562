//! Distribution relations sum_{ζ^m = 1} Li_j(ζt) = m^{1-j} Li_j(t^m).

use polylog::cyclotomic::distribution_check;
use polylog::dd::cdd;

fn main() -> polylog::Result<()> {
    for (re, im) in [(0.3, 0.0), (0.5, 0.2), (-0.7, 0.1)] {
        for m in [2, 3, 5] {
            let worst = (1..=6)
                .map(|j| distribution_check(j, cdd(re, im), m, 1e-10).map(|r| r.residual))
                .collect::<polylog::Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            println!("t = {re}{im:+}i, m = {m}: worst residual over j <= 6 is {worst:.1e}");
        }
    }
    Ok(())
}
