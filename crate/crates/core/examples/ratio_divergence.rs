//! On the all-zeros sequence the mixture's odds of a one grow linearly
//! relative to the true measure, although the sequence is random for it.

use unipred::constructions::divergence_example;

fn main() -> unipred::Result<()> {
    let r = divergence_example(100_000)?;
    for t in [1, 10, 100, 1_000, 10_000, 100_000] {
        println!("t = {t:>6}: xi(1|0..0) / mu(1|0..0) = {:.4}", r.ratio_at(t));
    }
    println!("growth over the last decade: {:.4}", r.growth());
    println!("sup_n ln xi(0^n) / mu(0^n) = {:.3e}", r.deficiency.sup());
    Ok(())
}
