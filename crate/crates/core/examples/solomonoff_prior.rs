//! The budgeted lower approximation M_{L,T} of the universal prior over a
//! small prefix machine: programs, values, and the invariants it satisfies.

use unipred::measure::Seq;
use unipred::solomonoff::{
    bit_string, check_prefix_free, literal_programs, normalize_machine, Budget, ProgramFamilyMachine,
    StagedApprox, Transducer,
};
use unipred::measure::PredictiveModel;

fn main() -> unipred::Result<()> {
    let machine = ProgramFamilyMachine::default();
    for x in ["1", "0110"] {
        let x = Seq::parse(x)?;
        println!("print {x}: {}", bit_string(&machine.encode_print(&x)?));
        println!("repeat {x}: {}", bit_string(&machine.encode_repeat(&x)?));
    }
    let copy = Transducer { table: vec![[(0, Some(0)), (0, Some(1))]] };
    println!("copy transducer on 101: {}", bit_string(&machine.encode_transducer(&copy, &[true, false, true])?));

    let table = StagedApprox::build(&machine, Budget::new(16, 10_000)?, 8)?;
    println!("\nL = 16, T = 10000: {} nodes, Kraft sum {}", table.nodes_explored(), table.kraft_sum());
    for x in ["", "0", "1", "00", "01", "0000", "0101", "00000000"] {
        let x = Seq::parse(x)?;
        println!("  M({x}) = {:.6}", table.value(&x)?.to_f64());
    }
    let (slack, at) = table.semimeasure_slack();
    println!("smallest M(x) - M(x0) - M(x1): {slack:.3e} at x = {at}");
    println!("strict witness: {:?}", table.strict_witness().map(|w| w.to_string()));

    let programs = literal_programs(&machine, 3)?;
    let held = table.dominance(&programs)?.iter().filter(|d| d.holds).count();
    println!("M(x) >= 2^-len(p) for {held} of {} literal programs", programs.len());

    let pf = check_prefix_free(&machine, 12)?;
    println!("prefix-free up to 12 bits: {} ({} complete programs)", pf.passed(), pf.complete_programs);

    let norm = normalize_machine(16, 10_000)?;
    let h = Seq::parse("0000000")?;
    println!("normalized prediction after 0000000: P(0) = {:.4}", norm.conditional(&h, 0)?.prob());

    println!("\nfirst listing lines:");
    for line in table.listing().lines().take(8) {
        println!("  {line}");
    }
    Ok(())
}
