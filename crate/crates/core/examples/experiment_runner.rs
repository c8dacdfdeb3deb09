//! Drives the experiment runner from code: parse a config, run it, and read
//! the summary it writes next to the CSV.

use unipred::cli::{exit_code, run, ExperimentConfig};

fn main() -> unipred::Result<()> {
    let out = std::env::temp_dir().join("unipred-example");
    let text = format!(
        "# gap experiment on the two-point class\n\
         experiment = gap\n\
         class = gapped\n\
         thetas = 1/4,1/2\n\
         weights = uniform\n\
         n = 20000\n\
         out = {}\n",
        out.display()
    );
    let config = ExperimentConfig::parse(&text)?;
    print!("effective config:\n{}", config.serialize());
    let result = run(&config);
    let code = exit_code(&result);
    let outcome = result?;
    println!("\nexit code {code}; files:");
    for f in &outcome.files {
        println!("  {}", f.display());
    }
    print!("\n{}", outcome.summary());
    Ok(())
}
