//! Reading a source description and writing it back normalized.

use shannon_bounds::dist::{Source, SourceDescription};

fn main() -> shannon_bounds::Result<()> {
    let text = r#"{"family": "mixture", "weights": [0.25, 0.75], "means": [-2, 1], "variances": [0.5, 1]}"#;
    let desc = SourceDescription::parse(text)?;
    let Source::Scalar(src) = desc.build()? else {
        unreachable!("a scalar family")
    };
    println!("{}", SourceDescription::from(&src).to_json());
    println!("variance {:.6}, entropy power {:.6}", src.variance()?, src.entropy_power()?);
    Ok(())
}
