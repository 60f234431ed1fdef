//! Prints the Bell circuit and its two cut fragments as JSON documents.

use dqcnn_core::cutting::split;
use dqcnn_core::{Circuit, CutSpec, Gate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut c = Circuit::new(2)?;
    c.push(Gate::H { target: 0 })?;
    c.push(Gate::Cnot {
        control: 0,
        target: 1,
    })?;
    println!("{}", c.serialize()?);
    let pair = split(
        &c,
        CutSpec {
            wire: 0,
            position: 1,
        },
    )?;
    let (up, down) = pair.to_documents();
    println!("{}", up.to_json()?);
    println!("{}", down.to_json()?);
    Ok(())
}
