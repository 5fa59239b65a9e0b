//! Levi form of a mixed germ with one complex and one real variable.

use lis_germ::structure::{build_frame, levi_form, StructureGerm};

fn main() -> lis_germ::Result<()> {
    let g = StructureGerm::from_literal(1, 1, 6, "z1*zb1 + t1^2 + z1*zb1*s")?;
    let frame = build_frame(&g);
    for (j, f) in frame.fields.iter().enumerate() {
        let parts: Vec<String> = f
            .components
            .iter()
            .map(|(v, c)| format!("({c}) d/d{}", g.alphabet().name(*v)))
            .collect();
        println!("L{} = {}", j + 1, parts.join(" + "));
    }
    let l = levi_form(&g);
    println!("Levi matrix:\n{}", l.matrix);
    println!("signature {:?}, definite {}", l.signature, l.definite);
    Ok(())
}
