//! Reference data shipped in the workspace `data/` directory.

use crate::jet::{Pde, VectorField};
use crate::{Error, Result};

pub const KDV31_PDE: &str = include_str!("../../../data/kdv31.pde");
pub const GENERATORS: &str = include_str!("../../../data/generators.txt");
pub const DETERMINING_GOLDEN: &str = include_str!("../../../data/determining.golden");
pub const COMMUTATOR_GOLDEN: &str = include_str!("../../../data/commutators.golden");
pub const GROUPS: &str = include_str!("../../../data/groups.txt");
pub const CATALOG: &str = include_str!("../../../data/catalog.txt");

pub fn kdv31() -> Pde {
    Pde::from_text(KDV31_PDE).expect("shipped equation parses")
}

/// Parse `name | (xi.., eta)` records.
pub fn parse_generators(text: &str, pde: &Pde) -> Result<Vec<(String, VectorField)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, field) = line
            .split_once('|')
            .ok_or_else(|| Error::Invalid(format!("line {}: expected `name | (components)`", i + 1)))?;
        out.push((name.trim().to_string(), VectorField::parse(field.trim(), pde)?));
    }
    Ok(out)
}

/// The transcribed basis v1..v10 of the equation's symmetry algebra.
pub fn generators(pde: &Pde) -> Result<Vec<VectorField>> {
    Ok(parse_generators(GENERATORS, pde)?.into_iter().map(|(_, v)| v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_generators_match_test_fixture() {
        let pde = kdv31();
        let got = generators(&pde).unwrap();
        assert_eq!(got.len(), 10);
        for (g, s) in got.iter().zip(crate::jet::tests::GENERATORS) {
            assert_eq!(*g, VectorField::parse(s, &pde).unwrap());
        }
    }
}
