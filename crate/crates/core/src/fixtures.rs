//! Small reference data sets used by tests, docs and the CLI demo.

use crate::matrix::{KillMatrix, MutantRecord, MutationOperator};

/// The seven-mutant, four-test example matrix over `getType` and
/// `resolveType`. Cells are 1 = killed.
pub fn example_matrix() -> KillMatrix {
    use MutationOperator::*;
    let rows: [(&str, &str, MutationOperator, &str, [u8; 4]); 7] = [
        ("m1", "getType", Cor, "n.isName() ↦ true", [0, 0, 0, 1]),
        ("m2", "getType", Cor, "n.isName() ↦ false", [1, 0, 0, 1]),
        ("m3", "getType", Cor, "bFlag || isInferred ↦ isInferred", [0, 1, 0, 1]),
        ("m4", "getType", Std, "varType ↦ <NO-OP>", [0, 1, 0, 1]),
        ("m5", "resolveType", Cor, "param.isTemplateType() ↦ true", [0, 1, 0, 1]),
        ("m6", "resolveType", Std, "resolvedType() ↦ <NO-OP>", [1, 0, 0, 1]),
        ("m7", "resolveType", Ror, "argObjectType != null ↦ true", [1, 0, 0, 0]),
    ];
    let tests = ["t1", "t2", "t3", "t4"].map(Into::into).to_vec();
    let mutants = rows
        .iter()
        .map(|(id, method, op, desc, _)| MutantRecord::new(*id, *method, *op, *desc))
        .collect();
    let kills = rows
        .iter()
        .map(|(.., cells)| cells.iter().map(|&c| c == 1).collect())
        .collect();
    KillMatrix::new(tests, mutants, kills).expect("fixture is well formed")
}
