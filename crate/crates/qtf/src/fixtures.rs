//! Bundled reference filter banks.
//!
//! Ten banks covering every dilation matrix and construction style the crate
//! supports: two dyadic directional banks, two quincunx directional banks, a
//! determinant-3 directional bank, three differencing banks, and two compact
//! banks with two vanishing moments. Each file is a complete bank document in
//! the crate's JSON schema and passes exact verification.

use crate::error::{Error, Result};
use crate::filterbank::QtfBank;
use crate::json::parse_bank_str;

const FIXTURES: &[(&str, &str)] = &[
    ("dyadic_qt2", include_str!("../fixtures/dyadic_qt2.json")),
    ("dyadic_dir13", include_str!("../fixtures/dyadic_dir13.json")),
    ("interp_dir7", include_str!("../fixtures/interp_dir7.json")),
    ("quincunx_dir8", include_str!("../fixtures/quincunx_dir8.json")),
    ("sqrt3_dir18", include_str!("../fixtures/sqrt3_dir18.json")),
    ("interp_diff9", include_str!("../fixtures/interp_diff9.json")),
    ("quincunx_vm7", include_str!("../fixtures/quincunx_vm7.json")),
    ("quincunx_diff19", include_str!("../fixtures/quincunx_diff19.json")),
    ("quincunx_vm3", include_str!("../fixtures/quincunx_vm3.json")),
    ("dyadic2d_vm5", include_str!("../fixtures/dyadic2d_vm5.json")),
];

/// Names of all bundled banks, in a stable order.
pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|(name, _)| *name).collect()
}

/// Loads a bundled bank by name.
pub fn fixture(name: &str) -> Result<QtfBank> {
    let Some((_, text)) = FIXTURES.iter().find(|(n, _)| *n == name) else {
        let known = fixture_names().join(", ");
        return Err(Error::InvalidArg(format!(
            "unknown fixture {name:?}; available: {known}"
        )));
    };
    parse_bank_str(text)
}

/// Loads every bundled bank.
pub fn all_fixtures() -> Vec<QtfBank> {
    fixture_names()
        .into_iter()
        .map(|name| fixture(name).expect("bundled fixture parses"))
        .collect()
}
