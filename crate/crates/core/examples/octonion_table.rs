//! Prints the octonion multiplication table used for the S⁶ structure as JSON,
//! and checks it against the copy shipped in `data/octonion_table.json`.
//!
//! `cargo run --example octonion_table > crates/core/data/octonion_table.json`

use nk6::geometry::octonion::{OctonionTable, PUBLISHED_TABLE_JSON};

fn main() {
    let table = OctonionTable::current();
    println!("{}", table.to_json());
    let published: Result<OctonionTable, _> = serde_json::from_str(PUBLISHED_TABLE_JSON);
    match published {
        Ok(p) if p == table => eprintln!("published table is up to date"),
        _ => eprintln!("published table differs from the code; regenerate it"),
    }
}
