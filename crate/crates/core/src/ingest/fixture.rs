use serde::Deserialize;

/// County-level Hurricane Sandy figures for New Jersey and New York:
/// Census population, geo-coded tweet and user counts, and two damage
/// estimates in millions of USD.
pub const SANDY_COUNTIES_CSV: &str = include_str!("../../fixtures/sandy_counties.csv");

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CountyRow {
    pub county: String,
    pub population: u64,
    pub tweets: u64,
    pub users: u64,
    /// Insurance claims plus FEMA individual assistance, $M.
    pub ex_post_damage_musd: f64,
    pub hazus_damage_musd: f64,
}

pub fn sandy_counties() -> Vec<CountyRow> {
    csv::Reader::from_reader(SANDY_COUNTIES_CSV.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("embedded county fixture is well-formed")
}
