//! Built-in model files, looked up by file stem.

const MODELS: &[(&str, &str)] = &[
    ("s2", include_str!("../models/s2.json")),
    ("s3", include_str!("../models/s3.json")),
    ("s4", include_str!("../models/s4.json")),
    ("cp2", include_str!("../models/cp2.json")),
    ("s2_wedge_s2", include_str!("../models/s2_wedge_s2.json")),
    ("u1_over_s2", include_str!("../models/u1_over_s2.json")),
    ("su2_over_s4", include_str!("../models/su2_over_s4.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    MODELS.iter().map(|(n, _)| *n)
}

/// Accepts `s2`, `s2.json` or `models/s2.json`.
pub fn get(name: &str) -> Option<&'static str> {
    let stem = std::path::Path::new(name).file_stem()?.to_str()?;
    MODELS.iter().find(|(n, _)| *n == stem).map(|(_, t)| *t)
}
