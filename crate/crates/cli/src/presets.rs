//! Built-in experiment configs, addressable as `preset:NAME`.

const PRESETS: &[(&str, &str)] = &[
    ("sparse-affine-feasibility", include_str!("../presets/sparse-affine-feasibility.toml")),
    ("two-singleton-prox", include_str!("../presets/two-singleton-prox.toml")),
    ("crossed-lines-feasibility", include_str!("../presets/crossed-lines-feasibility.toml")),
    ("quadratic-plus-two-points-fb", include_str!("../presets/quadratic-plus-two-points-fb.toml")),
    ("two-quadratics-ppa", include_str!("../presets/two-quadratics-ppa.toml")),
];

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn get(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
