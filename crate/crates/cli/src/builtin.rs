pub struct Builtin {
    pub name: &'static str,
    pub text: &'static str,
}

impl Builtin {
    /// The leading comment of the scenario.
    pub fn summary(&self) -> &'static str {
        self.text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix('#'))
            .map(str::trim)
            .unwrap_or("")
    }
}

pub const BUILTINS: &[Builtin] = &[
    Builtin { name: "q8", text: include_str!("../../../scenarios/q8.scn") },
    Builtin { name: "inner_twist_counterexample", text: include_str!("../../../scenarios/inner_twist_counterexample.scn") },
    Builtin { name: "instance_matrix", text: include_str!("../../../scenarios/instance_matrix.scn") },
    Builtin { name: "center", text: include_str!("../../../scenarios/center.scn") },
    Builtin { name: "round_trips", text: include_str!("../../../scenarios/round_trips.scn") },
    Builtin { name: "cyclic_factor_twist", text: include_str!("../../../scenarios/cyclic_factor_twist.scn") },
];

pub fn find(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        for b in BUILTINS {
            crate::scenario::parse(b.text).unwrap_or_else(|e| panic!("{}: {e}", b.name));
            assert!(!b.summary().is_empty());
        }
    }
}
