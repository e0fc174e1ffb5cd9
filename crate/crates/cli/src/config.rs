use std::fmt::Display;
use std::path::Path;

/// Effective settings of a run, printed as a command line that reproduces it.
pub struct ConfigLine {
    parts: Vec<String>,
}

impl ConfigLine {
    pub fn new(command: &str) -> Self {
        Self {
            parts: vec!["mgfnorm".into(), command.into()],
        }
    }

    pub fn positional(mut self, value: impl Display) -> Self {
        self.parts.push(value.to_string());
        self
    }

    pub fn flag(mut self, name: &str, value: impl Display) -> Self {
        self.parts.push(format!("--{name}"));
        self.parts.push(quote(&value.to_string()));
        self
    }

    pub fn switch(mut self, name: &str, on: bool) -> Self {
        if on {
            self.parts.push(format!("--{name}"));
        }
        self
    }

    pub fn opt(self, name: &str, value: Option<impl Display>) -> Self {
        match value {
            Some(v) => self.flag(name, v),
            None => self,
        }
    }

    pub fn path(self, name: &str, value: Option<&Path>) -> Self {
        self.opt(name, value.map(|p| p.display()))
    }

    pub fn list<T: Display>(self, name: &str, values: &[T]) -> Self {
        if values.is_empty() {
            return self;
        }
        let joined = values.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        self.flag(name, joined)
    }

    /// Prints the line to standard error.
    pub fn emit(&self) {
        eprintln!("# config: {}", self.parts.join(" "));
    }
}

fn quote(s: &str) -> String {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "._-+,:/=".contains(c)) {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', r"'\''"))
    }
}

/// Warning for smoothing parameters where the asymptotic moments are undefined.
pub fn warn_small_beta(beta: f64) {
    if beta <= 2.0 {
        eprintln!(
            "warning: beta = {beta} <= 2; the statistic is finite but the limiting null moments are not"
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoting() {
        assert_eq!(quote("aep:0.4,1.182,1.820"), "aep:0.4,1.182,1.820");
        assert_eq!(quote("a b"), "'a b'");
        assert_eq!(quote("t;5"), "'t;5'");
    }
}
