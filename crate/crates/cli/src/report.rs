//! Structured `key = value` reports with a fixed key order.

use std::fmt;

use bvsim_core::fmt::sig;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    title: String,
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            entries: Vec::new(),
        }
    }

    pub fn text(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.text(key, sig(value))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {}", self.title)?;
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_insertion_order() {
        let mut r = Report::new("run");
        r.text("n", 2).num("max_impurity", 0.0).text("a_true", "10");
        assert_eq!(
            r.to_string(),
            "# run\nn = 2\nmax_impurity = 0\na_true = 10\n"
        );
        assert_eq!(r.get("a_true"), Some("10"));
    }
}
