use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VarRole {
    Independent,
    Dependent,
    Jet,
    Parameter,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VarTableError {
    #[error("duplicate variable `{0}`")]
    Duplicate(String),
    #[error("`{0}` is not a valid jet coordinate name")]
    BadJetName(String),
}

/// Ordered variable names with roles.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VarTable {
    entries: Vec<(String, VarRole)>,
}

/// `u_xy`-style names: a dependent variable, an underscore, and sorted
/// derivative indices drawn from the independent coordinates.
fn valid_jet_name(name: &str) -> bool {
    let Some((head, idx)) = name.split_once('_') else {
        return false;
    };
    !head.is_empty()
        && !idx.is_empty()
        && idx.chars().all(|c| c.is_ascii_lowercase())
        && idx.chars().zip(idx.chars().skip(1)).all(|(a, b)| a <= b)
}

impl VarTable {
    pub fn new() -> VarTable {
        VarTable::default()
    }

    pub fn add(&mut self, name: &str, role: VarRole) -> Result<(), VarTableError> {
        if self.entries.iter().any(|(n, _)| n == name) {
            return Err(VarTableError::Duplicate(name.to_string()));
        }
        if role == VarRole::Jet && !valid_jet_name(name) {
            return Err(VarTableError::BadJetName(name.to_string()));
        }
        self.entries.push((name.to_string(), role));
        Ok(())
    }

    pub fn with(mut self, name: &str, role: VarRole) -> Result<VarTable, VarTableError> {
        self.add(name, role)?;
        Ok(self)
    }

    pub fn role(&self, name: &str) -> Option<VarRole> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| *r)
    }

    pub fn names(&self, role: VarRole) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(_, r)| *r == role)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, VarRole)> {
        self.entries.iter().map(|(n, r)| (n.as_str(), *r))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_unsorted_jets() {
        let mut t = VarTable::new();
        t.add("x", VarRole::Independent).unwrap();
        t.add("u_xy", VarRole::Jet).unwrap();
        assert_eq!(
            t.add("x", VarRole::Parameter),
            Err(VarTableError::Duplicate("x".into()))
        );
        assert!(matches!(t.add("u_yx", VarRole::Jet), Err(VarTableError::BadJetName(_))));
        assert_eq!(t.role("u_xy"), Some(VarRole::Jet));
        assert_eq!(t.names(VarRole::Independent), vec!["x"]);
    }
}
