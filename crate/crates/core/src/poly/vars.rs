use std::fmt;

use crate::field::Field;

/// Index of a variable in a [`VarTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// Role a variable plays in a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// Coordinate of the affine space acted on.
    Base,
    /// Coordinate of an additive factor of the group.
    Additive,
    /// Coordinate of the torus; may carry negative exponents.
    Torus,
    /// Polynomial slice indeterminate.
    Slice,
    /// Laurent slice indeterminate.
    SliceLaurent,
    /// Helper variable (fresh parameters, localization variable).
    Auxiliary,
}

impl VarKind {
    pub fn is_laurent(self) -> bool {
        matches!(self, VarKind::Torus | VarKind::SliceLaurent)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub kind: VarKind,
}

/// Ordered variable list; the order fixes the monomial order for the
/// lifetime of a computation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarTable {
    field: Field,
    vars: Vec<Var>,
}

impl VarTable {
    pub fn new(field: Field) -> Self {
        VarTable { field, vars: Vec::new() }
    }

    /// Appends a variable. Panics on a duplicate name.
    pub fn push(&mut self, name: impl Into<String>, kind: VarKind) -> VarId {
        let name = name.into();
        assert!(self.lookup(&name).is_none(), "duplicate variable name {name}");
        self.vars.push(Var { name, kind });
        VarId(self.vars.len() - 1)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn var(&self, id: VarId) -> &Var {
        &self.vars[id.0]
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.vars[id.0].name
    }

    pub fn kind(&self, id: VarId) -> VarKind {
        self.vars[id.0].kind
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.vars.len()).map(VarId)
    }

    pub fn ids_of_kind(&self, kind: VarKind) -> Vec<VarId> {
        self.ids().filter(|&v| self.kind(v) == kind).collect()
    }
}

impl fmt::Display for VarTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.vars.iter().map(|v| v.name.as_str()).collect();
        write!(f, "{} [{}]", self.field, names.join(", "))
    }
}
