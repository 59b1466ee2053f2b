//! Typed, function-free first-order logic.
//!
//! Identifiers beginning with a lowercase letter are variables; anything else
//! (uppercase-initial, digit-initial or quoted) is a constant. Every variable
//! is implicitly universally quantified and gets its type from the argument
//! positions it occupies.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("variable `{variable}` used as both `{first}` and `{second}`")]
    TypeConflict {
        variable: String,
        first: String,
        second: String,
    },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("predicate `{predicate}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("predicate `{0}` declared twice")]
    DuplicatePredicate(String),
    #[error("domain `{0}` declared twice")]
    DuplicateDomain(String),
    #[error("constant `{constant}` listed twice in domain `{domain}`")]
    DuplicateConstant { domain: String, constant: String },
    #[error("variable `{0}` has no binding")]
    IncompleteBinding(String),
    #[error("constant `{constant}` is not in domain `{domain}` (bound to `{variable}`)")]
    WrongDomainConstant {
        variable: String,
        constant: String,
        domain: String,
    },
    #[error("ground atom {0} has no truth value")]
    UnknownAtom(String),
    #[error("formula is not ground: variable `{0}` remains")]
    NotGround(String),
}

/// A named, ordered set of constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub constants: Vec<String>,
}

impl Domain {
    pub fn new(name: impl Into<String>, constants: Vec<String>) -> Result<Self, LogicError> {
        let name = name.into();
        let mut seen = std::collections::HashSet::new();
        for c in &constants {
            if !seen.insert(c.as_str()) {
                return Err(LogicError::DuplicateConstant {
                    domain: name,
                    constant: c.clone(),
                });
            }
        }
        Ok(Domain { name, constants })
    }

    pub fn len(&self) -> usize {
        self.constants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constants.is_empty()
    }

    pub fn contains(&self, constant: &str) -> bool {
        self.constants.iter().any(|c| c == constant)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSchema {
    pub name: String,
    pub arg_types: Vec<String>,
}

impl PredicateSchema {
    pub fn arity(&self) -> usize {
        self.arg_types.len()
    }
}

/// Declared domains and predicates. Both keep insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    domains: Vec<Domain>,
    predicates: Vec<PredicateSchema>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_domain(&mut self, domain: Domain) -> Result<(), LogicError> {
        if self.domain(&domain.name).is_some() {
            return Err(LogicError::DuplicateDomain(domain.name));
        }
        self.domains.push(domain);
        Ok(())
    }

    pub fn add_predicate(&mut self, schema: PredicateSchema) -> Result<(), LogicError> {
        if self.predicate(&schema.name).is_some() {
            return Err(LogicError::DuplicatePredicate(schema.name));
        }
        for ty in &schema.arg_types {
            if self.domain(ty).is_none() {
                return Err(LogicError::UnknownDomain(ty.clone()));
            }
        }
        self.predicates.push(schema);
        Ok(())
    }

    /// Appends `constant` to `domain` unless already present. Returns whether
    /// the domain grew.
    pub fn add_constant(&mut self, domain: &str, constant: &str) -> Result<bool, LogicError> {
        let d = self
            .domains
            .iter_mut()
            .find(|d| d.name == domain)
            .ok_or_else(|| LogicError::UnknownDomain(domain.to_string()))?;
        if d.contains(constant) {
            return Ok(false);
        }
        d.constants.push(constant.to_string());
        Ok(true)
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn predicates(&self) -> &[PredicateSchema] {
        &self.predicates
    }

    pub fn domain(&self, name: &str) -> Option<&Domain> {
        self.domains.iter().find(|d| d.name == name)
    }

    pub fn domain_index(&self, name: &str) -> Option<usize> {
        self.domains.iter().position(|d| d.name == name)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateSchema> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn predicate_index(&self, name: &str) -> Option<usize> {
        self.predicates.iter().position(|p| p.name == name)
    }

    /// Domain sizes keyed by domain name.
    pub fn sizes(&self) -> BTreeMap<String, u64> {
        self.domains
            .iter()
            .map(|d| (d.name.clone(), d.len() as u64))
            .collect()
    }

    /// Checks that `atom` is a well-typed ground atom of this signature.
    pub fn check_ground_atom(&self, atom: &GroundAtom) -> Result<&PredicateSchema, LogicError> {
        let schema = self
            .predicate(&atom.predicate)
            .ok_or_else(|| LogicError::UnknownPredicate(atom.predicate.clone()))?;
        if schema.arity() != atom.args.len() {
            return Err(LogicError::ArityMismatch {
                predicate: atom.predicate.clone(),
                expected: schema.arity(),
                found: atom.args.len(),
            });
        }
        Ok(schema)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    /// Classifies a bare identifier by the lexical convention.
    pub fn from_ident(ident: &str) -> Term {
        if is_variable_name(ident) {
            Term::Var(ident.to_string())
        } else {
            Term::Const(ident.to_string())
        }
    }
}

pub fn is_variable_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_lowercase())
}

/// True when `c` can be written without quotes.
pub fn is_plain_constant(c: &str) -> bool {
    let mut chars = c.chars();
    match chars.next() {
        Some(first) if first.is_ascii_uppercase() || first.is_ascii_digit() => {}
        _ => return false,
    }
    chars.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

pub(crate) fn write_constant(f: &mut fmt::Formatter<'_>, c: &str) -> fmt::Result {
    if is_plain_constant(c) {
        f.write_str(c)
    } else {
        f.write_str("\"")?;
        for ch in c.chars() {
            match ch {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                _ => write!(f, "{ch}")?,
            }
        }
        f.write_str("\"")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write_constant(f, c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    /// The ground atom this atom denotes, if it has no variables.
    pub fn to_ground(&self) -> Result<GroundAtom, LogicError> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Ok(c.clone()),
                Term::Var(v) => Err(LogicError::NotGround(v.clone())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroundAtom::new(self.predicate.clone(), args))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A predicate applied to constants only. Ordering is by predicate name,
/// then argument list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<String>) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args,
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write_constant(f, a)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Quantifier-free formula tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: &str, args: &[&str]) -> Formula {
        Formula::Atom(Atom::new(
            predicate,
            args.iter().map(|a| Term::from_ident(a)).collect(),
        ))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Atom occurrences, left to right.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::Atom(a) => out.push(a),
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Rewrites every term with `f`, keeping the tree shape.
    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(Atom {
                predicate: a.predicate.clone(),
                args: a.args.iter().map(&mut *f).collect(),
            }),
            Formula::Not(x) => Formula::not(x.map_terms(f)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Or(a, b) => Formula::or(a.map_terms(f), b.map_terms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_terms(f), b.map_terms(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_terms(f), b.map_terms(f)),
        }
    }

    /// Nesting depth; an atom has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(f) => 1 + f.depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(f: &mut fmt::Formatter<'_>, x: &Formula) -> fmt::Result {
            match x {
                Formula::Atom(_) | Formula::Not(_) => write!(f, "{x}"),
                _ => write!(f, "({x})"),
            }
        }
        let (a, op, b) = match self {
            Formula::Atom(a) => return write!(f, "{a}"),
            Formula::Not(x) => {
                f.write_str("!")?;
                return operand(f, x);
            }
            Formula::And(a, b) => (a, " ^ ", b),
            Formula::Or(a, b) => (a, " v ", b),
            Formula::Implies(a, b) => (a, " => ", b),
            Formula::Iff(a, b) => (a, " <=> ", b),
        };
        operand(f, a)?;
        f.write_str(op)?;
        operand(f, b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedFormula {
    pub formula: Formula,
    pub weight: f64,
}

/// Infers the type of every variable in `f`, in order of first occurrence.
pub fn free_variables(f: &Formula, sig: &Signature) -> Result<Vec<(String, String)>, LogicError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for atom in f.atoms() {
        let schema = sig
            .predicate(&atom.predicate)
            .ok_or_else(|| LogicError::UnknownPredicate(atom.predicate.clone()))?;
        if schema.arity() != atom.args.len() {
            return Err(LogicError::ArityMismatch {
                predicate: atom.predicate.clone(),
                expected: schema.arity(),
                found: atom.args.len(),
            });
        }
        for (term, ty) in atom.args.iter().zip(&schema.arg_types) {
            if let Term::Var(v) = term {
                match out.iter().find(|(name, _)| name == v) {
                    Some((_, existing)) if existing != ty => {
                        return Err(LogicError::TypeConflict {
                            variable: v.clone(),
                            first: existing.clone(),
                            second: ty.clone(),
                        })
                    }
                    Some(_) => {}
                    None => out.push((v.clone(), ty.clone())),
                }
            }
        }
    }
    Ok(out)
}

/// Replaces every variable of `f` by its bound constant.
pub fn substitute(
    f: &Formula,
    binding: &BTreeMap<String, String>,
    sig: &Signature,
) -> Result<Formula, LogicError> {
    for (var, ty) in free_variables(f, sig)? {
        let constant = binding
            .get(&var)
            .ok_or_else(|| LogicError::IncompleteBinding(var.clone()))?;
        let domain = sig
            .domain(&ty)
            .ok_or_else(|| LogicError::UnknownDomain(ty.clone()))?;
        if !domain.contains(constant) {
            return Err(LogicError::WrongDomainConstant {
                variable: var,
                constant: constant.clone(),
                domain: ty,
            });
        }
    }
    Ok(f.map_terms(&mut |t| match t {
        Term::Var(v) => Term::Const(binding[v].clone()),
        c => c.clone(),
    }))
}

/// Anything that can report the truth value of a ground atom.
pub trait Assignment {
    fn truth(&self, atom: &GroundAtom) -> Option<bool>;
}

impl Assignment for HashMap<GroundAtom, bool> {
    fn truth(&self, atom: &GroundAtom) -> Option<bool> {
        self.get(atom).copied()
    }
}

impl Assignment for BTreeMap<GroundAtom, bool> {
    fn truth(&self, atom: &GroundAtom) -> Option<bool> {
        self.get(atom).copied()
    }
}

/// Boolean value of a ground formula under `world`.
pub fn evaluate(g: &Formula, world: &impl Assignment) -> Result<bool, LogicError> {
    Ok(match g {
        Formula::Atom(a) => {
            let ground = a.to_ground()?;
            world
                .truth(&ground)
                .ok_or_else(|| LogicError::UnknownAtom(ground.to_string()))?
        }
        Formula::Not(x) => !evaluate(x, world)?,
        Formula::And(a, b) => evaluate(a, world)? & evaluate(b, world)?,
        Formula::Or(a, b) => evaluate(a, world)? | evaluate(b, world)?,
        Formula::Implies(a, b) => !evaluate(a, world)? | evaluate(b, world)?,
        Formula::Iff(a, b) => evaluate(a, world)? == evaluate(b, world)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn person_sig() -> Signature {
        let mut sig = Signature::new();
        sig.add_domain(Domain::new("person", vec!["A".into(), "B".into()]).unwrap())
            .unwrap();
        sig.add_domain(Domain::new("thing", vec!["T1".into()]).unwrap())
            .unwrap();
        for (name, args) in [
            ("Smokes", vec!["person"]),
            ("Cancer", vec!["person"]),
            ("Friends", vec!["person", "person"]),
            ("Owns", vec!["person", "thing"]),
        ] {
            sig.add_predicate(PredicateSchema {
                name: name.into(),
                arg_types: args.into_iter().map(String::from).collect(),
            })
            .unwrap();
        }
        sig
    }

    fn smokes_cancer() -> Formula {
        Formula::implies(
            Formula::atom("Smokes", &["x"]),
            Formula::atom("Cancer", &["x"]),
        )
    }

    fn friends_rule() -> Formula {
        Formula::implies(
            Formula::atom("Friends", &["x", "y"]),
            Formula::iff(
                Formula::atom("Smokes", &["x"]),
                Formula::atom("Smokes", &["y"]),
            ),
        )
    }

    fn ga(p: &str, args: &[&str]) -> GroundAtom {
        GroundAtom::new(p, args.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn free_variables_of_smoking_rule() {
        let vars = free_variables(&smokes_cancer(), &person_sig()).unwrap();
        assert_eq!(vars, vec![("x".to_string(), "person".to_string())]);
    }

    #[test]
    fn free_variables_two_types() {
        let f = Formula::implies(
            Formula::atom("Owns", &["x", "y"]),
            Formula::atom("Smokes", &["x"]),
        );
        let vars = free_variables(&f, &person_sig()).unwrap();
        assert_eq!(
            vars,
            vec![("x".into(), "person".into()), ("y".into(), "thing".into())]
        );
    }

    #[test]
    fn free_variables_friends_rule() {
        let vars = free_variables(&friends_rule(), &person_sig()).unwrap();
        assert_eq!(
            vars,
            vec![("x".into(), "person".into()), ("y".into(), "person".into())]
        );
    }

    #[test]
    fn type_conflict_is_an_error() {
        let f = Formula::and(
            Formula::atom("Owns", &["x", "y"]),
            Formula::atom("Smokes", &["y"]),
        );
        assert!(matches!(
            free_variables(&f, &person_sig()),
            Err(LogicError::TypeConflict { .. })
        ));
    }

    #[test]
    fn substitute_binds_all_variables() {
        let sig = person_sig();
        let binding = BTreeMap::from([("x".to_string(), "A".to_string())]);
        let g = substitute(&smokes_cancer(), &binding, &sig).unwrap();
        assert_eq!(g.to_string(), "Smokes(A) => Cancer(A)");
        assert!(free_variables(&g, &sig).unwrap().is_empty());
    }

    #[test]
    fn substitute_two_variables() {
        let sig = person_sig();
        let f = Formula::implies(
            Formula::atom("Owns", &["x", "y"]),
            Formula::atom("Smokes", &["x"]),
        );
        let binding = BTreeMap::from([("x".into(), "B".into()), ("y".into(), "T1".into())]);
        assert_eq!(
            substitute(&f, &binding, &sig).unwrap().to_string(),
            "Owns(B,T1) => Smokes(B)"
        );
    }

    #[test]
    fn substitute_errors() {
        let sig = person_sig();
        let f = Formula::implies(
            Formula::atom("Owns", &["x", "y"]),
            Formula::atom("Smokes", &["x"]),
        );
        let partial = BTreeMap::from([("x".to_string(), "A".to_string())]);
        assert_eq!(
            substitute(&f, &partial, &sig),
            Err(LogicError::IncompleteBinding("y".into()))
        );
        let wrong = BTreeMap::from([("x".into(), "T1".into()), ("y".into(), "T1".into())]);
        assert!(matches!(
            substitute(&f, &wrong, &sig),
            Err(LogicError::WrongDomainConstant { .. })
        ));
    }

    #[test]
    fn evaluate_examples() {
        let g = Formula::implies(
            Formula::atom("Smokes", &["A"]),
            Formula::atom("Cancer", &["A"]),
        );
        let mut w = HashMap::new();
        w.insert(ga("Smokes", &["A"]), false);
        w.insert(ga("Cancer", &["A"]), false);
        assert!(evaluate(&g, &w).unwrap());
        w.insert(ga("Smokes", &["A"]), true);
        assert!(!evaluate(&g, &w).unwrap());

        let h = Formula::implies(
            Formula::atom("Friends", &["A", "B"]),
            Formula::iff(
                Formula::atom("Smokes", &["A"]),
                Formula::atom("Smokes", &["B"]),
            ),
        );
        let w: HashMap<_, _> = [
            (ga("Friends", &["A", "B"]), true),
            (ga("Smokes", &["A"]), true),
            (ga("Smokes", &["B"]), true),
        ]
        .into_iter()
        .collect();
        assert!(evaluate(&h, &w).unwrap());
    }

    #[test]
    fn evaluate_unknown_atom() {
        let g = Formula::atom("Smokes", &["A"]);
        let w: HashMap<GroundAtom, bool> = HashMap::new();
        assert_eq!(
            evaluate(&g, &w),
            Err(LogicError::UnknownAtom("Smokes(A)".into()))
        );
    }

    #[test]
    fn evaluate_rejects_open_formula() {
        let w: HashMap<GroundAtom, bool> = HashMap::new();
        assert!(matches!(
            evaluate(&Formula::atom("Smokes", &["x"]), &w),
            Err(LogicError::NotGround(_))
        ));
    }

    #[test]
    fn evaluate_matches_truth_tables_exhaustively() {
        // Every connective against its truth table, over all assignments of
        // up to four distinct atoms.
        let atoms: Vec<Formula> = ["P", "Q", "R", "S"]
            .iter()
            .map(|p| Formula::atom(p, &[]))
            .collect();
        #[allow(clippy::type_complexity)]
        let shapes: Vec<(Formula, fn(&[bool]) -> bool)> = vec![
            (Formula::not(atoms[0].clone()), |v| !v[0]),
            (Formula::and(atoms[0].clone(), atoms[1].clone()), |v| {
                v[0] && v[1]
            }),
            (Formula::or(atoms[0].clone(), atoms[1].clone()), |v| {
                v[0] || v[1]
            }),
            (Formula::implies(atoms[0].clone(), atoms[1].clone()), |v| {
                !v[0] || v[1]
            }),
            (Formula::iff(atoms[0].clone(), atoms[1].clone()), |v| {
                v[0] == v[1]
            }),
            (
                Formula::implies(
                    Formula::and(atoms[0].clone(), atoms[1].clone()),
                    Formula::iff(atoms[2].clone(), Formula::not(atoms[3].clone())),
                ),
                |v| !(v[0] && v[1]) || (v[2] == !v[3]),
            ),
            (
                Formula::or(
                    Formula::not(Formula::iff(atoms[0].clone(), atoms[3].clone())),
                    Formula::and(atoms[1].clone(), atoms[2].clone()),
                ),
                |v| v[0] != v[3] || (v[1] && v[2]),
            ),
        ];
        for (f, truth) in shapes {
            for bits in 0u32..16 {
                let v: Vec<bool> = (0..4).map(|i| bits >> i & 1 == 1).collect();
                let w: HashMap<_, _> = ["P", "Q", "R", "S"]
                    .iter()
                    .zip(&v)
                    .map(|(p, &b)| (ga(p, &[]), b))
                    .collect();
                assert_eq!(evaluate(&f, &w).unwrap(), truth(&v), "{f} at {v:?}");
            }
        }
    }

    #[test]
    fn type_inference_is_deterministic() {
        let sig = person_sig();
        let a = free_variables(&friends_rule(), &sig).unwrap();
        let b = free_variables(&friends_rule(), &sig).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn display_quotes_odd_constants() {
        let a = GroundAtom::new("Likes", vec!["A".into(), "bob smith".into()]);
        assert_eq!(a.to_string(), "Likes(A,\"bob smith\")");
    }

    #[test]
    fn duplicate_declarations() {
        let mut sig = person_sig();
        assert!(matches!(
            sig.add_domain(Domain::new("person", vec![]).unwrap()),
            Err(LogicError::DuplicateDomain(_))
        ));
        assert!(matches!(
            sig.add_predicate(PredicateSchema {
                name: "Smokes".into(),
                arg_types: vec!["person".into()]
            }),
            Err(LogicError::DuplicatePredicate(_))
        ));
        assert!(matches!(
            sig.add_predicate(PredicateSchema {
                name: "Eats".into(),
                arg_types: vec!["food".into()]
            }),
            Err(LogicError::UnknownDomain(_))
        ));
        assert!(Domain::new("d", vec!["A".into(), "A".into()]).is_err());
    }
}
