//! Expression trees over the arithmetic/transcendental function set, with
//! protected primitive semantics, evaluation, random generation and the
//! node-addressing helpers the genetic operators need.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{GpError, Result};

/// Magnitude bound applied to every primitive result.
pub const CLAMP: f64 = 1e300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Primitive {
    Add,
    Sub,
    Mul,
    Div,
    Tan,
    Sin,
    Cos,
    Log,
    Exp,
    Sqrt,
}

impl Primitive {
    pub const ALL: [Primitive; 10] = [
        Primitive::Add,
        Primitive::Sub,
        Primitive::Mul,
        Primitive::Div,
        Primitive::Tan,
        Primitive::Sin,
        Primitive::Cos,
        Primitive::Log,
        Primitive::Exp,
        Primitive::Sqrt,
    ];

    pub fn arity(self) -> usize {
        match self {
            Primitive::Add | Primitive::Sub | Primitive::Mul | Primitive::Div => 2,
            _ => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Primitive::Add => "+",
            Primitive::Sub => "-",
            Primitive::Mul => "*",
            Primitive::Div => "/",
            Primitive::Tan => "tan",
            Primitive::Sin => "sin",
            Primitive::Cos => "cos",
            Primitive::Log => "log",
            Primitive::Exp => "exp",
            Primitive::Sqrt => "sqrt",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Primitive> {
        Primitive::ALL.iter().copied().find(|p| p.symbol() == s)
    }

    /// Applies the protected form of the primitive.
    ///
    /// Panics if `args.len()` differs from the arity.
    pub fn apply(self, args: &[f64]) -> f64 {
        assert_eq!(
            args.len(),
            self.arity(),
            "{} expects {} argument(s), got {}",
            self.symbol(),
            self.arity(),
            args.len()
        );
        let v = match self {
            Primitive::Add => args[0] + args[1],
            Primitive::Sub => args[0] - args[1],
            Primitive::Mul => args[0] * args[1],
            Primitive::Div => {
                if args[1] == 0.0 {
                    1.0
                } else {
                    args[0] / args[1]
                }
            }
            Primitive::Tan => args[0].tan(),
            Primitive::Sin => args[0].sin(),
            Primitive::Cos => args[0].cos(),
            Primitive::Log => {
                if args[0] == 0.0 {
                    0.0
                } else {
                    args[0].abs().ln()
                }
            }
            Primitive::Exp => args[0].exp(),
            Primitive::Sqrt => args[0].abs().sqrt(),
        };
        sanitize(v)
    }
}

/// NaN becomes 0; everything else is clamped into `[-CLAMP, CLAMP]`.
pub fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-CLAMP, CLAMP)
    }
}

pub fn apply_primitive(p: Primitive, args: &[f64]) -> f64 {
    p.apply(args)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprTree {
    Function(Primitive, Vec<ExprTree>),
    Variable(usize),
    /// Ephemeral random constant. Only generated when the terminal set
    /// enables it.
    Constant(f64),
}

/// Path of child indices from the root to a node.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    /// Depth of the addressed node (root = 0).
    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl ExprTree {
    pub fn var(index: usize) -> Self {
        ExprTree::Variable(index)
    }

    pub fn unary(p: Primitive, a: ExprTree) -> Self {
        ExprTree::Function(p, vec![a])
    }

    pub fn binary(p: Primitive, a: ExprTree, b: ExprTree) -> Self {
        ExprTree::Function(p, vec![a, b])
    }

    pub fn is_terminal(&self) -> bool {
        !matches!(self, ExprTree::Function(..))
    }

    pub fn eval(&self, inputs: &[f64]) -> f64 {
        match self {
            ExprTree::Variable(i) => {
                assert!(
                    *i < inputs.len(),
                    "variable x{} out of range for {} input(s)",
                    i,
                    inputs.len()
                );
                inputs[*i]
            }
            ExprTree::Constant(c) => *c,
            ExprTree::Function(p, children) => match children.as_slice() {
                [a] => p.apply(&[a.eval(inputs)]),
                [a, b] => p.apply(&[a.eval(inputs), b.eval(inputs)]),
                other => {
                    let args: Vec<f64> = other.iter().map(|c| c.eval(inputs)).collect();
                    p.apply(&args)
                }
            },
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            ExprTree::Function(_, children) => 1 + children.iter().map(ExprTree::size).sum::<usize>(),
            _ => 1,
        }
    }

    /// Longest root-to-leaf edge count; a lone terminal has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            ExprTree::Function(_, children) => {
                1 + children.iter().map(ExprTree::depth).max().unwrap_or(0)
            }
            _ => 0,
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var_index(&self) -> Option<usize> {
        match self {
            ExprTree::Variable(i) => Some(*i),
            ExprTree::Constant(_) => None,
            ExprTree::Function(_, children) => children.iter().filter_map(ExprTree::max_var_index).max(),
        }
    }

    pub fn subtree_at(&self, at: &NodePath) -> &ExprTree {
        let mut node = self;
        for &i in &at.0 {
            node = match node {
                ExprTree::Function(_, children) if i < children.len() => &children[i],
                _ => panic!("invalid node path {:?}", at.0),
            };
        }
        node
    }

    /// Returns a copy of `self` with the subtree at `at` replaced by `sub`.
    pub fn replace_subtree(&self, at: &NodePath, sub: ExprTree) -> ExprTree {
        let mut out = self.clone();
        let mut slot = &mut out;
        for &i in &at.0 {
            slot = match slot {
                ExprTree::Function(_, children) if i < children.len() => &mut children[i],
                _ => panic!("invalid node path {:?}", at.0),
            };
        }
        *slot = sub;
        out
    }

    /// Paths to all function nodes and all terminal nodes, in prefix order.
    pub fn node_paths(&self) -> (Vec<NodePath>, Vec<NodePath>) {
        fn walk(t: &ExprTree, path: &mut Vec<usize>, funcs: &mut Vec<NodePath>, terms: &mut Vec<NodePath>) {
            match t {
                ExprTree::Function(_, children) => {
                    funcs.push(NodePath(path.clone()));
                    for (i, c) in children.iter().enumerate() {
                        path.push(i);
                        walk(c, path, funcs, terms);
                        path.pop();
                    }
                }
                _ => terms.push(NodePath(path.clone())),
            }
        }
        let (mut funcs, mut terms) = (Vec::new(), Vec::new());
        walk(self, &mut Vec::new(), &mut funcs, &mut terms);
        (funcs, terms)
    }
}

pub fn eval_tree(t: &ExprTree, inputs: &[f64]) -> f64 {
    t.eval(inputs)
}

pub fn tree_size(t: &ExprTree) -> usize {
    t.size()
}

pub fn tree_depth(t: &ExprTree) -> usize {
    t.depth()
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprTree::Variable(i) => write!(f, "x{i}"),
            ExprTree::Constant(c) => write!(f, "{c:?}"),
            ExprTree::Function(p, children) => {
                write!(f, "({}", p.symbol())?;
                for c in children {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for ExprTree {
    type Err = GpError;

    fn from_str(s: &str) -> Result<Self> {
        let spaced = s.replace('(', " ( ").replace(')', " ) ");
        let tokens: Vec<&str> = spaced.split_whitespace().collect();
        let mut pos = 0;
        let tree = parse_sexpr(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(GpError::Data(format!("trailing tokens in `{s}`")));
        }
        Ok(tree)
    }
}

fn parse_sexpr(tokens: &[&str], pos: &mut usize) -> Result<ExprTree> {
    let tok = *tokens
        .get(*pos)
        .ok_or_else(|| GpError::Data("unexpected end of expression".into()))?;
    *pos += 1;
    if tok == "(" {
        let head = *tokens
            .get(*pos)
            .ok_or_else(|| GpError::Data("unexpected end of expression".into()))?;
        *pos += 1;
        let p = Primitive::from_symbol(head)
            .ok_or_else(|| GpError::Data(format!("unknown primitive `{head}`")))?;
        let mut children = Vec::with_capacity(p.arity());
        while tokens.get(*pos) != Some(&")") {
            children.push(parse_sexpr(tokens, pos)?);
        }
        *pos += 1;
        if children.len() != p.arity() {
            return Err(GpError::Data(format!(
                "`{head}` takes {} argument(s), found {}",
                p.arity(),
                children.len()
            )));
        }
        Ok(ExprTree::Function(p, children))
    } else if tok == ")" {
        Err(GpError::Data("unbalanced `)`".into()))
    } else if let Some(idx) = tok.strip_prefix('x') {
        idx.parse()
            .map(ExprTree::Variable)
            .map_err(|_| GpError::Data(format!("bad variable `{tok}`")))
    } else {
        tok.parse()
            .map(ExprTree::Constant)
            .map_err(|_| GpError::Data(format!("bad terminal `{tok}`")))
    }
}

/// The terminals a tree may use: `n_vars` input variables and optionally an
/// ephemeral random constant drawn uniformly from a range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TerminalSet {
    pub n_vars: usize,
    pub erc: Option<(f64, f64)>,
}

impl TerminalSet {
    pub fn vars(n_vars: usize) -> Self {
        assert!(n_vars >= 1, "terminal set needs at least one variable");
        TerminalSet { n_vars, erc: None }
    }

    fn len(&self) -> usize {
        self.n_vars + usize::from(self.erc.is_some())
    }

    fn random_terminal<R: Rng + ?Sized>(&self, rng: &mut R) -> ExprTree {
        let k = rng.gen_range(0..self.len());
        match self.erc {
            Some((lo, hi)) if k == self.n_vars => ExprTree::Constant(rng.gen_range(lo..=hi)),
            _ => ExprTree::Variable(k),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowKind {
    Grow,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrowMethod {
    pub kind: GrowKind,
    pub max_depth: usize,
}

impl GrowMethod {
    pub fn grow(max_depth: usize) -> Self {
        GrowMethod { kind: GrowKind::Grow, max_depth }
    }

    pub fn full(max_depth: usize) -> Self {
        GrowMethod { kind: GrowKind::Full, max_depth }
    }
}

/// Koza grow/full generation. With `Grow` the root is always a function
/// (when depth allows); deeper slots choose uniformly among all functions
/// and terminals.
pub fn random_tree<R: Rng + ?Sized>(method: GrowMethod, terminals: &TerminalSet, rng: &mut R) -> ExprTree {
    build(method, terminals, 0, rng)
}

fn build<R: Rng + ?Sized>(method: GrowMethod, terminals: &TerminalSet, depth: usize, rng: &mut R) -> ExprTree {
    if depth >= method.max_depth {
        return terminals.random_terminal(rng);
    }
    let n_funcs = Primitive::ALL.len();
    let pick_function = match method.kind {
        GrowKind::Full => true,
        GrowKind::Grow if depth == 0 => true,
        GrowKind::Grow => rng.gen_range(0..n_funcs + terminals.len()) < n_funcs,
    };
    if !pick_function {
        return terminals.random_terminal(rng);
    }
    let p = Primitive::ALL[rng.gen_range(0..n_funcs)];
    let children = (0..p.arity())
        .map(|_| build(method, terminals, depth + 1, rng))
        .collect();
    ExprTree::Function(p, children)
}

/// Probability of picking a function node as a genetic-operator point.
pub const FUNCTION_PICK_PROB: f64 = 0.9;

/// Picks a crossover/mutation point: a uniformly random function node with
/// probability 0.9, otherwise a uniformly random terminal.
pub fn pick_node<R: Rng + ?Sized>(t: &ExprTree, rng: &mut R) -> NodePath {
    let (funcs, terms) = t.node_paths();
    if funcs.is_empty() {
        return NodePath::root();
    }
    if rng.gen::<f64>() < FUNCTION_PICK_PROB {
        funcs[rng.gen_range(0..funcs.len())].clone()
    } else {
        terms[rng.gen_range(0..terms.len())].clone()
    }
}

pub fn replace_subtree(t: &ExprTree, at: &NodePath, sub: ExprTree) -> ExprTree {
    t.replace_subtree(at, sub)
}
