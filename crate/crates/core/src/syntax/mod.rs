//! Lossless S-expression model.
//!
//! Every node carries a [`NodeId`] that survives reduction steps untouched
//! nodes pass through, and every list stores the exact text of each gap
//! between its elements, so printing a parsed tree reproduces its source
//! byte for byte.

mod reader;
mod value;

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

pub use reader::{parse, parse_all, parse_expr, Document, ParseError};
pub use value::Value;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Identity token of a syntax node. Never reused within a process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u64);

impl NodeId {
    pub fn fresh() -> Self {
        NodeId(NEXT_ID.fetch_add(1, Ordering::Relaxed))
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// One run of inter-element material.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    /// Spaces and tabs, no line breaks.
    Whitespace(String),
    /// `;` up to (not including) the end of the line.
    LineComment(String),
    /// `#| ... |#`, delimiters included. May span lines.
    BlockComment(String),
    /// A newline followed by `indent` spaces.
    LineBreak(usize),
}

impl Segment {
    fn write_to(&self, out: &mut String) {
        match self {
            Segment::Whitespace(s) | Segment::LineComment(s) | Segment::BlockComment(s) => {
                out.push_str(s)
            }
            Segment::LineBreak(indent) => {
                out.push('\n');
                out.extend(std::iter::repeat_n(' ', *indent));
            }
        }
    }
}

/// The whitespace and comments occupying one gap of a list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Space {
    pub segments: Vec<Segment>,
}

impl Space {
    pub fn empty() -> Self {
        Space::default()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        self.write_to(&mut out);
        out
    }

    fn write_to(&self, out: &mut String) {
        for segment in &self.segments {
            segment.write_to(out);
        }
    }
}

/// A single space, used where reduction synthesizes a gap with no source to copy.
pub fn default_gap() -> Space {
    Space {
        segments: vec![Segment::Whitespace(" ".to_string())],
    }
}

/// An editable atom: its spelling plus the value that spelling denotes.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    id: NodeId,
    text: String,
    value: Value,
}

impl Atom {
    /// Builds an atom from source text. Returns `None` if `text` is not a valid atom.
    pub fn new(text: impl Into<String>) -> Option<Self> {
        let text = text.into();
        if text.is_empty() {
            return None;
        }
        if !text.starts_with('"')
            && text
                .chars()
                .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';' | '\''))
        {
            return None;
        }
        let value = Value::parse(&text)?;
        Some(Atom {
            id: NodeId::fresh(),
            text,
            value,
        })
    }

    /// Synthesizes an atom from a value using its canonical spelling.
    pub fn from_value(value: Value) -> Self {
        Atom {
            id: NodeId::fresh(),
            text: value.canonical_text(),
            value,
        }
    }

    pub fn symbol(name: &str) -> Self {
        Atom::from_value(Value::symbol(name))
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    /// Same text and value under a fresh identity.
    pub fn fresh_copy(&self) -> Self {
        Atom {
            id: NodeId::fresh(),
            text: self.text.clone(),
            value: self.value.clone(),
        }
    }
}

/// A parenthesized list. `gaps` always holds `children.len() + 1` entries for
/// a proper list and `children.len() + 3` for a dotted one: before the first
/// child, between children, [before and after the dot], before the close.
#[derive(Debug, Clone, PartialEq)]
pub struct ListNode {
    id: NodeId,
    children: Vec<Expr>,
    tail: Option<Box<Expr>>,
    gaps: Vec<Space>,
    quote_sugar: bool,
}

pub(crate) fn gap_count(children: usize, dotted: bool) -> usize {
    children + if dotted { 3 } else { 1 }
}

impl ListNode {
    /// A proper list whose interior gaps are single spaces.
    pub fn new(children: Vec<Expr>) -> Self {
        let gaps = Self::default_gaps(children.len(), false);
        ListNode {
            id: NodeId::fresh(),
            children,
            tail: None,
            gaps,
            quote_sugar: false,
        }
    }

    /// A dotted list with default gaps. Panics if `children` is empty.
    pub fn dotted(children: Vec<Expr>, tail: Expr) -> Self {
        assert!(
            !children.is_empty(),
            "a dotted list needs at least one element"
        );
        let gaps = Self::default_gaps(children.len(), true);
        ListNode {
            id: NodeId::fresh(),
            children,
            tail: Some(Box::new(tail)),
            gaps,
            quote_sugar: false,
        }
    }

    /// Builds a list with explicit gaps.
    ///
    /// Panics when the gap count does not match the element count.
    pub fn with_gaps(children: Vec<Expr>, tail: Option<Expr>, gaps: Vec<Space>) -> Self {
        assert_eq!(
            gaps.len(),
            gap_count(children.len(), tail.is_some()),
            "gap count does not match list shape"
        );
        assert!(tail.is_none() || !children.is_empty());
        ListNode {
            id: NodeId::fresh(),
            children,
            tail: tail.map(Box::new),
            gaps,
            quote_sugar: false,
        }
    }

    /// `'datum`, printed with the quote shorthand.
    pub(crate) fn quote_sugar(quote: Atom, space: Space, datum: Expr) -> Self {
        ListNode {
            id: NodeId::fresh(),
            children: vec![Expr::Atom(quote), datum],
            tail: None,
            gaps: vec![Space::empty(), space, Space::empty()],
            quote_sugar: true,
        }
    }

    fn default_gaps(children: usize, dotted: bool) -> Vec<Space> {
        let count = gap_count(children, dotted);
        (0..count)
            .map(|i| {
                if i == 0 || i == count - 1 {
                    Space::empty()
                } else {
                    default_gap()
                }
            })
            .collect()
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn children(&self) -> &[Expr] {
        &self.children
    }

    pub fn tail(&self) -> Option<&Expr> {
        self.tail.as_deref()
    }

    pub fn gaps(&self) -> &[Space] {
        &self.gaps
    }

    pub fn is_quote_sugar(&self) -> bool {
        self.quote_sugar
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty() && self.tail.is_none()
    }

    /// Rebuilds this shell around new elements under a fresh identity,
    /// keeping the stored gaps when the shape allows it.
    pub fn rebuild(&self, children: Vec<Expr>, tail: Option<Expr>) -> Self {
        let same_shape =
            children.len() == self.children.len() && tail.is_some() == self.tail.is_some();
        if same_shape {
            ListNode {
                id: NodeId::fresh(),
                children,
                tail: tail.map(Box::new),
                gaps: self.gaps.clone(),
                quote_sugar: self.quote_sugar,
            }
        } else {
            match tail {
                Some(tail) if !children.is_empty() => ListNode::dotted(children, tail),
                _ => ListNode::new(children),
            }
        }
    }

    /// The elements and gaps of this list in reading order.
    pub fn items(&self) -> Vec<Item<'_>> {
        let mut items = Vec::with_capacity(self.children.len() * 2 + 4);
        let gap = |i: usize| Item::Space(i, &self.gaps[i]);
        items.push(gap(0));
        for (i, child) in self.children.iter().enumerate() {
            items.push(Item::Element(child));
            items.push(gap(i + 1));
        }
        if let Some(tail) = &self.tail {
            let n = self.children.len();
            items.push(Item::Dot);
            items.push(gap(n + 1));
            items.push(Item::Element(tail));
            items.push(gap(n + 2));
        }
        items
    }

    fn write_to(&self, out: &mut String) {
        if self.quote_sugar {
            out.push('\'');
            self.gaps[1].write_to(out);
            self.children[1].write_to(out);
            return;
        }
        out.push('(');
        for item in self.items() {
            match item {
                Item::Space(_, space) => space.write_to(out),
                Item::Element(e) => e.write_to(out),
                Item::Dot => out.push('.'),
            }
        }
        out.push(')');
    }
}

/// A step of a list traversal: a gap (with its index), an element, or the dot
/// of a dotted list.
#[derive(Debug, Clone, Copy)]
pub enum Item<'a> {
    Space(usize, &'a Space),
    Element(&'a Expr),
    Dot,
}

/// An identity-bearing syntax node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Atom(Atom),
    List(ListNode),
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Self {
        Expr::Atom(a)
    }
}

impl From<ListNode> for Expr {
    fn from(l: ListNode) -> Self {
        Expr::List(l)
    }
}

impl Expr {
    pub fn id(&self) -> NodeId {
        match self {
            Expr::Atom(a) => a.id,
            Expr::List(l) => l.id,
        }
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Expr::Atom(a) => Some(a),
            Expr::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&ListNode> {
        match self {
            Expr::List(l) => Some(l),
            Expr::Atom(_) => None,
        }
    }

    pub fn is_list(&self) -> bool {
        matches!(self, Expr::List(_))
    }

    pub fn as_symbol(&self) -> Option<&str> {
        self.as_atom().and_then(|a| a.value.as_symbol())
    }

    /// The elements of a proper list, if this is one.
    pub fn proper_elements(&self) -> Option<&[Expr]> {
        match self {
            Expr::List(l) if l.tail.is_none() => Some(&l.children),
            _ => None,
        }
    }

    /// `(keyword a b ...)` with exactly `arity` arguments after the keyword.
    pub fn special_form(&self, keyword: &str, arity: usize) -> Option<&[Expr]> {
        let elements = self.proper_elements()?;
        (elements.len() == arity + 1 && elements[0].as_symbol() == Some(keyword))
            .then(|| &elements[1..])
    }

    /// Structure-identical copy with fresh identities throughout.
    pub fn fresh_copy(&self) -> Expr {
        match self {
            Expr::Atom(a) => Expr::Atom(a.fresh_copy()),
            Expr::List(l) => Expr::List(ListNode {
                id: NodeId::fresh(),
                children: l.children.iter().map(Expr::fresh_copy).collect(),
                tail: l.tail.as_ref().map(|t| Box::new(t.fresh_copy())),
                gaps: l.gaps.clone(),
                quote_sugar: l.quote_sugar,
            }),
        }
    }

    /// Pre-order visit of this node and all descendants.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Expr)) {
        visit(self);
        if let Expr::List(l) = self {
            for child in &l.children {
                child.walk(visit);
            }
            if let Some(tail) = &l.tail {
                tail.walk(visit);
            }
        }
    }

    pub fn node_ids(&self) -> Vec<NodeId> {
        let mut ids = Vec::new();
        self.walk(&mut |e| ids.push(e.id()));
        ids
    }

    pub fn index(&self) -> HashMap<NodeId, &Expr> {
        let mut map = HashMap::new();
        self.walk(&mut |e| {
            map.insert(e.id(), e);
        });
        map
    }

    /// Child-index paths from this root; a dotted tail takes the index after
    /// the last child.
    pub fn paths(&self) -> HashMap<NodeId, Vec<usize>> {
        fn go(e: &Expr, path: &mut Vec<usize>, out: &mut HashMap<NodeId, Vec<usize>>) {
            out.insert(e.id(), path.clone());
            if let Expr::List(l) = e {
                let tail = l.tail.as_deref();
                for (i, child) in l.children.iter().chain(tail).enumerate() {
                    path.push(i);
                    go(child, path, out);
                    path.pop();
                }
            }
        }
        let mut out = HashMap::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn print(&self) -> String {
        let mut out = String::new();
        self.write_to(&mut out);
        out
    }

    fn write_to(&self, out: &mut String) {
        match self {
            Expr::Atom(a) => out.push_str(&a.text),
            Expr::List(l) => l.write_to(out),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.print())
    }
}

/// Serializes an expression, reproducing stored spelling and gaps verbatim.
pub fn print(expr: &Expr) -> String {
    expr.print()
}

/// Same shape and atom values, ignoring identities and all spacing.
pub fn structural_equal(a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (Expr::Atom(x), Expr::Atom(y)) => x.value == y.value,
        (Expr::List(x), Expr::List(y)) => {
            x.children.len() == y.children.len()
                && x.children
                    .iter()
                    .zip(&y.children)
                    .all(|(p, q)| structural_equal(p, q))
                && match (&x.tail, &y.tail) {
                    (None, None) => true,
                    (Some(p), Some(q)) => structural_equal(p, q),
                    _ => false,
                }
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(text: &str) -> Expr {
        Atom::new(text).unwrap().into()
    }

    #[test]
    fn programmatic_list_prints_with_default_gaps() {
        let list = ListNode::new(vec![atom("+"), atom("2"), atom("3")]);
        assert_eq!(print(&list.into()), "(+ 2 3)");
        assert_eq!(print(&ListNode::new(vec![]).into()), "()");
    }

    #[test]
    fn default_gap_is_one_space() {
        assert_eq!(default_gap().text(), " ");
        let two = ListNode::new(vec![atom("a"), atom("b")]);
        assert_eq!(print(&two.into()).matches(' ').count(), 1);
    }

    #[test]
    fn dotted_list_gap_count() {
        let l = ListNode::dotted(vec![atom("a")], atom("b"));
        assert_eq!(l.gaps().len(), 4);
        assert_eq!(print(&l.into()), "(a . b)");
    }

    #[test]
    #[should_panic]
    fn with_gaps_rejects_wrong_count() {
        ListNode::with_gaps(vec![atom("a")], None, vec![Space::empty()]);
    }

    #[test]
    fn atoms_reject_delimiters() {
        assert!(Atom::new("a b").is_none());
        assert!(Atom::new("").is_none());
        assert!(Atom::new("(").is_none());
        assert!(Atom::new("\"a b\"").is_some());
    }

    #[test]
    fn items_follow_reading_order() {
        let l = ListNode::new(vec![atom("a"), atom("b")]);
        let kinds: Vec<_> = l
            .items()
            .iter()
            .map(|i| match i {
                Item::Space(..) => 's',
                Item::Element(_) => 'e',
                Item::Dot => '.',
            })
            .collect();
        assert_eq!(kinds, ['s', 'e', 's', 'e', 's']);
        assert_eq!(ListNode::new(vec![]).items().len(), 1);
    }

    #[test]
    fn fresh_copy_renews_every_id() {
        let e: Expr = ListNode::new(vec![atom("a"), ListNode::new(vec![atom("b")]).into()]).into();
        let c = e.fresh_copy();
        assert!(structural_equal(&e, &c));
        let old = e.node_ids();
        assert!(c.node_ids().iter().all(|id| !old.contains(id)));
    }
}
