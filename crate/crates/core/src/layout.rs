//! Character-cell geometry of expressions drawn in box notation.
//!
//! A list is a box: one edge column and one padding column on each side,
//! one edge row above and below. Inside, elements flow in reading order
//! using the list's stored gaps: whitespace advances the column, a line
//! break starts a new row at its indent (measured from the box interior),
//! and comments occupy cells like any other text. Content is top-aligned
//! within a row. A quoted datum written `'x` has no box; it is drawn as a
//! tick followed by the datum.

use std::collections::{HashMap, HashSet};

use crate::syntax::{Expr, Item, ListNode, NodeId, Segment, Space};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Extent {
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Position {
    pub left: usize,
    pub top: usize,
}

/// Columns taken by the left edge and padding of a box.
pub const BOX_INSET: usize = 2;

/// Cursor state while walking a list's interior.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Traversal {
    pub column: usize,
    pub row: usize,
    /// Height of the tallest element on the current line so far.
    pub line_height: usize,
    /// Rightmost column reached so far.
    pub max_column: usize,
}

impl Traversal {
    fn new() -> Self {
        Traversal {
            line_height: 1,
            ..Default::default()
        }
    }

    fn advance(&mut self, cells: usize) {
        self.column += cells;
        self.max_column = self.max_column.max(self.column);
    }

    fn new_line(&mut self, indent: usize) {
        self.row += self.line_height;
        self.line_height = 1;
        self.column = indent;
        self.max_column = self.max_column.max(indent);
    }

    fn content(&self) -> Extent {
        Extent {
            width: self.max_column,
            height: self.row + self.line_height,
        }
    }
}

/// Visible text inside a gap, relative to where the gap starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpacePiece {
    pub dx: isize,
    pub dy: isize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceLayout {
    pub position: Position,
    pub pieces: Vec<SpacePiece>,
}

/// How an atom's text appears in cells: one cell per character, with
/// line breaks and tabs inside string literals shown on a single row.
pub fn display_text(text: &str) -> String {
    text.chars()
        .map(|c| match c {
            '\n' => '↵',
            '\t' | '\r' => ' ',
            c => c,
        })
        .collect()
}

fn atom_extent(text: &str) -> Extent {
    Extent {
        width: text.chars().count(),
        height: 1,
    }
}

type Visit<'v> = dyn FnMut(&Item, &Traversal, Option<&[SpacePiece]>) + 'v;

/// Walks the gaps and elements of `list` in reading order, calling `visit`
/// with the cursor as it stands at the start of each item. `measure`
/// supplies element extents.
fn walk(list: &ListNode, measure: &mut dyn FnMut(&Expr) -> Extent, visit: &mut Visit) -> Traversal {
    let mut t = Traversal::new();
    for (i, item) in list.items().iter().enumerate() {
        let start = t;
        match item {
            Item::Space(_, space) => {
                let pieces = advance_space(&mut t, space);
                visit(item, &start, Some(&pieces));
            }
            Item::Element(e) => {
                let extent = if list.is_quote_sugar() && i == 1 {
                    Extent {
                        width: 1,
                        height: 1,
                    }
                } else {
                    measure(e)
                };
                visit(item, &start, None);
                t.advance(extent.width);
                t.line_height = t.line_height.max(extent.height);
            }
            Item::Dot => {
                visit(item, &start, None);
                t.advance(1);
            }
        }
    }
    t
}

fn advance_space(t: &mut Traversal, space: &Space) -> Vec<SpacePiece> {
    let (col0, row0) = (t.column as isize, t.row as isize);
    let mut pieces = Vec::new();
    let mut piece = |t: &Traversal, text: &str| {
        if !text.is_empty() {
            pieces.push(SpacePiece {
                dx: t.column as isize - col0,
                dy: t.row as isize - row0,
                text: text.to_string(),
            });
        }
    };
    for segment in &space.segments {
        match segment {
            Segment::Whitespace(s) => t.advance(s.chars().count()),
            Segment::LineComment(s) => {
                let s = display_text(s);
                piece(t, &s);
                t.advance(s.chars().count());
            }
            Segment::BlockComment(s) => {
                for (k, line) in s.split('\n').enumerate() {
                    if k > 0 {
                        t.new_line(0);
                    }
                    let line = display_text(line);
                    piece(t, &line);
                    t.advance(line.chars().count());
                }
            }
            Segment::LineBreak(indent) => t.new_line(*indent),
        }
    }
    pieces
}

/// Visits gap₀, element₀, gap₁, … in reading order with the interior
/// cursor at the start of each item.
pub fn traverse(list: &ListNode, mut visit: impl FnMut(&Item, &Traversal)) {
    walk(list, &mut |e| extent(e), &mut |item, t, _| visit(item, t));
}

/// Size of `e` in cells, box edges included.
pub fn extent(e: &Expr) -> Extent {
    match e {
        Expr::Atom(a) => atom_extent(&display_text(a.text())),
        Expr::List(list) => {
            let content = walk(list, &mut |e| extent(e), &mut |_, _, _| {}).content();
            boxed(list, content)
        }
    }
}

fn boxed(list: &ListNode, content: Extent) -> Extent {
    if list.is_quote_sugar() {
        content
    } else {
        Extent {
            width: content.width + 2 * BOX_INSET,
            height: content.height + 2,
        }
    }
}

fn interior(list: &ListNode) -> (usize, usize) {
    if list.is_quote_sugar() {
        (0, 0)
    } else {
        (BOX_INSET, 1)
    }
}

/// Top-left cell of every node of `root`, relative to the root.
pub fn measure_positions(root: &Expr) -> HashMap<NodeId, Position> {
    Layout::of(root).positions
}

/// Complete geometry of one expression: extents and positions of every
/// node, where each gap and dot goes, and which atoms are drawn as ticks.
#[derive(Debug, Clone, Default)]
pub struct Layout {
    root: Option<NodeId>,
    extents: HashMap<NodeId, Extent>,
    positions: HashMap<NodeId, Position>,
    spaces: HashMap<(NodeId, usize), SpaceLayout>,
    dots: HashMap<NodeId, Position>,
    ticks: HashSet<NodeId>,
}

impl Layout {
    pub fn of(root: &Expr) -> Layout {
        let mut layout = Layout {
            root: Some(root.id()),
            ..Default::default()
        };
        layout.measure(root);
        layout.place(root, Position::default());
        layout
    }

    fn measure(&mut self, e: &Expr) -> Extent {
        let extent = match e {
            Expr::Atom(a) => atom_extent(&display_text(a.text())),
            Expr::List(list) => {
                let mut sizes = Vec::new();
                for child in list.children().iter().chain(list.tail()) {
                    sizes.push((child.id(), self.measure(child)));
                }
                let lookup: HashMap<_, _> = sizes.into_iter().collect();
                let content = walk(list, &mut |c| lookup[&c.id()], &mut |_, _, _| {}).content();
                if list.is_quote_sugar() {
                    self.extents.insert(
                        list.children()[0].id(),
                        Extent {
                            width: 1,
                            height: 1,
                        },
                    );
                }
                boxed(list, content)
            }
        };
        self.extents.insert(e.id(), extent);
        extent
    }

    fn place(&mut self, e: &Expr, at: Position) {
        self.positions.insert(e.id(), at);
        let Expr::List(list) = e else { return };
        let (ox, oy) = interior(list);
        let origin = Position {
            left: at.left + ox,
            top: at.top + oy,
        };
        let extents = &self.extents;
        let mut placed = Vec::new();
        let mut spaces = Vec::new();
        let mut dot = None;
        walk(list, &mut |c| extents[&c.id()], &mut |item, t, pieces| {
            let p = Position {
                left: origin.left + t.column,
                top: origin.top + t.row,
            };
            match item {
                Item::Space(idx, _) => spaces.push((
                    *idx,
                    SpaceLayout {
                        position: p,
                        pieces: pieces.unwrap_or_default().to_vec(),
                    },
                )),
                Item::Element(child) => placed.push(((*child).clone(), p)),
                Item::Dot => dot = Some(p),
            }
        });
        for (idx, space) in spaces {
            self.spaces.insert((list.id(), idx), space);
        }
        if let Some(p) = dot {
            self.dots.insert(list.id(), p);
        }
        if list.is_quote_sugar() {
            self.ticks.insert(list.children()[0].id());
        }
        for (child, p) in placed {
            self.place(&child, p);
        }
    }

    pub fn root_extent(&self) -> Extent {
        self.root.map(|r| self.extents[&r]).unwrap_or_default()
    }

    pub fn extent(&self, id: NodeId) -> Option<Extent> {
        self.extents.get(&id).copied()
    }

    pub fn position(&self, id: NodeId) -> Option<Position> {
        self.positions.get(&id).copied()
    }

    pub fn positions(&self) -> &HashMap<NodeId, Position> {
        &self.positions
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.positions.contains_key(&id)
    }

    /// Gap `index` of list `list`.
    pub fn space(&self, list: NodeId, index: usize) -> Option<&SpaceLayout> {
        self.spaces.get(&(list, index))
    }

    /// Where the dot of a dotted list is drawn.
    pub fn dot(&self, list: NodeId) -> Option<Position> {
        self.dots.get(&list).copied()
    }

    /// True for the `quote` atom of a `'x` form, drawn as a single tick.
    pub fn is_tick(&self, id: NodeId) -> bool {
        self.ticks.contains(&id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    fn child(e: &Expr, i: usize) -> &Expr {
        &e.as_list().unwrap().children()[i]
    }

    #[test]
    fn atom_extent_is_its_text() {
        assert_eq!(
            extent(&parse_expr("5").unwrap()),
            Extent {
                width: 1,
                height: 1
            }
        );
        assert_eq!(
            extent(&parse_expr("lambda").unwrap()),
            Extent {
                width: 6,
                height: 1
            }
        );
    }

    #[test]
    fn factorial_call_box() {
        let e = parse_expr("(! 5)").unwrap();
        assert_eq!(
            extent(&e),
            Extent {
                width: 7,
                height: 3
            }
        );
        let pos = measure_positions(&e);
        assert_eq!(pos[&e.id()], Position { left: 0, top: 0 });
        assert_eq!(pos[&child(&e, 0).id()], Position { left: 2, top: 1 });
        assert_eq!(pos[&child(&e, 1).id()], Position { left: 4, top: 1 });
    }

    #[test]
    fn line_break_adds_a_row() {
        let e = parse_expr("(a\n b)").unwrap();
        assert_eq!(
            extent(&e),
            Extent {
                width: 6,
                height: 4
            }
        );
        let pos = measure_positions(&e);
        assert_eq!(pos[&child(&e, 1).id()], Position { left: 3, top: 2 });
    }

    #[test]
    fn nested_boxes_stack_edges() {
        let e = parse_expr("(* n (! (- n 1)))").unwrap();
        let inner = child(&e, 2);
        let innermost = child(inner, 1);
        let pos = measure_positions(&e);
        assert_eq!(
            extent(innermost),
            Extent {
                width: 9,
                height: 3
            }
        );
        assert_eq!(
            extent(inner),
            Extent {
                width: 15,
                height: 5
            }
        );
        assert_eq!(
            extent(&e),
            Extent {
                width: 23,
                height: 7
            }
        );
        assert_eq!(pos[&inner.id()], Position { left: 6, top: 1 });
        assert_eq!(pos[&innermost.id()], Position { left: 10, top: 2 });
    }

    #[test]
    fn tall_element_pushes_the_next_line_down() {
        let e = parse_expr("((a)\n b)").unwrap();
        let pos = measure_positions(&e);
        assert_eq!(pos[&child(&e, 1).id()], Position { left: 3, top: 4 });
    }

    #[test]
    fn quote_sugar_has_no_box() {
        let e = parse_expr("'abc").unwrap();
        let l = Layout::of(&e);
        assert_eq!(
            l.root_extent(),
            Extent {
                width: 4,
                height: 1
            }
        );
        assert!(l.is_tick(child(&e, 0).id()));
        assert_eq!(
            l.extent(child(&e, 0).id()),
            Some(Extent {
                width: 1,
                height: 1
            })
        );
        assert_eq!(
            l.position(child(&e, 1).id()),
            Some(Position { left: 1, top: 0 })
        );
    }

    #[test]
    fn comments_and_dots_take_cells() {
        let e = parse_expr("(a ;hi\n . b)").unwrap();
        let l = Layout::of(&e);
        let gap = l.space(e.id(), 1).unwrap();
        assert_eq!(gap.position, Position { left: 3, top: 1 });
        assert_eq!(
            gap.pieces,
            vec![SpacePiece {
                dx: 1,
                dy: 0,
                text: ";hi".into()
            }]
        );
        assert_eq!(l.dot(e.id()), Some(Position { left: 3, top: 2 }));
        assert_eq!(
            l.root_extent(),
            Extent {
                width: 9,
                height: 4
            }
        );
    }

    #[test]
    fn block_comment_lines_start_at_the_interior_edge() {
        let e = parse_expr("(a #|x\n  y|# b)").unwrap();
        let l = Layout::of(&e);
        let gap = l.space(e.id(), 1).unwrap();
        assert_eq!(
            gap.pieces[1],
            SpacePiece {
                dx: -1,
                dy: 1,
                text: "  y|#".into()
            }
        );
        assert_eq!(
            l.position(child(&e, 1).id()),
            Some(Position { left: 8, top: 2 })
        );
    }

    #[test]
    fn traverse_visits() {
        let e = parse_expr("()").unwrap();
        let mut n = 0;
        traverse(e.as_list().unwrap(), |_, _| n += 1);
        assert_eq!(n, 1);
        let e = parse_expr("(a b)").unwrap();
        let mut kinds = Vec::new();
        traverse(e.as_list().unwrap(), |item, t| {
            kinds.push((matches!(item, Item::Element(_)), t.column));
        });
        assert_eq!(
            kinds,
            vec![(false, 0), (true, 0), (false, 1), (true, 2), (false, 3)]
        );
    }

    #[test]
    fn layout_agrees_with_free_functions() {
        let e = parse_expr("(define (f x)\n  (if (< x 1) 'a\n      (f (- x 1))))").unwrap();
        let l = Layout::of(&e);
        assert_eq!(l.root_extent(), extent(&e));
        assert_eq!(l.positions(), &measure_positions(&e));
        e.walk(&mut |n| {
            if !l.is_tick(n.id()) {
                assert_eq!(l.extent(n.id()), Some(extent(n)));
            }
        });
    }
}
