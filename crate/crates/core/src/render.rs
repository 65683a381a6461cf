//! Painters and the terminal cell grid.

use std::fmt;

use crate::layout::{display_text, Layout, Position, SpaceLayout};
use crate::syntax::{Expr, Item};

/// Sub-cell resolution of painter translations. Offsets are kept as
/// integers in these units so that translating back and forth is exact.
const SUBCELLS: f64 = (1u64 << 20) as f64;

fn to_fixed(v: f64) -> i64 {
    (v * SUBCELLS).round() as i64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PainterState {
    left: i64,
    top: i64,
    pub intensity: f64,
    pub stretch_x: f64,
    pub stretch_y: f64,
}

impl Default for PainterState {
    fn default() -> Self {
        PainterState {
            left: 0,
            top: 0,
            intensity: 1.0,
            stretch_x: 1.0,
            stretch_y: 1.0,
        }
    }
}

impl PainterState {
    pub fn left(&self) -> f64 {
        self.left as f64 / SUBCELLS
    }

    pub fn top(&self) -> f64 {
        self.top as f64 / SUBCELLS
    }
}

pub trait Painter {
    fn state(&self) -> PainterState;
    fn set_state(&mut self, state: PainterState);
    /// Draws a box outline with its top-left corner at the origin.
    fn draw_box(&mut self, width: f64, height: f64);
    /// Draws one row of text starting at the origin.
    fn draw_text(&mut self, text: &str);

    fn translate(&mut self, dx: f64, dy: f64) {
        let mut s = self.state();
        s.left += to_fixed(dx);
        s.top += to_fixed(dy);
        self.set_state(s);
    }
}

impl dyn Painter + '_ {
    /// Runs `f` with intensity multiplied by `i`.
    pub fn with_intensity(&mut self, i: f64, f: impl FnOnce(&mut dyn Painter)) {
        let saved = self.state();
        self.set_state(PainterState {
            intensity: saved.intensity * i,
            ..saved
        });
        f(self);
        self.set_state(saved);
    }

    /// Runs `f` with the drawn geometry scaled by `sx` and `sy`.
    pub fn with_stretch(&mut self, sx: f64, sy: f64, f: impl FnOnce(&mut dyn Painter)) {
        let saved = self.state();
        self.set_state(PainterState {
            stretch_x: saved.stretch_x * sx,
            stretch_y: saved.stretch_y * sy,
            ..saved
        });
        f(self);
        self.set_state(saved);
    }

    pub fn with_translation(&mut self, dx: f64, dy: f64, f: impl FnOnce(&mut dyn Painter)) {
        let saved = self.state();
        self.translate(dx, dy);
        f(self);
        self.set_state(saved);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Level {
    #[default]
    Invisible,
    Faint,
    Dim,
    Normal,
}

impl Level {
    pub fn code(self) -> char {
        match self {
            Level::Invisible => 'i',
            Level::Faint => 'f',
            Level::Dim => 'd',
            Level::Normal => 'n',
        }
    }
}

/// Terminals have no alpha; intensities collapse to four levels.
pub fn quantize(intensity: f64) -> Level {
    if intensity < 0.05 {
        Level::Invisible
    } else if intensity < 0.35 {
        Level::Faint
    } else if intensity < 0.7 {
        Level::Dim
    } else {
        Level::Normal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub glyph: char,
    pub level: Level,
}

const BLANK: Cell = Cell {
    glyph: ' ',
    level: Level::Invisible,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellGrid {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
}

impl CellGrid {
    pub fn new(width: usize, height: usize) -> Self {
        CellGrid {
            width,
            height,
            cells: vec![BLANK; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// The cell at column `x`, row `y`; blank outside the grid.
    pub fn get(&self, x: usize, y: usize) -> Cell {
        if x < self.width && y < self.height {
            self.cells[y * self.width + x]
        } else {
            BLANK
        }
    }

    /// Writes unless `level` is invisible or below what the cell already shows.
    pub fn put(&mut self, x: i64, y: i64, glyph: char, level: Level) {
        if level == Level::Invisible || x < 0 || y < 0 {
            return;
        }
        let (x, y) = (x as usize, y as usize);
        if x >= self.width || y >= self.height {
            return;
        }
        let cell = &mut self.cells[y * self.width + x];
        if level >= cell.level {
            *cell = Cell { glyph, level };
        }
    }

    fn visible_len(&self, y: usize) -> usize {
        (0..self.width)
            .rev()
            .find(|&x| self.get(x, y) != BLANK)
            .map_or(0, |x| x + 1)
    }

    /// Plain rows with trailing blanks removed.
    pub fn rows(&self) -> Vec<String> {
        (0..self.height)
            .map(|y| {
                (0..self.visible_len(y))
                    .map(|x| self.get(x, y).glyph)
                    .collect()
            })
            .collect()
    }

    /// Rows prefixed by their attribute string (`i`, `f`, `d`, `n` per cell) and a tab.
    pub fn attributed_rows(&self) -> Vec<String> {
        (0..self.height)
            .map(|y| {
                let n = self.visible_len(y);
                let attrs: String = (0..n).map(|x| self.get(x, y).level.code()).collect();
                let glyphs: String = (0..n).map(|x| self.get(x, y).glyph).collect();
                format!("{attrs}\t{glyphs}")
            })
            .collect()
    }

    pub fn dump(&self) -> String {
        self.rows().join("\n")
    }

    pub fn attributed_dump(&self) -> String {
        self.attributed_rows().join("\n")
    }

    /// Cell-for-cell equality, treating cells beyond either grid as blank.
    pub fn same_cells(&self, other: &CellGrid) -> bool {
        let w = self.width.max(other.width);
        let h = self.height.max(other.height);
        (0..h).all(|y| (0..w).all(|x| self.get(x, y) == other.get(x, y)))
    }

    /// Every non-blank cell as `(x, y, cell)`.
    pub fn visible_cells(&self) -> impl Iterator<Item = (usize, usize, Cell)> + '_ {
        (0..self.height)
            .flat_map(move |y| (0..self.width).map(move |x| (x, y, self.get(x, y))))
            .filter(|(_, _, c)| *c != BLANK)
    }
}

impl fmt::Display for CellGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoxStyle {
    #[default]
    Unicode,
    Ascii,
}

impl BoxStyle {
    /// Top-left, top-right, bottom-left, bottom-right, side.
    fn glyphs(self) -> [char; 5] {
        match self {
            BoxStyle::Unicode => ['╭', '╮', '╰', '╯', '│'],
            BoxStyle::Ascii => ['+', '+', '+', '+', '|'],
        }
    }
}

fn round_half_up(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

/// Cells covered by a scaled length: rounded, never below one.
fn scaled(length: f64, factor: f64) -> i64 {
    round_half_up(length * factor).max(1)
}

/// Paints into a [`CellGrid`].
#[derive(Debug, Clone)]
pub struct GridPainter {
    grid: CellGrid,
    state: PainterState,
    style: BoxStyle,
}

impl GridPainter {
    pub fn new(width: usize, height: usize, style: BoxStyle) -> Self {
        GridPainter {
            grid: CellGrid::new(width, height),
            state: PainterState::default(),
            style,
        }
    }

    pub fn grid(&self) -> &CellGrid {
        &self.grid
    }

    pub fn into_grid(self) -> CellGrid {
        self.grid
    }

    fn origin(&self) -> (i64, i64) {
        (
            round_half_up(self.state.left()),
            round_half_up(self.state.top()),
        )
    }
}

impl Painter for GridPainter {
    fn state(&self) -> PainterState {
        self.state
    }

    fn set_state(&mut self, state: PainterState) {
        self.state = state;
    }

    fn draw_box(&mut self, width: f64, height: f64) {
        let level = quantize(self.state.intensity);
        let (x0, y0) = self.origin();
        let w = scaled(width, self.state.stretch_x);
        let h = scaled(height, self.state.stretch_y);
        let [tl, tr, bl, br, side] = self.style.glyphs();
        let (x1, y1) = (x0 + w - 1, y0 + h - 1);
        for y in y0..=y1 {
            let (left, right) = if y == y0 {
                (tl, tr)
            } else if y == y1 {
                (bl, br)
            } else {
                (side, side)
            };
            self.grid.put(x0, y, left, level);
            if x1 > x0 {
                self.grid.put(x1, y, right, level);
            }
        }
    }

    fn draw_text(&mut self, text: &str) {
        let level = quantize(self.state.intensity);
        let (x0, y0) = self.origin();
        let len = text.chars().count();
        let shown = if self.state.stretch_x >= 1.0 {
            len
        } else {
            ((len as f64 * self.state.stretch_x) - 1e-9).ceil().max(0.0) as usize
        };
        for (k, c) in text.chars().take(shown).enumerate() {
            self.grid.put(x0 + k as i64, y0, c, level);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Call {
    Box { width: f64, height: f64 },
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordedCall {
    pub kind: Call,
    /// Painter state at the time of the call.
    pub state: PainterState,
}

/// Records draw calls instead of painting, for inspecting what a renderer asked for.
#[derive(Debug, Clone, Default)]
pub struct RecordingPainter {
    state: PainterState,
    pub calls: Vec<RecordedCall>,
}

impl Painter for RecordingPainter {
    fn state(&self) -> PainterState {
        self.state
    }

    fn set_state(&mut self, state: PainterState) {
        self.state = state;
    }

    fn draw_box(&mut self, width: f64, height: f64) {
        self.calls.push(RecordedCall {
            kind: Call::Box { width, height },
            state: self.state,
        });
    }

    fn draw_text(&mut self, text: &str) {
        self.calls.push(RecordedCall {
            kind: Call::Text(text.to_string()),
            state: self.state,
        });
    }
}

fn offset(from: Position, to: Position) -> (f64, f64) {
    (
        to.left as f64 - from.left as f64,
        to.top as f64 - from.top as f64,
    )
}

/// Draws the visible text of a gap, with the gap's start at the painter origin.
pub fn draw_space(painter: &mut dyn Painter, space: &SpaceLayout) {
    for piece in &space.pieces {
        painter.with_translation(piece.dx as f64, piece.dy as f64, |p| {
            p.draw_text(&piece.text)
        });
    }
}

/// Draws `e` (laid out in `layout`) with its top-left corner at the painter origin.
pub fn draw_expr(painter: &mut dyn Painter, layout: &Layout, e: &Expr) {
    let Some(base) = layout.position(e.id()) else {
        return;
    };
    match e {
        Expr::Atom(a) => {
            if layout.is_tick(e.id()) {
                painter.draw_text("'");
            } else {
                painter.draw_text(&display_text(a.text()));
            }
        }
        Expr::List(list) => {
            if !list.is_quote_sugar() {
                let extent = layout.extent(e.id()).unwrap_or_default();
                painter.draw_box(extent.width as f64, extent.height as f64);
            }
            for item in list.items() {
                match item {
                    Item::Space(idx, _) => {
                        if let Some(space) = layout.space(list.id(), idx) {
                            let (dx, dy) = offset(base, space.position);
                            painter.with_translation(dx, dy, |p| draw_space(p, space));
                        }
                    }
                    Item::Element(child) => {
                        if let Some(pos) = layout.position(child.id()) {
                            let (dx, dy) = offset(base, pos);
                            painter.with_translation(dx, dy, |p| draw_expr(p, layout, child));
                        }
                    }
                    Item::Dot => {
                        if let Some(pos) = layout.dot(list.id()) {
                            let (dx, dy) = offset(base, pos);
                            painter.with_translation(dx, dy, |p| p.draw_text("."));
                        }
                    }
                }
            }
        }
    }
}

/// Box-notation rendering of `e` on a grid of exactly its extent.
pub fn render_static(e: &Expr, style: BoxStyle) -> CellGrid {
    let layout = Layout::of(e);
    let extent = layout.root_extent();
    let mut painter = GridPainter::new(extent.width, extent.height, style);
    draw_expr(&mut painter, &layout, e);
    painter.into_grid()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    #[test]
    fn quantize_thresholds() {
        assert_eq!(quantize(0.0), Level::Invisible);
        assert_eq!(quantize(0.049), Level::Invisible);
        assert_eq!(quantize(0.05), Level::Faint);
        assert_eq!(quantize(0.5), Level::Dim);
        assert_eq!(quantize(0.7), Level::Normal);
        assert_eq!(quantize(1.0), Level::Normal);
    }

    #[test]
    fn atom_renders_as_text() {
        let g = render_static(&parse_expr("5").unwrap(), BoxStyle::Unicode);
        assert_eq!((g.width(), g.height()), (1, 1));
        assert_eq!(g.dump(), "5");
    }

    #[test]
    fn factorial_call_box() {
        let g = render_static(&parse_expr("(! 5)").unwrap(), BoxStyle::Unicode);
        assert_eq!((g.width(), g.height()), (7, 3));
        assert_eq!(g.rows(), vec!["╭     ╮", "│ ! 5 │", "╰     ╯"]);
        let g = render_static(&parse_expr("(! 5)").unwrap(), BoxStyle::Ascii);
        assert_eq!(g.rows(), vec!["+     +", "| ! 5 |", "+     +"]);
    }

    #[test]
    fn factorial_definition() {
        let src = "(define (! n)\n  (if (<= n 1)\n      1\n      (* n (! (- n 1)))))";
        let g = render_static(&parse_expr(src).unwrap(), BoxStyle::Unicode);
        let expected = [
            "╭                                     ╮",
            "│ define ╭     ╮                      │",
            "│        │ ! n │                      │",
            "│        ╰     ╯                      │",
            "│   ╭                               ╮ │",
            "│   │ if ╭        ╮                 │ │",
            "│   │    │ <= n 1 │                 │ │",
            "│   │    ╰        ╯                 │ │",
            "│   │       1                       │ │",
            "│   │       ╭                     ╮ │ │",
            "│   │       │ * n ╭             ╮ │ │ │",
            "│   │       │     │ ! ╭       ╮ │ │ │ │",
            "│   │       │     │   │ - n 1 │ │ │ │ │",
            "│   │       │     │   ╰       ╯ │ │ │ │",
            "│   │       │     ╰             ╯ │ │ │",
            "│   │       ╰                     ╯ │ │",
            "│   ╰                               ╯ │",
            "╰                                     ╯",
        ];
        assert_eq!(g.rows(), expected);
    }

    #[test]
    fn static_render_is_all_normal() {
        let g = render_static(&parse_expr("(a 'b #|c|# . d)").unwrap(), BoxStyle::Unicode);
        assert!(g.visible_cells().all(|(_, _, c)| c.level == Level::Normal));
        assert_eq!(g.rows()[1], "│ a 'b #|c|# . d │");
    }

    #[test]
    fn stretch_rules() {
        let mut p = GridPainter::new(10, 4, BoxStyle::Unicode);
        let painter: &mut dyn Painter = &mut p;
        painter.with_stretch(0.5, 1.0, |p| p.draw_box(6.0, 3.0));
        assert_eq!(p.grid().rows(), vec!["╭ ╮", "│ │", "╰ ╯", ""]);

        let mut p = GridPainter::new(10, 1, BoxStyle::Unicode);
        let painter: &mut dyn Painter = &mut p;
        painter.with_stretch(0.5, 1.0, |p| p.draw_text("lambda"));
        assert_eq!(p.grid().dump(), "lam");

        let mut a = GridPainter::new(10, 3, BoxStyle::Unicode);
        let mut b = a.clone();
        let painter: &mut dyn Painter = &mut a;
        painter.with_stretch(1.0, 1.0, |p| {
            p.draw_box(5.0, 3.0);
            p.draw_text("xy");
        });
        b.draw_box(5.0, 3.0);
        b.draw_text("xy");
        assert_eq!(a.grid(), b.grid());
    }

    #[test]
    fn transforms_nest_and_restore() {
        let mut p = GridPainter::new(4, 4, BoxStyle::Unicode);
        let painter: &mut dyn Painter = &mut p;
        let before = painter.state();
        painter.with_intensity(0.5, |p| {
            p.with_intensity(0.5, |p| assert_eq!(p.state().intensity, 0.25));
            p.with_stretch(2.0, 3.0, |p| {
                p.with_stretch(0.5, 0.5, |p| {
                    assert_eq!((p.state().stretch_x, p.state().stretch_y), (1.0, 1.5))
                })
            });
        });
        assert_eq!(painter.state(), before);
        painter.translate(0.1, 0.7);
        painter.translate(-0.1, -0.7);
        assert_eq!(painter.state(), before);
    }

    #[test]
    fn dim_cannot_overwrite_normal() {
        let mut g = CellGrid::new(2, 1);
        g.put(0, 0, 'a', Level::Normal);
        g.put(0, 0, 'b', Level::Dim);
        g.put(1, 0, 'c', Level::Invisible);
        assert_eq!(g.dump(), "a");
        g.put(0, 0, 'd', Level::Normal);
        assert_eq!(g.attributed_dump(), "n\td");
    }

    #[test]
    fn positions_round_half_up() {
        let mut p = GridPainter::new(4, 1, BoxStyle::Unicode);
        let painter: &mut dyn Painter = &mut p;
        painter.with_translation(1.5, 0.0, |p| p.draw_text("x"));
        painter.with_translation(0.49, 0.0, |p| p.draw_text("y"));
        assert_eq!(p.grid().dump(), "y x");
    }
}
