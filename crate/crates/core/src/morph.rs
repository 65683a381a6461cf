//! Tweened drawing between the two sides of one reduction step.
//!
//! Both expressions are drawn as layers. Each node either morphs into its
//! counterparts on the other side (moving, resizing and crossfading along
//! the way) or, having none, fades in or out where it stands. Which layer
//! is drawn last flips at the half-way point, so the side that dominates
//! is always the one on top.

use std::collections::HashMap;

use crate::eval::{erase, ProvenanceStore};
use crate::layout::{Extent, Layout, Position};
use crate::render::{draw_expr, draw_space, BoxStyle, CellGrid, GridPainter, Painter};
use crate::syntax::{Expr, Item, NodeId};

pub fn lerp(from: f64, to: f64, at: f64) -> f64 {
    from + (to - from) * at
}

/// One laid-out side of a morph.
struct Side<'a> {
    layout: &'a Layout,
    nodes: HashMap<NodeId, &'a Expr>,
}

impl<'a> Side<'a> {
    fn new(layout: &'a Layout, root: &'a Expr) -> Self {
        Side {
            layout,
            nodes: root.index(),
        }
    }

    fn position(&self, id: NodeId) -> Position {
        self.layout.position(id).unwrap_or_default()
    }

    fn extent(&self, id: NodeId) -> Extent {
        self.layout.extent(id).unwrap_or_default()
    }
}

/// One drawing pass: the layer being drawn, the side it morphs towards,
/// and the links between them.
struct Tween<'a> {
    source: &'a Side<'a>,
    target: &'a Side<'a>,
    links: &'a dyn Fn(NodeId) -> Vec<NodeId>,
}

enum Element<'a> {
    Node(&'a Expr),
    Space(NodeId, usize),
    Dot(NodeId),
}

impl Tween<'_> {
    /// Counterparts of `id` that actually exist on the target side.
    fn counterparts(&self, id: NodeId) -> Vec<&Expr> {
        (self.links)(id)
            .into_iter()
            .filter_map(|c| self.target.nodes.get(&c).copied())
            .collect()
    }

    fn draw_tween(
        &self,
        p: &mut dyn Painter,
        element: Element,
        intensity: f64,
        only_with_relatives: bool,
    ) {
        let Element::Node(e) = element else {
            // Gaps and dots carry no provenance: they only ever fade.
            self.draw_emerging(p, element, intensity);
            return;
        };
        let counterparts = self.counterparts(e.id());
        if counterparts.is_empty() {
            self.draw_emerging(p, Element::Node(e), intensity);
            if let Expr::List(_) = e {
                self.draw_items(p, e, intensity, only_with_relatives);
            }
        } else {
            for other in counterparts {
                self.draw_morph(p, e, other, intensity, only_with_relatives);
            }
        }
    }

    fn draw_items(&self, p: &mut dyn Painter, e: &Expr, intensity: f64, only_with_relatives: bool) {
        let Expr::List(list) = e else { return };
        for item in list.items() {
            let element = match item {
                Item::Space(idx, _) => Element::Space(list.id(), idx),
                Item::Element(child) => Element::Node(child),
                Item::Dot => Element::Dot(list.id()),
            };
            self.draw_tween(p, element, intensity, only_with_relatives);
        }
    }

    /// Draws `element` where it stands on the source side: lists as bare
    /// box outlines, everything else as itself.
    fn draw_emerging(&self, p: &mut dyn Painter, element: Element, intensity: f64) {
        let layout = self.source.layout;
        p.with_intensity(intensity, |p| match element {
            Element::Node(e) => {
                let at = self.source.position(e.id());
                p.with_translation(at.left as f64, at.top as f64, |p| match e {
                    Expr::List(list) if !list.is_quote_sugar() => {
                        let outer = self.source.extent(e.id());
                        p.draw_box(outer.width as f64, outer.height as f64);
                    }
                    Expr::List(_) => {}
                    Expr::Atom(_) => draw_expr(p, layout, e),
                });
            }
            Element::Space(list, idx) => {
                if let Some(space) = layout.space(list, idx) {
                    let at = space.position;
                    p.with_translation(at.left as f64, at.top as f64, |p| draw_space(p, space));
                }
            }
            Element::Dot(list) => {
                if let Some(at) = layout.dot(list) {
                    p.with_translation(at.left as f64, at.top as f64, |p| p.draw_text("."));
                }
            }
        });
    }

    fn draw_morph(
        &self,
        p: &mut dyn Painter,
        foreground: &Expr,
        background: &Expr,
        progress: f64,
        only_with_relatives: bool,
    ) {
        let at = 1.0 - progress;
        let p0 = self.source.position(foreground.id());
        let p1 = self.target.position(background.id());
        let left = lerp(p0.left as f64, p1.left as f64, at);
        let top = lerp(p0.top as f64, p1.top as f64, at);
        let e0 = self.source.extent(foreground.id());
        let e1 = self.target.extent(background.id());
        let width = lerp(e0.width as f64, e1.width as f64, at);
        let height = lerp(e0.height as f64, e1.height as f64, at);

        if same_picture(foreground, background) {
            if !(only_with_relatives && foreground.id() == background.id()) {
                p.with_translation(left, top, |p| draw_expr(p, self.source.layout, foreground));
            }
            return;
        }
        match (foreground, background) {
            (Expr::List(f), Expr::List(b)) => {
                if !only_with_relatives {
                    p.with_translation(left, top, |p| {
                        match (f.is_quote_sugar(), b.is_quote_sugar()) {
                            (false, false) => p.draw_box(width, height),
                            (false, true) => p.with_intensity(progress, |p| {
                                p.draw_box(e0.width as f64, e0.height as f64)
                            }),
                            _ => {}
                        }
                    });
                }
                self.draw_items(p, foreground, progress, only_with_relatives);
            }
            _ => {
                p.with_translation(left, top, |p| {
                    p.with_intensity(1.0 - progress, |p| {
                        p.with_stretch(width / e1.width as f64, height / e1.height as f64, |p| {
                            draw_expr(p, self.target.layout, background)
                        })
                    });
                    p.with_intensity(progress, |p| {
                        p.with_stretch(width / e0.width as f64, height / e0.height as f64, |p| {
                            draw_expr(p, self.source.layout, foreground)
                        })
                    });
                });
                if foreground.is_list() {
                    self.draw_items(p, foreground, progress, true);
                }
            }
        }
    }
}

/// Equal values that also print identically, so either one can stand in
/// for the other.
fn same_picture(a: &Expr, b: &Expr) -> bool {
    a.id() == b.id() || (erase(a) == erase(b) && a.print() == b.print())
}

/// The transition between two consecutive snapshots of a trace.
#[derive(Debug, Clone)]
pub struct Morph {
    initial: Expr,
    final_: Expr,
    provenance: ProvenanceStore,
    progress: f64,
    initial_layout: Layout,
    final_layout: Layout,
    maximum_extent: Extent,
}

impl Morph {
    /// `provenance` links nodes of `final_` (origin) to nodes of `initial` (progeny).
    pub fn new(initial: Expr, final_: Expr, provenance: ProvenanceStore) -> Self {
        let initial_layout = Layout::of(&initial);
        let final_layout = Layout::of(&final_);
        let (a, b) = (initial_layout.root_extent(), final_layout.root_extent());
        Morph {
            initial,
            final_,
            provenance,
            progress: 0.0,
            initial_layout,
            final_layout,
            maximum_extent: Extent {
                width: a.width.max(b.width),
                height: a.height.max(b.height),
            },
        }
    }

    /// The same step played backwards.
    pub fn reversed(&self) -> Morph {
        Morph {
            initial: self.final_.clone(),
            final_: self.initial.clone(),
            provenance: self.provenance.reversed(),
            progress: 1.0 - self.progress,
            initial_layout: self.final_layout.clone(),
            final_layout: self.initial_layout.clone(),
            maximum_extent: self.maximum_extent,
        }
    }

    pub fn initial(&self) -> &Expr {
        &self.initial
    }

    pub fn final_expr(&self) -> &Expr {
        &self.final_
    }

    pub fn provenance(&self) -> &ProvenanceStore {
        &self.provenance
    }

    pub fn progress(&self) -> f64 {
        self.progress
    }

    pub fn set_progress(&mut self, progress: f64) {
        self.progress = if progress.is_nan() {
            0.0
        } else {
            progress.clamp(0.0, 1.0)
        };
    }

    pub fn initial_extent(&self) -> Extent {
        self.initial_layout.root_extent()
    }

    pub fn final_extent(&self) -> Extent {
        self.final_layout.root_extent()
    }

    pub fn maximum_extent(&self) -> Extent {
        self.maximum_extent
    }

    pub fn initial_layout(&self) -> &Layout {
        &self.initial_layout
    }

    pub fn final_layout(&self) -> &Layout {
        &self.final_layout
    }

    pub fn draw(&self, painter: &mut dyn Painter) {
        let initial = Side::new(&self.initial_layout, &self.initial);
        let final_ = Side::new(&self.final_layout, &self.final_);
        let origin = |id| self.provenance.origin(id);
        let progeny = |id| self.provenance.progeny(id);
        let forward = Tween {
            source: &final_,
            target: &initial,
            links: &origin,
        };
        let backward = Tween {
            source: &initial,
            target: &final_,
            links: &progeny,
        };
        let progress = self.progress;
        let draw_final = |p: &mut dyn Painter| {
            forward.draw_tween(p, Element::Node(&self.final_), progress, false)
        };
        let draw_initial = |p: &mut dyn Painter| {
            backward.draw_tween(p, Element::Node(&self.initial), 1.0 - progress, false)
        };
        if progress <= 0.5 {
            draw_final(painter);
            draw_initial(painter);
        } else {
            draw_initial(painter);
            draw_final(painter);
        }
    }

    /// The morph at its current progress on a grid of the maximum extent.
    pub fn frame(&self, style: BoxStyle) -> CellGrid {
        let mut painter =
            GridPainter::new(self.maximum_extent.width, self.maximum_extent.height, style);
        self.draw(&mut painter);
        painter.into_grid()
    }
}
