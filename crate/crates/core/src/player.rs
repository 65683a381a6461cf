//! Stepping through a reduction trace, with a clock that drives the morphs.

use std::fmt;

use crate::eval::{ReductionTrace, TraceError};
use crate::morph::Morph;
use crate::render::{render_static, BoxStyle, CellGrid};
use crate::syntax::Expr;

pub const DEFAULT_STEP_DURATION_MS: u64 = 700;

/// The controls of the stepper's button bar.
pub trait Playable {
    fn rewind(&mut self);
    fn back(&mut self);
    fn play(&mut self);
    fn pause(&mut self);
    fn next(&mut self);
    fn fast_forward(&mut self);
    fn playing(&self) -> bool;
}

pub trait Animation {
    /// Moves the clock forward. Returns true while there is still something to animate.
    fn advance(&mut self, timestep_ms: u64) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Idle,
    AnimatingForward,
    AnimatingBackward,
    Playing,
    /// Frozen mid-morph; `play` resumes.
    Paused,
}

/// Why the player stopped short of what was asked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Notice {
    /// The trace hit its step limit before reaching a normal form.
    Truncated {
        max_steps: usize,
    },
    Error(TraceError),
}

impl fmt::Display for Notice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Notice::Truncated { max_steps } => {
                write!(
                    f,
                    "stopped after {max_steps} steps without reaching a normal form"
                )
            }
            Notice::Error(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone)]
struct ActiveMorph {
    morph: Morph,
    /// Snapshot index reached when the morph completes.
    target: usize,
}

#[derive(Debug, Clone)]
pub struct Player {
    trace: ReductionTrace,
    index: usize,
    mode: Mode,
    active: Option<ActiveMorph>,
    elapsed_ms: u64,
    step_duration_ms: u64,
    notice: Option<Notice>,
}

impl Player {
    pub fn new(trace: ReductionTrace) -> Self {
        Player {
            trace,
            index: 0,
            mode: Mode::Idle,
            active: None,
            elapsed_ms: 0,
            step_duration_ms: DEFAULT_STEP_DURATION_MS,
            notice: None,
        }
    }

    pub fn with_step_duration(mut self, ms: u64) -> Self {
        self.step_duration_ms = ms;
        self
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn trace(&self) -> &ReductionTrace {
        &self.trace
    }

    pub fn step_duration_ms(&self) -> u64 {
        self.step_duration_ms
    }

    pub fn elapsed_ms(&self) -> u64 {
        self.elapsed_ms
    }

    /// The expression at the current index.
    pub fn current(&self) -> &Expr {
        &self.trace.snapshots()[self.index].expr
    }

    pub fn morph(&self) -> Option<&Morph> {
        self.active.as_ref().map(|a| &a.morph)
    }

    pub fn notice(&self) -> Option<&Notice> {
        self.notice.as_ref()
    }

    /// What the stepper shows right now: the live morph, or the current expression.
    pub fn current_frame(&self, style: BoxStyle) -> CellGrid {
        match &self.active {
            Some(a) => a.morph.frame(style),
            None => render_static(self.current(), style),
        }
    }

    /// Jumps to the end of a morph in progress.
    fn commit(&mut self) {
        if let Some(a) = self.active.take() {
            self.index = a.target;
        }
        self.elapsed_ms = 0;
        self.mode = Mode::Idle;
    }

    /// Records why the trace ends here, if it ends for a reason worth reporting.
    fn note_end(&mut self) {
        if self.trace.is_truncated() {
            self.notice = Some(Notice::Truncated {
                max_steps: self.trace.max_steps(),
            });
        } else if let Some(e) = self.trace.error() {
            self.notice = Some(Notice::Error(e.clone()));
        }
    }

    /// Starts the morph to the next snapshot. False at the end of the trace.
    fn start_forward(&mut self, mode: Mode) -> bool {
        if !self.trace.ensure(self.index + 1) {
            self.note_end();
            return false;
        }
        let from = &self.trace.snapshots()[self.index];
        let to = &self.trace.snapshots()[self.index + 1];
        let morph = Morph::new(
            from.expr.clone(),
            to.expr.clone(),
            to.provenance.clone().unwrap_or_default(),
        );
        self.active = Some(ActiveMorph {
            morph,
            target: self.index + 1,
        });
        self.elapsed_ms = 0;
        self.mode = mode;
        true
    }

    /// Advances to the next snapshot, reporting evaluation errors met while
    /// extending the trace.
    pub fn try_next(&mut self) -> Result<(), TraceError> {
        self.commit();
        if !self.start_forward(Mode::AnimatingForward) {
            if let Some(e) = self.trace.error() {
                return Err(e.clone());
            }
        }
        Ok(())
    }
}

impl Playable for Player {
    fn rewind(&mut self) {
        self.active = None;
        self.elapsed_ms = 0;
        self.mode = Mode::Idle;
        self.index = 0;
    }

    fn back(&mut self) {
        self.commit();
        if self.index == 0 {
            return;
        }
        let from = &self.trace.snapshots()[self.index - 1];
        let to = &self.trace.snapshots()[self.index];
        let mut morph = Morph::new(
            from.expr.clone(),
            to.expr.clone(),
            to.provenance.clone().unwrap_or_default(),
        )
        .reversed();
        morph.set_progress(0.0);
        self.active = Some(ActiveMorph {
            morph,
            target: self.index - 1,
        });
        self.mode = Mode::AnimatingBackward;
    }

    fn play(&mut self) {
        match self.mode {
            Mode::Paused => self.mode = Mode::Playing,
            Mode::Playing => {}
            Mode::AnimatingForward | Mode::AnimatingBackward => self.mode = Mode::Playing,
            Mode::Idle => {
                self.start_forward(Mode::Playing);
            }
        }
    }

    fn pause(&mut self) {
        if self.active.is_some() {
            self.mode = Mode::Paused;
        }
    }

    fn next(&mut self) {
        let _ = self.try_next();
    }

    fn fast_forward(&mut self) {
        self.commit();
        self.trace.run_to_end();
        self.index = self.trace.len() - 1;
        self.note_end();
    }

    fn playing(&self) -> bool {
        matches!(self.mode, Mode::Playing | Mode::AnimatingForward)
    }
}

impl Animation for Player {
    fn advance(&mut self, timestep_ms: u64) -> bool {
        if matches!(self.mode, Mode::Idle | Mode::Paused) {
            return false;
        }
        let Some(active) = self.active.as_mut() else {
            self.mode = Mode::Idle;
            return false;
        };
        self.elapsed_ms = self.elapsed_ms.saturating_add(timestep_ms);
        let progress = if self.step_duration_ms == 0 {
            1.0
        } else {
            self.elapsed_ms as f64 / self.step_duration_ms as f64
        };
        active.morph.set_progress(progress);
        if self.elapsed_ms < self.step_duration_ms {
            return true;
        }
        let keep_playing = self.mode == Mode::Playing;
        self.commit();
        keep_playing && self.start_forward(Mode::Playing)
    }
}
