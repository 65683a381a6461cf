pub mod cli;
pub mod eval;
pub mod layout;
pub mod morph;
pub mod player;
pub mod render;
pub mod syntax;
