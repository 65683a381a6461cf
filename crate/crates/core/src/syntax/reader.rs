use std::fmt;

use thiserror::Error;

use super::{Atom, Expr, ListNode, Segment, Space};

/// A reader failure with its location in the (newline-normalized) source.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at line {line}, column {column}")]
pub struct ParseError {
    pub message: String,
    /// Byte offset into the normalized source.
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

/// A single top-level expression together with the material around it.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub leading: Space,
    pub expr: Expr,
    pub trailing: Space,
}

impl Document {
    pub fn into_expr(self) -> Expr {
        self.expr
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}",
            self.leading.text(),
            self.expr,
            self.trailing.text()
        )
    }
}

/// Reads exactly one expression, keeping the surrounding whitespace and
/// comments so that `parse(s)?.to_string() == s` for `\n`-terminated input.
pub fn parse(source: &str) -> Result<Document, ParseError> {
    let source = normalize_newlines(source);
    let mut reader = Reader::new(&source);
    let leading = reader.space()?;
    if reader.at_end() {
        return Err(reader.error("expected an expression, found end of input"));
    }
    let expr = reader.expr()?;
    let trailing = reader.space()?;
    if !reader.at_end() {
        return Err(reader.error("unexpected second expression"));
    }
    Ok(Document {
        leading,
        expr,
        trailing,
    })
}

/// Reads one expression, discarding surrounding whitespace and comments.
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    parse(source).map(Document::into_expr)
}

/// Reads a sequence of top-level expressions (a prelude file).
pub fn parse_all(source: &str) -> Result<Vec<Expr>, ParseError> {
    let source = normalize_newlines(source);
    let mut reader = Reader::new(&source);
    let mut out = Vec::new();
    loop {
        reader.space()?;
        if reader.at_end() {
            return Ok(out);
        }
        out.push(reader.expr()?);
    }
}

fn normalize_newlines(source: &str) -> String {
    source.replace("\r\n", "\n").replace('\r', "\n")
}

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';' | '\'')
}

struct Reader<'s> {
    src: &'s str,
    pos: usize,
}

impl<'s> Reader<'s> {
    fn new(src: &'s str) -> Self {
        Reader { src, pos: 0 }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn error(&self, message: &str) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, offset: usize, message: &str) -> ParseError {
        let before = &self.src[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before
            .rfind('\n')
            .map_or(before, |i| &before[i + 1..])
            .chars()
            .count()
            + 1;
        ParseError {
            message: message.to_string(),
            offset,
            line,
            column,
        }
    }

    fn space(&mut self) -> Result<Space, ParseError> {
        let mut segments = Vec::new();
        while let Some(c) = self.peek() {
            if c == '\n' {
                self.pos += 1;
                let indent = self.rest().bytes().take_while(|&b| b == b' ').count();
                self.pos += indent;
                segments.push(Segment::LineBreak(indent));
            } else if c.is_whitespace() {
                let len: usize = self
                    .rest()
                    .chars()
                    .take_while(|&c| c.is_whitespace() && c != '\n')
                    .map(char::len_utf8)
                    .sum();
                segments.push(Segment::Whitespace(self.rest()[..len].to_string()));
                self.pos += len;
            } else if c == ';' {
                let len = self.rest().find('\n').unwrap_or(self.rest().len());
                segments.push(Segment::LineComment(self.rest()[..len].to_string()));
                self.pos += len;
            } else if self.rest().starts_with("#|") {
                let len = self.block_comment_len()?;
                segments.push(Segment::BlockComment(self.rest()[..len].to_string()));
                self.pos += len;
            } else {
                break;
            }
        }
        Ok(Space { segments })
    }

    fn block_comment_len(&self) -> Result<usize, ParseError> {
        let rest = self.rest();
        let mut depth = 0usize;
        let mut i = 0;
        while i < rest.len() {
            if rest[i..].starts_with("#|") {
                depth += 1;
                i += 2;
            } else if rest[i..].starts_with("|#") {
                depth -= 1;
                i += 2;
                if depth == 0 {
                    return Ok(i);
                }
            } else {
                i += rest[i..].chars().next().map_or(1, char::len_utf8);
            }
        }
        Err(self.error("unterminated block comment"))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.error("expected an expression, found end of input")),
            Some('(') => self.list(),
            Some(')') => Err(self.error("unexpected ')'")),
            Some('\'') => {
                let start = self.pos;
                self.pos += 1;
                let space = self.space()?;
                if self.at_end() || self.peek() == Some(')') {
                    return Err(self.error_at(start, "quote without a datum"));
                }
                let datum = self.expr()?;
                Ok(ListNode::quote_sugar(Atom::symbol("quote"), space, datum).into())
            }
            Some(_) => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let rest = self.rest();
        let len = if rest.starts_with('"') {
            let mut escaped = false;
            let mut end = None;
            for (i, c) in rest.char_indices().skip(1) {
                match c {
                    _ if escaped => escaped = false,
                    '\\' => escaped = true,
                    '"' => {
                        end = Some(i + 1);
                        break;
                    }
                    _ => {}
                }
            }
            end.ok_or_else(|| self.error("unterminated string"))?
        } else {
            rest.find(is_delimiter).unwrap_or(rest.len())
        };
        let text = &rest[..len];
        self.pos += len;
        Atom::new(text)
            .map(Expr::Atom)
            .ok_or_else(|| self.error_at(start, &format!("malformed atom {text}")))
    }

    fn is_dot(&self) -> bool {
        let rest = self.rest();
        rest.starts_with('.') && rest[1..].chars().next().is_none_or(is_delimiter)
    }

    fn list(&mut self) -> Result<Expr, ParseError> {
        let open = self.pos;
        self.pos += 1;
        let mut children = Vec::new();
        let mut gaps = vec![self.space()?];
        loop {
            match self.peek() {
                None => return Err(self.error_at(open, "unclosed '('")),
                Some(')') => {
                    self.pos += 1;
                    return Ok(ListNode::with_gaps(children, None, gaps).into());
                }
                _ if self.is_dot() => {
                    if children.is_empty() {
                        return Err(self.error("dot before the first list element"));
                    }
                    self.pos += 1;
                    gaps.push(self.space()?);
                    if self.at_end() || self.peek() == Some(')') || self.is_dot() {
                        return Err(self.error("expected an expression after '.'"));
                    }
                    let tail = self.expr()?;
                    gaps.push(self.space()?);
                    match self.peek() {
                        Some(')') => {
                            self.pos += 1;
                            return Ok(ListNode::with_gaps(children, Some(tail), gaps).into());
                        }
                        None => return Err(self.error_at(open, "unclosed '('")),
                        Some(_) => return Err(self.error("expected ')' after dotted tail")),
                    }
                }
                Some(_) => {
                    children.push(self.expr()?);
                    gaps.push(self.space()?);
                }
            }
        }
    }
}
