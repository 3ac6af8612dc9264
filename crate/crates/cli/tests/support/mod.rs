//! Seeded generator of small C-like functions.
//!
//! A function is first built as a token template whose identifiers are
//! numbered slots; rendering picks concrete names and random layout
//! (spaces, newlines, comments). Rendering one template twice therefore
//! gives two functions that differ only in names, whitespace and comments.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub enum Piece {
    Lit(&'static str),
    Owned(String),
    /// Slot 0 is the function name; the rest are parameters and locals.
    Name(usize),
}

#[derive(Clone, Debug)]
pub struct Template {
    pub pieces: Vec<Piece>,
    pub slots: usize,
}

const TYPES: &[&[&str]] = &[
    &["int"],
    &["long"],
    &["unsigned", "int"],
    &["size_t"],
    &["char", "*"],
    &["const", "char", "*"],
    &["int", "*"],
    &["double"],
    &["struct", "item", "*"],
    &["uint8_t", "*"],
];
const EXTERNAL_FNS: &[&str] = &["memcpy", "printf", "free", "log_msg", "check_bounds", "strlen", "abort_if"];
const FIELDS: &[&str] = &["data", "size", "next", "flags"];
const STRINGS: &[&str] = &["\"%d\\n\"", "\"error\"", "\"ok: %s\"", "\"\"", "\"a \\\"quoted\\\" word\""];
const BINOPS: &[&str] = &["+", "-", "*", "/", "%", "&", "|", "^", "<<", ">>"];
const CMPOPS: &[&str] = &["<", ">", "<=", ">=", "==", "!=", "&&", "||"];
const WORDS: &[&str] = &[
    "buf", "len", "idx", "count", "ptr", "node", "tmp", "res", "off", "src", "dst", "val", "key", "ctx",
    "state", "total", "limit", "cursor", "entry", "head",
];

struct Builder<'r> {
    rng: &'r mut ChaCha8Rng,
    out: Vec<Piece>,
    vars: Vec<usize>,
    slots: usize,
    depth: usize,
}

impl Builder<'_> {
    fn lit(&mut self, s: &'static str) {
        self.out.push(Piece::Lit(s));
    }

    fn pick(&mut self, options: &[&'static str]) {
        let s = *options.choose(self.rng).unwrap();
        self.lit(s);
    }

    fn fresh(&mut self) -> usize {
        self.slots += 1;
        self.slots - 1
    }

    fn ty(&mut self) {
        let t = *TYPES.choose(self.rng).unwrap();
        for &w in t {
            self.lit(w);
        }
    }

    fn var(&mut self) {
        let v = *self.vars.choose(self.rng).unwrap();
        self.out.push(Piece::Name(v));
    }

    fn number(&mut self) {
        let n = match self.rng.gen_range(0..4) {
            0 => format!("{}", self.rng.gen_range(0..100)),
            1 => format!("0x{:x}", self.rng.gen_range(0..4096)),
            2 => format!("{}u", self.rng.gen_range(0..64)),
            _ => format!("{}.{}", self.rng.gen_range(0..10), self.rng.gen_range(0..100)),
        };
        self.out.push(Piece::Owned(n));
    }

    fn expr(&mut self, depth: usize) {
        let choice = if depth >= 2 { self.rng.gen_range(0..3) } else { self.rng.gen_range(0..9) };
        match choice {
            0 | 1 => self.var(),
            2 => self.number(),
            3 => {
                self.expr(depth + 1);
                self.pick(BINOPS);
                self.expr(depth + 1);
            }
            4 => {
                self.var();
                self.lit("[");
                self.expr(depth + 1);
                self.lit("]");
            }
            5 => {
                self.pick(EXTERNAL_FNS);
                self.lit("(");
                self.var();
                self.lit(")");
            }
            6 => {
                self.lit("(");
                self.expr(depth + 1);
                self.lit(")");
            }
            7 => {
                self.var();
                self.lit("->");
                self.pick(FIELDS);
            }
            _ => {
                self.pick(&["-", "!", "~", "*"]);
                self.var();
            }
        }
    }

    fn cond(&mut self) {
        self.expr(1);
        self.pick(CMPOPS);
        self.expr(1);
    }

    fn block(&mut self, max: usize) {
        self.lit("{");
        self.depth += 1;
        let n = self.rng.gen_range(1..=max);
        for _ in 0..n {
            self.stmt();
        }
        self.depth -= 1;
        self.lit("}");
    }

    fn stmt(&mut self) {
        let nested = self.depth < 3;
        match self.rng.gen_range(0..10) {
            0 | 1 => {
                self.ty();
                let v = self.fresh();
                self.out.push(Piece::Name(v));
                if self.rng.gen_bool(0.7) {
                    self.lit("=");
                    self.expr(0);
                }
                self.lit(";");
                self.vars.push(v);
            }
            2 | 3 => {
                self.var();
                self.pick(&["=", "+=", "-=", "|=", "<<="]);
                self.expr(0);
                self.lit(";");
            }
            4 if nested => {
                self.lit("if");
                self.lit("(");
                self.cond();
                self.lit(")");
                self.block(3);
                if self.rng.gen_bool(0.4) {
                    self.lit("else");
                    self.block(2);
                }
            }
            5 if nested => {
                let i = self.fresh();
                self.lit("for");
                self.lit("(");
                self.lit("int");
                self.out.push(Piece::Name(i));
                self.lit("=");
                self.lit("0");
                self.lit(";");
                self.out.push(Piece::Name(i));
                self.lit("<");
                self.var();
                self.lit(";");
                self.out.push(Piece::Name(i));
                self.lit("++");
                self.lit(")");
                self.vars.push(i);
                self.block(3);
            }
            6 if nested => {
                self.lit("while");
                self.lit("(");
                self.cond();
                self.lit(")");
                self.lit("{");
                self.var();
                self.lit("--");
                self.lit(";");
                self.lit("break");
                self.lit(";");
                self.lit("}");
            }
            7 => {
                self.pick(EXTERNAL_FNS);
                self.lit("(");
                if self.rng.gen_bool(0.6) {
                    self.pick(STRINGS);
                    self.lit(",");
                }
                self.expr(1);
                self.lit(")");
                self.lit(";");
            }
            8 => {
                self.lit("return");
                self.expr(0);
                self.lit(";");
            }
            _ => {
                self.var();
                self.pick(&["++", "--"]);
                self.lit(";");
            }
        }
    }
}

pub fn template(rng: &mut ChaCha8Rng) -> Template {
    let mut b = Builder {
        rng,
        out: Vec::new(),
        vars: Vec::new(),
        slots: 1,
        depth: 0,
    };
    if b.rng.gen_bool(0.3) {
        b.lit("static");
    }
    b.ty();
    b.out.push(Piece::Name(0));
    b.lit("(");
    let params = b.rng.gen_range(1..=4);
    for p in 0..params {
        if p > 0 {
            b.lit(",");
        }
        b.ty();
        let v = b.fresh();
        b.out.push(Piece::Name(v));
        b.vars.push(v);
    }
    b.lit(")");
    b.block(8);
    Template {
        slots: b.slots,
        pieces: b.out,
    }
}

pub fn fresh_names(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    let mut used = HashSet::new();
    let mut names = Vec::with_capacity(n);
    while names.len() < n {
        let word = WORDS.choose(rng).unwrap();
        let name = match rng.gen_range(0..3) {
            0 => format!("{word}{}", rng.gen_range(0..100)),
            1 => format!("{word}_{}", WORDS.choose(rng).unwrap()),
            _ => format!("my_{word}{}", rng.gen_range(0..10)),
        };
        if used.insert(name.clone()) {
            names.push(name);
        }
    }
    names
}

/// Layout between two tokens. Tokens touch only beside punctuators that
/// never combine with a neighbour.
fn gap(rng: &mut ChaCha8Rng, prev: &str, next: &str, out: &mut String) {
    let inert = |s: &str| matches!(s, "(" | ")" | "[" | "]" | "{" | "}" | ";" | ",");
    match rng.gen_range(0..20) {
        0 => out.push_str(" /* note */ "),
        1 => out.push_str(" // trailing remark\n"),
        2 | 3 => out.push_str("\n    "),
        4..=11 if inert(prev) || inert(next) => {}
        _ => out.push(' '),
    }
}

pub fn render(t: &Template, names: &[String], rng: &mut ChaCha8Rng) -> String {
    let mut out = String::new();
    if rng.gen_bool(0.2) {
        out.push_str("/* generated function */\n");
    }
    let mut prev = String::new();
    for (i, piece) in t.pieces.iter().enumerate() {
        let text = match piece {
            Piece::Lit(s) => (*s).to_owned(),
            Piece::Owned(s) => s.clone(),
            Piece::Name(slot) => names[*slot].clone(),
        };
        if i > 0 {
            gap(rng, &prev, &text, &mut out);
        }
        out.push_str(&text);
        prev = text;
    }
    out.push('\n');
    out
}

/// A random function in one of several shapes: mostly well-formed, with a
/// small share of macro-bearing, unterminated and comment-only inputs.
pub fn function(rng: &mut ChaCha8Rng) -> String {
    let t = template(rng);
    let names = fresh_names(rng, t.slots);
    let body = render(&t, &names, rng);
    match rng.gen_range(0..100) {
        0..=3 => format!("#define LIMIT 64\n{body}"),
        4..=5 => format!("{body}char *tail = \"unterminated;\n"),
        6..=7 => "/* removed in refactor */\n// nothing left\n".to_owned(),
        _ => body,
    }
}
