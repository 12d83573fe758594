//! Interference-network scenarios: parsing, validation and derived
//! dimensions.
//!
//! A scenario is written as a product of factors `(MxN,d)`, one per user,
//! where `M` is the transmit antenna count, `N` the receive antenna count
//! and `d` the number of streams the user wants. A factor may carry a
//! repetition suffix `^K`, so `(2x2,1)^3` is the three-user network in
//! which every user has two antennas per side and sends one stream.
//! Whitespace is ignored and the `x` is case-insensitive.
//!
//! Parsing validates the per-user antenna bounds (`1 <= d_k <= min(M_k,
//! N_k)`) and the pairwise bound `d_k + d_l < N_k + M_l`; every downstream
//! formula assumes both.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Upper bound accepted for any integer in the grammar. Networks beyond
/// this are far outside anything the counters can process.
const MAX_LITERAL: usize = 10_000;

/// One user of the network: antennas on each side and requested streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct User {
    /// Transmit antennas (`M_k`).
    pub tx: usize,
    /// Receive antennas (`N_k`).
    pub rx: usize,
    /// Streams the user wants to send (`d_k`).
    pub streams: usize,
}

/// A validated interference network: the ordered user list plus the set of
/// interfering links.
///
/// The link set is kept explicit even though v1 only builds fully
/// connected networks, so that partial connectivity stays a data-model
/// extension rather than a rewrite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    users: Vec<User>,
    links: Vec<(usize, usize)>,
}

/// Derived dimension data for a scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScenarioDims {
    /// Variables minus equations of the alignment polynomial system:
    /// `sum_k d_k (M_k + N_k - 2 d_k) - sum_{(k,l)} d_k d_l`.
    pub s: i64,
    /// Equation count: rows of the alignment Jacobian.
    pub psi_rows: usize,
    /// Variable count: columns of the alignment Jacobian.
    pub psi_cols: usize,
    /// All users share one antenna count on both sides and one stream
    /// count.
    pub is_square_symmetric: bool,
}

/// Sign classification of the surplus `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Properness {
    /// `s < 0`: more equations than variables; always infeasible.
    Improper,
    /// `s = 0`: variables match equations; finitely many solutions when
    /// feasible.
    Tight,
    /// `s > 0`: more variables than equations; a feasible system has a
    /// continuum of solutions.
    Slack,
}

impl ScenarioDims {
    pub fn properness(&self) -> Properness {
        match self.s {
            s if s < 0 => Properness::Improper,
            0 => Properness::Tight,
            _ => Properness::Slack,
        }
    }
}

impl fmt::Display for Properness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Properness::Improper => write!(f, "improper"),
            Properness::Tight => write!(f, "tight"),
            Properness::Slack => write!(f, "slack"),
        }
    }
}

/// Scenario construction or parse failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScenarioError {
    /// The text does not match the grammar; `offset` is the byte position
    /// of the problem.
    Syntax { offset: usize, message: &'static str },
    /// Fewer than two users after expansion.
    TooFewUsers { count: usize },
    /// A user violates the per-user bounds `1 <= d <= min(M, N)`.
    UserBounds { user: usize, message: &'static str },
    /// A link violates `d_k + d_l < N_k + M_l`.
    PairBounds { rx_user: usize, tx_user: usize },
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Syntax { offset, message } => {
                write!(f, "syntax error at byte {offset}: {message}")
            }
            ScenarioError::TooFewUsers { count } => {
                write!(f, "a network needs at least 2 users, got {count}")
            }
            ScenarioError::UserBounds { user, message } => {
                write!(f, "user {} invalid: {message}", user + 1)
            }
            ScenarioError::PairBounds { rx_user, tx_user } => {
                write!(
                    f,
                    "link ({},{}) invalid: d_k + d_l must be < N_k + M_l",
                    rx_user + 1,
                    tx_user + 1
                )
            }
        }
    }
}

impl Scenario {
    /// Validates the user list and builds the fully connected link set.
    pub fn new(users: Vec<User>) -> Result<Self, ScenarioError> {
        for (i, u) in users.iter().enumerate() {
            let msg = if u.tx == 0 {
                Some("transmit antenna count must be >= 1")
            } else if u.rx == 0 {
                Some("receive antenna count must be >= 1")
            } else if u.streams == 0 {
                Some("stream count must be >= 1")
            } else if u.streams > u.rx {
                Some("stream count exceeds receive antennas")
            } else if u.streams > u.tx {
                Some("stream count exceeds transmit antennas")
            } else {
                None
            };
            if let Some(message) = msg {
                return Err(ScenarioError::UserBounds { user: i, message });
            }
        }
        if users.len() < 2 {
            return Err(ScenarioError::TooFewUsers { count: users.len() });
        }
        let k = users.len();
        let mut links = Vec::with_capacity(k * (k - 1));
        for rx in 0..k {
            for tx in 0..k {
                if rx != tx {
                    if users[rx].streams + users[tx].streams >= users[rx].rx + users[tx].tx {
                        return Err(ScenarioError::PairBounds {
                            rx_user: rx,
                            tx_user: tx,
                        });
                    }
                    links.push((rx, tx));
                }
            }
        }
        Ok(Scenario { users, links })
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn users(&self) -> &[User] {
        &self.users
    }

    pub fn user(&self, k: usize) -> User {
        self.users[k]
    }

    /// Interfering links as ordered `(receiver, transmitter)` pairs, in a
    /// fixed row-major order.
    pub fn links(&self) -> &[(usize, usize)] {
        &self.links
    }

    pub fn is_single_beam(&self) -> bool {
        self.users.iter().all(|u| u.streams == 1)
    }

    /// Surplus and Jacobian dimensions.
    pub fn dims(&self) -> ScenarioDims {
        let mut psi_rows = 0usize;
        for &(k, l) in &self.links {
            psi_rows += self.users[k].streams * self.users[l].streams;
        }
        let mut psi_cols = 0usize;
        for u in &self.users {
            psi_cols += (u.tx + u.rx - 2 * u.streams) * u.streams;
        }
        let first = self.users[0];
        let is_square_symmetric = self
            .users
            .iter()
            .all(|u| u.tx == first.tx && u.rx == first.rx && u.streams == first.streams)
            && first.tx == first.rx;
        ScenarioDims {
            s: psi_cols as i64 - psi_rows as i64,
            psi_rows,
            psi_cols,
            is_square_symmetric,
        }
    }

    /// Canonical text form: the power form when all users are identical,
    /// otherwise one factor per user.
    pub fn render(&self) -> String {
        use core::fmt::Write;
        let mut out = String::new();
        let first = self.users[0];
        if self.users.iter().all(|u| *u == first) {
            let _ = write!(
                out,
                "({}x{},{})^{}",
                first.tx,
                first.rx,
                first.streams,
                self.users.len()
            );
        } else {
            for u in &self.users {
                let _ = write!(out, "({}x{},{})", u.tx, u.rx, u.streams);
            }
        }
        out
    }
}

/// Parses a scenario string such as `(2x3,1)(3x2,1)^2` into a validated
/// [`Scenario`].
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    Parser::new(text).run()
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, wanted: u8, message: &'static str) -> Result<(), ScenarioError> {
        if self.peek() == Some(wanted) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.fail(message))
        }
    }

    fn fail(&self, message: &'static str) -> ScenarioError {
        ScenarioError::Syntax {
            offset: self.pos,
            message,
        }
    }

    fn number(&mut self, what: &'static str) -> Result<usize, ScenarioError> {
        self.skip_ws();
        let start = self.pos;
        let mut value = 0usize;
        while let Some(b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value * 10 + usize::from(b - b'0');
            if value > MAX_LITERAL {
                return Err(ScenarioError::Syntax {
                    offset: start,
                    message: "number too large",
                });
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.fail(what));
        }
        Ok(value)
    }

    fn run(&mut self) -> Result<Scenario, ScenarioError> {
        let mut users = Vec::new();
        loop {
            match self.peek() {
                Some(b'(') => self.factor(&mut users)?,
                Some(_) => return Err(self.fail("expected '('")),
                None => break,
            }
        }
        if users.is_empty() {
            return Err(ScenarioError::Syntax {
                offset: self.pos,
                message: "empty scenario",
            });
        }
        Scenario::new(users)
    }

    fn factor(&mut self, users: &mut Vec<User>) -> Result<(), ScenarioError> {
        self.expect(b'(', "expected '('")?;
        let tx = self.number("expected transmit antenna count")?;
        match self.peek() {
            Some(b'x') | Some(b'X') => self.pos += 1,
            _ => return Err(self.fail("expected 'x'")),
        }
        let rx = self.number("expected receive antenna count")?;
        self.expect(b',', "expected ','")?;
        let streams = self.number("expected stream count")?;
        self.expect(b')', "expected ')'")?;
        let repeat = if self.peek() == Some(b'^') {
            self.pos += 1;
            let start = self.pos;
            let r = self.number("expected repeat count after '^'")?;
            if r == 0 {
                return Err(ScenarioError::Syntax {
                    offset: start,
                    message: "repeat count must be >= 1",
                });
            }
            r
        } else {
            1
        };
        if users.len() + repeat > MAX_LITERAL {
            return Err(self.fail("too many users"));
        }
        for _ in 0..repeat {
            users.push(User { tx, rx, streams });
        }
        Ok(())
    }
}
