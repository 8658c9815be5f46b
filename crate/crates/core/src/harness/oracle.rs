use std::io::{BufRead, Write};

use crate::active::LabelOracle;
use crate::error::OracleError;
use crate::example::Label;

/// Asks a person for labels: prints the point, reads `+1` or `-1`.
/// Unrecognized answers are re-prompted; end of input is an error.
pub struct PromptOracle<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> PromptOracle<R, W> {
    pub fn new(input: R, output: W) -> Self {
        PromptOracle { input, output }
    }
}

fn parse_answer(s: &str) -> Option<Label> {
    match s.trim() {
        "+1" | "1" | "+" => Some(Label::Positive),
        "-1" | "-" => Some(Label::Negative),
        _ => None,
    }
}

impl<R: BufRead, W: Write> LabelOracle for PromptOracle<R, W> {
    fn label(&mut self, index: usize, x: &[f64]) -> Result<Label, OracleError> {
        writeln!(self.output, "point #{index}: {x:?}")?;
        loop {
            write!(self.output, "label (+1/-1)> ")?;
            self.output.flush()?;
            let mut line = String::new();
            if self.input.read_line(&mut line)? == 0 {
                return Err(OracleError::Closed);
            }
            match parse_answer(&line) {
                Some(y) => return Ok(y),
                None => writeln!(self.output, "please answer +1 or -1")?,
            }
        }
    }
}
