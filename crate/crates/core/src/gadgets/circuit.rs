//! Monotone Boolean circuits over constant inputs.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}: malformed line `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: gate type `{name}` is not CONST0, CONST1, AND or OR")]
    NonMonotoneGate { line: usize, name: String },
    #[error("line {line}: gate id {id} does not exceed the previous id")]
    IdNotIncreasing { line: usize, id: u64 },
    #[error("line {line}: gate ids must be positive")]
    ZeroId { line: usize },
    #[error("line {line}: gate {id} refers forward to gate {target}")]
    ForwardReference { line: usize, id: u64, target: u64 },
    #[error("line {line}: reference to unknown gate {target}")]
    UnknownReference { line: usize, target: u64 },
    #[error("missing `output` line")]
    MissingOutput,
    #[error("line {line}: second `output` line")]
    DuplicateOutput { line: usize },
}

/// A gate; inputs are indices into [`Circuit::gates`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Const0,
    Const1,
    And(usize, usize),
    Or(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    ids: Vec<u64>,
    gates: Vec<Gate>,
    output: usize,
}

impl Circuit {
    /// Builds a circuit with ids `1..=gates.len()`. Inputs must point backward.
    pub fn new(gates: Vec<Gate>, output: usize) -> Self {
        for (i, g) in gates.iter().enumerate() {
            if let Gate::And(x, y) | Gate::Or(x, y) = *g {
                assert!(x < i && y < i, "gate inputs must point backward");
            }
        }
        assert!(output < gates.len(), "output out of range");
        Circuit {
            ids: (1..=gates.len() as u64).collect(),
            gates,
            output,
        }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// Value of every gate, in gate order.
    pub fn values(&self) -> Vec<bool> {
        let mut values: Vec<bool> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match *g {
                Gate::Const0 => false,
                Gate::Const1 => true,
                Gate::And(x, y) => values[x] && values[y],
                Gate::Or(x, y) => values[x] || values[y],
            };
            values.push(v);
        }
        values
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, &id) in self.gates.iter().zip(&self.ids) {
            match *g {
                Gate::Const0 => writeln!(f, "gate {id} CONST0")?,
                Gate::Const1 => writeln!(f, "gate {id} CONST1")?,
                Gate::And(x, y) => writeln!(f, "gate {id} AND {} {}", self.ids[x], self.ids[y])?,
                Gate::Or(x, y) => writeln!(f, "gate {id} OR {} {}", self.ids[x], self.ids[y])?,
            }
        }
        writeln!(f, "output {}", self.ids[self.output])
    }
}

/// Parses `gate <id> CONST0|CONST1`, `gate <id> AND|OR <id> <id>` and
/// `output <id>` lines; `#` starts a comment line.
pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split_whitespace().collect()))
        .collect();
    let malformed = |line: usize, fields: &[&str]| CircuitError::Malformed {
        line,
        text: fields.join(" "),
    };

    let mut declared: HashMap<u64, usize> = HashMap::new();
    for (line, fields) in &lines {
        if fields[0] == "gate" {
            let id = fields
                .get(1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| malformed(*line, fields))?;
            declared.entry(id).or_insert(*line);
        }
    }

    let mut ids: Vec<u64> = Vec::new();
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut gates = Vec::new();
    let mut output = None;
    for (line, fields) in &lines {
        let line = *line;
        let resolve = |id: u64, target: &str| -> Result<usize, CircuitError> {
            let target: u64 = target.parse().map_err(|_| malformed(line, fields))?;
            match index.get(&target) {
                Some(&i) => Ok(i),
                None if declared.contains_key(&target) => Err(CircuitError::ForwardReference { line, id, target }),
                None => Err(CircuitError::UnknownReference { line, target }),
            }
        };
        match fields.as_slice() {
            ["gate", id, kind, rest @ ..] => {
                let id: u64 = id.parse().map_err(|_| malformed(line, fields))?;
                if id == 0 {
                    return Err(CircuitError::ZeroId { line });
                }
                if ids.last().is_some_and(|&last| id <= last) {
                    return Err(CircuitError::IdNotIncreasing { line, id });
                }
                let gate = match (*kind, rest) {
                    ("CONST0", []) => Gate::Const0,
                    ("CONST1", []) => Gate::Const1,
                    ("AND", [x, y]) => Gate::And(resolve(id, x)?, resolve(id, y)?),
                    ("OR", [x, y]) => Gate::Or(resolve(id, x)?, resolve(id, y)?),
                    ("CONST0" | "CONST1" | "AND" | "OR", _) => return Err(malformed(line, fields)),
                    (name, _) => {
                        return Err(CircuitError::NonMonotoneGate {
                            line,
                            name: name.to_string(),
                        })
                    }
                };
                index.insert(id, gates.len());
                ids.push(id);
                gates.push(gate);
            }
            ["output", target] => {
                if output.is_some() {
                    return Err(CircuitError::DuplicateOutput { line });
                }
                let target: u64 = target.parse().map_err(|_| malformed(line, fields))?;
                if !declared.contains_key(&target) {
                    return Err(CircuitError::UnknownReference { line, target });
                }
                output = Some(target);
            }
            _ => return Err(malformed(line, fields)),
        }
    }
    let output = output.ok_or(CircuitError::MissingOutput)?;
    Ok(Circuit {
        ids,
        gates,
        output: index[&output],
    })
}

/// Value of the output gate.
pub fn eval_circuit(c: &Circuit) -> bool {
    c.values()[c.output]
}
