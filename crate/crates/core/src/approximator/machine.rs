//! The pluggable time-bounded machine and its built-in default.
//!
//! A machine maps (program, condition, step budget) to an output or
//! divergence. Implementations must be deterministic and budget-monotone:
//! once a program halts at some budget it halts with the same output at
//! every larger budget.

use crate::bits::BitString;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalResult {
    Halted(BitString),
    Diverged,
}

impl EvalResult {
    pub fn halted(&self) -> Option<&BitString> {
        match self {
            EvalResult::Halted(x) => Some(x),
            EvalResult::Diverged => None,
        }
    }
}

pub trait ToyMachine {
    fn name(&self) -> &str;
    fn default_budget(&self) -> u64;
    fn eval(&self, program: &BitString, condition: &BitString, budget: u64) -> EvalResult;
}

/// The built-in machine. Programs are tag-plus-payload, bit-exact:
///
/// * tag `0`: output = payload (literal);
/// * tag `10`: payload is an 8-bit big-endian count L then one bit b;
///   output = b repeated L times (run length);
/// * tag `110`: payload is an 8-bit count L; output = the condition
///   truncated or cycled to length L (condition copy; diverges when the
///   condition is empty and L > 0);
/// * everything else diverges.
///
/// Step cost is 1 + output length; a program halts iff its cost fits the
/// budget.
pub struct DefaultMachine;

pub const DEFAULT_MACHINE_BUDGET: u64 = 10_000;

impl ToyMachine for DefaultMachine {
    fn name(&self) -> &str {
        "default"
    }

    fn default_budget(&self) -> u64 {
        DEFAULT_MACHINE_BUDGET
    }

    fn eval(&self, program: &BitString, condition: &BitString, budget: u64) -> EvalResult {
        let bits = program.bits();
        let output = if bits.is_empty() {
            None
        } else if bits[0] == 0 {
            Some(program.suffix_from(1))
        } else if bits.len() >= 2 && bits[1] == 0 {
            // tag 10
            let payload = &bits[2..];
            if payload.len() != 9 {
                None
            } else {
                let count = be_value(&payload[..8]);
                Some(BitString::repeated(payload[8], count as usize))
            }
        } else if bits.len() >= 3 && bits[2] == 0 {
            // tag 110
            let payload = &bits[3..];
            if payload.len() != 8 {
                None
            } else {
                let count = be_value(payload) as usize;
                if count == 0 {
                    Some(BitString::empty())
                } else if condition.is_empty() {
                    None
                } else {
                    let mut out = BitString::empty();
                    for i in 0..count {
                        out.push(condition.bit(i % condition.len()));
                    }
                    Some(out)
                }
            }
        } else {
            None
        };
        match output {
            Some(out) if (out.len() as u64) < budget => EvalResult::Halted(out),
            _ => EvalResult::Diverged,
        }
    }
}

fn be_value(bits: &[u8]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}
