//! KVM-8, the fixed reference machine.
//!
//! A program is a bit string decoded into 3-bit opcodes, MSB-first; 1-2
//! trailing bits are ignored. The machine owns a bit tape unbounded in both
//! directions (all cells start at 0), a head starting on cell 0, an input
//! cursor starting at input bit 0, and an append-only output.
//!
//! Opcode table:
//!
//! | bits | op         | effect                                                        |
//! |------|------------|---------------------------------------------------------------|
//! | 000  | MoveLeft   | head one cell left                                            |
//! | 001  | MoveRight  | head one cell right                                           |
//! | 010  | Flip       | invert current cell                                           |
//! | 011  | Emit       | append current cell's bit to the output                       |
//! | 100  | ReadInput  | copy next input bit into the cell (0 if exhausted), advance   |
//! | 101  | LoopOpen   | if current cell is 0, jump past the matching LoopClose        |
//! | 110  | LoopClose  | if current cell is 1, jump back to the matching LoopOpen      |
//! | 111  | Halt       | halt                                                          |
//!
//! One executed opcode is one step. Execution also halts when the
//! instruction pointer passes the last opcode; that costs no step.
//! Programs with unmatched loop brackets are invalid and never executed.
//!
//! Everything here is integer-only and pure: identical `(program, input,
//! step_cap)` triples produce identical outcomes on any thread.

use crate::bits::BitString;

/// Identifies the opcode semantics above. Any change to the machine's
/// behavior must change this tag; it keys every cache file.
pub const VERSION_TAG: &str = "kvm8-v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[repr(u8)]
pub enum Opcode {
    MoveLeft = 0,
    MoveRight = 1,
    Flip = 2,
    Emit = 3,
    ReadInput = 4,
    LoopOpen = 5,
    LoopClose = 6,
    Halt = 7,
}

impl Opcode {
    pub fn from_bits3(b: u8) -> Opcode {
        match b & 7 {
            0 => Opcode::MoveLeft,
            1 => Opcode::MoveRight,
            2 => Opcode::Flip,
            3 => Opcode::Emit,
            4 => Opcode::ReadInput,
            5 => Opcode::LoopOpen,
            6 => Opcode::LoopClose,
            _ => Opcode::Halt,
        }
    }
}

/// A decoded, bracket-checked program.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Program {
    raw: BitString,
    ops: Vec<Opcode>,
    jumps: Vec<u32>,
    ignored_tail_bits: u8,
}

impl Program {
    pub fn raw(&self) -> &BitString {
        &self.raw
    }

    pub fn ops(&self) -> &[Opcode] {
        &self.ops
    }

    pub fn jumps(&self) -> &[u32] {
        &self.jumps
    }

    pub fn ignored_tail_bits(&self) -> u8 {
        self.ignored_tail_bits
    }

    pub fn bit_len(&self) -> usize {
        self.raw.len()
    }
}

/// Decode `floor(len/3)` opcodes MSB-first and bracket-check the loops.
/// Returns `None` exactly when a LoopOpen/LoopClose is unmatched.
pub fn parse_program(raw: &BitString) -> Option<Program> {
    let n_ops = raw.len() / 3;
    let mut ops = Vec::with_capacity(n_ops);
    for i in 0..n_ops {
        let b = (raw.bit(3 * i) << 2) | (raw.bit(3 * i + 1) << 1) | raw.bit(3 * i + 2);
        ops.push(Opcode::from_bits3(b));
    }
    let jumps = match_brackets(&ops)?;
    Some(Program {
        raw: raw.clone(),
        ops,
        jumps,
        ignored_tail_bits: (raw.len() % 3) as u8,
    })
}

pub(crate) fn match_brackets(ops: &[Opcode]) -> Option<Vec<u32>> {
    let mut jumps = Vec::new();
    let mut stack = Vec::new();
    if match_brackets_into(ops, &mut jumps, &mut stack) {
        Some(jumps)
    } else {
        None
    }
}

/// Bracket matching into caller-owned buffers, so enumeration can reuse
/// allocations across millions of candidates. Same semantics as
/// [`match_brackets`].
pub(crate) fn match_brackets_into(
    ops: &[Opcode],
    jumps: &mut Vec<u32>,
    stack: &mut Vec<u32>,
) -> bool {
    jumps.clear();
    jumps.resize(ops.len(), u32::MAX);
    stack.clear();
    for (i, op) in ops.iter().enumerate() {
        match op {
            Opcode::LoopOpen => stack.push(i as u32),
            Opcode::LoopClose => match stack.pop() {
                Some(open) => {
                    jumps[open as usize] = i as u32;
                    jumps[i] = open;
                }
                None => return false,
            },
            _ => {}
        }
    }
    stack.is_empty()
}

/// Decode the `len`-bit MSB-first candidate `value` into opcodes. Returns
/// false when a bracket is unmatched (the candidate is not a program).
pub(crate) fn decode_candidate_into(
    len: u32,
    value: u64,
    ops: &mut Vec<Opcode>,
    jumps: &mut Vec<u32>,
    stack: &mut Vec<u32>,
) -> bool {
    debug_assert!(len <= 64);
    ops.clear();
    let n = (len / 3) as usize;
    for i in 0..n {
        let shift = len as usize - 3 * (i + 1);
        ops.push(Opcode::from_bits3(((value >> shift) & 7) as u8));
    }
    match_brackets_into(ops, jumps, stack)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecStatus {
    Halted,
    StepLimit,
    Invalid,
}

/// Result of running a program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecOutcome {
    pub status: ExecStatus,
    pub output: BitString,
    pub steps: u32,
}

/// Machine identity plus the default step cap used by front ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineConfig {
    pub version_tag: String,
    pub default_step_cap: u32,
}

impl Default for MachineConfig {
    fn default() -> Self {
        MachineConfig {
            version_tag: VERSION_TAG.to_string(),
            default_step_cap: 1024,
        }
    }
}

/// Run a valid program against `input` with the given step cap.
pub fn execute(program: &Program, input: &BitString, step_cap: u32) -> ExecOutcome {
    let mut exec = Executor::new(step_cap);
    let (status, steps) = exec.run(program.ops(), program.jumps(), input, step_cap);
    ExecOutcome {
        status,
        output: BitString::from_bits(exec.output_bits().iter().copied()),
        steps,
    }
}

/// Parse-then-execute convenience; invalid programs yield `Invalid` with
/// empty output and zero steps instead of being run.
pub fn run_raw(raw: &BitString, input: &BitString, step_cap: u32) -> ExecOutcome {
    match parse_program(raw) {
        Some(p) => execute(&p, input, step_cap),
        None => ExecOutcome {
            status: ExecStatus::Invalid,
            output: BitString::new(),
            steps: 0,
        },
    }
}

/// Reusable execution scratch: a stamped tape sized to the step cap (the
/// head can move at most one cell per step) and an output bit buffer.
/// Enumeration runs millions of programs through one of these.
pub(crate) struct Executor {
    cap: u32,
    origin: usize,
    stamp: Vec<u64>,
    cell: Vec<u8>,
    gen: u64,
    out: Vec<u8>,
}

impl Executor {
    pub(crate) fn new(step_cap: u32) -> Self {
        let width = 2 * step_cap as usize + 3;
        Executor {
            cap: step_cap,
            origin: step_cap as usize + 1,
            stamp: vec![0; width],
            cell: vec![0; width],
            gen: 0,
            out: Vec::new(),
        }
    }

    pub(crate) fn output_bits(&self) -> &[u8] {
        &self.out
    }

    #[inline]
    fn read(&self, idx: usize) -> u8 {
        if self.stamp[idx] == self.gen {
            self.cell[idx]
        } else {
            0
        }
    }

    #[inline]
    fn write(&mut self, idx: usize, v: u8) {
        self.stamp[idx] = self.gen;
        self.cell[idx] = v;
    }

    /// Small-step interpreter; `step_cap` must be `<=` the cap this scratch
    /// was built for. Output bits are left in the internal buffer.
    pub(crate) fn run(
        &mut self,
        ops: &[Opcode],
        jumps: &[u32],
        input: &BitString,
        step_cap: u32,
    ) -> (ExecStatus, u32) {
        assert!(
            step_cap <= self.cap,
            "executor sized for cap {}, got {}",
            self.cap,
            step_cap
        );
        self.gen += 1;
        self.out.clear();
        let n = ops.len();
        let mut ip = 0usize;
        let mut head = self.origin;
        let mut cursor = 0usize;
        let mut steps = 0u32;
        loop {
            if ip >= n {
                return (ExecStatus::Halted, steps);
            }
            if steps == step_cap {
                return (ExecStatus::StepLimit, steps);
            }
            steps += 1;
            match ops[ip] {
                Opcode::MoveLeft => {
                    head -= 1;
                    ip += 1;
                }
                Opcode::MoveRight => {
                    head += 1;
                    ip += 1;
                }
                Opcode::Flip => {
                    let v = self.read(head) ^ 1;
                    self.write(head, v);
                    ip += 1;
                }
                Opcode::Emit => {
                    self.out.push(self.read(head));
                    ip += 1;
                }
                Opcode::ReadInput => {
                    let b = if cursor < input.len() {
                        input.bit(cursor)
                    } else {
                        0
                    };
                    cursor += 1;
                    self.write(head, b);
                    ip += 1;
                }
                Opcode::LoopOpen => {
                    if self.read(head) == 0 {
                        ip = jumps[ip] as usize + 1;
                    } else {
                        ip += 1;
                    }
                }
                Opcode::LoopClose => {
                    if self.read(head) == 1 {
                        ip = jumps[ip] as usize;
                    } else {
                        ip += 1;
                    }
                }
                Opcode::Halt => {
                    return (ExecStatus::Halted, steps);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        BitString::from_binary_str(s).unwrap()
    }

    fn run(prog: &str, input: &str, cap: u32) -> ExecOutcome {
        run_raw(&bs(prog), &bs(input), cap)
    }

    #[test]
    fn empty_program_is_valid_and_halts_immediately() {
        let p = parse_program(&BitString::new()).unwrap();
        assert_eq!(p.ops().len(), 0);
        let out = run("", "", 100);
        assert_eq!(
            out,
            ExecOutcome {
                status: ExecStatus::Halted,
                output: bs(""),
                steps: 0
            }
        );
    }

    #[test]
    fn decode_and_bracket_match() {
        let p = parse_program(&bs("101110")).unwrap();
        assert_eq!(p.ops(), &[Opcode::LoopOpen, Opcode::LoopClose]);
        assert_eq!(p.jumps(), &[1, 0]);
        assert_eq!(parse_program(&bs("101")), None);
        assert_eq!(parse_program(&bs("110")), None);
        assert_eq!(parse_program(&bs("110101")), None);
    }

    #[test]
    fn trailing_bits_are_ignored() {
        let p = parse_program(&bs("01101")).unwrap();
        assert_eq!(p.ops(), &[Opcode::Emit]);
        assert_eq!(p.ignored_tail_bits(), 2);
    }

    #[test]
    fn hand_simulated_anchors() {
        // emit cell(=0), halt
        assert_eq!(
            run("011111", "", 100),
            ExecOutcome {
                status: ExecStatus::Halted,
                output: bs("0"),
                steps: 2
            }
        );
        // flip, emit, fall off the end
        assert_eq!(
            run("010011", "", 100),
            ExecOutcome {
                status: ExecStatus::Halted,
                output: bs("1"),
                steps: 2
            }
        );
        // flip executed, emit not reached
        assert_eq!(
            run("010011", "", 1),
            ExecOutcome {
                status: ExecStatus::StepLimit,
                output: bs(""),
                steps: 1
            }
        );
    }

    #[test]
    fn loop_skips_when_cell_is_zero() {
        // LoopOpen on a zero cell jumps past the close, then falls off.
        let out = run("101110", "", 100);
        assert_eq!(out.status, ExecStatus::Halted);
        assert_eq!(out.steps, 1);
    }

    #[test]
    fn loop_spins_until_cap() {
        // flip; [ ; ] spins: close jumps back to open, open re-tests.
        let out = run("010101110", "", 50);
        assert_eq!(out.status, ExecStatus::StepLimit);
        assert_eq!(out.steps, 50);
    }

    #[test]
    fn loop_back_retests_the_open_bracket() {
        // Flip, MoveLeft, Flip, LoopOpen, MoveRight, LoopClose.
        // Hand trace: flip cell 0 (1), move to -1 (2), flip it (3), open
        // sees 1 and falls through (4), move to 0 (5), close sees 1 and
        // jumps back TO the open (6), the open re-tests cell 0 = 1 (7),
        // move to +1 (8), close sees 0 and falls through (9), halt.
        // A close that jumped past the open instead would halt in 8.
        let out = run("010000010101001110", "", 64);
        assert_eq!(out.status, ExecStatus::Halted);
        assert_eq!(out.steps, 9);
        assert_eq!(out.output, bs(""));
    }

    #[test]
    fn loop_body_runs_then_exits() {
        // flip, [ emit, read-input(->0) ]: body runs once, emits 1, exits.
        let out = run("010101011100110", "", 100);
        assert_eq!(out.status, ExecStatus::Halted);
        assert_eq!(out.output, bs("1"));
        // flip, open, emit, input, close(cell=0 falls through), off the end
        assert_eq!(out.steps, 5);
    }

    #[test]
    fn reads_past_input_end_yield_zero() {
        // read, emit, read, emit against a one-bit input.
        let out = run("100011100011", "1", 100);
        assert_eq!(out.output, bs("10"));
        assert_eq!(out.status, ExecStatus::Halted);
    }

    #[test]
    fn invalid_programs_are_rejected_not_run() {
        let out = run("101", "", 100);
        assert_eq!(
            out,
            ExecOutcome {
                status: ExecStatus::Invalid,
                output: bs(""),
                steps: 0
            }
        );
    }

    #[test]
    fn halted_outcome_is_stable_under_larger_caps() {
        let small = run("010011", "", 2);
        let large = run("010011", "", 1000);
        assert_eq!(small, large);
    }

    #[test]
    fn tape_is_unbounded_both_directions() {
        // left, flip, emit: cell -1 works like any other.
        let out = run("000010011", "", 100);
        assert_eq!(out.output, bs("1"));
        assert_eq!(out.status, ExecStatus::Halted);
    }
}
