//! Documents, sweeps, report formatting and the command implementations
//! behind the `gaussfid` binary. Nothing outside this module touches files.

mod commands;
mod document;
mod format;
mod sweep;

pub use commands::{
    cmd_fidelity, cmd_oracle_check, cmd_spectrum, cmd_sweep, cmd_validate, comparison_table, fidelity_table,
    CommandOutput, Format,
};
pub use document::{parse_state, ParsedState, StateDocument};
pub use format::{csv_number, sig, table, table_number};
pub use sweep::{run_sweep, GridAxis, SweepOutcome, SweepOutput, SweepSpec, SweepTemplate};
