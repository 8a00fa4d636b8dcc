//! Executable checks of the identities and inequalities, producing [`Report`]s.

mod checks;
mod oracles;
mod report;

pub use checks::{
    check_affine_trace, check_general_p, check_identity_dt, check_identity_frac,
    check_identity_gradient, check_trace_hardy, check_trace_logsobolev, check_trace_sobolev,
    is_normalized, GeneralP, Variant, Verifier, DEFAULT_DIRECTIONS, IDENTITY_TOLERANCE,
    STABILITY_TOLERANCE,
};
pub use oracles::{check_moment_identity, check_symbol_identity, periodized_kernel};
pub use report::{
    reports_to_csv, reports_to_json_lines, stability_report, to_json_fixed, CheckKind,
    FixedFloatFormatter, Report, Status,
};
