//! Polynomial transforms between matrix problems, the falsifier for
//! candidate pair-to-single containments, and the transducer compiler.

mod falsify;
mod ncpoly;
mod transducer;

pub use falsify::{
    falsify_containment, scalar_collision_search, scalar_specialize, Outcome, ScalarPoint,
    ScalarStage, ScalarTable, Verdict, Witness, MAX_EXHAUSTIVE_TUPLES, MAX_SCALAR_FIELD,
};
pub use ncpoly::{apply_transform, nc_eval, nc_eval_counted, NcPoly, Transform, Word};
pub use transducer::{
    compile_transducer, CompiledTransducer, FieldTransducer, TransducerState, Transition, MAX_RUN,
    MAX_TRANSDUCER_FIELD,
};
