pub mod align;
pub mod analyze;
pub mod ingest;
pub mod link;
pub mod newsworthy;
pub mod report;
pub mod synth;
