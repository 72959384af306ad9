//! Configuration, record serialization and small file formats.

mod config;
mod pgm;
mod records;
mod text;

pub use config::{
    default_out_dir, parse_config_pairs, read_config_file, Command, OutputFormat, RunConfig, DEFAULT_OUT_DIR,
    KEYS, OUT_DIR_ENV,
};
pub use pgm::{decode_pgm, encode_pgm, read_pgm, write_pgm, MAX_PIXELS};
pub use records::{
    fit_status_name, format_f64, read_records, records_from_csv, records_from_json, records_to_csv,
    records_to_json, write_records, CellRow, Cells, Field, ImageRow, Record, TransitionRow,
};
pub use text::{
    format_mask, format_vector, parse_mask, parse_vector, read_mask, read_vector, write_mask, write_vector,
};
