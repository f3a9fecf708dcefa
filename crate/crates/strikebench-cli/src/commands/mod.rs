pub mod ensemble;
pub mod evaluate;
pub mod ingest;
pub mod mine;
pub mod recurrency;
pub mod report;
pub mod strikingness;

use std::path::Path;

use strikebench::tkg::{augment_inverse, load_dataset, Dataset, FormatSpec, Split};
use strikebench::{Error, Result};

/// Load a dataset directory and add inverse relations.
pub(crate) fn load_augmented(dir: &Path, spec: &FormatSpec) -> Result<Dataset> {
    augment_inverse(load_dataset(dir, spec)?)
}

pub(crate) fn parse_split(flag: Option<&str>) -> Result<Split> {
    match flag {
        None => Ok(Split::Test),
        Some(s) => {
            let split: Split = s.parse()?;
            if split == Split::Train {
                return Err(Error::Config(
                    "queries must come from the valid or test split".to_owned(),
                ));
            }
            Ok(split)
        }
    }
}
