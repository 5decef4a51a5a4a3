use crate::data::shuffled_indices;
use crate::error::{Error, Result};
use crate::types::{Dataset, Sample};

/// An initial block followed by fixed-size chunks, in arrival order.
#[derive(Debug, Clone, PartialEq)]
pub struct DataStream {
    initial: Vec<Sample>,
    rest: Vec<Sample>,
    chunk_size: usize,
}

impl DataStream {
    pub fn initial_block(&self) -> &[Sample] {
        &self.initial
    }

    /// Post-initial samples in chunks of `chunk_size`; the last may be shorter.
    pub fn chunks(&self) -> std::slice::Chunks<'_, Sample> {
        self.rest.chunks(self.chunk_size)
    }

    pub fn chunk_sizes(&self) -> Vec<usize> {
        self.chunks().map(<[Sample]>::len).collect()
    }

    pub fn chunk_size(&self) -> usize {
        self.chunk_size
    }

    /// Everything in arrival order.
    pub fn iter(&self) -> impl Iterator<Item = &Sample> {
        self.initial.iter().chain(&self.rest)
    }
}

/// Splits `d` into an initial block of `n0` samples and chunks of `chunk_size`,
/// after an optional seeded shuffle.
pub fn chunk_stream(
    d: &Dataset,
    n0: usize,
    chunk_size: usize,
    shuffle_seed: Option<u64>,
) -> Result<DataStream> {
    if n0 == 0 || chunk_size == 0 {
        return Err(Error::config(
            "initial block size and chunk size must both be at least 1",
        ));
    }
    if n0 >= d.len() {
        return Err(Error::config(format!(
            "initial block of {n0} leaves nothing to stream from {} samples",
            d.len()
        )));
    }
    let mut ordered: Vec<Sample> = match shuffle_seed {
        Some(seed) => shuffled_indices(d.len(), seed)
            .into_iter()
            .map(|i| d.samples()[i].clone())
            .collect(),
        None => d.samples().to_vec(),
    };
    let rest = ordered.split_off(n0);
    Ok(DataStream {
        initial: ordered,
        rest,
        chunk_size,
    })
}
