//! Core of an adversarial-robustness toolkit for feed-forward network
//! intrusion detectors.
//!
//! The crate trains a tanh/sigmoid MLP on labelled flow features, crafts FGSM
//! adversarial samples against it across an epsilon sweep, scores every run
//! with a binary confusion matrix, and retrains on a mix of clean and
//! adversarial rows. It is `no_std` (with `alloc`); file formats, CSV ingestion
//! and the command line live in the companion `advids` crate.
//!
//! Modules, bottom-up:
//!
//! - [`linalg`]: dense [`Matrix`](linalg::Matrix) and the seeded [`Rng`](linalg::Rng)
//! - [`nn`]: the detector, its loss and gradients, mini-batch SGD
//! - [`attack`]: fast gradient sign perturbations
//! - [`data`]: schemas, label binarization, min-max scaling, splitting, SMOTE,
//!   synthetic clusters
//! - [`metrics`]: confusion matrix, precision, recall, F1, accuracy
//! - [`experiment`]: sweeps, adversarial retraining and reports

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod attack;
pub mod data;
mod error;
pub mod experiment;
pub mod linalg;
pub mod metrics;
pub mod nn;

pub use error::{Error, Result};

use alloc::string::String;
use core::fmt::Write;
use sha2::{Digest, Sha256};

fn sha256_hex(feed: impl FnOnce(&mut Sha256)) -> String {
    let mut h = Sha256::new();
    feed(&mut h);
    let mut out = String::with_capacity(64);
    for b in h.finalize().iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}
