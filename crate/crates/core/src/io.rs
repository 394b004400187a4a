//! JSON wire formats for frames and signals.
//!
//! A frame file is `{"dim": N, "label": "...", "vectors": [[[re, im], ...], ...]}`
//! with one inner list of `N` pairs per frame vector. Several frames are
//! bundled as `{"frames": [frame, frame, ...]}`. A signal file is
//! `{"values": [[re, im], ...]}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::Frame;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameFile {
    pub dim: usize,
    #[serde(default)]
    pub label: String,
    pub vectors: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameBundle {
    pub frames: Vec<FrameFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalFile {
    pub values: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyFrameFile {
    Bundle(FrameBundle),
    Single(FrameFile),
}

impl From<&Frame> for FrameFile {
    fn from(f: &Frame) -> Self {
        let m = f.matrix();
        FrameFile {
            dim: f.dim(),
            label: f.label().to_string(),
            vectors: (0..f.len())
                .map(|k| (0..f.dim()).map(|i| [m[(k, i)].re, m[(k, i)].im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<&FrameFile> for Frame {
    type Error = Error;

    fn try_from(file: &FrameFile) -> Result<Frame> {
        let rows = file.vectors.len();
        let mut m = DMatrix::zeros(rows, file.dim);
        for (k, v) in file.vectors.iter().enumerate() {
            if v.len() != file.dim {
                return Err(Error::Format(format!(
                    "vector {k} has {} entries, expected {}",
                    v.len(),
                    file.dim
                )));
            }
            for (i, [re, im]) in v.iter().enumerate() {
                m[(k, i)] = Complex64::new(*re, *im);
            }
        }
        Frame::from_matrix(file.label.clone(), m)
    }
}

/// Serializes one frame (bare) or several (bundle).
pub fn frames_to_json(frames: &[Frame]) -> String {
    let files: Vec<FrameFile> = frames.iter().map(FrameFile::from).collect();
    let out = if files.len() == 1 {
        serde_json::to_string_pretty(&files[0])
    } else {
        serde_json::to_string_pretty(&FrameBundle { frames: files })
    };
    out.expect("frame serialization cannot fail")
}

/// Parses either a bare frame or a bundle, validating every frame.
pub fn frames_from_json(text: &str) -> Result<Vec<Frame>> {
    let parsed: AnyFrameFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let files = match parsed {
        AnyFrameFile::Bundle(b) => b.frames,
        AnyFrameFile::Single(f) => vec![f],
    };
    files.iter().map(Frame::try_from).collect()
}

pub fn signal_to_json(x: &DVector<Complex64>) -> String {
    serde_json::to_string(&SignalFile::from(x)).expect("signal serialization cannot fail")
}

pub fn signal_from_json(text: &str) -> Result<DVector<Complex64>> {
    let file: SignalFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    Ok(file.to_vector())
}

impl From<&DVector<Complex64>> for SignalFile {
    fn from(x: &DVector<Complex64>) -> Self {
        SignalFile {
            values: x.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl SignalFile {
    pub fn to_vector(&self) -> DVector<Complex64> {
        DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|[re, im]| Complex64::new(*re, *im)),
        )
    }
}

/// `[[re, im], ...]` view of a complex vector, used inside reports.
pub fn complex_pairs(x: &DVector<Complex64>) -> Vec<[f64; 2]> {
    x.iter().map(|z| [z.re, z.im]).collect()
}
