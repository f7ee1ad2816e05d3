//! Binary model file.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic      8 bytes  "TFUSEMDL"
//! version    u32
//! scalar     str      "f32" | "f64"
//! hash       str      string hash identifier
//! dim        u64
//! toggles    u8       bit 0 links, 1 media, 2 entities, 3 author
//! topics     u32 count, then str per topic
//! content    head
//! author     head
//!
//! str  = u32 byte length + UTF-8 bytes
//! head = bias (topics scalars), u64 row count,
//!        rows sorted by feature: u32 feature + topics scalars
//! ```

use std::path::Path;

use crate::classifier::hashing::HASH_ID;
use crate::classifier::model::{LinearDualModel, LinearHead};
use crate::error::{Error, Result};
use crate::features::FeatureToggles;
use crate::scalar::Scalar;
use crate::topics::TopicSpace;

pub const MAGIC: &[u8; 8] = b"TFUSEMDL";
pub const FORMAT_VERSION: u32 = 1;

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    put_u32(out, s.len() as u32);
    out.extend_from_slice(s.as_bytes());
}

fn put_head<S: Scalar>(out: &mut Vec<u8>, head: &LinearHead<S>) {
    for &b in head.bias() {
        b.write_le(out);
    }
    put_u64(out, head.row_count() as u64);
    for (feature, row) in head.rows() {
        put_u32(out, feature);
        for &w in row {
            w.write_le(out);
        }
    }
}

pub fn to_bytes<S: Scalar>(model: &LinearDualModel<S>) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    put_u32(&mut out, FORMAT_VERSION);
    put_str(&mut out, S::NAME);
    put_str(&mut out, HASH_ID);
    put_u64(&mut out, model.dim() as u64);
    out.push(model.toggles().bits());
    put_u32(&mut out, model.topics().len() as u32);
    for name in model.topics().names() {
        put_str(&mut out, name);
    }
    put_head(&mut out, model.content());
    put_head(&mut out, model.author());
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::ModelFormat(format!("truncated at byte {}", self.pos)))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn str(&mut self) -> Result<&'a str> {
        let n = self.u32()? as usize;
        std::str::from_utf8(self.take(n)?)
            .map_err(|e| Error::ModelFormat(format!("invalid UTF-8: {e}")))
    }

    fn scalar<S: Scalar>(&mut self) -> Result<S> {
        let v = S::read_le(self.take(S::WIDTH)?);
        if !v.is_finite() {
            return Err(Error::ModelFormat("non-finite weight".into()));
        }
        Ok(v)
    }

    fn head<S: Scalar>(&mut self, topics: usize, dim: usize) -> Result<LinearHead<S>> {
        let mut head = LinearHead::zeros(topics);
        for t in 0..topics {
            head.bias[t] = self.scalar()?;
        }
        let rows = self.u64()?;
        let mut last: Option<u32> = None;
        for _ in 0..rows {
            let feature = self.u32()?;
            if feature as usize >= dim || last.is_some_and(|l| l >= feature) {
                return Err(Error::ModelFormat(format!("bad feature index {feature}")));
            }
            last = Some(feature);
            let row = (0..topics)
                .map(|_| self.scalar())
                .collect::<Result<Vec<S>>>()?;
            head.rows.insert(feature, row);
        }
        Ok(head)
    }
}

pub fn from_bytes<S: Scalar>(bytes: &[u8]) -> Result<LinearDualModel<S>> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(MAGIC.len())? != MAGIC {
        return Err(Error::ModelFormat("bad magic".into()));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::ModelFormat(format!("unsupported version {version}")));
    }
    let scalar = r.str()?;
    if scalar != S::NAME {
        return Err(Error::ModelFormat(format!(
            "model stores {scalar} weights, expected {}",
            S::NAME
        )));
    }
    let hash = r.str()?;
    if hash != HASH_ID {
        return Err(Error::ModelFormat(format!("unsupported hash {hash:?}")));
    }
    let dim = r.u64()? as usize;
    if dim < 2 {
        return Err(Error::ModelFormat(format!("dimensionality {dim}")));
    }
    let toggles = FeatureToggles::from_bits(r.u8()?);
    let n = r.u32()? as usize;
    let names = (0..n)
        .map(|_| r.str().map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    let topics = TopicSpace::new(names).map_err(|e| Error::ModelFormat(e.to_string()))?;
    let content = r.head(n, dim)?;
    let author = r.head(n, dim)?;
    if r.pos != bytes.len() {
        return Err(Error::ModelFormat("trailing bytes".into()));
    }
    Ok(LinearDualModel {
        topics,
        dim,
        toggles,
        content,
        author,
    })
}

pub fn save_model<S: Scalar>(model: &LinearDualModel<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_bytes(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model<S: Scalar>(path: impl AsRef<Path>) -> Result<LinearDualModel<S>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}
