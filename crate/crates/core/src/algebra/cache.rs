//! On-disk, content-addressed store of computed bases.
//!
//! Layout: `<dir>/bases/<key>.json`, where `key` is the SHA-256 of the
//! presentation hash, the degree, the engine version and the field tag. Each
//! file is a JSON document
//!
//! ```text
//! { "body": { "format": "tautring-basis", "version": 1, "field": "Q",
//!             "presentation": <hash>, "degree": d, "generators": N,
//!             "monomial_count": M, "quotient_basis": [col, ...],
//!             "normal_forms": [[col, [[pos, "p/q"], ...]], ...] },
//!   "content_hash": <sha256 of the body's JSON text> }
//! ```
//!
//! Files are written to a temporary name and renamed into place. A file whose
//! hash does not match its body is reported as corrupt and never used.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::basis::GradedBasis;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const BASIS_FORMAT_VERSION: u32 = 1;
/// Bumped whenever the elimination or column order changes.
pub const ENGINE_VERSION: &str = concat!("tautring-", env!("CARGO_PKG_VERSION"), "-e1");

#[derive(Serialize, Deserialize)]
struct Body {
    format: String,
    version: u32,
    field: String,
    presentation: String,
    degree: usize,
    generators: usize,
    monomial_count: u64,
    quotient_basis: Vec<u32>,
    normal_forms: Vec<(u32, Vec<(u32, String)>)>,
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    body: Body,
    content_hash: String,
}

pub enum Lookup<S> {
    Missing,
    Corrupt(String),
    Hit(GradedBasis<S>),
}

#[derive(Clone, Debug, Serialize)]
pub struct StoreEntry {
    pub key: String,
    pub bytes: u64,
}

#[derive(Clone, Debug)]
pub struct BasisStore {
    root: PathBuf,
}

impl BasisStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        BasisStore { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn bases_dir(&self) -> PathBuf {
        self.root.join("bases")
    }

    pub fn key<S: Scalar>(presentation_hash: &str, degree: usize) -> String {
        let text = format!("{presentation_hash}|{degree}|{ENGINE_VERSION}|{}", S::TAG);
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.bases_dir().join(format!("{key}.json"))
    }

    pub fn load<S: Scalar>(&self, key: &str, presentation_hash: &str, degree: usize) -> Lookup<S> {
        let path = self.path(key);
        let Ok(text) = fs::read_to_string(&path) else {
            return Lookup::Missing;
        };
        match decode(&text, presentation_hash, degree) {
            Ok(b) => Lookup::Hit(b),
            Err(e) => Lookup::Corrupt(e),
        }
    }

    pub fn store<S: Scalar>(
        &self,
        key: &str,
        presentation_hash: &str,
        basis: &GradedBasis<S>,
    ) -> Result<()> {
        let dir = self.bases_dir();
        fs::create_dir_all(&dir)?;
        let text = encode(presentation_hash, basis);
        let tmp = dir.join(format!(".{key}.{}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.path(key))?;
        Ok(())
    }

    /// Every cache entry, sorted by key.
    pub fn entries(&self) -> Result<Vec<StoreEntry>> {
        self.check_root()?;
        let dir = self.bases_dir();
        if !dir.exists() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for e in fs::read_dir(&dir)? {
            let e = e?;
            let name = e.file_name().to_string_lossy().into_owned();
            if let Some(key) = name.strip_suffix(".json") {
                if !name.starts_with('.') {
                    out.push(StoreEntry {
                        key: key.to_string(),
                        bytes: e.metadata()?.len(),
                    });
                }
            }
        }
        out.sort_by(|a, b| a.key.cmp(&b.key));
        Ok(out)
    }

    /// Removes every entry; returns how many were removed.
    ///
    /// The entry directory is renamed away first, so readers see either the
    /// full old store or an empty one.
    pub fn clear(&self) -> Result<usize> {
        let count = self.entries()?.len();
        let dir = self.bases_dir();
        if dir.exists() {
            let trash = self
                .root
                .join(format!(".bases.trash.{}", std::process::id()));
            fs::rename(&dir, &trash)?;
            fs::remove_dir_all(&trash)?;
        }
        Ok(count)
    }

    fn check_root(&self) -> Result<()> {
        if !self.root.is_dir() {
            return Err(Error::Cache(format!(
                "cache directory {} does not exist",
                self.root.display()
            )));
        }
        Ok(())
    }
}

fn body_hash(body: &Body) -> String {
    let text = serde_json::to_string(body).expect("serializable");
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub(crate) fn encode<S: Scalar>(presentation_hash: &str, basis: &GradedBasis<S>) -> String {
    let mut nfs: Vec<(u32, Vec<(u32, String)>)> = basis
        .normal_forms
        .iter()
        .map(|(c, nf)| (*c, nf.iter().map(|(p, v)| (*p, v.to_string())).collect()))
        .collect();
    nfs.sort_by_key(|(c, _)| *c);
    let body = Body {
        format: "tautring-basis".into(),
        version: BASIS_FORMAT_VERSION,
        field: S::TAG.into(),
        presentation: presentation_hash.into(),
        degree: basis.degree,
        generators: basis.ngens,
        monomial_count: basis.monomial_count,
        quotient_basis: basis.quotient_basis.clone(),
        normal_forms: nfs,
    };
    let content_hash = body_hash(&body);
    serde_json::to_string(&Envelope { body, content_hash }).expect("serializable")
}

pub(crate) fn decode<S: Scalar>(
    text: &str,
    presentation_hash: &str,
    degree: usize,
) -> std::result::Result<GradedBasis<S>, String> {
    let env: Envelope = serde_json::from_str(text).map_err(|e| format!("unreadable: {e}"))?;
    if body_hash(&env.body) != env.content_hash {
        return Err("content hash mismatch".into());
    }
    let b = env.body;
    if b.format != "tautring-basis"
        || b.version != BASIS_FORMAT_VERSION
        || b.field != S::TAG
        || b.presentation != presentation_hash
        || b.degree != degree
    {
        return Err("header does not match the requested basis".into());
    }
    let mut normal_forms = HashMap::with_capacity(b.normal_forms.len());
    for (c, nf) in b.normal_forms {
        let mut v = Vec::with_capacity(nf.len());
        for (p, s) in nf {
            let x = S::parse(&s).ok_or_else(|| format!("bad scalar {s:?}"))?;
            if p as usize >= b.quotient_basis.len() {
                return Err("normal form refers past the basis".into());
            }
            v.push((p, x));
        }
        normal_forms.insert(c, v);
    }
    if b.quotient_basis.len() as u64 > b.monomial_count {
        return Err("basis larger than the monomial count".into());
    }
    Ok(GradedBasis::from_parts(
        b.degree,
        b.generators,
        b.monomial_count,
        b.quotient_basis,
        normal_forms,
    ))
}
