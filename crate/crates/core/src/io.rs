//! Seed and chain files.
//!
//! A seed is a `n,value` CSV with a JSON sidecar `{eps, window}`. A chain
//! directory holds one CSV per `V_i`, `f_i`, `ψ̂_i` and seed plus
//! `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::crum::Chain;
use crate::darboux::Seed;
use crate::error::{Error, Result};
use crate::scalar::{Backend, Scalar};
use crate::seq::{Seq, Window};
use crate::verify::ChainData;

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSidecar {
    pub eps: String,
    pub window: Window,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
}

pub fn write_seed<S: Scalar>(seed: &Seed<S>, csv: &Path) -> Result<()> {
    seed.psi().write_csv(csv)?;
    let side = SeedSidecar {
        eps: seed.eps().format(),
        window: seed.psi().window(),
    };
    write_json(&sidecar_path(csv), &side)
}

/// Reads a seed file and its sidecar, validating against `v0`.
pub fn read_seed<S: Scalar>(csv: &Path, v0: &Seq<S>) -> Result<Seed<S>> {
    let (psi, eps) = read_seed_raw(csv)?;
    Seed::new(psi, eps, v0)
}

fn read_seed_raw<S: Scalar>(csv: &Path) -> Result<(Seq<S>, S)> {
    let psi = Seq::<S>::read_csv(csv)?;
    let side: SeedSidecar = read_json(&sidecar_path(csv))?;
    if side.window != psi.window() {
        return Err(Error::format(
            csv,
            format!("sidecar window {} disagrees with data {}", side.window, psi.window()),
        ));
    }
    Ok((psi, S::parse_literal(&side.eps)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub file: String,
    pub window: Window,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainManifest {
    pub backend: Backend,
    pub eps: Vec<String>,
    pub tolerance: f64,
    /// `V_0, …, V_k`.
    pub potentials: Vec<FileEntry>,
    pub superpotentials: Vec<FileEntry>,
    pub states: Vec<FileEntry>,
    pub seeds: Vec<FileEntry>,
}

fn write_entry<S: Scalar>(dir: &Path, name: String, s: &Seq<S>) -> Result<FileEntry> {
    s.write_csv(&dir.join(&name))?;
    Ok(FileEntry { file: name, window: s.window() })
}

pub fn export_chain<S: Scalar>(chain: &Chain<S>, dir: &Path) -> Result<ChainManifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut m = ChainManifest {
        backend: S::BACKEND,
        eps: chain.eps().iter().map(Scalar::format).collect(),
        tolerance: chain.tol,
        potentials: Vec::new(),
        superpotentials: Vec::new(),
        states: Vec::new(),
        seeds: Vec::new(),
    };
    for (i, v) in chain.potentials.iter().enumerate() {
        m.potentials.push(write_entry(dir, format!("V_{i}.csv"), v)?);
    }
    for i in 0..chain.k() {
        let j = i + 1;
        m.superpotentials.push(write_entry(dir, format!("f_{j}.csv"), &chain.fs[i])?);
        m.states.push(write_entry(dir, format!("psi_hat_{j}.csv"), &chain.states[i])?);
        let name = format!("seed_{j}.csv");
        write_seed(&chain.seeds[i], &dir.join(&name))?;
        m.seeds.push(FileEntry { file: name, window: chain.seeds[i].psi().window() });
    }
    write_json(&dir.join(MANIFEST), &m)?;
    Ok(m)
}

pub fn read_manifest(dir: &Path) -> Result<ChainManifest> {
    let m: ChainManifest = read_json(&dir.join(MANIFEST))?;
    let k = m.eps.len();
    if m.potentials.len() != k + 1 || m.superpotentials.len() != k || m.states.len() != k || m.seeds.len() != k {
        return Err(Error::format(dir.join(MANIFEST), "file lists do not match the number of eps values"));
    }
    Ok(m)
}

fn read_entry<S: Scalar>(dir: &Path, e: &FileEntry) -> Result<Seq<S>> {
    let path = dir.join(&e.file);
    let s = Seq::<S>::read_csv(&path)?;
    if s.window() != e.window {
        return Err(Error::format(
            path,
            format!("manifest window {} disagrees with data {}", e.window, s.window()),
        ));
    }
    Ok(s)
}

/// Loads every sequence of an exported chain without re-deriving anything,
/// so that edited files are seen as they are.
pub fn load_chain<S: Scalar>(dir: &Path) -> Result<(ChainManifest, ChainData<S>)> {
    let m = read_manifest(dir)?;
    if m.backend != S::BACKEND {
        return Err(Error::BackendMismatch(match m.backend {
            Backend::Rational => "rational",
            Backend::Float => "float",
        }));
    }
    let read_all = |entries: &[FileEntry]| -> Result<Vec<Seq<S>>> {
        entries.iter().map(|e| read_entry(dir, e)).collect()
    };
    let potentials = read_all(&m.potentials)?;
    let fs = read_all(&m.superpotentials)?;
    let states = read_all(&m.states)?;
    let mut seeds = Vec::new();
    let mut eps = Vec::new();
    for (e, text) in m.seeds.iter().zip(&m.eps) {
        let (psi, side_eps) = read_seed_raw::<S>(&dir.join(&e.file))?;
        if side_eps != S::parse_literal(text)? {
            return Err(Error::format(dir.join(&e.file), "sidecar eps disagrees with manifest"));
        }
        seeds.push(psi);
        eps.push(side_eps);
    }
    Ok((m, ChainData { potentials, fs, states, seeds, eps }))
}
