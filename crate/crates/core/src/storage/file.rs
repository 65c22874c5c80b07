//! On-disk store format (private, versioned).
//!
//! ```text
//! magic "LEXIBASE" | version u32 LE | payload length u64 LE | crc32 u32 LE | payload
//! ```
//!
//! The payload is UTF-8: a `counters` line, a `registry <bytes>` line
//! followed by that many bytes of paradigm spec text, then the interchange
//! export of the content. Every commit rewrites the file through a temporary
//! sibling and an atomic rename.

use std::fs::{self, File};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use super::interchange;
use super::snapshot::{Counters, Snapshot};
use super::StoreError;
use crate::morphology::{load_paradigm_specs, SpecSource};

const MAGIC: &[u8; 8] = b"LEXIBASE";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 8 + 4;

pub(crate) fn encode(snapshot: &Snapshot) -> Vec<u8> {
    let c = snapshot.counters;
    let registry = snapshot.registry().to_text();
    let mut payload = format!(
        "counters {} {} {} {}\nregistry {}\n",
        c.next_entry,
        c.next_link,
        c.next_domain,
        c.commits,
        registry.len()
    )
    .into_bytes();
    payload.extend_from_slice(registry.as_bytes());
    interchange::export(snapshot, &mut payload).expect("writing to memory");

    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&crc32fast::hash(&payload).to_le_bytes());
    out.extend_from_slice(&payload);
    out
}

fn take_line<'a>(buf: &mut &'a [u8]) -> Result<&'a str, StoreError> {
    let end = buf
        .iter()
        .position(|b| *b == b'\n')
        .ok_or_else(|| StoreError::Corruption("unterminated payload line".into()))?;
    let line = std::str::from_utf8(&buf[..end])
        .map_err(|_| StoreError::Corruption("payload is not UTF-8".into()))?;
    *buf = &buf[end + 1..];
    Ok(line)
}

pub(crate) fn decode(bytes: &[u8]) -> Result<Snapshot, StoreError> {
    let corrupt = |m: &str| StoreError::Corruption(m.to_string());
    if bytes.len() < HEADER_LEN {
        return Err(corrupt("file shorter than header"));
    }
    if &bytes[..8] != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version > FORMAT_VERSION {
        return Err(StoreError::UnsupportedVersion { found: version, supported: FORMAT_VERSION });
    }
    let len = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let crc = u32::from_le_bytes(bytes[20..24].try_into().unwrap());
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != len {
        return Err(StoreError::Corruption(format!(
            "payload is {} bytes, header says {len}",
            payload.len()
        )));
    }
    if crc32fast::hash(payload) != crc {
        return Err(corrupt("checksum mismatch"));
    }

    let mut rest = payload;
    let counters: Vec<u64> = take_line(&mut rest)?
        .strip_prefix("counters ")
        .ok_or_else(|| corrupt("missing counters"))?
        .split(' ')
        .map(|n| n.parse().map_err(|_| corrupt("bad counter")))
        .collect::<Result<_, _>>()?;
    let [next_entry, next_link, next_domain, commits] = counters[..] else {
        return Err(corrupt("expected 4 counters"));
    };
    let registry_len: usize = take_line(&mut rest)?
        .strip_prefix("registry ")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| corrupt("missing registry length"))?;
    if rest.len() < registry_len {
        return Err(corrupt("registry section truncated"));
    }
    let registry_text = std::str::from_utf8(&rest[..registry_len])
        .map_err(|_| corrupt("registry is not UTF-8"))?;
    let registry = load_paradigm_specs(&[SpecSource::new("<store>", registry_text)])
        .map_err(|e| StoreError::Corruption(format!("registry: {e}")))?;
    let mut snapshot = interchange::import(&rest[registry_len..], Arc::new(registry))
        .map_err(|e| StoreError::Corruption(e.to_string()))?;
    let c = &mut snapshot.counters;
    *c = Counters {
        next_entry: next_entry.max(c.next_entry),
        next_link: next_link.max(c.next_link),
        next_domain: next_domain.max(c.next_domain),
        commits,
    };
    Ok(snapshot)
}

pub(crate) fn write_atomic(path: &Path, snapshot: &Snapshot) -> Result<(), StoreError> {
    write_bytes_atomic(path, &encode(snapshot))
}

pub(crate) fn write_bytes_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        if let Ok(d) = File::open(dir) {
            let _ = d.sync_all();
        }
    }
    Ok(())
}
