//! Binary decoder checkpoints.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic      8 bytes  "MGCNCKPT"
//! version    u32
//! fingerprint u64     hierarchy digest the parameters were trained on
//! config     u32 length + UTF-8 key = value snapshot
//! sections   u32 count, then per section:
//!              u32 name length + UTF-8 name, u64 offset, u64 length
//!              (offset/length counted in f64 values)
//! blob       u64 value count + that many f64
//! ```
//!
//! Loading validates the magic, version, and hierarchy fingerprint before
//! touching parameters, rebuilds the parameter shapes from the config
//! snapshot, and checks the section table against them, so a checkpoint can
//! never be applied to a decoder it was not trained for.

use std::io::{Read, Write};

use crate::error::{CoreError, Result};
use crate::kv::KvMap;
use crate::sampling::MeshHierarchy;

use super::decoder::{init_decoder, DecoderConfig, DecoderParams};

const MAGIC: &[u8; 8] = b"MGCNCKPT";
const VERSION: u32 = 1;

pub fn save_checkpoint(
    params: &DecoderParams,
    config: &DecoderConfig,
    hierarchy: &MeshHierarchy,
    sink: &mut dyn Write,
) -> Result<()> {
    sink.write_all(MAGIC)?;
    sink.write_all(&VERSION.to_le_bytes())?;
    sink.write_all(&hierarchy.fingerprint().to_le_bytes())?;

    let snapshot = config.to_kv().to_text();
    sink.write_all(&(snapshot.len() as u32).to_le_bytes())?;
    sink.write_all(snapshot.as_bytes())?;

    let sections = params.sections();
    sink.write_all(&(sections.len() as u32).to_le_bytes())?;
    let mut offset = 0u64;
    for (name, len) in &sections {
        sink.write_all(&(name.len() as u32).to_le_bytes())?;
        sink.write_all(name.as_bytes())?;
        sink.write_all(&offset.to_le_bytes())?;
        sink.write_all(&(*len as u64).to_le_bytes())?;
        offset += *len as u64;
    }

    let flat = params.flatten();
    sink.write_all(&(flat.len() as u64).to_le_bytes())?;
    for v in &flat {
        sink.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_bytes(source: &mut dyn Read, n: usize, what: &str) -> Result<Vec<u8>> {
    let mut buf = vec![0u8; n];
    source.read_exact(&mut buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            CoreError::invalid(format!("checkpoint truncated while reading {what}"))
        } else {
            CoreError::Io(e)
        }
    })?;
    Ok(buf)
}

fn read_u32(source: &mut dyn Read, what: &str) -> Result<u32> {
    let b = read_bytes(source, 4, what)?;
    Ok(u32::from_le_bytes(b.try_into().expect("4 bytes")))
}

fn read_u64(source: &mut dyn Read, what: &str) -> Result<u64> {
    let b = read_bytes(source, 8, what)?;
    Ok(u64::from_le_bytes(b.try_into().expect("8 bytes")))
}

pub fn load_checkpoint(
    source: &mut dyn Read,
    hierarchy: &MeshHierarchy,
) -> Result<(DecoderConfig, DecoderParams)> {
    let magic = read_bytes(source, 8, "magic")?;
    if magic != MAGIC {
        return Err(CoreError::invalid("not a decoder checkpoint (bad magic)"));
    }
    let version = read_u32(source, "version")?;
    if version != VERSION {
        return Err(CoreError::invalid(format!(
            "checkpoint version {version} is not supported (expected {VERSION})"
        )));
    }
    let fingerprint = read_u64(source, "fingerprint")?;
    let expected = hierarchy.fingerprint();
    if fingerprint != expected {
        return Err(CoreError::invalid(format!(
            "checkpoint was trained on a different hierarchy \
             (fingerprint {fingerprint:016x}, expected {expected:016x})"
        )));
    }

    let config_len = read_u32(source, "config length")? as usize;
    let config_text = String::from_utf8(read_bytes(source, config_len, "config snapshot")?)
        .map_err(|_| CoreError::invalid("config snapshot is not UTF-8"))?;
    let config = DecoderConfig::from_kv(&KvMap::parse_str(&config_text)?)?;

    let mut params = init_decoder(&config, hierarchy)?;
    let expected_sections = params.sections();

    let section_count = read_u32(source, "section count")? as usize;
    if section_count != expected_sections.len() {
        return Err(CoreError::invalid(format!(
            "checkpoint has {section_count} sections, decoder expects {}",
            expected_sections.len()
        )));
    }
    let mut offset = 0u64;
    for (name, len) in &expected_sections {
        let name_len = read_u32(source, "section name length")? as usize;
        if name_len > 4096 {
            return Err(CoreError::invalid("unreasonable section name length"));
        }
        let got_name = String::from_utf8(read_bytes(source, name_len, "section name")?)
            .map_err(|_| CoreError::invalid("section name is not UTF-8"))?;
        let got_offset = read_u64(source, "section offset")?;
        let got_len = read_u64(source, "section length")?;
        if got_name != *name || got_offset != offset || got_len != *len as u64 {
            return Err(CoreError::invalid(format!(
                "section {got_name:?} (offset {got_offset}, length {got_len}) \
                 does not match expected {name:?} (offset {offset}, length {len})"
            )));
        }
        offset += *len as u64;
    }

    let value_count = read_u64(source, "value count")? as usize;
    if value_count as u64 != offset {
        return Err(CoreError::invalid(format!(
            "checkpoint blob holds {value_count} values, sections describe {offset}"
        )));
    }
    let blob = read_bytes(source, value_count * 8, "parameter blob")?;
    let flat: Vec<f64> = blob
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    params.assign_from_flat(&flat)?;
    Ok((config, params))
}

pub fn save_checkpoint_file(
    params: &DecoderParams,
    config: &DecoderConfig,
    hierarchy: &MeshHierarchy,
    path: &std::path::Path,
) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    save_checkpoint(params, config, hierarchy, &mut w)
}

pub fn load_checkpoint_file(
    path: &std::path::Path,
    hierarchy: &MeshHierarchy,
) -> Result<(DecoderConfig, DecoderParams)> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    load_checkpoint(&mut r, hierarchy)
}
