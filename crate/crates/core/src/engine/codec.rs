//! Binary encoding of task batches for spill files.
//!
//! A file is a `u32` record count followed by records. Each record holds
//! `seq: u64`, `root: u32`, `iteration: u8`, then `S`, `ext` and the
//! subgraph's id list as length-prefixed `u32` lists, then one
//! length-prefixed local adjacency list per subgraph vertex. Everything is
//! little-endian.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::task::Task;
use crate::error::EngineError;
use crate::graph::{Graph, Subgraph, VertexId};

fn write_list<W: Write>(w: &mut W, xs: &[VertexId]) -> io::Result<()> {
    w.write_u32::<LittleEndian>(xs.len() as u32)?;
    for &x in xs {
        w.write_u32::<LittleEndian>(x)?;
    }
    Ok(())
}

fn read_list<R: Read>(r: &mut R) -> io::Result<Vec<VertexId>> {
    let n = r.read_u32::<LittleEndian>()? as usize;
    let mut out = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        out.push(r.read_u32::<LittleEndian>()?);
    }
    Ok(out)
}

pub fn encode_task<W: Write>(w: &mut W, t: &Task) -> io::Result<()> {
    w.write_u64::<LittleEndian>(t.seq)?;
    w.write_u32::<LittleEndian>(t.root)?;
    w.write_u8(t.iteration)?;
    write_list(w, &t.s)?;
    write_list(w, &t.ext)?;
    write_list(w, &t.g.ids)?;
    for v in t.g.graph.vertices() {
        write_list(w, t.g.graph.neighbors(v))?;
    }
    Ok(())
}

pub fn decode_task<R: Read>(r: &mut R) -> io::Result<Task> {
    let seq = r.read_u64::<LittleEndian>()?;
    let root = r.read_u32::<LittleEndian>()?;
    let iteration = r.read_u8()?;
    let s = read_list(r)?;
    let ext = read_list(r)?;
    let ids = read_list(r)?;
    let mut adj = Vec::with_capacity(ids.len());
    for _ in 0..ids.len() {
        let nbrs = read_list(r)?;
        if nbrs.iter().any(|&u| u as usize >= ids.len()) || !nbrs.is_sorted() {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "bad adjacency list"));
        }
        adj.push(nbrs);
    }
    Ok(Task { seq, root, iteration, s, ext, g: Subgraph { ids, graph: Graph::from_sorted_adjacency(&adj) } })
}

pub fn write_batch(path: &Path, tasks: &[Task]) -> Result<(), EngineError> {
    let spill = |source| EngineError::Spill { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(File::create(path).map_err(spill)?);
    w.write_u32::<LittleEndian>(tasks.len() as u32).map_err(spill)?;
    for t in tasks {
        encode_task(&mut w, t).map_err(spill)?;
    }
    w.flush().map_err(spill)
}

pub fn read_batch(path: &Path) -> Result<Vec<Task>, EngineError> {
    let corrupt = |e: io::Error| EngineError::Corrupt { path: path.to_path_buf(), msg: e.to_string() };
    let file = File::open(path).map_err(|source| EngineError::Spill { path: path.to_path_buf(), source })?;
    let mut r = BufReader::new(file);
    let n = r.read_u32::<LittleEndian>().map_err(corrupt)?;
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        out.push(decode_task(&mut r).map_err(corrupt)?);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(corrupt)? != 0 {
        return Err(EngineError::Corrupt { path: path.to_path_buf(), msg: "trailing bytes".into() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Task {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).0;
        Task {
            seq: 9,
            root: 4,
            iteration: 3,
            s: vec![4, 7],
            ext: vec![8],
            g: Subgraph { ids: vec![4, 7, 8], graph: g },
        }
    }

    #[test]
    fn round_trip_one() {
        let mut buf = Vec::new();
        encode_task(&mut buf, &sample()).unwrap();
        assert_eq!(decode_task(&mut buf.as_slice()).unwrap(), sample());
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.bin");
        write_batch(&path, &[sample(), sample()]).unwrap();
        assert_eq!(read_batch(&path).unwrap().len(), 2);
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        let err = read_batch(&path).unwrap_err();
        assert!(matches!(err, EngineError::Corrupt { .. }));
        assert!(err.to_string().contains("b.bin"));
    }
}
