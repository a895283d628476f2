//! Binary files for keystores and node views.
//!
//! Both formats are little-endian. Integer lists are stored as LEB128
//! varints, with sorted lists delta-encoded. The pool and a node's stored
//! values are packed LSB-first.
//!
//! Keystore (`NPKS`): magic, version `u16`, `n u32`, `l u64`, seed (16
//! bytes), RNG algorithm id and scheme text (each a `u16` length + UTF-8),
//! pool size `u64`, group count,
//! the group table, then the pool bits. The part layout is recomputed from
//! the scheme and seed on load, and the whole store is re-validated.
//!
//! Node view (`NPKV`): magic, version, `node u32`, `n u32`, `l u64`, scheme
//! text, one 16-byte seed per part, membership count, memberships, the
//! pool index of every location, then the stored values by location. The root seed is not included,
//! so a view never reveals bits its node does not hold.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::BitString;
use crate::predistribution::keystore::{part_seeds, plan_parts, GenerateOptions, Group, KeyStore, NodeView};
use crate::predistribution::{NodeSet, SchemeSpec};
use crate::seed::{Seed, RNG_ALGORITHM};

pub const KEYSTORE_MAGIC: &[u8; 4] = b"NPKS";
pub const NODE_VIEW_MAGIC: &[u8; 4] = b"NPKV";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn bytes(&mut self, b: &[u8]) {
        self.0.extend_from_slice(b);
    }

    fn u16(&mut self, v: u16) {
        self.bytes(&v.to_le_bytes());
    }

    fn u32(&mut self, v: u32) {
        self.bytes(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }

    fn varint(&mut self, mut v: u64) {
        loop {
            let byte = (v & 0x7f) as u8;
            v >>= 7;
            if v == 0 {
                self.0.push(byte);
                return;
            }
            self.0.push(byte | 0x80);
        }
    }

    fn sorted(&mut self, values: impl ExactSizeIterator<Item = u64>) {
        self.varint(values.len() as u64);
        let mut prev = 0;
        for v in values {
            self.varint(v - prev);
            prev = v;
        }
    }

    fn text(&mut self, s: &str) {
        self.u16(s.len() as u16);
        self.bytes(s.as_bytes());
    }

    fn groups(&mut self, groups: &[Group]) {
        self.varint(groups.len() as u64);
        for g in groups {
            self.sorted(g.nodes.as_slice().iter().map(|&i| u64::from(i)));
            self.sorted(g.bits.iter().map(|&b| b as u64));
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn truncated() -> Error {
    Error::Format("unexpected end of file".into())
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(k).filter(|&e| e <= self.buf.len()).ok_or_else(truncated)?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const K: usize>(&mut self) -> Result<[u8; K]> {
        Ok(self.take(K)?.try_into().expect("length checked"))
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn varint(&mut self) -> Result<u64> {
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let byte = self.take(1)?[0];
            v |= u64::from(byte & 0x7f) << shift;
            if byte & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err(Error::Format("varint longer than 64 bits".into()))
    }

    /// Count prefix, capped by the bytes left so a corrupt count cannot
    /// trigger a huge allocation.
    fn count(&mut self) -> Result<usize> {
        let c = self.varint()?;
        if c > (self.buf.len() - self.pos) as u64 {
            return Err(truncated());
        }
        Ok(c as usize)
    }

    fn sorted(&mut self) -> Result<Vec<u64>> {
        let c = self.count()?;
        let mut out = Vec::with_capacity(c);
        let mut prev = 0u64;
        for k in 0..c {
            let d = self.varint()?;
            if k > 0 && d == 0 {
                return Err(Error::Format("sorted list has a repeated entry".into()));
            }
            prev = prev.checked_add(d).ok_or_else(|| Error::Format("list entry overflows".into()))?;
            out.push(prev);
        }
        Ok(out)
    }

    fn text(&mut self) -> Result<String> {
        let len = self.u16()? as usize;
        String::from_utf8(self.take(len)?.to_vec()).map_err(|e| Error::Format(e.to_string()))
    }

    fn seed(&mut self) -> Result<Seed> {
        Ok(Seed::from_bytes(self.array()?))
    }

    fn header(&mut self, magic: &[u8; 4]) -> Result<()> {
        if self.take(4)? != magic {
            return Err(Error::Format(format!(
                "not a {} file",
                String::from_utf8_lossy(magic)
            )));
        }
        let version = self.u16()?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {version}")));
        }
        Ok(())
    }

    fn groups(&mut self) -> Result<Vec<Group>> {
        let c = self.count()?;
        let mut out = Vec::with_capacity(c);
        for _ in 0..c {
            let nodes = self
                .sorted()?
                .into_iter()
                .map(|v| u32::try_from(v).map_err(|_| Error::Format("node id overflows".into())))
                .collect::<Result<Vec<_>>>()?;
            let bits = self.sorted()?.into_iter().map(|b| b as usize).collect();
            out.push(Group {
                nodes: NodeSet::from_sorted(nodes),
                bits,
            });
        }
        Ok(out)
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

impl KeyStore {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.bytes(KEYSTORE_MAGIC);
        w.u16(FORMAT_VERSION);
        w.u32(self.n());
        w.u64(self.l());
        w.bytes(self.seed().as_bytes());
        w.text(RNG_ALGORITHM);
        w.text(&self.scheme().to_string());
        w.u64(self.u() as u64);
        w.groups(self.groups());
        w.bytes(&self.pool().to_bytes());
        w.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<KeyStore> {
        let mut r = Reader::new(bytes);
        r.header(KEYSTORE_MAGIC)?;
        let n = r.u32()?;
        let l = r.u64()?;
        let seed = r.seed()?;
        let algorithm = r.text()?;
        if algorithm != RNG_ALGORITHM {
            return Err(Error::Format(format!("unsupported RNG algorithm {algorithm:?}")));
        }
        let scheme: SchemeSpec = r.text()?.parse()?;
        let u = r.u64()? as usize;
        let groups = r.groups()?;
        let pool = BitString::from_bytes(r.take(u.div_ceil(8))?, u)?;
        r.finish()?;
        let parts = plan_parts(&scheme, n, l, &part_seeds(&scheme, seed), GenerateOptions::default())?;
        let map = groups.into_iter().map(|g| (g.nodes, g.bits)).collect();
        KeyStore::assemble(n, l, scheme, seed, parts, map, pool)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<KeyStore> {
        KeyStore::from_bytes(&std::fs::read(path)?)
    }
}

impl NodeView {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.bytes(NODE_VIEW_MAGIC);
        w.u16(FORMAT_VERSION);
        w.u32(self.node());
        w.u32(self.n());
        w.u64(self.l());
        w.text(&self.scheme().to_string());
        for part in self.parts() {
            w.bytes(part.seed.as_bytes());
        }
        w.groups(self.memberships());
        w.varint(self.locations().len() as u64);
        for &b in self.locations() {
            w.varint(b as u64);
        }
        w.bytes(&self.values().to_bytes());
        w.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<NodeView> {
        let mut r = Reader::new(bytes);
        r.header(NODE_VIEW_MAGIC)?;
        let node = r.u32()?;
        let n = r.u32()?;
        let l = r.u64()?;
        let scheme: SchemeSpec = r.text()?.parse()?;
        let seeds = (0..scheme.components().len())
            .map(|_| r.seed())
            .collect::<Result<Vec<_>>>()?;
        let memberships = r.groups()?;
        let count = r.count()?;
        if count as u64 > l {
            return Err(Error::Format(format!("{count} stored values exceed budget {l}")));
        }
        let locations = (0..count)
            .map(|_| r.varint().map(|b| b as usize))
            .collect::<Result<Vec<_>>>()?;
        let values = BitString::from_bytes(r.take(count.div_ceil(8))?, count)?;
        r.finish()?;
        let parts = plan_parts(&scheme, n, l, &seeds, GenerateOptions::default())?;
        let view = NodeView::assemble(node, n, l, scheme, parts, memberships, values)?;
        if view.locations() != locations {
            return Err(Error::Format(format!(
                "stored locations of node {node} disagree with the scheme layout"
            )));
        }
        Ok(view)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<NodeView> {
        NodeView::from_bytes(&std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predistribution::{generate, SecretMaterial};
    use crate::rates::rational;

    fn stores() -> Vec<KeyStore> {
        [
            ("comb:a=3", 5, 60),
            ("pairwise", 4, 9),
            ("random:p=1/3", 5, 40),
            ("sampled:a=3,m=4", 6, 20),
            ("hybrid:lambda=1/2:same|random:p=1/2", 4, 30),
        ]
        .into_iter()
        .map(|(s, n, l)| generate(&s.parse().unwrap(), n, l, Seed::from(5)).unwrap())
        .collect()
    }

    #[test]
    fn keystore_roundtrip() {
        for ks in stores() {
            let bytes = ks.to_bytes();
            let back = KeyStore::from_bytes(&bytes).unwrap();
            assert_eq!(back.pool(), ks.pool());
            assert_eq!(back.groups(), ks.groups());
            assert_eq!(back.to_bytes(), bytes);
        }
    }

    #[test]
    fn node_view_roundtrip() {
        for ks in stores() {
            for i in 1..=ks.n() {
                let view = ks.node_view(i).unwrap();
                let back = NodeView::from_bytes(&view.to_bytes()).unwrap();
                assert_eq!(back.values(), view.values());
                assert_eq!(back.locations(), view.locations());
                let j = if i == 1 { 2 } else { 1 };
                assert_eq!(
                    back.common_values(i, j).unwrap(),
                    ks.common_values(i, j).unwrap()
                );
            }
        }
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let ks = generate(&SchemeSpec::Combinational { a: 3 }, 4, 6, Seed::from(1)).unwrap();
        let bytes = ks.to_bytes();
        assert!(KeyStore::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(KeyStore::from_bytes(&extra).is_err());
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(KeyStore::from_bytes(&magic).is_err());
        assert!(NodeView::from_bytes(&bytes).is_err());
        let mut bad = generate(&SchemeSpec::Random { p: rational(1, 2) }, 3, 4, Seed::from(1))
            .unwrap()
            .to_bytes();
        let last = bad.len() - 1;
        bad[last] ^= 0xff;
        // flipping pool bits alone keeps the file valid
        assert!(KeyStore::from_bytes(&bad).is_ok());
    }
}
