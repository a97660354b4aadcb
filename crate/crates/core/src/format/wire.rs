//! Low-level TLV writer and reader.
//!
//! A body is a sequence of fields `tag (1) || length (4, BE) || value`. Inside
//! a value: scalars are 32 octets, elements and attribute strings carry a
//! 16-bit length prefix, lists a 16-bit count.

use crate::group::Group;
use crate::policy::{is_valid_attribute, AccessMatrix};
use crate::scheme::{AttributeMap, CiphertextRow};

use super::FormatError;

pub struct Writer<'g, G: Group> {
    group: &'g G,
    buf: Vec<u8>,
}

impl<'g, G: Group> Writer<'g, G> {
    pub fn new(group: &'g G, buf: Vec<u8>) -> Self {
        Writer { group, buf }
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn field(&mut self, tag: u8, body: impl FnOnce(&mut Self)) {
        self.buf.push(tag);
        let at = self.buf.len();
        self.buf.extend_from_slice(&[0; 4]);
        body(self);
        let len = u32::try_from(self.buf.len() - at - 4).expect("field under 4 GiB");
        self.buf[at..at + 4].copy_from_slice(&len.to_be_bytes());
    }

    pub fn raw(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    pub fn count(&mut self, n: usize) {
        let n = u16::try_from(n).expect("list length fits in 16 bits");
        self.buf.extend_from_slice(&n.to_be_bytes());
    }

    fn prefixed(&mut self, bytes: &[u8]) {
        self.count(bytes.len());
        self.buf.extend_from_slice(bytes);
    }

    pub fn scalar(&mut self, s: &G::Scalar) {
        let bytes = self.group.scalar_to_bytes(s);
        self.buf.extend_from_slice(&bytes);
    }

    pub fn source(&mut self, x: &G::Source) {
        let bytes = self.group.source_to_bytes(x);
        self.prefixed(&bytes);
    }

    pub fn target(&mut self, x: &G::Target) {
        let bytes = self.group.target_to_bytes(x);
        self.prefixed(&bytes);
    }

    pub fn attr(&mut self, a: &str) {
        self.prefixed(a.as_bytes());
    }

    pub fn source_map(&mut self, map: &AttributeMap<G::Source>) {
        self.count(map.len());
        for (attr, x) in map {
            self.attr(attr);
            self.source(x);
        }
    }

    pub fn rows(&mut self, rows: &[CiphertextRow<G>]) {
        self.count(rows.len());
        for row in rows {
            self.source(&row.c);
            self.source(&row.d);
        }
    }

    /// Row and column counts, row-major entries as scalars, then `rho`.
    pub fn matrix(&mut self, m: &AccessMatrix) {
        self.count(m.row_count());
        self.count(m.column_count());
        for row in m.rows() {
            for &v in row {
                let s = self.group.scalar_from_i64(v);
                self.scalar(&s);
            }
        }
        for label in m.rho() {
            self.attr(label);
        }
    }
}

pub struct Reader<'a, 'g, G: Group> {
    group: &'g G,
    buf: &'a [u8],
    pos: usize,
}

impl<'a, 'g, G: Group> Reader<'a, 'g, G> {
    pub fn new(group: &'g G, buf: &'a [u8]) -> Self {
        Reader { group, buf, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], FormatError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or(FormatError::TruncatedField(what))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub fn byte(&mut self, what: &'static str) -> Result<u8, FormatError> {
        Ok(self.take(1, what)?[0])
    }

    pub fn finish(&self) -> Result<(), FormatError> {
        if self.pos != self.buf.len() {
            return Err(FormatError::TrailingBytes);
        }
        Ok(())
    }

    /// Reads one field, which must carry `tag`, and parses its value
    /// completely with `body`.
    pub fn field<T>(
        &mut self,
        tag: u8,
        what: &'static str,
        body: impl FnOnce(&mut Reader<'a, 'g, G>) -> Result<T, FormatError>,
    ) -> Result<T, FormatError> {
        let found = self.byte(what)?;
        if found != tag {
            return Err(FormatError::UnexpectedTag {
                expected: tag,
                found,
            });
        }
        let len = u32::from_be_bytes(self.take(4, what)?.try_into().expect("4 bytes"));
        let value = self.take(len as usize, what)?;
        let mut inner = Reader::new(self.group, value);
        let out = body(&mut inner)?;
        inner.finish()?;
        Ok(out)
    }

    pub fn count(&mut self, what: &'static str) -> Result<usize, FormatError> {
        let b = self.take(2, what)?;
        Ok(u16::from_be_bytes([b[0], b[1]]) as usize)
    }

    pub fn remaining(&self) -> &'a [u8] {
        &self.buf[self.pos..]
    }

    fn prefixed(&mut self, what: &'static str) -> Result<&'a [u8], FormatError> {
        let n = self.count(what)?;
        self.take(n, what)
    }

    pub fn is_empty(&self) -> bool {
        self.pos == self.buf.len()
    }

    pub fn scalar(&mut self) -> Result<G::Scalar, FormatError> {
        let bytes: &[u8; 32] = self.take(32, "scalar")?.try_into().expect("32 bytes");
        self.group.scalar_from_bytes(bytes).map_err(FormatError::InvalidElement)
    }

    pub fn source(&mut self) -> Result<G::Source, FormatError> {
        let bytes = self.prefixed("source element")?;
        self.group.source_from_bytes(bytes).map_err(FormatError::InvalidElement)
    }

    pub fn target(&mut self) -> Result<G::Target, FormatError> {
        let bytes = self.prefixed("target element")?;
        self.group.target_from_bytes(bytes).map_err(FormatError::InvalidElement)
    }

    pub fn attr(&mut self) -> Result<String, FormatError> {
        let bytes = self.prefixed("attribute")?;
        let s = std::str::from_utf8(bytes)
            .map_err(|_| FormatError::InvalidAttribute(String::from_utf8_lossy(bytes).into()))?;
        if !is_valid_attribute(s) {
            return Err(FormatError::InvalidAttribute(s.to_string()));
        }
        Ok(s.to_string())
    }

    /// Non-empty, strictly increasing by attribute.
    pub fn source_map(&mut self) -> Result<AttributeMap<G::Source>, FormatError> {
        let n = self.count("attribute map")?;
        if n == 0 {
            return Err(FormatError::NonCanonical("empty attribute map"));
        }
        let mut map = AttributeMap::new();
        let mut last: Option<String> = None;
        for _ in 0..n {
            let attr = self.attr()?;
            if last.as_ref().is_some_and(|prev| *prev >= attr) {
                return Err(FormatError::NonCanonical("attribute map order"));
            }
            let x = self.source()?;
            last = Some(attr.clone());
            map.insert(attr, x);
        }
        Ok(map)
    }

    pub fn rows(&mut self) -> Result<Vec<CiphertextRow<G>>, FormatError> {
        let n = self.count("ciphertext rows")?;
        (0..n)
            .map(|_| {
                Ok(CiphertextRow {
                    c: self.source()?,
                    d: self.source()?,
                })
            })
            .collect()
    }

    pub fn matrix(&mut self) -> Result<AccessMatrix, FormatError> {
        let rows = self.count("matrix rows")?;
        let cols = self.count("matrix columns")?;
        let mut entries = Vec::with_capacity(rows);
        for _ in 0..rows {
            let mut row = Vec::with_capacity(cols);
            for _ in 0..cols {
                let s = self.scalar()?;
                row.push(centered(self.group, &s).ok_or(FormatError::NonCanonical("matrix entry"))?);
            }
            entries.push(row);
        }
        let rho = (0..rows).map(|_| self.attr()).collect::<Result<Vec<_>, _>>()?;
        AccessMatrix::new(entries, rho).map_err(FormatError::InvalidMatrix)
    }
}

fn small_value(bytes: &[u8; 32]) -> Option<i64> {
    if bytes[..24].iter().any(|&b| b != 0) {
        return None;
    }
    i64::try_from(u64::from_be_bytes(bytes[24..].try_into().expect("8 bytes"))).ok()
}

/// The representative of `s` with the smallest magnitude, if it fits in i64.
fn centered<G: Group>(group: &G, s: &G::Scalar) -> Option<i64> {
    let pos = small_value(&group.scalar_to_bytes(s));
    let neg = small_value(&group.scalar_to_bytes(&-*s));
    match (pos, neg) {
        (Some(a), Some(b)) if b < a => Some(-b),
        (Some(a), _) => Some(a),
        (None, Some(b)) => Some(-b),
        (None, None) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{MockGroup, PairingGroup, ScalarField};

    #[test]
    fn centered_representatives() {
        let g = MockGroup::new(13, 7).unwrap();
        assert_eq!(centered(&g, &g.scalar(12)), Some(-1));
        assert_eq!(centered(&g, &g.scalar(6)), Some(6));
        assert_eq!(centered(&g, &g.scalar(7)), Some(-6));
        let p = PairingGroup::default();
        assert_eq!(centered(&p, &p.scalar_from_i64(-5)), Some(-5));
        assert_eq!(centered(&p, &p.scalar_from_i64(i64::MAX)), Some(i64::MAX));
        let big = p.inverse(&p.scalar_from_u64(2)).unwrap();
        assert_eq!(centered(&p, &big), None);
    }

    #[test]
    fn field_tags_and_lengths() {
        let g = MockGroup::new(13, 7).unwrap();
        let mut w = Writer::new(&g, Vec::new());
        w.field(3, |w| w.attr("AB"));
        let bytes = w.into_bytes();
        assert_eq!(bytes, vec![3, 0, 0, 0, 4, 0, 2, b'A', b'B']);

        let mut r = Reader::new(&g, &bytes);
        assert_eq!(r.field(3, "x", |r| r.attr()).unwrap(), "AB");
        r.finish().unwrap();

        let mut r = Reader::new(&g, &bytes);
        assert_eq!(
            r.field(4, "x", |r| r.attr()),
            Err(FormatError::UnexpectedTag {
                expected: 4,
                found: 3
            })
        );
        let mut r = Reader::new(&g, &bytes[..7]);
        assert!(matches!(
            r.field(3, "x", |r| r.attr()),
            Err(FormatError::TruncatedField(_))
        ));
    }
}
