//! Little-endian primitives shared by the binary artifact formats.

use std::io::{self, Read, Write};

pub(crate) struct Writer<W: Write>(pub W);

impl<W: Write> Writer<W> {
    pub fn u32(&mut self, v: u32) -> io::Result<()> {
        self.0.write_all(&v.to_le_bytes())
    }

    pub fn u64(&mut self, v: u64) -> io::Result<()> {
        self.0.write_all(&v.to_le_bytes())
    }

    pub fn f64(&mut self, v: f64) -> io::Result<()> {
        self.0.write_all(&v.to_le_bytes())
    }

    pub fn f32s(&mut self, v: &[f32]) -> io::Result<()> {
        v.iter().try_for_each(|x| self.0.write_all(&x.to_le_bytes()))
    }

    pub fn f64s(&mut self, v: &[f64]) -> io::Result<()> {
        v.iter().try_for_each(|&x| self.f64(x))
    }

    pub fn str(&mut self, s: &str) -> io::Result<()> {
        self.u32(s.len() as u32)?;
        self.0.write_all(s.as_bytes())
    }
}

pub(crate) struct Reader<R: Read>(pub R);

impl<R: Read> Reader<R> {
    pub fn bytes<const N: usize>(&mut self) -> io::Result<[u8; N]> {
        let mut b = [0u8; N];
        self.0.read_exact(&mut b)?;
        Ok(b)
    }

    pub fn u32(&mut self) -> io::Result<u32> {
        self.bytes().map(u32::from_le_bytes)
    }

    pub fn u64(&mut self) -> io::Result<u64> {
        self.bytes().map(u64::from_le_bytes)
    }

    pub fn usize(&mut self) -> io::Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| io::Error::new(io::ErrorKind::InvalidData, "length overflows usize"))
    }

    pub fn f64(&mut self) -> io::Result<f64> {
        self.bytes().map(f64::from_le_bytes)
    }

    /// Reads `n` values without trusting `n` for the initial allocation.
    pub fn f32s(&mut self, n: usize) -> io::Result<Vec<f32>> {
        let mut v = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            v.push(f32::from_le_bytes(self.bytes()?));
        }
        Ok(v)
    }

    pub fn f64s(&mut self, n: usize) -> io::Result<Vec<f64>> {
        let mut v = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            v.push(self.f64()?);
        }
        Ok(v)
    }

    pub fn str(&mut self) -> io::Result<String> {
        let len = self.u32()? as usize;
        let mut b = vec![0u8; len.min(1 << 16)];
        if len > b.len() {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "string too long"));
        }
        self.0.read_exact(&mut b)?;
        String::from_utf8(b).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    pub fn at_end(&mut self) -> io::Result<bool> {
        let mut b = [0u8; 1];
        Ok(self.0.read(&mut b)? == 0)
    }
}
