/// A fixed-width item that streams can spill to disk.
///
/// Encoding is little-endian and exactly `WIDTH` bytes long.
pub trait Record: Copy + Send + 'static {
    const WIDTH: usize;

    fn write_to(&self, out: &mut [u8]);
    fn read_from(buf: &[u8]) -> Self;
}

impl Record for u8 {
    const WIDTH: usize = 1;

    fn write_to(&self, out: &mut [u8]) {
        out[0] = *self;
    }

    fn read_from(buf: &[u8]) -> Self {
        buf[0]
    }
}

impl Record for u32 {
    const WIDTH: usize = 4;

    fn write_to(&self, out: &mut [u8]) {
        out[..4].copy_from_slice(&self.to_le_bytes());
    }

    fn read_from(buf: &[u8]) -> Self {
        u32::from_le_bytes(buf[..4].try_into().unwrap())
    }
}

impl Record for u64 {
    const WIDTH: usize = 8;

    fn write_to(&self, out: &mut [u8]) {
        out[..8].copy_from_slice(&self.to_le_bytes());
    }

    fn read_from(buf: &[u8]) -> Self {
        u64::from_le_bytes(buf[..8].try_into().unwrap())
    }
}

impl<A: Record, B: Record> Record for (A, B) {
    const WIDTH: usize = A::WIDTH + B::WIDTH;

    fn write_to(&self, out: &mut [u8]) {
        self.0.write_to(&mut out[..A::WIDTH]);
        self.1.write_to(&mut out[A::WIDTH..Self::WIDTH]);
    }

    fn read_from(buf: &[u8]) -> Self {
        (A::read_from(&buf[..A::WIDTH]), B::read_from(&buf[A::WIDTH..Self::WIDTH]))
    }
}

impl<A: Record, B: Record, C: Record> Record for (A, B, C) {
    const WIDTH: usize = A::WIDTH + B::WIDTH + C::WIDTH;

    fn write_to(&self, out: &mut [u8]) {
        let (x, rest) = out.split_at_mut(A::WIDTH);
        let (y, z) = rest.split_at_mut(B::WIDTH);
        self.0.write_to(x);
        self.1.write_to(y);
        self.2.write_to(z);
    }

    fn read_from(buf: &[u8]) -> Self {
        let (x, rest) = buf.split_at(A::WIDTH);
        let (y, z) = rest.split_at(B::WIDTH);
        (A::read_from(x), B::read_from(y), C::read_from(z))
    }
}

impl<A: Record, B: Record, C: Record, D: Record> Record for (A, B, C, D) {
    const WIDTH: usize = A::WIDTH + B::WIDTH + C::WIDTH + D::WIDTH;

    fn write_to(&self, out: &mut [u8]) {
        let (w, rest) = out.split_at_mut(A::WIDTH);
        let (x, rest) = rest.split_at_mut(B::WIDTH);
        let (y, z) = rest.split_at_mut(C::WIDTH);
        self.0.write_to(w);
        self.1.write_to(x);
        self.2.write_to(y);
        self.3.write_to(z);
    }

    fn read_from(buf: &[u8]) -> Self {
        let (w, rest) = buf.split_at(A::WIDTH);
        let (x, rest) = rest.split_at(B::WIDTH);
        let (y, z) = rest.split_at(C::WIDTH);
        (A::read_from(w), B::read_from(x), C::read_from(y), D::read_from(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roundtrip<T: Record + PartialEq + std::fmt::Debug>(v: T) {
        let mut buf = vec![0u8; T::WIDTH];
        v.write_to(&mut buf);
        assert_eq!(T::read_from(&buf), v);
    }

    #[test]
    fn widths() {
        assert_eq!(<(u64, u64, u8)>::WIDTH, 17);
        assert_eq!(<(u64, u32, u64, u8)>::WIDTH, 21);
    }

    proptest! {
        #[test]
        fn tuples_roundtrip(a: u64, b: u32, c: u8, d: u64) {
            roundtrip((a, b));
            roundtrip((a, c, d));
            roundtrip((a, b, c, d));
        }
    }
}
