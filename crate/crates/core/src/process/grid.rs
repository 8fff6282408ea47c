use crate::scalar::Real;
use crate::sphere::{chord, SpherePoint};

const MAX_RES: usize = 64;

/// Uniform cube grid over `[-1, 1]^3` bucketing vertices by position.
///
/// A query returns a superset of the vertices within a fixed chord
/// distance of the probe point; callers still evaluate the kernel.
#[derive(Debug, Clone)]
pub(crate) struct SphereGrid<T> {
    res: usize,
    inv_cell: T,
    reach: T,
    cells: Vec<Vec<u32>>,
}

impl<T: Real> SphereGrid<T> {
    /// Grid for kernels vanishing beyond angle `radius`.
    pub fn for_radius(radius: T) -> Self {
        let reach = chord(radius) * (T::one() + T::lit(1e-9)) + T::lit(1e-12);
        let want = (T::lit(4.0) / reach).ceil().to_usize().unwrap_or(MAX_RES);
        let res = want.clamp(1, MAX_RES);
        Self {
            res,
            inv_cell: T::from_usize(res).unwrap() / T::lit(2.0),
            reach,
            cells: vec![Vec::new(); res * res * res],
        }
    }

    #[inline]
    fn coord(&self, c: T) -> usize {
        let i = ((c + T::one()) * self.inv_cell).floor();
        if i <= T::zero() {
            0
        } else {
            i.to_usize().unwrap_or(self.res - 1).min(self.res - 1)
        }
    }

    pub fn insert(&mut self, v: usize, p: &SpherePoint<T>) {
        let [x, y, z] = p.coords();
        let idx = (self.coord(x) * self.res + self.coord(y)) * self.res + self.coord(z);
        self.cells[idx].push(v as u32);
    }

    pub fn for_each_candidate(&self, p: &SpherePoint<T>, mut f: impl FnMut(usize)) {
        let c = p.coords();
        let lo: [usize; 3] = std::array::from_fn(|i| self.coord(c[i] - self.reach));
        let hi: [usize; 3] = std::array::from_fn(|i| self.coord(c[i] + self.reach));
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                let base = (i * self.res + j) * self.res;
                for cell in &self.cells[base + lo[2]..=base + hi[2]] {
                    for &v in cell {
                        f(v as usize);
                    }
                }
            }
        }
    }
}
