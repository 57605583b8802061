//! Dense finite probability tables over named axes.
//!
//! A [`ProbTable`] stores one nonnegative weight per joint index, laid out in
//! row-major order of its declared axis list (the last axis varies fastest).
//! All tables are distributions: their weights sum to one within the
//! normalization slack of the [`Tolerance`] they were validated against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric slack used when comparing and validating probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Largest deviation at which two probabilities count as equal.
    pub eq: f64,
    /// Largest allowed |sum - 1| for a normalized table; also the mass below
    /// which an event is treated as null when conditioning.
    pub norm: f64,
}

impl Tolerance {
    pub const DEFAULT_EQ: f64 = 1e-9;
    pub const DEFAULT_NORM: f64 = 1e-9;

    pub fn new(eq: f64, norm: f64) -> Result<Self> {
        for (name, v) in [("eq", eq), ("norm", norm)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Tolerance(format!(
                    "{name} tolerance must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(Self { eq, norm })
    }

    /// Same slack for equality and normalization.
    pub fn uniform(tol: f64) -> Result<Self> {
        Self::new(tol, tol)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eq: Self::DEFAULT_EQ,
            norm: Self::DEFAULT_NORM,
        }
    }
}

/// A named axis and its ordered alphabet of symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub symbols: Vec<String>,
}

impl Axis {
    pub fn new<N, S, I>(name: N, symbols: I) -> Self
    where
        N: Into<String>,
        S: Into<String>,
        I: IntoIterator<Item = S>,
    {
        Self {
            name: name.into(),
            symbols: symbols.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn position(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }
}

/// Result of [`table_close`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Closeness {
    pub close: bool,
    /// Sup-norm distance between the two tables.
    pub deviation: f64,
    /// Lowest flat index attaining `deviation`.
    pub witness: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbTable {
    axes: Vec<Axis>,
    values: Vec<f64>,
}

fn validate_axes(axes: &[Axis]) -> Result<()> {
    if axes.is_empty() {
        return Err(Error::Axis("a table needs at least one axis".into()));
    }
    for (i, axis) in axes.iter().enumerate() {
        if axis.is_empty() {
            return Err(Error::Axis(format!(
                "axis '{}' has an empty alphabet",
                axis.name
            )));
        }
        if axes[..i].iter().any(|a| a.name == axis.name) {
            return Err(Error::Axis(format!("duplicate axis name '{}'", axis.name)));
        }
        for (j, s) in axis.symbols.iter().enumerate() {
            if axis.symbols[..j].contains(s) {
                return Err(Error::Axis(format!(
                    "axis '{}' repeats the symbol '{s}'",
                    axis.name
                )));
            }
        }
    }
    Ok(())
}

impl ProbTable {
    /// Validates shape, nonnegativity and normalization (within `tol.norm`).
    pub fn new(axes: Vec<Axis>, values: Vec<f64>, tol: &Tolerance) -> Result<Self> {
        validate_axes(&axes)?;
        let size: usize = axes.iter().map(Axis::len).product();
        if values.len() != size {
            return Err(Error::Table(format!(
                "expected {size} weights for the declared axes, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Table(format!(
                "weight {} at index {i} is not a nonnegative finite number",
                values[i]
            )));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tol.norm {
            return Err(Error::Table(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self { axes, values })
    }

    /// Builds a table from weights already known to be a distribution
    /// (products and sums of validated tables).
    pub(crate) fn from_parts(axes: Vec<Axis>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), axes.iter().map(Axis::len).product::<usize>());
        Self { axes, values }
    }

    pub fn uniform(axes: Vec<Axis>) -> Result<Self> {
        validate_axes(&axes)?;
        let size: usize = axes.iter().map(Axis::len).product();
        Ok(Self::from_parts(axes, vec![1.0 / size as f64; size]))
    }

    /// A table putting all mass on the joint index `at`.
    pub fn point_mass(axes: Vec<Axis>, at: &[usize]) -> Result<Self> {
        validate_axes(&axes)?;
        let mut t = Self::from_parts(
            axes.clone(),
            vec![0.0; axes.iter().map(Axis::len).product()],
        );
        let flat = t.flat_index(at)?;
        t.values[flat] = 1.0;
        Ok(t)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::Axis(format!("unknown axis '{name}'")))
    }

    pub fn flat_index(&self, at: &[usize]) -> Result<usize> {
        if at.len() != self.axes.len() {
            return Err(Error::Axis(format!(
                "index has {} coordinates, table has {} axes",
                at.len(),
                self.axes.len()
            )));
        }
        let mut flat = 0;
        for (axis, &i) in self.axes.iter().zip(at) {
            if i >= axis.len() {
                return Err(Error::Axis(format!(
                    "coordinate {i} out of range for axis '{}'",
                    axis.name
                )));
            }
            flat = flat * axis.len() + i;
        }
        Ok(flat)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            idx[k] = flat % axis.len();
            flat /= axis.len();
        }
        idx
    }

    /// Weight at a joint index; panics when the index is out of range.
    pub fn get(&self, at: &[usize]) -> f64 {
        self.values[self.flat_index(at).expect("index within table shape")]
    }

    /// Human-readable `name=symbol` pairs for a flat index.
    pub fn describe(&self, flat: usize) -> Vec<(String, String)> {
        self.multi_index(flat)
            .into_iter()
            .zip(&self.axes)
            .map(|(i, a)| (a.name.clone(), a.symbols[i].clone()))
            .collect()
    }

    /// Sums out every axis not named in `keep`. The result keeps the
    /// surviving axes in their original declared order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<ProbTable> {
        let mut kept = vec![false; self.axes.len()];
        for name in keep {
            kept[self.axis_index(name)?] = true;
        }
        Ok(self.marginalize_mask(&kept))
    }

    fn marginalize_mask(&self, kept: &[bool]) -> ProbTable {
        let axes: Vec<Axis> = self
            .axes
            .iter()
            .zip(kept)
            .filter(|(_, k)| **k)
            .map(|(a, _)| a.clone())
            .collect();
        if axes.len() == self.axes.len() {
            return self.clone();
        }
        let size: usize = axes.iter().map(Axis::len).product();
        let mut values = vec![0.0; size];
        for (flat, &v) in self.values.iter().enumerate() {
            let idx = self.multi_index(flat);
            let mut out = 0;
            for (k, axis) in self.axes.iter().enumerate() {
                if kept[k] {
                    out = out * axis.len() + idx[k];
                }
            }
            values[out] += v;
        }
        // Marginalizing everything away leaves a scalar; keep it as a
        // one-symbol axis so the result is still a table.
        if axes.is_empty() {
            return ProbTable::from_parts(vec![Axis::new("_", ["*"])], values);
        }
        ProbTable::from_parts(axes, values)
    }

    /// Conditions on `on = value` and drops the axis `on`.
    pub fn condition(&self, on: &str, value: &str, tol: &Tolerance) -> Result<ProbTable> {
        let k = self.axis_index(on)?;
        let v = self.axes[k]
            .position(value)
            .ok_or_else(|| Error::Axis(format!("axis '{on}' has no symbol '{value}'")))?;
        self.condition_at(k, v, tol)
    }

    /// Positional form of [`ProbTable::condition`].
    pub fn condition_at(&self, axis: usize, value: usize, tol: &Tolerance) -> Result<ProbTable> {
        if axis >= self.axes.len() || value >= self.axes[axis].len() {
            return Err(Error::Axis(format!(
                "no symbol {value} on axis {axis} of this table"
            )));
        }
        let mut mass = 0.0;
        let mut slice = Vec::with_capacity(self.values.len() / self.axes[axis].len());
        for (flat, &w) in self.values.iter().enumerate() {
            if self.multi_index(flat)[axis] == value {
                mass += w;
                slice.push(w);
            }
        }
        if mass <= tol.norm {
            return Err(Error::ZeroCondition {
                axis: self.axes[axis].name.clone(),
                value: self.axes[axis].symbols[value].clone(),
                mass,
            });
        }
        let mut axes = self.axes.clone();
        axes.remove(axis);
        if axes.is_empty() {
            return Ok(ProbTable::from_parts(
                vec![Axis::new("_", ["*"])],
                vec![1.0],
            ));
        }
        Ok(ProbTable::from_parts(
            axes,
            slice.into_iter().map(|w| w / mass).collect(),
        ))
    }

    /// Outer product of two tables with disjoint axis names.
    pub fn product(&self, other: &ProbTable) -> Result<ProbTable> {
        let mut axes = self.axes.clone();
        axes.extend(other.axes.iter().cloned());
        validate_axes(&axes)?;
        let values = self
            .values
            .iter()
            .flat_map(|x| other.values.iter().map(move |y| x * y))
            .collect();
        Ok(ProbTable::from_parts(axes, values))
    }

    /// Convex combination `Σ w_i t_i` of same-shaped tables.
    pub fn mixture(parts: &[(f64, &ProbTable)]) -> Result<ProbTable> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::Table("empty mixture".into()))?;
        let mut values = vec![0.0; first.len()];
        for (w, t) in parts {
            if t.axes != first.axes {
                return Err(Error::Axis("mixture components have different axes".into()));
            }
            for (acc, v) in values.iter_mut().zip(&t.values) {
                *acc += w * v;
            }
        }
        Ok(ProbTable::from_parts(first.axes.clone(), values))
    }

    /// Same weights under renamed symbols; the alphabets must keep their sizes.
    pub fn relabeled(&self, axes: Vec<Axis>) -> Result<ProbTable> {
        if axes.iter().map(Axis::len).collect::<Vec<_>>() != self.shape() {
            return Err(Error::Axis(
                "relabeling must preserve the table shape".into(),
            ));
        }
        validate_axes(&axes)?;
        Ok(ProbTable::from_parts(axes, self.values.clone()))
    }
}

/// Sup-norm comparison of two tables over identical axes.
pub fn table_close(t1: &ProbTable, t2: &ProbTable, tol: &Tolerance) -> Result<Closeness> {
    if t1.axes != t2.axes {
        return Err(Error::Axis(
            "tables are declared over different axes".into(),
        ));
    }
    let (witness, deviation) = sup_deviation(&t1.values, &t2.values);
    Ok(Closeness {
        close: deviation <= tol.eq,
        deviation,
        witness,
    })
}

/// Largest |x - y| and the lowest index attaining it.
pub(crate) fn sup_deviation(xs: &[f64], ys: &[f64]) -> (usize, f64) {
    let mut best = (0, 0.0);
    for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
        let d = (x - y).abs();
        if d > best.1 {
            best = (i, d);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm() -> Vec<String> {
        vec!["+1".into(), "-1".into()]
    }

    fn two_axis(values: Vec<f64>) -> ProbTable {
        ProbTable::new(
            vec![Axis::new("A", pm()), Axis::new("B", pm())],
            values,
            &Tolerance::default(),
        )
        .unwrap()
    }

    #[test]
    fn uniform_marginal_is_uniform() {
        let t = two_axis(vec![0.25; 4]);
        let m = t.marginalize(&["A"]).unwrap();
        assert_eq!(m.values(), &[0.5, 0.5]);
        assert_eq!(m.axes().len(), 1);
    }

    #[test]
    fn pr_box_cell_marginal() {
        // P(A,B) = 1/2 [A xor B = 1]: mass on (+,-) and (-,+)
        let t = two_axis(vec![0.0, 0.5, 0.5, 0.0]);
        assert_eq!(t.marginalize(&["A"]).unwrap().values(), &[0.5, 0.5]);
        assert_eq!(t.marginalize(&["B"]).unwrap().values(), &[0.5, 0.5]);
    }

    #[test]
    fn keep_all_axes_is_identity() {
        let t = two_axis(vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(t.marginalize(&["B", "A"]).unwrap(), t);
    }

    #[test]
    fn marginalize_unknown_axis() {
        let t = two_axis(vec![0.25; 4]);
        assert!(matches!(t.marginalize(&["C"]), Err(Error::Axis(_))));
    }

    #[test]
    fn condition_product_leaves_other_marginal() {
        let a = ProbTable::new(
            vec![Axis::new("A", pm())],
            vec![0.3, 0.7],
            &Tolerance::default(),
        )
        .unwrap();
        let b = ProbTable::new(
            vec![Axis::new("B", pm())],
            vec![0.6, 0.4],
            &Tolerance::default(),
        )
        .unwrap();
        let t = a.product(&b).unwrap();
        let tol = Tolerance::default();
        for v in ["+1", "-1"] {
            let c = t.condition("B", v, &tol).unwrap();
            assert!(table_close(&c, &a, &tol).unwrap().close);
            let c = t.condition("A", v, &tol).unwrap();
            assert!(table_close(&c, &b, &tol).unwrap().close);
        }
    }

    #[test]
    fn condition_perfect_correlation() {
        let t = two_axis(vec![0.5, 0.0, 0.0, 0.5]);
        let c = t.condition("B", "+1", &Tolerance::default()).unwrap();
        assert_eq!(c.values(), &[1.0, 0.0]);
        assert_eq!(c.axes()[0].name, "A");
    }

    #[test]
    fn condition_on_null_event() {
        let t = two_axis(vec![0.5, 0.5, 0.0, 0.0]);
        let err = t.condition("A", "-1", &Tolerance::default()).unwrap_err();
        assert!(matches!(err, Error::ZeroCondition { .. }));
    }

    #[test]
    fn close_to_itself() {
        let t = two_axis(vec![0.1, 0.2, 0.3, 0.4]);
        let c = table_close(&t, &t, &Tolerance::default()).unwrap();
        assert_eq!((c.close, c.deviation, c.witness), (true, 0.0, 0));
    }

    #[test]
    fn close_reports_deviation_and_witness() {
        let ax = || vec![Axis::new("A", pm())];
        let tol = Tolerance::default();
        let t1 = ProbTable::new(ax(), vec![0.5, 0.5], &tol).unwrap();
        let t2 = ProbTable::new(ax(), vec![0.6, 0.4], &tol).unwrap();
        let c = table_close(&t1, &t2, &tol).unwrap();
        assert!(!c.close);
        assert!((c.deviation - 0.1).abs() < 1e-15);
        assert_eq!(c.witness, 0);

        let t3 = ProbTable::new(ax(), vec![0.5 + 1e-12, 0.5 - 1e-12], &tol).unwrap();
        assert!(table_close(&t1, &t3, &tol).unwrap().close);
    }

    #[test]
    fn close_axis_mismatch() {
        let tol = Tolerance::default();
        let t1 = ProbTable::new(vec![Axis::new("A", pm())], vec![0.5, 0.5], &tol).unwrap();
        let t2 = ProbTable::new(vec![Axis::new("B", pm())], vec![0.5, 0.5], &tol).unwrap();
        assert!(matches!(table_close(&t1, &t2, &tol), Err(Error::Axis(_))));
    }

    #[test]
    fn rejects_bad_tables() {
        let tol = Tolerance::default();
        let ax = || vec![Axis::new("A", pm())];
        assert!(ProbTable::new(ax(), vec![0.5, 0.4], &tol).is_err());
        assert!(ProbTable::new(ax(), vec![1.5, -0.5], &tol).is_err());
        assert!(ProbTable::new(ax(), vec![1.0], &tol).is_err());
        assert!(ProbTable::new(vec![Axis::new("A", Vec::<String>::new())], vec![], &tol).is_err());
        assert!(ProbTable::new(
            vec![Axis::new("A", ["x"]), Axis::new("A", ["y"])],
            vec![1.0],
            &tol
        )
        .is_err());
        assert!(Tolerance::new(-1.0, 0.0).is_err());
        assert!(Tolerance::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn index_round_trip() {
        let t = ProbTable::uniform(vec![
            Axis::new("x", ["a", "b", "c"]),
            Axis::new("y", ["0", "1"]),
            Axis::new("z", ["p", "q", "r", "s"]),
        ])
        .unwrap();
        for flat in 0..t.len() {
            assert_eq!(t.flat_index(&t.multi_index(flat)).unwrap(), flat);
        }
        assert_eq!(t.flat_index(&[1, 0, 2]).unwrap(), 8 + 2);
    }
}
