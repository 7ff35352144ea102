//! Raw series ingestion and the return / normalization transforms applied
//! before building a distance landscape.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A raw level series `S(t)`, optionally carrying time labels.
#[derive(Clone, Debug, PartialEq)]
pub struct RawSeries<F> {
    labels: Option<Vec<String>>,
    values: Vec<F>,
    source: String,
}

/// Where a series came from and which transforms produced it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub transforms: Vec<String>,
}

/// A finite, uniformly sampled series of length at least two.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries<F> {
    values: Vec<F>,
    meta: Provenance,
}

fn check_finite<F: Scalar>(values: &[F]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn check_len(len: usize) -> Result<()> {
    if len < 2 {
        return Err(Error::TooShort {
            required: 2,
            actual: len,
        });
    }
    Ok(())
}

/// Labels compare numerically when every one parses as a number,
/// lexicographically otherwise (ISO dates sort correctly either way).
fn check_label_order(labels: &[String]) -> Result<()> {
    let numeric: Option<Vec<f64>> = labels.iter().map(|l| l.trim().parse().ok()).collect();
    let bad = match numeric {
        Some(nums) => nums.windows(2).position(|w| !(w[0] < w[1])),
        None => labels.windows(2).position(|w| w[0] >= w[1]),
    };
    match bad {
        Some(i) => Err(Error::UnorderedLabels {
            index: i + 1,
            label: labels[i + 1].clone(),
        }),
        None => Ok(()),
    }
}

impl<F: Scalar> RawSeries<F> {
    pub fn new(values: Vec<F>) -> Result<Self> {
        check_len(values.len())?;
        check_finite(&values)?;
        Ok(Self {
            labels: None,
            values,
            source: "memory".into(),
        })
    }

    pub fn with_labels(labels: Vec<String>, values: Vec<F>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: values.len(),
            });
        }
        check_label_order(&labels)?;
        let mut s = Self::new(values)?;
        s.labels = Some(labels);
        Ok(s)
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The raw values as a series, without any transform.
    pub fn into_series(self) -> TimeSeries<F> {
        TimeSeries {
            values: self.values,
            meta: Provenance {
                source: self.source,
                transforms: Vec::new(),
            },
        }
    }
}

impl<F: Scalar> TimeSeries<F> {
    pub fn new(values: Vec<F>) -> Result<Self> {
        Self::with_meta(values, Provenance::default())
    }

    pub fn with_meta(values: Vec<F>, meta: Provenance) -> Result<Self> {
        check_len(values.len())?;
        check_finite(&values)?;
        Ok(Self { values, meta })
    }

    pub fn from_f64(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| F::of(v)).collect())
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn into_values(self) -> Vec<F> {
        self.values
    }

    pub fn meta(&self) -> &Provenance {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> F {
        mean(&self.values)
    }

    /// Sample (n-1) standard deviation.
    pub fn sample_std(&self) -> F {
        sample_std(&self.values)
    }

    pub fn rms(&self) -> F {
        let n = F::of_usize(self.values.len());
        (self.values.iter().map(|&v| v * v).sum::<F>() / n).sqrt()
    }

    /// Same series reversed in time.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        self.derive(values, "reverse")
    }

    /// Contiguous sub-series `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        let end = start
            .checked_add(len)
            .filter(|&e| e <= self.values.len())
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "slice [{start}, {start}+{len}) outside series of length {}",
                    self.values.len()
                ))
            })?;
        check_len(len)?;
        Ok(self.derive(self.values[start..end].to_vec(), &format!("slice({start},{len})")))
    }

    pub(crate) fn derive(&self, values: Vec<F>, step: &str) -> Self {
        let mut meta = self.meta.clone();
        meta.transforms.push(step.to_string());
        Self { values, meta }
    }

    /// Divides by the root mean square of the values (not the centered
    /// standard deviation).
    pub fn normalize_rms(&self) -> Result<Self> {
        let rms = self.rms();
        if !(rms > F::zero()) {
            return Err(Error::DegenerateSeries("root mean square"));
        }
        let out = self.values.iter().map(|&v| v / rms).collect();
        Ok(self.derive(out, "normalize_rms"))
    }

    /// Zero mean, unit sample standard deviation.
    pub fn standardize(&self) -> Result<Self> {
        let m = self.mean();
        let s = self.sample_std();
        if !(s > F::zero()) {
            return Err(Error::DegenerateSeries("standard deviation"));
        }
        let out = self.values.iter().map(|&v| (v - m) / s).collect();
        Ok(self.derive(out, "standardize"))
    }
}

pub(crate) fn mean<F: Scalar>(xs: &[F]) -> F {
    xs.iter().copied().sum::<F>() / F::of_usize(xs.len())
}

pub(crate) fn sample_std<F: Scalar>(xs: &[F]) -> F {
    if xs.len() < 2 {
        return F::zero();
    }
    let m = mean(xs);
    let ss: F = xs.iter().map(|&v| (v - m) * (v - m)).sum();
    (ss / F::of_usize(xs.len() - 1)).sqrt()
}

/// Continuously compounded returns `r(t) = ln S(t+1) - ln S(t)`.
pub fn log_returns<F: Scalar>(raw: &RawSeries<F>) -> Result<TimeSeries<F>> {
    check_len(raw.len())?;
    if let Some(index) = raw.values.iter().position(|&v| !(v > F::zero())) {
        return Err(Error::NonPositiveValue {
            index,
            value: raw.values[index].f64(),
        });
    }
    let out: Vec<F> = raw.values.windows(2).map(|w| w[1].ln() - w[0].ln()).collect();
    // A length-2 input yields a single return, still a valid (if short) series.
    check_finite(&out)?;
    Ok(TimeSeries {
        values: out,
        meta: Provenance {
            source: raw.source.clone(),
            transforms: vec!["log_returns".into()],
        },
    })
}

pub fn normalize_rms<F: Scalar>(series: &TimeSeries<F>) -> Result<TimeSeries<F>> {
    series.normalize_rms()
}

pub fn standardize<F: Scalar>(series: &TimeSeries<F>) -> Result<TimeSeries<F>> {
    series.standardize()
}

/// Restricts two labelled series to the labels they share, preserving order.
/// Unlabelled series are aligned by truncating both to the shorter length.
pub fn align<F: Scalar>(a: &RawSeries<F>, b: &RawSeries<F>) -> Result<(RawSeries<F>, RawSeries<F>)> {
    match (a.labels(), b.labels()) {
        (Some(la), Some(lb)) => {
            let pos_b: HashMap<&str, usize> =
                lb.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
            let mut labels = Vec::new();
            let (mut va, mut vb) = (Vec::new(), Vec::new());
            for (i, l) in la.iter().enumerate() {
                if let Some(&j) = pos_b.get(l.as_str()) {
                    labels.push(l.clone());
                    va.push(a.values[i]);
                    vb.push(b.values[j]);
                }
            }
            let ra = RawSeries::with_labels(labels.clone(), va)?.with_source(a.source.clone());
            let rb = RawSeries::with_labels(labels, vb)?.with_source(b.source.clone());
            Ok((ra, rb))
        }
        _ => {
            let n = a.len().min(b.len());
            let ra = RawSeries::new(a.values[..n].to_vec())?.with_source(a.source.clone());
            let rb = RawSeries::new(b.values[..n].to_vec())?.with_source(b.source.clone());
            Ok((ra, rb))
        }
    }
}

/// Reads a `label,value` CSV (header required). With `column`, the named
/// column supplies the values; otherwise the second column does.
pub fn read_csv<F: Scalar, R: Read>(reader: R, column: Option<&str>) -> Result<RawSeries<F>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let value_col = match column {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?,
        None if headers.len() >= 2 => 1,
        None => return Err(Error::MissingColumn("<second column>".into())),
    };
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let record = i + 1;
        let raw = rec.get(value_col).unwrap_or("");
        if raw.is_empty() || raw.eq_ignore_ascii_case("na") || raw.eq_ignore_ascii_case("nan") {
            return Err(Error::MissingValue { record });
        }
        let v: f64 = raw.parse().map_err(|_| {
            Error::InvalidParameter(format!("record {record}: `{raw}` is not a number"))
        })?;
        labels.push(rec.get(0).unwrap_or("").to_string());
        values.push(F::of(v));
    }
    RawSeries::with_labels(labels, values)
}

pub fn read_csv_path<F: Scalar>(path: &Path, column: Option<&str>) -> Result<RawSeries<F>> {
    let file = std::fs::File::open(path)?;
    Ok(read_csv(file, column)?.with_source(path.display().to_string()))
}

/// Writes `label,value` rows; labels default to the 0-based index.
pub fn write_csv<F: Scalar, W: std::io::Write>(
    writer: W,
    labels: Option<&[String]>,
    values: &[F],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["label", "value"])?;
    for (i, v) in values.iter().enumerate() {
        let label = labels.map_or_else(|| i.to_string(), |l| l[i].clone());
        w.write_record([label, format!("{}", v.f64())])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{E, LN_2};

    fn close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn log_returns_examples() {
        let r = log_returns(&RawSeries::new(vec![1.0, E, E]).unwrap()).unwrap();
        close(r.values(), &[1.0, 0.0], 1e-15);

        let r = log_returns(&RawSeries::new(vec![5.0; 4]).unwrap()).unwrap();
        close(r.values(), &[0.0; 3], 0.0);

        let r = log_returns(&RawSeries::new(vec![1.0, 2.0, 4.0, 8.0]).unwrap()).unwrap();
        close(r.values(), &[LN_2; 3], 1e-15);
    }

    #[test]
    fn log_returns_rejects_non_positive() {
        let raw = RawSeries::new(vec![1.0, 0.0, 2.0]).unwrap();
        assert!(matches!(
            log_returns(&raw),
            Err(Error::NonPositiveValue { index: 1, .. })
        ));
        assert!(matches!(
            RawSeries::new(vec![1.0f64]),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn normalize_rms_examples() {
        let s = TimeSeries::new(vec![1.0, -1.0, 1.0, -1.0]).unwrap();
        close(s.normalize_rms().unwrap().values(), &[1.0, -1.0, 1.0, -1.0], 1e-15);
        let s = TimeSeries::new(vec![2.0, -2.0]).unwrap();
        close(s.normalize_rms().unwrap().values(), &[1.0, -1.0], 1e-15);
        let s = TimeSeries::new(vec![3.0, 4.0]).unwrap();
        let r = 12.5f64.sqrt();
        close(s.normalize_rms().unwrap().values(), &[3.0 / r, 4.0 / r], 1e-15);
        let z = TimeSeries::new(vec![0.0, 0.0]).unwrap();
        assert!(matches!(z.normalize_rms(), Err(Error::DegenerateSeries(_))));
    }

    #[test]
    fn standardize_examples() {
        let s = TimeSeries::new(vec![0.0, 2.0]).unwrap().standardize().unwrap();
        close(s.values(), &[-0.5f64.sqrt(), 0.5f64.sqrt()], 1e-15);
        let s = TimeSeries::new(vec![1.0, 2.0, 3.0]).unwrap().standardize().unwrap();
        close(s.values(), &[-1.0, 0.0, 1.0], 1e-15);
        let c = TimeSeries::new(vec![4.0, 4.0, 4.0]).unwrap();
        assert!(matches!(c.standardize(), Err(Error::DegenerateSeries(_))));
    }

    #[test]
    fn labels_must_be_ordered() {
        let ok = RawSeries::with_labels(vec!["1".into(), "2".into(), "10".into()], vec![1.0, 2.0, 3.0]);
        assert!(ok.is_ok());
        let bad = RawSeries::with_labels(vec!["2001-02".into(), "2001-01".into()], vec![1.0, 2.0]);
        assert!(matches!(bad, Err(Error::UnorderedLabels { index: 1, .. })));
    }

    #[test]
    fn csv_roundtrip_and_missing_values() {
        let text = "label,value,other\n2000-01,1.5,9\n2000-02,2.5,8\n2000-03,3.5,7\n";
        let raw: RawSeries<f64> = read_csv(text.as_bytes(), None).unwrap();
        assert_eq!(raw.values(), &[1.5, 2.5, 3.5]);
        assert_eq!(raw.labels().unwrap()[2], "2000-03");
        let other: RawSeries<f64> = read_csv(text.as_bytes(), Some("other")).unwrap();
        assert_eq!(other.values(), &[9.0, 8.0, 7.0]);
        assert!(matches!(
            read_csv::<f64, _>(text.as_bytes(), Some("nope")),
            Err(Error::MissingColumn(_))
        ));

        let missing = "label,value\na,1\nb,\nc,3\n";
        assert!(matches!(
            read_csv::<f64, _>(missing.as_bytes(), None),
            Err(Error::MissingValue { record: 2 })
        ));

        let mut buf = Vec::new();
        write_csv(&mut buf, raw.labels(), raw.values()).unwrap();
        let back: RawSeries<f64> = read_csv(buf.as_slice(), None).unwrap();
        assert_eq!(back.values(), raw.values());
    }

    #[test]
    fn align_keeps_shared_labels() {
        let a = RawSeries::with_labels(
            vec!["1".into(), "2".into(), "3".into(), "4".into()],
            vec![1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        let b = RawSeries::with_labels(vec!["2".into(), "3".into(), "4".into(), "5".into()], vec![20.0, 30.0, 40.0, 50.0])
            .unwrap();
        let (ra, rb) = align(&a, &b).unwrap();
        assert_eq!(ra.values(), &[2.0, 3.0, 4.0]);
        assert_eq!(rb.values(), &[20.0, 30.0, 40.0]);
    }

    proptest! {
        #[test]
        fn standardize_is_idempotent(v in prop::collection::vec(-1e3f64..1e3, 3..60)) {
            let s = TimeSeries::new(v).unwrap();
            if let Ok(once) = s.standardize() {
                prop_assert!(once.mean().abs() <= 1e-9);
                prop_assert!((once.sample_std() - 1.0).abs() <= 1e-9);
                let twice = once.standardize().unwrap();
                for (a, b) in once.values().iter().zip(twice.values()) {
                    prop_assert!((a - b).abs() <= 1e-9);
                }
            }
        }

        #[test]
        fn log_returns_scale_free(v in prop::collection::vec(1e-3f64..1e3, 2..40), c in 1e-3f64..1e3) {
            let a = log_returns(&RawSeries::new(v.clone()).unwrap()).unwrap();
            let b = log_returns(&RawSeries::new(v.iter().map(|x| x * c).collect()).unwrap()).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn rms_normalized_has_unit_rms(v in prop::collection::vec(-1e3f64..1e3, 2..60)) {
            let s = TimeSeries::new(v).unwrap();
            if let Ok(n) = s.normalize_rms() {
                prop_assert!((n.rms() - 1.0).abs() <= 1e-9);
            }
        }
    }
}
