use std::io::{Read, Write};
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng;

/// Reads a headed CSV. Rows whose `label_column` equals `positive_label`
/// become `+1`; the one other label value present becomes `-1`.
pub fn read_csv<R: Read>(reader: R, label_column: &str, positive_label: &str, source: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::Data(format!("{source}: empty file")));
    }
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::Data(format!("{source}: no column named `{label_column}`")))?;
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.to_string())
        .collect();
    if names.is_empty() {
        return Err(Error::Data(format!("{source}: no feature columns")));
    }

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut negative: Option<String> = None;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(Error::Data(format!(
                "{source} line {line}: expected {} fields, found {}",
                headers.len(),
                record.len()
            )));
        }
        for (j, field) in record.iter().enumerate() {
            if field.is_empty() {
                return Err(Error::Data(format!(
                    "{source} line {line}: missing value in column `{}`",
                    &headers[j]
                )));
            }
            if j == label_idx {
                continue;
            }
            let v: f64 = field.parse().map_err(|_| {
                Error::Data(format!(
                    "{source} line {line}: non-numeric value `{field}` in column `{}`",
                    &headers[j]
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Data(format!(
                    "{source} line {line}: non-finite value in column `{}`",
                    &headers[j]
                )));
            }
            values.push(v);
        }
        let lab = &record[label_idx];
        if lab == positive_label {
            labels.push(1);
        } else {
            match &negative {
                None => {
                    negative = Some(lab.to_string());
                    labels.push(-1);
                }
                Some(n) if n == lab => labels.push(-1),
                Some(n) => {
                    return Err(Error::Data(format!(
                        "{source} line {line}: unknown label value `{lab}` (classes are `{positive_label}` and `{n}`)"
                    )))
                }
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::Data(format!("{source}: empty file")));
    }
    let x = Matrix::from_vec(labels.len(), names.len(), values)?;
    Dataset::new(x, labels, source)?.with_feature_names(names)
}

pub fn load_csv(path: &Path, label_column: &str, positive_label: &str) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    read_csv(file, label_column, positive_label, &path.display().to_string())
}

/// Writes features (named from the dataset or `x0, x1, …`) followed by a
/// `label` column holding `1` / `-1`.
pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = match &dataset.feature_names {
        Some(n) => n.clone(),
        None => (0..dataset.d()).map(|j| format!("x{j}")).collect(),
    };
    header.push("label".into());
    w.write_record(&header)?;
    for i in 0..dataset.n() {
        let mut rec: Vec<String> = dataset.point(i).iter().map(|v| v.to_string()).collect();
        rec.push(dataset.labels()[i].to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    write_csv(dataset, std::fs::File::create(path)?)
}

/// `n_per_class` standard-normal points around `+c·1` (label `+1`) followed by
/// as many around `−c·1` (label `-1`).
pub fn gen_two_gaussians(n_per_class: usize, d: usize, center_scale: f64, seed: u64) -> Result<Dataset> {
    if n_per_class == 0 || d == 0 {
        return Err(Error::invalid("n_per_class and d must be positive"));
    }
    if !center_scale.is_finite() {
        return Err(Error::invalid("center_scale must be finite"));
    }
    let mut g = rng::stream(seed, 0);
    let mut values = Vec::with_capacity(2 * n_per_class * d);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    for label in [1i8, -1] {
        let c = f64::from(label) * center_scale;
        for _ in 0..n_per_class {
            for _ in 0..d {
                let e: f64 = StandardNormal.sample(&mut g);
                values.push(c + e);
            }
            labels.push(label);
        }
    }
    let x = Matrix::from_vec(2 * n_per_class, d, values)?;
    Dataset::new(x, labels, format!("two_gaussians(n_per_class={n_per_class}, d={d}, c={center_scale}, seed={seed})"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_row_fixture() {
        let text = "a,b,cls\n1.5,2,yes\n-3,0.25,no\n4,5e-1,yes\n";
        let ds = read_csv(text.as_bytes(), "cls", "yes", "fixture").unwrap();
        assert_eq!(ds.x().as_slice(), &[1.5, 2.0, -3.0, 0.25, 4.0, 0.5]);
        assert_eq!(ds.labels(), &[1, -1, 1]);
        assert_eq!(ds.feature_names.as_deref().unwrap(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn third_class_is_named() {
        let text = "a,cls\n1,yes\n2,no\n3,maybe\n";
        let err = read_csv(text.as_bytes(), "cls", "yes", "f").unwrap_err().to_string();
        assert!(err.contains("maybe") && err.contains("line 4"), "{err}");
    }

    #[test]
    fn missing_and_non_numeric() {
        let err = read_csv("a,cls\n,yes\n".as_bytes(), "cls", "yes", "f").unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("missing"), "{err}");
        let err = read_csv("a,cls\nzz,yes\n".as_bytes(), "cls", "yes", "f").unwrap_err().to_string();
        assert!(err.contains("non-numeric"), "{err}");
        assert!(read_csv("".as_bytes(), "cls", "yes", "f").is_err());
        assert!(read_csv("a,cls\n".as_bytes(), "cls", "yes", "f").is_err());
    }

    #[test]
    fn two_gaussians_shape_and_determinism() {
        let a = gen_two_gaussians(140, 20, 0.5, 3).unwrap();
        assert_eq!(a.n(), 280);
        assert_eq!(a.count_label(1), 140);
        assert_eq!(a, gen_two_gaussians(140, 20, 0.5, 3).unwrap());
        let (pos, neg) = a.centroids().unwrap();
        let tol = 4.0 / 140f64.sqrt();
        assert!(pos.iter().all(|m| (m - 0.5).abs() <= tol));
        assert!(neg.iter().all(|m| (m + 0.5).abs() <= tol));
    }
}
