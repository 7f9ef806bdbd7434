//! Per-frame CSV ingestion: one header row, one row per frame, every cell
//! numeric.

use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::features::{
    assemble_frame_vector, heart_rate_vector, FeatureSchema, IntensityConvention, RatioGuard, RoiChannelMeans,
    RoiId, HR_DIM,
};

/// A parsed numeric CSV.
#[derive(Debug, Clone)]
pub struct NumericCsv {
    pub header: Vec<String>,
    pub rows: Array2<f64>,
}

/// Reads a numeric CSV. `expected_cols` is checked against the header
/// before any row is parsed; a non-finite cell is reported by video, frame
/// and column name.
pub fn read_numeric_csv(path: &Path, video: &str, expected_cols: usize) -> Result<NumericCsv> {
    let file = path.display().to_string();
    let parse_err = |line: u64, column: usize, message: String| Error::ParseError {
        file: file.clone(),
        line: line as usize,
        column,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => parse_err(1, 1, format!("{other:?}")),
        })?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| parse_err(1, 1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.len() != expected_cols {
        return Err(Error::SchemaMismatch {
            expected: expected_cols,
            actual: header.len(),
            detail: format!(" (video {video}, file {file})"),
        });
    }
    let mut data = Vec::new();
    let mut n_rows = 0;
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                return Err(parse_err(line, 1, e.to_string()));
            }
        }
        let line = record.position().map_or(0, |p| p.line());
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(line, j + 1, format!("`{cell}` is not a number")))?;
            if !v.is_finite() {
                return Err(Error::NonFiniteValue {
                    video: video.to_string(),
                    frame: n_rows,
                    column: header[j].clone(),
                });
            }
            data.push(v);
        }
        n_rows += 1;
    }
    if n_rows == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let rows = Array2::from_shape_vec((n_rows, expected_cols), data).expect("row widths checked by the reader");
    Ok(NumericCsv { header, rows })
}

/// Header of an ROI-means CSV: `RC_r,RC_g,RC_b,LC_r,...,CE_b`.
pub fn roi_means_header() -> Vec<String> {
    RoiId::ALL
        .iter()
        .flat_map(|r| ["r", "g", "b"].map(|c| format!("{}_{c}", r.abbrev())))
        .collect()
}

/// Heart-rate blocks from a 21-column ROI-means table.
///
/// Returns the 63-wide rows and how many ratio slots fell back because their
/// denominator was below the guard threshold.
pub fn heart_rate_from_roi_means(
    means: &Array2<f64>,
    video: &str,
    convention: IntensityConvention,
) -> Result<(Array2<f64>, usize)> {
    if means.ncols() != 3 * RoiId::ALL.len() {
        return Err(Error::DimensionMismatch {
            context: format!("ROI means of video {video}"),
            expected: 3 * RoiId::ALL.len(),
            actual: means.ncols(),
        });
    }
    let guard = RatioGuard::for_convention(convention);
    let max = convention.max_value();
    let mut out = Array2::zeros((means.nrows(), HR_DIM));
    let mut degenerate = 0;
    for (f, row) in means.outer_iter().enumerate() {
        let mut rois = [RoiChannelMeans::splat(0.0); 7];
        for (k, roi) in RoiId::ALL.iter().enumerate() {
            let c = [row[3 * k], row[3 * k + 1], row[3 * k + 2]];
            if let Some(&bad) = c.iter().find(|v| **v > max) {
                return Err(Error::InvalidIntensity {
                    roi: format!("{} (video {video}, frame {f})", roi.abbrev()),
                    value: bad,
                });
            }
            rois[k] = RoiChannelMeans::new(c[0], c[1], c[2]);
        }
        let hr = heart_rate_vector(&rois, guard).map_err(|e| match e {
            Error::InvalidIntensity { roi, value } => Error::InvalidIntensity {
                roi: format!("{roi} (video {video}, frame {f})"),
                value,
            },
            e => e,
        })?;
        degenerate += hr.degenerate;
        out.row_mut(f).assign(&ndarray::ArrayView1::from(&hr.values[..]));
    }
    Ok((out, degenerate))
}

/// Fuses landmark rows (every non-heart-rate category) with computed
/// heart-rate rows.
pub fn fuse_rows(landmarks: &Array2<f64>, hr: &Array2<f64>, schema: &FeatureSchema, video: &str) -> Result<Array2<f64>> {
    if landmarks.nrows() != hr.nrows() {
        return Err(Error::DimensionMismatch {
            context: format!("frame count of video {video} (features vs ROI means)"),
            expected: landmarks.nrows(),
            actual: hr.nrows(),
        });
    }
    let mut out = Array2::zeros((landmarks.nrows(), schema.total_dim()));
    for (f, (l, h)) in landmarks.outer_iter().zip(hr.outer_iter()).enumerate() {
        let l = l.to_vec();
        let h = h.to_vec();
        let fused = assemble_frame_vector(&l, &h, schema)?;
        out.row_mut(f).assign(&ndarray::ArrayView1::from(&fused));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        std::fs::File::create(&p).unwrap().write_all(text.as_bytes()).unwrap();
        p
    }

    #[test]
    fn reads_numeric_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "a.csv", "x,y\n1,2\n3.5, -4\n");
        let t = read_numeric_csv(&p, "a", 2).unwrap();
        assert_eq!(t.header, ["x", "y"]);
        assert_eq!(t.rows, ndarray::array![[1.0, 2.0], [3.5, -4.0]]);
    }

    #[test]
    fn nan_cell_names_location() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "a.csv", "x,y\n1,2\n3,NaN\n");
        match read_numeric_csv(&p, "vid9", 2) {
            Err(Error::NonFiniteValue { video, frame, column }) => {
                assert_eq!((video.as_str(), frame, column.as_str()), ("vid9", 1, "y"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_cell_is_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "a.csv", "x,y\n1,2\n3,abc\n");
        match read_numeric_csv(&p, "v", 2) {
            Err(Error::ParseError { line, column, .. }) => assert_eq!((line, column), (3, 2)),
            other => panic!("{other:?}"),
        }
        let p = write(dir.path(), "b.csv", "x,y\n1,2\n3\n");
        assert!(matches!(read_numeric_csv(&p, "v", 2), Err(Error::ParseError { line: 3, .. })));
    }

    #[test]
    fn width_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "a.csv", "x,y,z\n1,2,3\n");
        match read_numeric_csv(&p, "v", 2) {
            Err(Error::SchemaMismatch { expected, actual, .. }) => assert_eq!((expected, actual), (2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn roi_means_to_heart_rate() {
        let means = Array2::from_elem((2, 21), 100.0);
        let (hr, deg) = heart_rate_from_roi_means(&means, "v", IntensityConvention::EightBit).unwrap();
        assert_eq!(deg, 0);
        assert_eq!(hr.row(0)[3], 1.0);
        assert!((hr.row(1)[8] - 1.0 / 3.0).abs() < 1e-15);
        let too_bright = Array2::from_elem((1, 21), 2.0);
        assert!(matches!(
            heart_rate_from_roi_means(&too_bright, "v", IntensityConvention::Unit),
            Err(Error::InvalidIntensity { .. })
        ));
        assert_eq!(roi_means_header()[..4], ["RC_r", "RC_g", "RC_b", "LC_r"]);
    }
}
