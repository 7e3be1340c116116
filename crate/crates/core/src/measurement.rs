//! Indentation and drop-test measurements.
//!
//! Series are exchanged as UTF-8 CSV with the header `force_N,depth_m`, one
//! sample per line and `#` comment lines. Depths are positive magnitudes in
//! meters; the solver's inward (negative) sign convention is applied by the
//! estimator, never here.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

pub const CSV_HEADER: &str = "force_N,depth_m";

/// Fewest samples a series may hold; the regressions need redundancy.
pub const MIN_SAMPLES: usize = 3;

/// Thickness-to-radius ratio above which the shallow-shell assumption is flagged.
pub const SHALLOW_RATIO_WARN: f64 = 0.05;

/// Depths above this are almost certainly not in meters.
pub const SUSPICIOUS_DEPTH_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndentationSample {
    /// Point force in newtons.
    pub force: f64,
    /// Indentation depth magnitude in meters.
    pub depth: f64,
}

impl IndentationSample {
    pub fn new(force: f64, depth: f64) -> Result<Self> {
        ensure(force.is_finite() && force > 0.0, || {
            format!("force must be positive, got {force}")
        })?;
        ensure(depth.is_finite() && depth > 0.0, || {
            format!("depth must be positive, got {depth}")
        })?;
        Ok(Self { force, depth })
    }
}

/// An ordered force/depth sweep on one convex region of an object.
#[derive(Debug, Clone, PartialEq)]
pub struct IndentationSeries {
    samples: Vec<IndentationSample>,
    object_id: String,
    region_radius: f64,
    region_thickness: f64,
}

impl IndentationSeries {
    pub fn new(
        object_id: impl Into<String>,
        samples: Vec<IndentationSample>,
        region_radius: f64,
        region_thickness: f64,
    ) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::InsufficientData(format!(
                "{} sample(s), at least {MIN_SAMPLES} required",
                samples.len()
            )));
        }
        for s in &samples {
            IndentationSample::new(s.force, s.depth)?;
        }
        ensure(region_radius.is_finite() && region_radius > 0.0, || {
            format!("region radius must be positive, got {region_radius}")
        })?;
        ensure(
            region_thickness.is_finite() && region_thickness > 0.0,
            || format!("region thickness must be positive, got {region_thickness}"),
        )?;
        ensure(region_thickness < region_radius, || {
            format!("thickness {region_thickness} m is not smaller than radius {region_radius} m")
        })?;
        let series = Self {
            samples,
            object_id: object_id.into(),
            region_radius,
            region_thickness,
        };
        if let Some(w) = series.shallowness_warning() {
            log::warn!("{w}");
        }
        Ok(series)
    }

    pub fn samples(&self) -> &[IndentationSample] {
        &self.samples
    }

    pub fn object_id(&self) -> &str {
        &self.object_id
    }

    pub fn region_radius(&self) -> f64 {
        self.region_radius
    }

    pub fn region_thickness(&self) -> f64 {
        self.region_thickness
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Set when h/R exceeds [`SHALLOW_RATIO_WARN`].
    pub fn shallowness_warning(&self) -> Option<String> {
        let ratio = self.region_thickness / self.region_radius;
        (ratio > SHALLOW_RATIO_WARN).then(|| {
            format!(
                "{}: thickness/radius = {ratio:.3} exceeds {SHALLOW_RATIO_WARN}; shallow-shell model may be inaccurate",
                self.object_id
            )
        })
    }

    /// Set when any depth looks like it was recorded in millimeters.
    pub fn unit_warning(&self) -> Option<String> {
        let max = self.samples.iter().map(|s| s.depth).fold(0.0, f64::max);
        (max > SUSPICIOUS_DEPTH_M).then(|| {
            format!(
                "{}: maximum depth {max} m is implausibly large; inputs must be SI (meters)",
                self.object_id
            )
        })
    }

    /// Returns a copy with every force multiplied by `factor`.
    pub fn scaled_forces(&self, factor: f64) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .map(|s| IndentationSample::new(s.force * factor, s.depth))
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            self.object_id.clone(),
            samples,
            self.region_radius,
            self.region_thickness,
        )
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# object: {}", self.object_id).unwrap();
        writeln!(out, "{CSV_HEADER}").unwrap();
        for s in &self.samples {
            writeln!(out, "{},{}", s.force, s.depth).unwrap();
        }
        out
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(self.to_csv_string().as_bytes())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

/// Parses the raw sample rows of a series CSV.
pub fn read_samples(reader: impl Read) -> Result<Vec<IndentationSample>> {
    let reader = BufReader::new(reader);
    let mut header_seen = false;
    let mut samples = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.trim_start_matches('\u{feff}').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != CSV_HEADER {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected header `{CSV_HEADER}`, found `{line}`"),
                });
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 2 fields, found {}", fields.len()),
            });
        }
        let parse = |s: &str, what: &str| {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("{what} `{s}` is not a number"),
            })
        };
        let force = parse(fields[0], "force")?;
        let depth = parse(fields[1], "depth")?;
        let sample = IndentationSample::new(force, depth)
            .map_err(|e| Error::Validation(format!("line {lineno}: {e}")))?;
        samples.push(sample);
    }
    if !header_seen {
        return Err(Error::Parse {
            line: 1,
            message: format!("missing header `{CSV_HEADER}`"),
        });
    }
    Ok(samples)
}

/// Loads a series CSV; the object id is taken from the file stem.
pub fn parse_series(
    path: impl AsRef<Path>,
    region_radius: f64,
    region_thickness: f64,
) -> Result<IndentationSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let samples = read_samples(file)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    IndentationSeries::new(id, samples, region_radius, region_thickness)
}

/// Free-fall drop measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropTest {
    /// Release height H in meters.
    pub drop_height: f64,
    /// Apex height after the first bounce in meters.
    pub bounce_height: f64,
}

impl DropTest {
    pub fn new(drop_height: f64, bounce_height: f64) -> Result<Self> {
        let t = Self {
            drop_height,
            bounce_height,
        };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        ensure(
            self.bounce_height.is_finite()
                && self.drop_height.is_finite()
                && self.bounce_height > 0.0
                && self.bounce_height <= self.drop_height,
            || {
                format!(
                    "drop test requires 0 < bounce height <= drop height, got bounce {} and drop {}",
                    self.bounce_height, self.drop_height
                )
            },
        )
    }
}

/// Coefficient of restitution from free fall, `sqrt(bounce / drop)`.
pub fn restitution_coefficient(test: &DropTest) -> Result<f64> {
    test.validate()?;
    Ok((test.bounce_height / test.drop_height).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn parse_str(s: &str) -> Result<Vec<IndentationSample>> {
        read_samples(s.as_bytes())
    }

    #[test]
    fn parses_three_rows_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pezzi.csv");
        std::fs::write(&path, "force_N,depth_m\n5,0.010\n7.5,0.015\n10,0.020\n").unwrap();
        let s = parse_series(&path, 0.13, 0.001).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.object_id(), "pezzi");
        assert_eq!(
            s.samples()[1],
            IndentationSample {
                force: 7.5,
                depth: 0.015
            }
        );
        assert!(s.shallowness_warning().is_none());
    }

    #[test]
    fn two_rows_is_insufficient() {
        let samples = parse_str("force_N,depth_m\n5,0.01\n7.5,0.015\n").unwrap();
        let err = IndentationSeries::new("x", samples, 0.13, 0.001).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }

    #[test]
    fn malformed_row_names_its_line() {
        let err = parse_str("force_N,depth_m\nabc,0.01\n5,0.02\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comments_are_skipped_and_line_numbers_stay_physical() {
        let err = parse_str("# rig 3\nforce_N,depth_m\n# trial 1\n5,0.01\n5;0.02\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err:?}");
    }

    #[test]
    fn nonpositive_values_are_rejected() {
        let err = parse_str("force_N,depth_m\n5,0.01\n0,0.02\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        let err = parse_str("force_N,depth_m\n5,-0.01\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn wrong_header_is_a_parse_error() {
        let err = parse_str("depth_m,force_N\n0.01,5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn thick_region_warns_but_constructs() {
        let samples = vec![
            IndentationSample::new(1.0, 0.001).unwrap(),
            IndentationSample::new(2.0, 0.002).unwrap(),
            IndentationSample::new(3.0, 0.003).unwrap(),
        ];
        let s = IndentationSeries::new("thick", samples.clone(), 0.1, 0.01).unwrap();
        assert!(s.shallowness_warning().is_some());
        assert!(IndentationSeries::new("bad", samples, 0.1, 0.2).is_err());
    }

    #[test]
    fn restitution_examples() {
        let cor = |h, b| {
            restitution_coefficient(&DropTest {
                drop_height: h,
                bounce_height: b,
            })
        };
        assert_eq!(cor(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(cor(1.0, 0.25).unwrap(), 0.5);
        assert_relative_eq!(cor(0.8, 0.45).unwrap(), 0.75, max_relative = 1e-15);
        assert!(cor(1.0, 1.5).is_err());
        assert!(cor(1.0, 0.0).is_err());
        assert!(DropTest::new(0.5, 0.6).is_err());
    }

    fn sample_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((1e-3f64..1e3, 1e-5f64..0.5), 3..20)
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_identity(rows in sample_strategy()) {
            let samples: Vec<_> = rows.iter().map(|&(f, d)| IndentationSample::new(f, d).unwrap()).collect();
            let s = IndentationSeries::new("obj", samples, 0.13, 0.001).unwrap();
            let back = read_samples(s.to_csv_string().as_bytes()).unwrap();
            prop_assert_eq!(&back, & s.samples().to_vec());
            let again = IndentationSeries::new("obj", back, 0.13, 0.001).unwrap();
            prop_assert_eq!(again.to_csv_string(), s.to_csv_string());
        }

        #[test]
        fn restitution_is_monotone_in_bounce(h in 0.1f64..5.0, a in 0.01f64..1.0, b in 0.01f64..1.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let c_lo = restitution_coefficient(&DropTest { drop_height: h, bounce_height: lo * h }).unwrap();
            let c_hi = restitution_coefficient(&DropTest { drop_height: h, bounce_height: hi * h }).unwrap();
            prop_assert!(c_lo <= c_hi);
            prop_assert!(c_hi <= 1.0 && c_lo > 0.0);
        }
    }
}
