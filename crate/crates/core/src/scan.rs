//! Sensor data model, sequence containers and file ingestion.
//!
//! A [`Scan`] is one full sweep of a 2D LiDAR: range measurements on a fixed
//! angular grid described by [`LidarConfig`]. Sequences are stored on disk as
//! JSON-lines (one header object, then one object per scan) and can also be
//! ingested from DROW-style CSV files with sibling polar annotation files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angular grid and range limits of a scanner.
///
/// Beams are evenly spaced and symmetric about the forward (+x) axis; beam
/// `n` points at `-fov/2 + n * fov/(num_points-1)` radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LidarConfig {
    pub num_points: usize,
    /// Total field of view in radians.
    pub fov: f64,
    /// Maximum measurable range in meters.
    pub max_range: f64,
}

impl LidarConfig {
    pub fn new(num_points: usize, fov: f64, max_range: f64) -> Result<Self> {
        let cfg = LidarConfig {
            num_points,
            fov,
            max_range,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_points < 2 {
            return Err(Error::Validation(format!(
                "num_points must be >= 2, got {}",
                self.num_points
            )));
        }
        if !(self.fov > 0.0 && self.fov <= 2.0 * std::f64::consts::PI) {
            return Err(Error::Validation(format!(
                "fov must be in (0, 2*pi], got {}",
                self.fov
            )));
        }
        if !(self.max_range > 0.0) {
            return Err(Error::Validation(format!(
                "max_range must be > 0, got {}",
                self.max_range
            )));
        }
        Ok(())
    }

    /// Angle of beam `n` in radians, counterclockwise from +x.
    #[inline]
    pub fn beam_angle(&self, n: usize) -> f64 {
        -self.fov / 2.0 + n as f64 * self.angle_increment()
    }

    /// Angular spacing between adjacent beams.
    #[inline]
    pub fn angle_increment(&self) -> f64 {
        self.fov / (self.num_points - 1) as f64
    }

    /// Cartesian endpoint of beam `n` at range `r` (sensor frame: x forward,
    /// y left).
    #[inline]
    pub fn beam_endpoint(&self, n: usize, r: f64) -> [f64; 2] {
        let a = self.beam_angle(n);
        [r * a.cos(), r * a.sin()]
    }
}

/// One LiDAR sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    /// Sanitized ranges in meters, one per beam, each in `(0, max_range]`.
    pub ranges: Vec<f64>,
    /// Acquisition time in seconds.
    pub timestamp: f64,
    /// Index within the recording.
    pub sequence_index: i64,
}

/// A labeled person position in the sensor frame (x forward, y left).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annotation {
    pub center: [f64; 2],
}

/// Time-ordered scans sharing one sensor configuration.
///
/// `annotations[i]` is `None` when scan `i` is unannotated: such scans
/// participate in temporal context but never in losses or metrics. A
/// `Some(vec![])` entry is an annotated frame with no persons in it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSequence {
    pub config: LidarConfig,
    pub scans: Vec<Scan>,
    pub annotations: Vec<Option<Vec<Annotation>>>,
}

impl ScanSequence {
    /// Builds a sequence after validating all container invariants.
    pub fn new(
        config: LidarConfig,
        scans: Vec<Scan>,
        annotations: Vec<Option<Vec<Annotation>>>,
    ) -> Result<Self> {
        config.validate()?;
        if scans.is_empty() {
            return Err(Error::Validation("sequence contains no scans".into()));
        }
        if annotations.len() != scans.len() {
            return Err(Error::Validation(format!(
                "{} annotation entries for {} scans",
                annotations.len(),
                scans.len()
            )));
        }
        for (i, scan) in scans.iter().enumerate() {
            if scan.ranges.len() != config.num_points {
                return Err(Error::Validation(format!(
                    "scan {} has {} ranges, config expects {}",
                    i,
                    scan.ranges.len(),
                    config.num_points
                )));
            }
            if scan
                .ranges
                .iter()
                .any(|&r| !r.is_finite() || r <= 0.0 || r > config.max_range)
            {
                return Err(Error::Validation(format!(
                    "scan {} holds an unsanitized range",
                    i
                )));
            }
            if i > 0 && scan.timestamp <= scans[i - 1].timestamp {
                return Err(Error::Validation(format!(
                    "timestamps not strictly increasing at scan {}",
                    i
                )));
            }
        }
        let limit = config.max_range + 1.0;
        for (i, anns) in annotations.iter().enumerate() {
            if let Some(anns) = anns {
                for a in anns {
                    let d = (a.center[0] * a.center[0] + a.center[1] * a.center[1]).sqrt();
                    if d > limit {
                        return Err(Error::Validation(format!(
                            "annotation at scan {} lies {:.2} m out, beyond max_range + 1",
                            i, d
                        )));
                    }
                }
            }
        }
        Ok(ScanSequence {
            config,
            scans,
            annotations,
        })
    }

    pub fn len(&self) -> usize {
        self.scans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scans.is_empty()
    }

    /// Indices of annotated scans.
    pub fn annotated_frames(&self) -> impl Iterator<Item = usize> + '_ {
        self.annotations
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.as_ref().map(|_| i))
    }
}

/// Replaces every non-finite, non-positive or out-of-range measurement with
/// `max_range` so the angular grid stays dense.
pub fn sanitize_scan(raw: &[f64], config: &LidarConfig) -> Vec<f64> {
    raw.iter()
        .map(|&r| {
            if r.is_finite() && r > 0.0 && r <= config.max_range {
                r
            } else {
                config.max_range
            }
        })
        .collect()
}

/// Keeps scans at indices `0, stride, 2*stride, ...`; annotations follow.
pub fn subsample_temporal(seq: &ScanSequence, stride: usize) -> Result<ScanSequence> {
    if stride < 1 {
        return Err(Error::InvalidArgument("stride must be >= 1".into()));
    }
    let scans: Vec<Scan> = seq.scans.iter().step_by(stride).cloned().collect();
    let annotations: Vec<_> = seq.annotations.iter().step_by(stride).cloned().collect();
    ScanSequence::new(seq.config, scans, annotations)
}

/// On-disk formats understood by [`load_sequence`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Format {
    /// JSON-lines: a header object, then one object per scan.
    Native,
    /// DROW-style CSV scans with an optional sibling polar annotation file.
    /// The CSV does not carry the angular grid, so field of view and maximum
    /// range must be supplied.
    Drow { fov: f64, max_range: f64 },
}

#[derive(Serialize, Deserialize)]
struct NativeLine {
    t: f64,
    seq: i64,
    ranges: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    persons: Option<Vec<[f64; 2]>>,
}

/// Loads a scan sequence from disk. Ranges are sanitized on ingest.
pub fn load_sequence(path: impl AsRef<Path>, format: Format) -> Result<ScanSequence> {
    let reader = BufReader::new(File::open(path.as_ref())?);
    match format {
        Format::Native => load_native(reader),
        Format::Drow { fov, max_range } => {
            let seq = load_drow_scans(reader, fov, max_range)?;
            attach_drow_annotations(path.as_ref(), seq)
        }
    }
}

fn load_native(reader: impl BufRead) -> Result<ScanSequence> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Validation("empty file".into()))?;
    let header = header?;
    let config: LidarConfig = serde_json::from_str(&header)
        .map_err(|e| Error::parse(1, format!("bad header: {e}")))?;
    config.validate()?;

    let mut scans = Vec::new();
    let mut annotations = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: NativeLine =
            serde_json::from_str(&line).map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        if parsed.ranges.len() != config.num_points {
            return Err(Error::parse(
                idx + 1,
                format!(
                    "{} ranges, header says {}",
                    parsed.ranges.len(),
                    config.num_points
                ),
            ));
        }
        scans.push(Scan {
            ranges: sanitize_scan(&parsed.ranges, &config),
            timestamp: parsed.t,
            sequence_index: parsed.seq,
        });
        annotations.push(
            parsed
                .persons
                .map(|ps| ps.into_iter().map(|center| Annotation { center }).collect()),
        );
    }
    if scans.is_empty() {
        return Err(Error::Validation("file contains no scans".into()));
    }
    ScanSequence::new(config, scans, annotations)
}

fn load_drow_scans(reader: impl BufRead, fov: f64, max_range: f64) -> Result<ScanSequence> {
    let mut config: Option<LidarConfig> = None;
    let mut scans = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split(',');
        let seq: i64 = fields
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::parse(idx + 1, "missing sequence index"))?;
        let timestamp: f64 = fields
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::parse(idx + 1, "missing timestamp"))?;
        let raw: Vec<f64> = fields
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::parse(idx + 1, format!("bad range value: {e}")))
            })
            .collect::<Result<_>>()?;
        if raw.is_empty() {
            return Err(Error::parse(idx + 1, "scan line holds no ranges"));
        }
        let cfg = match &config {
            Some(cfg) => {
                if raw.len() != cfg.num_points {
                    return Err(Error::parse(
                        idx + 1,
                        format!("{} ranges, first line had {}", raw.len(), cfg.num_points),
                    ));
                }
                *cfg
            }
            None => {
                let cfg = LidarConfig::new(raw.len(), fov, max_range)?;
                config = Some(cfg);
                cfg
            }
        };
        scans.push(Scan {
            ranges: sanitize_scan(&raw, &cfg),
            timestamp,
            sequence_index: seq,
        });
    }
    let config = config.ok_or_else(|| Error::Validation("empty file".into()))?;
    let n = scans.len();
    ScanSequence::new(config, scans, vec![None; n])
}

/// DROW annotation files sit next to the scan file with a `.wp` extension and
/// hold per-scan person centers as `seq,[[r,phi],...]` in polar form.
fn attach_drow_annotations(scan_path: &Path, mut seq: ScanSequence) -> Result<ScanSequence> {
    let ann_path = scan_path.with_extension("wp");
    if !ann_path.exists() {
        return Ok(seq);
    }
    let reader = BufReader::new(File::open(&ann_path)?);
    let mut by_seq: std::collections::HashMap<i64, Vec<Annotation>> =
        std::collections::HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (seq_str, payload) = trimmed
            .split_once(',')
            .ok_or_else(|| Error::parse(idx + 1, "expected `seq,[[r,phi],...]`"))?;
        let seq_idx: i64 = seq_str
            .trim()
            .parse()
            .map_err(|e| Error::parse(idx + 1, format!("bad sequence index: {e}")))?;
        let polar: Vec<[f64; 2]> = serde_json::from_str(payload.trim())
            .map_err(|e| Error::parse(idx + 1, format!("bad annotation payload: {e}")))?;
        let anns = polar
            .into_iter()
            .map(|[r, phi]| Annotation {
                center: [r * phi.cos(), r * phi.sin()],
            })
            .collect();
        by_seq.insert(seq_idx, anns);
    }
    for (i, scan) in seq.scans.iter().enumerate() {
        if let Some(anns) = by_seq.remove(&scan.sequence_index) {
            seq.annotations[i] = Some(anns);
        }
    }
    // Re-validate: polar conversion may produce out-of-range centers.
    ScanSequence::new(seq.config, seq.scans, seq.annotations)
}

/// Writes the native JSON-lines format. `load(save(seq))` reproduces the
/// sequence exactly; JSON floats round-trip f64 bit-for-bit.
pub fn save_sequence(seq: &ScanSequence, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &seq.config).map_err(io_err)?;
    w.write_all(b"\n")?;
    for (scan, anns) in seq.scans.iter().zip(&seq.annotations) {
        let line = NativeLine {
            t: scan.timestamp,
            seq: scan.sequence_index,
            ranges: scan.ranges.clone(),
            persons: anns
                .as_ref()
                .map(|v| v.iter().map(|a| a.center).collect()),
        };
        serde_json::to_writer(&mut w, &line).map_err(io_err)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn io_err(e: serde_json::Error) -> Error {
    Error::Io(e.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(n: usize) -> LidarConfig {
        LidarConfig::new(n, std::f64::consts::PI, 10.0).unwrap()
    }

    fn make_seq(num_scans: usize, num_points: usize) -> ScanSequence {
        let config = cfg(num_points);
        let scans = (0..num_scans)
            .map(|i| Scan {
                ranges: (0..num_points)
                    .map(|n| 1.0 + (i * num_points + n) as f64 * 0.013)
                    .map(|r| r.min(10.0))
                    .collect(),
                timestamp: i as f64 * 0.1,
                sequence_index: i as i64,
            })
            .collect();
        let annotations = (0..num_scans)
            .map(|i| {
                if i % 2 == 0 {
                    Some(vec![Annotation {
                        center: [2.0 + i as f64 * 0.01, -0.5],
                    }])
                } else {
                    None
                }
            })
            .collect();
        ScanSequence::new(config, scans, annotations).unwrap()
    }

    #[test]
    fn beam_angles_span_fov() {
        let c = cfg(5);
        assert!((c.beam_angle(0) + c.fov / 2.0).abs() < 1e-12);
        assert!((c.beam_angle(4) - c.fov / 2.0).abs() < 1e-12);
        assert!((c.beam_angle(2)).abs() < 1e-12);
    }

    #[test]
    fn sanitize_replaces_invalid_entries() {
        let c = LidarConfig::new(3, 1.0, 10.0).unwrap();
        assert_eq!(
            sanitize_scan(&[1.0, f64::INFINITY, 2.0], &c),
            vec![1.0, 10.0, 2.0]
        );
        let c1 = LidarConfig::new(2, 1.0, 5.0).unwrap();
        assert_eq!(sanitize_scan(&[0.0, 1.0], &c1), vec![5.0, 1.0]);
        let c2 = LidarConfig::new(2, 1.0, 10.0).unwrap();
        assert_eq!(sanitize_scan(&[3.2, 4.4], &c2), vec![3.2, 4.4]);
        assert_eq!(sanitize_scan(&[f64::NAN, -1.0], &c2), vec![10.0, 10.0]);
    }

    #[test]
    fn subsample_examples() {
        let seq = make_seq(10, 4);
        assert_eq!(subsample_temporal(&seq, 1).unwrap(), seq);
        let s5 = subsample_temporal(&seq, 5).unwrap();
        assert_eq!(s5.len(), 2);
        assert_eq!(s5.scans[1].sequence_index, 5);
        let seq7 = make_seq(7, 4);
        let s3 = subsample_temporal(&seq7, 3).unwrap();
        assert_eq!(s3.len(), 3);
        assert_eq!(
            s3.scans.iter().map(|s| s.sequence_index).collect::<Vec<_>>(),
            vec![0, 3, 6]
        );
        assert!(matches!(
            subsample_temporal(&seq, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn native_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("seq.jsonl");
        let seq = make_seq(3, 450);
        save_sequence(&seq, &path).unwrap();
        let loaded = load_sequence(&path, Format::Native).unwrap();
        assert_eq!(loaded, seq);
        assert_eq!(loaded.config.num_points, 450);
    }

    #[test]
    fn native_rejects_bad_input() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");

        std::fs::write(&path, "").unwrap();
        assert!(load_sequence(&path, Format::Native).is_err());

        std::fs::write(
            &path,
            "{\"num_points\":2,\"fov\":1.0,\"max_range\":10.0}\nnot json\n",
        )
        .unwrap();
        match load_sequence(&path, Format::Native) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }

        // Non-monotonic timestamps.
        std::fs::write(
            &path,
            concat!(
                "{\"num_points\":2,\"fov\":1.0,\"max_range\":10.0}\n",
                "{\"t\":1.0,\"seq\":0,\"ranges\":[1.0,2.0]}\n",
                "{\"t\":1.0,\"seq\":1,\"ranges\":[1.0,2.0]}\n",
            ),
        )
        .unwrap();
        assert!(matches!(
            load_sequence(&path, Format::Native),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn drow_reader_polar_identity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        std::fs::write(
            &path,
            "0,0.00,1.5,2.5,3.5\n1,0.08,1.6,2.6,3.6\n2,0.16,1.7,2.7,3.7\n",
        )
        .unwrap();
        std::fs::write(dir.path().join("run.wp"), "0,[[2.0,0.0]]\n2,[]\n").unwrap();
        let seq = load_sequence(&path, Format::Drow { fov: 1.0, max_range: 10.0 }).unwrap();
        assert_eq!(seq.config.num_points, 3);
        let anns = seq.annotations[0].as_ref().unwrap();
        assert_eq!(anns.len(), 1);
        assert!((anns[0].center[0] - 2.0).abs() < 1e-12);
        assert!(anns[0].center[1].abs() < 1e-12);
        assert!(seq.annotations[1].is_none());
        assert_eq!(seq.annotations[2].as_ref().unwrap().len(), 0);
    }

    #[test]
    fn drow_reader_errors_name_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        std::fs::write(&path, "0,0.0,1.0,2.0\n1,0.1,oops,2.0\n").unwrap();
        match load_sequence(&path, Format::Drow { fov: 1.0, max_range: 10.0 }) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn sanitize_is_idempotent(raw in proptest::collection::vec(
            prop_oneof![
                any::<f64>(),
                -5.0..15.0f64,
            ],
            1..40,
        )) {
            let c = LidarConfig::new(2, 1.0, 10.0).unwrap();
            let once = sanitize_scan(&raw, &c);
            let twice = sanitize_scan(&once, &c);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn subsample_length_is_ceil(len in 1usize..50, stride in 1usize..10) {
            let seq = make_seq(len, 3);
            let sub = subsample_temporal(&seq, stride).unwrap();
            prop_assert_eq!(sub.len(), len.div_ceil(stride));
        }

        #[test]
        fn round_trip_preserves_ranges(
            ranges in proptest::collection::vec(0.001f64..10.0, 5),
            t0 in 0.0f64..100.0,
        ) {
            let config = LidarConfig::new(5, 2.0, 10.0).unwrap();
            let scans = vec![Scan { ranges, timestamp: t0, sequence_index: 0 }];
            let seq = ScanSequence::new(config, scans, vec![None]).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("rt.jsonl");
            save_sequence(&seq, &path).unwrap();
            let loaded = load_sequence(&path, Format::Native).unwrap();
            for (a, b) in loaded.scans[0].ranges.iter().zip(&seq.scans[0].ranges) {
                prop_assert!((a - b).abs() < 1e-7);
            }
        }
    }
}
