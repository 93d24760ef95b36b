use std::io::{BufRead, Write};

use super::{BitFingerprint, FeatureVector, FingerprintError};

#[derive(Debug, Clone, PartialEq)]
pub struct FingerprintRecord {
    pub id: String,
    pub fingerprint: BitFingerprint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub id: String,
    pub vector: FeatureVector,
}

/// One `id<TAB>hex` line per fingerprint.
pub fn write_fingerprint_dump<W: Write>(mut w: W, records: &[FingerprintRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(w, "{}\t{}", r.id, r.fingerprint.to_hex())?;
    }
    w.flush()
}

pub fn read_fingerprint_dump<R: BufRead>(r: R) -> Result<Vec<FingerprintRecord>, FingerprintError> {
    let mut out: Vec<FingerprintRecord> = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let format = |msg: &str| FingerprintError::Format {
            line: i + 1,
            msg: msg.to_string(),
        };
        let (id, hex) = line.split_once('\t').ok_or_else(|| format("expected id<TAB>hex"))?;
        let fingerprint = BitFingerprint::from_hex(hex.trim()).ok_or_else(|| format("bad hex bit vector"))?;
        if let Some(first) = out.first() {
            if first.fingerprint.nbits() != fingerprint.nbits() {
                return Err(format("fingerprint length differs from the first line"));
            }
        }
        out.push(FingerprintRecord {
            id: id.to_string(),
            fingerprint,
        });
    }
    Ok(out)
}

/// Header `dim=<d> count=<n>`, then `id v1 ... vd` per line.
pub fn write_features<W: Write>(mut w: W, records: &[FeatureRecord]) -> std::io::Result<()> {
    let dim = records.first().map_or(0, |r| r.vector.dim());
    writeln!(w, "dim={dim} count={}", records.len())?;
    for r in records {
        write!(w, "{}", r.id)?;
        for v in r.vector.values() {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    w.flush()
}

pub fn read_features<R: BufRead>(r: R) -> Result<Vec<FeatureRecord>, FingerprintError> {
    let mut lines = r.lines().enumerate();
    let header_error = || FingerprintError::Format {
        line: 1,
        msg: "expected header dim=<d> count=<n>".into(),
    };
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(header_error()),
    };
    let mut dim = None;
    let mut count = None;
    for field in header.split_whitespace() {
        match field.split_once('=') {
            Some(("dim", v)) => dim = v.parse::<usize>().ok(),
            Some(("count", v)) => count = v.parse::<usize>().ok(),
            _ => return Err(header_error()),
        }
    }
    let (Some(dim), Some(count)) = (dim, count) else {
        return Err(header_error());
    };

    let mut out = Vec::with_capacity(count);
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let format = |msg: String| FingerprintError::Format { line: i + 1, msg };
        let mut fields = line.split_whitespace();
        let id = fields.next().unwrap_or_default().to_string();
        let values = fields
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| format(e.to_string()))?;
        if values.len() != dim {
            return Err(format(format!("expected {dim} values, found {}", values.len())));
        }
        let vector = FeatureVector::new(values).map_err(|e| format(e.to_string()))?;
        out.push(FeatureRecord { id, vector });
    }
    if out.len() != count {
        return Err(FingerprintError::Format {
            line: 1,
            msg: format!("header announces {count} vectors, file has {}", out.len()),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_file_round_trip() {
        let records = vec![
            FeatureRecord {
                id: "a".into(),
                vector: FeatureVector::new(vec![0.5, -1.25, 3e-7]).unwrap(),
            },
            FeatureRecord {
                id: "b".into(),
                vector: FeatureVector::new(vec![1.0, 2.0, 3.0]).unwrap(),
            },
        ];
        let mut buf = Vec::new();
        write_features(&mut buf, &records).unwrap();
        assert!(buf.starts_with(b"dim=3 count=2\n"));
        assert_eq!(read_features(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn feature_file_errors() {
        assert!(read_features("".as_bytes()).is_err());
        assert!(read_features("dim=2 count=1\na 1\n".as_bytes()).is_err());
        assert!(read_features("dim=2 count=2\na 1 2\n".as_bytes()).is_err());
        assert!(read_features("dim=1 count=1\na x\n".as_bytes()).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let records = vec![FingerprintRecord {
            id: "m1".into(),
            fingerprint: BitFingerprint::from_bits(64, [0, 9, 63]),
        }];
        let mut buf = Vec::new();
        write_fingerprint_dump(&mut buf, &records).unwrap();
        let back = read_fingerprint_dump(buf.as_slice()).unwrap();
        assert_eq!(back[0].fingerprint.ones().collect::<Vec<_>>(), [0, 9, 63]);
        assert!(read_fingerprint_dump("m1\tzz\n".as_bytes()).is_err());
    }
}
