use crate::{Common, Failure, Format};
use finitegap::charge::ScanHit;
use finitegap::solution::SampleRow;
use serde::Serialize;
use std::io::Write;

pub fn format_or(c: &Common, default: Format) -> Format {
    c.format.unwrap_or(default)
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Domain(format!("serialization failed: {e}")))
}

/// Writes the whole text in one go, to `--out` or stdout.
pub fn emit(c: &Common, text: &str) -> Result<(), Failure> {
    match &c.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}")))
        }
    }
}

fn f(v: f64) -> String {
    format!("{v:.16e}")
}

fn joined<T, F: Fn(&T) -> String>(items: &[T], sep: &str, fmt: F) -> String {
    items.iter().map(fmt).collect::<Vec<_>>().join(sep)
}

pub fn samples_csv(rows: &[SampleRow]) -> String {
    let mut s = String::from("x,t,re,im,u,modulus_err\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            f(r.x),
            f(r.t),
            f(r.re),
            f(r.im),
            f(r.u),
            f(r.modulus_err)
        ));
    }
    s
}

pub fn matrix_csv(b: &finitegap::homology::PeriodData) -> String {
    let mut s = String::from("quantity,i,j,re,im\n");
    let g = b.genus();
    for i in 0..g {
        for j in 0..g {
            let z = b.b[(i, j)];
            s.push_str(&format!("B,{i},{j},{},{}\n", f(z.re), f(z.im)));
        }
    }
    for (name, v) in [("U", &b.u), ("V", &b.v), ("A0", &b.a0), ("K", &b.k)] {
        for (i, z) in v.iter().enumerate() {
            s.push_str(&format!("{name},{i},,{},{}\n", f(z.re), f(z.im)));
        }
    }
    s
}

pub fn scan_csv(hits: &[ScanHit]) -> String {
    let mut s = String::from("phis,lambdas,s,s_prime,x0,coincide\n");
    for h in hits {
        let s_prime = h
            .s_prime
            .as_ref()
            .map_or_else(|| "NA".to_string(), |v| joined(v, ";", |x| x.to_string()));
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            joined(&h.phis, ";", |&x| f(x)),
            joined(&h.points, ";", |p| f(p.lambda.re)),
            joined(&h.s, ";", |x| x.to_string()),
            s_prime,
            joined(&h.x0, ";", |&x| f(x)),
            h.coincide
        ));
    }
    s
}
