//! File writers. Numbers go out as `{:.16e}` (17 significant digits, `.` decimal point).

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

pub struct OutDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutDir { dir: dir.to_path_buf(), written: Vec::new() })
    }

    /// File names written so far, relative to the output directory.
    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn open(&mut self, name: &str) -> io::Result<BufWriter<File>> {
        self.written.push(name.to_string());
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    /// CSV with a `# resolved: {...}` line, a header row, then one record per row.
    pub fn csv<'a, I>(&mut self, name: &str, resolved: &str, header: &[&str], rows: I) -> io::Result<()>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut w = self.open(name)?;
        writeln!(w, "# resolved: {resolved}")?;
        writeln!(w, "{}", header.join(","))?;
        for row in rows {
            let mut first = true;
            for x in row {
                if !first {
                    w.write_all(b",")?;
                }
                first = false;
                write!(w, "{}", num(*x))?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    pub fn json(&mut self, name: &str, value: &Value) -> io::Result<()> {
        let mut w = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()
    }

    pub fn text(&mut self, name: &str, body: &str) -> io::Result<()> {
        let mut w = self.open(name)?;
        w.write_all(body.as_bytes())?;
        w.flush()
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `null` for non-finite values, which JSON cannot hold.
pub fn finite(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::Null
    }
}

pub fn gnuplot_map(csv: &str, title: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set view map\n\
         set xlabel 'phi (deg)'\n\
         set ylabel 'theta (deg)'\n\
         set title '{title}'\n\
         splot '{csv}' skip 2 using 2:1:3 with points pointtype 5 pointsize 0.4 palette notitle\n\
         pause -1\n"
    )
}

pub fn gnuplot_coherence(csv: &str, title: &str, ds: &[f64]) -> String {
    let mut curves = Vec::new();
    for d in ds {
        for (col, lab) in [(3, "PT"), (4, "classic")] {
            curves.push(format!("'{csv}' skip 2 using 2:($1=={d} ? ${col} : 1/0) with lines title '{lab} d/a={d}'"));
        }
    }
    format!(
        "set datafile separator ','\n\
         set xlabel 'theta (deg)'\n\
         set ylabel 'mu'\n\
         set title '{title}'\n\
         plot {}\n\
         pause -1\n",
        curves.join(", \\\n     ")
    )
}
