//! Output files, each carrying the invocation and effective config.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use cubioid_core::config::Config;
use cubioid_core::param::Raster;
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub invocation: Vec<String>,
    pub config: Config,
}

impl Header {
    pub fn new(mut argv: Vec<String>, config: Config) -> Header {
        // The program path varies between installs; the program name does not.
        if let Some(first) = argv.first_mut() {
            *first = "cubioid".into();
        }
        Header {
            invocation: argv,
            config,
        }
    }

    fn json(&self) -> String {
        serde_json::to_string(self).expect("header serializes")
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::io(p.display().to_string(), e))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn io_err(path: Option<&Path>) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::io(path.map_or("<stdout>".into(), |p| p.display().to_string()), e)
}

pub fn write_json<T: Serialize>(
    path: Option<&Path>,
    header: &Header,
    command: &str,
    result: &T,
) -> Result<(), CliError> {
    let doc = json!({
        "command": command,
        "invocation": header.invocation,
        "config": header.config,
        "result": result,
    });
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err(path))
}

/// CSV with `#`-prefixed header lines for the invocation and extra metadata.
pub fn write_csv<R: Serialize>(
    path: Option<&Path>,
    header: &Header,
    meta: &serde_json::Value,
    rows: impl IntoIterator<Item = R>,
) -> Result<(), CliError> {
    let mut w = sink(path)?;
    writeln!(w, "# {}", header.json())
        .and_then(|_| writeln!(w, "# {meta}"))
        .map_err(io_err(path))?;
    let mut csv = csv::Writer::from_writer(w);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush().map_err(io_err(path))
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_svg(path: &Path, header: &Header, svg: &str) -> Result<(), CliError> {
    let meta = format!("<metadata>{}</metadata>", xml_escape(&header.json()));
    let (first, rest) = svg.split_once('\n').unwrap_or((svg, ""));
    let text = format!("{first}\n{meta}\n{rest}");
    std::fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))
}

/// RGB PNG with the header and `meta` stored as text chunks.
pub fn write_png(
    path: &Path,
    header: &Header,
    meta: &serde_json::Value,
    raster: &Raster,
) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    let mut enc = png::Encoder::new(BufWriter::new(file), raster.width, raster.height);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    enc.add_text_chunk("cubioid-header".into(), header.json())?;
    enc.add_text_chunk("cubioid-slice".into(), meta.to_string())?;
    let mut w = enc.write_header()?;
    w.write_image_data(&raster.to_rgb_bytes())?;
    w.finish()?;
    Ok(())
}
