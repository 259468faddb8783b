//! CSV and SVG rendering of a solved local expansion.
//!
//! Samples are taken on a symmetric grid t ∈ [−t_max, t_max] and mapped
//! back to the original frame through the inverse similarity.  The CSV
//! table lists the near arc (the expansion at V1); the SVG sketch shows
//! both local arcs — the far one induced through Q — together with the
//! axis and the four defining points.

use fchordal::{
    denormalize, induced_parametrization, Coefficient, FocusPoint, LocalSolution,
    NormalizedProblem, Point,
};

use crate::error::CliError;

pub struct SampleGrid {
    pub t_max: Coefficient,
    pub count: usize,
}

impl SampleGrid {
    /// `count` evenly spaced parameters from −t_max to t_max inclusive.
    pub fn params(&self) -> Result<Vec<Coefficient>, CliError> {
        if self.count < 2 {
            return Err(CliError::invalid("sample-grid", "count must be at least 2", "--count"));
        }
        let backend = self.t_max.backend();
        let span = Coefficient::from_int_backend(self.count as i64 - 1, backend);
        let step = self
            .t_max
            .add(&self.t_max)
            .div(&span)
            .map_err(|err| CliError::invalid("sample-grid", err.to_string(), "--t-max"))?;
        let mut out = Vec::with_capacity(self.count);
        let mut t = self.t_max.neg();
        for i in 0..self.count {
            out.push(t.clone());
            if i + 1 < self.count {
                t = t.add(&step);
            }
        }
        Ok(out)
    }
}

/// The near arc in the original frame, one point per grid parameter.
fn near_arc(
    np: &NormalizedProblem,
    sol: &LocalSolution,
    params: &[Coefficient],
) -> Result<Vec<Point>, CliError> {
    denormalize(sol, &np.transform, params)
        .map_err(|err| CliError::from_fchordal(&err, "sample"))
}

/// The far arc in the original frame: the curve induced by chords
/// through Q, evaluated on the same grid.
fn far_arc(
    np: &NormalizedProblem,
    sol: &LocalSolution,
    params: &[Coefficient],
) -> Result<Vec<Point>, CliError> {
    let (bx, by) = induced_parametrization(&sol.x, &sol.y, FocusPoint::Q, &np.phi.phi_q)
        .map_err(|err| CliError::from_fchordal(&err, "sample"))?;
    params
        .iter()
        .map(|t| {
            let x = bx.eval(t).map_err(|err| CliError::invalid("series", err.to_string(), "sample"))?;
            let y = by.eval(t).map_err(|err| CliError::invalid("series", err.to_string(), "sample"))?;
            Ok(np.transform.inverse(&Point::new(x, y)))
        })
        .collect()
}

pub fn render_csv(
    np: &NormalizedProblem,
    sol: &LocalSolution,
    grid: &SampleGrid,
) -> Result<String, CliError> {
    let params = grid.params()?;
    let points = near_arc(np, sol, &params)?;
    let mut out = String::from("t,x,y\n");
    for (t, pt) in params.iter().zip(&points) {
        out.push_str(&format!("{t},{},{}\n", pt.x, pt.y));
    }
    Ok(out)
}

/// Best-effort numeric value for plotting; exactness is not needed here.
fn to_f64(c: &Coefficient) -> f64 {
    let text = c.to_string();
    match text.split_once('/') {
        Some((num, den)) => {
            num.parse::<f64>().unwrap_or(f64::NAN) / den.parse::<f64>().unwrap_or(f64::NAN)
        }
        None => text.parse::<f64>().unwrap_or(f64::NAN),
    }
}

fn to_xy(pt: &Point) -> (f64, f64) {
    (to_f64(&pt.x), to_f64(&pt.y))
}

const SVG_WIDTH: f64 = 640.0;
const SVG_HEIGHT: f64 = 480.0;
const SVG_PAD: f64 = 40.0;

/// Uniform data-to-pixel mapping with a flipped y-axis.
struct Frame {
    scale: f64,
    x_mid: f64,
    y_mid: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)]) -> Frame {
        let mut x_min = f64::INFINITY;
        let mut x_max = f64::NEG_INFINITY;
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for &(x, y) in points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        let dx = (x_max - x_min).max(1e-9);
        let dy = (y_max - y_min).max(1e-9);
        let scale =
            ((SVG_WIDTH - 2.0 * SVG_PAD) / dx).min((SVG_HEIGHT - 2.0 * SVG_PAD) / dy);
        Frame { scale, x_mid: (x_min + x_max) / 2.0, y_mid: (y_min + y_max) / 2.0 }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            SVG_WIDTH / 2.0 + (x - self.x_mid) * self.scale,
            SVG_HEIGHT / 2.0 - (y - self.y_mid) * self.scale,
        )
    }
}

fn polyline(frame: &Frame, points: &[(f64, f64)], stroke: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|&p| {
            let (x, y) = frame.map(p);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    format!(
        "  <polyline fill=\"none\" stroke=\"{stroke}\" stroke-width=\"2\" points=\"{}\"/>\n",
        coords.join(" ")
    )
}

fn marker(frame: &Frame, point: (f64, f64), label: &str) -> String {
    let (x, y) = frame.map(point);
    format!(
        "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"#333333\"/>\n  \
         <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\">{label}</text>\n",
        x + 6.0,
        y - 6.0
    )
}

pub fn render_svg(
    np: &NormalizedProblem,
    sol: &LocalSolution,
    grid: &SampleGrid,
    labels: &[(Point, &'static str)],
) -> Result<String, CliError> {
    let params = grid.params()?;
    let near: Vec<(f64, f64)> = near_arc(np, sol, &params)?.iter().map(to_xy).collect();
    let far: Vec<(f64, f64)> = far_arc(np, sol, &params)?.iter().map(to_xy).collect();
    let marks: Vec<((f64, f64), &str)> =
        labels.iter().map(|(pt, name)| (to_xy(pt), *name)).collect();

    let mut all: Vec<(f64, f64)> = Vec::new();
    all.extend(&near);
    all.extend(&far);
    all.extend(marks.iter().map(|(p, _)| *p));
    let frame = Frame::fit(&all);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" \
         viewBox=\"0 0 {SVG_WIDTH} {SVG_HEIGHT}\">\n"
    );
    svg.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // The axis through all four points: V1 and V2 are the outermost.
    if let (Some((v1, _)), Some((v2, _))) = (
        marks.iter().find(|(_, n)| *n == "V1"),
        marks.iter().find(|(_, n)| *n == "V2"),
    ) {
        let (x1, y1) = frame.map(*v1);
        let (x2, y2) = frame.map(*v2);
        svg.push_str(&format!(
            "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" \
             stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n"
        ));
    }
    svg.push_str(&polyline(&frame, &near, "#1f77b4"));
    svg.push_str(&polyline(&frame, &far, "#d62728"));
    for (point, name) in &marks {
        svg.push_str(&marker(&frame, *point, name));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
