//! Facial regions of interest and their per-channel colour means.
//!
//! Each ROI is a polygon whose vertices are points of the 68-point face
//! landmark layout. A vertex may be lifted straight up (towards smaller `y`)
//! by a multiple of the inter-ocular distance, which is how the forehead
//! region is placed above the brows.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const N_LANDMARKS: usize = 68;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RoiId {
    RightCheek,
    LeftCheek,
    Chin,
    Forehead,
    OuterRight,
    OuterLeft,
    Center,
}

impl RoiId {
    pub const ALL: [RoiId; 7] = [
        RoiId::RightCheek,
        RoiId::LeftCheek,
        RoiId::Chin,
        RoiId::Forehead,
        RoiId::OuterRight,
        RoiId::OuterLeft,
        RoiId::Center,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RoiId::RightCheek => "right_cheek",
            RoiId::LeftCheek => "left_cheek",
            RoiId::Chin => "chin",
            RoiId::Forehead => "forehead",
            RoiId::OuterRight => "outer_right",
            RoiId::OuterLeft => "outer_left",
            RoiId::Center => "center",
        }
    }

    pub fn abbrev(self) -> &'static str {
        match self {
            RoiId::RightCheek => "RC",
            RoiId::LeftCheek => "LC",
            RoiId::Chin => "C",
            RoiId::Forehead => "F",
            RoiId::OuterRight => "OR",
            RoiId::OuterLeft => "OL",
            RoiId::Center => "CE",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RoiId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RoiId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        RoiId::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s || r.abbrev().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown ROI `{s}`")))
    }
}

/// Whether channel intensities are 8-bit (`[0, 255]`) or normalised
/// (`[0, 1]`). Fixed per dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntensityConvention {
    #[default]
    EightBit,
    Unit,
}

impl IntensityConvention {
    pub fn max_value(self) -> f64 {
        match self {
            IntensityConvention::EightBit => 255.0,
            IntensityConvention::Unit => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            IntensityConvention::EightBit => "8bit",
            IntensityConvention::Unit => "unit",
        }
    }
}

impl FromStr for IntensityConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "8bit" | "8-bit" | "u8" => Ok(IntensityConvention::EightBit),
            "unit" | "normalized" | "normalised" => Ok(IntensityConvention::Unit),
            other => Err(Error::InvalidConfig(format!(
                "unknown intensity convention `{other}`"
            ))),
        }
    }
}

/// Mean red, green and blue intensity over one ROI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoiChannelMeans {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl RoiChannelMeans {
    pub fn new(r: f64, g: f64, b: f64) -> Self {
        Self { r, g, b }
    }

    pub fn splat(v: f64) -> Self {
        Self { r: v, g: v, b: v }
    }

    pub fn scaled(self, c: f64) -> Self {
        Self {
            r: self.r * c,
            g: self.g * c,
            b: self.b * c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Polygon vertex: a landmark, optionally lifted upward by `lift`
/// inter-ocular distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexRef {
    pub index: usize,
    pub lift: f64,
}

impl VertexRef {
    pub fn at(index: usize) -> Self {
        Self { index, lift: 0.0 }
    }

    pub fn lifted(index: usize, lift: f64) -> Self {
        Self { index, lift }
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lift == 0.0 {
            write!(f, "{}", self.index)
        } else {
            write!(f, "{}^{}", self.index, self.lift)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoiPolygon {
    pub roi: RoiId,
    pub vertices: Vec<VertexRef>,
}

impl RoiPolygon {
    pub fn new(roi: RoiId, vertices: Vec<VertexRef>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidConfig(format!(
                "ROI {roi} needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(v) = vertices.iter().find(|v| v.index >= N_LANDMARKS) {
            return Err(Error::InvalidConfig(format!(
                "ROI {roi} references landmark {} (valid range 0..=67)",
                v.index
            )));
        }
        if let Some(v) = vertices.iter().find(|v| !v.lift.is_finite()) {
            return Err(Error::InvalidConfig(format!("ROI {roi} vertex {} has a non-finite lift", v.index)));
        }
        Ok(Self { roi, vertices })
    }

    fn from_indices(roi: RoiId, idx: &[usize]) -> Self {
        Self {
            roi,
            vertices: idx.iter().map(|&i| VertexRef::at(i)).collect(),
        }
    }

    /// Resolves vertices to image coordinates.
    pub fn resolve(&self, landmarks: &[Point]) -> Result<Vec<Point>> {
        if landmarks.len() != N_LANDMARKS {
            return Err(Error::DimensionMismatch {
                context: "landmarks".into(),
                expected: N_LANDMARKS,
                actual: landmarks.len(),
            });
        }
        let iod = inter_ocular_distance(landmarks);
        Ok(self
            .vertices
            .iter()
            .map(|v| {
                let p = landmarks[v.index];
                Point::new(p.x, p.y - v.lift * iod)
            })
            .collect())
    }
}

/// Distance between the two eye centres (means of points 36..42 and 42..48).
pub fn inter_ocular_distance(landmarks: &[Point]) -> f64 {
    let centre = |r: std::ops::Range<usize>| {
        let n = r.len() as f64;
        let (sx, sy) = landmarks[r]
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Point::new(sx / n, sy / n)
    };
    let a = centre(36..42);
    let b = centre(42..48);
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

/// The seven ROI polygons, indexed in [`RoiId::ALL`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiTable {
    polygons: Vec<RoiPolygon>,
}

impl Default for RoiTable {
    fn default() -> Self {
        use RoiId::*;
        let forehead = RoiPolygon {
            roi: Forehead,
            vertices: vec![
                VertexRef::at(19),
                VertexRef::at(24),
                VertexRef::lifted(24, 1.0),
                VertexRef::lifted(19, 1.0),
            ],
        };
        Self {
            polygons: vec![
                RoiPolygon::from_indices(RightCheek, &[1, 4, 48, 31, 40, 41]),
                RoiPolygon::from_indices(LeftCheek, &[15, 12, 54, 35, 47, 46]),
                RoiPolygon::from_indices(Chin, &[6, 7, 8, 9, 10, 56, 57, 58]),
                forehead,
                RoiPolygon::from_indices(OuterRight, &[0, 2, 41, 36, 17]),
                RoiPolygon::from_indices(OuterLeft, &[16, 14, 46, 45, 26]),
                RoiPolygon::from_indices(Center, &[27, 35, 33, 31]),
            ],
        }
    }
}

impl RoiTable {
    pub fn get(&self, roi: RoiId) -> &RoiPolygon {
        &self.polygons[roi.index()]
    }

    pub fn polygons(&self) -> &[RoiPolygon] {
        &self.polygons
    }

    /// Applies an override file on top of the defaults.
    ///
    /// One ROI per line, `name = i, j, k, ...`; a vertex written `i^s` is
    /// landmark `i` lifted by `s` inter-ocular distances. `#` starts a
    /// comment. ROIs not mentioned keep their default polygon.
    pub fn with_overrides(mut self, text: &str) -> Result<Self> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |column: usize, message: String| Error::ParseError {
                file: "roi overrides".into(),
                line: lineno + 1,
                column,
                message,
            };
            let (name, list) = line
                .split_once('=')
                .ok_or_else(|| parse_err(1, "expected `roi = indices`".into()))?;
            let roi: RoiId = name
                .parse()
                .map_err(|e: Error| parse_err(1, e.to_string()))?;
            let mut vertices = Vec::new();
            for (k, tok) in list.split(',').map(str::trim).enumerate() {
                let bad = || parse_err(k + 2, format!("bad vertex `{tok}`"));
                let v = match tok.split_once('^') {
                    Some((i, lift)) => VertexRef::lifted(
                        i.trim().parse().map_err(|_| bad())?,
                        lift.trim().parse().map_err(|_| bad())?,
                    ),
                    None => VertexRef::at(tok.parse().map_err(|_| bad())?),
                };
                vertices.push(v);
            }
            self.polygons[roi.index()] =
                RoiPolygon::new(roi, vertices).map_err(|e| parse_err(1, e.to_string()))?;
        }
        Ok(self)
    }

    /// Text form accepted by [`with_overrides`](Self::with_overrides).
    pub fn to_config_text(&self) -> String {
        self.polygons
            .iter()
            .map(|p| {
                let v: Vec<String> = p.vertices.iter().map(ToString::to_string).collect();
                format!("{} = {}\n", p.roi, v.join(", "))
            })
            .collect()
    }
}

/// Row-major RGB raster.
#[derive(Debug, Clone)]
pub struct Raster {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Raster {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::DimensionMismatch {
                context: "raster data".into(),
                expected: width * height * 3,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        let data = std::iter::repeat_n(rgb, width * height).flatten().collect();
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// Even-odd test of point `p` against a closed polygon.
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let mut inside = false;
    let mut j = poly.len() - 1;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Mean of each channel over the pixels whose centres fall inside the ROI
/// polygon.
pub fn roi_channel_means(
    frame: &Raster,
    polygon: &RoiPolygon,
    landmarks: &[Point],
) -> Result<RoiChannelMeans> {
    let poly = polygon.resolve(landmarks)?;
    let (w, h) = (frame.width as f64, frame.height as f64);
    for (vertex, p) in poly.iter().enumerate() {
        if !(p.x >= 0.0 && p.x <= w && p.y >= 0.0 && p.y <= h) {
            return Err(Error::OutOfBounds {
                roi: polygon.roi.to_string(),
                vertex,
                x: p.x,
                y: p.y,
                width: frame.width,
                height: frame.height,
            });
        }
    }

    let min_x = poly.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let max_x = poly.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let min_y = poly.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let max_y = poly.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let x0 = min_x.floor() as usize;
    let x1 = (max_x.ceil() as usize).min(frame.width);
    let y0 = min_y.floor() as usize;
    let y1 = (max_y.ceil() as usize).min(frame.height);

    let mut sum = [0.0; 3];
    let mut count = 0usize;
    for y in y0..y1 {
        for x in x0..x1 {
            if point_in_polygon(Point::new(x as f64 + 0.5, y as f64 + 0.5), &poly) {
                let px = frame.pixel(x, y);
                sum[0] += px[0];
                sum[1] += px[1];
                sum[2] += px[2];
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::EmptyRoi {
            roi: polygon.roi.to_string(),
        });
    }
    let n = count as f64;
    Ok(RoiChannelMeans::new(sum[0] / n, sum[1] / n, sum[2] / n))
}

/// Means for all seven ROIs of one frame, in canonical order.
pub fn all_roi_means(
    frame: &Raster,
    table: &RoiTable,
    landmarks: &[Point],
) -> Result<[RoiChannelMeans; 7]> {
    let mut out = [RoiChannelMeans::splat(0.0); 7];
    for roi in RoiId::ALL {
        out[roi.index()] = roi_channel_means(frame, table.get(roi), landmarks)?;
    }
    Ok(out)
}

/// A frontal mean-face layout of the 68 landmarks, centred at
/// `(cx, cy)` with face width roughly `scale`.
pub fn template_face(cx: f64, cy: f64, scale: f64) -> Vec<Point> {
    use std::f64::consts::PI;
    let mut pts = Vec::with_capacity(N_LANDMARKS);
    // jaw 0..17
    for k in 0..17 {
        let t = PI * k as f64 / 16.0;
        pts.push((-0.46 * t.cos(), 0.05 + 0.5 * t.sin()));
    }
    // brows 17..27
    for k in 0..5 {
        let arch = 0.04 * (PI * k as f64 / 4.0).sin();
        pts.push((-0.38 + 0.075 * k as f64, -0.22 - arch));
    }
    for k in 0..5 {
        let arch = 0.04 * (PI * k as f64 / 4.0).sin();
        pts.push((0.08 + 0.075 * k as f64, -0.22 - arch));
    }
    // nose bridge 27..31, nostrils 31..36
    for k in 0..4 {
        pts.push((0.0, -0.12 + 0.08 * k as f64));
    }
    for k in 0..5 {
        let dy = if k == 2 { 0.02 } else { 0.0 };
        pts.push((-0.1 + 0.05 * k as f64, 0.18 + dy));
    }
    // eyes 36..48
    let eye = [(-0.09, 0.0), (-0.03, -0.03), (0.03, -0.03), (0.09, 0.0), (0.03, 0.03), (-0.03, 0.03)];
    for &(dx, dy) in &eye {
        pts.push((-0.22 + dx, -0.08 + dy));
    }
    // left eye mirrors the right: 42 inner corner, 45 outer corner
    for k in [3, 2, 1, 0, 5, 4] {
        let (dx, dy) = eye[k];
        pts.push((0.22 - dx, -0.08 + dy));
    }
    // mouth 48..68
    for k in 0..12 {
        let a = PI + 2.0 * PI * k as f64 / 12.0;
        pts.push((0.16 * a.cos(), 0.33 + 0.06 * a.sin()));
    }
    for k in 0..8 {
        let a = PI + 2.0 * PI * k as f64 / 8.0;
        pts.push((0.1 * a.cos(), 0.33 + 0.025 * a.sin()));
    }
    pts.into_iter()
        .map(|(x, y)| Point::new(cx + x * scale, cy + y * scale))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_landmarks(coords: &[(usize, f64, f64)]) -> Vec<Point> {
        let mut lm = template_face(50.0, 50.0, 40.0);
        for &(i, x, y) in coords {
            lm[i] = Point::new(x, y);
        }
        lm
    }

    fn quad(roi: RoiId) -> RoiPolygon {
        RoiPolygon::new(roi, [0, 1, 2, 3].map(VertexRef::at).to_vec()).unwrap()
    }

    #[test]
    fn constant_raster_gives_constant() {
        let img = Raster::filled(100, 100, [128.0, 128.0, 128.0]);
        let lm = template_face(50.0, 55.0, 60.0);
        for poly in RoiTable::default().polygons() {
            let m = roi_channel_means(&img, poly, &lm).unwrap();
            assert_eq!(m, RoiChannelMeans::splat(128.0), "{}", poly.roi);
        }
    }

    #[test]
    fn left_half_polygon() {
        let img = Raster::from_fn(8, 6, |x, _| if x < 4 { [200.0, 0.0, 0.0] } else { [0.0, 200.0, 0.0] });
        let lm = square_landmarks(&[(0, 0.0, 0.0), (1, 4.0, 0.0), (2, 4.0, 6.0), (3, 0.0, 6.0)]);
        let m = roi_channel_means(&img, &quad(RoiId::Chin), &lm).unwrap();
        assert_eq!(m, RoiChannelMeans::new(200.0, 0.0, 0.0));
    }

    #[test]
    fn four_by_four_enumeration() {
        let img = Raster::from_fn(4, 4, |x, y| {
            let v = (y * 4 + x) as f64;
            [v, 10.0 * v, 100.0 - v]
        });
        let lm = square_landmarks(&[(0, 1.0, 1.0), (1, 3.0, 1.0), (2, 3.0, 3.0), (3, 1.0, 3.0)]);
        let m = roi_channel_means(&img, &quad(RoiId::Center), &lm).unwrap();
        // covered pixels (1,1),(2,1),(1,2),(2,2) have v = 5, 6, 9, 10
        let mut oracle = [0.0; 3];
        for (x, y) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            let px = img.pixel(x, y);
            for c in 0..3 {
                oracle[c] += px[c] / 4.0;
            }
        }
        assert_eq!([m.r, m.g, m.b], oracle);
        assert_eq!(m.r, 7.5);
    }

    #[test]
    fn empty_and_out_of_bounds() {
        let img = Raster::filled(10, 10, [1.0; 3]);
        let tiny = square_landmarks(&[(0, 1.1, 1.1), (1, 1.3, 1.1), (2, 1.3, 1.3), (3, 1.1, 1.3)]);
        assert!(matches!(
            roi_channel_means(&img, &quad(RoiId::Chin), &tiny),
            Err(Error::EmptyRoi { .. })
        ));
        let off = square_landmarks(&[(0, 1.0, 1.0), (1, 12.0, 1.0), (2, 3.0, 3.0), (3, 1.0, 3.0)]);
        assert!(matches!(
            roi_channel_means(&img, &quad(RoiId::Chin), &off),
            Err(Error::OutOfBounds { vertex: 1, .. })
        ));
    }

    fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
        let orient = |p: Point, q: Point, r: Point| (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
        let d1 = orient(c, d, a);
        let d2 = orient(c, d, b);
        let d3 = orient(a, b, c);
        let d4 = orient(a, b, d);
        d1 * d2 < 0.0 && d3 * d4 < 0.0
    }

    #[test]
    fn default_polygons_are_simple_on_template() {
        let lm = template_face(100.0, 110.0, 120.0);
        for poly in RoiTable::default().polygons() {
            let p = poly.resolve(&lm).unwrap();
            let n = p.len();
            for i in 0..n {
                for j in i + 1..n {
                    // skip adjacent edges
                    if j == i + 1 || (i == 0 && j == n - 1) {
                        continue;
                    }
                    assert!(
                        !segments_cross(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]),
                        "{} edges {i} and {j} cross",
                        poly.roi
                    );
                }
            }
            let img = Raster::filled(200, 200, [1.0; 3]);
            roi_channel_means(&img, poly, &lm).unwrap();
        }
    }

    #[test]
    fn override_file() {
        let text = "# cheeks\nRC = 2, 5, 48, 31\nforehead = 19, 24, 24^0.5, 19^0.5\n";
        let t = RoiTable::default().with_overrides(text).unwrap();
        assert_eq!(t.get(RoiId::RightCheek).vertices.len(), 4);
        assert_eq!(t.get(RoiId::Forehead).vertices[2], VertexRef::lifted(24, 0.5));
        assert_eq!(t.get(RoiId::Chin), RoiTable::default().get(RoiId::Chin));

        let again = RoiTable::default().with_overrides(&t.to_config_text()).unwrap();
        assert_eq!(again, t);

        assert!(matches!(
            RoiTable::default().with_overrides("chin = 1, 2, 99"),
            Err(Error::ParseError { line: 1, .. })
        ));
        assert!(RoiTable::default().with_overrides("chin = 1, 2").is_err());
    }
}
