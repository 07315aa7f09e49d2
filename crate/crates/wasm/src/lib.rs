//! wasm-bindgen bindings behind `www/index.html`. Each export takes graphs as
//! generator spec strings and returns JSON.

use eld::eld::{embedding_for, AxisMeasures};
use eld::io::matrix_to_json;
use eld::{
    distance_matrix_labeled, wasserstein_1d, EldParams, GeneratorSpec, Graph, LaplacianKind,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn params(k: usize, p: f64, normalized: bool) -> EldParams {
    let mut params = EldParams::new(k, p);
    if normalized {
        params.mode = LaplacianKind::Normalized;
    }
    params
}

fn graph(spec: &str) -> Result<Graph, String> {
    let spec: GeneratorSpec = spec.trim().parse().map_err(|e| format!("{e}"))?;
    spec.generate().map_err(|e| format!("{spec}: {e}"))
}

pub fn matrix_json(specs: &str, k: usize, p: f64, normalized: bool) -> Result<String, String> {
    let labels: Vec<String> = specs.split_whitespace().map(str::to_owned).collect();
    if labels.is_empty() {
        return Err("no graphs given".into());
    }
    let graphs = labels
        .iter()
        .map(|s| graph(s))
        .collect::<Result<Vec<_>, _>>()?;
    let dm = distance_matrix_labeled(labels, &graphs, &params(k, p, normalized), None, false)
        .map_err(|e| e.to_string())?;
    matrix_to_json(&dm).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct EmbeddingView {
    n: usize,
    eigenvalues: Vec<f64>,
    axes: Vec<Vec<f64>>,
    edges: Vec<(usize, usize)>,
}

pub fn embedding_json(spec: &str, k: usize, normalized: bool) -> Result<String, String> {
    let g = graph(spec)?;
    let emb = embedding_for(&g, &params(k, 1.0, normalized), None).map_err(|e| e.to_string())?;
    let view = EmbeddingView {
        n: g.n(),
        eigenvalues: emb.eigenvalues().to_vec(),
        axes: (0..emb.k()).map(|r| emb.column(r).to_vec()).collect(),
        edges: g.edges().iter().map(|e| (e.u, e.v)).collect(),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct AxisView {
    a: Vec<f64>,
    b: Vec<f64>,
    distance: f64,
}

pub fn axis_json(
    spec_a: &str,
    spec_b: &str,
    axis: usize,
    k: usize,
    p: f64,
    normalized: bool,
) -> Result<String, String> {
    if axis >= k {
        return Err(format!("axis {axis} is outside 0..{k}"));
    }
    let params = params(k, p, normalized);
    params.validate().map_err(|e| e.to_string())?;
    let measure = |spec: &str| -> Result<_, String> {
        let g = graph(spec)?;
        let emb = embedding_for(&g, &params, None).map_err(|e| format!("{spec}: {e}"))?;
        let axes =
            AxisMeasures::from_embedding(&emb, params.orientation).map_err(|e| e.to_string())?;
        Ok(axes.axes()[axis].clone())
    };
    let (a, b) = (measure(spec_a)?, measure(spec_b)?);
    let distance = wasserstein_1d(&a, &b, p).map_err(|e| e.to_string())?;
    let view = AxisView {
        a: a.values().to_vec(),
        b: b.values().to_vec(),
        distance,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// Distance matrix over whitespace-separated generator specs, as
/// `{"labels": [...], "rows": [[...]]}`.
#[wasm_bindgen(js_name = distanceMatrix)]
pub fn distance_matrix(specs: &str, k: usize, p: f64, normalized: bool) -> Result<String, JsError> {
    matrix_json(specs, k, p, normalized).map_err(|e| JsError::new(&e))
}

/// The first `k` eigenpairs of one graph plus its edges, for plotting.
#[wasm_bindgen]
pub fn embedding(spec: &str, k: usize, normalized: bool) -> Result<String, JsError> {
    embedding_json(spec, k, normalized).map_err(|e| JsError::new(&e))
}

/// Sorted atoms of one axis measure for two graphs and their distance.
#[wasm_bindgen(js_name = axisMeasures)]
pub fn axis_measures(
    spec_a: &str,
    spec_b: &str,
    axis: usize,
    k: usize,
    p: f64,
    normalized: bool,
) -> Result<String, JsError> {
    axis_json(spec_a, spec_b, axis, k, p, normalized).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_for_two_specs() {
        let json: serde_json::Value =
            serde_json::from_str(&matrix_json("cycle:10\nwheel:10", 3, 1.0, false).unwrap())
                .unwrap();
        assert_eq!(json["labels"][1], "wheel:10");
        assert_eq!(json["rows"][0][0], 0.0);
        assert!(json["rows"][0][1].as_f64().unwrap() > 0.0);
        assert!(matrix_json("  ", 3, 1.0, false).is_err());
        assert!(matrix_json("cycle:3", 5, 1.0, false)
            .unwrap_err()
            .contains("k=5"));
    }

    #[test]
    fn embedding_view_has_all_axes() {
        let json: serde_json::Value =
            serde_json::from_str(&embedding_json("roc:3,4", 3, true).unwrap()).unwrap();
        assert_eq!(json["n"], 12);
        assert_eq!(json["axes"].as_array().unwrap().len(), 3);
        assert_eq!(json["edges"].as_array().unwrap().len(), 21);
    }

    #[test]
    fn axis_view_for_identical_cycles() {
        let json: serde_json::Value =
            serde_json::from_str(&axis_json("cycle:4", "cycle:4", 1, 2, 1.0, false).unwrap())
                .unwrap();
        assert_eq!(json["distance"], 0.0);
        assert_eq!(json["a"].as_array().unwrap().len(), 4);
        assert!(axis_json("cycle:4", "cycle:5", 2, 2, 1.0, false).is_err());
    }
}
