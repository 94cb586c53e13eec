use hyperquant_web::{hmn_curves_json, quantizer_curve_json, shift_trace_json};
use serde_json::Value;

fn h(p: f64) -> f64 {
    if p == 0.0 || p == 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

#[test]
fn curves_agree_with_closed_forms() {
    let v: Value = serde_json::from_str(&hmn_curves_json(3, 8, 11).unwrap()).unwrap();
    let curves = v["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 8);
    for c in curves.iter().take(4) {
        let values = c["values"].as_array().unwrap();
        let closed = c["closed_form"].as_array().unwrap();
        for (a, b) in values.iter().zip(closed) {
            assert!((a.as_f64().unwrap() - b.as_f64().unwrap()).abs() < 1e-9);
        }
    }
    assert!(curves[4]["closed_form"].is_null());
    // every curve ends at n bits when the channel is pure noise
    for c in curves {
        let last = c["values"].as_array().unwrap().last().unwrap().as_f64().unwrap();
        assert!((last - 3.0).abs() < 1e-9);
    }
}

#[test]
fn shift_trace_is_monotone() {
    let v: Value = serde_json::from_str(&shift_trace_json(3, "100, 010 111", 0.1).unwrap()).unwrap();
    assert_eq!(v["monotone"], true);
    let mut prev = v["initial_entropy"].as_f64().unwrap();
    for s in v["steps"].as_array().unwrap() {
        let e = s["entropy"].as_f64().unwrap();
        assert!(e <= prev + 1e-12);
        prev = e;
    }
    assert!(shift_trace_json(3, "10", 0.1).is_err());
    assert!(shift_trace_json(3, "101", 0.7).is_err());
}

#[test]
fn projection_meets_the_bound() {
    let v: Value = serde_json::from_str(&quantizer_curve_json(3, "", 6).unwrap()).unwrap();
    let alpha = v["alpha"].as_array().unwrap();
    for (k, a) in alpha.iter().enumerate() {
        let a = a.as_f64().unwrap();
        let mi = v["mi"][k].as_f64().unwrap();
        assert!((mi - 2.0 * (1.0 - h(a))).abs() < 1e-9);
        assert!((v["bound"][k].as_f64().unwrap() - mi).abs() < 1e-9);
    }
}

#[test]
fn custom_quantizer_stays_below() {
    let v: Value = serde_json::from_str(&quantizer_curve_json(3, "0 0 0 1 2 2 3 3", 21).unwrap()).unwrap();
    assert_eq!(v["cell_sizes"], serde_json::json!([3, 1, 2, 2]));
    for k in 0..21 {
        assert!(v["mi"][k].as_f64().unwrap() <= v["bound"][k].as_f64().unwrap() + 1e-9);
    }
    assert!(quantizer_curve_json(3, "0 1", 5).is_err());
    assert!(quantizer_curve_json(3, "0 0 0 1 2 2 3 9", 5).is_err());
}
