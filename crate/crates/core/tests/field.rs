//! Squeezing against the intracavity field amplitude.

use eitsqz::{field_limit, field_scan, variance_analytic, OperatingPoint};

#[test]
fn squeezing_degrades_past_the_field_limit() {
    let ep = OperatingPoint::new(100.0, 1.0 / 2000.0, 1.0, 4.0).effective().unwrap();
    let lim = field_limit(&ep).unwrap();
    let amplitudes: Vec<f64> = (0..=32).map(|k| 0.25 * k as f64).collect();
    let scan = field_scan(&ep, &amplitudes).unwrap();
    let zero = variance_analytic(&ep).unwrap().ds_min;
    assert!((scan[0].ds_min - zero).abs() < 1e-8 * zero);
    assert!(scan[0].ds_min < 1.0);
    // Nearly flat well inside the limit, rising beyond it.
    let inside: Vec<_> = scan.iter().filter(|p| p.amplitude <= 0.3 * lim.amplitude).collect();
    assert!(inside.iter().all(|p| p.stable && (p.ds_min - zero).abs() < 0.05 * zero));
    let beyond: Vec<f64> =
        scan.iter().filter(|p| p.amplitude >= lim.amplitude && p.stable).map(|p| p.ds_min).collect();
    assert!(beyond.len() > 3);
    assert!(beyond.windows(2).all(|w| w[1] >= w[0]), "{beyond:?}");
    assert!(*beyond.last().unwrap() > 1.0);
}
