//! Quadrature nodes and fixed rules.
//!
//! Gauss-Laguerre and Gauss-Legendre nodes are computed by Newton iteration on
//! the three-term recurrences and cached; the 21-point Gauss-Kronrod pair uses
//! the classical hard-coded abscissae. All node sets are validated in tests
//! against moment identities.

use std::sync::OnceLock;

/// Newton iteration tolerance for node polishing; loose enough to avoid
/// double-precision limit cycles, tight enough for 1e-14-level nodes.
const NODE_EPS: f64 = 5e-15;
const NODE_MAX_IT: usize = 120;

/// Nodes and weights for the n-point Gauss-Laguerre rule with weight e^{-x} on (0, inf).
///
/// `sum_i w_i f(x_i)` approximates the integral of `f(x) e^{-x}`; the rule is
/// exact for polynomials of degree at most `2n - 1`.
pub fn gauss_laguerre(n: usize) -> Vec<(f64, f64)> {
    let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(n);
    let nf = n as f64;
    let mut z = 0.0_f64;
    for i in 0..n {
        if i == 0 {
            z = 3.0 / (1.0 + 2.4 * nf);
        } else if i == 1 {
            z += 15.0 / (1.0 + 2.5 * nf);
        } else {
            let ai = (i - 1) as f64;
            let prev2: f64 = nodes[i - 2].0;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - prev2);
        }
        let mut pp = 0.0;
        let mut p2 = 0.0;
        let mut converged = false;
        for _ in 0..NODE_MAX_IT {
            let mut p1 = 1.0_f64;
            p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (p1 - p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= NODE_EPS * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        debug_assert!(converged, "laguerre node {i} of {n} did not converge");
        let w = -1.0 / (pp * nf * p2);
        nodes.push((z, w));
    }
    nodes
}

/// Nodes and weights for the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let m = (n + 1) / 2;
    let mut nodes = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..NODE_MAX_IT {
            let mut p1 = 1.0_f64;
            let mut p2 = 0.0_f64;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= NODE_EPS {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        nodes[i] = (-z, w);
        nodes[n - 1 - i] = (z, w);
    }
    nodes
}

fn cached(cell: &OnceLock<Vec<(f64, f64)>>, make: impl FnOnce() -> Vec<(f64, f64)>) -> &Vec<(f64, f64)> {
    cell.get_or_init(make)
}

pub fn laguerre_cached(n: usize) -> &'static Vec<(f64, f64)> {
    static L64: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static L96: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static OTHER: OnceLock<std::sync::Mutex<std::collections::HashMap<usize, &'static Vec<(f64, f64)>>>> =
        OnceLock::new();
    match n {
        64 => cached(&L64, || gauss_laguerre(64)),
        96 => cached(&L96, || gauss_laguerre(96)),
        _ => {
            let map = OTHER.get_or_init(|| std::sync::Mutex::new(std::collections::HashMap::new()));
            let mut guard = map.lock().unwrap();
            guard
                .entry(n)
                .or_insert_with(|| Box::leak(Box::new(gauss_laguerre(n))))
        }
    }
}

pub fn legendre_cached(n: usize) -> &'static Vec<(f64, f64)> {
    static L32: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static OTHER: OnceLock<std::sync::Mutex<std::collections::HashMap<usize, &'static Vec<(f64, f64)>>>> =
        OnceLock::new();
    match n {
        32 => cached(&L32, || gauss_legendre(32)),
        _ => {
            let map = OTHER.get_or_init(|| std::sync::Mutex::new(std::collections::HashMap::new()));
            let mut guard = map.lock().unwrap();
            guard
                .entry(n)
                .or_insert_with(|| Box::leak(Box::new(gauss_legendre(n))))
        }
    }
}

/// Abscissae of the 21-point Kronrod rule on [-1, 1]; the even-indexed entries
/// are the embedded 10-point Gauss abscissae.
pub const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_00,
    0.973_906_528_517_171_720_077_964_012_084_45,
    0.930_157_491_355_708_226_001_207_180_059_51,
    0.865_063_366_688_984_510_732_096_688_423_49,
    0.780_817_726_586_416_897_063_717_578_345_04,
    0.679_409_568_299_024_406_234_327_365_114_87,
    0.562_757_134_668_604_683_339_000_099_272_69,
    0.433_395_394_129_247_190_799_265_943_165_78,
    0.294_392_862_701_460_198_131_126_603_103_87,
    0.148_874_338_981_631_210_884_826_001_129_72,
    0.0,
];

/// Weights of the 21-point Kronrod rule.
pub const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_19,
    0.032_558_162_307_964_727_478_818_972_459_39,
    0.054_755_896_574_351_996_031_381_300_244_58,
    0.075_039_674_810_919_952_767_043_140_916_19,
    0.093_125_454_583_697_605_535_065_465_083_37,
    0.109_387_158_802_297_641_899_210_590_325_80,
    0.123_491_976_262_065_851_077_958_109_831_07,
    0.134_709_217_311_473_325_928_054_001_771_71,
    0.142_775_938_577_060_080_797_094_273_138_72,
    0.147_739_104_901_338_491_374_841_515_972_07,
    0.149_445_554_002_916_905_664_936_468_389_82,
];

/// Weights of the embedded 10-point Gauss rule.
pub const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_33,
    0.149_451_349_150_580_593_145_776_339_657_70,
    0.219_086_362_515_982_043_995_534_934_228_16,
    0.269_266_719_309_996_355_091_226_921_569_47,
    0.295_524_224_714_752_870_173_892_994_651_34,
];
