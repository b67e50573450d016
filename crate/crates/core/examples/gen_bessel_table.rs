//! Regenerates `src/analytic/bessel_zeros.rs`.
//!
//! Zeros of `J_m` and `J'_m` for `m <= 10` (first 30 positive zeros each) plus
//! the first zero of order 11, which bounds the range where the merged disk
//! spectrum is complete.
//!
//!     cargo run -p sandwich-core --example gen_bessel_table > crates/core/src/analytic/bessel_zeros.rs
//!
//! `J_m` is evaluated from Bessel's integral with the periodic trapezoid
//! rule, which converges geometrically once the node count exceeds `x + m`.
//! Zeros are bracketed on a fine scan and bisected to machine precision.

const ORDERS: usize = 11;
const ZEROS_PER_ORDER: usize = 30;

fn bessel_j(m: i32, x: f64) -> f64 {
    // (1/pi) int_0^pi cos(m t - x sin t) dt
    let n = 512;
    let h = std::f64::consts::PI / n as f64;
    let mut s = 0.0;
    for k in 0..=n {
        let t = k as f64 * h;
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        s += w * (m as f64 * t - x * t.sin()).cos();
    }
    s * h / std::f64::consts::PI
}

fn bessel_jp(m: i32, x: f64) -> f64 {
    if m == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))
    }
}

fn zeros(f: impl Fn(f64) -> f64, start: f64, count: usize) -> Vec<f64> {
    let step = 0.01;
    let mut out = Vec::with_capacity(count);
    let mut a = start;
    let mut fa = f(a);
    while out.len() < count {
        let b = a + step;
        let fb = f(b);
        if fa == 0.0 {
            out.push(a);
        } else if fa.signum() != fb.signum() {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    out
}

fn start_for(m: i32) -> f64 {
    // every positive zero of J_m and J'_m (m >= 1) exceeds m
    if m == 0 {
        0.05
    } else {
        0.9 * m as f64
    }
}

fn emit(name: &str, table: &[Vec<f64>]) {
    println!("pub(crate) const {name}: [[f64; {ZEROS_PER_ORDER}]; {ORDERS}] = [");
    for row in table {
        print!("    [");
        for (i, z) in row.iter().enumerate() {
            if i % 3 == 0 {
                print!("\n        ");
            } else {
                print!(" ");
            }
            print!("{z:?},");
        }
        println!("\n    ],");
    }
    println!("];");
}

fn main() {
    let j: Vec<Vec<f64>> = (0..ORDERS as i32)
        .map(|m| zeros(|x| bessel_j(m, x), start_for(m), ZEROS_PER_ORDER))
        .collect();
    let jp: Vec<Vec<f64>> = (0..ORDERS as i32)
        .map(|m| zeros(|x| bessel_jp(m, x), start_for(m), ZEROS_PER_ORDER))
        .collect();
    let j_cut = zeros(|x| bessel_j(ORDERS as i32, x), start_for(ORDERS as i32), 1)[0];
    let jp_cut = zeros(|x| bessel_jp(ORDERS as i32, x), start_for(ORDERS as i32), 1)[0];

    println!(
        "// @generated by `cargo run -p sandwich-core --example gen_bessel_table`. Do not edit."
    );
    println!();
    println!("/// Positive zeros `j_(m,s)` of `J_m`, row `m`, column `s - 1`.");
    emit("J_ZEROS", &j);
    println!();
    println!("/// Positive zeros `j'_(m,s)` of `J'_m`, row `m`, column `s - 1`. The trivial");
    println!("/// zero of `J'_0` at the origin is not listed.");
    emit("JP_ZEROS", &jp);
    println!();
    println!("/// First zero of `J_{ORDERS}`.");
    println!("pub(crate) const J_CUTOFF: f64 = {j_cut:?};");
    println!();
    println!("/// First zero of `J'_{ORDERS}`.");
    println!("pub(crate) const JP_CUTOFF: f64 = {jp_cut:?};");
}
